pub mod cohomology;
pub mod correspondence;
pub mod error;
pub mod field;
pub mod grassmann;
pub mod linalg;
pub mod matrix;
pub mod ideals;
pub mod multipoly;
pub mod net;
pub mod pipeline;
pub mod upoly;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Field, FieldElement, FieldOps, GfExt, Qq, Zp};
pub use matrix::{pfaffian_scalar, ExactMatrix};
pub use net::ANet;
pub use multipoly::{exact_divide, pfaffian_poly, Monomial, MultiPoly, SkewPolyMatrix};
