//! Python bindings. Nets travel as fixture JSON strings and reports come
//! back as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use skewnet::cohomology::{hypersurface_line_bundle_cohomology, theta_cohomology};
use skewnet::correspondence::{pfaffian_hypersurface, random_regular_net, GenerateOptions};
use skewnet::ideals::{ALTERNATE_PRIME, DEFAULT_DEGREE_CAP, DEFAULT_PRIME};
use skewnet::pipeline::{run_check, run_pipeline, PipelineOptions};
use skewnet::{pfaffian_scalar, ANet, ExactMatrix, Field};

fn err(e: skewnet::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_net(fixture: &str) -> PyResult<ANet> {
    ANet::from_json(fixture).map_err(err)
}

fn options(fields: Vec<u64>, prime: u32, alt_prime: u32, degree_cap: usize, samples: usize, seed: u64) -> PyResult<PipelineOptions> {
    let fields = fields.into_iter().map(Field::prime).collect::<skewnet::Result<Vec<_>>>().map_err(err)?;
    Ok(PipelineOptions { fields, prime, alt_prime, degree_cap, samples, seed })
}

/// Fixture JSON of a random regular net with smooth Pfaffian hypersurface.
#[pyfunction]
#[pyo3(signature = (seed, n = 5, two_m = 6, bound = 3))]
fn generate(seed: u64, n: usize, two_m: usize, bound: i64) -> PyResult<String> {
    let mut opts = if (n, two_m) == (5, 6) { GenerateOptions::v14() } else { GenerateOptions::shape(n, two_m) };
    opts.bound = bound;
    let g = random_regular_net(seed, &opts, &Default::default()).map_err(err)?;
    g.net.to_json_pretty().map_err(err)
}

#[pyfunction]
fn fingerprint(fixture: &str) -> PyResult<String> {
    parse_net(fixture)?.fingerprint().map_err(err)
}

/// The Pfaffian of the net as a polynomial in canonical text form.
#[pyfunction]
fn pfaffian(fixture: &str) -> PyResult<String> {
    Ok(pfaffian_hypersurface(&parse_net(fixture)?).map_err(err)?.to_text())
}

/// Pfaffian of an integer skew matrix, over QQ or modulo `p`.
#[pyfunction]
#[pyo3(signature = (rows, p = None))]
fn pfaffian_of(rows: Vec<Vec<i64>>, p: Option<u64>) -> PyResult<String> {
    let field = match p {
        Some(p) => Field::prime(p).map_err(err)?,
        None => Field::Rational,
    };
    let m = ExactMatrix::from_i64(&field, &rows).map_err(err)?;
    Ok(pfaffian_scalar(&m).map_err(err)?.to_string())
}

#[pyfunction]
fn theta_row(fixture: &str, t: i64) -> PyResult<Vec<u64>> {
    theta_cohomology(&parse_net(fixture)?, t, &Default::default()).map_err(err)
}

#[pyfunction]
fn hypersurface_row(d: usize, n: usize, t: i64) -> PyResult<Vec<u64>> {
    hypersurface_line_bundle_cohomology(d, n, t).map_err(err)
}

/// Report JSON of the full pipeline.
#[pyfunction]
#[pyo3(signature = (fixture, fields = vec![2, 3], prime = DEFAULT_PRIME, alt_prime = ALTERNATE_PRIME, degree_cap = DEFAULT_DEGREE_CAP, samples = 1000, seed = 0))]
fn pipeline(
    py: Python<'_>,
    fixture: &str,
    fields: Vec<u64>,
    prime: u32,
    alt_prime: u32,
    degree_cap: usize,
    samples: usize,
    seed: u64,
) -> PyResult<String> {
    let net = parse_net(fixture)?;
    let opts = options(fields, prime, alt_prime, degree_cap, samples, seed)?;
    let report = py.detach(|| run_pipeline(&net, &opts)).map_err(err)?;
    report.to_json().map_err(err)
}

/// Stage JSON of one named check.
#[pyfunction]
#[pyo3(signature = (fixture, check, fields = vec![2, 3], samples = 1000, seed = 0))]
fn verify(py: Python<'_>, fixture: &str, check: &str, fields: Vec<u64>, samples: usize, seed: u64) -> PyResult<String> {
    let net = parse_net(fixture)?;
    let opts = options(fields, DEFAULT_PRIME, ALTERNATE_PRIME, DEFAULT_DEGREE_CAP, samples, seed)?;
    let stage = py.detach(|| run_check(&net, check, &opts)).map_err(err)?;
    serde_json::to_string(&stage).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
fn pyskewnet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(fingerprint, m)?)?;
    m.add_function(wrap_pyfunction!(pfaffian, m)?)?;
    m.add_function(wrap_pyfunction!(pfaffian_of, m)?)?;
    m.add_function(wrap_pyfunction!(theta_row, m)?)?;
    m.add_function(wrap_pyfunction!(hypersurface_row, m)?)?;
    m.add_function(wrap_pyfunction!(pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_functions_round_trip() {
        Python::initialize();
        Python::attach(|py| {
            let m = PyModule::new(py, "pyskewnet").unwrap();
            pyskewnet(&m).unwrap();
            let fixture: String = m.getattr("generate").unwrap().call1((3u64, 4usize, 4usize)).unwrap().extract().unwrap();
            let fp: String = m.getattr("fingerprint").unwrap().call1((fixture.as_str(),)).unwrap().extract().unwrap();
            assert_eq!(fp.len(), 64);
            let row: Vec<u64> = m.getattr("hypersurface_row").unwrap().call1((3usize, 5usize, 1i64)).unwrap().extract().unwrap();
            assert_eq!(row, vec![5, 0, 0, 0]);
            assert!(m.getattr("verify").unwrap().call1((fixture.as_str(), "bogus")).is_err());
        });
    }
}
