use proptest::prelude::*;

use skewnet::cohomology::{expected_instanton_table, hypersurface_line_bundle_cohomology};
use skewnet::pipeline::report_diff;
use skewnet::upoly;
use skewnet::{pfaffian_scalar, ANet, ExactMatrix, Field, FieldOps, Zp};

const P: u64 = 32003;

fn skew(upper: &[i64], n: usize) -> Vec<Vec<i64>> {
    let mut rows = vec![vec![0i64; n]; n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            rows[i][j] = upper[k];
            rows[j][i] = -upper[k];
            k += 1;
        }
    }
    rows
}

fn skew_strategy(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(-50i64..=50, n * (n - 1) / 2).prop_map(move |u| skew(&u, n))
}

fn square_strategy(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-20i64..=20, n), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pfaffian_squares_to_determinant(rows in skew_strategy(6), p in prop::bool::ANY) {
        let field = if p { Field::Prime(P as u32) } else { Field::Rational };
        let m = ExactMatrix::from_i64(&field, &rows).unwrap();
        let pf = pfaffian_scalar(&m).unwrap();
        prop_assert_eq!(pf.mul(&pf).unwrap(), m.det().unwrap());
    }

    #[test]
    fn odd_skew_matrices_are_singular(rows in skew_strategy(5)) {
        let m = ExactMatrix::from_i64(&Field::Rational, &rows).unwrap();
        prop_assert!(m.det().unwrap().is_zero());
        prop_assert!(m.rank() % 2 == 0);
    }

    #[test]
    fn pfaffian_under_congruence(rows in skew_strategy(4), b in square_strategy(4)) {
        let field = Field::Rational;
        let m = ExactMatrix::from_i64(&field, &rows).unwrap();
        let b = ExactMatrix::from_i64(&field, &b).unwrap();
        let lhs = pfaffian_scalar(&b.transpose().mul(&m).unwrap().mul(&b).unwrap()).unwrap();
        let rhs = b.det().unwrap().mul(&pfaffian_scalar(&m).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hypersurface_rows_have_polynomial_euler_characteristic(d in 1usize..5, n in 3usize..7, t in -8i64..8) {
        let row = hypersurface_line_bundle_cohomology(d, n, t).unwrap();
        let chi: i64 = row.iter().enumerate().map(|(p, &h)| if p % 2 == 0 { h as i64 } else { -(h as i64) }).sum();
        // χ(O_Y(t)) = χ(O(t)) - χ(O(t-d)) with χ(O(s)) = C(s+N, N) as a polynomial in s
        let big_n = (n - 1) as i64;
        let poly = |s: i64| (1..=big_n).fold((1i128, 1i128), |(num, den), k| (num * (s + k) as i128, den * k as i128));
        let (a, b) = poly(t);
        let (c, e) = poly(t - d as i64);
        prop_assert_eq!(chi as i128, a / b - c / e);
    }

    #[test]
    fn instanton_table_is_serre_symmetric(k in 2u64..6) {
        let t = expected_instanton_table(3, k).unwrap();
        for c in &t.cells {
            let dual = t.cell(3 - c.p, -2 - c.t);
            if let Some(dual) = dual {
                prop_assert_eq!(&dual.expected, &c.expected);
            }
        }
    }

    #[test]
    fn fixture_round_trip(uppers in prop::collection::vec(prop::collection::vec(-9i64..=9, 15), 5)) {
        let Ok(net) = ANet::from_upper(&Field::Rational, 6, &uppers) else { return Ok(()) };
        let json = net.to_json_pretty().unwrap();
        let back = ANet::from_json(&json).unwrap();
        prop_assert_eq!(back.fingerprint().unwrap(), net.fingerprint().unwrap());
        prop_assert_eq!(back.to_json_pretty().unwrap(), json);
    }

    #[test]
    fn report_diff_is_reflexive_and_finds_changes(xs in prop::collection::vec(0u32..100, 1..8), i in 0usize..8) {
        let a = serde_json::json!({ "stages": xs.iter().map(|x| serde_json::json!({"name": format!("s{x}"), "v": x})).collect::<Vec<_>>() });
        let sa = serde_json::to_string_pretty(&a).unwrap();
        prop_assert!(report_diff(&sa, &sa).unwrap().identical);
        let mut b = a.clone();
        let i = i % xs.len();
        b["stages"][i]["v"] = serde_json::json!(1000);
        let d = report_diff(&sa, &serde_json::to_string_pretty(&b).unwrap()).unwrap();
        prop_assert!(!d.identical);
        prop_assert_eq!(d.differences.len(), 1);
    }

    #[test]
    fn roots_of_split_polynomials(rs in prop::collection::btree_set(0u32..P as u32, 1..6), seed in any::<u64>()) {
        use rand::SeedableRng;
        let f = Zp::new(P).unwrap();
        let poly = rs.iter().fold(vec![f.one()], |acc, &r| upoly::mul(&f, &acc, &[f.neg(&r), f.one()]));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut found = upoly::roots(&f, &poly, &mut rng);
        found.sort();
        prop_assert_eq!(found, rs.into_iter().collect::<Vec<_>>());
    }
}
