//! Derived values recomputed by independent routes.

use skewnet::cohomology::{
    exceptional_pair_check_y, hypersurface_line_bundle_cohomology, instanton_euler_characteristic, theta_cohomology,
    theta_euler_characteristic,
};
use skewnet::correspondence::{pfaffian_hypersurface, Tri};
use skewnet::grassmann::{enumerate_grassmannian, plucker_quadrics};
use skewnet::ideals::{HilbertConfig, HomogeneousIdeal};
use skewnet::multipoly::binomial;
use skewnet::verify::{count_points, y_rank_profile};
use skewnet::{ANet, Field};

fn fixture(seed: u32) -> ANet {
    let path = format!("{}/tests/fixtures/v14_seed{seed}.json", env!("CARGO_MANIFEST_DIR"));
    ANet::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn choose(n: i64, k: i64) -> u64 {
    if n < k || k < 0 {
        0
    } else {
        binomial(n as usize, k as usize) as u64
    }
}

#[test]
fn cubic_line_bundles_match_hilbert_function_and_duality() {
    let net = fixture(1);
    let f = pfaffian_hypersurface(&net).unwrap().map_field(&Field::Prime(32003)).unwrap();
    let ideal = HomogeneousIdeal::new(&Field::Prime(32003), 5, vec![f]).unwrap();
    let cfg = HilbertConfig::default();
    let h0 = |t: i64| if t < 0 { 0 } else { ideal.hilbert_function(t as usize, &cfg).unwrap() as u64 };
    for t in -6..=5 {
        let row = hypersurface_line_bundle_cohomology(3, 5, t).unwrap();
        assert_eq!(row[0], h0(t), "h0 at {t}");
        // ω_Y = O_Y(-2)
        assert_eq!(row[3], h0(-2 - t), "h3 at {t}");
        assert_eq!(row[1] + row[2], 0);
    }
}

#[test]
fn quadric_surface_rows_by_counting_monomials() {
    for t in -5..=5i64 {
        let row = hypersurface_line_bundle_cohomology(2, 4, t).unwrap();
        let h0 = choose(t + 3, 3) - choose(t + 1, 3);
        let h2 = choose(-t + 1, 3) - choose(-t - 1, 3);
        assert_eq!(row, vec![h0, 0, h2], "t = {t}");
    }
}

#[test]
fn theta_sections_in_positive_twists() {
    let net = fixture(2);
    let cfg = HilbertConfig::default();
    for t in 1..=2i64 {
        let row = theta_cohomology(&net, t, &cfg).unwrap();
        let expected = 6 * (choose(t + 4, 4) - choose(t + 3, 4));
        assert_eq!(row[0], expected);
        assert!(row[1..].iter().all(|&h| h == 0));
        assert_eq!(theta_euler_characteristic(5, 6, t), expected as i64);
    }
}

#[test]
fn theta_rows_have_the_right_euler_characteristic() {
    let net = fixture(3);
    let cfg = HilbertConfig::default();
    for t in -6..=1i64 {
        let row = theta_cohomology(&net, t, &cfg).unwrap();
        let chi: i64 = row.iter().enumerate().map(|(p, &h)| if p % 2 == 0 { h as i64 } else { -(h as i64) }).sum();
        let oracle = 6 * (choose(t + 4, 4) as i64 - choose(t + 3, 4) as i64 + choose(-t - 1, 4) as i64
            - choose(-t, 4) as i64);
        assert_eq!(chi, oracle, "t = {t}");
    }
}

#[test]
fn instanton_euler_characteristic_from_riemann_roch() {
    // χ(O_Y(t)) on a cubic threefold minus the charge term
    for t in -4..=4i64 {
        let chi_o = choose(t + 4, 4) as i64 + choose(-t - 1, 4) as i64
            - choose(t + 1, 4) as i64
            - choose(-t + 2, 4) as i64;
        assert_eq!(instanton_euler_characteristic(3, 2, t), 2 * chi_o - 2 * (t + 1), "t = {t}");
    }
    assert_eq!(instanton_euler_characteristic(3, 2, -1), 0);
    assert_eq!(instanton_euler_characteristic(3, 2, 1), 6);
}

#[test]
fn exceptional_pair_rows() {
    let r = exceptional_pair_check_y(3, 5).unwrap();
    assert_eq!(r.verdict, Tri::Yes);
    for row in &r.rows {
        assert_eq!(row.computed, row.expected, "{}", row.pair);
    }
}

#[test]
fn point_counts_of_linear_spaces() {
    let gf2 = Field::Prime(2);
    assert_eq!(count_points(&HomogeneousIdeal::zero(&gf2, 5), &gf2).unwrap(), 31);
    assert_eq!(count_points(&HomogeneousIdeal::zero(&gf2, 6), &gf2).unwrap(), 63);
    let gf3 = Field::Prime(3);
    let x0 = skewnet::MultiPoly::var(&gf3, 5, 0);
    assert_eq!(count_points(&HomogeneousIdeal::new(&gf3, 5, vec![x0]).unwrap(), &gf3).unwrap(), 40);
    assert_eq!(count_points(&HomogeneousIdeal::maximal(&gf3, 4), &gf3).unwrap(), 0);
}

#[test]
fn grassmannian_point_count() {
    for q in [2u128, 3] {
        let field = Field::prime(q as u64).unwrap();
        let gauss = (q.pow(6) - 1) * (q.pow(5) - 1) / ((q * q - 1) * (q - 1));
        assert_eq!(enumerate_grassmannian(6, &field, 1 << 20).unwrap().len() as u128, gauss);
        if q == 2 {
            let ideal = HomogeneousIdeal::new(&field, 15, plucker_quadrics(&field, 6).unwrap()).unwrap();
            assert_eq!(count_points(&ideal, &field).unwrap(), gauss);
        }
    }
}

#[test]
fn pfaffian_cubic_points_agree_with_rank_profile() {
    let net = fixture(1);
    for p in [2u64, 3] {
        let field = Field::prime(p).unwrap();
        let f = pfaffian_hypersurface(&net).unwrap();
        let ideal = HomogeneousIdeal::new(&Field::Rational, 5, vec![f]).unwrap();
        let profile = y_rank_profile(&net, &field).unwrap();
        assert_eq!(count_points(&ideal, &field).unwrap(), profile.points as u128);
        // a smooth Pfaffian cubic has no rank-2 points
        assert_eq!(profile.histogram[0] + profile.histogram[2], 0);
        assert_eq!(profile.histogram[4], profile.points);
    }
}
