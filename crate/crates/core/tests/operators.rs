//! Fast operators against their oracles and closed forms, through the public
//! API only.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rieszkit::maximal::maximal_with;
use rieszkit::morrey::indicator_weight;
use rieszkit::oracle::{maximal_bruteforce, morrey_bruteforce, riesz_bruteforce, riesz_midpoint};
use rieszkit::{
    a1_constant, a1_lift, choose_gamma, maximal, maximal_indicator_majorant, morrey_constant, power_weight,
    random_weight, riesz_at_point_radial, riesz_direct, riesz_fft, validate_params, Field, GridSpec, MorreyConvention,
    RadiusLadder,
};

fn random_compact(spec: GridSpec, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = spec.half_extent();
    Field::from_fn(spec, |x| if x[..spec.d].iter().all(|v| v.abs() < 0.6 * l) { rng.gen_range(0.0..1.0) } else { 0.0 })
}

#[test]
fn direct_summation_matches_the_oracle_at_random_points() {
    let spec = GridSpec::centered_box(2, 24, 2.0).unwrap();
    let f = random_compact(spec, 3);
    let v = riesz_direct(&f, 0.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let k = rng.gen_range(0..spec.len());
        let slow = riesz_bruteforce(&f, 0.7, &spec.point_flat(k)).unwrap();
        assert_relative_eq!(v.values[k], slow, max_relative = 1e-12);
    }
}

#[test]
fn fft_matches_direct_in_one_dimension_up_to_512() {
    let spec = GridSpec::centered_box(1, 512, 4.0).unwrap();
    let f = random_compact(spec, 9);
    let a = riesz_fft(&f, 0.4).unwrap();
    let b = riesz_direct(&f, 0.4).unwrap();
    let dev = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(dev <= 1e-10 * b.max_abs());
}

#[test]
fn centre_cell_correction_raises_the_potential() {
    // the midpoint convention drops the singular cell entirely
    let spec = GridSpec::centered_box(1, 128, 2.0).unwrap();
    let f = Field::constant(spec, 1.0);
    let x = spec.point(&[64, 0, 0]);
    let full = riesz_bruteforce(&f, 0.5, &x).unwrap();
    let mid = riesz_midpoint(&f, 0.5, &x).unwrap();
    assert!(full > mid);
    // the singular cell alone carries 2 (h/2)^(1/2) / (1/2); the others shift slightly
    assert_relative_eq!(full - mid, 2.0 * (spec.h / 2.0f64).sqrt() / 0.5, max_relative = 0.05);
}

#[test]
fn disk_potential_by_the_radial_route() {
    let spec = GridSpec::centered_box(2, 128, 2.0).unwrap();
    let g = indicator_weight(1.0, 3.0, &spec);
    let v = riesz_at_point_radial(&g, 1.0, &[0.0; 3]).unwrap();
    assert_relative_eq!(v, 3.0 * 2.0 * PI, max_relative = 0.03);
    let direct = riesz_direct(&g, 1.0).unwrap().at(&[64, 64, 0]);
    assert_relative_eq!(v, direct, max_relative = 0.03);
}

#[test]
fn exhaustive_maximal_dominates_the_ladder() {
    let spec = GridSpec::centered(2, 20, 0.2).unwrap();
    let f = random_compact(spec, 5);
    let default = RadiusLadder::default_for(&spec);
    let bounded = RadiusLadder::bounded(&spec, 0.05).unwrap();
    assert!(bounded.guaranteed_loss(&spec) <= 0.05);
    let (md, mb) = (maximal_with(&f, &default), maximal_with(&f, &bounded));
    let loss = default.guaranteed_loss(&spec);
    for k in (0..spec.len()).step_by(7) {
        let slow = maximal_bruteforce(&f, &spec.point_flat(k)).unwrap();
        assert!(slow >= md.values[k] - 1e-14 && slow >= mb.values[k] - 1e-14);
        assert!(mb.values[k] >= 0.95 * slow);
        assert!(md.values[k] >= (1.0 - loss) * slow - 1e-14);
    }
}

#[test]
fn bounded_ladder_rejects_a_loss_outside_the_unit_interval() {
    let spec = GridSpec::centered(1, 32, 0.1).unwrap();
    assert!(RadiusLadder::bounded(&spec, 0.0).is_err());
    assert!(RadiusLadder::bounded(&spec, 1.0).is_err());
    assert_eq!(RadiusLadder::full(&spec).guaranteed_loss(&spec), 0.0);
}

#[test]
fn indicator_maximal_sits_under_the_majorant() {
    let spec = GridSpec::centered_box(1, 512, 8.0).unwrap();
    let rho = 1.0;
    let m = maximal_with(&indicator_weight(rho, 1.0, &spec), &RadiusLadder::full(&spec));
    let x = spec.point(&[256 + 64, 0, 0]);
    // |x| = 2 rho: continuum value 1/3, majorant 1/2
    assert_relative_eq!(m.at(&[256 + 64, 0, 0]), 1.0 / 3.0, max_relative = 0.02);
    assert_eq!(maximal_indicator_majorant(rho, &x, 1), 0.5);
}

#[test]
fn morrey_scan_is_below_the_exhaustive_scan() {
    let spec = GridSpec::centered_box(1, 128, 2.0).unwrap();
    let b = random_weight(2, &spec, 0.15);
    for conv in [MorreyConvention::Avg, MorreyConvention::Raw] {
        let fast = morrey_constant(&b, 2.0, 0.25, conv).unwrap().a;
        let slow = morrey_bruteforce(&b, 2.0, 0.25, conv).unwrap();
        assert!(fast <= slow * (1.0 + 1e-12));
        assert!(fast >= 0.97 * slow, "{conv:?}: {fast} vs {slow}");
    }
}

#[test]
fn indicator_morrey_constant_is_one() {
    let spec = GridSpec::centered_box(1, 256, 4.0).unwrap();
    let b = indicator_weight(1.0, 1.0, &spec);
    let rep = morrey_constant(&b, 2.0, 0.25, MorreyConvention::Avg).unwrap();
    assert_relative_eq!(rep.a, 1.0, max_relative = 0.03);
}

#[test]
fn lifted_power_weight_is_a1_and_dominates() {
    let prm = validate_params(1, 0.5, 2.0, 3.0).unwrap();
    let mut consts = Vec::new();
    for n in [256, 512] {
        let spec = GridSpec::centered_box(1, n, 4.0).unwrap();
        let b = power_weight(0.3, 1.0, 1.0, &spec).unwrap();
        let lifted = a1_lift(&b, prm.p0, prm.p1).unwrap();
        assert!(lifted.values.iter().zip(&b.values).all(|(l, v)| l >= v));
        consts.push(a1_constant(&lifted.abs_pow(prm.p1)).unwrap().constant);
    }
    assert!(consts.iter().all(|c| c.is_finite()));
    assert!((consts[1] / consts[0] - 1.0).abs() <= 0.1, "{consts:?}");
}

#[test]
fn gamma_examples() {
    assert_relative_eq!(choose_gamma(2.0, 4.0), 1.0);
    assert_relative_eq!(choose_gamma(3.0, 3.5), 1.0 / 6.0, max_relative = 1e-14);
    assert_relative_eq!(choose_gamma(2.0, 2.001), 0.0005, max_relative = 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn maximal_is_sublinear_and_homogeneous(s1 in 0u64..500, s2 in 0u64..500, c in 0.0f64..10.0) {
        let spec = GridSpec::centered(1, 64, 0.1).unwrap();
        let f = random_compact(spec, s1);
        let g = random_compact(spec, s2);
        let sum = maximal(&f.zip_with(&g, |a, b| a + b).unwrap());
        let (mf, mg) = (maximal(&f), maximal(&g));
        for k in 0..spec.len() {
            prop_assert!(sum.values[k] <= mf.values[k] + mg.values[k] + 1e-12);
            prop_assert!(mf.values[k] >= f.values[k].abs());
        }
        let scaled = maximal(&f.scaled(c));
        for k in 0..spec.len() {
            prop_assert!((scaled.values[k] - c * mf.values[k]).abs() <= 1e-12 * (1.0 + c));
        }
    }

    #[test]
    fn riesz_is_positive_on_nonnegative_data(seed in 0u64..500, alpha in 0.1f64..1.9) {
        let spec = GridSpec::centered(2, 16, 0.25).unwrap();
        let v = riesz_fft(&random_compact(spec, seed), alpha).unwrap();
        prop_assert!(v.min() >= 0.0);
    }
}
