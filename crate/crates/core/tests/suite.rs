//! The verification harness on small grids.

use rieszkit::verify::families::{gaussian, random_bump};
use rieszkit::verify::{
    run_check, run_suite, CheckName, FamilyConfig, GridConfig, Level, NamedSource, NamedWeight, RhoSweep, SuiteConfig,
    Verdict, WeightClass,
};
use rieszkit::{power_weight, random_weight, validate_params, Field, GridSpec, MorreyConvention};

fn small(d: usize) -> SuiteConfig {
    let mut cfg = if d == 1 { SuiteConfig::default_1d() } else { SuiteConfig::default_2d() };
    cfg.grid = GridConfig { n: if d == 1 { 64 } else { 16 }, half_extent: 4.0, refinements: 1 };
    cfg.families = FamilyConfig {
        random_weight_seeds: vec![1, 2],
        bump_seeds: vec![101, 102],
        gaussian_sigmas: vec![0.4],
        ..FamilyConfig::default()
    };
    cfg.gate = None;
    cfg
}

#[test]
fn empty_check_list_gives_an_empty_clean_report() {
    let mut cfg = small(1);
    cfg.checks.clear();
    let rep = run_suite(&cfg).unwrap();
    assert!(rep.reports.is_empty() && rep.errors.is_empty());
    assert!(rep.is_clean());
}

#[test]
fn small_campaigns_are_finite_and_deterministic() {
    for d in [1, 2] {
        let cfg = small(d);
        let a = run_suite(&cfg).unwrap();
        assert!(a.errors.is_empty(), "{:?}", a.errors);
        assert_eq!(a.count(Verdict::Violation), 0, "d={d}");
        assert!(a.reports.iter().all(|r| r.sup_ratio.is_finite() && r.homogeneity_defect <= 1e-10));
        assert_eq!(a, run_suite(&cfg).unwrap());
    }
}

#[test]
fn zero_weight_yields_zero_ratios() {
    let params = validate_params(1, 0.25, 2.0, 3.0).unwrap();
    let spec = GridSpec::centered_box(1, 64, 4.0).unwrap();
    let weights = vec![NamedWeight { class: WeightClass::File, name: "zero".into(), b: Field::zeros(spec) }];
    let sources = vec![NamedSource { name: "gauss".into(), f: gaussian(0.4, &spec) }];
    let level = Level::new(params, MorreyConvention::Avg, spec, weights, sources).unwrap();
    for check in [CheckName::Theorem1, CheckName::Lemma4, CheckName::Lemma5] {
        let reps = run_check(check, std::slice::from_ref(&level), &RhoSweep::default()).unwrap();
        assert!(reps.iter().all(|r| r.sup_ratio == 0.0 && r.verdict != Verdict::Violation), "{check}");
    }
}

#[test]
fn sup_ratio_is_monotone_under_probe_enlargement() {
    let params = validate_params(1, 0.25, 2.0, 3.0).unwrap().with_q(1.5).unwrap();
    let spec = GridSpec::centered_box(1, 64, 4.0).unwrap();
    let weight = |seed| NamedWeight {
        class: WeightClass::Random,
        name: format!("random({seed})"),
        b: random_weight(seed, &spec, 0.15),
    };
    let sources: Vec<NamedSource> =
        (0..3).map(|s| NamedSource { name: format!("bump({s})"), f: random_bump(200 + s, &spec) }).collect();
    let few = Level::new(params, MorreyConvention::Avg, spec, vec![weight(1)], sources.clone()).unwrap();
    let mut all = vec![weight(1), weight(2), weight(3)];
    all.push(NamedWeight { class: WeightClass::Random, name: "power".into(), b: power_weight(0.2, 1.0, 1.0, &spec).unwrap() });
    let many = Level::new(params, MorreyConvention::Avg, spec, all, sources).unwrap();
    for check in [CheckName::Theorem1, CheckName::Lemma4, CheckName::FeffermanStein, CheckName::A1Lift] {
        let sweep = RhoSweep::default();
        let a = run_check(check, std::slice::from_ref(&few), &sweep).unwrap()[0].sup_ratio;
        let b = run_check(check, std::slice::from_ref(&many), &sweep).unwrap()[0].sup_ratio;
        assert!(b >= a, "{check}: {a} -> {b}");
    }
}

#[test]
fn negative_weights_are_rejected_before_checks_run() {
    let spec = GridSpec::centered_box(1, 64, 4.0).unwrap();
    let mut b = Field::constant(spec, 1.0);
    b.values[5] = -0.5;
    let err = b.check_nonnegative("b").unwrap_err();
    assert!(err.to_string().contains("field b"), "{err}");
}

#[test]
fn check_names_round_trip() {
    for c in CheckName::ALL {
        assert_eq!(CheckName::parse(c.as_str()).unwrap(), c);
        assert_eq!(CheckName::parse(&c.as_str().replace('_', "-").to_uppercase()).unwrap(), c);
    }
    assert!(CheckName::parse("theorem2").is_err());
}
