use eitsqz::validate::{self, SuiteReport, DEFAULT_SEED, SWEEP_POINTS};

fn check(r: SuiteReport) {
    assert!(r.passed, "{}: worst {:e} > {:e} ({})", r.name, r.worst, r.tolerance, r.detail);
    assert!(r.cases > 0);
}

#[test]
fn master_equivalence() {
    check(validate::master_equivalence(DEFAULT_SEED, SWEEP_POINTS));
}

#[test]
fn master_equivalence_other_seed() {
    check(validate::master_equivalence(1, 40));
}

#[test]
fn eit_alone() {
    check(validate::eit_alone(&[0.1, 1.0, 4.0, 25.0, 1e3]));
}

#[test]
fn covariance_properties() {
    check(validate::covariance_properties(DEFAULT_SEED, SWEEP_POINTS));
}

#[test]
fn n_scaling() {
    check(validate::n_scaling());
}

#[test]
fn gauge_invariance() {
    check(validate::gauge_invariance());
}

#[test]
fn resonance_optimality() {
    check(validate::resonance_optimality());
}

#[test]
fn wiener_khinchin() {
    check(validate::wiener_khinchin());
}

#[test]
fn full_model_oracle() {
    check(validate::full_model_oracle());
}

#[test]
fn run_all_is_ordered_and_deterministic() {
    let a = validate::run_all(DEFAULT_SEED);
    let names: Vec<_> = a.iter().map(|r| r.name).collect();
    assert_eq!(
        names,
        [
            "master-equivalence",
            "eit-alone",
            "covariance-properties",
            "n-scaling",
            "gauge-invariance",
            "resonance-optimality",
            "wiener-khinchin",
            "full-model-oracle"
        ]
    );
    assert_eq!(a, validate::run_all(DEFAULT_SEED));
}
