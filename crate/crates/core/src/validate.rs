//! Self-checks shared by the `validate` command and the test suites.
//!
//! Each suite reports its worst metric against a tolerance so callers can
//! print one line per suite.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::effective::{pairing_defect, pairing_layout, steady_state_with_field, NoiseModel};
use crate::error::Result;
use crate::fullmodel::{compare_effective, full_steady_state, CavityDrive};
use crate::linalg::{frobenius, hermitian_eigenvalues, CMat};
use crate::noise::{
    solve_lyapunov, spectral_integral, spectrum_point, spin_variance_report, sy_spectrum_matrix,
    sy_variance_analytic, Covariance,
};
use crate::params::{derive_effective, realize_raw, realize_raw_with, EffectiveParams, Gauge, OperatingPoint};

pub const DEFAULT_SEED: u64 = 20_061_017;
pub const SWEEP_POINTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    /// Largest observed error metric.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl SuiteReport {
    fn from_metrics(name: &'static str, metrics: &[f64], tolerance: f64, detail: String) -> Self {
        let worst = metrics.iter().cloned().fold(0.0, |a: f64, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
        SuiteReport { name, passed: worst <= tolerance, cases: metrics.len(), worst, tolerance, detail }
    }

    fn failed(name: &'static str, tolerance: f64, err: crate::Error) -> Self {
        SuiteReport { name, passed: false, cases: 0, worst: f64::INFINITY, tolerance, detail: err.to_string() }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(rng.gen_range(lo.log10()..hi.log10()))
}

/// Seeded random operating points: C ∈ [1, 10⁴], ρ ∈ [10⁻⁴, 10⁻²],
/// Γp, Γp′ ∈ [0.1, 100]γ₀, all log-uniform.
pub fn random_points(seed: u64, count: usize) -> Vec<OperatingPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let c = log_uniform(&mut rng, 1.0, 1e4);
            let rho = log_uniform(&mut rng, 1e-4, 1e-2);
            let gp = log_uniform(&mut rng, 0.1, 100.0);
            let gpp = log_uniform(&mut rng, 0.1, 100.0);
            OperatingPoint::new(c, rho, gp, gpp)
        })
        .collect()
}

fn zero_field_covariance(ep: &EffectiveParams) -> Result<(NoiseModel, Covariance)> {
    let model = NoiseModel::zero_field(ep);
    let cov = solve_lyapunov(&model.drift, &model.diffusion)?;
    Ok((model, cov))
}

fn ds_min_matrix(ep: &EffectiveParams) -> Result<f64> {
    let (model, cov) = zero_field_covariance(ep)?;
    Ok(spin_variance_report(&cov, &model.steady)?.ds_min)
}

/// Matrix ⟨δS_y²⟩ against the closed form on a random sweep.
pub fn master_equivalence(seed: u64, count: usize) -> SuiteReport {
    const TOL: f64 = 1e-8;
    let run = || -> Result<Vec<f64>> {
        random_points(seed, count)
            .iter()
            .map(|op| {
                let ep = op.effective()?;
                let (_, cov) = zero_field_covariance(&ep)?;
                Ok(rel(cov.spin_block()[(1, 1)], sy_variance_analytic(&ep)))
            })
            .collect()
    };
    match run() {
        Ok(m) => SuiteReport::from_metrics("master-equivalence", &m, TOL, format!("seed {seed}")),
        Err(e) => SuiteReport::failed("master-equivalence", TOL, e),
    }
}

/// Γp = 0: ⟨δS_y²⟩ = N/4 and ΔS_min = 1 + γ₀/Γp′.
pub fn eit_alone(gamma_p_primes: &[f64]) -> SuiteReport {
    const TOL: f64 = 1e-10;
    let run = || -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for &gpp in gamma_p_primes {
            let ep = OperatingPoint::new(100.0, 1.0 / 2000.0, 0.0, gpp).effective()?;
            let (model, cov) = zero_field_covariance(&ep)?;
            out.push(rel(cov.spin_block()[(1, 1)], 0.25 * ep.n));
            let r = spin_variance_report(&cov, &model.steady)?;
            out.push(rel(r.ds_min, 1.0 + ep.gamma0 / gpp));
        }
        Ok(out)
    };
    match run() {
        Ok(m) => SuiteReport::from_metrics("eit-alone", &m, TOL, "variance N/4, ΔS = 1 + γ₀/Γp′".into()),
        Err(e) => SuiteReport::failed("eit-alone", TOL, e),
    }
}

/// Worst of: Lyapunov residual, adjoint-pairing symmetry, and negative
/// spin-block eigenvalue, each relative to the relevant scale.
pub fn covariance_properties(seed: u64, count: usize) -> SuiteReport {
    const TOL: f64 = 1e-10;
    let check = |model: &NoiseModel, cov: &Covariance, n: f64| -> f64 {
        let defect = pairing_defect(&pairing_layout(&cov.g0)) / frobenius(&cov.g0);
        let block = cov.spin_block().map(|v| C64::new(v, 0.0));
        let block = CMat::from_iterator(3, 3, block.iter().cloned());
        let lowest = hermitian_eigenvalues(&block)[0];
        let negativity = (-lowest / n).max(0.0);
        let _ = model;
        cov.relative_residual.max(defect).max(negativity)
    };
    let run = || -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for op in random_points(seed ^ 0x5eed, count) {
            let ep = op.effective()?;
            let (model, cov) = zero_field_covariance(&ep)?;
            out.push(check(&model, &cov, ep.n));
            // Same point with a modest field, if the linearization stays stable.
            let amp = 0.5 * ep.gamma0 / ep.g_tilde.norm();
            let ss = steady_state_with_field(&ep, C64::new(amp, 0.0))?;
            let model = NoiseModel::new(&ep, ss);
            if model.is_stable() {
                let cov = solve_lyapunov(&model.drift, &model.diffusion)?;
                out.push(check(&model, &cov, ep.n));
            }
        }
        Ok(out)
    };
    match run() {
        Ok(m) => SuiteReport::from_metrics("covariance-properties", &m, TOL, "residual, pairing, PSD".into()),
        Err(e) => SuiteReport::failed("covariance-properties", TOL, e),
    }
}

/// ΔS_min is independent of N at fixed C, ρ, Γp, Γp′.
pub fn n_scaling() -> SuiteReport {
    const TOL: f64 = 1e-9;
    let run = || -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for (gp, gpp) in [(5.5, 25.0), (1.0, 4.0), (0.3, 60.0)] {
            let base = OperatingPoint::new(100.0, 1.0 / 2000.0, gp, gpp);
            let reference = ds_min_matrix(&base.effective()?)?;
            for n in [1e3, 1e5, 1e8] {
                out.push(rel(ds_min_matrix(&base.with_n(n).effective()?)?, reference));
            }
        }
        Ok(out)
    };
    match run() {
        Ok(m) => SuiteReport::from_metrics("n-scaling", &m, TOL, "N ∈ {10³, 10⁵, 10⁸}".into()),
        Err(e) => SuiteReport::failed("n-scaling", TOL, e),
    }
}

/// ΔS_min is unchanged by the optical detuning scale and the phase of Ω₁.
pub fn gauge_invariance() -> SuiteReport {
    const TOL: f64 = 1e-9;
    let run = || -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for (gp, gpp) in [(5.5, 25.0), (1.0, 4.0)] {
            let op = OperatingPoint::new(100.0, 1.0 / 2000.0, gp, gpp);
            let reference = ds_min_matrix(&derive_effective(&realize_raw(&op)?)?.effective)?;
            for gauge in [
                Gauge { detuning_ratio: 200.0, ..Gauge::default() },
                Gauge { omega1_phase: 1.3, ..Gauge::default() },
                Gauge { omega1_phase: -2.4, detuning_ratio: 150.0, ..Gauge::default() },
            ] {
                let ep = derive_effective(&realize_raw_with(&op, &gauge)?)?.effective;
                out.push(rel(ds_min_matrix(&ep)?, reference));
            }
        }
        Ok(out)
    };
    match run() {
        Ok(m) => SuiteReport::from_metrics("gauge-invariance", &m, TOL, "Δ = 100γ/150γ/200γ, Ω₁ phase".into()),
        Err(e) => SuiteReport::failed("gauge-invariance", TOL, e),
    }
}

/// On a 5×5 grid of (δ̃, Δc), ΔS_min is smallest at resonance. The metric is
/// how far any detuned point falls below the resonant value.
pub fn resonance_optimality() -> SuiteReport {
    const TOL: f64 = 1e-12;
    let run = || -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for (gp, gpp) in [(5.5, 25.0), (1.0, 4.0)] {
            let ep = OperatingPoint::new(100.0, 1.0 / 2000.0, gp, gpp).effective()?;
            let reference = ds_min_matrix(&ep)?;
            let steps = [-0.5, -0.25, 0.0, 0.25, 0.5];
            for &a in &steps {
                for &b in &steps {
                    let detuned = ep.with_detunings(a * ep.gamma0_tilde, b * ep.kappa);
                    let v = ds_min_matrix(&detuned)?;
                    out.push(((reference - v) / reference).max(0.0));
                }
            }
        }
        Ok(out)
    };
    match run() {
        Ok(m) => SuiteReport::from_metrics("resonance-optimality", &m, TOL, "δ̃ ∈ ±γ̃₀/2, Δc ∈ ±κ/2".into()),
        Err(e) => SuiteReport::failed("resonance-optimality", TOL, e),
    }
}

/// Spectrum integral against the covariance, and matrix against closed-form spectra.
pub fn wiener_khinchin() -> SuiteReport {
    const TOL: f64 = 1e-3;
    let run = || -> Result<Vec<f64>> {
        let mut out = Vec::new();
        let omegas = [0.0, 1e-3, 0.05, 0.3, 1.0, 4.0, 100.0];
        for (gp, gpp) in [(5.5, 25.0), (1.0, 4.0), (0.3, 60.0)] {
            let ep = OperatingPoint::new(100.0, 1.0 / 2000.0, gp, gpp).effective()?;
            let (model, cov) = zero_field_covariance(&ep)?;
            let integral = spectral_integral(|w| spectrum_point(&ep, w).total, &ep);
            out.push(rel(integral, cov.spin_block()[(1, 1)]));
            let m = sy_spectrum_matrix(&model.drift, &model.diffusion, ep.kappa, &omegas)?;
            // Pointwise agreement must be far tighter than the integral tolerance.
            for (w, v) in omegas.iter().zip(m) {
                out.push(rel(v, spectrum_point(&ep, *w).total) * 1e5);
            }
        }
        Ok(out)
    };
    match run() {
        Ok(m) => SuiteReport::from_metrics(
            "wiener-khinchin",
            &m,
            TOL,
            "integral to 1e-3, pointwise spectra to 1e-8".into(),
        ),
        Err(e) => SuiteReport::failed("wiener-khinchin", TOL, e),
    }
}

/// Full four-level mean field against the effective model.
pub fn full_model_oracle() -> SuiteReport {
    const TOL: f64 = 0.05;
    let run = || -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for (gp, gpp) in [(5.5, 25.0), (2.0, 25.0), (1.0, 4.0)] {
            let p = realize_raw(&OperatingPoint::new(100.0, 1.0 / 2000.0, gp, gpp))?;
            let cmp = compare_effective(&p)?;
            out.push(cmp.max_discrepancy());
            // Excited populations against 10⁻³, rescaled onto the same tolerance.
            out.push(cmp.excited_fraction / 1e-3 * TOL);
        }
        let p = realize_raw(&OperatingPoint::new(100.0, 1.0 / 2000.0, 0.0, 100.0))?;
        let dark = full_steady_state(&p, CavityDrive::Input)?;
        out.push(rel(dark.pr.re / p.n, -0.5) / 0.02 * TOL);
        Ok(out)
    };
    match run() {
        Ok(m) => SuiteReport::from_metrics(
            "full-model-oracle",
            &m,
            TOL,
            "⟨Pr⟩, ⟨Sz⟩ within 5%; Π₃, Π₄ ≤ 10⁻³N; dark state within 2%".into(),
        ),
        Err(e) => SuiteReport::failed("full-model-oracle", TOL, e),
    }
}

/// Every suite, in a fixed order.
pub fn run_all(seed: u64) -> Vec<SuiteReport> {
    vec![
        master_equivalence(seed, SWEEP_POINTS),
        eit_alone(&[0.5, 4.0, 25.0, 300.0]),
        covariance_properties(seed, SWEEP_POINTS),
        n_scaling(),
        gauge_invariance(),
        resonance_optimality(),
        wiener_khinchin(),
        full_model_oracle(),
    ]
}
