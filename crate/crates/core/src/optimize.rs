//! Pump-rate optimization, scaling with cooperativity, and field degradation.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::effective::{steady_state_with_field, NoiseModel};
use crate::error::{Error, Result};
use crate::noise::{solve_lyapunov, spin_variance_report, sy_variance_analytic, variance_analytic};
use crate::params::{EffectiveParams, Gauge, OperatingPoint, SCALE_SEPARATION};
use crate::simplex::{minimize, SimplexOptions};

/// Search box for both pump rates, in γ₀ units.
pub const PUMP_RANGE: (f64, f64) = (1e-2, 1e3);
pub const GRID_SIZE: usize = 41;

/// Large-C prefactor of ΔS*_min·C^{1/3} quoted for ρ = 1/2000. A reference
/// value for comparison, not an input to any optimization.
pub const REFERENCE_LAMBDA: f64 = 1.74;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumResult {
    pub c: f64,
    pub rho: f64,
    pub gamma_p_star: f64,
    pub gamma_p_prime_star: f64,
    pub ds_min_star: f64,
    pub squeezing_db: f64,
    pub evaluations: usize,
    /// The optimum touches an edge of the search box.
    pub at_boundary: bool,
}

impl OptimumResult {
    pub fn squeezing_fraction(&self) -> f64 {
        1.0 - self.ds_min_star
    }
}

/// ΔS_min from the closed form at a canonical operating point.
pub fn ds_min_at(c: f64, rho: f64, gamma_p: f64, gamma_p_prime: f64) -> Result<f64> {
    let ep = OperatingPoint::new(c, rho, gamma_p, gamma_p_prime).effective()?;
    Ok(variance_analytic(&ep)?.ds_min)
}

fn pump_bounds() -> (f64, f64, f64) {
    // Adiabaticity guard on the canonical gauge: Γp ≤ 0.1γ and Γp′ ≤ 0.1γ′.
    let gauge = Gauge::default();
    let lo = PUMP_RANGE.0;
    let hi_p = PUMP_RANGE.1.min(SCALE_SEPARATION * gauge.gamma_ratio);
    let hi_pp = PUMP_RANGE.1.min(SCALE_SEPARATION * gauge.gamma_ratio * gauge.gamma_prime_ratio);
    (lo, hi_p, hi_pp)
}

/// Minimizes ΔS_min over (Γp, Γp′) by a 41×41 log grid followed by simplex
/// refinement in log coordinates.
pub fn optimize_pumps(c: f64, rho: f64) -> Result<OptimumResult> {
    if !(c >= 1.0) {
        return Err(Error::param("C", format!("must be ≥ 1, got {c}")));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::param("rho", format!("must lie in (0, 1), got {rho}")));
    }
    let (lo, hi_p, hi_pp) = pump_bounds();
    let (llo, lhi_p, lhi_pp) = (lo.log10(), hi_p.log10(), hi_pp.log10());
    let objective = |x: &[f64]| -> f64 {
        if x[0] < llo || x[0] > lhi_p || x[1] < llo || x[1] > lhi_pp {
            return f64::INFINITY;
        }
        ds_min_at(c, rho, 10f64.powf(x[0]), 10f64.powf(x[1])).unwrap_or(f64::INFINITY)
    };

    let mut best = (f64::INFINITY, [llo, llo]);
    let mut evaluations = 0;
    for i in 0..GRID_SIZE {
        for j in 0..GRID_SIZE {
            let t = |k: usize, hi: f64| llo + (hi - llo) * k as f64 / (GRID_SIZE - 1) as f64;
            let x = [t(i, lhi_p), t(j, lhi_pp)];
            let v = objective(&x);
            evaluations += 1;
            if v < best.0 {
                best = (v, x);
            }
        }
    }

    let step = (lhi_p - llo) / (GRID_SIZE - 1) as f64;
    let refined = minimize(
        objective,
        &best.1,
        &SimplexOptions { step: 0.5 * step, rel_tol: 1e-12, x_tol: 1e-9, max_evaluations: 4000 },
    );
    evaluations += refined.evaluations;
    let (value, x) = if refined.value <= best.0 { (refined.value, [refined.x[0], refined.x[1]]) } else { best };
    if !value.is_finite() {
        return Err(Error::NoConvergence { iterations: evaluations, residual: value });
    }

    let edge = 1e-3;
    let at_boundary = (x[0] - llo).abs() < edge
        || (x[0] - lhi_p).abs() < edge
        || (x[1] - llo).abs() < edge
        || (x[1] - lhi_pp).abs() < edge;
    Ok(OptimumResult {
        c,
        rho,
        gamma_p_star: 10f64.powf(x[0]),
        gamma_p_prime_star: 10f64.powf(x[1]),
        ds_min_star: value,
        squeezing_db: -10.0 * value.log10(),
        evaluations,
        at_boundary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticOptimum {
    pub gamma_p_star: f64,
    pub gamma_p_prime_star: f64,
    /// `REFERENCE_LAMBDA / C^{1/3}`; only meaningful near ρ = 1/2000.
    pub ds_min_star: f64,
    /// Set when C < 10 or ρ > 0.01, where the large-C expansion is doubtful.
    pub outside_regime: bool,
}

/// Large-C optimum: Γp* = √(3/2)γ₀/√(ρC), Γp′* = √(3/2)γ₀/√(ρC^{1/3}).
pub fn asymptotic_pumps(c: f64, rho: f64) -> AsymptoticOptimum {
    let k = 1.5f64.sqrt();
    let c13 = c.cbrt();
    AsymptoticOptimum {
        gamma_p_star: k / (rho * c).sqrt(),
        gamma_p_prime_star: k / (rho * c13).sqrt(),
        ds_min_star: REFERENCE_LAMBDA / c13,
        outside_regime: c < 10.0 || rho > 0.01,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub rows: Vec<OptimumResult>,
    /// Least-squares slope of log ΔS* against log C over all rows.
    pub slope: f64,
    /// `10^intercept` of the same fit.
    pub prefactor: f64,
    /// Mean of ΔS*·C^{1/3} over rows at or above the geometric middle of the C range.
    pub large_c_prefactor: f64,
    pub boundary_warnings: usize,
}

/// Ordinary least squares `y = a + b x`, returning `(a, b)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let b = sxy / sxx;
    (my - b * mx, b)
}

pub fn scaling_study(c_values: &[f64], rho: f64) -> Result<ScalingStudy> {
    let (cmin, cmax) = c_values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if c_values.len() < 2 || !(cmax / cmin >= 100.0) {
        return Err(Error::param("C_values", "must span at least two decades"));
    }
    let rows = c_values
        .par_iter()
        .map(|&c| optimize_pumps(c, rho))
        .collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = rows.iter().map(|r| r.c.log10()).collect();
    let ly: Vec<f64> = rows.iter().map(|r| r.ds_min_star.log10()).collect();
    let (intercept, slope) = linear_fit(&lx, &ly);
    let middle = (cmin * cmax).sqrt();
    let upper: Vec<f64> = rows
        .iter()
        .filter(|r| r.c >= middle * (1.0 - 1e-12))
        .map(|r| r.ds_min_star * r.c.cbrt())
        .collect();
    Ok(ScalingStudy {
        slope,
        prefactor: 10f64.powf(intercept),
        large_c_prefactor: upper.iter().sum::<f64>() / upper.len() as f64,
        boundary_warnings: rows.iter().filter(|r| r.at_boundary).count(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldLimit {
    /// |g̃⟨A₂⟩| in γ₀ units at which γ₊²⟨δS_y²⟩ = 4(g̃⟨A₂⟩)²⟨δS_z²⟩.
    pub amplitude: f64,
    pub gamma_plus: f64,
    pub var_sy: f64,
    pub var_sz: f64,
}

impl FieldLimit {
    /// Ratio of the two sides of the degradation condition at amplitude `a`
    /// (in γ₀ units): `4(aγ₀)²⟨δS_z²⟩ / (γ₊²⟨δS_y²⟩)`.
    pub fn condition_ratio(&self, a: f64, gamma0: f64) -> f64 {
        4.0 * (a * gamma0).powi(2) * self.var_sz / (self.gamma_plus.powi(2) * self.var_sy)
    }
}

/// Field amplitude beyond which the zero-field squeezing degrades, with
/// ⟨δS_y²⟩ from the closed form and ⟨δS_z²⟩ from the zero-field covariance.
pub fn field_limit(ep: &EffectiveParams) -> Result<FieldLimit> {
    variance_analytic(ep)?;
    let model = NoiseModel::zero_field(ep);
    let cov = solve_lyapunov(&model.drift, &model.diffusion)?;
    let var_sz = cov.spin_block()[(2, 2)];
    if !(var_sz > 0.0) {
        return Err(Error::Precondition("⟨δS_z²⟩ vanishes".into()));
    }
    let var_sy = sy_variance_analytic(ep);
    let gamma_plus = ep.gamma_plus();
    let amplitude = gamma_plus * (var_sy / var_sz).sqrt() / 2.0 / ep.gamma0;
    Ok(FieldLimit { amplitude, gamma_plus, var_sy, var_sz })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldScanPoint {
    /// |g̃⟨A₂⟩| in γ₀ units.
    pub amplitude: f64,
    /// NaN when the linearization is unstable.
    pub ds_min: f64,
    pub var_min: f64,
    pub spin_half: f64,
    pub angle: f64,
    pub stable: bool,
    pub min_real_eigenvalue: f64,
}

fn scan_point(ep: &EffectiveParams, amplitude: f64) -> Result<FieldScanPoint> {
    let g = ep.g_tilde.norm();
    let a2 = if amplitude == 0.0 {
        C64::new(0.0, 0.0)
    } else if g > 0.0 {
        C64::new(amplitude * ep.gamma0 / g, 0.0)
    } else {
        return Err(Error::Precondition("field scan requires g̃ ≠ 0".into()));
    };
    let ss = steady_state_with_field(ep, a2)?;
    let model = NoiseModel::new(ep, ss);
    let min_real = model.min_real_eigenvalue();
    let unstable = FieldScanPoint {
        amplitude,
        ds_min: f64::NAN,
        var_min: f64::NAN,
        spin_half: 0.5 * ss.spin_length(),
        angle: f64::NAN,
        stable: false,
        min_real_eigenvalue: min_real,
    };
    let cov = match solve_lyapunov(&model.drift, &model.diffusion) {
        Ok(cov) => cov,
        Err(Error::NonStationary { .. }) => return Ok(unstable),
        Err(e) => return Err(e),
    };
    let r = spin_variance_report(&cov, &ss)?;
    Ok(FieldScanPoint {
        amplitude,
        ds_min: r.ds_min,
        var_min: r.var_min,
        spin_half: r.spin_half,
        angle: r.angle,
        stable: true,
        min_real_eigenvalue: min_real,
    })
}

/// ΔS_min against the intracavity field amplitude |g̃⟨A₂⟩|/γ₀, with ⟨A₂⟩
/// real and positive. Unstable points are flagged rather than fatal.
pub fn field_scan(ep: &EffectiveParams, amplitudes: &[f64]) -> Result<Vec<FieldScanPoint>> {
    if let Some(a) = amplitudes.iter().find(|a| !(**a >= 0.0)) {
        return Err(Error::param("amplitude", format!("must be non-negative, got {a}")));
    }
    amplitudes.par_iter().map(|&a| scan_point(ep, a)).collect()
}
