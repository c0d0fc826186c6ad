//! Stationary covariance, squeezing figures and noise spectra.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::effective::{SteadyState, DIM, S_MINUS, S_PLUS, S_Z};
use crate::error::{Error, Result};
use crate::linalg::{c, condition_number, frobenius, kron, min_real_eigenvalue, unvectorize, vectorize, CMat, I};
use crate::params::EffectiveParams;

/// Condition estimate above which a covariance is marked ill-conditioned.
pub const ILL_CONDITIONED: f64 = 1e12;

/// Zero-time correlation matrix `G[i][j] = ⟨δξ_i δξ_j†⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    pub g0: CMat,
    /// `‖B·G + G·B† − D‖_F / ‖D‖_F`.
    pub relative_residual: f64,
    /// 2-norm condition number of the vectorized system.
    pub condition: f64,
}

impl Covariance {
    pub fn ill_conditioned(&self) -> bool {
        self.condition > ILL_CONDITIONED
    }

    /// Symmetrized real covariance of `(δS_x, δS_y, δS_z)`.
    pub fn spin_block(&self) -> Matrix3<f64> {
        let t = spin_transform();
        let block = &t * &self.g0 * t.adjoint();
        Matrix3::from_fn(|i, j| block[(i, j)].re)
    }
}

/// Rows map the fluctuation vector to `δS_x = (δS₊ + δS₋)/2`,
/// `δS_y = (δS₊ − δS₋)/2i` and `δS_z`.
fn spin_transform() -> CMat {
    let mut t = CMat::zeros(3, DIM);
    t[(0, S_PLUS)] = c(0.5);
    t[(0, S_MINUS)] = c(0.5);
    t[(1, S_PLUS)] = -0.5 * I;
    t[(1, S_MINUS)] = 0.5 * I;
    t[(2, S_Z)] = c(1.0);
    t
}

/// Solves `B·G + G·B† = D` by dense elimination on the vectorized system
/// `(I ⊗ B + conj(B) ⊗ I) vec(G) = vec(D)`.
pub fn solve_lyapunov(b: &CMat, d: &CMat) -> Result<Covariance> {
    let n = b.nrows();
    if b.ncols() != n || d.nrows() != n || d.ncols() != n {
        return Err(Error::Precondition("drift and diffusion must be square and of equal size".into()));
    }
    let min_real = min_real_eigenvalue(b);
    if !(min_real > 0.0) {
        return Err(Error::NonStationary { min_real });
    }
    let id = CMat::identity(n, n);
    let op = kron(&id, b) + kron(&b.map(|z| z.conj()), &id);
    let condition = condition_number(&op);
    let rhs = vectorize(d);
    let sol = op.lu().solve(&rhs).ok_or(Error::Singular("Lyapunov system"))?;
    let g0 = unvectorize(&sol, n);
    let residual = b * &g0 + &g0 * b.adjoint() - d;
    let scale = frobenius(d);
    let relative_residual = if scale > 0.0 { frobenius(&residual) / scale } else { frobenius(&residual) };
    Ok(Covariance { g0, relative_residual, condition })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    /// Minimal symmetrized variance in the plane orthogonal to the mean spin.
    pub var_min: f64,
    /// |⟨S⟩|/2.
    pub spin_half: f64,
    /// ΔS_min = var_min / spin_half.
    pub ds_min: f64,
    /// Angle of the minimal direction in the orthogonal plane, in (−π/2, π/2].
    /// Zero is the direction of ŷ projected onto that plane.
    pub angle: f64,
    pub squeezing_db: f64,
}

impl VarianceReport {
    fn new(var_min: f64, spin_half: f64, angle: f64) -> Self {
        let ds_min = var_min / spin_half;
        VarianceReport { var_min, spin_half, ds_min, angle, squeezing_db: -10.0 * ds_min.log10() }
    }

    pub fn is_squeezed(&self) -> bool {
        self.ds_min < 1.0
    }

    /// Squeezing as a fraction, 1 − ΔS_min.
    pub fn squeezing_fraction(&self) -> f64 {
        1.0 - self.ds_min
    }
}

/// Orthonormal pair spanning the plane orthogonal to `n`; the first vector is
/// ŷ projected onto that plane whenever ŷ is not parallel to `n`.
fn orthogonal_plane(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let y = Vector3::y();
    let seed = if n.dot(&y).abs() < 0.9 { y } else { Vector3::x() };
    let e1 = (seed - n * n.dot(&seed)).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

/// Minimal variance orthogonal to the mean spin and the Wineland figure.
pub fn spin_variance_report(cov: &Covariance, ss: &SteadyState) -> Result<VarianceReport> {
    let spin = ss.spin_vector();
    let length = spin.norm();
    if !(length > 0.0) {
        return Err(Error::VanishingSpin);
    }
    let (e1, e2) = orthogonal_plane(&(spin / length));
    let v = cov.spin_block();
    let m = Matrix2::new(
        e1.dot(&(v * e1)), e1.dot(&(v * e2)),
        e2.dot(&(v * e1)), e2.dot(&(v * e2)),
    );
    let (a, b, d) = (m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)]);
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    let var_min = mean - radius;
    // Eigenvector of the smaller eigenvalue of [[a, b], [b, d]].
    let mut angle = 0.5 * (2.0 * b).atan2(a - d) + 0.5 * PI;
    while angle > 0.5 * PI {
        angle -= PI;
    }
    while angle <= -0.5 * PI {
        angle += PI;
    }
    Ok(VarianceReport::new(var_min, 0.5 * length, angle))
}

fn require_resonant(ep: &EffectiveParams, what: &str) -> Result<()> {
    if ep.delta_tilde != 0.0 || ep.delta_c != 0.0 {
        return Err(Error::Precondition(format!("{what} requires δ̃ = Δc = 0")));
    }
    Ok(())
}

/// Closed-form ⟨δS_y²⟩ at zero field on resonance.
pub fn sy_variance_analytic(ep: &EffectiveParams) -> f64 {
    let EffectiveParams { n, c, gamma0, gamma_p, gamma_p_prime, gamma0_tilde: gt, rho_tilde, .. } = *ep;
    let reduction = 2.0 * c / (1.0 + rho_tilde) * gamma_p * gamma_p * (gamma0 + gamma_p_prime)
        / (gt * (gt * gt + 2.0 * c * gamma_p * gamma_p));
    0.25 * n * (1.0 - reduction)
}

/// Closed-form |⟨S⟩|/2 at zero field on resonance.
pub fn spin_half_analytic(ep: &EffectiveParams) -> f64 {
    ep.n * ep.gamma_p_prime.hypot(ep.gamma_p) / (4.0 * ep.gamma0_tilde)
}

/// Closed-form squeezing report; the minimal direction is ŷ (angle 0).
pub fn variance_analytic(ep: &EffectiveParams) -> Result<VarianceReport> {
    require_resonant(ep, "the closed-form variance")?;
    let spin_half = spin_half_analytic(ep);
    if !(spin_half > 0.0) {
        return Err(Error::VanishingSpin);
    }
    Ok(VarianceReport::new(sy_variance_analytic(ep), spin_half, 0.0))
}

/// Spectral densities of δS_y per unit ω̄ = ω/κ, normalized so that
/// `⟨δS_y²⟩ = (1/2π) ∫ total dω̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub omega_bar: f64,
    /// Incident-field contribution.
    pub s_f: f64,
    /// Atomic-noise contribution.
    pub s_at: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSpectrum {
    pub points: Vec<SpectrumPoint>,
    /// γ₊ = γ̃₀ + 2CΓp²/γ̃₀.
    pub gamma_plus: f64,
}

impl AnalyticSpectrum {
    pub fn full_width(&self) -> f64 {
        2.0 * self.gamma_plus
    }
}

/// Closed-form spectrum point.
///
/// `D(ω̄) = (1 − iω̄)(ρ̃ − iω̄) + 2ρCΓp²/(γ₀γ̃₀)`,
/// `S_f = NρCΓp³/(γ₀γ̃₀²)/|D|²`, `S_at = (Nργ̃₀/2)(1 + ω̄²)/|D|²`.
pub fn spectrum_point(ep: &EffectiveParams, omega_bar: f64) -> SpectrumPoint {
    let EffectiveParams { n, c, rho, rho_tilde, gamma0, gamma_p, gamma0_tilde: gt, .. } = *ep;
    let w = omega_bar;
    let denom = C64::new(1.0, -w) * C64::new(rho_tilde, -w)
        + C64::new(2.0 * rho * c * gamma_p * gamma_p / (gamma0 * gt), 0.0);
    let d2 = denom.norm_sqr();
    let s_f = n * rho * c * gamma_p.powi(3) / (gamma0 * gt * gt) / d2;
    let s_at = 0.5 * n * rho * gt * (1.0 + w * w) / d2;
    SpectrumPoint { omega_bar, s_f, s_at, total: s_f + s_at }
}

pub fn spectrum_analytic(ep: &EffectiveParams, omega_bars: &[f64]) -> Result<AnalyticSpectrum> {
    require_resonant(ep, "the closed-form spectrum")?;
    Ok(AnalyticSpectrum {
        points: omega_bars.iter().map(|&w| spectrum_point(ep, w)).collect(),
        gamma_plus: ep.gamma_plus(),
    })
}

/// `S(ω) = (B − iω)⁻¹ D (B† + iω)⁻¹` per angular frequency ω, so that
/// `G = (1/2π) ∫ S(ω) dω`.
pub fn spectrum_matrix(b: &CMat, d: &CMat, omegas: &[f64]) -> Result<Vec<CMat>> {
    let n = b.nrows();
    let min_real = min_real_eigenvalue(b);
    if !(min_real > 0.0) {
        return Err(Error::NonStationary { min_real });
    }
    let id = CMat::identity(n, n);
    omegas
        .iter()
        .map(|&w| {
            let resolvent = (b - &id * C64::new(0.0, w))
                .try_inverse()
                .ok_or(Error::Singular("spectral resolvent"))?;
            Ok(&resolvent * d * resolvent.adjoint())
        })
        .collect()
}

/// δS_y spectral density per unit ω̄ from the matrix route.
pub fn sy_spectrum_matrix(b: &CMat, d: &CMat, kappa: f64, omega_bars: &[f64]) -> Result<Vec<f64>> {
    let omegas: Vec<f64> = omega_bars.iter().map(|w| w * kappa).collect();
    let t = spin_transform();
    Ok(spectrum_matrix(b, d, &omegas)?
        .into_iter()
        .map(|s| kappa * (t.row(1) * &s * t.row(1).adjoint())[(0, 0)].re)
        .collect())
}

/// `(1/2π) ∫ f(ω̄) dω̄` with an |ω̄| cutoff of `10³·max(1, γ₊/κ)` and a
/// `1/ω̄²` tail correction.
pub fn spectral_integral<F: Fn(f64) -> f64>(f: F, ep: &EffectiveParams) -> f64 {
    let cutoff = 1e3 * (ep.gamma_plus() / ep.kappa).max(1.0);
    let finest = 1e-3 * ep.rho_tilde.min(ep.gamma_plus() / ep.kappa).min(1.0);
    crate::quad::integrate_real_line(f, finest, cutoff, 1e-10) / (2.0 * PI)
}
