//! Steady states of the effective ground-state model and the linearized
//! drift/diffusion pair for the fluctuation vector
//! `[δA₂, δA₂†, δS₊, δS₋, δS_z]`.
//!
//! Second moments are stored as `M[i][j] = ⟨x_i x_j†⟩`, so both the diffusion
//! and the covariance are Hermitian and satisfy `B·G + G·B† = D`. The
//! `⟨x_i x_j⟩` layout is available through [`pairing_layout`].

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, min_real_eigenvalue, CMat, I};
use crate::params::EffectiveParams;

pub const DIM: usize = 5;
pub const A: usize = 0;
pub const A_DAG: usize = 1;
pub const S_PLUS: usize = 2;
pub const S_MINUS: usize = 3;
pub const S_Z: usize = 4;

/// Index of the adjoint of each basis element.
pub const fn adjoint_index(i: usize) -> usize {
    match i {
        A => A_DAG,
        A_DAG => A,
        S_PLUS => S_MINUS,
        S_MINUS => S_PLUS,
        other => other,
    }
}

/// Converts a `⟨x_i x_j†⟩` matrix into the `⟨x_i x_j⟩` layout (and back: the
/// map is an involution).
pub fn pairing_layout(m: &CMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, adjoint_index(j))])
}

/// Largest violation of `M[i][j] = conj(M[adj j][adj i])` in the `⟨x_i x_j⟩` layout.
pub fn pairing_defect(pairing: &CMat) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..pairing.nrows() {
        for j in 0..pairing.ncols() {
            let other = pairing[(adjoint_index(j), adjoint_index(i))].conj();
            worst = worst.max((pairing[(i, j)] - other).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub s_plus: C64,
    pub s_minus: C64,
    pub s_z: f64,
    pub a2: C64,
}

impl SteadyState {
    /// Mean spin `(⟨S_x⟩, ⟨S_y⟩, ⟨S_z⟩)` with `S₊ = S_x + iS_y`.
    pub fn spin_vector(&self) -> Vector3<f64> {
        Vector3::new(self.s_plus.re, self.s_plus.im, self.s_z)
    }

    pub fn spin_length(&self) -> f64 {
        self.spin_vector().norm()
    }
}

/// Steady state at zero intracavity mean field.
pub fn steady_state_zero_field(ep: &EffectiveParams) -> SteadyState {
    let s_z = 0.5 * ep.lambda_diff / ep.gamma0_tilde;
    let s_plus = C64::new(ep.lambda12_tilde, 0.0) / C64::new(ep.gamma0_tilde, -ep.delta_tilde);
    SteadyState { s_plus, s_minus: s_plus.conj(), s_z, a2: C64::new(0.0, 0.0) }
}

/// Steady state of the atomic means for a fixed intracavity amplitude.
///
/// Solves, for `(⟨S₊⟩, ⟨S₋⟩, ⟨S_z⟩)`,
/// `0 = −(γ̃₀ − iδ̃)S₊ + Λ̃₁₂ + 2i g̃* A S_z`, its conjugate, and
/// `0 = −γ̃₀ S_z + (Λ̃₂ − Λ̃₁)/2 + i(g̃ A* S₊ − g̃* A S₋)`.
pub fn steady_state_with_field(ep: &EffectiveParams, a2_mean: C64) -> Result<SteadyState> {
    let g = ep.g_tilde;
    let gt = ep.gamma0_tilde;
    let m = Matrix3::new(
        -C64::new(gt, -ep.delta_tilde), c(0.0), 2.0 * I * g.conj() * a2_mean,
        c(0.0), -C64::new(gt, ep.delta_tilde), -2.0 * I * g * a2_mean.conj(),
        I * g * a2_mean.conj(), -I * g.conj() * a2_mean, c(-gt),
    );
    let rhs = -Vector3::new(c(ep.lambda12_tilde), c(ep.lambda12_tilde), c(0.5 * ep.lambda_diff));
    let sol = m.lu().solve(&rhs).ok_or(Error::Singular("field steady state"))?;
    if sol.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Singular("field steady state"));
    }
    let s_plus = sol[0];
    Ok(SteadyState { s_plus, s_minus: s_plus.conj(), s_z: sol[2].re, a2: a2_mean })
}

/// Linearized evolution matrix `B` with `d δξ/dt = −B δξ + F`.
pub fn drift_matrix(ep: &EffectiveParams, ss: &SteadyState) -> CMat {
    let g = ep.g_tilde;
    let gs = g.conj();
    let a = ss.a2;
    let gt = ep.gamma0_tilde;
    let mut b = CMat::zeros(DIM, DIM);
    b[(A, A)] = C64::new(ep.kappa, ep.delta_c);
    b[(A, S_PLUS)] = -I * g / ep.tau;
    b[(A_DAG, A_DAG)] = C64::new(ep.kappa, -ep.delta_c);
    b[(A_DAG, S_MINUS)] = I * gs / ep.tau;
    b[(S_PLUS, A)] = -2.0 * I * gs * ss.s_z;
    b[(S_PLUS, S_PLUS)] = C64::new(gt, -ep.delta_tilde);
    b[(S_PLUS, S_Z)] = -2.0 * I * gs * a;
    b[(S_MINUS, A_DAG)] = 2.0 * I * g * ss.s_z;
    b[(S_MINUS, S_MINUS)] = C64::new(gt, ep.delta_tilde);
    b[(S_MINUS, S_Z)] = 2.0 * I * g * a.conj();
    b[(S_Z, A)] = I * gs * ss.s_minus;
    b[(S_Z, A_DAG)] = -I * g * ss.s_plus;
    b[(S_Z, S_PLUS)] = -I * g * a.conj();
    b[(S_Z, S_MINUS)] = I * gs * a;
    b[(S_Z, S_Z)] = c(gt);
    b
}

/// Which z–z entry the atomic diffusion block uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DiffusionForm {
    /// `γ̃₀/2 − Γp²/2γ̃₀`, the value the generalized Einstein relations give.
    #[default]
    Einstein,
    /// `γ̃₀/2 − Γp′²/2γ̃₀` as typeset in the original appendix. Produces a
    /// covariance that is not positive semidefinite; kept for comparison.
    AsPrinted,
}

/// Diffusion matrix with the Einstein-relation atomic block.
pub fn diffusion_matrix(ep: &EffectiveParams, ss: &SteadyState) -> CMat {
    diffusion_matrix_with(ep, ss, DiffusionForm::default())
}

/// Diffusion matrix `⟨F_i F_j†⟩`.
///
/// The atomic block is the zero-field, resonant one and is reused unchanged for
/// nonzero field or detunings. The field block holds the coherent-input entry
/// `⟨F_A F_A†⟩ = 2κ/τ`.
pub fn diffusion_matrix_with(ep: &EffectiveParams, _ss: &SteadyState, form: DiffusionForm) -> CMat {
    let n = ep.n;
    let gt = ep.gamma0_tilde;
    let gp = ep.gamma_p;
    let gpp = ep.gamma_p_prime;
    let coh = gpp * gpp / (2.0 * gt);
    let zz = match form {
        DiffusionForm::Einstein => 0.5 * gt - gp * gp / (2.0 * gt),
        DiffusionForm::AsPrinted => 0.5 * gt - coh,
    };
    let pz = (gt + gp) * gpp / (2.0 * gt);
    let mz = (gp - gt) * gpp / (2.0 * gt);
    let atomic = [
        [gt + gp - coh, -coh, pz],
        [-coh, gt - gp - coh, mz],
        [pz, mz, zz],
    ];
    let mut d = CMat::zeros(DIM, DIM);
    d[(A, A)] = c(2.0 * ep.kappa / ep.tau);
    for (i, row) in atomic.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            d[(S_PLUS + i, S_PLUS + j)] = c(n * v);
        }
    }
    d
}

/// Drift and diffusion of the linearized fluctuations around one steady state.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub drift: CMat,
    pub diffusion: CMat,
    pub steady: SteadyState,
}

impl NoiseModel {
    pub fn new(ep: &EffectiveParams, ss: SteadyState) -> Self {
        Self::with_form(ep, ss, DiffusionForm::default())
    }

    pub fn with_form(ep: &EffectiveParams, ss: SteadyState, form: DiffusionForm) -> Self {
        NoiseModel {
            drift: drift_matrix(ep, &ss),
            diffusion: diffusion_matrix_with(ep, &ss, form),
            steady: ss,
        }
    }

    /// Zero-field model of `ep`.
    pub fn zero_field(ep: &EffectiveParams) -> Self {
        Self::new(ep, steady_state_zero_field(ep))
    }

    pub fn min_real_eigenvalue(&self) -> f64 {
        min_real_eigenvalue(&self.drift)
    }

    pub fn is_stable(&self) -> bool {
        self.min_real_eigenvalue() > 0.0
    }
}
