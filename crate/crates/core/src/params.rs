//! Physical constants of the four-level scheme and the derived constants of the
//! effective two-level ground-state model.
//!
//! The canonical unit system sets γ₀ = 1: every rate below is a multiple of the
//! ground-state decay, matching the axes used for pump-rate sweeps.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold used for every "much smaller than" condition in [`ValidityReport`].
pub const SCALE_SEPARATION: f64 = 0.1;

/// Raw constants of the full double-Λ system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Atom number.
    pub n: f64,
    pub gamma0: f64,
    /// Dipole decay of P13, P23.
    pub gamma: f64,
    /// Dipole decay of P14, P24.
    pub gamma_prime: f64,
    pub kappa: f64,
    pub kappa_prime: f64,
    pub tau: f64,
    pub tau_prime: f64,
    pub g: f64,
    pub g_prime: f64,
    /// Classical Rabi frequency Ω₁ = g·A₁.
    pub omega1: C64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta_c: f64,
    pub delta_c_prime: f64,
    /// Empty-cavity intracavity amplitude of the EIT field Θ.
    pub theta_drive: C64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Mean amplitude of the field driving the quantum cavity mode.
    pub a2_in: C64,
}

impl SystemParams {
    /// Mean optical detuning Δ = (Δ₁ + Δ₂)/2.
    pub fn mean_detuning(&self) -> f64 {
        0.5 * (self.delta1 + self.delta2)
    }

    /// Two-photon detuning δ = Δ₁ − Δ₂.
    pub fn two_photon_detuning(&self) -> f64 {
        self.delta1 - self.delta2
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 1.0) {
            return Err(Error::param("n", format!("atom number must be ≥ 1, got {}", self.n)));
        }
        let positive = [
            ("gamma0", self.gamma0),
            ("gamma", self.gamma),
            ("gamma_prime", self.gamma_prime),
            ("kappa", self.kappa),
            ("kappa_prime", self.kappa_prime),
            ("tau", self.tau),
            ("tau_prime", self.tau_prime),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be strictly positive, got {v}")));
            }
        }
        for (name, v) in [("lambda1", self.lambda1), ("lambda2", self.lambda2)] {
            if !(v >= 0.0) {
                return Err(Error::param(name, format!("repopulation rate must be ≥ 0, got {v}")));
            }
        }
        if self.mean_detuning() == 0.0 {
            return Err(Error::param(
                "delta1/delta2",
                "mean detuning Δ = 0; the Raman field must be far off resonance",
            ));
        }
        Ok(())
    }
}

/// Constants of the effective ground-state model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub n: f64,
    pub gamma0: f64,
    /// γ̃₀ = γ₀ + Γp + Γp′.
    pub gamma0_tilde: f64,
    /// Raman pump rate Γp = γ|Ω₁|²/Δ².
    pub gamma_p: f64,
    /// EIT pump rate Γp′ = 2g′²|Θ|²/γ′.
    pub gamma_p_prime: f64,
    /// Cooperativity g²N/(2κτγ).
    pub c: f64,
    /// γ₀/κ.
    pub rho: f64,
    /// γ̃₀/κ.
    pub rho_tilde: f64,
    /// g̃ = gΩ₁/Δ.
    pub g_tilde: C64,
    /// Light-shift corrected two-photon detuning δ̃.
    pub delta_tilde: f64,
    /// Coherence in-term Λ̃₁₂ = −NΓp′/2.
    pub lambda12_tilde: f64,
    /// Population in-term Λ̃₂ − Λ̃₁.
    pub lambda_diff: f64,
    pub kappa: f64,
    pub tau: f64,
    pub delta_c: f64,
}

/// A point of the effective model given directly by its dimensionless figures
/// of merit, the way pump-rate sweeps are specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub c: f64,
    pub rho: f64,
    pub gamma0: f64,
    pub gamma_p: f64,
    pub gamma_p_prime: f64,
    pub n: f64,
}

impl OperatingPoint {
    /// Point in canonical units (γ₀ = 1) with N = 10⁶.
    pub fn new(c: f64, rho: f64, gamma_p: f64, gamma_p_prime: f64) -> Self {
        OperatingPoint { c, rho, gamma0: 1.0, gamma_p, gamma_p_prime, n: 1e6 }
    }

    pub fn with_n(self, n: f64) -> Self {
        OperatingPoint { n, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c", self.c), ("rho", self.rho), ("gamma0", self.gamma0)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be strictly positive, got {v}")));
            }
        }
        for (name, v) in [("gamma_p", self.gamma_p), ("gamma_p_prime", self.gamma_p_prime)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be non-negative, got {v}")));
            }
        }
        if !(self.n >= 1.0) {
            return Err(Error::param("n", format!("atom number must be ≥ 1, got {}", self.n)));
        }
        Ok(())
    }

    /// Effective constants on resonance (δ̃ = Δc = 0) with τ = 1 and real g̃.
    pub fn effective(&self) -> Result<EffectiveParams> {
        self.validate()?;
        let kappa = self.gamma0 / self.rho;
        let tau = 1.0;
        let gamma0_tilde = self.gamma0 + self.gamma_p + self.gamma_p_prime;
        // g̃² = g²Γp/γ and C = g²N/(2κτγ), hence g̃² = 2CΓpκτ/N.
        let g_tilde = (2.0 * self.c * self.gamma_p * kappa * tau / self.n).sqrt();
        Ok(EffectiveParams {
            n: self.n,
            gamma0: self.gamma0,
            gamma0_tilde,
            gamma_p: self.gamma_p,
            gamma_p_prime: self.gamma_p_prime,
            c: self.c,
            rho: self.rho,
            rho_tilde: self.rho * gamma0_tilde / self.gamma0,
            g_tilde: C64::new(g_tilde, 0.0),
            delta_tilde: 0.0,
            lambda12_tilde: -0.5 * self.n * self.gamma_p_prime,
            lambda_diff: self.n * self.gamma_p,
            kappa,
            tau,
            delta_c: 0.0,
        })
    }
}

impl EffectiveParams {
    pub fn with_detunings(self, delta_tilde: f64, delta_c: f64) -> Self {
        EffectiveParams { delta_tilde, delta_c, ..self }
    }

    pub fn with_n(self, n: f64) -> Self {
        let scale = self.n / n;
        EffectiveParams {
            n,
            g_tilde: self.g_tilde * scale.sqrt(),
            lambda12_tilde: self.lambda12_tilde / scale,
            lambda_diff: self.lambda_diff / scale,
            ..self
        }
    }

    /// Width γ₊ = γ̃₀ + 2CΓp²/γ̃₀ of the minimal-component relaxation.
    pub fn gamma_plus(&self) -> f64 {
        self.gamma0_tilde + 2.0 * self.c * self.gamma_p * self.gamma_p / self.gamma0_tilde
    }

    pub fn operating_point(&self) -> OperatingPoint {
        OperatingPoint {
            c: self.c,
            rho: self.rho,
            gamma0: self.gamma0,
            gamma_p: self.gamma_p,
            gamma_p_prime: self.gamma_p_prime,
            n: self.n,
        }
    }
}

/// One adiabaticity or consistency condition and whether it holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityCheck {
    pub name: &'static str,
    pub ratio: f64,
    pub limit: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidityReport {
    pub checks: Vec<ValidityCheck>,
}

impl ValidityReport {
    fn push(&mut self, name: &'static str, ratio: f64, limit: f64) {
        self.checks.push(ValidityCheck { name, ratio, limit, ok: ratio <= limit });
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn violations(&self) -> impl Iterator<Item = &ValidityCheck> {
        self.checks.iter().filter(|c| !c.ok)
    }

    pub fn flags(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c.name == name && !c.ok)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    pub effective: EffectiveParams,
    pub validity: ValidityReport,
}

/// Reduces the full four-level constants to the effective ground-state model.
pub fn derive_effective(p: &SystemParams) -> Result<Derivation> {
    p.validate()?;
    let delta = p.mean_detuning();
    let om2 = p.omega1.norm_sqr();
    let gamma_p = p.gamma * om2 / (delta * delta);
    let gamma_p_prime = 2.0 * p.g_prime * p.g_prime * p.theta_drive.norm_sqr() / p.gamma_prime;
    let gamma0_tilde = p.gamma0 + gamma_p + gamma_p_prime;
    let rho = p.gamma0 / p.kappa;

    let effective = EffectiveParams {
        n: p.n,
        gamma0: p.gamma0,
        gamma0_tilde,
        gamma_p,
        gamma_p_prime,
        c: p.g * p.g * p.n / (2.0 * p.kappa * p.tau * p.gamma),
        rho,
        rho_tilde: rho * gamma0_tilde / p.gamma0,
        g_tilde: p.omega1 * (p.g / delta),
        delta_tilde: p.two_photon_detuning() + om2 / delta,
        lambda12_tilde: -0.5 * p.n * gamma_p_prime,
        lambda_diff: p.lambda2 - p.lambda1 + p.n * gamma_p,
        kappa: p.kappa,
        tau: p.tau,
        delta_c: p.delta_c,
    };

    let mut validity = ValidityReport::default();
    validity.push("gamma/|Delta|", p.gamma / delta.abs(), SCALE_SEPARATION);
    validity.push("|delta|/|Delta|", p.two_photon_detuning().abs() / delta.abs(), SCALE_SEPARATION);
    validity.push("Gamma_p/gamma", gamma_p / p.gamma, SCALE_SEPARATION);
    validity.push("Gamma_p'/gamma'", gamma_p_prime / p.gamma_prime, SCALE_SEPARATION);
    validity.push("gamma0~/kappa", gamma0_tilde / p.kappa, SCALE_SEPARATION);
    validity.push("gamma0/gamma", p.gamma0 / p.gamma, SCALE_SEPARATION);
    validity.push("gamma0/gamma'", p.gamma0 / p.gamma_prime, SCALE_SEPARATION);
    let scale = p.n * p.gamma0;
    validity.push("|Lambda1-Lambda2|/(N gamma0)", (p.lambda1 - p.lambda2).abs() / scale, 1e-9);
    validity.push(
        "|Lambda1+Lambda2-N gamma0|/(N gamma0)",
        (p.lambda1 + p.lambda2 - scale).abs() / scale,
        1e-9,
    );

    Ok(Derivation { effective, validity })
}

/// Gauge used to turn an [`OperatingPoint`] into concrete raw constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gauge {
    pub tau: f64,
    /// γ/γ₀.
    pub gamma_ratio: f64,
    /// Δ/γ.
    pub detuning_ratio: f64,
    /// γ′/γ.
    pub gamma_prime_ratio: f64,
    /// κ′/γ′; large values keep the EIT cavity in the bad-cavity limit.
    pub kappa_prime_ratio: f64,
    /// Target δ̃ after the light shift.
    pub delta_tilde: f64,
    pub delta_c: f64,
    /// Phase of Ω₁.
    pub omega1_phase: f64,
}

impl Default for Gauge {
    fn default() -> Self {
        Gauge {
            tau: 1.0,
            gamma_ratio: 1e6,
            detuning_ratio: 100.0,
            gamma_prime_ratio: 1.0,
            kappa_prime_ratio: 100.0,
            delta_tilde: 0.0,
            delta_c: 0.0,
            omega1_phase: 0.0,
        }
    }
}

/// Concrete constants whose effective reduction reproduces `target`.
pub fn realize_raw(target: &OperatingPoint) -> Result<SystemParams> {
    realize_raw_with(target, &Gauge::default())
}

pub fn realize_raw_with(target: &OperatingPoint, gauge: &Gauge) -> Result<SystemParams> {
    target.validate()?;
    if !(gauge.gamma_ratio > 0.0 && gauge.detuning_ratio != 0.0 && gauge.tau > 0.0) {
        return Err(Error::param("gauge", "gauge scales must be positive"));
    }
    let OperatingPoint { c, rho, gamma0, gamma_p, gamma_p_prime, n } = *target;
    let tau = gauge.tau;
    let gamma = gauge.gamma_ratio * gamma0;
    let delta = gauge.detuning_ratio * gamma;
    let kappa = gamma0 / rho;
    let g = (2.0 * c * kappa * tau * gamma / n).sqrt();
    let omega_abs = delta.abs() * (gamma_p / gamma).sqrt();
    let omega1 = C64::from_polar(omega_abs, gauge.omega1_phase);
    let gamma_prime = gauge.gamma_prime_ratio * gamma;
    let g_prime = g;
    let theta = (gamma_p_prime * gamma_prime / (2.0 * g_prime * g_prime)).sqrt();
    let two_photon = gauge.delta_tilde - omega_abs * omega_abs / delta;
    Ok(SystemParams {
        n,
        gamma0,
        gamma,
        gamma_prime,
        kappa,
        kappa_prime: gauge.kappa_prime_ratio * gamma_prime,
        tau,
        tau_prime: 1.0,
        g,
        g_prime,
        omega1,
        delta1: delta + 0.5 * two_photon,
        delta2: delta - 0.5 * two_photon,
        delta_c: gauge.delta_c,
        delta_c_prime: 0.0,
        theta_drive: C64::new(theta, 0.0),
        lambda1: 0.5 * n * gamma0,
        lambda2: 0.5 * n * gamma0,
        a2_in: C64::new(0.0, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        }
    }

    fn sample_raw() -> SystemParams {
        SystemParams {
            n: 1e6,
            gamma0: 1.0,
            gamma: 1e6,
            gamma_prime: 1e6,
            kappa: 2000.0,
            kappa_prime: 1e8,
            tau: 1.0,
            tau_prime: 1.0,
            g: 600.0,
            g_prime: 600.0,
            omega1: C64::new(0.0, 0.0),
            delta1: 1e8,
            delta2: 1e8,
            delta_c: 0.0,
            delta_c_prime: 0.0,
            theta_drive: C64::new(0.0, 0.0),
            lambda1: 5e5,
            lambda2: 5e5,
            a2_in: C64::new(0.0, 0.0),
        }
    }

    #[test]
    fn pump_rates_add_into_effective_decay() {
        let mut p = sample_raw();
        let delta = p.mean_detuning();
        // γ|Ω₁|²/Δ² = 2 and 2g′²|Θ|²/γ′ = 25.
        p.omega1 = C64::new(delta * (2.0 / p.gamma).sqrt(), 0.0);
        p.theta_drive = C64::new((25.0 * p.gamma_prime / (2.0 * p.g_prime * p.g_prime)).sqrt(), 0.0);
        let ep = derive_effective(&p).unwrap().effective;
        assert!((ep.gamma_p - 2.0).abs() < 1e-12);
        assert!((ep.gamma_p_prime - 25.0).abs() < 1e-12);
        assert!((ep.gamma0_tilde - 28.0).abs() < 1e-12);
    }

    #[test]
    fn drives_off_leave_bare_decay() {
        let ep = derive_effective(&sample_raw()).unwrap().effective;
        assert_eq!(ep.gamma_p, 0.0);
        assert_eq!(ep.gamma_p_prime, 0.0);
        assert_eq!(ep.gamma0_tilde, ep.gamma0);
        assert_eq!(ep.lambda12_tilde, 0.0);
    }

    #[test]
    fn cooperativity_depends_only_on_its_combination() {
        let a = sample_raw();
        let mut b = a;
        b.g *= 2.0;
        b.kappa *= 2.0;
        b.gamma *= 2.0;
        b.delta1 *= 2.0;
        b.delta2 *= 2.0;
        let ca = derive_effective(&a).unwrap().effective.c;
        let cb = derive_effective(&b).unwrap().effective.c;
        assert!(rel(ca, cb) < 1e-15);
    }

    #[test]
    fn zero_mean_detuning_is_rejected() {
        let mut p = sample_raw();
        p.delta1 = 5.0;
        p.delta2 = -5.0;
        assert!(matches!(derive_effective(&p), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn negative_rates_are_rejected() {
        let mut p = sample_raw();
        p.gamma = -1.0;
        assert!(derive_effective(&p).is_err());
        let mut p = sample_raw();
        p.lambda1 = -1.0;
        assert!(derive_effective(&p).is_err());
    }

    #[test]
    fn zero_cooperativity_is_rejected() {
        let target = OperatingPoint::new(0.0, 5e-4, 2.0, 25.0);
        assert!(realize_raw(&target).is_err());
    }

    #[test]
    fn realized_reference_point_round_trips() {
        let target = OperatingPoint::new(100.0, 1.0 / 2000.0, 2.0, 25.0);
        let d = derive_effective(&realize_raw(&target).unwrap()).unwrap();
        let ep = d.effective;
        assert!(rel(ep.c, 100.0) < 1e-12);
        assert!(rel(ep.rho, 5e-4) < 1e-12);
        assert!(rel(ep.gamma_p, 2.0) < 1e-12);
        assert!(rel(ep.gamma_p_prime, 25.0) < 1e-12);
        assert!(ep.delta_tilde.abs() < 1e-12 * ep.gamma0_tilde);
        assert!(d.validity.is_valid(), "{:?}", d.validity);
    }

    #[test]
    fn large_eit_rate_is_flagged() {
        let mut target = OperatingPoint::new(100.0, 5e-4, 2.0, 0.0);
        target.gamma_p_prime = 0.5e6;
        let d = derive_effective(&realize_raw(&target).unwrap()).unwrap();
        assert!(d.validity.flags("Gamma_p'/gamma'"));
        assert!(!d.validity.is_valid());
    }

    #[test]
    fn realized_effective_matches_direct_construction() {
        let target = OperatingPoint::new(250.0, 1e-3, 3.0, 40.0);
        let direct = target.effective().unwrap();
        let raw = derive_effective(&realize_raw(&target).unwrap()).unwrap().effective;
        assert!(rel(direct.g_tilde.re, raw.g_tilde.re) < 1e-12);
        assert!(rel(direct.rho_tilde, raw.rho_tilde) < 1e-12);
        assert!(rel(direct.lambda_diff, raw.lambda_diff) < 1e-12);
    }

    proptest! {
        #[test]
        fn realize_then_derive_is_identity(
            c in 1.0f64..1e5,
            log_rho in -4.0f64..-1.0,
            gp in 0.0f64..500.0,
            gpp in 0.0f64..500.0,
            log_n in 2.0f64..8.0,
        ) {
            let rho = 10f64.powf(log_rho);
            let n = 10f64.powf(log_n);
            let target = OperatingPoint { c, rho, gamma0: 1.0, gamma_p: gp, gamma_p_prime: gpp, n };
            let ep = derive_effective(&realize_raw(&target).unwrap()).unwrap().effective;
            prop_assert!(rel(ep.c, c) < 1e-12);
            prop_assert!(rel(ep.rho, rho) < 1e-12);
            prop_assert!(rel(ep.gamma_p, gp) < 1e-12 || (gp == 0.0 && ep.gamma_p == 0.0));
            prop_assert!(rel(ep.gamma_p_prime, gpp) < 1e-12);
            prop_assert!(rel(ep.n, n) < 1e-12);
            prop_assert!(rel(ep.gamma0_tilde, 1.0 + gp + gpp) < 1e-12);
            prop_assert!(rel(ep.rho_tilde, ep.rho * ep.gamma0_tilde / ep.gamma0) < 1e-15);
        }

        #[test]
        fn effective_decay_is_monotone_in_each_rate(
            g0 in 0.1f64..10.0, gp in 0.0f64..100.0, gpp in 0.0f64..100.0, bump in 0.01f64..10.0,
        ) {
            let base = OperatingPoint { c: 10.0, rho: 1e-3, gamma0: g0, gamma_p: gp, gamma_p_prime: gpp, n: 1e4 };
            let t0 = base.effective().unwrap().gamma0_tilde;
            let a = OperatingPoint { gamma0: g0 + bump, ..base }.effective().unwrap().gamma0_tilde;
            let b = OperatingPoint { gamma_p: gp + bump, ..base }.effective().unwrap().gamma0_tilde;
            let c = OperatingPoint { gamma_p_prime: gpp + bump, ..base }.effective().unwrap().gamma0_tilde;
            prop_assert!(a > t0 && b > t0 && c > t0);
        }
    }
}
