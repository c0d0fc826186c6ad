//! Mean-field steady state of the complete four-level double-Λ system.
//!
//! Unknowns are the four populations, the five coherences and the two cavity
//! fields, packed into 18 reals. The right-hand sides are quadratic in the
//! unknowns, so a central-difference Jacobian is exact up to rounding.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::effective::{steady_state_zero_field, SteadyState};
use crate::error::{Error, Result};
use crate::linalg::I;
use crate::params::{derive_effective, SystemParams, ValidityReport};

const NVAR: usize = 18;
const NATOM: usize = 14;
const A2_RE: usize = 14;
const THETA_RE: usize = 16;

pub const TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 200;
const MIN_STEP: f64 = 1.0 / 1048576.0;
const CONTINUATION_STEPS: usize = 10;

/// How the quantum cavity mode is driven.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CavityDrive {
    /// Use `SystemParams::a2_in` and solve the cavity equation.
    Input,
    /// Hold the intracavity mean field at this value; the input needed to
    /// sustain it is reported.
    Intracavity(C64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullModelState {
    /// Π₁..Π₄.
    pub pi: [f64; 4],
    pub p13: C64,
    pub p23: C64,
    pub p14: C64,
    pub p24: C64,
    pub pr: C64,
    pub a2: C64,
    pub theta: C64,
    /// Input amplitude consistent with `a2`.
    pub a2_in: C64,
    /// Scaled ∞-norm of the fixed-point residual.
    pub residual: f64,
    pub iterations: usize,
}

impl FullModelState {
    /// (Π₂ − Π₁)/2.
    pub fn s_z(&self) -> f64 {
        0.5 * (self.pi[1] - self.pi[0])
    }

    pub fn ground_population(&self) -> f64 {
        self.pi[0] + self.pi[1]
    }

    pub fn population_sum(&self) -> f64 {
        self.pi.iter().sum()
    }
}

struct Model<'a> {
    p: &'a SystemParams,
    drive: CavityDrive,
    /// Multiplies Ω₁, the Θ drive and the cavity drive during continuation.
    ramp: f64,
    row_scale: [f64; NVAR],
    col_scale: [f64; NVAR],
}

fn cplx(x: &DVector<f64>, k: usize) -> C64 {
    C64::new(x[k], x[k + 1])
}

impl<'a> Model<'a> {
    fn new(p: &'a SystemParams, drive: CavityDrive) -> Self {
        let n = p.n;
        let a_field = (p.g * n / (p.tau * p.kappa)).max(match drive {
            CavityDrive::Intracavity(a) => a.norm(),
            CavityDrive::Input => p.a2_in.norm() * (2.0 * p.kappa / p.tau).sqrt() / p.kappa,
        });
        let a_field = if a_field > 0.0 { a_field } else { 1.0 };
        let t_field = (p.g_prime * n / (p.tau_prime * p.kappa_prime)).max(p.theta_drive.norm());
        let t_field = if t_field > 0.0 { t_field } else { 1.0 };
        let rates = [
            p.gamma0, p.gamma0, p.gamma, p.gamma_prime,
            p.gamma, p.gamma, p.gamma, p.gamma,
            p.gamma_prime, p.gamma_prime, p.gamma_prime, p.gamma_prime,
            p.gamma0, p.gamma0,
        ];
        let mut row_scale = [0.0; NVAR];
        let mut col_scale = [n; NVAR];
        for (k, r) in rates.iter().enumerate() {
            row_scale[k] = n * r;
        }
        row_scale[A2_RE] = p.kappa * a_field;
        row_scale[A2_RE + 1] = p.kappa * a_field;
        row_scale[THETA_RE] = p.kappa_prime * t_field;
        row_scale[THETA_RE + 1] = p.kappa_prime * t_field;
        col_scale[A2_RE] = a_field;
        col_scale[A2_RE + 1] = a_field;
        col_scale[THETA_RE] = t_field;
        col_scale[THETA_RE + 1] = t_field;
        Model { p, drive, ramp: 1.0, row_scale, col_scale }
    }

    /// Scaled right-hand sides.
    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        let p = self.p;
        let (g, gp) = (p.g, p.g_prime);
        let om = p.omega1 * self.ramp;
        let [pi1, pi2, pi3, pi4] = [x[0], x[1], x[2], x[3]];
        let p13 = cplx(x, 4);
        let p23 = cplx(x, 6);
        let p14 = cplx(x, 8);
        let p24 = cplx(x, 10);
        let pr = cplx(x, 12);
        let a2 = cplx(x, A2_RE);
        let th = cplx(x, THETA_RE);

        // i·z − i·z* = −2 Im z.
        let raman1 = -2.0 * (om.conj() * p13).im;
        let raman2 = -2.0 * (g * a2.conj() * p23).im;
        let eit1 = -2.0 * (gp * th.conj() * p14).im;
        let eit2 = -2.0 * (gp * th.conj() * p24).im;
        let back = p.gamma * pi3 + p.gamma_prime * pi4;

        let d_pi1 = raman1 + eit1 + back - p.gamma0 * pi1 + p.lambda1;
        let d_pi2 = raman2 + eit2 + back - p.gamma0 * pi2 + p.lambda2;
        let d_pi3 = -raman1 - raman2 - 2.0 * p.gamma * pi3;
        let d_pi4 = -eit1 - eit2 - 2.0 * p.gamma_prime * pi4;
        let d_p13 = -C64::new(p.gamma, p.delta1) * p13 + I * om * (pi1 - pi3) + I * g * a2 * pr.conj();
        let d_p23 = -C64::new(p.gamma, p.delta2) * p23 + I * g * a2 * (pi2 - pi3) + I * om * pr;
        let d_p14 = -p.gamma_prime * p14 + I * gp * th * (pi1 - pi4) + I * gp * th * pr.conj();
        let d_p24 = -p.gamma_prime * p24 + I * gp * th * (pi2 - pi4) + I * gp * th * pr;
        let d_pr = -C64::new(p.gamma0, -p.two_photon_detuning()) * pr + I * om.conj() * p23
            - I * g * a2 * p13.conj()
            + I * gp * th.conj() * p24
            - I * gp * th * p14.conj();
        let d_a2 = match self.drive {
            CavityDrive::Input => {
                -C64::new(p.kappa, p.delta_c) * a2 + I * (g / p.tau) * p23
                    + (2.0 * p.kappa / p.tau).sqrt() * p.a2_in * self.ramp
            }
            // Pinned: the row forces a2 to the target.
            CavityDrive::Intracavity(target) => (target * self.ramp - a2) * p.kappa,
        };
        let d_th = -C64::new(p.kappa_prime, p.delta_c_prime) * th + I * (gp / p.tau_prime) * (p14 + p24)
            + p.kappa_prime * p.theta_drive * self.ramp;

        let raw = [
            d_pi1, d_pi2, d_pi3, d_pi4,
            d_p13.re, d_p13.im, d_p23.re, d_p23.im, d_p14.re, d_p14.im, d_p24.re, d_p24.im,
            d_pr.re, d_pr.im, d_a2.re, d_a2.im, d_th.re, d_th.im,
        ];
        DVector::from_iterator(NVAR, raw.iter().zip(&self.row_scale).map(|(r, s)| r / s))
    }

    /// Jacobian of the scaled residual against scaled unknowns, restricted to `cols`.
    fn jacobian(&self, x: &DVector<f64>, rows: usize, cols: usize) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(rows, cols);
        for k in 0..cols {
            let h = 1e-3 * self.col_scale[k];
            let mut up = x.clone();
            up[k] += h;
            let mut dn = x.clone();
            dn[k] -= h;
            let diff = (self.residual(&up) - self.residual(&dn)) * (self.col_scale[k] / (2.0 * h));
            j.column_mut(k).copy_from(&diff.rows(0, rows));
        }
        j
    }

    /// Atomic unknowns for fixed fields; the atomic equations are linear in them.
    fn atoms_for_fields(&self, x: &mut DVector<f64>) -> Result<()> {
        for k in 0..NATOM {
            x[k] = 0.0;
        }
        let f0 = self.residual(x).rows(0, NATOM).into_owned();
        let j = self.jacobian(x, NATOM, NATOM);
        let dx = j.lu().solve(&(-f0)).ok_or(Error::Singular("atomic steady state"))?;
        for k in 0..NATOM {
            x[k] = dx[k] * self.col_scale[k];
        }
        Ok(())
    }

    fn initial_guess(&self) -> Result<DVector<f64>> {
        let p = self.p;
        let mut x = DVector::zeros(NVAR);
        let a2 = match self.drive {
            CavityDrive::Intracavity(a) => a * self.ramp,
            CavityDrive::Input => {
                (2.0 * p.kappa / p.tau).sqrt() * p.a2_in * self.ramp / C64::new(p.kappa, p.delta_c)
            }
        };
        let theta = p.kappa_prime * p.theta_drive * self.ramp / C64::new(p.kappa_prime, p.delta_c_prime);
        x[A2_RE] = a2.re;
        x[A2_RE + 1] = a2.im;
        x[THETA_RE] = theta.re;
        x[THETA_RE + 1] = theta.im;
        self.atoms_for_fields(&mut x)?;
        Ok(x)
    }

    fn newton(&self, mut x: DVector<f64>) -> Result<(DVector<f64>, f64, usize)> {
        // Step acceptance uses the 2-norm; convergence is judged on the ∞-norm.
        let mut f = self.residual(&x);
        let mut norm = f.amax();
        let mut merit = f.norm();
        for it in 0..MAX_ITERATIONS {
            if norm <= TOLERANCE {
                return Ok((x, norm, it));
            }
            let j = self.jacobian(&x, NVAR, NVAR);
            let step = j.lu().solve(&(-&f)).ok_or(Error::Singular("Newton Jacobian"))?;
            let step = DVector::from_iterator(NVAR, step.iter().zip(&self.col_scale).map(|(s, c)| s * c));
            let mut t = 1.0;
            loop {
                let trial = &x + &step * t;
                let ft = self.residual(&trial);
                let mt = ft.norm();
                if mt.is_finite() && mt < merit {
                    x = trial;
                    norm = ft.amax();
                    merit = mt;
                    f = ft;
                    break;
                }
                t *= 0.5;
                if t < MIN_STEP {
                    return Err(Error::NoConvergence { iterations: it, residual: norm });
                }
            }
        }
        if norm <= TOLERANCE {
            Ok((x, norm, MAX_ITERATIONS))
        } else {
            Err(Error::NoConvergence { iterations: MAX_ITERATIONS, residual: norm })
        }
    }

    fn solve(&mut self) -> Result<(DVector<f64>, f64, usize)> {
        self.ramp = 1.0;
        let direct = self.initial_guess().and_then(|x| self.newton(x));
        if direct.is_ok() {
            return direct;
        }
        // Geometric ramp of all drives, each stage seeded by the previous one.
        let mut x = None;
        let mut total = 0;
        let mut last = (0.0, 0);
        for k in 0..CONTINUATION_STEPS {
            self.ramp = 10f64.powf(-3.0 * (CONTINUATION_STEPS - 1 - k) as f64 / (CONTINUATION_STEPS - 1) as f64);
            let start = match x.take() {
                Some(prev) => prev,
                None => self.initial_guess()?,
            };
            let (sol, res, its) = self.newton(start)?;
            total += its;
            last = (res, total);
            x = Some(sol);
        }
        Ok((x.expect("at least one continuation stage"), last.0, last.1))
    }
}

fn required_input(p: &SystemParams, x: &DVector<f64>) -> C64 {
    let a2 = cplx(x, A2_RE);
    let p23 = cplx(x, 6);
    (C64::new(p.kappa, p.delta_c) * a2 - I * (p.g / p.tau) * p23) / (2.0 * p.kappa / p.tau).sqrt()
}

fn solve_pinned(p: &SystemParams, a2: C64) -> Result<(DVector<f64>, f64, usize)> {
    Model::new(p, CavityDrive::Intracavity(a2)).solve()
}

/// Driven cavity: the intracavity field is found by an outer Newton iteration
/// on the input it requires, each step solving the pinned problem, followed by
/// a polish of the complete system. A direct solve from the empty-cavity field
/// can stall because strong collective emission makes that guess far off.
fn solve_driven(p: &SystemParams) -> Result<(DVector<f64>, f64, usize)> {
    let model = Model::new(p, CavityDrive::Input);
    let field_scale = model.col_scale[A2_RE];
    let input_scale = p.kappa * field_scale / (2.0 * p.kappa / p.tau).sqrt();
    let mismatch = |a: C64| -> Result<(DVector<f64>, C64, usize)> {
        let (x, _, its) = solve_pinned(p, a)?;
        let r = required_input(p, &x) - p.a2_in;
        Ok((x, r, its))
    };

    let mut a = C64::new(0.0, 0.0);
    let (mut x, mut r, mut total) = mismatch(a)?;
    let mut outer = 0;
    while r.norm() > 1e-13 * input_scale {
        outer += 1;
        if outer > MAX_ITERATIONS {
            return Err(Error::NoConvergence { iterations: total, residual: r.norm() / input_scale });
        }
        let h = 1e-6 * field_scale;
        let (_, r_re, _) = mismatch(a + h)?;
        let (_, r_im, _) = mismatch(a + C64::new(0.0, h))?;
        let (d_re, d_im) = ((r_re - r) / h, (r_im - r) / h);
        let jac = nalgebra::Matrix2::new(d_re.re, d_im.re, d_re.im, d_im.im);
        let step = jac
            .lu()
            .solve(&nalgebra::Vector2::new(-r.re, -r.im))
            .ok_or(Error::Singular("cavity field Jacobian"))?;
        let step = C64::new(step[0], step[1]);
        let mut t = 1.0;
        loop {
            let (xt, rt, its) = mismatch(a + step * t)?;
            total += its;
            if rt.norm() < r.norm() {
                a += step * t;
                x = xt;
                r = rt;
                break;
            }
            t *= 0.5;
            if t < MIN_STEP {
                return Err(Error::NoConvergence { iterations: total, residual: r.norm() / input_scale });
            }
        }
    }
    let (x, residual, its) = model.newton(x)?;
    Ok((x, residual, total + its))
}

/// Mean-field steady state reached continuously from the unpumped state.
pub fn full_steady_state(p: &SystemParams, drive: CavityDrive) -> Result<FullModelState> {
    p.validate()?;
    let (x, residual, iterations) = match drive {
        CavityDrive::Input => solve_driven(p)?,
        CavityDrive::Intracavity(a) => solve_pinned(p, a)?,
    };
    let p23 = cplx(&x, 6);
    Ok(FullModelState {
        pi: [x[0], x[1], x[2], x[3]],
        p13: cplx(&x, 4),
        p23,
        p14: cplx(&x, 8),
        p24: cplx(&x, 10),
        pr: cplx(&x, 12),
        a2: cplx(&x, A2_RE),
        theta: cplx(&x, THETA_RE),
        a2_in: required_input(p, &x),
        residual,
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub full: FullModelState,
    pub effective: SteadyState,
    pub validity: ValidityReport,
    /// |P_r − ⟨S₊⟩| / max(|P_r|, |⟨S₊⟩|).
    pub pr_discrepancy: f64,
    /// Same for (Π₂ − Π₁)/2 against ⟨S_z⟩.
    pub sz_discrepancy: f64,
    /// max(Π₃, Π₄)/N.
    pub excited_fraction: f64,
}

impl Comparison {
    pub fn max_discrepancy(&self) -> f64 {
        self.pr_discrepancy.max(self.sz_discrepancy)
    }
}

fn relative_gap(a: C64, b: C64, floor: f64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale <= floor {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Full model with zero intracavity field against the effective zero-field steady state.
pub fn compare_effective(p: &SystemParams) -> Result<Comparison> {
    let derivation = derive_effective(p)?;
    let effective = steady_state_zero_field(&derivation.effective);
    let full = full_steady_state(p, CavityDrive::Intracavity(C64::new(0.0, 0.0)))?;
    let floor = 1e-12 * p.n;
    Ok(Comparison {
        pr_discrepancy: relative_gap(full.pr, effective.s_plus, floor),
        sz_discrepancy: relative_gap(C64::new(full.s_z(), 0.0), C64::new(effective.s_z, 0.0), floor),
        excited_fraction: full.pi[2].max(full.pi[3]) / p.n,
        validity: derivation.validity,
        effective,
        full,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{realize_raw, realize_raw_with, Gauge, OperatingPoint};

    const RHO: f64 = 1.0 / 2000.0;

    #[test]
    fn unpumped_fixed_point() {
        let p = realize_raw(&OperatingPoint::new(100.0, RHO, 0.0, 0.0)).unwrap();
        let s = full_steady_state(&p, CavityDrive::Input).unwrap();
        assert!((s.pi[0] - 0.5 * p.n).abs() < 1e-9 * p.n);
        assert!((s.pi[1] - 0.5 * p.n).abs() < 1e-9 * p.n);
        for z in [s.p13, s.p23, s.p14, s.p24, s.pr, s.a2, s.theta] {
            assert!(z.norm() < 1e-9 * p.n);
        }
        let cmp = compare_effective(&p).unwrap();
        assert_eq!(cmp.max_discrepancy(), 0.0);
    }

    #[test]
    fn reference_point_agrees_with_effective_model() {
        let p = realize_raw(&OperatingPoint::new(100.0, RHO, 5.5, 25.0)).unwrap();
        let cmp = compare_effective(&p).unwrap();
        assert!(cmp.full.residual <= TOLERANCE);
        assert!((cmp.full.pr.re / p.n + 0.39669).abs() < 2e-4, "{}", cmp.full.pr / p.n);
        assert!(cmp.pr_discrepancy < 0.05 && cmp.sz_discrepancy < 0.05);
        assert!(cmp.excited_fraction < 1e-3);
        assert!((cmp.full.ground_population() - p.n).abs() < 1e-9 * p.n);
        assert!(cmp.full.pi.iter().all(|&v| v >= -1e-9 * p.n));
    }

    #[test]
    fn dark_state_limit() {
        let p = realize_raw(&OperatingPoint::new(100.0, RHO, 0.0, 100.0)).unwrap();
        let s = full_steady_state(&p, CavityDrive::Input).unwrap();
        assert!((s.pr.re / p.n + 0.5).abs() < 0.01);
    }

    #[test]
    fn intracavity_pin_reports_required_input() {
        let p = realize_raw(&OperatingPoint::new(100.0, RHO, 2.0, 25.0)).unwrap();
        let pinned = full_steady_state(&p, CavityDrive::Intracavity(C64::new(0.0, 0.0))).unwrap();
        let mut driven = p;
        driven.a2_in = pinned.a2_in;
        let free = full_steady_state(&driven, CavityDrive::Input).unwrap();
        assert!(free.a2.norm() < 1e-6 * (p.g * p.n / p.kappa));
        assert!((free.pr - pinned.pr).norm() < 1e-8 * p.n);
    }

    #[test]
    fn large_detuning_stress_breaks_agreement() {
        let gauge = Gauge { detuning_ratio: 1.0, ..Gauge::default() };
        let p = realize_raw_with(&OperatingPoint::new(100.0, RHO, 2.0, 25.0), &gauge).unwrap();
        let cmp = compare_effective(&p).unwrap();
        assert!(cmp.sz_discrepancy > 0.05);
        assert!(cmp.validity.flags("gamma/|Delta|"));
    }
}
