//! One function per command, each turning a resolved config into a table.

use anyhow::{bail, Context, Result};
use eitsqz::validate;
use eitsqz::{
    asymptotic_pumps, field_limit, field_scan, optimize_pumps, scaling_study, solve_lyapunov,
    spectrum_analytic, spin_variance_report, NoiseModel, OperatingPoint,
};
use rayon::prelude::*;

use crate::config::{Command, RunConfig};
use crate::table::{Cell, Table};

pub struct Outcome {
    pub table: Table,
    /// Nonzero when the command ran but reports a failure (validation).
    pub exit_code: i32,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome { table, exit_code: 0 }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Variance => variance(cfg).map(Into::into),
        Command::ScanGamma => scan_gamma(cfg).map(Into::into),
        Command::Optimize => optimize(cfg).map(Into::into),
        Command::Scaling => scaling(cfg).map(Into::into),
        Command::Spectrum => spectrum(cfg).map(Into::into),
        Command::FieldScan => field(cfg).map(Into::into),
        Command::Validate => validation(cfg),
    }
}

fn point(cfg: &RunConfig, gamma_p: f64, gamma_p_prime: f64) -> Result<OperatingPoint> {
    let p = OperatingPoint::new(cfg.scalar("c")?, cfg.scalar("rho")?, gamma_p, gamma_p_prime).with_n(cfg.scalar("n")?);
    p.validate()?;
    Ok(p)
}

/// Appends the γ₀ value in Hz and rates converted to Hz when `gamma0_hz` is set.
fn hz_columns(cfg: &RunConfig, table: &mut Table, rate_columns: &[&'static str]) -> Result<Option<f64>> {
    let Some(hz) = cfg.optional_scalar("gamma0_hz")? else {
        return Ok(None);
    };
    if !(hz > 0.0) {
        bail!("invalid value for key `gamma0_hz`: must be positive");
    }
    table.columns.extend_from_slice(rate_columns);
    table.result("gamma0_hz", hz);
    Ok(Some(hz))
}

fn variance(cfg: &RunConfig) -> Result<Table> {
    let p = point(cfg, cfg.scalar("gamma_p")?, cfg.scalar("gamma_p_prime")?)?;
    let ep = p.effective()?.with_detunings(cfg.scalar("delta_tilde")?, cfg.scalar("delta_c")?);
    let model = NoiseModel::zero_field(&ep);
    let cov = solve_lyapunov(&model.drift, &model.diffusion).context("stationary covariance")?;
    let r = spin_variance_report(&cov, &model.steady)?;
    let quarter = ep.n / 4.0;
    let mut t = Table::new(&[
        "gamma_p",
        "gamma_p_prime",
        "ds_min",
        "squeezing_db",
        "var_min_norm",
        "var_sy_norm",
        "spin_half_norm",
        "angle",
        "gamma_plus",
        "lyapunov_residual",
        "condition",
    ]);
    let hz = hz_columns(cfg, &mut t, &["gamma_p_hz", "gamma_p_prime_hz", "gamma_plus_hz"])?;
    let mut row: Vec<Cell> = vec![
        p.gamma_p.into(),
        p.gamma_p_prime.into(),
        r.ds_min.into(),
        r.squeezing_db.into(),
        (r.var_min / quarter).into(),
        (cov.spin_block()[(1, 1)] / quarter).into(),
        (r.spin_half / quarter).into(),
        r.angle.into(),
        ep.gamma_plus().into(),
        cov.relative_residual.into(),
        cov.condition.into(),
    ];
    if let Some(hz) = hz {
        row.extend([p.gamma_p * hz, p.gamma_p_prime * hz, ep.gamma_plus() * hz].map(Cell::from));
    }
    t.push(row);
    t.result("ill_conditioned", cov.ill_conditioned());
    Ok(t)
}

fn scan_gamma(cfg: &RunConfig) -> Result<Table> {
    let gpps = cfg.list("gamma_p_prime")?;
    let grid: Vec<(f64, f64)> =
        cfg.list("gamma_p")?.into_iter().flat_map(|gp| gpps.iter().map(move |&gpp| (gp, gpp))).collect();
    let rows: Vec<Vec<Cell>> = grid
        .par_iter()
        .map(|&(gp, gpp)| -> Result<Vec<Cell>> {
            let ep = point(cfg, gp, gpp)?.effective()?;
            let model = NoiseModel::zero_field(&ep);
            let cov = solve_lyapunov(&model.drift, &model.diffusion)
                .with_context(|| format!("covariance at gamma_p = {gp}, gamma_p_prime = {gpp}"))?;
            let r = spin_variance_report(&cov, &model.steady)?;
            let quarter = ep.n / 4.0;
            Ok(vec![
                gp.into(),
                gpp.into(),
                r.ds_min.into(),
                (cov.spin_block()[(1, 1)] / quarter).into(),
                (r.spin_half / quarter).into(),
            ])
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(&["gamma_p", "gamma_p_prime", "ds_min", "var_sy_norm", "spin_half_norm"]);
    let hz = hz_columns(cfg, &mut t, &["gamma_p_hz", "gamma_p_prime_hz"])?;
    for (mut row, (gp, gpp)) in rows.into_iter().zip(grid) {
        if let Some(hz) = hz {
            row.extend([Cell::from(gp * hz), Cell::from(gpp * hz)]);
        }
        t.push(row);
    }
    Ok(t)
}

fn optimize(cfg: &RunConfig) -> Result<Table> {
    let rho = cfg.scalar("rho")?;
    let cs = cfg.list("c")?;
    let results: Vec<_> = cs
        .par_iter()
        .map(|&c| optimize_pumps(c, rho).with_context(|| format!("optimization at c = {c}")))
        .collect::<Result<_>>()?;
    let mut t = Table::new(&[
        "c",
        "gamma_p_star",
        "gamma_p_prime_star",
        "ds_min_star",
        "squeezing_percent",
        "squeezing_db",
        "at_boundary",
        "asymptotic_gamma_p_star",
        "asymptotic_gamma_p_prime_star",
        "asymptotic_ds_min_star",
    ]);
    let hz = hz_columns(cfg, &mut t, &["gamma_p_star_hz", "gamma_p_prime_star_hz"])?;
    for r in &results {
        let a = asymptotic_pumps(r.c, rho);
        let mut row: Vec<Cell> = vec![
            r.c.into(),
            r.gamma_p_star.into(),
            r.gamma_p_prime_star.into(),
            r.ds_min_star.into(),
            (100.0 * r.squeezing_fraction()).into(),
            r.squeezing_db.into(),
            r.at_boundary.into(),
            a.gamma_p_star.into(),
            a.gamma_p_prime_star.into(),
            a.ds_min_star.into(),
        ];
        if let Some(hz) = hz {
            row.extend([Cell::from(r.gamma_p_star * hz), Cell::from(r.gamma_p_prime_star * hz)]);
        }
        t.push(row);
    }
    if let [r] = results.as_slice() {
        t.result("gamma_p_star", r.gamma_p_star);
        t.result("gamma_p_prime_star", r.gamma_p_prime_star);
        t.result("squeezing_db", r.squeezing_db);
    }
    Ok(t)
}

fn scaling(cfg: &RunConfig) -> Result<Table> {
    let rho = cfg.scalar("rho")?;
    let study = scaling_study(&cfg.list("c_values")?, rho)?;
    let mut t = Table::new(&[
        "c",
        "ds_min_star",
        "ds_min_star_times_c_cbrt",
        "gamma_p_star",
        "gamma_p_prime_star",
        "asymptotic_ds_min_star",
        "at_boundary",
    ]);
    for r in &study.rows {
        t.push(vec![
            r.c.into(),
            r.ds_min_star.into(),
            (r.ds_min_star * r.c.cbrt()).into(),
            r.gamma_p_star.into(),
            r.gamma_p_prime_star.into(),
            asymptotic_pumps(r.c, rho).ds_min_star.into(),
            r.at_boundary.into(),
        ]);
    }
    t.result("slope", study.slope);
    t.result("prefactor", study.prefactor);
    t.result("large_c_prefactor", study.large_c_prefactor);
    t.result("boundary_warnings", study.boundary_warnings);
    Ok(t)
}

fn spectrum(cfg: &RunConfig) -> Result<Table> {
    let ep = point(cfg, cfg.scalar("gamma_p")?, cfg.scalar("gamma_p_prime")?)?.effective()?;
    let s = spectrum_analytic(&ep, &cfg.list("omega_bar")?)?;
    let mut t = Table::new(&["omega_bar", "s_field", "s_atomic", "s_total"]);
    for p in &s.points {
        t.push(vec![p.omega_bar.into(), p.s_f.into(), p.s_at.into(), p.total.into()]);
    }
    t.result("gamma_plus", s.gamma_plus);
    t.result("full_width", s.full_width());
    Ok(t)
}

fn field(cfg: &RunConfig) -> Result<Table> {
    let ep = point(cfg, cfg.scalar("gamma_p")?, cfg.scalar("gamma_p_prime")?)?.effective()?;
    let scan = field_scan(&ep, &cfg.list("amplitude")?)?;
    let mut t = Table::new(&[
        "amplitude",
        "ds_min",
        "var_min_norm",
        "spin_half_norm",
        "angle",
        "stable",
        "min_real_eigenvalue",
    ]);
    let quarter = ep.n / 4.0;
    for p in &scan {
        t.push(vec![
            p.amplitude.into(),
            p.ds_min.into(),
            (p.var_min / quarter).into(),
            (p.spin_half / quarter).into(),
            p.angle.into(),
            p.stable.into(),
            p.min_real_eigenvalue.into(),
        ]);
    }
    let lim = field_limit(&ep)?;
    t.result("field_limit", lim.amplitude);
    t.result("gamma_plus", lim.gamma_plus);
    Ok(t)
}

fn validation(cfg: &RunConfig) -> Result<Outcome> {
    let seed = cfg.integer("seed")?;
    let points = cfg.integer("points")? as usize;
    let reports = vec![
        validate::master_equivalence(seed, points),
        validate::eit_alone(&[0.5, 4.0, 25.0, 300.0]),
        validate::covariance_properties(seed, points),
        validate::n_scaling(),
        validate::gauge_invariance(),
        validate::resonance_optimality(),
        validate::wiener_khinchin(),
        validate::full_model_oracle(),
    ];
    let mut t = Table::new(&["suite", "passed", "cases", "worst", "tolerance", "detail"]);
    for r in &reports {
        t.push(vec![
            r.name.into(),
            r.passed.into(),
            r.cases.into(),
            r.worst.into(),
            r.tolerance.into(),
            r.detail.clone().into(),
        ]);
    }
    let passed = reports.iter().all(|r| r.passed);
    t.result("all_passed", passed);
    Ok(Outcome { table: t, exit_code: if passed { 0 } else { 1 } })
}

