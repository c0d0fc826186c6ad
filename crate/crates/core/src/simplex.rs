//! Nelder–Mead simplex minimization.

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Initial edge length along each coordinate.
    pub step: f64,
    /// Stop when the spread of simplex values falls below `rel_tol·|best|`.
    pub rel_tol: f64,
    /// Stop when the simplex diameter falls below this.
    pub x_tol: f64,
    pub max_evaluations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { step: 0.1, rel_tol: 1e-10, x_tol: 1e-9, max_evaluations: 5000 }
    }
}

pub fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, start: &[f64], opts: &SimplexOptions) -> Minimum {
    let n = start.len();
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_nan() { f64::INFINITY } else { v }
    };

    let mut pts: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += opts.step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evaluations)).collect();
    let mut converged = false;

    while evaluations < opts.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[n] - vals[0];
        let diameter = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= opts.rel_tol * vals[0].abs().max(1e-300) && diameter <= opts.x_tol.max(1e-3 * opts.step) {
            converged = true;
            break;
        }
        if diameter <= opts.x_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n).map(|k| pts[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|k| centroid[k] + t * (pts[n][k] - centroid[k])).collect() };

        let xr = along(-1.0);
        let fr = eval(&xr, &mut evaluations);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evaluations);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let x = along(-0.5);
                let v = eval(&x, &mut evaluations);
                (x, v)
            } else {
                let x = along(0.5);
                let v = eval(&x, &mut evaluations);
                (x, v)
            };
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    pts[i] = (0..n).map(|k| pts[0][k] + 0.5 * (pts[i][k] - pts[0][k])).collect();
                    vals[i] = eval(&pts[i], &mut evaluations);
                }
            }
        }
    }

    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    Minimum { x: pts[best].clone(), value: vals[best], evaluations, converged }
}
