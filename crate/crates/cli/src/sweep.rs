//! Value lists: a number, a comma list, or a range `lo:hi:logN` / `lo:hi:linN`.

use anyhow::{bail, ensure, Context, Result};

pub fn parse(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.contains(':') {
        return parse_range(text);
    }
    text.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("`{t}` is not a number")))
        .collect()
}

fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    ensure!(parts.len() == 3, "range `{text}` must look like lo:hi:logN or lo:hi:linN");
    let lo: f64 = parts[0].trim().parse().with_context(|| format!("bad lower bound in `{text}`"))?;
    let hi: f64 = parts[1].trim().parse().with_context(|| format!("bad upper bound in `{text}`"))?;
    let spec = parts[2].trim();
    let (log, count) = if let Some(n) = spec.strip_prefix("log") {
        (true, n)
    } else if let Some(n) = spec.strip_prefix("lin") {
        (false, n)
    } else {
        bail!("range `{text}` must end in logN or linN");
    };
    let n: usize = count.parse().with_context(|| format!("bad point count in `{text}`"))?;
    ensure!(n >= 1, "range `{text}` needs at least one point");
    ensure!(lo.is_finite() && hi.is_finite(), "range `{text}` has non-finite bounds");
    if log {
        ensure!(lo > 0.0 && hi > 0.0, "log range `{text}` needs positive bounds");
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|k| {
            let t = k as f64 / last;
            if k == n - 1 {
                hi
            } else if log {
                10f64.powf(lo.log10() + t * (hi.log10() - lo.log10()))
            } else {
                lo + t * (hi - lo)
            }
        })
        .collect())
}
