use crate::{Error, Result};

/// Cumulative trapezoid sums; the first entry is 0.
pub fn trapezoid_integrate(samples: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::BadGrid("abscissae must be strictly increasing".into()));
    }
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    for (k, &(x, f)) in samples.iter().enumerate() {
        if k > 0 {
            let (x0, f0) = samples[k - 1];
            acc += 0.5 * (x - x0) * (f + f0);
        }
        out.push((x, acc));
    }
    Ok(out)
}

/// Romberg quadrature of `f` over `[a, b]`: trapezoid sums on successively
/// halved panels, Richardson-extrapolated until two diagonal entries agree
/// to `tol` (relative to the integral's scale).
pub fn romberg(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_LEVELS: usize = 18;
    if a == b {
        return Ok(0.0);
    }
    let mut prev: Vec<f64> = Vec::new();
    let mut h = b - a;
    let mut trap = 0.5 * h * (f(a) + f(b));
    let mut panels = 1usize;
    for level in 0..MAX_LEVELS {
        if level > 0 {
            h *= 0.5;
            let mut mid = 0.0;
            for k in 0..panels {
                mid += f(a + (2 * k + 1) as f64 * h);
            }
            trap = 0.5 * trap + h * mid;
            panels *= 2;
        }
        if !trap.is_finite() {
            return Err(Error::NonFiniteSample { point: vec![a, b] });
        }
        let mut row = vec![trap];
        let mut factor = 1.0;
        for m in 1..=level {
            factor *= 4.0;
            let r = row[m - 1] + (row[m - 1] - prev[m - 1]) / (factor - 1.0);
            row.push(r);
        }
        if level >= 3 {
            let d = (row[level] - prev[level - 1]).abs();
            if d <= tol * row[level].abs().max(1.0) {
                return Ok(row[level]);
            }
        }
        prev = row;
    }
    Ok(*prev.last().expect("at least one level"))
}
