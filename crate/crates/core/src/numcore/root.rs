use crate::{Error, Result};

const MAX_ITER: usize = 200;

/// Root of `g` on `bracket` by bisection, to `|g| ≤ tol` or width `≤ tol`.
pub fn solve_scalar(g: impl Fn(f64) -> f64, bracket: (f64, f64), tol: f64) -> Result<f64> {
    safeguarded(g, None::<fn(f64) -> f64>, bracket, tol)
}

/// As [`solve_scalar`], with Newton steps from the derivative `dg`. A
/// Newton step that would leave the current bracket is replaced by
/// bisection.
pub fn solve_scalar_newton(
    g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64> {
    safeguarded(g, Some(dg), bracket, tol)
}

fn safeguarded(
    g: impl Fn(f64) -> f64,
    dg: Option<impl Fn(f64) -> f64>,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let (mut glo, ghi) = (g(lo), g(hi));
    if !(glo.is_finite() && ghi.is_finite()) || glo * ghi > 0.0 {
        return Err(Error::NoBracket { lo, hi });
    }
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let gx = g(x);
        if !gx.is_finite() {
            return Err(Error::NonFiniteSample { point: vec![x] });
        }
        if gx.abs() <= tol {
            return Ok(x);
        }
        if (gx < 0.0) == (glo < 0.0) {
            lo = x;
            glo = gx;
        } else {
            hi = x;
        }
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        x = match &dg {
            Some(dg) => {
                let d = dg(x);
                let newton = x - gx / d;
                if d != 0.0 && newton.is_finite() && newton > lo && newton < hi {
                    newton
                } else {
                    mid
                }
            }
            None => mid,
        };
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        assert!((solve_scalar(|y| y - 2.0, (0.0, 5.0), 1e-14).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn sqrt_two() {
        let r = solve_scalar(|y| y * y - 2.0, (0.0, 2.0), 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        let r = solve_scalar_newton(|y| y * y - 2.0, |y| 2.0 * y, (0.0, 2.0), 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn missing_sign_change() {
        assert_eq!(
            solve_scalar(|y| y * y + 1.0, (0.0, 2.0), 1e-12),
            Err(Error::NoBracket { lo: 0.0, hi: 2.0 })
        );
    }

    #[test]
    fn newton_stays_in_bracket() {
        // flat derivative near the left end throws Newton far away
        let r = solve_scalar_newton(|y| y.atan() - 1.0, |y| 1.0 / (1.0 + y * y), (-50.0, 50.0), 1e-14)
            .unwrap();
        assert!((r - 1f64.tan()).abs() < 1e-12);
    }
}
