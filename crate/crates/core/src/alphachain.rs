//! From a solution α(y, t) of the reduced α-equation back to the
//! Monge-Ampère potential p(x, t).
//!
//! The chain is α → β (with `β_y = α`) → the gauge pair (A, B) → the
//! generating function W → the hodograph inversion `4x = α(p_x, t)`,
//! `p_t = W_y(p_x, t)`. Throughout, `y` stands for `p_x`.
//!
//! The integration constant B is tied to A by `B_t + k·A = 0`. Only `k = 6`
//! ([`GaugeConstraint::Corrected`]) makes the ratio `(6W_y − W_tt)/W_yy`
//! reproduce α; `k = 1` is kept as [`GaugeConstraint::Printed`] so the
//! mismatch can be measured.

use std::fmt;
use std::sync::Arc;

use crate::numcore::diff::richardson_steps;
use crate::numcore::{romberg, solve_scalar_newton, trapezoid_integrate, Grid1, Grid2, Jet, NumericDiff, Partial, ScalarField2};
use crate::plebanski4d::pf_residual_from_partials;
use crate::{Error, Result};

/// Relative tolerance of the quadratures used to build β, A and B.
const QUAD_TOL: f64 = 1e-13;
/// Root tolerance of the hodograph inversion.
const ROOT_TOL: f64 = 1e-14;

/// A function of time.
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// α over `(y, t)`.
#[derive(Clone, Debug)]
pub struct AlphaField(pub ScalarField2);

impl AlphaField {
    pub fn new(field: ScalarField2) -> Self {
        Self(field)
    }

    pub fn value(&self, y: f64, t: f64) -> f64 {
        self.0.value([y, t])
    }
}

/// β over `(y, t)` with `β_y = α`. The y-integration constant is fixed to
/// zero.
#[derive(Clone, Debug)]
pub struct BetaField(pub ScalarField2);

/// `α_tt + (α²/2)_yy + 8 − 6α_y`
pub fn alpha_residual(alpha: &AlphaField, y: f64, t: f64) -> Result<f64> {
    let j = alpha.0.jet([y, t])?;
    let (a, ay, ayy, att) = (j.value, j.grad[0], j.hess[0][0], j.hess[1][1]);
    Ok(att + ay * ay + a * ayy + 8.0 - 6.0 * ay)
}

/// `β_tt + (β_y²/2)_y + 8y − 6β_y − A_t(t)`
pub fn bbb_residual(beta: &BetaField, a_t: &dyn Fn(f64) -> f64, y: f64, t: f64) -> Result<f64> {
    let j = beta.0.jet([y, t])?;
    let (by, byy, btt) = (j.grad[0], j.hess[0][0], j.hess[1][1]);
    Ok(btt + by * byy + 8.0 * y - 6.0 * by - a_t(t))
}

/// Value and partials of `β(y, t) = ∫_{y0}^{y} α(s, t) ds`.
fn beta_jet(alpha: &ScalarField2, y0: f64, y: f64, t: f64) -> Result<Jet<f64, 2>> {
    let a = alpha.jet([y, t])?;
    let integral = |pick: fn(&Jet<f64, 2>) -> f64| {
        romberg(|s| alpha.jet([s, t]).map(|j| pick(&j)).unwrap_or(f64::NAN), y0, y, QUAD_TOL)
    };
    let value = integral(|j| j.value)?;
    let bt = integral(|j| j.grad[1])?;
    let btt = integral(|j| j.hess[1][1])?;
    Ok(Jet {
        value,
        grad: [a.value, bt],
        hess: [[a.grad[0], a.grad[1]], [a.grad[1], btt]],
    })
}

/// The result of [`beta_from_alpha`].
#[derive(Clone)]
pub struct BetaConstruction {
    pub beta: BetaField,
    /// `A_t(t)`, read off the `y = y0` row of the β-equation.
    pub a_t: TimeFn,
    pub y0: f64,
    /// Largest `|alpha_residual|` over the check grid.
    pub alpha_residual_max: f64,
    /// Largest `|bbb_residual|` over the check grid.
    pub gauge_defect_max: f64,
}

impl fmt::Debug for BetaConstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BetaConstruction")
            .field("y0", &self.y0)
            .field("alpha_residual_max", &self.alpha_residual_max)
            .field("gauge_defect_max", &self.gauge_defect_max)
            .finish()
    }
}

/// Integrates α in y from `y0` and fixes `A_t` so that the β-equation holds
/// on the `y0` row, then checks that it holds on every `(y, t)` of the grid
/// to `tol`.
pub fn beta_from_alpha(alpha: &AlphaField, y0: f64, t_grid: &Grid1, y_grid: &Grid1, tol: f64) -> Result<BetaConstruction> {
    let field = alpha.0.clone();
    let beta = BetaField(ScalarField2::exact(move |x| {
        match beta_jet(&field, y0, x[0].value, x[1].value) {
            Ok(j) => j.compose(&x),
            Err(_) => Jet::nan(),
        }
    }));
    let field = alpha.0.clone();
    let a_t: TimeFn = Arc::new(move |t| match field.jet([y0, t]) {
        Ok(j) => j.value * j.grad[0] + 8.0 * y0 - 6.0 * j.value,
        Err(_) => f64::NAN,
    });
    let mut alpha_residual_max: f64 = 0.0;
    let mut gauge_defect_max: f64 = 0.0;
    for t in t_grid.points() {
        for y in y_grid.points() {
            alpha_residual_max = alpha_residual_max.max(alpha_residual(alpha, y, t)?.abs());
            let defect = bbb_residual(&beta, a_t.as_ref(), y, t)?.abs();
            if !(defect <= tol) {
                return Err(Error::YDependentGauge { defect, y, t });
            }
            gauge_defect_max = gauge_defect_max.max(defect);
        }
    }
    Ok(BetaConstruction {
        beta,
        a_t,
        y0,
        alpha_residual_max,
        gauge_defect_max,
    })
}

/// How B is tied to A: `B_t + k·A = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaugeConstraint {
    /// `k = 6`, the value required for `(6W_y − W_tt)/W_yy = α`.
    Corrected,
    /// `k = 1`.
    Printed,
}

impl GaugeConstraint {
    pub fn factor(self) -> f64 {
        match self {
            Self::Corrected => 6.0,
            Self::Printed => 1.0,
        }
    }
}

/// The time-only functions A and B.
#[derive(Clone)]
pub struct Gauge {
    a: TimeFn,
    a_t: TimeFn,
    b: TimeFn,
    pub constraint: GaugeConstraint,
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gauge({:?})", self.constraint)
    }
}

impl Gauge {
    /// A, its derivative, and B given in closed form. The caller is
    /// responsible for `B_t = −k·A`; see [`Gauge::constraint_defect`].
    pub fn closed_form(a: TimeFn, a_t: TimeFn, b: TimeFn, constraint: GaugeConstraint) -> Self {
        Self { a, a_t, b, constraint }
    }

    /// `A = a0 + ∫_{t_ref}^t A_t`, `B = b0 − k ∫_{t_ref}^t A`.
    pub fn from_rate(a_t: TimeFn, t_ref: f64, a0: f64, b0: f64, constraint: GaugeConstraint) -> Self {
        let rate = a_t.clone();
        let a: TimeFn = Arc::new(move |t| a0 + romberg(|s| rate(s), t_ref, t, QUAD_TOL).unwrap_or(f64::NAN));
        let inner = a.clone();
        let k = constraint.factor();
        let b: TimeFn = Arc::new(move |t| b0 - k * romberg(|s| inner(s), t_ref, t, QUAD_TOL).unwrap_or(f64::NAN));
        Self { a, a_t, b, constraint }
    }

    /// The gauge of the linear family `α = 2y + c` with `y0 = 0`:
    /// `A = −4ct + a0`, `B = b0 − k(−2ct² + a0·t)`.
    pub fn linear_family(c: f64, a0: f64, b0: f64, constraint: GaugeConstraint) -> Self {
        let k = constraint.factor();
        Self {
            a: Arc::new(move |t| -4.0 * c * t + a0),
            a_t: Arc::new(move |_| -4.0 * c),
            b: Arc::new(move |t| b0 - k * (-2.0 * c * t * t + a0 * t)),
            constraint,
        }
    }

    pub fn a(&self, t: f64) -> f64 {
        (self.a)(t)
    }

    pub fn a_t(&self, t: f64) -> f64 {
        (self.a_t)(t)
    }

    pub fn b(&self, t: f64) -> f64 {
        (self.b)(t)
    }

    /// `B_t` as fixed by the constraint.
    pub fn b_t(&self, t: f64) -> f64 {
        -self.constraint.factor() * self.a(t)
    }

    /// `|B_t + k·A|` with `B_t` differentiated numerically from B's values.
    pub fn constraint_defect(&self, t: f64) -> Result<f64> {
        let b = |p: &[f64; 1]| self.b(p[0]);
        let h = NumericDiff::default().steps(&[t]);
        let bt = richardson_steps(&b, &[t], Partial::First(0), &h, 3)?;
        Ok((bt.value + self.constraint.factor() * self.a(t)).abs())
    }
}

/// W, known through `W_y` and `W_t`.
#[derive(Clone, Debug)]
pub enum GeneratingFunction {
    /// `W_y = (A − β_t)/4`, `W_t = (β_y²/2 − 6β + 4y² − B)/4`.
    FromBeta { beta: BetaField, gauge: Gauge },
    FromFields { w_y: ScalarField2, w_t: ScalarField2 },
}

/// First and second partials of W at a point. `w_yt = ∂_t W_y` and
/// `w_ty = ∂_y W_t` are kept apart so integrability can be checked.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WDerivs {
    pub w_y: f64,
    pub w_t: f64,
    pub w_yy: f64,
    pub w_yt: f64,
    pub w_ty: f64,
    pub w_tt: f64,
}

/// Builds W from β and the gauge pair.
pub fn w_from_beta(beta: &BetaField, gauge: &Gauge) -> GeneratingFunction {
    GeneratingFunction::FromBeta {
        beta: beta.clone(),
        gauge: gauge.clone(),
    }
}

impl GeneratingFunction {
    pub fn derivs(&self, y: f64, t: f64) -> Result<WDerivs> {
        match self {
            Self::FromBeta { beta, gauge } => {
                let j = beta.0.jet([y, t])?;
                let (b, by, bt) = (j.value, j.grad[0], j.grad[1]);
                let (byy, byt, btt) = (j.hess[0][0], j.hess[0][1], j.hess[1][1]);
                let a = gauge.a(t);
                let d = WDerivs {
                    w_y: (a - bt) / 4.0,
                    w_t: (0.5 * by * by - 6.0 * b + 4.0 * y * y - gauge.b(t)) / 4.0,
                    w_yy: -byt / 4.0,
                    w_yt: (gauge.a_t(t) - btt) / 4.0,
                    w_ty: (by * byy - 6.0 * by + 8.0 * y) / 4.0,
                    w_tt: (by * byt - 6.0 * bt - gauge.b_t(t)) / 4.0,
                };
                if [d.w_y, d.w_t, d.w_yt, d.w_tt].iter().all(|v| v.is_finite()) {
                    Ok(d)
                } else {
                    Err(Error::NonFiniteSample { point: vec![y, t] })
                }
            }
            Self::FromFields { w_y, w_t } => {
                let a = w_y.jet([y, t])?;
                let b = w_t.jet([y, t])?;
                Ok(WDerivs {
                    w_y: a.value,
                    w_t: b.value,
                    w_yy: a.grad[0],
                    w_yt: a.grad[1],
                    w_ty: b.grad[0],
                    w_tt: b.grad[1],
                })
            }
        }
    }

    /// `W_y(y, t)`
    pub fn w_y(&self, y: f64, t: f64) -> Result<f64> {
        match self {
            Self::FromBeta { beta, gauge } => Ok((gauge.a(t) - beta.0.jet([y, t])?.grad[1]) / 4.0),
            Self::FromFields { w_y, .. } => Ok(w_y.value([y, t])),
        }
    }

    /// `|∂_t W_y − ∂_y W_t|`
    pub fn integrability_defect(&self, y: f64, t: f64) -> Result<f64> {
        let d = self.derivs(y, t)?;
        Ok((d.w_yt - d.w_ty).abs())
    }
}

/// `(α_t + 4W_yy, α·α_y − 4W_yt − 6α + 8y)`
pub fn alpha_system_residual(alpha: &AlphaField, w: &GeneratingFunction, y: f64, t: f64) -> Result<(f64, f64)> {
    let a = alpha.0.jet([y, t])?;
    let d = w.derivs(y, t)?;
    Ok((
        a.grad[1] + 4.0 * d.w_yy,
        a.value * a.grad[0] - 4.0 * d.w_yt - 6.0 * a.value + 8.0 * y,
    ))
}

/// `p_xx = 4x/D`, `p_xt = (6W_y − W_tt)/D` with `D = W_ty + 6x − 2y`.
pub fn c_relations(w: &GeneratingFunction, y: f64, t: f64, x: f64) -> Result<(f64, f64)> {
    let d = w.derivs(y, t)?;
    let denom = d.w_ty + 6.0 * x - 2.0 * y;
    let scale = d.w_ty.abs().max((6.0 * x).abs()).max((2.0 * y).abs()).max(1.0);
    if denom.abs() < 1e-10 * scale {
        return Err(Error::DegenerateDenominator { value: denom, y, t });
    }
    Ok((4.0 * x / denom, (6.0 * d.w_y - d.w_tt) / denom))
}

/// `(6W_y − W_tt)/W_yy`, which is `4x` on the hodograph.
pub fn d_relation_alpha(w: &GeneratingFunction, y: f64, t: f64) -> Result<f64> {
    let d = w.derivs(y, t)?;
    let scale = d.w_y.abs().max(d.w_tt.abs()).max(1.0);
    if d.w_yy.abs() < 1e-12 * scale {
        return Err(Error::DegenerateHessian { value: d.w_yy, y, t });
    }
    Ok((6.0 * d.w_y - d.w_tt) / d.w_yy)
}

/// [`d_relation_alpha`], falling back to α itself where `W_yy` vanishes.
/// The flag reports whether the fallback was used.
pub fn d_relation_or_alpha(w: &GeneratingFunction, alpha: &AlphaField, y: f64, t: f64) -> Result<(f64, bool)> {
    match d_relation_alpha(w, y, t) {
        Ok(v) => Ok((v, false)),
        Err(Error::DegenerateHessian { .. }) => Ok((alpha.value(y, t), true)),
        Err(e) => Err(e),
    }
}

/// Output of [`hodograph_reconstruct`]. Samples are stored row by row in t.
#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub grid: Grid2,
    pub p: Vec<f64>,
    pub p_x: Vec<f64>,
    pub p_t: Vec<f64>,
    /// `max |∂_t p_x − ∂_x p_t|` over interior points.
    pub compat_defect: f64,
    /// `max |pf_residual|` over interior points.
    pub pf_resid: f64,
    pub pf_rms: f64,
    /// `(x, t)` of the largest Monge-Ampère residual.
    pub worst_point: [f64; 2],
    /// Largest defect of `p_tx = W_yy p_xx` and `p_tt = W_yy p_tx + W_yt`.
    pub eq_a_defect: f64,
    pub interior_points: usize,
}

impl ReconstructionResult {
    fn index(&self, ix: usize, it: usize) -> usize {
        it * self.grid.axis1.len() + ix
    }

    pub fn p_at(&self, ix: usize, it: usize) -> f64 {
        self.p[self.index(ix, it)]
    }

    pub fn p_x_at(&self, ix: usize, it: usize) -> f64 {
        self.p_x[self.index(ix, it)]
    }
}

struct Hodograph<'a> {
    alpha: &'a AlphaField,
    w: &'a GeneratingFunction,
    bracket: (f64, f64),
}

impl Hodograph<'_> {
    /// `p_x(x, t)`: the root of `α(y, t) = 4x`.
    fn p_x(&self, x: f64, t: f64) -> Result<f64> {
        let f = &self.alpha.0;
        solve_scalar_newton(
            |y| f.value([y, t]) - 4.0 * x,
            |y| f.jet([y, t]).map(|j| j.grad[0]).unwrap_or(f64::NAN),
            self.bracket,
            ROOT_TOL,
        )
    }

    fn p_t(&self, x: f64, t: f64) -> Result<f64> {
        self.w.w_y(self.p_x(x, t)?, t)
    }

    fn check_monotone(&self, t: f64) -> Result<()> {
        const SAMPLES: usize = 65;
        let (lo, hi) = self.bracket;
        let (mut pos, mut neg) = (false, false);
        for k in 0..SAMPLES {
            let y = lo + (hi - lo) * k as f64 / (SAMPLES - 1) as f64;
            let ay = self.alpha.0.jet([y, t])?.grad[0];
            pos |= ay > 0.0;
            neg |= ay < 0.0;
        }
        if pos && neg || !(pos || neg) {
            return Err(Error::NonMonotone { t });
        }
        Ok(())
    }

    fn derivative(&self, which: fn(&Self, f64, f64) -> Result<f64>, x: f64, t: f64, axis: usize) -> Result<f64> {
        let g = |p: &[f64; 2]| which(self, p[0], p[1]).unwrap_or(f64::NAN);
        let h = NumericDiff::default().steps(&[x, t]).map(|s| 0.1 * s);
        Ok(richardson_steps(&g, &[x, t], Partial::First(axis), &h, 2)?.value)
    }
}

/// Inverts `4x = α(y, t)` for `y = p_x` on every grid point, sets
/// `p_t = W_y(p_x, t)` and integrates p. Defects are measured at points at
/// least two grid steps from every edge.
pub fn hodograph_reconstruct(
    alpha: &AlphaField,
    w: &GeneratingFunction,
    grid: &Grid2,
    bracket: (f64, f64),
) -> Result<ReconstructionResult> {
    let (xs, ts) = (grid.axis1.points(), grid.axis2.points());
    if xs.len() < 5 || ts.len() < 5 {
        return Err(Error::BadGrid("reconstruction needs at least 5 points per axis".into()));
    }
    let h = Hodograph { alpha, w, bracket };
    let mut p_x = Vec::with_capacity(xs.len() * ts.len());
    let mut p_t = Vec::with_capacity(xs.len() * ts.len());
    for &t in &ts {
        h.check_monotone(t)?;
        for &x in &xs {
            let y = h.p_x(x, t)?;
            p_x.push(y);
            p_t.push(w.w_y(y, t)?);
        }
    }
    let nx = xs.len();
    let edge: Vec<(f64, f64)> = ts.iter().enumerate().map(|(j, &t)| (t, p_t[j * nx])).collect();
    let row_constants = trapezoid_integrate(&edge)?;
    let mut p = Vec::with_capacity(p_x.len());
    for (j, &(_, c0)) in row_constants.iter().enumerate() {
        let row: Vec<(f64, f64)> = xs.iter().enumerate().map(|(i, &x)| (x, p_x[j * nx + i])).collect();
        p.extend(trapezoid_integrate(&row)?.into_iter().map(|(_, v)| c0 + v));
    }

    let (mut compat, mut pf_max, mut pf_sq, mut eq_a) = (0.0f64, 0.0f64, 0.0, 0.0f64);
    let mut worst = [xs[2], ts[2]];
    let mut count = 0;
    for &t in &ts[2..ts.len() - 2] {
        for &x in &xs[2..nx - 2] {
            let y = h.p_x(x, t)?;
            let pxx = h.derivative(Hodograph::p_x, x, t, 0)?;
            let pxt = h.derivative(Hodograph::p_x, x, t, 1)?;
            let ptx = h.derivative(Hodograph::p_t, x, t, 0)?;
            let ptt = h.derivative(Hodograph::p_t, x, t, 1)?;
            compat = compat.max((pxt - ptx).abs());
            let r = pf_residual_from_partials(x, y, pxx, pxt, ptt).abs();
            if r > pf_max {
                pf_max = r;
                worst = [x, t];
            }
            pf_sq += r * r;
            let d = w.derivs(y, t)?;
            eq_a = eq_a
                .max((ptx - d.w_yy * pxx).abs())
                .max((ptt - d.w_yy * ptx - d.w_yt).abs());
            count += 1;
        }
    }
    Ok(ReconstructionResult {
        grid: *grid,
        p,
        p_x,
        p_t,
        compat_defect: compat,
        pf_resid: pf_max,
        pf_rms: (pf_sq / count as f64).sqrt(),
        worst_point: worst,
        eq_a_defect: eq_a,
        interior_points: count,
    })
}

/// Everything [`build_chain`] produces from α.
#[derive(Clone, Debug)]
pub struct Chain {
    pub beta: BetaConstruction,
    pub gauge: Gauge,
    pub w: GeneratingFunction,
}

/// Gauge choices for [`build_chain`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaugeChoice {
    pub y0: f64,
    pub t_ref: f64,
    pub a0: f64,
    pub b0: f64,
    pub constraint: GaugeConstraint,
}

impl GaugeChoice {
    pub fn new(t_ref: f64, constraint: GaugeConstraint) -> Self {
        Self {
            y0: 0.0,
            t_ref,
            a0: 0.0,
            b0: 0.0,
            constraint,
        }
    }
}

/// `beta_from_alpha` followed by `w_from_beta` with the gauge integrated
/// from `A_t`.
pub fn build_chain(alpha: &AlphaField, choice: GaugeChoice, t_grid: &Grid1, y_grid: &Grid1, tol: f64) -> Result<Chain> {
    let beta = beta_from_alpha(alpha, choice.y0, t_grid, y_grid, tol)?;
    let gauge = Gauge::from_rate(beta.a_t.clone(), choice.t_ref, choice.a0, choice.b0, choice.constraint);
    let w = w_from_beta(&beta.beta, &gauge);
    Ok(Chain { beta, gauge, w })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_alpha(a: f64, b: f64, c: f64) -> AlphaField {
        AlphaField(ScalarField2::exact(move |[y, t]| y * a + t * b + c))
    }

    /// `−y²/t² + 2y + c₁t² + c₂/t`
    fn automodel_alpha(c1: f64, c2: f64) -> AlphaField {
        AlphaField(ScalarField2::exact(move |[y, t]| {
            -(y * y) / (t * t) + y * 2.0 + t * t * c1 + t.recip() * c2
        }))
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Grid1 {
        Grid1::new(lo, hi, n).unwrap()
    }

    #[test]
    fn alpha_residual_examples() {
        assert_eq!(alpha_residual(&linear_alpha(0.0, 0.0, 0.0), 0.3, 0.7).unwrap(), 8.0);
        for (a, b, c) in [(2.0, 1.3, -0.4), (4.0, -2.0, 5.0), (2.0, 0.0, 0.0)] {
            assert!(alpha_residual(&linear_alpha(a, b, c), 0.9, -1.1).unwrap().abs() < 1e-13);
        }
        for (c1, c2) in [(1.0, 0.0), (-0.7, 2.5), (0.0, -1.0)] {
            for (y, t) in [(0.3, 1.2), (-1.0, 0.6), (2.0, -1.5)] {
                let r = alpha_residual(&automodel_alpha(c1, c2), y, t).unwrap();
                assert!(r.abs() < 1e-11, "{r}");
            }
        }
    }

    #[test]
    fn bbb_residual_examples() {
        let c = 0.8;
        let beta = BetaField(ScalarField2::exact(move |[y, _]| y * y + y * c));
        for (y, t) in [(0.0, 0.0), (1.3, -0.2), (-2.0, 4.0)] {
            assert!(bbb_residual(&beta, &|_| -4.0 * c, y, t).unwrap().abs() < 1e-13);
        }
        let zero = BetaField(ScalarField2::exact(|[y, _]| y * 0.0));
        assert_eq!(bbb_residual(&zero, &|_| 0.0, 0.5, 1.0).unwrap(), 4.0);
    }

    #[test]
    fn y_derivative_of_bbb_is_alpha_residual() {
        let alpha = automodel_alpha(0.4, 0.3);
        let beta = beta_from_alpha(&alpha, 0.0, &grid(1.0, 1.2, 3), &grid(0.0, 0.5, 3), 1e-6).unwrap();
        let (y, t) = (0.7, 1.3);
        let g = |p: &[f64; 2]| bbb_residual(&beta.beta, beta.a_t.as_ref(), p[0], p[1]).unwrap();
        let d = richardson_steps(&g, &[y, t], Partial::First(0), &[0.05, 0.05], 3).unwrap();
        let expected = alpha_residual(&alpha, y, t).unwrap();
        assert!((d.value - expected).abs() < 1e-7);
        // a non-solution too
        let alpha = AlphaField(ScalarField2::exact(|[y, t]| (y * t).sin() + y * y));
        let beta = beta_from_alpha(&alpha, 0.0, &grid(1.0, 1.1, 2), &grid(0.0, 0.1, 2), 1e9).unwrap();
        let g = |p: &[f64; 2]| bbb_residual(&beta.beta, beta.a_t.as_ref(), p[0], p[1]).unwrap();
        let d = richardson_steps(&g, &[y, t], Partial::First(0), &[0.05, 0.05], 3).unwrap();
        assert!((d.value - alpha_residual(&alpha, y, t).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn beta_from_linear_alpha() {
        let c = -1.5;
        let b = beta_from_alpha(&linear_alpha(2.0, 0.0, c), 0.0, &grid(0.0, 1.0, 5), &grid(-1.0, 1.0, 5), 1e-10).unwrap();
        for (y, t) in [(0.5, 0.0), (-0.8, 0.7)] {
            assert!((b.beta.0.value([y, t]) - (y * y + c * y)).abs() < 1e-13);
            assert!(((b.a_t)(t) + 4.0 * c).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_alpha_is_rejected() {
        let err = beta_from_alpha(&linear_alpha(0.0, 0.0, 0.0), 0.0, &grid(0.0, 1.0, 3), &grid(0.0, 1.0, 3), 1e-6)
            .unwrap_err();
        assert!(matches!(err, Error::YDependentGauge { .. }));
        let b = beta_from_alpha(&linear_alpha(0.0, 0.0, 0.0), 0.5, &grid(0.0, 1.0, 2), &grid(0.0, 1.0, 2), 1e9).unwrap();
        assert_eq!((b.a_t)(0.3), 4.0);
    }

    #[test]
    fn automodel_beta_is_y_independent() {
        let b = beta_from_alpha(&automodel_alpha(1.0, 0.0), 0.0, &grid(1.0, 2.0, 6), &grid(0.0, 1.0, 6), 1e-6).unwrap();
        assert!(b.gauge_defect_max <= 1e-6);
        assert!(b.alpha_residual_max <= 1e-10);
        // A_t = −4 c t² for this family
        assert!(((b.a_t)(1.5) + 4.0 * 2.25).abs() < 1e-12);
    }

    #[test]
    fn w_from_linear_beta() {
        let (c, a0, b0) = (0.7, 0.4, -0.3);
        let beta = BetaField(ScalarField2::exact(move |[y, _]| y * y + y * c));
        let gauge = Gauge::linear_family(c, a0, b0, GaugeConstraint::Printed);
        let w = w_from_beta(&beta, &gauge);
        for (y, t) in [(0.2, 0.5), (-1.0, 1.5)] {
            let d = w.derivs(y, t).unwrap();
            assert!((d.w_y - (-4.0 * c * t + a0) / 4.0).abs() < 1e-14);
            let wt = (-4.0 * c * y + c * c / 2.0 - 2.0 * c * t * t + a0 * t - b0) / 4.0;
            assert!((d.w_t - wt).abs() < 1e-14);
            assert!((d.w_yt + c).abs() < 1e-14 && (d.w_ty + c).abs() < 1e-14);
            assert!(gauge.constraint_defect(t).unwrap() < 1e-8);
        }
        let zero = BetaField(ScalarField2::exact(|[y, _]| y * 0.0));
        let w0 = w_from_beta(&zero, &Gauge::linear_family(0.0, 0.0, 0.0, GaugeConstraint::Printed));
        let d = w0.derivs(0.5, 0.0).unwrap();
        assert_eq!((d.w_y, d.w_t), (0.0, 0.25));
        assert!((w0.integrability_defect(0.5, 0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauge_shift_and_the_constraint_factor() {
        let c = 0.6;
        let beta = BetaField(ScalarField2::exact(move |[y, _]| y * y + y * c));
        let (y, t) = (0.9, 0.8);
        let x = (2.0 * y + c) / 4.0;
        let rel = |a0: f64, k| c_relations(&w_from_beta(&beta, &Gauge::linear_family(c, a0, 0.0, k)), y, t, x).unwrap();
        let (base, shifted) = (rel(0.0, GaugeConstraint::Corrected), rel(0.9, GaugeConstraint::Corrected));
        assert!((base.0 - shifted.0).abs() < 1e-14 && (base.1 - shifted.1).abs() < 1e-14);
        let (base, shifted) = (rel(0.0, GaugeConstraint::Printed), rel(0.9, GaugeConstraint::Printed));
        assert!((base.1 - shifted.1).abs() > 0.1);
    }

    #[test]
    fn alpha_system_on_linear_chain() {
        let c = -0.4;
        let alpha = linear_alpha(2.0, 0.0, c);
        let beta = BetaField(ScalarField2::exact(move |[y, _]| y * y + y * c));
        for k in [GaugeConstraint::Corrected, GaugeConstraint::Printed] {
            let w = w_from_beta(&beta, &Gauge::linear_family(c, 0.3, 0.1, k));
            let (r1, r2) = alpha_system_residual(&alpha, &w, 0.7, 1.1).unwrap();
            assert!(r1.abs() < 1e-14 && r2.abs() < 1e-13);
        }
        let zero_w = GeneratingFunction::FromFields {
            w_y: ScalarField2::exact(|[y, _]| y * 0.0),
            w_t: ScalarField2::exact(|[y, _]| y * 0.0),
        };
        let (r1, r2) = alpha_system_residual(&linear_alpha(0.0, 0.0, 0.0), &zero_w, 1.0, 0.0).unwrap();
        assert_eq!((r1, r2), (0.0, 8.0));
    }

    #[test]
    fn c_relation_examples() {
        let beta = BetaField(ScalarField2::exact(|[y, _]| y * y));
        let w = w_from_beta(&beta, &Gauge::linear_family(0.0, 0.0, 0.0, GaugeConstraint::Corrected));
        let (x, t) = (0.7, 0.3);
        let (pxx, pxt) = c_relations(&w, 2.0 * x, t, x).unwrap();
        assert!((pxx - 2.0).abs() < 1e-14 && pxt.abs() < 1e-14);

        let w = GeneratingFunction::FromFields {
            w_y: ScalarField2::exact(|[y, _]| y * 0.0),
            w_t: ScalarField2::exact(|[y, t]| y * y * 0.5 + t * 0.0),
        };
        let (_, pxt) = c_relations(&w, 0.4, 0.0, 1.3).unwrap();
        assert_eq!(pxt, 0.0);
        // W_ty = y, so D = y + 6x − 2y vanishes at y = 6x
        assert!(matches!(c_relations(&w, 6.0, 0.0, 1.0), Err(Error::DegenerateDenominator { .. })));
    }

    #[test]
    fn d_relation_examples() {
        let w = GeneratingFunction::FromFields {
            w_y: ScalarField2::exact(|[y, _]| y),
            w_t: ScalarField2::exact(|[y, _]| y * 0.0),
        };
        assert!((d_relation_alpha(&w, 0.7, 2.0).unwrap() - 4.2).abs() < 1e-14);

        let alpha = linear_alpha(2.0, 0.0, 0.5);
        let beta = BetaField(ScalarField2::exact(|[y, _]| y * y + y * 0.5));
        let w = w_from_beta(&beta, &Gauge::linear_family(0.5, 0.0, 0.0, GaugeConstraint::Corrected));
        assert!(matches!(d_relation_alpha(&w, 0.3, 0.2), Err(Error::DegenerateHessian { .. })));
        let (v, fallback) = d_relation_or_alpha(&w, &alpha, 0.3, 0.2).unwrap();
        assert!(fallback && (v - 1.1).abs() < 1e-15);
    }

    fn automodel_chain(constraint: GaugeConstraint) -> (AlphaField, Chain) {
        let alpha = automodel_alpha(1.0, 0.0);
        let chain = build_chain(
            &alpha,
            GaugeChoice::new(1.0, constraint),
            &grid(1.0, 1.5, 4),
            &grid(-1.0, 0.9, 4),
            1e-6,
        )
        .unwrap();
        (alpha, chain)
    }

    #[test]
    fn d_relation_recovers_alpha_only_with_the_corrected_constraint() {
        let (alpha, chain) = automodel_chain(GaugeConstraint::Corrected);
        for (y, t) in [(0.3, 1.2), (-0.5, 1.4), (0.1, 1.05)] {
            let d = d_relation_alpha(&chain.w, y, t).unwrap();
            assert!((d - alpha.value(y, t)).abs() < 1e-6, "{d}");
            assert!(chain.w.integrability_defect(y, t).unwrap() < 1e-9);
            let (r1, r2) = alpha_system_residual(&alpha, &chain.w, y, t).unwrap();
            assert!(r1.abs() < 1e-9 && r2.abs() < 1e-9);
            assert!(chain.gauge.constraint_defect(t).unwrap() < 1e-8);
        }
        let (alpha, chain) = automodel_chain(GaugeConstraint::Printed);
        let d = d_relation_alpha(&chain.w, 0.3, 1.2).unwrap();
        assert!((d - alpha.value(0.3, 1.2)).abs() > 1e-3);
    }

    #[test]
    fn c_relations_match_equation_a_on_the_chain() {
        let (alpha, chain) = automodel_chain(GaugeConstraint::Corrected);
        let (y, t) = (0.2, 1.3);
        let x = alpha.value(y, t) / 4.0;
        let (pxx, pxt) = c_relations(&chain.w, y, t, x).unwrap();
        let d = chain.w.derivs(y, t).unwrap();
        assert!((pxt - d.w_yy * pxx).abs() < 1e-9);
    }

    #[test]
    fn linear_reconstruction_matches_closed_form() {
        let (c, a0) = (0.6, 0.8);
        let alpha = linear_alpha(2.0, 0.0, c);
        let beta = BetaField(ScalarField2::exact(move |[y, _]| y * y + y * c));
        let w = w_from_beta(&beta, &Gauge::linear_family(c, a0, 0.0, GaugeConstraint::Corrected));
        let g = Grid2::new(grid(1.0, 2.0, 11), grid(0.0, 1.0, 11));
        let res = hodograph_reconstruct(&alpha, &w, &g, (-10.0, 10.0)).unwrap();
        assert!(res.pf_resid <= 1e-8, "{}", res.pf_resid);
        assert!(res.compat_defect <= 1e-8);
        assert!(res.eq_a_defect <= 1e-8);
        let exact = |x: f64, t: f64| x * x - c / 2.0 * x - c / 2.0 * t * t + a0 / 4.0 * t;
        let (xs, ts) = (g.axis1.points(), g.axis2.points());
        for (j, &t) in ts.iter().enumerate() {
            for (i, &x) in xs.iter().enumerate() {
                let lhs = res.p_at(i, j) - res.p_at(0, 0);
                let rhs = exact(x, t) - exact(xs[0], ts[0]);
                assert!((lhs - rhs).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn four_y_gives_half_x_squared() {
        let alpha = linear_alpha(4.0, 0.0, 0.0);
        let beta = BetaField(ScalarField2::exact(|[y, _]| y * y * 2.0));
        let w = w_from_beta(&beta, &Gauge::linear_family(0.0, 0.0, 0.0, GaugeConstraint::Corrected));
        let g = Grid2::new(grid(0.5, 1.5, 7), grid(0.0, 1.0, 7));
        let res = hodograph_reconstruct(&alpha, &w, &g, (-5.0, 5.0)).unwrap();
        assert!((res.p_x_at(3, 3) - 1.0).abs() < 1e-13);
        assert!((res.p_at(6, 6) - res.p_at(0, 0) - (1.5f64.powi(2) - 0.25) / 2.0).abs() < 1e-12);
        assert!(res.pf_resid < 1e-8);
    }

    #[test]
    fn automodel_chain_closes() {
        let (alpha, chain) = automodel_chain(GaugeConstraint::Corrected);
        let g = Grid2::new(grid(0.05, 0.45, 9), grid(1.0, 1.5, 9));
        let res = hodograph_reconstruct(&alpha, &chain.w, &g, (-1.0, 0.9)).unwrap();
        assert!(res.pf_resid <= 1e-6, "{}", res.pf_resid);
        assert!(res.compat_defect <= 1e-7, "{}", res.compat_defect);
        assert!(res.eq_a_defect <= 1e-6, "{}", res.eq_a_defect);
        assert_eq!(res.interior_points, 25);
    }

    #[test]
    fn fold_is_non_monotone() {
        let alpha = automodel_alpha(1.0, 0.0);
        let w = GeneratingFunction::FromFields {
            w_y: ScalarField2::exact(|[y, _]| y * 0.0),
            w_t: ScalarField2::exact(|[y, _]| y * 0.0),
        };
        let g = Grid2::new(grid(0.1, 0.2, 5), grid(1.0, 1.1, 5));
        assert_eq!(
            hodograph_reconstruct(&alpha, &w, &g, (0.0, 2.0)).unwrap_err(),
            Error::NonMonotone { t: 1.0 }
        );
        let g = Grid2::new(grid(5.0, 6.0, 5), grid(1.0, 1.1, 5));
        assert!(matches!(
            hodograph_reconstruct(&alpha, &w, &g, (-1.0, 0.9)),
            Err(Error::NoBracket { .. })
        ));
    }
}
