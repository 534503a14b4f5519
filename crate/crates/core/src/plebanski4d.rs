//! The Plebanski equation on the real slice of the complex chart `(y, z)`,
//! the spherical ansatz `P = ȳ⁻² p(x, t)`, and the reduced scalar equations.
//!
//! Four-dimensional fields are functions of the real coordinates
//! `(Re y, Im y, Re z, Im z)`; Wirtinger derivatives are assembled from their
//! real partials with `∂_y = ½(∂_{Re y} − i ∂_{Im y})`.

use num_complex::Complex64;

use crate::numcore::{Field, Jet, NumericDiff, ScalarField2};
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A point of the complex chart. `ȳ`, `z̄` are the conjugates of `y`, `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point4C {
    pub y: Complex64,
    pub z: Complex64,
}

impl Point4C {
    pub fn new(y: Complex64, z: Complex64) -> Self {
        Self { y, z }
    }

    pub fn from_coords(c: [f64; 4]) -> Self {
        Self {
            y: Complex64::new(c[0], c[1]),
            z: Complex64::new(c[2], c[3]),
        }
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.y.re, self.y.im, self.z.re, self.z.im]
    }

    pub fn y_bar(&self) -> Complex64 {
        self.y.conj()
    }

    /// `x = yȳ + ((z + z̄)/2)²`
    pub fn x(&self) -> f64 {
        self.y.norm_sqr() + self.z.re * self.z.re
    }

    pub fn r(&self) -> f64 {
        self.x().sqrt()
    }

    /// `t = (z − z̄)/(2i)`
    pub fn t(&self) -> f64 {
        self.z.im
    }
}

/// First and second Wirtinger derivatives of a scalar field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wirtinger {
    pub d_y: Complex64,
    pub d_ybar: Complex64,
    pub d_z: Complex64,
    pub d_zbar: Complex64,
    pub d_yy: Complex64,
    pub d_zz: Complex64,
    pub d_yz: Complex64,
    pub d_yybar: Complex64,
    pub d_zzbar: Complex64,
}

impl Wirtinger {
    /// From partials in `(Re y, Im y, Re z, Im z)`.
    pub fn from_jet(j: &Jet<Complex64, 4>) -> Self {
        let g = &j.grad;
        let h = &j.hess;
        Self {
            d_y: 0.5 * (g[0] - I * g[1]),
            d_ybar: 0.5 * (g[0] + I * g[1]),
            d_z: 0.5 * (g[2] - I * g[3]),
            d_zbar: 0.5 * (g[2] + I * g[3]),
            d_yy: 0.25 * (h[0][0] - 2.0 * I * h[0][1] - h[1][1]),
            d_zz: 0.25 * (h[2][2] - 2.0 * I * h[2][3] - h[3][3]),
            d_yz: 0.25 * (h[0][2] - I * h[0][3] - I * h[1][2] - h[1][3]),
            d_yybar: 0.25 * (h[0][0] + h[1][1]),
            d_zzbar: 0.25 * (h[2][2] + h[3][3]),
        }
    }
}

/// A complex scalar field on the chart.
#[derive(Clone, Debug)]
pub struct PlebanskiField {
    pub field: Field<4, Complex64>,
    /// Set for lifted fields, whose ansatz is singular on `y = 0`.
    singular_at_y_zero: bool,
}

impl PlebanskiField {
    pub fn new(field: Field<4, Complex64>) -> Self {
        Self {
            field,
            singular_at_y_zero: false,
        }
    }

    /// A closed-form field written in terms of `(y, ȳ, z, z̄)` jets.
    pub fn closed_form(
        f: impl Fn(ChartJets) -> Jet<Complex64, 4> + Send + Sync + 'static,
    ) -> Self {
        Self::new(Field::exact(move |c| f(ChartJets::from_real(c))))
    }

    pub fn value(&self, at: &Point4C) -> Complex64 {
        self.field.value(at.coords())
    }

    pub fn wirtinger(&self, at: &Point4C) -> Result<Wirtinger> {
        if self.singular_at_y_zero && at.y == Complex64::new(0.0, 0.0) {
            return Err(Error::AnsatzSingular("y = 0".into()));
        }
        Ok(Wirtinger::from_jet(&self.field.jet(at.coords())?))
    }
}

/// The complex coordinates as jets over the real coordinates.
#[derive(Clone, Copy, Debug)]
pub struct ChartJets {
    pub y: Jet<Complex64, 4>,
    pub y_bar: Jet<Complex64, 4>,
    pub z: Jet<Complex64, 4>,
    pub z_bar: Jet<Complex64, 4>,
}

impl ChartJets {
    pub fn from_real(c: [Jet<Complex64, 4>; 4]) -> Self {
        let [a, b, cc, d] = c;
        let ib = b.scale(I);
        let id = d.scale(I);
        Self {
            y: a + ib,
            y_bar: a - ib,
            z: cc + id,
            z_bar: cc - id,
        }
    }

    /// `x = yȳ + ((z + z̄)/2)²`
    pub fn x(&self) -> Jet<Complex64, 4> {
        let half = (self.z + self.z_bar) * 0.5;
        self.y * self.y_bar + half * half
    }

    /// `t = (z − z̄)/(2i)`
    pub fn t(&self) -> Jet<Complex64, 4> {
        (self.z - self.z_bar).scale(Complex64::new(0.0, -0.5))
    }
}

/// `P_yȳ + P_zz̄ − (P_yy P_zz − P_yz²)`
pub fn plebanski_residual(p: &PlebanskiField, at: &Point4C) -> Result<Complex64> {
    let w = p.wirtinger(at)?;
    Ok(w.d_yybar + w.d_zzbar - (w.d_yy * w.d_zz - w.d_yz * w.d_yz))
}

/// A real field `p(x, t)`, defined for `x > 0`.
#[derive(Clone, Debug)]
pub struct ReducedScalar(pub ScalarField2);

impl ReducedScalar {
    pub fn new(field: ScalarField2) -> Self {
        Self(field)
    }

    fn partials(&self, x: f64, t: f64) -> Result<Jet<f64, 2>> {
        if !(x > 0.0) {
            return Err(Error::InvalidParams(format!("reduced fields need x > 0, got {x}")));
        }
        self.0.jet([x, t])
    }
}

/// How the lift obtains the partials of `P`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LiftMode {
    /// Partials of `p` (exact or numeric, as `p` provides them) pushed
    /// through the ansatz by the chain rule.
    ChainRule,
    /// Finite differences of the lifted values in the four real coordinates.
    Numeric(NumericDiff),
}

/// `P = ȳ⁻² p(x, t)`.
pub fn lift_p(p: &ReducedScalar, mode: LiftMode) -> PlebanskiField {
    let p = p.0.clone();
    let field = match mode {
        LiftMode::ChainRule => Field::exact(move |c| {
            let chart = ChartJets::from_real(c);
            let (x, t) = (chart.x(), chart.t());
            let outer = match p.jet([x.value.re, t.value.re]) {
                Ok(j) => j.complexify(),
                Err(_) => return Jet::nan(),
            };
            chart.y_bar.powi(-2) * outer.compose(&[x, t])
        }),
        LiftMode::Numeric(diff) => Field::numeric(
            move |c| {
                let pt = Point4C::from_coords(c);
                pt.y_bar().powi(-2) * p.value([pt.x(), pt.t()])
            },
            diff,
        ),
    };
    PlebanskiField {
        field,
        singular_at_y_zero: true,
    }
}

/// `p_xx p_tt − p_xt² − (2p_x p_xx + 2p_x − p_tt − 4x p_xx)`
pub fn intermediate_residual(p: &ReducedScalar, x: f64, t: f64) -> Result<f64> {
    let j = p.partials(x, t)?;
    let (px, pxx, pxt, ptt) = (j.grad[0], j.hess[0][0], j.hess[0][1], j.hess[1][1]);
    Ok(pxx * ptt - pxt * pxt - (2.0 * px * pxx + 2.0 * px - ptt - 4.0 * x * pxx))
}

/// Residual of the nonhomogeneous Monge-Ampère form:
/// `p_xx p_tt − p_xt² − (2p_x p_xx − 6x p_xx + 4x)`.
pub fn pf_residual(p: &ReducedScalar, x: f64, t: f64) -> Result<f64> {
    let j = p.partials(x, t)?;
    Ok(pf_residual_from_partials(x, j.grad[0], j.hess[0][0], j.hess[0][1], j.hess[1][1]))
}

pub fn pf_residual_from_partials(x: f64, px: f64, pxx: f64, pxt: f64, ptt: f64) -> f64 {
    pxx * ptt - pxt * pxt - (2.0 * px * pxx - 6.0 * x * pxx + 4.0 * x)
}

/// `p ↦ p − x²/2`; takes Monge-Ampère solutions to solutions of the
/// intermediate equation.
pub fn shift_map(p: &ReducedScalar) -> ReducedScalar {
    ReducedScalar(p.0.plus_closed_form(|[x, _]| x * x * -0.5))
}

/// Inverse of [`shift_map`].
pub fn unshift_map(p: &ReducedScalar) -> ReducedScalar {
    ReducedScalar(p.0.plus_closed_form(|[x, _]| x * x * 0.5))
}

/// `F = p_x² − 6(x p_x − p) + 2x²`
pub fn compute_f(p: &ReducedScalar, x: f64, t: f64) -> Result<f64> {
    let j = p.0.jet([x, t])?;
    let px = j.grad[0];
    Ok(px * px - 6.0 * (x * px - j.value) + 2.0 * x * x)
}

/// Least-squares fit of `plebanski_residual(lift(p)) = k · ȳ⁻² · intermediate_residual(p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftFit {
    pub constant: Complex64,
    pub max_abs_misfit: f64,
    pub rms_misfit: f64,
    pub samples: usize,
}

pub fn fit_lift_constant(
    fields: &[ReducedScalar],
    points: &[Point4C],
    mode: LiftMode,
) -> Result<LiftFit> {
    let mut pairs = Vec::with_capacity(fields.len() * points.len());
    for p in fields {
        let lifted = lift_p(p, mode);
        for pt in points {
            let full = plebanski_residual(&lifted, pt)?;
            let reduced = pt.y_bar().powi(-2) * intermediate_residual(p, pt.x(), pt.t())?;
            pairs.push((reduced, full));
        }
    }
    let num: Complex64 = pairs.iter().map(|(g, r)| g.conj() * r).sum();
    let den: f64 = pairs.iter().map(|(g, _)| g.norm_sqr()).sum();
    if den == 0.0 {
        return Err(Error::InvalidParams("all reduced residuals vanish; nothing to fit".into()));
    }
    let k = num / den;
    let misfits: Vec<f64> = pairs.iter().map(|(g, r)| (r - k * g).norm()).collect();
    Ok(LiftFit {
        constant: k,
        max_abs_misfit: misfits.iter().copied().fold(0.0, f64::max),
        rms_misfit: (misfits.iter().map(|m| m * m).sum::<f64>() / misfits.len() as f64).sqrt(),
        samples: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::NumericDiff;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reduced(f: impl Fn([Jet<f64, 2>; 2]) -> Jet<f64, 2> + Send + Sync + 'static) -> ReducedScalar {
        ReducedScalar(ScalarField2::exact(f))
    }

    #[test]
    fn product_yz_has_unit_residual() {
        let p = PlebanskiField::closed_form(|ch| ch.y * ch.z);
        let r = plebanski_residual(&p, &Point4C::new(c(0.3, -0.7), c(1.1, 0.4))).unwrap();
        assert!((r - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn sum_of_norms_has_residual_two() {
        let p = PlebanskiField::closed_form(|ch| ch.y * ch.y_bar + ch.z * ch.z_bar);
        let r = plebanski_residual(&p, &Point4C::new(c(-0.2, 0.5), c(0.9, -1.3))).unwrap();
        assert!((r - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn numeric_mode_matches_closed_form() {
        let exact = PlebanskiField::closed_form(|ch| ch.y * ch.z + ch.y_bar * ch.y_bar * ch.z);
        let numeric = PlebanskiField::new(exact.field.to_numeric(NumericDiff::default()));
        let pt = Point4C::new(c(0.4, 0.2), c(-0.3, 0.8));
        let a = plebanski_residual(&exact, &pt).unwrap();
        let b = plebanski_residual(&numeric, &pt).unwrap();
        assert!((a - b).norm() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn zero_lift_is_zero() {
        let p = reduced(|[x, _]| x * 0.0);
        let lifted = lift_p(&p, LiftMode::ChainRule);
        let w = lifted.wirtinger(&Point4C::new(c(0.5, 0.5), c(0.1, 0.2))).unwrap();
        assert_eq!(w.d_yy, c(0.0, 0.0));
        assert_eq!(w.d_zzbar, c(0.0, 0.0));
    }

    #[test]
    fn lift_of_x_evaluates_ansatz() {
        let p = reduced(|[x, _]| x);
        let pt = Point4C::new(c(1.0, 0.0), c(0.0, 1.0));
        assert_eq!((pt.x(), pt.t()), (1.0, 1.0));
        let v = lift_p(&p, LiftMode::ChainRule).value(&pt);
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lift_of_half_square_solves_plebanski() {
        let p = reduced(|[x, _]| x * x * 0.5);
        for mode in [LiftMode::ChainRule, LiftMode::Numeric(NumericDiff::default())] {
            let lifted = lift_p(&p, mode);
            for (y, z) in [(c(0.7, 0.2), c(0.3, -0.5)), (c(-1.2, 0.9), c(0.0, 2.0))] {
                let r = plebanski_residual(&lifted, &Point4C::new(y, z)).unwrap();
                assert!(r.norm() < 1e-8, "{mode:?}: {r}");
            }
        }
    }

    #[test]
    fn lift_is_singular_at_origin_of_y() {
        let p = reduced(|[x, t]| x * t);
        let lifted = lift_p(&p, LiftMode::ChainRule);
        assert!(matches!(
            plebanski_residual(&lifted, &Point4C::new(c(0.0, 0.0), c(1.0, 0.0))),
            Err(Error::AnsatzSingular(_))
        ));
    }

    #[test]
    fn reduced_residual_examples() {
        let zero = reduced(|[x, _]| x * 0.0);
        assert_eq!(intermediate_residual(&zero, 1.3, 0.2).unwrap(), 0.0);
        assert_eq!(pf_residual(&zero, 1.0, 0.0).unwrap(), -4.0);
        let t_sq = reduced(|[_, t]| t * t * 0.5);
        assert_eq!(intermediate_residual(&t_sq, 0.7, 0.4).unwrap(), 1.0);
        let half_sq = reduced(|[x, _]| x * x * 0.5);
        assert!(intermediate_residual(&half_sq, 1.7, -0.3).unwrap().abs() < 1e-14);
        assert!(pf_residual(&half_sq, 1.7, -0.3).unwrap().abs() < 1e-14);
    }

    #[test]
    fn linear_chain_potential_solves_monge_ampere() {
        for (cc, a0) in [(0.0, 0.0), (1.0, 0.0), (-2.5, 3.0), (4.0, -1.0)] {
            let p = reduced(move |[x, t]| x * x - x * (cc / 2.0) - t * t * (cc / 2.0) + t * (a0 / 4.0));
            for (x, t) in [(1.0, 0.0), (1.5, 0.3), (2.0, 1.0)] {
                assert!(pf_residual(&p, x, t).unwrap().abs() < 1e-13);
            }
        }
    }

    #[test]
    fn shift_examples() {
        let half_sq = ReducedScalar(ScalarField2::exact(|[x, _]| x * x * 0.5));
        let shifted = shift_map(&half_sq);
        assert!(shifted.0.value([1.4, 0.0]).abs() < 1e-15);
        assert!(intermediate_residual(&shifted, 1.4, 0.0).unwrap().abs() < 1e-14);

        let zero = reduced(|[x, _]| x * 0.0);
        let s = shift_map(&zero);
        assert!((intermediate_residual(&s, 2.0, 0.5).unwrap() + 8.0).abs() < 1e-13);
        assert!((pf_residual(&zero, 2.0, 0.5).unwrap() + 8.0).abs() < 1e-13);

        let f = reduced(|[x, t]| (x * t).sin() + x);
        let back = unshift_map(&shift_map(&f));
        assert!((back.0.value([0.8, 0.3]) - f.0.value([0.8, 0.3])).abs() < 1e-15);
    }

    #[test]
    fn f_examples() {
        let zero = reduced(|[x, _]| x * 0.0);
        assert_eq!(compute_f(&zero, 2.0, 0.0).unwrap(), 8.0);
        let half_sq = reduced(|[x, _]| x * x * 0.5);
        assert!(compute_f(&half_sq, 1.0, 0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn wirtinger_of_radial_field_gives_real_y_contraction() {
        let p = PlebanskiField::closed_form(|ch| (ch.y * ch.y_bar).sin() + ch.z * ch.z_bar);
        let pt = Point4C::new(c(0.6, -0.8), c(0.2, 0.5));
        let w = p.wirtinger(&pt).unwrap();
        assert!((w.d_y * pt.y).im.abs() < 1e-15);
    }
}
