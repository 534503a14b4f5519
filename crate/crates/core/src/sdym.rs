//! Self-dual Yang-Mills: matrix-valued fields, the full equation on the
//! chart, the spherical ansatz `M = ȳ⁻¹ m(r, t)` and its reduced forms.
//!
//! The reduced equation is written `m_rr + m_tt − κ [m_t, m_r] = 0`. Two
//! coefficient presets exist: [`CommutatorCoefficient::printed`] is the
//! printed `1/(2ir)`, [`CommutatorCoefficient::canonical`] is the value
//! `i/r` that the lift identity produces. [`fit_sdym_lift`] measures the
//! latter directly from the four-dimensional residual.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::numcore::diff::numeric_partials;
use crate::numcore::{Jet, NumericDiff};
use crate::plebanski4d::{ChartJets, Point4C, Wirtinger};
use crate::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// An element of a matrix Lie algebra: an `n × n` complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LieElement(pub DMatrix<Complex64>);

impl LieElement {
    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::from_element(n, n, ZERO))
    }

    pub fn from_row_slice(n: usize, entries: &[Complex64]) -> Self {
        Self(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// The Pauli matrices `σ₁, σ₂, σ₃`.
    pub fn pauli() -> [Self; 3] {
        let (o, l) = (ZERO, Complex64::new(1.0, 0.0));
        [
            Self::from_row_slice(2, &[o, l, l, o]),
            Self::from_row_slice(2, &[o, -I, I, o]),
            Self::from_row_slice(2, &[l, o, o, -l]),
        ]
    }

    /// Generalized Gell-Mann basis of traceless Hermitian `n × n` matrices
    /// (the Pauli matrices for `n = 2`).
    pub fn traceless_basis(n: usize) -> Vec<Self> {
        let one = Complex64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(n * n - 1);
        for j in 0..n {
            for k in (j + 1)..n {
                let mut s = Self::zeros(n);
                s.0[(j, k)] = one;
                s.0[(k, j)] = one;
                out.push(s);
                let mut a = Self::zeros(n);
                a.0[(j, k)] = -I;
                a.0[(k, j)] = I;
                out.push(a);
            }
        }
        for l in 1..n {
            let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
            let mut d = Self::zeros(n);
            for m in 0..l {
                d.0[(m, m)] = Complex64::new(norm, 0.0);
            }
            d.0[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
            out.push(d);
        }
        out
    }

    /// `[a, b] = ab − ba`
    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self(&self.0 * k)
    }
}

impl Add for &LieElement {
    type Output = LieElement;
    fn add(self, rhs: &LieElement) -> LieElement {
        LieElement(&self.0 + &rhs.0)
    }
}

impl Sub for &LieElement {
    type Output = LieElement;
    fn sub(self, rhs: &LieElement) -> LieElement {
        LieElement(&self.0 - &rhs.0)
    }
}

impl Neg for &LieElement {
    type Output = LieElement;
    fn neg(self) -> LieElement {
        LieElement(-&self.0)
    }
}

impl Mul<Complex64> for &LieElement {
    type Output = LieElement;
    fn mul(self, k: Complex64) -> LieElement {
        self.scale(k)
    }
}

type EntryJetFn<const N: usize> = dyn Fn([Jet<Complex64, N>; N]) -> Vec<Jet<Complex64, N>> + Send + Sync;
type MatrixValueFn<const N: usize> = dyn Fn([f64; N]) -> DMatrix<Complex64> + Send + Sync;
/// A closed-form scalar coefficient for [`MatrixField::from_components`].
pub type ComponentFn<const N: usize> =
    Box<dyn Fn([Jet<Complex64, N>; N]) -> Jet<Complex64, N> + Send + Sync>;

/// A matrix-valued field of `N` real variables with partials up to order 2.
#[derive(Clone)]
pub struct MatrixField<const N: usize> {
    n: usize,
    repr: MatrixRepr<N>,
}

#[derive(Clone)]
enum MatrixRepr<const N: usize> {
    /// Row-major entry jets.
    Exact(Arc<EntryJetFn<N>>),
    Numeric {
        eval: Arc<MatrixValueFn<N>>,
        diff: NumericDiff,
    },
}

/// Matrix field over `(r, t)` (or `(x, t)`).
pub type MatrixField2 = MatrixField<2>;

impl<const N: usize> fmt::Debug for MatrixField<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.repr {
            MatrixRepr::Exact(_) => "exact",
            MatrixRepr::Numeric { .. } => "numeric",
        };
        write!(f, "MatrixField<{N}>({}x{}, {mode})", self.n, self.n)
    }
}

/// Value and partials of a matrix field at a point.
#[derive(Clone, Debug)]
pub struct MatrixPartials<const N: usize> {
    pub value: LieElement,
    pub grad: [LieElement; N],
    pub hess: [[LieElement; N]; N],
}

impl<const N: usize> MatrixField<N> {
    pub fn exact(
        n: usize,
        f: impl Fn([Jet<Complex64, N>; N]) -> Vec<Jet<Complex64, N>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            n,
            repr: MatrixRepr::Exact(Arc::new(f)),
        }
    }

    pub fn numeric(
        n: usize,
        f: impl Fn([f64; N]) -> DMatrix<Complex64> + Send + Sync + 'static,
        diff: NumericDiff,
    ) -> Self {
        Self {
            n,
            repr: MatrixRepr::Numeric {
                eval: Arc::new(f),
                diff,
            },
        }
    }

    /// `Σₖ fₖ · Bₖ` for closed-form scalar coefficients `fₖ`.
    pub fn from_components(n: usize, components: Vec<(ComponentFn<N>, LieElement)>) -> Self {
        Self::exact(n, move |x| {
            let coeffs: Vec<Jet<Complex64, N>> = components.iter().map(|(f, _)| f(x)).collect();
            let mut entries = vec![Jet::constant(ZERO); n * n];
            for (c, (_, basis)) in coeffs.iter().zip(&components) {
                for row in 0..n {
                    for col in 0..n {
                        let b = basis.0[(row, col)];
                        if b != ZERO {
                            entries[row * n + col] = entries[row * n + col] + c.scale(b);
                        }
                    }
                }
            }
            entries
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value(&self, at: [f64; N]) -> LieElement {
        match &self.repr {
            MatrixRepr::Exact(f) => {
                let entries = f(Jet::seeds(at));
                LieElement(DMatrix::from_fn(self.n, self.n, |i, j| entries[i * self.n + j].value))
            }
            MatrixRepr::Numeric { eval, .. } => LieElement(eval(at)),
        }
    }

    /// Row-major per-entry jets at `at`.
    pub fn entry_jets(&self, at: [f64; N]) -> Result<Vec<Jet<Complex64, N>>> {
        match &self.repr {
            MatrixRepr::Exact(f) => {
                let entries = f(Jet::seeds(at));
                if entries.iter().any(|e| !e.is_finite()) {
                    return Err(Error::NonFiniteSample { point: at.to_vec() });
                }
                Ok(entries)
            }
            MatrixRepr::Numeric { eval, diff } => {
                let g = |p: &[f64; N]| eval(*p);
                let np = numeric_partials(&g, &at, diff)?;
                let n = self.n;
                Ok((0..n * n)
                    .map(|k| {
                        let (i, j) = (k / n, k % n);
                        Jet {
                            value: np.value[(i, j)],
                            grad: std::array::from_fn(|a| np.grad[a][(i, j)]),
                            hess: std::array::from_fn(|a| {
                                std::array::from_fn(|b| np.hess[a][b][(i, j)])
                            }),
                        }
                    })
                    .collect())
            }
        }
    }

    pub fn partials(&self, at: [f64; N]) -> Result<MatrixPartials<N>> {
        let entries = self.entry_jets(at)?;
        let n = self.n;
        let assemble = |pick: &dyn Fn(&Jet<Complex64, N>) -> Complex64| {
            LieElement(DMatrix::from_fn(n, n, |i, j| pick(&entries[i * n + j])))
        };
        Ok(MatrixPartials {
            value: assemble(&|e| e.value),
            grad: std::array::from_fn(|a| assemble(&|e| e.grad[a])),
            hess: std::array::from_fn(|a| std::array::from_fn(|b| assemble(&|e| e.hess[a][b]))),
        })
    }

    pub fn to_numeric(&self, diff: NumericDiff) -> Self {
        let this = self.clone();
        Self::numeric(self.n, move |p| this.value(p).0, diff)
    }
}

/// `λ·m`
pub fn scale_field<const N: usize>(m: &MatrixField<N>, lambda: Complex64) -> Result<MatrixField<N>> {
    if lambda == ZERO {
        return Err(Error::InvalidParams("scale factor must be nonzero".into()));
    }
    let n = m.n;
    Ok(match &m.repr {
        MatrixRepr::Exact(f) => {
            let f = f.clone();
            MatrixField::exact(n, move |x| f(x).into_iter().map(|e| e.scale(lambda)).collect())
        }
        MatrixRepr::Numeric { eval, diff } => {
            let eval = eval.clone();
            MatrixField::numeric(n, move |p| eval(p) * lambda, *diff)
        }
    })
}

/// A matrix field on the chart, with the ansatz singular set recorded for
/// lifted fields.
#[derive(Clone, Debug)]
pub struct SdymField {
    pub field: MatrixField<4>,
    lifted: bool,
}

impl SdymField {
    pub fn new(field: MatrixField<4>) -> Self {
        Self {
            field,
            lifted: false,
        }
    }

    /// Closed form in terms of `(y, ȳ, z, z̄)` jets, entries row-major.
    pub fn closed_form(
        n: usize,
        f: impl Fn(ChartJets) -> Vec<Jet<Complex64, 4>> + Send + Sync + 'static,
    ) -> Self {
        Self::new(MatrixField::exact(n, move |c| f(ChartJets::from_real(c))))
    }

    pub fn value(&self, at: &Point4C) -> LieElement {
        self.field.value(at.coords())
    }

    fn check_domain(&self, at: &Point4C) -> Result<()> {
        if self.lifted {
            if at.y == ZERO {
                return Err(Error::AnsatzSingular("y = 0".into()));
            }
            if at.r() == 0.0 {
                return Err(Error::AnsatzSingular("r = 0".into()));
            }
        }
        Ok(())
    }

    /// Entry-wise Wirtinger derivatives.
    pub fn wirtinger(&self, at: &Point4C) -> Result<Vec<Wirtinger>> {
        self.check_domain(at)?;
        Ok(self
            .field
            .entry_jets(at.coords())?
            .iter()
            .map(Wirtinger::from_jet)
            .collect())
    }
}

fn assemble(n: usize, w: &[Wirtinger], pick: impl Fn(&Wirtinger) -> Complex64) -> LieElement {
    LieElement(DMatrix::from_fn(n, n, |i, j| pick(&w[i * n + j])))
}

/// `M_yȳ + M_zz̄ − [M_y, M_z]`
pub fn sdym_residual(m: &SdymField, at: &Point4C) -> Result<LieElement> {
    let n = m.field.dim();
    let w = m.wirtinger(at)?;
    let lap = assemble(n, &w, |e| e.d_yybar + e.d_zzbar);
    let my = assemble(n, &w, |e| e.d_y);
    let mz = assemble(n, &w, |e| e.d_z);
    Ok(&lap - &my.commutator(&mz))
}

/// How the lift obtains the partials of `M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixLiftMode {
    ChainRule,
    Numeric(NumericDiff),
}

/// `M = ȳ⁻¹ m(r, t)` with `r = √(yȳ + ((z+z̄)/2)²)`, `t = (z − z̄)/(2i)`.
pub fn lift_m(m: &MatrixField2, mode: MatrixLiftMode) -> SdymField {
    let n = m.dim();
    let m = m.clone();
    let field = match mode {
        MatrixLiftMode::ChainRule => MatrixField::exact(n, move |c| {
            let chart = ChartJets::from_real(c);
            let r = chart.x().sqrt();
            let t = chart.t();
            let inv = chart.y_bar.recip();
            match m.entry_jets([r.value.re, t.value.re]) {
                Ok(entries) => entries.iter().map(|e| inv * e.compose(&[r, t])).collect(),
                Err(_) => vec![Jet::nan(); n * n],
            }
        }),
        MatrixLiftMode::Numeric(diff) => MatrixField::numeric(
            n,
            move |c| {
                let pt = Point4C::from_coords(c);
                m.value([pt.r(), pt.t()]).0 * pt.y_bar().inv()
            },
            diff,
        ),
    };
    SdymField {
        field,
        lifted: true,
    }
}

/// Coefficient of the commutator in the reduced equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CommutatorCoefficient {
    Constant(Complex64),
    /// `κ = k / r`
    OverR(Complex64),
}

impl CommutatorCoefficient {
    /// `κ = 1/(2ir)`, as printed with the reduced equation.
    pub fn printed() -> Self {
        Self::OverR(Complex64::new(0.0, -0.5))
    }

    /// `κ = i/r`, the coefficient produced by the lift.
    pub fn canonical() -> Self {
        Self::OverR(I)
    }

    pub fn at(&self, r: f64) -> Complex64 {
        match *self {
            Self::Constant(k) => k,
            Self::OverR(k) => k / r,
        }
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        match *self {
            Self::Constant(k) => Self::Constant(k * lambda),
            Self::OverR(k) => Self::OverR(k * lambda),
        }
    }

    fn validate(&self) -> Result<()> {
        let k = match *self {
            Self::Constant(k) | Self::OverR(k) => k,
        };
        if k == ZERO {
            Err(Error::InvalidParams("commutator coefficient must be nonzero".into()))
        } else {
            Ok(())
        }
    }
}

/// `m_rr + m_tt − κ [m_t, m_r]` at `(r, t)`.
pub fn ss_residual(m: &MatrixField2, r: f64, t: f64, kappa: CommutatorCoefficient) -> Result<LieElement> {
    kappa.validate()?;
    if !(r > 0.0) {
        return Err(Error::AnsatzSingular(format!("r = {r}")));
    }
    let p = m.partials([r, t])?;
    let lap = &p.hess[0][0] + &p.hess[1][1];
    let comm = p.grad[1].commutator(&p.grad[0]);
    Ok(&lap - &comm.scale(kappa.at(r)))
}

/// `(ξ − ξ̄) m_ξξ̄ − [m_ξ, m_ξ̄]` with `ξ = t + ix`, for `m` over `(x, t)`.
pub fn ee_residual(m: &MatrixField2, x: f64, t: f64) -> Result<LieElement> {
    if x == 0.0 {
        return Err(Error::PoleCollision { x });
    }
    let p = m.partials([x, t])?;
    let (mx, mt) = (&p.grad[0], &p.grad[1]);
    let half = Complex64::new(0.5, 0.0);
    let m_xi = &(mt - &mx.scale(I)) * half;
    let m_xibar = &(mt + &mx.scale(I)) * half;
    let m_xixibar = &(&p.hess[0][0] + &p.hess[1][1]) * Complex64::new(0.25, 0.0);
    let gap = Complex64::new(0.0, 2.0 * x);
    Ok(&m_xixibar.scale(gap) - &m_xi.commutator(&m_xibar))
}

/// Two-term complex least squares `target ≈ a·u + b·v` over flattened samples.
fn fit_two(samples: &[(Complex64, Complex64, Complex64)]) -> Result<(Complex64, Complex64, f64, f64)> {
    let (mut uu, mut uv, mut vv) = (0.0, ZERO, 0.0);
    let (mut ut, mut vt) = (ZERO, ZERO);
    for &(u, v, target) in samples {
        uu += u.norm_sqr();
        vv += v.norm_sqr();
        uv += u.conj() * v;
        ut += u.conj() * target;
        vt += v.conj() * target;
    }
    let det = Complex64::new(uu * vv, 0.0) - uv * uv.conj();
    if det.norm() <= 1e-300 {
        return Err(Error::InvalidParams("lift fit is degenerate".into()));
    }
    // [uu uv; uv* vv] [a b]^T = [ut vt]^T
    let a = (ut * vv - uv * vt) / det;
    let b = (vt * uu - uv.conj() * ut) / det;
    let misfits: Vec<f64> = samples.iter().map(|&(u, v, t)| (t - a * u - b * v).norm()).collect();
    let max = misfits.iter().copied().fold(0.0, f64::max);
    let rms = (misfits.iter().map(|m| m * m).sum::<f64>() / misfits.len().max(1) as f64).sqrt();
    Ok((a, b, max, rms))
}

/// Fitted form of the matrix lift identity
/// `sdym_residual(lift m) = a·ȳ⁻¹(m_rr + m_tt) + b·ȳ⁻¹(−[m_t, m_r]/r)`.
/// The prefactor is `a` and the reduced coefficient is `κ = (b/a)/r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SdymLiftFit {
    pub prefactor: Complex64,
    pub kappa_over_r: Complex64,
    pub max_abs_misfit: f64,
    pub rms_misfit: f64,
    pub samples: usize,
}

pub fn fit_sdym_lift(fields: &[MatrixField2], points: &[Point4C], mode: MatrixLiftMode) -> Result<SdymLiftFit> {
    let mut samples = Vec::new();
    for m in fields {
        let lifted = lift_m(m, mode);
        for pt in points {
            let full = sdym_residual(&lifted, pt)?;
            let (r, t) = (pt.r(), pt.t());
            let p = m.partials([r, t])?;
            let inv = pt.y_bar().inv();
            let lap = (&p.hess[0][0] + &p.hess[1][1]).scale(inv);
            let comm = p.grad[1].commutator(&p.grad[0]).scale(-inv / r);
            for ((u, v), target) in lap.0.iter().zip(comm.0.iter()).zip(full.0.iter()) {
                samples.push((*u, *v, *target));
            }
        }
    }
    let (a, b, max, rms) = fit_two(&samples)?;
    Ok(SdymLiftFit {
        prefactor: a,
        kappa_over_r: b / a,
        max_abs_misfit: max,
        rms_misfit: rms,
        samples: samples.len(),
    })
}

/// Fitted relation `ee_residual(m) = μ·x·(m_rr + m_tt) + ν·(−[m_t, m_r])`,
/// i.e. `ee_residual = μ·x·ss_residual(m, κ)` with `κ = (ν/μ)/r`.
#[derive(Clone, Debug, PartialEq)]
pub struct EeFit {
    pub prefactor: Complex64,
    pub kappa_over_r: Complex64,
    pub max_abs_misfit: f64,
}

pub fn fit_ee_equivalence(fields: &[MatrixField2], points: &[(f64, f64)]) -> Result<EeFit> {
    let mut samples = Vec::new();
    for m in fields {
        for &(x, t) in points {
            let ee = ee_residual(m, x, t)?;
            let p = m.partials([x, t])?;
            let lap = (&p.hess[0][0] + &p.hess[1][1]).scale(Complex64::new(x, 0.0));
            let comm = -&p.grad[1].commutator(&p.grad[0]);
            for ((u, v), target) in lap.0.iter().zip(comm.0.iter()).zip(ee.0.iter()) {
                samples.push((*u, *v, *target));
            }
        }
    }
    let (a, b, max, _) = fit_two(&samples)?;
    Ok(EeFit {
        prefactor: a,
        kappa_over_r: b / a,
        max_abs_misfit: max,
    })
}

/// Largest mismatch of the lifted field's `M_y` and `M_yȳ` against two
/// candidate closed forms: `M_y = m_r/(2r)`, and `M_yȳ = c(y)·(m_r/r)_r`
/// with `c = y/4` (as printed) or `c = y/(4r)` (chain rule).
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeTableCheck {
    pub m_y_defect: f64,
    pub m_yybar_printed_defect: f64,
    pub m_yybar_chain_rule_defect: f64,
}

pub fn check_derivative_table(fields: &[MatrixField2], points: &[Point4C]) -> Result<DerivativeTableCheck> {
    let mut out = DerivativeTableCheck {
        m_y_defect: 0.0,
        m_yybar_printed_defect: 0.0,
        m_yybar_chain_rule_defect: 0.0,
    };
    for m in fields {
        let n = m.dim();
        let lifted = lift_m(m, MatrixLiftMode::ChainRule);
        for pt in points {
            let w = lifted.wirtinger(pt)?;
            let my = assemble(n, &w, |e| e.d_y);
            let myyb = assemble(n, &w, |e| e.d_yybar);
            let r = pt.r();
            let p = m.partials([r, pt.t()])?;
            let m_r = &p.grad[0];
            // (m_r / r)_r = m_rr / r − m_r / r²
            let g_r = &p.hess[0][0].scale(Complex64::new(1.0 / r, 0.0))
                - &m_r.scale(Complex64::new(1.0 / (r * r), 0.0));
            let printed = g_r.scale(pt.y / 4.0);
            let chain = g_r.scale(pt.y / (4.0 * r));
            let my_expected = m_r.scale(Complex64::new(0.5 / r, 0.0));
            out.m_y_defect = out.m_y_defect.max((&my - &my_expected).max_abs());
            out.m_yybar_printed_defect = out.m_yybar_printed_defect.max((&myyb - &printed).max_abs());
            out.m_yybar_chain_rule_defect = out.m_yybar_chain_rule_defect.max((&myyb - &chain).max_abs());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfields::{random_matrix_field, random_point, rng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn linear_combo(coeffs: Vec<(fn([Jet<Complex64, 2>; 2]) -> Jet<Complex64, 2>, LieElement)>) -> MatrixField2 {
        MatrixField2::from_components(
            2,
            coeffs
                .into_iter()
                .map(|(f, b)| (Box::new(f) as ComponentFn<2>, b))
                .collect(),
        )
    }

    #[test]
    fn basis_is_traceless_and_algebra_identities_hold() {
        for n in [2, 3, 4] {
            let basis = LieElement::traceless_basis(n);
            assert_eq!(basis.len(), n * n - 1);
            for b in &basis {
                assert!(b.trace().norm() <= 1e-12);
            }
            let (a, b, cc) = (&basis[0], &basis[1], &basis[basis.len() - 1]);
            let ab = a.commutator(b);
            assert!((&ab + &b.commutator(a)).max_abs() < 1e-15);
            let jacobi = &(&a.commutator(&b.commutator(cc)) + &b.commutator(&cc.commutator(a)))
                + &cc.commutator(&a.commutator(b));
            assert!(jacobi.max_abs() < 1e-14);
            assert!(ab.trace().norm() < 1e-14);
        }
        let [s1, s2, s3] = LieElement::pauli();
        assert!((&s1.commutator(&s2) - &s3.scale(c(0.0, 2.0))).max_abs() < 1e-15);
    }

    #[test]
    fn constant_and_linear_in_y_fields_solve_sdym() {
        let [s1, s2, s3] = LieElement::pauli();
        let h = &(&s1 + &s2.scale(c(0.3, 0.0))) + &s3.scale(c(0.0, -1.2));
        let pt = Point4C::new(c(0.4, -0.3), c(0.9, 0.2));
        let hc = h.clone();
        let constant = SdymField::closed_form(2, move |_| {
            hc.0.iter().map(|&e| Jet::constant(e)).collect::<Vec<_>>()
        });
        let hr = h.clone();
        let linear = SdymField::closed_form(2, move |ch| {
            // row-major iteration of a column-major matrix
            (0..4).map(|k| ch.y.scale(hr.0[(k / 2, k % 2)])).collect::<Vec<_>>()
        });
        assert!(sdym_residual(&constant, &pt).unwrap().max_abs() < 1e-15);
        assert!(sdym_residual(&linear, &pt).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn constant_lift_at_real_y() {
        let [_, _, s3] = LieElement::pauli();
        let m = linear_combo(vec![(|_| Jet::constant(c(1.0, 0.0)), s3.clone())]);
        let lifted = lift_m(&m, MatrixLiftMode::ChainRule);
        let v = lifted.value(&Point4C::new(c(2.0, 0.0), c(0.0, 0.0)));
        assert!((&v - &s3.scale(c(0.5, 0.0))).max_abs() < 1e-15);
    }

    #[test]
    fn r_squared_lift_has_constant_y_derivative() {
        let [s1, ..] = LieElement::pauli();
        let m = linear_combo(vec![(|[r, _]| r * r, s1.clone())]);
        let lifted = lift_m(&m, MatrixLiftMode::ChainRule);
        for pt in [Point4C::new(c(0.5, 0.1), c(0.3, 0.7)), Point4C::new(c(-1.0, 0.8), c(1.4, -0.2))] {
            let w = lifted.wirtinger(&pt).unwrap();
            let my = assemble(2, &w, |e| e.d_y);
            assert!((&my - &s1).max_abs() < 1e-14);
        }
    }

    #[test]
    fn lift_is_singular_on_y_zero() {
        let m = random_matrix_field(&mut rng(3), 2);
        let lifted = lift_m(&m, MatrixLiftMode::ChainRule);
        assert!(matches!(
            sdym_residual(&lifted, &Point4C::new(c(0.0, 0.0), c(0.5, 0.5))),
            Err(Error::AnsatzSingular(_))
        ));
    }

    #[test]
    fn ss_examples() {
        let [s1, s2, s3] = LieElement::pauli();
        let quad = linear_combo(vec![(|[r, _]| r * r, s3.clone())]);
        for kappa in [CommutatorCoefficient::printed(), CommutatorCoefficient::canonical()] {
            let res = ss_residual(&quad, 0.7, 0.2, kappa).unwrap();
            assert!((&res - &s3.scale(c(2.0, 0.0))).max_abs() < 1e-14);
        }
        let lin = linear_combo(vec![(|[_, t]| t, s1), (|[r, _]| r, s2)]);
        for kappa in [CommutatorCoefficient::Constant(c(0.3, -1.0)), CommutatorCoefficient::printed()] {
            let (r, t) = (1.3, -0.4);
            let res = ss_residual(&lin, r, t, kappa).unwrap();
            let expected = s3.scale(-kappa.at(r) * c(0.0, 2.0));
            assert!((&res - &expected).max_abs() < 1e-14);
        }
        let constant = linear_combo(vec![(|_| Jet::constant(c(2.0, 1.0)), s3)]);
        assert!(ss_residual(&constant, 1.0, 0.0, CommutatorCoefficient::canonical()).unwrap().max_abs() == 0.0);
        assert!(matches!(
            ss_residual(&constant, 0.0, 0.0, CommutatorCoefficient::canonical()),
            Err(Error::AnsatzSingular(_))
        ));
    }

    #[test]
    fn ee_examples() {
        let [s1, s2, s3] = LieElement::pauli();
        let lin = linear_combo(vec![(|[_, t]| t, s1), (|[x, _]| x, s2)]);
        let res = ee_residual(&lin, 1.0, 0.3).unwrap();
        assert!((&res - &s3).max_abs() < 1e-15);
        let constant = linear_combo(vec![(|_| Jet::constant(c(1.0, 0.0)), s3)]);
        assert_eq!(ee_residual(&constant, 2.0, 0.0).unwrap().max_abs(), 0.0);
        assert_eq!(ee_residual(&constant, 0.0, 0.0).unwrap_err(), Error::PoleCollision { x: 0.0 });
    }

    #[test]
    fn scaling_conjugates_the_coefficient() {
        let mut r = rng(11);
        let m = random_matrix_field(&mut r, 2);
        for lambda in [c(1.0, 0.0), c(-2.0, 0.0), c(0.3, 1.7)] {
            let scaled = scale_field(&m, lambda).unwrap();
            for kappa in [CommutatorCoefficient::canonical(), CommutatorCoefficient::Constant(c(0.2, 0.5))] {
                let lhs = ss_residual(&scaled, 0.9, 0.1, kappa).unwrap();
                let rhs = ss_residual(&m, 0.9, 0.1, kappa.scaled(lambda)).unwrap().scale(lambda);
                assert!((&lhs - &rhs).max_abs() < 1e-13);
            }
        }
        // λ = −2 carries the canonical coefficient onto the printed one
        assert_eq!(
            CommutatorCoefficient::canonical().scaled(c(-0.5, 0.0)),
            CommutatorCoefficient::printed()
        );
        assert!(scale_field(&m, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn lift_identity_fits_quarter_and_i_over_r() {
        let mut r = rng(2024);
        let fields: Vec<_> = (0..2).map(|_| random_matrix_field(&mut r, 2)).collect();
        let points: Vec<_> = (0..50).map(|_| random_point(&mut r)).collect();
        let fit = fit_sdym_lift(&fields, &points, MatrixLiftMode::ChainRule).unwrap();
        assert!((fit.prefactor - c(0.25, 0.0)).norm() < 1e-10, "{fit:?}");
        assert!((fit.kappa_over_r - c(0.0, 1.0)).norm() < 1e-10, "{fit:?}");
        assert!(fit.max_abs_misfit < 1e-10);
    }

    #[test]
    fn residuals_stay_traceless() {
        let mut r = rng(5);
        let m = random_matrix_field(&mut r, 3);
        let pt = random_point(&mut r);
        let full = sdym_residual(&lift_m(&m, MatrixLiftMode::ChainRule), &pt).unwrap();
        assert!(full.trace().norm() < 1e-12);
        let red = ss_residual(&m, 0.8, 0.2, CommutatorCoefficient::canonical()).unwrap();
        assert!(red.trace().norm() < 1e-12);
        let p = m.partials([0.8, 0.2]).unwrap();
        assert!(p.hess[0][1].trace().norm() < 1e-12);
    }

    #[test]
    fn ee_is_the_one_over_r_form() {
        let mut r = rng(9);
        let fields: Vec<_> = (0..2).map(|_| random_matrix_field(&mut r, 2)).collect();
        let pts: Vec<(f64, f64)> = (0..30).map(|k| (0.3 + 0.05 * k as f64, -0.5 + 0.03 * k as f64)).collect();
        let fit = fit_ee_equivalence(&fields, &pts).unwrap();
        assert!((fit.prefactor - c(0.0, 0.5)).norm() < 1e-12, "{fit:?}");
        assert!((fit.kappa_over_r - c(1.0, 0.0)).norm() < 1e-12, "{fit:?}");
    }

    #[test]
    fn derivative_table_entries() {
        let mut r = rng(17);
        let fields = vec![random_matrix_field(&mut r, 2)];
        let points: Vec<_> = (0..10).map(|_| random_point(&mut r)).collect();
        let check = check_derivative_table(&fields, &points).unwrap();
        assert!(check.m_y_defect < 1e-12);
        assert!(check.m_yybar_chain_rule_defect < 1e-12);
        assert!(check.m_yybar_printed_defect > 1e-3);
    }

    #[test]
    fn numeric_lift_agrees_with_chain_rule() {
        let mut r = rng(4);
        let m = random_matrix_field(&mut r, 2);
        let pt = random_point(&mut r);
        let a = sdym_residual(&lift_m(&m, MatrixLiftMode::ChainRule), &pt).unwrap();
        let b = sdym_residual(&lift_m(&m, MatrixLiftMode::Numeric(NumericDiff::default())), &pt).unwrap();
        assert!((&a - &b).max_abs() < 1e-7, "{}", (&a - &b).max_abs());
    }
}
