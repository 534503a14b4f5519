use std::fmt;
use std::sync::Arc;

use super::diff::{numeric_partials, NumericDiff, Sample};
use super::jet::{Jet, Scalar};
use crate::{Error, Result};

type JetFn<T, const N: usize> = dyn Fn([Jet<T, N>; N]) -> Jet<T, N> + Send + Sync;
type ValueFn<T, const N: usize> = dyn Fn([f64; N]) -> T + Send + Sync;

/// How a field produces its partial derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivMode {
    Exact,
    Numeric(NumericDiff),
}

/// A scalar field of `N` real variables with partials up to order two.
///
/// Exact fields are closures over [`Jet`]s; numeric fields are value-only
/// evaluators differentiated by Richardson-extrapolated central stencils.
#[derive(Clone)]
pub struct Field<const N: usize, T: Scalar = f64> {
    repr: Repr<N, T>,
}

#[derive(Clone)]
enum Repr<const N: usize, T: Scalar> {
    Exact(Arc<JetFn<T, N>>),
    Numeric {
        eval: Arc<ValueFn<T, N>>,
        diff: NumericDiff,
    },
}

pub type ScalarField2 = Field<2, f64>;
pub type ComplexField2 = Field<2, num_complex::Complex64>;
/// A field of one real variable, e.g. a similarity profile ν(ξ).
pub type Profile = Field<1, f64>;

impl<const N: usize, T: Scalar + Sample> fmt::Debug for Field<N, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field<{N}>({:?})", self.mode())
    }
}

impl<const N: usize, T: Scalar + Sample> Field<N, T> {
    pub fn exact(f: impl Fn([Jet<T, N>; N]) -> Jet<T, N> + Send + Sync + 'static) -> Self {
        Self {
            repr: Repr::Exact(Arc::new(f)),
        }
    }

    pub fn numeric(f: impl Fn([f64; N]) -> T + Send + Sync + 'static, diff: NumericDiff) -> Self {
        Self {
            repr: Repr::Numeric {
                eval: Arc::new(f),
                diff,
            },
        }
    }

    pub fn mode(&self) -> DerivMode {
        match &self.repr {
            Repr::Exact(_) => DerivMode::Exact,
            Repr::Numeric { diff, .. } => DerivMode::Numeric(*diff),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Exact(_))
    }

    pub fn value(&self, at: [f64; N]) -> T {
        match &self.repr {
            Repr::Exact(f) => f(Jet::seeds(at)).value,
            Repr::Numeric { eval, .. } => eval(at),
        }
    }

    /// Value and partials at `at`.
    pub fn jet(&self, at: [f64; N]) -> Result<Jet<T, N>> {
        self.jet_with_error(at).map(|(jet, _)| jet)
    }

    /// Value and partials together with per-partial error bounds (zero in
    /// exact mode).
    pub fn jet_with_error(&self, at: [f64; N]) -> Result<(Jet<T, N>, Jet<f64, N>)> {
        match &self.repr {
            Repr::Exact(f) => {
                let jet = f(Jet::seeds(at));
                if !jet.is_finite() {
                    return Err(Error::NonFiniteSample { point: at.to_vec() });
                }
                Ok((jet, Jet::constant(0.0)))
            }
            Repr::Numeric { eval, diff } => {
                let g = |p: &[f64; N]| eval(*p);
                let np = numeric_partials(&g, &at, diff)?;
                let jet = Jet {
                    value: np.value,
                    grad: np.grad,
                    hess: np.hess,
                };
                let err = Jet {
                    value: 0.0,
                    grad: np.grad_error,
                    hess: np.hess_error,
                };
                Ok((jet, err))
            }
        }
    }

    /// The same field seen through its values only, differentiated
    /// numerically.
    pub fn to_numeric(&self, diff: NumericDiff) -> Self {
        let this = self.clone();
        Self::numeric(move |p| this.value(p), diff)
    }

    /// `self + g`, where `g` is given in closed form. Stays exact when
    /// `self` is exact.
    pub fn plus_closed_form(
        &self,
        g: impl Fn([Jet<T, N>; N]) -> Jet<T, N> + Send + Sync + 'static,
    ) -> Self {
        match &self.repr {
            Repr::Exact(f) => {
                let f = f.clone();
                Self::exact(move |x| f(x) + g(x))
            }
            Repr::Numeric { eval, diff } => {
                let eval = eval.clone();
                Self::numeric(move |p| eval(p) + g(Jet::seeds(p)).value, *diff)
            }
        }
    }

    /// Pulls the field back along a closed-form map of the variables:
    /// `x ↦ self(map(x))`.
    pub fn pullback(
        &self,
        map: impl Fn([Jet<T, N>; N]) -> [Jet<T, N>; N] + Send + Sync + 'static,
    ) -> Self
    where
        T: RealPart,
    {
        match &self.repr {
            Repr::Exact(f) => {
                let f = f.clone();
                Self::exact(move |x| f(map(x)))
            }
            Repr::Numeric { eval, diff } => {
                let eval = eval.clone();
                Self::numeric(
                    move |p| {
                        let y = map(Jet::seeds(p));
                        eval(y.map(|j| j.value.real_part()))
                    },
                    *diff,
                )
            }
        }
    }

    /// Multiplies the field by a constant.
    pub fn scaled(&self, k: T) -> Self {
        match &self.repr {
            Repr::Exact(f) => {
                let f = f.clone();
                Self::exact(move |x| f(x).scale(k))
            }
            Repr::Numeric { eval, diff } => {
                let eval = eval.clone();
                Self::numeric(move |p| eval(p) * k, *diff)
            }
        }
    }

    /// Evaluates an exact field on arbitrary input jets (chain rule).
    /// Numeric fields are differentiated at the input values and composed.
    pub fn on_jets<const M: usize>(&self, x: &[Jet<T, M>; N]) -> Jet<T, M>
    where
        T: RealPart,
    {
        let at = x.map(|j| j.value.real_part());
        match self.jet(at) {
            Ok(outer) => outer.compose(x),
            Err(_) => Jet::nan(),
        }
    }
}

/// Real part of a scalar (identity on `f64`).
pub trait RealPart {
    fn real_part(self) -> f64;
}

impl RealPart for f64 {
    fn real_part(self) -> f64 {
        self
    }
}

impl RealPart for num_complex::Complex64 {
    fn real_part(self) -> f64 {
        self.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_and_numeric_modes_agree() {
        let exact = ScalarField2::exact(|[u, v]| (u * v).sin() + u * u * v);
        let numeric = exact.to_numeric(NumericDiff::default());
        let at = [0.8, -0.6];
        let (je, _) = exact.jet_with_error(at).unwrap();
        let (jn, err) = numeric.jet_with_error(at).unwrap();
        for i in 0..2 {
            assert!((je.grad[i] - jn.grad[i]).abs() <= err.grad[i].max(1e-12));
            for j in 0..2 {
                assert!((je.hess[i][j] - jn.hess[i][j]).abs() <= err.hess[i][j].max(1e-10));
            }
        }
    }

    #[test]
    fn exact_mode_mixed_partials_are_symmetric() {
        let f = ScalarField2::exact(|[u, v]| (u * v.exp()).cos() / (1.0 + u * u));
        let j = f.jet([0.3, 1.1]).unwrap();
        assert_eq!(j.hess[0][1], j.hess[1][0]);
    }

    #[test]
    fn pullback_and_offset() {
        let f = ScalarField2::exact(|[u, v]| u * v);
        let g = f.pullback(|[u, v]| [v, u * 2.0]).plus_closed_form(|[u, _]| u * u);
        // g(u, v) = v * 2u + u^2
        let j = g.jet([1.5, 2.0]).unwrap();
        assert!((j.value - (2.0 * 1.5 * 2.0 + 2.25)).abs() < 1e-15);
        assert!((j.grad[0] - (4.0 + 3.0)).abs() < 1e-15);
        let n = g.to_numeric(NumericDiff::default());
        assert!((n.jet([1.5, 2.0]).unwrap().hess[0][1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn non_finite_exact_field_is_reported() {
        let f = ScalarField2::exact(|[u, _]| u.sqrt());
        assert!(matches!(f.jet([-1.0, 0.0]), Err(Error::NonFiniteSample { .. })));
    }
}
