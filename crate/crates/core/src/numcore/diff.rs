//! Central finite differences with Richardson extrapolation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Values that finite-difference stencils can combine linearly.
pub trait Sample: Clone {
    /// `Σ cᵢ vᵢ`; `terms` is never empty.
    fn combine(terms: &[(f64, &Self)]) -> Self;
    /// Max-abs norm.
    fn norm(&self) -> f64;
    fn all_finite(&self) -> bool;
}

impl Sample for f64 {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        terms.iter().map(|(c, v)| c * **v).sum()
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl Sample for Complex64 {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        terms.iter().map(|(c, v)| **v * *c).sum()
    }
    fn norm(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl Sample for DMatrix<Complex64> {
    fn combine(terms: &[(f64, &Self)]) -> Self {
        let mut out = terms[0].1 * Complex64::new(terms[0].0, 0.0);
        for (c, v) in &terms[1..] {
            out += *v * Complex64::new(*c, 0.0);
        }
        out
    }
    fn norm(&self) -> f64 {
        self.iter().map(Sample::norm).fold(0.0, f64::max)
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|z| z.is_finite())
    }
}

/// Which partial derivative a stencil estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Partial {
    First(usize),
    /// `Second(i, j)` differentiates in `j` first, then in `i`.
    Second(usize, usize),
}

impl Partial {
    pub const D1: Partial = Partial::First(0);
    pub const D2: Partial = Partial::First(1);
    pub const D11: Partial = Partial::Second(0, 0);
    pub const D12: Partial = Partial::Second(0, 1);
    pub const D21: Partial = Partial::Second(1, 0);
    pub const D22: Partial = Partial::Second(1, 1);

    pub fn order(self) -> i32 {
        match self {
            Partial::First(_) => 1,
            Partial::Second(..) => 2,
        }
    }
}

/// A derivative estimate with an error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffEstimate<V> {
    pub value: V,
    pub error_bound: f64,
}

/// Step and extrapolation depth used for value-only evaluators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericDiff {
    /// Step relative to `max(1, |coordinate|)`.
    pub rel_step: f64,
    pub levels: usize,
}

impl Default for NumericDiff {
    fn default() -> Self {
        Self {
            rel_step: 1e-2,
            levels: 2,
        }
    }
}

impl NumericDiff {
    pub fn steps<const N: usize>(&self, at: &[f64; N]) -> [f64; N] {
        at.map(|x| self.rel_step * x.abs().max(1.0))
    }
}

struct Sampler<'a, V, const N: usize> {
    f: &'a dyn Fn(&[f64; N]) -> V,
    max_abs: f64,
}

impl<V: Sample, const N: usize> Sampler<'_, V, N> {
    fn eval(&mut self, at: [f64; N]) -> Result<V> {
        let v = (self.f)(&at);
        if !v.all_finite() {
            return Err(Error::NonFiniteSample { point: at.to_vec() });
        }
        self.max_abs = self.max_abs.max(v.norm());
        Ok(v)
    }

    fn shifted(at: &[f64; N], moves: &[(usize, f64)]) -> [f64; N] {
        let mut p = *at;
        for &(i, d) in moves {
            p[i] += d;
        }
        p
    }

    /// Plain second-order central stencil with per-axis steps.
    fn stencil(&mut self, at: &[f64; N], which: Partial, h: &[f64; N]) -> Result<V> {
        match which {
            Partial::First(i) => {
                let fp = self.eval(Self::shifted(at, &[(i, h[i])]))?;
                let fm = self.eval(Self::shifted(at, &[(i, -h[i])]))?;
                let c = 0.5 / h[i];
                Ok(V::combine(&[(c, &fp), (-c, &fm)]))
            }
            Partial::Second(i, j) if i == j => {
                let fp = self.eval(Self::shifted(at, &[(i, h[i])]))?;
                let f0 = self.eval(*at)?;
                let fm = self.eval(Self::shifted(at, &[(i, -h[i])]))?;
                let c = 1.0 / (h[i] * h[i]);
                Ok(V::combine(&[(c, &fp), (-2.0 * c, &f0), (c, &fm)]))
            }
            Partial::Second(i, j) => {
                // inner difference in j, outer in i
                let mut inner = |base: [f64; N]| -> Result<V> {
                    let fp = self.eval(Self::shifted(&base, &[(j, h[j])]))?;
                    let fm = self.eval(Self::shifted(&base, &[(j, -h[j])]))?;
                    let c = 0.5 / h[j];
                    Ok(V::combine(&[(c, &fp), (-c, &fm)]))
                };
                let dp = inner(Self::shifted(at, &[(i, h[i])]))?;
                let dm = inner(Self::shifted(at, &[(i, -h[i])]))?;
                let c = 0.5 / h[i];
                Ok(V::combine(&[(c, &dp), (-c, &dm)]))
            }
        }
    }
}

fn roundoff_floor(max_abs: f64, which: Partial, h: f64) -> f64 {
    8.0 * f64::EPSILON * max_abs.max(f64::MIN_POSITIVE) / h.powi(which.order())
}

fn check_axes<const N: usize>(which: Partial) -> Result<()> {
    let ok = match which {
        Partial::First(i) => i < N,
        Partial::Second(i, j) => i < N && j < N,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{which:?} out of range for {N} variables")))
    }
}

/// Second-order central difference with per-axis steps; the error bound
/// comes from comparing against the half-step stencil.
pub fn central_diff_steps<V: Sample, const N: usize>(
    f: &dyn Fn(&[f64; N]) -> V,
    at: &[f64; N],
    which: Partial,
    h: &[f64; N],
) -> Result<DiffEstimate<V>> {
    check_axes::<N>(which)?;
    let mut s = Sampler { f, max_abs: 0.0 };
    let coarse = s.stencil(at, which, h)?;
    let half = h.map(|x| 0.5 * x);
    let fine = s.stencil(at, which, &half)?;
    let diff = V::combine(&[(1.0, &coarse), (-1.0, &fine)]).norm();
    let hmin = half.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DiffEstimate {
        value: coarse,
        error_bound: diff * 4.0 / 3.0 + roundoff_floor(s.max_abs, which, hmin),
    })
}

/// Second-order central difference with step `h` on every axis.
pub fn central_diff<V: Sample, const N: usize>(
    f: &dyn Fn(&[f64; N]) -> V,
    at: &[f64; N],
    which: Partial,
    h: f64,
) -> Result<DiffEstimate<V>> {
    if !(h > 0.0) {
        return Err(Error::InvalidParams(format!("step must be positive, got {h}")));
    }
    central_diff_steps(f, at, which, &[h; N])
}

/// Richardson extrapolation of the central stencil over steps
/// `h0, h0/2, …, h0/2^levels`, with per-axis base steps.
pub fn richardson_steps<V: Sample, const N: usize>(
    f: &dyn Fn(&[f64; N]) -> V,
    at: &[f64; N],
    which: Partial,
    h0: &[f64; N],
    levels: usize,
) -> Result<DiffEstimate<V>> {
    check_axes::<N>(which)?;
    if levels == 0 {
        return Err(Error::InvalidParams("richardson needs at least one level".into()));
    }
    let mut s = Sampler { f, max_abs: 0.0 };
    let mut table: Vec<Vec<V>> = Vec::with_capacity(levels + 1);
    let mut h = *h0;
    for k in 0..=levels {
        let mut row = vec![s.stencil(at, which, &h)?];
        let mut factor = 1.0;
        for m in 1..=k {
            factor *= 4.0;
            let c = 1.0 / (factor - 1.0);
            let next = V::combine(&[(1.0 + c, &row[m - 1]), (-c, &table[k - 1][m - 1])]);
            row.push(next);
        }
        table.push(row);
        h = h.map(|x| 0.5 * x);
    }
    let last = table[levels][levels].clone();
    let prev = &table[levels - 1][levels - 1];
    let diff = V::combine(&[(1.0, &last), (-1.0, prev)]).norm();
    let hmin = h.map(|x| 2.0 * x).iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DiffEstimate {
        value: last,
        error_bound: diff + roundoff_floor(s.max_abs, which, hmin),
    })
}

pub fn richardson<V: Sample, const N: usize>(
    f: &dyn Fn(&[f64; N]) -> V,
    at: &[f64; N],
    which: Partial,
    h0: f64,
    levels: usize,
) -> Result<DiffEstimate<V>> {
    if !(h0 > 0.0) {
        return Err(Error::InvalidParams(format!("step must be positive, got {h0}")));
    }
    richardson_steps(f, at, which, &[h0; N], levels)
}

/// All partials up to second order of a value-only evaluator.
#[derive(Clone, Debug)]
pub struct NumericPartials<V, const N: usize> {
    pub value: V,
    pub grad: [V; N],
    pub hess: [[V; N]; N],
    pub grad_error: [f64; N],
    pub hess_error: [[f64; N]; N],
}

pub fn numeric_partials<V: Sample, const N: usize>(
    f: &dyn Fn(&[f64; N]) -> V,
    at: &[f64; N],
    diff: &NumericDiff,
) -> Result<NumericPartials<V, N>> {
    let value = f(at);
    if !value.all_finite() {
        return Err(Error::NonFiniteSample { point: at.to_vec() });
    }
    let h = diff.steps(at);
    let mut grad = Vec::with_capacity(N);
    let mut grad_error = [0.0; N];
    for (i, err) in grad_error.iter_mut().enumerate() {
        let d = richardson_steps(f, at, Partial::First(i), &h, diff.levels)?;
        *err = d.error_bound;
        grad.push(d.value);
    }
    let mut hess: Vec<Vec<Option<V>>> = vec![vec![None; N]; N];
    let mut hess_error = [[0.0; N]; N];
    for i in 0..N {
        for j in i..N {
            let d = richardson_steps(f, at, Partial::Second(i, j), &h, diff.levels)?;
            hess_error[i][j] = d.error_bound;
            hess_error[j][i] = d.error_bound;
            hess[j][i] = Some(d.value.clone());
            hess[i][j] = Some(d.value);
        }
    }
    let grad: [V; N] = grad.try_into().unwrap_or_else(|_| unreachable!());
    let hess: [[V; N]; N] = std::array::from_fn(|i| {
        std::array::from_fn(|j| hess[i][j].take().expect("filled above"))
    });
    Ok(NumericPartials {
        value,
        grad,
        hess,
        grad_error,
        hess_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_first_derivative_is_exact_on_quadratics() {
        let f = |p: &[f64; 2]| p[0] * p[0];
        let d = central_diff(&f, &[3.0, 0.0], Partial::D1, 0.1).unwrap();
        assert!((d.value - 6.0).abs() <= 100.0 * f64::EPSILON * 9.0);
    }

    #[test]
    fn constant_has_zero_partials() {
        let f = |_: &[f64; 2]| 4.25;
        for which in [Partial::D1, Partial::D2, Partial::D11, Partial::D12, Partial::D22] {
            let d = central_diff(&f, &[0.3, -1.0], which, 0.05).unwrap();
            assert_eq!(d.value, 0.0);
        }
    }

    #[test]
    fn mixed_partial_of_sin_cos_within_bound() {
        let f = |p: &[f64; 2]| p[0].sin() * p[1].cos();
        let exact = -(0.7f64).cos() * (0.3f64).sin();
        let d = central_diff(&f, &[0.7, 0.3], Partial::D12, 1e-3).unwrap();
        assert!((d.value - exact).abs() <= d.error_bound, "{d:?} vs {exact}");
    }

    #[test]
    fn richardson_exp_first_derivative() {
        let f = |p: &[f64; 2]| p[0].exp();
        let d = richardson(&f, &[1.0, 0.0], Partial::D1, 0.1, 3).unwrap();
        assert!((d.value - std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn richardson_cubic_second_derivative() {
        let f = |p: &[f64; 2]| p[0].powi(3);
        let d = richardson(&f, &[2.0, 0.0], Partial::D11, 0.1, 2).unwrap();
        assert!((d.value - 12.0).abs() < 1e-9);
    }

    #[test]
    fn singular_input_is_flagged() {
        let f = |p: &[f64; 2]| 1.0 / p[0];
        match richardson(&f, &[1e-3, 0.0], Partial::D1, 1e-2, 2) {
            Err(Error::NonFiniteSample { .. }) => {}
            Ok(d) => assert!(d.error_bound > 1.0, "error bound {} not flagged", d.error_bound),
            Err(e) => panic!("unexpected {e}"),
        }
        // a stencil point landing on the pole is reported with its location
        let err = central_diff(&f, &[0.5, 0.0], Partial::D1, 0.5).unwrap_err();
        assert_eq!(err, Error::NonFiniteSample { point: vec![0.0, 0.0] });
    }

    #[test]
    fn richardson_error_bound_shrinks_with_levels() {
        let f = |p: &[f64; 2]| (p[0] * p[1]).sin() + p[1].exp() * p[0];
        for which in [Partial::D1, Partial::D11, Partial::D12] {
            let bounds: Vec<f64> = (1..=3)
                .map(|k| richardson(&f, &[0.4, 0.9], which, 0.2, k).unwrap().error_bound)
                .collect();
            assert!(bounds[1] <= bounds[0] && bounds[2] <= bounds[1], "{which:?}: {bounds:?}");
        }
    }

    #[test]
    fn nested_mixed_partials_agree() {
        let f = |p: &[f64; 2]| (p[0] + 2.0 * p[1]).cos() * p[0].exp();
        let a = richardson(&f, &[0.2, -0.4], Partial::D12, 0.05, 2).unwrap();
        let b = richardson(&f, &[0.2, -0.4], Partial::D21, 0.05, 2).unwrap();
        assert!((a.value - b.value).abs() <= a.error_bound + b.error_bound);
    }

    #[test]
    fn matrix_valued_samples() {
        let f = |p: &[f64; 1]| {
            DMatrix::from_row_slice(2, 2, &[
                Complex64::new(p[0] * p[0], 0.0),
                Complex64::new(0.0, p[0]),
                Complex64::new(1.0, 0.0),
                Complex64::new(-p[0] * p[0], 0.0),
            ])
        };
        let d = central_diff(&f, &[1.5], Partial::First(0), 0.1).unwrap();
        assert!((d.value[(0, 0)].re - 3.0).abs() < 1e-13);
        assert!((d.value[(0, 1)].im - 1.0).abs() < 1e-13);
        assert!(d.value[(1, 0)].norm() < 1e-13);
    }
}
