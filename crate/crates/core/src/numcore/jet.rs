//! Second-order forward-mode derivatives.
//!
//! A [`Jet`] carries a value together with its gradient and Hessian with
//! respect to `N` seed variables. Closed-form fields are written as ordinary
//! arithmetic on jets, which yields exact first and second partials.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Field of values a jet can carry: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn from_f64(x: f64) -> Self;
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn conj(self) -> Self;
    fn scale(self, k: f64) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn conj(self) -> Self {
        self
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
}

impl Scalar for Complex64 {
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn ln(self) -> Self {
        Complex64::ln(self)
    }
    fn sin(self) -> Self {
        Complex64::sin(self)
    }
    fn cos(self) -> Self {
        Complex64::cos(self)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
}

/// Value, gradient and Hessian of a function of `N` seed variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T, const N: usize> {
    pub value: T,
    pub grad: [T; N],
    pub hess: [[T; N]; N],
}

impl<T: Scalar, const N: usize> Jet<T, N> {
    pub fn constant(value: T) -> Self {
        Self {
            value,
            grad: [T::zero(); N],
            hess: [[T::zero(); N]; N],
        }
    }

    /// The seed variable with index `index`, evaluated at `value`.
    pub fn variable(value: T, index: usize) -> Self {
        let mut jet = Self::constant(value);
        jet.grad[index] = T::one();
        jet
    }

    /// All `N` seed variables at the point `at`.
    pub fn seeds(at: [f64; N]) -> [Self; N] {
        std::array::from_fn(|i| Self::variable(T::from_f64(at[i]), i))
    }

    pub fn is_finite(&self) -> bool {
        self.value.finite()
            && self.grad.iter().all(|g| g.finite())
            && self.hess.iter().flatten().all(|h| h.finite())
    }

    /// A jet whose every component is NaN; evaluators return it when a
    /// closed form leaves its domain.
    pub fn nan() -> Self {
        let n = T::from_f64(f64::NAN);
        Self {
            value: n,
            grad: [n; N],
            hess: [[n; N]; N],
        }
    }

    /// Copies the upper triangle of the Hessian onto the lower one so mixed
    /// partials are symmetric bit for bit.
    fn mirrored(mut self) -> Self {
        for i in 0..N {
            for j in 0..i {
                self.hess[i][j] = self.hess[j][i];
            }
        }
        self
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value`.
    pub fn chain(self, f: T, df: T, d2f: T) -> Self {
        let mut out = Self::constant(f);
        for i in 0..N {
            out.grad[i] = df * self.grad[i];
        }
        for i in 0..N {
            for j in 0..N {
                out.hess[i][j] = df * self.hess[i][j] + d2f * self.grad[i] * self.grad[j];
            }
        }
        out.mirrored()
    }

    pub fn recip(self) -> Self {
        let v = self.value;
        let r = T::one() / v;
        self.chain(r, -(r * r), (r * r * r).scale(2.0))
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(T::one()),
            1 => self,
            n if n < 0 => self.recip().powi(-n),
            n => {
                let v = self.value;
                let mut p2 = T::one();
                for _ in 0..(n - 2) {
                    p2 *= v;
                }
                let p1 = p2 * v;
                let p0 = p1 * v;
                let nf = n as f64;
                self.chain(p0, p1.scale(nf), p2.scale(nf * (nf - 1.0)))
            }
        }
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        let d1 = T::one() / s.scale(2.0);
        let d2 = -(T::one() / (s * s * s).scale(4.0));
        self.chain(s, d1, d2)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let v = self.value;
        self.chain(v.ln(), T::one() / v, -(T::one() / (v * v)))
    }

    pub fn sin(self) -> Self {
        let (s, c) = (self.value.sin(), self.value.cos());
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = (self.value.sin(), self.value.cos());
        self.chain(c, -s, -c)
    }

    pub fn conj(self) -> Self {
        Self {
            value: self.value.conj(),
            grad: self.grad.map(|g| g.conj()),
            hess: self.hess.map(|row| row.map(|h| h.conj())),
        }
    }

    /// Multiplies by a constant of the jet's own scalar type.
    pub fn scale(self, k: T) -> Self {
        Self {
            value: self.value * k,
            grad: self.grad.map(|g| g * k),
            hess: self.hess.map(|row| row.map(|h| h * k)),
        }
    }

    /// Chain rule: `self` holds the partials of an outer function `g` of `N`
    /// variables; `inner` maps `M` seeds to those `N` variables.
    pub fn compose<const M: usize>(&self, inner: &[Jet<T, M>; N]) -> Jet<T, M> {
        let mut out = Jet::<T, M>::constant(self.value);
        for i in 0..M {
            let mut g = T::zero();
            for k in 0..N {
                g += self.grad[k] * inner[k].grad[i];
            }
            out.grad[i] = g;
        }
        for i in 0..M {
            for j in 0..M {
                let mut h = T::zero();
                for k in 0..N {
                    h += self.grad[k] * inner[k].hess[i][j];
                    for l in 0..N {
                        h += self.hess[k][l] * inner[k].grad[i] * inner[l].grad[j];
                    }
                }
                out.hess[i][j] = h;
            }
        }
        out.mirrored()
    }
}

impl<const N: usize> Jet<f64, N> {
    /// Embeds a real jet into the complex numbers.
    pub fn complexify(&self) -> Jet<Complex64, N> {
        Jet {
            value: Complex64::new(self.value, 0.0),
            grad: self.grad.map(|g| Complex64::new(g, 0.0)),
            hess: self.hess.map(|row| row.map(|h| Complex64::new(h, 0.0))),
        }
    }
}

impl<T: Scalar, const N: usize> Add for Jet<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        out.value += rhs.value;
        for i in 0..N {
            out.grad[i] += rhs.grad[i];
            for j in 0..N {
                out.hess[i][j] += rhs.hess[i][j];
            }
        }
        out
    }
}

impl<T: Scalar, const N: usize> Sub for Jet<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar, const N: usize> Neg for Jet<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            value: -self.value,
            grad: self.grad.map(|g| -g),
            hess: self.hess.map(|row| row.map(|h| -h)),
        }
    }
}

impl<T: Scalar, const N: usize> Mul for Jet<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::constant(self.value * rhs.value);
        for i in 0..N {
            out.grad[i] = self.value * rhs.grad[i] + rhs.value * self.grad[i];
        }
        for i in 0..N {
            for j in 0..N {
                out.hess[i][j] = self.value * rhs.hess[i][j]
                    + rhs.value * self.hess[i][j]
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i];
            }
        }
        out.mirrored()
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl<T: Scalar, const N: usize> Div for Jet<T, N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<T: Scalar, const N: usize> Add<f64> for Jet<T, N> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.value += T::from_f64(rhs);
        self
    }
}

impl<T: Scalar, const N: usize> Sub<f64> for Jet<T, N> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.value -= T::from_f64(rhs);
        self
    }
}

impl<T: Scalar, const N: usize> Mul<f64> for Jet<T, N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(T::from_f64(rhs))
    }
}

impl<T: Scalar, const N: usize> Div<f64> for Jet<T, N> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self.scale(T::from_f64(1.0 / rhs))
    }
}

impl<T: Scalar, const N: usize> Add<Jet<T, N>> for f64 {
    type Output = Jet<T, N>;
    fn add(self, rhs: Jet<T, N>) -> Jet<T, N> {
        rhs + self
    }
}

impl<T: Scalar, const N: usize> Sub<Jet<T, N>> for f64 {
    type Output = Jet<T, N>;
    fn sub(self, rhs: Jet<T, N>) -> Jet<T, N> {
        (-rhs) + self
    }
}

impl<T: Scalar, const N: usize> Mul<Jet<T, N>> for f64 {
    type Output = Jet<T, N>;
    fn mul(self, rhs: Jet<T, N>) -> Jet<T, N> {
        rhs * self
    }
}

impl<T: Scalar, const N: usize> Div<Jet<T, N>> for f64 {
    type Output = Jet<T, N>;
    fn div(self, rhs: Jet<T, N>) -> Jet<T, N> {
        rhs.recip() * self
    }
}
