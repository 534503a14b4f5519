//! Seeded random smooth fields and sample points for the lift oracles.
//!
//! Fields are finite sums of sinusoid-times-linear terms plus a quadratic
//! polynomial, with every coefficient drawn uniformly from `[−1, 1]`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numcore::{Jet, Scalar, ScalarField2};
use crate::plebanski4d::Point4C;
use crate::sdym::{LieElement, MatrixField2};

const SINE_TERMS: usize = 3;

#[derive(Clone, Debug)]
struct SmoothCoefficients {
    sines: [[f64; 6]; SINE_TERMS],
    poly: [f64; 6],
}

impl SmoothCoefficients {
    fn draw(rng: &mut impl Rng) -> Self {
        let mut u = || rng.gen_range(-1.0..=1.0);
        Self {
            sines: std::array::from_fn(|_| std::array::from_fn(|_| u())),
            poly: std::array::from_fn(|_| u()),
        }
    }

    fn eval<T: Scalar, const N: usize>(&self, u: Jet<T, N>, v: Jet<T, N>) -> Jet<T, N> {
        let q = &self.poly;
        let mut acc = u * q[1] + v * q[2] + u * u * q[3] + u * v * q[4] + v * v * q[5] + q[0];
        for s in &self.sines {
            let phase = u * s[1] + v * s[2] + s[3];
            acc = acc + phase.sin() * (u * s[4] + v * s[5] + 1.0) * s[0];
        }
        acc
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random smooth real field with exact partials.
pub fn random_scalar_field(rng: &mut impl Rng) -> ScalarField2 {
    let coeffs = SmoothCoefficients::draw(rng);
    ScalarField2::exact(move |[u, v]| coeffs.eval(u, v))
}

/// A random smooth field valued in traceless `n × n` matrices: one random
/// scalar coefficient per element of the traceless basis.
pub fn random_matrix_field(rng: &mut impl Rng, n: usize) -> MatrixField2 {
    let basis = LieElement::traceless_basis(n);
    let components: Vec<(SmoothCoefficients, LieElement)> = basis
        .into_iter()
        .map(|b| (SmoothCoefficients::draw(rng), b))
        .collect();
    MatrixField2::from_components(
        n,
        components
            .into_iter()
            .map(|(c, b)| {
                let f: Box<dyn Fn([Jet<Complex64, 2>; 2]) -> Jet<Complex64, 2> + Send + Sync> =
                    Box::new(move |[u, v]| c.eval(u, v));
                (f, b)
            })
            .collect(),
    )
}

/// A random chart point with `|y| ∈ [0.3, 1.5]` and `z` in the unit box.
pub fn random_point(rng: &mut impl Rng) -> Point4C {
    let rho = rng.gen_range(0.3..=1.5);
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let y = Complex64::from_polar(rho, theta);
    let z = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
    Point4C::new(y, z)
}
