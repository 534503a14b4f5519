//! Shared numerics: grids, jets, finite differences, quadrature, root
//! finding and RK4.

pub mod diff;
pub mod field;
pub mod grid;
pub mod jet;
pub mod ode;
pub mod quad;
pub mod root;

pub use diff::{central_diff, richardson, DiffEstimate, NumericDiff, Partial, Sample};
pub use field::{ComplexField2, DerivMode, Field, Profile, RealPart, ScalarField2};
pub use grid::{Grid1, Grid2};
pub use jet::{Jet, Scalar};
pub use ode::{rk4, rk4_endpoint};
pub use quad::{romberg, trapezoid_integrate};
pub use root::{solve_scalar, solve_scalar_newton};
