//! Spherically symmetric reductions of the self-dual Yang-Mills and
//! Plebanski equations.
//!
//! The crate evaluates the full four-dimensional equations on the real slice,
//! lifts reduced fields through the spherical ansatz, and checks every reduced
//! equation and closed-form solution family against independent residual
//! oracles. [`alphachain`] reconstructs the Monge-Ampère potential from a
//! solution of the reduced α-equation, and [`evolve`] integrates that equation
//! in time in its hyperbolic regime.

pub mod alphachain;
pub mod error;
pub mod evolve;
pub mod families;
pub mod numcore;
pub mod plebanski4d;
pub mod sdym;
pub mod testfields;

pub use error::{Error, Result};
pub use num_complex::Complex64;
