//! Quadrature, summation and sampling utilities.

pub mod gk;
pub mod hermite;
pub mod rng;
pub mod segment;
pub mod sum;

pub use gk::{integrate_adaptive, QuadOptions};
pub use hermite::{gauss_hermite, GaussHermite3};
pub use sum::{ComplexSum, NeumaierSum};
