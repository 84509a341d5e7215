//! Exact rearrangement functionals on the circle `R/Z`.
//!
//! Everything here is computed with arbitrary-precision rationals: arc unions,
//! convolutions of indicators (piecewise linear), Riesz-Sobolev and Kneser
//! defects, polarization, the interval-growth flow and rank-one Bohr set
//! fitting. A brute-force model on `Z/N` lives in [`oracle`].
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;

pub mod bohr;
pub mod circle;
pub mod flow;
pub mod functionals;
pub mod oracle;
pub mod piecewise;
pub mod random;
pub mod rational;
pub mod rearrange;
pub mod reductions;

pub use circle::{Arc, BoolOp, CirclePoint, IntervalSet, SetTransform};
pub use error::{Error, Result};
pub use piecewise::{PLFn, StepFn};
pub use rational::Rational;
