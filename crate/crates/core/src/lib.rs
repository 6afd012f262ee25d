//! Variable-exponent Lebesgue and Hardy space numerics: Luxemburg norms,
//! maximal operators, moment-cancelling atoms, multilinear fractional
//! integrals and their commutators, plus a harness that sweeps the
//! quantitative inequalities relating them.

pub mod atoms;
pub mod error;
pub mod exponent;
pub mod fractional;
pub mod geometry;
pub mod harness;
pub mod maximal;
pub mod norms;
pub mod report;

pub use error::{Error, Result};
