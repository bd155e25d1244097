//! Absolute quantum-phase observable on a truncated number basis.
//!
//! The crate builds the number operator, the one-sided shifts `E`, `E†`, the
//! Carruthers–Nieto `C` and `S`, and the absolute-phase operator `Φ` with its
//! closed-form companions `cos Φ` and `sin²Φ`. Every closed form has an
//! independent Gauss–Legendre route through [`operators::phase_function_operator`].
//! On top of these sit number-state phase distributions, coherent-state
//! classical-limit sweeps and the plane-rotator angle operator.

pub mod classical_limit;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod numerics;
pub mod operators;
pub mod rotator;
pub mod states;

pub use error::{Error, Result};
