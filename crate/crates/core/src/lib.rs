//! Exact decision and verification of spectrality for infinite convolutions
//! generated by finite alphabets of stage pairs `(b, {0, ..., p - 1} t)` along
//! eventually periodic words.

pub mod classifier;
pub mod cli;
pub mod error;
pub mod exactmath;
pub mod hadamard;
pub mod measure;
pub mod oracle;
pub mod spectra;
pub mod tiling;

pub use error::{Error, Result};
pub use exactmath::Rational;
