//! Certified numeric evaluation. Every value carries an explicit
//! absolute error bound, so agreement checks are interval overlaps
//! rather than tolerance guesses.

use thiserror::Error;

pub mod bigfloat;
mod cache;
mod direct;
mod eval;

pub use bigfloat::{numeric_equal, Bf, PrecisionReal};
pub use cache::ConstantCache;
pub use direct::eval_so_direct;
pub use eval::{eval_combo, eval_depth1, eval_term, eval_witten, pi};

/// Precision request for the high-precision evaluators: results come
/// back with err below 10^-digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    pub digits: u32,
}

impl EvalConfig {
    /// Error accounting runs in f64, which caps the usable range.
    pub const MAX_DIGITS: u32 = 160;

    pub fn new(digits: u32) -> Self {
        assert!(
            (1..=Self::MAX_DIGITS).contains(&digits),
            "digits must be in 1..={}",
            Self::MAX_DIGITS
        );
        EvalConfig { digits }
    }

    /// Working mantissa scale: the requested digits plus guard bits.
    pub fn bits(&self) -> u32 {
        (self.digits as f64 * 3.321928094887362).ceil() as u32 + 96
    }

    /// Internal error budget, two orders below the requested digits.
    pub fn epsilon(&self) -> f64 {
        10f64.powi(-(self.digits as i32) - 2)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("divergent term")]
    DivergentTerm,
    #[error("requested accuracy unreachable: {0}")]
    TargetUnreachable(String),
    #[error("domain error: {0}")]
    Domain(String),
}
