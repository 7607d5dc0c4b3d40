//! Scalar abstraction for every score-bearing quantity in the crate.
//!
//! Graph topology is integer work; scores, similarities, quantiles and AUC
//! curves are all expressed over a [`Scalar`] so the engine runs on `f32`
//! or `f64` alike. The crate root exports [`crate::Score`] (`f64`) as the
//! concrete default used by the CLI and bundled configs.

use std::fmt::{Debug, Display};

use num_traits::Float;
use rand::distributions::uniform::SampleUniform;
use serde::Serialize;

/// Floating-point scalar usable for scores and sampler math.
pub trait Scalar:
    Float + SampleUniform + Serialize + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `usize`, used for count ratios.
    fn from_count(n: usize) -> Self {
        Self::from(n).expect("count representable in scalar")
    }

    /// Lossy conversion from `f64` constants declared in configs.
    fn from_config(x: f64) -> Self {
        Self::from(x).expect("config value representable in scalar")
    }
}

impl<T> Scalar for T where
    T: Float + SampleUniform + Serialize + Debug + Display + Send + Sync + 'static
{
}
