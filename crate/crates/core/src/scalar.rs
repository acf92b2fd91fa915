use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use ndarray::ScalarOperand;
use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating point scalar used throughout the crate: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + NumAssign + ScalarOperand + Sum + Debug + Display + FromStr + Default + Send + Sync + 'static
{
    /// Converts an `f64` constant, rounding to the nearest representable value.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable")
    }

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite or infinite float converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
