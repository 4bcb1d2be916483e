use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point weight type: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + Sum + Debug + Display + Default + Send + Sync + Serialize + DeserializeOwned + 'static
{
    fn from_count(n: u64) -> Self {
        // Always representable (possibly rounded) for IEEE floats.
        Self::from_u64(n).expect("float from u64")
    }

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("float from f64")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("float to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
