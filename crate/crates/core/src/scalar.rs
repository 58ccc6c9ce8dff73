use std::fmt::{Debug, Display};
use std::str::FromStr;

use nalgebra::RealField;
use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point element type for datasets, tests and estimators.
pub trait Scalar:
    RealField + Float + FromPrimitive + ToPrimitive + Copy + Debug + Display + FromStr + Send + Sync + 'static
{
    fn from_f64_lossy(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite conversion")
    }

    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
