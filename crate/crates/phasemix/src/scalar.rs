use num_traits::{Float, NumCast};

/// Scalar type for the numeric core (plane encoding, network math, losses).
/// Implemented for `f32` and `f64`; training runs on `f32`, oracles and
/// gradient checks instantiate `f64`.
pub trait Scalar:
    Float + NumCast + Default + std::fmt::Debug + std::iter::Sum + Send + Sync + 'static
{
    fn from_f64(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("finite constant")
    }

    fn from_usize(v: usize) -> Self {
        <Self as NumCast>::from(v).expect("usize fits")
    }

    fn to_f64_lossy(self) -> f64 {
        <f64 as NumCast>::from(self).expect("float widens")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
