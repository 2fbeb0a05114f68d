//! Scalar abstraction: the whole engine is generic over the floating-point
//! type through [`Real`]. `f64` is the default used by the registry and CLI;
//! `f32` is available for memory-bound embeddings.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::rng::RngStream;

/// Floating-point scalar usable throughout the engine.
///
/// Bundles the numeric traits the algorithms need plus the two random draws
/// the simulators use, so downstream bounds stay at `F: Real`.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Display + Debug + Send + Sync + 'static
{
    /// Uniform draw from `[0, 1)`.
    fn uniform_01(rng: &mut RngStream) -> Self;

    /// Standard normal draw.
    fn std_normal(rng: &mut RngStream) -> Self;

    /// Conversion for literals and configuration values.
    fn cast(v: f64) -> Self;

    /// Lossy view as `f64` (used for reporting).
    fn as_f64(self) -> f64;
}

impl Real for f64 {
    fn uniform_01(rng: &mut RngStream) -> Self {
        rng.random()
    }

    fn std_normal(rng: &mut RngStream) -> Self {
        StandardNormal.sample(rng)
    }

    fn cast(v: f64) -> Self {
        v
    }

    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    fn uniform_01(rng: &mut RngStream) -> Self {
        rng.random()
    }

    fn std_normal(rng: &mut RngStream) -> Self {
        StandardNormal.sample(rng)
    }

    fn cast(v: f64) -> Self {
        v as f32
    }

    fn as_f64(self) -> f64 {
        f64::from(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamSeed;

    #[test]
    fn draws_are_reproducible_per_type() {
        let mut a = StreamSeed::new(7, 0).rng();
        let mut b = StreamSeed::new(7, 0).rng();
        for _ in 0..32 {
            assert_eq!(f64::uniform_01(&mut a), f64::uniform_01(&mut b));
            assert_eq!(f64::std_normal(&mut a), f64::std_normal(&mut b));
        }
    }

    #[test]
    fn uniform_is_in_unit_interval() {
        let mut rng = StreamSeed::new(3, 1).rng();
        for _ in 0..1000 {
            let u = f32::uniform_01(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }
}
