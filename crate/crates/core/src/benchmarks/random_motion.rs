//! A particle drifting on the plane by isotropic Gaussian increments,
//! checked against the set outside a disc. The initial-state box sits inside
//! the disc for the default radius of 4; the historically printed radius of 2
//! (which makes every initial state unsafe at step zero) stays selectable.

use crate::model::VerificationModel;
use crate::real::Real;
use crate::region::Region;
use crate::rng::RngStream;

use super::ModelError;

#[derive(Debug, Clone)]
pub struct RandomMotion<F: Real> {
    step_sigma: F,
    radius2: F,
    time_bound: usize,
}

impl<F: Real> RandomMotion<F> {
    pub const NAME: &'static str = "random-motion";

    pub fn new(step_sigma: F, radius: F, time_bound: usize) -> Result<Self, ModelError> {
        if !(step_sigma > F::zero()) {
            return Err(ModelError::BadParam {
                model: Self::NAME,
                key: "step_sigma",
                reason: "must be strictly positive".into(),
            });
        }
        if !(radius > F::zero()) {
            return Err(ModelError::BadParam {
                model: Self::NAME,
                key: "radius",
                reason: "must be strictly positive".into(),
            });
        }
        Ok(Self { step_sigma, radius2: radius * radius, time_bound })
    }
}

impl<F: Real> VerificationModel<F> for RandomMotion<F> {
    fn theta(&self) -> Region<F> {
        Region::from_bounds(&[
            (F::one(), F::cast(2.0)),
            (F::cast(2.0), F::cast(3.0)),
        ])
        .expect("theta box is valid")
    }

    fn time_bound(&self) -> usize {
        self.time_bound
    }

    fn state_dimension(&self) -> usize {
        2
    }

    fn transition(&self, state: &[F], rng: &mut RngStream) -> Vec<F> {
        vec![
            state[0] + self.step_sigma * F::std_normal(rng),
            state[1] + self.step_sigma * F::std_normal(rng),
        ]
    }

    fn is_unsafe(&self, state: &[F]) -> bool {
        state[0] * state[0] + state[1] * state[1] > self.radius2
    }
}
