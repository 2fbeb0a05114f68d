//! Single-lane platoon: `m` cars where each follower probabilistically
//! speeds up, cruises or brakes depending on its gap to the predecessor.
//! Unsafe means a collision (any gap reaching zero).
//!
//! All numeric details below (speeds, gap thresholds, action probabilities,
//! initial-uncertainty width) are concrete choices of this crate. The search
//! box perturbs the followers' initial positions around nominal spacing; the
//! leader is pinned at the origin since only relative positions matter.

use crate::model::VerificationModel;
use crate::real::Real;
use crate::region::Region;
use crate::rng::RngStream;

use super::ModelError;

/// Action probabilities as `(accelerate, cruise, brake)`.
pub type ActionProbs<F> = [F; 3];

#[derive(Debug, Clone)]
pub struct SlPlatoonParams<F: Real> {
    /// Cars on the lane, including the leader.
    pub num_cars: usize,
    pub time_bound: usize,
    /// Nominal bumper-to-bumper spacing.
    pub nominal_gap: F,
    /// Half-width of the initial position uncertainty per follower.
    pub theta_width: F,
    pub v_nominal: F,
    pub v_max: F,
    pub accel: F,
    pub decel: F,
    /// Gaps below this count as close.
    pub close_gap: F,
    /// Gaps above this count as far.
    pub far_gap: F,
    pub probs_close: ActionProbs<F>,
    pub probs_mid: ActionProbs<F>,
    pub probs_far: ActionProbs<F>,
}

impl<F: Real> Default for SlPlatoonParams<F> {
    fn default() -> Self {
        Self {
            num_cars: 3,
            time_bound: 10,
            nominal_gap: F::cast(10.0),
            theta_width: F::cast(4.0),
            v_nominal: F::cast(10.0),
            v_max: F::cast(20.0),
            accel: F::cast(2.0),
            decel: F::cast(4.0),
            close_gap: F::cast(5.0),
            far_gap: F::cast(15.0),
            probs_close: [F::cast(0.05), F::cast(0.15), F::cast(0.80)],
            probs_mid: [F::cast(0.20), F::cast(0.55), F::cast(0.25)],
            probs_far: [F::cast(0.70), F::cast(0.25), F::cast(0.05)],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SlPlatoon<F: Real> {
    params: SlPlatoonParams<F>,
}

impl<F: Real> SlPlatoon<F> {
    pub const NAME: &'static str = "sl-platoon";

    pub fn new(params: SlPlatoonParams<F>) -> Result<Self, ModelError> {
        let p = &params;
        if p.num_cars < 2 {
            return Err(ModelError::BadParam {
                model: Self::NAME,
                key: "num_cars",
                reason: "need at least a leader and one follower".into(),
            });
        }
        for (key, v) in [
            ("nominal_gap", p.nominal_gap),
            ("theta_width", p.theta_width),
            ("v_nominal", p.v_nominal),
            ("v_max", p.v_max),
            ("accel", p.accel),
            ("decel", p.decel),
        ] {
            if !(v > F::zero()) {
                return Err(ModelError::BadParam {
                    model: Self::NAME,
                    key: "params",
                    reason: format!("{key} must be strictly positive"),
                });
            }
        }
        if !(p.close_gap > F::zero() && p.far_gap > p.close_gap) {
            return Err(ModelError::BadParam {
                model: Self::NAME,
                key: "params",
                reason: "gap thresholds must satisfy 0 < close < far".into(),
            });
        }
        for probs in [&p.probs_close, &p.probs_mid, &p.probs_far] {
            let sum = probs[0] + probs[1] + probs[2];
            let off = (sum - F::one()).abs();
            if probs.iter().any(|q| *q < F::zero()) || off > F::cast(1e-9) {
                return Err(ModelError::BadParam {
                    model: Self::NAME,
                    key: "params",
                    reason: "action probabilities must be non-negative and sum to 1".into(),
                });
            }
        }
        Ok(Self { params })
    }

    pub fn with_defaults(num_cars: usize, time_bound: usize) -> Result<Self, ModelError> {
        Self::new(SlPlatoonParams { num_cars, time_bound, ..SlPlatoonParams::default() })
    }

    pub fn params(&self) -> &SlPlatoonParams<F> {
        &self.params
    }

    fn gap_probs(&self, gap: F) -> &ActionProbs<F> {
        if gap < self.params.close_gap {
            &self.params.probs_close
        } else if gap < self.params.far_gap {
            &self.params.probs_mid
        } else {
            &self.params.probs_far
        }
    }

    fn position(state: &[F], car: usize) -> F {
        state[2 * car]
    }

    fn speed(state: &[F], car: usize) -> F {
        state[2 * car + 1]
    }
}

impl<F: Real> VerificationModel<F> for SlPlatoon<F> {
    /// One position offset per follower.
    fn theta(&self) -> Region<F> {
        let w = self.params.theta_width;
        let bounds: Vec<(F, F)> = (1..self.params.num_cars).map(|_| (-w, w)).collect();
        Region::from_bounds(&bounds).expect("theta box is valid")
    }

    fn time_bound(&self) -> usize {
        self.params.time_bound
    }

    fn state_dimension(&self) -> usize {
        2 * self.params.num_cars
    }

    fn initial_state(&self, point: &[F]) -> Vec<F> {
        let p = &self.params;
        let mut state = Vec::with_capacity(2 * p.num_cars);
        state.push(F::zero());
        state.push(p.v_nominal);
        for (i, offset) in point.iter().enumerate() {
            let nominal = -F::from_usize(i + 1).expect("car index representable") * p.nominal_gap;
            state.push(nominal + *offset);
            state.push(p.v_nominal);
        }
        state
    }

    /// Synchronous step: every follower observes its old gap, draws one
    /// action, updates speed, then moves with the new speed.
    fn transition(&self, state: &[F], rng: &mut RngStream) -> Vec<F> {
        let p = &self.params;
        let m = p.num_cars;
        let mut next = Vec::with_capacity(2 * m);
        next.push(Self::position(state, 0) + Self::speed(state, 0));
        next.push(Self::speed(state, 0));
        for car in 1..m {
            let gap = Self::position(state, car - 1) - Self::position(state, car);
            let probs = self.gap_probs(gap);
            let u = F::uniform_01(rng);
            let dv = if u < probs[0] {
                p.accel
            } else if u < probs[0] + probs[1] {
                F::zero()
            } else {
                -p.decel
            };
            let v = (Self::speed(state, car) + dv).max(F::zero()).min(p.v_max);
            next.push(Self::position(state, car) + v);
            next.push(v);
        }
        next
    }

    fn is_unsafe(&self, state: &[F]) -> bool {
        (1..self.params.num_cars)
            .any(|car| Self::position(state, car - 1) - Self::position(state, car) <= F::zero())
    }
}
