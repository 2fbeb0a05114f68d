//! Quadratic-regulator synthesis: search for a 2x2 state-feedback gain
//! (flattened row-major into a 4-dimensional box) minimizing the expected
//! finite-horizon quadratic cost of `x' = Ax + Bu + w`, `u = Kx`. The
//! observation is the negated cost of one rollout, clamped into a declared
//! range so the optimizer sees bounded rewards; rollouts that blow up
//! report the range floor.
//!
//! The concrete matrices, the initial state and the gain box are fixed
//! choices of this crate, picked so the optimum is interior and nontrivial.

use crate::model::SynthesisModel;
use crate::real::Real;
use crate::region::Region;
use crate::rng::RngStream;

use super::ModelError;

pub type Mat2<F> = [[F; 2]; 2];

fn mat_vec<F: Real>(m: &Mat2<F>, v: [F; 2]) -> [F; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

fn quad_form<F: Real>(m: &Mat2<F>, v: [F; 2]) -> F {
    let mv = mat_vec(m, v);
    v[0] * mv[0] + v[1] * mv[1]
}

#[derive(Debug, Clone)]
pub struct LqrParams<F: Real> {
    pub a: Mat2<F>,
    pub b: Mat2<F>,
    pub q: Mat2<F>,
    pub r: Mat2<F>,
    pub horizon: usize,
    pub noise_sigma: F,
    /// Fixed (Dirac) initial state.
    pub x0: [F; 2],
    /// Per-entry bounds of the gain search box.
    pub gain_bounds: (F, F),
    /// Declared reward floor; one-rollout rewards live in `[floor, 0]`.
    pub reward_floor: F,
}

impl<F: Real> Default for LqrParams<F> {
    fn default() -> Self {
        let one = F::one();
        let zero = F::zero();
        Self {
            a: [[one, F::cast(0.1)], [zero, one]],
            b: [[one, zero], [zero, one]],
            q: [[one, zero], [zero, one]],
            r: [[one, zero], [zero, one]],
            horizon: 20,
            noise_sigma: F::cast(0.01),
            x0: [one, one],
            gain_bounds: (F::cast(-1.5), F::cast(0.5)),
            reward_floor: F::cast(-200.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Lqr<F: Real> {
    params: LqrParams<F>,
}

impl<F: Real> Lqr<F> {
    pub const NAME: &'static str = "lqr";

    pub fn new(params: LqrParams<F>) -> Result<Self, ModelError> {
        if params.horizon == 0 {
            return Err(ModelError::BadParam {
                model: Self::NAME,
                key: "horizon",
                reason: "must be at least 1".into(),
            });
        }
        if !(params.noise_sigma >= F::zero()) || !params.noise_sigma.is_finite() {
            return Err(ModelError::BadParam {
                model: Self::NAME,
                key: "noise_sigma",
                reason: "must be finite and non-negative".into(),
            });
        }
        if !(params.gain_bounds.0 < params.gain_bounds.1) {
            return Err(ModelError::BadParam {
                model: Self::NAME,
                key: "gain_bounds",
                reason: "lower bound must be below upper bound".into(),
            });
        }
        if !(params.reward_floor < F::zero()) {
            return Err(ModelError::BadParam {
                model: Self::NAME,
                key: "reward_floor",
                reason: "must be strictly negative".into(),
            });
        }
        Ok(Self { params })
    }

    pub fn with_defaults(horizon: usize, noise_sigma: F) -> Result<Self, ModelError> {
        Self::new(LqrParams { horizon, noise_sigma, ..LqrParams::default() })
    }

    pub fn params(&self) -> &LqrParams<F> {
        &self.params
    }

    fn gain(param: &[F]) -> Mat2<F> {
        [[param[0], param[1]], [param[2], param[3]]]
    }
}

impl<F: Real> SynthesisModel<F> for Lqr<F> {
    fn parameter_space(&self) -> Region<F> {
        let (lo, hi) = self.params.gain_bounds;
        Region::from_bounds(&[(lo, hi); 4]).expect("gain box is valid")
    }

    fn time_bound(&self) -> usize {
        self.params.horizon
    }

    fn state_dimension(&self) -> usize {
        2
    }

    fn reward_range(&self) -> (F, F) {
        (self.params.reward_floor, F::zero())
    }

    fn initial_state(&self, _: &mut RngStream) -> Vec<F> {
        self.params.x0.to_vec()
    }

    fn transition(&self, state: &[F], param: &[F], rng: &mut RngStream) -> Vec<F> {
        let p = &self.params;
        let x = [state[0], state[1]];
        let u = mat_vec(&Self::gain(param), x);
        let ax = mat_vec(&p.a, x);
        let bu = mat_vec(&p.b, u);
        vec![
            ax[0] + bu[0] + p.noise_sigma * F::std_normal(rng),
            ax[1] + bu[1] + p.noise_sigma * F::std_normal(rng),
        ]
    }

    /// Negated rollout cost `sum(x'Qx + u'Ru) + x_T'Qx_T`; non-finite
    /// rollouts report negative infinity, which the clamp maps to the floor.
    fn reward(&self, trace: &[Vec<F>], param: &[F]) -> F {
        let p = &self.params;
        let k = Self::gain(param);
        let mut cost = F::zero();
        for state in &trace[..trace.len() - 1] {
            let x = [state[0], state[1]];
            let u = mat_vec(&k, x);
            cost = cost + quad_form(&p.q, x) + quad_form(&p.r, u);
        }
        let last = trace.last().expect("trace is non-empty");
        cost = cost + quad_form(&p.q, [last[0], last[1]]);
        if !cost.is_finite() {
            return F::neg_infinity();
        }
        -cost
    }
}
