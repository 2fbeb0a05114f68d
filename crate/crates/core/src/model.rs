//! Black-box system models and the reduction from verification / synthesis
//! questions to noisy bandit observations.
//!
//! A verification model exposes a transition sampler and an unsafe-state
//! predicate; observing a point means simulating a bounded run from that
//! initial state and reporting whether it ever became unsafe. A synthesis
//! model exposes a parametrized transition sampler and a bounded reward;
//! observing a parameter means rolling one trace and reporting its reward.
//! Either way the observation is bounded, so half the range width is always
//! a valid sub-Gaussian scale for the optimizer.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::objective::{NoisyObjective, SimError};
use crate::real::Real;
use crate::region::Region;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Verification,
    Synthesis,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Verification => "verification",
            Mode::Synthesis => "synthesis",
        }
    }
}

/// A bounded noisy reward sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation<F: Real> {
    value: F,
    lo: F,
    hi: F,
    clamped: bool,
}

impl<F: Real> Observation<F> {
    fn new(value: F, lo: F, hi: F, clamped: bool) -> Self {
        debug_assert!(value >= lo && value <= hi);
        Self { value, lo, hi, clamped }
    }

    pub fn value(&self) -> F {
        self.value
    }

    pub fn range(&self) -> (F, F) {
        (self.lo, self.hi)
    }

    /// Whether the raw sample fell outside the declared range.
    pub fn was_clamped(&self) -> bool {
        self.clamped
    }
}

/// Discrete-time system with uncertain initial state, checked against an
/// unsafe set.
pub trait VerificationModel<F: Real>: Send + Sync {
    /// Initial-state uncertainty box searched over.
    fn theta(&self) -> Region<F>;

    /// Number of transition steps per simulated run.
    fn time_bound(&self) -> usize;

    fn state_dimension(&self) -> usize;

    /// Expand a search point into a full initial state. Identity when the
    /// search box and the state space coincide.
    fn initial_state(&self, point: &[F]) -> Vec<F> {
        point.to_vec()
    }

    /// Sample the next state.
    fn transition(&self, state: &[F], rng: &mut RngStream) -> Vec<F>;

    fn is_unsafe(&self, state: &[F]) -> bool;

    /// Closed-form hitting probability for models specified directly by one;
    /// such models never run their transition.
    fn hit_probability(&self, _point: &[F]) -> Option<F> {
        None
    }
}

/// Discrete-time system with uncertain parameters, scored by a bounded
/// reward over one trace.
pub trait SynthesisModel<F: Real>: Send + Sync {
    /// Parameter box searched over.
    fn parameter_space(&self) -> Region<F>;

    fn time_bound(&self) -> usize;

    fn state_dimension(&self) -> usize;

    /// Declared closed reward range; raw rewards are clamped into it.
    fn reward_range(&self) -> (F, F);

    /// Draw the initial state. A fixed return value is a Dirac initial
    /// distribution.
    fn initial_state(&self, rng: &mut RngStream) -> Vec<F>;

    fn transition(&self, state: &[F], param: &[F], rng: &mut RngStream) -> Vec<F>;

    /// Reward of a full trace `x_0..x_k` under `param`.
    fn reward(&self, trace: &[Vec<F>], param: &[F]) -> F;
}

/// Bernoulli hit observation: 1 when the bounded run from `x0` reaches an
/// unsafe state (the initial state counts), 0 otherwise. Consumes exactly the
/// random draws of the steps actually taken.
pub fn simulate_hit<F: Real>(
    model: &dyn VerificationModel<F>,
    x0: &[F],
    rng: &mut RngStream,
) -> Result<Observation<F>, SimError> {
    let hit = |v: F| Observation::new(v, F::zero(), F::one(), false);

    if let Some(p) = model.hit_probability(x0) {
        let u = F::uniform_01(rng);
        return Ok(hit(if u < p { F::one() } else { F::zero() }));
    }

    let mut state = model.initial_state(x0);
    if model.is_unsafe(&state) {
        return Ok(hit(F::one()));
    }
    for step in 1..=model.time_bound() {
        state = model.transition(&state, rng);
        if state.iter().any(|x| !x.is_finite()) {
            return Err(SimError::NonFiniteState { step });
        }
        if model.is_unsafe(&state) {
            return Ok(hit(F::one()));
        }
    }
    Ok(hit(F::zero()))
}

/// Reward observation of one trace rolled under `param`, clamped into the
/// model's declared range.
pub fn simulate_reward<F: Real>(
    model: &dyn SynthesisModel<F>,
    param: &[F],
    rng: &mut RngStream,
) -> Result<Observation<F>, SimError> {
    let mut trace = Vec::with_capacity(model.time_bound() + 1);
    trace.push(model.initial_state(rng));
    for _ in 1..=model.time_bound() {
        let next = model.transition(trace.last().expect("trace is non-empty"), param, rng);
        trace.push(next);
    }
    let raw = model.reward(&trace, param);
    if raw.is_nan() {
        return Err(SimError::NonFiniteReward);
    }
    let (lo, hi) = model.reward_range();
    let value = raw.max(lo).min(hi);
    Ok(Observation::new(value, lo, hi, value != raw))
}

enum Kind<F: Real> {
    Verification(Arc<dyn VerificationModel<F>>),
    Synthesis(Arc<dyn SynthesisModel<F>>),
}

impl<F: Real> Clone for Kind<F> {
    fn clone(&self) -> Self {
        match self {
            Kind::Verification(m) => Kind::Verification(Arc::clone(m)),
            Kind::Synthesis(m) => Kind::Synthesis(Arc::clone(m)),
        }
    }
}

/// A registered model of either mode, usable directly as a noisy objective.
/// Clones share the underlying model and the clamp-event counter.
#[derive(Clone)]
pub struct NmcModel<F: Real> {
    kind: Kind<F>,
    clamp_events: Arc<AtomicU64>,
}

impl<F: Real> fmt::Debug for NmcModel<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NmcModel")
            .field("mode", &self.mode().name())
            .field("search_dim", &self.search_space().dim())
            .field("time_bound", &self.time_bound())
            .finish()
    }
}

impl<F: Real> NmcModel<F> {
    pub fn verification(model: impl VerificationModel<F> + 'static) -> Self {
        Self {
            kind: Kind::Verification(Arc::new(model)),
            clamp_events: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn synthesis(model: impl SynthesisModel<F> + 'static) -> Self {
        Self {
            kind: Kind::Synthesis(Arc::new(model)),
            clamp_events: Arc::new(AtomicU64::new(0)),
        }
    }

    pub fn mode(&self) -> Mode {
        match &self.kind {
            Kind::Verification(_) => Mode::Verification,
            Kind::Synthesis(_) => Mode::Synthesis,
        }
    }

    pub fn search_space(&self) -> Region<F> {
        match &self.kind {
            Kind::Verification(m) => m.theta(),
            Kind::Synthesis(m) => m.parameter_space(),
        }
    }

    pub fn time_bound(&self) -> usize {
        match &self.kind {
            Kind::Verification(m) => m.time_bound(),
            Kind::Synthesis(m) => m.time_bound(),
        }
    }

    pub fn state_dimension(&self) -> usize {
        match &self.kind {
            Kind::Verification(m) => m.state_dimension(),
            Kind::Synthesis(m) => m.state_dimension(),
        }
    }

    /// Closed observation range: `[0, 1]` for hit observations, the declared
    /// reward range for synthesis.
    pub fn observation_range(&self) -> (F, F) {
        match &self.kind {
            Kind::Verification(_) => (F::zero(), F::one()),
            Kind::Synthesis(m) => m.reward_range(),
        }
    }

    /// Half the observation range width: always a valid sub-Gaussian scale
    /// for bounded observations.
    pub fn sigma_bound(&self) -> F {
        let (lo, hi) = self.observation_range();
        (hi - lo) / F::cast(2.0)
    }

    /// Exact observation mean, when the model defines one in closed form.
    pub fn exact_mean(&self, point: &[F]) -> Option<F> {
        match &self.kind {
            Kind::Verification(m) => m.hit_probability(point),
            Kind::Synthesis(_) => None,
        }
    }

    /// Number of observations clamped into the declared range so far, summed
    /// over all clones of this model.
    pub fn clamp_events(&self) -> u64 {
        self.clamp_events.load(Ordering::Relaxed)
    }

    fn check_point(&self, point: &[F]) -> Result<(), SimError> {
        let space = self.search_space();
        if point.len() != space.dim() {
            return Err(SimError::DimensionMismatch { expected: space.dim(), got: point.len() });
        }
        if !space.contains(point) {
            return Err(SimError::OutOfDomain);
        }
        Ok(())
    }

    /// One mode-appropriate observation at `point`.
    pub fn observe_at(&self, point: &[F], rng: &mut RngStream) -> Result<Observation<F>, SimError> {
        self.check_point(point)?;
        let obs = match &self.kind {
            Kind::Verification(m) => simulate_hit(m.as_ref(), point, rng)?,
            Kind::Synthesis(m) => simulate_reward(m.as_ref(), point, rng)?,
        };
        if obs.was_clamped() {
            self.clamp_events.fetch_add(1, Ordering::Relaxed);
        }
        Ok(obs)
    }
}

impl<F: Real> NoisyObjective<F> for NmcModel<F> {
    fn observe(&self, point: &[F], rng: &mut RngStream) -> Result<F, SimError> {
        self.observe_at(point, rng).map(|obs| obs.value())
    }
}
