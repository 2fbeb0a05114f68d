//! Conceptual verification target with a closed-form hitting probability:
//! a Gaussian bump of height `p_max` centered at (0.5, 0.5) whose slope is
//! controlled by `s`. Small `s` makes the peak a needle that is hard to find
//! by uniform sampling. There are no dynamics; observations are Bernoulli
//! draws from the formula itself.

use crate::model::VerificationModel;
use crate::real::Real;
use crate::region::Region;
use crate::rng::RngStream;

use super::ModelError;

#[derive(Debug, Clone)]
pub struct Sharp<F: Real> {
    s: F,
    p_max: F,
    time_bound: usize,
}

impl<F: Real> Sharp<F> {
    pub const NAME: &'static str = "sharp";

    pub fn new(s: F, p_max: F, time_bound: usize) -> Result<Self, ModelError> {
        if !(s > F::zero()) {
            return Err(ModelError::BadParam {
                model: Self::NAME,
                key: "s",
                reason: "must be strictly positive".into(),
            });
        }
        if !(p_max > F::zero() && p_max <= F::one()) {
            return Err(ModelError::BadParam {
                model: Self::NAME,
                key: "p_max",
                reason: "must lie in (0, 1]".into(),
            });
        }
        Ok(Self { s, p_max, time_bound })
    }

    pub fn mean(&self, point: &[F]) -> F {
        let half = F::cast(0.5);
        let dx = point[0] - half;
        let dy = point[1] - half;
        self.p_max * (-(dx * dx + dy * dy) / self.s).exp()
    }
}

impl<F: Real> VerificationModel<F> for Sharp<F> {
    fn theta(&self) -> Region<F> {
        Region::unit(2)
    }

    fn time_bound(&self) -> usize {
        self.time_bound
    }

    fn state_dimension(&self) -> usize {
        2
    }

    fn transition(&self, state: &[F], _: &mut RngStream) -> Vec<F> {
        state.to_vec()
    }

    fn is_unsafe(&self, _: &[F]) -> bool {
        false
    }

    fn hit_probability(&self, point: &[F]) -> Option<F> {
        Some(self.mean(point))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{simulate_hit, NmcModel};
    use crate::rng::StreamSeed;
    use approx::assert_relative_eq;

    #[test]
    fn peak_mean_is_p_max_exactly() {
        let m = Sharp::new(0.1, 0.3, 1).unwrap();
        assert_eq!(m.mean(&[0.5, 0.5]), 0.3);
    }

    #[test]
    fn one_length_scale_away_the_mean_drops_by_e() {
        let s = 0.07f64;
        let m = Sharp::new(s, 0.3, 1).unwrap();
        assert_relative_eq!(m.mean(&[0.5, 0.5 + s.sqrt()]), 0.3 / std::f64::consts::E, epsilon = 1e-15);
    }

    #[test]
    fn implemented_mean_matches_the_formula_at_random_points() {
        let s = 0.05f64;
        let p_max = 0.3f64;
        let m = Sharp::new(s, p_max, 1).unwrap();
        let mut rng = StreamSeed::new(8, 0).rng();
        for _ in 0..100 {
            let x = [f64::uniform_01(&mut rng), f64::uniform_01(&mut rng)];
            let expected = p_max * (-((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)) / s).exp();
            assert_relative_eq!(m.mean(&x), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn observations_are_bernoulli_draws_from_the_formula() {
        let m = Sharp::new(0.1, 0.3, 1).unwrap();
        let mut rng = StreamSeed::new(9, 0).rng();
        let mut hits = 0u64;
        let n = 200_000u64;
        for _ in 0..n {
            let obs = simulate_hit(&m, &[0.5, 0.5], &mut rng).unwrap();
            assert!(obs.value() == 0.0 || obs.value() == 1.0);
            hits += obs.value() as u64;
        }
        let p_hat = hits as f64 / n as f64;
        let se = (0.3 * 0.7 / n as f64).sqrt();
        assert!((p_hat - 0.3).abs() < 4.0 * se, "p_hat = {p_hat}");
    }

    #[test]
    fn exact_mean_is_exposed_through_the_model_wrapper() {
        let model = NmcModel::verification(Sharp::new(0.1, 0.3, 1).unwrap());
        assert_eq!(model.exact_mean(&[0.5, 0.5]), Some(0.3));
        assert_eq!(model.observation_range(), (0.0, 1.0));
        assert_eq!(model.sigma_bound(), 0.5);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(Sharp::<f64>::new(0.0, 0.3, 1).is_err());
        assert!(Sharp::<f64>::new(0.1, 0.0, 1).is_err());
        assert!(Sharp::<f64>::new(0.1, 1.5, 1).is_err());
    }
}
