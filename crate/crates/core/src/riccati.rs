//! Finite-horizon discrete-time Riccati recursion: the exact reference for
//! the quadratic-regulator synthesis benchmark.

use nalgebra::{DMatrix, RealField};

use crate::eval::EvalError;
use crate::real::Real;

/// Gain sequence `K_0 .. K_{T-1}` under the convention `u_t = K_t x_t`, so a
/// rollout controlled with these gains minimizes the expected quadratic cost.
#[derive(Debug, Clone)]
pub struct RiccatiGains<F: Real + RealField> {
    pub gains: Vec<DMatrix<F>>,
}

impl<F: Real + RealField> RiccatiGains<F> {
    /// The time-0 gain, used as the stationary comparison point.
    pub fn first(&self) -> &DMatrix<F> {
        &self.gains[0]
    }
}

/// Backward Riccati recursion with terminal weight `Q`:
/// `P_T = Q`, `K_t = -(R + B'P_{t+1}B)^{-1} B'P_{t+1}A`,
/// `P_t = Q + A'P_{t+1}(A + B K_t)`.
pub fn riccati_gain<F: Real + RealField>(
    a: &DMatrix<F>,
    b: &DMatrix<F>,
    q: &DMatrix<F>,
    r: &DMatrix<F>,
    horizon: usize,
) -> Result<RiccatiGains<F>, EvalError> {
    let n = a.nrows();
    let m = b.ncols();
    if a.ncols() != n {
        return Err(EvalError::BadDimensions("A must be square".into()));
    }
    if b.nrows() != n {
        return Err(EvalError::BadDimensions("B must have as many rows as A".into()));
    }
    if q.nrows() != n || q.ncols() != n {
        return Err(EvalError::BadDimensions("Q must match the state dimension".into()));
    }
    if r.nrows() != m || r.ncols() != m {
        return Err(EvalError::BadDimensions("R must match the input dimension".into()));
    }
    if horizon == 0 {
        return Err(EvalError::BadDimensions("horizon must be at least 1".into()));
    }
    if r.clone().cholesky().is_none() {
        return Err(EvalError::NumericalFailure("R is not positive definite".into()));
    }

    let mut p = q.clone();
    let mut gains = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let s = r + b.transpose() * &p * b;
        let s_inv = s
            .try_inverse()
            .ok_or_else(|| EvalError::NumericalFailure("R + B'PB is singular".into()))?;
        let k = -(&s_inv * b.transpose() * &p * a);
        p = q + a.transpose() * &p * (a + b * &k);
        gains.push(k);
    }
    gains.reverse();
    Ok(RiccatiGains { gains })
}
