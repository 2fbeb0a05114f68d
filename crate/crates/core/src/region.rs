//! Axis-aligned hyperrectangles: the cells of the space-partitioning tree and
//! the search domains of the models.

use thiserror::Error;

use crate::real::Real;
use crate::rng::RngStream;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegionError {
    #[error("region must have at least one dimension")]
    Empty,
    #[error("lower and upper bounds have different lengths ({lower} vs {upper})")]
    BoundLengthMismatch { lower: usize, upper: usize },
    #[error("dimension {dim} is degenerate: width must be strictly positive and finite")]
    Degenerate { dim: usize },
}

/// A box `[lower[0], upper[0]] x ... x [lower[d-1], upper[d-1]]` with strictly
/// positive widths.
#[derive(Debug, Clone, PartialEq)]
pub struct Region<F: Real> {
    lower: Vec<F>,
    upper: Vec<F>,
}

impl<F: Real> Region<F> {
    pub fn new(lower: Vec<F>, upper: Vec<F>) -> Result<Self, RegionError> {
        if lower.is_empty() {
            return Err(RegionError::Empty);
        }
        if lower.len() != upper.len() {
            return Err(RegionError::BoundLengthMismatch {
                lower: lower.len(),
                upper: upper.len(),
            });
        }
        for (dim, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            let width = *hi - *lo;
            if !(width > F::zero()) || !width.is_finite() {
                return Err(RegionError::Degenerate { dim });
            }
        }
        Ok(Self { lower, upper })
    }

    /// Convenience constructor from `(lo, hi)` pairs.
    pub fn from_bounds(bounds: &[(F, F)]) -> Result<Self, RegionError> {
        let lower = bounds.iter().map(|b| b.0).collect();
        let upper = bounds.iter().map(|b| b.1).collect();
        Self::new(lower, upper)
    }

    /// The unit box `[0,1]^dim`.
    pub fn unit(dim: usize) -> Self {
        Self::new(vec![F::zero(); dim], vec![F::one(); dim]).expect("unit box is valid")
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[F] {
        &self.lower
    }

    pub fn upper(&self) -> &[F] {
        &self.upper
    }

    pub fn width(&self, dim: usize) -> F {
        self.upper[dim] - self.lower[dim]
    }

    pub fn volume(&self) -> F {
        (0..self.dim()).map(|d| self.width(d)).fold(F::one(), |acc, w| acc * w)
    }

    /// Closed membership test.
    pub fn contains(&self, point: &[F]) -> bool {
        point.len() == self.dim()
            && point
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    /// The widest dimension; ties broken toward the lowest index.
    pub fn widest_dim(&self) -> usize {
        let mut best = 0;
        for d in 1..self.dim() {
            if self.width(d) > self.width(best) {
                best = d;
            }
        }
        best
    }

    /// Bisect at the midpoint of the widest dimension. Returns the lower and
    /// upper halves; their union is `self` and their interiors are disjoint.
    pub fn split(&self) -> Result<(Region<F>, Region<F>), RegionError> {
        let d = self.widest_dim();
        let mid = (self.lower[d] + self.upper[d]) / F::cast(2.0);
        // A box can only be bisected so many times before the midpoint
        // collides with a bound in floating point.
        if !(mid > self.lower[d]) || !(mid < self.upper[d]) {
            return Err(RegionError::Degenerate { dim: d });
        }
        let mut left = self.clone();
        let mut right = self.clone();
        left.upper[d] = mid;
        right.lower[d] = mid;
        Ok((left, right))
    }

    /// Deterministic representative point: the componentwise midpoint.
    pub fn midpoint(&self) -> Vec<F> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (*lo + *hi) / F::cast(2.0))
            .collect()
    }

    /// Uniform draw inside the box; consumes exactly `dim` uniforms, in
    /// dimension order.
    pub fn sample_uniform(&self, rng: &mut RngStream) -> Vec<F> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| {
                let u = F::uniform_01(rng);
                *lo + u * (*hi - *lo)
            })
            .collect()
    }
}
