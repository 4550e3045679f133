use thiserror::Error;

use crate::distance::distance_transform;
use crate::mask::BinaryMask;
use crate::scalar::Scalar;

use super::target::TargetCrop;

/// Default penalty for pixels of the opposite class. Its magnitude exceeds
/// the largest positive mass a single chord can collect on a 64-pixel canvas.
pub const DEFAULT_PENALTY: f64 = -100.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("target map is empty in the crop")]
    EmptyTarget,
    #[error("penalty must be negative")]
    NonNegativePenalty,
}

/// Per-pixel weights over the crop canvas: normalized interior distance on
/// the target, the penalty on the opposite class, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap<T> {
    side: usize,
    weights: Vec<T>,
    penalty: T,
}

impl<T: Scalar> WeightMap<T> {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn penalty(&self) -> T {
        self.penalty
    }

    /// Weights flattened row-major, i.e. the `HW×1` column.
    pub fn as_slice(&self) -> &[T] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.weights[y * self.side + x]
    }

    /// Wraps raw weights; used by tests and alternative weighting schemes.
    pub fn from_raw(side: usize, weights: Vec<T>, penalty: T) -> Self {
        assert_eq!(weights.len(), side * side);
        Self {
            side,
            weights,
            penalty,
        }
    }
}

/// Weight map of a target crop: see [`weights_from_masks`]. The penalty
/// applies to [`TargetCrop::penalized`].
pub fn build_weight_map<T: Scalar>(crop: &TargetCrop, penalty: T) -> Result<WeightMap<T>, WeightError> {
    weights_from_masks(&crop.target, &crop.penalized, penalty)
}

/// `dt / max(dt)` on `target` (interior distance transform), `penalty` on
/// `penalized \ target`, zero elsewhere.
pub fn weights_from_masks<T: Scalar>(
    target: &BinaryMask,
    penalized: &BinaryMask,
    penalty: T,
) -> Result<WeightMap<T>, WeightError> {
    if !(penalty < T::zero()) {
        return Err(WeightError::NonNegativePenalty);
    }
    assert_eq!(target.dims(), penalized.dims(), "mask dimensions differ");
    assert_eq!(target.width(), target.height(), "weight canvas must be square");
    let dt = distance_transform::<T>(target);
    let max = dt.max();
    if max <= T::zero() {
        return Err(WeightError::EmptyTarget);
    }
    let side = target.width();
    let mut weights = vec![T::zero(); side * side];
    for (i, w) in weights.iter_mut().enumerate() {
        let d = dt.values()[i];
        if d > T::zero() {
            *w = d / max;
        } else if penalized.data()[i] {
            *w = penalty;
        }
    }
    Ok(WeightMap {
        side,
        weights,
        penalty,
    })
}
