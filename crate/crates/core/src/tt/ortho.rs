use super::{Core, OrthoState, TensorTrain};
use crate::error::{Result, TtError};
use crate::linalg::thin_qr;

/// QR step on core `mu`: its left unfolding becomes `Q`, `R` moves into core
/// `mu + 1`. The rank between them becomes `min(rows, cols)`.
pub(crate) fn left_step(cores: &mut [Core], mu: usize) -> Result<()> {
    let (left, mode) = (cores[mu].left_rank(), cores[mu].mode_size());
    let (q, r) = thin_qr(cores[mu].left_unfolding());
    cores[mu] = Core::from_left_unfolding(&q, left, mode)?;
    let next = &cores[mu + 1];
    let merged = r * next.right_unfolding();
    cores[mu + 1] = Core::from_right_unfolding(&merged, next.mode_size(), next.right_rank())?;
    Ok(())
}

/// Mirror of [`left_step`]: the right unfolding of core `mu` becomes `Q^T`,
/// `R^T` moves into core `mu - 1`.
pub(crate) fn right_step(cores: &mut [Core], mu: usize) -> Result<()> {
    let (mode, right) = (cores[mu].mode_size(), cores[mu].right_rank());
    let (q, r) = thin_qr(cores[mu].right_unfolding().transpose());
    cores[mu] = Core::from_right_unfolding(&q.transpose(), mode, right)?;
    let prev = &cores[mu - 1];
    let merged = prev.left_unfolding() * r.transpose();
    cores[mu - 1] = Core::from_left_unfolding(&merged, prev.left_rank(), prev.mode_size())?;
    Ok(())
}

impl TensorTrain {
    /// Left-orthonormalize the leading `count` cores (`1 <= count <= d - 1`).
    /// The represented tensor is unchanged.
    pub fn left_orthonormalize(&self, count: usize) -> Result<TensorTrain> {
        let d = self.order();
        if count == 0 || count >= d {
            return Err(TtError::arg(format!(
                "left orthonormalization count {count} outside [1, {}]",
                d.saturating_sub(1)
            )));
        }
        let mut cores = self.cores().to_vec();
        for mu in 0..count {
            left_step(&mut cores, mu)?;
        }
        let prev = self.ortho();
        let left = prev.left_count.max(count);
        // Core `count` absorbed R and is no longer known right-orthonormal.
        let right = prev.right_count.min(d - count - 1);
        TensorTrain::with_ortho(cores, OrthoState::new(left, right))
    }

    /// Right-orthonormalize the trailing `count` cores (`1 <= count <= d - 1`).
    pub fn right_orthonormalize(&self, count: usize) -> Result<TensorTrain> {
        let d = self.order();
        if count == 0 || count >= d {
            return Err(TtError::arg(format!(
                "right orthonormalization count {count} outside [1, {}]",
                d.saturating_sub(1)
            )));
        }
        let mut cores = self.cores().to_vec();
        for mu in ((d - count)..d).rev() {
            right_step(&mut cores, mu)?;
        }
        let prev = self.ortho();
        let right = prev.right_count.max(count);
        let left = prev.left_count.min(d - count - 1);
        TensorTrain::with_ortho(cores, OrthoState::new(left, right))
    }
}
