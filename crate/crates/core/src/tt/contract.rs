use nalgebra::DMatrix;

use super::{Core, TensorTrain};
use crate::error::{Result, TtError};

/// Pairwise contraction of two core runs over their shared mode indices.
///
/// Returns the `r_k x s_k` matrix `E` with
/// `E[a, b] = sum_{i_1..i_k} M[(i_1..i_k), a] * P[(i_1..i_k), b]`, where `M`
/// and `P` are the chain matrices of `xs` and `ys`. The environment is swept
/// left to right with two small products per core, so neither `M`, `P` nor
/// any of the per-mode transfer matrices is materialized. Cost is
/// `O(sum_mu n_mu (r^2 s + r s^2))`.
pub fn contract_pair(xs: &[Core], ys: &[Core]) -> Result<DMatrix<f64>> {
    if xs.len() != ys.len() {
        return Err(TtError::arg(format!(
            "core runs of different length: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    let (Some(x0), Some(y0)) = (xs.first(), ys.first()) else {
        return Err(TtError::arg("empty core run"));
    };
    if x0.left_rank() != 1 || y0.left_rank() != 1 {
        return Err(TtError::arg("core runs must start with rank 1"));
    }
    let mut env = DMatrix::from_element(1, 1, 1.0);
    for (mu, (x, y)) in xs.iter().zip(ys).enumerate() {
        if x.mode_size() != y.mode_size() {
            return Err(TtError::arg(format!(
                "mode {mu} differs: {} vs {}",
                x.mode_size(),
                y.mode_size()
            )));
        }
        // (r x s) * (s x n s') viewed as (r n) x s'.
        let rows = x.left_rank() * x.mode_size();
        let half = (&env * y.right_unfolding())
            .reshape_generic(nalgebra::Dyn(rows), nalgebra::Dyn(y.right_rank()));
        env = x.left_unfolding().tr_mul(&half);
    }
    Ok(env)
}

/// Inner product of the vectorizations of two trains of equal shape.
pub fn tt_dot(a: &TensorTrain, b: &TensorTrain) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(TtError::arg(format!(
            "shape mismatch: {} vs {}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(contract_pair(a.cores(), b.cores())?[(0, 0)])
}

pub fn tt_norm(t: &TensorTrain) -> f64 {
    tt_dot(t, t).map(|v| v.max(0.0).sqrt()).unwrap_or(0.0)
}
