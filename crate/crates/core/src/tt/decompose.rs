use nalgebra::DMatrix;

use super::{Core, DenseTensor, OrthoState, TensorTrain};
use crate::error::Result;
use crate::linalg::{roundoff_floor, ThinSvd};

/// Output of [`tt_svd_report`]: the train plus per-split singular values.
#[derive(Debug, Clone)]
pub struct TtSvdReport {
    pub train: TensorTrain,
    /// Retained singular values at each of the `d - 1` splits.
    pub retained: Vec<Vec<f64>>,
    /// Sum of squared discarded singular values over all splits. Its square
    /// root bounds the Frobenius truncation error.
    pub discarded_energy: f64,
}

/// Sequential SVD conversion of a full tensor into TT-format.
///
/// At every split the singular values strictly greater than `epsilon` are
/// kept (absolute threshold). Values at roundoff level are always dropped:
/// the floor is `max(rows, cols) * eps_machine * sigma_1` with `rows x cols`
/// the shape of the full matricization, and never falls below the floor of
/// an earlier split since that roundoff is carried into the remainder. So
/// `epsilon = 0` yields the numerical TT-ranks.
pub fn tt_svd(x: &DenseTensor, epsilon: f64) -> Result<TensorTrain> {
    tt_svd_report(x, epsilon).map(|r| r.train)
}

pub fn tt_svd_report(x: &DenseTensor, epsilon: f64) -> Result<TtSvdReport> {
    let dims = x.shape().dims().to_vec();
    let d = dims.len();
    let mut cores = Vec::with_capacity(d);
    let mut retained = Vec::with_capacity(d.saturating_sub(1));
    let mut discarded_energy = 0.0;

    let mut rank = 1;
    let mut remainder = DMatrix::from_column_slice(1, x.data().len(), x.data());
    let mut prefix = 1;
    let mut floor = 0.0_f64;
    for &n in dims.iter().take(d - 1) {
        prefix *= n;
        let rows = rank * n;
        let cols = remainder.len() / rows;
        let m = remainder.reshape_generic(nalgebra::Dyn(rows), nalgebra::Dyn(cols));
        let svd = ThinSvd::new(m)?;
        let sigma_max = svd.sigma.first().copied().unwrap_or(0.0);
        floor = floor.max(roundoff_floor(prefix, cols, sigma_max));
        let threshold = epsilon.max(floor);
        let keep = svd.sigma.iter().take_while(|&&s| s > threshold).count();
        discarded_energy += svd.sigma[keep..].iter().map(|s| s * s).sum::<f64>();

        if keep == 0 {
            // Nothing survives: keep the leading singular vector with a zero
            // remainder so the chain stays well-formed and left-orthonormal.
            let u = svd.u.columns(0, 1).into_owned();
            cores.push(Core::from_left_unfolding(&u, rank, n)?);
            retained.push(Vec::new());
            rank = 1;
            remainder = DMatrix::zeros(1, cols);
            continue;
        }

        let svd = svd.truncate(keep);
        cores.push(Core::from_left_unfolding(&svd.u, rank, n)?);
        let mut next = svd.vt;
        for (i, s) in svd.sigma.iter().enumerate() {
            next.row_mut(i).scale_mut(*s);
        }
        retained.push(svd.sigma);
        rank = keep;
        remainder = next;
    }
    let last = dims[d - 1];
    cores.push(Core::new(rank, last, 1, remainder.as_slice().to_vec())?);

    let train = TensorTrain::with_ortho(cores, OrthoState::new(d - 1, 0))?;
    Ok(TtSvdReport {
        train,
        retained,
        discarded_energy,
    })
}
