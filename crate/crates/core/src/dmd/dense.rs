use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{frequencies, normalize_columns, sorted_eig, DmdResult, Modes, Variant, ZERO_EIGENVALUE_TOL};
use crate::error::{Result, TtError};
use crate::linalg::{to_complex, CMatrix, ThinSvd};
use crate::pinv::{singular_cutoff, Cutoff};
use crate::tt::DenseTensor;

/// Snapshot pairs as columns: `Y[:, k]` is the successor of `X[:, k]`.
#[derive(Debug, Clone)]
pub struct SnapshotMatrices {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
    dt: f64,
}

impl SnapshotMatrices {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>, dt: f64) -> Result<Self> {
        if x.shape() != y.shape() {
            return Err(TtError::arg(format!(
                "X is {:?} but Y is {:?}",
                x.shape(),
                y.shape()
            )));
        }
        if x.ncols() == 0 || x.nrows() == 0 {
            return Err(TtError::arg("snapshot matrices must be nonempty"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(TtError::arg(format!("time step must be positive, got {dt}")));
        }
        Ok(SnapshotMatrices { x, y, dt })
    }

    /// Flatten snapshot tensors (snapshot axis last) into columns.
    pub fn from_tensors(x: &DenseTensor, y: &DenseTensor, dt: f64) -> Result<Self> {
        let (xm, ym) = (snapshot_columns(x)?, snapshot_columns(y)?);
        Self::new(xm, ym, dt)
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

fn snapshot_columns(t: &DenseTensor) -> Result<DMatrix<f64>> {
    let dims = t.shape().dims();
    if dims.len() < 2 {
        return Err(TtError::arg("snapshot tensors need a state axis and a snapshot axis"));
    }
    let m = dims[dims.len() - 1];
    Ok(DMatrix::from_column_slice(t.shape().size() / m, m, t.data()))
}

struct Reduced {
    svd: ThinSvd,
    atilde: DMatrix<f64>,
    /// `Y V Sigma^{-1}` (n x s).
    yvs: DMatrix<f64>,
}

fn reduce(s: &SnapshotMatrices, cutoff: Cutoff) -> Result<Reduced> {
    let (n, m) = s.x.shape();
    let svd = ThinSvd::new(s.x.clone())?;
    let keep = singular_cutoff(&svd.sigma, n, m, cutoff)?;
    if keep == 0 {
        return Err(TtError::Degenerate("snapshot matrix X has no singular value above the cutoff".into()));
    }
    let svd = svd.truncate(keep);
    let mut yvs = &s.y * svd.vt.transpose();
    for (j, sig) in svd.sigma.iter().enumerate() {
        yvs.column_mut(j).scale_mut(1.0 / sig);
    }
    let atilde = svd.u.tr_mul(&yvs);
    Ok(Reduced { svd, atilde, yvs })
}

/// DMD with modes `U w` from the compact SVD `X = U Sigma V^T`.
pub fn standard_dmd(s: &SnapshotMatrices, cutoff: Cutoff) -> Result<DmdResult> {
    let red = reduce(s, cutoff)?;
    let (vals, w) = sorted_eig(&red.atilde)?;
    let mut modes = to_complex(&red.svd.u) * &w;
    normalize_columns(&mut modes);
    Ok(DmdResult {
        variant: Variant::Standard,
        frequencies: frequencies(&vals, s.dt)?,
        eigenvalues: vals,
        eigenvectors_reduced: w,
        modes: Modes::Dense(modes),
        omitted: Vec::new(),
        rank: red.svd.sigma.len(),
        reduced: red.atilde,
    })
}

/// DMD with modes `(1/lambda) Y V Sigma^{-1} w`, which are eigenvectors of
/// `A = Y X^+`. Near-zero eigenvalues are moved to `omitted`.
pub fn exact_dmd(s: &SnapshotMatrices, cutoff: Cutoff) -> Result<DmdResult> {
    let red = reduce(s, cutoff)?;
    let (vals, w) = sorted_eig(&red.atilde)?;
    let (kept, w_kept, omitted) = split_zero_eigenvalues(vals, &w);
    let mut modes = to_complex(&red.yvs) * &w_kept;
    for (mut col, lam) in modes.column_iter_mut().zip(&kept) {
        col /= *lam;
    }
    normalize_columns(&mut modes);
    Ok(DmdResult {
        variant: Variant::Exact,
        frequencies: frequencies(&kept, s.dt)?,
        eigenvalues: kept,
        eigenvectors_reduced: w_kept,
        modes: Modes::Dense(modes),
        omitted,
        rank: red.svd.sigma.len(),
        reduced: red.atilde,
    })
}

pub(crate) fn split_zero_eigenvalues(
    vals: Vec<Complex64>,
    w: &CMatrix,
) -> (Vec<Complex64>, CMatrix, Vec<Complex64>) {
    let scale = vals.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&k| vals[k].norm() > ZERO_EIGENVALUE_TOL * scale)
        .collect();
    let omitted = (0..vals.len())
        .filter(|k| !keep.contains(k))
        .map(|k| vals[k])
        .collect();
    let w_kept = CMatrix::from_fn(w.nrows(), keep.len(), |i, j| w[(i, keep[j])]);
    let kept = keep.iter().map(|&k| vals[k]).collect();
    (kept, w_kept, omitted)
}
