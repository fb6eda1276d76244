use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dense::split_zero_eigenvalues;
use super::{frequencies, sorted_eig, DmdResult, Modes, Variant};
use crate::error::{Result, TtError};
use crate::linalg::{to_complex, CMatrix};
use crate::pinv::{tt_pinv, Cutoff, FactoredPinv};
use crate::tt::{chain_matrix, contract_pair, Core, TensorTrain};

/// Snapshot tensors of order `d + 1` with the snapshot axis last.
#[derive(Debug, Clone)]
pub struct TtSnapshotPair {
    x: TensorTrain,
    y: TensorTrain,
    dt: f64,
}

impl TtSnapshotPair {
    pub fn new(x: TensorTrain, y: TensorTrain, dt: f64) -> Result<Self> {
        if x.shape() != y.shape() {
            return Err(TtError::arg(format!(
                "X has shape {} but Y has shape {}",
                x.shape(),
                y.shape()
            )));
        }
        if x.order() < 2 {
            return Err(TtError::arg("snapshot trains need a state axis and a snapshot axis"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(TtError::arg(format!("time step must be positive, got {dt}")));
        }
        Ok(TtSnapshotPair { x, y, dt })
    }

    pub fn x(&self) -> &TensorTrain {
        &self.x
    }

    pub fn y(&self) -> &TensorTrain {
        &self.y
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of snapshot pairs `m`.
    pub fn snapshots(&self) -> usize {
        self.x.cores().last().map_or(0, Core::mode_size)
    }

    /// Order of the state tensor, `d`.
    pub fn state_order(&self) -> usize {
        self.x.order() - 1
    }
}

/// DMD modes in TT-format: the spatial cores followed by a last core replaced
/// by `tail`, whose column `k` belongs to `eigenvalues[k]`.
#[derive(Debug, Clone)]
pub struct TtModes {
    pub spatial_cores: Vec<Core>,
    pub tail: CMatrix,
    pub eigenvalues: Vec<Complex64>,
}

impl TtModes {
    pub fn mode_count(&self) -> usize {
        self.tail.ncols()
    }

    /// Length of one vectorized mode.
    pub fn state_size(&self) -> usize {
        self.spatial_cores.iter().map(Core::mode_size).product()
    }

    /// Selected modes as dense columns, unnormalized.
    pub fn densify(&self, indices: &[usize]) -> Result<CMatrix> {
        let k = self.mode_count();
        if let Some(&bad) = indices.iter().find(|&&i| i >= k) {
            return Err(TtError::Index {
                axis: 0,
                index: bad,
                extent: k,
            });
        }
        let sel = CMatrix::from_fn(self.tail.nrows(), indices.len(), |i, j| self.tail[(i, indices[j])]);
        let basis = chain_matrix(DMatrix::from_element(1, 1, 1.0), &self.spatial_cores);
        Ok(to_complex(&basis) * sel)
    }
}

/// Free-function form of [`TtModes::densify`].
pub fn densify_modes(m: &TtModes, indices: &[usize]) -> Result<CMatrix> {
    m.densify(indices)
}

/// `M^T P` for the chain matrices of two core runs, by a left-to-right
/// environment sweep.
pub fn theta_product(xcores: &[Core], ycores: &[Core]) -> Result<DMatrix<f64>> {
    contract_pair(xcores, ycores)
}

/// Factors of the reduced matrix `A~ = (M^T P)(Q N^T) Sigma^{-1}`.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub atilde: DMatrix<f64>,
    pub pinv: FactoredPinv,
    /// Right unfolding of the last core of `Y` (s_d x m).
    pub q: DMatrix<f64>,
    /// `Q N^T Sigma^{-1}` (s_d x r_d).
    pub qns: DMatrix<f64>,
}

pub fn reduced_matrix(p: &TtSnapshotPair, cutoff: Cutoff) -> Result<ReducedSystem> {
    let d = p.state_order();
    let pinv = tt_pinv(&p.x, d, p.x.ortho(), cutoff)?;
    let ycores = p.y.cores();
    let mtp = theta_product(pinv.left_cores(), &ycores[..d])?;
    let q = ycores[d].right_unfolding();
    let n = pinv.right_cores()[0].right_unfolding();
    let mut qns = &q * n.transpose();
    for (j, s) in pinv.sigma().iter().enumerate() {
        qns.column_mut(j).scale_mut(1.0 / s);
    }
    let atilde = mtp * &qns;
    Ok(ReducedSystem { atilde, pinv, q, qns })
}

pub fn tt_dmd(p: &TtSnapshotPair, variant: Variant, cutoff: Cutoff) -> Result<DmdResult> {
    let red = reduced_matrix(p, cutoff)?;
    let d = p.state_order();
    let (vals, w) = sorted_eig(&red.atilde)?;
    let rank = red.pinv.rank();
    let (eigenvalues, w, modes, omitted) = match variant {
        Variant::Standard => {
            let modes = TtModes {
                spatial_cores: red.pinv.left_cores().to_vec(),
                tail: w.clone(),
                eigenvalues: vals.clone(),
            };
            (vals, w, modes, Vec::new())
        }
        Variant::Exact => {
            let (kept, w_kept, omitted) = split_zero_eigenvalues(vals, &w);
            let mut tail = to_complex(&red.qns) * &w_kept;
            for (mut col, lam) in tail.column_iter_mut().zip(&kept) {
                col /= *lam;
            }
            let modes = TtModes {
                spatial_cores: p.y.cores()[..d].to_vec(),
                tail,
                eigenvalues: kept.clone(),
            };
            (kept, w_kept, modes, omitted)
        }
    };
    Ok(DmdResult {
        variant,
        frequencies: frequencies(&eigenvalues, p.dt)?,
        eigenvalues,
        eigenvectors_reduced: w,
        modes: Modes::Tt(modes),
        omitted,
        rank,
        reduced: red.atilde,
    })
}
