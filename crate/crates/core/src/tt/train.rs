use nalgebra::DMatrix;

use super::{DenseTensor, Shape};
use crate::error::{Result, TtError};

/// Order-3 TT-core of shape `(left, mode, right)`, entries stored with the
/// first index fastest. Both unfoldings are therefore column-major views of
/// the same buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Core {
    left: usize,
    mode: usize,
    right: usize,
    data: Vec<f64>,
}

impl Core {
    pub fn new(left: usize, mode: usize, right: usize, data: Vec<f64>) -> Result<Self> {
        if left == 0 || mode == 0 || right == 0 {
            return Err(TtError::arg("core extents must be positive"));
        }
        if data.len() != left * mode * right {
            return Err(TtError::arg(format!(
                "core ({left}, {mode}, {right}) needs {} entries, got {}",
                left * mode * right,
                data.len()
            )));
        }
        Ok(Core {
            left,
            mode,
            right,
            data,
        })
    }

    /// Rank-1 core `1 x n x 1` holding a vector.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        Core::new(1, v.len(), 1, v.to_vec())
    }

    /// Core whose `(left*mode) x right` unfolding is `m`.
    pub fn from_left_unfolding(m: &DMatrix<f64>, left: usize, mode: usize) -> Result<Self> {
        if m.nrows() != left * mode {
            return Err(TtError::arg("left unfolding has the wrong row count"));
        }
        Core::new(left, mode, m.ncols(), m.as_slice().to_vec())
    }

    /// Core whose `left x (mode*right)` unfolding is `m`.
    pub fn from_right_unfolding(m: &DMatrix<f64>, mode: usize, right: usize) -> Result<Self> {
        if m.ncols() != mode * right {
            return Err(TtError::arg("right unfolding has the wrong column count"));
        }
        Core::new(m.nrows(), mode, right, m.as_slice().to_vec())
    }

    pub fn left_rank(&self) -> usize {
        self.left
    }

    pub fn mode_size(&self) -> usize {
        self.mode
    }

    pub fn right_rank(&self) -> usize {
        self.right
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, a: usize, i: usize, b: usize) -> f64 {
        self.data[a + self.left * (i + self.mode * b)]
    }

    pub fn left_unfolding(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.left * self.mode, self.right, &self.data)
    }

    pub fn right_unfolding(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.left, self.mode * self.right, &self.data)
    }

    pub fn scaled(&self, factor: f64) -> Core {
        Core {
            data: self.data.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    pub fn is_left_orthonormal(&self, tol: f64) -> bool {
        let u = self.left_unfolding();
        (u.transpose() * &u - DMatrix::identity(self.right, self.right)).amax() <= tol
    }

    pub fn is_right_orthonormal(&self, tol: f64) -> bool {
        let v = self.right_unfolding();
        (&v * v.transpose() - DMatrix::identity(self.left, self.left)).amax() <= tol
    }
}

/// How many leading / trailing cores are known to be left- / right-orthonormal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OrthoState {
    pub left_count: usize,
    pub right_count: usize,
}

impl OrthoState {
    pub fn new(left_count: usize, right_count: usize) -> Self {
        OrthoState {
            left_count,
            right_count,
        }
    }
}

/// Tensor in TT-format: a chain of order-3 cores with boundary ranks 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorTrain {
    cores: Vec<Core>,
    ortho: OrthoState,
}

impl TensorTrain {
    /// Validates the core chain. Orthonormality is not assumed.
    pub fn new(cores: Vec<Core>) -> Result<Self> {
        Self::with_ortho(cores, OrthoState::default())
    }

    pub(crate) fn with_ortho(cores: Vec<Core>, ortho: OrthoState) -> Result<Self> {
        let d = cores.len();
        if d == 0 {
            return Err(TtError::arg("a tensor train needs at least one core"));
        }
        if cores[0].left != 1 || cores[d - 1].right != 1 {
            return Err(TtError::arg("boundary ranks must be 1"));
        }
        for (mu, pair) in cores.windows(2).enumerate() {
            if pair[0].right != pair[1].left {
                return Err(TtError::arg(format!(
                    "rank mismatch between cores {mu} and {}: {} vs {}",
                    mu + 1,
                    pair[0].right,
                    pair[1].left
                )));
            }
        }
        if ortho.left_count + ortho.right_count > d {
            return Err(TtError::arg("orthonormality counts exceed the order"));
        }
        Ok(TensorTrain { cores, ortho })
    }

    /// Rank-1 train `v_1 ⊗ ... ⊗ v_d`.
    pub fn rank_one(factors: &[Vec<f64>]) -> Result<Self> {
        let cores = factors
            .iter()
            .map(|v| Core::from_vector(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(cores)
    }

    pub fn cores(&self) -> &[Core] {
        &self.cores
    }

    pub fn into_cores(self) -> Vec<Core> {
        self.cores
    }

    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn ortho(&self) -> OrthoState {
        self.ortho
    }

    /// `[r_0, ..., r_d]`.
    pub fn ranks(&self) -> Vec<usize> {
        std::iter::once(1)
            .chain(self.cores.iter().map(|c| c.right))
            .collect()
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.cores.iter().map(|c| c.mode).collect()).expect("cores have positive modes")
    }

    /// Number of stored core entries.
    pub fn storage(&self) -> usize {
        self.cores.iter().map(|c| c.data.len()).sum()
    }

    /// Recompute the orthonormality bookkeeping by checking Gram matrices.
    pub fn detect_ortho(mut self, tol: f64) -> Self {
        let d = self.order();
        let left = self
            .cores
            .iter()
            .take(d - 1)
            .take_while(|c| c.is_left_orthonormal(tol))
            .count();
        let right = self
            .cores
            .iter()
            .skip(left)
            .rev()
            .take_while(|c| c.is_right_orthonormal(tol))
            .count()
            .min(d - left);
        self.ortho = OrthoState::new(left, right);
        self
    }

    pub fn to_dense(&self) -> DenseTensor {
        let m = chain_matrix(DMatrix::from_element(1, 1, 1.0), &self.cores);
        DenseTensor::new(self.shape(), m.as_slice().to_vec()).expect("chain has tensor size")
    }
}

/// Contract `init` (R x r_0) with a run of cores, returning the
/// `(R * n_1 * ... * n_k) x r_k` matrix with the row index little-endian in
/// `(row of init, i_1, ..., i_k)`.
pub fn chain_matrix(init: DMatrix<f64>, cores: &[Core]) -> DMatrix<f64> {
    let mut acc = init;
    for core in cores {
        let rows = acc.nrows();
        let prod = acc * core.right_unfolding();
        acc = prod.reshape_generic(
            nalgebra::Dyn(rows * core.mode),
            nalgebra::Dyn(core.right),
        );
    }
    acc
}

/// `M^T v` where `M` is the chain matrix of `cores` (first rank 1). The
/// contraction is staged core by core so `M` itself is never formed.
pub fn contract_left_vector(cores: &[Core], v: &[f64]) -> Result<Vec<f64>> {
    let rows: usize = cores.iter().map(|c| c.mode).product();
    if v.len() != rows {
        return Err(TtError::arg(format!(
            "vector of length {} does not match row extent {rows}",
            v.len()
        )));
    }
    if cores.first().map(|c| c.left) != Some(1) {
        return Err(TtError::arg("left segment must start with rank 1"));
    }
    let mut rest = rows;
    let mut acc = DMatrix::from_column_slice(1, rows, v);
    for core in cores {
        rest /= core.mode;
        let stacked = acc.reshape_generic(nalgebra::Dyn(core.left * core.mode), nalgebra::Dyn(rest));
        acc = core.left_unfolding().tr_mul(&stacked);
    }
    Ok(acc.as_slice().to_vec())
}
