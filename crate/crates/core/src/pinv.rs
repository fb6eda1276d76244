//! Factored Moore–Penrose pseudoinverse of a TT unfolding.
//!
//! For a split `l`, the cores left of the split are brought into
//! left-orthonormal form and the cores right of it into right-orthonormal
//! form, with one SVD of the core at the boundary. The unfolding is then
//! `M * diag(sigma) * N` with `M^T M = N N^T = I`, and its pseudoinverse is
//! `N^T * diag(1/sigma) * M^T`. Only the modified cores and `sigma` are kept.

use nalgebra::DMatrix;

use crate::error::{Result, TtError};
use crate::linalg::{roundoff_floor, ThinSvd};
use crate::tt::{chain_matrix, contract_left_vector, left_step, right_step, Core, OrthoState, Shape, TensorTrain};

/// Rule deciding which singular values count as nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Cutoff {
    /// `max(rows, cols) * eps_machine * sigma_1`.
    #[default]
    Roundoff,
    /// Keep values strictly above this absolute threshold.
    Absolute(f64),
    /// Keep values strictly above `factor * sigma_1`.
    Relative(f64),
}

impl Cutoff {
    pub fn threshold(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match *self {
            Cutoff::Roundoff => roundoff_floor(rows, cols, sigma_max),
            Cutoff::Absolute(t) => t,
            Cutoff::Relative(f) => f * sigma_max,
        }
    }
}

/// Number of leading singular values retained under `policy` for a
/// `rows x cols` matrix. `sigma` must be sorted descending.
pub fn singular_cutoff(sigma: &[f64], rows: usize, cols: usize, policy: Cutoff) -> Result<usize> {
    let Some(&first) = sigma.first() else {
        return Err(TtError::arg("no singular values given"));
    };
    let delta = policy.threshold(rows, cols, first).max(0.0);
    Ok(sigma.iter().take_while(|&&s| s > delta).count())
}

/// Pseudoinverse of the `(n_1..n_l) x (n_{l+1}..n_d)` unfolding, kept as the
/// left segment (houses `M`), the singular values, and the right segment
/// (houses `N`).
#[derive(Debug, Clone)]
pub struct FactoredPinv {
    left_cores: Vec<Core>,
    sigma: Vec<f64>,
    right_cores: Vec<Core>,
    split: usize,
    shape: Shape,
}

impl FactoredPinv {
    pub fn left_cores(&self) -> &[Core] {
        &self.left_cores
    }

    pub fn right_cores(&self) -> &[Core] {
        &self.right_cores
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn rows(&self) -> usize {
        self.shape.extent(0..self.split)
    }

    pub fn cols(&self) -> usize {
        self.shape.extent(self.split..self.shape.order())
    }

    /// Dense `M` (rows x s). Test and export use only.
    pub fn left_matrix(&self) -> DMatrix<f64> {
        chain_matrix(DMatrix::from_element(1, 1, 1.0), &self.left_cores)
    }

    /// Dense `N` (s x cols).
    pub fn right_matrix(&self) -> DMatrix<f64> {
        let s = self.rank();
        let flat = chain_matrix(DMatrix::identity(s, s), &self.right_cores);
        // Row index is (a, i_{l+1}, ..., i_d) with `a` fastest.
        DMatrix::from_column_slice(s, self.cols(), flat.as_slice())
    }

    /// Dense pseudoinverse `N^T diag(1/sigma) M^T` (cols x rows).
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut nt = self.right_matrix().transpose();
        for (j, s) in self.sigma.iter().enumerate() {
            nt.column_mut(j).scale_mut(1.0 / s);
        }
        nt * self.left_matrix().transpose()
    }

    /// Dense unfolding `M diag(sigma) N` that this factorization represents.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut m = self.left_matrix();
        for (j, s) in self.sigma.iter().enumerate() {
            m.column_mut(j).scale_mut(*s);
        }
        m * self.right_matrix()
    }

    /// Apply the pseudoinverse to a vector of length `rows` by staged
    /// contractions through both segments.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut coeffs = contract_left_vector(&self.left_cores, v)?;
        for (c, s) in coeffs.iter_mut().zip(&self.sigma) {
            *c /= s;
        }
        let init = DMatrix::from_row_slice(1, coeffs.len(), &coeffs);
        Ok(chain_matrix(init, &self.right_cores).as_slice().to_vec())
    }
}

/// Free-function form of [`FactoredPinv::apply`].
pub fn pinv_apply(p: &FactoredPinv, v: &[f64]) -> Result<Vec<f64>> {
    p.apply(v)
}

/// Pseudoinverse of the unfolding of `t` with rows `1..=split`.
///
/// `ortho` states which cores are already orthonormal; those are not
/// processed again. When all cores of the row group are left-orthonormal the
/// SVD is taken on the first core of the column group instead of the last
/// core of the row group.
pub fn tt_pinv(t: &TensorTrain, split: usize, ortho: OrthoState, cutoff: Cutoff) -> Result<FactoredPinv> {
    let d = t.order();
    if split == 0 || split >= d {
        return Err(TtError::arg(format!(
            "pseudoinverse split {split} outside [1, {}]",
            d.saturating_sub(1)
        )));
    }
    let shape = t.shape();
    let rows = shape.extent(0..split);
    let cols = shape.extent(split..d);
    let mut cores = t.cores().to_vec();

    if ortho.left_count >= split {
        // Right-orthonormalize cores split+1.. (0-based), skipping known ones,
        // then split core `split` by SVD of its right unfolding.
        let known = ortho.right_count.min(d - split - 1);
        for mu in ((split + 1)..(d - known)).rev() {
            right_step(&mut cores, mu)?;
        }
        let core = &cores[split];
        let (mode, right) = (core.mode_size(), core.right_rank());
        let svd = ThinSvd::new(core.right_unfolding())?;
        let s = retained(&svd, rows, cols, cutoff, split)?;
        let svd = svd.truncate(s);
        cores[split] = Core::from_right_unfolding(&svd.vt, mode, right)?;
        let prev = &cores[split - 1];
        let merged = prev.left_unfolding() * &svd.u;
        cores[split - 1] = Core::from_left_unfolding(&merged, prev.left_rank(), prev.mode_size())?;
        Ok(assemble(cores, svd.sigma, split, shape))
    } else {
        let known_left = ortho.left_count.min(split - 1);
        for mu in known_left..(split - 1) {
            left_step(&mut cores, mu)?;
        }
        let known_right = ortho.right_count.min(d - split);
        for mu in (split..(d - known_right)).rev() {
            right_step(&mut cores, mu)?;
        }
        let b = split - 1;
        let core = &cores[b];
        let (left, mode) = (core.left_rank(), core.mode_size());
        let svd = ThinSvd::new(core.left_unfolding())?;
        let s = retained(&svd, rows, cols, cutoff, split)?;
        let svd = svd.truncate(s);
        cores[b] = Core::from_left_unfolding(&svd.u, left, mode)?;
        let next = &cores[split];
        let merged = &svd.vt * next.right_unfolding();
        cores[split] = Core::from_right_unfolding(&merged, next.mode_size(), next.right_rank())?;
        Ok(assemble(cores, svd.sigma, split, shape))
    }
}

fn retained(svd: &ThinSvd, rows: usize, cols: usize, cutoff: Cutoff, split: usize) -> Result<usize> {
    let s = singular_cutoff(&svd.sigma, rows, cols, cutoff)?;
    if s == 0 {
        return Err(TtError::Degenerate(format!(
            "all singular values of the unfolding at split {split} fall below the cutoff"
        )));
    }
    Ok(s)
}

fn assemble(mut cores: Vec<Core>, sigma: Vec<f64>, split: usize, shape: Shape) -> FactoredPinv {
    let right_cores = cores.split_off(split);
    FactoredPinv {
        left_cores: cores,
        sigma,
        right_cores,
        split,
        shape,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use crate::tt::{tt_svd, DenseTensor};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_train(dims: &[usize], ranks: &[usize], rng: &mut ChaCha8Rng) -> TensorTrain {
        let cores = dims
            .iter()
            .enumerate()
            .map(|(mu, &n)| {
                let (l, r) = (ranks[mu], ranks[mu + 1]);
                Core::new(l, n, r, (0..l * n * r).map(|_| rng.random_range(-1.0..1.0)).collect())
                    .unwrap()
            })
            .collect();
        TensorTrain::new(cores).unwrap()
    }

    #[test]
    fn cutoff_examples() {
        assert_eq!(singular_cutoff(&[1.0, 1e-20], 3, 3, Cutoff::Roundoff).unwrap(), 1);
        assert_eq!(singular_cutoff(&[2.0, 1.0], 3, 3, Cutoff::Roundoff).unwrap(), 2);
        assert_eq!(singular_cutoff(&[2.0, 1.0], 3, 3, Cutoff::Absolute(1.0)).unwrap(), 1);
        assert_eq!(singular_cutoff(&[2.0, 1.0], 3, 3, Cutoff::Relative(0.4)).unwrap(), 2);
        assert!(singular_cutoff(&[], 3, 3, Cutoff::Roundoff).is_err());
    }

    #[test]
    fn rank_two_matrix_cutoff() {
        let u1 = DVector::from_vec(vec![1.0, 2.0, 0.5, -1.0, 3.0]);
        let v1 = DVector::from_vec(vec![0.2, -1.0, 1.0, 2.0, 0.0]);
        let u2 = DVector::from_vec(vec![-1.0, 0.0, 2.0, 1.0, 1.0]);
        let v2 = DVector::from_vec(vec![1.0, 1.0, -0.5, 0.0, 2.0]);
        let m = &u1 * v1.transpose() + &u2 * v2.transpose();
        let svd = ThinSvd::new(m).unwrap();
        assert_eq!(singular_cutoff(&svd.sigma, 5, 5, Cutoff::Roundoff).unwrap(), 2);
    }

    #[test]
    fn invertible_matrix() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, -1.0, 3.0, 1.0, 0.5, 0.0, 4.0]);
        let x = DenseTensor::new(Shape::new(vec![3, 3]).unwrap(), a.as_slice().to_vec()).unwrap();
        let t = tt_svd(&x, 0.0).unwrap();
        let p = tt_pinv(&t, 1, t.ortho(), Cutoff::Roundoff).unwrap();
        let inv = a.try_inverse().unwrap();
        assert!((p.to_dense() - inv).amax() < 1e-10);
    }

    #[test]
    fn factor_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_train(&[3, 4, 2, 5], &[1, 2, 3, 2, 1], &mut rng);
        let x = t.to_dense();
        for l in 1..4 {
            let p = tt_pinv(&t, l, OrthoState::default(), Cutoff::Roundoff).unwrap();
            let m = p.left_matrix();
            let n = p.right_matrix();
            let s = p.rank();
            assert!((m.transpose() * &m - DMatrix::identity(s, s)).amax() < 1e-12);
            assert!((&n * n.transpose() - DMatrix::identity(s, s)).amax() < 1e-12);
            assert!((p.reconstruct() - x.matricize(l).unwrap()).norm() <= 1e-12 * x.norm());
            assert!(p.sigma().windows(2).all(|w| w[0] >= w[1]));
            assert!(p.sigma().iter().all(|&v| v > 0.0));
        }
    }

    #[test]
    fn apply_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = random_train(&[3, 4, 2, 5], &[1, 3, 3, 2, 1], &mut rng);
        let p = tt_pinv(&t, 2, OrthoState::default(), Cutoff::Roundoff).unwrap();
        let dense = p.to_dense();
        let v: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let got = DVector::from_vec(p.apply(&v).unwrap());
        let expect = &dense * DVector::from_column_slice(&v);
        assert!((got - &expect).norm() <= 1e-10 * expect.norm());
        let zero = p.apply(&[0.0; 12]).unwrap();
        assert!(zero.iter().all(|&z| z == 0.0));
        assert!(p.apply(&[0.0; 11]).is_err());
    }

    #[test]
    fn zero_train_is_degenerate() {
        let t = TensorTrain::rank_one(&[vec![0.0, 0.0], vec![1.0, 2.0]]).unwrap();
        match tt_pinv(&t, 1, OrthoState::default(), Cutoff::Roundoff) {
            Err(TtError::Degenerate(msg)) => assert!(msg.contains("split 1")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_split() {
        let t = TensorTrain::rank_one(&[vec![1.0], vec![1.0, 2.0]]).unwrap();
        assert!(tt_pinv(&t, 0, OrthoState::default(), Cutoff::Roundoff).is_err());
        assert!(tt_pinv(&t, 2, OrthoState::default(), Cutoff::Roundoff).is_err());
    }
}
