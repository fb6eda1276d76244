//! Thin wrappers around the dense kernels (SVD, QR, non-symmetric
//! eigendecomposition) with the conventions the rest of the crate relies on.

use faer::Mat;
use nalgebra::{DMatrix, Scalar, Schur};
use num_complex::Complex64;

use crate::error::{Result, TtError};

pub type CMatrix = DMatrix<Complex64>;

/// Compact SVD `m = u * diag(sigma) * vt`, singular values descending.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub vt: DMatrix<f64>,
}

impl ThinSvd {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(TtError::arg("SVD of an empty matrix"));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(TtError::Numerical("non-finite entry passed to SVD".into()));
        }
        let svd = to_faer(&m)
            .thin_svd()
            .map_err(|e| TtError::Numerical(format!("SVD did not converge: {e:?}")))?;
        let k = m.nrows().min(m.ncols());
        Ok(ThinSvd {
            u: from_faer(svd.U()),
            sigma: (0..k).map(|i| svd.S()[i]).collect(),
            vt: from_faer(svd.V()).transpose(),
        })
    }

    /// Keep the leading `k` triplets.
    pub fn truncate(self, k: usize) -> Self {
        let k = k.min(self.sigma.len());
        ThinSvd {
            u: self.u.columns(0, k).into_owned(),
            sigma: self.sigma[..k].to_vec(),
            vt: self.vt.rows(0, k).into_owned(),
        }
    }
}

fn to_faer<T: Scalar + Copy>(m: &DMatrix<T>) -> Mat<T> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer<T: Scalar + Copy>(m: faer::MatRef<'_, T>) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Orthonormal basis of the numerical column space of a complex matrix.
pub fn complex_column_basis(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(CMatrix::zeros(m.nrows(), 0));
    }
    let svd = to_faer(m)
        .thin_svd()
        .map_err(|e| TtError::Numerical(format!("SVD did not converge: {e:?}")))?;
    let s = svd.S();
    let k = m.nrows().min(m.ncols());
    let top = if k > 0 { s[0].re } else { 0.0 };
    let tol = roundoff_floor(m.nrows(), m.ncols(), top);
    let keep = (0..k).filter(|&i| s[i].re > tol).count();
    Ok(from_faer(svd.U()).columns(0, keep).into_owned())
}

/// Thin QR with `s = min(rows, cols)`: `q` is rows×s with orthonormal columns,
/// `r` is s×cols.
pub fn thin_qr(m: DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = m.qr();
    (qr.q(), qr.r())
}

/// Threshold below which singular values are indistinguishable from roundoff.
pub fn roundoff_floor(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Eigendecomposition of a general real square matrix.
///
/// Eigenvectors are returned as unit-norm columns. Built from a complex Schur
/// form `a = q t q^H` followed by back substitution on the triangular factor.
pub fn eig(a: &DMatrix<f64>) -> Result<(Vec<Complex64>, CMatrix)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(TtError::arg("eigendecomposition of a non-square matrix"));
    }
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(TtError::Numerical("non-finite entry passed to eig".into()));
    }
    let schur = Schur::try_new(to_complex(a), f64::EPSILON, 1000 * n.max(10))
        .ok_or_else(|| TtError::Numerical("Schur iteration did not converge".into()))?;
    let (q, mut t) = schur.unpack();
    for j in 0..n {
        for i in (j + 1)..n {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    let values: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();

    let tnorm = t.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    let smin = (f64::EPSILON * tnorm).max(f64::MIN_POSITIVE);
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lam = values[k];
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in (j + 1)..=k {
                acc += t[(j, i)] * y[(i, k)];
            }
            let mut denom = t[(j, j)] - lam;
            if denom.norm() < smin {
                denom = Complex64::new(smin, 0.0);
            }
            y[(j, k)] = -acc / denom;
            // Rescale to keep the back substitution bounded.
            let big = y[(j, k)].norm();
            if big > 1e100 {
                for i in j..=k {
                    y[(i, k)] /= big;
                }
            }
        }
    }
    let mut vectors = q * y;
    for mut col in vectors.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= Complex64::new(norm, 0.0);
        }
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn svd_reconstructs_and_sorts() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &(r, c) in &[(5, 3), (3, 5), (4, 4), (1, 7)] {
            let m = random(r, c, &mut rng);
            let svd = ThinSvd::new(m.clone()).unwrap();
            assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
            let rec = &svd.u * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(svd.sigma.clone())) * &svd.vt;
            assert!((rec - m).norm() < 1e-13);
        }
    }

    #[test]
    fn thin_qr_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = random(6, 3, &mut rng);
        let (q, r) = thin_qr(m.clone());
        assert_eq!(q.shape(), (6, 3));
        assert_eq!(r.shape(), (3, 3));
        assert!((q.transpose() * &q - DMatrix::identity(3, 3)).norm() < 1e-14);
        let (q, r) = thin_qr(m.transpose());
        assert_eq!(q.shape(), (3, 3));
        assert_eq!(r.shape(), (3, 6));
    }

    #[test]
    fn eig_residuals_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..12 {
            for _ in 0..20 {
                let a = random(n, n, &mut rng);
                let (vals, vecs) = eig(&a).unwrap();
                let ac = to_complex(&a);
                for k in 0..n {
                    let v = vecs.column(k);
                    let res = &ac * v - v * vals[k];
                    assert!(res.norm() < 1e-11 * a.norm().max(1.0), "n={n} residual {}", res.norm());
                }
            }
        }
    }

    #[test]
    fn eig_rotation() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let (mut vals, _) = eig(&a).unwrap();
        vals.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((vals[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((vals[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn eig_identity_is_finite() {
        let a = DMatrix::<f64>::identity(5, 5);
        let (vals, vecs) = eig(&a).unwrap();
        assert!(vals.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-14));
        assert!(vecs.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }
}
