//! Dense brute-force references for tests: full pseudoinverses, the explicit
//! operator `A = Y X^+`, and entrywise matricization checks. Everything here
//! is size-guarded.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dmd::{sorted_eig, SnapshotMatrices};
use crate::error::{Result, TtError};
use crate::linalg::{complex_column_basis, CMatrix, ThinSvd};
use crate::pinv::{singular_cutoff, Cutoff};
use crate::tt::DenseTensor;

/// Largest state dimension the explicit-operator paths accept.
pub const MAX_OPERATOR_DIM: usize = 200;

/// Largest eigenvalue set handled by the exact assignment in
/// [`spectral_distance`].
pub const MAX_ASSIGNMENT: usize = 16;

/// Truncated-SVD pseudoinverse `V Sigma^{-1} U^T`.
pub fn dense_pinv(m: &DMatrix<f64>, cutoff: Cutoff) -> Result<DMatrix<f64>> {
    let (rows, cols) = m.shape();
    let svd = ThinSvd::new(m.clone())?;
    let keep = singular_cutoff(&svd.sigma, rows, cols, cutoff)?;
    let svd = svd.truncate(keep);
    let mut v = svd.vt.transpose();
    for (j, s) in svd.sigma.iter().enumerate() {
        v.column_mut(j).scale_mut(1.0 / s);
    }
    Ok(v * svd.u.transpose())
}

/// Relative residuals of the four Moore–Penrose conditions for `p ≈ a^+`:
/// `APA = A`, `PAP = P`, `(AP)^T = AP`, `(PA)^T = PA`.
pub fn penrose_residuals(a: &DMatrix<f64>, p: &DMatrix<f64>) -> [f64; 4] {
    let rel = |diff: f64, base: f64| if base > 0.0 { diff / base } else { diff };
    let ap = a * p;
    let pa = p * a;
    [
        rel((&ap * a - a).norm(), a.norm()),
        rel((&pa * p - p).norm(), p.norm()),
        rel((ap.transpose() - &ap).norm(), ap.norm()),
        rel((pa.transpose() - &pa).norm(), pa.norm()),
    ]
}

fn guard(s: &SnapshotMatrices) -> Result<()> {
    let n = s.x().nrows();
    if n > MAX_OPERATOR_DIM {
        return Err(TtError::SizeGuard(format!(
            "state dimension {n} exceeds the oracle limit {MAX_OPERATOR_DIM}"
        )));
    }
    Ok(())
}

/// Eigenpairs of the explicitly formed `n x n` operator `A = Y X^+`.
pub fn dense_full_operator_dmd(s: &SnapshotMatrices) -> Result<(Vec<Complex64>, CMatrix)> {
    guard(s)?;
    if s.x().iter().all(|v| *v == 0.0) {
        return Err(TtError::Degenerate("snapshot matrix X is zero".into()));
    }
    let a = s.y() * dense_pinv(s.x(), Cutoff::Roundoff)?;
    sorted_eig(&a)
}

/// `A = (Y X^T)(X X^T)^+`.
pub fn gram_trick_operator(s: &SnapshotMatrices) -> Result<DMatrix<f64>> {
    guard(s)?;
    let x = s.x();
    let gram = x * x.transpose();
    Ok(s.y() * x.transpose() * dense_pinv(&gram, Cutoff::Roundoff)?)
}

/// Minimal total distance `sum |a_i - b_pi(i)|` over injective assignments
/// of the shorter list into the longer one.
pub fn spectral_distance(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if long.len() > MAX_ASSIGNMENT {
        return Err(TtError::SizeGuard(format!(
            "assignment over {} eigenvalues exceeds {MAX_ASSIGNMENT}",
            long.len()
        )));
    }
    // best[mask]: cost of assigning short[..popcount(mask)] to the set `mask`.
    let mut best = vec![f64::INFINITY; 1 << long.len()];
    best[0] = 0.0;
    for mask in 0usize..best.len() {
        let i = mask.count_ones() as usize;
        if i >= short.len() || !best[mask].is_finite() {
            continue;
        }
        for (j, z) in long.iter().enumerate() {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                let cost = best[mask] + (short[i] - z).norm();
                if cost < best[next] {
                    best[next] = cost;
                }
            }
        }
    }
    Ok(best
        .iter()
        .enumerate()
        .filter(|(mask, _)| mask.count_ones() as usize == short.len())
        .map(|(_, c)| *c)
        .fold(f64::INFINITY, f64::min))
}

/// Largest principal angle (radians) between the column spaces of `a` and
/// `b`. Spaces of different dimension compare the smaller against the larger.
pub fn subspace_angle(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    if a.nrows() != b.nrows() {
        return Err(TtError::arg("subspaces live in spaces of different dimension"));
    }
    let qa = complex_column_basis(a)?;
    let qb = complex_column_basis(b)?;
    if qa.ncols() == 0 || qb.ncols() == 0 {
        return Ok(if qa.ncols() == qb.ncols() { 0.0 } else { std::f64::consts::FRAC_PI_2 });
    }
    let cross = qa.adjoint() * qb;
    let sv = cross.singular_values();
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(smallest.clamp(0.0, 1.0).acos())
}

/// Largest deviation between `x.matricize(l)` and the entry formula
/// `X[(i_1..i_l), (i_{l+1}..i_d)] = x[i_1, ..., i_d]`.
pub fn matricization_error(x: &DenseTensor, l: usize) -> Result<f64> {
    let m = x.matricize(l)?;
    let shape = x.shape();
    let mut worst = 0.0_f64;
    for pos in 0..shape.size() {
        let idx = shape.multi_index(pos)?;
        let (mut row, mut stride) = (0, 1);
        for (mu, &i) in idx[..l].iter().enumerate() {
            row += i * stride;
            stride *= shape.dims()[mu];
        }
        let (mut col, mut stride) = (0, 1);
        for (mu, &i) in idx[l..].iter().enumerate() {
            col += i * stride;
            stride *= shape.dims()[l + mu];
        }
        worst = worst.max((m[(row, col)] - x.get(&idx)?).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub penrose: [f64; 4],
    pub spectral_distance: f64,
    pub subspace_angle: f64,
}

impl OracleReport {
    /// Compare a candidate pseudoinverse and spectrum/modes against dense
    /// references.
    pub fn build(
        matrix: &DMatrix<f64>,
        pinv: &DMatrix<f64>,
        reference: (&[Complex64], &CMatrix),
        candidate: (&[Complex64], &CMatrix),
    ) -> Result<Self> {
        Ok(OracleReport {
            penrose: penrose_residuals(matrix, pinv),
            spectral_distance: spectral_distance(reference.0, candidate.0)?,
            subspace_angle: subspace_angle(reference.1, candidate.1)?,
        })
    }

    pub fn max_penrose(&self) -> f64 {
        self.penrose.iter().copied().fold(0.0, f64::max)
    }
}
