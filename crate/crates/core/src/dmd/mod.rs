//! DMD results, eigenpair ordering, frequencies and comparison metrics shared
//! by the dense and tensor-train engines.

mod dense;
mod tensor;

pub use dense::{exact_dmd, standard_dmd, SnapshotMatrices};
pub use tensor::{densify_modes, reduced_matrix, theta_product, tt_dmd, ReducedSystem, TtModes, TtSnapshotPair};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, TtError};
use crate::linalg::{eig, CMatrix};

/// Eigenvalues with `|lambda| <= ZERO_EIGENVALUE_TOL * max |lambda|` have no
/// exact-DMD mode.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-12;

/// Relative modulus difference under which two eigenvalues are ordered by
/// argument instead.
const MODULUS_TIE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Standard,
    Exact,
}

impl std::str::FromStr for Variant {
    type Err = TtError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Variant::Standard),
            "exact" => Ok(Variant::Exact),
            other => Err(TtError::arg(format!("unknown DMD variant '{other}'"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Standard => "standard",
            Variant::Exact => "exact",
        })
    }
}

/// DMD modes, either dense columns or a tensor train with a replaced last core.
#[derive(Debug, Clone)]
pub enum Modes {
    /// One column per eigenvalue, normalized to max-modulus 1.
    Dense(CMatrix),
    Tt(TtModes),
}

#[derive(Debug, Clone)]
pub struct DmdResult {
    pub variant: Variant,
    /// Sorted by descending modulus, ties by ascending argument.
    pub eigenvalues: Vec<Complex64>,
    /// Eigenvectors of the reduced matrix, column `k` for `eigenvalues[k]`.
    pub eigenvectors_reduced: CMatrix,
    pub modes: Modes,
    /// `Im(log lambda) / dt`, absent for `lambda = 0`.
    pub frequencies: Vec<Option<f64>>,
    /// Eigenvalues dropped by the exact variant because `1/lambda` is undefined.
    pub omitted: Vec<Complex64>,
    /// Number of retained singular values of `X`.
    pub rank: usize,
    /// The reduced matrix whose spectrum was computed.
    pub reduced: DMatrix<f64>,
}

impl DmdResult {
    /// Dense modes, one column per eigenvalue, normalized to max-modulus 1.
    pub fn dense_modes(&self) -> Result<CMatrix> {
        match &self.modes {
            Modes::Dense(m) => Ok(m.clone()),
            Modes::Tt(t) => {
                let idx: Vec<usize> = (0..t.mode_count()).collect();
                let mut m = t.densify(&idx)?;
                normalize_columns(&mut m);
                Ok(m)
            }
        }
    }
}

/// Eigendecomposition of the reduced matrix, sorted by the crate ordering.
pub(crate) fn sorted_eig(a: &DMatrix<f64>) -> Result<(Vec<Complex64>, CMatrix)> {
    let (vals, vecs) = eig(a)?;
    let order = eigen_order(&vals);
    let sorted_vals = order.iter().map(|&k| vals[k]).collect();
    let sorted_vecs = CMatrix::from_fn(vecs.nrows(), order.len(), |i, j| vecs[(i, order[j])]);
    Ok((sorted_vals, sorted_vecs))
}

/// Permutation sorting eigenvalues by descending modulus; moduli within a
/// relative `1e-10` of a group's leader are ordered by ascending argument.
pub fn eigen_order(vals: &[Complex64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[b].norm().total_cmp(&vals[a].norm()));
    let scale = vals.iter().map(|v| v.norm()).fold(0.0_f64, f64::max);
    let mut out = Vec::with_capacity(idx.len());
    let mut start = 0;
    while start < idx.len() {
        let lead = vals[idx[start]].norm();
        let mut end = start + 1;
        while end < idx.len() && lead - vals[idx[end]].norm() <= MODULUS_TIE_TOL * scale {
            end += 1;
        }
        let mut group = idx[start..end].to_vec();
        group.sort_by(|&a, &b| vals[a].arg().total_cmp(&vals[b].arg()));
        out.extend(group);
        start = end;
    }
    out
}

/// `omega = Im(log lambda) / dt` on the principal branch.
pub fn frequencies(lams: &[Complex64], dt: f64) -> Result<Vec<Option<f64>>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(TtError::arg(format!("time step must be positive, got {dt}")));
    }
    Ok(lams
        .iter()
        .map(|l| if l.norm() == 0.0 { None } else { Some(l.arg() / dt) })
        .collect())
}

/// Scale each column so its largest entry has modulus 1.
pub fn normalize_columns(m: &mut CMatrix) {
    for mut col in m.column_iter_mut() {
        let peak = col.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        if peak > 0.0 {
            col /= Complex64::new(peak, 0.0);
        }
    }
}

/// Unit complex scalar `c` maximizing `Re <phi, c * approx>`.
pub fn phase_alignment(phi: &[Complex64], approx: &[Complex64]) -> Complex64 {
    let inner: Complex64 = approx.iter().zip(phi).map(|(a, p)| a * p.conj()).sum();
    let n = inner.norm();
    if n == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        inner.conj() / n
    }
}

/// Relative mode error `||phi - c * approx|| / ||phi||` after max-modulus
/// normalization of both vectors and optimal phase rotation.
pub fn mode_distance(phi: &[Complex64], approx: &[Complex64]) -> f64 {
    let normalize = |v: &[Complex64]| {
        let peak = v.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        let s = if peak > 0.0 { 1.0 / peak } else { 1.0 };
        v.iter().map(|z| z * s).collect::<Vec<_>>()
    };
    let p = normalize(phi);
    let a = normalize(approx);
    let c = phase_alignment(&p, &a);
    let diff: f64 = p.iter().zip(&a).map(|(x, y)| (x - c * y).norm_sqr()).sum();
    let base: f64 = p.iter().map(|x| x.norm_sqr()).sum();
    (diff / base).sqrt()
}

/// Greedy nearest-eigenvalue matching: repeatedly pair the closest remaining
/// `(reference, approx)` couple. Returns, per reference index, the matched
/// approx index.
pub fn greedy_pairing(reference: &[Complex64], approx: &[Complex64]) -> Vec<Option<usize>> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(reference.len() * approx.len());
    for (i, r) in reference.iter().enumerate() {
        for (j, a) in approx.iter().enumerate() {
            pairs.push(((r - a).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut out = vec![None; reference.len()];
    let mut used = vec![false; approx.len()];
    for (_, i, j) in pairs {
        if out[i].is_none() && !used[j] {
            out[i] = Some(j);
            used[j] = true;
        }
    }
    out
}

/// Per-mode relative errors `e_lambda`, `e_phi` of `approx` against `reference`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeError {
    pub reference_index: usize,
    pub approx_index: Option<usize>,
    pub e_lambda: f64,
    pub e_phi: f64,
}

/// Compare two DMD results mode by mode. Unmatched reference modes carry
/// `approx_index = None` and NaN errors.
pub fn mode_errors(reference: &DmdResult, approx: &DmdResult) -> Result<Vec<ModeError>> {
    let ref_modes = reference.dense_modes()?;
    let app_modes = approx.dense_modes()?;
    if ref_modes.nrows() != app_modes.nrows() && app_modes.ncols() > 0 && ref_modes.ncols() > 0 {
        return Err(TtError::arg("mode lengths differ between results"));
    }
    let pairing = greedy_pairing(&reference.eigenvalues, &approx.eigenvalues);
    Ok(pairing
        .into_iter()
        .enumerate()
        .map(|(i, m)| match m {
            Some(j) => {
                let l = reference.eigenvalues[i];
                let lt = approx.eigenvalues[j];
                let phi: Vec<Complex64> = ref_modes.column(i).iter().copied().collect();
                let app: Vec<Complex64> = app_modes.column(j).iter().copied().collect();
                ModeError {
                    reference_index: i,
                    approx_index: Some(j),
                    e_lambda: (l - lt).norm() / l.norm(),
                    e_phi: mode_distance(&phi, &app),
                }
            }
            None => ModeError {
                reference_index: i,
                approx_index: None,
                e_lambda: f64::NAN,
                e_phi: f64::NAN,
            },
        })
        .collect())
}
