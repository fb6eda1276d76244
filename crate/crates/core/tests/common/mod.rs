#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ttdmd::dmd::{mode_distance, DmdResult};
use ttdmd::tt::{Core, DenseTensor, Shape, TensorTrain};
use ttdmd::Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_dense(dims: &[usize], rng: &mut ChaCha8Rng) -> DenseTensor {
    let shape = Shape::new(dims.to_vec()).unwrap();
    let data = (0..shape.size()).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseTensor::new(shape, data).unwrap()
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Random cores with ranks capped by `max_rank` and by the unfolding sizes.
pub fn random_train(dims: &[usize], max_rank: usize, rng: &mut ChaCha8Rng) -> TensorTrain {
    let d = dims.len();
    let mut ranks = vec![1; d + 1];
    for mu in 1..d {
        let left: usize = dims[..mu].iter().product();
        let right: usize = dims[mu..].iter().product();
        ranks[mu] = max_rank.min(left).min(right).max(1);
    }
    let cores = (0..d)
        .map(|mu| {
            let (l, n, r) = (ranks[mu], dims[mu], ranks[mu + 1]);
            Core::new(l, n, r, (0..l * n * r).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
        })
        .collect();
    TensorTrain::new(cores).unwrap()
}

pub fn frob(a: &DenseTensor, b: &DenseTensor) -> f64 {
    a.sub(b).unwrap().norm()
}

/// Smallest `|l_i - l_j| / |l_i|` over other eigenvalues `j`.
pub fn relative_gap(vals: &[Complex64], i: usize) -> f64 {
    vals.iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, v)| (vals[i] - v).norm() / vals[i].norm())
        .fold(f64::INFINITY, f64::min)
}

pub fn column(m: &ttdmd::linalg::CMatrix, k: usize) -> Vec<Complex64> {
    m.column(k).iter().copied().collect()
}

/// Worst relative eigenvalue error after greedy pairing; infinite when the
/// counts differ.
pub fn eigen_mismatch(reference: &[Complex64], approx: &[Complex64]) -> f64 {
    if reference.len() != approx.len() {
        return f64::INFINITY;
    }
    ttdmd::dmd::greedy_pairing(reference, approx)
        .iter()
        .enumerate()
        .map(|(i, j)| match j {
            Some(j) => (reference[i] - approx[*j]).norm() / reference[i].norm(),
            None => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Worst mode distance over reference modes whose relative gap is at least
/// `gap`.
pub fn mode_mismatch(reference: &DmdResult, approx: &DmdResult, gap: f64) -> f64 {
    let rm = reference.dense_modes().unwrap();
    let am = approx.dense_modes().unwrap();
    ttdmd::dmd::greedy_pairing(&reference.eigenvalues, &approx.eigenvalues)
        .iter()
        .enumerate()
        .filter(|(i, _)| relative_gap(&reference.eigenvalues, *i) >= gap)
        .map(|(i, j)| match j {
            Some(j) => mode_distance(&column(&rm, i), &column(&am, *j)),
            None => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// `X`, `Y` with state shape `dims` and `m` snapshots, dense and as trains.
pub fn snapshot_instance(
    dims: &[usize],
    m: usize,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> (ttdmd::dmd::SnapshotMatrices, ttdmd::dmd::TtSnapshotPair) {
    let mut full = dims.to_vec();
    full.push(m);
    let x = random_dense(&full, rng);
    let y = random_dense(&full, rng);
    let mats = ttdmd::dmd::SnapshotMatrices::from_tensors(&x, &y, dt).unwrap();
    let pair = ttdmd::dmd::TtSnapshotPair::new(
        ttdmd::tt::tt_svd(&x, 0.0).unwrap(),
        ttdmd::tt::tt_svd(&y, 0.0).unwrap(),
        dt,
    )
    .unwrap();
    (mats, pair)
}
