//! Snapshot series with planted spectra.
//!
//! Each planted mode is a complex rank-1 spatial pattern `f_1 ⊗ ... ⊗ f_d`
//! driven by `lambda = rho * exp(i omega dt)`. Snapshot `k` is
//! `sum_j Re[lambda_j^k * (f_1 ⊗ ... ⊗ f_d)_j]` plus optional Gaussian noise.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dmd::{SnapshotMatrices, TtSnapshotPair};
use crate::error::{Result, TtError};
use crate::tt::{tt_svd, DenseTensor, Shape};

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedMode {
    /// One complex vector per state axis.
    pub spatial_factors: Vec<Vec<Complex64>>,
    pub growth: f64,
    /// Radians per unit time.
    pub frequency: f64,
}

impl PlantedMode {
    pub fn new(spatial_factors: Vec<Vec<Complex64>>, growth: f64, frequency: f64) -> Result<Self> {
        if spatial_factors.is_empty() {
            return Err(TtError::arg("a planted mode needs at least one spatial factor"));
        }
        for (mu, f) in spatial_factors.iter().enumerate() {
            if f.iter().all(|z| z.norm() == 0.0) {
                return Err(TtError::arg(format!("spatial factor {mu} is zero")));
            }
        }
        if !growth.is_finite() || !frequency.is_finite() {
            return Err(TtError::arg("growth and frequency must be finite"));
        }
        Ok(PlantedMode {
            spatial_factors,
            growth,
            frequency,
        })
    }

    pub fn eigenvalue(&self, dt: f64) -> Complex64 {
        Complex64::from_polar(self.growth, self.frequency * dt)
    }

    fn pattern(&self) -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(1.0, 0.0)];
        for f in &self.spatial_factors {
            let mut next = Vec::with_capacity(acc.len() * f.len());
            for b in f {
                next.extend(acc.iter().map(|a| a * b));
            }
            acc = next;
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub dims: Shape,
    /// Number of snapshot pairs; the series holds `m + 1` snapshots.
    pub snapshot_count: usize,
    pub dt: f64,
    pub modes: Vec<PlantedMode>,
    pub noise_scale: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.snapshot_count < 2 {
            return Err(TtError::arg(format!(
                "need at least 2 snapshot pairs, got {}",
                self.snapshot_count
            )));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(TtError::arg(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.noise_scale >= 0.0) || !self.noise_scale.is_finite() {
            return Err(TtError::arg("noise scale must be nonnegative"));
        }
        for (j, mode) in self.modes.iter().enumerate() {
            let lens: Vec<usize> = mode.spatial_factors.iter().map(Vec::len).collect();
            if lens != self.dims.dims() {
                return Err(TtError::arg(format!(
                    "mode {j} has factor lengths {lens:?}, expected {:?}",
                    self.dims.dims()
                )));
            }
        }
        Ok(())
    }

    pub fn planted_eigenvalues(&self) -> Vec<Complex64> {
        self.modes.iter().map(|m| m.eigenvalue(self.dt)).collect()
    }
}

/// The dense series plus both snapshot representations.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub series: DenseTensor,
    pub matrices: SnapshotMatrices,
    pub pair: TtSnapshotPair,
}

/// Series of `m + 1` snapshots with the time axis last.
pub fn generate_series(spec: &GeneratorSpec) -> Result<DenseTensor> {
    spec.validate()?;
    let n = spec.dims.size();
    let steps = spec.snapshot_count + 1;
    let patterns: Vec<Vec<Complex64>> = spec.modes.iter().map(PlantedMode::pattern).collect();
    let lams = spec.planted_eigenvalues();
    let mut data = vec![0.0; n * steps];
    for k in 0..steps {
        let slot = &mut data[k * n..(k + 1) * n];
        for (pat, lam) in patterns.iter().zip(&lams) {
            let amp = lam.powu(k as u32);
            for (v, p) in slot.iter_mut().zip(pat) {
                *v += (amp * p).re;
            }
        }
        if spec.noise_scale > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(k as u64);
            for v in slot.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *v += spec.noise_scale * z;
            }
        }
    }
    DenseTensor::new(spec.dims.with_trailing(steps)?, data)
}

pub fn generate(spec: &GeneratorSpec, epsilon: f64) -> Result<Dataset> {
    let series = generate_series(spec)?;
    let (matrices, pair) = build_xy(&series, spec.dt, epsilon)?;
    Ok(Dataset {
        series,
        matrices,
        pair,
    })
}

/// Split a series into `X` (slices `0..m`) and `Y` (slices `1..m+1`), dense and
/// in TT-format with `tt_svd` at `epsilon`.
pub fn build_xy(series: &DenseTensor, dt: f64, epsilon: f64) -> Result<(SnapshotMatrices, TtSnapshotPair)> {
    let (xt, yt) = split_series(series)?;
    let mats = SnapshotMatrices::from_tensors(&xt, &yt, dt)?;
    let pair = TtSnapshotPair::new(tt_svd(&xt, epsilon)?, tt_svd(&yt, epsilon)?, dt)?;
    Ok((mats, pair))
}

/// `X` and `Y` as dense tensors of the series shape with time extent `m`.
pub fn split_series(series: &DenseTensor) -> Result<(DenseTensor, DenseTensor)> {
    let d = series.shape().order();
    let steps = series.shape().dims()[d - 1];
    if d < 2 || steps < 2 {
        return Err(TtError::arg(format!(
            "a series needs a state axis and at least 2 time steps, got shape {}",
            series.shape()
        )));
    }
    Ok((series.slice_last(0..steps - 1)?, series.slice_last(1..steps)?))
}

fn smooth_factor(n: usize, phase: f64, wavenumber: f64) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let x = (i as f64 + 0.5) / n as f64;
            Complex64::from_polar(1.0 + 0.5 * (std::f64::consts::PI * x).sin(), wavenumber * x + phase)
        })
        .collect()
}

/// Traveling waves with angles `theta_j = omega_j dt` and unit growth.
pub fn oscillator(dims: &[usize], snapshot_count: usize, dt: f64, angles: &[f64]) -> Result<GeneratorSpec> {
    let modes = angles
        .iter()
        .enumerate()
        .map(|(j, &theta)| {
            let factors = dims
                .iter()
                .enumerate()
                .map(|(mu, &n)| smooth_factor(n, 0.3 * (j + mu) as f64, (1 + j + mu) as f64))
                .collect();
            PlantedMode::new(factors, 1.0, theta / dt)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorSpec {
        dims: Shape::new(dims.to_vec())?,
        snapshot_count,
        dt,
        modes,
        noise_scale: 0.0,
        seed: 0,
    })
}

/// Two traveling waves with `omega dt` of 0.3 and 0.7.
pub fn two_mode(dims: &[usize], snapshot_count: usize, dt: f64) -> Result<GeneratorSpec> {
    oscillator(dims, snapshot_count, dt, &[0.3, 0.7])
}

/// One non-oscillating mode decaying with factor `rho` per step.
pub fn decay(dims: &[usize], snapshot_count: usize, dt: f64, rho: f64) -> Result<GeneratorSpec> {
    let factors = dims
        .iter()
        .map(|&n| {
            (0..n)
                .map(|i| Complex64::new(1.0 + (i as f64 / n as f64), 0.0))
                .collect()
        })
        .collect();
    Ok(GeneratorSpec {
        dims: Shape::new(dims.to_vec())?,
        snapshot_count,
        dt,
        modes: vec![PlantedMode::new(factors, rho, 0.0)?],
        noise_scale: 0.0,
        seed: 0,
    })
}

/// Waves whose amplitudes fall by `ratio` per mode, giving singular values
/// spread over many orders of magnitude.
pub fn graded(dims: &[usize], snapshot_count: usize, dt: f64, count: usize, ratio: f64) -> Result<GeneratorSpec> {
    let angles: Vec<f64> = (0..count).map(|j| 0.2 + 0.37 * j as f64).collect();
    let mut spec = oscillator(dims, snapshot_count, dt, &angles)?;
    for (j, mode) in spec.modes.iter_mut().enumerate() {
        let scale = ratio.powi(j as i32);
        mode.spatial_factors[0].iter_mut().for_each(|z| *z *= scale);
        mode.growth = 1.0 - 0.01 * j as f64;
    }
    Ok(spec)
}
