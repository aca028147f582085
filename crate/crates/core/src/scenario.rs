//! Channels, steering vectors and the desired radar beampattern.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::quantization::complex_gaussian;
use num_complex::Complex64;

/// Flat-fading channels of all users. Row `k` of `h` holds `h_kᴴ`, so the
/// gain of precoder `p` at user `k` is `(h * p)[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub h: CMatrix,
    /// `(seed, draw index)` of every row.
    pub provenance: Vec<(u64, usize)>,
}

impl ChannelSet {
    /// Wraps a given channel matrix (rows are `h_kᴴ`).
    pub fn from_matrix(h: CMatrix) -> Result<Self> {
        if h.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument(
                "channel entries must be finite".into(),
            ));
        }
        let provenance = (0..h.nrows()).map(|k| (0, k)).collect();
        Ok(Self { h, provenance })
    }

    pub fn users(&self) -> usize {
        self.h.nrows()
    }

    pub fn antennas(&self) -> usize {
        self.h.ncols()
    }

    /// `h_kᴴ` as a column vector of conjugate-free coefficients.
    pub fn row(&self, k: usize) -> CVector {
        self.h.row(k).transpose()
    }

    /// `h_kᴴ h_k`
    pub fn gain(&self, k: usize) -> f64 {
        self.h.row(k).iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Draws i.i.d. `CN(0, 1)` entries from a ChaCha stream seeded with
/// `cfg.seed`.
pub fn generate_rayleigh_channels(cfg: &SystemConfig) -> Result<ChannelSet> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (k, n) = (cfg.users, cfg.antennas);
    let mut h = CMatrix::zeros(k, n);
    for row in 0..k {
        for col in 0..n {
            h[(row, col)] = complex_gaussian(&mut rng, 1.0);
        }
    }
    Ok(ChannelSet {
        h,
        provenance: (0..k).map(|row| (cfg.seed, row)).collect(),
    })
}

/// ULA response `[1, e^{j2π sin(θ) d}, …, e^{j2π (N−1) sin(θ) d}]`.
pub fn steering_vector(theta_deg: f64, antennas: usize, spacing: f64) -> CVector {
    let phase = 2.0 * std::f64::consts::PI * theta_deg.to_radians().sin() * spacing;
    CVector::from_fn(antennas, |n, _| {
        Complex64::from_polar(1.0, phase * n as f64)
    })
}

/// Ideal rectangular beam: 1 within `±width/2` of the target, 0 elsewhere.
/// If the window contains no grid point the nearest one is used.
pub fn desired_beampattern(thetas: &[f64], target_deg: f64, width_deg: f64) -> Result<Vec<f64>> {
    let (lo, hi) = match (thetas.first(), thetas.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(Error::InvalidArgument("empty angle grid".into())),
    };
    if target_deg < lo || target_deg > hi {
        return Err(Error::InvalidArgument(format!(
            "target {target_deg}° outside grid [{lo}°, {hi}°]"
        )));
    }
    let half = width_deg / 2.0 + 1e-9;
    let mut desired: Vec<f64> = thetas
        .iter()
        .map(|&t| {
            if (t - target_deg).abs() <= half {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    if desired.iter().all(|&v| v == 0.0) {
        let nearest = thetas
            .iter()
            .enumerate()
            .min_by(|a, b| {
                (a.1 - target_deg)
                    .abs()
                    .total_cmp(&(b.1 - target_deg).abs())
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        desired[nearest] = 1.0;
    }
    Ok(desired)
}

/// Azimuth grid with its steering vectors and desired pattern.
#[derive(Debug, Clone)]
pub struct AngleGrid {
    pub thetas: Vec<f64>,
    pub steering: Vec<CVector>,
    pub desired: Vec<f64>,
}

impl AngleGrid {
    pub fn new(
        thetas: Vec<f64>,
        antennas: usize,
        spacing: f64,
        target_deg: f64,
        width_deg: f64,
    ) -> Result<Self> {
        if thetas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "grid angles must increase strictly".into(),
            ));
        }
        let desired = desired_beampattern(&thetas, target_deg, width_deg)?;
        let steering = thetas
            .iter()
            .map(|&t| steering_vector(t, antennas, spacing))
            .collect();
        Ok(Self {
            thetas,
            steering,
            desired,
        })
    }

    /// Grid over `[−90°, 90°]` at the configured resolution.
    pub fn from_config(cfg: &SystemConfig) -> Result<Self> {
        Self::new(
            uniform_angles(cfg.grid_resolution_deg),
            cfg.antennas,
            cfg.spacing,
            cfg.target_angle_deg,
            cfg.beamwidth_deg,
        )
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }
}

/// `−90, −90 + step, …` up to and including `90` when it lies on the grid.
pub fn uniform_angles(step_deg: f64) -> Vec<f64> {
    let count = (180.0 / step_deg + 1e-9).floor() as usize + 1;
    (0..count).map(|i| -90.0 + i as f64 * step_deg).collect()
}
