//! Transmit covariance, achieved beampattern and beampattern-matching
//! metrics.

use num_complex::Complex64;

use crate::comms::PrecoderMatrix;
use crate::error::{Error, Result};
use crate::linalg::{dotc, CMatrix};
use crate::scenario::AngleGrid;

/// Lower clamp applied to the scaling α.
pub const ALPHA_FLOOR: f64 = 1e-9;

/// `R = δ²PPᴴ + σ_e²I`
pub fn transmit_covariance(p: &PrecoderMatrix, delta: f64, noise_var: f64) -> CMatrix {
    let n = p.antennas();
    let mut r = &p.p * p.p.adjoint() * Complex64::new(delta * delta, 0.0);
    for i in 0..n {
        r[(i, i)] += noise_var;
    }
    r
}

/// `δ²‖Pᴴa(θ_m)‖² + σ_e²N_t` for every grid angle.
pub fn achieved_pattern(
    p: &PrecoderMatrix,
    delta: f64,
    noise_var: f64,
    grid: &AngleGrid,
) -> Vec<f64> {
    let offset = noise_var * p.antennas() as f64;
    let d2 = delta * delta;
    grid.steering
        .iter()
        .map(|a| {
            let beam: f64 =
                p.p.column_iter()
                    .map(|col| dotc(&col.into_owned(), a).norm_sqr())
                    .sum();
            d2 * beam + offset
        })
        .collect()
}

/// `a(θ_m)ᴴ R a(θ_m)` for an arbitrary covariance.
pub fn pattern_from_covariance(r: &CMatrix, grid: &AngleGrid) -> Vec<f64> {
    grid.steering.iter().map(|a| dotc(a, &(r * a)).re).collect()
}

/// `Σ_m (α P_d(θ_m) − B(θ_m))²` for a precomputed achieved pattern `B`.
pub fn error_from_pattern(alpha: f64, desired: &[f64], achieved: &[f64]) -> f64 {
    desired
        .iter()
        .zip(achieved)
        .map(|(d, b)| {
            let e = alpha * d - b;
            e * e
        })
        .sum()
}

/// Least-squares α for a precomputed achieved pattern, clamped at
/// [`ALPHA_FLOOR`].
pub fn alpha_from_pattern(desired: &[f64], achieved: &[f64]) -> Result<f64> {
    let energy: f64 = desired.iter().map(|d| d * d).sum();
    if energy <= 0.0 {
        return Err(Error::ZeroDesiredPattern);
    }
    let overlap: f64 = desired.iter().zip(achieved).map(|(d, b)| d * b).sum();
    Ok((overlap / energy).max(ALPHA_FLOOR))
}

pub fn beampattern_error(
    alpha: f64,
    p: &PrecoderMatrix,
    delta: f64,
    noise_var: f64,
    grid: &AngleGrid,
) -> f64 {
    error_from_pattern(
        alpha,
        &grid.desired,
        &achieved_pattern(p, delta, noise_var, grid),
    )
}

pub fn optimal_alpha(
    p: &PrecoderMatrix,
    delta: f64,
    noise_var: f64,
    grid: &AngleGrid,
) -> Result<f64> {
    alpha_from_pattern(&grid.desired, &achieved_pattern(p, delta, noise_var, grid))
}

/// Matching error normalized by `Σ_m (α P_d(θ_m))²`.
pub fn nmse(alpha: f64, p: &PrecoderMatrix, delta: f64, noise_var: f64, grid: &AngleGrid) -> f64 {
    nmse_from_pattern(
        alpha,
        &grid.desired,
        &achieved_pattern(p, delta, noise_var, grid),
    )
}

pub fn nmse_from_pattern(alpha: f64, desired: &[f64], achieved: &[f64]) -> f64 {
    let norm: f64 = desired.iter().map(|d| (alpha * d).powi(2)).sum();
    error_from_pattern(alpha, desired, achieved) / norm
}

/// Beampattern metrics of one precoder.
#[derive(Debug, Clone, PartialEq)]
pub struct BeampatternReport {
    pub achieved: Vec<f64>,
    pub alpha: f64,
    pub error: f64,
    pub nmse: f64,
}

impl BeampatternReport {
    /// Evaluates at the given α, or at the least-squares α when `None`.
    pub fn evaluate(
        p: &PrecoderMatrix,
        delta: f64,
        noise_var: f64,
        grid: &AngleGrid,
        alpha: Option<f64>,
    ) -> Result<Self> {
        let achieved = achieved_pattern(p, delta, noise_var, grid);
        let alpha = match alpha {
            Some(a) => a,
            None => alpha_from_pattern(&grid.desired, &achieved)?,
        };
        Ok(Self {
            error: error_from_pattern(alpha, &grid.desired, &achieved),
            nmse: nmse_from_pattern(alpha, &grid.desired, &achieved),
            achieved,
            alpha,
        })
    }

    pub fn nmse_db(&self) -> f64 {
        10.0 * self.nmse.log10()
    }
}
