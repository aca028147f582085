//! Quantization-aware SINR and achievable rates of the common and private
//! streams.
//!
//! All SINRs use the normalized form in which the DAC gain δ is moved onto
//! the noise: `γ = |h_kᴴp|² / (σ_η,k²/δ² + interference)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, ZERO};
use crate::quantization::QuantizationModel;
use crate::scenario::ChannelSet;

/// Absolute slack allowed when checking the common-rate constraints.
pub const RATE_FEASIBILITY_TOL: f64 = 1e-9;

/// Precoders `[p_c, p_1, …, p_K]` stored as the columns of an
/// `N_t × (K+1)` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderMatrix {
    pub p: CMatrix,
}

impl PrecoderMatrix {
    pub fn new(p: CMatrix) -> Result<Self> {
        if p.ncols() < 2 || p.nrows() < 1 {
            return Err(Error::InvalidArgument(format!(
                "precoder matrix must be N_t x (K+1) with K >= 1, got {}x{}",
                p.nrows(),
                p.ncols()
            )));
        }
        if p.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument(
                "precoder entries must be finite".into(),
            ));
        }
        Ok(Self { p })
    }

    pub fn zeros(antennas: usize, users: usize) -> Self {
        Self {
            p: CMatrix::zeros(antennas, users + 1),
        }
    }

    pub fn antennas(&self) -> usize {
        self.p.nrows()
    }

    pub fn users(&self) -> usize {
        self.p.ncols() - 1
    }

    pub fn common(&self) -> CVector {
        self.p.column(0).into_owned()
    }

    /// Private precoder of user `k` (0-based).
    pub fn private(&self, k: usize) -> CVector {
        self.p.column(k + 1).into_owned()
    }

    /// `diag(PPᴴ)`
    pub fn per_antenna_power(&self) -> Vec<f64> {
        self.p
            .row_iter()
            .map(|r| r.iter().map(|v| v.norm_sqr()).sum())
            .collect()
    }

    /// `tr(PPᴴ)`
    pub fn total_power(&self) -> f64 {
        self.p.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn has_zero_common(&self) -> bool {
        self.p.column(0).iter().all(|v| *v == ZERO)
    }
}

/// Common-rate shares together with the stream rates they were checked
/// against.
#[derive(Debug, Clone, PartialEq)]
pub struct RateAllocation {
    /// `C_k`, the part of the common stream carrying user `k`'s data.
    pub c: Vec<f64>,
    pub private_rates: Vec<f64>,
    pub common_stream_rates: Vec<f64>,
}

impl RateAllocation {
    pub fn new(c: Vec<f64>, rates: &StreamRates) -> Result<Self> {
        check_common_rates(&c, &rates.common)?;
        Ok(Self {
            c,
            private_rates: rates.private.clone(),
            common_stream_rates: rates.common.clone(),
        })
    }

    pub fn sum_rate(&self) -> f64 {
        self.c.iter().sum::<f64>() + self.private_rates.iter().sum::<f64>()
    }
}

/// `σ_η² = σ_e²·hᴴh + σ_n²`
pub fn effective_noise_variance(h: &CVector, noise_var: f64, noise_power: f64) -> f64 {
    noise_var * h.iter().map(|v| v.norm_sqr()).sum::<f64>() + noise_power
}

/// `h_kᴴ p_j` for every column `j` (common first).
pub fn stream_gains(p: &PrecoderMatrix, h_row: &CVector) -> Vec<Complex64> {
    p.p.column_iter()
        .map(|col| h_row.iter().zip(col.iter()).map(|(h, x)| h * x).sum())
        .collect()
}

/// SINR with δ on the signal: `δ²S / (σ_η² + δ²I)`.
pub fn sinr_received_form(signal: f64, interference: f64, delta: f64, eff_noise: f64) -> f64 {
    let d2 = delta * delta;
    d2 * signal / (eff_noise + d2 * interference)
}

/// SINR with δ moved onto the noise: `S / (σ_η²/δ² + I)`.
pub fn sinr_normalized_form(signal: f64, interference: f64, delta: f64, eff_noise: f64) -> f64 {
    signal / (eff_noise / (delta * delta) + interference)
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1], got {delta}"
        )));
    }
    Ok(())
}

/// SINR of the common stream at a user, treating all private streams as
/// interference.
pub fn common_sinr(p: &PrecoderMatrix, h_row: &CVector, delta: f64, eff_noise: f64) -> Result<f64> {
    check_delta(delta)?;
    let g = stream_gains(p, h_row);
    let signal = g[0].norm_sqr();
    let interference: f64 = g[1..].iter().map(|v| v.norm_sqr()).sum();
    Ok(sinr_normalized_form(signal, interference, delta, eff_noise))
}

/// SINR of user `k`'s private stream after the common stream is removed.
pub fn private_sinr(
    p: &PrecoderMatrix,
    h_row: &CVector,
    k: usize,
    delta: f64,
    eff_noise: f64,
) -> Result<f64> {
    check_delta(delta)?;
    let g = stream_gains(p, h_row);
    let signal = g[k + 1].norm_sqr();
    let interference: f64 = g[1..]
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, v)| v.norm_sqr())
        .sum();
    Ok(sinr_normalized_form(signal, interference, delta, eff_noise))
}

/// Shannon rates (bits/s/Hz) of every stream.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamRates {
    /// `R_c,k`, rate of the common stream decodable at user `k`.
    pub common: Vec<f64>,
    /// `R_k`
    pub private: Vec<f64>,
}

impl StreamRates {
    /// Largest total common rate all users can decode.
    pub fn common_capacity(&self) -> f64 {
        self.common.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn stream_rates(
    p: &PrecoderMatrix,
    channels: &ChannelSet,
    model: &QuantizationModel,
    noise_power: f64,
) -> Result<StreamRates> {
    let k_users = channels.users();
    if p.users() != k_users || p.antennas() != channels.antennas() {
        return Err(Error::InvalidArgument(format!(
            "precoder {}x{} does not match {} users / {} antennas",
            p.antennas(),
            p.p.ncols(),
            k_users,
            channels.antennas()
        )));
    }
    let mut common = Vec::with_capacity(k_users);
    let mut private = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let h = channels.row(k);
        let eff = effective_noise_variance(&h, model.noise_var, noise_power);
        common.push((1.0 + common_sinr(p, &h, model.delta, eff)?).log2());
        private.push((1.0 + private_sinr(p, &h, k, model.delta, eff)?).log2());
    }
    Ok(StreamRates { common, private })
}

/// Checks `c ≥ 0` and `Σ C_k ≤ R_c,k` for every user.
pub fn check_common_rates(c: &[f64], common_rates: &[f64]) -> Result<()> {
    if let Some((k, v)) = c.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::InfeasibleRates(format!(
            "C_{} = {v} is negative (c >= 0)",
            k + 1
        )));
    }
    let total: f64 = c.iter().sum();
    for (k, &r) in common_rates.iter().enumerate() {
        if total > r + RATE_FEASIBILITY_TOL {
            return Err(Error::InfeasibleRates(format!(
                "sum of common shares {total:.9} exceeds R_c,{} = {r:.9}",
                k + 1
            )));
        }
    }
    Ok(())
}

/// `Σ_k (C_k + R_k)` for a feasible `(P, c)`.
pub fn objective_sum_rate(
    p: &PrecoderMatrix,
    c: &[f64],
    channels: &ChannelSet,
    model: &QuantizationModel,
    noise_power: f64,
) -> Result<f64> {
    if c.len() != channels.users() {
        return Err(Error::InvalidArgument(format!(
            "expected {} common shares, got {}",
            channels.users(),
            c.len()
        )));
    }
    let rates = stream_rates(p, channels, model, noise_power)?;
    check_common_rates(c, &rates.common)?;
    Ok(c.iter().sum::<f64>() + rates.private.iter().sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn effective_noise_values() {
        let h = CVector::from_element(4, ONE);
        assert!((effective_noise_variance(&h, 0.1, 1e-5) - 0.40001).abs() < 1e-15);
        assert_eq!(effective_noise_variance(&h, 0.0, 1e-5), 1e-5);
        let zero = CVector::zeros(4);
        assert_eq!(effective_noise_variance(&zero, 0.3, 1e-5), 1e-5);
    }

    #[test]
    fn zero_common_precoder_has_zero_sinr() {
        let mut p = PrecoderMatrix::zeros(2, 2);
        p.p[(0, 1)] = c(1.0, 0.0);
        p.p[(1, 2)] = c(0.0, 1.0);
        let h = CVector::from_vec(vec![c(0.3, 0.1), c(-1.0, 0.5)]);
        assert_eq!(common_sinr(&p, &h, 0.9, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn single_user_interference_free() {
        let power: f64 = 0.7;
        let mut p = PrecoderMatrix::zeros(2, 1);
        p.p[(0, 1)] = c(power.sqrt(), 0.0);
        let h = CVector::from_vec(vec![ONE, c(0.0, 0.0)]);
        let noise = 1e-3;
        let g = private_sinr(&p, &h, 0, 1.0, noise).unwrap();
        assert!((g - power / noise).abs() < 1e-9);
    }

    #[test]
    fn hand_evaluated_common_sinr() {
        // σ_η² = 0.01·1 + 0.01 = 0.02, γ = 1 / (0.02/0.81 + 0.25)
        let p = PrecoderMatrix::new(CMatrix::from_row_slice(
            2,
            3,
            &[
                c(1.0, 0.0),
                c(0.5, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
            ],
        ))
        .unwrap();
        let h = CVector::from_vec(vec![ONE, c(0.0, 0.0)]);
        let eff = effective_noise_variance(&h, 0.01, 0.01);
        assert!((eff - 0.02).abs() < 1e-15);
        let g = common_sinr(&p, &h, 0.9, eff).unwrap();
        assert!((g - 3.640).abs() < 1e-3, "{g}");
        assert!(((1.0 + g).log2() - 2.214).abs() < 1e-3);
        assert!(common_sinr(&p, &h, 0.0, eff).is_err());
    }

    #[test]
    fn both_sinr_forms_agree() {
        for &(s, i, d, n) in &[
            (1.0, 0.3, 0.9, 0.02),
            (4.2, 0.0, 0.5, 1e-5),
            (0.01, 2.0, 0.99, 0.3),
        ] {
            let a = sinr_received_form(s, i, d, n);
            let b = sinr_normalized_form(s, i, d, n);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn infeasible_common_share_reported() {
        let rates = StreamRates {
            common: vec![1.0, 1.5],
            private: vec![2.0, 2.0],
        };
        assert!(check_common_rates(&[0.5, 0.5], &rates.common).is_ok());
        let err = check_common_rates(&[0.5, 0.501], &rates.common).unwrap_err();
        assert!(err.to_string().contains("R_c,1"), "{err}");
        assert!(check_common_rates(&[-0.1, 0.0], &rates.common).is_err());
    }
}
