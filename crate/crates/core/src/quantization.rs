//! Linear (additive-noise) model of a `b`-bit DAC and the matching power
//! consumption model, plus a true midrise uniform quantizer used to check
//! the linear model by Monte-Carlo.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::NoiseVarFormula;
use crate::error::{Error, Result};

/// `π√3 / 2`, the constant shared by the resolution and power models.
const PI_SQRT3_HALF: f64 = std::f64::consts::PI * 1.732_050_807_568_877_2 / 2.0;

/// Clipping level of [`default_step`], in standard deviations of one real
/// component.
pub const LOADING_FACTOR: f64 = 3.0;

/// Linearized quantizer `Q(u) ≈ δu + ε` for one bit width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationModel {
    pub bits: u32,
    /// Resolution factor δ.
    pub delta: f64,
    /// Variance σ_e² of the additive quantization noise.
    pub noise_var: f64,
    /// Power drawn by one DAC (W).
    pub dac_power: f64,
}

impl QuantizationModel {
    pub fn new(bits: u32, p_dac: f64, formula: NoiseVarFormula) -> Result<Self> {
        let delta = resolution_delta(bits)?;
        let one_minus = one_minus_delta_sq(bits);
        Ok(Self {
            bits,
            delta,
            noise_var: noise_var_from_parts(delta * delta, one_minus, formula),
            dac_power: dac_power(bits, p_dac)?,
        })
    }

    /// Infinite-resolution converter: `δ = 1`, no noise, no DAC power.
    pub fn ideal() -> Self {
        Self {
            bits: u32::MAX,
            delta: 1.0,
            noise_var: 0.0,
            dac_power: 0.0,
        }
    }

    /// Builds a model from raw parameters (used for what-if studies).
    pub fn from_parts(delta: f64, noise_var: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "delta must lie in (0, 1], got {delta}"
            )));
        }
        if !(noise_var >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise variance must be >= 0, got {noise_var}"
            )));
        }
        Ok(Self {
            bits: 0,
            delta,
            noise_var,
            dac_power: 0.0,
        })
    }
}

/// `1 − δ²` evaluated in closed form so that it keeps full relative
/// precision for large `b`.
fn one_minus_delta_sq(bits: u32) -> f64 {
    PI_SQRT3_HALF * (-2.0 * bits as f64).exp2()
}

/// Resolution factor `δ = sqrt(1 − (π√3/2)·2^(−2b))`.
pub fn resolution_delta(bits: u32) -> Result<f64> {
    if bits < 1 {
        return Err(Error::InvalidArgument(
            "resolution needs b >= 1 (b = 0 gives a negative radicand)".into(),
        ));
    }
    Ok((1.0 - one_minus_delta_sq(bits)).sqrt())
}

fn noise_var_from_parts(delta_sq: f64, one_minus: f64, formula: NoiseVarFormula) -> f64 {
    match formula {
        NoiseVarFormula::Squared => delta_sq * one_minus * one_minus,
        NoiseVarFormula::Aqnm => delta_sq * one_minus,
    }
}

/// Quantization noise variance σ_e² for a given resolution factor.
pub fn quantization_noise_variance(delta: f64, formula: NoiseVarFormula) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let d2 = delta * delta;
    Ok(noise_var_from_parts(d2, 1.0 - d2, formula))
}

/// Power drawn by one DAC, `P_DAC·sqrt(π√3 / (2(1 − δ²)))`, which equals
/// `2^b·P_DAC`.
pub fn dac_power(bits: u32, p_dac: f64) -> Result<f64> {
    if bits < 1 {
        return Err(Error::InvalidArgument("dac power needs b >= 1".into()));
    }
    Ok(p_dac * (PI_SQRT3_HALF / one_minus_delta_sq(bits)).sqrt())
}

/// Power left to the precoders once the DACs are paid for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBudget {
    /// Budget for `tr(PPᴴ)`.
    pub total: f64,
    /// Required value of every diagonal entry of `PPᴴ`.
    pub per_antenna: f64,
}

pub fn precoder_power_budget(
    p_total: f64,
    antennas: usize,
    bits: u32,
    p_dac: f64,
) -> Result<PowerBudget> {
    let per_dac = dac_power(bits, p_dac)?;
    let total = p_total - antennas as f64 * per_dac;
    if !(total > 0.0) {
        return Err(Error::InfeasibleBits {
            bits,
            budget: total,
        });
    }
    Ok(PowerBudget {
        total,
        per_antenna: p_total / antennas as f64 - per_dac,
    })
}

/// Draws one circularly-symmetric complex Gaussian sample of the given
/// variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Applies `δx + ε` with i.i.d. `ε ~ CN(0, σ_e²)`.
pub fn apply_linear_model<R: Rng + ?Sized>(
    x: &[Complex64],
    model: &QuantizationModel,
    rng: &mut R,
) -> Vec<Complex64> {
    x.iter()
        .map(|&xi| {
            let noise = if model.noise_var > 0.0 {
                complex_gaussian(rng, model.noise_var)
            } else {
                Complex64::new(0.0, 0.0)
            };
            xi * model.delta + noise
        })
        .collect()
}

/// Step size giving a full-scale range of ±[`LOADING_FACTOR`] standard
/// deviations of one real component.
pub fn default_step(bits: u32, component_std: f64) -> f64 {
    LOADING_FACTOR * component_std / (bits.saturating_sub(1) as f64).exp2()
}

fn midrise(x: f64, half_levels: f64, step: f64) -> f64 {
    let idx = (x / step).floor().clamp(-half_levels, half_levels - 1.0);
    (idx + 0.5) * step
}

/// Midrise uniform quantizer with `2^b` levels on each of the real and
/// imaginary parts, saturating at `±2^(b−1)·step`.
pub fn apply_uniform_quantizer(x: &[Complex64], bits: u32, step: f64) -> Vec<Complex64> {
    let half_levels = (bits.max(1) - 1) as f64;
    let half_levels = half_levels.exp2();
    x.iter()
        .map(|z| {
            Complex64::new(
                midrise(z.re, half_levels, step),
                midrise(z.im, half_levels, step),
            )
        })
        .collect()
}

/// Least-squares (Bussgang) decomposition `Q(x) = ĝx + e` of a quantizer
/// output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BussgangEstimate {
    /// Empirical gain `E[Q(x)x*] / E[|x|²]`.
    pub gain: Complex64,
    /// Per-entry variance of the residual `e`.
    pub residual_var: f64,
    /// `|E[e x*]| / sqrt(E|e|² E|x|²)`.
    pub correlation: f64,
}

/// Fits the gain on the first half of the samples and measures the
/// residual statistics on the second half.
pub fn bussgang_estimate(input: &[Complex64], output: &[Complex64]) -> BussgangEstimate {
    assert_eq!(input.len(), output.len());
    let half = input.len() / 2;
    let (fit_in, test_in) = input.split_at(half);
    let (fit_out, test_out) = output.split_at(half);

    let mut cross = Complex64::new(0.0, 0.0);
    let mut power = 0.0;
    for (x, q) in fit_in.iter().zip(fit_out) {
        cross += q * x.conj();
        power += x.norm_sqr();
    }
    let gain = cross / power;

    let mut corr = Complex64::new(0.0, 0.0);
    let mut e_pow = 0.0;
    let mut x_pow = 0.0;
    for (x, q) in test_in.iter().zip(test_out) {
        let e = q - gain * x;
        corr += e * x.conj();
        e_pow += e.norm_sqr();
        x_pow += x.norm_sqr();
    }
    let n = test_in.len().max(1) as f64;
    BussgangEstimate {
        gain,
        residual_var: e_pow / n,
        correlation: corr.norm() / (e_pow * x_pow).sqrt().max(f64::MIN_POSITIVE),
    }
}
