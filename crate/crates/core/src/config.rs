//! Scenario, power, quantization and solver parameters.
//!
//! Configurations are read from flat `key = value` text files. Blank lines
//! are ignored and `#` starts a comment. Every field can also be set through
//! [`SystemConfig::set`], which is what the CLI uses for flag overrides.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quantization;

/// Multiple-access scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Rate splitting: one common stream plus one private stream per user.
    Rsma,
    /// Conventional linear precoding; the common stream carries no power.
    Sdma,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Rsma => "rsma",
            Mode::Sdma => "sdma",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rsma" => Ok(Mode::Rsma),
            "sdma" => Ok(Mode::Sdma),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

/// Which expression is used for the quantization noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseVarFormula {
    /// `δ²(1 − δ²)²`
    Squared,
    /// `δ²(1 − δ²)`, the usual additive-quantization-noise form.
    Aqnm,
}

impl fmt::Display for NoiseVarFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseVarFormula::Squared => "squared",
            NoiseVarFormula::Aqnm => "aqnm",
        })
    }
}

impl FromStr for NoiseVarFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "squared" => Ok(NoiseVarFormula::Squared),
            "aqnm" => Ok(NoiseVarFormula::Aqnm),
            other => Err(Error::InvalidArgument(format!(
                "unknown noise_var_formula `{other}`"
            ))),
        }
    }
}

/// Full parameter set for one design problem.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Number of single-antenna users.
    pub users: usize,
    /// Number of transmit antennas.
    pub antennas: usize,
    /// Inter-element spacing in wavelengths.
    pub spacing: f64,
    /// Total transmit budget shared by precoders and DACs (W).
    pub p_total: f64,
    /// DAC power consumption coefficient (W).
    pub p_dac: f64,
    /// Receiver noise variance (W).
    pub noise_power: f64,
    /// DAC resolution in bits, identical on every RF chain.
    pub bits: u32,
    /// Weight of the beampattern error against the sum-rate.
    pub lambda: f64,
    /// ADMM penalty parameter.
    pub rho: f64,
    pub admm_tol: f64,
    pub admm_max_iter: usize,
    pub wmmse_tol: f64,
    pub wmmse_max_iter: usize,
    pub seed: u64,
    pub target_angle_deg: f64,
    pub beamwidth_deg: f64,
    pub grid_resolution_deg: f64,
    pub mode: Mode,
    pub noise_var_formula: NoiseVarFormula,
    /// In RSMA mode, converge SDMA first and start RSMA from its solution.
    pub warm_start_from_sdma: bool,
    /// Multiply the dual residual by `rho` as in the textbook stopping rule.
    pub textbook_dual_residual: bool,
    /// Stopping tolerance of the lifted (semidefinite) u-update solver.
    pub sdr_tol: f64,
    pub sdr_max_iter: usize,
    /// Number of Gaussian randomization candidates tried during rank-one
    /// recovery (0 disables randomization).
    pub sdr_randomization: usize,
    /// Projected-gradient refinement steps applied to the recovered u-update
    /// candidate on the exact (non-relaxed) subproblem. 0 disables it.
    pub u_refine_iter: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            users: 2,
            antennas: 4,
            spacing: 0.5,
            p_total: 1.0,
            p_dac: 100e-6,
            noise_power: 10e-6,
            bits: 8,
            lambda: 1.0,
            rho: 300.0,
            admm_tol: 1e-4,
            admm_max_iter: 500,
            wmmse_tol: 1e-9,
            wmmse_max_iter: 200,
            seed: 1,
            target_angle_deg: 0.0,
            beamwidth_deg: 10.0,
            grid_resolution_deg: 1.0,
            mode: Mode::Rsma,
            noise_var_formula: NoiseVarFormula::Squared,
            warm_start_from_sdma: true,
            textbook_dual_residual: false,
            sdr_tol: 1e-6,
            sdr_max_iter: 20_000,
            sdr_randomization: 0,
            u_refine_iter: 200,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::InvalidArgument(format!(
            "bad boolean `{value}` for `{key}`"
        ))),
    }
}

impl SystemConfig {
    /// Reads a `key = value` file on top of the defaults and validates it.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::default();
        cfg.apply_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies every assignment found in `text`. Does not validate.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Parse {
                    line: idx + 1,
                    msg: e.to_string(),
                })?;
        }
        Ok(())
    }

    /// Sets one field by its config key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "users" | "k" | "K" => self.users = parse_value(key, value)?,
            "antennas" | "n_t" | "N_t" => self.antennas = parse_value(key, value)?,
            "spacing" | "d" => self.spacing = parse_value(key, value)?,
            "p_total_watts" | "p_total" => self.p_total = parse_value(key, value)?,
            "p_dac_watts" | "p_dac" => self.p_dac = parse_value(key, value)?,
            "noise_power_watts" | "noise_power" => self.noise_power = parse_value(key, value)?,
            "bits" | "b" => self.bits = parse_value(key, value)?,
            "lambda" => self.lambda = parse_value(key, value)?,
            "rho" => self.rho = parse_value(key, value)?,
            "admm_tol" => self.admm_tol = parse_value(key, value)?,
            "admm_max_iter" => self.admm_max_iter = parse_value(key, value)?,
            "wmmse_tol" => self.wmmse_tol = parse_value(key, value)?,
            "wmmse_max_iter" => self.wmmse_max_iter = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "target_angle_deg" => self.target_angle_deg = parse_value(key, value)?,
            "beamwidth_deg" => self.beamwidth_deg = parse_value(key, value)?,
            "grid_resolution_deg" => self.grid_resolution_deg = parse_value(key, value)?,
            "mode" => self.mode = value.parse()?,
            "noise_var_formula" => self.noise_var_formula = value.parse()?,
            "warm_start_from_sdma" => self.warm_start_from_sdma = parse_bool(key, value)?,
            "textbook_dual_residual" => self.textbook_dual_residual = parse_bool(key, value)?,
            "sdr_tol" => self.sdr_tol = parse_value(key, value)?,
            "sdr_max_iter" => self.sdr_max_iter = parse_value(key, value)?,
            "sdr_randomization" => self.sdr_randomization = parse_value(key, value)?,
            "u_refine_iter" => self.u_refine_iter = parse_value(key, value)?,
            other => return Err(Error::InvalidArgument(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// All fields as `(key, value)` pairs, in file order. Feeding the result
    /// back through [`SystemConfig::set`] reproduces the config exactly.
    pub fn to_key_values(&self) -> Vec<(&'static str, String)> {
        vec![
            ("users", self.users.to_string()),
            ("antennas", self.antennas.to_string()),
            ("spacing", self.spacing.to_string()),
            ("p_total_watts", self.p_total.to_string()),
            ("p_dac_watts", self.p_dac.to_string()),
            ("noise_power_watts", self.noise_power.to_string()),
            ("bits", self.bits.to_string()),
            ("lambda", self.lambda.to_string()),
            ("rho", self.rho.to_string()),
            ("admm_tol", self.admm_tol.to_string()),
            ("admm_max_iter", self.admm_max_iter.to_string()),
            ("wmmse_tol", self.wmmse_tol.to_string()),
            ("wmmse_max_iter", self.wmmse_max_iter.to_string()),
            ("seed", self.seed.to_string()),
            ("target_angle_deg", self.target_angle_deg.to_string()),
            ("beamwidth_deg", self.beamwidth_deg.to_string()),
            ("grid_resolution_deg", self.grid_resolution_deg.to_string()),
            ("mode", self.mode.to_string()),
            ("noise_var_formula", self.noise_var_formula.to_string()),
            (
                "warm_start_from_sdma",
                self.warm_start_from_sdma.to_string(),
            ),
            (
                "textbook_dual_residual",
                self.textbook_dual_residual.to_string(),
            ),
            ("sdr_tol", self.sdr_tol.to_string()),
            ("sdr_max_iter", self.sdr_max_iter.to_string()),
            ("sdr_randomization", self.sdr_randomization.to_string()),
            ("u_refine_iter", self.u_refine_iter.to_string()),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.users < 1 {
            return bad("users must be >= 1");
        }
        if self.antennas < 1 {
            return bad("antennas must be >= 1");
        }
        if !(self.p_total > 0.0) {
            return bad("p_total_watts must be > 0");
        }
        if !(self.p_dac >= 0.0) {
            return bad("p_dac_watts must be >= 0");
        }
        if !(self.noise_power > 0.0) {
            return bad("noise_power_watts must be > 0");
        }
        if self.bits < 1 {
            return bad("bits must be >= 1");
        }
        if !(self.spacing > 0.0) {
            return bad("spacing must be > 0");
        }
        if !(self.lambda >= 0.0) {
            return bad("lambda must be >= 0");
        }
        if !(self.rho >= 0.0) {
            return bad("rho must be >= 0");
        }
        if !(self.admm_tol > 0.0 && self.wmmse_tol > 0.0 && self.sdr_tol > 0.0) {
            return bad("tolerances must be > 0");
        }
        if !(self.grid_resolution_deg > 0.0) {
            return bad("grid_resolution_deg must be > 0");
        }
        if !(self.beamwidth_deg >= 0.0) {
            return bad("beamwidth_deg must be >= 0");
        }
        quantization::precoder_power_budget(self.p_total, self.antennas, self.bits, self.p_dac)?;
        Ok(())
    }

    /// Number of precoder columns, common stream first.
    pub fn streams(&self) -> usize {
        self.users + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SystemConfig::default().validate().unwrap();
    }

    #[test]
    fn parses_comments_and_overrides() {
        let mut cfg = SystemConfig::default();
        cfg.apply_str(
            "# scenario\nusers = 3   # three users\n\nbits=6\nmode = sdma\nnoise_var_formula = aqnm\n",
        )
        .unwrap();
        assert_eq!(cfg.users, 3);
        assert_eq!(cfg.bits, 6);
        assert_eq!(cfg.mode, Mode::Sdma);
        assert_eq!(cfg.noise_var_formula, NoiseVarFormula::Aqnm);
    }

    #[test]
    fn rejects_garbage() {
        let mut cfg = SystemConfig::default();
        assert!(matches!(
            cfg.apply_str("users 3"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(cfg.apply_str("nonsense = 1").is_err());
        assert!(cfg.apply_str("users = two").is_err());
    }

    #[test]
    fn key_values_round_trip() {
        let cfg = SystemConfig {
            lambda: 0.123456789,
            seed: 99,
            mode: Mode::Sdma,
            ..SystemConfig::default()
        };
        let mut back = SystemConfig::default();
        for (k, v) in cfg.to_key_values() {
            back.set(k, &v).unwrap();
        }
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_invalid_fields() {
        let zero_users = SystemConfig {
            users: 0,
            ..Default::default()
        };
        assert!(zero_users.validate().is_err());
        let too_many_bits = SystemConfig {
            bits: 12,
            ..Default::default()
        };
        assert!(matches!(
            too_many_bits.validate(),
            Err(Error::InfeasibleBits { bits: 12, .. })
        ));
    }
}
