//! Sweep harness: convergence traces, bit sweeps, λ trade-off sweeps and
//! quantizer validation. Results go to CSV files plus a plain-text summary;
//! every solved point also gets its precoders persisted next to the CSV.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::admm::{self, metrics, write_trace_csv, Metrics, Problem, Solution};
use crate::comms::PrecoderMatrix;
use crate::config::{Mode, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::quantization::{
    apply_uniform_quantizer, bussgang_estimate, complex_gaussian, dac_power, default_step,
    precoder_power_budget, quantization_noise_variance, resolution_delta,
};
use crate::scenario::generate_rayleigh_channels;

pub const CONVERGENCE_BITS: [u32; 4] = [4, 6, 8, 10];
pub const CONVERGENCE_LAMBDA: f64 = 1.0;
pub const SWEEP_LAMBDA: f64 = 10.0;
pub const QUANTIZER_SAMPLES: usize = 1_000_000;

/// Bit values of the default bit sweep, `4..=11`.
pub fn sweep_bits() -> Vec<u32> {
    (4..=11).collect()
}

/// `points` values spaced evenly in log10 between `10^lo` and `10^hi`.
pub fn logspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![10f64.powf(lo)],
        n => (0..n)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect(),
    }
}

/// Default trade-off grid: 9 points from 1e-2 to 1e2.
pub fn tradeoff_lambdas() -> Vec<f64> {
    logspace(-2.0, 2.0, 9)
}

/// Schemes solved at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modes {
    Rsma,
    Sdma,
    Both,
}

impl Modes {
    pub fn list(self) -> Vec<Mode> {
        match self {
            Modes::Rsma => vec![Mode::Rsma],
            Modes::Sdma => vec![Mode::Sdma],
            Modes::Both => vec![Mode::Sdma, Mode::Rsma],
        }
    }
}

impl fmt::Display for Modes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modes::Rsma => "rsma",
            Modes::Sdma => "sdma",
            Modes::Both => "both",
        })
    }
}

impl FromStr for Modes {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rsma" => Ok(Modes::Rsma),
            "sdma" => Ok(Modes::Sdma),
            "both" => Ok(Modes::Both),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

/// Parameters of one experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub base: SystemConfig,
    pub bits: Vec<u32>,
    pub lambdas: Vec<f64>,
    pub modes: Modes,
    pub out_dir: PathBuf,
    pub seeds: Vec<u64>,
    /// Sweep points solved concurrently.
    pub workers: usize,
}

impl ExperimentSpec {
    fn with(
        base: SystemConfig,
        out_dir: PathBuf,
        bits: Vec<u32>,
        lambdas: Vec<f64>,
        modes: Modes,
    ) -> Self {
        Self {
            seeds: vec![base.seed],
            base,
            bits,
            lambdas,
            modes,
            out_dir,
            workers: 1,
        }
    }

    /// Traces for b ∈ {4, 6, 8, 10} at λ = 1.
    pub fn convergence(base: SystemConfig, out_dir: impl Into<PathBuf>) -> Self {
        let modes = match base.mode {
            Mode::Rsma => Modes::Rsma,
            Mode::Sdma => Modes::Sdma,
        };
        Self::with(
            base,
            out_dir.into(),
            CONVERGENCE_BITS.to_vec(),
            vec![CONVERGENCE_LAMBDA],
            modes,
        )
    }

    /// RSMA and SDMA at λ = 10 over b = 4…11.
    pub fn bit_sweep(base: SystemConfig, out_dir: impl Into<PathBuf>) -> Self {
        Self::with(
            base,
            out_dir.into(),
            sweep_bits(),
            vec![SWEEP_LAMBDA],
            Modes::Both,
        )
    }

    /// RSMA and SDMA over the default λ grid for b ∈ {4, 6, 8, 10}.
    pub fn tradeoff(base: SystemConfig, out_dir: impl Into<PathBuf>) -> Self {
        Self::with(
            base,
            out_dir.into(),
            CONVERGENCE_BITS.to_vec(),
            tradeoff_lambdas(),
            Modes::Both,
        )
    }

    /// Quantizer validation for b = 1…8.
    pub fn quantizer(base: SystemConfig, out_dir: impl Into<PathBuf>) -> Self {
        Self::with(
            base,
            out_dir.into(),
            (1..=8).collect(),
            Vec::new(),
            Modes::Rsma,
        )
    }

    fn check_lists(&self, need_lambdas: bool) -> Result<()> {
        if self.bits.is_empty() {
            return Err(Error::InvalidArgument("bit list is empty".into()));
        }
        if need_lambdas && self.lambdas.is_empty() {
            return Err(Error::InvalidArgument("lambda list is empty".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidArgument("seed list is empty".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("workers must be >= 1".into()));
        }
        if let Some(&l) = self.lambdas.iter().find(|l| !(**l >= 0.0)) {
            return Err(Error::InvalidArgument(format!("lambda {l} must be >= 0")));
        }
        Ok(())
    }

    /// Non-empty lists, every bit value feasible, and a valid base config.
    pub fn validate(&self) -> Result<()> {
        self.check_lists(true)?;
        for &b in &self.bits {
            precoder_power_budget(self.base.p_total, self.base.antennas, b, self.base.p_dac)?;
        }
        self.base.validate()
    }

    fn point_config(&self, bits: u32, lambda: f64, seed: u64) -> SystemConfig {
        SystemConfig {
            bits,
            lambda,
            seed,
            ..self.base.clone()
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
    }

    fn precoder_dir(&self) -> PathBuf {
        self.out_dir.join("precoders")
    }
}

/// Writes `contents` to a temporary file next to `path` and renames it into
/// place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidArgument(format!("`{}` has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn lambda_tag(lambda: f64) -> String {
    format!("{lambda:.3e}")
}

/// File name used for the persisted precoders of one solved point.
pub fn precoder_file_name(kind: &str, mode: Mode, bits: u32, lambda: f64, seed: u64) -> String {
    format!(
        "{kind}_{mode}_b{bits}_lam{}_seed{seed}.txt",
        lambda_tag(lambda)
    )
}

/// Precoders plus everything needed to re-evaluate them.
#[derive(Debug, Clone)]
pub struct StoredPrecoder {
    pub cfg: SystemConfig,
    pub p: PrecoderMatrix,
    pub c: Vec<f64>,
    pub alpha: f64,
    pub sum_rate: f64,
    pub nmse: f64,
}

impl StoredPrecoder {
    pub fn from_solution(cfg: &SystemConfig, sol: &Solution) -> Self {
        Self {
            cfg: SystemConfig {
                mode: sol.mode,
                ..cfg.clone()
            },
            p: sol.p.clone(),
            c: sol.c.clone(),
            alpha: sol.alpha,
            sum_rate: sol.metrics.sum_rate,
            nmse: sol.metrics.nmse,
        }
    }

    /// Header lines `# key = value` (config echo, then α, c and metrics)
    /// followed by one `stream antenna re im` row per precoder entry.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# rsma-jrc precoders\n");
        for (k, v) in self.cfg.to_key_values() {
            let _ = writeln!(s, "# {k} = {v}");
        }
        let c: Vec<String> = self.c.iter().map(|x| format!("{x:e}")).collect();
        let _ = writeln!(s, "# alpha = {:e}", self.alpha);
        let _ = writeln!(s, "# c = {}", c.join(" "));
        let _ = writeln!(s, "# sum_rate = {:e}", self.sum_rate);
        let _ = writeln!(s, "# nmse = {:e}", self.nmse);
        s.push_str("stream antenna re im\n");
        let p = &self.p.p;
        for j in 0..p.ncols() {
            for n in 0..p.nrows() {
                let z = p[(n, j)];
                let _ = writeln!(s, "{j} {n} {:e} {:e}", z.re, z.im);
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: String| Error::Parse { line, msg };
        let mut cfg = SystemConfig::default();
        let (mut alpha, mut c, mut sum_rate, mut nmse) = (None, None, None, None);
        let mut entries = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.trim();
            if line.is_empty() || line == "stream antenna re im" {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let Some((key, value)) = rest.split_once('=') else {
                    continue;
                };
                let (key, value) = (key.trim(), value.trim());
                let num = |v: &str| {
                    v.parse::<f64>()
                        .map_err(|e| bad(line_no, format!("{key}: {e}")))
                };
                match key {
                    "alpha" => alpha = Some(num(value)?),
                    "sum_rate" => sum_rate = Some(num(value)?),
                    "nmse" => nmse = Some(num(value)?),
                    "c" => {
                        c = Some(
                            value
                                .split_whitespace()
                                .map(num)
                                .collect::<Result<Vec<_>>>()?,
                        )
                    }
                    _ => cfg
                        .set(key, value)
                        .map_err(|e| bad(line_no, e.to_string()))?,
                }
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 4 {
                return Err(bad(line_no, format!("expected 4 fields, got {}", f.len())));
            }
            let idx = |v: &str| v.parse::<usize>().map_err(|e| bad(line_no, e.to_string()));
            let num = |v: &str| v.parse::<f64>().map_err(|e| bad(line_no, e.to_string()));
            entries.push((
                idx(f[0])?,
                idx(f[1])?,
                Complex64::new(num(f[2])?, num(f[3])?),
            ));
        }
        let mut p = CMatrix::zeros(cfg.antennas, cfg.streams());
        let mut seen = vec![false; cfg.antennas * cfg.streams()];
        for (j, n, z) in entries {
            if j >= cfg.streams() || n >= cfg.antennas {
                return Err(bad(
                    0,
                    format!(
                        "entry ({j}, {n}) outside {}x{}",
                        cfg.streams(),
                        cfg.antennas
                    ),
                ));
            }
            p[(n, j)] = z;
            seen[j * cfg.antennas + n] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(bad(0, "missing precoder entries".into()));
        }
        let missing = |what: &str| bad(0, format!("missing `{what}` header"));
        Ok(Self {
            p: PrecoderMatrix::new(p)?,
            c: c.ok_or_else(|| missing("c"))?,
            alpha: alpha.ok_or_else(|| missing("alpha"))?,
            sum_rate: sum_rate.ok_or_else(|| missing("sum_rate"))?,
            nmse: nmse.ok_or_else(|| missing("nmse"))?,
            cfg,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_text())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Metrics recomputed from the stored precoders and the channels
    /// regenerated from the stored seed.
    pub fn reevaluate(&self) -> Result<Metrics> {
        let problem = Problem::new(&self.cfg, generate_rayleigh_channels(&self.cfg)?)?;
        metrics(&problem, &self.p, &self.c, self.alpha)
    }
}

/// Final metrics of one (mode, b, λ, seed) point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mode: Mode,
    pub bits: u32,
    pub lambda: f64,
    pub seed: u64,
    pub sum_rate: f64,
    pub nmse: f64,
    pub nmse_db: f64,
    pub precoder_power: f64,
    pub dac_power: f64,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Path of the persisted precoders, relative to the output directory.
    pub precoder_file: String,
}

pub const SWEEP_HEADER: &str =
    "mode,b,lambda,seed,sum_rate,nmse,nmse_db,precoder_power,dac_power,objective,converged,iterations,precoder_file";

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("{SWEEP_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{:e},{},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{}",
            r.mode,
            r.bits,
            r.lambda,
            r.seed,
            r.sum_rate,
            r.nmse,
            r.nmse_db,
            r.precoder_power,
            r.dac_power,
            r.objective,
            r.converged,
            r.iterations,
            r.precoder_file
        );
    }
    s
}

/// Reads back a file written by one of the sweeps.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == SWEEP_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "unexpected header".into(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bad = |msg: String| Error::Parse { line: i + 1, msg };
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 13 {
                return Err(bad(format!("expected 13 fields, got {}", f.len())));
            }
            let num = |v: &str| v.parse::<f64>().map_err(|e| bad(e.to_string()));
            Ok(SweepRow {
                mode: f[0].parse()?,
                bits: f[1].parse().map_err(|e| bad(format!("{e}")))?,
                lambda: num(f[2])?,
                seed: f[3].parse().map_err(|e| bad(format!("{e}")))?,
                sum_rate: num(f[4])?,
                nmse: num(f[5])?,
                nmse_db: num(f[6])?,
                precoder_power: num(f[7])?,
                dac_power: num(f[8])?,
                objective: num(f[9])?,
                converged: f[10].parse().map_err(|e| bad(format!("{e}")))?,
                iterations: f[11].parse().map_err(|e| bad(format!("{e}")))?,
                precoder_file: f[12].to_string(),
            })
        })
        .collect()
}

/// Solves every requested mode at one configuration. With both modes and
/// warm start enabled the SDMA run seeds the RSMA run.
pub fn solve_modes(cfg: &SystemConfig, modes: Modes) -> Result<Vec<Solution>> {
    let channels = generate_rayleigh_channels(cfg)?;
    if modes == Modes::Both && cfg.warm_start_from_sdma {
        let (sdma, rsma) = admm::run_both(cfg, &channels)?;
        return Ok(vec![sdma, rsma]);
    }
    modes
        .list()
        .into_iter()
        .map(|mode| {
            admm::run(
                &SystemConfig {
                    mode,
                    ..cfg.clone()
                },
                &channels,
            )
        })
        .collect()
}

fn row_for(cfg: &SystemConfig, sol: &Solution, precoder_file: String) -> Result<SweepRow> {
    Ok(SweepRow {
        mode: sol.mode,
        bits: cfg.bits,
        lambda: cfg.lambda,
        seed: cfg.seed,
        sum_rate: sol.metrics.sum_rate,
        nmse: sol.metrics.nmse,
        nmse_db: 10.0 * sol.metrics.nmse.log10(),
        precoder_power: sol.p.total_power(),
        dac_power: cfg.antennas as f64 * dac_power(cfg.bits, cfg.p_dac)?,
        objective: sol.metrics.objective,
        converged: sol.converged,
        iterations: sol.iterations,
        precoder_file,
    })
}

/// Solves one point and persists its precoders.
fn sweep_point(
    spec: &ExperimentSpec,
    kind: &str,
    bits: u32,
    lambda: f64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let cfg = spec.point_config(bits, lambda, seed);
    let mut rows = Vec::new();
    for sol in solve_modes(&cfg, spec.modes)? {
        let name = precoder_file_name(kind, sol.mode, bits, lambda, seed);
        StoredPrecoder::from_solution(&cfg, &sol).save(&spec.precoder_dir().join(&name))?;
        if !sol.converged {
            log::warn!(
                "{kind} {} b={bits} λ={lambda} seed={seed}: not converged",
                sol.mode
            );
        }
        rows.push(row_for(&cfg, &sol, format!("precoders/{name}"))?);
    }
    Ok(rows)
}

/// Runs `job` over `points` on the spec's worker pool. Returns the results of
/// the successful points in input order and fails if any point failed.
fn run_points<P, T, F>(spec: &ExperimentSpec, points: &[P], job: F) -> Result<Vec<T>>
where
    P: Sync + fmt::Debug,
    T: Send,
    F: Fn(&P) -> Result<T> + Sync,
{
    let results: Vec<Result<T>> = spec
        .pool()?
        .install(|| points.par_iter().map(&job).collect());
    let total = results.len();
    let mut ok = Vec::with_capacity(total);
    let mut failures = Vec::new();
    for (point, r) in points.iter().zip(results) {
        match r {
            Ok(v) => ok.push(v),
            Err(e) => {
                log::error!("sweep point {point:?} failed: {e}");
                failures.push(format!("{point:?}: {e}"));
            }
        }
    }
    if failures.is_empty() {
        Ok(ok)
    } else {
        Err(Error::Sweep {
            failed: failures.len(),
            total,
            first: failures.swap_remove(0),
        })
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Mean and sample deviation over seeds, one line per (mode, b, λ).
pub fn summary_table(rows: &[SweepRow]) -> String {
    let mut groups: BTreeMap<(String, u32, u64), Vec<&SweepRow>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.mode.to_string(), r.bits, r.lambda.to_bits()))
            .or_default()
            .push(r);
    }
    let mut s = format!(
        "{:<5} {:>3} {:>10} {:>5} {:>14} {:>12} {:>12} {:>12} {:>10}\n",
        "mode",
        "b",
        "lambda",
        "seeds",
        "sum_rate_mean",
        "sum_rate_std",
        "nmse_mean",
        "nmse_std",
        "converged"
    );
    for ((mode, bits, lambda), g) in groups {
        let rates: Vec<f64> = g.iter().map(|r| r.sum_rate).collect();
        let nmses: Vec<f64> = g.iter().map(|r| r.nmse).collect();
        let (rm, rs) = mean_std(&rates);
        let (nm, ns) = mean_std(&nmses);
        let conv = g.iter().filter(|r| r.converged).count();
        let _ = writeln!(
            s,
            "{mode:<5} {bits:>3} {:>10.3e} {:>5} {rm:>14.6} {rs:>12.3e} {nm:>12.6} {ns:>12.3e} {:>10}",
            f64::from_bits(lambda),
            g.len(),
            format!("{conv}/{}", g.len())
        );
    }
    s
}

/// Bit value maximizing the sum-rate among `rows` of one mode and seed.
pub fn rate_argmax(rows: &[&SweepRow]) -> Option<u32> {
    rows.iter()
        .max_by(|a, b| a.sum_rate.total_cmp(&b.sum_rate))
        .map(|r| r.bits)
}

/// One convergence trace per feasible b (and mode, seed) at λ = first entry
/// of `lambdas` (1 by default). Returns the written trace paths.
pub fn run_convergence(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    spec.check_lists(true)?;
    spec.base.validate()?;
    let lambda = spec.lambdas[0];
    let mut points = Vec::new();
    for &b in &spec.bits {
        if let Err(e) =
            precoder_power_budget(spec.base.p_total, spec.base.antennas, b, spec.base.p_dac)
        {
            log::warn!("skipping b = {b}: {e}");
            continue;
        }
        for &seed in &spec.seeds {
            points.push((b, seed));
        }
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument(
            "no feasible bit value to trace".into(),
        ));
    }
    let written = run_points(spec, &points, |&(b, seed)| {
        let cfg = spec.point_config(b, lambda, seed);
        let mut paths = Vec::new();
        for sol in solve_modes(&cfg, spec.modes)? {
            let name = format!("convergence_{}_b{b}_seed{seed}.csv", sol.mode);
            let mut buf = Vec::new();
            write_trace_csv(&sol.trace, &mut buf)?;
            let path = spec.out_dir.join(name);
            write_atomic(&path, &String::from_utf8_lossy(&buf))?;
            let pname = precoder_file_name("convergence", sol.mode, b, lambda, seed);
            StoredPrecoder::from_solution(&cfg, &sol).save(&spec.precoder_dir().join(pname))?;
            log::info!(
                "convergence {} b={b} seed={seed}: {} after {} iterations",
                sol.mode,
                if sol.converged {
                    "converged"
                } else {
                    "iteration cap"
                },
                sol.iterations
            );
            paths.push(path);
        }
        Ok(paths)
    })?;
    Ok(written.into_iter().flatten().collect())
}

/// Sum-rate and NMSE over `spec.bits` at `spec.lambdas[0]` (λ = 10 by
/// default). Writes `bitsweep.csv` and `bitsweep_summary.txt`.
pub fn run_bit_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let lambda = spec.lambdas[0];
    let points: Vec<(u32, u64)> = spec
        .seeds
        .iter()
        .flat_map(|&s| spec.bits.iter().map(move |&b| (b, s)))
        .collect();
    let rows: Vec<SweepRow> = run_points(spec, &points, |&(b, seed)| {
        sweep_point(spec, "bitsweep", b, lambda, seed)
    })?
    .into_iter()
    .flatten()
    .collect();
    write_atomic(&spec.out_dir.join("bitsweep.csv"), &sweep_csv(&rows))?;

    let mut summary = summary_table(&rows);
    summary.push('\n');
    for mode in spec.modes.list() {
        for &seed in &spec.seeds {
            let sel: Vec<&SweepRow> = rows
                .iter()
                .filter(|r| r.mode == mode && r.seed == seed)
                .collect();
            if let Some(b) = rate_argmax(&sel) {
                let (lo, hi) = (spec.bits.iter().min(), spec.bits.iter().max());
                let place = if Some(&b) == lo || Some(&b) == hi {
                    "endpoint"
                } else {
                    "interior"
                };
                let _ = writeln!(
                    summary,
                    "{mode} seed {seed}: sum-rate argmax at b = {b} ({place})"
                );
            }
        }
    }
    write_atomic(&spec.out_dir.join("bitsweep_summary.txt"), &summary)?;
    Ok(rows)
}

/// Final (sum-rate, NMSE) for every (b, λ, mode, seed). Writes one
/// `tradeoff_b{b}.csv` per bit value and `tradeoff_summary.txt`.
pub fn run_tradeoff_sweep(spec: &ExperimentSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut points = Vec::new();
    for &b in &spec.bits {
        for &seed in &spec.seeds {
            for &l in &spec.lambdas {
                points.push((b, l, seed));
            }
        }
    }
    let rows: Vec<SweepRow> = run_points(spec, &points, |&(b, l, seed)| {
        sweep_point(spec, "tradeoff", b, l, seed)
    })?
    .into_iter()
    .flatten()
    .collect();
    for &b in &spec.bits {
        let sel: Vec<SweepRow> = rows.iter().filter(|r| r.bits == b).cloned().collect();
        write_atomic(
            &spec.out_dir.join(format!("tradeoff_b{b}.csv")),
            &sweep_csv(&sel),
        )?;
    }
    write_atomic(
        &spec.out_dir.join("tradeoff_summary.txt"),
        &summary_table(&rows),
    )?;
    Ok(rows)
}

/// Monte-Carlo fit of the uniform quantizer at one bit value.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizerRow {
    pub bits: u32,
    pub delta: f64,
    /// Configured `σ_e²` of the linear model.
    pub model_noise_var: f64,
    pub gain: Complex64,
    /// `|Re ĝ − δ| / δ`
    pub gain_rel_err: f64,
    pub residual_var: f64,
    pub correlation: f64,
}

pub const QUANTIZER_HEADER: &str =
    "b,delta,model_noise_var,gain_re,gain_im,gain_rel_err,residual_var,correlation";

/// Quantizes `samples` unit-power complex Gaussian draws for every b in
/// `spec.bits` and fits the linear model. Writes `quantizer_validation.csv`
/// and `quantizer_summary.txt`.
pub fn run_quantizer_validation(
    spec: &ExperimentSpec,
    samples: usize,
) -> Result<Vec<QuantizerRow>> {
    if spec.bits.is_empty() {
        return Err(Error::InvalidArgument("bit list is empty".into()));
    }
    if spec.bits.contains(&0) {
        return Err(Error::InvalidArgument("bits must be >= 1".into()));
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let seed = spec.seeds.first().copied().unwrap_or(spec.base.seed);
    let formula = spec.base.noise_var_formula;
    let rows = run_points(spec, &spec.bits, |&b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(b) << 32));
        let x: Vec<Complex64> = (0..samples)
            .map(|_| complex_gaussian(&mut rng, 1.0))
            .collect();
        let q = apply_uniform_quantizer(&x, b, default_step(b, 0.5f64.sqrt()));
        let est = bussgang_estimate(&x, &q);
        let delta = resolution_delta(b)?;
        Ok(QuantizerRow {
            bits: b,
            delta,
            model_noise_var: quantization_noise_variance(delta, formula)?,
            gain: est.gain,
            gain_rel_err: (est.gain.re - delta).abs() / delta,
            residual_var: est.residual_var,
            correlation: est.correlation,
        })
    })?;

    let mut csv = format!("{QUANTIZER_HEADER}\n");
    let mut summary = format!(
        "samples = {samples}, seed = {seed}, noise_var_formula = {formula}\n{:>2} {:>9} {:>12} {:>9} {:>9} {:>12} {:>11}\n",
        "b", "delta", "model_var", "gain", "rel_err", "resid_var", "corr"
    );
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.bits,
            r.delta,
            r.model_noise_var,
            r.gain.re,
            r.gain.im,
            r.gain_rel_err,
            r.residual_var,
            r.correlation
        );
        let _ = writeln!(
            summary,
            "{:>2} {:>9.6} {:>12.4e} {:>9.6} {:>9.4} {:>12.4e} {:>11.3e}",
            r.bits,
            r.delta,
            r.model_noise_var,
            r.gain.re,
            r.gain_rel_err,
            r.residual_var,
            r.correlation
        );
    }
    write_atomic(&spec.out_dir.join("quantizer_validation.csv"), &csv)?;
    write_atomic(&spec.out_dir.join("quantizer_summary.txt"), &summary)?;
    Ok(rows)
}

/// Solves the base configuration in the requested modes and persists the
/// precoders and traces under `spec.out_dir`.
pub fn run_single(spec: &ExperimentSpec) -> Result<Vec<(SweepRow, Solution)>> {
    spec.base.validate()?;
    let cfg = &spec.base;
    let mut out = Vec::new();
    for sol in solve_modes(cfg, spec.modes)? {
        let name = precoder_file_name("single", sol.mode, cfg.bits, cfg.lambda, cfg.seed);
        StoredPrecoder::from_solution(cfg, &sol).save(&spec.precoder_dir().join(&name))?;
        let mut buf = Vec::new();
        write_trace_csv(&sol.trace, &mut buf)?;
        let trace = format!(
            "single_{}_b{}_seed{}_trace.csv",
            sol.mode, cfg.bits, cfg.seed
        );
        write_atomic(&spec.out_dir.join(trace), &String::from_utf8_lossy(&buf))?;
        let row = row_for(cfg, &sol, format!("precoders/{name}"))?;
        out.push((row, sol));
    }
    let rows: Vec<SweepRow> = out.iter().map(|(r, _)| r.clone()).collect();
    write_atomic(&spec.out_dir.join("single.csv"), &sweep_csv(&rows))?;
    Ok(out)
}
