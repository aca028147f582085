//! Acceptance run: one PASS/FAIL line per criterion. Reference values are
//! recomputed here from first principles instead of being taken from the
//! library.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rsma_jrc::admm::{self, Problem, Stacked};
use rsma_jrc::comms::PrecoderMatrix;
use rsma_jrc::experiments::{self, ExperimentSpec, Modes, StoredPrecoder, SweepRow};
use rsma_jrc::linalg::{CMatrix, RVector};
use rsma_jrc::quantization::{dac_power, precoder_power_budget, resolution_delta};
use rsma_jrc::radar::beampattern_error;
use rsma_jrc::scenario::generate_rayleigh_channels;
use rsma_jrc::sdr::build_lifted_problem;
use rsma_jrc::wmmse::{solve_v_update, v_objective, Penalty, WmmseOptions};
use rsma_jrc::{Error, Mode, SystemConfig};

type Outcome = Result<(bool, String), Error>;

/// δ(b) from `δ² = 1 − (π√3/2)·2^{−2b}`.
fn delta_ref(b: u32) -> f64 {
    (1.0 - PI * 3f64.sqrt() / 2.0 * 4f64.powi(-(b as i32))).sqrt()
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for b in 1..=20u32 {
        let p_dac = 1e-4;
        // P_DAC·sqrt(π√3 / (2(1 − δ²))) with 1 − δ² = (π√3/2)·4^{−b}
        let expected = 2f64.powi(b as i32) * p_dac;
        let got = dac_power(b, p_dac)?;
        worst = worst.max((got - expected).abs() / expected);
    }
    let (d1, d3) = (resolution_delta(1)?, resolution_delta(3)?);
    let ok = worst < 1e-12
        && (d1 - 0.565531).abs() < 1e-5
        && (d3 - 0.978514).abs() < 1e-5
        && (d1 - delta_ref(1)).abs() < 1e-12
        && (d3 - delta_ref(3)).abs() < 1e-12;
    Ok((
        ok,
        format!("max rel err {worst:.1e}, δ(1) = {d1:.6}, δ(3) = {d3:.6}"),
    ))
}

fn criterion_2() -> Outcome {
    let b11 = precoder_power_budget(1.0, 4, 11, 1e-4)?;
    let b12 = precoder_power_budget(1.0, 4, 12, 1e-4);
    let expected = 1.0 - 4.0 * 2048.0 * 1e-4;
    let ok = (b11.total - expected).abs() < 1e-12
        && (b11.total - 0.1808).abs() < 1e-12
        && matches!(b12, Err(Error::InfeasibleBits { bits: 12, .. }));
    Ok((
        ok,
        format!(
            "b=11 budget {:.4} W, b=12 rejected: {}",
            b11.total,
            b12.is_err()
        ),
    ))
}

/// Constraint residuals of one stored design: per-antenna power and
/// common-rate feasibility.
fn constraint_violation(s: &StoredPrecoder) -> Result<(f64, f64), Error> {
    let budget = precoder_power_budget(s.cfg.p_total, s.cfg.antennas, s.cfg.bits, s.cfg.p_dac)?;
    let power =
        s.p.per_antenna_power()
            .iter()
            .map(|p| (p - budget.per_antenna).abs())
            .fold(0.0, f64::max);
    let m = s.reevaluate()?;
    let total: f64 = s.c.iter().sum();
    let mut rate: f64 = s.c.iter().map(|c| (-c).max(0.0)).fold(0.0, f64::max);
    for r in &m.common_rates {
        rate = rate.max(total - r);
    }
    Ok((power, rate))
}

fn criterion_3(stored: &[(StoredPrecoder, bool)]) -> Outcome {
    let (mut power, mut rate, mut n) = (0.0f64, 0.0f64, 0);
    for (s, converged) in stored {
        if !converged {
            continue;
        }
        let (p, r) = constraint_violation(s)?;
        power = power.max(p);
        rate = rate.max(r);
        n += 1;
    }
    Ok((
        n > 0 && power <= 1e-8 && rate <= 1e-8,
        format!("{n} converged runs, max power dev {power:.1e}, max rate excess {rate:.1e}"),
    ))
}

fn final_residual(path: &Path) -> Result<(usize, f64), Error> {
    let text = std::fs::read_to_string(path)?;
    let last = text.lines().last().unwrap_or_default();
    let f: Vec<&str> = last.split(',').collect();
    let iter = f[0].parse().unwrap_or(0);
    let r = f
        .get(1)
        .and_then(|v| v.parse().ok())
        .unwrap_or(f64::INFINITY);
    Ok((iter, r))
}

fn criterion_4(traces: &[std::path::PathBuf]) -> Outcome {
    let mut hits = 0;
    let mut parts = Vec::new();
    for path in traces {
        let (iter, r) = final_residual(path)?;
        if r <= 1e-4 && iter <= 500 {
            hits += 1;
        }
        let name = path.file_name().unwrap().to_string_lossy();
        parts.push(format!("{name}: {iter} it, r {r:.1e}"));
    }
    Ok((
        traces.len() == 4 && hits >= 3,
        format!("{hits}/4 converged; {}", parts.join("; ")),
    ))
}

fn by_mode(rows: &[SweepRow], mode: Mode, seed: u64) -> Vec<&SweepRow> {
    let mut v: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.mode == mode && r.seed == seed)
        .collect();
    v.sort_by_key(|r| r.bits);
    v
}

fn criterion_5(rows: &[SweepRow], seed: u64) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for mode in [Mode::Rsma, Mode::Sdma] {
        let sel: Vec<&SweepRow> = by_mode(rows, mode, seed)
            .into_iter()
            .filter(|r| r.bits <= 10)
            .collect();
        let worst = sel
            .windows(2)
            .map(|w| w[1].nmse / w[0].nmse)
            .fold(0.0, f64::max);
        ok &= sel.len() == 7 && worst <= 1.05;
        let list: Vec<String> = sel.iter().map(|r| format!("{:.4}", r.nmse)).collect();
        parts.push(format!(
            "{mode} max step ratio {worst:.4} [{}]",
            list.join(" ")
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_6(rows: &[SweepRow], seeds: &[u64]) -> Outcome {
    let mut passing = 0;
    let mut parts = Vec::new();
    for &seed in seeds {
        let mut interior = false;
        let mut argmax = Vec::new();
        for mode in [Mode::Rsma, Mode::Sdma] {
            let sel = by_mode(rows, mode, seed);
            let b = experiments::rate_argmax(&sel).unwrap_or(0);
            interior |= b > 4 && b < 11;
            argmax.push(format!("{mode} b*={b}"));
        }
        passing += usize::from(interior);
        parts.push(format!("seed {seed}: {}", argmax.join(" ")));
    }
    Ok((
        2 * passing > seeds.len(),
        format!(
            "{passing}/{} seeds interior; {}",
            seeds.len(),
            parts.join("; ")
        ),
    ))
}

/// Smallest RSMA − SDMA sum-rate and objective gaps over matching
/// (b, λ, seed) rows, with the number of pairs.
fn dominance(rows: &[&SweepRow]) -> (usize, f64, f64) {
    let mut sdma = HashMap::new();
    for r in rows.iter().filter(|r| r.mode == Mode::Sdma) {
        sdma.insert((r.bits, r.lambda.to_bits(), r.seed), *r);
    }
    let (mut pairs, mut rate, mut obj) = (0, f64::INFINITY, f64::INFINITY);
    for r in rows.iter().filter(|r| r.mode == Mode::Rsma) {
        if let Some(s) = sdma.get(&(r.bits, r.lambda.to_bits(), r.seed)) {
            rate = rate.min(r.sum_rate - s.sum_rate);
            obj = obj.min(r.objective - s.objective);
            pairs += 1;
        }
    }
    (pairs, rate, obj)
}

/// Judged on the fixed-seed sweeps; replicate seeds are reported alongside.
fn criterion_7(rows: &[SweepRow], seed: u64) -> Outcome {
    let main: Vec<&SweepRow> = rows.iter().filter(|r| r.seed == seed).collect();
    let extra: Vec<&SweepRow> = rows.iter().filter(|r| r.seed != seed).collect();
    let (pairs, rate, obj) = dominance(&main);
    let (xp, xr, xo) = dominance(&extra);
    Ok((
        pairs > 0 && rate >= -1e-3,
        format!(
            "seed {seed}: {pairs} (b, λ) pairs, min RSMA − SDMA sum-rate {rate:.4}, objective {obj:.4}; \
             replicate seeds: {xp} pairs, min sum-rate gap {xr:.4}, objective {xo:.4}"
        ),
    ))
}

/// Objective `Σ rates − λ·error` of a 2-antenna single-user RSMA design,
/// written out directly.
struct TinyOracle {
    h: [Complex64; 2],
    delta: f64,
    noise_var: f64,
    noise_power: f64,
    lambda: f64,
    per_antenna: f64,
    steering: Vec<[Complex64; 2]>,
    desired: Vec<f64>,
}

impl TinyOracle {
    fn value(&self, p: &[[Complex64; 2]; 2]) -> f64 {
        // p[stream][antenna]
        let d2 = self.delta * self.delta;
        let h_norm = self.h[0].norm_sqr() + self.h[1].norm_sqr();
        let noise = (self.noise_var * h_norm + self.noise_power) / d2;
        let gain = |s: usize| (self.h[0] * p[s][0] + self.h[1] * p[s][1]).norm_sqr();
        let (gc, gp) = (gain(0), gain(1));
        let rate = (1.0 + gc / (noise + gp)).log2() + (1.0 + gp / noise).log2();
        let pattern: Vec<f64> = self
            .steering
            .iter()
            .map(|a| {
                let mut b = 2.0 * self.noise_var;
                for col in p {
                    b += d2 * (a[0].conj() * col[0] + a[1].conj() * col[1]).norm_sqr();
                }
                b
            })
            .collect();
        let dd: f64 = self.desired.iter().map(|d| d * d).sum();
        let db: f64 = self.desired.iter().zip(&pattern).map(|(d, b)| d * b).sum();
        let alpha = (db / dd).max(1e-9);
        let err: f64 = self
            .desired
            .iter()
            .zip(&pattern)
            .map(|(d, b)| (alpha * d - b).powi(2))
            .sum();
        rate - self.lambda * err
    }

    /// Row `n` carries magnitudes `√P(cos φ_n, sin φ_n)`; the second antenna
    /// gets a phase `ψ_j` on stream `j`. Column phases do not matter.
    fn design(&self, x: &[f64; 4]) -> [[Complex64; 2]; 2] {
        let s = self.per_antenna.sqrt();
        let [f0, f1, p0, p1] = *x;
        [
            [
                Complex64::new(s * f0.cos(), 0.0),
                Complex64::from_polar(s * f1.cos(), p0),
            ],
            [
                Complex64::new(s * f0.sin(), 0.0),
                Complex64::from_polar(s * f1.sin(), p1),
            ],
        ]
    }
}

fn criterion_8() -> Outcome {
    let cfg = SystemConfig {
        antennas: 2,
        users: 1,
        bits: 4,
        lambda: 1.0,
        grid_resolution_deg: 10.0,
        ..Default::default()
    };
    let channels = generate_rayleigh_channels(&cfg)?;
    let problem = Problem::new(&cfg, channels.clone())?;
    let m = problem.grid.len();
    let sol = admm::run(&cfg, &channels)?;

    let delta = delta_ref(cfg.bits);
    let d2 = delta * delta;
    let oracle = TinyOracle {
        h: [channels.h[(0, 0)], channels.h[(0, 1)]],
        delta,
        noise_var: d2 * (1.0 - d2).powi(2),
        noise_power: cfg.noise_power,
        lambda: cfg.lambda,
        per_antenna: cfg.p_total / 2.0 - 16.0 * cfg.p_dac,
        steering: (0..19)
            .map(|i| {
                let th = (-90.0 + 10.0 * i as f64).to_radians();
                [
                    Complex64::new(1.0, 0.0),
                    Complex64::from_polar(1.0, 2.0 * PI * 0.5 * th.sin()),
                ]
            })
            .collect(),
        desired: (0..19).map(|i| if i == 9 { 1.0 } else { 0.0 }).collect(),
    };

    let n = 32usize;
    let mag = |i: usize| PI / 2.0 * i as f64 / (n - 1) as f64;
    let ph = |i: usize| 2.0 * PI * i as f64 / n as f64;
    let mut best = (f64::NEG_INFINITY, [0.0; 4]);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let x = [mag(a), mag(b), ph(c), ph(d)];
                    let v = oracle.value(&oracle.design(&x));
                    if v > best.0 {
                        best = (v, x);
                    }
                }
            }
        }
    }
    let grid_best = best.0;
    // pattern search from the grid winner, reported for context only
    let mut step = PI / 64.0;
    while step > 1e-9 {
        let mut moved = false;
        for i in 0..4 {
            for s in [step, -step] {
                let mut x = best.1;
                x[i] += s;
                let v = oracle.value(&oracle.design(&x));
                if v > best.0 {
                    best = (v, x);
                    moved = true;
                }
            }
        }
        if !moved {
            step /= 2.0;
        }
    }

    let p = &sol.p.p;
    let as_oracle = [[p[(0, 0)], p[(1, 0)]], [p[(0, 1)], p[(1, 1)]]];
    let cross = oracle.value(&as_oracle);
    let admm_obj = sol.metrics.objective;
    let gap = (grid_best - admm_obj) / grid_best.abs();
    Ok((
        m == 19 && gap <= 0.05 && (cross - admm_obj).abs() <= 1e-9 * admm_obj.abs().max(1.0),
        format!(
            "ADMM {admm_obj:.6}, grid best ({} pts) {grid_best:.6}, refined {:.6}, rel gap {gap:.2e}, oracle at ADMM point {cross:.6}",
            n.pow(4),
            best.0
        ),
    ))
}

fn random_precoder(
    rng: &mut ChaCha8Rng,
    antennas: usize,
    users: usize,
    per_antenna: f64,
) -> PrecoderMatrix {
    let mut p = CMatrix::from_fn(antennas, users + 1, |_, _| {
        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    for mut row in p.row_iter_mut() {
        let norm = row.norm();
        row *= Complex64::new(per_antenna.sqrt() / norm, 0.0);
    }
    PrecoderMatrix::new(p).expect("finite")
}

fn criterion_9() -> Outcome {
    let mut worst_rise: f64 = f64::NEG_INFINITY;
    let mut steps = 0;
    let mut mismatch: f64 = 0.0;
    for inst in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + inst);
        let cfg = SystemConfig {
            seed: 77 + inst,
            bits: [3, 4, 6, 8, 10][inst as usize % 5],
            rho: [1.0, 10.0, 300.0][inst as usize % 3],
            mode: if inst % 4 == 3 {
                Mode::Sdma
            } else {
                Mode::Rsma
            },
            ..Default::default()
        };
        let problem = Problem::new(&cfg, generate_rayleigh_channels(&cfg)?)?;
        let per = problem.budget.per_antenna;
        let u = Stacked {
            alpha: rng.random_range(0.1..3.0),
            c: vec![0.0; cfg.users],
            p: random_precoder(&mut rng, cfg.antennas, cfg.users, per),
        };
        let y = RVector::from_fn(problem.ops.dual_len(), |_, _| rng.random_range(-1.0..1.0));
        let penalty = Penalty::new(&u, &y, cfg.rho, &problem.ops);
        let init = random_precoder(&mut rng, cfg.antennas, cfg.users, per);
        let opts = WmmseOptions {
            tol: cfg.wmmse_tol,
            max_iter: cfg.wmmse_max_iter,
            mode: cfg.mode,
        };
        let link = problem.link();
        let out = solve_v_update(&u, &penalty, &link, &init, &opts)?;
        for w in out.objectives.windows(2) {
            worst_rise = worst_rise.max(w[1] - w[0]);
            steps += 1;
        }
        let recomputed = v_objective(&out.v.p, &out.v.c, &penalty, &link)?;
        mismatch =
            mismatch.max((recomputed - out.objectives.last().copied().unwrap_or(f64::NAN)).abs());
    }
    Ok((
        worst_rise <= 1e-8 && mismatch <= 1e-9,
        format!("20 instances, {steps} AO steps, largest increase {worst_rise:.1e}, final recompute dev {mismatch:.1e}"),
    ))
}

fn criterion_10(solutions: &[(SystemConfig, admm::Solution)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut lifted_dev: f64 = 0.0;
    for b in [2u32, 4, 8] {
        let cfg = SystemConfig {
            bits: b,
            lambda: 1.0,
            ..Default::default()
        };
        let problem = Problem::new(&cfg, generate_rayleigh_channels(&cfg)?)?;
        for _ in 0..5 {
            let p = random_precoder(
                &mut rng,
                cfg.antennas,
                cfg.users,
                problem.budget.per_antenna,
            );
            let alpha = rng.random_range(0.01..5.0);
            let v = Stacked {
                alpha,
                c: vec![0.0; cfg.users],
                p: p.clone(),
            };
            let y = RVector::zeros(problem.ops.dual_len());
            let lifted = build_lifted_problem(
                &v,
                &y,
                0.0,
                &problem.ops,
                &problem.model,
                &problem.grid,
                &problem.budget,
                1.0,
                Mode::Rsma,
            )?;
            let sdr = lifted.objective(&lifted.rank_one(&p, alpha));
            let radar = beampattern_error(
                alpha,
                &p,
                problem.model.delta,
                problem.model.noise_var,
                &problem.grid,
            );
            lifted_dev = lifted_dev.max((sdr - radar).abs() / radar.abs().max(1.0));
        }
    }
    let mut trace_dev: f64 = 0.0;
    for (cfg, sol) in solutions {
        let problem = Problem::new(cfg, generate_rayleigh_channels(cfg)?)?;
        let m = admm::evaluate(sol, &problem)?;
        let last = sol
            .trace
            .last()
            .ok_or_else(|| Error::Consistency("empty trace".into()))?;
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
        trace_dev = trace_dev
            .max(rel(m.sum_rate, last.sum_rate))
            .max(rel(m.nmse, last.nmse));
    }
    Ok((
        lifted_dev <= 1e-9 && trace_dev <= 1e-9 && !solutions.is_empty(),
        format!(
            "lifted vs radar max dev {lifted_dev:.1e} (15 points), evaluate vs trace max dev {trace_dev:.1e} ({} runs)",
            solutions.len()
        ),
    ))
}

fn criterion_11(out: &Path) -> Outcome {
    let spec = ExperimentSpec::quantizer(SystemConfig::default(), out);
    let rows = experiments::run_quantizer_validation(&spec, 1_000_000)?;
    let worst = rows.iter().map(|r| r.correlation).fold(0.0, f64::max);
    let bits: Vec<u32> = rows.iter().map(|r| r.bits).collect();
    Ok((
        bits == (1..=8).collect::<Vec<_>>() && worst < 0.01,
        format!("b = 1..8, 1e6 samples, max correlation {worst:.2e}"),
    ))
}

fn report(n: usize, outcome: Outcome, started: Instant, all: &mut bool) {
    let secs = started.elapsed().as_secs_f64();
    let (ok, msg) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    *all &= ok;
    println!(
        "criterion {n:>2}: {}  ({secs:.1} s) {msg}",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn load_stored(dir: &Path, rows: &[SweepRow]) -> Result<Vec<(StoredPrecoder, bool)>, Error> {
    rows.iter()
        .map(|r| {
            let s = StoredPrecoder::load(&dir.join(&r.precoder_file))?;
            let m = s.reevaluate()?;
            if (m.sum_rate - r.sum_rate).abs() > 1e-9 * r.sum_rate.abs().max(1.0)
                || (m.nmse - r.nmse).abs() > 1e-9 * r.nmse.abs().max(1.0)
            {
                return Err(Error::Consistency(format!(
                    "{} does not reproduce its row",
                    r.precoder_file
                )));
            }
            Ok((s, r.converged))
        })
        .collect()
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path();
    let base = SystemConfig::default();
    let seeds = [base.seed, base.seed + 1, base.seed + 2];
    let mut all = true;

    let t = Instant::now();
    report(1, criterion_1(), t, &mut all);
    let t = Instant::now();
    report(2, criterion_2(), t, &mut all);

    // shared runs
    let t = Instant::now();
    let conv_spec = ExperimentSpec::convergence(base.clone(), out.join("convergence"));
    let traces = experiments::run_convergence(&conv_spec);
    let conv_solutions: Result<Vec<(SystemConfig, admm::Solution)>, Error> =
        experiments::CONVERGENCE_BITS
            .iter()
            .map(|&b| {
                let cfg = SystemConfig {
                    bits: b,
                    lambda: experiments::CONVERGENCE_LAMBDA,
                    ..base.clone()
                };
                let sol = admm::run(&cfg, &generate_rayleigh_channels(&cfg)?)?;
                Ok((cfg, sol))
            })
            .collect();
    let t_conv = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let mut bit_spec = ExperimentSpec::bit_sweep(base.clone(), out.join("bitsweep"));
    bit_spec.seeds = seeds.to_vec();
    bit_spec.modes = Modes::Both;
    let bit_rows = experiments::run_bit_sweep(&bit_spec);
    let t_bits = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let trade_spec = ExperimentSpec::tradeoff(base.clone(), out.join("tradeoff"));
    let trade_rows = experiments::run_tradeoff_sweep(&trade_spec);
    let t_trade = t.elapsed().as_secs_f64();
    println!("shared runs: convergence {t_conv:.1} s, bit sweep {t_bits:.1} s, trade-off sweep {t_trade:.1} s");

    let t = Instant::now();
    let c3 = (|| {
        let mut stored = Vec::new();
        let bit = bit_rows
            .as_ref()
            .map_err(|e| Error::Consistency(e.to_string()))?;
        let trade = trade_rows
            .as_ref()
            .map_err(|e| Error::Consistency(e.to_string()))?;
        stored.extend(load_stored(&bit_spec.out_dir, bit)?);
        stored.extend(load_stored(&trade_spec.out_dir, trade)?);
        for (cfg, sol) in conv_solutions
            .as_ref()
            .map_err(|e| Error::Consistency(e.to_string()))?
        {
            stored.push((StoredPrecoder::from_solution(cfg, sol), sol.converged));
        }
        criterion_3(&stored)
    })();
    report(3, c3, t, &mut all);

    let t = Instant::now();
    let c4 = match &traces {
        Ok(paths) => criterion_4(paths),
        Err(e) => Err(Error::Consistency(e.to_string())),
    };
    report(4, c4, t, &mut all);

    let t = Instant::now();
    let c5 = match &bit_rows {
        Ok(rows) => criterion_5(rows, base.seed),
        Err(e) => Err(Error::Consistency(e.to_string())),
    };
    report(5, c5, t, &mut all);

    let t = Instant::now();
    let c6 = match &bit_rows {
        Ok(rows) => criterion_6(rows, &seeds),
        Err(e) => Err(Error::Consistency(e.to_string())),
    };
    report(6, c6, t, &mut all);

    let t = Instant::now();
    let c7 = match (&bit_rows, &trade_rows) {
        (Ok(a), Ok(b)) => {
            let mut rows = a.clone();
            rows.extend(b.iter().cloned());
            criterion_7(&rows, base.seed)
        }
        (Err(e), _) | (_, Err(e)) => Err(Error::Consistency(e.to_string())),
    };
    report(7, c7, t, &mut all);

    let t = Instant::now();
    report(8, criterion_8(), t, &mut all);
    let t = Instant::now();
    report(9, criterion_9(), t, &mut all);

    let t = Instant::now();
    let c10 = match &conv_solutions {
        Ok(sols) => criterion_10(sols),
        Err(e) => Err(Error::Consistency(e.to_string())),
    };
    report(10, c10, t, &mut all);

    let t = Instant::now();
    report(11, criterion_11(&out.join("quantizer")), t, &mut all);

    if all {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: at least one criterion failed");
        ExitCode::FAILURE
    }
}
