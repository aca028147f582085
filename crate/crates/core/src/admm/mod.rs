//! Outer consensus-ADMM loop: a sum-rate block `v` handled by WMMSE, a
//! beampattern block `u` handled by SDR, and a dual ascent on the precoder
//! consensus `P_v = P_u`.

pub mod split;

use std::io::Write;

use num_complex::Complex64;

use crate::comms::{stream_rates, PrecoderMatrix};
use crate::config::{Mode, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::{RVector, ZERO};
use crate::quantization::{precoder_power_budget, PowerBudget, QuantizationModel};
use crate::radar::{achieved_pattern, alpha_from_pattern, error_from_pattern, nmse_from_pattern};
use crate::scenario::{AngleGrid, ChannelSet};
use crate::sdr::{solve_u_update, SdpWarmStart, UUpdateOptions};
use crate::wmmse::{
    best_common_split, matched_filter_init, project_rows, solve_v_update, Link, Penalty,
    WmmseOptions,
};

pub use split::{dual_update, residuals, SplitOperators, Stacked};

/// Share of the precoder budget put on the common stream when starting
/// from precoders that have none.
pub const COMMON_INIT_FRACTION: f64 = 0.1;

/// Relative agreement required between [`evaluate`] and a trace.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Fixed data of one optimization problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub cfg: SystemConfig,
    pub channels: ChannelSet,
    pub grid: AngleGrid,
    pub model: QuantizationModel,
    pub budget: PowerBudget,
    pub ops: SplitOperators,
}

impl Problem {
    pub fn new(cfg: &SystemConfig, channels: ChannelSet) -> Result<Self> {
        cfg.validate()?;
        if channels.users() != cfg.users || channels.antennas() != cfg.antennas {
            return Err(Error::InvalidArgument(format!(
                "channels are {}x{}, config expects {}x{}",
                channels.users(),
                channels.antennas(),
                cfg.users,
                cfg.antennas
            )));
        }
        Ok(Self {
            grid: AngleGrid::from_config(cfg)?,
            model: QuantizationModel::new(cfg.bits, cfg.p_dac, cfg.noise_var_formula)?,
            budget: precoder_power_budget(cfg.p_total, cfg.antennas, cfg.bits, cfg.p_dac)?,
            ops: SplitOperators::new(cfg.users, cfg.antennas),
            cfg: cfg.clone(),
            channels,
        })
    }

    pub fn link(&self) -> Link<'_> {
        Link {
            channels: &self.channels,
            model: &self.model,
            noise_power: self.cfg.noise_power,
        }
    }
}

/// Performance of a precoder design.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub sum_rate: f64,
    pub nmse: f64,
    pub error: f64,
    pub alpha: f64,
    /// `Σ_k (C_k + R_k) − λ·error`
    pub objective: f64,
    pub c: Vec<f64>,
    pub common_rates: Vec<f64>,
    pub private_rates: Vec<f64>,
}

/// Metrics of `(P, c, α)` computed from scratch.
pub fn metrics(problem: &Problem, p: &PrecoderMatrix, c: &[f64], alpha: f64) -> Result<Metrics> {
    let rates = stream_rates(
        p,
        &problem.channels,
        &problem.model,
        problem.cfg.noise_power,
    )?;
    crate::comms::check_common_rates(c, &rates.common)?;
    let pattern = achieved_pattern(
        p,
        problem.model.delta,
        problem.model.noise_var,
        &problem.grid,
    );
    let error = error_from_pattern(alpha, &problem.grid.desired, &pattern);
    let sum_rate = c.iter().sum::<f64>() + rates.private.iter().sum::<f64>();
    Ok(Metrics {
        sum_rate,
        nmse: nmse_from_pattern(alpha, &problem.grid.desired, &pattern),
        error,
        alpha,
        objective: sum_rate - problem.cfg.lambda * error,
        c: c.to_vec(),
        common_rates: rates.common,
        private_rates: rates.private,
    })
}

/// One row of the convergence trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub lagrangian: f64,
    pub sum_rate: f64,
    pub nmse: f64,
}

pub const TRACE_HEADER: &str = "iter,primal_residual,dual_residual,lagrangian,sum_rate,nmse";

pub fn write_trace_csv<W: Write>(trace: &[TraceRecord], mut out: W) -> Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for t in trace {
        writeln!(
            out,
            "{},{:e},{:e},{:e},{:e},{:e}",
            t.iter, t.primal_residual, t.dual_residual, t.lagrangian, t.sum_rate, t.nmse
        )?;
    }
    Ok(())
}

/// Iterates of the outer loop.
#[derive(Debug, Clone)]
pub struct AdmmState {
    pub v: Stacked,
    pub u: Stacked,
    pub y: RVector,
    pub t: usize,
    pub r: RVector,
    pub q: RVector,
    pub trace: Vec<TraceRecord>,
}

/// Result of a full run.
#[derive(Debug, Clone)]
pub struct Solution {
    pub mode: Mode,
    pub bits: u32,
    pub lambda: f64,
    pub p: PrecoderMatrix,
    pub c: Vec<f64>,
    pub alpha: f64,
    pub metrics: Metrics,
    pub converged: bool,
    pub iterations: usize,
    pub trace: Vec<TraceRecord>,
    pub state: AdmmState,
}

impl Solution {
    pub fn sum_rate(&self) -> f64 {
        self.metrics.sum_rate
    }

    pub fn nmse(&self) -> f64 {
        self.metrics.nmse
    }
}

/// Precoders, common split and α taken as the answer of an iterate: the
/// u-block precoders (which meet the power constraint exactly) with the
/// largest common rate they support.
fn assemble(problem: &Problem, u: &Stacked) -> Result<(Vec<f64>, Metrics)> {
    let c = best_common_split(&u.p, &problem.link(), problem.cfg.mode)?;
    let m = metrics(problem, &u.p, &c, u.alpha)?;
    Ok((c, m))
}

fn augmented_lagrangian(problem: &Problem, v: &Stacked, u: &Stacked, y: &RVector) -> Result<f64> {
    let link = problem.link();
    let rates = stream_rates(&v.p, link.channels, link.model, link.noise_power)?;
    let f_c = -(v.c.iter().sum::<f64>() + rates.private.iter().sum::<f64>());
    let pattern = achieved_pattern(
        &u.p,
        problem.model.delta,
        problem.model.noise_var,
        &problem.grid,
    );
    let f_r = problem.cfg.lambda * error_from_pattern(u.alpha, &problem.grid.desired, &pattern);
    let penalty = Penalty::new(u, y, problem.cfg.rho, &problem.ops);
    Ok(f_c + f_r + penalty.value(&v.p.p))
}

/// Starting precoders: matched filter, or the given precoders with common
/// power injected if they have none.
pub fn initial_precoders(problem: &Problem, start: Option<&PrecoderMatrix>) -> PrecoderMatrix {
    let mode = problem.cfg.mode;
    let mut p = match start {
        None => matched_filter_init(
            &problem.channels,
            &problem.budget,
            mode,
            COMMON_INIT_FRACTION,
        ),
        Some(p0) => {
            let mut p = p0.clone();
            if mode == Mode::Rsma && p.has_zero_common() {
                let mf = matched_filter_init(
                    &problem.channels,
                    &problem.budget,
                    Mode::Rsma,
                    COMMON_INIT_FRACTION,
                );
                let keep = Complex64::new((1.0 - COMMON_INIT_FRACTION).sqrt(), 0.0);
                for j in 1..p.p.ncols() {
                    let col = p.p.column(j) * keep;
                    p.p.set_column(j, &col);
                }
                p.p.set_column(0, &mf.p.column(0));
            }
            p
        }
    };
    if mode == Mode::Sdma {
        p.p.column_mut(0).fill(ZERO);
    }
    project_rows(&mut p, problem.budget.per_antenna);
    p
}

/// Runs the consensus ADMM from the given starting precoders.
pub fn run_from(problem: &Problem, start: Option<&PrecoderMatrix>) -> Result<Solution> {
    let cfg = &problem.cfg;
    let link = problem.link();
    let ops = &problem.ops;
    let with_ctx = |t: usize| {
        move |e: Error| Error::Iteration {
            iteration: t,
            source: Box::new(e),
        }
    };

    let p0 = initial_precoders(problem, start);
    let pattern = achieved_pattern(
        &p0,
        problem.model.delta,
        problem.model.noise_var,
        &problem.grid,
    );
    let alpha0 = alpha_from_pattern(&problem.grid.desired, &pattern)?;
    let c0 = best_common_split(&p0, &link, cfg.mode)?;
    let mut u = Stacked {
        alpha: alpha0,
        c: c0,
        p: p0,
    };
    let mut v = u.clone();
    let mut y = RVector::zeros(ops.dual_len());
    let mut r = RVector::zeros(ops.dual_len());
    let mut q = RVector::zeros(ops.dual_len());
    let mut trace = Vec::new();
    let mut warm: Option<SdpWarmStart> = None;
    let mut converged = false;
    let mut t = 0;

    let wopts = WmmseOptions {
        tol: cfg.wmmse_tol,
        max_iter: cfg.wmmse_max_iter,
        mode: cfg.mode,
    };
    let uopts = UUpdateOptions {
        tol: cfg.sdr_tol,
        max_iter: cfg.sdr_max_iter,
        randomization: cfg.sdr_randomization,
        refine_iter: cfg.u_refine_iter,
        mode: cfg.mode,
    };

    while t < cfg.admm_max_iter {
        let penalty = Penalty::new(&u, &y, cfg.rho, ops);
        v = solve_v_update(&u, &penalty, &link, &v.p, &wopts)
            .map_err(with_ctx(t))?
            .v;
        let up = solve_u_update(
            &v,
            &y,
            cfg.rho,
            ops,
            &problem.model,
            &problem.grid,
            &problem.budget,
            cfg.lambda,
            &uopts,
            Some(&u),
            warm.as_ref(),
        )
        .map_err(with_ctx(t))?;
        warm = Some(up.warm);
        let u_prev = std::mem::replace(&mut u, up.u);

        let (v_r, u_r) = (v.to_real(), u.to_real());
        y = dual_update(&y, cfg.rho, &v_r, &u_r, ops);
        (r, q) = residuals(&v_r, &u_r, &u_prev.to_real(), ops);
        if cfg.textbook_dual_residual {
            q *= cfg.rho;
        }
        t += 1;

        let (_, m) = assemble(problem, &u).map_err(with_ctx(t))?;
        trace.push(TraceRecord {
            iter: t,
            primal_residual: r.norm(),
            dual_residual: q.norm(),
            lagrangian: augmented_lagrangian(problem, &v, &u, &y)?,
            sum_rate: m.sum_rate,
            nmse: m.nmse,
        });
        log::trace!(
            "admm {t}: r={:.3e} q={:.3e} rate={:.4} nmse={:.4e}",
            r.norm(),
            q.norm(),
            m.sum_rate,
            m.nmse
        );
        if r.norm() <= cfg.admm_tol && q.norm() <= cfg.admm_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!(
            "ADMM hit the iteration cap ({}) with residuals {:.3e}/{:.3e}",
            cfg.admm_max_iter,
            r.norm(),
            q.norm()
        );
    }

    let (c, metrics) = assemble(problem, &u)?;
    Ok(Solution {
        mode: cfg.mode,
        bits: cfg.bits,
        lambda: cfg.lambda,
        p: u.p.clone(),
        c,
        alpha: u.alpha,
        metrics,
        converged,
        iterations: t,
        trace: trace.clone(),
        state: AdmmState {
            v,
            u,
            y,
            t,
            r,
            q,
            trace,
        },
    })
}

/// Full solve for a configuration. In RSMA mode with
/// `warm_start_from_sdma`, SDMA is solved first and RSMA starts from its
/// precoders; the SDMA design is kept if RSMA ends with a lower objective.
pub fn run(cfg: &SystemConfig, channels: &ChannelSet) -> Result<Solution> {
    let problem = Problem::new(cfg, channels.clone())?;
    if cfg.mode == Mode::Sdma || !cfg.warm_start_from_sdma {
        return run_from(&problem, None);
    }
    Ok(run_both(cfg, channels)?.1)
}

/// SDMA and RSMA solutions for the same scenario, the RSMA run warm started
/// from the SDMA precoders. The mode field of `cfg` is ignored.
pub fn run_both(cfg: &SystemConfig, channels: &ChannelSet) -> Result<(Solution, Solution)> {
    let sdma_cfg = SystemConfig {
        mode: Mode::Sdma,
        ..cfg.clone()
    };
    let rsma_cfg = SystemConfig {
        mode: Mode::Rsma,
        ..cfg.clone()
    };
    let sdma = run_from(&Problem::new(&sdma_cfg, channels.clone())?, None)?;
    let rsma = run_from(&Problem::new(&rsma_cfg, channels.clone())?, Some(&sdma.p))?;
    if rsma.metrics.objective < sdma.metrics.objective {
        log::info!(
            "RSMA objective {:.6} below SDMA {:.6}; keeping the SDMA design",
            rsma.metrics.objective,
            sdma.metrics.objective
        );
        let kept = Solution {
            mode: Mode::Rsma,
            ..sdma.clone()
        };
        return Ok((sdma, kept));
    }
    Ok((sdma, rsma))
}

/// Recomputes the metrics of a solution and checks them against its trace.
pub fn evaluate(solution: &Solution, problem: &Problem) -> Result<Metrics> {
    let m = metrics(problem, &solution.p, &solution.c, solution.alpha)?;
    if let Some(last) = solution.trace.last() {
        let close =
            |a: f64, b: f64| (a - b).abs() <= CONSISTENCY_TOL * a.abs().max(b.abs()).max(1.0);
        if !close(m.sum_rate, last.sum_rate) || !close(m.nmse, last.nmse) {
            return Err(Error::Consistency(format!(
                "recomputed (sum_rate {}, nmse {}) differs from trace ({}, {})",
                m.sum_rate, m.nmse, last.sum_rate, last.nmse
            )));
        }
    }
    Ok(m)
}
