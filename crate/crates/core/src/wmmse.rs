//! Sum-rate block of the ADMM split, solved by rate-WMMSE alternating
//! optimization.
//!
//! With scalar receive equalizers `g` and weights `w` fixed, every rate is
//! lower-bounded by `(1 − w·ε(P) + ln w)/ln 2`, where `ε` is the stream MSE.
//! The bound is tight at the MMSE equalizer and `w = 1/ε`, and it is concave
//! in `P`, so each precoder step is a small convex QCQP.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::admm::split::{SplitOperators, Stacked};
use crate::comms::{effective_noise_variance, stream_gains, stream_rates, PrecoderMatrix};
use crate::config::Mode;
use crate::error::{Error, Result};
use crate::linalg::{add_hermitian_block, add_linear_block, CMatrix, CVector, RVector};
use crate::qcqp::{self, BarrierOptions, Quadratic};
use crate::quantization::{PowerBudget, QuantizationModel};
use crate::scenario::ChannelSet;

/// KKT tolerance required from every precoder step.
pub const KKT_TOL: f64 = 1e-7;

/// Constraints whose bound is at or below this value at the current point
/// are treated as inactive (the common stream is switched off for that
/// user and the constraint cannot be made strictly feasible).
const DEAD_COMMON_RATE: f64 = 1e-12;

/// Channels and impairments seen by the receivers.
#[derive(Debug, Clone, Copy)]
pub struct Link<'a> {
    pub channels: &'a ChannelSet,
    pub model: &'a QuantizationModel,
    pub noise_power: f64,
}

impl Link<'_> {
    /// `σ_η,k²/δ²`, the noise seen after normalizing out the DAC gain.
    pub fn normalized_noise(&self, k: usize) -> f64 {
        let h = self.channels.row(k);
        effective_noise_variance(&h, self.model.noise_var, self.noise_power)
            / (self.model.delta * self.model.delta)
    }
}

/// Consensus terms of the augmented Lagrangian seen by the v-block:
/// `Re⟨Y, P − P_u⟩ + (ρ/2)‖P − P_u‖²`.
#[derive(Debug, Clone)]
pub struct Penalty {
    pub target: CMatrix,
    pub dual: CMatrix,
    pub rho: f64,
}

impl Penalty {
    pub fn new(u: &Stacked, y: &RVector, rho: f64, ops: &SplitOperators) -> Self {
        Self {
            target: u.p.p.clone(),
            dual: ops.dual_as_matrix(y),
            rho,
        }
    }

    pub fn value(&self, p: &CMatrix) -> f64 {
        let diff = p - &self.target;
        let linear: f64 = self
            .dual
            .iter()
            .zip(diff.iter())
            .map(|(y, d)| (y.conj() * d).re)
            .sum();
        linear + 0.5 * self.rho * diff.norm_squared()
    }
}

/// Scalar MMSE equalizers and the resulting MSEs.
#[derive(Debug, Clone, PartialEq)]
pub struct Equalizers {
    pub common: Vec<Complex64>,
    pub private: Vec<Complex64>,
    pub common_mse: Vec<f64>,
    pub private_mse: Vec<f64>,
}

/// Equalizers, weights and the last v-block objective.
#[derive(Debug, Clone, PartialEq)]
pub struct WmmseState {
    pub equalizers: Equalizers,
    pub common_weights: Vec<f64>,
    pub private_weights: Vec<f64>,
    pub last_objective: f64,
}

/// MMSE equalizer for every stream: `g = s* / T`, with `s` the desired gain
/// and `T` the total received power plus `σ_η²/δ²`.
pub fn update_equalizers(p: &PrecoderMatrix, link: &Link) -> Equalizers {
    let k_users = link.channels.users();
    let mut eq = Equalizers {
        common: Vec::with_capacity(k_users),
        private: Vec::with_capacity(k_users),
        common_mse: Vec::with_capacity(k_users),
        private_mse: Vec::with_capacity(k_users),
    };
    for k in 0..k_users {
        let gains = stream_gains(p, &link.channels.row(k));
        let noise = link.normalized_noise(k);
        let private_total: f64 = gains[1..].iter().map(|g| g.norm_sqr()).sum::<f64>() + noise;
        let common_total = private_total + gains[0].norm_sqr();
        eq.common.push(gains[0].conj() / common_total);
        eq.common_mse
            .push(noise_floor_mse(1.0 - gains[0].norm_sqr() / common_total));
        let own = gains[k + 1];
        eq.private.push(own.conj() / private_total);
        eq.private_mse
            .push(noise_floor_mse(1.0 - own.norm_sqr() / private_total));
    }
    eq
}

fn noise_floor_mse(mse: f64) -> f64 {
    mse.clamp(f64::MIN_POSITIVE, 1.0)
}

/// MSE of one stream for an arbitrary equalizer:
/// `|g|²T − 2Re(g·s) + 1`.
pub fn stream_mse(g: Complex64, desired_gain: Complex64, total_power: f64) -> f64 {
    g.norm_sqr() * total_power - 2.0 * (g * desired_gain).re + 1.0
}

/// Rate-WMMSE weights `w = 1/ε`.
pub fn update_weights(mse: &[f64]) -> Result<Vec<f64>> {
    mse.iter()
        .map(|&e| {
            if e > 0.0 {
                Ok(1.0 / e)
            } else {
                Err(Error::InvalidArgument(format!(
                    "mse must be positive, got {e}"
                )))
            }
        })
        .collect()
}

impl WmmseState {
    pub fn at(p: &PrecoderMatrix, link: &Link) -> Result<Self> {
        let equalizers = update_equalizers(p, link);
        Ok(Self {
            common_weights: update_weights(&equalizers.common_mse)?,
            private_weights: update_weights(&equalizers.private_mse)?,
            equalizers,
            last_objective: f64::NAN,
        })
    }
}

/// Conjugated channel `h_k` as a column vector.
fn channel_column(link: &Link, k: usize) -> CVector {
    link.channels.row(k).map(|v| v.conj())
}

/// Builds `(w/ln2)·ε(P)` for one stream in the real layout.
///
/// `columns` lists the precoder columns that contribute received power
/// (desired stream included) and `desired` the column of the stream itself.
#[allow(clippy::too_many_arguments)]
fn add_weighted_mse(
    quad: &mut Quadratic,
    layout: &Layout,
    h: &CVector,
    g: Complex64,
    w: f64,
    noise: f64,
    columns: &[usize],
    desired: usize,
) {
    let scale = w / LN_2;
    let outer = h * h.adjoint();
    for &j in columns {
        if let Some(off) = layout.offset(j) {
            add_hermitian_block(&mut quad.q, off, &outer, scale * g.norm_sqr());
        }
    }
    // −2 Re(g hᴴ p) = Re(bᴴp) with b = −2 g* h
    if let Some(off) = layout.offset(desired) {
        let b = h * (g.conj() * -2.0);
        add_linear_block(&mut quad.l, off, &b, scale);
    }
    quad.c += scale * (g.norm_sqr() * noise + 1.0);
}

/// Position of each precoder column in the real variable.
struct Layout {
    antennas: usize,
    include_common: bool,
    columns: usize,
}

impl Layout {
    fn offset(&self, j: usize) -> Option<usize> {
        let idx = if self.include_common {
            j
        } else if j == 0 {
            return None;
        } else {
            j - 1
        };
        Some(2 * self.antennas * idx)
    }

    fn len(&self) -> usize {
        2 * self.antennas * self.columns
    }

    fn pack(&self, p: &PrecoderMatrix) -> RVector {
        let mut x = RVector::zeros(self.len());
        let n = self.antennas;
        for j in 0..p.p.ncols() {
            if let Some(off) = self.offset(j) {
                for i in 0..n {
                    x[off + i] = p.p[(i, j)].re;
                    x[off + n + i] = p.p[(i, j)].im;
                }
            }
        }
        x
    }

    fn unpack(&self, x: &RVector, users: usize) -> PrecoderMatrix {
        let n = self.antennas;
        let mut p = PrecoderMatrix::zeros(n, users);
        for j in 0..=users {
            if let Some(off) = self.offset(j) {
                for i in 0..n {
                    p.p[(i, j)] = Complex64::new(x[off + i], x[off + n + i]);
                }
            }
        }
        p
    }
}

/// One convexified precoder step with equalizers and weights fixed.
/// Returns the new precoders and a feasible common-rate split.
pub fn solve_precoder_subproblem(
    state: &WmmseState,
    penalty: &Penalty,
    link: &Link,
    mode: Mode,
    current: &PrecoderMatrix,
) -> Result<(PrecoderMatrix, Vec<f64>)> {
    let k_users = link.channels.users();
    let n = link.channels.antennas();
    let include_common = mode == Mode::Rsma;
    let layout = Layout {
        antennas: n,
        include_common,
        columns: if include_common { k_users + 1 } else { k_users },
    };
    let px = layout.len();
    let private_cols: Vec<usize> = (1..=k_users).collect();
    let all_cols: Vec<usize> = (0..=k_users).collect();

    // f_0: weighted private MSEs + consensus penalty
    let mut f0 = Quadratic::zeros(px);
    for k in 0..k_users {
        let h = channel_column(link, k);
        add_weighted_mse(
            &mut f0,
            &layout,
            &h,
            state.equalizers.private[k],
            state.private_weights[k],
            link.normalized_noise(k),
            &private_cols,
            k + 1,
        );
    }
    for j in 0..=k_users {
        if let Some(off) = layout.offset(j) {
            let ident = CMatrix::identity(n, n);
            add_hermitian_block(&mut f0.q, off, &ident, 0.5 * penalty.rho);
            let b: CVector = penalty.dual.column(j).into_owned()
                - penalty.target.column(j) * Complex64::new(penalty.rho, 0.0);
            add_linear_block(&mut f0.l, off, &b, 1.0);
        }
    }

    let x0 = layout.pack(current);
    if !include_common {
        let sol = qcqp::solve(&f0, &[], x0, &BarrierOptions::default())?;
        return Ok((layout.unpack(&sol.z, k_users), vec![0.0; k_users]));
    }

    // common-rate bounds φ_k(x) = (1 + ln w)/ln2 − (w/ln2) ε_c,k(x)
    let mut weighted_common = Vec::with_capacity(k_users);
    let mut bounds = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let h = channel_column(link, k);
        let w = state.common_weights[k];
        let mut e = Quadratic::zeros(px);
        add_weighted_mse(
            &mut e,
            &layout,
            &h,
            state.equalizers.common[k],
            w,
            link.normalized_noise(k),
            &all_cols,
            0,
        );
        e.c -= (1.0 + w.ln()) / LN_2;
        // e(x) = −φ_k(x)
        bounds.push(-e.value(&x0));
        weighted_common.push(e);
    }

    let all_alive = bounds.iter().all(|&b| b > DEAD_COMMON_RATE);
    let (x, s) = if all_alive {
        // variables [x, s]; minimize f0 − s s.t. s − φ_k ≤ 0, −s ≤ 0
        let dim = px + 1;
        let lift = |q: &Quadratic| {
            let mut out = Quadratic::zeros(dim);
            out.q.view_mut((0, 0), (px, px)).copy_from(&q.q);
            out.l.rows_mut(0, px).copy_from(&q.l);
            out.c = q.c;
            out
        };
        let mut obj = lift(&f0);
        obj.l[px] = -1.0;
        let mut cons: Vec<Quadratic> = weighted_common
            .iter()
            .map(|e| {
                let mut c = lift(e);
                c.l[px] = 1.0;
                c
            })
            .collect();
        let mut nonneg = Quadratic::zeros(dim);
        nonneg.l[px] = -1.0;
        cons.push(nonneg);

        let s0 = 0.5 * bounds.iter().copied().fold(f64::INFINITY, f64::min);
        let mut z0 = RVector::zeros(dim);
        z0.rows_mut(0, px).copy_from(&x0);
        z0[px] = s0;
        let sol = qcqp::solve(&obj, &cons, z0, &BarrierOptions::default())?;
        if sol.kkt_residual > KKT_TOL {
            return Err(Error::PrecoderStep {
                residual: sol.kkt_residual,
                last: Box::new(layout.unpack(&sol.z.rows(0, px).into_owned(), k_users)),
            });
        }
        (sol.z.rows(0, px).into_owned(), sol.z[px].max(0.0))
    } else {
        // common rate pinned at zero; keep φ_j ≥ 0 for users that still
        // decode the common stream
        let cons: Vec<Quadratic> = weighted_common
            .into_iter()
            .zip(&bounds)
            .filter(|(_, &b)| b > DEAD_COMMON_RATE)
            .map(|(e, _)| e)
            .collect();
        let sol = qcqp::solve(&f0, &cons, x0, &BarrierOptions::default())?;
        (sol.z, 0.0)
    };

    let p = layout.unpack(&x, k_users);
    Ok((p, vec![s / k_users as f64; k_users]))
}

/// `−(Σ C_k + Σ R_k) + penalty` for a point of the v-block.
pub fn v_objective(p: &PrecoderMatrix, c: &[f64], penalty: &Penalty, link: &Link) -> Result<f64> {
    let rates = stream_rates(p, link.channels, link.model, link.noise_power)?;
    Ok(-(c.iter().sum::<f64>() + rates.private.iter().sum::<f64>()) + penalty.value(&p.p))
}

/// Best common-rate split for fixed precoders: the largest total common
/// rate every user can decode, shared equally.
pub fn best_common_split(p: &PrecoderMatrix, link: &Link, mode: Mode) -> Result<Vec<f64>> {
    let k_users = link.channels.users();
    if mode == Mode::Sdma {
        return Ok(vec![0.0; k_users]);
    }
    let rates = stream_rates(p, link.channels, link.model, link.noise_power)?;
    let total = rates.common_capacity().max(0.0);
    // shave the rounding of the equal split so Σ C_k never exceeds the bound
    let share = total / k_users as f64 * (1.0 - 1e-15);
    Ok(vec![share; k_users])
}

/// Output of [`solve_v_update`].
#[derive(Debug, Clone)]
pub struct VUpdate {
    pub v: Stacked,
    /// v-block objective before the first and after every AO iteration.
    pub objectives: Vec<f64>,
    pub iterations: usize,
    pub state: WmmseState,
}

/// Settings of the alternating optimization.
#[derive(Debug, Clone, Copy)]
pub struct WmmseOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub mode: Mode,
}

/// Minimizes the v-block of the augmented Lagrangian by alternating
/// equalizer, weight and precoder updates until the objective decrease drops
/// below `opts.tol`.
pub fn solve_v_update(
    u: &Stacked,
    penalty: &Penalty,
    link: &Link,
    init: &PrecoderMatrix,
    opts: &WmmseOptions,
) -> Result<VUpdate> {
    let mut p = init.clone();
    if opts.mode == Mode::Sdma {
        p.p.column_mut(0).fill(Complex64::new(0.0, 0.0));
    }
    let mut c = best_common_split(&p, link, opts.mode)?;
    let mut obj = v_objective(&p, &c, penalty, link)?;
    let mut objectives = vec![obj];
    let mut iterations = 0;

    // one equalizer → weight → precoder cycle from `x`
    let cycle = |x: &PrecoderMatrix| -> Result<(PrecoderMatrix, Vec<f64>, f64)> {
        let state = WmmseState::at(x, link)?;
        let (next, _) = solve_precoder_subproblem(&state, penalty, link, opts.mode, x)?;
        let c = best_common_split(&next, link, opts.mode)?;
        let obj = v_objective(&next, &c, penalty, link)?;
        Ok((next, c, obj))
    };

    for _ in 0..opts.max_iter {
        iterations += 1;
        let (p1, c1, o1) = cycle(&p)?;
        let decrease = obj - o1;
        if decrease < 0.0 {
            objectives.push(obj);
            break;
        }
        let mut best = (p1, c1, o1);
        if decrease >= opts.tol {
            // squared extrapolation of the fixed-point map, stabilized by
            // one more cycle and kept only if it lowers the objective
            let (p2, c2, o2) = cycle(&best.0)?;
            if o2 <= best.2 {
                let r = &best.0.p - &p.p;
                let curv = &p2.p - &best.0.p * Complex64::new(2.0, 0.0) + &p.p;
                let candidate = if curv.norm() > 0.0 {
                    let a = -(r.norm() / curv.norm()).max(1.0);
                    let ext = PrecoderMatrix {
                        p: &p.p - &r * Complex64::new(2.0 * a, 0.0)
                            + &curv * Complex64::new(a * a, 0.0),
                    };
                    if ext.p.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                        cycle(&ext).ok()
                    } else {
                        None
                    }
                } else {
                    None
                };
                best = match candidate {
                    Some(cand) if cand.2 < o2 => cand,
                    _ => (p2, c2, o2),
                };
            }
        }
        let decrease = obj - best.2;
        (p, c, obj) = best;
        objectives.push(obj);
        if decrease < opts.tol {
            break;
        }
    }
    let mut state = WmmseState::at(&p, link)?;
    state.last_objective = obj;
    Ok(VUpdate {
        v: Stacked {
            alpha: u.alpha,
            c,
            p,
        },
        objectives,
        iterations,
        state,
    })
}

/// Matched-filter precoders scaled to the per-antenna budget, with a share
/// `common_fraction` of the power on the common stream.
pub fn matched_filter_init(
    channels: &ChannelSet,
    budget: &PowerBudget,
    mode: Mode,
    common_fraction: f64,
) -> PrecoderMatrix {
    let k_users = channels.users();
    let n = channels.antennas();
    let total = budget.total;
    let common_share = if mode == Mode::Rsma {
        common_fraction
    } else {
        0.0
    };
    let mut p = PrecoderMatrix::zeros(n, k_users);
    let mut common = CVector::zeros(n);
    for k in 0..k_users {
        let h = channels.row(k).map(|v| v.conj());
        let norm = h.norm().max(f64::MIN_POSITIVE);
        let dir = h / Complex64::new(norm, 0.0);
        common += &dir;
        let scale = ((1.0 - common_share) * total / k_users as f64).sqrt();
        p.p.set_column(k + 1, &(dir * Complex64::new(scale, 0.0)));
    }
    if common_share > 0.0 {
        let norm = common.norm();
        if norm > 0.0 {
            let scale = (common_share * total).sqrt() / norm;
            p.p.set_column(0, &(common * Complex64::new(scale, 0.0)));
        }
    }
    project_rows(&mut p, budget.per_antenna);
    p
}

/// Rescales each antenna row of `P` to squared norm `per_antenna`. Rows that
/// are identically zero are filled uniformly over the active columns.
pub fn project_rows(p: &mut PrecoderMatrix, per_antenna: f64) {
    let cols = p.p.ncols();
    let first = if p.has_zero_common() { 1 } else { 0 };
    for i in 0..p.p.nrows() {
        let norm_sq: f64 = p.p.row(i).iter().map(|v| v.norm_sqr()).sum();
        if norm_sq > 0.0 {
            let scale = (per_antenna / norm_sq).sqrt();
            for j in 0..cols {
                p.p[(i, j)] *= scale;
            }
        } else {
            let v = (per_antenna / (cols - first) as f64).sqrt();
            for j in first..cols {
                p.p[(i, j)] = Complex64::new(v, 0.0);
            }
        }
    }
}
