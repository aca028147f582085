//! Beampattern block of the ADMM split, solved by semidefinite relaxation.
//!
//! The u-block minimizes
//!
//! ```text
//! λ Σ_m (α P_d(θ_m) − δ² a_mᴴ (Σ_j p_j p_jᴴ) a_m − σ_e² N_t)²
//!     + Re⟨Y, P_v − P⟩ + (ρ/2)‖P_v − P‖²
//! ```
//!
//! subject to `diag(PPᴴ) = (P_total/N_t − P(δ))·1` and `α > 0`. With the
//! homogenized matrix `W = [X x; xᴴ 1]`, `x = vec(P)`, both the quartic
//! pattern term and the linear penalty term become functions of `W` that
//! are convex (quadratic and linear respectively). Dropping `rank W = 1`
//! gives the relaxation. The pattern, the power constraint and the penalty
//! only involve the diagonal blocks `X_jj` and `x`, so `W ⪰ 0` can be
//! replaced by one `(N_t+1) × (N_t+1)` constraint `[X_jj p_j; p_jᴴ 1] ⪰ 0`
//! per stream without changing the optimal value.

use nalgebra::LU;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::admm::split::{SplitOperators, Stacked};
use crate::comms::PrecoderMatrix;
use crate::config::Mode;
use crate::error::{Error, Result};
use crate::linalg::{dotc, hermitian_eigen, CMatrix, CVector, RMatrix, RVector, ZERO};
use crate::quantization::{complex_gaussian, PowerBudget, QuantizationModel};
use crate::radar::{achieved_pattern, alpha_from_pattern, error_from_pattern, ALPHA_FLOOR};
use crate::scenario::AngleGrid;
use crate::wmmse::project_rows;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Half-vectorization of a Hermitian matrix, scaled so that the Euclidean
/// inner product equals `Re tr(AB)`.
pub fn svec(a: &CMatrix) -> RVector {
    let s = a.nrows();
    let mut out = RVector::zeros(s * s);
    let mut idx = 0;
    for i in 0..s {
        out[idx] = a[(i, i)].re;
        idx += 1;
    }
    for i in 0..s {
        for j in (i + 1)..s {
            out[idx] = SQRT2 * a[(i, j)].re;
            out[idx + 1] = SQRT2 * a[(i, j)].im;
            idx += 2;
        }
    }
    out
}

/// Inverse of [`svec`].
pub fn smat(v: &[f64], s: usize) -> CMatrix {
    let mut a = CMatrix::zeros(s, s);
    let mut idx = 0;
    for i in 0..s {
        a[(i, i)] = Complex64::new(v[idx], 0.0);
        idx += 1;
    }
    for i in 0..s {
        for j in (i + 1)..s {
            let z = Complex64::new(v[idx], v[idx + 1]) / SQRT2;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
            idx += 2;
        }
    }
    a
}

/// The relaxed u-block problem.
#[derive(Debug, Clone)]
pub struct LiftedProblem {
    pub antennas: usize,
    pub users: usize,
    /// Precoder columns optimized here (all of them in RSMA, the private
    /// ones in SDMA).
    pub active: Vec<usize>,
    pub per_antenna: f64,
    pub lambda: f64,
    pub delta: f64,
    pub noise_var: f64,
    pub rho: f64,
    pub desired: Vec<f64>,
    pub steering: Vec<CVector>,
    /// `ρP_v + Y`, the coefficient of the term `−Re⟨·, P⟩`.
    pub linear: CMatrix,
    /// Penalty terms that do not depend on `u`.
    pub constant: f64,
    /// Common-rate shares carried through from `v`.
    pub common_rates: Vec<f64>,
}

/// A point of the relaxation: one homogenized block per active stream and
/// the scaling α.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPoint {
    pub blocks: Vec<CMatrix>,
    pub alpha: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn build_lifted_problem(
    v: &Stacked,
    y: &RVector,
    rho: f64,
    ops: &SplitOperators,
    model: &QuantizationModel,
    grid: &AngleGrid,
    budget: &PowerBudget,
    lambda: f64,
    mode: Mode,
) -> Result<LiftedProblem> {
    if !(budget.total > 0.0 && budget.per_antenna > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "non-positive precoder budget {:.6} W",
            budget.total
        )));
    }
    let dual = ops.dual_as_matrix(y);
    let pv = &v.p.p;
    let linear = pv * Complex64::new(rho, 0.0) + &dual;
    let constant = dual
        .iter()
        .zip(pv.iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum::<f64>()
        + 0.5 * rho * pv.norm_squared();
    let users = v.users();
    let active = match mode {
        Mode::Rsma => (0..=users).collect(),
        Mode::Sdma => (1..=users).collect(),
    };
    Ok(LiftedProblem {
        antennas: ops.antennas,
        users,
        active,
        per_antenna: budget.per_antenna,
        lambda,
        delta: model.delta,
        noise_var: model.noise_var,
        rho,
        desired: grid.desired.clone(),
        steering: grid.steering.clone(),
        linear,
        constant,
        common_rates: v.c.clone(),
    })
}

impl LiftedProblem {
    fn block_size(&self) -> usize {
        self.antennas + 1
    }

    fn pattern_offset(&self) -> f64 {
        self.noise_var * self.antennas as f64
    }

    /// Real dimension of the stacked complex variable `[α, c, vec(P)]`.
    pub fn stacked_real_len(&self) -> usize {
        2 * (self.antennas * (self.users + 1) + self.users + 1)
    }

    /// Objective of the relaxation at a lifted point.
    pub fn objective(&self, point: &LiftedPoint) -> f64 {
        let n = self.antennas;
        let mut cov = CMatrix::zeros(n, n);
        let mut linear = 0.0;
        let mut trace = 0.0;
        for (b, &col) in point.blocks.iter().zip(&self.active) {
            let x = b.view((0, 0), (n, n));
            cov += x;
            trace += (0..n).map(|i| b[(i, i)].re).sum::<f64>();
            let p = b.column(n).rows(0, n).into_owned();
            let z = self.linear.column(col).into_owned();
            linear += dotc(&z, &p).re;
        }
        let d2 = self.delta * self.delta;
        let offset = self.pattern_offset();
        let pattern: Vec<f64> = self
            .steering
            .iter()
            .map(|a| d2 * dotc(a, &(&cov * a)).re + offset)
            .collect();
        self.lambda * error_from_pattern(point.alpha, &self.desired, &pattern)
            + 0.5 * self.rho * trace
            - linear
            + self.constant
    }

    /// Exact (non-relaxed) u-block objective `f_r(u)` plus the consensus
    /// terms.
    pub fn u_objective(&self, p: &PrecoderMatrix, alpha: f64) -> f64 {
        let pattern = achieved_pattern(p, self.delta, self.noise_var, &self.grid_view());
        let linear: f64 = self
            .linear
            .iter()
            .zip(p.p.iter())
            .map(|(z, x)| (z.conj() * x).re)
            .sum();
        self.lambda * error_from_pattern(alpha, &self.desired, &pattern)
            + 0.5 * self.rho * p.total_power()
            - linear
            + self.constant
    }

    fn grid_view(&self) -> AngleGrid {
        AngleGrid {
            thetas: Vec::new(),
            steering: self.steering.clone(),
            desired: self.desired.clone(),
        }
    }

    /// Least-squares α for given precoders.
    pub fn refresh_alpha(&self, p: &PrecoderMatrix) -> Result<f64> {
        let pattern = achieved_pattern(p, self.delta, self.noise_var, &self.grid_view());
        alpha_from_pattern(&self.desired, &pattern)
    }

    /// `W_j = [p_j p_jᴴ, p_j; p_jᴴ, 1]` for every active stream.
    pub fn rank_one(&self, p: &PrecoderMatrix, alpha: f64) -> LiftedPoint {
        let s = self.block_size();
        let blocks = self
            .active
            .iter()
            .map(|&j| {
                let mut h = CVector::zeros(s);
                h.rows_mut(0, self.antennas).copy_from(&p.p.column(j));
                h[self.antennas] = Complex64::new(1.0, 0.0);
                &h * h.adjoint()
            })
            .collect();
        LiftedPoint { blocks, alpha }
    }

    /// Full homogenized matrix `[X x; xᴴ 1]` of size `N_t·|active| + 1`,
    /// with the unconstrained off-diagonal blocks completed as `p_i p_jᴴ`.
    pub fn homogenized(&self, point: &LiftedPoint) -> CMatrix {
        let n = self.antennas;
        let cols = point.blocks.len();
        let dim = n * cols + 1;
        let mut w = CMatrix::zeros(dim, dim);
        let ps: Vec<CVector> = point
            .blocks
            .iter()
            .map(|b| b.column(n).rows(0, n).into_owned())
            .collect();
        for (i, bi) in point.blocks.iter().enumerate() {
            for (j, pj) in ps.iter().enumerate() {
                let block = if i == j {
                    bi.view((0, 0), (n, n)).into_owned()
                } else {
                    &ps[i] * pj.adjoint()
                };
                w.view_mut((i * n, j * n), (n, n)).copy_from(&block);
            }
            w.view_mut((i * n, dim - 1), (n, 1)).copy_from(&ps[i]);
            w.view_mut((dim - 1, i * n), (1, n))
                .copy_from(&ps[i].adjoint());
        }
        w[(dim - 1, dim - 1)] = Complex64::new(1.0, 0.0);
        w
    }

    /// `diag(Σ_j X_jj)`
    pub fn lifted_antenna_power(&self, point: &LiftedPoint) -> Vec<f64> {
        (0..self.antennas)
            .map(|i| point.blocks.iter().map(|b| b[(i, i)].re).sum())
            .collect()
    }
}

/// Warm-start data of the conic solver.
#[derive(Debug, Clone)]
pub struct SdpWarmStart {
    omega: RVector,
    zeta: RVector,
    mu: RVector,
    sigma: f64,
}

#[derive(Debug, Clone)]
pub struct LiftedSolution {
    pub point: LiftedPoint,
    pub objective: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub warm: SdpWarmStart,
}

/// Quadratic model `½ωᵀHω + gᵀω + c` of the relaxation in svec
/// coordinates, with the affine constraints `Eω = b`.
struct ConicForm {
    h: RMatrix,
    g: RVector,
    e: RMatrix,
    b: RVector,
    block_len: usize,
    blocks: usize,
}

impl ConicForm {
    fn new(pb: &LiftedProblem) -> Self {
        let s = pb.block_size();
        let n = pb.antennas;
        let block_len = s * s;
        let blocks = pb.active.len();
        let dim = blocks * block_len + 1;
        let alpha_idx = dim - 1;
        let d2 = pb.delta * pb.delta;
        let c0 = pb.pattern_offset();

        let mut h = RMatrix::zeros(dim, dim);
        let mut g = RVector::zeros(dim);
        let mut pad = CMatrix::zeros(s, s);
        for (a, &d) in pb.steering.iter().zip(&pb.desired) {
            pad.view_mut((0, 0), (n, n)).copy_from(&(a * a.adjoint()));
            let sv = svec(&pad);
            let mut coeff = RVector::zeros(dim);
            for bi in 0..blocks {
                coeff
                    .rows_mut(bi * block_len, block_len)
                    .copy_from(&(&sv * -d2));
            }
            coeff[alpha_idx] = d;
            h.ger(2.0 * pb.lambda, &coeff, &coeff, 1.0);
            g.axpy(-2.0 * pb.lambda * c0, &coeff, 1.0);
        }

        let mut top = CMatrix::zeros(s, s);
        for i in 0..n {
            top[(i, i)] = Complex64::new(1.0, 0.0);
        }
        let trace = svec(&top);
        for (bi, &col) in pb.active.iter().enumerate() {
            let z = pb.linear.column(col);
            let mut lin = CMatrix::zeros(s, s);
            for i in 0..n {
                lin[(i, n)] = z[i] * 0.5;
                lin[(n, i)] = z[i].conj() * 0.5;
            }
            let block = &trace * (0.5 * pb.rho) - svec(&lin);
            let mut view = g.rows_mut(bi * block_len, block_len);
            view += block;
        }

        let rows = blocks + n;
        let mut e = RMatrix::zeros(rows, dim);
        let mut b = RVector::zeros(rows);
        for bi in 0..blocks {
            // corner (s−1, s−1) sits at diagonal position s − 1
            e[(bi, bi * block_len + n)] = 1.0;
            b[bi] = 1.0;
        }
        for i in 0..n {
            for bi in 0..blocks {
                e[(blocks + i, bi * block_len + i)] = 1.0;
            }
            b[blocks + i] = pb.per_antenna;
        }
        Self {
            h,
            g,
            e,
            b,
            block_len,
            blocks,
        }
    }

    fn dim(&self) -> usize {
        self.h.nrows()
    }

    fn kkt(&self, sigma: f64) -> LU<f64, nalgebra::Dyn, nalgebra::Dyn> {
        let n = self.dim();
        let m = self.e.nrows();
        let mut k = RMatrix::zeros(n + m, n + m);
        k.view_mut((0, 0), (n, n)).copy_from(&self.h);
        for i in 0..n {
            k[(i, i)] += sigma;
        }
        k.view_mut((n, 0), (m, n)).copy_from(&self.e);
        k.view_mut((0, n), (n, m)).copy_from(&self.e.transpose());
        k.lu()
    }

    /// Projection onto `PSD^blocks × [ALPHA_FLOOR, ∞)`.
    fn project(&self, x: &RVector, s: usize) -> RVector {
        let mut out = x.clone();
        for bi in 0..self.blocks {
            let range = bi * self.block_len..(bi + 1) * self.block_len;
            let m = smat(&x.as_slice()[range.clone()], s);
            let (vals, vecs) = hermitian_eigen(&m);
            let mut proj = CMatrix::zeros(s, s);
            for (k, &lam) in vals.iter().enumerate() {
                if lam > 0.0 {
                    let v = vecs.column(k);
                    proj += (v * v.adjoint()) * Complex64::new(lam, 0.0);
                }
            }
            out.rows_mut(range.start, self.block_len)
                .copy_from(&svec(&proj));
        }
        let a = out.len() - 1;
        out[a] = out[a].max(ALPHA_FLOOR);
        out
    }

    fn point(&self, omega: &RVector, s: usize) -> LiftedPoint {
        LiftedPoint {
            blocks: (0..self.blocks)
                .map(|bi| {
                    smat(
                        &omega.as_slice()[bi * self.block_len..(bi + 1) * self.block_len],
                        s,
                    )
                })
                .collect(),
            alpha: omega[omega.len() - 1],
        }
    }
}

/// Solves the relaxation by ADMM on the conic form: an equality-constrained
/// quadratic step, a projection onto the PSD blocks, and a scaled dual
/// update, with residual balancing of the step parameter.
pub fn solve_lifted(
    problem: &LiftedProblem,
    tol: f64,
    max_iter: usize,
    warm: Option<&SdpWarmStart>,
    alpha0: f64,
) -> Result<LiftedSolution> {
    let form = ConicForm::new(problem);
    let s = problem.block_size();
    let dim = form.dim();

    let (mut omega, mut zeta, mut mu, mut sigma) = match warm {
        Some(w) if w.omega.len() == dim => (w.omega.clone(), w.zeta.clone(), w.mu.clone(), w.sigma),
        _ => {
            let mut start = RVector::zeros(dim);
            let share = problem.per_antenna / form.blocks as f64;
            for bi in 0..form.blocks {
                let mut blk = CMatrix::identity(s, s) * Complex64::new(share, 0.0);
                blk[(s - 1, s - 1)] = Complex64::new(1.0, 0.0);
                start
                    .rows_mut(bi * form.block_len, form.block_len)
                    .copy_from(&svec(&blk));
            }
            start[dim - 1] = alpha0.max(ALPHA_FLOOR);
            (start.clone(), start, RVector::zeros(dim), 1.0)
        }
    };

    let mut lu = form.kkt(sigma);
    let m = form.e.nrows();
    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let mut rhs = RVector::zeros(dim + m);
        rhs.rows_mut(0, dim)
            .copy_from(&((&zeta - &mu) * sigma - &form.g));
        rhs.rows_mut(dim, m).copy_from(&form.b);
        let sol = lu.solve(&rhs).ok_or(Error::NotConverged {
            solver: "sdr kkt",
            iterations: it,
            residual: f64::NAN,
        })?;
        omega = sol.rows(0, dim).into_owned();
        let zeta_prev = zeta.clone();
        zeta = form.project(&(&omega + &mu), s);
        mu += &omega - &zeta;

        primal = (&omega - &zeta).norm();
        dual = sigma * (&zeta - &zeta_prev).norm();
        let scale_p = 1.0 + omega.norm().max(zeta.norm());
        let scale_d = 1.0 + sigma * mu.norm();
        if primal <= tol * scale_p && dual <= tol * scale_d {
            break;
        }
        if it % 20 == 19 {
            let ratio = (primal / scale_p) / (dual / scale_d).max(f64::MIN_POSITIVE);
            let factor = if ratio > 10.0 {
                ratio.sqrt().min(50.0)
            } else if ratio < 0.1 {
                1.0 / (1.0 / ratio).sqrt().min(50.0)
            } else {
                1.0
            };
            if factor != 1.0 {
                sigma *= factor;
                mu /= factor;
                lu = form.kkt(sigma);
            }
        }
    }
    let scale_p = 1.0 + omega.norm().max(zeta.norm());
    let scale_d = 1.0 + sigma * mu.norm();
    if primal > 1e3 * tol * scale_p || dual > 1e3 * tol * scale_d {
        return Err(Error::NotConverged {
            solver: "sdr",
            iterations,
            residual: primal.max(dual),
        });
    }
    if primal > tol * scale_p || dual > tol * scale_d {
        log::debug!(
            "sdr stopped at {iterations} iterations with residuals {primal:.2e}/{dual:.2e}"
        );
    }
    let point = form.point(&omega, s);
    Ok(LiftedSolution {
        objective: problem.objective(&point),
        point,
        iterations,
        primal_residual: primal,
        dual_residual: dual,
        warm: SdpWarmStart {
            omega,
            zeta,
            mu,
            sigma,
        },
    })
}

/// How the recovered precoders were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoverySource {
    /// Linear block `x` of the homogenized matrix.
    LinearBlock,
    /// Dominant eigenvector of each diagonal block.
    Eigenvector,
    /// Gaussian randomization sample.
    Randomization,
    /// The incoming iterate was better than every candidate.
    Incumbent,
}

#[derive(Debug, Clone)]
pub struct Recovery {
    pub p: PrecoderMatrix,
    pub alpha: f64,
    pub objective: f64,
    /// `λ_2/λ_1` of the homogenized matrix.
    pub rank_gap: f64,
    pub source: RecoverySource,
}

fn finish_candidate(
    problem: &LiftedProblem,
    mut p: PrecoderMatrix,
) -> Result<(PrecoderMatrix, f64, f64)> {
    project_rows(&mut p, problem.per_antenna);
    let alpha = problem.refresh_alpha(&p)?;
    let obj = problem.u_objective(&p, alpha);
    Ok((p, alpha, obj))
}

/// Extracts precoders from a relaxed solution, rescales every antenna row to
/// meet the per-antenna budget, refreshes α, and keeps the best candidate.
pub fn recover_rank_one(
    point: &LiftedPoint,
    problem: &LiftedProblem,
    randomization: usize,
) -> Result<Recovery> {
    let n = problem.antennas;
    let (vals, _) = hermitian_eigen(&problem.homogenized(point));
    let rank_gap = if vals[0] > 0.0 {
        (vals.get(1).copied().unwrap_or(0.0).max(0.0)) / vals[0]
    } else {
        0.0
    };

    let mut candidates: Vec<(PrecoderMatrix, RecoverySource)> = Vec::new();

    let mut linear = PrecoderMatrix::zeros(n, problem.users);
    for (b, &col) in point.blocks.iter().zip(&problem.active) {
        linear.p.set_column(col, &b.column(n).rows(0, n));
    }
    if linear.total_power() > 0.0 {
        candidates.push((linear, RecoverySource::LinearBlock));
    }

    let mut eigen = PrecoderMatrix::zeros(n, problem.users);
    for (b, &col) in point.blocks.iter().zip(&problem.active) {
        let x = b.view((0, 0), (n, n)).into_owned();
        let (ev, vecs) = hermitian_eigen(&x);
        let mut p = vecs.column(0) * Complex64::new(ev[0].max(0.0).sqrt(), 0.0);
        let z = problem.linear.column(col).into_owned();
        let c = dotc(&z, &p);
        if c.norm() > 0.0 {
            p *= c.conj() / c.norm();
        }
        eigen.p.set_column(col, &p);
    }
    candidates.push((eigen, RecoverySource::Eigenvector));

    if randomization > 0 {
        let w = problem.homogenized(point);
        let (wv, wvecs) = hermitian_eigen(&w);
        let dim = w.nrows();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5d2_u64);
        for _ in 0..randomization {
            let g = CVector::from_fn(dim, |_, _| complex_gaussian(&mut rng, 1.0));
            let mut xi = CVector::zeros(dim);
            for (k, &lam) in wv.iter().enumerate() {
                if lam > 0.0 {
                    xi += wvecs.column(k) * (g[k] * lam.sqrt());
                }
            }
            let last = xi[dim - 1];
            let rot = if last.norm() > 0.0 {
                last.conj() / last.norm()
            } else {
                Complex64::new(1.0, 0.0)
            };
            let mut p = PrecoderMatrix::zeros(n, problem.users);
            for (bi, &col) in problem.active.iter().enumerate() {
                for i in 0..n {
                    p.p[(i, col)] = xi[bi * n + i] * rot;
                }
            }
            candidates.push((p, RecoverySource::Randomization));
        }
    }

    let mut best: Option<Recovery> = None;
    for (p, source) in candidates {
        let (p, alpha, objective) = finish_candidate(problem, p)?;
        if best.as_ref().is_none_or(|b| objective < b.objective) {
            best = Some(Recovery {
                p,
                alpha,
                objective,
                rank_gap,
                source,
            });
        }
    }
    best.ok_or_else(|| Error::Consistency("no recovery candidate".into()))
}

/// Projected-gradient descent on the exact u-block objective over the
/// per-antenna power constraint, with α re-optimized at every step.
pub fn refine(
    problem: &LiftedProblem,
    p0: &PrecoderMatrix,
    iterations: usize,
) -> Result<(PrecoderMatrix, f64, f64)> {
    let mut p = p0.clone();
    let mut alpha = problem.refresh_alpha(&p)?;
    let mut obj = problem.u_objective(&p, alpha);
    let d2 = problem.delta * problem.delta;
    let offset = problem.pattern_offset();
    let mut step = 1e-2;
    let inactive: Vec<usize> = (0..=problem.users)
        .filter(|j| !problem.active.contains(j))
        .collect();

    for _ in 0..iterations {
        // gradient of the pattern term: −4λδ² Σ_m e_m a_m a_mᴴ p_j
        let mut grad = &p.p * Complex64::new(problem.rho, 0.0) - &problem.linear;
        for (a, &d) in problem.steering.iter().zip(&problem.desired) {
            let proj = a.adjoint() * &p.p;
            let beam: f64 = proj.iter().map(|v| v.norm_sqr()).sum();
            let e = alpha * d - d2 * beam - offset;
            grad += (a * proj) * Complex64::new(-4.0 * problem.lambda * d2 * e, 0.0);
        }
        for &j in &inactive {
            grad.column_mut(j).fill(ZERO);
        }

        let mut improved = false;
        while step > 1e-14 {
            let mut cand = PrecoderMatrix {
                p: &p.p - &grad * Complex64::new(step, 0.0),
            };
            project_rows(&mut cand, problem.per_antenna);
            let a = problem.refresh_alpha(&cand)?;
            let o = problem.u_objective(&cand, a);
            if o < obj {
                let change = (&cand.p - &p.p).norm();
                p = cand;
                alpha = a;
                let gain = obj - o;
                obj = o;
                step *= 1.5;
                improved = gain > 1e-15 * obj.abs().max(1.0) && change > 1e-13;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((p, alpha, obj))
}

/// Settings of the u-block solver.
#[derive(Debug, Clone, Copy)]
pub struct UUpdateOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub randomization: usize,
    pub refine_iter: usize,
    pub mode: Mode,
}

#[derive(Debug, Clone)]
pub struct UUpdate {
    pub u: Stacked,
    /// u-block objective of the returned point.
    pub objective: f64,
    /// Optimal value of the relaxation (a lower bound when solved exactly).
    pub relaxation_objective: f64,
    pub rank_gap: f64,
    pub source: RecoverySource,
    pub sdp_iterations: usize,
    pub warm: SdpWarmStart,
}

/// Full u-update: α refresh, lifting, relaxed solve, rank-one recovery,
/// local refinement. Never returns a point worse than `incumbent` on the
/// current subproblem.
#[allow(clippy::too_many_arguments)]
pub fn solve_u_update(
    v: &Stacked,
    y: &RVector,
    rho: f64,
    ops: &SplitOperators,
    model: &QuantizationModel,
    grid: &AngleGrid,
    budget: &PowerBudget,
    lambda: f64,
    opts: &UUpdateOptions,
    incumbent: Option<&Stacked>,
    warm: Option<&SdpWarmStart>,
) -> Result<UUpdate> {
    let problem = build_lifted_problem(v, y, rho, ops, model, grid, budget, lambda, opts.mode)?;
    let mut projected = v.p.clone();
    if opts.mode == Mode::Sdma {
        projected.p.column_mut(0).fill(ZERO);
    }
    project_rows(&mut projected, budget.per_antenna);
    let alpha0 = problem.refresh_alpha(&projected)?;

    let relaxed = solve_lifted(&problem, opts.tol, opts.max_iter, warm, alpha0)?;
    let mut rec = recover_rank_one(&relaxed.point, &problem, opts.randomization)?;
    if let Some(inc) = incumbent {
        let alpha = problem.refresh_alpha(&inc.p)?;
        let obj = problem.u_objective(&inc.p, alpha);
        if obj < rec.objective {
            rec.p = inc.p.clone();
            rec.alpha = alpha;
            rec.objective = obj;
            rec.source = RecoverySource::Incumbent;
        }
    }
    let (p, alpha, objective) = if opts.refine_iter > 0 {
        refine(&problem, &rec.p, opts.refine_iter)?
    } else {
        (rec.p, rec.alpha, rec.objective)
    };
    if rec.rank_gap > 1e-6 {
        log::debug!(
            "relaxation not tight: rank gap {:.3e}, recovered {:.6e} vs bound {:.6e}",
            rec.rank_gap,
            objective,
            relaxed.objective
        );
    }
    Ok(UUpdate {
        u: Stacked {
            alpha,
            c: v.c.clone(),
            p,
        },
        objective,
        relaxation_objective: relaxed.objective,
        rank_gap: rec.rank_gap,
        source: rec.source,
        sdp_iterations: relaxed.iterations,
        warm: relaxed.warm,
    })
}
