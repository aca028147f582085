//! Dense log-barrier Newton solver for small convex quadratically
//! constrained quadratic programs
//!
//! ```text
//! minimize   f_0(z)
//! subject to f_i(z) <= 0,   i = 1..m
//! ```
//!
//! with every `f_i(z) = zᵀQ_i z + l_iᵀz + c_i` convex (`Q_i ⪰ 0`).

use crate::error::{Error, Result};
use crate::linalg::{solve_psd, RMatrix, RVector};

/// Constraints within this distance of zero at the barrier solution are
/// treated as active when polishing.
const ACTIVE_TOL: f64 = 1e-7;

/// Newton steps allowed per centering pass.
const MAX_CENTERING: usize = 60;

/// `zᵀQz + lᵀz + c`
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub q: RMatrix,
    pub l: RVector,
    pub c: f64,
}

impl Quadratic {
    pub fn zeros(n: usize) -> Self {
        Self {
            q: RMatrix::zeros(n, n),
            l: RVector::zeros(n),
            c: 0.0,
        }
    }

    pub fn value(&self, z: &RVector) -> f64 {
        z.dot(&(&self.q * z)) + self.l.dot(z) + self.c
    }

    pub fn gradient(&self, z: &RVector) -> RVector {
        (&self.q * z) * 2.0 + &self.l
    }
}

#[derive(Debug, Clone)]
pub struct BarrierOptions {
    /// Stop once the duality-gap bound `m/t` falls below this value.
    pub gap_tol: f64,
    pub newton_tol: f64,
    pub mu: f64,
    pub max_newton: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-10,
            newton_tol: 1e-11,
            mu: 12.0,
            max_newton: 600,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BarrierSolution {
    pub z: RVector,
    pub objective: f64,
    /// Final duality-gap bound `m/t`.
    pub gap: f64,
    /// Norm of the gradient of the Lagrangian at the recovered multipliers.
    pub kkt_residual: f64,
    pub newton_steps: usize,
}

/// Minimizes `objective` subject to `constraints`, starting from a strictly
/// feasible `z0`. Without constraints the problem reduces to one linear
/// solve (minimum-norm when the Hessian is singular).
pub fn solve(
    objective: &Quadratic,
    constraints: &[Quadratic],
    z0: RVector,
    opts: &BarrierOptions,
) -> Result<BarrierSolution> {
    if constraints.is_empty() {
        let h = &objective.q * 2.0;
        let z = solve_psd(&h, &(-&objective.l));
        let kkt = objective.gradient(&z).norm();
        return Ok(BarrierSolution {
            objective: objective.value(&z),
            z,
            gap: 0.0,
            kkt_residual: kkt,
            newton_steps: 1,
        });
    }

    let m = constraints.len() as f64;
    if constraints.iter().any(|c| !(c.value(&z0) < 0.0)) {
        return Err(Error::InvalidArgument(
            "barrier start point is not strictly feasible".into(),
        ));
    }
    let n = z0.len();
    let mut z = z0;
    let mut t = 1.0;
    let mut steps = 0usize;

    // Change of the barrier function along `dz` at step `s`, computed from
    // the quadratic expansion so that it stays accurate when t·f_0 is large.
    let barrier_change = |z: &RVector, dz: &RVector, t: f64, s: f64| -> Option<f64> {
        let step_change = |q: &Quadratic| s * q.gradient(z).dot(dz) + s * s * dz.dot(&(&q.q * dz));
        let mut acc = t * step_change(objective);
        for c in constraints {
            let f = c.value(z);
            let ratio = step_change(c) / (-f);
            // f_new/f = 1 − ratio must stay positive
            if !(ratio < 1.0) {
                return None;
            }
            acc -= (-ratio).ln_1p();
        }
        Some(acc)
    };

    loop {
        // centering
        for _ in 0..MAX_CENTERING {
            let mut grad = objective.gradient(&z) * t;
            let mut hess = &objective.q * (2.0 * t);
            for c in constraints {
                let f = c.value(&z);
                let g = c.gradient(&z);
                grad += &g * (-1.0 / f);
                hess += (&g * g.transpose()) * (1.0 / (f * f)) + &c.q * (-2.0 / f);
            }
            let dz = solve_psd(&hess, &(-&grad));
            let decrement = -grad.dot(&dz);
            // λ²/2 bounds the barrier suboptimality, i.e. t times the
            // suboptimality in f_0
            if decrement / 2.0 <= opts.newton_tol * t.max(1.0) || steps >= opts.max_newton {
                break;
            }
            steps += 1;
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                if let Some(change) = barrier_change(&z, &dz, t, step) {
                    let cand = &z + &dz * step;
                    if change <= -0.25 * step * decrement
                        && constraints.iter().all(|c| c.value(&cand) < 0.0)
                    {
                        z = cand;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }

        if m / t < opts.gap_tol || steps >= opts.max_newton {
            break;
        }
        t *= opts.mu;
    }

    let gap = m / t;
    if gap > opts.gap_tol * 1e3 {
        return Err(Error::NotConverged {
            solver: "barrier",
            iterations: steps,
            residual: gap,
        });
    }
    debug_assert_eq!(z.len(), n);

    let lambda: Vec<f64> = constraints
        .iter()
        .map(|c| -1.0 / (t * c.value(&z)))
        .collect();
    let mut kkt = kkt_residual(objective, constraints, &z, &lambda);
    let largest = lambda.iter().copied().fold(1.0, f64::max);
    let by_multiplier: Vec<usize> = (0..constraints.len())
        .filter(|&i| lambda[i] > 1e-8 * largest)
        .collect();
    let by_value: Vec<usize> = (0..constraints.len())
        .filter(|&i| constraints[i].value(&z) > -ACTIVE_TOL)
        .collect();
    let m_usize = constraints.len();
    let mut candidates = vec![by_value, by_multiplier];
    if m_usize <= 4 {
        candidates.extend((1..(1usize << m_usize)).map(|mask| {
            (0..m_usize)
                .filter(|i| mask & (1 << i) != 0)
                .collect::<Vec<_>>()
        }));
    }
    let start = z.clone();
    for active in candidates {
        if let Some((zp, lp)) = polish(objective, constraints, &start, &lambda, &active) {
            let res = kkt_residual(objective, constraints, &zp, &lp);
            if res < kkt {
                z = zp;
                kkt = res;
            }
        }
    }
    Ok(BarrierSolution {
        objective: objective.value(&z),
        z,
        gap,
        kkt_residual: kkt,
        newton_steps: steps,
    })
}

/// Largest of the relative stationarity residual, the constraint violation
/// and the complementarity violation.
fn kkt_residual(
    objective: &Quadratic,
    constraints: &[Quadratic],
    z: &RVector,
    lambda: &[f64],
) -> f64 {
    let g0 = objective.gradient(z);
    let mut lag = g0.clone();
    let mut viol: f64 = 0.0;
    for (c, &l) in constraints.iter().zip(lambda) {
        let f = c.value(z);
        lag += c.gradient(z) * l;
        viol = viol.max(f).max((l * f).abs());
    }
    (lag.norm() / (1.0 + g0.norm())).max(viol)
}

/// Newton iterations on the KKT equations with the given constraints held
/// active. Returns `None` if the system is singular or a multiplier turns
/// negative.
fn polish(
    objective: &Quadratic,
    constraints: &[Quadratic],
    z0: &RVector,
    lambda0: &[f64],
    active: &[usize],
) -> Option<(RVector, Vec<f64>)> {
    let n = z0.len();
    let a = active.len();
    let mut z = z0.clone();
    let mut lam: Vec<f64> = active.iter().map(|&i| lambda0[i]).collect();
    for _ in 0..8 {
        let mut grad = objective.gradient(&z);
        let mut hess = &objective.q * 2.0;
        let mut jac = RMatrix::zeros(n, a);
        let mut feas = RVector::zeros(a);
        for (k, &i) in active.iter().enumerate() {
            let c = &constraints[i];
            let g = c.gradient(&z);
            grad += &g * lam[k];
            hess += &c.q * (2.0 * lam[k]);
            jac.set_column(k, &g);
            feas[k] = c.value(&z);
        }
        let mut system = RMatrix::zeros(n + a, n + a);
        system.view_mut((0, 0), (n, n)).copy_from(&hess);
        system.view_mut((0, n), (n, a)).copy_from(&jac);
        system.view_mut((n, 0), (a, n)).copy_from(&jac.transpose());
        let mut rhs = RVector::zeros(n + a);
        rhs.rows_mut(0, n).copy_from(&(-grad));
        rhs.rows_mut(n, a).copy_from(&(-feas));
        let d = system.lu().solve(&rhs)?;
        z += d.rows(0, n);
        for (k, l) in lam.iter_mut().enumerate() {
            *l += d[n + k];
        }
        if d.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    let mut full = vec![0.0; constraints.len()];
    for (k, &i) in active.iter().enumerate() {
        full[i] = lam[k];
    }
    if full.iter().any(|&l| !(l >= 0.0)) || !z.iter().all(|v| v.is_finite()) {
        return None;
    }
    Some((z, full))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_quadratic() {
        let mut obj = Quadratic::zeros(2);
        obj.q[(0, 0)] = 1.0;
        obj.q[(1, 1)] = 2.0;
        obj.l = RVector::from_vec(vec![-2.0, 4.0]);
        let sol = solve(&obj, &[], RVector::zeros(2), &BarrierOptions::default()).unwrap();
        assert!((sol.z[0] - 1.0).abs() < 1e-12);
        assert!((sol.z[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_onto_disc() {
        // minimize |z − (2, 0)|² s.t. |z|² <= 1  →  z = (1, 0)
        let mut obj = Quadratic::zeros(2);
        obj.q = RMatrix::identity(2, 2);
        obj.l = RVector::from_vec(vec![-4.0, 0.0]);
        obj.c = 4.0;
        let mut disc = Quadratic::zeros(2);
        disc.q = RMatrix::identity(2, 2);
        disc.c = -1.0;
        let sol = solve(&obj, &[disc], RVector::zeros(2), &BarrierOptions::default()).unwrap();
        assert!((sol.z[0] - 1.0).abs() < 1e-8, "{}", sol.z);
        assert!(sol.z[1].abs() < 1e-8);
        assert!((sol.objective - 1.0).abs() < 1e-8);
        assert!(sol.kkt_residual < 1e-7);
    }

    #[test]
    fn linear_objective_with_bounds() {
        // minimize −z0 s.t. z0 <= 3, −z0 <= 0
        let mut obj = Quadratic::zeros(1);
        obj.l[0] = -1.0;
        let mut upper = Quadratic::zeros(1);
        upper.l[0] = 1.0;
        upper.c = -3.0;
        let mut lower = Quadratic::zeros(1);
        lower.l[0] = -1.0;
        let sol = solve(
            &obj,
            &[upper, lower],
            RVector::from_vec(vec![1.0]),
            &BarrierOptions::default(),
        )
        .unwrap();
        assert!((sol.z[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_infeasible_start() {
        let mut c = Quadratic::zeros(1);
        c.c = 1.0;
        assert!(solve(
            &Quadratic::zeros(1),
            &[c],
            RVector::zeros(1),
            &BarrierOptions::default()
        )
        .is_err());
    }
}
