//! Stacked variables and the selector operators of the consensus split.
//!
//! Both ADMM blocks live in the same space `[α, cᵀ, vec(P)ᵀ]ᵀ` of length
//! `N_t(K+1) + K + 1`; only the precoder part is tied by consensus.

use num_complex::Complex64;

use crate::comms::PrecoderMatrix;
use crate::linalg::{CMatrix, CVector, RMatrix, RVector};

/// One point `[α, c, vec(P)]` of the split problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Stacked {
    pub alpha: f64,
    pub c: Vec<f64>,
    pub p: PrecoderMatrix,
}

impl Stacked {
    pub fn users(&self) -> usize {
        self.c.len()
    }

    /// Complex stacking `[α, C_1, …, C_K, vec(P)]`.
    pub fn to_complex(&self) -> CVector {
        let mut out = Vec::with_capacity(1 + self.c.len() + self.p.p.len());
        out.push(Complex64::new(self.alpha, 0.0));
        out.extend(self.c.iter().map(|&c| Complex64::new(c, 0.0)));
        out.extend(self.p.p.iter().copied());
        CVector::from_vec(out)
    }

    /// Real stacking `[Re v; Im v]`.
    pub fn to_real(&self) -> RVector {
        let v = self.to_complex();
        let n = v.len();
        RVector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
    }
}

/// `D_p`, `D_c`, `D_k`, `D_pr` and the basis vectors `e_k`.
#[derive(Debug, Clone)]
pub struct SplitOperators {
    pub users: usize,
    pub antennas: usize,
    /// `[0_{(K+1)N_t × (K+1)}, I_{(K+1)N_t}]`
    pub d_p: RMatrix,
    /// `[0_{N_t × (K+1)}, I_{N_t}, 0_{N_t × K N_t}]`
    pub d_c: RMatrix,
    /// `D_k` for `k = 1..K`, stored at index `k − 1`.
    pub d_k: Vec<RMatrix>,
    /// `Diag(D_p, D_p)`
    pub d_pr: RMatrix,
}

impl SplitOperators {
    pub fn new(users: usize, antennas: usize) -> Self {
        let head = users + 1;
        let len = head + antennas * (users + 1);
        let np = antennas * (users + 1);
        let d_p = RMatrix::from_fn(np, len, |r, c| if c == head + r { 1.0 } else { 0.0 });
        let block = |offset: usize| {
            RMatrix::from_fn(
                antennas,
                len,
                move |r, c| if c == offset + r { 1.0 } else { 0.0 },
            )
        };
        let d_c = block(head);
        let d_k = (1..=users).map(|k| block(head + k * antennas)).collect();
        let mut d_pr = RMatrix::zeros(2 * np, 2 * len);
        d_pr.view_mut((0, 0), (np, len)).copy_from(&d_p);
        d_pr.view_mut((np, len), (np, len)).copy_from(&d_p);
        Self {
            users,
            antennas,
            d_p,
            d_c,
            d_k,
            d_pr,
        }
    }

    /// Length `N_t(K+1) + K + 1` of the complex stacked variable.
    pub fn stacked_len(&self) -> usize {
        self.users + 1 + self.antennas * (self.users + 1)
    }

    /// `k`-th standard basis vector (1-based), as in `e_{k+1}ᵀ v = C_k`.
    pub fn basis(&self, k: usize) -> RVector {
        let mut e = RVector::zeros(self.stacked_len());
        e[k - 1] = 1.0;
        e
    }

    /// Applies `D_pr` to a real stacked vector.
    pub fn apply_pr(&self, x: &RVector) -> RVector {
        &self.d_pr * x
    }

    /// Length of the consensus (dual) vector, `2N_t(K+1)`.
    pub fn dual_len(&self) -> usize {
        2 * self.antennas * (self.users + 1)
    }

    /// Reshapes a dual vector `[Re; Im]` into a complex `N_t × (K+1)`
    /// matrix aligned with the precoders.
    pub fn dual_as_matrix(&self, y: &RVector) -> CMatrix {
        let n = self.antennas;
        let cols = self.users + 1;
        let half = n * cols;
        CMatrix::from_fn(n, cols, |i, j| {
            let idx = j * n + i;
            Complex64::new(y[idx], y[half + idx])
        })
    }
}

/// Primal `r = D_pr(v_r − u_r)` and dual `q = D_pr(u_r − u_r_prev)`
/// residuals.
pub fn residuals(
    v_r: &RVector,
    u_r: &RVector,
    u_r_prev: &RVector,
    ops: &SplitOperators,
) -> (RVector, RVector) {
    (ops.apply_pr(&(v_r - u_r)), ops.apply_pr(&(u_r - u_r_prev)))
}

/// `y + ρ D_pr(v_r − u_r)`
pub fn dual_update(
    y: &RVector,
    rho: f64,
    v_r: &RVector,
    u_r: &RVector,
    ops: &SplitOperators,
) -> RVector {
    y + ops.apply_pr(&(v_r - u_r)) * rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;

    fn sample(users: usize, antennas: usize) -> Stacked {
        let p = CMatrix::from_fn(antennas, users + 1, |i, j| {
            Complex64::new(
                1.0 + i as f64 + 10.0 * j as f64,
                -(i as f64) - 0.5 * j as f64,
            )
        });
        Stacked {
            alpha: 0.75,
            c: (0..users).map(|k| 0.1 * (k + 1) as f64).collect(),
            p: PrecoderMatrix::new(p).unwrap(),
        }
    }

    #[test]
    fn operator_shapes() {
        let ops = SplitOperators::new(2, 4);
        assert_eq!(ops.d_p.shape(), (12, 15));
        assert!(ops.d_p.columns(0, 3).iter().all(|&v| v == 0.0));
        assert_eq!(
            ops.d_p.columns(3, 12).into_owned(),
            RMatrix::identity(12, 12)
        );
        assert_eq!(ops.d_pr.shape(), (24, 30));
    }

    #[test]
    fn selectors_extract_blocks() {
        let ops = SplitOperators::new(2, 4);
        let s = sample(2, 4);
        let v = s.to_complex();
        let re = RVector::from_iterator(v.len(), v.iter().map(|z| z.re));
        // D_c picks entries 3..=6 (0-based) for K = 2, N_t = 4
        let pc = &ops.d_c * &re;
        for i in 0..4 {
            assert_eq!(pc[i], re[3 + i]);
            assert_eq!(pc[i], s.p.common()[i].re);
        }
        for k in 0..2 {
            let pk = &ops.d_k[k] * &re;
            for i in 0..4 {
                assert_eq!(pk[i], s.p.private(k)[i].re);
            }
        }
        let vec_p = &ops.d_p * &re;
        for (a, b) in vec_p.iter().zip(s.p.p.iter()) {
            assert_eq!(*a, b.re);
        }
        assert_eq!(ops.basis(2).dot(&re), s.c[0]);
    }

    #[test]
    fn real_selector_commutes_with_stacking() {
        let ops = SplitOperators::new(3, 2);
        let s = sample(3, 2);
        let pr = ops.apply_pr(&s.to_real());
        let np = 2 * 4;
        for (idx, z) in s.p.p.iter().enumerate() {
            assert_eq!(pr[idx], z.re);
            assert_eq!(pr[np + idx], z.im);
        }
        assert_eq!(ops.dual_as_matrix(&pr), s.p.p);
    }

    #[test]
    fn residual_and_dual_rules() {
        let ops = SplitOperators::new(2, 4);
        let u = sample(2, 4);
        let u_r = u.to_real();
        let (r, q) = residuals(&u_r, &u_r, &u_r, &ops);
        assert_eq!(r.norm(), 0.0);
        assert_eq!(q.norm(), 0.0);

        let mut v = u.clone();
        v.alpha = 9.0;
        v.c = vec![3.0, 4.0];
        let (r, _) = residuals(&v.to_real(), &u_r, &u_r, &ops);
        assert_eq!(r.norm(), 0.0);

        let y = RVector::from_element(ops.dual_len(), 0.3);
        assert_eq!(dual_update(&y, 2.0, &u_r, &u_r, &ops), y);
        let mut w = u.clone();
        w.p.p[(1, 2)] += Complex64::new(0.5, -0.25);
        let w_r = w.to_real();
        assert_eq!(dual_update(&y, 0.0, &w_r, &u_r, &ops), y);
        let zero = RVector::zeros(ops.dual_len());
        let stepped = dual_update(&zero, 2.0, &w_r, &u_r, &ops);
        let idx = 2 * 4 + 1;
        assert_eq!(stepped[idx], 1.0);
        assert_eq!(stepped[12 + idx], -0.5);
        assert_eq!(stepped.iter().filter(|v| **v != 0.0).count(), 2);
    }
}
