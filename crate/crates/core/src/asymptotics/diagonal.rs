//! Perturbed diagonal systems `x(k+1) = [Lambda(k) + V(k)] x(k)`.
//!
//! Data is stored on a window `k0 .. k0 + len`; past the window the diagonal part
//! is frozen at its last value and the perturbation is zero, so every infinite sum
//! in the construction truncates exactly.

use nalgebra::{DMatrix, DVector};

use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Relation of a tracked diagonal entry `lambda_i` to another entry `lambda_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dichotomy {
    /// `|lambda_i / lambda_j| >= 1 + delta` throughout.
    Dominates,
    /// `|lambda_i / lambda_j| <= 1 - delta` throughout.
    Dominated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSystem {
    pub k0: usize,
    pub lambda: Vec<DVector<f64>>,
    pub perturbation: Vec<DMatrix<f64>>,
    pub delta: f64,
}

impl DiagonalSystem {
    pub fn new(
        k0: usize,
        lambda: Vec<DVector<f64>>,
        perturbation: Vec<DMatrix<f64>>,
        delta: f64,
    ) -> Result<Self> {
        if lambda.is_empty() || lambda.len() != perturbation.len() {
            return Err(Error::Contract(format!(
                "window needs matching non-empty lambda ({}) and perturbation ({}) data",
                lambda.len(),
                perturbation.len()
            )));
        }
        let d = lambda[0].len();
        if lambda.iter().any(|l| l.len() != d)
            || perturbation.iter().any(|v| v.nrows() != d || v.ncols() != d)
        {
            return Err(Error::Contract(format!("all entries must have dimension {d}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Domain(format!("dichotomy margin {delta} must lie in (0, 1)")));
        }
        Ok(Self { k0, lambda, perturbation, delta })
    }

    pub fn dim(&self) -> usize {
        self.lambda[0].len()
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    /// One past the last stored index.
    pub fn end(&self) -> usize {
        self.k0 + self.len()
    }

    pub fn lambda_at(&self, k: usize) -> &DVector<f64> {
        let t = k.saturating_sub(self.k0).min(self.len() - 1);
        &self.lambda[t]
    }

    pub fn perturbation_at(&self, k: usize) -> DMatrix<f64> {
        match k.checked_sub(self.k0) {
            Some(t) if t < self.len() => self.perturbation[t].clone(),
            _ => DMatrix::zeros(self.dim(), self.dim()),
        }
    }

    /// Classifies every `j != i` against the tracked index `i` over the whole window.
    pub fn classify(&self, i: usize) -> Result<Vec<Option<Dichotomy>>> {
        let d = self.dim();
        if i >= d {
            return Err(Error::Contract(format!("index {i} out of range for dimension {d}")));
        }
        let mut out = vec![None; d];
        for (j, slot) in out.iter_mut().enumerate() {
            if j == i {
                continue;
            }
            let mut class = None;
            for (t, l) in self.lambda.iter().enumerate() {
                let ratio = (l[i] / l[j]).abs();
                let here = if ratio >= 1.0 + self.delta {
                    Dichotomy::Dominates
                } else if ratio <= 1.0 - self.delta {
                    Dichotomy::Dominated
                } else {
                    return Err(Error::Dichotomy(format!(
                        "|lambda_{i}/lambda_{j}| = {ratio} at k = {} is within {} of 1",
                        self.k0 + t,
                        self.delta
                    )));
                };
                if class.is_some_and(|c| c != here) {
                    return Err(Error::Dichotomy(format!(
                        "pair ({i}, {j}) switches dichotomy class at k = {}",
                        self.k0 + t
                    )));
                }
                class = Some(here);
            }
            *slot = class;
        }
        Ok(out)
    }
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Harris–Lutz matrices `Q(k)` for `k = k0 ..= end`.
///
/// `Q_ii = 0` and `V - diag V + Lambda Q(k) - Q(k+1) Lambda = 0`. Entries where
/// `lambda_i` dominates are summed backward from infinity, the others forward
/// from `k0`.
pub fn harris_lutz_q(sys: &DiagonalSystem) -> Result<Vec<DMatrix<f64>>> {
    let d = sys.dim();
    let n = sys.len();
    let mut q = vec![DMatrix::zeros(d, d); n + 1];
    for i in 0..d {
        let classes = sys.classify(i)?;
        for (j, class) in classes.iter().enumerate() {
            match class {
                None => {}
                Some(Dichotomy::Dominates) => {
                    for t in (0..n).rev() {
                        let (l, v) = (&sys.lambda[t], &sys.perturbation[t]);
                        q[t][(i, j)] = (q[t + 1][(i, j)] * l[j] - v[(i, j)]) / l[i];
                    }
                }
                Some(Dichotomy::Dominated) => {
                    for t in 0..n {
                        let (l, v) = (&sys.lambda[t], &sys.perturbation[t]);
                        q[t + 1][(i, j)] = (l[i] * q[t][(i, j)] + v[(i, j)]) / l[j];
                    }
                }
            }
        }
    }
    Ok(q)
}

/// Largest entry of `V - diag V + Lambda Q(k) - Q(k+1) Lambda` over the window.
pub fn harris_lutz_residual(sys: &DiagonalSystem, q: &[DMatrix<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for t in 0..sys.len() {
        let l = &sys.lambda[t];
        let v = &sys.perturbation[t];
        for i in 0..sys.dim() {
            for j in 0..sys.dim() {
                if i == j {
                    continue;
                }
                let r = v[(i, j)] + l[i] * q[t][(i, j)] - q[t + 1][(i, j)] * l[j];
                worst = worst.max(r.abs());
            }
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevinsonSolution {
    pub k0: usize,
    pub index: usize,
    /// Start of the contraction window.
    pub k1: usize,
    /// `2 C / delta * sum_{l >= k1} ||R(l)||`.
    pub contraction: f64,
    pub iterations: usize,
    /// `x(k)` for `k = k0 ..= end`.
    pub x: Vec<DVector<f64>>,
    /// `x(k)` divided by `prod_{l=k0}^{k-1} lambda_i(l)`.
    pub w: Vec<DVector<f64>>,
}

impl LevinsonSolution {
    /// Sup-norm distance of the normalized solution from `e_i` at each site.
    pub fn error(&self) -> Vec<f64> {
        self.w
            .iter()
            .map(|w| {
                w.iter()
                    .enumerate()
                    .map(|(j, x)| (x - if j == self.index { 1.0 } else { 0.0 }).abs())
                    .fold(0.0, f64::max)
            })
            .collect()
    }

    /// Largest relative residual of `x(k+1) = [Lambda + R] x(k)`.
    pub fn residual(&self, sys: &DiagonalSystem) -> f64 {
        (0..self.x.len() - 1)
            .map(|t| {
                let k = self.k0 + t;
                let step = DMatrix::from_diagonal(sys.lambda_at(k)) + sys.perturbation_at(k);
                let r = &self.x[t + 1] - step * &self.x[t];
                r.amax() / self.x[t + 1].amax().max(self.x[t].amax()).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

/// Solution of `x(k+1) = [Lambda + R] x(k)` asymptotic to `prod lambda_i * e_i`.
///
/// Solves `w = e_i + T w` on `[k1, end]` by fixed-point iteration, where `k1` is
/// the first index with `2 C / delta * sum_{l >= k1} ||R(l)|| < 1/2`, then
/// propagates backward to `k0`.
pub fn levinson_solve(sys: &DiagonalSystem, i: usize, tol: &Tolerances) -> Result<LevinsonSolution> {
    let classes = sys.classify(i)?;
    let d = sys.dim();
    let n = sys.len() + 1;
    let lam: Vec<DVector<f64>> = (0..n).map(|t| sys.lambda_at(sys.k0 + t).clone()).collect();
    let r: Vec<DMatrix<f64>> = (0..n).map(|t| sys.perturbation_at(sys.k0 + t)).collect();
    if let Some(t) = lam.iter().position(|l| l[i] == 0.0) {
        return Err(Error::Singular(format!("lambda_{i} vanishes at k = {}", sys.k0 + t)));
    }
    let c = lam.iter().map(|l| 1.0 / l[i].abs()).fold(0.0, f64::max);
    let mut tail = vec![0.0; n + 1];
    for t in (0..n).rev() {
        tail[t] = tail[t + 1] + inf_norm(&r[t]);
    }
    let bound = |t: usize| 2.0 * c / sys.delta * tail[t];
    let t1 = (0..n).find(|&t| bound(t) < 0.5).ok_or_else(|| {
        Error::Cutoff("no k1 in the window makes the Levinson operator contract".into())
    })?;
    let forward: Vec<bool> = classes.iter().map(|c| *c == Some(Dichotomy::Dominates)).collect();
    let e_i = DVector::from_fn(d, |j, _| if j == i { 1.0 } else { 0.0 });

    let mut w = vec![e_i.clone(); n];
    let mut iterations = 0;
    loop {
        if iterations == tol.max_iterations {
            return Err(Error::NoConvergence(format!(
                "Levinson iteration did not settle in {iterations} steps"
            )));
        }
        iterations += 1;
        let g: Vec<DVector<f64>> = (t1..n).map(|t| &r[t] * &w[t] / lam[t][i]).collect();
        let mut next = vec![e_i.clone(); n];
        let mut s1 = DVector::<f64>::zeros(d);
        for t in t1..n {
            for j in 0..d {
                if forward[j] {
                    next[t][j] += s1[j];
                }
            }
            for j in 0..d {
                s1[j] = s1[j] * lam[t][j] / lam[t][i] + g[t - t1][j];
            }
        }
        let mut s2 = DVector::<f64>::zeros(d);
        for t in (t1..n).rev() {
            for j in 0..d {
                if !forward[j] {
                    s2[j] = (g[t - t1][j] + s2[j]) * lam[t][i] / lam[t][j];
                    next[t][j] -= s2[j];
                }
            }
        }
        let change = (t1..n).map(|t| (&next[t] - &w[t]).amax()).fold(0.0, f64::max);
        w = next;
        if change < tol.fixed_point {
            break;
        }
    }

    let mut prod = vec![1.0; n];
    for t in 1..n {
        prod[t] = prod[t - 1] * lam[t - 1][i];
    }
    let mut x: Vec<DVector<f64>> = (0..n).map(|t| &w[t] * prod[t]).collect();
    for t in (0..t1).rev() {
        let step = DMatrix::from_diagonal(&lam[t]) + &r[t];
        x[t] = step.lu().solve(&x[t + 1]).ok_or_else(|| {
            Error::Singular(format!("step matrix singular at k = {}", sys.k0 + t))
        })?;
        w[t] = &x[t] / prod[t];
    }
    Ok(LevinsonSolution {
        k0: sys.k0,
        index: i,
        k1: sys.k0 + t1,
        contraction: bound(t1),
        iterations,
        x,
        w,
    })
}

/// `Psi(k+1) = [A(k) + V(k)] Psi(k)` with `A(k) = S(k)^{-1} Lambda(k) S(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalizableSystem {
    pub k0: usize,
    pub s: Vec<DMatrix<f64>>,
    pub lambda: Vec<DVector<f64>>,
    pub v: Vec<DMatrix<f64>>,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalizedSolution {
    /// `Psi_i(k)` for `k = k0 ..= end`.
    pub psi: Vec<DVector<f64>>,
    /// Diagonal of the `z`-system, `lambda_i + V~_ii`.
    pub effective_lambda: Vec<f64>,
    pub harris_lutz_residual: f64,
    pub levinson: LevinsonSolution,
}

impl DiagonalizableSystem {
    fn s_at(&self, t: usize) -> &DMatrix<f64> {
        &self.s[t.min(self.s.len() - 1)]
    }

    /// `V~(k) = S(k+1) (A(k) + V(k)) S(k)^{-1} - Lambda(k)` on the window.
    pub fn conjugated_perturbation(&self) -> Result<Vec<DMatrix<f64>>> {
        (0..self.lambda.len())
            .map(|t| {
                let s_inv = self.s[t].clone().try_inverse().ok_or_else(|| {
                    Error::Singular(format!("S({}) is not invertible", self.k0 + t))
                })?;
                let lam = DMatrix::from_diagonal(&self.lambda[t]);
                let a = &s_inv * &lam * &self.s[t];
                Ok(self.s_at(t + 1) * (a + &self.v[t]) * s_inv - lam)
            })
            .collect()
    }
}

/// Solution `Psi_i` with product-form leading behavior `prod (lambda_i + V~_ii)`.
///
/// Composes `z = S Psi`, the Harris–Lutz step `z = (I + Q) x` and the Levinson
/// solver for the `x`-system, then undoes both transforms.
pub fn diagonalized_solve(
    sys: &DiagonalizableSystem,
    i: usize,
    tol: &Tolerances,
) -> Result<DiagonalizedSolution> {
    let n = sys.lambda.len();
    if sys.s.len() != n || sys.v.len() != n {
        return Err(Error::Contract("S, lambda and V must share one window".into()));
    }
    let vt = sys.conjugated_perturbation()?;
    let z_sys = DiagonalSystem::new(sys.k0, sys.lambda.clone(), vt.clone(), sys.delta)?;
    let q = harris_lutz_q(&z_sys)?;
    let hl = harris_lutz_residual(&z_sys, &q);
    let d = z_sys.dim();
    let eye = DMatrix::<f64>::identity(d, d);
    let mut lam_t = Vec::with_capacity(n);
    let mut r = Vec::with_capacity(n);
    for t in 0..n {
        let diag_v = DMatrix::from_diagonal(&vt[t].diagonal());
        lam_t.push(&sys.lambda[t] + vt[t].diagonal());
        let inv = (&eye + &q[t + 1]).try_inverse().ok_or_else(|| {
            Error::Singular(format!("I + Q({}) is not invertible", sys.k0 + t + 1))
        })?;
        r.push(inv * (&vt[t] * &q[t] - &q[t + 1] * diag_v));
    }
    let effective_lambda = lam_t.iter().map(|l| l[i]).collect();
    let x_sys = DiagonalSystem::new(sys.k0, lam_t, r, sys.delta)?;
    let lev = levinson_solve(&x_sys, i, tol)?;
    let psi = lev
        .x
        .iter()
        .enumerate()
        .map(|(t, x)| {
            let z = (&eye + &q[t.min(n)]) * x;
            sys.s_at(t)
                .clone()
                .lu()
                .solve(&z)
                .ok_or_else(|| Error::Singular(format!("S({}) is not invertible", sys.k0 + t)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagonalizedSolution { psi, effective_lambda, harris_lutz_residual: hl, levinson: lev })
}
