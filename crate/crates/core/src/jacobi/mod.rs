//! Jacobi matrices that agree with the free matrix past a finite support,
//! together with their orthogonal polynomials, m-function and spectrum.

mod mfunc;
mod spectrum;

pub use mfunc::{
    beta_of, density, jost_solution, m_at_edge, m_at_edge_extrapolated, m_function,
    weyl_norm_sq, weyl_solution, Edge, EdgeLimit, EdgeMethod, EdgeValue, JostSolution,
};
pub use spectrum::{
    assert_no_outside_spectrum, eigenvalues_outside, refine_eigenvalue, spectral_quadrature,
    Quadrature,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq_spaces::{RealSequence, Tail};

/// Semi-infinite Jacobi matrix with `a_n = 1`, `b_n = 0` for `n > support`.
///
/// Row `n` reads `a_{n-1} u_{n-1} + b_n u_n + a_n u_{n+1}`, with `a_0 = 1`
/// standing in for the boundary coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixDoc", into = "MatrixDoc")]
pub struct JacobiMatrix {
    a: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TryFrom<MatrixDoc> for JacobiMatrix {
    type Error = Error;
    fn try_from(doc: MatrixDoc) -> Result<Self> {
        JacobiMatrix::new(doc.a, doc.b)
    }
}

impl From<JacobiMatrix> for MatrixDoc {
    fn from(j: JacobiMatrix) -> Self {
        MatrixDoc { a: j.a, b: j.b }
    }
}

impl JacobiMatrix {
    /// Builds a matrix from `a_1, a_2, ...` and `b_1, b_2, ...`; missing
    /// entries continue as the free matrix.
    pub fn new(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = a.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Domain(format!("a_{} = {v} is not a positive number", i + 1)));
        }
        if let Some((i, v)) = b.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Domain(format!("b_{} = {v} is not finite", i + 1)));
        }
        let n = a.len().max(b.len());
        a.resize(n, 1.0);
        b.resize(n, 0.0);
        while matches!((a.last(), b.last()), (Some(&x), Some(&y)) if x == 1.0 && y == 0.0) {
            a.pop();
            b.pop();
        }
        Ok(Self { a, b })
    }

    pub fn free() -> Self {
        Self { a: vec![], b: vec![] }
    }

    /// `a = (sqrt 2, 1, 1, ...)`, `b = 0`: the matrix of the arcsine measure.
    pub fn chebyshev_t() -> Self {
        Self {
            a: vec![std::f64::consts::SQRT_2],
            b: vec![0.0],
        }
    }

    pub fn from_sequences(a: &RealSequence, b: &RealSequence) -> Result<Self> {
        let collect = |s: &RealSequence, fill: f64| -> Result<Vec<f64>> {
            if s.offset < 1 {
                return Err(Error::Contract(format!(
                    "Jacobi parameters are indexed from 1, got offset {}",
                    s.offset
                )));
            }
            let mut v = vec![fill; (s.offset - 1) as usize];
            v.extend_from_slice(&s.values);
            Ok(v)
        };
        Self::new(collect(a, 1.0)?, collect(b, 0.0)?)
    }

    pub fn a_sequence(&self) -> RealSequence {
        RealSequence {
            offset: 1,
            values: self.a.clone(),
            tail: Tail::Free,
        }
    }

    pub fn b_sequence(&self) -> RealSequence {
        RealSequence {
            offset: 1,
            values: self.b.clone(),
            tail: Tail::Free,
        }
    }

    /// Last index where the matrix differs from the free one (0 for the free matrix).
    pub fn support(&self) -> usize {
        self.a.len()
    }

    /// `a_n` for `n >= 0`, with `a_0 = 1`.
    pub fn a(&self, n: usize) -> f64 {
        if n == 0 {
            1.0
        } else {
            self.a.get(n - 1).copied().unwrap_or(1.0)
        }
    }

    /// `b_n` for `n >= 1`.
    pub fn b(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        self.b.get(n.wrapping_sub(1)).copied().unwrap_or(0.0)
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a
    }

    pub fn b_values(&self) -> &[f64] {
        &self.b
    }

    /// Diagonal and off-diagonal of the upper-left `m x m` block.
    pub fn truncation(&self, m: usize) -> (Vec<f64>, Vec<f64>) {
        let diag = (1..=m).map(|n| self.b(n)).collect();
        let off = (1..m).map(|n| self.a(n)).collect();
        (diag, off)
    }

    /// Largest deviation from `other` in any parameter.
    pub fn max_difference(&self, other: &JacobiMatrix) -> f64 {
        let n = self.support().max(other.support());
        (1..=n)
            .map(|k| {
                (self.a(k) - other.a(k))
                    .abs()
                    .max((self.b(k) - other.b(k)).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// Solves `a_{n-1} u_{n-1} + b_n u_n + a_n u_{n+1} = E u_n` from `u_0`, `u_1`.
pub fn recurrence_solve(
    j: &JacobiMatrix,
    e: Complex64,
    u0: Complex64,
    u1: Complex64,
    n_max: usize,
) -> Vec<Complex64> {
    let mut u = Vec::with_capacity(n_max.max(1) + 1);
    u.push(u0);
    u.push(u1);
    for n in 1..n_max {
        let next = ((e - j.b(n)) * u[n] - j.a(n - 1) * u[n - 1]) / j.a(n);
        u.push(next);
    }
    u
}

/// Real-energy version of [`recurrence_solve`].
pub fn recurrence_solve_real(j: &JacobiMatrix, e: f64, u0: f64, u1: f64, n_max: usize) -> Vec<f64> {
    let mut u = Vec::with_capacity(n_max.max(1) + 1);
    u.push(u0);
    u.push(u1);
    for n in 1..n_max {
        let next = ((e - j.b(n)) * u[n] - j.a(n - 1) * u[n - 1]) / j.a(n);
        u.push(next);
    }
    u
}

/// Largest per-site residual of the recurrence for `u` on rows `1..u.len()-1`.
pub fn recurrence_residual(j: &JacobiMatrix, e: f64, u: &[f64]) -> f64 {
    (1..u.len().saturating_sub(1))
        .map(|n| {
            let lhs = j.a(n - 1) * u[n - 1] + j.b(n) * u[n] + j.a(n) * u[n + 1];
            let scale = u[n - 1].abs() + u[n].abs() + u[n + 1].abs();
            (lhs - e * u[n]).abs() / scale.max(1.0)
        })
        .fold(0.0, f64::max)
}

/// First- and second-kind polynomial values at a real point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyTable {
    pub x: f64,
    /// Monic `P_0 .. P_{n_max}`; `P_{-1} = 0`.
    pub p_monic: Vec<f64>,
    /// Monic second kind `Q_0 .. Q_{n_max}`; `Q_{-1} = -1`.
    pub q_monic: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    /// `F_n = m(x) P_n + Q_n`, present when a finite m-value was supplied.
    pub f: Option<Vec<f64>>,
}

/// Tabulates `P_n(x)`, `Q_n(x)` via `P_{n+1} = (x - b_{n+1}) P_n - a_n^2 P_{n-1}`.
pub fn poly_table(
    j: &JacobiMatrix,
    x: f64,
    n_max: usize,
    m_value: Option<&EdgeValue>,
) -> Result<PolyTable> {
    let m = match m_value {
        None => None,
        Some(ev) => match ev.value {
            EdgeLimit::Finite(v) => Some(v),
            EdgeLimit::Infinite => {
                return Err(Error::Contract(
                    "F_n needs a finite m-value at the evaluation point".into(),
                ))
            }
        },
    };
    let mut p_monic = vec![1.0];
    let mut q_monic = vec![0.0];
    let (mut p_prev, mut q_prev) = (0.0, -1.0);
    for n in 0..n_max {
        let shift = x - j.b(n + 1);
        let a2 = j.a(n) * j.a(n);
        let p_next = shift * p_monic[n] - a2 * p_prev;
        let q_next = shift * q_monic[n] - a2 * q_prev;
        p_prev = p_monic[n];
        q_prev = q_monic[n];
        p_monic.push(p_next);
        q_monic.push(q_next);
    }
    let mut norm = 1.0;
    let mut p = Vec::with_capacity(n_max + 1);
    let mut q = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            norm *= j.a(n);
        }
        p.push(p_monic[n] / norm);
        q.push(q_monic[n] / norm);
    }
    let f = m.map(|m| p_monic.iter().zip(&q_monic).map(|(p, q)| m * p + q).collect());
    Ok(PolyTable {
        x,
        p_monic,
        q_monic,
        p,
        q,
        f,
    })
}
