//! Double commutation: inserting or removing one eigenvalue outside `[-2, 2]`.
//!
//! With `phi` solving `J phi = E phi`, `phi_0 = 0`, `phi_1 = 1` and
//! `c_n = 1 + gamma sum_{j <= n} phi_j^2`, the commuted matrix is
//!
//! ```text
//! a~_n = a_n sqrt(c_{n-1} c_{n+1}) / c_n
//! b~_n = b_n + gamma (a_n phi_n phi_{n+1} / c_n - a_{n-1} phi_{n-1} phi_n / c_{n-1})
//! ```
//!
//! and `m~ = (m - gamma/(z - E)) / (1 + gamma)`. This sign of the `b~` correction
//! is the one that places the new eigenvalue at `E` rather than at `-E`.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::jacobi::{
    beta_of, jost_solution, recurrence_solve_real, refine_eigenvalue, JacobiMatrix,
};

/// `phi_0 .. phi_{n_max}` with `phi_0 = 0`, `phi_1 = 1` at energy `e`.
pub fn phi_solution(j: &JacobiMatrix, e: f64, n_max: usize) -> Vec<f64> {
    recurrence_solve_real(j, e, 0.0, 1.0, n_max)
}

fn commuted_entry(j: &JacobiMatrix, gamma: f64, phi: &[f64], c: &[f64], n: usize) -> (f64, f64) {
    let a = j.a(n) * (c[n - 1] * c[n + 1]).sqrt() / c[n];
    let left = j.a(n - 1) * phi[n - 1] * phi[n] / c[n - 1];
    let right = j.a(n) * phi[n] * phi[n + 1] / c[n];
    (a, j.b(n) - gamma * (left - right))
}

/// Inserts the eigenvalue `e` with weight parameter `gamma > 0`.
///
/// The output differs from the free matrix by a geometrically decaying tail;
/// it is cut once every entry stays within `tol.free_tail` of the free values.
pub fn double_commute_add(
    j: &JacobiMatrix,
    e: f64,
    gamma: f64,
    tol: &Tolerances,
) -> Result<JacobiMatrix> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("gamma = {gamma} must be positive")));
    }
    if !(e.abs() > 2.0 + tol.band) {
        return Err(Error::Domain(format!("E = {e} must lie outside [-2, 2]")));
    }
    let jost = jost_solution(j, beta_of(Complex64::new(e, 0.0)));
    if jost.boundary_ratio() <= tol.resonance {
        return Err(Error::Precondition(format!("E = {e} is already an eigenvalue")));
    }
    let growth = beta_of(Complex64::new(e, 0.0)).re.abs().ln();
    // keep phi^2 well inside the floating-point range
    let n_max = j.support() + 4 + (300.0 / growth).min(20_000.0) as usize;
    let phi = phi_solution(j, e, n_max);
    let mut c = Vec::with_capacity(phi.len());
    let mut acc = 1.0;
    for p in &phi {
        acc += gamma * p * p;
        c.push(acc);
    }
    let settle = 6;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut quiet = 0;
    for n in 1..n_max {
        let (an, bn) = commuted_entry(j, gamma, &phi, &c, n);
        a.push(an);
        b.push(bn);
        if n > j.support() && (an - 1.0).abs() <= tol.free_tail && bn.abs() <= tol.free_tail {
            quiet += 1;
            if quiet == settle {
                a.truncate(a.len() - settle);
                b.truncate(b.len() - settle);
                return JacobiMatrix::new(a, b);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NoConvergence(format!(
        "commuted coefficients did not reach the free tail within {n_max} sites"
    )))
}

/// Removes the simple eigenvalue `e` (with `|e| > 2`).
///
/// Uses `gamma = -1/||phi||^2` with the norm's geometric tail summed exactly.
/// Then `c_n` equals `sum_{j > n} phi_j^2 / ||phi||^2`, which is evaluated from
/// tail sums to avoid cancellation; the result is exactly finitely supported.
pub fn double_commute_remove(j: &JacobiMatrix, e: f64, tol: &Tolerances) -> Result<JacobiMatrix> {
    if !(e.abs() > 2.0 + tol.band) {
        return Err(Error::Domain(format!("E = {e} must lie outside [-2, 2]")));
    }
    let e = refine_eigenvalue(j, e)?;
    let jost = jost_solution(j, beta_of(Complex64::new(e, 0.0)));
    let n = j.support();
    // phi_k = f_k / f_1 for k >= 1; geometric with ratio q past index n + 1
    let f1 = jost.values[1].re;
    let q = jost.beta.re.recip();
    let len = n + 4;
    let mut phi: Vec<f64> = (0..=len).map(|k| jost.at(k).re / f1).collect();
    phi[0] = 0.0;
    let q2 = q * q;
    // tail[k] = sum_{i > k} phi_i^2
    let mut tail = vec![0.0; len + 1];
    tail[len] = phi[len] * phi[len] * q2 / (1.0 - q2);
    for k in (0..len).rev() {
        tail[k] = tail[k + 1] + phi[k + 1] * phi[k + 1];
    }
    let norm = tail[0];
    let gamma = -1.0 / norm;
    let c: Vec<f64> = tail.iter().map(|t| t / norm).collect();
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    for k in 1..=n + 1 {
        let (ak, bk) = commuted_entry(j, gamma, &phi, &c, k);
        a.push(ak);
        b.push(bk);
    }
    JacobiMatrix::new(a, b)
}

/// `gamma` used by [`double_commute_remove`] for the eigenvalue `e`.
pub fn removal_gamma(j: &JacobiMatrix, e: f64) -> Result<f64> {
    let e = refine_eigenvalue(j, e)?;
    let jost = jost_solution(j, beta_of(Complex64::new(e, 0.0)));
    let n = j.support();
    let f1 = jost.values[1].re;
    let q2 = jost.beta.re.recip().powi(2);
    let mut norm: f64 = (1..=n + 1).map(|k| (jost.values[k].re / f1).powi(2)).sum();
    norm += (jost.values[n + 1].re / f1).powi(2) * q2 / (1.0 - q2);
    Ok(-1.0 / norm)
}
