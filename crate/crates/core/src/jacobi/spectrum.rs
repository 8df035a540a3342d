use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mfunc::{beta_of, jost_solution};
use super::JacobiMatrix;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{count_below, tridiagonal_eigen};

/// Gauss quadrature for the spectral measure of a truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }

    pub fn stieltjes(&self, z: Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| *w / (*x - z))
            .sum()
    }
}

/// Nodes and weights from the eigendecomposition of the `m x m` truncation.
pub fn spectral_quadrature(j: &JacobiMatrix, m: usize) -> Result<Quadrature> {
    if m < j.support() + 2 {
        return Err(Error::Precondition(format!(
            "truncation size {m} must exceed the support {} by at least 2",
            j.support()
        )));
    }
    let (diag, off) = j.truncation(m);
    let (nodes, weights) = tridiagonal_eigen(&diag, &off)?;
    Ok(Quadrature { nodes, weights })
}

fn outside_of_truncation(j: &JacobiMatrix, m: usize, band: f64) -> Result<Vec<f64>> {
    let (diag, off) = j.truncation(m);
    let (vals, _) = tridiagonal_eigen(&diag, &off)?;
    Ok(vals.into_iter().filter(|v| v.abs() > 2.0 + band).collect())
}

/// Eigenvalues of `J` outside `[-2, 2]`, stabilized over growing truncations
/// and then polished as roots of the Jost boundary value.
pub fn eigenvalues_outside(j: &JacobiMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    let sizes: Vec<usize> = tol.truncations.iter().map(|t| t + j.support()).collect();
    let mut previous: Option<Vec<f64>> = None;
    let mut converged = None;
    for &m in &sizes {
        let current = outside_of_truncation(j, m, tol.band)?;
        if let Some(prev) = &previous {
            let stable = prev.len() == current.len()
                && prev.iter().zip(&current).all(|(a, b)| (a - b).abs() < tol.eig);
            if stable {
                converged = Some(current);
                break;
            }
        }
        previous = Some(current);
    }
    let rough = converged.ok_or_else(|| {
        Error::NoConvergence(format!(
            "outside eigenvalues did not stabilize over truncations {sizes:?}"
        ))
    })?;
    let mut polished = rough
        .iter()
        .map(|&e| refine_eigenvalue(j, e))
        .collect::<Result<Vec<f64>>>()?;
    polished.sort_by(f64::total_cmp);
    Ok(polished)
}

fn jost_boundary(j: &JacobiMatrix, e: f64) -> (f64, f64) {
    let f = jost_solution(j, beta_of(Complex64::new(e, 0.0)));
    (f.values[0].re, f.boundary_ratio())
}

/// Secant iteration on the Jost boundary value `f_0(E)` starting from `e0`.
///
/// Fails with a precondition error when no eigenvalue sits near `e0`.
pub fn refine_eigenvalue(j: &JacobiMatrix, e0: f64) -> Result<f64> {
    if !(e0.abs() > 2.0) {
        return Err(Error::Domain(format!("E = {e0} is not outside [-2, 2]")));
    }
    let mut x0 = e0;
    let mut x1 = e0 + 1e-7 * e0.signum() * e0.abs().max(1.0);
    let (mut f0, _) = jost_boundary(j, x0);
    let (mut f1, _) = jost_boundary(j, x1);
    for _ in 0..80 {
        if f1 == f0 || f1 == 0.0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !(x2.abs() > 2.0) || !x2.is_finite() {
            break;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = jost_boundary(j, x1).0;
        if (x1 - x0).abs() <= 4.0 * f64::EPSILON * x1.abs() {
            break;
        }
    }
    let (_, ratio) = jost_boundary(j, x1);
    if ratio > 1e-8 || (x1 - e0).abs() > 1e-3 * e0.abs() {
        return Err(Error::Precondition(format!("E = {e0} is not an eigenvalue")));
    }
    Ok(x1)
}

/// Errors unless the spectrum lies in `[-2, 2]` up to the band tolerance.
///
/// Uses an inertia count on a generous truncation, whose eigenvalues lie in
/// the convex hull of the spectrum.
pub fn assert_no_outside_spectrum(j: &JacobiMatrix, tol: &Tolerances) -> Result<()> {
    let m = j.support() + tol.truncations.iter().copied().max().unwrap_or(256);
    let (diag, off) = j.truncation(m);
    let below = count_below(&diag, &off, -2.0 - tol.band);
    let above = m - count_below(&diag, &off, 2.0 + tol.band);
    if below + above > 0 {
        return Err(Error::Precondition(format!(
            "{} eigenvalue(s) lie outside [-2, 2]; remove them first",
            below + above
        )));
    }
    Ok(())
}
