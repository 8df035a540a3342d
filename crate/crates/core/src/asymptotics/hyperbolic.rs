use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::diagonal::{diagonalized_solve, DiagonalizableSystem};
use super::{sign_threshold, SolutionFamily, SolutionKind};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::jacobi::{beta_of, jost_solution, JacobiMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicPair {
    /// Growing solution `c_+ beta^k (1 + eps_+)`.
    pub plus: SolutionFamily,
    /// Decaying solution `c_- beta^{-k} (1 + eps_-)`.
    pub minus: SolutionFamily,
    /// Start of the diagonalized system.
    pub k0: usize,
    /// Relative deviation of `psi_-` from the backward-propagated Jost solution.
    pub jost_deviation: f64,
    /// Relative spread of the Wronskian over the window.
    pub wronskian_spread: f64,
}

struct Site {
    lam: [f64; 2],
    s: DMatrix<f64>,
    v: DMatrix<f64>,
}

// transfer matrix split as A(k) + V(k) with A(k) = [[E/a_k, -1], [1, 0]]
fn site(j: &JacobiMatrix, e: f64, k: usize) -> Option<Site> {
    let a = j.a(k);
    let disc = e * e - 4.0 * a * a;
    if disc <= 0.0 {
        return None;
    }
    let root = e.signum() * disc.sqrt();
    let (lp, lm) = ((e + root) / (2.0 * a), (e - root) / (2.0 * a));
    let s = DMatrix::from_row_slice(2, 2, &[1.0, -lm, -1.0, lp]) / (lp - lm);
    let v = DMatrix::from_row_slice(2, 2, &[-j.b(k) / a, 1.0 - j.a(k - 1) / a, 0.0, 0.0]);
    Some(Site { lam: [lp, lm], s, v })
}

/// Solutions `psi_+-(k) = c_+- beta^{+-k} (1 + eps_+-(k))` at `E = beta + 1/beta`.
///
/// The recurrence is written as `Psi(k+1) = [A(k) + V(k)] Psi(k)` with
/// `Psi(k) = (psi(k), psi(k-1))` and handed to [`diagonalized_solve`]; sites
/// before the dichotomy sets in are filled by the recurrence itself.
pub fn hyperbolic_solutions(j: &JacobiMatrix, e: f64, tol: &Tolerances) -> Result<HyperbolicPair> {
    if !(e.abs() > 2.0 + tol.band) || !e.is_finite() {
        return Err(Error::Domain(format!("E = {e} must lie outside [-2, 2]")));
    }
    let beta = beta_of(Complex64::new(e, 0.0)).re;
    let delta = ((beta * beta - 1.0) / 2.0).min(0.5);
    // keep beta^K representable
    let cap = (575.0 / beta.abs().ln()) as usize;
    let window = tol.window.min(cap).max(j.support() + 8);

    let sites: Vec<Option<Site>> = (0..=window + 1).map(|k| if k == 0 { None } else { site(j, e, k) }).collect();
    let mut k0 = 1;
    for k in 1..=window {
        let ok = match (&sites[k], &sites[k + 1]) {
            (Some(here), Some(next)) => {
                let sys = DiagonalizableSystem {
                    k0: k,
                    s: vec![here.s.clone(), next.s.clone()],
                    lambda: vec![DVector::from_row_slice(&here.lam)],
                    v: vec![here.v.clone()],
                    delta,
                };
                let vt = &sys.conjugated_perturbation()?[0];
                let ratio = ((here.lam[0] + vt[(0, 0)]) / (here.lam[1] + vt[(1, 1)])).abs();
                ratio >= 1.0 + delta
            }
            _ => false,
        };
        if !ok {
            k0 = k + 1;
        }
    }
    if k0 + 2 > window {
        return Err(Error::Dichotomy(format!("no dichotomy inside the window of {window} sites")));
    }
    let range = k0..=window;
    let sys = DiagonalizableSystem {
        k0,
        s: range.clone().map(|k| sites[k].as_ref().unwrap().s.clone()).collect(),
        lambda: range.clone().map(|k| DVector::from_row_slice(&sites[k].as_ref().unwrap().lam)).collect(),
        v: range.map(|k| sites[k].as_ref().unwrap().v.clone()).collect(),
        delta,
    };

    let mut families = Vec::with_capacity(2);
    for (i, kind) in [(0, SolutionKind::HyperbolicPlus), (1, SolutionKind::HyperbolicMinus)] {
        let sol = diagonalized_solve(&sys, i, tol)?;
        let mut psi = vec![0.0; window + 1];
        psi[k0 - 1] = sol.psi[0][1];
        for (t, p) in sol.psi.iter().enumerate() {
            if k0 + t <= window {
                psi[k0 + t] = p[0];
            }
        }
        for n in (1..k0).rev() {
            psi[n - 1] = ((e - j.b(n)) * psi[n] - j.a(n) * psi[n + 1]) / j.a(n - 1);
        }
        let power = if i == 0 { 1 } else { -1 };
        let lead = |k: usize| beta.powi(power * k as i32);
        let c = psi[window] / lead(window);
        let errors = psi.iter().enumerate().map(|(k, p)| p / (c * lead(k)) - 1.0).collect();
        let oriented: Vec<f64> = psi.iter().map(|p| p * c.signum()).collect();
        families.push(SolutionFamily {
            energy: e,
            kind,
            values: psi,
            beta: Some(beta),
            leading_constant: Some(c),
            errors,
            sign_threshold: sign_threshold(&oriented, beta.signum()),
        });
    }
    let minus = families.pop().unwrap();
    let plus = families.pop().unwrap();

    let jost = jost_solution(j, Complex64::new(beta, 0.0));
    let f: Vec<f64> = (0..=window + 1).map(|k| jost.at(k).re).collect();
    let scale = f[window] / minus.values[window];
    let jost_deviation = (0..window)
        .map(|k| (minus.values[k] * scale - f[k]).abs() / (f[k].abs() + f[k + 1].abs()))
        .fold(0.0, f64::max);

    let w: Vec<f64> = (0..window)
        .map(|k| {
            j.a(k) * (plus.values[k] * minus.values[k + 1] - plus.values[k + 1] * minus.values[k])
        })
        .collect();
    let wronskian_spread = w.iter().map(|x| (x - w[0]).abs()).fold(0.0, f64::max) / w[0].abs();

    Ok(HyperbolicPair { plus, minus, k0, jost_deviation, wronskian_spread })
}
