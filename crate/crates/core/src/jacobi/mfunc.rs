use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectrum::assert_no_outside_spectrum;
use super::JacobiMatrix;
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// One of the two band edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Edge {
    #[serde(rename = "+2")]
    Plus,
    #[serde(rename = "-2")]
    Minus,
}

impl Edge {
    pub fn sign(self) -> f64 {
        match self {
            Edge::Plus => 1.0,
            Edge::Minus => -1.0,
        }
    }

    pub fn point(self) -> f64 {
        2.0 * self.sign()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeLimit {
    Finite(f64),
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeMethod {
    ClosedFormTail,
    ExtrapolatedLimit,
}

/// Boundary value `m(+-2)` of the m-function, approached from outside the band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeValue {
    pub edge: Edge,
    /// `m(+-2)` itself (not the sign-adjusted `-+m(+-2)`).
    pub value: EdgeLimit,
    pub method: EdgeMethod,
    /// Independent extrapolated estimate, when it was conclusive.
    pub extrapolated: Option<EdgeLimit>,
}

impl EdgeValue {
    pub fn closed_form(edge: Edge, value: EdgeLimit) -> Self {
        Self {
            edge,
            value,
            method: EdgeMethod::ClosedFormTail,
            extrapolated: None,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self.value {
            EdgeLimit::Finite(v) => Some(v),
            EdgeLimit::Infinite => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.finite().is_some()
    }

    /// `-+m(+-2)`, which is positive whenever it is finite.
    pub fn signed(&self) -> Option<f64> {
        self.finite().map(|m| -self.edge.sign() * m)
    }
}

/// The root `beta` of `z = beta + 1/beta` with `|beta| >= 1`.
///
/// On `(-2, 2)` this is the boundary value from the upper half plane, `e^{i theta}`.
pub fn beta_of(z: Complex64) -> Complex64 {
    let w = (z - 2.0).sqrt() * (z + 2.0).sqrt();
    let beta = (z + w) * 0.5;
    if beta.norm() < 1.0 {
        beta.inv()
    } else {
        beta
    }
}

/// Solution of the recurrence equal to `beta^{-n}` (up to scale) past the support.
#[derive(Debug, Clone)]
pub struct JostSolution {
    pub beta: Complex64,
    /// `f_0 .. f_{N+1}`, scaled so that `f_{N+1} = 1`.
    pub values: Vec<Complex64>,
}

impl JostSolution {
    pub fn at(&self, n: usize) -> Complex64 {
        let last = self.values.len() - 1;
        if n <= last {
            self.values[n]
        } else {
            self.beta.powi(-((n - last) as i32))
        }
    }

    /// `f_0 / max |f_n|`: vanishes exactly at eigenvalues and resonances.
    pub fn boundary_ratio(&self) -> f64 {
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        self.values[0].norm() / scale
    }
}

/// Propagates the geometric tail `beta^{-n}` backwards through the support.
pub fn jost_solution(j: &JacobiMatrix, beta: Complex64) -> JostSolution {
    let n = j.support();
    let z = beta + beta.inv();
    let mut values = vec![Complex64::new(0.0, 0.0); n + 2];
    values[n + 1] = Complex64::new(1.0, 0.0);
    let mut next = beta.inv();
    for row in (1..=n + 1).rev() {
        let cur = values[row];
        values[row - 1] = ((z - j.b(row)) * cur - j.a(row) * next) / j.a(row - 1);
        next = cur;
    }
    JostSolution { beta, values }
}

const RESONANCE: f64 = 1e-9;

/// `m(z) = <delta_1, (J - z)^{-1} delta_1>` for `z` off `[-2, 2]`.
pub fn m_function(j: &JacobiMatrix, z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re.abs() <= 2.0 {
        return Err(Error::Singular(format!("z = {z} lies on [-2, 2]")));
    }
    let f = jost_solution(j, beta_of(z));
    if f.boundary_ratio() <= RESONANCE {
        return Err(Error::Singular(format!("z = {z} is an eigenvalue")));
    }
    Ok(-f.values[1] / f.values[0])
}

/// Absolutely continuous density `Im m(x + i0) / pi` for `x` in `(-2, 2)`.
pub fn density(j: &JacobiMatrix, x: f64) -> Result<f64> {
    if !(x.abs() < 2.0) {
        return Err(Error::Domain(format!("x = {x} is not inside (-2, 2)")));
    }
    let theta = (x / 2.0).acos();
    let f = jost_solution(j, Complex64::from_polar(1.0, theta));
    Ok((-f.values[1] / f.values[0]).im / PI)
}

/// Weyl solution `f_n = m(z) p_n(z) + q_n(z)` for `n = 0..=n_max`.
pub fn weyl_solution(j: &JacobiMatrix, z: Complex64, n_max: usize) -> Result<Vec<Complex64>> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!("Im z must be positive, got z = {z}")));
    }
    let f = jost_solution(j, beta_of(z));
    let f0 = f.values[0];
    Ok((0..=n_max).map(|n| -f.at(n + 1) / f0).collect())
}

/// `sum_{n >= 0} |f_n|^2` for the Weyl solution, tail summed in closed form.
pub fn weyl_norm_sq(j: &JacobiMatrix, z: Complex64) -> Result<f64> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!("Im z must be positive, got z = {z}")));
    }
    let f = jost_solution(j, beta_of(z));
    let last = f.values.len() - 1;
    let window: f64 = f.values[1..].iter().map(|v| v.norm_sqr()).sum();
    let tail = f.values[last].norm_sqr() / (f.beta.norm_sqr() - 1.0);
    Ok((window + tail) / f.values[0].norm_sqr())
}

/// Classifies `m(+-2)` from the exact edge solution, cross-checked against
/// the extrapolated limit along `+-(2 + 2^{-j})`.
///
/// At the edge `beta = +-1` and the tail solution is `(+-1)^n`, so the limit
/// is `-f_1/f_0` unless `f_0` vanishes (a resonance), in which case `m`
/// diverges. The extrapolated route is independent; a conclusive disagreement
/// between the two is reported as [`Error::Inconclusive`].
pub fn m_at_edge(j: &JacobiMatrix, edge: Edge, tol: &Tolerances) -> Result<EdgeValue> {
    assert_no_outside_spectrum(j, tol)?;
    let f = jost_solution(j, Complex64::new(edge.sign(), 0.0));
    let closed = if f.boundary_ratio() <= tol.resonance {
        EdgeLimit::Infinite
    } else {
        EdgeLimit::Finite((-f.values[1] / f.values[0]).re)
    };
    let extrapolated = match extrapolate(j, edge, tol) {
        Ok(v) => Some(v),
        Err(Error::Inconclusive(_)) => None,
        Err(e) => return Err(e),
    };
    if let Some(ext) = extrapolated {
        let agree = match (closed, ext) {
            (EdgeLimit::Finite(a), EdgeLimit::Finite(b)) => {
                (a - b).abs() <= 1e-5 * a.abs().max(1.0)
            }
            (EdgeLimit::Infinite, EdgeLimit::Infinite) => true,
            _ => false,
        };
        if !agree {
            return Err(Error::Inconclusive(format!(
                "edge {}: exact tail gives {closed:?}, extrapolation gives {ext:?}",
                edge.point()
            )));
        }
    }
    Ok(EdgeValue {
        edge,
        value: closed,
        method: EdgeMethod::ClosedFormTail,
        extrapolated,
    })
}

/// The extrapolated route on its own.
pub fn m_at_edge_extrapolated(j: &JacobiMatrix, edge: Edge, tol: &Tolerances) -> Result<EdgeValue> {
    assert_no_outside_spectrum(j, tol)?;
    let value = extrapolate(j, edge, tol)?;
    Ok(EdgeValue {
        edge,
        value,
        method: EdgeMethod::ExtrapolatedLimit,
        extrapolated: Some(value),
    })
}

/// Two Richardson levels in `t = sqrt(h)`: `m(+-(2+h))` is analytic in `t`
/// when the limit is finite and behaves like `C/t` otherwise.
fn extrapolate(j: &JacobiMatrix, edge: Edge, tol: &Tolerances) -> Result<EdgeLimit> {
    let levels = tol.edge_levels.max(8);
    let mut raw = Vec::with_capacity(levels as usize);
    for level in 1..=levels {
        let h = 0.5f64.powi(level as i32);
        let e = edge.sign() * (2.0 + h);
        let f = jost_solution(j, beta_of(Complex64::new(e, 0.0)));
        raw.push((-f.values[1] / f.values[0]).re);
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let first: Vec<f64> = raw.windows(2).map(|w| (w[1] - r * w[0]) / (1.0 - r)).collect();
    let second: Vec<f64> = first
        .windows(2)
        .map(|w| (w[1] - r * r * w[0]) / (1.0 - r * r))
        .collect();

    let tail = &second[second.len() - 6..];
    let last = tail[5];
    let scale = last.abs().max(1.0);
    if tail.windows(2).all(|w| (w[1] - w[0]).abs() < tol.edge * scale) {
        return Ok(EdgeLimit::Finite(last));
    }
    let growing = tail.windows(2).all(|w| w[1].abs() > w[0].abs());
    let same_sign = tail.iter().all(|v| v.signum() == last.signum());
    let root_two = tail
        .windows(2)
        .all(|w| ((w[1] / w[0]).abs() - std::f64::consts::SQRT_2).abs() < 0.05);
    if growing && same_sign && (last.abs() > tol.edge_infinite || root_two) {
        return Ok(EdgeLimit::Infinite);
    }
    Err(Error::Inconclusive(format!(
        "edge {}: extrapolants neither settle nor diverge (last {last:e})",
        edge.point()
    )))
}
