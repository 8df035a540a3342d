//! Orthogonal polynomials on the unit circle for conjugation-invariant measures.
//!
//! Convention: `Phi_{n+1} = z Phi_n - conj(alpha_n) Phi*_n`, so that
//! `alpha_n = -conj(Phi_{n+1}(0))`.

use std::io::Write;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq_spaces::circle_grid;

/// Real Verblunsky coefficients `alpha_0 .. alpha_{K-1}`, zero afterwards.
///
/// The boundary value `alpha_{-1} = -1` is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlphaDoc", into = "AlphaDoc")]
pub struct VerblunskyCoeffs {
    alpha: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct AlphaDoc {
    alpha: Vec<f64>,
}

impl TryFrom<AlphaDoc> for VerblunskyCoeffs {
    type Error = Error;
    fn try_from(doc: AlphaDoc) -> Result<Self> {
        VerblunskyCoeffs::new(doc.alpha)
    }
}

impl From<VerblunskyCoeffs> for AlphaDoc {
    fn from(v: VerblunskyCoeffs) -> Self {
        AlphaDoc { alpha: v.alpha }
    }
}

impl VerblunskyCoeffs {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if let Some((n, a)) = alpha.iter().enumerate().find(|(_, a)| !(a.abs() < 1.0)) {
            return Err(Error::Domain(format!("alpha_{n} = {a} is not in (-1, 1)")));
        }
        Ok(Self { alpha })
    }

    pub fn zero() -> Self {
        Self { alpha: vec![] }
    }

    /// `alpha_n` for `n >= -1`.
    pub fn get(&self, n: i64) -> f64 {
        match n {
            -1 => -1.0,
            n if n < -1 => panic!("Verblunsky index {n} below -1"),
            n => self.alpha.get(n as usize).copied().unwrap_or(0.0),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Largest `|alpha_n - other_n|` over both supports.
    pub fn max_difference(&self, other: &VerblunskyCoeffs) -> f64 {
        let n = self.len().max(other.len()) as i64;
        (0..n)
            .map(|k| (self.get(k) - other.get(k)).abs())
            .fold(0.0, f64::max)
    }
}

/// Trigonometric moments `c_k = int e^{-ik theta} d mu` in the JSON layout
/// `{"moments_re": [...], "moments_im": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub moments_re: Vec<f64>,
    pub moments_im: Vec<f64>,
}

impl Moments {
    pub fn from_complex(c: &[Complex64]) -> Self {
        Self {
            moments_re: c.iter().map(|z| z.re).collect(),
            moments_im: c.iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_complex(&self) -> Result<Vec<Complex64>> {
        if self.moments_re.len() != self.moments_im.len() {
            return Err(Error::Contract("moment arrays differ in length".into()));
        }
        Ok(self
            .moments_re
            .iter()
            .zip(&self.moments_im)
            .map(|(r, i)| Complex64::new(*r, *i))
            .collect())
    }
}

/// A conjugation-invariant measure `w dtheta / 2pi` sampled on the standard circle grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleMeasure {
    pub weights: Vec<f64>,
}

impl CircleMeasure {
    /// Wraps samples, rescaling them to total mass 1.
    pub fn normalized(mut weights: Vec<f64>) -> Result<Self> {
        let g = weights.len();
        if g < 4 || !g.is_power_of_two() {
            return Err(Error::Domain(format!("grid size {g} must be a power of two >= 4")));
        }
        if let Some((j, w)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::Domain(format!("weight sample {j} = {w} is not a finite non-negative number")));
        }
        let mass = weights.iter().sum::<f64>() / g as f64;
        if !(mass > 0.0) {
            return Err(Error::DegenerateMeasure("weight has zero mass".into()));
        }
        weights.iter_mut().for_each(|w| *w /= mass);
        Ok(Self { weights })
    }

    pub fn grid(&self) -> usize {
        self.weights.len()
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + Clone {
        circle_grid(self.weights.len())
    }

    /// Trapezoid moments `c_0 .. c_m`.
    pub fn moments(&self, m: usize) -> Vec<Complex64> {
        circle_moments(&self.weights, m)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "theta,w")?;
        for (t, w) in self.angles().zip(&self.weights) {
            writeln!(out, "{t:e},{w:e}")?;
        }
        Ok(())
    }
}

/// `c_k = (1/G) sum_j w_j e^{-i k theta_j}` for `k = 0..=m` on the standard grid.
pub fn circle_moments(weights: &[f64], m: usize) -> Vec<Complex64> {
    let g = weights.len();
    let mut buf: Vec<Complex64> = weights.iter().map(|w| Complex64::new(*w, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(g).process(&mut buf);
    (0..=m)
        .map(|k| {
            let shift = Complex64::from_polar(1.0, -std::f64::consts::PI * k as f64 / g as f64);
            buf[k % g] * shift / g as f64
        })
        .collect()
}

/// Monic `Phi_n(z)` and reversed `Phi*_n(z)` for `n = 0..=n_max`.
pub fn szego_recursion(
    alpha: &VerblunskyCoeffs,
    z: Complex64,
    n_max: usize,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut phi = vec![Complex64::new(1.0, 0.0)];
    let mut star = vec![Complex64::new(1.0, 0.0)];
    for n in 0..n_max {
        let a = alpha.get(n as i64);
        let (p, s) = (phi[n], star[n]);
        phi.push(z * p - a * s);
        star.push(s - a * z * p);
    }
    (phi, star)
}

/// Levinson recursion on the Toeplitz moment matrix, producing `count` coefficients.
///
/// Needs `c_0 .. c_count`. Fails with a degenerate-measure error when some
/// `1 - |alpha_n|^2` drops below `1e-12`.
pub fn verblunsky_from_moments(c: &[Complex64], count: usize) -> Result<VerblunskyCoeffs> {
    if c.len() < count + 1 {
        return Err(Error::Contract(format!(
            "{count} coefficients need {} moments, got {}",
            count + 1,
            c.len()
        )));
    }
    if !(c[0].re > 0.0) {
        return Err(Error::DegenerateMeasure("c_0 must be positive".into()));
    }
    // integral of z^k against the measure
    let z_moment = |k: usize| c[k].conj();
    let mut phi = vec![Complex64::new(1.0, 0.0)];
    let mut norm = c[0].re;
    let mut alpha = Vec::with_capacity(count);
    for _ in 0..count {
        let inner: Complex64 = phi.iter().enumerate().map(|(k, p)| p * z_moment(k + 1)).sum();
        let alpha_bar = inner / norm;
        let a = alpha_bar.conj();
        let gap = 1.0 - a.norm_sqr();
        if gap < 1e-12 {
            return Err(Error::DegenerateMeasure(format!(
                "1 - |alpha_{}|^2 = {gap:e}: measure is supported on finitely many points",
                alpha.len()
            )));
        }
        if a.im.abs() > 1e-10 * a.norm().max(1.0) {
            return Err(Error::Domain(format!(
                "alpha_{} = {a} is not real; the measure is not conjugation invariant",
                alpha.len()
            )));
        }
        let n = phi.len();
        let mut next = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 0..n {
            next[k + 1] += phi[k];
            // Phi*_n has coefficients conj(phi_{n-1-k}) at z^k
            next[k] -= alpha_bar * phi[n - 1 - k].conj();
        }
        phi = next;
        norm *= gap;
        alpha.push(a.re);
    }
    VerblunskyCoeffs::new(alpha)
}

/// Bernstein-Szego weight `prod(1 - alpha_j^2) / |Phi*_K(e^{i theta})|^2` on the standard grid.
pub fn weight_from_verblunsky(alpha: &VerblunskyCoeffs, grid: usize) -> Vec<f64> {
    let k = alpha.len();
    let numerator: f64 = alpha.values().iter().map(|a| 1.0 - a * a).product();
    circle_grid(grid)
        .map(|theta| {
            let (_, star) = szego_recursion(alpha, Complex64::from_polar(1.0, theta), k);
            numerator / star[k].norm_sqr()
        })
        .collect()
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn moments_roundtrip(values in prop::collection::vec(-0.7f64..0.7, 1..6)) {
            let alpha = VerblunskyCoeffs::new(values.clone()).unwrap();
            let w = weight_from_verblunsky(&alpha, 1 << 14);
            let back = verblunsky_from_moments(&circle_moments(&w, 10), 10).unwrap();
            for n in 0..10i64 {
                prop_assert!((back.get(n) - alpha.get(n)).abs() < 1e-10);
            }
        }

        #[test]
        fn weight_positive_and_even(values in prop::collection::vec(-0.95f64..0.95, 0..8)) {
            let alpha = VerblunskyCoeffs::new(values).unwrap();
            let g = 128;
            let w = weight_from_verblunsky(&alpha, g);
            prop_assert!(w.iter().all(|v| *v > 0.0));
            for j in 0..g {
                // theta_{G-1-j} = 2 pi - theta_j
                let (a, b) = (w[j], w[g - 1 - j]);
                prop_assert!((a - b).abs() <= 1e-10 * a.max(b));
            }
        }
    }
}
