//! Sequence containers, weighted `l^2_s` norms, tail sums and the Fourier-side
//! `H^{1/2}` seminorm.
//!
//! Sequences are finite windows over an integer index set. Beyond the stored
//! window a sequence either vanishes (`Tail::Zero`) or continues with the
//! value of the free Jacobi matrix (`Tail::Free`: 1 for off-diagonal
//! sequences, 0 for diagonal ones).

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a [`RealSequence`] continues past its stored window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Zero,
    Free,
}

/// A finite window of a real sequence starting at index `offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealSequence {
    pub offset: i64,
    pub values: Vec<f64>,
    pub tail: Tail,
}

impl RealSequence {
    pub fn new(offset: i64, values: Vec<f64>, tail: Tail) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sequence entry {bad}")));
        }
        Ok(Self {
            offset,
            values,
            tail,
        })
    }

    pub fn zero_tail(offset: i64, values: Vec<f64>) -> Result<Self> {
        Self::new(offset, values, Tail::Zero)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index one past the last stored entry.
    pub fn end(&self) -> i64 {
        self.offset + self.values.len() as i64
    }

    /// Stored value at `n`, or `None` outside the window.
    pub fn get(&self, n: i64) -> Option<f64> {
        if n < self.offset {
            return None;
        }
        self.values.get((n - self.offset) as usize).copied()
    }

    /// Value at `n`, using `continuation` past the stored window.
    pub fn get_or(&self, n: i64, continuation: f64) -> f64 {
        self.get(n).unwrap_or(continuation)
    }

    /// `(n, value)` pairs over the stored window.
    pub fn indexed(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.offset + i as i64, v))
    }

    /// Writes `n,value` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "n,value")?;
        for (n, v) in self.indexed() {
            writeln!(out, "{n},{v:e}")?;
        }
        Ok(())
    }
}

/// Fourier coefficients `f^(n)` for `n` in `[-M, M]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierCoeffs {
    max_index: usize,
    coeffs: Vec<Complex64>,
}

impl FourierCoeffs {
    pub fn zeros(max_index: usize) -> Self {
        Self {
            max_index,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * max_index + 1],
        }
    }

    /// Builds coefficients from a closure evaluated at every `n` in `[-M, M]`.
    pub fn from_fn(max_index: usize, f: impl Fn(i64) -> Complex64) -> Self {
        let m = max_index as i64;
        Self {
            max_index,
            coeffs: (-m..=m).map(f).collect(),
        }
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn get(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.max_index {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(n + self.max_index as i64) as usize]
    }

    pub fn set(&mut self, n: i64, value: Complex64) {
        assert!(n.unsigned_abs() as usize <= self.max_index, "index out of range");
        self.coeffs[(n + self.max_index as i64) as usize] = value;
    }

    /// Coefficients with `n` replaced by `-n`.
    pub fn reflected(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        Self {
            max_index: self.max_index,
            coeffs,
        }
    }

    /// Same coefficients restricted to `|n| <= cutoff`.
    pub fn truncated(&self, cutoff: usize) -> Self {
        let cutoff = cutoff.min(self.max_index);
        Self::from_fn(cutoff, |n| self.get(n))
    }

    /// Samples of `sum_n f^(n) e^{i n theta}` on the standard circle grid of size `grid`.
    pub fn synthesize(&self, grid: usize) -> Vec<f64> {
        circle_grid(grid)
            .map(|theta| {
                let m = self.max_index as i64;
                (-m..=m)
                    .map(|n| self.get(n) * Complex64::from_polar(1.0, n as f64 * theta))
                    .sum::<Complex64>()
                    .re
            })
            .collect()
    }
}

/// Angles `theta_j = 2 pi (j + 1/2) / G` of the standard circle grid.
///
/// The half-step shift keeps `0` and `pi` off the grid, so the Jacobian of
/// `x = 2 cos(theta)` never vanishes at a sample.
pub fn circle_grid(grid: usize) -> impl Iterator<Item = f64> + Clone {
    (0..grid).map(move |j| 2.0 * PI * (j as f64 + 0.5) / grid as f64)
}

/// `lambda_n = -sum_{k > n} b_k` and `kappa_n = -sum_{k > n} (a_k^2 - 1)` for `n >= 0`.
///
/// `a` and `b` carry the Jacobi parameters indexed from 1; both sums are exact
/// because the parameters coincide with the free matrix past their windows.
pub fn tail_sums(b: &RealSequence, a: &RealSequence) -> Result<(RealSequence, RealSequence)> {
    if a.tail != Tail::Free {
        return Err(Error::Contract(
            "off-diagonal sequence must continue as the free matrix".into(),
        ));
    }
    if let Some((n, v)) = a.indexed().find(|&(_, v)| v <= 0.0) {
        return Err(Error::Domain(format!("a_{n} = {v} is not positive")));
    }
    let last = a.end().max(b.end()).max(1);
    let count = (last - 1).max(0) as usize;
    let mut lambda = vec![0.0; count];
    let mut kappa = vec![0.0; count];
    let (mut sb, mut sa) = (0.0, 0.0);
    // lambda_n needs k from n+1; walk backwards from the last stored index.
    for n in (0..count as i64).rev() {
        let k = n + 1;
        sb += b.get_or(k, 0.0);
        let ak = a.get_or(k, 1.0);
        sa += ak * ak - 1.0;
        lambda[n as usize] = -sb;
        kappa[n as usize] = -sa;
    }
    Ok((
        RealSequence::zero_tail(0, lambda)?,
        RealSequence::zero_tail(0, kappa)?,
    ))
}

/// Squared `l^2_s` norm `sum_n |n|^s |beta_n|^2` over the stored window.
pub fn weighted_norm(seq: &RealSequence, s: f64) -> Result<f64> {
    weighted_norm_iter(seq.indexed(), s)
}

pub(crate) fn weighted_norm_iter(entries: impl Iterator<Item = (i64, f64)>, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("weight exponent s = {s} must be finite and >= 0")));
    }
    Ok(entries
        .map(|(n, v)| (n.unsigned_abs() as f64).powf(s) * v * v)
        .sum())
}

/// Squared homogeneous `H^{1/2}` seminorm `sum_n |n| |f^(n)|^2`.
pub fn sobolev_half_norm(f: &FourierCoeffs) -> f64 {
    let m = f.max_index() as i64;
    (-m..=m)
        .map(|n| n.unsigned_abs() as f64 * f.get(n).norm_sqr())
        .sum()
}

/// `H^{1/2}` partial norms of `f` restricted to `|n| <= cutoff` for each cutoff.
pub fn sobolev_partial_norms(f: &FourierCoeffs, cutoffs: &[usize]) -> Vec<(usize, f64)> {
    cutoffs
        .iter()
        .map(|&c| (c, sobolev_half_norm(&f.truncated(c))))
        .collect()
}

/// Discrete Fourier coefficients of `log w` from samples on the standard circle grid.
///
/// Returns `h^(n)` for `|n| <= G/2 - 1`, where `h = log w`.
pub fn log_weight_fourier(samples: &[f64]) -> Result<FourierCoeffs> {
    let g = samples.len();
    if g < 2 || !g.is_power_of_two() {
        return Err(Error::Domain(format!("grid size {g} must be a power of two >= 2")));
    }
    if let Some((j, w)) = samples.iter().enumerate().find(|(_, w)| !(**w > 0.0)) {
        return Err(Error::Domain(format!("weight sample {j} = {w} is not positive")));
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|w| Complex64::new(w.ln(), 0.0)).collect();
    FftPlanner::new().plan_fft_forward(g).process(&mut buf);
    let half = g / 2 - 1;
    let scale = 1.0 / g as f64;
    Ok(FourierCoeffs::from_fn(half, |n| {
        let idx = n.rem_euclid(g as i64) as usize;
        // grid offset of half a step contributes exp(-i n pi / G)
        buf[idx] * scale * Complex64::from_polar(1.0, -PI * n as f64 / g as f64)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn free_a(values: Vec<f64>) -> RealSequence {
        RealSequence::new(1, values, Tail::Free).unwrap()
    }

    #[test]
    fn tail_sums_free_matrix_vanish() {
        let (l, k) = tail_sums(&RealSequence::new(1, vec![], Tail::Free).unwrap(), &free_a(vec![])).unwrap();
        assert!(l.values.iter().chain(&k.values).all(|v| *v == 0.0));
    }

    #[test]
    fn tail_sums_single_off_diagonal() {
        let (l, k) = tail_sums(
            &RealSequence::new(1, vec![], Tail::Free).unwrap(),
            &free_a(vec![2f64.sqrt()]),
        )
        .unwrap();
        assert_abs_diff_eq!(k.get_or(0, 0.0), -1.0, epsilon = 1e-15);
        for n in 1..5 {
            assert_eq!(k.get_or(n, 0.0), 0.0);
            assert_eq!(l.get_or(n, 0.0), 0.0);
        }
    }

    #[test]
    fn tail_sums_two_diagonal_terms() {
        let b = RealSequence::zero_tail(1, vec![1.0, -1.0]).unwrap();
        let (l, _) = tail_sums(&b, &free_a(vec![])).unwrap();
        assert_eq!(l.get_or(0, 0.0), 0.0);
        assert_eq!(l.get_or(1, 0.0), 1.0);
        assert_eq!(l.get_or(2, 0.0), 0.0);
        assert_eq!(l.get_or(7, 0.0), 0.0);
    }

    #[test]
    fn tail_sums_rejects_nonpositive_a() {
        let err = tail_sums(
            &RealSequence::zero_tail(1, vec![]).unwrap(),
            &free_a(vec![1.0, 0.0]),
        );
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn weighted_norm_basics() {
        let e1 = RealSequence::zero_tail(0, vec![0.0, 1.0]).unwrap();
        assert_eq!(weighted_norm(&e1, 1.0).unwrap(), 1.0);
        let s = RealSequence::zero_tail(0, vec![3.0, 4.0]).unwrap();
        assert_eq!(weighted_norm(&s, 0.0).unwrap(), 25.0);
        // index 0 carries no weight once s > 0
        assert_eq!(weighted_norm(&s, 2.0).unwrap(), 16.0);
        assert!(matches!(weighted_norm(&s, -0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn weighted_norm_approaches_basel() {
        // sum n * n^{-3} = sum n^{-2}; tail beyond N lies in [1/(N+1), 1/N]
        let n_max = 4000;
        let seq = RealSequence::zero_tail(1, (1..=n_max).map(|n| (n as f64).powf(-1.5)).collect())
            .unwrap();
        let partial = weighted_norm(&seq, 1.0).unwrap();
        let basel = PI * PI / 6.0;
        assert!(basel - partial >= 1.0 / (n_max as f64 + 1.0) - 1e-12);
        assert!(basel - partial <= 1.0 / n_max as f64 + 1e-12);
    }

    #[test]
    fn sobolev_half_norm_examples() {
        assert_eq!(sobolev_half_norm(&FourierCoeffs::zeros(5)), 0.0);
        let t = 0.3;
        let f = FourierCoeffs::from_fn(4, |n| {
            Complex64::new(if n.abs() == 1 { t } else { 0.0 }, 0.0)
        });
        assert_abs_diff_eq!(sobolev_half_norm(&f), 2.0 * t * t, epsilon = 1e-15);

        let m = 2000;
        let f = FourierCoeffs::from_fn(m, |n| {
            if n == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new((n.unsigned_abs() as f64).powf(-1.5), 0.0)
            }
        });
        let partial: f64 = (1..=m).map(|n| 2.0 / (n as f64 * n as f64)).sum();
        assert_abs_diff_eq!(sobolev_half_norm(&f), partial, epsilon = 1e-12);
        assert!((sobolev_half_norm(&f) - PI * PI / 3.0).abs() < 2.0 / m as f64);
    }

    #[test]
    fn log_fourier_of_constant_weight_vanishes() {
        let f = log_weight_fourier(&vec![1.0; 64]).unwrap();
        assert!((-31..=31).all(|n| f.get(n).norm() < 1e-15));
    }

    #[test]
    fn log_fourier_of_exponential_cosine() {
        let t = 0.7;
        let w: Vec<f64> = circle_grid(256).map(|th| (2.0 * t * th.cos()).exp()).collect();
        let f = log_weight_fourier(&w).unwrap();
        assert_abs_diff_eq!(f.get(1).re, t, epsilon = 1e-13);
        assert_abs_diff_eq!(f.get(-1).re, t, epsilon = 1e-13);
        for n in [0, 2, 3, -5, 40] {
            assert!(f.get(n).norm() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn log_fourier_of_vanishing_cosine_weight() {
        // log(1 + cos) = log|1 + e^{i theta}|^2 - log 2; the singular point
        // theta = pi is never sampled; the log singularity limits accuracy to O(log G / G).
        let w: Vec<f64> = circle_grid(1 << 16).map(|th| 1.0 + th.cos()).collect();
        let f = log_weight_fourier(&w).unwrap();
        assert_abs_diff_eq!(f.get(0).re, -(2f64.ln()), epsilon = 1e-4);
        for n in 1..=32i64 {
            let expected = if n % 2 == 1 { 1.0 } else { -1.0 } / n as f64;
            assert_abs_diff_eq!(f.get(n).re, expected, epsilon = 1e-4);
            assert!(f.get(n).im.abs() < 1e-12);
        }
    }

    #[test]
    fn log_fourier_rejects_bad_input() {
        assert!(matches!(log_weight_fourier(&[1.0, 1.0, 1.0]), Err(Error::Domain(_))));
        assert!(matches!(log_weight_fourier(&[1.0, 0.0, 1.0, 1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn csv_export() {
        let s = RealSequence::zero_tail(2, vec![1.5, -2.0]).unwrap();
        let mut out = Vec::new();
        s.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("n,value\n2,"));
    }

    #[test]
    fn json_shape() {
        let s = RealSequence::new(1, vec![1.0], Tail::Free).unwrap();
        let j = serde_json::to_value(&s).unwrap();
        assert_eq!(j["tail"], "free");
        assert_eq!(j["offset"], 1);
    }
}
