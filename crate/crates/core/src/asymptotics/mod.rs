//! Discrete asymptotic integration.
//!
//! [`diagonal`] holds the generic machinery (Harris–Lutz transform and the
//! Levinson contraction solver). [`hyperbolic_solutions`] and [`edge_solutions`]
//! apply it to the Jacobi recurrence away from and at the band edges.

pub mod diagonal;
mod edge;
mod hyperbolic;

use serde::Serialize;

pub use diagonal::{
    diagonalized_solve, harris_lutz_q, harris_lutz_residual, levinson_solve, Dichotomy,
    DiagonalSystem, DiagonalizableSystem, DiagonalizedSolution, LevinsonSolution,
};
pub use edge::{edge_solutions, EdgePair};
pub use hyperbolic::{hyperbolic_solutions, HyperbolicPair};

use crate::jacobi::JacobiMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionKind {
    HyperbolicPlus,
    HyperbolicMinus,
    EdgeSmall,
    EdgeBig,
}

/// A solution of `J psi = E psi` on `k = 0 ..= K` with its asymptotic data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionFamily {
    pub energy: f64,
    pub kind: SolutionKind,
    /// `psi(0), psi(1), ..., psi(K)`.
    pub values: Vec<f64>,
    /// Growth base `beta` with `|beta| > 1`; hyperbolic kinds only.
    pub beta: Option<f64>,
    pub leading_constant: Option<f64>,
    /// Relative deviation from the leading behavior at each site.
    pub errors: Vec<f64>,
    /// First index from which `(+-1)^k psi(k) > 0` throughout the window.
    pub sign_threshold: Option<usize>,
}

impl SolutionFamily {
    pub fn window(&self) -> usize {
        self.values.len() - 1
    }
}

/// Per-site relative residual of `a_{k-1} u_{k-1} + b_k u_k + a_k u_{k+1} = E u_k`.
pub fn site_residuals(j: &JacobiMatrix, e: f64, u: &[f64]) -> Vec<f64> {
    (1..u.len().saturating_sub(1))
        .map(|n| {
            let lhs = j.a(n - 1) * u[n - 1] + j.b(n) * u[n] + j.a(n) * u[n + 1];
            let scale = u[n - 1].abs().max(u[n].abs()).max(u[n + 1].abs());
            if scale == 0.0 {
                0.0
            } else {
                (lhs - e * u[n]).abs() / scale
            }
        })
        .collect()
}

pub(crate) fn sign_threshold(values: &[f64], sign: f64) -> Option<usize> {
    let mut start = None;
    let mut s = 1.0;
    for (k, v) in values.iter().enumerate() {
        if s * v > 0.0 {
            start.get_or_insert(k);
        } else {
            start = None;
        }
        s *= sign;
    }
    start
}

/// `eta_n = sum_{k >= n} beta_k gamma_k` for sequences indexed from 1.
pub fn tail_product_sums(beta: &[f64], gamma: &[f64]) -> Vec<f64> {
    let n = beta.len().min(gamma.len());
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    for k in (0..n).rev() {
        acc += beta[k] * gamma[k];
        out[k] = acc;
    }
    out
}

/// `sum_{l=1}^{k-1} beta^{2(l-k)} gamma(l)` for `k = 1..=len`, indexed from 1.
pub fn geometric_convolution(gamma: &[f64], beta: f64) -> Vec<f64> {
    let r = beta.powi(-2);
    let mut out = Vec::with_capacity(gamma.len());
    let mut acc = 0.0;
    for g in gamma {
        out.push(acc);
        acc = r * (acc + g);
    }
    out
}

/// `l^2_s` norm (not squared) of a sequence indexed from 1.
pub fn l2s_norm(x: &[f64], s: f64) -> f64 {
    x.iter()
        .enumerate()
        .map(|(k, v)| ((k + 1) as f64).powf(s) * v * v)
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn sums_by_hand() {
        assert_eq!(tail_product_sums(&[1.0, 2.0, 3.0], &[1.0, 1.0, 2.0]), vec![9.0, 8.0, 6.0]);
        let c = geometric_convolution(&[1.0, 1.0, 1.0], 2.0);
        assert_eq!(c[0], 0.0);
        assert_abs_diff_eq!(c[1], 0.25);
        assert_abs_diff_eq!(c[2], 0.25 * 0.25 + 0.25);
    }

    #[test]
    fn sign_threshold_cases() {
        assert_eq!(sign_threshold(&[-1.0, 0.0, 2.0, 3.0], 1.0), Some(2));
        assert_eq!(sign_threshold(&[1.0, -1.0, 1.0, -1.0], -1.0), Some(0));
        assert_eq!(sign_threshold(&[1.0, -1.0], 1.0), None);
    }

    // Schur-test bound for the kernel sqrt(k/l) beta^{2(l-k)}, l < k <= n
    fn schur_bound(n: usize, beta: f64) -> f64 {
        let h = |l: usize, k: usize| ((k as f64) / (l as f64)).sqrt() * beta.powi(2 * (l as i32 - k as i32));
        let rows = (1..=n).map(|k| (1..k).map(|l| h(l, k)).sum::<f64>()).fold(0.0, f64::max);
        let cols = (1..=n).map(|l| (l + 1..=n).map(|k| h(l, k)).sum::<f64>()).fold(0.0, f64::max);
        (rows * cols).sqrt()
    }

    #[test]
    fn convolution_bound_is_window_independent() {
        let b = [schur_bound(64, 1.3), schur_bound(128, 1.3), schur_bound(256, 1.3)];
        assert!(b[2] <= b[1] * 1.001 && b[1] <= b[0] * 1.01, "{b:?}");
    }

    proptest! {
        #[test]
        fn sum_products_bound(
            beta in prop::collection::vec(-1.0f64..1.0, 1..80),
            gamma in prop::collection::vec(-1.0f64..1.0, 1..80),
            s in 1.0f64..2.0,
            decay in 0.5f64..2.0,
        ) {
            let scale = |x: &[f64]| -> Vec<f64> {
                x.iter().enumerate().map(|(k, v)| v / ((k + 1) as f64).powf(decay)).collect()
            };
            let (b, g) = (scale(&beta), scale(&gamma));
            let eta = tail_product_sums(&b, &g);
            prop_assert!(l2s_norm(&eta, s) <= l2s_norm(&b, s) * l2s_norm(&g, s) * (1.0 + 1e-12));
        }

        #[test]
        fn convolution_is_bounded_on_l2_1(
            gamma in prop::collection::vec(-1.0f64..1.0, 256),
            beta in 1.1f64..3.0,
        ) {
            let bound = schur_bound(256, beta);
            for n in [64usize, 128, 256] {
                let out = geometric_convolution(&gamma[..n], beta);
                prop_assert!(l2s_norm(&out, 1.0) <= bound * l2s_norm(&gamma[..n], 1.0) * (1.0 + 1e-12));
            }
        }
    }
}
