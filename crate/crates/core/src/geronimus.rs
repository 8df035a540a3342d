//! Direct and inverse Geronimus relations between Verblunsky coefficients and
//! Jacobi parameters, in the four Szego-map variants.
//!
//! The inverse relations read `alpha` off the ratio sequences
//!
//! ```text
//! A_n = -P_{n+1}(-2)/P_n(-2)    B_n = P_{n+1}(2)/P_n(2)
//! C_n = -F_{n+1}(-2)/F_n(-2)    D_n = F_{n+1}(2)/F_n(2)
//! ```
//!
//! with `F_n = m P_n + Q_n`. Every ratio is positive when the spectrum lies
//! in `[-2, 2]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{jost_solution, Edge, EdgeValue, JacobiMatrix};
use crate::opuc::VerblunskyCoeffs;
use crate::szego_maps::{m_values_from_alpha, Variant};
use num_complex::Complex64;

/// Jacobi parameters of the image of `alpha` under the given variant.
pub fn direct_geronimus(alpha: &VerblunskyCoeffs, variant: Variant) -> Result<JacobiMatrix> {
    let al = |n: i64| if n < -1 { 0.0 } else { alpha.get(n) };
    let count = alpha.len() / 2 + 3;
    let mut a = Vec::with_capacity(count);
    let mut b = Vec::with_capacity(count);
    for n in 0..count as i64 {
        let (a2, bn) = match variant {
            Variant::Even => (
                (1.0 - al(2 * n - 1)) * (1.0 - al(2 * n).powi(2)) * (1.0 + al(2 * n + 1)),
                al(2 * n) * (1.0 - al(2 * n - 1)) - al(2 * n - 2) * (1.0 + al(2 * n - 1)),
            ),
            Variant::Odd => (
                (1.0 + al(2 * n + 1)) * (1.0 - al(2 * n + 2).powi(2)) * (1.0 - al(2 * n + 3)),
                -al(2 * n + 2) * (1.0 + al(2 * n + 1)) + al(2 * n) * (1.0 - al(2 * n + 1)),
            ),
            Variant::Plus | Variant::Minus => {
                let s = if variant == Variant::Plus { 1.0 } else { -1.0 };
                (
                    (1.0 + s * al(2 * n)) * (1.0 - al(2 * n + 1).powi(2)) * (1.0 - s * al(2 * n + 2)),
                    -s * al(2 * n + 1) * (1.0 + s * al(2 * n))
                        + s * al(2 * n - 1) * (1.0 - s * al(2 * n)),
                )
            }
        };
        if !(a2 > 0.0) {
            return Err(Error::Domain(format!("a_{}^2 = {a2} is not positive", n + 1)));
        }
        a.push(a2.sqrt());
        b.push(bn);
    }
    JacobiMatrix::new(a, b)
}

/// Ratio sequences at the two edges; `C` and `D` only where `m` is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSeqs {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Option<Vec<f64>>,
    pub d: Option<Vec<f64>>,
}

/// `P_{n+1}(x)/P_n(x)` for `n = 0..n_max`, propagated in ratio form.
fn p_ratios(j: &JacobiMatrix, x: f64, n_max: usize) -> Vec<f64> {
    let mut r = Vec::with_capacity(n_max);
    let mut prev = x - j.b(1);
    r.push(prev);
    for n in 1..n_max {
        prev = (x - j.b(n + 1)) - j.a(n) * j.a(n) / prev;
        r.push(prev);
    }
    r
}

/// `F_{n+1}(x)/F_n(x)` at an edge, from the exact bounded edge solution.
///
/// `F_n` is `a_1 ... a_n` times the Weyl solution, which is `f_{n+1}/f_0`
/// for the Jost solution `f` with tail `(+-1)^n`.
fn f_ratios(j: &JacobiMatrix, edge: Edge, n_max: usize) -> Vec<f64> {
    let f = jost_solution(j, Complex64::new(edge.sign(), 0.0));
    (0..n_max)
        .map(|n| j.a(n + 1) * f.at(n + 2).re / f.at(n + 1).re)
        .collect()
}

fn check_positive(name: &str, values: &[f64]) -> Result<()> {
    if let Some((n, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::Precondition(format!(
            "{name}_{n} = {v} is not positive; the spectrum is not inside [-2, 2]"
        )));
    }
    Ok(())
}

/// Builds `A, B` always and `C` (resp. `D`) when `m(-2)` (resp. `m(2)`) is finite.
pub fn ratio_sequences(
    j: &JacobiMatrix,
    edges: (&EdgeValue, &EdgeValue),
    n_max: usize,
) -> Result<RatioSeqs> {
    let (minus, plus) = edges;
    if minus.edge != Edge::Minus || plus.edge != Edge::Plus {
        return Err(Error::Contract("edge values must be given as (m(-2), m(2))".into()));
    }
    let a: Vec<f64> = p_ratios(j, -2.0, n_max).into_iter().map(|r| -r).collect();
    let b = p_ratios(j, 2.0, n_max);
    check_positive("A", &a)?;
    check_positive("B", &b)?;
    let c = if minus.is_finite() {
        let c: Vec<f64> = f_ratios(j, Edge::Minus, n_max).into_iter().map(|r| -r).collect();
        check_positive("C", &c)?;
        Some(c)
    } else {
        None
    };
    let d = if plus.is_finite() {
        let d = f_ratios(j, Edge::Plus, n_max);
        check_positive("D", &d)?;
        Some(d)
    } else {
        None
    };
    Ok(RatioSeqs { a, b, c, d })
}

/// Outcome of an inverse Geronimus computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseGeronimus {
    pub variant: Variant,
    pub alpha: VerblunskyCoeffs,
    /// The boundary value the formulas reproduce at `n = 0`; should be `-1`.
    /// Variant `o` has no such row.
    pub alpha_minus_one: Option<f64>,
    /// For variant `o`: difference between `alpha_0` from the edge m-values
    /// and from `b_1`.
    pub alpha0_cross_check: Option<f64>,
    pub ratios: RatioSeqs,
}

fn quotient(num: f64, den: f64, what: &str) -> Result<f64> {
    if den.abs() < 1e-12 {
        return Err(Error::DegenerateRatio(format!("{what}: denominator {den:e}")));
    }
    Ok(num / den)
}

/// Recovers `alpha` from a matrix in the range of the chosen variant.
pub fn inverse_geronimus(
    j: &JacobiMatrix,
    variant: Variant,
    edges: (&EdgeValue, &EdgeValue),
) -> Result<InverseGeronimus> {
    let (minus, plus) = edges;
    let needs_minus = matches!(variant, Variant::Odd | Variant::Minus);
    let needs_plus = matches!(variant, Variant::Odd | Variant::Plus);
    if (needs_minus && !minus.is_finite()) || (needs_plus && !plus.is_finite()) {
        return Err(Error::Contract(format!(
            "variant {variant} needs finite edge values where m is infinite"
        )));
    }
    let pairs = j.support() + 4;
    let ratios = ratio_sequences(j, edges, pairs)?;
    let count = 2 * pairs;
    let mut alpha = vec![0.0; count + 2];
    let mut alpha_minus_one = None;
    let mut alpha0_cross_check = None;
    let get = |v: &Option<Vec<f64>>| v.clone().expect("checked above");
    match variant {
        Variant::Even => {
            for n in 0..pairs {
                let (x, y) = (ratios.a[n], ratios.b[n]);
                alpha[2 * n] = quotient(x - y, x + y, "A - B over A + B")?;
                let odd = 1.0 - (x + y) / 2.0;
                if n == 0 {
                    alpha_minus_one = Some(odd);
                } else {
                    alpha[2 * n - 1] = odd;
                }
            }
        }
        Variant::Odd => {
            let (c, d) = (get(&ratios.c), get(&ratios.d));
            for n in 0..pairs {
                alpha[2 * n + 2] = -quotient(c[n] - d[n], c[n] + d[n], "C - D over C + D")?;
                alpha[2 * n + 1] = -(1.0 - (c[n] + d[n]) / 2.0);
            }
            let m_minus = minus.finite().expect("checked above");
            let m_plus = -plus.finite().expect("checked above");
            alpha[0] = quotient(m_plus - m_minus, m_plus + m_minus, "edge m-values")?;
            let from_b1 = quotient(j.b(1) + alpha[2] * (1.0 + alpha[1]), 1.0 - alpha[1], "b_1 row")?;
            alpha0_cross_check = Some(alpha[0] - from_b1);
        }
        Variant::Plus => {
            let d = get(&ratios.d);
            for n in 0..pairs {
                let x = ratios.a[n];
                alpha[2 * n + 1] = -quotient(x - d[n], x + d[n], "A - D over A + D")?;
                alpha[2 * n] = -(1.0 - (x + d[n]) / 2.0);
            }
            alpha_minus_one = Some(quotient(
                j.b(1) + alpha[1] * (1.0 + alpha[0]),
                1.0 - alpha[0],
                "b_1 row",
            )?);
        }
        Variant::Minus => {
            let c = get(&ratios.c);
            for n in 0..pairs {
                let y = ratios.b[n];
                alpha[2 * n + 1] = quotient(c[n] - y, c[n] + y, "C - B over C + B")?;
                alpha[2 * n] = 1.0 - (c[n] + y) / 2.0;
            }
            alpha_minus_one = Some(quotient(
                alpha[1] * (1.0 - alpha[0]) - j.b(1),
                1.0 + alpha[0],
                "b_1 row",
            )?);
        }
    }
    alpha.truncate(count);
    while alpha.last().is_some_and(|a| a.abs() <= 1e-15) {
        alpha.pop();
    }
    Ok(InverseGeronimus {
        variant,
        alpha: VerblunskyCoeffs::new(alpha)?,
        alpha_minus_one,
        alpha0_cross_check,
        ratios,
    })
}

/// Edge values of `direct_geronimus(alpha, variant)` implied by `alpha` alone,
/// as `(m(-2), m(2))` with infinite edges marked.
pub fn predicted_edges(alpha: &VerblunskyCoeffs, variant: Variant) -> (EdgeValue, EdgeValue) {
    use crate::jacobi::EdgeLimit::{Finite, Infinite};
    let (minus, plus) = match variant {
        Variant::Even => (None, None),
        v => m_values_from_alpha(alpha, v).expect("variant has edge values"),
    };
    (
        EdgeValue::closed_form(Edge::Minus, minus.map_or(Infinite, Finite)),
        EdgeValue::closed_form(Edge::Plus, plus.map_or(Infinite, |p| Finite(-p))),
    )
}
