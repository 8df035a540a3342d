//! The four Szego maps between conjugation-invariant circle measures and
//! measures on `[-2, 2]`.
//!
//! With `x = 2 cos(theta)` and circle weight `w`, the line densities are
//!
//! ```text
//! e:  v = w / (pi sqrt(4 - x^2))
//! o:  v = (c^2 / pi) sqrt(4 - x^2) w
//! +-: v = (c_+-^2 / pi) sqrt((2 -+ x) / (2 +- x)) w
//! ```
//!
//! where `c` and `c_+-` are the normalization constants of the source measure.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::jacobi::{density, m_at_edge, Edge, JacobiMatrix, Quadrature};
use crate::opuc::{CircleMeasure, VerblunskyCoeffs};

/// Which Szego map (and matching Geronimus relation) is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "e")]
    Even,
    #[serde(rename = "o")]
    Odd,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Even, Variant::Odd, Variant::Plus, Variant::Minus];

    pub fn tag(self) -> &'static str {
        match self {
            Variant::Even => "e",
            Variant::Odd => "o",
            Variant::Plus => "+",
            Variant::Minus => "-",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" => Ok(Variant::Even),
            "o" => Ok(Variant::Odd),
            "+" | "plus" => Ok(Variant::Plus),
            "-" | "minus" => Ok(Variant::Minus),
            other => Err(Error::Domain(format!("unknown variant '{other}' (expected e, o, +, -)"))),
        }
    }
}

/// A density on `[-2, 2]` sampled at `x_j = 2 cos(pi (j + 1/2) / H)`.
///
/// These are exactly the images of the upper-half samples of a circle grid of
/// size `2H`, so no sample sits at `+-2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineMeasure {
    pub variant: Option<Variant>,
    pub density: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<Quadrature>,
}

/// Angles `pi (j + 1/2) / H` of the line grid.
pub fn line_angles(h: usize) -> impl Iterator<Item = f64> + Clone {
    (0..h).map(move |j| PI * (j as f64 + 0.5) / h as f64)
}

impl LineMeasure {
    pub fn from_density(density: Vec<f64>) -> Self {
        Self {
            variant: None,
            density,
            quadrature: None,
        }
    }

    /// Samples the absolutely continuous density of `J` on the line grid of size `h`.
    pub fn of_matrix(j: &JacobiMatrix, h: usize) -> Result<Self> {
        let density = line_angles(h)
            .map(|t| density(j, 2.0 * t.cos()))
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self::from_density(density))
    }

    pub fn nodes(&self) -> Vec<f64> {
        line_angles(self.density.len()).map(|t| 2.0 * t.cos()).collect()
    }

    /// `int v dx`, by the midpoint rule in the angle variable.
    pub fn mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        let h = self.density.len();
        line_angles(h)
            .zip(&self.density)
            .map(|(t, v)| g(2.0 * t.cos()) * v * 2.0 * t.sin())
            .sum::<f64>()
            * PI
            / h as f64
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,v")?;
        for (x, v) in self.nodes().iter().zip(&self.density) {
            writeln!(out, "{x:e},{v:e}")?;
        }
        Ok(())
    }
}

/// `(c, c_+, c_-)` with `c = 1/sqrt(2(1-alpha_0^2)(1-alpha_1))`, `c_+- = 1/sqrt(2(1 -+ alpha_0))`.
pub fn normalization_constants(alpha0: f64, alpha1: f64) -> Result<(f64, f64, f64)> {
    if !(alpha0.abs() < 1.0 && alpha1.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "alpha_0 = {alpha0}, alpha_1 = {alpha1} must lie in (-1, 1)"
        )));
    }
    let c = 1.0 / (2.0 * (1.0 - alpha0 * alpha0) * (1.0 - alpha1)).sqrt();
    let plus = 1.0 / (2.0 * (1.0 - alpha0)).sqrt();
    let minus = 1.0 / (2.0 * (1.0 + alpha0)).sqrt();
    Ok((c, plus, minus))
}

/// Jacobian factor of the variant at `x`, excluding the normalization constant.
fn jacobian(variant: Variant, x: f64) -> f64 {
    match variant {
        Variant::Even => 1.0 / (PI * (4.0 - x * x).sqrt()),
        Variant::Odd => (4.0 - x * x).sqrt() / PI,
        Variant::Plus => ((2.0 - x) / (2.0 + x)).sqrt() / PI,
        Variant::Minus => ((2.0 + x) / (2.0 - x)).sqrt() / PI,
    }
}

fn constant_sq(variant: Variant, alpha01: Option<(f64, f64)>) -> Result<f64> {
    if variant == Variant::Even {
        return Ok(1.0);
    }
    let (a0, a1) = alpha01.ok_or_else(|| {
        Error::Contract(format!("variant {variant} needs alpha_0 and alpha_1 of the source measure"))
    })?;
    let (c, plus, minus) = normalization_constants(a0, a1)?;
    Ok(match variant {
        Variant::Odd => c * c,
        Variant::Plus => plus * plus,
        Variant::Minus => minus * minus,
        Variant::Even => unreachable!(),
    })
}

/// Pushes a circle measure to the line through the chosen variant.
pub fn szego_forward(
    mu: &CircleMeasure,
    variant: Variant,
    alpha01: Option<(f64, f64)>,
) -> Result<LineMeasure> {
    let c2 = constant_sq(variant, alpha01)?;
    let h = mu.grid() / 2;
    let density = line_angles(h)
        .zip(&mu.weights)
        .map(|(t, w)| c2 * jacobian(variant, 2.0 * t.cos()) * w)
        .collect();
    Ok(LineMeasure {
        variant: Some(variant),
        density,
        quadrature: None,
    })
}

/// Recovers the even circle weight, normalized to probability.
///
/// The unknown normalization constant cancels in the final rescaling.
pub fn szego_inverse(nu: &LineMeasure, variant: Variant) -> Result<CircleMeasure> {
    let h = nu.density.len();
    if h < 2 || !h.is_power_of_two() {
        return Err(Error::Domain(format!("line grid size {h} must be a power of two >= 2")));
    }
    let upper: Vec<f64> = line_angles(h)
        .zip(&nu.density)
        .map(|(t, v)| v / jacobian(variant, 2.0 * t.cos()))
        .collect();
    let mut weights = upper.clone();
    weights.extend(upper.iter().rev());
    CircleMeasure::normalized(weights)
}

/// Variants whose range contains the spectral measure of `J`.
pub fn range_membership(j: &JacobiMatrix, tol: &Tolerances) -> Result<BTreeSet<Variant>> {
    let minus = m_at_edge(j, Edge::Minus, tol)?.is_finite();
    let plus = m_at_edge(j, Edge::Plus, tol)?.is_finite();
    let mut set = BTreeSet::from([Variant::Even]);
    if minus && plus {
        set.insert(Variant::Odd);
    }
    if plus {
        set.insert(Variant::Plus);
    }
    if minus {
        set.insert(Variant::Minus);
    }
    Ok(set)
}

/// Edge values of the image measure predicted from `alpha`.
///
/// Returns `(m(-2), -m(2))`, each `None` when that edge is not determined by
/// the variant.
pub fn m_values_from_alpha(
    alpha: &VerblunskyCoeffs,
    variant: Variant,
) -> Result<(Option<f64>, Option<f64>)> {
    let (a0, a1) = (alpha.get(0), alpha.get(1));
    match variant {
        Variant::Even => Err(Error::Contract("variant e has infinite edge values".into())),
        Variant::Odd => Ok((
            Some(1.0 / ((1.0 + a0) * (1.0 - a1))),
            Some(1.0 / ((1.0 - a0) * (1.0 - a1))),
        )),
        Variant::Plus => Ok((None, Some(1.0 / (2.0 * (1.0 - a0))))),
        Variant::Minus => Ok((Some(1.0 / (2.0 * (1.0 + a0))), None)),
    }
}
