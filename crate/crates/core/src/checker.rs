//! End-to-end checks of the equivalence between `lambda, kappa in l^2_1` and
//! the weight classes on `[-2, 2]`, in both directions.
//!
//! "Belongs to `l^2_1`" is operationalized on doubling windows `[N, 2N)`: the
//! weighted window sums must shrink geometrically or fall below the report
//! tolerance. Finitely supported inputs make these sums exactly zero past the
//! support, so the windows are auditable rather than asymptotic guesses.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::commutation::double_commute_remove;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::geronimus::{direct_geronimus, inverse_geronimus, ratio_sequences};
use crate::jacobi::{eigenvalues_outside, m_at_edge, Edge, EdgeValue, JacobiMatrix};
use crate::opuc::{weight_from_verblunsky, CircleMeasure, VerblunskyCoeffs};
use crate::seq_spaces::{log_weight_fourier, sobolev_half_norm, sobolev_partial_norms, tail_sums, weighted_norm};
use crate::szego_maps::{range_membership, szego_inverse, LineMeasure, Variant};

/// Circle grid used by the weight reconstructions.
pub const WEIGHT_GRID: usize = 1024;
const MAX_GRID: usize = 1 << 16;
const RATIO_WINDOWS: [usize; 4] = [8, 16, 32, 64];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// From decay of `lambda, kappa` to the spectral description.
    #[serde(rename = "1to2")]
    DecayToSpectral,
    /// From the spectral description (given by `alpha`) to decay.
    #[serde(rename = "2to1")]
    SpectralToDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Inconclusive,
    Fail,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

impl Criterion {
    fn new(name: &str, pass: bool, detail: String) -> Self {
        let outcome = if pass { Outcome::Pass } else { Outcome::Fail };
        Self { name: name.into(), outcome, detail }
    }

    fn from_error(name: &str, err: &Error) -> Self {
        let outcome = match err {
            Error::Inconclusive(_) => Outcome::Inconclusive,
            _ => Outcome::Fail,
        };
        Self { name: name.into(), outcome, detail: err.to_string() }
    }
}

/// Weighted sums `sum_{N <= n < 2N} n (r_n - 1)^2` of one ratio sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioWindows {
    pub label: String,
    pub windows: Vec<(usize, f64)>,
}

impl RatioWindows {
    fn of(label: &str, ratios: &[f64]) -> Self {
        let windows = ratio_window_sums(ratios);
        Self { label: label.into(), windows }
    }

    /// The last window is negligible or the windows shrink geometrically.
    pub fn summable(&self, tol: &Tolerances) -> bool {
        let w: Vec<f64> = self.windows.iter().map(|(_, s)| *s).collect();
        let last = w[w.len() - 1];
        last <= tol.report * tol.report || w.windows(2).skip(1).all(|p| p[1] <= 0.75 * p[0])
    }
}

fn ratio_window_sums(ratios: &[f64]) -> Vec<(usize, f64)> {
    RATIO_WINDOWS
        .iter()
        .map(|&n| {
            let s = (n..(2 * n).min(ratios.len()))
                .map(|k| k as f64 * (ratios[k] - 1.0).powi(2))
                .sum();
            (n, s)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub direction: Direction,
    /// Edge case 1-4 (see [`dispatch`]); decay-to-spectral direction only.
    pub case: Option<u8>,
    pub variant: Option<Variant>,
    pub eigenvalues_removed: Vec<f64>,
    /// Squared `l^2_1` norms.
    pub lambda_norm_sq: f64,
    pub kappa_norm_sq: f64,
    /// `H^{1/2}` partial norms of `log v_0` at doubling cutoffs.
    pub half_norms: Vec<(usize, f64)>,
    pub alpha: Option<VerblunskyCoeffs>,
    pub edges: Option<(EdgeValue, EdgeValue)>,
    pub ratio_windows: Vec<RatioWindows>,
    pub criteria: Vec<Criterion>,
    pub tolerances: Tolerances,
}

impl TheoremReport {
    fn new(direction: Direction, tol: &Tolerances) -> Self {
        Self {
            direction,
            case: None,
            variant: None,
            eigenvalues_removed: Vec::new(),
            lambda_norm_sq: 0.0,
            kappa_norm_sq: 0.0,
            half_norms: Vec::new(),
            alpha: None,
            edges: None,
            ratio_windows: Vec::new(),
            criteria: Vec::new(),
            tolerances: *tol,
        }
    }

    /// Worst outcome over all criteria.
    pub fn outcome(&self) -> Outcome {
        self.criteria.iter().map(|c| c.outcome).max().unwrap_or(Outcome::Pass)
    }

    fn push(&mut self, c: Criterion) {
        self.criteria.push(c);
    }

    fn set_decay_norms(&mut self, j: &JacobiMatrix) -> Result<()> {
        let (lambda, kappa) = tail_sums(&j.b_sequence(), &j.a_sequence())?;
        self.lambda_norm_sq = weighted_norm(&lambda, 1.0)?;
        self.kappa_norm_sq = weighted_norm(&kappa, 1.0)?;
        Ok(())
    }
}

/// Variant selected by the edge values, with its case number.
pub fn dispatch(minus: &EdgeValue, plus: &EdgeValue) -> (u8, Variant) {
    match (minus.is_finite(), plus.is_finite()) {
        (false, false) => (1, Variant::Even),
        (true, true) => (2, Variant::Odd),
        (false, true) => (3, Variant::Plus),
        (true, false) => (4, Variant::Minus),
    }
}

/// `(lambda_n, kappa_n)` to leading order in `alpha` for `n >= 1`.
pub fn leading_order(alpha: &VerblunskyCoeffs, variant: Variant, n: usize) -> (f64, f64) {
    let n = n as i64;
    let al = |k: i64| alpha.get(k);
    match variant {
        Variant::Even => (al(2 * n - 2), al(2 * n - 1)),
        Variant::Odd => (-al(2 * n), -al(2 * n + 1)),
        Variant::Plus => (-al(2 * n - 1), -al(2 * n)),
        Variant::Minus => (al(2 * n - 1), al(2 * n)),
    }
}

/// Bound on the quadratic remainder at `n >= 1`: `5 sum_{j >= 2n-2} alpha_j^2`.
pub fn remainder_bound(alpha: &VerblunskyCoeffs, n: usize) -> f64 {
    5.0 * alpha.values().iter().skip(2 * n - 2).map(|a| a * a).sum::<f64>()
}

/// Squared `H^{1/2}` norm of `log w` for the Bernstein–Szego weight of `alpha`.
pub fn log_weight_half_norm(alpha: &VerblunskyCoeffs, grid: usize) -> Result<f64> {
    let w = weight_from_verblunsky(alpha, grid);
    Ok(sobolev_half_norm(&log_weight_fourier(&w)?))
}

/// Partial norms at cutoffs `8, 16, ..` up to the grid's Nyquist index.
///
/// The grid doubles until the top two cutoffs agree to `1e-3`, so weights
/// with zeros of `Phi*` close to the circle are resolved.
fn half_norms(alpha: &VerblunskyCoeffs) -> Result<Vec<(usize, f64)>> {
    let mut grid = WEIGHT_GRID;
    loop {
        let f = log_weight_fourier(&weight_from_verblunsky(alpha, grid))?;
        let mut cutoffs: Vec<usize> = (3..).map(|p| 1usize << p).take_while(|&c| c < f.max_index()).collect();
        cutoffs.push(f.max_index());
        let norms = sobolev_partial_norms(&f, &cutoffs);
        let (a, b) = (norms[norms.len() - 2].1, norms[norms.len() - 1].1);
        if grid >= MAX_GRID || (b - a).abs() <= 1e-3 * b.abs() {
            return Ok(norms);
        }
        grid *= 2;
    }
}

fn half_norms_stable(norms: &[(usize, f64)]) -> bool {
    match norms {
        [.., (_, a), (_, b)] => (b - a).abs() <= 0.05 * a.abs().max(1e-300) || b - a <= 1e-12,
        _ => true,
    }
}

/// Spectral side to decay: from `alpha` to the decay of `lambda, kappa`.
pub fn check_2_to_1(alpha: &VerblunskyCoeffs, variant: Variant, tol: &Tolerances) -> Result<TheoremReport> {
    let mut report = TheoremReport::new(Direction::SpectralToDecay, tol);
    report.variant = Some(variant);
    report.alpha = Some(alpha.clone());
    let j = direct_geronimus(alpha, variant)?;
    report.set_decay_norms(&j)?;
    report.push(Criterion::new(
        "decay norms finite",
        report.lambda_norm_sq.is_finite() && report.kappa_norm_sq.is_finite(),
        format!("|lambda|^2 = {:e}, |kappa|^2 = {:e}", report.lambda_norm_sq, report.kappa_norm_sq),
    ));

    let (lambda, kappa) = tail_sums(&j.b_sequence(), &j.a_sequence())?;
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for n in 1..=lambda.len().max(1) {
        let (l0, k0) = leading_order(alpha, variant, n);
        let bound = remainder_bound(alpha, n) + 1e-14;
        let dl = (lambda.get_or(n as i64, 0.0) - l0).abs();
        let dk = (kappa.get_or(n as i64, 0.0) - k0).abs();
        ok &= dl <= bound && dk <= bound;
        worst = worst.max(dl.max(dk) / bound);
    }
    report.push(Criterion::new(
        "leading-order relations",
        ok,
        format!("largest remainder / bound = {worst:.3}"),
    ));

    match eigenvalues_outside(&j, tol) {
        Ok(e) => report.push(Criterion::new(
            "spectrum inside [-2, 2]",
            e.is_empty(),
            format!("{} eigenvalues outside", e.len()),
        )),
        Err(err) => report.push(Criterion::from_error("spectrum inside [-2, 2]", &err)),
    }

    report.half_norms = half_norms(alpha)?;
    report.push(Criterion::new(
        "H^1/2 partial norms stable",
        half_norms_stable(&report.half_norms),
        format!("{:?}", report.half_norms),
    ));
    match weight_discrepancy(&j, alpha, variant) {
        Ok(d) => report.push(Criterion::new(
            "weight cross-check",
            d <= tol.report,
            format!("max relative discrepancy {d:e}"),
        )),
        Err(err) => report.push(Criterion::from_error("weight cross-check", &err)),
    }
    Ok(report)
}

/// Largest relative difference between the Bernstein-Szego weight of `alpha`
/// and the circle weight pulled back from the spectral density of `J`.
///
/// Both sides are normalized by the same grid mean.
pub fn weight_discrepancy(j: &JacobiMatrix, alpha: &VerblunskyCoeffs, variant: Variant) -> Result<f64> {
    let direct = CircleMeasure::normalized(weight_from_verblunsky(alpha, WEIGHT_GRID))?;
    let pulled = szego_inverse(&LineMeasure::of_matrix(j, WEIGHT_GRID / 2)?, variant)?;
    Ok(direct
        .weights
        .iter()
        .zip(&pulled.weights)
        .map(|(a, b)| (a - b).abs() / a)
        .fold(0.0, f64::max))
}

/// Decay to spectral side: remove eigenvalues, classify the edges, dispatch
/// to a variant and recover `alpha`.
pub fn check_1_to_2(j: &JacobiMatrix, tol: &Tolerances) -> Result<TheoremReport> {
    let mut report = TheoremReport::new(Direction::DecayToSpectral, tol);
    report.set_decay_norms(j)?;

    let eigs = match eigenvalues_outside(j, tol) {
        Ok(e) => e,
        Err(err) => {
            report.push(Criterion::from_error("eigenvalue removal", &err));
            return Ok(report);
        }
    };
    let mut reduced = j.clone();
    for &e in &eigs {
        match double_commute_remove(&reduced, e, tol) {
            Ok(next) => reduced = next,
            Err(err) => {
                report.push(Criterion::from_error("eigenvalue removal", &err));
                return Ok(report);
            }
        }
        report.eigenvalues_removed.push(e);
    }
    let left = eigenvalues_outside(&reduced, tol)?;
    report.push(Criterion::new(
        "eigenvalue removal",
        left.is_empty() && eigs.iter().all(|e| e.abs() > 2.0),
        format!("removed {eigs:?}; {} left outside [-2, 2]", left.len()),
    ));

    let edges = m_at_edge(&reduced, Edge::Minus, tol).and_then(|m| Ok((m, m_at_edge(&reduced, Edge::Plus, tol)?)));
    let (minus, plus) = match edges {
        Ok(e) => e,
        Err(err) => {
            report.push(Criterion::from_error("edge classification", &err));
            return Ok(report);
        }
    };
    let bound_ok = [&minus, &plus].iter().all(|e| e.signed().is_none_or(|v| v > 0.25));
    report.push(Criterion::new(
        "edge classification",
        bound_ok,
        format!("m(-2) = {:?}, m(2) = {:?}", minus.value, plus.value),
    ));
    let (case, variant) = dispatch(&minus, &plus);
    report.case = Some(case);
    report.variant = Some(variant);
    report.edges = Some((minus, plus));
    let membership: BTreeSet<Variant> = range_membership(&reduced, tol)?;
    report.push(Criterion::new(
        "dispatch within range",
        membership.contains(&variant),
        format!("case {case} -> {variant}; range {membership:?}"),
    ));

    let inv = match inverse_geronimus(&reduced, variant, (&minus, &plus)) {
        Ok(inv) => inv,
        Err(err) => {
            report.push(Criterion::from_error("inverse relations", &err));
            return Ok(report);
        }
    };
    let boundary = match (inv.alpha_minus_one, inv.alpha0_cross_check) {
        (Some(a), _) => (a + 1.0).abs(),
        (None, Some(d)) => d.abs(),
        (None, None) => 0.0,
    };
    report.push(Criterion::new(
        "inverse relations",
        boundary <= tol.report,
        format!("boundary row mismatch {boundary:e}"),
    ));
    report.alpha = Some(inv.alpha.clone());

    let long = ratio_sequences(&reduced, (&minus, &plus), 2 * RATIO_WINDOWS[RATIO_WINDOWS.len() - 1])?;
    let (at_minus, at_plus) = match variant {
        Variant::Even => (("A", long.a.clone()), ("B", long.b.clone())),
        Variant::Odd => (("C", long.c.clone().unwrap()), ("D", long.d.clone().unwrap())),
        Variant::Plus => (("A", long.a.clone()), ("D", long.d.clone().unwrap())),
        Variant::Minus => (("C", long.c.clone().unwrap()), ("B", long.b.clone())),
    };
    report.ratio_windows = vec![
        RatioWindows::of(at_minus.0, &at_minus.1),
        RatioWindows::of(at_plus.0, &at_plus.1),
    ];
    report.push(Criterion::new(
        "ratios 1 + l^2_1",
        report.ratio_windows.iter().all(|r| r.summable(tol)),
        format!("{:?}", report.ratio_windows),
    ));

    match weight_discrepancy(&reduced, &inv.alpha, variant) {
        Ok(d) => report.push(Criterion::new(
            "weight reconstruction",
            d <= tol.report,
            format!("max relative discrepancy {d:e}"),
        )),
        Err(err) => report.push(Criterion::from_error("weight reconstruction", &err)),
    }
    report.half_norms = half_norms(&inv.alpha)?;
    report.push(Criterion::new(
        "H^1/2 partial norms stable",
        half_norms_stable(&report.half_norms),
        format!("{:?}", report.half_norms),
    ));
    Ok(report)
}

/// Partial `H^{1/2}` norms of `log w` for `alpha` truncated at each cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationStudy {
    pub label: String,
    pub norms: Vec<(usize, f64)>,
}

impl TruncationStudy {
    pub fn run(label: &str, alpha: impl Fn(usize) -> f64, cutoffs: &[usize], grid: usize) -> Result<Self> {
        let norms = cutoffs
            .iter()
            .map(|&k| {
                let a = VerblunskyCoeffs::new((0..k).map(&alpha).collect())?;
                Ok((k, log_weight_half_norm(&a, grid)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { label: label.into(), norms })
    }

    /// Relative change between consecutive cutoffs.
    pub fn growth(&self) -> Vec<f64> {
        self.norms.windows(2).map(|w| (w[1].1 - w[0].1) / w[0].1).collect()
    }
}
