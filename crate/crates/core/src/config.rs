//! Tolerances shared by every pipeline.

use serde::{Deserialize, Serialize};

/// Numerical thresholds used throughout the crate.
///
/// Every default comes from the published contract of the corresponding
/// operation; override individual fields when a caller needs tighter or
/// looser behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Cauchy tolerance of the Richardson-extrapolated edge limit.
    pub edge: f64,
    /// Magnitude beyond which monotone extrapolants are read as divergence.
    pub edge_infinite: f64,
    /// Number of levels in the geometric edge approach `2^{-j}`.
    pub edge_levels: u32,
    /// Relative size of the Jost boundary value below which an edge is resonant.
    pub resonance: f64,
    /// Roundtrip tolerance for Geronimus and Szego-map inversions.
    pub roundtrip: f64,
    /// Tolerance for report-level cross checks.
    pub report: f64,
    /// Cauchy tolerance for outside eigenvalues across truncation sizes.
    pub eig: f64,
    /// Distance from `[-2, 2]` below which a value counts as inside the band.
    pub band: f64,
    /// Truncation sizes used by eigen-solves.
    pub truncations: [usize; 3],
    /// Re-truncation threshold for commuted matrices against the free tail.
    pub free_tail: f64,
    /// Sup-norm stopping tolerance of fixed-point iterations.
    pub fixed_point: f64,
    /// Iteration cap for fixed-point iterations.
    pub max_iterations: usize,
    /// Default window length for asymptotic integration.
    pub window: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            edge: 1e-7,
            edge_infinite: 1e6,
            edge_levels: 40,
            resonance: 1e-9,
            roundtrip: 1e-9,
            report: 1e-6,
            eig: 1e-9,
            band: 1e-8,
            truncations: [64, 128, 256],
            free_tail: 1e-14,
            fixed_point: 1e-13,
            max_iterations: 200,
            window: 512,
        }
    }
}
