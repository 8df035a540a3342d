//! Shared inputs for the benchmarks.

use szego_core::{JacobiMatrix, VerblunskyCoeffs};

/// Deterministic coefficients in `(-0.8, 0.8)`.
pub fn sample_alpha(len: usize) -> VerblunskyCoeffs {
    let values = (0..len).map(|n| 0.8 * ((n as f64 + 1.0) * 1.618).sin() * 0.95).collect();
    VerblunskyCoeffs::new(values).unwrap()
}

/// A short perturbation of the free matrix.
pub fn sample_matrix() -> JacobiMatrix {
    JacobiMatrix::new(vec![1.2, 0.8, 1.1], vec![0.3, -0.4, 0.2, 0.1]).unwrap()
}
