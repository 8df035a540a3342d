//! Numerical toolkit for Jacobi matrices that are finite perturbations of the
//! free matrix: spectral measures and m-functions, orthogonal polynomials on
//! the unit circle, the four Szego maps, Geronimus relations, double
//! commutation and discrete asymptotic integration.

pub mod asymptotics;
pub mod checker;
pub mod commutation;
pub mod config;
pub mod error;
pub mod geronimus;
pub mod jacobi;
pub mod linalg;
pub mod opuc;
pub mod seq_spaces;
pub mod szego_maps;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use jacobi::{Edge, EdgeLimit, EdgeMethod, EdgeValue, JacobiMatrix, PolyTable, Quadrature};
pub use seq_spaces::{FourierCoeffs, RealSequence, Tail};
pub use opuc::{CircleMeasure, VerblunskyCoeffs};
pub use szego_maps::{LineMeasure, Variant};
pub use asymptotics::{SolutionFamily, SolutionKind};
pub use checker::{Direction, Outcome, TheoremReport};
