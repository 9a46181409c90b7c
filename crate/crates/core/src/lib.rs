//! Second-order projection method for discrete eigenvalues of self-adjoint
//! operators lying in gaps of the essential spectrum.
//!
//! A self-adjoint operator `M` is compressed twice onto a finite subspace,
//! giving `M_n = Π M Π` and `[M²]_n = Π M² Π`. The eigenvalues of the monic
//! quadratic pencil `z² − 2 M_n z + [M²]_n` come in conjugate pairs, and every
//! one of them yields a real interval `[Re z − |Im z|, Re z + |Im z|]` that is
//! guaranteed to meet the spectrum of `M`. Unlike plain Galerkin truncation
//! the method does not pollute spectral gaps.
//!
//! Modules:
//! - [`matpoly`]: matrix polynomials, their spectra, the spectral function
//!   and weighted pseudospectra.
//! - [`operators`]: truncation matrices for the model operators.
//! - [`oracle`]: reference spectra computed independently of the method.
//! - [`pipeline`]: enclosures, convergence studies and perturbation runs.
//! - [`cli`]: configuration, command drivers and file writers.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod matpoly;
pub mod operators;
pub mod oracle;
pub mod pipeline;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use matpoly::{
    GeneralPencil, HermitianMatrix, MatrixPolynomial, PseudospectraWeights, QuadraticPencil,
    SpectrumResult,
};
pub use operators::{OperatorModel, SpectrumInfo, TruncationPair};
pub use pipeline::{ConvergenceRecord, Enclosure, PerturbationReport};
