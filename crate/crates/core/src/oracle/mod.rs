//! Reference values computed without the projection method.

mod entries;
mod fd;
pub mod quadrature;
mod secular;

pub use entries::{entry_oracle_matrices, entry_quadrature_oracle, ENTRY_ORACLE_MAX_N};
pub use fd::{fd_eigenvalues, periodic_band_bottom, schrodinger_fd, FdSpectrum, FD_GATE};
pub use secular::{
    secular_closed_form, secular_function, secular_quadrature, secular_roots, sign_changes, Bracket,
    SecularSolution, BANDS, ROOT_RESIDUAL, SECULAR_AGREEMENT,
};
