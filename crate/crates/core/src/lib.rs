//! Measurement-modified dynamics of a chain of three coupled bosonic modes
//! `A1 - B - A2` (and of the equivalent three-level atom) in which mode `B`
//! is repeatedly checked for vacuum.
//!
//! The crate is split into:
//!
//! * [`fock`]: occupation-number bases, state vectors, density operators and
//!   bipartite entanglement measures.
//! * [`model`]: chain and atomic Hamiltonians, the bright/dark mode rotation.
//! * [`analytic`]: closed-form step factors, accumulated `chi`, the
//!   `(zeta1, zeta2)` amplitudes and all derived statistics.
//! * [`simulate`]: brute-force propagation by Hermitian eigendecomposition,
//!   vacuum post-selection, Kraus channels and Monte Carlo over random phases.
//! * [`runner`]: configuration files, scenario execution, scans, sweeps and
//!   CSV / JSON-lines output used by the `zeno-chain` binary.

pub mod analytic;
pub mod error;
pub mod fock;
pub mod model;
pub mod runner;
pub mod simulate;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;

/// Tolerance for asserted norm bounds.
pub const NORM_TOL: f64 = 1e-9;
