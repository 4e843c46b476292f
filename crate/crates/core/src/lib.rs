//! Evolution of single-mode Gaussian states under quadratic, possibly
//! non-autonomous Hamiltonians `H = p²/2 + ω²(t) q²/2` coupled to a thermal
//! damping bath.
//!
//! The state is carried as first moments plus the symmetrized covariance
//! matrix in `(q, p)` ordering, with `ħ = m = 1`. Two independent engines are
//! provided:
//!
//! * [`dissipation`] propagates the characteristic (chord) function: the
//!   classical propagator of `φ̈ + ω²(t)φ = 0` transports the initial state and
//!   a noise matrix accumulated by quadrature carries the bath.
//! * [`oracle`] integrates the moment equations of motion of the master
//!   equation directly.
//!
//! Closed forms for the inverted oscillator (hyperbolic) and the square-root
//! frequency ramp (Airy) live in [`propagator`] and [`airy`].

// tabulated constants keep their published digits; `!(x > y)` rejects NaN
#![allow(
    clippy::excessive_precision,
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop
)]

pub mod airy;
pub mod bath;
pub mod dissipation;
mod error;
pub mod matrix;
pub mod ode;
pub mod oracle;
pub mod profile;
pub mod propagator;
pub mod quadrature;
pub mod state;
pub mod trajectory;

pub use bath::BathParams;
pub use dissipation::{Evolved, Tolerances};
pub use error::{Error, Result};
pub use matrix::{Mat2, Sym2};
pub use profile::FrequencyProfile;
pub use propagator::PropagatorMatrix;
pub use state::{GaussianParams, GaussianState, ModeCoefficients};
pub use trajectory::{Sample, Trajectory};

/// Absolute slack on the Heisenberg bound `det σ ≥ 1/4`.
pub const HEISENBERG_TOL: f64 = 1e-9;
