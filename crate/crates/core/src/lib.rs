//! Ion-transport trajectories for segmented ion traps and the D.C. Stark
//! dephasing and decoherence they cause.
//!
//! The crate is organised bottom-up:
//!
//! * [`quadrature`] – Gauss–Legendre panels, Richardson error estimates and a
//!   Filon-type integrator for `∫ f(t) e^{iωt} dt`.
//! * [`trajectory`] – ion paths `q(t)`, well programs `s(t)`, the functional
//!   `ζ = ∫ q̈² dt` and the mapping between wells and ion paths.
//! * [`motion`] – coherent-state dynamics in the moving well, the electric
//!   field the ion sees, and a truncated Fock-basis oracle.
//! * [`atomic`] – level/line tables, Clebsch–Gordan algebra and static
//!   susceptibilities by sum over intermediate states.
//! * [`stark`] – phases, threshold times and decoherence amplitudes.
//! * [`presets`] – bundled Ca II / Be II data and the two standard qubits.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
pub mod constants;
pub mod error;
pub mod motion;
pub mod presets;
pub mod quadrature;
pub mod stark;
pub mod trajectory;

pub use error::{Error, Result};
