//! Exactly computable quantum lattice gas operators for relativistic Fermi
//! systems.
//!
//! The crate is organised around the operator classes that admit a
//! closed-form exponential:
//!
//! * [`algebra`] classifies number operators and builds their unitaries,
//!   with a series-based matrix exponential as an independent oracle.
//! * [`dirac`] steps free Dirac particles on a periodic 1D lattice.
//! * [`fock`] holds the Jordan–Wigner Fock space, the BCS pairing gate and
//!   the grid-level Bogoliubov–de Gennes step.
//! * [`superfluid`] combines the two into a self-consistent relativistic
//!   Fermi condensate.

pub mod algebra;
pub mod dirac;
pub mod eigen;
pub mod error;
pub mod field;
pub mod fock;
pub mod matrix;
pub mod sampling;
pub mod superfluid;

pub use num_complex::Complex64;

pub use algebra::{
    classify_number_operator, closed_form_exp, epsilon, expm_oracle, trotter_product,
    DiracMatrices, GridUnits, NumberOperatorClass, NumberOperatorKind, Representation,
};
pub use dirac::{step_dirac, stream_1d, DiracParams, DispersionRecord};
pub use error::{Error, Result};
pub use field::{plane_wave_field, SpinorField};
pub use fock::{BcsParams, FockSpace, PairBranch};
pub use matrix::SquareMatrix;
pub use superfluid::{GapField, NonlinearAlgebra, PairingMode, PairingParams};

/// Four-component spinor `(L up, L down, R up, R down)`.
pub type Spinor = [Complex64; 4];

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
