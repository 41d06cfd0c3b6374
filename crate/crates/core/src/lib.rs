//! Bound states of hydrogen in a uniform magnetic field by a convergent
//! two-variable power series, plus classical Runge-Lenz checks for the
//! Kepler, Stark and two-center problems and a few closed-form spectra.
//!
//! High-precision arithmetic is carried by MPFR through [`rug`].

pub mod classical;
pub mod numerics;
pub mod spectra;
pub mod zeeman;

pub use rug::Float;
