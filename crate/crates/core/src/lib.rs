//! Simulation and compilation toolkit for frustration-free qubit chains built from
//! projectors onto product vacua with a boundary state.
//!
//! Bit ordering is fixed crate-wide: qubit 0 is the most significant bit of a basis
//! index, so the bitstring of an index reads left to right as chain sites 0..N-1.

pub mod dynamics;
pub mod nativec;
pub mod numfmt;
pub mod pvbs;
pub mod qops;
pub mod scars;
pub mod spectra;

pub use num_complex::Complex64 as C64;
