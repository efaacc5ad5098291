//! Golden model of a reconfigurable FFT/IFFT processor over the ring
//! `Q[x]/(x^n + 1)`, the transform FALCON signatures are built on.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! * [`ring`] – reference and in-place ring transforms, FFT-domain arithmetic
//!   and negacyclic multiplication.
//! * [`twiddle`] – twiddle table generation, block permutation, per-PE ROM
//!   split and the factor-two pair compression.
//! * [`schedule`] – conflict-free butterfly dispatch for `n_PE` processing
//!   elements over `2 * n_PE` single-port banks.
//! * [`sim`] – cycle-accurate execution of a schedule against banked memory.
//! * [`metrics`] – execution time and technology-normalised area/power/energy.
//!
//! File formats, the bundled comparison dataset and the command-line front end
//! live in the companion `ringfft` crate.

#![no_std]
#![deny(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

mod complex;
mod error;

pub mod metrics;
pub mod ring;
pub mod schedule;
pub mod sim;
pub mod twiddle;

pub use complex::ComplexWord;
pub use error::{ConflictReport, Error, Result};
pub use ring::{Direction, Polynomial, Spectrum, SpectrumOrder};

/// Largest supported transform size.
pub const S_MAX: usize = 1024;

pub(crate) fn log2(n: usize) -> u32 {
    debug_assert!(n.is_power_of_two());
    n.trailing_zeros()
}
