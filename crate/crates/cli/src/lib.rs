//! File formats, bundled comparison data and the verification suite for the
//! `ringfft` command-line tool. The algorithms live in `ringfft_core`.

pub mod dataset;
pub mod io;
pub mod rng;
pub mod table;
pub mod verify;
