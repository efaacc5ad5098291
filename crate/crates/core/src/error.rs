use alloc::vec::Vec;
use core::fmt;

use crate::ring::SpectrumOrder;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("transform size {n} is not a power of two in [{min}, {max}]")]
    InvalidSize { n: usize, min: usize, max: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("{what} {index} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("spectrum order is {found:?}, expected {expected:?}")]
    OrderMismatch {
        expected: SpectrumOrder,
        found: SpectrumOrder,
    },

    #[error("division by zero at spectrum indices {indices:?}")]
    DivideByZero { indices: Vec<usize> },

    #[error("invalid bit range {k}..={l}")]
    InvalidBitRange { k: u32, l: u32 },

    #[error("PE count {n_pe} is not a power of two in [1, {max}]")]
    InvalidPeCount { n_pe: usize, max: usize },

    #[error("ROM pair {pair} breaks the +-i adjacency (entries {even_index} and {odd_index})")]
    Adjacency {
        pair: usize,
        even_index: usize,
        odd_index: usize,
    },

    #[error("ROM image has odd length {len}")]
    OddRomLength { len: usize },

    #[error("twiddle table covers {len} entries, size {n} needs {needed}")]
    TableTooSmall { len: usize, n: usize, needed: usize },

    #[error("ROM {pe} address {addr} out of range (logical length {len})")]
    RomAddress { pe: usize, addr: usize, len: usize },

    #[error("bank capacity exceeded: {words} words into {banks} banks of {capacity}")]
    Capacity {
        words: usize,
        banks: usize,
        capacity: usize,
    },

    #[error("{0}")]
    BankConflict(ConflictReport),

    #[error("memory and schedule disagree: {0}")]
    Configuration(&'static str),

    #[error("invalid record field `{field}`: must be finite and positive")]
    InvalidRecord { field: &'static str },
}

/// Two or more accesses to one single-port bank in the same cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictReport {
    pub cycle: u64,
    pub bank: usize,
    /// PEs contending for the port, in arrival order.
    pub pes: Vec<usize>,
}

impl fmt::Display for ConflictReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "bank {} accessed by PEs {:?} in cycle {}",
            self.bank, self.pes, self.cycle
        )
    }
}
