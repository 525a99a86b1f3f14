//! Simulator for the ultra-wide word RAM.
//!
//! The machine has an ALU over `k * w`-bit words, ordinary memory of
//! `w`-bit cells, and gather/scatter primitives that move one cell per
//! block in a single step. Every primitive is charged one unit on a
//! [`CostCounter`], so speedups show up as instruction-count ratios rather
//! than wall-clock time.
//!
//! ```ignore
//! use uwram::{Machine, WideConfig};
//! use uwram::dp::subset_sum;
//!
//! let cfg = WideConfig::new(64, 4).unwrap();
//! let mut m = Machine::new(cfg, 1 << 16).unwrap();
//! assert!(subset_sum(&mut m, &[2, 3, 7], 5).unwrap());
//! assert!(m.counter().wide_alu > 0);
//! ```

pub mod batch;
pub mod dp;
pub mod fsram;
pub mod machine;
pub mod oracle;
pub mod search;
pub mod tables;
pub mod word;

pub use machine::{CostCounter, Machine};
pub use word::{BitOp, FieldLayout, WideConfig, WideWord};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("config mismatch: (w={}, k={}) vs (w={}, k={})", left.0, left.1, right.0, right.1)]
    ConfigMismatch { left: (u32, usize), right: (u32, usize) },
    #[error("construction error: {0}")]
    Construction(String),
    #[error("shift by {shift} exceeds word width {width}")]
    ShiftRange { shift: usize, width: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("memory fault: {0}")]
    Fault(String),
    #[error("CREW violation: blocks {first} and {second} both write address {addr}")]
    Crew { first: usize, second: usize, addr: u64 },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("oracle budget exceeded: {0}")]
    Budget(String),
}

pub type Result<T> = std::result::Result<T, Error>;
