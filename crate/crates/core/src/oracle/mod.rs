//! Scalar reference implementations.
//!
//! Nothing here touches [`WideWord`](crate::WideWord) or the machine, so a
//! bug in the simulator cannot leak into the expected answers. Exhaustive
//! and table-filling oracles refuse inputs above a fixed budget.

mod dp;
mod search;
mod trace;

pub use dp::{knapsack_dp, lcs_table, prefix_ones, subset_sum_brute, subset_sum_dp, subset_sum_rows, LcsTable};
pub use search::{bmh_jump, bmh_scalar, is_subsequence, naive_search, BmhRun};
pub use trace::{parse_dps_trace, parse_pq_trace, run_dps_trace, run_pq_trace, DpsOp, PqOp, PqOutcome};

/// Largest `n` accepted by [`subset_sum_brute`].
pub const BRUTE_MAX_ITEMS: usize = 22;

/// Largest table (`rows * cols`) accepted by the DP oracles.
pub const DP_MAX_CELLS: u64 = 10_000_000;
