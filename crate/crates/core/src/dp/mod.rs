//! Dynamic programming on wide words: subset sum, static rank, 0/1
//! knapsack and longest common subsequence.

mod four_russians;
mod knapsack;
mod lcs;
mod prefix_sums;
mod subset_sum;

pub use four_russians::{block_side, four_russians, four_russians_with, FourRussians, MAX_KEY_BITS};
pub use knapsack::{greedy_bound, knapsack};
pub use lcs::{field_width, lcs, lcs_length, lcs_recover, LcsRun, Retention};
pub use prefix_sums::{static_prefix_sums, PrefixSummary, RankIndex};
pub use subset_sum::{subset_sum, subset_sum_rows};
