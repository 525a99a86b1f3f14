use super::{BRUTE_MAX_ITEMS, DP_MAX_CELLS};
use crate::{Error, Result};

fn dp_budget(rows: u64, cols: u64, what: &str) -> Result<()> {
    if rows.saturating_mul(cols) > DP_MAX_CELLS {
        return Err(Error::Budget(format!("{what}: {rows} x {cols} table exceeds {DP_MAX_CELLS} cells")));
    }
    Ok(())
}

/// Tries all `2^n` subsets.
pub fn subset_sum_brute(weights: &[u64], t: u64) -> Result<bool> {
    if weights.len() > BRUTE_MAX_ITEMS {
        return Err(Error::Budget(format!("{} items, brute force allows {BRUTE_MAX_ITEMS}", weights.len())));
    }
    Ok((0u64..1 << weights.len()).any(|s| {
        weights.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).map(|(_, &a)| a as u128).sum::<u128>() == t as u128
    }))
}

/// Reachable sums `0..=t` after each prefix of `weights`; row 0 is the
/// empty set.
pub fn subset_sum_rows(weights: &[u64], t: u64) -> Result<Vec<Vec<bool>>> {
    dp_budget(weights.len() as u64 + 1, t + 1, "subset sum")?;
    let mut row = vec![false; t as usize + 1];
    row[0] = true;
    let mut rows = vec![row.clone()];
    for &a in weights {
        for j in (0..=t as usize).rev() {
            if a as usize <= j && row[j - a as usize] {
                row[j] = true;
            }
        }
        rows.push(row.clone());
    }
    Ok(rows)
}

pub fn subset_sum_dp(weights: &[u64], t: u64) -> Result<bool> {
    dp_budget(weights.len() as u64 + 1, t + 1, "subset sum")?;
    let mut row = vec![false; t as usize + 1];
    row[0] = true;
    for &a in weights {
        for j in (a as usize..=t as usize).rev() {
            row[j] |= row[j - a as usize];
        }
    }
    Ok(row[t as usize])
}

/// 0/1 knapsack over `(weight, value)` pairs by the capacity-indexed DP.
pub fn knapsack_dp(items: &[(u64, u64)], b: u64) -> Result<u64> {
    dp_budget(items.len() as u64 + 1, b + 1, "knapsack")?;
    let mut best = vec![0u64; b as usize + 1];
    for &(wt, v) in items {
        for c in (wt as usize..=b as usize).rev() {
            best[c] = best[c].max(best[c - wt as usize] + v);
        }
    }
    Ok(best[b as usize])
}

/// Number of ones in `bits[0..=q]`.
pub fn prefix_ones(bits: &[bool], q: usize) -> Result<u64> {
    if q >= bits.len() {
        return Err(Error::Input(format!("query {q} outside {} bits", bits.len())));
    }
    Ok(bits[..=q].iter().filter(|&&b| b).count() as u64)
}

/// Full LCS table `c[i][j]` for prefixes `x[..i]`, `y[..j]`.
#[derive(Clone, Debug)]
pub struct LcsTable {
    pub c: Vec<Vec<u32>>,
}

impl LcsTable {
    pub fn length(&self) -> u32 {
        *self.c.last().and_then(|r| r.last()).unwrap_or(&0)
    }

    /// `c[i][j] - c[i][j-1]`.
    pub fn h(&self, i: usize, j: usize) -> u32 {
        self.c[i][j] - self.c[i][j - 1]
    }

    /// `c[i][j] - c[i-1][j]`.
    pub fn v(&self, i: usize, j: usize) -> u32 {
        self.c[i][j] - self.c[i - 1][j]
    }
}

pub fn lcs_table(x: &[u8], y: &[u8]) -> Result<LcsTable> {
    dp_budget(x.len() as u64 + 1, y.len() as u64 + 1, "LCS")?;
    let mut c = vec![vec![0u32; y.len() + 1]; x.len() + 1];
    for i in 1..=x.len() {
        for j in 1..=y.len() {
            c[i][j] = if x[i - 1] == y[j - 1] { c[i - 1][j - 1] + 1 } else { c[i][j - 1].max(c[i - 1][j]) };
        }
    }
    Ok(LcsTable { c })
}
