//! String matching on wide words.
//!
//! Texts and patterns are symbol codes below `sigma`. Every matcher
//! returns 1-based start positions in increasing order.

mod bmh;
mod shift_and;

pub use bmh::bmh_wide;
pub use shift_and::{shift_and_parallel, shift_and_wide, shift_or, ParallelMatcher, Variant};

use crate::{Error, Result, WideConfig, WideWord};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchReport {
    pub occurrences: Vec<usize>,
    /// 1-based window starts in the order examined; BMH only.
    pub windows: Vec<usize>,
}

impl SearchReport {
    pub fn occ(&self) -> usize {
        self.occurrences.len()
    }
}

pub(crate) fn check(t: &[u8], p: &[u8], sigma: usize) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Input("empty pattern".into()));
    }
    if sigma == 0 || sigma > 256 {
        return Err(Error::Input(format!("alphabet size {sigma} outside 1..=256")));
    }
    match t.iter().chain(p).find(|&&c| c as usize >= sigma) {
        Some(c) => Err(Error::Input(format!("symbol {c} not below sigma {sigma}"))),
        None => Ok(()),
    }
}

/// A wide word with the listed bit positions set.
pub(crate) fn word_with_bits(cfg: WideConfig, bits: impl IntoIterator<Item = usize>) -> Result<WideWord> {
    let w = cfg.w() as usize;
    let mut limbs = vec![0u64; cfg.k()];
    for b in bits {
        limbs[b / w] |= 1 << (b % w);
    }
    WideWord::from_limbs(cfg, &limbs)
}
