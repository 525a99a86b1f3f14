//! Static rank over a bit row.
//!
//! Ones are counted per `w`-bit cell with chunked table lookups, giving the
//! count array `A`. Its prefix sums `A'` come from two passes. The first
//! treats `A` as subarrays of `k` entries and runs `k` subarrays side by
//! side, one per block, stepping a gather address through them. The
//! second walks the subarrays in order and adds the previous subarray's
//! last total to all `k` entries at once.
//!
//! `A'` is inclusive, so the rank of bit `q` is `A'[q/w - 1]` plus the
//! ones of cell `q/w` up to and including `q`. A zero cell sits just
//! before `A'` to serve `q < w`.

use crate::tables::PopcountTable;
use crate::{Error, Machine, Result, WideWord};

pub struct RankIndex {
    pub(crate) row: u64,
    pub(crate) cells: usize,
    pub(crate) counts: u64,
    pub(crate) prefix: u64,
    subarrays: usize,
    groups: usize,
    pub(crate) pop: PopcountTable,
    chunk_mask: WideWord,
}

impl RankIndex {
    /// Reserves space to rank the `cells`-cell row at `row`. The row must
    /// be readable up to the next multiple of `k` cells.
    pub fn new(m: &mut Machine, row: u64, cells: usize, pop: PopcountTable) -> Result<Self> {
        let k = m.k();
        let subarrays = cells.div_ceil(k).max(1);
        let groups = subarrays.div_ceil(k);
        let counts = m.alloc(groups * k * k)?;
        let prefix = m.alloc(groups * k * k + 1)? + 1;
        let chunk_mask = m.splat((1 << pop.chunk) - 1);
        Ok(RankIndex { row, cells, counts, prefix, subarrays, groups, pop, chunk_mask })
    }

    /// Popcount of every block of `x` by chunked lookups.
    pub(crate) fn block_popcount(&self, m: &mut Machine, x: &WideWord) -> Result<WideWord> {
        let h = self.pop.chunk as usize;
        let mut acc: Option<WideWord> = None;
        for s in 0..m.w() as usize / h {
            let part = if s == 0 { x.clone() } else { m.shr(x, s * h)? };
            let key = m.and(&part, &self.chunk_mask)?;
            let t = m.read_content(&key, self.pop.base)?;
            acc = Some(match acc {
                None => t,
                Some(a) => m.add(&a, &t)?,
            });
        }
        Ok(acc.expect("w is a multiple of the chunk width"))
    }

    /// Recomputes `A` and `A'` from the current row contents.
    pub fn build(&self, m: &mut Machine) -> Result<()> {
        let k = m.k();
        for g in 0..self.cells.div_ceil(k) {
            let x = m.read_word(self.row + (g * k) as u64)?;
            let c = self.block_popcount(m, &x)?;
            m.write_word(&c, self.counts + (g * k) as u64)?;
        }

        let ones = m.splat(1);
        for g in 0..self.groups {
            let start: Vec<u64> = (0..k).map(|i| ((g * k + i) * k) as u64).collect();
            let mut idx = m.constant(&start)?;
            let mut acc = m.read_content(&idx, self.counts)?;
            m.write_content(&acc, &idx, self.prefix)?;
            for _ in 1..k {
                idx = m.add(&idx, &ones)?;
                let v = m.read_content(&idx, self.counts)?;
                acc = m.add(&acc, &v)?;
                m.write_content(&acc, &idx, self.prefix)?;
            }
        }

        let z = m.zero();
        for i in 1..self.subarrays {
            let at = self.prefix + (i * k) as u64;
            let carry = m.read_content(&z, at - 1)?;
            let v = m.read_word(at)?;
            let v = m.add(&v, &carry)?;
            m.write_word(&v, at)?;
        }
        Ok(())
    }

    /// Ones among bits `0..=q` of the row.
    pub fn rank(&self, m: &mut Machine, q: u64) -> Result<u64> {
        let w = m.w() as u64;
        if q >= self.cells as u64 * w {
            return Err(Error::Fault(format!("rank query {q} beyond {}-bit row", self.cells as u64 * w)));
        }
        let (c, off) = (q / w, q % w);
        let cell = m.load(self.row + c)?;
        let masked = if off == 63 { cell } else { cell & ((1 << (off + 1)) - 1) };
        m.charge_scalar(3);
        let mut total = m.load(self.prefix + c - 1)?;
        let h = self.pop.chunk as u64;
        for s in 0..w / h {
            let key = masked >> (s * h) & ((1 << h) - 1);
            m.charge_scalar(3);
            total += m.load(self.pop.base + key)?;
        }
        Ok(total)
    }

    /// Host view of the count array `A`.
    pub fn counts(&self, m: &Machine) -> Vec<u64> {
        m.peek(self.counts, self.cells).to_vec()
    }

    /// Host view of the inclusive prefix array `A'`.
    pub fn prefix(&self, m: &Machine) -> Vec<u64> {
        m.peek(self.prefix, self.cells).to_vec()
    }
}

/// Output of [`static_prefix_sums`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixSummary {
    /// Ones per `w`-bit block.
    pub counts: Vec<u64>,
    /// Inclusive prefix sums of `counts`.
    pub prefix: Vec<u64>,
    /// Answer to the query, ones among bits `0..=q`.
    pub ones: u64,
}

/// Places `bits` in memory (uncharged), builds the index and answers one
/// rank query.
pub fn static_prefix_sums(m: &mut Machine, bits: &[bool], q: usize) -> Result<PrefixSummary> {
    if q >= bits.len() {
        return Err(Error::Fault(format!("query {q} outside {} bits", bits.len())));
    }
    let mark = m.mark();
    let (w, k) = (m.w() as usize, m.k());
    let cells = bits.len().div_ceil(w);
    let row = m.alloc(cells.div_ceil(k) * k)?;
    let packed: Vec<u64> = bits
        .chunks(w)
        .map(|c| c.iter().enumerate().fold(0u64, |acc, (i, &b)| acc | (b as u64) << i))
        .collect();
    m.preload(row, &packed)?;
    let out = (|| {
        let pop = PopcountTable::install(m)?;
        let idx = RankIndex::new(m, row, cells, pop)?;
        idx.build(m)?;
        let ones = idx.rank(m, q as u64)?;
        Ok(PrefixSummary { counts: idx.counts(m), prefix: idx.prefix(m), ones })
    })();
    m.release_to(mark);
    out
}
