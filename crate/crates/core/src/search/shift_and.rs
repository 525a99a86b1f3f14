//! Shift-And and Shift-Or automata.
//!
//! The wide variant keeps one automaton whose state vector is the whole
//! pattern, `ceil(m / kw)` wide words, with the top bit of each word
//! carried into the next. The parallel variant runs `k` independent `w`-bit
//! automata, one per block, each over its own segment of `ceil(n / k)`
//! symbols and `m - 1` more so that matches straddling a segment boundary
//! are seen by exactly one block. Each step gathers the `k` current symbols
//! through a position word and then their masks through the symbols.
//!
//! Shift-Or stores active states as zeros. In the wide variant this drops
//! the OR with 1, since the shift brings in a zero. In the parallel
//! variant the shift also carries each block's top bit into its
//! neighbour's start state, so bit 0 is cleared instead.

use super::{check, word_with_bits, SearchReport};
use crate::tables::BitPositionsTable;
use crate::{Error, Machine, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Wide,
    Parallel,
}

pub fn shift_and_wide(m: &mut Machine, t: &[u8], p: &[u8], sigma: usize) -> Result<SearchReport> {
    with_release(m, |m| wide(m, t, p, sigma, false))
}

pub fn shift_or(m: &mut Machine, t: &[u8], p: &[u8], sigma: usize, variant: Variant) -> Result<SearchReport> {
    match variant {
        Variant::Wide => with_release(m, |m| wide(m, t, p, sigma, true)),
        Variant::Parallel => with_release(m, |m| ParallelMatcher::new(m)?.search(m, t, p, sigma, true)),
    }
}

/// Installs a bit-positions table, searches and releases the table.
pub fn shift_and_parallel(m: &mut Machine, t: &[u8], p: &[u8], sigma: usize) -> Result<SearchReport> {
    with_release(m, |m| ParallelMatcher::new(m)?.search(m, t, p, sigma, false))
}

fn with_release<T>(m: &mut Machine, f: impl FnOnce(&mut Machine) -> Result<T>) -> Result<T> {
    let mark = m.mark();
    let out = f(m);
    m.release_to(mark);
    out
}

fn wide(m: &mut Machine, t: &[u8], p: &[u8], sigma: usize, zeros_active: bool) -> Result<SearchReport> {
    check(t, p, sigma)?;
    let mut report = SearchReport::default();
    if p.len() > t.len() {
        return Ok(report);
    }
    let cfg = m.cfg();
    let (k, kw, len) = (m.k(), cfg.bits(), p.len());
    let words = len.div_ceil(kw);

    let masks = m.alloc(sigma * words * k)?;
    for c in 0..sigma {
        for s in 0..words {
            let bits = (s * kw..len.min((s + 1) * kw)).filter(|&j| p[j] as usize == c).map(|j| j - s * kw);
            let mut y = word_with_bits(cfg, bits)?;
            if zeros_active {
                y = y.not();
            }
            m.preload(masks + ((c * words + s) * k) as u64, y.limbs())?;
        }
    }
    let text = m.alloc(t.len())?;
    m.preload(text, &t.iter().map(|&c| c as u64).collect::<Vec<_>>())?;

    let one = word_with_bits(cfg, [0])?;
    let accept = word_with_bits(cfg, [(len - 1) % kw])?;
    let mut state = vec![if zeros_active { m.ones() } else { m.zero() }; words];
    for i in 0..t.len() {
        let c = m.load(text + i as u64)?;
        m.charge_scalar(1);
        for s in (0..words).rev() {
            let mut v = m.shl(&state[s], 1)?;
            if s > 0 {
                let carry = m.shr(&state[s - 1], kw - 1)?;
                v = m.or(&v, &carry)?;
            } else if !zeros_active {
                v = m.or(&v, &one)?;
            }
            let y = m.read_word(masks + ((c as usize * words + s) * k) as u64)?;
            state[s] = if zeros_active { m.or(&v, &y)? } else { m.and(&v, &y)? };
        }
        if m.test_and(&state[words - 1], &accept)? != zeros_active {
            report.occurrences.push(i + 2 - len);
        }
    }
    Ok(report)
}

/// The `k`-automata matcher with its bit-positions table installed.
pub struct ParallelMatcher {
    table: BitPositionsTable,
}

impl ParallelMatcher {
    /// Lays out the table; the layout itself is not charged.
    pub fn new(m: &mut Machine) -> Result<Self> {
        Ok(ParallelMatcher { table: BitPositionsTable::install(m)? })
    }

    pub fn table_cells(&self) -> u64 {
        self.table.cells()
    }

    pub fn search(&self, m: &mut Machine, t: &[u8], p: &[u8], sigma: usize, zeros_active: bool) -> Result<SearchReport> {
        check(t, p, sigma)?;
        let (k, w, len, n) = (m.k(), m.w() as usize, p.len(), t.len());
        if len > w {
            return Err(Error::Precondition(format!(
                "pattern of {len} symbols exceeds w = {w}; use shift_and_wide"
            )));
        }
        let mut report = SearchReport::default();
        if len > n {
            return Ok(report);
        }
        with_release(m, |m| {
            let seg = n.div_ceil(k);
            let cfg = m.cfg();
            let full = cfg.block_mask();
            let mut masks = vec![0u64; sigma + 1];
            for (j, &c) in p.iter().enumerate() {
                masks[c as usize] |= 1 << j;
            }
            if zeros_active {
                masks.iter_mut().for_each(|y| *y = !*y & full);
            }
            let ytab = m.alloc(sigma + 1)?;
            m.preload(ytab, &masks)?;
            let mut padded: Vec<u64> = t.iter().map(|&c| c as u64).collect();
            padded.resize(k * seg + len, sigma as u64);
            let text = m.alloc(padded.len())?;
            m.preload(text, &padded)?;
            let cell = m.alloc(1)?;

            let mut pos = m.constant(&(0..k as u64).map(|j| j * seg as u64).collect::<Vec<_>>())?;
            let one = m.splat(1);
            let not_one = m.splat(full - 1);
            let accept = m.splat(1 << (len - 1));
            let mut state = if zeros_active { m.ones() } else { m.zero() };
            let mut blocks = Vec::new();
            for i in 0..seg + len - 1 {
                let chars = m.read_content(&pos, text)?;
                let y = m.read_content(&chars, ytab)?;
                let v = m.shl(&state, 1)?;
                let live = if zeros_active {
                    let v = m.and(&v, &not_one)?;
                    state = m.or(&v, &y)?;
                    m.not(&state)
                } else {
                    let v = m.or(&v, &one)?;
                    state = m.and(&v, &y)?;
                    state.clone()
                };
                if m.test_and(&live, &accept)? {
                    let hits = m.and(&live, &accept)?;
                    let hits = if len > 1 { m.shr(&hits, len - 1)? } else { hits };
                    let packed = m.compress(&hits)?;
                    blocks.clear();
                    for c in 0..k.div_ceil(w) {
                        m.write_block(&packed, c, cell)?;
                        let bits = m.load(cell)?;
                        self.table.positions_of(m, bits, (c * w) as u64, &mut blocks)?;
                    }
                    for &j in &blocks {
                        report.occurrences.push(j as usize * seg + i + 2 - len);
                    }
                    m.charge_scalar(blocks.len() as u64);
                }
                pos = m.add(&pos, &one)?;
            }
            report.occurrences.sort_unstable();
            if report.occurrences.windows(2).any(|d| d[0] == d[1]) {
                return Err(Error::Fault("an occurrence was reported twice".into()));
            }
            Ok(report)
        })
    }
}
