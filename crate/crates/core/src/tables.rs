//! Precomputed lookup tables installed into machine memory.
//!
//! Tables are keyed by `min(w/2, 16)`-bit chunks. Installing them is not
//! charged; their size is available for space accounting.

use crate::{Machine, Result};

pub fn chunk_bits(w: u32) -> u32 {
    (w / 2).min(16)
}

/// `POP[x] = popcount(x)` for every chunk value `x`.
#[derive(Clone, Copy, Debug)]
pub struct PopcountTable {
    pub base: u64,
    pub chunk: u32,
}

impl PopcountTable {
    pub fn install(m: &mut Machine) -> Result<Self> {
        let chunk = chunk_bits(m.w());
        let vals: Vec<u64> = (0..1u64 << chunk).map(|x| x.count_ones() as u64).collect();
        let base = m.alloc(vals.len())?;
        m.preload(base, &vals)?;
        Ok(PopcountTable { base, chunk })
    }

    pub fn cells(&self) -> u64 {
        1 << self.chunk
    }
}

/// Positions of the set bits of every chunk value: `POS[OFF[x] ..
/// OFF[x + 1]]` lists them in increasing order.
#[derive(Clone, Copy, Debug)]
pub struct BitPositionsTable {
    pub offsets: u64,
    pub positions: u64,
    pub chunk: u32,
    len: u64,
}

impl BitPositionsTable {
    pub fn install(m: &mut Machine) -> Result<Self> {
        let chunk = chunk_bits(m.w());
        let n = 1u64 << chunk;
        let mut offs = Vec::with_capacity(n as usize + 1);
        let mut pos = Vec::new();
        for x in 0..n {
            offs.push(pos.len() as u64);
            pos.extend((0..chunk as u64).filter(|b| x >> b & 1 == 1));
        }
        offs.push(pos.len() as u64);
        let offsets = m.alloc(offs.len())?;
        m.preload(offsets, &offs)?;
        let positions = m.alloc(pos.len().max(1))?;
        m.preload(positions, &pos)?;
        Ok(BitPositionsTable { offsets, positions, chunk, len: offs.len() as u64 + pos.len() as u64 })
    }

    pub fn cells(&self) -> u64 {
        self.len
    }

    /// Positions of the set bits of a `w`-bit value, appended to `out`
    /// with `shift` added. Charged as scalar work.
    pub fn positions_of(&self, m: &mut Machine, value: u64, shift: u64, out: &mut Vec<u64>) -> Result<()> {
        let mask = (1u64 << self.chunk) - 1;
        let mut c = 0;
        while c < m.w() {
            let key = value >> c & mask;
            m.charge_scalar(2);
            if key != 0 {
                let lo = m.load(self.offsets + key)?;
                let hi = m.load(self.offsets + key + 1)?;
                for p in lo..hi {
                    out.push(shift + c as u64 + m.load(self.positions + p)?);
                }
            }
            c += self.chunk;
        }
        Ok(())
    }
}
