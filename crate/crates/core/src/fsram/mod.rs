//! Registers with shared bits, simulated on the wide machine.
//!
//! Each shared bit `B_i` lives in its own memory cell `A[i]`, and the table
//! `R[t][j]` names the bit held at position `j` of register `t`. A register
//! read gathers its bits with one `read_content` and packs them with
//! `compress`; a write does the reverse with `spread` and
//! `write_content`. Both take four wide primitives whatever the register
//! width.
//!
//! Rows of `R` are stored with a stride of `k` cells. Positions `b..k` of
//! every row point at private dummy cells after `A`, so padding reads as
//! zero and never collides under exclusive write.

mod pq;
mod prefix;

pub use pq::PriorityQueue;
pub use prefix::{Monoid, PrefixSums};

use crate::{Error, Machine, Result};

#[derive(Clone, Debug)]
pub struct FsRamLayout {
    r: usize,
    b: usize,
    nbits: usize,
    rows_base: u64,
    a_base: u64,
    io_cell: u64,
    stride: usize,
}

impl FsRamLayout {
    /// Installs `rows` (one `Vec` of `b` bit ids per register, ids below
    /// `nbits`) into fresh memory. All shared bits start at zero.
    pub fn install(m: &mut Machine, nbits: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let r = rows.len();
        let b = rows.first().map_or(0, Vec::len);
        let k = m.k();
        if r == 0 || b == 0 {
            return Err(Error::Construction("layout needs at least one register of one bit".into()));
        }
        if b > k || b > m.w() as usize {
            return Err(Error::Construction(format!(
                "{b}-bit registers need b <= k = {k} and b <= w = {}",
                m.w()
            )));
        }
        let mut flat = Vec::with_capacity(r * k);
        let mut seen = vec![usize::MAX; nbits];
        for (t, row) in rows.iter().enumerate() {
            if row.len() != b {
                return Err(Error::Construction(format!("register {t} has {} bits, expected {b}", row.len())));
            }
            for (j, &id) in row.iter().enumerate() {
                if id as usize >= nbits {
                    return Err(Error::Construction(format!("register {t} bit {j}: id {id} >= {nbits}")));
                }
                if seen[id as usize] == t {
                    return Err(Error::Construction(format!("register {t} names bit {id} twice")));
                }
                seen[id as usize] = t;
            }
            flat.extend_from_slice(row);
            flat.extend((0..(k - b) as u64).map(|p| nbits as u64 + p));
        }
        let rows_base = m.alloc(flat.len())?;
        m.preload(rows_base, &flat)?;
        let a_base = m.alloc(nbits + k - b)?;
        let io_cell = m.alloc(1)?;
        Ok(FsRamLayout { r, b, nbits, rows_base, a_base, io_cell, stride: k })
    }

    /// Leaf-to-root paths of a complete binary tree over `2^depth`
    /// leaves. Nodes use heap numbering from 1, so id 0 is never named.
    pub fn yggdrasil_rows(depth: u32) -> Vec<Vec<u64>> {
        let leaves = 1u64 << depth;
        (0..leaves / 2)
            .map(|i| (0..depth).map(|j| (i >> j) + (1 << (depth - j - 1))).collect())
            .collect()
    }

    pub fn yggdrasil(m: &mut Machine, depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Construction("tree depth must be at least 1".into()));
        }
        Self::install(m, 1 << depth, &Self::yggdrasil_rows(depth))
    }

    /// Parses the text form: a header `r b B`, then `r` lines of `b` ids.
    pub fn parse(text: &str) -> Result<(usize, Vec<Vec<u64>>)> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Input("empty layout file".into()))?;
        let nums = |l: &str| -> Result<Vec<u64>> {
            l.split_whitespace()
                .map(|s| s.parse().map_err(|_| Error::Input(format!("bad integer {s:?} in layout"))))
                .collect()
        };
        let h = nums(header)?;
        let [r, b, nbits] = h[..] else {
            return Err(Error::Input(format!("layout header must be `r b B`, got {header:?}")));
        };
        let rows: Vec<Vec<u64>> = lines.map(nums).collect::<Result<_>>()?;
        if rows.len() as u64 != r {
            return Err(Error::Input(format!("header promises {r} registers, file has {}", rows.len())));
        }
        if let Some((t, row)) = rows.iter().enumerate().find(|(_, row)| row.len() as u64 != b) {
            return Err(Error::Input(format!("register {t} lists {} ids, header says {b}", row.len())));
        }
        Ok((nbits as usize, rows))
    }

    pub fn registers(&self) -> usize {
        self.r
    }

    pub fn width(&self) -> usize {
        self.b
    }

    pub fn bit_count(&self) -> usize {
        self.nbits
    }

    /// Address of `A[0]`; the dummy cells follow `A[nbits - 1]`.
    pub fn bits_base(&self) -> u64 {
        self.a_base
    }

    /// Address of row `t` of `R` (`k` cells, padded).
    pub fn row_addr(&self, t: usize) -> u64 {
        self.rows_base + (t * self.stride) as u64
    }

    fn check(&self, t: usize) -> Result<()> {
        if t < self.r {
            Ok(())
        } else {
            Err(Error::Fault(format!("register {t} out of range (r = {})", self.r)))
        }
    }

    /// `reg[t]`, bit `j` at weight `2^j`.
    pub fn read(&self, m: &mut Machine, t: usize) -> Result<u64> {
        self.check(t)?;
        let ids = m.read_word(self.row_addr(t))?;
        let bits = m.read_content(&ids, self.a_base)?;
        let packed = m.compress(&bits)?;
        m.write_block(&packed, 0, self.io_cell)?;
        m.load(self.io_cell)
    }

    /// `reg[t] <- bits`, all `b` positions at once.
    pub fn write(&self, m: &mut Machine, t: usize, bits: u64) -> Result<()> {
        self.check(t)?;
        if self.b < 64 && bits >> self.b != 0 {
            return Err(Error::Input(format!("value {bits:#x} wider than {} bits", self.b)));
        }
        m.store(self.io_cell, bits)?;
        let z = m.zero();
        let w = m.read_block(&z, 0, self.io_cell)?;
        let w = m.spread(&w)?;
        let ids = m.read_word(self.row_addr(t))?;
        m.write_content(&w, &ids, self.a_base)
    }

    /// Host view of `A`, uncharged.
    pub fn dump(&self, m: &Machine) -> Vec<u64> {
        m.peek(self.a_base, self.nbits).to_vec()
    }
}
