//! Dynamic prefix sums over a commutative monoid.
//!
//! A complete binary tree sits on top of the array. Every internal node
//! keeps the sum of its left subtree in `m` shared bits, and register `j`
//! is the whole leaf-to-root path of leaf `j`, `n * m` bits with the
//! level-`l` node in field `l - 1`. `retrieve(j)` adds `A[j]` to the left
//! sums of the ancestors that have `j` in their right subtree; `update(j,
//! d)` adds `d` to the left sums of the ancestors that have `j` on the
//! left.
//!
//! The path word is handled `c = ceil(n / 2^iota)` fields at a time. It is
//! broadcast to `2^iota` blocks, block `q` keeps chunk `q`, and `iota`
//! masked shifts bring every chunk down to offset 0. One gather then looks
//! up all chunks in a table, and `iota` shift-and-combine steps fold the
//! blocks together. Tables hold `2^(c*m)` entries for retrieve and
//! `2^(c*m + c + m)` for update.

use super::FsRamLayout;
use crate::{Error, FieldLayout, Machine, Result, WideWord};

/// Commutative operation with identity 0 on values below a bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monoid {
    /// Addition modulo the bound.
    AddMod(u64),
    /// Maximum of values below the bound.
    Max(u64),
}

impl Monoid {
    pub fn bound(&self) -> u64 {
        match *self {
            Monoid::AddMod(b) | Monoid::Max(b) => b,
        }
    }

    pub fn apply(&self, a: u64, b: u64) -> u64 {
        match *self {
            Monoid::AddMod(n) => (a + b) % n,
            Monoid::Max(_) => a.max(b),
        }
    }
}

const MAX_TABLE: u64 = 1 << 22;

pub struct PrefixSums {
    layout: FsRamLayout,
    op: Monoid,
    len: usize,
    levels: usize,
    mbits: usize,
    iota: u32,
    c: usize,
    leaves: u64,
    sel: u64,
    ret: u64,
    upd: u64,
    cell: u64,
    table_cells: u64,
    chunk_mask: WideWord,
    sel_chunk_mask: WideWord,
    steps: Vec<(WideWord, WideWord)>,
    fields: FieldLayout,
}

fn ceil_log2(x: u64) -> usize {
    (64 - (x.max(1) - 1).leading_zeros()) as usize
}

impl PrefixSums {
    /// `len` zeros under `op`, with trade-off parameter `iota`.
    pub fn new(m: &mut Machine, len: usize, op: Monoid, iota: u32) -> Result<Self> {
        let bound = op.bound();
        if len == 0 || bound < 2 {
            return Err(Error::Construction("need at least one entry and a bound of at least 2".into()));
        }
        let levels = ceil_log2(len as u64).max(1);
        let mbits = ceil_log2(bound);
        let (w, k) = (m.w() as usize, m.k());
        let b = levels * mbits;
        let chunks = 1usize << iota;
        let c = levels.div_ceil(chunks);
        if b > w || b > k || chunks > k {
            return Err(Error::Construction(format!(
                "path of {levels} x {mbits} bits and {chunks} chunks must fit w = {w}, k = {k}"
            )));
        }
        if (chunks as u64).saturating_mul(bound) >= 1 << (w - 1) {
            return Err(Error::Construction("block sums would overflow a cell".into()));
        }
        let ret_key = c * mbits;
        let upd_key = ret_key + c + mbits;
        if upd_key >= 63 || 1u64 << upd_key > MAX_TABLE {
            return Err(Error::Construction(format!("update table of 2^{upd_key} entries is too large; raise iota")));
        }

        let leaves = 1u64 << levels;
        let rows: Vec<Vec<u64>> = (0..leaves)
            .map(|j| {
                (1..=levels)
                    .flat_map(|l| {
                        let node = (leaves + j) >> l;
                        (0..mbits as u64).map(move |q| node * mbits as u64 + q)
                    })
                    .collect()
            })
            .collect();
        let layout = FsRamLayout::install(m, leaves as usize * mbits, &rows)?;

        let field = (1u64 << mbits) - 1;
        let sel_tab: Vec<u64> = (0..leaves)
            .map(|j| (0..levels).filter(|l| j >> l & 1 == 1).fold(0, |acc, l| acc | field << (l * mbits)))
            .collect();
        let fields_of = |key: u64, n: usize| (0..n).map(move |i| key >> (i * mbits) & field);
        let ret_tab: Vec<u64> =
            (0..1u64 << ret_key).map(|key| fields_of(key, c).fold(0, |acc, v| op.apply(acc, v % bound))).collect();
        let upd_tab: Vec<u64> = (0..1u64 << upd_key)
            .map(|key| {
                let chunk = key & ((1 << ret_key) - 1);
                let pick = key >> ret_key & ((1 << c) - 1);
                let d = key >> (ret_key + c);
                fields_of(chunk, c).enumerate().fold(0, |acc, (i, v)| {
                    let nv = if pick >> i & 1 == 1 { op.apply(v % bound, d % bound) } else { v };
                    acc | nv << (i * mbits)
                })
            })
            .collect();

        let sel = m.alloc(sel_tab.len())?;
        m.preload(sel, &sel_tab)?;
        let ret = m.alloc(ret_tab.len())?;
        m.preload(ret, &ret_tab)?;
        let upd = m.alloc(upd_tab.len())?;
        m.preload(upd, &upd_tab)?;
        let leaves_base = m.alloc(leaves as usize)?;
        let cell = m.alloc(1)?;

        let cfg = m.cfg();
        let range_mask = |lo: usize, hi: usize| if hi <= lo { 0 } else { ((1u128 << hi) - (1u128 << lo)) as u64 };
        let chunk_limbs: Vec<u64> = (0..chunks).map(|q| range_mask(q * c * mbits, ((q + 1) * c * mbits).min(b))).collect();
        let sel_limbs: Vec<u64> = (0..chunks).map(|q| range_mask(q * c, ((q + 1) * c).min(levels))).collect();
        let steps = (0..iota)
            .map(|s| {
                let limbs: Vec<u64> = (0..k).map(|q| if q >> s & 1 == 1 { cfg.block_mask() } else { 0 }).collect();
                let hi = WideWord::from_limbs(cfg, &limbs)?;
                let lo = hi.not();
                Ok((hi, lo))
            })
            .collect::<Result<_>>()?;

        Ok(PrefixSums {
            layout,
            op,
            len,
            levels,
            mbits,
            iota,
            c,
            leaves: leaves_base,
            sel,
            ret,
            upd,
            cell,
            table_cells: (sel_tab.len() + ret_tab.len() + upd_tab.len()) as u64,
            chunk_mask: WideWord::from_limbs(cfg, &chunk_limbs)?,
            sel_chunk_mask: WideWord::from_limbs(cfg, &sel_limbs)?,
            steps,
            fields: FieldLayout::new(&cfg, w)?,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iota(&self) -> u32 {
        self.iota
    }

    /// Lookup-table space in cells.
    pub fn table_cells(&self) -> u64 {
        self.table_cells
    }

    pub fn layout(&self) -> &FsRamLayout {
        &self.layout
    }

    fn check(&self, j: usize) -> Result<()> {
        if j < self.len {
            Ok(())
        } else {
            Err(Error::Fault(format!("index {j} outside array of {}", self.len)))
        }
    }

    fn broadcast(&self, m: &mut Machine, v: u64) -> Result<WideWord> {
        m.store(self.cell, v)?;
        let z = m.zero();
        m.read_content(&z, self.cell)
    }

    /// Moves block `q`'s content by `q * unit` bits, down when `down`.
    fn align(&self, m: &mut Machine, mut x: WideWord, unit: usize, down: bool) -> Result<WideWord> {
        for (s, (hi, lo)) in self.steps.iter().enumerate() {
            let moving = m.and(&x, hi)?;
            let staying = m.and(&x, lo)?;
            let by = unit << s;
            let moved = if down { m.shr(&moving, by)? } else { m.shl(&moving, by)? };
            x = m.or(&staying, &moved)?;
        }
        Ok(x)
    }

    /// Splits the path word into aligned chunks, one per block.
    fn chunks(&self, m: &mut Machine, path: u64) -> Result<WideWord> {
        let x = self.broadcast(m, path)?;
        let x = m.and(&x, &self.chunk_mask)?;
        self.align(m, x, self.c * self.mbits, true)
    }

    pub fn retrieve(&self, m: &mut Machine, j: usize) -> Result<u64> {
        self.check(j)?;
        let path = self.layout.read(m, j)?;
        let right = m.load(self.sel + j as u64)?;
        m.charge_scalar(1);
        let x = self.chunks(m, path & right)?;
        let mut t = m.read_content(&x, self.ret)?;
        let w = m.w() as usize;
        for s in 0..self.iota {
            let other = m.shr(&t, w << s)?;
            t = match self.op {
                Monoid::AddMod(_) => m.add(&t, &other)?,
                Monoid::Max(_) => m.field_max(&t, &other, self.fields, false)?,
            };
        }
        m.write_block(&t, 0, self.cell)?;
        let acc = m.load(self.cell)?;
        let own = m.load(self.leaves + j as u64)?;
        m.charge_scalar(2);
        Ok(self.op.apply(acc % self.op.bound(), own))
    }

    pub fn update(&self, m: &mut Machine, j: usize, d: u64) -> Result<()> {
        self.check(j)?;
        if d >= self.op.bound() {
            return Err(Error::Input(format!("value {d} not below {}", self.op.bound())));
        }
        let own = m.load(self.leaves + j as u64)?;
        m.charge_scalar(1);
        m.store(self.leaves + j as u64, self.op.apply(own, d))?;

        let path = self.layout.read(m, j)?;
        let x = self.chunks(m, path)?;
        let left = !(j as u64) & ((1 << self.levels) - 1);
        m.charge_scalar(2);
        let y = self.broadcast(m, left)?;
        let y = m.and(&y, &self.sel_chunk_mask)?;
        let y = self.align(m, y, self.c, true)?;
        let y = m.shl(&y, self.c * self.mbits)?;
        let dv = self.broadcast(m, d << (self.c * self.mbits + self.c))?;
        let key = m.or(&x, &y)?;
        let key = m.or(&key, &dv)?;
        let u = m.read_content(&key, self.upd)?;
        let mut u = self.align(m, u, self.c * self.mbits, false)?;
        let w = m.w() as usize;
        for s in 0..self.iota {
            let other = m.shr(&u, w << s)?;
            u = m.or(&u, &other)?;
        }
        m.write_block(&u, 0, self.cell)?;
        let new_path = m.load(self.cell)?;
        self.layout.write(m, j, new_path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::WideConfig;

    fn machine() -> Machine {
        Machine::new(WideConfig::new(32, 16).unwrap(), 1 << 20).unwrap()
    }

    #[test]
    fn three_updates() {
        for iota in [0, 1, 2] {
            let mut m = machine();
            let p = PrefixSums::new(&mut m, 8, Monoid::AddMod(16), iota).unwrap();
            for (j, d) in [(0, 3), (2, 5), (5, 1)] {
                p.update(&mut m, j, d).unwrap();
            }
            assert_eq!(p.retrieve(&mut m, 5).unwrap(), 9, "iota {iota}");
            assert_eq!(p.retrieve(&mut m, 1).unwrap(), 3);
            assert_eq!(p.retrieve(&mut m, 7).unwrap(), 9);
        }
    }

    #[test]
    fn fresh_and_first() {
        let mut m = machine();
        let p = PrefixSums::new(&mut m, 8, Monoid::Max(16), 1).unwrap();
        assert!((0..8).all(|j| p.retrieve(&mut m, j).unwrap() == 0));
        p.update(&mut m, 0, 11).unwrap();
        assert!((0..8).all(|j| p.retrieve(&mut m, j).unwrap() == 11));
        p.update(&mut m, 6, 13).unwrap();
        assert_eq!(p.retrieve(&mut m, 5).unwrap(), 11);
        assert_eq!(p.retrieve(&mut m, 6).unwrap(), 13);
        assert!(p.retrieve(&mut m, 8).is_err());
    }
}
