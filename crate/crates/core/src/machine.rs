//! The machine: `w`-bit memory cells, the six wide memory primitives and a
//! cost counter.
//!
//! Every wide ALU operation issued through [`Machine`] costs one
//! `wide_alu` unit and every block/word/content read or write costs one
//! `wide_mem` unit. Constants built on the host (masks, splats) are free,
//! as are [`preload`](Machine::preload) writes used to install
//! precomputed tables.

use std::ops::{Add, Sub};

use crate::word::{FieldLayout, WideConfig, WideWord};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CostCounter {
    pub wide_alu: u64,
    pub wide_mem: u64,
    pub scalar_alu: u64,
    pub scalar_mem: u64,
}

impl CostCounter {
    pub fn wide(&self) -> u64 {
        self.wide_alu + self.wide_mem
    }

    pub fn scalar(&self) -> u64 {
        self.scalar_alu + self.scalar_mem
    }

    pub fn total(&self) -> u64 {
        self.wide() + self.scalar()
    }
}

impl Add for CostCounter {
    type Output = CostCounter;

    fn add(self, o: CostCounter) -> CostCounter {
        CostCounter {
            wide_alu: self.wide_alu + o.wide_alu,
            wide_mem: self.wide_mem + o.wide_mem,
            scalar_alu: self.scalar_alu + o.scalar_alu,
            scalar_mem: self.scalar_mem + o.scalar_mem,
        }
    }
}

impl Sub for CostCounter {
    type Output = CostCounter;

    fn sub(self, o: CostCounter) -> CostCounter {
        CostCounter {
            wide_alu: self.wide_alu - o.wide_alu,
            wide_mem: self.wide_mem - o.wide_mem,
            scalar_alu: self.scalar_alu - o.scalar_alu,
            scalar_mem: self.scalar_mem - o.scalar_mem,
        }
    }
}

/// Which of the three addressing modes a memory primitive used.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Access {
    Block,
    Word,
    Content,
}

pub struct Machine {
    cfg: WideConfig,
    mem: Vec<u64>,
    counter: CostCounter,
    next_free: u64,
    preloaded: u64,
}

/// Allocation watermark returned by [`Machine::mark`].
#[derive(Clone, Copy, Debug)]
pub struct Mark(u64);

impl Machine {
    /// A machine with `cells` zeroed memory cells. Addresses are `w`-bit
    /// values, so `cells` may not exceed `2^w`.
    pub fn new(cfg: WideConfig, cells: usize) -> Result<Self> {
        if cfg.w() < 64 && cells as u128 > 1u128 << cfg.w() {
            return Err(Error::Config(format!(
                "{cells} cells are not addressable with {}-bit addresses",
                cfg.w()
            )));
        }
        Ok(Machine { cfg, mem: vec![0; cells], counter: CostCounter::default(), next_free: 0, preloaded: 0 })
    }

    #[inline]
    pub fn cfg(&self) -> WideConfig {
        self.cfg
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.cfg.k()
    }

    #[inline]
    pub fn w(&self) -> u32 {
        self.cfg.w()
    }

    pub fn size(&self) -> usize {
        self.mem.len()
    }

    pub fn counter(&self) -> CostCounter {
        self.counter
    }

    pub fn reset_counter(&mut self) {
        self.counter = CostCounter::default();
    }

    /// Cells written by [`preload`](Self::preload) so far.
    pub fn preloaded_cells(&self) -> u64 {
        self.preloaded
    }

    /// Reserves `n` consecutive cells and returns the first address.
    pub fn alloc(&mut self, n: usize) -> Result<u64> {
        let start = self.next_free;
        let end = start.checked_add(n as u64).filter(|&e| e <= self.mem.len() as u64);
        match end {
            Some(e) => {
                self.next_free = e;
                Ok(start)
            }
            None => Err(Error::Fault(format!(
                "out of memory: {n} cells requested, {} free",
                self.mem.len() as u64 - start
            ))),
        }
    }

    pub fn mark(&self) -> Mark {
        Mark(self.next_free)
    }

    /// Frees everything allocated after `mark` and zeroes it.
    pub fn release_to(&mut self, mark: Mark) {
        for c in &mut self.mem[mark.0 as usize..self.next_free as usize] {
            *c = 0;
        }
        self.next_free = mark.0;
    }

    pub fn free_cells(&self) -> usize {
        self.mem.len() - self.next_free as usize
    }

    // ---- constants (host-built, uncharged) ----

    pub fn zero(&self) -> WideWord {
        WideWord::zero(self.cfg)
    }

    pub fn ones(&self) -> WideWord {
        WideWord::ones(self.cfg)
    }

    pub fn splat(&self, v: u64) -> WideWord {
        WideWord::splat(self.cfg, v)
    }

    pub fn constant(&self, limbs: &[u64]) -> Result<WideWord> {
        WideWord::from_limbs(self.cfg, limbs)
    }

    // ---- wide ALU ----

    #[inline]
    fn alu(&mut self) {
        self.counter.wide_alu += 1;
    }

    pub fn and(&mut self, a: &WideWord, b: &WideWord) -> Result<WideWord> {
        self.alu();
        a.and(b)
    }

    pub fn or(&mut self, a: &WideWord, b: &WideWord) -> Result<WideWord> {
        self.alu();
        a.or(b)
    }

    pub fn xor(&mut self, a: &WideWord, b: &WideWord) -> Result<WideWord> {
        self.alu();
        a.xor(b)
    }

    pub fn not(&mut self, a: &WideWord) -> WideWord {
        self.alu();
        a.not()
    }

    pub fn add(&mut self, a: &WideWord, b: &WideWord) -> Result<WideWord> {
        self.alu();
        a.add(b)
    }

    pub fn sub(&mut self, a: &WideWord, b: &WideWord) -> Result<WideWord> {
        self.alu();
        a.sub(b)
    }

    /// Toward high significance.
    pub fn shl(&mut self, a: &WideWord, i: usize) -> Result<WideWord> {
        self.alu();
        a.shl(i)
    }

    /// Toward low significance.
    pub fn shr(&mut self, a: &WideWord, i: usize) -> Result<WideWord> {
        self.alu();
        a.shr(i)
    }

    pub fn compress(&mut self, a: &WideWord) -> Result<WideWord> {
        self.alu();
        a.compress()
    }

    pub fn spread(&mut self, a: &WideWord) -> Result<WideWord> {
        self.alu();
        a.spread()
    }

    pub fn field_compare_ge(&mut self, a: &WideWord, b: &WideWord, l: FieldLayout) -> Result<WideWord> {
        self.alu();
        a.field_compare_ge(b, l)
    }

    pub fn field_eq(&mut self, a: &WideWord, b: &WideWord, l: FieldLayout) -> Result<WideWord> {
        self.alu();
        a.field_eq(b, l)
    }

    pub fn field_max(&mut self, a: &WideWord, b: &WideWord, l: FieldLayout, signed: bool) -> Result<WideWord> {
        self.alu();
        a.field_max(b, l, signed)
    }

    /// Branch on `a != 0`.
    pub fn test_nonzero(&mut self, a: &WideWord) -> bool {
        self.alu();
        !a.is_zero()
    }

    /// Branch on `a & b != 0`.
    pub fn test_and(&mut self, a: &WideWord, b: &WideWord) -> Result<bool> {
        self.alu();
        Ok(!a.and(b)?.is_zero())
    }

    // ---- wide memory ----

    fn addr(&self, kind: Access, block: usize, base: u64, off: u64) -> Result<usize> {
        match base.checked_add(off) {
            Some(a) if a < self.mem.len() as u64 => Ok(a as usize),
            Some(a) => Err(Error::Fault(format!(
                "{kind:?} access, block {block}: address {a} outside memory of {} cells",
                self.mem.len()
            ))),
            None => Err(Error::Fault(format!("{kind:?} access, block {block}: address {base}+{off} wraps"))),
        }
    }

    fn check_word(&self, w: &WideWord) -> Result<()> {
        if w.config().same_shape(&self.cfg) {
            Ok(())
        } else {
            Err(Error::ConfigMismatch {
                left: (self.cfg.w(), self.cfg.k()),
                right: (w.config().w(), w.config().k()),
            })
        }
    }

    /// `W_j <- MEM[base + j]`, other blocks kept.
    pub fn read_block(&mut self, w: &WideWord, j: usize, base: u64) -> Result<WideWord> {
        self.counter.wide_mem += 1;
        self.check_word(w)?;
        if j >= self.k() {
            return Err(Error::Fault(format!("Block access: block {j} out of range")));
        }
        let a = self.addr(Access::Block, j, base, j as u64)?;
        Ok(w.with_block(j, self.mem[a]))
    }

    /// `W_j <- MEM[base + j]` for all `j`.
    pub fn read_word(&mut self, base: u64) -> Result<WideWord> {
        self.counter.wide_mem += 1;
        let k = self.k();
        let last = self.addr(Access::Word, k - 1, base, k as u64 - 1)?;
        WideWord::from_limbs(self.cfg, &self.mem[last + 1 - k..=last])
    }

    /// `W_j <- MEM[base + W_j]` for all `j`.
    pub fn read_content(&mut self, w: &WideWord, base: u64) -> Result<WideWord> {
        self.counter.wide_mem += 1;
        self.check_word(w)?;
        let mut out = Vec::with_capacity(self.k());
        for (j, &off) in w.limbs().iter().enumerate() {
            out.push(self.mem[self.addr(Access::Content, j, base, off)?]);
        }
        WideWord::from_limbs(self.cfg, &out)
    }

    /// `MEM[base + j] <- W_j`.
    pub fn write_block(&mut self, w: &WideWord, j: usize, base: u64) -> Result<()> {
        self.counter.wide_mem += 1;
        self.check_word(w)?;
        if j >= self.k() {
            return Err(Error::Fault(format!("Block access: block {j} out of range")));
        }
        let a = self.addr(Access::Block, j, base, j as u64)?;
        self.mem[a] = w.block(j);
        Ok(())
    }

    /// `MEM[base + j] <- W_j` for all `j`.
    pub fn write_word(&mut self, w: &WideWord, base: u64) -> Result<()> {
        self.counter.wide_mem += 1;
        self.check_word(w)?;
        let k = self.k();
        let last = self.addr(Access::Word, k - 1, base, k as u64 - 1)?;
        self.mem[last + 1 - k..=last].copy_from_slice(w.limbs());
        Ok(())
    }

    /// `MEM[base + V_j] <- W_j` for all `j`; targets must be distinct.
    pub fn write_content(&mut self, w: &WideWord, v: &WideWord, base: u64) -> Result<()> {
        self.counter.wide_mem += 1;
        self.check_word(w)?;
        self.check_word(v)?;
        let mut targets = Vec::with_capacity(self.k());
        for (j, &off) in v.limbs().iter().enumerate() {
            targets.push((self.addr(Access::Content, j, base, off)?, j));
        }
        targets.sort_unstable();
        if let Some(p) = targets.windows(2).find(|p| p[0].0 == p[1].0) {
            let (first, second) = (p[0].1.min(p[1].1), p[0].1.max(p[1].1));
            return Err(Error::Crew { first, second, addr: p[0].0 as u64 });
        }
        for (a, j) in targets {
            self.mem[a] = w.block(j);
        }
        Ok(())
    }

    // ---- scalar side ----

    pub fn load(&mut self, addr: u64) -> Result<u64> {
        self.counter.scalar_mem += 1;
        let a = self.addr(Access::Block, 0, addr, 0)?;
        Ok(self.mem[a])
    }

    pub fn store(&mut self, addr: u64, v: u64) -> Result<()> {
        self.counter.scalar_mem += 1;
        let a = self.addr(Access::Block, 0, addr, 0)?;
        self.mem[a] = v & self.cfg.block_mask();
        Ok(())
    }

    /// Charges `n` scalar ALU instructions.
    pub fn charge_scalar(&mut self, n: u64) {
        self.counter.scalar_alu += n;
    }

    /// Uncharged bulk write for tables computed before a run.
    pub fn preload(&mut self, addr: u64, values: &[u64]) -> Result<()> {
        let mask = self.cfg.block_mask();
        if let Some(v) = values.iter().find(|&&v| v & !mask != 0) {
            return Err(Error::Construction(format!("table value {v:#x} wider than a cell")));
        }
        let end = addr as usize + values.len();
        if end > self.mem.len() {
            return Err(Error::Fault(format!("preload past end of memory ({end} > {})", self.mem.len())));
        }
        self.mem[addr as usize..end].copy_from_slice(values);
        self.preloaded += values.len() as u64;
        Ok(())
    }

    /// Uncharged host view of memory, for inspection only.
    pub fn peek(&self, addr: u64, len: usize) -> &[u64] {
        &self.mem[addr as usize..addr as usize + len]
    }
}
