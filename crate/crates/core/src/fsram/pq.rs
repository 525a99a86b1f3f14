//! Bounded-universe priority queue on the tree layout.
//!
//! A node's shared bit says whether its subtree holds any element. Ordinary
//! memory keeps a presence flag and a sorted doubly-linked list, plus the
//! minimum and maximum of every node's subtree. The per-node extremes are
//! indexed by the same ids as the shared bits, so a register row doubles
//! as the gather/scatter address vector that updates a whole path at once.
//!
//! Minima are stored complemented (`C - min`, empty = 0) and maxima
//! shifted (`max + 1`, empty = 0) so both update with a fieldwise max.

use super::FsRamLayout;
use crate::{Error, FieldLayout, Machine, Result, WideWord};

pub struct PriorityQueue {
    layout: FsRamLayout,
    depth: u32,
    universe: u64,
    present: u64,
    next: u64,
    prev: u64,
    nmin: u64,
    maxp: u64,
    cell: u64,
    fields: FieldLayout,
    top: u64,
}

impl PriorityQueue {
    /// An empty queue over `0..2^depth`.
    pub fn new(m: &mut Machine, depth: u32) -> Result<Self> {
        let w = m.w();
        if depth == 0 || depth as usize > m.k() || depth >= w - 2 {
            return Err(Error::Construction(format!(
                "universe 2^{depth} needs 1 <= depth <= k and depth < w - 2"
            )));
        }
        let universe = 1u64 << depth;
        let layout = FsRamLayout::yggdrasil(m, depth)?;
        let slots = universe as usize + m.k() - depth as usize;
        let present = m.alloc(universe as usize)?;
        let next = m.alloc(universe as usize + 1)?;
        let prev = m.alloc(universe as usize + 1)?;
        let nmin = m.alloc(slots)?;
        let maxp = m.alloc(slots)?;
        let cell = m.alloc(1)?;
        let fields = FieldLayout::new(&m.cfg(), w as usize)?;
        Ok(PriorityQueue {
            layout,
            depth,
            universe,
            present,
            next,
            prev,
            nmin,
            maxp,
            cell,
            fields,
            top: (1u64 << (w - 1)) - 1,
        })
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn layout(&self) -> &FsRamLayout {
        &self.layout
    }

    fn nil(&self) -> u64 {
        self.universe
    }

    fn check(&self, x: u64) -> Result<()> {
        if x < self.universe {
            Ok(())
        } else {
            Err(Error::Input(format!("element {x} outside universe {}", self.universe)))
        }
    }

    fn broadcast(&self, m: &mut Machine, v: u64) -> Result<WideWord> {
        m.store(self.cell, v)?;
        let z = m.zero();
        m.read_content(&z, self.cell)
    }

    /// Every block `j >= from` all ones, for `from <= depth`.
    fn blocks_from(&self, m: &mut Machine, from: u32) -> Result<WideWord> {
        let bits = ((1u64 << self.depth) - 1) & !((1u64 << from) - 1);
        m.charge_scalar(3);
        m.store(self.cell, bits)?;
        let z = m.zero();
        let low = m.read_block(&z, 0, self.cell)?;
        let ones = m.spread(&low)?;
        let up = m.shl(&ones, m.w() as usize)?;
        m.sub(&up, &ones)
    }

    fn level(&self, m: &mut Machine, x: u64, y: u64) -> u32 {
        m.charge_scalar(2);
        if y == self.nil() {
            self.depth
        } else {
            63 - (x ^ y).leading_zeros()
        }
    }

    pub fn contains(&self, m: &mut Machine, x: u64) -> Result<bool> {
        self.check(x)?;
        Ok(m.load(self.present + x)? == 1)
    }

    pub fn min(&self, m: &mut Machine) -> Result<Option<u64>> {
        let mp = m.load(self.maxp + 1)?;
        m.charge_scalar(1);
        if mp == 0 {
            return Ok(None);
        }
        let nm = m.load(self.nmin + 1)?;
        m.charge_scalar(1);
        Ok(Some(self.top - nm))
    }

    fn max(&self, m: &mut Machine) -> Result<u64> {
        let mp = m.load(self.maxp + 1)?;
        m.charge_scalar(1);
        Ok(if mp == 0 { self.nil() } else { mp - 1 })
    }

    /// Smallest element greater than `x`.
    pub fn successor(&self, m: &mut Machine, x: u64) -> Result<Option<u64>> {
        self.check(x)?;
        let s = if m.load(self.present + x)? == 1 {
            m.load(self.next + x)?
        } else {
            self.successor_absent(m, x)?
        };
        m.charge_scalar(1);
        Ok((s != self.nil()).then_some(s))
    }

    fn successor_absent(&self, m: &mut Machine, x: u64) -> Result<u64> {
        let reg = (x >> 1) as usize;
        let path = self.layout.read(m, reg)?;
        m.charge_scalar(2);
        if path == 0 {
            return Ok(self.nil());
        }
        let j0 = path.trailing_zeros() as u64;
        let id = m.load(self.layout.row_addr(reg) + j0)?;
        let hi = m.load(self.maxp + id)? - 1;
        m.charge_scalar(2);
        if hi < x {
            m.load(self.next + hi)
        } else {
            Ok(self.top - m.load(self.nmin + id)?)
        }
    }

    pub fn insert(&self, m: &mut Machine, x: u64) -> Result<()> {
        self.check(x)?;
        if m.load(self.present + x)? == 1 {
            return Ok(());
        }
        let s = self.successor_absent(m, x)?;
        let p = if s == self.nil() { self.max(m)? } else { m.load(self.prev + s)? };
        m.store(self.next + p, x)?;
        m.store(self.prev + x, p)?;
        m.store(self.next + x, s)?;
        m.store(self.prev + s, x)?;
        m.store(self.present + x, 1)?;

        let reg = (x >> 1) as usize;
        self.layout.write(m, reg, (1 << self.depth) - 1)?;
        let ids = m.read_word(self.layout.row_addr(reg))?;
        for (base, v) in [(self.nmin, self.top - x), (self.maxp, x + 1)] {
            m.charge_scalar(1);
            let cur = m.read_content(&ids, base)?;
            let xv = self.broadcast(m, v)?;
            let upd = m.field_max(&cur, &xv, self.fields, false)?;
            m.write_content(&upd, &ids, base)?;
        }
        Ok(())
    }

    pub fn delete(&self, m: &mut Machine, x: u64) -> Result<()> {
        self.check(x)?;
        if m.load(self.present + x)? == 0 {
            return Err(Error::Input(format!("delete of absent element {x}")));
        }
        let p = m.load(self.prev + x)?;
        let s = m.load(self.next + x)?;
        m.store(self.next + p, s)?;
        m.store(self.prev + s, p)?;
        m.store(self.present + x, 0)?;

        let (lp, ls) = (self.level(m, x, p), self.level(m, x, s));
        let reg = (x >> 1) as usize;
        let keep = ((1u64 << self.depth) - 1) & !((1u64 << lp.min(ls)) - 1);
        m.charge_scalar(3);
        self.layout.write(m, reg, keep)?;

        // a node whose extreme was x takes the neighbour on that side if
        // the neighbour shares the node, otherwise it is now empty
        let ids = m.read_word(self.layout.row_addr(reg))?;
        let nil = self.nil();
        for (base, old, nb, lvl) in [
            (self.nmin, self.top - x, if s == nil { 0 } else { self.top - s }, ls),
            (self.maxp, x + 1, if p == nil { 0 } else { p + 1 }, lp),
        ] {
            m.charge_scalar(2);
            let cur = m.read_content(&ids, base)?;
            let ov = self.broadcast(m, old)?;
            let hit = m.field_eq(&cur, &ov, self.fields)?;
            let nv = self.broadcast(m, nb)?;
            let inside = self.blocks_from(m, lvl)?;
            let repl = m.and(&nv, &inside)?;
            let miss = m.not(&hit);
            let kept = m.and(&cur, &miss)?;
            let put = m.and(&repl, &hit)?;
            let upd = m.or(&kept, &put)?;
            m.write_content(&upd, &ids, base)?;
        }
        Ok(())
    }
}
