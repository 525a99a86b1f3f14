//! Wide-word registers.
//!
//! A [`WideWord`] is one `k * w`-bit integer stored as `k` blocks of `w`
//! bits. Block `j` holds bits `j*w .. (j+1)*w - 1`, bit 0 is the least
//! significant bit. Arithmetic ignores block boundaries and wraps modulo
//! `2^(k*w)`; the block split only matters for memory access and for
//! [`compress`](WideWord::compress) / [`spread`](WideWord::spread).
//!
//! Shift directions are named by significance rather than by drawing
//! direction:
//!
//! | here                  | value effect      | pseudocode drawn low-to-high |
//! |-----------------------|-------------------|------------------------------|
//! | [`shl`](WideWord::shl) (toward high) | `x * 2^i mod 2^kw` | `x >> i` |
//! | [`shr`](WideWord::shr) (toward low)  | `floor(x / 2^i)`   | `x << i` |
//!
//! Multiplication is deliberately absent: the model only offers the
//! restricted instruction set plus compress/spread.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use crate::{Error, Result};

/// Shape of the wide word: `k` blocks of `w` bits.
///
/// `strict` turns on precondition checks for compress, spread and the
/// field operations. It does not take part in shape compatibility.
#[derive(Clone, Copy, Debug)]
pub struct WideConfig {
    w: u32,
    k: usize,
    strict: bool,
}

impl WideConfig {
    pub const MAX_BLOCKS: usize = 1024;

    pub fn new(w: u32, k: usize) -> Result<Self> {
        if !(8..=64).contains(&w) || !w.is_power_of_two() {
            return Err(Error::Config(format!(
                "block width must be a power of two in 8..=64, got {w}"
            )));
        }
        if !(1..=Self::MAX_BLOCKS).contains(&k) {
            return Err(Error::Config(format!(
                "block count must be in 1..={}, got {k}",
                Self::MAX_BLOCKS
            )));
        }
        Ok(WideConfig { w, k, strict: true })
    }

    /// Same shape with precondition checks turned off. Offending bits are
    /// masked away instead of raising an error.
    pub fn permissive(self) -> Self {
        WideConfig { strict: false, ..self }
    }

    pub fn with_strict(self, strict: bool) -> Self {
        WideConfig { strict, ..self }
    }

    #[inline]
    pub fn w(&self) -> u32 {
        self.w
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn strict(&self) -> bool {
        self.strict
    }

    /// Total width in bits.
    #[inline]
    pub fn bits(&self) -> usize {
        self.w as usize * self.k
    }

    /// Mask of one block.
    #[inline]
    pub fn block_mask(&self) -> u64 {
        if self.w == 64 {
            u64::MAX
        } else {
            (1u64 << self.w) - 1
        }
    }

    pub fn same_shape(&self, other: &WideConfig) -> bool {
        self.w == other.w && self.k == other.k
    }
}

impl PartialEq for WideConfig {
    fn eq(&self, other: &Self) -> bool {
        self.same_shape(other)
    }
}

impl Eq for WideConfig {}

/// Division of a wide word into `f`-bit fields, tiling from bit 0 upward.
///
/// Bit `f - 1` of each field is its test bit. Bits above
/// `count * f` are unused and stay zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldLayout {
    f: usize,
    count: usize,
}

impl FieldLayout {
    pub fn new(cfg: &WideConfig, f: usize) -> Result<Self> {
        if f < 2 || f > cfg.bits() {
            return Err(Error::Config(format!(
                "field width must be in 2..={}, got {f}",
                cfg.bits()
            )));
        }
        Ok(FieldLayout { f, count: cfg.bits() / f })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.f
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.count
    }

    #[inline]
    pub fn test_bit(&self) -> usize {
        self.f - 1
    }

    /// Largest payload value, `2^(f-1) - 1`.
    pub fn payload_max(&self) -> u64 {
        if self.f - 1 >= 64 {
            u64::MAX
        } else {
            (1u64 << (self.f - 1)) - 1
        }
    }
}

/// A `k * w`-bit register value.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WideWord {
    cfg: WideConfig,
    limbs: Vec<u64>,
}

impl fmt::Debug for WideWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WideWord(w={}, k={}, [", self.cfg.w, self.cfg.k)?;
        for (j, l) in self.limbs.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l:#x}")?;
        }
        write!(f, "])")
    }
}

impl std::hash::Hash for WideConfig {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.w.hash(state);
        self.k.hash(state);
    }
}

/// Binary bitwise operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BitOp {
    And,
    Or,
    Xor,
}

impl WideWord {
    pub fn zero(cfg: WideConfig) -> Self {
        WideWord { cfg, limbs: vec![0; cfg.k] }
    }

    /// All `k * w` bits set.
    pub fn ones(cfg: WideConfig) -> Self {
        WideWord { cfg, limbs: vec![cfg.block_mask(); cfg.k] }
    }

    /// Blocks `0..limbs.len()` from `limbs`, the rest zero.
    pub fn from_limbs(cfg: WideConfig, limbs: &[u64]) -> Result<Self> {
        if limbs.len() > cfg.k {
            return Err(Error::Construction(format!(
                "{} limbs given for a {}-block word",
                limbs.len(),
                cfg.k
            )));
        }
        let mask = cfg.block_mask();
        if let Some((j, v)) = limbs.iter().enumerate().find(|(_, &v)| v & !mask != 0) {
            return Err(Error::Construction(format!(
                "limb {j} = {v:#x} does not fit in {} bits",
                cfg.w
            )));
        }
        let mut out = Self::zero(cfg);
        out.limbs[..limbs.len()].copy_from_slice(limbs);
        Ok(out)
    }

    /// Every block holds `value` (truncated to `w` bits).
    pub fn splat(cfg: WideConfig, value: u64) -> Self {
        WideWord { cfg, limbs: vec![value & cfg.block_mask(); cfg.k] }
    }

    /// The low `n` bits set, `n <= k*w`.
    pub fn low_mask(cfg: WideConfig, n: usize) -> Self {
        let mut out = Self::zero(cfg);
        for b in 0..n.min(cfg.bits()) / cfg.w as usize {
            out.limbs[b] = cfg.block_mask();
        }
        let rem = n.min(cfg.bits()) % cfg.w as usize;
        if rem > 0 {
            out.limbs[n / cfg.w as usize] = (1u64 << rem) - 1;
        }
        out
    }

    /// The same value repeated in every field of `layout`.
    pub fn field_splat(cfg: WideConfig, layout: FieldLayout, value: u64) -> Self {
        let mut out = Self::zero(cfg);
        for i in 0..layout.count() {
            out.deposit(i * layout.width(), layout.width().min(64), value);
        }
        out
    }

    /// Builds a word from per-field values (two's complement payloads are
    /// truncated to `f - 1` bits).
    pub fn from_fields(cfg: WideConfig, layout: FieldLayout, values: &[i64]) -> Result<Self> {
        if values.len() > layout.count() {
            return Err(Error::Construction(format!(
                "{} fields given, layout holds {}",
                values.len(),
                layout.count()
            )));
        }
        let payload = layout.width() - 1;
        let mut out = Self::zero(cfg);
        for (i, &v) in values.iter().enumerate() {
            let bits = if payload >= 64 { v as u64 } else { (v as u64) & ((1u64 << payload) - 1) };
            out.deposit(i * layout.width(), payload.min(64), bits);
        }
        Ok(out)
    }

    /// Field `i` as an unsigned value (all `f` bits).
    pub fn field(&self, layout: FieldLayout, i: usize) -> u64 {
        self.extract(i * layout.width(), layout.width().min(64))
    }

    /// Field `i` payload read as a two's complement `(f-1)`-bit value.
    pub fn field_signed(&self, layout: FieldLayout, i: usize) -> i64 {
        let p = (layout.width() - 1).min(64);
        let raw = self.extract(i * layout.width(), p);
        if p == 64 {
            raw as i64
        } else if raw >> (p - 1) & 1 == 1 {
            raw as i64 - (1i64 << p)
        } else {
            raw as i64
        }
    }

    #[inline]
    pub fn config(&self) -> WideConfig {
        self.cfg
    }

    #[inline]
    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    #[inline]
    pub fn block(&self, j: usize) -> u64 {
        self.limbs[j]
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Bit `i` of the integer value.
    pub fn bit(&self, i: usize) -> bool {
        let w = self.cfg.w as usize;
        self.limbs[i / w] >> (i % w) & 1 == 1
    }

    /// `len <= 64` bits starting at bit `pos`.
    pub fn extract(&self, pos: usize, len: usize) -> u64 {
        let w = self.cfg.w as usize;
        let mut out = 0u64;
        let mut got = 0;
        while got < len {
            let p = pos + got;
            if p >= self.cfg.bits() {
                break;
            }
            let (j, o) = (p / w, p % w);
            let take = (w - o).min(len - got);
            let chunk = (self.limbs[j] >> o) & low_bits(take);
            out |= chunk << got;
            got += take;
        }
        out
    }

    fn deposit(&mut self, pos: usize, len: usize, value: u64) {
        let w = self.cfg.w as usize;
        let mut put = 0;
        while put < len {
            let p = pos + put;
            if p >= self.cfg.bits() {
                break;
            }
            let (j, o) = (p / w, p % w);
            let take = (w - o).min(len - put);
            let m = low_bits(take) << o;
            self.limbs[j] = (self.limbs[j] & !m) | (((value >> put) << o) & m);
            put += take;
        }
    }

    fn set_bit(&mut self, p: usize) {
        let w = self.cfg.w as usize;
        self.limbs[p / w] |= 1 << (p % w);
    }

    /// Overwrites block `j`.
    pub fn with_block(&self, j: usize, value: u64) -> Self {
        let mut out = self.clone();
        out.limbs[j] = value & self.cfg.block_mask();
        out
    }

    fn check_shape(&self, other: &WideWord) -> Result<()> {
        if self.cfg.same_shape(&other.cfg) {
            Ok(())
        } else {
            Err(Error::ConfigMismatch {
                left: (self.cfg.w, self.cfg.k),
                right: (other.cfg.w, other.cfg.k),
            })
        }
    }

    pub fn bitwise(&self, op: BitOp, other: &WideWord) -> Result<Self> {
        self.check_shape(other)?;
        let limbs = self
            .limbs
            .iter()
            .zip(&other.limbs)
            .map(|(&a, &b)| match op {
                BitOp::And => a & b,
                BitOp::Or => a | b,
                BitOp::Xor => a ^ b,
            })
            .collect();
        Ok(WideWord { cfg: self.cfg, limbs })
    }

    pub fn and(&self, other: &WideWord) -> Result<Self> {
        self.bitwise(BitOp::And, other)
    }

    pub fn or(&self, other: &WideWord) -> Result<Self> {
        self.bitwise(BitOp::Or, other)
    }

    pub fn xor(&self, other: &WideWord) -> Result<Self> {
        self.bitwise(BitOp::Xor, other)
    }

    pub fn not(&self) -> Self {
        let mask = self.cfg.block_mask();
        WideWord { cfg: self.cfg, limbs: self.limbs.iter().map(|&a| !a & mask).collect() }
    }

    /// `self + other mod 2^(k*w)`.
    pub fn add(&self, other: &WideWord) -> Result<Self> {
        self.check_shape(other)?;
        let w = self.cfg.w;
        let mask = self.cfg.block_mask();
        let mut carry = 0u128;
        let limbs = self
            .limbs
            .iter()
            .zip(&other.limbs)
            .map(|(&a, &b)| {
                let s = a as u128 + b as u128 + carry;
                carry = s >> w;
                (s as u64) & mask
            })
            .collect();
        Ok(WideWord { cfg: self.cfg, limbs })
    }

    /// `self - other mod 2^(k*w)`.
    pub fn sub(&self, other: &WideWord) -> Result<Self> {
        self.check_shape(other)?;
        let mask = self.cfg.block_mask();
        let mut borrow = 0u64;
        let limbs = self
            .limbs
            .iter()
            .zip(&other.limbs)
            .map(|(&a, &b)| {
                let (d1, o1) = a.overflowing_sub(b);
                let (d2, o2) = d1.overflowing_sub(borrow);
                // with w < 64 the wrapped difference carries garbage above bit w
                let under = if self.cfg.w == 64 { o1 || o2 } else { (a as u128) < b as u128 + borrow as u128 };
                borrow = under as u64;
                d2 & mask
            })
            .collect();
        Ok(WideWord { cfg: self.cfg, limbs })
    }

    fn check_shift(&self, i: usize) -> Result<()> {
        if i > self.cfg.bits() {
            Err(Error::ShiftRange { shift: i, width: self.cfg.bits() })
        } else {
            Ok(())
        }
    }

    /// Shift toward higher significance: `self * 2^i mod 2^(k*w)`.
    pub fn shl(&self, i: usize) -> Result<Self> {
        self.check_shift(i)?;
        let w = self.cfg.w as usize;
        let (q, r) = (i / w, i % w);
        let mask = self.cfg.block_mask();
        let k = self.cfg.k;
        let limbs = (0..k)
            .map(|j| {
                if j < q {
                    return 0;
                }
                let hi = self.limbs[j - q];
                if r == 0 {
                    return hi;
                }
                let lo = if j > q { self.limbs[j - q - 1] } else { 0 };
                let pair = (hi as u128) << w | lo as u128;
                ((pair >> (w - r)) as u64) & mask
            })
            .collect();
        Ok(WideWord { cfg: self.cfg, limbs })
    }

    /// Shift toward lower significance: `floor(self / 2^i)`.
    pub fn shr(&self, i: usize) -> Result<Self> {
        self.check_shift(i)?;
        let w = self.cfg.w as usize;
        let (q, r) = (i / w, i % w);
        let mask = self.cfg.block_mask();
        let k = self.cfg.k;
        let limbs = (0..k)
            .map(|j| {
                if j + q >= k {
                    return 0;
                }
                let lo = self.limbs[j + q];
                if r == 0 {
                    return lo;
                }
                let hi = if j + q + 1 < k { self.limbs[j + q + 1] } else { 0 };
                let pair = (hi as u128) << w | lo as u128;
                ((pair >> r) as u64) & mask
            })
            .collect();
        Ok(WideWord { cfg: self.cfg, limbs })
    }

    /// Gathers bit 0 of every block into bits `0..k`.
    pub fn compress(&self) -> Result<Self> {
        if self.cfg.strict {
            if let Some(j) = self.limbs.iter().position(|&l| l & !1 != 0) {
                return Err(Error::Precondition(format!(
                    "compress: block {j} has bits set above bit 0"
                )));
            }
        }
        let mut out = Self::zero(self.cfg);
        let w = self.cfg.w as usize;
        for (j, &l) in self.limbs.iter().enumerate() {
            if l & 1 == 1 {
                out.limbs[j / w] |= 1 << (j % w);
            }
        }
        Ok(out)
    }

    /// Inverse of [`compress`](Self::compress): bit `j` goes to bit 0 of
    /// block `j`, for `j < k`.
    pub fn spread(&self) -> Result<Self> {
        let k = self.cfg.k;
        if self.cfg.strict {
            let above = self.shr(k.min(self.cfg.bits()))?;
            if !above.is_zero() {
                return Err(Error::Precondition(format!(
                    "spread: bits set at or above position {k}"
                )));
            }
        }
        let limbs = (0..k).map(|j| self.bit(j) as u64).collect();
        Ok(WideWord { cfg: self.cfg, limbs })
    }

    fn check_fields(&self, layout: FieldLayout, what: &str) -> Result<()> {
        if !self.cfg.strict {
            return Ok(());
        }
        if !self.and(&Self::test_mask(self.cfg, layout))?.is_zero() {
            return Err(Error::Precondition(format!("{what}: test bit set in input")));
        }
        let used = layout.count() * layout.width();
        if used < self.cfg.bits() && !self.shr(used)?.is_zero() {
            return Err(Error::Precondition(format!("{what}: bits set above the last field")));
        }
        Ok(())
    }

    /// Test bit of every field.
    pub fn test_mask(cfg: WideConfig, layout: FieldLayout) -> Self {
        Self::periodic(cfg, layout, layout.test_bit())
    }

    /// Bit 0 of every field.
    pub fn field_ones(cfg: WideConfig, layout: FieldLayout) -> Self {
        Self::periodic(cfg, layout, 0)
    }

    /// Bit `off` of every field. Masks are rebuilt often by the field
    /// operations, so each thread keeps the ones it has made.
    fn periodic(cfg: WideConfig, layout: FieldLayout, off: usize) -> Self {
        thread_local! {
            static MASKS: RefCell<HashMap<(u32, usize, bool, usize, usize), WideWord>> = RefCell::new(HashMap::new());
        }
        let key = (cfg.w, cfg.k, cfg.strict, layout.width(), off);
        MASKS.with(|cache| {
            cache
                .borrow_mut()
                .entry(key)
                .or_insert_with(|| {
                    let mut out = Self::zero(cfg);
                    for i in 0..layout.count() {
                        out.set_bit(i * layout.width() + off);
                    }
                    out
                })
                .clone()
        })
    }

    /// Every payload bit of every field.
    pub fn payload_mask(cfg: WideConfig, layout: FieldLayout) -> Self {
        let t = Self::test_mask(cfg, layout);
        let low = Self::field_ones(cfg, layout);
        t.sub(&low).expect("same shape")
    }

    /// Fieldwise `self >= other` on unsigned `(f-1)`-bit payloads. Returns a
    /// mask with every payload bit of the passing fields set and all test
    /// bits clear.
    pub fn field_compare_ge(&self, other: &WideWord, layout: FieldLayout) -> Result<Self> {
        self.check_shape(other)?;
        self.check_fields(layout, "field_compare_ge")?;
        other.check_fields(layout, "field_compare_ge")?;
        let (a, b) = if self.cfg.strict {
            (self.clone(), other.clone())
        } else {
            let p = Self::payload_mask(self.cfg, layout);
            (self.and(&p)?, other.and(&p)?)
        };
        let t = Self::test_mask(self.cfg, layout);
        let h = a.or(&t)?.sub(&b)?.and(&t)?;
        h.sub(&h.shr(layout.test_bit())?)
    }

    /// Fieldwise equality, same mask convention as
    /// [`field_compare_ge`](Self::field_compare_ge).
    pub fn field_eq(&self, other: &WideWord, layout: FieldLayout) -> Result<Self> {
        let ge = self.field_compare_ge(other, layout)?;
        let le = other.field_compare_ge(self, layout)?;
        ge.and(&le)
    }

    /// Fieldwise maximum. With `signed`, payloads are two's complement
    /// `(f-1)`-bit values.
    pub fn field_max(&self, other: &WideWord, layout: FieldLayout, signed: bool) -> Result<Self> {
        self.check_shape(other)?;
        self.check_fields(layout, "field_max")?;
        other.check_fields(layout, "field_max")?;
        let payload = Self::payload_mask(self.cfg, layout);
        let (mut a, mut b) = (self.and(&payload)?, other.and(&payload)?);
        let sign = if signed {
            let s = Self::test_mask(self.cfg, layout).shr(1)?;
            a = a.xor(&s)?;
            b = b.xor(&s)?;
            Some(s)
        } else {
            None
        };
        let m = a.field_compare_ge(&b, layout)?;
        let picked = a.and(&m)?.or(&b.and(&m.not())?.and(&payload)?)?;
        match sign {
            Some(s) => picked.xor(&s),
            None => Ok(picked),
        }
    }
}

#[inline]
fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
