//! Horspool search comparing a window a wide word at a time.
//!
//! Symbols are packed at `b = ceil(log2 sigma)` bits, so one wide word
//! holds `floor(kw / b)` of them. A window is compared segment by segment
//! from its last segment backward, and two segments are equal exactly when
//! their difference is zero. Shifts use the usual last-symbol table, so the
//! sequence of windows is the scalar algorithm's.

use super::{check, word_with_bits, SearchReport};
use crate::{Machine, Result, WideWord};

fn symbol_bits(sigma: usize) -> usize {
    ((usize::BITS - (sigma.max(2) - 1).leading_zeros()) as usize).max(1)
}

fn pack(s: &[u8], b: usize, w: usize, cells: usize) -> Vec<u64> {
    let mut out = vec![0u64; cells];
    let cell_mask = u64::MAX >> (64 - w);
    for (i, &c) in s.iter().enumerate() {
        let bit = i * b;
        out[bit / w] |= ((c as u64) << (bit % w)) & cell_mask;
        if bit % w + b > w {
            out[bit / w + 1] |= (c as u64) >> (w - bit % w);
        }
    }
    out
}

/// `len` bits starting at bit `off` of the packed array at `base`.
fn load_bits(m: &mut Machine, base: u64, off: usize, len: usize, keep: &WideWord) -> Result<WideWord> {
    let (w, kw) = (m.w() as usize, m.cfg().bits());
    let (cell, r) = ((off / w) as u64, off % w);
    let mut v = m.read_word(base + cell)?;
    if r > 0 {
        v = m.shr(&v, r)?;
        if r + len > kw {
            let hi = m.read_word(base + cell + m.k() as u64)?;
            let hi = m.shl(&hi, kw - r)?;
            v = m.or(&v, &hi)?;
        }
    }
    m.and(&v, keep)
}

fn load_symbol(m: &mut Machine, base: u64, i: usize, b: usize) -> Result<u64> {
    let w = m.w() as usize;
    let bit = i * b;
    let mut v = m.load(base + (bit / w) as u64)? >> (bit % w);
    if bit % w + b > w {
        v |= m.load(base + (bit / w) as u64 + 1)? << (w - bit % w);
    }
    m.charge_scalar(3);
    Ok(v & ((1 << b) - 1))
}

pub fn bmh_wide(m: &mut Machine, t: &[u8], p: &[u8], sigma: usize) -> Result<SearchReport> {
    check(t, p, sigma)?;
    let mark = m.mark();
    let out = run(m, t, p, sigma);
    m.release_to(mark);
    out
}

fn run(m: &mut Machine, t: &[u8], p: &[u8], sigma: usize) -> Result<SearchReport> {
    let mut report = SearchReport::default();
    let (n, len) = (t.len(), p.len());
    if len > n {
        return Ok(report);
    }
    let cfg = m.cfg();
    let (k, w, kw) = (m.k(), m.w() as usize, cfg.bits());
    let b = symbol_bits(sigma);
    let per = kw / b;
    let segs = len.div_ceil(per);

    let cells = (n * b).div_ceil(w) + 2 * k;
    let text = m.alloc(cells)?;
    m.preload(text, &pack(t, b, w, cells))?;
    let pseg = m.alloc(segs * k)?;
    let mut keeps = Vec::with_capacity(segs);
    for s in 0..segs {
        let part = &p[s * per..len.min((s + 1) * per)];
        m.preload(pseg + (s * k) as u64, &pack(part, b, w, k))?;
        keeps.push(word_with_bits(cfg, 0..part.len() * b)?);
    }
    let mut jump = vec![len as u64; sigma];
    for (j, &c) in p[..len - 1].iter().enumerate() {
        jump[c as usize] = (len - 1 - j) as u64;
    }
    m.charge_scalar((sigma + len) as u64);
    let jt = m.alloc(sigma)?;
    m.preload(jt, &jump)?;

    let mut i = 0;
    while i + len <= n {
        report.windows.push(i + 1);
        let mut equal = true;
        for s in (0..segs).rev() {
            let bits = (len.min((s + 1) * per) - s * per) * b;
            let tw = load_bits(m, text, (i + s * per) * b, bits, &keeps[s])?;
            let pw = m.read_word(pseg + (s * k) as u64)?;
            let d = m.sub(&tw, &pw)?;
            if m.test_nonzero(&d) {
                equal = false;
                break;
            }
        }
        if equal {
            report.occurrences.push(i + 1);
        }
        let c = load_symbol(m, text, i + len - 1, b)?;
        i += m.load(jt + c)? as usize;
        m.charge_scalar(2);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::bmh_scalar;
    use crate::WideConfig;

    fn ab(s: &str) -> Vec<u8> {
        s.bytes().map(|c| c - b'a').collect()
    }

    #[test]
    fn matches_scalar_trace() {
        for (w, k) in [(8, 1), (8, 4), (64, 2)] {
            let mut m = Machine::new(WideConfig::new(w, k).unwrap(), 1 << w.min(16)).unwrap();
            for (t, p, sigma) in [("aabbba", "ab", 2), ("abbabbabbab", "abbab", 2), ("xyzzyxabcxyz", "xyz", 26)] {
                let (t, p) = (ab(t), ab(p));
                let got = bmh_wide(&mut m, &t, &p, sigma).unwrap();
                let want = bmh_scalar(&t, &p, sigma).unwrap();
                assert_eq!(got.occurrences, want.occurrences);
                assert_eq!(got.windows, want.windows);
            }
        }
    }

    #[test]
    fn long_pattern_many_segments() {
        let mut m = Machine::new(WideConfig::new(8, 2).unwrap(), 256).unwrap();
        let p: Vec<u8> = (0..20).map(|i| (i * 7 % 5) as u8).collect();
        let mut t = vec![4u8; 3];
        t.extend(&p);
        t.push(1);
        let r = bmh_wide(&mut m, &t, &p, 5).unwrap();
        assert_eq!(r.occurrences, vec![4]);
        assert_eq!(r.windows, bmh_scalar(&t, &p, 5).unwrap().windows);
    }
}
