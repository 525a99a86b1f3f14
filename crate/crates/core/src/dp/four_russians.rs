//! LCS length with `t x t` blocks looked up in a precomputed table.
//!
//! A block's bottom `H` row and right `V` column depend only on its top `H`
//! row, left `V` column and the `2t` symbols it covers. Those pack into a
//! key of `2t(1 + b)` bits, `b` bits per symbol, and the table maps each key
//! to `Hbottom | Vright << t`. Blocks on one block anti-diagonal are
//! independent, so up to `k` of them are assembled into one wide key word
//! and resolved by a single gather. Rows and columns left over when `t`
//! does not divide the lengths are finished with the scalar recurrence.

use super::lcs::{check_symbols, lcs_length};
use crate::{Error, Machine, Result, WideWord};

/// Largest table the builder will lay out.
pub const MAX_KEY_BITS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FourRussians {
    pub length: u64,
    /// Block side, 0 after a fallback.
    pub t: usize,
    /// Set when no block size fit and the diagonal sweep ran instead.
    pub fell_back: bool,
}

fn symbol_bits(sigma: usize) -> usize {
    ((usize::BITS - (sigma.max(2) - 1).leading_zeros()) as usize).max(1)
}

fn key_bits(t: usize, sigma: usize) -> usize {
    2 * t * (1 + symbol_bits(sigma))
}

/// Block side from `(2 sigma)^(2t) <= n`, reduced until the key fits in a
/// cell and under [`MAX_KEY_BITS`].
pub fn block_side(n: usize, sigma: usize, w: usize) -> usize {
    let base = 2 * sigma.max(1) as u128;
    let mut t = 0;
    while base.pow(2 * (t as u32 + 1)) <= n as u128 {
        t += 1;
    }
    while t > 0 && key_bits(t, sigma) > w.min(MAX_KEY_BITS) {
        t -= 1;
    }
    t
}

/// One LCS cell from its match flag, the `H` above and the `V` to the left.
fn cell(eq: bool, h_up: u8, v_left: u8) -> (u8, u8) {
    if eq {
        (1 - v_left, 1 - h_up)
    } else {
        (h_up.saturating_sub(v_left), v_left.saturating_sub(h_up))
    }
}

fn block_entry(key: u64, t: usize, b: usize) -> u64 {
    let mut h: Vec<u8> = (0..t).map(|j| (key >> j & 1) as u8).collect();
    let v_in = key >> t;
    let xs = key >> (2 * t);
    let ys = key >> (2 * t + t * b);
    let sym = |code: u64, r: usize| (code >> (r * b)) & ((1 << b) - 1);
    let mut v_out = 0u64;
    for i in 0..t {
        let mut v = (v_in >> i & 1) as u8;
        for (j, hj) in h.iter_mut().enumerate() {
            (*hj, v) = cell(sym(xs, i) == sym(ys, j), *hj, v);
        }
        v_out |= (v as u64) << i;
    }
    let h_out = h.iter().enumerate().fold(0u64, |a, (j, &x)| a | (x as u64) << j);
    h_out | v_out << t
}

fn codes(s: &[u8], t: usize, b: usize, blocks: usize) -> Vec<u64> {
    (0..blocks)
        .map(|q| (0..t).fold(0u64, |a, r| a | (s[q * t + r] as u64) << (r * b)))
        .collect()
}

/// LCS length with an automatically chosen block side.
pub fn four_russians(m: &mut Machine, x: &[u8], y: &[u8], sigma: usize) -> Result<FourRussians> {
    let t = block_side(x.len().max(y.len()), sigma, m.w() as usize);
    four_russians_with(m, x, y, sigma, t)
}

/// LCS length with block side `t`; `t = 0` runs the diagonal sweep.
pub fn four_russians_with(m: &mut Machine, x: &[u8], y: &[u8], sigma: usize, t: usize) -> Result<FourRussians> {
    check_symbols(x, sigma)?;
    check_symbols(y, sigma)?;
    let w = m.w() as usize;
    if t > 0 && key_bits(t, sigma) > w.min(MAX_KEY_BITS) {
        return Err(Error::Precondition(format!(
            "block side {t} needs {}-bit keys",
            key_bits(t, sigma)
        )));
    }
    if t == 0 || t > x.len().min(y.len()) {
        let length = lcs_length(m, x, y, sigma)?;
        return Ok(FourRussians { length, t: 0, fell_back: true });
    }
    let mark = m.mark();
    let out = run(m, x, y, sigma, t);
    m.release_to(mark);
    out.map(|length| FourRussians { length, t, fell_back: false })
}

fn run(m: &mut Machine, x: &[u8], y: &[u8], sigma: usize, t: usize) -> Result<u64> {
    let k = m.k();
    let b = symbol_bits(sigma);
    let (rows, cols) = (x.len(), y.len());
    let (br, bc) = (rows / t, cols / t);

    let entries = 1usize << key_bits(t, sigma);
    let table: Vec<u64> = (0..entries as u64).map(|key| block_entry(key, t, b)).collect();
    let tab = m.alloc(entries)?;
    m.preload(tab, &table)?;
    m.charge_scalar((entries * (t * t * 6 + 4)) as u64);

    let mut xs = codes(x, t, b, br);
    xs.reverse();
    xs.resize(br + k, 0);
    let xsr = m.alloc(xs.len())?;
    m.preload(xsr, &xs)?;
    let mut ys = codes(y, t, b, bc);
    ys.resize(bc + k, 0);
    let ysa = m.alloc(ys.len())?;
    m.preload(ysa, &ys)?;
    m.charge_scalar((rows + cols) as u64);

    let hb = [m.alloc(bc + k)?, m.alloc(bc + k)?];
    // one leading zero cell stands for the V column left of the grid
    let vb = [m.alloc(bc + k + 1)? + 1, m.alloc(bc + k + 1)? + 1];
    let last_row = m.alloc(bc)?;
    let last_col = m.alloc(br)?;

    let cfg = m.cfg();
    let lanes: Vec<WideWord> = (0..=k)
        .map(|c| WideWord::from_limbs(cfg, &(0..k).map(|j| if j < c { cfg.block_mask() } else { 0 }).collect::<Vec<_>>()))
        .collect::<Result<_>>()?;
    let tmask = m.splat((1 << t) - 1);

    for d in 0..br + bc - 1 {
        let (old, new) = ((d + 1) % 2, d % 2);
        let lo = d.saturating_sub(br - 1);
        let hi = (bc - 1).min(d);
        m.charge_scalar(4);
        let mut bj0 = lo;
        while bj0 <= hi {
            let cnt = k.min(hi + 1 - bj0);
            let h = m.read_word(hb[old] + bj0 as u64)?;
            let v = m.read_word(vb[old] + bj0 as u64 - 1)?;
            let xw = m.read_word(xsr + (br - 1 + bj0 - d) as u64)?;
            let yw = m.read_word(ysa + bj0 as u64)?;
            let v = m.shl(&v, t)?;
            let xw = m.shl(&xw, 2 * t)?;
            let yw = m.shl(&yw, 2 * t + t * b)?;
            let key = m.or(&h, &v)?;
            let key = m.or(&key, &xw)?;
            let key = m.or(&key, &yw)?;
            let key = m.and(&key, &lanes[cnt])?;
            let out = m.read_content(&key, tab)?;
            let out = m.and(&out, &lanes[cnt])?;
            let h_out = m.and(&out, &tmask)?;
            let v_out = m.shr(&out, t)?;
            let v_out = m.and(&v_out, &tmask)?;
            m.write_word(&h_out, hb[new] + bj0 as u64)?;
            m.write_word(&v_out, vb[new] + bj0 as u64)?;
            bj0 += k;
            m.charge_scalar(2);
        }
        if d + 1 >= br {
            let cell = m.load(hb[new] + lo as u64)?;
            m.store(last_row + lo as u64, cell)?;
        }
        if d + 1 >= bc {
            let cell = m.load(vb[new] + (bc - 1) as u64)?;
            m.store(last_col + (d + 1 - bc) as u64, cell)?;
        }
    }

    // right strip, rows 1..=br*t
    let strip = bc * t..cols;
    let mut h_row = vec![0u8; cols];
    for bi in 0..br {
        let vcol = m.load(last_col + bi as u64)?;
        for r in 0..t {
            let i = bi * t + r;
            let mut v = (vcol >> r & 1) as u8;
            for j in strip.clone() {
                (h_row[j], v) = cell(x[i] == y[j], h_row[j], v);
            }
            m.charge_scalar(6 * strip.len() as u64 + 1);
        }
    }
    for bj in 0..bc {
        let bits = m.load(last_row + bj as u64)?;
        for r in 0..t {
            h_row[bj * t + r] = (bits >> r & 1) as u8;
        }
        m.charge_scalar(t as u64);
    }
    // bottom strip, all columns
    for &xi in &x[br * t..] {
        let mut v = 0u8;
        for (hj, &yj) in h_row.iter_mut().zip(y) {
            (*hj, v) = cell(xi == yj, *hj, v);
        }
        m.charge_scalar(6 * cols as u64);
    }
    m.charge_scalar(cols as u64);
    Ok(h_row.iter().map(|&h| h as u64).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::lcs_table;
    use crate::WideConfig;

    fn machine(w: u32, k: usize) -> Machine {
        Machine::new(WideConfig::new(w, k).unwrap(), 1 << 20).unwrap()
    }

    #[test]
    fn worked_example_each_block_side() {
        let x = [0u8, 1, 1, 0, 1];
        let y = [0u8, 0, 1, 1, 1, 0];
        for t in 0..=3 {
            let mut m = machine(32, 4);
            let r = four_russians_with(&mut m, &x, &y, 2, t).unwrap();
            assert_eq!(r.length, 4, "t={t}");
            assert_eq!(r.fell_back, t == 0);
        }
    }

    #[test]
    fn matches_table_on_small_pairs() {
        let mut m = machine(64, 8);
        let mut seed = 7u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) as usize
        };
        for _ in 0..40 {
            let sigma = [2, 3, 4][next() % 3];
            let x: Vec<u8> = (0..next() % 40).map(|_| (next() % sigma) as u8).collect();
            let y: Vec<u8> = (0..next() % 40).map(|_| (next() % sigma) as u8).collect();
            let want = lcs_table(&x, &y).unwrap().length() as u64;
            for t in 1..=2 {
                let got = four_russians_with(&mut m, &x, &y, sigma, t).unwrap();
                assert_eq!(got.length, want, "t={t} x={x:?} y={y:?}");
            }
        }
    }

    #[test]
    fn block_side_choice() {
        assert_eq!(block_side(6, 2, 64), 0);
        assert_eq!(block_side(256, 2, 64), 2);
        assert_eq!(block_side(512, 26, 64), 0);
        assert_eq!(block_side(1 << 20, 2, 64), 5);
        assert_eq!(block_side(1 << 20, 2, 8), 2);
    }
}
