//! Subset sum by shifting the reachable-sum bitmap.
//!
//! Row `i` is a `t + 1`-bit bitmap stored over `ceil((t+1) / kw)` wide
//! words. Adding weight `a` ORs the row with itself shifted toward high
//! significance by `a`: first by `a / kw` whole words, then by the
//! remaining `a mod kw` bits with the carry pulled from the word below.
//! Words are visited from the top down so the update can run in place.

use crate::{Machine, Result};

struct Row {
    base: u64,
    words: usize,
}

impl Row {
    fn addr(&self, m: &Machine, p: usize) -> u64 {
        self.base + (p * m.k()) as u64
    }
}

fn alloc_row(m: &mut Machine, t: u64) -> Result<Row> {
    let bits = m.cfg().bits() as u64;
    let words = ((t + 1).div_ceil(bits)) as usize;
    let base = m.alloc(words * m.k())?;
    m.store(base, 1)?;
    Ok(Row { base, words })
}

fn add_item(m: &mut Machine, row: &Row, a: u64) -> Result<()> {
    let kw = m.cfg().bits();
    let (q, r) = ((a / kw as u64) as usize, (a % kw as u64) as usize);
    m.charge_scalar(2);
    if q >= row.words {
        return Ok(());
    }
    for p in (q..row.words).rev() {
        m.charge_scalar(1);
        let cur = m.read_word(row.addr(m, p))?;
        let src = m.read_word(row.addr(m, p - q))?;
        let mut shifted = m.shl(&src, r)?;
        if p > q {
            let below = m.read_word(row.addr(m, p - q - 1))?;
            let carry = m.shr(&below, kw - r)?;
            shifted = m.or(&shifted, &carry)?;
        }
        let next = m.or(&cur, &shifted)?;
        m.write_word(&next, row.addr(m, p))?;
    }
    Ok(())
}

fn bit(m: &mut Machine, row: &Row, j: u64) -> Result<bool> {
    let w = m.w() as u64;
    let cell = m.load(row.base + j / w)?;
    m.charge_scalar(2);
    Ok(cell >> (j % w) & 1 == 1)
}

/// Whether some subset of `weights` sums to exactly `t`.
pub fn subset_sum(m: &mut Machine, weights: &[u64], t: u64) -> Result<bool> {
    let mark = m.mark();
    let row = alloc_row(m, t)?;
    for &a in weights {
        add_item(m, &row, a)?;
    }
    let ans = bit(m, &row, t);
    m.release_to(mark);
    ans
}

/// Same computation, also returning every row as a host-side bitmap of
/// `t + 1` entries (row 0 first). The snapshots are not charged.
pub fn subset_sum_rows(m: &mut Machine, weights: &[u64], t: u64) -> Result<Vec<Vec<bool>>> {
    let mark = m.mark();
    let row = alloc_row(m, t)?;
    let w = m.w() as u64;
    let snap = |m: &Machine| -> Vec<bool> {
        let cells = m.peek(row.base, row.words * m.k());
        (0..=t).map(|j| cells[(j / w) as usize] >> (j % w) & 1 == 1).collect()
    };
    let mut rows = vec![snap(m)];
    for &a in weights {
        add_item(m, &row, a)?;
        rows.push(snap(m));
    }
    m.release_to(mark);
    Ok(rows)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::WideConfig;

    fn machine(w: u32, k: usize) -> Machine {
        let cells = if w == 8 { 256 } else { 1 << 14 };
        Machine::new(WideConfig::new(w, k).unwrap(), cells).unwrap()
    }

    #[test]
    fn examples() {
        for (w, k) in [(8, 1), (16, 4), (64, 2)] {
            let mut m = machine(w, k);
            assert!(subset_sum(&mut m, &[], 0).unwrap());
            assert!(subset_sum(&mut m, &[2, 3, 7], 5).unwrap());
            assert!(!subset_sum(&mut m, &[2, 4], 7).unwrap());
            assert!(subset_sum(&mut m, &[9, 11], 0).unwrap());
            assert!(subset_sum(&mut m, &[40, 33, 7], 80).unwrap());
        }
    }

    #[test]
    fn word_count_is_what_scales() {
        let mut narrow = machine(64, 1);
        let mut wide = machine(64, 16);
        subset_sum(&mut narrow, &[5, 700, 1300], 4095).unwrap();
        subset_sum(&mut wide, &[5, 700, 1300], 4095).unwrap();
        let ratio = narrow.counter().wide() as f64 / wide.counter().wide() as f64;
        assert!((12.0..=20.0).contains(&ratio), "{ratio}");
    }
}
