//! LCS length by anti-diagonals of the difference tables.
//!
//! `H[i][j] = c[i][j] - c[i][j-1]` and `V[i][j] = c[i][j] - c[i-1][j]` are
//! both 0 or 1, and every cell of anti-diagonal `k = i + j` depends only on
//! diagonal `k - 1`:
//!
//! ```text
//! H[i][j] = max(eq - V[i][j-1], H[i-1][j] - V[i][j-1], 0)
//! V[i][j] = max(eq - H[i-1][j], V[i][j-1] - H[i-1][j], 0)
//! ```
//!
//! Cells are packed into `f`-bit fields, `f = max(ceil(log2 sigma), 2) + 1`,
//! in increasing column order, `l = floor(kw / f)` fields per wide word.
//! Diagonal `H_k` covers columns `max(1, k-m) ..= min(n, k)`; its last field
//! is the row-0 base cell while `k <= n`. Diagonal `V_k` covers columns
//! `max(0, k-m) ..= min(n, k-1)`; its first field is the column-0 base cell
//! while `k <= m`, inserted by shifting the computed cells up one field.
//!
//! `X` is stored reversed so that the symbols of a diagonal are contiguous
//! in both strings. Differences use a preset test bit so borrows stay
//! inside their field, which leaves `-1` as two's complement in the
//! payload.

use crate::{Error, FieldLayout, Machine, Result, WideWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Retention {
    /// Keep only the two most recent `H` and `V` diagonals.
    Window,
    /// Keep every diagonal, enough to walk back a witness.
    Full,
}

pub(crate) fn check_symbols(s: &[u8], sigma: usize) -> Result<()> {
    if sigma == 0 || sigma > 256 {
        return Err(Error::Input(format!("alphabet size {sigma} outside 1..=256")));
    }
    match s.iter().position(|&c| c as usize >= sigma) {
        Some(p) => Err(Error::Input(format!("symbol {} at position {p} not below sigma {sigma}", s[p]))),
        None => Ok(()),
    }
}

pub fn field_width(sigma: usize) -> usize {
    let bits = (usize::BITS - (sigma.max(1) - 1).leading_zeros()) as usize;
    bits.max(2) + 1
}

struct Consts {
    f: usize,
    ell: usize,
    fields: FieldLayout,
    tests: WideWord,
    payload: WideWord,
    low: WideWord,
    field_ones: WideWord,
    zero: WideWord,
}

impl Consts {
    fn new(m: &Machine, sigma: usize) -> Result<Self> {
        let cfg = m.cfg();
        let f = field_width(sigma);
        let fields = FieldLayout::new(&cfg, f)?;
        let ell = fields.count();
        Ok(Consts {
            f,
            ell,
            fields,
            tests: WideWord::test_mask(cfg, fields),
            payload: WideWord::payload_mask(cfg, fields),
            low: WideWord::low_mask(cfg, ell * f),
            field_ones: WideWord::field_ones(cfg, fields),
            zero: WideWord::zero(cfg),
        })
    }

    /// All bits of the first `cnt` fields.
    fn first(&self, cnt: usize) -> WideWord {
        WideWord::low_mask(self.zero.config(), cnt * self.f)
    }

    fn chunks(&self, fields: usize) -> usize {
        fields.div_ceil(self.ell).max(1)
    }
}

/// Where the two strings and the diagonals live.
pub struct LcsRun {
    length: u64,
    retention: Retention,
    rows: usize,
    cols: usize,
    f: usize,
    ell: usize,
    k: usize,
    w: usize,
    x_at: u64,
    y_at: u64,
    h_diag: Vec<u64>,
    v_diag: Vec<u64>,
}

fn h_span(k: usize, rows: usize, cols: usize) -> (usize, usize) {
    (1.max(k.saturating_sub(rows)), cols.min(k))
}

fn v_span(k: usize, rows: usize, cols: usize) -> (usize, usize) {
    (k.saturating_sub(rows), cols.min(k - 1))
}

/// Packs `vals` into `f`-bit fields, `ell` per chunk of `k` cells.
fn pack(vals: impl Iterator<Item = u64>, f: usize, ell: usize, k: usize, w: usize, chunks: usize) -> Vec<u64> {
    let mut cells = vec![0u64; chunks * k];
    let cell_mask = u64::MAX >> (64 - w);
    for (p, v) in vals.enumerate() {
        let (c, q) = (p / ell, p % ell);
        let bit = q * f;
        let at = c * k + bit / w;
        cells[at] |= (v << (bit % w)) & cell_mask;
        if bit % w + f > w {
            cells[at + 1] |= v >> (w - bit % w);
        }
    }
    cells
}

/// `ell` fields starting at field `off` of the chunked array at `base`.
fn load_fields(m: &mut Machine, c: &Consts, base: u64, off: usize) -> Result<WideWord> {
    let k = m.k() as u64;
    let (a, r) = ((off / c.ell) as u64, off % c.ell);
    let lo = m.read_word(base + a * k)?;
    if r == 0 {
        return Ok(lo);
    }
    let hi = m.read_word(base + (a + 1) * k)?;
    let lo = m.shr(&lo, r * c.f)?;
    let hi = m.shl(&hi, (c.ell - r) * c.f)?;
    let both = m.or(&lo, &hi)?;
    m.and(&both, &c.low)
}

/// Field-wise `a - b` on values in {-1, 0, 1}, result in two's complement.
fn diff(m: &mut Machine, c: &Consts, a: &WideWord, b: &WideWord) -> Result<WideWord> {
    let t = m.or(a, &c.tests)?;
    let d = m.sub(&t, b)?;
    m.and(&d, &c.payload)
}

fn max3(m: &mut Machine, c: &Consts, a: &WideWord, b: &WideWord) -> Result<WideWord> {
    let ab = m.field_max(a, b, c.fields, true)?;
    m.field_max(&ab, &c.zero, c.fields, true)
}

/// Runs the diagonal sweep and returns the run, keeping the diagonals
/// resident when `retention` is [`Retention::Full`].
pub fn lcs(m: &mut Machine, x: &[u8], y: &[u8], sigma: usize, retention: Retention) -> Result<LcsRun> {
    check_symbols(x, sigma)?;
    check_symbols(y, sigma)?;
    let c = Consts::new(m, sigma)?;
    let (k, w) = (m.k(), m.w() as usize);
    let (rows, cols) = (x.len(), y.len());
    let mut run = LcsRun {
        length: 0,
        retention,
        rows,
        cols,
        f: c.f,
        ell: c.ell,
        k,
        w,
        x_at: 0,
        y_at: 0,
        h_diag: Vec::new(),
        v_diag: Vec::new(),
    };
    if rows == 0 || cols == 0 {
        return Ok(run);
    }

    let xc = c.chunks(rows) + 2;
    let yc = c.chunks(cols) + 2;
    run.x_at = m.alloc(xc * k)?;
    m.preload(run.x_at, &pack(x.iter().rev().map(|&s| s as u64), c.f, c.ell, k, w, xc))?;
    run.y_at = m.alloc(yc * k)?;
    m.preload(run.y_at, &pack(y.iter().map(|&s| s as u64), c.f, c.ell, k, w, yc))?;
    m.charge_scalar((rows + cols) as u64);
    let cell = m.alloc(1)?;

    let longest = rows.min(cols) + 1;
    let cap = (c.chunks(longest) + 2) * k;
    let diag_count = rows + cols + 1;
    match retention {
        Retention::Window => {
            let hs = [m.alloc(cap)?, m.alloc(cap)?];
            let vs = [m.alloc(cap)?, m.alloc(cap)?];
            run.h_diag = (0..diag_count).map(|d| hs[d % 2]).collect();
            run.v_diag = (0..diag_count).map(|d| vs[d % 2]).collect();
        }
        Retention::Full => {
            run.h_diag.push(0);
            run.v_diag.push(0);
            for d in 1..diag_count {
                let (hl, hh) = h_span(d, rows, cols);
                let (vl, vh) = v_span(d, rows, cols);
                run.h_diag.push(m.alloc((c.chunks(hh + 1 - hl.min(hh + 1)) + 2) * k)?);
                run.v_diag.push(m.alloc((c.chunks(vh + 1 - vl.min(vh + 1)) + 2) * k)?);
            }
        }
    }

    for d in 2..=rows + cols {
        let (jlo, jhi) = (1.max(d.saturating_sub(rows)), cols.min(d - 1));
        let len = jhi + 1 - jlo;
        let xoff = rows + jlo - d;
        let yoff = jlo - 1;
        let shift_h = (d >= rows + 2) as usize;
        let (hp, vp, hc, vc) = (run.h_diag[d - 1], run.v_diag[d - 1], run.h_diag[d], run.v_diag[d]);
        let nch = c.chunks(len);
        let mut prev_v: Option<WideWord> = None;
        m.charge_scalar(8);
        for t in 0..nch {
            let cnt = c.ell.min(len - t * c.ell);
            let keep = c.first(cnt);
            let eq_ones = c.field_ones.and(&keep)?;
            let wx = load_fields(m, &c, run.x_at, xoff + t * c.ell)?;
            let wy = load_fields(m, &c, run.y_at, yoff + t * c.ell)?;
            let eq = m.field_eq(&wx, &wy, c.fields)?;
            let eq = m.and(&eq, &eq_ones)?;
            let va = m.read_word(vp + (t * k) as u64)?;
            let hb = load_fields(m, &c, hp, shift_h + t * c.ell)?;

            let w1 = diff(m, &c, &eq, &va)?;
            let w2 = diff(m, &c, &hb, &va)?;
            let h = max3(m, &c, &w1, &w2)?;
            let h = m.and(&h, &keep)?;
            m.write_word(&h, hc + (t * k) as u64)?;

            let w1 = diff(m, &c, &eq, &hb)?;
            let w2 = diff(m, &c, &va, &hb)?;
            let v = max3(m, &c, &w1, &w2)?;
            let v = m.and(&v, &keep)?;
            if d <= rows {
                let mut up = m.shl(&v, c.f)?;
                if let Some(pv) = &prev_v {
                    let carry = m.shr(pv, (c.ell - 1) * c.f)?;
                    up = m.or(&up, &carry)?;
                }
                let up = m.and(&up, &c.low)?;
                m.write_word(&up, vc + (t * k) as u64)?;
                prev_v = Some(v);
            } else {
                m.write_word(&v, vc + (t * k) as u64)?;
            }

            if t == 0 && d > rows {
                m.write_block(&h, 0, cell)?;
                let first = m.load(cell)?;
                m.charge_scalar(2);
                run.length += first & ((1 << c.f) - 1);
            }
        }
        if d <= rows && len % c.ell == 0 {
            let pv = prev_v.expect("at least one chunk");
            let carry = m.shr(&pv, (c.ell - 1) * c.f)?;
            m.write_word(&carry, vc + (nch * k) as u64)?;
        }
        if d <= cols && len % c.ell == 0 {
            m.write_word(&c.zero, hc + (nch * k) as u64)?;
        }
    }
    Ok(run)
}

/// Length of a longest common subsequence, keeping four diagonals.
pub fn lcs_length(m: &mut Machine, x: &[u8], y: &[u8], sigma: usize) -> Result<u64> {
    let mark = m.mark();
    let out = lcs(m, x, y, sigma, Retention::Window).map(|r| r.length);
    m.release_to(mark);
    out
}

/// A longest common subsequence, from a fully retained sweep.
pub fn lcs_recover(m: &mut Machine, x: &[u8], y: &[u8], sigma: usize) -> Result<Vec<u8>> {
    let mark = m.mark();
    let out = lcs(m, x, y, sigma, Retention::Full).and_then(|run| run.recover(m));
    m.release_to(mark);
    out
}

impl LcsRun {
    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn retention(&self) -> Retention {
        self.retention
    }

    /// Cells of memory held by the retained diagonals.
    pub fn diagonal_cells(&self) -> usize {
        let (rows, cols) = (self.rows, self.cols);
        let chunks = |n: usize| n.div_ceil(self.ell).max(1) + 2;
        match self.retention {
            Retention::Window => 4 * chunks(rows.min(cols) + 1) * self.k,
            Retention::Full => (1..=rows + cols)
                .map(|d| {
                    let (hl, hh) = h_span(d, rows, cols);
                    let (vl, vh) = v_span(d, rows, cols);
                    (chunks(hh + 1 - hl.min(hh + 1)) + chunks(vh + 1 - vl.min(vh + 1))) * self.k
                })
                .sum(),
        }
    }

    fn field_addr(&self, base: u64, p: usize) -> (u64, usize) {
        let (c, q) = (p / self.ell, p % self.ell);
        let bit = q * self.f;
        (base + (c * self.k + bit / self.w) as u64, bit % self.w)
    }

    fn peek_field(&self, m: &Machine, base: u64, p: usize) -> u64 {
        let (at, off) = self.field_addr(base, p);
        let mut v = m.peek(at, 1)[0] >> off;
        if off + self.f > self.w {
            v |= m.peek(at + 1, 1)[0] << (self.w - off);
        }
        v & ((1 << self.f) - 1)
    }

    fn load_field(&self, m: &mut Machine, base: u64, p: usize) -> Result<u64> {
        let (at, off) = self.field_addr(base, p);
        let mut v = m.load(at)? >> off;
        if off + self.f > self.w {
            v |= m.load(at + 1)? << (self.w - off);
        }
        m.charge_scalar(3);
        Ok(v & ((1 << self.f) - 1))
    }

    fn retained(&self, d: usize) -> bool {
        self.retention == Retention::Full && d >= 1 && d <= self.rows + self.cols
    }

    /// `H[i][j]` for `0 <= i <= m`, `1 <= j <= n`, read from a full run.
    pub fn h(&self, m: &Machine, i: usize, j: usize) -> Option<u8> {
        if j == 0 || i > self.rows || j > self.cols || !self.retained(i + j) {
            return None;
        }
        let (lo, _) = h_span(i + j, self.rows, self.cols);
        Some(self.peek_field(m, self.h_diag[i + j], j - lo) as u8)
    }

    /// `V[i][j]` for `1 <= i <= m`, `0 <= j <= n`, read from a full run.
    pub fn v(&self, m: &Machine, i: usize, j: usize) -> Option<u8> {
        if i == 0 || i > self.rows || j > self.cols || !self.retained(i + j) {
            return None;
        }
        let (lo, _) = v_span(i + j, self.rows, self.cols);
        Some(self.peek_field(m, self.v_diag[i + j], j - lo) as u8)
    }

    /// Diagonal `H_k` in increasing column order.
    pub fn diagonal_h(&self, m: &Machine, k: usize) -> Option<Vec<u8>> {
        if !self.retained(k) {
            return None;
        }
        let (lo, hi) = h_span(k, self.rows, self.cols);
        Some((lo..=hi).map(|j| self.peek_field(m, self.h_diag[k], j - lo) as u8).collect())
    }

    /// Walks back from `(m, n)`: a match steps diagonally, `H = 1, V = 0`
    /// steps up, `H = 0, V = 1` steps left, and `H = V = 0` steps up.
    pub fn recover(&self, m: &mut Machine) -> Result<Vec<u8>> {
        if self.rows == 0 || self.cols == 0 {
            return Ok(Vec::new());
        }
        if self.retention != Retention::Full {
            return Err(Error::Precondition("diagonals were not retained".into()));
        }
        let (mut i, mut j) = (self.rows, self.cols);
        let mut out = Vec::new();
        while i > 0 && j > 0 {
            let xi = self.load_field(m, self.x_at, self.rows - i)?;
            let yj = self.load_field(m, self.y_at, j - 1)?;
            if xi == yj {
                out.push(xi as u8);
                i -= 1;
                j -= 1;
                continue;
            }
            let d = i + j;
            let h = self.load_field(m, self.h_diag[d], j - h_span(d, self.rows, self.cols).0)?;
            let v = self.load_field(m, self.v_diag[d], j - v_span(d, self.rows, self.cols).0)?;
            if h == 0 && v == 1 {
                j -= 1;
            } else {
                i -= 1;
            }
        }
        out.reverse();
        Ok(out)
    }
}
