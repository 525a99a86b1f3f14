//! 0/1 knapsack over bit rows of undominated states.
//!
//! After item `i`, `g[u] = 1` iff some undominated solution weighs exactly
//! `u`, and `h[v] = 1` iff some undominated solution is worth exactly `v`.
//! Both rows list the same staircase of solutions, one by weight and one by
//! value, so the `r`-th set bit of `g` and the `r`-th set bit of `h`
//! belong to the same solution.
//!
//! A row update runs in `k`-column groups:
//!
//! 1. Rank both old rows and materialize `RKg[u] = rank_g(u)` and
//!    `RKh1[v] = rank_h(v - 1)`, with zero padding below column 0.
//! 2. Scatter the staircase: `STW[r]` and `STV[r]` are the weight and value
//!    of solution `r`. Columns without a set bit write to private junk
//!    cells so every scatter is exclusive.
//! 3. `C(u) = max(STV[RKg[u]], STV[RKg[u - wt]] + val)` is the best value
//!    within capacity `u`; `g[u] = [C(u) > C(u - 1)]`.
//! 4. `D(v) = min(STW[RKh1[v] + 1], STW[RKh1[v - val] + 1] + wt)` is the
//!    lightest weight reaching value `v`; `h[v] = [D(v) < D(v + 1)] and
//!    [D(v) <= b]`.
//!
//! Every gather fetches one table entry per block, so a row costs
//! `O(m / k)` wide operations for `m = max(b, U)` columns. Values are
//! bounded by the fractional (greedy) relaxation `U`, which is at least the
//! optimum.

use super::prefix_sums::RankIndex;
use crate::tables::PopcountTable;
use crate::{Error, FieldLayout, Machine, Result, WideWord};

/// Upper bound on the optimum from the fractional relaxation.
pub fn greedy_bound(items: &[(u64, u64)], b: u64) -> u64 {
    let mut fit: Vec<(u64, u64)> = items.iter().copied().filter(|&(wt, _)| wt <= b).collect();
    // ratio order, weightless items first
    fit.sort_by(|&(w1, v1), &(w2, v2)| ((v2 as u128) * (w1 as u128)).cmp(&((v1 as u128) * (w2 as u128))));
    let (mut room, mut total) = (b as u128, 0u128);
    for (wt, v) in fit {
        if wt as u128 <= room {
            room -= wt as u128;
            total += v as u128;
        } else {
            total += room * v as u128 / wt as u128;
            break;
        }
    }
    total.min(u64::MAX as u128) as u64
}

struct Group {
    base: u64,
    count: usize,
}

struct Consts {
    one: WideWord,
    payload: WideWord,
    cap: WideWord,
    step: WideWord,
    fields: FieldLayout,
    // per offset of u0 within a cell: cell index and inclusive bit mask
    rank_cells: Vec<WideWord>,
    rank_masks: Vec<WideWord>,
}

struct Layout {
    cols_g: usize,
    cols_h: usize,
    g_row: u64,
    h_row: u64,
    g_rank: RankIndex,
    h_rank: RankIndex,
    rkg: u64,
    rkh1: u64,
    stw: u64,
    stv: u64,
    junk: u64,
    crow: u64,
    drow: u64,
}

fn rank_word(m: &mut Machine, c: &Consts, idx: &RankIndex, u0: usize) -> Result<WideWord> {
    let w = m.w() as usize;
    let sel = (u0 % w) / m.k().min(w);
    let cell0 = (u0 / w) as u64;
    let cells = m.read_content(&c.rank_cells[sel], idx.row + cell0)?;
    let masked = m.and(&cells, &c.rank_masks[sel])?;
    let cnt = idx.block_popcount(m, &masked)?;
    let before = m.read_content(&c.rank_cells[sel], idx.prefix - 1 + cell0)?;
    m.add(&cnt, &before)
}

fn put_flags(m: &mut Machine, bits: &WideWord, row: u64, u0: usize) -> Result<()> {
    let w = m.w() as usize;
    let mut packed = m.compress(bits)?;
    if u0 % w != 0 {
        packed = m.shl(&packed, u0 % w)?;
    }
    let at = row + (u0 / w) as u64;
    let cur = m.read_word(at)?;
    let next = m.or(&cur, &packed)?;
    m.write_word(&next, at)
}

/// Field-wise minimum of two words with clear test bits.
fn field_min(m: &mut Machine, a: &WideWord, b: &WideWord, f: FieldLayout) -> Result<WideWord> {
    let ge = m.field_compare_ge(a, b, f)?;
    let lt = m.not(&ge);
    let from_b = m.and(b, &ge)?;
    let from_a = m.and(a, &lt)?;
    m.or(&from_a, &from_b)
}

/// Scatters column indices or values of the set bits of one row into the
/// staircase array at `st`, using ranks at `rk` (rank of column `u` at
/// `rk + u`, rank of `u - 1` at `rk + u - 1`).
fn scatter(m: &mut Machine, c: &Consts, rk: u64, groups: usize, st: u64, junk_rel: u64) -> Result<()> {
    let k = m.k();
    let w = m.w() as usize;
    let mut col = m.constant(&(0..k as u64).collect::<Vec<_>>())?;
    let mut junk = m.constant(&(0..k as u64).map(|j| junk_rel + j).collect::<Vec<_>>())?;
    for g in 0..groups {
        let u0 = (g * k) as u64;
        let r = m.read_word(rk + u0)?;
        let rp = m.read_word(rk + u0 - 1)?;
        let bit = m.sub(&r, &rp)?;
        let up = m.shl(&bit, w)?;
        let full = m.sub(&up, &bit)?;
        let keep = m.and(&r, &full)?;
        let empty = m.not(&full);
        let away = m.and(&junk, &empty)?;
        let addr = m.or(&keep, &away)?;
        m.write_content(&col, &addr, st)?;
        col = m.add(&col, &c.step)?;
        junk = m.add(&junk, &c.step)?;
    }
    Ok(())
}

/// Last-group mask: bit 0 set in blocks `j` with `u0 + j <= last`.
fn limit_mask(m: &Machine, u0: usize, last: usize) -> Result<WideWord> {
    let limbs: Vec<u64> = (0..m.k()).map(|j| (u0 + j <= last) as u64).collect();
    m.constant(&limbs)
}

fn alloc_group(m: &mut Machine, pad: usize, len: usize) -> Result<Group> {
    let base = m.alloc(pad + len)? + pad as u64;
    Ok(Group { base, count: len })
}

/// Optimal total value of a subset of `items` (`(weight, value)` pairs)
/// with total weight at most `b`.
pub fn knapsack(m: &mut Machine, items: &[(u64, u64)], b: u64) -> Result<u64> {
    let w = m.w() as usize;
    let fit: Vec<(u64, u64)> = items.iter().copied().filter(|&(wt, _)| wt <= b).collect();
    m.charge_scalar(items.len() as u64 * 2);
    let u = greedy_bound(&fit, b);
    let max_val = fit.iter().map(|&(_, v)| v).max().unwrap_or(0);
    let limit = 1u64 << (w - 2).min(62);
    if w < 16 || b >= limit || u.saturating_add(max_val) >= limit {
        return Err(Error::Fault(format!(
            "value bound {u} or capacity {b} does not fit below 2^{} in {w}-bit cells",
            w - 2
        )));
    }
    if fit.is_empty() {
        return Ok(0);
    }
    let mark = m.mark();
    let out = run(m, &fit, b as usize, u as usize, max_val as usize);
    m.release_to(mark);
    out
}

fn run(m: &mut Machine, items: &[(u64, u64)], b: usize, u: usize, max_val: usize) -> Result<u64> {
    let (w, k) = (m.w() as usize, m.k());
    let cfg = m.cfg();
    let fields = FieldLayout::new(&cfg, w)?;
    let cols_g = (b + 1).div_ceil(k) * k;
    let cols_h = (u + 2).div_ceil(k) * k;
    let row_cells = |cols: usize| cols.div_ceil(w).div_ceil(k) * k + k;

    let pop = PopcountTable::install(m)?;
    let g_row = m.alloc(row_cells(cols_g))?;
    let h_row = m.alloc(row_cells(cols_h))?;
    let g_rank = RankIndex::new(m, g_row, cols_g.div_ceil(w), pop)?;
    let h_rank = RankIndex::new(m, h_row, cols_h.div_ceil(w), pop)?;
    let rkg = alloc_group(m, b + k + 1, cols_g + k)?;
    let rkh1 = alloc_group(m, max_val + k + 1, cols_h + k + 1)?;
    let stair = b.max(u) + 3;
    let junk_len = cols_g.max(cols_h);
    let stw = m.alloc(stair + junk_len)?;
    let stv = m.alloc(stair + junk_len)?;
    let crow = alloc_group(m, 1, cols_g + k)?;
    let drow = alloc_group(m, 0, cols_h + k)?;
    let _ = (rkg.count, rkh1.count, crow.count, drow.count);

    let offsets = if k >= w { 1 } else { w / k };
    let mut rank_cells = Vec::with_capacity(offsets);
    let mut rank_masks = Vec::with_capacity(offsets);
    for o in 0..offsets {
        let base = o * k.min(w);
        let cells: Vec<u64> = (0..k).map(|j| ((base + j) / w) as u64).collect();
        let masks: Vec<u64> = (0..k)
            .map(|j| {
                let off = (base + j) % w;
                if off + 1 >= 64 { u64::MAX } else { (1u64 << (off + 1)) - 1 }
            })
            .collect();
        rank_cells.push(WideWord::from_limbs(cfg, &cells)?);
        rank_masks.push(WideWord::from_limbs(cfg, &masks)?);
    }
    let c = Consts {
        one: m.splat(1),
        payload: m.splat((1 << (w - 1)) - 1),
        cap: m.splat(b as u64),
        step: m.splat(k as u64),
        fields,
        rank_cells,
        rank_masks,
    };
    let l = Layout {
        cols_g,
        cols_h,
        g_row,
        h_row,
        g_rank,
        h_rank,
        rkg: rkg.base,
        rkh1: rkh1.base,
        stw,
        stv,
        junk: stair as u64,
        crow: crow.base,
        drow: drow.base,
    };

    m.store(l.g_row, 1)?;
    m.store(l.h_row, 1)?;
    m.store(l.stw + 1, 0)?;
    for &(wt, val) in items {
        add_item(m, &c, &l, b, u, wt, val)?;
    }

    let cells = (u + 1).div_ceil(w);
    for cell in (0..cells).rev() {
        let mut v = m.load(l.h_row + cell as u64)?;
        if cell == cells - 1 && (u + 1) % w != 0 {
            v &= (1 << ((u + 1) % w)) - 1;
        }
        m.charge_scalar(2);
        if v != 0 {
            return Ok((cell * w) as u64 + 63 - v.leading_zeros() as u64);
        }
    }
    Err(Error::Fault("value row lost its zero entry".into()))
}

fn add_item(m: &mut Machine, c: &Consts, l: &Layout, b: usize, u: usize, wt: u64, val: u64) -> Result<()> {
    let (w, k) = (m.w() as usize, m.k());
    let groups_g = l.cols_g / k;
    let groups_h = l.cols_h / k;

    l.g_rank.build(m)?;
    l.h_rank.build(m)?;
    for g in 0..groups_g {
        let rk = rank_word(m, c, &l.g_rank, g * k)?;
        m.write_word(&rk, l.rkg + (g * k) as u64)?;
    }
    for g in 0..groups_h {
        let rk = rank_word(m, c, &l.h_rank, g * k)?;
        m.write_word(&rk, l.rkh1 + (g * k) as u64 + 1)?;
    }
    scatter(m, c, l.rkg, groups_g, l.stw, l.junk)?;
    scatter(m, c, l.rkh1 + 1, groups_h, l.stv, l.junk)?;
    let count = m.load(l.rkg + b as u64)?;
    m.store(l.stw + count + 1, 1 << (w - 2))?;
    m.store(l.stv, (1 << (w - 1)) - val)?;
    m.charge_scalar(3);

    let z = m.zero();
    for row in [(l.g_row, l.cols_g), (l.h_row, l.cols_h)] {
        for g in 0..row.1.div_ceil(w).div_ceil(k) {
            m.write_word(&z, row.0 + (g * k) as u64)?;
        }
    }

    let valw = m.splat(val);
    for g in 0..groups_g {
        let u0 = g * k;
        let r = m.read_word(l.rkg + u0 as u64)?;
        let keep = m.read_content(&r, l.stv)?;
        let r2 = m.read_word(l.rkg + u0 as u64 - wt)?;
        let take = m.read_content(&r2, l.stv)?;
        let take = m.add(&take, &valw)?;
        let take = m.and(&take, &c.payload)?;
        let best = m.field_max(&keep, &take, c.fields, false)?;
        m.write_word(&best, l.crow + u0 as u64)?;
        let prev = m.read_word(l.crow + u0 as u64 - 1)?;
        let prev = m.add(&prev, &c.one)?;
        let up = m.field_compare_ge(&best, &prev, c.fields)?;
        let mut flags = m.and(&up, &c.one)?;
        if u0 + k > b + 1 {
            let lim = limit_mask(m, u0, b)?;
            flags = m.and(&flags, &lim)?;
        }
        put_flags(m, &flags, l.g_row, u0)?;
    }
    let cell = m.load(l.g_row)?;
    m.store(l.g_row, cell | 1)?;
    m.charge_scalar(1);

    let wtw = m.splat(wt);
    for g in (0..groups_h).rev() {
        let v0 = g * k;
        let r = m.read_word(l.rkh1 + v0 as u64)?;
        let r = m.add(&r, &c.one)?;
        let skip = m.read_content(&r, l.stw)?;
        let r2 = m.read_word(l.rkh1 + v0 as u64 - val)?;
        let r2 = m.add(&r2, &c.one)?;
        let take = m.read_content(&r2, l.stw)?;
        let take = m.add(&take, &wtw)?;
        let d = field_min(m, &skip, &take, c.fields)?;
        m.write_word(&d, l.drow + v0 as u64)?;
        if v0 > u {
            continue;
        }
        let next = m.read_word(l.drow + v0 as u64 + 1)?;
        let d1 = m.add(&d, &c.one)?;
        let rises = m.field_compare_ge(&next, &d1, c.fields)?;
        let fits = m.field_compare_ge(&c.cap, &d, c.fields)?;
        let both = m.and(&rises, &fits)?;
        let mut flags = m.and(&both, &c.one)?;
        if v0 + k > u + 1 {
            let lim = limit_mask(m, v0, u)?;
            flags = m.and(&flags, &lim)?;
        }
        put_flags(m, &flags, l.h_row, v0)?;
    }
    Ok(())
}
