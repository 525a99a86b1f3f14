//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uwram::dp::{four_russians, knapsack, lcs, lcs_length, lcs_recover, subset_sum, Retention};
use uwram::fsram::{FsRamLayout, Monoid, PrefixSums, PriorityQueue};
use uwram::oracle::{self, DpsOp, PqOp, PqOutcome};
use uwram::search::{bmh_wide, shift_and_parallel, shift_and_wide, shift_or, Variant};
use uwram::{Error, FieldLayout, Machine, WideConfig, WideWord};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn machine(w: u32, k: usize, cells: usize) -> Machine {
    Machine::new(WideConfig::new(w, k).unwrap(), cells).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---- 1: wide-word core ----

fn to_big(x: &WideWord) -> BigUint {
    let w = x.config().w();
    x.limbs().iter().rev().fold(BigUint::from(0u8), |acc, &l| (acc << w) + BigUint::from(l))
}

fn random_word(r: &mut ChaCha8Rng, cfg: WideConfig) -> WideWord {
    let limbs: Vec<u64> = (0..cfg.k()).map(|_| r.gen::<u64>() & cfg.block_mask()).collect();
    WideWord::from_limbs(cfg, &limbs).unwrap()
}

fn random_flags(r: &mut ChaCha8Rng, cfg: WideConfig) -> WideWord {
    let limbs: Vec<u64> = (0..cfg.k()).map(|_| r.gen_range(0..2)).collect();
    WideWord::from_limbs(cfg, &limbs).unwrap()
}

fn wide_word_core() -> Outcome {
    const CASES: usize = 10_000;
    let mut r = rng(1);
    let mut checked = 0usize;
    for (w, k) in [(8u32, 4usize), (16, 16), (64, 64)] {
        let cfg = WideConfig::new(w, k).unwrap();
        let n = BigUint::from(1u8) << cfg.bits();
        let all = &n - 1u8;
        for _ in 0..CASES {
            let (a, b) = (random_word(&mut r, cfg), random_word(&mut r, cfg));
            let (ba, bb) = (to_big(&a), to_big(&b));
            let s = r.gen_range(0..=cfg.bits());
            ensure!(to_big(&a.and(&b).unwrap()) == &ba & &bb, "and at ({w},{k})");
            ensure!(to_big(&a.or(&b).unwrap()) == &ba | &bb, "or at ({w},{k})");
            ensure!(to_big(&a.xor(&b).unwrap()) == &ba ^ &bb, "xor at ({w},{k})");
            ensure!(to_big(&a.not()) == &all ^ &ba, "not at ({w},{k})");
            ensure!(to_big(&a.add(&b).unwrap()) == (&ba + &bb) % &n, "add at ({w},{k})");
            ensure!(to_big(&a.sub(&b).unwrap()) == (&ba + &n - &bb) % &n, "sub at ({w},{k})");
            ensure!(to_big(&a.shl(s).unwrap()) == (&ba << s) % &n, "shl {s} at ({w},{k})");
            ensure!(to_big(&a.shr(s).unwrap()) == &ba >> s, "shr {s} at ({w},{k})");

            let f = r.gen_range(2..=(w as usize).min(16));
            let layout = FieldLayout::new(&cfg, f).unwrap();
            let pay = WideWord::payload_mask(cfg, layout);
            let (pa, pb) = (a.and(&pay).unwrap(), b.and(&pay).unwrap());
            let ge = pa.field_compare_ge(&pb, layout).unwrap();
            let eq = pa.field_eq(&pb, layout).unwrap();
            let mx = pa.field_max(&pb, layout, false).unwrap();
            let full = layout.payload_max();
            for i in 0..layout.count() {
                let (x, y) = (pa.field(layout, i), pb.field(layout, i));
                ensure!(ge.field(layout, i) == if x >= y { full } else { 0 }, "field ge at ({w},{k}) f={f}");
                ensure!(eq.field(layout, i) == if x == y { full } else { 0 }, "field eq at ({w},{k}) f={f}");
                ensure!(mx.field(layout, i) == x.max(y), "field max at ({w},{k}) f={f}");
            }

            let flags = random_flags(&mut r, cfg);
            let packed = flags.compress().unwrap();
            let want = (0..k).fold(BigUint::from(0u8), |acc, j| acc | (BigUint::from(flags.block(j)) << j));
            ensure!(to_big(&packed) == want, "compress at ({w},{k})");
            ensure!(packed.spread().unwrap() == flags, "spread after compress at ({w},{k})");
            checked += 1;
        }
    }
    for k in 1..=16usize {
        for w in [16u32, 64] {
            let cfg = WideConfig::new(w, k).unwrap();
            for v in 0..1u64 << k {
                let x = WideWord::from_limbs(cfg, &[v]).unwrap();
                ensure!(x.spread().unwrap().compress().unwrap() == x, "exhaustive inverse k={k} w={w} v={v}");
            }
        }
    }
    Ok(format!("{checked} random cases per op, exhaustive inverse for k <= 16"))
}

// ---- 2: shared-bit registers ----

fn random_rows(r: &mut ChaCha8Rng, regs: usize, b: usize, nbits: usize) -> Vec<Vec<u64>> {
    (0..regs)
        .map(|_| {
            let mut ids: Vec<u64> = (0..nbits as u64).collect();
            for i in 0..b {
                let j = r.gen_range(i..nbits);
                ids.swap(i, j);
            }
            ids.truncate(b);
            ids
        })
        .collect()
}

fn fsram() -> Outcome {
    let mut m = machine(64, 64, 1 << 22);
    let mut unit_costs = std::collections::BTreeSet::new();
    let measure = |m: &mut Machine, fs: &FsRamLayout, t: usize| {
        let before = m.counter();
        fs.write(m, t, 1).unwrap();
        let mid = m.counter();
        fs.read(m, t).unwrap();
        ((mid - before).total(), (m.counter() - mid).total())
    };
    let mut largest = 0;
    for depth in [1u32, 4, 8, 12, 16] {
        let mark = m.mark();
        let fs = FsRamLayout::yggdrasil(&mut m, depth).unwrap();
        largest = largest.max(fs.registers());
        for t in [0, fs.registers() / 2, fs.registers() - 1] {
            unit_costs.insert(measure(&mut m, &fs, t));
        }
        m.release_to(mark);
    }
    let mut r = rng(2);
    for b in [1usize, 5, 17, 32, 64] {
        let mark = m.mark();
        let rows = random_rows(&mut r, 300, b, 96);
        let fs = FsRamLayout::install(&mut m, 96, &rows).unwrap();
        unit_costs.insert(measure(&mut m, &fs, 7));
        m.release_to(mark);
    }
    ensure!(largest == 1 << 15, "largest layout had {largest} registers");
    ensure!(unit_costs.len() == 1, "write/read costs vary: {unit_costs:?}");

    let mut ops = 0;
    let mut m = machine(16, 16, 1 << 16);
    while ops < 10_000 {
        let mark = m.mark();
        let (regs, b, nbits) = (r.gen_range(1..40), r.gen_range(1..=16), r.gen_range(16..40));
        let rows = random_rows(&mut r, regs, b, nbits);
        let fs = FsRamLayout::install(&mut m, nbits, &rows).unwrap();
        let mut flat: HashMap<u64, u64> = HashMap::new();
        for _ in 0..100 {
            let t = r.gen_range(0..regs);
            if r.gen_bool(0.5) {
                let v = r.gen_range(0..1u64 << b);
                fs.write(&mut m, t, v).unwrap();
                for (j, &id) in rows[t].iter().enumerate() {
                    flat.insert(id, v >> j & 1);
                }
            } else {
                let want = rows[t].iter().enumerate().fold(0, |acc, (j, id)| acc | flat.get(id).copied().unwrap_or(0) << j);
                ensure!(fs.read(&mut m, t).unwrap() == want, "read of register {t} disagrees with the flat map");
            }
            ops += 1;
        }
        m.release_to(mark);
    }
    let (wr, rd) = unit_costs.into_iter().next().unwrap();
    Ok(format!("write {wr} units, read {rd} units up to r = {largest}; {ops} interleaved ops agree"))
}

// ---- 3: priority queue ----

const PQ_OP_BOUND: u64 = 64;

fn priority_queue() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0;
    for depth in [4u32, 8, 10] {
        let universe = 1u64 << depth;
        let ops: Vec<PqOp> = (0..10_000)
            .map(|_| match r.gen_range(0..4) {
                0 | 1 => PqOp::Insert(r.gen_range(0..universe)),
                2 => PqOp::Delete(r.gen_range(0..universe)),
                _ if r.gen_bool(0.5) => PqOp::Min,
                _ => PqOp::Succ(r.gen_range(0..universe)),
            })
            .collect();
        let mut m = machine(16, 16, 1 << 16);
        let q = PriorityQueue::new(&mut m, depth).unwrap();
        let want = oracle::run_pq_trace(universe, &ops).unwrap();
        for (i, (&op, expect)) in ops.iter().zip(&want).enumerate() {
            let before = m.counter();
            let got = match op {
                PqOp::Insert(x) => q.insert(&mut m, x).map(|_| PqOutcome::Done).unwrap(),
                PqOp::Delete(x) => match q.delete(&mut m, x) {
                    Ok(()) => PqOutcome::Done,
                    Err(Error::Input(_)) => PqOutcome::Rejected,
                    Err(e) => return Err(e.to_string()),
                },
                PqOp::Min => PqOutcome::Value(q.min(&mut m).unwrap()),
                PqOp::Succ(x) => PqOutcome::Value(q.successor(&mut m, x).unwrap()),
            };
            ensure!(got == *expect, "M={universe} op {i} {op:?}: got {got:?}, want {expect:?}");
            let cost = (m.counter() - before).total();
            ensure!(cost <= PQ_OP_BOUND, "M={universe} op {i} {op:?} cost {cost} units");
            worst = worst.max(cost);
        }
    }
    Ok(format!("M in {{16, 256, 1024}}, worst op {worst} <= {PQ_OP_BOUND} units"))
}

// ---- 4: dynamic prefix sums ----

const DPS_UNIT: u64 = 24;

fn prefix_sums() -> Outcome {
    let mut r = rng(4);
    let (n, bound) = (8usize, 16u64);
    let mut report = Vec::new();
    for iota in [1u32, 2] {
        let mut worst = 0;
        for op in [Monoid::AddMod(bound), Monoid::Max(bound)] {
            let mut m = machine(64, 64, 1 << 22);
            let ps = PrefixSums::new(&mut m, n, op, iota).unwrap();
            let ops: Vec<DpsOp> = (0..5_000)
                .map(|_| {
                    if r.gen_bool(0.5) {
                        DpsOp::Update(r.gen_range(0..n), r.gen_range(0..bound))
                    } else {
                        DpsOp::Retrieve(r.gen_range(0..n))
                    }
                })
                .collect();
            let want = oracle::run_dps_trace(n, 0, |a, b| op.apply(a, b), &ops).unwrap();
            for (i, (o, expect)) in ops.iter().zip(want).enumerate() {
                let before = m.counter();
                match *o {
                    DpsOp::Update(j, d) => ps.update(&mut m, j, d).unwrap(),
                    DpsOp::Retrieve(j) => {
                        let got = ps.retrieve(&mut m, j).unwrap();
                        ensure!(Some(got) == expect, "{op:?} iota={iota} op {i}: got {got}, want {expect:?}");
                    }
                }
                worst = worst.max((m.counter() - before).total());
            }
        }
        let cap = DPS_UNIT * (iota as u64 + 1);
        ensure!(worst <= cap, "iota={iota}: an op cost {worst} > {cap}");
        report.push(format!("iota={iota} worst {worst} <= {cap}"));
    }
    Ok(report.join(", "))
}

// ---- 5: subset sum ----

fn subset_sum_criterion() -> Outcome {
    let mut r = rng(5);
    let mut m = machine(16, 8, 1 << 16);
    for case in 0..300 {
        let n = r.gen_range(0..=16);
        let weights: Vec<u64> = (0..n).map(|_| r.gen_range(0..200)).collect();
        let t = r.gen_range(0..1500);
        let want = oracle::subset_sum_brute(&weights, t).unwrap();
        ensure!(subset_sum(&mut m, &weights, t).unwrap() == want, "case {case}: {weights:?} t={t}");
    }
    let k = 64usize;
    let mut ratios = Vec::new();
    for t in [1u64 << 18, 1 << 19] {
        let weights: Vec<u64> = (0..64).map(|_| r.gen_range(1..t / 2)).collect();
        let cost = |k| {
            let mut m = machine(64, k, 1 << 22);
            let ans = subset_sum(&mut m, &weights, t).unwrap();
            (ans, m.counter().wide())
        };
        let ((a1, narrow), (ak, wide)) = (cost(1), cost(k));
        ensure!(a1 == ak, "k=1 and k={k} disagree at t={t}");
        let ratio = narrow as f64 / wide as f64;
        ensure!((0.8 * k as f64..=1.2 * k as f64).contains(&ratio), "t={t}: ratio {ratio:.2} outside [0.8k, 1.2k]");
        ratios.push(format!("t=2^{}: {ratio:.1}", t.trailing_zeros()));
    }
    Ok(format!("300 oracle cases agree; k=1/k=64 ratios {}", ratios.join(", ")))
}

// ---- 6: knapsack ----

fn knapsack_criterion() -> Outcome {
    let mut r = rng(6);
    let mut m = machine(32, 8, 1 << 20);
    for case in 0..500 {
        let n = r.gen_range(0..=12);
        let items: Vec<(u64, u64)> = (0..n).map(|_| (r.gen_range(1..60), r.gen_range(0..100))).collect();
        let b = r.gen_range(0..300);
        let want = oracle::knapsack_dp(&items, b).unwrap();
        let got = knapsack(&mut m, &items, b).unwrap();
        ensure!(got == want, "case {case}: {items:?} b={b}: got {got}, want {want}");
    }
    // values equal to weights, totalling more than the capacity, keep the
    // value range at the capacity
    let (w, k) = (64u32, 4usize);
    let mut per_column = Vec::new();
    for e in 10..=14 {
        let b = 1u64 << e;
        let items: Vec<(u64, u64)> = (0..8).map(|_| r.gen_range(b / 4..b / 2)).map(|x| (x, x)).collect();
        let mut m = machine(w, k, 1 << 22);
        knapsack(&mut m, &items, b).unwrap();
        let per_row = m.counter().wide() as f64 / items.len() as f64;
        per_column.push(per_row / (b as f64 / (k as f64 * w as f64)));
    }
    let (lo, hi) = per_column.iter().fold((f64::MAX, 0f64), |(a, b), &x| (a.min(x), b.max(x)));
    ensure!(hi / lo <= 2.0, "per-row cost over m/(kw) spans {lo:.1}..{hi:.1}");
    Ok(format!("500 instances agree; per-row ops / (m/kw) = {per_column:.0?} for m = 2^10..2^14"))
}

// ---- 7: LCS ----

fn lcs_criterion() -> Outcome {
    let mut r = rng(7);
    let mut m = machine(64, 64, 1 << 22);
    let mut blocked = 0;
    for case in 0..1000 {
        let sigma = [2usize, 4, 26][case % 3];
        let x: Vec<u8> = (0..r.gen_range(0..=512)).map(|_| r.gen_range(0..sigma) as u8).collect();
        let y: Vec<u8> = (0..r.gen_range(0..=512)).map(|_| r.gen_range(0..sigma) as u8).collect();
        let want = oracle::lcs_table(&x, &y).unwrap().length() as u64;
        ensure!(lcs_length(&mut m, &x, &y, sigma).unwrap() == want, "case {case}: diagonal sweep");
        let fr = four_russians(&mut m, &x, &y, sigma).unwrap();
        ensure!(fr.length == want, "case {case}: four russians t={}", fr.t);
        blocked += !fr.fell_back as usize;
        if case % 10 == 0 {
            let z = lcs_recover(&mut m, &x, &y, sigma).unwrap();
            ensure!(
                z.len() as u64 == want && oracle::is_subsequence(&z, &x) && oracle::is_subsequence(&z, &y),
                "case {case}: witness"
            );
        }
    }
    let (x, y) = ([0u8, 1, 1, 0, 1], [0u8, 0, 1, 1, 1, 0]);
    let run = lcs(&mut m, &x, &y, 2, Retention::Full).unwrap();
    ensure!(run.length() == 4, "example length {}", run.length());
    let h6 = run.diagonal_h(&m, 6);
    ensure!(h6.as_deref() == Some(&[1, 1, 1, 0, 0, 0][..]), "example H_6 = {h6:?}");
    Ok(format!("1000 pairs agree ({blocked} used block tables); example length 4, H_6 = 111000"))
}

// ---- 8: string search ----

fn search_criterion() -> Outcome {
    let mut r = rng(8);
    let mut cases = 0;
    let mut straddling = 0;
    for (w, k) in [(16u32, 4usize), (32, 3), (64, 8)] {
        let mut m = machine(w, k, 1 << w.min(20));
        for _ in 0..300 {
            let sigma = r.gen_range(1..=4);
            let n = r.gen_range(0..300);
            let t: Vec<u8> = (0..n).map(|_| r.gen_range(0..sigma) as u8).collect();
            let len = r.gen_range(1..=(w as usize).min(12));
            let p: Vec<u8> = if n >= len && r.gen_bool(0.7) {
                let at = r.gen_range(0..=n - len);
                t[at..at + len].to_vec()
            } else {
                (0..len).map(|_| r.gen_range(0..sigma) as u8).collect()
            };
            let want = oracle::naive_search(&t, &p).unwrap();
            let got = [
                ("shift-and", shift_and_wide(&mut m, &t, &p, sigma).unwrap()),
                ("shift-and-parallel", shift_and_parallel(&mut m, &t, &p, sigma).unwrap()),
                ("shift-or", shift_or(&mut m, &t, &p, sigma, Variant::Wide).unwrap()),
                ("shift-or-parallel", shift_or(&mut m, &t, &p, sigma, Variant::Parallel).unwrap()),
            ];
            for (name, rep) in &got {
                ensure!(rep.occurrences == want, "{name} at ({w},{k}) t={t:?} p={p:?}");
            }
            let bmh = bmh_wide(&mut m, &t, &p, sigma).unwrap();
            let scalar = oracle::bmh_scalar(&t, &p, sigma).unwrap();
            ensure!(bmh.occurrences == want, "bmh occurrences at ({w},{k})");
            ensure!(bmh.windows == scalar.windows, "bmh window trace at ({w},{k})");
            let seg = n.div_ceil(k).max(1);
            // a match straddles when it starts in one segment and ends in the next
            straddling += want.iter().filter(|&&s| (s - 1) / seg != (s - 1 + len - 1) / seg).count();
            cases += 1;
        }
    }
    ensure!(straddling > 0, "no boundary-straddling match was generated");
    Ok(format!("{cases} inputs, {straddling} straddling matches each reported once"))
}

// ---- 9: search speedup ----

fn search_speedup() -> Outcome {
    let (w, k) = (64u32, 16usize);
    let len = k * w as usize;
    let mut r = rng(9);
    let t: Vec<u8> = (0..4000).map(|_| r.gen_range(0..2)).collect();
    let p = t[1000..1000 + len].to_vec();
    let per_char = |blocks| {
        let mut m = machine(w, blocks, 1 << 16);
        let rep = shift_and_wide(&mut m, &t, &p, 2).unwrap();
        (rep.occurrences, m.counter().wide() as f64 / t.len() as f64)
    };
    let ((o1, base), (ok, wide)) = (per_char(1), per_char(k));
    ensure!(o1 == ok && o1.contains(&1001), "occurrence sets differ");
    let scaled = wide / (base / k as f64);
    ensure!((0.8..=1.2).contains(&scaled), "k={k} costs {scaled:.3} of base/k");
    Ok(format!("m = kw = {len}: {wide:.1} wide ops/char vs {base:.1} at k=1 (x{:.2})", base / wide))
}

// ---- 10: CLI contract ----

fn uwword(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_uwword")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn answer(stdout: &str) -> serde_json::Value {
    let rec: serde_json::Value = serde_json::from_str(stdout.trim()).expect("one JSON record");
    rec["answer"].clone()
}

fn cli_contract() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let f = dir.path().join("f");
    std::fs::write(&f, "aabbba").map_err(|e| e.to_string())?;
    let f = f.to_str().unwrap();

    let (code, out) = uwword(&["subsetsum", "--weights", "2,3,7", "--target", "5", "--check"]);
    ensure!(code == 0 && answer(&out) == serde_json::json!(true), "subsetsum: exit {code}, {out}");
    ensure!(out.contains("\"check\":true"), "subsetsum check did not pass: {out}");
    let (code, out) = uwword(&["lcs", "--x", "abbab", "--y", "aabbba", "--sigma", "2"]);
    ensure!(code == 0 && answer(&out)["length"] == 4, "lcs: exit {code}, {out}");
    let (code, out) = uwword(&["search", "--algo", "bmh", "--pattern", "ab", "--text-file", f]);
    ensure!(code == 0 && answer(&out)["occurrences"] == serde_json::json!([2]), "search: exit {code}, {out}");

    let malformed: [&[&str]; 5] = [
        &["subsetsum", "--weights", "2,x", "--target", "5"],
        &["knapsack", "--items", "3-4", "--capacity", "5"],
        &["lcs", "--x", "abc", "--y", "ab", "--sigma", "2"],
        &["search", "--algo", "nope", "--pattern", "ab", "--text", "ab"],
        &["pq-trace", "--universe-bits", "4", "--trace-file", "/nonexistent/trace"],
    ];
    for args in malformed {
        let (code, _) = uwword(args);
        ensure!(code == 2, "{args:?} exited {code}");
    }
    Ok("3 examples answer as stated; 5 malformed inputs exit 2".into())
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 10] = [
        (1, "wide-word core", Duration::from_secs(30), wide_word_core),
        (2, "shared-bit registers", Duration::from_secs(30), fsram),
        (3, "priority queue", Duration::from_secs(60), priority_queue),
        (4, "dynamic prefix sums", Duration::from_secs(30), prefix_sums),
        (5, "subset sum", Duration::from_secs(120), subset_sum_criterion),
        (6, "knapsack", Duration::from_secs(120), knapsack_criterion),
        (7, "lcs", Duration::from_secs(120), lcs_criterion),
        (8, "string search", Duration::from_secs(120), search_criterion),
        (9, "search speedup", Duration::from_secs(60), search_speedup),
        (10, "cli contract", Duration::from_secs(60), cli_contract),
    ];
    let mut failed = 0;
    for (n, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > limit => Err(format!("took {took:.1?}, limit {limit:?}")),
            o => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS {name} ({took:.1?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL {name} ({took:.1?}): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
