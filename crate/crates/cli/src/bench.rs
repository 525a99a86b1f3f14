//! Counter sweeps. Each size runs once on the configured machine and once
//! on a baseline, either the same algorithm with `k = 1` or the plain
//! scalar cell count of the textbook algorithm.

use std::time::Instant;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use uwram::batch::Exec;
use uwram::dp::{knapsack, lcs_length, subset_sum};
use uwram::search::{shift_and_parallel, shift_and_wide};
use uwram::{CostCounter, Machine};

use crate::record::RunRecord;
use crate::Global;

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    algo: BenchAlgo,
    /// Target, capacity or text length at each point.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Baseline::Wordram)]
    baseline: Baseline,
    /// Items, second string length or pattern length.
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    sigma: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Run sweep points one after another.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchAlgo {
    Subsetsum,
    Knapsack,
    Lcs,
    ShiftAnd,
    ShiftAndParallel,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Baseline {
    Wordram,
    Naive,
}

enum Instance {
    Subset(Vec<u64>, u64),
    Knap(Vec<(u64, u64)>, u64),
    Pair(Vec<u8>, Vec<u8>),
}

fn instance(algo: BenchAlgo, size: usize, a: &BenchArgs) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed ^ size as u64);
    let sym = |rng: &mut ChaCha8Rng, len| (0..len).map(|_| rng.gen_range(0..a.sigma) as u8).collect::<Vec<_>>();
    match algo {
        BenchAlgo::Subsetsum => {
            let w = (0..a.n).map(|_| rng.gen_range(1..=size as u64 / 2 + 1)).collect();
            Instance::Subset(w, size as u64)
        }
        BenchAlgo::Knapsack => {
            let items = (0..a.n).map(|_| (rng.gen_range(1..=size as u64 / 4 + 1), rng.gen_range(1..1000))).collect();
            Instance::Knap(items, size as u64)
        }
        BenchAlgo::Lcs => Instance::Pair(sym(&mut rng, size), sym(&mut rng, a.n)),
        BenchAlgo::ShiftAnd | BenchAlgo::ShiftAndParallel => {
            let t = sym(&mut rng, size);
            let at = rng.gen_range(0..=size.saturating_sub(a.n));
            let p = t[at..(at + a.n).min(size)].to_vec();
            Instance::Pair(t, p)
        }
    }
}

/// Runs the algorithm and returns its answer with the counters it used.
fn measure(m: &mut Machine, algo: BenchAlgo, inst: &Instance, sigma: usize) -> Result<(Value, CostCounter)> {
    m.reset_counter();
    let answer = match (algo, inst) {
        (BenchAlgo::Subsetsum, Instance::Subset(w, t)) => json!(subset_sum(m, w, *t)?),
        (BenchAlgo::Knapsack, Instance::Knap(items, b)) => json!(knapsack(m, items, *b)?),
        (BenchAlgo::Lcs, Instance::Pair(x, y)) => json!(lcs_length(m, x, y, sigma)?),
        (BenchAlgo::ShiftAnd, Instance::Pair(t, p)) => json!(shift_and_wide(m, t, p, sigma)?.occurrences),
        (BenchAlgo::ShiftAndParallel, Instance::Pair(t, p)) => json!(shift_and_parallel(m, t, p, sigma)?.occurrences),
        _ => unreachable!("instance built for another algorithm"),
    };
    Ok((answer, m.counter()))
}

/// Cell updates of the scalar textbook algorithm.
fn naive_ops(inst: &Instance) -> u64 {
    match inst {
        Instance::Subset(w, t) => w.len() as u64 * (t + 1),
        Instance::Knap(items, b) => items.len() as u64 * (b + 1),
        Instance::Pair(a, b) => a.len() as u64 * b.len() as u64,
    }
}

fn point(g: &Global, a: &BenchArgs, size: usize) -> Result<RunRecord> {
    let start = Instant::now();
    let inst = instance(a.algo, size, a);
    let mut m = g.machine_for(g.blocks)?;
    let (answer, uw) = measure(&mut m, a.algo, &inst, a.sigma)?;
    drop(m);
    let (baseline_ops, uw_ops, agree) = match a.baseline {
        Baseline::Wordram => {
            let mut m1 = g.machine_for(1)?;
            let (base_answer, base) = measure(&mut m1, a.algo, &inst, a.sigma)?;
            (base.wide(), uw.wide(), base_answer == answer)
        }
        Baseline::Naive => (naive_ops(&inst), uw.total(), true),
    };
    let ratio = baseline_ops as f64 / uw_ops.max(1) as f64;
    let input = json!({"algo": a.algo.to_possible_value().map(|v| v.get_name().to_owned()), "size": size, "n": a.n, "seed": a.seed});
    let out = json!({
        "result": answer,
        "baseline": if a.baseline == Baseline::Wordram { "wordram" } else { "naive" },
        "baseline_ops": baseline_ops,
        "uw_ops": uw_ops,
        "ratio": ratio,
    });
    let check = (g.check || a.baseline == Baseline::Wordram).then_some(agree);
    Ok(g.record("bench", input, out, uw, check, start))
}

pub fn run(g: &Global, a: &BenchArgs) -> Result<Vec<RunRecord>> {
    if a.sigma == 0 || a.sigma > 256 {
        bail!("--sigma must be in 1..=256");
    }
    let exec = if a.sequential { Exec::Sequential } else { Exec::default() };
    exec.map(&a.sizes, |&size| point(g, a, size)).into_iter().collect()
}
