mod bench;
mod record;
mod symbols;

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use uwram::dp::{four_russians, four_russians_with, knapsack, lcs, lcs_length, subset_sum, Retention};
use uwram::fsram::{FsRamLayout, Monoid, PrefixSums, PriorityQueue};
use uwram::oracle::{self, DpsOp, PqOp, PqOutcome};
use uwram::search::{bmh_wide, shift_and_parallel, shift_and_wide, shift_or, SearchReport, Variant};
use uwram::{CostCounter, Machine, WideConfig};

use record::{Config, RunRecord};
use symbols::{encode, read_text};

#[derive(Parser)]
#[command(name = "uwword", version, about = "Run algorithms on a simulated ultra-wide word RAM")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
pub struct Global {
    /// Block width w in bits.
    #[arg(long, global = true, default_value_t = 64)]
    block_bits: u32,
    /// Number of blocks k.
    #[arg(long, global = true, default_value_t = 64)]
    blocks: usize,
    /// Compare every answer with the scalar oracle.
    #[arg(long, global = true)]
    check: bool,
    /// One JSON record per line; `--json false` prints a short summary.
    #[arg(long, global = true, default_value_t = true, action = ArgAction::Set, num_args = 0..=1, default_missing_value = "true")]
    json: bool,
    /// Reject operands that break an operation's preconditions.
    #[arg(long, global = true, default_value_t = true, action = ArgAction::Set, num_args = 0..=1, default_missing_value = "true")]
    strict: bool,
    /// Memory cells; defaults to min(2^w, 2^22).
    #[arg(long, global = true)]
    cells: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Is there a subset of the weights summing to the target?
    Subsetsum {
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
        #[arg(long)]
        target: u64,
    },
    /// Best total value within a capacity; items as weight:value.
    Knapsack {
        #[arg(long, value_delimiter = ',', required = true)]
        items: Vec<String>,
        #[arg(long)]
        capacity: u64,
    },
    /// Longest common subsequence.
    Lcs {
        #[arg(long, conflicts_with = "x_file")]
        x: Option<String>,
        #[arg(long)]
        x_file: Option<PathBuf>,
        #[arg(long, conflicts_with = "y_file")]
        y: Option<String>,
        #[arg(long)]
        y_file: Option<PathBuf>,
        #[arg(long)]
        sigma: Option<usize>,
        /// Use precomputed block tables.
        #[arg(long)]
        four_russians: bool,
        /// Block side for --four-russians; chosen from the input size if absent.
        #[arg(long, requires = "four_russians")]
        block_side: Option<usize>,
        /// Also print one longest common subsequence.
        #[arg(long, conflicts_with = "four_russians")]
        recover: bool,
    },
    /// Find every occurrence of a pattern.
    Search {
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long)]
        pattern: String,
        #[arg(long, conflicts_with = "text")]
        text_file: Option<PathBuf>,
        #[arg(long)]
        text: Option<String>,
        #[arg(long)]
        sigma: Option<usize>,
    },
    /// Replay insert/delete/min/succ lines on the priority queue.
    PqTrace {
        /// Universe is 0..2^bits.
        #[arg(long)]
        universe_bits: u32,
        #[arg(long)]
        trace_file: PathBuf,
    },
    /// Replay update/retrieve lines on dynamic prefix sums.
    DpsTrace {
        #[arg(long)]
        len: usize,
        /// Values lie below this bound.
        #[arg(long, default_value_t = 16)]
        bound: u64,
        #[arg(long, value_enum, default_value_t = DpsKind::Add)]
        op: DpsKind,
        #[arg(long, default_value_t = 1)]
        iota: u32,
        #[arg(long)]
        trace_file: PathBuf,
    },
    /// Install a shared-bit register layout and replay read/write lines.
    Fsram {
        #[arg(long)]
        layout_file: PathBuf,
        #[arg(long)]
        ops_file: Option<PathBuf>,
    },
    /// Counter sweeps against a word-RAM or naive baseline.
    Bench(bench::BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    ShiftAnd,
    ShiftAndParallel,
    ShiftOr,
    Bmh,
}

#[derive(Clone, Copy, ValueEnum)]
enum DpsKind {
    Add,
    Max,
}

impl Global {
    pub fn machine_for(&self, k: usize) -> Result<Machine> {
        let cfg = WideConfig::new(self.block_bits, k)?.with_strict(self.strict);
        let cells = self.cells.unwrap_or(if self.block_bits >= 22 { 1 << 22 } else { 1 << self.block_bits });
        Ok(Machine::new(cfg, cells)?)
    }

    fn machine(&self) -> Result<Machine> {
        self.machine_for(self.blocks)
    }

    pub fn record(&self, command: &str, input: Value, answer: Value, counters: CostCounter, check: Option<bool>, start: Instant) -> RunRecord {
        RunRecord {
            command: command.into(),
            config: Config { w: self.block_bits, k: self.blocks },
            input,
            answer,
            counters: counters.into(),
            check,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }
}

fn text_arg(inline: Option<String>, file: Option<PathBuf>, name: &str) -> Result<Vec<u8>> {
    match (inline, file) {
        (Some(s), _) => Ok(s.into_bytes()),
        (None, Some(p)) => read_text(&p),
        (None, None) => bail!("missing --{name} or --{name}-file"),
    }
}

fn read_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> Result<Vec<RunRecord>> {
    let g = cli.global;
    let start = Instant::now();
    let one = |r: RunRecord| Ok(vec![r]);
    match cli.cmd {
        Cmd::Subsetsum { weights, target } => {
            let mut m = g.machine()?;
            let answer = subset_sum(&mut m, &weights, target)?;
            let counters = m.counter();
            let check = if g.check {
                let want = if weights.len() <= oracle::BRUTE_MAX_ITEMS {
                    oracle::subset_sum_brute(&weights, target)?
                } else {
                    oracle::subset_sum_dp(&weights, target)?
                };
                Some(want == answer)
            } else {
                None
            };
            let input = json!({"n": weights.len(), "target": target});
            one(g.record("subsetsum", input, json!(answer), counters, check, start))
        }
        Cmd::Knapsack { items, capacity } => {
            let items: Vec<(u64, u64)> = items
                .iter()
                .map(|s| {
                    let (a, b) = s.split_once(':').with_context(|| format!("item {s:?} is not weight:value"))?;
                    Ok((a.trim().parse()?, b.trim().parse()?))
                })
                .collect::<Result<_>>()?;
            let mut m = g.machine()?;
            let answer = knapsack(&mut m, &items, capacity)?;
            let counters = m.counter();
            let check = g.check.then(|| oracle::knapsack_dp(&items, capacity).map(|v| v == answer)).transpose()?;
            let input = json!({"n": items.len(), "capacity": capacity});
            one(g.record("knapsack", input, json!(answer), counters, check, start))
        }
        Cmd::Lcs { x, x_file, y, y_file, sigma, four_russians: fr, block_side, recover } => {
            let x = text_arg(x, x_file, "x")?;
            let y = text_arg(y, y_file, "y")?;
            let (codes, alpha) = encode(&[&x, &y], sigma)?;
            let (x, y) = (&codes[0], &codes[1]);
            let mut m = g.machine()?;
            let mut answer = serde_json::Map::new();
            let (length, witness) = if fr {
                let r = match block_side {
                    Some(t) => four_russians_with(&mut m, x, y, alpha.sigma, t)?,
                    None => four_russians(&mut m, x, y, alpha.sigma)?,
                };
                answer.insert("block_side".into(), json!(r.t));
                answer.insert("fell_back".into(), json!(r.fell_back));
                (r.length, None)
            } else if recover {
                let run = lcs(&mut m, x, y, alpha.sigma, Retention::Full)?;
                let z = run.recover(&mut m)?;
                (run.length(), Some(z))
            } else {
                (lcs_length(&mut m, x, y, alpha.sigma)?, None)
            };
            let counters = m.counter();
            answer.insert("length".into(), json!(length));
            if let Some(z) = &witness {
                answer.insert("witness".into(), json!(alpha.decode(z)));
            }
            let check = if g.check {
                let want = oracle::lcs_table(x, y)?.length() as u64;
                let ok_witness = witness.as_ref().map_or(true, |z| {
                    z.len() as u64 == want && oracle::is_subsequence(z, x) && oracle::is_subsequence(z, y)
                });
                Some(want == length && ok_witness)
            } else {
                None
            };
            let input = json!({"m": x.len(), "n": y.len(), "sigma": alpha.sigma});
            one(g.record("lcs", input, Value::Object(answer), counters, check, start))
        }
        Cmd::Search { algo, pattern, text_file, text, sigma } => {
            let t = text_arg(text, text_file, "text")?;
            let (codes, alpha) = encode(&[&t, pattern.as_bytes()], sigma)?;
            let (t, p) = (&codes[0], &codes[1]);
            let mut m = g.machine()?;
            let report = match algo {
                Algo::ShiftAnd => shift_and_wide(&mut m, t, p, alpha.sigma)?,
                Algo::ShiftAndParallel => shift_and_parallel(&mut m, t, p, alpha.sigma)?,
                Algo::ShiftOr => {
                    let variant = if p.len() <= g.block_bits as usize { Variant::Parallel } else { Variant::Wide };
                    shift_or(&mut m, t, p, alpha.sigma, variant)?
                }
                Algo::Bmh => bmh_wide(&mut m, t, p, alpha.sigma)?,
            };
            let counters = m.counter();
            let check = if g.check {
                let mut ok = oracle::naive_search(t, p)? == report.occurrences;
                if let Algo::Bmh = algo {
                    ok &= oracle::bmh_scalar(t, p, alpha.sigma)?.windows == report.windows;
                }
                Some(ok)
            } else {
                None
            };
            let input = json!({"n": t.len(), "m": p.len(), "sigma": alpha.sigma, "algo": algo_name(algo)});
            one(g.record("search", input, search_answer(&report, algo), counters, check, start))
        }
        Cmd::PqTrace { universe_bits, trace_file } => {
            let ops = oracle::parse_pq_trace(&read_string(&trace_file)?)?;
            let mut m = g.machine()?;
            let q = PriorityQueue::new(&mut m, universe_bits)?;
            m.reset_counter();
            let mut outcomes = Vec::with_capacity(ops.len());
            let mut worst = 0;
            for &op in &ops {
                let before = m.counter();
                outcomes.push(match op {
                    PqOp::Insert(x) => q.insert(&mut m, x).map(|_| PqOutcome::Done)?,
                    PqOp::Delete(x) => match q.delete(&mut m, x) {
                        Ok(()) => PqOutcome::Done,
                        Err(uwram::Error::Input(_)) if x < q.universe() => PqOutcome::Rejected,
                        Err(e) => return Err(e.into()),
                    },
                    PqOp::Min => PqOutcome::Value(q.min(&mut m)?),
                    PqOp::Succ(x) => PqOutcome::Value(q.successor(&mut m, x)?),
                });
                worst = worst.max((m.counter() - before).total());
            }
            let counters = m.counter();
            let check = g.check.then(|| oracle::run_pq_trace(q.universe(), &ops).map(|w| w == outcomes)).transpose()?;
            let shown: Vec<Value> = outcomes
                .iter()
                .map(|o| match o {
                    PqOutcome::Done => json!("ok"),
                    PqOutcome::Value(v) => json!(v),
                    PqOutcome::Rejected => json!("rejected"),
                })
                .collect();
            let input = json!({"ops": ops.len(), "universe": q.universe()});
            let answer = json!({"outcomes": shown, "max_op_units": worst});
            one(g.record("pq-trace", input, answer, counters, check, start))
        }
        Cmd::DpsTrace { len, bound, op, iota, trace_file } => {
            let ops = oracle::parse_dps_trace(&read_string(&trace_file)?)?;
            let monoid = match op {
                DpsKind::Add => Monoid::AddMod(bound),
                DpsKind::Max => Monoid::Max(bound),
            };
            let mut m = g.machine()?;
            let ps = PrefixSums::new(&mut m, len, monoid, iota)?;
            m.reset_counter();
            let mut results = Vec::new();
            let mut worst = 0;
            for &o in &ops {
                let before = m.counter();
                match o {
                    DpsOp::Update(j, d) => ps.update(&mut m, j, d)?,
                    DpsOp::Retrieve(j) => results.push(ps.retrieve(&mut m, j)?),
                }
                worst = worst.max((m.counter() - before).total());
            }
            let counters = m.counter();
            let check = g
                .check
                .then(|| {
                    oracle::run_dps_trace(len, 0, |a, b| monoid.apply(a, b), &ops)
                        .map(|w| w.into_iter().flatten().collect::<Vec<_>>() == results)
                })
                .transpose()?;
            let input = json!({"ops": ops.len(), "len": len, "bound": bound, "iota": iota});
            let answer = json!({"retrieved": results, "max_op_units": worst, "table_cells": ps.table_cells()});
            one(g.record("dps-trace", input, answer, counters, check, start))
        }
        Cmd::Fsram { layout_file, ops_file } => {
            let (nbits, rows) = FsRamLayout::parse(&read_string(&layout_file)?)?;
            let ops = match ops_file {
                Some(p) => parse_register_ops(&read_string(&p)?)?,
                None => Vec::new(),
            };
            let mut m = g.machine()?;
            let fs = FsRamLayout::install(&mut m, nbits, &rows)?;
            m.reset_counter();
            let mut reads = Vec::new();
            let mut worst = 0;
            for &(t, v) in &ops {
                let before = m.counter();
                match v {
                    Some(v) => fs.write(&mut m, t, v)?,
                    None => reads.push(fs.read(&mut m, t)?),
                }
                worst = worst.max((m.counter() - before).wide());
            }
            let counters = m.counter();
            let check = g.check.then(|| flat_registers(&rows, &ops) == reads);
            let input = json!({"registers": fs.registers(), "width": fs.width(), "bits": nbits, "ops": ops.len()});
            let answer = json!({"reads": reads, "max_op_wide_units": worst});
            one(g.record("fsram", input, answer, counters, check, start))
        }
        Cmd::Bench(args) => bench::run(&g, &args),
    }
}

fn algo_name(a: Algo) -> &'static str {
    match a {
        Algo::ShiftAnd => "shift-and",
        Algo::ShiftAndParallel => "shift-and-parallel",
        Algo::ShiftOr => "shift-or",
        Algo::Bmh => "bmh",
    }
}

fn search_answer(r: &SearchReport, algo: Algo) -> Value {
    match algo {
        Algo::Bmh => json!({"occurrences": r.occurrences, "occ": r.occ(), "windows": r.windows}),
        _ => json!({"occurrences": r.occurrences, "occ": r.occ()}),
    }
}

/// `read t` or `write t v`, one per line.
fn parse_register_ops(text: &str) -> Result<Vec<(usize, Option<u64>)>> {
    let mut ops = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = || format!("line {}: expected `read t` or `write t v`, got {line:?}", i + 1);
        ops.push(match parts.as_slice() {
            ["read", t] => (t.parse().with_context(bad)?, None),
            ["write", t, v] => (t.parse().with_context(bad)?, Some(parse_u64(v).with_context(bad)?)),
            _ => bail!(bad()),
        });
    }
    Ok(ops)
}

fn parse_u64(s: &str) -> Result<u64> {
    Ok(match s.strip_prefix("0b") {
        Some(bits) => u64::from_str_radix(bits, 2)?,
        None => s.parse()?,
    })
}

/// The same reads against a plain map from bit id to value.
fn flat_registers(rows: &[Vec<u64>], ops: &[(usize, Option<u64>)]) -> Vec<u64> {
    let mut bits: HashMap<u64, u64> = HashMap::new();
    let mut reads = Vec::new();
    for &(t, v) in ops {
        match v {
            Some(v) => {
                for (j, &id) in rows[t].iter().enumerate() {
                    bits.insert(id, v >> j & 1);
                }
            }
            None => reads.push(
                rows[t].iter().enumerate().fold(0, |acc, (j, id)| acc | bits.get(id).copied().unwrap_or(0) << j),
            ),
        }
    }
    reads
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.global.json;
    match run(cli) {
        Ok(records) => {
            let mut agree = true;
            for r in &records {
                r.emit(json);
                agree &= r.check != Some(false);
            }
            if agree {
                ExitCode::SUCCESS
            } else {
                eprintln!("uwword: answer disagrees with the oracle");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("uwword: {e:#}");
            ExitCode::from(2)
        }
    }
}
