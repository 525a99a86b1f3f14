use std::collections::BTreeSet;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PqOp {
    Insert(u64),
    Delete(u64),
    Min,
    Succ(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PqOutcome {
    Done,
    Value(Option<u64>),
    /// The operation must be rejected (deleting an absent element).
    Rejected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpsOp {
    Update(usize, u64),
    Retrieve(usize),
}

fn words(line: &str) -> Option<Vec<&str>> {
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        None
    } else {
        Some(line.split_whitespace().collect())
    }
}

fn num<T: std::str::FromStr>(s: &str, lineno: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Input(format!("line {lineno}: bad number {s:?}")))
}

/// One op per line: `insert x`, `delete x`, `min`, `succ x`. Blank lines
/// and `#` comments are skipped.
pub fn parse_pq_trace(text: &str) -> Result<Vec<PqOp>> {
    let mut ops = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let Some(w) = words(line) else { continue };
        let n = i + 1;
        ops.push(match w.as_slice() {
            ["insert", x] => PqOp::Insert(num(x, n)?),
            ["delete", x] => PqOp::Delete(num(x, n)?),
            ["min"] => PqOp::Min,
            ["succ", x] => PqOp::Succ(num(x, n)?),
            _ => return Err(Error::Input(format!("line {n}: unrecognised op {line:?}"))),
        });
    }
    Ok(ops)
}

/// One op per line: `update j d` or `retrieve j`.
pub fn parse_dps_trace(text: &str) -> Result<Vec<DpsOp>> {
    let mut ops = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let Some(w) = words(line) else { continue };
        let n = i + 1;
        ops.push(match w.as_slice() {
            ["update", j, d] => DpsOp::Update(num(j, n)?, num(d, n)?),
            ["retrieve", j] => DpsOp::Retrieve(num(j, n)?),
            _ => return Err(Error::Input(format!("line {n}: unrecognised op {line:?}"))),
        });
    }
    Ok(ops)
}

/// Expected outcome of each op under sorted-set semantics.
pub fn run_pq_trace(universe: u64, ops: &[PqOp]) -> Result<Vec<PqOutcome>> {
    let mut set = BTreeSet::new();
    let check = |x: u64| {
        if x < universe {
            Ok(())
        } else {
            Err(Error::Input(format!("element {x} outside universe {universe}")))
        }
    };
    ops.iter()
        .map(|&op| {
            Ok(match op {
                PqOp::Insert(x) => {
                    check(x)?;
                    set.insert(x);
                    PqOutcome::Done
                }
                PqOp::Delete(x) => {
                    check(x)?;
                    if set.remove(&x) {
                        PqOutcome::Done
                    } else {
                        PqOutcome::Rejected
                    }
                }
                PqOp::Min => PqOutcome::Value(set.first().copied()),
                PqOp::Succ(x) => {
                    check(x)?;
                    PqOutcome::Value(set.range(x + 1..).next().copied())
                }
            })
        })
        .collect()
}

/// Expected result of every retrieve, by rescanning the array with the
/// commutative operation `op` and its identity.
pub fn run_dps_trace(n: usize, identity: u64, op: impl Fn(u64, u64) -> u64, ops: &[DpsOp]) -> Result<Vec<Option<u64>>> {
    let mut a = vec![identity; n];
    ops.iter()
        .map(|&o| match o {
            DpsOp::Update(j, d) if j < n => {
                a[j] = op(a[j], d);
                Ok(None)
            }
            DpsOp::Retrieve(j) if j < n => Ok(Some(a[..=j].iter().fold(identity, |acc, &v| op(acc, v)))),
            DpsOp::Update(j, _) | DpsOp::Retrieve(j) => Err(Error::Input(format!("index {j} outside array of {n}"))),
        })
        .collect()
}
