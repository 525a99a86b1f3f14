use crate::{Error, Result};

fn check_pattern(p: &[u8]) -> Result<()> {
    if p.is_empty() {
        Err(Error::Input("empty pattern".into()))
    } else {
        Ok(())
    }
}

/// 1-based start positions of every occurrence of `p` in `t`.
pub fn naive_search(t: &[u8], p: &[u8]) -> Result<Vec<usize>> {
    check_pattern(p)?;
    if p.len() > t.len() {
        return Ok(Vec::new());
    }
    Ok((0..=t.len() - p.len()).filter(|&i| &t[i..i + p.len()] == p).map(|i| i + 1).collect())
}

/// Horspool shift table: `m - j` for the last occurrence of each symbol
/// among `p[1..m-1]` (1-based), `m` otherwise.
pub fn bmh_jump(p: &[u8], sigma: usize) -> Result<Vec<usize>> {
    check_pattern(p)?;
    let m = p.len();
    let mut jump = vec![m; sigma.max(1)];
    for (j, &c) in p[..m - 1].iter().enumerate() {
        if c as usize >= sigma {
            return Err(Error::Input(format!("symbol {c} not below sigma {sigma}")));
        }
        jump[c as usize] = m - 1 - j;
    }
    Ok(jump)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BmhRun {
    pub occurrences: Vec<usize>,
    /// 1-based start of every window examined, in order.
    pub windows: Vec<usize>,
}

pub fn bmh_scalar(t: &[u8], p: &[u8], sigma: usize) -> Result<BmhRun> {
    let jump = bmh_jump(p, sigma)?;
    let (n, m) = (t.len(), p.len());
    let mut run = BmhRun { occurrences: Vec::new(), windows: Vec::new() };
    let mut i = 0;
    while i + m <= n {
        run.windows.push(i + 1);
        if &t[i..i + m] == p {
            run.occurrences.push(i + 1);
        }
        let last = t[i + m - 1] as usize;
        if last >= sigma {
            return Err(Error::Input(format!("symbol {last} not below sigma {sigma}")));
        }
        i += jump[last];
    }
    Ok(run)
}

pub fn is_subsequence(s: &[u8], of: &[u8]) -> bool {
    let mut it = of.iter();
    s.iter().all(|c| it.any(|d| d == c))
}
