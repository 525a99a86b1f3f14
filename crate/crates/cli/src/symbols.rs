//! Turning command-line strings and files into symbol codes.

use anyhow::{bail, Context, Result};
use std::path::Path;

pub struct Alphabet {
    pub sigma: usize,
    /// Byte for each code, when codes were compacted.
    decode: Option<Vec<u8>>,
}

impl Alphabet {
    pub fn decode(&self, codes: &[u8]) -> String {
        match &self.decode {
            Some(table) => codes.iter().map(|&c| table[c as usize] as char).collect(),
            None => codes.iter().map(|&c| c as char).collect(),
        }
    }
}

/// Encodes several inputs over one alphabet. Bytes already below `sigma`
/// are kept; otherwise distinct bytes are numbered in sorted order, which
/// must not need more than `sigma` codes. Without `sigma` the raw bytes
/// are used with `sigma = 256`.
pub fn encode(inputs: &[&[u8]], sigma: Option<usize>) -> Result<(Vec<Vec<u8>>, Alphabet)> {
    let Some(sigma) = sigma else {
        return Ok((inputs.iter().map(|s| s.to_vec()).collect(), Alphabet { sigma: 256, decode: None }));
    };
    if sigma == 0 || sigma > 256 {
        bail!("--sigma must be in 1..=256, got {sigma}");
    }
    if inputs.iter().all(|s| s.iter().all(|&c| (c as usize) < sigma)) {
        return Ok((inputs.iter().map(|s| s.to_vec()).collect(), Alphabet { sigma, decode: None }));
    }
    let mut seen = [false; 256];
    inputs.iter().flat_map(|s| s.iter()).for_each(|&c| seen[c as usize] = true);
    let table: Vec<u8> = (0..=255u8).filter(|&c| seen[c as usize]).collect();
    if table.len() > sigma {
        bail!("inputs use {} distinct symbols but --sigma is {sigma}", table.len());
    }
    let mut code = [0u8; 256];
    for (i, &c) in table.iter().enumerate() {
        code[c as usize] = i as u8;
    }
    let out = inputs.iter().map(|s| s.iter().map(|&c| code[c as usize]).collect()).collect();
    Ok((out, Alphabet { sigma, decode: Some(table) }))
}

/// File contents with one trailing line break removed.
pub fn read_text(path: &Path) -> Result<Vec<u8>> {
    let mut bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    if bytes.ends_with(b"\n") {
        bytes.pop();
        if bytes.ends_with(b"\r") {
            bytes.pop();
        }
    }
    Ok(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compaction() {
        let (v, a) = encode(&[b"abbab", b"aabbba"], Some(2)).unwrap();
        assert_eq!(v[0], vec![0, 1, 1, 0, 1]);
        assert_eq!(a.decode(&v[1]), "aabbba");
        assert!(encode(&[b"abc"], Some(2)).is_err());
        let (v, _) = encode(&[&[0, 1, 1]], Some(2)).unwrap();
        assert_eq!(v[0], vec![0, 1, 1]);
    }
}
