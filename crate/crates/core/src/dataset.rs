//! Sparse labelled datasets and the LIBSVM text format.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVec {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVec {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let (indices, values) = pairs.into_iter().unzip();
        Self { indices, values }
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.indices.iter().zip(&self.values).map(|(&i, &v)| v * x[i]).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    fn max_index(&self) -> Option<usize> {
        self.indices.iter().copied().max()
    }
}

/// Feature vectors with labels in `{-1, +1}`.
#[derive(Debug, Clone)]
pub struct Dataset {
    rows: Vec<(SparseVec, f64)>,
    dim: usize,
}

impl Dataset {
    pub fn new(rows: Vec<(SparseVec, f64)>, dim: usize) -> Result<Self> {
        for (line, (z, y)) in rows.iter().enumerate() {
            if *y != 1.0 && *y != -1.0 {
                return Err(Error::Label {
                    line: line + 1,
                    label: y.to_string(),
                });
            }
            if let Some(i) = z.max_index() {
                if i >= dim {
                    return Err(Error::IndexOutOfRange { index: i, dim });
                }
            }
        }
        Ok(Self { rows, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SparseVec, f64)> + '_ {
        self.rows.iter().map(|(z, y)| (z, *y))
    }
}

/// Reads a LIBSVM file. Labels `{0, 1}` are mapped to `{-1, +1}`.
pub fn load_libsvm(path: impl AsRef<Path>, expected_dim: Option<usize>) -> Result<Dataset> {
    let path = path.as_ref();
    let wrap = |source: Error| Error::Dataset {
        path: path.to_path_buf(),
        source: Box::new(source),
    };
    let file = File::open(path).map_err(|e| wrap(e.into()))?;
    parse_libsvm(BufReader::new(file), expected_dim).map_err(wrap)
}

pub fn parse_libsvm<R: BufRead>(reader: R, expected_dim: Option<usize>) -> Result<Dataset> {
    let mut rows = Vec::new();
    let mut max_index = 0usize;
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label = tokens.next().unwrap_or_default();
        let y = parse_label(label).ok_or_else(|| Error::Label {
            line: line_no,
            label: label.to_string(),
        })?;

        let mut seen = HashSet::new();
        let mut entries = Vec::new();
        for token in tokens {
            let parse_err = |message: String| Error::Parse { line: line_no, message };
            let (idx, val) = token
                .split_once(':')
                .ok_or_else(|| parse_err(format!("expected idx:val, found {token:?}")))?;
            let idx: usize = idx
                .parse()
                .map_err(|_| parse_err(format!("bad feature index {idx:?}")))?;
            if idx < 1 {
                return Err(parse_err("feature indices are 1-based".into()));
            }
            let val: f64 = val
                .parse()
                .map_err(|_| parse_err(format!("bad feature value {val:?}")))?;
            if !val.is_finite() {
                return Err(parse_err(format!("non-finite feature value {val}")));
            }
            if !seen.insert(idx) {
                return Err(parse_err(format!("duplicate feature index {idx}")));
            }
            max_index = max_index.max(idx);
            entries.push((idx - 1, val));
        }
        rows.push((SparseVec::from_pairs(entries), y));
    }
    let dim = expected_dim.map_or(max_index, |d| d.max(max_index));
    Dataset::new(rows, dim)
}

fn parse_label(token: &str) -> Option<f64> {
    let v = token.parse::<f64>().ok()?;
    if v == 1.0 {
        Some(1.0)
    } else if v == -1.0 || v == 0.0 {
        Some(-1.0)
    } else {
        None
    }
}

/// Binary sparse features with labels drawn from a planted logistic model.
///
/// Stands in for a3a-like data (`dim = 123`, `n = 3186`, 14 active features
/// per row) when the real file is not available.
pub fn synthetic_binary(n: usize, dim: usize, active: usize, seed: u64) -> Result<Dataset> {
    if active == 0 || active > dim {
        return Err(Error::param("active features must be in 1..=dim"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let rows = (0..n)
        .map(|_| {
            let mut idx = sample(&mut rng, dim, active).into_vec();
            idx.sort_unstable();
            let z = SparseVec::from_pairs(idx.into_iter().map(|i| (i, 1.0)));
            let p = 1.0 / (1.0 + (-z.dot(&w)).exp());
            let y = if rng.random::<f64>() < p { 1.0 } else { -1.0 };
            (z, y)
        })
        .collect();
    Dataset::new(rows, dim)
}

/// a3a-shaped synthetic dataset.
pub fn synthetic_a3a(seed: u64) -> Dataset {
    synthetic_binary(3186, 123, 14, seed).expect("valid synthetic parameters")
}
