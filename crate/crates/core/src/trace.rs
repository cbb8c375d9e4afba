//! Convergence traces and their CSV form.
//!
//! One row per completed step: `seed,step,cum_evals,f_value`. Values are
//! written with 17 significant digits so they read back bit-exactly.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::{Error, Result};

pub const CSV_HEADER: &str = "seed,step,cum_evals,f_value";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub seed: u64,
    pub step: u64,
    pub cum_evals: u64,
    pub f_value: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    rows: Vec<TraceRow>,
}

impl Trace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: TraceRow) {
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn final_value(&self) -> Option<f64> {
        self.rows.last().map(|r| r.f_value)
    }

    pub fn total_evals(&self) -> Option<u64> {
        self.rows.last().map(|r| r.cum_evals)
    }

    /// Evaluations spent when `f` first dropped below `target`.
    pub fn evals_to_reach(&self, target: f64) -> Option<u64> {
        self.rows.iter().find(|r| r.f_value < target).map(|r| r.cum_evals)
    }

    /// `f` of the last row with `cum_evals <= checkpoint`.
    pub fn value_at(&self, checkpoint: u64) -> Option<f64> {
        let n = self.rows.partition_point(|r| r.cum_evals <= checkpoint);
        n.checked_sub(1).map(|i| self.rows[i].f_value)
    }

    pub fn is_monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].f_value <= w[0].f_value)
    }

    pub fn evals_strictly_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].cum_evals > w[0].cum_evals)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        write_rows(&mut out, &self.rows);
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<Trace>> {
        read_traces(r)
    }
}

pub(crate) fn write_rows(out: &mut String, rows: &[TraceRow]) {
    for r in rows {
        writeln!(out, "{},{},{},{:.16e}", r.seed, r.step, r.cum_evals, r.f_value)
            .expect("writing to a String cannot fail");
    }
}

/// Reads a CSV with one or more seeds and splits it per seed, in order of
/// first appearance.
pub fn read_traces<R: BufRead>(r: R) -> Result<Vec<Trace>> {
    let mut lines = r.lines();
    match lines.next().transpose()? {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(Error::Trace(format!(
                "expected header {CSV_HEADER:?}, found {:?}",
                other.unwrap_or_default()
            )))
        }
    }
    let mut traces: Vec<(u64, Trace)> = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Trace(format!("line {}: {line:?}", n + 2));
        let fields: Vec<&str> = line.trim().split(',').collect();
        let [seed, step, evals, f] = fields[..] else {
            return Err(bad());
        };
        let row = TraceRow {
            seed: seed.parse().map_err(|_| bad())?,
            step: step.parse().map_err(|_| bad())?,
            cum_evals: evals.parse().map_err(|_| bad())?,
            f_value: f.parse().map_err(|_| bad())?,
        };
        match traces.iter_mut().find(|(s, _)| *s == row.seed) {
            Some((_, t)) => t.push(row),
            None => {
                let mut t = Trace::new();
                t.push(row);
                traces.push((row.seed, t));
            }
        }
    }
    Ok(traces.into_iter().map(|(_, t)| t).collect())
}
