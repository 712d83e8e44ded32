//! Per-iteration optimization records and their CSV form.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "trial,iteration,evals,f_current,f_best,sigma,step";

/// Shortest decimal representation that parses back to the same `f64`.
pub fn format_decimal(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// Cumulative objective queries after this iteration.
    pub evals: u64,
    pub f_current: f64,
    pub f_best: f64,
    /// Smoothing radius (or difference step) in effect for the next iteration.
    pub sigma: f64,
    /// Distance moved during this iteration.
    pub step: f64,
}

/// Append-only list of rows. Row 0 describes the initial point.
#[derive(Clone, Debug, Default, PartialEq)]
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

    pub fn last(&self) -> Option<&TraceRow> {
        self.rows.last()
    }

    /// Best loss known once `evals` queries had been spent, i.e. `f_best` of the
    /// last row whose cumulative count does not exceed `evals`.
    pub fn best_at(&self, evals: u64) -> Option<f64> {
        let n = self.rows.partition_point(|r| r.evals <= evals);
        n.checked_sub(1).map(|i| self.rows[i].f_best)
    }

    pub fn write_csv<W: Write>(&self, trial: usize, mut w: W) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                w,
                "{trial},{},{},{},{},{},{}",
                r.iteration,
                r.evals,
                format_decimal(r.f_current),
                format_decimal(r.f_best),
                format_decimal(r.sigma),
                format_decimal(r.step)
            )?;
        }
        Ok(())
    }

    /// Parses a single-trial CSV written by [`Trace::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<(usize, Trace)> {
        let bad = |line: usize, msg: &str| Error::Config(format!("trace csv line {line}: {msg}"));
        let mut lines = r.lines().enumerate();
        match lines.next() {
            Some((_, Ok(h))) if h.trim_end() == CSV_HEADER => {}
            _ => return Err(bad(1, "missing or unexpected header")),
        }
        let mut trial = None;
        let mut trace = Trace::new();
        for (i, line) in lines {
            let line = line.map_err(|e| bad(i + 1, &e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad(i + 1, "expected 7 fields"));
            }
            let num = |k: usize| f[k].parse::<f64>().map_err(|_| bad(i + 1, "bad number"));
            let t: usize = f[0].parse().map_err(|_| bad(i + 1, "bad trial"))?;
            if *trial.get_or_insert(t) != t {
                return Err(bad(i + 1, "mixed trial ids"));
            }
            trace.push(TraceRow {
                iteration: f[1].parse().map_err(|_| bad(i + 1, "bad iteration"))?,
                evals: f[2].parse().map_err(|_| bad(i + 1, "bad evals"))?,
                f_current: num(3)?,
                f_best: num(4)?,
                sigma: num(5)?,
                step: num(6)?,
            });
        }
        Ok((trial.unwrap_or(0), trace))
    }
}
