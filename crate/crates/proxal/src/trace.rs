//! Per-iteration solver records and their columnar text format.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DVector;

use crate::error::{ProxalError, Result};

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxIters,
    Diverged,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::MaxIters => "max_iters",
            RunStatus::Diverged => "diverged",
        }
    }
}

/// One iterate's worth of measurements. Record `k` describes the state
/// `x^k`: `step_norm` is `||x^k - x^{k-1}||` (zero at `k = 0` where
/// `x^{-1} = x^0`) and `subgrad_norm`, when present, is the norm of a
/// subgradient of the objective at `x^k`.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub objective: f64,
    pub lyapunov: Option<f64>,
    pub step_norm: f64,
    pub subgrad_norm: Option<f64>,
    pub residual: Option<f64>,
    pub time_s: f64,
}

/// Append-only run history, indexed consecutively from 0.
pub struct IterationTrace {
    records: Vec<TraceRecord>,
    iterates: Option<Vec<DVector<f64>>>,
    pub status: RunStatus,
}

impl IterationTrace {
    pub fn new(record_iterates: bool) -> Self {
        IterationTrace {
            records: Vec::new(),
            iterates: if record_iterates { Some(Vec::new()) } else { None },
            status: RunStatus::MaxIters,
        }
    }

    pub fn push(&mut self, record: TraceRecord, iterate: Option<&DVector<f64>>) {
        self.records.push(record);
        if let Some(store) = &mut self.iterates {
            store.push(
                iterate
                    .expect("trace was configured to record iterates")
                    .clone(),
            );
        }
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iterates(&self) -> Option<&[DVector<f64>]> {
        self.iterates.as_deref()
    }

    pub fn last_objective(&self) -> Option<f64> {
        self.records.last().map(|r| r.objective)
    }

    pub fn last_residual(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.residual)
    }

    /// Residual of the first record, used as the normalization scale for
    /// relative precision accounting.
    pub fn initial_residual(&self) -> Option<f64> {
        self.records.first().and_then(|r| r.residual)
    }

    /// First record index whose residual, relative to the initial residual,
    /// is at or below `precision`.
    pub fn iterations_to_precision(&self, precision: f64) -> Option<usize> {
        let scale = self.initial_residual()?;
        if scale == 0.0 {
            return Some(0);
        }
        self.records
            .iter()
            .position(|r| r.residual.map(|res| res / scale <= precision).unwrap_or(false))
    }

    /// Fill the `lyapunov` column from the recorded objectives and step
    /// norms: `H_kappa(z^k) = h(x^k) + kappa ||x^k - x^{k-1}||^2`.
    pub fn fill_lyapunov(&mut self, kappa: f64) {
        for r in &mut self.records {
            r.lyapunov = Some(r.objective + kappa * r.step_norm * r.step_norm);
        }
    }

    /// Serialize to the columnar text schema shared with external plotters.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str("iter,objective,lyapunov,step_norm,subgrad_norm,residual,time_s\n");
        for (i, r) in self.records.iter().enumerate() {
            let _ = write!(out, "{i},{}", fmt_f64(r.objective));
            push_opt(&mut out, r.lyapunov);
            let _ = write!(out, ",{}", fmt_f64(r.step_norm));
            push_opt(&mut out, r.subgrad_norm);
            push_opt(&mut out, r.residual);
            let _ = writeln!(out, ",{}", fmt_f64(r.time_s));
        }
        let _ = writeln!(out, "# status: {}", self.status.as_str());
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| ProxalError::usage("empty trace file"))?;
        if header.trim() != "iter,objective,lyapunov,step_norm,subgrad_norm,residual,time_s" {
            return Err(ProxalError::usage(format!(
                "unexpected trace header: {header}"
            )));
        }
        let mut trace = IterationTrace::new(false);
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(status) = line.strip_prefix("# status:") {
                trace.status = match status.trim() {
                    "converged" => RunStatus::Converged,
                    "max_iters" => RunStatus::MaxIters,
                    "diverged" => RunStatus::Diverged,
                    other => {
                        return Err(ProxalError::usage(format!("unknown status: {other}")))
                    }
                };
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(ProxalError::usage(format!(
                    "trace row has {} fields, expected 7",
                    fields.len()
                )));
            }
            let idx: usize = fields[0]
                .parse()
                .map_err(|_| ProxalError::usage("bad iteration index"))?;
            if idx != trace.records.len() {
                return Err(ProxalError::usage("trace rows are not consecutive"));
            }
            trace.records.push(TraceRecord {
                objective: parse_f64(fields[1])?,
                lyapunov: parse_opt(fields[2])?,
                step_norm: parse_f64(fields[3])?,
                subgrad_norm: parse_opt(fields[4])?,
                residual: parse_opt(fields[5])?,
                time_s: parse_f64(fields[6])?,
            });
        }
        Ok(trace)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text)
    }
}

fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".to_string() } else { "-inf".to_string() }
    } else {
        // Rust's shortest round-trip formatting keeps re-serialization
        // byte-stable.
        format!("{v}")
    }
}

fn push_opt(out: &mut String, v: Option<f64>) {
    match v {
        Some(v) => {
            let _ = write!(out, ",{}", fmt_f64(v));
        }
        None => out.push(','),
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => s
            .parse()
            .map_err(|_| ProxalError::usage(format!("bad float: {s}"))),
    }
}

fn parse_opt(s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s).map(Some)
    }
}
