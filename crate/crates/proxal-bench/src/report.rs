//! Aggregation of per-run traces into a benchmark report: mean iterations
//! and seconds to each precision over successful runs, plus success rates.
//! Aggregation is a pure function of the trace files, so rebuilding a report
//! from the same directory reproduces it byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use proxal::trace::IterationTrace;

use crate::{CliError, CliResult};

/// Echo of the run configuration, written next to the traces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub methods: Vec<String>,
    pub seeds: Vec<u64>,
    pub precisions: Vec<f64>,
    pub max_iters: usize,
    pub alpha_safety: f64,
    pub beta_override: Option<f64>,
    pub unsafe_heuristic: bool,
    pub loc_start_ratio: f64,
}

impl RunManifest {
    pub fn save(&self, dir: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        std::fs::write(dir.join("run_manifest.json"), text)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(dir.join("run_manifest.json"))
            .map_err(|e| CliError::Usage(format!("missing run manifest: {e}")))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad run manifest: {e}")))
    }
}

struct MethodStats {
    /// Per precision: (successes, sum iterations, sum seconds).
    per_precision: Vec<(usize, f64, f64)>,
    runs: usize,
}

/// Build `(human_table, machine_csv)` from a run directory.
pub fn aggregate(dir: &Path) -> CliResult<(String, String)> {
    let manifest = RunManifest::load(dir)?;
    let trace_dir = dir.join("traces");
    let np = manifest.precisions.len();

    let mut csv = String::from("method,seed,precision,iterations,time_s,success\n");
    let mut stats: Vec<MethodStats> = manifest
        .methods
        .iter()
        .map(|_| MethodStats {
            per_precision: vec![(0, 0.0, 0.0); np],
            runs: 0,
        })
        .collect();

    for (mi, method) in manifest.methods.iter().enumerate() {
        for &seed in &manifest.seeds {
            let path = trace_dir.join(format!("{method}__seed{seed}.csv"));
            let trace = IterationTrace::read_csv(&path)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            stats[mi].runs += 1;
            for (pi, &precision) in manifest.precisions.iter().enumerate() {
                match trace.iterations_to_precision(precision) {
                    Some(k) => {
                        let t = trace.records()[k].time_s;
                        stats[mi].per_precision[pi].0 += 1;
                        stats[mi].per_precision[pi].1 += k as f64;
                        stats[mi].per_precision[pi].2 += t;
                        let _ = writeln!(
                            csv,
                            "{method},{seed},{precision:e},{k},{t},true"
                        );
                    }
                    None => {
                        let _ = writeln!(csv, "{method},{seed},{precision:e},,,false");
                    }
                }
            }
        }
    }

    let mut human = String::new();
    let _ = writeln!(human, "benchmark report");
    let _ = writeln!(
        human,
        "instances: {}   iteration cap: {}   alpha safety: {}   beta override: {}   unsafe heuristic: {}   local start ratio: {}",
        manifest.seeds.len(),
        manifest.max_iters,
        manifest.alpha_safety,
        manifest
            .beta_override
            .map(|b| b.to_string())
            .unwrap_or_else(|| "none".into()),
        manifest.unsafe_heuristic,
        manifest.loc_start_ratio,
    );
    let _ = writeln!(
        human,
        "seeds: {}",
        manifest
            .seeds
            .iter()
            .map(|s| s.to_string())
            .collect::<Vec<_>>()
            .join(",")
    );
    let _ = writeln!(
        human,
        "precision columns: {}",
        manifest
            .precisions
            .iter()
            .map(|p| format!("{p:e}"))
            .collect::<Vec<_>>()
            .join("  ")
    );
    let _ = writeln!(human);

    let width = 28;
    let header = |title: &str| {
        let mut s = format!("{:<width$} |", title, width = width);
        for p in &manifest.precisions {
            let _ = write!(s, " {:>8}", format!("{p:e}"));
        }
        s
    };
    for (section, col) in [
        ("iterations (mean over successes)", 0usize),
        ("time [s] (mean over successes)", 1),
        ("success [%]", 2),
    ] {
        let _ = writeln!(human, "{}", header(section));
        for (mi, method) in manifest.methods.iter().enumerate() {
            let mut row = format!("{:<width$} |", method, width = width);
            for pi in 0..np {
                let (succ, iters, secs) = stats[mi].per_precision[pi];
                let cell = match col {
                    0 if succ > 0 => format!("{:.0}", iters / succ as f64),
                    1 if succ > 0 => format!("{:.2}", secs / succ as f64),
                    2 => format!(
                        "{:.1}",
                        100.0 * succ as f64 / stats[mi].runs.max(1) as f64
                    ),
                    _ => "---".to_string(),
                };
                let _ = write!(row, " {cell:>8}");
            }
            let _ = writeln!(human, "{row}");
        }
        let _ = writeln!(human);
    }

    let _ = writeln!(human, "representative traces (first seed):");
    if let Some(&seed) = manifest.seeds.first() {
        for method in &manifest.methods {
            let _ = writeln!(human, "  traces/{method}__seed{seed}.csv");
        }
    }
    Ok((human, csv))
}
