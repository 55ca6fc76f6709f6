//! Command implementations for the benchmark CLI: instance generation,
//! method-suite runs, trace certification, and report aggregation.

pub mod report;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use proxal::certificate::certify_trace;
use proxal::lowrank::{
    gen_instance, load_instance, run_method, save_instance, BenchOptions, MethodName,
};
use proxal::trace::IterationTrace;
use proxal::ProxalError;

use report::RunManifest;

/// Errors carry the process exit code: usage problems exit 2, runtime
/// failures exit 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<ProxalError> for CliError {
    fn from(e: ProxalError) -> Self {
        match e {
            ProxalError::Usage(msg) => CliError::Usage(msg),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub const DEFAULT_PRECISIONS: [f64; 6] = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12];

/// Generate `count` instances with consecutive seeds and write one file per
/// instance plus a manifest. Rerunning with the same arguments reproduces
/// identical bytes.
pub fn cmd_gen(
    seed: u64,
    dims: (usize, usize, usize, usize),
    count: usize,
    out: &Path,
    dense: bool,
) -> CliResult<Vec<PathBuf>> {
    if count == 0 {
        return Err(CliError::Usage("count must be at least 1".into()));
    }
    let (n, m, r, d) = dims;
    std::fs::create_dir_all(out)?;
    let mut paths = Vec::with_capacity(count);
    let mut manifest = String::new();
    for i in 0..count {
        let s = seed + i as u64;
        let inst = gen_instance(s, n, m, r, d)?;
        let path = out.join(format!("inst_{s}.json"));
        save_instance(&inst, &path, dense)?;
        manifest.push_str(&format!(
            "seed={s} n={n} m={m} rank={r} measurements={d} file={}\n",
            path.file_name().unwrap().to_string_lossy()
        ));
        paths.push(path);
    }
    std::fs::write(out.join("manifest.txt"), &manifest)?;
    print!("{manifest}");
    Ok(paths)
}

/// Arguments of the `run` subcommand.
pub struct RunArgs {
    pub instances: Vec<PathBuf>,
    pub methods: Vec<MethodName>,
    pub max_iters: usize,
    pub precisions: Vec<f64>,
    pub beta: Option<f64>,
    pub alpha_safety: f64,
    pub unsafe_heuristic: bool,
    pub workers: usize,
    pub out: PathBuf,
}

/// Expand directories into their contained instance files, sorted.
pub fn collect_instance_paths(inputs: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(input)?
                .filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| {
                    p.file_name()
                        .and_then(|n| n.to_str())
                        .map(|n| n.starts_with("inst_") && n.ends_with(".json"))
                        .unwrap_or(false)
                })
                .collect();
            found.sort();
            paths.extend(found);
        } else {
            paths.push(input.clone());
        }
    }
    if paths.is_empty() {
        return Err(CliError::Usage("no instance files found".into()));
    }
    Ok(paths)
}

pub fn cmd_run(args: &RunArgs) -> CliResult<()> {
    if args.methods.is_empty() {
        return Err(CliError::Usage("no methods selected".into()));
    }
    if args.precisions.is_empty() || args.precisions.iter().any(|&p| p <= 0.0 || p >= 1.0) {
        return Err(CliError::Usage(
            "precisions must lie strictly between 0 and 1".into(),
        ));
    }
    // Fail on a disallowed method before any run starts.
    if args.methods.contains(&MethodName::HeurIpianoAltproj) && !args.unsafe_heuristic {
        return Err(CliError::Usage(
            "method heur-ipiano-altproj requires --unsafe-heuristic".into(),
        ));
    }

    let mut precisions = args.precisions.clone();
    precisions.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let rel_tol = precisions.last().copied().unwrap();

    let trace_dir = args.out.join("traces");
    std::fs::create_dir_all(&trace_dir)?;

    let opts = BenchOptions {
        max_iters: args.max_iters,
        rel_tol,
        alpha_safety: args.alpha_safety,
        beta_override: args.beta,
        unsafe_heuristic: args.unsafe_heuristic,
        ..Default::default()
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    // Instance-major scheduling keeps at most one instance per worker alive.
    let results: Vec<CliResult<(MethodName, u64)>> = pool.install(|| {
        args.instances
            .par_iter()
            .flat_map(|path| {
                let loaded = load_instance(path).map_err(CliError::from);
                match loaded {
                    Err(e) => vec![Err(e)],
                    Ok(inst) => args
                        .methods
                        .iter()
                        .map(|&name| {
                            let trace = run_method(name, &inst, &opts)?;
                            let file =
                                trace_dir.join(format!("{}__seed{}.csv", name.as_str(), inst.seed));
                            trace
                                .write_csv(&file)
                                .map_err(CliError::from)
                                .map(|_| (name, inst.seed))
                        })
                        .collect::<Vec<_>>(),
                }
            })
            .collect()
    });
    let mut seeds = Vec::new();
    for r in results {
        let (_, seed) = r?;
        if !seeds.contains(&seed) {
            seeds.push(seed);
        }
    }
    seeds.sort_unstable();

    let manifest = RunManifest {
        methods: args.methods.iter().map(|m| m.as_str().to_string()).collect(),
        seeds,
        precisions: precisions.clone(),
        max_iters: args.max_iters,
        alpha_safety: args.alpha_safety,
        beta_override: args.beta,
        unsafe_heuristic: args.unsafe_heuristic,
        loc_start_ratio: opts.loc_start_ratio,
    };
    manifest.save(&args.out)?;

    let (human, csv) = report::aggregate(&args.out)?;
    std::fs::write(args.out.join("report.txt"), &human)?;
    std::fs::write(args.out.join("report.csv"), &csv)?;
    print!("{human}");
    Ok(())
}

/// Rebuild the report files from the traces already on disk.
pub fn cmd_report(dir: &Path) -> CliResult<()> {
    let (human, csv) = report::aggregate(dir)?;
    std::fs::write(dir.join("report.txt"), &human)?;
    std::fs::write(dir.join("report.csv"), &csv)?;
    print!("{human}");
    Ok(())
}

/// Certify each trace file; malformed files are reported and skipped.
pub fn cmd_certify(traces: &[PathBuf], out: Option<&Path>) -> CliResult<String> {
    if traces.is_empty() {
        return Err(CliError::Usage("no trace files given".into()));
    }
    let mut blocks = String::new();
    let mut processed = 0usize;
    for path in traces {
        match IterationTrace::read_csv(path) {
            Err(e) => {
                eprintln!("{}: {e}", path.display());
            }
            Ok(trace) => {
                let report = certify_trace(&trace);
                blocks.push_str(&format!("trace: {}\n", path.display()));
                blocks.push_str(&format!("status: {}\n", trace.status.as_str()));
                blocks.push_str(&report.to_text_block());
                blocks.push('\n');
                processed += 1;
            }
        }
    }
    if processed == 0 {
        return Err(CliError::Runtime("no trace could be processed".into()));
    }
    blocks.push_str(&format!("processed: {processed}/{} traces\n", traces.len()));
    if let Some(path) = out {
        std::fs::write(path, &blocks)?;
    }
    print!("{blocks}");
    Ok(blocks)
}
