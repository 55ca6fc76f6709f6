use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use proxal::lowrank::MethodName;
use proxal_bench::{
    cmd_certify, cmd_gen, cmd_report, cmd_run, collect_instance_paths, CliError, RunArgs,
    DEFAULT_PRECISIONS,
};

#[derive(Parser)]
#[command(
    name = "proxal-bench",
    about = "Low-rank feasibility benchmark: generate instances, run method suites, certify traces, aggregate reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate deterministic feasibility instances.
    Gen(GenArgs),
    /// Run methods over instances and aggregate a report.
    Run(RunCmdArgs),
    /// Run the descent-certificate suite over trace files.
    Certify(CertifyArgs),
    /// Rebuild report files from an existing run directory.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Seed of the first instance; instance i uses seed + i.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Dimensions N,M,R,D.
    #[arg(long, value_delimiter = ',', num_args = 4, default_value = "100,110,4,450")]
    dims: Vec<usize>,
    /// Number of instances.
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Embed dense operators in the files instead of regenerating from seed.
    #[arg(long)]
    dense: bool,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunCmdArgs {
    /// Instance files or directories containing inst_*.json.
    #[arg(long, required = true, num_args = 1..)]
    instances: Vec<PathBuf>,
    /// Comma-separated method names; defaults to every method (the unsafe
    /// heuristic only when enabled).
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    /// Precision ladder relative to the initial residual.
    #[arg(long, value_delimiter = ',')]
    precisions: Vec<f64>,
    /// Override the per-method inertia where one applies.
    #[arg(long)]
    beta: Option<f64>,
    /// Fraction of the admissible step-size bound.
    #[arg(long, default_value_t = 0.99)]
    alpha_safety: f64,
    /// Allow the theoretically infeasible heuristic configuration.
    #[arg(long)]
    unsafe_heuristic: bool,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CertifyArgs {
    /// Trace CSV files.
    #[arg(required = true, num_args = 1..)]
    traces: Vec<PathBuf>,
    /// Also write the certificate blocks to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Run directory holding run_manifest.json and traces/.
    #[arg(long)]
    dir: PathBuf,
}

fn parse_methods(names: &[String], unsafe_heuristic: bool) -> Result<Vec<MethodName>, CliError> {
    if names.is_empty() {
        let mut all: Vec<MethodName> = MethodName::ALL.to_vec();
        if !unsafe_heuristic {
            all.retain(|m| *m != MethodName::HeurIpianoAltproj);
        }
        return Ok(all);
    }
    names
        .iter()
        .map(|n| n.parse::<MethodName>().map_err(CliError::from))
        .collect()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(args) => {
            let dims = (args.dims[0], args.dims[1], args.dims[2], args.dims[3]);
            cmd_gen(args.seed, dims, args.count, &args.out, args.dense).map(|_| ())
        }
        Command::Run(args) => {
            let methods = parse_methods(&args.methods, args.unsafe_heuristic)?;
            let instances = collect_instance_paths(&args.instances)?;
            let precisions = if args.precisions.is_empty() {
                DEFAULT_PRECISIONS.to_vec()
            } else {
                args.precisions.clone()
            };
            cmd_run(&RunArgs {
                instances,
                methods,
                max_iters: args.max_iters,
                precisions,
                beta: args.beta,
                alpha_safety: args.alpha_safety,
                unsafe_heuristic: args.unsafe_heuristic,
                workers: args.workers,
                out: args.out,
            })
        }
        Command::Certify(args) => cmd_certify(&args.traces, args.out.as_deref()).map(|_| ()),
        Command::Report(args) => cmd_report(&args.dir),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
