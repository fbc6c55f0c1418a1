use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tv_gmks::experiments::config::{Example, ExperimentConfig};
use tv_gmks::experiments::report::{summary_csv, write_summary, SUMMARY_HEADER};
use tv_gmks::experiments::runner::{run_experiment, table_configs, table_title, ReportBundle};

#[derive(Parser)]
#[command(name = "tv-gmks", version, about = "TV/L1 and TV/L2 image restoration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration.
    Run(RunArgs),
    /// Sweep the rows of a reference table (1 to 4).
    Table {
        table: usize,
        /// Directory for restored images and traces.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Solve the separable Phillips integral equation.
    Phillips(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// key = value file; flags given here take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the summary row to this CSV file.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    example: Option<String>,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args, Default)]
struct Flags {
    /// tvl1 or tvl2
    #[arg(long)]
    mode: Option<String>,
    /// iso or aniso
    #[arg(long)]
    tv: Option<String>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// salt-pepper or gaussian-white
    #[arg(long)]
    noise_kind: Option<String>,
    #[arg(long)]
    noise_level: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    band: Option<usize>,
    /// Ground-truth image (PGM or PPM).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Restored image (PGM or PPM).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-iteration CSV trace.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Add the cross-channel blur (RGB examples).
    #[arg(long)]
    cross: bool,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let mut push = |k, val: Option<String>| {
            if let Some(val) = val {
                v.push((k, val));
            }
        };
        push("mode", self.mode.clone());
        push("tv", self.tv.clone());
        push("mu", self.mu.map(|x| x.to_string()));
        push("beta", self.beta.map(|x| x.to_string()));
        push("rho", self.rho.map(|x| x.to_string()));
        push("eps", self.eps.map(|x| x.to_string()));
        push("seed", self.seed.map(|x| x.to_string()));
        push("noise-kind", self.noise_kind.clone());
        push("noise-level", self.noise_level.map(|x| x.to_string()));
        push("sigma", self.sigma.map(|x| x.to_string()));
        push("band", self.band.map(|x| x.to_string()));
        push("in", self.input.as_ref().map(|p| p.display().to_string()));
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        push("trace", self.trace.as_ref().map(|p| p.display().to_string()));
        push("size", self.size.map(|x| x.to_string()));
        push("max-iter", self.max_iter.map(|x| x.to_string()));
        if self.cross {
            push("cross", Some("true".into()));
        }
        v
    }

    fn apply(&self, config: &mut ExperimentConfig) -> tv_gmks::Result<()> {
        config.apply_pairs(&self.pairs())
    }
}

fn build_config(args: &RunArgs, default: Example) -> tv_gmks::Result<ExperimentConfig> {
    let mut pairs: Vec<(String, String)> = match &args.config {
        Some(path) => ExperimentConfig::parse_pairs(&std::fs::read_to_string(path)?)?,
        None => Vec::new(),
    };
    if let Some(e) = &args.example {
        pairs.push(("example".into(), e.clone()));
    }
    pairs.extend(args.flags.pairs().into_iter().map(|(k, v)| (k.to_string(), v)));
    let mut config = ExperimentConfig::preset(default);
    config.apply_pairs(&pairs)?;
    Ok(config)
}

fn describe(b: &ReportBundle) {
    eprintln!(
        "{}: {} iterations, {} = {:.4e}, wall {:.2} s, seed {}",
        b.summary.experiment, b.summary.iters, b.summary.metric_name, b.summary.metric_value, b.wall_s, b.config.noise.seed
    );
    if let Some(c) = b.snr_clamped {
        eprintln!("clamped snr = {c:.4}");
    }
    for p in &b.written {
        eprintln!("wrote {}", p.display());
    }
}

fn run_one(args: &RunArgs, default: Example) -> tv_gmks::Result<()> {
    let config = build_config(args, default)?;
    if default == Example::Phillips && config.example != Example::Phillips {
        return Err(tv_gmks::Error::Config(format!("phillips cannot run {}", config.example)));
    }
    let bundle = run_experiment(&config)?;
    print!("{}", summary_csv(std::slice::from_ref(&bundle.summary)));
    describe(&bundle);
    if let Some(path) = &args.summary {
        write_summary(path, std::slice::from_ref(&bundle.summary))?;
    }
    Ok(())
}

fn run_table(table: usize, out_dir: Option<&PathBuf>, summary: Option<&PathBuf>, flags: &Flags) -> tv_gmks::Result<()> {
    let entries = table_configs(table)?;
    eprintln!("table {table}: {}", table_title(table).unwrap_or(""));
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
    }
    println!("{SUMMARY_HEADER},ref_iters,ref_metric");
    let mut rows = Vec::new();
    for (i, entry) in entries.into_iter().enumerate() {
        let mut config = entry.config;
        flags.apply(&mut config)?;
        if let Some(dir) = out_dir {
            let ext = if matches!(config.example, Example::Rgb | Example::CrossChannel) { "ppm" } else { "pgm" };
            let stem = format!("table{table}_row{i}_{}", config.solver.tv);
            config.output = Some(dir.join(format!("{stem}.{ext}")));
            config.trace = Some(dir.join(format!("{stem}.csv")));
        }
        let bundle = run_experiment(&config)?;
        println!(
            "{},{},{}",
            bundle.summary.to_csv(),
            entry.reference.iterations,
            entry.reference.metric
        );
        describe(&bundle);
        rows.push(bundle.summary);
    }
    if let Some(path) = summary {
        write_summary(path, &rows)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run_one(args, Example::Grayscale),
        Command::Phillips(args) => run_one(args, Example::Phillips),
        Command::Table {
            table,
            out_dir,
            summary,
            flags,
        } => run_table(*table, out_dir.as_ref(), summary.as_ref(), flags),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
