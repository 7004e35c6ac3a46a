use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cyclefind::harness::{
    emit_report, ingest_csv, run_missing_data_study, run_noise_study, sea_level_standin, CsvOptions,
    Fetcher, Format, HarnessConfig, Output,
};
use cyclefind::prelude::*;
use cyclefind::search::{annotate_significance, bootstrap_ci, scan_with_workers};
use cyclefind::Error;

/// Period estimation for unevenly sampled time series.
#[derive(Debug, Parser)]
#[command(name = "cyclefind", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Trial periods as pmin:pmax:step.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Method name; repeat or comma-separate for several.
    #[arg(long, global = true, value_delimiter = ',')]
    method: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// csv or json.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Key-value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// time,value CSV file.
    input: PathBuf,
    /// Parse the file as a PSMSL monthly record (`;`-separated, -99999 missing).
    #[arg(long)]
    psmsl: bool,
    /// Remove a least-squares linear trend before the search.
    #[arg(long)]
    detrend: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Base series; a synthetic stand-in is generated when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    psmsl: bool,
    #[arg(long)]
    detrend: bool,
    #[arg(long)]
    replicates: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Best period for one method.
    Estimate {
        #[command(flatten)]
        input: InputArgs,
        /// Noise variance for the Lomb-Scargle significance level
        /// (default: variance of the data).
        #[arg(long)]
        noise_variance: Option<f64>,
    },
    /// Objective value at every trial period.
    Scan {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Estimate with a bootstrap percentile interval.
    Bootstrap {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Missing-data study over subsampling proportions.
    BenchMissing {
        #[command(flatten)]
        bench: BenchArgs,
        #[arg(long, value_delimiter = ',')]
        proportions: Vec<f64>,
    },
    /// Noise study over added-noise sd multiples.
    BenchNoise {
        #[command(flatten)]
        bench: BenchArgs,
        #[arg(long, value_delimiter = ',')]
        noise_multiples: Vec<f64>,
    },
    /// Download a dataset into the cache and print its path.
    Fetch {
        id: String,
        #[arg(long)]
        url_template: Option<String>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
}

struct Context {
    cfg: HarnessConfig,
    format: Format,
    output: Option<PathBuf>,
}

impl Context {
    fn new(global: &Global) -> cyclefind::Result<Self> {
        let mut cfg = match &global.config {
            Some(path) => HarnessConfig::load(path)?,
            None => HarnessConfig::default(),
        };
        if let Some(grid) = &global.grid {
            cfg.grid = grid.clone();
        }
        if !global.method.is_empty() {
            cfg.methods = global
                .method
                .iter()
                .map(|m| m.parse())
                .collect::<cyclefind::Result<_>>()?;
        }
        if let Some(seed) = global.seed {
            cfg.seed = seed;
        }
        if let Some(workers) = global.workers {
            cfg.workers = workers;
        }
        Ok(Self {
            cfg,
            format: global.format.parse()?,
            output: global.output.clone(),
        })
    }

    fn single_method(&self) -> cyclefind::Result<Method> {
        match self.cfg.methods.as_slice() {
            [m] => Ok(*m),
            _ => Err(Error::InvalidArgument(
                "choose exactly one --method for this command".into(),
            )),
        }
    }

    fn load(&self, path: &Path, psmsl: bool, detrend: bool) -> cyclefind::Result<TimeSeries> {
        let opts = if psmsl {
            CsvOptions::psmsl()
        } else {
            CsvOptions::default()
        };
        let series = ingest_csv(path, &opts)?;
        if detrend || self.cfg.detrend {
            series.detrend_linear()
        } else {
            Ok(series)
        }
    }

    fn bench_base(&self, bench: &BenchArgs) -> cyclefind::Result<TimeSeries> {
        match &bench.input {
            Some(path) => self.load(path, bench.psmsl, bench.detrend),
            None => sea_level_standin(self.cfg.amplitude, self.cfg.baseline_sd, self.cfg.seed),
        }
    }

    fn write(&self, out: Output<'_>) -> cyclefind::Result<()> {
        let bytes = emit_report(out, self.format)?;
        match &self.output {
            Some(path) => std::fs::write(path, bytes)?,
            None => std::io::stdout().write_all(&bytes)?,
        }
        Ok(())
    }
}

fn run(cli: Cli) -> cyclefind::Result<()> {
    let mut ctx = Context::new(&cli.global)?;
    match cli.command {
        Command::Estimate {
            input,
            noise_variance,
        } => {
            let method = ctx.single_method()?;
            let series = ctx.load(&input.input, input.psmsl, input.detrend)?;
            let grid = ctx.cfg.period_grid()?;
            let curve = scan_with_workers(&series, &grid, method, &ctx.cfg.method_config()?, ctx.cfg.workers)?;
            if curve.statistic.iter().all(Option::is_none) {
                return Err(Error::DegenerateInput(format!(
                    "{method} is undefined at every trial period"
                )));
            }
            let mut est = select_estimate(&curve)?;
            if method == Method::LombScargle {
                let variance = noise_variance.unwrap_or_else(|| series.variance());
                if noise_variance.is_none() && variance <= 0.0 {
                    return Err(Error::DegenerateInput("series has zero variance".into()));
                }
                est = annotate_significance(&est, &curve, ctx.cfg.significance_alpha, variance)?;
            }
            ctx.write(Output::Estimate(&est))
        }
        Command::Scan { input } => {
            let method = ctx.single_method()?;
            let series = ctx.load(&input.input, input.psmsl, input.detrend)?;
            let curve = scan_with_workers(
                &series,
                &ctx.cfg.period_grid()?,
                method,
                &ctx.cfg.method_config()?,
                ctx.cfg.workers,
            )?;
            ctx.write(Output::Curve(&curve))
        }
        Command::Bootstrap {
            input,
            replicates,
            alpha,
        } => {
            let method = ctx.single_method()?;
            if let Some(b) = replicates {
                ctx.cfg.bootstrap_replicates = b;
            }
            if let Some(a) = alpha {
                ctx.cfg.alpha = a;
            }
            let series = ctx.load(&input.input, input.psmsl, input.detrend)?;
            let est = bootstrap_ci(
                &series,
                &ctx.cfg.period_grid()?,
                method,
                &ctx.cfg.method_config()?,
                &ctx.cfg.bootstrap_config(),
                ctx.cfg.workers,
            )?;
            ctx.write(Output::Estimate(&est))
        }
        Command::BenchMissing { bench, proportions } => {
            if !proportions.is_empty() {
                ctx.cfg.proportions = proportions;
            }
            if let Some(r) = bench.replicates {
                ctx.cfg.replicates = r;
            }
            let base = ctx.bench_base(&bench)?;
            let report = run_missing_data_study(&base, &ctx.cfg.study_config()?, ctx.cfg.workers)?;
            ctx.write(Output::Report(&report))
        }
        Command::BenchNoise {
            bench,
            noise_multiples,
        } => {
            if !noise_multiples.is_empty() {
                ctx.cfg.noise_multiples = noise_multiples;
            }
            if let Some(r) = bench.replicates {
                ctx.cfg.replicates = r;
            }
            let base = ctx.bench_base(&bench)?;
            let report = run_noise_study(&base, &ctx.cfg.study_config()?, ctx.cfg.workers)?;
            ctx.write(Output::Report(&report))
        }
        Command::Fetch {
            id,
            url_template,
            cache_dir,
        } => {
            let template = url_template
                .or_else(|| ctx.cfg.url_template.clone())
                .ok_or_else(|| Error::InvalidArgument("no url template given".into()))?;
            let dir = cache_dir.unwrap_or_else(cyclefind::harness::fetch::default_cache_dir);
            let path = Fetcher::new(template, dir).fetch(&id)?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
