//! `imbal`: run experiment campaigns and theorem validators from the shell.
//!
//! Exit codes: 0 success, 1 a theorem report did not pass, 2 usage error,
//! 3 runtime error (a JSON error record is printed on stderr).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use imbalance_evt::datagen::parse_beta;
use imbalance_evt::experiments::{
    read_rows_csv, run, write_rows_csv, BudgetEntry, CampaignEntry, Classifier, ExperimentConfig,
    Outcome, ResultRow,
};
use imbalance_evt::{Dataset, Error, Family};
use num_rational::Ratio;
use serde_json::json;

const SEED_ENV: &str = "IMB_SEED";

#[derive(Parser, Debug)]
#[command(name = "imbal", version, about = "Subsampling vs ERM under class imbalance: simulations and theorem checks")]
struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a campaign described by a JSON config file.
    Simulate {
        #[command(flatten)]
        common: Overrides,
    },
    /// Validate one theorem's high-probability event by Monte Carlo.
    Validate {
        #[arg(id = "theorem_family", value_name = "FAMILY")]
        family: Family,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[command(flatten)]
        common: Overrides,
    },
    /// Run a figure preset.
    Reproduce {
        target: Target,
        #[command(flatten)]
        common: Overrides,
    },
    /// Print summary statistics of a results or dataset CSV.
    Inspect { csv: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Fig1,
    Fig3,
    Fig4,
}

/// Flags shared by the running subcommands; each overrides the config value.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// JSON config; required by `simulate`, merged over the preset otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Falls back to $IMB_SEED, then the config value.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Comma-separated families.
    #[arg(long, value_delimiter = ',')]
    family: Option<Vec<Family>>,
    #[arg(long, value_delimiter = ',', value_enum)]
    classifier: Option<Vec<ClassifierArg>>,
    #[arg(long, value_delimiter = ',')]
    dim: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<f64>>,
    #[arg(long)]
    n: Option<usize>,
    /// Decimal or fraction, e.g. 0.05 or 1/20.
    #[arg(long, value_parser = parse_beta_arg)]
    beta: Option<Ratio<u64>>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    test_points: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassifierArg {
    HardSvm,
    SoftSvm,
    Logistic,
}

impl From<ClassifierArg> for Classifier {
    fn from(c: ClassifierArg) -> Self {
        match c {
            ClassifierArg::HardSvm => Classifier::HardSvm,
            ClassifierArg::SoftSvm => Classifier::SoftSvm,
            ClassifierArg::Logistic => Classifier::Logistic,
        }
    }
}

fn parse_beta_arg(s: &str) -> Result<Ratio<u64>, String> {
    parse_beta(s).map_err(|e| e.to_string())
}

/// Failure of one invocation.
enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match dispatch(cli.command) {
        Ok(passed) => ExitCode::from(if passed { 0 } else { 1 }),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{}", usage());
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("{}", json!({ "error": error_kind(&e), "message": e.to_string() }));
            ExitCode::from(3)
        }
    }
}

fn usage() -> String {
    use clap::CommandFactory;
    Cli::command().render_usage().to_string()
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidArgument(_) => "invalid_argument",
        Error::NotSeparable => "not_separable",
        Error::IterationLimit { .. } => "iteration_limit",
        Error::NonFinite(_) => "non_finite",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::Unsupported(_) => "unsupported",
        Error::RootBracket(_) => "root_bracket",
        Error::Budget(_) => "budget",
        Error::Parse(_) => "parse",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

fn dispatch(cmd: Command) -> Result<bool, Failure> {
    match cmd {
        Command::Simulate { common } => {
            let Some(path) = &common.config else {
                return Err(Failure::Usage("simulate requires --config <FILE>".into()));
            };
            let base = read_config(path)?;
            execute(apply(base, &common), &common.out)
        }
        Command::Validate { family, epsilon, delta, gamma, common } => {
            let mut config = with_preset_file(ExperimentConfig::theorem_preset(), &common)?;
            let mut entry = default_budget(family, &config);
            if let Some(v) = epsilon {
                entry.epsilon = v;
            }
            if let Some(v) = delta {
                entry.delta = v;
            }
            if let Some(v) = gamma {
                entry.gamma = v;
            }
            if let Some(v) = common.beta {
                entry.beta = v;
            }
            if let Some(v) = common.n {
                entry.n = v as u64;
            }
            if let Some(v) = common.alpha {
                entry.alpha = v;
            }
            config = apply(config, &common);
            config.budgets = vec![entry];
            execute(config, &common.out)
        }
        Command::Reproduce { target, common } => {
            let preset = match target {
                Target::Fig1 => ExperimentConfig::fig1_preset(),
                Target::Fig3 => ExperimentConfig::fig3_preset(),
                Target::Fig4 => ExperimentConfig::fig4_preset(),
            };
            let config = apply(with_preset_file(preset, &common)?, &common);
            execute(config, &common.out)
        }
        Command::Inspect { csv } => {
            inspect(&csv)?;
            Ok(true)
        }
    }
}

/// Budget for `family` from the preset suite, or the uniform setting
/// (n = 1e5, beta = 0.1).
fn default_budget(family: Family, config: &ExperimentConfig) -> BudgetEntry {
    config
        .budgets
        .iter()
        .find(|b| b.family == family)
        .cloned()
        .unwrap_or(BudgetEntry {
            family,
            epsilon: 0.1,
            delta: 0.1,
            gamma: 0.1,
            beta: Ratio::new(1, 10),
            n: 100_000,
            alpha: 1.0,
        })
}

fn read_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = fs::read_to_string(path)?;
    let config: ExperimentConfig = serde_json::from_str(&text).map_err(Error::from)?;
    Ok(config)
}

fn with_preset_file(preset: ExperimentConfig, o: &Overrides) -> Result<ExperimentConfig, Failure> {
    let Some(path) = &o.config else {
        return Ok(preset);
    };
    // merge the file's keys over the preset
    let mut base = serde_json::to_value(&preset).map_err(Error::from)?;
    let text = fs::read_to_string(path)?;
    let patch: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
    let serde_json::Value::Object(patch) = patch else {
        return Err(Failure::Runtime(Error::Parse("config must be a JSON object".into())));
    };
    for (k, v) in patch {
        base[k] = v;
    }
    let merged: ExperimentConfig = serde_json::from_value(base).map_err(Error::from)?;
    if merged.kind != preset.kind {
        return Err(Failure::Usage(format!(
            "config kind {} does not match this subcommand",
            merged.kind.name()
        )));
    }
    Ok(merged)
}

fn env_seed() -> Option<u64> {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok())
}

fn apply(mut c: ExperimentConfig, o: &Overrides) -> ExperimentConfig {
    if let Some(s) = o.seed.or_else(env_seed) {
        c.seed = s;
    }
    if let Some(v) = &o.family {
        c.families = v.clone();
    }
    if let Some(v) = &o.classifier {
        c.classifiers = v.iter().map(|&x| x.into()).collect();
    }
    if let Some(v) = &o.dim {
        c.dims = v.clone();
    }
    if let Some(v) = &o.mu {
        c.mus = v.clone();
    }
    if let Some(v) = o.n {
        c.n = v;
    }
    if let Some(v) = o.beta {
        c.beta = v;
    }
    if let Some(v) = o.trials {
        c.trials = v;
    }
    if let Some(v) = o.test_points {
        c.test_points = v;
    }
    if let Some(v) = o.alpha {
        c.alpha = v;
    }
    if let Some(v) = &o.n_grid {
        c.n_grid = v.clone();
    }
    c
}

fn execute(config: ExperimentConfig, out: &Path) -> Result<bool, Failure> {
    config.validate()?;
    fs::create_dir_all(out)?;
    let config_json = serde_json::to_string_pretty(&config).map_err(Error::from)?;
    write_atomic(&out.join("config.json"), config_json.as_bytes())?;

    let outcome = run(&config)?;
    let rows = outcome.rows();
    let mut csv = Vec::new();
    write_rows_csv(&rows, &mut csv)?;
    write_atomic(&out.join("results.csv"), &csv)?;
    let sidecar = json!({
        "kind": config.kind.name(),
        "seed": config.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
    });
    write_atomic(&out.join("results.json"), serde_json::to_string_pretty(&sidecar).map_err(Error::from)?.as_bytes())?;
    if let Outcome::Campaign(entries) = &outcome {
        let reports = serde_json::to_string_pretty(entries).map_err(Error::from)?;
        write_atomic(&out.join("reports.json"), reports.as_bytes())?;
        print_campaign(entries);
    } else {
        print_rows(&rows);
    }
    println!("wrote {}", out.display());
    Ok(outcome.passed())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn print_rows(rows: &[ResultRow]) {
    println!(
        "{:<10} {:<9} {:>4} {:>8} {:>7} {:<8} {:>12} {:>11} {:>6} {:>5}",
        "family", "clf", "dim", "mu", "n", "stat", "mean", "stderr", "ok", "fail"
    );
    for r in rows {
        println!(
            "{:<10} {:<9} {:>4} {:>8.4} {:>7} {:<8} {:>12.5e} {:>11.3e} {:>6} {:>5}",
            r.family, r.classifier, r.dim, r.mu, r.n, r.stat, r.mean, r.stderr(), r.trials, r.failures
        );
    }
}

fn print_campaign(entries: &[CampaignEntry]) {
    for e in entries {
        let b = &e.budget;
        let head = format!(
            "{} eps={} delta={} gamma={} beta={} n={}",
            b.family, b.epsilon, b.delta, b.gamma, b.beta, b.n
        );
        match (&e.report, &e.error) {
            (Some(r), _) => {
                let status = if r.passed { "PASS" } else { "FAIL" };
                match r.ks_statistic {
                    Some(ks) => println!("{status} {head}: ks={ks:.4} threshold={}", r.ks_threshold.unwrap_or(f64::NAN)),
                    None => println!(
                        "{status} {head}: freq={:.4} floor={:.4} wilson_lower={:.4} non_separable={} wce erm/sub={:.3e}/{:.3e}",
                        r.empirical_freq, r.prob_floor, r.wilson_lower, r.non_separable_count, r.mean_wce_erm, r.mean_wce_sub
                    ),
                }
            }
            (None, err) => println!("ERROR {head}: {}", err.as_deref().unwrap_or("unknown")),
        }
    }
}

fn inspect(path: &Path) -> Result<(), Failure> {
    let bytes = fs::read(path)?;
    let header = bytes.split(|&c| c == b'\n').next().unwrap_or_default();
    if header.starts_with(b"kind,") {
        let rows = read_rows_csv(bytes.as_slice())?;
        println!("{} rows", rows.len());
        print_rows(&rows);
        return Ok(());
    }
    let data = Dataset::read_csv(bytes.as_slice())?;
    println!(
        "dataset: {} points, dim {}, {} positive, {} negative",
        data.len(),
        data.dim(),
        data.n_major(),
        data.n_minor()
    );
    if let Some(beta) = data.beta() {
        println!("beta = {beta}");
    }
    for k in 0..data.dim() {
        let col: Vec<f64> = data.rows().map(|(x, _)| x[k]).collect();
        println!(
            "x{k}: mean {:.6} std {:.6}",
            imbalance_evt::stats::mean(&col),
            imbalance_evt::stats::std_dev(&col)
        );
    }
    Ok(())
}
