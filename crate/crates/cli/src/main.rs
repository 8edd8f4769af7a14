use std::f64::consts::FRAC_PI_2;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anisotest_core::geometry::Window;
use anisotest_core::io::{read_pattern_csv, write_pattern_csv, write_pattern_file};
use anisotest_core::processes::ModelSpec;
use anisotest_core::replication::{FitFamily, ReplicationConfig, Replicator, SrConfig, TilingConfig};
use anisotest_core::rng::RngStream;
use anisotest_core::study::{
    ambrosia_configs, ambrosia_window, emit_outputs, run_study, summarize, OutputFormat, RunOptions, StudyConfig,
};
use anisotest_core::testing::{
    replicate_seed, run_isotropy_test, Dss, FunctionalSpec, PValueOrientation, Recentering, StatKind, TestConfig,
    DEFAULT_KAPPA, DEFAULT_THETA,
};
use anisotest_core::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "anisotest", version, about = "Isotropy tests for planar point patterns")]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true, env = "ANISOTEST_THREADS")]
    threads: Option<usize>,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a pattern from a model and write it as CSV.
    Simulate(SimulateArgs),
    /// Test a pattern for isotropy and write the result as JSON.
    Test(TestArgs),
    /// Write replicate patterns of an observed pattern as CSV files.
    Replicate(ReplicateArgs),
    /// Run a simulation study and write the rejection-rate table.
    Study(StudyArgs),
    /// Aggregate per-test JSON documents into a rejection-rate table.
    Summarize(SummarizeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelName {
    Poisson,
    Lgcp,
    Gibbs,
    Plcp,
    Thomas,
    Strauss,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Model with default parameters.
    #[arg(long, value_enum, default_value = "lgcp")]
    model: ModelName,
    /// Model JSON file; overrides --model.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Anisotropy level in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Preferred direction in radians.
    #[arg(long, default_value_t = DEFAULT_THETA)]
    theta: f64,
    /// Window as xmin,xmax,ymin,ymax.
    #[arg(long, default_value = "-0.5,0.5,-0.5,0.5")]
    window: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DssName {
    Gloc,
    Kcyl,
    Theta,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StatName {
    Ms,
    MsRangeStd,
    MsDirStd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodName {
    Tiling,
    Sr,
    Mc,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FitName {
    Thomas,
    Lgcp,
    Strauss,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TestPreset {
    Ambrosia,
}

#[derive(Args, Debug)]
struct PatternArgs {
    /// Pattern CSV with an x,y header.
    #[arg(long)]
    pattern: PathBuf,
    /// Window as xmin,xmax,ymin,ymax.
    #[arg(long)]
    window: Option<String>,
}

#[derive(Args, Debug)]
struct MethodArgs {
    #[arg(long, value_enum, default_value = "tiling")]
    method: MethodName,
    /// Tiles per side for tiling.
    #[arg(long, default_value_t = 3)]
    n_tiles: usize,
    /// Number of replicates.
    #[arg(long, default_value_t = 199)]
    n_rep: usize,
    /// Annealing iterations for stochastic reconstruction.
    #[arg(long, default_value_t = 5000)]
    sr_iters: usize,
    /// Family fitted for parametric Monte Carlo.
    #[arg(long, value_enum, default_value = "thomas")]
    fit: FitName,
    /// Known isotropic null model (JSON file) for parametric Monte Carlo.
    #[arg(long)]
    null_model: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug)]
struct TestArgs {
    #[command(flatten)]
    input: PatternArgs,
    #[command(flatten)]
    method: MethodArgs,
    /// Full test configuration as JSON; replaces the flags below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "kcyl")]
    dss: DssName,
    /// Statistic; the summary's default when absent.
    #[arg(long, value_enum)]
    stat: Option<StatName>,
    #[arg(long, default_value_t = DEFAULT_THETA)]
    alpha1: f64,
    /// Second direction; alpha1 + pi/2 when absent.
    #[arg(long)]
    alpha2: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Angular bandwidth of the direction spectrum in degrees.
    #[arg(long)]
    bandwidth_deg: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_KAPPA)]
    kappa: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha_level: f64,
    #[arg(long, value_enum, default_value = "standard")]
    pvalue_orientation: OrientationName,
    #[arg(long, value_enum, default_value = "plugin")]
    recentering: RecenteringName,
    /// Predefined test battery; ignores the test flags except --n-rep,
    /// --alpha-level and --seed.
    #[arg(long, value_enum)]
    preset: Option<TestPreset>,
    /// Output JSON; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrientationName {
    Standard,
    AsPrinted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RecenteringName {
    Plugin,
    Loo,
}

#[derive(Args, Debug)]
struct ReplicateArgs {
    #[command(flatten)]
    input: PatternArgs,
    #[command(flatten)]
    method: MethodArgs,
    /// Output directory for replicate_NNNN.csv files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StudyPreset {
    Desk,
    Paper,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatName {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct StudyArgs {
    /// Study configuration JSON.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<StudyPreset>,
    /// Master seed; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_patterns: Option<usize>,
    /// Replicates per test; also caps the reconstruction replicate count.
    #[arg(long)]
    n_rep: Option<usize>,
    #[arg(long)]
    alpha_level: Option<f64>,
    #[arg(long, value_enum)]
    pvalue_orientation: Option<OrientationName>,
    #[arg(long, value_enum)]
    recentering: Option<RecenteringName>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatName,
    /// Directory for per-test JSON documents.
    #[arg(long)]
    details: Option<PathBuf>,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SummarizeArgs {
    /// JSON documents or directories containing them.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatName,
    #[arg(long, default_value = "summary.csv")]
    out: PathBuf,
}

fn parse_window(text: &str) -> Result<Window> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidArgument(format!("window '{text}': {e}")))?;
    match v.as_slice() {
        [x0, x1, y0, y1] => Window::new(*x0, *x1, *y0, *y1),
        _ => Err(Error::InvalidArgument(format!(
            "window '{text}': expected xmin,xmax,ymin,ymax"
        ))),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(File::open(path)?)?)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn model_from(args: &SimulateArgs) -> Result<ModelSpec> {
    let model = match &args.config {
        Some(path) => read_json(path)?,
        None => match args.model {
            ModelName::Poisson => ModelSpec::Poisson { lambda: 400.0 },
            ModelName::Lgcp => ModelSpec::paper_lgcp(args.a),
            ModelName::Gibbs => ModelSpec::paper_gibbs(args.a),
            ModelName::Plcp => ModelSpec::paper_plcp(args.a),
            ModelName::Thomas => ModelSpec::Thomas {
                kappa_parent: 25.0,
                mu_off: 16.0,
                sigma_off: 0.02,
            },
            ModelName::Strauss => ModelSpec::Strauss {
                beta: 400.0,
                gamma: 0.5,
                rd: 0.05,
            },
        }
        .with_direction(args.theta),
    };
    model.validate()?;
    Ok(model)
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let model = model_from(args)?;
    let window = parse_window(&args.window)?;
    let pat = model.simulate(&window, &mut RngStream::from_seed(args.seed))?;
    log::info!("simulated {} points from {}", pat.len(), model.name());
    write_pattern_csv(&pat, output(args.out.as_deref())?)
}

fn replication_from(m: &MethodArgs) -> Result<ReplicationConfig> {
    Ok(match m.method {
        MethodName::Tiling => ReplicationConfig::Tiling(TilingConfig { k: m.n_tiles }),
        MethodName::Sr => ReplicationConfig::StochasticReconstruction(SrConfig::new(m.sr_iters)),
        MethodName::Mc => match &m.null_model {
            Some(path) => ReplicationConfig::ParametricMc { model: read_json(path)? },
            None => ReplicationConfig::FittedMc {
                family: match m.fit {
                    FitName::Thomas => FitFamily::Thomas,
                    FitName::Lgcp => FitFamily::Lgcp,
                    FitName::Strauss => FitFamily::Strauss,
                },
            },
        },
    })
}

fn orientation(o: OrientationName) -> PValueOrientation {
    match o {
        OrientationName::Standard => PValueOrientation::Standard,
        OrientationName::AsPrinted => PValueOrientation::AsPrinted,
    }
}

fn recentering(r: RecenteringName) -> Recentering {
    match r {
        RecenteringName::Plugin => Recentering::Plugin,
        RecenteringName::Loo => Recentering::Loo,
    }
}

fn test_config(args: &TestArgs) -> Result<TestConfig> {
    if let Some(path) = &args.config {
        return read_json(path);
    }
    let dss = match args.dss {
        DssName::Gloc => Dss::Gloc {
            eps: args.eps.unwrap_or(match Dss::gloc() {
                Dss::Gloc { eps } => eps,
                _ => unreachable!(),
            }),
        },
        DssName::Kcyl => Dss::Kcyl {
            zeta: args.zeta.unwrap_or(0.15),
        },
        DssName::Theta => match Dss::theta() {
            Dss::Theta { h, p_max } => Dss::Theta {
                h: args.bandwidth_deg.map_or(h, f64::to_radians),
                p_max,
            },
            _ => unreachable!(),
        },
    };
    let statistic = match args.stat {
        Some(StatName::Ms) => StatKind::Ms,
        Some(StatName::MsRangeStd) => StatKind::MsRangeStd,
        Some(StatName::MsDirStd) => StatKind::MsDirStd,
        None => dss.default_stat(),
    };
    Ok(TestConfig {
        functional: FunctionalSpec {
            dss,
            alpha1: args.alpha1,
            alpha2: args.alpha2.unwrap_or(args.alpha1 + FRAC_PI_2),
            r_max: args.r_max,
            kappa: args.kappa,
        },
        statistic,
        replication: replication_from(&args.method)?,
        n_replicates: args.method.n_rep,
        alpha_level: args.alpha_level,
        recentering: recentering(args.recentering),
        pvalue_orientation: orientation(args.pvalue_orientation),
    })
}

fn test(args: &TestArgs) -> Result<()> {
    let out = output(args.out.as_deref())?;
    if let Some(TestPreset::Ambrosia) = args.preset {
        let window = args.input.window.as_deref().map_or(Ok(ambrosia_window()), parse_window)?;
        let pat = read_pattern_csv(&args.input.pattern, window)?;
        let results = ambrosia_configs(args.method.n_rep, args.alpha_level)
            .iter()
            .map(|cfg| run_isotropy_test(&pat, cfg, args.method.seed))
            .collect::<Result<Vec<_>>>()?;
        for r in &results {
            log::info!("{}: p = {}", r.replication, r.p_value);
        }
        serde_json::to_writer_pretty(out, &results)?;
        return Ok(());
    }
    let window = parse_window(args.input.window.as_deref().unwrap_or("-0.5,0.5,-0.5,0.5"))?;
    let pat = read_pattern_csv(&args.input.pattern, window)?;
    let cfg = test_config(args)?;
    let result = run_isotropy_test(&pat, &cfg, args.method.seed)?;
    log::info!("T0 = {}, p = {}, reject = {}", result.t0, result.p_value, result.reject);
    serde_json::to_writer_pretty(out, &result)?;
    Ok(())
}

fn replicate(args: &ReplicateArgs) -> Result<()> {
    let window = parse_window(args.input.window.as_deref().unwrap_or("-0.5,0.5,-0.5,0.5"))?;
    let pat = read_pattern_csv(&args.input.pattern, window)?;
    let replicator = Replicator::prepare(&replication_from(&args.method)?, &pat)?;
    fs::create_dir_all(&args.out)?;
    for i in 0..args.method.n_rep {
        let mut rng = RngStream::from_seed(replicate_seed(args.method.seed, i));
        let rep = replicator.replicate(&mut rng).map_err(|e| Error::Replicate {
            index: i,
            source: Box::new(e),
        })?;
        write_pattern_file(&rep, &args.out.join(format!("replicate_{i:04}.csv")))?;
    }
    if let Some(fit) = replicator.fit() {
        serde_json::to_writer_pretty(File::create(args.out.join("fit.json"))?, fit)?;
    }
    Ok(())
}

fn format(f: FormatName) -> OutputFormat {
    match f {
        FormatName::Csv => OutputFormat::Csv,
        FormatName::Json => OutputFormat::Json,
    }
}

fn study(args: &StudyArgs, threads: Option<usize>) -> Result<()> {
    let mut cfg: StudyConfig = match (&args.config, args.preset) {
        (Some(path), _) => read_json(path)?,
        (None, Some(StudyPreset::Paper)) => StudyConfig::paper(),
        (None, _) => StudyConfig::desk(),
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(n) = args.n_patterns {
        cfg.n_patterns = n;
    }
    if let Some(n) = args.n_rep {
        cfg.n_replicates = n;
        cfg.n_replicates_sr = cfg.n_replicates_sr.min(n);
    }
    if let Some(a) = args.alpha_level {
        cfg.alpha_level = a;
    }
    if let Some(o) = args.pvalue_orientation {
        cfg.pvalue_orientation = orientation(o);
    }
    if let Some(r) = args.recentering {
        cfg.recentering = recentering(r);
    }
    let opts = RunOptions {
        threads,
        detail_dir: args.details.clone(),
    };
    let results = run_study(&cfg, &opts)?;
    emit_outputs(&results, format(args.format), &args.out)?;
    log::info!("wrote {} rows to {}", results.len(), args.out.display());
    Ok(())
}

fn summarize_cmd(args: &SummarizeArgs) -> Result<()> {
    let mut files = Vec::new();
    for input in &args.inputs {
        if input.is_dir() {
            for entry in fs::read_dir(input)? {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "json") {
                    files.push(path);
                }
            }
        } else {
            files.push(input.clone());
        }
    }
    files.sort();
    let results = summarize(&files)?;
    emit_outputs(&results, format(args.format), &args.out)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Test(a) => test(a),
        Command::Replicate(a) => replicate(a),
        Command::Study(a) => study(a, cli.threads),
        Command::Summarize(a) => summarize_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
