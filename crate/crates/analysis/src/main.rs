//! `steakhouse` command-line front end: run searches, evaluate prompt
//! lists, and analyze persisted runs.
//!
//! Exit codes: 0 success, 1 usage error, 2 backend failure, 3 data error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use steakhouse_analysis::*;
use steakhouse_harness::{EpisodeLog, Personality, PromptList, Provenance};
use steakhouse_measures::MeasureId;
use steakhouse_qd::{
    evaluate, run_planqd, run_random_mutation, BackendSpec, RunConfig, RunError,
};

#[derive(Parser)]
#[command(
    name = "steakhouse",
    about = "Quality-diversity search over agent personality prompts in a two-agent kitchen"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// TOML run configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Layout name (open, ring, hallway, forced) or layout file path.
    #[arg(long)]
    layout: Option<String>,
    /// Enable inter-agent messages.
    #[arg(long, conflicts_with = "no_comm")]
    comm: bool,
    /// Disable inter-agent messages.
    #[arg(long)]
    no_comm: bool,
    /// OpenAI-compatible endpoint base URL for both backends (or set
    /// STEAKHOUSE_BACKEND_URL); model from STEAKHOUSE_MODEL, key from
    /// STEAKHOUSE_API_KEY.
    #[arg(long)]
    backend_url: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the directed quality-diversity search.
    RunPlanqd {
        #[command(flatten)]
        config: ConfigArgs,
        /// Run directory for archive, records, logs, and checkpoints.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run the random-mutation baseline.
    RunRandom {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Evaluate a single prompt list over repeated episodes.
    Evaluate {
        #[command(flatten)]
        config: ConfigArgs,
        /// File with agent 1's personality (defaults to the initial prompt).
        #[arg(long)]
        prompt_a: Option<PathBuf>,
        /// File with agent 2's personality (defaults to the initial prompt).
        #[arg(long)]
        prompt_b: Option<PathBuf>,
        /// Optional directory for episode logs.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Coverage, QD-score, trend, and proportion-test reports.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCommand,
    },
    /// Export a per-cell max-fitness grid for a measure pair.
    Heatmap {
        /// Run directory (or external CSV) to read points from.
        #[arg(long)]
        run: PathBuf,
        /// Measure pair, e.g. diff_meat_placed_on_grill,diff_dishes_served
        #[arg(long)]
        pair: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render an episode log as ASCII frames plus the message transcript.
    Replay {
        #[arg(long)]
        log: PathBuf,
        /// Print only every k-th frame.
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
    /// Parse and validate a layout file.
    ValidateLayout {
        #[arg(long)]
        layout: String,
    },
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Coverage for one measure pair, or the full 66-pair report.
    Coverage {
        #[arg(long, required = true)]
        run: Vec<PathBuf>,
        /// Measure pair; omit for the full pairwise report.
        #[arg(long)]
        pair: Option<String>,
        /// Write the full pairwise report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// QD-score for one measure pair, or the full 66-pair report.
    Qdscore {
        #[arg(long, required = true)]
        run: Vec<PathBuf>,
        #[arg(long)]
        pair: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Percentage difference in teamwork measures between two runs
    /// (A = with communication, B = without, by convention).
    Trends {
        #[arg(long)]
        run_a: PathBuf,
        #[arg(long)]
        run_b: PathBuf,
    },
    /// One-sample test of proportions.
    Proptest {
        #[arg(long)]
        successes: u64,
        #[arg(long)]
        trials: u64,
        #[arg(long, default_value_t = 0.5)]
        p0: f64,
        /// Exact binomial tail instead of the normal approximation.
        #[arg(long)]
        exact: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Backend(String),
    Data(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Backend(m) => write!(f, "backend failure: {}", m),
            CliError::Data(m) => write!(f, "{}", m),
        }
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> CliError {
        match e {
            RunError::Backend(m) => CliError::Backend(m),
            other => CliError::Data(other.to_string()),
        }
    }
}

macro_rules! data_err {
    ($ty:ty) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> CliError {
                CliError::Data(e.to_string())
            }
        }
    };
}
data_err!(steakhouse_qd::ConfigError);
data_err!(PointsError);
data_err!(HeatmapError);
data_err!(ReplayError);
data_err!(StatsError);
data_err!(std::io::Error);
data_err!(steakhouse_harness::LogError);
data_err!(steakhouse_sim::LayoutError);

fn build_config(args: &ConfigArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_toml_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(layout) = &args.layout {
        cfg.layout = layout.clone();
    }
    if args.comm {
        cfg.comm_enabled = true;
    }
    if args.no_comm {
        cfg.comm_enabled = false;
    }
    let url = args
        .backend_url
        .clone()
        .or_else(|| std::env::var("STEAKHOUSE_BACKEND_URL").ok());
    if let Some(base_url) = url {
        let model = std::env::var("STEAKHOUSE_MODEL")
            .unwrap_or_else(|_| "meta-llama/Llama-3.1-70B-Instruct".to_string());
        let spec = BackendSpec::Http {
            base_url,
            model,
            api_key_env: Some("STEAKHOUSE_API_KEY".to_string()),
        };
        cfg.agent_backend = spec.clone();
        cfg.mutator_backend = spec;
    }
    Ok(cfg)
}

fn parse_pair(pair: &str) -> Result<ProjectionConfig, CliError> {
    let (a, b) = pair
        .split_once(',')
        .ok_or_else(|| CliError::Data(format!("--pair must be two comma-separated measures, got {:?}", pair)))?;
    let parse = |k: &str| {
        MeasureId::from_key(k.trim())
            .ok_or_else(|| CliError::Data(format!("unknown measure {:?}", k.trim())))
    };
    let (x, y) = (parse(a)?, parse(b)?);
    if x == y {
        return Err(CliError::Data("projection measures must be distinct".into()));
    }
    Ok(ProjectionConfig::new(x, y))
}

fn load_points(path: &Path) -> Result<PointSet, CliError> {
    if path.extension().is_some_and(|e| e == "csv") {
        Ok(PointSet::from_csv(path)?)
    } else {
        Ok(PointSet::from_run_dir(path)?)
    }
}

fn pairwise(points: &PointSet, run: &Path, score: bool, csv: &Option<PathBuf>) -> Result<(), CliError> {
    let report = pairwise_coverage_report(points, &MeasureId::QD_DEFAULT);
    println!("run {} ({} points, 66 measure pairs)", run.display(), points.len());
    for group in [PairGroup::Qd, PairGroup::NonQd, PairGroup::Mixed] {
        let n = report.rows_in(group).count();
        if score {
            println!(
                "  {:?} pairs ({:>2}): mean qd-score {:.3}",
                group,
                n,
                report.mean_qd_score(group)
            );
        } else {
            println!(
                "  {:?} pairs ({:>2}): mean coverage {:.3}",
                group,
                n,
                report.mean_coverage(group)
            );
        }
    }
    if let Some(out) = csv {
        std::fs::write(out, report.to_csv())?;
        println!("  full table written to {}", out.display());
    }
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::RunPlanqd { config, out_dir } => {
            let cfg = build_config(&config)?;
            let archive = run_planqd(&cfg, &out_dir)?;
            println!(
                "done: {} evaluations, {} filled cells (coverage {:.3}), qd-score {:.1}",
                cfg.budget(),
                archive.len(),
                archive.coverage(),
                archive.qd_score()
            );
            println!("archive: {}", out_dir.join("archive.json").display());
        }
        Command::RunRandom { config, out_dir } => {
            let cfg = build_config(&config)?;
            let archive = run_random_mutation(&cfg, &out_dir)?;
            println!(
                "done: {} evaluations, {} filled cells (coverage {:.3}), qd-score {:.1}",
                cfg.budget(),
                archive.len(),
                archive.coverage(),
                archive.qd_score()
            );
            println!("archive: {}", out_dir.join("archive.json").display());
        }
        Command::Evaluate { config, prompt_a, prompt_b, out_dir } => {
            let cfg = build_config(&config)?;
            let layout = cfg.load_layout()?;
            let initial = cfg.initial_prompt()?;
            let read = |p: &Option<PathBuf>| -> Result<String, CliError> {
                match p {
                    Some(path) => Ok(std::fs::read_to_string(path)?.trim().to_string()),
                    None => Ok(initial.clone()),
                }
            };
            let prompts = PromptList([
                Personality::new(read(&prompt_a)?, Provenance::Initial),
                Personality::new(read(&prompt_b)?, Provenance::Initial),
            ]);
            let backend = cfg.agent_backend.build_agent();
            let eval_seed = steakhouse_sim::seed::derive_seed(cfg.master_seed, &[99]);
            let result = evaluate(&layout, &prompts, backend.as_ref(), &cfg, eval_seed)
                .map_err(CliError::Backend)?;
            println!(
                "{}",
                serde_json::json!({
                    "objective": result.objective,
                    "measures": result.measures,
                    "per_repeat": result.per_repeat,
                })
            );
            if let Some(dir) = out_dir {
                for (i, log) in result.logs.iter().enumerate() {
                    let path = dir.join(format!("episode_rep{}.jsonl", i));
                    log.write_file(&path)?;
                    println!("log: {}", path.display());
                }
            }
        }
        Command::Analyze { what } => match what {
            AnalyzeCommand::Coverage { run, pair, csv } => {
                for dir in &run {
                    let points = load_points(dir)?;
                    match &pair {
                        Some(p) => {
                            let proj = parse_pair(p)?;
                            println!(
                                "{}: coverage({}) = {:.4}",
                                dir.display(),
                                p,
                                coverage(&points, &proj)
                            );
                        }
                        None => pairwise(&points, dir, false, &csv)?,
                    }
                }
            }
            AnalyzeCommand::Qdscore { run, pair, csv } => {
                for dir in &run {
                    let points = load_points(dir)?;
                    match &pair {
                        Some(p) => {
                            let proj = parse_pair(p)?;
                            println!(
                                "{}: qd-score({}) = {:.3}",
                                dir.display(),
                                p,
                                qd_score(&points, &proj)
                            );
                        }
                        None => pairwise(&points, dir, true, &csv)?,
                    }
                }
            }
            AnalyzeCommand::Trends { run_a, run_b } => {
                let a = load_points(&run_a)?;
                let b = load_points(&run_b)?;
                println!(
                    "{:<22} {:>12} {:>12} {:>12}",
                    "metric", "mean A", "mean B", "diff"
                );
                print!("{}", trend_table_to_text(&trend_table(&a, &b)));
            }
            AnalyzeCommand::Proptest { successes, trials, p0, exact } => {
                let p = if exact {
                    proportion_test_exact(successes, trials, p0)?
                } else {
                    proportion_test(successes, trials, p0)?
                };
                println!(
                    "{} of {} vs p0={} -> p = {:.6}{}",
                    successes,
                    trials,
                    p0,
                    p,
                    if exact { " (exact binomial)" } else { " (normal approximation)" }
                );
            }
        },
        Command::Heatmap { run, pair, out } => {
            let points = load_points(&run)?;
            let proj = parse_pair(&pair)?;
            export_heatmap(&points, &proj, &out)?;
            println!("heatmap written to {} (+ sidecar)", out.display());
        }
        Command::Replay { log, every } => {
            let log = EpisodeLog::read_file(&log)?;
            let frames = replay_frames(&log)?;
            let every = every.max(1);
            for (i, frame) in frames.iter().enumerate() {
                if i % every == 0 || i + 1 == frames.len() {
                    println!("{}", frame);
                }
            }
            let messages = transcript(&log);
            if !messages.is_empty() {
                println!("--- transcript ---");
                for (t, agent, text) in messages {
                    println!("[t={} agent {}] {}", t, agent + 1, text);
                }
            }
        }
        Command::ValidateLayout { layout } => {
            let text = std::fs::read_to_string(&layout)?;
            let name = Path::new(&layout)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("layout");
            let parsed = steakhouse_sim::layout::parse_layout(&text, name)?;
            println!(
                "ok: {} ({}x{}), spawns at {} and {}",
                parsed.name, parsed.width, parsed.height, parsed.spawns[0], parsed.spawns[1]
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems (including --help/--version) exit with 1 per
            // the documented exit-code contract, except help/version which
            // are successes.
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                CliError::Backend(_) => ExitCode::from(2),
                CliError::Data(_) => ExitCode::from(3),
            }
        }
    }
}
