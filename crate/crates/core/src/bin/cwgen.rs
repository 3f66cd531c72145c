use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use cwgen::arabic::{normalize, DEFAULT_REVERSAL_MARKERS};
use cwgen::dataset::{compute_stats, load_pairs, preprocess, write_jsonl, PairFormat};
use cwgen::gateway::{CompletionGateway, LiveGateway, RecordingGateway, ReplayGateway};
use cwgen::pipeline::{
    run_path_a, run_path_b, ClassifierKind, PipelineConfig, PromptLang, ValidationReport,
};
use cwgen::render::{render, RenderFormat};
use cwgen::schema::{generate_parallel, CrosswordLayout, GeneratorConfig};
use cwgen::service::{self, AppState, ServiceConfig, Store};

#[derive(Parser)]
#[command(
    name = "cwgen",
    version,
    about = "Arabic educational crossword toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deduplicate a pair file and drop clues with reversal markers.
    Normalize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Answer-length statistics of a pair file, as JSON.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Extract clue-answer pairs from a text file.
    FromText {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "ar")]
        lang: PromptLang,
        #[command(flatten)]
        model: ModelArgs,
        /// Also write rejected pairs.
        #[arg(long)]
        all: bool,
    },
    /// Write clues for the answers in a file (one per line).
    FromKeywords {
        #[arg(long)]
        answers: PathBuf,
        #[arg(long, default_value = "heuristic")]
        classifier: ClassifierKind,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        all: bool,
    },
    /// Lay out the pairs of a file on a grid.
    Layout(LayoutArgs),
    /// Render a layout file.
    Render {
        #[arg(long)]
        layout: PathBuf,
        #[arg(long, default_value = "text")]
        format: RenderFormat,
        #[arg(long)]
        reveal: bool,
        /// Pair file with the clues (needed for json).
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = service::DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value = "cwgen-data")]
        data_dir: PathBuf,
        #[arg(long)]
        cors_origin: Option<String>,
        /// Answer model calls from this transcript instead of the network.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    model: Option<String>,
    /// Replay model calls from this transcript.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Record live model calls into this transcript.
    #[arg(long, conflicts_with = "transcript")]
    record: Option<PathBuf>,
    /// Pairs JSONL destination (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report JSON destination (stderr if absent).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct LayoutArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long)]
    rows: usize,
    #[arg(long)]
    cols: usize,
    #[arg(long, default_value_t = 2)]
    min_answers: usize,
    #[arg(long, default_value_t = 1.0)]
    min_fill: f64,
    #[arg(long, default_value_t = 100)]
    max_rebuilds: u32,
    #[arg(long, default_value_t = 10.0)]
    max_seconds: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// File of preferred answer ids, one per line.
    #[arg(long)]
    preferred: Option<PathBuf>,
    #[arg(long)]
    preferred_weight: Option<f64>,
    #[arg(long)]
    stall_limit: Option<u32>,
    #[arg(long)]
    remove_batch: Option<usize>,
    #[arg(long)]
    removals_per_build: Option<u32>,
    /// Independent searches with seeds seed..seed+jobs-1.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn new(kind: &'static str, err: impl ToString) -> Self {
        CliError {
            kind,
            message: err.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!(
                "{}",
                json!({"error": {"kind": err.kind, "message": err.message}})
            );
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Normalize { input, out } => {
            let (pairs, report) = load_pairs(&input, PairFormat::from_path(&input))
                .map_err(|e| CliError::new("dataset", e))?;
            let before = pairs.len();
            let kept = preprocess(pairs, &DEFAULT_REVERSAL_MARKERS);
            write_output(Some(&out), |w| write_jsonl(w, &kept))?;
            let summary = json!({
                "loaded": report.loaded,
                "skipped_empty": report.skipped_empty,
                "malformed_lines": report.malformed,
                "removed": before - kept.len(),
                "written": kept.len(),
            });
            println!("{summary}");
            Ok(())
        }
        Command::Stats { input } => {
            let (pairs, _) = load_pairs(&input, PairFormat::from_path(&input))
                .map_err(|e| CliError::new("dataset", e))?;
            println!(
                "{}",
                serde_json::to_string(&compute_stats(&pairs)).expect("stats serialize")
            );
            Ok(())
        }
        Command::FromText {
            input,
            lang,
            model,
            all,
        } => {
            let text = fs::read_to_string(&input)
                .map_err(|e| CliError::new("io", format!("{}: {e}", input.display())))?;
            let config = pipeline_config(&model);
            let report = with_gateway(&model, |gw| run_path_a(&text, lang, gw, &config))?;
            emit_report(&model, &report, all)
        }
        Command::FromKeywords {
            answers,
            classifier,
            model,
            all,
        } => {
            let text = fs::read_to_string(&answers)
                .map_err(|e| CliError::new("io", format!("{}: {e}", answers.display())))?;
            let list: Vec<_> = text
                .lines()
                .map(normalize)
                .filter(|a| !a.is_empty())
                .collect();
            let config = pipeline_config(&model);
            let report = with_gateway(&model, |gw| run_path_b(&list, classifier, gw, &config))?;
            emit_report(&model, &report, all)
        }
        Command::Layout(args) => layout(args),
        Command::Render {
            layout,
            format,
            reveal,
            pairs,
            out,
        } => {
            let text = fs::read_to_string(&layout)
                .map_err(|e| CliError::new("io", format!("{}: {e}", layout.display())))?;
            let parsed =
                CrosswordLayout::from_json(&text).map_err(|e| CliError::new("layout", e))?;
            let pairs = match pairs {
                Some(p) => {
                    load_pairs(&p, PairFormat::from_path(&p))
                        .map_err(|e| CliError::new("dataset", e))?
                        .0
                }
                None => Vec::new(),
            };
            let mut body =
                render(&parsed, &pairs, format, reveal).map_err(|e| CliError::new("render", e))?;
            if !body.ends_with('\n') {
                body.push('\n');
            }
            write_output(out.as_deref(), |w| w.write_all(body.as_bytes()))
        }
        Command::Serve {
            port,
            host,
            data_dir,
            cors_origin,
            transcript,
        } => {
            let gateway: Option<Arc<dyn CompletionGateway>> = match transcript {
                Some(path) => Some(Arc::new(
                    ReplayGateway::load(&path).map_err(|e| CliError::new("gateway", e))?,
                )),
                None => {
                    let live = LiveGateway::from_env();
                    live.has_credential()
                        .then(|| Arc::new(live) as Arc<dyn CompletionGateway>)
                }
            };
            let store = Store::open(&data_dir).map_err(|e| CliError::new("io", e))?;
            let config = ServiceConfig {
                port,
                host,
                data_dir,
                cors_origin,
            };
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::new("io", e))?;
            eprintln!("listening on {}:{}", config.host, config.port);
            runtime
                .block_on(service::serve(config, AppState::new(store, gateway)))
                .map_err(|e| CliError::new("io", e))
        }
    }
}

fn layout(args: LayoutArgs) -> CliResult {
    let (pairs, _) = load_pairs(&args.pairs, PairFormat::from_path(&args.pairs))
        .map_err(|e| CliError::new("dataset", e))?;
    let mut config = GeneratorConfig::new(args.rows, args.cols);
    config.min_answers = args.min_answers;
    config.min_fill_ratio = args.min_fill;
    config.max_rebuilds = args.max_rebuilds;
    config.max_duration = args.max_seconds;
    config.seed = args.seed;
    if let Some(w) = args.preferred_weight {
        config.preferred_weight = w;
    }
    if let Some(n) = args.stall_limit {
        config.stall_limit = n;
    }
    if let Some(n) = args.remove_batch {
        config.remove_batch = n;
    }
    if let Some(n) = args.removals_per_build {
        config.removals_per_build = n;
    }
    let preferred: BTreeSet<String> = match &args.preferred {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect(),
        None => BTreeSet::new(),
    };
    if args.jobs == 0 {
        return Err(CliError::new("config", "--jobs must be at least 1"));
    }
    let layout = generate_parallel(&config, &pairs, &preferred, args.jobs)
        .map_err(|e| CliError::new("schema", e))?;
    let text = layout.to_json() + "\n";
    write_output(args.out.as_deref(), |w| w.write_all(text.as_bytes()))
}

fn pipeline_config(model: &ModelArgs) -> PipelineConfig {
    let mut config = PipelineConfig::default();
    if let Some(m) = &model.model {
        config.model = m.clone();
        config.classifier_model = m.clone();
    }
    config
}

fn with_gateway<T, E: ToString>(
    args: &ModelArgs,
    f: impl FnOnce(&dyn CompletionGateway) -> Result<T, E>,
) -> CliResult<T> {
    if let Some(path) = &args.transcript {
        let replay = ReplayGateway::load(path).map_err(|e| CliError::new("gateway", e))?;
        return f(&replay).map_err(|e| CliError::new("pipeline", e));
    }
    let live = LiveGateway::from_env();
    match &args.record {
        Some(path) => {
            let recorder = RecordingGateway::new(live);
            let result = f(&recorder);
            recorder
                .transcript()
                .save(path)
                .map_err(|e| CliError::new("gateway", e))?;
            result.map_err(|e| CliError::new("pipeline", e))
        }
        None => f(&live).map_err(|e| CliError::new("pipeline", e)),
    }
}

fn emit_report(args: &ModelArgs, report: &ValidationReport, all: bool) -> CliResult {
    let mut records = report.records();
    if !all {
        records.truncate(report.passed.len());
    }
    write_output(args.out.as_deref(), |w| {
        for r in &records {
            serde_json::to_writer(&mut *w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    })?;
    let summary = serde_json::to_string(&report.summary()).expect("summary serializes");
    match &args.report {
        Some(path) => fs::write(path, summary + "\n")
            .map_err(|e| CliError::new("io", format!("{}: {e}", path.display()))),
        None => {
            eprintln!("{summary}");
            Ok(())
        }
    }
}

fn write_output(
    path: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> CliResult {
    let result = match path {
        Some(p) => fs::File::create(p).and_then(|file| {
            let mut w = io::BufWriter::new(file);
            f(&mut w)?;
            w.flush()
        }),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).and_then(|_| lock.flush())
        }
    };
    result.map_err(|e| CliError::new("io", e))
}
