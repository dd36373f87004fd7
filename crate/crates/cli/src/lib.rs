//! Argument handling for the `vsat` binary.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use vsat_core::eval::{make_synthetic_corpus, FaultSpec};
use vsat_core::pipeline::{cmd_check, cmd_eval, cmd_fix, DetectFlags, EvalRequest, PipelineError, RunConfig, RunReport};
use vsat_core::review::DecisionLog;
use vsat_core::IssueKind;
use vsat_service::{CreateProject, Store};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FATAL: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vsat", version, about = "Detect, review and fix subtitle quality issues")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the detectors and write report.json.
    Check(CheckArgs),
    /// Apply suggestions from a report and write the corrected subtitles.
    Fix(FixArgs),
    /// Score a hypothesis subtitle file against a reference.
    Eval(EvalArgs),
    /// Start the review service.
    Serve(ServeArgs),
    /// Write a synthetic evaluation corpus.
    Corpus(CorpusArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML config file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub subs: Option<PathBuf>,
    #[arg(long)]
    pub video: Option<PathBuf>,
    /// Pre-extracted per-cue assets instead of running a media tool.
    #[arg(long)]
    pub assets: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated issue kinds to run, or `all` / `none`.
    #[arg(long)]
    pub detect: Option<String>,
    /// Prompt-hash table answering LLM calls offline.
    #[arg(long)]
    pub mock_llm: Option<PathBuf>,
    #[arg(long)]
    pub parallelism: Option<usize>,
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig, PipelineError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.subs {
            c.subs = v.clone();
        }
        if let Some(v) = &self.video {
            c.video = Some(v.clone());
        }
        if let Some(v) = &self.assets {
            c.assets = Some(v.clone());
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        if let Some(v) = &self.detect {
            c.detect = DetectFlags::from_list(v)?;
        }
        if let Some(v) = &self.mock_llm {
            c.backend.mock_table = Some(v.clone());
        }
        if let Some(v) = self.parallelism {
            c.parallelism = v;
        }
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct FixArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Report from `check`; defaults to report.json in the output directory.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Decision log; only accepted and edited suggestions are applied.
    #[arg(long)]
    pub decisions: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long = "ref")]
    pub reference: PathBuf,
    #[arg(long)]
    pub hyp: PathBuf,
    /// Report whose language suggestions are applied stage by stage.
    #[arg(long)]
    pub stages: Option<PathBuf>,
    /// Ground-truth labels; F1 is computed against --report (or --stages).
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub cpl: usize,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    /// Directory holding one JSON state file per project.
    #[arg(long, default_value = "vsat-state")]
    pub state: PathBuf,
    /// Preload a project from these subtitles and report.
    #[arg(long, requires = "report")]
    pub subs: Option<PathBuf>,
    #[arg(long, requires = "subs")]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub assets: Option<PathBuf>,
    #[arg(long)]
    pub video: Option<String>,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Faults per kind as `kind=count` pairs; defaults to one of each.
    #[arg(long, value_delimiter = ',')]
    pub faults: Vec<String>,
}

fn fatal(e: impl std::fmt::Display) -> i32 {
    eprintln!("vsat: {e}");
    EXIT_FATAL
}

fn print_json(value: &impl serde::Serialize) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value).expect("serializable output");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Check(a) => check(&a),
        Command::Fix(a) => fix(&a),
        Command::Eval(a) => eval(&a),
        Command::Serve(a) => serve(&a),
        Command::Corpus(a) => corpus(&a),
    }
}

fn check(a: &CheckArgs) -> i32 {
    let config = match a.run.resolve() {
        Ok(c) => c,
        Err(e) => return fatal(e),
    };
    match cmd_check(&config) {
        Ok(out) => {
            let r = &out.report;
            eprintln!(
                "{} issues, {} skips; report written to {}",
                r.issues.len(),
                r.skips.len(),
                out.report_path.display()
            );
            out.exit_code()
        }
        Err(e) => fatal(e),
    }
}

fn fix(a: &FixArgs) -> i32 {
    let result = (|| {
        let config = a.run.resolve()?;
        let report_path = a.report.clone().unwrap_or_else(|| config.out.join(vsat_core::pipeline::REPORT_FILE));
        let report = RunReport::load(&report_path)?;
        let log = a.decisions.as_deref().map(DecisionLog::load).transpose()?;
        let artifacts = cmd_fix(&config, &report, log.as_ref())?;
        Ok::<_, PipelineError>((config, artifacts))
    })();
    match result {
        Ok((config, artifacts)) => {
            for c in &artifacts.summary.conflicts {
                eprintln!("vsat: cue {}: {}", c.cue_id, c.reason);
            }
            eprintln!(
                "{} cues written to {}",
                artifacts.summary.output_cues,
                config.out.join(&artifacts.subtitle_name).display()
            );
            EXIT_OK
        }
        Err(e) => fatal(e),
    }
}

fn eval(a: &EvalArgs) -> i32 {
    let req = EvalRequest {
        reference: a.reference.clone(),
        hypothesis: a.hyp.clone(),
        stages: a.stages.clone(),
        labels: a.labels.clone(),
        report: a.report.clone(),
        max_cpl: a.cpl,
    };
    match cmd_eval(&req) {
        Ok(v) => {
            print_json(&v);
            EXIT_OK
        }
        Err(e) => fatal(e),
    }
}

fn preload(store: &Store, a: &ServeArgs) -> Result<Option<String>, String> {
    let (Some(subs), Some(report)) = (&a.subs, &a.report) else {
        return Ok(None);
    };
    let format = vsat_core::SubtitleFormat::from_path(subs).map_err(|e| e.to_string())?;
    let subtitles = std::fs::read_to_string(subs).map_err(|e| format!("{}: {e}", subs.display()))?;
    let report = RunReport::load(report).map_err(|e| e.to_string())?;
    let req = CreateProject {
        video: a.video.clone(),
        name: subs.file_stem().and_then(|s| s.to_str()).map(str::to_string),
        format,
        subtitles,
        report,
        assets: a.assets.clone(),
    };
    let (summary, _) = vsat_service::create(store, req).map_err(|e| e.to_string())?;
    Ok(Some(summary.project_id))
}

fn serve(a: &ServeArgs) -> i32 {
    let store = match Store::open(&a.state) {
        Ok(s) => Arc::new(s),
        Err(e) => return fatal(e),
    };
    match preload(&store, a) {
        Ok(Some(id)) => eprintln!("project {id} loaded"),
        Ok(None) => {}
        Err(e) => return fatal(e),
    }
    let runtime = match tokio::runtime::Runtime::new() {
        Ok(r) => r,
        Err(e) => return fatal(e),
    };
    runtime.block_on(async {
        let listener = match tokio::net::TcpListener::bind((a.host.as_str(), a.port)).await {
            Ok(l) => l,
            Err(e) => return fatal(format!("cannot listen on {}:{}: {e}", a.host, a.port)),
        };
        if let Ok(addr) = listener.local_addr() {
            eprintln!("listening on http://{addr}");
        }
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        match vsat_service::serve(listener, store, shutdown).await {
            Ok(()) => EXIT_OK,
            Err(e) => fatal(e),
        }
    })
}

fn parse_faults(items: &[String]) -> Result<FaultSpec, String> {
    if items.is_empty() {
        return Ok(FaultSpec::one_each());
    }
    let mut counts = BTreeMap::new();
    for item in items {
        let (kind, n) = item.split_once('=').ok_or_else(|| format!("expected kind=count, got {item:?}"))?;
        let kind: IssueKind = kind.trim().parse()?;
        let n: usize = n.trim().parse().map_err(|e| format!("{item:?}: {e}"))?;
        counts.insert(kind, n);
    }
    Ok(FaultSpec(counts))
}

fn corpus(a: &CorpusArgs) -> i32 {
    let spec = match parse_faults(&a.faults) {
        Ok(s) => s,
        Err(e) => return fatal(e),
    };
    match make_synthetic_corpus(a.seed, &spec).and_then(|c| c.write(&a.out)) {
        Ok(paths) => {
            print_json(&paths);
            EXIT_OK
        }
        Err(e) => fatal(e),
    }
}
