//! The `irsa` command line. Exit codes: 0 success, 1 when items failed or a run produced
//! no answer, 2 on usage or configuration errors.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use irsa_core::backend::{Backend, CorruptMock, ObedientMock};
use irsa_core::dataset::{generate_dataset, DatasetParams};
use irsa_core::dsl::{compile_lcs, parse_program, pretty};
use irsa_core::eval::{self, constant_row, ensemble_metrics, guessing_baseline, items_csv, render_report, Metrics};
use irsa_core::model::{BackendKind, Bracket, ProblemInstance, RunConfig, TaskInput, TaskKind};
use irsa_core::prompt::{
    self, append_problem, build_baseline_prompt, build_fragment_prompt_with, build_single_path_prompt,
    default_exemplar, BaselineStyle, PromptSpec,
};
use irsa_core::puzzle::parse_puzzle;
use irsa_core::runtime::{self, check_mode, Mode, Termination};
use irsa_core::trace::{self, TraceStyle};

use crate::http::HttpBackend;
use crate::io::{load_dataset, write_transcript, Format, RunHeader};
use crate::pool::evaluate_parallel;
use crate::store::{verify_store, Recorder, Replay};

#[derive(Debug, Parser)]
#[command(name = "irsa", version, about = "Execution-trace prompting harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded dataset as JSONL.
    GenDataset(GenArgs),
    /// Print a prompt (or its JSON spec).
    BuildPrompt(BuildArgs),
    /// Compile an LCS instance to prep lines and a program, or check a program file.
    Compile(CompileArgs),
    /// Print the canonical execution trace for one input.
    Trace(TraceArgs),
    /// Run one input through a backend.
    Run(RunArgs),
    /// Evaluate prompts over a dataset.
    Eval(EvalArgs),
    /// Measure true/false log-odds after k true premises.
    Logodds(LogoddsArgs),
    /// Check a record/replay store.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendChoice {
    Http,
    Mock,
    Corrupt,
    Replay,
}

#[derive(Debug, Args)]
pub struct BackendArgs {
    #[arg(long, value_enum, default_value = "mock")]
    pub backend: BackendChoice,
    /// Record/replay store. Required for replay; with http, new exchanges are recorded.
    #[arg(long)]
    pub store: Option<PathBuf>,
    /// Model name sent to the http backend.
    #[arg(long)]
    pub model: Option<String>,
    /// Per-block corruption probability for the corrupt backend.
    #[arg(long, default_value_t = 0.2)]
    pub p: f64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RunOpts {
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// JSON run configuration; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub max_tokens: Option<u32>,
    #[arg(long)]
    pub max_calls: Option<u32>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub retain_narration: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Plain,
    Skip,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Plain => Mode::Plain,
            ModeArg::Skip => Mode::Skip,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub task: String,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub alphabet: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// single:STYLE, fragmented:N[:SEED][:unbalanced], interpreter, baseline:STYLE[:K][:code]
    #[arg(long)]
    pub prompt: String,
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print the prompt spec as JSON instead of its text.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    /// Two sequences, `S1,S2`.
    #[arg(long, required_unless_present = "program")]
    pub input: Option<String>,
    /// A program file to parse and pretty-print instead.
    #[arg(long)]
    pub program: Option<PathBuf>,
    /// Print the whole interpreter prompt rather than prep and program.
    #[arg(long)]
    pub prompt: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub task: String,
    #[arg(long)]
    pub style: Option<String>,
    #[arg(long)]
    pub input: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub backend: BackendArgs,
    #[command(flatten)]
    pub opts: RunOpts,
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long)]
    pub prompt: Option<String>,
    #[arg(long)]
    pub input: String,
    /// Transcript JSONL destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub backend: BackendArgs,
    #[command(flatten)]
    pub opts: RunOpts,
    /// Repeat to compare prompts; more than one also adds an ensemble row.
    #[arg(long, required = true)]
    pub prompt: Vec<String>,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value = "native")]
    pub format: Format,
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Output directory for report.txt, items.csv, metrics.json and transcripts.jsonl.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LogoddsArgs {
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long, default_value_t = 15)]
    pub k_max: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    #[arg(long)]
    pub store: PathBuf,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Failed(anyhow::Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

fn config(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Config(e.into())
}

fn failed(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Failed(e.into())
}

type CmdResult = Result<bool, CliError>;

/// Parses `argv` and runs the command, returning the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let (CliError::Config(err) | CliError::Failed(err)) = &e;
            eprintln!("irsa: {err:#}");
            e.code()
        }
    }
}

pub fn execute(cmd: Command) -> CmdResult {
    match cmd {
        Command::GenDataset(a) => gen_dataset(a),
        Command::BuildPrompt(a) => build_prompt(a),
        Command::Compile(a) => compile(a),
        Command::Trace(a) => trace_cmd(a),
        Command::Run(a) => run_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Logodds(a) => logodds(a),
        Command::Replay(a) => replay(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())).map_err(failed)
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(failed)
        }
    }
}

fn parse_task(s: &str) -> Result<TaskKind, CliError> {
    s.parse().map_err(config)
}

fn parse_style(s: &str) -> Result<TraceStyle, CliError> {
    s.parse().map_err(config)
}

/// Reads an instance payload from the command line: `2,3,1,5`, `cbcabb`, `) [ {`, `TA,ATA`,
/// puzzle prose ending in a question, or `@file.json` holding the JSON input.
pub fn parse_input(task: TaskKind, text: &str) -> Result<TaskInput, String> {
    if let Some(path) = text.strip_prefix('@') {
        let body = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        let input: TaskInput = serde_json::from_str(&body).map_err(|e| format!("{path}: {e}"))?;
        if input.task() != task {
            return Err(format!("{path} holds a {} input, not {task}", input.task()));
        }
        return Ok(input);
    }
    let words = |t: &str| -> Vec<String> {
        t.split(|c: char| c == ',' || c.is_whitespace()).filter(|w| !w.is_empty()).map(str::to_string).collect()
    };
    match task {
        TaskKind::BubbleSort => {
            let seq: Result<Vec<i64>, _> = words(text).iter().map(|w| w.parse()).collect();
            seq.map(TaskInput::sequence).map_err(|_| format!("`{text}` is not a list of integers"))
        }
        TaskKind::LongestSubstring => Ok(TaskInput::letters(words(text).concat())),
        TaskKind::ValidParentheses => {
            let spaced: String = text.chars().filter(|c| !c.is_whitespace()).flat_map(|c| [c, ' ']).collect();
            Bracket::parse_list(spaced.trim()).map(TaskInput::brackets).map_err(|c| format!("`{c}` is not a bracket"))
        }
        TaskKind::Lcs => match words(text).as_slice() {
            [a, b] => Ok(TaskInput::pair(a.clone(), b.clone())),
            _ => Err(format!("expected two sequences `S1,S2`, got `{text}`")),
        },
        TaskKind::LogicalDeduction => {
            let t = text.trim();
            let body = t.strip_suffix('?').ok_or("puzzle input must end with its question")?;
            let cut = body.rfind(". ").map(|k| k + 2).ok_or("puzzle input needs prose before the question")?;
            parse_puzzle(t[..cut].trim(), t[cut..].trim()).map(TaskInput::Puzzle).map_err(|e| e.to_string())
        }
    }
}

/// Builds a prompt from its command-line description.
pub fn parse_prompt(desc: &str, task: Option<TaskKind>, seed: u64) -> Result<PromptSpec, String> {
    let parts: Vec<&str> = desc.split(':').collect();
    let err = |e: prompt::PromptError| e.to_string();
    match parts.as_slice() {
        ["file", path @ ..] => {
            let path = path.join(":");
            let body = std::fs::read_to_string(&path).map_err(|e| format!("{path}: {e}"))?;
            serde_json::from_str(&body).map_err(|e| format!("{path}: {e}"))
        }
        ["single", style] | ["single-path", style] => {
            let style: TraceStyle = style.parse().map_err(|e: trace::UnknownStyle| e.to_string())?;
            if let Some(t) = task {
                if t != style.task() {
                    return Err(format!("style {style} traces {} problems, not {t}", style.task()));
                }
            }
            build_single_path_prompt(style.task(), &default_exemplar(style), style).map_err(err)
        }
        ["single"] => {
            let t = task.ok_or("`single` without a style needs --task")?;
            let style = TraceStyle::for_task(t).into_iter().last().ok_or("no style for task")?;
            build_single_path_prompt(t, &default_exemplar(style), style).map_err(err)
        }
        ["fragmented", n, rest @ ..] => {
            let n: usize = n.parse().map_err(|_| format!("bad fragment count `{n}`"))?;
            let mut fseed = seed;
            let mut balanced = true;
            for r in rest {
                match *r {
                    "unbalanced" => balanced = false,
                    s => fseed = s.parse().map_err(|_| format!("bad fragment option `{s}`"))?,
                }
            }
            build_fragment_prompt_with(n, fseed, balanced).map_err(err)
        }
        ["interpreter"] => {
            // the per-instance program is built when the problem is appended
            prompt::lcs_interpreter_prompt("A", "A").map_err(err)
        }
        ["baseline", style, rest @ ..] => {
            let t = task.ok_or("baseline prompts need --task")?;
            let style = match *style {
                "fewshot" | "few-shot" => BaselineStyle::FewShot,
                "ask" => BaselineStyle::AskExecute,
                "ask-steps" => BaselineStyle::AskSteps,
                other => return Err(format!("unknown baseline style `{other}`")),
            };
            let mut k = if style == BaselineStyle::FewShot { 5 } else { 0 };
            let mut code = false;
            for r in rest {
                match *r {
                    "code" => code = true,
                    s => k = s.parse().map_err(|_| format!("bad baseline option `{s}`"))?,
                }
            }
            build_baseline_prompt(t, k, code, style, seed).map_err(err)
        }
        _ => Err(format!("unknown prompt `{desc}`")),
    }
}

fn make_backend(a: &BackendArgs) -> Result<(Box<dyn Backend>, BackendKind), CliError> {
    let seed = a.seed.unwrap_or(0);
    Ok(match a.backend {
        BackendChoice::Mock => (Box::new(ObedientMock), BackendKind::Mock),
        BackendChoice::Corrupt => {
            if !(0.0..=1.0).contains(&a.p) {
                return Err(config(anyhow!("--p must lie in [0, 1], got {}", a.p)));
            }
            (Box::new(CorruptMock::new(a.p, seed)), BackendKind::Corrupt { p: a.p })
        }
        BackendChoice::Replay => {
            let path = a.store.as_ref().ok_or_else(|| config(anyhow!("--backend replay needs --store")))?;
            let replay = Replay::open(path).map_err(config)?;
            (Box::new(replay), BackendKind::Replay { store: path.display().to_string() })
        }
        BackendChoice::Http => {
            let model = a.model.clone().ok_or_else(|| config(anyhow!("--backend http needs --model")))?;
            let http = HttpBackend::from_env(model.clone()).map_err(|e| config(anyhow!(e)))?;
            let kind = BackendKind::Http { model };
            match &a.store {
                Some(path) => (Box::new(Recorder::open(http, path).map_err(config)?), kind),
                None => (Box::new(http), kind),
            }
        }
    })
}

fn run_config(opts: &RunOpts, backend: BackendKind, seed: Option<u64>) -> Result<(RunConfig, Mode), CliError> {
    let mut cfg = match &opts.config {
        Some(path) => {
            let body = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))
                .map_err(config)?;
            serde_json::from_str::<RunConfig>(&body)
                .with_context(|| format!("{}: bad run config", path.display()))
                .map_err(config)?
        }
        None => RunConfig::default(),
    };
    cfg.backend = backend;
    if let Some(v) = opts.max_tokens {
        cfg.max_tokens = v;
    }
    if let Some(v) = opts.max_calls {
        cfg.max_calls = Some(v);
    }
    if let Some(v) = opts.temperature {
        cfg.temperature = v;
    }
    if let Some(v) = seed {
        cfg.seed = v;
    }
    if opts.retain_narration {
        cfg.retain_narration = true;
    }
    cfg.validate().map_err(config)?;
    Ok((cfg, opts.mode.map_or(Mode::Plain, Mode::from)))
}

fn gen_dataset(a: GenArgs) -> CmdResult {
    let params = DatasetParams {
        length: a.length,
        alphabet: a.alphabet,
        ..DatasetParams::new(parse_task(&a.task)?, a.n, a.seed)
    };
    params.validate().map_err(config)?;
    let rows = generate_dataset(&params).map_err(failed)?;
    let mut text = String::new();
    for row in &rows {
        text.push_str(&serde_json::to_string(row).map_err(failed)?);
        text.push('\n');
    }
    emit(a.out.as_deref(), &text)?;
    Ok(true)
}

fn build_prompt(a: BuildArgs) -> CmdResult {
    let task = a.task.as_deref().map(parse_task).transpose()?;
    let spec = parse_prompt(&a.prompt, task, a.seed).map_err(|e| config(anyhow!(e)))?;
    let text = if a.json { serde_json::to_string_pretty(&spec).map_err(failed)? + "\n" } else { spec.text.clone() };
    emit(a.out.as_deref(), &text)?;
    Ok(true)
}

fn compile(a: CompileArgs) -> CmdResult {
    let text = if let Some(path) = &a.program {
        let source =
            std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(config)?;
        let program = parse_program(&source).map_err(config)?;
        pretty(&program)
    } else {
        let input =
            parse_input(TaskKind::Lcs, a.input.as_deref().unwrap_or_default()).map_err(|e| config(anyhow!(e)))?;
        let TaskInput::Pair { s1, s2 } = input else { unreachable!("LCS input") };
        if a.prompt {
            prompt::lcs_interpreter_prompt(&s1, &s2).map_err(config)?.text
        } else {
            let (prep, program) = compile_lcs(&s1, &s2).map_err(config)?;
            format!("Prep:\n{prep}\n\nProgram:\n{program}")
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(true)
}

fn trace_cmd(a: TraceArgs) -> CmdResult {
    let task = parse_task(&a.task)?;
    let style = match &a.style {
        Some(s) => parse_style(s)?,
        None => *TraceStyle::for_task(task).last().expect("every task has a style"),
    };
    if style.task() != task {
        return Err(config(anyhow!("style {style} does not trace {task} problems")));
    }
    let input = parse_input(task, &a.input).map_err(|e| config(anyhow!(e)))?;
    let header = trace::problem_header(&input, style).map_err(config)?;
    let (body, _) = trace::render_trace(&input, style).map_err(config)?;
    emit(a.out.as_deref(), &(header + &body))?;
    Ok(true)
}

fn prompt_for(desc: Option<&str>, task: Option<TaskKind>, seed: u64) -> Result<PromptSpec, CliError> {
    let desc = match (desc, task) {
        (Some(d), _) => d.to_string(),
        (None, Some(_)) => String::from("single"),
        (None, None) => return Err(config(anyhow!("give --prompt or --task"))),
    };
    parse_prompt(&desc, task, seed).map_err(|e| config(anyhow!(e)))
}

fn run_cmd(a: RunArgs) -> CmdResult {
    let (backend, kind) = make_backend(&a.backend)?;
    let (cfg, mode) = run_config(&a.opts, kind, a.backend.seed)?;
    let task = a.task.as_deref().map(parse_task).transpose()?;
    let spec = prompt_for(a.prompt.as_deref(), task, cfg.seed)?;
    check_mode(&spec, mode).map_err(|e| config(anyhow!(e)))?;
    let input = parse_input(spec.task, &a.input).map_err(|e| config(anyhow!(e)))?;
    let instance = ProblemInstance::new("cli", input, None);
    let context = append_problem(&spec, &instance).map_err(config)?;
    let result = runtime::run(backend.as_ref(), &context, &spec, Some(&instance.input), &cfg, mode);
    if let Some(path) = &a.out {
        let mut w = BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display())).map_err(failed)?,
        );
        let hash = eval::prompt_hash(&spec);
        let header = RunHeader { config: &cfg, mode: mode.to_string(), prompt_hash: &hash, instance_id: &instance.id };
        write_transcript(&mut w, &header, &result).map_err(failed)?;
        w.flush().map_err(failed)?;
    }
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(result.full_trace.as_bytes());
    if !result.full_trace.ends_with('\n') {
        let _ = writeln!(stdout);
    }
    match &result.answer {
        Some(ans) => {
            let _ = writeln!(stdout, "answer: {ans}");
        }
        None => {
            let detail = result.detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default();
            eprintln!("irsa: no answer ({:?} after {} calls){detail}", result.termination, result.calls_used);
        }
    }
    Ok(result.termination == Termination::AnswerFound)
}

fn eval_cmd(a: EvalArgs) -> CmdResult {
    let (backend, kind) = make_backend(&a.backend)?;
    let (cfg, mode) = run_config(&a.opts, kind, a.backend.seed)?;
    let task = a.task.as_deref().map(parse_task).transpose()?;
    let (dataset, report) = load_dataset(&a.dataset, a.format, task).map_err(config)?;
    for e in &report.errors {
        eprintln!("irsa: row {} skipped: {}", e.index, e.message);
    }
    if dataset.is_empty() {
        return Err(config(anyhow!("{} has no usable rows", a.dataset.display())));
    }
    let task = task.or_else(|| dataset.first().map(|r| r.task));
    let specs: Vec<PromptSpec> =
        a.prompt.iter().map(|p| prompt_for(Some(p), task, cfg.seed)).collect::<Result<_, _>>()?;
    for spec in &specs {
        check_mode(spec, mode).map_err(|e| config(anyhow!(e)))?;
        if let Some(row) = dataset.iter().find(|r| r.task != spec.task) {
            return Err(config(anyhow!("prompt is for {} problems but row `{}` is {}", spec.task, row.id, row.task)));
        }
    }
    let mut rows: Vec<Metrics> = Vec::new();
    let mut transcripts = Vec::new();
    for spec in &specs {
        let (m, runs) = evaluate_parallel(backend.as_ref(), spec, &dataset, &cfg, mode, a.jobs).map_err(config)?;
        transcripts.push((eval::prompt_hash(spec), runs));
        rows.push(m);
    }
    let mut table = rows.clone();
    if rows.len() > 1 {
        table.push(ensemble_metrics(format!("ensemble of {}", rows.len()), &rows));
    }
    if let Ok(g) = guessing_baseline(&dataset) {
        table.push(constant_row("guessing", dataset.len(), g));
    }
    let text = render_report(&table);
    print!("{text}");
    if let Some(dir) = &a.out {
        write_eval_outputs(dir, &text, &table, &cfg, mode, &dataset, &transcripts, &report).map_err(failed)?;
    }
    Ok(rows.iter().all(|m| m.n_correct == m.n))
}

#[allow(clippy::too_many_arguments)]
fn write_eval_outputs(
    dir: &Path,
    text: &str,
    table: &[Metrics],
    cfg: &RunConfig,
    mode: Mode,
    dataset: &[ProblemInstance],
    transcripts: &[(String, Vec<Option<runtime::RunResult>>)],
    report: &crate::io::LoadReport,
) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    std::fs::write(dir.join("report.txt"), text)?;
    std::fs::write(dir.join("items.csv"), items_csv(table))?;
    std::fs::write(dir.join("metrics.json"), serde_json::to_string_pretty(table)? + "\n")?;
    std::fs::write(dir.join("load_report.json"), serde_json::to_string_pretty(report)? + "\n")?;
    let mut w = BufWriter::new(File::create(dir.join("transcripts.jsonl"))?);
    for (hash, runs) in transcripts {
        for (item, run) in dataset.iter().zip(runs) {
            if let Some(run) = run {
                let header =
                    RunHeader { config: cfg, mode: mode.to_string(), prompt_hash: hash, instance_id: &item.id };
                write_transcript(&mut w, &header, run)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn logodds(a: LogoddsArgs) -> CmdResult {
    let (backend, _) = make_backend(&a.backend)?;
    let rows =
        eval::logodds_experiment(backend.as_ref(), a.k_max, a.trials, a.backend.seed.unwrap_or(0)).map_err(failed)?;
    let report: BTreeMap<usize, serde_json::Value> =
        rows.iter().map(|r| (r.k, serde_json::json!({"min": r.min, "mean": r.mean, "max": r.max}))).collect();
    emit(a.out.as_deref(), &(serde_json::to_string_pretty(&report).map_err(failed)? + "\n"))?;
    Ok(true)
}

fn replay(a: ReplayArgs) -> CmdResult {
    let n = verify_store(&a.store).map_err(config)?;
    println!("{}: {n} entries, hashes verified", a.store.display());
    Ok(true)
}
