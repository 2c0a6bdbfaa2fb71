//! Scoring runs against oracles, the guessing and ensemble baselines, the pattern
//! interference experiment, and report rendering.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::backend::{Backend, BackendError, CompletionRequest};
use crate::dataset::oracle_answer;
use crate::model::{answers_equal, AnswerValue, ProblemInstance, RunConfig};
use crate::prompt::{append_problem, AnswerPattern, PromptSpec};
use crate::runtime::{self, check_mode, Mode, RunResult, Termination};
use crate::trace;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("{0}")]
    Mode(String),
    #[error(transparent)]
    Backend(#[from] BackendError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemRecord {
    pub id: String,
    pub predicted: Option<AnswerValue>,
    pub target: Option<AnswerValue>,
    pub correct: bool,
    pub termination: Termination,
    pub calls_used: u32,
    /// Share of state blocks matching the oracle trace, for trace prompts.
    pub fidelity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub method: String,
    pub n: usize,
    pub n_correct: usize,
    /// `n_correct / n`, or 0 for an empty dataset (see `empty`).
    pub accuracy: f64,
    pub empty: bool,
    pub items: Vec<ItemRecord>,
    pub fingerprint: String,
}

impl Metrics {
    /// Builds metrics from per-item records, which are kept in the given order.
    pub fn from_items(method: impl Into<String>, items: Vec<ItemRecord>, fingerprint: String) -> Metrics {
        let n = items.len();
        let n_correct = items.iter().filter(|r| r.correct).count();
        let accuracy = if n == 0 { 0.0 } else { n_correct as f64 / n as f64 };
        Metrics { method: method.into(), n, n_correct, accuracy, empty: n == 0, items, fingerprint }
    }
}

/// Hex digest identifying the prompt, run configuration and mode.
pub fn fingerprint(spec: &PromptSpec, cfg: &RunConfig, mode: Mode) -> String {
    let mut h = Sha256::new();
    h.update(spec.text.as_bytes());
    h.update(spec.suffix.as_bytes());
    h.update(format!("{:?}|{:?}|{mode}", spec.kind, cfg).as_bytes());
    hex::encode(h.finalize())
}

pub fn prompt_hash(spec: &PromptSpec) -> String {
    hex::encode(Sha256::digest(spec.text.as_bytes()))
}

/// Runs one instance and scores it. Failures of any kind become an incorrect record.
pub fn evaluate_item<B: Backend + ?Sized>(
    backend: &B,
    spec: &PromptSpec,
    item: &ProblemInstance,
    cfg: &RunConfig,
    mode: Mode,
) -> (ItemRecord, Option<RunResult>) {
    let target = item.target.clone().or_else(|| oracle_answer(&item.input).ok());
    let mut record = ItemRecord {
        id: item.id.clone(),
        predicted: None,
        target: target.clone(),
        correct: false,
        termination: Termination::MalformedGeneration,
        calls_used: 0,
        fidelity: None,
        detail: None,
    };
    let context = match append_problem(spec, item) {
        Ok(c) => c,
        Err(e) => {
            record.detail = Some(e.to_string());
            return (record, None);
        }
    };
    let result = runtime::run(backend, &context, spec, Some(&item.input), cfg, mode);
    record.predicted = result.answer.clone();
    record.termination = result.termination;
    record.calls_used = result.calls_used;
    record.detail = result.detail.clone();
    record.correct = match (&record.predicted, &target) {
        (Some(p), Some(t)) => answers_equal(p, t),
        _ => false,
    };
    if let AnswerPattern::Trace(style) = spec.answer_pattern {
        record.fidelity = trace::verify_trace(&result.full_trace, &item.input, style).ok().map(|r| r.fidelity());
    }
    (record, Some(result))
}

/// Serial evaluation over a dataset, in dataset order.
pub fn evaluate_run<B: Backend + ?Sized>(
    backend: &B,
    spec: &PromptSpec,
    dataset: &[ProblemInstance],
    cfg: &RunConfig,
    mode: Mode,
) -> Result<Metrics, EvalError> {
    check_mode(spec, mode).map_err(EvalError::Mode)?;
    let items = dataset.iter().map(|it| evaluate_item(backend, spec, it, cfg, mode).0).collect();
    Ok(Metrics::from_items(method_label(spec, mode), items, fingerprint(spec, cfg, mode)))
}

/// Short description of a prompt for report rows.
pub fn method_label(spec: &PromptSpec, mode: Mode) -> String {
    use crate::prompt::PromptKind::*;
    let base = match (&spec.kind, spec.style) {
        (SinglePath, Some(style)) => format!("irsa-{style}"),
        (Fragmented { n_fragments, seed, .. }, _) => format!("fragmented-{n_fragments}-s{seed}"),
        (Interpreter, _) => String::from("interpreter"),
        (Baseline { style, k_shots, include_code, .. }, _) => {
            format!("baseline-{}-{k_shots}shot{}", style.as_str(), if *include_code { "-code" } else { "" })
        }
        (SinglePath, None) => String::from("single-path"),
    };
    format!("{base} ({mode})")
}

/// Share of the dataset whose target equals its most frequent target.
pub fn guessing_baseline(dataset: &[ProblemInstance]) -> Result<f64, EvalError> {
    if dataset.is_empty() {
        return Err(EvalError::EmptyDataset);
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for item in dataset {
        let target = item.target.clone().or_else(|| oracle_answer(&item.input).ok());
        let key = target.map_or_else(|| String::from("?"), |t| format!("{:?}", t.canonical()));
        *counts.entry(key).or_default() += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    Ok(best as f64 / dataset.len() as f64)
}

/// Plurality vote over the answers that are present; ties go to the lowest index.
pub fn ensemble_vote(answers: &[Option<AnswerValue>]) -> Option<AnswerValue> {
    let present: Vec<(usize, &AnswerValue)> =
        answers.iter().enumerate().filter_map(|(k, a)| a.as_ref().map(|a| (k, a))).collect();
    let mut best: Option<(usize, usize)> = None; // (votes, first index)
    for &(k, a) in &present {
        let votes = present.iter().filter(|(_, b)| answers_equal(a, b)).count();
        let first = present.iter().find(|(_, b)| answers_equal(a, b)).map_or(k, |(j, _)| *j);
        if best.is_none_or(|(v, f)| votes > v || (votes == v && first < f)) {
            best = Some((votes, first));
        }
    }
    best.and_then(|(_, k)| answers[k].clone())
}

/// Item-wise ensemble of several runs over the same dataset.
pub fn ensemble_metrics(method: impl Into<String>, runs: &[Metrics]) -> Metrics {
    let Some(first) = runs.first() else {
        return Metrics::from_items(method, Vec::new(), String::new());
    };
    let items = first
        .items
        .iter()
        .enumerate()
        .map(|(k, base)| {
            let answers: Vec<Option<AnswerValue>> =
                runs.iter().map(|m| m.items.get(k).and_then(|r| r.predicted.clone())).collect();
            let predicted = ensemble_vote(&answers);
            let correct = match (&predicted, &base.target) {
                (Some(p), Some(t)) => answers_equal(p, t),
                _ => false,
            };
            let termination = if predicted.is_some() { Termination::AnswerFound } else { Termination::NoAnswer };
            ItemRecord {
                id: base.id.clone(),
                predicted,
                target: base.target.clone(),
                correct,
                termination,
                calls_used: runs.iter().filter_map(|m| m.items.get(k)).map(|r| r.calls_used).sum(),
                fidelity: None,
                detail: None,
            }
        })
        .collect();
    let mut h = Sha256::new();
    for m in runs {
        h.update(m.fingerprint.as_bytes());
    }
    Metrics::from_items(method, items, hex::encode(h.finalize()))
}

pub const LOGPROB_FLOOR: f64 = -100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogOddsRow {
    pub k: usize,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

/// `k` premise lines `Because 2<m is true we ...` followed by the query `Because 2<1 is`.
pub fn logodds_context(k: usize, rng: &mut impl Rng) -> String {
    let mut out = String::new();
    for _ in 0..k {
        let m: u32 = rng.random_range(3..=9);
        let _ = writeln!(out, "Because 2<{m} is true we ...");
    }
    out.push_str("Because 2<1 is");
    out
}

fn merged_logprob(top: &BTreeMap<String, f64>, word: &str) -> f64 {
    let values: Vec<f64> = top.iter().filter(|(t, _)| t.trim_start() == word).map(|(_, v)| *v).collect();
    if values.is_empty() {
        return LOGPROB_FLOOR;
    }
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = values.iter().map(|v| libm::exp(v - m)).sum();
    (m + libm::log(sum)).max(LOGPROB_FLOOR)
}

/// For each k in 1..=k_max, `trials` contexts of k premises; reports the spread of
/// log P(true) - log P(false) for the first generated token.
pub fn logodds_experiment<B: Backend + ?Sized>(
    backend: &B,
    k_max: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<LogOddsRow>, EvalError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut diffs = Vec::with_capacity(trials);
        for _ in 0..trials {
            let context = logodds_context(k, &mut rng);
            let mut req = CompletionRequest::new(context, alloc::vec!["\n".to_string()], 1);
            req.logprobs = Some(5);
            let out = backend.complete(&req)?;
            let top = out.logprobs.and_then(|l| l.into_iter().next()).ok_or(BackendError::LogprobsUnsupported)?;
            diffs.push(merged_logprob(&top, "true") - merged_logprob(&top, "false"));
        }
        if diffs.is_empty() {
            continue;
        }
        let min = diffs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        rows.push(LogOddsRow { k, min, mean, max });
    }
    Ok(rows)
}

/// Aligned text table: one row per method.
pub fn render_report(rows: &[Metrics]) -> String {
    let header = ["method", "n", "correct", "accuracy"];
    let body: Vec<[String; 4]> = rows
        .iter()
        .map(|m| {
            let acc = if m.empty { String::from("n/a") } else { format!("{:.2}", m.accuracy) };
            [m.method.clone(), m.n.to_string(), m.n_correct.to_string(), acc]
        })
        .collect();
    let mut width = header.map(str::len);
    for r in &body {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: [&str; 4]| {
        let _ = writeln!(
            out,
            "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            w0 = width[0],
            w1 = width[1],
            w2 = width[2],
            w3 = width[3]
        );
    };
    line(header);
    for r in &body {
        line([&r[0], &r[1], &r[2], &r[3]]);
    }
    out
}

/// A fixed-accuracy row, e.g. the guessing baseline, for [`render_report`].
pub fn constant_row(method: impl Into<String>, n: usize, accuracy: f64) -> Metrics {
    let n_correct = libm::round(accuracy * n as f64) as usize;
    Metrics {
        method: method.into(),
        n,
        n_correct,
        accuracy,
        empty: n == 0,
        items: Vec::new(),
        fingerprint: String::new(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Per-item CSV over every method.
pub fn items_csv(rows: &[Metrics]) -> String {
    let mut out = String::from("method,id,predicted,target,correct,termination,calls_used,fidelity\n");
    for m in rows {
        for r in &m.items {
            let show = |a: &Option<AnswerValue>| a.as_ref().map_or(String::new(), |a| a.to_string());
            let termination = match r.termination {
                Termination::AnswerFound => "answer_found",
                Termination::BudgetExhausted => "budget_exhausted",
                Termination::MalformedGeneration => "malformed_generation",
                Termination::NoAnswer => "no_answer",
            };
            let fidelity = r.fidelity.map_or(String::new(), |f| format!("{f:.3}"));
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                csv_field(&m.method),
                csv_field(&r.id),
                csv_field(&show(&r.predicted)),
                csv_field(&show(&r.target)),
                r.correct,
                termination,
                r.calls_used,
                fidelity
            );
        }
    }
    out
}
