//! The generation driver: full-context runs and skip-to-state runs.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::backend::{Backend, CompletionRequest, CompletionResult};
use crate::model::{AnswerValue, FinishReason, RunConfig, TaskInput, TranscriptEvent};
use crate::prompt::{self, AnswerPattern, PromptSpec};
use crate::trace::{self, blocks, deduction, TraceError, TraceStyle};

pub use crate::prompt::extract_answer;

pub const STATE_CLOSE: &str = "</state>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    AnswerFound,
    BudgetExhausted,
    MalformedGeneration,
    NoAnswer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub answer: Option<AnswerValue>,
    pub transcript: Vec<TranscriptEvent>,
    /// Every generated segment in order, with stop sequences restored.
    pub full_trace: String,
    pub calls_used: u32,
    pub termination: Termination,
    /// Why a run ended without an answer, when there is more to say than the termination.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl RunResult {
    fn new() -> Self {
        RunResult {
            answer: None,
            transcript: Vec::new(),
            full_trace: String::new(),
            calls_used: 0,
            termination: Termination::NoAnswer,
            detail: None,
        }
    }

    fn end(mut self, termination: Termination, detail: Option<String>) -> Self {
        if termination != Termination::AnswerFound {
            self.answer = None;
        }
        self.termination = termination;
        self.detail = detail;
        self
    }

    fn finish_with(self, answer: Option<AnswerValue>) -> Self {
        match answer {
            Some(a) => {
                let mut r = self.end(Termination::AnswerFound, None);
                r.answer = Some(a);
                r
            }
            None => self.end(Termination::NoAnswer, None),
        }
    }
}

struct Caller<'a, B: Backend + ?Sized> {
    backend: &'a B,
    cfg: &'a RunConfig,
    result: RunResult,
}

impl<B: Backend + ?Sized> Caller<'_, B> {
    fn call(&mut self, context: &str, stop: &[String]) -> Result<CompletionResult, String> {
        let req = CompletionRequest {
            context: context.to_string(),
            stop: stop.to_vec(),
            max_tokens: self.cfg.max_tokens,
            temperature: self.cfg.temperature,
            logprobs: None,
        };
        let out = self.backend.complete(&req).map_err(|e| e.to_string())?;
        self.result.transcript.push(TranscriptEvent {
            call_index: self.result.calls_used,
            context_length_chars: context.chars().count(),
            stop_sequences: req.stop,
            generated_text: out.text.clone(),
            finish_reason: out.finish_reason,
            logprobs: out.logprobs.clone(),
        });
        self.result.calls_used += 1;
        Ok(out)
    }
}

fn answer_of(spec: &PromptSpec, input: Option<&TaskInput>, text: &str) -> Option<AnswerValue> {
    prompt::extract_answer(spec.task, spec, text).or_else(|| match (spec.answer_pattern, input) {
        // an unfinished deduction trace still names a best-so-far order
        (AnswerPattern::Trace(TraceStyle::Deduction), Some(TaskInput::Puzzle(p))) => {
            deduction::answer_from_latest_assignment(p, text)
        }
        _ => None,
    })
}

/// Generates with the full accumulated context until a stop sequence or natural end,
/// continuing through budget cut-offs while calls remain. `input` enables the answer
/// fallbacks that need the problem (deduction puzzles); pass `None` when unknown.
pub fn run_plain<B: Backend + ?Sized>(
    backend: &B,
    context: &str,
    spec: &PromptSpec,
    input: Option<&TaskInput>,
    cfg: &RunConfig,
) -> RunResult {
    let stop = cfg.stop_sequences.clone().unwrap_or_else(|| spec.stop_sequences.clone());
    let max_calls = cfg.max_calls.unwrap_or_else(|| input.map_or(1, crate::model::default_max_calls));
    let mut run = Caller { backend, cfg, result: RunResult::new() };
    let mut ctx = String::from(context);
    while run.result.calls_used < max_calls {
        let out = match run.call(&ctx, &stop) {
            Ok(out) => out,
            Err(e) => return run.result.end(Termination::MalformedGeneration, Some(e)),
        };
        ctx.push_str(&out.text);
        run.result.full_trace.push_str(&out.text);
        match out.finish_reason {
            FinishReason::BudgetExhausted => continue,
            FinishReason::StopSequence => {
                // which stop fired is not reported; the first one is the terminal by convention
                if let Some(s) = stop.first() {
                    run.result.full_trace.push_str(s);
                }
            }
            FinishReason::NaturalEnd => {}
        }
        let answer = answer_of(spec, input, &run.result.full_trace);
        return run.result.finish_with(answer);
    }
    run.result.end(Termination::BudgetExhausted, None)
}

/// `base`, a newline if it lacks one, then the line holding the last state block of
/// `segment` and whatever follows it.
pub fn reconstruct_context(base: &str, segment: &str) -> Result<String, TraceError> {
    let span = *blocks::tag_blocks(segment).last().ok_or(TraceError::NoStateBlock)?;
    Ok(join_context(base, &segment[span.line_start..]))
}

fn join_context(base: &str, kept: &str) -> String {
    let mut out = String::with_capacity(base.len() + kept.len() + 2);
    out.push_str(base);
    if !out.is_empty() && !out.ends_with('\n') {
        out.push('\n');
    }
    out.push_str(kept);
    if !out.ends_with('\n') {
        out.push('\n');
    }
    out
}

/// True when the last `<state>` in `text` has no closer after it.
fn open_block(text: &str) -> bool {
    match (text.rfind("<state>"), text.rfind(STATE_CLOSE)) {
        (Some(o), Some(c)) => o > c,
        (Some(_), None) => true,
        _ => false,
    }
}

/// Skip-to-state generation: each call sees only `base` and the latest state block, with
/// `</state>` and the style's terminal as stop sequences.
pub fn run_skip<B: Backend + ?Sized>(
    backend: &B,
    base: &str,
    spec: &PromptSpec,
    input: Option<&TaskInput>,
    cfg: &RunConfig,
) -> RunResult {
    let style = spec.style.unwrap_or(TraceStyle::BubbleV2);
    let terminal = style.terminal().to_string();
    let stop = alloc::vec![STATE_CLOSE.to_string(), terminal.clone()];
    let max_calls = cfg.max_calls.unwrap_or_else(|| input.map_or(1, crate::model::default_max_calls));
    let mut run = Caller { backend, cfg, result: RunResult::new() };
    let mut ctx = String::from(base);
    let mut last_block = String::new();
    let mut repeats = 0u32;
    let mut segment = String::new();
    while run.result.calls_used < max_calls {
        let out = match run.call(&ctx, &stop) {
            Ok(out) => out,
            Err(e) => return run.result.end(Termination::MalformedGeneration, Some(e)),
        };
        segment.push_str(&out.text);
        match out.finish_reason {
            FinishReason::BudgetExhausted => {
                // the segment is unfinished; let the next call pick up where this one stopped
                ctx.push_str(&out.text);
                continue;
            }
            FinishReason::StopSequence if open_block(&segment) => segment.push_str(STATE_CLOSE),
            FinishReason::StopSequence => {
                segment.push_str(&terminal);
                run.result.full_trace.push_str(&segment);
                let text = format!("{last_block}\n{segment}");
                let answer = answer_of(spec, input, &text);
                return run.result.finish_with(answer);
            }
            FinishReason::NaturalEnd => {
                run.result.full_trace.push_str(&segment);
                let text = format!("{last_block}\n{segment}");
                let answer = answer_of(spec, input, &text);
                return run.result.finish_with(answer);
            }
        }
        run.result.full_trace.push_str(&segment);
        let Some(span) = blocks::tag_blocks(&segment).last().copied() else {
            return run.result.end(Termination::MalformedGeneration, Some("segment holds no state block".into()));
        };
        let block = segment[span.line_start..span.end].to_string();
        if block.trim() == last_block.trim() {
            repeats += 1;
        } else {
            repeats = 1;
        }
        if repeats >= cfg.livelock_repeats.max(1) {
            return run.result.end(Termination::MalformedGeneration, Some(format!("state repeated {repeats} times")));
        }
        ctx = if cfg.retain_narration {
            join_context(base, segment.trim_start_matches('\n'))
        } else {
            join_context(base, &block)
        };
        last_block = block;
        segment.clear();
    }
    run.result.end(Termination::BudgetExhausted, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Plain,
    Skip,
}

impl core::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Mode::Plain),
            "skip" => Ok(Mode::Skip),
            _ => Err(format!("unknown mode `{s}`; use plain or skip")),
        }
    }
}

impl core::fmt::Display for Mode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::Skip => "skip",
        })
    }
}

/// Whether `spec` can be run in `mode`.
pub fn check_mode(spec: &PromptSpec, mode: Mode) -> Result<(), String> {
    if mode == Mode::Plain {
        return Ok(());
    }
    match spec.style {
        Some(style) if style.supports_skip() && matches!(spec.answer_pattern, AnswerPattern::Trace(_)) => Ok(()),
        Some(style) => Err(format!("style {style} cannot run in skip mode")),
        None => Err("baseline prompts cannot run in skip mode".into()),
    }
}

/// Runs one context in the given mode.
pub fn run<B: Backend + ?Sized>(
    backend: &B,
    context: &str,
    spec: &PromptSpec,
    input: Option<&TaskInput>,
    cfg: &RunConfig,
    mode: Mode,
) -> RunResult {
    match mode {
        Mode::Plain => run_plain(backend, context, spec, input, cfg),
        Mode::Skip => run_skip(backend, context, spec, input, cfg),
    }
}

/// Largest rendered state block in a canonical trace, in bytes (for context-bound checks).
pub fn max_block_len(input: &TaskInput, style: TraceStyle) -> Result<usize, TraceError> {
    let (text, _) = trace::render_trace(input, style)?;
    Ok(trace::block_spans(&text, style).iter().map(|s| s.end - s.line_start).max().unwrap_or(0))
}
