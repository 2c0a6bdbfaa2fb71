//! Offline backends. The obedient mock reads the problem out of the context and continues
//! the canonical trace from wherever the context leaves off; the corrupting mock does the
//! same but perturbs emitted state blocks with a fixed probability.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{clip, count_tokens, Backend, BackendError, CompletionRequest, CompletionResult};
use crate::dataset::oracle_answer;
use crate::dsl::{self, parse_program, prep_env, Env, Program, ShowBlock};
use crate::model::{Bracket, TaskInput, TaskKind};
use crate::prompt::baseline::{self, BaselineStyle};
use crate::puzzle::parse_puzzle;
use crate::trace::{self, blocks, Segment, State, TraceError, TraceStyle};

/// What a context asks for.
#[derive(Debug, Clone)]
pub enum Reading {
    Trace { input: TaskInput, style: TraceStyle },
    Baseline { style: BaselineStyle, task: TaskKind, input: TaskInput },
    Program { program: Program, env: Env },
}

fn unrecognized(msg: impl Into<String>) -> BackendError {
    BackendError::UnrecognizedContext(msg.into())
}

fn trace_err(e: TraceError) -> BackendError {
    unrecognized(e.to_string())
}

/// Line-start positions of `marker`, latest first.
fn line_starts<'a>(context: &'a str, marker: &'a str) -> impl Iterator<Item = usize> + 'a {
    context.match_indices(marker).map(|(k, _)| k).filter(|&k| k == 0 || context.as_bytes()[k - 1] == b'\n')
}

fn first_line(text: &str) -> &str {
    text.split('\n').next().unwrap_or("")
}

fn header_input(style: TraceStyle, at: &str) -> Option<TaskInput> {
    match style {
        TraceStyle::BubbleV1 | TraceStyle::BubbleV2 => {
            let line = first_line(at.strip_prefix("Problem: ")?);
            let seq: Option<Vec<i64>> = line.split(',').map(|t| t.trim().parse().ok()).collect();
            Some(TaskInput::sequence(seq?))
        }
        TraceStyle::Lss => {
            let line = first_line(at.strip_prefix("Input: s = ")?);
            let s: String = line.split(',').map(str::trim).collect();
            Some(TaskInput::letters(s))
        }
        TraceStyle::Paren => {
            let line = first_line(at.strip_prefix("input:")?);
            Some(TaskInput::brackets(Bracket::parse_list(line).ok()?))
        }
        TraceStyle::Deduction => {
            let mut lines = at.split('\n');
            let prose = lines.next()?.strip_prefix("PUZZLE: ")?;
            let question = lines.next()?.strip_prefix("QUESTION: ")?;
            Some(TaskInput::Puzzle(parse_puzzle(prose, question).ok()?))
        }
        TraceStyle::DslExec => {
            let line = at.strip_prefix("LCS:\nInput: ")?;
            let words: Vec<&str> = first_line(line).strip_suffix(" End of input")?.split(' ').collect();
            match words.as_slice() {
                [s1, s2] => Some(TaskInput::pair(*s1, *s2)),
                _ => None,
            }
        }
    }
}

fn program_reading(at: &str, context: &str, k: usize) -> Option<Reading> {
    let body = at.strip_prefix("Program:\n")?;
    let end = body.find("\nExecute:\n")?;
    let program = parse_program(&body[..=end]).ok()?;
    let before = &context[..k];
    let env = match before.rfind("Prep:\n") {
        Some(p) if !before[p + "Prep:\n".len()..].trim().is_empty() => {
            prep_env(before[p + "Prep:\n".len()..].trim_end()).ok()?
        }
        _ => Env::default(),
    };
    Some(Reading::Program { program, env })
}

fn is_baseline(context: &str) -> bool {
    context.contains("Use this format:\n") || context.contains("bracketed with <answer> and </answer>")
}

/// Identifies the problem posed by `context` and returns the text after its header.
pub fn read_context(context: &str) -> Result<(Reading, &str), BackendError> {
    if is_baseline(context) {
        let (style, task, input) =
            baseline::recognize(context).ok_or_else(|| unrecognized("baseline prompt without a readable problem"))?;
        let tail = match style {
            BaselineStyle::FewShot => context.rfind("\nSTART\n").map_or("", |k| &context[k + "\nSTART\n".len()..]),
            _ => context.rfind("</answer>.\n").map_or("", |k| &context[k + "</answer>.\n".len()..]),
        };
        return Ok((Reading::Baseline { style, task, input }, tail));
    }
    let markers: [(&str, Option<TraceStyle>); 6] = [
        ("Problem: ", Some(TraceStyle::BubbleV2)),
        ("Input: s = ", Some(TraceStyle::Lss)),
        ("input:", Some(TraceStyle::Paren)),
        ("PUZZLE: ", Some(TraceStyle::Deduction)),
        ("LCS:\nInput: ", Some(TraceStyle::DslExec)),
        ("Program:\n", None),
    ];
    let mut candidates: Vec<(usize, Option<TraceStyle>)> =
        markers.iter().flat_map(|(m, style)| line_starts(context, m).map(move |k| (k, *style))).collect();
    candidates.sort_by_key(|c| core::cmp::Reverse(c.0));
    for (k, style) in candidates {
        let at = &context[k..];
        let Some(style) = style else {
            if let Some(r) = program_reading(at, context, k) {
                let start = at.find("\nExecute:\n").map_or(0, |e| e + "\nExecute:\n".len());
                return Ok((r, &at[start..]));
            }
            continue;
        };
        let Some(input) = header_input(style, at) else { continue };
        let style = match style {
            TraceStyle::BubbleV2 => trace::detect_bubble_style(&context[..k]).unwrap_or(TraceStyle::BubbleV2),
            s => s,
        };
        let Ok(header) = trace::problem_header(&input, style) else { continue };
        if let Some(tail) = at.strip_prefix(header.as_str()) {
            return Ok((Reading::Trace { input, style }, tail));
        }
    }
    Err(unrecognized("no problem header found"))
}

fn concat(segs: &[Segment]) -> String {
    segs.iter().map(|s| s.text.as_str()).collect()
}

/// Canonical text following the block of `state`, from just after its closing delimiter.
pub fn text_after_block(
    input: &TaskInput,
    style: TraceStyle,
    state: &State,
    preceding: &str,
) -> Result<String, TraceError> {
    let rest = match trace::segments_from(input, style, state, preceding) {
        Ok(segs) => concat(&segs),
        Err(TraceError::NoResume(_)) => {
            // label-addressed states: find the matching block in the canonical trace
            let segs = trace::segments(input, style)?;
            let k = segs.iter().position(|s| s.state.as_ref() == Some(state)).ok_or(TraceError::NoResume(style))?;
            concat(&segs[k + 1..])
        }
        Err(e) => return Err(e),
    };
    Ok(format!("\n{rest}"))
}

/// `after` must be a prefix of `canonical`; the remainder is the continuation.
fn remainder(canonical: &str, after: &str) -> Result<String, BackendError> {
    canonical
        .strip_prefix(after)
        .map(str::to_string)
        .ok_or_else(|| unrecognized("text after the last state block departs from the trace"))
}

fn trace_continuation(input: &TaskInput, style: TraceStyle, tail: &str) -> Result<String, BackendError> {
    let segs = trace::segments(input, style).map_err(trace_err)?;
    let body = concat(&segs);
    if let Some(rest) = body.strip_prefix(tail) {
        return Ok(rest.to_string());
    }
    let spans = trace::block_spans(tail, style);
    let last = spans.last().ok_or_else(|| unrecognized("context is neither a trace prefix nor holds a state"))?;
    let state = trace::parse_state_block(tail, style).map_err(trace_err)?;
    let canonical = text_after_block(input, style, &state, &tail[..last.line_start]).map_err(trace_err)?;
    remainder(&canonical, &tail[last.end..])
}

fn program_continuation(program: &Program, env: &Env, tail: &str) -> Result<String, BackendError> {
    let exec = dsl::interpret_program(program, env.clone(), true).map_err(|e| unrecognized(e.to_string()))?;
    let body = exec.text();
    if let Some(rest) = body.strip_prefix(tail) {
        return Ok(rest.to_string());
    }
    let spans = blocks::tag_blocks(tail);
    let last = spans.last().ok_or_else(|| unrecognized("program output diverges and holds no state"))?;
    let block = ShowBlock::parse(&tail[last.inner.0..last.inner.1]).map_err(|e| unrecognized(e.to_string()))?;
    let resumed =
        dsl::resume_after_show(program, env.clone(), &block, true).map_err(|e| unrecognized(e.to_string()))?;
    remainder(&format!("\n{}", resumed.text()), &tail[last.end..])
}

/// Everything an obedient model would write after `context`, ignoring stops and budget.
pub fn continuation(context: &str) -> Result<String, BackendError> {
    let (reading, tail) = read_context(context)?;
    match &reading {
        Reading::Trace { input, style } => trace_continuation(input, *style, tail),
        Reading::Program { program, env } => program_continuation(program, env, tail),
        Reading::Baseline { style, input, .. } => {
            let answer = oracle_answer(input).map_err(|e| unrecognized(e.to_string()))?;
            let full = match style {
                BaselineStyle::FewShot => format!("The solution is: {}\nEND\n", baseline::solution_text(&answer)),
                _ => format!("<answer>{}</answer>\n", baseline::solution_text(&answer)),
            };
            Ok(full.strip_prefix(tail).unwrap_or("").to_string())
        }
    }
}

/// Continues the canonical trace exactly. Tokens are whitespace-delimited words.
#[derive(Debug, Clone, Copy, Default)]
pub struct ObedientMock;

impl Backend for ObedientMock {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        req.validate()?;
        Ok(clip(&continuation(&req.context)?, req))
    }
}

/// An obedient mock that, with probability `p` per emitted state block, writes the block
/// with one field off by one and then continues faithfully from the corrupted state.
/// Blocks in the trace preamble are left alone. Decisions are seeded by `seed` and the
/// request context, so identical requests give identical completions.
#[derive(Debug, Clone, Copy)]
pub struct CorruptMock {
    pub p: f64,
    pub seed: u64,
}

impl CorruptMock {
    pub fn new(p: f64, seed: u64) -> Self {
        CorruptMock { p: p.clamp(0.0, 1.0), seed }
    }

    fn rng_for(&self, context: &str) -> ChaCha8Rng {
        let digest = Sha256::digest(context.as_bytes());
        let mut word = [0u8; 8];
        word.copy_from_slice(&digest[..8]);
        ChaCha8Rng::seed_from_u64(self.seed ^ u64::from_le_bytes(word))
    }
}

fn corruptible(style: TraceStyle) -> bool {
    matches!(style, TraceStyle::BubbleV2 | TraceStyle::Lss | TraceStyle::Paren | TraceStyle::DslExec)
}

impl Backend for CorruptMock {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        req.validate()?;
        let (reading, tail) = read_context(&req.context)?;
        let (input, style) = match reading {
            Reading::Trace { input, style } if corruptible(style) && self.p > 0.0 => (input, style),
            _ => return ObedientMock.complete(req),
        };
        let preamble_block =
            trace::segments(&input, style).map_err(trace_err)?.first().is_some_and(|s| s.state.is_some());
        let mut rng = self.rng_for(&req.context);
        let mut written = String::from(tail);
        let mut out = String::new();
        loop {
            let cont = trace_continuation(&input, style, &written)?;
            let spans = trace::block_spans(&cont, style);
            let Some(span) = spans.first() else {
                out.push_str(&cont);
                break;
            };
            let index = trace::block_spans(&written, style).len();
            let mut piece = cont[..span.end].to_string();
            let protected = preamble_block && index == 0;
            if !protected && rng.random_bool(self.p) {
                if let Ok(Some(bad)) = trace::parse_state_block(&piece, style).map(|s| s.corrupted()) {
                    piece.truncate(span.open);
                    piece.push_str(&bad.render());
                }
            }
            written.push_str(&piece);
            out.push_str(&piece);
            let stopped = req.stop.iter().any(|s| out.contains(s.as_str()));
            if stopped || count_tokens(&out) > req.max_tokens as usize {
                break;
            }
        }
        Ok(clip(&out, req))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FinishReason, ProblemInstance};
    use crate::prompt::{append_problem, build_single_path_prompt, default_exemplar};

    fn all_inputs() -> Vec<(TaskInput, TraceStyle)> {
        alloc::vec![
            (TaskInput::sequence([4, 1, 3, 0, 2]), TraceStyle::BubbleV2),
            (TaskInput::sequence([4, 1, 3, 0, 2]), TraceStyle::BubbleV1),
            (TaskInput::letters("abcabcbb"), TraceStyle::Lss),
            (TaskInput::brackets(Bracket::parse_list("( [ ] ) { ( }").unwrap()), TraceStyle::Paren),
            (TaskInput::pair("ABC", "CAB"), TraceStyle::DslExec),
            (default_exemplar(TraceStyle::Deduction), TraceStyle::Deduction),
        ]
    }

    #[test]
    fn resumes_after_every_block() {
        for (input, style) in all_inputs() {
            let text = concat(&trace::segments(&input, style).unwrap());
            for span in trace::block_spans(&text, style) {
                let state = trace::parse_all_states(&text[..span.end], style).pop().unwrap().unwrap();
                let after = text_after_block(&input, style, &state, &text[..span.line_start]).unwrap();
                assert_eq!(after, &text[span.end..], "{style} at {}", span.open);
            }
        }
    }

    #[test]
    fn continues_a_prompt() {
        for (input, style) in all_inputs() {
            let p = build_single_path_prompt(input.task(), &default_exemplar(style), style).unwrap();
            let ctx = append_problem(&p, &ProblemInstance::new("x", input.clone(), None)).unwrap();
            let req = CompletionRequest::new(ctx, alloc::vec![style.terminal().to_string()], 100_000);
            let out = ObedientMock.complete(&req).unwrap();
            assert_eq!(out.finish_reason, FinishReason::StopSequence, "{style}");
            let (oracle, _) = trace::render_trace(&input, style).unwrap();
            assert!(oracle.starts_with(&out.text), "{style}");
            assert_eq!(oracle[out.text.len()..].trim_end(), style.terminal(), "{style}");
        }
    }

    #[test]
    fn zero_probability_is_obedient() {
        let (input, style) = (TaskInput::letters("abcabcbb"), TraceStyle::Lss);
        let p = build_single_path_prompt(input.task(), &default_exemplar(style), style).unwrap();
        let ctx = append_problem(&p, &ProblemInstance::new("x", input, None)).unwrap();
        let req = CompletionRequest::new(ctx, alloc::vec!["END".into()], 100_000);
        assert_eq!(CorruptMock::new(0.0, 1).complete(&req).unwrap(), ObedientMock.complete(&req).unwrap());
        let bad = CorruptMock::new(1.0, 1).complete(&req).unwrap();
        assert_ne!(bad.text, ObedientMock.complete(&req).unwrap().text);
        assert_eq!(bad, CorruptMock::new(1.0, 1).complete(&req).unwrap());
    }

    #[test]
    fn unknown_context() {
        let req = CompletionRequest::new("hello there", alloc::vec![], 10);
        assert!(matches!(ObedientMock.complete(&req), Err(BackendError::UnrecognizedContext(_))));
    }
}
