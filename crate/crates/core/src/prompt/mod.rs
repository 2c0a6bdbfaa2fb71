//! Prompt builders: single execution path, fragmented, interpreter, and baselines.
//!
//! Every builder is a pure function of its arguments. A [`PromptSpec`] ends exactly where a
//! problem header is appended; the full context ends where generation begins.

pub mod baseline;
pub mod fragments;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::dataset::DatasetError;
use crate::dsl::{self, parse_program, prep_env, ParseError, Value};
use crate::model::{AnswerValue, Bracket, ProblemInstance, TaskInput, TaskKind};
use crate::puzzle::DeductionPuzzle;
use crate::trace::{self, lcs, TraceError, TraceStyle};

pub use baseline::{build_baseline_prompt, BaselineStyle};
pub use fragments::{build_fragment_prompt, build_fragment_prompt_with, fragment_set, Fragment, FRAGMENT_PREFIX};

/// The interpreter primer: value get/set, `Show`, undefined reads, loops, `if` and
/// `detailed_max` demonstrations.
pub const PRIMER: &str = include_str!("primer.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PromptKind {
    SinglePath,
    Fragmented { n_fragments: usize, seed: u64, balanced: bool },
    Interpreter,
    Baseline { style: BaselineStyle, k_shots: usize, include_code: bool, seed: u64 },
}

/// How the answer is read from generated text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "style", rename_all = "snake_case")]
pub enum AnswerPattern {
    /// The trace style's own answer line.
    Trace(TraceStyle),
    /// `The solution is: …`.
    SolutionLine,
    /// `<answer>…</answer>`.
    Tagged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptSpec {
    pub text: String,
    /// Text placed after the problem header (templates that embed the problem mid-prompt).
    #[serde(default)]
    pub suffix: String,
    pub task: TaskKind,
    pub kind: PromptKind,
    pub style: Option<TraceStyle>,
    pub stop_sequences: Vec<String>,
    pub answer_pattern: AnswerPattern,
    pub problem_header: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("style {style} does not trace {task} problems")]
    StyleMismatch { task: TaskKind, style: TraceStyle },
    #[error("prompt is for {prompt} problems but the instance is {instance}")]
    TaskMismatch { prompt: TaskKind, instance: TaskKind },
    #[error("unsupported fragment count {0}; use 7, 13, 19 or 25")]
    UnsupportedCount(usize),
    #[error("program: {0}")]
    Syntax(#[from] ParseError),
    #[error("prep: {0}")]
    Prep(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

fn header_template(style: TraceStyle) -> &'static str {
    match style {
        TraceStyle::BubbleV1 | TraceStyle::BubbleV2 => "Problem: {list}\nEXECUTION\n",
        TraceStyle::Lss => "Input: s = {letters}\nSTART\n",
        TraceStyle::Paren => "input: {symbols}\n",
        TraceStyle::Deduction => "PUZZLE: {prose}\nQUESTION: {question}\n\nSTART\n",
        TraceStyle::DslExec => "LCS:\nInput: {s1} {s2} End of input\nLCS Prep:\n",
    }
}

/// The worked example each style uses by default.
pub fn default_exemplar(style: TraceStyle) -> TaskInput {
    match style {
        TraceStyle::BubbleV1 | TraceStyle::BubbleV2 => TaskInput::sequence([2, 3, 1, 5]),
        TraceStyle::Lss => TaskInput::letters("cbcabb"),
        TraceStyle::Paren => {
            TaskInput::brackets(Bracket::parse_list(") [ { } ] ( { } ) [ ( { } ) ] } {").expect("fixed symbols"))
        }
        TraceStyle::Deduction => TaskInput::Puzzle(DeductionPuzzle::exemplar()),
        TraceStyle::DslExec => TaskInput::pair("TA", "ATA"),
    }
}

fn trace_spec(text: String, style: TraceStyle, kind: PromptKind) -> PromptSpec {
    PromptSpec {
        text,
        suffix: String::new(),
        task: style.task(),
        kind,
        style: Some(style),
        stop_sequences: alloc::vec![style.terminal().to_string()],
        answer_pattern: AnswerPattern::Trace(style),
        problem_header: header_template(style).to_string(),
    }
}

/// One complete worked trace followed by a blank line; LCS traces are preceded by the
/// interpreter primer.
pub fn build_single_path_prompt(
    task: TaskKind,
    exemplar: &TaskInput,
    style: TraceStyle,
) -> Result<PromptSpec, PromptError> {
    if style.task() != task {
        return Err(PromptError::StyleMismatch { task, style });
    }
    if exemplar.task() != task {
        return Err(PromptError::TaskMismatch { prompt: task, instance: exemplar.task() });
    }
    let mut text = String::new();
    if style == TraceStyle::DslExec {
        text.push_str(PRIMER);
        text.push('\n');
    }
    text.push_str(&trace::problem_header(exemplar, style)?);
    text.push_str(&trace::render_trace(exemplar, style)?.0);
    text.push('\n');
    Ok(trace_spec(text, style, PromptKind::SinglePath))
}

fn lcs_strings(env: &dsl::Env) -> Option<(String, String)> {
    let word = |name: &str, len: &str| -> Option<String> {
        let Value::Int(n) = env.get(len) else { return None };
        (1..=n)
            .map(|k| match env.get_cell(name, &[k]) {
                Value::Str(s) => Some(s),
                Value::Int(v) => Some(v.to_string()),
            })
            .collect()
    };
    if !env.is_array("a") || !env.is_array("b") {
        return None;
    }
    Some((word("a", "M")?, word("b", "N")?))
}

/// Primer, then the prep lines and program listing, ending at `Execute:`. When the prep
/// declares two sequences `a`, `b` with lengths `M`, `N`, the LCS problem framing is used.
pub fn build_interpreter_prompt(program: &str, prep: &str) -> Result<PromptSpec, PromptError> {
    parse_program(program)?;
    let env = if prep.trim().is_empty() {
        dsl::Env::default()
    } else {
        prep_env(prep).map_err(|e| PromptError::Prep(e.to_string()))?
    };
    let mut text = String::from(PRIMER);
    text.push('\n');
    let (task, header) = match lcs_strings(&env) {
        Some((s1, s2)) => {
            text.push_str(&lcs::header(&s1, &s2));
            text.push_str(&lcs::listing(prep, program));
            (TaskKind::Lcs, header_template(TraceStyle::DslExec).to_string())
        }
        None => {
            if !prep.trim().is_empty() {
                text.push_str(&format!("Prep:\n{}\n\n", prep.trim_end()));
            }
            text.push_str("Program:\n");
            text.push_str(program);
            if !program.ends_with('\n') {
                text.push('\n');
            }
            text.push_str("Execute:\n");
            (TaskKind::Lcs, String::from("Program:\n{program}Execute:\n"))
        }
    };
    Ok(PromptSpec {
        text,
        suffix: String::new(),
        task,
        kind: PromptKind::Interpreter,
        style: Some(TraceStyle::DslExec),
        stop_sequences: alloc::vec![TraceStyle::DslExec.terminal().to_string()],
        answer_pattern: AnswerPattern::Trace(TraceStyle::DslExec),
        problem_header: header,
    })
}

/// The interpreter prompt for one LCS instance.
pub fn lcs_interpreter_prompt(s1: &str, s2: &str) -> Result<PromptSpec, PromptError> {
    let (prep, program) = dsl::compile_lcs(s1, s2).map_err(TraceError::from)?;
    build_interpreter_prompt(&program, &prep)
}

/// Full context for one instance: the prompt, the problem, and any template suffix.
pub fn append_problem(p: &PromptSpec, instance: &ProblemInstance) -> Result<String, PromptError> {
    if instance.task != p.task || instance.input.task() != p.task {
        return Err(PromptError::TaskMismatch { prompt: p.task, instance: instance.input.task() });
    }
    match (&p.kind, &instance.input) {
        (PromptKind::Interpreter, TaskInput::Pair { s1, s2 }) => return Ok(lcs_interpreter_prompt(s1, s2)?.text),
        (PromptKind::Baseline { style, .. }, input) => {
            let mut out = p.text.clone();
            out.push_str(&baseline::problem_lines(*style, input));
            out.push_str(&p.suffix);
            return Ok(out);
        }
        _ => {}
    }
    let style = p.style.ok_or(PromptError::TaskMismatch { prompt: p.task, instance: instance.task })?;
    let mut out = p.text.clone();
    out.push_str(&trace::problem_header(&instance.input, style)?);
    out.push_str(&p.suffix);
    Ok(out)
}

/// Reads the answer from generated text with the prompt's pattern.
pub fn extract_answer(task: TaskKind, spec: &PromptSpec, text: &str) -> Option<AnswerValue> {
    match spec.answer_pattern {
        AnswerPattern::Trace(style) => trace::answer_from_trace(text, style),
        AnswerPattern::SolutionLine => {
            let k = text.rfind("The solution is:")?;
            let line = text[k + "The solution is:".len()..].lines().next()?.trim();
            baseline::parse_solution(task, line)
        }
        AnswerPattern::Tagged => {
            let end = text.rfind("</answer>")?;
            let start = text[..end].rfind("<answer>")? + "<answer>".len();
            baseline::parse_solution(task, text[start..end].trim())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_path_seam() {
        let p = build_single_path_prompt(
            TaskKind::BubbleSort,
            &default_exemplar(TraceStyle::BubbleV1),
            TraceStyle::BubbleV1,
        )
        .unwrap();
        let inst = ProblemInstance::new("x", TaskInput::sequence([0, 3, 8, 5, 6]), None);
        let ctx = append_problem(&p, &inst).unwrap();
        assert!(ctx.starts_with("Problem: 2, 3, 1, 5\nEXECUTION\n"));
        assert!(ctx.ends_with("END OF EXECUTION\n\nProblem: 0, 3, 8, 5, 6\nEXECUTION\n"));
    }

    #[test]
    fn lss_header() {
        let p = build_single_path_prompt(TaskKind::LongestSubstring, &TaskInput::letters("cbcabb"), TraceStyle::Lss)
            .unwrap();
        let ctx = append_problem(&p, &ProblemInstance::new("x", TaskInput::letters("pwwkepz"), None)).unwrap();
        assert!(ctx.ends_with("\nInput: s = p, w, w, k, e, p, z\nSTART\n"));
    }

    #[test]
    fn task_mismatch() {
        let p =
            build_single_path_prompt(TaskKind::LongestSubstring, &TaskInput::letters("ab"), TraceStyle::Lss).unwrap();
        let inst = ProblemInstance::new("x", TaskInput::sequence([1, 2]), None);
        assert!(matches!(append_problem(&p, &inst), Err(PromptError::TaskMismatch { .. })));
        assert!(matches!(
            build_single_path_prompt(TaskKind::Lcs, &TaskInput::letters("ab"), TraceStyle::Lss),
            Err(PromptError::StyleMismatch { .. })
        ));
    }

    #[test]
    fn interpreter_prompt_for_lcs() {
        let p = lcs_interpreter_prompt("TA", "ATA").unwrap();
        assert!(p.text.starts_with(PRIMER));
        assert!(p.text.ends_with(
            "LCS:\nInput: TA ATA End of input\nLCS Prep:\na[1]=T a[2]=A\nb[1]=A b[2]=T b[3]=A\nM=2 N=3\n\nLCS program:\nShow(a,b,M,N)\nfor i from 1 to M\n    for j from 1 to N\n        if a[i]==b[j]\n            C[i,j]:=C[i-1,j-1]+1\n        else\n            C[i,j]:=detailed_max(C[i,j-1],C[i-1,j])\n        Show(i, j, M, N, C[0:i,0:N])\nShow('END')\nExecute:\n"
        ));
        let generic = build_interpreter_prompt("Show(a)", "").unwrap();
        assert!(generic.text.ends_with("\nProgram:\nShow(a)\nExecute:\n"));
        assert!(build_interpreter_prompt("for i from 1 to", "").is_err());
    }

    #[test]
    fn extraction() {
        let spec =
            build_single_path_prompt(TaskKind::BubbleSort, &TaskInput::sequence([2, 1]), TraceStyle::BubbleV2).unwrap();
        assert_eq!(
            extract_answer(TaskKind::BubbleSort, &spec, "...Number of swaps: 7\nEND OF EXECUTION"),
            Some(AnswerValue::SwapCount(7))
        );
        assert_eq!(extract_answer(TaskKind::BubbleSort, &spec, "nothing here"), None);
    }
}
