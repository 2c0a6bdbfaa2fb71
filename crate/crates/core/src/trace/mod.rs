//! Execution-path text: rendering, stepping, parsing and verification for every trace style.
//!
//! A rendered trace is a list of [`Segment`]s. The first one is the preamble (variable
//! declarations, and the initial state block when the style prints one); each following
//! segment is one transition and ends with the block of the state it produces; the last
//! segment carries the epilogue and the answer.

pub mod blocks;
pub mod bubble;
pub mod deduction;
pub mod lcs;
pub mod lss;
pub mod paren;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dsl::{CompileError, InterpError, ShowBlock};
use crate::model::{AnswerValue, TaskInput, TaskKind};
use crate::oracles::OracleError;

pub use bubble::{BubbleState, TransitionType};
pub use deduction::DeductionState;
pub use lss::LssState;
pub use paren::ParenState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStyle {
    /// Prose states without the iterator.
    BubbleV1,
    /// `<state>` blocks that include the iterator `i`.
    BubbleV2,
    Lss,
    Paren,
    Deduction,
    /// Interpreter execution of the compiled LCS program.
    DslExec,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown trace style `{0}`")]
pub struct UnknownStyle(pub String);

impl TraceStyle {
    pub const ALL: [TraceStyle; 6] = [
        TraceStyle::BubbleV1,
        TraceStyle::BubbleV2,
        TraceStyle::Lss,
        TraceStyle::Paren,
        TraceStyle::Deduction,
        TraceStyle::DslExec,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TraceStyle::BubbleV1 => "v1",
            TraceStyle::BubbleV2 => "v2",
            TraceStyle::Lss => "lss",
            TraceStyle::Paren => "paren",
            TraceStyle::Deduction => "deduction",
            TraceStyle::DslExec => "dsl",
        }
    }

    pub fn task(self) -> TaskKind {
        match self {
            TraceStyle::BubbleV1 | TraceStyle::BubbleV2 => TaskKind::BubbleSort,
            TraceStyle::Lss => TaskKind::LongestSubstring,
            TraceStyle::Paren => TaskKind::ValidParentheses,
            TraceStyle::Deduction => TaskKind::LogicalDeduction,
            TraceStyle::DslExec => TaskKind::Lcs,
        }
    }

    /// Styles applicable to a task, in a stable order.
    pub fn for_task(task: TaskKind) -> Vec<TraceStyle> {
        TraceStyle::ALL.into_iter().filter(|s| s.task() == task).collect()
    }

    /// Whether a state block alone is enough to continue (required by skip-to-state runs).
    pub fn supports_skip(self) -> bool {
        !matches!(self, TraceStyle::BubbleV1 | TraceStyle::Deduction)
    }

    /// Marker that ends a complete trace.
    pub fn terminal(self) -> &'static str {
        match self {
            TraceStyle::BubbleV1 | TraceStyle::BubbleV2 => "END OF EXECUTION",
            TraceStyle::Lss | TraceStyle::Paren | TraceStyle::Deduction => "END",
            TraceStyle::DslExec => "<state>\nEND\n</state>",
        }
    }

    /// The delimiter that closes one state block.
    pub fn block_close(self) -> &'static str {
        match self {
            TraceStyle::BubbleV1 => "EndState",
            TraceStyle::Deduction => "\n",
            _ => "</state>",
        }
    }
}

impl fmt::Display for TraceStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TraceStyle {
    type Err = UnknownStyle;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "v1" | "bubble_v1" => TraceStyle::BubbleV1,
            "v2" | "bubble_v2" => TraceStyle::BubbleV2,
            "lss" => TraceStyle::Lss,
            "paren" => TraceStyle::Paren,
            "deduction" => TraceStyle::Deduction,
            "dsl" | "dsl_exec" | "lcs" => TraceStyle::DslExec,
            _ => return Err(UnknownStyle(s.to_string())),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum State {
    Bubble(BubbleState),
    Lss(LssState),
    Paren(ParenState),
    Deduction(DeductionState),
    Dsl(ShowBlock),
}

impl State {
    /// Block text without indentation.
    pub fn render(&self) -> String {
        match self {
            State::Bubble(s) => s.render(),
            State::Lss(s) => s.render(),
            State::Paren(s) => s.render(),
            State::Deduction(s) => s.render(),
            State::Dsl(b) => b.render(),
        }
    }

    /// The same state with one numeric field increased by one, for styles where that keeps
    /// the trace well-formed. Returns `None` where no such field exists.
    pub fn corrupted(&self) -> Option<State> {
        match self {
            State::Bubble(s) => {
                let mut s = s.clone();
                s.n_swaps += 1;
                Some(State::Bubble(s))
            }
            State::Lss(s) => {
                let mut s = s.clone();
                s.m_len += 1;
                Some(State::Lss(s))
            }
            State::Paren(s) => {
                let mut s = s.clone();
                s.i += 1;
                Some(State::Paren(s))
            }
            State::Dsl(b) => lcs::corrupt_block(b).map(State::Dsl),
            State::Deduction(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub text: String,
    /// The state whose block ends `text`, if a block is printed.
    pub state: Option<State>,
    /// Byte offset of the block's line within `text`.
    pub block_at: usize,
    pub transition: Option<TransitionType>,
    /// Present on the final segment.
    pub answer: Option<AnswerValue>,
}

impl Segment {
    pub fn plain(text: String) -> Segment {
        Segment { text, state: None, block_at: 0, transition: None, answer: None }
    }

    pub fn with_block(mut text: String, indent: &str, state: State) -> Segment {
        text.push_str(indent);
        let block_at = text.len() - indent.len();
        text.push_str(&state.render());
        text.push('\n');
        Segment { text, state: Some(state), block_at, transition: None, answer: None }
    }

    pub fn is_final(&self) -> bool {
        self.answer.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepResult {
    /// Narration followed by the rendered block of `next` (when the style prints one).
    Continue {
        text: String,
        next: State,
        transition: Option<TransitionType>,
    },
    Final {
        text: String,
        answer: AnswerValue,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("style {style} cannot trace a {task} input")]
    StyleMismatch { task: TaskKind, style: TraceStyle },
    #[error("malformed state: {0}")]
    MalformedState(String),
    #[error("text contains no state block")]
    NoStateBlock,
    #[error("state field `{0}` is missing")]
    FieldMissing(String),
    #[error("cannot parse state value `{0}`")]
    ValueUnparseable(String),
    #[error("input not supported by this style: {0}")]
    UnsupportedInput(String),
    #[error("style {0} cannot resume from a state block alone")]
    NoResume(TraceStyle),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

fn mismatch(input: &TaskInput, style: TraceStyle) -> TraceError {
    TraceError::StyleMismatch { task: input.task(), style }
}

/// The problem lines that precede a trace, ending where the trace begins.
pub fn problem_header(input: &TaskInput, style: TraceStyle) -> Result<String, TraceError> {
    Ok(match (style, input) {
        (TraceStyle::BubbleV1 | TraceStyle::BubbleV2, TaskInput::Sequence { seq }) => bubble::header(seq),
        (TraceStyle::Lss, TaskInput::Letters { s }) => lss::header(s),
        (TraceStyle::Paren, TaskInput::Brackets { symbols }) => paren::header(symbols),
        (TraceStyle::Deduction, TaskInput::Puzzle(p)) => deduction::header(p),
        (TraceStyle::DslExec, TaskInput::Pair { s1, s2 }) => lcs::header(s1, s2),
        _ => return Err(mismatch(input, style)),
    })
}

/// Preamble segment followed by every transition, through the final segment.
pub fn segments(input: &TaskInput, style: TraceStyle) -> Result<Vec<Segment>, TraceError> {
    match (style, input) {
        (TraceStyle::BubbleV1, TaskInput::Sequence { seq }) => bubble::v1_segments(seq),
        (TraceStyle::BubbleV2, TaskInput::Sequence { seq }) => bubble::v2_segments(seq),
        (TraceStyle::Lss, TaskInput::Letters { s }) => lss::segments(s),
        (TraceStyle::Paren, TaskInput::Brackets { symbols }) => Ok(paren::segments(symbols)),
        (TraceStyle::Deduction, TaskInput::Puzzle(p)) => deduction::segments(p),
        (TraceStyle::DslExec, TaskInput::Pair { s1, s2 }) => lcs::segments(s1, s2),
        _ => Err(mismatch(input, style)),
    }
}

/// Every segment that follows the block of `state`. `preceding` is the text before that
/// block; only styles whose state omits the loop position consult it.
pub fn segments_from(
    input: &TaskInput,
    style: TraceStyle,
    state: &State,
    preceding: &str,
) -> Result<Vec<Segment>, TraceError> {
    match (style, input, state) {
        (TraceStyle::BubbleV1, TaskInput::Sequence { .. }, State::Bubble(s)) => bubble::v1_segments_from(s, preceding),
        (TraceStyle::BubbleV2, TaskInput::Sequence { .. }, State::Bubble(s)) => bubble::v2_segments_from(s),
        (TraceStyle::Lss, TaskInput::Letters { s: text }, State::Lss(s)) => lss::segments_from(text, s),
        (TraceStyle::Paren, TaskInput::Brackets { symbols }, State::Paren(s)) => Ok(paren::segments_from(symbols, s)),
        (TraceStyle::DslExec, TaskInput::Pair { s1, s2 }, State::Dsl(b)) => lcs::segments_from(s1, s2, b),
        (TraceStyle::Deduction, TaskInput::Puzzle(_), State::Deduction(_)) => Err(TraceError::NoResume(style)),
        _ => Err(mismatch(input, style)),
    }
}

/// Preamble text and the initial state.
pub fn init_state(input: &TaskInput, style: TraceStyle) -> Result<(String, State), TraceError> {
    match (style, input) {
        (TraceStyle::BubbleV1 | TraceStyle::BubbleV2, TaskInput::Sequence { seq }) => {
            let segs = segments(input, style)?;
            let state = BubbleState::initial(seq, style == TraceStyle::BubbleV2);
            Ok((segs[0].text.clone(), State::Bubble(state)))
        }
        (TraceStyle::Lss, TaskInput::Letters { s }) => Ok((lss::preamble(s)?, State::Lss(LssState::initial(s)))),
        (TraceStyle::Paren, TaskInput::Brackets { symbols }) => {
            Ok((paren::preamble(symbols), State::Paren(ParenState { i: 0, stack: Vec::new() })))
        }
        (TraceStyle::Deduction, TaskInput::Puzzle(p)) => {
            let segs = deduction::segments(p)?;
            let state = segs[0].state.clone().ok_or(TraceError::NoStateBlock)?;
            Ok((segs[0].text.clone(), state))
        }
        (TraceStyle::DslExec, TaskInput::Pair { s1, s2 }) => {
            let segs = lcs::segments(s1, s2)?;
            let state = segs[0].state.clone().ok_or(TraceError::NoStateBlock)?;
            Ok((segs[0].text.clone(), state))
        }
        _ => Err(mismatch(input, style)),
    }
}

/// One transition from `state`.
pub fn step(input: &TaskInput, state: &State, style: TraceStyle) -> Result<StepResult, TraceError> {
    let first = match (style, state) {
        (TraceStyle::Deduction, State::Deduction(s)) => {
            let TaskInput::Puzzle(p) = input else { return Err(mismatch(input, style)) };
            deduction::step(p, s)?
        }
        _ => segments_from(input, style, state, "")?.into_iter().next().ok_or(TraceError::NoStateBlock)?,
    };
    Ok(match (first.answer, first.state) {
        (Some(answer), _) => StepResult::Final { text: first.text, answer },
        (None, Some(next)) => StepResult::Continue { text: first.text, next, transition: first.transition },
        (None, None) => return Err(TraceError::MalformedState("step produced neither a state nor an answer".into())),
    })
}

/// Full trace text and its answer.
pub fn render_trace(input: &TaskInput, style: TraceStyle) -> Result<(String, AnswerValue), TraceError> {
    let segs = segments(input, style)?;
    let text: String = segs.iter().map(|s| s.text.as_str()).collect();
    let answer = segs.last().and_then(|s| s.answer.clone()).ok_or(TraceError::NoStateBlock)?;
    Ok((text, answer))
}

/// Block spans of a style within `text`.
pub fn block_spans(text: &str, style: TraceStyle) -> Vec<blocks::Span> {
    match style {
        TraceStyle::BubbleV1 => blocks::v1_blocks(text),
        TraceStyle::Deduction => blocks::assignment_blocks(text),
        _ => blocks::tag_blocks(text),
    }
}

fn parse_inner(inner: &str, style: TraceStyle) -> Result<State, TraceError> {
    Ok(match style {
        TraceStyle::BubbleV1 => State::Bubble(BubbleState::parse_v1(inner)?),
        TraceStyle::BubbleV2 => State::Bubble(BubbleState::parse_v2(inner)?),
        TraceStyle::Lss => State::Lss(LssState::parse(inner)?),
        TraceStyle::Paren => State::Paren(ParenState::parse(inner)?),
        TraceStyle::Deduction => State::Deduction(DeductionState::parse(inner)?),
        TraceStyle::DslExec => {
            State::Dsl(ShowBlock::parse(inner).map_err(|e| TraceError::ValueUnparseable(e.to_string()))?)
        }
    })
}

/// Parses the last block in `text`.
pub fn parse_state_block(text: &str, style: TraceStyle) -> Result<State, TraceError> {
    let spans = block_spans(text, style);
    let last = spans.last().ok_or(TraceError::NoStateBlock)?;
    parse_inner(&text[last.inner.0..last.inner.1], style)
}

/// Parses every block in `text`, keeping per-block failures.
pub fn parse_all_states(text: &str, style: TraceStyle) -> Vec<Result<State, TraceError>> {
    block_spans(text, style).iter().map(|s| parse_inner(&text[s.inner.0..s.inner.1], style)).collect()
}

/// Answer line of a trace in the given style.
pub fn answer_from_trace(text: &str, style: TraceStyle) -> Option<AnswerValue> {
    match style {
        TraceStyle::BubbleV1 | TraceStyle::BubbleV2 => {
            last_number_after(text, "Number of swaps:").map(AnswerValue::SwapCount)
        }
        TraceStyle::Lss => last_number_after(text, "The solution is: m_len=").map(AnswerValue::Length),
        TraceStyle::Paren => {
            let k = text.rfind("Sequence is:")?;
            let word = text[k + "Sequence is:".len()..].split_whitespace().next()?;
            match word.trim_end_matches('.') {
                "valid" => Some(AnswerValue::Validity(true)),
                "invalid" => Some(AnswerValue::Validity(false)),
                _ => None,
            }
        }
        TraceStyle::Deduction => deduction::answer_from_text(text),
        TraceStyle::DslExec => lcs::answer_from_text(text),
    }
}

/// The integer that follows the last occurrence of `label`.
pub fn last_number_after(text: &str, label: &str) -> Option<u64> {
    let k = text.rfind(label)?;
    let digits: String = text[k + label.len()..].trim_start().chars().take_while(|c| c.is_ascii_digit()).collect();
    digits.parse().ok()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub total_transitions: usize,
    pub matching_transitions: usize,
    pub first_divergence: Option<usize>,
    pub final_answer_correct: bool,
}

impl FidelityReport {
    pub fn fidelity(&self) -> f64 {
        if self.total_transitions == 0 {
            1.0
        } else {
            self.matching_transitions as f64 / self.total_transitions as f64
        }
    }
}

/// Compares the state blocks of `full_text` against the oracle trace, position by position.
pub fn verify_trace(full_text: &str, input: &TaskInput, style: TraceStyle) -> Result<FidelityReport, TraceError> {
    let got = parse_all_states(full_text, style);
    if got.is_empty() {
        return Err(TraceError::NoStateBlock);
    }
    let (oracle_text, answer) = render_trace(input, style)?;
    let want = parse_all_states(&oracle_text, style);
    let total = got.len().max(want.len());
    let mut matching = 0;
    let mut first_divergence = None;
    for k in 0..total {
        let same = matches!((got.get(k), want.get(k)), (Some(Ok(a)), Some(Ok(b))) if a == b);
        if same {
            matching += 1;
        } else if first_divergence.is_none() {
            first_divergence = Some(k);
        }
    }
    let final_answer_correct =
        answer_from_trace(full_text, style).is_some_and(|a| crate::model::answers_equal(&a, &answer));
    Ok(FidelityReport {
        total_transitions: total,
        matching_transitions: matching,
        first_divergence,
        final_answer_correct,
    })
}

/// Style-independent view used by the mock: which style a context's examples are written in.
pub fn detect_bubble_style(context: &str) -> Option<TraceStyle> {
    let v2 = context.rfind("<state> a=[");
    let v1 = context.rfind("State: a=[");
    match (v1, v2) {
        (None, None) => None,
        (Some(_), None) => Some(TraceStyle::BubbleV1),
        (None, Some(_)) => Some(TraceStyle::BubbleV2),
        (Some(a), Some(b)) => Some(if a > b { TraceStyle::BubbleV1 } else { TraceStyle::BubbleV2 }),
    }
}

pub(crate) fn join_lines(lines: &[String]) -> String {
    let mut out = String::new();
    for l in lines {
        out.push_str(l.trim_end());
        out.push('\n');
    }
    out
}
