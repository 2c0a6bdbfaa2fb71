//! Shared vocabulary: tasks, problem instances, answers and run records.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::puzzle::DeductionPuzzle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    BubbleSort,
    LongestSubstring,
    ValidParentheses,
    LogicalDeduction,
    Lcs,
}

impl TaskKind {
    pub const ALL: [TaskKind; 5] = [
        TaskKind::BubbleSort,
        TaskKind::LongestSubstring,
        TaskKind::ValidParentheses,
        TaskKind::LogicalDeduction,
        TaskKind::Lcs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::BubbleSort => "bubble_sort",
            TaskKind::LongestSubstring => "longest_substring",
            TaskKind::ValidParentheses => "valid_parentheses",
            TaskKind::LogicalDeduction => "logical_deduction",
            TaskKind::Lcs => "lcs",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown task `{0}`")]
pub struct UnknownTask(pub String);

impl FromStr for TaskKind {
    type Err = UnknownTask;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "bubble_sort" | "bubble" | "bubblesort" => TaskKind::BubbleSort,
            "longest_substring" | "lss" | "longestsubstring" => TaskKind::LongestSubstring,
            "valid_parentheses" | "paren" | "parens" | "parentheses" => TaskKind::ValidParentheses,
            "logical_deduction" | "deduction" | "logicaldeduction" => TaskKind::LogicalDeduction,
            "lcs" | "longest_common_subsequence" => TaskKind::Lcs,
            other => return Err(UnknownTask(other.to_string())),
        })
    }
}

/// One of the six bracket symbols accepted by the parentheses task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bracket {
    RoundOpen,
    RoundClose,
    SquareOpen,
    SquareClose,
    CurlyOpen,
    CurlyClose,
}

impl Bracket {
    pub fn from_char(c: char) -> Option<Bracket> {
        Some(match c {
            '(' => Bracket::RoundOpen,
            ')' => Bracket::RoundClose,
            '[' => Bracket::SquareOpen,
            ']' => Bracket::SquareClose,
            '{' => Bracket::CurlyOpen,
            '}' => Bracket::CurlyClose,
            _ => return None,
        })
    }

    pub fn as_char(self) -> char {
        match self {
            Bracket::RoundOpen => '(',
            Bracket::RoundClose => ')',
            Bracket::SquareOpen => '[',
            Bracket::SquareClose => ']',
            Bracket::CurlyOpen => '{',
            Bracket::CurlyClose => '}',
        }
    }

    pub fn is_open(self) -> bool {
        matches!(self, Bracket::RoundOpen | Bracket::SquareOpen | Bracket::CurlyOpen)
    }

    /// True when `self` opens and `close` closes the same bracket type.
    pub fn matches(self, close: Bracket) -> bool {
        matches!(
            (self, close),
            (Bracket::RoundOpen, Bracket::RoundClose)
                | (Bracket::SquareOpen, Bracket::SquareClose)
                | (Bracket::CurlyOpen, Bracket::CurlyClose)
        )
    }

    /// Parses a whitespace/comma separated symbol list such as `") [ { }"`.
    pub fn parse_list(text: &str) -> Result<Vec<Bracket>, char> {
        text.chars()
            .filter(|c| !c.is_whitespace() && *c != ',' && *c != '\'')
            .map(|c| Bracket::from_char(c).ok_or(c))
            .collect()
    }

    /// Space-separated rendering, `) [ {`.
    pub fn join(symbols: &[Bracket]) -> String {
        let mut out = String::new();
        for (k, b) in symbols.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            out.push(b.as_char());
        }
        out
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl Serialize for Bracket {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut buf = [0u8; 4];
        serializer.serialize_str(self.as_char().encode_utf8(&mut buf))
    }
}

impl<'de> Deserialize<'de> for Bracket {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Bracket::from_char(c)
                .ok_or_else(|| serde::de::Error::custom(alloc::format!("unknown bracket symbol `{c}`"))),
            _ => Err(serde::de::Error::custom(alloc::format!("expected one bracket symbol, got `{s}`"))),
        }
    }
}

/// Task-specific input payload. The JSON shape is distinguished by field names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaskInput {
    Sequence { seq: Vec<i64> },
    Letters { s: String },
    Brackets { symbols: Vec<Bracket> },
    Pair { s1: String, s2: String },
    Puzzle(DeductionPuzzle),
}

impl TaskInput {
    pub fn task(&self) -> TaskKind {
        match self {
            TaskInput::Sequence { .. } => TaskKind::BubbleSort,
            TaskInput::Letters { .. } => TaskKind::LongestSubstring,
            TaskInput::Brackets { .. } => TaskKind::ValidParentheses,
            TaskInput::Pair { .. } => TaskKind::Lcs,
            TaskInput::Puzzle(_) => TaskKind::LogicalDeduction,
        }
    }

    pub fn sequence(seq: impl Into<Vec<i64>>) -> Self {
        TaskInput::Sequence { seq: seq.into() }
    }

    pub fn letters(s: impl Into<String>) -> Self {
        TaskInput::Letters { s: s.into() }
    }

    pub fn pair(s1: impl Into<String>, s2: impl Into<String>) -> Self {
        TaskInput::Pair { s1: s1.into(), s2: s2.into() }
    }

    pub fn brackets(symbols: impl Into<Vec<Bracket>>) -> Self {
        TaskInput::Brackets { symbols: symbols.into() }
    }
}

/// Ground-truth answer for one problem.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum AnswerValue {
    SwapCount(u64),
    Length(u64),
    Validity(bool),
    ItemChoice(String),
    LcsLength(u64),
}

impl AnswerValue {
    pub fn kind(&self) -> &'static str {
        match self {
            AnswerValue::SwapCount(_) => "swap_count",
            AnswerValue::Length(_) => "length",
            AnswerValue::Validity(_) => "validity",
            AnswerValue::ItemChoice(_) => "item_choice",
            AnswerValue::LcsLength(_) => "lcs_length",
        }
    }

    /// Key used when voting or counting answer frequencies; item choices are normalized.
    pub fn canonical(&self) -> AnswerValue {
        match self {
            AnswerValue::ItemChoice(s) => AnswerValue::ItemChoice(normalize_item(s)),
            other => other.clone(),
        }
    }
}

impl fmt::Display for AnswerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnswerValue::SwapCount(n) | AnswerValue::Length(n) | AnswerValue::LcsLength(n) => write!(f, "{n}"),
            AnswerValue::Validity(true) => f.write_str("valid"),
            AnswerValue::Validity(false) => f.write_str("invalid"),
            AnswerValue::ItemChoice(s) => f.write_str(s),
        }
    }
}

/// Lowercase, trim, and drop a leading article.
pub fn normalize_item(s: &str) -> String {
    let lower = s.trim().trim_end_matches('.').trim().to_lowercase();
    for article in ["the ", "a ", "an "] {
        if let Some(rest) = lower.strip_prefix(article) {
            return rest.trim().to_string();
        }
    }
    lower
}

/// Same tag and equal payload; item choices compare after normalization.
pub fn answers_equal(a: &AnswerValue, b: &AnswerValue) -> bool {
    match (a, b) {
        (AnswerValue::SwapCount(x), AnswerValue::SwapCount(y)) => x == y,
        (AnswerValue::Length(x), AnswerValue::Length(y)) => x == y,
        (AnswerValue::LcsLength(x), AnswerValue::LcsLength(y)) => x == y,
        (AnswerValue::Validity(x), AnswerValue::Validity(y)) => x == y,
        (AnswerValue::ItemChoice(x), AnswerValue::ItemChoice(y)) => normalize_item(x) == normalize_item(y),
        _ => false,
    }
}

/// One dataset row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub id: String,
    pub task: TaskKind,
    pub input: TaskInput,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<AnswerValue>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("instance `{id}`: input payload is a {found} input but task is {task}")]
    PayloadMismatch { id: String, task: TaskKind, found: TaskKind },
    #[error("duplicate instance id `{0}`")]
    DuplicateId(String),
}

impl ProblemInstance {
    pub fn new(id: impl Into<String>, input: TaskInput, target: Option<AnswerValue>) -> Self {
        let task = input.task();
        ProblemInstance { id: id.into(), task, input, target }
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let found = self.input.task();
        if found != self.task {
            return Err(InstanceError::PayloadMismatch { id: self.id.clone(), task: self.task, found });
        }
        Ok(())
    }
}

/// Checks payload kinds and id uniqueness for a whole dataset.
pub fn validate_dataset(rows: &[ProblemInstance]) -> Result<(), InstanceError> {
    let mut seen = alloc::collections::BTreeSet::new();
    for row in rows {
        row.validate()?;
        if !seen.insert(row.id.as_str()) {
            return Err(InstanceError::DuplicateId(row.id.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinishReason {
    StopSequence,
    NaturalEnd,
    BudgetExhausted,
}

/// Top-k candidates for one generated token.
pub type TopLogprobs = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEvent {
    pub call_index: u32,
    pub context_length_chars: usize,
    pub stop_sequences: Vec<String>,
    pub generated_text: String,
    pub finish_reason: FinishReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logprobs: Option<Vec<TopLogprobs>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[derive(Default)]
pub enum BackendKind {
    Http {
        model: String,
    },
    #[default]
    Mock,
    Corrupt {
        p: f64,
    },
    Replay {
        store: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub backend: BackendKind,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Upper bound on backend calls for one item; `None` derives a bound from the instance size.
    pub max_calls: Option<u32>,
    /// Replaces the prompt's own stop sequences in plain mode.
    pub stop_sequences: Option<Vec<String>>,
    pub seed: u64,
    /// Keep the narration that leads up to the last state block when rebuilding skip contexts.
    pub retain_narration: bool,
    /// Consecutive identical state blocks that abort a skip run.
    pub livelock_repeats: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: BackendKind::Mock,
            temperature: 0.0,
            max_tokens: 2048,
            max_calls: None,
            stop_sequences: None,
            seed: 0,
            retain_narration: false,
            livelock_repeats: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("temperature must be >= 0, got {0}")]
    NegativeTemperature(f64),
    #[error("max_calls must be >= 1")]
    ZeroCalls,
    #[error("max_tokens must be >= 1")]
    ZeroTokens,
    #[error("corruption probability must lie in [0, 1], got {0}")]
    BadProbability(f64),
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(ConfigError::NegativeTemperature(self.temperature));
        }
        if self.max_calls == Some(0) {
            return Err(ConfigError::ZeroCalls);
        }
        if self.max_tokens == 0 {
            return Err(ConfigError::ZeroTokens);
        }
        if let BackendKind::Corrupt { p } = self.backend {
            if !(0.0..=1.0).contains(&p) {
                return Err(ConfigError::BadProbability(p));
            }
        }
        Ok(())
    }

    /// Call budget for one instance: the explicit value, or four times an upper bound on
    /// the number of state blocks the instance's trace can contain.
    pub fn calls_for(&self, input: &TaskInput) -> u32 {
        self.max_calls.unwrap_or_else(|| default_max_calls(input))
    }
}

pub fn default_max_calls(input: &TaskInput) -> u32 {
    let states = match input {
        TaskInput::Sequence { seq } => seq.len() * (seq.len() + 1),
        TaskInput::Letters { s } => s.chars().count() + 1,
        TaskInput::Brackets { symbols } => symbols.len() + 1,
        TaskInput::Pair { s1, s2 } => s1.chars().count() * s2.chars().count() + 2,
        TaskInput::Puzzle(p) => p.items.len() * p.clues.len().max(1) * 4 + 2,
    };
    (4 * states.max(1)) as u32
}
