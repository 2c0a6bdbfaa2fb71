//! Baseline prompts: few-shot input/solution pairs with optional code, and the two
//! direct-request templates that ask for the answer between `<answer>` tags.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{AnswerPattern, PromptError, PromptKind, PromptSpec};
use crate::dataset::{generate_dataset, DatasetParams};
use crate::model::{AnswerValue, Bracket, TaskInput, TaskKind};
use crate::puzzle::parse_puzzle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineStyle {
    FewShot,
    /// Ask for the code and its output.
    AskExecute,
    /// Ask for the code and its execution with intermediate steps.
    AskSteps,
}

impl BaselineStyle {
    pub fn as_str(self) -> &'static str {
        match self {
            BaselineStyle::FewShot => "fewshot",
            BaselineStyle::AskExecute => "ask",
            BaselineStyle::AskSteps => "ask-steps",
        }
    }
}

const LSS_CODE: &str = "# Python3 program to find the length
# of the longest substring
# without repeating characters in string s
# the maximum length of such a substring will be returned in m_len

def longestUniqueSubsttr(s):
    # last index of every character
    last_idx = {}
    m_len = 0
    # starting index of current
    # window to calculate m_len
    start_idx = 0
    for i in range(0, len(s)):
        # Find the last index of str[i]
        # Update start_idx (starting index of current window)
        # as maximum of current value of start_idx and last
        # index plus 1
        if s[i] in last_idx:
            start_idx = max(start_idx, last_idx[s[i]] + 1)

        # Update result if we get a larger window
        m_len = max(m_len, i-start_idx + 1)
        # Update last index of current char.
        last_idx[s[i]] = i
    return m_len
";

const BUBBLE_CODE: &str = "# Python3 program to count the swaps
# bubble sort makes while sorting list a
# the number of swaps will be returned in n_swaps

def bubbleSortSwaps(a):
    n_swaps = 0
    swap_flag = True
    while swap_flag:
        swap_flag = False
        for i in range(0, len(a) - 1):
            if not a[i] < a[i + 1]:
                a[i], a[i + 1] = a[i + 1], a[i]
                n_swaps += 1
                swap_flag = True
    return n_swaps
";

const PAREN_CODE: &str = "# Python3 program to check whether
# a sequence of brackets is balanced
# the result is valid or invalid

def isValid(symbols):
    pairs = {')': '(', ']': '[', '}': '{'}
    stack = []
    for c in symbols:
        stack.append(c)
        if len(stack) > 1 and stack[-1] in pairs and stack[-2] == pairs[stack[-1]]:
            stack.pop()
            stack.pop()
    return 'valid' if not stack else 'invalid'
";

const LCS_CODE: &str = "# Python3 program to find the length
# of the longest common subsequence of s1 and s2
# the length will be returned in length

def lcs(s1, s2):
    m = len(s1)
    n = len(s2)
    C = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if s1[i - 1] == s2[j - 1]:
                C[i][j] = C[i - 1][j - 1] + 1
            else:
                C[i][j] = max(C[i][j - 1], C[i - 1][j])
    length = C[m][n]
    return length
";

const DEDUCTION_CODE: &str = "# Python3 program to order objects given
# statements about their relative order
# each object gets a score; statements are checked in turn
# and the scores of the involved objects are swapped when a statement is violated

def order(objects, statements, max_iters=4):
    score = {o: (k + 1) % len(objects) + 1 for k, o in enumerate(objects)}
    for _ in range(max_iters):
        update_flag = False
        for st in statements:
            if not st.holds(score):
                st.swap(score)
                update_flag = True
        if not update_flag:
            break
    return score
";

fn code(task: TaskKind) -> &'static str {
    match task {
        TaskKind::BubbleSort => BUBBLE_CODE,
        TaskKind::LongestSubstring => LSS_CODE,
        TaskKind::ValidParentheses => PAREN_CODE,
        TaskKind::Lcs => LCS_CODE,
        TaskKind::LogicalDeduction => DEDUCTION_CODE,
    }
}

fn description(task: TaskKind) -> &'static str {
    match task {
        TaskKind::BubbleSort => "counts the swaps bubble sort makes",
        TaskKind::LongestSubstring => "looks for the longest substring with non repeating characters",
        TaskKind::ValidParentheses => "checks whether a sequence of brackets is balanced",
        TaskKind::Lcs => "computes the length of the longest common subsequence",
        TaskKind::LogicalDeduction => "orders objects according to the given statements",
    }
}

fn format_lines(task: TaskKind) -> (&'static str, &'static str) {
    match task {
        TaskKind::BubbleSort => ("a = ...", "n_swaps= ..."),
        TaskKind::LongestSubstring => ("s = ...", "m_len= ..."),
        TaskKind::ValidParentheses => ("symbols = ...", "valid or invalid"),
        TaskKind::Lcs => ("s1 = ..., s2 = ...", "length= ..."),
        TaskKind::LogicalDeduction => ("...\nQuestion: ...", "..."),
    }
}

fn commas<T: ToString>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// The `Input:` payload of a few-shot example.
pub fn fewshot_input(input: &TaskInput) -> String {
    match input {
        TaskInput::Sequence { seq } => format!("a = {}", commas(seq)),
        TaskInput::Letters { s } => format!("s = {}", commas(s.chars())),
        TaskInput::Brackets { symbols } => format!("symbols = {}", Bracket::join(symbols)),
        TaskInput::Pair { s1, s2 } => format!("s1 = {s1}, s2 = {s2}"),
        TaskInput::Puzzle(p) => format!("{}\nQuestion: {}", p.prose(), p.question_text()),
    }
}

/// The answer as written after `The solution is: `.
pub fn solution_text(answer: &AnswerValue) -> String {
    match answer {
        AnswerValue::SwapCount(n) => format!("n_swaps={n}"),
        AnswerValue::Length(n) => format!("m_len={n}"),
        AnswerValue::Validity(v) => String::from(if *v { "valid" } else { "invalid" }),
        AnswerValue::LcsLength(n) => format!("length={n}"),
        AnswerValue::ItemChoice(s) => s.clone(),
    }
}

/// Reads a solution or tagged answer for `task`, with or without the variable name.
pub fn parse_solution(task: TaskKind, text: &str) -> Option<AnswerValue> {
    let text = text.trim().trim_end_matches('.');
    let value = match text.split_once('=') {
        Some((_, v)) if task != TaskKind::LogicalDeduction => v.trim(),
        _ => text,
    };
    let num = || value.parse::<u64>().ok();
    match task {
        TaskKind::BubbleSort => num().map(AnswerValue::SwapCount),
        TaskKind::LongestSubstring => num().map(AnswerValue::Length),
        TaskKind::Lcs => num().map(AnswerValue::LcsLength),
        TaskKind::ValidParentheses => match value.to_lowercase().as_str() {
            "valid" | "true" | "yes" | "balanced" => Some(AnswerValue::Validity(true)),
            "invalid" | "false" | "no" | "unbalanced" => Some(AnswerValue::Validity(false)),
            _ => None,
        },
        TaskKind::LogicalDeduction => (!value.is_empty()).then(|| AnswerValue::ItemChoice(value.to_string())),
    }
}

/// Input lines of the direct-request templates.
pub fn ask_input(input: &TaskInput) -> String {
    match input {
        TaskInput::Sequence { seq } => format!("a={}", commas(seq)),
        TaskInput::Letters { s } => format!("s={s}"),
        TaskInput::Brackets { symbols } => format!("symbols={}", Bracket::join(symbols)),
        TaskInput::Pair { s1, s2 } => format!("s1={s1}\ns2={s2}"),
        TaskInput::Puzzle(p) => format!("{}\n{}", p.prose(), p.question_text()),
    }
}

/// Inverse of [`ask_input`] and [`fewshot_input`] for a known task.
pub fn parse_input(task: TaskKind, text: &str) -> Option<TaskInput> {
    let text = text.trim();
    let field = |name: &str| -> Option<String> {
        text.lines().find_map(|l| {
            let l = l.trim();
            let rest = l.strip_prefix(name)?.trim_start().strip_prefix('=')?;
            Some(rest.trim().to_string())
        })
    };
    match task {
        TaskKind::BubbleSort => {
            let v = field("a")?;
            let seq: Result<Vec<i64>, _> = v.split(',').map(|t| t.trim().parse()).collect();
            seq.ok().map(TaskInput::sequence)
        }
        TaskKind::LongestSubstring => {
            let v = field("s")?;
            Some(TaskInput::letters(v.chars().filter(|c| !c.is_whitespace() && *c != ',').collect::<String>()))
        }
        TaskKind::ValidParentheses => Bracket::parse_list(&field("symbols")?).ok().map(TaskInput::brackets),
        TaskKind::Lcs => {
            // either `s1 = X, s2 = Y` on one line or `s1=X` / `s2=Y` on two
            let one_line = text.lines().find(|l| l.contains("s1") && l.contains("s2"));
            let (s1, s2) = match one_line {
                Some(l) => {
                    let (a, b) = l.split_once(',')?;
                    let pick = |t: &str| t.split_once('=').map(|(_, v)| v.trim().to_string());
                    (pick(a)?, pick(b)?)
                }
                None => (field("s1")?, field("s2")?),
            };
            Some(TaskInput::pair(s1, s2))
        }
        TaskKind::LogicalDeduction => {
            let mut lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
            let q = lines.pop()?;
            let q = q.strip_prefix("Question:").unwrap_or(q).trim();
            let prose = lines.join(" ");
            parse_puzzle(&prose, q).ok().map(TaskInput::Puzzle)
        }
    }
}

fn ask_head(task: TaskKind) -> &'static str {
    match task {
        TaskKind::BubbleSort => "We need to compute the number of swaps bubble sort makes when sorting the sequence",
        TaskKind::LongestSubstring => {
            "We need to compute the length of the longest substring without repeating characters for the string"
        }
        TaskKind::ValidParentheses => {
            "We need to determine whether the sequence of brackets is balanced for the sequence"
        }
        TaskKind::Lcs => "We need to compute the longest common subsequence for two sequences",
        TaskKind::LogicalDeduction => "We need to solve the following ordering puzzle",
    }
}

fn ask_tail(task: TaskKind, steps: bool) -> String {
    let (algorithm, output) = match task {
        TaskKind::BubbleSort => ("the bubble sort algorithm", "the number of swaps"),
        TaskKind::LongestSubstring => ("the sliding window algorithm", "the length of the longest substring"),
        TaskKind::ValidParentheses => ("a stack-based algorithm", "valid or invalid"),
        TaskKind::Lcs => ("the dynamic programming algorithm", "the length of the longest common subsequence"),
        TaskKind::LogicalDeduction => ("an iterative scoring algorithm", "the name of the answer"),
    };
    let how = if steps {
        "Show the python code for the algorithm, and then write down its\nexecution with intermediate steps. Finally, output"
    } else {
        "Show the python code for the algorithm, and then execute it. Finally,\noutput"
    };
    format!("using {algorithm}. {how} {output} bracketed with <answer> and </answer>.\n")
}

/// The problem text a baseline prompt appends for `input`.
pub fn problem_lines(style: BaselineStyle, input: &TaskInput) -> String {
    match style {
        BaselineStyle::FewShot => format!("Input: {}\nSTART\n", fewshot_input(input)),
        BaselineStyle::AskExecute | BaselineStyle::AskSteps => format!("{}\n\n", ask_input(input)),
    }
}

fn example(input: &TaskInput, answer: &AnswerValue) -> String {
    format!("{}The solution is: {}\nEND\n\n", problem_lines(BaselineStyle::FewShot, input), solution_text(answer))
}

/// Few-shot exemplars come from a generated dataset at `seed`; deduction exemplars use the
/// same puzzle generator as evaluation sets.
pub fn build_baseline_prompt(
    task: TaskKind,
    k_shots: usize,
    include_code: bool,
    style: BaselineStyle,
    seed: u64,
) -> Result<PromptSpec, PromptError> {
    let kind = PromptKind::Baseline { style, k_shots, include_code, seed };
    let spec = match style {
        BaselineStyle::FewShot => {
            let mut text = String::new();
            if include_code {
                text.push_str(code(task));
                text.push('\n');
            }
            let subject = if include_code { "the algorithm above" } else { "an algorithm" };
            let (inp, sol) = format_lines(task);
            text.push_str(&format!(
                "What would {subject}, which {}\ncompute for a given problem? Use this format:\n\nInput: {inp}\nSTART\nThe solution is: {sol}\nEND\n\n",
                description(task)
            ));
            if k_shots > 0 {
                for row in generate_dataset(&DatasetParams::new(task, k_shots, seed))? {
                    if let Some(t) = &row.target {
                        text.push_str(&example(&row.input, t));
                    }
                }
            }
            PromptSpec {
                text,
                suffix: String::new(),
                task,
                kind,
                style: None,
                stop_sequences: alloc::vec![String::from("END")],
                answer_pattern: AnswerPattern::SolutionLine,
                problem_header: String::from("Input: {input}\nSTART\n"),
            }
        }
        BaselineStyle::AskExecute | BaselineStyle::AskSteps => PromptSpec {
            text: format!("{}\n\n", ask_head(task)),
            suffix: ask_tail(task, style == BaselineStyle::AskSteps),
            task,
            kind,
            style: None,
            stop_sequences: alloc::vec![String::from("</answer>")],
            answer_pattern: AnswerPattern::Tagged,
            problem_header: String::from("{input}\n\n"),
        },
    };
    Ok(spec)
}

/// Which baseline template a context ends with, and the input it asks about.
pub fn recognize(context: &str) -> Option<(BaselineStyle, TaskKind, TaskInput)> {
    let ask = TaskKind::ALL.iter().filter_map(|t| context.rfind(ask_head(*t)).map(|k| (k, *t))).max();
    let few = context.rfind("\nInput: ").map(|k| k + 1).or_else(|| context.starts_with("Input: ").then_some(0));
    if let Some((k, task)) = ask {
        if few.is_none_or(|f| f < k) {
            let rest = &context[k + ask_head(task).len()..];
            let body = rest.trim_start_matches('\n');
            let end = body.find("\nusing ").unwrap_or(body.len());
            let input = parse_input(task, &body[..end])?;
            let steps = context[k..].contains("intermediate steps");
            let style = if steps { BaselineStyle::AskSteps } else { BaselineStyle::AskExecute };
            return Some((style, task, input));
        }
    }
    let f = few?;
    let block = &context[f + "Input: ".len()..];
    let end = block.find("\nSTART")?;
    let payload = &block[..end];
    let task = fewshot_task(payload)?;
    Some((BaselineStyle::FewShot, task, parse_input(task, payload)?))
}

fn fewshot_task(payload: &str) -> Option<TaskKind> {
    let first = payload.lines().next()?.trim_start();
    Some(if first.starts_with("s1 ") || first.starts_with("s1=") {
        TaskKind::Lcs
    } else if first.starts_with("a =") || first.starts_with("a=") {
        TaskKind::BubbleSort
    } else if first.starts_with("s =") || first.starts_with("s=") {
        TaskKind::LongestSubstring
    } else if first.starts_with("symbols") {
        TaskKind::ValidParentheses
    } else if payload.contains("\nQuestion: ") {
        TaskKind::LogicalDeduction
    } else {
        return None;
    })
}
