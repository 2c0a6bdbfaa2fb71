//! Seeded generation of labeled datasets.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{AnswerValue, Bracket, ProblemInstance, TaskInput, TaskKind};
use crate::oracles::{self, OracleError, DEFAULT_DEDUCTION_ITERS};
use crate::puzzle::{parse_puzzle, Clue, DeductionPuzzle, Vocab};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetParams {
    pub task: TaskKind,
    pub n: usize,
    /// Sequence length (Bubble, Lss), maximum string length (LCS, parentheses) or item
    /// count (deduction). `None` picks the task default.
    #[serde(default)]
    pub length: Option<usize>,
    #[serde(default)]
    pub alphabet: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DatasetError {
    #[error("unsatisfiable parameters: {0}")]
    UnsatisfiableParams(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl DatasetParams {
    pub fn new(task: TaskKind, n: usize, seed: u64) -> Self {
        DatasetParams { task, n, length: None, alphabet: None, seed }
    }

    pub fn length(&self) -> usize {
        self.length.unwrap_or(match self.task {
            TaskKind::BubbleSort => 5,
            TaskKind::LongestSubstring => 7,
            TaskKind::Lcs => 6,
            TaskKind::ValidParentheses => 20,
            TaskKind::LogicalDeduction => 5,
        })
    }

    pub fn alphabet(&self) -> Vec<char> {
        let default = match self.task {
            TaskKind::LongestSubstring => "abcde",
            TaskKind::Lcs => "ABCD",
            TaskKind::BubbleSort => "0123456789",
            TaskKind::ValidParentheses => "()[]{}",
            TaskKind::LogicalDeduction => "",
        };
        let mut out: Vec<char> = self.alphabet.as_deref().unwrap_or(default).chars().collect();
        out.dedup();
        out
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let bad = |m: String| Err(DatasetError::UnsatisfiableParams(m));
        let len = self.length();
        match self.task {
            TaskKind::BubbleSort if len == 0 || len > 10 => bad(format!("{len} distinct digits")),
            TaskKind::LongestSubstring | TaskKind::Lcs if self.alphabet().is_empty() => bad("empty alphabet".into()),
            TaskKind::LongestSubstring if self.alphabet().iter().any(|c| !c.is_ascii_alphanumeric()) => {
                bad("letters must be ASCII alphanumeric".into())
            }
            TaskKind::Lcs if len == 0 => bad("LCS strings need length >= 1".into()),
            TaskKind::LogicalDeduction if !(2..=7).contains(&len) => bad(format!("{len} puzzle items")),
            _ => Ok(()),
        }
    }
}

/// Ground truth for any input.
pub fn oracle_answer(input: &TaskInput) -> Result<AnswerValue, OracleError> {
    Ok(match input {
        TaskInput::Sequence { seq } => AnswerValue::SwapCount(oracles::bubble_sort_oracle(seq)?.1),
        TaskInput::Letters { s } => AnswerValue::Length(oracles::longest_unique_substring(s)),
        TaskInput::Brackets { symbols } => AnswerValue::Validity(oracles::validate_parentheses(symbols)),
        TaskInput::Pair { s1, s2 } => AnswerValue::LcsLength(oracles::lcs_table(s1, s2).length()),
        TaskInput::Puzzle(p) => {
            let a = oracles::deduction_bruteforce(p)?;
            let item = a.item_with(p.question).ok_or(OracleError::Unsatisfiable)?;
            AnswerValue::ItemChoice(item.to_string())
        }
    })
}

pub fn generate_dataset(params: &DatasetParams) -> Result<Vec<ProblemInstance>, DatasetError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut out = Vec::with_capacity(params.n);
    for k in 0..params.n {
        let input = sample_input(params, k, &mut rng)?;
        let target = oracle_answer(&input)?;
        out.push(ProblemInstance::new(format!("{}-{}-{k:04}", params.task, params.seed), input, Some(target)));
    }
    Ok(out)
}

/// One input drawn from the task's distribution. `k` is the row index; parentheses rows
/// alternate between balanced and perturbed.
pub fn sample_input(params: &DatasetParams, k: usize, rng: &mut impl Rng) -> Result<TaskInput, DatasetError> {
    let len = params.length();
    let alphabet = params.alphabet();
    Ok(match params.task {
        TaskKind::BubbleSort => {
            let mut digits: Vec<i64> = (0..10).collect();
            digits.shuffle(rng);
            TaskInput::sequence(digits[..len].to_vec())
        }
        TaskKind::LongestSubstring => {
            TaskInput::letters((0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect::<String>())
        }
        TaskKind::Lcs => {
            let word = |rng: &mut dyn rand::RngCore| {
                let l = rng.random_range(1..=len);
                (0..l).map(|_| alphabet[rng.random_range(0..alphabet.len())]).collect::<String>()
            };
            let s1 = word(rng);
            TaskInput::pair(s1, word(rng))
        }
        TaskKind::ValidParentheses => {
            if k.is_multiple_of(2) {
                TaskInput::brackets(balanced(len, rng))
            } else {
                TaskInput::brackets(perturbed(len, rng))
            }
        }
        TaskKind::LogicalDeduction => TaskInput::Puzzle(sample_puzzle(len, rng)?),
    })
}

const OPENS: [Bracket; 3] = [Bracket::RoundOpen, Bracket::SquareOpen, Bracket::CurlyOpen];

fn closer(open: Bracket) -> Bracket {
    match open {
        Bracket::RoundOpen => Bracket::RoundClose,
        Bracket::SquareOpen => Bracket::SquareClose,
        _ => Bracket::CurlyClose,
    }
}

/// A balanced string of even length in `2..=max_len`, built by random nesting.
fn balanced(max_len: usize, rng: &mut impl Rng) -> Vec<Bracket> {
    let pairs = if max_len < 2 { 0 } else { rng.random_range(1..=max_len / 2) };
    let mut out = Vec::with_capacity(pairs * 2);
    let mut open: Vec<Bracket> = Vec::new();
    let mut left = pairs;
    while left > 0 || !open.is_empty() {
        let push = left > 0 && (open.is_empty() || rng.random_bool(0.5));
        if push {
            let b = OPENS[rng.random_range(0..3)];
            out.push(b);
            open.push(b);
            left -= 1;
        } else if let Some(b) = open.pop() {
            out.push(closer(b));
        }
    }
    out
}

fn any_bracket(rng: &mut impl Rng) -> Bracket {
    let all = [
        Bracket::RoundOpen,
        Bracket::RoundClose,
        Bracket::SquareOpen,
        Bracket::SquareClose,
        Bracket::CurlyOpen,
        Bracket::CurlyClose,
    ];
    all[rng.random_range(0..all.len())]
}

/// A balanced string with one random replacement, swap or deletion. The result may still
/// be valid; targets come from the oracle.
fn perturbed(max_len: usize, rng: &mut impl Rng) -> Vec<Bracket> {
    let mut s = balanced(max_len, rng);
    if s.is_empty() {
        s.push(any_bracket(rng));
        return s;
    }
    let at = rng.random_range(0..s.len());
    match rng.random_range(0..3) {
        0 => s[at] = any_bracket(rng),
        1 if s.len() > 1 => {
            let other = rng.random_range(0..s.len());
            s.swap(at, other);
        }
        _ => {
            s.remove(at);
        }
    }
    s
}

/// Items available for each vocabulary; lowercase so parsed prose maps back exactly.
fn item_pool(vocab: Vocab) -> &'static [&'static str] {
    match vocab {
        Vocab::Size => &["obj1", "obj2", "obj3", "obj4", "obj5", "obj6", "obj7"],
        Vocab::Position => {
            &["gray book", "red book", "blue book", "black book", "green book", "white book", "orange book"]
        }
        Vocab::Price => &["kiwis", "pears", "peaches", "apples", "plums", "mangoes", "loquats"],
        Vocab::Age => &["truck", "sedan", "bus", "tractor", "limousine", "minivan", "convertible"],
        Vocab::Finish => &["ana", "eve", "rob", "mel", "joe", "amy", "dan"],
    }
}

const PUZZLE_ATTEMPTS: usize = 1000;

fn random_clue(items: &[String], scores: &[usize], rng: &mut impl Rng) -> Clue {
    let n = items.len();
    let a = rng.random_range(0..n);
    if rng.random_range(0..3) == 0 {
        return Clue::Equal { item: items[a].clone(), rank: scores[a] };
    }
    let mut b = rng.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    if scores[a] < scores[b] {
        Clue::Less { a: items[a].clone(), b: items[b].clone() }
    } else {
        Clue::Greater { a: items[a].clone(), b: items[b].clone() }
    }
}

/// A uniquely solvable puzzle with `n` items whose true clues are added one at a time
/// until a single ordering remains. Only puzzles the iterative algorithm solves within its
/// pass limit are kept, and the prose must read back to the same puzzle.
pub fn sample_puzzle(n: usize, rng: &mut impl Rng) -> Result<DeductionPuzzle, DatasetError> {
    for _ in 0..PUZZLE_ATTEMPTS {
        let vocab = Vocab::all()[rng.random_range(0..Vocab::all().len())];
        let pool = item_pool(vocab);
        let mut items: Vec<String> = pool.iter().map(|s| s.to_string()).collect();
        items.shuffle(rng);
        items.truncate(n);
        let mut scores: Vec<usize> = (1..=n).collect();
        scores.shuffle(rng);
        let mut p = DeductionPuzzle { items, clues: Vec::new(), question: 1, vocab };
        let mut survivors = oracles::permutations(n);
        while survivors.len() > 1 && p.clues.len() < 4 * n {
            let clue = random_clue(&p.items, &scores, rng);
            if !p.clues.contains(&clue) {
                survivors.retain(|perm| clue.holds(|item| p.index_of(item).map(|k| perm[k])));
                p.clues.push(clue);
            }
        }
        if survivors.len() != 1 {
            continue;
        }
        if vocab == Vocab::Size {
            p.items = p.items_by_first_mention();
        }
        p.question = if rng.random_bool(0.5) { 1 } else { n };
        if rng.random_range(0..4) == 0 {
            p.question = rng.random_range(1..=n);
        }
        let solved = oracles::deduction_iterative(&p, DEFAULT_DEDUCTION_ITERS)?;
        if !solved.converged || !solved.satisfies(&p) {
            continue;
        }
        if parse_puzzle(&p.prose(), &p.question_text()).ok().as_ref() != Some(&p) {
            continue;
        }
        return Ok(p);
    }
    Err(DatasetError::UnsatisfiableParams(format!("no convergent {n}-item puzzle found")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_dataset;

    #[test]
    fn bubble_rows_are_distinct_digits() {
        let rows = generate_dataset(&DatasetParams::new(TaskKind::BubbleSort, 20, 0)).unwrap();
        assert_eq!(rows.len(), 20);
        validate_dataset(&rows).unwrap();
        for r in &rows {
            let TaskInput::Sequence { seq } = &r.input else { panic!() };
            let mut s = seq.clone();
            s.sort();
            s.dedup();
            assert_eq!(s.len(), 5);
        }
        assert_eq!(rows[3].id, "bubble_sort-0-0003");
    }

    #[test]
    fn same_seed_same_rows() {
        for task in TaskKind::ALL {
            let p = DatasetParams::new(task, 6, 11);
            assert_eq!(generate_dataset(&p).unwrap(), generate_dataset(&p).unwrap());
        }
    }

    #[test]
    fn parentheses_mix_valid_and_invalid() {
        let rows = generate_dataset(&DatasetParams::new(TaskKind::ValidParentheses, 40, 0)).unwrap();
        let valid = rows.iter().filter(|r| r.target == Some(AnswerValue::Validity(true))).count();
        assert!((20..40).contains(&valid), "{valid}");
        for r in rows.iter().step_by(2) {
            assert_eq!(r.target, Some(AnswerValue::Validity(true)));
        }
    }

    #[test]
    fn puzzles_are_unique_and_readable() {
        let rows = generate_dataset(&DatasetParams::new(TaskKind::LogicalDeduction, 10, 0)).unwrap();
        for r in rows {
            let TaskInput::Puzzle(p) = &r.input else { panic!() };
            assert_eq!(oracles::count_solutions(p), 1);
            assert_eq!(p.n(), 5);
        }
    }

    #[test]
    fn bad_params() {
        let mut p = DatasetParams::new(TaskKind::BubbleSort, 1, 0);
        p.length = Some(11);
        assert!(matches!(generate_dataset(&p), Err(DatasetError::UnsatisfiableParams(_))));
        let mut p = DatasetParams::new(TaskKind::Lcs, 1, 0);
        p.alphabet = Some(String::new());
        assert!(generate_dataset(&p).is_err());
    }
}
