//! Ground-truth implementations of every algorithm the prompts ask a model to execute.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::Bracket;
use crate::puzzle::{Clue, DeductionPuzzle, PuzzleError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("input sequence is empty")]
    EmptyInput,
    #[error("unknown bracket symbol `{0}`")]
    UnknownSymbol(char),
    #[error("puzzle has no satisfying ordering")]
    Unsatisfiable,
    #[error("puzzle has {0} satisfying orderings")]
    Ambiguous(usize),
    #[error(transparent)]
    Puzzle(#[from] PuzzleError),
}

/// Sorted copy plus the number of adjacent swaps bubble sort performs.
pub fn bubble_sort_oracle(seq: &[i64]) -> Result<(Vec<i64>, u64), OracleError> {
    if seq.is_empty() {
        return Err(OracleError::EmptyInput);
    }
    let mut a = seq.to_vec();
    let mut swaps = 0u64;
    let mut swapped = true;
    while swapped {
        swapped = false;
        for i in 0..a.len() - 1 {
            if a[i] > a[i + 1] {
                a.swap(i, i + 1);
                swaps += 1;
                swapped = true;
            }
        }
    }
    Ok((a, swaps))
}

/// Sliding window over last-seen indices.
pub fn longest_unique_substring(s: &str) -> u64 {
    let mut last: Vec<(char, usize)> = Vec::new();
    let (mut st_ind, mut m_len) = (1usize, 0usize);
    for (k, c) in s.chars().enumerate() {
        let i = k + 1;
        match last.iter_mut().find(|(l, _)| *l == c) {
            Some(entry) => {
                if entry.1 > 0 {
                    st_ind = st_ind.max(entry.1 + 1);
                }
                entry.1 = i;
            }
            None => last.push((c, i)),
        }
        m_len = m_len.max(i + 1 - st_ind);
    }
    m_len as u64
}

/// Dynamic-programming table for the longest common subsequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcsTable {
    pub a: Vec<char>,
    pub b: Vec<char>,
    cells: Vec<u64>,
}

impl LcsTable {
    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.cells[i * (self.n() + 1) + j]
    }

    pub fn length(&self) -> u64 {
        self.get(self.m(), self.n())
    }
}

pub fn lcs_table(s1: &str, s2: &str) -> LcsTable {
    let a: Vec<char> = s1.chars().collect();
    let b: Vec<char> = s2.chars().collect();
    let (m, n) = (a.len(), b.len());
    let mut cells = vec![0u64; (m + 1) * (n + 1)];
    for i in 1..=m {
        for j in 1..=n {
            cells[i * (n + 1) + j] = if a[i - 1] == b[j - 1] {
                cells[(i - 1) * (n + 1) + j - 1] + 1
            } else {
                cells[i * (n + 1) + j - 1].max(cells[(i - 1) * (n + 1) + j])
            };
        }
    }
    LcsTable { a, b, cells }
}

/// Push every symbol; pop the top two whenever they form an open-then-close pair.
pub fn validate_parentheses(symbols: &[Bracket]) -> bool {
    let mut stack: Vec<Bracket> = Vec::new();
    for &s in symbols {
        stack.push(s);
        if let [.., open, close] = stack[..] {
            if open.matches(close) {
                stack.truncate(stack.len() - 2);
            }
        }
    }
    stack.is_empty()
}

/// Same as [`validate_parentheses`] over raw characters.
pub fn validate_parentheses_str(text: &str) -> Result<bool, OracleError> {
    let symbols = Bracket::parse_list(text).map_err(OracleError::UnknownSymbol)?;
    Ok(validate_parentheses(&symbols))
}

/// Scores per item, in the puzzle's item order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeductionAssignment {
    pub scores: Vec<(String, usize)>,
    pub converged: bool,
    pub iterations_used: usize,
}

impl DeductionAssignment {
    pub fn score_of(&self, item: &str) -> Option<usize> {
        let key = crate::model::normalize_item(item);
        self.scores.iter().find(|(i, _)| crate::model::normalize_item(i) == key).map(|(_, s)| *s)
    }

    /// The item holding `rank`.
    pub fn item_with(&self, rank: usize) -> Option<&str> {
        self.scores.iter().find(|(_, s)| *s == rank).map(|(i, _)| i.as_str())
    }

    pub fn is_permutation(&self) -> bool {
        let n = self.scores.len();
        let set: BTreeSet<usize> = self.scores.iter().map(|(_, s)| *s).collect();
        set.len() == n && set.iter().all(|s| (1..=n).contains(s))
    }

    pub fn satisfies(&self, puzzle: &DeductionPuzzle) -> bool {
        puzzle.clues.iter().all(|c| c.holds(|item| self.score_of(item)))
    }
}

fn satisfies(puzzle: &DeductionPuzzle, scores: &[usize]) -> bool {
    puzzle.clues.iter().all(|c| c.holds(|item| puzzle.index_of(item).map(|k| scores[k])))
}

/// Every permutation of `1..=n`, in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (1..=n).collect();
    loop {
        out.push(p.clone());
        let Some(k) = (0..n.saturating_sub(1)).rev().find(|&k| p[k] < p[k + 1]) else {
            return out;
        };
        let l = (k + 1..n).rev().find(|&l| p[k] < p[l]).unwrap();
        p.swap(k, l);
        p[k + 1..].reverse();
    }
}

/// Number of score permutations satisfying every clue.
pub fn count_solutions(puzzle: &DeductionPuzzle) -> usize {
    permutations(puzzle.n()).iter().filter(|p| satisfies(puzzle, p)).count()
}

pub fn deduction_bruteforce(puzzle: &DeductionPuzzle) -> Result<DeductionAssignment, OracleError> {
    puzzle.validate()?;
    let solutions: Vec<Vec<usize>> = permutations(puzzle.n()).into_iter().filter(|p| satisfies(puzzle, p)).collect();
    match solutions.len() {
        0 => Err(OracleError::Unsatisfiable),
        1 => Ok(DeductionAssignment {
            scores: puzzle.items.iter().cloned().zip(solutions[0].iter().copied()).collect(),
            converged: true,
            iterations_used: 1,
        }),
        k => Err(OracleError::Ambiguous(k)),
    }
}

/// The rotate-by-one initial assignment `(2, 3, ..., N, 1)`.
pub fn rotated_initial(n: usize) -> Vec<usize> {
    (0..n).map(|k| (k + 1) % n + 1).collect()
}

/// One statement check of the iterative procedure: returns the swap it performs, if any,
/// as a pair of item indices.
pub fn deduction_swap_for(puzzle: &DeductionPuzzle, clue: &Clue, scores: &[usize]) -> Option<(usize, usize)> {
    let idx = |item: &str| puzzle.index_of(item).expect("validated puzzle");
    match clue {
        Clue::Equal { item, rank } => {
            let v = idx(item);
            if scores[v] == *rank {
                return None;
            }
            let holder = scores.iter().position(|s| s == rank)?;
            Some((v, holder))
        }
        Clue::Less { a, b } => {
            let (x, y) = (idx(a), idx(b));
            (scores[x] >= scores[y]).then_some((x, y))
        }
        Clue::Greater { a, b } => {
            let (x, y) = (idx(a), idx(b));
            (scores[x] <= scores[y]).then_some((x, y))
        }
    }
}

/// Iterative repair from a given initial assignment. A full pass with no swap converges.
pub fn deduction_iterative_from(
    puzzle: &DeductionPuzzle,
    initial: Vec<usize>,
    max_iters: usize,
) -> Result<DeductionAssignment, OracleError> {
    puzzle.validate()?;
    let mut scores = initial;
    let mut converged = false;
    let mut used = 0;
    for _ in 0..max_iters.max(1) {
        used += 1;
        let mut update = false;
        for clue in &puzzle.clues {
            if let Some((x, y)) = deduction_swap_for(puzzle, clue, &scores) {
                scores.swap(x, y);
                update = true;
            }
        }
        if !update {
            converged = true;
            break;
        }
    }
    Ok(DeductionAssignment {
        scores: puzzle.items.iter().cloned().zip(scores).collect(),
        converged,
        iterations_used: used,
    })
}

pub fn deduction_iterative(puzzle: &DeductionPuzzle, max_iters: usize) -> Result<DeductionAssignment, OracleError> {
    deduction_iterative_from(puzzle, rotated_initial(puzzle.n()), max_iters)
}

pub const DEFAULT_DEDUCTION_ITERS: usize = 4;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::puzzle::Vocab;
    use alloc::string::ToString;

    #[test]
    fn bubble_goldens() {
        assert_eq!(bubble_sort_oracle(&[2, 3, 1, 5]).unwrap(), (vec![1, 2, 3, 5], 2));
        assert_eq!(bubble_sort_oracle(&[0, 3, 8, 5, 6]).unwrap().1, 2);
        assert_eq!(bubble_sort_oracle(&[1, 2, 3]).unwrap().1, 0);
        assert_eq!(bubble_sort_oracle(&[3, 2, 1]).unwrap().1, 3);
        assert_eq!(bubble_sort_oracle(&[]), Err(OracleError::EmptyInput));
    }

    #[test]
    fn lss_goldens() {
        assert_eq!(longest_unique_substring("cbcabb"), 3);
        assert_eq!(longest_unique_substring(""), 0);
        assert_eq!(longest_unique_substring("pwwkepz"), 5);
    }

    #[test]
    fn lcs_goldens() {
        let t = lcs_table("TA", "ATA");
        assert_eq!(t.get(2, 3), 2);
        assert_eq!(t.get(1, 2), 1);
        assert_eq!(lcs_table("bccba", "ccaa").length(), 3);
        assert_eq!(lcs_table("aaca", "abab").length(), 2);
        assert_eq!(lcs_table("abc", "").length(), 0);
    }

    #[test]
    fn paren_goldens() {
        assert_eq!(validate_parentheses_str(") [ { } ] ( { } ) [ ( { } ) ] } {"), Ok(false));
        assert_eq!(validate_parentheses_str("[ ]"), Ok(true));
        assert_eq!(validate_parentheses_str("( [ ) ]"), Ok(false));
        assert_eq!(validate_parentheses_str("( x )"), Err(OracleError::UnknownSymbol('x')));
    }

    #[test]
    fn exemplar_puzzle() {
        let p = DeductionPuzzle::exemplar();
        let a = deduction_bruteforce(&p).unwrap();
        assert_eq!(a.scores.iter().map(|(_, s)| *s).collect::<Vec<_>>(), [3, 1, 2]);
        assert_eq!(a.item_with(3), Some("obj1"));
        let it = deduction_iterative_from(&p, vec![2, 3, 1], 4).unwrap();
        assert!(it.converged);
        assert_eq!(it.iterations_used, 2);
        assert_eq!(it.scores, a.scores);
    }

    #[test]
    fn single_item() {
        let p = DeductionPuzzle { items: vec!["solo".to_string()], clues: vec![], question: 1, vocab: Vocab::Size };
        assert_eq!(deduction_bruteforce(&p).unwrap().scores, vec![("solo".to_string(), 1)]);
    }

    #[test]
    fn rotation() {
        assert_eq!(rotated_initial(3), [2, 3, 1]);
        assert_eq!(rotated_initial(1), [1]);
        assert_eq!(permutations(3).len(), 6);
    }

    #[test]
    fn satisfied_initial_converges_in_one_pass() {
        let p = DeductionPuzzle::exemplar();
        let it = deduction_iterative_from(&p, vec![3, 1, 2], 4).unwrap();
        assert!(it.converged);
        assert_eq!(it.iterations_used, 1);
    }
}
