use std::collections::HashMap;

use irsa_core::backend::{Backend, CompletionRequest, CorruptMock, ObedientMock};
use irsa_core::eval::{ensemble_vote, guessing_baseline};
use irsa_core::model::{AnswerValue, Bracket, ProblemInstance, RunConfig, TaskInput};
use irsa_core::oracles::{bubble_sort_oracle, deduction_iterative, lcs_table, validate_parentheses};
use irsa_core::prompt::{append_problem, build_single_path_prompt, default_exemplar};
use irsa_core::puzzle::{Clue, DeductionPuzzle, Vocab};
use irsa_core::runtime::{max_block_len, run_plain, run_skip};
use irsa_core::trace::{parse_state_block, render_trace, segments, TraceStyle};
use proptest::prelude::*;

const BRACKETS: [Bracket; 6] = [
    Bracket::RoundOpen,
    Bracket::RoundClose,
    Bracket::SquareOpen,
    Bracket::SquareClose,
    Bracket::CurlyOpen,
    Bracket::CurlyClose,
];

fn matcher(symbols: &[Bracket]) -> bool {
    let mut stack = Vec::new();
    for &b in symbols {
        if b.is_open() {
            stack.push(b);
        } else if !stack.pop().is_some_and(|o: Bracket| o.matches(b)) {
            return false;
        }
    }
    stack.is_empty()
}

fn lcs_memo(a: &[u8], b: &[u8], memo: &mut HashMap<(usize, usize), u64>) -> u64 {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let key = (a.len(), b.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let v = if a[a.len() - 1] == b[b.len() - 1] {
        lcs_memo(&a[..a.len() - 1], &b[..b.len() - 1], memo) + 1
    } else {
        lcs_memo(&a[..a.len() - 1], b, memo).max(lcs_memo(a, &b[..b.len() - 1], memo))
    };
    memo.insert(key, v);
    v
}

fn inversions(seq: &[i64]) -> u64 {
    let mut n = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            n += u64::from(seq[i] > seq[j]);
        }
    }
    n
}

fn brackets() -> impl Strategy<Value = Vec<Bracket>> {
    prop::collection::vec(prop::sample::select(BRACKETS.to_vec()), 0..24)
}

fn distinct_digits(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    (Just((0..10).collect::<Vec<i64>>()).prop_shuffle(), 1..=max_len).prop_map(|(v, n)| v[..n].to_vec())
}

fn word(alphabet: &'static str, len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = String> {
    let chars: Vec<char> = alphabet.chars().collect();
    prop::collection::vec(prop::sample::select(chars), len).prop_map(|v| v.into_iter().collect())
}

/// A puzzle whose clues all hold under a hidden ordering; not necessarily uniquely solvable.
fn puzzle() -> impl Strategy<Value = DeductionPuzzle> {
    (3usize..=5)
        .prop_flat_map(|n| {
            let order = Just((1..=n).collect::<Vec<usize>>()).prop_shuffle();
            let picks = prop::collection::vec((0..n, 0..n, 0u8..3), 1..7);
            (Just(n), order, picks)
        })
        .prop_map(|(n, scores, picks)| {
            let items: Vec<String> = (1..=n).map(|k| format!("obj{k}")).collect();
            let clues = picks
                .into_iter()
                .filter_map(|(x, y, kind)| match kind {
                    0 => Some(Clue::Equal { item: items[x].clone(), rank: scores[x] }),
                    _ if x == y => None,
                    1 if scores[x] < scores[y] => Some(Clue::Less { a: items[x].clone(), b: items[y].clone() }),
                    _ if scores[x] > scores[y] => Some(Clue::Greater { a: items[x].clone(), b: items[y].clone() }),
                    _ => Some(Clue::Less { a: items[x].clone(), b: items[y].clone() }),
                })
                .collect();
            DeductionPuzzle { items, clues, question: 1, vocab: Vocab::Size }
        })
}

fn skip_input() -> impl Strategy<Value = (TaskInput, TraceStyle)> {
    prop_oneof![
        distinct_digits(5).prop_map(|s| (TaskInput::sequence(s), TraceStyle::BubbleV2)),
        word("abcde", 1..=7).prop_map(|s| (TaskInput::letters(s), TraceStyle::Lss)),
        brackets().prop_map(|b| (TaskInput::brackets(b), TraceStyle::Paren)),
        (word("ABCD", 1..=4), word("ABCD", 1..=4)).prop_map(|(a, b)| (TaskInput::pair(a, b), TraceStyle::DslExec)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parentheses_match_stack_matcher(symbols in brackets()) {
        prop_assert_eq!(validate_parentheses(&symbols), matcher(&symbols));
    }

    #[test]
    fn lcs_matches_recursion(a in word("ABC", 0..=8), b in word("ABC", 0..=8)) {
        let want = lcs_memo(a.as_bytes(), b.as_bytes(), &mut HashMap::new());
        prop_assert_eq!(lcs_table(&a, &b).length(), want);
    }

    #[test]
    fn swaps_are_inversions(seq in prop::collection::vec(-50i64..50, 1..12)) {
        let (sorted, swaps) = bubble_sort_oracle(&seq).unwrap();
        prop_assert_eq!(swaps, inversions(&seq));
        prop_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn converged_deduction_satisfies_clues(p in puzzle()) {
        let a = deduction_iterative(&p, 4).unwrap();
        prop_assert!(a.is_permutation());
        if a.converged {
            prop_assert!(a.satisfies(&p));
        }
    }

    #[test]
    fn trace_answer_is_oracle((input, style) in skip_input()) {
        let (_, answer) = render_trace(&input, style).unwrap();
        let want = match &input {
            TaskInput::Sequence { seq } => AnswerValue::SwapCount(inversions(seq)),
            TaskInput::Letters { s } => AnswerValue::Length(irsa_core::oracles::longest_unique_substring(s)),
            TaskInput::Brackets { symbols } => AnswerValue::Validity(matcher(symbols)),
            TaskInput::Pair { s1, s2 } => AnswerValue::LcsLength(lcs_memo(s1.as_bytes(), s2.as_bytes(), &mut HashMap::new())),
            TaskInput::Puzzle(_) => unreachable!(),
        };
        prop_assert_eq!(answer, want);
    }

    #[test]
    fn blocks_round_trip((input, style) in skip_input()) {
        for seg in segments(&input, style).unwrap() {
            if let Some(state) = &seg.state {
                prop_assert_eq!(&parse_state_block(&state.render(), style).unwrap(), state);
            }
        }
    }

    #[test]
    fn ensemble_returns_an_input(votes in prop::collection::vec(prop::option::of(0u64..4), 1..8)) {
        let answers: Vec<Option<AnswerValue>> = votes.iter().map(|v| v.map(AnswerValue::SwapCount)).collect();
        match ensemble_vote(&answers) {
            Some(a) => prop_assert!(answers.contains(&Some(a))),
            None => prop_assert!(answers.iter().all(Option::is_none)),
        }
    }

    #[test]
    fn guessing_at_least_uniform(targets in prop::collection::vec(0u64..5, 1..30)) {
        let rows: Vec<ProblemInstance> = targets
            .iter()
            .enumerate()
            .map(|(k, &t)| ProblemInstance::new(format!("r{k}"), TaskInput::sequence([1]), Some(AnswerValue::SwapCount(t))))
            .collect();
        let distinct = targets.iter().collect::<std::collections::BTreeSet<_>>().len();
        prop_assert!(guessing_baseline(&rows).unwrap() >= 1.0 / distinct as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn skip_agrees_with_plain((input, style) in skip_input()) {
        let spec = build_single_path_prompt(input.task(), &default_exemplar(style), style).unwrap();
        let ctx = append_problem(&spec, &ProblemInstance::new("p", input.clone(), None)).unwrap();
        let cfg = RunConfig::default();
        let plain = run_plain(&ObedientMock, &ctx, &spec, Some(&input), &cfg);
        let skip = run_skip(&ObedientMock, &ctx, &spec, Some(&input), &cfg);
        prop_assert_eq!(&plain.answer, &skip.answer);
        prop_assert_eq!(plain.answer, Some(render_trace(&input, style).unwrap().1));
        let bound = ctx.len() + max_block_len(&input, style).unwrap() + 64;
        prop_assert!(skip.transcript.iter().all(|e| e.context_length_chars <= bound));
    }

    #[test]
    fn zero_corruption_is_obedient((input, style) in skip_input(), seed in any::<u64>()) {
        let spec = build_single_path_prompt(input.task(), &default_exemplar(style), style).unwrap();
        let ctx = append_problem(&spec, &ProblemInstance::new("p", input.clone(), None)).unwrap();
        let req = CompletionRequest::new(ctx, spec.stop_sequences.clone(), 4096);
        prop_assert_eq!(CorruptMock::new(0.0, seed).complete(&req).unwrap(), ObedientMock.complete(&req).unwrap());
    }
}
