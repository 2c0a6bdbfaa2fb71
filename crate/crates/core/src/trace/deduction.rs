//! Logical deduction traces: parsing, scoring, translation to variables, then iterative
//! statement checks that swap scores until a full pass changes nothing.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{blocks, join_lines, Segment, State, TraceError};
use crate::model::AnswerValue;
use crate::oracles::{deduction_swap_for, rotated_initial, DEFAULT_DEDUCTION_ITERS};
use crate::puzzle::{Clue, DeductionPuzzle, Vocab};

const IND: &str = "    ";
const VARS: [&str; 7] = ["x", "y", "z", "a", "b", "c", "d"];

/// One displayed score assignment, e.g. `Score_assignment_B: x=3, y=2, z=1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeductionState {
    pub label: String,
    pub vars: Vec<(String, usize)>,
}

/// Assignment labels: A..Z, then AA, AB, ...
pub fn label(k: usize) -> String {
    let mut k = k;
    let mut out = Vec::new();
    loop {
        out.push((b'A' + (k % 26) as u8) as char);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    out.iter().rev().collect()
}

fn values_line(vars: &[(String, usize)]) -> String {
    vars.iter().map(|(v, s)| format!("{v}={s}")).collect::<Vec<_>>().join(", ")
}

impl DeductionState {
    fn new(k: usize, scores: &[usize]) -> DeductionState {
        DeductionState {
            label: label(k),
            vars: VARS.iter().map(|v| v.to_string()).zip(scores.iter().copied()).collect(),
        }
    }

    pub fn render(&self) -> String {
        format!("Score_assignment_{}:\n{IND}{}", self.label, values_line(&self.vars))
    }

    /// Parses the span after `Score_assignment_`: the label, a colon, and the values line.
    pub fn parse(inner: &str) -> Result<DeductionState, TraceError> {
        let (head, values) = inner.split_once('\n').ok_or(TraceError::NoStateBlock)?;
        let label = head.trim_end().strip_suffix(':').ok_or_else(|| TraceError::MalformedState(head.to_string()))?;
        if label.is_empty() || !label.chars().all(|c| c.is_ascii_uppercase()) {
            return Err(TraceError::MalformedState(head.to_string()));
        }
        let mut vars = Vec::new();
        for tok in values.trim().split(", ") {
            let (v, s) = tok.split_once('=').ok_or_else(|| TraceError::ValueUnparseable(tok.to_string()))?;
            if v.is_empty() || !v.chars().all(|c| c.is_ascii_lowercase()) {
                return Err(TraceError::MalformedState(tok.to_string()));
            }
            let s = s.parse().map_err(|_| TraceError::ValueUnparseable(tok.to_string()))?;
            vars.push((v.to_string(), s));
        }
        Ok(DeductionState { label: label.to_string(), vars })
    }
}

pub fn header(p: &DeductionPuzzle) -> String {
    format!("PUZZLE: {}\nQUESTION: {}\n\nSTART\n", p.prose(), p.question_text())
}

fn join_and(parts: &[String]) -> String {
    match parts {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} and {b}"),
        [init @ .., last] => format!("{}, and {last}", init.join(", ")),
    }
}

/// Subject naming the holder of the highest (or lowest) score.
fn extreme(vocab: Vocab, n: usize, high: bool) -> String {
    match (vocab, high) {
        (Vocab::Finish, true) => "the one who finished last".into(),
        (Vocab::Finish, false) => "the one who finished first".into(),
        _ => vocab.rank_phrase(if high { n } else { 1 }, n),
    }
}

fn units(vocab: Vocab, k: usize) -> &'static str {
    let (one, many) = vocab.units();
    if k == 1 {
        one
    } else {
        many
    }
}

struct Ctx<'a> {
    p: &'a DeductionPuzzle,
    n: usize,
}

impl Ctx<'_> {
    fn var(&self, item: &str) -> &'static str {
        VARS[self.p.index_of(item).expect("validated puzzle")]
    }

    fn preamble(&self) -> String {
        let p = self.p;
        let n = self.n;
        let quoted: Vec<String> = p.items.iter().map(|i| format!("'{i}'")).collect();
        let var_list = VARS[..n].join(", ");
        let mut lines = alloc::vec![
            "Parsing step:".to_string(),
            format!("{IND}Items: {}", p.items.join(", ")),
            format!("{IND}Number of items: {n}"),
        ];
        for (k, clue) in p.clues.iter().enumerate() {
            lines.push(format!("{IND}Statement {}: {}.", k + 1, p.clue_sentence(clue)));
        }
        lines.push("Scoring identification step:".into());
        lines.push(format!("{IND}Scores will refer to {}.", p.vocab.dimension()));
        lines.push(format!(
            "{IND}Since we have {n} items, let's assume that {} gets a score of {n} {}",
            extreme(p.vocab, n, true),
            units(p.vocab, n)
        ));
        lines.push(format!("{IND}and {} gets the score of 1 {}.", extreme(p.vocab, n, false), units(p.vocab, 1)));
        lines.push("Translation step:".into());
        lines.push(format!("{IND}Available variable names: {}", VARS.join(", ")));
        lines.push(format!("{IND}Map item scores of {} to variable names {var_list}", quoted.join(", ")));
        let map: Vec<String> = p.items.iter().map(|i| format!("{i} score is {};", self.var(i))).collect();
        lines.push(format!("{IND}{}", map.join(" ")));
        for (k, clue) in p.clues.iter().enumerate() {
            lines.push(format!("{IND}Statement {}: {}.", k + 1, p.clue_with_vars(clue, |i| self.var(i).to_string())));
        }
        lines.push("Initialization step:".into());
        let (less, greater) = p.vocab.relation_words();
        let uses = |f: fn(&Clue) -> bool| p.clues.iter().any(f);
        let mut relation_words: Vec<&str> = Vec::new();
        if uses(|c| matches!(c, Clue::Less { .. })) {
            relation_words.push(less);
        }
        if uses(|c| matches!(c, Clue::Greater { .. })) {
            relation_words.push(greater);
        }
        let mut ranks: Vec<(String, usize)> = Vec::new();
        for clue in &p.clues {
            if let Clue::Equal { rank, .. } = clue {
                let phrase = p.vocab.rank_phrase(*rank, n);
                if !ranks.iter().any(|(ph, _)| *ph == phrase) {
                    ranks.push((phrase, *rank));
                }
            }
        }
        let mut words: Vec<String> = relation_words.iter().map(|w| w.to_string()).collect();
        for (ph, _) in &ranks {
            let w = ph.strip_prefix("the ").unwrap_or(ph).to_string();
            if !words.contains(&w) {
                words.push(w);
            }
        }
        lines.push(format!("{IND}Words used to qualify the relationships: {}", words.join(", ")));
        lines.push(format!("{IND}Orientation step:"));
        for (ph, rank) in &ranks {
            lines.push(format!("{IND}{IND}{ph}: refers to the score of {rank}"));
        }
        if relation_words.contains(&less) {
            lines.push(format!("{IND}{IND}{less}: refers to smaller score"));
        }
        if relation_words.contains(&greater) {
            lines.push(format!("{IND}{IND}{greater}: refers to larger score"));
        }
        lines.push(format!("{IND}Initialize so that all scores are different numbers between 1 and {n}"));
        join_lines(&lines)
    }

    /// Narration of one statement check; returns the lines and the pair to swap, if any.
    fn check(&self, k: usize, clue: &Clue, scores: &[usize], label: &str) -> (Vec<String>, Option<(usize, usize)>) {
        let p = self.p;
        let stmt = p.clue_with_vars(clue, |i| self.var(i).to_string());
        let swap = deduction_swap_for(p, clue, scores);
        let score = |item: &str| scores[p.index_of(item).expect("validated puzzle")];
        let mut lines = Vec::new();
        let verdict = if swap.is_some() { "false" } else { "true" };
        let change = format!(
            "{IND}{{}} is {verdict}, so we {}",
            if swap.is_some() {
                "need to make a change, so we set update_flag=true and we need to make a swap."
            } else {
                "don't need to make a change."
            }
        );
        match clue {
            Clue::Equal { item, rank } => {
                let v = self.var(item);
                lines.push(format!("{IND}Statement {k}: {stmt}, meaning: {v}={rank}"));
                let have = score(item);
                lines.push(format!(
                    "{IND}In Score_assignment_{label}, {v} is {have}, so {v}={rank} maps to {have}={rank}"
                ));
                lines.push(change.replace("{}", &format!("{have}={rank}")));
                if let Some((_, holder)) = swap {
                    let other = VARS[holder];
                    lines.push(format!(
                        "{IND}In the statement there is only one variable and it is {v}. We need to find another. We want {v} to be {rank},"
                    ));
                    lines.push(format!(
                        "{IND}but we see that in Score_assignment_{label} that {rank} is assigned to {other}, so we swap values of {v} and {other} to make"
                    ));
                }
            }
            Clue::Less { a, b } | Clue::Greater { a, b } => {
                let op = if matches!(clue, Clue::Less { .. }) { '<' } else { '>' };
                let (va, vb) = (self.var(a), self.var(b));
                let (sa, sb) = (score(a), score(b));
                lines.push(format!("{IND}Statement {k}: {stmt}, meaning: {va}{op}{vb}"));
                lines.push(format!(
                    "{IND}In Score_assignment_{label}, {va} is {sa} and {vb} is {sb}, so {va}{op}{vb} maps to {sa}{op}{sb}"
                ));
                lines.push(change.replace("{}", &format!("{sa}{op}{sb}")));
                if swap.is_some() {
                    lines.push(format!(
                        "{IND}In the statement there are two variables and those are {va} and {vb} so we swap in Score_assignment_{label} to make"
                    ));
                }
            }
        }
        (lines, swap)
    }

    fn closing(&self, scores: &[usize], label: &str, converged: bool) -> (String, String) {
        let p = self.p;
        let n = self.n;
        let vars: Vec<(String, usize)> = VARS.iter().map(|v| v.to_string()).zip(scores.iter().copied()).collect();
        let mut lines = Vec::new();
        if !converged {
            lines.push(format!(
                "We have reached the limit of {DEFAULT_DEDUCTION_ITERS} iterations, so we use the latest score assignment."
            ));
        }
        lines.push(String::new());
        lines.push(format!("The correct score assignment is the last (Score_assignment_{label}):"));
        lines.push(values_line(&vars));
        lines.push("Reverse translation step:".into());
        let quoted: Vec<String> = p.items.iter().map(|i| format!("'{i}'")).collect();
        lines.push(format!("Map items {} to variable names {}", quoted.join(", "), VARS[..n].join(", ")));
        let repl: Vec<String> = p.items.iter().map(|i| format!("{} by {i}", self.var(i))).collect();
        lines.push(format!("so we replace {} to get {} scores:", join_and(&repl), p.vocab.dimension()));
        let has: Vec<String> = p.items.iter().zip(scores).map(|(i, s)| format!("{i} has the score {s}")).collect();
        lines.push(has.join("; "));
        lines.push(String::new());
        lines.push(format!("Question: {}", p.question_text()));
        let answer = p.items[scores.iter().position(|s| *s == p.question).expect("scores are a permutation")].clone();
        lines.push(format!("Answer: {answer}"));
        let mut order: Vec<(usize, &String)> = scores.iter().copied().zip(&p.items).collect();
        order.sort_by_key(|o| core::cmp::Reverse(o.0));
        lines.push(format!("Sorting all by score starting with {}:", order[0].1));
        for (s, item) in &order {
            lines.push(format!("with score {s}, {item}"));
        }
        lines.push("END".into());
        (join_lines(&lines), answer)
    }
}

pub fn segments(p: &DeductionPuzzle) -> Result<Vec<Segment>, TraceError> {
    p.validate().map_err(|e| TraceError::Oracle(e.into()))?;
    let n = p.n();
    if n > VARS.len() {
        return Err(TraceError::UnsupportedInput(format!("{n} items")));
    }
    let cx = Ctx { p, n };
    let mut scores = rotated_initial(n);
    let mut k = 0;
    let mut out =
        alloc::vec![Segment::with_block(cx.preamble(), IND, State::Deduction(DeductionState::new(k, &scores)))];
    let mut cur = String::from("\nIterative reasoning\n");
    let mut converged = false;
    for it in 1..=DEFAULT_DEDUCTION_ITERS {
        cur.push_str(&format!("Iteration {it}:\n{IND}update_flag=false\n"));
        let mut update = false;
        for (si, clue) in p.clues.iter().enumerate() {
            let (lines, swap) = cx.check(si + 1, clue, &scores, &label(k));
            cur.push_str(&join_lines(&lines));
            if let Some((x, y)) = swap {
                update = true;
                scores.swap(x, y);
                k += 1;
                let text = core::mem::take(&mut cur);
                out.push(Segment::with_block(text, IND, State::Deduction(DeductionState::new(k, &scores))));
            }
        }
        if update {
            cur.push_str("End of iteration. Since update_flag is true, we need more iterations.\n");
        } else {
            cur.push_str(
                "End of iteration. Since update_flag is false, we have finished all iterations and found the correct order.\n",
            );
            converged = true;
            break;
        }
    }
    let (closing, answer) = cx.closing(&scores, &label(k), converged);
    cur.push_str(&closing);
    let mut seg = Segment::plain(cur);
    seg.answer = Some(AnswerValue::ItemChoice(answer));
    out.push(seg);
    Ok(out)
}

/// The segment that follows the display of `state` in the puzzle's trace. Labels are unique
/// within a trace, so the display identifies the position.
pub fn step(p: &DeductionPuzzle, state: &DeductionState) -> Result<Segment, TraceError> {
    let segs = segments(p)?;
    let at = segs.iter().position(|s| s.state.as_ref() == Some(&State::Deduction(state.clone()))).ok_or_else(|| {
        TraceError::MalformedState(format!("Score_assignment_{} is not on this puzzle's path", state.label))
    })?;
    segs.get(at + 1).cloned().ok_or(TraceError::NoStateBlock)
}

pub fn answer_from_text(text: &str) -> Option<AnswerValue> {
    let k = text.rfind("Answer:")?;
    let line = text[k + "Answer:".len()..].lines().next()?.trim();
    (!line.is_empty()).then(|| AnswerValue::ItemChoice(line.to_string()))
}

/// Answer implied by the latest complete score assignment in `text`, for traces that never
/// reached their answer line.
pub fn answer_from_latest_assignment(p: &DeductionPuzzle, text: &str) -> Option<AnswerValue> {
    let spans = blocks::assignment_blocks(text);
    let state = spans.iter().rev().find_map(|s| DeductionState::parse(&text[s.inner.0..s.inner.1]).ok())?;
    let var = state.vars.iter().find(|(_, s)| *s == p.question).map(|(v, _)| v.as_str())?;
    let idx = VARS.iter().position(|v| *v == var)?;
    p.items.get(idx).map(|i| AnswerValue::ItemChoice(i.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::deduction_iterative;

    #[test]
    fn labels() {
        assert_eq!(label(0), "A");
        assert_eq!(label(25), "Z");
        assert_eq!(label(26), "AA");
        assert_eq!(label(27), "AB");
    }

    #[test]
    fn exemplar_trace() {
        let p = DeductionPuzzle::exemplar();
        let segs = segments(&p).unwrap();
        let shown: Vec<String> = segs.iter().filter_map(|s| s.state.as_ref()).map(|s| s.render()).collect();
        assert_eq!(
            shown,
            [
                "Score_assignment_A:\n    x=2, y=3, z=1",
                "Score_assignment_B:\n    x=3, y=2, z=1",
                "Score_assignment_C:\n    x=3, y=1, z=2"
            ]
        );
        let text: String = segs.iter().map(|s| s.text.as_str()).collect();
        assert!(text.contains("    Words used to qualify the relationships: smaller, bigger, biggest\n"));
        assert!(text.contains("In Score_assignment_A, x is 2, so x=3 maps to 2=3\n"));
        assert!(text.contains(
            "but we see that in Score_assignment_A that 3 is assigned to y, so we swap values of x and y to make\n"
        ));
        assert!(text.contains("obj1 has the score 3; obj2 has the score 1; obj3 has the score 2\n"));
        assert!(text.ends_with("with score 3, obj1\nwith score 2, obj3\nwith score 1, obj2\nEND\n"));
        assert_eq!(answer_from_text(&text), Some(AnswerValue::ItemChoice("obj1".into())));
        assert_eq!(blocks::assignment_blocks(&text).len(), 3);
        let oracle = deduction_iterative(&p, 4).unwrap();
        assert_eq!(oracle.item_with(3), Some("obj1"));
    }

    #[test]
    fn step_follows_labels() {
        let p = DeductionPuzzle::exemplar();
        let segs = segments(&p).unwrap();
        let Some(State::Deduction(b)) = &segs[1].state else { panic!() };
        assert_eq!(step(&p, b).unwrap(), segs[2]);
    }

    #[test]
    fn fallback_reads_latest_assignment() {
        let p = DeductionPuzzle::exemplar();
        let text = "Score_assignment_B:\n    x=3, y=2, z=1\nStatement 2";
        assert_eq!(answer_from_latest_assignment(&p, text), Some(AnswerValue::ItemChoice("obj1".into())));
    }
}
