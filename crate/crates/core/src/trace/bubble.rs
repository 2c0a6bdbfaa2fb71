//! Bubble sort traces: the prose-state style (V1) and the `<state>` style with iterator (V2).

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{join_lines, Segment, State, TraceError};
use crate::model::AnswerValue;

const IND: &str = "    ";
const IND2: &str = "        ";
/// V1 continuation lines line up under the "Check if" column.
const V1_CONT: &str = "                            ";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BubbleState {
    pub a: Vec<i64>,
    /// Pair iterator; absent in V1 states.
    pub i: Option<usize>,
    pub p: usize,
    pub n_swaps: u64,
    pub swap_flag: bool,
}

/// The six ways a V2 step can change the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TransitionType {
    EndIterAnother,
    EndIterStop,
    CmpTrueFlagFalse,
    CmpTrueFlagTrue,
    CmpFalseFlagFalse,
    CmpFalseFlagTrue,
}

impl TransitionType {
    pub const ALL: [TransitionType; 6] = [
        TransitionType::EndIterAnother,
        TransitionType::EndIterStop,
        TransitionType::CmpTrueFlagFalse,
        TransitionType::CmpTrueFlagTrue,
        TransitionType::CmpFalseFlagFalse,
        TransitionType::CmpFalseFlagTrue,
    ];

    pub fn is_iteration_end(self) -> bool {
        matches!(self, TransitionType::EndIterAnother | TransitionType::EndIterStop)
    }

    /// Type of the step that leaves a positioned state.
    pub fn classify(state: &BubbleState) -> Option<TransitionType> {
        let i = state.i?;
        if i >= state.p {
            return Some(if state.swap_flag { TransitionType::EndIterAnother } else { TransitionType::EndIterStop });
        }
        let holds = state.a.get(i)? < state.a.get(i + 1)?;
        Some(match (holds, state.swap_flag) {
            (true, false) => TransitionType::CmpTrueFlagFalse,
            (true, true) => TransitionType::CmpTrueFlagTrue,
            (false, false) => TransitionType::CmpFalseFlagFalse,
            (false, true) => TransitionType::CmpFalseFlagTrue,
        })
    }
}

pub(crate) fn list_spaced(a: &[i64]) -> String {
    a.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn list_commas(a: &[i64]) -> String {
    a.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")
}

impl BubbleState {
    pub fn initial(seq: &[i64], with_iterator: bool) -> BubbleState {
        let p = seq.len().saturating_sub(1);
        if with_iterator {
            BubbleState { a: seq.to_vec(), i: Some(p), p, n_swaps: 0, swap_flag: true }
        } else {
            BubbleState { a: seq.to_vec(), i: None, p, n_swaps: 0, swap_flag: false }
        }
    }

    pub fn render(&self) -> String {
        match self.i {
            Some(i) => format!(
                "<state> a=[{}] i={} P={} n_swaps={} swap_flag={} </state>",
                list_spaced(&self.a),
                i,
                self.p,
                self.n_swaps,
                self.swap_flag
            ),
            None => format!(
                "State: a=[{}], n_swaps={}, swap_flag={} EndState",
                list_spaced(&self.a),
                self.n_swaps,
                self.swap_flag
            ),
        }
    }

    /// Parses the text between `<state>` and `</state>`.
    pub fn parse_v2(inner: &str) -> Result<BubbleState, TraceError> {
        let body = inner.trim();
        let rest = body.strip_prefix("a=[").ok_or_else(|| TraceError::FieldMissing("a".into()))?;
        let (list, rest) = rest.split_once(']').ok_or_else(|| TraceError::ValueUnparseable(body.to_string()))?;
        let a = parse_list(list)?;
        let mut fields = rest.split(' ');
        if fields.next() != Some("") {
            return Err(TraceError::MalformedState(body.to_string()));
        }
        let i = take_field(&mut fields, "i")?;
        let p = take_field(&mut fields, "P")?;
        let n_swaps = take_field(&mut fields, "n_swaps")?;
        let swap_flag = take_field(&mut fields, "swap_flag")?;
        if let Some(extra) = fields.next() {
            return Err(TraceError::MalformedState(format!("unexpected `{extra}`")));
        }
        let state = BubbleState { a, i: Some(i), p, n_swaps, swap_flag };
        state.check()?;
        Ok(state)
    }

    /// Parses the text between `State:` and `EndState`.
    pub fn parse_v1(inner: &str) -> Result<BubbleState, TraceError> {
        let body = inner.trim();
        let rest = body.strip_prefix("a=[").ok_or_else(|| TraceError::FieldMissing("a".into()))?;
        let (list, rest) = rest.split_once(']').ok_or_else(|| TraceError::ValueUnparseable(body.to_string()))?;
        let a = parse_list(list)?;
        let mut fields = rest.split(", ");
        if fields.next() != Some("") {
            return Err(TraceError::MalformedState(body.to_string()));
        }
        let n_swaps = take_field(&mut fields, "n_swaps")?;
        let swap_flag = take_field(&mut fields, "swap_flag")?;
        if let Some(extra) = fields.next() {
            return Err(TraceError::MalformedState(format!("unexpected `{extra}`")));
        }
        let p = a.len().saturating_sub(1);
        Ok(BubbleState { a, i: None, p, n_swaps, swap_flag })
    }

    fn check(&self) -> Result<(), TraceError> {
        if self.a.is_empty() || self.p != self.a.len() - 1 {
            return Err(TraceError::MalformedState(format!("P={} does not match a list of {}", self.p, self.a.len())));
        }
        if self.i.is_some_and(|i| i > self.p) {
            return Err(TraceError::MalformedState("i exceeds P".into()));
        }
        Ok(())
    }
}

fn parse_list(list: &str) -> Result<Vec<i64>, TraceError> {
    if list.is_empty() {
        return Err(TraceError::ValueUnparseable(String::new()));
    }
    list.split(' ').map(|v| v.parse().map_err(|_| TraceError::ValueUnparseable(v.to_string()))).collect()
}

fn take_field<'a, T: core::str::FromStr>(
    fields: &mut impl Iterator<Item = &'a str>,
    name: &str,
) -> Result<T, TraceError> {
    let tok = fields.next().ok_or_else(|| TraceError::FieldMissing(name.to_string()))?;
    let value = tok
        .strip_prefix(name)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| TraceError::FieldMissing(name.to_string()))?;
    value.parse().map_err(|_| TraceError::ValueUnparseable(tok.to_string()))
}

pub fn header(seq: &[i64]) -> String {
    format!("Problem: {}\nEXECUTION\n", list_commas(seq))
}

fn check_input(seq: &[i64]) -> Result<(), TraceError> {
    if seq.is_empty() {
        return Err(TraceError::UnsupportedInput("empty list".into()));
    }
    let mut sorted = seq.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        // with a strict `<` check equal neighbours swap forever
        return Err(TraceError::UnsupportedInput("repeated values".into()));
    }
    Ok(())
}

fn final_answer(a: &[i64], n_swaps: u64, indent: &str, terminal: bool) -> String {
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    let mut out = format!("{indent}Final List: {}\n{indent}Number of swaps: {n_swaps}\n", list_commas(&sorted));
    if terminal {
        out.push_str(indent);
        out.push_str("END OF EXECUTION\n");
    }
    out
}

// ---- V2 ----

pub fn v2_segments(seq: &[i64]) -> Result<Vec<Segment>, TraceError> {
    check_input(seq)?;
    let state = BubbleState::initial(seq, true);
    let p = state.p;
    let pre = join_lines(&[
        format!("{IND}Length of the list: L={}", seq.len()),
        format!("{IND}Number of pairs: P={p}"),
        format!("{IND}a=[{}]", list_spaced(seq)),
        format!("{IND}set n_swaps=0. set i=P={p}. set swap_flag=true."),
    ]);
    let mut out = alloc::vec![Segment::with_block(pre, IND2, State::Bubble(state.clone()))];
    out.extend(v2_segments_from(&state)?);
    Ok(out)
}

/// Text and next state of one V2 step; `None` for the state on the final step.
pub fn v2_step(s: &BubbleState) -> (String, Option<BubbleState>, TransitionType) {
    let i = s.i.unwrap_or(s.p);
    let kind = TransitionType::classify(&BubbleState { i: Some(i), ..s.clone() }).expect("positioned state");
    let p = s.p;
    if i >= p {
        if s.swap_flag {
            let next = BubbleState { i: Some(0), swap_flag: false, ..s.clone() };
            let text = join_lines(&[
                format!("{IND2}Since i={i} and P={p}, these two are equal, so this iteration is done, but swap_flag is true,"),
                format!("{IND2}so we need another iteration"),
                format!("{IND}Iteration:"),
                format!("{IND2}set swap_flag=false.  set i=0. The state is:"),
            ]);
            return (text, Some(next), kind);
        }
        let mut text = format!(
            "{IND2}Since i={i} and P={p}, these two are equal, so this iteration is done, but swap_flag is false, so we are done\n"
        );
        text.push_str(&final_answer(&s.a, s.n_swaps, IND, true));
        return (text, None, kind);
    }
    let (x, y) = (s.a[i], s.a[i + 1]);
    let mut lines = alloc::vec![
        format!("{IND2}Since i={i} and P={p}, these two are different, so we continue"),
        format!("{IND2}a[i]=a[{i}]={x} a[i+1]=a[{}]={y}", i + 1),
    ];
    let mut next = BubbleState { i: Some(i + 1), ..s.clone() };
    if x < y {
        lines.push(format!("{IND2}Because {x}<{y} is true we keep state as is and move on by increasing i"));
    } else {
        lines.push(format!(
            "{IND2}Because {x}<{y} is false we set swap_flag=true,increase n_swaps by one, and in a=[{}] swap {x} and {y},",
            list_spaced(&s.a)
        ));
        lines.push(format!("{IND2}and increase i, and keep P as is to get"));
        next.a.swap(i, i + 1);
        next.n_swaps += 1;
        next.swap_flag = true;
    }
    (join_lines(&lines), Some(next), kind)
}

pub fn v2_segments_from(state: &BubbleState) -> Result<Vec<Segment>, TraceError> {
    let mut s = state.clone();
    if s.i.is_none() {
        return Err(TraceError::FieldMissing("i".into()));
    }
    s.check()?;
    let mut out = Vec::new();
    loop {
        let (text, next, kind) = v2_step(&s);
        match next {
            Some(n) => {
                let mut seg = Segment::with_block(text, IND2, State::Bubble(n.clone()));
                seg.transition = Some(kind);
                out.push(seg);
                s = n;
            }
            None => {
                let mut seg = Segment::plain(text);
                seg.transition = Some(kind);
                seg.answer = Some(AnswerValue::SwapCount(s.n_swaps));
                out.push(seg);
                return Ok(out);
            }
        }
    }
}

// ---- V1 ----

pub fn v1_segments(seq: &[i64]) -> Result<Vec<Segment>, TraceError> {
    check_input(seq)?;
    let state = BubbleState::initial(seq, false);
    let pre = join_lines(&[
        format!("{IND}Prep"),
        format!("{IND}Length of the list: {}", seq.len()),
        format!("{IND}Number of consecutive pairs: {}", state.p),
        format!("{IND}a=[{}]", list_spaced(seq)),
        format!("{IND}set n_swaps=0"),
        format!("{IND}EndPrep"),
        format!("{IND}Iteration:"),
        format!("{IND2}set swap_flag=false. The state is:"),
    ]);
    let mut out = alloc::vec![Segment::with_block(pre, IND2, State::Bubble(state.clone()))];
    out.extend(v1_walk(state, 0));
    Ok(out)
}

/// V1 states omit the pair position, so it is recovered from the comparisons narrated since
/// the last iteration opened.
pub fn v1_segments_from(state: &BubbleState, preceding: &str) -> Result<Vec<Segment>, TraceError> {
    if state.a.is_empty() {
        return Err(TraceError::MalformedState("empty list".into()));
    }
    let since = preceding.rfind("Iteration:").map_or(preceding, |k| &preceding[k..]);
    let pos = since.lines().filter(|l| l.trim_start().starts_with("Pair a[")).count();
    let s = BubbleState { i: None, p: state.a.len() - 1, ..state.clone() };
    Ok(v1_walk(s, pos.min(state.a.len() - 1)))
}

fn v1_walk(mut s: BubbleState, mut pos: usize) -> Vec<Segment> {
    let mut out = Vec::new();
    loop {
        let positioned = BubbleState { i: Some(pos), ..s.clone() };
        let kind = TransitionType::classify(&positioned).expect("positioned state");
        if pos >= s.p {
            if s.swap_flag {
                let text = join_lines(&[
                    format!("{IND2}swap_flag is true, so do another iteration"),
                    format!("{IND}Iteration:"),
                    format!("{IND2}set swap_flag=false. The state is:"),
                ]);
                s.swap_flag = false;
                pos = 0;
                let mut seg = Segment::with_block(text, IND2, State::Bubble(s.clone()));
                seg.transition = Some(kind);
                out.push(seg);
                continue;
            }
            let mut text = format!("{IND2}swap_flag is false, so stop the iteration\n");
            text.push_str(&final_answer(&s.a, s.n_swaps, "", true));
            let mut seg = Segment::plain(text);
            seg.transition = Some(kind);
            seg.answer = Some(AnswerValue::SwapCount(s.n_swaps));
            out.push(seg);
            return out;
        }
        let (x, y) = (s.a[pos], s.a[pos + 1]);
        let check = format!("{IND2}Pair a[{},{}] = [{x} {y}] Check if {x}<{y}. Is it true?", pos + 1, pos + 2);
        let lines = if x < y {
            alloc::vec![format!("{check} Yes."), format!("{V1_CONT}Because of that, we leave state as is")]
        } else {
            let before = list_spaced(&s.a);
            s.a.swap(pos, pos + 1);
            s.n_swaps += 1;
            s.swap_flag = true;
            alloc::vec![
                format!("{check} No."),
                format!("{V1_CONT}Thus, we set swap_flag=true, increase n_swaps by one,"),
                format!("{V1_CONT}and in the latest a=[{before}] swap {x} and {y} to get into state:"),
            ]
        };
        pos += 1;
        let mut seg = Segment::with_block(join_lines(&lines), IND2, State::Bubble(s.clone()));
        seg.transition = Some(kind);
        out.push(seg);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn states(segs: &[Segment]) -> Vec<String> {
        segs.iter().filter_map(|s| s.state.as_ref()).map(|s| s.render()).collect()
    }

    #[test]
    fn v2_block_count_and_answer() {
        let segs = v2_segments(&[2, 3, 1, 5]).unwrap();
        assert_eq!(states(&segs).len(), 13);
        assert_eq!(segs.last().unwrap().answer, Some(AnswerValue::SwapCount(2)));
        let s = states(&segs);
        assert_eq!(s[3], "<state> a=[2 1 3 5] i=2 P=3 n_swaps=1 swap_flag=true </state>");
    }

    #[test]
    fn single_element_has_no_comparisons() {
        let segs = v2_segments(&[7]).unwrap();
        assert_eq!(states(&segs).len(), 2);
        assert!(segs.iter().all(|s| !s.text.contains("Because")));
        assert_eq!(segs.last().unwrap().answer, Some(AnswerValue::SwapCount(0)));
    }

    #[test]
    fn parses_blocks() {
        let s = BubbleState::parse_v2(" a=[2 1 3 5] i=2 P=3 n_swaps=1 swap_flag=true ").unwrap();
        assert_eq!(s.a, [2, 1, 3, 5]);
        assert_eq!(s.i, Some(2));
        assert!(matches!(BubbleState::parse_v2(" a=[2 1] i=x "), Err(TraceError::ValueUnparseable(_))));
        assert!(matches!(BubbleState::parse_v2(" a=[2 1] i=0 P=1 "), Err(TraceError::FieldMissing(_))));
        let v1 = BubbleState::parse_v1(" a=[2 3 1 5], n_swaps=0, swap_flag=false ").unwrap();
        assert_eq!(v1.render(), "State: a=[2 3 1 5], n_swaps=0, swap_flag=false EndState");
    }

    #[test]
    fn classification_examples() {
        let s = BubbleState { a: alloc::vec![2, 3, 1, 5], i: Some(1), p: 3, n_swaps: 0, swap_flag: false };
        assert_eq!(TransitionType::classify(&s), Some(TransitionType::CmpFalseFlagFalse));
        let (_, next, _) = v2_step(&s);
        let next = next.unwrap();
        assert_eq!((next.a.as_slice(), next.i, next.n_swaps, next.swap_flag), (&[2, 1, 3, 5][..], Some(2), 1, true));
    }

    #[test]
    fn repeated_values_rejected() {
        assert!(v2_segments(&[1, 1]).is_err());
    }
}
