//! Longest substring without repeating characters: one iteration per letter, with one
//! `last_<letter>` variable per distinct letter.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{join_lines, Segment, State, TraceError};
use crate::model::AnswerValue;

const IND: &str = "    ";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LssState {
    pub i: usize,
    pub st_ind: usize,
    pub m_len: usize,
    /// Last 1-based position of each letter, 0 when unseen, in letter order.
    pub last: Vec<(char, usize)>,
}

fn letters_of(s: &str) -> Vec<char> {
    s.chars().collect::<BTreeSet<_>>().into_iter().collect()
}

impl LssState {
    pub fn initial(s: &str) -> LssState {
        LssState { i: 1, st_ind: 1, m_len: 0, last: letters_of(s).into_iter().map(|c| (c, 0)).collect() }
    }

    pub fn render(&self) -> String {
        let mut out = format!("<state> i={}, st_ind={}, m_len={}", self.i, self.st_ind, self.m_len);
        for (c, v) in &self.last {
            out.push_str(&format!(", last_{c}={v}"));
        }
        out.push_str(" </state>");
        out
    }

    pub fn parse(inner: &str) -> Result<LssState, TraceError> {
        let body = inner.trim();
        let mut fields = body.split(", ");
        let mut num = |name: &str| -> Result<usize, TraceError> {
            let tok = fields.next().ok_or_else(|| TraceError::FieldMissing(name.to_string()))?;
            let v = tok
                .strip_prefix(name)
                .and_then(|t| t.strip_prefix('='))
                .ok_or_else(|| TraceError::FieldMissing(name.to_string()))?;
            v.parse().map_err(|_| TraceError::ValueUnparseable(tok.to_string()))
        };
        let i = num("i")?;
        let st_ind = num("st_ind")?;
        let m_len = num("m_len")?;
        let mut last: Vec<(char, usize)> = Vec::new();
        for tok in fields {
            let (name, v) = tok.split_once('=').ok_or_else(|| TraceError::ValueUnparseable(tok.to_string()))?;
            let mut chars =
                name.strip_prefix("last_").ok_or_else(|| TraceError::MalformedState(tok.to_string()))?.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(TraceError::MalformedState(tok.to_string()));
            };
            if last.last().is_some_and(|(p, _)| *p >= c) {
                return Err(TraceError::MalformedState(format!("letter variables out of order at `{tok}`")));
            }
            let v = v.parse().map_err(|_| TraceError::ValueUnparseable(tok.to_string()))?;
            last.push((c, v));
        }
        if i == 0 || st_ind == 0 {
            return Err(TraceError::MalformedState("positions are 1-based".into()));
        }
        Ok(LssState { i, st_ind, m_len, last })
    }

    fn last_of(&self, c: char) -> Option<usize> {
        self.last.iter().find(|(l, _)| *l == c).map(|(_, v)| *v)
    }

    fn set_last(&mut self, c: char, v: usize) {
        if let Some(slot) = self.last.iter_mut().find(|(l, _)| *l == c) {
            slot.1 = v;
        }
    }
}

fn check_input(s: &str) -> Result<(), TraceError> {
    match s.chars().find(|c| !c.is_ascii_alphanumeric()) {
        Some(c) => Err(TraceError::UnsupportedInput(format!("letter `{c}` cannot name a variable"))),
        None => Ok(()),
    }
}

fn spaced(s: &str) -> String {
    s.chars().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn header(s: &str) -> String {
    join_lines(&[format!("Input: s = {}", spaced(s)), "START".into()])
}

pub fn preamble(s: &str) -> Result<String, TraceError> {
    check_input(s)?;
    let letters = letters_of(s);
    let names: Vec<String> = letters.iter().map(|c| c.to_string()).collect();
    let vars: Vec<String> = letters.iter().map(|c| format!("last_{c}=0")).collect();
    let l = s.chars().count();
    Ok(join_lines(&[
        format!("Unique letters: {}", names.join(", ")),
        format!("Define variables {}", vars.join(", ")),
        format!("Length of sequence s: L={l}"),
        format!("Because L is {l}, the needed number of iterations is {l}"),
        "set st_ind=1".into(),
        "set m_len=0".into(),
        "set i=1".into(),
    ]))
}

pub fn segments(s: &str) -> Result<Vec<Segment>, TraceError> {
    let mut out = alloc::vec![Segment::plain(preamble(s)?)];
    out.extend(segments_from(s, &LssState::initial(s))?);
    Ok(out)
}

pub fn segments_from(s: &str, state: &LssState) -> Result<Vec<Segment>, TraceError> {
    check_input(s)?;
    let chars: Vec<char> = s.chars().collect();
    let expected = letters_of(s);
    if state.last.iter().map(|(c, _)| *c).ne(expected.iter().copied()) {
        return Err(TraceError::MalformedState("letter variables do not match the input".into()));
    }
    let l = chars.len();
    let mut st = state.clone();
    let mut out = Vec::new();
    while st.i <= l {
        let k = st.i;
        let c = chars[k - 1];
        let mut lines = Vec::new();
        if k > 1 {
            lines.push(format!("End of iteration {}. But we need to do {l} iterations,...", k - 1));
            lines.push("...so we do another one".into());
        }
        lines.push(format!("Iteration {k}:"));
        lines.push(format!("{IND}s({k}) is {c}, so use last_{c}"));
        let last = st.last_of(c).unwrap_or(0);
        if last == 0 {
            lines.push(format!("{IND}last_{c} is 0, so nothing to do here."));
        } else {
            let new_st = st.st_ind.max(last + 1);
            lines.push(format!("{IND}last_{c} is greater than 0, so we reason..."));
            lines.push(format!("{IND}...max(st_ind, last_{c}+1) is max({}, {last}+1) which is...", st.st_ind));
            lines.push(format!("{IND}...max({}, {})={new_st} so we set st_ind={new_st}", st.st_ind, last + 1));
            st.st_ind = new_st;
        }
        let window = (k + 1).saturating_sub(st.st_ind);
        let new_m = st.m_len.max(window);
        lines.push(format!("{IND}max(m_len, i-st_ind+1) is max({}, {k}-{}+1) which is...", st.m_len, st.st_ind));
        lines.push(format!("{IND}...max({}, {window})={new_m}, so we set m_len={new_m}", st.m_len));
        st.m_len = new_m;
        lines.push(format!("{IND}since i is {k}, and the letter s({k}) is {c}, set last_{c}={k}"));
        st.set_last(c, k);
        lines.push(format!("{IND}increase i by one"));
        st.i += 1;
        out.push(Segment::with_block(join_lines(&lines), IND, State::Lss(st.clone())));
    }
    let mut lines = Vec::new();
    if l == 0 {
        lines.push("We needed to do 0 iterations, so we are done".into());
    } else {
        lines.push(format!("End of iteration {l}. We needed to do {l} iterations,..."));
        lines.push("...so we are done".into());
    }
    lines.push(String::new());
    lines.push(format!("The solution is: m_len={}", st.m_len));
    lines.push("END".into());
    let mut seg = Segment::plain(join_lines(&lines));
    seg.answer = Some(AnswerValue::Length(st.m_len as u64));
    out.push(seg);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cbcabb_states() {
        let segs = segments("cbcabb").unwrap();
        let got: Vec<String> = segs.iter().filter_map(|s| s.state.as_ref()).map(|s| s.render()).collect();
        assert_eq!(got[0], "<state> i=2, st_ind=1, m_len=1, last_a=0, last_b=0, last_c=1 </state>");
        assert_eq!(got[5], "<state> i=7, st_ind=6, m_len=3, last_a=4, last_b=6, last_c=3 </state>");
        assert_eq!(segs.last().unwrap().answer, Some(AnswerValue::Length(3)));
        assert!(segs[3].text.contains("...max(1, 2)=2 so we set st_ind=2"));
    }

    #[test]
    fn empty_input() {
        let segs = segments("").unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[1].answer, Some(AnswerValue::Length(0)));
    }

    #[test]
    fn parse_round_trip() {
        let s = LssState { i: 3, st_ind: 1, m_len: 2, last: alloc::vec![('a', 0), ('b', 2)] };
        let r = s.render();
        let inner = r.strip_prefix("<state>").unwrap().strip_suffix("</state>").unwrap();
        assert_eq!(LssState::parse(inner).unwrap(), s);
        assert!(LssState::parse(" i=3, m_len=2 ").is_err());
    }
}
