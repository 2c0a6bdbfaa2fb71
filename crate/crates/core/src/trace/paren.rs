//! Parentheses evaluation with a push-then-reduce stack.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{join_lines, Segment, State, TraceError};
use crate::model::{AnswerValue, Bracket};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParenState {
    /// Index of the next symbol to read.
    pub i: usize,
    pub stack: Vec<Bracket>,
}

fn stack_text(stack: &[Bracket]) -> String {
    let mut out = String::from("stack=");
    for b in stack {
        out.push(' ');
        out.push(b.as_char());
    }
    out
}

impl ParenState {
    pub fn render(&self) -> String {
        format!("<state> i={} {} </state>", self.i, stack_text(&self.stack))
    }

    pub fn parse(inner: &str) -> Result<ParenState, TraceError> {
        let body = inner.trim();
        let mut toks = body.split(' ');
        let i_tok = toks.next().filter(|t| !t.is_empty()).ok_or_else(|| TraceError::FieldMissing("i".into()))?;
        let i = i_tok
            .strip_prefix("i=")
            .ok_or_else(|| TraceError::FieldMissing("i".into()))?
            .parse()
            .map_err(|_| TraceError::ValueUnparseable(i_tok.to_string()))?;
        if toks.next() != Some("stack=") {
            return Err(TraceError::FieldMissing("stack".into()));
        }
        let mut stack = Vec::new();
        for t in toks {
            let mut cs = t.chars();
            let b = match (cs.next(), cs.next()) {
                (Some(c), None) => Bracket::from_char(c),
                _ => None,
            };
            stack.push(b.ok_or_else(|| TraceError::ValueUnparseable(t.to_string()))?);
        }
        Ok(ParenState { i, stack })
    }
}

pub fn header(symbols: &[Bracket]) -> String {
    let mut line = String::from("input:");
    for b in symbols {
        line.push(' ');
        line.push(b.as_char());
    }
    line.push('\n');
    line
}

pub fn preamble(symbols: &[Bracket]) -> String {
    let quoted: Vec<String> = symbols.iter().map(|b| format!("'{}'", b.as_char())).collect();
    join_lines(&[
        "input written as a sequence of symbols:".into(),
        format!("s= {}", quoted.join(", ")),
        format!("length(s)= {}", symbols.len()),
        "stack is initialized as empty".into(),
    ])
}

pub fn segments(symbols: &[Bracket]) -> Vec<Segment> {
    let mut out = alloc::vec![Segment::plain(preamble(symbols))];
    out.extend(segments_from(symbols, &ParenState { i: 0, stack: Vec::new() }));
    out
}

pub fn segments_from(symbols: &[Bracket], state: &ParenState) -> Vec<Segment> {
    let mut st = state.clone();
    let mut out = Vec::new();
    while st.i < symbols.len() {
        let k = st.i;
        let sym = symbols[k];
        let mut lines = alloc::vec![format!("i={k}")];
        if st.stack.is_empty() {
            lines.push(format!("there is nothing in stack, so push s({k})='{}' on stack", sym.as_char()));
        } else {
            lines.push(format!("we push s({k})='{}' to the stack", sym.as_char()));
        }
        st.stack.push(sym);
        lines.push(stack_text(&st.stack));
        lines.push("are the last two symbols an open and a closed".into());
        match st.stack.as_slice() {
            [.., open, close] if open.matches(*close) => {
                lines.push(format!(
                    "parenthesis of the same type? Yes, they are {} {},",
                    open.as_char(),
                    close.as_char()
                ));
                lines.push("opening then closing.".into());
                lines.push("We pop the last two symbols from the stack.".into());
                st.stack.truncate(st.stack.len() - 2);
            }
            _ => lines.push("parenthesis of the same type? No. Stack stays same.".into()),
        }
        st.i += 1;
        out.push(Segment::with_block(join_lines(&lines), "", State::Paren(st.clone())));
    }
    let valid = st.stack.is_empty();
    let text = join_lines(&[
        format!("i={}", st.i),
        "we have reached the end of the input string.".into(),
        "If the stack has some parenthesis left in it,".into(),
        "the sequence is invalid, otherwise,".into(),
        "if the stack is empty, it is valid.".into(),
        format!("Sequence is: {}", if valid { "valid" } else { "invalid" }),
        "END".into(),
    ]);
    let mut seg = Segment::plain(text);
    seg.answer = Some(AnswerValue::Validity(valid));
    out.push(seg);
    out
}
