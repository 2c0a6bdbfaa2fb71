//! LCS execution paths produced by interpreting the compiled program.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{blocks, Segment, State, TraceError};
use crate::dsl::{self, compile_lcs, parse_program, prep_env, Execution, ShowBlock, Value};
use crate::model::AnswerValue;

pub fn header(s1: &str, s2: &str) -> String {
    format!("LCS:\nInput: {s1} {s2} End of input\nLCS Prep:\n")
}

/// Prep lines, the program listing and `Execute:`, i.e. everything between the header and
/// the first interpreter output.
pub fn listing(prep: &str, program: &str) -> String {
    format!("{prep}\n\nLCS program:\n{program}Execute:\n")
}

fn program() -> dsl::Program {
    parse_program(dsl::LCS_PROGRAM).expect("the LCS listing parses")
}

fn to_segments(exec: Execution, prefix: String, out: &mut Vec<Segment>) {
    let mut prefix = Some(prefix);
    for piece in exec.pieces {
        let head = prefix.take().unwrap_or_default();
        let text = format!("{head}{}", piece.text);
        match piece.block {
            Some(b) => out.push(Segment {
                block_at: head.len() + piece.block_at,
                text,
                state: Some(State::Dsl(b)),
                transition: None,
                answer: None,
            }),
            None if !text.is_empty() => out.push(Segment::plain(text)),
            None => {}
        }
    }
}

fn final_segment(exec_env: &dsl::Env, m: usize, n: usize) -> Segment {
    let len = match exec_env.get_cell("C", &[m as i64, n as i64]) {
        Value::Int(v) if v >= 0 => v as u64,
        _ => 0,
    };
    let mut seg = Segment::plain(String::new());
    seg.answer = Some(AnswerValue::LcsLength(len));
    seg
}

pub fn segments(s1: &str, s2: &str) -> Result<Vec<Segment>, TraceError> {
    let (prep, source) = compile_lcs(s1, s2)?;
    let env = prep_env(&prep).map_err(|e| TraceError::MalformedState(e.to_string()))?;
    let exec = dsl::interpret_program(&program(), env, true)?;
    let env_after = exec.env.clone();
    let mut out = Vec::new();
    to_segments(exec, listing(&prep, &source), &mut out);
    out.push(final_segment(&env_after, s1.chars().count(), s2.chars().count()));
    Ok(out)
}

pub fn segments_from(s1: &str, s2: &str, block: &ShowBlock) -> Result<Vec<Segment>, TraceError> {
    let (prep, _) = compile_lcs(s1, s2)?;
    let (m, n) = (s1.chars().count(), s2.chars().count());
    let env = prep_env(&prep).map_err(|e| TraceError::MalformedState(e.to_string()))?;
    if block.is_literal("END") {
        // nothing left to run; recompute the answer the END block stands for
        let exec = dsl::interpret_program(&program(), env, false)?;
        return Ok(alloc::vec![final_segment(&exec.env, m, n)]);
    }
    let exec = dsl::resume_after_show(&program(), env, block, true)?;
    let env_after = exec.env.clone();
    let mut out = Vec::new();
    to_segments(exec, String::new(), &mut out);
    out.push(final_segment(&env_after, m, n));
    Ok(out)
}

/// The same block with `C[i,j]` increased by one, when the block names a current cell.
pub fn corrupt_block(block: &ShowBlock) -> Option<ShowBlock> {
    let (Some(Value::Int(i)), Some(Value::Int(j))) = (block.scalar("i"), block.scalar("j")) else {
        return None;
    };
    let (i, j) = (*i, *j);
    let mut out = block.clone();
    let cell = out.bindings_mut().find(|b| b.name == "C" && b.index == [i, j])?;
    if let Value::Int(v) = &mut cell.value {
        *v += 1;
        return Some(out);
    }
    None
}

/// `C[M,N]` from the last block before the `END` block.
pub fn answer_from_text(text: &str) -> Option<AnswerValue> {
    let parsed: Vec<ShowBlock> =
        blocks::tag_blocks(text).iter().filter_map(|s| ShowBlock::parse(&text[s.inner.0..s.inner.1]).ok()).collect();
    let end = parsed.iter().rposition(|b| b.is_literal("END"))?;
    let last = parsed[..end].last()?;
    let (Some(Value::Int(m)), Some(Value::Int(n))) = (last.scalar("M"), last.scalar("N")) else {
        return None;
    };
    match last.cell("C", &[*m, *n])? {
        Value::Int(v) if *v >= 0 => Some(AnswerValue::LcsLength(*v as u64)),
        _ => None,
    }
}
