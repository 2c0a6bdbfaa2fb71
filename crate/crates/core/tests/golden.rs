//! State-block sequences of the worked examples, transcribed by hand into `tests/golden/`.
//! Blocks are compared line by line with indentation and repeated spaces collapsed.

use std::path::Path;

use irsa_core::model::{Bracket, TaskInput};
use irsa_core::trace::{block_spans, render_trace, TraceStyle};

fn normalize(block: &str) -> String {
    block
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}

fn golden(name: &str) -> Vec<String> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    if text.contains("\n---\n") {
        text.split("\n---\n").map(normalize).collect()
    } else {
        text.lines().map(normalize).filter(|l| !l.is_empty()).collect()
    }
}

fn rendered_blocks(input: &TaskInput, style: TraceStyle) -> (String, Vec<String>) {
    let (text, _) = render_trace(input, style).unwrap();
    let blocks = block_spans(&text, style).iter().map(|s| normalize(&text[s.inner.0..s.inner.1])).collect();
    (text, blocks)
}

fn paren_input() -> TaskInput {
    TaskInput::brackets(Bracket::parse_list(") [ { } ] ( { } ) [ ( { } ) ] } {").unwrap())
}

#[test]
fn bubble_v1_blocks() {
    let (text, blocks) = rendered_blocks(&TaskInput::sequence([2, 3, 1, 5]), TraceStyle::BubbleV1);
    assert_eq!(blocks, golden("bubble_v1_2315.txt"));
    assert!(text.contains("Final List: 1, 2, 3, 5\n"));
    assert!(text.contains("Number of swaps: 2\n"));
}

#[test]
fn bubble_v2_blocks() {
    let (text, blocks) = rendered_blocks(&TaskInput::sequence([2, 3, 1, 5]), TraceStyle::BubbleV2);
    assert_eq!(blocks.len(), 13);
    assert_eq!(blocks, golden("bubble_v2_2315.txt"));
    assert!(text.contains("Number of swaps: 2\n"));
    assert!(text.trim_end().ends_with("END OF EXECUTION"));
}

#[test]
fn lcs_blocks() {
    let (text, blocks) = rendered_blocks(&TaskInput::pair("TA", "ATA"), TraceStyle::DslExec);
    let want = golden("lcs_ta_ata.txt");
    assert_eq!(blocks, want);
    let cells = blocks.iter().filter(|b| b.starts_with("i=")).count();
    assert_eq!(cells, 6);
    assert!(blocks[blocks.len() - 2].ends_with("C[2,3]=2"));
    assert!(text.trim_end().ends_with("</state>"));
}

#[test]
fn lss_blocks() {
    let (text, blocks) = rendered_blocks(&TaskInput::letters("cbcabb"), TraceStyle::Lss);
    assert_eq!(blocks, golden("lss_cbcabb.txt"));
    assert!(text.contains("The solution is: m_len=3\n"));
}

#[test]
fn paren_blocks() {
    let (text, blocks) = rendered_blocks(&paren_input(), TraceStyle::Paren);
    assert_eq!(blocks, golden("paren_prompt_input.txt"));
    assert!(text.contains("Sequence is: invalid\n"));
}

#[test]
fn rendering_is_deterministic() {
    for (input, style) in [
        (TaskInput::sequence([2, 3, 1, 5]), TraceStyle::BubbleV2),
        (TaskInput::letters("cbcabb"), TraceStyle::Lss),
        (paren_input(), TraceStyle::Paren),
    ] {
        assert_eq!(render_trace(&input, style).unwrap(), render_trace(&input, style).unwrap());
    }
}
