//! Locating state blocks inside generated text.

use alloc::vec::Vec;

/// Byte positions of one block: `line_start` is the start of the line holding the opener
/// (so indentation can be kept), `inner` is the text between the delimiters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line_start: usize,
    pub open: usize,
    pub inner: (usize, usize),
    pub end: usize,
}

fn line_start(text: &str, pos: usize) -> usize {
    text[..pos].rfind('\n').map_or(0, |k| k + 1)
}

/// Every `<state> ... </state>` pair, in order.
pub fn tag_blocks(text: &str) -> Vec<Span> {
    delimited(text, "<state>", "</state>", false)
}

/// Every `State: ... EndState` pair confined to one line.
pub fn v1_blocks(text: &str) -> Vec<Span> {
    delimited(text, "State:", "EndState", true)
}

fn delimited(text: &str, open: &str, close: &str, same_line: bool) -> Vec<Span> {
    let mut out = Vec::new();
    let mut from = 0;
    while let Some(k) = text[from..].find(open) {
        let o = from + k;
        let body = o + open.len();
        let Some(c) = text[body..].find(close) else { break };
        let c = body + c;
        // a later opener before the closer means the earlier one was never closed
        if let Some(k2) = text[body..c].rfind(open) {
            from = body + k2;
            continue;
        }
        if same_line && text[body..c].contains('\n') {
            from = body;
            continue;
        }
        out.push(Span { line_start: line_start(text, o), open: o, inner: (body, c), end: c + close.len() });
        from = c + close.len();
    }
    out
}

/// Score-assignment displays: a `Score_assignment_X:` line followed by its values line.
pub fn assignment_blocks(text: &str) -> Vec<Span> {
    let mut out = Vec::new();
    let mut from = 0;
    const MARK: &str = "Score_assignment_";
    while let Some(k) = text[from..].find(MARK) {
        let o = from + k;
        let rest = &text[o..];
        let Some(nl) = rest.find('\n') else { break };
        let head = rest[..nl].trim_end();
        from = o + MARK.len();
        if !head.ends_with(':') || head[MARK.len()..head.len() - 1].contains(|c: char| !c.is_ascii_alphanumeric()) {
            continue;
        }
        let values_start = o + nl + 1;
        let values_end = text[values_start..].find('\n').map_or(text.len(), |k| values_start + k);
        if values_start >= text.len() {
            break;
        }
        out.push(Span {
            line_start: line_start(text, o),
            open: o,
            inner: (o + MARK.len(), values_end),
            end: values_end,
        });
        from = values_end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_last_complete_block() {
        let t = "x\n    <state> a </state>\n  <state> b </state>\n<state> c";
        let b = tag_blocks(t);
        assert_eq!(b.len(), 2);
        assert_eq!(&t[b[1].inner.0..b[1].inner.1], " b ");
        assert_eq!(&t[b[1].line_start..b[1].end], "  <state> b </state>");
    }

    #[test]
    fn v1_blocks_stay_on_one_line() {
        let t = "State: a=[1], n_swaps=0, swap_flag=false EndState\nThe state is:\nState: a=[1] EndState";
        assert_eq!(v1_blocks(t).len(), 2);
    }

    #[test]
    fn assignment_displays() {
        let t = "In Score_assignment_A, x is 2\nScore_assignment_B:\n    x=3, y=2\nnext";
        let b = assignment_blocks(t);
        assert_eq!(b.len(), 1);
        assert_eq!(&t[b[0].inner.0..b[0].inner.1], "B:\n    x=3, y=2");
    }
}
