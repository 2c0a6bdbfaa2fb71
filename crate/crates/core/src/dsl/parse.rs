use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{CmpOp, Expr, LValue, Program, ShowArg, Stmt};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("indentation error at line {line}: {message}")]
    Indentation { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Sym(&'static str),
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
    end_col: usize,
}

fn lex(text: &str, line: usize, col0: usize) -> Result<Lexed, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut k = 0;
    let err = |k: usize, message: &str| ParseError::Syntax { line, column: col0 + k + 1, message: message.to_string() };
    while k < chars.len() {
        let c = chars[k];
        if c.is_whitespace() {
            k += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            toks.push((Tok::Ident(chars[start..k].iter().collect()), start));
        } else if c.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let s: String = chars[start..k].iter().collect();
            let v = s.parse::<i64>().map_err(|_| err(start, "integer literal out of range"))?;
            toks.push((Tok::Int(v), start));
        } else if c == '\'' || c == '"' {
            let start = k;
            k += 1;
            while k < chars.len() && chars[k] != c {
                k += 1;
            }
            if k >= chars.len() {
                return Err(err(start, "unterminated string literal"));
            }
            toks.push((Tok::Str(chars[start + 1..k].iter().collect()), start));
            k += 1;
        } else {
            let two: String = chars[k..(k + 2).min(chars.len())].iter().collect();
            let sym = match two.as_str() {
                ":=" => Some(":="),
                "==" => Some("=="),
                _ => None,
            };
            if let Some(s) = sym {
                toks.push((Tok::Sym(s), k));
                k += 2;
                continue;
            }
            let s = match c {
                '[' => "[",
                ']' => "]",
                '(' => "(",
                ')' => ")",
                ',' => ",",
                ':' => ":",
                '+' => "+",
                '-' => "-",
                '<' => "<",
                '>' => ">",
                '=' => "=",
                _ => return Err(err(k, "unexpected character")),
            };
            toks.push((Tok::Sym(s), k));
            k += 1;
        }
    }
    Ok(Lexed { toks, end_col: col0 + chars.len() + 1 })
}

struct Cursor<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    col0: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| self.col0 + c + 1)
    }

    fn err(&self, message: &str) -> ParseError {
        ParseError::Syntax { line: self.line, column: self.column(), message: message.to_string() }
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.err(&alloc::format!("expected `{s}`")))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(t)) if t == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.err("expected identifier")),
        }
    }

    fn done(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.err("unexpected trailing input")),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.sum()?;
        let op = if self.eat_sym("==") {
            CmpOp::Eq
        } else if self.eat_sym("<") {
            CmpOp::Lt
        } else if self.eat_sym(">") {
            CmpOp::Gt
        } else {
            return Ok(lhs);
        };
        let rhs = self.sum()?;
        Ok(Expr::Cmp(Box::new(lhs), op, Box::new(rhs)))
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.atom()?;
        loop {
            if self.eat_sym("+") {
                acc = Expr::Add(Box::new(acc), Box::new(self.atom()?));
            } else if self.eat_sym("-") {
                acc = Expr::Sub(Box::new(acc), Box::new(self.atom()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn indices(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut idx = alloc::vec![self.expr()?];
        while self.eat_sym(",") {
            idx.push(self.expr()?);
        }
        self.expect_sym("]")?;
        Ok(idx)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Expr::Int(v))
            }
            Some(Tok::Sym("-")) => {
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Int(v)) => {
                        self.pos += 1;
                        Ok(Expr::Int(-v))
                    }
                    _ => Err(self.err("expected integer after `-`")),
                }
            }
            Some(Tok::Str(s)) => {
                self.pos += 1;
                Ok(Expr::Str(s))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "detailed_max" && self.eat_sym("(") {
                    let a = self.expr()?;
                    self.expect_sym(",")?;
                    let b = self.expr()?;
                    self.expect_sym(")")?;
                    return Ok(Expr::DetailedMax(Box::new(a), Box::new(b)));
                }
                if self.eat_sym("[") {
                    return Ok(Expr::Index(name, self.indices()?));
                }
                Ok(Expr::Var(name))
            }
            _ => Err(self.err("expected expression")),
        }
    }

    fn show_arg(&mut self) -> Result<ShowArg, ParseError> {
        if let Some(Tok::Str(s)) = self.peek().cloned() {
            self.pos += 1;
            return Ok(ShowArg::Literal(s));
        }
        let name = self.ident()?;
        if !self.eat_sym("[") {
            return Ok(ShowArg::Name(name));
        }
        let mut elems = Vec::new();
        let mut ranges = Vec::new();
        loop {
            let lo = self.expr()?;
            if self.eat_sym(":") {
                ranges.push((lo, self.expr()?));
            } else {
                elems.push(lo);
            }
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym("]")?;
        match (elems.is_empty(), ranges.is_empty()) {
            (true, false) => Ok(ShowArg::Range(name, ranges)),
            (false, true) => Ok(ShowArg::Elem(name, elems)),
            _ => Err(self.err("mixing ranges and single indices is not supported")),
        }
    }
}

enum Header {
    Simple(Stmt),
    For { var: String, from: Expr, to: Expr },
    If(Expr),
    Else,
}

fn parse_line(text: &str, line: usize, col0: usize) -> Result<Header, ParseError> {
    let lexed = lex(text, line, col0)?;
    let mut c = Cursor { toks: &lexed.toks, pos: 0, line, col0, end_col: lexed.end_col };
    if c.eat_keyword("for") {
        let var = c.ident()?;
        if !c.eat_keyword("from") {
            return Err(c.err("expected `from`"));
        }
        let from = c.expr()?;
        if !c.eat_keyword("to") {
            return Err(c.err("expected `to`"));
        }
        let to = c.expr()?;
        c.done()?;
        return Ok(Header::For { var, from, to });
    }
    if c.eat_keyword("if") {
        let cond = c.expr()?;
        c.done()?;
        return Ok(Header::If(cond));
    }
    if c.eat_keyword("else") {
        c.done()?;
        return Ok(Header::Else);
    }
    if matches!(c.peek(), Some(Tok::Ident(n)) if n == "Show") {
        c.pos += 1;
        c.expect_sym("(")?;
        let mut args = Vec::new();
        if !c.eat_sym(")") {
            loop {
                args.push(c.show_arg()?);
                if c.eat_sym(")") {
                    break;
                }
                c.expect_sym(",")?;
            }
        }
        c.done()?;
        return Ok(Header::Simple(Stmt::Show(args)));
    }
    let name = c.ident()?;
    let target = if c.eat_sym("[") { LValue::Index(name, c.indices()?) } else { LValue::Var(name) };
    if !(c.eat_sym(":=") || c.eat_sym("=")) {
        return Err(c.err("expected `:=`"));
    }
    let value = c.expr()?;
    c.done()?;
    Ok(Header::Simple(Stmt::Assign(target, value)))
}

struct Line<'a> {
    number: usize,
    indent: usize,
    text: &'a str,
}

fn parse_block(lines: &[Line<'_>], pos: &mut usize, indent: usize) -> Result<Vec<Stmt>, ParseError> {
    let mut out: Vec<Stmt> = Vec::new();
    while *pos < lines.len() {
        let line = &lines[*pos];
        if line.indent < indent {
            break;
        }
        if line.indent > indent {
            return Err(ParseError::Indentation { line: line.number, message: "unexpected indent".into() });
        }
        *pos += 1;
        let header = parse_line(line.text, line.number, line.indent)?;
        let body = |pos: &mut usize| -> Result<Vec<Stmt>, ParseError> {
            match lines.get(*pos) {
                Some(next) if next.indent > indent => parse_block(lines, pos, next.indent),
                _ => Err(ParseError::Indentation { line: line.number, message: "expected an indented block".into() }),
            }
        };
        match header {
            Header::Simple(s) => out.push(s),
            Header::For { var, from, to } => {
                let body = body(pos)?;
                out.push(Stmt::For { var, from, to, body });
            }
            Header::If(cond) => {
                let then_body = body(pos)?;
                let mut else_body = Vec::new();
                if let Some(next) = lines.get(*pos) {
                    if next.indent == indent && next.text.trim() == "else" {
                        let else_line = next.number;
                        *pos += 1;
                        else_body = match lines.get(*pos) {
                            Some(n) if n.indent > indent => parse_block(lines, pos, n.indent)?,
                            _ => {
                                return Err(ParseError::Indentation {
                                    line: else_line,
                                    message: "expected an indented block".into(),
                                })
                            }
                        };
                    }
                }
                out.push(Stmt::If { cond, then_body, else_body });
            }
            Header::Else => {
                return Err(ParseError::Syntax {
                    line: line.number,
                    column: line.indent + 1,
                    message: "`else` without `if`".into(),
                })
            }
        }
    }
    Ok(out)
}

/// Parses program source; blocks are delimited by indentation.
pub fn parse_program(source: &str) -> Result<Program, ParseError> {
    let mut lines = Vec::new();
    for (k, raw) in source.lines().enumerate() {
        let text = raw.trim_end();
        if text.trim().is_empty() {
            continue;
        }
        if text.starts_with('\t') {
            return Err(ParseError::Indentation { line: k + 1, message: "tabs are not allowed".into() });
        }
        let indent = text.len() - text.trim_start().len();
        lines.push(Line { number: k + 1, indent, text: text.trim_start() });
    }
    let mut pos = 0;
    let first = lines.first().map_or(0, |l| l.indent);
    if first != 0 {
        return Err(ParseError::Indentation { line: lines[0].number, message: "unexpected indent".into() });
    }
    let body = parse_block(&lines, &mut pos, 0)?;
    if pos < lines.len() {
        return Err(ParseError::Indentation { line: lines[pos].number, message: "inconsistent dedent".into() });
    }
    Ok(Program { body })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::LCS_PROGRAM;

    #[test]
    fn single_assignment() {
        let p = parse_program("x := 5").unwrap();
        assert_eq!(p.body, [Stmt::Assign(LValue::Var("x".into()), Expr::Int(5))]);
    }

    #[test]
    fn truncated_for_is_a_syntax_error() {
        assert!(matches!(parse_program("for i from 1 to"), Err(ParseError::Syntax { line: 1, .. })));
    }

    #[test]
    fn lcs_program_shape() {
        let p = parse_program(LCS_PROGRAM).unwrap();
        assert_eq!(p.body.len(), 3);
        let Stmt::For { var, body, .. } = &p.body[1] else { panic!() };
        assert_eq!(var, "i");
        let Stmt::For { var, body, .. } = &body[0] else { panic!() };
        assert_eq!(var, "j");
        assert!(matches!(&body[0], Stmt::If { else_body, .. } if else_body.len() == 1));
        assert_eq!(p.body[2], Stmt::Show(alloc::vec![ShowArg::Literal("END".into())]));
    }

    #[test]
    fn missing_body_is_indentation_error() {
        assert!(matches!(parse_program("for i from 1 to 3\nx:=1"), Err(ParseError::Indentation { .. })));
        assert!(matches!(parse_program("x:=1\n    y:=2"), Err(ParseError::Indentation { line: 2, .. })));
    }

    #[test]
    fn plain_equals_assigns() {
        let p = parse_program("N:=1\nfor i from 0 to N\n    C[i,i]=-3").unwrap();
        assert_eq!(p.body.len(), 2);
    }
}
