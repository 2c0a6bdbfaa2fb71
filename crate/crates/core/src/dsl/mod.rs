//! The small imperative language used by the interpreter prompt: assignments, `Show`,
//! inclusive `for` loops, `if`/`else`, and `detailed_max`.

pub mod ast;
pub mod interp;
pub mod parse;
pub mod show;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use ast::{pretty, Expr, LValue, Program, ShowArg, Stmt};
pub use interp::{interactive_assign, interpret_program, resume_after_show, Execution, InterpError, Piece};
pub use parse::{parse_program, ParseError};
pub use show::{Binding, Env, ShowBlock, ShowLine, ShowParseError, Value};

/// The double-loop longest-common-subsequence program, as listed in the interpreter prompt.
pub const LCS_PROGRAM: &str = "Show(a,b,M,N)
for i from 1 to M
    for j from 1 to N
        if a[i]==b[j]
            C[i,j]:=C[i-1,j-1]+1
        else
            C[i,j]:=detailed_max(C[i,j-1],C[i-1,j])
        Show(i, j, M, N, C[0:i,0:N])
Show('END')
";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("both sequences must be non-empty")]
    EmptyInput,
    #[error("sequence element `{0}` would not survive the prep format")]
    BadSymbol(char),
}

/// Prep lines declaring `a[k]`, `b[k]`, `M` and `N`, plus the fixed LCS program source.
pub fn compile_lcs(s1: &str, s2: &str) -> Result<(String, String), CompileError> {
    if s1.is_empty() || s2.is_empty() {
        return Err(CompileError::EmptyInput);
    }
    if let Some(c) = s1.chars().chain(s2.chars()).find(|c| c.is_whitespace() || *c == '=' || *c == '[') {
        return Err(CompileError::BadSymbol(c));
    }
    let decl = |name: &str, s: &str| {
        s.chars().enumerate().map(|(k, c)| format!("{name}[{}]={c}", k + 1)).collect::<Vec<_>>().join(" ")
    };
    let prep = format!("{}\n{}\nM={} N={}", decl("a", s1), decl("b", s2), s1.chars().count(), s2.chars().count());
    Ok((prep, String::from(LCS_PROGRAM)))
}

/// Environment declared by prep lines.
pub fn prep_env(prep: &str) -> Result<Env, ShowParseError> {
    let mut env = Env::default();
    env.absorb(&ShowBlock::parse(prep)?);
    Ok(env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::lcs_table;

    #[test]
    fn compile_ta_ata() {
        let (prep, program) = compile_lcs("TA", "ATA").unwrap();
        assert_eq!(prep, "a[1]=T a[2]=A\nb[1]=A b[2]=T b[3]=A\nM=2 N=3");
        assert_eq!(program, LCS_PROGRAM);
        assert_eq!(compile_lcs("", "A"), Err(CompileError::EmptyInput));
    }

    fn final_length(s1: &str, s2: &str) -> Value {
        let (prep, program) = compile_lcs(s1, s2).unwrap();
        let p = parse_program(&program).unwrap();
        let e = interpret_program(&p, prep_env(&prep).unwrap(), false).unwrap();
        e.env.get_cell("C", &[s1.len() as i64, s2.len() as i64])
    }

    #[test]
    fn compiled_program_matches_oracle() {
        assert_eq!(final_length("A", "A"), Value::Int(1));
        assert_eq!(final_length("bccba", "ccaa"), Value::Int(lcs_table("bccba", "ccaa").length() as i64));
        assert_eq!(final_length("bccba", "ccaa"), Value::Int(3));
    }

    #[test]
    fn pretty_is_a_fixed_point() {
        let p = parse_program(LCS_PROGRAM).unwrap();
        assert_eq!(parse_program(&pretty(&p)).unwrap(), p);
    }
}
