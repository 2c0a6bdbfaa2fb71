use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Str(String),
    Var(String),
    /// `C[r,c]` or `a[k]`.
    Index(String, Vec<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    DetailedMax(Box<Expr>, Box<Expr>),
    Cmp(Box<Expr>, CmpOp, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Lt,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LValue {
    Var(String),
    Index(String, Vec<Expr>),
}

impl LValue {
    pub fn name(&self) -> &str {
        match self {
            LValue::Var(n) | LValue::Index(n, _) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShowArg {
    /// A scalar, or a whole vector/matrix when the name refers to one.
    Name(String),
    Elem(String, Vec<Expr>),
    /// Inclusive ranges per dimension, `C[0:i,0:N]`.
    Range(String, Vec<(Expr, Expr)>),
    Literal(String),
}

impl ShowArg {
    pub fn label(&self) -> &str {
        match self {
            ShowArg::Name(n) | ShowArg::Elem(n, _) | ShowArg::Range(n, _) => n,
            ShowArg::Literal(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign(LValue, Expr),
    Show(Vec<ShowArg>),
    For { var: String, from: Expr, to: Expr, body: Vec<Stmt> },
    If { cond: Expr, then_body: Vec<Stmt>, else_body: Vec<Stmt> },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Program {
    pub body: Vec<Stmt>,
}

fn join_exprs(items: &[Expr]) -> String {
    items.iter().map(pretty_expr).collect::<Vec<_>>().join(",")
}

pub fn pretty_expr(e: &Expr) -> String {
    match e {
        Expr::Int(v) => format!("{v}"),
        Expr::Str(s) => format!("'{s}'"),
        Expr::Var(n) => n.clone(),
        Expr::Index(n, idx) => format!("{n}[{}]", join_exprs(idx)),
        Expr::Add(a, b) => format!("{}+{}", pretty_expr(a), pretty_operand(b)),
        Expr::Sub(a, b) => format!("{}-{}", pretty_expr(a), pretty_operand(b)),
        Expr::DetailedMax(a, b) => format!("detailed_max({},{})", pretty_expr(a), pretty_expr(b)),
        Expr::Cmp(a, op, b) => format!("{}{}{}", pretty_expr(a), op.symbol(), pretty_expr(b)),
    }
}

fn pretty_operand(e: &Expr) -> String {
    match e {
        Expr::Add(..) | Expr::Sub(..) => format!("({})", pretty_expr(e)),
        _ => pretty_expr(e),
    }
}

pub fn pretty_lvalue(l: &LValue) -> String {
    match l {
        LValue::Var(n) => n.clone(),
        LValue::Index(n, idx) => format!("{n}[{}]", join_exprs(idx)),
    }
}

fn pretty_show_arg(a: &ShowArg) -> String {
    match a {
        ShowArg::Name(n) => n.clone(),
        ShowArg::Elem(n, idx) => format!("{n}[{}]", join_exprs(idx)),
        ShowArg::Range(n, ranges) => {
            let parts: Vec<String> =
                ranges.iter().map(|(lo, hi)| format!("{}:{}", pretty_expr(lo), pretty_expr(hi))).collect();
            format!("{n}[{}]", parts.join(","))
        }
        ShowArg::Literal(s) => format!("'{s}'"),
    }
}

fn pretty_block(stmts: &[Stmt], depth: usize, out: &mut String) {
    let pad = "    ".repeat(depth);
    for s in stmts {
        match s {
            Stmt::Assign(l, e) => out.push_str(&format!("{pad}{}:={}\n", pretty_lvalue(l), pretty_expr(e))),
            Stmt::Show(args) => {
                let parts: Vec<String> = args.iter().map(pretty_show_arg).collect();
                out.push_str(&format!("{pad}Show({})\n", parts.join(", ")));
            }
            Stmt::For { var, from, to, body } => {
                out.push_str(&format!("{pad}for {var} from {} to {}\n", pretty_expr(from), pretty_expr(to)));
                pretty_block(body, depth + 1, out);
            }
            Stmt::If { cond, then_body, else_body } => {
                out.push_str(&format!("{pad}if {}\n", pretty_expr(cond)));
                pretty_block(then_body, depth + 1, out);
                if !else_body.is_empty() {
                    out.push_str(&format!("{pad}else\n"));
                    pretty_block(else_body, depth + 1, out);
                }
            }
        }
    }
}

/// Canonical source text with 4-space blocks.
pub fn pretty(p: &Program) -> String {
    let mut out = String::new();
    pretty_block(&p.body, 0, &mut out);
    out
}
