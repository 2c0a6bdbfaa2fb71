//! Tracing interpreter. Narration follows the condensed in-trace register: loop headers
//! as `i:=1`, interrogative condition checks, and `detailed_max` spelled out.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::{CmpOp, Expr, LValue, Program, ShowArg, Stmt};
use super::show::{Binding, Env, ShowBlock, ShowLine, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("negative index {index} into `{name}`")]
    NegativeIndex { name: String, index: i64 },
    #[error("type error: {0}")]
    Type(String),
    #[error("execution exceeded {0} steps")]
    StepLimit(usize),
    #[error("no Show statement prints the fields {0:?}")]
    NoMatchingShow(Vec<String>),
}

/// Text up to and including one `Show` block (or the trailing text, with no block).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub text: String,
    pub block: Option<ShowBlock>,
    /// Byte offset of `<state>` within `text`.
    pub block_at: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub env: Env,
    pub pieces: Vec<Piece>,
}

impl Execution {
    pub fn text(&self) -> String {
        self.pieces.iter().map(|p| p.text.as_str()).collect()
    }

    pub fn blocks(&self) -> impl Iterator<Item = &ShowBlock> {
        self.pieces.iter().filter_map(|p| p.block.as_ref())
    }
}

pub const STEP_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PathStep {
    At(usize),
    Then,
    Else,
}

pub struct Interpreter {
    pub env: Env,
    narrate: bool,
    current: String,
    pieces: Vec<Piece>,
    steps: usize,
}

impl Interpreter {
    pub fn new(env: Env, narrate: bool) -> Self {
        Interpreter { env, narrate, current: String::new(), pieces: Vec::new(), steps: 0 }
    }

    fn line(&mut self, text: &str) {
        if self.narrate {
            self.current.push_str(text);
            self.current.push('\n');
        }
    }

    fn tick(&mut self) -> Result<(), InterpError> {
        self.steps += 1;
        if self.steps > STEP_LIMIT {
            return Err(InterpError::StepLimit(STEP_LIMIT));
        }
        Ok(())
    }

    fn finish(mut self) -> Execution {
        if !self.current.is_empty() {
            let text = core::mem::take(&mut self.current);
            self.pieces.push(Piece { text, block: None, block_at: 0 });
        }
        Execution { env: self.env, pieces: self.pieces }
    }

    fn index_values(&self, name: &str, idx: &[Expr]) -> Result<Vec<i64>, InterpError> {
        let mut out = Vec::with_capacity(idx.len());
        for e in idx {
            match self.eval(e)? {
                Value::Int(v) if v >= 0 => out.push(v),
                Value::Int(v) => return Err(InterpError::NegativeIndex { name: name.to_string(), index: v }),
                Value::Str(s) => return Err(InterpError::Type(format!("index `{s}` into `{name}` is not an integer"))),
            }
        }
        Ok(out)
    }

    fn int(&self, e: &Expr) -> Result<i64, InterpError> {
        match self.eval(e)? {
            Value::Int(v) => Ok(v),
            Value::Str(s) => Err(InterpError::Type(format!("`{s}` is not an integer"))),
        }
    }

    pub fn eval(&self, e: &Expr) -> Result<Value, InterpError> {
        Ok(match e {
            Expr::Int(v) => Value::Int(*v),
            Expr::Str(s) => Value::Str(s.clone()),
            Expr::Var(n) => self.env.get(n),
            Expr::Index(n, idx) => self.env.get_cell(n, &self.index_values(n, idx)?),
            Expr::Add(a, b) => Value::Int(self.int(a)? + self.int(b)?),
            Expr::Sub(a, b) => Value::Int(self.int(a)? - self.int(b)?),
            Expr::DetailedMax(a, b) => Value::Int(self.int(a)?.max(self.int(b)?)),
            Expr::Cmp(a, op, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                let truth = match op {
                    CmpOp::Eq => x == y,
                    CmpOp::Lt | CmpOp::Gt => {
                        let (Value::Int(x), Value::Int(y)) = (x, y) else {
                            return Err(InterpError::Type("ordering comparison needs integers".into()));
                        };
                        if *op == CmpOp::Lt {
                            x < y
                        } else {
                            x > y
                        }
                    }
                };
                Value::Int(truth as i64)
            }
        })
    }

    /// Expression text with every index evaluated, e.g. `C[i-1,j-1]+1` -> `C[0,1]+1`.
    fn resolved(&self, e: &Expr) -> Result<String, InterpError> {
        Ok(match e {
            Expr::Int(v) => format!("{v}"),
            Expr::Str(s) => format!("'{s}'"),
            Expr::Var(n) => n.clone(),
            Expr::Index(n, idx) => cell_label(n, &self.index_values(n, idx)?),
            Expr::Add(a, b) => format!("{}+{}", self.resolved(a)?, self.resolved(b)?),
            Expr::Sub(a, b) => format!("{}-{}", self.resolved(a)?, self.resolved(b)?),
            Expr::DetailedMax(a, b) => format!("detailed_max({},{})", self.resolved(a)?, self.resolved(b)?),
            Expr::Cmp(a, op, b) => format!("{}{}{}", self.resolved(a)?, op.symbol(), self.resolved(b)?),
        })
    }

    /// `name is value` for every variable or cell read by the expression, in order.
    fn references(&self, e: &Expr, out: &mut Vec<String>) -> Result<(), InterpError> {
        let desc = match e {
            Expr::Int(_) | Expr::Str(_) => return Ok(()),
            Expr::Var(n) => format!("{n} is {}", self.env.get(n)),
            Expr::Index(n, idx) => {
                let at = self.index_values(n, idx)?;
                format!("{} is {}", cell_label(n, &at), self.env.get_cell(n, &at))
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::DetailedMax(a, b) | Expr::Cmp(a, _, b) => {
                self.references(a, out)?;
                return self.references(b, out);
            }
        };
        if !out.contains(&desc) {
            out.push(desc);
        }
        Ok(())
    }

    fn assign(&mut self, target: &LValue, v: Value) -> Result<String, InterpError> {
        Ok(match target {
            LValue::Var(n) => {
                self.env.set(n, v);
                n.clone()
            }
            LValue::Index(n, idx) => {
                let at = self.index_values(n, idx)?;
                let label = cell_label(n, &at);
                self.env.set_cell(n, at, v);
                label
            }
        })
    }

    fn target_label(&self, target: &LValue) -> Result<String, InterpError> {
        Ok(match target {
            LValue::Var(n) => n.clone(),
            LValue::Index(n, idx) => cell_label(n, &self.index_values(n, idx)?),
        })
    }

    /// Assignment narration lines; the first line may be prefixed by the caller.
    fn exec_assign(&mut self, target: &LValue, expr: &Expr) -> Result<Vec<String>, InterpError> {
        let label = self.target_label(target)?;
        let value = self.eval(expr)?;
        let mut lines = Vec::new();
        match expr {
            Expr::DetailedMax(a, b) => {
                let (ra, rb) = (self.resolved(a)?, self.resolved(b)?);
                let (va, vb) = (self.eval(a)?, self.eval(b)?);
                lines.push(format!("{label}:=detailed_max({ra},{rb})"));
                lines.push(format!("  ... {ra} is {va}, {rb} is {vb}. {label} is the greater of"));
                lines.push(format!("  ...them. {label}:={value}"));
            }
            Expr::Int(_) | Expr::Str(_) => lines.push(format!("{label}:={value}")),
            _ => {
                let mut refs = Vec::new();
                self.references(expr, &mut refs)?;
                lines.push(format!("{label}:={}", self.resolved(expr)?));
                lines.push(format!("  ... {}. {label}:={value}", refs.join(", ")));
            }
        }
        self.assign(target, value)?;
        Ok(lines)
    }

    fn show(&mut self, args: &[ShowArg]) -> Result<(), InterpError> {
        let mut block = ShowBlock::default();
        let mut pending: Vec<Binding> = Vec::new();
        let flush = |pending: &mut Vec<Binding>, block: &mut ShowBlock| {
            if !pending.is_empty() {
                block.lines.push(ShowLine::Items(core::mem::take(pending)));
            }
        };
        for arg in args {
            match arg {
                ShowArg::Literal(s) => {
                    flush(&mut pending, &mut block);
                    block.lines.push(ShowLine::Literal(s.clone()));
                }
                ShowArg::Elem(n, idx) => {
                    let at = self.index_values(n, idx)?;
                    let value = self.env.get_cell(n, &at);
                    pending.push(Binding { name: n.clone(), index: at, value });
                }
                ShowArg::Name(n) if !self.env.is_array(n) => {
                    pending.push(Binding { name: n.clone(), index: Vec::new(), value: self.env.get(n) });
                }
                ShowArg::Name(n) => {
                    flush(&mut pending, &mut block);
                    let cells = &self.env.arrays[n];
                    let dims = cells.keys().map(|k| k.len()).max().unwrap_or(1);
                    let ranges: Vec<(i64, i64)> = (0..dims)
                        .map(|d| {
                            let lo = cells.keys().filter_map(|k| k.get(d)).min().copied().unwrap_or(0);
                            let hi = cells.keys().filter_map(|k| k.get(d)).max().copied().unwrap_or(0);
                            (lo, hi)
                        })
                        .collect();
                    if dims == 1 {
                        let items = cells
                            .iter()
                            .map(|(k, v)| Binding { name: n.clone(), index: k.clone(), value: v.clone() })
                            .collect();
                        block.lines.push(ShowLine::Items(items));
                    } else {
                        self.push_grid(&mut block, n, &ranges);
                    }
                }
                ShowArg::Range(n, ranges) => {
                    flush(&mut pending, &mut block);
                    let mut bounds = Vec::new();
                    for (lo, hi) in ranges {
                        let lo = self.index_values(n, core::slice::from_ref(lo))?[0];
                        let hi = self.index_values(n, core::slice::from_ref(hi))?[0];
                        bounds.push((lo, hi));
                    }
                    self.push_grid(&mut block, n, &bounds);
                }
            }
        }
        flush(&mut pending, &mut block);
        let rendered = block.render();
        let block_at = self.current.len();
        self.current.push_str(&rendered);
        self.current.push('\n');
        let text = core::mem::take(&mut self.current);
        self.pieces.push(Piece { text, block: Some(block), block_at });
        Ok(())
    }

    /// Rows of the first dimension on separate lines; 1-D ranges on one line.
    fn push_grid(&self, block: &mut ShowBlock, name: &str, bounds: &[(i64, i64)]) {
        let cell = |index: Vec<i64>| Binding { name: name.to_string(), value: self.env.get_cell(name, &index), index };
        match bounds {
            [(lo, hi)] => block.lines.push(ShowLine::Items((*lo..=*hi).map(|k| cell(alloc::vec![k])).collect())),
            [(r0, r1), (c0, c1)] => {
                for r in *r0..=*r1 {
                    block.lines.push(ShowLine::Items((*c0..=*c1).map(|c| cell(alloc::vec![r, c])).collect()));
                }
            }
            _ => {
                let mut index: Vec<Vec<i64>> = alloc::vec![Vec::new()];
                for (lo, hi) in bounds {
                    index = index
                        .into_iter()
                        .flat_map(|p| {
                            (*lo..=*hi).map(move |k| {
                                let mut q = p.clone();
                                q.push(k);
                                q
                            })
                        })
                        .collect();
                }
                block.lines.push(ShowLine::Items(index.into_iter().map(cell).collect()));
            }
        }
    }

    fn exec_block(&mut self, stmts: &[Stmt]) -> Result<(), InterpError> {
        for s in stmts {
            self.exec(s)?;
        }
        Ok(())
    }

    fn exec(&mut self, s: &Stmt) -> Result<(), InterpError> {
        self.tick()?;
        match s {
            Stmt::Assign(target, expr) => {
                for l in self.exec_assign(target, expr)? {
                    self.line(&l);
                }
            }
            Stmt::Show(args) => self.show(args)?,
            Stmt::For { var, from, to, body } => {
                let start = self.int(from)?;
                self.run_loop(var, start, to, body)?;
            }
            Stmt::If { cond, then_body, else_body } => {
                let truth = self.check(cond)?;
                let branch = if truth { then_body } else { else_body };
                self.exec_branch(truth, branch)?;
            }
        }
        Ok(())
    }

    fn run_loop(&mut self, var: &str, start: i64, to: &Expr, body: &[Stmt]) -> Result<(), InterpError> {
        let end = self.int(to)?;
        let mut v = start;
        while v <= end {
            self.tick()?;
            self.env.set(var, Value::Int(v));
            self.line(&format!("{var}:={v}"));
            self.exec_block(body)?;
            v += 1;
        }
        Ok(())
    }

    fn check(&mut self, cond: &Expr) -> Result<bool, InterpError> {
        let truth = matches!(self.eval(cond)?, Value::Int(v) if v != 0);
        if self.narrate {
            let mut refs = Vec::new();
            self.references(cond, &mut refs)?;
            let question = match cond {
                Expr::Cmp(a, op, b) => format!("{}{}{}", self.eval(a)?, op.symbol(), self.eval(b)?),
                other => format!("{}", self.eval(other)?),
            };
            let mut line = format!("Check if {}?  ", self.resolved(cond)?);
            for r in &refs {
                line.push_str(r);
                line.push(' ');
            }
            line.push_str(&format!("Is {question}?..."));
            self.line(&line);
        }
        Ok(truth)
    }

    fn exec_branch(&mut self, truth: bool, branch: &[Stmt]) -> Result<(), InterpError> {
        let verdict = if truth { "Yes." } else { "No." };
        match branch.first() {
            Some(Stmt::Assign(target, expr)) => {
                let lines = self.exec_assign(target, expr)?;
                self.line(&format!("  ... {verdict} {}", lines[0]));
                for l in &lines[1..] {
                    self.line(l);
                }
                self.exec_block(&branch[1..])
            }
            _ => {
                self.line(&format!("  ... {verdict}"));
                self.exec_block(branch)
            }
        }
    }

    /// Continues execution right after the statement at `path`.
    fn resume(&mut self, stmts: &[Stmt], path: &[PathStep]) -> Result<(), InterpError> {
        let Some(PathStep::At(k)) = path.first().copied() else {
            return self.exec_block(stmts);
        };
        let rest = &path[1..];
        if !rest.is_empty() {
            match &stmts[k] {
                Stmt::For { var, to, body, .. } => {
                    self.resume(body, rest)?;
                    let next = self.int(&Expr::Var(var.clone()))? + 1;
                    self.run_loop(var, next, to, body)?;
                }
                Stmt::If { then_body, else_body, .. } => {
                    let branch = if rest[0] == PathStep::Then { then_body } else { else_body };
                    self.resume(branch, &rest[1..])?;
                }
                _ => {}
            }
        }
        self.exec_block(&stmts[k + 1..])
    }
}

fn cell_label(name: &str, at: &[i64]) -> String {
    let idx: Vec<String> = at.iter().map(|v| format!("{v}")).collect();
    format!("{name}[{}]", idx.join(","))
}

pub fn interpret_program(program: &Program, env: Env, narrate: bool) -> Result<Execution, InterpError> {
    let mut it = Interpreter::new(env, narrate);
    it.exec_block(&program.body)?;
    Ok(it.finish())
}

fn find_show(stmts: &[Stmt], labels: &[String], path: &mut Vec<PathStep>) -> bool {
    for (k, s) in stmts.iter().enumerate() {
        path.push(PathStep::At(k));
        let found = match s {
            Stmt::Show(args) => args.len() == labels.len() && args.iter().zip(labels).all(|(a, l)| a.label() == l),
            Stmt::For { body, .. } => find_show(body, labels, path),
            Stmt::If { then_body, else_body, .. } => {
                path.push(PathStep::Then);
                if find_show(then_body, labels, path) {
                    true
                } else {
                    path.pop();
                    path.push(PathStep::Else);
                    let hit = find_show(else_body, labels, path);
                    if !hit {
                        path.pop();
                    }
                    hit
                }
            }
            Stmt::Assign(..) => false,
        };
        if found {
            return true;
        }
        path.pop();
    }
    false
}

/// Resumes after the first `Show` whose argument labels match the block's fields. The block's
/// bindings (including loop variables) are applied on top of `env` first.
pub fn resume_after_show(
    program: &Program,
    mut env: Env,
    block: &ShowBlock,
    narrate: bool,
) -> Result<Execution, InterpError> {
    let labels = block.names();
    let mut path = Vec::new();
    if !find_show(&program.body, &labels, &mut path) {
        return Err(InterpError::NoMatchingShow(labels));
    }
    env.absorb(block);
    let mut it = Interpreter::new(env, narrate);
    it.resume(&program.body, &path)?;
    Ok(it.finish())
}

/// Executes one top-level assignment in the interactive register: `a was 0. Now a=5.`
pub fn interactive_assign(env: &mut Env, target: &LValue, expr: &Expr) -> Result<String, InterpError> {
    let mut it = Interpreter::new(core::mem::take(env), true);
    let label = it.target_label(target)?;
    let before = match target {
        LValue::Var(n) => it.env.get(n),
        LValue::Index(n, idx) => {
            let at = it.index_values(n, idx)?;
            it.env.get_cell(n, &at)
        }
    };
    let value = it.eval(expr)?;
    it.assign(target, value.clone())?;
    *env = it.env;
    Ok(format!("{label} was {before}. Now {label}={value}."))
}
