//! `Show` output: the multi-line `<state>` blocks the interpreter prints.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Str(String),
}

impl Value {
    pub fn parse(text: &str) -> Value {
        match text.parse::<i64>() {
            Ok(v) => Value::Int(v),
            Err(_) => Value::Str(text.to_string()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

impl Default for Value {
    fn default() -> Self {
        Value::Int(0)
    }
}

/// Scalars plus sparse arrays; every unset read yields 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Env {
    pub scalars: BTreeMap<String, Value>,
    pub arrays: BTreeMap<String, BTreeMap<Vec<i64>, Value>>,
}

impl Env {
    pub fn get(&self, name: &str) -> Value {
        self.scalars.get(name).cloned().unwrap_or_default()
    }

    pub fn get_cell(&self, name: &str, index: &[i64]) -> Value {
        self.arrays.get(name).and_then(|a| a.get(index)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, name: &str, v: Value) {
        self.scalars.insert(name.to_string(), v);
    }

    pub fn set_cell(&mut self, name: &str, index: Vec<i64>, v: Value) {
        self.arrays.entry(name.to_string()).or_default().insert(index, v);
    }

    pub fn is_array(&self, name: &str) -> bool {
        self.arrays.get(name).is_some_and(|a| !a.is_empty())
    }

    /// Applies every binding of a shown block.
    pub fn absorb(&mut self, block: &ShowBlock) {
        for line in &block.lines {
            if let ShowLine::Items(items) = line {
                for b in items {
                    if b.index.is_empty() {
                        self.set(&b.name, b.value.clone());
                    } else {
                        self.set_cell(&b.name, b.index.clone(), b.value.clone());
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binding {
    pub name: String,
    pub index: Vec<i64>,
    pub value: Value,
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.index.is_empty() {
            let idx: Vec<String> = self.index.iter().map(|i| format!("{i}")).collect();
            write!(f, "[{}]", idx.join(","))?;
        }
        write!(f, "={}", self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ShowLine {
    Items(Vec<Binding>),
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ShowBlock {
    pub lines: Vec<ShowLine>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ShowParseError {
    #[error("block is empty")]
    Empty,
    #[error("cannot parse `{0}`")]
    Unparseable(String),
}

impl ShowBlock {
    /// Labels in first-appearance order: binding names, or the literal text.
    pub fn names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for line in &self.lines {
            match line {
                ShowLine::Items(items) => {
                    for b in items {
                        if !out.contains(&b.name) {
                            out.push(b.name.clone());
                        }
                    }
                }
                ShowLine::Literal(s) => out.push(s.clone()),
            }
        }
        out
    }

    pub fn is_literal(&self, text: &str) -> bool {
        matches!(&self.lines[..], [ShowLine::Literal(s)] if s == text)
    }

    pub fn scalar(&self, name: &str) -> Option<&Value> {
        self.bindings().find(|b| b.name == name && b.index.is_empty()).map(|b| &b.value)
    }

    pub fn cell(&self, name: &str, index: &[i64]) -> Option<&Value> {
        self.bindings().find(|b| b.name == name && b.index == index).map(|b| &b.value)
    }

    pub fn bindings(&self) -> impl Iterator<Item = &Binding> {
        self.lines.iter().flat_map(|l| match l {
            ShowLine::Items(items) => items.as_slice(),
            ShowLine::Literal(_) => &[],
        })
    }

    pub fn bindings_mut(&mut self) -> impl Iterator<Item = &mut Binding> {
        self.lines.iter_mut().flat_map(|l| match l {
            ShowLine::Items(items) => items.as_mut_slice(),
            ShowLine::Literal(_) => &mut [],
        })
    }

    /// One-line form for a single binding, multi-line otherwise.
    pub fn render(&self) -> String {
        if let [ShowLine::Items(items)] = &self.lines[..] {
            if items.len() == 1 {
                return format!("<state> {} </state>", items[0]);
            }
        }
        let mut out = String::from("<state>\n");
        for line in &self.lines {
            match line {
                ShowLine::Items(items) => {
                    let parts: Vec<String> = items.iter().map(|b| b.to_string()).collect();
                    out.push_str(&parts.join(" "));
                }
                ShowLine::Literal(s) => out.push_str(s),
            }
            out.push('\n');
        }
        out.push_str("</state>");
        out
    }

    /// Parses the text between `<state>` and `</state>`.
    pub fn parse(inner: &str) -> Result<ShowBlock, ShowParseError> {
        let mut lines = Vec::new();
        for raw in inner.lines() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if !line.contains('=') {
                if line.split_whitespace().count() != 1 {
                    return Err(ShowParseError::Unparseable(line.to_string()));
                }
                lines.push(ShowLine::Literal(line.to_string()));
                continue;
            }
            let mut items = Vec::new();
            for tok in line.split_whitespace() {
                items.push(parse_binding(tok).ok_or_else(|| ShowParseError::Unparseable(tok.to_string()))?);
            }
            lines.push(ShowLine::Items(items));
        }
        if lines.is_empty() {
            return Err(ShowParseError::Empty);
        }
        Ok(ShowBlock { lines })
    }
}

fn parse_binding(tok: &str) -> Option<Binding> {
    let (lhs, rhs) = tok.split_once('=')?;
    if rhs.is_empty() || lhs.is_empty() {
        return None;
    }
    let (name, index) = match lhs.split_once('[') {
        Some((name, rest)) => {
            let inner = rest.strip_suffix(']')?;
            let index = inner.split(',').map(|p| p.trim().parse::<i64>().ok()).collect::<Option<Vec<_>>>()?;
            (name, index)
        }
        None => (lhs, Vec::new()),
    };
    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') || name.is_empty() {
        return None;
    }
    Some(Binding { name: name.to_string(), index, value: Value::parse(rhs) })
}
