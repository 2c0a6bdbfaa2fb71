//! Dataset files (native JSONL and BIG-bench task JSON) and transcript output.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use irsa_core::model::{validate_dataset, AnswerValue, Bracket, ProblemInstance, RunConfig, TaskInput, TaskKind};
use irsa_core::puzzle::{parse_option, parse_prose, ClueParseError};
use irsa_core::runtime::RunResult;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Native,
    #[value(name = "bigbench")]
    BigBenchJson,
}

pub fn read_dataset(path: &Path) -> Result<Vec<ProblemInstance>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut rows = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: ProblemInstance =
            serde_json::from_str(&line).with_context(|| format!("{}:{}: bad row", path.display(), k + 1))?;
        rows.push(row);
    }
    validate_dataset(&rows).with_context(|| format!("{}: invalid dataset", path.display()))?;
    Ok(rows)
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?);
    for row in rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dataset(path: &Path, rows: &[ProblemInstance]) -> Result<()> {
    write_jsonl(path, rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub index: usize,
    pub message: String,
}

/// Rows that could not be mapped, kept rather than guessed at.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LoadReport {
    pub rows_read: usize,
    pub loaded: usize,
    pub errors: Vec<RowError>,
}

pub fn load_dataset(path: &Path, format: Format, task: Option<TaskKind>) -> Result<(Vec<ProblemInstance>, LoadReport)> {
    match format {
        Format::Native => {
            let rows = read_dataset(path)?;
            let report = LoadReport { rows_read: rows.len(), loaded: rows.len(), errors: Vec::new() };
            Ok((rows, report))
        }
        Format::BigBenchJson => {
            let Some(task) = task else { bail!("--task is required for BIG-bench files") };
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            let v: Value = serde_json::from_str(&text).with_context(|| format!("{}: not JSON", path.display()))?;
            load_bigbench(&v, task)
        }
    }
}

/// The option with the highest score, or the `target` string.
fn correct_option(example: &Value) -> Option<String> {
    if let Some(scores) = example.get("target_scores").and_then(Value::as_object) {
        return scores
            .iter()
            .filter_map(|(k, v)| v.as_f64().map(|s| (k, s)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _)| k.clone());
    }
    match example.get("target")? {
        Value::String(s) => Some(s.clone()),
        Value::Array(a) => a.first().and_then(Value::as_str).map(str::to_string),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn bracket_line(input: &str) -> Option<Vec<Bracket>> {
    input.lines().rev().find_map(|line| {
        let body = line.rsplit(':').next().unwrap_or(line).trim();
        if body.is_empty() {
            return None;
        }
        let spaced: String = body.chars().filter(|c| !c.is_whitespace()).flat_map(|c| [c, ' ']).collect();
        Bracket::parse_list(spaced.trim()).ok()
    })
}

fn lcs_strings(input: &str) -> Option<(String, String)> {
    input.lines().rev().find_map(|line| {
        let body = line.rsplit(':').next().unwrap_or(line).trim();
        let words: Vec<&str> = body.split_whitespace().collect();
        match words.as_slice() {
            [a, b] if a.chars().chain(b.chars()).all(|c| c.is_alphanumeric()) => Some((a.to_string(), b.to_string())),
            _ => None,
        }
    })
}

fn map_example(task: TaskKind, index: usize, example: &Value) -> Result<ProblemInstance, String> {
    let input = example.get("input").and_then(Value::as_str).ok_or("missing input")?;
    let answer = correct_option(example).ok_or("missing target")?;
    let id = format!("{}-bb-{index:04}", task.as_str());
    let (input, target) = match task {
        TaskKind::LogicalDeduction => {
            let mut p = parse_prose(input).map_err(|e| e.to_string())?;
            let (item, rank) = parse_option(&answer, p.vocab, p.n())
                .ok_or_else(|| ClueParseError::UnmappableClue(answer.clone()).to_string())?;
            p.question = rank;
            let item = p.items[p.index_of(&item).ok_or_else(|| format!("answer names unknown item `{item}`"))?].clone();
            (TaskInput::Puzzle(p), AnswerValue::ItemChoice(item))
        }
        TaskKind::ValidParentheses => {
            let symbols = bracket_line(input).ok_or("no bracket sequence in input")?;
            let valid = match answer.trim().to_lowercase().as_str() {
                "valid" | "true" | "yes" => true,
                "invalid" | "false" | "no" => false,
                other => return Err(format!("unreadable target `{other}`")),
            };
            (TaskInput::brackets(symbols), AnswerValue::Validity(valid))
        }
        TaskKind::Lcs => {
            let (s1, s2) = lcs_strings(input).ok_or("no string pair in input")?;
            let n: u64 = answer.trim().parse().map_err(|_| format!("unreadable target `{answer}`"))?;
            (TaskInput::pair(s1, s2), AnswerValue::LcsLength(n))
        }
        other => return Err(format!("no BIG-bench mapping for {other}")),
    };
    Ok(ProblemInstance::new(id, input, Some(target)))
}

/// Maps a BIG-bench task file's `examples`. Unmappable rows go to the report.
pub fn load_bigbench(v: &Value, task: TaskKind) -> Result<(Vec<ProblemInstance>, LoadReport)> {
    let examples = v.get("examples").and_then(Value::as_array).context("file has no `examples` array")?;
    let mut rows = Vec::new();
    let mut report = LoadReport { rows_read: examples.len(), ..LoadReport::default() };
    for (k, ex) in examples.iter().enumerate() {
        match map_example(task, k, ex) {
            Ok(row) => rows.push(row),
            Err(message) => report.errors.push(RowError { index: k, message }),
        }
    }
    report.loaded = rows.len();
    Ok((rows, report))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunHeader<'a> {
    pub config: &'a RunConfig,
    pub mode: String,
    pub prompt_hash: &'a str,
    pub instance_id: &'a str,
}

/// Appends one run: a header line, then one line per backend call.
pub fn write_transcript(w: &mut impl Write, header: &RunHeader<'_>, run: &RunResult) -> Result<()> {
    serde_json::to_writer(&mut *w, &serde_json::json!({ "run": header }))?;
    w.write_all(b"\n")?;
    for event in &run.transcript {
        serde_json::to_writer(&mut *w, event)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use irsa_core::puzzle::Clue;
    use serde_json::json;

    #[test]
    fn deduction_row() {
        let v = json!({"examples": [
            {"input": "The following paragraphs each describe a set of three objects arranged in a fixed order. The statements are logically consistent within each paragraph. On a branch, there are three birds: a robin, a finch, and a crow. The robin is to the left of the finch. The crow is the rightmost.",
             "target_scores": {"The robin is the leftmost.": 1, "The finch is the leftmost.": 0, "The crow is the leftmost.": 0}},
            {"input": "On a shelf, there are three books: a red book, a blue book, and a green book. The red book is adjacent to the blue book.",
             "target_scores": {"The red book is the leftmost.": 1}}
        ]});
        let (rows, report) = load_bigbench(&v, TaskKind::LogicalDeduction).unwrap();
        assert_eq!(rows.len(), 1);
        let TaskInput::Puzzle(p) = &rows[0].input else { panic!() };
        assert!(p.clues.contains(&Clue::Less { a: "robin".into(), b: "finch".into() }));
        assert_eq!(rows[0].target, Some(AnswerValue::ItemChoice("robin".into())));
        assert_eq!(report.errors.len(), 1);
        assert!(report.errors[0].message.contains("adjacent"));
    }

    #[test]
    fn paren_and_lcs_rows() {
        let v = json!({"examples": [{"input": "Sequence: ( [ ] ) {", "target": "Invalid"}]});
        let (rows, _) = load_bigbench(&v, TaskKind::ValidParentheses).unwrap();
        assert_eq!(rows[0].target, Some(AnswerValue::Validity(false)));
        let v = json!({"examples": [{"input": "Strings: ABCB BDCAB\nLength:", "target": "3"}]});
        let (rows, _) = load_bigbench(&v, TaskKind::Lcs).unwrap();
        assert_eq!(rows[0].input, TaskInput::pair("ABCB", "BDCAB"));
    }
}
