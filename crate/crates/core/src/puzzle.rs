//! Total-order deduction puzzles: clue types, surface vocabularies, and the canonical
//! clue grammar used both to render puzzle prose and to read it back.
//!
//! Score convention: a larger score means "more" of the ordering attribute. Positional
//! puzzles map leftmost to 1 and rightmost to N, finishing-order puzzles map first to 1.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::normalize_item;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Clue {
    /// `item` holds score `rank`.
    Equal { item: String, rank: usize },
    /// score(a) < score(b).
    Less { a: String, b: String },
    /// score(a) > score(b).
    Greater { a: String, b: String },
}

impl Clue {
    pub fn items(&self) -> impl Iterator<Item = &str> {
        let (first, second) = match self {
            Clue::Equal { item, .. } => (item.as_str(), None),
            Clue::Less { a, b } | Clue::Greater { a, b } => (a.as_str(), Some(b.as_str())),
        };
        core::iter::once(first).chain(second)
    }

    /// Evaluates the clue against scores indexed through `score_of`.
    pub fn holds(&self, score_of: impl Fn(&str) -> Option<usize>) -> bool {
        match self {
            Clue::Equal { item, rank } => score_of(item) == Some(*rank),
            Clue::Less { a, b } => matches!((score_of(a), score_of(b)), (Some(x), Some(y)) if x < y),
            Clue::Greater { a, b } => matches!((score_of(a), score_of(b)), (Some(x), Some(y)) if x > y),
        }
    }
}

/// Surface vocabulary of a puzzle: what the ordering attribute is called.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vocab {
    #[default]
    Size,
    Position,
    Price,
    Age,
    Finish,
}

const ORDINALS: [&str; 8] = ["zeroth", "first", "second", "third", "fourth", "fifth", "sixth", "seventh"];
const NUMBER_WORDS: [&str; 8] = ["zero", "one", "two", "three", "four", "five", "six", "seven"];

pub fn ordinal(k: usize) -> String {
    ORDINALS.get(k).map(|s| s.to_string()).unwrap_or_else(|| format!("{k}th"))
}

pub fn number_word(k: usize) -> String {
    NUMBER_WORDS.get(k).map(|s| s.to_string()).unwrap_or_else(|| format!("{k}"))
}

/// A rank counted from the low end (1 = lowest score) or from the high end (1 = highest).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankRef {
    FromLow(usize),
    FromHigh(usize),
}

impl RankRef {
    pub fn resolve(self, n: usize) -> Option<usize> {
        match self {
            RankRef::FromLow(j) if (1..=n).contains(&j) => Some(j),
            RankRef::FromHigh(j) if (1..=n).contains(&j) => Some(n + 1 - j),
            _ => None,
        }
    }
}

type Phrase = fn(&str) -> String;

impl Vocab {
    pub fn from_name(name: &str) -> Option<Vocab> {
        Some(match name {
            "size" => Vocab::Size,
            "position" => Vocab::Position,
            "price" => Vocab::Price,
            "age" => Vocab::Age,
            "finish" => Vocab::Finish,
            _ => return None,
        })
    }

    pub fn dimension(self) -> &'static str {
        match self {
            Vocab::Size => "size",
            Vocab::Position => "position from the left",
            Vocab::Price => "price",
            Vocab::Age => "age",
            Vocab::Finish => "finishing place",
        }
    }

    pub fn units(self) -> (&'static str, &'static str) {
        match self {
            Vocab::Size => ("pound", "pounds"),
            Vocab::Position => ("position", "positions"),
            Vocab::Price => ("dollar", "dollars"),
            Vocab::Age => ("year", "years"),
            Vocab::Finish => ("place", "places"),
        }
    }

    pub fn noun(self) -> &'static str {
        match self {
            Vocab::Size => "object",
            Vocab::Position => "book",
            Vocab::Price => "fruit",
            Vocab::Age => "vehicle",
            Vocab::Finish => "golfer",
        }
    }

    /// Relation words, `(less, greater)`, as they appear after the verb.
    pub fn relation_words(self) -> (&'static str, &'static str) {
        match self {
            Vocab::Size => ("smaller", "bigger"),
            Vocab::Position => ("to the left", "to the right"),
            Vocab::Price => ("less expensive", "more expensive"),
            Vocab::Age => ("newer", "older"),
            Vocab::Finish => ("above", "below"),
        }
    }

    fn relation_suffix(self) -> &'static str {
        match self {
            Vocab::Size | Vocab::Price | Vocab::Age => " than",
            Vocab::Position => " of",
            Vocab::Finish => "",
        }
    }

    fn verb_for(self, subject: &str) -> &'static str {
        match self {
            Vocab::Finish => "finished",
            Vocab::Price if subject.ends_with('s') => "are",
            _ => "is",
        }
    }

    /// Phrase after the verb for "holds score `rank` of `n`", e.g. `the second from the right`.
    pub fn rank_phrase(self, rank: usize, n: usize) -> String {
        let from_high = n + 1 - rank;
        let use_high = from_high < rank;
        match self {
            Vocab::Size => match (rank, from_high) {
                (_, 1) => "the biggest".into(),
                (1, _) => "the smallest".into(),
                _ if use_high => format!("the {} biggest", ordinal(from_high)),
                _ => format!("the {} smallest", ordinal(rank)),
            },
            Vocab::Position => match (rank, from_high) {
                (_, 1) => "the rightmost".into(),
                (1, _) => "the leftmost".into(),
                _ if use_high => format!("the {} from the right", ordinal(from_high)),
                _ => format!("the {} from the left", ordinal(rank)),
            },
            Vocab::Price => match (rank, from_high) {
                (_, 1) => "the most expensive".into(),
                (1, _) => "the cheapest".into(),
                _ if use_high => format!("the {}-most expensive", ordinal(from_high)),
                _ => format!("the {}-cheapest", ordinal(rank)),
            },
            Vocab::Age => match (rank, from_high) {
                (_, 1) => "the oldest".into(),
                (1, _) => "the newest".into(),
                _ if use_high => format!("the {}-oldest", ordinal(from_high)),
                _ => format!("the {}-newest", ordinal(rank)),
            },
            Vocab::Finish => match (rank, from_high) {
                (_, 1) => "last".into(),
                _ if use_high => format!("{}-to-last", ordinal(from_high)),
                _ => ordinal(rank),
            },
        }
    }

    /// The normalization table: every surface phrase of this vocabulary with the relation it
    /// denotes. Rank phrases appear for every ordinal up to seven from both ends.
    pub fn phrase_table(self) -> Vec<(String, Relation)> {
        let mut table = Vec::new();
        let (less, greater) = self.relation_words();
        let suffix = self.relation_suffix();
        table.push((format!("{less}{suffix}"), Relation::Less));
        table.push((format!("{greater}{suffix}"), Relation::Greater));
        let (low1, high1, low_k, high_k): (&str, &str, Phrase, Phrase) = match self {
            Vocab::Size => {
                ("the smallest", "the biggest", |o| format!("the {o} smallest"), |o| format!("the {o} biggest"))
            }
            Vocab::Position => (
                "the leftmost",
                "the rightmost",
                |o| format!("the {o} from the left"),
                |o| format!("the {o} from the right"),
            ),
            Vocab::Price => (
                "the cheapest",
                "the most expensive",
                |o| format!("the {o}-cheapest"),
                |o| format!("the {o}-most expensive"),
            ),
            Vocab::Age => ("the newest", "the oldest", |o| format!("the {o}-newest"), |o| format!("the {o}-oldest")),
            Vocab::Finish => ("first", "last", |o| o.to_string(), |o| format!("{o}-to-last")),
        };
        table.push((low1.into(), Relation::Rank(RankRef::FromLow(1))));
        table.push((high1.into(), Relation::Rank(RankRef::FromHigh(1))));
        for k in 2..=7 {
            let o = ordinal(k);
            table.push((low_k(&o), Relation::Rank(RankRef::FromLow(k))));
            table.push((high_k(&o), Relation::Rank(RankRef::FromHigh(k))));
        }
        // synonyms seen in the wild
        match self {
            Vocab::Size => {
                table.push(("larger than".into(), Relation::Greater));
                table.push(("the largest".into(), Relation::Rank(RankRef::FromHigh(1))));
            }
            Vocab::Price => {
                table.push(("cheaper than".into(), Relation::Less));
            }
            Vocab::Finish => {
                table.push(("second-to-last".into(), Relation::Rank(RankRef::FromHigh(2))));
            }
            _ => {}
        }
        // longest first so that "the second from the left" wins over shorter overlaps
        table.sort_by_key(|t| core::cmp::Reverse(t.0.len()));
        table
    }

    pub fn all() -> [Vocab; 5] {
        [Vocab::Size, Vocab::Position, Vocab::Price, Vocab::Age, Vocab::Finish]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Less,
    Greater,
    Rank(RankRef),
}

/// A total-order puzzle: the question asks which item holds `question` (a rank in 1..=N).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeductionPuzzle {
    pub items: Vec<String>,
    pub clues: Vec<Clue>,
    pub question: usize,
    #[serde(default)]
    pub vocab: Vocab,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PuzzleError {
    #[error("puzzle must have between 1 and 7 items, got {0}")]
    ItemCount(usize),
    #[error("clue mentions unknown item `{0}`")]
    UnknownItem(String),
    #[error("rank {rank} outside 1..={n}")]
    RankOutOfRange { rank: usize, n: usize },
    #[error("duplicate item `{0}`")]
    DuplicateItem(String),
}

impl DeductionPuzzle {
    pub fn n(&self) -> usize {
        self.items.len()
    }

    pub fn index_of(&self, item: &str) -> Option<usize> {
        let key = normalize_item(item);
        self.items.iter().position(|i| normalize_item(i) == key)
    }

    pub fn validate(&self) -> Result<(), PuzzleError> {
        let n = self.n();
        if !(1..=7).contains(&n) {
            return Err(PuzzleError::ItemCount(n));
        }
        for (k, item) in self.items.iter().enumerate() {
            if self.items[..k].iter().any(|o| normalize_item(o) == normalize_item(item)) {
                return Err(PuzzleError::DuplicateItem(item.clone()));
            }
        }
        for clue in &self.clues {
            for item in clue.items() {
                if self.index_of(item).is_none() {
                    return Err(PuzzleError::UnknownItem(item.to_string()));
                }
            }
            if let Clue::Equal { rank, .. } = clue {
                if !(1..=n).contains(rank) {
                    return Err(PuzzleError::RankOutOfRange { rank: *rank, n });
                }
            }
        }
        if !(1..=n).contains(&self.question) {
            return Err(PuzzleError::RankOutOfRange { rank: self.question, n });
        }
        Ok(())
    }

    /// The three-object puzzle used as the deduction exemplar.
    pub fn exemplar() -> DeductionPuzzle {
        DeductionPuzzle {
            items: ["obj1", "obj2", "obj3"].iter().map(|s| s.to_string()).collect(),
            clues: alloc::vec![
                Clue::Equal { item: "obj1".into(), rank: 3 },
                Clue::Less { a: "obj2".into(), b: "obj3".into() },
                Clue::Greater { a: "obj1".into(), b: "obj2".into() },
            ],
            question: 3,
            vocab: Vocab::Size,
        }
    }

    /// Subject form of an item at the start of a sentence.
    pub fn subject(&self, item: &str) -> String {
        match self.vocab {
            Vocab::Size | Vocab::Finish => item.to_string(),
            _ => format!("The {item}"),
        }
    }

    fn object(&self, item: &str) -> String {
        match self.vocab {
            Vocab::Size | Vocab::Finish => item.to_string(),
            _ => format!("the {item}"),
        }
    }

    /// One clue as a sentence, without the final period.
    pub fn clue_sentence(&self, clue: &Clue) -> String {
        match clue {
            Clue::Equal { item, rank } => {
                format!(
                    "{} {} {}",
                    self.subject(item),
                    self.vocab.verb_for(item),
                    self.vocab.rank_phrase(*rank, self.n())
                )
            }
            Clue::Less { a, b } | Clue::Greater { a, b } => {
                let (less, greater) = self.vocab.relation_words();
                let word = if matches!(clue, Clue::Less { .. }) { less } else { greater };
                format!(
                    "{} {} {}{} {}",
                    self.subject(a),
                    self.vocab.verb_for(a),
                    word,
                    self.vocab.relation_suffix(),
                    self.object(b)
                )
            }
        }
    }

    /// Clue sentence with items replaced by quoted variable names, e.g. `'y' is smaller than 'z'`.
    pub fn clue_with_vars(&self, clue: &Clue, var_of: impl Fn(&str) -> String) -> String {
        match clue {
            Clue::Equal { item, rank } => {
                format!("'{}' {} {}", var_of(item), self.vocab.verb_for(""), self.vocab.rank_phrase(*rank, self.n()))
            }
            Clue::Less { a, b } | Clue::Greater { a, b } => {
                let (less, greater) = self.vocab.relation_words();
                let word = if matches!(clue, Clue::Less { .. }) { less } else { greater };
                format!(
                    "'{}' {} {}{} '{}'",
                    var_of(a),
                    self.vocab.verb_for(""),
                    word,
                    self.vocab.relation_suffix(),
                    var_of(b)
                )
            }
        }
    }

    pub fn question_text(&self) -> String {
        let noun = self.vocab.noun();
        let phrase = self.vocab.rank_phrase(self.question, self.n());
        match self.vocab {
            Vocab::Finish => format!("Which {noun} finished {phrase}?"),
            _ => format!("Which {noun} is {phrase}?"),
        }
    }

    fn setting_sentence(&self) -> String {
        let n = number_word(self.n());
        let list = |with_article: bool| {
            let names: Vec<String> =
                self.items.iter().map(|i| if with_article { format!("a {i}") } else { i.clone() }).collect();
            join_with_and(&names)
        };
        match self.vocab {
            Vocab::Size => "The following objects need to be ordered.".into(),
            Vocab::Position => format!("On a shelf, there are {n} books: {}.", list(true)),
            Vocab::Price => format!("A fruit stand sells {n} fruits: {}.", list(false)),
            Vocab::Age => format!("In an antique car show, there are {n} vehicles: {}.", list(true)),
            Vocab::Finish => format!("In a golf tournament, there were {n} golfers: {}.", list(false)),
        }
    }

    /// The puzzle paragraph: setting sentence followed by one sentence per clue.
    pub fn prose(&self) -> String {
        let mut out = self.setting_sentence();
        for clue in &self.clues {
            out.push(' ');
            out.push_str(&self.clue_sentence(clue));
            out.push('.');
        }
        out
    }

    /// Items in order of first mention across the clues (Size puzzles list no items).
    pub fn items_by_first_mention(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for clue in &self.clues {
            for item in clue.items() {
                if !out.iter().any(|o| normalize_item(o) == normalize_item(item)) {
                    out.push(item.to_string());
                }
            }
        }
        for item in &self.items {
            if !out.iter().any(|o| normalize_item(o) == normalize_item(item)) {
                out.push(item.clone());
            }
        }
        out
    }
}

fn join_with_and(names: &[String]) -> String {
    match names.len() {
        0 => String::new(),
        1 => names[0].clone(),
        2 => format!("{} and {}", names[0], names[1]),
        _ => {
            let head = names[..names.len() - 1].join(", ");
            format!("{head}, and {}", names[names.len() - 1])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClueParseError {
    #[error("clue `{0}` is outside the canonical clue grammar")]
    UnmappableClue(String),
    #[error("clue `{clue}` mentions unknown item `{item}`")]
    UnknownItem { clue: String, item: String },
    #[error("question `{0}` could not be mapped to a rank")]
    UnmappableQuestion(String),
    #[error("no items could be identified")]
    NoItems,
    #[error("rank in `{0}` is out of range")]
    RankOutOfRange(String),
}

/// A clue before its rank has been resolved against the item count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawClue {
    Rel { a: String, b: String, less: bool },
    Rank { item: String, rank: RankRef },
}

fn strip_subject(s: &str) -> String {
    normalize_item(s)
}

/// Maps one sentence to a clue using the vocabulary's normalization table.
pub fn parse_clue_sentence(sentence: &str, vocab: Vocab) -> Option<RawClue> {
    let s = sentence.trim().trim_end_matches('.').trim().to_lowercase();
    let verbs: &[&str] = match vocab {
        Vocab::Finish => &["finished"],
        _ => &["is", "are"],
    };
    for (phrase, rel) in vocab.phrase_table() {
        for verb in verbs {
            let connective = format!(" {verb} {phrase}");
            match rel {
                Relation::Rank(rank) => {
                    if let Some(subject) = s.strip_suffix(connective.as_str()) {
                        return Some(RawClue::Rank { item: strip_subject(subject), rank });
                    }
                }
                Relation::Less | Relation::Greater => {
                    let infix = format!("{connective} ");
                    if let Some(pos) = s.find(infix.as_str()) {
                        let a = strip_subject(&s[..pos]);
                        let b = strip_subject(&s[pos + infix.len()..]);
                        if a.is_empty() || b.is_empty() {
                            continue;
                        }
                        return Some(RawClue::Rel { a, b, less: rel == Relation::Less });
                    }
                }
            }
        }
    }
    None
}

/// Tries every vocabulary and returns the first that maps the sentence.
pub fn detect_clue(sentence: &str) -> Option<(Vocab, RawClue)> {
    Vocab::all().into_iter().find_map(|v| parse_clue_sentence(sentence, v).map(|c| (v, c)))
}

/// Reads a rank phrase out of a question such as `Which is leftmost?`.
pub fn parse_question(question: &str, vocab: Vocab) -> Option<RankRef> {
    let q = question.trim().trim_end_matches('?').trim().to_lowercase();
    let mut rest = q.strip_prefix("which").unwrap_or(&q).trim().to_string();
    // any noun may sit between `which` and the verb: `Which bird is ...`
    if let Some((word, r)) = rest.split_once(' ') {
        if !matches!(word, "is" | "are" | "finished") {
            rest = r.trim().to_string();
        }
    }
    for verb in ["is", "are", "finished"] {
        if let Some(r) = rest.strip_prefix(verb) {
            if r.starts_with(' ') {
                rest = r.trim().to_string();
                break;
            }
        }
    }
    let candidates = [rest.clone(), format!("the {rest}")];
    vocab.phrase_table().into_iter().find_map(|(phrase, rel)| match rel {
        Relation::Rank(r) if candidates.iter().any(|c| c == &phrase) => Some(r),
        _ => None,
    })
}

/// Splits prose into sentences on `. ` boundaries.
pub fn sentences(prose: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    let chars: Vec<char> = prose.chars().collect();
    for (k, &c) in chars.iter().enumerate() {
        current.push(c);
        let boundary = c == '.' && chars.get(k + 1).is_none_or(|n| n.is_whitespace());
        if boundary {
            let t = current.trim().to_string();
            if !t.is_empty() {
                out.push(t);
            }
            current.clear();
        }
    }
    let t = current.trim().to_string();
    if !t.is_empty() {
        out.push(t);
    }
    out
}

/// Item list from a setting sentence such as `there are five books: a gray book, ..., and a black book.`
pub fn parse_item_list(sentence: &str) -> Option<Vec<String>> {
    let (_, list) = sentence.split_once(':')?;
    let list = list.trim().trim_end_matches('.');
    let items: Vec<String> = list
        .split(',')
        .flat_map(|part| {
            let part = part.trim();
            let part = part.strip_prefix("and ").unwrap_or(part);
            part.split(" and ").map(|p| p.trim().to_string()).collect::<Vec<_>>()
        })
        .filter(|p| !p.is_empty())
        .map(|p| normalize_item(&p))
        .collect();
    (!items.is_empty()).then_some(items)
}

/// Parses puzzle prose plus a question into a puzzle. Sentences that carry neither an item
/// list nor a mappable clue are reported as `UnmappableClue`.
pub fn parse_puzzle(prose: &str, question: &str) -> Result<DeductionPuzzle, ClueParseError> {
    let mut p = parse_prose(prose)?;
    p.question = parse_question(question, p.vocab)
        .and_then(|r| r.resolve(p.n()))
        .ok_or_else(|| ClueParseError::UnmappableQuestion(question.to_string()))?;
    Ok(p)
}

/// Items and clues of puzzle prose; the question rank is left at 1.
pub fn parse_prose(prose: &str) -> Result<DeductionPuzzle, ClueParseError> {
    let mut items: Option<Vec<String>> = None;
    let mut raw = Vec::new();
    let mut vocab: Option<Vocab> = None;
    for sentence in sentences(prose) {
        let lower = sentence.to_lowercase();
        if lower.starts_with("the following") || lower.starts_with("the statements are logically consistent") {
            continue;
        }
        if items.is_none() && sentence.contains(':') {
            items = parse_item_list(&sentence);
            if let Some(v) = vocab_from_setting(&lower) {
                vocab = Some(v);
            }
            continue;
        }
        let parsed = match vocab {
            Some(v) => parse_clue_sentence(&sentence, v).map(|c| (v, c)),
            None => detect_clue(&sentence),
        };
        match parsed {
            Some((v, clue)) => {
                vocab.get_or_insert(v);
                raw.push((sentence.clone(), clue));
            }
            None => return Err(ClueParseError::UnmappableClue(sentence)),
        }
    }
    let vocab = vocab.unwrap_or_default();
    let items = match items {
        Some(items) => items,
        None => {
            let mut found: Vec<String> = Vec::new();
            for (_, clue) in &raw {
                let names: Vec<&String> = match clue {
                    RawClue::Rel { a, b, .. } => alloc::vec![a, b],
                    RawClue::Rank { item, .. } => alloc::vec![item],
                };
                for name in names {
                    if !found.contains(name) {
                        found.push(name.clone());
                    }
                }
            }
            found
        }
    };
    if items.is_empty() {
        return Err(ClueParseError::NoItems);
    }
    let n = items.len();
    let lookup = |clue_text: &str, name: &str| -> Result<String, ClueParseError> {
        let key = normalize_item(name);
        items
            .iter()
            .find(|i| **i == key)
            .cloned()
            .ok_or_else(|| ClueParseError::UnknownItem { clue: clue_text.to_string(), item: name.to_string() })
    };
    let mut clues = Vec::new();
    for (text, clue) in raw {
        clues.push(match clue {
            RawClue::Rel { a, b, less } => {
                let (a, b) = (lookup(&text, &a)?, lookup(&text, &b)?);
                if less {
                    Clue::Less { a, b }
                } else {
                    Clue::Greater { a, b }
                }
            }
            RawClue::Rank { item, rank } => Clue::Equal {
                item: lookup(&text, &item)?,
                rank: rank.resolve(n).ok_or_else(|| ClueParseError::RankOutOfRange(text.clone()))?,
            },
        });
    }
    Ok(DeductionPuzzle { items, clues, question: 1, vocab })
}

fn vocab_from_setting(lower: &str) -> Option<Vocab> {
    if lower.contains("shelf") || lower.contains("branch") {
        Some(Vocab::Position)
    } else if lower.contains("fruit") {
        Some(Vocab::Price)
    } else if lower.contains("car show") || lower.contains("vehicles") {
        Some(Vocab::Age)
    } else if lower.contains("golf") {
        Some(Vocab::Finish)
    } else {
        None
    }
}

/// Reads a multiple-choice option such as `The black book is the leftmost.`.
pub fn parse_option(option: &str, vocab: Vocab, n: usize) -> Option<(String, usize)> {
    match parse_clue_sentence(option, vocab)? {
        RawClue::Rank { item, rank } => Some((item, rank.resolve(n)?)),
        RawClue::Rel { .. } => None,
    }
}
