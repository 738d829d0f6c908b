use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::entry::{GroupEntry, TransformRule, Translation};
use super::item::GroupItem;
use super::tables::CategoryDict;

/// A single invariant violation found in a lexicon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// Entry head text, or `rule N` for transformation rules.
    pub subject: String,
    /// 1-based translation index, when the problem is inside a translation.
    pub translation: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.translation {
            Some(t) => write!(f, "{} (translation {t}): {}", self.subject, self.message),
            None => write!(f, "{}: {}", self.subject, self.message),
        }
    }
}

/// Checks the structural invariants of one group entry.
pub fn validate_entry(entry: &GroupEntry) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let subject = entry.label().to_owned();
    let mut report = |translation: Option<usize>, message: String| {
        out.push(Diagnostic {
            subject: subject.clone(),
            translation,
            message,
        })
    };

    let n = entry.items.len();
    if n == 0 {
        report(None, "empty group".to_owned());
        return out;
    }
    let head_ok = (1..=n).contains(&entry.head_index);
    if !head_ok {
        report(None, format!("head index {} out of range 1..{n}", entry.head_index));
    } else if entry.head().is_category() {
        report(None, "head is a category".to_owned());
    }
    if entry.translations.is_empty() {
        report(None, "no translations".to_owned());
    }

    for (ti, t) in entry.translations.iter().enumerate() {
        for message in translation_problems(entry, t, head_ok) {
            report(Some(ti + 1), message);
        }
    }
    out
}

fn translation_problems(entry: &GroupEntry, t: &Translation, head_ok: bool) -> Vec<String> {
    let mut problems = Vec::new();
    let n = entry.items.len();
    let m = t.items.len();

    for a in &t.agreements {
        if !(1..=n).contains(&a.source_pos) {
            problems.push(format!(
                "agreement source position {} out of range 1..{n}",
                a.source_pos
            ));
        }
        if !(1..=m).contains(&a.target_pos) {
            problems.push(format!(
                "agreement target position {} out of range 1..{m}",
                a.target_pos
            ));
        }
        if a.mappings.is_empty() {
            problems.push(format!(
                "agreement ({},{}) has no feature mappings",
                a.source_pos, a.target_pos
            ));
        }
    }

    if t.alignment.len() != n {
        problems.push(format!("alignment length {} ≠ source length {n}", t.alignment.len()));
        return problems;
    }

    let mut seen = BTreeSet::new();
    for &target in t.alignment.iter().filter(|&&v| v != 0) {
        if target > m {
            problems.push(format!("alignment target {target} out of range 1..{m}"));
        } else if !seen.insert(target) {
            problems.push(format!("duplicate target index {target}"));
        }
    }

    if head_ok {
        match t.aligned(entry.head_index) {
            None => problems.push("head is unaligned".to_owned()),
            Some(target) if target <= m => {
                if t.items[target - 1].is_category() {
                    problems.push(format!("head aligned to category item {target}"));
                }
                if let Some(marked) = t.head {
                    if marked != target {
                        problems.push(format!("target head {marked} differs from head alignment {target}"));
                    }
                }
            }
            Some(_) => {}
        }
    }

    for (si, item) in entry.items.iter().enumerate() {
        if !item.is_category() {
            continue;
        }
        match t.aligned(si + 1) {
            None => problems.push(format!("category {} at position {} is unaligned", item.text, si + 1)),
            Some(target) if target <= m => {
                let other = &t.items[target - 1];
                if !other.is_category() || other.text != item.text {
                    problems.push(format!(
                        "category {} at position {} aligned to `{}`",
                        item.text,
                        si + 1,
                        other.text
                    ));
                }
            }
            Some(_) => {}
        }
    }

    for (ti, item) in t.items.iter().enumerate() {
        if !item.is_category() {
            continue;
        }
        let fed = t.source_of(ti + 1).is_some_and(|s| entry.items[s - 1].is_category());
        if !fed {
            problems.push(format!(
                "target category {} at position {} has no aligned source category",
                item.text,
                ti + 1
            ));
        }
    }
    problems
}

/// Checks position bounds of a transformation rule (`index` is 1-based).
pub fn validate_rule(index: usize, rule: &TransformRule) -> Vec<Diagnostic> {
    let n = rule.pattern.len();
    let mut messages = Vec::new();
    let mut set_positions = BTreeSet::new();
    for (pos, _) in &rule.actions {
        if !(1..=n).contains(pos) {
            messages.push(format!("action position {pos} out of range 1..{n}"));
        }
        if !set_positions.insert(*pos) {
            messages.push(format!("position {pos} has more than one action"));
        }
    }
    for pos in &rule.deletions {
        if !(1..=n).contains(pos) {
            messages.push(format!("deletion position {pos} out of range 1..{n}"));
        }
        if set_positions.contains(pos) {
            messages.push(format!("position {pos} is both deleted and modified"));
        }
    }
    messages
        .into_iter()
        .map(|message| Diagnostic {
            subject: format!("rule {index}"),
            translation: None,
            message,
        })
        .collect()
}

/// Reports category symbols that are neither POS categories nor in `cats`.
pub fn unknown_categories(entries: &[GroupEntry], rules: &[TransformRule], cats: &CategoryDict) -> Vec<Diagnostic> {
    let known = cats.symbols();
    let unknown =
        |item: &GroupItem| item.is_category() && !item.is_pos_category() && !known.contains(item.text.as_str());
    let mut out = Vec::new();
    for entry in entries {
        let mut reported = BTreeSet::new();
        let items = entry
            .items
            .iter()
            .chain(entry.translations.iter().flat_map(|t| t.items.iter()));
        for item in items.filter(|i| unknown(i)) {
            if reported.insert(item.text.clone()) {
                out.push(Diagnostic {
                    subject: entry.label().to_owned(),
                    translation: None,
                    message: format!("unknown category {}", item.text),
                });
            }
        }
    }
    for (i, rule) in rules.iter().enumerate() {
        for item in rule.pattern.iter().filter(|i| unknown(i)) {
            out.push(Diagnostic {
                subject: format!("rule {}", i + 1),
                translation: None,
                message: format!("unknown category {}", item.text),
            });
        }
    }
    out
}
