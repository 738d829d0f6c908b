use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::item::{write_item_list, GroupItem};
use crate::features::FeatureMap;

/// Copies source features into a target item during transfer.
///
/// Positions are 1-based: `source_pos` indexes the source group items,
/// `target_pos` the translation's items.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgreementConstraint {
    pub source_pos: usize,
    pub target_pos: usize,
    pub mappings: Vec<(String, String)>,
}

/// One target-language rendering of a group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Translation {
    pub target_lang: String,
    pub items: Vec<GroupItem>,
    /// Bracketed head in the target item list, if one was written.
    pub head: Option<usize>,
    /// One entry per source item: 0 or a 1-based target position.
    pub alignment: Vec<usize>,
    pub agreements: Vec<AgreementConstraint>,
}

impl Translation {
    /// Target position (1-based) aligned with source position `source_pos`.
    pub fn aligned(&self, source_pos: usize) -> Option<usize> {
        self.alignment
            .get(source_pos.checked_sub(1)?)
            .copied()
            .filter(|&t| t != 0)
    }

    /// Source position (1-based) aligned to target position `target_pos`.
    pub fn source_of(&self, target_pos: usize) -> Option<usize> {
        self.alignment.iter().position(|&t| t == target_pos).map(|i| i + 1)
    }
}

/// A headed source pattern with its translations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupEntry {
    pub items: Vec<GroupItem>,
    /// 1-based position of the head item.
    pub head_index: usize,
    pub translations: Vec<Translation>,
}

impl GroupEntry {
    pub fn head(&self) -> &GroupItem {
        &self.items[self.head_index - 1]
    }

    /// Human label used in diagnostics and dumps.
    pub fn label(&self) -> &str {
        self.items
            .get(self.head_index.wrapping_sub(1))
            .map_or("?", |item| item.text.as_str())
    }

    pub fn translations_for<'a>(&'a self, lang: &'a str) -> impl Iterator<Item = (usize, &'a Translation)> {
        self.translations
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.target_lang == lang)
    }
}

impl fmt::Display for GroupEntry {
    /// Writes the entry in the `groups.mdt` grammar, ending with a newline.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("group: ")?;
        write_item_list(f, &self.items, Some(self.head_index))?;
        writeln!(f)?;
        for t in &self.translations {
            write!(f, "  -> {}: ", t.target_lang)?;
            write_item_list(f, &t.items, t.head)?;
            writeln!(f)?;
            let align: Vec<String> = t.alignment.iter().map(usize::to_string).collect();
            writeln!(f, "     align: {}", align.join(","))?;
            if !t.agreements.is_empty() {
                let agr: Vec<String> = t.agreements.iter().map(|a| a.to_string()).collect();
                writeln!(f, "     agr: {}", agr.join("; "))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for AgreementConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self.mappings.iter().map(|(s, t)| format!("{s}:{t}")).collect();
        write!(f, "({},{}):({})", self.source_pos, self.target_pos, pairs.join(","))
    }
}

/// A source-side rewrite applied before group lookup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransformRule {
    pub pattern: Vec<GroupItem>,
    /// (1-based pattern position, features unified into that token).
    pub actions: Vec<(usize, FeatureMap)>,
    /// 1-based pattern positions whose tokens are marked deleted.
    pub deletions: BTreeSet<usize>,
}

impl fmt::Display for TransformRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("rule: ")?;
        write_item_list(f, &self.pattern, None)?;
        f.write_str(" =>")?;
        for (pos, features) in &self.actions {
            write!(f, " {pos}[{features}]")?;
        }
        if !self.deletions.is_empty() {
            let dels: Vec<String> = self.deletions.iter().map(usize::to_string).collect();
            write!(f, " del {}", dels.join(","))?;
        }
        Ok(())
    }
}
