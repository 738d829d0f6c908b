use std::collections::{BTreeSet, HashMap};

use crate::morpho::Analysis;

/// One full-form row: a wordform and its analysis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormRow {
    pub wordform: String,
    pub analysis: Analysis,
}

/// Full-form morphology table, indexed in both directions.
///
/// Rows keep file order; lookups return rows in that order.
#[derive(Debug, Clone, Default)]
pub struct FormTable {
    rows: Vec<FormRow>,
    by_form: HashMap<String, Vec<usize>>,
    by_lexeme: HashMap<String, Vec<usize>>,
}

impl FormTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: FormRow) {
        let idx = self.rows.len();
        self.by_form.entry(row.wordform.to_lowercase()).or_default().push(idx);
        self.by_lexeme.entry(row.analysis.lexeme.clone()).or_default().push(idx);
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[FormRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows whose wordform equals `form` (case-insensitive).
    pub fn rows_for_form<'a>(&'a self, form: &str) -> impl Iterator<Item = &'a FormRow> + 'a {
        self.by_form
            .get(&form.to_lowercase())
            .into_iter()
            .flatten()
            .map(|&i| &self.rows[i])
    }

    pub fn rows_for_lexeme<'a>(&'a self, lexeme: &str) -> impl Iterator<Item = &'a FormRow> + 'a {
        self.by_lexeme.get(lexeme).into_iter().flatten().map(|&i| &self.rows[i])
    }
}

impl FromIterator<FormRow> for FormTable {
    fn from_iter<I: IntoIterator<Item = FormRow>>(iter: I) -> Self {
        let mut table = FormTable::new();
        for row in iter {
            table.push(row);
        }
        table
    }
}

/// Lexical-semantic category labels for lexemes and wordforms.
#[derive(Debug, Clone, Default)]
pub struct CategoryDict {
    labels: HashMap<String, BTreeSet<String>>,
}

impl CategoryDict {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, category: impl Into<String>) {
        self.labels.entry(key.into()).or_default().insert(category.into());
    }

    pub fn has(&self, key: &str, category: &str) -> bool {
        self.labels.get(key).is_some_and(|cats| cats.contains(category))
    }

    pub fn categories(&self, key: &str) -> impl Iterator<Item = &str> {
        self.labels.get(key).into_iter().flatten().map(String::as_str)
    }

    /// Every symbol used anywhere in the dictionary.
    pub fn symbols(&self) -> BTreeSet<&str> {
        self.labels.values().flatten().map(String::as_str).collect()
    }

    pub fn len(&self) -> usize {
        self.labels.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}
