//! Table-driven morphological analysis and generation.

use std::fmt;

use serde::Serialize;

use crate::features::FeatureMap;
use crate::lexicon::FormTable;

/// POS tag given to wordforms missing from the analysis table.
pub const UNKNOWN_POS: &str = "unk";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Analysis {
    pub lexeme: String,
    pub pos: String,
    pub features: FeatureMap,
}

impl Analysis {
    pub fn new(lexeme: impl Into<String>, pos: impl Into<String>, features: FeatureMap) -> Self {
        Analysis {
            lexeme: lexeme.into(),
            pos: pos.into(),
            features,
        }
    }

    pub fn unknown(wordform: &str) -> Self {
        Self::new(wordform.to_lowercase(), UNKNOWN_POS, FeatureMap::new())
    }

    pub fn is_unknown(&self) -> bool {
        self.pos == UNKNOWN_POS
    }
}

impl fmt::Display for Analysis {
    /// `make_v[tns=pst]`, or just the lexeme when there are no features.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexeme)?;
        if !self.features.is_empty() {
            write!(f, "[{}]", self.features)?;
        }
        Ok(())
    }
}

/// All analyses listed for `wordform`, in table order without repeats.
/// Never empty: unknown forms get a single `unk` analysis.
pub fn analyze(wordform: &str, table: &FormTable) -> Vec<Analysis> {
    let mut out: Vec<Analysis> = Vec::new();
    for row in table.rows_for_form(wordform) {
        if !out.contains(&row.analysis) {
            out.push(row.analysis.clone());
        }
    }
    if out.is_empty() {
        out.push(Analysis::unknown(wordform));
    }
    out
}

/// Wordforms of `lexeme` whose row features unify with `features`, in
/// table order without repeats. An empty result is a generation gap.
pub fn generate(lexeme: &str, features: &FeatureMap, table: &FormTable) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for row in table.rows_for_lexeme(lexeme) {
        if row.analysis.features.compatible(features) && !out.contains(&row.wordform) {
            out.push(row.wordform.clone());
        }
    }
    out
}
