//! Bilingual group lexicon: entries, transformation rules, category labels
//! and full-form morphology tables.
//!
//! A lexicon directory holds one subdirectory per language. The source
//! language directory contains `groups.mdt` and optionally `transforms.mdt`,
//! `forms.tsv` (analysis rows) and `cats.tsv`. Every other subdirectory with a
//! `forms.tsv` contributes a target-language generation table.

mod entry;
mod item;
pub mod parse;
mod tables;
mod validate;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use entry::{AgreementConstraint, GroupEntry, TransformRule, Translation};
pub use item::{split_lexeme, GroupItem, ItemKind, POS_CATEGORIES};
pub use parse::serialize_groups;
pub use tables::{CategoryDict, FormRow, FormTable};
pub use validate::{unknown_categories, validate_entry, validate_rule, Diagnostic};

pub const GROUPS_FILE: &str = "groups.mdt";
pub const TRANSFORMS_FILE: &str = "transforms.mdt";
pub const FORMS_FILE: &str = "forms.tsv";
pub const CATEGORIES_FILE: &str = "cats.tsv";

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("missing groups file: no <lang>/{GROUPS_FILE} under {0}")]
    MissingGroups(PathBuf),
    #[error("more than one source language ({0} and {1})")]
    MultipleSources(String, String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}:{line}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },
    #[error("lexicon has {} problem(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Diagnostic>),
}

/// A validated, immutable lexicon.
#[derive(Debug, Clone)]
pub struct Lexicon {
    source_lang: String,
    entries: Vec<GroupEntry>,
    rules: Vec<TransformRule>,
    analysis: FormTable,
    categories: CategoryDict,
    generation: BTreeMap<String, FormTable>,
    head_index: HashMap<String, Vec<usize>>,
}

/// Unvalidated lexicon contents, as read from disk or built in code.
#[derive(Debug, Clone, Default)]
pub struct LexiconParts {
    pub source_lang: String,
    pub entries: Vec<GroupEntry>,
    pub rules: Vec<TransformRule>,
    pub analysis: FormTable,
    pub categories: CategoryDict,
    pub generation: BTreeMap<String, FormTable>,
}

impl LexiconParts {
    /// Reads a lexicon directory without validating it.
    pub fn read_dir(dir: &Path) -> Result<Self, LexiconError> {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source| LexiconError::Io { path, source }
        };
        let mut langs: Vec<(String, PathBuf)> = Vec::new();
        for dirent in fs::read_dir(dir).map_err(io_err(dir))? {
            let dirent = dirent.map_err(io_err(dir))?;
            let path = dirent.path();
            if path.is_dir() {
                langs.push((dirent.file_name().to_string_lossy().into_owned(), path));
            }
        }
        langs.sort();

        let mut source: Option<(String, PathBuf)> = None;
        for (lang, path) in &langs {
            if path.join(GROUPS_FILE).is_file() {
                if let Some((first, _)) = &source {
                    return Err(LexiconError::MultipleSources(first.clone(), lang.clone()));
                }
                source = Some((lang.clone(), path.clone()));
            }
        }
        let (source_lang, source_dir) = source.ok_or_else(|| LexiconError::MissingGroups(dir.to_path_buf()))?;

        let read_optional = |path: PathBuf| -> Result<Option<(String, PathBuf)>, LexiconError> {
            match fs::read_to_string(&path) {
                Ok(text) => Ok(Some((text, path))),
                Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
                Err(source) => Err(LexiconError::Io { path, source }),
            }
        };

        let groups_path = source_dir.join(GROUPS_FILE);
        let groups_text = fs::read_to_string(&groups_path).map_err(io_err(&groups_path))?;
        let entries = parse::parse_groups(&groups_text, &groups_path)?;
        let rules = match read_optional(source_dir.join(TRANSFORMS_FILE))? {
            Some((text, path)) => parse::parse_transforms(&text, &path)?,
            None => Vec::new(),
        };
        let analysis = match read_optional(source_dir.join(FORMS_FILE))? {
            Some((text, path)) => parse::parse_analysis_forms(&text, &path)?,
            None => FormTable::new(),
        };
        let categories = match read_optional(source_dir.join(CATEGORIES_FILE))? {
            Some((text, path)) => parse::parse_categories(&text, &path)?,
            None => CategoryDict::new(),
        };
        let mut generation = BTreeMap::new();
        for (lang, path) in langs.iter().filter(|(l, _)| *l != source_lang) {
            if let Some((text, path)) = read_optional(path.join(FORMS_FILE))? {
                generation.insert(lang.clone(), parse::parse_generation_forms(&text, &path)?);
            }
        }
        Ok(LexiconParts {
            source_lang,
            entries,
            rules,
            analysis,
            categories,
            generation,
        })
    }

    /// All invariant violations, in entry order, then rules, then categories.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out: Vec<Diagnostic> = self.entries.iter().flat_map(validate_entry).collect();
        for (i, rule) in self.rules.iter().enumerate() {
            out.extend(validate_rule(i + 1, rule));
        }
        out.extend(unknown_categories(&self.entries, &self.rules, &self.categories));
        out
    }
}

impl Lexicon {
    /// Reads and validates a lexicon directory.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::from_parts(LexiconParts::read_dir(dir.as_ref())?)
    }

    /// Parses a lexicon directory and returns its diagnostics without
    /// rejecting it. Parse errors are still errors.
    pub fn lint(dir: impl AsRef<Path>) -> Result<Vec<Diagnostic>, LexiconError> {
        Ok(LexiconParts::read_dir(dir.as_ref())?.diagnostics())
    }

    pub fn from_parts(parts: LexiconParts) -> Result<Self, LexiconError> {
        let diagnostics = parts.diagnostics();
        if !diagnostics.is_empty() {
            return Err(LexiconError::Invalid(diagnostics));
        }
        let mut head_index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, entry) in parts.entries.iter().enumerate() {
            head_index.entry(entry.head().index_key()).or_default().push(i);
        }
        Ok(Lexicon {
            source_lang: parts.source_lang,
            entries: parts.entries,
            rules: parts.rules,
            analysis: parts.analysis,
            categories: parts.categories,
            generation: parts.generation,
            head_index,
        })
    }

    pub fn source_lang(&self) -> &str {
        &self.source_lang
    }

    /// Languages with a generation table, sorted.
    pub fn target_langs(&self) -> impl Iterator<Item = &str> {
        self.generation.keys().map(String::as_str)
    }

    pub fn entries(&self) -> &[GroupEntry] {
        &self.entries
    }

    pub fn entry(&self, index: usize) -> &GroupEntry {
        &self.entries[index]
    }

    pub fn rules(&self) -> &[TransformRule] {
        &self.rules
    }

    pub fn analysis_table(&self) -> &FormTable {
        &self.analysis
    }

    pub fn generation_table(&self, lang: &str) -> Option<&FormTable> {
        self.generation.get(lang)
    }

    pub fn categories(&self) -> &CategoryDict {
        &self.categories
    }

    /// Indices of entries headed by `key` (a lowercased wordform or a lexeme), in file order.
    pub fn entries_headed_by(&self, key: &str) -> &[usize] {
        self.head_index.get(key).map_or(&[], Vec::as_slice)
    }
}
