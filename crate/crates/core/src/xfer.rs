//! Transfer of a source group assignment to target groups, linearization
//! and surface realization.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::features::FeatureMap;
use crate::lexicon::{FormTable, GroupItem, ItemKind, Lexicon};
use crate::morpho::generate;
use crate::pipeline::{apply_transforms, AnalyzedSentence};
use crate::solver::{find_candidates, solve, Assignment, MatchOptions};

/// A target group chosen for one source instance, with the features each
/// of its items must carry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TargetGroupInstance {
    /// Index of the source instance in its [`Assignment`].
    pub source: usize,
    pub entry: usize,
    /// Index into the entry's translations.
    pub translation: usize,
    /// Static item constraints unified with agreement-propagated features.
    /// For a category item these are the features imposed on its expansion's head.
    pub item_features: Vec<FeatureMap>,
    /// Target category position (1-based) → transferred merged instance.
    pub slot_expansions: BTreeMap<usize, TargetGroupInstance>,
}

impl TargetGroupInstance {
    /// 1-based target position aligned with the source head.
    pub fn head_item(&self, lexicon: &Lexicon) -> usize {
        let entry = lexicon.entry(self.entry);
        entry.translations[self.translation]
            .aligned(entry.head_index)
            .expect("validated: head is aligned")
    }

    /// Features of the head item, following expansions.
    pub fn head_features<'a>(&'a self, lexicon: &Lexicon) -> &'a FeatureMap {
        &self.item_features[self.head_item(lexicon) - 1]
    }

    /// Bracketed tree rendering, e.g. `<<kantibA_n[+acc,+def]> 'a^sofa_v[sb=3psf,tam=prf]>`.
    pub fn render(&self, lexicon: &Lexicon) -> String {
        let mut out = String::new();
        self.render_into(lexicon, &mut out);
        out
    }

    fn render_into(&self, lexicon: &Lexicon, out: &mut String) {
        let t = &lexicon.entry(self.entry).translations[self.translation];
        out.push('<');
        for (i, item) in t.items.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            match self.slot_expansions.get(&(i + 1)) {
                Some(exp) => exp.render_into(lexicon, out),
                None => {
                    out.push_str(&item.text);
                    if !self.item_features[i].is_empty() {
                        let _ = write!(out, "[{}]", self.item_features[i]);
                    }
                }
            }
        }
        out.push('>');
    }
}

/// One combination of translation choices for a whole assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transfer {
    /// Transferred top-level instances, by source head position.
    pub groups: Vec<TargetGroupInstance>,
    /// Tokens of instances for which no translation survived.
    pub untranslated: Vec<usize>,
}

enum RootChoice {
    Group(TargetGroupInstance),
    Fallback(Vec<usize>),
}

struct Transferrer<'a> {
    a: &'a Assignment,
    lexicon: &'a Lexicon,
    lang: &'a str,
}

impl Transferrer<'_> {
    fn subtree_tokens(&self, inst: usize, out: &mut Vec<usize>) {
        let instance = &self.a.instances[inst];
        out.extend(&instance.positions);
        for &guest in instance.slot_fills.values() {
            self.subtree_tokens(guest, out);
        }
    }

    /// Every surviving transfer of instance `inst`, translation order first,
    /// then expansion combinations.
    fn alternatives(&self, inst: usize) -> Vec<TargetGroupInstance> {
        let instance = &self.a.instances[inst];
        let entry = self.lexicon.entry(instance.entry);
        let mut out = Vec::new();
        'translations: for (ti, t) in entry.translations_for(self.lang) {
            let mut features: Vec<FeatureMap> = t.items.iter().map(|i| i.constraints.clone()).collect();
            for agr in &t.agreements {
                let source = &instance.analyses[agr.source_pos - 1].features;
                for (from, to) in &agr.mappings {
                    if let Some(value) = source.get(from) {
                        let target = &mut features[agr.target_pos - 1];
                        match target.get(to) {
                            Some(existing) if existing != value => continue 'translations,
                            _ => target.insert(to.clone(), value),
                        }
                    }
                }
            }

            // (target position, alternatives of the merged instance)
            let mut slots: Vec<(usize, Vec<TargetGroupInstance>)> = Vec::new();
            for tp in (0..t.items.len()).filter(|&i| t.items[i].is_category()) {
                let guest = t
                    .source_of(tp + 1)
                    .and_then(|sp| instance.slot_fills.get(&sp))
                    .copied()
                    .expect("validated: target category aligned to a merged source slot");
                let mut alts = Vec::new();
                for mut alt in self.alternatives(guest) {
                    let head = alt.head_item(self.lexicon) - 1;
                    if let Some(unified) = alt.item_features[head].unify(&features[tp]) {
                        alt.item_features[head] = unified;
                        alts.push(alt);
                    }
                }
                slots.push((tp + 1, alts));
            }

            for combo in cartesian(&slots.iter().map(|(_, alts)| alts.len()).collect::<Vec<_>>()) {
                let slot_expansions = slots
                    .iter()
                    .zip(&combo)
                    .map(|((tp, alts), &k)| (*tp, alts[k].clone()))
                    .collect();
                out.push(TargetGroupInstance {
                    source: inst,
                    entry: instance.entry,
                    translation: ti,
                    item_features: features.clone(),
                    slot_expansions,
                });
            }
        }
        out
    }
}

/// Index tuples of the cartesian product of `sizes`, first position slowest.
/// An empty `sizes` yields one empty tuple; any zero size yields nothing.
fn cartesian(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &n in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |k| {
                    let mut next = prefix.clone();
                    next.push(k);
                    next
                })
            })
            .collect();
    }
    out
}

/// Transfers `a` to `lang`, one [`Transfer`] per combination of translation
/// choices. Instances without a surviving translation fall back to their
/// source tokens.
pub fn transfer(a: &Assignment, lexicon: &Lexicon, lang: &str) -> Vec<Transfer> {
    let tr = Transferrer { a, lexicon, lang };
    let per_root: Vec<Vec<RootChoice>> = a
        .roots()
        .into_iter()
        .map(|root| {
            let alts = tr.alternatives(root);
            if alts.is_empty() {
                let mut tokens = Vec::new();
                tr.subtree_tokens(root, &mut tokens);
                tokens.sort_unstable();
                vec![RootChoice::Fallback(tokens)]
            } else {
                alts.into_iter().map(RootChoice::Group).collect()
            }
        })
        .collect();

    cartesian(&per_root.iter().map(Vec::len).collect::<Vec<_>>())
        .into_iter()
        .map(|combo| {
            let mut groups = Vec::new();
            let mut untranslated = Vec::new();
            for (choices, k) in per_root.iter().zip(combo) {
                match &choices[k] {
                    RootChoice::Group(g) => groups.push(g.clone()),
                    RootChoice::Fallback(tokens) => untranslated.extend(tokens),
                }
            }
            untranslated.sort_unstable();
            Transfer { groups, untranslated }
        })
        .collect()
}

/// A target item ready for realization, or a source token passed through.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LinearItem {
    Target { item: GroupItem, features: FeatureMap },
    Source { token: usize },
}

impl fmt::Display for LinearItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinearItem::Target { item, features } if features.is_empty() => write!(f, "{}", item.text),
            LinearItem::Target { item, features } => write!(f, "{}[{features}]", item.text),
            LinearItem::Source { token } => write!(f, "@{token}"),
        }
    }
}

fn linearize_group(g: &TargetGroupInstance, lexicon: &Lexicon, out: &mut Vec<LinearItem>) {
    let t = &lexicon.entry(g.entry).translations[g.translation];
    for (i, item) in t.items.iter().enumerate() {
        match g.slot_expansions.get(&(i + 1)) {
            Some(exp) => linearize_group(exp, lexicon, out),
            None => out.push(LinearItem::Target {
                item: item.clone(),
                features: g.item_features[i].clone(),
            }),
        }
    }
}

/// Orders target items: top-level groups by source head position, items in
/// translation order with category items replaced by their expansions, and
/// untranslated live tokens at their own source positions.
pub fn linearize(t: &Transfer, a: &Assignment, s: &AnalyzedSentence, lexicon: &Lexicon) -> Vec<LinearItem> {
    let mut covered = vec![false; s.len()];
    for inst in &a.instances {
        for &p in &inst.positions {
            covered[p] = true;
        }
    }
    let mut units: Vec<(usize, Option<&TargetGroupInstance>)> = t
        .groups
        .iter()
        .map(|g| (a.instances[g.source].head_token(), Some(g)))
        .collect();
    units.extend(
        s.live()
            .into_iter()
            .filter(|&i| !covered[i])
            .chain(t.untranslated.iter().copied())
            .map(|i| (i, None)),
    );
    units.sort_by_key(|(pos, _)| *pos);

    let mut out = Vec::new();
    for (pos, unit) in units {
        match unit {
            Some(g) => linearize_group(g, lexicon, &mut out),
            None => out.push(LinearItem::Source { token: pos }),
        }
    }
    out
}

/// One realized word or passed-through source token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Segment {
    pub text: String,
    /// Source material that no group translated.
    pub untranslated: bool,
    /// Rendered as `⟦lexeme⟧` because no wordform could be produced.
    pub gap: bool,
}

impl Segment {
    fn word(text: impl Into<String>) -> Self {
        Segment {
            text: text.into(),
            untranslated: false,
            gap: false,
        }
    }

    fn gap(lexeme: &str, untranslated: bool) -> Self {
        Segment {
            text: format!("⟦{lexeme}⟧"),
            untranslated,
            gap: true,
        }
    }
}

/// Joins segment texts with single spaces.
pub fn join_segments(segments: &[Segment]) -> String {
    segments.iter().map(|s| s.text.as_str()).collect::<Vec<_>>().join(" ")
}

/// The alternative segments for each linear item.
fn segment_choices(items: &[LinearItem], s: &AnalyzedSentence, table: Option<&FormTable>) -> Vec<Vec<Segment>> {
    items
        .iter()
        .map(|item| match item {
            LinearItem::Target { item, features } => match item.kind {
                ItemKind::Lexeme => {
                    let forms = table.map(|t| generate(&item.text, features, t)).unwrap_or_default();
                    if forms.is_empty() {
                        vec![Segment::gap(&item.text, false)]
                    } else {
                        forms.into_iter().map(Segment::word).collect()
                    }
                }
                _ => vec![Segment::word(item.text.clone())],
            },
            LinearItem::Source { token } => {
                let token = &s.tokens[*token];
                match token.analyses.first() {
                    Some(a) if token.absorbed => vec![Segment::gap(&a.lexeme, true)],
                    _ => vec![Segment {
                        text: token.surface.clone(),
                        untranslated: true,
                        gap: false,
                    }],
                }
            }
        })
        .collect()
}

/// Realizes linear items, fanning out over every generated wordform (first
/// item varies slowest). Stops after `limit` sentences when given.
pub fn realize_limited(
    items: &[LinearItem],
    s: &AnalyzedSentence,
    table: Option<&FormTable>,
    limit: Option<usize>,
) -> Vec<Vec<Segment>> {
    let choices = segment_choices(items, s, table);
    let limit = limit.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    let mut idx = vec![0usize; choices.len()];
    while out.len() < limit {
        out.push(choices.iter().zip(&idx).map(|(c, &k)| c[k].clone()).collect());
        // odometer, last position fastest
        let mut carry = true;
        for pos in (0..idx.len()).rev() {
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                carry = false;
                break;
            }
            idx[pos] = 0;
        }
        if carry {
            break;
        }
    }
    out
}

pub fn realize(items: &[LinearItem], s: &AnalyzedSentence, table: Option<&FormTable>) -> Vec<Vec<Segment>> {
    realize_limited(items, s, table, None)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TranslateOptions {
    /// Cap on the total number of output sentences.
    pub max_outputs: Option<usize>,
    /// Attach intermediate steps to the result.
    pub trace: bool,
    pub max_gap: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("lexicon source language is `{expected}`, not `{got}`")]
    SourceLanguage { expected: String, got: String },
    #[error("lexicon has no translations into `{0}`")]
    TargetLanguage(String),
}

/// A token after transformation, as shown in results.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TokenTrace {
    pub surface: String,
    pub deleted: bool,
    pub analyses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssignmentOutcome {
    /// `(covered tokens, -groups)`.
    pub score: (usize, i64),
    /// Solver dump, one line per instance.
    pub instances: Vec<String>,
    /// Indices into [`TranslationResult::outputs`].
    pub outputs: Vec<usize>,
}

/// Intermediate steps, present when tracing was requested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub analyzed: String,
    pub transformed: String,
    pub candidates: Vec<String>,
    /// Bracketed target trees, one line per transfer combination.
    pub transfers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslationResult {
    pub source: String,
    pub analyses: Vec<TokenTrace>,
    pub assignments: Vec<AssignmentOutcome>,
    pub outputs: Vec<Vec<Segment>>,
    /// `outputs` joined with single spaces.
    pub texts: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Trace>,
}

impl TranslationResult {
    fn empty(text: &str) -> Self {
        TranslationResult {
            source: text.to_owned(),
            analyses: Vec::new(),
            assignments: Vec::new(),
            outputs: Vec::new(),
            texts: Vec::new(),
            trace: None,
        }
    }
}

fn knows_target(lexicon: &Lexicon, lang: &str) -> bool {
    lexicon.generation_table(lang).is_some()
        || lexicon
            .entries()
            .iter()
            .any(|e| e.translations.iter().any(|t| t.target_lang == lang))
}

/// Translates one sentence of raw text.
pub fn translate(
    text: &str,
    lexicon: &Lexicon,
    source_lang: &str,
    target_lang: &str,
    options: &TranslateOptions,
) -> Result<TranslationResult, TranslateError> {
    check_languages(lexicon, source_lang, target_lang)?;
    if text.trim().is_empty() {
        return Ok(TranslationResult::empty(text));
    }
    let analyzed = AnalyzedSentence::analyze(text, lexicon.analysis_table());
    Ok(translate_analyzed(text, analyzed, lexicon, target_lang, options))
}

/// Translates pre-analyzed tokens, skipping tokenization and lookup.
pub fn translate_preanalyzed(
    analyzed: AnalyzedSentence,
    lexicon: &Lexicon,
    source_lang: &str,
    target_lang: &str,
    options: &TranslateOptions,
) -> Result<TranslationResult, TranslateError> {
    check_languages(lexicon, source_lang, target_lang)?;
    let text = analyzed
        .tokens
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    if analyzed.is_empty() {
        return Ok(TranslationResult::empty(&text));
    }
    Ok(translate_analyzed(&text, analyzed, lexicon, target_lang, options))
}

fn check_languages(lexicon: &Lexicon, source_lang: &str, target_lang: &str) -> Result<(), TranslateError> {
    if source_lang != lexicon.source_lang() {
        return Err(TranslateError::SourceLanguage {
            expected: lexicon.source_lang().to_owned(),
            got: source_lang.to_owned(),
        });
    }
    if !knows_target(lexicon, target_lang) {
        return Err(TranslateError::TargetLanguage(target_lang.to_owned()));
    }
    Ok(())
}

fn translate_analyzed(
    text: &str,
    analyzed: AnalyzedSentence,
    lexicon: &Lexicon,
    target_lang: &str,
    options: &TranslateOptions,
) -> TranslationResult {
    let transformed = apply_transforms(&analyzed, lexicon.rules(), lexicon.categories());
    let candidates = find_candidates(
        &transformed,
        lexicon,
        MatchOptions {
            max_gap: options.max_gap,
        },
    );
    let assignments = solve(&candidates, &transformed, lexicon);
    let table = lexicon.generation_table(target_lang);

    let mut result = TranslationResult::empty(text);
    result.analyses = transformed
        .tokens
        .iter()
        .map(|t| TokenTrace {
            surface: t.surface.clone(),
            deleted: t.deleted,
            analyses: t.analyses.iter().map(ToString::to_string).collect(),
        })
        .collect();

    let mut transfers_trace = Vec::new();
    for a in &assignments {
        let mut outcome = AssignmentOutcome {
            score: a.score().as_pair(),
            instances: a.dump(),
            outputs: Vec::new(),
        };
        for t in transfer(a, lexicon, target_lang) {
            if options.trace {
                let trees: Vec<String> = t.groups.iter().map(|g| g.render(lexicon)).collect();
                transfers_trace.push(trees.join(" "));
            }
            let remaining = options.max_outputs.map(|m| m.saturating_sub(result.outputs.len()));
            if remaining == Some(0) {
                continue;
            }
            let items = linearize(&t, a, &transformed, lexicon);
            for sentence in realize_limited(&items, &transformed, table, remaining) {
                outcome.outputs.push(result.outputs.len());
                result.texts.push(join_segments(&sentence));
                result.outputs.push(sentence);
            }
        }
        result.assignments.push(outcome);
    }

    if options.trace {
        result.trace = Some(Trace {
            analyzed: analyzed.to_string(),
            transformed: transformed.to_string(),
            candidates: crate::solver::Assignment { instances: candidates }.dump(),
            transfers: transfers_trace,
        });
    }
    result
}
