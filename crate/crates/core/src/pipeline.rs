//! Tokenization, analysis and morphosyntactic transformation of a source
//! sentence.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::features::FeatureMap;
use crate::lexicon::{CategoryDict, FormTable, GroupItem, ItemKind, TransformRule};
use crate::morpho::{analyze, Analysis};

/// Clitic suffixes split off a word, longest first where they overlap.
pub const CONTRACTIONS: &[&str] = &["n't", "'s", "'re", "'ve", "'ll", "'d", "'m"];

/// One token of a source sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    /// Text as written.
    pub surface: String,
    /// Lowercased lookup key.
    pub norm: String,
    pub analyses: Vec<Analysis>,
    pub deleted: bool,
    pub origin_index: usize,
    /// Set when a rule that deleted other words rewrote this token's features.
    pub absorbed: bool,
}

/// A sentence after analysis. Deleted tokens stay in place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalyzedSentence {
    pub tokens: Vec<Token>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct InputError {
    pub line: usize,
    pub message: String,
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && c != '\'' && !c.is_whitespace()
}

fn split_contraction(word: &str) -> Option<(&str, &str)> {
    let lower = word.to_lowercase();
    CONTRACTIONS.iter().find_map(|suffix| {
        if lower.len() == word.len() && lower.ends_with(suffix) && word.len() > suffix.len() {
            let cut = word.len() - suffix.len();
            word.is_char_boundary(cut).then(|| word.split_at(cut))
        } else {
            None
        }
    })
}

/// Splits on whitespace, detaches leading and trailing punctuation, and
/// splits English clitics (`don't` → `do n't`).
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let start = chunk.find(|c: char| !is_punct(c)).unwrap_or(chunk.len());
        let end = chunk
            .rfind(|c: char| !is_punct(c))
            .map_or(start, |i| i + chunk[i..].chars().next().map_or(0, char::len_utf8));
        out.extend(chunk[..start].chars().map(String::from));
        if start < end {
            let word = &chunk[start..end];
            match split_contraction(word) {
                Some((stem, clitic)) => {
                    out.push(stem.to_owned());
                    out.push(clitic.to_owned());
                }
                None => out.push(word.to_owned()),
            }
        }
        if end < chunk.len() {
            out.extend(chunk[end..].chars().map(String::from));
        }
    }
    out
}

impl AnalyzedSentence {
    /// Tokenizes `text` and looks every token up in `table`.
    pub fn analyze(text: &str, table: &FormTable) -> Self {
        let tokens = tokenize(text)
            .into_iter()
            .enumerate()
            .map(|(i, surface)| {
                let norm = surface.to_lowercase();
                Token {
                    analyses: analyze(&norm, table),
                    surface,
                    norm,
                    deleted: false,
                    origin_index: i,
                    absorbed: false,
                }
            })
            .collect();
        AnalyzedSentence { tokens }
    }

    /// Reads pre-analyzed input, one token per line:
    /// `surface<TAB>lexeme<TAB>pos<TAB>features`.
    pub fn from_preanalyzed(text: &str) -> Result<Self, InputError> {
        let mut tokens = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
            let (surface, lexeme, pos, features) = match cols[..] {
                [s, l, p] => (s, l, p, ""),
                [s, l, p, f] => (s, l, p, f),
                _ => {
                    return Err(InputError {
                        line: i + 1,
                        message: "expected surface, lexeme, pos, features".to_owned(),
                    })
                }
            };
            if surface.is_empty() || lexeme.is_empty() || pos.is_empty() {
                return Err(InputError {
                    line: i + 1,
                    message: "empty column".to_owned(),
                });
            }
            let features: FeatureMap = features.parse().map_err(|e| InputError {
                line: i + 1,
                message: format!("{e}"),
            })?;
            let origin_index = tokens.len();
            tokens.push(Token {
                surface: surface.to_owned(),
                norm: surface.to_lowercase(),
                analyses: vec![Analysis::new(lexeme, pos, features)],
                deleted: false,
                origin_index,
                absorbed: false,
            });
        }
        Ok(AnalyzedSentence { tokens })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Indices of tokens that are not deleted, in order.
    pub fn live(&self) -> Vec<usize> {
        self.tokens
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.deleted)
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for AnalyzedSentence {
    /// Live tokens, each as its analysis (`make_v[tns=pst]`) or, when
    /// ambiguous or unknown, its surface form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for token in self.tokens.iter().filter(|t| !t.deleted) {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            match &token.analyses[..] {
                [a] if !a.is_unknown() => write!(f, "{a}")?,
                _ => f.write_str(&token.surface)?,
            }
        }
        Ok(())
    }
}

/// Whether `analysis` of a token with lookup key `norm` satisfies `item`.
pub fn item_matches(item: &GroupItem, norm: &str, analysis: &Analysis, cats: &CategoryDict) -> bool {
    let kind_ok = match item.kind {
        ItemKind::Word => norm == item.text.to_lowercase(),
        ItemKind::Lexeme => analysis.lexeme == item.text,
        ItemKind::Category if item.is_pos_category() => analysis.pos == item.text[1..],
        ItemKind::Category => cats.has(&analysis.lexeme, &item.text) || cats.has(norm, &item.text),
    };
    kind_ok && item.constraints.compatible(&analysis.features)
}

struct RuleMatch {
    rewrites: Vec<(usize, Analysis)>,
    deletions: Vec<usize>,
}

fn match_rule(rule: &TransformRule, s: &AnalyzedSentence, window: &[usize], cats: &CategoryDict) -> Option<RuleMatch> {
    if window.len() < rule.pattern.len() {
        return None;
    }
    let mut rewrites = Vec::new();
    for (j, item) in rule.pattern.iter().enumerate() {
        let token = &s.tokens[window[j]];
        let mut matching = token
            .analyses
            .iter()
            .filter(|a| item_matches(item, &token.norm, a, cats))
            .peekable();
        matching.peek()?;
        if let Some((_, features)) = rule.actions.iter().find(|(pos, _)| *pos == j + 1) {
            let rewritten = matching.find_map(|a| {
                a.features
                    .unify(features)
                    .map(|f| Analysis::new(a.lexeme.clone(), a.pos.clone(), f))
            })?;
            rewrites.push((window[j], rewritten));
        }
    }
    let deletions = rule.deletions.iter().map(|&p| window[p - 1]).collect();
    Some(RuleMatch { rewrites, deletions })
}

/// Applies transformation rules in one left-to-right pass.
///
/// At each live token the rules are tried in order; the first one whose
/// pattern matches the following live tokens fires, and scanning resumes
/// after the matched span.
pub fn apply_transforms(s: &AnalyzedSentence, rules: &[TransformRule], cats: &CategoryDict) -> AnalyzedSentence {
    let mut out = s.clone();
    let live = s.live();
    let mut k = 0;
    while k < live.len() {
        let fired = rules
            .iter()
            .find_map(|rule| match_rule(rule, &out, &live[k..], cats).map(|m| (rule.pattern.len(), m)));
        match fired {
            Some((len, m)) => {
                let absorbing = !m.deletions.is_empty();
                for (idx, analysis) in m.rewrites {
                    let token = &mut out.tokens[idx];
                    token.analyses = vec![analysis];
                    token.absorbed |= absorbing;
                }
                for idx in m.deletions {
                    out.tokens[idx].deleted = true;
                }
                k += len;
            }
            None => k += 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::parse::{parse_analysis_forms, parse_transforms};
    use std::path::Path;

    fn fm(s: &str) -> FeatureMap {
        s.parse().unwrap()
    }

    #[test]
    fn tokenizes_figure_sentence() {
        assert_eq!(
            tokenize("She made fun of the mayor."),
            vec!["She", "made", "fun", "of", "the", "mayor", "."]
        );
        assert!(tokenize("").is_empty());
        assert!(tokenize("   ").is_empty());
    }

    #[test]
    fn detaches_punctuation_on_both_sides() {
        assert_eq!(
            tokenize("(\"hi,\" she said)"),
            vec!["(", "\"", "hi", ",", "\"", "she", "said", ")"]
        );
        assert_eq!(tokenize("...!"), vec![".", ".", ".", "!"]);
        assert_eq!(tokenize("«ሰላም»"), vec!["«", "ሰላም", "»"]);
    }

    #[test]
    fn splits_every_contraction() {
        assert_eq!(tokenize("don't stop"), vec!["do", "n't", "stop"]);
        for clitic in CONTRACTIONS {
            let word = format!("x{clitic}");
            assert_eq!(tokenize(&word), vec!["x".to_owned(), clitic.to_string()], "{word}");
            let upper = format!("X{}", clitic.to_uppercase());
            assert_eq!(tokenize(&upper).len(), 2, "{upper}");
            assert_eq!(tokenize(clitic), vec![clitic.to_string()], "bare {clitic}");
        }
        assert_eq!(tokenize("Can't."), vec!["Ca", "n't", "."]);
    }

    fn table() -> FormTable {
        parse_analysis_forms(
            "they\tthey_pron\tpron\ndo\tdo_v\tv\ttns=prs\nnot\tnot_adv\tadv\nknow\tknow_v\tv\n\
             her\tshe_pron\tpron\t+acc\nshe\tshe_pron\tpron\nmade\tmake_v\tv\ttns=pst\n\
             fun\tfun_n\tn\nof\tof_prep\tprep\nthe\tthe_det\tdet\nmayor\tmayor_n\tn\n",
            Path::new("forms.tsv"),
        )
        .unwrap()
    }

    fn rules() -> Vec<TransformRule> {
        parse_transforms(
            "rule: they do not $v => 4[sb=3p,tam=impf,+neg] del 1,2,3\n\
             rule: she $v[tns=pst] => 2[tam=prf,sb=3psf] del 1\n\
             rule: the $n => 2[+def] del 1\n\
             rule: . => del 1\n",
            Path::new("transforms.mdt"),
        )
        .unwrap()
    }

    #[test]
    fn negation_rule_rewrites_verb() {
        let s = AnalyzedSentence::analyze("they do not know her", &table());
        let t = apply_transforms(&s, &rules(), &CategoryDict::new());
        let deleted: Vec<bool> = t.tokens.iter().map(|t| t.deleted).collect();
        assert_eq!(deleted, vec![true, true, true, false, false]);
        assert_eq!(
            t.tokens[3].analyses,
            vec![Analysis::new("know_v", "v", fm("sb=3p,tam=impf,+neg"))]
        );
        assert!(t.tokens[3].absorbed);
        assert_eq!(t.tokens[4], s.tokens[4]);
    }

    #[test]
    fn figure_sentence_transforms() {
        let s = AnalyzedSentence::analyze("She made fun of the mayor.", &table());
        assert_eq!(
            s.to_string(),
            "she_pron make_v[tns=pst] fun_n of_prep the_det mayor_n ."
        );
        let t = apply_transforms(&s, &rules(), &CategoryDict::new());
        assert_eq!(
            t.to_string(),
            "make_v[sb=3psf,tam=prf,tns=pst] fun_n of_prep mayor_n[+def]"
        );
        assert_eq!(t.live(), vec![1, 2, 3, 5]);
    }

    #[test]
    fn no_rule_leaves_sentence_unchanged() {
        let s = AnalyzedSentence::analyze("fun of her", &table());
        assert_eq!(apply_transforms(&s, &rules(), &CategoryDict::new()), s);
    }

    #[test]
    fn failed_action_unification_blocks_rule() {
        let rules = parse_transforms("rule: $v => 1[tns=prs]\nrule: $v => 1[+past]\n", Path::new("t")).unwrap();
        let s = AnalyzedSentence::analyze("made", &table());
        let t = apply_transforms(&s, &rules, &CategoryDict::new());
        assert_eq!(t.tokens[0].analyses[0].features, fm("tns=pst,+past"));
        assert!(!t.tokens[0].absorbed);
    }

    #[test]
    fn deleted_tokens_are_skipped_by_patterns() {
        // `the` is deleted by the first rule, so `fun mayor` becomes adjacent.
        let rules = parse_transforms("rule: the $n => 2[+def] del 1\nrule: fun $n => 2[+x]\n", Path::new("t")).unwrap();
        let s = AnalyzedSentence::analyze("fun the mayor", &table());
        let once = apply_transforms(&s, &rules, &CategoryDict::new());
        assert_eq!(once.tokens[2].analyses[0].features, fm("+def"));
        let twice = apply_transforms(&once, &rules, &CategoryDict::new());
        assert_eq!(twice.tokens[2].analyses[0].features, fm("+def,+x"));
    }

    #[test]
    fn preanalyzed_input() {
        let s = AnalyzedSentence::from_preanalyzed("made\tmake_v\tv\ttns=pst\nmayor\tmayor_n\tn\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.tokens[1].origin_index, 1);
        assert_eq!(s.tokens[0].analyses[0].features, fm("tns=pst"));
        assert_eq!(AnalyzedSentence::from_preanalyzed("made make_v").unwrap_err().line, 1);
    }
}
