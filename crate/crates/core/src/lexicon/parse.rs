//! Readers for the line-oriented lexicon files.
//!
//! All files are UTF-8; blank lines and lines starting with `#` are skipped.

use std::collections::BTreeSet;
use std::path::Path;

use super::entry::{AgreementConstraint, GroupEntry, TransformRule, Translation};
use super::item::{parse_item_list, split_lexeme, GroupItem};
use super::tables::{CategoryDict, FormRow, FormTable};
use super::LexiconError;
use crate::features::FeatureMap;
use crate::morpho::Analysis;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line))
        .filter(|(_, line)| {
            let t = line.trim();
            !t.is_empty() && !t.starts_with('#')
        })
}

fn err(file: &Path, line: usize, message: impl Into<String>) -> LexiconError {
    LexiconError::Parse {
        file: file.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_positions(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            p.parse::<usize>().map_err(|_| format!("bad position `{p}`"))
        })
        .collect()
}

/// `(s,t):(f:g,...); (s,t):(f:g)`
fn parse_agreements(s: &str) -> Result<Vec<AgreementConstraint>, String> {
    let mut out = Vec::new();
    for part in s.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (positions, mappings) = part
            .split_once("):(")
            .ok_or_else(|| format!("malformed agreement `{part}`"))?;
        let positions = positions
            .strip_prefix('(')
            .ok_or_else(|| format!("malformed agreement `{part}`"))?;
        let mappings = mappings
            .strip_suffix(')')
            .ok_or_else(|| format!("malformed agreement `{part}`"))?;
        let pos = parse_positions(positions)?;
        let [source_pos, target_pos] = pos[..] else {
            return Err(format!("agreement `{part}` needs exactly two positions"));
        };
        let mappings = mappings
            .split(',')
            .filter(|m| !m.trim().is_empty())
            .map(|m| {
                let (f, g) = m
                    .split_once(':')
                    .ok_or_else(|| format!("malformed feature mapping `{m}`"))?;
                let (f, g) = (f.trim(), g.trim());
                if f.is_empty() || g.is_empty() {
                    return Err(format!("malformed feature mapping `{m}`"));
                }
                Ok((f.to_owned(), g.to_owned()))
            })
            .collect::<Result<Vec<_>, String>>()?;
        out.push(AgreementConstraint {
            source_pos,
            target_pos,
            mappings,
        });
    }
    Ok(out)
}

/// Parses a `groups.mdt` file.
pub fn parse_groups(text: &str, file: &Path) -> Result<Vec<GroupEntry>, LexiconError> {
    let mut entries: Vec<GroupEntry> = Vec::new();
    for (line_no, line) in content_lines(text) {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("group:") {
            let (items, heads) = parse_item_list(rest).map_err(|m| err(file, line_no, m))?;
            if items.is_empty() {
                return Err(err(file, line_no, "empty group"));
            }
            let head_index = match heads[..] {
                [h] => h,
                [] => return Err(err(file, line_no, "group has no bracketed head")),
                _ => return Err(err(file, line_no, "group has more than one head")),
            };
            entries.push(GroupEntry {
                items,
                head_index,
                translations: Vec::new(),
            });
        } else if let Some(rest) = line.strip_prefix("->") {
            let entry = entries
                .last_mut()
                .ok_or_else(|| err(file, line_no, "translation outside a group"))?;
            let (lang, rest) = rest
                .split_once(':')
                .ok_or_else(|| err(file, line_no, "expected `-> <lang>: <items>`"))?;
            let lang = lang.trim();
            if lang.is_empty() || lang.contains(char::is_whitespace) {
                return Err(err(file, line_no, format!("bad language code `{lang}`")));
            }
            let (items, heads) = parse_item_list(rest).map_err(|m| err(file, line_no, m))?;
            if items.is_empty() {
                return Err(err(file, line_no, "empty translation"));
            }
            if heads.len() > 1 {
                return Err(err(file, line_no, "translation has more than one head"));
            }
            entry.translations.push(Translation {
                target_lang: lang.to_owned(),
                items,
                head: heads.first().copied(),
                alignment: Vec::new(),
                agreements: Vec::new(),
            });
        } else if let Some(rest) = line.strip_prefix("align:") {
            let t = last_translation(&mut entries).ok_or_else(|| err(file, line_no, "align outside a translation"))?;
            t.alignment = parse_positions(rest).map_err(|m| err(file, line_no, m))?;
        } else if let Some(rest) = line.strip_prefix("agr:") {
            let t = last_translation(&mut entries).ok_or_else(|| err(file, line_no, "agr outside a translation"))?;
            let agr = parse_agreements(rest).map_err(|m| err(file, line_no, m))?;
            t.agreements.extend(agr);
        } else {
            return Err(err(file, line_no, format!("unrecognized line `{line}`")));
        }
    }
    Ok(entries)
}

fn last_translation(entries: &mut [GroupEntry]) -> Option<&mut Translation> {
    entries.last_mut()?.translations.last_mut()
}

/// Parses a `transforms.mdt` file:
/// `rule: <pattern> => <pos>[features] ... del <pos,...>`.
pub fn parse_transforms(text: &str, file: &Path) -> Result<Vec<TransformRule>, LexiconError> {
    content_lines(text)
        .map(|(line_no, line)| parse_rule(line.trim()).map_err(|m| err(file, line_no, m)))
        .collect()
}

fn parse_rule(line: &str) -> Result<TransformRule, String> {
    let rest = line
        .strip_prefix("rule:")
        .ok_or_else(|| format!("unrecognized line `{line}`"))?;
    let (lhs, rhs) = rest.split_once("=>").ok_or_else(|| "rule is missing `=>`".to_owned())?;
    let pattern = lhs
        .split_whitespace()
        .map(GroupItem::parse)
        .collect::<Result<Vec<_>, _>>()?;
    if pattern.is_empty() {
        return Err("rule has an empty pattern".to_owned());
    }
    let (actions_part, deletions_part) = match rhs.split_once(" del ") {
        Some((a, d)) => (a, Some(d)),
        None => match rhs.trim().strip_prefix("del ") {
            Some(d) => ("", Some(d)),
            None => (rhs, None),
        },
    };
    let mut actions = Vec::new();
    for token in actions_part.split_whitespace() {
        let (pos, body) = token
            .split_once('[')
            .ok_or_else(|| format!("malformed action `{token}`"))?;
        let pos: usize = pos.parse().map_err(|_| format!("bad position in action `{token}`"))?;
        let body = body
            .strip_suffix(']')
            .ok_or_else(|| format!("unterminated action `{token}`"))?;
        let features: FeatureMap = body.parse().map_err(|e| format!("action `{token}`: {e}"))?;
        actions.push((pos, features));
    }
    let deletions: BTreeSet<usize> = match deletions_part {
        Some(d) => parse_positions(d)?.into_iter().collect(),
        None => BTreeSet::new(),
    };
    if actions.is_empty() && deletions.is_empty() {
        return Err("rule has no actions".to_owned());
    }
    Ok(TransformRule {
        pattern,
        actions,
        deletions,
    })
}

fn split_tsv(line: &str) -> Vec<&str> {
    line.split('\t').map(str::trim).collect()
}

fn parse_lexeme(lexeme: &str) -> Result<&str, String> {
    split_lexeme(lexeme)
        .map(|(_, pos)| pos)
        .ok_or_else(|| format!("`{lexeme}` is not a lexeme identifier (expected stem_pos)"))
}

/// Source-side `forms.tsv`: `wordform<TAB>lexeme<TAB>pos<TAB>features`.
pub fn parse_analysis_forms(text: &str, file: &Path) -> Result<FormTable, LexiconError> {
    let mut table = FormTable::new();
    for (line_no, line) in content_lines(text) {
        let cols = split_tsv(line);
        let (wordform, lexeme, pos, features) = match cols[..] {
            [w, l, p] => (w, l, p, ""),
            [w, l, p, f] => (w, l, p, f),
            _ => return Err(err(file, line_no, "expected wordform, lexeme, pos, features")),
        };
        let suffix = parse_lexeme(lexeme).map_err(|m| err(file, line_no, m))?;
        if suffix != pos {
            return Err(err(
                file,
                line_no,
                format!("lexeme `{lexeme}` does not carry POS `{pos}`"),
            ));
        }
        let features = features.parse().map_err(|e| err(file, line_no, format!("{e}")))?;
        table.push(FormRow {
            wordform: wordform.to_owned(),
            analysis: Analysis::new(lexeme, pos, features),
        });
    }
    Ok(table)
}

/// Target-side `forms.tsv`: `lexeme<TAB>features<TAB>wordform`.
pub fn parse_generation_forms(text: &str, file: &Path) -> Result<FormTable, LexiconError> {
    let mut table = FormTable::new();
    for (line_no, line) in content_lines(text) {
        let cols = split_tsv(line);
        let [lexeme, features, wordform] = cols[..] else {
            return Err(err(file, line_no, "expected lexeme, features, wordform"));
        };
        if wordform.is_empty() {
            return Err(err(file, line_no, "empty wordform"));
        }
        let pos = parse_lexeme(lexeme).map_err(|m| err(file, line_no, m))?;
        let features = features.parse().map_err(|e| err(file, line_no, format!("{e}")))?;
        table.push(FormRow {
            wordform: wordform.to_owned(),
            analysis: Analysis::new(lexeme, pos, features),
        });
    }
    Ok(table)
}

/// `cats.tsv`: `lexeme_or_wordform<TAB>$cat[<TAB>$cat...]`.
pub fn parse_categories(text: &str, file: &Path) -> Result<CategoryDict, LexiconError> {
    let mut dict = CategoryDict::new();
    for (line_no, line) in content_lines(text) {
        let cols = split_tsv(line);
        if cols.len() < 2 {
            return Err(err(file, line_no, "expected key and category"));
        }
        for cat in &cols[1..] {
            if !cat.starts_with('$') || cat.len() < 2 {
                return Err(err(file, line_no, format!("category `{cat}` must start with $")));
            }
            dict.insert(cols[0], *cat);
        }
    }
    Ok(dict)
}

/// Writes entries back in the `groups.mdt` grammar.
pub fn serialize_groups(entries: &[GroupEntry]) -> String {
    entries.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    const ENTRY_3: &str = "group: [make_v] fun of $sbd\n  -> am: $sbd[+acc] ['a^sofa_v]\n     align: 2,0,0,1\n     agr: (1,2):(tam:tam,sb:sb); (4,1):(num:num)\n";

    fn path() -> &'static Path {
        Path::new("groups.mdt")
    }

    #[test]
    fn parses_entry_with_category_and_agreements() {
        let entries = parse_groups(ENTRY_3, path()).unwrap();
        assert_eq!(entries.len(), 1);
        let e = &entries[0];
        assert_eq!(e.head_index, 1);
        assert_eq!(e.head().text, "make_v");
        let t = &e.translations[0];
        assert_eq!(t.target_lang, "am");
        assert_eq!(t.head, Some(2));
        assert_eq!(t.alignment, vec![2, 0, 0, 1]);
        assert_eq!(t.agreements.len(), 2);
        assert_eq!(t.agreements[1].source_pos, 4);
        assert_eq!(t.agreements[1].mappings, vec![("num".to_owned(), "num".to_owned())]);
        assert_eq!(e.to_string(), ENTRY_3);
    }

    #[test]
    fn minimal_entry_round_trips() {
        let text = "group: [mayor_n]\n  -> am: kantibA_n\n     align: 1\n";
        let entries = parse_groups(text, path()).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].head_index, 1);
        let again = parse_groups(&serialize_groups(&entries), path()).unwrap();
        assert_eq!(again, entries);
    }

    #[test]
    fn group_errors_carry_line_numbers() {
        let text = "# comment\n\ngroup: one way\n";
        match parse_groups(text, path()) {
            Err(LexiconError::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("no bracketed head"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_groups("group: [a] [b]\n", path()).is_err());
        assert!(parse_groups("  align: 1\n", path()).is_err());
        assert!(parse_groups("group: [a]\n  -> am: [x] [y]\n", path()).is_err());
        assert!(parse_groups("group: [a]\n  -> am: x\n  agr: (1):(a:b)\n", path()).is_err());
        assert!(parse_groups("group: [a[-neg]]\n", path()).is_err());
    }

    #[test]
    fn parses_transform_rule() {
        let rule = parse_rule("rule: they do not $v => 4[sb=3p,tam=impf,+neg] del 1,2,3").unwrap();
        assert_eq!(rule.pattern.len(), 4);
        assert_eq!(rule.actions.len(), 1);
        assert_eq!(rule.actions[0].0, 4);
        assert_eq!(rule.actions[0].1.to_string(), "+neg,sb=3p,tam=impf");
        assert_eq!(rule.deletions, BTreeSet::from([1, 2, 3]));
        assert_eq!(parse_rule(&rule.to_string()).unwrap(), rule);

        let del_only = parse_rule("rule: . => del 1").unwrap();
        assert!(del_only.actions.is_empty());
        assert_eq!(del_only.deletions, BTreeSet::from([1]));

        let spaced = parse_rule("rule: a b => del 1, 2").unwrap();
        assert_eq!(spaced.deletions, BTreeSet::from([1, 2]));

        assert!(parse_rule("rule: a b").is_err());
        assert!(parse_rule("rule: a =>").is_err());
        assert!(parse_rule("rule: => 1[+x]").is_err());
    }

    #[test]
    fn analysis_rows_must_match_pos() {
        let ok = parse_analysis_forms("made\tmake_v\tv\ttns=pst\nfun\tfun_n\tn\n", path()).unwrap();
        assert_eq!(ok.len(), 2);
        assert!(parse_analysis_forms("made\tmake_v\tn\t\n", path()).is_err());
        assert!(parse_analysis_forms("made\tmake\tv\t\n", path()).is_err());
    }

    #[test]
    fn generation_rows_parse() {
        let t = parse_generation_forms("'a^sofa_v\ttam=prf,sb=3psf\t'a^sofa^c\n", path()).unwrap();
        assert_eq!(t.rows()[0].wordform, "'a^sofa^c");
        assert_eq!(t.rows()[0].analysis.pos, "v");
        assert!(parse_generation_forms("x_v\ttam=prf\n", path()).is_err());
    }

    #[test]
    fn categories_need_dollar() {
        let d = parse_categories("mayor_n\t$sbd\n", path()).unwrap();
        assert!(d.has("mayor_n", "$sbd"));
        assert!(parse_categories("mayor_n\tsbd\n", path()).is_err());
    }
}
