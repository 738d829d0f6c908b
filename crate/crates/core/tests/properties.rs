mod common;

use std::fs;

use common::{demo, fixture_sentences, random_cases, DEMO};
use mdt_core::lexicon::parse::parse_groups;
use mdt_core::lexicon::{serialize_groups, ItemKind};
use mdt_core::morpho::{analyze, generate};
use mdt_core::pipeline::{apply_transforms, AnalyzedSentence};
use mdt_core::solver::{find_candidates, solve, verify, Assignment, MatchOptions};
use mdt_core::xfer::{linearize, realize, transfer, translate, LinearItem, TargetGroupInstance};
use mdt_core::{unify, FeatureMap, Lexicon};
use proptest::prelude::*;

fn feature_map() -> impl Strategy<Value = FeatureMap> {
    prop::collection::btree_map("[a-d]", "[xyz]|true", 0..4).prop_map(|m| m.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn unify_is_associative(a in feature_map(), b in feature_map(), c in feature_map()) {
        let left = unify(&a, &b).and_then(|ab| unify(&ab, &c));
        let right = unify(&b, &c).and_then(|bc| unify(&a, &bc));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn empty_map_is_identity(a in feature_map()) {
        prop_assert_eq!(unify(&a, &FeatureMap::new()), Some(a.clone()));
        prop_assert_eq!(unify(&FeatureMap::new(), &a), Some(a));
    }

    #[test]
    fn unify_is_commutative(a in feature_map(), b in feature_map()) {
        prop_assert_eq!(unify(&a, &b), unify(&b, &a));
    }
}

#[test]
fn every_analysis_row_round_trips() {
    let lex = demo();
    let table = lex.analysis_table();
    assert!(!table.is_empty());
    for row in table.rows() {
        assert!(
            analyze(&row.wordform, table).contains(&row.analysis),
            "{}",
            row.wordform
        );
    }
}

#[test]
fn every_generation_row_round_trips() {
    let lex = demo();
    let table = lex.generation_table("am").unwrap();
    assert!(!table.is_empty());
    for row in table.rows() {
        let a = &row.analysis;
        assert!(
            generate(&a.lexeme, &a.features, table).contains(&row.wordform),
            "{}",
            row.wordform
        );
    }
}

#[test]
fn demo_groups_are_a_serialization_fixed_point() {
    let path = std::path::Path::new(DEMO).join("en/groups.mdt");
    let first = parse_groups(&fs::read_to_string(&path).unwrap(), &path).unwrap();
    let text = serialize_groups(&first);
    let second = parse_groups(&text, &path).unwrap();
    assert_eq!(first, second);
    assert_eq!(serialize_groups(&second), text);
}

fn transformed(text: &str, lex: &Lexicon) -> AnalyzedSentence {
    let s = AnalyzedSentence::analyze(text, lex.analysis_table());
    apply_transforms(&s, lex.rules(), lex.categories())
}

fn solved(s: &AnalyzedSentence, lex: &Lexicon) -> Vec<Assignment> {
    solve(&find_candidates(s, lex, MatchOptions::default()), s, lex)
}

#[test]
fn transforms_are_idempotent_on_fixtures() {
    let lex = demo();
    for text in fixture_sentences() {
        let once = transformed(&text, &lex);
        let twice = apply_transforms(&once, lex.rules(), lex.categories());
        assert_eq!(once, twice, "{text}");
    }
}

#[test]
fn fixture_assignments_pass_the_verifier() {
    let lex = demo();
    for text in fixture_sentences() {
        let s = transformed(&text, &lex);
        for a in solved(&s, &lex) {
            assert!(verify(&a, &s, &lex).is_empty(), "{text}: {:?}", verify(&a, &s, &lex));
        }
    }
}

fn check_agreement(g: &TargetGroupInstance, a: &Assignment, lex: &Lexicon) {
    let inst = &a.instances[g.source];
    let t = &lex.entry(g.entry).translations[g.translation];
    for agr in &t.agreements {
        let source = &inst.analyses[agr.source_pos - 1].features;
        let target = match g.slot_expansions.get(&agr.target_pos) {
            Some(exp) => exp.head_features(lex),
            None => &g.item_features[agr.target_pos - 1],
        };
        for (f, to) in &agr.mappings {
            if let Some(v) = source.get(f) {
                assert_eq!(target.get(to), Some(v), "{f}->{to} in entry {}", g.entry + 1);
            }
        }
    }
    for exp in g.slot_expansions.values() {
        check_agreement(exp, a, lex);
    }
}

fn check_slots(g: &TargetGroupInstance, a: &Assignment, lex: &Lexicon) {
    let inst = &a.instances[g.source];
    let t = &lex.entry(g.entry).translations[g.translation];
    let categories: Vec<usize> = (1..=t.items.len())
        .filter(|&p| t.items[p - 1].kind == ItemKind::Category)
        .collect();
    assert_eq!(g.slot_expansions.keys().copied().collect::<Vec<_>>(), categories);
    for (&tp, exp) in &g.slot_expansions {
        let sp = t.source_of(tp).unwrap();
        assert_eq!(inst.slot_fills.get(&sp), Some(&exp.source));
        check_slots(exp, a, lex);
    }
}

fn target_items(g: &TargetGroupInstance, lex: &Lexicon) -> usize {
    let t = &lex.entry(g.entry).translations[g.translation];
    t.items.len() - g.slot_expansions.len() + g.slot_expansions.values().map(|e| target_items(e, lex)).sum::<usize>()
}

fn all_texts() -> Vec<String> {
    let lex = demo();
    let mut texts = fixture_sentences();
    texts.extend(random_cases(&lex, 23, 150).into_iter().map(|c| c.text));
    texts
}

#[test]
fn transfer_respects_agreement_and_slot_alignment() {
    let lex = demo();
    for text in all_texts() {
        let s = transformed(&text, &lex);
        for a in solved(&s, &lex) {
            for t in transfer(&a, &lex, "am") {
                for g in &t.groups {
                    check_agreement(g, &a, &lex);
                    check_slots(g, &a, &lex);
                }
                let items = linearize(&t, &a, &s, &lex);
                let targets = items.iter().filter(|i| matches!(i, LinearItem::Target { .. })).count();
                assert_eq!(
                    targets,
                    t.groups.iter().map(|g| target_items(g, &lex)).sum::<usize>(),
                    "{text}"
                );
                assert!(items.iter().all(|i| match i {
                    LinearItem::Target { item, .. } => item.kind != ItemKind::Category,
                    LinearItem::Source { .. } => true,
                }));
            }
        }
    }
}

#[test]
fn output_count_is_the_product_of_choices() {
    let lex = demo();
    let table = lex.generation_table("am").unwrap();
    for text in all_texts() {
        let s = transformed(&text, &lex);
        let mut expected = 0;
        for a in solved(&s, &lex) {
            for t in transfer(&a, &lex, "am") {
                let items = linearize(&t, &a, &s, &lex);
                let product: usize = items
                    .iter()
                    .map(|i| match i {
                        LinearItem::Target { item, features } if item.kind == ItemKind::Lexeme => {
                            generate(&item.text, features, table).len().max(1)
                        }
                        _ => 1,
                    })
                    .product();
                assert_eq!(realize(&items, &s, Some(table)).len(), product, "{text}");
                expected += product;
            }
        }
        let r = translate(&text, &lex, "en", "am", &Default::default()).unwrap();
        assert_eq!(r.outputs.len(), expected, "{text}");
        let capped = translate(
            &text,
            &lex,
            "en",
            "am",
            &mdt_core::TranslateOptions {
                max_outputs: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(capped.outputs.len(), expected.min(2));
        assert_eq!(capped.outputs[..], r.outputs[..expected.min(2)]);
    }
}

#[test]
fn translation_is_byte_identical_across_runs() {
    let lex = demo();
    let opts = mdt_core::TranslateOptions {
        trace: true,
        ..Default::default()
    };
    for text in all_texts() {
        let a = serde_json::to_string(&translate(&text, &lex, "en", "am", &opts).unwrap()).unwrap();
        let b = serde_json::to_string(&translate(&text, &demo(), "en", "am", &opts).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
