//! Shared fixtures and a brute-force reference for the solver.
#![allow(dead_code)]

use std::collections::BTreeSet;

use mdt_core::lexicon::{GroupItem, ItemKind, POS_CATEGORIES};
use mdt_core::morpho::Analysis;
use mdt_core::pipeline::{apply_transforms, AnalyzedSentence};
use mdt_core::solver::{find_candidates, GroupInstance, MatchOptions};
use mdt_core::Lexicon;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEMO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../lexicons/demo");

pub fn demo() -> Lexicon {
    Lexicon::load(DEMO).expect("demo lexicon loads")
}

pub fn fixture_sentences() -> Vec<String> {
    include_str!("../fixtures/sentences.txt")
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(str::to_owned)
        .collect()
}

/// Word sequences drawn from the demo vocabulary; phrases make multi-item
/// groups and transforms actually fire.
const PIECES: &[&str] = &[
    "she",
    "he",
    "they",
    "you",
    "her",
    "do",
    "not",
    "n't",
    "make",
    "makes",
    "made",
    "lose",
    "loses",
    "lost",
    "know",
    "knows",
    "knew",
    "fun",
    "of",
    "the",
    "mayor",
    "mayors",
    "john",
    "hope",
    "one",
    "way",
    "or",
    "other",
    "xyzzy",
    ".",
    "made fun of",
    "fun of the mayor",
    "loses hope",
    "know her",
    "one way or the other",
    "they do not",
    "the mayor",
];

/// A transformed sentence together with its candidates.
pub struct Case {
    pub text: String,
    pub max_gap: usize,
    pub sentence: AnalyzedSentence,
    pub candidates: Vec<GroupInstance>,
}

/// `count` random cases with at most 8 live tokens and 12 candidates.
pub fn random_cases(lexicon: &Lexicon, seed: u64, count: usize) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.random_range(1..=6);
        let text = (0..n)
            .map(|_| *PIECES.choose(&mut rng).unwrap())
            .collect::<Vec<_>>()
            .join(" ");
        let max_gap = rng.random_range(0..=2);
        let analyzed = AnalyzedSentence::analyze(&text, lexicon.analysis_table());
        let sentence = apply_transforms(&analyzed, lexicon.rules(), lexicon.categories());
        let candidates = find_candidates(&sentence, lexicon, MatchOptions { max_gap });
        if sentence.live().len() <= 8 && candidates.len() <= 12 {
            out.push(Case {
                text,
                max_gap,
                sentence,
                candidates,
            });
        }
    }
    out
}

fn fits_slot(item: &GroupItem, norm: &str, a: &Analysis, lexicon: &Lexicon) -> bool {
    assert_eq!(item.kind, ItemKind::Category);
    let name = &item.text[1..];
    let member = if POS_CATEGORIES.contains(&item.text.as_str()) {
        a.pos == name
    } else {
        lexicon.categories().has(&a.lexeme, &item.text) || lexicon.categories().has(norm, &item.text)
    };
    // compatibility by hand: every shared feature agrees
    member
        && item
            .constraints
            .iter()
            .all(|(f, v)| a.features.get(f).is_none_or(|w| w == v))
}

/// Checks a subset of candidates against the assignment rules and returns
/// its merge links `(host, slot item, guest)` when valid.
pub fn oracle_valid(
    subset: &[usize],
    cands: &[GroupInstance],
    s: &AnalyzedSentence,
    lexicon: &Lexicon,
) -> Option<Vec<(usize, usize, usize)>> {
    // (instance, 1-based item) users per token
    let mut users: Vec<Vec<(usize, usize)>> = vec![Vec::new(); s.len()];
    for &c in subset {
        for (j, &p) in cands[c].positions.iter().enumerate() {
            users[p].push((c, j + 1));
        }
    }
    let is_slot = |c: usize, item: usize| lexicon.entry(cands[c].entry).items[item - 1].kind == ItemKind::Category;
    let is_head = |c: usize, item: usize| lexicon.entry(cands[c].entry).head_index == item;

    let mut links = Vec::new();
    for (tok, u) in users.iter().enumerate() {
        match u[..] {
            [] => {}
            [(c, item)] => {
                if is_slot(c, item) {
                    return None; // unfilled slot
                }
            }
            [x, y] => {
                let ((host, slot), (guest, head)) = if is_slot(x.0, x.1) { (x, y) } else { (y, x) };
                if host == guest || !is_slot(host, slot) || !is_head(guest, head) {
                    return None;
                }
                let item = &lexicon.entry(cands[host].entry).items[slot - 1];
                let analysis = &cands[guest].analyses[head - 1];
                if !fits_slot(item, &s.tokens[tok].norm, analysis, lexicon) {
                    return None;
                }
                links.push((host, slot, guest));
            }
            _ => return None,
        }
    }
    // no cycles: repeatedly strip instances that host nothing unresolved
    let mut remaining: BTreeSet<usize> = subset.iter().copied().collect();
    loop {
        let leaf = remaining
            .iter()
            .copied()
            .find(|&c| !links.iter().any(|&(h, _, g)| h == c && remaining.contains(&g)));
        match leaf {
            Some(c) => {
                remaining.remove(&c);
            }
            None => break,
        }
    }
    remaining.is_empty().then_some(links)
}

pub fn oracle_score(subset: &[usize], cands: &[GroupInstance]) -> (usize, i64) {
    let covered: BTreeSet<usize> = subset
        .iter()
        .flat_map(|&c| cands[c].positions.iter().copied())
        .collect();
    (covered.len(), -(subset.len() as i64))
}

/// Best score and every subset achieving it, by exhaustive enumeration.
pub fn oracle_best(
    cands: &[GroupInstance],
    s: &AnalyzedSentence,
    lexicon: &Lexicon,
) -> ((usize, i64), Vec<Vec<usize>>) {
    assert!(cands.len() < 20, "exhaustive oracle is exponential");
    let mut best = (0, 0);
    let mut winners: Vec<Vec<usize>> = vec![Vec::new()];
    for mask in 1u32..(1 << cands.len()) {
        let subset: Vec<usize> = (0..cands.len()).filter(|i| mask & (1 << i) != 0).collect();
        if oracle_valid(&subset, cands, s, lexicon).is_none() {
            continue;
        }
        let score = oracle_score(&subset, cands);
        if score > best {
            best = score;
            winners.clear();
        }
        if score == best {
            winners.push(subset);
        }
    }
    (best, winners)
}

/// Maps an assignment's instances back to candidate indices.
pub fn as_subset(instances: &[GroupInstance], cands: &[GroupInstance]) -> Vec<usize> {
    let mut out: Vec<usize> = instances
        .iter()
        .map(|inst| {
            cands
                .iter()
                .position(|c| c.entry == inst.entry && c.positions == inst.positions && c.analyses == inst.analyses)
                .expect("assignment instance comes from the candidate list")
        })
        .collect();
    out.sort_unstable();
    out
}
