//! Group selection.
//!
//! Candidate group instances are matched against the transformed sentence,
//! then a branch-and-bound search picks every consistent set of instances
//! with the best [`Score`]. A token may belong to two instances only when it
//! is a category slot of one and the head of the other (a merge).

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::lexicon::{GroupEntry, GroupItem, Lexicon};
use crate::morpho::Analysis;
use crate::pipeline::{item_matches, AnalyzedSentence};

/// A lexicon entry matched onto concrete tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupInstance {
    /// Index of the entry in the lexicon.
    pub entry: usize,
    /// Token index for each group item.
    pub positions: Vec<usize>,
    /// The analysis of each matched token that satisfied its item.
    pub analyses: Vec<Analysis>,
    /// 1-based head item position, copied from the entry.
    pub head: usize,
    /// 1-based item positions of category slots.
    pub slots: Vec<usize>,
    /// Slot item position → index of the merged instance in the owning
    /// [`Assignment`]. Empty for bare candidates.
    pub slot_fills: BTreeMap<usize, usize>,
}

impl GroupInstance {
    fn new(entry_index: usize, entry: &GroupEntry, positions: Vec<usize>, analyses: Vec<Analysis>) -> Self {
        let slots = entry
            .items
            .iter()
            .enumerate()
            .filter(|(_, item)| item.is_category())
            .map(|(i, _)| i + 1)
            .collect();
        GroupInstance {
            entry: entry_index,
            positions,
            analyses,
            head: entry.head_index,
            slots,
            slot_fills: BTreeMap::new(),
        }
    }

    pub fn head_token(&self) -> usize {
        self.positions[self.head - 1]
    }

    pub fn head_analysis(&self) -> &Analysis {
        &self.analyses[self.head - 1]
    }

    /// Token of 1-based item position `item`.
    pub fn token_at(&self, item: usize) -> usize {
        self.positions[item - 1]
    }

    /// First and last token index.
    pub fn span(&self) -> (usize, usize) {
        (self.positions[0], *self.positions.last().unwrap())
    }

    fn role_at(&self, item: usize) -> Role {
        if item == self.head {
            Role::Head
        } else if self.slots.contains(&item) {
            Role::Slot
        } else {
            Role::Plain
        }
    }

    fn order_key(&self) -> (usize, Reverse<usize>, usize, &[usize]) {
        let (start, end) = self.span();
        (start, Reverse(end - start), self.entry, &self.positions)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Head,
    Slot,
    Plain,
}

/// Coverage first, then fewer groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Score {
    pub covered: usize,
    pub groups: usize,
}

impl Score {
    /// `(covered, -groups)`.
    pub fn as_pair(&self) -> (usize, i64) {
        (self.covered, -(self.groups as i64))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        self.covered.cmp(&other.covered).then(other.groups.cmp(&self.groups))
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, g) = self.as_pair();
        write!(f, "({c}, {g})")
    }
}

/// A consistent set of group instances for one sentence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub instances: Vec<GroupInstance>,
}

/// `host.slot` is filled by the head of `guest` (indices into the assignment).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MergeLink {
    pub host: usize,
    pub slot: usize,
    pub guest: usize,
}

impl Assignment {
    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn score(&self) -> Score {
        score(self)
    }

    pub fn merges(&self) -> Vec<MergeLink> {
        self.instances
            .iter()
            .enumerate()
            .flat_map(|(host, inst)| {
                inst.slot_fills
                    .iter()
                    .map(move |(&slot, &guest)| MergeLink { host, slot, guest })
            })
            .collect()
    }

    /// Instances not merged into another instance, by head token.
    pub fn roots(&self) -> Vec<usize> {
        let merged: Vec<usize> = self.merges().iter().map(|m| m.guest).collect();
        let mut roots: Vec<usize> = (0..self.instances.len()).filter(|i| !merged.contains(i)).collect();
        roots.sort_by_key(|&i| self.instances[i].head_token());
        roots
    }

    /// One line per instance: `span=<i..j> head=<lexeme> entry=<n> merges=[...]`.
    ///
    /// Spans are half-open token ranges, entries are numbered from 1 in file
    /// order, and merges read `<slot item>:<guest head lexeme>@<token>`.
    pub fn dump(&self) -> Vec<String> {
        self.instances
            .iter()
            .map(|inst| {
                let (start, end) = inst.span();
                let merges: Vec<String> = inst
                    .slot_fills
                    .iter()
                    .map(|(slot, &guest)| {
                        let g = &self.instances[guest];
                        format!("{slot}:{}@{}", g.head_analysis().lexeme, g.head_token())
                    })
                    .collect();
                format!(
                    "span={start}..{} head={} entry={} merges=[{}]",
                    end + 1,
                    inst.head_analysis().lexeme,
                    inst.entry + 1,
                    merges.join(",")
                )
            })
            .collect()
    }

    fn order_key(&self) -> Vec<(usize, Reverse<usize>, usize, &[usize])> {
        self.instances.iter().map(GroupInstance::order_key).collect()
    }
}

/// Distinct tokens covered, and the number of instances.
pub fn score(a: &Assignment) -> Score {
    let mut tokens: Vec<usize> = a.instances.iter().flat_map(|i| i.positions.iter().copied()).collect();
    tokens.sort_unstable();
    tokens.dedup();
    Score {
        covered: tokens.len(),
        groups: a.instances.len(),
    }
}

/// Settings for candidate matching.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchOptions {
    /// Live tokens that may be skipped between consecutive group items.
    pub max_gap: usize,
}

/// Every way each lexicon entry matches the live tokens of `s`, ordered by
/// leftmost position, then entry order.
pub fn find_candidates(s: &AnalyzedSentence, lexicon: &Lexicon, options: MatchOptions) -> Vec<GroupInstance> {
    let live = s.live();
    let mut out = Vec::new();
    for (k, &tok) in live.iter().enumerate() {
        let token = &s.tokens[tok];
        let mut entries: Vec<usize> = lexicon.entries_headed_by(&token.norm).to_vec();
        for analysis in &token.analyses {
            entries.extend_from_slice(lexicon.entries_headed_by(&analysis.lexeme));
        }
        entries.sort_unstable();
        entries.dedup();
        for e in entries {
            let matcher = Matcher {
                s,
                lexicon,
                live: &live,
                entry: lexicon.entry(e),
                head_live: k,
                max_gap: options.max_gap,
            };
            let mut found = Vec::new();
            matcher.extend(0, None, &mut Vec::new(), &mut Vec::new(), &mut found);
            out.extend(
                found
                    .into_iter()
                    .map(|(pos, an)| GroupInstance::new(e, lexicon.entry(e), pos, an)),
            );
        }
    }
    out.sort_by_key(|inst| (inst.positions[0], inst.entry));
    out
}

struct Matcher<'a> {
    s: &'a AnalyzedSentence,
    lexicon: &'a Lexicon,
    live: &'a [usize],
    entry: &'a GroupEntry,
    head_live: usize,
    max_gap: usize,
}

impl Matcher<'_> {
    /// Extends a partial match at item `j`; `prev` is the live index of item `j - 1`.
    fn extend(
        &self,
        j: usize,
        prev: Option<usize>,
        positions: &mut Vec<usize>,
        analyses: &mut Vec<Analysis>,
        found: &mut Vec<(Vec<usize>, Vec<Analysis>)>,
    ) {
        let items = &self.entry.items;
        if j == items.len() {
            found.push((positions.clone(), analyses.clone()));
            return;
        }
        let head = self.entry.head_index - 1;
        let step = self.max_gap + 1;
        let range = if j == head {
            self.head_live..=self.head_live
        } else if j < head {
            let before = head - j;
            let Some(hi) = self.head_live.checked_sub(before) else {
                return;
            };
            let lo = match prev {
                Some(p) => p + 1,
                None => self.head_live.saturating_sub(before * step),
            };
            lo..=hi
        } else {
            let p = prev.expect("head precedes later items");
            p + 1..=p + step
        };
        for li in range {
            if li >= self.live.len() {
                break;
            }
            if let Some(p) = prev {
                if li <= p || li - p > step {
                    continue;
                }
            }
            let tok = self.live[li];
            let token = &self.s.tokens[tok];
            for analysis in &token.analyses {
                if !item_matches(&items[j], &token.norm, analysis, self.lexicon.categories()) {
                    continue;
                }
                positions.push(tok);
                analyses.push(analysis.clone());
                self.extend(j + 1, Some(li), positions, analyses, found);
                positions.pop();
                analyses.pop();
            }
        }
    }
}

/// Whether `guest`'s head can fill slot item `slot` of `host`.
pub fn can_fill(
    host: &GroupInstance,
    slot: usize,
    guest: &GroupInstance,
    s: &AnalyzedSentence,
    lexicon: &Lexicon,
) -> bool {
    if guest.head_token() != host.token_at(slot) {
        return false;
    }
    let item: &GroupItem = &lexicon.entry(host.entry).items[slot - 1];
    let token = &s.tokens[guest.head_token()];
    item_matches(item, &token.norm, guest.head_analysis(), lexicon.categories())
}

/// Drops candidates with a slot that no other candidate can fill, until stable.
pub fn prune_dangling(candidates: &[GroupInstance], s: &AnalyzedSentence, lexicon: &Lexicon) -> Vec<GroupInstance> {
    let mut alive = vec![true; candidates.len()];
    loop {
        let mut changed = false;
        for (i, host) in candidates.iter().enumerate() {
            if !alive[i] {
                continue;
            }
            let fillable = host.slots.iter().all(|&slot| {
                candidates
                    .iter()
                    .enumerate()
                    .any(|(g, guest)| g != i && alive[g] && can_fill(host, slot, guest, s, lexicon))
            });
            if !fillable {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    candidates
        .iter()
        .zip(alive)
        .filter(|(_, keep)| *keep)
        .map(|(c, _)| c.clone())
        .collect()
}

#[derive(Clone, Copy, Default)]
struct Occupancy {
    head: Option<usize>,
    slot: Option<(usize, usize)>,
    plain: Option<usize>,
}

struct Search<'a> {
    cands: Vec<GroupInstance>,
    s: &'a AnalyzedSentence,
    lexicon: &'a Lexicon,
    /// Tokens touched by candidates `i..`.
    reachable: Vec<Vec<bool>>,
    tokens: Vec<Occupancy>,
    cover: Vec<u32>,
    covered: usize,
    chosen: Vec<usize>,
    best: Score,
    winners: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn bound(&self, i: usize) -> usize {
        self.covered
            + self.reachable[i]
                .iter()
                .zip(&self.cover)
                .filter(|(r, c)| **r && **c == 0)
                .count()
    }

    fn fits(&self, c: usize) -> bool {
        let cand = &self.cands[c];
        cand.positions.iter().enumerate().all(|(j, &tok)| {
            let occ = self.tokens[tok];
            match cand.role_at(j + 1) {
                Role::Head => {
                    occ.head.is_none()
                        && occ.plain.is_none()
                        && occ
                            .slot
                            .is_none_or(|(host, slot)| can_fill(&self.cands[host], slot, cand, self.s, self.lexicon))
                }
                Role::Slot => {
                    occ.slot.is_none()
                        && occ.plain.is_none()
                        && occ
                            .head
                            .is_none_or(|guest| can_fill(cand, j + 1, &self.cands[guest], self.s, self.lexicon))
                }
                Role::Plain => occ.head.is_none() && occ.slot.is_none() && occ.plain.is_none(),
            }
        })
    }

    fn place(&mut self, c: usize, add: bool) {
        let positions = self.cands[c].positions.clone();
        for (j, tok) in positions.into_iter().enumerate() {
            let role = self.cands[c].role_at(j + 1);
            let occ = &mut self.tokens[tok];
            match (role, add) {
                (Role::Head, true) => occ.head = Some(c),
                (Role::Slot, true) => occ.slot = Some((c, j + 1)),
                (Role::Plain, true) => occ.plain = Some(c),
                (Role::Head, false) => occ.head = None,
                (Role::Slot, false) => occ.slot = None,
                (Role::Plain, false) => occ.plain = None,
            }
            if add {
                self.cover[tok] += 1;
                if self.cover[tok] == 1 {
                    self.covered += 1;
                }
            } else {
                self.cover[tok] -= 1;
                if self.cover[tok] == 0 {
                    self.covered -= 1;
                }
            }
        }
        if add {
            self.chosen.push(c);
        } else {
            self.chosen.pop();
        }
    }

    fn leaf_valid(&self) -> bool {
        let all_filled = self.chosen.iter().all(|&c| {
            let cand = &self.cands[c];
            cand.slots
                .iter()
                .all(|&slot| self.tokens[cand.token_at(slot)].head.is_some())
        });
        all_filled && self.acyclic()
    }

    /// The merge graph (host → guest) must be a forest.
    fn acyclic(&self) -> bool {
        let guest_of = |host: usize, slot: usize| self.tokens[self.cands[host].token_at(slot)].head;
        for &start in &self.chosen {
            // Each host has its slots filled by distinct guests; walk all paths.
            let mut stack = vec![(start, 0usize)];
            while let Some((node, depth)) = stack.pop() {
                if depth > self.chosen.len() {
                    return false;
                }
                for &slot in &self.cands[node].slots {
                    if let Some(g) = guest_of(node, slot) {
                        if g == start {
                            return false;
                        }
                        stack.push((g, depth + 1));
                    }
                }
            }
        }
        true
    }

    fn run(&mut self, i: usize) {
        let bound = self.bound(i);
        if bound < self.best.covered || (bound == self.best.covered && self.chosen.len() > self.best.groups) {
            return;
        }
        if i == self.cands.len() {
            if !self.leaf_valid() {
                return;
            }
            let score = Score {
                covered: self.covered,
                groups: self.chosen.len(),
            };
            match score.cmp(&self.best) {
                Ordering::Greater => {
                    self.best = score;
                    self.winners = vec![self.chosen.clone()];
                }
                Ordering::Equal => self.winners.push(self.chosen.clone()),
                Ordering::Less => {}
            }
            return;
        }
        if self.fits(i) {
            self.place(i, true);
            self.run(i + 1);
            self.place(i, false);
        }
        self.run(i + 1);
    }

    fn assignment(&self, chosen: &[usize]) -> Assignment {
        let mut order: Vec<usize> = chosen.to_vec();
        order.sort_by(|&a, &b| self.cands[a].order_key().cmp(&self.cands[b].order_key()));
        let mut instances: Vec<GroupInstance> = order.iter().map(|&c| self.cands[c].clone()).collect();
        for (host_idx, &c) in order.iter().enumerate() {
            for &slot in &self.cands[c].slots {
                let tok = self.cands[c].token_at(slot);
                let guest = order
                    .iter()
                    .position(|&g| self.cands[g].head_token() == tok)
                    .expect("leaf_valid guarantees a filler");
                instances[host_idx].slot_fills.insert(slot, guest);
            }
        }
        Assignment { instances }
    }
}

/// Every best-scoring consistent assignment, in leftmost-longest order.
///
/// The empty assignment is returned when nothing better exists.
pub fn solve(candidates: &[GroupInstance], s: &AnalyzedSentence, lexicon: &Lexicon) -> Vec<Assignment> {
    let mut cands = prune_dangling(candidates, s, lexicon);
    for c in &mut cands {
        c.slot_fills.clear();
    }
    cands.sort_by(|a, b| a.order_key().cmp(&b.order_key()));

    let n_tokens = s.len();
    let mut reachable = vec![vec![false; n_tokens]; cands.len() + 1];
    for i in (0..cands.len()).rev() {
        let mut row = reachable[i + 1].clone();
        for &p in &cands[i].positions {
            row[p] = true;
        }
        reachable[i] = row;
    }

    let mut search = Search {
        cands,
        s,
        lexicon,
        reachable,
        tokens: vec![Occupancy::default(); n_tokens],
        cover: vec![0; n_tokens],
        covered: 0,
        chosen: Vec::new(),
        best: Score { covered: 0, groups: 0 },
        winners: Vec::new(),
    };
    search.run(0);

    let mut out: Vec<Assignment> = search.winners.iter().map(|w| search.assignment(w)).collect();
    out.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    out
}

/// Checks an assignment against the coverage and merge invariants.
/// Returns one message per violation.
pub fn verify(a: &Assignment, s: &AnalyzedSentence, lexicon: &Lexicon) -> Vec<String> {
    let mut problems = Vec::new();
    let mut roles: Vec<Vec<(usize, Role, usize)>> = vec![Vec::new(); s.len()];

    for (i, inst) in a.instances.iter().enumerate() {
        let Some(entry) = lexicon.entries().get(inst.entry) else {
            problems.push(format!("instance {i}: no entry {}", inst.entry));
            continue;
        };
        if inst.positions.len() != entry.items.len() || inst.analyses.len() != entry.items.len() {
            problems.push(format!("instance {i}: item count mismatch"));
            continue;
        }
        if inst.positions.windows(2).any(|w| w[0] >= w[1]) {
            problems.push(format!("instance {i}: positions not increasing"));
        }
        for (j, (&tok, analysis)) in inst.positions.iter().zip(&inst.analyses).enumerate() {
            let Some(token) = s.tokens.get(tok) else {
                problems.push(format!("instance {i}: token {tok} out of range"));
                continue;
            };
            if token.deleted {
                problems.push(format!("instance {i}: token {tok} is deleted"));
            }
            if !token.analyses.contains(analysis)
                || !item_matches(&entry.items[j], &token.norm, analysis, lexicon.categories())
            {
                problems.push(format!("instance {i}: item {} does not match token {tok}", j + 1));
            }
            roles[tok].push((i, inst.role_at(j + 1), j + 1));
        }
        for &slot in &inst.slots {
            match inst.slot_fills.get(&slot) {
                None => problems.push(format!("instance {i}: slot {slot} is not merged")),
                Some(&g) => match a.instances.get(g) {
                    Some(guest) if g != i && can_fill(inst, slot, guest, s, lexicon) => {}
                    _ => problems.push(format!("instance {i}: slot {slot} has an invalid filler {g}")),
                },
            }
        }
        if inst.slot_fills.keys().any(|k| !inst.slots.contains(k)) {
            problems.push(format!("instance {i}: merge on a non-slot item"));
        }
    }

    for (tok, users) in roles.iter().enumerate() {
        match users[..] {
            [] | [_] => {}
            [(a1, r1, item1), (a2, r2, item2)] => {
                let ok = match (r1, r2) {
                    (Role::Slot, Role::Head) => a.instances[a1].slot_fills.get(&item1) == Some(&a2),
                    (Role::Head, Role::Slot) => a.instances[a2].slot_fills.get(&item2) == Some(&a1),
                    _ => false,
                };
                if !ok {
                    problems.push(format!("token {tok} is shared without a merge"));
                }
            }
            _ => problems.push(format!("token {tok} is covered {} times", users.len())),
        }
    }

    // Merge graph must be acyclic.
    let n = a.instances.len();
    let mut state = vec![0u8; n];
    fn visit(a: &Assignment, v: usize, state: &mut [u8]) -> bool {
        state[v] = 1;
        for &g in a.instances[v].slot_fills.values() {
            if g >= state.len() {
                continue;
            }
            if state[g] == 1 || (state[g] == 0 && !visit(a, g, state)) {
                return false;
            }
        }
        state[v] = 2;
        true
    }
    for v in 0..n {
        if state[v] == 0 && !visit(a, v, &mut state) {
            problems.push("merge links form a cycle".to_owned());
            break;
        }
    }
    problems
}
