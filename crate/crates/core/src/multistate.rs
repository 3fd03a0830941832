//! Multistates and their transition relations.
//!
//! Two views of "where the matcher can be" drive the analysis:
//!
//! * [`StateList`] — an ordered, leftmost-duplicate-reduced sequence. Order is
//!   backtracking priority; equality is positional. Used by the prefix search.
//! * [`StateSet`] — an order-free set in canonical form: the prioritized
//!   ε-closure restricted to material states. Used as the power-DFA state for
//!   the must analyses. For a fixed concrete symbol its advance is a function.
//!
//! [`ProductState`] runs one may-pointer against a must-set, [`TripleState`]
//! two may-pointers; both step on the same symbol. All advances split their
//! input range into maximal sub-ranges with uniform successor structure.

use std::collections::BTreeSet;

use crate::alphabet::{next_symbol, refine, SymbolRange};
use crate::nfa::{OrderedNfa, StateId};

/// A realizer: a word of symbol ranges witnessing reachability.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<SymbolRange>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn push(&mut self, r: SymbolRange) {
        self.0.push(r);
    }

    pub fn extended(&self, r: SymbolRange) -> Self {
        let mut w = self.clone();
        w.push(r);
        w
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut w = self.clone();
        w.0.extend_from_slice(&other.0);
        w
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ranges(&self) -> &[SymbolRange] {
        &self.0
    }

    /// Concrete representative: one symbol per range, lowest printable first.
    pub fn rep_string(&self) -> String {
        self.0.iter().map(|r| r.representative_char()).collect()
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word(s.chars().map(SymbolRange::of_char).collect())
    }
}

/// Ordered multistate: a state sequence with only leftmost occurrences kept.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct StateList(Vec<StateId>);

impl StateList {
    pub fn single(p: StateId) -> Self {
        StateList(vec![p])
    }

    pub fn states(&self) -> &[StateId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn elems(&self) -> BTreeSet<StateId> {
        self.0.iter().copied().collect()
    }
}

/// Keep only the leftmost occurrence of each state (maximal reduction).
pub fn reduce_leftmost(seq: impl IntoIterator<Item = StateId>) -> StateList {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in seq {
        if seen.insert(s) {
            out.push(s);
        }
    }
    StateList(out)
}

/// Flags accumulated while materializing a multistate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct StepFlags {
    pub accepting: bool,
    pub unsupported: bool,
}

impl StepFlags {
    pub fn merge(self, other: StepFlags) -> StepFlags {
        StepFlags {
            accepting: self.accepting || other.accepting,
            unsupported: self.unsupported || other.unsupported,
        }
    }
}

/// Power-DFA multistate in canonical form (ε-closed, material states only).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(BTreeSet<StateId>);

impl StateSet {
    pub fn states(&self) -> &BTreeSet<StateId> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: StateId) -> bool {
        self.0.contains(&p)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        StateSet(self.0.union(&other.0).copied().collect())
    }

    pub fn contains_accept(&self, nfa: &OrderedNfa) -> bool {
        self.0.contains(&nfa.accept())
    }

    pub fn contains_unsupported(&self, nfa: &OrderedNfa) -> bool {
        self.0.iter().any(|&s| nfa.is_unsupported(s))
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<T: IntoIterator<Item = StateId>>(iter: T) -> Self {
        StateSet(iter.into_iter().collect())
    }
}

/// Canonicalize arbitrary states into a [`StateSet`] via prioritized ε-closure.
pub fn materialize(nfa: &OrderedNfa, states: &[StateId]) -> (StateSet, StepFlags) {
    let ev = nfa.evolve(states);
    (
        ev.order.iter().copied().collect(),
        StepFlags { accepting: ev.accepting, unsupported: ev.unsupported },
    )
}

/// Twofold product state: one nondeterministic pointer plus the must-set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductState {
    pub may: StateId,
    pub must: StateSet,
}

/// Threefold product state: two pointers advancing on the same symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TripleState {
    pub may_left: StateId,
    pub may_right: StateId,
    pub must: StateSet,
}

fn member_edges<'a>(
    nfa: &'a OrderedNfa,
    states: impl Iterator<Item = StateId> + 'a,
) -> impl Iterator<Item = SymbolRange> + 'a {
    states.flat_map(move |s| nfa.transitions(s).iter().map(|&(r, _)| r))
}

/// Ordered multistate advance: concatenate each member's ordered successor
/// sequence, then reduce to leftmost occurrences. The input range is split so
/// each returned sub-range has a uniform successor structure; sub-ranges with
/// no transitions map to the empty multistate. The sub-ranges partition
/// `input` exactly.
pub fn beta_advance(
    nfa: &OrderedNfa,
    input: SymbolRange,
    beta: &StateList,
) -> Vec<(SymbolRange, StateList)> {
    let parts = refine(input, member_edges(nfa, beta.0.iter().copied()));
    let mut out: Vec<(SymbolRange, StateList)> = Vec::with_capacity(parts.len());
    for part in parts {
        let succ = reduce_leftmost(
            beta.0
                .iter()
                .flat_map(|&s| nfa.transitions(s).iter())
                .filter(|(r, _)| r.contains(part.lo))
                .map(|&(_, t)| t),
        );
        push_merged(&mut out, part, succ);
    }
    out
}

/// Power-DFA advance with range splitting. Results are canonical state sets;
/// the sub-ranges partition `input` exactly (gaps map to the empty set).
pub fn phi_advance(
    nfa: &OrderedNfa,
    input: SymbolRange,
    phi: &StateSet,
) -> Vec<(SymbolRange, StateSet, StepFlags)> {
    let parts = refine(input, member_edges(nfa, phi.0.iter().copied()));
    let mut out: Vec<(SymbolRange, StateSet, StepFlags)> = Vec::with_capacity(parts.len());
    for part in parts {
        let targets: Vec<StateId> = phi
            .0
            .iter()
            .flat_map(|&s| nfa.transitions(s).iter())
            .filter(|(r, _)| r.contains(part.lo))
            .map(|&(_, t)| t)
            .collect();
        let (set, flags) = materialize(nfa, &targets);
        match out.last_mut() {
            Some((r, prev, f)) if *prev == set && *f == flags && next_symbol(r.hi) == Some(part.lo) => {
                r.hi = part.hi;
            }
            _ => out.push((part, set, flags)),
        }
    }
    out
}

/// Advance a set by one concrete symbol (the functional ⇒ step).
pub fn phi_step(nfa: &OrderedNfa, symbol: u32, phi: &StateSet) -> (StateSet, StepFlags) {
    let targets: Vec<StateId> = phi
        .0
        .iter()
        .flat_map(|&s| nfa.transitions(s).iter())
        .filter(|(r, _)| r.contains(symbol))
        .map(|&(_, t)| t)
        .collect();
    materialize(nfa, &targets)
}

/// Advance a set over a concrete string, collecting flags across all steps.
pub fn phi_run(nfa: &OrderedNfa, input: &str, phi: &StateSet) -> (StateSet, StepFlags) {
    let mut cur = phi.clone();
    let mut flags = StepFlags::default();
    for c in input.chars() {
        let (next, f) = phi_step(nfa, c as u32, &cur);
        cur = next;
        flags = flags.merge(f);
    }
    (cur, flags)
}

/// Twofold product advance: the may-component steps nondeterministically (one
/// output per successor), the must-set steps functionally, both on the same
/// sub-range. Sub-ranges where the may-component has no successor are dropped.
pub fn product_advance(
    nfa: &OrderedNfa,
    input: SymbolRange,
    s: &ProductState,
) -> Vec<(SymbolRange, ProductState, StepFlags)> {
    let edges = member_edges(nfa, std::iter::once(s.may)).chain(member_edges(nfa, s.must.0.iter().copied()));
    let parts = refine(input, edges);
    let mut out = Vec::new();
    for part in parts {
        let may_succs: Vec<StateId> = dedup_ordered(
            nfa.transitions(s.may)
                .iter()
                .filter(|(r, _)| r.contains(part.lo))
                .map(|&(_, t)| t),
        );
        if may_succs.is_empty() {
            continue;
        }
        let advanced = phi_advance(nfa, part, &s.must);
        for (sub, must, flags) in advanced {
            for &m in &may_succs {
                out.push((sub, ProductState { may: m, must: must.clone() }, flags));
            }
        }
    }
    out
}

/// Threefold product advance: both may-components step nondeterministically on
/// the same symbol (they may coincide), the must-set steps functionally.
pub fn triple_advance(
    nfa: &OrderedNfa,
    input: SymbolRange,
    s: &TripleState,
) -> Vec<(SymbolRange, TripleState, StepFlags)> {
    let edges = member_edges(nfa, [s.may_left, s.may_right].into_iter())
        .chain(member_edges(nfa, s.must.0.iter().copied()));
    let parts = refine(input, edges);
    let mut out = Vec::new();
    for part in parts {
        let left: Vec<StateId> = dedup_ordered(
            nfa.transitions(s.may_left)
                .iter()
                .filter(|(r, _)| r.contains(part.lo))
                .map(|&(_, t)| t),
        );
        if left.is_empty() {
            continue;
        }
        let right: Vec<StateId> = dedup_ordered(
            nfa.transitions(s.may_right)
                .iter()
                .filter(|(r, _)| r.contains(part.lo))
                .map(|&(_, t)| t),
        );
        if right.is_empty() {
            continue;
        }
        let advanced = phi_advance(nfa, part, &s.must);
        for (sub, must, flags) in advanced {
            for &l in &left {
                for &r in &right {
                    out.push((
                        sub,
                        TripleState { may_left: l, may_right: r, must: must.clone() },
                        flags,
                    ));
                }
            }
        }
    }
    out
}

fn dedup_ordered(iter: impl Iterator<Item = StateId>) -> Vec<StateId> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in iter {
        if seen.insert(s) {
            out.push(s);
        }
    }
    out
}

fn push_merged(out: &mut Vec<(SymbolRange, StateList)>, part: SymbolRange, succ: StateList) {
    match out.last_mut() {
        Some((r, prev)) if *prev == succ && next_symbol(r.hi) == Some(part.lo) => {
            r.hi = part.hi;
        }
        _ => out.push((part, succ)),
    }
}
