//! The ordered NFA.
//!
//! Construction keeps the ε-skeleton of the syntax tree so transition order
//! (and with it, backtracking order) falls out of the structure: alternation
//! children in source order, loop body before loop exit for greedy stars and
//! the reverse for lazy ones. The ε-free ordered view a backtracking matcher
//! actually steps through is exposed by [`OrderedNfa::transitions`], computed
//! as a prioritized depth-first walk of the ε-edges.
//!
//! Each alternation child ends in its own join pad, so two paths that read
//! the same symbol stay distinct states. Nondeterminism is then visible as a
//! state with two distinct successors on one symbol ([`BranchPoint`]), which
//! is what the pumping analysis keys on.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::alphabet::{refine, Alphabet, SymbolRange};
use crate::pattern::{LoopId, PatternAst, PatternKind, Span};

/// Dense index of an NFA state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

impl StateId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Eps(StateId),
    Sym(SymbolRange, StateId),
}

#[derive(Debug, Clone)]
pub struct LoopInfo {
    pub id: LoopId,
    pub head: StateId,
    pub synthetic: bool,
    pub lazy: bool,
    pub span: Span,
}

/// A state with two distinct successors on the same symbol range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchPoint {
    pub node: StateId,
    pub range: SymbolRange,
    /// Unordered pair, stored with the higher-priority successor first.
    pub pair: (StateId, StateId),
}

/// Result of a prioritized ε-closure walk.
#[derive(Debug, Clone, Default)]
pub struct Evolution {
    /// Material states (symbol-bearing, accepting or unsupported) in
    /// first-visit priority order.
    pub order: Vec<StateId>,
    pub accepting: bool,
    pub unsupported: bool,
    /// Loops whose head the walk crossed, in crossing order.
    pub crossings: Vec<LoopCrossing>,
}

#[derive(Debug, Clone, Copy)]
pub struct LoopCrossing {
    pub loop_id: LoopId,
    pub head: StateId,
    /// Length of the `order` prefix visited once the loop's entire ε-subtree
    /// was explored: the states that outrank or belong to this loop.
    pub snapshot_len: usize,
}

pub struct OrderedNfa {
    edges: Vec<Vec<Edge>>,
    initial: StateId,
    accept: StateId,
    alphabet: Alphabet,
    loops: Vec<LoopInfo>,
    loop_at: Vec<Option<LoopId>>,
    unsupported: Vec<bool>,
    material: Vec<bool>,
    /// accept ∈ ε-closure(state)
    acc_reach: Vec<bool>,
    transitions: Vec<OnceLock<Vec<(SymbolRange, StateId)>>>,
}

/// Build the ordered NFA from a normalized (core-form) syntax tree.
pub fn build(ast: &PatternAst, alphabet: &Alphabet) -> OrderedNfa {
    debug_assert!(ast.is_core(), "build requires a normalized pattern");
    let mut b = Builder { edges: Vec::new(), loops: Vec::new(), unsupported: Vec::new() };
    let accept = b.fresh();
    let initial = b.emit(ast, accept);
    let n = b.edges.len();

    let mut loop_at = vec![None; n];
    for l in &b.loops {
        loop_at[l.head.idx()] = Some(l.id);
    }
    let mut unsupported = vec![false; n];
    for &u in &b.unsupported {
        unsupported[u.idx()] = true;
    }
    let mut material = vec![false; n];
    for (i, es) in b.edges.iter().enumerate() {
        material[i] = es.iter().any(|e| matches!(e, Edge::Sym(..)))
            || i == accept.idx()
            || unsupported[i];
    }
    // accept ∈ ε-closure(p): reverse ε reachability from the accept state.
    let mut acc_reach = vec![false; n];
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, es) in b.edges.iter().enumerate() {
        for e in es {
            if let Edge::Eps(t) = e {
                rev[t.idx()].push(i);
            }
        }
    }
    let mut queue = vec![accept.idx()];
    acc_reach[accept.idx()] = true;
    while let Some(s) = queue.pop() {
        for &p in &rev[s] {
            if !acc_reach[p] {
                acc_reach[p] = true;
                queue.push(p);
            }
        }
    }

    OrderedNfa {
        transitions: (0..n).map(|_| OnceLock::new()).collect(),
        edges: b.edges,
        initial,
        accept,
        alphabet: *alphabet,
        loops: b.loops,
        loop_at,
        unsupported,
        material,
        acc_reach,
    }
}

struct Builder {
    edges: Vec<Vec<Edge>>,
    loops: Vec<LoopInfo>,
    unsupported: Vec<StateId>,
}

impl Builder {
    fn fresh(&mut self) -> StateId {
        self.edges.push(Vec::new());
        StateId((self.edges.len() - 1) as u32)
    }

    /// Compile `node` with continuation `k`; returns the entry state.
    fn emit(&mut self, node: &PatternAst, k: StateId) -> StateId {
        match &node.kind {
            // Boundary anchors are position assertions already honored by the
            // normalizer's wrapping decisions; here they are ε.
            PatternKind::Empty | PatternKind::AnchorStart | PatternKind::AnchorEnd => k,
            PatternKind::Symbol(ranges) => {
                let s = self.fresh();
                self.edges[s.idx()] = ranges.iter().map(|&r| Edge::Sym(r, k)).collect();
                s
            }
            PatternKind::Concat(xs) => {
                let mut cont = k;
                for x in xs.iter().rev() {
                    cont = self.emit(x, cont);
                }
                cont
            }
            PatternKind::Alt(xs) => {
                // Per-child join pads keep same-symbol paths distinct.
                let entries: Vec<StateId> = xs
                    .iter()
                    .map(|x| {
                        let pad = self.fresh();
                        self.edges[pad.idx()].push(Edge::Eps(k));
                        self.emit(x, pad)
                    })
                    .collect();
                let a = self.fresh();
                self.edges[a.idx()] = entries.into_iter().map(Edge::Eps).collect();
                a
            }
            PatternKind::Star { child, id, synthetic, lazy } => {
                let head = self.fresh();
                let body = self.emit(child, head);
                self.edges[head.idx()] = if *lazy {
                    vec![Edge::Eps(k), Edge::Eps(body)]
                } else {
                    vec![Edge::Eps(body), Edge::Eps(k)]
                };
                self.loops.push(LoopInfo {
                    id: *id,
                    head,
                    synthetic: *synthetic,
                    lazy: *lazy,
                    span: node.span,
                });
                head
            }
            PatternKind::Unsupported(..) => {
                let u = self.fresh();
                self.unsupported.push(u);
                u
            }
            _ => unreachable!("non-core node after normalization"),
        }
    }
}

impl OrderedNfa {
    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn accept(&self) -> StateId {
        self.accept
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn edges(&self, p: StateId) -> &[Edge] {
        &self.edges[p.idx()]
    }

    pub fn is_unsupported(&self, p: StateId) -> bool {
        self.unsupported[p.idx()]
    }

    pub fn is_material(&self, p: StateId) -> bool {
        self.material[p.idx()]
    }

    /// accept ∈ ε-closure(p): the machine may stop here at end of input.
    pub fn accepts_at_end(&self, p: StateId) -> bool {
        self.acc_reach[p.idx()]
    }

    pub fn loops(&self) -> &[LoopInfo] {
        &self.loops
    }

    /// Loops that came from the pattern text (analysis roots), source order.
    pub fn pattern_loops(&self) -> impl Iterator<Item = &LoopInfo> {
        let mut ls: Vec<&LoopInfo> = self.loops.iter().filter(|l| !l.synthetic).collect();
        ls.sort_by_key(|l| l.id);
        ls.into_iter()
    }

    pub fn loop_head(&self, id: LoopId) -> Option<StateId> {
        self.loops.iter().find(|l| l.id == id).map(|l| l.head)
    }

    pub fn loop_at(&self, p: StateId) -> Option<LoopId> {
        self.loop_at[p.idx()]
    }

    /// The ε-free ordered transition view: every `(range, target)` reachable
    /// from `p` through ε-edges alone, in prioritized depth-first order.
    /// Ranges may overlap across entries; the order is the backtracking order.
    pub fn transitions(&self, p: StateId) -> &[(SymbolRange, StateId)] {
        self.transitions[p.idx()].get_or_init(|| {
            let mut out = Vec::new();
            let mut visited = vec![false; self.edges.len()];
            let mut stack = vec![p];
            // Explicit stack, pushing children in reverse to keep left-first order.
            while let Some(s) = stack.pop() {
                if visited[s.idx()] {
                    continue;
                }
                visited[s.idx()] = true;
                let mut eps_children = Vec::new();
                for e in &self.edges[s.idx()] {
                    match e {
                        Edge::Sym(r, t) => out.push((*r, *t)),
                        Edge::Eps(t) => eps_children.push(*t),
                    }
                }
                for t in eps_children.into_iter().rev() {
                    if !visited[t.idx()] {
                        stack.push(t);
                    }
                }
            }
            out
        })
    }

    /// Ordered successors of `p` on a concrete symbol.
    pub fn successors(&self, p: StateId, symbol: u32) -> impl Iterator<Item = StateId> + '_ {
        self.transitions(p)
            .iter()
            .filter(move |(r, _)| r.contains(symbol))
            .map(|&(_, t)| t)
    }

    /// Prioritized ε-closure of a state list: flags, material states in
    /// priority order, and every loop head crossed together with the prefix
    /// of states that outrank or belong to it.
    pub fn evolve(&self, states: &[StateId]) -> Evolution {
        enum Task {
            Visit(StateId),
            Leave(LoopId),
        }
        let mut ev = Evolution::default();
        let mut visited = vec![false; self.edges.len()];
        let mut stack: Vec<Task> = states.iter().rev().map(|&s| Task::Visit(s)).collect();
        while let Some(task) = stack.pop() {
            match task {
                Task::Leave(loop_id) => {
                    let head = self.loop_head(loop_id).unwrap();
                    ev.crossings.push(LoopCrossing { loop_id, head, snapshot_len: ev.order.len() });
                }
                Task::Visit(s) => {
                    if visited[s.idx()] {
                        continue;
                    }
                    visited[s.idx()] = true;
                    if self.material[s.idx()] {
                        ev.order.push(s);
                        ev.accepting |= s == self.accept;
                        ev.unsupported |= self.unsupported[s.idx()];
                    }
                    if let Some(id) = self.loop_at[s.idx()] {
                        stack.push(Task::Leave(id));
                    }
                    let eps: Vec<StateId> = self.edges[s.idx()]
                        .iter()
                        .filter_map(|e| match e {
                            Edge::Eps(t) => Some(*t),
                            Edge::Sym(..) => None,
                        })
                        .collect();
                    for t in eps.into_iter().rev() {
                        if !visited[t.idx()] {
                            stack.push(Task::Visit(t));
                        }
                    }
                }
            }
        }
        ev
    }

    /// All branch points: for every state and every maximal sub-range with
    /// n ≥ 2 distinct successors, the n·(n−1)/2 unordered pairs.
    pub fn branch_points(&self) -> Vec<BranchPoint> {
        (0..self.edges.len())
            .flat_map(|i| self.branch_points_at(StateId(i as u32)))
            .collect()
    }

    pub fn branch_points_at(&self, p: StateId) -> Vec<BranchPoint> {
        let trans = self.transitions(p);
        if trans.len() < 2 {
            return Vec::new();
        }
        // Split into uniform sub-ranges, then merge adjacent sub-ranges with
        // identical successor lists so each emitted range is maximal.
        let parts = refine(self.alphabet.full(), trans.iter().map(|&(r, _)| r));
        let mut groups: Vec<(SymbolRange, Vec<StateId>)> = Vec::new();
        for part in parts {
            let mut succs: Vec<StateId> = trans
                .iter()
                .filter(|(r, _)| r.contains(part.lo))
                .map(|&(_, t)| t)
                .collect();
            succs.dedup();
            // Keep first occurrence of each distinct successor, in order.
            let mut seen = Vec::new();
            succs.retain(|s| {
                if seen.contains(s) {
                    false
                } else {
                    seen.push(*s);
                    true
                }
            });
            if succs.len() < 2 {
                continue;
            }
            match groups.last_mut() {
                Some((r, prev)) if *prev == succs && crate::alphabet::next_symbol(r.hi) == Some(part.lo) => {
                    r.hi = part.hi;
                }
                _ => groups.push((part, succs)),
            }
        }
        let mut out = Vec::new();
        for (range, succs) in groups {
            for i in 0..succs.len() {
                for j in i + 1..succs.len() {
                    out.push(BranchPoint { node: p, range, pair: (succs[i], succs[j]) });
                }
            }
        }
        out
    }

    /// Plain-text adjacency listing: one line per state,
    /// `id: [eps->j | lo-hi->j]*`, stable ordering.
    pub fn export_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        for (i, es) in self.edges.iter().enumerate() {
            let mut line = format!("{i}:");
            for e in es {
                match e {
                    Edge::Eps(t) => write!(line, " eps->{}", t.0).unwrap(),
                    Edge::Sym(r, t) => write!(line, " {:x}-{:x}->{}", r.lo, r.hi, t.0).unwrap(),
                }
            }
            let mut tags = Vec::new();
            if StateId(i as u32) == self.initial {
                tags.push("initial".to_string());
            }
            if StateId(i as u32) == self.accept {
                tags.push("accept".to_string());
            }
            if let Some(id) = self.loop_at[i] {
                tags.push(format!("loop{}", id.0));
            }
            if self.unsupported[i] {
                tags.push("unsupported".to_string());
            }
            if !tags.is_empty() {
                write!(line, "  # {}", tags.join(" ")).unwrap();
            }
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// Loop-head spans by id, for reporting.
    pub fn loop_spans(&self) -> HashMap<LoopId, Span> {
        self.loops.iter().map(|l| (l.id, l.span)).collect()
    }
}
