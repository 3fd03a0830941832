//! The three-phase attack-string analysis.
//!
//! Per Kleene loop the pipeline tries to assemble x·yⁿ·z:
//!
//! 1. **Prefix** — a breadth-first closure over ordered multistates from the
//!    initial state. A multistate whose ε-closure crosses the loop head
//!    qualifies; the states that outrank or belong to the loop at that moment
//!    become Φx, the set every later step must stay inside.
//! 2. **Pump** — a closure over product states (may-pointer × must-set) from
//!    (loop, Φx) finds a word y₁ to a state with a branch point; from the two
//!    branch successors a closure over triple states finds y₂ bringing both
//!    paths back to the loop. y = y₁·a·y₂ is kept when the resulting must-set
//!    Φ₃ is stable: Φ₃ ⊆ Φx, so pumping can repeat indefinitely.
//! 3. **Suffix** — a breadth-first closure over must-sets from Φ₃ finds the
//!    shortest z after which no accepting state remains.
//!
//! Search order is shortest-realizer-first with ties broken by transition
//! priority, so output is deterministic. Contact with an unsupported
//! construct taints a derivation; a taint-free derivation wins, a tainted one
//! downgrades the verdict to Interrupted.

use std::collections::{HashSet, VecDeque};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::alphabet::Alphabet;
use crate::multistate::{
    beta_advance, materialize, phi_advance, phi_run, product_advance, triple_advance,
    ProductState, StateList, StateSet, StepFlags, TripleState, Word,
};
use crate::nfa::{build, BranchPoint, OrderedNfa, StateId};
use crate::pattern::{
    normalize, parse, LoopId, NormalizeConfig, NormalizeError, ParseError, Span,
    TranslationReport,
};

#[derive(Debug, Clone, Copy)]
pub struct AnalysisConfig {
    /// Abandon a prefix after this many consecutive unstable pump
    /// derivations; `None` never prunes.
    pub prune_limit: Option<usize>,
    /// Wall-clock budget for one pattern.
    pub time_budget: Option<Duration>,
    /// Report every vulnerable configuration per loop instead of the first.
    pub exhaustive: bool,
    /// Node cap per closure; hitting it marks the loop Pruned.
    pub max_search_nodes: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            prune_limit: Some(50),
            time_budget: Some(Duration::from_secs(10)),
            exhaustive: false,
            max_search_nodes: 50_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("analysis timed out")]
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackStatus {
    /// All three phases succeeded on an unsupported-free derivation.
    Vulnerable,
    /// A stable pumpable word exists but no failing suffix does.
    SafePumpable,
    /// No stable pumpable word for this loop.
    NotPumpable,
    /// Every successful derivation touched an unsupported construct.
    Interrupted,
    /// The search was cut short (prune limit or node cap) without a verdict.
    Pruned,
}

impl AttackStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            AttackStatus::Vulnerable => "vulnerable",
            AttackStatus::SafePumpable => "safe-pumpable",
            AttackStatus::NotPumpable => "not-pumpable",
            AttackStatus::Interrupted => "interrupted",
            AttackStatus::Pruned => "pruned",
        }
    }
}

/// Outcome of analysing one Kleene loop.
#[derive(Debug, Clone)]
pub struct AttackConfig {
    pub loop_id: LoopId,
    pub loop_head: StateId,
    pub loop_span: Span,
    pub status: AttackStatus,
    /// x: drives the matcher to the loop.
    pub prefix: Word,
    /// y: the pumpable core, two paths loop→loop.
    pub pump: Word,
    /// z: fails every residual state.
    pub suffix: Word,
    /// Φx of the prefix the attack was built from (for the stable-set checks).
    pub phi_prefix: StateSet,
}

impl AttackConfig {
    fn non_attack(loop_id: LoopId, loop_head: StateId, loop_span: Span, status: AttackStatus) -> Self {
        AttackConfig {
            loop_id,
            loop_head,
            loop_span,
            status,
            prefix: Word::empty(),
            pump: Word::empty(),
            suffix: Word::empty(),
            phi_prefix: StateSet::default(),
        }
    }
}

/// Φ₃ ⊆ Φx: the must-set after one pump stays inside the pre-pump set.
pub fn check_stability(phi3: &StateSet, phi_x: &StateSet) -> bool {
    phi3.is_subset(phi_x)
}

/// One qualifying prefix: realizer, multistate, and the truncated state set.
#[derive(Debug, Clone)]
pub struct PrefixResult {
    pub word: Word,
    pub beta: StateList,
    /// Φx: states that outrank or belong to the loop at the crossing.
    pub phi: StateSet,
    /// The accept state sits at or above the loop for this prefix.
    pub accepting_above: bool,
    /// An unsupported construct sits at or above the loop.
    pub tainted: bool,
}

struct Limits {
    deadline: Option<Instant>,
    cap: usize,
    hit_cap: bool,
    timed_out: bool,
}

impl Limits {
    fn new(cfg: &AnalysisConfig) -> Self {
        Limits {
            deadline: cfg.time_budget.map(|b| Instant::now() + b),
            cap: cfg.max_search_nodes,
            hit_cap: false,
            timed_out: false,
        }
    }

    /// False when the search must stop.
    fn admit(&mut self, visited: usize) -> bool {
        if visited >= self.cap {
            self.hit_cap = true;
            return false;
        }
        if let Some(d) = self.deadline {
            if Instant::now() >= d {
                self.timed_out = true;
                return false;
            }
        }
        true
    }
}

/// Breadth-first closure over (word, ordered multistate) pairs from the
/// initial state, yielding every multistate whose ε-closure crosses the loop.
pub struct PrefixSearch<'a> {
    nfa: &'a OrderedNfa,
    loop_head: StateId,
    /// (realizer, multistate, some ancestor multistate touched an
    /// unsupported construct). Taint is sticky along the path: an engine's
    /// behavior at the unsupported state could have preempted everything
    /// that follows.
    queue: VecDeque<(Word, StateList, bool)>,
    visited: HashSet<StateList>,
    limits: Limits,
    /// Some explored multistate touched an unsupported construct; when no
    /// multistate qualifies at all, the loop may only be reachable through it.
    saw_unsupported: bool,
}

impl<'a> PrefixSearch<'a> {
    pub fn new(nfa: &'a OrderedNfa, loop_head: StateId, cfg: &AnalysisConfig) -> Self {
        let seed = StateList::single(nfa.initial());
        let mut visited = HashSet::new();
        visited.insert(seed.clone());
        let mut queue = VecDeque::new();
        queue.push_back((Word::empty(), seed, false));
        PrefixSearch {
            nfa,
            loop_head,
            queue,
            visited,
            limits: Limits::new(cfg),
            saw_unsupported: false,
        }
    }

    fn saw_unsupported(&self) -> bool {
        self.saw_unsupported
    }

    fn hit_limit(&self) -> bool {
        self.limits.hit_cap
    }

    fn timed_out(&self) -> bool {
        self.limits.timed_out
    }
}

impl Iterator for PrefixSearch<'_> {
    type Item = PrefixResult;

    fn next(&mut self) -> Option<PrefixResult> {
        while let Some((word, beta, path_tainted)) = self.queue.pop_front() {
            if !self.limits.admit(self.visited.len()) {
                return None;
            }
            let ev = self.nfa.evolve(beta.states());
            self.saw_unsupported |= ev.unsupported;
            let qualifies = ev
                .crossings
                .iter()
                .find(|c| c.head == self.loop_head)
                .map(|c| {
                    let snapshot: StateSet = ev.order[..c.snapshot_len].iter().copied().collect();
                    PrefixResult {
                        word: word.clone(),
                        beta: beta.clone(),
                        accepting_above: snapshot.contains_accept(self.nfa),
                        tainted: path_tainted || snapshot.contains_unsupported(self.nfa),
                        phi: snapshot,
                    }
                });
            let child_taint = path_tainted || ev.unsupported;
            for (sub, next) in beta_advance(self.nfa, self.nfa.alphabet().full(), &beta) {
                if next.is_empty() || self.visited.contains(&next) {
                    continue;
                }
                self.visited.insert(next.clone());
                self.queue.push_back((word.extended(sub), next, child_taint));
            }
            if let Some(result) = qualifies {
                return Some(result);
            }
        }
        None
    }
}

/// A pump opportunity: a realizer y₁ to a branching state, the branch point,
/// one uniform symbol sub-range, and the must-set after taking it.
#[derive(Debug, Clone)]
pub struct PumpCandidate {
    pub y1: Word,
    pub branch: BranchPoint,
    pub branch_range: crate::alphabet::SymbolRange,
    pub phi_after: StateSet,
    pub flags: StepFlags,
}

/// Product-state closure from (loop, Φx) yielding branch-point candidates.
pub struct BranchSearch<'a> {
    nfa: &'a OrderedNfa,
    queue: VecDeque<(Word, ProductState, StepFlags)>,
    visited: HashSet<ProductState>,
    pending: VecDeque<PumpCandidate>,
    limits: Limits,
}

impl<'a> BranchSearch<'a> {
    pub fn new(nfa: &'a OrderedNfa, loop_head: StateId, phi_x: &StateSet, cfg: &AnalysisConfig) -> Self {
        let seed = ProductState { may: loop_head, must: phi_x.clone() };
        let mut visited = HashSet::new();
        visited.insert(seed.clone());
        let mut queue = VecDeque::new();
        queue.push_back((Word::empty(), seed, StepFlags::default()));
        BranchSearch { nfa, queue, visited, pending: VecDeque::new(), limits: Limits::new(cfg) }
    }

    fn hit_limit(&self) -> bool {
        self.limits.hit_cap
    }

    fn timed_out(&self) -> bool {
        self.limits.timed_out
    }
}

impl Iterator for BranchSearch<'_> {
    type Item = PumpCandidate;

    fn next(&mut self) -> Option<PumpCandidate> {
        loop {
            if let Some(c) = self.pending.pop_front() {
                return Some(c);
            }
            let (word, state, flags) = self.queue.pop_front()?;
            if !self.limits.admit(self.visited.len()) {
                return None;
            }
            for bp in self.nfa.branch_points_at(state.may) {
                for (sub, phi_after, f) in phi_advance(self.nfa, bp.range, &state.must) {
                    self.pending.push_back(PumpCandidate {
                        y1: word.clone(),
                        branch: bp,
                        branch_range: sub,
                        phi_after,
                        flags: flags.merge(f),
                    });
                }
            }
            for (sub, next, f) in product_advance(self.nfa, self.nfa.alphabet().full(), &state) {
                if self.visited.contains(&next) {
                    continue;
                }
                self.visited.insert(next.clone());
                self.queue.push_back((word.extended(sub), next, flags.merge(f)));
            }
        }
    }
}

/// A completed pump: y with both branch paths back at the loop, and Φ₃.
#[derive(Debug, Clone)]
pub struct PumpResult {
    pub y2: Word,
    pub phi3: StateSet,
    pub flags: StepFlags,
}

/// Triple-state closure from the two branch successors, yielding every state
/// where both may-paths have returned to the loop head.
pub struct RejoinSearch<'a> {
    nfa: &'a OrderedNfa,
    loop_head: StateId,
    queue: VecDeque<(Word, TripleState, StepFlags)>,
    visited: HashSet<TripleState>,
    limits: Limits,
}

impl<'a> RejoinSearch<'a> {
    pub fn new(
        nfa: &'a OrderedNfa,
        loop_head: StateId,
        candidate: &PumpCandidate,
        cfg: &AnalysisConfig,
    ) -> Self {
        let seed = TripleState {
            may_left: candidate.branch.pair.0,
            may_right: candidate.branch.pair.1,
            must: candidate.phi_after.clone(),
        };
        let mut visited = HashSet::new();
        visited.insert(seed.clone());
        let mut queue = VecDeque::new();
        queue.push_back((Word::empty(), seed, candidate.flags));
        RejoinSearch { nfa, loop_head, queue, visited, limits: Limits::new(cfg) }
    }

    fn at_loop(&self, p: StateId) -> bool {
        p == self.loop_head
            || self.nfa.evolve(&[p]).crossings.iter().any(|c| c.head == self.loop_head)
    }

    fn hit_limit(&self) -> bool {
        self.limits.hit_cap
    }

    fn timed_out(&self) -> bool {
        self.limits.timed_out
    }
}

impl Iterator for RejoinSearch<'_> {
    type Item = PumpResult;

    fn next(&mut self) -> Option<PumpResult> {
        while let Some((word, state, flags)) = self.queue.pop_front() {
            if !self.limits.admit(self.visited.len()) {
                return None;
            }
            let done = self.at_loop(state.may_left) && self.at_loop(state.may_right);
            for (sub, next, f) in triple_advance(self.nfa, self.nfa.alphabet().full(), &state) {
                if self.visited.contains(&next) {
                    continue;
                }
                self.visited.insert(next.clone());
                self.queue.push_back((word.extended(sub), next, flags.merge(f)));
            }
            if done {
                return Some(PumpResult { y2: word, phi3: state.must, flags });
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SuffixOutcome {
    Suffix { z: Word, phi_final: StateSet, tainted: bool },
    /// Every reachable set keeps an accepting state alive.
    NoSuffix,
    /// Search cut short by a limit before any conclusion.
    Inconclusive,
}

/// Breadth-first closure over must-sets from Φ₃ for the shortest z whose
/// target contains no accepting state. With `bar_mid_accept` (unanchored-end
/// patterns) paths may not pass through an accepting set either, because a
/// sub-match engine would stop right there.
pub fn suffix_search(
    nfa: &OrderedNfa,
    phi3: &StateSet,
    bar_mid_accept: bool,
    cfg: &AnalysisConfig,
) -> SuffixOutcome {
    let mut limits = Limits::new(cfg);
    let mut visited: HashSet<StateSet> = HashSet::new();
    let mut queue: VecDeque<(Word, StateSet, bool)> = VecDeque::new();
    visited.insert(phi3.clone());
    queue.push_back((Word::empty(), phi3.clone(), phi3.contains_unsupported(nfa)));
    while let Some((word, phi, tainted)) = queue.pop_front() {
        if !limits.admit(visited.len()) {
            return SuffixOutcome::Inconclusive;
        }
        if !phi.contains_accept(nfa) {
            return SuffixOutcome::Suffix { z: word, phi_final: phi, tainted };
        }
        for (sub, next, flags) in phi_advance(nfa, nfa.alphabet().full(), &phi) {
            if bar_mid_accept && flags.accepting {
                continue;
            }
            if visited.contains(&next) {
                continue;
            }
            visited.insert(next.clone());
            queue.push_back((word.extended(sub), next, tainted || flags.unsupported));
        }
    }
    SuffixOutcome::NoSuffix
}

/// Replace z with one that also fails the exact-match automaton, so the
/// backtracking oracle rejects x·yᵏ·z outright instead of accepting after the
/// blow-up. The analysis z only fails the states at or above the loop; lower
/// priority alternatives may still match. Falls back to the analysis z when
/// the exact automaton accepts everything or the candidate does not hold up
/// across repeated pumping.
fn refine_suffix(
    nfa: &OrderedNfa,
    exact: &OrderedNfa,
    x: &Word,
    y: &Word,
    z0: &Word,
    phi3: &StateSet,
    bar_mid_accept: bool,
    cfg: &AnalysisConfig,
) -> Word {
    let (seed, _) = materialize(exact, &[exact.initial()]);
    let (after_xy, _) = phi_run(exact, &format!("{}{}", x.rep_string(), y.rep_string()), &seed);
    let SuffixOutcome::Suffix { z, .. } = suffix_search(exact, &after_xy, false, cfg) else {
        return z0.clone();
    };
    // The replacement must still fail the truncated lineage of the analysis
    // automaton, with the mid-acceptance rule intact, and must keep failing
    // the exact automaton as the pump count grows.
    let (phif, flags) = phi_run(nfa, &z.rep_string(), phi3);
    if phif.contains_accept(nfa) || (bar_mid_accept && flags.accepting) {
        return z0.clone();
    }
    let x_rep = x.rep_string();
    let y_rep = y.rep_string();
    let z_rep = z.rep_string();
    for n in 1..=5usize {
        let input = format!("{x_rep}{}{z_rep}", y_rep.repeat(n));
        let (end, _) = phi_run(exact, &input, &seed);
        if end.contains_accept(exact) {
            return z0.clone();
        }
    }
    z
}

/// Run the three phases for every pattern loop, first vulnerable
/// configuration per loop (every one under `exhaustive`).
///
/// `exact` is the anchors-forced build of the same pattern; when given, each
/// vulnerable suffix is refined against it so oracle verification can reject.
pub fn analyse(
    nfa: &OrderedNfa,
    exact: Option<&OrderedNfa>,
    cfg: &AnalysisConfig,
) -> Result<Vec<AttackConfig>, AnalysisError> {
    let bar_mid_accept = nfa.loops().iter().any(|l| l.synthetic && !l.lazy);
    let mut out = Vec::new();
    for info in nfa.pattern_loops() {
        let configs = analyse_loop(nfa, exact, info.id, info.head, info.span, bar_mid_accept, cfg)?;
        out.extend(configs);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn analyse_loop(
    nfa: &OrderedNfa,
    exact: Option<&OrderedNfa>,
    loop_id: LoopId,
    loop_head: StateId,
    loop_span: Span,
    bar_mid_accept: bool,
    cfg: &AnalysisConfig,
) -> Result<Vec<AttackConfig>, AnalysisError> {
    let mut found = Vec::new();
    let mut pumpable = false;
    let mut tainted_success = false;
    let mut cut_short = false;
    let mut qualifying = 0usize;
    let mut prefix_search = PrefixSearch::new(nfa, loop_head, cfg);
    'prefixes: while let Some(prefix) = prefix_search.next() {
        qualifying += 1;
        let mut consecutive_unstable = 0usize;
        let mut branch_search = BranchSearch::new(nfa, loop_head, &prefix.phi, cfg);
        while let Some(candidate) = branch_search.next() {
            let mut rejoin = RejoinSearch::new(nfa, loop_head, &candidate, cfg);
            while let Some(pump) = rejoin.next() {
                // Two distinct loop-to-loop paths exist: the loop is pumpable
                // whether or not this particular derivation is stable.
                pumpable = true;
                if !check_stability(&pump.phi3, &prefix.phi) {
                    consecutive_unstable += 1;
                    if cfg.prune_limit.is_some_and(|l| consecutive_unstable >= l) {
                        cut_short = true;
                        continue 'prefixes;
                    }
                    continue;
                }
                consecutive_unstable = 0;
                let y = candidate
                    .y1
                    .extended(candidate.branch_range)
                    .concat(&pump.y2);
                match suffix_search(nfa, &pump.phi3, bar_mid_accept, cfg) {
                    SuffixOutcome::NoSuffix => continue,
                    SuffixOutcome::Inconclusive => {
                        cut_short = true;
                        continue;
                    }
                    SuffixOutcome::Suffix { z, tainted: suffix_tainted, .. } => {
                        let tainted = prefix.tainted
                            || candidate.flags.unsupported
                            || pump.flags.unsupported
                            || suffix_tainted;
                        if tainted {
                            tainted_success = true;
                            continue;
                        }
                        let z = match exact {
                            Some(exact) => refine_suffix(
                                nfa,
                                exact,
                                &prefix.word,
                                &y,
                                &z,
                                &pump.phi3,
                                bar_mid_accept,
                                cfg,
                            ),
                            None => z,
                        };
                        found.push(AttackConfig {
                            loop_id,
                            loop_head,
                            loop_span,
                            status: AttackStatus::Vulnerable,
                            prefix: prefix.word.clone(),
                            pump: y.clone(),
                            suffix: z,
                            phi_prefix: prefix.phi.clone(),
                        });
                        if !cfg.exhaustive {
                            return Ok(found);
                        }
                    }
                }
            }
            cut_short |= rejoin.hit_limit();
            if rejoin.timed_out() {
                return Err(AnalysisError::Timeout);
            }
        }
        cut_short |= branch_search.hit_limit();
        if branch_search.timed_out() {
            return Err(AnalysisError::Timeout);
        }
    }
    cut_short |= prefix_search.hit_limit();
    if prefix_search.timed_out() {
        return Err(AnalysisError::Timeout);
    }
    if !found.is_empty() {
        return Ok(found);
    }
    let status = if tainted_success || (qualifying == 0 && prefix_search.saw_unsupported()) {
        AttackStatus::Interrupted
    } else if cut_short {
        AttackStatus::Pruned
    } else if pumpable {
        AttackStatus::SafePumpable
    } else {
        AttackStatus::NotPumpable
    };
    Ok(vec![AttackConfig::non_attack(loop_id, loop_head, loop_span, status)])
}

#[derive(Debug, Clone, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PipelineConfig {
    pub alphabet: Alphabet,
    pub analysis: AnalysisConfig,
}

/// Everything produced for one pattern: the translation report, both
/// automaton builds and the per-loop attack configurations.
pub struct PatternAnalysis {
    pub report: TranslationReport,
    /// Sub-match build the verdicts were computed on.
    pub nfa: OrderedNfa,
    /// Anchors-forced build used for oracle verification.
    pub exact_nfa: OrderedNfa,
    pub configs: Vec<AttackConfig>,
}

impl PatternAnalysis {
    /// The vulnerable configuration with the shortest pump word (ties:
    /// shortest prefix+suffix, then loop order).
    pub fn vulnerable(&self) -> Option<&AttackConfig> {
        self.configs
            .iter()
            .filter(|c| c.status == AttackStatus::Vulnerable)
            .min_by_key(|c| (c.pump.len(), c.prefix.len() + c.suffix.len(), c.loop_id))
    }

    pub fn has_status(&self, status: AttackStatus) -> bool {
        self.configs.iter().any(|c| c.status == status)
    }
}

/// Parse → normalize → build → analyse, with the exact-match twin built for
/// suffix refinement and later verification.
pub fn analyse_pattern(pattern: &str, cfg: &PipelineConfig) -> Result<PatternAnalysis, PipelineError> {
    let ast = parse(pattern, &cfg.alphabet)?;
    let norm = NormalizeConfig { alphabet: cfg.alphabet, ..Default::default() };
    let (core, report) = normalize(&ast, &norm)?;
    let nfa = build(&core, &cfg.alphabet);
    let exact_cfg = NormalizeConfig { alphabet: cfg.alphabet, force_anchored: true, ..Default::default() };
    let (exact_core, _) = normalize(&ast, &exact_cfg)?;
    let exact_nfa = build(&exact_core, &cfg.alphabet);
    let configs = analyse(&nfa, Some(&exact_nfa), &cfg.analysis)?;
    Ok(PatternAnalysis { report, nfa, exact_nfa, configs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfa::LoopInfo;

    fn pipeline(pattern: &str) -> PatternAnalysis {
        analyse_pattern(pattern, &PipelineConfig::default()).unwrap()
    }

    /// Loop head of the (single) pumpable alternation loop in the pattern,
    /// identified by having branch points reachable from it.
    fn loop_info<'n>(nfa: &'n OrderedNfa, id: u32) -> &'n LoopInfo {
        nfa.pattern_loops().find(|l| l.id.0 == id).unwrap()
    }

    fn has_full_range_state(nfa: &OrderedNfa, phi: &StateSet) -> bool {
        // A match-any consumer: the signature of a Σ*/.* state in a set.
        phi.states().iter().any(|&s| {
            nfa.transitions(s)
                .iter()
                .any(|&(r, _)| r.lo == 0 && r.hi >= 0x7E)
        })
    }

    #[test]
    fn prefix_search_distinguishes_c_and_d_prefixes() {
        // c.*|(c|d)(a|b|ab)*e: the c-prefix keeps the dot alternative alive,
        // the d-prefix kills it.
        let res = pipeline("c.*|(c|d)(a|b|ab)*e");
        let nfa = &res.nfa;
        let target = loop_info(nfa, 1);
        let cfg = AnalysisConfig::default();
        let prefixes: Vec<PrefixResult> =
            PrefixSearch::new(nfa, target.head, &cfg).take(10).collect();
        let c = prefixes.iter().find(|p| p.word.rep_string() == "c").unwrap();
        let d = prefixes.iter().find(|p| p.word.rep_string() == "d").unwrap();
        assert!(has_full_range_state(nfa, &c.phi));
        assert!(!has_full_range_state(nfa, &d.phi));
    }

    #[test]
    fn prefix_phi_omits_lower_priority_match_all() {
        // (a|b|ab)*c|.*: for x = ε the dot alternative is below the loop in
        // priority and stays out of Φx.
        let res = pipeline("(a|b|ab)*c|.*");
        let nfa = &res.nfa;
        let target = loop_info(nfa, 0);
        let cfg = AnalysisConfig::default();
        let first = PrefixSearch::new(nfa, target.head, &cfg).next().unwrap();
        assert!(first.word.is_empty());
        assert!(!has_full_range_state(nfa, &first.phi));
        assert!(!first.accepting_above);
    }

    #[test]
    fn prefix_unrolling_yields_three_distinct_phi() {
        // Unrolling c* zero to two times gives three different Φx values.
        let res = pipeline("(c|a|b)(a|b).*|c*(a|b|ab)*d");
        let nfa = &res.nfa;
        let target = loop_info(nfa, 2);
        let cfg = AnalysisConfig::default();
        let prefixes: Vec<PrefixResult> =
            PrefixSearch::new(nfa, target.head, &cfg).take(20).collect();
        let mut phis = Vec::new();
        for want in ["", "c", "cc"] {
            let p = prefixes.iter().find(|p| p.word.rep_string() == want).unwrap();
            phis.push(p.phi.clone());
        }
        assert_ne!(phis[0], phis[1]);
        assert_ne!(phis[1], phis[2]);
        assert_ne!(phis[0], phis[2]);
    }

    #[test]
    fn branch_search_finds_adjacent_branch_with_empty_realizer() {
        let res = pipeline("(a|b|ab)*c");
        let nfa = &res.nfa;
        let target = loop_info(nfa, 0);
        let cfg = AnalysisConfig::default();
        let first = PrefixSearch::new(nfa, target.head, &cfg).next().unwrap();
        let cand = BranchSearch::new(nfa, target.head, &first.phi, &cfg).next().unwrap();
        assert!(cand.y1.is_empty());
        assert_eq!(cand.branch_range.lo, 'a' as u32);
    }

    #[test]
    fn branch_search_is_empty_for_deterministic_pattern() {
        let res = pipeline("(ab)*c");
        let nfa = &res.nfa;
        let target = loop_info(nfa, 0);
        let cfg = AnalysisConfig::default();
        let first = PrefixSearch::new(nfa, target.head, &cfg).next().unwrap();
        assert_eq!(BranchSearch::new(nfa, target.head, &first.phi, &cfg).count(), 0);
    }

    #[test]
    fn branch_search_unrolls_inner_loop() {
        // a.*|(c*a(b|b))*d: a y1 through the inner c* enables y = cab.
        let res = pipeline("a.*|(c*a(b|b))*d");
        let nfa = &res.nfa;
        let target = loop_info(nfa, 2);
        let cfg = AnalysisConfig::default();
        let first = PrefixSearch::new(nfa, target.head, &cfg).next().unwrap();
        let found = BranchSearch::new(nfa, target.head, &first.phi, &cfg)
            .take(20)
            .any(|c| c.y1.rep_string() == "ca");
        assert!(found);
    }

    #[test]
    fn rejoin_closes_both_paths_with_single_symbol() {
        // (a|b|ab)*c, branch on a between the a and ab alternatives: y2 = b.
        let res = pipeline("(a|b|ab)*c");
        let nfa = &res.nfa;
        let target = loop_info(nfa, 0);
        let cfg = AnalysisConfig::default();
        let prefix = PrefixSearch::new(nfa, target.head, &cfg).next().unwrap();
        let cand = BranchSearch::new(nfa, target.head, &prefix.phi, &cfg).next().unwrap();
        let pumps: Vec<PumpResult> =
            RejoinSearch::new(nfa, target.head, &cand, &cfg).take(5).collect();
        let best = pumps.iter().find(|p| check_stability(&p.phi3, &prefix.phi)).unwrap();
        assert_eq!(best.y2.rep_string(), "b");
        let y = cand.y1.extended(cand.branch_range).concat(&best.y2);
        assert_eq!(y.rep_string(), "ab");
    }

    #[test]
    fn stability_filters_pump_candidates() {
        // (a|a|b|b)*(a.*|c): y = a reaches the match-all continuation, only
        // y = b survives the stability check.
        let res = pipeline("(a|a|b|b)*(a.*|c)");
        let c = res.vulnerable().unwrap();
        assert_eq!(c.pump.rep_string(), "b");
        assert_eq!(c.prefix.rep_string(), "");
    }

    #[test]
    fn pump_may_need_prefix_loop_inside_y() {
        let res = pipeline("d.*|((c|d)(a|a))*b");
        let c = res.vulnerable().unwrap();
        assert_eq!(c.pump.rep_string(), "ca");
    }

    #[test]
    fn check_stability_basics() {
        let empty = StateSet::default();
        let some: StateSet = [StateId(1), StateId(2)].into_iter().collect();
        assert!(check_stability(&empty, &some));
        assert!(check_stability(&some, &some));
        assert!(!check_stability(&some, &empty));
    }

    #[test]
    fn suffix_empty_when_no_accepting_state_left() {
        let res = pipeline("(a|b|ab)*c|.*");
        let c = res.vulnerable().unwrap();
        // Analysis-level z is ε (nothing at or above the loop accepts);
        // refinement upgrades it so the exact oracle rejects too: the only
        // symbol the dot alternative misses is the newline.
        assert_eq!(c.suffix.rep_string(), "\n");
        assert_eq!(c.prefix.rep_string(), "");
        assert_eq!(c.pump.rep_string(), "ab");
    }

    #[test]
    fn suffix_from_accepting_set_needs_one_symbol() {
        // From {accept} itself ε cannot fail, one symbol always does.
        let res = pipeline("^(ab)*$");
        let nfa = &res.nfa;
        let phi: StateSet = [nfa.accept()].into_iter().collect();
        match suffix_search(nfa, &phi, false, &AnalysisConfig::default()) {
            SuffixOutcome::Suffix { z, .. } => assert_eq!(z.len(), 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn suffix_avoids_trailing_a_for_bc_pump() {
        // ^(a|b|c|ab|bc)*a.*$ pumped with bc: a valid z exists and any z the
        // pipeline emits must not end in an a.
        let res = pipeline("^(a|b|c|ab|bc)*a.*$");
        let c = res.vulnerable().unwrap();
        assert_eq!(c.pump.rep_string(), "bc");
        assert!(!c.suffix.rep_string().ends_with('a'));
    }

    #[test]
    fn analyse_finds_paper_configuration() {
        let res = pipeline("(c|a|b)(a|b).*|c*(a|b|ab)*d");
        let c = res.vulnerable().unwrap();
        assert_eq!(c.prefix.rep_string(), "cc");
        assert_eq!(c.pump.rep_string(), "ab");
        assert_eq!(c.suffix.rep_string(), "");
    }

    #[test]
    fn analyse_respects_alternation_order() {
        assert!(pipeline("(a|b|ab)*c|.*").vulnerable().is_some());
        assert!(pipeline(".*|(a|b|ab)*c").vulnerable().is_none());
    }

    #[test]
    fn unavoidable_backreference_interrupts() {
        // The loop sits behind the backreference: unreachable in the modeled
        // automaton, so no verdict can be trusted.
        let res = pipeline(r"\1(a|b|ab)*c");
        assert!(res.vulnerable().is_none());
        assert!(res.has_status(AttackStatus::Interrupted));
    }

    #[test]
    fn avoidable_backreference_still_vulnerable() {
        // The attack path never exercises the backreference in either
        // pattern: behind the alternation, or behind the never-matched c.
        for pat in [r"(a|b|ab)*c|x\1y", r"(a|b|ab)*c\1"] {
            let res = pipeline(pat);
            let c = res.vulnerable().unwrap();
            assert_eq!(c.pump.rep_string(), "ab", "pattern {pat:?}");
        }
    }

    #[test]
    fn tainted_pump_interrupts_rather_than_reports() {
        // The lookaround sits above the loop in priority: Φx contains it, so
        // any would-be attack is downgraded.
        let res = pipeline(r"(?=x)y|(a|b|ab)*c");
        assert!(res.vulnerable().is_none());
        assert!(res.has_status(AttackStatus::Interrupted));
    }

    #[test]
    fn prune_limit_one_marks_pruned() {
        let cfg = PipelineConfig {
            analysis: AnalysisConfig { prune_limit: Some(1), ..Default::default() },
            ..Default::default()
        };
        // First pump candidate for the pumpable loop is unstable, so the
        // prefix is abandoned immediately.
        let res = analyse_pattern("(a|a|b|b)*(a.*|c)", &cfg).unwrap();
        // With an infinite limit the same pattern is vulnerable; the tight
        // limit may or may not cut the winning branch depending on order.
        let unlimited = analyse_pattern("(a|a|b|b)*(a.*|c)", &PipelineConfig::default()).unwrap();
        assert!(unlimited.vulnerable().is_some());
        assert!(res.vulnerable().is_some() || res.has_status(AttackStatus::Pruned));
    }

    #[test]
    fn timeout_is_reported() {
        let cfg = PipelineConfig {
            analysis: AnalysisConfig {
                time_budget: Some(Duration::from_nanos(1)),
                ..Default::default()
            },
            ..Default::default()
        };
        match analyse_pattern("(a|b|ab)*c|.*", &cfg) {
            Err(PipelineError::Analysis(AnalysisError::Timeout)) => {}
            other => panic!("expected timeout, got {:?}", other.is_ok()),
        }
    }

    #[test]
    fn empty_pattern_has_no_loops() {
        let res = pipeline("");
        assert!(res.configs.is_empty());
        assert!(res.vulnerable().is_none());
    }

    #[test]
    fn exhaustive_search_terminates() {
        // Visited sets are finite; an exhaustive run over a busy pattern
        // exhausts cleanly and keeps every vulnerable configuration.
        let cfg = PipelineConfig {
            analysis: AnalysisConfig { exhaustive: true, ..Default::default() },
            ..Default::default()
        };
        let res = analyse_pattern("(a|b|ab)*c|.*", &cfg).unwrap();
        assert!(res.configs.iter().filter(|c| c.status == AttackStatus::Vulnerable).count() >= 1);
    }

    #[test]
    fn never_stable_pump_prunes_under_default_limit() {
        // Every pump word ends in a symbol that drags a mid-word state into
        // the must-set, so stability keeps failing; the prune limit cuts the
        // search and says so instead of inventing a verdict.
        let res = pipeline("(a|b|c|ab|bc|ca)*(ab|ba)*c");
        assert!(res.vulnerable().is_none());
        assert!(res.has_status(AttackStatus::Pruned));
    }
}
