//! Executable matcher semantics used to verify analysis output.
//!
//! * [`backtrack_run`] — the stack machine a backtracking matcher is an
//!   instance of: depth-first over (state, input index) pairs, counting one
//!   step per matching or failing transition. The accept check itself is
//!   free; only transitions count.
//! * [`lockstep_run`] — Thompson-style simulation advancing a state set per
//!   symbol; linear time, the acceptance ground truth.
//! * [`fringe`] — the horizontal slice of the backtracking search tree at a
//!   given depth, duplicates kept. Its width lower-bounds machine steps on
//!   rejecting inputs, which is what makes step-count claims checkable.
//! * [`verify_attack`] — runs a claimed attack configuration for a range of
//!   pump counts and confirms exponential step growth plus rejection.

use serde::Serialize;

use crate::analysis::{AttackConfig, AttackStatus};
use crate::nfa::{OrderedNfa, StateId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BacktrackOutcome {
    Accepted { steps: u64 },
    Rejected { steps: u64 },
    /// The step budget ran out: suspected blow-up, not a failure.
    BudgetExceeded { steps: u64 },
}

impl BacktrackOutcome {
    pub fn steps(&self) -> u64 {
        match *self {
            BacktrackOutcome::Accepted { steps }
            | BacktrackOutcome::Rejected { steps }
            | BacktrackOutcome::BudgetExceeded { steps } => steps,
        }
    }
}

/// Depth-first backtracking execution with step accounting.
///
/// The machine state is a stack of (state, index) pairs seeded with the
/// initial state at index 0. A matching transition pops the top pair and
/// pushes every ordered successor at the next index; a failing transition
/// just pops. Empty stack rejects; top pair at end of input with the accept
/// state ε-reachable accepts.
pub fn backtrack_run(nfa: &OrderedNfa, input: &str, budget: u64) -> BacktrackOutcome {
    assert!(budget >= 1, "budget must be at least 1");
    let symbols: Vec<u32> = input.chars().map(|c| c as u32).collect();
    let mut stack: Vec<(StateId, usize)> = vec![(nfa.initial(), 0)];
    let mut steps: u64 = 0;
    while let Some((p, j)) = stack.pop() {
        if j == symbols.len() {
            if nfa.accepts_at_end(p) {
                return BacktrackOutcome::Accepted { steps };
            }
            // Failing transition: end of input, not accepting.
            steps += 1;
        } else {
            let a = symbols[j];
            let succs = nfa.transitions(p);
            let mut pushed = false;
            // Push in reverse so the highest-priority successor pops first.
            for &(r, q) in succs.iter().rev() {
                if r.contains(a) {
                    stack.push((q, j + 1));
                    pushed = true;
                }
            }
            // One step whether the symbol matched (matching transition) or
            // nothing fired (failing transition).
            steps += 1;
            let _ = pushed;
        }
        if steps >= budget {
            return BacktrackOutcome::BudgetExceeded { steps };
        }
    }
    BacktrackOutcome::Rejected { steps }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LockstepOutcome {
    Accepted,
    Rejected,
}

/// Thompson-style lockstep simulation: one state set per input position,
/// duplicates removed by taking sets. Linear in |input| · |states|.
pub fn lockstep_run(nfa: &OrderedNfa, input: &str) -> LockstepOutcome {
    let mut current: Vec<StateId> = vec![nfa.initial()];
    let mut on = vec![false; nfa.state_count()];
    on[nfa.initial().idx()] = true;
    for c in input.chars() {
        let a = c as u32;
        let mut next: Vec<StateId> = Vec::new();
        let mut on_next = vec![false; nfa.state_count()];
        for &p in &current {
            for &(r, q) in nfa.transitions(p) {
                if r.contains(a) && !on_next[q.idx()] {
                    on_next[q.idx()] = true;
                    next.push(q);
                }
            }
        }
        current = next;
        on = on_next;
        if current.is_empty() {
            break;
        }
    }
    let _ = on;
    if current.iter().any(|&p| nfa.accepts_at_end(p)) {
        LockstepOutcome::Accepted
    } else {
        LockstepOutcome::Rejected
    }
}

/// A horizontal slice of the search tree: ordered states, duplicates kept.
pub type Fringe = Vec<StateId>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FringeResult {
    Fringe(Fringe),
    /// Width exceeded the cap at this input depth: exponential growth signal.
    WidthCapExceeded { depth: usize },
}

/// Develop the search-tree fringe over `input`: per symbol each state is
/// replaced by its ordered successor sequence (or by nothing when it has
/// none), concatenating left to right. No duplicate reduction.
pub fn fringe(nfa: &OrderedNfa, start: &[StateId], input: &str, cap: usize) -> FringeResult {
    assert!(cap >= 1, "cap must be at least 1");
    let mut current: Fringe = start.to_vec();
    for (depth, c) in input.chars().enumerate() {
        let a = c as u32;
        let mut next = Vec::with_capacity(current.len());
        for &p in &current {
            for &(r, q) in nfa.transitions(p) {
                if r.contains(a) {
                    next.push(q);
                }
            }
            if next.len() > cap {
                return FringeResult::WidthCapExceeded { depth: depth + 1 };
            }
        }
        current = next;
    }
    FringeResult::Fringe(current)
}

/// One verification run at a fixed pump count.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct VerificationRun {
    pub k: u32,
    pub steps: u64,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Confirmed,
    Refuted { reason: String },
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub runs: Vec<VerificationRun>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn confirmed(&self) -> bool {
        matches!(self.verdict, Verdict::Confirmed)
    }

    /// One JSON object per run: {"k":…, "steps":…, "outcome":…}.
    pub fn to_json_lines(&self) -> String {
        self.runs
            .iter()
            .map(|r| serde_json::to_string(r).expect("serializable"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Check a Vulnerable configuration against the machine: for each k the
/// input x·yᵏ·z must be rejected (or exceed the budget) in at least 2ᵏ
/// steps, and the lockstep matcher must reject it too.
pub fn verify_attack(
    nfa: &OrderedNfa,
    cfg: &AttackConfig,
    k_range: std::ops::RangeInclusive<u32>,
    budget: u64,
) -> VerificationReport {
    assert_eq!(cfg.status, AttackStatus::Vulnerable, "only Vulnerable configs are verifiable");
    let x = cfg.prefix.rep_string();
    let y = cfg.pump.rep_string();
    let z = cfg.suffix.rep_string();
    let mut runs = Vec::new();
    let mut verdict = Verdict::Confirmed;
    for k in k_range {
        let input = format!("{x}{}{z}", y.repeat(k as usize));
        let outcome = backtrack_run(nfa, &input, budget);
        let steps = outcome.steps();
        let name = match outcome {
            BacktrackOutcome::Accepted { .. } => "accepted",
            BacktrackOutcome::Rejected { .. } => "rejected",
            BacktrackOutcome::BudgetExceeded { .. } => "budget-exceeded",
        };
        runs.push(VerificationRun { k, steps, outcome: name.into() });
        if matches!(verdict, Verdict::Confirmed) {
            if matches!(outcome, BacktrackOutcome::Accepted { .. }) {
                verdict = Verdict::Refuted { reason: format!("input accepted at k={k}") };
            } else if k < 64 && steps < (1u64 << k) {
                verdict = Verdict::Refuted {
                    reason: format!("steps {steps} below 2^{k} at k={k}"),
                };
            } else if lockstep_run(nfa, &input) == LockstepOutcome::Accepted {
                verdict = Verdict::Refuted { reason: format!("lockstep accepts at k={k}") };
            }
        }
    }
    VerificationReport { runs, verdict }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::nfa::build;
    use crate::pattern::{normalize, parse, NormalizeConfig};

    fn compile(pattern: &str, anchored: bool) -> OrderedNfa {
        let alphabet = Alphabet::default();
        let ast = parse(pattern, &alphabet).unwrap();
        let cfg = NormalizeConfig { force_anchored: anchored, ..Default::default() };
        let (core, _) = normalize(&ast, &cfg).unwrap();
        build(&core, &alphabet)
    }

    #[test]
    fn machine_accepts_simple_match() {
        let nfa = compile("(a|b|ab)*c", true);
        assert!(matches!(
            backtrack_run(&nfa, "abc", 1_000_000),
            BacktrackOutcome::Accepted { .. }
        ));
    }

    #[test]
    fn machine_rejects_pumped_input_with_exponential_steps() {
        let nfa = compile("^(a|b|ab)*c$", true);
        for k in 2..=8u32 {
            let input = "ab".repeat(k as usize);
            match backtrack_run(&nfa, &input, 10_000_000) {
                BacktrackOutcome::Rejected { steps } => {
                    assert!(steps >= 1 << k, "k={k}: steps {steps} < 2^{k}");
                }
                other => panic!("expected rejection, got {other:?}"),
            }
        }
    }

    #[test]
    fn machine_step_count_regression_k3() {
        // Frozen from the machine itself: regression anchor for Def-style
        // step accounting on (ab)^3 against ^(a|b|ab)*c$.
        let nfa = compile("^(a|b|ab)*c$", true);
        let outcome = backtrack_run(&nfa, "ababab", u64::MAX);
        match outcome {
            BacktrackOutcome::Rejected { steps } => {
                assert!(steps >= 8);
                assert_eq!(steps, 29);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn empty_pattern_accepts_empty_quickly() {
        let nfa = compile("", true);
        match backtrack_run(&nfa, "", 10) {
            BacktrackOutcome::Accepted { steps } => assert!(steps <= 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn budget_exceeded_is_reported() {
        let nfa = compile("^(a|b|ab)*c$", true);
        let input = "ab".repeat(16);
        assert!(matches!(
            backtrack_run(&nfa, &input, 100),
            BacktrackOutcome::BudgetExceeded { steps } if steps >= 100
        ));
    }

    #[test]
    fn lockstep_agrees_on_simple_cases() {
        let nfa = compile("(a|b|ab)*c", true);
        assert_eq!(lockstep_run(&nfa, "ababc"), LockstepOutcome::Accepted);
        assert_eq!(lockstep_run(&nfa, "abab"), LockstepOutcome::Rejected);
    }

    #[test]
    fn lockstep_is_linear_in_input() {
        // A pathological backtracking input is still one pass for lockstep.
        let nfa = compile("^(a|b|ab)*c$", true);
        let input = "ab".repeat(64);
        assert_eq!(lockstep_run(&nfa, &input), LockstepOutcome::Rejected);
    }

    #[test]
    fn fringe_doubles_per_pump_for_nondeterministic_loop() {
        let nfa = compile("(a|b|ab)*", true);
        let head = nfa.pattern_loops().next().unwrap().head;
        for k in 1..=8usize {
            let input = "ab".repeat(k);
            match fringe(&nfa, &[head], &input, 1_000_000) {
                FringeResult::Fringe(f) => {
                    assert!(f.len() >= 1 << k, "k={k}: width {} < 2^{k}", f.len());
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn fringe_stays_width_one_for_deterministic_loop() {
        let nfa = compile("(ab)*", true);
        let head = nfa.pattern_loops().next().unwrap().head;
        for k in 1..=8usize {
            let input = "ab".repeat(k);
            match fringe(&nfa, &[head], &input, 1_000) {
                FringeResult::Fringe(f) => assert_eq!(f.len(), 1),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn fringe_width_cap_reports_depth() {
        let nfa = compile("(a|b|ab)*", true);
        let head = nfa.pattern_loops().next().unwrap().head;
        let input = "ab".repeat(30);
        assert!(matches!(
            fringe(&nfa, &[head], &input, 64),
            FringeResult::WidthCapExceeded { depth } if depth > 0 && depth <= 60
        ));
    }

    #[test]
    fn fringe_composes_sequentially() {
        // fringe(w1·w2) = fringe(w2) applied to fringe(w1).
        let nfa = compile("(a|b|ab)*c|.*", false);
        let start = [nfa.initial()];
        let (w1, w2) = ("aba", "bab");
        let FringeResult::Fringe(mid) = fringe(&nfa, &start, w1, 1 << 20) else { panic!() };
        let FringeResult::Fringe(composed) = fringe(&nfa, &mid, w2, 1 << 20) else { panic!() };
        let whole = format!("{w1}{w2}");
        let FringeResult::Fringe(direct) = fringe(&nfa, &start, &whole, 1 << 20) else { panic!() };
        assert_eq!(composed, direct);
    }

    #[test]
    fn rejection_matches_fringe_acceptance_emptiness() {
        let nfa = compile("(a|ab)*c", true);
        for input in ["", "a", "ab", "abc", "aab", "abab", "ababc", "cc"] {
            let run = backtrack_run(&nfa, input, u64::MAX);
            let FringeResult::Fringe(f) = fringe(&nfa, &[nfa.initial()], input, 1 << 20) else {
                panic!()
            };
            let fringe_accepts = f.iter().any(|&p| nfa.accepts_at_end(p));
            assert_eq!(
                matches!(run, BacktrackOutcome::Accepted { .. }),
                fringe_accepts,
                "input {input:?}"
            );
        }
    }

    #[test]
    fn machine_steps_bounded_below_by_fringe_width_on_rejection() {
        let nfa = compile("^(a|b|ab)*c$", true);
        for k in 1..=8usize {
            let input = "ab".repeat(k);
            let BacktrackOutcome::Rejected { steps } = backtrack_run(&nfa, &input, u64::MAX)
            else {
                panic!()
            };
            let FringeResult::Fringe(f) = fringe(&nfa, &[nfa.initial()], &input, 1 << 22) else {
                panic!()
            };
            assert!(steps >= f.len() as u64, "steps {steps} < width {}", f.len());
        }
    }

    #[test]
    fn step_growth_doubles_for_intro_pattern() {
        // ^(a|b|ab)*bc$ against (ab)^k ac: growth factor approaches 2.
        let nfa = compile("^(a|b|ab)*bc$", true);
        let steps: Vec<u64> = (4..=10u32)
            .map(|k| {
                let input = format!("{}ac", "ab".repeat(k as usize));
                backtrack_run(&nfa, &input, u64::MAX).steps()
            })
            .collect();
        for w in steps.windows(2) {
            let ratio = w[1] as f64 / w[0] as f64;
            assert!(ratio > 1.7 && ratio < 2.3, "ratio {ratio} out of band");
        }
    }
}
