//! Static detection of exponential-runtime (ReDoS) regular expressions.
//!
//! The analysis reduces catastrophic backtracking to reachability over
//! ordered and power-set automaton states: a prefix search drives the matcher
//! to a Kleene loop, a pumping search finds a word with two distinct paths
//! through the loop, and a suffix search finds a word failing every residual
//! state. Verdicts come with a concrete attack configuration (x, y, z) that
//! an executable backtracking oracle can confirm by step counting.

pub mod alphabet;
pub mod analysis;
pub mod multistate;
pub mod nfa;
pub mod oracle;
pub mod pattern;
pub mod testgen;

pub use alphabet::{Alphabet, Symbol, SymbolRange};
pub use analysis::{
    analyse, analyse_pattern, AnalysisConfig, AttackConfig, AttackStatus, PatternAnalysis,
    PipelineConfig, PipelineError,
};
pub use nfa::{build, BranchPoint, OrderedNfa, StateId};
pub use oracle::{backtrack_run, fringe, lockstep_run, verify_attack, BacktrackOutcome};
pub use pattern::{
    normalize, parse, LoopId, NormalizeConfig, ParseError, PatternAst, Span, TranslationReport,
};
