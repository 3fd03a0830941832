//! Shared helpers for integration tests: an AST-level backtracking matcher
//! used as an oracle independent of the automaton pipeline, plus compilation
//! shortcuts.

use redos_core::alphabet::Alphabet;
use redos_core::nfa::{build, OrderedNfa};
use redos_core::pattern::{normalize, parse, NormalizeConfig, PatternAst, PatternKind};

/// Exact-match membership decided directly on the syntax tree by recursive
/// descent with continuations. Handles the pre-normalization sugar natively,
/// so it can check expansion-preservation against the raw parse.
pub fn naive_match(ast: &PatternAst, input: &str) -> bool {
    let symbols: Vec<u32> = input.chars().map(|c| c as u32).collect();
    node(ast, &symbols, 0, &|p| p == symbols.len())
}

fn node(ast: &PatternAst, input: &[u32], pos: usize, k: &dyn Fn(usize) -> bool) -> bool {
    match &ast.kind {
        PatternKind::Empty | PatternKind::AnchorStart | PatternKind::AnchorEnd => k(pos),
        PatternKind::Symbol(ranges) => {
            pos < input.len() && ranges.iter().any(|r| r.contains(input[pos])) && k(pos + 1)
        }
        PatternKind::Concat(xs) => seq(xs, input, pos, k),
        PatternKind::Alt(xs) => xs.iter().any(|x| node(x, input, pos, k)),
        PatternKind::Star { child, .. } => star(child, input, pos, k),
        PatternKind::Plus(child) => node(child, input, pos, &|p| star(child, input, p, k)),
        PatternKind::Optional(child) => node(child, input, pos, k) || k(pos),
        PatternKind::Repeat { child, min, max } => rep(child, *min, *max, input, pos, k),
        PatternKind::Unsupported(..) => false,
    }
}

fn seq(xs: &[PatternAst], input: &[u32], pos: usize, k: &dyn Fn(usize) -> bool) -> bool {
    match xs.split_first() {
        None => k(pos),
        Some((head, tail)) => node(head, input, pos, &|p| seq(tail, input, p, k)),
    }
}

fn star(child: &PatternAst, input: &[u32], pos: usize, k: &dyn Fn(usize) -> bool) -> bool {
    if k(pos) {
        return true;
    }
    // Progress requirement keeps nullable bodies from looping.
    node(child, input, pos, &|p| p > pos && star(child, input, p, k))
}

fn rep(
    child: &PatternAst,
    min: u32,
    max: Option<u32>,
    input: &[u32],
    pos: usize,
    k: &dyn Fn(usize) -> bool,
) -> bool {
    if min > 0 {
        return node(child, input, pos, &|p| rep(child, min - 1, max.map(|m| m - 1), input, p, k));
    }
    match max {
        None => star(child, input, pos, k),
        Some(0) => k(pos),
        Some(m) => {
            k(pos) || node(child, input, pos, &|p| p > pos && rep(child, 0, Some(m - 1), input, p, k))
        }
    }
}

/// Compile pattern text to the exact-match automaton.
pub fn compile_exact(pattern: &str) -> OrderedNfa {
    let alphabet = Alphabet::default();
    let ast = parse(pattern, &alphabet).expect("pattern parses");
    let cfg = NormalizeConfig { force_anchored: true, ..Default::default() };
    let (core, _) = normalize(&ast, &cfg).expect("pattern normalizes");
    build(&core, &alphabet)
}

/// Every string of length ≤ `max_len` over `alphabet`.
pub fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for &c in alphabet {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
