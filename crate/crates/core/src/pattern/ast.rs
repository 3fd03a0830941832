//! Pattern syntax tree.

use crate::alphabet::SymbolRange;

/// Byte span into the original pattern text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }
}

/// Identifier of a Kleene loop, unique within one pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LoopId(pub u32);

/// Constructs the analysis carries opaquely rather than rejecting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnsupportedKind {
    Backreference,
    Lookaround,
    LazyQuantifier,
    InnerAnchor,
    WordBoundary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternKind {
    /// Matches the empty string.
    Empty,
    /// One atom: a character class as disjoint ascending ranges.
    Symbol(Vec<SymbolRange>),
    Concat(Vec<PatternAst>),
    /// Ordered alternation; child order is source order and is semantic.
    Alt(Vec<PatternAst>),
    /// Kleene star. `synthetic` marks the match-all loops added by
    /// normalization; `lazy` flips the body/exit priority.
    Star { child: Box<PatternAst>, id: LoopId, synthetic: bool, lazy: bool },
    /// Pre-normalization sugar, eliminated by `normalize`.
    Plus(Box<PatternAst>),
    Optional(Box<PatternAst>),
    Repeat { child: Box<PatternAst>, min: u32, max: Option<u32> },
    AnchorStart,
    AnchorEnd,
    /// Carried opaquely; compiles to a dead marked state.
    Unsupported(UnsupportedKind, String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternAst {
    pub kind: PatternKind,
    pub span: Span,
}

impl PatternAst {
    pub fn new(kind: PatternKind, span: Span) -> Self {
        PatternAst { kind, span }
    }

    /// Number of nodes in this subtree (expansion accounting).
    pub fn node_count(&self) -> usize {
        1 + match &self.kind {
            PatternKind::Concat(xs) | PatternKind::Alt(xs) => {
                xs.iter().map(|x| x.node_count()).sum()
            }
            PatternKind::Star { child, .. }
            | PatternKind::Plus(child)
            | PatternKind::Optional(child)
            | PatternKind::Repeat { child, .. } => child.node_count(),
            _ => 0,
        }
    }

    /// True when only the post-normalization core kinds remain. Boundary
    /// anchors survive normalization as inert nodes and count as core.
    pub fn is_core(&self) -> bool {
        match &self.kind {
            PatternKind::Empty
            | PatternKind::Symbol(_)
            | PatternKind::Unsupported(..)
            | PatternKind::AnchorStart
            | PatternKind::AnchorEnd => true,
            PatternKind::Concat(xs) | PatternKind::Alt(xs) => xs.iter().all(|x| x.is_core()),
            PatternKind::Star { child, .. } => child.is_core(),
            PatternKind::Plus(_) | PatternKind::Optional(_) | PatternKind::Repeat { .. } => false,
        }
    }

    pub fn visit(&self, f: &mut impl FnMut(&PatternAst)) {
        f(self);
        match &self.kind {
            PatternKind::Concat(xs) | PatternKind::Alt(xs) => {
                for x in xs {
                    x.visit(f);
                }
            }
            PatternKind::Star { child, .. }
            | PatternKind::Plus(child)
            | PatternKind::Optional(child)
            | PatternKind::Repeat { child, .. } => child.visit(f),
            _ => {}
        }
    }
}
