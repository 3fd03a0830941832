//! Exact-match normalization.
//!
//! Rewrites a parsed pattern so the automaton only ever sees the core
//! operators: counted repetitions and optionals are expanded, anchors are
//! stripped and recorded, and unanchored ends are wrapped in match-all loops
//! so sub-match behavior is expressed inside the automaton itself.
//!
//! Anchors are honored at the start/end of each top-level alternation branch
//! ("^a|b$" anchors the branches independently); anchors anywhere else become
//! opaque nodes. Boundary anchors stay in the tree as inert nodes (they
//! compile to ε), which makes a second normalization pass the identity. The
//! leading match-all loop is lazy (exit before body), which reproduces a
//! matcher's leftmost start-position scan; the trailing one is greedy like
//! any other star.
//!
//! A pattern with no anchors at all gets one shared pair of loops around the
//! whole alternation, so the start-position scan interleaves the branches the
//! way an engine does: all alternatives at position 0 before any at 1. Only
//! mixed-anchor patterns fall back to wrapping each branch on its own.

use thiserror::Error;

use super::ast::{LoopId, PatternAst, PatternKind, Span, UnsupportedKind};
use crate::alphabet::Alphabet;

#[derive(Debug, Clone, Copy)]
pub struct NormalizeConfig {
    pub alphabet: Alphabet,
    /// Cap on the total number of nodes created by repetition expansion.
    pub max_expansion: usize,
    /// Force exact-match semantics: anchors are still stripped and recorded,
    /// but no match-all loops are added. Used for oracle builds.
    pub force_anchored: bool,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig { alphabet: Alphabet::default(), max_expansion: 10_000, force_anchored: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("repetition expansion needs {required} nodes, limit is {limit}")]
    ExpansionLimitExceeded { span: Span, required: usize, limit: usize },
}

/// One expanded counted repetition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub span: Span,
    pub min: u32,
    pub max: Option<u32>,
    /// Nodes the expansion contributed.
    pub expanded_size: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TranslationReport {
    pub anchored_start: bool,
    pub anchored_end: bool,
    pub expansions: Vec<Expansion>,
    pub unsupported_nodes: Vec<Span>,
}

struct Normalizer {
    cfg: NormalizeConfig,
    next_loop: u32,
    expanded_nodes: usize,
    report: TranslationReport,
}

/// Normalize a parsed pattern to exact-match core form.
pub fn normalize(
    ast: &PatternAst,
    cfg: &NormalizeConfig,
) -> Result<(PatternAst, TranslationReport), NormalizeError> {
    let mut n = Normalizer {
        cfg: *cfg,
        next_loop: max_loop_id(ast).map_or(0, |LoopId(i)| i + 1),
        expanded_nodes: 0,
        report: TranslationReport::default(),
    };
    let out = n.run(ast)?;
    let mut report = n.report;
    report.unsupported_nodes = collect_unsupported(&out);
    debug_assert!(out.is_core());
    Ok((out, report))
}

fn max_loop_id(ast: &PatternAst) -> Option<LoopId> {
    let mut max = None;
    ast.visit(&mut |n| {
        if let PatternKind::Star { id, .. } = &n.kind {
            max = Some(max.map_or(*id, |m: LoopId| m.max(*id)));
        }
    });
    max
}

fn collect_unsupported(ast: &PatternAst) -> Vec<Span> {
    let mut spans = Vec::new();
    ast.visit(&mut |n| {
        if let PatternKind::Unsupported(..) = &n.kind {
            spans.push(n.span);
        }
    });
    spans
}

impl Normalizer {
    fn run(&mut self, ast: &PatternAst) -> Result<PatternAst, NormalizeError> {
        // Top-level alternation branches are anchored independently.
        let branches: Vec<&PatternAst> = match &ast.kind {
            PatternKind::Alt(xs) => xs.iter().collect(),
            _ => vec![ast],
        };
        let parts: Vec<BranchParts> = branches.iter().map(|b| split_anchors(b)).collect();
        self.report.anchored_start =
            parts.iter().all(|p| p.start_anchor.is_some() || p.start_wrapped);
        self.report.anchored_end = parts.iter().all(|p| p.end_anchor.is_some() || p.end_wrapped);
        // Anchor-free patterns share one loop pair around the whole
        // alternation; the start-position scan then interleaves branches.
        let anchor_free = parts.iter().all(|p| {
            p.start_anchor.is_none()
                && p.end_anchor.is_none()
                && !p.start_wrapped
                && !p.end_wrapped
        });
        let shared = anchor_free && !self.cfg.force_anchored;
        let mut out_branches = Vec::with_capacity(parts.len());
        for (b, parts) in branches.iter().zip(parts) {
            let mut items = Vec::new();
            if let Some(a) = parts.start_anchor {
                items.push(a);
            } else if !parts.start_wrapped && !shared && !self.cfg.force_anchored {
                items.push(self.match_all_loop(b.span, true));
            }
            let core = self.expand(&parts.body)?;
            if !matches!(core.kind, PatternKind::Empty) {
                items.push(core);
            }
            if let Some(a) = parts.end_anchor {
                items.push(a);
            } else if !parts.end_wrapped && !shared && !self.cfg.force_anchored {
                items.push(self.match_all_loop(b.span, false));
            }
            out_branches.push(match items.len() {
                0 => PatternAst::new(PatternKind::Empty, b.span),
                1 => items.pop().unwrap(),
                _ => PatternAst::new(PatternKind::Concat(items), b.span),
            });
        }
        let alt = match out_branches.len() {
            1 => out_branches.pop().unwrap(),
            _ => PatternAst::new(PatternKind::Alt(out_branches), ast.span),
        };
        if !shared {
            return Ok(alt);
        }
        let mut items = vec![self.match_all_loop(ast.span, true)];
        if !matches!(alt.kind, PatternKind::Empty) {
            items.push(alt);
        }
        items.push(self.match_all_loop(ast.span, false));
        Ok(PatternAst::new(PatternKind::Concat(items), ast.span))
    }

    fn match_all_loop(&mut self, span: Span, lazy: bool) -> PatternAst {
        let id = LoopId(self.next_loop);
        self.next_loop += 1;
        let body = PatternAst::new(
            PatternKind::Symbol(vec![self.cfg.alphabet.full()]),
            Span::new(span.start, span.start),
        );
        PatternAst::new(
            PatternKind::Star { child: Box::new(body), id, synthetic: true, lazy },
            Span::new(span.start, span.start),
        )
    }

    fn fresh_loop(&mut self) -> LoopId {
        let id = LoopId(self.next_loop);
        self.next_loop += 1;
        id
    }

    fn charge(&mut self, span: Span, nodes: usize) -> Result<(), NormalizeError> {
        self.expanded_nodes += nodes;
        if self.expanded_nodes > self.cfg.max_expansion {
            return Err(NormalizeError::ExpansionLimitExceeded {
                span,
                required: self.expanded_nodes,
                limit: self.cfg.max_expansion,
            });
        }
        Ok(())
    }

    fn expand(&mut self, ast: &PatternAst) -> Result<PatternAst, NormalizeError> {
        let span = ast.span;
        Ok(match &ast.kind {
            PatternKind::Empty | PatternKind::Symbol(_) | PatternKind::Unsupported(..) => ast.clone(),
            // Mid-pattern anchors are position assertions the automaton
            // cannot express; carry them opaquely.
            PatternKind::AnchorStart => {
                PatternAst::new(PatternKind::Unsupported(UnsupportedKind::InnerAnchor, "^".into()), span)
            }
            PatternKind::AnchorEnd => {
                PatternAst::new(PatternKind::Unsupported(UnsupportedKind::InnerAnchor, "$".into()), span)
            }
            PatternKind::Concat(xs) => {
                let items = xs.iter().map(|x| self.expand(x)).collect::<Result<Vec<_>, _>>()?;
                PatternAst::new(PatternKind::Concat(items), span)
            }
            PatternKind::Alt(xs) => {
                let items = xs.iter().map(|x| self.expand(x)).collect::<Result<Vec<_>, _>>()?;
                PatternAst::new(PatternKind::Alt(items), span)
            }
            PatternKind::Star { child, id, synthetic, lazy } => {
                let c = self.expand(child)?;
                PatternAst::new(
                    PatternKind::Star { child: Box::new(c), id: *id, synthetic: *synthetic, lazy: *lazy },
                    span,
                )
            }
            PatternKind::Plus(child) => {
                // e+ = e e*
                let c = self.expand(child)?;
                self.charge(span, c.node_count())?;
                let star = PatternAst::new(
                    PatternKind::Star {
                        child: Box::new(c.clone()),
                        id: self.fresh_loop(),
                        synthetic: false,
                        lazy: false,
                    },
                    span,
                );
                PatternAst::new(PatternKind::Concat(vec![c, star]), span)
            }
            PatternKind::Optional(child) => {
                let c = self.expand(child)?;
                self.optional(c, span)
            }
            PatternKind::Repeat { child, min, max } => {
                let c = self.expand(child)?;
                let unit = c.node_count();
                let copies = max.unwrap_or(min.saturating_add(1)).max(1) as usize;
                self.charge(span, unit * copies)?;
                self.report.expansions.push(Expansion {
                    span,
                    min: *min,
                    max: *max,
                    expanded_size: unit * copies,
                });
                let mut items: Vec<PatternAst> = (0..*min).map(|_| c.clone()).collect();
                match max {
                    None => {
                        // e{m,} = e^m e*
                        items.push(PatternAst::new(
                            PatternKind::Star {
                                child: Box::new(c),
                                id: self.fresh_loop(),
                                synthetic: false,
                                lazy: false,
                            },
                            span,
                        ));
                    }
                    Some(max) => {
                        // e{m,n} = e^m followed by n-m nested optionals.
                        let extra = max - min;
                        if extra > 0 {
                            let mut tail = self.optional(c.clone(), span);
                            for _ in 1..extra {
                                let inner =
                                    PatternAst::new(PatternKind::Concat(vec![c.clone(), tail]), span);
                                tail = self.optional(inner, span);
                            }
                            items.push(tail);
                        }
                    }
                }
                match items.len() {
                    0 => PatternAst::new(PatternKind::Empty, span),
                    1 => items.pop().unwrap(),
                    _ => PatternAst::new(PatternKind::Concat(items), span),
                }
            }
        })
    }

    /// Greedy optional: the filled branch first.
    fn optional(&mut self, e: PatternAst, span: Span) -> PatternAst {
        let empty = PatternAst::new(PatternKind::Empty, span);
        PatternAst::new(PatternKind::Alt(vec![e, empty]), span)
    }
}

struct BranchParts {
    body: PatternAst,
    start_anchor: Option<PatternAst>,
    end_anchor: Option<PatternAst>,
    /// A previous normalize pass already added the match-all loop here.
    start_wrapped: bool,
    end_wrapped: bool,
}

/// Detach a leading `^` / trailing `$` from one branch. Wrapper loops from a
/// previous pass stay inside the body but mark their side as handled.
fn split_anchors(branch: &PatternAst) -> BranchParts {
    let empty = |span| PatternAst::new(PatternKind::Empty, span);
    match &branch.kind {
        PatternKind::AnchorStart => BranchParts {
            body: empty(branch.span),
            start_anchor: Some(branch.clone()),
            end_anchor: None,
            start_wrapped: false,
            end_wrapped: false,
        },
        PatternKind::AnchorEnd => BranchParts {
            body: empty(branch.span),
            start_anchor: None,
            end_anchor: Some(branch.clone()),
            start_wrapped: false,
            end_wrapped: false,
        },
        PatternKind::Star { synthetic: true, .. } => BranchParts {
            body: branch.clone(),
            start_anchor: None,
            end_anchor: None,
            start_wrapped: true,
            end_wrapped: true,
        },
        PatternKind::Concat(xs) => {
            let mut items = xs.as_slice();
            let mut start_anchor = None;
            let mut end_anchor = None;
            if matches!(items.first().map(|x| &x.kind), Some(PatternKind::AnchorStart)) {
                start_anchor = Some(items[0].clone());
                items = &items[1..];
            }
            if matches!(items.last().map(|x| &x.kind), Some(PatternKind::AnchorEnd)) {
                end_anchor = Some(items[items.len() - 1].clone());
                items = &items[..items.len() - 1];
            }
            let start_wrapped = matches!(
                items.first().map(|x| &x.kind),
                Some(PatternKind::Star { synthetic: true, .. })
            );
            let end_wrapped = matches!(
                items.last().map(|x| &x.kind),
                Some(PatternKind::Star { synthetic: true, .. })
            );
            let body = match items.len() {
                0 => empty(branch.span),
                1 => items[0].clone(),
                _ => PatternAst::new(PatternKind::Concat(items.to_vec()), branch.span),
            };
            BranchParts { body, start_anchor, end_anchor, start_wrapped, end_wrapped }
        }
        _ => BranchParts {
            body: branch.clone(),
            start_anchor: None,
            end_anchor: None,
            start_wrapped: false,
            end_wrapped: false,
        },
    }
}
