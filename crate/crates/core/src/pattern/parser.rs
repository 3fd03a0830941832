//! Recursive-descent regex parser.
//!
//! Grammar covers the constructs the analysis understands (literals, classes,
//! `.`, alternation, grouping, `* + ?` and counted repetition, anchors) plus
//! opaque nodes for backreferences, lookarounds and lazy quantifiers.

use thiserror::Error;

use super::ast::{LoopId, PatternAst, PatternKind, Span, UnsupportedKind};
use crate::alphabet::{normalize_ranges, Alphabet, SymbolRange};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unbalanced parenthesis")]
    UnbalancedParen,
    #[error("unexpected `{0}`")]
    Unexpected(char),
    #[error("bad escape `\\{0}`")]
    BadEscape(String),
    #[error("dangling escape at end of pattern")]
    DanglingEscape,
    #[error("unterminated character class")]
    UnterminatedClass,
    #[error("inverted class range")]
    InvertedClassRange,
    #[error("inverted repetition bounds {{{min},{max}}}")]
    InvertedBounds { min: u32, max: u32 },
    #[error("quantifier has nothing to repeat")]
    NothingToRepeat,
    #[error("symbol U+{0:04X} outside the configured alphabet")]
    OutsideAlphabet(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {at}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the pattern text.
    pub at: usize,
}

struct Parser<'a> {
    text: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
    alphabet: Alphabet,
    next_loop: u32,
}

/// Parse pattern text into a syntax tree. Alternation order and Kleene
/// nesting are preserved; unsupported constructs become opaque nodes.
pub fn parse(pattern: &str, alphabet: &Alphabet) -> Result<PatternAst, ParseError> {
    let mut p = Parser {
        text: pattern,
        chars: pattern.char_indices().collect(),
        pos: 0,
        alphabet: *alphabet,
        next_loop: 0,
    };
    let ast = p.alternation()?;
    if let Some((off, c)) = p.peek_at() {
        // A stray `)` is the only way alternation() can stop early.
        let kind = if c == ')' { ParseErrorKind::UnbalancedParen } else { ParseErrorKind::Unexpected(c) };
        return Err(ParseError { kind, at: off });
    }
    Ok(ast)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn peek_at(&self) -> Option<(usize, char)> {
        self.chars.get(self.pos).copied()
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.text.len(), |&(o, _)| o)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { kind, at: self.offset() }
    }

    fn fresh_loop(&mut self) -> LoopId {
        let id = LoopId(self.next_loop);
        self.next_loop += 1;
        id
    }

    fn check_symbol(&self, s: u32, at: usize) -> Result<u32, ParseError> {
        if s > self.alphabet.max {
            Err(ParseError { kind: ParseErrorKind::OutsideAlphabet(s), at })
        } else {
            Ok(s)
        }
    }

    fn alternation(&mut self) -> Result<PatternAst, ParseError> {
        let start = self.offset();
        let mut branches = vec![self.concat()?];
        while self.eat('|') {
            branches.push(self.concat()?);
        }
        if branches.len() == 1 {
            Ok(branches.pop().unwrap())
        } else {
            let span = Span::new(start, self.offset());
            Ok(PatternAst::new(PatternKind::Alt(branches), span))
        }
    }

    fn concat(&mut self) -> Result<PatternAst, ParseError> {
        let start = self.offset();
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            items.push(self.quantified()?);
        }
        match items.len() {
            0 => Ok(PatternAst::new(PatternKind::Empty, Span::new(start, start))),
            1 => Ok(items.pop().unwrap()),
            _ => {
                let span = Span::new(start, self.offset());
                Ok(PatternAst::new(PatternKind::Concat(items), span))
            }
        }
    }

    fn quantified(&mut self) -> Result<PatternAst, ParseError> {
        let start = self.offset();
        let atom = self.atom()?;
        let mut node = atom;
        loop {
            let quant_start = self.offset();
            let quant = match self.peek() {
                Some('*') => {
                    self.bump();
                    Some(Quant::Star)
                }
                Some('+') => {
                    self.bump();
                    Some(Quant::Plus)
                }
                Some('?') => {
                    self.bump();
                    Some(Quant::Optional)
                }
                Some('{') => self.try_bounds()?,
                _ => None,
            };
            let Some(quant) = quant else { break };
            if matches!(node.kind, PatternKind::AnchorStart | PatternKind::AnchorEnd) {
                return Err(ParseError { kind: ParseErrorKind::NothingToRepeat, at: quant_start });
            }
            let span = Span::new(start, self.offset());
            // A trailing `?` makes the quantifier lazy; carried opaquely.
            if self.eat('?') {
                let raw = self.text[start..self.offset()].to_string();
                node = PatternAst::new(
                    PatternKind::Unsupported(UnsupportedKind::LazyQuantifier, raw),
                    Span::new(start, self.offset()),
                );
                continue;
            }
            node = match quant {
                Quant::Star => {
                    let id = self.fresh_loop();
                    PatternAst::new(
                        PatternKind::Star { child: Box::new(node), id, synthetic: false, lazy: false },
                        span,
                    )
                }
                Quant::Plus => PatternAst::new(PatternKind::Plus(Box::new(node)), span),
                Quant::Optional => PatternAst::new(PatternKind::Optional(Box::new(node)), span),
                Quant::Repeat { min, max } => {
                    PatternAst::new(PatternKind::Repeat { child: Box::new(node), min, max }, span)
                }
            };
        }
        Ok(node)
    }

    /// `{m}`, `{m,}` or `{m,n}`. Anything else starting with `{` is a literal
    /// brace, mirroring common engine behavior.
    fn try_bounds(&mut self) -> Result<Option<Quant>, ParseError> {
        let save = self.pos;
        let brace_at = self.offset();
        self.bump(); // '{'
        let mut min_digits = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                min_digits.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if min_digits.is_empty() {
            self.pos = save;
            return Ok(None);
        }
        let min: u32 = match min_digits.parse() {
            Ok(n) => n,
            Err(_) => {
                self.pos = save;
                return Ok(None);
            }
        };
        if self.eat('}') {
            return Ok(Some(Quant::Repeat { min, max: Some(min) }));
        }
        if !self.eat(',') {
            self.pos = save;
            return Ok(None);
        }
        if self.eat('}') {
            return Ok(Some(Quant::Repeat { min, max: None }));
        }
        let mut max_digits = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                max_digits.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if max_digits.is_empty() || !self.eat('}') {
            self.pos = save;
            return Ok(None);
        }
        let max: u32 = max_digits.parse().map_err(|_| ParseError {
            kind: ParseErrorKind::InvertedBounds { min, max: u32::MAX },
            at: brace_at,
        })?;
        if max < min {
            return Err(ParseError { kind: ParseErrorKind::InvertedBounds { min, max }, at: brace_at });
        }
        Ok(Some(Quant::Repeat { min, max: Some(max) }))
    }

    fn atom(&mut self) -> Result<PatternAst, ParseError> {
        let start = self.offset();
        let c = self.peek().expect("atom called at end of input");
        match c {
            '(' => self.group(),
            '[' => self.class(),
            '.' => {
                self.bump();
                Ok(PatternAst::new(
                    PatternKind::Symbol(self.alphabet.dot()),
                    Span::new(start, self.offset()),
                ))
            }
            '^' => {
                self.bump();
                Ok(PatternAst::new(PatternKind::AnchorStart, Span::new(start, self.offset())))
            }
            '$' => {
                self.bump();
                Ok(PatternAst::new(PatternKind::AnchorEnd, Span::new(start, self.offset())))
            }
            '\\' => self.escape(),
            '*' | '+' | '?' => Err(self.err(ParseErrorKind::NothingToRepeat)),
            _ => {
                self.bump();
                let s = self.check_symbol(c as u32, start)?;
                Ok(PatternAst::new(
                    PatternKind::Symbol(vec![SymbolRange::single(s)]),
                    Span::new(start, self.offset()),
                ))
            }
        }
    }

    fn group(&mut self) -> Result<PatternAst, ParseError> {
        let start = self.offset();
        let paren = self.pos;
        self.bump(); // '('
        if self.peek() == Some('?') {
            // (?:...) is an ordinary group; lookarounds are opaque.
            self.bump();
            match self.peek() {
                Some(':') => {
                    self.bump();
                }
                Some('=') | Some('!') | Some('<') => {
                    self.pos = paren;
                    return self.opaque_group(start, UnsupportedKind::Lookaround);
                }
                _ => {
                    return Err(self.err(ParseErrorKind::Unexpected('?')));
                }
            }
        }
        let inner = self.alternation()?;
        if !self.eat(')') {
            return Err(ParseError { kind: ParseErrorKind::UnbalancedParen, at: start });
        }
        Ok(PatternAst::new(inner.kind, Span::new(start, self.offset())))
    }

    /// Swallow a balanced group without interpreting it.
    fn opaque_group(&mut self, start: usize, kind: UnsupportedKind) -> Result<PatternAst, ParseError> {
        let mut depth = 0usize;
        loop {
            match self.bump() {
                Some('\\') => {
                    if self.bump().is_none() {
                        return Err(self.err(ParseErrorKind::DanglingEscape));
                    }
                }
                Some('(') => depth += 1,
                Some(')') => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                Some(_) => {}
                None => return Err(ParseError { kind: ParseErrorKind::UnbalancedParen, at: start }),
            }
        }
        let raw = self.text[start..self.offset()].to_string();
        Ok(PatternAst::new(
            PatternKind::Unsupported(kind, raw),
            Span::new(start, self.offset()),
        ))
    }

    fn escape(&mut self) -> Result<PatternAst, ParseError> {
        let start = self.offset();
        self.bump(); // '\'
        let c = self.bump().ok_or_else(|| self.err(ParseErrorKind::DanglingEscape))?;
        let span = |p: &Self| Span::new(start, p.offset());
        let symbol = |p: &mut Self, s: u32| -> Result<PatternAst, ParseError> {
            let s = p.check_symbol(s, start)?;
            Ok(PatternAst::new(PatternKind::Symbol(vec![SymbolRange::single(s)]), span(p)))
        };
        match c {
            '1'..='9' => Ok(PatternAst::new(
                PatternKind::Unsupported(UnsupportedKind::Backreference, format!("\\{c}")),
                span(self),
            )),
            'b' | 'B' => Ok(PatternAst::new(
                PatternKind::Unsupported(UnsupportedKind::WordBoundary, format!("\\{c}")),
                span(self),
            )),
            'd' | 'D' | 'w' | 'W' | 's' | 'S' => {
                let ranges = self.predefined_class(c);
                Ok(PatternAst::new(PatternKind::Symbol(ranges), span(self)))
            }
            'n' => symbol(self, '\n' as u32),
            't' => symbol(self, '\t' as u32),
            'r' => symbol(self, '\r' as u32),
            'f' => symbol(self, 0x0C),
            'v' => symbol(self, 0x0B),
            '0' => symbol(self, 0),
            'x' => {
                let h1 = self.bump().and_then(|c| c.to_digit(16));
                let h2 = self.bump().and_then(|c| c.to_digit(16));
                match (h1, h2) {
                    (Some(a), Some(b)) => symbol(self, a * 16 + b),
                    _ => Err(ParseError { kind: ParseErrorKind::BadEscape("x".into()), at: start }),
                }
            }
            c if c.is_ascii_alphanumeric() => {
                Err(ParseError { kind: ParseErrorKind::BadEscape(c.to_string()), at: start })
            }
            c => symbol(self, c as u32),
        }
    }

    fn predefined_class(&self, c: char) -> Vec<SymbolRange> {
        let base: Vec<SymbolRange> = match c.to_ascii_lowercase() {
            'd' => vec![SymbolRange::new('0' as u32, '9' as u32)],
            'w' => vec![
                SymbolRange::new('0' as u32, '9' as u32),
                SymbolRange::new('A' as u32, 'Z' as u32),
                SymbolRange::single('_' as u32),
                SymbolRange::new('a' as u32, 'z' as u32),
            ],
            's' => vec![
                SymbolRange::new(0x09, 0x0D),
                SymbolRange::single(' ' as u32),
            ],
            _ => unreachable!(),
        };
        if c.is_ascii_uppercase() {
            self.alphabet.complement(&base)
        } else {
            self.alphabet.clamp(&base)
        }
    }

    fn class(&mut self) -> Result<PatternAst, ParseError> {
        let start = self.offset();
        self.bump(); // '['
        let negated = self.eat('^');
        let mut ranges: Vec<SymbolRange> = Vec::new();
        let mut first = true;
        loop {
            let item_at = self.offset();
            let c = match self.peek() {
                None => return Err(ParseError { kind: ParseErrorKind::UnterminatedClass, at: start }),
                Some(']') if !first => {
                    self.bump();
                    break;
                }
                Some(c) => c,
            };
            first = false;
            let lo = self.class_symbol(c, item_at)?;
            let lo = match lo {
                ClassItem::Symbol(s) => s,
                ClassItem::Ranges(rs) => {
                    ranges.extend(rs);
                    continue;
                }
            };
            // A `-` forms a range unless it is the last char before `]`.
            if self.peek() == Some('-') && self.chars.get(self.pos + 1).map(|&(_, c)| c) != Some(']') {
                self.bump(); // '-'
                let hi_at = self.offset();
                let hc = self
                    .peek()
                    .ok_or(ParseError { kind: ParseErrorKind::UnterminatedClass, at: start })?;
                match self.class_symbol(hc, hi_at)? {
                    ClassItem::Symbol(hi) => {
                        if hi < lo {
                            return Err(ParseError {
                                kind: ParseErrorKind::InvertedClassRange,
                                at: item_at,
                            });
                        }
                        ranges.push(SymbolRange::new(lo, hi));
                    }
                    ClassItem::Ranges(_) => {
                        return Err(ParseError {
                            kind: ParseErrorKind::BadEscape("class in range".into()),
                            at: hi_at,
                        })
                    }
                }
            } else {
                ranges.push(SymbolRange::single(lo));
            }
        }
        let ranges = if negated {
            self.alphabet.complement(&ranges)
        } else {
            normalize_ranges(&self.alphabet.clamp(&ranges))
        };
        Ok(PatternAst::new(PatternKind::Symbol(ranges), Span::new(start, self.offset())))
    }

    fn class_symbol(&mut self, c: char, at: usize) -> Result<ClassItem, ParseError> {
        if c != '\\' {
            self.bump();
            return Ok(ClassItem::Symbol(self.check_symbol(c as u32, at)?));
        }
        self.bump(); // '\'
        let e = self.bump().ok_or_else(|| self.err(ParseErrorKind::DanglingEscape))?;
        let sym = |p: &Self, s: u32| -> Result<ClassItem, ParseError> {
            if s > p.alphabet.max {
                Err(ParseError { kind: ParseErrorKind::OutsideAlphabet(s), at })
            } else {
                Ok(ClassItem::Symbol(s))
            }
        };
        match e {
            'd' | 'D' | 'w' | 'W' | 's' | 'S' => Ok(ClassItem::Ranges(self.predefined_class(e))),
            'n' => sym(self, '\n' as u32),
            't' => sym(self, '\t' as u32),
            'r' => sym(self, '\r' as u32),
            'f' => sym(self, 0x0C),
            'v' => sym(self, 0x0B),
            '0' => sym(self, 0),
            'x' => {
                let h1 = self.bump().and_then(|c| c.to_digit(16));
                let h2 = self.bump().and_then(|c| c.to_digit(16));
                match (h1, h2) {
                    (Some(a), Some(b)) => sym(self, a * 16 + b),
                    _ => Err(ParseError { kind: ParseErrorKind::BadEscape("x".into()), at }),
                }
            }
            c if c.is_ascii_alphanumeric() => {
                Err(ParseError { kind: ParseErrorKind::BadEscape(c.to_string()), at })
            }
            c => sym(self, c as u32),
        }
    }
}

enum ClassItem {
    Symbol(u32),
    Ranges(Vec<SymbolRange>),
}

enum Quant {
    Star,
    Plus,
    Optional,
    Repeat { min: u32, max: Option<u32> },
}
