//! Symbols, symbol ranges and the analysis alphabet.
//!
//! Every transition label is an inclusive range of Unicode scalar values, so a
//! character class is just a handful of ranges and a single character is a
//! degenerate range. All advance operations split their input into maximal
//! sub-ranges with uniform successor structure; [`refine`] computes that split.

use serde::{Deserialize, Serialize};

/// A Unicode scalar value. Surrogates (0xD800..=0xDFFF) never occur.
pub type Symbol = u32;

const SURROGATE_LO: u32 = 0xD800;
const SURROGATE_HI: u32 = 0xDFFF;

/// Next scalar value after `s`, skipping the surrogate gap.
pub fn next_symbol(s: Symbol) -> Option<Symbol> {
    match s {
        0x10FFFF.. => None,
        x if x + 1 == SURROGATE_LO => Some(SURROGATE_HI + 1),
        x => Some(x + 1),
    }
}

/// Previous scalar value before `s`, skipping the surrogate gap.
pub fn prev_symbol(s: Symbol) -> Option<Symbol> {
    match s {
        0 => None,
        x if x - 1 == SURROGATE_HI => Some(SURROGATE_LO - 1),
        x => Some(x - 1),
    }
}

/// An inclusive range `lo..=hi` of scalar values.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymbolRange {
    pub lo: Symbol,
    pub hi: Symbol,
}

impl SymbolRange {
    pub fn new(lo: Symbol, hi: Symbol) -> Self {
        debug_assert!(lo <= hi, "inverted symbol range {lo}..={hi}");
        SymbolRange { lo, hi }
    }

    pub fn single(s: Symbol) -> Self {
        SymbolRange { lo: s, hi: s }
    }

    pub fn of_char(c: char) -> Self {
        Self::single(c as u32)
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.lo <= s && s <= self.hi
    }

    pub fn intersect(&self, other: &SymbolRange) -> Option<SymbolRange> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(SymbolRange { lo, hi })
    }

    /// Deterministic concrete representative: the lowest printable ASCII
    /// symbol in the range, falling back to the range minimum.
    pub fn representative(&self) -> Symbol {
        const PRINTABLE: SymbolRange = SymbolRange { lo: 0x20, hi: 0x7E };
        match self.intersect(&PRINTABLE) {
            Some(r) => r.lo,
            None => self.lo,
        }
    }

    pub fn representative_char(&self) -> char {
        char::from_u32(self.representative()).expect("ranges never cover surrogates")
    }
}

impl std::fmt::Debug for SymbolRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn show(s: Symbol, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
            match char::from_u32(s) {
                Some(c) if (' '..='~').contains(&c) => write!(f, "{c}"),
                _ => write!(f, "\\u{s:04x}"),
            }
        }
        show(self.lo, f)?;
        if self.lo != self.hi {
            write!(f, "-")?;
            show(self.hi, f)?;
        }
        Ok(())
    }
}

/// The finite, totally ordered alphabet the analysis works over.
///
/// `max` bounds every compiled range; the default keeps the search space small
/// while still covering the ASCII patterns real corpora are dominated by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet {
    /// Highest scalar value in the alphabet (inclusive).
    pub max: Symbol,
    /// Whether `.` matches the newline symbol.
    pub dot_matches_newline: bool,
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet { max: 0x7F, dot_matches_newline: false }
    }
}

impl Alphabet {
    pub fn ascii() -> Self {
        Self::default()
    }

    pub fn unicode() -> Self {
        Alphabet { max: 0x10FFFF, dot_matches_newline: false }
    }

    /// The full alphabet as a single range.
    pub fn full(&self) -> SymbolRange {
        SymbolRange::new(0, self.max)
    }

    /// Ranges matched by `.` under this alphabet.
    pub fn dot(&self) -> Vec<SymbolRange> {
        if self.dot_matches_newline {
            vec![self.full()]
        } else {
            self.complement(&[SymbolRange::single('\n' as u32)])
        }
    }

    /// Complement of a range set within the alphabet, as sorted disjoint ranges.
    pub fn complement(&self, ranges: &[SymbolRange]) -> Vec<SymbolRange> {
        let norm = normalize_ranges(ranges);
        let mut out = Vec::new();
        let mut cursor: Option<Symbol> = Some(0);
        for r in &norm {
            if let Some(c) = cursor {
                if c < r.lo && c <= self.max {
                    out.push(SymbolRange::new(c, (r.lo - 1).min(self.max)));
                }
            }
            cursor = next_symbol(r.hi);
        }
        if let Some(c) = cursor {
            if c <= self.max {
                out.push(SymbolRange::new(c, self.max));
            }
        }
        out
    }

    /// Clamp a range set to the alphabet, dropping anything above `max`.
    pub fn clamp(&self, ranges: &[SymbolRange]) -> Vec<SymbolRange> {
        ranges
            .iter()
            .filter_map(|r| r.intersect(&self.full()))
            .collect()
    }
}

/// Sort, merge and dedupe a range set into disjoint ascending ranges.
pub fn normalize_ranges(ranges: &[SymbolRange]) -> Vec<SymbolRange> {
    let mut rs: Vec<SymbolRange> = ranges.to_vec();
    rs.sort();
    let mut out: Vec<SymbolRange> = Vec::with_capacity(rs.len());
    for r in rs {
        match out.last_mut() {
            Some(last) if next_symbol(last.hi).is_some_and(|n| n >= r.lo) => {
                last.hi = last.hi.max(r.hi);
            }
            _ => out.push(r),
        }
    }
    out
}

/// Split `input` into maximal sub-ranges such that within each sub-range every
/// symbol hits exactly the same subset of `edges`. Returns the sub-ranges in
/// ascending order; together they partition `input` exactly.
pub fn refine(input: SymbolRange, edges: impl Iterator<Item = SymbolRange>) -> Vec<SymbolRange> {
    // Cut points are range starts and one-past range ends.
    let mut cuts: Vec<Symbol> = vec![input.lo];
    for e in edges {
        if e.hi < input.lo || e.lo > input.hi {
            continue;
        }
        if e.lo > input.lo {
            cuts.push(e.lo);
        }
        if let Some(n) = next_symbol(e.hi) {
            if n <= input.hi {
                cuts.push(n);
            }
        }
    }
    cuts.sort_unstable();
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len());
    for (i, &lo) in cuts.iter().enumerate() {
        let hi = match cuts.get(i + 1) {
            Some(&n) => prev_symbol(n).unwrap(),
            None => input.hi,
        };
        out.push(SymbolRange::new(lo, hi));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_of_single_char() {
        let a = Alphabet::ascii();
        let comp = a.complement(&[SymbolRange::of_char('c')]);
        assert_eq!(comp, vec![SymbolRange::new(0, 'b' as u32), SymbolRange::new('d' as u32, 0x7F)]);
    }

    #[test]
    fn complement_of_nothing_is_everything() {
        let a = Alphabet::ascii();
        assert_eq!(a.complement(&[]), vec![a.full()]);
    }

    #[test]
    fn dot_excludes_newline_by_default() {
        let a = Alphabet::ascii();
        let dot = a.dot();
        assert!(dot.iter().all(|r| !r.contains('\n' as u32)));
        assert!(dot.iter().any(|r| r.contains('a' as u32)));
    }

    #[test]
    fn refine_partitions_input_exactly() {
        let input = SymbolRange::new(0, 20);
        let edges = [SymbolRange::new(3, 7), SymbolRange::new(5, 12), SymbolRange::new(18, 40)];
        let parts = refine(input, edges.iter().copied());
        // Contiguous, ascending, covering the input.
        assert_eq!(parts.first().unwrap().lo, input.lo);
        assert_eq!(parts.last().unwrap().hi, input.hi);
        for w in parts.windows(2) {
            assert_eq!(next_symbol(w[0].hi), Some(w[1].lo));
        }
        // Uniform membership within each part.
        for p in &parts {
            for e in &edges {
                assert_eq!(e.contains(p.lo), e.contains(p.hi));
            }
        }
    }

    #[test]
    fn representative_prefers_printable() {
        assert_eq!(SymbolRange::new(0, 0x7F).representative(), 0x20);
        assert_eq!(SymbolRange::of_char('a').representative_char(), 'a');
        assert_eq!(SymbolRange::single(9).representative(), 9);
    }

    #[test]
    fn surrogate_gap_is_skipped() {
        assert_eq!(next_symbol(0xD7FF), Some(0xE000));
        assert_eq!(prev_symbol(0xE000), Some(0xD7FF));
    }
}
