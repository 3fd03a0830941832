//! Random pattern generation for property testing and corpus benchmarks.
//!
//! Generates pattern *text*, so the parser is part of everything tested with
//! it. Output is restricted to a small literal alphabet plus the operators
//! the analysis handles; a seeded RNG makes every corpus reproducible.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    /// Maximum operator nesting depth.
    pub max_depth: u32,
    /// Literal symbols to draw from.
    pub alphabet: &'static [char],
    /// Allow counted repetitions e{m,n} (kept small).
    pub counted: bool,
    /// Allow anchors at the pattern ends.
    pub anchors: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_depth: 4, alphabet: &['a', 'b', 'c'], counted: true, anchors: false }
    }
}

pub struct PatternGen {
    rng: StdRng,
    cfg: GenConfig,
}

impl PatternGen {
    pub fn new(seed: u64, cfg: GenConfig) -> Self {
        PatternGen { rng: StdRng::seed_from_u64(seed), cfg }
    }

    pub fn pattern(&mut self) -> String {
        let depth = self.cfg.max_depth;
        let mut body = self.alternation(depth);
        if body.is_empty() {
            body = self.symbol();
        }
        if self.cfg.anchors {
            if self.rng.gen_bool(0.3) {
                body.insert(0, '^');
            }
            if self.rng.gen_bool(0.3) {
                body.push('$');
            }
        }
        body
    }

    /// A random input string over the generator's alphabet.
    pub fn input(&mut self, max_len: usize) -> String {
        let len = self.rng.gen_range(0..=max_len);
        (0..len).map(|_| self.literal()).collect()
    }

    fn literal(&mut self) -> char {
        self.cfg.alphabet[self.rng.gen_range(0..self.cfg.alphabet.len())]
    }

    fn symbol(&mut self) -> String {
        self.literal().to_string()
    }

    fn alternation(&mut self, depth: u32) -> String {
        let n = if depth == 0 { 1 } else { self.rng.gen_range(1..=3) };
        let parts: Vec<String> = (0..n).map(|_| self.concat(depth)).collect();
        parts.join("|")
    }

    fn concat(&mut self, depth: u32) -> String {
        let n = self.rng.gen_range(1..=3);
        (0..n).map(|_| self.quantified(depth)).collect()
    }

    fn quantified(&mut self, depth: u32) -> String {
        let atom = self.atom(depth);
        match self.rng.gen_range(0..10) {
            0 | 1 => format!("{atom}*"),
            2 => format!("{atom}+"),
            3 => format!("{atom}?"),
            4 if self.cfg.counted => {
                let m = self.rng.gen_range(0..=2u32);
                let n = m + self.rng.gen_range(0..=2u32);
                format!("{atom}{{{m},{n}}}")
            }
            _ => atom,
        }
    }

    fn atom(&mut self, depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.55) {
            return self.symbol();
        }
        match self.rng.gen_range(0..4) {
            0 => ".".to_string(),
            1 => {
                let a = self.literal();
                let b = self.literal();
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                if self.rng.gen_bool(0.3) {
                    format!("[^{lo}-{hi}]")
                } else {
                    format!("[{lo}-{hi}]")
                }
            }
            _ => format!("({})", self.alternation(depth - 1)),
        }
    }
}
