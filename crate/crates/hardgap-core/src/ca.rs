//! Binary one-dimensional cellular automata.
//!
//! A [`Rule`] is a truth table over the `2^(2r+1)` neighbourhood patterns of
//! radius `r` (1 or 2). Pattern indices read the neighbourhood left to right
//! with the leftmost cell as the most significant bit; this ordering is shared
//! by every downstream module. Rows wrap periodically (indices mod `W`).

use crate::error::{HardgapError, Result};

/// Truth table of a local transition rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    radius: usize,
    table: Vec<bool>,
    name: String,
}

impl Rule {
    /// Builds a rule from an explicit truth table. Table length must be
    /// `2^(2*radius+1)`.
    pub fn from_table(radius: usize, table: Vec<bool>, name: impl Into<String>) -> Result<Self> {
        let expected = 1usize << (2 * radius + 1);
        if table.len() != expected {
            return Err(HardgapError::ShapeMismatch {
                op: "Rule::from_table".into(),
                detail: format!("expected table length {expected}, got {}", table.len()),
            });
        }
        Ok(Self { radius, table, name: name.into() })
    }

    /// Radius-1 rule from its Wolfram number: `table[p]` is bit `p` of
    /// `number`, where `p` is the 3-bit neighbourhood value with the left
    /// cell as high bit.
    pub fn from_wolfram(number: u32) -> Result<Self> {
        if number > 255 {
            return Err(HardgapError::RuleNumberOutOfRange(number));
        }
        let table = (0..8).map(|p| (number >> p) & 1 == 1).collect();
        Ok(Self { radius: 1, table, name: format!("rule{number}") })
    }

    /// Named rules used throughout: radius-1 rules 150, 30, 106 by Wolfram
    /// number; radius-2 rules D and G by their Boolean formulas over
    /// `(L2, L1, C, R1, R2)`.
    pub fn from_formula(name: &str) -> Result<Self> {
        match name {
            "150" => Self::from_wolfram(150),
            "30" => Self::from_wolfram(30),
            "106" => Self::from_wolfram(106),
            "D" => {
                // L1 ^ ((C | R1) & (L2 | R2))
                let table = (0..32)
                    .map(|p| {
                        let (l2, l1, c, r1, r2) = unpack5(p);
                        l1 ^ ((c | r1) & (l2 | r2))
                    })
                    .collect();
                Self::from_table(2, table, "ruleD")
            }
            "G" => {
                // (L1 ^ (C | R1)) | (L2 & R2)
                let table = (0..32)
                    .map(|p| {
                        let (l2, l1, c, r1, r2) = unpack5(p);
                        (l1 ^ (c | r1)) | (l2 & r2)
                    })
                    .collect();
                Self::from_table(2, table, "ruleG")
            }
            other => Err(HardgapError::UnknownRule(other.into())),
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    /// Number of neighbourhood patterns, `2^(2r+1)`.
    pub fn pattern_count(&self) -> usize {
        self.table.len()
    }

    /// Rule output for a neighbourhood pattern index.
    pub fn apply(&self, pattern: usize) -> bool {
        self.table[pattern]
    }

    /// Whether the rule is linear over GF(2): `f(a ^ b) = f(a) ^ f(b)` on all
    /// pattern pairs, with `f(0) = 0`.
    pub fn is_gf2_linear(&self) -> bool {
        let n = self.table.len();
        if self.table[0] {
            return false;
        }
        for a in 0..n {
            for b in 0..n {
                if self.table[a ^ b] != (self.table[a] ^ self.table[b]) {
                    return false;
                }
            }
        }
        true
    }
}

fn unpack5(p: usize) -> (bool, bool, bool, bool, bool) {
    // Pattern index packs (L2, L1, C, R1, R2) with L2 as high bit.
    (
        (p >> 4) & 1 == 1,
        (p >> 3) & 1 == 1,
        (p >> 2) & 1 == 1,
        (p >> 1) & 1 == 1,
        p & 1 == 1,
    )
}

/// One row of the automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    cells: Vec<bool>,
}

impl Row {
    pub fn new(cells: Vec<bool>) -> Self {
        Self { cells }
    }

    /// Parses a string of '0'/'1' characters.
    pub fn from_bits(s: &str) -> Self {
        Self { cells: s.chars().map(|c| c == '1').collect() }
    }

    pub fn zeros(width: usize) -> Self {
        Self { cells: vec![false; width] }
    }

    pub fn width(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn get(&self, i: usize) -> bool {
        self.cells[i]
    }

    /// Neighbourhood pattern index at position `i` under periodic boundaries,
    /// leftmost cell as most significant bit.
    pub fn neighbourhood(&self, i: usize, radius: usize) -> usize {
        let w = self.cells.len();
        let mut p = 0usize;
        for d in 0..(2 * radius + 1) {
            let j = (i + w + d - radius) % w;
            p = (p << 1) | usize::from(self.cells[j]);
        }
        p
    }

    /// Elementwise XOR of two equal-width rows.
    pub fn xor(&self, other: &Row) -> Row {
        assert_eq!(self.width(), other.width());
        Row::new(self.cells.iter().zip(&other.cells).map(|(a, b)| a ^ b).collect())
    }

    pub fn to_bit_string(&self) -> String {
        self.cells.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// A rollout: the initial row plus its images under repeated rule application.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rollout {
    rows: Vec<Row>,
}

impl Rollout {
    /// Rebuilds a rollout from rows already known to satisfy the rule-image
    /// invariant (container deserialization).
    pub(crate) fn from_rows(rows: Vec<Row>) -> Self {
        assert!(!rows.is_empty());
        Self { rows }
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row(&self, t: usize) -> &Row {
        &self.rows[t]
    }

    /// Number of transitions (rows minus one).
    pub fn steps(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn width(&self) -> usize {
        self.rows[0].width()
    }

    /// Line-oriented text form: one '0'/'1' row per timestep.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for row in &self.rows {
            s.push_str(&row.to_bit_string());
            s.push('\n');
        }
        s
    }
}

/// Applies the rule once under periodic boundaries.
pub fn step(row: &Row, rule: &Rule) -> Result<Row> {
    let w = row.width();
    if w < 2 * rule.radius() + 1 {
        return Err(HardgapError::RowTooShort { len: w, radius: rule.radius() });
    }
    let cells = (0..w).map(|i| rule.apply(row.neighbourhood(i, rule.radius()))).collect();
    Ok(Row::new(cells))
}

/// Evolves `steps` transitions, returning all `steps + 1` rows.
pub fn evolve(row: &Row, rule: &Rule, steps: usize) -> Result<Rollout> {
    let mut rows = Vec::with_capacity(steps + 1);
    rows.push(row.clone());
    for _ in 0..steps {
        let next = step(rows.last().unwrap(), rule)?;
        rows.push(next);
    }
    Ok(Rollout { rows })
}
