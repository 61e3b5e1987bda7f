//! The chain of real roots of `P` and `Q = P^(s)`, its text grammar and JSON
//! form, closure under merging, extraction from polynomials, and the search
//! for Rolle-root assignments.
//!
//! Grammar:
//!
//! ```text
//! arrangement := position ("<" position)*
//! position    := ("P" mult?)? ("Q" mult?)?      -- non-empty
//! mult        := "^" int
//! ```
//!
//! A position with both letters is a coincidence of a root of `P` with a
//! root of `Q`. `QP` is accepted on input and printed as `PQ`.

mod extract;
mod rolle;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use extract::{extract, extract_with, ExtractOptions, Extraction};
pub use rolle::{candidate_assignments, rolle_assignments, RolleAssignment};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArrangementError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("sum of {which} multiplicities is {found}, expected {expected} ({rule})")]
    SumMismatch {
        which: char,
        found: u32,
        expected: i64,
        rule: &'static str,
    },
    #[error("invalid shape: {0}")]
    InvalidShape(String),
}

/// One slot of the chain: how many copies of a root of `P` and of `Q` sit
/// at the same point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Position {
    pub p: u32,
    pub q: u32,
}

impl Position {
    pub fn new(p: u32, q: u32) -> Self {
        Position { p, q }
    }
}

/// Ordered chain of positions for a degree-`n` polynomial `P` with `m`
/// complex pairs and its `s`-th derivative with `m_prime` complex pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrangement {
    pub n: u32,
    pub s: u32,
    pub m: u32,
    pub m_prime: u32,
    positions: Vec<Position>,
}

/// Parameters to validate (or infer) when reading a chain.
/// Missing `m`, `m_prime` default to 0; missing `n`, `s` are inferred from
/// the multiplicity sums.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Shape {
    pub n: Option<u32>,
    pub s: Option<u32>,
    pub m: Option<u32>,
    pub m_prime: Option<u32>,
}

impl Shape {
    pub fn full(n: u32, s: u32, m: u32, m_prime: u32) -> Self {
        Shape {
            n: Some(n),
            s: Some(s),
            m: Some(m),
            m_prime: Some(m_prime),
        }
    }
}

impl Arrangement {
    /// Validated constructor.
    pub fn new(
        n: u32,
        s: u32,
        m: u32,
        m_prime: u32,
        positions: Vec<Position>,
    ) -> Result<Self, ArrangementError> {
        if s == 0 || s >= n {
            return Err(ArrangementError::InvalidShape(format!(
                "need 1 <= s <= n-1, got n={n}, s={s}"
            )));
        }
        if 2 * m > n {
            return Err(ArrangementError::InvalidShape(format!(
                "2m = {} exceeds n = {n}",
                2 * m
            )));
        }
        if m_prime > m {
            return Err(ArrangementError::InvalidShape(format!(
                "m' = {m_prime} exceeds m = {m}"
            )));
        }
        if 2 * m_prime > n - s {
            return Err(ArrangementError::InvalidShape(format!(
                "2m' = {} exceeds n - s = {}",
                2 * m_prime,
                n - s
            )));
        }
        if positions.is_empty() && n - 2 * m + (n - s - 2 * m_prime) > 0 {
            return Err(ArrangementError::InvalidShape("empty chain".into()));
        }
        if let Some(i) = positions.iter().position(|p| p.p + p.q == 0) {
            return Err(ArrangementError::InvalidShape(format!("position {i} is empty")));
        }
        let arr = Arrangement {
            n,
            s,
            m,
            m_prime,
            positions,
        };
        let sp = arr.p_total();
        if sp != n - 2 * m {
            return Err(ArrangementError::SumMismatch {
                which: 'P',
                found: sp,
                expected: (n - 2 * m) as i64,
                rule: "sum of P multiplicities = n - 2m",
            });
        }
        let sq = arr.q_total();
        if sq != n - s - 2 * m_prime {
            return Err(ArrangementError::SumMismatch {
                which: 'Q',
                found: sq,
                expected: (n - s - 2 * m_prime) as i64,
                rule: "sum of Q multiplicities = (n - s) - 2m'",
            });
        }
        Ok(arr)
    }

    /// Constructor without invariant checks, for probing the condition
    /// checkers with deliberately inconsistent data.
    pub fn unchecked(n: u32, s: u32, m: u32, m_prime: u32, positions: Vec<Position>) -> Self {
        Arrangement {
            n,
            s,
            m,
            m_prime,
            positions,
        }
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn p_total(&self) -> u32 {
        self.positions.iter().map(|p| p.p).sum()
    }

    pub fn q_total(&self) -> u32 {
        self.positions.iter().map(|p| p.q).sum()
    }

    /// Number of Rolle roots `n - 2m - s`; negative when undefined.
    pub fn rolle_count(&self) -> i64 {
        self.n as i64 - 2 * self.m as i64 - self.s as i64
    }

    /// Position index of each real root of `P` in chain order, with
    /// multiplicity (`x_1 <= ... <= x_{n-2m}`).
    pub fn p_slots(&self) -> Vec<usize> {
        self.positions
            .iter()
            .enumerate()
            .flat_map(|(i, pos)| std::iter::repeat_n(i, pos.p as usize))
            .collect()
    }

    /// Position index of each real root of `Q` in chain order.
    pub fn q_slots(&self) -> Vec<usize> {
        self.positions
            .iter()
            .enumerate()
            .flat_map(|(i, pos)| std::iter::repeat_n(i, pos.q as usize))
            .collect()
    }

    /// "Least generic": every non-Rolle copy of a root of `Q` shares its
    /// position with a Rolle copy or with a root of `P`.
    pub fn is_least_generic(&self, assign: &RolleAssignment) -> bool {
        self.positions
            .iter()
            .zip(assign.counts())
            .all(|(pos, &r)| pos.q == r || r > 0 || pos.p > 0)
    }

    /// JSON value with the fixed field order
    /// `{n, s, m, m_prime, positions, rolle}`.
    pub fn to_json(&self, rolle: Option<&RolleAssignment>) -> ArrangementJson {
        ArrangementJson {
            n: self.n,
            s: self.s,
            m: self.m,
            m_prime: self.m_prime,
            positions: self.positions.iter().map(|p| [p.p, p.q]).collect(),
            rolle: rolle.map(|r| r.counts().to_vec()),
        }
    }

    pub fn from_json(j: &ArrangementJson) -> Result<(Self, Option<RolleAssignment>), ArrangementError> {
        let arr = Arrangement::new(
            j.n,
            j.s,
            j.m,
            j.m_prime,
            j.positions.iter().map(|[p, q]| Position::new(*p, *q)).collect(),
        )?;
        let rolle = match &j.rolle {
            Some(c) if c.len() == arr.len() => Some(RolleAssignment::new(c.clone())),
            Some(_) => {
                return Err(ArrangementError::InvalidShape(
                    "rolle annotation length differs from chain length".into(),
                ))
            }
            None => None,
        };
        Ok((arr, rolle))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementJson {
    pub n: u32,
    pub s: u32,
    pub m: u32,
    pub m_prime: u32,
    pub positions: Vec<[u32; 2]>,
    pub rolle: Option<Vec<u32>>,
}

fn fmt_mult(f: &mut fmt::Formatter<'_>, letter: char, k: u32) -> fmt::Result {
    match k {
        0 => Ok(()),
        1 => write!(f, "{letter}"),
        _ => write!(f, "{letter}^{k}"),
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_mult(f, 'P', self.p)?;
        fmt_mult(f, 'Q', self.q)
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, pos) in self.positions.iter().enumerate() {
            if i > 0 {
                write!(f, " < ")?;
            }
            write!(f, "{pos}")?;
        }
        Ok(())
    }
}

/// Canonical text of an arrangement.
pub fn format_arrangement(arr: &Arrangement) -> String {
    arr.to_string()
}

/// Read the chain text only (no totals validation). Blank text is the
/// empty chain of a polynomial without real roots.
pub fn parse_chain(text: &str) -> Result<Vec<Position>, ArrangementError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let bytes = text.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let skip_ws = |i: &mut usize| {
        while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    loop {
        skip_ws(&mut i);
        let start = i;
        let mut pos = Position::new(0, 0);
        let mut seen = [false, false];
        while i < bytes.len() && (bytes[i] == b'P' || bytes[i] == b'Q') {
            let which = (bytes[i] == b'Q') as usize;
            if seen[which] {
                return Err(ArrangementError::Syntax {
                    pos: i,
                    msg: format!("repeated '{}' in one position", bytes[i] as char),
                });
            }
            seen[which] = true;
            i += 1;
            let mut k = 1u32;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let ds = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                k = text[ds..i].parse().map_err(|_| ArrangementError::Syntax {
                    pos: ds,
                    msg: "expected positive integer multiplicity".into(),
                })?;
                if k == 0 {
                    return Err(ArrangementError::Syntax {
                        pos: ds,
                        msg: "multiplicity must be positive".into(),
                    });
                }
            }
            if which == 0 {
                pos.p = k;
            } else {
                pos.q = k;
            }
        }
        if i == start {
            return Err(ArrangementError::Syntax {
                pos: i,
                msg: "expected a position ('P' and/or 'Q')".into(),
            });
        }
        out.push(pos);
        skip_ws(&mut i);
        if i == bytes.len() {
            return Ok(out);
        }
        if bytes[i] != b'<' {
            return Err(ArrangementError::Syntax {
                pos: i,
                msg: "expected '<' between positions".into(),
            });
        }
        i += 1;
    }
}

/// Parse and validate against (or infer from) the given shape.
pub fn parse_arrangement(text: &str, shape: &Shape) -> Result<Arrangement, ArrangementError> {
    let positions = parse_chain(text)?;
    let sp: u32 = positions.iter().map(|p| p.p).sum();
    let sq: u32 = positions.iter().map(|p| p.q).sum();
    let m = shape.m.unwrap_or(0);
    let m_prime = shape.m_prime.unwrap_or(0);
    let n = shape.n.unwrap_or(sp + 2 * m);
    let s = match shape.s {
        Some(s) => s,
        None => {
            let s = n as i64 - 2 * m_prime as i64 - sq as i64;
            if s < 1 {
                return Err(ArrangementError::InvalidShape(format!(
                    "cannot infer s from the chain (n = {n}, m' = {m_prime}, sum of Q = {sq})"
                )));
            }
            s as u32
        }
    };
    Arrangement::new(n, s, m, m_prime, positions)
}

/// Arrangement `alpha` obtained from `beta` by merging adjacent positions;
/// `merge_map[i]` is the position of `alpha` that `beta`'s position `i`
/// went to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureRelation {
    pub alpha: Arrangement,
    pub beta: Arrangement,
    pub merge_map: Vec<usize>,
}

/// Every arrangement obtained from `beta` by turning any subset of its
/// strict inequalities into equalities (including the empty subset),
/// deduplicated and sorted by canonical text.
pub fn closure_of(beta: &Arrangement) -> Vec<Arrangement> {
    let mut out: Vec<Arrangement> = closure_relations(beta).into_iter().map(|c| c.alpha).collect();
    out.sort_by_key(|a| a.to_string());
    out.dedup();
    out
}

/// Same as [`closure_of`] but keeps the merge maps, one per subset.
pub fn closure_relations(beta: &Arrangement) -> Vec<ClosureRelation> {
    let k = beta.len();
    if k == 0 {
        return vec![ClosureRelation {
            alpha: beta.clone(),
            beta: beta.clone(),
            merge_map: Vec::new(),
        }];
    }
    let gaps = k - 1;
    (0u64..(1u64 << gaps))
        .map(|mask| {
            let mut positions: Vec<Position> = vec![beta.positions[0]];
            let mut merge_map = vec![0usize];
            for i in 1..k {
                if mask & (1 << (i - 1)) != 0 {
                    let last = positions.last_mut().unwrap();
                    last.p += beta.positions[i].p;
                    last.q += beta.positions[i].q;
                } else {
                    positions.push(beta.positions[i]);
                }
                merge_map.push(positions.len() - 1);
            }
            ClosureRelation {
                alpha: Arrangement::unchecked(beta.n, beta.s, beta.m, beta.m_prime, positions),
                beta: beta.clone(),
                merge_map,
            }
        })
        .collect()
}
