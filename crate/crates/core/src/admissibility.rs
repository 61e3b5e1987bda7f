//! A priori admissibility of an arrangement: some choice of Rolle roots
//! satisfies the interlacing chain, the multiplicity conditions and, for
//! hyperbolic `P`, the coincidence condition C. Also enumerates every
//! admissible chain for given `(n, s, m)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arrangement::{candidate_assignments, Arrangement, Position, RolleAssignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    RolleChain1,
    CondA,
    CondB,
    CondC,
    Prop1Part1,
    Prop1Part2,
    Counts,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub positions: Vec<usize>,
    pub message: String,
}

impl Violation {
    fn new(condition: Condition, positions: Vec<usize>, message: String) -> Self {
        Violation {
            condition,
            positions,
            message,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub verdict: bool,
    pub rolle_witness: Option<RolleAssignment>,
    pub violations: Vec<Violation>,
}

/// When condition C is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CondCMode {
    /// Only for hyperbolic `P` (`m = 0`).
    #[default]
    HyperbolicOnly,
    /// For every `m`, applied to the chosen Rolle roots.
    Always,
}

impl std::str::FromStr for CondCMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hyperbolic-only" => Ok(CondCMode::HyperbolicOnly),
            "always" => Ok(CondCMode::Always),
            _ => Err(format!("expected 'always' or 'hyperbolic-only', got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AdmissibilityError {
    #[error("condition C applies to hyperbolic P only (m = {0})")]
    NotApplicable(u32),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Interlacing `x_l <= xi_l <= x_{l+s}` between the roots of `P` and the
/// chosen Rolle roots, compared by position index.
pub fn check_rolle_chain(arr: &Arrangement, assign: &RolleAssignment) -> Vec<Violation> {
    let x = arr.p_slots();
    let xi = assign.slots();
    let s = arr.s as usize;
    let mut out = Vec::new();
    for (l, &k) in xi.iter().enumerate() {
        match x.get(l) {
            Some(&lo) if lo > k => out.push(Violation::new(
                Condition::RolleChain1,
                vec![lo, k],
                format!("Rolle root {} lies left of x_{}", l + 1, l + 1),
            )),
            None => out.push(Violation::new(
                Condition::RolleChain1,
                vec![k],
                format!("Rolle root {} has no x_{}", l + 1, l + 1),
            )),
            _ => {}
        }
        match x.get(l + s) {
            Some(&hi) if hi < k => out.push(Violation::new(
                Condition::RolleChain1,
                vec![k, hi],
                format!("Rolle root {} lies right of x_{}", l + 1, l + s + 1),
            )),
            None => out.push(Violation::new(
                Condition::RolleChain1,
                vec![k],
                format!("Rolle root {} has no x_{}", l + 1, l + s + 1),
            )),
            _ => {}
        }
    }
    out
}

/// Per-position multiplicity rules: a root of `P` of multiplicity `d > s`
/// is a root of `Q` of multiplicity exactly `d - s`, all of it Rolle;
/// otherwise a shared root has `d < s`, `g <= 2m + 1` and is at most a
/// simple Rolle root; a root of `Q` alone has `g <= 2m + rolle`.
pub fn check_multiplicity_conditions(arr: &Arrangement, assign: &RolleAssignment) -> Vec<Violation> {
    let s = arr.s;
    let m = arr.m;
    let mut out = Vec::new();
    for (i, (pos, &r)) in arr.positions().iter().zip(assign.counts()).enumerate() {
        let Position { p: d, q: g } = *pos;
        if r > g {
            out.push(Violation::new(
                Condition::Counts,
                vec![i],
                format!("{r} Rolle copies at a position with only {g} roots of Q"),
            ));
        }
        if d > s {
            if g == 0 {
                out.push(Violation::new(
                    Condition::CondA,
                    vec![i],
                    format!("root of P of multiplicity {d} > s = {s} must be a root of Q"),
                ));
            } else if g != d - s {
                out.push(Violation::new(
                    Condition::Prop1Part1,
                    vec![i],
                    format!("root of P of multiplicity {d} > s = {s} needs Q-multiplicity {}, got {g}", d - s),
                ));
            }
            if g > 0 && r != g {
                out.push(Violation::new(
                    Condition::Prop1Part1,
                    vec![i],
                    format!("all {g} roots of Q at a root of P of multiplicity {d} > s must be Rolle, {r} are"),
                ));
            }
        } else if d > 0 {
            if g == 0 {
                continue;
            }
            if d == s {
                out.push(Violation::new(
                    Condition::Prop1Part2,
                    vec![i],
                    format!("shared root with P-multiplicity d = s = {s}; d < s required"),
                ));
            }
            if g > 2 * m + 1 {
                out.push(Violation::new(
                    Condition::Prop1Part2,
                    vec![i],
                    format!("Q-multiplicity {g} exceeds 2m + 1 = {}", 2 * m + 1),
                ));
            }
            if r > 1 {
                out.push(Violation::new(
                    Condition::CondB,
                    vec![i],
                    format!("{r} Rolle copies at a root of P of multiplicity {d} <= s"),
                ));
            }
        } else {
            if g > 2 * m + r {
                out.push(Violation::new(
                    Condition::Prop1Part2,
                    vec![i],
                    format!("Q-multiplicity {g} exceeds 2m + {r} = {}", 2 * m + r),
                ));
            }
            if r > 1 {
                out.push(Violation::new(
                    Condition::CondB,
                    vec![i],
                    format!("{r} Rolle copies at a root of Q alone"),
                ));
            }
        }
    }
    out
}

/// Condition C for hyperbolic `P`: a Rolle root `xi_l` equal to `x_l` or
/// `x_{l+s}` forces `x_l = ... = x_{l+s} = xi_l`.
pub fn check_condition_c(
    arr: &Arrangement,
    assign: &RolleAssignment,
) -> Result<Vec<Violation>, AdmissibilityError> {
    if arr.m > 0 {
        return Err(AdmissibilityError::NotApplicable(arr.m));
    }
    Ok(condition_c(arr, assign))
}

fn condition_c(arr: &Arrangement, assign: &RolleAssignment) -> Vec<Violation> {
    let x = arr.p_slots();
    let xi = assign.slots();
    let s = arr.s as usize;
    let mut out = Vec::new();
    for (l, &k) in xi.iter().enumerate() {
        let (Some(&lo), Some(&hi)) = (x.get(l), x.get(l + s)) else {
            continue;
        };
        if (lo == k || hi == k) && !(lo == k && hi == k) {
            out.push(Violation::new(
                Condition::CondC,
                vec![k],
                format!(
                    "Rolle root {} meets a root of P, so x_{}..x_{} must all coincide with it",
                    l + 1,
                    l + 1,
                    l + s + 1
                ),
            ));
        }
    }
    out
}

fn count_violations(arr: &Arrangement) -> Vec<Violation> {
    let mut out = Vec::new();
    let (n, s, m, mp) = (arr.n as i64, arr.s as i64, arr.m as i64, arr.m_prime as i64);
    if arr.p_total() as i64 != n - 2 * m {
        out.push(Violation::new(
            Condition::Counts,
            vec![],
            format!("sum of P multiplicities {} != n - 2m = {}", arr.p_total(), n - 2 * m),
        ));
    }
    if arr.q_total() as i64 != n - s - 2 * mp {
        out.push(Violation::new(
            Condition::Counts,
            vec![],
            format!("sum of Q multiplicities {} != n - s - 2m' = {}", arr.q_total(), n - s - 2 * mp),
        ));
    }
    if mp > m {
        out.push(Violation::new(
            Condition::Counts,
            vec![],
            format!("m' = {mp} exceeds m = {m}"),
        ));
    }
    if n - 2 * m - s < 0 {
        out.push(Violation::new(
            Condition::Counts,
            vec![],
            format!("n - 2m - s = {} Rolle roots is negative", n - 2 * m - s),
        ));
    }
    out
}

fn violations_for(arr: &Arrangement, assign: &RolleAssignment, mode: CondCMode) -> Vec<Violation> {
    let mut v = check_rolle_chain(arr, assign);
    v.extend(check_multiplicity_conditions(arr, assign));
    if arr.m == 0 || mode == CondCMode::Always {
        v.extend(condition_c(arr, assign));
    }
    v
}

/// Admissibility with condition C for hyperbolic `P` only.
pub fn is_admissible(arr: &Arrangement) -> AdmissibilityReport {
    is_admissible_with(arr, CondCMode::HyperbolicOnly)
}

pub fn is_admissible_with(arr: &Arrangement, mode: CondCMode) -> AdmissibilityReport {
    let counts = count_violations(arr);
    if !counts.is_empty() {
        return AdmissibilityReport {
            verdict: false,
            rolle_witness: None,
            violations: counts,
        };
    }
    let mut best: Option<Vec<Violation>> = None;
    for assign in candidate_assignments(arr) {
        let v = violations_for(arr, &assign, mode);
        if v.is_empty() {
            return AdmissibilityReport {
                verdict: true,
                rolle_witness: Some(assign),
                violations: Vec::new(),
            };
        }
        if best.as_ref().is_none_or(|b| v.len() < b.len()) {
            best = Some(v);
        }
    }
    let violations = best.unwrap_or_else(|| {
        vec![Violation::new(
            Condition::Counts,
            vec![],
            format!(
                "no way to place {} Rolle roots (at most one per position unless P-multiplicity > s)",
                arr.rolle_count()
            ),
        )]
    });
    AdmissibilityReport {
        verdict: false,
        rolle_witness: None,
        violations,
    }
}

fn check_params(n: u32, s: u32, m: u32) -> Result<(), AdmissibilityError> {
    if s < 1 || s >= n {
        return Err(AdmissibilityError::InvalidParams(format!(
            "need 1 <= s <= n - 1, got n = {n}, s = {s}"
        )));
    }
    if 2 * m > n {
        return Err(AdmissibilityError::InvalidParams(format!("2m = {} exceeds n = {n}", 2 * m)));
    }
    if (n as i64) - 2 * (m as i64) - (s as i64) < 0 {
        return Err(AdmissibilityError::InvalidParams(format!(
            "n - 2m - s = {} is negative",
            n as i64 - 2 * m as i64 - s as i64
        )));
    }
    Ok(())
}

/// Every admissible chain for `(n, s, m)` over all `m' in 0..=m`, sorted by
/// canonical text.
pub fn enumerate_admissible(n: u32, s: u32, m: u32) -> Result<Vec<Arrangement>, AdmissibilityError> {
    enumerate_admissible_with(n, s, m, CondCMode::HyperbolicOnly)
}

pub fn enumerate_admissible_with(
    n: u32,
    s: u32,
    m: u32,
    mode: CondCMode,
) -> Result<Vec<Arrangement>, AdmissibilityError> {
    check_params(n, s, m)?;
    let mut out = Vec::new();
    for mp in 0..=m {
        if 2 * mp > n - s {
            break;
        }
        let mut chains = Vec::new();
        chains_into(n - 2 * m, n - s - 2 * mp, s, m, &mut Vec::new(), &mut chains);
        for positions in chains {
            let arr = Arrangement::new(n, s, m, mp, positions).expect("sums match by construction");
            if is_admissible_with(&arr, mode).verdict {
                out.push(arr);
            }
        }
    }
    let mut keyed: Vec<(String, Arrangement)> = out.into_iter().map(|a| (a.to_string(), a)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(keyed.into_iter().map(|(_, a)| a).collect())
}

// Every interleaving of compositions, skipping positions that no
// assignment can make admissible.
fn chains_into(
    rem_p: u32,
    rem_q: u32,
    s: u32,
    m: u32,
    cur: &mut Vec<Position>,
    out: &mut Vec<Vec<Position>>,
) {
    if rem_p == 0 && rem_q == 0 {
        out.push(cur.clone());
        return;
    }
    for p in 0..=rem_p {
        for q in 0..=rem_q {
            if p + q == 0 {
                continue;
            }
            let dead = if p > s {
                q != p - s
            } else if p > 0 {
                q > 0 && (p == s || q > 2 * m + 1)
            } else {
                q > 2 * m + 1
            };
            if dead {
                continue;
            }
            cur.push(Position::new(p, q));
            chains_into(rem_p - p, rem_q - q, s, m, cur, out);
            cur.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{parse_arrangement, Shape};

    fn arr(text: &str, n: u32, s: u32, m: u32, mp: u32) -> Arrangement {
        parse_arrangement(text, &Shape::full(n, s, m, mp)).unwrap()
    }

    fn names(v: &[Arrangement]) -> Vec<String> {
        v.iter().map(|a| a.to_string()).collect()
    }

    #[test]
    fn rolle_chain_examples() {
        let a = arr("P < Q < P^2Q < Q < P", 6, 1, 1, 1);
        assert!(check_rolle_chain(&a, &RolleAssignment::new(vec![0, 1, 1, 1, 0])).is_empty());
        let b = arr("Q < P < P", 2, 1, 0, 0);
        let v = check_rolle_chain(&b, &RolleAssignment::new(vec![1, 0, 0]));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].condition, Condition::RolleChain1);
        let c = arr("P^3Q^2", 3, 1, 0, 0);
        assert!(check_rolle_chain(&c, &RolleAssignment::new(vec![2])).is_empty());
    }

    #[test]
    fn multiplicity_examples() {
        let a = arr("P < P^2Q^3 < P", 6, 3, 1, 0);
        assert!(check_multiplicity_conditions(&a, &RolleAssignment::new(vec![0, 1, 0])).is_empty());

        let b = Arrangement::unchecked(6, 2, 0, 0, vec![Position::new(4, 1), Position::new(2, 3)]);
        let v = check_multiplicity_conditions(&b, &RolleAssignment::new(vec![1, 1]));
        assert!(v.iter().any(|v| v.condition == Condition::Prop1Part1 && v.positions == vec![0]));

        for s in 1..4 {
            let c = Arrangement::unchecked(s + 3, s, 1, 0, vec![Position::new(s, 1)]);
            let v = check_multiplicity_conditions(&c, &RolleAssignment::new(vec![1]));
            assert!(v.iter().any(|v| v.condition == Condition::Prop1Part2), "s = {s}");
        }
    }

    #[test]
    fn condition_c_examples() {
        let a = arr("PQ < P < Q < P", 3, 1, 0, 0);
        let v = check_condition_c(&a, &RolleAssignment::new(vec![1, 0, 1, 0])).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].condition, Condition::CondC);
        let b = arr("P^2Q", 2, 1, 0, 0);
        assert!(check_condition_c(&b, &RolleAssignment::new(vec![1])).unwrap().is_empty());
        let c = arr("P^3Q < P < Q", 4, 2, 0, 0);
        assert!(check_condition_c(&c, &RolleAssignment::new(vec![1, 0, 1])).unwrap().is_empty());
        let d = arr("P < Q < P^2Q < Q < P", 6, 1, 1, 1);
        assert_eq!(
            check_condition_c(&d, &RolleAssignment::new(vec![0, 1, 1, 1, 0])),
            Err(AdmissibilityError::NotApplicable(1))
        );
    }

    #[test]
    fn example_verdicts() {
        assert!(is_admissible(&arr("P < Q < P^2Q < Q < P", 6, 1, 1, 1)).verdict);
        assert!(is_admissible(&arr("P < Q < P", 2, 1, 0, 0)).verdict);
        assert!(is_admissible(&arr("P^2Q", 2, 1, 0, 0)).verdict);
        // one Rolle root cannot cover a fourfold root of Q when m = 1
        let q4 = Arrangement::unchecked(6, 2, 1, 0, vec![Position::new(0, 4)]);
        let v = check_multiplicity_conditions(&q4, &RolleAssignment::new(vec![1]));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].condition, Condition::Prop1Part2);
    }

    #[test]
    fn report_invariant() {
        for (t, n, s, m, mp) in [("Q < P < P", 2, 1, 0, 0), ("P^2Q", 2, 1, 0, 0), ("PQ < P < Q < P", 3, 1, 0, 0)] {
            let r = is_admissible(&arr(t, n, s, m, mp));
            assert_eq!(r.verdict, r.violations.is_empty() && r.rolle_witness.is_some());
        }
    }

    #[test]
    fn enumerates_quadratic_case() {
        assert_eq!(names(&enumerate_admissible(2, 1, 0).unwrap()), vec!["P < Q < P", "P^2Q"]);
    }

    #[test]
    fn enumerates_cubic_cases() {
        assert_eq!(
            names(&enumerate_admissible(3, 1, 0).unwrap()),
            vec!["P < Q < P < Q < P", "P < Q < P^2Q", "P^2Q < Q < P", "P^3Q^2"]
        );
        let got = names(&enumerate_admissible(3, 1, 1).unwrap());
        assert_eq!(got, vec!["P", "P < Q < Q", "P < Q^2", "Q < P < Q", "Q < Q < P", "Q^2 < P"]);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(matches!(enumerate_admissible(3, 3, 0), Err(AdmissibilityError::InvalidParams(_))));
        assert!(matches!(enumerate_admissible(4, 3, 1), Err(AdmissibilityError::InvalidParams(_))));
        assert!(matches!(enumerate_admissible(3, 1, 2), Err(AdmissibilityError::InvalidParams(_))));
    }

    #[test]
    fn cond_c_mode_parses() {
        assert_eq!("always".parse::<CondCMode>(), Ok(CondCMode::Always));
        assert!("sometimes".parse::<CondCMode>().is_err());
    }
}
