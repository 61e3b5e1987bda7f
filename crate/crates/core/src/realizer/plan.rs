//! Role map of a target chain: which sorted root of `Q` plays which part,
//! how the real-root variables `w` and real parts `g` interleave, and which
//! rule defines each component of `eta`.

use serde::Serialize;

use crate::arrangement::{Arrangement, RolleAssignment};

/// One coordinate of `h`: a real root `w_j` of `P` or the real part `g_p`
/// of a complex pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HVar {
    W(usize),
    G(usize),
}

/// A sorted real root of `Q` as the target sees it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SlotRole {
    pub position: usize,
    pub rolle: bool,
    /// Index among the non-Rolle roots, left to right.
    pub u: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Anchor {
    Zero,
    One,
    Slot(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EtaRule {
    /// `eta = xi[slot]`.
    Slot(usize),
    /// `eta = xi_a + (index + 1)(xi_b - xi_a)/count`, `count` one more than
    /// the group size.
    Spaced {
        left: Anchor,
        right: Anchor,
        index: usize,
        count: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhiRef {
    Slot(usize),
    W(usize),
}

/// One term `|xi[slot] - ref - sign * b|` of `Phi_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiTerm {
    pub slot: usize,
    pub reference: PhiRef,
    pub sign: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RealizationPlan {
    #[serde(skip)]
    pub target: Arrangement,
    #[serde(skip)]
    pub assignment: RolleAssignment,
    /// Complex pairs of `P` whose real parts are free variables, `m - m'`.
    pub free_pairs: usize,
    /// Pairs pushed far away, `m'`.
    pub far_pairs: usize,
    pub slots: Vec<SlotRole>,
    pub w_positions: Vec<usize>,
    pub w_mults: Vec<u32>,
    pub layout: Vec<HVar>,
    pub eta_rules: Vec<EtaRule>,
    pub phi_terms: Vec<PhiTerm>,
    pub least_generic: bool,
}

impl RealizationPlan {
    pub fn new(target: &Arrangement, assignment: &RolleAssignment) -> Self {
        let positions = target.positions();
        let rolle = assignment.counts();
        let s = target.s;
        let free_pairs = (target.m - target.m_prime) as usize;

        let mut slots = Vec::new();
        let mut u = 0;
        for (i, pos) in positions.iter().enumerate() {
            for c in 0..pos.q {
                let is_rolle = c < rolle[i];
                slots.push(SlotRole {
                    position: i,
                    rolle: is_rolle,
                    u: if is_rolle {
                        None
                    } else {
                        u += 1;
                        Some(u - 1)
                    },
                });
            }
        }
        let first_slot = |i: usize| slots.iter().position(|r| r.position == i);
        let u_slot = |k: usize| slots.iter().position(|r| r.u == Some(k)).expect("u slot");

        let mut w_positions = Vec::new();
        let mut w_mults = Vec::new();
        let mut layout = Vec::new();
        for (i, pos) in positions.iter().enumerate() {
            if pos.p > 0 {
                layout.push(HVar::W(w_positions.len()));
                w_positions.push(i);
                w_mults.push(pos.p);
            }
            for g in 0..free_pairs {
                if slots[u_slot(2 * g)].position == i {
                    layout.push(HVar::G(g));
                }
            }
        }

        let is_anchor = |k: usize| slots[k].rolle && positions[slots[k].position].p < s + 1;
        let left_anchor = |i: usize| {
            (0..slots.len())
                .rev()
                .find(|&k| slots[k].position < i && is_anchor(k))
                .map_or(Anchor::Zero, Anchor::Slot)
        };
        let right_anchor = |i: usize| {
            (0..slots.len())
                .find(|&k| slots[k].position > i && is_anchor(k))
                .map_or(Anchor::One, Anchor::Slot)
        };

        let mut eta_rules = Vec::with_capacity(layout.len());
        let mut groups: Vec<((Anchor, Anchor), Vec<usize>)> = Vec::new();
        for (hi, var) in layout.iter().enumerate() {
            let rule = match *var {
                HVar::G(g) => EtaRule::Slot(u_slot(2 * g)),
                HVar::W(j) => {
                    let i = w_positions[j];
                    match first_slot(i) {
                        Some(k) if w_mults[j] < s + 1 => EtaRule::Slot(k),
                        _ => {
                            let key = (left_anchor(i), right_anchor(i));
                            match groups.iter_mut().find(|(g, _)| *g == key) {
                                Some((_, members)) => members.push(hi),
                                None => groups.push((key, vec![hi])),
                            }
                            EtaRule::Slot(usize::MAX)
                        }
                    }
                }
            };
            eta_rules.push(rule);
        }
        for ((left, right), members) in groups {
            let count = members.len() + 1;
            for (index, hi) in members.into_iter().enumerate() {
                eta_rules[hi] = EtaRule::Spaced {
                    left,
                    right,
                    index,
                    count,
                };
            }
        }

        let w_at = |i: usize| w_positions.iter().position(|&p| p == i);
        let rolle_at = |i: usize| (0..slots.len()).find(|&k| slots[k].position == i && slots[k].rolle);
        let reference_at = |i: usize| {
            w_at(i)
                .map(PhiRef::W)
                .or_else(|| rolle_at(i).map(PhiRef::Slot))
                .or_else(|| first_slot(i).map(PhiRef::Slot))
        };
        let mut phi_terms = Vec::new();
        for (k, role) in slots.iter().enumerate() {
            if role.rolle {
                continue;
            }
            let i = role.position;
            let here = rolle_at(i).map(PhiRef::Slot).or_else(|| w_at(i).map(PhiRef::W));
            let term = match here {
                Some(reference) => PhiTerm {
                    slot: k,
                    reference,
                    sign: 0.0,
                },
                None if i > 0 => PhiTerm {
                    slot: k,
                    reference: reference_at(i - 1).expect("neighbor"),
                    sign: 1.0,
                },
                None => PhiTerm {
                    slot: k,
                    reference: reference_at(i + 1).expect("neighbor"),
                    sign: -1.0,
                },
            };
            phi_terms.push(term);
        }
        let least_generic = phi_terms.iter().all(|t| t.sign == 0.0);

        RealizationPlan {
            target: target.clone(),
            assignment: assignment.clone(),
            free_pairs,
            far_pairs: target.m_prime as usize,
            slots,
            w_positions,
            w_mults,
            layout,
            eta_rules,
            phi_terms,
            least_generic,
        }
    }

    /// Number of coordinates of `h`, `q + m - m'`.
    pub fn h_len(&self) -> usize {
        self.layout.len()
    }

    pub fn w_count(&self) -> usize {
        self.w_positions.len()
    }

    /// Index in `h` of `w_j`.
    pub fn w_index(&self, j: usize) -> usize {
        self.layout.iter().position(|v| *v == HVar::W(j)).expect("w in layout")
    }

    /// Index in `h` of `g_p`.
    pub fn g_index(&self, p: usize) -> usize {
        self.layout.iter().position(|v| *v == HVar::G(p)).expect("g in layout")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{parse_arrangement, rolle_assignments, Shape};

    fn plan(text: &str, n: u32, s: u32, m: u32, mp: u32) -> RealizationPlan {
        let arr = parse_arrangement(text, &Shape::full(n, s, m, mp)).unwrap();
        let assign = rolle_assignments(&arr).into_iter().next().unwrap();
        RealizationPlan::new(&arr, &assign)
    }

    #[test]
    fn hyperbolic_quadratic() {
        let p = plan("P < Q < P", 2, 1, 0, 0);
        assert_eq!(p.layout, vec![HVar::W(0), HVar::W(1)]);
        assert_eq!(
            p.eta_rules[0],
            EtaRule::Spaced {
                left: Anchor::Zero,
                right: Anchor::Slot(0),
                index: 0,
                count: 2
            }
        );
        assert!(p.least_generic);
        assert!(p.phi_terms.is_empty());
    }

    #[test]
    fn sextic_roles() {
        let p = plan("P < Q < P^2Q < Q < P", 6, 1, 1, 1);
        assert_eq!(p.free_pairs, 0);
        assert_eq!(p.far_pairs, 1);
        assert_eq!(p.slots.len(), 3);
        assert!(p.slots.iter().all(|r| r.rolle));
        assert_eq!(
            p.eta_rules[1],
            EtaRule::Spaced {
                left: Anchor::Slot(0),
                right: Anchor::Slot(2),
                index: 0,
                count: 2
            }
        );
    }

    #[test]
    fn pairs_interleave_after_their_w() {
        // s = 3: a triple root of Q at the double root of P, two copies non-Rolle.
        let p = plan("P < P^2Q^3 < P", 6, 3, 1, 0);
        assert_eq!(p.free_pairs, 1);
        assert_eq!(p.layout, vec![HVar::W(0), HVar::W(1), HVar::G(0), HVar::W(2)]);
        assert_eq!(p.eta_rules[2], EtaRule::Slot(1));
        assert_eq!(p.phi_terms.len(), 2);
        assert!(p.phi_terms.iter().all(|t| t.reference == PhiRef::Slot(0)));
        assert!(p.least_generic);
    }

    #[test]
    fn lone_pair_is_not_least_generic() {
        let p = plan("P < Q < Q", 3, 1, 1, 0);
        assert!(!p.least_generic);
        assert_eq!(p.phi_terms.len(), 2);
        assert_eq!(p.phi_terms[0].reference, PhiRef::W(0));
        assert_eq!(p.phi_terms[1].reference, PhiRef::Slot(0));
    }
}
