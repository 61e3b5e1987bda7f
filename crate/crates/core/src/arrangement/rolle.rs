use serde::{Deserialize, Serialize};

use super::Arrangement;
use crate::admissibility::check_rolle_chain;

/// How many copies of the root of `Q` at each position are Rolle roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RolleAssignment {
    counts: Vec<u32>,
}

impl RolleAssignment {
    pub fn new(counts: Vec<u32>) -> Self {
        RolleAssignment { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// Position index of each Rolle root in chain order.
    pub fn slots(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize))
            .collect()
    }
}

fn cap(arr: &Arrangement, i: usize) -> u32 {
    let pos = arr.positions()[i];
    if pos.p > arr.s {
        pos.q
    } else {
        pos.q.min(1)
    }
}

/// Every way to mark `n - 2m - s` copies of roots of `Q` as Rolle roots,
/// at most one per position unless the position holds a root of `P` of
/// multiplicity above `s`. Lexicographic order of the count vectors.
/// Empty when `n - 2m - s < 0` or no marking fits.
pub fn candidate_assignments(arr: &Arrangement) -> Vec<RolleAssignment> {
    let total = arr.rolle_count();
    if total < 0 {
        return Vec::new();
    }
    let caps: Vec<u32> = (0..arr.len()).map(|i| cap(arr, i)).collect();
    // suffix sums bound the remaining capacity
    let mut room = vec![0u32; caps.len() + 1];
    for i in (0..caps.len()).rev() {
        room[i] = room[i + 1] + caps[i];
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(caps.len());
    fn go(
        i: usize,
        left: u32,
        caps: &[u32],
        room: &[u32],
        cur: &mut Vec<u32>,
        out: &mut Vec<RolleAssignment>,
    ) {
        if i == caps.len() {
            if left == 0 {
                out.push(RolleAssignment::new(cur.clone()));
            }
            return;
        }
        if room[i] < left {
            return;
        }
        for c in 0..=caps[i].min(left) {
            cur.push(c);
            go(i + 1, left - c, caps, room, cur, out);
            cur.pop();
        }
    }
    go(0, total as u32, &caps, &room, &mut cur, &mut out);
    out
}

/// Candidates that also satisfy the assignment invariants (all copies at a
/// position with `P`-multiplicity `p > s` are Rolle, `q = p - s`) and
/// interlace: the `l`-th Rolle root lies between `x_l` and `x_{l+s}`.
pub fn rolle_assignments(arr: &Arrangement) -> Vec<RolleAssignment> {
    candidate_assignments(arr)
        .into_iter()
        .filter(|a| {
            arr.positions().iter().zip(a.counts()).all(|(pos, &r)| {
                pos.p <= arr.s || (pos.q == pos.p - arr.s && r == pos.q)
            })
        })
        .filter(|a| check_rolle_chain(arr, a).is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{parse_arrangement, Shape};

    fn arr(text: &str, n: u32, s: u32, m: u32, mp: u32) -> Arrangement {
        parse_arrangement(text, &Shape::full(n, s, m, mp)).unwrap()
    }

    #[test]
    fn sextic_example_has_one_rolle_marking() {
        let a = arr("P < Q < P^2Q < Q < P", 6, 1, 1, 1);
        let got: Vec<Vec<u32>> = rolle_assignments(&a).iter().map(|r| r.counts().to_vec()).collect();
        assert_eq!(got, vec![vec![0, 1, 1, 1, 0]]);
    }

    #[test]
    fn candidates_respect_caps() {
        let a = arr("P < P^2Q^3 < P", 6, 3, 1, 0);
        // R = 6 - 2 - 3 = 1, the middle position holds at most one Rolle copy
        let c = candidate_assignments(&a);
        assert_eq!(c, vec![RolleAssignment::new(vec![0, 1, 0])]);
        assert_eq!(rolle_assignments(&a), c);
    }

    #[test]
    fn negative_rolle_count_has_no_candidates() {
        let a = Arrangement::unchecked(4, 3, 1, 0, vec![super::super::Position::new(2, 1)]);
        assert!(candidate_assignments(&a).is_empty());
    }

    #[test]
    fn high_multiplicity_forces_all_copies() {
        let a = arr("P^3Q^2", 3, 1, 0, 0);
        assert_eq!(rolle_assignments(&a), vec![RolleAssignment::new(vec![2])]);
    }
}
