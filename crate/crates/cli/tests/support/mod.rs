//! Oracles that do not go through the enumerator.
//!
//! `sample_cubic` draws exact cubics from families rich in coincidences;
//! extracting them gives the set of arrangements that actually occur.
//! `first_derivative_obstruction` is a sign argument for `s = 1`: between
//! consecutive critical points `P` is strictly monotone, so the roots of
//! `P` in each gap are fixed by the signs of the critical values. When no
//! choice of signs reproduces the chain, no real polynomial has it.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use rootchain::arrangement::{extract, Arrangement};
use rootchain::poly::{Polynomial, RatPoly, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn grid<R: Rng>(rng: &mut R) -> Rational {
    const G: [(i64, i64); 9] = [(-2, 1), (-1, 1), (-1, 2), (-1, 3), (0, 1), (1, 3), (1, 2), (1, 1), (2, 1)];
    let (n, d) = G[rng.gen_range(0..G.len())];
    q(n, d)
}

fn positive<R: Rng>(rng: &mut R) -> Rational {
    const G: [(i64, i64); 5] = [(1, 16), (1, 4), (1, 1), (9, 4), (4, 1)];
    let (n, d) = G[rng.gen_range(0..G.len())];
    q(n, d)
}

fn lin(r: &Rational) -> RatPoly {
    RatPoly::from_ascending(vec![-r.clone(), Rational::one()])
}

fn quad(a: &Rational, b: &Rational) -> RatPoly {
    RatPoly::from_ascending(vec![a * a + b, -(a + a), Rational::one()])
}

/// `int_0^x f`.
fn integrate(f: &RatPoly) -> RatPoly {
    let mut c = vec![Rational::zero()];
    c.extend(
        f.coeffs()
            .iter()
            .enumerate()
            .map(|(i, a)| a / Rational::from_integer(BigInt::from(i as i64 + 1))),
    );
    RatPoly::from_ascending(c)
}

/// Random exact cubic.
pub fn sample_cubic<R: Rng>(rng: &mut R) -> RatPoly {
    match rng.gen_range(0..5) {
        0 => &(&lin(&grid(rng)) * &lin(&grid(rng))) * &lin(&grid(rng)),
        1 => &lin(&grid(rng)) * &quad(&grid(rng), &positive(rng)),
        2 | 3 => {
            // P' = 3 (x - a)(x - b) or 3 ((x - a)^2 + d), shifted so that
            // P often vanishes at a critical point
            let a = grid(rng);
            let deriv = if rng.gen_bool(0.5) {
                &lin(&a) * &lin(&grid(rng))
            } else {
                quad(&a, &positive(rng))
            };
            let f = integrate(&deriv.scale(&q(3, 1)));
            let c = match rng.gen_range(0..3) {
                0 => -f.eval(&a),
                1 => grid(rng),
                _ => -f.eval(&a) + grid(rng) * q(1, 8),
            };
            &f + &RatPoly::constant(c)
        }
        _ => {
            let mut c: Vec<Rational> = (0..3).map(|_| q(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect();
            c.push(Rational::one());
            RatPoly::from_ascending(c)
        }
    }
}

/// Cubic with three real roots, often coincident.
pub fn hyperbolic_cubic<R: Rng>(rng: &mut R) -> RatPoly {
    let root = |rng: &mut R| {
        if rng.gen_bool(0.5) {
            grid(rng)
        } else {
            q(rng.gen_range(-1000..=1000), 500)
        }
    };
    let (a, b) = (root(rng), root(rng));
    let c = match rng.gen_range(0..4) {
        0 => a.clone(),
        // the double root of P' is (a + b + c) / 3 = a when c = 2a - b
        1 => &a + &a - &b,
        _ => root(rng),
    };
    &(&lin(&a) * &lin(&b)) * &lin(&c)
}

/// `x^3 + p x + c` over a grid of `(p, c)`, with the discriminant curve
/// `p = -3a^2, c = 2a^3` and `p = 0` sampled on purpose.
pub fn depressed_cubic<R: Rng>(rng: &mut R) -> RatPoly {
    let (p, c) = match rng.gen_range(0..4) {
        0 => {
            let a = q(rng.gen_range(-8..=8), 4);
            (-(&a * &a) * q(3, 1), &a * &a * &a * q(2, 1))
        }
        1 => (Rational::zero(), q(rng.gen_range(-16..=16), 8)),
        _ => (q(rng.gen_range(-40..=40), 8), q(rng.gen_range(-40..=40), 8)),
    };
    RatPoly::from_ascending(vec![c, p, Rational::zero(), Rational::one()])
}

/// `x^4 + a x^2 + b x + c` over a grid, with families that put a root of
/// `P` on a root `±k` of `P'' = 12 x^2 + 2a` or give `P` a double root.
pub fn depressed_quartic<R: Rng>(rng: &mut R) -> RatPoly {
    let x4 = |a: Rational, b: Rational, c: Rational| {
        RatPoly::from_ascending(vec![c, b, a, Rational::zero(), Rational::one()])
    };
    match rng.gen_range(0..4) {
        0 => {
            let k = q(rng.gen_range(0..=6), 4);
            let a = -(&k * &k) * q(6, 1);
            let b = q(rng.gen_range(-12..=12), 4);
            let k = if rng.gen_bool(0.5) { k } else { -k };
            let c = -(k.pow(4) + &a * &k * &k + &b * &k);
            x4(a, b, c)
        }
        1 => {
            // (x - r)^2 (x^2 + 2 r x + d)
            let r = q(rng.gen_range(-6..=6), 4);
            let d = q(rng.gen_range(-12..=12), 4);
            let f = &lin(&r).pow(2) * &RatPoly::from_ascending(vec![d, &r + &r, Rational::one()]);
            debug_assert!(f.coeff(3).is_zero());
            f
        }
        _ => x4(
            q(rng.gen_range(-24..=24), 4),
            q(rng.gen_range(-24..=24), 4),
            q(rng.gen_range(-24..=24), 4),
        ),
    }
}

/// Arrangements of `(P, P^(s))` observed over `samples` draws of `sample`,
/// keyed by the number `m` of complex pairs of `P`.
pub fn observe<R: Rng>(
    rng: &mut R,
    samples: usize,
    s: u32,
    mut sample: impl FnMut(&mut R) -> RatPoly,
) -> BTreeMap<u32, BTreeSet<String>> {
    let mut out: BTreeMap<u32, BTreeSet<String>> = BTreeMap::new();
    for _ in 0..samples {
        let p = Polynomial::Exact(sample(rng));
        let ext = extract(&p, s).expect("exact extraction");
        out.entry(ext.arrangement.m).or_default().insert(ext.arrangement.to_string());
    }
    out
}

/// Arrangements of `(P, P')` observed over `samples` random cubics, keyed
/// by the number `m` of complex pairs of `P`.
pub fn cubic_oracle<R: Rng>(rng: &mut R, samples: usize) -> BTreeMap<u32, BTreeSet<String>> {
    observe(rng, samples, 1, sample_cubic)
}

/// `None` when the sign argument allows the chain, otherwise why not.
/// Only meaningful for `s = 1`.
pub fn first_derivative_obstruction(arr: &Arrangement) -> Option<String> {
    assert_eq!(arr.s, 1);
    let pos = arr.positions();
    for (i, p) in pos.iter().enumerate() {
        if p.q > 0 && p.p > 0 && p.p != p.q + 1 {
            return Some(format!("position {i}: a root of P at a zero of order {} of P' has multiplicity {}", p.q, p.q + 1));
        }
        if p.q == 0 && p.p > 1 {
            return Some(format!("position {i}: a multiple root of P is a zero of P'"));
        }
    }
    let crit: Vec<usize> = (0..pos.len()).filter(|&i| pos[i].q > 0).collect();
    let k = crit.len();
    // simple roots of P in each gap between critical points, ends included
    let mut gap_roots = vec![0u32; k + 1];
    let mut gap = 0;
    for p in pos {
        if p.q > 0 {
            gap += 1;
        } else {
            gap_roots[gap] += 1;
        }
    }
    if let Some(g) = gap_roots.iter().position(|&r| r > 1) {
        return Some(format!("gap {g} holds {} roots of P where P is monotone", gap_roots[g]));
    }
    // direction of P on each gap: increasing on the right end, flipping at
    // critical points of odd order
    let mut dir = vec![1i32; k + 1];
    for j in (0..k).rev() {
        dir[j] = if pos[crit[j]].q % 2 == 1 { -dir[j + 1] } else { dir[j + 1] };
    }
    if k == 0 {
        return (gap_roots[0] != 1).then(|| "P is monotone, so it has exactly one real root".to_string());
    }
    let free: Vec<usize> = (0..k).filter(|&j| pos[crit[j]].p == 0).collect();
    'signs: for mask in 0u32..(1 << free.len()) {
        let mut sign = vec![0i32; k];
        for (b, &j) in free.iter().enumerate() {
            sign[j] = if mask >> b & 1 == 1 { 1 } else { -1 };
        }
        // left end: from -dir * infinity to the first critical value
        let left = u32::from(sign[0] == dir[0]);
        if left != gap_roots[0] {
            continue;
        }
        for j in 0..k - 1 {
            let (a, b, d) = (sign[j], sign[j + 1], dir[j + 1]);
            if a == 0 && b == 0 || d * (b - a) < 0 {
                continue 'signs;
            }
            if u32::from(a * b < 0) != gap_roots[j + 1] {
                continue 'signs;
            }
        }
        let right = u32::from(sign[k - 1] == -dir[k]);
        if right == gap_roots[k] {
            return None;
        }
    }
    Some("no signs of the critical values give this chain".into())
}
