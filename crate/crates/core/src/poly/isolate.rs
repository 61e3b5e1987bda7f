//! Certified real-root isolation.
//!
//! Exact path: square-free decomposition, then each square-free factor is
//! isolated. A fast attempt takes float roots from the companion matrix and
//! certifies them with exact sign changes at `f64` endpoints (the interval
//! count must equal the Sturm count, so each interval holds exactly one
//! root). Anything that does not certify falls back to Sturm bisection.
//!
//! Float path: companion roots followed by cluster merging.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::complex::{cluster_roots, roots_complex};
use super::sqfree::yun;
use super::{f64_to_rational, rational_to_f64, PolyError, Polynomial, RatPoly, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealRoot {
    pub location: f64,
    pub multiplicity: u32,
}

/// Real roots with multiplicities plus the number of complex-conjugate pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootProfile {
    pub real_roots: Vec<RealRoot>,
    pub complex_pairs: u32,
    /// Multiplicities are exact (rational input).
    pub exact: bool,
    /// Float path merged roots closer than the cluster threshold.
    pub cluster_ambiguity: bool,
}

impl RootProfile {
    pub fn real_count(&self) -> u32 {
        self.real_roots.iter().map(|r| r.multiplicity).sum()
    }
}

/// Isolating interval `[lo, hi]` for one simple real root; `lo == hi` when
/// the root is rational and was hit exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct IsolatedRoot {
    pub lo: Rational,
    pub hi: Rational,
    pub approx: f64,
}

/// Integer polynomial used for fast exact sign evaluation.
#[derive(Clone)]
pub(crate) struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Same sign as `f` everywhere, unlike the primitive part.
    pub(crate) fn new(f: &RatPoly) -> Self {
        let mut coeffs = f.primitive_integer();
        if f.leading().is_negative() {
            coeffs.iter_mut().for_each(|c| *c = -&*c);
        }
        IntPoly { coeffs }
    }

    /// Sign of `f(x)`, via the homogenized integer sum.
    pub(crate) fn sign_at(&self, x: &Rational) -> i32 {
        let d = self.coeffs.len() - 1;
        let a = x.numer();
        let b = x.denom();
        let mut acc = BigInt::zero();
        // sum c_i a^i b^(d-i), Horner in a with b powers
        let mut bpow = BigInt::one();
        let mut terms: Vec<BigInt> = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            terms.push(bpow.clone());
            bpow *= b;
        }
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            acc = acc * a + c * &terms[d - i];
        }
        match acc.sign() {
            Sign::Plus => 1,
            Sign::Minus => -1,
            Sign::NoSign => 0,
        }
    }
}

/// Sturm sequence `f, f', -rem(f, f'), ...`, each member scaled by a
/// positive factor to keep integer coefficients small.
pub fn sturm_sequence(f: &RatPoly) -> Vec<RatPoly> {
    int_sturm(f)
        .into_iter()
        .map(|p| RatPoly::from_ascending(p.coeffs.into_iter().map(Rational::from_integer).collect()))
        .collect()
}

fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Sturm sequence over the integers: pseudo-remainders with their sign
/// corrected, divided by their content.
fn int_sturm(f: &RatPoly) -> Vec<IntPoly> {
    let first = IntPoly::new(f);
    let second = IntPoly::new(&f.derivative());
    let mut seq = vec![first, second];
    loop {
        let n = seq.len();
        let b = &seq[n - 1].coeffs;
        if b.is_empty() {
            seq.pop();
            break;
        }
        let mut r = seq[n - 2].coeffs.clone();
        let db = b.len() - 1;
        let lb = b[db].clone();
        let mut flips = false;
        while r.len() > db && !r.is_empty() {
            let shift = r.len() - 1 - db;
            let lr = r[r.len() - 1].clone();
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (j, c) in b.iter().enumerate() {
                r[j + shift] -= &lr * c;
            }
            r.pop();
            trim(&mut r);
            flips ^= lb.is_negative();
        }
        if r.is_empty() {
            break;
        }
        // -rem(a, b) has the sign of -r, times sign(lb) per step taken
        let g = r.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let negate = !flips;
        for c in r.iter_mut() {
            *c = &*c / &g;
            if negate {
                *c = -&*c;
            }
        }
        seq.push(IntPoly { coeffs: r });
    }
    seq
}

fn variations(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn variations_at_infinity(seq: &[IntPoly], positive: bool) -> usize {
    variations(seq.iter().map(|p| {
        let d = p.coeffs.len() - 1;
        let s = if p.coeffs[d].is_negative() { -1 } else { 1 };
        if positive || d % 2 == 0 {
            s
        } else {
            -s
        }
    }))
}

fn variations_at(seq: &[IntPoly], x: &Rational) -> usize {
    variations(seq.iter().map(|p| p.sign_at(x)))
}

/// Number of distinct real roots.
pub(crate) fn sturm_total(seq: &[IntPoly]) -> usize {
    variations_at_infinity(seq, false) - variations_at_infinity(seq, true)
}

fn newton_real(coeffs: &[f64], mut x: f64) -> f64 {
    for _ in 0..8 {
        let (mut p, mut dp) = (0.0, 0.0);
        for &c in coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        if dp == 0.0 || p == 0.0 {
            break;
        }
        let step = p / dp;
        let nx = x - step;
        if !nx.is_finite() || step.abs() <= f64::EPSILON * x.abs() {
            if nx.is_finite() {
                x = nx;
            }
            break;
        }
        x = nx;
    }
    x
}

fn fast_isolate(f: &RatPoly, ip: &IntPoly, total: usize, refine_to: f64) -> Option<Vec<IsolatedRoot>> {
    let fl = f.map_to_f64();
    if fl.coeffs().iter().any(|c| !c.is_finite()) {
        return None;
    }
    let mut cand: Vec<f64> = roots_complex(&fl)
        .into_iter()
        .filter(|z| z.im == 0.0)
        .map(|z| newton_real(fl.coeffs(), z.re))
        .collect();
    if cand.len() != total {
        return None;
    }
    cand.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out = Vec::with_capacity(total);
    for (i, &r) in cand.iter().enumerate() {
        let floor = 16.0 * f64::EPSILON * r.abs().max(1.0);
        let mut delta = (0.45 * refine_to).max(floor);
        if i > 0 {
            delta = delta.min((r - cand[i - 1]) / 3.0);
        }
        if i + 1 < cand.len() {
            delta = delta.min((cand[i + 1] - r) / 3.0);
        }
        if delta < floor {
            return None;
        }
        let lo = f64_to_rational(r - delta);
        let hi = f64_to_rational(r + delta);
        let (sl, sh) = (ip.sign_at(&lo), ip.sign_at(&hi));
        if sl == 0 {
            out.push(IsolatedRoot { lo: lo.clone(), hi: lo, approx: r - delta });
        } else if sh == 0 {
            out.push(IsolatedRoot { lo: hi.clone(), hi, approx: r + delta });
        } else if sl != sh {
            out.push(IsolatedRoot { lo, hi, approx: r });
        } else {
            return None;
        }
    }
    Some(out)
}

fn cauchy_bound(f: &RatPoly) -> Rational {
    let lc = f.leading().abs();
    let m = f.coeffs()[..f.degree()]
        .iter()
        .map(|c| c.abs() / &lc)
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    m + Rational::one()
}

fn bisect_isolate(f: &RatPoly, ip: &IntPoly, refine_to: f64) -> Vec<IsolatedRoot> {
    let seq = int_sturm(f);
    let b = cauchy_bound(f);
    let mut stack = vec![(-b.clone(), b)];
    let mut found = Vec::new();
    let two = Rational::from_integer(BigInt::from(2));
    while let Some((lo, hi)) = stack.pop() {
        let c = variations_at(&seq, &lo) - variations_at(&seq, &hi);
        match c {
            0 => {}
            1 => found.push(refine_single(ip, lo, hi, refine_to)),
            _ => {
                // split at a point that is not a root
                let mut split = None;
                for (num, den) in [(1, 2), (1, 3), (2, 3), (5, 11), (6, 11)] {
                    let t = Rational::new(BigInt::from(num), BigInt::from(den));
                    let mid = &lo + (&hi - &lo) * t;
                    if ip.sign_at(&mid) != 0 {
                        split = Some(mid);
                        break;
                    }
                }
                let mid = split.unwrap_or_else(|| (&lo + &hi) / &two);
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    found.sort_by(|a, b| a.lo.cmp(&b.lo));
    found
}

/// Interval `(lo, hi]` holding exactly one root, `f(lo) != 0`.
fn refine_single(ip: &IntPoly, mut lo: Rational, mut hi: Rational, refine_to: f64) -> IsolatedRoot {
    let two = Rational::from_integer(BigInt::from(2));
    if ip.sign_at(&hi) == 0 {
        let v = rational_to_f64(&hi);
        return IsolatedRoot { lo: hi.clone(), hi, approx: v };
    }
    let slo = ip.sign_at(&lo);
    while rational_to_f64(&(&hi - &lo)) > refine_to {
        let mid = (&lo + &hi) / &two;
        let sm = ip.sign_at(&mid);
        if sm == 0 {
            let v = rational_to_f64(&mid);
            return IsolatedRoot { lo: mid.clone(), hi: mid, approx: v };
        }
        if sm == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let approx = rational_to_f64(&((&lo + &hi) / &two));
    IsolatedRoot { lo, hi, approx }
}

/// Isolate the real roots of a square-free rational polynomial, each to an
/// interval no wider than `refine_to` (exact roots get a point interval).
pub fn isolate_real_roots(f: &RatPoly, refine_to: f64) -> Vec<IsolatedRoot> {
    if f.degree() == 0 {
        return Vec::new();
    }
    if f.degree() == 1 {
        let r = -f.coeff(0) / f.coeff(1);
        let v = rational_to_f64(&r);
        return vec![IsolatedRoot { lo: r.clone(), hi: r, approx: v }];
    }
    let seq = int_sturm(f);
    let total = sturm_total(&seq);
    if total == 0 {
        return Vec::new();
    }
    let ip = IntPoly::new(f);
    fast_isolate(f, &ip, total, refine_to).unwrap_or_else(|| bisect_isolate(f, &ip, refine_to))
}

fn bisect_step(ip: &IntPoly, root: &mut IsolatedRoot) {
    if root.lo == root.hi {
        return;
    }
    let two = Rational::from_integer(BigInt::from(2));
    let mid = (&root.lo + &root.hi) / &two;
    let sm = ip.sign_at(&mid);
    if sm == 0 {
        root.lo = mid.clone();
        root.hi = mid;
    } else if sm == ip.sign_at(&root.lo) {
        root.lo = mid;
    } else {
        root.hi = mid;
    }
    if root.approx < rational_to_f64(&root.lo) || root.approx > rational_to_f64(&root.hi) {
        root.approx = rational_to_f64(&((&root.lo + &root.hi) / &two));
    }
}

/// Isolate the real roots of pairwise coprime square-free factors and order
/// them. Returns `(root, factor index)` sorted, with pairwise disjoint
/// intervals.
pub(crate) fn isolate_family(factors: &[RatPoly], refine_to: f64) -> Vec<(IsolatedRoot, usize)> {
    let ints: Vec<IntPoly> = factors.iter().map(IntPoly::new).collect();
    let mut roots: Vec<(IsolatedRoot, usize)> = factors
        .iter()
        .enumerate()
        .flat_map(|(i, f)| isolate_real_roots(f, refine_to).into_iter().map(move |r| (r, i)))
        .collect();
    loop {
        roots.sort_by(|a, b| a.0.lo.cmp(&b.0.lo).then(a.0.hi.cmp(&b.0.hi)));
        let mut overlap = None;
        'scan: for i in 0..roots.len() {
            for j in (i + 1)..roots.len() {
                if roots[j].0.lo <= roots[i].0.hi {
                    overlap = Some((i, j));
                    break 'scan;
                }
            }
        }
        let Some((i, j)) = overlap else { break };
        let (fi, fj) = (roots[i].1, roots[j].1);
        bisect_step(&ints[fi], &mut roots[i].0);
        bisect_step(&ints[fj], &mut roots[j].0);
    }
    roots
}

/// Tolerances for [`isolate_roots_with`].
#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    pub refine_to: f64,
    pub cluster_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            refine_to: 1e-12,
            cluster_tol: 1e-7,
        }
    }
}

/// Real roots with multiplicities and the count of complex pairs.
pub fn isolate_roots(p: &Polynomial, refine_to: f64) -> Result<RootProfile, PolyError> {
    isolate_roots_with(
        p,
        &RootOptions {
            refine_to,
            ..RootOptions::default()
        },
    )
}

pub fn isolate_roots_with(p: &Polynomial, opts: &RootOptions) -> Result<RootProfile, PolyError> {
    if !(opts.refine_to > 0.0) {
        return Err(PolyError::InvalidTolerance(opts.refine_to));
    }
    if p.degree() == 0 {
        return Err(PolyError::ConstantPolynomial);
    }
    let deg = p.degree() as u32;
    match p {
        Polynomial::Exact(f) => {
            let parts = yun(f);
            let factors: Vec<RatPoly> = parts.iter().map(|(g, _)| g.clone()).collect();
            let real_roots: Vec<RealRoot> = isolate_family(&factors, opts.refine_to)
                .into_iter()
                .map(|(r, i)| RealRoot {
                    location: r.approx,
                    multiplicity: parts[i].1,
                })
                .collect();
            let real: u32 = real_roots.iter().map(|r| r.multiplicity).sum();
            Ok(RootProfile {
                real_roots,
                complex_pairs: (deg - real) / 2,
                exact: true,
                cluster_ambiguity: false,
            })
        }
        Polynomial::Float(f) => {
            if !(opts.cluster_tol > 0.0) {
                return Err(PolyError::InvalidTolerance(opts.cluster_tol));
            }
            let roots = roots_complex(f);
            let (clusters, merged) = cluster_roots(&roots, opts.cluster_tol);
            let real_roots: Vec<RealRoot> = clusters
                .iter()
                .filter(|(z, _)| z.im == 0.0)
                .map(|(z, k)| RealRoot {
                    location: z.re,
                    multiplicity: *k,
                })
                .collect();
            let real: u32 = real_roots.iter().map(|r| r.multiplicity).sum();
            Ok(RootProfile {
                real_roots,
                complex_pairs: (deg - real) / 2,
                exact: false,
                cluster_ambiguity: merged,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{from_roots, parse_polynomial, rat, ratio};

    fn exact(text: &str) -> Polynomial {
        Polynomial::Exact(parse_polynomial(text).unwrap())
    }

    #[test]
    fn bisection_with_negative_sturm_members() {
        // the Sturm sequence of x^3 + x - 1 has a member with negative leading coefficient
        let f = parse_polynomial("x^3 + x - 1").unwrap();
        let roots = bisect_isolate(&f, &IntPoly::new(&f), 1e-12);
        assert_eq!(roots.len(), 1);
        assert!((roots[0].approx - 0.682_327_803_828_019_3).abs() < 1e-11);
        let g = parse_polynomial("-x^3 + 2*x").unwrap();
        assert_eq!(bisect_isolate(&g, &IntPoly::new(&g), 1e-12).len(), 3);
    }

    #[test]
    fn example_polynomial_profile() {
        let prof = isolate_roots(&exact("x^6 - x^2"), 1e-12).unwrap();
        let got: Vec<(f64, u32)> = prof.real_roots.iter().map(|r| (r.location, r.multiplicity)).collect();
        assert_eq!(got, vec![(-1.0, 1), (0.0, 2), (1.0, 1)]);
        assert_eq!(prof.complex_pairs, 1);
    }

    #[test]
    fn second_derivative_of_example() {
        let prof = isolate_roots(&exact("30x^4 - 2"), 1e-12).unwrap();
        let r = (1.0f64 / 15.0).powf(0.25);
        assert_eq!(prof.real_roots.len(), 2);
        assert!((prof.real_roots[0].location + r).abs() < 1e-12);
        assert!((prof.real_roots[1].location - r).abs() < 1e-12);
        assert!(prof.real_roots.iter().all(|x| x.multiplicity == 1));
        assert_eq!(prof.complex_pairs, 1);
    }

    #[test]
    fn no_real_roots() {
        let prof = isolate_roots(&exact("x^2 + 1"), 1e-12).unwrap();
        assert!(prof.real_roots.is_empty());
        assert_eq!(prof.complex_pairs, 1);
    }

    #[test]
    fn bad_tolerance_and_constant() {
        assert_eq!(
            isolate_roots(&exact("x"), 0.0).unwrap_err(),
            PolyError::InvalidTolerance(0.0)
        );
        assert_eq!(
            isolate_roots(&exact("5"), 1e-9).unwrap_err(),
            PolyError::ConstantPolynomial
        );
    }

    #[test]
    fn sturm_fallback_separates_close_roots() {
        // roots 1 and 1 + 2^-60: too close for the float attempt
        let eps = Rational::new(BigInt::one(), BigInt::one() << 60usize);
        let f = from_roots(&[(rat(1), 1), (rat(1) + eps, 1), (rat(3), 1)]);
        let roots = isolate_real_roots(&f, 1e-12);
        assert_eq!(roots.len(), 3);
        assert!(roots[0].hi <= roots[1].lo);
        assert!(roots[0].lo <= rat(1) && rat(1) <= roots[0].hi);
    }

    #[test]
    fn intervals_contain_the_roots() {
        let f = parse_polynomial("x^3 - 2").unwrap();
        let roots = isolate_real_roots(&f, 1e-12);
        assert_eq!(roots.len(), 1);
        let r = &roots[0];
        assert!(rational_to_f64(&(&r.hi - &r.lo)) <= 1e-12);
        assert!((r.approx - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn family_orders_roots_across_factors() {
        let a = parse_polynomial("x^2 - 2").unwrap();
        let b = parse_polynomial("x - 7/5").unwrap();
        let fam = isolate_family(&[a, b], 1e-12);
        let order: Vec<usize> = fam.iter().map(|(_, i)| *i).collect();
        assert_eq!(order, vec![0, 1, 0]);
        assert_eq!(fam[1].0.lo, ratio(7, 5));
    }

    #[test]
    fn float_path_flags_clusters() {
        let f = Polynomial::Float(parse_polynomial("(x-1)^2*(x+1)").unwrap().map_to_f64());
        let prof = isolate_roots(&f, 1e-12).unwrap();
        assert!(prof.cluster_ambiguity);
        assert_eq!(prof.real_roots.len(), 2);
        assert_eq!(prof.real_roots[1].multiplicity, 2);
    }
}
