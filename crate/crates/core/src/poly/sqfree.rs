//! Square-free decomposition (Yun) and gcd-free bases over the rationals.
//!
//! A modular gcd check short-circuits the common case where the inputs are
//! already coprime: if `gcd(a mod p, b mod p)` is constant and `p` does not
//! divide either leading coefficient, the rational gcd is constant too.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{PolyError, Polynomial, RatPoly, Rational};

const PRIME: u64 = 4_294_967_291;

fn reduce_mod(coeffs: &[BigInt]) -> Vec<u64> {
    let p = BigInt::from(PRIME);
    coeffs
        .iter()
        .map(|c| {
            let r = c % &p;
            let r = if r < BigInt::zero() { r + &p } else { r };
            r.to_u64().unwrap()
        })
        .collect()
}

fn inv_mod(a: u64) -> u64 {
    // Fermat
    let mut result = 1u64;
    let mut base = a % PRIME;
    let mut e = PRIME - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % PRIME;
        }
        base = base * base % PRIME;
        e >>= 1;
    }
    result
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a <- a mod b
        let inv = inv_mod(*b.last().unwrap());
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let c = a.last().unwrap() * inv % PRIME;
            for (j, bc) in b.iter().enumerate() {
                a[shift + j] = (a[shift + j] + PRIME - c * bc % PRIME) % PRIME;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// True when `a` and `b` are certainly coprime over Q. `false` means
/// "unknown", not "shares a factor".
pub(crate) fn certainly_coprime(a: &RatPoly, b: &RatPoly) -> bool {
    if a.degree() == 0 || b.degree() == 0 {
        return true;
    }
    let ai = a.primitive_integer();
    let bi = b.primitive_integer();
    let am = reduce_mod(&ai);
    let bm = reduce_mod(&bi);
    if am.last() == Some(&0) || bm.last() == Some(&0) {
        return false;
    }
    gcd_degree_mod(am, bm) == 0
}

/// Square-free decomposition `p = c * prod f_i^{e_i}` with monic, square-free,
/// pairwise coprime `f_i` and strictly increasing exponents. Constant factors
/// are dropped.
pub fn square_free_decompose(p: &Polynomial) -> Result<Vec<(RatPoly, u32)>, PolyError> {
    match p {
        Polynomial::Exact(f) => Ok(yun(f)),
        Polynomial::Float(_) => Err(PolyError::ExactArithmeticRequired),
    }
}

/// Integer polynomials, ascending, no trailing zeros.
type IntCoeffs = Vec<BigInt>;

fn trim_int(v: &mut IntCoeffs) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Divide by the content, leading coefficient positive.
fn primitive(mut v: IntCoeffs) -> IntCoeffs {
    trim_int(&mut v);
    let Some(last) = v.last() else { return v };
    let mut g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if last.is_negative() {
        g = -g;
    }
    v.iter().map(|c| c / &g).collect()
}

fn derivative_int(v: &[BigInt]) -> IntCoeffs {
    v.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

/// Pseudo-remainder of `a` by `b`, made primitive.
fn prem_primitive(a: &[BigInt], b: &[BigInt]) -> IntCoeffs {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let lr = r[r.len() - 1].clone();
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (j, c) in b.iter().enumerate() {
            r[j + shift] -= &lr * c;
        }
        r.pop();
        trim_int(&mut r);
    }
    primitive(r)
}

/// Primitive gcd by the primitive remainder sequence.
fn gcd_int(a: &[BigInt], b: &[BigInt]) -> IntCoeffs {
    let (mut a, mut b) = (primitive(a.to_vec()), primitive(b.to_vec()));
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = prem_primitive(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// `a / b` for a primitive divisor `b` of `a`; the quotient is integral by
/// Gauss's lemma.
fn div_exact_int(a: &[BigInt], b: &[BigInt]) -> IntCoeffs {
    let mut r = a.to_vec();
    trim_int(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return Vec::new();
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = &r[i + db] / &b[db];
        for (j, bc) in b.iter().enumerate() {
            r[i + j] -= &c * bc;
        }
        q[i] = c;
    }
    debug_assert!(r.iter().all(|c| c.is_zero()), "inexact division");
    q
}

fn int_coeffs(f: &RatPoly) -> IntCoeffs {
    let mut v = f.primitive_integer();
    trim_int(&mut v);
    v
}

fn monic_from_int(v: &[BigInt]) -> RatPoly {
    let lead = v.last().expect("nonzero").clone();
    RatPoly::from_ascending(v.iter().map(|c| Rational::new(c.clone(), lead.clone())).collect())
}

/// Monic gcd over Q, computed on primitive integer polynomials.
pub(crate) fn gcd_exact(a: &RatPoly, b: &RatPoly) -> RatPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    monic_from_int(&gcd_int(&int_coeffs(a), &int_coeffs(b)))
}

pub(crate) fn yun(f: &RatPoly) -> Vec<(RatPoly, u32)> {
    if f.degree() == 0 {
        return Vec::new();
    }
    let df = f.derivative();
    if certainly_coprime(f, &df) {
        return vec![(f.monic(), 1)];
    }
    let fi = int_coeffs(f);
    let dfi = derivative_int(&fi);
    let a0 = gcd_int(&fi, &dfi);
    let mut b = div_exact_int(&fi, &a0);
    let c = div_exact_int(&dfi, &a0);
    let sub = |x: &[BigInt], y: &[BigInt]| {
        let mut out: IntCoeffs = (0..x.len().max(y.len()))
            .map(|i| x.get(i).cloned().unwrap_or_default() - y.get(i).cloned().unwrap_or_default())
            .collect();
        trim_int(&mut out);
        out
    };
    let mut d = sub(&c, &derivative_int(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while b.len() > 1 {
        let a = if d.is_empty() { b.clone() } else { gcd_int(&b, &d) };
        if a.len() > 1 {
            out.push((monic_from_int(&a), i));
        }
        b = div_exact_int(&b, &a);
        let c = if d.is_empty() { Vec::new() } else { div_exact_int(&d, &a) };
        d = sub(&c, &derivative_int(&b));
        i += 1;
    }
    out
}

/// Product of the distinct irreducible factors of `f`, monic.
pub fn squarefree_part(f: &RatPoly) -> RatPoly {
    yun(f)
        .into_iter()
        .fold(RatPoly::constant(Rational::one()), |acc, (g, _)| &acc * &g)
}

/// Refine monic square-free polynomials into a pairwise coprime family whose
/// products reproduce every input.
pub fn coprime_basis(inputs: &[RatPoly]) -> Vec<RatPoly> {
    coprime_basis_tagged(inputs).into_iter().map(|(b, _)| b).collect()
}

/// As [`coprime_basis`], each element paired with the indices of the inputs
/// it divides. The elements tagged with `i` multiply to input `i`.
pub(crate) fn coprime_basis_tagged(inputs: &[RatPoly]) -> Vec<(RatPoly, Vec<usize>)> {
    let mut basis: Vec<(RatPoly, Vec<usize>)> = inputs
        .iter()
        .enumerate()
        .filter(|(_, f)| f.degree() > 0)
        .map(|(i, f)| (f.monic(), vec![i]))
        .collect();
    'outer: loop {
        for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                if certainly_coprime(&basis[i].0, &basis[j].0) {
                    continue;
                }
                let g = gcd_exact(&basis[i].0, &basis[j].0);
                if g.degree() == 0 {
                    continue;
                }
                let (bj, tj) = basis.remove(j);
                let (bi, ti) = basis.remove(i);
                let mut both = ti.clone();
                both.extend(tj.iter().copied());
                both.sort_unstable();
                both.dedup();
                for (f, tags) in [(bi.div_rem(&g).0, ti), (bj.div_rem(&g).0, tj), (g, both)] {
                    if f.degree() > 0 {
                        basis.push((f.monic(), tags));
                    }
                }
                continue 'outer;
            }
        }
        break;
    }
    basis
}
