//! Random exact polynomials for the soundness sweep. Several families are
//! mixed so that coincidences between roots of `P` and `P^(s)` and
//! multiple roots of either occur with positive frequency.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;

use crate::poly::{RatPoly, Rational};

fn small_rational<R: Rng>(rng: &mut R, num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(-num..=num)), BigInt::from(rng.gen_range(1..=den)))
}

fn nonzero_rational<R: Rng>(rng: &mut R, num: i64, den: i64) -> Rational {
    loop {
        let r = small_rational(rng, num, den);
        if !r.is_zero() {
            return r;
        }
    }
}

/// Dense polynomial with small rational coefficients.
fn dense<R: Rng>(rng: &mut R, n: usize) -> RatPoly {
    let mut c: Vec<Rational> = (0..n).map(|_| small_rational(rng, 9, 4)).collect();
    c.push(nonzero_rational(rng, 3, 1));
    RatPoly::from_ascending(c)
}

/// Product of linear factors over a small grid and irreducible quadratics.
fn roots_product<R: Rng>(rng: &mut R, n: usize) -> RatPoly {
    let mut acc = RatPoly::constant(Rational::one());
    let mut deg = 0;
    while deg < n {
        let left = n - deg;
        if left >= 2 && rng.gen_bool(0.35) {
            let a = small_rational(rng, 4, 2);
            let b = Rational::new(BigInt::from(rng.gen_range(1..=4)), BigInt::from(rng.gen_range(1..=4)));
            acc = &acc * &RatPoly::from_ascending(vec![&a * &a + b, -(&a + &a), Rational::one()]);
            deg += 2;
        } else {
            let k = rng.gen_range(1..=left.min(4));
            acc = &acc * &RatPoly::linear_root(small_rational(rng, 4, 2)).pow(k as u32);
            deg += k;
        }
    }
    acc
}

/// `s`-fold antiderivative of a product of roots, plus a small polynomial
/// of degree below `s` (often zero).
fn antiderivative<R: Rng>(rng: &mut R, n: usize, s: usize) -> RatPoly {
    let q = roots_product(rng, n - s);
    let mut p = q;
    for _ in 0..s {
        let mut c = vec![Rational::zero()];
        c.extend(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(i, a)| a / Rational::from_integer(BigInt::from(i as i64 + 1))),
        );
        p = RatPoly::from_ascending(c);
    }
    let lower: Vec<Rational> = (0..s)
        .map(|_| {
            if rng.gen_bool(0.5) {
                Rational::zero()
            } else {
                small_rational(rng, 4, 3)
            }
        })
        .collect();
    &p + &RatPoly::from_ascending(lower)
}

/// `(x - r)^k` times a dense cofactor.
fn common_root<R: Rng>(rng: &mut R, n: usize) -> RatPoly {
    let k = rng.gen_range(1..=n.min(4));
    let head = RatPoly::linear_root(small_rational(rng, 2, 2)).pow(k as u32);
    if k == n {
        return head;
    }
    &head * &dense(rng, n - k)
}

/// One random degree-`n` polynomial aimed at derivative order `s`.
pub fn sample_polynomial<R: Rng>(rng: &mut R, n: usize, s: usize) -> RatPoly {
    match rng.gen_range(0..8) {
        0..=2 => dense(rng, n),
        3 | 4 => roots_product(rng, n),
        5 | 6 => antiderivative(rng, n, s),
        _ => common_root(rng, n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn degrees_are_exact() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 2..=6 {
            for s in 1..n {
                for _ in 0..200 {
                    assert_eq!(sample_polynomial(&mut rng, n, s).degree(), n);
                }
            }
        }
    }
}
