//! Univariate polynomials over exact rationals or `f64`.
//!
//! Coefficients are stored in ascending order of power internally; the public
//! constructors and serializers that deal in "leading to trailing" order say
//! so in their names.

mod complex;
mod isolate;
mod parse;
mod sqfree;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use complex::{cluster_roots, roots_complex, ComplexRoot};
pub use isolate::{
    isolate_real_roots, isolate_roots, isolate_roots_with, sturm_sequence, IsolatedRoot, RealRoot,
    RootOptions, RootProfile,
};
pub(crate) use isolate::isolate_family;
pub(crate) use sqfree::yun;
pub use parse::parse_polynomial;
pub use sqfree::{coprime_basis, square_free_decompose, squarefree_part};
pub(crate) use sqfree::coprime_basis_tagged;

/// Exact rational scalar used throughout the crate.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("derivative order {order} exceeds degree {degree}")]
    InvalidOrder { order: usize, degree: usize },
    #[error("operation requires exact rational coefficients")]
    ExactArithmeticRequired,
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("polynomial must have degree >= 1")]
    ConstantPolynomial,
    #[error("roots closer than the cluster threshold cannot be told apart on the float path")]
    ClusterAmbiguity,
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Scalar field the generic polynomial routines work over.
pub trait Coeff:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Coeff for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coeff for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

/// Nearest-ish `f64` for a big rational, robust to numerators and
/// denominators that individually overflow `f64`.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift >= 0 {
        r.numer() / (r.denom() << (shift as usize))
    } else {
        (r.numer() << ((-shift) as usize)) / r.denom()
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Exact rational equal to the given finite `f64`.
pub fn f64_to_rational(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Dyadic rational `round(x * 2^bits) / 2^bits`.
pub fn dyadic(x: f64, bits: u32) -> Rational {
    let scale = 2f64.powi(bits as i32);
    let k = (x * scale).round();
    Rational::new(
        f64_to_rational(k).to_integer(),
        BigInt::one() << (bits as usize),
    )
}

/// Dense univariate polynomial, coefficients in ascending powers.
/// The zero polynomial has no coefficients.
#[derive(Clone, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

pub type RatPoly = Poly<Rational>;
pub type FloatPoly = Poly<f64>;

impl<T: Coeff> Poly<T> {
    pub fn from_ascending(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_leading(coeffs: Vec<T>) -> Self {
        let mut c = coeffs;
        c.reverse();
        Self::from_ascending(c)
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::from_ascending(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly {
            coeffs: vec![T::zero(), T::one()],
        }
    }

    /// `x - r`
    pub fn linear_root(r: T) -> Self {
        Poly {
            coeffs: vec![-r, T::one()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> T {
        self.coeffs.get(power).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs_leading(&self) -> Vec<T> {
        self.coeffs.iter().rev().cloned().collect()
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * T::from_i64(i as i64))
            .collect();
        Self::from_ascending(c)
    }

    /// `s`-th derivative. Errors when `s` exceeds the degree.
    pub fn nth_derivative(&self, s: usize) -> Result<Self, PolyError> {
        if s > self.degree() {
            return Err(PolyError::InvalidOrder {
                order: s,
                degree: self.degree(),
            });
        }
        let mut p = self.clone();
        for _ in 0..s {
            p = p.derivative();
        }
        Ok(p)
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::from_ascending(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading();
        Self::from_ascending(self.coeffs.iter().map(|c| c.clone() / lc.clone()).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(T::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division: `self = q * d + r`, `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.coeffs.len() < d.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dl = d.leading();
        let dd = d.degree();
        let mut quot = vec![T::zero(); self.coeffs.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd].clone() / dl.clone();
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] = rem[i + j].clone() - c.clone() * dc.clone();
                }
            }
            rem[i + dd] = T::zero();
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::from_ascending(quot), Self::from_ascending(rem))
    }

    /// Monic gcd by the Euclidean algorithm. Exact only over exact fields.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn map_to_f64(&self) -> FloatPoly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.to_f64()).collect(),
        }
    }

    /// Translate so the coefficient of `x^{n-1}` vanishes, returning the
    /// shifted polynomial `p(x - a_{n-1}/(n a_n))` and the shift applied.
    pub fn depressed(&self) -> (Self, T) {
        let n = self.degree();
        if n == 0 {
            return (self.clone(), T::zero());
        }
        let shift = -(self.coeff(n - 1) / (self.leading() * T::from_i64(n as i64)));
        (self.compose_shift(&shift), shift)
    }

    /// `p(x + a)`.
    pub fn compose_shift(&self, a: &T) -> Self {
        let mut acc = Self::zero();
        let lin = Poly {
            coeffs: vec![a.clone(), T::one()],
        };
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &Self::constant(c.clone());
        }
        acc
    }
}

impl<'a, T: Coeff> Add<&'a Poly<T>> for &'a Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Poly::from_ascending(c)
    }
}

impl<'a, T: Coeff> Sub<&'a Poly<T>> for &'a Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        Poly::from_ascending(c)
    }
}

impl<'a, T: Coeff> Mul<&'a Poly<T>> for &'a Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::from_ascending(c)
    }
}

impl<T: Coeff> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::from_ascending(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl RatPoly {
    /// Primitive integer polynomial with the same roots (positive leading
    /// coefficient).
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        use num_integer::Integer;
        if self.is_zero() {
            return Vec::new();
        }
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            if !c.denom().is_one() {
                lcm = lcm.lcm(c.denom());
            }
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        let sign = if ints.last().unwrap().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        if g.is_one() {
            return ints.into_iter().map(|c| c * &sign).collect();
        }
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    /// Sign of `p(x)` at a rational point.
    pub fn sign_at(&self, x: &Rational) -> i32 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }
}

fn fmt_terms<T, F>(coeffs: &[T], f: &mut fmt::Formatter<'_>, render: F) -> fmt::Result
where
    F: Fn(&T) -> Option<(bool, String)>,
{
    // render yields (negative, |c| as text) or None for zero
    let mut first = true;
    for (power, c) in coeffs.iter().enumerate().rev() {
        let Some((neg, mag)) = render(c) else { continue };
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        first = false;
        let unit = mag == "1";
        match power {
            0 => write!(f, "{mag}")?,
            1 if unit => write!(f, "x")?,
            1 => write!(f, "{mag}*x")?,
            _ if unit => write!(f, "x^{power}")?,
            _ => write!(f, "{mag}*x^{power}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(&self.coeffs, f, |c| {
            if c.is_zero() {
                None
            } else {
                let mag = c.abs();
                let text = if mag.is_integer() {
                    mag.numer().to_string()
                } else {
                    format!("{}/{}", mag.numer(), mag.denom())
                };
                Some((c.is_negative(), text))
            }
        })
    }
}

impl fmt::Display for FloatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(&self.coeffs, f, |c| {
            if *c == 0.0 {
                None
            } else {
                Some((*c < 0.0, format!("{}", c.abs())))
            }
        })
    }
}

impl<T: Coeff> fmt::Debug for Poly<T>
where
    Poly<T>: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

/// A polynomial with either exact rational or floating coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum Polynomial {
    Exact(RatPoly),
    Float(FloatPoly),
}

impl Polynomial {
    pub fn degree(&self) -> usize {
        match self {
            Polynomial::Exact(p) => p.degree(),
            Polynomial::Float(p) => p.degree(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Polynomial::Exact(_))
    }

    /// `s`-th derivative, same coefficient kind.
    pub fn derivative(&self, s: usize) -> Result<Polynomial, PolyError> {
        match self {
            Polynomial::Exact(p) => p.nth_derivative(s).map(Polynomial::Exact),
            Polynomial::Float(p) => p.nth_derivative(s).map(Polynomial::Float),
        }
    }

    pub fn to_float(&self) -> FloatPoly {
        match self {
            Polynomial::Exact(p) => p.map_to_f64(),
            Polynomial::Float(p) => p.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&RatPoly> {
        match self {
            Polynomial::Exact(p) => Some(p),
            Polynomial::Float(_) => None,
        }
    }

    pub fn monic(&self) -> Polynomial {
        match self {
            Polynomial::Exact(p) => Polynomial::Exact(p.monic()),
            Polynomial::Float(p) => Polynomial::Float(p.monic()),
        }
    }

    /// Coefficients leading to trailing as `f64`.
    pub fn coeffs_leading_f64(&self) -> Vec<f64> {
        self.to_float().coeffs_leading()
    }

    /// Coefficients leading to trailing, exact rationals as `a/b` text,
    /// or `None` on the float path.
    pub fn coeffs_leading_exact(&self) -> Option<Vec<String>> {
        self.as_exact().map(|p| {
            p.coeffs_leading()
                .iter()
                .map(|c| {
                    if c.is_integer() {
                        c.numer().to_string()
                    } else {
                        format!("{}/{}", c.numer(), c.denom())
                    }
                })
                .collect()
        })
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polynomial::Exact(p) => write!(f, "{p}"),
            Polynomial::Float(p) => write!(f, "{p}"),
        }
    }
}

/// Integer-coefficient helper: `r(x) = prod (x - root)^mult`.
pub fn from_roots(roots: &[(Rational, u32)]) -> RatPoly {
    roots.iter().fold(RatPoly::constant(Rational::one()), |acc, (r, k)| {
        &acc * &RatPoly::linear_root(r.clone()).pow(*k)
    })
}

/// `int(n)` as a rational; test and fixture shorthand.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` as a rational.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> RatPoly {
        parse_polynomial(text).unwrap()
    }

    #[test]
    fn derivative_of_example_polynomial() {
        let f = p("x^6 - x^2");
        assert_eq!(f.nth_derivative(1).unwrap(), p("6x^5 - 2x"));
        assert_eq!(f.nth_derivative(2).unwrap(), p("30x^4 - 2"));
        assert_eq!(f.nth_derivative(3).unwrap(), p("120x^3"));
    }

    #[test]
    fn derivative_of_pure_power() {
        // (x - 2)^5, s = 2  ->  20 (x - 2)^3
        let f = from_roots(&[(rat(2), 5)]);
        let d = f.nth_derivative(2).unwrap();
        assert_eq!(d, from_roots(&[(rat(2), 3)]).scale(&rat(20)));
    }

    #[test]
    fn derivative_order_too_large() {
        let err = p("x^2 + 1").nth_derivative(3).unwrap_err();
        assert_eq!(err, PolyError::InvalidOrder { order: 3, degree: 2 });
    }

    #[test]
    fn div_rem_and_gcd() {
        let a = p("(x-1)^2*(x+2)");
        let b = p("(x-1)*(x+3)");
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert_eq!(a.gcd(&b), p("x - 1"));
    }

    #[test]
    fn depression_removes_subleading_term() {
        let (d, shift) = p("x^3 + 3x^2 + 1").depressed();
        assert_eq!(d.coeff(2), rat(0));
        assert_eq!(shift, rat(-1));
    }

    #[test]
    fn display_round_trips_through_parser() {
        for text in ["x^6 - x^2", "3/2*x^3 - x + 7", "-x^2 + 1/3", "0"] {
            let f = p(text);
            assert_eq!(p(&f.to_string()), f);
        }
    }

    #[test]
    fn dyadic_rounding() {
        assert_eq!(dyadic(0.75, 4), ratio(3, 4));
        assert_eq!(dyadic(1.0 / 3.0, 2), ratio(1, 4));
    }
}
