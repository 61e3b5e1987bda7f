//! Infix polynomial reader: `x^6 - x^2`, `(x-1)^2*(x^2+1)`, `3/2 x^3 + 0.25`.
//!
//! Numbers (integers, decimals) are read exactly. Juxtaposition multiplies,
//! so `6x^5` and `2(x+1)` work. Division is only allowed by constants.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{PolyError, RatPoly, Rational};

pub fn parse_polynomial(text: &str) -> Result<RatPoly, PolyError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let p = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(parser.err("unexpected trailing input"));
    }
    Ok(p)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RatPoly, PolyError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatPoly, PolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = &acc * &rhs;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let rhs = self.unary()?;
                    if rhs.degree() > 0 || rhs.is_zero() {
                        return Err(PolyError::Parse {
                            pos: at,
                            msg: "division only by a nonzero constant".into(),
                        });
                    }
                    acc = acc.scale(&(Rational::one() / rhs.leading()));
                }
                Some(c) if c == b'x' || c == b'(' || c.is_ascii_digit() || c == b'.' => {
                    let rhs = self.power()?;
                    acc = &acc * &rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RatPoly, PolyError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatPoly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected non-negative integer exponent"));
            }
            let e: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| PolyError::Parse {
                    pos: start,
                    msg: "exponent too large".into(),
                })?;
            if e > 64 {
                return Err(PolyError::Parse {
                    pos: start,
                    msg: "exponent too large".into(),
                });
            }
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatPoly, PolyError> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(RatPoly::x())
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(_) => Err(self.err("expected number, 'x' or '('")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<RatPoly, PolyError> {
        let start = self.pos;
        let mut int_part = BigInt::zero();
        let mut digits = 0;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            int_part = int_part * 10 + (self.src[self.pos] - b'0') as u32;
            self.pos += 1;
            digits += 1;
        }
        let mut value = Rational::from_integer(int_part);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let mut scale = BigInt::one();
            let mut frac = BigInt::zero();
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                frac = frac * 10 + (self.src[self.pos] - b'0') as u32;
                scale *= 10;
                self.pos += 1;
                digits += 1;
            }
            value += Rational::new(frac, scale);
        }
        if digits == 0 {
            return Err(PolyError::Parse {
                pos: start,
                msg: "malformed number".into(),
            });
        }
        Ok(RatPoly::constant(value))
    }
}
