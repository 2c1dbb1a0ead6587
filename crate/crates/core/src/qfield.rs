//! Exact arithmetic in the field of rational functions of the deformation
//! parameter `q`, with integer coefficients and Laurent exponents.
//!
//! A [`RatFunc`] is stored as `q^shift * num(q) / den(q)` where `num` and
//! `den` are integer polynomials.  Keeping the Laurent part in a single
//! power-of-q shift keeps gcd computation in ordinary polynomials.  The
//! representation is fully normalized, so equality of values is equality of
//! representations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense integer polynomial in `q`; `coeffs[i]` multiplies `q^i`.
/// Invariant: no trailing zero coefficient (zero = empty vector).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut p = IntPoly { coeffs: vec![c] };
        p.trim();
        p
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        let mut p = IntPoly { coeffs };
        p.trim();
        p
    }

    /// The monomial q^k for k >= 0.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = BigInt::one();
        IntPoly { coeffs }
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    /// Number of leading q factors, i.e. the lowest exponent present.
    fn q_valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0)
    }

    fn shift_down(&self, k: usize) -> Self {
        IntPoly::from_coeffs(self.coeffs[k..].to_vec())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = vec![BigInt::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[i] += c;
        }
        IntPoly::from_coeffs(coeffs)
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        IntPoly::from_coeffs(coeffs)
    }

    fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = gcd_int(&g, c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Primitive part with positive leading coefficient.
    fn primitive(&self) -> (Self, BigInt) {
        if self.is_zero() {
            return (IntPoly::zero(), BigInt::one());
        }
        let mut c = self.content();
        if self.leading().is_negative() {
            c = -c;
        }
        let p = IntPoly {
            coeffs: self.coeffs.iter().map(|x| x / &c).collect(),
        };
        (p, c)
    }

    /// Pseudo-remainder of self by other (other nonzero).
    fn pseudo_rem(&self, other: &Self) -> Self {
        let mut r = self.clone();
        let d = other.degree();
        let lc = other.leading();
        while !r.is_zero() && r.degree() >= d {
            let k = r.degree() - d;
            let rl = r.leading();
            // r = lc*r - rl*q^k*other
            let mut coeffs = vec![BigInt::zero(); r.coeffs.len()];
            for (i, c) in r.coeffs.iter().enumerate() {
                coeffs[i] = c * &lc;
            }
            for (i, c) in other.coeffs.iter().enumerate() {
                coeffs[i + k] -= c * &rl;
            }
            r = IntPoly::from_coeffs(coeffs);
        }
        r
    }

    /// Primitive gcd via the primitive-remainder sequence.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, _) = self.primitive();
        let (mut b, _) = other.primitive();
        if a.is_zero() {
            return b;
        }
        while !b.is_zero() {
            if a.degree() < b.degree() {
                std::mem::swap(&mut a, &mut b);
                continue;
            }
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive().0;
        }
        a.primitive().0
    }

    /// Exact division; panics if not divisible (internal use after gcd).
    fn div_exact(&self, other: &Self) -> Self {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut r = self.clone();
        let d = other.degree();
        let lc = other.leading();
        let mut quot = vec![BigInt::zero(); self.degree() - d + 1];
        while !r.is_zero() && r.degree() >= d {
            let k = r.degree() - d;
            let c = &r.leading() / &lc;
            assert!(
                (&c * &lc) == r.leading(),
                "non-exact polynomial division"
            );
            quot[k] = c.clone();
            let mut coeffs = r.coeffs.clone();
            for (i, oc) in other.coeffs.iter().enumerate() {
                coeffs[i + k] -= oc * &c;
            }
            r = IntPoly::from_coeffs(coeffs);
        }
        assert!(r.is_zero(), "non-exact polynomial division (remainder)");
        IntPoly::from_coeffs(quot)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }
}

fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    use num_integer::Integer;
    a.gcd(b)
}

/// Rational function of q over the integers, normalized:
/// value = q^shift * num / den, den nonzero with positive leading
/// coefficient and nonzero constant term, num with nonzero constant term
/// unless zero, gcd(num, den) = 1 and contents reduced.
/// Zero is (shift 0, num 0, den 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    shift: i64,
    num: IntPoly,
    den: IntPoly,
}

impl RatFunc {
    fn normalized(mut shift: i64, num: IntPoly, den: IntPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator in rational function");
        if num.is_zero() {
            return RatFunc {
                shift: 0,
                num: IntPoly::zero(),
                den: IntPoly::one(),
            };
        }
        let vn = num.q_valuation();
        let vd = den.q_valuation();
        shift += vn as i64 - vd as i64;
        let num = num.shift_down(vn);
        let den = den.shift_down(vd);
        let g = num.gcd(&den);
        let mut num = num.div_exact(&g);
        let mut den = den.div_exact(&g);
        let (np, nc) = num.primitive();
        let (dp, dc) = den.primitive();
        let ig = gcd_int(&nc, &dc);
        let (mut nc, mut dc) = (&nc / &ig, &dc / &ig);
        if dc.is_negative() {
            nc = -nc;
            dc = -dc;
        }
        num = IntPoly {
            coeffs: np.coeffs.iter().map(|c| c * &nc).collect(),
        };
        den = IntPoly {
            coeffs: dp.coeffs.iter().map(|c| c * &dc).collect(),
        };
        RatFunc { shift, num, den }
    }

    /// The generator q.
    pub fn q() -> Self {
        RatFunc {
            shift: 1,
            num: IntPoly::one(),
            den: IntPoly::one(),
        }
    }

    /// q^k for any integer k.
    pub fn q_pow(k: i64) -> Self {
        RatFunc {
            shift: k,
            num: IntPoly::one(),
            den: IntPoly::one(),
        }
    }

    pub fn integer(n: i64) -> Self {
        RatFunc::normalized(0, IntPoly::constant(BigInt::from(n)), IntPoly::one())
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc::normalized(
            -self.shift,
            self.den.clone(),
            self.num.clone(),
        ))
    }

    /// Exact evaluation at a rational point r (r nonzero when shift < 0).
    pub fn specialize(&self, r: &BigRational) -> Result<BigRational> {
        if self.is_zero() {
            return Ok(BigRational::zero());
        }
        if r.is_zero() && self.shift < 0 {
            return Err(Error::PoleAtSpecialization(format!("{self} at q=0")));
        }
        let dv = self.den.eval(r);
        if dv.is_zero() {
            return Err(Error::PoleAtSpecialization(format!("{self} at q={r}")));
        }
        let nv = self.num.eval(r);
        let mut acc = nv / dv;
        let rp = if self.shift < 0 {
            BigRational::one() / r.clone()
        } else {
            r.clone()
        };
        for _ in 0..self.shift.unsigned_abs() {
            acc *= rp.clone();
        }
        Ok(acc)
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc {
            shift: 0,
            num: IntPoly::zero(),
            den: IntPoly::one(),
        }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc {
            shift: 0,
            num: IntPoly::one(),
            den: IntPoly::one(),
        }
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, other: RatFunc) -> RatFunc {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let s = self.shift.min(other.shift);
        let a = self
            .num
            .mul(&IntPoly::monomial((self.shift - s) as usize))
            .mul(&other.den);
        let b = other
            .num
            .mul(&IntPoly::monomial((other.shift - s) as usize))
            .mul(&self.den);
        RatFunc::normalized(s, a.add(&b), self.den.mul(&other.den))
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, other: RatFunc) -> RatFunc {
        self + (-other)
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            shift: self.shift,
            num: self.num.neg(),
            den: self.den,
        }
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, other: RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        RatFunc::normalized(
            self.shift + other.shift,
            self.num.mul(&other.num),
            self.den.mul(&other.den),
        )
    }
}

impl Scalar for RatFunc {
    fn inv(&self) -> Self {
        self.inverse().expect("inverse of zero rational function")
    }
    fn from_int(n: i64) -> Self {
        RatFunc::integer(n)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let num = render_poly(&self.num, self.shift);
        if self.den == IntPoly::one() {
            return write!(f, "{num}");
        }
        let den = render_poly(&self.den, 0);
        let num = if self.num.coeffs.iter().filter(|c| !c.is_zero()).count() > 1 {
            format!("({num})")
        } else {
            num
        };
        let den = if self.den.coeffs.iter().filter(|c| !c.is_zero()).count() > 1 {
            format!("({den})")
        } else {
            den
        };
        write!(f, "{num}/{den}")
    }
}

fn render_poly(p: &IntPoly, shift: i64) -> String {
    let mut out = String::new();
    for (i, c) in p.coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let e = i as i64 + shift;
        let mag = c.abs();
        let term = if e == 0 {
            format!("{mag}")
        } else {
            let qs = if e == 1 {
                "q".to_string()
            } else {
                format!("q^{e}")
            };
            if mag.is_one() {
                qs
            } else {
                format!("{mag}*{qs}")
            }
        };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&term);
    }
    out
}

/// Base for q-integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QIntBase {
    QSquared,
    QInvSquared,
}

/// The q-integer [n; b] = (b^n - 1)/(b - 1) with b = q^2 or q^-2,
/// extended to negative n by the same closed form.
pub fn q_integer(n: i64, base: QIntBase) -> RatFunc {
    let b = match base {
        QIntBase::QSquared => RatFunc::q_pow(2),
        QIntBase::QInvSquared => RatFunc::q_pow(-2),
    };
    let one = RatFunc::one();
    let num = b.pow_i(n) - one.clone();
    let den = b - one;
    num * den.inverse().expect("q^2 - 1 is nonzero")
}

// ---------------------------------------------------------------------------
// Parsing: integers, q, + - * / ^ and parentheses.
// ---------------------------------------------------------------------------

struct Lexer<'a> {
    input: &'a [u8],
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(i64),
    Q,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LPar,
    RPar,
    End,
}

impl<'a> Lexer<'a> {
    fn new(s: &'a str) -> Self {
        Lexer {
            input: s.as_bytes(),
            pos: 0,
        }
    }

    fn next_tok(&mut self) -> Result<Tok> {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.input.len() {
            return Ok(Tok::End);
        }
        let c = self.input[self.pos];
        self.pos += 1;
        Ok(match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LPar,
            b')' => Tok::RPar,
            b'q' => Tok::Q,
            b'0'..=b'9' => {
                let start = self.pos - 1;
                while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let s = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
                Tok::Int(s.parse().map_err(|_| Error::Parse(format!("bad integer {s}")))?)
            }
            _ => return Err(Error::Parse(format!("unexpected character '{}'", c as char))),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    cur: Tok,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Result<Self> {
        let mut lexer = Lexer::new(s);
        let cur = lexer.next_tok()?;
        Ok(Parser { lexer, cur })
    }

    fn bump(&mut self) -> Result<()> {
        self.cur = self.lexer.next_tok()?;
        Ok(())
    }

    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            match self.cur {
                Tok::Plus => {
                    self.bump()?;
                    acc = acc + self.term()?;
                }
                Tok::Minus => {
                    self.bump()?;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.factor()?;
        loop {
            match self.cur {
                Tok::Star => {
                    self.bump()?;
                    acc = acc * self.factor()?;
                }
                Tok::Slash => {
                    self.bump()?;
                    let d = self.factor()?;
                    acc = acc * d.inverse()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatFunc> {
        let mut neg = false;
        while self.cur == Tok::Minus {
            neg = !neg;
            self.bump()?;
        }
        let base = match self.cur.clone() {
            Tok::Int(n) => {
                self.bump()?;
                RatFunc::integer(n)
            }
            Tok::Q => {
                self.bump()?;
                RatFunc::q()
            }
            Tok::LPar => {
                self.bump()?;
                let e = self.expr()?;
                if self.cur != Tok::RPar {
                    return Err(Error::Parse("expected ')'".to_string()));
                }
                self.bump()?;
                e
            }
            t => return Err(Error::Parse(format!("unexpected token {t:?}"))),
        };
        let v = if self.cur == Tok::Caret {
            self.bump()?;
            let mut eneg = false;
            while self.cur == Tok::Minus {
                eneg = !eneg;
                self.bump()?;
            }
            let e = match self.cur {
                Tok::Int(n) => n,
                _ => return Err(Error::Parse("expected integer exponent".to_string())),
            };
            self.bump()?;
            base.pow_i(if eneg { -e } else { e })
        } else {
            base
        };
        Ok(if neg { -v } else { v })
    }
}

/// Parse the q-scalar grammar, e.g. `(q^2 - 1)/(q + 1)` or `q^-2`.
pub fn parse_ratfunc(s: &str) -> Result<RatFunc> {
    let mut p = Parser::new(s)?;
    let v = p.expr()?;
    if p.cur != Tok::End {
        return Err(Error::Parse(format!("trailing input in '{s}'")));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> RatFunc {
        RatFunc::q()
    }

    #[test]
    fn additive_inverse() {
        assert!((q() + (-q())).is_zero());
    }

    #[test]
    fn ring_arithmetic() {
        // (q - q^-1) * q = q^2 - 1
        let lhs = (q() - RatFunc::q_pow(-1)) * q();
        let rhs = RatFunc::q_pow(2) - RatFunc::one();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn multiplicative_inverse() {
        let a = q() + RatFunc::one();
        let ai = a.inverse().unwrap();
        assert_eq!(a * ai, RatFunc::one());
        assert_eq!(RatFunc::zero().inverse(), Err(Error::DivisionByZero));
    }

    #[test]
    fn q_integers() {
        assert!(q_integer(0, QIntBase::QInvSquared).is_zero());
        assert_eq!(q_integer(1, QIntBase::QInvSquared), RatFunc::one());
        let expected = RatFunc::one() + RatFunc::q_pow(-2);
        assert_eq!(q_integer(2, QIntBase::QInvSquared), expected);
        // [-1; q^-2] = -q^2
        assert_eq!(q_integer(-1, QIntBase::QInvSquared), -RatFunc::q_pow(2));
    }

    #[test]
    fn pascal_identity_for_q_integers() {
        // [m+n] = [m] + q^-2m [n]
        for m in -4i64..5 {
            for n in -4i64..5 {
                let lhs = q_integer(m + n, QIntBase::QInvSquared);
                let rhs = q_integer(m, QIntBase::QInvSquared)
                    + RatFunc::q_pow(-2 * m) * q_integer(n, QIntBase::QInvSquared);
                assert_eq!(lhs, rhs, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn specialization() {
        let r2 = BigRational::from_integer(2.into());
        assert_eq!(
            (q() + RatFunc::one()).specialize(&r2).unwrap(),
            BigRational::from_integer(3.into())
        );
        let pole = (q() - RatFunc::one()).inverse().unwrap();
        assert!(matches!(
            pole.specialize(&BigRational::one()),
            Err(Error::PoleAtSpecialization(_))
        ));
        // [2; q^-2] at q=2 is (q^-4 - 1)/(q^-2 - 1) = 5/4
        let v = q_integer(2, QIntBase::QInvSquared).specialize(&r2).unwrap();
        assert_eq!(v, BigRational::new(5.into(), 4.into()));
    }

    #[test]
    fn specialize_is_multiplicative() {
        let r = BigRational::new(3.into(), 2.into());
        let a = parse_ratfunc("(q^2-1)/(q+1)").unwrap();
        let b = parse_ratfunc("q^-3 + 2").unwrap();
        let lhs = (a.clone() * b.clone()).specialize(&r).unwrap();
        let rhs = a.specialize(&r).unwrap() * b.specialize(&r).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn display_round_trip() {
        for s in [
            "q^-2",
            "(q^2 - 1)/(q + 1)",
            "1 + q^-2",
            "-q^4",
            "2*q - 3",
            "(q^4 + q^3 - q - 1)/(q^3 - 1)",
        ] {
            let v = parse_ratfunc(s).unwrap();
            let reparsed = parse_ratfunc(&v.to_string()).unwrap();
            assert_eq!(v, reparsed, "round trip of {s}");
        }
    }

    #[test]
    fn normalization_cancels() {
        // (q^2 - 1)/(q + 1) = q - 1
        let v = parse_ratfunc("(q^2 - 1)/(q + 1)").unwrap();
        assert_eq!(v, q() - RatFunc::one());
    }
}
