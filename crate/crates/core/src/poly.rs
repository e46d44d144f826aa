//! Sparse Laurent polynomials with arbitrary-precision integer coefficients.
//!
//! The variable is a const-generic tag so brackets (`A`), Jones polynomials
//! (`q`, exponents stored ×4) and Alexander polynomials (`t`) cannot be mixed
//! up by accident.
//!
//! Text form: `c1*X^e1 + c2*X^e2 - c3*X^e3`, terms in ascending exponent,
//! zero polynomial written `0`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::MosaicError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LaurentPoly<const X: char> {
    terms: BTreeMap<i64, BigInt>,
}

pub type BracketPoly = LaurentPoly<'A'>;
/// Jones polynomial in `q` with every exponent multiplied by 4.
pub type JonesPoly = LaurentPoly<'q'>;
pub type AlexanderPoly = LaurentPoly<'t'>;

impl<const X: char> LaurentPoly<X> {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn monomial(coeff: impl Into<BigInt>, exp: i64) -> Self {
        let coeff = coeff.into();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { terms }
    }

    pub fn from_terms<C: Into<BigInt>>(terms: impl IntoIterator<Item = (i64, C)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exp: i64, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    /// `(exponent, coefficient)` pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Coefficients from the lowest to the highest exponent, zeros included.
    pub fn dense_coeffs(&self) -> Vec<BigInt> {
        match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => (lo..=hi).map(|e| self.coeff(e)).collect(),
            _ => Vec::new(),
        }
    }

    /// Multiplies by `X^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect() }
    }

    /// Substitutes `X -> X^factor` (factor may be negative).
    pub fn scale_exponents(&self, factor: i64) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (e * factor, c.clone())).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect() }
    }

    /// Re-tags the polynomial with another variable.
    pub fn rename<const Y: char>(self) -> LaurentPoly<Y> {
        LaurentPoly { terms: self.terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Value at an integer point. Negative exponents require `x = ±1`.
    pub fn eval_unit(&self, x: i64) -> BigInt {
        assert!(x == 1 || x == -1, "eval_unit only supports x = ±1");
        self.terms
            .iter()
            .map(|(e, c)| if x == -1 && e.is_odd() { -c } else { c.clone() })
            .sum()
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (d_lo, d_hi) = (divisor.min_exp()?, divisor.max_exp()?);
        let d_lead = divisor.coeff(d_hi);
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(r_hi) = rem.max_exp() {
            let r_lo = rem.min_exp().unwrap();
            if r_hi - r_lo < d_hi - d_lo {
                return None;
            }
            let (q, r) = rem.coeff(r_hi).div_rem(&d_lead);
            if !r.is_zero() {
                return None;
            }
            let shift = r_hi - d_hi;
            rem = &rem - &divisor.shift(shift).scale(&q);
            quot.add_term(shift, q);
        }
        Some(quot)
    }
}

impl<const X: char> Zero for LaurentPoly<X> {
    fn zero() -> Self {
        LaurentPoly::zero()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<const X: char> One for LaurentPoly<X> {
    fn one() -> Self {
        LaurentPoly::one()
    }
}

impl<const X: char> AddAssign<&LaurentPoly<X>> for LaurentPoly<X> {
    fn add_assign(&mut self, rhs: &LaurentPoly<X>) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl<const X: char> Add for &LaurentPoly<X> {
    type Output = LaurentPoly<X>;

    fn add(self, rhs: Self) -> LaurentPoly<X> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<const X: char> Add for LaurentPoly<X> {
    type Output = LaurentPoly<X>;

    fn add(mut self, rhs: Self) -> LaurentPoly<X> {
        self += &rhs;
        self
    }
}

impl<const X: char> Neg for &LaurentPoly<X> {
    type Output = LaurentPoly<X>;

    fn neg(self) -> LaurentPoly<X> {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl<const X: char> Neg for LaurentPoly<X> {
    type Output = LaurentPoly<X>;

    fn neg(self) -> LaurentPoly<X> {
        -&self
    }
}

impl<const X: char> Sub for &LaurentPoly<X> {
    type Output = LaurentPoly<X>;

    fn sub(self, rhs: Self) -> LaurentPoly<X> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl<const X: char> Sub for LaurentPoly<X> {
    type Output = LaurentPoly<X>;

    fn sub(self, rhs: Self) -> LaurentPoly<X> {
        &self - &rhs
    }
}

impl<const X: char> Mul for &LaurentPoly<X> {
    type Output = LaurentPoly<X>;

    fn mul(self, rhs: Self) -> LaurentPoly<X> {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl<const X: char> Mul for LaurentPoly<X> {
    type Output = LaurentPoly<X>;

    fn mul(self, rhs: Self) -> LaurentPoly<X> {
        &self * &rhs
    }
}

impl<const X: char> fmt::Display for LaurentPoly<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            match (i, c.is_negative()) {
                (0, _) => write!(f, "{c}")?,
                (_, true) => write!(f, " - {}", c.abs())?,
                (_, false) => write!(f, " + {c}")?,
            }
            write!(f, "*{X}^{e}")?;
        }
        Ok(())
    }
}

impl<const X: char> fmt::Debug for LaurentPoly<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<const X: char> FromStr for LaurentPoly<X> {
    type Err = MosaicError;

    fn from_str(s: &str) -> Result<Self, MosaicError> {
        let bad = |msg: &str| MosaicError::Report(format!("bad polynomial {s:?}: {msg}"));
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        let mut sign = BigInt::one();
        let mut expect_term = true;
        for tok in s.split_whitespace() {
            if !expect_term {
                sign = match tok {
                    "+" => BigInt::one(),
                    "-" => -BigInt::one(),
                    _ => return Err(bad("expected + or -")),
                };
                expect_term = true;
                continue;
            }
            let (c, rest) = tok.split_once('*').ok_or_else(|| bad("missing '*'"))?;
            let e = rest
                .strip_prefix(X)
                .and_then(|r| r.strip_prefix('^'))
                .ok_or_else(|| bad("expected variable"))?;
            let c: BigInt = c.parse().map_err(|_| bad("coefficient"))?;
            let e: i64 = e.parse().map_err(|_| bad("exponent"))?;
            out.add_term(e, &sign * c);
            expect_term = false;
        }
        if expect_term {
            return Err(bad("dangling operator"));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type P = LaurentPoly<'t'>;

    fn p(terms: &[(i64, i64)]) -> P {
        P::from_terms(terms.iter().copied())
    }

    #[test]
    fn arithmetic() {
        let a = p(&[(0, 1), (1, -1)]);
        let b = p(&[(0, 1), (1, 1)]);
        assert_eq!(&a * &b, p(&[(0, 1), (2, -1)]));
        assert_eq!(&a + &b, p(&[(0, 2)]));
        assert!((&a - &a).is_zero());
        assert_eq!(a.pow(0), P::one());
        assert_eq!(p(&[(-1, 1), (1, 1)]).eval_unit(-1), BigInt::from(-2));
    }

    #[test]
    fn text_form() {
        let a = p(&[(-2, 1), (0, -3), (5, 1)]);
        assert_eq!(a.to_string(), "1*t^-2 - 3*t^0 + 1*t^5");
        assert_eq!(a.to_string().parse::<P>().unwrap(), a);
        assert_eq!(P::zero().to_string(), "0");
        assert!("1*q^2".parse::<P>().is_err());
        assert!("1*t^2 +".parse::<P>().is_err());
    }

    #[test]
    fn exact_division() {
        let a = p(&[(0, 1), (1, -1)]);
        let b = p(&[(0, 2), (3, 7), (-1, 1)]);
        assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
        assert!(p(&[(0, 1), (1, 1)]).div_exact(&p(&[(0, 2)])).is_none());
        assert!(p(&[(0, 1)]).div_exact(&p(&[(0, 1), (1, 1)])).is_none());
    }

    fn arb_poly() -> impl Strategy<Value = P> {
        proptest::collection::vec((-6i64..6, -5i64..5), 0..6).prop_map(P::from_terms)
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn division_inverts_multiplication(a in arb_poly(), b in arb_poly()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!((&a * &b).div_exact(&b), Some(a));
        }

        #[test]
        fn text_round_trip(a in arb_poly()) {
            prop_assert_eq!(a.to_string().parse::<P>().unwrap(), a);
        }
    }
}
