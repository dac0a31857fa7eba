//! Exact rational arithmetic with a machine-word fast path.
//!
//! Coefficients throughout the engine are reduced fractions. Almost all of
//! them fit in an `i64/i64` pair, so we keep a small variant and promote to
//! `BigRational` only on overflow. The canonical-form invariant (denominator
//! positive, fraction reduced, small variant whenever it fits) makes derived
//! equality and hashing valid.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rat {
    /// Reduced fraction, denominator > 0.
    S(i64, i64),
    /// Reduced fraction that does not fit in the small variant.
    B(Box<BigRational>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn make_small(num: i128, den: i128) -> Rat {
    debug_assert!(den != 0);
    let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
    if num == 0 {
        return Rat::S(0, 1);
    }
    let g = gcd_u128(num.unsigned_abs(), den as u128) as i128;
    let (num, den) = (num / g, den / g);
    if let (Ok(n), Ok(d)) = (i64::try_from(num), i64::try_from(den)) {
        Rat::S(n, d)
    } else {
        Rat::B(Box::new(BigRational::new(BigInt::from(num), BigInt::from(den))))
    }
}

fn demote(r: BigRational) -> Rat {
    if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
        Rat::S(n, d)
    } else {
        Rat::B(Box::new(r))
    }
}

impl Rat {
    pub const ZERO: Rat = Rat::S(0, 1);
    pub const ONE: Rat = Rat::S(1, 1);

    pub fn int(n: i64) -> Rat {
        Rat::S(n, 1)
    }

    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        make_small(num as i128, den as i128)
    }

    pub fn from_big(r: BigRational) -> Rat {
        demote(r)
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rat::S(n, d) => BigRational::new(BigInt::from(*n), BigInt::from(*d)),
            Rat::B(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rat::S(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rat::S(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::S(_, d) => *d == 1,
            Rat::B(b) => b.is_integer(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Rat::S(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rat::S(n, _) => n.signum() as i32,
            Rat::B(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Rat {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Rat {
        assert!(!self.is_zero(), "division by zero");
        match self {
            Rat::S(n, d) => make_small(*d as i128, *n as i128),
            Rat::B(b) => demote(b.recip()),
        }
    }

    pub fn pow(&self, e: u32) -> Rat {
        let mut out = Rat::ONE;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        out
    }

    /// True if the rational is the square of a rational, returning the
    /// positive square root when it is.
    pub fn sqrt_exact(&self) -> Option<Rat> {
        if self.signum() < 0 {
            return None;
        }
        if self.is_zero() {
            return Some(Rat::ZERO);
        }
        let b = self.to_big();
        let ns = b.numer().sqrt();
        let ds = b.denom().sqrt();
        if &(&ns * &ns) == b.numer() && &(&ds * &ds) == b.denom() {
            Some(demote(BigRational::new(ns, ds)))
        } else {
            None
        }
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::ZERO
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

macro_rules! binop {
    ($trait:ident, $fn:ident) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $fn(self, rhs: &Rat) -> Rat {
                Rat::$fn(self, rhs)
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $fn(self, rhs: Rat) -> Rat {
                Rat::$fn(&self, &rhs)
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $fn(self, rhs: &Rat) -> Rat {
                Rat::$fn(&self, rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Rat {
    fn add(a: &Rat, b: &Rat) -> Rat {
        match (a, b) {
            (Rat::S(an, ad), Rat::S(bn, bd)) => {
                let num = *an as i128 * *bd as i128 + *bn as i128 * *ad as i128;
                make_small(num, *ad as i128 * *bd as i128)
            }
            _ => demote(a.to_big() + b.to_big()),
        }
    }

    fn sub(a: &Rat, b: &Rat) -> Rat {
        match (a, b) {
            (Rat::S(an, ad), Rat::S(bn, bd)) => {
                let num = *an as i128 * *bd as i128 - *bn as i128 * *ad as i128;
                make_small(num, *ad as i128 * *bd as i128)
            }
            _ => demote(a.to_big() - b.to_big()),
        }
    }

    fn mul(a: &Rat, b: &Rat) -> Rat {
        match (a, b) {
            (Rat::S(an, ad), Rat::S(bn, bd)) => {
                // cross-reduce so intermediates stay small
                let g1 = gcd_u128(an.unsigned_abs() as u128, *bd as u128).max(1) as i128;
                let g2 = gcd_u128(bn.unsigned_abs() as u128, *ad as u128).max(1) as i128;
                let num = (*an as i128 / g1) * (*bn as i128 / g2);
                let den = (*ad as i128 / g2) * (*bd as i128 / g1);
                make_small(num, den)
            }
            _ => demote(a.to_big() * b.to_big()),
        }
    }

    fn div(a: &Rat, b: &Rat) -> Rat {
        assert!(!b.is_zero(), "division by zero");
        match (a, b) {
            (Rat::S(an, ad), Rat::S(bn, bd)) => {
                let g1 = gcd_u128(an.unsigned_abs() as u128, bn.unsigned_abs() as u128).max(1) as i128;
                let g2 = gcd_u128(*bd as u128, *ad as u128).max(1) as i128;
                let num = (*an as i128 / g1) * (*bd as i128 / g2);
                let den = (*ad as i128 / g2) * (*bn as i128 / g1);
                make_small(num, den)
            }
            _ => demote(a.to_big() / b.to_big()),
        }
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::S(n, d) => {
                if *n == i64::MIN {
                    make_small(-(*n as i128), *d as i128)
                } else {
                    Rat::S(-n, *d)
                }
            }
            Rat::B(b) => demote(-(**b).clone()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        *self = Rat::add(self, rhs);
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        *self = Rat::sub(self, rhs);
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        *self = Rat::mul(self, rhs);
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (self, other) {
            (Rat::S(an, ad), Rat::S(bn, bd)) => {
                (*an as i128 * *bd as i128).cmp(&(*bn as i128 * *ad as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::S(n, 1) => write!(fm, "{}", n),
            Rat::S(n, d) => write!(fm, "{}/{}", n, d),
            Rat::B(b) => {
                if b.is_integer() {
                    write!(fm, "{}", b.numer())
                } else {
                    write!(fm, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "{}", self)
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid rational literal: {0}")]
pub struct ParseRatError(String);

impl FromStr for Rat {
    type Err = ParseRatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseRatError(s.to_string());
        let (ns, ds) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n = BigInt::from_str(ns).map_err(|_| bad())?;
        let d = BigInt::from_str(ds).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(demote(BigRational::new(n, d)))
    }
}

impl serde::Serialize for Rat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Rat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Sum of an iterator of rationals.
pub fn rat_sum<'a, I: IntoIterator<Item = &'a Rat>>(it: I) -> Rat {
    let mut acc = Rat::ZERO;
    for r in it {
        acc += r;
    }
    acc
}

/// n! as a rational.
pub fn factorial(n: u32) -> Rat {
    let mut out = BigInt::one();
    for k in 2..=n {
        out *= k;
    }
    demote(BigRational::from_integer(out))
}

/// Binomial coefficient C(n, k) for integer n >= 0.
pub fn binomial(n: i64, k: i64) -> Rat {
    if k < 0 || k > n {
        return Rat::ZERO;
    }
    let mut out = BigRational::one();
    for j in 0..k {
        out *= BigRational::new(BigInt::from(n - j), BigInt::from(j + 1));
    }
    demote(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_arithmetic() {
        let a = Rat::new(2, 4);
        assert_eq!(a, Rat::new(1, 2));
        assert_eq!(&a + &Rat::new(1, 3), Rat::new(5, 6));
        assert_eq!(&a * &Rat::new(-4, 6), Rat::new(-1, 3));
        assert_eq!(&a / &Rat::new(3, 2), Rat::new(1, 3));
        assert_eq!(-&a, Rat::new(-1, 2));
        assert_eq!(a.inv(), Rat::int(2));
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rat::int(i64::MAX);
        let sq = &big * &big;
        assert!(matches!(sq, Rat::B(_)));
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(matches!(back, Rat::S(_, _)));
        // canonical equality across representations
        assert_eq!(&sq - &sq, Rat::ZERO);
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["3/4", "-12", "0", "123456789012345678901234567890/7"] {
            let r: Rat = s.parse().unwrap();
            let r2: Rat = r.to_string().parse().unwrap();
            assert_eq!(r, r2);
        }
        assert_eq!("6/4".parse::<Rat>().unwrap().to_string(), "3/2");
    }

    #[test]
    fn ordering_and_helpers() {
        assert!(Rat::new(1, 3) < Rat::new(1, 2));
        assert!(Rat::new(-1, 2) < Rat::new(-1, 3));
        assert_eq!(binomial(5, 2), Rat::int(10));
        assert_eq!(binomial(3, 5), Rat::ZERO);
        assert_eq!(factorial(5), Rat::int(120));
        assert_eq!(Rat::new(9, 4).sqrt_exact(), Some(Rat::new(3, 2)));
        assert_eq!(Rat::new(2, 1).sqrt_exact(), None);
    }
}
