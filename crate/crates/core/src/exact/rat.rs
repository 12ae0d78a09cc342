//! Exact rationals with an inline fast path.
//!
//! Most coefficients that appear in the loop equations fit comfortably in a
//! machine word, so a `Rat` stores `i64/i64` inline and only falls back to a
//! heap-allocated [`BigRational`] once an intermediate result overflows. The
//! two representations are kept mutually exclusive: a big value that fits in
//! the small form is always demoted, so structural equality is value equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::GbeError;

#[derive(Clone)]
pub enum Rat {
    /// Lowest terms, `den > 0`.
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    gcd_u128(a as u128, b as u128) as u64
}

impl Rat {
    pub const ZERO: Rat = Rat::Small(0, 1);
    pub const ONE: Rat = Rat::Small(1, 1);

    pub fn zero() -> Rat {
        Rat::ZERO
    }

    pub fn one() -> Rat {
        Rat::ONE
    }

    pub fn from_int(n: i64) -> Rat {
        Rat::Small(n, 1)
    }

    /// `num/den`, reduced. Panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat::from_i128(num as i128, den as i128)
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Rat {
        assert!(!den.is_zero(), "zero denominator");
        Rat::from_ratio(BigRational::new(num, den))
    }

    pub fn from_bigint(n: BigInt) -> Rat {
        Rat::from_ratio(BigRational::from_integer(n))
    }

    fn from_i128(num: i128, den: i128) -> Rat {
        if num == 0 {
            return Rat::ZERO;
        }
        let neg = (num < 0) != (den < 0);
        let (un, ud) = (num.unsigned_abs(), den.unsigned_abs());
        let g = gcd_u128(un, ud);
        let (un, ud) = (un / g, ud / g);
        if un <= i64::MAX as u128 && ud <= i64::MAX as u128 {
            let n = un as i64;
            Rat::Small(if neg { -n } else { n }, ud as i64)
        } else {
            let n = BigInt::from(un);
            let n = if neg { -n } else { n };
            Rat::Big(Box::new(BigRational::new_raw(n, BigInt::from(ud))))
        }
    }

    /// Demote a (reduced) big rational to the inline form when it fits.
    fn from_ratio(r: BigRational) -> Rat {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Rat::Small(n, d);
            }
        }
        Rat::Big(Box::new(r))
    }

    pub fn to_ratio(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(b) => (**b).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rat::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small(_, d) => *d == 1,
            Rat::Big(b) => b.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Rat::Small(n, _) => *n < 0,
            Rat::Big(b) => b.is_negative(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rat::Small(n, _) => BigInt::from(*n),
            Rat::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rat::Small(_, d) => BigInt::from(*d),
            Rat::Big(b) => b.denom().clone(),
        }
    }

    pub fn abs(&self) -> Rat {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Rat {
        match self {
            Rat::Small(0, _) => panic!("reciprocal of zero"),
            Rat::Small(n, d) => {
                if *n < 0 {
                    Rat::from_i128(-(*d as i128), -(*n as i128))
                } else {
                    Rat::Small(*d, *n)
                }
            }
            Rat::Big(b) => Rat::from_ratio(b.recip()),
        }
    }

    pub fn pow(&self, e: u32) -> Rat {
        let mut acc = Rat::ONE;
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rat::Small(n, d) => *n as f64 / *d as f64,
            Rat::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// gcd of two rationals: gcd of numerators over lcm of denominators.
    pub fn gcd(&self, other: &Rat) -> Rat {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                let g = gcd_u64(a.unsigned_abs(), c.unsigned_abs());
                let gd = gcd_u64(*b as u64, *d as u64);
                let l = (*b as u128 / gd as u128) * *d as u128;
                Rat::from_i128(g as i128, l as i128)
            }
            _ => {
                let (x, y) = (self.to_ratio(), other.to_ratio());
                let n = x.numer().gcd(y.numer());
                let d = x.denom().lcm(y.denom());
                Rat::from_big(n, d)
            }
        }
    }

    pub fn binomial(n: u64, k: u64) -> Rat {
        if k > n {
            return Rat::ZERO;
        }
        let k = k.min(n - k);
        let mut acc = BigInt::one();
        for i in 0..k {
            acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        Rat::from_bigint(acc)
    }

    pub fn factorial(n: u64) -> Rat {
        let mut acc = BigInt::one();
        for i in 2..=n {
            acc *= BigInt::from(i);
        }
        Rat::from_bigint(acc)
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::ZERO
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::Small(n, 1)
    }
}

impl From<i32> for Rat {
    fn from(n: i32) -> Self {
        Rat::Small(n as i64, 1)
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => a == c && b == d,
            (Rat::Big(x), Rat::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Rat::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Rat::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_ratio().cmp(&other.to_ratio()),
        }
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::Small(n, d) => {
                if *n == i64::MIN {
                    Rat::from_i128(-(*n as i128), *d as i128)
                } else {
                    Rat::Small(-n, *d)
                }
            }
            Rat::Big(b) => Rat::from_ratio(-(**b).clone()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl Add for &Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        match (self, rhs) {
            (Rat::Small(a, 1), Rat::Small(c, 1)) => match a.checked_add(*c) {
                Some(s) if s != i64::MIN => Rat::Small(s, 1),
                _ => Rat::from_i128(*a as i128 + *c as i128, 1),
            },
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                if b == d {
                    Rat::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    let n = *a as i128 * *d as i128 + *c as i128 * *b as i128;
                    Rat::from_i128(n, *b as i128 * *d as i128)
                }
            }
            _ => Rat::from_ratio(self.to_ratio() + rhs.to_ratio()),
        }
    }
}

impl Sub for &Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        match (self, rhs) {
            (Rat::Small(a, 1), Rat::Small(c, 1)) => match a.checked_sub(*c) {
                Some(s) if s != i64::MIN => Rat::Small(s, 1),
                _ => Rat::from_i128(*a as i128 - *c as i128, 1),
            },
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                let n = *a as i128 * *d as i128 - *c as i128 * *b as i128;
                Rat::from_i128(n, *b as i128 * *d as i128)
            }
            _ => Rat::from_ratio(self.to_ratio() - rhs.to_ratio()),
        }
    }
}

impl Mul for &Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        match (self, rhs) {
            (Rat::Small(a, 1), Rat::Small(c, 1)) => match a.checked_mul(*c) {
                Some(p) if p != i64::MIN => Rat::Small(p, 1),
                _ => Rat::from_i128(*a as i128 * *c as i128, 1),
            },
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                if *a == 0 || *c == 0 {
                    return Rat::ZERO;
                }
                Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rat::from_ratio(self.to_ratio() * rhs.to_ratio()),
        }
    }
}

impl Div for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        match (self, rhs) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                Rat::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
            }
            _ => Rat::from_ratio(self.to_ratio() / rhs.to_ratio()),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, rhs: &Rat) -> Rat {
                (&self).$m(rhs)
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{n}"),
            Rat::Small(n, d) => write!(f, "{n}/{d}"),
            Rat::Big(b) => {
                if b.is_integer() {
                    write!(f, "{}", b.numer())
                } else {
                    write!(f, "{}/{}", b.numer(), b.denom())
                }
            }
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = GbeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GbeError::Parse(format!("invalid rational `{s}`"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = match d {
            Some(d) => d.trim().parse().map_err(|_| bad())?,
            None => BigInt::one(),
        };
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rat::from_big(n, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalizes_sign_and_gcd() {
        assert_eq!(Rat::new(6, -4), Rat::Small(-3, 2));
        assert_eq!(Rat::new(0, -7), Rat::ZERO);
        assert_eq!(Rat::new(12288, 1).to_string(), "12288");
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Rat::from_int(i64::MAX);
        let sq = &big * &big;
        assert!(matches!(sq, Rat::Big(_)));
        let back = &sq / &big;
        assert_eq!(back, big);
        assert!(matches!(back, Rat::Small(..)));
        assert_eq!(&Rat::from_int(i64::MAX) + &Rat::ONE, Rat::from_bigint(BigInt::from(i64::MAX) + 1));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "-5", "3/7", "-123456789012345678901234567891/2"] {
            let r: Rat = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn gcd_of_rationals() {
        assert_eq!(Rat::new(3, 4).gcd(&Rat::new(9, 10)), Rat::new(3, 20));
        assert_eq!(Rat::factorial(5), Rat::from_int(120));
        assert_eq!(Rat::binomial(10, 3), Rat::from_int(120));
    }

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (any::<i64>(), 1i64..=i64::MAX).prop_map(|(n, d)| Rat::new(n, d))
    }

    proptest! {
        #[test]
        fn field_laws_agree_with_bigrational(a in arb_rat(), b in arb_rat(), c in arb_rat()) {
            let (ra, rb, rc) = (a.to_ratio(), b.to_ratio(), c.to_ratio());
            prop_assert_eq!((&a + &b).to_ratio(), &ra + &rb);
            prop_assert_eq!((&a - &b).to_ratio(), &ra - &rb);
            prop_assert_eq!((&(&a * &b) + &c).to_ratio(), &ra * &rb + &rc);
            if !b.is_zero() {
                prop_assert_eq!((&a / &b).to_ratio(), &ra / &rb);
            }
            prop_assert_eq!(a.cmp(&b), ra.cmp(&rb));
        }
    }
}
