//! Exact rational arithmetic on arbitrary-precision integers.
//!
//! Every value is kept in canonical form: positive denominator, numerator and
//! denominator coprime, zero represented as `0/1`. Canonical form makes
//! structural equality, hashing, and string output all agree, which the
//! rest of the crate relies on (sets are deduplicated by equality, and
//! certificates are compared byte for byte).
//!
//! The workloads here produce very lopsided fractions: denominators are
//! usually a small odd number times a huge power of two, and reduction after
//! addition must not fall into a quadratic binary-gcd on operands that a few
//! division steps would collapse. `big_gcd` therefore strips shared powers of
//! two first, then runs Euclidean remainder steps while the operands are far
//! apart in size, and only hands balanced operands to the library gcd.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigInt,
    den: BigInt,
}

/// Gcd for operands whose sizes may differ by orders of magnitude.
///
/// Shared powers of two come off with shifts, then remainder steps shrink the
/// larger operand while one side is at least twice the bit length of the
/// other. Once balanced, the library's binary gcd finishes the job.
fn big_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() {
        return b.abs();
    }
    if b.is_zero() {
        return a.abs();
    }
    let ta = a.trailing_zeros().expect("nonzero");
    let tb = b.trailing_zeros().expect("nonzero");
    let g = odd_part_gcd(a.abs() >> ta, b.abs() >> tb);
    g << ta.min(tb)
}

fn odd_part_gcd(mut a: BigInt, mut b: BigInt) -> BigInt {
    loop {
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        let (ba, bb) = (a.bits(), b.bits());
        if ba >= 2 * bb {
            a %= &b;
        } else if bb >= 2 * ba {
            b %= &a;
        } else {
            return a.gcd(&b);
        }
    }
}

impl Rational {
    /// Builds a rational from any numerator and denominator, reducing to
    /// canonical form. Fails only on a zero denominator.
    pub fn new(num: BigInt, den: BigInt) -> Result<Rational> {
        if den.is_zero() {
            return Err(Error::Validation("zero denominator".into()));
        }
        Ok(Rational::canonical(num, den))
    }

    /// Convenience constructor for small literals. Panics on a zero
    /// denominator, so it is meant for constants written in code.
    pub fn of(num: i64, den: i64) -> Rational {
        assert!(den != 0, "Rational::of with zero denominator");
        Rational::canonical(BigInt::from(num), BigInt::from(den))
    }

    pub fn zero() -> Rational {
        Rational {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }

    pub fn one() -> Rational {
        Rational {
            num: BigInt::one(),
            den: BigInt::one(),
        }
    }

    /// Exactly `2^k`, for either sign of `k`.
    pub fn power_of_two(k: i64) -> Rational {
        if k >= 0 {
            Rational::from_reduced(BigInt::one() << k.unsigned_abs(), BigInt::one())
        } else {
            Rational::from_reduced(BigInt::one(), BigInt::one() << k.unsigned_abs())
        }
    }

    fn canonical(mut num: BigInt, mut den: BigInt) -> Rational {
        debug_assert!(!den.is_zero());
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        if num.is_zero() {
            return Rational::zero();
        }
        let g = big_gcd(&num, &den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        Rational { num, den }
    }

    /// Wraps parts already known to be canonical (coprime, positive
    /// denominator). Callers prove this from the algebra of the operation;
    /// the structured unit tests exercise those proofs on small values.
    fn from_reduced(num: BigInt, den: BigInt) -> Rational {
        debug_assert!(den.is_positive());
        Rational { num, den }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    /// Total bit length of numerator plus denominator; a size gauge used to
    /// keep generated instances within their budgets.
    pub fn bits(&self) -> u64 {
        self.num.bits() + self.den.bits()
    }

    pub fn abs(&self) -> Rational {
        Rational::from_reduced(self.num.abs(), self.den.clone())
    }

    /// Largest integer not above `self`.
    pub fn floor_int(&self) -> BigInt {
        self.num.div_floor(&self.den)
    }

    /// Smallest integer not below `self`.
    pub fn ceil_int(&self) -> BigInt {
        -(-&self.num).div_floor(&self.den)
    }

    /// Multiplicative inverse; fails on zero.
    pub fn invert(&self) -> Result<Rational> {
        if self.num.is_zero() {
            return Err(Error::Singularity("cannot invert zero".into()));
        }
        if self.num.is_negative() {
            Ok(Rational::from_reduced(-&self.den, -&self.num))
        } else {
            Ok(Rational::from_reduced(self.den.clone(), self.num.clone()))
        }
    }

    /// Division that reports a zero divisor instead of panicking.
    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational> {
        Ok(self * &rhs.invert()?)
    }

    /// Integer power with either sign of exponent. `x^0` is `1` for every
    /// `x` including zero; `0^e` for negative `e` fails. Since the base is
    /// canonical its powers are already coprime, so no reduction runs.
    pub fn pow(&self, e: i64) -> Result<Rational> {
        if e == 0 {
            return Ok(Rational::one());
        }
        if self.num.is_zero() {
            if e < 0 {
                return Err(Error::Singularity(
                    "zero raised to a negative power".into(),
                ));
            }
            return Ok(Rational::zero());
        }
        let mag = e.unsigned_abs();
        let n = Pow::pow(&self.num, mag);
        let d = Pow::pow(&self.den, mag);
        if e > 0 {
            Ok(Rational::from_reduced(n, d))
        } else if n.is_negative() {
            Ok(Rational::from_reduced(-d, -n))
        } else {
            Ok(Rational::from_reduced(d, n))
        }
    }

    #[cfg(test)]
    fn is_canonical(&self) -> bool {
        if !self.den.is_positive() {
            return false;
        }
        if self.num.is_zero() {
            return self.den.is_one();
        }
        Integer::gcd(&self.num, &self.den).is_one()
    }
}

impl Default for Rational {
    fn default() -> Rational {
        Rational::zero()
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Rational {
        Rational::from_reduced(n, BigInt::one())
    }
}

macro_rules! from_prim {
    ($($t:ty),*) => {$(
        impl From<$t> for Rational {
            fn from(n: $t) -> Rational {
                Rational::from_reduced(BigInt::from(n), BigInt::one())
            }
        }
    )*};
}
from_prim!(i32, i64, u32, u64, usize);

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rational({self})")
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p` or `p/q`: an optional minus sign and decimal digits,
    /// optionally followed by a slash and an unsigned decimal denominator.
    /// No whitespace, exponents, or decimal points.
    fn from_str(s: &str) -> Result<Rational> {
        let bad = || Error::Parse(format!("expected `p` or `p/q` in decimal digits, got {s:?}"));
        let digits_ok = |d: &str| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit());
        let (num_part, den_part) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let (sign, digits) = match num_part.strip_prefix('-') {
            Some(rest) => (Sign::Minus, rest),
            None => (Sign::Plus, num_part),
        };
        if !digits_ok(digits) {
            return Err(bad());
        }
        let num_mag = BigUint::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
        let num = BigInt::from_biguint(sign, num_mag);
        let den = match den_part {
            None => BigInt::one(),
            Some(d) => {
                if !digits_ok(d) {
                    return Err(bad());
                }
                let mag = BigUint::parse_bytes(d.as_bytes(), 10).ok_or_else(bad)?;
                if mag.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                BigInt::from_biguint(Sign::Plus, mag)
            }
        };
        Ok(Rational::canonical(num, den))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&Rational> for &Rational {
    type Output = Rational;

    fn add(self, rhs: &Rational) -> Rational {
        if self.num.is_zero() {
            return rhs.clone();
        }
        if rhs.num.is_zero() {
            return self.clone();
        }
        let g = big_gcd(&self.den, &rhs.den);
        if g.is_one() {
            let num = &self.num * &rhs.den + &rhs.num * &self.den;
            let den = &self.den * &rhs.den;
            return Rational::from_reduced(num, den);
        }
        // Knuth's scheme: with g = gcd(b, d), only factors of g can survive
        // into the sum's denominator, so one small gcd finishes reduction.
        let b_red = &self.den / &g;
        let d_red = &rhs.den / &g;
        let t = &self.num * &d_red + &rhs.num * &b_red;
        if t.is_zero() {
            return Rational::zero();
        }
        let h = big_gcd(&t, &g);
        let num = &t / &h;
        let den = (&self.den / &h) * d_red;
        Rational::from_reduced(num, den)
    }
}

impl Sub<&Rational> for &Rational {
    type Output = Rational;

    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs)
    }
}

impl Mul<&Rational> for &Rational {
    type Output = Rational;

    fn mul(self, rhs: &Rational) -> Rational {
        if self.num.is_zero() || rhs.num.is_zero() {
            return Rational::zero();
        }
        // Cross-reduce before multiplying; the remaining products are
        // coprime because each factor pair already is.
        let g1 = big_gcd(&self.num, &rhs.den);
        let g2 = big_gcd(&rhs.num, &self.den);
        let num = (&self.num / &g1) * (&rhs.num / &g2);
        let den = (&self.den / &g2) * (&rhs.den / &g1);
        Rational::from_reduced(num, den)
    }
}

impl Div<&Rational> for &Rational {
    type Output = Rational;

    /// Panics on a zero divisor; use `checked_div` where the divisor is not
    /// known to be nonzero.
    fn div(self, rhs: &Rational) -> Rational {
        self.checked_div(rhs).expect("rational division by zero")
    }
}

impl Neg for &Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        Rational::from_reduced(-&self.num, self.den.clone())
    }
}

impl Neg for Rational {
    type Output = Rational;

    fn neg(self) -> Rational {
        Rational::from_reduced(-self.num, self.den)
    }
}

macro_rules! forward_binop {
    ($imp:ident, $method:ident) => {
        impl $imp<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl $imp<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
        impl $imp<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);
