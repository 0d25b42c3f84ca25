use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number; always stored in lowest terms.
pub type Rational = BigRational;

/// Parse `"p/q"`, `"p"` or a plain decimal such as `"1.3"` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).ok()?;
        let d = BigInt::from_str(den.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.trim_start().starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).ok()?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_part = BigInt::from_str(frac).ok()?;
        let magnitude = int_part.abs() * &scale + frac_part;
        let n = if negative { -magnitude } else { magnitude };
        return Some(Rational::new(n, scale));
    }
    BigInt::from_str(s).ok().map(Rational::from_integer)
}

/// Render a rational as `"p"` or `"p/q"`.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A Gaussian rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar {
    re: Rational,
    im: Rational,
}

impl Scalar {
    pub fn new(re: Rational, im: Rational) -> Self {
        Scalar { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Scalar { re, im: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::real(int(n))
    }

    pub fn zero() -> Self {
        Scalar::real(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::real(Rational::one())
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -self.im.clone() }
    }

    /// |z|², exact.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Scalar { re: &self.re * k, im: &self.im * k }
    }

    /// Division; `None` when the divisor is zero.
    pub fn checked_div(&self, rhs: &Scalar) -> Option<Scalar> {
        let n = rhs.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let num = self * &rhs.conj();
        Some(Scalar { re: num.re / &n, im: num.im / n })
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar::real(&self.re * &rhs.re);
        }
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl From<Rational> for Scalar {
    fn from(re: Rational) -> Self {
        Scalar::real(re)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", format_rational(&self.re));
        }
        if self.re.is_zero() {
            return write!(f, "{}i", format_rational(&self.im));
        }
        if self.im.is_negative() {
            write!(f, "{}-{}i", format_rational(&self.re), format_rational(&-self.im.clone()))
        } else {
            write!(f, "{}+{}i", format_rational(&self.re), format_rational(&self.im))
        }
    }
}
