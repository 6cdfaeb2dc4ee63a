//! Binary floating point with a big-integer mantissa: `mant · 2^exp`,
//! rounded to nearest after each operation at `prec` bits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AgmError;

pub const MIN_PREC: u32 = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct PrecisionReal {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

fn bits(m: &BigInt) -> i64 {
    m.bits() as i64
}

/// `m / 2^s` rounded to nearest, ties away from zero.
fn shr_round(m: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        return m.clone();
    }
    let mag = m.magnitude();
    let q = (mag >> (s - 1)) + 1u32;
    let q = q >> 1;
    BigInt::from_biguint(
        if m.is_negative() {
            Sign::Minus
        } else {
            Sign::Plus
        },
        q,
    )
}

impl PrecisionReal {
    pub fn new(mant: BigInt, exp: i64, prec: u32) -> Self {
        let prec = prec.max(MIN_PREC);
        let mut r = Self { mant, exp, prec };
        r.normalize();
        r
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        let excess = bits(&self.mant) - self.prec as i64;
        if excess > 0 {
            self.mant = shr_round(&self.mant, excess as u64);
            self.exp += excess;
        }
        let tz = self.mant.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mant >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(BigInt::zero(), 0, prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        Self::new(BigInt::from(n), 0, prec)
    }

    pub fn from_bigint(n: &BigInt, prec: u32) -> Self {
        Self::new(n.clone(), 0, prec)
    }

    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        Self::from_int(num, prec) / Self::from_int(den, prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        Self::from_bigint(q.numer(), prec) / Self::from_bigint(q.denom(), prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self::new(self.mant.clone(), self.exp, prec)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            ..self.clone()
        }
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Self {
            exp: self.exp + k,
            ..self.clone()
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::new(&self.mant * k, self.exp, self.prec)
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        self.mul_int(&BigInt::from(k))
    }

    pub fn div_int(&self, k: &BigInt) -> Self {
        self / &Self::from_bigint(k, self.prec)
    }

    pub fn div_i64(&self, k: i64) -> Self {
        self.div_int(&BigInt::from(k))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Binary exponent `e` with `2^(e-1) ≤ |x| < 2^e`; `None` for zero.
    pub fn magnitude_exp(&self) -> Option<i64> {
        (!self.is_zero()).then(|| bits(&self.mant) + self.exp)
    }

    /// Principal square root; negative radicands are an error.
    pub fn sqrt(&self) -> Result<Self, AgmError> {
        self.root(2)
    }

    /// Positive real `n`-th root of a nonnegative value.
    pub fn root(&self, n: u32) -> Result<Self, AgmError> {
        if self.is_negative() {
            return Err(AgmError::NegativeRadicand(self.to_sci(12)));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let n64 = n as i64;
        let want = n64 * (self.prec as i64 + 2);
        let mut shift = (want - bits(&self.mant)).max(0);
        // exponent after shifting must be divisible by n
        shift += (self.exp - shift).rem_euclid(n64);
        let m = &self.mant << (shift as usize);
        let e = self.exp - shift;
        Ok(Self::new(m.nth_root(n), e / n64, self.prec))
    }

    /// Real `n`-th root for odd `n`, any sign.
    pub fn odd_root(&self, n: u32) -> Result<Self, AgmError> {
        assert!(n % 2 == 1, "odd root expected");
        Ok(if self.is_negative() {
            -&self.abs().root(n)?
        } else {
            self.root(n)?
        })
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let b = bits(&self.mant);
        let drop = (b - 60).max(0);
        let top = (&self.mant >> (drop as usize)).to_f64().unwrap_or(f64::NAN);
        let e = self.exp + drop;
        top * 2f64.powi(e.clamp(-1_000_000, 1_000_000) as i32)
    }

    /// `log10 |x|`, or `-inf` for zero. Works far outside the f64 range.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let b = bits(&self.mant);
        let drop = (b - 60).max(0);
        let top = (&self.mant.abs() >> (drop as usize))
            .to_f64()
            .unwrap_or(f64::NAN);
        top.log10() + ((self.exp + drop) as f64) * std::f64::consts::LOG10_2
    }

    /// Number of agreeing decimal digits, `-log10 |x - y| / |y|`.
    pub fn digits_against(&self, reference: &Self) -> f64 {
        let d = (self - reference).abs();
        if d.is_zero() {
            return (self.prec.min(reference.prec) as f64) * std::f64::consts::LOG10_2;
        }
        -(d.log10_abs() - reference.log10_abs())
    }

    /// `round(|x| · 10^digits)` with the sign of `x`.
    fn scaled_decimal(&self, digits: u32) -> BigInt {
        let t = &self.mant * BigInt::from(10).pow(digits);
        if self.exp >= 0 {
            t << (self.exp as usize)
        } else {
            shr_round(&t, (-self.exp) as u64)
        }
    }

    /// Fixed-point decimal string with `digits` places after the point.
    pub fn to_decimal(&self, digits: u32) -> String {
        let s = self.scaled_decimal(digits);
        let neg = s.is_negative();
        let mut body = s.abs().to_string();
        if body.len() <= digits as usize {
            body = format!("{}{body}", "0".repeat(digits as usize + 1 - body.len()));
        }
        let split = body.len() - digits as usize;
        let (ip, fp) = body.split_at(split);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{ip}")
        } else {
            format!("{sign}{ip}.{fp}")
        }
    }

    /// Scientific notation with `sig` significant digits.
    pub fn to_sci(&self, sig: u32) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let sig = sig.max(1);
        let mut e10 = self.log10_abs().floor() as i64;
        let digits_of = |e10: i64| -> BigInt {
            let k = sig as i64 - 1 - e10;
            let t = &self.mant
                * if k >= 0 {
                    BigInt::from(10).pow(k as u32)
                } else {
                    BigInt::one()
                };
            let d = if k < 0 {
                BigInt::from(10).pow((-k) as u32)
            } else {
                BigInt::one()
            };
            let num = if self.exp >= 0 {
                t << (self.exp as usize)
            } else {
                t
            };
            let den = if self.exp < 0 {
                d << ((-self.exp) as usize)
            } else {
                d
            };
            let (q, r) = num.abs().div_rem(&den);
            if (r << 1usize) >= den {
                q + 1
            } else {
                q
            }
        };
        let mut m = digits_of(e10);
        if m.to_string().len() > sig as usize {
            e10 += 1;
            m = digits_of(e10);
        } else if m.to_string().len() < sig as usize {
            e10 -= 1;
            m = digits_of(e10);
        }
        let s = m.to_string();
        let sign = if self.is_negative() { "-" } else { "" };
        let (h, t) = s.split_at(1);
        if t.is_empty() {
            format!("{sign}{h}e{e10}")
        } else {
            format!("{sign}{h}.{t}e{e10}")
        }
    }
}

impl fmt::Debug for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{} bits]", self.to_sci(20), self.prec)
    }
}

impl fmt::Display for PrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.prec as f64 * std::f64::consts::LOG10_2) as u32;
        write!(f, "{}", self.to_sci(digits.max(1)))
    }
}

impl PartialOrd for PrecisionReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = self - other;
        Some(d.signum().cmp(&0))
    }
}

impl Add for &PrecisionReal {
    type Output = PrecisionReal;
    fn add(self, rhs: &PrecisionReal) -> PrecisionReal {
        let prec = self.prec.min(rhs.prec);
        if rhs.is_zero() {
            return self.with_prec(prec);
        }
        if self.is_zero() {
            return rhs.with_prec(prec);
        }
        let (hi, lo) = if self.magnitude_exp() >= rhs.magnitude_exp() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        // Far below the last place of `hi`: a sticky bit keeps rounding honest.
        let gap = hi.magnitude_exp().unwrap() - lo.magnitude_exp().unwrap();
        if gap > prec as i64 + 4 {
            let sticky_exp = hi.magnitude_exp().unwrap() - prec as i64 - 4;
            let mut m = hi.mant.clone() << ((hi.exp - sticky_exp) as usize);
            m += lo.mant.signum();
            return PrecisionReal::new(m, sticky_exp, prec);
        }
        let e = hi.exp.min(lo.exp);
        let m = (&hi.mant << ((hi.exp - e) as usize)) + (&lo.mant << ((lo.exp - e) as usize));
        PrecisionReal::new(m, e, prec)
    }
}

impl Sub for &PrecisionReal {
    type Output = PrecisionReal;
    fn sub(self, rhs: &PrecisionReal) -> PrecisionReal {
        self + &(-rhs)
    }
}

impl Neg for &PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        PrecisionReal {
            mant: -&self.mant,
            ..self.clone()
        }
    }
}

impl Neg for PrecisionReal {
    type Output = PrecisionReal;
    fn neg(self) -> PrecisionReal {
        -&self
    }
}

impl Mul for &PrecisionReal {
    type Output = PrecisionReal;
    fn mul(self, rhs: &PrecisionReal) -> PrecisionReal {
        PrecisionReal::new(
            &self.mant * &rhs.mant,
            self.exp + rhs.exp,
            self.prec.min(rhs.prec),
        )
    }
}

impl Div for &PrecisionReal {
    type Output = PrecisionReal;
    fn div(self, rhs: &PrecisionReal) -> PrecisionReal {
        assert!(!rhs.is_zero(), "division by zero");
        let prec = self.prec.min(rhs.prec);
        // one extra bit so the final rounding sees the half-ulp
        let shift = (prec as i64 + 2 + bits(&rhs.mant) - bits(&self.mant)).max(0);
        let num = self.mant.magnitude() << (shift as usize + 1);
        let q = num / rhs.mant.magnitude();
        let sign = if self.mant.sign() == rhs.mant.sign() {
            Sign::Plus
        } else {
            Sign::Minus
        };
        let q = BigInt::from_biguint(sign, q);
        PrecisionReal::new(q, self.exp - rhs.exp - shift - 1, prec)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for PrecisionReal {
            type Output = PrecisionReal;
            fn $m(self, rhs: PrecisionReal) -> PrecisionReal {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&PrecisionReal> for PrecisionReal {
            type Output = PrecisionReal;
            fn $m(self, rhs: &PrecisionReal) -> PrecisionReal {
                (&self).$m(rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);
