//! Truncated formal power series over exact rationals, plus the integer
//! polynomials and rational functions used to describe substitutions.
//!
//! Every operation here is exact. Binary operations on series of different
//! truncation orders silently truncate to the smaller order, which is the
//! usual semantics of `O(z^{N+1})` arithmetic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series has a zero constant term and cannot be inverted")]
    ZeroConstantTerm,
    #[error("inner series of a composition must have zero constant term")]
    NonzeroInnerConstant,
    #[error("rational function has a pole at the origin")]
    PoleAtOrigin,
    #[error("constant term {0} is not the square of a rational")]
    NonSquareConstant(BigRational),
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("series must have at least one coefficient")]
    Empty,
}

/// Writes every coefficient over the lcm of the denominators.
pub(crate) fn common_denominator(coeffs: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = coeffs.iter().fold(BigInt::one(), |acc, c| {
        if c.denom().is_one() {
            acc
        } else {
            acc.lcm(c.denom())
        }
    });
    let ints = coeffs
        .iter()
        .map(|c| {
            if den.is_one() {
                c.numer().clone()
            } else {
                c.numer() * (&den / c.denom())
            }
        })
        .collect();
    (ints, den)
}

pub(crate) fn over_denominator(ints: Vec<BigInt>, den: &BigInt) -> Vec<BigRational> {
    if den.is_one() {
        ints.into_iter().map(BigRational::from_integer).collect()
    } else {
        ints.into_iter()
            .map(|n| BigRational::new(n, den.clone()))
            .collect()
    }
}

/// Truncated product of two integer coefficient vectors, skipping zeros.
pub(crate) fn convolve(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// A formal power series `Σ_{k≤N} c_k z^k` known modulo `z^{N+1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order() + 1)
    }
}

impl TruncatedSeries {
    /// Builds a series of order `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(Self { coeffs })
    }

    /// Coefficients are padded with zeros or truncated to fit `order`.
    pub fn from_rationals(mut coeffs: Vec<BigRational>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        Self { coeffs }
    }

    pub fn from_integers(coeffs: &[BigInt], order: usize) -> Self {
        let mut v: Vec<BigRational> = coeffs
            .iter()
            .take(order + 1)
            .cloned()
            .map(BigRational::from_integer)
            .collect();
        v.resize(order + 1, BigRational::zero());
        Self { coeffs: v }
    }

    pub fn from_i64(coeffs: &[i64], order: usize) -> Self {
        let ints: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        Self::from_integers(&ints, order)
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(0, BigRational::one(), order)
    }

    /// `c·z^k`, which is zero when `k > order`.
    pub fn monomial(k: usize, c: BigRational, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The identity series `z`.
    pub fn variable(order: usize) -> Self {
        Self::monomial(1, BigRational::one(), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigRational> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn set_coeff(&mut self, k: usize, c: BigRational) {
        if k <= self.order() {
            self.coeffs[k] = c;
        }
    }

    /// Index of the first nonzero coefficient, `None` for the zero series.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_rationals(self.coeffs.iter().take(order + 1).cloned().collect(), order)
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    /// The coefficients as integers, if all of them are.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| {
                if c.is_integer() {
                    Some(c.to_integer())
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by `z^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for i in 0..=n.saturating_sub(k) {
            if i + k <= n {
                out.coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        out
    }

    /// First index where the two series differ, within the common order.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        let n = self.order().min(other.order());
        (0..=n).find(|&k| self.coeffs[k] != other.coeffs[k])
    }

    /// Largest `n` such that both series agree through `z^n`, or `None` if
    /// they already differ at the constant term.
    pub fn agreement_order(&self, other: &Self) -> Option<usize> {
        match self.first_difference(other) {
            None => Some(self.order().min(other.order())),
            Some(0) => None,
            Some(k) => Some(k - 1),
        }
    }

    /// Multiplies by `z`, raising the order by one.
    pub fn shift_up(&self) -> Self {
        let mut c = vec![BigRational::zero()];
        c.extend(self.coeffs.iter().cloned());
        Self { coeffs: c }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = ps_mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = ps_mul(&base, &base);
            }
        }
        acc
    }
}

/// Cauchy product truncated at the smaller order.
pub fn ps_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    let order = a.order().min(b.order());
    let (ai, ad) = common_denominator(&a.coeffs[..=order]);
    let (bi, bd) = common_denominator(&b.coeffs[..=order]);
    let prod = convolve(&ai, &bi, order + 1);
    TruncatedSeries {
        coeffs: over_denominator(prod, &(ad * bd)),
    }
}

/// Multiplicative inverse of a series with nonzero constant term.
pub fn ps_recip(a: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    let a0 = &a.coeffs[0];
    if a0.is_zero() {
        return Err(SeriesError::ZeroConstantTerm);
    }
    let n = a.order();
    if a.is_integral() && a0.abs().is_one() {
        // b_k = -a_0 Σ_{j≥1} a_j b_{k-j}, all integral since a_0 = ±1.
        let ai: Vec<BigInt> = a.coeffs.iter().map(|c| c.to_integer()).collect();
        let unit = ai[0].clone();
        let mut b: Vec<BigInt> = Vec::with_capacity(n + 1);
        b.push(unit.clone());
        for k in 1..=n {
            let mut s = BigInt::zero();
            for j in 1..=k {
                if !ai[j].is_zero() {
                    s += &ai[j] * &b[k - j];
                }
            }
            b.push(-(s * &unit));
        }
        return Ok(TruncatedSeries::from_integers(&b, n));
    }
    let inv0 = a0.recip();
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    b.push(inv0.clone());
    for k in 1..=n {
        let mut s = BigRational::zero();
        for j in 1..=k {
            if !a.coeffs[j].is_zero() {
                s += &a.coeffs[j] * &b[k - j];
            }
        }
        b.push(-(s * &inv0));
    }
    Ok(TruncatedSeries { coeffs: b })
}

/// `outer(inner(z))` by Horner's scheme; `inner` must vanish at 0.
pub fn ps_compose(
    outer: &TruncatedSeries,
    inner: &TruncatedSeries,
) -> Result<TruncatedSeries, SeriesError> {
    if !inner.coeffs[0].is_zero() {
        return Err(SeriesError::NonzeroInnerConstant);
    }
    let order = outer.order().min(inner.order());
    let inner = inner.truncate(order);
    let top = match inner.valuation() {
        // inner ≡ 0: only the constant term of outer survives.
        None => 0,
        Some(v) => order / v,
    };
    let mut acc = TruncatedSeries::monomial(0, outer.coeff(top), order);
    for k in (0..top).rev() {
        acc = ps_mul(&acc, &inner);
        acc.coeffs[0] += &outer.coeffs[k];
    }
    Ok(acc)
}

/// Taylor expansion at 0 of a rational function, through `z^order`.
pub fn ps_expand_rational(
    r: &RationalFunction,
    order: usize,
) -> Result<TruncatedSeries, SeriesError> {
    let d0 = r.den.coeff(0);
    if d0.is_zero() {
        return Err(SeriesError::PoleAtOrigin);
    }
    let num = TruncatedSeries::from_integers(&r.num.coeffs, order);
    let den = TruncatedSeries::from_integers(&r.den.coeffs, order);
    Ok(ps_mul(&num, &ps_recip(&den)?))
}

/// Square root with positive constant term; the constant must be a
/// rational square.
pub fn ps_sqrt(a: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
    let a0 = &a.coeffs[0];
    let root0 = rational_sqrt(a0).ok_or_else(|| SeriesError::NonSquareConstant(a0.clone()))?;
    if root0.is_zero() {
        return Err(SeriesError::NonSquareConstant(a0.clone()));
    }
    let n = a.order();
    let two_r0 = &root0 * BigRational::from_integer(BigInt::from(2));
    let inv = two_r0.recip();
    let mut r: Vec<BigRational> = Vec::with_capacity(n + 1);
    r.push(root0);
    for k in 1..=n {
        let mut s = a.coeffs[k].clone();
        for i in 1..k {
            s -= &r[i] * &r[k - i];
        }
        r.push(s * &inv);
    }
    Ok(TruncatedSeries { coeffs: r })
}

/// Formal derivative; the order drops by one (order 0 stays order 0).
pub fn ps_derive(a: &TruncatedSeries) -> TruncatedSeries {
    let n = a.order();
    if n == 0 {
        return TruncatedSeries::zero(0);
    }
    let coeffs = (0..n)
        .map(|k| &a.coeffs[k + 1] * BigRational::from_integer(BigInt::from(k + 1)))
        .collect();
    TruncatedSeries { coeffs }
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order)
            .map(|k| &self.coeffs[k] + &rhs.coeffs[k])
            .collect();
        TruncatedSeries { coeffs }
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let order = self.order().min(rhs.order());
        let coeffs = (0..=order)
            .map(|k| &self.coeffs[k] - &rhs.coeffs[k])
            .collect();
        TruncatedSeries { coeffs }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        ps_mul(self, rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Dense polynomial with integer coefficients, lowest degree first and no
/// trailing zeros (the zero polynomial is empty).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("z"))
    }
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    /// The monomial `x^k`.
    pub fn x_pow(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    /// Non-negative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Divides every coefficient by `c`, which must divide them all.
    pub fn div_scalar_exact(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a / c).collect())
    }

    pub fn primitive_part(&self) -> Self {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            self.clone()
        } else {
            self.div_scalar_exact(&c)
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![BigInt::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Self { coeffs: c }
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        let x = BigInt::from(x);
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * &x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| {
                acc * x + BigRational::from_integer(c.clone())
            })
    }

    /// Pseudo-remainder `lc(b)^{deg a - deg b + 1}·a mod b`.
    fn pseudo_rem(a: &Self, b: &Self) -> Self {
        let db = b.degree().expect("pseudo-remainder by zero polynomial");
        let lb = b.leading();
        let mut r = a.clone();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.leading();
            let t = b.scale(&lr).shift(dr - db);
            r = &r.scale(&lb) - &t;
        }
        r
    }

    /// Primitive gcd over `Z[x]`, with positive leading coefficient.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut x = a.primitive_part();
        let mut y = b.primitive_part();
        if x.degree() < y.degree() {
            std::mem::swap(&mut x, &mut y);
        }
        while !y.is_zero() {
            let r = Self::pseudo_rem(&x, &y).primitive_part();
            x = y;
            y = r;
        }
        if x.leading().is_negative() {
            x = -&x;
        }
        x
    }

    /// Exact quotient `a / b`; `None` if `b` does not divide `a` in `Z[x]`.
    pub fn div_exact(a: &Self, b: &Self) -> Option<Self> {
        let db = b.degree()?;
        let lb = b.leading();
        let mut r = a.clone();
        let Some(da) = a.degree() else {
            return Some(Self::default());
        };
        if da < db {
            return None;
        }
        let mut q = vec![BigInt::zero(); da - db + 1];
        while let Some(dr) = r.degree() {
            if dr < db {
                return None;
            }
            let (qc, rem) = r.leading().div_rem(&lb);
            if !rem.is_zero() {
                return None;
            }
            r = &r - &b.scale(&qc).shift(dr - db);
            q[dr - db] = qc;
        }
        Some(Self::new(q))
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let coeff_shown = !(mag.is_one() && k > 0);
            if coeff_shown {
                out.push_str(&mag.to_string());
            }
            match k {
                0 => {}
                1 => out.push_str(var),
                _ => out.push_str(&format!("{var}^{k}")),
            }
        }
        out
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::default();
        }
        let len = self.coeffs.len() + rhs.coeffs.len() - 1;
        IntPoly::new(convolve(&self.coeffs, &rhs.coeffs, len))
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Quotient of integer polynomials in canonical form: coprime, jointly
/// content-free, and the lowest nonzero denominator coefficient positive.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: IntPoly,
    den: IntPoly,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})/({})",
            self.num.display_in("z"),
            self.den.display_in("z")
        )
    }
}

impl RationalFunction {
    pub fn new(num: IntPoly, den: IntPoly) -> Result<Self, SeriesError> {
        if den.is_zero() {
            return Err(SeriesError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Self {
                num,
                den: IntPoly::one(),
            });
        }
        let g = IntPoly::gcd(&num, &den);
        let mut num = IntPoly::div_exact(&num, &g).expect("gcd divides numerator");
        let mut den = IntPoly::div_exact(&den, &g).expect("gcd divides denominator");
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = num.div_scalar_exact(&c);
            den = den.div_scalar_exact(&c);
        }
        let low = den.valuation().map(|v| den.coeff(v)).unwrap_or_default();
        if low.is_negative() {
            num = -&num;
            den = -&den;
        }
        Ok(Self { num, den })
    }

    pub fn from_i64(num: &[i64], den: &[i64]) -> Result<Self, SeriesError> {
        Self::new(IntPoly::from_i64(num), IntPoly::from_i64(den))
    }

    pub fn polynomial(p: IntPoly) -> Self {
        Self::new(p, IntPoly::one()).expect("unit denominator")
    }

    pub fn constant(c: i64) -> Self {
        Self::polynomial(IntPoly::from_i64(&[c]))
    }

    /// The identity map `z`.
    pub fn variable() -> Self {
        Self::polynomial(IntPoly::x_pow(1))
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.num
    }

    pub fn denominator(&self) -> &IntPoly {
        &self.den
    }

    pub fn recip(&self) -> Result<Self, SeriesError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        Self::new(self.num.pow(e), self.den.pow(e)).expect("nonzero denominator")
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(n, self.den.pow(2)).expect("nonzero denominator")
    }

    /// Logarithmic derivative scaled by `z`: `z r'(z) / r(z)`.
    pub fn log_derivative(&self) -> Result<Self, SeriesError> {
        let zd = &self.derivative() * &Self::variable();
        zd.checked_div(self)
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, SeriesError> {
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    /// Valuation of the numerator minus that of the denominator.
    pub fn valuation(&self) -> Option<i64> {
        let vn = self.num.valuation()? as i64;
        let vd = self.den.valuation().expect("nonzero denominator") as i64;
        Some(vn - vd)
    }

    pub fn value_at_zero(&self) -> Option<BigRational> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            None
        } else {
            Some(BigRational::new(self.num.coeff(0), d0))
        }
    }

    pub fn eval_rational(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval_rational(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_rational(x) / d)
        }
    }

    pub fn expand(&self, order: usize) -> Result<TruncatedSeries, SeriesError> {
        ps_expand_rational(self, order)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("nonzero denominator")
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        let n = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        RationalFunction::new(n, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        let n = &(&self.num * &rhs.den) - &(&rhs.num * &self.den);
        RationalFunction::new(n, &self.den * &rhs.den).expect("nonzero denominator")
    }
}
