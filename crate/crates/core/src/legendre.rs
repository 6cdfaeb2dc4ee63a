//! Legendre polynomials, the generating function
//! `F(x; z) = Σ C(2n,n)^2 P_n(x) z^n`, and exact bivariate checks of the
//! Bailey–Brafman product formula and its two-variable self-replicating form.

use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::sequences::binomial;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LegendreError {
    #[error("term index {n} exceeds truncation degree {d}")]
    IndexAboveDegree { n: usize, d: usize },
    #[error("truncation degree must be at least {min}, got {d}")]
    DegreeTooSmall { d: usize, min: usize },
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact polynomial in `u, v`, truncated to total degree `deg`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariatePoly {
    deg: usize,
    /// `c[i][j]` is the coefficient of `u^i v^j`, `i + j ≤ deg`.
    c: Vec<Vec<BigRational>>,
}

impl BivariatePoly {
    pub fn zero(deg: usize) -> Self {
        Self {
            deg,
            c: (0..=deg)
                .map(|i| vec![BigRational::zero(); deg - i + 1])
                .collect(),
        }
    }

    pub fn one(deg: usize) -> Self {
        Self::monomial(0, 0, BigRational::one(), deg)
    }

    pub fn monomial(i: usize, j: usize, coeff: BigRational, deg: usize) -> Self {
        let mut p = Self::zero(deg);
        if i + j <= deg {
            p.c[i][j] = coeff;
        }
        p
    }

    /// Sum of `coeff · u^i v^j` over the given triples.
    pub fn from_terms(terms: &[(usize, usize, i64)], deg: usize) -> Self {
        let mut p = Self::zero(deg);
        for &(i, j, c) in terms {
            if i + j <= deg {
                p.c[i][j] += q(c);
            }
        }
        p
    }

    /// Univariate series in `u` (or `v` when `in_v`).
    pub fn from_univariate(coeffs: &[BigRational], in_v: bool, deg: usize) -> Self {
        let mut p = Self::zero(deg);
        for (k, a) in coeffs.iter().enumerate().take(deg + 1) {
            if in_v {
                p.c[0][k] = a.clone();
            } else {
                p.c[k][0] = a.clone();
            }
        }
        p
    }

    pub fn degree_bound(&self) -> usize {
        self.deg
    }

    pub fn coeff(&self, i: usize, j: usize) -> BigRational {
        if i + j <= self.deg {
            self.c[i][j].clone()
        } else {
            BigRational::zero()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().flatten().all(Zero::is_zero)
    }

    /// Smallest total degree carrying a nonzero coefficient.
    pub fn min_degree(&self) -> Option<usize> {
        (0..=self.deg).find(|&d| (0..=d).any(|i| !self.c[i][d - i].is_zero()))
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self {
            deg: self.deg,
            c: self
                .c
                .iter()
                .map(|r| r.iter().map(|a| a * s).collect())
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.deg);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `u ↔ v`.
    pub fn swap(&self) -> Self {
        let mut p = Self::zero(self.deg);
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                p.c[j][i] = self.c[i][j].clone();
            }
        }
        p
    }

    /// Coefficients of `t^d` after `u = v = t`.
    pub fn diagonal(&self) -> Vec<BigRational> {
        (0..=self.deg)
            .map(|d| (0..=d).map(|i| &self.c[i][d - i]).sum())
            .collect()
    }

    /// `u → u^a`, `v → v^b`, truncated.
    pub fn substitute_powers(&self, a: usize, b: usize) -> Self {
        let mut p = Self::zero(self.deg);
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                if a * i + b * j <= self.deg && !self.c[i][j].is_zero() {
                    p.c[a * i][b * j] = self.c[i][j].clone();
                }
            }
        }
        p
    }

    /// `p(U(u), V(v))` for univariate series `U`, `V` without constant term.
    pub fn compose_separate(&self, uu: &Self, vv: &Self) -> Self {
        let d = self.deg;
        let upow: Vec<Self> = std::iter::successors(Some(Self::one(d)), |p| Some(p * uu))
            .take(d + 1)
            .collect();
        let vpow: Vec<Self> = std::iter::successors(Some(Self::one(d)), |p| Some(p * vv))
            .take(d + 1)
            .collect();
        let mut out = Self::zero(d);
        for (i, ui) in upow.iter().enumerate() {
            for (j, vj) in vpow.iter().enumerate().take(d + 1 - i) {
                if !self.c[i][j].is_zero() {
                    out = &out + &(ui * vj).scale(&self.c[i][j]);
                }
            }
        }
        out
    }

    /// Largest `d` such that all coefficients of total degree `≤ d` agree;
    /// `None` if the constant terms differ.
    pub fn agreement_degree(&self, other: &Self) -> Option<usize> {
        let d = self.deg.min(other.deg);
        match (0..=d).find(|&t| (0..=t).any(|i| self.coeff(i, t - i) != other.coeff(i, t - i))) {
            None => Some(d),
            Some(0) => None,
            Some(t) => Some(t - 1),
        }
    }
}

impl Add for &BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: &BivariatePoly) -> BivariatePoly {
        let deg = self.deg.min(rhs.deg);
        let mut p = BivariatePoly::zero(deg);
        for i in 0..=deg {
            for j in 0..=deg - i {
                p.c[i][j] = &self.c[i][j] + &rhs.c[i][j];
            }
        }
        p
    }
}

impl Sub for &BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, rhs: &BivariatePoly) -> BivariatePoly {
        self + &rhs.scale(&-BigRational::one())
    }
}

impl Mul for &BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: &BivariatePoly) -> BivariatePoly {
        let deg = self.deg.min(rhs.deg);
        let mut p = BivariatePoly::zero(deg);
        for i in 0..=deg {
            for j in 0..=deg - i {
                let a = &self.c[i][j];
                if a.is_zero() {
                    continue;
                }
                for k in 0..=deg - i - j {
                    for l in 0..=deg - i - j - k {
                        let b = &rhs.c[k][l];
                        if !b.is_zero() {
                            p.c[i + k][j + l] += a * b;
                        }
                    }
                }
            }
        }
        p
    }
}

/// `P_n(x)` with exact coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegendrePoly {
    pub n: usize,
    pub coeffs: Vec<BigRational>,
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_pow(a: &[BigRational], e: usize) -> Vec<BigRational> {
    (0..e).fold(vec![BigRational::one()], |acc, _| poly_mul(&acc, a))
}

impl LegendrePoly {
    fn trimmed(n: usize, mut coeffs: Vec<BigRational>) -> Self {
        coeffs.resize(n + 1, BigRational::zero());
        Self { n, coeffs }
    }

    /// `2^{-n} Σ C(n,k)^2 (x−1)^k (x+1)^{n−k}`.
    pub fn binomial_form(n: usize) -> Self {
        let xm = [q(-1), q(1)];
        let xp = [q(1), q(1)];
        let mut acc = vec![BigRational::zero(); n + 1];
        for k in 0..=n {
            let c = BigRational::from_integer(binomial(n as i64, k as i64).pow(2));
            let t = poly_mul(&poly_pow(&xm, k), &poly_pow(&xp, n - k));
            for (a, b) in acc.iter_mut().zip(t) {
                *a += &c * b;
            }
        }
        let scale = BigRational::new(BigInt::one(), BigInt::from(2).pow(n as u32));
        Self::trimmed(n, acc.into_iter().map(|a| a * &scale).collect())
    }

    /// `₂F₁(−n, n+1; 1; (1−x)/2)` as a terminating sum.
    pub fn hypergeometric_form(n: usize) -> Self {
        let y = [
            BigRational::new(BigInt::one(), BigInt::from(2)),
            BigRational::new(BigInt::from(-1), BigInt::from(2)),
        ];
        let mut acc = vec![BigRational::zero(); n + 1];
        let mut c = BigRational::one();
        for k in 0..=n {
            let t = poly_pow(&y, k);
            for (a, b) in acc.iter_mut().zip(t) {
                *a += &c * b;
            }
            // (−n)_k (n+1)_k / (k!)^2 → next k
            let k = k as i64;
            c = c * q((k - n as i64) * (n as i64 + 1 + k)) / q((k + 1) * (k + 1));
        }
        Self::trimmed(n, acc)
    }

    /// `P_0 … P_{n_max}` from `(n+1)P_{n+1} = (2n+1) x P_n − n P_{n−1}`.
    pub fn by_recurrence(n_max: usize) -> Vec<Self> {
        let mut out = vec![Self::trimmed(0, vec![q(1)])];
        if n_max >= 1 {
            out.push(Self::trimmed(1, vec![q(0), q(1)]));
        }
        for n in 1..n_max {
            let mut next = vec![BigRational::zero(); n + 2];
            for (k, a) in out[n].coeffs.iter().enumerate() {
                next[k + 1] += a * q(2 * n as i64 + 1);
            }
            for (k, a) in out[n - 1].coeffs.iter().enumerate() {
                next[k] -= a * q(n as i64);
            }
            let inv = BigRational::new(BigInt::one(), BigInt::from(n + 1));
            out.push(Self::trimmed(
                n + 1,
                next.into_iter().map(|a| a * &inv).collect(),
            ));
        }
        out
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

pub fn legendre_poly(n: usize) -> LegendrePoly {
    LegendrePoly::binomial_form(n)
}

fn central_sq(n: usize) -> BigRational {
    BigRational::from_integer(binomial(2 * n as i64, n as i64).pow(2))
}

/// `C(2n,n)^2 · Σ_k p_k N^k D^{n−k} · w^n`: the `n`-th term of
/// `F(N/D; D·w)` with the denominator cleared.
fn cleared_term(
    n: usize,
    npow: &[BivariatePoly],
    dpow: &[BivariatePoly],
    wpow: &BivariatePoly,
) -> BivariatePoly {
    let deg = npow[0].degree_bound();
    let p = legendre_poly(n);
    let mut acc = BivariatePoly::zero(deg);
    for (k, pk) in p.coeffs.iter().enumerate() {
        if pk.is_zero() {
            continue;
        }
        acc = &acc + &(&npow[k] * &dpow[n - k]).scale(pk);
    }
    let t = &acc.scale(&central_sq(n)) * wpow;
    debug_assert!(
        t.min_degree().is_none_or(|m| m >= n),
        "term {n} has low-degree part"
    );
    t
}

/// `Σ_{n ≤ deg} C(2n,n)^2 P_n(N/D) (D w)^n`, each term a polynomial.
fn f_cleared(
    num: &BivariatePoly,
    den: &BivariatePoly,
    w: &BivariatePoly,
    deg: usize,
) -> BivariatePoly {
    let npow: Vec<BivariatePoly> =
        std::iter::successors(Some(BivariatePoly::one(deg)), |p| Some(p * num))
            .take(deg + 1)
            .collect();
    let dpow: Vec<BivariatePoly> =
        std::iter::successors(Some(BivariatePoly::one(deg)), |p| Some(p * den))
            .take(deg + 1)
            .collect();
    let wpow: Vec<BivariatePoly> =
        std::iter::successors(Some(BivariatePoly::one(deg)), |p| Some(p * w))
            .take(deg + 1)
            .collect();
    let terms: Vec<BivariatePoly> = (0..=deg)
        .into_par_iter()
        .map(|n| cleared_term(n, &npow, &dpow, &wpow[n]))
        .collect();
    terms
        .iter()
        .fold(BivariatePoly::zero(deg), |acc, t| &acc + t)
}

/// `C(2n,n)^2 (U−V)^n P_n((U+V−2UV)/(U−V)) / 16^n` truncated at total
/// degree `deg`.
pub fn homogenized_term(n: usize, deg: usize) -> Result<BivariatePoly, LegendreError> {
    if n > deg {
        return Err(LegendreError::IndexAboveDegree { n, d: deg });
    }
    let (num, den) = bailey_brafman_args(deg);
    let npow: Vec<BivariatePoly> =
        std::iter::successors(Some(BivariatePoly::one(deg)), |p| Some(p * &num))
            .take(n + 1)
            .collect();
    let dpow: Vec<BivariatePoly> =
        std::iter::successors(Some(BivariatePoly::one(deg)), |p| Some(p * &den))
            .take(n + 1)
            .collect();
    let w = BivariatePoly::one(deg).scale(&BigRational::new(
        BigInt::one(),
        BigInt::from(16).pow(n as u32),
    ));
    Ok(cleared_term(n, &npow, &dpow, &w))
}

fn bailey_brafman_args(deg: usize) -> (BivariatePoly, BivariatePoly) {
    let num = BivariatePoly::from_terms(&[(1, 0, 1), (0, 1, 1), (1, 1, -2)], deg);
    let den = BivariatePoly::from_terms(&[(1, 0, 1), (0, 1, -1)], deg);
    (num, den)
}

/// Coefficients `C(2n,n)^2 / 16^n` of `₂F₁(½,½;1;t)`.
pub fn hypergeometric_half(deg: usize) -> Vec<BigRational> {
    (0..=deg)
        .map(|n| central_sq(n) / BigRational::from_integer(BigInt::from(16).pow(n as u32)))
        .collect()
}

/// Left side of the Bailey–Brafman formula in `U, V`.
pub fn bailey_brafman_lhs(deg: usize) -> BivariatePoly {
    let (num, den) = bailey_brafman_args(deg);
    let w = BivariatePoly::one(deg).scale(&BigRational::new(BigInt::one(), BigInt::from(16)));
    f_cleared(&num, &den, &w, deg)
}

pub fn bailey_brafman_rhs(deg: usize) -> BivariatePoly {
    let g = hypergeometric_half(deg);
    &BivariatePoly::from_univariate(&g, false, deg) * &BivariatePoly::from_univariate(&g, true, deg)
}

/// Largest total degree through which both sides agree.
pub fn bailey_brafman_check(deg: usize) -> usize {
    bailey_brafman_lhs(deg)
        .agreement_degree(&bailey_brafman_rhs(deg))
        .unwrap_or(0)
}

/// Left side of the two-variable identity:
/// `F((u²+v²−2u²v²)/(u²−v²); (u²−v²)/16)`.
pub fn leg_lhs(deg: usize) -> BivariatePoly {
    let num = BivariatePoly::from_terms(&[(2, 0, 1), (0, 2, 1), (2, 2, -2)], deg);
    let den = BivariatePoly::from_terms(&[(2, 0, 1), (0, 2, -1)], deg);
    let w = BivariatePoly::one(deg).scale(&BigRational::new(BigInt::one(), BigInt::from(16)));
    f_cleared(&num, &den, &w, deg)
}

fn inv_one_plus_pow(e: u32, in_v: bool, deg: usize) -> BivariatePoly {
    // (1+t)^{-e} = Σ (−1)^k C(e+k−1, k) t^k
    let c: Vec<BigRational> = (0..=deg)
        .map(|k| {
            let b = binomial(e as i64 + k as i64 - 1, k as i64);
            BigRational::from_integer(if k % 2 == 0 { b } else { -b })
        })
        .collect();
    BivariatePoly::from_univariate(&c, in_v, deg)
}

/// Right side: `1/((1+u)(1+v)) · F(N/D; D / (4(1+u)²(1+v)²))` with
/// `N = (1+uv)(u+v) − 4uv`, `D = (1−uv)(u−v)`.
pub fn leg_rhs(deg: usize) -> BivariatePoly {
    let num = BivariatePoly::from_terms(
        &[(1, 0, 1), (0, 1, 1), (2, 1, 1), (1, 2, 1), (1, 1, -4)],
        deg,
    );
    let den = BivariatePoly::from_terms(&[(1, 0, 1), (0, 1, -1), (2, 1, -1), (1, 2, 1)], deg);
    let w = (&inv_one_plus_pow(2, false, deg) * &inv_one_plus_pow(2, true, deg))
        .scale(&BigRational::new(BigInt::one(), BigInt::from(4)));
    let pre = &inv_one_plus_pow(1, false, deg) * &inv_one_plus_pow(1, true, deg);
    &pre * &f_cleared(&num, &den, &w, deg)
}

/// Largest total degree through which both sides agree.
pub fn leg_identity_check(deg: usize) -> usize {
    leg_lhs(deg).agreement_degree(&leg_rhs(deg)).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn small_legendre() {
        assert_eq!(legendre_poly(0).coeffs, vec![r(1, 1)]);
        assert_eq!(legendre_poly(1).coeffs, vec![r(0, 1), r(1, 1)]);
        assert_eq!(legendre_poly(2).coeffs, vec![r(-1, 2), r(0, 1), r(3, 2)]);
    }

    #[test]
    fn three_forms_agree() {
        let rec = LegendrePoly::by_recurrence(30);
        for (n, p) in rec.iter().enumerate() {
            assert_eq!(&LegendrePoly::binomial_form(n), p, "n={n}");
            assert_eq!(&LegendrePoly::hypergeometric_form(n), p, "n={n}");
            assert_eq!(p.eval(&r(1, 1)), r(1, 1));
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let x = r(3, 7);
            assert_eq!(p.eval(&-x.clone()), p.eval(&x) * r(sign, 1));
        }
    }

    #[test]
    fn homogenized_examples() {
        assert_eq!(homogenized_term(0, 4).unwrap(), BivariatePoly::one(4));
        let t1 = homogenized_term(1, 4).unwrap();
        let want =
            BivariatePoly::from_terms(&[(1, 0, 1), (0, 1, 1), (1, 1, -2)], 4).scale(&r(1, 4));
        assert_eq!(t1, want);
        let t2 = homogenized_term(2, 4).unwrap();
        assert_eq!(t2.swap(), t2);
        assert_eq!(t2.min_degree(), Some(2));
        assert!(homogenized_term(5, 4).is_err());
    }

    #[test]
    fn bailey_brafman_low_degree() {
        assert_eq!(bailey_brafman_check(1), 1);
        assert_eq!(bailey_brafman_check(10), 10);
        let (l, rr) = (bailey_brafman_lhs(6), bailey_brafman_rhs(6));
        assert_eq!(l.diagonal(), rr.diagonal());
    }

    #[test]
    fn leg_low_degree() {
        assert_eq!(leg_identity_check(2), 2);
        assert!(leg_lhs(4).coeff(0, 0).is_one());
        assert!(leg_rhs(4).coeff(0, 0).is_one());
    }

    #[test]
    fn leg_rhs_by_substitution() {
        // U = 4u/(1+u)^2, V = 4v/(1+v)^2 substituted into the product side
        let d = 8;
        let g = hypergeometric_half(d);
        let prod = &BivariatePoly::from_univariate(&g, false, d)
            * &BivariatePoly::from_univariate(&g, true, d);
        let uu = &inv_one_plus_pow(2, false, d) * &BivariatePoly::from_terms(&[(1, 0, 4)], d);
        let vv = &inv_one_plus_pow(2, true, d) * &BivariatePoly::from_terms(&[(0, 1, 4)], d);
        let pre = &inv_one_plus_pow(1, false, d) * &inv_one_plus_pow(1, true, d);
        let via_sub = &pre * &prod.compose_separate(&uu, &vv);
        assert_eq!(via_sub.agreement_degree(&leg_rhs(d)), Some(d));
        assert_eq!(leg_lhs(d), bailey_brafman_lhs(d).substitute_powers(2, 2));
    }

    #[test]
    fn perturbed_identity_fails() {
        let d = 6;
        let mut bad = bailey_brafman_rhs(d);
        bad.c[2][1] += r(1, 1);
        assert_eq!(bailey_brafman_lhs(d).agreement_degree(&bad), Some(2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]
        #[test]
        fn monotone_in_degree(d in 2usize..8) {
            prop_assert_eq!(bailey_brafman_check(d), d);
            let full = bailey_brafman_lhs(8);
            let lower = bailey_brafman_lhs(d);
            prop_assert_eq!(full.agreement_degree(&lower), Some(d));
        }
    }
}
