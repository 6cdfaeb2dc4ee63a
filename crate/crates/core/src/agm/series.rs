use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use super::{bits_for_digits, AgmError, PrecisionReal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    /// Level 7 sequence `u_n`, radius `1/27`.
    U7,
    /// `C(2n, n)^3`, radius `1/64`.
    CentralCube,
}

impl SeriesKind {
    pub fn growth(self) -> i64 {
        match self {
            SeriesKind::U7 => 27,
            SeriesKind::CentralCube => 64,
        }
    }
}

/// Closed forms claimed for the series and iteration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Limit {
    OneOverEightPi,
    OneOverTwoPi,
    TwoOverThreePi,
    EightOverTwentyOnePi,
    /// `√π / Γ(5/6)^3`, checked only by cross-validation.
    SqrtPiOverGammaFiveSixthsCubed,
}

impl Limit {
    pub fn name(self) -> &'static str {
        match self {
            Limit::OneOverEightPi => "1/(8pi)",
            Limit::OneOverTwoPi => "1/(2pi)",
            Limit::TwoOverThreePi => "2/(3pi)",
            Limit::EightOverTwentyOnePi => "8/(21pi)",
            Limit::SqrtPiOverGammaFiveSixthsCubed => "sqrt(pi)/Gamma(5/6)^3",
        }
    }

    /// `c / π` for the rational multiples; `None` otherwise.
    pub fn value(self, pi: &PrecisionReal) -> Option<PrecisionReal> {
        let (n, d) = match self {
            Limit::OneOverEightPi => (1, 8),
            Limit::OneOverTwoPi => (1, 2),
            Limit::TwoOverThreePi => (2, 3),
            Limit::EightOverTwentyOnePi => (8, 21),
            Limit::SqrtPiOverGammaFiveSixthsCubed => return None,
        };
        Some(&PrecisionReal::from_ratio(n, d, pi.prec()) / pi)
    }
}

/// `Σ c_n (a + b n) x^n` with a claimed limit.
#[derive(Debug, Clone)]
pub struct SeriesTarget {
    pub name: String,
    pub kind: SeriesKind,
    pub a: PrecisionReal,
    pub b: PrecisionReal,
    pub x: PrecisionReal,
    pub limit: Limit,
    /// Data computed here from a displayed identity rather than quoted.
    pub derived: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesMethod {
    Geometric,
    /// Cohen–Rodriguez Villegas–Zagier acceleration of an alternating sum.
    Alternating,
}

#[derive(Debug, Clone)]
pub struct SeriesValue {
    pub value: PrecisionReal,
    pub terms: usize,
    /// Bound on the omitted tail (geometric) or the acceleration error.
    pub tail_bound: PrecisionReal,
    pub method: SeriesMethod,
}

struct Coeffs {
    kind: SeriesKind,
    n: usize,
    prev: BigInt,
    cur: BigInt,
}

impl Coeffs {
    fn new(kind: SeriesKind) -> Self {
        Self {
            kind,
            n: 0,
            prev: BigInt::from(0),
            cur: BigInt::one(),
        }
    }

    /// Returns `c_n` and advances.
    fn next(&mut self) -> BigInt {
        let out = self.cur.clone();
        let n = self.n as i64;
        let next = match self.kind {
            SeriesKind::U7 => {
                let a = BigInt::from((2 * n + 1) * (13 * n * n + 13 * n + 4)) * &self.cur
                    + BigInt::from(3 * n * (3 * n - 1) * (3 * n + 1)) * &self.prev;
                a / BigInt::from(n + 1).pow(3)
            }
            SeriesKind::CentralCube => {
                &self.cur * BigInt::from(2 * (2 * n + 1)).pow(3) / BigInt::from(n + 1).pow(3)
            }
        };
        self.prev = std::mem::replace(&mut self.cur, next);
        self.n += 1;
        out
    }
}

fn term(
    c: &BigInt,
    a: &PrecisionReal,
    b: &PrecisionReal,
    n: usize,
    xn: &PrecisionReal,
) -> PrecisionReal {
    let w = a + &b.mul_i64(n as i64);
    &w.mul_int(c) * xn
}

/// Sums the series to `digits` decimal digits.
pub fn eval_series(target: &SeriesTarget, digits: u32) -> Result<SeriesValue, AgmError> {
    let prec = bits_for_digits(digits)
        .min(target.x.prec())
        .max(super::MIN_PREC)
        + 32;
    let x = target.x.with_prec(prec);
    let (a, b) = (target.a.with_prec(prec), target.b.with_prec(prec));
    let r = target.kind.growth();
    let rx = x.abs().mul_i64(r).to_f64();
    let divergent = || AgmError::DivergentTarget {
        x: x.abs().to_sci(12),
        radius: format!("1/{r}"),
    };
    if rx > 1.0 + 1e-12 || (rx >= 1.0 - 1e-12 && !x.is_negative()) {
        return Err(divergent());
    }
    if x.is_negative() && rx >= 0.5 {
        return Ok(alternating(target.kind, &a, &b, &x.abs(), digits, prec));
    }
    let eps = PrecisionReal::one(prec).div_int(&BigInt::from(10).pow(digits + 2));
    let mut coeffs = Coeffs::new(target.kind);
    let mut sum = PrecisionReal::zero(prec);
    let mut xn = PrecisionReal::one(prec);
    let mut n = 0usize;
    loop {
        let c = coeffs.next();
        let t = term(&c, &a, &b, n, &xn);
        sum = &sum + &t;
        xn = &xn * &x;
        n += 1;
        if n >= 10 {
            let rho = rx * (1.0 + 4.0 / n as f64);
            if rho < 1.0 {
                let ratio = rho / (1.0 - rho);
                let bound = t
                    .abs()
                    .mul_i64((ratio * 1e9) as i64 + 1)
                    .div_i64(1_000_000_000);
                if bound.abs() < (&eps * &sum.abs()) {
                    return Ok(SeriesValue {
                        value: sum,
                        terms: n,
                        tail_bound: bound,
                        method: SeriesMethod::Geometric,
                    });
                }
            }
        }
    }
}

fn alternating(
    kind: SeriesKind,
    a: &PrecisionReal,
    b: &PrecisionReal,
    ax: &PrecisionReal,
    digits: u32,
    prec: u32,
) -> SeriesValue {
    let n = (digits as f64 / 0.7656).ceil() as i64 + 20;
    let s8 = PrecisionReal::from_int(8, prec).sqrt().expect("positive");
    let mut d = (&PrecisionReal::from_int(3, prec) + &s8).pow(n as u32);
    d = (&d + &(&PrecisionReal::one(prec) / &d)).mul_pow2(-1);
    let mut bb = PrecisionReal::from_int(-1, prec);
    let mut c = -&d;
    let mut s = PrecisionReal::zero(prec);
    let mut coeffs = Coeffs::new(kind);
    let mut xn = PrecisionReal::one(prec);
    for k in 0..n {
        let ak = term(&coeffs.next(), a, b, k as usize, &xn);
        xn = &xn * ax;
        c = &bb - &c;
        s = &s + &(&c * &ak);
        bb = bb
            .mul_i64(2 * (k + n) * (k - n))
            .div_i64((2 * k + 1) * (k + 1));
    }
    let tail_bound = PrecisionReal::from_int(2, prec) / d.abs();
    SeriesValue {
        value: &s / &d,
        terms: n as usize,
        tail_bound,
        method: SeriesMethod::Alternating,
    }
}

impl SeriesTarget {
    /// `Σ u_n (4 + 21n) / 5^{3n+3} = 1/(8π)`.
    pub fn eq_n(prec: u32) -> Self {
        Self {
            name: "eq-n".into(),
            kind: SeriesKind::U7,
            a: PrecisionReal::from_ratio(4, 125, prec),
            b: PrecisionReal::from_ratio(21, 125, prec),
            x: PrecisionReal::from_ratio(1, 125, prec),
            limit: Limit::OneOverEightPi,
            derived: false,
        }
    }

    fn cube(name: &str, a: (i64, i64), x: (i64, i64), limit: Limit, prec: u32) -> Self {
        Self {
            name: name.into(),
            kind: SeriesKind::CentralCube,
            a: PrecisionReal::from_ratio(a.0, a.1, prec),
            b: PrecisionReal::one(prec),
            x: PrecisionReal::from_ratio(x.0, x.1, prec),
            limit,
            derived: false,
        }
    }

    /// Bauer: `Σ C(2n,n)^3 (1/4 + n)(−1/64)^n = 1/(2π)`.
    pub fn bauer(prec: u32) -> Self {
        Self::cube("bauer", (1, 4), (-1, 64), Limit::OneOverTwoPi, prec)
    }

    pub fn table6_n3(prec: u32) -> Self {
        Self::cube("n3", (1, 6), (1, 256), Limit::TwoOverThreePi, prec)
    }

    pub fn table6_n7(prec: u32) -> Self {
        Self::cube("n7", (5, 42), (1, 4096), Limit::EightOverTwentyOnePi, prec)
    }

    /// `x_0 = (3√21 − 14)/56`.
    pub fn x_n21(prec: u32) -> PrecisionReal {
        let s21 = PrecisionReal::from_int(21, prec).sqrt().expect("positive");
        (&s21.mul_i64(3) - &PrecisionReal::from_int(14, prec)).div_i64(56)
    }

    /// `Σ u_n a_0 x_0^n` with `a_0 = 3 K^{−1/3}`,
    /// `K = 128(√7 − √3) / (49 (5 − √21)^2)`, limit `√π/Γ(5/6)^3`.
    pub fn n21a(prec: u32) -> Self {
        let sq = |n: i64| PrecisionReal::from_int(n, prec).sqrt().expect("positive");
        let k = &(&sq(7) - &sq(3)).mul_i64(128)
            / &(&PrecisionReal::from_int(5, prec) - &sq(21))
                .pow(2)
                .mul_i64(49);
        let a = &PrecisionReal::from_int(3, prec) / &k.root(3).expect("positive");
        Self {
            name: "n21a".into(),
            kind: SeriesKind::U7,
            a,
            b: PrecisionReal::zero(prec),
            x: Self::x_n21(prec),
            limit: Limit::SqrtPiOverGammaFiveSixthsCubed,
            derived: false,
        }
    }

    /// The `N = 21` identity divided by `16√7`, so the limit is `1/(2π)`:
    /// `a_0 = (6√21 − 20)/(16√7)`, `b_0 = 15(√21 − 2)/(16√7)`.
    pub fn n21(prec: u32) -> Self {
        let sq = |n: i64| PrecisionReal::from_int(n, prec).sqrt().expect("positive");
        let scale = sq(7).mul_i64(16);
        let a = &(&sq(21).mul_i64(6) - &PrecisionReal::from_int(20, prec)) / &scale;
        let b = &(&sq(21) - &PrecisionReal::from_int(2, prec)).mul_i64(15) / &scale;
        Self {
            name: "n21".into(),
            kind: SeriesKind::U7,
            a,
            b,
            x: Self::x_n21(prec),
            limit: Limit::OneOverTwoPi,
            derived: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agm::oracle::machin_pi;

    fn digits(v: &PrecisionReal, want: &PrecisionReal) -> f64 {
        v.digits_against(want)
    }

    #[test]
    fn eq_n_to_one_over_eight_pi() {
        let prec = bits_for_digits(120);
        let pi = machin_pi(prec);
        let v = eval_series(&SeriesTarget::eq_n(prec), 110).unwrap();
        assert!(v.terms <= 200, "{} terms", v.terms);
        assert!(digits(&v.value, &Limit::OneOverEightPi.value(&pi).unwrap()) > 100.0);
    }

    #[test]
    fn table6_limits() {
        let prec = bits_for_digits(70);
        let pi = machin_pi(prec);
        for t in [
            SeriesTarget::bauer(prec),
            SeriesTarget::table6_n3(prec),
            SeriesTarget::table6_n7(prec),
        ] {
            let v = eval_series(&t, 55).unwrap();
            let d = digits(&v.value, &t.limit.value(&pi).unwrap());
            assert!(d > 50.0, "{}: {d}", t.name);
        }
        let bauer = eval_series(&SeriesTarget::bauer(prec), 55).unwrap();
        assert_eq!(bauer.method, SeriesMethod::Alternating);
    }

    #[test]
    fn n21_derived_weights() {
        let prec = bits_for_digits(70);
        let pi = machin_pi(prec);
        let t = SeriesTarget::n21(prec);
        let v = eval_series(&t, 55).unwrap();
        assert!(digits(&v.value, &Limit::OneOverTwoPi.value(&pi).unwrap()) > 50.0);
        assert!((t.x.to_f64() + 0.0045049).abs() < 1e-6);
        let plain = SeriesTarget {
            a: PrecisionReal::one(prec),
            ..SeriesTarget::n21a(prec)
        };
        let s = eval_series(&plain, 30).unwrap().value;
        assert!((s.to_f64() - 0.98289036819).abs() < 1e-10);
    }

    #[test]
    fn divergence_detected() {
        let prec = 128;
        let mut t = SeriesTarget::bauer(prec);
        t.x = PrecisionReal::from_ratio(1, 64, prec);
        assert!(matches!(
            eval_series(&t, 20),
            Err(AgmError::DivergentTarget { .. })
        ));
        t.x = PrecisionReal::from_ratio(-1, 60, prec);
        assert!(eval_series(&t, 20).is_err());
        let mut u = SeriesTarget::eq_n(prec);
        u.x = PrecisionReal::from_ratio(1, 20, prec);
        assert!(eval_series(&u, 20).is_err());
    }

    #[test]
    fn tail_bound_is_honest() {
        let prec = bits_for_digits(80);
        for t in [
            SeriesTarget::eq_n(prec),
            SeriesTarget::table6_n3(prec),
            SeriesTarget::n21(prec),
        ] {
            let v = eval_series(&t, 60).unwrap();
            let mut coeffs = Coeffs::new(t.kind);
            let mut xn = PrecisionReal::one(prec);
            let mut extra = PrecisionReal::zero(prec);
            for n in 0..v.terms + 10 {
                let c = coeffs.next();
                if n >= v.terms {
                    extra = &extra + &term(&c, &t.a, &t.b, n, &xn);
                }
                xn = &xn * &t.x;
            }
            assert!(extra.abs() <= v.tail_bound.abs(), "{}", t.name);
        }
    }
}
