//! Named integer sequence families, each reachable by at least two
//! independent routes, plus their residues modulo prime powers.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::powerseries::{ps_sqrt, IntPoly, TruncatedSeries};
use crate::primepower::{BinomialTable, PrimePower};
use crate::selfrep::{self, FunctionalEquation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SequenceError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("route {route:?} is not available for family {family}")]
    UnsupportedRoute { family: Family, route: Route },
    #[error("inexact division at step n={n}: {numerator} / {divisor}")]
    InexactDivision {
        n: usize,
        numerator: BigInt,
        divisor: BigInt,
    },
    #[error("term {index} of {family} is not an integer")]
    NonIntegral { family: Family, index: usize },
    #[error("modulus {p}^{e} does not fit in 62 bits")]
    ModulusTooLarge { p: u64, e: u32 },
    #[error("functional equation failed: {0}")]
    SelfRep(String),
}

/// A named generator; `C` and `CVar` carry the integer parameters (λ, μ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    U7,
    F(u8),
    FHat(u8),
    Gb,
    Gc,
    G5,
    C { lambda: i64, mu: i64 },
    CVar { lambda: i64, mu: i64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    BinomialSum,
    BinomialSumAlt,
    Recurrence,
    SelfRep,
    ClosedForm,
}

impl Route {
    pub const ALL: [Route; 5] = [
        Route::BinomialSum,
        Route::BinomialSumAlt,
        Route::Recurrence,
        Route::SelfRep,
        Route::ClosedForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Route::BinomialSum => "binomial-sum",
            Route::BinomialSumAlt => "binomial-sum-alt",
            Route::Recurrence => "recurrence",
            Route::SelfRep => "selfrep",
            Route::ClosedForm => "closed-form",
        }
    }
}

impl FromStr for Route {
    type Err = SequenceError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Route::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| SequenceError::UnknownFamily(format!("route {s}")))
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::U7 => write!(f, "u7"),
            Family::F(l) => write!(f, "f{l}"),
            Family::FHat(l) => write!(f, "fhat{l}"),
            Family::Gb => write!(f, "gb"),
            Family::Gc => write!(f, "gc"),
            Family::G5 => write!(f, "g5"),
            Family::C { lambda, mu } => write!(f, "c:{lambda},{mu}"),
            Family::CVar { lambda, mu } => write!(f, "cvar:{lambda},{mu}"),
        }
    }
}

fn parse_pair(s: &str) -> Option<(i64, i64)> {
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

impl FromStr for Family {
    type Err = SequenceError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || SequenceError::UnknownFamily(s.to_string());
        let t = s.trim();
        let fam = match t {
            "u7" | "f7" => Family::U7,
            "f2" => Family::F(2),
            "f3" => Family::F(3),
            "f4" => Family::F(4),
            "f5" => Family::F(5),
            "fhat2" => Family::FHat(2),
            "fhat3" => Family::FHat(3),
            "fhat4" => Family::FHat(4),
            "fhat5" => Family::FHat(5),
            "gb" => Family::Gb,
            "gc" => Family::Gc,
            "g5" => Family::G5,
            _ => {
                if let Some(rest) = t.strip_prefix("cvar:") {
                    let (lambda, mu) = parse_pair(rest).ok_or_else(unknown)?;
                    Family::CVar { lambda, mu }
                } else if let Some(rest) = t.strip_prefix("c:") {
                    let (lambda, mu) = parse_pair(rest).ok_or_else(unknown)?;
                    Family::C { lambda, mu }
                } else {
                    return Err(unknown());
                }
            }
        };
        Ok(fam)
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Family {
    pub fn routes(&self) -> &'static [Route] {
        use Route::*;
        match self {
            Family::U7 => &[Recurrence, BinomialSum, BinomialSumAlt, SelfRep],
            Family::F(5) => &[BinomialSum, SelfRep],
            Family::F(_) => &[ClosedForm, SelfRep],
            Family::FHat(5) => &[BinomialSum, SelfRep],
            Family::FHat(_) => &[ClosedForm, SelfRep],
            Family::Gb | Family::Gc | Family::G5 => &[Recurrence, BinomialSum, SelfRep],
            Family::C { .. } | Family::CVar { .. } => &[Recurrence, SelfRep],
        }
    }

    /// The cheapest route, used when none is requested.
    pub fn default_route(&self) -> Route {
        self.routes()[0]
    }

    /// The functional equation whose solution is this family, when the
    /// family is the solution itself.
    pub fn equation(&self) -> Option<FunctionalEquation> {
        let id = match self {
            Family::U7 => "f7",
            Family::F(l) => return selfrep::lookup(&format!("f{l}")).ok(),
            Family::FHat(2) => "fhat2-cubic",
            Family::FHat(4) => "fhat4-cubic",
            Family::FHat(5) => "fhat5",
            Family::FHat(_) => return None,
            Family::Gb => "gb",
            Family::Gc => "gc",
            Family::G5 => "g5",
            Family::C { lambda, mu } => return Some(FunctionalEquation::alg0(*lambda, *mu)),
            Family::CVar { lambda, mu } => return Some(FunctionalEquation::variant(*lambda, *mu)),
        };
        selfrep::lookup(id).ok()
    }
}

const PASCAL_ROWS: usize = 512;

fn pascal() -> &'static RwLock<Vec<Vec<BigInt>>> {
    static TABLE: OnceLock<RwLock<Vec<Vec<BigInt>>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![vec![BigInt::one()]]))
}

/// `C(n, k)`, zero unless `0 ≤ k ≤ n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let (n, k) = (n as usize, k as usize);
    let k = k.min(n - k);
    if n < PASCAL_ROWS {
        {
            let rows = pascal().read().expect("pascal lock");
            if n < rows.len() {
                return rows[n][k].clone();
            }
        }
        let mut rows = pascal().write().expect("pascal lock");
        while rows.len() <= n {
            let prev = rows.last().unwrap();
            let mut row = Vec::with_capacity(prev.len() + 1);
            row.push(BigInt::one());
            for w in prev.windows(2) {
                row.push(&w[0] + &w[1]);
            }
            row.push(BigInt::one());
            rows.push(row);
        }
        return rows[n][k].clone();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `C(x, k)` extended to negative `x` by `x(x-1)⋯(x-k+1)/k!`.
pub fn binomial_signed_top(x: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    if x >= 0 {
        return binomial(x, k);
    }
    let v = binomial(k - x - 1, k);
    if k % 2 == 1 {
        -v
    } else {
        v
    }
}

fn b(n: usize, k: usize) -> BigInt {
    binomial(n as i64, k as i64)
}

/// `u_n = Σ_k C(n,k)² C(n+k,n) C(2k,n)`.
pub fn u_binomial(n: usize) -> BigInt {
    (0..=n)
        .map(|k| {
            let c = b(n, k);
            &c * &c * b(n + k, n) * b(2 * k, n)
        })
        .sum()
}

/// `u_n = Σ_k (-1)^{n-k} C(3n+1, n-k) C(n+k,n)³`.
pub fn u_binomial_alt(n: usize) -> BigInt {
    (0..=n)
        .map(|k| {
            let c = b(n + k, n);
            let t = b(3 * n + 1, n - k) * &c * &c * &c;
            if (n - k) % 2 == 1 {
                -t
            } else {
                t
            }
        })
        .sum()
}

/// `p_{+1}(n) u_{n+1} = p_0(n) u_n + p_{-1}(n) u_{n-1}`, started from `u_0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AperyRecurrence {
    pub lead: IntPoly,
    pub p0: IntPoly,
    pub p_minus: IntPoly,
    pub u0: BigInt,
}

impl AperyRecurrence {
    pub fn u7() -> Self {
        // (n+1)^3, (2n+1)(13n^2+13n+4), 3n(3n-1)(3n+1)
        Self {
            lead: IntPoly::from_i64(&[1, 1]).pow(3),
            p0: &IntPoly::from_i64(&[1, 2]) * &IntPoly::from_i64(&[4, 13, 13]),
            p_minus: IntPoly::from_i64(&[0, -3, 0, 27]),
            u0: BigInt::one(),
        }
    }

    fn second_order(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self {
            lead: IntPoly::from_i64(&[1, 2, 1]),
            p0: IntPoly::from_i64(&[c, b, a]),
            p_minus: IntPoly::from_i64(&[0, 0, d]),
            u0: BigInt::one(),
        }
    }

    pub fn gb() -> Self {
        Self::second_order(10, 10, 3, -9)
    }

    pub fn gc() -> Self {
        Self::second_order(7, 7, 2, 8)
    }

    pub fn g5() -> Self {
        Self::second_order(11, 11, 3, 1)
    }

    /// Terms `0..=n_max`; a division that is not exact is an error.
    pub fn terms(&self, n_max: usize) -> Result<Vec<BigInt>, SequenceError> {
        let mut u = vec![self.u0.clone()];
        for n in 0..n_max {
            let ni = n as i64;
            let mut rhs = self.p0.eval_i64(ni) * &u[n];
            if n > 0 {
                rhs += self.p_minus.eval_i64(ni) * &u[n - 1];
            }
            let d = self.lead.eval_i64(ni);
            let (q, r) = rhs.div_rem(&d);
            if !r.is_zero() {
                return Err(SequenceError::InexactDivision {
                    n,
                    numerator: rhs,
                    divisor: d,
                });
            }
            u.push(q);
        }
        Ok(u)
    }
}

/// Terms `u_0..=u_{n_max}` of the level 7 recurrence.
pub fn u_recurrence(n_max: usize) -> Result<Vec<BigInt>, SequenceError> {
    AperyRecurrence::u7().terms(n_max)
}

/// Shape of the two-parameter equations: the left side carries
/// `(1+μz)^{-(b k + a)}` on `c_k z^k`, the right side `(1+λz)^{-(b k + a)}`
/// on `c_k z^{2k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Alg0,
    Variant,
}

impl Shape {
    fn ab(self) -> (i64, i64) {
        match self {
            Shape::Alg0 => (2, 3),
            Shape::Variant => (1, 2),
        }
    }

    pub fn family(self, lambda: i64, mu: i64) -> Family {
        match self {
            Shape::Alg0 => Family::C { lambda, mu },
            Shape::Variant => Family::CVar { lambda, mu },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Shape::Alg0 => "alg0",
            Shape::Variant => "variant",
        }
    }
}

impl FromStr for Shape {
    type Err = SequenceError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alg0" => Ok(Shape::Alg0),
            "variant" => Ok(Shape::Variant),
            _ => Err(SequenceError::UnknownFamily(format!("shape {s}"))),
        }
    }
}

fn shape_terms(shape: Shape, lambda: i64, mu: i64, n_max: usize) -> Vec<BigInt> {
    let (a, bb) = shape.ab();
    let neg_l = BigInt::from(-lambda);
    let neg_m = BigInt::from(-mu);
    let pow_l: Vec<BigInt> = (0..=n_max)
        .map(|j| num_traits::pow(neg_l.clone(), j))
        .collect();
    let pow_m: Vec<BigInt> = (0..=n_max)
        .map(|j| num_traits::pow(neg_m.clone(), j))
        .collect();
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for n in 1..=n_max as i64 {
        let mut s = BigInt::zero();
        for k in 0..=n / 2 {
            let j = n - 2 * k;
            if pow_l[j as usize].is_zero() {
                continue;
            }
            s += binomial(bb * k + a + j - 1, j) * &pow_l[j as usize] * &c[k as usize];
        }
        for k in 0..n {
            let j = n - k;
            if pow_m[j as usize].is_zero() {
                continue;
            }
            s -= binomial(bb * k + a + j - 1, j) * &pow_m[j as usize] * &c[k as usize];
        }
        c.push(s);
    }
    c
}

/// `c_0..=c_{n_max}` for the equation with `(1+μz)^{-2}`, `z/(1+μz)^3` on the
/// left and `(1+λz)^{-2}`, `z²/(1+λz)^3` on the right.
pub fn c_lambda_mu(lambda: i64, mu: i64, n_max: usize) -> Vec<BigInt> {
    shape_terms(Shape::Alg0, lambda, mu, n_max)
}

/// The same for `(1+μz)^{-1}`, `z/(1+μz)^2` against `(1+λz)^{-1}`, `z²/(1+λz)^2`.
pub fn c_variant(lambda: i64, mu: i64, n_max: usize) -> Vec<BigInt> {
    shape_terms(Shape::Variant, lambda, mu, n_max)
}

fn hyper_inner(l: u8, n_max: usize) -> Vec<BigInt> {
    (0..=n_max)
        .map(|n| {
            let c = b(2 * n, n);
            match l {
                2 => c * b(4 * n, 2 * n),
                3 => c * b(3 * n, n),
                _ => &c * &c,
            }
        })
        .collect()
}

fn hat_closed(l: u8, n: usize) -> BigInt {
    let c = b(2 * n, n);
    match l {
        2 => &c * &c * b(4 * n, 2 * n),
        3 => &c * &c * b(3 * n, n),
        _ => &c * &c * &c,
    }
}

fn g5_sum(n: usize) -> BigInt {
    (0..=n)
        .map(|k| {
            let c = b(n, k);
            &c * &c * b(n + k, k)
        })
        .sum()
}

fn fhat5_sum(n: usize) -> BigInt {
    let (n, nn) = (n as i64, n);
    (0..=n)
        .map(|k| {
            let c = b(nn, k as usize);
            let t = &c * &c * &c * binomial_signed_top(4 * n - 5 * k, 3 * n);
            if (n - k) % 2 == 1 {
                -t
            } else {
                t
            }
        })
        .sum()
}

fn square_integers(a: &[BigInt], n_max: usize) -> Vec<BigInt> {
    crate::powerseries::convolve(a, a, n_max + 1)
}

fn selfrep_terms(family: Family, n_max: usize) -> Result<Vec<BigInt>, SequenceError> {
    let series = match family {
        Family::FHat(3) => {
            // c(4,16) is the square of this series.
            let sq = selfrep::solve(&FunctionalEquation::alg0(4, 16), n_max)
                .map_err(|e| SequenceError::SelfRep(e.to_string()))?;
            ps_sqrt(&sq).map_err(|e| SequenceError::SelfRep(e.to_string()))?
        }
        _ => {
            let eq = family.equation().ok_or(SequenceError::UnsupportedRoute {
                family,
                route: Route::SelfRep,
            })?;
            selfrep::solve(&eq, n_max).map_err(|e| SequenceError::SelfRep(e.to_string()))?
        }
    };
    series_to_integers(family, &series)
}

fn series_to_integers(family: Family, s: &TruncatedSeries) -> Result<Vec<BigInt>, SequenceError> {
    s.coeffs()
        .iter()
        .enumerate()
        .map(|(index, c)| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(SequenceError::NonIntegral { family, index })
            }
        })
        .collect()
}

fn compute(family: Family, route: Route, n_max: usize) -> Result<Vec<BigInt>, SequenceError> {
    let unsupported = || SequenceError::UnsupportedRoute { family, route };
    if !family.routes().contains(&route) {
        return Err(unsupported());
    }
    let sum_route = |f: fn(usize) -> BigInt| (0..=n_max).map(f).collect::<Vec<_>>();
    Ok(match (family, route) {
        (_, Route::SelfRep) => selfrep_terms(family, n_max)?,
        (Family::U7, Route::Recurrence) => u_recurrence(n_max)?,
        (Family::U7, Route::BinomialSum) => sum_route(u_binomial),
        (Family::U7, Route::BinomialSumAlt) => sum_route(u_binomial_alt),
        (Family::F(5), Route::BinomialSum) => {
            (0..=n_max).map(|n| b(2 * n, n) * g5_sum(n)).collect()
        }
        (Family::F(l), Route::ClosedForm) => square_integers(&hyper_inner(l, n_max), n_max),
        (Family::FHat(5), Route::BinomialSum) => sum_route(fhat5_sum),
        (Family::FHat(l), Route::ClosedForm) => (0..=n_max).map(|n| hat_closed(l, n)).collect(),
        (Family::Gb, Route::Recurrence) => AperyRecurrence::gb().terms(n_max)?,
        (Family::Gc, Route::Recurrence) => AperyRecurrence::gc().terms(n_max)?,
        (Family::G5, Route::Recurrence) => AperyRecurrence::g5().terms(n_max)?,
        (Family::Gb, Route::BinomialSum) => (0..=n_max)
            .map(|n| {
                (0..=n)
                    .map(|k| {
                        let c = b(n, k);
                        &c * &c * b(2 * k, k)
                    })
                    .sum()
            })
            .collect(),
        (Family::Gc, Route::BinomialSum) => (0..=n_max)
            .map(|n| {
                (0..=n)
                    .map(|k| {
                        let c = b(n, k);
                        &c * &c * &c
                    })
                    .sum()
            })
            .collect(),
        (Family::G5, Route::BinomialSum) => sum_route(g5_sum),
        (Family::C { lambda, mu }, Route::Recurrence) => c_lambda_mu(lambda, mu, n_max),
        (Family::CVar { lambda, mu }, Route::Recurrence) => c_variant(lambda, mu, n_max),
        _ => return Err(unsupported()),
    })
}

type Memo = RwLock<HashMap<(Family, Route), Vec<BigInt>>>;

fn memo() -> &'static Memo {
    static MEMO: OnceLock<Memo> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Terms `0..=n_max` by the given route, memoized per process.
pub fn family_terms_by(
    family: Family,
    route: Route,
    n_max: usize,
) -> Result<Vec<BigInt>, SequenceError> {
    if let Some(v) = memo().read().expect("memo lock").get(&(family, route)) {
        if v.len() > n_max {
            return Ok(v[..=n_max].to_vec());
        }
    }
    let v = compute(family, route, n_max)?;
    let mut m = memo().write().expect("memo lock");
    let slot = m.entry((family, route)).or_default();
    if slot.len() < v.len() {
        *slot = v.clone();
    }
    Ok(v)
}

/// Terms `0..=n_max` by the family's default route.
pub fn family_terms(family: Family, n_max: usize) -> Result<Vec<BigInt>, SequenceError> {
    family_terms_by(family, family.default_route(), n_max)
}

pub fn family_terms_str(id: &str, n_max: usize) -> Result<Vec<BigInt>, SequenceError> {
    family_terms(id.parse()?, n_max)
}

/// Result of splitting `c` as a convolution square `d * d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Split {
    Split(Vec<BigInt>),
    NotSplittable { index: usize },
}

/// Integral `d` with `Σ d_k d_{n-k} = c_n`, given `c_0 = 1`.
pub fn convolution_split(c: &[BigInt]) -> Split {
    assert!(c.first().is_some_and(|c0| c0.is_one()), "c_0 must be 1");
    let two = BigInt::from(2);
    let mut d = vec![BigInt::one()];
    for n in 1..c.len() {
        let mut s = c[n].clone();
        for k in 1..n {
            s -= &d[k] * &d[n - k];
        }
        let (q, r) = s.div_rem(&two);
        if !r.is_zero() {
            return Split::NotSplittable { index: n };
        }
        d.push(q);
    }
    Split::Split(d)
}

/// One decimal integer per line.
pub fn export_text(terms: &[BigInt]) -> String {
    let mut out = String::new();
    for t in terms {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

/// JSON array of decimal strings.
pub fn export_json(terms: &[BigInt]) -> serde_json::Value {
    serde_json::Value::Array(
        terms
            .iter()
            .map(|t| serde_json::Value::String(t.to_string()))
            .collect(),
    )
}

/// Parses one integer per line, ignoring blank lines and `#` comments.
pub fn parse_terms(text: &str) -> Result<Vec<BigInt>, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, l)| {
            l.parse::<BigInt>()
                .map_err(|e| format!("line {}: {e}", i + 1))
        })
        .collect()
}

fn reduce(v: &BigInt, m: u64) -> u64 {
    v.mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("residue fits")
}

fn convolve_mod(a: &[u64], bb: &[u64], pp: &PrimePower) -> Vec<u64> {
    let len = a.len();
    let mut out = vec![0u64; len];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in bb.iter().enumerate().take(len - i) {
            out[i + j] = pp.add(out[i + j], pp.mul(ai, bj));
        }
    }
    out
}

fn shape_residues(shape: Shape, lambda: i64, mu: i64, n_max: usize, pp: PrimePower) -> Vec<u64> {
    let (a, bb) = shape.ab();
    let top = (bb as usize + 1) * n_max + a as usize + 1;
    let table = BinomialTable::new(pp, top);
    let neg_l = pp.reduce_i64(-lambda);
    let neg_m = pp.reduce_i64(-mu);
    let mut pow_l = vec![1 % pp.modulus; n_max + 1];
    let mut pow_m = vec![1 % pp.modulus; n_max + 1];
    for j in 1..=n_max {
        pow_l[j] = pp.mul(pow_l[j - 1], neg_l);
        pow_m[j] = pp.mul(pow_m[j - 1], neg_m);
    }
    let mut c = vec![1 % pp.modulus];
    for n in 1..=n_max as i64 {
        let mut s = 0u64;
        for k in 0..=n / 2 {
            let j = n - 2 * k;
            let pl = pow_l[j as usize];
            if pl == 0 || c[k as usize] == 0 {
                continue;
            }
            let t = pp.mul(table.binom(bb * k + a + j - 1, j), pl);
            s = pp.add(s, pp.mul(t, c[k as usize]));
        }
        for k in 0..n {
            let j = n - k;
            let pm = pow_m[j as usize];
            if pm == 0 || c[k as usize] == 0 {
                continue;
            }
            let t = pp.mul(table.binom(bb * k + a + j - 1, j), pm);
            s = pp.sub(s, pp.mul(t, c[k as usize]));
        }
        c.push(s);
    }
    c
}

/// Terms `0..=n_max` reduced modulo `p^e`, computed without forming the
/// full integers where that would be expensive.
pub fn family_residues(
    family: Family,
    n_max: usize,
    p: u64,
    e: u32,
) -> Result<Vec<u64>, SequenceError> {
    let pp = PrimePower::new(p, e).ok_or(SequenceError::ModulusTooLarge { p, e })?;
    let m = pp.modulus;
    let exact = |f: Family| -> Result<Vec<u64>, SequenceError> {
        Ok(family_terms(f, n_max)?
            .iter()
            .map(|v| reduce(v, m))
            .collect())
    };
    let table = || BinomialTable::new(pp, 4 * n_max + 2);
    Ok(match family {
        Family::U7 | Family::Gb | Family::Gc | Family::G5 => exact(family)?,
        Family::C { lambda, mu } => shape_residues(Shape::Alg0, lambda, mu, n_max, pp),
        Family::CVar { lambda, mu } => shape_residues(Shape::Variant, lambda, mu, n_max, pp),
        Family::F(5) => {
            let t = BinomialTable::new(pp, 2 * n_max);
            let g = exact(Family::G5)?;
            (0..=n_max)
                .map(|n| pp.mul(t.binom(2 * n as i64, n as i64), g[n]))
                .collect()
        }
        Family::F(l) => {
            let t = table();
            let inner: Vec<u64> = (0..=n_max as i64)
                .map(|n| {
                    let c = t.binom(2 * n, n);
                    match l {
                        2 => pp.mul(c, t.binom(4 * n, 2 * n)),
                        3 => pp.mul(c, t.binom(3 * n, n)),
                        _ => pp.mul(c, c),
                    }
                })
                .collect();
            convolve_mod(&inner, &inner, &pp)
        }
        Family::FHat(5) => {
            let t = table();
            (0..=n_max as i64)
                .map(|n| {
                    (0..=n).fold(0u64, |acc, k| {
                        let c = t.binom(n, k);
                        let top = 4 * n - 5 * k;
                        let mut inner = t.binom(top, 3 * n);
                        if top < 0 {
                            inner = t.binom(3 * n - top - 1, 3 * n);
                            if n % 2 == 1 {
                                inner = pp.sub(0, inner);
                            }
                        }
                        let term = pp.mul(pp.mul(c, pp.mul(c, c)), inner);
                        if (n - k) % 2 == 1 {
                            pp.sub(acc, term)
                        } else {
                            pp.add(acc, term)
                        }
                    })
                })
                .collect()
        }
        Family::FHat(l) => {
            let t = table();
            (0..=n_max as i64)
                .map(|n| {
                    let c = t.binom(2 * n, n);
                    let cc = pp.mul(c, c);
                    match l {
                        2 => pp.mul(cc, t.binom(4 * n, 2 * n)),
                        3 => pp.mul(cc, t.binom(3 * n, n)),
                        _ => pp.mul(cc, c),
                    }
                })
                .collect()
        }
    })
}
