//! Solver and verifier for self-replicating functional equations
//! `t_L(z) f(φ_L(z)) = t_R(z) f(φ_R(z))` with `φ_L = ±z + O(z²)` and
//! `φ_R` of valuation `m ≥ 2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::powerseries::{
    ps_compose, ps_derive, IntPoly, RationalFunction, SeriesError, TruncatedSeries,
};
use crate::sequences::Family;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SelfRepError {
    #[error("invalid functional equation: {0}")]
    InvalidEquation(String),
    #[error("no solution at order {order}")]
    InconsistentEquation { order: usize },
    #[error("unknown equation id `{0}`")]
    UnknownEquation(String),
    #[error("malformed equation file: {0}")]
    Parse(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionalEquation {
    pub name: String,
    pub t_left: RationalFunction,
    pub phi_left: RationalFunction,
    pub t_right: RationalFunction,
    pub phi_right: RationalFunction,
    pub m: usize,
}

fn p(c: &[i64]) -> IntPoly {
    IntPoly::from_i64(c)
}

fn rf(num: IntPoly, den: IntPoly) -> RationalFunction {
    RationalFunction::new(num, den).expect("nonzero denominator")
}

fn z_pow(k: usize) -> IntPoly {
    IntPoly::x_pow(k)
}

fn one() -> IntPoly {
    IntPoly::one()
}

impl FunctionalEquation {
    /// Checks the shape invariants and returns the equation.
    pub fn new(
        name: impl Into<String>,
        t_left: RationalFunction,
        phi_left: RationalFunction,
        t_right: RationalFunction,
        phi_right: RationalFunction,
        m: usize,
    ) -> Result<Self, SelfRepError> {
        let bad = |s: &str| Err(SelfRepError::InvalidEquation(s.to_string()));
        for (t, side) in [(&t_left, "t_left"), (&t_right, "t_right")] {
            if t.value_at_zero() != Some(BigRational::one()) {
                return bad(&format!("{side} must equal 1 at 0"));
            }
        }
        for phi in [&phi_left, &phi_right] {
            if phi.denominator().coeff(0).is_zero() {
                return bad("substitutions must be regular at 0");
            }
        }
        if phi_left.valuation() != Some(1) {
            return bad("phi_left must have valuation 1");
        }
        let lead = BigRational::new(
            phi_left.numerator().coeff(1),
            phi_left.denominator().coeff(0),
        );
        if lead.abs() != BigRational::one() {
            return bad("phi_left must have leading coefficient ±1");
        }
        if m < 2 || phi_right.valuation() != Some(m as i64) {
            return bad("phi_right must have valuation m ≥ 2");
        }
        Ok(Self {
            name: name.into(),
            t_left,
            phi_left,
            t_right,
            phi_right,
            m,
        })
    }

    /// `(1+μz)^{-2} f(z/(1+μz)^3) = (1+λz)^{-2} f(z²/(1+λz)^3)`.
    pub fn alg0(lambda: i64, mu: i64) -> Self {
        let dm = p(&[1, mu]);
        let dl = p(&[1, lambda]);
        Self::new(
            format!("alg0:{lambda},{mu}"),
            rf(one(), dm.pow(2)),
            rf(z_pow(1), dm.pow(3)),
            rf(one(), dl.pow(2)),
            rf(z_pow(2), dl.pow(3)),
            2,
        )
        .expect("valid shape")
    }

    /// `(1+μz)^{-1} f(z/(1+μz)^2) = (1+λz)^{-1} f(z²/(1+λz)^2)`.
    pub fn variant(lambda: i64, mu: i64) -> Self {
        let dm = p(&[1, mu]);
        let dl = p(&[1, lambda]);
        Self::new(
            format!("variant:{lambda},{mu}"),
            rf(one(), dm.clone()),
            rf(z_pow(1), dm.pow(2)),
            rf(one(), dl.clone()),
            rf(z_pow(2), dl.pow(2)),
            2,
        )
        .expect("valid shape")
    }

    fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Parses the JSON description format.
    pub fn from_json(text: &str) -> Result<Self, SelfRepError> {
        let file: EquationFile =
            serde_json::from_str(text).map_err(|e| SelfRepError::Parse(e.to_string()))?;
        file.into_equation()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let side = |r: &RationalFunction| {
            serde_json::json!({
                "num": r.numerator().coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "den": r.denominator().coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            })
        };
        serde_json::json!({
            "name": self.name,
            "t_left": side(&self.t_left),
            "phi_left": side(&self.phi_left),
            "t_right": side(&self.t_right),
            "phi_right": side(&self.phi_right),
            "m": self.m,
        })
    }
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum Coeff {
    Int(i64),
    Str(String),
}

impl Coeff {
    fn value(&self) -> Result<BigInt, SelfRepError> {
        match self {
            Coeff::Int(v) => Ok(BigInt::from(*v)),
            Coeff::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| SelfRepError::Parse(format!("bad integer `{s}`"))),
        }
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct RationalSpec {
    num: Vec<Coeff>,
    #[serde(default)]
    den: Option<Vec<Coeff>>,
}

impl RationalSpec {
    fn build(&self) -> Result<RationalFunction, SelfRepError> {
        let poly = |v: &[Coeff]| -> Result<IntPoly, SelfRepError> {
            Ok(IntPoly::new(
                v.iter().map(Coeff::value).collect::<Result<_, _>>()?,
            ))
        };
        let num = poly(&self.num)?;
        let den = match &self.den {
            Some(d) => poly(d)?,
            None => IntPoly::one(),
        };
        Ok(RationalFunction::new(num, den)?)
    }
}

#[derive(Debug, Deserialize, Serialize)]
struct EquationFile {
    #[serde(default)]
    name: Option<String>,
    t_left: RationalSpec,
    phi_left: RationalSpec,
    t_right: RationalSpec,
    phi_right: RationalSpec,
    m: usize,
}

impl EquationFile {
    fn into_equation(self) -> Result<FunctionalEquation, SelfRepError> {
        FunctionalEquation::new(
            self.name.unwrap_or_else(|| "file".to_string()),
            self.t_left.build()?,
            self.phi_left.build()?,
            self.t_right.build()?,
            self.phi_right.build()?,
            self.m,
        )
    }
}

/// A registry entry together with the family its solution should match.
#[derive(Debug, Clone)]
pub struct NamedEquation {
    pub id: &'static str,
    pub equation: FunctionalEquation,
    pub family: Family,
}

pub const REGISTRY_IDS: [&str; 14] = [
    "f7",
    "alg0",
    "variant",
    "f2",
    "f3",
    "f4",
    "f5",
    "fhat2-cubic",
    "fhat4-cubic",
    "fhat4-quintic",
    "fhat5",
    "gb",
    "gc",
    "g5",
];

fn build(id: &str) -> Option<(FunctionalEquation, Family)> {
    let eq =
        |tl, pl, tr, pr, m| FunctionalEquation::new(id, tl, pl, tr, pr, m).expect("registry entry");
    Some(match id {
        "f7" | "alg" => (FunctionalEquation::alg0(2, 4).renamed("f7"), Family::U7),
        "alg0" => (
            FunctionalEquation::alg0(-4, 2),
            Family::C { lambda: -4, mu: 2 },
        ),
        "variant" => (
            FunctionalEquation::variant(0, 4),
            Family::CVar { lambda: 0, mu: 4 },
        ),
        "f2" => (
            FunctionalEquation::variant(-8, 16).renamed("f2"),
            Family::F(2),
        ),
        "f3" => (FunctionalEquation::alg0(-2, 4).renamed("f3"), Family::F(3)),
        "f4" => {
            let d = p(&[1, 4]);
            (
                eq(
                    rf(one(), d.pow(2)),
                    rf(z_pow(1), d.pow(2)),
                    RationalFunction::constant(1),
                    rf(z_pow(2), one()),
                    2,
                ),
                Family::F(4),
            )
        }
        "f5" => {
            let (d4, d8, d2) = (p(&[1, 4]), p(&[1, 8]), p(&[1, 2]));
            (
                eq(
                    rf(one(), d8.clone()),
                    rf(z_pow(1), &d4 * &d8.pow(2)),
                    rf(one(), d2.clone()),
                    rf(z_pow(2), &d4 * &d2.pow(2)),
                    2,
                ),
                Family::F(5),
            )
        }
        "fhat2-cubic" => {
            let (d27, d3) = (p(&[1, 27]), p(&[1, 3]));
            (
                eq(
                    rf(one(), d27.clone()),
                    rf(z_pow(1), d27.pow(4)),
                    rf(one(), d3.clone()),
                    rf(z_pow(3), d3.pow(4)),
                    3,
                ),
                Family::FHat(2),
            )
        }
        "fhat4-cubic" => {
            let (n, d) = (p(&[1, -1]), p(&[1, 8]));
            (
                eq(
                    rf(one(), d.clone()),
                    rf(&z_pow(1) * &n.pow(3), d.pow(3)),
                    RationalFunction::constant(1),
                    rf(&z_pow(3) * &n, d),
                    3,
                ),
                Family::FHat(4),
            )
        }
        "fhat4-quintic" => {
            let (n, d) = (p(&[1, -1]), p(&[1, 4]));
            (
                eq(
                    rf(one(), d.pow(2)),
                    rf(&z_pow(1) * &n.pow(5), d.pow(5)),
                    RationalFunction::constant(1),
                    rf(&z_pow(5) * &n, d),
                    5,
                ),
                Family::FHat(4),
            )
        }
        "fhat5" => {
            let (n, d) = (p(&[1, -1]), p(&[1, -5]));
            (
                eq(
                    rf(one(), d.clone()),
                    rf(&z_pow(1) * &n.pow(2), d.pow(2)),
                    RationalFunction::constant(1),
                    rf(&z_pow(2) * &n, d),
                    2,
                ),
                Family::FHat(5),
            )
        }
        "gb" => {
            let d = p(&[1, 3]);
            (
                eq(
                    rf(one(), d.clone()),
                    rf(p(&[0, 1, -1]), d),
                    RationalFunction::constant(1),
                    rf(z_pow(2), one()),
                    2,
                ),
                Family::Gb,
            )
        }
        "gc" => {
            let d = p(&[1, 2, 4]);
            (
                eq(
                    rf(one(), d.clone()),
                    rf(p(&[0, 1, -1, 1]), d),
                    RationalFunction::constant(1),
                    rf(z_pow(3), one()),
                    3,
                ),
                Family::Gc,
            )
        }
        "g5" => {
            let d = p(&[1, 3, 4, 2, 1]);
            (
                eq(
                    rf(one(), d.clone()),
                    rf(p(&[0, 1, -2, 4, -3, 1]), d),
                    RationalFunction::constant(1),
                    rf(z_pow(5), one()),
                    5,
                ),
                Family::G5,
            )
        }
        _ => return None,
    })
}

/// All fourteen named equations, in registry order.
pub fn registry() -> Vec<NamedEquation> {
    REGISTRY_IDS
        .iter()
        .map(|&id| {
            let (equation, family) = build(id).expect("registry id");
            NamedEquation {
                id,
                equation,
                family,
            }
        })
        .collect()
}

/// Resolves a registry id; `alg0:λ,μ` and `variant:λ,μ` take parameters.
pub fn lookup(id: &str) -> Result<FunctionalEquation, SelfRepError> {
    let unknown = || SelfRepError::UnknownEquation(id.to_string());
    for (prefix, ctor) in [
        (
            "alg0:",
            FunctionalEquation::alg0 as fn(i64, i64) -> FunctionalEquation,
        ),
        ("variant:", FunctionalEquation::variant),
    ] {
        if let Some(rest) = id.strip_prefix(prefix) {
            let (a, b) = rest.split_once(',').ok_or_else(unknown)?;
            let l = a.trim().parse().map_err(|_| unknown())?;
            let m = b.trim().parse().map_err(|_| unknown())?;
            return Ok(ctor(l, m));
        }
    }
    build(id).map(|(eq, _)| eq).ok_or_else(unknown)
}

/// The family a registry id is expected to reproduce.
pub fn expected_family(id: &str) -> Option<Family> {
    build(id).map(|(_, f)| f)
}

/// Unique `f` with `f(0) = 1` solving `eq` through `z^n`.
///
/// With `L_k = t_L φ_L^k` and `R_k = t_R φ_R^k`, the coefficient of `z^n`
/// gives `c_n L_n[n] = Σ_{k<n} c_k (R_k[n] - L_k[n])`, since `R_n[n] = 0`.
pub fn solve(eq: &FunctionalEquation, n: usize) -> Result<TruncatedSeries, SelfRepError> {
    let tl = eq.t_left.expand(n)?;
    let pl = eq.phi_left.expand(n)?;
    let tr = eq.t_right.expand(n)?;
    let pr = eq.phi_right.expand(n)?;

    let mut left = Vec::with_capacity(n + 1);
    left.push(tl);
    for k in 1..=n {
        let next = &left[k - 1] * &pl;
        left.push(next);
    }
    let mut right = vec![tr];
    for k in 1..=n / eq.m {
        let next = &right[k - 1] * &pr;
        right.push(next);
    }

    let mut c: Vec<BigRational> = vec![BigRational::one()];
    for order in 1..=n {
        let pivot = left[order].coeff(order);
        if pivot.is_zero() {
            return Err(SelfRepError::InconsistentEquation { order });
        }
        let mut s = BigRational::zero();
        for (k, ck) in c.iter().enumerate() {
            if ck.is_zero() {
                continue;
            }
            let r = right.get(k).map(|r| r.coeff(order)).unwrap_or_default();
            let diff = r - left[k].coeff(order);
            if !diff.is_zero() {
                s += ck * diff;
            }
        }
        c.push(s / pivot);
    }
    Ok(TruncatedSeries::from_rationals(c, n))
}

/// Both sides `t·f(φ)` through `z^n`.
pub fn sides(
    eq: &FunctionalEquation,
    f: &TruncatedSeries,
    n: usize,
) -> Result<(TruncatedSeries, TruncatedSeries), SelfRepError> {
    let n = n.min(f.order());
    let f = f.truncate(n);
    let side =
        |t: &RationalFunction, phi: &RationalFunction| -> Result<TruncatedSeries, SelfRepError> {
            let inner = phi.expand(n)?;
            Ok(&t.expand(n)? * &ps_compose(&f, &inner)?)
        };
    Ok((
        side(&eq.t_left, &eq.phi_left)?,
        side(&eq.t_right, &eq.phi_right)?,
    ))
}

fn agreement(a: &TruncatedSeries, b: &TruncatedSeries) -> usize {
    a.agreement_order(b).unwrap_or(0)
}

/// Largest `n' ≤ n` such that both sides agree through `z^{n'}`.
pub fn verify(
    eq: &FunctionalEquation,
    f: &TruncatedSeries,
    n: usize,
) -> Result<usize, SelfRepError> {
    let (l, r) = sides(eq, f, n)?;
    Ok(agreement(&l, &r))
}

/// Verifies `Σ c_n (A + Bα + nBβ) t φ^n` on both sides, with
/// `α = z t'/t` and `β = z φ'/φ`, which is `(A + B z d/dz)` applied to
/// each side of `eq`.
pub fn differentiated_identity(
    eq: &FunctionalEquation,
    f: &TruncatedSeries,
    a: &BigRational,
    b: &BigRational,
    n: usize,
) -> Result<usize, SelfRepError> {
    let n = n.min(f.order());
    let f = f.truncate(n);
    // g = z f'(z) = Σ n c_n z^n
    let g = ps_derive(&f).shift_up();
    let g = g.truncate(n);
    let side =
        |t: &RationalFunction, phi: &RationalFunction| -> Result<TruncatedSeries, SelfRepError> {
            let alpha = t.log_derivative()?.expand(n)?;
            let beta = phi.log_derivative()?.expand(n)?;
            let inner = phi.expand(n)?;
            let ts = t.expand(n)?;
            let fphi = &ts * &ps_compose(&f, &inner)?;
            let gphi = &ts * &ps_compose(&g, &inner)?;
            let weight = &TruncatedSeries::monomial(0, a.clone(), n) + &alpha.scale(b);
            Ok(&(&weight * &fphi) + &(&beta.scale(b) * &gphi))
        };
    let l = side(&eq.t_left, &eq.phi_left)?;
    let r = side(&eq.t_right, &eq.phi_right)?;
    Ok(agreement(&l, &r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{c_lambda_mu, family_terms};
    use num_traits::FromPrimitive;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    fn series(f: Family, n: usize) -> TruncatedSeries {
        TruncatedSeries::from_integers(&family_terms(f, n).unwrap(), n)
    }

    #[test]
    fn solve_examples() {
        let f7 = solve(&lookup("f7").unwrap(), 4).unwrap();
        assert_eq!(
            f7.to_integers().unwrap(),
            [1, 4, 48, 760, 13840].map(BigInt::from)
        );
        let f4 = solve(&lookup("f4").unwrap(), 3).unwrap();
        assert_eq!(
            f4.to_integers().unwrap(),
            [1, 8, 88, 1088].map(BigInt::from)
        );
        for l in [-3, 0, 5] {
            let s = solve(&FunctionalEquation::alg0(l, l), 10).unwrap();
            assert_eq!(s, TruncatedSeries::one(10));
        }
    }

    #[test]
    fn registry_transcriptions() {
        let n = 50;
        let reg = registry();
        assert_eq!(reg.len(), 14);
        for entry in reg {
            let solved = solve(&entry.equation, n).unwrap();
            assert_eq!(
                verify(&entry.equation, &solved, n).unwrap(),
                n,
                "{}",
                entry.id
            );
            let want = family_terms(entry.family, n).unwrap();
            assert_eq!(
                solved.to_integers().unwrap(),
                want,
                "{} vs {}",
                entry.id,
                entry.family
            );
        }
    }

    // Brute force: expand both sides from scratch with the binomial theorem
    // for the f7 shape, compare term by term.
    fn brute_f7_first_mismatch(c: &[BigInt], n: usize) -> Option<usize> {
        let mut lhs = vec![BigInt::zero(); n + 1];
        let mut rhs = vec![BigInt::zero(); n + 1];
        for (k, ck) in c.iter().enumerate().take(n + 1) {
            // c_k z^k (1+4z)^{-(3k+2)}
            for j in 0..=n - k {
                let coef = crate::sequences::binomial((3 * k + 2 + j - 1) as i64, j as i64)
                    * BigInt::from(-4).pow(j as u32);
                lhs[k + j] += ck * coef;
            }
            if 2 * k <= n {
                for j in 0..=n - 2 * k {
                    let coef = crate::sequences::binomial((3 * k + 2 + j - 1) as i64, j as i64)
                        * BigInt::from(-2).pow(j as u32);
                    rhs[2 * k + j] += ck * coef;
                }
            }
        }
        (0..=n).find(|&i| lhs[i] != rhs[i])
    }

    #[test]
    fn verify_examples() {
        let eq = lookup("f7").unwrap();
        let u = series(Family::U7, 40);
        assert_eq!(verify(&eq, &u, 40).unwrap(), 40);

        let mut bad = family_terms(Family::U7, 40).unwrap();
        bad[3] += 1;
        let first = brute_f7_first_mismatch(&bad, 40).unwrap();
        assert_eq!(first, 3);
        let corrupted = TruncatedSeries::from_integers(&bad, 40);
        assert_eq!(verify(&eq, &corrupted, 40).unwrap(), first - 1);

        let g5 = series(Family::G5, 30);
        assert_eq!(verify(&lookup("g5").unwrap(), &g5, 30).unwrap(), 30);
    }

    // Oracle: (A + B z d/dz) applied to each side directly.
    fn oracle(
        eq: &FunctionalEquation,
        f: &TruncatedSeries,
        a: &BigRational,
        b: &BigRational,
        n: usize,
    ) -> usize {
        let (l, r) = sides(eq, f, n).unwrap();
        let apply = |s: &TruncatedSeries| {
            let d = ps_derive(s).shift_up().truncate(n);
            &s.scale(a) + &d.scale(b)
        };
        apply(&l).agreement_order(&apply(&r)).unwrap_or(0)
    }

    #[test]
    fn differentiated_examples() {
        let eq = lookup("f7").unwrap();
        let u = series(Family::U7, 20);
        for (a, b) in [(1, 0), (0, 1), (3, -2)] {
            assert_eq!(
                differentiated_identity(&eq, &u, &q(a), &q(b), 20).unwrap(),
                20
            );
            assert_eq!(oracle(&eq, &u, &q(a), &q(b), 20), 20);
        }
        let quintic = lookup("fhat4-quintic").unwrap();
        let h = series(Family::FHat(4), 15);
        assert_eq!(
            differentiated_identity(&quintic, &h, &q(1), &q(1), 15).unwrap(),
            15
        );
    }

    #[test]
    fn quintic_weights_match_displayed_form() {
        let eq = lookup("fhat4-quintic").unwrap();
        let beta_l = eq.phi_left.log_derivative().unwrap();
        let want = RationalFunction::new(p(&[1, -22, -4]), &p(&[1, -1]) * &p(&[1, 4])).unwrap();
        assert_eq!(beta_l, want);
        let beta_r = eq.phi_right.log_derivative().unwrap();
        let want = RationalFunction::new(p(&[5, 10, -20]), &p(&[1, -1]) * &p(&[1, 4])).unwrap();
        assert_eq!(beta_r, want);
        let alpha_l = eq.t_left.log_derivative().unwrap();
        assert_eq!(
            alpha_l,
            RationalFunction::new(p(&[0, -8]), p(&[1, 4])).unwrap()
        );
    }

    #[test]
    fn perturbation_breaks_verification() {
        let eq = lookup("gc").unwrap();
        let base = family_terms(Family::Gc, 30).unwrap();
        for idx in [1usize, 7, 29] {
            let mut v = base.clone();
            v[idx] -= 1;
            let s = TruncatedSeries::from_integers(&v, 30);
            assert!(verify(&eq, &s, 30).unwrap() < 30, "index {idx}");
        }
    }

    #[test]
    fn invalid_equations_rejected() {
        let bad_t = FunctionalEquation::new(
            "x",
            RationalFunction::constant(2),
            rf(z_pow(1), one()),
            RationalFunction::constant(1),
            rf(z_pow(2), one()),
            2,
        );
        assert!(matches!(bad_t, Err(SelfRepError::InvalidEquation(_))));
        let bad_m = FunctionalEquation::new(
            "x",
            RationalFunction::constant(1),
            rf(z_pow(1), one()),
            RationalFunction::constant(1),
            rf(z_pow(2), one()),
            3,
        );
        assert!(bad_m.is_err());
        assert!(matches!(
            lookup("nosuch"),
            Err(SelfRepError::UnknownEquation(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let eq = lookup("f5").unwrap();
        let text = eq.to_json().to_string();
        let back = FunctionalEquation::from_json(&text).unwrap();
        assert_eq!(back.phi_left, eq.phi_left);
        assert_eq!(back.phi_right, eq.phi_right);
        let raw = r#"{"t_left":{"num":[1],"den":[1,8,16]},"phi_left":{"num":[0,1],"den":["1","12",48,64]},
                      "t_right":{"num":[1],"den":[1,4,4]},"phi_right":{"num":[0,0,1],"den":[1,6,12,8]},"m":2}"#;
        let parsed = FunctionalEquation::from_json(raw).unwrap();
        let s = solve(&parsed, 5).unwrap();
        assert_eq!(
            s.to_integers().unwrap(),
            family_terms(Family::U7, 5).unwrap()
        );
    }

    proptest! {
        #[test]
        fn alg0_matches_recursion(lambda in -20i64..20, mu in -20i64..20) {
            let s = solve(&FunctionalEquation::alg0(lambda, mu), 16).unwrap();
            prop_assert_eq!(s.to_integers().unwrap(), c_lambda_mu(lambda, mu, 16));
        }

        #[test]
        fn differentiated_identity_is_linear(a1 in -5i64..5, b1 in -5i64..5, a2 in -5i64..5, b2 in -5i64..5) {
            let eq = lookup("gb").unwrap();
            let f = series(Family::Gb, 12);
            let v1 = differentiated_identity(&eq, &f, &q(a1), &q(b1), 12).unwrap();
            let v2 = differentiated_identity(&eq, &f, &q(a2), &q(b2), 12).unwrap();
            let v = differentiated_identity(&eq, &f, &q(a1 + a2), &q(b1 + b2), 12).unwrap();
            prop_assert!(v >= v1.min(v2));
        }

        #[test]
        fn single_perturbation_is_detected(idx in 1usize..20, delta in 1i64..5) {
            let eq = lookup("f7").unwrap();
            let mut v = family_terms(Family::U7, 20).unwrap();
            v[idx] += delta;
            let s = TruncatedSeries::from_integers(&v, 20);
            prop_assert_eq!(verify(&eq, &s, 20).unwrap(), idx - 1);
        }
    }
}
