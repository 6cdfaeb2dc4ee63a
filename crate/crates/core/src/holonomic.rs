//! Guessing and certifying recurrences `Σ_i p_i(n) a_{n+i} = 0` with
//! polynomial coefficients, exactly over the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::powerseries::{common_denominator, IntPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HolonomicError {
    #[error("need {need} terms for order {r}, degree {d}; have {have}")]
    InsufficientTerms {
        need: usize,
        have: usize,
        r: usize,
        d: usize,
    },
    #[error("leading polynomial of a recurrence must be nonzero")]
    ZeroLeading,
}

/// Terms held back from fitting and used only for certification.
pub const HOLDOUT: usize = 20;

const SCREEN_PRIME: u64 = (1 << 61) - 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceGuess {
    pub order: usize,
    pub degree: usize,
    /// `p_0, …, p_r`, lowest degree first.
    #[serde(with = "poly_vec")]
    pub polys: Vec<IntPoly>,
    pub fitted_rows: usize,
    pub holdout_verified: usize,
    pub nullity: usize,
    pub ambiguous: bool,
}

mod poly_vec {
    use crate::powerseries::IntPoly;
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[IntPoly], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            v.iter()
                .map(|p| p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<IntPoly>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        raw.into_iter()
            .map(|p| {
                p.iter()
                    .map(|c| c.parse::<BigInt>().map_err(serde::de::Error::custom))
                    .collect::<Result<Vec<_>, _>>()
                    .map(IntPoly::new)
            })
            .collect()
    }
}

impl RecurrenceGuess {
    /// A recurrence from explicit coefficient polynomials, content-reduced
    /// with positive leading coefficient on `p_r`.
    pub fn from_polys(polys: Vec<IntPoly>) -> Result<Self, HolonomicError> {
        let lead = polys.last().ok_or(HolonomicError::ZeroLeading)?;
        if lead.is_zero() {
            return Err(HolonomicError::ZeroLeading);
        }
        let polys = normalize(polys);
        let degree = polys.iter().filter_map(IntPoly::degree).max().unwrap_or(0);
        Ok(Self {
            order: polys.len() - 1,
            degree,
            polys,
            fitted_rows: 0,
            holdout_verified: 0,
            nullity: 1,
            ambiguous: false,
        })
    }

    /// The three-term level 7 recurrence in shifted form
    /// `(n+2)^3 a_{n+2} - (2n+3)(13n²+39n+30) a_{n+1} - 3(n+1)(3n+2)(3n+4) a_n = 0`.
    pub fn u7() -> Self {
        let p2 = IntPoly::from_i64(&[2, 1]).pow(3);
        let p1 = -&(&IntPoly::from_i64(&[3, 2]) * &IntPoly::from_i64(&[30, 39, 13]));
        let p0 = -&(&(&IntPoly::from_i64(&[3, 3]) * &IntPoly::from_i64(&[2, 3]))
            * &IntPoly::from_i64(&[4, 3]));
        Self::from_polys(vec![p0, p1, p2]).expect("nonzero leading")
    }

    /// True if both recurrences agree up to a nonzero scalar.
    pub fn proportional_to(&self, other: &Self) -> bool {
        self.order == other.order && normalize(self.polys.clone()) == normalize(other.polys.clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

impl fmt::Display for RecurrenceGuess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, p) in self.polys.iter().enumerate().rev() {
            if p.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let shift = match i {
                0 => "a(n)".to_string(),
                _ => format!("a(n+{i})"),
            };
            write!(f, "({})·{shift}", p.display_in("n"))?;
        }
        write!(f, " = 0")
    }
}

fn normalize(polys: Vec<IntPoly>) -> Vec<IntPoly> {
    let content = polys
        .iter()
        .fold(BigInt::zero(), |g, p| g.gcd(&p.content()));
    let mut polys: Vec<IntPoly> = if content.is_zero() || content.is_one() {
        polys
    } else {
        polys.iter().map(|p| p.div_scalar_exact(&content)).collect()
    };
    let sign_neg = polys
        .iter()
        .rev()
        .find(|p| !p.is_zero())
        .is_some_and(|p| p.leading().is_negative());
    if sign_neg {
        polys = polys.iter().map(|p| -p).collect();
    }
    polys
}

/// Exact check of the recurrence wherever all shifted terms exist; `Err`
/// carries the first failing `n`.
pub fn verify_rec(rec: &RecurrenceGuess, terms: &[BigRational]) -> Result<(), usize> {
    let r = rec.order;
    if terms.len() <= r {
        return Ok(());
    }
    for n in 0..terms.len() - r {
        let nn = BigRational::from_integer(BigInt::from(n));
        let s: BigRational = rec
            .polys
            .iter()
            .enumerate()
            .map(|(i, p)| p.eval_rational(&nn) * &terms[n + i])
            .sum();
        if !s.is_zero() {
            return Err(n);
        }
    }
    Ok(())
}

pub fn verify_rec_integers(rec: &RecurrenceGuess, terms: &[BigInt]) -> Result<(), usize> {
    let q: Vec<BigRational> = terms
        .iter()
        .cloned()
        .map(BigRational::from_integer)
        .collect();
    verify_rec(rec, &q)
}

/// Terms needed to fit order `r`, degree `d` and hold out [`HOLDOUT`] rows.
pub fn terms_needed(r: usize, d: usize) -> usize {
    (r + 1) * (d + 1) + r + HOLDOUT
}

/// Searched envelope, reported with every negative answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    pub r_max: usize,
    pub d_max: usize,
    pub terms: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum GuessOutcome {
    Found(RecurrenceGuess),
    None(Envelope),
}

impl GuessOutcome {
    pub fn found(&self) -> Option<&RecurrenceGuess> {
        match self {
            GuessOutcome::Found(g) => Some(g),
            GuessOutcome::None(_) => None,
        }
    }
}

/// Candidate `(r, d)` pairs by increasing `r + d`, then `r`.
pub fn candidates(r_max: usize, d_max: usize) -> Vec<(usize, usize)> {
    let mut c: Vec<(usize, usize)> = (1..=r_max)
        .flat_map(|r| (0..=d_max).map(move |d| (r, d)))
        .collect();
    c.sort_by_key(|&(r, d)| (r + d, r));
    c
}

/// Searches for the smallest certified recurrence of order `≤ r_max` and
/// coefficient degree `≤ d_max`.
pub fn guess(
    terms: &[BigRational],
    r_max: usize,
    d_max: usize,
) -> Result<GuessOutcome, HolonomicError> {
    let need = terms_needed(r_max, d_max);
    if terms.len() < need {
        return Err(HolonomicError::InsufficientTerms {
            need,
            have: terms.len(),
            r: r_max,
            d: d_max,
        });
    }
    let (ints, _) = common_denominator(terms);
    let cands = candidates(r_max, d_max);
    // Each candidate is independent; the first certified one in candidate
    // order wins, so the parallel run picks the same answer as a serial one.
    let results: Vec<Option<RecurrenceGuess>> =
        cands.par_iter().map(|&(r, d)| fit(&ints, r, d)).collect();
    let terms_rat: Vec<BigRational> = ints
        .iter()
        .cloned()
        .map(BigRational::from_integer)
        .collect();
    for g in results.into_iter().flatten() {
        if verify_rec(&g, &terms_rat).is_ok() {
            return Ok(GuessOutcome::Found(g));
        }
    }
    Ok(GuessOutcome::None(Envelope {
        r_max,
        d_max,
        terms: terms.len(),
    }))
}

pub fn guess_integers(
    terms: &[BigInt],
    r_max: usize,
    d_max: usize,
) -> Result<GuessOutcome, HolonomicError> {
    let q: Vec<BigRational> = terms
        .iter()
        .cloned()
        .map(BigRational::from_integer)
        .collect();
    guess(&q, r_max, d_max)
}

fn row(ints: &[BigInt], n: usize, r: usize, d: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity((r + 1) * (d + 1));
    let nb = BigInt::from(n);
    for i in 0..=r {
        let mut pw = BigInt::one();
        for _ in 0..=d {
            out.push(&pw * &ints[n + i]);
            pw *= &nb;
        }
    }
    out
}

fn mod_screen(ints: &[BigInt], n_rows: usize, r: usize, d: usize) -> (usize, Vec<usize>) {
    let cols = (r + 1) * (d + 1);
    let pm = BigInt::from(SCREEN_PRIME);
    let red: Vec<u64> = ints
        .iter()
        .map(|a| a.mod_floor(&pm).to_u64().unwrap())
        .collect();
    let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % SCREEN_PRIME as u128) as u64;
    let subm = |a: u64, b: u64| if a >= b { a - b } else { a + SCREEN_PRIME - b };
    let inv = |a: u64| {
        let (mut base, mut e, mut acc) = (a, SCREEN_PRIME - 2, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulm(acc, base);
            }
            base = mulm(base, base);
            e >>= 1;
        }
        acc
    };
    // Echelon basis keyed by pivot column; rows are normalized to pivot 1.
    let mut basis: Vec<Option<Vec<u64>>> = vec![None; cols];
    let mut independent = Vec::new();
    for n in 0..n_rows {
        let mut v = Vec::with_capacity(cols);
        for i in 0..=r {
            let mut pw = 1u64;
            for _ in 0..=d {
                v.push(mulm(pw, red[n + i]));
                pw = mulm(pw, n as u64 % SCREEN_PRIME);
            }
        }
        for c in 0..cols {
            if v[c] == 0 {
                continue;
            }
            match &basis[c] {
                Some(b) => {
                    let f = v[c];
                    for k in c..cols {
                        v[k] = subm(v[k], mulm(f, b[k]));
                    }
                }
                None => {
                    let iv = inv(v[c]);
                    for x in v.iter_mut().skip(c) {
                        *x = mulm(*x, iv);
                    }
                    basis[c] = Some(v);
                    independent.push(n);
                    break;
                }
            }
        }
        if independent.len() == cols {
            break;
        }
    }
    (independent.len(), independent)
}

/// Integer nullspace basis of `m` by fraction-free elimination.
fn exact_nullspace(mut m: Vec<Vec<BigInt>>, cols: usize) -> Vec<Vec<BigInt>> {
    let rows = m.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        let Some(sel) = (pr..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(pr, sel);
        for i in pr + 1..rows {
            for j in (c + 1..cols).rev() {
                let v = (&m[pr][c] * &m[i][j] - &m[i][c] * &m[pr][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        // Entries left of c in rows below are zero; columns skipped as
        // non-pivot keep Bareiss exactness because they are all zero there.
        prev = m[pr][c].clone();
        pivots.push(c);
        pr += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut x: Vec<BigRational> = vec![BigRational::zero(); cols];
        x[f] = BigRational::one();
        for (k, &pc) in pivots.iter().enumerate().rev() {
            let mut s = BigRational::zero();
            for j in pc + 1..cols {
                if !x[j].is_zero() && !m[k][j].is_zero() {
                    s += BigRational::from_integer(m[k][j].clone()) * &x[j];
                }
            }
            x[pc] = -s / BigRational::from_integer(m[k][pc].clone());
        }
        let (ints, _) = common_denominator(&x);
        let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        basis.push(
            ints.into_iter()
                .map(|v| if g.is_zero() { v } else { v / &g })
                .collect(),
        );
    }
    basis
}

fn support_key(v: &[BigInt]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, _)| i)
        .collect()
}

fn to_guess(v: &[BigInt], r: usize, d: usize) -> Option<RecurrenceGuess> {
    let polys: Vec<IntPoly> = (0..=r)
        .map(|i| IntPoly::new(v[i * (d + 1)..(i + 1) * (d + 1)].to_vec()))
        .collect();
    RecurrenceGuess::from_polys(polys).ok()
}

fn fit(ints: &[BigInt], r: usize, d: usize) -> Option<RecurrenceGuess> {
    let cols = (r + 1) * (d + 1);
    let total_rows = ints.len().checked_sub(r)?;
    let fit_rows = total_rows.checked_sub(HOLDOUT)?;
    if fit_rows < cols {
        return None;
    }
    let (rank, independent) = mod_screen(ints, fit_rows, r, d);
    if rank == cols {
        return None;
    }
    let all_rows = || {
        (0..fit_rows)
            .map(|n| row(ints, n, r, d))
            .collect::<Vec<_>>()
    };
    let solve_with = |rows: Vec<Vec<BigInt>>| -> Option<(Vec<BigInt>, usize)> {
        let basis = exact_nullspace(rows, cols);
        let nullity = basis.len();
        let chosen = basis
            .into_iter()
            .filter(|v| v[r * (d + 1)..].iter().any(|x| !x.is_zero()))
            .min_by_key(|v| support_key(v))?;
        Some((chosen, nullity))
    };
    let check = |v: &[BigInt]| -> bool {
        (0..total_rows).all(|n| {
            row(ints, n, r, d)
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum::<BigInt>()
                .is_zero()
        })
    };
    let sub: Vec<Vec<BigInt>> = independent.iter().map(|&n| row(ints, n, r, d)).collect();
    let (v, nullity) = match solve_with(sub) {
        Some((v, k)) if check(&v) => (v, k),
        _ => {
            let (v, k) = solve_with(all_rows())?;
            if !check(&v) {
                return None;
            }
            (v, k)
        }
    };
    let mut g = to_guess(&v, r, d)?;
    g.order = r;
    g.degree = d;
    g.fitted_rows = fit_rows;
    g.holdout_verified = HOLDOUT;
    g.nullity = nullity;
    g.ambiguous = nullity > 1;
    Some(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{binomial, c_lambda_mu, family_terms, Family};
    use num_traits::FromPrimitive;
    use proptest::prelude::*;

    fn central(n: usize) -> Vec<BigInt> {
        (0..n).map(|k| binomial(2 * k as i64, k as i64)).collect()
    }

    fn rat(v: &[BigInt]) -> Vec<BigRational> {
        v.iter().cloned().map(BigRational::from_integer).collect()
    }

    #[test]
    fn central_binomial_first_order() {
        let out = guess_integers(&central(40), 2, 2).unwrap();
        let g = out.found().expect("recurrence");
        assert_eq!((g.order, g.degree), (1, 1));
        let want = RecurrenceGuess::from_polys(vec![
            IntPoly::from_i64(&[-2, -4]),
            IntPoly::from_i64(&[1, 1]),
        ])
        .unwrap();
        assert!(g.proportional_to(&want), "{g}");
    }

    #[test]
    fn recovers_level7_operator() {
        let u = family_terms(Family::U7, 59).unwrap();
        let g = guess_integers(&u, 3, 4).unwrap();
        let g = g.found().expect("recurrence");
        assert_eq!((g.order, g.degree), (2, 3));
        assert!(g.proportional_to(&RecurrenceGuess::u7()), "{g}");
        assert!(!g.ambiguous);
    }

    #[test]
    fn verify_examples() {
        let u = family_terms(Family::U7, 99).unwrap();
        assert_eq!(verify_rec_integers(&RecurrenceGuess::u7(), &u), Ok(()));
        // 13n^2 + 13n + 4 -> 14n^2 + 13n + 4; shifted: 14n^2 + 41n + 31
        let mut bad = RecurrenceGuess::u7();
        bad.polys[1] = -&(&IntPoly::from_i64(&[3, 2]) * &IntPoly::from_i64(&[31, 41, 14]));
        assert_eq!(verify_rec_integers(&bad, &u), Err(0));
        assert_eq!(
            RecurrenceGuess::from_polys(vec![IntPoly::from_i64(&[1]), IntPoly::default()]),
            Err(HolonomicError::ZeroLeading)
        );
    }

    #[test]
    fn insufficient_terms() {
        let e = guess_integers(&central(30), 3, 4).unwrap_err();
        assert!(matches!(
            e,
            HolonomicError::InsufficientTerms {
                need: 43,
                have: 30,
                ..
            }
        ));
    }

    #[test]
    fn none_reports_envelope() {
        let c = c_lambda_mu(-4, 2, 79);
        match guess_integers(&c, 2, 3).unwrap() {
            GuessOutcome::None(env) => assert_eq!(
                env,
                Envelope {
                    r_max: 2,
                    d_max: 3,
                    terms: 80
                }
            ),
            GuessOutcome::Found(g) => panic!("unexpected {g}"),
        }
    }

    #[test]
    fn candidate_order() {
        assert_eq!(candidates(2, 1), vec![(1, 0), (1, 1), (2, 0), (2, 1)]);
    }

    #[test]
    fn display_form() {
        let g = RecurrenceGuess::from_polys(vec![
            IntPoly::from_i64(&[-2, -4]),
            IntPoly::from_i64(&[1, 1]),
        ])
        .unwrap();
        assert_eq!(g.to_string(), "(n + 1)·a(n+1) + (-4n - 2)·a(n) = 0");
        let js = g.to_json();
        assert_eq!(js["polys"][0][1], "-4");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn scale_invariant(num in 1i64..50, den in 1i64..50, neg in proptest::bool::ANY) {
            let s = BigRational::new(BigInt::from(if neg { -num } else { num }), BigInt::from(den));
            let base = rat(&central(34));
            let scaled: Vec<BigRational> = base.iter().map(|t| t * &s).collect();
            let a = guess(&base, 2, 2).unwrap();
            let b = guess(&scaled, 2, 2).unwrap();
            let (a, b) = (a.found().unwrap(), b.found().unwrap());
            prop_assert_eq!((a.order, a.degree), (b.order, b.degree));
            prop_assert!(a.proportional_to(b));
            prop_assert!(verify_rec(b, &scaled).is_ok());
        }

        #[test]
        fn guesses_hold_on_all_terms(k in 1i64..6) {
            // (k^n) C(2n,n) satisfies (n+1)a_{n+1} = 2k(2n+1)a_n.
            let t: Vec<BigRational> = central(32).iter().enumerate()
                .map(|(n, c)| BigRational::from_integer(c * BigInt::from(k).pow(n as u32)))
                .collect();
            let g = guess(&t, 1, 2).unwrap();
            let g = g.found().unwrap();
            prop_assert!(verify_rec(g, &t).is_ok());
            prop_assert_eq!(g.polys[0].clone(), IntPoly::from_i64(&[-2 * k, -4 * k]));
            let _ = BigRational::from_i64(k);
        }
    }
}
