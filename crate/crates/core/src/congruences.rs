//! Lucas congruences `c(n) ≡ Π c(n_i) (mod p)` and the congruences
//! `c(m p^r) ≡ c(m p^{r-1}) (mod p^{ℓ r})` over explicit prime/index grids.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::primepower::PrimePower;
use crate::sequences::{family_residues, family_terms, Family, SequenceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CongruenceError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("sequence has {have} terms, {need} required")]
    TooFewTerms { have: usize, need: usize },
    #[error("counterexample at n={n} mod {p} did not re-verify")]
    Unconfirmed { p: u64, n: u64 },
}

/// Little-endian base-`p` digits; `[0]` for `n = 0`.
pub fn base_p_digits(mut n: u64, p: u64) -> Vec<u64> {
    assert!(p >= 2, "base must be at least 2");
    if n == 0 {
        return vec![0];
    }
    let mut d = Vec::new();
    while n > 0 {
        d.push(n % p);
        n /= p;
    }
    d
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum LucasVerdict {
    Pass,
    Counterexample {
        n: u64,
        residue: u64,
        digit_product: u64,
    },
}

impl LucasVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, LucasVerdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SuperVerdict {
    Pass,
    Counterexample { m: u64, r: u32 },
}

impl SuperVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, SuperVerdict::Pass)
    }
}

/// Largest `r ≤ r_max` with `p^r ≤ n_max`, at least 1.
pub fn effective_depth(p: u64, n_max: usize, r_max: u32) -> u32 {
    let mut r = 0;
    let mut pr: u64 = 1;
    while r < r_max {
        match pr.checked_mul(p) {
            Some(next) if next <= n_max as u64 => {
                pr = next;
                r += 1;
            }
            _ => break,
        }
    }
    r.max(1)
}

/// Terms `0..=n_max` of one family reduced modulo `p^e`, computed once and
/// shared by every test at that prime.
#[derive(Debug, Clone)]
pub struct ResidueTable {
    pub family: Option<Family>,
    pub pp: PrimePower,
    pub residues: Vec<u64>,
}

impl ResidueTable {
    /// Enough precision for `ℓ ≤ 3` at every depth the grid can reach.
    pub fn for_family(
        family: Family,
        p: u64,
        n_max: usize,
        r_max: u32,
    ) -> Result<Self, CongruenceError> {
        let depth = effective_depth(p, n_max, r_max);
        let e = 3 * depth;
        let pp = PrimePower::new(p, e).ok_or(SequenceError::ModulusTooLarge { p, e })?;
        let residues = family_residues(family, n_max, p, e)?;
        Ok(Self {
            family: Some(family),
            pp,
            residues,
        })
    }

    pub fn from_terms(terms: &[BigInt], p: u64, e: u32) -> Self {
        let pp = PrimePower::new(p, e).expect("modulus fits in 62 bits");
        let m = BigInt::from(pp.modulus);
        let residues = terms
            .iter()
            .map(|t| t.mod_floor(&m).to_u64().expect("residue fits"))
            .collect();
        Self {
            family: None,
            pp,
            residues,
        }
    }

    pub fn n_max(&self) -> usize {
        self.residues.len() - 1
    }

    pub fn lucas(&self, n_max: usize) -> LucasVerdict {
        let p = self.pp.p;
        let n_max = n_max.min(self.n_max());
        for n in 0..=n_max as u64 {
            let residue = self.residues[n as usize] % p;
            let digit_product = base_p_digits(n, p)
                .iter()
                .fold(1 % p, |acc, &d| acc * (self.residues[d as usize] % p) % p);
            if residue != digit_product {
                return LucasVerdict::Counterexample {
                    n,
                    residue,
                    digit_product,
                };
            }
        }
        LucasVerdict::Pass
    }

    /// `ℓ r` must not exceed the table's exponent at any tested depth.
    pub fn supercongruence(&self, ell: u32, r_max: u32, n_max: usize) -> SuperVerdict {
        if ell == 0 {
            return SuperVerdict::Pass;
        }
        let p = self.pp.p;
        let n_max = n_max.min(self.n_max()) as u64;
        let mut pr: u64 = 1;
        for r in 1..=r_max {
            pr = match pr.checked_mul(p) {
                Some(v) if v <= n_max => v,
                _ => break,
            };
            assert!(
                ell * r <= self.pp.e,
                "residue table too coarse for ℓ={ell}, r={r}"
            );
            let modulus = p.pow(ell * r);
            for m in 1..=n_max / pr {
                let a = self.residues[(m * pr) as usize] % modulus;
                let b = self.residues[(m * pr / p) as usize] % modulus;
                if a != b {
                    return SuperVerdict::Counterexample { m, r };
                }
            }
        }
        SuperVerdict::Pass
    }
}

/// Lucas congruences for `n ≤ n_max` straight from the integer terms.
pub fn lucas_check(seq: &[BigInt], p: u64, n_max: usize) -> Result<LucasVerdict, CongruenceError> {
    if seq.len() <= n_max {
        return Err(CongruenceError::TooFewTerms {
            have: seq.len(),
            need: n_max + 1,
        });
    }
    Ok(ResidueTable::from_terms(&seq[..=n_max], p, 1).lucas(n_max))
}

/// `c(m p^r) ≡ c(m p^{r-1}) (mod p^{ℓ r})` for all `m p^r ≤ n_max`, `r ≤ r_max`,
/// on exact integers.
pub fn super_check(
    seq: &[BigInt],
    p: u64,
    ell: u32,
    r_max: u32,
    n_max: usize,
) -> Result<SuperVerdict, CongruenceError> {
    if seq.len() <= n_max {
        return Err(CongruenceError::TooFewTerms {
            have: seq.len(),
            need: n_max + 1,
        });
    }
    if ell == 0 {
        return Ok(SuperVerdict::Pass);
    }
    let bp = BigInt::from(p);
    let mut pr: u64 = 1;
    for r in 1..=r_max {
        pr = match pr.checked_mul(p) {
            Some(v) if v <= n_max as u64 => v,
            _ => break,
        };
        let modulus = num_traits::pow(bp.clone(), (ell * r) as usize);
        for m in 1..=n_max as u64 / pr {
            let diff = &seq[(m * pr) as usize] - &seq[(m * pr / p) as usize];
            if !diff.mod_floor(&modulus).is_zero() {
                return Ok(SuperVerdict::Counterexample { m, r });
            }
        }
    }
    Ok(SuperVerdict::Pass)
}

/// Largest `ℓ ∈ {0,1,2,3}` passing on the grid, per prime.
pub fn max_ell(
    seq: &[BigInt],
    primes: &[u64],
    r_max: u32,
    n_max: usize,
) -> Result<Vec<(u64, u32)>, CongruenceError> {
    primes
        .iter()
        .map(|&p| {
            for ell in (1..=3).rev() {
                if super_check(seq, p, ell, r_max, n_max)?.passed() {
                    return Ok((p, ell));
                }
            }
            Ok((p, 0))
        })
        .collect()
}

fn table_max_ell(t: &ResidueTable, r_max: u32, n_max: usize) -> (u32, Option<SuperVerdict>) {
    let mut first_failure = None;
    for ell in (1..=3).rev() {
        let v = t.supercongruence(ell, r_max, n_max);
        if v.passed() {
            return (ell, first_failure);
        }
        first_failure = Some(v);
    }
    (0, first_failure)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub primes: Vec<u64>,
    pub n_max: usize,
    pub r_max: u32,
    /// Smallest prime that counts toward an `ℓ ≥ 2` verdict.
    pub super_min_prime: u64,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            primes: crate::primes_up_to(50),
            n_max: 2000,
            r_max: 4,
            super_min_prime: 5,
        }
    }
}

impl Grid {
    pub fn new(prime_bound: u64, n_max: usize) -> Self {
        Self {
            primes: crate::primes_up_to(prime_bound),
            n_max,
            ..Self::default()
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "primes {}..{} ({} primes), n <= {}, r <= {}, l>=2 verdicts from p >= {}",
            self.primes.first().copied().unwrap_or(0),
            self.primes.last().copied().unwrap_or(0),
            self.primes.len(),
            self.n_max,
            self.r_max,
            self.super_min_prime
        )
    }

    /// Primes whose verdict counts toward level `ell`.
    pub fn primes_for(&self, ell: u32) -> impl Iterator<Item = u64> + '_ {
        let min = if ell >= 2 { self.super_min_prime } else { 0 };
        self.primes.iter().copied().filter(move |&p| p >= min)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeResult {
    pub p: u64,
    pub lucas: LucasVerdict,
    pub max_ell: u32,
    /// The first failing `(m, r)` at level `max_ell + 1`.
    pub super_failure: Option<SuperVerdict>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub family: Family,
    pub grid: Grid,
    pub grid_description: String,
    pub results: Vec<PrimeResult>,
}

impl CongruenceReport {
    pub fn lucas_passes(&self) -> bool {
        self.results.iter().all(|r| r.lucas.passed())
    }

    pub fn lucas_for(&self, p: u64) -> Option<&LucasVerdict> {
        self.results.iter().find(|r| r.p == p).map(|r| &r.lucas)
    }

    /// Every prime counting toward `ell` reached at least `ell`.
    pub fn passes_ell(&self, ell: u32) -> bool {
        let counted: Vec<u64> = self.grid.primes_for(ell).collect();
        self.results
            .iter()
            .filter(|r| counted.contains(&r.p))
            .all(|r| r.max_ell >= ell)
    }

    /// Largest `ℓ` passed on the whole grid.
    pub fn grid_ell(&self) -> u32 {
        (1..=3).rev().find(|&l| self.passes_ell(l)).unwrap_or(0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("family,p,lucas,max_ell,N\n");
        for r in &self.results {
            let lucas = match &r.lucas {
                LucasVerdict::Pass => "pass".to_string(),
                LucasVerdict::Counterexample { n, .. } => format!("fail@{n}"),
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.family, r.p, lucas, r.max_ell, self.grid.n_max
            ));
        }
        out
    }
}

fn exact_residue(family: Family, n: usize, modulus: u64) -> Result<u64, CongruenceError> {
    let terms = family_terms(family, n)?;
    Ok(terms[n]
        .mod_floor(&BigInt::from(modulus))
        .to_u64()
        .expect("fits"))
}

// Terms up to this index are re-derived exactly; beyond it a fresh modular
// table at a coarser modulus is used.
const EXACT_REVERIFY_LIMIT: usize = 400;

fn residue_independent(family: Family, n: usize, p: u64, e: u32) -> Result<u64, CongruenceError> {
    let modulus = p.pow(e);
    if n <= EXACT_REVERIFY_LIMIT {
        return exact_residue(family, n, modulus);
    }
    let r = family_residues(family, n, p, e)?;
    Ok(r[n])
}

fn reverify_lucas(family: Family, p: u64, v: &LucasVerdict) -> Result<(), CongruenceError> {
    if let LucasVerdict::Counterexample { n, .. } = v {
        let own = residue_independent(family, *n as usize, p, 1)?;
        let prod = base_p_digits(*n, p).iter().try_fold(1u64, |acc, &d| {
            residue_independent(family, d as usize, p, 1).map(|x| acc * x % p)
        })?;
        if own == prod {
            return Err(CongruenceError::Unconfirmed { p, n: *n });
        }
    }
    Ok(())
}

fn reverify_super(
    family: Family,
    p: u64,
    ell: u32,
    v: &SuperVerdict,
) -> Result<(), CongruenceError> {
    if let SuperVerdict::Counterexample { m, r } = v {
        let n = m * p.pow(*r);
        let e = ell * r;
        let a = residue_independent(family, n as usize, p, e)?;
        let b = residue_independent(family, (n / p) as usize, p, e)?;
        if a == b {
            return Err(CongruenceError::Unconfirmed { p, n });
        }
    }
    Ok(())
}

/// Runs Lucas and level tests for one family over the grid, one prime per
/// task, merged in prime order.
pub fn check_family(family: Family, grid: &Grid) -> Result<CongruenceReport, CongruenceError> {
    let results: Vec<Result<PrimeResult, CongruenceError>> = grid
        .primes
        .par_iter()
        .map(|&p| {
            let table = ResidueTable::for_family(family, p, grid.n_max, grid.r_max)?;
            let lucas = table.lucas(grid.n_max);
            reverify_lucas(family, p, &lucas)?;
            let (ell, failure) = table_max_ell(&table, grid.r_max, grid.n_max);
            if let Some(f) = &failure {
                reverify_super(family, p, ell + 1, f)?;
            }
            Ok(PrimeResult {
                p,
                lucas,
                max_ell: ell,
                super_failure: failure,
            })
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(CongruenceReport {
        family,
        grid: grid.clone(),
        grid_description: grid.describe(),
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{c_lambda_mu, family_terms};
    use proptest::prelude::*;

    fn ones(n: usize) -> Vec<BigInt> {
        vec![BigInt::from(1); n + 1]
    }

    #[test]
    fn digit_examples() {
        assert_eq!(base_p_digits(5, 3), vec![2, 1]);
        assert_eq!(base_p_digits(0, 7), vec![0]);
        assert_eq!(base_p_digits(49, 7), vec![0, 0, 1]);
    }

    #[test]
    fn lucas_examples() {
        let u = family_terms(Family::U7, 200).unwrap();
        assert_eq!(lucas_check(&u, 3, 200).unwrap(), LucasVerdict::Pass);
        let c = c_lambda_mu(-4, 2, 200);
        assert!(!lucas_check(&c, 5, 200).unwrap().passed());
        assert_eq!(lucas_check(&c, 2, 200).unwrap(), LucasVerdict::Pass);
        assert_eq!(lucas_check(&c, 3, 200).unwrap(), LucasVerdict::Pass);
    }

    #[test]
    fn lucas_below_prime_is_trivial() {
        let c = c_lambda_mu(-4, 2, 10);
        assert_eq!(lucas_check(&c, 11, 10).unwrap(), LucasVerdict::Pass);
    }

    #[test]
    fn super_examples() {
        let n = 650;
        let hat4 = family_terms(Family::FHat(4), n).unwrap();
        assert!(super_check(&hat4, 5, 3, 4, n).unwrap().passed());
        let t = ResidueTable::for_family(
            Family::C {
                lambda: 16,
                mu: 256,
            },
            5,
            n,
            4,
        )
        .unwrap();
        assert!(t.supercongruence(2, 4, n).passed());
        let c = c_lambda_mu(-1, 1, n);
        let v = super_check(&c, 5, 2, 4, n).unwrap();
        assert_eq!(v, SuperVerdict::Counterexample { m: 1, r: 1 });
        assert!(super_check(&c, 5, 0, 4, n).unwrap().passed());
    }

    #[test]
    fn max_ell_examples() {
        let u = family_terms(Family::U7, 400).unwrap();
        let primes = crate::primes_up_to(20);
        for (p, l) in max_ell(&u, &primes, 4, 400).unwrap() {
            assert!(l >= 1, "p={p}");
        }
        for (_, l) in max_ell(&ones(100), &primes, 4, 100).unwrap() {
            assert_eq!(l, 3);
        }
        let t = ResidueTable::for_family(Family::C { lambda: 4, mu: 16 }, 7, 400, 4).unwrap();
        assert_eq!(table_max_ell(&t, 4, 400).0, 3);
    }

    #[test]
    fn residue_tables_agree_with_exact_checks() {
        let fam = Family::C { lambda: -2, mu: 4 };
        let exact = family_terms(fam, 300).unwrap();
        for p in [2, 3, 5, 7, 11, 13] {
            let t = ResidueTable::for_family(fam, p, 300, 4).unwrap();
            assert_eq!(t.lucas(300), lucas_check(&exact, p, 300).unwrap(), "p={p}");
            for ell in 0..=3 {
                assert_eq!(
                    t.supercongruence(ell, 4, 300),
                    super_check(&exact, p, ell, 4, 300).unwrap()
                );
            }
        }
    }

    #[test]
    fn report_formats() {
        let grid = Grid {
            primes: vec![2, 3, 5],
            n_max: 100,
            r_max: 2,
            super_min_prime: 5,
        };
        let rep = check_family(Family::C { lambda: -4, mu: 2 }, &grid).unwrap();
        assert!(!rep.lucas_passes());
        assert!(rep.lucas_for(2).unwrap().passed());
        let csv = rep.to_csv();
        assert!(csv.starts_with("family,p,lucas,max_ell,N\n"));
        assert_eq!(csv.lines().count(), 4);
        let js = rep.to_json();
        assert_eq!(js["family"], "c:-4,2");
        assert_eq!(js["results"].as_array().unwrap().len(), 3);
    }

    proptest! {
        #[test]
        fn monotone_in_ell(lambda in -6i64..6, mu in -6i64..6, pi in 0usize..4) {
            let p = [2u64, 3, 5, 7][pi];
            let c = c_lambda_mu(lambda, mu, 60);
            for ell in 1..=3 {
                if super_check(&c, p, ell, 3, 60).unwrap().passed() {
                    prop_assert!(super_check(&c, p, ell - 1, 3, 60).unwrap().passed());
                }
            }
        }

        #[test]
        fn counterexamples_really_fail(lambda in -6i64..6, mu in -6i64..6) {
            let c = c_lambda_mu(lambda, mu, 80);
            if let LucasVerdict::Counterexample { n, .. } = lucas_check(&c, 5, 80).unwrap() {
                let p = BigInt::from(5);
                let prod = base_p_digits(n, 5).iter().fold(BigInt::from(1), |a, &d| a * &c[d as usize]);
                prop_assert!(!(&c[n as usize] - prod).mod_floor(&p).is_zero());
            }
        }
    }
}
