//! Sweeps over `(λ, μ)` for both equation shapes, filtered by congruence
//! tests, with JSON-lines output that can be resumed.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::congruences::{CongruenceError, LucasVerdict, ResidueTable, SuperVerdict};
use crate::holonomic::{guess_integers, GuessOutcome};
use crate::sequences::{c_lambda_mu, c_variant, Shape};

#[derive(Debug, thiserror::Error)]
pub enum SearchError {
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad record on line {line}: {message}")]
    BadRecord { line: usize, message: String },
}

impl PartialEq for SearchError {
    fn eq(&self, other: &Self) -> bool {
        self.to_string() == other.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    #[default]
    None,
    /// `μ = λ²`; the μ range is ignored.
    Lambda2EqMu,
    /// `λ = −2μ`; the λ range is ignored.
    LambdaEqMinus2mu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filter {
    Lucas,
    Ell,
    Holonomic,
}

fn default_n() -> usize {
    400
}
fn default_confirm() -> usize {
    2000
}
fn default_prime_bound() -> u64 {
    50
}
fn default_r_max() -> u32 {
    4
}
fn default_super_min_prime() -> u64 {
    5
}
fn default_probe_primes() -> Vec<u64> {
    vec![5, 7]
}
fn default_filters() -> Vec<Filter> {
    vec![Filter::Lucas, Filter::Ell, Filter::Holonomic]
}
fn default_probe_terms() -> usize {
    60
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub shape: Shape,
    /// Inclusive range.
    pub lambda: [i64; 2],
    /// Inclusive range.
    pub mu: [i64; 2],
    #[serde(default)]
    pub constraint: Constraint,
    #[serde(default)]
    pub lucas: bool,
    /// Level `ℓ` of the congruence test, 1 to 3.
    #[serde(default)]
    pub ell: Option<u32>,
    #[serde(default)]
    pub holonomic_probe: bool,
    #[serde(default = "default_n")]
    pub n: usize,
    /// Term budget of the confirmation pass for survivors; 0 disables it.
    #[serde(default = "default_confirm")]
    pub confirm_n: usize,
    #[serde(default = "default_prime_bound")]
    pub prime_bound: u64,
    #[serde(default = "default_r_max")]
    pub r_max: u32,
    #[serde(default = "default_super_min_prime")]
    pub super_min_prime: u64,
    /// Primes tried first in every prime loop.
    #[serde(default = "default_probe_primes")]
    pub probe_primes: Vec<u64>,
    #[serde(default = "default_filters")]
    pub filter_order: Vec<Filter>,
    #[serde(default = "default_probe_terms")]
    pub probe_terms: usize,
}

impl SweepSpec {
    pub fn new(shape: Shape, lambda: [i64; 2], mu: [i64; 2]) -> Self {
        Self {
            shape,
            lambda,
            mu,
            constraint: Constraint::None,
            lucas: false,
            ell: None,
            holonomic_probe: false,
            n: default_n(),
            confirm_n: default_confirm(),
            prime_bound: default_prime_bound(),
            r_max: default_r_max(),
            super_min_prime: default_super_min_prime(),
            probe_primes: default_probe_primes(),
            filter_order: default_filters(),
            probe_terms: default_probe_terms(),
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::InvalidSpec(m.to_string()));
        if self.lambda[0] > self.lambda[1] && self.constraint != Constraint::LambdaEqMinus2mu {
            return bad("empty λ range");
        }
        if self.mu[0] > self.mu[1] && self.constraint != Constraint::Lambda2EqMu {
            return bad("empty μ range");
        }
        if self.n < 50 {
            return bad("term budget n must be at least 50");
        }
        if let Some(l) = self.ell {
            if !(1..=3).contains(&l) {
                return bad("ell must be 1, 2 or 3");
            }
        }
        if !self.lucas && self.ell.is_none() && !self.holonomic_probe {
            return bad("no tests selected");
        }
        if self.prime_bound < 2 {
            return bad("prime bound below 2");
        }
        if self.holonomic_probe && self.probe_terms < crate::holonomic::terms_needed(2, 3) {
            return bad("probe_terms too small for the holonomic probe");
        }
        Ok(())
    }

    /// All pairs in range, in sweep order, without `λ = μ`.
    pub fn pairs(&self) -> Vec<(i64, i64)> {
        let out: Vec<(i64, i64)> = match self.constraint {
            Constraint::None => (self.lambda[0]..=self.lambda[1])
                .flat_map(|l| (self.mu[0]..=self.mu[1]).map(move |m| (l, m)))
                .collect(),
            Constraint::Lambda2EqMu => (self.lambda[0]..=self.lambda[1])
                .map(|l| (l, l * l))
                .collect(),
            Constraint::LambdaEqMinus2mu => {
                (self.mu[0]..=self.mu[1]).map(|m| (-2 * m, m)).collect()
            }
        };
        out.into_iter().filter(|(l, m)| l != m).collect()
    }

    /// Primes up to the bound, probe primes first.
    pub fn prime_order(&self) -> Vec<u64> {
        let all = crate::primes_up_to(self.prime_bound);
        let mut out: Vec<u64> = self
            .probe_primes
            .iter()
            .copied()
            .filter(|p| all.contains(p))
            .collect();
        out.extend(all.into_iter().filter(|p| !self.probe_primes.contains(p)));
        out
    }

    fn active_filters(&self) -> Vec<Filter> {
        let mut order: Vec<Filter> = self.filter_order.clone();
        for f in default_filters() {
            if !order.contains(&f) {
                order.push(f);
            }
        }
        order
            .into_iter()
            .filter(|f| match f {
                Filter::Lucas => self.lucas,
                Filter::Ell => self.ell.is_some(),
                Filter::Holonomic => self.holonomic_probe,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum TestVerdict {
    Pass,
    Fail {
        p: Option<u64>,
        detail: String,
    },
    /// Not run because an earlier filter failed.
    Skipped,
}

impl TestVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, TestVerdict::Pass)
    }
    fn failed(&self) -> bool {
        matches!(self, TestVerdict::Fail { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub shape: Shape,
    pub lambda: i64,
    pub mu: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lucas: Option<TestVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<TestVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holonomic: Option<TestVerdict>,
    pub passed: bool,
    /// Outcome of the confirmation pass, when it ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confirmed: Option<bool>,
    pub class: String,
}

impl SweepRecord {
    pub fn survives(&self) -> bool {
        self.passed && self.confirmed != Some(false)
    }
}

struct Tables<'a> {
    spec: &'a SweepSpec,
    lambda: i64,
    mu: i64,
    n: usize,
    cache: HashMap<u64, ResidueTable>,
}

impl Tables<'_> {
    fn get(&mut self, p: u64) -> Result<&ResidueTable, CongruenceError> {
        if !self.cache.contains_key(&p) {
            let fam = self.spec.shape.family(self.lambda, self.mu);
            let t = ResidueTable::for_family(fam, p, self.n, self.spec.r_max)?;
            self.cache.insert(p, t);
        }
        Ok(&self.cache[&p])
    }
}

fn run_lucas(t: &mut Tables, primes: &[u64]) -> Result<TestVerdict, CongruenceError> {
    let n = t.n;
    for &p in primes {
        if let LucasVerdict::Counterexample {
            n,
            residue,
            digit_product,
        } = t.get(p)?.lucas(n)
        {
            let detail =
                format!("c({n}) = {residue} but the digit product is {digit_product} mod {p}");
            return Ok(TestVerdict::Fail { p: Some(p), detail });
        }
    }
    Ok(TestVerdict::Pass)
}

fn run_ell(t: &mut Tables, primes: &[u64], ell: u32) -> Result<TestVerdict, CongruenceError> {
    let (n, r_max, min) = (t.n, t.spec.r_max, t.spec.super_min_prime);
    for &p in primes {
        if ell >= 2 && p < min {
            continue;
        }
        if let SuperVerdict::Counterexample { m, r } = t.get(p)?.supercongruence(ell, r_max, n) {
            let detail =
                format!("c(m p^r) differs from c(m p^(r-1)) mod p^(l r) at m = {m}, r = {r}");
            return Ok(TestVerdict::Fail { p: Some(p), detail });
        }
    }
    Ok(TestVerdict::Pass)
}

fn exact_terms(shape: Shape, lambda: i64, mu: i64, n: usize) -> Vec<num_bigint::BigInt> {
    match shape {
        Shape::Alg0 => c_lambda_mu(lambda, mu, n),
        Shape::Variant => c_variant(lambda, mu, n),
    }
}

fn run_holonomic(spec: &SweepSpec, lambda: i64, mu: i64) -> TestVerdict {
    let terms = exact_terms(spec.shape, lambda, mu, spec.probe_terms - 1);
    match guess_integers(&terms, 2, 3) {
        Ok(GuessOutcome::Found(_)) => TestVerdict::Pass,
        Ok(GuessOutcome::None(env)) => TestVerdict::Fail {
            p: None,
            detail: format!(
                "no recurrence with r <= {}, d <= {} on {} terms",
                env.r_max, env.d_max, env.terms
            ),
        },
        Err(e) => TestVerdict::Fail {
            p: None,
            detail: e.to_string(),
        },
    }
}

fn congruence_verdicts(
    spec: &SweepSpec,
    lambda: i64,
    mu: i64,
    n: usize,
    filters: &[Filter],
) -> Result<(Option<TestVerdict>, Option<TestVerdict>), CongruenceError> {
    let primes = spec.prime_order();
    let mut t = Tables {
        spec,
        lambda,
        mu,
        n,
        cache: HashMap::new(),
    };
    let (mut lucas, mut ell) = (None, None);
    let mut dead = false;
    for f in filters {
        let v = match f {
            Filter::Lucas if !dead => run_lucas(&mut t, &primes)?,
            Filter::Ell if !dead => run_ell(&mut t, &primes, spec.ell.unwrap_or(1))?,
            Filter::Lucas | Filter::Ell => TestVerdict::Skipped,
            Filter::Holonomic => continue,
        };
        dead |= v.failed();
        match f {
            Filter::Lucas => lucas = Some(v),
            _ => ell = Some(v),
        }
    }
    Ok((lucas, ell))
}

/// Verdicts for a single pair, including the confirmation pass.
pub fn test_pair(spec: &SweepSpec, lambda: i64, mu: i64) -> Result<SweepRecord, SearchError> {
    let filters = spec.active_filters();
    let mut rec = SweepRecord {
        shape: spec.shape,
        lambda,
        mu,
        lucas: None,
        ell: None,
        holonomic: None,
        passed: false,
        confirmed: None,
        class: classify(spec.shape, lambda, mu).to_string(),
    };
    let mut dead = false;
    let mut congruence_done = false;
    for f in &filters {
        match f {
            Filter::Holonomic => {
                let v = if dead {
                    TestVerdict::Skipped
                } else {
                    run_holonomic(spec, lambda, mu)
                };
                dead |= v.failed();
                rec.holonomic = Some(v);
            }
            Filter::Lucas | Filter::Ell if !congruence_done => {
                congruence_done = true;
                let cong: Vec<Filter> = filters
                    .iter()
                    .copied()
                    .filter(|f| *f != Filter::Holonomic)
                    .collect();
                if dead {
                    rec.lucas = spec.lucas.then_some(TestVerdict::Skipped);
                    rec.ell = spec.ell.map(|_| TestVerdict::Skipped);
                } else {
                    let (l, e) = congruence_verdicts(spec, lambda, mu, spec.n, &cong)?;
                    dead |= l.as_ref().is_some_and(TestVerdict::failed)
                        || e.as_ref().is_some_and(TestVerdict::failed);
                    rec.lucas = l;
                    rec.ell = e;
                }
            }
            _ => {}
        }
    }
    rec.passed = !dead;
    if rec.passed && spec.confirm_n > spec.n && (spec.lucas || spec.ell.is_some()) {
        let cong: Vec<Filter> = filters
            .iter()
            .copied()
            .filter(|f| *f != Filter::Holonomic)
            .collect();
        let (l, e) = congruence_verdicts(spec, lambda, mu, spec.confirm_n, &cong)?;
        let ok = l.is_none_or(|v| v.passed()) && e.is_none_or(|v| v.passed());
        rec.confirmed = Some(ok);
    }
    Ok(rec)
}

/// Verdicts for every pair in sweep order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>, SearchError> {
    spec.validate()?;
    let pairs = spec.pairs();
    pairs
        .par_iter()
        .map(|&(l, m)| test_pair(spec, l, m))
        .collect()
}

/// Pairs whose records already appear in a JSON-lines stream.
pub fn completed_pairs(reader: impl BufRead) -> Result<HashSet<(i64, i64)>, SearchError> {
    let mut done = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SweepRecord = serde_json::from_str(&line).map_err(|e| SearchError::BadRecord {
            line: i + 1,
            message: e.to_string(),
        })?;
        done.insert((rec.lambda, rec.mu));
    }
    Ok(done)
}

/// Streams one JSON line per pair not in `skip`, in sweep order, working
/// through the pairs in parallel chunks. Returns the records written.
pub fn sweep_to_writer(
    spec: &SweepSpec,
    out: &mut impl Write,
    skip: &HashSet<(i64, i64)>,
) -> Result<Vec<SweepRecord>, SearchError> {
    spec.validate()?;
    let todo: Vec<(i64, i64)> = spec
        .pairs()
        .into_iter()
        .filter(|p| !skip.contains(p))
        .collect();
    let chunk = rayon::current_num_threads().max(1) * 4;
    let mut written = Vec::with_capacity(todo.len());
    for block in todo.chunks(chunk) {
        let recs: Vec<SweepRecord> = block
            .par_iter()
            .map(|&(l, m)| test_pair(spec, l, m))
            .collect::<Result<_, _>>()?;
        for r in recs {
            writeln!(out, "{}", serde_json::to_string(&r).expect("json"))?;
            written.push(r);
        }
        out.flush()?;
    }
    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyClass {
    Level7,
    Level3,
    /// `2ⁿ C(2n, n)`.
    Algebraic,
    Level3Weight4,
    Level1Weight8,
    NonholonomicSuspect,
    /// Variant shape: `(α+1)ⁿ C(2n, n)` at `(−α−2, α)`.
    ScaledCentralBinomial,
    /// Variant shape at `(0, 4)`: `C(2n, n)²`.
    CentralBinomialSquared,
    /// Variant shape at `(−8, 16)`.
    Level2,
    Unknown,
}

impl FamilyClass {
    pub fn name(self) -> &'static str {
        match self {
            FamilyClass::Level7 => "level-7",
            FamilyClass::Level3 => "level-3",
            FamilyClass::Algebraic => "algebraic",
            FamilyClass::Level3Weight4 => "level-3-weight-4",
            FamilyClass::Level1Weight8 => "level-1-weight-8",
            FamilyClass::NonholonomicSuspect => "nonholonomic-suspect",
            FamilyClass::ScaledCentralBinomial => "scaled-central-binomial",
            FamilyClass::CentralBinomialSquared => "central-binomial-squared",
            FamilyClass::Level2 => "level-2",
            FamilyClass::Unknown => "unknown",
        }
    }
}

impl std::fmt::Display for FamilyClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Known families for the `alg0` shape.
pub fn classify_family(lambda: i64, mu: i64) -> FamilyClass {
    match (lambda, mu) {
        (2, 4) => FamilyClass::Level7,
        (-2, 4) => FamilyClass::Level3,
        (-1, 1) => FamilyClass::Algebraic,
        (4, 16) => FamilyClass::Level3Weight4,
        (16, 256) => FamilyClass::Level1Weight8,
        (l, m) if m != 0 && m % 2 == 0 && l == -2 * m => FamilyClass::NonholonomicSuspect,
        _ => FamilyClass::Unknown,
    }
}

pub fn classify(shape: Shape, lambda: i64, mu: i64) -> FamilyClass {
    match shape {
        Shape::Alg0 => classify_family(lambda, mu),
        Shape::Variant => match (lambda, mu) {
            (0, 4) => FamilyClass::CentralBinomialSquared,
            (-8, 16) => FamilyClass::Level2,
            (l, m) if l == -m - 2 => FamilyClass::ScaledCentralBinomial,
            _ => FamilyClass::Unknown,
        },
    }
}
