use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::series::{Limit, SeriesTarget};
use super::{AgmError, PrecisionReal};
use crate::powerseries::{IntPoly, RationalFunction};

const GUARD: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Quadratic scheme on the level 7 function `f_7`.
    QuadraticF7,
    /// Quintic scheme on `Σ C(2n,n)^3 x^n`.
    QuinticF4,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::QuadraticF7 => 2,
            Scheme::QuinticF4 => 5,
        }
    }
}

impl FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quadratic" | "quadratic-f7" => Ok(Scheme::QuadraticF7),
            "quintic" | "quintic-f4" => Ok(Scheme::QuinticF4),
            _ => Err(format!("unknown scheme {s}; expected quadratic or quintic")),
        }
    }
}

/// Named initial data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    /// `a_0 = 4/125`, `b_0 = 21/125`, `x_0 = 1/125`.
    Ic,
    N21a,
    N21,
    Bauer,
    N3,
    N7,
}

impl Init {
    pub const ALL: [Init; 6] = [
        Init::Ic,
        Init::N21a,
        Init::N21,
        Init::Bauer,
        Init::N3,
        Init::N7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Init::Ic => "ic",
            Init::N21a => "n21a",
            Init::N21 => "n21",
            Init::Bauer => "bauer",
            Init::N3 => "n3",
            Init::N7 => "n7",
        }
    }

    pub fn scheme(self) -> Scheme {
        match self {
            Init::Ic | Init::N21a | Init::N21 => Scheme::QuadraticF7,
            _ => Scheme::QuinticF4,
        }
    }

    /// The initial data as a series whose sum the iteration converges to.
    pub fn target(self, prec: u32) -> SeriesTarget {
        match self {
            Init::Ic => SeriesTarget::eq_n(prec),
            Init::N21a => SeriesTarget::n21a(prec),
            Init::N21 => SeriesTarget::n21(prec),
            Init::Bauer => SeriesTarget::bauer(prec),
            Init::N3 => SeriesTarget::table6_n3(prec),
            Init::N7 => SeriesTarget::table6_n7(prec),
        }
    }

    /// Limit as stated alongside the iteration. For `ic` this is `1/(2π)`,
    /// while the series the data come from sums to `1/(8π)`.
    pub fn stated_limit(self) -> Limit {
        match self {
            Init::Ic => Limit::OneOverTwoPi,
            other => other.target(super::MIN_PREC).limit,
        }
    }
}

impl FromStr for Init {
    type Err = AgmError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Init::ALL
            .into_iter()
            .find(|i| i.name() == s)
            .ok_or_else(|| AgmError::UnknownInit(s.to_string()))
    }
}

/// `z/(1+4z)^3` or `z(1−z)^5/(1+4z)^5`.
pub fn branch_map(scheme: Scheme) -> RationalFunction {
    match scheme {
        Scheme::QuadraticF7 => {
            RationalFunction::new(IntPoly::x_pow(1), IntPoly::from_i64(&[1, 4]).pow(3))
        }
        Scheme::QuinticF4 => RationalFunction::new(
            &IntPoly::x_pow(1) * &IntPoly::from_i64(&[1, -1]).pow(5),
            IntPoly::from_i64(&[1, 4]).pow(5),
        ),
    }
    .expect("nonzero denominator")
}

fn eval_poly(p: &IntPoly, z: &PrecisionReal) -> PrecisionReal {
    let mut acc = PrecisionReal::zero(z.prec());
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * z) + &PrecisionReal::from_bigint(c, z.prec());
    }
    acc
}

/// `None` at a pole.
pub fn eval_rational_at(r: &RationalFunction, z: &PrecisionReal) -> Option<PrecisionReal> {
    let d = eval_poly(r.denominator(), z);
    (!d.is_zero()).then(|| &eval_poly(r.numerator(), z) / &d)
}

#[derive(Debug, Clone)]
pub struct BranchRoot {
    pub z: PrecisionReal,
    pub residual: PrecisionReal,
    /// Interval around 0 in which the root was shown to be the only one.
    pub bracket: (PrecisionReal, PrecisionReal),
    pub newton_steps: usize,
}

/// Solves `φ(z) = x` for the root nearest 0, by Newton from the small-`z`
/// guess, then certifies it by sign changes on a bracket around 0.
pub fn solve_branch_root(
    phi: &RationalFunction,
    x: &PrecisionReal,
    prec: u32,
) -> Result<BranchRoot, AgmError> {
    let num = phi.numerator();
    let v = phi
        .valuation()
        .filter(|&v| v >= 1 && v % 2 == 1)
        .ok_or_else(|| AgmError::InvalidMap(format!("{phi:?}")))?;
    let v = v as u32;
    let wp = prec + GUARD;
    let x = x.with_prec(wp);
    if x.is_zero() {
        let z = PrecisionReal::zero(wp);
        return Ok(BranchRoot {
            residual: z.clone(),
            bracket: (z.clone(), z.clone()),
            z,
            newton_steps: 0,
        });
    }
    let lead = PrecisionReal::from_bigint(&num.coeff(v as usize), wp)
        / PrecisionReal::from_bigint(&phi.denominator().coeff(0), wp);
    let scaled = &x / &lead;
    let mut z = if v == 1 {
        scaled.clone()
    } else {
        scaled.odd_root(v)?
    };
    let dphi = phi.derivative();
    let tol_exp = -(prec as i64) - 8;
    let max_steps = 64 + 2 * (prec as f64).log2() as usize;
    let mut steps = 0;
    loop {
        let f = &eval_rational_at(phi, &z).ok_or(AgmError::NoConvergence { steps })? - &x;
        let d = eval_rational_at(&dphi, &z).ok_or(AgmError::NoConvergence { steps })?;
        if d.is_zero() {
            return Err(AgmError::NoConvergence { steps });
        }
        let dz = &f / &d;
        z = &z - &dz;
        steps += 1;
        let small =
            dz.is_zero() || dz.magnitude_exp().unwrap() - z.magnitude_exp().unwrap_or(0) < tol_exp;
        if small {
            break;
        }
        if steps >= max_steps {
            return Err(AgmError::NoConvergence { steps });
        }
    }
    let residual =
        (&eval_rational_at(phi, &z).ok_or(AgmError::NoConvergence { steps })? - &x).abs();
    if !residual.is_zero()
        && residual.magnitude_exp().unwrap() - x.magnitude_exp().unwrap() > -(prec as i64) + 32
    {
        return Err(AgmError::NoConvergence { steps });
    }
    let h = scaled.abs().root(v)?.mul_i64(2);
    certify(phi, &x, &z, &h)?;
    Ok(BranchRoot {
        z: z.with_prec(prec),
        residual,
        bracket: (-&h, h),
        newton_steps: steps,
    })
}

fn certify(
    phi: &RationalFunction,
    x: &PrecisionReal,
    z: &PrecisionReal,
    h: &PrecisionReal,
) -> Result<(), AgmError> {
    const GRID: i64 = 64;
    if z.abs() >= *h {
        return Err(AgmError::AmbiguousBranch(format!(
            "root {} outside bracket ±{}",
            z.to_sci(8),
            h.to_sci(8)
        )));
    }
    let p = 128;
    let (x, h) = (x.with_prec(p), h.with_prec(p));
    let mut signs = Vec::with_capacity(GRID as usize + 1);
    for i in 0..=GRID {
        let t = &h.mul_i64(2 * i - GRID).div_i64(GRID);
        let val = eval_rational_at(phi, t)
            .ok_or_else(|| AgmError::AmbiguousBranch(format!("pole at {}", t.to_sci(8))))?;
        signs.push((&val - &x).signum());
    }
    let changes = signs
        .windows(2)
        .filter(|w| w[0] * w[1] < 0 || w[1] == 0)
        .count();
    if changes != 1 || signs[0] * signs[GRID as usize] >= 0 {
        return Err(AgmError::AmbiguousBranch(format!(
            "{changes} sign changes on ±{}",
            h.to_sci(8)
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationState {
    pub k: usize,
    #[serde(serialize_with = "ser_real")]
    pub a: PrecisionReal,
    #[serde(serialize_with = "ser_real")]
    pub b: PrecisionReal,
    #[serde(serialize_with = "ser_real")]
    pub x: PrecisionReal,
    #[serde(serialize_with = "ser_real")]
    pub z: PrecisionReal,
}

fn ser_real<S: serde::Serializer>(v: &PrecisionReal, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_sci(30))
}

#[derive(Debug, Clone)]
pub struct IterationRun {
    pub scheme: Scheme,
    pub prec: u32,
    pub states: Vec<IterationState>,
    pub step_times: Vec<Duration>,
    /// First step at which `a_k` stopped moving at working precision; later
    /// steps still update `b_k` and `x_k`.
    pub exhausted_at: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub k: usize,
    pub digits_correct: Option<f64>,
    pub a_k: String,
    pub error: Option<String>,
    pub elapsed_ms: f64,
}

impl IterationRun {
    pub fn last(&self) -> &IterationState {
        self.states.last().expect("at least the initial state")
    }

    pub fn errors(&self, xi: &PrecisionReal) -> Vec<PrecisionReal> {
        self.states.iter().map(|s| (&s.a - xi).abs()).collect()
    }

    /// Correct decimal digits of each `a_k`, capped at the working precision.
    pub fn digits(&self, xi: &PrecisionReal) -> Vec<f64> {
        let cap = self.prec as f64 * std::f64::consts::LOG10_2;
        self.states
            .iter()
            .map(|s| s.a.digits_against(xi).min(cap))
            .collect()
    }

    /// `log10 C_k` with `|ξ − a_{k+1}| = C_k |ξ − a_k|^m`.
    pub fn log10_rate_constants(&self, xi: &PrecisionReal) -> Vec<f64> {
        let m = self.scheme.order() as f64;
        let e: Vec<f64> = self
            .errors(xi)
            .iter()
            .map(PrecisionReal::log10_abs)
            .collect();
        let floor = -(self.prec as f64) * std::f64::consts::LOG10_2 + 3.0;
        e.windows(2)
            .take_while(|w| w[1] > floor)
            .map(|w| w[1] - m * w[0])
            .collect()
    }

    pub fn step_records(&self, xi: Option<&PrecisionReal>, decimals: u32) -> Vec<StepRecord> {
        let digits = xi.map(|x| self.digits(x));
        self.states
            .iter()
            .enumerate()
            .map(|(i, s)| StepRecord {
                k: s.k,
                digits_correct: digits.as_ref().map(|d| (d[i] * 10.0).floor() / 10.0),
                a_k: s.a.to_decimal(decimals),
                error: xi.map(|x| (&s.a - x).abs().to_sci(4)),
                elapsed_ms: self
                    .step_times
                    .get(i)
                    .map_or(0.0, |d| d.as_secs_f64() * 1000.0),
            })
            .collect()
    }
}

fn converged(prev: &PrecisionReal, next: &PrecisionReal, prec: u32) -> bool {
    let d = (next - prev).abs();
    d.is_zero() || d.magnitude_exp().unwrap() - prev.magnitude_exp().unwrap_or(0) < -(prec as i64)
}

/// Quadratic iteration; `z0` defaults to the branch root of `z/(1+4z)^3 = x_0`.
pub fn run_quadratic(
    a0: &PrecisionReal,
    b0: &PrecisionReal,
    x0: &PrecisionReal,
    z0: Option<&PrecisionReal>,
    iters: usize,
    prec: u32,
) -> Result<IterationRun, AgmError> {
    let wp = prec + GUARD;
    let t0 = Instant::now();
    let z0 = match z0 {
        Some(z) => z.with_prec(wp),
        None => solve_branch_root(&branch_map(Scheme::QuadraticF7), x0, wp)?.z,
    };
    let one = PrecisionReal::one(wp);
    let mut st = IterationState {
        k: 0,
        a: a0.with_prec(wp),
        b: b0.with_prec(wp),
        x: x0.with_prec(wp),
        z: z0,
    };
    let mut run = IterationRun {
        scheme: Scheme::QuadraticF7,
        prec,
        states: vec![],
        step_times: vec![t0.elapsed()],
        exhausted_at: None,
    };
    for k in 0..iters {
        let t = Instant::now();
        let z = &st.z;
        let p4 = &one + &z.mul_i64(4);
        let p2 = &one + &z.mul_i64(2);
        let m8 = &one - &z.mul_i64(8);
        let p4_2 = &p4 * &p4;
        let p2_2 = &p2 * &p2;
        let p2_3 = &p2_2 * &p2;
        let a =
            &(&st.a * &(&p4_2 / &p2_2)) + &(&st.b * &(&(&z.mul_i64(4) * &p4_2) / &(&p2_3 * &m8)));
        let b = &st.b.mul_i64(2) * &(&(&(&p4_2 * &p4) * &(&one - z)) / &(&p2_3 * &m8));
        let root = (&one + &z.mul_i64(8)).sqrt()?;
        let zn = &(z * z).mul_i64(2) / &(&(&one + &z.mul_i64(6)) + &(&p2 * &root));
        let pn = &one + &zn.mul_i64(4);
        let xn = &zn / &(&(&pn * &pn) * &pn);
        let done = converged(&st.a, &a, prec);
        let next = IterationState {
            k: k + 1,
            a,
            b,
            x: xn,
            z: zn,
        };
        run.states.push(std::mem::replace(&mut st, next));
        run.step_times.push(t.elapsed());
        if done && run.exhausted_at.is_none() {
            run.exhausted_at = Some(k + 1);
        }
    }
    run.states.push(st);
    Ok(run)
}

/// Quintic iteration with a certified branch solve at every step.
pub fn run_quintic(
    a0: &PrecisionReal,
    b0: &PrecisionReal,
    x0: &PrecisionReal,
    iters: usize,
    prec: u32,
) -> Result<IterationRun, AgmError> {
    let wp = prec + GUARD;
    let phi = branch_map(Scheme::QuinticF4);
    let one = PrecisionReal::one(wp);
    let t0 = Instant::now();
    let z0 = solve_branch_root(&phi, x0, wp)?.z;
    let mut st = IterationState {
        k: 0,
        a: a0.with_prec(wp),
        b: b0.with_prec(wp),
        x: x0.with_prec(wp),
        z: z0,
    };
    let mut run = IterationRun {
        scheme: Scheme::QuinticF4,
        prec,
        states: vec![],
        step_times: vec![t0.elapsed()],
        exhausted_at: None,
    };
    for k in 0..iters {
        let t = Instant::now();
        let z = &st.z;
        let p4 = &one + &z.mul_i64(4);
        let p4_2 = &p4 * &p4;
        let z2 = z * z;
        let q = &(&one - &z.mul_i64(22)) - &z2.mul_i64(4);
        let a = &(&st.a * &p4_2) + &(&st.b.mul_i64(8) * &(&(&(z * &(&one - z)) * &p4_2) / &q));
        let b = &st.b.mul_i64(5) * &(&(&p4_2 * &(&(&one + &z.mul_i64(2)) - &z2.mul_i64(4))) / &q);
        let xn = &(&z.pow(5) * &(&one - z)) / &p4;
        let zn = solve_branch_root(&phi, &xn, wp)?.z;
        let done = converged(&st.a, &a, prec);
        let next = IterationState {
            k: k + 1,
            a,
            b,
            x: xn,
            z: zn,
        };
        run.states.push(std::mem::replace(&mut st, next));
        run.step_times.push(t.elapsed());
        if done && run.exhausted_at.is_none() {
            run.exhausted_at = Some(k + 1);
        }
    }
    run.states.push(st);
    Ok(run)
}

/// Runs the scheme belonging to the named initial data.
pub fn run_init(init: Init, iters: usize, prec: u32) -> Result<IterationRun, AgmError> {
    let wp = prec + GUARD;
    let t = init.target(wp);
    match init.scheme() {
        Scheme::QuadraticF7 => run_quadratic(&t.a, &t.b, &t.x, None, iters, prec),
        Scheme::QuinticF4 => run_quintic(&t.a, &t.b, &t.x, iters, prec),
    }
}

/// Largest relative deviation between `b_k / b_0` and
/// `m^k √(D(x_k) / D(x_0))`, with `D = 1 − 26x − 27x²` (quadratic) or
/// `1 − 64x` (quintic).
pub fn b_ratio_check(run: &IterationRun) -> Result<PrecisionReal, AgmError> {
    let s0 = &run.states[0];
    if s0.b.is_zero() {
        return Err(AgmError::ZeroB);
    }
    let wp = s0.b.prec();
    let one = PrecisionReal::one(wp);
    let d = |x: &PrecisionReal| match run.scheme {
        Scheme::QuadraticF7 => &(&one - &x.mul_i64(26)) - &(x * x).mul_i64(27),
        Scheme::QuinticF4 => &one - &x.mul_i64(64),
    };
    let d0 = d(&s0.x);
    let mut worst = PrecisionReal::zero(wp);
    for s in &run.states {
        let lhs = &s.b / &s0.b;
        let rhs = PrecisionReal::from_int(run.scheme.order() as i64, wp).pow(s.k as u32)
            * (&d(&s.x) / &d0).sqrt()?;
        let dev = (&(&lhs - &rhs) / &rhs).abs();
        if dev > worst {
            worst = dev;
        }
    }
    Ok(worst)
}

/// `π` from the quadratic iteration on the `ic` data, whose limit is
/// `1/(8π)`.
pub fn pi_reference(prec: u32) -> Result<PrecisionReal, AgmError> {
    let steps = ((prec as f64 / 6.0).log2().ceil() as usize).max(1) + 3;
    let run = run_init(Init::Ic, steps, prec + 16)?;
    let xi = &run.last().a;
    Ok((&PrecisionReal::one(prec + 16) / &xi.mul_i64(8)).with_prec(prec))
}

/// Certified digits available at `prec` bits.
pub fn check_digits(requested: u32, prec: u32) -> Result<(), AgmError> {
    let usable = super::digits_for_bits(prec.saturating_sub(16));
    if requested > usable {
        return Err(AgmError::PrecisionExhausted {
            requested,
            available: prec,
            usable,
        });
    }
    Ok(())
}
