//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion.
//!
//! Criteria listed in `KNOWN_RED` are implemented faithfully and reported as
//! failing; they do not change the exit status. Any other failure exits 1.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use selfrep_core::agm::{
    b_ratio_check, bits_for_digits, branch_map, eval_series, run_init, run_quintic,
    solve_branch_root, Init, Limit, PrecisionReal, Scheme, SeriesTarget,
};
use selfrep_core::congruences::{check_family, Grid, LucasVerdict, SuperVerdict};
use selfrep_core::holonomic::{guess_integers, GuessOutcome, RecurrenceGuess};
use selfrep_core::legendre::{bailey_brafman_check, leg_identity_check};
use selfrep_core::modular::{parametrization_check, LEVELS};
use selfrep_core::search::{sweep, Constraint, SweepSpec};
use selfrep_core::selfrep::{registry, solve, verify};
use selfrep_core::sequences::{
    c_lambda_mu, convolution_split, family_terms, family_terms_by, Shape, Split,
};
use selfrep_core::{Family, TruncatedSeries};

const KNOWN_RED: &[u32] = &[2, 5];

type Check = Result<String, String>;

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(id: u32, name: &'static str, budget: Option<Duration>, f: impl FnOnce() -> Check) -> Line {
    let t0 = Instant::now();
    let r = f();
    let elapsed = t0.elapsed();
    let (mut pass, mut detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(b) = budget {
        if elapsed > b {
            pass = false;
            detail = format!("{detail}; over budget {:.0}s", b.as_secs_f64());
        }
    }
    Line {
        id,
        name,
        pass,
        detail,
        elapsed,
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `arctan(1/k) · 2^bits` in fixed point.
fn arctan_inv(k: u64, bits: usize) -> BigInt {
    let one = BigInt::from(1) << bits;
    let k2 = BigInt::from(k * k);
    let mut pw = &one / BigInt::from(k);
    let mut sum = BigInt::zero();
    let mut n = 0u64;
    while !pw.is_zero() {
        let t = &pw / BigInt::from(2 * n + 1);
        if n.is_multiple_of(2) {
            sum += t;
        } else {
            sum -= t;
        }
        pw /= &k2;
        n += 1;
    }
    sum
}

fn machin_pi(prec: u32) -> PrecisionReal {
    let bits = prec as usize + 64;
    let v = arctan_inv(5, bits) * 16 - arctan_inv(239, bits) * 4;
    PrecisionReal::new(v, -(bits as i64), prec)
}

fn c1_u7_routes() -> Check {
    let n = 200;
    let reference = family_terms(Family::U7, n).map_err(|e| e.to_string())?;
    let mut names = vec![];
    for &route in Family::U7.routes() {
        let t = family_terms_by(Family::U7, route, n).map_err(|e| e.to_string())?;
        if let Some(i) = (0..=n).find(|&i| t[i] != reference[i]) {
            return Err(format!("route {} differs at n = {i}", route.name()));
        }
        names.push(route.name());
    }
    let eq = registry()
        .into_iter()
        .find(|e| e.family == Family::U7)
        .ok_or("no u7 equation")?;
    let f = solve(&eq.equation, n + 1).map_err(|e| e.to_string())?;
    let ints = f.to_integers().ok_or("solved series not integral")?;
    ensure(
        ints[..=n] == reference[..=n],
        "functional-equation solution differs",
    )?;
    Ok(format!(
        "routes {} and {} agree for n <= {n}",
        names.join(", "),
        eq.id
    ))
}

fn c2_lambda_squared() -> Check {
    let mut failures = vec![];
    let mut spec = SweepSpec::new(Shape::Alg0, [-20, 20], [-400, 400]);
    spec.constraint = Constraint::Lambda2EqMu;
    spec.ell = Some(1);
    spec.n = 400;
    spec.confirm_n = 0;
    let recs = sweep(&spec).map_err(|e| e.to_string())?;
    let passing: BTreeSet<i64> = recs
        .iter()
        .filter(|r| r.survives())
        .map(|r| r.lambda)
        .collect();
    let want: BTreeSet<i64> = [-2, -1, 2, 4, 16].into_iter().collect();
    if passing != want {
        failures.push(format!("lambda^2 = mu survivors {passing:?}"));
    }

    let grid = Grid::new(50, 400);
    for alpha in 1..=3i64 {
        let fam = Family::C {
            lambda: -4 * alpha,
            mu: 2 * alpha,
        };
        let rep = check_family(fam, &grid).map_err(|e| e.to_string())?;
        if !rep.passes_ell(1) {
            failures.push(format!("alpha = {alpha} fails l = 1"));
        }
        match rep.lucas_for(5) {
            Some(LucasVerdict::Counterexample { .. }) => {}
            _ => failures.push(format!("alpha = {alpha} satisfies Lucas at p = 5")),
        }
    }

    let c = c_lambda_mu(-4, 2, 6);
    if c[..6] != big(&[1, 12, 168, 2496, 38328, 600672])[..] {
        failures.push(format!("c(-4,2) prefix {:?}", &c[..6]));
    }
    match convolution_split(&c) {
        Split::Split(d) if d == big(&[1, 6, 66, 852, 11874, 172860, 2586108]) => {}
        other => failures.push(format!("split {other:?}")),
    }
    if failures.is_empty() {
        Ok(format!(
            "survivors {passing:?}; (-4a,2a) pass l = 1, fail Lucas at 5; split ok"
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn c3_variant() -> Check {
    let mut spec = SweepSpec::new(Shape::Variant, [-8, 8], [-8, 8]);
    spec.ell = Some(3);
    spec.n = 400;
    spec.confirm_n = 0;
    let recs = sweep(&spec).map_err(|e| e.to_string())?;
    let got: BTreeSet<(i64, i64)> = recs
        .iter()
        .filter(|r| r.survives())
        .map(|r| (r.lambda, r.mu))
        .collect();
    let want: BTreeSet<(i64, i64)> = [(-2, 0), (0, -2), (0, 4)].into_iter().collect();
    ensure(got == want, format!("l = 3 survivors {got:?}"))?;
    let rep = check_family(Family::CVar { lambda: -8, mu: 16 }, &Grid::default())
        .map_err(|e| e.to_string())?;
    ensure(rep.passes_ell(2), "variant (-8,16) fails l = 2")?;
    Ok(format!(
        "l = 3 survivors {got:?}; (-8,16) passes l = 2 on {}",
        rep.grid_description
    ))
}

fn c4_quintic_table() -> Check {
    let prec = 1024;
    let pi = machin_pi(prec + 64);
    let xi = Limit::OneOverTwoPi.value(&pi).unwrap();
    let run = run_init(Init::Bauer, 3, prec).map_err(|e| e.to_string())?;
    let want: [f64; 4] = [9.08e-2, 6.65e-9, 8.25e-47, 4.57e-239];
    let errs = run.errors(&xi);
    for (k, w) in want.iter().enumerate() {
        let got = errs[k].log10_abs();
        let rel = 10f64.powf(got - w.log10()) - 1.0;
        ensure(
            rel.abs() < 0.01,
            format!("step {k}: error 10^{got:.4} vs {w:e}"),
        )?;
    }
    Ok(format!(
        "errors {}",
        errs[..4]
            .iter()
            .map(|e| e.to_sci(3))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn c5_quadratic() -> Check {
    let prec = 4096;
    let pi = machin_pi(prec + 64);
    let run = run_init(Init::Ic, 12, prec).map_err(|e| e.to_string())?;
    let stated = run.digits(&Limit::OneOverTwoPi.value(&pi).unwrap());
    let eighth = run.digits(&Limit::OneOverEightPi.value(&pi).unwrap());
    let best = stated.iter().cloned().fold(0.0, f64::max);
    let sub = eighth.iter().position(|&d| d >= 1000.0);
    let doubling = eighth
        .windows(2)
        .skip(2)
        .take_while(|w| w[1] < 1200.0)
        .all(|w| w[1] >= 2.0 * w[0] - 3.0);
    let note = format!(
        "against 1/(8pi): 1000 digits at step {}, doubling {}",
        sub.map_or("never".to_string(), |k| k.to_string()),
        if doubling { "yes" } else { "no" }
    );
    if best >= 1000.0 {
        Ok(format!("{best:.0} digits of 1/(2pi); {note}"))
    } else {
        Err(format!(
            "best agreement with 1/(2pi) is {best:.1} digits; {note}"
        ))
    }
}

fn c6_series() -> Check {
    let prec = bits_for_digits(120);
    let pi = machin_pi(prec + 64);
    let v = eval_series(&SeriesTarget::eq_n(prec), 101).map_err(|e| e.to_string())?;
    let err = (&v.value - &Limit::OneOverEightPi.value(&pi).unwrap()).abs();
    ensure(
        err.log10_abs() < -100.0 && v.terms <= 200,
        format!("eq-n error {} after {} terms", err.to_sci(3), v.terms),
    )?;
    let mut out = vec![format!("eq-n {} terms, error {}", v.terms, err.to_sci(2))];
    for (t, limit) in [
        (SeriesTarget::bauer(prec), Limit::OneOverTwoPi),
        (SeriesTarget::table6_n3(prec), Limit::TwoOverThreePi),
        (SeriesTarget::table6_n7(prec), Limit::EightOverTwentyOnePi),
    ] {
        let s = eval_series(&t, 55).map_err(|e| e.to_string())?;
        let d = s.value.digits_against(&limit.value(&pi).unwrap());
        ensure(d >= 50.0, format!("{} only {d:.1} digits", t.name))?;
        out.push(format!("{} {d:.0}", t.name));
    }
    let s = eval_series(&SeriesTarget::n21a(prec), 55).map_err(|e| e.to_string())?;
    let it = run_init(Init::N21a, 8, prec).map_err(|e| e.to_string())?;
    let d = it.last().a.digits_against(&s.value);
    ensure(d >= 50.0, format!("n21a series vs iteration {d:.1} digits"))?;
    out.push(format!("n21a series/iteration {d:.0}"));
    Ok(out.join("; "))
}

fn c7_b_ratios() -> Check {
    let prec = 1024;
    let bound = PrecisionReal::new(BigInt::from(1), 64 - prec as i64, prec);
    let mut out = vec![];
    let quad = run_init(Init::Ic, 6, prec).map_err(|e| e.to_string())?;
    let t = SeriesTarget::bauer(prec + 32);
    let root = solve_branch_root(&branch_map(Scheme::QuinticF4), &t.x, prec + 32)
        .map_err(|e| e.to_string())?;
    ensure(root.z.is_negative(), "quintic branch root has wrong sign")?;
    let quin = run_quintic(&t.a, &t.b, &t.x, 6, prec).map_err(|e| e.to_string())?;
    for run in [&quad, &quin] {
        ensure(
            run.states.len() == 7,
            format!("{:?}: {} states", run.scheme, run.states.len()),
        )?;
        let dev = b_ratio_check(run).map_err(|e| e.to_string())?;
        ensure(
            dev < bound,
            format!("{:?}: deviation {}", run.scheme, dev.to_sci(3)),
        )?;
        out.push(format!("{:?} max deviation {}", run.scheme, dev.to_sci(2)));
    }
    Ok(out.join("; "))
}

fn c8_registry_and_modular() -> Check {
    let reg = registry();
    ensure(reg.len() == 14, format!("{} registry entries", reg.len()))?;
    for e in &reg {
        let terms = family_terms(e.family, 50).map_err(|x| x.to_string())?;
        let f = TruncatedSeries::from_integers(&terms, 51);
        let ord = verify(&e.equation, &f, 50).map_err(|x| x.to_string())?;
        ensure(ord >= 50, format!("{} agrees only to order {ord}", e.id))?;
    }
    for &level in LEVELS.iter() {
        let ord = parametrization_check(level, 40).map_err(|x| x.to_string())?;
        ensure(
            ord >= 40,
            format!("level {level} parametrization agrees to order {ord}"),
        )?;
    }
    Ok(format!(
        "{} equations to order 50; levels {:?} to order 40",
        reg.len(),
        LEVELS
    ))
}

fn c9_congruences() -> Check {
    let small = Grid::new(20, 2000);
    let fams = [
        Family::U7,
        Family::C { lambda: -2, mu: 4 },
        Family::C { lambda: 4, mu: 16 },
        Family::C {
            lambda: 16,
            mu: 256,
        },
        Family::Gb,
        Family::Gc,
        Family::G5,
    ];
    for fam in fams {
        let rep = check_family(fam, &small).map_err(|e| e.to_string())?;
        ensure(rep.lucas_passes(), format!("{fam} fails Lucas"))?;
    }
    let rep = check_family(Family::C { lambda: -1, mu: 1 }, &Grid::default())
        .map_err(|e| e.to_string())?;
    ensure(!rep.passes_ell(2), "c(-1,1) passes l = 2")?;
    let cx = rep
        .results
        .iter()
        .filter(|r| r.p >= 5 && r.max_ell < 2)
        .find_map(|r| match &r.super_failure {
            Some(SuperVerdict::Counterexample { m, r: rr }) => Some((r.p, *m, *rr)),
            _ => None,
        })
        .ok_or("no concrete counterexample for c(-1,1)")?;
    let rep = check_family(Family::C { lambda: 4, mu: 16 }, &Grid::default())
        .map_err(|e| e.to_string())?;
    ensure(rep.passes_ell(3), "c(4,16) fails l = 3")?;
    Ok(format!(
        "Lucas holds for 7 families on p <= 20; c(-1,1) fails l = 2 at (p, m, r) = {cx:?}; c(4,16) passes l = 3"
    ))
}

fn c10_holonomic() -> Check {
    let u = family_terms(Family::U7, 59).map_err(|e| e.to_string())?;
    let g = guess_integers(&u, 3, 4).map_err(|e| e.to_string())?;
    let rec = g.found().ok_or("no recurrence for u7")?;
    ensure(
        rec.order == 2 && rec.degree == 3 && rec.proportional_to(&RecurrenceGuess::u7()),
        format!("u7 guess {rec}"),
    )?;
    let c = c_lambda_mu(-4, 2, 249);
    let outcome = guess_integers(&c, 6, 8).map_err(|e| e.to_string())?;
    match outcome {
        GuessOutcome::None(env) => Ok(format!(
            "u7: order 2 degree 3; c(-4,2): none within r <= {}, d <= {} from {} terms",
            env.r_max, env.d_max, env.terms
        )),
        GuessOutcome::Found(r) => Err(format!("c(-4,2) recurrence claimed: {r}")),
    }
}

fn c11_legendre() -> Check {
    let deg = 16;
    let bb = bailey_brafman_check(deg);
    ensure(bb >= deg, format!("Bailey-Brafman agrees to degree {bb}"))?;
    let leg = leg_identity_check(deg);
    ensure(
        leg >= deg,
        format!("two-variable identity agrees to degree {leg}"),
    )?;
    Ok(format!("both identities hold through total degree {deg}"))
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let lines = vec![
        run(1, "u7 routes agree for n <= 200", secs(10), c1_u7_routes),
        run(
            2,
            "lambda^2 = mu sweep and (-4a,2a) family",
            None,
            c2_lambda_squared,
        ),
        run(3, "variant sweep at l = 3", None, c3_variant),
        run(4, "quintic error table", secs(5), c4_quintic_table),
        run(
            5,
            "quadratic iteration to 1000 digits of 1/(2pi)",
            secs(30),
            c5_quadratic,
        ),
        run(6, "series for 1/pi", None, c6_series),
        run(7, "b-ratio identity", None, c7_b_ratios),
        run(
            8,
            "registry and modular parametrizations",
            secs(60),
            c8_registry_and_modular,
        ),
        run(9, "Lucas and supercongruences", None, c9_congruences),
        run(10, "holonomic guessing", secs(120), c10_holonomic),
        run(
            11,
            "Legendre identities at degree 16",
            secs(60),
            c11_legendre,
        ),
    ];
    let mut unexpected = 0;
    for l in &lines {
        let tag = if l.pass { "PASS" } else { "FAIL" };
        let known = if !l.pass && KNOWN_RED.contains(&l.id) {
            " (known)"
        } else {
            ""
        };
        println!(
            "[{tag}] criterion {:>2}: {}{known} [{:.2}s] {}",
            l.id,
            l.name,
            l.elapsed.as_secs_f64(),
            l.detail
        );
        if !l.pass && !KNOWN_RED.contains(&l.id) {
            unexpected += 1;
        }
    }
    let passed = lines.iter().filter(|l| l.pass).count();
    println!("{passed}/{} criteria pass", lines.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
