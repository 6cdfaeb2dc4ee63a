use std::collections::HashSet;
use std::io::{BufReader, Write};
use std::path::Path;

use num_bigint::BigInt;
use serde_json::{json, Value};

use selfrep_core::agm::{
    bits_for_digits, check_digits, eval_series, pi_reference, run_init, Init, IterationRun, Limit,
    PrecisionReal, Scheme, SeriesTarget,
};
use selfrep_core::congruences::{check_family, CongruenceReport, Grid, LucasVerdict, SuperVerdict};
use selfrep_core::holonomic::{guess_integers, GuessOutcome};
use selfrep_core::legendre::{bailey_brafman_check, leg_identity_check};
use selfrep_core::modular::{p_level, parametrization_check, z_level, LEVELS};
use selfrep_core::search::{
    completed_pairs, sweep, sweep_to_writer, Constraint, Filter, SweepRecord, SweepSpec,
};
use selfrep_core::selfrep::{expected_family, lookup, solve, verify, FunctionalEquation};
use selfrep_core::sequences::{
    export_json, family_terms, family_terms_by, parse_terms, Route, Shape,
};
use selfrep_core::{primes_up_to, Family, TruncatedSeries};

use crate::output::{self, Format, Report};
use crate::{
    AgmArgs, Cli, CliError, Command, CongruenceArgs, GenArgs, GuessArgs, LegendreArgs, ModularArgs,
    SearchArgs, SeriesArgs, Status, VerifyArgs,
};

const PAPER_MAP: &str = include_str!("../../../docs/paper_map.md");

type Outcome = Result<(Report, Status), CliError>;
type Check = (&'static str, fn(usize) -> usize);

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Ok => "pass",
        Status::Failed => "fail",
    }
}

fn status_if(ok: bool) -> Status {
    if ok {
        Status::Ok
    } else {
        Status::Failed
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn parse_pair(s: &str, what: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Usage(format!("{what} must be `a,b`, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn from_name<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_value(Value::String(s.to_string()))
        .map_err(|_| CliError::Usage(format!("unknown {what} `{s}`")))
}

fn parse_family(id: &str) -> Result<Family, CliError> {
    id.parse().map_err(CliError::domain)
}

fn strings(v: &[BigInt]) -> Value {
    export_json(v)
}

fn series_strings(s: &TruncatedSeries) -> Value {
    Value::Array(
        s.coeffs()
            .iter()
            .map(|c| Value::String(c.to_string()))
            .collect(),
    )
}

pub fn dispatch(cli: &Cli) -> Result<Status, CliError> {
    let (name, default, outcome) = match &cli.command {
        Command::Gen(a) => ("gen", Format::Text, gen(a)),
        Command::VerifyFeq(a) => ("verify-feq", Format::Json, verify_feq(a)),
        Command::Congruence(a) => ("congruence", Format::Json, congruence(a)),
        Command::Search(a) => return search(cli, a),
        Command::Guess(a) => ("guess", Format::Json, guess(a)),
        Command::Modular(a) => ("modular", Format::Json, modular(a)),
        Command::Legendre(a) => ("legendre", Format::Json, legendre(a)),
        Command::Agm(a) => ("agm", Format::Jsonl, agm(a)),
        Command::Series(a) => ("series", Format::Json, series(a)),
        Command::PaperMap => ("paper-map", Format::Text, paper_map()),
    };
    let (report, status) = outcome?;
    let format = cli.format.unwrap_or(default);
    let path = output::resolve_path(cli.output.as_deref(), name, format);
    let mut w = output::open(path.as_deref(), false)?;
    w.write_all(report.render(format).as_bytes())
        .map_err(CliError::io)?;
    w.flush().map_err(CliError::io)?;
    Ok(status)
}

fn gen(a: &GenArgs) -> Outcome {
    let family = match (&a.family, &a.c, &a.cvar) {
        (Some(id), _, _) => parse_family(id)?,
        (_, Some(p), _) => {
            let (lambda, mu) = parse_pair(p, "--c")?;
            Family::C { lambda, mu }
        }
        (_, _, Some(p)) => {
            let (lambda, mu) = parse_pair(p, "--cvar")?;
            Family::CVar { lambda, mu }
        }
        _ => {
            return Err(CliError::Usage(
                "one of --family, --c, --cvar is required".into(),
            ))
        }
    };
    let route = match &a.route {
        Some(r) => r.parse::<Route>().map_err(CliError::domain)?,
        None => family.default_route(),
    };
    let terms = family_terms_by(family, route, a.terms).map_err(CliError::domain)?;
    let json = json!({
        "family": family.to_string(),
        "route": route.name(),
        "n_max": a.terms,
        "terms": strings(&terms),
    });
    let rows = terms
        .iter()
        .enumerate()
        .map(|(n, t)| json!({"n": n, "value": t.to_string()}))
        .collect();
    let text = terms
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    Ok((Report::new(json, text).with_rows(rows), Status::Ok))
}

fn verify_feq(a: &VerifyArgs) -> Outcome {
    let (name, eq, family): (String, FunctionalEquation, Option<Family>) =
        match (&a.id, &a.equation) {
            (Some(id), _) => (
                id.clone(),
                lookup(id).map_err(CliError::domain)?,
                expected_family(id),
            ),
            (_, Some(path)) => {
                let eq = FunctionalEquation::from_json(&read(path)?).map_err(CliError::domain)?;
                (eq.name.clone(), eq, None)
            }
            _ => {
                return Err(CliError::Usage(
                    "one of --id, --equation is required".into(),
                ))
            }
        };
    let order = a.order;
    let (source, f) = if let Some(path) = &a.series {
        let t = parse_terms(&read(path)?)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if t.len() < order + 1 {
            return Err(CliError::Usage(format!(
                "series has {} terms; order {order} needs {}",
                t.len(),
                order + 1
            )));
        }
        (
            format!("file:{}", path.display()),
            TruncatedSeries::from_integers(&t, order + 1),
        )
    } else if let Some(fam) = family {
        let t = family_terms(fam, order).map_err(CliError::domain)?;
        (
            format!("family:{fam}"),
            TruncatedSeries::from_integers(&t, order + 1),
        )
    } else {
        (
            "solved".to_string(),
            solve(&eq, order + 1).map_err(CliError::domain)?,
        )
    };
    let verified = verify(&eq, &f, order).map_err(CliError::domain)?.min(order);
    let status = status_if(verified >= order);
    let mut json = json!({
        "equation": name,
        "order": order,
        "source": source,
        "verified": verified,
        "status": status_name(status),
    });
    if status == Status::Failed {
        json["first_failing_index"] = json!(verified + 1);
    }
    let text = match status {
        Status::Ok => format!("{name}: verified through order {order} ({source})"),
        Status::Failed => format!(
            "{name}: sides agree through order {verified}, differ at {} ({source})",
            verified + 1
        ),
    };
    Ok((Report::new(json, text), status))
}

fn prime_row(report: &CongruenceReport, r: &selfrep_core::congruences::PrimeResult) -> Value {
    let (lucas, lucas_n) = match &r.lucas {
        LucasVerdict::Pass => ("pass", Value::Null),
        LucasVerdict::Counterexample { n, .. } => ("fail", json!(n)),
    };
    let (m, rr) = match &r.super_failure {
        Some(SuperVerdict::Counterexample { m, r }) => (json!(m), json!(r)),
        _ => (Value::Null, Value::Null),
    };
    json!({
        "family": report.family.to_string(),
        "p": r.p,
        "lucas": lucas,
        "lucas_counterexample_n": lucas_n,
        "max_ell": r.max_ell,
        "failing_m": m,
        "failing_r": rr,
    })
}

fn congruence(a: &CongruenceArgs) -> Outcome {
    let family = parse_family(&a.family)?;
    let grid = Grid {
        primes: primes_up_to(a.prime_bound),
        n_max: a.terms as usize,
        r_max: a.r_max,
        super_min_prime: a.super_min_prime,
    };
    let report = check_family(family, &grid).map_err(CliError::domain)?;
    let mut ok = true;
    if a.lucas {
        ok &= report.lucas_passes();
    }
    if let Some(l) = a.ell {
        ok &= report.passes_ell(l);
    }
    let status = status_if(ok);
    let mut json = report.to_json();
    json["lucas_passes"] = json!(report.lucas_passes());
    json["grid_ell"] = json!(report.grid_ell());
    json["required_ell"] = json!(a.ell);
    json["status"] = json!(status_name(status));
    let rows: Vec<Value> = report
        .results
        .iter()
        .map(|r| prime_row(&report, r))
        .collect();
    let mut text = format!("{family} on {}\n", report.grid_description);
    for r in &report.results {
        let lucas = match &r.lucas {
            LucasVerdict::Pass => "pass".to_string(),
            LucasVerdict::Counterexample { n, .. } => format!("fails at n = {n}"),
        };
        text.push_str(&format!(
            "p = {:>2}: Lucas {lucas}, max l = {}\n",
            r.p, r.max_ell
        ));
    }
    text.push_str(&format!(
        "grid level l = {}; {}",
        report.grid_ell(),
        status_name(status)
    ));
    Ok((Report::new(json, text).with_rows(rows), status))
}

fn build_spec(a: &SearchArgs) -> Result<SweepSpec, CliError> {
    let mut spec = match &a.spec {
        Some(path) => {
            let text = read(path)?;
            let parsed: Result<SweepSpec, String> = if path.extension().is_some_and(|e| e == "toml")
            {
                toml::from_str(&text).map_err(|e| e.to_string())
            } else {
                serde_json::from_str(&text).map_err(|e| e.to_string())
            };
            parsed.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => SweepSpec::new(Shape::Alg0, [-10, 10], [-10, 10]),
    };
    if let Some(s) = &a.shape {
        spec.shape = from_name(s, "shape")?;
    }
    if let Some(r) = a.range {
        spec.lambda = [-r, r];
        spec.mu = [-r, r];
    }
    if let Some(s) = &a.lambda {
        let (lo, hi) = parse_pair(s, "--lambda")?;
        spec.lambda = [lo, hi];
    }
    if let Some(s) = &a.mu {
        let (lo, hi) = parse_pair(s, "--mu")?;
        spec.mu = [lo, hi];
    }
    if let Some(c) = &a.constraint {
        spec.constraint = from_name::<Constraint>(c, "constraint")?;
    }
    spec.lucas |= a.lucas;
    spec.holonomic_probe |= a.holonomic_probe;
    if a.ell.is_some() {
        spec.ell = a.ell;
    }
    if !spec.lucas && spec.ell.is_none() && !spec.holonomic_probe {
        spec.ell = Some(1);
    }
    if let Some(n) = a.terms {
        spec.n = n;
    }
    if let Some(n) = a.confirm {
        spec.confirm_n = n;
    }
    if let Some(p) = a.prime_bound {
        spec.prime_bound = p;
    }
    if let Some(r) = a.r_max {
        spec.r_max = r;
    }
    if let Some(p) = a.super_min_prime {
        spec.super_min_prime = p;
    }
    if let Some(s) = &a.probe_primes {
        spec.probe_primes = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad prime `{p}`")))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(s) = &a.filter_order {
        spec.filter_order = s
            .split(',')
            .map(|f| from_name::<Filter>(f.trim(), "filter"))
            .collect::<Result<_, _>>()?;
    }
    spec.validate().map_err(CliError::domain)?;
    Ok(spec)
}

fn record_row(r: &SweepRecord) -> Value {
    let v = |t: &Option<selfrep_core::search::TestVerdict>| {
        t.as_ref()
            .map(|t| serde_json::to_value(t).expect("json")["verdict"].clone())
            .unwrap_or(Value::Null)
    };
    json!({
        "lambda": r.lambda,
        "mu": r.mu,
        "lucas": v(&r.lucas),
        "ell": v(&r.ell),
        "holonomic": v(&r.holonomic),
        "passed": r.passed,
        "confirmed": r.confirmed,
        "survives": r.survives(),
        "class": r.class,
    })
}

fn search(cli: &Cli, a: &SearchArgs) -> Result<Status, CliError> {
    let spec = build_spec(a)?;
    let format = cli.format.unwrap_or(Format::Jsonl);
    let path = output::resolve_path(cli.output.as_deref(), "search", format);
    if format == Format::Jsonl {
        let mut skip = HashSet::new();
        if a.resume {
            let p = path
                .as_deref()
                .ok_or_else(|| CliError::Usage("--resume needs an output file".into()))?;
            if p.exists() {
                let f = std::fs::File::open(p).map_err(internal)?;
                skip = completed_pairs(BufReader::new(f)).map_err(CliError::domain)?;
            }
        }
        let mut w = output::open(path.as_deref(), a.resume)?;
        sweep_to_writer(&spec, &mut w, &skip).map_err(|e| match e {
            selfrep_core::search::SearchError::Io(io) => CliError::io(io),
            other => CliError::domain(other),
        })?;
        w.flush().map_err(CliError::io)?;
        return Ok(Status::Ok);
    }
    if a.resume {
        return Err(CliError::Usage(
            "--resume works with jsonl output only".into(),
        ));
    }
    let records = sweep(&spec).map_err(CliError::domain)?;
    let survivors: Vec<&SweepRecord> = records.iter().filter(|r| r.survives()).collect();
    let json = json!({
        "spec": spec,
        "pairs": records.len(),
        "survivors": survivors.iter().map(|r| json!([r.lambda, r.mu])).collect::<Vec<_>>(),
        "records": records,
    });
    let mut text = String::new();
    for r in &survivors {
        text.push_str(&format!("{:>6} {:>8}  {}\n", r.lambda, r.mu, r.class));
    }
    text.push_str(&format!(
        "{} of {} pairs pass",
        survivors.len(),
        records.len()
    ));
    let rows = records.iter().map(record_row).collect();
    let report = Report::new(json, text).with_rows(rows);
    let mut w = output::open(path.as_deref(), false)?;
    w.write_all(report.render(format).as_bytes())
        .map_err(CliError::io)?;
    w.flush().map_err(CliError::io)?;
    Ok(Status::Ok)
}

fn guess(a: &GuessArgs) -> Outcome {
    if a.terms == 0 {
        return Err(CliError::Usage("--terms must be positive".into()));
    }
    let (source, terms) = match (&a.family, &a.input) {
        (Some(id), _) => {
            let fam = parse_family(id)?;
            (
                fam.to_string(),
                family_terms(fam, a.terms - 1).map_err(CliError::domain)?,
            )
        }
        (_, Some(path)) => {
            let mut t = parse_terms(&read(path)?)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            t.truncate(a.terms);
            (format!("file:{}", path.display()), t)
        }
        _ => {
            return Err(CliError::Usage(
                "one of --family, --input is required".into(),
            ))
        }
    };
    let outcome = guess_integers(&terms, a.r_max as usize, a.d_max).map_err(CliError::domain)?;
    let mut json = serde_json::to_value(&outcome).expect("json");
    json["source"] = json!(source);
    json["terms_used"] = json!(terms.len());
    let text = match &outcome {
        GuessOutcome::Found(g) => {
            json["display"] = json!(g.to_string());
            format!("{source}: {g}")
        }
        GuessOutcome::None(env) => format!(
            "{source}: no recurrence with order <= {}, degree <= {} from {} terms",
            env.r_max, env.d_max, env.terms
        ),
    };
    Ok((Report::new(json, text), Status::Ok))
}

fn modular(a: &ModularArgs) -> Outcome {
    let order = a.order as usize;
    let levels: Vec<u32> = match a.level {
        Some(l) => vec![l],
        None => LEVELS.to_vec(),
    };
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut all = true;
    for level in levels {
        let z = z_level(level, order).map_err(CliError::domain)?;
        let p = p_level(level, order).map_err(CliError::domain)?;
        let agreement = parametrization_check(level, order).map_err(CliError::domain)?;
        let ok = agreement >= order;
        all &= ok;
        rows.push(json!({
            "level": level,
            "order": order,
            "agreement": agreement,
            "status": status_name(status_if(ok)),
            "z": series_strings(&z.series),
            "p": series_strings(&p.series),
        }));
        text.push_str(&format!(
            "level {level}: P and f(x(z)) agree through q^{agreement} of {order}; {}\n",
            status_name(status_if(ok))
        ));
    }
    let status = status_if(all);
    let json = json!({"order": order, "levels": rows, "status": status_name(status)});
    Ok((Report::new(json, text).with_rows(rows), status))
}

fn legendre(a: &LegendreArgs) -> Outcome {
    let deg = a.degree as usize;
    let which: Vec<Check> = match a.identity.as_str() {
        "bailey-brafman" => vec![("bailey-brafman", bailey_brafman_check)],
        "leg" => vec![("leg", leg_identity_check)],
        "both" => vec![
            ("bailey-brafman", bailey_brafman_check),
            ("leg", leg_identity_check),
        ],
        other => {
            return Err(CliError::Usage(format!(
                "unknown identity `{other}`; expected bailey-brafman, leg or both"
            )))
        }
    };
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut all = true;
    for (name, check) in which {
        let agreement = check(deg);
        let ok = agreement >= deg;
        all &= ok;
        rows.push(json!({"identity": name, "degree": deg, "agreement": agreement, "status": status_name(status_if(ok))}));
        text.push_str(&format!(
            "{name}: agrees through total degree {agreement} of {deg}\n"
        ));
    }
    let status = status_if(all);
    let json = json!({"degree": deg, "checks": rows, "status": status_name(status)});
    Ok((Report::new(json, text).with_rows(rows), status))
}

fn scheme_name(s: Scheme) -> &'static str {
    match s {
        Scheme::QuadraticF7 => "quadratic",
        Scheme::QuinticF4 => "quintic",
    }
}

fn parse_limit(s: &str) -> Result<Option<Limit>, CliError> {
    if s == "series" {
        return Ok(None);
    }
    [
        Limit::OneOverEightPi,
        Limit::OneOverTwoPi,
        Limit::TwoOverThreePi,
        Limit::EightOverTwentyOnePi,
    ]
    .into_iter()
    .find(|l| l.name() == s)
    .map(Some)
    .ok_or_else(|| CliError::Usage(format!("unknown limit `{s}`")))
}

/// `|a_k − ξ|` as text, floored at the digit budget.
fn error_text(err: &PrecisionReal, digits: u32) -> String {
    if err.is_zero() || err.log10_abs() < -(digits as f64) {
        format!("< 1e-{digits}")
    } else {
        err.to_sci(4)
    }
}

fn agm(a: &AgmArgs) -> Outcome {
    let init: Init = a.init.parse().map_err(CliError::domain)?;
    if let Some(s) = &a.scheme {
        let scheme: Scheme = s.parse().map_err(CliError::Usage)?;
        if scheme != init.scheme() {
            return Err(CliError::Usage(format!(
                "initial data {} runs the {} scheme",
                init.name(),
                scheme_name(init.scheme())
            )));
        }
    }
    let digits = a.digits;
    let prec = bits_for_digits(digits);
    check_digits(digits, prec).map_err(CliError::domain)?;
    let limit = match &a.limit {
        Some(s) => parse_limit(s)?,
        None => Some(init.stated_limit())
            .filter(|l| !matches!(l, Limit::SqrtPiOverGammaFiveSixthsCubed)),
    };
    let (xi, limit_name) = match limit {
        Some(l) => {
            let pi = pi_reference(prec + 64).map_err(CliError::domain)?;
            (
                l.value(&pi).expect("rational multiple of 1/pi"),
                l.name().to_string(),
            )
        }
        None => {
            let s = eval_series(&init.target(prec + 64), digits + 5).map_err(CliError::domain)?;
            (s.value, format!("series {}", init.target(64).limit.name()))
        }
    };
    let m = init.scheme().order() as f64;
    let max_steps = a
        .iterations
        .unwrap_or(((digits as f64).ln() / m.ln()).ceil() as usize + 4);
    let run: IterationRun = run_init(init, max_steps, prec).map_err(CliError::domain)?;
    let errs = run.errors(&xi);
    let dg = run.digits(&xi);
    let mut rows = Vec::new();
    for (i, s) in run.states.iter().enumerate() {
        let d = dg[i].min(digits as f64);
        rows.push(json!({
            "k": s.k,
            "a_k": s.a.to_decimal(digits),
            "digits_correct": (d * 10.0).floor() / 10.0,
            "error": error_text(&errs[i], digits),
            "elapsed_ms": run.step_times.get(i).map_or(0.0, |t| t.as_secs_f64() * 1000.0),
        }));
        if a.iterations.is_none() && d >= digits as f64 {
            break;
        }
    }
    let final_digits = rows
        .last()
        .and_then(|r| r["digits_correct"].as_f64())
        .unwrap_or(0.0);
    let status = status_if(final_digits >= digits as f64);
    let json = json!({
        "scheme": scheme_name(init.scheme()),
        "init": init.name(),
        "digits": digits,
        "bits": prec,
        "limit": limit_name,
        "steps": rows,
        "final_digits": final_digits,
        "exhausted_at": run.exhausted_at,
        "status": status_name(status),
    });
    let mut text = format!(
        "{} iteration from {} against {limit_name} at {prec} bits\n",
        scheme_name(init.scheme()),
        init.name()
    );
    for r in &rows {
        text.push_str(&format!(
            "k = {:>2}  digits {:>8}  error {}\n",
            r["k"],
            r["digits_correct"],
            r["error"].as_str().unwrap_or("")
        ));
    }
    Ok((Report::new(json, text).with_rows(rows), status))
}

fn series(a: &SeriesArgs) -> Outcome {
    let digits = a.digits;
    let prec = bits_for_digits(digits + 3) + 64;
    let (target, init) = if a.target == "eq-n" {
        (SeriesTarget::eq_n(prec), None)
    } else {
        let init: Init = a.target.parse().map_err(CliError::domain)?;
        if init == Init::Ic {
            (SeriesTarget::eq_n(prec), None)
        } else {
            (init.target(prec), Some(init))
        }
    };
    let v = eval_series(&target, digits + 3).map_err(CliError::domain)?;
    let pi = pi_reference(prec).map_err(CliError::domain)?;
    let (reference, agreement) = match target.limit.value(&pi) {
        Some(xi) => (target.limit.name().to_string(), v.value.digits_against(&xi)),
        None => {
            let init = init.expect("targets without a closed form come from initial data");
            let steps = ((digits as f64).log2().ceil() as usize) + 4;
            let run = run_init(init, steps, prec).map_err(CliError::domain)?;
            (
                "quadratic iteration".to_string(),
                v.value.digits_against(&run.last().a),
            )
        }
    };
    let agreement = agreement.min(digits as f64);
    let status = status_if(agreement >= digits as f64);
    let json = json!({
        "target": target.name,
        "limit": target.limit.name(),
        "derived": target.derived,
        "digits": digits,
        "value": v.value.to_decimal(digits),
        "terms": v.terms,
        "tail_bound": v.tail_bound.to_sci(3),
        "method": v.method,
        "reference": reference,
        "agreement_digits": (agreement * 10.0).floor() / 10.0,
        "status": status_name(status),
    });
    let text = format!(
        "{} = {}\n{} terms, tail < {}; matches {reference} to {:.1} digits",
        target.name,
        v.value.to_decimal(digits),
        v.terms,
        v.tail_bound.to_sci(3),
        agreement
    );
    Ok((Report::new(json, text), status))
}

fn paper_map() -> Outcome {
    let mut rows = Vec::new();
    for line in PAPER_MAP.lines().filter(|l| l.starts_with('|')) {
        let cells: Vec<&str> = line.trim_matches('|').split('|').map(str::trim).collect();
        if cells.len() != 3 || cells[0] == "Identity" || cells[0].starts_with("---") {
            continue;
        }
        rows.push(json!({"identity": cells[0], "module": cells[1], "command": cells[2].trim_matches('`')}));
    }
    let json = json!({"entries": rows});
    Ok((
        Report::new(json, PAPER_MAP.to_string()).with_rows(rows),
        Status::Ok,
    ))
}
