use serde::Serialize;
use serde_json::json;
use tplab::function::{EvaluableFunction, Strip, Support};
use tplab::lp_class::{hankel_psd, jensen, lp_series, series_reciprocal, turan_deltas, HankelReport};
use tplab::moments::{catalog_pipeline, compute_moments, schoenberg_pipeline};
use tplab::numerics::{real, xi1_series, PrecisionConfig, XiTaylorConfig};
use tplab::pff_catalog::{catalog_list, CatalogEntry};
use tplab::polyzero::{real_root_count, vd_battery, RootCount};
use tplab::tp_tester::{bochner_battery, tp_battery, tp_battery_inflated, TpVerdict};
use tplab::transforms::{bilateral_laplace, lambda_csv, roundtrip_check, LambdaConfig, LambdaXi, XI_FIRST_ZERO};
use tplab::{Ball, PowerSeries, Verdict};

use crate::config::{ConfigRecord, OutputFormat, RunConfig};
use crate::{run_config, Cli, CliError, Command, Outcome};

/// Λ is evaluated out to this |x| when it is integrated; its envelope
/// puts every truncation radius used in practice well inside.
const LAMBDA_X_MAX: f64 = 60.0;

/// Listed zeros used for catalog factorizations.
const FACTOR_ZEROS: usize = 1000;

#[derive(Serialize)]
struct Report<'a, R: Serialize> {
    config: &'a ConfigRecord,
    subject: &'a str,
    results: R,
    verdict: Outcome,
}

enum Subject {
    Catalog(CatalogEntry),
    XiLambda,
}

impl Subject {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "xi-lambda" | "xi_lambda" | "lambda" => Ok(Subject::XiLambda),
            other => Ok(Subject::Catalog(other.parse()?)),
        }
    }

    fn name(&self) -> String {
        match self {
            Subject::Catalog(e) => e.to_string(),
            Subject::XiLambda => "xi-lambda".into(),
        }
    }
}

fn lambda_for(run: &RunConfig, x_max: f64) -> Result<LambdaXi, CliError> {
    Ok(LambdaXi::new(LambdaConfig::from_quadrature(&run.quadrature, x_max), &run.precision())?)
}

fn json_report<R: Serialize>(cfg: &ConfigRecord, subject: &str, results: R, verdict: Outcome) -> String {
    let mut s = serde_json::to_string_pretty(&Report { config: cfg, subject, results, verdict })
        .expect("reports serialize");
    s.push('\n');
    s
}

fn require_json(run: &RunConfig, cmd: &str) -> Result<(), CliError> {
    if run.output == OutputFormat::Csv {
        return Err(CliError::Usage(format!("`{cmd}` has no CSV output; use --output json")));
    }
    Ok(())
}

fn sign_verdict(b: &Ball) -> Verdict {
    if b.is_positive() {
        Verdict::Holds
    } else if b.is_negative() {
        Verdict::Violated
    } else {
        Verdict::Undecided
    }
}

/// Holds when the enclosure contains 0, violated otherwise.
fn identity_verdict(residual: &Ball) -> Verdict {
    if residual.contains_zero() {
        Verdict::Holds
    } else {
        Verdict::Violated
    }
}

fn tp_outcome(v: TpVerdict) -> Outcome {
    match v {
        TpVerdict::NoCertifiedViolation => Outcome::Holds,
        TpVerdict::CertifiedViolation => Outcome::Violated,
        TpVerdict::Undecided => Outcome::Undecided,
    }
}

pub(crate) fn dispatch(cli: &Cli) -> Result<(String, Outcome), CliError> {
    let default_output = match cli.command {
        Command::Lambda { .. } => OutputFormat::Csv,
        _ => OutputFormat::Json,
    };
    let run = run_config(cli, default_output)?;
    let params = serde_json::to_value(&cli.command).expect("commands serialize");
    let params = match params {
        serde_json::Value::Object(mut m) if m.len() == 1 => m.values_mut().next().unwrap().take(),
        other => other,
    };
    let cfg = ConfigRecord::new(cli.command.name(), params, &run);
    match &cli.command {
        Command::Catalog => catalog(&run, &cfg),
        Command::Laplace { subject, s } => laplace(&run, &cfg, subject, *s),
        Command::Lambda { xmin, xmax, step } => lambda(&run, &cfg, *xmin, *xmax, *step),
        Command::Tp { subject, max_order, trials, strategy } => {
            require_json(&run, "tp")?;
            let subj = Subject::parse(subject)?;
            let prec = run.precision();
            let rep = match subj {
                Subject::Catalog(e) => tp_battery(&e, *max_order, *trials, run.seed, *strategy, &prec)?,
                Subject::XiLambda => {
                    let l = lambda_for(&run, 10.0)?;
                    let inflate = l.target().to_f64();
                    tp_battery_inflated(&l, *max_order, *trials, run.seed, *strategy, &prec, Some(inflate))?
                }
            };
            let v = tp_outcome(rep.verdict);
            Ok((json_report(&cfg, &subj.name(), rep, v), v))
        }
        Command::Bochner { n, range, trials } => {
            require_json(&run, "bochner")?;
            let rep = bochner_battery(*n, *range, *trials, run.seed, &run.precision())?;
            let v = rep.verdict.into();
            Ok((json_report(&cfg, "1/xi(1/2 + tau)", rep, v), v))
        }
        Command::Lp { series, checks, n } => lp(&run, &cfg, series, checks, *n),
        Command::Vd { subject, degree, trials } => {
            require_json(&run, "vd")?;
            let subj = Subject::parse(subject)?;
            let prec = run.precision();
            let (ms, tilt) = match &subj {
                Subject::Catalog(e) => {
                    let c = e.moment_tilt();
                    let ms = if c == 0.0 {
                        compute_moments(e, *degree, &run.quadrature, &prec)?
                    } else {
                        compute_moments(&tplab::function::Tilted { inner: *e, c }, *degree, &run.quadrature, &prec)?
                    };
                    (ms, c)
                }
                Subject::XiLambda => {
                    (compute_moments(&lambda_for(&run, LAMBDA_X_MAX)?, *degree, &run.quadrature, &prec)?, 0.0)
                }
            };
            let rep = vd_battery(&ms, *degree, *trials, run.seed)?;
            let v = rep.verdict.into();
            Ok((json_report(&cfg, &subj.name(), json!({ "tilt": tilt, "battery": rep }), v), v))
        }
        Command::Pipeline { subject, nmax, moments } => {
            require_json(&run, "pipeline")?;
            let subj = Subject::parse(subject)?;
            let prec = run.precision();
            let rep = match &subj {
                Subject::Catalog(e) => catalog_pipeline(*e, *moments, *nmax, &run.quadrature, &prec)?,
                Subject::XiLambda => {
                    schoenberg_pipeline(&lambda_for(&run, LAMBDA_X_MAX)?, *moments, *nmax, &run.quadrature, &prec)?
                }
            };
            let v = rep.verdict.into();
            Ok((json_report(&cfg, &subj.name(), rep, v), v))
        }
        Command::Roundtrip { smax } => roundtrip(&run, &cfg, *smax),
    }
}

#[derive(Serialize)]
struct CatalogRow {
    name: String,
    lambda: String,
    psi: String,
    support: Support,
    strip: Option<Strip>,
    polya_frequency: bool,
}

fn catalog_row(e: CatalogEntry) -> CatalogRow {
    let (lambda, psi) = e.formulas();
    CatalogRow { name: e.to_string(), lambda, psi, support: e.support(), strip: e.strip(), polya_frequency: e.is_pff() }
}

fn catalog(run: &RunConfig, cfg: &ConfigRecord) -> Result<(String, Outcome), CliError> {
    require_json(run, "catalog")?;
    let results = json!({
        "entries": catalog_list().into_iter().map(catalog_row).collect::<Vec<_>>(),
        "negative_control": catalog_row(CatalogEntry::Indicator),
    });
    Ok((json_report(cfg, "catalog", results, Outcome::Holds), Outcome::Holds))
}

fn laplace(run: &RunConfig, cfg: &ConfigRecord, subject: &str, s: f64) -> Result<(String, Outcome), CliError> {
    require_json(run, "laplace")?;
    let subj = Subject::parse(subject)?;
    let prec = run.precision();
    let sf = real(s);
    let (results, verdict) = match &subj {
        Subject::Catalog(e) => {
            let t = bilateral_laplace(e, &sf, &run.quadrature, &prec)?;
            let psi = e.psi(&sf, &prec)?;
            let residual = t.value.mul(&psi).sub(&Ball::one(prec.work_bits()));
            let v = identity_verdict(&residual);
            (json!({ "s": s, "value": t.value, "strip": t.strip, "psi": psi, "value_times_psi_minus_one": residual }), v)
        }
        Subject::XiLambda => {
            let l = lambda_for(run, LAMBDA_X_MAX)?;
            let t = bilateral_laplace(&l, &sf, &run.quadrature, &prec)?;
            let residual = roundtrip_check(&l, &sf, &run.quadrature)?;
            let v = identity_verdict(&residual);
            (json!({ "s": s, "value": t.value, "strip": t.strip, "value_times_big_xi_minus_one": residual }), v)
        }
    };
    let v = verdict.into();
    Ok((json_report(cfg, &subj.name(), results, v), v))
}

fn sample_points(xmin: f64, xmax: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step.is_finite()) || !(xmin.is_finite() && xmax.is_finite()) || xmax < xmin {
        return Err(CliError::Usage("need finite xmin ≤ xmax and step > 0".into()));
    }
    let n = ((xmax - xmin) / step + 1e-9).floor() as usize;
    if n > 100_000 {
        return Err(CliError::Usage(format!("{n} sample points requested; at most 100000")));
    }
    Ok((0..=n).map(|i| xmin + i as f64 * step).collect())
}

fn lambda(run: &RunConfig, cfg: &ConfigRecord, xmin: f64, xmax: f64, step: f64) -> Result<(String, Outcome), CliError> {
    let xs = sample_points(xmin, xmax, step)?;
    let x_max = xs.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let l = lambda_for(run, x_max)?;
    let floats: Vec<_> = xs.iter().map(|&x| real(x)).collect();
    let values = floats.iter().map(|x| l.value(x)).collect::<tplab::Result<Vec<_>>>()?;
    let verdict: Outcome = Verdict::all(values.iter().map(sign_verdict)).into();
    match run.output {
        OutputFormat::Csv => Ok((lambda_csv(&l, &floats)?, verdict)),
        OutputFormat::Json => {
            let points: Vec<_> = xs.iter().zip(&values).map(|(x, v)| json!({ "x": x, "value": v })).collect();
            let results = json!({ "truncation_radius": l.truncation_radius(), "points": points, "positive": verdict == Outcome::Holds });
            Ok((json_report(cfg, "xi-lambda", results, verdict), verdict))
        }
    }
}

fn roundtrip(run: &RunConfig, cfg: &ConfigRecord, smax: u32) -> Result<(String, Outcome), CliError> {
    if smax as f64 >= XI_FIRST_ZERO {
        return Err(CliError::Usage(format!("smax must be below {XI_FIRST_ZERO}")));
    }
    let l = lambda_for(run, LAMBDA_X_MAX)?;
    let s_values: Vec<i64> = (-(smax as i64)..=smax as i64).collect();
    let residuals = s_values
        .iter()
        .map(|&s| roundtrip_check(&l, &real(s as f64), &run.quadrature))
        .collect::<tplab::Result<Vec<_>>>()?;
    let verdict: Outcome = Verdict::all(residuals.iter().map(identity_verdict)).into();
    match run.output {
        OutputFormat::Csv => {
            let mut out = String::from("s,center,radius\n");
            for (s, r) in s_values.iter().zip(&residuals) {
                out.push_str(&format!("{s},{},{}\n", r.mid_string(), r.rad_string()));
            }
            Ok((out, verdict))
        }
        OutputFormat::Json => {
            let points: Vec<_> =
                s_values.iter().zip(&residuals).map(|(s, r)| json!({ "s": s, "residual": r })).collect();
            Ok((json_report(cfg, "xi-lambda", json!({ "points": points }), verdict), verdict))
        }
    }
}

#[derive(Serialize)]
struct TuranEntry {
    n: usize,
    delta: Ball,
    verdict: Verdict,
}

#[derive(Serialize)]
struct JensenEntry {
    n: usize,
    real_roots: RootCount,
    verdict: Verdict,
}

#[derive(Serialize, Default)]
struct LpResults {
    #[serde(skip_serializing_if = "Option::is_none")]
    zero_at_origin_removed: Option<u32>,
    /// Largest Hankel size the available series supports, when below n.
    #[serde(skip_serializing_if = "Option::is_none")]
    hankel_max_order: Option<usize>,
    series: Option<PowerSeries>,
    #[serde(skip_serializing_if = "Option::is_none")]
    turan: Option<Vec<TuranEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hankel: Option<Vec<HankelReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    jensen: Option<Vec<JensenEntry>>,
}

fn lp_subject_series(spec: &str, order: usize, prec: &PrecisionConfig) -> Result<(PowerSeries, Option<u32>), CliError> {
    if spec == "xi1" {
        return Ok((xi1_series(order, prec)?, None));
    }
    let name = spec
        .strip_prefix("catalog:")
        .ok_or_else(|| CliError::Usage(format!("series must be `xi1` or `catalog:NAME`, got {spec:?}")))?;
    let entry: CatalogEntry = name.parse()?;
    let fac = entry
        .factorization(FACTOR_ZEROS, prec.work_bits())?
        .ok_or_else(|| CliError::Usage(format!("{entry} has no Hadamard factorization")))?;
    let mut fac = fac.to_lp()?;
    let m = fac.m;
    // Ψ(s)/s^m has the same zeros off the origin
    fac.m = 0;
    Ok((lp_series(&fac, order, prec)?, (m > 0).then_some(m)))
}

fn lp(run: &RunConfig, cfg: &ConfigRecord, spec: &str, checks: &[String], n: usize) -> Result<(String, Outcome), CliError> {
    require_json(run, "lp")?;
    if n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    for c in checks {
        if !matches!(c.as_str(), "turan" | "hankel" | "jensen") {
            return Err(CliError::Usage(format!("unknown check {c:?} (turan, hankel, jensen)")));
        }
    }
    let prec = run.precision();
    let wants = |c: &str| checks.iter().any(|x| x == c);
    // Turán and Jensen up to n need β_{n+1}; Hankel n×n needs γ_{2n-2}.
    // The Ξ₁ Taylor data is capped, which may limit the Hankel sizes.
    let mut order = if wants("hankel") { (n + 1).max(2 * n - 2) } else { n + 1 };
    if spec == "xi1" {
        order = order.min(XiTaylorConfig::default().coeff_cap / 2).max(n + 1);
    }
    let (ps, removed) = lp_subject_series(spec, order, &prec)?;
    let hankel_max = n.min(order / 2 + 1);
    let mut res = LpResults {
        zero_at_origin_removed: removed,
        hankel_max_order: (wants("hankel") && hankel_max < n).then_some(hankel_max),
        ..Default::default()
    };
    let mut verdicts = Vec::new();
    if wants("turan") {
        let t: Vec<TuranEntry> = turan_deltas(&ps)?
            .into_iter()
            .take(n)
            .enumerate()
            .map(|(i, d)| {
                let verdict = if d.is_nonnegative() {
                    Verdict::Holds
                } else if d.is_negative() {
                    Verdict::Violated
                } else {
                    Verdict::Undecided
                };
                TuranEntry { n: i + 1, delta: d, verdict }
            })
            .collect();
        verdicts.extend(t.iter().map(|e| e.verdict));
        res.turan = Some(t);
    }
    if wants("hankel") {
        let recip = series_reciprocal(&ps)?;
        let h = (1..=hankel_max).map(|k| hankel_psd(&recip, k)).collect::<tplab::Result<Vec<_>>>()?;
        verdicts.extend(h.iter().map(|r| r.verdict));
        res.hankel = Some(h);
    }
    if wants("jensen") {
        let j = (1..=n)
            .map(|k| {
                let (p, _) = jensen(&ps, k)?;
                // vanishing top coefficients lower the degree (even series)
                let deg = p.degree().unwrap_or(0);
                let c = real_root_count(&p);
                let verdict = if !p.leading_certified() {
                    Verdict::Undecided
                } else if c.lo == deg {
                    Verdict::Holds
                } else if c.hi < deg {
                    Verdict::Violated
                } else {
                    Verdict::Undecided
                };
                Ok(JensenEntry { n: k, real_roots: c, verdict })
            })
            .collect::<tplab::Result<Vec<_>>>()?;
        verdicts.extend(j.iter().map(|e| e.verdict));
        res.jensen = Some(j);
    }
    res.series = Some(ps);
    let v: Outcome = Verdict::all(verdicts).into();
    Ok((json_report(cfg, spec, res, v), v))
}
