use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use walklab_core::asymptotics::{fit_decay, predicted_exponent, GroupProfile};
use walklab_core::convolution::{
    default_epsilon, exact_return_series, fourier_return_series, return_series, write_power, CacheHeader,
    FourierOptions, RationalMeasure,
};
use walklab_core::montecarlo::{collision_return_estimate, lamplighter_range_estimate, range_profile};
use walklab_core::spectral::{
    functional_calculus, functional_calculus_check, quotient_operator, sandwich_check, spectral_profile,
    trace_identity_check, SpectrumSummary,
};
use walklab_core::{
    defaults, Error, FiniteMeasure, FiniteQuotient, Group, GroupKind, MeasureSpec, Method, Result, ReturnSeries,
    SeriesRecord,
};

use crate::cache::{atomic_write, cache_key, Cache};
use crate::config::{Estimator, ExperimentConfig, Parsed, SeriesRoute, Task};
use crate::verify::run_suite;

/// What a run produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// False when a check inside the run failed.
    pub pass: bool,
    pub files: Vec<PathBuf>,
    /// Plain-text summary, also written to `summary.txt`.
    pub summary: String,
}

struct Run<'a> {
    config: &'a ExperimentConfig,
    parsed: &'a Parsed,
    out: PathBuf,
    cache: Cache,
    files: Vec<PathBuf>,
}

impl Run<'_> {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.out.join(name);
        atomic_write(&path, bytes)?;
        self.files.push(path);
        Ok(())
    }

    /// `report.json`: the task result inside a header naming the config.
    fn report(&mut self, pass: bool, result: Value) -> Result<()> {
        let mut config = serde_json::to_value(self.config).expect("configs serialize");
        config["out"] = Value::Null;
        config["cache"] = Value::Null;
        let report = json!({
            "walklab_version": env!("CARGO_PKG_VERSION"),
            "config_hash": self.config.hash(),
            "task": self.config.task().as_str(),
            "config": config,
            "pass": pass,
            "result": result,
        });
        let text = serde_json::to_string_pretty(&report).expect("reports serialize");
        self.write("report.json", format!("{text}\n").as_bytes())
    }

    fn group(&self) -> Result<Group> {
        Group::new(self.parsed.group.expect("validated"))
    }

    fn measure(&self) -> &MeasureSpec {
        self.parsed.measure.as_ref().expect("validated")
    }
}

/// Runs one validated experiment and writes its outputs under `out`.
///
/// Outputs depend only on the config: nothing time- or host-dependent is
/// written, and cached values are the values a fresh run would produce.
pub fn run_experiment(config: &ExperimentConfig, parsed: &Parsed) -> Result<Outcome> {
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from("walklab-out"));
    let cache = Cache::new(config.cache.clone().unwrap_or_else(|| PathBuf::from(defaults::CACHE_DIR)));
    let mut run = Run { config, parsed, out, cache, files: Vec::new() };
    let (pass, summary) = match config.task() {
        Task::Walk => walk(&mut run)?,
        Task::Mc => monte_carlo(&mut run)?,
        Task::Spectral => spectral(&mut run)?,
        Task::Fit => fit(&mut run)?,
        Task::Verify => verify(&mut run)?,
    };
    let summary = format!("walklab {} {}: {}\n{summary}", config.task().as_str(), if pass { "PASS" } else { "FAIL" }, config.hash());
    run.write("summary.txt", summary.as_bytes())?;
    Ok(Outcome { pass, files: run.files, summary })
}

/// Exact rational weights for the measures that have them.
fn rational_measure(spec: &MeasureSpec, group: &Group) -> Result<RationalMeasure> {
    match spec {
        MeasureSpec::Ball { r } => RationalMeasure::uniform_ball(group, *r),
        MeasureSpec::Delta => RationalMeasure::from_measure(&spec.build(group)?),
        other => Err(Error::Unsupported(format!("no rational weights for {other}; use method exact"))),
    }
}

/// Picks the concrete route for `auto`.
fn resolve_route(route: SeriesRoute, spec: &MeasureSpec, kind: GroupKind, n_max: u64, allow_rational: bool) -> SeriesRoute {
    if route != SeriesRoute::Auto {
        return route;
    }
    let small = matches!(spec, MeasureSpec::Ball { .. } | MeasureSpec::Delta);
    if allow_rational && small && n_max <= defaults::RATIONAL_AUTO_N_MAX {
        SeriesRoute::Rational
    } else if spec.prefers_symbol() && kind == (GroupKind::Lattice { d: 1 }) {
        SeriesRoute::Fourier
    } else {
        SeriesRoute::Exact
    }
}

/// A float return series up to `n_max`, through the cache.
fn float_series(run: &Run, route: SeriesRoute, n_max: u64) -> Result<ReturnSeries> {
    let group = run.group()?;
    let (g, m) = (group.kind().to_string(), run.measure().to_string());
    let half = n_max / 2;
    let (series, hit) = match route {
        SeriesRoute::Fourier => {
            let key = cache_key("series-fourier", &g, &m, defaults::QUADRATURE_REL_TOL, n_max);
            run.cache.series_or(&key, || {
                let symbol = run
                    .measure()
                    .symbol(&group)?
                    .ok_or_else(|| Error::Unsupported(format!("the Fourier route needs a measure on Z, not on {g}")))?;
                fourier_return_series(symbol.as_ref(), half, FourierOptions::default())
            })?
        }
        SeriesRoute::Exact => {
            let phi = run.measure().build(&group)?;
            let eps = run.config.epsilon.unwrap_or_else(|| default_epsilon(phi.len()));
            let key = cache_key("series-exact", &g, &m, eps, n_max);
            run.cache.series_or(&key, || return_series(&phi, half, eps))?
        }
        SeriesRoute::Auto | SeriesRoute::Rational => unreachable!("resolved before"),
    };
    log::info!("series {g} {m} up to n = {n_max}: {}", if hit { "cache hit" } else { "computed" });
    Ok(ReturnSeries { spec: format!("{g} {m}"), records: series.records })
}

fn walk(run: &mut Run) -> Result<(bool, String)> {
    let group = run.group()?;
    let n_max = run.config.n_max.expect("validated");
    let route = resolve_route(run.config.method.unwrap_or_default(), run.measure(), group.kind(), n_max, true);
    let mut summary = String::new();
    let rows = if route == SeriesRoute::Rational {
        let phi = rational_measure(run.measure(), &group)?;
        let series = exact_return_series(&phi, n_max / 2)?;
        let mut csv = String::from("n,lower,upper,method\n");
        for (n, v) in &series {
            writeln!(csv, "{n},{v},{v},rational").expect("writing to a String");
            writeln!(summary, "φ^({n})(e) = {v}").expect("writing to a String");
        }
        run.write("series.csv", csv.as_bytes())?;
        json!(series.iter().map(|(n, v)| json!({ "n": n, "value": v.to_string() })).collect::<Vec<_>>())
    } else {
        let series = float_series(run, route, n_max)?;
        for r in &series.records {
            writeln!(summary, "φ^({})(e) ∈ [{:e}, {:e}] ({})", r.n, r.lower, r.upper, r.method.as_str()).expect("writing to a String");
        }
        run.write("series.csv", series.to_csv().as_bytes())?;
        json!(series.records)
    };
    let mut powers = Vec::new();
    if let Some(ns) = run.config.powers.clone() {
        let phi = run.measure().build(&group)?;
        let eps = run.config.epsilon.unwrap_or_else(|| default_epsilon(phi.len()));
        let (g, m) = (group.kind().to_string(), run.measure().to_string());
        for n in ns {
            let (mu, hit) = run.cache.power(&g, &m, &phi, n, eps)?;
            log::info!("power {n}: {}", if hit { "cache hit" } else { "computed" });
            let header = CacheHeader { group: g.clone(), measure: m.clone(), n, epsilon: eps, deficit: mu.deficit() };
            let path = run.out.join(format!("power-{n}.csv"));
            write_power(&path, &header, &mu)?;
            run.files.push(path);
            powers.push(json!({ "n": n, "atoms": mu.len(), "deficit": mu.deficit(), "max_weight": mu.max_weight() }));
        }
    }
    let route_name = match route {
        SeriesRoute::Rational => "rational",
        SeriesRoute::Fourier => "fourier",
        _ => "exact",
    };
    run.report(true, json!({ "route": route_name, "series": rows, "powers": powers }))?;
    Ok((true, summary))
}

fn monte_carlo(run: &mut Run) -> Result<(bool, String)> {
    let group = run.group()?;
    let seed = run.config.seed.expect("validated");
    let ns = run.config.ns.clone().expect("validated");
    let estimator = run.config.estimator.unwrap_or_default();
    let mut summary = String::new();
    let result = match estimator {
        Estimator::Collision | Estimator::RangeIdentity => {
            let samples = run.config.samples.unwrap_or(defaults::MC_SAMPLES);
            let mut estimates = Vec::new();
            if estimator == Estimator::Collision {
                let phi = run.measure().build(&group)?;
                for &n in &ns {
                    estimates.push((2 * n, collision_return_estimate(&phi, n, samples, seed)?));
                }
            } else {
                let base = switch_walk_base(run.measure(), group.kind())?;
                for &n in &ns {
                    estimates.push((n, lamplighter_range_estimate(&base, n, samples, seed)?));
                }
            }
            let mut csv = String::from("n,return_step,estimate,stderr,lower,upper,tv_bias_bound,samples,seed\n");
            let mut series = ReturnSeries::new(format!("{} {}", group.kind(), run.measure()));
            for (step, e) in &estimates {
                let (lo, hi) = ((e.estimate - 2.0 * e.stderr).max(0.0), e.estimate + 2.0 * e.stderr);
                writeln!(
                    csv,
                    "{},{step},{:e},{:e},{lo:e},{hi:e},{:e},{},{}",
                    e.n, e.estimate, e.stderr, e.tv_bias_bound, e.samples, e.seed
                )
                .expect("writing to a String");
                writeln!(summary, "φ^({step})(e) ≈ {:e} ± {:e}", e.estimate, e.stderr).expect("writing to a String");
                series.records.push(SeriesRecord { n: *step, lower: lo, upper: hi, method: Method::MonteCarlo });
            }
            run.write("mc.csv", csv.as_bytes())?;
            run.write("series.csv", series.to_csv().as_bytes())?;
            json!({ "estimator": estimator, "estimates": estimates.iter().map(|p| &p.1).collect::<Vec<_>>() })
        }
        Estimator::Range => {
            let walks = run.config.samples.unwrap_or(defaults::RANGE_WALKS);
            let phi = run.measure().build(&group)?;
            let profile = range_profile(&phi, &ns, walks, &[], seed)?;
            let mut csv = String::from("n,mean,stderr,variance,walks\n");
            for s in &profile {
                writeln!(csv, "{},{:e},{:e},{:e},{walks}", s.n, s.mean, s.mean_stderr(), s.variance).expect("writing to a String");
                writeln!(summary, "E[D_{}] ≈ {:.3} ± {:.3}", s.n, s.mean, s.mean_stderr()).expect("writing to a String");
            }
            run.write("range.csv", csv.as_bytes())?;
            let rows: Vec<Value> = profile.iter().map(|s| json!({ "n": s.n, "mean": s.mean, "variance": s.variance })).collect();
            json!({ "estimator": estimator, "walks": walks, "ranges": rows })
        }
    };
    run.report(true, result)?;
    Ok((true, summary))
}

/// The marker measure of `switchwalk:base=…` on a lamplighter.
fn switch_walk_base(spec: &MeasureSpec, kind: GroupKind) -> Result<FiniteMeasure> {
    match (spec, kind) {
        (MeasureSpec::SwitchWalk { base }, GroupKind::Lamplighter { d }) => base.build(&Group::new(GroupKind::Lattice { d })?),
        _ => Err(Error::Usage(format!("the range-identity estimator needs a switch-walk on a lamplighter, got {spec} on {kind}"))),
    }
}

fn spectral(run: &mut Run) -> Result<(bool, String)> {
    let group = run.group()?;
    let qkind = run.parsed.quotient.expect("validated");
    if qkind.parent() != group.kind() {
        return Err(Error::Usage(format!("{qkind} is not a quotient of {}", group.kind())));
    }
    let q = FiniteQuotient::new(qkind)?;
    let base = quotient_operator(&run.measure().build(&group)?, &q)?;
    let horizon = run.config.n_max.map_or(defaults::SANDWICH_N_MAX, |n| u32::try_from(n / 2).unwrap_or(u32::MAX));
    let mut result = json!({});
    let mut violations = 0;
    let op = match &run.parsed.psi {
        Some(psi) => {
            let fc = functional_calculus_check(&base, psi, horizon)?;
            violations += fc.violations;
            result["functional_calculus"] = json!(fc);
            functional_calculus(&base, psi)?.0
        }
        None => base,
    };
    let profile = spectral_profile(&op)?;
    let trace = trace_identity_check(&op)?;
    violations += trace.violations;
    result["spectrum"] = json!(SpectrumSummary::new(&op, &profile));
    result["trace_identity"] = json!(trace);
    if profile.deficit().abs() <= 1e-12 {
        let sandwich = sandwich_check(&profile, horizon, 1e-12)?;
        violations += sandwich.violations;
        result["sandwich"] = json!({
            "n_range": sandwich.n_range,
            "min_slack": sandwich.min_slack,
            "tolerance": sandwich.tolerance,
            "violations": sandwich.violations,
        });
    }
    result["violations"] = json!(violations);
    let mut csv = String::from("index,eigenvalue\n");
    for (i, l) in profile.eigenvalues().iter().enumerate() {
        writeln!(csv, "{i},{l:e}").expect("writing to a String");
    }
    run.write("eigenvalues.csv", csv.as_bytes())?;
    let pass = violations == 0;
    run.report(pass, result)?;
    let summary = format!(
        "{}: {} states, λ ∈ [{:.6}, {:.6}], trace identity within {:e}, {violations} violations\n",
        op.label(),
        op.size(),
        profile.eigenvalues()[op.size() - 1],
        profile.eigenvalues()[0],
        trace.max_discrepancy
    );
    Ok((pass, summary))
}

fn fit(run: &mut Run) -> Result<(bool, String)> {
    let group = run.group()?;
    let model = run.parsed.model.expect("validated");
    let (lo, hi) = run.config.n_range.expect("validated");
    let n_max = run.config.n_max.unwrap_or(hi + hi % 2);
    let route = resolve_route(run.config.method.unwrap_or_default(), run.measure(), group.kind(), n_max, false);
    if route == SeriesRoute::Rational {
        return Err(Error::Usage("fits use float series; set method to exact or fourier".into()));
    }
    let series = float_series(run, route, n_max)?;
    run.write("series.csv", series.to_csv().as_bytes())?;
    let f = fit_decay(&series, model, (lo, hi))?;
    let prediction = run.parsed.rho.as_ref().map(|rho| predicted_exponent(&GroupProfile::of(group.kind()), rho));
    let tolerance = run.config.tolerance.unwrap_or(f.half_width);
    let pass = run.config.expected.map_or(true, |e| f.contains(e, tolerance));
    let fmt_opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:e}"));
    let csv = format!(
        "model,exponent,half_width,n_lo,n_hi,points,r_squared,expected,tolerance,pass\n{},{:e},{:e},{},{},{},{:e},{},{},{}\n",
        f.model.as_str(),
        f.exponent,
        f.half_width,
        f.n_range.0,
        f.n_range.1,
        f.points,
        f.r_squared,
        fmt_opt(run.config.expected),
        fmt_opt(run.config.expected.map(|_| tolerance)),
        pass
    );
    run.write("fit.csv", csv.as_bytes())?;
    let mut summary = format!("{} exponent {:.4} ± {:.4} on n ∈ [{lo}, {hi}] ({} points)\n", f.model.as_str(), f.exponent, f.half_width, f.points);
    if let Some(p) = &prediction {
        writeln!(summary, "predicted: {:?} ({})", p.value, p.citation).expect("writing to a String");
    }
    run.report(pass, json!({ "fit": f, "expected": run.config.expected, "tolerance": tolerance, "prediction": prediction }))?;
    Ok((pass, summary))
}

fn verify(run: &mut Run) -> Result<(bool, String)> {
    let suite = run.parsed.suite.expect("validated");
    let report = run_suite(suite, run.config.seed.unwrap_or(defaults::VERIFY_SEED))?;
    let csv = format!(
        "suite,criterion,pass,measured,target\n{},{},{},\"{}\",\"{}\"\n",
        report.suite,
        report.criterion,
        report.pass,
        report.measured.to_string().replace('"', "'"),
        report.target
    );
    run.write("verify.csv", csv.as_bytes())?;
    let line = report.line();
    let pass = report.pass;
    run.report(pass, json!(report))?;
    Ok((pass, format!("{line}\n")))
}

/// Reads, validates and runs the config at `path`.
pub fn run_file(path: &Path, task: Option<Task>, seed: Option<u64>, out: Option<PathBuf>) -> std::result::Result<Outcome, crate::CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| crate::CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let (mut config, parsed) = ExperimentConfig::parse_for(&text, task, seed)
        .map_err(|e| crate::CliError::Usage(format!("{}: {e}", path.display())))?;
    if out.is_some() {
        config.out = out;
    }
    run_experiment(&config, &parsed).map_err(crate::CliError::Run)
}
