//! The acceptance suites, runnable as `walklab verify`.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use walklab_core::asymptotics::{fit_decay, fit_values, fit_values_min, DecayModel, FitResult};
use walklab_core::convolution::{
    convolve, default_epsilon, exact_return_series, fourier_return_series, mixture_sup_bound, return_series,
    FourierOptions, RationalMeasure,
};
use walklab_core::measures::{ball_mixture, lamplighter_switch, stable_like, tail_rule_truncation, uniform_ball, MixtureSpec};
use walklab_core::montecarlo::{collision_return_estimate, lamplighter_range_estimate, range_profile};
use walklab_core::scales::{gamma_alpha, Symbol, WeightKernel};
use walklab_core::spectral::{
    comparison_check, interpolation_check, quotient_operator, sandwich_check, spectral_profile, trace_identity_check,
};
use walklab_core::{defaults, Element, FiniteMeasure, FiniteQuotient, Group, GroupKind, MeasureSpec, MomentScale, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    ExactReturn,
    SrwZ2Power,
    StableSharpness,
    SubordinationPower,
    Sandwich,
    TraceIdentity,
    SpectralComparison,
    MixtureBound,
    GammaAlphaTable,
    LamplighterExpPow,
    LamplighterRangeIdentity,
    Interpolation,
    RangeScaling,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::ExactReturn,
        Suite::SrwZ2Power,
        Suite::StableSharpness,
        Suite::SubordinationPower,
        Suite::Sandwich,
        Suite::TraceIdentity,
        Suite::SpectralComparison,
        Suite::MixtureBound,
        Suite::GammaAlphaTable,
        Suite::LamplighterExpPow,
        Suite::LamplighterRangeIdentity,
        Suite::Interpolation,
        Suite::RangeScaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ExactReturn => "exact-return",
            Suite::SrwZ2Power => "srw-z2-power",
            Suite::StableSharpness => "stable-sharpness",
            Suite::SubordinationPower => "subordination-power",
            Suite::Sandwich => "sandwich",
            Suite::TraceIdentity => "trace-identity",
            Suite::SpectralComparison => "spectral-comparison",
            Suite::MixtureBound => "mixture-bound",
            Suite::GammaAlphaTable => "gamma-alpha-table",
            Suite::LamplighterExpPow => "lamplighter-exp-pow",
            Suite::LamplighterRangeIdentity => "lamplighter-range-identity",
            Suite::Interpolation => "interpolation",
            Suite::RangeScaling => "range-scaling",
        }
    }

    /// Acceptance criterion number; the range-identity suite supplements 10.
    pub fn criterion(self) -> u8 {
        match self {
            Suite::ExactReturn => 1,
            Suite::SrwZ2Power => 2,
            Suite::StableSharpness => 3,
            Suite::SubordinationPower => 4,
            Suite::Sandwich => 5,
            Suite::TraceIdentity => 6,
            Suite::SpectralComparison => 7,
            Suite::MixtureBound => 8,
            Suite::GammaAlphaTable => 9,
            Suite::LamplighterExpPow | Suite::LamplighterRangeIdentity => 10,
            Suite::Interpolation => 11,
            Suite::RangeScaling => 12,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Suite::ExactReturn => "Z SRW φ^(2)(0) = 1/3 and φ^(4)(0) = 19/81 in rationals; float mode within 1e-12",
            Suite::SrwZ2Power => "Z² SRW exact series on 2n ∈ [64, 4096]: power fit 1.00 ± 0.08",
            Suite::StableSharpness => "stable-like α=1 on Z, cutoff 1e5, 2n ∈ [64, 4096]: power fit 1.00 ± 0.10",
            Suite::SubordinationPower => "Z SRW subordinated by s^{1/2}, tail-rule K: power fit 1.00 ± 0.10",
            Suite::Sandwich => "Z_97 SRW and the 24-state lamplighter quotient, n ≤ 200: no sandwich violations",
            Suite::TraceIdentity => "ten quotient operators: matrix-power diagonal vs eigenvalue sum within 1e-10",
            Suite::SpectralComparison => "20 random certified pairs on Z_64, 1000-point grid: N₂(s) ≤ N₁(Cs) everywhere",
            Suite::MixtureBound => "5-level ball mixture on Z, n ≤ 64: ‖φ^(n)‖_∞ below the mixture bound; 0.2459 vs 0.2222",
            Suite::GammaAlphaTable => "γ_α(d/(d+2)) = d/(d+α) and γ_α(1/3) = 1/(1+α) within 1e-12",
            Suite::LamplighterExpPow => "switch-walk q_1 on Z/2 wr Z, collision estimates at n ∈ {16,32,64,128}, N = 2e5: exp-pow in [0.35, 0.65]",
            Suite::LamplighterRangeIdentity => {
                "switch-walk q_1 on Z/2 wr Z via E[2^{−R}; S = 0] at the same n and N: exp-pow in [0.35, 0.65]"
            }
            Suite::Interpolation => "Z_128, stable-like α=1, ψ = s^{1/2}, ρ = power(1), 100 functions: ratio ≤ 1",
            Suite::RangeScaling => "Z SRW, 1e4 walks, n ≤ 4096: slope of log E[D_n] on log n is 0.50 ± 0.05",
        }
    }

    /// Wall-clock budget of the criterion.
    pub fn budget(self) -> Duration {
        Duration::from_secs(match self {
            Suite::ExactReturn => 1,
            Suite::SrwZ2Power => 30,
            Suite::StableSharpness | Suite::SubordinationPower | Suite::RangeScaling => 120,
            Suite::LamplighterExpPow | Suite::LamplighterRangeIdentity => 300,
            Suite::Interpolation => 60,
            Suite::Sandwich | Suite::TraceIdentity | Suite::SpectralComparison | Suite::MixtureBound => 120,
            Suite::GammaAlphaTable => 1,
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL.into_iter().find(|x| x.name() == s.trim()).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
            format!("unknown suite '{s}'; expected one of {}", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub criterion: u8,
    pub description: &'static str,
    pub pass: bool,
    /// The headline number compared against the target.
    pub measured: Value,
    pub target: String,
    pub details: Value,
}

impl SuiteReport {
    fn new(suite: Suite, pass: bool, measured: Value, target: impl Into<String>, details: Value) -> Self {
        SuiteReport {
            suite: suite.name(),
            criterion: suite.criterion(),
            description: suite.description(),
            pass,
            measured,
            target: target.into(),
            details,
        }
    }

    /// `PASS name: measured (target)`.
    pub fn line(&self) -> String {
        format!("{} {}: {} (target {})", if self.pass { "PASS" } else { "FAIL" }, self.suite, self.measured, self.target)
    }
}

/// Runs one suite. Randomized suites draw from `seed`.
pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteReport> {
    log::info!("suite {suite}: {}", suite.description());
    match suite {
        Suite::ExactReturn => exact_return(),
        Suite::SrwZ2Power => srw_z2_power(),
        Suite::StableSharpness => fourier_power(suite, "stable:a=1,cutoff=100000"),
        Suite::SubordinationPower => fourier_power(suite, "subordinate:base=(ball:r=1),a=0.5"),
        Suite::Sandwich => sandwich(),
        Suite::TraceIdentity => trace_identity(),
        Suite::SpectralComparison => spectral_comparison(seed),
        Suite::MixtureBound => mixture_bound(),
        Suite::GammaAlphaTable => gamma_alpha_table(),
        Suite::LamplighterExpPow => lamplighter_collisions(seed),
        Suite::LamplighterRangeIdentity => lamplighter_range_identity(seed),
        Suite::Interpolation => interpolation(seed),
        Suite::RangeScaling => range_scaling(seed),
    }
}

fn z() -> Result<Group> {
    Group::new(GroupKind::Lattice { d: 1 })
}

fn quotient(spec: &str) -> Result<FiniteQuotient> {
    FiniteQuotient::new(spec.parse()?)
}

fn fit_json(f: &FitResult) -> Value {
    json!({
        "model": f.model.as_str(),
        "exponent": f.exponent,
        "half_width": f.half_width,
        "n_range": [f.n_range.0, f.n_range.1],
        "points": f.points,
        "r_squared": f.r_squared,
    })
}

fn exact_return() -> Result<SuiteReport> {
    let z = z()?;
    let rational = exact_return_series(&RationalMeasure::uniform_ball(&z, 1)?, 2)?;
    let shown: Vec<(u64, String)> = rational.iter().map(|(n, v)| (*n, v.to_string())).collect();
    let rational_ok = shown == [(2, "1/3".to_string()), (4, "19/81".to_string())];
    let float = return_series(&uniform_ball(&z, 1)?, 2, 1e-14)?;
    let targets = [(2u64, 1.0 / 3.0), (4, 19.0 / 81.0)];
    let mut err: f64 = 0.0;
    for (n, want) in targets {
        let r = float.get(n).ok_or_else(|| walklab_core::Error::Numeric(format!("float series lacks n = {n}")))?;
        err = err.max((r.lower - want).abs()).max((r.upper - want).abs());
    }
    let pass = rational_ok && err <= 1e-12;
    Ok(SuiteReport::new(
        Suite::ExactReturn,
        pass,
        json!({ "rational": shown.iter().map(|p| &p.1).collect::<Vec<_>>(), "float_max_error": err }),
        "1/3, 19/81 exactly; float error ≤ 1e-12",
        json!({ "float": float.records }),
    ))
}

fn power_fit_report(suite: Suite, fit: &FitResult, target: f64, tol: f64, details: Value) -> SuiteReport {
    SuiteReport::new(
        suite,
        fit.contains(target, tol),
        json!(fit.exponent),
        format!("{target} ± {tol}"),
        json!({ "fit": fit_json(fit), "series": details }),
    )
}

fn srw_z2_power() -> Result<SuiteReport> {
    let z2 = Group::new(GroupKind::Lattice { d: 2 })?;
    let phi = uniform_ball(&z2, 1)?;
    let series = return_series(&phi, 2048, default_epsilon(phi.len()))?;
    let fit = fit_decay(&series, DecayModel::Power, (64, 4096))?;
    Ok(power_fit_report(Suite::SrwZ2Power, &fit, 1.0, 0.08, json!(series.records)))
}

fn fourier_power(suite: Suite, spec: &str) -> Result<SuiteReport> {
    let measure: MeasureSpec = spec.parse()?;
    let symbol = measure.symbol(&z()?)?.expect("measures on Z have symbols");
    let series = fourier_return_series(symbol.as_ref(), 2048, FourierOptions::default())?;
    let fit = fit_decay(&series, DecayModel::Power, (64, 4096))?;
    let mut report = power_fit_report(suite, &fit, 1.0, 0.10, json!(series.records));
    report.details["measure"] = json!(spec);
    if let MeasureSpec::Subordinate { a, .. } = measure {
        report.details["truncation"] = json!(tail_rule_truncation(a, defaults::SUBORDINATION_TAIL));
    }
    Ok(report)
}

fn sandwich() -> Result<SuiteReport> {
    let l = Group::new(GroupKind::Lamplighter { d: 1 })?;
    let ops = [
        quotient_operator(&uniform_ball(&z()?, 1)?, &quotient("quotient:lattice:d=1:m=97")?)?,
        quotient_operator(&uniform_ball(&l, 1)?, &quotient("quotient:lamplighter:d=1:m=3")?)?,
    ];
    let mut reports = Vec::new();
    for op in &ops {
        reports.push(sandwich_check(&spectral_profile(op)?, defaults::SANDWICH_N_MAX, 1e-12)?);
    }
    let violations: usize = reports.iter().map(|r| r.violations).sum();
    let min_slack = reports.iter().map(|r| r.min_slack).fold(f64::INFINITY, f64::min);
    let summary: Vec<Value> = ops
        .iter()
        .zip(&reports)
        .map(|(op, r)| json!({ "operator": op.label(), "size": op.size(), "min_slack": r.min_slack, "violations": r.violations }))
        .collect();
    Ok(SuiteReport::new(
        Suite::Sandwich,
        violations == 0,
        json!({ "violations": violations, "min_slack": min_slack }),
        "0 violations at slack ≥ −1e-12",
        json!(summary),
    ))
}

fn trace_identity() -> Result<SuiteReport> {
    let z = z()?;
    let z2 = Group::new(GroupKind::Lattice { d: 2 })?;
    let l = Group::new(GroupKind::Lamplighter { d: 1 })?;
    let ops = [
        (uniform_ball(&z, 1)?, "quotient:lattice:d=1:m=13"),
        (uniform_ball(&z, 1)?, "quotient:lattice:d=1:m=97"),
        (uniform_ball(&z, 3)?, "quotient:lattice:d=1:m=64"),
        (stable_like(1, 1.0, 1000)?, "quotient:lattice:d=1:m=50"),
        (ball_mixture(&z, &MomentScale::power(1.0)?, 3)?.0, "quotient:lattice:d=1:m=128"),
        (FiniteMeasure::delta(z.kind(), Element::lattice(&[0]))?, "quotient:lattice:d=1:m=7"),
        (uniform_ball(&z2, 1)?, "quotient:lattice:d=2:m=8"),
        (uniform_ball(&z2, 2)?, "quotient:lattice:d=2:m=12"),
        (uniform_ball(&l, 1)?, "quotient:lamplighter:d=1:m=3"),
        (lamplighter_switch(&uniform_ball(&z, 1)?)?, "quotient:lamplighter:d=1:m=4"),
    ];
    let mut rows = Vec::new();
    let (mut worst, mut violations): (f64, usize) = (0.0, 0);
    for (phi, q) in &ops {
        let op = quotient_operator(phi, &quotient(q)?)?;
        let r = trace_identity_check(&op)?;
        worst = worst.max(r.max_discrepancy);
        violations += r.violations;
        rows.push(json!({ "operator": op.label(), "size": op.size(), "max_discrepancy": r.max_discrepancy }));
    }
    let pass = violations == 0 && worst <= 1e-10;
    Ok(SuiteReport::new(
        Suite::TraceIdentity,
        pass,
        json!({ "operators": ops.len(), "max_discrepancy": worst }),
        "discrepancy ≤ 1e-10 on every operator",
        json!(rows),
    ))
}

/// A symmetric measure on `Z` with random weights on `[−r, r]`.
pub fn random_symmetric_measure(rng: &mut ChaCha8Rng, r: i64) -> Result<FiniteMeasure> {
    let kind = GroupKind::Lattice { d: 1 };
    let mut atoms = vec![(Element::lattice(&[0]), rng.gen_range(0.0..1.0))];
    for k in 1..=r {
        let w: f64 = rng.gen_range(0.05..1.0);
        atoms.push((Element::lattice(&[k]), w));
        atoms.push((Element::lattice(&[-k]), w));
    }
    Ok(FiniteMeasure::normalized(kind, atoms)?.symmetrized())
}

/// `½(δ_e + μ)`.
pub fn lazy_measure(mu: &FiniteMeasure) -> Result<FiniteMeasure> {
    let mut atoms: Vec<(Element, f64)> = mu.atoms().iter().map(|(g, w)| (g.clone(), 0.5 * w)).collect();
    atoms.push((mu.kind().identity(), 0.5));
    Ok(FiniteMeasure::normalized(mu.kind(), atoms)?.symmetrized())
}

/// Pairs with `I − T₁ ≤ 2(I − T₂)` and `T₂ ≥ 0`: either `T₁ = P_μ` with
/// `T₂` its lazy version, or `T₁ = T₂²` with `T₂` lazy.
fn spectral_comparison(seed: u64) -> Result<SuiteReport> {
    let q = quotient("quotient:lattice:d=1:m=64")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let (mut violations, mut uncertified, mut worst) = (0usize, 0usize, f64::NEG_INFINITY);
    for i in 0..20 {
        let r = rng.gen_range(1..=8);
        let mu = random_symmetric_measure(&mut rng, r)?;
        let lazy = lazy_measure(&mu)?;
        let (t1, kind) = if i % 2 == 0 {
            (mu.clone(), "P vs lazy P")
        } else {
            (convolve(&lazy, &lazy, 0.0)?.symmetrized(), "lazy² vs lazy")
        };
        let op1 = quotient_operator(&t1, &q)?;
        let op2 = quotient_operator(&lazy, &q)?;
        let report = comparison_check(&op1, &op2, 2.0, defaults::COMPARISON_N_MAX)?;
        violations += report.violations;
        uncertified += usize::from(!report.certified);
        worst = worst.max(report.max_excess);
        rows.push(json!({
            "pair": i,
            "kind": kind,
            "radius": r,
            "certified": report.certified,
            "form_min_eigenvalue": report.form_min_eigenvalue,
            "t2_min_eigenvalue": report.t2_min_eigenvalue,
            "max_excess": report.max_excess,
            "violations": report.violations,
            "explicit_bound_violations": report.explicit_bound_violations,
            "best": report.best,
        }));
    }
    Ok(SuiteReport::new(
        Suite::SpectralComparison,
        violations == 0 && uncertified == 0,
        json!({ "pairs": 20, "uncertified": uncertified, "violations": violations, "max_excess": worst }),
        "20 certified pairs, 0 violations",
        json!(rows),
    ))
}

fn mixture_bound() -> Result<SuiteReport> {
    let z = z()?;
    let (phi, spec) = ball_mixture(&z, &MomentScale::power(1.0)?, defaults::MIXTURE_LEVELS)?;
    let mut power = phi.clone();
    let mut rows = Vec::new();
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    for n in 1..=64u64 {
        if n > 1 {
            power = convolve(&power, &phi, 0.0)?;
        }
        let sup = power.max_weight();
        let bound = mixture_sup_bound(&spec, n);
        if sup > bound * (1.0 + 1e-12) {
            violations += 1;
        }
        min_margin = min_margin.min(bound - sup);
        rows.push(json!({ "n": n, "sup": sup, "bound": bound }));
    }
    let two = MixtureSpec::new(&z, vec![1, 4], vec![0.5, 0.5])?;
    let hand_bound = format!("{:.4}", mixture_sup_bound(&two, 1));
    let hand_sup = format!("{:.4}", two.measure(&z)?.max_weight());
    let hand_ok = hand_bound == "0.2459" && hand_sup == "0.2222";
    Ok(SuiteReport::new(
        Suite::MixtureBound,
        violations == 0 && hand_ok,
        json!({ "violations": violations, "min_margin": min_margin, "two_level": [hand_bound, hand_sup] }),
        "0 violations for n ≤ 64; two-level values 0.2459 and 0.2222",
        json!({ "levels": spec.levels(), "radii": spec.radii(), "p": spec.p(), "rows": rows }),
    ))
}

fn gamma_alpha_table() -> Result<SuiteReport> {
    let alphas: Vec<f64> = (1..=20).map(|k| k as f64 / 10.0).collect();
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for d in 1..=5u32 {
        let d = d as f64;
        for &a in &alphas {
            let err = (gamma_alpha(d / (d + 2.0), a)? - d / (d + a)).abs();
            worst = worst.max(err);
            rows.push(json!({ "gamma": format!("{d}/({d}+2)"), "alpha": a, "error": err }));
        }
    }
    for &a in &alphas {
        let err = (gamma_alpha(1.0 / 3.0, a)? - 1.0 / (1.0 + a)).abs();
        worst = worst.max(err);
        rows.push(json!({ "gamma": "1/3", "alpha": a, "error": err }));
    }
    Ok(SuiteReport::new(Suite::GammaAlphaTable, worst < 1e-12, json!(worst), "max error < 1e-12", json!(rows)))
}

const LAMPLIGHTER_NS: [u64; 4] = [16, 32, 64, 128];
const LAMPLIGHTER_SAMPLES: usize = 200_000;
const EXP_POW_WINDOW: (f64, f64) = (0.35, 0.65);

fn lamplighter_base() -> Result<FiniteMeasure> {
    stable_like(1, 1.0, defaults::STABLE_CUTOFF)
}

/// Fits exp-pow to four `(n, estimate)` points, or explains why not.
fn exp_pow_report(suite: Suite, points: &[(f64, f64)], rows: Vec<Value>) -> SuiteReport {
    let target = format!("exp-pow in [{}, {}]", EXP_POW_WINDOW.0, EXP_POW_WINDOW.1);
    let empty: Vec<u64> = points.iter().filter(|p| !(p.1 > 0.0)).map(|p| p.0 as u64).collect();
    if !empty.is_empty() {
        return SuiteReport::new(
            suite,
            false,
            json!(null),
            target,
            json!({ "reason": format!("no positive estimate at n = {empty:?}"), "estimates": rows }),
        );
    }
    match fit_values_min(points, DecayModel::ExpPow, 4) {
        Ok(fit) => SuiteReport::new(
            suite,
            fit.exponent >= EXP_POW_WINDOW.0 && fit.exponent <= EXP_POW_WINDOW.1,
            json!(fit.exponent),
            target,
            json!({ "fit": fit_json(&fit), "estimates": rows }),
        ),
        Err(e) => SuiteReport::new(suite, false, json!(null), target, json!({ "reason": e.to_string(), "estimates": rows })),
    }
}

fn lamplighter_collisions(seed: u64) -> Result<SuiteReport> {
    let q = lamplighter_switch(&lamplighter_base()?)?;
    let mut points = Vec::new();
    let mut rows = Vec::new();
    for n in LAMPLIGHTER_NS {
        let c = collision_return_estimate(&q, n, LAMPLIGHTER_SAMPLES, seed)?;
        points.push((n as f64, c.estimate));
        rows.push(json!(c));
    }
    Ok(exp_pow_report(Suite::LamplighterExpPow, &points, rows))
}

/// Same points as the collision suite: `q^(2n)(e)` from `2n` base steps.
fn lamplighter_range_identity(seed: u64) -> Result<SuiteReport> {
    let base = lamplighter_base()?;
    let mut points = Vec::new();
    let mut rows = Vec::new();
    for n in LAMPLIGHTER_NS {
        let r = lamplighter_range_estimate(&base, 2 * n, LAMPLIGHTER_SAMPLES, seed)?;
        points.push((n as f64, r.estimate));
        rows.push(json!({ "n": n, "steps": r.n, "estimate": r.estimate, "stderr": r.stderr, "tv_bias_bound": r.tv_bias_bound }));
    }
    Ok(exp_pow_report(Suite::LamplighterRangeIdentity, &points, rows))
}

fn interpolation(seed: u64) -> Result<SuiteReport> {
    let q = quotient("quotient:lattice:d=1:m=128")?;
    let mu = quotient_operator(&stable_like(1, 1.0, defaults::STABLE_CUTOFF)?, &q)?;
    let phi0 = quotient_operator(&uniform_ball(&z()?, 1)?, &q)?;
    let r = interpolation_check(
        &mu,
        &phi0,
        &Symbol::power(0.5)?,
        &WeightKernel::for_power_symbol(0.5)?,
        &MomentScale::power(1.0)?,
        defaults::INTERPOLATION_TRIALS,
        seed,
    )?;
    Ok(SuiteReport::new(
        Suite::Interpolation,
        r.violations == 0 && r.max_ratio <= 1.0,
        json!({ "max_ratio": r.max_ratio, "violations": r.violations }),
        "max ratio ≤ 1, 0 violations",
        json!(r),
    ))
}

fn range_scaling(seed: u64) -> Result<SuiteReport> {
    let ns: Vec<u64> = (6..=12).map(|k| 1u64 << k).collect();
    let samples = range_profile(&uniform_ball(&z()?, 1)?, &ns, defaults::RANGE_WALKS, &[], seed)?;
    // −log(1/E[D_n]) = log E[D_n], so the power slope is the range slope.
    let points: Vec<(f64, f64)> = samples.iter().map(|s| (s.n as f64, 1.0 / s.mean)).collect();
    let fit = fit_values(&points, DecayModel::Power)?;
    let rows: Vec<Value> =
        samples.iter().map(|s| json!({ "n": s.n, "mean": s.mean, "stderr": s.mean_stderr() })).collect();
    Ok(SuiteReport::new(
        Suite::RangeScaling,
        fit.contains(0.5, 0.05),
        json!(fit.exponent),
        "0.50 ± 0.05",
        json!({ "fit": fit_json(&fit), "walks": defaults::RANGE_WALKS, "ranges": rows }),
    ))
}
