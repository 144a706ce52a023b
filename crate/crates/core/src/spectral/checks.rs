use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use serde_json::json;

use super::{functional_calculus, spectral_distance, spectral_profile, QuotientOperator, SpectralProfile};
use crate::defaults;
use crate::error::{Error, Result};
use crate::measures::compensated_sum;
use crate::scales::Symbol;

/// Powers at which the trace identity is compared.
pub const TRACE_POWERS: [u32; 5] = [1, 2, 4, 8, 16];

#[derive(Debug, Clone, Serialize)]
pub struct TraceIdentityReport {
    pub check: &'static str,
    pub params: serde_json::Value,
    pub powers: Vec<u32>,
    /// `|(Mⁿ)[e][e] − (1/|G|) Σ λⁿ|`, one entry per power.
    pub discrepancies: Vec<f64>,
    pub max_discrepancy: f64,
    pub violations: usize,
}

/// Matrix-power diagonal against the eigenvalue sum at [`TRACE_POWERS`].
pub fn trace_identity_check(op: &QuotientOperator) -> Result<TraceIdentityReport> {
    let profile = spectral_profile(op)?;
    let discrepancies: Vec<f64> =
        TRACE_POWERS.iter().map(|&n| (op.return_probability(n) - profile.trace_power(n)).abs()).collect();
    let max_discrepancy = discrepancies.iter().copied().fold(0.0, f64::max);
    Ok(TraceIdentityReport {
        check: "trace-identity",
        params: json!({ "operator": op.label(), "size": op.size() }),
        powers: TRACE_POWERS.to_vec(),
        violations: discrepancies.iter().filter(|&&d| d > defaults::SPECTRAL_TOL).count(),
        discrepancies,
        max_discrepancy,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichRow {
    pub n: u32,
    pub lower: f64,
    pub exact: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub check: &'static str,
    pub params: serde_json::Value,
    pub n_range: (u32, u32),
    /// Smallest of `exact − lower` and `upper − exact` over all `n`.
    pub min_slack: f64,
    pub tolerance: f64,
    pub violations: usize,
    pub rows: Vec<SandwichRow>,
}

/// `Σ_{λ≥0} λ^{2n} ≤ Σ λ^{2n} ≤ 2 Σ_{λ≥0} λ^{2(n−1)}`, all sums over `|G|`,
/// for `1 ≤ n ≤ n_max`.
pub fn sandwich_check(profile: &SpectralProfile, n_max: u32, tolerance: f64) -> Result<SandwichReport> {
    if profile.deficit().abs() > 1e-12 {
        return Err(Error::usage(format!(
            "the sandwich needs a probability measure, deficit is {:e}",
            profile.deficit()
        )));
    }
    if n_max == 0 {
        return Err(Error::usage("n_max must be positive"));
    }
    let size = profile.size() as f64;
    let nonneg: Vec<f64> = profile.eigenvalues().iter().copied().filter(|&l| l >= 0.0).collect();
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut min_slack = f64::INFINITY;
    let mut violations = 0;
    for n in 1..=n_max {
        let p = 2 * n as i32;
        let lower = compensated_sum(nonneg.iter().map(|l| l.powi(p))) / size;
        let upper = 2.0 * compensated_sum(nonneg.iter().map(|l| l.powi(p - 2))) / size;
        let exact = profile.trace_power(2 * n);
        let slack = (exact - lower).min(upper - exact);
        if slack < -tolerance {
            violations += 1;
        }
        min_slack = min_slack.min(slack);
        rows.push(SandwichRow { n, lower, exact, upper });
    }
    Ok(SandwichReport {
        check: "sandwich",
        params: json!({ "size": profile.size() }),
        n_range: (1, n_max),
        min_slack,
        tolerance,
        violations,
        rows,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FunctionalCalculusReport {
    pub check: &'static str,
    pub params: serde_json::Value,
    pub n_range: (u32, u32),
    /// Distance between the spectrum of the new matrix and `1 − ψ(1 − λ)`.
    pub eigenvalue_map_error: f64,
    /// `a = ψ(2) − 1`.
    pub a: f64,
    /// Largest `|τ(T_ψⁿ) − ∫₀¹(1−s)ⁿ dN^ψ(s)| − aⁿ`.
    pub max_excess: f64,
    pub violations: usize,
}

/// Checks the eigenvalue map of `T_ψ` by an independent eigensolve, and
/// that the negative part of its spectrum contributes at most `aⁿ` to
/// `τ(T_ψⁿ)`.
pub fn functional_calculus_check(op: &QuotientOperator, psi: &Symbol, n_max: u32) -> Result<FunctionalCalculusReport> {
    let base = spectral_profile(op)?;
    let (t, mapped) = functional_calculus(op, psi)?;
    let solved = spectral_profile(&t)?;
    let mut expected: Vec<f64> = base.eigenvalues().iter().map(|&l| 1.0 - psi.eval((1.0 - l).clamp(0.0, 2.0))).collect();
    expected.sort_by(|a, b| b.total_cmp(a));
    let map_error = spectral_distance(solved.eigenvalues(), &expected).max(spectral_distance(mapped.eigenvalues(), &expected));
    let a = psi.eval(2.0) - 1.0;
    let size = mapped.size() as f64;
    let mut max_excess = f64::NEG_INFINITY;
    let mut violations = usize::from(map_error > defaults::SPECTRAL_TOL);
    for n in 1..=n_max {
        let full = solved.trace_power(n);
        let positive = compensated_sum(solved.eigenvalues().iter().filter(|&&l| l >= 0.0).map(|l| l.powi(n as i32))) / size;
        let excess = (full - positive).abs() - a.powi(n as i32);
        if excess > 1e-12 {
            violations += 1;
        }
        max_excess = max_excess.max(excess);
    }
    Ok(FunctionalCalculusReport {
        check: "functional-calculus",
        params: json!({ "operator": op.label(), "symbol": psi.name() }),
        n_range: (1, n_max),
        eigenvalue_map_error: map_error,
        a,
        max_excess,
        violations,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FrontierPoint {
    pub c2: f64,
    /// Smallest `C₁` with `τ(T₂^{2n}) ≤ C₁(τ(T₁^{2⌊n/C₂⌋}) + e^{−n/C₂})`
    /// for every `n` up to the horizon.
    pub c1: f64,
}

/// Candidate values of `C₂` on the constant frontier.
pub const FRONTIER_C2: [f64; 10] = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 32.0];

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub check: &'static str,
    pub params: serde_json::Value,
    /// `λ_min(C(I−T₂) − (I−T₁))`.
    pub form_min_eigenvalue: f64,
    /// `λ_min(T₂)`.
    pub t2_min_eigenvalue: f64,
    /// Both certificates hold to [`defaults::SPECTRAL_TOL`].
    pub certified: bool,
    pub status: &'static str,
    pub grid_points: usize,
    /// Largest `N₂(s) − N₁(Cs)` on the grid.
    pub max_excess: f64,
    pub violations: usize,
    pub n_range: (u32, u32),
    /// Violations of the explicit bound with `k₀ = 1`, evaluated when
    /// both operators are nonnegative.
    pub explicit_bound_violations: Option<usize>,
    pub frontier: Vec<FrontierPoint>,
    /// The frontier point with the smallest product `C₁C₂`.
    pub best: Option<FrontierPoint>,
}

/// Compares the spectral profiles of `T₁` and `T₂` under `I−T₁ ≤ C(I−T₂)`.
///
/// An uncertified pair gives a report with status `precondition-not-met`
/// rather than an error. The grid comparison allows eigenvalue rounding
/// of [`defaults::SPECTRAL_TOL`] in the argument of `N₁`.
pub fn comparison_check(op1: &QuotientOperator, op2: &QuotientOperator, c: f64, n_max: u32) -> Result<ComparisonReport> {
    if op1.size() != op2.size() || op1.quotient().kind() != op2.quotient().kind() {
        return Err(Error::usage("comparison needs two operators on the same quotient"));
    }
    if !(c >= 1.0) {
        return Err(Error::domain(format!("comparison constant must be at least 1, got {c}")));
    }
    let (p1, p2) = (spectral_profile(op1)?, spectral_profile(op2)?);
    let n = op1.size();
    let id = DMatrix::<f64>::identity(n, n);
    let form = (&id - op2.matrix()) * c - (&id - op1.matrix());
    let form_min = SymmetricEigen::new(form).eigenvalues.min();
    let t2_min = p2.eigenvalues()[n - 1];
    let tol = defaults::SPECTRAL_TOL;
    let certified = form_min >= -tol && t2_min >= -tol;
    let params = json!({ "t1": op1.label(), "t2": op2.label(), "C": c, "size": n });
    let grid_points = 1000;
    let mut report = ComparisonReport {
        check: "comparison",
        params,
        form_min_eigenvalue: form_min,
        t2_min_eigenvalue: t2_min,
        certified,
        status: "precondition-not-met",
        grid_points,
        max_excess: 0.0,
        violations: 0,
        n_range: (1, n_max),
        explicit_bound_violations: None,
        frontier: Vec::new(),
        best: None,
    };
    if !certified {
        return Ok(report);
    }
    let mut max_excess = f64::NEG_INFINITY;
    for j in 1..=grid_points {
        let s = j as f64 / (grid_points + 1) as f64;
        let excess = p2.counting(s) - p1.counting(c * s + tol);
        if excess > 0.0 {
            report.violations += 1;
        }
        max_excess = max_excess.max(excess);
    }
    report.max_excess = max_excess;

    let t1 = |k: u32| p1.trace_power(k);
    let t2 = |k: u32| p2.trace_power(k);
    if p1.eigenvalues()[n - 1] >= -tol {
        let mut bad = 0;
        for k in 1..=2 * n_max {
            let kf = k as f64;
            let bound = 2.0 * c * c * t1((kf / (2.0 * c)).floor() as u32)
                + 2.0 * (-kf / (16.0 * c) + 0.125).exp() * (t2(1) + 2.0 * c * c * t1(1));
            if t2(k) > bound * (1.0 + 1e-12) {
                bad += 1;
            }
        }
        report.explicit_bound_violations = Some(bad);
    }
    for &c2 in &FRONTIER_C2 {
        let c1 = (1..=n_max)
            .map(|k| {
                let kf = k as f64;
                t2(2 * k) / (t1(2 * (kf / c2).floor() as u32) + (-kf / c2).exp())
            })
            .fold(0.0, f64::max);
        report.frontier.push(FrontierPoint { c2, c1 });
    }
    report.best = report.frontier.iter().copied().min_by(|a, b| (a.c1 * a.c2).total_cmp(&(b.c1 * b.c2)));
    report.status = if report.violations == 0 { "pass" } else { "fail" };
    Ok(report)
}
