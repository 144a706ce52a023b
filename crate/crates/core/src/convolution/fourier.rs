use std::f64::consts::PI;

use rayon::prelude::*;

use super::series::{half_power_schedule, Method, ReturnSeries, SeriesRecord};
use crate::defaults;
use crate::error::{Error, Result};
use crate::measures::FourierSymbol;
use crate::quadrature::{gk15_apply, gk15_nodes};

#[derive(Debug, Clone, Copy)]
pub struct FourierOptions {
    /// Target relative quadrature error per power.
    pub rel_tol: f64,
    /// Innermost panel edge next to `0` and `π`.
    pub theta_min: f64,
    pub max_rounds: usize,
}

impl Default for FourierOptions {
    fn default() -> Self {
        FourierOptions { rel_tol: defaults::QUADRATURE_REL_TOL, theta_min: 1e-9, max_rounds: 40 }
    }
}

const MAX_PANELS: usize = 200_000;

struct Panel {
    a: f64,
    b: f64,
    /// `ln |φ̂|` at the Kronrod nodes.
    log_abs: [f64; 15],
}

impl Panel {
    fn new(a: f64, b: f64, symbol: &dyn FourierSymbol) -> Self {
        let nodes = gk15_nodes(a, b);
        let mut log_abs = [0.0; 15];
        for (l, &t) in log_abs.iter_mut().zip(&nodes) {
            let x = symbol.one_minus(t);
            *l = if x < 1.0 { (-x).ln_1p() } else { (1.0 - x).abs().ln() };
        }
        Panel { a, b, log_abs }
    }

    /// `∫ |φ̂|^p` over the panel and its error estimate.
    fn moment(&self, p: u64) -> (f64, f64) {
        let v: [f64; 15] = std::array::from_fn(|i| (p as f64 * self.log_abs[i]).exp());
        gk15_apply(&v, self.a, self.b)
    }
}

/// Panels graded geometrically toward both `0` and `π`, where `φ̂` may
/// approach `±1`.
fn initial_edges(theta_min: f64) -> Vec<f64> {
    let mut left = vec![0.0];
    let mut t = theta_min;
    while t < 0.5 * PI {
        left.push(t);
        t *= 2.0;
    }
    let mut edges = left.clone();
    edges.push(0.5 * PI);
    edges.extend(left.iter().rev().map(|&x| PI - x));
    edges
}

/// `(1/π) ∫₀^π φ̂(θ)^p dθ` for each even `p` in `powers`, with error
/// estimates, sharing symbol evaluations across powers.
fn return_integrals(symbol: &dyn FourierSymbol, powers: &[u64], opts: FourierOptions) -> Result<Vec<(f64, f64)>> {
    let edges = initial_edges(opts.theta_min);
    let mut panels: Vec<Panel> = edges.windows(2).collect::<Vec<_>>().par_iter().map(|w| Panel::new(w[0], w[1], symbol)).collect();
    for _ in 0..opts.max_rounds {
        let per_panel: Vec<Vec<(f64, f64)>> = panels.iter().map(|p| powers.iter().map(|&q| p.moment(q)).collect()).collect();
        let totals: Vec<(f64, f64)> = (0..powers.len())
            .map(|j| per_panel.iter().fold((0.0, 0.0), |acc, v| (acc.0 + v[j].0, acc.1 + v[j].1)))
            .collect();
        if totals.iter().any(|(v, e)| !(v.is_finite() && e.is_finite())) {
            return Err(Error::numeric(format!("symbol of {} is not finite on [0, π]", symbol.describe())));
        }
        if totals.iter().all(|(v, e)| *e <= opts.rel_tol * v.abs()) {
            return Ok(totals.into_iter().map(|(v, e)| (v / PI, e / PI)).collect());
        }
        // Split every panel carrying more than its share of some power's error budget.
        let share = |i: usize| {
            (0..powers.len())
                .map(|j| per_panel[i][j].1 / (opts.rel_tol * totals[j].0.abs()).max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max)
                * panels.len() as f64
        };
        let split: Vec<bool> = (0..panels.len()).map(|i| share(i) > 1.0).collect();
        if panels.len() + split.iter().filter(|s| **s).count() > MAX_PANELS {
            break;
        }
        let old = std::mem::take(&mut panels);
        let jobs: Vec<(f64, f64, Option<Panel>)> = old
            .into_iter()
            .zip(split)
            .flat_map(|(p, s)| {
                if s {
                    let mid = 0.5 * (p.a + p.b);
                    vec![(p.a, mid, None), (mid, p.b, None)]
                } else {
                    vec![(p.a, p.b, Some(p))]
                }
            })
            .collect();
        panels = jobs
            .into_par_iter()
            .map(|(a, b, keep)| keep.unwrap_or_else(|| Panel::new(a, b, symbol)))
            .collect();
    }
    Err(Error::numeric("Fourier quadrature did not reach its tolerance"))
}

/// Two-sided bounds on `φ^{(2m)}(0)` for a symmetric measure on `Z` given
/// by its symbol.
///
/// The value of the represented (truncated) measure is
/// `(1/π)∫₀^π φ̂^{2m}`, a lower bound for the full measure. The upper bound
/// adds the quadrature error and the deficit term
/// `δ_m (2‖φ̂^{(m)}‖_∞ + min_{even j≤m} φ^{(j)}(0))` with
/// `δ_m = 1 − (1−δ)^m` and `‖φ̂^{(m)}‖_∞ ≤ φ̂^{(m)}(0)` for even `m`.
pub fn fourier_return_series(symbol: &dyn FourierSymbol, max_half: u64, opts: FourierOptions) -> Result<ReturnSeries> {
    let schedule = half_power_schedule(max_half);
    let sup_power = |m: u64| if m % 2 == 0 { m } else { m - 1 };
    let mut powers: Vec<u64> = schedule.iter().flat_map(|&m| [2 * m, sup_power(m)]).filter(|&p| p > 0).collect();
    powers.sort_unstable();
    powers.dedup();
    let values = return_integrals(symbol, &powers, opts)?;
    let at = |p: u64| values[powers.binary_search(&p).expect("requested power")];
    let delta = symbol.deficit();
    let mut out = ReturnSeries::new(symbol.describe());
    let mut diag_bounds: Vec<(u64, f64)> = Vec::new();
    for m in schedule {
        let (v, e) = at(2 * m);
        let lower = (v - e).max(0.0);
        let mut upper = v + e;
        if delta > 0.0 {
            let delta_m = -(m as f64 * (-delta).ln_1p()).exp_m1();
            let sup_hat = match sup_power(m) {
                0 => 1.0,
                p => {
                    let (v, e) = at(p);
                    (v + e).min(1.0)
                }
            };
            let sup = diag_bounds.iter().filter(|(j, _)| *j <= m).map(|b| b.1).fold(1.0, f64::min);
            upper += delta_m * (2.0 * sup_hat + sup);
        }
        out.records.push(SeriesRecord { n: 2 * m, lower, upper, method: Method::Fourier });
        diag_bounds.push((2 * m, upper));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::return_series;
    use crate::groups::{Group, GroupKind};
    use crate::measures::{stable_like, subordinate, uniform_ball, LineSymbol, SubordinatedSymbol};

    #[test]
    fn matches_convolution_for_the_lazy_walk() {
        let mu = uniform_ball(&Group::new(GroupKind::Lattice { d: 1 }).unwrap(), 1).unwrap();
        let exact = return_series(&mu, 512, 0.0).unwrap();
        let four = fourier_return_series(&LineSymbol::new(&mu).unwrap(), 512, FourierOptions::default()).unwrap();
        for (a, b) in exact.records.iter().zip(&four.records) {
            assert_eq!(a.n, b.n);
            assert!(b.lower <= a.lower * (1.0 + 1e-12) && a.upper <= b.upper * (1.0 + 1e-12), "{a:?} {b:?}");
            assert!(b.relative_width() < 3e-6);
        }
    }

    #[test]
    fn brackets_the_truncated_stable_law() {
        let mu = stable_like(1, 1.0, 2000).unwrap();
        let four = fourier_return_series(&LineSymbol::new(&mu).unwrap(), 64, FourierOptions::default()).unwrap();
        let exact = return_series(&mu, 64, 0.0).unwrap();
        for (a, b) in exact.records.iter().zip(&four.records) {
            assert!(b.lower <= a.lower * (1.0 + 1e-9));
            assert!(a.lower <= b.upper);
        }
    }

    #[test]
    fn subordinated_symbol_brackets_the_explicit_series() {
        let base = uniform_ball(&Group::new(GroupKind::Lattice { d: 1 }).unwrap(), 1).unwrap();
        let explicit = subordinate(&base, 0.5, Some(2000), 0.0).unwrap();
        let exact = return_series(&explicit, 32, 0.0).unwrap();
        let lazy = SubordinatedSymbol::new(LineSymbol::new(&base).unwrap(), 0.5, 2000).unwrap();
        let four = fourier_return_series(&lazy, 32, FourierOptions::default()).unwrap();
        for (a, b) in exact.records.iter().zip(&four.records) {
            assert!((a.lower - b.lower).abs() <= 1e-5 * a.lower, "{a:?} {b:?}");
            assert!(a.upper <= b.upper * (1.0 + 1e-5));
        }
    }
}
