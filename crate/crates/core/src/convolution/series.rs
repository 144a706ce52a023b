use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{convolve, product_deficit, DenseGrid};
use crate::error::{Error, Result};
use crate::measures::{compensated_sum, FiniteMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Convolution powers with tracked deficit.
    Exact,
    /// The ball-mixture sup-norm bound.
    MixtureBound,
    /// Collision estimates; `lower`/`upper` are ±2 standard errors.
    MonteCarlo,
    /// Quadrature of the Fourier symbol on `Z`.
    Fourier,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MixtureBound => "mixture-bound",
            Method::MonteCarlo => "monte-carlo",
            Method::Fourier => "fourier",
        }
    }
}

/// Bounds on `φ^{(n)}(e)` at one even `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub n: u64,
    pub lower: f64,
    pub upper: f64,
    pub method: Method,
}

impl SeriesRecord {
    /// Geometric mean of the bracket.
    pub fn center(&self) -> f64 {
        (self.lower * self.upper).sqrt()
    }

    /// `(upper − lower) / lower`.
    pub fn relative_width(&self) -> f64 {
        (self.upper - self.lower) / self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    /// Measure description the series was computed from.
    pub spec: String,
    pub records: Vec<SeriesRecord>,
}

impl ReturnSeries {
    pub fn new(spec: impl Into<String>) -> Self {
        ReturnSeries { spec: spec.into(), records: Vec::new() }
    }

    /// `n,lower,upper,method` with shortest round-trip decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,lower,upper,method\n");
        for r in &self.records {
            writeln!(out, "{},{:e},{:e},{}", r.n, r.lower, r.upper, r.method.as_str()).expect("writing to a String");
        }
        out
    }

    pub fn get(&self, n: u64) -> Option<&SeriesRecord> {
        self.records.iter().find(|r| r.n == n)
    }
}

/// Half-powers `m ∈ {1, 2, 3, 4, 6, 8, 12, …}` up to `max_half`: the
/// powers of two and three times the powers of two.
pub fn half_power_schedule(max_half: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 1u64;
    while p <= max_half {
        out.push(p);
        if p >= 2 && p / 2 * 3 <= max_half {
            out.push(p / 2 * 3);
        }
        match p.checked_mul(2) {
            Some(q) => p = q,
            None => break,
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// A power `φ̂^{(m)}` in either representation, with its deficit.
#[derive(Clone)]
enum Power {
    Dense(DenseGrid, f64),
    Sparse(FiniteMeasure),
}

impl Power {
    fn deficit(&self) -> f64 {
        match self {
            Power::Dense(_, d) => *d,
            Power::Sparse(m) => m.deficit(),
        }
    }

    fn sum_sq(&self) -> f64 {
        match self {
            Power::Dense(g, _) => g.sum_sq(),
            Power::Sparse(m) => compensated_sum(m.atoms().iter().map(|a| a.1 * a.1)),
        }
    }

    fn max(&self) -> f64 {
        match self {
            Power::Dense(g, _) => g.max(),
            Power::Sparse(m) => m.max_weight(),
        }
    }

    fn times(&self, other: &Power, eps: f64) -> Result<Power> {
        match (self, other) {
            (Power::Dense(a, da), Power::Dense(b, db)) => {
                let (mut c, noise) = a.convolve(b)?;
                let dropped = c.drop_below(eps);
                c.crop();
                Ok(Power::Dense(c, product_deficit(*da, *db) + noise + dropped))
            }
            (Power::Sparse(a), Power::Sparse(b)) => Ok(Power::Sparse(convolve(a, b, eps)?)),
            _ => unreachable!("powers share a representation"),
        }
    }
}

/// Two-sided bounds on `φ^{(2m)}(e)` along [`half_power_schedule`].
///
/// Each `φ̂^{(m)}` comes from repeated squaring with atoms below `eps`
/// dropped. For symmetric `φ`, `φ^{(2m)}(e) = ‖φ^{(m)}‖₂²`, so `Σ φ̂^{(m)}²`
/// is a lower bound. Writing `φ^{(m)} = φ̂^{(m)} + r` with `r ≥ 0` of mass
/// at most `δ_m`, the excess `2⟨φ̂, r⟩ + ‖r‖₂²` is at most
/// `δ_m (2‖φ̂^{(m)}‖_∞ + ‖r‖_∞)`, and `‖r‖_∞ ≤ ‖φ^{(m)}‖_∞ ≤ φ^{(j)}(e)` for
/// every even `j ≤ m`.
pub fn return_series(phi: &FiniteMeasure, max_half: u64, eps: f64) -> Result<ReturnSeries> {
    if !phi.is_symmetric() {
        return Err(Error::usage("return series need a symmetric measure"));
    }
    if !(eps >= 0.0) {
        return Err(Error::usage(format!("drop threshold must be nonnegative, got {eps}")));
    }
    let base = match DenseGrid::from_measure(phi)? {
        Some(g) => Power::Dense(g, phi.deficit()),
        None => Power::Sparse(phi.clone()),
    };
    // levels[k] = φ̂^{(2^k)}
    let mut levels = vec![base];
    let mut out = ReturnSeries::new(String::new());
    // (j, upper bound on φ^{(j)}(e)) for the even j seen so far
    let mut diag_bounds: Vec<(u64, f64)> = Vec::new();
    for m in half_power_schedule(max_half) {
        let k = 63 - m.leading_zeros() as usize;
        while levels.len() <= k {
            let last = levels.last().expect("nonempty");
            let next = last.times(last, eps)?;
            levels.push(next);
        }
        let power = if m.is_power_of_two() {
            levels[k].clone()
        } else {
            levels[k].times(&levels[k - 1], eps)?
        };
        let lower = power.sum_sq();
        let delta = power.deficit();
        let upper = if delta > 0.0 {
            let sup = diag_bounds.iter().filter(|(j, _)| *j <= m).map(|b| b.1).fold(1.0, f64::min);
            lower + delta * (2.0 * power.max() + sup)
        } else {
            lower
        };
        out.records.push(SeriesRecord { n: 2 * m, lower, upper, method: Method::Exact });
        diag_bounds.push((2 * m, upper));
        // Later half-powers only use the two newest levels.
        for l in levels.iter_mut().take(k.saturating_sub(1)) {
            *l = Power::Dense(DenseGrid::zeros(Vec::new(), Vec::new())?, 0.0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::{exact_return_series, RationalMeasure};
    use crate::groups::{Element, Group, GroupKind};
    use crate::measures::uniform_ball;
    use approx::assert_relative_eq;
    use num_traits::ToPrimitive;

    #[test]
    fn schedule() {
        assert_eq!(half_power_schedule(1), vec![1]);
        assert_eq!(half_power_schedule(13), vec![1, 2, 3, 4, 6, 8, 12]);
        assert_eq!(half_power_schedule(16), vec![1, 2, 3, 4, 6, 8, 12, 16]);
    }

    #[test]
    fn trinomial_series() {
        let z = Group::new(GroupKind::Lattice { d: 1 }).unwrap();
        let s = return_series(&uniform_ball(&z, 1).unwrap(), 2, 0.0).unwrap();
        assert_eq!(s.records.len(), 2);
        assert_relative_eq!(s.records[0].lower, 1.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(s.records[1].lower, 19.0 / 81.0, max_relative = 1e-15);
        assert!(s.records.iter().all(|r| r.lower == r.upper));
        assert!(s.to_csv().starts_with("n,lower,upper,method\n2,"));
    }

    #[test]
    fn point_mass_never_leaves() {
        let k = GroupKind::Free { k: 2 };
        let s = return_series(&FiniteMeasure::delta(k, Element::free_word(&[])).unwrap(), 64, 0.0).unwrap();
        assert!(s.records.iter().all(|r| r.lower == 1.0 && r.upper == 1.0));
    }

    #[test]
    fn sparse_route_matches_exact_arithmetic() {
        let f = Group::new(GroupKind::Free { k: 2 }).unwrap();
        let phi = uniform_ball(&f, 1).unwrap();
        let float = return_series(&phi, 4, 0.0).unwrap();
        let exact = exact_return_series(&RationalMeasure::uniform_ball(&f, 1).unwrap(), 4).unwrap();
        for (r, (n, e)) in float.records.iter().zip(exact) {
            assert_eq!(r.n, n);
            assert_relative_eq!(r.lower, e.to_f64().unwrap(), max_relative = 1e-13);
        }
    }

    #[test]
    fn planar_bracket_is_tight() {
        let z2 = Group::new(GroupKind::Lattice { d: 2 }).unwrap();
        let phi = uniform_ball(&z2, 1).unwrap();
        let s = return_series(&phi, 256, 1e-14).unwrap();
        let r = s.get(512).unwrap();
        assert!(r.upper - r.lower < 1e-8);
        let exact = return_series(&phi, 8, 0.0).unwrap();
        let small = return_series(&phi, 8, 1e-14).unwrap();
        for (a, b) in exact.records.iter().zip(&small.records) {
            assert!(b.lower <= a.lower * (1.0 + 1e-12) && a.lower <= b.upper * (1.0 + 1e-12));
        }
        for w in s.records.windows(2) {
            assert!(w[1].lower <= w[0].lower);
        }
    }

    #[test]
    fn rejects_asymmetric_measures() {
        let k = GroupKind::Lattice { d: 1 };
        let d = FiniteMeasure::delta(k, Element::lattice(&[1])).unwrap();
        assert!(return_series(&d, 4, 0.0).is_err());
    }
}
