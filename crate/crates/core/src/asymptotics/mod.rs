//! Decay-exponent fits and the exponents predicted for each group class.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::convolution::{Method, ReturnSeries};
use crate::defaults;
use crate::error::{Error, Result};
use crate::groups::GroupKind;
use crate::scales::{gamma_alpha, MomentScale, ScaleFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayModel {
    /// `φ ≈ n^{−p}`: slope of `log φ` against `log n`.
    Power,
    /// `φ ≈ exp(−n^γ)`: slope of `log(−log φ)` against `log n`.
    ExpPow,
    /// `φ ≈ exp(−(log n)^κ)`: slope of `log(−log φ)` against `log log n`.
    ExpPlg,
}

impl DecayModel {
    pub fn as_str(self) -> &'static str {
        match self {
            DecayModel::Power => "power",
            DecayModel::ExpPow => "exp-pow",
            DecayModel::ExpPlg => "exp-plg",
        }
    }

    /// `(x, y)` coordinates in which the model is a line of slope
    /// `±exponent`; `None` where the transform is undefined.
    fn transform(self, n: f64, value: f64) -> Option<(f64, f64)> {
        if !(value > 0.0 && n > 1.0) {
            return None;
        }
        let l = value.ln();
        match self {
            DecayModel::Power => Some((n.ln(), -l)),
            DecayModel::ExpPow => (l < 0.0).then(|| (n.ln(), (-l).ln())),
            DecayModel::ExpPlg => (l < 0.0).then(|| (n.ln().ln(), (-l).ln())),
        }
    }
}

impl fmt::Display for DecayModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecayModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "power" => Ok(DecayModel::Power),
            "exp-pow" => Ok(DecayModel::ExpPow),
            "exp-plg" => Ok(DecayModel::ExpPlg),
            other => Err(Error::parse(other, "expected power, exp-pow or exp-plg")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub model: DecayModel,
    pub exponent: f64,
    /// Twice the standard error of the slope.
    pub half_width: f64,
    pub n_range: (f64, f64),
    pub points: usize,
    pub r_squared: f64,
}

impl FitResult {
    pub fn contains(&self, target: f64, tolerance: f64) -> bool {
        (self.exponent - target).abs() <= tolerance
    }
}

/// Least-squares slope of `y` on `x`: `(slope, stderr, R²)`.
fn regression(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let sse: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let stderr = if pts.len() > 2 { (sse / (k - 2.0) / sxx).sqrt() } else { f64::INFINITY };
    let r2 = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    (slope, stderr, r2)
}

/// Fits `model` to `(n, value)` pairs. Needs at least five usable points.
pub fn fit_values(points: &[(f64, f64)], model: DecayModel) -> Result<FitResult> {
    fit_values_min(points, model, 5)
}

/// [`fit_values`] with a different minimum point count, at least three so
/// that the slope has a standard error.
pub fn fit_values_min(points: &[(f64, f64)], model: DecayModel, min_points: usize) -> Result<FitResult> {
    if min_points < 3 {
        return Err(Error::usage(format!("a fit needs at least 3 points, asked for {min_points}")));
    }
    let mut pts = Vec::with_capacity(points.len());
    for &(n, v) in points {
        match model.transform(n, v) {
            Some(p) => pts.push(p),
            None => {
                return Err(Error::domain(format!("value {v:e} at n = {n} cannot be fitted by the {model} model")))
            }
        }
    }
    if pts.len() < min_points {
        return Err(Error::usage(format!("a {model} fit needs at least {min_points} points, got {}", pts.len())));
    }
    let (slope, stderr, r_squared) = regression(&pts);
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        model,
        exponent: slope,
        half_width: 2.0 * stderr,
        n_range: (lo, hi),
        points: pts.len(),
        r_squared,
    })
}

/// Fits `model` to the records of `series` with `n` in `[lo, hi]`.
///
/// Brackets use their geometric mean and must be narrower than
/// [`defaults::FIT_MAX_BRACKET`]. Monte Carlo records carry `±2σ`
/// intervals and use their midpoint, the estimate itself.
pub fn fit_decay(series: &ReturnSeries, model: DecayModel, (lo, hi): (u64, u64)) -> Result<FitResult> {
    let mut points = Vec::new();
    for r in series.records.iter().filter(|r| r.n >= lo && r.n <= hi) {
        let v = if r.method == Method::MonteCarlo {
            0.5 * (r.lower + r.upper)
        } else {
            if !(r.lower > 0.0) || r.relative_width() >= defaults::FIT_MAX_BRACKET {
                return Err(Error::numeric(format!(
                    "bracket [{:e}, {:e}] at n = {} is wider than {}; lower ε or shorten the range",
                    r.lower,
                    r.upper,
                    r.n,
                    defaults::FIT_MAX_BRACKET
                )));
            }
            r.center()
        };
        points.push((r.n as f64, v));
    }
    fit_values(&points, model)
}

/// Fits on the lower and on the upper ends of every bracket.
pub fn fit_bracket_ends(series: &ReturnSeries, model: DecayModel, (lo, hi): (u64, u64)) -> Result<(FitResult, FitResult)> {
    let pick = |upper: bool| -> Vec<(f64, f64)> {
        series
            .records
            .iter()
            .filter(|r| r.n >= lo && r.n <= hi)
            .map(|r| (r.n as f64, if upper { r.upper } else { r.lower }))
            .collect()
    };
    Ok((fit_values(&pick(false), model)?, fit_values(&pick(true), model)?))
}

/// The decay class `Φ_G` of a group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "class")]
pub enum DecayClass {
    /// `Φ_G(n) ≃ n^{−D/2}`.
    Polynomial { degree: u32 },
    /// `Φ_G(n) ≃ exp(−n^γ)`.
    Stretched { gamma: f64 },
    /// `Φ_G(n) ≃ exp(−n)`.
    ExpOverPi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupProfile {
    pub kind: GroupKind,
    pub class: DecayClass,
    /// Exponential growth with `Φ_G(n) ≃ exp(−n^{1/3})`.
    pub polycyclic_exponential: bool,
    /// Lamplighter dimension, for the sharp wreath-product exponent.
    pub lamplighter_dim: Option<usize>,
    /// `d` in the meta-Abelian bracket `[1/(1+α), d/(d+α)]`.
    pub meta_abelian_dim: Option<usize>,
    pub source: &'static str,
}

impl GroupProfile {
    /// The decay class of each supported group.
    pub fn of(kind: GroupKind) -> Self {
        let base = GroupProfile {
            kind,
            class: DecayClass::ExpOverPi,
            polycyclic_exponential: false,
            lamplighter_dim: None,
            meta_abelian_dim: None,
            source: "",
        };
        match kind {
            GroupKind::Lattice { d } => GroupProfile {
                class: DecayClass::Polynomial { degree: d as u32 },
                meta_abelian_dim: None,
                source: "volume growth n^d",
                ..base
            },
            GroupKind::Free { k: 1 } => GroupProfile {
                class: DecayClass::Polynomial { degree: 1 },
                source: "the free group of rank one is Z",
                ..base
            },
            GroupKind::Heisenberg => GroupProfile {
                class: DecayClass::Polynomial { degree: 4 },
                source: "volume growth n^4 of the discrete Heisenberg group",
                ..base
            },
            GroupKind::Lamplighter { d } => GroupProfile {
                class: DecayClass::Stretched { gamma: d as f64 / (d as f64 + 2.0) },
                lamplighter_dim: Some(d),
                meta_abelian_dim: Some(d),
                source: "Φ(n) ≃ exp(−n^{d/(d+2)}) for (Z/2) wr Z^d",
                ..base
            },
            GroupKind::Sol => GroupProfile {
                class: DecayClass::Stretched { gamma: 1.0 / 3.0 },
                polycyclic_exponential: true,
                meta_abelian_dim: Some(1),
                source: "Φ(n) ≃ exp(−n^{1/3}) for polycyclic groups of exponential growth",
                ..base
            },
            GroupKind::Free { .. } => GroupProfile { source: "nonamenable: Φ(n) ≃ exp(−n)", ..base },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PredictedValue {
    Exact { value: f64 },
    /// The exponent is at most `value`.
    AtMost { value: f64 },
    Interval { lower: f64, upper: f64 },
}

impl PredictedValue {
    /// Whether `x` is consistent with the prediction within `tolerance`.
    pub fn admits(&self, x: f64, tolerance: f64) -> bool {
        match *self {
            PredictedValue::Exact { value } => (x - value).abs() <= tolerance,
            PredictedValue::AtMost { value } => x <= value + tolerance,
            PredictedValue::Interval { lower, upper } => x >= lower - tolerance && x <= upper + tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Prediction {
    pub model: Option<DecayModel>,
    pub value: Option<PredictedValue>,
    pub citation: &'static str,
}

impl Prediction {
    fn none() -> Self {
        Prediction { model: None, value: None, citation: "no prediction" }
    }

    fn some(model: DecayModel, value: PredictedValue, citation: &'static str) -> Self {
        Prediction { model: Some(model), value: Some(value), citation }
    }
}

/// Citations used by [`predicted_exponent`].
pub const POLYNOMIAL_POWER: &str = "polynomial growth: power(G, ρ_α) = D/α";
pub const POLYNOMIAL_EXPLOG: &str = "polynomial growth: exp-plg(G, ρ^exp_{c,α}) = 1/α";
pub const POLYNOMIAL_LOG: &str = "polynomial growth: 1/(α+1) ≤ exp-pow(G, ρ^log_α) ≤ 1/α for α > 1";
pub const ABELIAN_LOG: &str = "Abelian groups: exp-pow(Z^d, ρ^log_α) = 1/(α+1)";
pub const STRETCHED_POWER: &str = "Φ_G ≥ exp(−c n^γ): exp-pow(G, ρ_α) ≤ γ_α";
pub const POLYCYCLIC_POWER: &str = "exponential growth with Φ_G ≥ exp(−c n^{1/3}): exp-pow(G, ρ_α) = 1/(1+α)";
pub const POLYCYCLIC_SLOW: &str =
    "exponential growth with Φ_G ≥ exp(−c n^{1/3}): exp-pow = 1 for ρ^exp_{c,β} and for ρ^log_α, α > 2";
pub const LAMPLIGHTER_POWER: &str = "lamplighters: exp-pow((Z/2) wr Z^d, ρ_α) = d/(d+α)";
pub const META_ABELIAN: &str = "meta-Abelian: 1/(1+α) ≤ exp-pow(G, ρ_α) ≤ d/(d+α)";

/// The exponent predicted for `(profile, ρ)`, or "no prediction" outside
/// the covered pairs.
pub fn predicted_exponent(profile: &GroupProfile, rho: &MomentScale) -> Prediction {
    match (profile.class, rho.family()) {
        (DecayClass::Polynomial { degree }, ScaleFamily::Power { alpha }) => {
            Prediction::some(DecayModel::Power, PredictedValue::Exact { value: degree as f64 / alpha }, POLYNOMIAL_POWER)
        }
        (DecayClass::Polynomial { .. }, ScaleFamily::ExpLog { alpha, .. }) => {
            Prediction::some(DecayModel::ExpPlg, PredictedValue::Exact { value: 1.0 / alpha }, POLYNOMIAL_EXPLOG)
        }
        (DecayClass::Polynomial { .. }, ScaleFamily::Log { alpha }) => match profile.kind {
            GroupKind::Lattice { .. } | GroupKind::Free { k: 1 } => {
                Prediction::some(DecayModel::ExpPow, PredictedValue::Exact { value: 1.0 / (alpha + 1.0) }, ABELIAN_LOG)
            }
            _ if alpha > 1.0 => Prediction::some(
                DecayModel::ExpPow,
                PredictedValue::Interval { lower: 1.0 / (alpha + 1.0), upper: 1.0 / alpha },
                POLYNOMIAL_LOG,
            ),
            _ => Prediction::none(),
        },
        (DecayClass::Stretched { gamma }, ScaleFamily::Power { alpha }) => {
            if let Some(d) = profile.lamplighter_dim {
                let d = d as f64;
                Prediction::some(DecayModel::ExpPow, PredictedValue::Exact { value: d / (d + alpha) }, LAMPLIGHTER_POWER)
            } else if profile.polycyclic_exponential {
                Prediction::some(DecayModel::ExpPow, PredictedValue::Exact { value: 1.0 / (1.0 + alpha) }, POLYCYCLIC_POWER)
            } else if let Some(d) = profile.meta_abelian_dim {
                let d = d as f64;
                Prediction::some(
                    DecayModel::ExpPow,
                    PredictedValue::Interval { lower: 1.0 / (1.0 + alpha), upper: d / (d + alpha) },
                    META_ABELIAN,
                )
            } else {
                match gamma_alpha(gamma, alpha) {
                    Ok(v) => Prediction::some(DecayModel::ExpPow, PredictedValue::AtMost { value: v }, STRETCHED_POWER),
                    Err(_) => Prediction::none(),
                }
            }
        }
        (DecayClass::Stretched { .. }, ScaleFamily::ExpLog { .. }) if profile.polycyclic_exponential => {
            Prediction::some(DecayModel::ExpPow, PredictedValue::Exact { value: 1.0 }, POLYCYCLIC_SLOW)
        }
        (DecayClass::Stretched { .. }, ScaleFamily::Log { alpha }) if profile.polycyclic_exponential && alpha > 2.0 => {
            Prediction::some(DecayModel::ExpPow, PredictedValue::Exact { value: 1.0 }, POLYCYCLIC_SLOW)
        }
        _ => Prediction::none(),
    }
}

/// The `Φ_G` exponent without moment restriction: `D/2` for polynomial
/// growth, `γ` for stretched decay.
pub fn profile_exponent(profile: &GroupProfile) -> Option<(DecayModel, f64)> {
    match profile.class {
        DecayClass::Polynomial { degree } => Some((DecayModel::Power, degree as f64 / 2.0)),
        DecayClass::Stretched { gamma } => Some((DecayModel::ExpPow, gamma)),
        DecayClass::ExpOverPi => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::SeriesRecord;
    use proptest::prelude::*;

    fn synthetic(f: impl Fn(f64) -> f64, ns: impl Iterator<Item = u64>) -> ReturnSeries {
        let mut s = ReturnSeries::new("synthetic");
        for n in ns {
            let v = f(n as f64);
            s.records.push(SeriesRecord { n, lower: v, upper: v, method: Method::Exact });
        }
        s
    }

    #[test]
    fn noiseless_models_are_recovered() {
        let ns = || (3..12).map(|k| 1u64 << k);
        let r = fit_decay(&synthetic(|n| n.powi(-2), ns()), DecayModel::Power, (1, u64::MAX)).unwrap();
        assert!((r.exponent - 2.0).abs() < 1e-3 && r.half_width < 1e-3, "{r:?}");
        assert!((r.r_squared - 1.0).abs() < 1e-12);
        let r = fit_decay(&synthetic(|n| (-n.sqrt()).exp(), ns()), DecayModel::ExpPow, (1, u64::MAX)).unwrap();
        assert!((r.exponent - 0.5).abs() < 1e-3 && r.half_width < 0.01);
        let r = fit_decay(&synthetic(|n| (-n.ln().powf(1.5)).exp(), ns()), DecayModel::ExpPlg, (1, u64::MAX)).unwrap();
        assert!((r.exponent - 1.5).abs() < 1e-3);
    }

    #[test]
    fn four_point_fits_on_request() {
        let pts: Vec<(f64, f64)> = [16.0f64, 32.0, 64.0, 128.0].iter().map(|&n| (n, (-2.0 * n.sqrt()).exp())).collect();
        assert!(fit_values(&pts, DecayModel::ExpPow).is_err());
        let f = fit_values_min(&pts, DecayModel::ExpPow, 4).unwrap();
        assert!((f.exponent - 0.5).abs() < 1e-12 && f.points == 4);
        assert!(fit_values_min(&pts, DecayModel::ExpPow, 2).is_err());
    }

    #[test]
    fn range_restricts_points() {
        let s = synthetic(|n| 1.0 / n, (1..=100).map(|k| 2 * k));
        let r = fit_decay(&s, DecayModel::Power, (10, 20)).unwrap();
        assert_eq!(r.points, 6);
        assert_eq!(r.n_range, (10.0, 20.0));
        assert!(fit_decay(&s, DecayModel::Power, (10, 16)).is_err());
    }

    #[test]
    fn wide_brackets_are_refused() {
        let mut s = synthetic(|n| 1.0 / n, (1..10).map(|k| 2 * k));
        s.records[3].upper *= 1.2;
        let err = fit_decay(&s, DecayModel::Power, (1, 100)).unwrap_err();
        assert!(err.to_string().contains("wider"), "{err}");
        s.records[3].upper /= 1.2;
        s.records[4].lower = 0.0;
        assert!(fit_decay(&s, DecayModel::Power, (1, 100)).is_err());
    }

    #[test]
    fn undefined_transforms_are_refused() {
        let s = synthetic(|_| 1.0, (1..10).map(|k| 2 * k));
        assert!(fit_decay(&s, DecayModel::ExpPow, (1, 100)).is_err());
    }

    #[test]
    fn monte_carlo_records_use_the_estimate() {
        let mut s = ReturnSeries::new("mc");
        for k in 2..9 {
            let n = 1u64 << k;
            let v = (-(n as f64).powf(0.4)).exp();
            s.records.push(SeriesRecord { n, lower: 0.5 * v, upper: 1.5 * v, method: Method::MonteCarlo });
        }
        let r = fit_decay(&s, DecayModel::ExpPow, (1, 1000)).unwrap();
        assert!((r.exponent - 0.4).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn bracket_ends_agree_within_half_width(p in 0.3f64..3.0, seed in 0u64..1000) {
            // multiplicative noise, with a bracket of ±1% around each value
            let mut s = ReturnSeries::new("noisy");
            let mut x = seed;
            for k in 3..13 {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let noise = 1.0 + 0.05 * ((x >> 11) as f64 / (1u64 << 53) as f64 - 0.5);
                let n = 1u64 << k;
                let v = (n as f64).powf(-p) * noise;
                s.records.push(SeriesRecord { n, lower: v * 0.99, upper: v * 1.01, method: Method::Exact });
            }
            let mid = fit_decay(&s, DecayModel::Power, (1, u64::MAX)).unwrap();
            let (lo, hi) = fit_bracket_ends(&s, DecayModel::Power, (1, u64::MAX)).unwrap();
            prop_assert!((lo.exponent - hi.exponent).abs() < mid.half_width.max(1e-9));
            prop_assert!((mid.exponent - p).abs() < 0.05);
        }
    }

    #[test]
    fn documented_predictions() {
        let p = predicted_exponent(&GroupProfile::of(GroupKind::Lattice { d: 2 }), &MomentScale::power(1.0).unwrap());
        assert_eq!(p.model, Some(DecayModel::Power));
        assert_eq!(p.value, Some(PredictedValue::Exact { value: 2.0 }));
        assert_eq!(p.citation, POLYNOMIAL_POWER);

        let generic = GroupProfile {
            kind: GroupKind::Sol,
            class: DecayClass::Stretched { gamma: 1.0 / 3.0 },
            polycyclic_exponential: false,
            lamplighter_dim: None,
            meta_abelian_dim: None,
            source: "test",
        };
        let p = predicted_exponent(&generic, &MomentScale::power(1.0).unwrap());
        let Some(PredictedValue::AtMost { value }) = p.value else { panic!("{p:?}") };
        assert!((value - 0.5).abs() < 1e-15);

        let p = predicted_exponent(&GroupProfile::of(GroupKind::Lamplighter { d: 1 }), &MomentScale::power(1.0).unwrap());
        assert_eq!(p.model, Some(DecayModel::ExpPow));
        assert_eq!(p.value, Some(PredictedValue::Exact { value: 0.5 }));
        assert_eq!(p.citation, LAMPLIGHTER_POWER);
    }

    #[test]
    fn coverage_table() {
        let power = MomentScale::power(0.5).unwrap();
        let explog = MomentScale::explog(1.0, 0.5).unwrap();
        let log3 = MomentScale::log(3.0).unwrap();
        let log_half = MomentScale::log(0.5).unwrap();
        let cases: Vec<(GroupKind, &MomentScale, &str)> = vec![
            (GroupKind::Lattice { d: 3 }, &power, POLYNOMIAL_POWER),
            (GroupKind::Heisenberg, &power, POLYNOMIAL_POWER),
            (GroupKind::Heisenberg, &explog, POLYNOMIAL_EXPLOG),
            (GroupKind::Lattice { d: 1 }, &log_half, ABELIAN_LOG),
            (GroupKind::Heisenberg, &log3, POLYNOMIAL_LOG),
            (GroupKind::Heisenberg, &log_half, "no prediction"),
            (GroupKind::Sol, &power, POLYCYCLIC_POWER),
            (GroupKind::Sol, &explog, POLYCYCLIC_SLOW),
            (GroupKind::Sol, &log3, POLYCYCLIC_SLOW),
            (GroupKind::Sol, &log_half, "no prediction"),
            (GroupKind::Lamplighter { d: 2 }, &power, LAMPLIGHTER_POWER),
            (GroupKind::Lamplighter { d: 2 }, &explog, "no prediction"),
            (GroupKind::Free { k: 2 }, &power, "no prediction"),
        ];
        for (kind, rho, citation) in cases {
            let p = predicted_exponent(&GroupProfile::of(kind), rho);
            assert_eq!(p.citation, citation, "{kind} {rho}");
            assert_eq!(p.value.is_none(), citation == "no prediction");
        }
        let heis = predicted_exponent(&GroupProfile::of(GroupKind::Heisenberg), &power);
        assert_eq!(heis.value, Some(PredictedValue::Exact { value: 8.0 }));
        let lamp = predicted_exponent(&GroupProfile::of(GroupKind::Lamplighter { d: 2 }), &power);
        assert_eq!(lamp.value, Some(PredictedValue::Exact { value: 0.8 }));
    }

    #[test]
    fn sharp_exponents_match_the_general_formula() {
        // the wreath and polycyclic values coincide with γ_α of their class
        for i in 1..40 {
            let alpha = 0.05 * i as f64;
            let rho = MomentScale::power(alpha).unwrap();
            for kind in [GroupKind::Lamplighter { d: 1 }, GroupKind::Lamplighter { d: 3 }, GroupKind::Sol] {
                let profile = GroupProfile::of(kind);
                let DecayClass::Stretched { gamma } = profile.class else { unreachable!() };
                let Some(PredictedValue::Exact { value }) = predicted_exponent(&profile, &rho).value else { unreachable!() };
                assert!((value - gamma_alpha(gamma, alpha).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn meta_abelian_bracket_contains_the_sharp_values() {
        let rho = MomentScale::power(1.0).unwrap();
        let bracket = PredictedValue::Interval { lower: 0.5, upper: 0.5 };
        assert!(bracket.admits(0.5, 0.0));
        let profile = GroupProfile { lamplighter_dim: None, ..GroupProfile::of(GroupKind::Lamplighter { d: 2 }) };
        let p = predicted_exponent(&profile, &rho);
        assert_eq!(p.citation, META_ABELIAN);
        assert_eq!(p.value, Some(PredictedValue::Interval { lower: 0.5, upper: 2.0 / 3.0 }));
    }

    #[test]
    fn model_names_round_trip() {
        for m in [DecayModel::Power, DecayModel::ExpPow, DecayModel::ExpPlg] {
            assert_eq!(m.as_str().parse::<DecayModel>().unwrap(), m);
        }
        assert!("gauss".parse::<DecayModel>().is_err());
        assert_eq!(profile_exponent(&GroupProfile::of(GroupKind::Lattice { d: 2 })), Some((DecayModel::Power, 1.0)));
    }
}
