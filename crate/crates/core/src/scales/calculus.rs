use std::sync::Arc;

use serde::Serialize;

use super::{log_grid, MomentScale, Symbol, WeightKernel};
use crate::defaults;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_from_zero, integrate_half_line, integrate_to_infinity, Integral};

/// `ψ(λ) = λ² ∫_0^∞ e^{-λs} ω(s) ds`, computed as `λ ∫ e^{-u} ω(u/λ) du`.
pub fn psi_from_omega(omega: &WeightKernel, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 2.0) {
        return Err(Error::domain(format!("λ = {lambda} outside (0, 2]")));
    }
    let tol = 0.1 * defaults::QUADRATURE_REL_TOL;
    match integrate_half_line(|u| (-u).exp() * omega.eval(u / lambda), tol)? {
        Integral::Finite(v) => Ok(lambda * v),
        Integral::Divergent => Err(Error::numeric(format!("ψ({lambda}) diverges for kernel {}", omega.name()))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiZeta {
    pub xi: Integral,
    pub zeta: Integral,
}

/// `ξ(t) = ∫_0^t (s/ω(s))^{1/2} ds/s` and `ζ(t) = t^{1/2} ∫_t^∞ ds/(s ω(s)^{1/2})`.
pub fn xi_zeta(omega: &WeightKernel, t: f64) -> Result<XiZeta> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("t = {t} must be positive")));
    }
    let tol = 0.1 * defaults::QUADRATURE_REL_TOL;
    let xi = integrate_from_zero(|s| 1.0 / (s * omega.eval(s)).sqrt(), t, tol)?;
    let zeta = match integrate_to_infinity(|s| 1.0 / (s * omega.eval(s).sqrt()), t, tol)? {
        Integral::Finite(v) => Integral::Finite(t.sqrt() * v),
        Integral::Divergent => Integral::Divergent,
    };
    Ok(XiZeta { xi, zeta })
}

/// `ξ̃(t)² = ∫_0^t ds/ω(s)` and `ζ̃(t)² = t ∫_t^∞ ds/(s ω(s))`.
fn hs_xi_zeta_sq(omega: &WeightKernel, t: f64) -> Result<XiZeta> {
    let tol = 0.1 * defaults::QUADRATURE_REL_TOL;
    let xi = integrate_from_zero(|s| 1.0 / omega.eval(s), t, tol)?;
    let zeta = match integrate_to_infinity(|s| 1.0 / (s * omega.eval(s)), t, tol)? {
        Integral::Finite(v) => Integral::Finite(t * v),
        Integral::Divergent => Integral::Divergent,
    };
    Ok(XiZeta { xi, zeta })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissibilityMode {
    /// `t max{ξ(t²), ζ(t²)} / ω(t²)^{1/2} ≤ C₁² ρ(t)`.
    Standard,
    /// `ξ̃(t²)² + ζ̃(t²)² ≤ C₁² ρ(t)`, suited to slowly varying `ω`.
    HilbertSchmidt,
}

#[derive(Debug, Clone, Serialize)]
pub struct Admissibility {
    pub mode: AdmissibilityMode,
    /// `sqrt(sup_t LHS(t) / ρ(t))` over the grid.
    pub c1: f64,
    /// Where the supremum was attained.
    pub t_at_sup: f64,
    /// False when the ratio still grows by more than 10% over the last
    /// decade of the grid, so the grid supremum is not a usable constant.
    pub admissible: bool,
    pub ratios: Vec<(f64, f64)>,
}

/// Log-spaced grid on `[1, t_max]`.
pub fn admissibility_grid(t_max: f64, points: usize) -> Vec<f64> {
    log_grid(1.0, t_max, points).collect()
}

/// Grid supremum of the admissibility ratio. Divergent `ξ` or `ζ` at any
/// grid point is an error.
pub fn admissibility_constant(
    rho: &MomentScale,
    omega: &WeightKernel,
    grid: &[f64],
    mode: AdmissibilityMode,
) -> Result<Admissibility> {
    if grid.len() < 2 {
        return Err(Error::usage("admissibility grid needs at least two points"));
    }
    let mut ratios = Vec::with_capacity(grid.len());
    for &t in grid {
        let s = t * t;
        let lhs = match mode {
            AdmissibilityMode::Standard => {
                let xz = xi_zeta(omega, s)?;
                let (Integral::Finite(xi), Integral::Finite(zeta)) = (xz.xi, xz.zeta) else {
                    return Err(Error::numeric(format!(
                        "ξ or ζ diverges at t² = {s:.4e} for kernel {}",
                        omega.name()
                    )));
                };
                t * xi.max(zeta) / omega.eval(s).sqrt()
            }
            AdmissibilityMode::HilbertSchmidt => {
                let xz = hs_xi_zeta_sq(omega, s)?;
                let (Integral::Finite(xi), Integral::Finite(zeta)) = (xz.xi, xz.zeta) else {
                    return Err(Error::numeric(format!(
                        "ξ̃ or ζ̃ diverges at t² = {s:.4e} for kernel {}",
                        omega.name()
                    )));
                };
                xi + zeta
            }
        };
        ratios.push((t, lhs / rho.eval(t)));
    }
    let (t_at_sup, sup) = ratios.iter().copied().fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let t_end = grid[grid.len() - 1];
    let decade_start = ratios
        .iter()
        .rev()
        .find(|(t, _)| *t <= t_end / 10.0)
        .unwrap_or(&ratios[0])
        .1;
    let admissible = ratios[ratios.len() - 1].1 <= 1.1 * decade_start;
    Ok(Admissibility {
        mode,
        c1: sup.sqrt(),
        t_at_sup,
        admissible,
        ratios,
    })
}

/// `γ_α = γ / (γ + (α/2)(1-γ))`.
pub fn gamma_alpha(gamma: f64, alpha: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(format!("γ = {gamma} outside (0,1)")));
    }
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain(format!("α = {alpha} outside (0,2]")));
    }
    Ok(gamma / (gamma + 0.5 * alpha * (1.0 - gamma)))
}

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A continuous increasing function on `[0, ∞)` with an optional inverse.
#[derive(Clone)]
pub struct IncreasingFn {
    eval: Eval,
    inverse: Option<Eval>,
}

impl IncreasingFn {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        IncreasingFn {
            eval: Arc::new(f),
            inverse: None,
        }
    }

    pub fn with_inverse(mut self, inv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inv));
        self
    }

    /// `t^p`.
    pub fn power(p: f64) -> Self {
        Self::new(move |t: f64| t.powf(p)).with_inverse(move |v: f64| v.powf(1.0 / p))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn inverse(&self, v: f64) -> Result<f64> {
        if let Some(inv) = &self.inverse {
            return Ok(inv(v));
        }
        let f = |t| self.eval(t);
        if v < f(0.0) {
            return Err(Error::domain(format!("{v} below the range of the function")));
        }
        let mut hi = 1.0;
        while f(hi) < v {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::domain(format!("{v} above the range of the function")));
            }
        }
        Ok(bisect(f, 0.0, hi, v))
    }
}

/// Root of the increasing `f(x) = v` on `[lo, hi]`, to relative precision
/// well below 1e-8.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, v: f64) -> f64 {
    for _ in 0..400 {
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if f(mid) < v {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `π_ψ(t)` defined through its inverse
/// `π_ψ^{-1}(u) = u ψ^{-1}(1/u) π^{-1}(1/ψ^{-1}(1/u))` for `u ≥ 1`.
pub fn pi_psi(pi: &IncreasingFn, psi: &Symbol, t: f64) -> Result<f64> {
    let mut prev: Option<(f64, f64)> = None;
    for s in log_grid(1e-3, 1e8, defaults::SCALE_GRID_POINTS) {
        let v = pi.eval(s);
        if let Some((pv, pq)) = prev {
            if v < pv || s / v < pq * (1.0 - 1e-12) {
                return Err(Error::usage(format!(
                    "π and t/π(t) must both increase; violated near t = {s:.4e}"
                )));
            }
        }
        prev = Some((v, s / v));
    }
    let inv = |u: f64| -> Result<f64> {
        let w = psi.inverse(1.0 / u)?;
        Ok(u * w * pi.inverse(1.0 / w)?)
    };
    let start = inv(1.0)?;
    if t < start {
        return Err(Error::domain(format!("t = {t} below π_ψ(1)^{{-1}} = {start}")));
    }
    let mut hi = 2.0;
    while inv(hi)? < t {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::numeric("π_ψ inverse does not reach t"));
        }
    }
    let mut lo = 1.0f64;
    for _ in 0..400 {
        let mid = (lo * hi).sqrt();
        if inv(mid)? < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Slowly varying functions for which the de Bruijn conjugate is known in
/// closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlowlyVarying {
    /// `c [log(e+t)]^β`; satisfies `ℓ(t^a) ≃ ℓ(t)`, so `ℓ# ≃ 1/ℓ`.
    LogPower { c: f64, beta: f64 },
    /// Anything else.
    General,
}

impl SlowlyVarying {
    pub fn eval(self, t: f64) -> Result<f64> {
        match self {
            SlowlyVarying::LogPower { c, beta } => Ok(c * (std::f64::consts::E + t).ln().powf(beta)),
            SlowlyVarying::General => Err(Error::Unsupported("evaluation of a general slowly varying function".into())),
        }
    }

    /// `ℓ#`, up to asymptotic equivalence.
    pub fn de_bruijn_conjugate(self) -> Result<SlowlyVarying> {
        match self {
            SlowlyVarying::LogPower { c, beta } => Ok(SlowlyVarying::LogPower { c: 1.0 / c, beta: -beta }),
            SlowlyVarying::General => Err(Error::Unsupported(
                "de Bruijn conjugate beyond the case ℓ(t^a) ≃ ℓ(t)".into(),
            )),
        }
    }
}
