//! Moment scales `ρ`, weight kernels `ω`, symbols `ψ`, and the scalar
//! calculus connecting them.
//!
//! Every user-supplied evaluator is checked for the required monotonicity
//! on a log-spaced grid when it is constructed.

mod calculus;
mod functionals;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use calculus::{
    admissibility_constant, admissibility_grid, gamma_alpha, pi_psi, psi_from_omega, xi_zeta,
    Admissibility, AdmissibilityMode, IncreasingFn, SlowlyVarying, XiZeta,
};
pub use functionals::{moment, weak_moment, Bounds};

use crate::defaults;
use crate::error::{Error, Result};
use crate::groups::parse_params;

type Eval = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleFamily {
    /// `(1+t)^α`, `α ∈ (0,2)`.
    Power { alpha: f64 },
    /// `exp(c [log(1+t)]^α)`, `α ∈ (0,1)`, `c > 0`.
    ExpLog { c: f64, alpha: f64 },
    /// `[log(e+t)]^α`, `α > 0`.
    Log { alpha: f64 },
    Custom,
}

/// A nondecreasing `ρ : [0,∞) → [1,∞)`.
#[derive(Clone)]
pub struct MomentScale {
    family: ScaleFamily,
    name: String,
    eval: Eval,
}

impl fmt::Debug for MomentScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentScale").field("name", &self.name).finish()
    }
}

impl fmt::Display for MomentScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl MomentScale {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::domain(format!("power scale needs α in (0,2), got {alpha}")));
        }
        Ok(MomentScale {
            family: ScaleFamily::Power { alpha },
            name: format!("power:{alpha}"),
            eval: Arc::new(move |t| (1.0 + t).powf(alpha)),
        })
    }

    pub fn explog(c: f64, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0 && c > 0.0) {
            return Err(Error::domain(format!(
                "explog scale needs α in (0,1) and c > 0, got c={c}, α={alpha}"
            )));
        }
        Ok(MomentScale {
            family: ScaleFamily::ExpLog { c, alpha },
            name: format!("explog:c={c},a={alpha}"),
            eval: Arc::new(move |t| (c * (1.0 + t).ln().powf(alpha)).exp()),
        })
    }

    pub fn log(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::domain(format!("log scale needs α > 0, got {alpha}")));
        }
        Ok(MomentScale {
            family: ScaleFamily::Log { alpha },
            name: format!("log:{alpha}"),
            eval: Arc::new(move |t| (std::f64::consts::E + t).ln().powf(alpha)),
        })
    }

    /// A user scale, rejected unless `ρ(0) ≥ 1` and `ρ` is nondecreasing on
    /// a log-spaced grid over `[1e-6, 1e12]`.
    pub fn custom(name: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let at0 = f(0.0);
        if !(at0 >= 1.0) {
            return Err(Error::usage(format!("scale {name}: ρ(0) = {at0} < 1")));
        }
        let mut prev = at0;
        for t in log_grid(1e-6, 1e12, defaults::SCALE_GRID_POINTS) {
            let v = f(t);
            if !(v >= prev) {
                return Err(Error::usage(format!("scale {name} decreases near t = {t:.4e}")));
            }
            prev = v;
        }
        Ok(MomentScale {
            family: ScaleFamily::Custom,
            name: name.to_string(),
            eval: Arc::new(f),
        })
    }

    /// `k ρ` for `k ≥ 1`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        let inner = self.eval.clone();
        Self::custom(&format!("{k}*{}", self.name), move |t| k * inner(t))
    }

    pub fn family(&self) -> ScaleFamily {
        self.family
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }
}

impl FromStr for MomentScale {
    type Err = Error;

    /// `power:1.0`, `log:2.0`, `explog:c=1,a=0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s.trim().split_once(':').ok_or_else(|| Error::parse(s, "expected family:params"))?;
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| Error::parse(s, format!("bad number '{v}'")));
        match head {
            "power" => Self::power(num(rest)?),
            "log" => Self::log(num(rest)?),
            "explog" => {
                let p = parse_params(s, rest.split(','))?;
                let get = |k: &str| p.get(k).ok_or_else(|| Error::parse(s, format!("missing {k}="))).and_then(|v| num(v));
                Self::explog(get("c")?, get("a")?)
            }
            other => Err(Error::parse(s, format!("unknown scale family '{other}'"))),
        }
    }
}

/// `ω : (0,∞) → (0,∞)`, nondecreasing with `ω(s)/s` nonincreasing.
#[derive(Clone)]
pub struct WeightKernel {
    name: String,
    /// Regular-variation index at infinity, when known.
    index: Option<f64>,
    eval: Eval,
}

impl fmt::Debug for WeightKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightKernel").field("name", &self.name).field("index", &self.index).finish()
    }
}

impl WeightKernel {
    /// `c s^p` with `p ∈ [0,1]`.
    pub fn power(c: f64, p: f64) -> Result<Self> {
        if !(c > 0.0 && (0.0..=1.0).contains(&p)) {
            return Err(Error::domain(format!("kernel c s^p needs c > 0, p in [0,1]; got c={c}, p={p}")));
        }
        Ok(WeightKernel {
            name: format!("{c}*s^{p}"),
            index: Some(p),
            eval: Arc::new(move |s| c * s.powf(p)),
        })
    }

    /// The kernel `s^(1-a) / Γ(2-a)` whose symbol is `λ^a`.
    pub fn for_power_symbol(a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::domain(format!("power symbol needs a in (0,1], got {a}")));
        }
        Self::power(1.0 / statrs::function::gamma::gamma(2.0 - a), 1.0 - a)
    }

    /// A user kernel, grid-checked on `[1e-6, 1e6]`.
    pub fn custom(name: &str, index: Option<f64>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let mut prev: Option<(f64, f64)> = None;
        for s in log_grid(1e-6, 1e6, defaults::SCALE_GRID_POINTS) {
            let v = f(s);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::usage(format!("kernel {name} not positive at s = {s:.4e}")));
            }
            if let Some((ps, pv)) = prev {
                if v < pv * (1.0 - 1e-12) {
                    return Err(Error::usage(format!("kernel {name} decreases near s = {s:.4e}")));
                }
                if v / s > pv / ps * (1.0 + 1e-12) {
                    return Err(Error::usage(format!("kernel {name}: ω(s)/s increases near s = {s:.4e}")));
                }
            }
            prev = Some((s, v));
        }
        Ok(WeightKernel {
            name: name.to_string(),
            index,
            eval: Arc::new(f),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn index(&self) -> Option<f64> {
        self.index
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.eval)(s)
    }
}

/// A symbol `ψ` on `[0, 2]` with the three functional-calculus flags.
#[derive(Clone)]
pub struct Symbol {
    name: String,
    eval: Eval,
    inverse: Option<Eval>,
    /// `ψ(0) = 0` within tolerance.
    pub vanishes_at_zero: bool,
    /// `ψ(1) = 1` within tolerance.
    pub normalized: bool,
    /// `ψ(2) < 2`.
    pub contracts_at_two: bool,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol").field("name", &self.name).finish()
    }
}

impl Symbol {
    fn checked(name: String, eval: Eval, inverse: Option<Eval>) -> Result<Self> {
        let n = defaults::SCALE_GRID_POINTS;
        let mut prev = eval(0.0);
        for i in 1..=n {
            let v = eval(2.0 * i as f64 / n as f64);
            if !(v > prev) {
                return Err(Error::usage(format!("symbol {name} is not increasing on [0,2]")));
            }
            prev = v;
        }
        let tol = defaults::SYMBOL_TOL;
        Ok(Symbol {
            vanishes_at_zero: eval(0.0).abs() <= tol,
            normalized: (eval(1.0) - 1.0).abs() <= tol,
            contracts_at_two: eval(2.0) < 2.0,
            name,
            eval,
            inverse,
        })
    }

    pub fn identity() -> Self {
        Self::checked("s".into(), Arc::new(|s| s), Some(Arc::new(|v| v))).expect("identity is increasing")
    }

    /// `s^a` for `a ∈ (0, 1]`.
    pub fn power(a: f64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::domain(format!("power symbol needs a in (0,1], got {a}")));
        }
        Self::checked(
            format!("s^{a}"),
            Arc::new(move |s: f64| s.powf(a)),
            Some(Arc::new(move |v: f64| v.powf(1.0 / a))),
        )
    }

    pub fn custom(name: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::checked(name.to_string(), Arc::new(f), None)
    }

    /// The symbol `ψ(λ) = λ² ∫ e^{-λs} ω(s) ds` of a weight kernel,
    /// evaluated by quadrature.
    pub fn from_kernel(omega: &WeightKernel) -> Result<Self> {
        // Probe once so quadrature failures surface here rather than later.
        psi_from_omega(omega, 1.0)?;
        let w = omega.clone();
        Self::checked(
            format!("psi[{}]", omega.name),
            Arc::new(move |l| if l <= 0.0 { 0.0 } else { psi_from_omega(&w, l).unwrap_or(f64::NAN) }),
            None,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.eval)(s)
    }

    /// `ψ^{-1}(v)` for `v ∈ [0, ψ(2)]`, closed form when known and
    /// bisection otherwise.
    pub fn inverse(&self, v: f64) -> Result<f64> {
        if let Some(inv) = &self.inverse {
            return Ok(inv(v));
        }
        let (mut lo, mut hi) = (0.0, 2.0);
        if !(self.eval(lo) <= v && v <= self.eval(hi)) {
            return Err(Error::domain(format!("{v} outside the range of {}", self.name)));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < v {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

impl FromStr for Symbol {
    type Err = Error;

    /// `identity` or `power:a`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().split_once(':') {
            None if s.trim() == "identity" => Ok(Symbol::identity()),
            Some(("power", a)) => Symbol::power(a.trim().parse().map_err(|_| Error::parse(s, "bad exponent"))?),
            _ => Err(Error::parse(s, "expected 'identity' or 'power:a'")),
        }
    }
}
