//! Adaptive Gauss–Kronrod quadrature on finite, singular and semi-infinite
//! ranges.
//!
//! Finite intervals use globally adaptive 7–15 point bisection. Integrable
//! singularities at 0 and tails at infinity are handled by summing dyadic
//! panels `[2^-(k+1), 2^-k]` or `[a 2^k, a 2^(k+1)]` until the geometric tail
//! estimate falls under tolerance. Panels whose contributions stop
//! shrinking for long enough mark the integral as divergent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Outcome of an integral that may legitimately be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integral {
    Finite(f64),
    Divergent,
}

impl Integral {
    pub fn value(self) -> Option<f64> {
        match self {
            Integral::Finite(v) => Some(v),
            Integral::Divergent => None,
        }
    }

    /// The value, with divergence mapped to `+inf`.
    pub fn or_infinity(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, Integral::Divergent)
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod estimate with its embedded 7-point Gauss error.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, &x) in XGK[..7].iter().enumerate() {
        let (f1, f2) = (f(c - h * x), f(c + h * x));
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Kronrod nodes on `[a, b]`: pairs `c ∓ h x_j` for `j < 7`, then `c`.
pub(crate) fn gk15_nodes(a: f64, b: f64) -> [f64; 15] {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut out = [c; 15];
    for (j, &x) in XGK[..7].iter().enumerate() {
        out[2 * j] = c - h * x;
        out[2 * j + 1] = c + h * x;
    }
    out
}

/// Kronrod estimate and Kronrod–Gauss error from values at [`gk15_nodes`].
pub(crate) fn gk15_apply(v: &[f64; 15], a: f64, b: f64) -> (f64, f64) {
    let h = 0.5 * (b - a);
    let mut kronrod = v[14] * WGK[7];
    let mut gauss = v[14] * WG[3];
    for j in 0..7 {
        let pair = v[2 * j] + v[2 * j + 1];
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

const MAX_SUBDIVISIONS: usize = 4000;

/// Integral over a finite interval with an integrand finite on `[a, b]`
/// except possibly at endpoints it never samples.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::usage("integrate needs finite endpoints"));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, rel_tol).map(|v| -v);
    }
    let (value, err) = gk15(&f, a, b);
    let mut heap = BinaryHeap::from([Panel { a, b, value, err }]);
    let (mut total, mut total_err) = (value, err);
    for _ in 0..MAX_SUBDIVISIONS {
        if !total.is_finite() {
            return Err(Error::numeric(format!("non-finite integrand on [{a}, {b}]")));
        }
        if total_err <= rel_tol * total.abs() || total_err <= f64::MIN_POSITIVE {
            return Ok(total);
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
    }
    // Recompute from scratch to shed accumulated cancellation error.
    let total: f64 = heap.iter().map(|p| p.value).sum();
    let total_err: f64 = heap.iter().map(|p| p.err).sum();
    if total_err <= rel_tol * total.abs() {
        Ok(total)
    } else {
        Err(Error::numeric(format!(
            "quadrature on [{a}, {b}] stalled at error {total_err:.3e} for value {total:.6e}"
        )))
    }
}

/// Number of panels with non-shrinking contributions that marks divergence.
const STALL_PANELS: usize = 60;
const MAX_PANELS: usize = 1000;

/// Sums panel contributions `panel(k)` for `k = 0, 1, ...` whose magnitude
/// should eventually decay geometrically.
fn dyadic_sum<P: FnMut(usize) -> Result<f64>>(mut panel: P, rel_tol: f64) -> Result<Integral> {
    let mut total = 0.0;
    let mut prev = f64::NAN;
    let mut stalled = 0usize;
    let mut ratios = [1.0f64; 3];
    for k in 0..MAX_PANELS {
        let c = panel(k)?;
        total += c;
        let mag = c.abs();
        if k > 0 {
            let ratio = if prev > 0.0 { mag / prev } else if mag == 0.0 { 0.0 } else { f64::INFINITY };
            ratios.rotate_left(1);
            ratios[2] = ratio;
            stalled = if ratio >= 0.999 { stalled + 1 } else { 0 };
            if stalled >= STALL_PANELS {
                return Ok(Integral::Divergent);
            }
            let r = ratios.iter().copied().fold(0.0, f64::max);
            if k >= 3 && r < 0.999 {
                let tail = mag * r / (1.0 - r);
                if tail <= 0.1 * rel_tol * total.abs() || (mag == 0.0 && r == 0.0) {
                    return Ok(Integral::Finite(total));
                }
            }
        }
        prev = mag;
    }
    Err(Error::numeric("dyadic panels exhausted before the integral settled"))
}

/// `∫_0^b f`, allowing an integrable singularity at 0.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(f: F, b: f64, rel_tol: f64) -> Result<Integral> {
    if b <= 0.0 {
        return Err(Error::usage("upper endpoint must be positive"));
    }
    dyadic_sum(
        |k| {
            let hi = b * 0.5f64.powi(k as i32);
            integrate(&f, 0.5 * hi, hi, 0.1 * rel_tol)
        },
        rel_tol,
    )
}

/// `∫_a^∞ f` for `a > 0`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64) -> Result<Integral> {
    if a <= 0.0 {
        return Err(Error::usage("lower endpoint must be positive"));
    }
    dyadic_sum(
        |k| {
            let lo = a * 2f64.powi(k as i32);
            if !lo.is_finite() {
                return Err(Error::numeric("tail panels overflowed"));
            }
            integrate(&f, lo, 2.0 * lo, 0.1 * rel_tol)
        },
        rel_tol,
    )
}

/// `∫_0^∞ f`, split at 1.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, rel_tol: f64) -> Result<Integral> {
    let head = integrate_from_zero(&f, 1.0, rel_tol)?;
    let tail = integrate_to_infinity(&f, 1.0, rel_tol)?;
    Ok(match (head, tail) {
        (Integral::Finite(a), Integral::Finite(b)) => Integral::Finite(a + b),
        _ => Integral::Divergent,
    })
}
