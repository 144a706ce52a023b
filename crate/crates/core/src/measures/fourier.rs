use std::f64::consts::PI;

use super::{subordination_tail, FiniteMeasure};
use crate::error::{Error, Result};
use crate::quadrature::integrate_from_zero;

/// The Fourier transform of a symmetric sub-probability measure on `Z`,
/// represented through `1 − φ̂(θ)` so that it stays accurate near `θ = 0`.
pub trait FourierSymbol: Sync {
    /// `1 − φ̂(θ)`; at `θ = 0` this is the deficit.
    fn one_minus(&self, theta: f64) -> f64;

    fn deficit(&self) -> f64 {
        self.one_minus(0.0)
    }

    fn describe(&self) -> String;
}

/// `φ̂(θ) = w₀ + Σ_{k>0} v_k cos kθ` with `v_k = φ(k) + φ(−k)`.
#[derive(Debug, Clone)]
pub struct LineSymbol {
    /// `(k, v_k)` for `k > 0`, increasing in `k`.
    terms: Vec<(u64, f64)>,
    deficit: f64,
    name: String,
}

/// Terms between exact `sin_cos` restarts of the rotating phasor.
const RESYNC: usize = 64;

impl LineSymbol {
    pub fn new(mu: &FiniteMeasure) -> Result<Self> {
        let weights = mu
            .line_weights()
            .ok_or_else(|| Error::unsupported(format!("Fourier symbols need a measure on Z, not {}", mu.kind())))?;
        if !mu.is_symmetric() {
            return Err(Error::usage("Fourier symbols need a symmetric measure"));
        }
        let terms = weights
            .iter()
            .filter(|(k, _)| *k > 0)
            .map(|&(k, w)| (k as u64, 2.0 * w))
            .collect();
        Ok(LineSymbol { terms, deficit: mu.deficit(), name: format!("line measure with {} atoms", mu.len()) })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl FourierSymbol for LineSymbol {
    fn one_minus(&self, theta: f64) -> f64 {
        // 1 − cos kθ = 2 sin²(kθ/2), with sin(kθ/2) from a rotating phasor.
        let half = 0.5 * theta;
        let (sh, ch) = half.sin_cos();
        let mut total = 0.0;
        let mut run = 0usize;
        let mut prev: Option<u64> = None;
        let (mut s, mut c) = (0.0f64, 1.0f64);
        for &(k, v) in &self.terms {
            if prev == Some(k - 1) && run < RESYNC {
                (s, c) = (s * ch + c * sh, c * ch - s * sh);
                run += 1;
            } else {
                (s, c) = (k as f64 * half).sin_cos();
                run = 0;
            }
            prev = Some(k);
            total += v * s * s;
        }
        self.deficit + 2.0 * total
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// The truncated subordination `Σ_{k≤K} c_k φ₀^{(k)}` of a line measure,
/// evaluated without forming any convolution power:
/// `1 − φ̂_ψ = (1−u)^a + T_K(u)` where `u = φ̂₀(θ)` and
/// `T_K(u) = Σ_{k>K} c_k u^k`.
#[derive(Debug, Clone)]
pub struct SubordinatedSymbol {
    base: LineSymbol,
    a: f64,
    k: u64,
    tail: f64,
}

impl SubordinatedSymbol {
    pub fn new(base: LineSymbol, a: f64, k: u64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::domain(format!("subordination exponent must lie in (0,1), got {a}")));
        }
        if k < 8 {
            return Err(Error::usage(format!("truncation K = {k} is below 8")));
        }
        Ok(SubordinatedSymbol { base, a, k, tail: subordination_tail(a, k) })
    }

    pub fn truncation(&self) -> u64 {
        self.k
    }

    /// `T_K(u)` through
    /// `(sin πa/π) ∫₀¹ (ut)^{K+1}/(1−ut) · t^{−a−1}(1−t)^a dt`, written in
    /// `s = 1 − t` and cut where `(1−s)^{K+1}` is negligible.
    pub fn remainder(&self, u: f64) -> f64 {
        self.remainder_at(1.0 - u, u)
    }

    /// `T_K(u)` given both `x = 1 − u` and `u`, so that `1 − u(1−s)` is
    /// formed as `x + us` without cancellation.
    fn remainder_at(&self, x: f64, u: f64) -> f64 {
        let kp = self.k as f64 + 1.0;
        if u.abs().ln() * kp < -41.0 {
            return 0.0;
        }
        if x == 0.0 {
            return self.tail;
        }
        let a = self.a;
        let sign = if u < 0.0 && self.k % 2 == 0 { -1.0 } else { 1.0 };
        let lu = u.abs().ln();
        let s_max = (-(-90.0 / kp).exp_m1()).min(1.0);
        let f = |s: f64| {
            let p = (kp * (lu + (-s).ln_1p())).exp();
            p / (x + u * s) * (1.0 - s).powf(-a - 1.0) * s.powf(a)
        };
        let v = integrate_from_zero(f, s_max, 1e-10).map(|i| i.or_infinity()).unwrap_or(f64::NAN);
        sign * (PI * a).sin() / PI * v
    }
}

impl FourierSymbol for SubordinatedSymbol {
    fn one_minus(&self, theta: f64) -> f64 {
        let x = self.base.one_minus(theta);
        if theta == 0.0 && self.base.deficit == 0.0 {
            return self.tail;
        }
        x.powf(self.a) + self.remainder_at(x, 1.0 - x)
    }

    fn describe(&self) -> String {
        format!("({})^{} truncated at K = {}", self.base.describe(), self.a, self.k)
    }
}
