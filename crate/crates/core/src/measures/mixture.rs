use std::collections::HashMap;

use log::warn;
use serde::Serialize;

use super::{compensated_sum, uniform_ball, FiniteMeasure, MASS_TOL};
use crate::error::{Error, Result};
use crate::groups::{Element, Group};
use crate::scales::MomentScale;

/// Levels of a mixture `Σ p_i U_{B(r_i)}` of ball uniforms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureSpec {
    radii: Vec<u32>,
    p: Vec<f64>,
    /// `σ_k = Σ_{i>k} p_i`; the last entry is 0.
    sigma: Vec<f64>,
    /// `β_i = 1/V(r_i)`, or an upper bound on it when `V` is not enumerable.
    beta: Vec<f64>,
    /// `b_k = min_{i≤k} β_i`.
    b: Vec<f64>,
}

/// `V(r)`, or `V(r')` for the largest computable `r' < r`, which is a
/// lower bound. The flag reports exactness.
fn volume_lower_bound(group: &Group, r: u32) -> Result<(u64, bool)> {
    let mut probe = r;
    if let Some(limit) = group.radius_limit() {
        probe = probe.min(limit);
    }
    loop {
        match group.volume(probe) {
            Ok(v) => return Ok((v, probe == r)),
            Err(Error::Resource(_)) | Err(Error::OutOfRange { .. }) if probe > 0 => probe /= 2,
            Err(e) => return Err(e),
        }
    }
}

impl MixtureSpec {
    pub fn new(group: &Group, radii: Vec<u32>, p: Vec<f64>) -> Result<Self> {
        if radii.len() != p.len() || radii.is_empty() {
            return Err(Error::usage("mixture needs one probability per radius"));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::usage("mixture radii must increase strictly"));
        }
        if p.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::domain("mixture probabilities must be positive"));
        }
        if (compensated_sum(p.iter().copied()) - 1.0).abs() > MASS_TOL {
            return Err(Error::domain("mixture probabilities must sum to 1"));
        }
        let k = p.len();
        let mut sigma = vec![0.0; k];
        for i in (0..k - 1).rev() {
            sigma[i] = compensated_sum(p[i + 1..].iter().copied());
        }
        let beta = radii
            .iter()
            .map(|&r| volume_lower_bound(group, r).map(|(v, _)| 1.0 / v as f64))
            .collect::<Result<Vec<_>>>()?;
        let mut b = beta.clone();
        for i in 1..k {
            b[i] = b[i].min(b[i - 1]);
        }
        Ok(MixtureSpec { radii, p, sigma, beta, b })
    }

    pub fn levels(&self) -> usize {
        self.p.len()
    }

    pub fn radii(&self) -> &[u32] {
        &self.radii
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `Σ_i p_i U_{B(r_i)}`. Levels whose ball cannot be enumerated
    /// contribute their probability to the deficit.
    pub fn measure(&self, group: &Group) -> Result<FiniteMeasure> {
        let mut acc: HashMap<Element, f64> = HashMap::new();
        let mut missing = Vec::new();
        for (&r, &p) in self.radii.iter().zip(&self.p) {
            match uniform_ball(group, r) {
                Ok(u) => {
                    for (g, w) in u.atoms() {
                        *acc.entry(g.clone()).or_insert(0.0) += p * w;
                    }
                }
                Err(Error::Resource(_)) | Err(Error::OutOfRange { .. }) => {
                    warn!("ball of radius {r} is not enumerable; its mass {p} goes to the deficit");
                    missing.push(p);
                }
                Err(e) => return Err(e),
            }
        }
        let mut atoms: Vec<(Element, f64)> = acc.into_iter().collect();
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(FiniteMeasure::from_parts(group.kind(), atoms, compensated_sum(missing)))
    }

    /// `Σ_i ρ(r_i) p_i`, which dominates the `ρ`-moment.
    pub fn moment_bound(&self, rho: &MomentScale) -> f64 {
        compensated_sum(self.radii.iter().zip(&self.p).map(|(&r, p)| rho.eval(r as f64) * p))
    }

    /// `max_{0≤k<K} ρ(r_{k+1}) σ_k` with `σ_0 = 1`, which dominates the weak
    /// `ρ`-moment: for `ρ(r_k) ≤ s < ρ(r_{k+1})` only levels above `k` reach
    /// `ρ > s`.
    pub fn weak_moment_bound(&self, rho: &MomentScale) -> f64 {
        (0..self.levels())
            .map(|k| rho.eval(self.radii[k] as f64) * if k == 0 { 1.0 } else { self.sigma[k - 1] })
            .fold(0.0, f64::max)
    }
}

/// The mixture over `B(4^i)`, `i = 1..=K`, with `p_i ∝ 1/ρ(4^i)`.
pub fn ball_mixture(group: &Group, rho: &MomentScale, k: usize) -> Result<(FiniteMeasure, MixtureSpec)> {
    if k < 2 {
        return Err(Error::usage(format!("ball mixture needs at least 2 levels, got {k}")));
    }
    if k > 15 {
        return Err(Error::resource(format!("radius 4^{k} overflows; use at most 15 levels")));
    }
    let radii: Vec<u32> = (1..=k as u32).map(|i| 4u32.pow(i)).collect();
    let raw: Vec<f64> = radii.iter().map(|&r| 1.0 / rho.eval(r as f64)).collect();
    let c = compensated_sum(raw.iter().copied());
    let spec = MixtureSpec::new(group, radii, raw.into_iter().map(|x| x / c).collect())?;
    Ok((spec.measure(group)?, spec))
}
