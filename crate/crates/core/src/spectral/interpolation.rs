use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use serde_json::json;

use super::{spectral_profile, QuotientOperator};
use crate::defaults;
use crate::error::{Error, Result};
use crate::measures::compensated_sum;
use crate::scales::{
    admissibility_constant, admissibility_grid, psi_from_omega, AdmissibilityMode, MomentScale, Symbol, WeightKernel,
};

/// `E_μ(f,f) = ½ Σ_x Σ_y |f(xy) − f(x)|² μ̄(y)` with counting measure on
/// the quotient. The deficit of `μ̄` does not enter.
pub fn dirichlet_form(op: &QuotientOperator, f: &[f64]) -> Result<f64> {
    let q = op.quotient();
    if f.len() != q.size() {
        return Err(Error::usage(format!("function of length {} on a quotient of size {}", f.len(), q.size())));
    }
    let terms = op.weights().iter().enumerate().filter(|p| *p.1 != 0.0).flat_map(|(y, &w)| {
        (0..q.size()).map(move |x| {
            let d = f[q.multiply(x, y)] - f[x];
            w * d * d
        })
    });
    Ok(0.5 * compensated_sum(terms))
}

#[derive(Debug, Clone, Serialize)]
pub struct InterpolationReport {
    pub check: &'static str,
    pub params: serde_json::Value,
    /// `max_h sup_f ‖f_h − f‖ / (δ(h)‖A^{1/2}f‖)` over generators `h`.
    pub c0_exact: f64,
    /// `max(1, c0_exact)`, the value entering the bound.
    pub c0: f64,
    pub c1: f64,
    /// `μ̄(ρ∘δ)` with the quotient word length.
    pub moment: f64,
    /// `W(ρ, μ̄)` with the quotient word length.
    pub weak_moment: f64,
    pub trials: usize,
    /// Largest `E_μ(f,f) / (8C₀²C₁ μ̄(ρ∘δ) ‖ψ(A)^{1/2}f‖²)`.
    pub max_ratio: f64,
    /// Largest `E_μ(f,f) / (W(ρ,μ̄) ‖ψ(A)^{1/2}f‖²)`, reported only.
    pub max_weak_ratio: f64,
    pub violations: usize,
}

/// Tests `E_μ(f,f) ≤ 8C₀²C₁ μ(ρ∘δ) ‖ψ(A)^{1/2}f‖²` on random `f`, where
/// `A = I − M₀` and `ψ` is the symbol of `ω`.
///
/// `C₀` is computed exactly on the quotient: with `W = V₊ Λ₊^{-1/2}` over
/// the nonzero spectrum of `A`, `C₀²` is the largest eigenvalue of
/// `Wᵀ(2I − R_h − R_hᵀ)W` over generators `h`. Generators suffice because
/// `‖f_{gh} − f‖ ≤ ‖f_g − f‖ + ‖f_h − f‖`.
pub fn interpolation_check(
    mu: &QuotientOperator,
    phi0: &QuotientOperator,
    psi: &Symbol,
    omega: &WeightKernel,
    rho: &MomentScale,
    trials: usize,
    seed: u64,
) -> Result<InterpolationReport> {
    let q = phi0.quotient();
    if mu.quotient().kind() != q.kind() {
        return Err(Error::usage("μ and φ₀ live on different quotients"));
    }
    let grid = admissibility_grid(defaults::ADMISSIBILITY_T_MAX, defaults::SCALE_GRID_POINTS);
    let adm = admissibility_constant(rho, omega, &grid, AdmissibilityMode::Standard)?;
    if !adm.admissible {
        return Err(Error::domain(format!("({rho}, {}) is not admissible", omega.name())));
    }
    for lambda in [0.1, 0.5, 1.0, 1.5] {
        let from_kernel = psi_from_omega(omega, lambda)?;
        if (from_kernel - psi.eval(lambda)).abs() > 1e-6 * from_kernel.abs().max(1e-12) {
            return Err(Error::usage(format!("{} is not the symbol of {}", psi.name(), omega.name())));
        }
    }

    let profile = spectral_profile(phi0)?;
    let n = q.size();
    let alphas: Vec<f64> = profile.eigenvalues().iter().map(|l| 1.0 - l).collect();
    let positive: Vec<usize> = (0..n).filter(|&i| alphas[i] > defaults::SPECTRAL_TOL).collect();
    let vecs = profile.eigenvectors();
    let w = DMatrix::from_fn(n, positive.len(), |r, c| vecs[(r, positive[c])] / alphas[positive[c]].sqrt());
    let gram = w.transpose() * &w;
    let mut c0_sq: f64 = 0.0;
    for h in q.generators() {
        let len = q.word_length(h);
        if len == 0 {
            continue;
        }
        let shifted = DMatrix::from_fn(n, positive.len(), |r, c| w[(q.multiply(r, h), c)]);
        let cross = shifted.transpose() * &w;
        let b = &gram * 2.0 - &cross - cross.transpose();
        let top = SymmetricEigen::new(b).eigenvalues.max();
        c0_sq = c0_sq.max(top / (len * len) as f64);
    }
    let c0_exact = c0_sq.sqrt();
    let c0 = c0_exact.max(1.0);

    let lengths: Vec<f64> = (0..n).map(|y| rho.eval(q.word_length(y) as f64)).collect();
    let moment = compensated_sum(mu.weights().iter().zip(&lengths).map(|(w, r)| w * r));
    let weak_moment = {
        let mut pts: Vec<(f64, f64)> = lengths.iter().copied().zip(mu.weights().iter().copied()).collect();
        pts.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut tail = 0.0;
        let mut best: f64 = 0.0;
        for (v, p) in pts {
            tail += p;
            best = best.max(v * tail);
        }
        best
    };

    let psi_alpha: Vec<f64> = alphas.iter().map(|&a| if a > 0.0 { psi.eval(a.min(2.0)) } else { 0.0 }).collect();
    let scale = 8.0 * c0 * c0 * adm.c1 * moment;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut max_ratio, mut max_weak_ratio, mut violations) = (0.0f64, 0.0f64, 0);
    for _ in 0..trials {
        let mut f: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mean = f.iter().sum::<f64>() / n as f64;
        f.iter_mut().for_each(|x| *x -= mean);
        let coeffs = vecs.transpose() * DVector::from_column_slice(&f);
        let psi_norm = compensated_sum(coeffs.iter().zip(&psi_alpha).map(|(c, p)| p * c * c));
        let energy = dirichlet_form(mu, &f)?;
        let ratio = energy / (scale * psi_norm);
        if ratio > 1.0 {
            violations += 1;
        }
        max_ratio = max_ratio.max(ratio);
        max_weak_ratio = max_weak_ratio.max(energy / (weak_moment * psi_norm));
    }
    Ok(InterpolationReport {
        check: "interpolation",
        params: json!({
            "mu": mu.label(),
            "phi0": phi0.label(),
            "psi": psi.name(),
            "omega": omega.name(),
            "rho": rho.to_string(),
            "seed": seed,
        }),
        c0_exact,
        c0,
        c1: adm.c1,
        moment,
        weak_moment,
        trials,
        max_ratio,
        max_weak_ratio,
        violations,
    })
}
