use log::warn;
use statrs::function::gamma::ln_gamma;

use super::{compensated_sum, FiniteMeasure};
use crate::convolution::{convolve, DenseGrid};
use crate::defaults;
use crate::error::{Error, Result};

/// `c_k = (-1)^{k+1} binom(a, k)` for `k = 1..=K`, the coefficients of
/// `1 − (1−x)^a = Σ c_k x^k`.
pub fn subordination_coefficients(a: f64, k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k);
    let mut c = a;
    for j in 1..=k {
        out.push(c);
        c *= (j as f64 - a) / (j + 1) as f64;
    }
    out
}

/// `Σ_{k>K} c_k = |binom(a−1, K)| = Γ(K+1−a) / (Γ(1−a) Γ(K+1))`.
pub fn subordination_tail(a: f64, k: u64) -> f64 {
    if a >= 1.0 {
        return 0.0;
    }
    let k = k as f64;
    (ln_gamma_ratio(k + 1.0, -a) - ln_gamma(1.0 - a)).exp()
}

/// `ln Γ(z+h) − ln Γ(z)` for `|h| < 1`, by the Stirling difference once
/// `z` is large enough that subtracting two huge logarithms would lose digits.
fn ln_gamma_ratio(z: f64, h: f64) -> f64 {
    if z < 1e3 {
        return ln_gamma(z + h) - ln_gamma(z);
    }
    let zh = z + h;
    (zh - 0.5) * (h / z).ln_1p() + h * z.ln() - h + (1.0 / zh - 1.0 / z) / 12.0
        - (1.0 / zh.powi(3) - 1.0 / z.powi(3)) / 360.0
}

/// Smallest `K` whose discarded tail is at most `tol`.
pub fn tail_rule_truncation(a: f64, tol: f64) -> u64 {
    if a >= 1.0 {
        return 1;
    }
    // The tail is decreasing in K; bracket then bisect.
    let (mut lo, mut hi) = (1u64, 2u64);
    while subordination_tail(a, hi) > tol {
        lo = hi;
        hi = hi.saturating_mul(2);
        if hi == u64::MAX {
            return hi;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if subordination_tail(a, mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `φ_ψ = Σ_{k≤K} c_k φ₀^{(k)}` for `ψ(s) = s^a`, computed term by term.
///
/// `K` defaults to the tail rule at [`defaults::SUBORDINATION_TAIL`] and is
/// capped at [`defaults::SUBORDINATION_EXPLICIT_CAP`]. The discarded tail,
/// and every atom dropped from a power, goes to the deficit.
pub fn subordinate(base: &FiniteMeasure, a: f64, k: Option<u64>, eps: f64) -> Result<FiniteMeasure> {
    if !base.is_symmetric() {
        return Err(Error::usage("subordination needs a symmetric base measure"));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::domain(format!("subordination exponent must lie in (0,1], got {a}")));
    }
    if a == 1.0 {
        return Ok(base.clone());
    }
    let k = match k {
        Some(k) if k < 8 => return Err(Error::usage(format!("truncation K = {k} is below 8"))),
        Some(k) => k,
        None => {
            let rule = tail_rule_truncation(a, defaults::SUBORDINATION_TAIL);
            if rule > defaults::SUBORDINATION_EXPLICIT_CAP {
                warn!(
                    "tail rule asks for K = {rule}; summing {} powers, tail {:.3e} goes to the deficit",
                    defaults::SUBORDINATION_EXPLICIT_CAP,
                    subordination_tail(a, defaults::SUBORDINATION_EXPLICIT_CAP)
                );
            }
            rule.min(defaults::SUBORDINATION_EXPLICIT_CAP)
        }
    };
    let coeffs = subordination_coefficients(a, k as usize);
    let tail = subordination_tail(a, k);
    let phi = match DenseGrid::from_measure(base)? {
        Some(grid) => dense(base, grid, &coeffs, tail, eps)?,
        None => sparse(base, &coeffs, tail, eps)?,
    };
    Ok(phi.symmetrized())
}

fn dense(base: &FiniteMeasure, grid: DenseGrid, coeffs: &[f64], tail: f64, eps: f64) -> Result<FiniteMeasure> {
    let mut power = grid.clone();
    let mut power_deficit = base.deficit();
    let mut acc = DenseGrid::zeros(grid.lo().to_vec(), vec![0; grid.dim()])?;
    let mut lost = Vec::with_capacity(coeffs.len());
    for (i, &c) in coeffs.iter().enumerate() {
        acc.add_scaled(&power, c)?;
        lost.push(c * power_deficit);
        if i + 1 < coeffs.len() {
            let (mut next, noise) = power.convolve(&grid)?;
            let dropped = next.drop_below(eps);
            next.crop();
            power_deficit = power_deficit + base.deficit() - power_deficit * base.deficit() + noise + dropped;
            power = next;
        }
    }
    Ok(acc.to_measure(base.kind(), compensated_sum(lost) + tail))
}

fn sparse(base: &FiniteMeasure, coeffs: &[f64], tail: f64, eps: f64) -> Result<FiniteMeasure> {
    let mut power = base.clone();
    let mut acc: std::collections::BTreeMap<crate::groups::Element, f64> = Default::default();
    let mut lost = Vec::with_capacity(coeffs.len());
    for (i, &c) in coeffs.iter().enumerate() {
        for (g, w) in power.atoms() {
            *acc.entry(g.clone()).or_insert(0.0) += c * w;
        }
        lost.push(c * power.deficit());
        if i + 1 < coeffs.len() {
            power = convolve(&power, base, eps)?;
        }
    }
    Ok(FiniteMeasure::from_parts(
        base.kind(),
        acc.into_iter().filter(|a| a.1 > 0.0).collect(),
        compensated_sum(lost) + tail,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{Element, Group, GroupKind};
    use crate::measures::{check_symmetric, uniform_ball};
    use approx::assert_relative_eq;

    #[test]
    fn square_root_coefficients() {
        let c = subordination_coefficients(0.5, 4);
        assert_eq!(c, vec![0.5, 0.125, 0.0625, 5.0 / 128.0]);
        let near_one = subordination_coefficients(1.0 - 1e-9, 3);
        assert_relative_eq!(near_one[0], 1.0, max_relative = 1e-8);
        assert!(near_one[1] < 1e-9 && near_one[2] < 1e-9);
        for a in [0.3, 0.5, 0.8] {
            let c = subordination_coefficients(a, 200);
            assert!(c.iter().all(|&x| x > 0.0));
            assert!(c[1..].windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn tail_formula_against_partial_sums() {
        for a in [0.25, 0.5, 0.75] {
            for k in [8u64, 100, 10_000] {
                let partial = compensated_sum(subordination_coefficients(a, k as usize));
                assert_relative_eq!(subordination_tail(a, k), 1.0 - partial, max_relative = 1e-9);
            }
        }
        // at K = 10^4 and a = 1/2 the partial sum is 1 − 5.6e-3
        assert_relative_eq!(subordination_tail(0.5, 10_000), 5.64e-3, max_relative = 1e-3);
    }

    #[test]
    fn tail_rule() {
        let k = tail_rule_truncation(0.5, 1e-6);
        assert!(subordination_tail(0.5, k) <= 1e-6 && subordination_tail(0.5, k - 1) > 1e-6);
        assert_relative_eq!(k as f64, 1e12 / std::f64::consts::PI, max_relative = 1e-5);
        assert!(tail_rule_truncation(0.9, 1e-6) < 1_000_000);
    }

    #[test]
    fn lattice_and_sparse_paths_agree() {
        let z = Group::new(GroupKind::Lattice { d: 1 }).unwrap();
        let base = uniform_ball(&z, 1).unwrap();
        let phi = subordinate(&base, 0.5, Some(200), 0.0).unwrap();
        assert!(check_symmetric(&phi));
        assert_relative_eq!(phi.mass() + phi.deficit(), 1.0, epsilon = 1e-13);
        assert_relative_eq!(phi.deficit(), subordination_tail(0.5, 200), max_relative = 1e-12);
        let via_sparse = sparse(&base, &subordination_coefficients(0.5, 200), subordination_tail(0.5, 200), 0.0).unwrap();
        for (g, w) in via_sparse.atoms() {
            assert!((phi.weight(g) - w).abs() < 1e-15);
        }
        // c_1 φ₀ + c_2 φ₀² at the far edge of two steps
        let c = subordination_coefficients(0.5, 3);
        let expect_two = c[1] / 9.0 + c[2] * 3.0 / 27.0;
        let explicit = subordinate(&base, 0.5, Some(8), 0.0).unwrap();
        assert!(explicit.weight(&Element::lattice(&[2])) > expect_two);
    }

    #[test]
    fn heavier_tails_for_smaller_exponents() {
        let z = Group::new(GroupKind::Lattice { d: 1 }).unwrap();
        let base = uniform_ball(&z, 1).unwrap();
        let beyond = |a: f64| {
            let phi = subordinate(&base, a, Some(4000), 1e-300).unwrap();
            phi.atoms()
                .iter()
                .filter(|(g, _)| matches!(g, Element::Lattice(c) if c[0].abs() > 10))
                .map(|a| a.1)
                .sum::<f64>()
                + phi.deficit()
        };
        let (w3, w5, w8) = (beyond(0.3), beyond(0.5), beyond(0.8));
        assert!(w3 > w5 && w5 > w8, "{w3} {w5} {w8}");
    }

    #[test]
    fn identity_exponent_and_errors() {
        let z = Group::new(GroupKind::Lattice { d: 1 }).unwrap();
        let base = uniform_ball(&z, 2).unwrap();
        assert_eq!(subordinate(&base, 1.0, None, 0.0).unwrap(), base);
        let skew = FiniteMeasure::delta(GroupKind::Lattice { d: 1 }, Element::lattice(&[1])).unwrap();
        assert!(matches!(subordinate(&skew, 0.5, None, 0.0), Err(Error::Usage(_))));
        assert!(subordinate(&base, 0.5, Some(4), 0.0).is_err());
    }
}
