use super::{compensated_sum, FiniteMeasure};
use crate::defaults;
use crate::error::{Error, Result};
use crate::groups::{Element, GroupKind};
use crate::quadrature::integrate_to_infinity;

/// Default cutoff: [`defaults::STABLE_CUTOFF`] on `Z`, otherwise the
/// largest cube with at most [`defaults::STABLE_SUPPORT`] points (and at
/// least 10).
pub fn default_cutoff(d: usize) -> u64 {
    if d == 1 {
        return defaults::STABLE_CUTOFF;
    }
    let side = (defaults::STABLE_SUPPORT as f64).powf(1.0 / d as f64);
    (((side - 1.0) / 2.0).floor() as u64).max(10)
}

/// `μ_α(k) ∝ (1+‖k‖²)^{-(d+α)/2}` on the cube `‖k‖_∞ ≤ cutoff`.
///
/// The normalizer is the cube sum plus an estimate of the sum outside it,
/// and that outside mass becomes the deficit.
pub fn stable_like(d: usize, alpha: f64, cutoff: u64) -> Result<FiniteMeasure> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain(format!("stable-like index must lie in (0,2), got {alpha}")));
    }
    if cutoff < 10 {
        return Err(Error::usage(format!("cutoff must be at least 10, got {cutoff}")));
    }
    let kind = GroupKind::Lattice { d };
    let kind = kind.validate()?;
    let side = 2 * cutoff + 1;
    let count = (side as f64).powi(d as i32);
    if count > defaults::SUPPORT_CAP as f64 {
        return Err(Error::resource(format!(
            "stable-like law with cutoff {cutoff} in dimension {d} has {count:.3e} atoms; lower the cutoff"
        )));
    }
    let s = 0.5 * (d as f64 + alpha);
    let r = cutoff as i64;
    let mut atoms = Vec::with_capacity(count as usize);
    let mut point = vec![-r; d];
    loop {
        let norm2: f64 = point.iter().map(|&x| (x * x) as f64).sum();
        atoms.push((Element::Lattice(point.clone()), (1.0 + norm2).powf(-s)));
        let mut i = d;
        loop {
            if i == 0 {
                return finish(kind, atoms, d, s, cutoff);
            }
            i -= 1;
            if point[i] < r {
                point[i] += 1;
                break;
            }
            point[i] = -r;
        }
    }
}

fn finish(kind: GroupKind, mut atoms: Vec<(Element, f64)>, d: usize, s: f64, cutoff: u64) -> Result<FiniteMeasure> {
    let inside = compensated_sum(atoms.iter().map(|a| a.1));
    let outside = tail_sum(d, s, cutoff)?;
    let z = inside + outside;
    for a in &mut atoms {
        a.1 /= z;
    }
    Ok(FiniteMeasure::from_parts(kind, atoms, outside / z))
}

/// Estimate of `Σ_{‖k‖_∞ > R} (1+‖k‖²)^{-s}`.
fn tail_sum(d: usize, s: f64, cutoff: u64) -> Result<f64> {
    let tol = 1e-10;
    if d == 1 {
        // A short explicit stretch, then Euler–Maclaurin on each half line.
        let f = |u: f64| (1.0 + u * u).powf(-s);
        let df = |u: f64| -2.0 * s * u * (1.0 + u * u).powf(-s - 1.0);
        let head = compensated_sum((cutoff + 1..=cutoff + 1000).map(|k| f(k as f64)));
        let r = (cutoff + 1000) as f64;
        let integral = integrate_to_infinity(f, r, tol)?.or_infinity();
        return Ok(2.0 * (head + integral - 0.5 * f(r) - df(r) / 12.0));
    }
    // Midpoint rule: each lattice point owns the unit cube around it, so the
    // outside sum is close to the integral over `‖x‖_∞ > R + 1/2`. By
    // symmetry that is `2d` times the region where `x₁` is the largest
    // coordinate and positive; there `y = x₁ u` with `u ∈ [-1,1]^{d-1}`.
    let l = cutoff as f64 + 0.5;
    let per_dim = ((1e5f64).powf(1.0 / (d - 1) as f64).floor() as usize).clamp(4, 48);
    let (nodes, weights) = gauss_legendre(per_dim);
    let inner = |t: f64| -> f64 {
        let mut total = 0.0;
        let mut idx = vec![0usize; d - 1];
        loop {
            let mut u2 = 0.0;
            let mut w = 1.0;
            for &i in &idx {
                u2 += nodes[i] * nodes[i];
                w *= weights[i];
            }
            total += w * (1.0 + t * t * (1.0 + u2)).powf(-s);
            let mut j = 0;
            loop {
                if j == idx.len() {
                    return total * t.powi(d as i32 - 1);
                }
                idx[j] += 1;
                if idx[j] < per_dim {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    };
    let v = integrate_to_infinity(inner, l, tol)?.or_infinity();
    Ok(2.0 * d as f64 * v)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// the Legendre recurrence.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `∫ (1+‖x‖²)^{-s}` over `R^d`, used as an oracle.
#[cfg(test)]
fn full_integral(d: usize, s: f64) -> f64 {
    use statrs::function::gamma::gamma;
    std::f64::consts::PI.powf(d as f64 / 2.0) * gamma(s - d as f64 / 2.0) / gamma(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::check_symmetric;
    use crate::quadrature::integrate;
    use approx::assert_relative_eq;

    #[test]
    fn cauchy_normalizer() {
        let mu = stable_like(1, 1.0, 1000).unwrap();
        let pi = std::f64::consts::PI;
        let c = 1.0 / (pi / pi.tanh());
        assert_relative_eq!(mu.weight(&Element::lattice(&[0])), c, max_relative = 1e-9);
        assert_relative_eq!(c, 0.3171, epsilon = 1e-4);
        assert!(check_symmetric(&mu));
    }

    #[test]
    fn cauchy_tail_deficit() {
        let mu = stable_like(1, 1.0, 10_000).unwrap();
        let c = mu.weight(&Element::lattice(&[0]));
        assert!(mu.deficit() <= 2.0 * c / 1e4);
        assert_relative_eq!(mu.deficit(), 6.3e-5, max_relative = 0.01);
        assert_relative_eq!(mu.mass() + mu.deficit(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn tail_estimate_matches_brute_force() {
        for &alpha in &[0.5, 1.0, 1.5] {
            let s = 0.5 * (1.0 + alpha);
            let brute = 2.0 * compensated_sum((11..2_000_000).map(|k: i64| (1.0 + (k * k) as f64).powf(-s)));
            let rest = 2.0 * integrate_to_infinity(|u: f64| (1.0 + u * u).powf(-s), 2_000_000.0 - 0.5, 1e-10)
                .unwrap()
                .value()
                .unwrap();
            assert_relative_eq!(tail_sum(1, s, 10).unwrap(), brute + rest, max_relative = 1e-6);
        }
    }

    #[test]
    fn planar_tail_against_full_integral() {
        // full integral minus an accurate cube integral recovers the tail
        let (s, r) = (1.5, 30u64);
        let l = r as f64 + 0.5;
        let cube = {
            let inner = |x: f64| integrate(|y: f64| (1.0 + x * x + y * y).powf(-s), -l, l, 1e-12).unwrap();
            integrate(inner, -l, l, 1e-11).unwrap()
        };
        assert_relative_eq!(tail_sum(2, s, r).unwrap(), full_integral(2, s) - cube, max_relative = 1e-6);
    }

    #[test]
    fn planar_law() {
        let mu = stable_like(2, 1.0, 40).unwrap();
        assert_eq!(mu.len(), 81 * 81);
        assert!(check_symmetric(&mu));
        assert!(mu.deficit() > 0.0 && mu.deficit() < 0.05);
        assert_relative_eq!(mu.mass() + mu.deficit(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(7);
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert_relative_eq!(q, 2.0 / 13.0, max_relative = 1e-13);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(stable_like(1, 2.0, 100).is_err());
        assert!(stable_like(1, 1.0, 5).is_err());
        assert!(stable_like(6, 1.0, 1000).is_err());
        assert_eq!(default_cutoff(1), 100_000);
        assert_eq!(default_cutoff(2), 499);
    }
}
