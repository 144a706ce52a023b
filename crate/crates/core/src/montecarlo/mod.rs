//! Sampling estimates for walks too large to convolve: the collision
//! estimator of `φ^(2n)(e)` and the range of lattice walks.

use std::collections::{HashMap, HashSet};

use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::WeightedAliasIndex;
use rayon::prelude::*;
use serde::Serialize;

use crate::defaults;
use crate::error::{Error, Result};
use crate::groups::{multiply_unchecked, Element, GroupKind};
use crate::measures::FiniteMeasure;

/// A reproducible random stream: identical `(seed, id)` give identical draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngStream {
    pub seed: u64,
    pub id: u64,
}

impl RngStream {
    pub fn new(seed: u64, id: u64) -> Self {
        RngStream { seed, id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.id);
        rng
    }
}

/// Alias-table sampler for the kept atoms of a measure. The deficit is
/// spread over the atoms by renormalization; each step then has total
/// variation bias at most the deficit.
pub struct StepSampler {
    kind: GroupKind,
    atoms: Vec<Element>,
    alias: WeightedAliasIndex<f64>,
    deficit: f64,
}

impl StepSampler {
    pub fn new(phi: &FiniteMeasure) -> Result<Self> {
        if phi.deficit() > defaults::SAMPLING_DEFICIT_MAX {
            return Err(Error::domain(format!(
                "deficit {:.3e} exceeds the sampling limit {:.0e}",
                phi.deficit(),
                defaults::SAMPLING_DEFICIT_MAX
            )));
        }
        if phi.is_empty() {
            return Err(Error::domain("cannot sample from an empty measure"));
        }
        let weights: Vec<f64> = phi.atoms().iter().map(|a| a.1).collect();
        let alias = WeightedAliasIndex::new(weights).map_err(|e| Error::numeric(format!("alias table: {e}")))?;
        Ok(StepSampler {
            kind: phi.kind(),
            atoms: phi.atoms().iter().map(|a| a.0.clone()).collect(),
            alias,
            deficit: phi.deficit(),
        })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn draw<'a>(&'a self, rng: &mut ChaCha8Rng) -> &'a Element {
        &self.atoms[self.alias.sample(rng)]
    }

    /// The product of `n` independent draws.
    pub fn walk(&self, n: u64, rng: &mut ChaCha8Rng) -> Result<Element> {
        let mut g = self.kind.identity();
        for _ in 0..n {
            g = multiply_unchecked(&g, self.draw(rng))?;
        }
        Ok(g)
    }
}

/// The endpoint of an `n`-step walk driven by `phi`.
pub fn sample_step_product(phi: &FiniteMeasure, n: u64, rng: &mut ChaCha8Rng) -> Result<Element> {
    StepSampler::new(phi)?.walk(n, rng)
}

/// Splits `total` into `blocks` nearly equal parts.
fn block_sizes(total: usize, blocks: usize) -> Vec<usize> {
    (0..blocks).map(|b| total / blocks + usize::from(b < total % blocks)).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CollisionEstimate {
    pub n: u64,
    pub samples: usize,
    pub seed: u64,
    /// `Σ m_x(m_x−1) / (N(N−1))`.
    pub estimate: f64,
    /// Jackknife over the sample blocks.
    pub stderr: f64,
    /// Total-variation distance between the sampled and true endpoint laws
    /// is at most `n δ`.
    pub tv_bias_bound: f64,
}

/// Unbiased collision estimate of `‖φ^(n)‖₂² = φ^(2n)(e)` for symmetric `phi`.
///
/// Samples are drawn in [`defaults::JACKKNIFE_BLOCKS`] blocks, block `b`
/// from stream `(seed, b)`, so results do not depend on the worker count.
pub fn collision_return_estimate(phi: &FiniteMeasure, n: u64, samples: usize, seed: u64) -> Result<CollisionEstimate> {
    if !phi.is_symmetric() {
        return Err(Error::usage("collision estimates need a symmetric measure"));
    }
    if samples < 1000 {
        return Err(Error::usage(format!("collision estimates need at least 1000 samples, got {samples}")));
    }
    let sampler = StepSampler::new(phi)?;
    let sizes = block_sizes(samples, defaults::JACKKNIFE_BLOCKS);
    let tallies: Vec<HashMap<Vec<u8>, u64>> = sizes
        .par_iter()
        .enumerate()
        .map(|(b, &size)| {
            let mut rng = RngStream::new(seed, b as u64).rng();
            let mut tally = HashMap::new();
            for _ in 0..size {
                *tally.entry(sampler.walk(n, &mut rng)?.encode()).or_insert(0u64) += 1;
            }
            Ok(tally)
        })
        .collect::<Result<_>>()?;
    let (estimate, stderr) = collision_jackknife(&tallies, &sizes);
    Ok(CollisionEstimate { n, samples, seed, estimate, stderr, tv_bias_bound: n as f64 * sampler.deficit() })
}

/// Collision estimate and its jackknife standard error from per-block tallies.
fn collision_jackknife<K: std::hash::Hash + Eq + Clone>(tallies: &[HashMap<K, u64>], sizes: &[usize]) -> (f64, f64) {
    let mut total: HashMap<K, u64> = HashMap::new();
    for t in tallies {
        for (k, c) in t {
            *total.entry(k.clone()).or_insert(0) += c;
        }
    }
    let pairs = |m: f64| m * (m - 1.0);
    let big_n: f64 = sizes.iter().sum::<usize>() as f64;
    let full: f64 = total.values().map(|&m| pairs(m as f64)).sum();
    let estimate = full / pairs(big_n);
    let b = tallies.len() as f64;
    let leave_out: Vec<f64> = tallies
        .iter()
        .zip(sizes)
        .map(|(t, &size)| {
            // Σ (m−c)(m−c−1) = Σ m(m−1) − Σ c(2m − c − 1)
            let drop: f64 = t.iter().map(|(k, &c)| (c as f64) * (2.0 * total[k] as f64 - c as f64 - 1.0)).sum();
            (full - drop) / pairs(big_n - size as f64)
        })
        .collect();
    let mean = leave_out.iter().sum::<f64>() / b;
    let var = (b - 1.0) / b * leave_out.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    (estimate, var.sqrt())
}

/// Return probability `q^(m)(e)` of the switch-walk-switch walk
/// `q = ν ∗ μ ∗ ν` on the lamplighter over `Z^d`, from the base `μ` alone.
///
/// `ν` is idempotent, so after `m` steps every site the marker has visited
/// carries an independent fair lamp. Hence `q^(m)(e) = E[2^{−R_m}; S_m = 0]`
/// with `R_m` the number of distinct sites among `S_0, …, S_m`.
///
/// The last step is integrated out: on `S_m = 0` the range does not grow,
/// so each walk of `m − 1` steps contributes `2^{−R_{m−1}} μ(−S_{m−1})`.
/// The field `n` of the result holds `m`; the standard error is that of
/// the sample mean.
pub fn lamplighter_range_estimate(base: &FiniteMeasure, m: u64, samples: usize, seed: u64) -> Result<CollisionEstimate> {
    if !base.is_symmetric() {
        return Err(Error::usage("lamplighter estimates need a symmetric base"));
    }
    if samples < 1000 {
        return Err(Error::usage(format!("lamplighter estimates need at least 1000 samples, got {samples}")));
    }
    if m == 0 {
        return Ok(CollisionEstimate { n: 0, samples, seed, estimate: 1.0, stderr: 0.0, tv_bias_bound: 0.0 });
    }
    let (d, steps, alias) = lattice_steps(base)?;
    let mass = base.mass();
    let weight: HashMap<&[i64], f64> = steps.iter().map(Vec::as_slice).zip(base.atoms().iter().map(|a| a.1 / mass)).collect();
    let sizes = block_sizes(samples, defaults::JACKKNIFE_BLOCKS);
    let blocks: Vec<(f64, f64)> = sizes
        .par_iter()
        .enumerate()
        .map(|(b, &size)| {
            let mut rng = RngStream::new(seed, b as u64).rng();
            let mut seen: HashSet<Vec<i64>> = HashSet::new();
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..size {
                seen.clear();
                let mut pos = vec![0i64; d];
                seen.insert(pos.clone());
                for _ in 1..m {
                    for (p, s) in pos.iter_mut().zip(&steps[alias.sample(&mut rng)]) {
                        *p += s;
                    }
                    if !seen.contains(&pos) {
                        seen.insert(pos.clone());
                    }
                }
                let back: Vec<i64> = pos.iter().map(|x| -x).collect();
                if let Some(w) = weight.get(back.as_slice()) {
                    let x = w * (-(seen.len() as f64) * std::f64::consts::LN_2).exp();
                    sum += x;
                    sum_sq += x * x;
                }
            }
            (sum, sum_sq)
        })
        .collect();
    let k = samples as f64;
    let estimate = blocks.iter().map(|b| b.0).sum::<f64>() / k;
    let second = blocks.iter().map(|b| b.1).sum::<f64>() / k;
    let var = (second - estimate * estimate).max(0.0) * k / (k - 1.0);
    Ok(CollisionEstimate { n: m, samples, seed, estimate, stderr: (var / k).sqrt(), tv_bias_bound: m as f64 * base.deficit() })
}

#[derive(Debug, Clone, Serialize)]
pub struct LaplaceEstimate {
    pub s: f64,
    /// Mean of `e^{−s D_n}`.
    pub value: f64,
    pub stderr: f64,
}

/// Visited-site counts `D_n` of independent lattice walks.
#[derive(Debug, Clone, Serialize)]
pub struct RangeSample {
    pub n: u64,
    pub samples: Vec<u64>,
    pub mean: f64,
    pub variance: f64,
    pub laplace: Vec<LaplaceEstimate>,
}

impl RangeSample {
    fn new(n: u64, samples: Vec<u64>, s_grid: &[f64]) -> Self {
        let k = samples.len() as f64;
        let (mean, variance) = mean_var(samples.iter().map(|&d| d as f64), k);
        let laplace = s_grid
            .iter()
            .map(|&s| {
                let (value, var) = mean_var(samples.iter().map(|&d| (-s * d as f64).exp()), k);
                LaplaceEstimate { s, value, stderr: (var / k).sqrt() }
            })
            .collect();
        RangeSample { n, samples, mean, variance, laplace }
    }

    /// Standard error of the mean range.
    pub fn mean_stderr(&self) -> f64 {
        (self.variance / self.samples.len() as f64).sqrt()
    }
}

fn mean_var(xs: impl Iterator<Item = f64> + Clone, k: f64) -> (f64, f64) {
    let mean = xs.clone().sum::<f64>() / k;
    let var = if k > 1.0 { xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
    (mean, var)
}

fn lattice_steps(mu: &FiniteMeasure) -> Result<(usize, Vec<Vec<i64>>, WeightedAliasIndex<f64>)> {
    let GroupKind::Lattice { d } = mu.kind() else {
        return Err(Error::usage(format!("range needs a measure on Z^d, not {}", mu.kind())));
    };
    let steps = mu
        .atoms()
        .iter()
        .map(|(g, _)| match g {
            Element::Lattice(c) => c.clone(),
            _ => unreachable!("lattice kind"),
        })
        .collect();
    let alias = WeightedAliasIndex::new(mu.atoms().iter().map(|a| a.1).collect())
        .map_err(|e| Error::numeric(format!("alias table: {e}")))?;
    Ok((d, steps, alias))
}

/// Ranges of `walks` walks recorded at each checkpoint in `ns` (one walk
/// of length `max ns` per sample).
pub fn range_profile(mu: &FiniteMeasure, ns: &[u64], walks: usize, s_grid: &[f64], seed: u64) -> Result<Vec<RangeSample>> {
    if ns.is_empty() || walks == 0 {
        return Err(Error::usage("range needs at least one checkpoint and one walk"));
    }
    let (d, steps, alias) = lattice_steps(mu)?;
    let mut checkpoints = ns.to_vec();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let n_max = *checkpoints.last().expect("nonempty");
    let sizes = block_sizes(walks, defaults::JACKKNIFE_BLOCKS.min(walks));
    let blocks: Vec<Vec<Vec<u64>>> = sizes
        .par_iter()
        .enumerate()
        .map(|(b, &size)| {
            let mut rng = RngStream::new(seed, b as u64).rng();
            let mut out = Vec::with_capacity(size);
            let mut seen: HashSet<Vec<i64>> = HashSet::new();
            for _ in 0..size {
                seen.clear();
                let mut pos = vec![0i64; d];
                seen.insert(pos.clone());
                let mut record = Vec::with_capacity(checkpoints.len());
                let mut next = 0;
                for t in 1..=n_max {
                    for (p, s) in pos.iter_mut().zip(&steps[alias.sample(&mut rng)]) {
                        *p += s;
                    }
                    if !seen.contains(&pos) {
                        seen.insert(pos.clone());
                    }
                    if t == checkpoints[next] {
                        record.push(seen.len() as u64);
                        next += 1;
                    }
                }
                out.push(record);
            }
            out
        })
        .collect();
    let all: Vec<&Vec<u64>> = blocks.iter().flatten().collect();
    Ok(checkpoints
        .iter()
        .enumerate()
        .map(|(i, &n)| RangeSample::new(n, all.iter().map(|r| r[i]).collect(), s_grid))
        .collect())
}

/// Range `D_n` of `walks` lattice walks of `n` steps.
pub fn range_functional(mu: &FiniteMeasure, n: u64, walks: usize, s_grid: &[f64], seed: u64) -> Result<RangeSample> {
    if n == 0 {
        return Ok(RangeSample::new(0, vec![1; walks], s_grid));
    }
    Ok(range_profile(mu, &[n], walks, s_grid, seed)?.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convolution::return_series;
    use crate::groups::Group;
    use crate::measures::{lamplighter_switch, stable_like, uniform_ball};
    use rand::Rng;

    fn z() -> Group {
        Group::new(GroupKind::Lattice { d: 1 }).unwrap()
    }

    fn srw_z() -> FiniteMeasure {
        FiniteMeasure::from_atoms(
            GroupKind::Lattice { d: 1 },
            [(Element::lattice(&[1]), 0.5), (Element::lattice(&[-1]), 0.5)],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn streams_replay() {
        let a: Vec<u64> = (0..5).map(|_| RngStream::new(7, 3).rng().gen()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut r1 = RngStream::new(7, 3).rng();
        let mut r2 = RngStream::new(7, 4).rng();
        assert_ne!(r1.gen::<u64>(), r2.gen::<u64>());
        let mu = uniform_ball(&z(), 3).unwrap();
        let g1 = sample_step_product(&mu, 50, &mut RngStream::new(1, 0).rng()).unwrap();
        let g2 = sample_step_product(&mu, 50, &mut RngStream::new(1, 0).rng()).unwrap();
        assert_eq!(g1, g2);
    }

    #[test]
    fn point_mass_walks_stay_home() {
        let l = GroupKind::Lamplighter { d: 1 };
        let e = FiniteMeasure::delta(l, l.identity()).unwrap();
        let mut rng = RngStream::new(0, 0).rng();
        assert_eq!(sample_step_product(&e, 17, &mut rng).unwrap(), l.identity());
        let c = collision_return_estimate(&e, 10, 1000, 5).unwrap();
        assert_eq!((c.estimate, c.stderr), (1.0, 0.0));
    }

    #[test]
    fn two_step_return_frequency() {
        let mu = uniform_ball(&z(), 1).unwrap();
        let sampler = StepSampler::new(&mu).unwrap();
        let mut rng = RngStream::new(11, 0).rng();
        let trials = 100_000;
        let home = (0..trials).filter(|_| sampler.walk(2, &mut rng).unwrap() == Element::lattice(&[0])).count();
        let p = home as f64 / trials as f64;
        let sigma = (1.0 / 3.0 * 2.0 / 3.0 / trials as f64).sqrt();
        assert!((p - 1.0 / 3.0).abs() < 3.0 * sigma, "{p}");
    }

    #[test]
    fn collision_matches_exact_series() {
        let exact = return_series(&srw_z(), 8, 0.0).unwrap().get(16).unwrap().lower;
        let c = collision_return_estimate(&srw_z(), 8, 100_000, 2024).unwrap();
        assert!((c.estimate - exact).abs() < 3.0 * c.stderr, "{} ± {} vs {exact}", c.estimate, c.stderr);
        assert!(c.stderr > 0.0 && c.tv_bias_bound == 0.0);
    }

    #[test]
    fn unbiased_on_a_toy_measure() {
        // five atoms with known Σp² after one step
        let p = [0.1, 0.15, 0.2, 0.25, 0.3];
        let atoms: Vec<(Element, f64)> = [-2i64, -1, 0, 1, 2].iter().zip(p).map(|(&x, w)| (Element::lattice(&[x]), w)).collect();
        let toy = FiniteMeasure::from_atoms(GroupKind::Lattice { d: 1 }, atoms, 0.0).unwrap();
        let sampler = StepSampler::new(&toy).unwrap();
        let truth: f64 = p.iter().map(|x| x * x).sum();
        let reps = 200;
        let (k, n) = (20usize, 1000usize);
        let ests: Vec<f64> = (0..reps)
            .map(|r| {
                let sizes = block_sizes(n, k);
                let tallies: Vec<HashMap<Vec<u8>, u64>> = sizes
                    .iter()
                    .enumerate()
                    .map(|(b, &s)| {
                        let mut rng = RngStream::new(r, b as u64).rng();
                        let mut t = HashMap::new();
                        for _ in 0..s {
                            *t.entry(sampler.walk(1, &mut rng).unwrap().encode()).or_insert(0) += 1;
                        }
                        t
                    })
                    .collect();
                collision_jackknife(&tallies, &sizes).0
            })
            .collect();
        let (mean, var) = mean_var(ests.iter().copied(), reps as f64);
        assert!((mean - truth).abs() < 3.0 * (var / reps as f64).sqrt(), "{mean} vs {truth}");
    }

    #[test]
    fn tally_order_does_not_matter() {
        let a: HashMap<u32, u64> = [(1, 3), (2, 1), (5, 2)].into_iter().collect();
        let b: HashMap<u32, u64> = [(1, 1), (7, 2)].into_iter().collect();
        let (e1, s1) = collision_jackknife(&[a.clone(), b.clone()], &[6, 3]);
        let (e2, s2) = collision_jackknife(&[b, a], &[3, 6]);
        assert_eq!(e1, e2);
        assert!((s1 - s2).abs() < 1e-15);
        // 4·3 + 1·0 + 2·1 + 2·1 = 16 pairs over 9·8
        assert!((e1 - 16.0 / 72.0).abs() < 1e-15);
    }

    #[test]
    fn lamplighter_collision_is_feasible() {
        // Return probabilities fall like exp(−c√n); at n = 16 they are near
        // 6e-6, which 2·10⁴ samples resolve.
        let q = lamplighter_switch(&stable_like(1, 1.0, 1000).unwrap()).unwrap();
        let c = collision_return_estimate(&q, 16, 20_000, 1).unwrap();
        assert!(c.estimate > 0.0 && c.stderr / c.estimate < 0.3, "{c:?}");
        assert!(c.tv_bias_bound < 16.0 * 1e-3);
    }

    #[test]
    fn range_identity_matches_exact_lamplighter_returns() {
        let base = uniform_ball(&z(), 1).unwrap();
        let q = lamplighter_switch(&base).unwrap();
        let exact = return_series(&q, 3, 0.0).unwrap();
        for m in [2u64, 4, 6] {
            let truth = exact.get(m).unwrap().lower;
            let r = lamplighter_range_estimate(&base, m, 200_000, 11).unwrap();
            assert!((r.estimate - truth).abs() < 4.0 * r.stderr, "m={m}: {} ± {} vs {truth}", r.estimate, r.stderr);
        }
    }

    #[test]
    fn range_identity_agrees_with_collisions() {
        let base = stable_like(1, 1.0, 1000).unwrap();
        let q = lamplighter_switch(&base).unwrap();
        let c = collision_return_estimate(&q, 8, 20_000, 5).unwrap();
        let r = lamplighter_range_estimate(&base, 16, 100_000, 5).unwrap();
        let sigma = (c.stderr.powi(2) + r.stderr.powi(2)).sqrt();
        assert!((c.estimate - r.estimate).abs() < 4.0 * sigma, "{c:?} vs {r:?}");
        assert!(r.stderr / r.estimate < 0.1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let skew = FiniteMeasure::delta(GroupKind::Lattice { d: 1 }, Element::lattice(&[1])).unwrap();
        assert!(collision_return_estimate(&skew, 4, 1000, 0).is_err());
        assert!(collision_return_estimate(&srw_z(), 4, 10, 0).is_err());
        let lossy = stable_like(1, 0.5, 10).unwrap();
        assert!(lossy.deficit() > 1e-3 && StepSampler::new(&lossy).is_err());
    }

    #[test]
    fn one_step_range() {
        let r = range_functional(&srw_z(), 1, 1000, &[0.5], 3).unwrap();
        assert!(r.samples.iter().all(|&d| d == 2));
        assert_eq!(r.mean, 2.0);
        assert!((r.laplace[0].value - (-1.0f64).exp()).abs() < 1e-12);
        let lazy = range_functional(&uniform_ball(&z(), 1).unwrap(), 1, 1000, &[], 3).unwrap();
        assert!(lazy.samples.iter().all(|&d| d == 1 || d == 2));
    }

    #[test]
    fn range_bounds_and_replay() {
        let mu = uniform_ball(&Group::new(GroupKind::Lattice { d: 2 }).unwrap(), 1).unwrap();
        let a = range_profile(&mu, &[10, 100], 200, &[0.1], 9).unwrap();
        let b = range_profile(&mu, &[100, 10], 200, &[0.1], 9).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.samples, y.samples);
            assert!(x.samples.iter().all(|&d| d >= 1 && d <= x.n + 1));
        }
        assert!(a[1].mean > a[0].mean);
    }

    fn slope(samples: &[RangeSample], scale: impl Fn(f64) -> f64) -> f64 {
        let pts: Vec<(f64, f64)> = samples.iter().map(|r| (scale(r.n as f64).ln(), r.mean.ln())).collect();
        let k = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
        pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>()
    }

    #[test]
    fn range_growth_exponents() {
        let ns: Vec<u64> = (6..=12).map(|k| 1 << k).collect();
        let srw = range_profile(&srw_z(), &ns, 2000, &[], 1).unwrap();
        let s = slope(&srw, |n| n);
        assert!((s - 0.5).abs() < 0.05, "{s}");
        // The discrete Cauchy walk is recurrent with range of order n / log n,
        // so the plain log-log slope sits near 0.85 on this window.
        let cauchy = range_profile(&stable_like(1, 1.0, 100_000).unwrap(), &ns, 500, &[], 1).unwrap();
        let plain = slope(&cauchy, |n| n);
        let corrected = slope(&cauchy, |n| n / n.ln());
        assert!(plain > 0.75 && plain < 0.95, "{plain}");
        assert!((corrected - 1.0).abs() < 0.1, "{corrected}");
    }
}
