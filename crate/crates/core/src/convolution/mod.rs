//! Convolution of finitely supported measures, return-probability series
//! with two-sided bounds, and the ball-mixture sup-norm bound.
//!
//! Every dropped atom is added to the deficit, so a computed power is
//! pointwise below the true one and the deficit bounds the difference in
//! total mass.

mod cache;
mod dense;
mod exact;
mod fourier;
mod series;

use std::collections::HashMap;

use rayon::prelude::*;

pub use cache::{read_power, write_power, CacheHeader};
pub use dense::DenseGrid;
pub use exact::{convolve_exact, exact_return_series, RationalMeasure};
pub use fourier::{fourier_return_series, FourierOptions};
pub use series::{half_power_schedule, return_series, Method, ReturnSeries, SeriesRecord};

use crate::defaults;
use crate::error::{Error, Result};
use crate::groups::{multiply_unchecked, Element, GroupKind};
use crate::measures::{compensated_sum, FiniteMeasure, MixtureSpec};

/// Default drop threshold for a measure with `support` atoms.
pub fn default_epsilon(support: usize) -> f64 {
    defaults::DROP_EPSILON / support.max(1) as f64
}

/// Deficit of `μ∗ν` before any dropping.
fn product_deficit(a: f64, b: f64) -> f64 {
    a + b - a * b
}

/// Left atoms per parallel work unit. Fixed, so results do not depend on
/// the number of workers.
const CHUNK: usize = 2048;

/// `μ∗ν`, dropping atoms below `eps` into the deficit.
pub fn convolve(mu: &FiniteMeasure, nu: &FiniteMeasure, eps: f64) -> Result<FiniteMeasure> {
    if mu.kind() != nu.kind() {
        return Err(Error::usage(format!("cannot convolve measures on {} and {}", mu.kind(), nu.kind())));
    }
    if !(eps >= 0.0) {
        return Err(Error::usage(format!("drop threshold must be nonnegative, got {eps}")));
    }
    let deficit = product_deficit(mu.deficit(), nu.deficit());
    if use_dense(mu, nu) {
        let a = DenseGrid::from_measure(mu)?.expect("lattice measure");
        let b = DenseGrid::from_measure(nu)?.expect("lattice measure");
        let (mut c, noise) = a.convolve(&b)?;
        let dropped = c.drop_below(eps);
        return Ok(c.to_measure(mu.kind(), deficit + noise + dropped));
    }
    convolve_sparse(mu, nu, eps, deficit)
}

fn use_dense(mu: &FiniteMeasure, nu: &FiniteMeasure) -> bool {
    if !matches!(mu.kind(), GroupKind::Lattice { .. }) || mu.is_empty() || nu.is_empty() {
        return false;
    }
    let fill = |m: &FiniteMeasure| DenseGrid::fill_ratio(m).unwrap_or(0.0) >= defaults::DENSE_FILL_RATIO;
    // Tiny products are cheaper through the map.
    fill(mu) && fill(nu) && mu.len() * nu.len() > 4096
}

fn convolve_sparse(mu: &FiniteMeasure, nu: &FiniteMeasure, eps: f64, deficit: f64) -> Result<FiniteMeasure> {
    let estimate = mu.len() as f64 * nu.len() as f64;
    if estimate > 50.0 * defaults::SUPPORT_CAP as f64 {
        return Err(Error::resource(format!(
            "{} x {} atom product is too large; raise epsilon",
            mu.len(),
            nu.len()
        )));
    }
    let partials: Vec<Result<HashMap<Element, f64>>> = mu
        .atoms()
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc: HashMap<Element, f64> = HashMap::new();
            for (x, wx) in chunk {
                for (y, wy) in nu.atoms() {
                    *acc.entry(multiply_unchecked(x, y)?).or_insert(0.0) += wx * wy;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total: HashMap<Element, f64> = HashMap::new();
    for part in partials {
        for (g, w) in part? {
            *total.entry(g).or_insert(0.0) += w;
        }
        if total.len() > defaults::SUPPORT_CAP {
            return Err(Error::resource("convolution support exceeds the cap; raise epsilon"));
        }
    }
    let mut dropped = Vec::new();
    let mut atoms: Vec<(Element, f64)> = total
        .into_iter()
        .filter(|(_, w)| {
            if *w < eps {
                dropped.push(*w);
                false
            } else {
                *w > 0.0
            }
        })
        .collect();
    atoms.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(FiniteMeasure::from_parts(mu.kind(), atoms, deficit + compensated_sum(dropped)))
}

/// `Σ_{i<K} e^{-nσ_i}(b_i − b_{i+1}) + b_K`, an upper bound on
/// `‖φ^{(n)}‖_∞` for the mixture described by `spec`.
pub fn mixture_sup_bound(spec: &MixtureSpec, n: u64) -> f64 {
    let (sigma, b) = (spec.sigma(), spec.b());
    let k = b.len();
    let mut total = b[k - 1];
    for i in 0..k - 1 {
        total += (-(n as f64) * sigma[i]).exp() * (b[i] - b[i + 1]);
    }
    total
}
