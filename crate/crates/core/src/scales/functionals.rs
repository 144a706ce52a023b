use serde::Serialize;

use super::MomentScale;
use crate::error::{Error, Result};
use crate::groups::Group;
use crate::measures::FiniteMeasure;

/// A two-sided bound; `upper` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn exact(v: f64) -> Self {
        Bounds { lower: v, upper: v }
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Word length of each atom, or the certified lower bound when it lies
/// outside the searched radius.
fn lengths(group: &Group, mu: &FiniteMeasure) -> Result<Vec<(u32, bool, f64)>> {
    if mu.kind() != group.kind() {
        return Err(Error::usage(format!("measure on {} used with group {}", mu.kind(), group.kind())));
    }
    mu.atoms()
        .iter()
        .map(|(g, w)| match group.word_length(g) {
            Ok(l) => Ok((l, true, *w)),
            Err(Error::OutOfRange { lower_bound }) => Ok((lower_bound, false, *w)),
            Err(e) => Err(e),
        })
        .collect()
}

/// `μ(ρ∘|·|) = Σ ρ(|g|) μ(g)`.
///
/// Deficit mass could sit anywhere, so it adds `δ ρ(0)` to the lower bound
/// and makes the upper bound infinite. Atoms beyond the searched radius
/// contribute `ρ(R+1)` below and `+inf` above.
pub fn moment(group: &Group, mu: &FiniteMeasure, rho: &MomentScale) -> Result<Bounds> {
    let mut lower = mu.deficit() * rho.eval(0.0);
    let mut upper = if mu.deficit() > 0.0 { f64::INFINITY } else { 0.0 };
    for (len, exact, w) in lengths(group, mu)? {
        let v = rho.eval(len as f64) * w;
        lower += v;
        upper += if exact { v } else { f64::INFINITY };
    }
    if mu.deficit() > 0.0 {
        upper = f64::INFINITY;
    }
    Ok(Bounds { lower, upper })
}

/// `W(ρ, μ) = sup_{s>0} s μ(ρ∘|·| > s)`.
///
/// For a finitely supported measure the supremum is approached as `s`
/// rises to a breakpoint `v = ρ(|g|)`, giving `max_v v μ(ρ∘|·| ≥ v)`.
pub fn weak_moment(group: &Group, mu: &FiniteMeasure, rho: &MomentScale) -> Result<Bounds> {
    let mut pts: Vec<(f64, f64)> = lengths(group, mu)?
        .into_iter()
        .map(|(len, _, w)| (rho.eval(len as f64), w))
        .collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut tail = 0.0;
    let mut best: f64 = 0.0;
    let mut i = 0;
    while i < pts.len() {
        let v = pts[i].0;
        while i < pts.len() && pts[i].0 == v {
            tail += pts[i].1;
            i += 1;
        }
        best = best.max(v * tail);
    }
    let unbounded = mu.deficit() > 0.0 || lengths(group, mu)?.iter().any(|(_, exact, _)| !exact);
    Ok(Bounds {
        lower: best,
        upper: if unbounded { f64::INFINITY } else { best },
    })
}
