//! Finitely supported probability measures and the witness constructions:
//! ball uniforms, ball mixtures, stable-like laws, subordinated measures
//! and lamplighter switch–walk–switch measures.
//!
//! A [`FiniteMeasure`] never renormalizes silently. Whatever mass a
//! construction cannot represent is carried in `deficit`, so that
//! `Σ weights + deficit = 1`.

mod fourier;
mod lamplighter;
mod mixture;
mod spec;
mod stable;
mod subordinate;

use std::fmt;

pub use fourier::{FourierSymbol, LineSymbol, SubordinatedSymbol};
pub use lamplighter::lamplighter_switch;
pub use mixture::{ball_mixture, MixtureSpec};
pub use spec::MeasureSpec;
pub use stable::{default_cutoff, stable_like};
pub use subordinate::{subordinate, subordination_coefficients, subordination_tail, tail_rule_truncation};

use crate::error::{Error, Result};
use crate::groups::{invert, Element, Group, GroupKind};

/// Tolerance on `Σ weights + deficit = 1`.
pub const MASS_TOL: f64 = 1e-12;

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// A finitely supported sub-probability measure with explicit deficit.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    kind: GroupKind,
    /// Sorted by element, unique, all weights positive.
    atoms: Vec<(Element, f64)>,
    deficit: f64,
}

impl FiniteMeasure {
    /// Builds a measure from arbitrary atoms; repeated elements are merged
    /// and zero weights removed.
    pub fn from_atoms(
        kind: GroupKind,
        atoms: impl IntoIterator<Item = (Element, f64)>,
        deficit: f64,
    ) -> Result<Self> {
        let mut v: Vec<(Element, f64)> = Vec::new();
        for (g, w) in atoms {
            if !kind.contains(&g) {
                return Err(Error::usage(format!("atom {g} does not belong to {kind}")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::domain(format!("weight {w} at {g} is not a nonnegative number")));
            }
            v.push((g, w));
        }
        if !(deficit.is_finite() && deficit >= 0.0) {
            return Err(Error::domain(format!("deficit {deficit} is not a nonnegative number")));
        }
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Element, f64)> = Vec::with_capacity(v.len());
        for (g, w) in v {
            match merged.last_mut() {
                Some((h, x)) if *h == g => *x += w,
                _ => merged.push((g, w)),
            }
        }
        merged.retain(|(_, w)| *w > 0.0);
        let total = compensated_sum(merged.iter().map(|a| a.1)) + deficit;
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::domain(format!("weights plus deficit sum to {total}, not 1")));
        }
        Ok(FiniteMeasure { kind, atoms: merged, deficit })
    }

    /// Scales nonnegative weights to total mass one.
    pub fn normalized(kind: GroupKind, atoms: impl IntoIterator<Item = (Element, f64)>) -> Result<Self> {
        let v: Vec<(Element, f64)> = atoms.into_iter().collect();
        let total = compensated_sum(v.iter().map(|a| a.1));
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::domain("weights must have positive finite total"));
        }
        Self::from_atoms(kind, v.into_iter().map(|(g, w)| (g, w / total)), 0.0)
    }

    /// Trusted constructor for sorted, unique, positive atoms.
    pub(crate) fn from_parts(kind: GroupKind, atoms: Vec<(Element, f64)>, deficit: f64) -> Self {
        debug_assert!(atoms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(atoms.iter().all(|a| a.1 > 0.0));
        FiniteMeasure { kind, atoms, deficit: deficit.max(0.0) }
    }

    pub fn delta(kind: GroupKind, g: Element) -> Result<Self> {
        Self::from_atoms(kind, [(g, 1.0)], 0.0)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    /// Atoms in canonical element order.
    pub fn atoms(&self) -> &[(Element, f64)] {
        &self.atoms
    }

    pub fn deficit(&self) -> f64 {
        self.deficit
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight(&self, g: &Element) -> f64 {
        self.atoms
            .binary_search_by(|a| a.0.cmp(g))
            .map(|i| self.atoms[i].1)
            .unwrap_or(0.0)
    }

    pub fn max_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).fold(0.0, f64::max)
    }

    /// `Σ weights`, compensated.
    pub fn mass(&self) -> f64 {
        compensated_sum(self.atoms.iter().map(|a| a.1))
    }

    /// `μ̌(g) = μ(g⁻¹)`.
    pub fn reflect(&self) -> Self {
        let mut atoms: Vec<(Element, f64)> = self.atoms.iter().map(|(g, w)| (invert(g), *w)).collect();
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        FiniteMeasure { kind: self.kind, atoms, deficit: self.deficit }
    }

    /// `(μ + μ̌)/2`, which removes rounding asymmetry from measures that
    /// are symmetric in exact arithmetic.
    pub fn symmetrized(&self) -> Self {
        let mut acc: std::collections::BTreeMap<Element, f64> = std::collections::BTreeMap::new();
        for (g, w) in &self.atoms {
            *acc.entry(g.clone()).or_insert(0.0) += 0.5 * w;
            *acc.entry(invert(g)).or_insert(0.0) += 0.5 * w;
        }
        FiniteMeasure { kind: self.kind, atoms: acc.into_iter().collect(), deficit: self.deficit }
    }

    pub fn is_symmetric(&self) -> bool {
        check_symmetric(self)
    }

    /// Whether every atom lies in the `Z^d` translation subgroup.
    pub fn is_translation_supported(&self) -> bool {
        self.atoms.iter().all(|(g, _)| match g {
            Element::Lattice(_) => true,
            Element::Lamplighter { lamps, .. } => lamps.is_empty(),
            _ => false,
        })
    }

    /// Points of `Z` with weights, for measures on `Z`.
    pub fn line_weights(&self) -> Option<Vec<(i64, f64)>> {
        if self.kind != (GroupKind::Lattice { d: 1 }) {
            return None;
        }
        Some(
            self.atoms
                .iter()
                .map(|(g, w)| match g {
                    Element::Lattice(c) => (c[0], *w),
                    _ => unreachable!("lattice measure holds lattice atoms"),
                })
                .collect(),
        )
    }
}

impl fmt::Display for FiniteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (g, w)) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}: {w}")?;
        }
        write!(f, "}}")?;
        if self.deficit > 0.0 {
            write!(f, " + deficit {}", self.deficit)?;
        }
        Ok(())
    }
}

/// `μ = μ̌`, compared exactly.
pub fn check_symmetric(mu: &FiniteMeasure) -> bool {
    mu.atoms.iter().all(|(g, w)| mu.weight(&invert(g)) == *w)
}

/// Uniform probability on the word ball of radius `r`.
pub fn uniform_ball(group: &Group, r: u32) -> Result<FiniteMeasure> {
    let ball = group.ball(r)?;
    let w = 1.0 / ball.len() as f64;
    Ok(FiniteMeasure::from_parts(group.kind(), ball.into_iter().map(|g| (g, w)).collect(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Group;

    #[test]
    fn uniform_balls() {
        let z = Group::new(GroupKind::Lattice { d: 1 }).unwrap();
        let mu = uniform_ball(&z, 1).unwrap();
        assert_eq!(mu.len(), 3);
        for x in -1..=1 {
            assert_eq!(mu.weight(&Element::lattice(&[x])), 1.0 / 3.0);
        }
        assert_eq!(mu.deficit(), 0.0);
        assert!(check_symmetric(&mu));

        let z2 = Group::new(GroupKind::Lattice { d: 2 }).unwrap();
        let mu = uniform_ball(&z2, 1).unwrap();
        assert_eq!(mu.len(), 5);
        assert!(mu.atoms().iter().all(|a| a.1 == 0.2));

        let l = Group::new(GroupKind::Lamplighter { d: 1 }).unwrap();
        let mu = uniform_ball(&l, 1).unwrap();
        assert_eq!(mu.len(), 4);
        assert!(mu.atoms().iter().all(|a| a.1 == 0.25));
        assert!(mu.weight(&Element::lamplighter(&[vec![0]], &[0])) == 0.25);
        assert!(check_symmetric(&mu));

        let h = Group::new(GroupKind::Heisenberg).unwrap();
        assert!(check_symmetric(&uniform_ball(&h, 3).unwrap()));
    }

    #[test]
    fn asymmetric_and_reflected() {
        let k = GroupKind::Lattice { d: 2 };
        let d = FiniteMeasure::delta(k, Element::lattice(&[1, 0])).unwrap();
        assert!(!check_symmetric(&d));
        assert_eq!(d.reflect().weight(&Element::lattice(&[-1, 0])), 1.0);
    }

    #[test]
    fn construction_checks() {
        let k = GroupKind::Lattice { d: 1 };
        assert!(FiniteMeasure::from_atoms(k, [(Element::lattice(&[0]), 0.5)], 0.0).is_err());
        assert!(FiniteMeasure::from_atoms(k, [(Element::lattice(&[0, 1]), 1.0)], 0.0).is_err());
        assert!(FiniteMeasure::from_atoms(k, [(Element::lattice(&[0]), -0.5), (Element::lattice(&[1]), 1.5)], 0.0).is_err());
        let m = FiniteMeasure::from_atoms(
            k,
            [(Element::lattice(&[2]), 0.25), (Element::lattice(&[2]), 0.25), (Element::lattice(&[3]), 0.0)],
            0.5,
        )
        .unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.weight(&Element::lattice(&[2])), 0.5);
        let n = FiniteMeasure::normalized(k, [(Element::lattice(&[0]), 3.0), (Element::lattice(&[1]), 1.0)]).unwrap();
        assert_eq!(n.weight(&Element::lattice(&[1])), 0.25);
    }
}
