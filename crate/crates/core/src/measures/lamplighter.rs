use super::FiniteMeasure;
use crate::error::{Error, Result};
use crate::groups::{Element, GroupKind};

/// `q = ν ∗ μ ∗ ν` on the lamplighter over `Z^d`, where `ν = ½(δ_e + δ_t)`
/// switches the lamp under the marker and `μ` moves the marker.
///
/// Each step `k` of `μ` yields the four elements with lamps
/// `∅, {0}, {k}, {0}△{k}` and marker `k`, each with weight `μ(k)/4`.
pub fn lamplighter_switch(base: &FiniteMeasure) -> Result<FiniteMeasure> {
    let d = match base.kind() {
        GroupKind::Lattice { d } | GroupKind::Lamplighter { d } => d,
        other => return Err(Error::usage(format!("switch-walk needs a base on Z^d, not {other}"))),
    };
    if !base.is_translation_supported() {
        return Err(Error::usage("switch-walk base must be supported on marker translations"));
    }
    let origin = vec![0i64; d];
    let mut atoms = Vec::with_capacity(4 * base.len());
    for (g, w) in base.atoms() {
        let k = match g {
            Element::Lattice(c) => c.clone(),
            Element::Lamplighter { marker, .. } => marker.clone(),
            _ => unreachable!("translation-supported"),
        };
        for lamps in [vec![], vec![origin.clone()], vec![k.clone()], vec![origin.clone(), k.clone()]] {
            atoms.push((Element::lamplighter(&lamps, &k), 0.25 * w));
        }
    }
    FiniteMeasure::from_atoms(GroupKind::Lamplighter { d }, atoms, base.deficit())
}
