//! Fixed workloads shared by the criterion benches.

use walklab_core::measures::{lamplighter_switch, stable_like, uniform_ball};
use walklab_core::spectral::quotient_operator;
use walklab_core::{FiniteMeasure, FiniteQuotient, Group, GroupKind, QuotientOperator, Result};

/// Uniform radius-`r` ball on the lamplighter group over `Z`.
pub fn lamplighter_ball(r: u32) -> Result<FiniteMeasure> {
    uniform_ball(&Group::new(GroupKind::Lamplighter { d: 1 })?, r)
}

/// Uniform radius-`r` ball on `Z^d`.
pub fn lattice_ball(d: usize, r: u32) -> Result<FiniteMeasure> {
    uniform_ball(&Group::new(GroupKind::Lattice { d })?, r)
}

/// Switch-walk-move-switch driven by the stable-like law with `α = 1`.
pub fn switch_walk(cutoff: u64) -> Result<FiniteMeasure> {
    lamplighter_switch(&stable_like(1, 1.0, cutoff)?)
}

/// `measure` pushed to the quotient named by `spec`.
pub fn quotient(measure: &FiniteMeasure, spec: &str) -> Result<QuotientOperator> {
    quotient_operator(measure, &FiniteQuotient::new(spec.parse()?)?)
}
