use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::series::half_power_schedule;
use crate::defaults;
use crate::error::{Error, Result};
use crate::groups::{multiply_unchecked, Element, Group, GroupKind};
use crate::measures::FiniteMeasure;

/// A finitely supported probability measure with exact rational weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMeasure {
    kind: GroupKind,
    atoms: BTreeMap<Element, BigRational>,
}

impl RationalMeasure {
    pub fn new(kind: GroupKind, atoms: impl IntoIterator<Item = (Element, BigRational)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (g, w) in atoms {
            if !kind.contains(&g) {
                return Err(Error::usage(format!("atom {g} does not belong to {kind}")));
            }
            if w < BigRational::zero() {
                return Err(Error::domain("rational weights must be nonnegative"));
            }
            *map.entry(g).or_insert_with(BigRational::zero) += w;
        }
        map.retain(|_, w| !w.is_zero());
        if map.len() > defaults::RATIONAL_SUPPORT_CAP {
            return Err(Error::resource("rational support exceeds its cap"));
        }
        Ok(RationalMeasure { kind, atoms: map })
    }

    /// Uniform measure on the word ball, with weights exactly `1/V(r)`.
    pub fn uniform_ball(group: &Group, r: u32) -> Result<Self> {
        let ball = group.ball(r)?;
        let w = BigRational::new(BigInt::one(), BigInt::from(ball.len()));
        Self::new(group.kind(), ball.into_iter().map(|g| (g, w.clone())))
    }

    /// The exact binary values of a float measure's weights.
    pub fn from_measure(mu: &FiniteMeasure) -> Result<Self> {
        Self::new(
            mu.kind(),
            mu.atoms().iter().map(|(g, w)| {
                (g.clone(), BigRational::from_float(*w).expect("weights are finite"))
            }),
        )
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn atoms(&self) -> &BTreeMap<Element, BigRational> {
        &self.atoms
    }

    pub fn weight(&self, g: &Element) -> BigRational {
        self.atoms.get(g).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total(&self) -> BigRational {
        self.atoms.values().fold(BigRational::zero(), |a, b| a + b)
    }

    /// `Σ_x μ(x)²`.
    pub fn sum_of_squares(&self) -> BigRational {
        self.atoms.values().fold(BigRational::zero(), |a, b| a + b * b)
    }
}

/// `μ∗ν` in exact arithmetic.
pub fn convolve_exact(mu: &RationalMeasure, nu: &RationalMeasure) -> Result<RationalMeasure> {
    if mu.kind != nu.kind {
        return Err(Error::usage("cannot convolve measures on different groups"));
    }
    let mut out: BTreeMap<Element, BigRational> = BTreeMap::new();
    for (x, wx) in &mu.atoms {
        for (y, wy) in &nu.atoms {
            *out.entry(multiply_unchecked(x, y)?).or_insert_with(BigRational::zero) += wx * wy;
        }
        if out.len() > defaults::RATIONAL_SUPPORT_CAP {
            return Err(Error::resource("rational convolution support exceeds its cap"));
        }
    }
    Ok(RationalMeasure { kind: mu.kind, atoms: out })
}

/// `(2m, φ^{(2m)}(e))` for the half-power schedule up to `max_half`,
/// computed as `Σ_x φ^{(m)}(x)²` in exact arithmetic.
pub fn exact_return_series(phi: &RationalMeasure, max_half: u64) -> Result<Vec<(u64, BigRational)>> {
    let mut power = phi.clone();
    let mut m = 1;
    let mut out = Vec::new();
    for target in half_power_schedule(max_half) {
        while m < target {
            power = convolve_exact(&power, phi)?;
            m += 1;
        }
        out.push((2 * m, power.sum_of_squares()));
    }
    Ok(out)
}
