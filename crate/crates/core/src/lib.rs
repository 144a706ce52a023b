//! Return probabilities of symmetric random walks with few moments on
//! finitely generated groups.
//!
//! The crate builds heavy-tailed witness measures on lattices, Heisenberg,
//! lamplighter, free and sol groups, brackets their return probabilities
//! `φ^(2n)(e)` exactly or by sampling, and checks the spectral comparison
//! inequalities that link moment conditions to decay rates on finite
//! quotients.

pub mod asymptotics;
pub mod convolution;
pub mod defaults;
pub mod error;
pub mod groups;
pub mod measures;
pub mod montecarlo;
pub mod quadrature;
pub mod scales;
pub mod spectral;

pub use error::{Error, Result};
pub use convolution::{Method, ReturnSeries, SeriesRecord};
pub use groups::{Element, FiniteQuotient, Group, GroupKind, QuotientKind};
pub use measures::{FiniteMeasure, MeasureSpec};
pub use scales::{Bounds, MomentScale};
pub use spectral::{QuotientOperator, SpectralProfile};
