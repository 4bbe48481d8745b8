//! Symbolic-numeric toolkit for meromorphic connections on a disc.
//!
//! The crate is organised bottom-up:
//!
//! - [`series`]: exact truncated Puiseux series over the Gaussian rationals.
//! - [`exact`]: dense linear algebra and polynomials over `Q(i)`.
//! - [`model`]: connection germs in matrix form and elementary normal forms.
//! - [`formal`]: Newton polygon, irregularity and formal decomposition.
//! - [`sl2`]: sl2-triples adapted to Jordan data.
//! - [`metric`]: the model metric, its curvature, pseudo-curvature and Stokes gluing.
//! - [`index`]: degree, local de Rham dimensions and monodromy invariants.
//! - [`l2lab`]: weighted L² quadrature and Hardy-type primitive constructions.
//! - [`catalog`]: built-in example connections.

pub mod catalog;
pub mod exact;
pub mod formal;
pub mod index;
pub mod l2lab;
pub mod metric;
pub mod model;
pub mod series;
pub mod sl2;

pub use series::{ComplexRational, PuiseuxSeries};
