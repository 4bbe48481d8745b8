//! Connection germs in matrix form and elementary normal forms.

mod elementary;
mod germ;
mod sigma;
mod spec_file;

pub use elementary::{ElementaryBlock, ElementaryModel, RegularBlockData};
pub use germ::ConnectionGerm;
pub use sigma::{descends_to_base, sigma_pullback, sigma_pullback_symbolic, DescentCertificate, SymbolicPhi};
pub use spec_file::{complex_from_pair, pair_from_complex, BlockLiteral, ConnectionSpec, RationalLit, RegLiteral, SpecError, StokesConstant, StokesLiteral};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("rotation by a primitive {order}-th root of unity leaves Q(i) (q = {q}, k = {k}, exponent {exponent})")]
    IrrationalRootOfUnity { q: u32, k: u32, exponent: i64, order: u32 },
}
