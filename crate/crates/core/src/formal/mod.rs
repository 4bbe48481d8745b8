//! Newton polygon, irregularity and formal decomposition of connection germs.

mod decompose;
mod polygon;
mod residue;
mod shear;
mod split;

pub use decompose::{formal_decompose, round_trip_check, Decomposition, GaugeStep};
pub use polygon::{char_poly_series, irregularity, newton_polygon, NewtonPolygon, PolygonSegment};
pub use residue::{residue_normal_form, residue_reduce, ResidueReduction};
pub use shear::{shear_gauge, ShearSearch};
pub use split::{split_by_spectrum, split_detailed, SpectralSplit};

use crate::series::{SeriesError, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormalError {
    #[error("InsufficientTruncation: {0}")]
    InsufficientTruncation(String),
    #[error("NonIntegralIrregularity: {0}")]
    NonIntegralIrregularity(String),
    #[error("NilpotentLeading: leading coefficient has a single eigenvalue")]
    NilpotentLeading,
    #[error("IrrationalSpectrum: eigenvalues outside Q(i) (numeric {0})")]
    IrrationalSpectrum(String),
    #[error("NotLogarithmic: pole not removable within the shearing budget")]
    NotLogarithmic,
    #[error("RamificationGuardExceeded: q = {0}")]
    RamificationGuardExceeded(u32),
    #[error("RankGuardExceeded: rank {0} > guard {1}")]
    RankGuardExceeded(usize, usize),
    #[error("ResonantSplit: eigenvalue difference hits the integer lattice")]
    ResonantSplit,
    #[error("Series: {0}")]
    Series(#[from] SeriesError),
}

impl FormalError {
    /// Short variant name, as surfaced by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            FormalError::InsufficientTruncation(_) => "InsufficientTruncation",
            FormalError::NonIntegralIrregularity(_) => "NonIntegralIrregularity",
            FormalError::NilpotentLeading => "NilpotentLeading",
            FormalError::IrrationalSpectrum(_) => "IrrationalSpectrum",
            FormalError::NotLogarithmic => "NotLogarithmic",
            FormalError::RamificationGuardExceeded(_) => "RamificationGuardExceeded",
            FormalError::RankGuardExceeded(..) => "RankGuardExceeded",
            FormalError::ResonantSplit => "ResonantSplit",
            FormalError::Series(_) => "ZeroLeadingTerm",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalConfig {
    /// Trusted terms past the valuation for infinite expansions.
    pub budget: i64,
    pub rank_guard: usize,
    pub ram_guard: u32,
    /// Maximal total integer shift applied to one eigenvalue.
    pub shear_cap: i64,
}

impl Default for FormalConfig {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, rank_guard: 4, ram_guard: 12, shear_cap: 8 }
    }
}
