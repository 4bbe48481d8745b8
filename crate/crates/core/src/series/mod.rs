//! Exact truncated Puiseux series over `Q(i)`.

mod literal;
mod matrix;
mod puiseux;
mod scalar;

pub use literal::{LiteralError, SeriesLiteral};
pub use matrix::SeriesMatrix;
pub use puiseux::{PuiseuxSeries, SeriesError, DEFAULT_BUDGET};
pub use scalar::{rat, rat_int, rat_to_f64, rationalize, ComplexLiteral, ComplexRational, IntLit};
