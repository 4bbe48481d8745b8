use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::series::{ComplexRational, PuiseuxSeries, SeriesMatrix};

/// Connection in matrix form: `z∇_{z∂} e = e·A`, i.e. the form `A dz/z` in the basis `e`.
///
/// A horizontal section `s = e·c` satisfies `z∂c + A c = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionGerm {
    a: SeriesMatrix,
}

impl ConnectionGerm {
    pub fn new(a: SeriesMatrix) -> Self {
        assert_eq!(a.rows(), a.cols(), "connection matrix must be square");
        assert!(a.rows() >= 1, "rank must be positive");
        Self { a }
    }

    pub fn matrix(&self) -> &SeriesMatrix {
        &self.a
    }

    pub fn rank(&self) -> usize {
        self.a.rows()
    }

    pub fn ram(&self) -> u32 {
        self.a.ram()
    }

    /// Pull back along `t ↦ z = t^m`: `A_t(t) = m·A(t^m)`.
    pub fn ramified_pullback(&self, m: u32) -> Self {
        let d = self.rank();
        let entries = self.a.entries().iter().map(|e| e.ramify(m)).collect();
        let a = SeriesMatrix::from_entries(d, d, entries);
        Self::new(a.scale(&ComplexRational::from_integer(m as i64)))
    }

    /// Tensor with `E^φ`: `A + z φ'(z) Id`.
    pub fn twist_by_exponential(&self, phi: &PuiseuxSeries) -> Self {
        let d = self.rank();
        let dphi = phi.derive();
        Self::new(self.a.add(&SeriesMatrix::scalar_series(d, &dphi)))
    }

    /// Gauge transform by `G` (new frame `e·G`).
    pub fn gauge(&self, g: &SeriesMatrix, budget: i64) -> Result<Self, crate::series::SeriesError> {
        Ok(Self::new(self.a.gauge(g, budget)?))
    }

    /// Numeric value of `A` at a point specified by `log z`.
    pub fn eval_log(&self, log_z: Complex64) -> DMatrix<Complex64> {
        self.a.eval_log(log_z)
    }

    /// Pole order of `A` in the variable of the germ (0 for logarithmic germs).
    pub fn pole_order(&self) -> i64 {
        self.a.valuation().map_or(0, |v| (-v).max(0))
    }

    pub fn truncate(&self, n: i64) -> Self {
        Self::new(self.a.truncate(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> ComplexRational {
        ComplexRational::from_integer(n)
    }

    #[test]
    fn pullback_examples() {
        let g = ConnectionGerm::new(SeriesMatrix::from_rows(vec![vec![PuiseuxSeries::laurent([(-1, c(-1))])]]));
        let p = g.ramified_pullback(2);
        assert_eq!(p.matrix().get(0, 0), &PuiseuxSeries::laurent([(-2, c(-2))]));
        let zero = ConnectionGerm::new(SeriesMatrix::zeros(2, 2, 1));
        assert!(zero.ramified_pullback(3).matrix().is_exact_zero());
        let half = ComplexRational::from_ratios(1, 2, 0, 1);
        let s = ConnectionGerm::new(SeriesMatrix::scalar_series(2, &PuiseuxSeries::constant(1, half)));
        let p = s.ramified_pullback(4);
        assert_eq!(p.matrix().get(1, 1), &PuiseuxSeries::constant(1, c(2)));
    }

    #[test]
    fn twist_examples() {
        let phi = PuiseuxSeries::laurent([(-1, c(1))]);
        let zero = ConnectionGerm::new(SeriesMatrix::zeros(2, 2, 1));
        let t = zero.twist_by_exponential(&phi);
        assert_eq!(t.matrix().get(0, 0), &PuiseuxSeries::laurent([(-1, c(-1))]));
        assert_eq!(t.matrix().get(1, 1), &PuiseuxSeries::laurent([(-1, c(-1))]));
        assert!(t.twist_by_exponential(&phi.neg()).matrix().is_exact_zero());
    }
}
