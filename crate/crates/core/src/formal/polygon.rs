use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::FormalError;
use crate::model::ConnectionGerm;
use crate::series::{rat, ComplexRational, PuiseuxSeries, SeriesMatrix};

/// Slopes (in units of `1/z`) with multiplicities, strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub segments: Vec<(BigRational, usize)>,
}

impl NewtonPolygon {
    pub fn rank(&self) -> usize {
        self.segments.iter().map(|s| s.1).sum()
    }

    pub fn irregularity_rational(&self) -> BigRational {
        self.segments
            .iter()
            .map(|(s, m)| s * BigRational::from_integer(BigInt::from(*m)))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    pub fn top_slope(&self) -> BigRational {
        self.segments.last().map(|s| s.0.clone()).unwrap_or_else(BigRational::zero)
    }

    /// Multiplicity of the slope-0 part.
    pub fn slope_zero_multiplicity(&self) -> usize {
        self.segments.iter().filter(|s| s.0.is_zero()).map(|s| s.1).sum()
    }

    pub fn is_regular(&self) -> bool {
        self.top_slope().is_zero()
    }

    pub fn to_report(&self) -> Vec<PolygonSegment> {
        self.segments
            .iter()
            .map(|(s, m)| PolygonSegment { slope: s.to_string(), multiplicity: *m })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolygonSegment {
    pub slope: String,
    pub multiplicity: usize,
}

/// Coefficients `c_0..c_d` of `det(T·Id − A)` (so `c_d = 1`), by Faddeev–LeVerrier.
pub fn char_poly_series(a: &SeriesMatrix) -> Vec<PuiseuxSeries> {
    let d = a.rows();
    let ram = a.ram();
    let mut c = vec![PuiseuxSeries::zero(ram); d + 1];
    c[d] = PuiseuxSeries::one(ram);
    let mut m = SeriesMatrix::zeros(d, d, ram);
    for k in 1..=d {
        m = a.mul(&m).add(&SeriesMatrix::scalar_series(d, &c[d - k + 1]));
        let tr = a.mul(&m).trace();
        c[d - k] = tr.scale(&ComplexRational::real(rat(-1, k as i64)));
    }
    c
}

fn cross(o: &(BigRational, BigRational), a: &(BigRational, BigRational), b: &(BigRational, BigRational)) -> BigRational {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

fn hull_segments(points: &[(BigRational, BigRational)]) -> Vec<(BigRational, usize)> {
    let mut hull: Vec<(BigRational, BigRational)> = Vec::new();
    for p in points {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p).is_positive() {
            hull.pop();
        }
        hull.push(p.clone());
    }
    let mut segs: Vec<(BigRational, usize)> = Vec::new();
    for w in hull.windows(2) {
        let di = &w[1].0 - &w[0].0;
        let slope = -((&w[1].1 - &w[0].1) / &di);
        let slope = if slope.is_negative() { BigRational::zero() } else { slope };
        let mult: usize = di.to_integer().try_into().expect("small width");
        match segs.iter_mut().find(|s| s.0 == slope) {
            Some(s) => s.1 += mult,
            None => segs.push((slope, mult)),
        }
    }
    segs.sort_by(|a, b| a.0.cmp(&b.0));
    segs
}

/// Newton polygon of the `dz/z` operator, from the characteristic polynomial.
///
/// Fails with `InsufficientTruncation` when an unknown coefficient could still
/// move the lower hull.
pub fn newton_polygon(g: &ConnectionGerm) -> Result<NewtonPolygon, FormalError> {
    let a = g.matrix();
    let d = a.rows();
    let q = BigRational::from_integer(BigInt::from(a.ram()));
    let c = char_poly_series(a);
    let zero = BigRational::zero();
    let mut low = Vec::with_capacity(d + 1);
    let mut high = Vec::with_capacity(d + 1);
    for i in 0..=d {
        let coeff = &c[d - i];
        let x = BigRational::from_integer(BigInt::from(i));
        let (lo, hi) = match (coeff.valuation(), coeff.trunc()) {
            (Some(v), _) => {
                let u = (BigRational::from_integer(BigInt::from(v)) / &q).min(zero.clone());
                (u.clone(), u)
            }
            (None, None) => (zero.clone(), zero.clone()),
            (None, Some(n)) => {
                let u = (BigRational::from_integer(BigInt::from(n + 1)) / &q).min(zero.clone());
                (u, zero.clone())
            }
        };
        low.push((x.clone(), lo));
        high.push((x, hi));
    }
    let segs = hull_segments(&low);
    if segs != hull_segments(&high) {
        return Err(FormalError::InsufficientTruncation(
            "an unknown characteristic coefficient could lower the Newton polygon".into(),
        ));
    }
    Ok(NewtonPolygon { segments: segs })
}

/// Sum of slopes with multiplicity; must be an integer.
pub fn irregularity(g: &ConnectionGerm) -> Result<i64, FormalError> {
    let p = newton_polygon(g)?;
    let irr = p.irregularity_rational();
    if !irr.is_integer() {
        return Err(FormalError::NonIntegralIrregularity(irr.to_string()));
    }
    Ok(irr.to_integer().try_into().expect("small irregularity"))
}
