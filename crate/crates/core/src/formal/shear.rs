use crate::exact::QiMatrix;
use crate::series::{rat, ComplexRational, PuiseuxSeries, SeriesMatrix};

use super::decompose::GaugeStep;

/// Gauge by `S = diag(t^{s_i})`: entry `(i, j)` gains `t^{s_j − s_i}`, the diagonal gains `s_i/q`.
pub fn shear_gauge(a: &SeriesMatrix, s: &[i64]) -> SeriesMatrix {
    let d = a.rows();
    let q = a.ram() as i64;
    let mut out = SeriesMatrix::zeros(d, d, a.ram());
    for i in 0..d {
        for j in 0..d {
            let mut e = a.get(i, j).shift(s[j] - s[i]);
            if i == j && s[i] != 0 {
                e = e.add(&PuiseuxSeries::constant(a.ram(), ComplexRational::real(rat(s[i], q))));
            }
            out.set(i, j, e);
        }
    }
    out
}

/// Pole order and leading coefficient, if the leading coefficient is fully known.
pub(crate) fn leading(a: &SeriesMatrix) -> Option<(i64, QiMatrix)> {
    let m = a.valuation().unwrap_or(0).min(0);
    if a.entries().iter().any(|e| e.trunc().is_some_and(|t| t < m)) {
        return None;
    }
    Some((-m, a.coeff(m)))
}

pub(crate) fn is_nilpotent(m: &QiMatrix) -> bool {
    m.pow(m.rows()).is_zero()
}

/// Brute-force search over diagonal shears in a Jordan basis of the nilpotent leading term.
pub struct ShearSearch {
    /// Largest absolute shear exponent tried per basis vector.
    pub radius: i64,
    pub max_rounds: usize,
}

impl Default for ShearSearch {
    fn default() -> Self {
        Self { radius: 2, max_rounds: 32 }
    }
}

impl ShearSearch {
    /// Lower the pole order towards `target` while the leading term stays nilpotent.
    /// Returns the reduced matrix and the gauge steps taken.
    pub fn reduce(&self, a: &SeriesMatrix, target: i64) -> (SeriesMatrix, Vec<GaugeStep>) {
        let d = a.rows();
        let mut cur = a.clone();
        let mut steps = Vec::new();
        for _ in 0..self.max_rounds {
            let Some((pole, lead)) = leading(&cur) else { break };
            if pole <= target || !is_nilpotent(&lead) {
                break;
            }
            let Some((p, _)) = lead.nilpotent_jordan_basis() else { break };
            let p_inv = p.inverse().expect("Jordan basis is invertible");
            let conj = cur.conj_const(&p, &p_inv);
            let score = |m: &SeriesMatrix| leading(m).map(|(po, l)| (po, l.rank()));
            let Some(base) = score(&conj) else { break };
            let mut best: Option<((i64, usize), Vec<i64>, SeriesMatrix)> = None;
            for radius in 1..=self.radius {
                let mut s = vec![-radius; d];
                s[0] = 0;
                loop {
                    if s.iter().any(|x| *x != 0) {
                        let cand = shear_gauge(&conj, &s);
                        if let Some(sc) = score(&cand) {
                            if sc < base && best.as_ref().is_none_or(|b| sc < b.0) {
                                best = Some((sc, s.clone(), cand));
                            }
                        }
                    }
                    if !next_vector(&mut s[1..], radius) {
                        break;
                    }
                }
                if best.is_some() {
                    break;
                }
            }
            let Some((_, s, cand)) = best else { break };
            steps.push(GaugeStep::ConstantGauge { dim: d });
            steps.push(GaugeStep::Shear { exponents: s });
            cur = cand;
        }
        (cur, steps)
    }
}

/// Odometer over `[-r, r]^n`; returns false after the last vector.
fn next_vector(s: &mut [i64], r: i64) -> bool {
    for x in s.iter_mut() {
        if *x < r {
            *x += 1;
            return true;
        }
        *x = -r;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> ComplexRational {
        ComplexRational::from_integer(n)
    }

    #[test]
    fn shear_of_pulled_back_airy_lowers_pole() {
        let a = SeriesMatrix::from_rows(vec![
            vec![PuiseuxSeries::zero(1), PuiseuxSeries::constant(1, c(2))],
            vec![PuiseuxSeries::laurent([(-2, c(2))]), PuiseuxSeries::zero(1)],
        ]);
        let (b, steps) = ShearSearch::default().reduce(&a, 1);
        let (pole, lead) = leading(&b).unwrap();
        assert_eq!(pole, 1);
        assert!(!is_nilpotent(&lead));
        assert!(!steps.is_empty());
    }

    #[test]
    fn shear_formula() {
        let a = SeriesMatrix::from_rows(vec![
            vec![PuiseuxSeries::zero(1), PuiseuxSeries::laurent([(-1, c(1))])],
            vec![PuiseuxSeries::zero(1), PuiseuxSeries::zero(1)],
        ]);
        let b = shear_gauge(&a, &[0, 1]);
        assert_eq!(b.get(0, 1), &PuiseuxSeries::one(1));
        assert_eq!(b.get(1, 1), &PuiseuxSeries::one(1));
    }
}
