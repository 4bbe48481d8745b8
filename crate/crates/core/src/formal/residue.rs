use crate::exact::QiMatrix;
use crate::model::{ConnectionGerm, RegularBlockData};
use crate::series::ComplexRational;

use super::decompose::GaugeStep;
use super::shear::{leading, shear_gauge, ShearSearch};
use super::{FormalConfig, FormalError};

#[derive(Clone, Debug)]
pub struct ResidueReduction {
    pub regs: Vec<RegularBlockData>,
    /// Residue matrix after shearing; its eigenvalues have real part in `(−1, 0]`.
    pub residue: QiMatrix,
    pub germ: ConnectionGerm,
    pub steps: Vec<GaugeStep>,
}

pub fn residue_normal_form(g: &ConnectionGerm) -> Result<Vec<RegularBlockData>, FormalError> {
    Ok(residue_reduce(g, &FormalConfig::default())?.regs)
}

fn exact_eigenvalues(m: &QiMatrix) -> Result<Vec<(ComplexRational, usize)>, FormalError> {
    m.char_poly().exact_roots().map_err(|z| FormalError::IrrationalSpectrum(format!("{z:?}")))
}

/// Remove the pole by shearing, then move residue eigenvalues into `Re ∈ (−1, 0]`.
pub fn residue_reduce(g: &ConnectionGerm, cfg: &FormalConfig) -> Result<ResidueReduction, FormalError> {
    let d = g.rank();
    let (mut a, mut steps) = ShearSearch::default().reduce(g.matrix(), 0);
    match leading(&a) {
        Some((0, _)) => {}
        Some(_) => return Err(FormalError::NotLogarithmic),
        None => return Err(FormalError::InsufficientTruncation("residue unknown".into())),
    }
    let q = a.ram() as i64;
    let cap = cfg.shear_cap * q * d as i64;
    let mut used = 0;
    loop {
        let (pole, a0) = leading(&a).ok_or_else(|| FormalError::InsufficientTruncation("residue unknown after shearing".into()))?;
        if pole != 0 {
            return Err(FormalError::NotLogarithmic);
        }
        let eig = exact_eigenvalues(&a0)?;
        let out_of_strip = eig.iter().find(|(l, _)| {
            l.re > num_traits::Zero::zero() || l.re <= num_rational::BigRational::from_integer((-1).into())
        });
        let Some((lam, mult)) = out_of_strip.cloned() else {
            let mut regs: Vec<RegularBlockData> = eig
                .iter()
                .map(|(l, _)| RegularBlockData::new(-l, a0.jordan_partition(l)).expect("valid partition"))
                .collect();
            regs.sort();
            return Ok(ResidueReduction { regs, residue: a0, germ: ConnectionGerm::new(a), steps });
        };
        if used >= cap {
            return Err(FormalError::NotLogarithmic);
        }
        used += 1;
        // Constant gauge: generalized eigenspace of `lam` first, then the rest.
        let mut cols = a0.sub(&QiMatrix::scalar(d, &lam)).pow(mult).kernel();
        for (other, m) in &eig {
            if *other != lam {
                cols.extend(a0.sub(&QiMatrix::scalar(d, other)).pow(*m).kernel());
            }
        }
        let t = QiMatrix::from_columns(&cols);
        let t_inv = t.inverse().expect("generalized eigenvectors span");
        let conj = a.conj_const(&t, &t_inv);
        let step = if lam.re > num_traits::Zero::zero() { -1 } else { 1 };
        let s: Vec<i64> = (0..d).map(|i| if i < mult { step } else { 0 }).collect();
        steps.push(GaugeStep::ConstantGauge { dim: d });
        steps.push(GaugeStep::Shear { exponents: s.clone() });
        a = shear_gauge(&conj, &s);
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rat, PuiseuxSeries, SeriesMatrix};
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn c(n: i64) -> ComplexRational {
        ComplexRational::from_integer(n)
    }

    fn cst(x: ComplexRational) -> PuiseuxSeries {
        PuiseuxSeries::constant(1, x)
    }

    /// RK4 monodromy of `dc/dθ = −i A(r e^{iθ}) c` around a circle.
    fn monodromy_oracle(g: &ConnectionGerm, r: f64) -> DMatrix<Complex64> {
        let d = g.rank();
        let n = 4000;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let f = |theta: f64, c: &DMatrix<Complex64>| {
            let a = g.eval_log(Complex64::new(r.ln(), theta));
            a * c * Complex64::new(0.0, -1.0)
        };
        let mut m = DMatrix::<Complex64>::identity(d, d);
        for k in 0..n {
            let th = k as f64 * h;
            let k1 = f(th, &m);
            let k2 = f(th + h / 2.0, &(&m + &k1 * Complex64::from(h / 2.0)));
            let k3 = f(th + h / 2.0, &(&m + &k2 * Complex64::from(h / 2.0)));
            let k4 = f(th + h, &(&m + &k3 * Complex64::from(h)));
            m += (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4) * Complex64::from(h / 6.0);
        }
        m
    }

    fn numeric_rank(m: &DMatrix<Complex64>, tol: f64) -> usize {
        m.clone().svd(false, false).singular_values.iter().filter(|s| **s > tol).count()
    }

    #[test]
    fn diagonal_residue() {
        let a = SeriesMatrix::from_rows(vec![
            vec![cst(ComplexRational::real(rat(1, 2))), PuiseuxSeries::zero(1)],
            vec![PuiseuxSeries::zero(1), PuiseuxSeries::zero(1)],
        ]);
        let regs = residue_normal_form(&ConnectionGerm::new(a)).unwrap();
        let alphas: Vec<_> = regs.iter().map(|r| (r.alpha.clone(), r.partition.clone())).collect();
        assert_eq!(alphas, vec![(c(0), vec![1]), (ComplexRational::real(rat(1, 2)), vec![1])]);
    }

    #[test]
    fn jordan_residue() {
        let a = SeriesMatrix::from_rows(vec![
            vec![PuiseuxSeries::zero(1), PuiseuxSeries::zero(1)],
            vec![PuiseuxSeries::one(1), PuiseuxSeries::zero(1)],
        ]);
        let regs = residue_normal_form(&ConnectionGerm::new(a)).unwrap();
        assert_eq!(regs, vec![RegularBlockData::new(c(0), vec![2]).unwrap()]);
    }

    #[test]
    fn resonant_residue_matches_monodromy_oracle() {
        // eigenvalues {0, 1}, coupled or not through the z-term
        for coupling in [0i64, 1, 3] {
            let a = SeriesMatrix::from_rows(vec![
                vec![PuiseuxSeries::zero(1), PuiseuxSeries::zero(1)],
                vec![PuiseuxSeries::laurent([(1, c(coupling))]), cst(c(1))],
            ]);
            let g = ConnectionGerm::new(a);
            let regs = residue_normal_form(&g).unwrap();
            assert_eq!(regs.len(), 1);
            assert_eq!(regs[0].alpha, c(0));
            let m = monodromy_oracle(&g, 0.5);
            let rank = numeric_rank(&(m - DMatrix::identity(2, 2)), 1e-6);
            let expected = if rank == 0 { vec![1, 1] } else { vec![2] };
            assert_eq!(regs[0].partition, expected, "coupling {coupling}");
        }
    }

    #[test]
    fn removes_apparent_pole() {
        // A = [[0, z^-1], [0, 0]] is regular singular; shear removes the pole.
        let a = SeriesMatrix::from_rows(vec![
            vec![PuiseuxSeries::zero(1), PuiseuxSeries::laurent([(-1, c(1))])],
            vec![PuiseuxSeries::zero(1), PuiseuxSeries::zero(1)],
        ]);
        let red = residue_reduce(&ConnectionGerm::new(a), &FormalConfig::default()).unwrap();
        assert_eq!(red.regs.iter().map(|r| r.rank()).sum::<usize>(), 2);
        assert!(red.regs.iter().all(|r| r.alpha == c(0)));
    }
}
