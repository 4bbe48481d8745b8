use num_traits::Zero;

use crate::exact::{solve_sylvester, QiMatrix};
use crate::model::ConnectionGerm;
use crate::series::{rat, ComplexRational, PuiseuxSeries, SeriesMatrix};

use super::shear::leading;
use super::FormalError;

/// Result of splitting a germ along the spectrum of its leading coefficient.
#[derive(Clone, Debug)]
pub struct SpectralSplit {
    pub blocks: Vec<ConnectionGerm>,
    /// Eigenvalue of the leading coefficient on each block.
    pub eigenvalues: Vec<ComplexRational>,
    /// `G = T0·(Id + O(t))` with `G⁻¹AG + G⁻¹z∂G` block diagonal.
    pub gauge: SeriesMatrix,
    /// Number of orders solved.
    pub orders: i64,
}

/// Split into blocks grouping generalized eigenspaces of the leading coefficient.
pub fn split_by_spectrum(g: &ConnectionGerm, budget: i64) -> Result<(Vec<ConnectionGerm>, SeriesMatrix), FormalError> {
    let s = split_detailed(g, budget)?;
    Ok((s.blocks, s.gauge))
}

pub fn split_detailed(g: &ConnectionGerm, budget: i64) -> Result<SpectralSplit, FormalError> {
    let a = g.matrix();
    let d = a.rows();
    let q = a.ram() as i64;
    let (r, lead) = leading(a).ok_or_else(|| FormalError::InsufficientTruncation("leading coefficient unknown".into()))?;
    let v0 = -r;
    let eig = lead
        .char_poly()
        .exact_roots()
        .map_err(|z| FormalError::IrrationalSpectrum(format!("{z:?}")))?;
    if eig.len() < 2 {
        return Err(FormalError::NilpotentLeading);
    }
    // Constant gauge to generalized eigenspaces.
    let mut groups: Vec<(ComplexRational, Vec<Vec<ComplexRational>>)> = eig
        .iter()
        .map(|(lam, mult)| (lam.clone(), lead.sub(&QiMatrix::scalar(d, lam)).pow(*mult).kernel()))
        .collect();
    // Keep the coordinate order when the input is already split.
    groups.sort_by_key(|(_, k)| k.iter().filter_map(|v| v.iter().position(|x| !x.is_zero())).min());
    let eig: Vec<ComplexRational> = groups.iter().map(|g| g.0.clone()).collect();
    let mut cols = Vec::new();
    let mut sizes = Vec::new();
    for (_, k) in groups {
        sizes.push(k.len());
        cols.extend(k);
    }
    let t0 = QiMatrix::from_columns(&cols);
    let t0_inv = t0.inverse().expect("generalized eigenvectors span");
    let a1 = a.conj_const(&t0, &t0_inv);
    let mut k_max = budget;
    if let Some(n) = a1.trunc() {
        k_max = k_max.min(n - v0);
    }
    if k_max < 0 {
        return Err(FormalError::InsufficientTruncation("no coefficients beyond the leading term".into()));
    }
    let offs: Vec<usize> = sizes.iter().scan(0, |acc, s| {
        let o = *acc;
        *acc += s;
        Some(o)
    }).collect();
    let coeffs: Vec<QiMatrix> = (0..=k_max).map(|j| a1.coeff(v0 + j)).collect();
    let a0 = &coeffs[0];
    let diag_blocks: Vec<QiMatrix> = (0..sizes.len()).map(|b| a0.submatrix(offs[b], offs[b], sizes[b], sizes[b])).collect();
    let mut gs: Vec<QiMatrix> = vec![QiMatrix::identity(d)];
    let mut bs: Vec<QiMatrix> = vec![a0.clone()];
    for k in 1..=k_max {
        let mut f = QiMatrix::zeros(d, d);
        for j in 1..=k {
            if !coeffs[j as usize].is_zero() {
                f = f.add(&coeffs[j as usize].mul(&gs[(k - j) as usize]));
            }
        }
        for j in 1..k {
            if !bs[j as usize].is_zero() {
                f = f.sub(&gs[(k - j) as usize].mul(&bs[j as usize]));
            }
        }
        if r > 0 && k - r >= 0 {
            f = f.add(&gs[(k - r) as usize].scale(&ComplexRational::real(rat(k - r, q))));
        }
        let shift = if r == 0 { ComplexRational::real(rat(k, q)) } else { ComplexRational::from_integer(0) };
        let mut gk = QiMatrix::zeros(d, d);
        let mut bk = QiMatrix::zeros(d, d);
        for bi in 0..sizes.len() {
            for bj in 0..sizes.len() {
                let fij = f.submatrix(offs[bi], offs[bj], sizes[bi], sizes[bj]);
                if bi == bj {
                    bk.set_block(offs[bi], offs[bj], &fij);
                } else if !fij.is_zero() {
                    let x = solve_sylvester(&diag_blocks[bi], &diag_blocks[bj], &shift, &fij.neg())
                        .ok_or(FormalError::ResonantSplit)?;
                    gk.set_block(offs[bi], offs[bj], &x);
                }
            }
        }
        gs.push(gk);
        bs.push(bk);
    }
    let ram = a.ram();
    let series_from = |ms: &[QiMatrix], base: i64, trunc: i64| {
        let mut out = SeriesMatrix::zeros(d, d, ram);
        for i in 0..d {
            for j in 0..d {
                let terms = ms.iter().enumerate().map(|(k, m)| (base + k as i64, m[(i, j)].clone()));
                out.set(i, j, PuiseuxSeries::new(ram, terms, Some(trunc)));
            }
        }
        out
    };
    let gser = series_from(&gs, 0, k_max);
    let bser = series_from(&bs, v0, v0 + k_max);
    // Conjugating back: A1·G + z∂G − G·B must vanish to the truncation.
    let resid = a1.mul(&gser).add(&gser.derive()).sub(&gser.mul(&bser));
    if !resid.is_zero() {
        return Err(FormalError::InsufficientTruncation("splitting residual does not vanish".into()));
    }
    let blocks = (0..sizes.len())
        .map(|b| ConnectionGerm::new(bser.submatrix(offs[b], offs[b], sizes[b], sizes[b])))
        .collect();
    Ok(SpectralSplit {
        blocks,
        eigenvalues: eig,
        gauge: gser.mul_const_left(&t0),
        orders: k_max,
    })
}
