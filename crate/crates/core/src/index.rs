//! Degrees, local de Rham dimensions and global Euler characteristics.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exact::QiMatrix;
use crate::model::{ConnectionGerm, ElementaryModel};
use crate::series::ComplexRational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IndexError {
    #[error("InconsistentResidues: Σ Re α = {0} is not an integer")]
    InconsistentResidues(String),
    #[error("UnstableDimensions: window {b} gives {first:?}, window {} gives {second:?}", b + 5)]
    UnstableDimensions { b: i64, first: (usize, usize), second: (usize, usize) },
    #[error("InsufficientTruncation: coefficient z^{0} of the connection matrix is unknown")]
    InsufficientTruncation(i64),
    #[error("NotSingleValued: germ has ramification {0}")]
    NotSingleValued(u32),
    #[error("RankMismatch: puncture {0} has rank {1}, surface rank is {2}")]
    RankMismatch(String, usize, usize),
    #[error("NotRankOne: rank {0}")]
    NotRankOne(usize),
    #[error("NonIntegralIrregularity: {0}")]
    NonIntegralIrregularity(String),
    #[error("RelationViolated: surface-group relation residual {0:e}")]
    RelationViolated(f64),
}

impl IndexError {
    pub fn name(&self) -> &'static str {
        match self {
            IndexError::InconsistentResidues(_) => "InconsistentResidues",
            IndexError::UnstableDimensions { .. } => "UnstableDimensions",
            IndexError::InsufficientTruncation(_) => "InsufficientTruncation",
            IndexError::NotSingleValued(_) => "NotSingleValued",
            IndexError::RankMismatch(..) => "RankMismatch",
            IndexError::NotRankOne(_) => "NotRankOne",
            IndexError::NonIntegralIrregularity(_) => "NonIntegralIrregularity",
            IndexError::RelationViolated(_) => "RelationViolated",
        }
    }
}

/// Compact surface of genus `g` with elementary models at its punctures.
#[derive(Clone, Debug)]
pub struct SurfaceSpec {
    pub genus: u32,
    pub punctures: Vec<(String, ElementaryModel)>,
    pub rank: usize,
}

impl SurfaceSpec {
    pub fn new(genus: u32, rank: usize, punctures: Vec<(String, ElementaryModel)>) -> Result<Self, IndexError> {
        for (label, m) in &punctures {
            if m.rank() != rank {
                return Err(IndexError::RankMismatch(label.clone(), m.rank(), rank));
            }
        }
        Ok(Self { genus, punctures, rank })
    }
}

/// Residue of a regular summand measured in `z` (the model stores it in `t`).
fn z_residue(m: &ElementaryModel, res: &ComplexRational) -> ComplexRational {
    res.scale(&BigRational::new(BigInt::one(), BigInt::from(m.ram())))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeReport {
    pub deg_l: i64,
    /// `Σ_x Re α_x`, exact.
    pub residue_sum: String,
    pub metric_degree: i64,
}

/// `deg L = Σ_x Re α_x + deg(L, k)` with `deg(L, k) = 0`.
pub fn degree_check(s: &SurfaceSpec) -> Result<DegreeReport, IndexError> {
    if s.rank != 1 {
        return Err(IndexError::NotRankOne(s.rank));
    }
    let mut sum = BigRational::zero();
    for (_, m) in &s.punctures {
        for b in m.blocks() {
            for r in &b.regs {
                sum += z_residue(m, &r.residue()).re;
            }
        }
    }
    if !sum.is_integer() {
        return Err(IndexError::InconsistentResidues(sum.to_string()));
    }
    let deg = i64::try_from(sum.to_integer()).map_err(|_| IndexError::InconsistentResidues(sum.to_string()))?;
    Ok(DegreeReport { deg_l: deg, residue_sum: sum.to_string(), metric_degree: 0 })
}

/// Kernel and cokernel of `c ↦ z∂c + Ac` from Laurent polynomials with
/// exponents in `[−B, B]` to the window `[−B − p_i, B]` of row `i`, where
/// `p_i` is the pole order of row `i` of `A`. Terms above `B` are dropped.
pub fn window_dims(g: &ConnectionGerm, b: i64) -> Result<(usize, usize), IndexError> {
    let a = g.matrix();
    if a.ram() != 1 {
        return Err(IndexError::NotSingleValued(a.ram()));
    }
    let d = g.rank();
    let pole = |i: usize| (0..d).filter_map(|j| a.get(i, j).valuation()).map(|v| (-v).max(0)).max().unwrap_or(0);
    let p: Vec<i64> = (0..d).map(pole).collect();
    let mut row_start = Vec::with_capacity(d);
    let mut nrows = 0usize;
    for pi in &p {
        row_start.push(nrows);
        nrows += (2 * b + 1 + pi) as usize;
    }
    let ncols = d * (2 * b + 1) as usize;
    let row_of = |i: usize, k: i64| -> Option<usize> {
        (k >= -b - p[i] && k <= b).then(|| row_start[i] + (k + b + p[i]) as usize)
    };
    let mut m = QiMatrix::zeros(nrows, ncols);
    for j in 0..d {
        for k in -b..=b {
            let col = j * (2 * b + 1) as usize + (k + b) as usize;
            if let Some(r) = row_of(j, k) {
                m[(r, col)] += &ComplexRational::from_integer(k);
            }
            for i in 0..d {
                let entry = a.get(i, j);
                // Needed exponents n with k + n ≤ B.
                for n in -p[i]..=(b - k) {
                    let c = match entry.coeff(n) {
                        Some(c) => c,
                        None if entry.is_exact() => continue,
                        None => return Err(IndexError::InsufficientTruncation(n)),
                    };
                    if c.is_zero() {
                        continue;
                    }
                    if let Some(r) = row_of(i, k + n) {
                        m[(r, col)] += &c;
                    }
                }
            }
        }
    }
    let rank = m.rank();
    Ok((ncols - rank, nrows - rank))
}

/// Default window `2·p·d + 10`.
pub fn default_window(g: &ConnectionGerm) -> i64 {
    2 * g.pole_order() * g.rank() as i64 + 10
}

/// Brute-force local `(h⁰, h¹)` on a window, re-checked at `B + 5`.
pub fn local_full_dims(g: &ConnectionGerm, b: Option<i64>) -> Result<(usize, usize), IndexError> {
    let b = b.unwrap_or_else(|| default_window(g));
    let first = window_dims(g, b)?;
    let second = window_dims(g, b + 5)?;
    if first != second {
        return Err(IndexError::UnstableDimensions { b, first, second });
    }
    Ok(first)
}

/// `dim ker(T^reg − Id)` over the `φ = 0` summands, in the variable `z`.
pub fn regular_invariants(m: &ElementaryModel) -> usize {
    m.blocks()
        .iter()
        .filter(|b| b.phi.is_exact_zero())
        .flat_map(|b| b.regs.iter())
        .filter(|r| {
            let a = z_residue(m, &r.residue());
            a.im.is_zero() && a.re.is_integer()
        })
        .map(|r| r.partition.len())
        .sum()
}

pub fn integral_irregularity(m: &ElementaryModel) -> Result<usize, IndexError> {
    let irr = m.irregularity();
    if !irr.is_integer() {
        return Err(IndexError::NonIntegralIrregularity(irr.to_string()));
    }
    usize::try_from(irr.to_integer()).map_err(|_| IndexError::NonIntegralIrregularity(irr.to_string()))
}

/// `(h⁰, h¹)` of the minimal extension: `(dim ker(T^reg − Id), Irr)`.
pub fn local_min_dims(m: &ElementaryModel) -> Result<(usize, usize), IndexError> {
    Ok((regular_invariants(m), integral_irregularity(m)?))
}

/// `χ = (2 − 2g − n)·d + Σ_x χ_x^min`.
pub fn global_euler(s: &SurfaceSpec) -> Result<i64, IndexError> {
    let n = s.punctures.len() as i64;
    let mut chi = (2 - 2 * s.genus as i64 - n) * s.rank as i64;
    for (_, m) in &s.punctures {
        let (h0, h1) = local_min_dims(m)?;
        chi += h0 as i64 - h1 as i64;
    }
    Ok(chi)
}

/// Monodromy generators `A₁, B₁, …, A_g, B_g, T₁, …, T_n`.
#[derive(Clone, Debug)]
pub struct MonodromyRep {
    pub genus: usize,
    pub dim: usize,
    pub a: Vec<DMatrix<Complex64>>,
    pub b: Vec<DMatrix<Complex64>>,
    pub t: Vec<DMatrix<Complex64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LefschetzReport {
    pub h0: usize,
    pub h2: usize,
    pub equal: bool,
}

const RANK_TOL: f64 = 1e-9;

fn numeric_rank(m: &DMatrix<Complex64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let scale = sv.max().max(1.0);
    sv.iter().filter(|s| **s > RANK_TOL * scale).count()
}

impl MonodromyRep {
    pub fn new(dim: usize, a: Vec<DMatrix<Complex64>>, b: Vec<DMatrix<Complex64>>, t: Vec<DMatrix<Complex64>>) -> Result<Self, IndexError> {
        assert_eq!(a.len(), b.len(), "A and B generators come in pairs");
        assert!(a.iter().chain(&b).chain(&t).all(|m| m.nrows() == dim && m.ncols() == dim), "generators must be {dim}×{dim}");
        let rep = Self { genus: a.len(), dim, a, b, t };
        let res = rep.relation_residual();
        if !(res <= 1e-10) {
            return Err(IndexError::RelationViolated(res));
        }
        Ok(rep)
    }

    pub fn rank(&self) -> usize {
        self.dim
    }

    fn generators(&self) -> impl Iterator<Item = &DMatrix<Complex64>> {
        self.a.iter().chain(&self.b).chain(&self.t)
    }

    /// Max-entry residual of `Π[A_i, B_i] · Π T_j − Id`.
    pub fn relation_residual(&self) -> f64 {
        let d = self.rank();
        let mut prod = DMatrix::<Complex64>::identity(d, d);
        for (a, b) in self.a.iter().zip(&self.b) {
            let ai = a.clone().try_inverse().expect("generators are invertible");
            let bi = b.clone().try_inverse().expect("generators are invertible");
            prod = prod * a * b * ai * bi;
        }
        for t in &self.t {
            prod *= t;
        }
        (prod - DMatrix::identity(d, d)).camax()
    }

    /// Rank-`d` trivial representation on `n` punctures of a genus-`g` surface.
    pub fn trivial(genus: usize, n: usize, d: usize) -> Self {
        let id = DMatrix::<Complex64>::identity(d, d);
        Self { genus, dim: d, a: vec![id.clone(); genus], b: vec![id.clone(); genus], t: vec![id; n] }
    }

    /// Seeded genus-0 representation: `n − 1` random unitaries on a `d − trivial`
    /// dimensional summand, plus `trivial` copies of the trivial representation.
    pub fn random_unitary(seed: u64, n: usize, d: usize, trivial: usize) -> Self {
        assert!(n >= 2 && trivial <= d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = d - trivial;
        let mut ts = Vec::with_capacity(n);
        let mut prod = DMatrix::<Complex64>::identity(e, e);
        for _ in 0..n - 1 {
            let u = random_unitary(&mut rng, e);
            prod *= &u;
            ts.push(u);
        }
        ts.push(prod.adjoint());
        let t = ts
            .into_iter()
            .map(|u| {
                let mut m = DMatrix::<Complex64>::identity(d, d);
                m.view_mut((0, 0), (e, e)).copy_from(&u);
                m
            })
            .collect();
        Self { genus: 0, dim: d, a: Vec::new(), b: Vec::new(), t }
    }
}

fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    g.qr().q()
}

/// `h⁰` = common invariants, `h²` = common coinvariants.
pub fn lefschetz_dims(r: &MonodromyRep) -> LefschetzReport {
    let d = r.rank();
    let gens: Vec<DMatrix<Complex64>> = r.generators().map(|g| g - DMatrix::identity(d, d)).collect();
    let (h0, h2) = if gens.is_empty() {
        (d, d)
    } else {
        let mut vstack = DMatrix::<Complex64>::zeros(d * gens.len(), d);
        let mut hstack = DMatrix::<Complex64>::zeros(d, d * gens.len());
        for (k, m) in gens.iter().enumerate() {
            vstack.view_mut((k * d, 0), (d, d)).copy_from(m);
            hstack.view_mut((0, k * d), (d, d)).copy_from(m);
        }
        (d - numeric_rank(&vstack), d - numeric_rank(&hstack))
    };
    LefschetzReport { h0, h2, equal: h0 == h2 }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PunctureIndex {
    pub label: String,
    pub irr: usize,
    pub h0_min: usize,
    pub h1_min: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlobalIndex {
    pub chi: i64,
    pub h0: Option<usize>,
    pub h1: Option<i64>,
    pub h2: Option<usize>,
    pub lefschetz_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexReport {
    pub punctures: Vec<PunctureIndex>,
    pub global: GlobalIndex,
}

/// Per-puncture minimal dimensions and the global numbers; `H¹` is `h⁰ + h² − χ`.
pub fn index_report(s: &SurfaceSpec, rep: Option<&MonodromyRep>) -> Result<IndexReport, IndexError> {
    let mut punctures = Vec::with_capacity(s.punctures.len());
    for (label, m) in &s.punctures {
        let (h0_min, h1_min) = local_min_dims(m)?;
        punctures.push(PunctureIndex { label: label.clone(), irr: h1_min, h0_min, h1_min });
    }
    let chi = global_euler(s)?;
    let lef = rep.map(lefschetz_dims);
    let global = GlobalIndex {
        chi,
        h0: lef.as_ref().map(|l| l.h0),
        h1: lef.as_ref().map(|l| l.h0 as i64 + l.h2 as i64 - chi),
        h2: lef.as_ref().map(|l| l.h2),
        lefschetz_ok: lef.as_ref().map(|l| l.equal),
    };
    Ok(IndexReport { punctures, global })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ElementaryBlock, RegularBlockData};
    use crate::series::{PuiseuxSeries, SeriesMatrix};

    fn c(n: i64) -> ComplexRational {
        ComplexRational::from_integer(n)
    }

    fn rank1(phi: PuiseuxSeries, alpha: ComplexRational) -> ElementaryModel {
        ElementaryModel::new(1, vec![ElementaryBlock { phi, regs: vec![RegularBlockData::new(alpha, vec![1]).unwrap()] }]).unwrap()
    }

    fn e_inv_z() -> ElementaryModel {
        rank1(PuiseuxSeries::laurent([(-1, c(1))]), c(0))
    }

    #[test]
    fn degree_examples() {
        let third = |p: i64| ComplexRational::from_ratios(p, 3, 0, 1);
        let surf = |a: i64, b: i64| {
            SurfaceSpec::new(0, 1, vec![("0".into(), rank1(PuiseuxSeries::zero(1), third(a))), ("inf".into(), rank1(PuiseuxSeries::zero(1), third(b)))])
                .unwrap()
        };
        assert_eq!(degree_check(&surf(1, -1)).unwrap().deg_l, 0);
        let r = degree_check(&surf(1, 2)).unwrap();
        assert_eq!((r.deg_l, r.metric_degree), (1, 0));
        assert!(matches!(degree_check(&surf(1, 1)), Err(IndexError::InconsistentResidues(_))));
    }

    #[test]
    fn local_full_examples() {
        let g = e_inv_z().assemble_matrix();
        assert_eq!(local_full_dims(&g, None).unwrap(), (0, 1));
        let g = ConnectionGerm::new(SeriesMatrix::zeros(1, 1, 1));
        assert_eq!(local_full_dims(&g, None).unwrap(), (1, 1));
        let g = rank1(PuiseuxSeries::zero(1), ComplexRational::from_ratios(1, 2, 0, 1)).assemble_matrix();
        assert_eq!(local_full_dims(&g, None).unwrap(), (0, 0));
        let airy = ConnectionGerm::new(SeriesMatrix::from_rows(vec![
            vec![PuiseuxSeries::zero(1), PuiseuxSeries::one(1)],
            vec![PuiseuxSeries::laurent([(-1, c(1))]), PuiseuxSeries::zero(1)],
        ]));
        assert_eq!(local_full_dims(&airy, None).unwrap(), (0, 1));
    }

    #[test]
    fn local_min_examples() {
        assert_eq!(local_min_dims(&e_inv_z()).unwrap(), (0, 1));
        assert_eq!(local_min_dims(&rank1(PuiseuxSeries::zero(1), c(0))).unwrap(), (1, 0));
        let mixed = ElementaryModel::new(
            1,
            vec![
                ElementaryBlock { phi: PuiseuxSeries::laurent([(-1, c(1))]), regs: vec![RegularBlockData::new(c(0), vec![1]).unwrap()] },
                ElementaryBlock { phi: PuiseuxSeries::zero(1), regs: vec![RegularBlockData::new(c(0), vec![1]).unwrap()] },
            ],
        )
        .unwrap();
        assert_eq!(local_min_dims(&mixed).unwrap(), (1, 1));
        let (h0, h1) = local_full_dims(&mixed.assemble_matrix(), None).unwrap();
        assert_eq!(h0 as i64 - h1 as i64 + regular_invariants(&mixed) as i64, 0);
    }

    #[test]
    fn global_examples() {
        assert_eq!(global_euler(&SurfaceSpec::new(0, 1, vec![]).unwrap()).unwrap(), 2);
        let half = |s: i64| rank1(PuiseuxSeries::zero(1), ComplexRational::from_ratios(s, 2, 0, 1));
        let s = SurfaceSpec::new(0, 1, vec![("0".into(), half(1)), ("inf".into(), half(-1))]).unwrap();
        assert_eq!(global_euler(&s).unwrap(), 0);
        let s = SurfaceSpec::new(0, 1, vec![("0".into(), e_inv_z())]).unwrap();
        assert_eq!(global_euler(&s).unwrap(), 0);
    }

    fn cm(rows: &[[f64; 2]; 2]) -> DMatrix<Complex64> {
        DMatrix::from_fn(2, 2, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    #[test]
    fn lefschetz_examples() {
        let r = MonodromyRep::trivial(0, 0, 1);
        assert_eq!(lefschetz_dims(&r), LefschetzReport { h0: 1, h2: 1, equal: true });

        let t1 = cm(&[[0.0, -1.0], [1.0, 0.0]]);
        let t2 = cm(&[[1.0, 1.0], [0.0, 1.0]]);
        let t3 = (&t1 * &t2).try_inverse().unwrap();
        let r = MonodromyRep::new(2, vec![], vec![], vec![t1, t2, t3]).unwrap();
        assert_eq!(lefschetz_dims(&r), LefschetzReport { h0: 0, h2: 0, equal: true });

        let u1 = cm(&[[1.0, 2.0], [0.0, 1.0]]);
        let u2 = cm(&[[1.0, -2.0], [0.0, 1.0]]);
        let r = MonodromyRep::new(2, vec![], vec![], vec![u1, u2]).unwrap();
        assert_eq!(lefschetz_dims(&r), LefschetzReport { h0: 1, h2: 1, equal: true });

        assert!(matches!(
            MonodromyRep::new(2, vec![], vec![], vec![cm(&[[2.0, 0.0], [0.0, 1.0]])]),
            Err(IndexError::RelationViolated(_))
        ));
    }

    #[test]
    fn random_semisimple_samples() {
        for seed in 0..20 {
            let triv = (seed % 3) as usize;
            let r = MonodromyRep::random_unitary(seed, 3, 3, triv);
            assert!(r.relation_residual() < 1e-10);
            let l = lefschetz_dims(&r);
            assert_eq!((l.h0, l.h2), (triv, triv));
        }
    }
}
