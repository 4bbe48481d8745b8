use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::germ::ConnectionGerm;
use super::ModelError;
use crate::exact::QiMatrix;
use crate::series::{ComplexRational, PuiseuxSeries, SeriesMatrix};

/// Residue eigenvalue with its Jordan partition for one regular summand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegularBlockData {
    /// Normalized so that `0 <= Re alpha < 1`.
    pub alpha: ComplexRational,
    /// Integer part removed during normalization; the residue is `alpha + shift`.
    pub shift: i64,
    pub partition: Vec<usize>,
}

impl RegularBlockData {
    pub fn new(alpha: ComplexRational, partition: Vec<usize>) -> Result<Self, ModelError> {
        Self::from_residue(alpha, partition)
    }

    /// Split a residue eigenvalue into its normalized part and integer shift.
    pub fn from_residue(residue: ComplexRational, mut partition: Vec<usize>) -> Result<Self, ModelError> {
        if partition.is_empty() || partition.contains(&0) {
            return Err(ModelError::InvalidModel("partition entries must be positive".into()));
        }
        partition.sort_unstable_by(|a, b| b.cmp(a));
        let fl = residue.re.floor();
        let shift: i64 = fl.to_integer().try_into().map_err(|_| ModelError::InvalidModel("residue too large".into()))?;
        let alpha = ComplexRational::new(&residue.re - &fl, residue.im.clone());
        Ok(Self { alpha, shift, partition })
    }

    pub fn residue(&self) -> ComplexRational {
        &self.alpha + &ComplexRational::from_integer(self.shift)
    }

    pub fn rank(&self) -> usize {
        self.partition.iter().sum()
    }

    /// Lower-triangular Jordan nilpotent: ones on the subdiagonal of each block.
    pub fn y_matrix(&self) -> QiMatrix {
        jordan_nilpotent(&self.partition)
    }

    /// Frame monodromy `exp(2πi (Y − α))` = `e^{−2πiα}·T_u`.
    pub fn monodromy(&self) -> DMatrix<Complex64> {
        let d = self.rank();
        let y = self.y_matrix().to_complex();
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let mut tu = DMatrix::<Complex64>::identity(d, d);
        let mut term = DMatrix::<Complex64>::identity(d, d);
        for k in 1..d.max(1) {
            term = &term * &y * (two_pi_i / k as f64);
            tu += &term;
        }
        tu * (-two_pi_i * self.alpha.to_c64()).exp()
    }

    /// Residue multiplied by `m` (pullback along `t ↦ t^m`), renormalized.
    pub fn scaled(&self, m: u32) -> Self {
        let r = self.residue().scale(&BigRational::from_integer(BigInt::from(m)));
        Self::from_residue(r, self.partition.clone()).expect("partition already validated")
    }

    fn sort_key(&self) -> (BigRational, BigRational, i64, Vec<usize>) {
        (self.alpha.re.clone(), self.alpha.im.clone(), self.shift, self.partition.clone())
    }
}

impl PartialOrd for RegularBlockData {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RegularBlockData {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

pub fn jordan_nilpotent(partition: &[usize]) -> QiMatrix {
    let d: usize = partition.iter().sum();
    let mut y = QiMatrix::zeros(d, d);
    let mut off = 0;
    for &m in partition {
        for j in 0..m.saturating_sub(1) {
            y[(off + j + 1, off + j)] = ComplexRational::one();
        }
        off += m;
    }
    y
}

/// One summand `E^φ ⊗ R_φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryBlock {
    /// Exponential part as a function of `z` with ramification dividing the model's `q`.
    pub phi: PuiseuxSeries,
    pub regs: Vec<RegularBlockData>,
}

impl ElementaryBlock {
    pub fn rank(&self) -> usize {
        self.regs.iter().map(|r| r.rank()).sum()
    }
}

/// Direct sum of exponentially twisted regular connections, living on `t` with `t^q = z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryModel {
    ram: u32,
    blocks: Vec<ElementaryBlock>,
}

impl ElementaryModel {
    pub fn new(ram: u32, blocks: Vec<ElementaryBlock>) -> Result<Self, ModelError> {
        if ram == 0 {
            return Err(ModelError::InvalidModel("ramification must be positive".into()));
        }
        if blocks.is_empty() {
            return Err(ModelError::InvalidModel("model has no blocks".into()));
        }
        let mut out = Vec::with_capacity(blocks.len());
        for b in blocks {
            if ram % b.phi.ram() != 0 {
                return Err(ModelError::InvalidModel(format!(
                    "phi ramification {} does not divide q = {ram}",
                    b.phi.ram()
                )));
            }
            if !b.phi.is_exact() {
                return Err(ModelError::InvalidModel("phi must be an exact Laurent polynomial".into()));
            }
            if b.phi.terms().keys().any(|n| *n >= 0) {
                return Err(ModelError::InvalidModel("phi must have strictly negative support".into()));
            }
            if b.regs.is_empty() {
                return Err(ModelError::InvalidModel("block without regular data".into()));
            }
            for r in &b.regs {
                if r.partition.is_empty() || r.partition.contains(&0) {
                    return Err(ModelError::InvalidModel("partition entries must be positive".into()));
                }
            }
            let mut regs = b.regs;
            regs.sort();
            out.push(ElementaryBlock { phi: b.phi.lift(ram), regs });
        }
        for i in 0..out.len() {
            for j in 0..i {
                if out[i].phi == out[j].phi {
                    return Err(ModelError::InvalidModel("exponential parts must be pairwise distinct".into()));
                }
            }
        }
        Ok(Self { ram, blocks: out })
    }

    pub fn ram(&self) -> u32 {
        self.ram
    }

    pub fn blocks(&self) -> &[ElementaryBlock] {
        &self.blocks
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| b.rank()).sum()
    }

    /// `φ` of block `i` rewritten as a series in `t` (ramification one).
    pub fn phi_in_t(&self, i: usize) -> PuiseuxSeries {
        self.blocks[i].phi.lift(self.ram).with_ram(1)
    }

    /// Block-diagonal germ in the variable `t`: each summand is `Y + (−α + t φ'(t)) Id`.
    pub fn assemble_matrix(&self) -> ConnectionGerm {
        let mut mats = Vec::new();
        for (i, b) in self.blocks.iter().enumerate() {
            let dphi = self.phi_in_t(i).derive();
            for r in &b.regs {
                let d = r.rank();
                let y = SeriesMatrix::constant(&r.y_matrix(), 1);
                let diag = PuiseuxSeries::constant(1, -r.residue()).add(&dphi);
                mats.push(y.add(&SeriesMatrix::scalar_series(d, &diag)));
            }
        }
        ConnectionGerm::new(SeriesMatrix::block_diag(&mats))
    }

    /// Model-level twist: every `φ` becomes `φ + ψ`.
    pub fn twist(&self, psi: &PuiseuxSeries) -> Result<Self, ModelError> {
        let l = (self.ram as u64).lcm(&(psi.ram() as u64)) as u32;
        if l != self.ram {
            return Err(ModelError::InvalidModel("twist ramification must divide q".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| ElementaryBlock { phi: b.phi.add(&psi.lift(self.ram)), regs: b.regs.clone() })
            .collect();
        Self::new(self.ram, blocks)
    }

    /// Pull the model back along `s ↦ t = s^m`: `q` becomes `q·m`, residues scale by `m`.
    pub fn lift_ram(&self, m: u32) -> Self {
        let q = self.ram * m;
        let blocks = self
            .blocks
            .iter()
            .map(|b| ElementaryBlock {
                phi: b.phi.lift(q),
                regs: b.regs.iter().map(|r| r.scaled(m)).collect(),
            })
            .collect();
        Self::new(q, blocks).expect("lifting preserves validity")
    }

    /// Irregularity `(1/q) Σ rank(R_φ)·(pole order of φ in t)`.
    pub fn irregularity(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for (i, b) in self.blocks.iter().enumerate() {
            let p = self.phi_in_t(i).pole_order();
            acc += BigRational::from_integer(BigInt::from(p * b.rank() as i64));
        }
        acc / BigRational::from_integer(BigInt::from(self.ram))
    }

    /// Blocks sorted canonically, ramification reduced where every φ allows it.
    pub fn canonical(&self) -> Self {
        let mut blocks = self.blocks.clone();
        for b in &mut blocks {
            b.regs.sort();
        }
        blocks.sort_by(|a, b| phi_key(&a.phi).cmp(&phi_key(&b.phi)).then(a.regs.cmp(&b.regs)));
        Self { ram: self.ram, blocks }
    }

    /// Equality up to block permutation (same `q` required).
    pub fn same_up_to_permutation(&self, other: &Self) -> bool {
        self.ram == other.ram && self.canonical().blocks == other.canonical().blocks
    }
}

fn phi_key(p: &PuiseuxSeries) -> Vec<(i64, BigRational, BigRational)> {
    p.terms().iter().map(|(n, c)| (*n, c.re.clone(), c.im.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    fn c(n: i64) -> ComplexRational {
        ComplexRational::from_integer(n)
    }

    fn reg(alpha: ComplexRational, p: Vec<usize>) -> RegularBlockData {
        RegularBlockData::new(alpha, p).unwrap()
    }

    #[test]
    fn assemble_examples() {
        let m = ElementaryModel::new(1, vec![ElementaryBlock { phi: PuiseuxSeries::zero(1), regs: vec![reg(c(0), vec![1])] }]).unwrap();
        assert!(m.assemble_matrix().matrix().is_exact_zero());

        let m = ElementaryModel::new(
            1,
            vec![ElementaryBlock { phi: PuiseuxSeries::laurent([(-1, c(1))]), regs: vec![reg(c(0), vec![1])] }],
        )
        .unwrap();
        assert_eq!(m.assemble_matrix().matrix().get(0, 0), &PuiseuxSeries::laurent([(-1, c(-1))]));

        let half = ComplexRational::real(rat(1, 2));
        let m = ElementaryModel::new(1, vec![ElementaryBlock { phi: PuiseuxSeries::zero(1), regs: vec![reg(half.clone(), vec![2])] }]).unwrap();
        let a = m.assemble_matrix();
        assert_eq!(a.matrix().get(1, 0), &PuiseuxSeries::one(1));
        assert_eq!(a.matrix().get(0, 0), &PuiseuxSeries::constant(1, -half.clone()));
        assert_eq!(a.matrix().get(1, 1), &PuiseuxSeries::constant(1, -half));
        assert!(a.matrix().get(0, 1).is_exact_zero());
    }

    #[test]
    fn residue_normalization() {
        let r = RegularBlockData::from_residue(ComplexRational::from_ratios(-1, 3, 2, 1), vec![1]).unwrap();
        assert_eq!(r.alpha, ComplexRational::from_ratios(2, 3, 2, 1));
        assert_eq!(r.shift, -1);
        assert_eq!(r.residue(), ComplexRational::from_ratios(-1, 3, 2, 1));
    }

    #[test]
    fn rejects_invalid_models() {
        let bad = ElementaryModel::new(1, vec![ElementaryBlock { phi: PuiseuxSeries::laurent([(0, c(1))]), regs: vec![reg(c(0), vec![1])] }]);
        assert!(bad.is_err());
        let dup = ElementaryModel::new(
            1,
            vec![
                ElementaryBlock { phi: PuiseuxSeries::zero(1), regs: vec![reg(c(0), vec![1])] },
                ElementaryBlock { phi: PuiseuxSeries::zero(1), regs: vec![reg(c(0), vec![1])] },
            ],
        );
        assert!(dup.is_err());
    }

    #[test]
    fn monodromy_of_jordan_block() {
        let r = reg(c(0), vec![2]);
        let t = r.monodromy();
        assert!((t[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((t[(1, 0)] - Complex64::new(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-12);
    }
}
