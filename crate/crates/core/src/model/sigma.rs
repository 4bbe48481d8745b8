use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;

use super::elementary::{ElementaryBlock, ElementaryModel, RegularBlockData};
use super::ModelError;
use crate::series::{ComplexRational, PuiseuxSeries};

/// Exponential part with coefficients of the form `c·ζ^r`, `ζ = e^{2πi/q}`.
///
/// The tag `r` is reduced modulo `q / gcd(q, 4)`, the remaining power of `ζ`
/// (a power of `i`) being folded into `c`; this makes equality exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicPhi {
    pub q: u32,
    pub terms: BTreeMap<i64, (ComplexRational, u32)>,
}

impl SymbolicPhi {
    pub fn from_phi(phi: &PuiseuxSeries, q: u32) -> Self {
        let p = phi.lift(q);
        let terms = p.terms().iter().map(|(n, c)| (*n, canonical(c.clone(), 0, q))).collect();
        Self { q, terms }
    }

    /// `φ(ζ^k t)`.
    pub fn rotate(&self, k: u32) -> Self {
        let q = self.q as i64;
        let terms = self
            .terms
            .iter()
            .map(|(n, (c, r))| {
                let extra = (k as i64 * n).rem_euclid(q) as u32;
                (*n, canonical(c.clone(), (r + extra) % self.q, self.q))
            })
            .collect();
        Self { q: self.q, terms }
    }

    /// Exact series if every tag is trivial.
    pub fn to_series(&self) -> Option<PuiseuxSeries> {
        if self.terms.values().any(|(_, r)| *r != 0) {
            return None;
        }
        Some(PuiseuxSeries::new(self.q, self.terms.iter().map(|(n, (c, _))| (*n, c.clone())), None))
    }
}

fn canonical(c: ComplexRational, r: u32, q: u32) -> (ComplexRational, u32) {
    if c.is_zero() {
        return (c, 0);
    }
    let g = q.gcd(&4);
    let base = q / g;
    let reduced = r % base;
    let steps = (r - reduced) / base;
    // ζ^{steps·base} = e^{2πi steps/g} = i^{steps·4/g}
    (c.rotate_quarter(steps * 4 / g), reduced)
}

/// Pull the exponential parts back by `t ↦ ζ^k t`; regular data is carried unchanged.
pub fn sigma_pullback(m: &ElementaryModel, k: u32) -> Result<ElementaryModel, ModelError> {
    let q = m.ram();
    let k = k % q;
    let mut blocks = Vec::new();
    for b in m.blocks() {
        let sym = SymbolicPhi::from_phi(&b.phi, q).rotate(k);
        let Some(phi) = sym.to_series() else {
            let (n, _) = sym.terms.iter().find(|(_, (_, r))| *r != 0).expect("nontrivial tag");
            let r = (k as i64 * n).rem_euclid(q as i64) as u32;
            return Err(ModelError::IrrationalRootOfUnity { q, k, exponent: *n, order: q / q.gcd(&r) });
        };
        blocks.push(ElementaryBlock { phi, regs: b.regs.clone() });
    }
    ElementaryModel::new(q, blocks)
}

/// Symbolic form of [`sigma_pullback`]: never fails.
pub fn sigma_pullback_symbolic(m: &ElementaryModel, k: u32) -> Vec<(SymbolicPhi, Vec<RegularBlockData>)> {
    let q = m.ram();
    m.blocks()
        .iter()
        .map(|b| (SymbolicPhi::from_phi(&b.phi, q).rotate(k % q), b.regs.clone()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DescentCertificate {
    /// `perms[k][i] = j`: the pullback of block `i` by `σ^k` is block `j`.
    Descends { perms: Vec<Vec<usize>> },
    Refused { orphans: Vec<usize> },
}

impl DescentCertificate {
    pub fn descends(&self) -> bool {
        matches!(self, DescentCertificate::Descends { .. })
    }
}

/// Check that every power of `σ` permutes the blocks (with matching regular data).
pub fn descends_to_base(m: &ElementaryModel) -> DescentCertificate {
    let q = m.ram();
    let base: Vec<(SymbolicPhi, Vec<RegularBlockData>)> = sigma_pullback_symbolic(m, 0);
    let mut perms = Vec::new();
    let mut orphans = Vec::new();
    for k in 0..q {
        let rotated = sigma_pullback_symbolic(m, k);
        let mut perm = Vec::new();
        for (i, (phi, regs)) in rotated.iter().enumerate() {
            match base.iter().position(|(p, r)| p == phi && r == regs) {
                Some(j) => perm.push(j),
                None => {
                    if !orphans.contains(&i) {
                        orphans.push(i);
                    }
                    perm.push(usize::MAX);
                }
            }
        }
        perms.push(perm);
    }
    if orphans.is_empty() {
        DescentCertificate::Descends { perms }
    } else {
        orphans.sort_unstable();
        DescentCertificate::Refused { orphans }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> ComplexRational {
        ComplexRational::from_integer(n)
    }

    fn block(phi: PuiseuxSeries) -> ElementaryBlock {
        ElementaryBlock { phi, regs: vec![RegularBlockData::new(c(0), vec![1]).unwrap()] }
    }

    #[test]
    fn sigma_examples() {
        let m = ElementaryModel::new(2, vec![block(PuiseuxSeries::monomial(2, -1, c(1)))]).unwrap();
        let s = sigma_pullback(&m, 1).unwrap();
        assert_eq!(s.blocks()[0].phi, PuiseuxSeries::monomial(2, -1, c(-1)));

        let m = ElementaryModel::new(2, vec![block(PuiseuxSeries::monomial(2, -2, c(1)))]).unwrap();
        assert_eq!(sigma_pullback(&m, 1).unwrap(), m);

        let m = ElementaryModel::new(1, vec![block(PuiseuxSeries::laurent([(-3, c(5))]))]).unwrap();
        assert_eq!(sigma_pullback(&m, 0).unwrap(), m);
    }

    #[test]
    fn cube_roots_are_refused_but_tracked() {
        let m = ElementaryModel::new(3, vec![block(PuiseuxSeries::monomial(3, -1, c(1)))]).unwrap();
        assert!(matches!(sigma_pullback(&m, 1), Err(ModelError::IrrationalRootOfUnity { order: 3, .. })));
        let sym = &sigma_pullback_symbolic(&m, 1)[0].0;
        // t^{-1} picks up ζ^{-1} = ζ^2
        assert_eq!(sym.terms[&-1].1, 2);
        assert_eq!(sym.rotate(2).terms[&-1], (c(1), 0));
    }

    #[test]
    fn eighth_roots_fold_powers_of_i() {
        // ζ_8^{-2} = -i, ζ_8^{-3} = ζ_8^5 = -ζ_8
        let phi = PuiseuxSeries::monomial(8, -1, c(1));
        let s = SymbolicPhi::from_phi(&phi, 8).rotate(2);
        assert_eq!(s.terms[&-1], (-ComplexRational::i(), 0));
        let s = SymbolicPhi::from_phi(&phi, 8).rotate(3);
        assert_eq!(s.terms[&-1], (c(-1), 1));
    }

    #[test]
    fn descent_examples() {
        let pm = ElementaryModel::new(
            2,
            vec![block(PuiseuxSeries::monomial(2, -1, c(1))), block(PuiseuxSeries::monomial(2, -1, c(-1)))],
        )
        .unwrap();
        assert_eq!(descends_to_base(&pm), DescentCertificate::Descends { perms: vec![vec![0, 1], vec![1, 0]] });
        let lone = ElementaryModel::new(2, vec![block(PuiseuxSeries::monomial(2, -1, c(1)))]).unwrap();
        assert_eq!(descends_to_base(&lone), DescentCertificate::Refused { orphans: vec![0] });
        let q1 = ElementaryModel::new(1, vec![block(PuiseuxSeries::laurent([(-1, c(2))]))]).unwrap();
        assert!(descends_to_base(&q1).descends());
    }
}
