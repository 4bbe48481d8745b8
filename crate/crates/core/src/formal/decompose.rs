use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::model::{ConnectionGerm, ElementaryBlock, ElementaryModel, RegularBlockData};
use crate::series::{ComplexRational, PuiseuxSeries};

use super::polygon::{irregularity, newton_polygon, NewtonPolygon};
use super::residue::residue_reduce;
use super::shear::{leading, ShearSearch};
use super::split::split_detailed;
use super::{FormalConfig, FormalError};

/// One gauge operation performed during reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaugeStep {
    ConstantGauge { dim: usize },
    Shear { exponents: Vec<i64> },
    Split { sizes: Vec<usize>, orders: i64 },
    Ramify { m: u32 },
    Twist { phi: String },
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub model: ElementaryModel,
    pub q: u32,
    pub polygon: NewtonPolygon,
    pub irregularity: i64,
    pub gauge_log: Vec<GaugeStep>,
}

struct Local {
    m: u32,
    /// `φ` as a series in the local variable `u` (ramification one), with regular data.
    blocks: Vec<(PuiseuxSeries, Vec<RegularBlockData>)>,
}

impl Local {
    fn lifted(self, l: u32) -> Vec<(PuiseuxSeries, Vec<RegularBlockData>)> {
        let k = l / self.m;
        self.blocks
            .into_iter()
            .map(|(phi, regs)| (phi.substitute_power(k), regs.iter().map(|r| r.scaled(k)).collect()))
            .collect()
    }
}

fn combine(subs: Vec<Local>) -> Local {
    let l = subs.iter().fold(1u32, |acc, s| acc.lcm(&s.m));
    let mut blocks: Vec<(PuiseuxSeries, Vec<RegularBlockData>)> = Vec::new();
    for s in subs {
        for (phi, regs) in s.lifted(l) {
            match blocks.iter_mut().find(|b| b.0 == phi) {
                Some(b) => b.1.extend(regs),
                None => blocks.push((phi, regs)),
            }
        }
    }
    Local { m: l, blocks }
}

/// Merge regular data with the same normalized `α` and drop integer shifts.
fn tidy(regs: Vec<RegularBlockData>) -> Vec<RegularBlockData> {
    let mut out: Vec<RegularBlockData> = Vec::new();
    for r in regs {
        match out.iter_mut().find(|o| o.alpha == r.alpha) {
            Some(o) => {
                o.partition.extend(r.partition);
                o.partition.sort_unstable_by(|a, b| b.cmp(a));
            }
            None => out.push(RegularBlockData { alpha: r.alpha, shift: 0, partition: r.partition }),
        }
    }
    out.sort();
    out
}

fn rec(g: &ConnectionGerm, cfg: &FormalConfig, ram_so_far: u32, log: &mut Vec<GaugeStep>) -> Result<Local, FormalError> {
    let poly = newton_polygon(g)?;
    let s = poly.top_slope();
    if s.is_zero() {
        let red = residue_reduce(g, cfg)?;
        log.extend(red.steps);
        return Ok(Local { m: 1, blocks: vec![(PuiseuxSeries::zero(1), red.regs)] });
    }
    if !s.is_integer() {
        let d = s.denom().to_u32().expect("small denominator");
        if ram_so_far * d > cfg.ram_guard {
            return Err(FormalError::RamificationGuardExceeded(ram_so_far * d));
        }
        log.push(GaugeStep::Ramify { m: d });
        let sub = rec(&g.ramified_pullback(d), cfg, ram_so_far * d, log)?;
        return Ok(Local { m: d * sub.m, blocks: sub.blocks });
    }
    let r = s.to_integer().to_i64().expect("small slope");
    let (a, steps) = ShearSearch::default().reduce(g.matrix(), r);
    log.extend(steps);
    let (pole, lead) = leading(&a).ok_or_else(|| FormalError::InsufficientTruncation("leading term unknown".into()))?;
    if pole > r {
        return Err(FormalError::NilpotentLeading);
    }
    let eig = lead
        .char_poly()
        .exact_roots()
        .map_err(|z| FormalError::IrrationalSpectrum(format!("{z:?}")))?;
    let germ = ConnectionGerm::new(a);
    if eig.len() >= 2 {
        let split = split_detailed(&germ, cfg.budget)?;
        log.push(GaugeStep::Split { sizes: split.blocks.iter().map(|b| b.rank()).collect(), orders: split.orders });
        let mut subs = Vec::new();
        for b in &split.blocks {
            subs.push(rec(b, cfg, ram_so_far, log)?);
        }
        return Ok(combine(subs));
    }
    let lam = &eig[0].0;
    if lam.is_zero() {
        return Err(FormalError::NilpotentLeading);
    }
    let phi0 = PuiseuxSeries::monomial(1, -r, -(lam * &ComplexRational::real(BigRational::new(1.into(), r.into()))));
    log.push(GaugeStep::Twist { phi: phi0.neg().to_string() });
    let sub = rec(&germ.twist_by_exponential(&phi0.neg()), cfg, ram_so_far, log)?;
    let k = sub.m;
    let blocks = sub
        .blocks
        .into_iter()
        .map(|(phi, regs)| (phi.add(&phi0.substitute_power(k)), regs))
        .collect();
    Ok(Local { m: k, blocks })
}

/// Formal decomposition `g ≅ ⊕ E^φ ⊗ R_φ` after the ramification `t^q = z`.
pub fn formal_decompose(g: &ConnectionGerm, cfg: &FormalConfig) -> Result<Decomposition, FormalError> {
    if g.rank() > cfg.rank_guard {
        return Err(FormalError::RankGuardExceeded(g.rank(), cfg.rank_guard));
    }
    let polygon = newton_polygon(g)?;
    let irr = irregularity(g)?;
    let mut log = Vec::new();
    let base = g.ram();
    let g1 = if base > 1 {
        log.push(GaugeStep::Ramify { m: base });
        g.ramified_pullback(base)
    } else {
        g.clone()
    };
    let local = rec(&g1, cfg, base, &mut log)?;
    let q = base * local.m;
    let blocks = local
        .blocks
        .into_iter()
        .map(|(phi, regs)| ElementaryBlock { phi: phi.with_ram(q), regs: tidy(regs) })
        .collect();
    let model = ElementaryModel::new(q, blocks).map_err(|e| FormalError::InsufficientTruncation(e.to_string()))?;
    Ok(Decomposition { model: model.canonical(), q, polygon, irregularity: irr, gauge_log: log })
}

/// For each block: slope-0 multiplicity of the pulled-back germ twisted by `−φ`, and the block rank.
pub fn round_trip_check(g: &ConnectionGerm, dec: &Decomposition) -> Result<Vec<(usize, usize)>, FormalError> {
    let pulled = g.ramified_pullback(dec.q);
    let mut out = Vec::new();
    for (i, b) in dec.model.blocks().iter().enumerate() {
        let phi_t = dec.model.phi_in_t(i);
        let twisted = pulled.twist_by_exponential(&phi_t.neg());
        let p = newton_polygon(&twisted)?;
        out.push((p.slope_zero_multiplicity(), b.rank()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rat, SeriesMatrix};

    fn c(n: i64) -> ComplexRational {
        ComplexRational::from_integer(n)
    }

    fn reg(alpha: ComplexRational, p: Vec<usize>) -> RegularBlockData {
        RegularBlockData::new(alpha, p).unwrap()
    }

    #[test]
    fn recovers_twisted_rank_one_model() {
        let half = ComplexRational::real(rat(1, 2));
        let m = ElementaryModel::new(
            1,
            vec![ElementaryBlock { phi: PuiseuxSeries::laurent([(-1, c(1))]), regs: vec![reg(half, vec![1])] }],
        )
        .unwrap();
        let dec = formal_decompose(&m.assemble_matrix(), &FormalConfig::default()).unwrap();
        assert_eq!(dec.q, 1);
        assert!(dec.model.same_up_to_permutation(&m));
    }

    #[test]
    fn airy_needs_ramification_two() {
        let airy = ConnectionGerm::new(SeriesMatrix::from_rows(vec![
            vec![PuiseuxSeries::zero(1), PuiseuxSeries::one(1)],
            vec![PuiseuxSeries::laurent([(-1, c(1))]), PuiseuxSeries::zero(1)],
        ]));
        let dec = formal_decompose(&airy, &FormalConfig::default()).unwrap();
        assert_eq!(dec.q, 2);
        assert_eq!(dec.irregularity, 1);
        let phis: Vec<_> = dec.model.blocks().iter().map(|b| b.phi.clone()).collect();
        assert!(phis.contains(&PuiseuxSeries::monomial(2, -1, c(2))));
        assert!(phis.contains(&PuiseuxSeries::monomial(2, -1, c(-2))));
        for b in dec.model.blocks() {
            assert_eq!(b.rank(), 1);
        }
        for (m, r) in round_trip_check(&airy, &dec).unwrap() {
            assert_eq!(m, r);
        }
    }

    #[test]
    fn regular_germ_is_single_block() {
        let g = ConnectionGerm::new(SeriesMatrix::zeros(2, 2, 1));
        let dec = formal_decompose(&g, &FormalConfig::default()).unwrap();
        assert_eq!(dec.q, 1);
        assert_eq!(dec.model.blocks().len(), 1);
        assert!(dec.model.blocks()[0].phi.is_exact_zero());
    }
}
