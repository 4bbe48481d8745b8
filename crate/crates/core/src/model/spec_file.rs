use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::elementary::{ElementaryBlock, ElementaryModel, RegularBlockData};
use super::germ::ConnectionGerm;
use super::ModelError;
use crate::series::{ComplexRational, IntLit, LiteralError, SeriesLiteral, SeriesMatrix};

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad series literal: {0}")]
    Literal(#[from] LiteralError),
    #[error("bad rational literal {0:?}")]
    Rational(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Rational number written as an integer, a `"p/q"` string or a `[p, q]` pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalLit {
    Int(i64),
    Text(String),
    Pair([IntLit; 2]),
}

impl RationalLit {
    pub fn from_value(q: &BigRational) -> Self {
        if q.is_integer() {
            if let Ok(n) = i64::try_from(q.to_integer()) {
                return RationalLit::Int(n);
            }
        }
        RationalLit::Text(q.to_string())
    }

    pub fn to_value(&self) -> Result<BigRational, SpecError> {
        let bad = || SpecError::Rational(format!("{self:?}"));
        match self {
            RationalLit::Int(n) => Ok(BigRational::from_integer(BigInt::from(*n))),
            RationalLit::Text(s) => {
                let s = s.trim();
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (s, "1"),
                };
                let n: BigInt = n.parse().map_err(|_| bad())?;
                let d: BigInt = d.parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(BigRational::new(n, d))
            }
            RationalLit::Pair([n, d]) => {
                let n = n.to_bigint().ok_or_else(bad)?;
                let d = d.to_bigint().ok_or_else(bad)?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(BigRational::new(n, d))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegLiteral {
    /// `[re, im]`.
    pub alpha: [RationalLit; 2],
    pub partition: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockLiteral {
    pub phi: SeriesLiteral,
    pub regs: Vec<RegLiteral>,
}

/// Stokes constants for gluing: the entry `(i, j)` of the unipotent transition
/// is `value · e^{φ_i − φ_j}` on the sectors where that exponential is flat.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StokesLiteral {
    /// Number of sectors in the cover.
    pub cover: usize,
    /// Angle of the first overlap centre, as a multiple of `π`.
    #[serde(default = "zero_lit")]
    pub first_boundary: RationalLit,
    pub constants: Vec<StokesConstant>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StokesConstant {
    /// Overlap index `ℓ`, between sectors `ℓ` and `ℓ + 1`.
    #[serde(default)]
    pub overlap: usize,
    pub i: usize,
    pub j: usize,
    pub value: [RationalLit; 2],
}

/// Connection spec file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConnectionSpec {
    Matrix {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        rank: usize,
        #[serde(default = "one")]
        ram: u32,
        matrix: Vec<Vec<SeriesLiteral>>,
    },
    Elementary {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default = "one")]
        ram: u32,
        blocks: Vec<BlockLiteral>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stokes: Option<StokesLiteral>,
    },
}

fn zero_lit() -> RationalLit {
    RationalLit::Int(0)
}

fn one() -> u32 {
    1
}

pub fn complex_from_pair(p: &[RationalLit; 2]) -> Result<ComplexRational, SpecError> {
    Ok(ComplexRational::new(p[0].to_value()?, p[1].to_value()?))
}

pub fn pair_from_complex(c: &ComplexRational) -> [RationalLit; 2] {
    [RationalLit::from_value(&c.re), RationalLit::from_value(&c.im)]
}

impl ConnectionSpec {
    pub fn parse(text: &str) -> Result<Self, SpecError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            ConnectionSpec::Matrix { name, .. } | ConnectionSpec::Elementary { name, .. } => name.as_deref(),
        }
    }

    pub fn from_model(name: Option<String>, m: &ElementaryModel, stokes: Option<StokesLiteral>) -> Self {
        let blocks = m
            .blocks()
            .iter()
            .map(|b| BlockLiteral {
                phi: SeriesLiteral::from_series(&b.phi),
                regs: b
                    .regs
                    .iter()
                    .map(|r| RegLiteral { alpha: pair_from_complex(&r.residue()), partition: r.partition.clone() })
                    .collect(),
            })
            .collect();
        ConnectionSpec::Elementary { name, ram: m.ram(), blocks, stokes }
    }

    pub fn from_germ(name: Option<String>, g: &ConnectionGerm) -> Self {
        let d = g.rank();
        let a = g.matrix();
        let matrix = (0..d)
            .map(|i| (0..d).map(|j| SeriesLiteral::from_series(a.get(i, j))).collect())
            .collect();
        ConnectionSpec::Matrix { name, rank: d, ram: g.ram(), matrix }
    }

    pub fn stokes(&self) -> Option<&StokesLiteral> {
        match self {
            ConnectionSpec::Elementary { stokes, .. } => stokes.as_ref(),
            ConnectionSpec::Matrix { .. } => None,
        }
    }

    /// The elementary model, when the file is in elementary form.
    pub fn to_model(&self) -> Result<Option<ElementaryModel>, SpecError> {
        let ConnectionSpec::Elementary { ram, blocks, .. } = self else {
            return Ok(None);
        };
        let mut out = Vec::new();
        for b in blocks {
            let phi = b.phi.to_series()?;
            let mut regs = Vec::new();
            for r in &b.regs {
                regs.push(RegularBlockData::from_residue(complex_from_pair(&r.alpha)?, r.partition.clone())?);
            }
            out.push(ElementaryBlock { phi, regs });
        }
        Ok(Some(ElementaryModel::new(*ram, out)?))
    }

    /// Matrix form; an elementary file is assembled (in its variable `t`).
    pub fn to_germ(&self) -> Result<ConnectionGerm, SpecError> {
        match self {
            ConnectionSpec::Matrix { rank, ram, matrix, .. } => {
                if *rank == 0 || matrix.len() != *rank || matrix.iter().any(|r| r.len() != *rank) {
                    return Err(SpecError::Shape(format!("matrix must be {rank}x{rank}")));
                }
                let mut entries = Vec::new();
                for row in matrix {
                    for lit in row {
                        let s = lit.to_series()?;
                        if *ram % s.ram() != 0 {
                            return Err(SpecError::Shape(format!(
                                "entry ramification {} does not divide ram {ram}",
                                s.ram()
                            )));
                        }
                        entries.push(s.lift(*ram));
                    }
                }
                Ok(ConnectionGerm::new(SeriesMatrix::from_entries(*rank, *rank, entries)))
            }
            ConnectionSpec::Elementary { .. } => Ok(self.to_model()?.expect("elementary form").assemble_matrix()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::PuiseuxSeries;

    #[test]
    fn parses_matrix_form() {
        let text = r#"{"form":"matrix","rank":2,"ram":1,"matrix":[
            [{"ram":1,"trunc":null,"terms":[]},{"ram":1,"terms":[[0,1,1,0,1]]}],
            [{"ram":1,"terms":[[-1,1,1,0,1]]},{"ram":1,"terms":[]}]]}"#;
        let g = ConnectionSpec::parse(text).unwrap().to_germ().unwrap();
        assert_eq!(g.rank(), 2);
        assert_eq!(g.matrix().get(1, 0), &PuiseuxSeries::laurent([(-1, ComplexRational::from_integer(1))]));
    }

    #[test]
    fn parses_elementary_form_and_round_trips() {
        let text = r#"{"form":"elementary","ram":1,"blocks":[
            {"phi":{"ram":1,"terms":[[-1,1,1,0,1]]},"regs":[{"alpha":["1/2",0],"partition":[1]}]}]}"#;
        let spec = ConnectionSpec::parse(text).unwrap();
        let m = spec.to_model().unwrap().unwrap();
        assert_eq!(m.blocks()[0].regs[0].alpha, ComplexRational::from_ratios(1, 2, 0, 1));
        let back = ConnectionSpec::from_model(None, &m, None);
        let json = serde_json::to_string(&back).unwrap();
        assert_eq!(ConnectionSpec::parse(&json).unwrap().to_model().unwrap().unwrap(), m);
    }

    #[test]
    fn rejects_shape_errors() {
        let text = r#"{"form":"matrix","rank":2,"matrix":[[{"ram":1,"terms":[]}]]}"#;
        assert!(matches!(ConnectionSpec::parse(text).unwrap().to_germ(), Err(SpecError::Shape(_))));
        assert!(ConnectionSpec::parse("{\"form\":\"bogus\"}").is_err());
    }
}
