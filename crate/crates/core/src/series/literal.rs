use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::puiseux::PuiseuxSeries;
use super::scalar::{ComplexRational, IntLit};

/// On-disk form of a series: `{"ram": q, "trunc": N or null, "terms": [[n, re_num, re_den, im_num, im_den], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesLiteral {
    #[serde(default = "default_ram")]
    pub ram: u32,
    #[serde(default)]
    pub trunc: Option<i64>,
    #[serde(default)]
    pub terms: Vec<[IntLit; 5]>,
}

fn default_ram() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiteralError {
    #[error("ramification index must be positive")]
    ZeroRam,
    #[error("term {0}: exponent must fit in a 64-bit integer")]
    BadExponent(usize),
    #[error("term {0}: malformed rational (zero denominator or non-integer)")]
    BadRational(usize),
}

impl SeriesLiteral {
    pub fn from_series(s: &PuiseuxSeries) -> Self {
        let terms = s
            .terms()
            .iter()
            .map(|(n, c)| {
                [
                    IntLit::Small(*n),
                    IntLit::from_bigint(c.re.numer()),
                    IntLit::from_bigint(c.re.denom()),
                    IntLit::from_bigint(c.im.numer()),
                    IntLit::from_bigint(c.im.denom()),
                ]
            })
            .collect();
        Self { ram: s.ram(), trunc: s.trunc(), terms }
    }

    pub fn to_series(&self) -> Result<PuiseuxSeries, LiteralError> {
        if self.ram == 0 {
            return Err(LiteralError::ZeroRam);
        }
        let mut out = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            let n = match &t[0] {
                IntLit::Small(n) => *n,
                IntLit::Big(s) => s.trim().parse().map_err(|_| LiteralError::BadExponent(i))?,
            };
            let part = |a: &IntLit, b: &IntLit| -> Option<BigRational> {
                let num: BigInt = a.to_bigint()?;
                let den: BigInt = b.to_bigint()?;
                (!den.is_zero()).then(|| BigRational::new(num, den))
            };
            let re = part(&t[1], &t[2]).ok_or(LiteralError::BadRational(i))?;
            let im = part(&t[3], &t[4]).ok_or(LiteralError::BadRational(i))?;
            out.push((n, ComplexRational::new(re, im)));
        }
        Ok(PuiseuxSeries::new(self.ram, out, self.trunc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_format() {
        let json = r#"{"ram": 2, "trunc": null, "terms": [[-1, 1, 1, 0, 1], [0, "3", "2", -1, 4]]}"#;
        let lit: SeriesLiteral = serde_json::from_str(json).unwrap();
        let s = lit.to_series().unwrap();
        assert_eq!(s.ram(), 2);
        assert_eq!(s.coeff(-1), Some(ComplexRational::from_integer(1)));
        assert_eq!(s.coeff(0), Some(ComplexRational::from_ratios(3, 2, -1, 4)));
        assert_eq!(SeriesLiteral::from_series(&s).to_series().unwrap(), s);
    }

    #[test]
    fn rejects_zero_denominator() {
        let json = r#"{"ram": 1, "terms": [[0, 1, 0, 0, 1]]}"#;
        let lit: SeriesLiteral = serde_json::from_str(json).unwrap();
        assert_eq!(lit.to_series(), Err(LiteralError::BadRational(0)));
    }
}
