use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::scalar::{rat, ComplexRational};

/// Default number of trusted terms past the valuation for operations that
/// would otherwise produce an infinite expansion.
pub const DEFAULT_BUDGET: i64 = 24;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("series has no invertible leading term")]
    ZeroLeadingTerm,
}

/// Truncated Laurent series in `t` with `t^ram = z`.
///
/// `trunc == None` means the series is known exactly (a Laurent polynomial).
/// Otherwise coefficients of `t^n` with `n > trunc` are unknown.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuiseuxSeries {
    ram: u32,
    terms: BTreeMap<i64, ComplexRational>,
    trunc: Option<i64>,
}

impl PuiseuxSeries {
    pub fn new(ram: u32, terms: impl IntoIterator<Item = (i64, ComplexRational)>, trunc: Option<i64>) -> Self {
        assert!(ram >= 1, "ramification index must be positive");
        let mut map: BTreeMap<i64, ComplexRational> = BTreeMap::new();
        for (n, c) in terms {
            if trunc.is_some_and(|t| n > t) {
                continue;
            }
            let e = map.entry(n).or_insert_with(ComplexRational::zero);
            *e += &c;
        }
        map.retain(|_, c| !c.is_zero());
        Self { ram, terms: map, trunc }
    }

    pub fn zero(ram: u32) -> Self {
        Self::new(ram, [], None)
    }

    pub fn one(ram: u32) -> Self {
        Self::constant(ram, ComplexRational::one())
    }

    pub fn constant(ram: u32, c: ComplexRational) -> Self {
        Self::new(ram, [(0, c)], None)
    }

    pub fn monomial(ram: u32, n: i64, c: ComplexRational) -> Self {
        Self::new(ram, [(n, c)], None)
    }

    /// Exact Laurent polynomial in `z` from `(exponent, coefficient)` pairs.
    pub fn laurent(terms: impl IntoIterator<Item = (i64, ComplexRational)>) -> Self {
        Self::new(1, terms, None)
    }

    pub fn ram(&self) -> u32 {
        self.ram
    }

    pub fn trunc(&self) -> Option<i64> {
        self.trunc
    }

    pub fn terms(&self) -> &BTreeMap<i64, ComplexRational> {
        &self.terms
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// Lowest stored exponent; `None` for an empty series.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Valuation used for truncation bookkeeping: an empty truncated series
    /// counts as `trunc + 1`, an exact zero as `None` (infinity).
    fn effective_valuation(&self) -> Option<i64> {
        match (self.valuation(), self.trunc) {
            (Some(v), _) => Some(v),
            (None, Some(n)) => Some(n + 1),
            (None, None) => None,
        }
    }

    /// True when the series is an exact zero or has no known nonzero term.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    /// Coefficient of `t^n`; `None` when `n` lies beyond the truncation.
    pub fn coeff(&self, n: i64) -> Option<ComplexRational> {
        if self.trunc.is_some_and(|t| n > t) {
            return None;
        }
        Some(self.terms.get(&n).cloned().unwrap_or_else(ComplexRational::zero))
    }

    /// Coefficient of `t^n`, treating unknown coefficients as zero.
    pub fn coeff_or_zero(&self, n: i64) -> ComplexRational {
        self.terms.get(&n).cloned().unwrap_or_else(ComplexRational::zero)
    }

    pub fn leading(&self) -> Option<(i64, &ComplexRational)> {
        self.terms.iter().next().map(|(n, c)| (*n, c))
    }

    /// Lower the truncation to `n` (no effect if already lower).
    pub fn truncate(&self, n: i64) -> Self {
        let t = match self.trunc {
            Some(old) => old.min(n),
            None => n,
        };
        Self::new(self.ram, self.terms.iter().map(|(k, c)| (*k, c.clone())), Some(t))
    }

    /// Drop all terms with exponent `>= n`, keeping the result exact.
    pub fn principal_part_below(&self, n: i64) -> Self {
        Self::new(
            self.ram,
            self.terms.range(..n).map(|(k, c)| (*k, c.clone())),
            None,
        )
    }

    /// Express over ramification `l`, which must be a multiple of `self.ram`.
    pub fn lift(&self, l: u32) -> Self {
        assert!(l % self.ram == 0, "lift target must be a multiple of the ramification");
        let m = (l / self.ram) as i64;
        if m == 1 {
            return self.clone();
        }
        Self {
            ram: l,
            terms: self.terms.iter().map(|(n, c)| (n * m, c.clone())).collect(),
            trunc: self.trunc.map(|t| (t + 1) * m - 1),
        }
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.ram == b.ram {
            return (a.clone(), b.clone());
        }
        let l = (a.ram as u64).lcm(&(b.ram as u64)) as u32;
        (a.lift(l), b.lift(l))
    }

    /// Reduce the ramification index by the gcd of `ram`, all exponents and `trunc + 1`.
    pub fn normalize_ram(&self) -> Self {
        let mut g = self.ram as i64;
        for n in self.terms.keys() {
            g = g.gcd(n);
        }
        if let Some(t) = self.trunc {
            g = g.gcd(&(t + 1));
        }
        if g <= 1 {
            return self.clone();
        }
        Self {
            ram: (self.ram as i64 / g) as u32,
            terms: self.terms.iter().map(|(n, c)| (n / g, c.clone())).collect(),
            trunc: self.trunc.map(|t| (t + 1) / g - 1),
        }
    }

    fn combine_trunc(a: Option<i64>, b: Option<i64>) -> Option<i64> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = Self::common(self, other);
        let trunc = Self::combine_trunc(a.trunc, b.trunc);
        let terms = a.terms.into_iter().chain(b.terms);
        Self::new(a.ram, terms, trunc)
    }

    pub fn neg(&self) -> Self {
        Self {
            ram: self.ram,
            terms: self.terms.iter().map(|(n, c)| (*n, -c)).collect(),
            trunc: self.trunc,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        if c.is_zero() {
            return Self { ram: self.ram, terms: BTreeMap::new(), trunc: self.trunc };
        }
        Self::new(self.ram, self.terms.iter().map(|(n, x)| (*n, x * c)), self.trunc)
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        self.scale(&ComplexRational::real(q.clone()))
    }

    /// Multiply by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            ram: self.ram,
            terms: self.terms.iter().map(|(n, c)| (n + k, c.clone())).collect(),
            trunc: self.trunc.map(|t| t + k),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = Self::common(self, other);
        let va = a.effective_valuation();
        let vb = b.effective_valuation();
        let from_a = a.trunc.and_then(|n| vb.map(|v| n + v));
        let from_b = b.trunc.and_then(|n| va.map(|v| n + v));
        let trunc = match (va, vb) {
            // Either factor is an exact zero.
            (None, _) | (_, None) => None,
            _ => Self::combine_trunc(from_a, from_b),
        };
        let mut out: BTreeMap<i64, ComplexRational> = BTreeMap::new();
        for (n, x) in &a.terms {
            for (m, y) in &b.terms {
                let k = n + m;
                if trunc.is_some_and(|t| k > t) {
                    continue;
                }
                let e = out.entry(k).or_insert_with(ComplexRational::zero);
                *e += &(x * y);
            }
        }
        Self::new(a.ram, out, trunc)
    }

    /// `z d/dz`: the term `t^n` becomes `(n/q) t^n`.
    pub fn derive(&self) -> Self {
        let q = self.ram as i64;
        Self::new(
            self.ram,
            self.terms.iter().map(|(n, c)| (*n, c.scale(&rat(*n, q)))),
            self.trunc,
        )
    }

    /// Substitute the variable by its `m`-th power and reduce the ramification.
    pub fn ramify(&self, m: u32) -> Self {
        assert!(m >= 1);
        let mm = m as i64;
        let raw = Self {
            ram: self.ram,
            terms: self.terms.iter().map(|(n, c)| (n * mm, c.clone())).collect(),
            trunc: self.trunc.map(|t| (t + 1) * mm - 1),
        };
        raw.normalize_ram()
    }

    /// Same as [`ramify`](Self::ramify) but keeps the ramification index, so
    /// the result is `a(t^m)` in the same variable `t`.
    pub fn substitute_power(&self, m: u32) -> Self {
        let mm = m as i64;
        Self {
            ram: self.ram,
            terms: self.terms.iter().map(|(n, c)| (n * mm, c.clone())).collect(),
            trunc: self.trunc.map(|t| (t + 1) * mm - 1),
        }
    }

    /// Replace the coefficient of `t^n` by `c_n * f(n)`.
    pub fn map_coeffs(&self, f: impl Fn(i64, &ComplexRational) -> ComplexRational) -> Self {
        Self::new(self.ram, self.terms.iter().map(|(n, c)| (*n, f(*n, c))), self.trunc)
    }

    /// Reinterpret the exponents over a new ramification index without changing them.
    pub fn with_ram(&self, ram: u32) -> Self {
        Self { ram, terms: self.terms.clone(), trunc: self.trunc }
    }

    pub fn inverse(&self) -> Result<Self, SeriesError> {
        self.inverse_with_budget(DEFAULT_BUDGET)
    }

    /// Multiplicative inverse; trusted to `min(N - 2v, budget - v)` where `v` is the valuation.
    pub fn inverse_with_budget(&self, budget: i64) -> Result<Self, SeriesError> {
        let (v, lead) = self.leading().ok_or(SeriesError::ZeroLeadingTerm)?;
        let lead_inv = lead.inv().ok_or(SeriesError::ZeroLeadingTerm)?;
        if self.terms.len() == 1 && self.trunc.is_none() {
            return Ok(Self::monomial(self.ram, -v, lead_inv));
        }
        let mut target = budget - v;
        if let Some(n) = self.trunc {
            target = target.min(n - 2 * v);
        }
        // a = c t^v (1 + e), e has positive valuation; b = t^{-v} c^{-1} sum (-e)^k.
        let e: BTreeMap<i64, ComplexRational> = self
            .terms
            .iter()
            .skip(1)
            .map(|(n, c)| (n - v, c * &lead_inv))
            .collect();
        let len = (target + v).max(-1);
        let mut b: Vec<ComplexRational> = Vec::with_capacity((len + 1).max(0) as usize);
        for k in 0..=len {
            if k == 0 {
                b.push(ComplexRational::one());
                continue;
            }
            let mut acc = ComplexRational::zero();
            for (j, ej) in e.range(1..=k) {
                acc -= &(ej * &b[(k - j) as usize]);
            }
            b.push(acc);
        }
        let terms = b.into_iter().enumerate().map(|(k, c)| (k as i64 - v, &c * &lead_inv));
        Ok(Self::new(self.ram, terms, Some(target)))
    }

    /// Equality of all coefficients up to the smaller of the two truncations.
    pub fn eq_to_trunc(&self, other: &Self) -> bool {
        let (a, b) = Self::common(self, other);
        let t = Self::combine_trunc(a.trunc, b.trunc);
        let keys = a.terms.keys().chain(b.terms.keys());
        for k in keys {
            if t.is_some_and(|t| *k > t) {
                continue;
            }
            if a.coeff_or_zero(*k) != b.coeff_or_zero(*k) {
                return false;
            }
        }
        true
    }

    /// Numeric value at a point with `log z` given (selects the branch of `z^{1/q}`).
    pub fn eval_log(&self, log_z: Complex64) -> Complex64 {
        let q = self.ram as f64;
        self.terms
            .iter()
            .map(|(n, c)| c.to_c64() * (log_z * (*n as f64 / q)).exp())
            .sum()
    }

    /// Numeric value for a single-valued (ram 1) series.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        if self.ram == 1 {
            self.terms.iter().map(|(n, c)| c.to_c64() * z.powi(*n as i32)).sum()
        } else {
            self.eval_log(z.ln())
        }
    }

    /// Value of `z d/dz` of the series, numerically.
    pub fn eval_derive_log(&self, log_z: Complex64) -> Complex64 {
        self.derive().eval_log(log_z)
    }

    /// Largest `n` with `c_n != 0` among negative exponents, i.e. the pole order in `t`.
    pub fn pole_order(&self) -> i64 {
        match self.valuation() {
            Some(v) if v < 0 => -v,
            _ => 0,
        }
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = if self.ram == 1 { "z".to_string() } else { "t".to_string() };
        let mut first = true;
        for (n, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match *n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*{var}")?,
                _ => write!(f, "{c}*{var}^{n}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(t) = self.trunc {
            write!(f, " + O({var}^{})", t + 1)?;
        }
        if self.ram > 1 {
            write!(f, " [t^{} = z]", self.ram)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> ComplexRational {
        ComplexRational::from_integer(n)
    }

    #[test]
    fn product_of_laurent_polynomials() {
        let a = PuiseuxSeries::laurent([(-1, c(1)), (0, c(1))]);
        let b = PuiseuxSeries::laurent([(-1, c(1)), (0, c(-1))]);
        assert_eq!(a.mul(&b), PuiseuxSeries::laurent([(-2, c(1)), (0, c(-1))]));
    }

    #[test]
    fn product_respects_truncation() {
        let a = PuiseuxSeries::new(1, [(0, c(1)), (1, c(1))], Some(1));
        let b = PuiseuxSeries::new(1, [(0, c(1)), (1, c(-1))], Some(1));
        let p = a.mul(&b);
        assert_eq!(p.trunc(), Some(1));
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.coeff(0), Some(c(1)));
        assert_eq!(p.coeff(2), None);
    }

    #[test]
    fn ramified_exponents_add() {
        let a = PuiseuxSeries::monomial(2, -1, c(1));
        let p = a.mul(&a);
        assert_eq!(p, PuiseuxSeries::monomial(2, -2, c(1)));
        assert_eq!(p.normalize_ram(), PuiseuxSeries::monomial(1, -1, c(1)));
    }

    #[test]
    fn derive_examples() {
        let a = PuiseuxSeries::monomial(1, -2, c(1));
        assert_eq!(a.derive(), PuiseuxSeries::monomial(1, -2, c(-2)));
        assert!(PuiseuxSeries::constant(1, c(5)).derive().is_exact_zero());
        let t = PuiseuxSeries::monomial(2, -1, c(1));
        assert_eq!(t.derive(), PuiseuxSeries::monomial(2, -1, ComplexRational::from_ratios(-1, 2, 0, 1)));
    }

    #[test]
    fn ramify_examples() {
        let a = PuiseuxSeries::monomial(1, -1, c(1));
        assert_eq!(a.ramify(2), PuiseuxSeries::monomial(1, -2, c(1)));
        assert_eq!(a.ramify(1), a);
        let half = PuiseuxSeries::monomial(2, 1, c(1));
        assert_eq!(half.ramify(2), PuiseuxSeries::monomial(1, 1, c(1)));
    }

    #[test]
    fn inverse_examples() {
        let g = PuiseuxSeries::laurent([(0, c(1)), (1, c(-1))]).inverse().unwrap();
        for n in 0..=g.trunc().unwrap() {
            assert_eq!(g.coeff(n), Some(c(1)));
        }
        let zinv = PuiseuxSeries::monomial(1, -1, c(1)).inverse().unwrap();
        assert_eq!(zinv, PuiseuxSeries::monomial(1, 1, c(1)));
        let h = PuiseuxSeries::laurent([(1, c(1)), (2, c(1))]).inverse().unwrap();
        assert_eq!(h.coeff(-1), Some(c(1)));
        assert_eq!(h.coeff(0), Some(c(-1)));
        assert_eq!(h.coeff(1), Some(c(1)));
        assert_eq!(
            PuiseuxSeries::zero(1).inverse(),
            Err(SeriesError::ZeroLeadingTerm)
        );
    }

    #[test]
    fn inverse_of_truncated_series_is_honest() {
        let a = PuiseuxSeries::new(1, [(0, c(2)), (1, c(1))], Some(3));
        let b = a.inverse().unwrap();
        assert_eq!(b.trunc(), Some(3));
        let p = a.mul(&b);
        assert!(p.eq_to_trunc(&PuiseuxSeries::one(1)));
    }

    #[test]
    fn lift_and_common_ramification() {
        let a = PuiseuxSeries::monomial(2, -1, c(1));
        let b = PuiseuxSeries::new(3, [(1, c(1))], Some(2));
        let s = a.add(&b);
        assert_eq!(s.ram(), 6);
        assert_eq!(s.coeff(-3), Some(c(1)));
        assert_eq!(s.coeff(2), Some(c(1)));
        assert_eq!(s.trunc(), Some(5));
    }
}
