use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::puiseux::{PuiseuxSeries, SeriesError};
use super::scalar::ComplexRational;
use crate::exact::QiMatrix;

/// Dense matrix of Puiseux series sharing one ramification index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesMatrix {
    rows: usize,
    cols: usize,
    ram: u32,
    data: Vec<PuiseuxSeries>,
}

impl SeriesMatrix {
    pub fn zeros(rows: usize, cols: usize, ram: u32) -> Self {
        Self { rows, cols, ram, data: vec![PuiseuxSeries::zero(ram); rows * cols] }
    }

    pub fn identity(n: usize, ram: u32) -> Self {
        let mut m = Self::zeros(n, n, ram);
        for i in 0..n {
            m.set(i, i, PuiseuxSeries::one(ram));
        }
        m
    }

    /// Build from entries; all entries are lifted to the lcm of their ramifications.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<PuiseuxSeries>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        let ram = entries.iter().fold(1u64, |l, e| l.lcm(&(e.ram() as u64))) as u32;
        Self { rows, cols, ram, data: entries.into_iter().map(|e| e.lift(ram)).collect() }
    }

    pub fn from_rows(rows: Vec<Vec<PuiseuxSeries>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self::from_entries(r, c, rows.into_iter().flatten().collect())
    }

    /// Constant matrix as exact series.
    pub fn constant(m: &QiMatrix, ram: u32) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols(), ram);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, PuiseuxSeries::constant(ram, m[(i, j)].clone()));
            }
        }
        out
    }

    /// `t^n` times a constant matrix.
    pub fn monomial(m: &QiMatrix, n: i64, ram: u32) -> Self {
        Self::constant(m, ram).shift(n)
    }

    pub fn scalar_series(n: usize, s: &PuiseuxSeries) -> Self {
        let mut out = Self::zeros(n, n, s.ram());
        for i in 0..n {
            out.set(i, i, s.clone());
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ram(&self) -> u32 {
        self.ram
    }

    pub fn get(&self, i: usize, j: usize) -> &PuiseuxSeries {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: PuiseuxSeries) {
        assert_eq!(s.ram(), self.ram, "entry ramification mismatch");
        self.data[i * self.cols + j] = s;
    }

    pub fn entries(&self) -> &[PuiseuxSeries] {
        &self.data
    }

    pub fn lift(&self, l: u32) -> Self {
        Self { rows: self.rows, cols: self.cols, ram: l, data: self.data.iter().map(|e| e.lift(l)).collect() }
    }

    fn map(&self, f: impl Fn(&PuiseuxSeries) -> PuiseuxSeries) -> Self {
        let data: Vec<PuiseuxSeries> = self.data.iter().map(f).collect();
        let ram = data.first().map_or(self.ram, |e| e.ram());
        Self { rows: self.rows, cols: self.cols, ram, data }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        if self.ram == other.ram {
            return (self.clone(), other.clone());
        }
        let l = (self.ram as u64).lcm(&(other.ram as u64)) as u32;
        (self.lift(l), other.lift(l))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let (a, b) = self.aligned(other);
        let data = a.data.iter().zip(&b.data).map(|(x, y)| x.add(y)).collect();
        Self { rows: a.rows, cols: a.cols, ram: a.ram, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|e| e.neg())
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn scale_series(&self, s: &PuiseuxSeries) -> Self {
        let l = (self.ram as u64).lcm(&(s.ram() as u64)) as u32;
        let s = s.lift(l);
        self.lift(l).map(|e| e.mul(&s))
    }

    pub fn shift(&self, k: i64) -> Self {
        self.map(|e| e.shift(k))
    }

    pub fn derive(&self) -> Self {
        self.map(|e| e.derive())
    }

    pub fn truncate(&self, n: i64) -> Self {
        self.map(|e| e.truncate(n))
    }

    /// `A(t^m)` in the same variable.
    pub fn substitute_power(&self, m: u32) -> Self {
        self.map(|e| e.substitute_power(m))
    }

    pub fn with_ram(&self, ram: u32) -> Self {
        Self { rows: self.rows, cols: self.cols, ram, data: self.data.iter().map(|e| e.with_ram(ram)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let (a, b) = self.aligned(other);
        let mut out = Self::zeros(a.rows, b.cols, a.ram);
        for i in 0..a.rows {
            for j in 0..b.cols {
                let mut acc = PuiseuxSeries::zero(a.ram);
                for k in 0..a.cols {
                    let x = a.get(i, k);
                    let y = b.get(k, j);
                    if x.is_exact_zero() || y.is_exact_zero() {
                        continue;
                    }
                    acc = acc.add(&x.mul(y));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_const_left(&self, p: &QiMatrix) -> Self {
        Self::constant(p, self.ram).mul(self)
    }

    pub fn mul_const_right(&self, p: &QiMatrix) -> Self {
        self.mul(&Self::constant(p, self.ram))
    }

    /// Lowest exponent over all entries; `None` when every entry is empty.
    pub fn valuation(&self) -> Option<i64> {
        self.data.iter().filter_map(|e| e.valuation()).min()
    }

    /// Smallest truncation over the entries; `None` when everything is exact.
    pub fn trunc(&self) -> Option<i64> {
        self.data.iter().filter_map(|e| e.trunc()).min()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_exact_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    /// Coefficient matrix of `t^n` (unknown entries read as zero).
    pub fn coeff(&self, n: i64) -> QiMatrix {
        let mut m = QiMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.get(i, j).coeff_or_zero(n);
            }
        }
        m
    }

    /// True when the coefficient of `t^n` is known in every entry.
    pub fn coeff_known(&self, n: i64) -> bool {
        self.trunc().is_none_or(|t| n <= t)
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        let mut out = Self::zeros(nr, nc, self.ram);
        for i in 0..nr {
            for j in 0..nc {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        let b = if b.ram == self.ram { b.clone() } else { b.lift(self.ram) };
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn block_diag(blocks: &[Self]) -> Self {
        let ram = blocks.iter().fold(1u64, |l, b| l.lcm(&(b.ram as u64))) as u32;
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m, ram);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, &b.lift(ram));
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Inverse of a square matrix whose lowest-order coefficient matrix is invertible.
    pub fn inverse_with_budget(&self, budget: i64) -> Result<Self, SeriesError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let v = self.valuation().ok_or(SeriesError::ZeroLeadingTerm)?;
        let lead = self.coeff(v);
        let Some(lead_inv) = lead.inverse() else {
            return self.gauss_jordan_inverse(budget);
        };
        let exact = self.trunc().is_none();
        let max_exp = self.data.iter().filter_map(|e| e.terms().keys().last().copied()).max().unwrap_or(v);
        if exact && max_exp == v {
            return Ok(Self::monomial(&lead_inv, -v, self.ram));
        }
        let mut target = budget - v;
        if let Some(t) = self.trunc() {
            target = target.min(t - 2 * v);
        }
        let len = target + v;
        let e: Vec<QiMatrix> = (0..=len.max(0)).map(|k| lead_inv.mul(&self.coeff(v + k))).collect();
        let mut b: Vec<QiMatrix> = Vec::new();
        for k in 0..=len {
            if k == 0 {
                b.push(QiMatrix::identity(n));
                continue;
            }
            let mut acc = QiMatrix::zeros(n, n);
            for j in 1..=k {
                if !e[j as usize].is_zero() {
                    acc = acc.sub(&e[j as usize].mul(&b[(k - j) as usize]));
                }
            }
            b.push(acc);
        }
        // A = t^v L (I + E), so A^{-1} = t^{-v} (I + E)^{-1} L^{-1}.
        let mut out = Self::zeros(n, n, self.ram);
        for i in 0..n {
            for j in 0..n {
                let terms = b.iter().enumerate().map(|(k, bk)| {
                    let mut acc = ComplexRational::zero();
                    for l in 0..n {
                        if !bk[(i, l)].is_zero() && !lead_inv[(l, j)].is_zero() {
                            acc += &(&bk[(i, l)] * &lead_inv[(l, j)]);
                        }
                    }
                    (k as i64 - v, acc)
                });
                out.set(i, j, PuiseuxSeries::new(self.ram, terms, Some(target)));
            }
        }
        Ok(out)
    }

    /// Gauss–Jordan over the field of Laurent series, pivoting on the lowest valuation.
    fn gauss_jordan_inverse(&self, budget: i64) -> Result<Self, SeriesError> {
        let n = self.rows;
        let mut a = self.clone();
        let mut b = Self::identity(n, self.ram);
        for col in 0..n {
            let pivot = (col..n)
                .filter_map(|i| a.get(i, col).valuation().map(|v| (v, i)))
                .min()
                .map(|(_, i)| i)
                .ok_or(SeriesError::ZeroLeadingTerm)?;
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    b.data.swap(pivot * n + j, col * n + j);
                }
            }
            let inv = a.get(col, col).inverse_with_budget(budget)?;
            for j in 0..n {
                let x = a.get(col, j).mul(&inv);
                a.set(col, j, x);
                let y = b.get(col, j).mul(&inv);
                b.set(col, j, y);
            }
            for i in 0..n {
                if i == col || a.get(i, col).is_exact_zero() {
                    continue;
                }
                let f = a.get(i, col).clone();
                for j in 0..n {
                    let x = a.get(i, j).sub(&f.mul(a.get(col, j)));
                    a.set(i, j, x);
                    let y = b.get(i, j).sub(&f.mul(b.get(col, j)));
                    b.set(i, j, y);
                }
            }
        }
        Ok(b)
    }

    pub fn inverse(&self) -> Result<Self, SeriesError> {
        self.inverse_with_budget(super::puiseux::DEFAULT_BUDGET)
    }

    /// Gauge transform `G^{-1} A G + G^{-1} z dG/dz` for the convention `z∇e = e·A`.
    pub fn gauge(&self, g: &Self, budget: i64) -> Result<Self, SeriesError> {
        let gi = g.inverse_with_budget(budget)?;
        Ok(gi.mul(&self.mul(g)).add(&gi.mul(&g.derive())))
    }

    /// Gauge transform with an explicit inverse (useful for exact monomial gauges).
    pub fn gauge_with_inverse(&self, g: &Self, g_inv: &Self) -> Self {
        g_inv.mul(&self.mul(g)).add(&g_inv.mul(&g.derive()))
    }

    pub fn conj_const(&self, p: &QiMatrix, p_inv: &QiMatrix) -> Self {
        self.mul_const_right(p).mul_const_left(p_inv)
    }

    /// Entrywise equality to the smaller truncation.
    pub fn eq_to_trunc(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.eq_to_trunc(b))
    }

    /// Drop every term with exponent `>= n` (result exact).
    pub fn principal_part_below(&self, n: i64) -> Self {
        self.map(|e| e.principal_part_below(n))
    }

    pub fn eval_log(&self, log_z: Complex64) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval_log(log_z))
    }

    pub fn trace(&self) -> PuiseuxSeries {
        let mut acc = PuiseuxSeries::zero(self.ram);
        for i in 0..self.rows.min(self.cols) {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    pub fn is_scalar_identity_multiple(&self) -> Option<PuiseuxSeries> {
        if self.rows != self.cols {
            return None;
        }
        let d = self.get(0, 0).clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j);
                if i == j {
                    if !e.eq_to_trunc(&d) {
                        return None;
                    }
                } else if !e.is_zero() {
                    return None;
                }
            }
        }
        Some(d)
    }

    /// Does every stored coefficient lie in the identity or zero pattern of `self` minus `other`?
    pub fn identity_like(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.eq_to_trunc(&PuiseuxSeries::one(self.ram))
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn one_entry(ram: u32) -> PuiseuxSeries {
        PuiseuxSeries::constant(ram, ComplexRational::one())
    }
}
