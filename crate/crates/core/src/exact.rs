//! Dense linear algebra and univariate polynomials over the Gaussian rationals.

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::series::ComplexRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QiMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ComplexRational>,
}

impl QiMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ComplexRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ComplexRational::one();
        }
        m
    }

    pub fn scalar(n: usize, c: &ComplexRational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ComplexRational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|x| ComplexRational::from_integer(*x)).collect())
                .collect(),
        )
    }

    pub fn from_columns(cols: &[Vec<ComplexRational>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn diagonal(d: &[ComplexRational]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn column(&self, j: usize) -> Vec<ComplexRational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[ComplexRational]) -> Vec<ComplexRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = ComplexRational::zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() && !self[(i, j)].is_zero() {
                        acc += &(&self[(i, j)] * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = self.transpose();
        for x in &mut out.data {
            *x = x.conj();
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn trace(&self) -> ComplexRational {
        let mut acc = ComplexRational::zero();
        for i in 0..self.rows.min(self.cols) {
            acc += &self[(i, i)];
        }
        acc
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        let mut out = Self::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                out[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn block_diag(blocks: &[Self]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let m: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(n, m);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        out.set_block(0, 0, self);
        out.set_block(0, self.cols, other);
        out
    }

    /// Reduced row echelon form; returns the form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m[(i, col)].is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, row * m.cols + j);
                }
            }
            let inv = m[(row, col)].inv().expect("pivot is nonzero");
            for j in col..m.cols {
                if !m[(row, j)].is_zero() {
                    m[(row, j)] = &m[(row, j)] * &inv;
                }
            }
            for i in 0..m.rows {
                if i == row || m[(i, col)].is_zero() {
                    continue;
                }
                let f = m[(i, col)].clone();
                for j in col..m.cols {
                    if !m[(row, j)].is_zero() {
                        let d = &f * &m[(row, j)];
                        m[(i, j)] -= &d;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, as column vectors.
    pub fn kernel(&self) -> Vec<Vec<ComplexRational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![ComplexRational::zero(); self.cols];
                v[f] = ComplexRational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -&r[(i, f)];
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.submatrix(0, n, n, n))
    }

    /// Solve `self * x = b` for a square invertible matrix.
    pub fn solve(&self, b: &Self) -> Option<Self> {
        Some(self.inverse()?.mul(b))
    }

    /// Characteristic polynomial `det(x I - A)`, low-to-high coefficients (Faddeev–LeVerrier).
    pub fn char_poly(&self) -> QiPoly {
        assert!(self.is_square());
        let n = self.rows;
        let mut coeffs = vec![ComplexRational::zero(); n + 1];
        coeffs[n] = ComplexRational::one();
        let mut m = Self::zeros(n, n);
        let id = Self::identity(n);
        for k in 1..=n {
            m = self.mul(&m).add(&id.scale(&coeffs[n - k + 1]));
            let am = self.mul(&m);
            let c = am.trace().scale(&crate::series::rat(-1, k as i64));
            coeffs[n - k] = c;
        }
        QiPoly::new(coeffs)
    }

    /// Sizes of the Jordan blocks for eigenvalue `lambda`, largest first.
    pub fn jordan_partition(&self, lambda: &ComplexRational) -> Vec<usize> {
        let n = self.rows;
        let b = self.sub(&Self::scalar(n, lambda));
        let mut ranks = vec![n];
        let mut p = Self::identity(n);
        loop {
            p = p.mul(&b);
            let r = p.rank();
            let prev = *ranks.last().unwrap();
            ranks.push(r);
            if r == prev {
                break;
            }
        }
        // blocks of size >= k: ranks[k-1] - ranks[k]
        let ge: Vec<usize> = (1..ranks.len()).map(|k| ranks[k - 1] - ranks[k]).collect();
        let mut parts = Vec::new();
        for k in (1..=ge.len()).rev() {
            let next = if k < ge.len() { ge[k] } else { 0 };
            for _ in 0..(ge[k - 1] - next) {
                parts.push(k);
            }
        }
        parts
    }

    /// Columns `P` with `P^{-1} N P = Y`, where `N` is nilpotent and `Y` has ones
    /// on the subdiagonal of each block (`Y e_j = e_{j+1}`), blocks largest first.
    pub fn nilpotent_jordan_basis(&self) -> Option<(Self, Vec<usize>)> {
        let n = self.rows;
        if !self.pow(n).is_zero() {
            return None;
        }
        let mut kernels: Vec<Vec<Vec<ComplexRational>>> = vec![Vec::new()];
        let mut p = Self::identity(n);
        loop {
            p = p.mul(self);
            let k = p.kernel();
            let full = k.len() == n;
            kernels.push(k);
            if full {
                break;
            }
            if kernels.len() > n + 1 {
                return None;
            }
        }
        let height = kernels.len() - 1;
        let mut chains: Vec<Vec<Vec<ComplexRational>>> = Vec::new();
        for k in (1..=height).rev() {
            let mut span: Vec<Vec<ComplexRational>> = kernels[k - 1].clone();
            for ch in &chains {
                // the vector of this chain sitting at height k
                let idx = ch.len() - k;
                span.push(ch[idx].clone());
            }
            let mut rank = rank_of_columns(&span, n);
            for v in &kernels[k] {
                span.push(v.clone());
                let r = rank_of_columns(&span, n);
                if r > rank {
                    rank = r;
                    let mut chain = vec![v.clone()];
                    for _ in 1..k {
                        let next = self.mul_vec(chain.last().unwrap());
                        chain.push(next);
                    }
                    chains.push(chain);
                } else {
                    span.pop();
                }
            }
        }
        chains.sort_by_key(|c| std::cmp::Reverse(c.len()));
        let partition: Vec<usize> = chains.iter().map(|c| c.len()).collect();
        let cols: Vec<Vec<ComplexRational>> = chains.into_iter().flatten().collect();
        let basis = Self::from_columns(&cols);
        basis.inverse()?;
        Some((basis, partition))
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_c64())
    }
}

fn rank_of_columns(cols: &[Vec<ComplexRational>], n: usize) -> usize {
    if cols.is_empty() {
        return 0;
    }
    let m = QiMatrix::from_columns(cols);
    debug_assert_eq!(m.rows(), n);
    m.rank()
}

/// Solve `B X - X C + s X = F` exactly; `None` when the operator is singular.
pub fn solve_sylvester(b: &QiMatrix, c: &QiMatrix, s: &ComplexRational, f: &QiMatrix) -> Option<QiMatrix> {
    let p = b.rows();
    let r = c.rows();
    let n = p * r;
    let mut sys = QiMatrix::zeros(n, n);
    let idx = |i: usize, j: usize| i * r + j;
    for i in 0..p {
        for j in 0..r {
            let row = idx(i, j);
            for k in 0..p {
                if !b[(i, k)].is_zero() {
                    sys[(row, idx(k, j))] += &b[(i, k)];
                }
            }
            for k in 0..r {
                if !c[(k, j)].is_zero() {
                    sys[(row, idx(i, k))] -= &c[(k, j)];
                }
            }
            sys[(row, row)] += s;
        }
    }
    let mut rhs = QiMatrix::zeros(n, 1);
    for i in 0..p {
        for j in 0..r {
            rhs[(idx(i, j), 0)] = f[(i, j)].clone();
        }
    }
    let x = sys.solve(&rhs)?;
    let mut out = QiMatrix::zeros(p, r);
    for i in 0..p {
        for j in 0..r {
            out[(i, j)] = x[(idx(i, j), 0)].clone();
        }
    }
    Some(out)
}

impl Index<(usize, usize)> for QiMatrix {
    type Output = ComplexRational;
    fn index(&self, (i, j): (usize, usize)) -> &ComplexRational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QiMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ComplexRational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for QiMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Polynomial with Gaussian-rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QiPoly(Vec<ComplexRational>);

impl QiPoly {
    pub fn new(mut coeffs: Vec<ComplexRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self(coeffs)
    }

    pub fn coeffs(&self) -> &[ComplexRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial has degree `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn eval(&self, x: &ComplexRational) -> ComplexRational {
        let mut acc = ComplexRational::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * x + c.to_c64();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0.iter().enumerate().skip(1).map(|(k, c)| c * &ComplexRational::from_integer(k as i64)).collect(),
        )
    }

    pub fn monic(&self) -> Self {
        match self.0.last() {
            None => self.clone(),
            Some(l) => {
                let inv = l.inv().expect("nonzero leading coefficient");
                Self::new(self.0.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.0[dd].inv().unwrap();
        let mut r = self.0.clone();
        let mut q = vec![ComplexRational::zero(); self.0.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = &r[r.len() - 1] * &lead_inv;
            for (i, x) in d.0.iter().enumerate() {
                let t = &c * x;
                r[k + i] -= &t;
            }
            q[k] = c;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (Self::new(q), Self::new(r))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn squarefree_part(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Numeric roots of a (preferably squarefree) polynomial, by Aberth iteration.
    pub fn numeric_roots(&self) -> Vec<Complex64> {
        let Some(n) = self.degree() else { return Vec::new() };
        if n == 0 {
            return Vec::new();
        }
        let p = self.monic();
        let c: Vec<Complex64> = p.0.iter().map(|x| x.to_c64()).collect();
        let dc: Vec<Complex64> = (1..=n).map(|k| c[k] * k as f64).collect();
        let eval = |coef: &[Complex64], x: Complex64| coef.iter().rev().fold(Complex64::new(0.0, 0.0), |a, b| a * x + b);
        let bound = 1.0 + c[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(0.5 * bound, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let pv = eval(&c, z[i]);
                let dv = eval(&dc, z[i]);
                if pv.norm() == 0.0 {
                    continue;
                }
                let ratio = pv / dv;
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    if j != i {
                        s += 1.0 / (z[i] - z[j]);
                    }
                }
                let w = ratio / (1.0 - ratio * s);
                if w.is_finite() {
                    z[i] -= w;
                    moved = moved.max(w.norm() / (1.0 + z[i].norm()));
                }
            }
            if moved < 1e-15 {
                break;
            }
        }
        z
    }

    /// All roots with multiplicity when every root is a Gaussian rational;
    /// otherwise the numeric roots of the squarefree part.
    pub fn exact_roots(&self) -> Result<Vec<(ComplexRational, usize)>, Vec<Complex64>> {
        let sf = self.squarefree_part();
        let approx = sf.numeric_roots();
        let mut found: Vec<ComplexRational> = Vec::new();
        for z in &approx {
            let cand = ComplexRational::approximate(*z, 1_000_000).and_then(|c| {
                sf.eval(&c).is_zero().then_some(c)
            });
            match cand {
                Some(c) if !found.contains(&c) => found.push(c),
                _ => return Err(approx),
            }
        }
        let mut out = Vec::new();
        for r in found {
            let lin = QiPoly::new(vec![-&r, ComplexRational::one()]);
            let mut p = self.clone();
            let mut mult = 0;
            loop {
                let (q, rem) = p.div_rem(&lin);
                if !rem.is_zero() {
                    break;
                }
                mult += 1;
                p = q;
            }
            out.push((r, mult));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    fn c(n: i64) -> ComplexRational {
        ComplexRational::from_integer(n)
    }

    #[test]
    fn inverse_and_rank() {
        let a = QiMatrix::from_int_rows(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QiMatrix::identity(2));
        let s = QiMatrix::from_int_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.rank(), 1);
        assert!(s.inverse().is_none());
        let k = s.kernel();
        assert_eq!(k.len(), 1);
        assert!(s.mul_vec(&k[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn char_poly_of_companion() {
        // x^2 - 3x + 2
        let a = QiMatrix::from_int_rows(&[&[0, -2], &[1, 3]]);
        assert_eq!(a.char_poly(), QiPoly::new(vec![c(2), c(-3), c(1)]));
    }

    #[test]
    fn exact_roots_with_multiplicity() {
        // (x - 1/2)^2 (x + i)
        let half = ComplexRational::real(rat(1, 2));
        let lin1 = QiPoly::new(vec![-&half, c(1)]);
        let lin2 = QiPoly::new(vec![ComplexRational::i(), c(1)]);
        let p = mul_poly(&mul_poly(&lin1, &lin1), &lin2);
        let mut roots = p.exact_roots().unwrap();
        roots.sort_by_key(|(_, m)| *m);
        assert_eq!(roots[0], (-ComplexRational::i(), 1));
        assert_eq!(roots[1], (half, 2));
        // x^2 - 2 has irrational roots
        assert!(QiPoly::new(vec![c(-2), c(0), c(1)]).exact_roots().is_err());
    }

    fn mul_poly(a: &QiPoly, b: &QiPoly) -> QiPoly {
        let mut out = vec![ComplexRational::zero(); a.coeffs().len() + b.coeffs().len() - 1];
        for (i, x) in a.coeffs().iter().enumerate() {
            for (j, y) in b.coeffs().iter().enumerate() {
                out[i + j] += &(x * y);
            }
        }
        QiPoly::new(out)
    }

    #[test]
    fn jordan_partition_and_basis() {
        // nilpotent with blocks [2,1]
        let n = QiMatrix::from_int_rows(&[&[0, 0, 0], &[1, 0, 0], &[0, 0, 0]]);
        assert_eq!(n.jordan_partition(&c(0)), vec![2, 1]);
        let scrambled = {
            let g = QiMatrix::from_int_rows(&[&[1, 2, 0], &[0, 1, 1], &[1, 0, 1]]);
            g.inverse().unwrap().mul(&n).mul(&g)
        };
        let (p, part) = scrambled.nilpotent_jordan_basis().unwrap();
        assert_eq!(part, vec![2, 1]);
        let y = p.inverse().unwrap().mul(&scrambled).mul(&p);
        assert_eq!(y, n);
    }

    #[test]
    fn sylvester_solution_satisfies_equation() {
        let b = QiMatrix::from_int_rows(&[&[1, 1], &[0, 1]]);
        let cc = QiMatrix::from_int_rows(&[&[3]]);
        let f = QiMatrix::from_int_rows(&[&[1], &[2]]);
        let x = solve_sylvester(&b, &cc, &c(0), &f).unwrap();
        assert_eq!(b.mul(&x).sub(&x.mul(&cc)), f);
    }
}
