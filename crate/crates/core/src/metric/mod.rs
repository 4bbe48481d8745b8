//! Model metrics `k`, `k₁` near the puncture, their Chern connection and
//! curvature, the pseudo-curvature, the Higgs field and the Stokes-glued metric.
//!
//! All quantities live in the model variable `t` (equal to `z` when `q = 1`).
//! Matrices are written in the frame `e` where the model connection is
//! `z∇e = e·(Y + (−α + zφ′) Id)` with `Y` the triple of [`crate::sl2`].

mod glue;

pub use glue::{fit_decay, glued_curvature_ratio, glued_metric, DecayFit, GluedValue, StokesGluingData};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::model::ElementaryModel;
use crate::series::PuiseuxSeries;
use crate::sl2::{adapted_metric_frame, ModelFrame};

pub type CMat = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("DomainError: |z| = {0} is outside the punctured unit disc")]
    DomainError(f64),
    #[error("BadDominanceOrder: constant ({i},{j}) on overlap {overlap} is not flat there")]
    BadDominanceOrder { overlap: usize, i: usize, j: usize },
    #[error("InvalidGluing: {0}")]
    InvalidGluing(String),
}

impl MetricError {
    pub fn name(&self) -> &'static str {
        match self {
            MetricError::DomainError(_) => "DomainError",
            MetricError::BadDominanceOrder { .. } => "BadDominanceOrder",
            MetricError::InvalidGluing(_) => "InvalidGluing",
        }
    }
}

pub(crate) fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

fn diag(v: impl IntoIterator<Item = Complex64>) -> CMat {
    let v: Vec<_> = v.into_iter().collect();
    CMat::from_diagonal(&nalgebra::DVector::from_vec(v))
}

/// `exp(s·N)` for nilpotent `N` by the finite series.
pub fn nilpotent_exp(n: &CMat, s: f64) -> CMat {
    let d = n.nrows();
    let mut out = CMat::identity(d, d);
    let mut term = CMat::identity(d, d);
    for k in 1..=d {
        term = &term * n * Complex64::new(s / k as f64, 0.0);
        out += &term;
    }
    out
}

/// Operator 2-norm.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// Data of the model metric built from an elementary model.
#[derive(Clone, Debug)]
pub struct ModelMetric {
    pub q: u32,
    pub frame: ModelFrame,
    /// `φ` of each basis vector's block, as a series in `t`.
    pub phi: Vec<PuiseuxSeries>,
    /// `t∂φ` per basis vector.
    pub dphi: Vec<PuiseuxSeries>,
    /// `β′ = −Σ α′_j`.
    pub beta_re: f64,
    y: CMat,
    x: CMat,
    h: CMat,
}

/// `K` and `K₁` at one point.
#[derive(Clone, Debug)]
pub struct MetricValue {
    pub a: f64,
    pub k: CMat,
    pub k1: CMat,
    pub det_k: f64,
    /// `Π |z|^{−2α′_j}`.
    pub det_expected: f64,
}

#[derive(Clone, Debug)]
pub struct Curvature {
    pub m_k: CMat,
    pub r: CMat,
    pub r_orth: CMat,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct HiggsField {
    pub matrix: CMat,
    /// Max-entry difference between the evaluations at two radii.
    pub drift: f64,
}

/// Closed polar rectangle `θ₀ ≤ arg z ≤ θ₁`, `r_min ≤ |z| ≤ r_max`, sampled
/// on a log-spaced radial grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectorGrid {
    pub theta0: f64,
    pub theta1: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
}

impl SectorGrid {
    pub fn refine(&self) -> Self {
        Self { n_r: 2 * self.n_r - 1, n_theta: 2 * self.n_theta - 1, ..*self }
    }

    /// `(log|z|, arg z)` pairs.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let step = |lo: f64, hi: f64, n: usize, k: usize| if n <= 1 { lo } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
        let (l0, l1) = (self.r_min.ln(), self.r_max.ln());
        let mut out = Vec::with_capacity(self.n_r * self.n_theta);
        for i in 0..self.n_r {
            for k in 0..self.n_theta {
                out.push((step(l0, l1, self.n_r, i), step(self.theta0, self.theta1, self.n_theta, k)));
            }
        }
        out
    }
}

impl ModelMetric {
    pub fn new(m: &ElementaryModel) -> Self {
        let frame = adapted_metric_frame(m);
        let mut phi = Vec::with_capacity(frame.rank());
        for &c in &frame.component_of {
            phi.push(m.phi_in_t(frame.components[c].block));
        }
        let dphi = phi.iter().map(|p| p.derive()).collect();
        let beta_re = -frame.alpha_re.iter().sum::<f64>();
        let (y, x, h) = (to_complex(&frame.y), to_complex(&frame.x), to_complex(&frame.h));
        Self { q: m.ram(), frame, phi, dphi, beta_re, y, x, h }
    }

    pub fn rank(&self) -> usize {
        self.frame.rank()
    }

    pub fn y(&self) -> &CMat {
        &self.y
    }

    pub fn x(&self) -> &CMat {
        &self.x
    }

    pub fn h(&self) -> &CMat {
        &self.h
    }

    /// `a(z) = |log zz̄|`, after checking `0 < |z| < 1`.
    pub fn a(&self, z: Complex64) -> Result<f64, MetricError> {
        let r = z.norm();
        if !(r > 0.0 && r < 1.0) {
            return Err(MetricError::DomainError(r));
        }
        Ok(-2.0 * r.ln())
    }

    fn weights_pow(&self, a: f64, s: f64) -> CMat {
        diag(self.frame.weights.iter().map(|w| Complex64::new(a.powf(s * *w as f64), 0.0)))
    }

    fn delta_pow(&self, r: f64, s: f64) -> CMat {
        diag(self.frame.alpha_re.iter().map(|al| Complex64::new(r.powf(s * al), 0.0)))
    }

    /// `P(z) = δ a^{−H/2} e^X`, so that `e·P` is `k`-orthonormal.
    pub fn frame_p(&self, z: Complex64) -> Result<CMat, MetricError> {
        let a = self.a(z)?;
        Ok(self.delta_pow(z.norm(), 1.0) * self.weights_pow(a, -0.5) * nilpotent_exp(&self.x, 1.0))
    }

    /// `P⁻¹ = e^{−X} a^{H/2} δ⁻¹`.
    pub fn frame_p_inv(&self, z: Complex64) -> Result<CMat, MetricError> {
        let a = self.a(z)?;
        Ok(nilpotent_exp(&self.x, -1.0) * self.weights_pow(a, 0.5) * self.delta_pow(z.norm(), -1.0))
    }

    /// Connection matrix `A(z) = Y + diag(−α_j + zφ′_j(z))`.
    pub fn connection_matrix(&self, z: Complex64) -> CMat {
        let lz = z.ln();
        let d = diag((0..self.rank()).map(|j| {
            Complex64::new(-self.frame.alpha_re[j], -self.frame.alpha_im[j]) + self.dphi[j].eval_log(lz)
        }));
        &self.y + d
    }

    pub fn eval_metric(&self, z: Complex64) -> Result<MetricValue, MetricError> {
        let a = self.a(z)?;
        let r = z.norm();
        let dinv = self.delta_pow(r, -1.0);
        let ah = self.weights_pow(a, 0.5);
        let k = &dinv * &ah * nilpotent_exp(&self.y, -1.0) * nilpotent_exp(&self.x, -1.0) * &ah * &dinv;
        let k1 = diag((0..self.rank()).map(|j| {
            Complex64::new(r.powf(-2.0 * self.frame.alpha_re[j]) * a.powi(self.frame.weights[j] as i32), 0.0)
        }));
        let det_k = k.determinant().re;
        let det_expected = r.powf(2.0 * self.beta_re);
        Ok(MetricValue { a, k, k1, det_k, det_expected })
    }

    /// `M_k = −α′ − Y − 2H/a + 2X/a²`, coefficient of `dz/z` in `K⁻¹∂K`.
    pub fn m_k(&self, z: Complex64) -> Result<CMat, MetricError> {
        let a = self.a(z)?;
        let al = diag(self.frame.alpha_re.iter().map(|x| Complex64::new(-x, 0.0)));
        Ok(al - &self.y - &self.h * Complex64::new(2.0 / a, 0.0) + &self.x * Complex64::new(2.0 / (a * a), 0.0))
    }

    pub fn connection_and_curvature(&self, z: Complex64) -> Result<Curvature, MetricError> {
        let a = self.a(z)?;
        let m_k = self.m_k(z)?;
        let r = &self.h * Complex64::new(2.0 / (a * a), 0.0) - &self.x * Complex64::new(4.0 / (a * a * a), 0.0);
        let r_orth = self.frame_p_inv(z)? * &r * self.frame_p(z)?;
        let ratio = op_norm(&r_orth) * a * a;
        Ok(Curvature { m_k, r, r_orth, ratio })
    }

    /// Max-entry residuals of finite-difference checks with stencil `h` in
    /// `(log r, θ)`: `K⁻¹ z∂K − M_k` and `z̄∂_{z̄} M_k + R`.
    pub fn curvature_fd_residuals(&self, z: Complex64, h: f64) -> Result<(f64, f64), MetricError> {
        let (s, th) = (z.norm().ln(), z.arg());
        let at = |ds: f64, dt: f64| Complex64::from_polar((s + ds).exp(), th + dt);
        let wirtinger = |f: &dyn Fn(Complex64) -> Result<CMat, MetricError>, bar: bool| -> Result<CMat, MetricError> {
            let dr = (f(at(h, 0.0))? - f(at(-h, 0.0))?) / Complex64::new(2.0 * h, 0.0);
            let dt = (f(at(0.0, h))? - f(at(0.0, -h))?) / Complex64::new(2.0 * h, 0.0);
            let i = if bar { Complex64::i() } else { -Complex64::i() };
            Ok((dr + dt * i) * Complex64::new(0.5, 0.0))
        };
        let k = self.eval_metric(z)?.k;
        let kinv = k.try_inverse().expect("K is positive definite");
        let dk = wirtinger(&|w| Ok(self.eval_metric(w)?.k), false)?;
        let r1 = (kinv * dk - self.m_k(z)?).camax();
        let dm = wirtinger(&|w| self.m_k(w), true)?;
        let r2 = (dm + self.connection_and_curvature(z)?.r).camax();
        Ok((r1, r2))
    }

    /// Pieces of `Θ = ½(M^{1,0} + M^{0,1*})` and of the `(0,1)` part
    /// `U = M^{0,1} − Θ*` of the unitary connection, in the orthonormal frame
    /// `e·P`. The scalar `Λ = diag(zφ′_j)` is kept apart: `Θ = Θ₀ + Λ/2`,
    /// `U = U₀ − Λ̄/2`. Returns `(Θ₀, U₀, M^{0,1}, A₀, λ)` with `A₀ = P⁻¹(A − Λ)P`.
    #[allow(clippy::type_complexity)]
    fn theta_parts(&self, z: Complex64) -> Result<(CMat, CMat, CMat, CMat, Vec<Complex64>), MetricError> {
        let a = self.a(z)?;
        let p = self.frame_p(z)?;
        let pinv = self.frame_p_inv(z)?;
        let half = Complex64::new(0.5, 0.0);
        let lz = z.ln();
        let lam: Vec<Complex64> = self.dphi.iter().map(|d| d.eval_log(lz)).collect();
        // z∂P = z̄∂_{z̄}P = D·P with D diagonal.
        let d = diag((0..self.rank()).map(|j| {
            Complex64::new(self.frame.alpha_re[j] / 2.0 + self.frame.weights[j] as f64 / (2.0 * a), 0.0)
        }));
        let a0 = &self.y + diag(self.frame.alpha_re.iter().zip(&self.frame.alpha_im).map(|(re, im)| Complex64::new(-re, -im)));
        let pap0 = &pinv * a0 * &p;
        let m01 = &pinv * &d * &p;
        let theta0 = (&pap0 + &m01 + m01.adjoint()) * half;
        let u0 = (&m01 - pap0.adjoint() - m01.adjoint()) * half;
        Ok((theta0, u0, m01, pap0, lam))
    }

    /// `∂̄_E θ` as the coefficient of `dz̄/z̄ ∧ dz/z` in the orthonormal frame.
    /// Commutators with the diagonal `Λ` are taken entrywise, `[Λ, B]_{ij} =
    /// (λ_i − λ_j)B_{ij}`, so the large `zφ′` never enters a matrix product.
    pub fn pseudo_curvature(&self, z: Complex64) -> Result<CMat, MetricError> {
        let a = self.a(z)?;
        let (theta0, u0, m01, pap0, lam) = self.theta_parts(z)?;
        let p = self.frame_p(z)?;
        let pinv = self.frame_p_inv(z)?;
        let half = Complex64::new(0.5, 0.0);
        let ad = |l: &[Complex64], b: &CMat| CMat::from_fn(b.nrows(), b.ncols(), |i, j| (l[i] - l[j]) * b[(i, j)]);
        let lam_bar: Vec<Complex64> = lam.iter().map(|x| x.conj()).collect();
        // z̄∂_{z̄} D = z∂D = H/(2a²)
        let dd = &pinv * (&self.h * Complex64::new(1.0 / (2.0 * a * a), 0.0)) * &p;
        // ∂̄Θ = ½([A, M^{0,1}] + z̄∂_{z̄}M^{0,1} + (z∂M^{0,1})*), with A = A₀ + Λ.
        let dtheta = (&pap0 * &m01 - &m01 * &pap0 + ad(&lam, &m01) + &dd + dd.adjoint()) * half;
        // [U, Θ] = [U₀, Θ₀] + ½[U₀, Λ] − ½[Λ̄, Θ₀]; Λ and Λ̄ commute.
        let comm = &u0 * &theta0 - &theta0 * &u0 - ad(&lam, &u0) * half - ad(&lam_bar, &theta0) * half;
        Ok(dtheta + comm)
    }

    /// `Θ` in the orthonormal frame.
    pub fn theta(&self, z: Complex64) -> Result<CMat, MetricError> {
        let (theta0, _, _, _, lam) = self.theta_parts(z)?;
        Ok(theta0 + diag(lam.into_iter().map(|l| l * 0.5)))
    }

    fn higgs_at(&self, z: Complex64) -> Result<CMat, MetricError> {
        let a = self.a(z)?;
        let r = z.norm();
        let lz = z.ln();
        let mut theta = self.theta(z)?;
        for j in 0..self.rank() {
            theta[(j, j)] -= self.dphi[j].eval_log(lz) * 0.5;
        }
        // Change of frame P⁻¹Q = δ⁻¹ |z|^{iα″} a^{H/2}.
        let qrel = diag((0..self.rank()).map(|j| {
            Complex64::from_polar(r.powf(-self.frame.alpha_re[j]), self.frame.alpha_im[j] * r.ln())
                * a.powf(self.frame.weights[j] as f64 / 2.0)
        }));
        let qinv = qrel.map(|c| if c == Complex64::new(0.0, 0.0) { c } else { c.inv() });
        Ok(qinv * theta * qrel)
    }

    pub fn higgs_field(&self) -> HiggsField {
        let z1 = Complex64::from_polar(0.2, 0.3);
        let z2 = Complex64::from_polar(0.05, 1.1);
        let m1 = self.higgs_at(z1).expect("inside the disc");
        let m2 = self.higgs_at(z2).expect("inside the disc");
        let drift = (&m1 - m2).camax();
        HiggsField { matrix: m1, drift }
    }

    /// Natural log of `k₁(ẽ_j, ẽ_j) / (e^{−2Re φ} a^{w_j})` at `z = e^{s+iθ}`,
    /// with `log z = s + iθ` fixing the branch.
    pub fn horizontal_log_ratio(&self, j: usize, s: f64, theta: f64) -> Result<f64, MetricError> {
        let lz = Complex64::new(s, theta);
        let z = lz.exp();
        let mv = self.eval_metric(z)?;
        let alpha = Complex64::new(self.frame.alpha_re[j], self.frame.alpha_im[j]);
        let mut e = CMat::zeros(self.rank(), 1);
        e[(j, 0)] = Complex64::new(1.0, 0.0);
        let ey = nilpotent_exp(&(&self.y * (-lz)), 1.0);
        let col = ey * e * (alpha * lz).exp();
        let quad = (col.adjoint() * &mv.k1 * &col)[(0, 0)].re;
        let re_phi = self.phi[j].eval_log(lz).re;
        let num = -2.0 * re_phi + quad.ln();
        let den = -2.0 * re_phi + self.frame.weights[j] as f64 * mv.a.ln();
        Ok(num - den)
    }

    /// Empirical extrema `(C1, C2)` of the normalized horizontal norm over a grid.
    pub fn horizontal_norm_check(&self, j: usize, grid: &SectorGrid) -> Result<(f64, f64), MetricError> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (s, th) in grid.points() {
            let v = self.horizontal_log_ratio(j, s, th)?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok((lo.exp(), hi.exp()))
    }

    /// Smallest `c` with `K₁/c ≤ K ≤ c·K₁` on the grid.
    pub fn mutual_bound(&self, grid: &SectorGrid) -> Result<f64, MetricError> {
        let mut c: f64 = 1.0;
        for (s, th) in grid.points() {
            let mv = self.eval_metric(Complex64::from_polar(s.exp(), th))?;
            let scale = diag(mv.k1.diagonal().iter().map(|x| Complex64::new(1.0 / x.re.sqrt(), 0.0)));
            let m = &scale * &mv.k * &scale;
            let ev = m.symmetric_eigenvalues();
            c = c.max(ev.max()).max(1.0 / ev.min());
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ElementaryBlock, RegularBlockData};
    use crate::series::ComplexRational;

    fn model(phi: PuiseuxSeries, alpha: ComplexRational, partition: Vec<usize>) -> ModelMetric {
        let m = ElementaryModel::new(1, vec![ElementaryBlock { phi, regs: vec![RegularBlockData::new(alpha, partition).unwrap()] }]).unwrap();
        ModelMetric::new(&m)
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn metric_examples() {
        let mm = model(PuiseuxSeries::zero(1), ComplexRational::from_integer(0), vec![1]);
        assert!((mm.eval_metric(c(0.3, 0.1)).unwrap().k[(0, 0)] - 1.0).norm() < 1e-15);

        let mm = model(PuiseuxSeries::zero(1), ComplexRational::from_ratios(1, 3, 0, 1), vec![1]);
        let k = mm.eval_metric(c(0.25, 0.0)).unwrap().k;
        assert!((k[(0, 0)].re - 4f64.powf(2.0 / 3.0)).abs() < 1e-12);

        let mm = model(PuiseuxSeries::zero(1), ComplexRational::from_integer(0), vec![2]);
        let k = mm.eval_metric(c((-0.5f64).exp(), 0.0)).unwrap().k;
        let want = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)]);
        assert!((k - want).camax() < 1e-12);
        let k = mm.eval_metric(c((-1.0f64).exp(), 0.0)).unwrap().k;
        let want = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)]);
        assert!((k - want).camax() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let mm = model(PuiseuxSeries::zero(1), ComplexRational::from_integer(0), vec![1]);
        assert!(matches!(mm.eval_metric(c(0.0, 0.0)), Err(MetricError::DomainError(_))));
        assert!(matches!(mm.eval_metric(c(1.0, 0.0)), Err(MetricError::DomainError(_))));
    }

    #[test]
    fn curvature_examples() {
        let mm = model(PuiseuxSeries::zero(1), ComplexRational::from_integer(0), vec![2]);
        let cv = mm.connection_and_curvature(c((-1.0f64).exp(), 0.0)).unwrap();
        let want = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)]);
        assert!((cv.r_orth - want).camax() < 1e-12);
        assert!((cv.ratio - 2.0).abs() < 1e-12);
        let (r1, r2) = mm.curvature_fd_residuals(Complex64::from_polar(0.3, 0.7), 1e-5).unwrap();
        assert!(r1 < 1e-6 && r2 < 1e-6, "{r1} {r2}");

        let mm = model(PuiseuxSeries::zero(1), ComplexRational::from_ratios(1, 3, 1, 2), vec![1]);
        let cv = mm.connection_and_curvature(c(0.2, 0.1)).unwrap();
        assert_eq!(cv.r.camax(), 0.0);
        assert_eq!(cv.ratio, 0.0);
    }

    #[test]
    fn pseudo_curvature_vanishes() {
        let mm = model(PuiseuxSeries::zero(1), ComplexRational::from_ratios(1, 4, 0, 1), vec![1]);
        assert_eq!(mm.pseudo_curvature(c(0.2, 0.3)).unwrap().camax(), 0.0);
        let z = Complex64::from_polar(0.3, std::f64::consts::PI / 7.0);
        let mm = model(PuiseuxSeries::zero(1), ComplexRational::from_integer(0), vec![2]);
        let g0 = mm.pseudo_curvature(z).unwrap();
        assert!(op_norm(&g0) < 1e-10);
        let phi = PuiseuxSeries::laurent([(-1, ComplexRational::from_integer(1))]);
        let mm = model(phi, ComplexRational::from_integer(0), vec![2]);
        assert!(op_norm(&mm.pseudo_curvature(z).unwrap()) < 1e-10);
    }

    #[test]
    fn higgs_examples() {
        let mm = model(PuiseuxSeries::zero(1), ComplexRational::from_ratios(0, 1, 1, 1), vec![1]);
        let hf = mm.higgs_field();
        assert!((hf.matrix[(0, 0)] - c(0.0, -0.5)).norm() < 1e-12);
        let mm = model(PuiseuxSeries::zero(1), ComplexRational::from_integer(0), vec![3]);
        let hf = mm.higgs_field();
        assert!((hf.matrix - mm.y()).camax() < 1e-10);
        assert!(hf.drift < 1e-10);
    }

    #[test]
    fn horizontal_norms() {
        let grid = SectorGrid { theta0: 0.0, theta1: 1.0, r_min: 0.01, r_max: 0.5, n_r: 9, n_theta: 5 };
        let mm = model(PuiseuxSeries::zero(1), ComplexRational::from_integer(0), vec![1]);
        let (c1, c2) = mm.horizontal_norm_check(0, &grid).unwrap();
        assert!((c1 - 1.0).abs() < 1e-12 && (c2 - 1.0).abs() < 1e-12);
        let phi = PuiseuxSeries::laurent([(-1, ComplexRational::from_integer(1))]);
        let mm = model(phi, ComplexRational::from_integer(0), vec![1]);
        let (c1, c2) = mm.horizontal_norm_check(0, &grid).unwrap();
        assert!((c1 - 1.0).abs() < 1e-9 && (c2 - 1.0).abs() < 1e-9);

        let mm = model(PuiseuxSeries::zero(1), ComplexRational::from_integer(0), vec![2]);
        let pi = std::f64::consts::PI;
        let grid = SectorGrid { theta0: pi / 6.0, theta1: pi / 3.0, r_min: 1e-3, r_max: 0.3, n_r: 11, n_theta: 5 };
        for j in 0..2 {
            let (c1, c2) = mm.horizontal_norm_check(j, &grid).unwrap();
            let (d1, d2) = mm.horizontal_norm_check(j, &grid.refine().refine()).unwrap();
            assert!(c1 > 0.0 && c2.is_finite() && c1 <= c2);
            assert!((c1 - d1).abs() / d1 < 0.05 && (c2 - d2).abs() / d2 < 0.05, "{c1} {d1} {c2} {d2}");
        }
        assert!(mm.mutual_bound(&grid).unwrap().is_finite());
    }
}
