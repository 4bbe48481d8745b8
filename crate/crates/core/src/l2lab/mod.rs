//! Weighted L² computations on sectors of the punctured disc for a rank-one
//! line whose horizontal section has norm `r^{2β}|log r|^κ e^{−2Re φ}`.
//!
//! Radial variables are handled as `u = log r`; every weight is assembled in
//! the log domain so that `e^{±c/r^ℓ}` factors never overflow before summation.

mod primitive;
mod profile;
mod quad;

pub use primitive::{
    build_primitive_angular, build_primitive_radial, build_primitive_two_form, manufactured_trial, vanishing_report, AngularPrimitive,
    RadialPrimitive, TrialRow, TwoFormPrimitive, VanishingReport,
};
pub use profile::{
    hardy_angular, hardy_radial, phase_sign_check, psi_profile, HardyAngular, HardyRadial, HardyRow, NVerdict, PhaseSign, PsiProfile,
    PsiRow,
};
pub use quad::{cumulative_simpson, log_sum_exp, simpson_weights};

use num_complex::Complex64;
use serde::Serialize;

use crate::series::PuiseuxSeries;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum L2Error {
    #[error("NonconvergentQuadrature: {coarse} at the finest preset vs {fine} after refinement")]
    NonconvergentQuadrature { coarse: f64, fine: f64 },
    #[error("SectorContainsCosZero: cos(ℓθ−τ) vanishes at θ = {0}")]
    SectorContainsCosZero(f64),
    #[error("NotMonotone: {0}")]
    NotMonotone(String),
    #[error("UnboundedRatio: {0}")]
    UnboundedRatio(f64),
    #[error("ZeroLeadingCoefficient: a_ℓ = 0")]
    ZeroLeadingCoefficient,
    #[error("InvalidData: {0}")]
    InvalidData(String),
}

impl L2Error {
    pub fn name(&self) -> &'static str {
        match self {
            L2Error::NonconvergentQuadrature { .. } => "NonconvergentQuadrature",
            L2Error::SectorContainsCosZero(_) => "SectorContainsCosZero",
            L2Error::NotMonotone(_) => "NotMonotone",
            L2Error::UnboundedRatio(_) => "UnboundedRatio",
            L2Error::ZeroLeadingCoefficient => "ZeroLeadingCoefficient",
            L2Error::InvalidData(_) => "InvalidData",
        }
    }
}

/// Line data: `φ = −(a_ℓ/z^ℓ)(1 + zψ(z))` with `ψ` holomorphic, weights `β`, `κ`,
/// a sector `(θ₀, θ₁)` and radii `(0, r₁)`.
#[derive(Clone, Debug)]
pub struct WeightedLineData {
    pub beta: f64,
    pub kappa: i32,
    pub ell: u32,
    pub a_ell: Complex64,
    /// Phase with `−Re φ = (|a_ℓ|/r^ℓ)(cos(ℓθ − τ) + r·δ_φ)`.
    pub tau: f64,
    pub sector: (f64, f64),
    pub r1: f64,
    phi: PuiseuxSeries,
    dphi: PuiseuxSeries,
}

impl WeightedLineData {
    /// Reads `ℓ`, `a_ℓ` and the tail from a single-valued exact `φ`, fixes `τ`
    /// from the leading term and checks the defining identity on a coarse grid.
    pub fn new(phi: &PuiseuxSeries, beta: f64, kappa: i32, sector: (f64, f64), r1: f64) -> Result<Self, L2Error> {
        if phi.ram() != 1 || !phi.is_exact() {
            return Err(L2Error::InvalidData("φ must be an exact Laurent polynomial in z".into()));
        }
        if !(r1 > 0.0 && r1 < 1.0) || !(sector.0 < sector.1) {
            return Err(L2Error::InvalidData(format!("need 0 < r₁ < 1 and θ₀ < θ₁, got {r1}, {sector:?}")));
        }
        let pole = phi.pole_order();
        let ell = pole as u32;
        let a_ell = if pole > 0 { -phi.coeff_or_zero(-pole).to_c64() } else { Complex64::new(0.0, 0.0) };
        // Only the polar part matters for the weight; constants drop out of Re φ
        // comparisons but are kept for evaluation.
        let tau = if pole > 0 { a_ell.arg() } else { 0.0 };
        let d = Self { beta, kappa, ell, a_ell, tau, sector, r1, phi: phi.clone(), dphi: phi.derive() };
        if pole > 0 {
            d.verify_tau()?;
        }
        Ok(d)
    }

    /// Same data on another sector.
    pub fn with_sector(&self, sector: (f64, f64)) -> Self {
        Self { sector, ..self.clone() }
    }

    pub fn phi(&self) -> &PuiseuxSeries {
        &self.phi
    }

    /// `true` when the lemma's hypotheses `a_ℓ ≠ 0` or `β ≠ 0` fail.
    pub fn excluded(&self) -> bool {
        self.a_ell.norm() == 0.0 && self.beta == 0.0
    }

    /// `−2 Re φ` at `z = e^{u + iθ}`.
    pub fn log_weight_phi(&self, u: f64, theta: f64) -> f64 {
        -2.0 * self.phi.eval_log(Complex64::new(u, theta)).re
    }

    /// `(r∂_r, ∂_θ)` of `−Re φ`.
    pub fn grad_minus_re_phi(&self, u: f64, theta: f64) -> (f64, f64) {
        let zp = self.dphi.eval_log(Complex64::new(u, theta));
        (-zp.re, zp.im)
    }

    /// `δ_φ(r, θ)` from the defining identity.
    pub fn delta(&self, u: f64, theta: f64) -> f64 {
        let r = u.exp();
        let lhs = 0.5 * self.log_weight_phi(u, theta) * r.powi(self.ell as i32) / self.a_ell.norm();
        (lhs - (self.ell as f64 * theta - self.tau).cos()) / r
    }

    fn verify_tau(&self) -> Result<(), L2Error> {
        let mut worst = [0.0f64; 2];
        for (k, r) in [1e-3f64, 1e-2].iter().enumerate() {
            for j in 0..32 {
                let th = 2.0 * std::f64::consts::PI * j as f64 / 32.0;
                worst[k] = worst[k].max(self.delta(r.ln(), th).abs());
            }
        }
        // δ_φ stays bounded as r → 0 only with the right τ.
        if !(worst[0].is_finite() && worst[0] <= 2.0 * worst[1] + 1.0) {
            return Err(L2Error::InvalidData(format!("phase identity fails: |δ| = {} at r = 1e−3", worst[0])));
        }
        Ok(())
    }

    /// Log of the line weight `r^{2β}|log r|^{κ+2(p−1)} e^{−2Re φ}` for degree `p`.
    pub fn log_weight(&self, p: i32, u: f64, theta: f64) -> f64 {
        2.0 * self.beta * u + (self.kappa + 2 * (p - 1)) as f64 * u.abs().ln() + self.log_weight_phi(u, theta)
    }
}

/// Length in `log r` of the uniform part of the tail.
const TAIL_SPAN: f64 = 36.0;

/// Quadrature presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridPreset {
    Coarse,
    Default,
    Fine,
}

impl GridPreset {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "coarse" => Some(Self::Coarse),
            "default" => Some(Self::Default),
            "fine" => Some(Self::Fine),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Coarse => "coarse",
            Self::Default => "default",
            Self::Fine => "fine",
        }
    }
}

/// Polar grid: log-uniform radii in `[r_min, r₁]` and uniform angles, both
/// with Simpson weights, plus an optional tail segment below `r_min` in the
/// variable `σ = |log r|^{−1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct L2Grid {
    pub r_min: f64,
    pub r1: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub n_tail: usize,
}

impl L2Grid {
    pub fn preset(p: GridPreset, r1: f64) -> Self {
        let (n_r, n_theta) = match p {
            GridPreset::Coarse => (201, 129),
            GridPreset::Default => (801, 513),
            GridPreset::Fine => (3201, 2049),
        };
        Self { r_min: 1e-6, r1, n_r, n_theta, n_tail: 64 }
    }

    pub fn with_r_min(self, r_min: f64) -> Self {
        Self { r_min, ..self }
    }

    pub fn refine(&self) -> Self {
        Self { n_r: 2 * self.n_r - 1, n_theta: 2 * self.n_theta - 1, n_tail: 2 * self.n_tail, ..*self }
    }

    /// Radial nodes `u = log r` with weights for `du`, ascending.
    pub fn radial(&self) -> (Vec<f64>, Vec<f64>) {
        let (u0, u1) = (self.r_min.ln(), self.r1.ln());
        let h = (u1 - u0) / (self.n_r - 1) as f64;
        let u = (0..self.n_r).map(|i| u0 + h * i as f64).collect();
        (u, simpson_weights(self.n_r, h))
    }

    /// Nodes below `r_min`, weights for `du`. A log-uniform Simpson segment of
    /// length `TAIL_SPAN` below `log r_min` takes the exponentially decaying part;
    /// further down `u = −1/σ²` with midpoints in `σ`, which integrates `|u|^{−2}`
    /// and `|u|^{−3/2}` exactly.
    pub fn tail(&self) -> (Vec<f64>, Vec<f64>) {
        let u1 = self.r_min.ln();
        let u0 = u1 - TAIL_SPAN;
        let n = 16 * self.n_tail + 1;
        let h = TAIL_SPAN / (n - 1) as f64;
        let (mut us, mut ws): (Vec<f64>, Vec<f64>) = (0..n).map(|k| u0 + h * k as f64).zip(simpson_weights(n, h)).unzip();
        let s0 = (-u0).recip().sqrt();
        let h = s0 / self.n_tail as f64;
        for k in 0..self.n_tail {
            let s = h * (k as f64 + 0.5);
            us.push(-1.0 / (s * s));
            ws.push(2.0 * h / (s * s * s));
        }
        (us, ws)
    }

    pub fn angular(&self, sector: (f64, f64)) -> (Vec<f64>, Vec<f64>) {
        let h = (sector.1 - sector.0) / (self.n_theta - 1) as f64;
        ((0..self.n_theta).map(|k| sector.0 + h * k as f64).collect(), simpson_weights(self.n_theta, h))
    }
}

/// Differential form given by component functions of `(log r, θ)`.
pub enum Form<'a> {
    /// `f` (degree 0).
    Function(&'a dyn Fn(f64, f64) -> Complex64),
    /// `f·dr/r + g·dθ`.
    One(&'a dyn Fn(f64, f64) -> Complex64, &'a dyn Fn(f64, f64) -> Complex64),
    /// `h·dθ dr/r`.
    Two(&'a dyn Fn(f64, f64) -> Complex64),
}

impl Form<'_> {
    fn degree(&self) -> i32 {
        match self {
            Form::Function(_) => 0,
            Form::One(..) => 1,
            Form::Two(_) => 2,
        }
    }

    fn abs_sq(&self, u: f64, th: f64) -> f64 {
        match self {
            Form::Function(f) | Form::Two(f) => f(u, th).norm_sqr(),
            Form::One(f, g) => f(u, th).norm_sqr() + g(u, th).norm_sqr(),
        }
    }
}

/// `∫ |·|² r^{2β}|log r|^{κ+2(p−1)} e^{−2Re φ} dθ dr/r` over `d.sector × (0, r₁)`.
/// The tail below `r_min` is included when `φ` has no pole.
pub fn weighted_norm(form: &Form, d: &WeightedLineData, g: &L2Grid) -> f64 {
    let p = form.degree();
    let (th, wt) = g.angular(d.sector);
    let (mut us, mut wu) = g.radial();
    if d.a_ell.norm() == 0.0 {
        let (tu, tw) = g.tail();
        us.extend(tu);
        wu.extend(tw);
    }
    let mut terms = Vec::with_capacity(us.len() * th.len());
    for (u, wu) in us.iter().zip(&wu) {
        for (t, wt) in th.iter().zip(&wt) {
            let v = form.abs_sq(*u, *t);
            if v > 0.0 {
                terms.push((wu * wt).ln() + v.ln() + d.log_weight(p, *u, *t));
            }
        }
    }
    log_sum_exp(&terms).exp()
}

/// [`weighted_norm`] at a preset, failing when one refinement moves it by more than 1%.
pub fn weighted_norm_converged(form: &Form, d: &WeightedLineData, preset: GridPreset) -> Result<f64, L2Error> {
    let g = L2Grid::preset(preset, d.r1);
    let coarse = weighted_norm(form, d, &g);
    let fine = weighted_norm(form, d, &g.refine());
    if !coarse.is_finite() || !fine.is_finite() || (coarse - fine).abs() > 0.01 * fine.abs() {
        return Err(L2Error::NonconvergentQuadrature { coarse, fine });
    }
    Ok(fine)
}

/// Quintic smoothstep bump: 0 below `a`, 1 above `b`.
pub fn smoothstep(x: f64, a: f64, b: f64) -> f64 {
    let t = ((x - a) / (b - a)).clamp(0.0, 1.0);
    t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

pub fn smoothstep_prime(x: f64, a: f64, b: f64) -> f64 {
    let t = (x - a) / (b - a);
    if !(0.0..=1.0).contains(&t) {
        return 0.0;
    }
    30.0 * t * t * (1.0 - t) * (1.0 - t) / (b - a)
}

/// Plateau bump: 1 on `inner`, 0 outside `outer`.
pub fn plateau(theta: f64, inner: (f64, f64), outer: (f64, f64)) -> f64 {
    smoothstep(theta, outer.0, inner.0) * (1.0 - smoothstep(theta, inner.1, outer.1))
}

pub fn plateau_prime(theta: f64, inner: (f64, f64), outer: (f64, f64)) -> f64 {
    smoothstep_prime(theta, outer.0, inner.0) * (1.0 - smoothstep(theta, inner.1, outer.1))
        - smoothstep(theta, outer.0, inner.0) * smoothstep_prime(theta, inner.1, outer.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ComplexRational;
    use std::f64::consts::PI;

    fn one(_: f64, _: f64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn calibration_integrals() {
        let d = WeightedLineData::new(&PuiseuxSeries::zero(1), 0.0, 0, (0.0, 2.0 * PI), 0.5).unwrap();
        let g = L2Grid::preset(GridPreset::Default, 0.5);
        let v = weighted_norm(&Form::Function(&one), &d, &g);
        let want = 2.0 * PI / 2f64.ln();
        assert!((v - want).abs() < 1e-3 * want, "{v}");

        let f = |u: f64, _: f64| Complex64::new(u.exp(), 0.0);
        let zero = |_: f64, _: f64| Complex64::new(0.0, 0.0);
        let v = weighted_norm(&Form::One(&f, &zero), &d, &g);
        assert!((v - PI / 4.0).abs() < 1e-3 * PI / 4.0, "{v}");
    }

    #[test]
    fn decaying_weight_is_finite_and_stable() {
        let phi = PuiseuxSeries::laurent([(-1, ComplexRational::from_integer(-1))]);
        let d = WeightedLineData::new(&phi, 0.0, 0, (2.0 * PI / 3.0, 4.0 * PI / 3.0), 0.5).unwrap();
        let v = weighted_norm_converged(&Form::Function(&one), &d, GridPreset::Default).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn tau_follows_the_identity() {
        let phi = PuiseuxSeries::laurent([(-1, ComplexRational::from_integer(-1))]);
        let d = WeightedLineData::new(&phi, 0.0, 0, (0.0, 1.0), 0.5).unwrap();
        assert_eq!(d.ell, 1);
        assert!((d.a_ell - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(d.tau, 0.0);
        assert!(d.delta((1e-3f64).ln(), 0.7).abs() < 1e-9);

        let phi = PuiseuxSeries::laurent([(-2, ComplexRational::from_ints(0, 1)), (-1, ComplexRational::from_integer(3))]);
        let d = WeightedLineData::new(&phi, 0.0, 0, (0.0, 1.0), 0.5).unwrap();
        assert_eq!(d.ell, 2);
        assert!((d.tau + PI / 2.0).abs() < 1e-12);
    }
}
