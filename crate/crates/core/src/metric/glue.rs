use std::f64::consts::PI;

use num_complex::Complex64;

use super::{op_norm, CMat, MetricError, ModelMetric};
use crate::model::{complex_from_pair, StokesLiteral};

/// Cover by `L` sectors `I_ℓ = [b_{ℓ−1} − w, b_ℓ + w]` whose consecutive
/// overlaps are centred on `b_ℓ = b_0 + 2πℓ/L`, with Stokes constants per overlap.
#[derive(Clone, Debug)]
pub struct StokesGluingData {
    pub cover: usize,
    pub first_boundary: f64,
    pub half_width: f64,
    /// Per overlap, entries `(i, j, c_ij)`.
    pub constants: Vec<Vec<(usize, usize, Complex64)>>,
    /// Per overlap, basis order in which every `μ` is strictly upper triangular.
    pub order: Vec<Vec<usize>>,
    /// Per overlap and constant, `(p, c)` with `φ_i − φ_j ~ c t^{−p}`.
    leading: Vec<Vec<(i64, Complex64)>>,
}

#[derive(Clone, Debug)]
pub struct GluedValue {
    pub k: CMat,
    /// `K_glued − K`.
    pub delta: CMat,
    pub overlap: Option<usize>,
    pub chi: f64,
    /// Determinant of `Id + χμ`, as the product of its diagonal in dominance order.
    pub det_transition: Complex64,
}

#[derive(Clone, Debug)]
pub struct DecayFit {
    /// Measured `η` in `‖Δ‖ ≈ C r^s e^{−η/r^p}`.
    pub eta: f64,
    pub predicted_eta: f64,
    pub pole: i64,
    pub log_c: f64,
    pub power: f64,
    pub max_residual: f64,
}

/// Quintic smoothstep on `[0, 1]`.
fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
}

fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

impl StokesGluingData {
    pub fn from_literal(mm: &ModelMetric, lit: &StokesLiteral) -> Result<Self, MetricError> {
        let bad = |e: crate::model::SpecError| MetricError::InvalidGluing(e.to_string());
        let b0 = crate::series::rat_to_f64(&lit.first_boundary.to_value().map_err(bad)?) * PI;
        let mut cs = Vec::with_capacity(lit.constants.len());
        for c in &lit.constants {
            cs.push((c.overlap, c.i, c.j, complex_from_pair(&c.value).map_err(bad)?.to_c64()));
        }
        let cover = lit.cover.max(1);
        Self::new(mm, lit.cover, b0, PI / (4.0 * cover as f64), &cs)
    }

    pub fn new(
        mm: &ModelMetric,
        cover: usize,
        first_boundary: f64,
        half_width: f64,
        constants: &[(usize, usize, usize, Complex64)],
    ) -> Result<Self, MetricError> {
        if cover < 2 {
            return Err(MetricError::InvalidGluing("a cover needs at least two sectors".into()));
        }
        // Non-consecutive sectors meet iff 2w ≥ 2π/L.
        if !(half_width > 0.0 && half_width < PI / cover as f64) {
            return Err(MetricError::InvalidGluing(format!("overlap half-width {half_width} creates triple intersections")));
        }
        let d = mm.rank();
        let mut out = Self {
            cover,
            first_boundary,
            half_width,
            constants: vec![Vec::new(); cover],
            order: Vec::with_capacity(cover),
            leading: vec![Vec::new(); cover],
        };
        for &(l, i, j, c) in constants {
            if l >= cover || i >= d || j >= d || i == j {
                return Err(MetricError::InvalidGluing(format!("constant ({i},{j}) on overlap {l} is out of range")));
            }
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let diff = mm.phi[i].sub(&mm.phi[j]);
            let bad = MetricError::BadDominanceOrder { overlap: l, i, j };
            let (p, lead) = match diff.leading() {
                Some((n, c)) if n < 0 => (-n, c.to_c64()),
                _ => return Err(bad),
            };
            let b = out.boundary(l);
            let samples = 4000;
            for s in 0..=samples {
                let th = b - half_width + 2.0 * half_width * s as f64 / samples as f64;
                let v = (lead * Complex64::from_polar(1.0, -(p as f64) * th)).re;
                if v >= -1e-12 * lead.norm() {
                    return Err(bad);
                }
            }
            out.constants[l].push((i, j, c));
            out.leading[l].push((p, lead));
        }
        for l in 0..cover {
            let order = topological_order(d, &out.constants[l]).ok_or_else(|| MetricError::BadDominanceOrder {
                overlap: l,
                i: out.constants[l][0].0,
                j: out.constants[l][0].1,
            })?;
            out.order.push(order);
        }
        Ok(out)
    }

    pub fn boundary(&self, l: usize) -> f64 {
        self.first_boundary + 2.0 * PI * l as f64 / self.cover as f64
    }

    /// Angular interval of sector `ℓ`.
    pub fn sector(&self, l: usize) -> (f64, f64) {
        let prev = self.boundary((l + self.cover - 1) % self.cover);
        let mut start = prev - self.half_width;
        let end = self.boundary(l) + self.half_width;
        while start > end {
            start -= 2.0 * PI;
        }
        (start, end)
    }

    /// Overlap containing `θ`, with the bump value there.
    pub fn overlap_at(&self, theta: f64) -> Option<(usize, f64)> {
        (0..self.cover).find_map(|l| {
            let off = wrap(theta - self.boundary(l));
            (off.abs() < self.half_width).then(|| (l, smoothstep((off + self.half_width) / (2.0 * self.half_width))))
        })
    }

    /// No point of the circle lies in three sectors.
    pub fn triple_intersections_empty(&self) -> bool {
        self.cover < 3 || 2.0 * self.half_width < 2.0 * PI / self.cover as f64
    }

    /// `μ(z)` on overlap `ℓ`.
    pub fn mu(&self, mm: &ModelMetric, l: usize, z: Complex64) -> CMat {
        let d = mm.rank();
        let lz = z.ln();
        let mut mu = CMat::zeros(d, d);
        for &(i, j, c) in &self.constants[l] {
            mu[(i, j)] += c * (mm.phi[i].eval_log(lz) - mm.phi[j].eval_log(lz)).exp();
        }
        mu
    }
}

fn topological_order(d: usize, edges: &[(usize, usize, Complex64)]) -> Option<Vec<usize>> {
    let mut indeg = vec![0usize; d];
    for &(_, j, _) in edges {
        indeg[j] += 1;
    }
    let mut done = vec![false; d];
    let mut order = Vec::with_capacity(d);
    while order.len() < d {
        let next = (0..d).find(|&v| !done[v] && indeg[v] == 0)?;
        done[next] = true;
        order.push(next);
        for &(i, j, _) in edges {
            if i == next {
                indeg[j] -= 1;
            }
        }
    }
    Some(order)
}

/// Glued metric at `z`, in the chart of the sector preceding the overlap.
pub fn glued_metric(mm: &ModelMetric, gd: &StokesGluingData, z: Complex64) -> Result<GluedValue, MetricError> {
    let k = mm.eval_metric(z)?.k;
    let d = mm.rank();
    let Some((l, chi)) = gd.overlap_at(z.arg()) else {
        return Ok(GluedValue { delta: CMat::zeros(d, d), k, overlap: None, chi: 0.0, det_transition: Complex64::new(1.0, 0.0) });
    };
    let cm = gd.mu(mm, l, z) * Complex64::new(chi, 0.0);
    let t = CMat::identity(d, d) + &cm;
    let ord = &gd.order[l];
    let mut det = Complex64::new(1.0, 0.0);
    for (a, &i) in ord.iter().enumerate() {
        det *= t[(i, i)];
        for &j in &ord[..a] {
            if t[(i, j)] != Complex64::new(0.0, 0.0) {
                return Err(MetricError::BadDominanceOrder { overlap: l, i, j });
            }
        }
    }
    // (Id + χμ)⁻¹ − Id
    let mut inv_minus = CMat::zeros(d, d);
    let mut term = CMat::identity(d, d);
    for _ in 0..d {
        term = -(&term * &cm);
        inv_minus += &term;
    }
    let nk = inv_minus.adjoint() * &k;
    let delta = &nk + &k * &inv_minus + &nk * &inv_minus;
    Ok(GluedValue { k: &k + &delta, delta, overlap: Some(l), chi, det_transition: det })
}

/// Least-squares fit of `log‖Δ‖ = log C + s log r − η r^{−p}` along the ray `θ`.
pub fn fit_decay(mm: &ModelMetric, gd: &StokesGluingData, theta: f64, r_lo: f64, r_hi: f64, n: usize) -> Result<DecayFit, MetricError> {
    let (l, _) = gd.overlap_at(theta).ok_or_else(|| MetricError::InvalidGluing(format!("θ = {theta} lies in no overlap")))?;
    if gd.leading[l].is_empty() {
        return Err(MetricError::InvalidGluing(format!("overlap {l} carries no constants")));
    }
    let pole = gd.leading[l].iter().map(|(p, _)| *p).max().unwrap_or(1);
    let predicted_eta = gd.leading[l]
        .iter()
        .filter(|(p, _)| *p == pole)
        .map(|(p, c)| -(c * Complex64::from_polar(1.0, -(*p as f64) * theta)).re)
        .fold(f64::INFINITY, f64::min);
    let mut rows = Vec::with_capacity(3 * n);
    let mut rhs = Vec::with_capacity(n);
    for s in 0..n {
        let r = (r_lo.ln() + (r_hi.ln() - r_lo.ln()) * s as f64 / (n - 1).max(1) as f64).exp();
        let g = glued_metric(mm, gd, Complex64::from_polar(r, theta))?;
        let norm = op_norm(&g.delta);
        if !(norm > 0.0) {
            return Err(MetricError::InvalidGluing(format!("perturbation vanishes or underflows at r = {r}")));
        }
        rows.extend([1.0, r.ln(), -r.powi(-(pole as i32))]);
        rhs.push(norm.ln());
    }
    let a = nalgebra::DMatrix::from_row_slice(n, 3, &rows);
    let b = nalgebra::DVector::from_vec(rhs);
    let sol = a.clone().svd(true, true).solve(&b, 1e-14).map_err(|e| MetricError::InvalidGluing(e.to_string()))?;
    let max_residual = (&a * &sol - &b).camax();
    Ok(DecayFit { eta: sol[2], predicted_eta, pole, log_c: sol[0], power: sol[1], max_residual })
}

/// Acceptability ratio `‖R‖_k |z|² a²` of the glued metric by nested finite
/// differences of stencil `h` in `(log r, θ)`.
pub fn glued_curvature_ratio(mm: &ModelMetric, gd: &StokesGluingData, z: Complex64, h: f64) -> Result<f64, MetricError> {
    let (s, th) = (z.norm().ln(), z.arg());
    let at = |w: Complex64, ds: f64, dt: f64| Complex64::from_polar((w.norm().ln() + ds).exp(), w.arg() + dt);
    let wirtinger = |f: &dyn Fn(Complex64) -> Result<CMat, MetricError>, w: Complex64, bar: bool| -> Result<CMat, MetricError> {
        let dr = (f(at(w, h, 0.0))? - f(at(w, -h, 0.0))?) / Complex64::new(2.0 * h, 0.0);
        let dt = (f(at(w, 0.0, h))? - f(at(w, 0.0, -h))?) / Complex64::new(2.0 * h, 0.0);
        let i = if bar { Complex64::i() } else { -Complex64::i() };
        Ok((dr + dt * i) * Complex64::new(0.5, 0.0))
    };
    let kg = |w: Complex64| Ok(glued_metric(mm, gd, w)?.k);
    let conn = |w: Complex64| -> Result<CMat, MetricError> {
        let k = kg(w)?;
        let kinv = k.try_inverse().ok_or(MetricError::InvalidGluing("glued metric is singular".into()))?;
        Ok(kinv * wirtinger(&kg, w, false)?)
    };
    let r = -wirtinger(&conn, Complex64::from_polar(s.exp(), th), true)?;
    let k = kg(z)?;
    let chol = k.cholesky().ok_or(MetricError::InvalidGluing("glued metric is not positive definite".into()))?;
    let l = chol.l();
    let l_adj_inv = l.adjoint().try_inverse().expect("triangular factor is invertible");
    let r_orth = l.adjoint() * r * l_adj_inv;
    let a = mm.a(z)?;
    Ok(op_norm(&r_orth) * a * a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ElementaryBlock, ElementaryModel, RegularBlockData};
    use crate::series::{ComplexRational, PuiseuxSeries};

    fn stokes_model() -> ModelMetric {
        let blk = |s: i64| ElementaryBlock {
            phi: PuiseuxSeries::laurent([(-1, ComplexRational::from_integer(s))]),
            regs: vec![RegularBlockData::new(ComplexRational::from_integer(0), vec![1]).unwrap()],
        };
        ModelMetric::new(&ElementaryModel::new(1, vec![blk(1), blk(-1)]).unwrap())
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn zero_constants_give_model_metric() {
        let mm = stokes_model();
        let gd = StokesGluingData::new(&mm, 2, 0.0, PI / 8.0, &[]).unwrap();
        for th in [0.0, 1.0, PI, 3.0] {
            let z = Complex64::from_polar(0.1, th);
            let g = glued_metric(&mm, &gd, z).unwrap();
            assert_eq!(g.delta.camax(), 0.0);
        }
    }

    #[test]
    fn dominance_is_checked() {
        let mm = stokes_model();
        let (i, j) = if mm.phi[0].leading().unwrap().1.re > num_rational::BigRational::from_integer(0.into()) { (0, 1) } else { (1, 0) };
        assert!(StokesGluingData::new(&mm, 2, 0.0, PI / 8.0, &[(1, i, j, one())]).is_ok());
        assert!(matches!(
            StokesGluingData::new(&mm, 2, 0.0, PI / 8.0, &[(1, j, i, one())]),
            Err(MetricError::BadDominanceOrder { .. })
        ));
        assert!(matches!(
            StokesGluingData::new(&mm, 2, 0.0, PI / 8.0, &[(0, i, j, one())]),
            Err(MetricError::BadDominanceOrder { .. })
        ));
        assert!(StokesGluingData::new(&mm, 3, 0.0, PI / 2.0, &[]).is_err());
    }

    #[test]
    fn decay_rate_on_rays() {
        let mm = stokes_model();
        let (i, j) = if mm.phi[0].leading().unwrap().1.re > num_rational::BigRational::from_integer(0.into()) { (0, 1) } else { (1, 0) };
        let gd = StokesGluingData::new(&mm, 2, 0.0, PI / 8.0, &[(1, i, j, one())]).unwrap();
        for th in [PI, PI - PI / 16.0, PI + PI / 12.0] {
            let g = glued_metric(&mm, &gd, Complex64::from_polar(0.1, th)).unwrap();
            assert_eq!(g.det_transition, one());
            let fit = fit_decay(&mm, &gd, th, 0.02, 0.2, 24).unwrap();
            assert!((fit.predicted_eta - 2.0 * th.cos().abs()).abs() < 1e-12);
            assert!((fit.eta - fit.predicted_eta).abs() < 0.1 * fit.predicted_eta, "{fit:?}");
        }
        let mut sup: f64 = 0.0;
        for k in 0..9 {
            let th = PI - PI / 9.0 + k as f64 * PI / 36.0;
            sup = sup.max(glued_curvature_ratio(&mm, &gd, Complex64::from_polar(0.1, th), 1e-4).unwrap());
        }
        assert!(sup < 1.0, "{sup}");
    }
}
