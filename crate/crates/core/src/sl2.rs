//! sl2-triples adapted to Jordan data, and the frame data of the model metric.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::model::ElementaryModel;
use crate::series::{rat_to_f64, ComplexRational, PuiseuxSeries};

/// `(Y, X, H)` in a weight basis, with `X = Yᵀ` and `H` diagonal.
#[derive(Clone, Debug)]
pub struct Sl2Triple {
    pub partition: Vec<usize>,
    pub y: DMatrix<f64>,
    pub x: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub weights: Vec<i64>,
    /// Exact squares of the subdiagonal coefficients of `Y`, indexed by row (0 on block starts).
    pub c_squared: Vec<BigRational>,
}

/// Jacobson–Morozov triple for a Jordan partition: per block of size `m`,
/// weights `m−1, m−3, …, −(m−1)` and `Y e_{j−1} = √(j(m−j)) e_j`.
pub fn jm_triple(partition: &[usize]) -> Sl2Triple {
    assert!(!partition.is_empty(), "partition must be nonempty");
    let d: usize = partition.iter().sum();
    let mut y = DMatrix::<f64>::zeros(d, d);
    let mut weights = Vec::with_capacity(d);
    let mut c_squared = vec![BigRational::from_integer(BigInt::from(0)); d];
    let mut off = 0;
    for &m in partition {
        for j in 0..m {
            weights.push(m as i64 - 1 - 2 * j as i64);
        }
        for j in 1..m {
            let c2 = (j * (m - j)) as i64;
            c_squared[off + j] = BigRational::from_integer(BigInt::from(c2));
            y[(off + j, off + j - 1)] = (c2 as f64).sqrt();
        }
        off += m;
    }
    let x = y.transpose();
    let h = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, weights.iter().map(|w| *w as f64)));
    Sl2Triple { partition: partition.to_vec(), y, x, h, weights, c_squared }
}

impl Sl2Triple {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Max-entry residuals of `[H,X] − 2X`, `[H,Y] + 2Y`, `[X,Y] − H`.
    pub fn relation_residuals(&self) -> [f64; 3] {
        let comm = |a: &DMatrix<f64>, b: &DMatrix<f64>| a * b - b * a;
        let r1 = (comm(&self.h, &self.x) - &self.x * 2.0).amax();
        let r2 = (comm(&self.h, &self.y) + &self.y * 2.0).amax();
        let r3 = (comm(&self.x, &self.y) - &self.h).amax();
        [r1, r2, r3]
    }

    /// `[X, Y] = H` on the exact squared coefficients: `c²_{j+1} − c²_j = w_j` inside each block.
    pub fn exact_relation_holds(&self) -> bool {
        let mut off = 0;
        for &m in &self.partition {
            for j in 0..m {
                let lower = if j == 0 { BigRational::from_integer(0.into()) } else { self.c_squared[off + j].clone() };
                let upper = if j + 1 < m { self.c_squared[off + j + 1].clone() } else { BigRational::from_integer(0.into()) };
                if upper - lower != BigRational::from_integer(BigInt::from(self.weights[off + j])) {
                    return false;
                }
            }
            off += m;
        }
        true
    }

    /// Diagonal `D` with `D⁻¹ Y_J D = Y`, where `Y_J` has ones on the subdiagonal.
    pub fn jordan_scaling(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        let mut off = 0;
        for &m in &self.partition {
            let mut dj = 1.0;
            for j in 0..m {
                if j > 0 {
                    dj /= rat_to_f64(&self.c_squared[off + j]).sqrt();
                }
                out.push(dj);
            }
            off += m;
        }
        out
    }
}

/// One `(φ, α)` component of the frame.
#[derive(Clone, Debug)]
pub struct FrameComponent {
    pub block: usize,
    pub phi: PuiseuxSeries,
    pub alpha: ComplexRational,
    pub offset: usize,
    pub triple: Sl2Triple,
}

/// Direct sum of blockwise triples with the exponents of every basis vector.
#[derive(Clone, Debug)]
pub struct ModelFrame {
    pub q: u32,
    pub components: Vec<FrameComponent>,
    pub y: DMatrix<f64>,
    pub x: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub weights: Vec<i64>,
    /// `α′_j = Re α` per basis vector.
    pub alpha_re: Vec<f64>,
    /// `α″_j = Im α` per basis vector.
    pub alpha_im: Vec<f64>,
    /// Index of the component containing each basis vector.
    pub component_of: Vec<usize>,
}

/// Frame data for the model metric: blockwise triples per `(φ, α)` component.
pub fn adapted_metric_frame(m: &ElementaryModel) -> ModelFrame {
    let d = m.rank();
    let mut components = Vec::new();
    let mut y = DMatrix::zeros(d, d);
    let mut h = DMatrix::zeros(d, d);
    let mut weights = Vec::with_capacity(d);
    let mut alpha_re = Vec::with_capacity(d);
    let mut alpha_im = Vec::with_capacity(d);
    let mut component_of = Vec::with_capacity(d);
    let mut off = 0;
    for (bi, b) in m.blocks().iter().enumerate() {
        for r in &b.regs {
            let t = jm_triple(&r.partition);
            let n = t.dim();
            y.view_mut((off, off), (n, n)).copy_from(&t.y);
            h.view_mut((off, off), (n, n)).copy_from(&t.h);
            weights.extend(&t.weights);
            let alpha = r.residue();
            alpha_re.extend(std::iter::repeat_n(rat_to_f64(&alpha.re), n));
            alpha_im.extend(std::iter::repeat_n(rat_to_f64(&alpha.im), n));
            component_of.extend(std::iter::repeat_n(components.len(), n));
            components.push(FrameComponent { block: bi, phi: b.phi.clone(), alpha, offset: off, triple: t });
            off += n;
        }
    }
    let x = y.transpose();
    ModelFrame { q: m.ram(), components, y, x, h, weights, alpha_re, alpha_im, component_of }
}

impl ModelFrame {
    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn max_abs_weight(&self) -> i64 {
        self.weights.iter().map(|w| w.abs()).max().unwrap_or(0)
    }
}
