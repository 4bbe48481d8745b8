use std::f64::consts::PI;

use connexion_core::formal::{formal_decompose, round_trip_check, FormalConfig, GaugeStep};
use connexion_core::index::{local_full_dims, local_min_dims, regular_invariants};
use connexion_core::metric::{glued_metric, op_norm, ModelMetric, StokesGluingData};
use connexion_core::model::ConnectionSpec;
use connexion_core::PuiseuxSeries;
use connexion_core::formal::PolygonSegment;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{CliError, Config, Input, InputEcho, VERSION};

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub tool_version: &'static str,
    pub input: InputEcho,
    pub config: Config,
    pub rank: usize,
    pub polygon: Vec<PolygonSegment>,
    pub q: u32,
    pub irregularity: i64,
    /// The decomposition, as an elementary spec in the variable `t`, `t^q = z`.
    pub model: ConnectionSpec,
    pub gauge_log: Vec<GaugeStep>,
    pub round_trip: Vec<RoundTrip>,
    pub metric: MetricSummary,
    pub index: IndexSummary,
    pub l2: Vec<LineClass>,
}

/// Twisting block `i` back by `−φ_i` must leave a regular germ of the block's rank.
#[derive(Clone, Debug, Serialize)]
pub struct RoundTrip {
    pub phi: String,
    pub rank: usize,
    pub slope_zero_multiplicity: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricSummary {
    pub points: usize,
    pub positive_definite: bool,
    /// Relative error of `det K` against `Π|z|^{−2α′_j}`.
    pub max_det_rel_err: f64,
    /// Sup of `‖R_k‖·|z|²a²`.
    pub acceptability: f64,
    /// `2·max|w_j|`.
    pub acceptability_expected: f64,
    pub max_curvature_rel_err: f64,
    pub max_fd_residual: f64,
    pub max_pseudo_norm: f64,
    pub glued: Option<GluedSummary>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GluedSummary {
    pub points_in_overlaps: usize,
    pub max_delta: f64,
    pub max_det_transition_err: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexSummary {
    pub irr: usize,
    pub h0_min: usize,
    pub h1_min: usize,
    /// Brute-force `(h⁰, h¹)` of the full localization; single-valued germs only.
    pub full: Option<(usize, usize)>,
    pub regular_invariants: usize,
    /// `χ_full = −Irr` and `χ_min = χ_full + dim ker(T^reg − Id)`.
    pub consistent: Option<bool>,
}

/// Where each exponential part sits relative to the vanishing lemma.
#[derive(Clone, Debug, Serialize)]
pub struct LineClass {
    pub phi: String,
    pub ell: i64,
    pub excluded: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricRow {
    pub z_re: f64,
    pub z_im: f64,
    pub a: f64,
    #[serde(rename = "det_K")]
    pub det_k: f64,
    pub ratio: f64,
    pub pseudo_norm: f64,
    pub glued_delta: Option<f64>,
}

impl AnalysisReport {
    /// The first violated tolerance, if any.
    pub fn failure(&self) -> Option<CliError> {
        let m = &self.metric;
        let tol = self.config.tol;
        let mut bad = Vec::new();
        if !m.positive_definite {
            bad.push("K not positive definite".to_owned());
        }
        if m.max_det_rel_err > tol {
            bad.push(format!("det K relative error {:e}", m.max_det_rel_err));
        }
        if m.max_curvature_rel_err > tol {
            bad.push(format!("curvature identity error {:e}", m.max_curvature_rel_err));
        }
        if m.max_pseudo_norm > tol {
            bad.push(format!("pseudo-curvature {:e}", m.max_pseudo_norm));
        }
        if let Some(g) = &m.glued {
            if g.max_det_transition_err > tol {
                bad.push(format!("glued transition determinant error {:e}", g.max_det_transition_err));
            }
        }
        if self.index.consistent == Some(false) {
            bad.push("local index oracle disagrees with the closed form".to_owned());
        }
        if self.round_trip.iter().any(|r| !r.ok) {
            bad.push("twist-back round trip left an irregular part".to_owned());
        }
        (!bad.is_empty()).then(|| CliError::Numerical(bad.join("; ")))
    }
}

fn decomposition_error(e: connexion_core::formal::FormalError) -> CliError {
    CliError::Decomposition { name: e.name(), message: e.to_string() }
}

fn numerical<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Polygon, decomposition, model metric diagnostics and local index of one input.
pub fn analyze(input: &Input, cfg: &Config) -> Result<(AnalysisReport, Vec<MetricRow>), CliError> {
    let germ = input.spec.to_germ().map_err(|e| CliError::Parse(e.to_string()))?;
    let fc = FormalConfig { budget: cfg.trunc, ..FormalConfig::default() };
    let dec = formal_decompose(&germ, &fc).map_err(decomposition_error)?;
    let round_trip = round_trip_check(&germ, &dec)
        .map_err(decomposition_error)?
        .into_iter()
        .enumerate()
        .map(|(i, (m, rank))| RoundTrip { phi: dec.model.blocks()[i].phi.to_string(), rank, slope_zero_multiplicity: m, ok: m == rank })
        .collect();

    let mm = ModelMetric::new(&dec.model);
    // Stokes constants index the basis of the file's own model.
    let glue = match (input.spec.stokes(), input.spec.to_model()) {
        (Some(lit), Ok(Some(m))) => {
            let mm_s = ModelMetric::new(&m);
            let gd = StokesGluingData::from_literal(&mm_s, lit).map_err(|e| CliError::Numerical(format!("{}: {e}", e.name())))?;
            Some((mm_s, gd))
        }
        _ => None,
    };
    let (metric, rows) = metric_diagnostics(&mm, glue.as_ref(), cfg)?;

    let (h0_min, h1_min) = local_min_dims(&dec.model).map_err(numerical)?;
    let reg = regular_invariants(&dec.model);
    let full = if germ.ram() == 1 { Some(local_full_dims(&germ, None).map_err(numerical)?) } else { None };
    let irr = h1_min;
    let consistent = full.map(|(f0, f1)| {
        let chi_full = f0 as i64 - f1 as i64;
        chi_full == -(irr as i64) && h0_min as i64 - h1_min as i64 == chi_full + reg as i64
    });

    let l2 = (0..dec.model.blocks().len())
        .map(|i| {
            let phi = dec.model.phi_in_t(i);
            LineClass { phi: phi.to_string(), ell: phi.pole_order().max(0), excluded: phi.pole_order() <= 0 && cfg.beta == 0.0 }
        })
        .collect();

    let report = AnalysisReport {
        tool_version: VERSION,
        input: input.echo(),
        config: cfg.clone(),
        rank: germ.rank(),
        polygon: dec.polygon.to_report(),
        q: dec.q,
        irregularity: dec.irregularity,
        model: ConnectionSpec::from_model(input.spec.name().map(str::to_owned), &dec.model, None),
        gauge_log: dec.gauge_log.clone(),
        round_trip,
        metric,
        index: IndexSummary { irr, h0_min, h1_min, full, regular_invariants: reg, consistent },
        l2,
    };
    Ok((report, rows))
}

fn metric_diagnostics(mm: &ModelMetric, glue: Option<&(ModelMetric, StokesGluingData)>, cfg: &Config) -> Result<(MetricSummary, Vec<MetricRow>), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let expected = 2.0 * mm.frame.weights.iter().map(|w| w.unsigned_abs()).max().unwrap_or(0) as f64;
    let mut s = MetricSummary {
        points: cfg.samples,
        positive_definite: true,
        max_det_rel_err: 0.0,
        acceptability: 0.0,
        acceptability_expected: expected,
        max_curvature_rel_err: 0.0,
        max_fd_residual: 0.0,
        max_pseudo_norm: 0.0,
        glued: glue.map(|_| GluedSummary { points_in_overlaps: 0, max_delta: 0.0, max_det_transition_err: 0.0 }),
    };
    let mut rows = Vec::with_capacity(cfg.samples);
    for _ in 0..cfg.samples {
        let r = rng.gen_range((1e-3f64).ln()..(0.5f64).ln()).exp();
        let z = Complex64::from_polar(r, rng.gen_range(-PI..PI));
        let v = mm.eval_metric(z).map_err(numerical)?;
        s.positive_definite &= v.k.clone().cholesky().is_some();
        s.max_det_rel_err = s.max_det_rel_err.max((v.det_k - v.det_expected).abs() / v.det_expected);
        let cv = mm.connection_and_curvature(z).map_err(numerical)?;
        s.acceptability = s.acceptability.max(cv.ratio);
        s.max_curvature_rel_err = s.max_curvature_rel_err.max((cv.ratio - expected).abs() / expected.max(1.0));
        let (f1, f2) = mm.curvature_fd_residuals(z, 1e-5).map_err(numerical)?;
        s.max_fd_residual = s.max_fd_residual.max(f1).max(f2);
        let pseudo = op_norm(&mm.pseudo_curvature(z).map_err(numerical)?);
        s.max_pseudo_norm = s.max_pseudo_norm.max(pseudo);
        let glued_delta = match (glue, s.glued.as_mut()) {
            (Some((mg, gd)), Some(gs)) => {
                let g = glued_metric(mg, gd, z).map_err(numerical)?;
                let nd = op_norm(&g.delta);
                if g.overlap.is_some() {
                    gs.points_in_overlaps += 1;
                }
                gs.max_delta = gs.max_delta.max(nd);
                gs.max_det_transition_err = gs.max_det_transition_err.max((g.det_transition - 1.0).norm());
                Some(nd)
            }
            _ => None,
        };
        rows.push(MetricRow { z_re: z.re, z_im: z.im, a: v.a, det_k: v.det_k, ratio: cv.ratio, pseudo_norm: pseudo, glued_delta });
    }
    Ok((s, rows))
}

/// Exponential part of a block as an exact Laurent polynomial in `t`.
pub(crate) fn polar_part(phi: &PuiseuxSeries) -> PuiseuxSeries {
    PuiseuxSeries::new(1, phi.terms().iter().filter(|(n, _)| **n <= 0).map(|(n, c)| (*n, c.clone())), None)
}
