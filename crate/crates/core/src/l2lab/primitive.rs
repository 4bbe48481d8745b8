//! Primitives of weighted closed forms on a sector, and a Monte Carlo
//! round-trip report over manufactured exact forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::profile::{hardy_radial, phase_sign_check, radial_direction, HardyRadial};
use super::quad::{cumulative_simpson, cumulative_simpson_rev, log_sum_exp, simpson_weights};
use super::{plateau, plateau_prime, L2Error, L2Grid, WeightedLineData};

/// Round-trip tolerance for manufactured 1-forms.
pub const ROUND_TRIP_TOL: f64 = 1e-6;
/// Finite-difference tolerance for 2-form primitives.
pub const TWO_FORM_TOL: f64 = 1e-4;

fn fd5(v: &[f64], h: f64, i: usize) -> f64 {
    (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h)
}

/// `(min, max)` of `|cos(ℓθ − τ)|` on a sector.
fn cos_range(d: &WeightedLineData, s: (f64, f64)) -> (f64, f64) {
    let l = d.ell as f64;
    (0..=256).fold((f64::INFINITY, 0.0f64), |(lo, hi), k| {
        let c = (l * (s.0 + (s.1 - s.0) * k as f64 / 256.0) - d.tau).cos().abs();
        (lo.min(c), hi.max(c))
    })
}

/// Working radii for primitives: the grid starts where `|Re φ| ≈ 40` on the
/// sector and results are compared above the radius where it is `≈ 20`, so
/// the truncated segment below the grid is `e^{−18}`-negligible.
fn working_radii(d: &WeightedLineData, s: (f64, f64), g: &L2Grid) -> (f64, f64) {
    if d.a_ell.norm() == 0.0 {
        return (g.r_min, g.r_min);
    }
    let (lo, hi) = cos_range(d, s);
    let l = d.ell as f64;
    let a = d.a_ell.norm();
    let r_lo = (a * lo / 40.0).powf(1.0 / l).max(g.r_min).min(0.05 * g.r1);
    let r_eval = (a * hi / 20.0).powf(1.0 / l).max(r_lo).min(0.25 * g.r1);
    (r_lo, r_eval)
}

/// Log of `Σ |v|² weight` over a `(u, θ)` tensor grid, for degree `p`.
fn log_norm_sq(v: &[Vec<f64>], us: &[f64], wu: &[f64], ths: &[f64], wt: &[f64], d: &WeightedLineData, p: i32) -> f64 {
    let mut terms = Vec::with_capacity(us.len() * ths.len());
    for (i, u) in us.iter().enumerate() {
        for (k, t) in ths.iter().enumerate() {
            let x = v[i][k];
            if x != 0.0 {
                terms.push((wu[i] * wt[k]).ln() + 2.0 * x.abs().ln() + d.log_weight(p, *u, *t));
            }
        }
    }
    log_sum_exp(&terms)
}

/// Angular direction on `outer`: `true` when `e^{−Re φ}` decreases in `θ`.
fn angular_direction(d: &WeightedLineData, outer: (f64, f64), g: &L2Grid) -> Result<bool, L2Error> {
    if d.a_ell.norm() == 0.0 {
        return Ok(true);
    }
    let l = d.ell as f64;
    let s0 = (d.tau - l * outer.0).sin();
    let s1 = (d.tau - l * outer.1).sin();
    let mid = (d.tau - l * 0.5 * (outer.0 + outer.1)).sin();
    if s0 * s1 <= 0.0 || s0 * mid <= 0.0 || (outer.1 - outer.0) * l >= std::f64::consts::PI {
        return Err(L2Error::NotMonotone("sin(tau - l theta) vanishes on the outer sector".into()));
    }
    let ps = phase_sign_check(&d.with_sector(outer), g)?;
    if ps.r_phi < g.r1 * (1.0 - 1e-12) {
        return Err(L2Error::NotMonotone(format!("phase identities fail above r = {}", ps.r_phi)));
    }
    Ok(s0 < 0.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct AngularPrimitive {
    pub us: Vec<f64>,
    pub thetas: Vec<f64>,
    /// `u[i][k]` at `(us[i], thetas[k])`.
    pub u: Vec<Vec<f64>>,
    /// `ℓ(r)` with `ω − du = ℓ(r)dr/r` on the inner sector.
    pub remainder: Vec<f64>,
    pub decreasing: bool,
    /// Relative `|∂_θ u − χg|`.
    pub theta_residual: f64,
    /// Relative size of `f − r∂_r u − ℓ(r)` over the inner sector.
    pub radial_defect: f64,
    /// `‖u‖_{κ−2} / ‖χ g dθ‖_κ`.
    pub ratio: f64,
    /// `2(θ′₁ − θ′₀)`.
    pub bound: f64,
}

/// `ℓ(r)` for `ω = f dr/r + g dθ` closed: the boundary term of the bump,
/// `∫ χ′f` over the ramp on the side where `u` starts.
fn remainder_at(omega: &dyn Fn(f64, f64) -> (f64, f64), inner: (f64, f64), outer: (f64, f64), decreasing: bool, u: f64, n: usize) -> f64 {
    let (a, b) = if decreasing { (outer.0, inner.0) } else { (inner.1, outer.1) };
    let h = (b - a) / (n - 1) as f64;
    let w = simpson_weights(n, h);
    let s: f64 = (0..n)
        .map(|k| {
            let t = a + h * k as f64;
            w[k] * plateau_prime(t, inner, outer) * omega(u, t).0
        })
        .sum();
    if decreasing {
        s
    } else {
        -s
    }
}

/// `u(r, θ) = ∫_{θ′₀}^θ χg` (or `−∫_θ^{θ′₁} χg` in the increasing case) for
/// `ω = f dr/r + g dθ` closed on `outer`, given as `(u, θ) ↦ (f, g)`.
/// `d.sector` is the inner sector.
pub fn build_primitive_angular(
    omega: &dyn Fn(f64, f64) -> (f64, f64),
    d: &WeightedLineData,
    outer: (f64, f64),
    grid: &L2Grid,
) -> Result<AngularPrimitive, L2Error> {
    let inner = d.sector;
    if !(outer.0 < inner.0 && inner.1 < outer.1) {
        return Err(L2Error::InvalidData("outer sector must strictly contain the inner one".into()));
    }
    let decreasing = angular_direction(d, outer, grid)?;
    let (r_lo, r_eval) = working_radii(d, outer, grid);
    let gg = grid.with_r_min(r_lo);
    let (us, wu) = gg.radial();
    let (ths, wt) = gg.angular(outer);
    let h = ths[1] - ths[0];
    let chi: Vec<f64> = ths.iter().map(|t| plateau(*t, inner, outer)).collect();
    let n_tr = grid.n_theta.min(513) | 1;
    let inner_k: Vec<usize> = (0..ths.len()).filter(|k| ths[*k] >= inner.0 && ths[*k] <= inner.1).collect();
    let mut u = Vec::with_capacity(us.len());
    let mut cg = Vec::with_capacity(us.len());
    let mut fin = Vec::with_capacity(us.len());
    let mut remainder = Vec::with_capacity(us.len());
    let mut theta_residual = 0.0f64;
    for uu in &us {
        let (fv, gv): (Vec<f64>, Vec<f64>) = ths.iter().map(|t| omega(*uu, *t)).unzip();
        let row: Vec<f64> = gv.iter().zip(&chi).map(|(g, c)| c * g).collect();
        let cum = if decreasing { cumulative_simpson(&row, h) } else { cumulative_simpson_rev(&row, h) };
        let scale = row.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale > 0.0 && uu.exp() >= r_eval {
            for k in 2..ths.len() - 2 {
                theta_residual = theta_residual.max((fd5(&cum, h, k) - row[k]).abs() / scale);
            }
        }
        remainder.push(remainder_at(omega, inner, outer, decreasing, *uu, n_tr));
        fin.push(inner_k.iter().map(|k| fv[*k]).collect::<Vec<f64>>());
        u.push(cum);
        cg.push(row);
    }

    // f − r∂_r u − ℓ(r) on inner nodes, by differences in log r.
    let hu = us[1] - us[0];
    let mut radial_defect = 0.0f64;
    for i in 2..us.len() - 2 {
        if us[i].exp() < r_eval {
            continue;
        }
        let scale = fin[i].iter().fold(f64::MIN_POSITIVE, |m, x| m.max(x.abs()));
        for (j, k) in inner_k.iter().enumerate() {
            let col = [u[i - 2][*k], u[i - 1][*k], u[i][*k], u[i + 1][*k], u[i + 2][*k]];
            radial_defect = radial_defect.max((fin[i][j] - fd5(&col, hu, 2) - remainder[i]).abs() / scale);
        }
    }

    let num = log_norm_sq(&u, &us, &wu, &ths, &wt, d, 0);
    let den = log_norm_sq(&cg, &us, &wu, &ths, &wt, d, 1);
    let ratio = ((num - den) / 2.0).exp();
    let bound = 2.0 * (outer.1 - outer.0);
    if !ratio.is_finite() || ratio > bound {
        return Err(L2Error::UnboundedRatio(ratio));
    }
    Ok(AngularPrimitive { us, thetas: ths, u, remainder, decreasing, theta_residual, radial_defect, ratio, bound })
}

#[derive(Clone, Debug, Serialize)]
pub struct RadialPrimitive {
    pub us: Vec<f64>,
    pub u: Vec<f64>,
    pub decreasing: bool,
    /// Relative `|r du/dr − f|`.
    pub residual: f64,
    /// `‖u‖²_{κ−2} / ‖f dr/r‖²_κ`.
    pub ratio_sq: f64,
    pub hardy: HardyRadial,
    pub within_hardy: bool,
}

fn log_psi(d: &WeightedLineData, u: f64, ths: &[f64], wt: &[f64]) -> f64 {
    let v: Vec<f64> = ths.iter().zip(wt).map(|(t, w)| d.log_weight_phi(u, *t) + w.ln()).collect();
    log_sum_exp(&v)
}

/// Running `∫_0^r f dr/r` (decreasing) or `−∫_r^{r₁} f dr/r`, sampled in `u = log r`.
fn radial_cumulative(fr: &[f64], h: f64, decreasing: bool, init: f64) -> Vec<f64> {
    if !decreasing {
        return cumulative_simpson_rev(fr, h);
    }
    let mut cum = cumulative_simpson(fr, h);
    cum.iter_mut().for_each(|x| *x += init);
    cum
}

fn flat() -> L2Error {
    L2Error::NotMonotone("flat weight: a_l = 0, beta = 0, kappa = 0".into())
}

/// `u(r) = ∫_0^r f dr/r` when `r^{2β}|log r|^κ ψ` decreases, `−∫_r^{r₁} f dr/r`
/// otherwise. `f` is the `dr/r` component, as a function of `log r`.
pub fn build_primitive_radial(f: &dyn Fn(f64) -> f64, d: &WeightedLineData, g: &L2Grid) -> Result<RadialPrimitive, L2Error> {
    let decreasing = radial_direction(d, d.sector, g.n_theta)?.ok_or_else(flat)?;
    let (r_lo, r_eval) = working_radii(d, d.sector, g);
    let (us, _) = g.with_r_min(r_lo).radial();
    let fr: Vec<f64> = us.iter().map(|u| f(*u)).collect();
    let init = if decreasing && d.a_ell.norm() == 0.0 {
        let (tu, tw) = g.tail();
        tu.iter().zip(&tw).map(|(u, w)| f(*u) * w).sum()
    } else {
        0.0
    };
    let hardy = hardy_radial(d, g)?;
    Ok(radial_from_samples(fr, init, d, &g.with_r_min(r_lo), r_eval, decreasing, hardy))
}

/// Radial primitive from node samples of `f` on `gg.radial()`.
fn radial_from_samples(
    fr: Vec<f64>,
    init: f64,
    d: &WeightedLineData,
    gg: &L2Grid,
    r_eval: f64,
    decreasing: bool,
    hardy: HardyRadial,
) -> RadialPrimitive {
    let (us, wu) = gg.radial();
    let (ths, wt) = gg.angular(d.sector);
    let h = us[1] - us[0];
    let u = radial_cumulative(&fr, h, decreasing, init);
    let scale = fr.iter().fold(f64::MIN_POSITIVE, |m, x| m.max(x.abs()));
    let mut residual = 0.0f64;
    for i in 2..us.len() - 2 {
        if us[i].exp() >= r_eval {
            residual = residual.max((fd5(&u, h, i) - fr[i]).abs() / scale);
        }
    }
    let k = d.kappa as f64;
    let (mut nu, mut nf) = (Vec::new(), Vec::new());
    for (i, x) in us.iter().enumerate() {
        let lp = log_psi(d, *x, &ths, &wt) + 2.0 * d.beta * x + wu[i].ln();
        if u[i] != 0.0 {
            nu.push(2.0 * u[i].abs().ln() + (k - 2.0) * x.abs().ln() + lp);
        }
        if fr[i] != 0.0 {
            nf.push(2.0 * fr[i].abs().ln() + k * x.abs().ln() + lp);
        }
    }
    let ratio_sq = (log_sum_exp(&nu) - log_sum_exp(&nf)).exp();
    let within_hardy = ratio_sq <= hardy.c * (1.0 + 1e-3);
    RadialPrimitive { us, u, decreasing, residual, ratio_sq, hardy, within_hardy }
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoFormPrimitive {
    /// `"angular"` (`ξ = w dr/r`) or `"radial"` (`ξ = v dθ`).
    pub kind: &'static str,
    pub residual: f64,
    /// `‖ξ‖_κ / ‖η‖_κ`.
    pub ratio: f64,
}

/// Primitive of `η = h dr/r∧dθ`: angular on θ-monotone sectors, radial otherwise.
/// For the angular kind `d.sector` is inner and `outer` carries the bump.
pub fn build_primitive_two_form(
    h: &dyn Fn(f64, f64) -> f64,
    d: &WeightedLineData,
    outer: Option<(f64, f64)>,
    grid: &L2Grid,
) -> Result<TwoFormPrimitive, L2Error> {
    match outer {
        Some(outer) => {
            // w = −∫ χh dθ, so ∂_θ w = −χh and d(w dr/r) = χh dr/r∧dθ.
            let omega = |u: f64, t: f64| (0.0, -h(u, t));
            let p = build_primitive_angular(&omega, d, outer, grid)?;
            let (us, wu) = grid.with_r_min(working_radii(d, outer, grid).0).radial();
            let (ths, wt) = grid.angular(outer);
            let inner = d.sector;
            let eta: Vec<Vec<f64>> = us
                .iter()
                .map(|u| ths.iter().map(|t| plateau(*t, inner, outer) * h(*u, *t)).collect())
                .collect();
            let ratio = ((log_norm_sq(&p.u, &us, &wu, &ths, &wt, d, 1) - log_norm_sq(&eta, &us, &wu, &ths, &wt, d, 2)) / 2.0).exp();
            Ok(TwoFormPrimitive { kind: "angular", residual: p.theta_residual, ratio })
        }
        None => {
            let decreasing = radial_direction(d, d.sector, grid.n_theta)?.ok_or_else(flat)?;
            let (r_lo, r_eval) = working_radii(d, d.sector, grid);
            let gg = grid.with_r_min(r_lo);
            let (us, wu) = gg.radial();
            let (ths, wt) = gg.angular(d.sector);
            let hu = us[1] - us[0];
            let hv: Vec<Vec<f64>> = us.iter().map(|u| ths.iter().map(|t| h(*u, *t)).collect()).collect();
            let scale: Vec<f64> = hv.iter().map(|row| row.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE)).collect();
            let mut v = vec![vec![0.0; ths.len()]; us.len()];
            let mut residual = 0.0f64;
            for k in 0..ths.len() {
                let fr: Vec<f64> = (0..us.len()).map(|i| hv[i][k]).collect();
                let col = radial_cumulative(&fr, hu, decreasing, 0.0);
                for i in 2..us.len() - 2 {
                    if us[i].exp() >= r_eval {
                        residual = residual.max((fd5(&col, hu, i) - hv[i][k]).abs() / scale[i]);
                    }
                }
                for (i, x) in col.into_iter().enumerate() {
                    v[i][k] = x;
                }
            }
            let ratio = ((log_norm_sq(&v, &us, &wu, &ths, &wt, d, 1) - log_norm_sq(&hv, &us, &wu, &ths, &wt, d, 2)) / 2.0).exp();
            Ok(TwoFormPrimitive { kind: "radial", residual, ratio })
        }
    }
}

/// Manufactured potential `u₀ = e^{Re φ} r^m Σ a_j cos(jθ + b_j)(1 + c_j r)`,
/// which has finite weighted norm for every sector.
#[derive(Clone, Debug)]
struct Manufactured {
    m: f64,
    modes: Vec<(f64, f64, f64, f64)>,
}

impl Manufactured {
    fn random(rng: &mut ChaCha8Rng, m: f64) -> Self {
        let modes = (0..3)
            .map(|j| (j as f64, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(-1.0..1.0)))
            .collect();
        Self { m, modes }
    }

    /// `(S, r∂_r S, ∂_θ S)`.
    fn shape(&self, r: f64, t: f64) -> (f64, f64, f64) {
        self.modes.iter().fold((0.0, 0.0, 0.0), |(s, sr, st), (j, a, b, c)| {
            let (cs, sn) = ((j * t + b).cos(), (j * t + b).sin());
            (s + a * cs * (1.0 + c * r), sr + a * cs * c * r, st - a * j * sn * (1.0 + c * r))
        })
    }

    /// `(u₀, r∂_r u₀, ∂_θ u₀)`.
    fn eval(&self, d: &WeightedLineData, u: f64, t: f64) -> (f64, f64, f64) {
        let r = u.exp();
        let p = (-0.5 * d.log_weight_phi(u, t) + self.m * u).exp();
        let (gr, gt) = d.grad_minus_re_phi(u, t);
        let (s, sr, st) = self.shape(r, t);
        (p * s, p * ((self.m - gr) * s + sr), p * (st - gt * s))
    }
}

/// One manufactured 1-form round trip: `ω = du₀`, angular then radial
/// primitive, compared to `u₀` modulo the gauge constant.
pub fn manufactured_trial(d: &WeightedLineData, outer: (f64, f64), g: &L2Grid, seed: u64) -> Result<TrialRow, L2Error> {
    let hardy = hardy_radial(d, g)?;
    trial_with(d, outer, g, seed, &hardy)
}

fn trial_with(d: &WeightedLineData, outer: (f64, f64), g: &L2Grid, seed: u64, hardy: &HardyRadial) -> Result<TrialRow, L2Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = if d.a_ell.norm() > 0.0 { 2.0 } else { 1.0 };
    let mf = Manufactured::random(&mut rng, m);
    let omega = |u: f64, t: f64| {
        let (_, f, g) = mf.eval(d, u, t);
        (f, g)
    };
    let ang = build_primitive_angular(&omega, d, outer, g)?;
    let decreasing = radial_direction(d, d.sector, g.n_theta)?.ok_or_else(flat)?;
    let (r_lo, r_eval) = working_radii(d, outer, g);
    let init = if decreasing && d.a_ell.norm() == 0.0 {
        let n_tr = g.n_theta.min(513) | 1;
        let (tu, tw) = g.tail();
        tu.iter().zip(&tw).map(|(u, w)| remainder_at(&omega, d.sector, outer, ang.decreasing, *u, n_tr) * w).sum()
    } else {
        0.0
    };
    // Same radial nodes as the angular step.
    let rad = radial_from_samples(ang.remainder.clone(), init, d, &g.with_r_min(r_lo), r_eval, decreasing, hardy.clone());
    let inner_k: Vec<usize> = (0..ang.thetas.len()).filter(|k| ang.thetas[*k] >= d.sector.0 && ang.thetas[*k] <= d.sector.1).collect();
    let n = ang.us.len();
    let gauge = if rad.decreasing {
        0.0
    } else {
        let k = inner_k[inner_k.len() / 2];
        ang.u[n - 1][k] + rad.u[n - 1] - mf.eval(d, ang.us[n - 1], ang.thetas[k]).0
    };
    // Each row is compared against the largest |u₀| on its path of accumulation.
    let rows: Vec<(usize, Vec<f64>)> = ang
        .us
        .iter()
        .enumerate()
        .filter(|(_, x)| x.exp() >= r_eval)
        .map(|(i, x)| (i, inner_k.iter().map(|k| mf.eval(d, *x, ang.thetas[*k]).0).collect()))
        .collect();
    let row_max: Vec<f64> = rows.iter().map(|(_, v)| v.iter().fold(0.0f64, |m, x| m.max(x.abs()))).collect();
    let mut residual = 0.0f64;
    for (j, (i, vals)) in rows.iter().enumerate() {
        let path = if rad.decreasing { &row_max[..=j] } else { &row_max[j..] };
        let scale = path.iter().fold(f64::MIN_POSITIVE, |m, x| m.max(*x));
        for (q, k) in inner_k.iter().enumerate() {
            let diff = ang.u[*i][*k] + rad.u[*i] - vals[q] - gauge;
            residual = residual.max(diff.abs() / scale);
        }
    }
    let ok = residual <= ROUND_TRIP_TOL && rad.within_hardy;
    Ok(TrialRow {
        trial: seed,
        kind: "one-form",
        ratio: ang.ratio,
        ratio_radial_sq: Some(rad.ratio_sq),
        residual,
        ok,
        error: None,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TrialRow {
    pub trial: u64,
    pub kind: &'static str,
    pub ratio: f64,
    pub ratio_radial_sq: Option<f64>,
    pub residual: f64,
    pub ok: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingReport {
    /// `a_ℓ = 0` and `β = 0`: outside the lemma's hypotheses.
    pub excluded: bool,
    pub rows: Vec<TrialRow>,
    pub max_ratio: f64,
    pub all_ok: bool,
}

fn failed(trial: u64, kind: &'static str, e: L2Error) -> TrialRow {
    TrialRow { trial, kind, ratio: f64::NAN, ratio_radial_sq: None, residual: f64::NAN, ok: false, error: Some(e.to_string()) }
}

/// Runs `trials` manufactured 1-forms on `d.sector` (bump out to `outer`) and
/// random 2-forms on the angular and the radial sector types. `radial_sector`
/// is where the radial 2-form primitive is tried.
pub fn vanishing_report(
    d: &WeightedLineData,
    outer: (f64, f64),
    radial_sector: (f64, f64),
    trials: usize,
    seed: u64,
    g: &L2Grid,
) -> VanishingReport {
    let mut rows = Vec::new();
    let hardy = hardy_radial(d, g);
    for t in 0..trials as u64 {
        let s = seed.wrapping_add(t);
        let one = match &hardy {
            Ok(h) => trial_with(d, outer, g, s, h),
            Err(e) => Err(e.clone()),
        };
        rows.push(one.unwrap_or_else(|e| failed(s, "one-form", e)));

        let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x9e37_79b9);
        let mf = Manufactured::random(&mut rng, if d.a_ell.norm() > 0.0 { 2.0 } else { 1.0 });
        let h = |u: f64, th: f64| mf.eval(d, u, th).0;
        for (kind, dd, out) in [("two-form-angular", d.clone(), Some(outer)), ("two-form-radial", d.with_sector(radial_sector), None)] {
            let row = match build_primitive_two_form(&h, &dd, out, g) {
                Ok(p) => TrialRow {
                    trial: s,
                    kind,
                    ratio: p.ratio,
                    ratio_radial_sq: None,
                    residual: p.residual,
                    ok: p.residual <= TWO_FORM_TOL && p.ratio.is_finite(),
                    error: None,
                },
                Err(e) => failed(s, kind, e),
            };
            rows.push(row);
        }
    }
    let max_ratio = rows.iter().filter(|r| r.ratio.is_finite()).map(|r| r.ratio).fold(0.0, f64::max);
    let all_ok = rows.iter().all(|r| r.ok);
    VanishingReport { excluded: d.excluded(), rows, max_ratio, all_ok }
}

#[cfg(test)]
mod tests {
    use super::super::GridPreset;
    use super::*;
    use crate::series::{ComplexRational, PuiseuxSeries};

    fn line(terms: &[(i64, i64)], beta: f64, sector: (f64, f64)) -> WeightedLineData {
        let phi = PuiseuxSeries::laurent(terms.iter().map(|(n, c)| (*n, ComplexRational::from_integer(*c))));
        WeightedLineData::new(&phi, beta, 0, sector, 0.5).unwrap()
    }

    #[test]
    fn angular_primitive_of_constant_and_sine() {
        let g = L2Grid::preset(GridPreset::Coarse, 0.5);
        let d = line(&[], 0.5, (0.4, 1.2));
        let outer = (0.2, 1.4);
        let one = |_: f64, _: f64| (0.0, 1.0);
        let p = build_primitive_angular(&one, &d, outer, &g).unwrap();
        // On the plateau u − θ is the constant ∫ χ over the left ramp.
        let ks: Vec<usize> = (0..p.thetas.len()).filter(|k| p.thetas[*k] >= 0.4 && p.thetas[*k] <= 1.2).collect();
        let c0 = p.u[5][ks[0]] - p.thetas[ks[0]];
        for k in &ks {
            assert!((p.u[5][*k] - p.thetas[*k] - c0).abs() < 1e-10);
        }
        assert!((c0 + 0.3).abs() < 1e-6, "{c0}");

        let sine = |_: f64, t: f64| (0.0, t.sin());
        let p = build_primitive_angular(&sine, &d, outer, &g).unwrap();
        let c0 = p.u[5][ks[0]] + p.thetas[ks[0]].cos();
        for k in &ks {
            assert!((p.u[5][*k] + p.thetas[*k].cos() - c0).abs() < 1e-7);
        }
        assert!(p.ratio <= p.bound);
    }

    #[test]
    fn radial_primitive_closed_forms() {
        let g = L2Grid::preset(GridPreset::Default, 0.5);
        let d = line(&[], -0.5, (0.0, 1.0));
        let p = build_primitive_radial(&|u: f64| u.exp(), &d, &g).unwrap();
        assert!(p.decreasing);
        for (x, u) in p.us.iter().zip(&p.u).step_by(50) {
            assert!((u - x.exp()).abs() < 1e-8, "{x}: {u}");
        }
        assert!(p.within_hardy);

        let d = line(&[], 0.0, (0.0, 1.0));
        let d = WeightedLineData { kappa: 1, ..d };
        let f = |u: f64| (-u).powf(-1.5);
        let p = build_primitive_radial(&f, &d, &g).unwrap();
        for (x, u) in p.us.iter().zip(&p.u).step_by(50) {
            let want = 2.0 / (-x).sqrt();
            assert!((u - want).abs() < 1e-6 * want, "{x}: {u} vs {want}");
        }
        assert!(p.residual < 1e-5 && p.within_hardy, "{} {} {:?}", p.residual, p.ratio_sq, p.hardy);
    }

    #[test]
    fn radial_primitive_increasing_branch() {
        let g = L2Grid::preset(GridPreset::Default, 0.5);
        let d = line(&[(-1, -1)], 0.0, (2.2, 2.8));
        let f = |u: f64| u.exp().powi(3);
        let p = build_primitive_radial(&f, &d, &g).unwrap();
        assert!(!p.decreasing);
        assert!(p.residual < 1e-5);
        assert!(p.u.last().unwrap().abs() < 1e-15);
    }

    #[test]
    fn manufactured_round_trip_both_directions() {
        let g = L2Grid::preset(GridPreset::Default, 0.5);
        for (inner, outer) in [((0.3, 1.0), (0.125, 1.175)), ((2.0, 2.8), (1.8, 3.0))] {
            let d = line(&[(-1, -1)], 0.0, inner);
            let t = manufactured_trial(&d, outer, &g, 7).unwrap();
            assert!(t.residual <= ROUND_TRIP_TOL, "{inner:?}: {}", t.residual);
            assert!(t.ok, "{t:?}");
        }
        let d = line(&[], 0.5, (0.3, 1.0));
        let t = manufactured_trial(&d, (0.125, 1.175), &g, 3).unwrap();
        assert!(t.residual <= ROUND_TRIP_TOL, "{}", t.residual);
    }
}
