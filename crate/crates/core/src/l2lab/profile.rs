//! Phase-sign scans, the angular mass `ψ(r) = ∫ e^{−2Re φ} dθ`, and measured
//! Hardy constants.

use serde::Serialize;

use super::quad::{cumulative_log_exp, cumulative_log_exp_rev, log_sum_exp};
use super::{L2Error, L2Grid, WeightedLineData};

const SIGN_EPS: f64 = 1e-9;

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseSign {
    pub r_phi: f64,
    pub nodes_checked: usize,
    /// First node `(r, θ)` where an identity fails, scanning upward in `r`.
    pub first_failure: Option<(f64, f64)>,
    pub critical_free: bool,
}

/// Scans radii upward and returns the largest radius below which
/// `sign ∂_θ(−Re φ) = sign sin(τ − ℓθ)` and `sign ∂_r(−Re φ) = sign(−cos(τ − ℓθ))`
/// hold at every node of the sector.
pub fn phase_sign_check(d: &WeightedLineData, g: &L2Grid) -> Result<PhaseSign, L2Error> {
    if d.a_ell.norm() == 0.0 {
        return Err(L2Error::ZeroLeadingCoefficient);
    }
    let (us, _) = g.radial();
    let (ths, _) = g.angular(d.sector);
    let l = d.ell as f64;
    let mut r_phi = g.r_min;
    let mut first_failure = None;
    let mut critical_free = true;
    let mut checked = 0;
    'outer: for u in &us {
        for th in &ths {
            let (dr, dth) = d.grad_minus_re_phi(*u, *th);
            let s = (d.tau - l * th).sin();
            let c = (d.tau - l * th).cos();
            let bad_th = s.abs() > SIGN_EPS && sign(dth) != sign(s);
            let bad_r = c.abs() > SIGN_EPS && sign(dr) != sign(-c);
            if bad_th || bad_r {
                first_failure = Some((u.exp(), *th));
                break 'outer;
            }
            if dr == 0.0 && dth == 0.0 {
                critical_free = false;
            }
            checked += 1;
        }
        r_phi = u.exp();
    }
    Ok(PhaseSign { r_phi, nodes_checked: checked, first_failure, critical_free })
}

/// `log ψ(r)` on a sector, plus `log` of the positive and negative parts of
/// `∫ (N + 2r∂_r(−Re φ)) e^{−2Re φ} dθ` for each `N`.
fn psi_and_slopes(d: &WeightedLineData, u: f64, ths: &[f64], wts: &[f64], ns: &[i32]) -> (f64, Vec<i8>) {
    let e: Vec<f64> = ths.iter().map(|t| d.log_weight_phi(u, *t)).collect();
    let lw: Vec<f64> = e.iter().zip(wts).map(|(e, w)| e + w.ln()).collect();
    let log_psi = log_sum_exp(&lw);
    let drs: Vec<f64> = ths.iter().map(|t| 2.0 * d.grad_minus_re_phi(u, *t).0).collect();
    let signs = ns
        .iter()
        .map(|n| {
            let (mut pos, mut neg) = (Vec::new(), Vec::new());
            for (k, lwk) in lw.iter().enumerate() {
                let c = *n as f64 + drs[k];
                if c > 0.0 {
                    pos.push(lwk + c.ln());
                } else if c < 0.0 {
                    neg.push(lwk + (-c).ln());
                }
            }
            let (p, q) = (log_sum_exp(&pos), log_sum_exp(&neg));
            if p == f64::NEG_INFINITY && q == f64::NEG_INFINITY {
                0
            } else if (p - q).abs() < 1e-12 {
                0
            } else if p > q {
                1
            } else {
                -1
            }
        })
        .collect();
    (log_psi, signs)
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiRow {
    pub r: f64,
    pub log_psi: f64,
    /// Sign of `d(r^N ψ)/dr` per requested `N`.
    pub signs: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NVerdict {
    pub n: i32,
    /// Sign of `d(r^N ψ)/dr` near 0; 0 means constant.
    pub sign: i8,
    /// Largest radius below which that sign holds at every node.
    pub r_n: f64,
    pub expected: Option<i8>,
    pub matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiProfile {
    pub sector: (f64, f64),
    pub rows: Vec<PsiRow>,
    pub verdicts: Vec<NVerdict>,
}

/// Sign of `cos(ℓθ − τ)` on the closed sector, or the first angle where it vanishes or flips.
fn cos_sign(d: &WeightedLineData, sector: (f64, f64), n: usize) -> Result<i8, f64> {
    let l = d.ell as f64;
    let mut s0 = 0;
    for k in 0..n {
        let th = sector.0 + (sector.1 - sector.0) * k as f64 / (n - 1) as f64;
        let c = (l * th - d.tau).cos();
        let s = if c.abs() < 1e-12 { 0 } else { sign(c) };
        if s == 0 || (s0 != 0 && s != s0) {
            return Err(th);
        }
        s0 = s;
    }
    Ok(s0)
}

/// Samples `ψ` and decides monotonicity of `r^N ψ` for each `N`.
/// When `cos(ℓθ − τ)` vanishes on the sector, `sub` supplies the `ψ₊` sub-sector.
pub fn psi_profile(d: &WeightedLineData, ns: &[i32], g: &L2Grid, sub: Option<(f64, f64)>) -> Result<PsiProfile, L2Error> {
    let mut sector = d.sector;
    let mut expected_base = None;
    if d.a_ell.norm() > 0.0 {
        match cos_sign(d, sector, g.n_theta) {
            Ok(s) => expected_base = Some(-s),
            Err(th) => {
                let Some(sub) = sub else {
                    return Err(L2Error::SectorContainsCosZero(th));
                };
                let s = cos_sign(d, sub, g.n_theta).map_err(L2Error::SectorContainsCosZero)?;
                sector = sub;
                expected_base = Some(-s);
            }
        }
    }
    let (us, _) = g.radial();
    let (ths, wts) = g.angular(sector);
    let rows: Vec<PsiRow> = us
        .iter()
        .map(|u| {
            let (log_psi, signs) = psi_and_slopes(d, *u, &ths, &wts, ns);
            PsiRow { r: u.exp(), log_psi, signs }
        })
        .collect();
    let verdicts = ns
        .iter()
        .enumerate()
        .map(|(j, n)| {
            let s = rows[0].signs[j];
            let mut r_n = rows[0].r;
            for row in &rows {
                if row.signs[j] != s {
                    break;
                }
                r_n = row.r;
            }
            // Without a pole ψ is constant.
            let expected = expected_base.or_else(|| Some(sign(*n as f64)));
            NVerdict { n: *n, sign: s, r_n, expected, matches: expected == Some(s) }
        })
        .collect();
    Ok(PsiProfile { sector, rows, verdicts })
}

#[derive(Clone, Debug, Serialize)]
pub struct HardyRow {
    pub r: f64,
    pub c: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HardyAngular {
    pub c_max: f64,
    /// `(θ′₁ − θ′₀)²`.
    pub bound: f64,
    /// `e^{−Re φ}` decreasing in `θ`.
    pub decreasing: bool,
    pub r_max: f64,
    pub rows: Vec<HardyRow>,
}

/// `4·sup_θ (∫ e^{E})(∫ e^{−E})` with `E = −2Re φ(r, ·)`, split at `θ` on the side
/// dictated by the direction of monotonicity.
fn angular_constant(e: &[f64], h: f64, decreasing: bool) -> f64 {
    let neg: Vec<f64> = e.iter().map(|x| -x).collect();
    let (w, v) = if decreasing {
        (cumulative_log_exp_rev(e, h), cumulative_log_exp(&neg, h))
    } else {
        (cumulative_log_exp(e, h), cumulative_log_exp_rev(&neg, h))
    };
    let best = w.iter().zip(&v).map(|(a, b)| a + b).filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    4.0 * best.exp()
}

/// Measured angular Hardy constant on `outer`, at grid radii where the
/// phase-sign identities hold.
pub fn hardy_angular(d: &WeightedLineData, outer: (f64, f64), g: &L2Grid) -> Result<HardyAngular, L2Error> {
    let dd = d.with_sector(outer);
    let r_max = if d.a_ell.norm() > 0.0 { phase_sign_check(&dd, g)?.r_phi } else { g.r1 };
    let (us, _) = g.radial();
    let (ths, _) = g.angular(outer);
    let h = (outer.1 - outer.0) / (g.n_theta - 1) as f64;
    let mut rows = Vec::new();
    let mut direction = None;
    for u in us.iter().filter(|u| u.exp() <= r_max * (1.0 + 1e-12)) {
        let e: Vec<f64> = ths.iter().map(|t| dd.log_weight_phi(*u, *t)).collect();
        let scale = e.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let tol = 1e-12 * scale;
        let up = e.windows(2).all(|w| w[1] >= w[0] - tol);
        let down = e.windows(2).all(|w| w[1] <= w[0] + tol);
        let dec = match (up, down) {
            (_, true) => true,
            (true, false) => false,
            (false, false) => return Err(L2Error::NotMonotone(format!("e^(-Re phi) not monotone in theta at r = {}", u.exp()))),
        };
        if let Some(prev) = direction {
            if prev != dec && !(up && down) {
                return Err(L2Error::NotMonotone("direction of monotonicity changes with r".into()));
            }
        }
        if !(up && down) {
            direction = Some(dec);
        }
        rows.push(HardyRow { r: u.exp(), c: angular_constant(&e, h, dec) });
    }
    if rows.is_empty() {
        return Err(L2Error::NotMonotone("no radius below r_phi on this grid".into()));
    }
    let c_max = rows.iter().map(|r| r.c).fold(0.0, f64::max);
    Ok(HardyAngular { c_max, bound: (outer.1 - outer.0).powi(2), decreasing: direction.unwrap_or(true), r_max, rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct HardyRadial {
    /// `r^{2β}|log r|^κ ψ` decreasing in `r`, so primitives start at 0.
    pub decreasing: bool,
    /// Lower end of the measured range.
    pub r_lo: f64,
    /// Measured `4 sup_ρ (∫ W)(∫ V)`.
    pub c: f64,
    /// `4 sup ρ(r₁ − ρ)|log ρ|^{−2}` over the same radii.
    pub log_bound: f64,
    /// `4 sup |log ρ|^{−2}`, what the two one-sided estimates give.
    pub one_sided_bound: f64,
    /// Each one-sided estimate, and the first radius where it fails.
    pub weight_estimate: Option<f64>,
    pub inverse_estimate: Option<f64>,
}

impl HardyRadial {
    pub fn within_log_bound(&self) -> bool {
        self.c <= self.log_bound + 1e-9
    }
}

/// Direction of the radial weight `r^{2β}|log r|^κ ψ` near 0: `Some(true)` when
/// decreasing in `r`, `None` for the flat case excluded by the lemma.
pub fn radial_direction(d: &WeightedLineData, sector: (f64, f64), n: usize) -> Result<Option<bool>, L2Error> {
    if d.a_ell.norm() > 0.0 {
        let s = cos_sign(d, sector, n).map_err(L2Error::SectorContainsCosZero)?;
        return Ok(Some(s > 0));
    }
    Ok(if d.beta != 0.0 {
        Some(d.beta < 0.0)
    } else if d.kappa != 0 {
        Some(d.kappa > 0)
    } else {
        None
    })
}

/// Lower radius where `|2Re φ|` reaches 200 on the sector, so that every
/// cell of the log grid resolves the exponential.
pub(crate) fn resolved_r_min(d: &WeightedLineData, g: &L2Grid) -> f64 {
    if d.a_ell.norm() == 0.0 {
        return g.r_min;
    }
    (d.a_ell.norm() / 100.0).powf(1.0 / d.ell as f64).max(g.r_min).min(0.5 * g.r1)
}

/// Radial Hardy constant with `W = r^{2β−1}|log r|^{κ−2}ψ`, `V = (r^{2β+1}|log r|^κ ψ)^{−1}`.
pub fn hardy_radial(d: &WeightedLineData, g: &L2Grid) -> Result<HardyRadial, L2Error> {
    let decreasing = radial_direction(d, d.sector, g.n_theta)?
        .ok_or_else(|| L2Error::NotMonotone("flat weight: a_l = 0, beta = 0, kappa = 0".into()))?;
    let g = g.with_r_min(resolved_r_min(d, g));
    let (us, _) = g.radial();
    let (ths, wts) = g.angular(d.sector);
    let h = us[1] - us[0];
    let k = d.kappa as f64;
    // log F_m(u) = 2βu + m log|u| + log ψ
    let lpsi: Vec<f64> = us
        .iter()
        .map(|u| {
            let lw: Vec<f64> = ths.iter().zip(&wts).map(|(t, w)| d.log_weight_phi(*u, *t) + w.ln()).collect();
            log_sum_exp(&lw)
        })
        .collect();
    let lf = |m: f64, i: usize| 2.0 * d.beta * us[i] + m * us[i].abs().ln() + lpsi[i];
    let lw: Vec<f64> = (0..us.len()).map(|i| lf(k - 2.0, i)).collect();
    let lv: Vec<f64> = (0..us.len()).map(|i| -lf(k, i)).collect();
    let n = us.len();
    let (cw, cwr) = (cumulative_log_exp(&lw, h), cumulative_log_exp_rev(&lw, h));
    let (cv, cvr) = (cumulative_log_exp(&lv, h), cumulative_log_exp_rev(&lv, h));
    let mut c = f64::NEG_INFINITY;
    let mut sup = 0.0f64;
    let mut one_sided = 0.0f64;
    let mut weight_estimate = None;
    let mut inverse_estimate = None;
    let r1 = g.r1;
    for i in 1..n - 1 {
        let (a, b) = if decreasing { (cwr[i], cv[i]) } else { (cw[i], cvr[i]) };
        c = c.max(a + b);
        let rho = us[i].exp();
        sup = sup.max(rho * (r1 - rho) / us[i].powi(2));
        one_sided = one_sided.max(us[i].powi(2).recip());
        // ∫ W du-form ≤ F_{κ−2}(ρ) and ∫ V ≤ 1/F_κ(ρ), with a quadrature margin.
        let slack = 1e-3;
        if weight_estimate.is_none() && a > lw[i] + slack {
            weight_estimate = Some(rho);
        }
        if inverse_estimate.is_none() && b > lv[i] + slack {
            inverse_estimate = Some(rho);
        }
    }
    Ok(HardyRadial {
        decreasing,
        r_lo: g.r_min,
        c: 4.0 * c.exp(),
        log_bound: 4.0 * sup,
        one_sided_bound: 4.0 * one_sided,
        weight_estimate,
        inverse_estimate,
    })
}
