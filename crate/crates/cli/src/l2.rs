use connexion_core::formal::{formal_decompose, FormalConfig};
use connexion_core::l2lab::{
    hardy_angular, hardy_radial, phase_sign_check, psi_profile, vanishing_report, HardyRadial, L2Error, L2Grid, NVerdict, PhaseSign,
    WeightedLineData,
};
use serde::Serialize;

use crate::analyze::polar_part;
use crate::{CliError, Config, Input, InputEcho, VERSION};

const R1: f64 = 0.5;
const NS: std::ops::RangeInclusive<i32> = -5..=5;

#[derive(Clone, Debug, Serialize)]
pub struct L2Report {
    pub tool_version: &'static str,
    pub input: InputEcho,
    pub config: Config,
    /// Ramification of the decomposition; lines live in the variable `t`, `t^q = z`.
    pub q: u32,
    pub grid: L2Grid,
    pub lines: Vec<L2Line>,
    pub ok: bool,
}

/// One exponential part `φ` treated as a rank-one line.
#[derive(Clone, Debug, Serialize)]
pub struct L2Line {
    pub phi: String,
    pub ell: u32,
    /// `[Re, Im]` of `a_ℓ`.
    pub a_ell: [f64; 2],
    pub tau: f64,
    pub beta: f64,
    pub kappa: i32,
    /// `a_ℓ = 0` and `β = 0`: outside the lemma, nothing asserted.
    pub excluded: bool,
    pub sector: (f64, f64),
    pub outer: (f64, f64),
    pub radial_sector: (f64, f64),
    pub phase: Option<PhaseSign>,
    pub psi_verdicts: Vec<NVerdict>,
    pub hardy_angular: Option<AngularSummary>,
    pub hardy_radial: Option<HardyRadial>,
    pub vanishing: Option<VanishingSummary>,
    pub error: Option<String>,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AngularSummary {
    pub c_max: f64,
    pub bound: f64,
    pub decreasing: bool,
    pub r_max: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingSummary {
    pub trials: usize,
    pub max_ratio: f64,
    pub max_residual: f64,
    pub failures: usize,
    pub all_ok: bool,
}

#[derive(Clone, Debug, Default)]
pub struct L2Tables {
    pub psi_profile: Vec<PsiCsv>,
    pub hardy: Vec<HardyCsv>,
    pub vanishing: Vec<VanishingCsv>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiCsv {
    pub line: usize,
    pub r: f64,
    pub log_psi: f64,
    pub n: i32,
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize)]
pub struct HardyCsv {
    pub line: usize,
    pub r: f64,
    pub c: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VanishingCsv {
    pub line: usize,
    pub trial: u64,
    pub kind: &'static str,
    pub ratio: f64,
    pub residual: f64,
    pub verdict: &'static str,
}

impl L2Report {
    pub fn failure(&self) -> Option<CliError> {
        let bad: Vec<String> = self
            .lines
            .iter()
            .flat_map(|l| l.violations.iter().map(move |v| format!("{}: {v}", l.phi)))
            .collect();
        (!bad.is_empty()).then(|| CliError::BoundViolated(bad.join("; ")))
    }
}

/// Sectors `(inner, outer, radial)` in the normalized angle `ℓθ − τ`: the inner
/// and outer ones avoid zeros of both cos and sin, the radial one straddles a
/// zero of sin where cos > 0.
fn sectors(d: &WeightedLineData, user: Option<(f64, f64)>) -> ((f64, f64), (f64, f64), (f64, f64)) {
    let (l, tau) = if d.ell > 0 { (d.ell as f64, d.tau) } else { (1.0, 0.0) };
    let map = |a: f64, b: f64| ((a + tau) / l, (b + tau) / l);
    let radial = if d.ell > 0 { map(-0.26, 0.26) } else { (0.0, 1.0) };
    if let Some(s) = user {
        let w = 0.2 * (s.1 - s.0);
        return (s, (s.0 - w, s.1 + w), radial);
    }
    if d.ell > 0 {
        (map(0.3, 1.0), map(0.15, 1.2), radial)
    } else {
        ((0.4, 1.2), (0.2, 1.4), radial)
    }
}

fn l2_err(e: L2Error) -> String {
    e.to_string()
}

/// Runs the phase, ψ-profile, Hardy and vanishing checks on every distinct
/// exponential part of the input.
pub fn l2verify(input: &Input, cfg: &Config) -> Result<(L2Report, L2Tables), CliError> {
    let germ = input.spec.to_germ().map_err(|e| CliError::Parse(e.to_string()))?;
    let fc = FormalConfig { budget: cfg.trunc, ..FormalConfig::default() };
    let dec = formal_decompose(&germ, &fc).map_err(|e| CliError::Decomposition { name: e.name(), message: e.to_string() })?;
    let g = L2Grid::preset(cfg.grid, R1);
    let mut phis = Vec::new();
    for i in 0..dec.model.blocks().len() {
        let p = polar_part(&dec.model.phi_in_t(i));
        if !phis.contains(&p) {
            phis.push(p);
        }
    }
    let mut tables = L2Tables::default();
    let mut lines = Vec::new();
    for (k, phi) in phis.iter().enumerate() {
        let d = WeightedLineData::new(phi, cfg.beta, cfg.kappa, (0.0, 1.0), R1).map_err(|e| CliError::Numerical(e.to_string()))?;
        lines.push(run_line(k, d, cfg, &g, &mut tables));
    }
    let ok = lines.iter().all(|l| l.violations.is_empty());
    let report = L2Report { tool_version: VERSION, input: input.echo(), config: cfg.clone(), q: dec.q, grid: g, lines, ok };
    Ok((report, tables))
}

fn run_line(k: usize, d: WeightedLineData, cfg: &Config, g: &L2Grid, t: &mut L2Tables) -> L2Line {
    let (inner, outer, radial) = sectors(&d, cfg.sector);
    let d = d.with_sector(inner);
    let mut line = L2Line {
        phi: d.phi().to_string(),
        ell: d.ell,
        a_ell: [d.a_ell.re, d.a_ell.im],
        tau: d.tau,
        beta: d.beta,
        kappa: d.kappa,
        excluded: d.excluded(),
        sector: inner,
        outer,
        radial_sector: radial,
        phase: None,
        psi_verdicts: Vec::new(),
        hardy_angular: None,
        hardy_radial: None,
        vanishing: None,
        error: None,
        violations: Vec::new(),
    };
    if line.excluded {
        return line;
    }
    if let Err(e) = checks(k, &d, outer, radial, cfg, g, t, &mut line) {
        line.violations.push(e.clone());
        line.error = Some(e);
    }
    line
}

#[allow(clippy::too_many_arguments)]
fn checks(
    k: usize,
    d: &WeightedLineData,
    outer: (f64, f64),
    radial: (f64, f64),
    cfg: &Config,
    g: &L2Grid,
    t: &mut L2Tables,
    line: &mut L2Line,
) -> Result<(), String> {
    if d.a_ell.norm() > 0.0 {
        line.phase = Some(phase_sign_check(&d.with_sector(outer), g).map_err(l2_err)?);
    }
    let ns: Vec<i32> = NS.collect();
    let psi = psi_profile(d, &ns, g, None).map_err(l2_err)?;
    for row in &psi.rows {
        for (n, s) in ns.iter().zip(&row.signs) {
            t.psi_profile.push(PsiCsv { line: k, r: row.r, log_psi: row.log_psi, n: *n, sign: *s });
        }
    }
    for v in psi.verdicts.iter().filter(|v| !v.matches) {
        line.violations.push(format!("r^{}ψ has slope sign {} near 0, expected {:?}", v.n, v.sign, v.expected));
    }
    line.psi_verdicts = psi.verdicts;

    let ha = hardy_angular(d, outer, g).map_err(l2_err)?;
    t.hardy.extend(ha.rows.iter().map(|r| HardyCsv { line: k, r: r.r, c: r.c }));
    if ha.c_max > ha.bound + 1e-9 {
        line.violations.push(format!("angular Hardy constant {} exceeds {}", ha.c_max, ha.bound));
    }
    line.hardy_angular = Some(AngularSummary { c_max: ha.c_max, bound: ha.bound, decreasing: ha.decreasing, r_max: ha.r_max });

    // The fixed bound and the one-sided estimates belong to the a_ℓ ≠ 0 argument.
    // Without a pole the estimates only hold up to 1 + O(1/|log ρ|), so the
    // constant is held to the bound they imply.
    let hr = hardy_radial(d, g).map_err(l2_err)?;
    if d.a_ell.norm() > 0.0 {
        if !hr.within_log_bound() {
            line.violations.push(format!("radial Hardy constant {} exceeds {}", hr.c, hr.log_bound));
        }
        if let Some(r) = hr.weight_estimate.or(hr.inverse_estimate) {
            line.violations.push(format!("one-sided radial estimate fails at r = {r}"));
        }
    } else if hr.c > hr.one_sided_bound + 1e-9 {
        line.violations.push(format!("radial Hardy constant {} exceeds {}", hr.c, hr.one_sided_bound));
    }
    line.hardy_radial = Some(hr);

    let vr = vanishing_report(d, outer, radial, cfg.trials, cfg.seed, g);
    for row in &vr.rows {
        t.vanishing.push(VanishingCsv {
            line: k,
            trial: row.trial,
            kind: row.kind,
            ratio: row.ratio,
            residual: row.residual,
            verdict: if row.ok { "ok" } else { "fail" },
        });
    }
    let failures = vr.rows.iter().filter(|r| !r.ok).count();
    if !vr.all_ok {
        line.violations.push(format!("{failures} manufactured primitives failed"));
    }
    line.vanishing = Some(VanishingSummary {
        trials: cfg.trials,
        max_ratio: vr.max_ratio,
        max_residual: vr.rows.iter().map(|r| r.residual).fold(0.0, f64::max),
        failures,
        all_ok: vr.all_ok,
    });
    Ok(())
}
