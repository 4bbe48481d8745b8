use std::f64::consts::{FRAC_PI_2, PI};

use connexion_core::l2lab::{cumulative_simpson, hardy_angular, simpson_weights, weighted_norm, Form, GridPreset, L2Grid, WeightedLineData};
use connexion_core::series::{ComplexRational, PuiseuxSeries};
use num_complex::Complex64;
use proptest::prelude::*;

const R1: f64 = 0.5;

fn one(_: f64, _: f64) -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn zero(_: f64, _: f64) -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `∫_{−∞}^{u₁} e^{2βu} u^κ du` for `κ ∈ {0, 2}`.
fn radial_moment(beta: f64, kappa: i32, u1: f64) -> f64 {
    let b = 2.0 * beta;
    let e = (b * u1).exp();
    match kappa {
        0 => e / b,
        2 => e * (u1 * u1 / b - 2.0 * u1 / (b * b) + 2.0 / (b * b * b)),
        _ => unreachable!(),
    }
}

/// `φ = −(a/z^ℓ)` plus lower polar terms with small integer coefficients.
fn phi_strategy() -> impl Strategy<Value = (PuiseuxSeries, u32, Complex64, f64)> {
    (1u32..=3, -3i64..=3, -3i64..=3, prop::collection::vec((-2i64..=2, -2i64..=2), 3)).prop_filter_map("a ≠ 0", |(ell, ar, ai, lower)| {
        if ar == 0 && ai == 0 {
            return None;
        }
        let mut terms = vec![(-(ell as i64), ComplexRational::from_ints(-ar, -ai))];
        let mut slack = 0.0;
        for (k, (cr, ci)) in lower.into_iter().enumerate().take(ell as usize) {
            terms.push((k as i64 + 1 - ell as i64, ComplexRational::from_ints(cr, ci)));
            slack += Complex64::new(cr as f64, ci as f64).norm();
        }
        let a = Complex64::new(ar as f64, ai as f64);
        Some((PuiseuxSeries::laurent(terms), ell, a, slack / a.norm()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn simpson_exact_on_cubics(c in prop::array::uniform4(-3.0f64..3.0), a in -2.0f64..2.0, len in 0.1f64..4.0, half in 1usize..40) {
        let n = 2 * half + 1;
        let h = len / (n - 1) as f64;
        let p = |x: f64| c[0] + c[1] * x + c[2] * x * x + c[3] * x * x * x;
        let prim = |x: f64| c[0] * x + c[1] * x * x / 2.0 + c[2] * x.powi(3) / 3.0 + c[3] * x.powi(4) / 4.0;
        let xs: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        let q: f64 = xs.iter().zip(simpson_weights(n, h)).map(|(x, w)| w * p(*x)).sum();
        let exact = prim(a + len) - prim(a);
        prop_assert!((q - exact).abs() <= 1e-10 * (1.0 + exact.abs()));
        let fs: Vec<f64> = xs.iter().map(|x| p(*x)).collect();
        let cum = cumulative_simpson(&fs, h);
        // Even nodes close Simpson pairs; odd ones use the three-point rule,
        // whose error on `c₃x³` is exactly `−c₃h⁴/4`.
        for (i, (x, v)) in xs.iter().zip(&cum).enumerate() {
            let e = prim(*x) - prim(a);
            let rule = if i % 2 == 1 { -c[3] * h.powi(4) / 4.0 } else { 0.0 };
            prop_assert!((v - e - rule).abs() <= 1e-10 * (1.0 + e.abs()), "node {i}: {v} vs {e}");
        }
    }

    /// `−Re φ = (|a|/r^ℓ)(cos(ℓθ − τ) + r·δ)` with `τ = arg a` and `|δ| ≤ Σ|c_k|/|a|`.
    #[test]
    fn phase_identity((phi, ell, a, slack) in phi_strategy(), lr in (1e-4f64).ln()..(0.9f64).ln(), th in -PI..PI) {
        let d = WeightedLineData::new(&phi, 0.0, 0, (0.0, 1.0), R1).unwrap();
        prop_assert_eq!(d.ell, ell);
        prop_assert!((d.a_ell - a).norm() < 1e-12);
        prop_assert!(Complex64::from_polar(1.0, d.tau - a.arg()).im.abs() < 1e-12);
        prop_assert!(Complex64::from_polar(1.0, d.tau - a.arg()).re > 0.0);
        let r = lr.exp();
        let z = Complex64::from_polar(r, th);
        let re_phi = phi.terms().iter().map(|(n, c)| (c.to_c64() * z.powi(*n as i32)).re).sum::<f64>();
        let delta = (-re_phi * r.powi(ell as i32) / a.norm() - (ell as f64 * th - a.arg()).cos()) / r;
        prop_assert!(delta.abs() <= slack + 1e-9 * (1.0 + delta.abs()), "δ = {delta}, slack {slack}");
        prop_assert!((d.delta(lr, th) - delta).abs() <= 1e-6 * (1.0 + delta.abs()));
    }

    /// Monotone angular weights obey `C ≤ (θ′₁ − θ′₀)²` on any sector between zeros of cos and sin.
    #[test]
    fn angular_hardy_bound(ell in 1u32..=2, ar in -3i64..=3, ai in 1i64..=3, quarter in 0u32..4, lo in 0.05f64..0.7, w in 0.1f64..0.7) {
        let hi = (lo + w).min(FRAC_PI_2 - 0.05);
        prop_assume!(hi - lo > 0.05);
        let phi = PuiseuxSeries::laurent([(-(ell as i64), ComplexRational::from_ints(-ar, -ai))]);
        let d = WeightedLineData::new(&phi, 0.0, 0, (0.0, 1.0), R1).unwrap();
        let base = quarter as f64 * FRAC_PI_2 + d.tau;
        let outer = ((base + lo) / ell as f64, (base + hi) / ell as f64);
        let g = L2Grid::preset(GridPreset::Coarse, R1);
        let ha = hardy_angular(&d.with_sector(outer), outer, &g).unwrap();
        prop_assert!(ha.c_max <= ha.bound + 1e-9, "{} > {}", ha.c_max, ha.bound);
        prop_assert!((ha.bound - (outer.1 - outer.0).powi(2)).abs() < 1e-15);
    }
}

/// Flat phase: `∫ r^{2β}|log r|^κ dθ dr/r` in closed form, tail included.
#[test]
fn calibration_without_pole() {
    let g = L2Grid::preset(GridPreset::Default, R1);
    for beta in [0.25, 0.5, 1.5] {
        for kappa in [0, 2] {
            for sector in [(0.0, 1.0), (-2.0, 2.5)] {
                let d = WeightedLineData::new(&PuiseuxSeries::zero(1), beta, kappa, sector, R1).unwrap();
                let got = weighted_norm(&Form::One(&one, &zero), &d, &g);
                let exact = (sector.1 - sector.0) * radial_moment(beta, kappa, R1.ln());
                assert!((got - exact).abs() <= 1e-6 * exact, "β {beta} κ {kappa}: {got} vs {exact}");
            }
        }
    }
}

/// With `φ = 1/z` on a sector where `cos > 0` the weight `e^{−2cos θ/r}` is small near 0;
/// compare with a direct midpoint sum in `(u, θ)`.
#[test]
fn calibration_with_pole() {
    let phi = PuiseuxSeries::laurent([(-1, ComplexRational::from_integer(1))]);
    let sector = (-0.5, 0.6);
    let d = WeightedLineData::new(&phi, 0.5, 0, sector, R1).unwrap();
    let got = weighted_norm(&Form::One(&one, &zero), &d, &L2Grid::preset(GridPreset::Default, R1));
    let (nu, nt) = (20000, 400);
    let (u0, u1) = ((1e-6f64).ln(), R1.ln());
    let (hu, ht) = ((u1 - u0) / nu as f64, (sector.1 - sector.0) / nt as f64);
    let mut exact = 0.0;
    for i in 0..nu {
        let u = u0 + hu * (i as f64 + 0.5);
        for j in 0..nt {
            let t = sector.0 + ht * (j as f64 + 0.5);
            exact += (u - 2.0 * t.cos() * (-u).exp()).exp() * hu * ht;
        }
    }
    assert!((got - exact).abs() <= 1e-5 * exact, "{got} vs {exact}");
}
