//! Small quadrature kernels shared by the weighted L² routines.

/// Composite Simpson weights for `n` (odd) equispaced nodes with step `h`.
/// Even `n` falls back to trapezoid on the last cell.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2, "need at least two nodes");
    let mut w = vec![0.0; n];
    let m = if n % 2 == 1 { n } else { n - 1 };
    if m >= 3 {
        for (i, wi) in w.iter_mut().enumerate().take(m) {
            *wi = if i == 0 || i == m - 1 {
                h / 3.0
            } else if i % 2 == 1 {
                4.0 * h / 3.0
            } else {
                2.0 * h / 3.0
            };
        }
    }
    if m != n {
        w[n - 2] += h / 2.0;
        w[n - 1] += h / 2.0;
    }
    w
}

/// `log Σ exp(x_i)`; `−∞` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Running integral `∫_{x₀}^{x_i} f` on an equispaced grid, fourth order:
/// Simpson on pairs, and the three-point rule `h(5f₀ + 8f₁ − f₂)/12` for a
/// trailing half pair.
pub fn cumulative_simpson<T>(f: &[T], h: f64) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = f.len();
    let mut out = vec![T::default(); n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = (f[0] + f[1]) * (h / 2.0);
        return out;
    }
    let mut i = 0;
    while i + 2 < n {
        out[i + 1] = out[i] + (f[i] * 5.0 + f[i + 1] * 8.0 - f[i + 2]) * (h / 12.0);
        out[i + 2] = out[i] + (f[i] + f[i + 1] * 4.0 + f[i + 2]) * (h / 3.0);
        i += 2;
    }
    if i + 1 < n {
        out[i + 1] = out[i] + (f[i + 1] * 5.0 + f[i] * 8.0 - f[i - 1]) * (h / 12.0);
    }
    out
}

/// `−∫_{x_i}^{x_end} f`, accumulated from the right.
pub fn cumulative_simpson_rev<T>(f: &[T], h: f64) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let rev: Vec<T> = f.iter().rev().cloned().collect();
    let mut out = cumulative_simpson(&rev, h);
    out.reverse();
    out.iter_mut().for_each(|x| *x = *x * -1.0);
    out
}

/// Log of running integrals of `e^{E}` with `E` interpolated linearly per cell,
/// so steep exponentials are integrated exactly. Entry 0 is `−∞`.
pub fn cumulative_log_exp(e: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![f64::NEG_INFINITY; e.len()];
    for i in 1..e.len() {
        let cell = log_cell(e[i - 1], e[i], h);
        out[i] = log_add(out[i - 1], cell);
    }
    out
}

/// Log of `∫_{x_i}^{x_end} e^{E}`, accumulated from the right so small upper
/// integrals keep full relative accuracy. Last entry is `−∞`.
pub fn cumulative_log_exp_rev(e: &[f64], h: f64) -> Vec<f64> {
    let rev: Vec<f64> = e.iter().rev().cloned().collect();
    let mut out = cumulative_log_exp(&rev, h);
    out.reverse();
    out
}

/// `log ∫` over one cell of `exp` of the linear interpolant between `a` and `b`.
pub fn log_cell(a: f64, b: f64, h: f64) -> f64 {
    let d = (b - a).abs();
    let m = a.max(b);
    let factor = if d < 1e-8 { 1.0 - d / 2.0 } else { -(-d).exp_m1() / d };
    h.ln() + m + factor.ln()
}

pub fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_cubics() {
        let n = 11;
        let h = 0.1;
        let w = simpson_weights(n, h);
        let s: f64 = (0..n).map(|i| (i as f64 * h).powi(3) * w[i]).sum();
        assert!((s - 0.25).abs() < 1e-12);
    }

    #[test]
    fn cumulative_matches_primitive() {
        let h = 0.01;
        let f: Vec<f64> = (0..102).map(|i| (i as f64 * h).cos()).collect();
        let c = cumulative_simpson(&f, h);
        for (i, ci) in c.iter().enumerate() {
            assert!((ci - (i as f64 * h).sin()).abs() < 1e-9, "{i}");
        }
    }

    #[test]
    fn exp_cells_are_exact_for_linear_exponents() {
        let h = 0.5;
        let e: Vec<f64> = (0..5).map(|i| 40.0 * i as f64 * h).collect();
        let c = cumulative_log_exp(&e, h);
        let want = ((40.0f64 * 2.0).exp() - 1.0) / 40.0;
        assert!((c[4] - want.ln()).abs() < 1e-12);
    }
}
