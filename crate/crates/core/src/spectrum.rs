//! Ground-state eigenpairs of −∂x² + (αx)² on (−1,1) with Dirichlet
//! conditions, normalized to v(0) = 1, via shooting in the scaled variable
//! y = √α·x where the conditioning is uniform in α.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::c64;
use crate::ode;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("alpha = {0} below the supported range (need alpha ≥ 0.5)")]
    AlphaTooSmall(f64),
    #[error("tolerance {0} outside [1e-14, 1e-6]")]
    BadTolerance(f64),
    #[error("no sign change while bracketing mu in ({lo}, {hi})")]
    BracketingFailure { lo: f64, hi: f64 },
    #[error("eigenfunction integration failed: {0}")]
    Integration(#[from] ode::OdeError),
    #[error("complex eigenfunction requires Re(alpha) > 0, got {0}")]
    BadComplexAlpha(Complex64),
}

/// Ground eigenpair with a dense eigenfunction sample on [−1, 1].
#[derive(Debug, Clone)]
pub struct OscillatorEigen {
    pub alpha: f64,
    pub lambda: f64,
    /// Scaled eigenvalue λ/α.
    pub mu: f64,
    /// Sample abscissae on [−1, 1], uniform.
    pub xs: Vec<f64>,
    /// v(x) at the sample points, v(0) = 1.
    pub values: Vec<f64>,
    /// v'(x) at the sample points.
    pub derivs: Vec<f64>,
    /// |w(√α)| at the converged μ, the shooting residual.
    pub residual: f64,
}

impl OscillatorEigen {
    /// Cubic Hermite interpolation between sample points.
    pub fn value_at(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let (x0, x1) = (self.xs[0], self.xs[n - 1]);
        let x = x.clamp(x0, x1);
        let h = (x1 - x0) / (n - 1) as f64;
        let idx = (((x - x0) / h) as usize).min(n - 2);
        let t = (x - self.xs[idx]) / h;
        let (v0, v1) = (self.values[idx], self.values[idx + 1]);
        let (d0, d1) = (self.derivs[idx] * h, self.derivs[idx + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        v0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * (t3 - 2.0 * t2 + t)
            + v1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * (t3 - t2)
    }
}

/// Per-α summary row for sweeps and CSV output.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralRecord {
    pub alpha: f64,
    pub lambda: f64,
    pub rho: f64,
    pub gamma_empirical: f64,
    pub gamma_over_asymptote: f64,
    pub l2_norm: f64,
    pub agmon_sup: f64,
}

const SAMPLES_HALF: usize = 1000; // grid of 2·SAMPLES_HALF + 1 points on [−1,1]

/// w(√α) and ∂w/∂μ(√α) for −w'' + y²w = μw, w(0)=1, w'(0)=0.
fn shoot(alpha: f64, mu: f64, tol: f64) -> Result<(f64, f64), SpectrumError> {
    let end = alpha.sqrt();
    let f = |y: f64, s: &[Complex64; 4]| {
        let pot = y * y - mu;
        [
            s[1],
            pot * s[0],
            s[3],
            pot * s[2] - s[0], // variational equation in μ
        ]
    };
    let y0 = [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)];
    let out = ode::integrate(&f, 0.0, end, y0, tol)?;
    Ok((out[0].re, out[2].re))
}

/// Ground eigenpair by bracketed bisection on μ refined with Newton steps.
/// The bracket starts just above μ = 1 and widens upward geometrically.
pub fn ground_eigen(alpha: f64, tol: f64) -> Result<OscillatorEigen, SpectrumError> {
    if alpha < 0.5 {
        return Err(SpectrumError::AlphaTooSmall(alpha));
    }
    if !(1e-14..=1e-6).contains(&tol) {
        return Err(SpectrumError::BadTolerance(tol));
    }
    let ode_tol = (tol * 0.1).clamp(1e-14, 1e-8);
    let mut lo = 1.0 + 1e-12;
    let mut hi = 1.5;
    let mut w_lo = shoot(alpha, lo, ode_tol)?.0;
    let mut w_hi = shoot(alpha, hi, ode_tol)?.0;
    let mut widenings = 0;
    while w_lo.signum() == w_hi.signum() {
        lo = hi;
        w_lo = w_hi;
        hi = 1.0 + (hi - 1.0) * 2.0;
        w_hi = shoot(alpha, hi, ode_tol)?.0;
        widenings += 1;
        if widenings > 40 {
            return Err(SpectrumError::BracketingFailure { lo, hi });
        }
    }
    let _ = w_hi;
    // bisection to locate, Newton to polish
    let mut mu = 0.5 * (lo + hi);
    for _ in 0..50 {
        mu = 0.5 * (lo + hi);
        let w = shoot(alpha, mu, ode_tol)?.0;
        if w.signum() == w_lo.signum() {
            lo = mu;
            w_lo = w;
        } else {
            hi = mu;
        }
        if (hi - lo) < 1e-9 * mu {
            break;
        }
    }
    let mut residual = f64::INFINITY;
    for _ in 0..12 {
        let (w, dw) = shoot(alpha, mu, ode_tol)?;
        residual = w.abs();
        if dw == 0.0 {
            break;
        }
        let step = w / dw;
        let next = mu - step;
        mu = if next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
        if step.abs() <= 1e-16 * mu.abs() {
            break;
        }
    }
    let lambda = alpha * mu;

    // one sampled pass on the half grid, mirrored by evenness
    let end = alpha.sqrt();
    let ys: Vec<f64> = (1..=SAMPLES_HALF)
        .map(|i| end * i as f64 / SAMPLES_HALF as f64)
        .collect();
    let f = |y: f64, s: &[Complex64; 2]| [s[1], (y * y - mu) * s[0]];
    let states = ode::integrate_sampled(&f, 0.0, &ys, [c64(1.0, 0.0), c64(0.0, 0.0)], ode_tol)?;

    let n = 2 * SAMPLES_HALF + 1;
    let mut xs = vec![0.0; n];
    let mut values = vec![0.0; n];
    let mut derivs = vec![0.0; n];
    values[SAMPLES_HALF] = 1.0;
    for i in 1..=SAMPLES_HALF {
        let x = i as f64 / SAMPLES_HALF as f64;
        let w = states[i - 1][0].re;
        let dw_dy = states[i - 1][1].re;
        xs[SAMPLES_HALF + i] = x;
        values[SAMPLES_HALF + i] = w;
        derivs[SAMPLES_HALF + i] = dw_dy * end; // v'(x) = √α·w'(y)
        xs[SAMPLES_HALF - i] = -x;
        values[SAMPLES_HALF - i] = w;
        derivs[SAMPLES_HALF - i] = -dw_dy * end;
    }
    Ok(OscillatorEigen {
        alpha,
        lambda,
        mu,
        xs,
        values,
        derivs,
        residual,
    })
}

/// L² norm of the eigenfunction on (−1,1), composite Simpson on the sample
/// grid.
pub fn l2_norm(eig: &OscillatorEigen) -> f64 {
    let n = eig.xs.len();
    let h = (eig.xs[n - 1] - eig.xs[0]) / (n - 1) as f64;
    let sq = |v: f64| v * v;
    let mut acc = sq(eig.values[0]) + sq(eig.values[n - 1]);
    for i in 1..n - 1 {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * sq(eig.values[i]);
    }
    (acc * h / 3.0).sqrt()
}

/// sup over the sample grid of |e^{α(1−ε)x²/2}·v(x)| / α^{3/4}.
pub fn agmon_ratio(eig: &OscillatorEigen, epsilon: f64) -> f64 {
    assert!(epsilon > 0.0 && epsilon <= 1.0, "epsilon in (0, 1]");
    let mut sup: f64 = 0.0;
    for (x, v) in eig.xs.iter().zip(&eig.values) {
        let weighted = (eig.alpha * (1.0 - epsilon) * x * x / 2.0).exp() * v.abs();
        sup = sup.max(weighted);
    }
    sup / eig.alpha.powf(0.75)
}

/// Eigenfunction for complex α with λ = α + γ(α)e^{−α}, integrated along
/// real x from 0; blow-up signals α outside the validity sector.
pub fn complex_eigenfunction(
    alpha: Complex64,
    gamma_of_alpha: Complex64,
    xs: &[f64],
) -> Result<Vec<Complex64>, SpectrumError> {
    if alpha.re <= 0.0 {
        return Err(SpectrumError::BadComplexAlpha(alpha));
    }
    let lambda = alpha + gamma_of_alpha * (-alpha).exp();
    let f = move |x: f64, s: &[Complex64; 2]| {
        let pot = alpha * alpha * x * x - lambda;
        [s[1], pot * s[0]]
    };
    // integrate once outward, visiting |x| in increasing order
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].abs().total_cmp(&xs[j].abs()));
    let targets: Vec<f64> = order.iter().map(|&i| xs[i].abs()).collect();
    let states = ode::integrate_sampled(&f, 0.0, &targets, [c64(1.0, 0.0), c64(0.0, 0.0)], 1e-13)?;
    let mut out = vec![Complex64::default(); xs.len()];
    for (pos, &i) in order.iter().enumerate() {
        out[i] = states[pos][0];
        if !out[i].is_finite() || out[i].norm() > 1e6 {
            return Err(SpectrumError::Integration(ode::OdeError::BlowUp {
                t: xs[i],
                limit: 1e6,
            }));
        }
    }
    Ok(out)
}

/// Full per-α record; `agmon_sup` is taken at ε = 1/2.
pub fn spectral_record(alpha: f64, tol: f64) -> Result<SpectralRecord, SpectrumError> {
    let eig = ground_eigen(alpha, tol)?;
    let rho = eig.lambda - alpha;
    let gamma_empirical = rho * alpha.exp();
    let asymptote = 4.0 / std::f64::consts::PI.sqrt() * alpha.powf(1.5);
    Ok(SpectralRecord {
        alpha,
        lambda: eig.lambda,
        rho,
        gamma_empirical,
        gamma_over_asymptote: gamma_empirical / asymptote,
        l2_norm: l2_norm(&eig),
        agmon_sup: agmon_ratio(&eig, 0.5),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_inputs() {
        assert!(matches!(
            ground_eigen(0.2, 1e-10),
            Err(SpectrumError::AlphaTooSmall(_))
        ));
        assert!(matches!(
            ground_eigen(2.0, 1e-3),
            Err(SpectrumError::BadTolerance(_))
        ));
    }

    #[test]
    fn ground_state_is_even_positive_decreasing() {
        let eig = ground_eigen(6.0, 1e-12).unwrap();
        let n = eig.xs.len();
        for i in 0..n {
            let j = n - 1 - i;
            assert!((eig.values[i] - eig.values[j]).abs() < 1e-10, "evenness");
        }
        let half = &eig.values[n / 2..];
        for w in half.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "monotone decay on [0,1)");
        }
        assert!(half.iter().take(half.len() - 1).all(|&v| v > 0.0));
        assert!((eig.value_at(0.0) - 1.0).abs() < 1e-14, "normalization");
        assert!(eig.value_at(1.0).abs() < 1e-8, "Dirichlet end");
    }

    #[test]
    fn lambda_exceeds_alpha_and_scales() {
        for &a in &[0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0] {
            let eig = ground_eigen(a, 1e-12).unwrap();
            assert!(eig.lambda > a, "λ({a}) = {} ≤ α", eig.lambda);
        }
        let eig = ground_eigen(10.0, 1e-12).unwrap();
        assert!(eig.mu > 1.0 && eig.mu < 1.01);
    }

    #[test]
    fn small_alpha_needs_bracket_widening() {
        // λ(0.5) is near the Dirichlet Laplacian ground state π²/4, so μ ≈ 5
        let eig = ground_eigen(0.5, 1e-12).unwrap();
        assert!(eig.mu > 4.0, "mu = {}", eig.mu);
        assert!(eig.lambda > std::f64::consts::PI.powi(2) / 4.0);
    }

    #[test]
    fn exponential_gap_at_alpha_12() {
        let eig = ground_eigen(12.0, 1e-12).unwrap();
        let rho = eig.lambda - 12.0;
        let predicted = 4.0 / std::f64::consts::PI.sqrt() * 12.0_f64.powf(1.5) * (-12.0_f64).exp();
        assert!(
            (rho / predicted - 1.0).abs() < 0.2,
            "rho = {rho:.6e}, predicted = {predicted:.6e}"
        );
    }

    #[test]
    fn l2_norm_approaches_line_limit() {
        // |v|_{L²(ℝ)} = (π/α)^{1/4} for the Gaussian limit profile
        let eig = ground_eigen(30.0, 1e-12).unwrap();
        let limit = (std::f64::consts::PI / 30.0).powf(0.25);
        assert!((l2_norm(&eig) / limit - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lemma2_lower_bound_family() {
        let mut vals = Vec::new();
        let mut n = 1.0;
        while n <= 40.0 {
            let eig = ground_eigen(n, 1e-12).unwrap();
            vals.push(n.powf(0.25) * l2_norm(&eig));
            n += 3.0;
        }
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > 0.5, "n^(1/4)·|v_n| stays away from 0, min = {min}");
    }

    #[test]
    fn agmon_ratio_at_eps_one_is_peak_over_scaling() {
        let eig = ground_eigen(10.0, 1e-12).unwrap();
        let r = agmon_ratio(&eig, 1.0);
        assert!((r - 10.0_f64.powf(-0.75)).abs() < 1e-12);
    }

    #[test]
    fn agmon_family_bounded_at_half() {
        let ratios: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
            .iter()
            .map(|&a| agmon_ratio(&ground_eigen(a, 1e-12).unwrap(), 0.5))
            .collect();
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max / min <= 5.0, "ratios {ratios:?}");
    }

    #[test]
    fn complex_eigenfunction_matches_real_solver() {
        let alpha = 8.0;
        let eig = ground_eigen(alpha, 1e-12).unwrap();
        let gamma = (eig.lambda - alpha) * alpha.exp();
        let xs = [0.0, 0.25, 0.5, 0.75, 1.0];
        let vals = complex_eigenfunction(c64(alpha, 0.0), c64(gamma, 0.0), &xs).unwrap();
        assert!((vals[0] - 1.0).norm() < 1e-14, "initial condition");
        for (i, &x) in xs.iter().enumerate() {
            assert!(
                (vals[i].re - eig.value_at(x)).abs() < 1e-8,
                "x = {x}: {} vs {}",
                vals[i].re,
                eig.value_at(x)
            );
            assert!(vals[i].im.abs() < 1e-10);
        }
        assert!(vals[4].norm() < 1e-6, "Dirichlet end from implicit lambda");
    }
}
