//! Adaptive Dormand–Prince 5(4) integration for small complex-valued
//! systems, used by the shooting eigensolver.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("solution magnitude exceeded {limit:.1e} at t = {t}")]
    BlowUp { t: f64, limit: f64 },
    #[error("step budget exhausted at t = {0}")]
    StepBudget(f64),
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;

const MAX_STEPS: usize = 50_000_000;
const BLOWUP_LIMIT: f64 = 1e150;

#[inline]
fn axpy<const N: usize>(
    y: &[Complex64; N],
    terms: &[(f64, &[Complex64; N])],
    h: f64,
) -> [Complex64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * *c * k[i];
        }
    }
    out
}

/// Integrates y' = f(t, y) from `t0` to `t1` (t1 > t0) with mixed
/// absolute/relative tolerance `tol`.
pub fn integrate<const N: usize, F>(
    f: &F,
    t0: f64,
    t1: f64,
    y0: [Complex64; N],
    tol: f64,
) -> Result<[Complex64; N], OdeError>
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    let mut t = t0;
    let mut y = y0;
    if t1 <= t0 {
        return Ok(y);
    }
    let mut h = ((t1 - t0) * 1e-3).min(0.05).max(1e-8);
    let mut k1 = f(t, &y);
    for _ in 0..MAX_STEPS {
        if t >= t1 {
            return Ok(y);
        }
        if t + h > t1 {
            h = t1 - t;
        }
        let k2 = f(t + A21 * h, &axpy(&y, &[(A21, &k1)], h));
        let k3 = f(t + 0.3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = f(t + 0.8 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = f(
            t + 8.0 / 9.0 * h,
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = f(
            t + h,
            &axpy(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                h,
            ),
        );
        let y5 = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = f(t + h, &y5);
        let y4 = axpy(
            &y,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
            h,
        );
        let mut errnorm = 0.0_f64;
        for i in 0..N {
            let scale = tol + tol * y[i].norm().max(y5[i].norm());
            errnorm = errnorm.max((y5[i] - y4[i]).norm() / scale);
        }
        if errnorm <= 1.0 {
            t += h;
            y = y5;
            k1 = k7;
            if y.iter().any(|v| !v.is_finite() || v.norm() > BLOWUP_LIMIT) {
                return Err(OdeError::BlowUp {
                    t,
                    limit: BLOWUP_LIMIT,
                });
            }
        }
        let factor = if errnorm > 0.0 {
            (0.9 * errnorm.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
        if h < 1e-14 * (t1 - t0) {
            return Err(OdeError::StepUnderflow(t));
        }
    }
    Err(OdeError::StepBudget(t))
}

/// Integrates through an increasing sequence of sample times starting at
/// `t0`, returning the state at each sample.
pub fn integrate_sampled<const N: usize, F>(
    f: &F,
    t0: f64,
    samples: &[f64],
    y0: [Complex64; N],
    tol: f64,
) -> Result<Vec<[Complex64; N]>, OdeError>
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    let mut out = Vec::with_capacity(samples.len());
    let mut t = t0;
    let mut y = y0;
    for &ts in samples {
        y = integrate(f, t, ts, y, tol)?;
        t = ts.max(t);
        out.push(y);
    }
    Ok(out)
}
