//! Guarded Newton iteration for holomorphic functions on a disk, with an
//! a-priori admissibility condition and a doubly exponential error bound.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NewtonError {
    #[error("derivative vanished at iterate {index} (z = {at})")]
    DerivativeVanishes { at: Complex64, index: usize },
    #[error("iterate {index} left the 6R disk (z = {at}); trace of {trace_len} points recorded")]
    Diverged {
        at: Complex64,
        index: usize,
        trace_len: usize,
    },
    #[error("certificate is not admissible (eps0 = {eps0:.3e})")]
    Inadmissible { eps0: f64 },
    #[error("max_iter must be at least 1")]
    NoIterations,
}

/// Disk data for the guard: the iteration lives in D(center, R) and the
/// caller supplies sup|Φ''| and sup|Φ'⁻¹| over the concentric 5R disk.
#[derive(Debug, Clone, Copy)]
pub struct NewtonConfig {
    pub radius: f64,
    pub c1: f64,
    pub c2: f64,
    pub center: Complex64,
}

impl NewtonConfig {
    pub fn a_constant(&self) -> f64 {
        self.c1 * self.c2 * self.c2
    }

    pub fn admissibility_limit(&self) -> f64 {
        (0.5 / self.a_constant()).min(2.0 * self.radius / self.c2)
    }
}

/// Convergence certificate: admissible iff |Φ(z₀)| ≤ min((2A)⁻¹, 2R/C₂)
/// with A = C₁C₂²; then |z_∞ − z_k| ≤ 2/(C₁C₂)·(A|Φ(z₀)|)^{2^k}.
#[derive(Debug, Clone, Copy)]
pub struct NewtonCertificate {
    pub a: f64,
    pub eps0: f64,
    pub admissible: bool,
    pub c1: f64,
    pub c2: f64,
}

impl NewtonCertificate {
    fn new(cfg: &NewtonConfig, eps0: f64) -> Self {
        NewtonCertificate {
            a: cfg.a_constant(),
            eps0,
            admissible: eps0 <= cfg.admissibility_limit(),
            c1: cfg.c1,
            c2: cfg.c2,
        }
    }

    /// 2/(C₁C₂)·(A·eps0)^{2^k}; decreasing in k when A·eps0 < 1.
    pub fn bound_at(&self, k: u32) -> f64 {
        let base = self.a * self.eps0;
        let exponent = (2.0_f64).powi(k as i32);
        2.0 / (self.c1 * self.c2) * (exponent * base.ln()).exp()
    }
}

/// Bound from the certificate, failing on inadmissible runs.
pub fn certificate_bound(cert: &NewtonCertificate, k: u32) -> Result<f64, NewtonError> {
    if !cert.admissible {
        return Err(NewtonError::Inadmissible { eps0: cert.eps0 });
    }
    Ok(cert.bound_at(k))
}

#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub root: Complex64,
    pub iterates: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub converged: bool,
}

/// Newton iteration z ↦ z − Φ(z)/Φ'(z) from `z0`.
///
/// Stops when the residual or (on admissible runs) the certificate bound
/// drops below `stop_tol`. An inadmissible certificate does not abort the
/// run; it is recorded and the solve proceeds best-effort.
pub fn solve_guarded<F, G>(
    phi: F,
    dphi: G,
    z0: Complex64,
    cfg: &NewtonConfig,
    stop_tol: f64,
    max_iter: usize,
) -> Result<(NewtonResult, NewtonCertificate), NewtonError>
where
    F: Fn(Complex64) -> Complex64,
    G: Fn(Complex64) -> Complex64,
{
    if max_iter == 0 {
        return Err(NewtonError::NoIterations);
    }
    let mut z = z0;
    let mut iterates = vec![z];
    let mut residuals = vec![phi(z).norm()];
    let cert = NewtonCertificate::new(cfg, residuals[0]);
    let mut converged = residuals[0] <= stop_tol;
    for k in 0..max_iter {
        if converged {
            break;
        }
        let d = dphi(z);
        if d.norm() < 1e-300 {
            return Err(NewtonError::DerivativeVanishes { at: z, index: k });
        }
        z -= phi(z) / d;
        if (z - cfg.center).norm() > 6.0 * cfg.radius {
            return Err(NewtonError::Diverged {
                at: z,
                index: k + 1,
                trace_len: iterates.len(),
            });
        }
        iterates.push(z);
        residuals.push(phi(z).norm());
        let bound_ok = cert.admissible && cert.bound_at((k + 1) as u32) <= stop_tol;
        converged = *residuals.last().unwrap() <= stop_tol || bound_ok;
    }
    Ok((
        NewtonResult {
            root: z,
            iterates,
            residuals,
            converged,
        },
        cert,
    ))
}

/// Samples |Φ''| and |Φ'⁻¹| on rings of the 5R disk. A convenience for
/// certificate construction; the result is an observed maximum, not a
/// rigorous supremum.
pub fn estimate_disk_constants<F, G>(
    dphi: F,
    d2phi: G,
    center: Complex64,
    radius: f64,
) -> (f64, f64)
where
    F: Fn(Complex64) -> Complex64,
    G: Fn(Complex64) -> Complex64,
{
    let mut c1 = 0.0_f64;
    let mut c2 = 0.0_f64;
    for ring in [0.25, 0.5, 0.75, 1.0] {
        let r = 5.0 * radius * ring;
        for j in 0..32 {
            let ang = 2.0 * std::f64::consts::PI * (j as f64) / 32.0;
            let z = center + r * Complex64::new(ang.cos(), ang.sin());
            c1 = c1.max(d2phi(z).norm());
            let d = dphi(z).norm();
            if d > 0.0 {
                c2 = c2.max(1.0 / d);
            }
        }
    }
    (c1, c2)
}
