//! Piecewise paths in the complex plane and adaptive Gauss–Kronrod
//! quadrature of holomorphic integrands along them.
//!
//! Paths that formally extend to infinity are always represented truncated;
//! the truncation radius is kept on the contour so tails stay auditable.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::c64;

/// Budget of integrand evaluations for one `integrate` call.
pub const EVAL_BUDGET: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum ContourError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("relative tolerance {0} outside (1e-15, 1e-2)")]
    InvalidTolerance(f64),
    #[error(
        "quadrature did not converge within {evaluations} evaluations \
         (best value {value}, error estimate {error_estimate:.3e})"
    )]
    NonConvergence {
        value: Complex64,
        error_estimate: f64,
        evaluations: usize,
    },
}

/// One oriented piece of a contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathSegment {
    /// Straight segment from `from` to `to`.
    Line { from: Complex64, to: Complex64 },
    /// Circular arc around `center`; traversed from `start_angle` to
    /// `end_angle` (decreasing angles give clockwise orientation).
    Arc {
        center: Complex64,
        radius: f64,
        start_angle: f64,
        end_angle: f64,
    },
}

impl PathSegment {
    pub fn line(from: Complex64, to: Complex64) -> Self {
        PathSegment::Line { from, to }
    }

    pub fn arc(center: Complex64, radius: f64, start_angle: f64, end_angle: f64) -> Self {
        PathSegment::Arc {
            center,
            radius,
            start_angle,
            end_angle,
        }
    }

    pub fn start(&self) -> Complex64 {
        match *self {
            PathSegment::Line { from, .. } => from,
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                ..
            } => center + radius * c64(start_angle.cos(), start_angle.sin()),
        }
    }

    pub fn end(&self) -> Complex64 {
        match *self {
            PathSegment::Line { to, .. } => to,
            PathSegment::Arc {
                center,
                radius,
                end_angle,
                ..
            } => center + radius * c64(end_angle.cos(), end_angle.sin()),
        }
    }

    /// Point at parameter `t` in [0,1].
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            PathSegment::Line { from, to } => from + (to - from) * t,
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } => {
                let ang = start_angle + (end_angle - start_angle) * t;
                center + radius * c64(ang.cos(), ang.sin())
            }
        }
    }

    /// dz/dt at parameter `t`.
    pub fn velocity(&self, t: f64) -> Complex64 {
        match *self {
            PathSegment::Line { from, to } => to - from,
            PathSegment::Arc {
                center: _,
                radius,
                start_angle,
                end_angle,
            } => {
                let span = end_angle - start_angle;
                let ang = start_angle + span * t;
                Complex64::i() * span * radius * c64(ang.cos(), ang.sin())
            }
        }
    }

    pub fn reversed(&self) -> Self {
        match *self {
            PathSegment::Line { from, to } => PathSegment::Line { from: to, to: from },
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } => PathSegment::Arc {
                center,
                radius,
                start_angle: end_angle,
                end_angle: start_angle,
            },
        }
    }

    /// Split at interior parameter `t`, preserving orientation.
    pub fn split(&self, t: f64) -> (Self, Self) {
        let mid = self.point(t);
        match *self {
            PathSegment::Line { from, to } => (
                PathSegment::Line { from, to: mid },
                PathSegment::Line { from: mid, to },
            ),
            PathSegment::Arc {
                center,
                radius,
                start_angle,
                end_angle,
            } => {
                let ang = start_angle + (end_angle - start_angle) * t;
                (
                    PathSegment::Arc {
                        center,
                        radius,
                        start_angle,
                        end_angle: ang,
                    },
                    PathSegment::Arc {
                        center,
                        radius,
                        start_angle: ang,
                        end_angle,
                    },
                )
            }
        }
    }

    fn validate(&self) -> Result<(), ContourError> {
        match *self {
            PathSegment::Line { from, to } => {
                if (from - to).norm() == 0.0 {
                    return Err(ContourError::InvalidGeometry(
                        "line segment with coincident endpoints".into(),
                    ));
                }
            }
            PathSegment::Arc {
                radius,
                start_angle,
                end_angle,
                ..
            } => {
                if !(radius > 0.0) {
                    return Err(ContourError::InvalidGeometry(format!(
                        "arc radius {radius} must be positive"
                    )));
                }
                let span = (end_angle - start_angle).abs();
                if span == 0.0 || span > 2.0 * PI + 1e-12 {
                    return Err(ContourError::InvalidGeometry(format!(
                        "arc span {span} outside (0, 2π]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// An oriented chain of segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    segments: Vec<PathSegment>,
    closed: bool,
    truncation_radius: Option<f64>,
}

impl Contour {
    pub fn open(segments: Vec<PathSegment>) -> Result<Self, ContourError> {
        Self::build(segments, false)
    }

    pub fn closed(segments: Vec<PathSegment>) -> Result<Self, ContourError> {
        Self::build(segments, true)
    }

    fn build(segments: Vec<PathSegment>, closed: bool) -> Result<Self, ContourError> {
        if segments.is_empty() {
            return Err(ContourError::InvalidGeometry("empty contour".into()));
        }
        let mut scale: f64 = 1.0;
        for seg in &segments {
            seg.validate()?;
            scale = scale.max(seg.start().norm()).max(seg.end().norm());
        }
        for pair in segments.windows(2) {
            if (pair[0].end() - pair[1].start()).norm() > 1e-9 * scale {
                return Err(ContourError::InvalidGeometry(format!(
                    "chain discontinuity between {} and {}",
                    pair[0].end(),
                    pair[1].start()
                )));
            }
        }
        if closed {
            let last = segments.last().unwrap().end();
            let first = segments[0].start();
            if (last - first).norm() > 1e-9 * scale {
                return Err(ContourError::InvalidGeometry(
                    "closed contour does not return to its start".into(),
                ));
            }
        }
        Ok(Contour {
            segments,
            closed,
            truncation_radius: None,
        })
    }

    pub fn with_truncation_radius(mut self, radius: f64) -> Self {
        self.truncation_radius = Some(radius);
        self
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn truncation_radius(&self) -> Option<f64> {
        self.truncation_radius
    }

    pub fn reversed(&self) -> Self {
        Contour {
            segments: self.segments.iter().rev().map(|s| s.reversed()).collect(),
            closed: self.closed,
            truncation_radius: self.truncation_radius,
        }
    }

    /// Split an open contour at parameter `t` of segment `seg_idx`.
    pub fn split_at(&self, seg_idx: usize, t: f64) -> Result<(Self, Self), ContourError> {
        if seg_idx >= self.segments.len() {
            return Err(ContourError::InvalidGeometry(format!(
                "segment index {seg_idx} out of range"
            )));
        }
        let mut head: Vec<PathSegment> = self.segments[..seg_idx].to_vec();
        let mut tail: Vec<PathSegment> = Vec::new();
        if t <= 0.0 || t >= 1.0 {
            let at = if t <= 0.0 { seg_idx } else { seg_idx + 1 };
            head = self.segments[..at].to_vec();
            tail.extend_from_slice(&self.segments[at..]);
        } else {
            let (a, b) = self.segments[seg_idx].split(t);
            head.push(a);
            tail.push(b);
            tail.extend_from_slice(&self.segments[seg_idx + 1..]);
        }
        Ok((Contour::open(head)?, Contour::open(tail)?))
    }

    pub fn unit_circle() -> Self {
        Contour::closed(vec![PathSegment::arc(c64(0.0, 0.0), 1.0, 0.0, 2.0 * PI)]).unwrap()
    }

    pub fn circle(center: Complex64, radius: f64) -> Self {
        Contour::closed(vec![PathSegment::arc(center, radius, 0.0, 2.0 * PI)]).unwrap()
    }
}

/// Which side of the origin the path of `make_gamma_paths` passes on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Above,
    Below,
}

/// A path from −∞ to +∞ dodging the origin on a small circle, with the
/// branch of log that is continuous along it and vanishes at 1.
///
/// With ray rotation θ, the incoming ray carries arg = π−θ (`Above`) or
/// −π−θ (`Below`), the small arc interpolates, and the outgoing ray carries
/// arg = −θ; at θ = 0 this yields ln(−2) = ln 2 + iπ above and ln 2 − iπ
/// below.
#[derive(Debug, Clone)]
pub struct GammaPath {
    contour: Contour,
    side: Side,
    epsilon: f64,
    ray_angle: f64,
    truncation_radius: f64,
}

impl GammaPath {
    pub fn contour(&self) -> &Contour {
        &self.contour
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn ray_angle(&self) -> f64 {
        self.ray_angle
    }

    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    /// Argument of points on the incoming ray under this path's branch.
    pub fn incoming_arg(&self) -> f64 {
        match self.side {
            Side::Above => PI - self.ray_angle,
            Side::Below => -PI - self.ray_angle,
        }
    }

    /// Argument of points on the outgoing ray under this path's branch.
    pub fn outgoing_arg(&self) -> f64 {
        -self.ray_angle
    }

    /// Branch-correct logarithm on the small arc at angle parameter `psi`.
    pub fn arc_log(&self, psi: f64) -> Complex64 {
        c64(self.epsilon.ln(), psi)
    }
}

/// Builds Γ+ (passing above 0) and Γ− (below 0): each is the truncated ray
/// e^{i(π−angle)}[ε,R] inwards, a half circle of radius ε, and the ray
/// e^{−i·angle}[ε,R] outwards.
pub fn make_gamma_paths(
    epsilon: f64,
    ray_angle: f64,
    truncation_radius: f64,
) -> Result<(GammaPath, GammaPath), ContourError> {
    if !(epsilon > 0.0) || truncation_radius <= epsilon {
        return Err(ContourError::InvalidGeometry(format!(
            "need 0 < epsilon < truncation_radius, got ε={epsilon}, R={truncation_radius}"
        )));
    }
    if ray_angle.abs() >= PI / 2.0 {
        return Err(ContourError::InvalidGeometry(format!(
            "ray angle {ray_angle} outside (−π/2, π/2)"
        )));
    }
    let rot = c64(0.0, -ray_angle).exp();
    let build = |side: Side| -> Result<GammaPath, ContourError> {
        let in_from = rot * c64(-truncation_radius, 0.0);
        let in_to = rot * c64(-epsilon, 0.0);
        let out_from = rot * c64(epsilon, 0.0);
        let out_to = rot * c64(truncation_radius, 0.0);
        let (arc_from, arc_to) = match side {
            Side::Above => (PI - ray_angle, -ray_angle),
            Side::Below => (-PI - ray_angle, -ray_angle),
        };
        let segments = vec![
            PathSegment::line(in_from, in_to),
            PathSegment::arc(c64(0.0, 0.0), epsilon, arc_from, arc_to),
            PathSegment::line(out_from, out_to),
        ];
        Ok(GammaPath {
            contour: Contour::open(segments)?.with_truncation_radius(truncation_radius),
            side,
            epsilon,
            ray_angle,
            truncation_radius,
        })
    };
    Ok((build(Side::Above)?, build(Side::Below)?))
}

/// Outcome of an adaptive quadrature run. `error_estimate` is an
/// a-posteriori estimate, not a certificate.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

// 15-point Kronrod / 7-point Gauss pair (positive half, QUADPACK values).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

struct Panel {
    a: f64,
    b: f64,
    piece: usize,
    value: Complex64,
    error: f64,
    resabs: f64,
}

fn gauss_kronrod<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, piece: usize) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = Complex64::default();
    let mut gauss = Complex64::default();
    let mut resabs = 0.0_f64;
    let mut fv = [Complex64::default(); 15];
    for (j, &x) in XGK.iter().enumerate() {
        let (lo, hi) = (center - half * x, center + half * x);
        let flo = f(lo);
        if j == 7 {
            fv[7] = flo;
            kron += WGK[7] * flo;
            resabs += WGK[7] * flo.norm();
            if 7 % 2 == 1 {
                gauss += WG[3] * flo;
            }
            break;
        }
        let fhi = f(hi);
        fv[j] = flo;
        fv[14 - j] = fhi;
        kron += WGK[j] * (flo + fhi);
        resabs += WGK[j] * (flo.norm() + fhi.norm());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (flo + fhi);
        }
    }
    // j == 7 handled inside the loop; include Gauss center weight.
    gauss += WG[3] * fv[7];
    let mean = kron * 0.5;
    let mut resasc = WGK[7] * (fv[7] - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).norm() + (fv[14 - j] - mean).norm());
    }
    resasc *= half.abs();
    let value = kron * half;
    let raw_err = ((kron - gauss) * half).norm();
    let mut err = raw_err;
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let resabs = resabs * half.abs();
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Panel {
        a,
        b,
        piece,
        value,
        error: err,
        resabs,
    }
}

fn adapt(
    pieces: &[&dyn Fn(f64) -> Complex64],
    spans: &[(f64, f64)],
    rel_tol: f64,
) -> Result<QuadratureResult, ContourError> {
    if !(rel_tol > 1e-15 && rel_tol < 1e-2) {
        return Err(ContourError::InvalidTolerance(rel_tol));
    }
    let mut panels: Vec<Panel> = Vec::new();
    let mut evals = 0usize;
    for (i, &(a, b)) in spans.iter().enumerate() {
        panels.push(gauss_kronrod(&pieces[i], a, b, i));
        evals += 15;
    }
    loop {
        let total: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let resabs: f64 = panels.iter().map(|p| p.resabs).sum();
        let target = (rel_tol * total.norm()).max(rel_tol * 1e-2 * resabs).max(1e-305);
        if err <= target {
            return Ok(QuadratureResult {
                value: total,
                error_estimate: err,
                evaluations: evals,
            });
        }
        if evals + 30 > EVAL_BUDGET {
            return Err(ContourError::NonConvergence {
                value: total,
                error_estimate: err,
                evaluations: evals,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a, b, piece, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval exhausted by floating point; accept what we have.
            let total: Complex64 = panels.iter().map(|p| p.value).sum();
            let err: f64 = panels.iter().map(|p| p.error).sum();
            return Ok(QuadratureResult {
                value: total,
                error_estimate: err,
                evaluations: evals,
            });
        }
        let left = gauss_kronrod(&pieces[piece], a, mid, piece);
        let right = gauss_kronrod(&pieces[piece], mid, b, piece);
        evals += 30;
        panels[worst] = left;
        panels.push(right);
    }
}

/// Adaptive integral of a parametric complex integrand from `a` to `b`;
/// descending bounds give the oriented (negated) integral.
pub fn integrate_param<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<QuadratureResult, ContourError> {
    let g: &dyn Fn(f64) -> Complex64 = &f;
    if a > b {
        let mut q = adapt(&[g], &[(b, a)], rel_tol)?;
        q.value = -q.value;
        return Ok(q);
    }
    adapt(&[g], &[(a, b)], rel_tol)
}

/// Adaptive integral of `f` along `path`. Deterministic for fixed inputs.
pub fn integrate<F: Fn(Complex64) -> Complex64>(
    f: F,
    path: &Contour,
    rel_tol: f64,
) -> Result<QuadratureResult, ContourError> {
    let fref = &f;
    let closures: Vec<Box<dyn Fn(f64) -> Complex64 + '_>> = path
        .segments()
        .iter()
        .map(|seg| {
            let seg = *seg;
            let b: Box<dyn Fn(f64) -> Complex64 + '_> =
                Box::new(move |t| fref(seg.point(t)) * seg.velocity(t));
            b
        })
        .collect();
    let refs: Vec<&dyn Fn(f64) -> Complex64> = closures.iter().map(|b| b.as_ref()).collect();
    let spans: Vec<(f64, f64)> = path.segments().iter().map(|_| (0.0, 1.0)).collect();
    adapt(&refs, &spans, rel_tol)
}

/// Growth profile of the non-Gaussian factor of an integrand of the form
/// e^{−α(1+s/2)²}·(factor).
#[derive(Debug, Clone, Copy)]
pub enum FactorProfile {
    Unit,
    /// Factor bounded by |s|^p for large |s|.
    Power(u32),
}

/// Truncation radius R such that |e^{−α(1+s/2)²}·factor| < 1e−18 × its peak
/// for |s| ≥ R on the integration rays. Uses Re(α) in the bound and is
/// monotone decreasing in Re(α).
pub fn integrate_gaussian_tail_truncation(alpha: Complex64, profile: FactorProfile) -> f64 {
    assert!(alpha.re > 0.0, "Gaussian tail bound needs Re(alpha) > 0");
    let p = match profile {
        FactorProfile::Unit => 0.0,
        FactorProfile::Power(k) => k as f64,
    };
    let target = 18.0 * std::f64::consts::LN_10;
    // Solve Re(α)(R/2 − 1)² − p·ln R = target; the left side is eventually
    // increasing, so step out from the closed-form p=0 seed.
    let mut r = 2.0 * (1.0 + (target / alpha.re).sqrt());
    for _ in 0..200 {
        let margin = alpha.re * (0.5 * r - 1.0).powi(2) - p * r.max(2.0).ln();
        if margin >= target {
            break;
        }
        r *= 1.1;
    }
    1.2 * r
}
