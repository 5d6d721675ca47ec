//! Numerical toolkit around the Grushin operator −∂x² − x²∂y²: Dirichlet
//! oscillator spectra on (−1,1), contour evaluation of the implicit
//! eigenvalue equation, sector symbols with analytic kernel continuation,
//! constructive polynomial approximation of poles, and observability
//! falsification experiments.

pub mod cli;
pub mod contour;
pub mod falsifier;
pub mod geometry;
pub mod implicit;
pub mod newton;
pub mod ode;
pub mod plot;
pub mod poly;
pub mod runge;
pub mod spectrum;
pub mod stphase;
pub mod symbols;

pub use num_complex::Complex64;

pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
