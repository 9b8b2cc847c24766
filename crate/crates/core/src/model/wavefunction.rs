use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Initial system wavefunction `psi_0`.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// `(2 pi s2)^(-1/4) exp(-(x - q0)^2 / (4 s2) + i p0 (x - q0) / eps)` with
    /// `s2 = width * eps`. `width = 2` is the packet
    /// `(4 pi eps)^(-1/4) exp(i p0 x / eps - x^2 / (8 eps))`.
    Gaussian {
        q0: f64,
        p0: f64,
        width: f64,
    },
    /// `C (exp(-(x - 1/2)^2 / (4 eps)) + 4/5 exp(-(x + 1/2)^2 / (4 eps)))`.
    TwoPeak,
}

/// One term `amp * exp(-alpha (x - center)^2 + i momentum (x - center) / eps)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianTerm {
    pub amp: Complex64,
    pub center: f64,
    pub momentum: f64,
    pub alpha: f64,
}

/// A finite sum of Gaussian terms at a fixed `eps`; every supported initial
/// state has this form, which is what makes the beam overlaps closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    pub eps: f64,
    pub terms: Vec<GaussianTerm>,
}

impl GaussianMixture {
    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                let d = x - t.center;
                t.amp * Complex64::new(-t.alpha * d * d, t.momentum * d / self.eps).exp()
            })
            .sum()
    }

    /// Rough half-width of the support, used to size quadrature windows.
    pub fn extent(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in &self.terms {
            let w = 10.0 / t.alpha.sqrt();
            lo = lo.min(t.center - w);
            hi = hi.max(t.center + w);
        }
        (lo, hi)
    }
}

impl InitialState {
    pub fn mixture(&self, eps: f64) -> Result<GaussianMixture> {
        if !(eps > 0.0) {
            return Err(Error::config("epsilon must be positive"));
        }
        let terms = match *self {
            InitialState::Gaussian { q0, p0, width } => {
                if !(width > 0.0) {
                    return Err(Error::config("psi0.width must be positive"));
                }
                let s2 = width * eps;
                vec![GaussianTerm {
                    amp: Complex64::new((2.0 * PI * s2).powf(-0.25), 0.0),
                    center: q0,
                    momentum: p0,
                    alpha: 1.0 / (4.0 * s2),
                }]
            }
            InitialState::TwoPeak => {
                let c = two_peak_normalization(eps)?;
                let alpha = 1.0 / (4.0 * eps);
                vec![
                    GaussianTerm {
                        amp: Complex64::new(c, 0.0),
                        center: 0.5,
                        momentum: 0.0,
                        alpha,
                    },
                    GaussianTerm {
                        amp: Complex64::new(0.8 * c, 0.0),
                        center: -0.5,
                        momentum: 0.0,
                        alpha,
                    },
                ]
            }
        };
        Ok(GaussianMixture { eps, terms })
    }
}

/// Normalization constant of the two-peak state,
/// `5 (41 + 40 e^{-1/(8 eps)})^{-1/2} (2 pi eps)^{-1/4}`.
pub fn two_peak_normalization(eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::config("epsilon must be positive"));
    }
    Ok(5.0 / (41.0 + 40.0 * (-1.0 / (8.0 * eps)).exp()).sqrt() * (2.0 * PI * eps).powf(-0.25))
}
