//! Discretized harmonic bath: mode list, two-point correlation and the
//! Wick-pairing sums built on it.

mod influence;
mod pairing;

pub use influence::bath_influence;
pub use pairing::{enumerate_pairings, is_linked, pairing_set, Pairing, PairingSet, PAIRING_GUARD};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Ohmic spectral density with exponential cutoff, before discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicSpec {
    pub xi: f64,
    pub omega_c: f64,
    pub omega_max: f64,
    pub modes: usize,
}

impl OhmicSpec {
    /// Mode frequencies and couplings.
    ///
    /// Frequencies sit at equal-mass quantiles of `exp(-w / omega_c)` on
    /// `(0, omega_max]`, so the last one is `omega_max`.
    pub fn discretize(&self, beta: f64, eps: f64) -> Result<BathSpec> {
        let OhmicSpec {
            xi,
            omega_c,
            omega_max,
            modes,
        } = *self;
        if !(xi >= 0.0) || !(omega_c > 0.0) || !(omega_max > 0.0) {
            return Err(Error::config(format!("invalid Ohmic parameters {self:?}")));
        }
        let tail = (-omega_max / omega_c).exp();
        let mass = 1.0 - tail;
        let scale = (xi * omega_c / modes as f64 * mass).sqrt();
        let (freqs, couplings): (Vec<f64>, Vec<f64>) = (1..=modes)
            .map(|j| {
                let r = j as f64 / modes as f64;
                let w = -omega_c * ((1.0 - r) + r * tail).ln();
                (w, eps * w * scale)
            })
            .unzip();
        BathSpec::new(freqs, couplings, beta, eps)
    }
}

/// A finite set of bath oscillators at inverse temperature `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct BathSpec {
    freqs: Vec<f64>,
    couplings: Vec<f64>,
    beta: f64,
    eps: f64,
    // per mode: c^2 / (2 eps w) and coth(beta eps w / 2)
    weight: Vec<f64>,
    coth: Vec<f64>,
}

impl BathSpec {
    pub fn new(freqs: Vec<f64>, couplings: Vec<f64>, beta: f64, eps: f64) -> Result<Self> {
        if freqs.len() != couplings.len() {
            return Err(Error::config("bath frequency and coupling lists differ in length"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::config(format!("bath.beta must be positive, got {beta}")));
        }
        if !(eps > 0.0) {
            return Err(Error::config("epsilon must be positive"));
        }
        if let Some(w) = freqs.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::config(format!("bath frequency {w} is not positive")));
        }
        if couplings.iter().any(|c| !c.is_finite()) {
            return Err(Error::config("bath couplings must be finite"));
        }
        let weight = freqs
            .iter()
            .zip(&couplings)
            .map(|(w, c)| c * c / (2.0 * eps * w))
            .collect();
        let coth = freqs.iter().map(|w| 1.0 / (0.5 * beta * eps * w).tanh()).collect();
        Ok(BathSpec {
            freqs,
            couplings,
            beta,
            eps,
            weight,
            coth,
        })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn is_uncoupled(&self) -> bool {
        self.couplings.iter().all(|&c| c == 0.0)
    }

    /// `sum_j c_j^2 / (2 w_j^2)`, the quadratic term the coupling adds to the
    /// system potential.
    pub fn counterterm(&self) -> f64 {
        self.freqs
            .iter()
            .zip(&self.couplings)
            .map(|(w, c)| c * c / (2.0 * w * w))
            .sum()
    }

    /// Stationary correlation `B~(dtau)`.
    pub fn correlation_tilde(&self, dtau: f64) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for ((&w, &g), &ct) in self.freqs.iter().zip(&self.weight).zip(&self.coth) {
            let (s, c) = (w * dtau).sin_cos();
            re += g * ct * c;
            im -= g * s;
        }
        Complex64::new(re, im)
    }

    /// Two-point correlation `B(t1, t2)` on the Keldysh contour, where negative
    /// times label the backward branch.
    pub fn correlation(&self, t1: f64, t2: f64) -> Complex64 {
        self.correlation_sided(t1.abs(), t2.abs(), t1 * t2 > 0.0)
    }

    /// `B` from branch distances `|t1|, |t2|` and whether both points lie on
    /// the same branch; this is how one-sided limits at `t = 0` are taken.
    pub fn correlation_sided(&self, abs1: f64, abs2: f64, same_branch: bool) -> Complex64 {
        let b = self.correlation_tilde(abs1 - abs2);
        if same_branch {
            b.conj()
        } else {
            b
        }
    }
}
