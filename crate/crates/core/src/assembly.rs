//! Reduced density and position density from beams and pair coefficients.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fga::BeamSet;
use crate::inchworm::Coefficients;

/// Largest tolerated `|Im rho_kk|`.
pub const DIAGONAL_IMAG_TOL: f64 = 1e-10;

// Neumaier compensated sum
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

#[inline]
fn pair_term(rho: Complex64, psi1: Complex64, psi2: Complex64) -> f64 {
    (rho * (psi1 * psi2.conj())).re
}

/// Pairs whose Gaussian-product envelope can matter at step `n`, with
/// their coefficients, in ascending `(k1, k2)` order.
fn significant_pairs(beams: &BeamSet, coeffs: &Coefficients, n: usize) -> Vec<(usize, usize, Complex64)> {
    let eps = beams.eps;
    let w2 = beams.grid.weight().powi(2);
    let peak: Vec<f64> = beams.beams.iter().map(|b| b.peak(n, eps)).collect();
    let center: Vec<f64> = beams.beams.iter().map(|b| b.center(n)).collect();
    let k = beams.len();
    let scale = peak.iter().map(|a| w2 * a * a).fold(0.0, f64::max);
    // |psi_k1 psi_k2| <= A1 A2 exp(-(Q1 - Q2)^2 / (4 eps)) everywhere
    let cutoff = 1e-16 * scale / (k * (k + 1) / 2).max(1) as f64;
    let mut out = Vec::new();
    for k1 in 0..k {
        for k2 in k1 + 1..k {
            let rho = coeffs.get(k1, k2, n);
            let dq = center[k1] - center[k2];
            let bound = w2 * rho.norm() * peak[k1] * peak[k2] * (-dq * dq / (4.0 * eps)).exp();
            if bound >= cutoff {
                out.push((k1, k2, rho));
            }
        }
    }
    out
}

fn check_diagonal(coeffs: &Coefficients, n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..coeffs.beams() {
        worst = worst.max(coeffs.get(k, k, n).im.abs());
    }
    if worst > DIAGONAL_IMAG_TOL {
        return Err(Error::numerical(format!(
            "diagonal coefficient has imaginary part {worst:.3e} at step {n}"
        )));
    }
    Ok(worst)
}

fn beam_values(beams: &BeamSet, n: usize, x: f64, out: &mut Vec<Complex64>) {
    out.clear();
    out.extend(beams.beams.iter().map(|b| b.eval(n, x, beams.eps)));
}

/// `f(t_n, x) = rho_s(t_n, x, x)` at each `x`.
pub fn marginal_density(beams: &BeamSet, coeffs: &Coefficients, n: usize, xs: &[f64]) -> Result<Vec<f64>> {
    check_diagonal(coeffs, n)?;
    let pairs = significant_pairs(beams, coeffs, n);
    let w2 = beams.grid.weight().powi(2);
    let diag: Vec<f64> = (0..beams.len()).map(|k| coeffs.get(k, k, n).re).collect();
    Ok(xs
        .par_iter()
        .map_init(Vec::new, |psi, &x| {
            beam_values(beams, n, x, psi);
            let mut acc = Compensated::default();
            for (p, d) in psi.iter().zip(&diag) {
                acc.add(d * p.norm_sqr());
            }
            for &(k1, k2, rho) in &pairs {
                acc.add(2.0 * pair_term(rho, psi[k1], psi[k2]));
            }
            w2 * acc.value()
        })
        .collect())
}

/// `rho_s(t_n, x1, x2)` on the product grid, rows indexed by `x1`.
pub fn reduced_density(
    beams: &BeamSet,
    coeffs: &Coefficients,
    n: usize,
    x1s: &[f64],
    x2s: &[f64],
) -> Result<Vec<Vec<Complex64>>> {
    check_diagonal(coeffs, n)?;
    let pairs = significant_pairs(beams, coeffs, n);
    let w2 = beams.grid.weight().powi(2);
    let at = |xs: &[f64]| -> Vec<Vec<Complex64>> {
        xs.par_iter()
            .map(|&x| {
                let mut v = Vec::new();
                beam_values(beams, n, x, &mut v);
                v
            })
            .collect()
    };
    let psi1 = at(x1s);
    let psi2 = at(x2s);
    Ok(psi1
        .par_iter()
        .map(|a| {
            psi2.iter()
                .map(|b| {
                    let (mut re, mut im) = (Compensated::default(), Compensated::default());
                    let mut add = |z: Complex64| {
                        re.add(z.re);
                        im.add(z.im);
                    };
                    for k in 0..beams.len() {
                        add(coeffs.get(k, k, n).re * a[k] * b[k].conj());
                    }
                    for &(k1, k2, rho) in &pairs {
                        add(rho * a[k1] * b[k2].conj());
                        add(rho.conj() * a[k2] * b[k1].conj());
                    }
                    w2 * Complex64::new(re.value(), im.value())
                })
                .collect()
        })
        .collect())
}

/// Trapezoid integral of a density row over `xs`.
pub fn mass_diagnostic(f: &[f64], xs: &[f64]) -> f64 {
    f.windows(2)
        .zip(xs.windows(2))
        .map(|(v, x)| 0.5 * (v[0] + v[1]) * (x[1] - x[0]))
        .sum()
}

/// Densities at the requested steps plus normalization diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityResult {
    pub steps: Vec<usize>,
    pub times: Vec<f64>,
    pub x: Vec<f64>,
    /// One row per time.
    pub f: Vec<Vec<f64>>,
    /// `rho_s(x1, x2)` per time on the output grid, when requested.
    pub rho: Option<Vec<Vec<Vec<Complex64>>>>,
    pub mass: Vec<f64>,
    /// Largest `|Im rho_kk|` per time.
    pub imag_residue: Vec<f64>,
}

pub fn assemble(
    beams: &BeamSet,
    coeffs: &Coefficients,
    steps: &[usize],
    dt: f64,
    xs: &[f64],
    with_rho: bool,
) -> Result<DensityResult> {
    let mut f = Vec::with_capacity(steps.len());
    let mut rho = with_rho.then(Vec::new);
    let mut imag_residue = Vec::new();
    for &n in steps {
        imag_residue.push(check_diagonal(coeffs, n)?);
        f.push(marginal_density(beams, coeffs, n, xs)?);
        if let Some(r) = rho.as_mut() {
            r.push(reduced_density(beams, coeffs, n, xs, xs)?);
        }
    }
    let mass = f.iter().map(|row| mass_diagnostic(row, xs)).collect();
    Ok(DensityResult {
        steps: steps.to_vec(),
        times: steps.iter().map(|&n| n as f64 * dt).collect(),
        x: xs.to_vec(),
        f,
        rho,
        mass,
        imag_residue,
    })
}
