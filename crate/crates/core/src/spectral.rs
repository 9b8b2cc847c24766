//! Strang-split Fourier solver for the closed semiclassical Schrödinger
//! equation `i eps dpsi/dt = -eps^2/2 psi'' + V psi`, the uncoupled reference.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::Potential;

/// Largest `|psi|` tolerated at the ends of the periodic box.
pub const BOUNDARY_GUARD: f64 = 1e-12;

/// Periodic grid `x_i = x_min + i (x_max - x_min) / nx`, `i < nx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
}

impl SpatialGrid {
    pub fn new(x_min: f64, x_max: f64, nx: usize) -> Result<Self> {
        if !nx.is_power_of_two() || nx < 2 || !(x_max > x_min) {
            return Err(Error::config(format!(
                "spectral grid needs x_max > x_min and a power-of-two size, got [{x_min}, {x_max}] with {nx}"
            )));
        }
        Ok(SpatialGrid { x_min, x_max, nx })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x_min + i as f64 * self.spacing()).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.nx as i64;
        let base = 2.0 * PI / (self.x_max - self.x_min);
        (0..n).map(|l| base * (if l < n / 2 { l } else { l - n }) as f64).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        self.nodes().into_iter().map(f).collect()
    }
}

/// `e^{i theta}` with `cos` and `sin` nudged by at most one ulp so that
/// `c^2 + s^2` is as close to one as the representation allows; a fixed
/// per-node modulus bias would otherwise grow linearly with the step count.
fn unit_phase(theta: f64) -> Complex64 {
    let (s0, c0) = theta.sin_cos();
    let defect = |c: f64, s: f64| c.mul_add(c, s.mul_add(s, -1.0)).abs();
    let nudge = |v: f64| [v.next_down(), v, v.next_up()];
    let mut best = (defect(c0, s0), c0, s0);
    for c in nudge(c0) {
        for s in nudge(s0) {
            let d = defect(c, s);
            if d < best.0 {
                best = (d, c, s);
            }
        }
    }
    Complex64::new(best.1, best.2)
}

/// One Strang step `e^{-iV dt/(2eps)} e^{-i eps k^2 dt/2} e^{-iV dt/(2eps)}`,
/// planned once for a fixed grid, potential and step.
pub struct Sp2Stepper {
    grid: SpatialGrid,
    half_potential: Vec<Complex64>,
    kinetic: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Sp2Stepper {
    pub fn new(grid: SpatialGrid, v: &Potential, eps: f64, dt: f64) -> Self {
        let half_potential = grid
            .nodes()
            .iter()
            .map(|&x| unit_phase(-v.value(x) * dt / (2.0 * eps)))
            .collect();
        // the inverse transform's 1/nx is folded into the kinetic factor
        let scale = 1.0 / grid.nx as f64;
        let kinetic = grid
            .wavenumbers()
            .iter()
            .map(|&k| unit_phase(-eps * k * k * dt / 2.0) * scale)
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.nx);
        let inverse = planner.plan_fft_inverse(grid.nx);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Sp2Stepper {
            grid,
            half_potential,
            kinetic,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn step(&mut self, psi: &mut [Complex64]) {
        assert_eq!(psi.len(), self.grid.nx);
        for (p, h) in psi.iter_mut().zip(&self.half_potential) {
            *p *= h;
        }
        self.forward.process_with_scratch(psi, &mut self.scratch);
        for (p, k) in psi.iter_mut().zip(&self.kinetic) {
            *p *= k;
        }
        self.inverse.process_with_scratch(psi, &mut self.scratch);
        for (p, h) in psi.iter_mut().zip(&self.half_potential) {
            *p *= h;
        }
    }
}

/// Single Strang step; see [`Sp2Stepper`] for repeated use.
pub fn sp2_step(psi: &mut [Complex64], grid: SpatialGrid, v: &Potential, eps: f64, dt: f64) {
    Sp2Stepper::new(grid, v, eps, dt).step(psi);
}

/// Evolves `psi` with step `dt`, returning snapshots after each entry of
/// `output_steps` (ascending step counts).
///
/// Fails if the wave reaches the box edges at any snapshot.
pub fn sp2_evolve(
    mut psi: Vec<Complex64>,
    grid: SpatialGrid,
    v: &Potential,
    eps: f64,
    dt: f64,
    output_steps: &[usize],
) -> Result<Vec<Vec<Complex64>>> {
    let mut stepper = Sp2Stepper::new(grid, v, eps, dt);
    let mut done = 0;
    let mut out = Vec::with_capacity(output_steps.len());
    for &target in output_steps {
        if target < done {
            return Err(Error::config("spectral output steps must be ascending"));
        }
        while done < target {
            stepper.step(&mut psi);
            done += 1;
        }
        let edge = psi[0].norm().max(psi[grid.nx - 1].norm());
        if edge >= BOUNDARY_GUARD {
            return Err(Error::numerical(format!(
                "spectral box too small: |psi| = {edge:.3e} at the boundary after {target} steps"
            )));
        }
        out.push(psi.clone());
    }
    Ok(out)
}

/// Trigonometric interpolant of periodic samples, evaluated at arbitrary
/// points.
pub fn interpolate(grid: SpatialGrid, psi: &[Complex64], xs: &[f64]) -> Vec<Complex64> {
    let mut coeffs = psi.to_vec();
    FftPlanner::new().plan_fft_forward(grid.nx).process(&mut coeffs);
    let n = grid.nx;
    let ks = grid.wavenumbers();
    xs.iter()
        .map(|&x| {
            let d = x - grid.x_min;
            let mut s = Complex64::new(0.0, 0.0);
            for (l, (c, &k)) in coeffs.iter().zip(&ks).enumerate() {
                if l == n / 2 {
                    // split the Nyquist mode symmetrically so real data stays real
                    s += c * (k * d).cos();
                } else {
                    s += c * Complex64::new(0.0, k * d).exp();
                }
            }
            s / n as f64
        })
        .collect()
}

pub fn l2_norm(grid: &SpatialGrid, psi: &[Complex64]) -> f64 {
    (psi.iter().map(|p| p.norm_sqr()).sum::<f64>() * grid.spacing()).sqrt()
}
