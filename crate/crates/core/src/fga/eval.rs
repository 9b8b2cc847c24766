use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::{propagate_beam, y_overlap, BeamGrid, BeamState, BeamTrajectory};
use crate::error::Result;
use crate::model::{GaussianMixture, Potential};

/// `psi_k(t, x)` for a beam in state `s` with initial-state overlap `overlap`.
pub fn eval_beam(s: &BeamState, overlap: Complex64, x: f64, eps: f64) -> Complex64 {
    let d = x - s.position;
    let norm = (2.0 * PI * eps).powf(-1.5);
    let phase = Complex64::new(-0.5 * d * d / eps, (s.action + s.momentum * d) / eps).exp();
    s.amplitude * overlap * phase * norm
}

/// One propagated beam: its label, its overlap with the initial state, and
/// its trajectory sampled on the coarse time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Beam {
    pub label: (f64, f64),
    pub overlap: Complex64,
    pub trajectory: BeamTrajectory,
}

impl Beam {
    pub fn center(&self, n: usize) -> f64 {
        self.trajectory.at(n).position
    }

    pub fn eval(&self, n: usize, x: f64, eps: f64) -> Complex64 {
        eval_beam(self.trajectory.at(n), self.overlap, x, eps)
    }

    /// Envelope modulus at the center, `(2 pi eps)^{-3/2} |a| |c|`.
    pub fn peak(&self, n: usize, eps: f64) -> f64 {
        (2.0 * PI * eps).powf(-1.5) * self.trajectory.at(n).amplitude.norm() * self.overlap.norm()
    }
}

/// All beams of a grid, propagated to the same horizon.
#[derive(Debug, Clone)]
pub struct BeamSet {
    pub grid: BeamGrid,
    pub eps: f64,
    pub beams: Vec<Beam>,
}

impl BeamSet {
    /// Decomposes `psi0` on `grid` and propagates every beam under `v` for
    /// `steps` coarse steps of `substeps` Heun steps of size `h`.
    pub fn propagate(
        grid: BeamGrid,
        psi0: &GaussianMixture,
        v: &Potential,
        h: f64,
        substeps: usize,
        steps: usize,
    ) -> Result<Self> {
        let beams = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (p, q) = grid.label(k);
                let trajectory =
                    propagate_beam(BeamState::initial(p, q), v, h, steps * substeps, substeps, k)?;
                Ok(Beam {
                    label: (p, q),
                    overlap: y_overlap(psi0, p, q),
                    trajectory,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BeamSet {
            grid,
            eps: psi0.eps,
            beams,
        })
    }

    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }

    /// Number of stored coarse steps after `t = 0`.
    pub fn steps(&self) -> usize {
        self.beams.first().map_or(0, |b| b.trajectory.states.len() - 1)
    }

    /// `sum_k w_k psi_k(t_n, x)`.
    pub fn eval_fga(&self, n: usize, x: f64) -> Complex64 {
        let w = self.grid.weight();
        self.beams.iter().map(|b| b.eval(n, x, self.eps)).sum::<Complex64>() * w
    }
}
