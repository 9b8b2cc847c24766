//! The full run: propagate beams, solve every pair, assemble densities.

use std::time::Instant;

use serde::Serialize;

use crate::assembly::{assemble, DensityResult};
use crate::bath::BathSpec;
use crate::error::Result;
use crate::fga::{BeamGrid, BeamSet};
use crate::inchworm::{solve_all_pairs, Coefficients, CorrelationLattice, Progress, TimeGrid};
use crate::model::{effective_potential, SimConfig};

/// Wall-clock seconds per phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Timing {
    pub propagate: f64,
    pub inchworm: f64,
    pub assemble: f64,
}

#[derive(Default, Clone, Copy)]
pub struct RunOptions<'a> {
    pub with_rho: bool,
    pub progress: Option<Progress<'a>>,
}

pub struct RunOutput {
    pub bath: BathSpec,
    pub beams: BeamSet,
    pub coeffs: Coefficients,
    pub density: DensityResult,
    pub timing: Timing,
}

pub fn propagate(cfg: &SimConfig, bath: &BathSpec) -> Result<BeamSet> {
    let psi0 = cfg.initial_state()?.mixture(cfg.epsilon)?;
    let v = effective_potential(&cfg.potential()?, bath);
    BeamSet::propagate(
        BeamGrid::from_config(cfg)?,
        &psi0,
        &v,
        cfg.time.dt_rk,
        cfg.substeps(),
        cfg.time.steps,
    )
}

pub fn lattice(cfg: &SimConfig, bath: &BathSpec) -> Result<CorrelationLattice> {
    Ok(CorrelationLattice::from_bath(TimeGrid::new(cfg.time.dt, cfg.time.steps)?, bath))
}

pub fn run(cfg: &SimConfig, opts: RunOptions<'_>) -> Result<RunOutput> {
    cfg.validate()?;
    let bath = cfg.ohmic().discretize(cfg.bath.beta, cfg.epsilon)?;
    let mut timing = Timing::default();

    let clock = Instant::now();
    let beams = propagate(cfg, &bath)?;
    timing.propagate = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let coeffs = solve_all_pairs(&beams, &lattice(cfg, &bath)?, cfg.inchworm.m_bar, opts.progress)?;
    timing.inchworm = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let density = assemble(
        &beams,
        &coeffs,
        &cfg.output_steps(),
        cfg.time.dt,
        &cfg.x_grid(),
        opts.with_rho,
    )?;
    timing.assemble = clock.elapsed().as_secs_f64();

    Ok(RunOutput {
        bath,
        beams,
        coeffs,
        density,
        timing,
    })
}

/// Closed-system spectral solution sampled at the output grid and times.
///
/// Uses the bare potential and a periodic box padded well beyond the output
/// range; the Strang step equals `time.dt_rk`.
pub fn spectral_reference(cfg: &SimConfig) -> Result<Vec<Vec<num_complex::Complex64>>> {
    use crate::spectral::{interpolate, sp2_evolve, SpatialGrid};
    let eps = cfg.epsilon;
    let pad = 10.0 * eps.sqrt();
    let (lo, hi) = (cfg.output.x_min - pad, cfg.output.x_max + pad);
    // 32 nodes per beam width; coarser grids alias in steep potentials
    let nx = (((hi - lo) * 32.0 / eps.sqrt()).ceil() as usize).next_power_of_two().max(64);
    let grid = SpatialGrid::new(lo, hi, nx)?;
    let psi0 = cfg.initial_state()?.mixture(eps)?;
    let substeps = cfg.substeps();
    let steps: Vec<usize> = cfg.output_steps().iter().map(|n| n * substeps).collect();
    let snapshots = sp2_evolve(grid.sample(|x| psi0.eval(x)), grid, &cfg.potential()?, eps, cfg.time.dt_rk, &steps)?;
    let xs = cfg.x_grid();
    Ok(snapshots.iter().map(|psi| interpolate(grid, psi, &xs)).collect())
}
