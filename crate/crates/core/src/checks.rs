//! Fast self-checks run by `fga-inchworm validate`.

use std::f64::consts::SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::bath::{pairing_set, OhmicSpec};
use crate::error::Result;
use crate::fga::{propagate_beam, BeamGrid, BeamSet, BeamState};
use crate::inchworm::{solve_all_pairs, solve_pair, CorrelationLattice, PairCenters, TimeGrid};
use crate::model::{InitialState, Potential};
use crate::spectral::{l2_norm, SpatialGrid, Sp2Stepper};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: String,
    pub pass: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{tag}  {:<28} {}", self.name, self.measured)
    }
}

fn check(name: &'static str, pass: bool, measured: String) -> Check {
    Check { name, measured, pass }
}

/// Linked pairing counts for 2, 4, 6, 8 points.
pub fn linked_counts() -> Result<Check> {
    let counts = (1..=4)
        .map(|n| pairing_set(2 * n).map(|s| s.linked().len()))
        .collect::<Result<Vec<_>>>()?;
    let text = counts.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    Ok(check("linked pairing counts", counts == [1, 1, 4, 27], text))
}

/// Drift of `|a|` from `sqrt 2` and the worst deviation from the exact
/// harmonic beam over `t <= 5`.
pub fn harmonic_beam() -> Result<Check> {
    let h = 1e-3;
    let steps = 5000;
    let v = Potential::Quadratic { coeff: 0.5 };
    let tr = propagate_beam(BeamState::initial(1.0, 0.0), &v, h, steps, 1, 0)?;
    let (mut drift, mut err) = (0.0f64, 0.0f64);
    for (n, s) in tr.states.iter().enumerate() {
        let t = tr.time(n);
        let a = SQRT_2 * Complex64::new(0.0, -0.5 * t).exp();
        drift = drift.max((s.amplitude.norm() - SQRT_2).abs());
        err = err
            .max((s.position - t.sin()).abs())
            .max((s.momentum - t.cos()).abs())
            .max((s.action - (2.0 * t).sin() / 4.0).abs())
            .max((s.amplitude - a).norm());
    }
    Ok(check(
        "harmonic beam analytics",
        err <= 1e-6,
        format!("|a| drift {drift:.2e}, max error {err:.2e}"),
    ))
}

/// Pair solutions with the beams swapped, compared through conjugation on a
/// 3x3 beam grid.
pub fn conjugate_symmetry() -> Result<Check> {
    let eps = 1.0 / 16.0;
    let bath = OhmicSpec { xi: 0.4, omega_c: 2.5, omega_max: 10.0, modes: 400 }.discretize(5.0, eps)?;
    let v = crate::model::effective_potential(&Potential::Quadratic { coeff: 0.5 }, &bath);
    let psi = InitialState::Gaussian { q0: 0.0, p0: 0.25, width: 2.0 }.mixture(eps)?;
    let grid = BeamGrid::new((-0.25, 0.75), 0.5, (-0.5, 0.5), 0.5)?;
    let (dt, n) = (0.125, 8);
    let beams = BeamSet::propagate(grid, &psi, &v, 0.005, 25, n)?;
    let lat = CorrelationLattice::from_bath(TimeGrid::new(dt, n)?, &bath);
    let centers: Vec<Vec<f64>> = beams.beams.iter().map(|b| (0..=n).map(|j| b.center(j)).collect()).collect();
    let mut worst = 0.0f64;
    for k1 in 0..beams.len() {
        for k2 in 0..beams.len() {
            let a = solve_pair(&lat, PairCenters { forward: &centers[k1], backward: &centers[k2] }, 1)?;
            let b = solve_pair(&lat, PairCenters { forward: &centers[k2], backward: &centers[k1] }, 1)?;
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x - y.conj()).norm());
            }
        }
    }
    Ok(check("conjugate symmetry (3x3)", worst <= 1e-10, format!("max deviation {worst:.2e}")))
}

/// Zero coupling: every coefficient is one and the density is `|psi|^2`.
pub fn uncoupled_reduction() -> Result<Check> {
    let eps = 1.0 / 8.0;
    let bath = OhmicSpec { xi: 0.0, omega_c: 2.5, omega_max: 10.0, modes: 400 }.discretize(5.0, eps)?;
    let psi = InitialState::Gaussian { q0: 0.0, p0: 0.25, width: 2.0 }.mixture(eps)?;
    let grid = BeamGrid::new((-1.0, 1.5), 0.25, (-1.5, 1.5), 0.25)?;
    let n = 4;
    let beams = BeamSet::propagate(grid, &psi, &Potential::Quadratic { coeff: 0.5 }, 0.01, 25, n)?;
    let lat = CorrelationLattice::from_bath(TimeGrid::new(0.25, n)?, &bath);
    let coeffs = solve_all_pairs(&beams, &lat, 1, None)?;
    let one = Complex64::new(1.0, 0.0);
    let coeff_dev = coeffs
        .pairs()
        .flat_map(|(a, b)| (0..=n).map(move |j| (a, b, j)))
        .map(|(a, b, j)| (coeffs.get(a, b, j) - one).norm())
        .fold(0.0, f64::max);
    let xs: Vec<f64> = (0..=80).map(|i| -2.0 + 0.05 * i as f64).collect();
    let f = crate::assembly::marginal_density(&beams, &coeffs, n, &xs)?;
    let density_dev = xs
        .iter()
        .zip(&f)
        .map(|(&x, v)| (v - beams.eval_fga(n, x).norm_sqr()).abs())
        .fold(0.0, f64::max);
    Ok(check(
        "zero-coupling reduction",
        coeff_dev == 0.0 && density_dev <= 1e-12,
        format!("|G - 1| {coeff_dev:.1e}, density deviation {density_dev:.2e}"),
    ))
}

/// Norm drift of the spectral reference over 10^4 steps.
pub fn spectral_unitarity() -> Result<Check> {
    let eps = 1.0 / 16.0;
    let grid = SpatialGrid::new(-4.0, 4.0, 256)?;
    let psi0 = InitialState::Gaussian { q0: 0.0, p0: 0.25, width: 2.0 }.mixture(eps)?;
    let mut psi = grid.sample(|x| psi0.eval(x));
    let start = l2_norm(&grid, &psi);
    let mut stepper = Sp2Stepper::new(grid, &Potential::Quadratic { coeff: 0.5 }, eps, 1e-3);
    for _ in 0..10_000 {
        stepper.step(&mut psi);
    }
    let drift = (l2_norm(&grid, &psi) - start).abs();
    Ok(check("spectral unitarity", drift < 1e-12, format!("norm drift {drift:.2e}")))
}

pub fn run_all() -> Result<Vec<Check>> {
    Ok(vec![
        linked_counts()?,
        harmonic_beam()?,
        conjugate_symmetry()?,
        uncoupled_reduction()?,
        spectral_unitarity()?,
    ])
}
