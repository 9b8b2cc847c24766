use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::atomic::{AtomicUsize, Ordering};

use super::{CorrelationLattice, PairCenters, PairSolver};
use crate::error::{Error, Result};
use crate::fga::BeamSet;

/// Coefficients `rho_{k1 k2}(n dt) = G_{k1 k2}(-n dt, n dt)` for every beam
/// pair, stored for `k1 <= k2` only.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    beams: usize,
    steps: usize,
    data: Vec<Complex64>,
}

impl Coefficients {
    /// All coefficients equal to one, the uncoupled answer.
    pub fn uncoupled(beams: usize, steps: usize) -> Self {
        Coefficients {
            beams,
            steps,
            data: vec![Complex64::new(1.0, 0.0); pair_count(beams) * (steps + 1)],
        }
    }

    pub fn beams(&self) -> usize {
        self.beams
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn stored_pairs(&self) -> usize {
        pair_count(self.beams)
    }

    /// `rho_{k1 k2}(n dt)`, using `rho_{k2 k1} = conj(rho_{k1 k2})` for `k1 > k2`.
    #[inline]
    pub fn get(&self, k1: usize, k2: usize, n: usize) -> Complex64 {
        if k1 <= k2 {
            self.data[pair_index(self.beams, k1, k2) * (self.steps + 1) + n]
        } else {
            self.get(k2, k1, n).conj()
        }
    }

    /// Checked form of [`Self::get`].
    pub fn full_propagator(&self, k1: usize, k2: usize, n: usize) -> Result<Complex64> {
        if k1 >= self.beams || k2 >= self.beams || n > self.steps {
            return Err(Error::numerical(format!(
                "coefficient ({k1}, {k2}, {n}) outside {} beams and {} steps",
                self.beams, self.steps
            )));
        }
        Ok(self.get(k1, k2, n))
    }

    /// Stored pairs `(k1, k2)` with `k1 <= k2`, in storage order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.beams).flat_map(move |k1| (k1..self.beams).map(move |k2| (k1, k2)))
    }
}

pub fn pair_count(beams: usize) -> usize {
    beams * (beams + 1) / 2
}

#[inline]
fn pair_index(beams: usize, k1: usize, k2: usize) -> usize {
    k1 * (2 * beams - k1 + 1) / 2 + (k2 - k1)
}

/// Progress callback: `(pairs done, pairs total)`.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

/// Solves every pair `k1 <= k2` in parallel.
pub fn solve_all_pairs(
    beams: &BeamSet,
    lattice: &CorrelationLattice,
    m_bar: usize,
    progress: Option<Progress<'_>>,
) -> Result<Coefficients> {
    let n = lattice.grid().steps();
    if beams.steps() < n {
        return Err(Error::numerical(format!(
            "beams were propagated for {} steps, the time grid needs {n}",
            beams.steps()
        )));
    }
    let k = beams.len();
    let centers: Vec<Vec<f64>> = beams
        .beams
        .iter()
        .map(|b| (0..=n).map(|j| b.center(j)).collect())
        .collect();
    PairSolver::new(lattice, m_bar)?;
    let mut out = Coefficients::uncoupled(k, n);
    if lattice.is_vanishing() {
        return Ok(out);
    }
    let pairs: Vec<(usize, usize)> = out.pairs().collect();
    let total = pairs.len();
    let done = AtomicUsize::new(0);
    let every = (total / 200).max(1);
    out.data
        .par_chunks_mut(n + 1)
        .zip(pairs.par_iter())
        .try_for_each_init(
            || PairSolver::new(lattice, m_bar).expect("checked above"),
            |solver, (slot, &(k1, k2))| {
                let c = PairCenters {
                    forward: &centers[k1],
                    backward: &centers[k2],
                };
                solver.solve(c, (k1, k2))?;
                solver.anti_diagonal_into(slot);
                let d = done.fetch_add(1, Ordering::Relaxed) + 1;
                if let Some(report) = progress {
                    if d % every == 0 || d == total {
                        report(d, total);
                    }
                }
                Ok::<(), Error>(())
            },
        )?;
    Ok(out)
}
