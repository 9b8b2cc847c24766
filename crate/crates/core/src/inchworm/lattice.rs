use num_complex::Complex64;

use super::{Branch, TimeGrid};
use crate::bath::BathSpec;

/// Two-point correlation `B` tabulated on every pair of extended nodes.
///
/// Entries depend only on the stationary kernel `B~(|t1| - |t2|)` and on
/// whether the two nodes share a branch, so any kernel can be plugged in.
#[derive(Debug, Clone)]
pub struct CorrelationLattice {
    grid: TimeGrid,
    len: usize,
    values: Vec<Complex64>,
    vanishing: bool,
}

impl CorrelationLattice {
    pub fn new(grid: TimeGrid, kernel: impl Fn(f64) -> Complex64) -> Self {
        let n = grid.steps() as i64;
        // kernel at |t1| - |t2| = d dt, d = -N..=N
        let tilde: Vec<Complex64> = (-n..=n).map(|d| kernel(grid.time(d))).collect();
        let len = grid.ext_len();
        let mut values = Vec::with_capacity(len * len);
        for e1 in 0..len {
            for e2 in 0..len {
                let d = grid.grid_index(e1).abs() - grid.grid_index(e2).abs();
                let b = tilde[(d + n) as usize];
                values.push(if grid.branch(e1) == grid.branch(e2) { b.conj() } else { b });
            }
        }
        let vanishing = values.iter().all(|b| *b == Complex64::new(0.0, 0.0));
        CorrelationLattice {
            grid,
            len,
            values,
            vanishing,
        }
    }

    pub fn from_bath(grid: TimeGrid, bath: &BathSpec) -> Self {
        Self::new(grid, |d| bath.correlation_tilde(d))
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    #[inline]
    pub fn get(&self, e1: usize, e2: usize) -> Complex64 {
        self.values[e1 * self.len + e2]
    }

    /// True when every entry is exactly zero.
    pub fn is_vanishing(&self) -> bool {
        self.vanishing
    }

    /// `B` between grid nodes `j1, j2` taken on explicit sides.
    pub fn at(&self, j1: i64, s1: Branch, j2: i64, s2: Branch) -> Complex64 {
        self.get(self.grid.ext(j1, s1), self.grid.ext(j2, s2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::OhmicSpec;

    #[test]
    fn matches_direct_correlation_away_from_zero() {
        let grid = TimeGrid::new(0.2, 6).unwrap();
        let bath = OhmicSpec {
            xi: 0.8,
            omega_c: 2.5,
            omega_max: 10.0,
            modes: 50,
        }
        .discretize(5.0, 1.0 / 16.0)
        .unwrap();
        let lat = CorrelationLattice::from_bath(grid, &bath);
        for j1 in -6i64..=6 {
            for j2 in -6i64..=6 {
                if j1 == 0 || j2 == 0 {
                    continue;
                }
                let side = |j: i64| if j < 0 { Branch::Backward } else { Branch::Forward };
                let direct = bath.correlation(grid.time(j1), grid.time(j2));
                assert!((lat.at(j1, side(j1), j2, side(j2)) - direct).norm() < 1e-14);
            }
        }
        // at zero the side decides the branch
        let b0 = bath.correlation_tilde(-0.4);
        assert!((lat.at(0, Branch::Forward, 2, Branch::Forward) - b0.conj()).norm() < 1e-14);
        assert!((lat.at(0, Branch::Backward, 2, Branch::Forward) - b0).norm() < 1e-14);
        assert!(!lat.is_vanishing());
    }

    #[test]
    fn zero_kernel_is_flagged() {
        let grid = TimeGrid::new(0.2, 3).unwrap();
        assert!(CorrelationLattice::new(grid, |_| Complex64::new(0.0, 0.0)).is_vanishing());
    }
}
