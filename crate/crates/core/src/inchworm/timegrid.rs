use crate::error::{Error, Result};

/// Symmetric time grid `t_j = j dt`, `j = -N..=N`, on the Keldysh contour.
///
/// Quadrature works on an extended node list in which `t = 0` appears twice,
/// once as the end of the backward branch (`0-`) and once as the start of the
/// forward branch (`0+`), with zero spacing in between. Trapezoid weights on
/// that list split every integral at zero automatically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    n: usize,
}

/// Which side of `t = 0` a quadrature node belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `t < 0`, and `0-`.
    Backward,
    /// `t > 0`, and `0+`.
    Forward,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Backward => -1.0,
            Branch::Forward => 1.0,
        }
    }
}

impl TimeGrid {
    pub fn new(dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) || n == 0 {
            return Err(Error::config(format!("time grid needs dt > 0 and N >= 1, got dt = {dt}, N = {n}")));
        }
        Ok(TimeGrid { dt, n })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.n
    }

    pub fn time(&self, j: i64) -> f64 {
        j as f64 * self.dt
    }

    /// Length of the extended node list, `2N + 2`.
    pub fn ext_len(&self) -> usize {
        2 * self.n + 2
    }

    /// Extended index of grid node `j` on the given side; the side only
    /// matters at `j = 0`.
    pub fn ext(&self, j: i64, side: Branch) -> usize {
        let n = self.n as i64;
        debug_assert!(j.abs() <= n);
        let e = match (j.signum(), side) {
            (-1, _) | (0, Branch::Backward) => j + n,
            _ => j + n + 1,
        };
        e as usize
    }

    /// Grid index of an extended node.
    pub fn grid_index(&self, e: usize) -> i64 {
        let n = self.n as i64;
        let e = e as i64;
        if e <= n {
            e - n
        } else {
            e - n - 1
        }
    }

    pub fn branch(&self, e: usize) -> Branch {
        if e <= self.n {
            Branch::Backward
        } else {
            Branch::Forward
        }
    }

    /// Spacing between extended nodes `e` and `e + 1`.
    pub fn gap(&self, e: usize) -> f64 {
        if e == self.n {
            0.0
        } else {
            self.dt
        }
    }

    /// Trapezoid weight of node `e` for an integral over `[lo, hi]`.
    #[inline]
    pub fn weight(&self, e: usize, lo: usize, hi: usize) -> f64 {
        let left = if e > lo { self.gap(e - 1) } else { 0.0 };
        let right = if e < hi { self.gap(e) } else { 0.0 };
        0.5 * (left + right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_nodes_round_trip() {
        let g = TimeGrid::new(0.1, 3).unwrap();
        assert_eq!(g.ext_len(), 8);
        let mut seen = Vec::new();
        for e in 0..g.ext_len() {
            let j = g.grid_index(e);
            assert_eq!(g.ext(j, g.branch(e)), e);
            seen.push((j, g.branch(e)));
        }
        assert_eq!(seen[3], (0, Branch::Backward));
        assert_eq!(seen[4], (0, Branch::Forward));
        assert_eq!(g.ext(-2, Branch::Forward), 1);
        assert_eq!(g.ext(2, Branch::Backward), 6);
    }

    #[test]
    fn weights_split_at_zero() {
        let g = TimeGrid::new(0.5, 2).unwrap();
        let (lo, hi) = (0, g.ext_len() - 1);
        let total: f64 = (lo..=hi).map(|e| g.weight(e, lo, hi)).sum();
        assert!((total - 2.0).abs() < 1e-15);
        // both copies of zero carry half a step, one per side
        assert_eq!(g.weight(2, lo, hi), 0.25);
        assert_eq!(g.weight(3, lo, hi), 0.25);
        assert_eq!(g.weight(0, lo, hi), 0.25);
        // an interval ending at 0+ sees zero only from the left
        assert_eq!(g.weight(3, 0, 3), 0.0);
        assert_eq!(g.weight(2, 0, 3), 0.25);
        assert_eq!(g.weight(2, 2, 3), 0.0);
    }

    #[test]
    fn rejects_empty_grid() {
        assert!(TimeGrid::new(0.1, 0).is_err());
        assert!(TimeGrid::new(0.0, 3).is_err());
    }
}
