use crate::error::{Error, Result};
use crate::model::{whole_steps, SimConfig};

/// Uniform phase-space mesh of beam labels `(p, q)`.
///
/// Beam `k = kp * (nq + 1) + kq` sits at `(p_min + kp dp, q_min + kq dq)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGrid {
    p_min: f64,
    q_min: f64,
    dp: f64,
    dq: f64,
    np: usize,
    nq: usize,
}

impl BeamGrid {
    pub fn new(p_range: (f64, f64), dp: f64, q_range: (f64, f64), dq: f64) -> Result<Self> {
        let steps = |name: &str, (lo, hi): (f64, f64), h: f64| {
            if !(h > 0.0) || !(hi >= lo) {
                return Err(Error::config(format!("degenerate {name} range [{lo}, {hi}] with step {h}")));
            }
            whole_steps(hi - lo, h).ok_or_else(|| {
                Error::config(format!("{name} step {h} does not divide [{lo}, {hi}]"))
            })
        };
        Ok(BeamGrid {
            p_min: p_range.0,
            q_min: q_range.0,
            dp,
            dq,
            np: steps("p", p_range, dp)?,
            nq: steps("q", q_range, dq)?,
        })
    }

    pub fn from_config(cfg: &SimConfig) -> Result<Self> {
        let g = &cfg.grid;
        Self::new((g.p_min, g.p_max), g.dp, (g.q_min, g.q_max), g.dq)
    }

    /// Number of beams `K`.
    pub fn len(&self) -> usize {
        (self.np + 1) * (self.nq + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight shared by every beam.
    pub fn weight(&self) -> f64 {
        self.dp * self.dq
    }

    /// Intervals along p and q.
    pub fn divisions(&self) -> (usize, usize) {
        (self.np, self.nq)
    }

    pub fn index(&self, kp: usize, kq: usize) -> usize {
        debug_assert!(kp <= self.np && kq <= self.nq);
        kp * (self.nq + 1) + kq
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / (self.nq + 1), k % (self.nq + 1))
    }

    /// Initial `(p, q)` of beam `k`.
    pub fn label(&self, k: usize) -> (f64, f64) {
        let (kp, kq) = self.split(k);
        (self.p_min + kp as f64 * self.dp, self.q_min + kq as f64 * self.dq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn beam_counts() {
        let h = 1.0 / 32.0;
        assert_eq!(BeamGrid::new((-1.0, 3.0), h, (-2.0, 2.0), h).unwrap().len(), 16641);
        assert_eq!(BeamGrid::new((-2.0, 2.0), h, (-2.0, 2.0), h).unwrap().len(), 16641);
        let single = BeamGrid::new((0.5, 0.5), 0.1, (-0.25, -0.25), 0.1).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.label(0), (0.5, -0.25));
    }

    #[test]
    fn rejects_bad_steps() {
        assert!(BeamGrid::new((0.0, 1.0), 0.3, (0.0, 1.0), 0.25).is_err());
        assert!(BeamGrid::new((0.0, 1.0), 0.0, (0.0, 1.0), 0.25).is_err());
        assert!(BeamGrid::new((1.0, 0.0), 0.25, (0.0, 1.0), 0.25).is_err());
    }

    proptest! {
        #[test]
        fn index_map_is_a_bijection(np in 0usize..7, nq in 0usize..7) {
            let g = BeamGrid::new((0.0, np as f64 * 0.5), 0.5, (0.0, nq as f64 * 0.25), 0.25).unwrap();
            let mut seen = vec![false; g.len()];
            for kp in 0..=np {
                for kq in 0..=nq {
                    let k = g.index(kp, kq);
                    prop_assert!(!seen[k]);
                    seen[k] = true;
                    prop_assert_eq!(g.split(k), (kp, kq));
                }
            }
            prop_assert!(seen.into_iter().all(|s| s));
        }
    }
}
