use num_complex::Complex64;

use super::{Branch, CorrelationLattice, TimeGrid};
use crate::bath::{pairing_set, PairingSet};
use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Beam centers seen by the pair `(k1, k2)` at the grid times `j dt`,
/// `j = 0..=N`: `forward` belongs to `k1` (positive times), `backward` to
/// `k2` (negative times, read at `|t|`).
#[derive(Debug, Clone, Copy)]
pub struct PairCenters<'a> {
    pub forward: &'a [f64],
    pub backward: &'a [f64],
}

/// Full propagators `G(a dt, b dt)` for `-N <= a <= b <= N` of one pair.
#[derive(Debug, Clone, Default)]
pub struct PropagatorTable {
    n: i64,
    side: usize,
    values: Vec<Complex64>,
}

impl PropagatorTable {
    fn new(n: usize) -> Self {
        let side = 2 * n + 1;
        PropagatorTable {
            n: n as i64,
            side,
            values: vec![ONE; side * side],
        }
    }

    #[inline]
    fn slot(&self, a: i64, b: i64) -> usize {
        (a + self.n) as usize * self.side + (b + self.n) as usize
    }

    /// `G(a dt, b dt)`; requires `a <= b`.
    #[inline]
    pub fn get(&self, a: i64, b: i64) -> Complex64 {
        debug_assert!(a <= b);
        self.values[self.slot(a, b)]
    }

    #[inline]
    fn set(&mut self, a: i64, b: i64, v: Complex64) {
        let s = self.slot(a, b);
        self.values[s] = v;
    }

    pub fn steps(&self) -> usize {
        self.n as usize
    }

    /// `G(-n dt, n dt)` for `n = 0..=N`.
    pub fn anti_diagonal(&self) -> Vec<Complex64> {
        (0..=self.n).map(|n| self.get(-n, n)).collect()
    }

    fn average(&self, other: &PropagatorTable) -> PropagatorTable {
        PropagatorTable {
            n: self.n,
            side: self.side,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| 0.5 * (x + y))
                .collect(),
        }
    }
}

/// Inchworm solver for one beam pair, reusable across pairs.
///
/// The propagator table is filled twice. The forward sweep extends each
/// interval at its right end with Heun steps in `s_f`, the backward sweep at
/// its left end with Heun steps in `s_i`. The backward sweep of `(k1, k2)` is
/// the mirror image of the forward sweep of `(k2, k1)` under
/// `s -> -s` and complex conjugation, so the average of the two is exactly
/// conjugate-reflection symmetric.
pub struct PairSolver<'a> {
    lattice: &'a CorrelationLattice,
    grid: TimeGrid,
    m_bar: usize,
    // linked pairings of m + 1 points for the odd orders m >= 3 kept
    higher: Vec<(usize, &'static PairingSet)>,
    vertex: Vec<Complex64>,
    fwd: PropagatorTable,
    bwd: PropagatorTable,
}

impl<'a> PairSolver<'a> {
    pub fn new(lattice: &'a CorrelationLattice, m_bar: usize) -> Result<Self> {
        if m_bar % 2 == 0 || m_bar > 5 {
            return Err(Error::config(format!("truncation order must be 1, 3 or 5, got {m_bar}")));
        }
        let grid = *lattice.grid();
        let higher = (3..=m_bar)
            .step_by(2)
            .map(|m| Ok((m, pairing_set(m + 1)?)))
            .collect::<Result<_>>()?;
        Ok(PairSolver {
            lattice,
            grid,
            m_bar,
            higher,
            vertex: vec![ZERO; grid.ext_len()],
            fwd: PropagatorTable::new(grid.steps()),
            bwd: PropagatorTable::new(grid.steps()),
        })
    }

    pub fn m_bar(&self) -> usize {
        self.m_bar
    }

    /// Fills both tables for the pair; `ids` only label errors.
    pub fn solve(&mut self, centers: PairCenters<'_>, ids: (usize, usize)) -> Result<()> {
        let n = self.grid.steps();
        assert!(centers.forward.len() > n && centers.backward.len() > n, "centers must cover 0..=N");
        vertex_factors(&self.grid, centers, &mut self.vertex);
        if self.lattice.is_vanishing() {
            self.fwd.values.fill(ONE);
            self.bwd.values.fill(ONE);
            return Ok(());
        }
        let mut t = std::mem::take(&mut self.fwd);
        let res = self.sweep_forward(&mut t, ids);
        self.fwd = t;
        res?;
        let mut t = std::mem::take(&mut self.bwd);
        let res = self.sweep_backward(&mut t, ids);
        self.bwd = t;
        res
    }

    pub fn forward_table(&self) -> &PropagatorTable {
        &self.fwd
    }

    pub fn backward_table(&self) -> &PropagatorTable {
        &self.bwd
    }

    /// The symmetrized table.
    pub fn table(&self) -> PropagatorTable {
        self.fwd.average(&self.bwd)
    }

    /// Symmetrized `G(-n dt, n dt)` for `n = 0..=N`, written into `out`.
    pub fn anti_diagonal_into(&self, out: &mut [Complex64]) {
        for (n, slot) in out.iter_mut().enumerate() {
            let n = n as i64;
            *slot = 0.5 * (self.fwd.get(-n, n) + self.bwd.get(-n, n));
        }
    }

    fn sweep_forward(&self, t: &mut PropagatorTable, ids: (usize, usize)) -> Result<()> {
        let g = self.grid;
        let n = g.steps() as i64;
        let dt = g.dt();
        for r in 1..=2 * n {
            for a in -n..=n - r {
                let b = a + r;
                let lo = g.ext(a, if a <= 0 { Branch::Backward } else { Branch::Forward });
                // one-sided derivatives at zero: leaving 0 to the right, arriving from the left
                let old_hi = g.ext(b - 1, if b >= 1 { Branch::Forward } else { Branch::Backward });
                let new_hi = g.ext(b, if b <= 0 { Branch::Backward } else { Branch::Forward });
                let start = t.get(a, b - 1);
                let f0 = self.rhs_forward(t, lo, old_hi);
                t.set(a, b, start + dt * f0);
                let f1 = self.rhs_forward(t, lo, new_hi);
                let v = start + 0.5 * dt * (f0 + f1);
                check_finite(v, ids, a, b)?;
                t.set(a, b, v);
            }
        }
        Ok(())
    }

    fn sweep_backward(&self, t: &mut PropagatorTable, ids: (usize, usize)) -> Result<()> {
        let g = self.grid;
        let n = g.steps() as i64;
        let dt = g.dt();
        for r in 1..=2 * n {
            for b in (-n + r..=n).rev() {
                let a = b - r;
                let hi = g.ext(b, if b >= 0 { Branch::Forward } else { Branch::Backward });
                let old_lo = g.ext(a + 1, if a + 1 <= 0 { Branch::Backward } else { Branch::Forward });
                let new_lo = g.ext(a, if a >= 0 { Branch::Forward } else { Branch::Backward });
                let start = t.get(a + 1, b);
                let h0 = self.rhs_backward(t, old_lo, hi);
                t.set(a, b, start + dt * h0);
                let h1 = self.rhs_backward(t, new_lo, hi);
                let v = start + 0.5 * dt * (h0 + h1);
                check_finite(v, ids, a, b)?;
                t.set(a, b, v);
            }
        }
        Ok(())
    }

    /// `dG(s_i, s_f)/ds_f` on the extended interval `[lo, hi]`, truncated at
    /// order `m_bar`, with every integral done by nested trapezoids (the
    /// last free time outermost).
    pub fn rhs_forward(&self, t: &PropagatorTable, lo: usize, hi: usize) -> Complex64 {
        let g = &self.grid;
        let (ja, jb) = (g.grid_index(lo), g.grid_index(hi));
        let mut total = ZERO;
        for e in lo..=hi {
            let w = g.weight(e, lo, hi);
            if w == 0.0 {
                continue;
            }
            let je = g.grid_index(e);
            total += w * self.vertex[e] * t.get(ja, je) * t.get(je, jb) * self.lattice.get(e, hi);
        }
        for &(m, set) in &self.higher {
            let mut pts = [0usize; 6];
            pts[m] = hi;
            total += self.nest_forward(t, set, m, lo, &mut pts);
        }
        total * self.vertex[hi]
    }

    // chooses s_level (stored at pts[level - 1]) in [lo, s_{level + 1}]
    fn nest_forward(&self, t: &PropagatorTable, set: &PairingSet, level: usize, lo: usize, pts: &mut [usize; 6]) -> Complex64 {
        let g = &self.grid;
        let upper = pts[level];
        let ju = g.grid_index(upper);
        let mut acc = ZERO;
        for e in lo..=upper {
            let w = g.weight(e, lo, upper);
            if w == 0.0 {
                continue;
            }
            let je = g.grid_index(e);
            pts[level - 1] = e;
            let inner = if level == 1 {
                let p = &*pts;
                t.get(g.grid_index(lo), je) * set.sum_products(true, |x, y| self.lattice.get(p[x], p[y]))
            } else {
                self.nest_forward(t, set, level - 1, lo, pts)
            };
            acc += w * self.vertex[e] * t.get(je, ju) * inner;
        }
        acc
    }

    /// `-dG(s_i, s_f)/ds_i` on `[lo, hi]`: the mirror of [`Self::rhs_forward`]
    /// with the first time pinned and the first free time outermost.
    pub fn rhs_backward(&self, t: &PropagatorTable, lo: usize, hi: usize) -> Complex64 {
        let g = &self.grid;
        let (ja, jb) = (g.grid_index(lo), g.grid_index(hi));
        let mut total = ZERO;
        for e in lo..=hi {
            let w = g.weight(e, lo, hi);
            if w == 0.0 {
                continue;
            }
            let je = g.grid_index(e);
            total += w * self.vertex[e] * t.get(ja, je) * t.get(je, jb) * self.lattice.get(lo, e);
        }
        for &(m, set) in &self.higher {
            let mut pts = [0usize; 6];
            pts[0] = lo;
            total += self.nest_backward(t, set, m, 1, hi, &mut pts);
        }
        total * self.vertex[lo]
    }

    // chooses s_level (stored at pts[level]) in [s_{level - 1}, hi]
    fn nest_backward(
        &self,
        t: &PropagatorTable,
        set: &PairingSet,
        m: usize,
        level: usize,
        hi: usize,
        pts: &mut [usize; 6],
    ) -> Complex64 {
        let g = &self.grid;
        let lower = pts[level - 1];
        let jl = g.grid_index(lower);
        let mut acc = ZERO;
        for e in lower..=hi {
            let w = g.weight(e, lower, hi);
            if w == 0.0 {
                continue;
            }
            let je = g.grid_index(e);
            pts[level] = e;
            let inner = if level == m {
                let p = &*pts;
                t.get(je, g.grid_index(hi)) * set.sum_products(true, |x, y| self.lattice.get(p[x], p[y]))
            } else {
                self.nest_backward(t, set, m, level + 1, hi, pts)
            };
            acc += w * self.vertex[e] * t.get(jl, je) * inner;
        }
        acc
    }
}

/// `-i sgn(s) Q~(s)` on every extended node.
pub(crate) fn vertex_factors(grid: &TimeGrid, centers: PairCenters<'_>, out: &mut [Complex64]) {
    for (e, v) in out.iter_mut().enumerate() {
        let j = grid.grid_index(e).unsigned_abs() as usize;
        *v = match grid.branch(e) {
            Branch::Forward => Complex64::new(0.0, -centers.forward[j]),
            Branch::Backward => Complex64::new(0.0, centers.backward[j]),
        };
    }
}

fn check_finite(v: Complex64, ids: (usize, usize), a: i64, b: i64) -> Result<()> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite {
            k1: ids.0,
            k2: ids.1,
            j1: a,
            j2: b,
        })
    }
}

/// Symmetrized `G(-n dt, n dt)`, `n = 0..=N`, for a single pair.
pub fn solve_pair(lattice: &CorrelationLattice, centers: PairCenters<'_>, m_bar: usize) -> Result<Vec<Complex64>> {
    let mut solver = PairSolver::new(lattice, m_bar)?;
    solver.solve(centers, (0, 0))?;
    let mut out = vec![ZERO; lattice.grid().steps() + 1];
    solver.anti_diagonal_into(&mut out);
    Ok(out)
}

/// Symmetrized full table for a single pair.
pub fn solve_pair_table(
    lattice: &CorrelationLattice,
    centers: PairCenters<'_>,
    m_bar: usize,
) -> Result<PropagatorTable> {
    let mut solver = PairSolver::new(lattice, m_bar)?;
    solver.solve(centers, (0, 0))?;
    Ok(solver.table())
}
