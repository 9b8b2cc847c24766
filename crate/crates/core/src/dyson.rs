//! Bare Dyson series for the pair coefficients, used as an oracle for the
//! inchworm solver, and the magnitude bound that guides the truncation order.

use num_complex::Complex64;

use crate::bath::{pairing_set, BathSpec};
use crate::error::{Error, Result};
use crate::inchworm::{vertex_factors, Branch, CorrelationLattice, PairCenters};
use crate::model::whole_steps;

// Sum of `weight * leaf` over ordered m-tuples on nodes lo..=hi with nested
// trapezoid weights. `last_outer` puts the last time in the outer loop
// (s_m in [lo, hi], s_{m-1} in [lo, s_m], ...); otherwise the first time is
// outermost (s_1 in [lo, hi], s_2 in [s_1, hi], ...).
fn nested_sum(
    m: usize,
    lo: usize,
    hi: usize,
    last_outer: bool,
    weight: &impl Fn(usize, usize, usize) -> f64,
    leaf: &mut impl FnMut(&[usize]) -> Complex64,
) -> Complex64 {
    fn go(
        pts: &mut Vec<usize>,
        m: usize,
        lo: usize,
        hi: usize,
        last_outer: bool,
        weight: &impl Fn(usize, usize, usize) -> f64,
        leaf: &mut impl FnMut(&[usize]) -> Complex64,
    ) -> Complex64 {
        let depth = pts.len();
        if depth == m {
            let mut ordered = pts.clone();
            if last_outer {
                ordered.reverse();
            }
            return leaf(&ordered);
        }
        let (a, b) = match (last_outer, pts.last()) {
            (_, None) => (lo, hi),
            (true, Some(&prev)) => (lo, prev),
            (false, Some(&prev)) => (prev, hi),
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for e in a..=b {
            let w = weight(e, a, b);
            if w == 0.0 {
                continue;
            }
            pts.push(e);
            acc += w * go(pts, m, lo, hi, last_outer, weight, leaf);
            pts.pop();
        }
        acc
    }
    go(&mut Vec::with_capacity(m), m, lo, hi, last_outer, weight, leaf)
}

/// `rho_{k1 k2}(n dt)` from the bare series truncated after order `max_m`
/// (0, 2 or 4), with every pairing kept.
///
/// Nested trapezoids on the same split grid as the inchworm solver, averaged
/// over the two nesting orders.
pub fn dyson_coefficient(
    lattice: &CorrelationLattice,
    centers: PairCenters<'_>,
    n: usize,
    max_m: usize,
) -> Result<Complex64> {
    if max_m % 2 == 1 || max_m > 4 {
        return Err(Error::config(format!("Dyson order must be 0, 2 or 4, got {max_m}")));
    }
    let grid = lattice.grid();
    if n > grid.steps() {
        return Err(Error::numerical(format!("step {n} beyond the time grid")));
    }
    let mut vertex = vec![Complex64::new(0.0, 0.0); grid.ext_len()];
    vertex_factors(grid, centers, &mut vertex);
    let lo = grid.ext(-(n as i64), Branch::Backward);
    let hi = grid.ext(n as i64, Branch::Forward);
    let weight = |e, a, b| grid.weight(e, a, b);
    let mut total = Complex64::new(1.0, 0.0);
    for m in (2..=max_m).step_by(2) {
        let set = pairing_set(m)?;
        let mut leaf = |pts: &[usize]| {
            let v: Complex64 = pts.iter().map(|&e| vertex[e]).product();
            v * set.sum_products(false, |a, b| lattice.get(pts[a], pts[b]))
        };
        let fwd = nested_sum(m, lo, hi, true, &weight, &mut leaf);
        let bwd = nested_sum(m, lo, hi, false, &weight, &mut leaf);
        total += 0.5 * (fwd + bwd);
    }
    Ok(total)
}

/// Inputs of the truncation bound for one order `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorParams {
    /// Largest beam-center magnitude.
    pub q_max: f64,
    /// Largest propagator magnitude.
    pub g_max: f64,
    pub start: f64,
    pub end: f64,
    pub m: usize,
    /// Quadrature spacing; must divide `end - start`.
    pub dt: f64,
}

/// Upper bound on the order-`m` term of the inchworm right-hand side:
/// `(q_max g_max)^(m+1)` times the simplex integral of the linked sum of
/// `prod |B|` over `(s_1, .., s_m, end)`.
pub fn truncation_estimate(params: &EstimatorParams, bath: &BathSpec) -> Result<f64> {
    let EstimatorParams {
        q_max,
        g_max,
        start,
        end,
        m,
        dt,
    } = *params;
    if m % 2 == 0 {
        return Err(Error::config(format!("estimator order must be odd, got {m}")));
    }
    if !(q_max > 0.0 && g_max > 0.0 && start < end && dt > 0.0) {
        return Err(Error::config(format!("invalid estimator parameters {params:?}")));
    }
    let set = pairing_set(m + 1)?;
    let steps = whole_steps(end - start, dt)
        .ok_or_else(|| Error::config(format!("dt = {dt} does not divide [{start}, {end}]")))?;
    let times: Vec<f64> = (0..=steps).map(|k| start + k as f64 * dt).collect();
    let pts = times.len();
    // |B| between all nodes; the pinned end time is node `steps`
    let mut abs_b = vec![0.0; pts * pts];
    if let Some(offset) = whole_steps(start.abs(), dt) {
        // every |t| is a multiple of dt, so B~ is needed on integer lags only
        let sign = if start < 0.0 { -1i64 } else { 1 };
        let lag = |k: usize| (sign * offset as i64 + k as i64).abs();
        let reach = (0..pts).map(lag).max().unwrap_or(0);
        let tilde: Vec<Complex64> = (-reach..=reach).map(|d| bath.correlation_tilde(d as f64 * dt)).collect();
        for i in 0..pts {
            for j in 0..pts {
                // the conjugate branch has the same modulus
                abs_b[i * pts + j] = tilde[(lag(i) - lag(j) + reach) as usize].norm();
            }
        }
    } else {
        for (i, &t1) in times.iter().enumerate() {
            for (j, &t2) in times.iter().enumerate() {
                abs_b[i * pts + j] = bath.correlation(t1, t2).norm();
            }
        }
    }
    let weight = |k: usize, a: usize, b: usize| {
        0.5 * dt * (f64::from(u8::from(k > a)) + f64::from(u8::from(k < b)))
    };
    let mut with_end = vec![0usize; m + 1];
    with_end[m] = steps;
    let mut leaf = |free: &[usize]| {
        with_end[..m].copy_from_slice(free);
        let p = &with_end;
        let s: f64 = set
            .linked()
            .iter()
            .map(|q| q.arcs().iter().map(|&(a, b)| abs_b[p[a] * pts + p[b]]).product::<f64>())
            .sum();
        Complex64::new(s, 0.0)
    };
    let integral = nested_sum(m, 0, steps, true, &weight, &mut leaf).re;
    Ok((q_max * g_max).powi(m as i32 + 1) * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::OhmicSpec;
    use crate::inchworm::{solve_pair, TimeGrid};

    fn bath(xi: f64, modes: usize) -> BathSpec {
        OhmicSpec {
            xi,
            omega_c: 2.5,
            omega_max: 10.0,
            modes,
        }
        .discretize(5.0, 1.0 / 16.0)
        .unwrap()
    }

    fn profiles(n: usize, dt: f64) -> (Vec<f64>, Vec<f64>) {
        let f = (0..=n).map(|j| 0.3 + 0.2 * (j as f64 * dt).sin()).collect();
        let b = (0..=n).map(|j| -0.25 + 0.1 * (j as f64 * dt).cos()).collect();
        (f, b)
    }

    #[test]
    fn zeroth_order_and_uncoupled() {
        let grid = TimeGrid::new(0.25, 4).unwrap();
        let (f, b) = profiles(4, 0.25);
        let c = PairCenters { forward: &f, backward: &b };
        let coupled = CorrelationLattice::from_bath(grid, &bath(1.0, 40));
        assert_eq!(dyson_coefficient(&coupled, c, 4, 0).unwrap(), Complex64::new(1.0, 0.0));
        let free = CorrelationLattice::from_bath(grid, &bath(0.0, 40));
        for max_m in [0, 2, 4] {
            assert_eq!(dyson_coefficient(&free, c, 4, max_m).unwrap(), Complex64::new(1.0, 0.0));
        }
        assert!(dyson_coefficient(&coupled, c, 4, 3).is_err());
        assert!(dyson_coefficient(&coupled, c, 4, 6).is_err());
    }

    #[test]
    fn second_order_matches_split_product_trapezoid() {
        let n = 5usize;
        let dt = 0.2;
        let grid = TimeGrid::new(dt, n).unwrap();
        let bath = bath(1.3, 40);
        let lat = CorrelationLattice::from_bath(grid, &bath);
        let (f, b) = profiles(n, dt);
        let c = PairCenters { forward: &f, backward: &b };
        let got = dyson_coefficient(&lat, c, n, 2).unwrap() - 1.0;

        // independent oracle on the plain grid: split [-t, t] at zero into
        // two triangles and a rectangle, product trapezoid weights with a
        // half on the diagonal
        let ni = n as i64;
        let point = |j: i64, right: bool| -> (f64, f64) {
            let q = if right { f[j.unsigned_abs() as usize] } else { b[j.unsigned_abs() as usize] };
            (if right { 1.0 } else { -1.0 }, q)
        };
        let term = |j1: i64, r1: bool, j2: i64, r2: bool| {
            let (s1, q1) = point(j1, r1);
            let (s2, q2) = point(j2, r2);
            let bb = bath.correlation_sided((j1 as f64 * dt).abs(), (j2 as f64 * dt).abs(), r1 == r2);
            -s1 * s2 * q1 * q2 * bb
        };
        let w = |j: i64, lo: i64, hi: i64| if j == lo || j == hi { 0.5 * dt } else { dt };
        let mut oracle = Complex64::new(0.0, 0.0);
        for (lo, hi, right) in [(-ni, 0, false), (0, ni, true)] {
            for j1 in lo..=hi {
                for j2 in j1..=hi {
                    let diag = if j1 == j2 { 0.5 } else { 1.0 };
                    oracle += diag * w(j1, lo, hi) * w(j2, lo, hi) * term(j1, right, j2, right);
                }
            }
        }
        for j1 in -ni..=0 {
            for j2 in 0..=ni {
                oracle += w(j1, -ni, 0) * w(j2, 0, ni) * term(j1, false, j2, true);
            }
        }
        assert!((got - oracle).norm() < 1e-12, "{got} vs {oracle}");
    }

    #[test]
    fn inchworm_agrees_with_dyson_at_leading_order() {
        let n = 8usize;
        let dt = 0.125;
        let grid = TimeGrid::new(dt, n).unwrap();
        let (f, b) = profiles(n, dt);
        let c = PairCenters { forward: &f, backward: &b };
        let mut ratios = Vec::new();
        for xi in [0.2, 0.1] {
            let lat = CorrelationLattice::from_bath(grid, &bath(xi, 40));
            let inch = solve_pair(&lat, c, 1).unwrap()[n];
            let d2 = dyson_coefficient(&lat, c, n, 2).unwrap();
            ratios.push((inch - d2).norm() / (d2 - 1.0).norm());
        }
        // the mismatch is second order in the coupling, relative to a first-order term
        assert!(ratios[1] < 0.6 * ratios[0], "{ratios:?}");
    }

    fn standard_bath() -> BathSpec {
        OhmicSpec {
            xi: 1.6,
            omega_c: 2.5,
            omega_max: 10.0,
            modes: 400,
        }
        .discretize(5.0, 1.0 / 64.0)
        .unwrap()
    }

    #[test]
    fn estimator_first_order_value() {
        let p = EstimatorParams {
            q_max: 0.5,
            g_max: 1.0,
            start: -5.0,
            end: 5.0,
            m: 1,
            dt: 0.01,
        };
        let v = truncation_estimate(&p, &standard_bath()).unwrap();
        // frozen from an independent numpy trapezoid at the same spacing
        assert!((v - 0.2366709).abs() < 5e-7, "{v}");
    }

    #[test]
    fn estimator_vanishes_without_coupling_and_rejects_even_orders() {
        let b = bath(0.0, 40);
        for m in [1, 3] {
            let p = EstimatorParams {
                q_max: 0.5,
                g_max: 1.0,
                start: -1.0,
                end: 1.0,
                m,
                dt: 0.1,
            };
            assert_eq!(truncation_estimate(&p, &b).unwrap(), 0.0);
        }
        let p = EstimatorParams {
            q_max: 0.5,
            g_max: 1.0,
            start: -1.0,
            end: 1.0,
            m: 2,
            dt: 0.1,
        };
        assert!(truncation_estimate(&p, &b).is_err());
    }

    #[test]
    fn estimator_is_monotone() {
        let b = bath(1.0, 40);
        let base = EstimatorParams {
            q_max: 0.5,
            g_max: 1.0,
            start: -1.0,
            end: 1.0,
            m: 3,
            dt: 0.1,
        };
        let v = |p: EstimatorParams| truncation_estimate(&p, &b).unwrap();
        let v0 = v(base);
        assert!(v(EstimatorParams { q_max: 0.6, ..base }) >= v0);
        assert!(v(EstimatorParams { g_max: 1.2, ..base }) >= v0);
        assert!(v(EstimatorParams { start: -1.5, ..base }) >= v0);
    }
    #[test]
    fn identical_paths_keep_unit_coefficient() {
        // the influence functional is one when both branches follow the same path
        let b = bath(1.6, 400);
        let mut gaps = Vec::new();
        for n in [8usize, 16, 32] {
            let dt = 2.0 / n as f64;
            let lat = CorrelationLattice::from_bath(TimeGrid::new(dt, n).unwrap(), &b);
            let q: Vec<f64> = (0..=n).map(|j| 0.5 * (j as f64 * dt).sin() + 0.2).collect();
            let c = PairCenters { forward: &q, backward: &q };
            assert!((dyson_coefficient(&lat, c, n, 2).unwrap() - 1.0).norm() < 1e-14);
            gaps.push((solve_pair(&lat, c, 1).unwrap()[n] - 1.0).norm());
        }
        assert!(gaps[1] < gaps[0] / 3.0 && gaps[2] < gaps[1] / 3.0, "{gaps:?}");
    }
}
