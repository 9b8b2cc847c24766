//! Exit criteria. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test -p fga-inchworm --test acceptance -- --test-threads=1`.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::io::Write;
use std::time::Instant;

use num_complex::Complex64;

use fga_inchworm::bath::{pairing_set, BathSpec, OhmicSpec};
use fga_inchworm::dyson::{dyson_coefficient, truncation_estimate, EstimatorParams};
use fga_inchworm::fga::{propagate_beam, BeamGrid, BeamSet, BeamState};
use fga_inchworm::inchworm::{solve_all_pairs, solve_pair, CorrelationLattice, PairCenters, TimeGrid};
use fga_inchworm::model::{effective_potential, InitialState, Potential, SimConfig};
use fga_inchworm::pipeline::{self, RunOptions};
use fga_inchworm::scenario::Scenario;
use fga_inchworm::spectral::{l2_norm, sp2_evolve, SpatialGrid, Sp2Stepper};

fn report(id: u32, name: &str, pass: bool, detail: impl AsRef<str>) -> bool {
    let tag = if pass { "PASS" } else { "FAIL" };
    // straight to stderr so the line survives the test harness capture
    let _ = writeln!(std::io::stderr(), "{tag} [{id:>2}] {name}: {}", detail.as_ref());
    pass
}

fn ohmic(xi: f64, eps: f64) -> BathSpec {
    OhmicSpec { xi, omega_c: 2.5, omega_max: 10.0, modes: 400 }.discretize(5.0, eps).unwrap()
}

fn double_factorial(n: usize) -> usize {
    (1..=n).rev().step_by(2).product()
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

fn info(line: String) {
    let _ = writeln!(std::io::stderr(), "info {line}");
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn l2_diff(a: &[f64], b: &[f64], h: f64) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() * h).sqrt()
}

#[test]
fn criterion_01_diagram_combinatorics() {
    let mut wick = Vec::new();
    let mut linked = Vec::new();
    for n in 1..=5 {
        let set = pairing_set(2 * n).unwrap();
        wick.push(set.all().len());
        linked.push(set.linked().len());
    }
    let wick_ok = wick.iter().enumerate().all(|(i, &c)| c == double_factorial(2 * i + 1));
    let linked_ok = linked == [1, 1, 4, 27, 248];
    let two_arcs = pairing_set(4).unwrap();
    let reduction_ok = two_arcs.all().len() == 3 && two_arcs.linked().len() == 1;
    let mut three_arcs: Vec<Vec<(usize, usize)>> =
        pairing_set(6).unwrap().linked().iter().map(|p| p.arcs().to_vec()).collect();
    three_arcs.sort();
    let drawn = vec![
        vec![(0, 2), (1, 4), (3, 5)],
        vec![(0, 3), (1, 4), (2, 5)],
        vec![(0, 3), (1, 5), (2, 4)],
        vec![(0, 4), (1, 3), (2, 5)],
    ];
    let pass = report(
        1,
        "diagram combinatorics",
        wick_ok && linked_ok && reduction_ok && three_arcs == drawn,
        format!("wick {wick:?}, linked {linked:?}, 2 arcs 3 -> 1, 3 arcs {} diagrams", three_arcs.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_02_truncation_estimator() {
    let bath = ohmic(1.6, 1.0 / 64.0);
    let bound = |m, dt| {
        let p = EstimatorParams { q_max: 0.5, g_max: 1.0, start: -5.0, end: 5.0, m, dt };
        truncation_estimate(&p, &bath).unwrap()
    };
    let first = bound(1, 0.01);
    let third = bound(3, 0.05);
    let (target1, target3) = (0.236671, 0.0362826);
    let rel1 = (first / target1 - 1.0).abs();
    let rel3 = (third / target3 - 1.0).abs();
    let pass = report(
        2,
        "truncation estimator (xi = 1.6 on [-5, 5])",
        rel1 <= 0.01 && rel3 <= 0.05,
        format!("m=1 {first:.7} ({:.3}% off), m=3 {third:.7} ({:.3}% off)", 100.0 * rel1, 100.0 * rel3),
    );
    assert!(pass);
}

fn harmonic_beam_error(h: f64) -> f64 {
    let steps = (5.0 / h).round() as usize;
    let v = Potential::Quadratic { coeff: 0.5 };
    let tr = propagate_beam(BeamState::initial(1.0, 0.0), &v, h, steps, 1, 0).unwrap();
    let mut err: f64 = 0.0;
    for (n, s) in tr.states.iter().enumerate() {
        let t = tr.time(n);
        let a = SQRT_2 * Complex64::new(0.0, -0.5 * t).exp();
        err = err
            .max((s.position - t.sin()).abs())
            .max((s.momentum - t.cos()).abs())
            .max((s.action - (2.0 * t).sin() / 4.0).abs())
            .max((s.amplitude - a).norm());
    }
    err
}

#[test]
fn criterion_03_harmonic_analytics() {
    let coarse = harmonic_beam_error(1e-3);
    let fine = harmonic_beam_error(5e-4);
    let ratio = coarse / fine;
    let pass = report(
        3,
        "harmonic beam analytics",
        coarse <= 1e-6 && (3.2..=4.8).contains(&ratio),
        format!("max error {coarse:.3e} at 1e-3, halving ratio {ratio:.3}"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_zero_coupling_reduction() {
    let cfg = Scenario::Validity.preset().unwrap();
    assert_eq!(cfg.bath.xi, 0.0);
    let out = pipeline::run(&cfg, RunOptions::default()).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let all_one = out
        .coeffs
        .pairs()
        .all(|(a, b)| (0..=cfg.time.steps).all(|n| out.coeffs.get(a, b, n) == one));
    let mut worst: f64 = 0.0;
    for (row, &n) in out.density.f.iter().zip(&out.density.steps) {
        for (x, f) in out.density.x.iter().zip(row) {
            worst = worst.max((f - out.beams.eval_fga(n, *x).norm_sqr()).abs());
        }
    }
    let pass = report(
        4,
        "zero-coupling reduction",
        all_one && worst <= 1e-12,
        format!("{} beams, all G = 1: {all_one}, max |f - |sum w psi|^2| {worst:.2e}", out.beams.len()),
    );
    assert!(pass);
}

/// L2 density error of the uncoupled beam sum against the spectral solution
/// at each output time.
fn fga_vs_spectral(cfg: &SimConfig) -> Vec<f64> {
    let bath = ohmic(0.0, cfg.epsilon);
    let beams = pipeline::propagate(cfg, &bath).unwrap();
    let reference = pipeline::spectral_reference(cfg).unwrap();
    let xs = cfg.x_grid();
    let h = xs[1] - xs[0];
    cfg.output_steps()
        .iter()
        .zip(&reference)
        .map(|(&n, psi)| {
            let f: Vec<f64> = xs.iter().map(|&x| beams.eval_fga(n, x).norm_sqr()).collect();
            let g: Vec<f64> = psi.iter().map(|p| p.norm_sqr()).collect();
            l2_diff(&f, &g, h)
        })
        .collect()
}

fn closed_config(scenario: Scenario, eps: f64) -> SimConfig {
    let mut c = scenario.preset().unwrap();
    c.epsilon = eps;
    c.bath.xi = 0.0;
    c.grid.dp = 2.0 * eps;
    c.grid.dq = 2.0 * eps;
    c.time.dt = 0.25;
    c.time.steps = 12;
    c.output.x_min = -2.5;
    c.output.x_max = 2.5;
    c.output.nx = 401;
    c.output.times = vec![3.0];
    c.validate().unwrap();
    c
}

#[test]
fn criterion_05_fga_against_spectral() {
    let eps = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0];
    let errors: Vec<f64> = eps.iter().map(|&e| fga_vs_spectral(&closed_config(Scenario::Validity, e))[0]).collect();
    let slope = log_slope(&eps, &errors);

    let dw = |e: f64| {
        let mut c = closed_config(Scenario::DoubleWell, e);
        c.grid.p_min = -2.0;
        c.grid.p_max = 2.0;
        c.validate().unwrap();
        fga_vs_spectral(&c)[0]
    };
    // harmonic beams are exact, so the harmonic errors above sit at the
    // quadrature and time-step floors; the double well shows the asymptotics
    let dw_errors: Vec<f64> = eps.iter().map(|&e| dw(e)).collect();
    info(format!(
        "[ 5] double well at t = 3: L2 errors {dw_errors:.4?} for eps 1/8, 1/16, 1/32, slope {:.2}",
        log_slope(&eps, &dw_errors)
    ));
    let pass = report(
        5,
        "FGA vs spectral, harmonic at t = 3",
        slope >= 0.8,
        format!("L2 errors {} for eps 1/8, 1/16, 1/32, log-log slope {slope:.2}", sci(&errors)),
    );
    assert!(pass);
}

#[test]
fn criterion_06_conjugate_symmetry() {
    let eps = 1.0 / 16.0;
    let bath = ohmic(0.4, eps);
    let v = effective_potential(&Potential::Quadratic { coeff: 0.5 }, &bath);
    let psi = InitialState::Gaussian { q0: 0.0, p0: 0.25, width: 2.0 }.mixture(eps).unwrap();
    let grid = BeamGrid::new((-0.25, 0.75), 0.5, (-0.5, 0.5), 0.5).unwrap();
    let (dt, n) = (0.125, 8);
    let beams = BeamSet::propagate(grid, &psi, &v, 0.005, 25, n).unwrap();
    let lat = CorrelationLattice::from_bath(TimeGrid::new(dt, n).unwrap(), &bath);
    let centers: Vec<Vec<f64>> = beams.beams.iter().map(|b| (0..=n).map(|j| b.center(j)).collect()).collect();
    let mut worst: f64 = 0.0;
    for k1 in 0..beams.len() {
        for k2 in 0..beams.len() {
            let g12 = solve_pair(&lat, PairCenters { forward: &centers[k1], backward: &centers[k2] }, 1).unwrap();
            let g21 = solve_pair(&lat, PairCenters { forward: &centers[k2], backward: &centers[k1] }, 1).unwrap();
            for (a, b) in g12.iter().zip(&g21) {
                worst = worst.max((a - b.conj()).norm());
            }
        }
    }
    let pass = report(
        6,
        "conjugate symmetry on 3x3 beams, xi = 0.4, t <= 1",
        worst <= 1e-10,
        format!("max |G12 - conj G21| {worst:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_07_dyson_consistency() {
    let eps = 1.0 / 16.0;
    let (dt, n) = (0.125, 8);
    let grid = TimeGrid::new(dt, n).unwrap();
    let labels = [(0.5, 0.25), (0.0, -0.25)];
    let mut ratios = Vec::new();
    let mut gaps = Vec::new();
    for xi in [0.2, 0.1, 0.05] {
        let bath = ohmic(xi, eps);
        let v = effective_potential(&Potential::Quadratic { coeff: 0.5 }, &bath);
        let centers: Vec<Vec<f64>> = labels
            .iter()
            .map(|&(p, q)| {
                let tr = propagate_beam(BeamState::initial(p, q), &v, 0.005, 25 * n, 25, 0).unwrap();
                (0..=n).map(|j| tr.at(j).position).collect()
            })
            .collect();
        let c = PairCenters { forward: &centers[0], backward: &centers[1] };
        let lat = CorrelationLattice::from_bath(grid, &bath);
        let inch = solve_pair(&lat, c, 1).unwrap()[n];
        let dyson = dyson_coefficient(&lat, c, n, 2).unwrap();
        gaps.push((inch - dyson).norm());
        ratios.push((inch - dyson).norm() / (dyson - 1.0).norm());
    }
    let factors: Vec<f64> = ratios.windows(2).map(|w| w[0] / w[1]).collect();
    let gap_factors: Vec<f64> = gaps.windows(2).map(|w| w[0] / w[1]).collect();
    info(format!(
        "[ 7] |inchworm - dyson| alone shrinks by {gap_factors:.3?} per halving (second order in xi)"
    ));
    let pass = report(
        7,
        "Dyson consistency, xi = 0.2, 0.1, 0.05 at t = 1",
        factors.iter().all(|f| (4.0 * 0.7..=4.0 * 1.3).contains(f)),
        format!("relative gap {}, reduction per halving {factors:.3?} (need 4 +- 30%)", sci(&ratios)),
    );
    assert!(pass);
}

/// Two-peak double well at reduced scale: 17 x 17 beams, N = 12 to t = 3.
fn double_well_reduced(xi: f64, m_bar: usize) -> SimConfig {
    let mut c = Scenario::DoubleWell.preset().unwrap();
    c.bath.xi = xi;
    c.inchworm.m_bar = m_bar;
    c.grid.dp = 0.25;
    c.grid.dq = 0.25;
    c.time.dt = 0.25;
    c.time.steps = 12;
    c.output.x_min = -2.0;
    c.output.x_max = 2.0;
    c.output.nx = 161;
    c.output.times = vec![0.0, 1.0, 2.0, 3.0];
    c.validate().unwrap();
    c
}

#[test]
fn criterion_08_truncation_robustness() {
    // coupling at which B~(0) matches the strong-coupling run at eps = 1/64
    let target = ohmic(12.8, 1.0 / 64.0).correlation_tilde(0.0).re;
    let per_unit = ohmic(1.0, 1.0 / 16.0).correlation_tilde(0.0).re;
    let xi = target / per_unit;
    let first = pipeline::run(&double_well_reduced(xi, 1), RunOptions::default()).unwrap();
    let third = pipeline::run(&double_well_reduced(xi, 3), RunOptions::default()).unwrap();
    let mut sup: f64 = 0.0;
    let mut peak: f64 = 0.0;
    let mut per_time = Vec::new();
    for (a, b) in first.density.f.iter().zip(&third.density.f) {
        let mut row: f64 = 0.0;
        for (x, y) in a.iter().zip(b) {
            row = row.max((x - y).abs());
            peak = peak.max(*x);
        }
        per_time.push(row);
        sup = sup.max(row);
    }
    info(format!("[ 8] sup |f1 - f3| at t = {:?}: {}", first.density.times, sci(&per_time)));
    let pass = report(
        8,
        "M = 1 vs M = 3 in the double well",
        sup <= 0.05 * peak,
        format!(
            "{} beams, xi = {xi:.3}, sup |f1 - f3| = {sup:.4e}, {:.2}% of peak {peak:.4} (inchworm {:.0}s / {:.0}s)",
            first.beams.len(),
            100.0 * sup / peak,
            first.timing.inchworm,
            third.timing.inchworm
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_decoherence_ordering() {
    let steps = 8;
    let dt = FRAC_PI_2 / steps as f64;
    let mut base = Scenario::TwoPeak.preset().unwrap();
    base.time.dt = dt;
    base.time.steps = steps;
    base.time.dt_rk = dt / 40.0;
    base.output.x_min = -0.25;
    base.output.x_max = 0.25;
    base.output.nx = 9;
    base.output.times = vec![FRAC_PI_2];
    let xis = [0.0, 0.4, 0.8, 1.6];
    let mut mid = Vec::new();
    for xi in xis {
        let mut c = base.clone();
        c.bath.xi = xi;
        let out = pipeline::run(&c, RunOptions::default()).unwrap();
        mid.push(out.density.f[0][4]);
    }
    let pass = report(
        9,
        "interference at the crossing time vs xi",
        mid.windows(2).all(|w| w[1] <= w[0]),
        format!("f(pi/2, 0) = {mid:.5?} for xi = {xis:?}"),
    );
    assert!(pass);
}

fn inchworm_seconds(p_hi: f64, steps: usize) -> f64 {
    let eps = 1.0 / 16.0;
    let bath = ohmic(0.8, eps);
    let v = effective_potential(&Potential::Quadratic { coeff: 0.5 }, &bath);
    let psi = InitialState::Gaussian { q0: 0.0, p0: 0.25, width: 2.0 }.mixture(eps).unwrap();
    let grid = BeamGrid::new((-0.5, p_hi), 0.25, (-0.5, 0.5), 0.25).unwrap();
    let beams = BeamSet::propagate(grid, &psi, &v, 0.005, 25, steps).unwrap();
    let lat = CorrelationLattice::from_bath(TimeGrid::new(0.125, steps).unwrap(), &bath);
    (0..3)
        .map(|_| {
            let clock = Instant::now();
            solve_all_pairs(&beams, &lat, 1, None).unwrap();
            clock.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn criterion_10_cost_model() {
    // 5 x 5 beams, then 10 x 5
    let base = inchworm_seconds(0.5, 16);
    let double_n = inchworm_seconds(0.5, 32);
    let double_k = inchworm_seconds(1.75, 16);
    let n_factor = double_n / base;
    let k_factor = double_k / base;
    let pass = report(
        10,
        "inchworm cost scaling",
        (4.0..=16.0).contains(&n_factor) && (4.0 / 1.5..=4.0 * 1.5).contains(&k_factor),
        format!("doubling N x{n_factor:.2} (need 8 within x2), doubling K x{k_factor:.2} (need 4 within x1.5)"),
    );
    assert!(pass);
}

#[test]
fn criterion_11_spectral_reference() {
    let eps = 1.0 / 16.0;
    let grid = SpatialGrid::new(-4.0, 4.0, 1024).unwrap();
    let v = Potential::DoubleWell { a: -1.0, b: 2.0 };
    let psi0 = InitialState::TwoPeak.mixture(eps).unwrap();
    let start = grid.sample(|x| psi0.eval(x));

    let mut psi = start.clone();
    let mut stepper = Sp2Stepper::new(grid, &v, eps, 1e-3);
    let n0 = l2_norm(&grid, &psi);
    for _ in 0..10_000 {
        stepper.step(&mut psi);
    }
    let drift = (l2_norm(&grid, &psi) - n0).abs();

    let at = |dt: f64| {
        let steps = (0.5 / dt).round() as usize;
        sp2_evolve(start.clone(), grid, &v, eps, dt, &[steps]).unwrap().remove(0)
    };
    let (a, b, c) = (at(0.01), at(0.005), at(0.0025));
    let dist = |x: &[Complex64], y: &[Complex64]| {
        (x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>() * grid.spacing()).sqrt()
    };
    let order = (dist(&a, &b) / dist(&b, &c)).log2();
    let pass = report(
        11,
        "spectral reference",
        drift < 1e-12 && (order - 2.0).abs() <= 0.2,
        format!("norm drift {drift:.2e} over 1e4 steps, self-convergence order {order:.3}"),
    );
    assert!(pass);
}
