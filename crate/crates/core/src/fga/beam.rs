use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::Potential;

/// Smallest admissible `|dQ/dq + dP/dp + i (dP/dq - dQ/dp)|`.
pub const CAUSTIC_GUARD: f64 = 1e-12;

/// Sensitivities of the beam center to its initial label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian {
    pub dp_p: f64,
    pub dp_q: f64,
    pub dq_p: f64,
    pub dq_q: f64,
}

impl Jacobian {
    pub const IDENTITY: Jacobian = Jacobian {
        dp_p: 1.0,
        dp_q: 0.0,
        dq_p: 0.0,
        dq_q: 1.0,
    };

    /// `dP/dp dQ/dq - dQ/dp dP/dq`, equal to 1 along an exact flow.
    pub fn symplectic_residual(&self) -> f64 {
        self.dp_p * self.dq_q - self.dp_q * self.dq_p
    }

    fn denominator(&self) -> Complex64 {
        Complex64::new(self.dq_q + self.dp_p, self.dq_p - self.dp_q)
    }
}

/// Evolving parameters of one frozen Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamState {
    pub momentum: f64,
    pub position: f64,
    pub action: f64,
    pub amplitude: Complex64,
    pub jac: Jacobian,
}

impl BeamState {
    pub fn initial(p: f64, q: f64) -> Self {
        BeamState {
            momentum: p,
            position: q,
            action: 0.0,
            amplitude: Complex64::new(std::f64::consts::SQRT_2, 0.0),
            jac: Jacobian::IDENTITY,
        }
    }

    fn as_array(&self) -> [f64; 9] {
        let j = &self.jac;
        [
            self.momentum,
            self.position,
            self.action,
            self.amplitude.re,
            self.amplitude.im,
            j.dp_p,
            j.dp_q,
            j.dq_p,
            j.dq_q,
        ]
    }

    fn from_array(y: &[f64; 9]) -> Self {
        BeamState {
            momentum: y[0],
            position: y[1],
            action: y[2],
            amplitude: Complex64::new(y[3], y[4]),
            jac: Jacobian {
                dp_p: y[5],
                dp_q: y[6],
                dq_p: y[7],
                dq_q: y[8],
            },
        }
    }
}

// time derivative of the packed state; Err carries the offending denominator
fn rate(v: &Potential, y: &[f64; 9]) -> std::result::Result<[f64; 9], f64> {
    let s = BeamState::from_array(y);
    let (val, dv, ddv) = v.eval(s.position);
    let j = s.jac;
    let den = j.denominator();
    if den.norm() < CAUSTIC_GUARD {
        return Err(den.norm());
    }
    let num = Complex64::new(j.dq_p - j.dp_q * ddv, -(j.dp_p + j.dq_q * ddv));
    let da = s.amplitude * 0.5 * num / den;
    Ok([
        -dv,
        s.momentum,
        0.5 * s.momentum * s.momentum - val,
        da.re,
        da.im,
        -ddv * j.dp_q,
        j.dp_p,
        -ddv * j.dq_q,
        j.dq_p,
    ])
}

/// Beam states recorded every `stride` Heun steps.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamTrajectory {
    pub step: f64,
    pub stride: usize,
    pub states: Vec<BeamState>,
}

impl BeamTrajectory {
    /// Spacing between stored states.
    pub fn spacing(&self) -> f64 {
        self.step * self.stride as f64
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.spacing()
    }

    pub fn at(&self, n: usize) -> &BeamState {
        &self.states[n]
    }

    /// State at the stored node nearest to `t`.
    pub fn nearest(&self, t: f64) -> &BeamState {
        let n = (t / self.spacing()).round().max(0.0) as usize;
        &self.states[n.min(self.states.len() - 1)]
    }
}

/// Integrates the beam equations under `v` with Heun's method for `steps`
/// steps of size `h`, keeping every `stride`-th state.
///
/// `beam` only labels the caustic error.
pub fn propagate_beam(
    init: BeamState,
    v: &Potential,
    h: f64,
    steps: usize,
    stride: usize,
    beam: usize,
) -> Result<BeamTrajectory> {
    assert!(stride > 0 && steps % stride == 0, "steps must be a multiple of stride");
    let caustic = |n: usize, denominator: f64| Error::Caustic {
        beam,
        time: n as f64 * h,
        denominator,
    };
    let mut states = Vec::with_capacity(steps / stride + 1);
    states.push(init);
    let mut y = init.as_array();
    for n in 0..steps {
        let f0 = rate(v, &y).map_err(|d| caustic(n, d))?;
        let mut pred = y;
        for i in 0..9 {
            pred[i] += h * f0[i];
        }
        let f1 = rate(v, &pred).map_err(|d| caustic(n + 1, d))?;
        for i in 0..9 {
            y[i] += 0.5 * h * (f0[i] + f1[i]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical(format!(
                "beam {beam} diverged at t = {}",
                (n + 1) as f64 * h
            )));
        }
        if (n + 1) % stride == 0 {
            states.push(BeamState::from_array(&y));
        }
    }
    Ok(BeamTrajectory {
        step: h,
        stride,
        states,
    })
}
