use serde::{Deserialize, Serialize};
use std::path::Path;

use super::{InitialState, Potential};
use crate::bath::OhmicSpec;
use crate::error::{Error, Result};

// relative slack when checking that one step divides another
const COMMENSURATE_TOL: f64 = 1e-9;

/// Full run configuration, as read from a TOML file.
///
/// Keys are grouped in tables (`bath.xi`, `time.N`, ...); dotted keys at the
/// top level and `[bath]`-style tables parse identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub epsilon: f64,
    pub potential: PotentialSection,
    pub psi0: Psi0Section,
    pub bath: BathSection,
    pub grid: GridSection,
    pub time: TimeSection,
    pub inchworm: InchwormSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Quadratic,
    DoubleWell,
    Polynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub kind: PotentialKind,
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Psi0Kind {
    Gaussian,
    TwoPeak,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Psi0Section {
    pub kind: Psi0Kind,
    #[serde(default)]
    pub p0: f64,
    #[serde(default)]
    pub q0: f64,
    /// Position variance in units of `epsilon`.
    #[serde(default = "default_width")]
    pub width: f64,
}

fn default_width() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    #[serde(rename = "L")]
    pub modes: usize,
    pub xi: f64,
    pub omega_c: f64,
    pub omega_max: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub p_min: f64,
    pub p_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub dp: f64,
    pub dq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    #[serde(rename = "N")]
    pub steps: usize,
    pub dt_rk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InchwormSection {
    #[serde(rename = "M_bar")]
    pub m_bar: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub times: Vec<f64>,
}

/// Number of whole steps of size `step` in `span`, if it is (nearly) an integer.
pub(crate) fn whole_steps(span: f64, step: f64) -> Option<usize> {
    let r = span / step;
    let n = r.round();
    if n >= 0.0 && (r - n).abs() <= COMMENSURATE_TOL * n.max(1.0) {
        Some(n as usize)
    } else {
        None
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SimConfig =
            toml::from_str(text).map_err(|e| Error::config(e.to_string().trim_end().to_owned()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        positive("epsilon", self.epsilon)?;
        self.potential()?;
        self.initial_state()?;

        let b = &self.bath;
        if !(b.xi >= 0.0 && b.xi.is_finite()) {
            return Err(Error::config(format!("bath.xi must be >= 0, got {}", b.xi)));
        }
        positive("bath.omega_c", b.omega_c)?;
        positive("bath.omega_max", b.omega_max)?;
        positive("bath.beta", b.beta)?;

        let g = &self.grid;
        positive("grid.dp", g.dp)?;
        positive("grid.dq", g.dq)?;
        for (name, lo, hi, step) in [("p", g.p_min, g.p_max, g.dp), ("q", g.q_min, g.q_max, g.dq)] {
            if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
                return Err(Error::config(format!("grid.{name}_min..{name}_max is not a range")));
            }
            if whole_steps(hi - lo, step).is_none() {
                return Err(Error::config(format!(
                    "grid.d{name} = {step} does not divide the {name} range [{lo}, {hi}]"
                )));
            }
        }

        let t = &self.time;
        positive("time.dt", t.dt)?;
        positive("time.dt_rk", t.dt_rk)?;
        if t.steps == 0 {
            return Err(Error::config("time.N must be at least 1"));
        }
        if whole_steps(t.dt, t.dt_rk).map_or(true, |n| n == 0) {
            return Err(Error::config(format!(
                "time.dt_rk = {} does not divide time.dt = {}",
                t.dt_rk, t.dt
            )));
        }

        if ![1, 3, 5].contains(&self.inchworm.m_bar) {
            return Err(Error::config(format!(
                "inchworm.M_bar must be 1, 3 or 5, got {}",
                self.inchworm.m_bar
            )));
        }

        let o = &self.output;
        if o.nx == 0 || !(o.x_max >= o.x_min) {
            return Err(Error::config("output grid is empty"));
        }
        if o.nx > 1 {
            let spacing = (o.x_max - o.x_min) / (o.nx - 1) as f64;
            let limit = self.epsilon.sqrt() / 4.0;
            if spacing > limit * (1.0 + COMMENSURATE_TOL) {
                return Err(Error::config(format!(
                    "output spacing {spacing} exceeds sqrt(epsilon)/4 = {limit}"
                )));
            }
        }
        if o.times.is_empty() {
            return Err(Error::config("output.times is empty"));
        }
        for &time in &o.times {
            match whole_steps(time, t.dt) {
                Some(n) if n <= t.steps => {}
                _ => {
                    return Err(Error::config(format!(
                        "output time {time} is not a grid time j*dt with 0 <= j <= N"
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn potential(&self) -> Result<Potential> {
        let c = &self.potential.coeffs;
        let v = match (self.potential.kind, c.as_slice()) {
            (PotentialKind::Quadratic, &[coeff]) => Potential::Quadratic { coeff },
            (PotentialKind::DoubleWell, &[a, b]) => Potential::DoubleWell { a, b },
            (PotentialKind::Polynomial, cs) if !cs.is_empty() => Potential::Polynomial { coeffs: cs.to_vec() },
            (kind, cs) => {
                return Err(Error::config(format!(
                    "potential.coeffs has {} entries, which does not fit kind {kind:?}",
                    cs.len()
                )))
            }
        };
        if !v.is_finite() {
            return Err(Error::config("potential.coeffs must be finite"));
        }
        Ok(v)
    }

    pub fn initial_state(&self) -> Result<InitialState> {
        let s = &self.psi0;
        Ok(match s.kind {
            Psi0Kind::Gaussian => {
                positive("psi0.width", s.width)?;
                InitialState::Gaussian {
                    q0: s.q0,
                    p0: s.p0,
                    width: s.width,
                }
            }
            Psi0Kind::TwoPeak => InitialState::TwoPeak,
        })
    }

    pub fn ohmic(&self) -> OhmicSpec {
        OhmicSpec {
            xi: self.bath.xi,
            omega_c: self.bath.omega_c,
            omega_max: self.bath.omega_max,
            modes: self.bath.modes,
        }
    }

    /// Heun substeps per coarse time step.
    pub fn substeps(&self) -> usize {
        whole_steps(self.time.dt, self.time.dt_rk).expect("validated")
    }

    /// Final time `N * dt`.
    pub fn horizon(&self) -> f64 {
        self.time.steps as f64 * self.time.dt
    }

    /// Coarse step index of each output time.
    pub fn output_steps(&self) -> Vec<usize> {
        self.output
            .times
            .iter()
            .map(|&t| whole_steps(t, self.time.dt).expect("validated"))
            .collect()
    }

    pub fn x_grid(&self) -> Vec<f64> {
        let o = &self.output;
        if o.nx == 1 {
            return vec![o.x_min];
        }
        let h = (o.x_max - o.x_min) / (o.nx - 1) as f64;
        (0..o.nx).map(|i| o.x_min + i as f64 * h).collect()
    }
}
