//! Preset configurations for the standard experiments, at desk scale.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{
    BathSection, GridSection, InchwormSection, OutputSection, PotentialKind, PotentialSection, Psi0Kind,
    Psi0Section, SimConfig, TimeSection,
};

/// Work units above which a run needs explicit confirmation.
pub const COST_LIMIT: f64 = 1e11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Uncoupled harmonic run checked against the spectral reference.
    Validity,
    /// Harmonic oscillator over a sweep of couplings.
    Harmonic,
    /// Two-peak initial state in a harmonic well over a sweep of couplings.
    TwoPeak,
    /// Two-peak state in the double well at strong coupling, first and third order.
    DoubleWell,
    /// Whatever the supplied config says.
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::Validity,
        Scenario::Harmonic,
        Scenario::TwoPeak,
        Scenario::DoubleWell,
        Scenario::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Validity => "validity",
            Scenario::Harmonic => "harmonic",
            Scenario::TwoPeak => "two_peak",
            Scenario::DoubleWell => "double_well",
            Scenario::Custom => "custom",
        }
    }

    /// Base configuration; `None` for [`Scenario::Custom`].
    pub fn preset(self) -> Option<SimConfig> {
        let harmonic = SimConfig {
            epsilon: 1.0 / 16.0,
            potential: PotentialSection {
                kind: PotentialKind::Quadratic,
                coeffs: vec![0.5],
            },
            psi0: Psi0Section {
                kind: Psi0Kind::Gaussian,
                p0: 0.25,
                q0: 0.0,
                width: 2.0,
            },
            bath: BathSection {
                modes: 400,
                xi: 0.0,
                omega_c: 2.5,
                omega_max: 10.0,
                beta: 5.0,
            },
            grid: GridSection {
                p_min: -1.0,
                p_max: 3.0,
                q_min: -2.0,
                q_max: 2.0,
                dp: 0.125,
                dq: 0.125,
            },
            time: TimeSection {
                dt: 0.25,
                steps: 20,
                dt_rk: 0.005,
            },
            inchworm: InchwormSection { m_bar: 1 },
            output: OutputSection {
                x_min: -2.5,
                x_max: 2.5,
                nx: 161,
                times: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            },
        };
        let two_peak = SimConfig {
            psi0: Psi0Section {
                kind: Psi0Kind::TwoPeak,
                p0: 0.0,
                q0: 0.0,
                width: 2.0,
            },
            grid: GridSection {
                p_min: -2.0,
                p_max: 2.0,
                ..harmonic.grid.clone()
            },
            ..harmonic.clone()
        };
        match self {
            Scenario::Validity => Some(harmonic),
            Scenario::Harmonic => Some(SimConfig {
                bath: BathSection { xi: 1.6, ..harmonic.bath.clone() },
                ..harmonic
            }),
            Scenario::TwoPeak => Some(SimConfig {
                bath: BathSection { xi: 1.6, ..two_peak.bath.clone() },
                ..two_peak
            }),
            Scenario::DoubleWell => Some(SimConfig {
                potential: PotentialSection {
                    kind: PotentialKind::DoubleWell,
                    coeffs: vec![-1.0, 2.0],
                },
                bath: BathSection { xi: 12.8, ..two_peak.bath.clone() },
                time: TimeSection {
                    dt: 0.15,
                    steps: 20,
                    dt_rk: 0.005,
                },
                output: OutputSection {
                    times: vec![0.0, 1.5, 3.0],
                    ..two_peak.output.clone()
                },
                ..two_peak
            }),
            Scenario::Custom => None,
        }
    }

    /// Labeled runs making up the experiment, derived from `base`.
    ///
    /// `xi` and `m_bar` pin the swept parameter to a single value.
    pub fn runs(self, base: &SimConfig, xi: Option<f64>, m_bar: Option<usize>) -> Vec<(String, SimConfig)> {
        let with = |xi: f64, m_bar: usize| {
            let mut c = base.clone();
            c.bath.xi = xi;
            c.inchworm.m_bar = m_bar;
            c
        };
        let xi_sweep = |values: &[f64]| -> Vec<(String, SimConfig)> {
            let values = xi.map_or_else(|| values.to_vec(), |x| vec![x]);
            let m = m_bar.unwrap_or(base.inchworm.m_bar);
            values.iter().map(|&x| (format!("xi_{x}"), with(x, m))).collect()
        };
        match self {
            Scenario::Validity => vec![(self.name().to_owned(), with(xi.unwrap_or(0.0), m_bar.unwrap_or(1)))],
            Scenario::Harmonic | Scenario::TwoPeak => xi_sweep(&[0.0, 0.4, 0.8, 1.6]),
            Scenario::DoubleWell => {
                let x = xi.unwrap_or(base.bath.xi);
                let ms = m_bar.map_or_else(|| vec![1, 3], |m| vec![m]);
                ms.into_iter().map(|m| (format!("m_bar_{m}"), with(x, m))).collect()
            }
            Scenario::Custom => vec![(
                self.name().to_owned(),
                with(xi.unwrap_or(base.bath.xi), m_bar.unwrap_or(base.inchworm.m_bar)),
            )],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::config(format!("unknown scenario {s:?}")))
    }
}

/// Work estimate `K^(5/2) + K^2 N^(M+2)` in abstract units.
pub fn cost_estimate(cfg: &SimConfig) -> f64 {
    let beams = crate::fga::BeamGrid::from_config(cfg).map_or(0.0, |g| g.len() as f64);
    let n = cfg.time.steps as f64;
    beams.powf(2.5) + beams * beams * n.powi(cfg.inchworm.m_bar as i32 + 2)
}
