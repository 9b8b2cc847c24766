//! CSV and JSON writers for run artifacts.
//!
//! Floats use the shortest representation that round-trips, so identical
//! results give byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::assembly::DensityResult;
use crate::error::Result;
use crate::fga::BeamSet;
use crate::inchworm::Coefficients;
use crate::model::SimConfig;
use crate::pipeline::Timing;

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// `t,x,f` rows, time-major.
pub fn write_density(path: &Path, d: &DensityResult) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "t,x,f")?;
    for (t, row) in d.times.iter().zip(&d.f) {
        for (x, f) in d.x.iter().zip(row) {
            writeln!(w, "{t},{x},{f}")?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `t,mass,imag_residue` per output time.
pub fn write_diagnostics(path: &Path, d: &DensityResult) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "t,mass,imag_residue")?;
    for ((t, m), r) in d.times.iter().zip(&d.mass).zip(&d.imag_residue) {
        writeln!(w, "{t},{m},{r}")?;
    }
    w.flush()?;
    Ok(())
}

/// `t,x1,x2,re,im`; does nothing if the run kept no reduced density.
pub fn write_rho(path: &Path, d: &DensityResult) -> Result<()> {
    let Some(rho) = &d.rho else { return Ok(()) };
    let mut w = create(path)?;
    writeln!(w, "t,x1,x2,re,im")?;
    for (t, m) in d.times.iter().zip(rho) {
        for (x1, row) in d.x.iter().zip(m) {
            for (x2, z) in d.x.iter().zip(row) {
                writeln!(w, "{t},{x1},{x2},{},{}", z.re, z.im)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `k,t,P,Q,S,re_a,im_a` at every coarse step.
pub fn write_beams(path: &Path, beams: &BeamSet) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "k,t,P,Q,S,re_a,im_a")?;
    for (k, b) in beams.beams.iter().enumerate() {
        let tr = &b.trajectory;
        for n in 0..tr.states.len() {
            let s = tr.at(n);
            writeln!(
                w,
                "{k},{},{},{},{},{},{}",
                tr.time(n),
                s.momentum,
                s.position,
                s.action,
                s.amplitude.re,
                s.amplitude.im
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `k1,k2,n,re,im` for the stored pairs `k1 <= k2`.
pub fn write_coefficients(path: &Path, c: &Coefficients) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "k1,k2,n,re,im")?;
    for (k1, k2) in c.pairs() {
        for n in 0..=c.steps() {
            let z = c.get(k1, k2, n);
            writeln!(w, "{k1},{k2},{n},{},{}", z.re, z.im)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `t,x,f` for spectral snapshots `|psi|^2` sampled at `xs`.
pub fn write_reference(path: &Path, times: &[f64], xs: &[f64], psi: &[Vec<Complex64>]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "t,x,f")?;
    for (t, row) in times.iter().zip(psi) {
        for (x, p) in xs.iter().zip(row) {
            writeln!(w, "{t},{x},{}", p.norm_sqr())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_timing(path: &Path, timing: &Timing) -> Result<()> {
    let text = serde_json::to_string_pretty(timing).expect("timing serializes");
    std::fs::write(path, text + "\n")?;
    Ok(())
}

pub fn write_config(path: &Path, cfg: &SimConfig) -> Result<()> {
    std::fs::write(path, cfg.to_toml_string())?;
    Ok(())
}

/// Reads back an `f.csv` as `(t, x, f)` triples.
pub fn read_density(path: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let text = std::fs::read_to_string(path)?;
    let bad = |line: &str| crate::error::Error::config(format!("malformed density row {line:?}"));
    text.lines()
        .skip(1)
        .map(|line| {
            let v: Vec<f64> = line
                .split(',')
                .map(|s| s.parse::<f64>().map_err(|_| bad(line)))
                .collect::<Result<_>>()?;
            match v[..] {
                [t, x, f] => Ok((t, x, f)),
                _ => Err(bad(line)),
            }
        })
        .collect()
}
