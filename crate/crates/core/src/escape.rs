//! Pixel grids classifying points by how long their orbits stay above a
//! threshold schedule. Evidence for escaping sets, not a certificate.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{Evaluator, DEFAULT_TOLERANCE};
use crate::modulus::{csv_err, fmt};
use crate::schedule::ThresholdSchedule;
use crate::spec::EntireFunctionSpec;

/// Iterates with a larger log-modulus cannot be stored as complex numbers.
pub const OVERFLOW_LOG: f64 = 700.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub lower_left: Complex64,
    pub upper_right: Complex64,
}

impl Rectangle {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        if !(x_min < x_max && y_min < y_max) {
            return Err(Error::ParameterOutOfRange(format!(
                "empty rectangle [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(Self {
            lower_left: Complex64::new(x_min, y_min),
            upper_right: Complex64::new(x_max, y_max),
        })
    }

    /// Centre of pixel `(i, j)`; row 0 is the top edge.
    pub fn pixel_center(&self, i: usize, j: usize, width: usize, height: usize) -> Complex64 {
        let dx = (self.upper_right.re - self.lower_left.re) / width as f64;
        let dy = (self.upper_right.im - self.lower_left.im) / height as f64;
        Complex64::new(
            self.lower_left.re + (i as f64 + 0.5) * dx,
            self.upper_right.im - (j as f64 + 0.5) * dy,
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PixelRecord {
    /// First `n` with `log |f^{n+L}(z)| < values[n]`, or `max_iter`.
    pub survived_steps: usize,
    /// Log-modulus of the last iterate computed.
    #[serde(with = "crate::logvalue::extended_f64")]
    pub final_log_modulus: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeGrid {
    pub rectangle: Rectangle,
    pub width: usize,
    pub height: usize,
    pub max_iter: usize,
    /// Row-major, top row first.
    pub pixels: Vec<PixelRecord>,
}

impl EscapeGrid {
    pub fn pixel(&self, i: usize, j: usize) -> PixelRecord {
        self.pixels[j * self.width + i]
    }

    /// Number of pixels per survived step count, `0..=max_iter`.
    pub fn histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.max_iter + 1];
        for p in &self.pixels {
            h[p.survived_steps] += 1;
        }
        h
    }
}

/// `f(z)` as a log-modulus and complex value; `None` past the range where
/// the value can be stored or evaluated.
fn step(spec: &EntireFunctionSpec, z: Complex64) -> Result<Option<(f64, Complex64)>> {
    let ev = match Evaluator::new(spec, z.norm().ln(), DEFAULT_TOLERANCE) {
        Ok(ev) => ev,
        Err(Error::TailNotConvergent(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    // the modulus alone is cheap; the argument can need every zero below |z|
    if ev.log_modulus(z.norm().ln(), z.arg()) > OVERFLOW_LOG {
        return Ok(None);
    }
    let v = ev.eval(z);
    Ok(Some((v.log_modulus, Complex64::from_polar(v.log_modulus.exp(), v.argument))))
}

/// The `k`-th iterate of `z`, or `None` when the orbit overflows first.
pub fn iterate_point(spec: &EntireFunctionSpec, z: Complex64, k: usize) -> Result<Option<Complex64>> {
    let mut w = z;
    for _ in 0..k {
        match step(spec, w)? {
            Some((_, next)) => w = next,
            None => return Ok(None),
        }
    }
    Ok(Some(w))
}

/// Classifies one point. An orbit that overflows counts as above every
/// later threshold; a zero modulus is below every threshold.
pub fn classify_point(
    spec: &EntireFunctionSpec,
    z: Complex64,
    schedule: &ThresholdSchedule,
    max_iter: usize,
) -> Result<PixelRecord> {
    let mut w = z;
    let mut log_mod = z.norm().ln();
    let mut k = 0;
    for n in 0..max_iter {
        while k < n + schedule.offset {
            match step(spec, w)? {
                Some((l, next)) => {
                    log_mod = l;
                    w = next;
                    k += 1;
                }
                None => {
                    return Ok(PixelRecord {
                        survived_steps: max_iter,
                        final_log_modulus: f64::INFINITY,
                    })
                }
            }
        }
        if log_mod == f64::NEG_INFINITY || log_mod < schedule.values[n] {
            return Ok(PixelRecord {
                survived_steps: n,
                final_log_modulus: log_mod,
            });
        }
    }
    Ok(PixelRecord {
        survived_steps: max_iter,
        final_log_modulus: log_mod,
    })
}

/// Classifies every pixel centre of a `width × height` grid. Rows run in
/// parallel; the result does not depend on the thread count.
pub fn render_escape(
    spec: &EntireFunctionSpec,
    rectangle: Rectangle,
    width: usize,
    height: usize,
    schedule: &ThresholdSchedule,
    max_iter: usize,
) -> Result<EscapeGrid> {
    if width == 0 || height == 0 {
        return Err(Error::ParameterOutOfRange(format!("empty resolution {width}x{height}")));
    }
    if max_iter > schedule.len() {
        return Err(Error::ParameterOutOfRange(format!(
            "max_iter {max_iter} exceeds the schedule length {}",
            schedule.len()
        )));
    }
    let rows = (0..height)
        .into_par_iter()
        .map(|j| {
            (0..width)
                .map(|i| classify_point(spec, rectangle.pixel_center(i, j, width, height), schedule, max_iter))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EscapeGrid {
        rectangle,
        width,
        height,
        max_iter,
        pixels: rows.into_iter().flatten().collect(),
    })
}

/// Binary graymap with `survived_steps · 255 / max_iter` intensities.
pub fn write_pgm(grid: &EscapeGrid, mut out: impl Write) -> Result<()> {
    write!(out, "P5\n{} {}\n255\n", grid.width, grid.height)?;
    let bytes: Vec<u8> = grid
        .pixels
        .iter()
        .map(|p| {
            if grid.max_iter == 0 {
                0
            } else {
                ((p.survived_steps * 255 + grid.max_iter / 2) / grid.max_iter) as u8
            }
        })
        .collect();
    out.write_all(&bytes)?;
    out.flush()?;
    Ok(())
}

/// Rows `x, y, survived_steps, final_log_modulus` in pixel order.
pub fn write_grid_csv(grid: &EscapeGrid, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "survived_steps", "final_log_modulus"]).map_err(csv_err)?;
    for j in 0..grid.height {
        for i in 0..grid.width {
            let z = grid.rectangle.pixel_center(i, j, grid.width, grid.height);
            let p = grid.pixel(i, j);
            w.write_record([fmt(z.re), fmt(z.im), p.survived_steps.to_string(), fmt(p.final_log_modulus)])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn export_grid(grid: &EscapeGrid, image_path: &Path, csv_path: &Path) -> Result<()> {
    if grid.pixels.is_empty() {
        return Err(Error::ParameterOutOfRange("cannot export an empty grid".into()));
    }
    write_pgm(grid, BufWriter::new(File::create(image_path)?))?;
    write_grid_csv(grid, BufWriter::new(File::create(csv_path)?))
}
