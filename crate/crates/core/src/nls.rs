//! Split-step Fourier evolution of the focusing NLS equation
//!
//! ```text
//!     i q_t + q_xx + 2 |q|² q = 0
//! ```
//!
//! on the periodic interval `[-L, L)`. Each Strang step is a half nonlinear
//! phase rotation `q ← q exp(2i|q|²τ/2)`, an exact linear step
//! `q̂ ← q̂ exp(-iξ²τ)` in transform space, and another half rotation.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, ZsError};
use crate::potentials::PotentialSpec;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_STRIDE: usize = 50;

/// Magic bytes of the binary frame format.
pub const FRAME_MAGIC: &[u8; 4] = b"ZSEV";

#[derive(Debug, Clone)]
pub struct EvolutionSetup {
    pub half_width: f64,
    pub m: usize,
    pub t_end: f64,
    pub dt: f64,
    /// Frames are saved every `stride` steps, plus the final step.
    pub stride: usize,
    pub initial: PotentialSpec,
}

impl EvolutionSetup {
    pub fn new(initial: PotentialSpec, half_width: f64, m: usize, t_end: f64) -> Self {
        EvolutionSetup {
            half_width,
            m,
            t_end,
            dt: DEFAULT_DT,
            stride: DEFAULT_STRIDE,
            initial,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(ZsError::invalid(format!("half-width must be positive, got {}", self.half_width)));
        }
        if self.m < 4 {
            return Err(ZsError::invalid(format!("evolution grid needs at least 4 nodes, got {}", self.m)));
        }
        if !self.m.is_power_of_two() {
            log::warn!("grid size {} is not a power of two; transforms will be slower", self.m);
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(ZsError::invalid(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(ZsError::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.stride == 0 {
            return Err(ZsError::invalid("frame stride must be at least 1"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.m).map(|j| -self.half_width + j as f64 * dx).collect()
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.m as f64
    }

    /// Number of steps; `dt` is shortened slightly when it does not divide `t_end`.
    fn steps(&self) -> (usize, f64) {
        let steps = (self.t_end / self.dt - 1e-9).ceil().max(1.0) as usize;
        (steps, self.t_end / steps as f64)
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    /// One saved frame per row.
    pub field: Array2<Complex64>,
    pub mass_series: Vec<f64>,
}

impl EvolutionResult {
    pub fn last_frame(&self) -> Vec<Complex64> {
        self.field.row(self.field.nrows() - 1).to_vec()
    }

    /// Largest relative deviation of the mass from its initial value.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.mass_series[0];
        self.mass_series
            .iter()
            .map(|m| (m - m0).abs() / m0.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }

    /// `|q|` as CSV: a header `t` followed by the grid, then one row per frame.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "t")?;
        for x in &self.x {
            write!(w, ",{x}")?;
        }
        writeln!(w)?;
        for (t, row) in self.times.iter().zip(self.field.rows()) {
            write!(w, "{t}")?;
            for q in row {
                write!(w, ",{}", q.norm())?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// `ZSEV`, frame count and grid size as little-endian u64, then the field
    /// row by row with re/im interleaved as little-endian f64.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(FRAME_MAGIC)?;
        w.write_all(&(self.field.nrows() as u64).to_le_bytes())?;
        w.write_all(&(self.field.ncols() as u64).to_le_bytes())?;
        for q in self.field.iter() {
            w.write_all(&q.re.to_le_bytes())?;
            w.write_all(&q.im.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Reads a field written by [`EvolutionResult::write_binary`].
pub fn read_binary<R: Read>(mut r: R) -> Result<Array2<Complex64>> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != FRAME_MAGIC {
        return Err(ZsError::invalid("not a ZSEV frame file"));
    }
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let mut data = Vec::with_capacity(rows * cols);
    let mut pair = [0u8; 16];
    for _ in 0..rows * cols {
        r.read_exact(&mut pair)?;
        let re = f64::from_le_bytes(pair[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(pair[8..].try_into().expect("8 bytes"));
        data.push(Complex64::new(re, im));
    }
    Array2::from_shape_vec((rows, cols), data).map_err(|e| ZsError::Numeric(e.to_string()))
}

/// Periodic rectangle rule for `∫|q|² dx`.
pub fn mass(row: &[Complex64], dx: f64) -> f64 {
    row.iter().map(|q| q.norm_sqr()).sum::<f64>() * dx
}

pub fn evolve(setup: &EvolutionSetup) -> Result<EvolutionResult> {
    setup.validate()?;
    let x = setup.grid();
    let initial = x
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let v = setup.initial.eval(xj)?;
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(ZsError::NumericDomain { index: j, x: xj })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    evolve_from(setup, initial)
}

/// Evolves an explicit initial field sampled on `setup.grid()`.
pub fn evolve_from(setup: &EvolutionSetup, initial: Vec<Complex64>) -> Result<EvolutionResult> {
    setup.validate()?;
    if initial.len() != setup.m {
        return Err(ZsError::invalid(format!(
            "initial field has {} samples, grid has {}",
            initial.len(),
            setup.m
        )));
    }
    let m = setup.m;
    let dx = setup.dx();
    let (steps, dt) = setup.steps();
    let stepper = Stepper::new(m, setup.half_width, dt);

    let mut q = initial;
    let mut times = vec![0.0];
    let mut frames = q.clone();
    let mut mass_series = vec![mass(&q, dx)];
    for step in 1..=steps {
        stepper.step(&mut q);
        let t = step as f64 * dt;
        if q.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(ZsError::BlowUp { time: t });
        }
        if step % setup.stride == 0 || step == steps {
            times.push(t);
            frames.extend_from_slice(&q);
            mass_series.push(mass(&q, dx));
        }
    }
    let field = Array2::from_shape_vec((times.len(), m), frames).expect("frame count matches");
    Ok(EvolutionResult {
        x: setup.grid(),
        times,
        field,
        mass_series,
    })
}

struct Stepper {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// `exp(-iξ²dt) / m`, folding in the inverse transform normalization.
    propagator: Vec<Complex64>,
    half_dt: f64,
}

impl Stepper {
    fn new(m: usize, half_width: f64, dt: f64) -> Self {
        let mut planner = FftPlanner::new();
        let scale = 1.0 / m as f64;
        let propagator = (0..m)
            .map(|j| {
                let j = if j < m / 2 { j as f64 } else { j as f64 - m as f64 };
                let xi = PI * j / half_width;
                Complex64::from_polar(scale, -xi * xi * dt)
            })
            .collect();
        Stepper {
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
            propagator,
            half_dt: 0.5 * dt,
        }
    }

    fn nonlinear(&self, q: &mut [Complex64]) {
        for v in q.iter_mut() {
            *v *= Complex64::from_polar(1.0, 2.0 * v.norm_sqr() * self.half_dt);
        }
    }

    fn step(&self, q: &mut [Complex64]) {
        self.nonlinear(q);
        self.forward.process(q);
        for (v, p) in q.iter_mut().zip(&self.propagator) {
            *v *= p;
        }
        self.inverse.process(q);
        self.nonlinear(q);
    }
}

/// Counts localized humps of `|q|`: periodic local maxima above
/// `threshold · max|q|`, keeping the tallest of any that lie closer than
/// `min_separation` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureCounter {
    pub threshold: f64,
    pub min_separation: usize,
}

impl Default for StructureCounter {
    fn default() -> Self {
        StructureCounter {
            threshold: 0.25,
            min_separation: 8,
        }
    }
}

impl StructureCounter {
    /// Grid indices of the accepted peaks, in ascending order.
    pub fn peaks(&self, amplitude: &[f64]) -> Vec<usize> {
        let m = amplitude.len();
        if m == 0 {
            return Vec::new();
        }
        let top = amplitude.iter().copied().fold(0.0, f64::max);
        if top <= 0.0 {
            return Vec::new();
        }
        let cut = self.threshold * top;
        let mut candidates: Vec<usize> = (0..m)
            .filter(|&i| {
                let v = amplitude[i];
                let left = amplitude[(i + m - 1) % m];
                let right = amplitude[(i + 1) % m];
                v >= cut && v > left && v >= right
            })
            .collect();
        candidates.sort_by(|&a, &b| amplitude[b].total_cmp(&amplitude[a]).then(a.cmp(&b)));
        let mut kept: Vec<usize> = Vec::new();
        for i in candidates {
            let far = kept.iter().all(|&k| {
                let d = i.abs_diff(k);
                d.min(m - d) >= self.min_separation
            });
            if far {
                kept.push(i);
            }
        }
        kept.sort_unstable();
        kept
    }

    pub fn count(&self, amplitude: &[f64]) -> usize {
        self.peaks(amplitude).len()
    }

    pub fn count_field(&self, row: &[Complex64]) -> usize {
        let amplitude: Vec<f64> = row.iter().map(|q| q.norm()).collect();
        self.count(&amplitude)
    }
}

/// Structures expected from upper-half-plane eigenvalues: eigenvalues with
/// the same real part travel together, so each distinct `Re k` is one soliton
/// or one bound breather.
pub fn expected_structures(upper: &[Complex64], tol: f64) -> usize {
    let mut reals: Vec<f64> = upper.iter().filter(|k| k.im > 0.0).map(|k| k.re).collect();
    reals.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut last = f64::NEG_INFINITY;
    for r in reals {
        if r - last > tol {
            count += 1;
        }
        last = r;
    }
    count
}
