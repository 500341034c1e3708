//! Fourier collocation baseline on a truncated periodic interval.
//!
//! The potential is sampled on `m` equispaced points of `[-L, L)` and the
//! derivative is the dense periodic spectral differentiation matrix, so the
//! operator has the same block form as the Chebyshev one and goes through
//! the same eigensolver and classifier.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::discretize::{block_operator, LambdaSign};
use crate::error::{Result, ZsError};
use crate::potentials::PotentialSpec;
use crate::spectrum::{classify_prepared, ClassifierConfig, Method, Prepared, SpectrumParams, SpectrumResult};

/// Truncation half-width used for the baseline comparison.
pub const DEFAULT_HALF_WIDTH: f64 = 25.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierGrid {
    half_width: f64,
    m: usize,
    nodes: Array1<f64>,
}

impl FourierGrid {
    pub fn new(half_width: f64, m: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(ZsError::invalid(format!("half-width must be positive, got {half_width}")));
        }
        if m < 8 || !m.is_multiple_of(2) {
            return Err(ZsError::invalid(format!("Fourier grid size must be even and >= 8, got {m}")));
        }
        let h = 2.0 * half_width / m as f64;
        let nodes = (0..m).map(|j| -half_width + j as f64 * h).collect();
        Ok(FourierGrid { half_width, m, nodes })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.m as f64
    }

    pub fn nodes(&self) -> &Array1<f64> {
        &self.nodes
    }

    /// Periodic spectral first-derivative matrix (even `m`, cotangent form).
    pub fn derivative_matrix(&self) -> Array2<f64> {
        let m = self.m;
        let h = 2.0 * PI / m as f64;
        let scale = PI / self.half_width;
        Array2::from_shape_fn((m, m), |(i, j)| {
            if i == j {
                0.0
            } else {
                let d = i as f64 - j as f64;
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                scale * 0.5 * sign / (0.5 * d * h).tan()
            }
        })
    }
}

/// Baseline spectrum with the default classifier, confirmation disabled.
pub fn fcm_spectrum(spec: &PotentialSpec, half_width: f64, m: usize, lambda_sign: LambdaSign) -> Result<SpectrumResult> {
    let config = ClassifierConfig {
        confirm: false,
        ..Default::default()
    };
    fcm_spectrum_with(spec, half_width, m, lambda_sign, &config)
}

pub fn fcm_spectrum_with(
    spec: &PotentialSpec,
    half_width: f64,
    m: usize,
    lambda_sign: LambdaSign,
    config: &ClassifierConfig,
) -> Result<SpectrumResult> {
    config.validate()?;
    let base = prepare(spec, half_width, m, lambda_sign)?;
    let confirm = if config.confirm {
        let m2 = (m + m.div_ceil(4)).next_multiple_of(2);
        Some(prepare(spec, half_width, m2, lambda_sign)?)
    } else {
        None
    };
    let (discrete_k, residuals) = classify_prepared(&base, &base.all_k, config, confirm.as_ref())
        .into_iter()
        .unzip();
    Ok(SpectrumResult {
        all_k: base.all_k,
        discrete_k,
        residuals,
        params: SpectrumParams {
            method: Method::Fcm,
            n: m,
            a: None,
            half_width: Some(half_width),
            lambda_sign,
            potential: spec.describe(),
        },
    })
}

fn prepare(spec: &PotentialSpec, half_width: f64, m: usize, lambda_sign: LambdaSign) -> Result<Prepared> {
    let grid = FourierGrid::new(half_width, m)?;
    let q = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let v = spec.eval(x)?;
            if v.re.is_finite() && v.im.is_finite() {
                Ok(v)
            } else {
                Err(ZsError::NumericDomain { index: j, x })
            }
        })
        .collect::<Result<Vec<Complex64>>>()?;
    let matrix = block_operator(&grid.derivative_matrix(), &q, lambda_sign);
    Prepared::from_matrix(&matrix)
}
