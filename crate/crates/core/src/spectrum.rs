//! End-to-end spectra: assemble, solve, map `μ → k = -iμ`, and separate the
//! discrete eigenvalues from the discretized continuous spectrum.
//!
//! The continuous spectrum of a decaying focusing potential is the real
//! `k` axis; the collocated operator scatters it into a thin band around
//! that axis and adds a few structural modes at the edge of the resolved
//! wavenumbers. A candidate is kept as a discrete eigenvalue when it sits
//! off the band (`|Im k| > tau_im`), reappears within `delta_match` in a
//! second solve at `n + ceil(n/4)` nodes, and has a small operator residual
//! at both resolutions.

use ndarray::Array1;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::chebyshev::ChebyshevBasis;
use crate::discretize::{assemble, k_from_mu, residual, LambdaSign};
use crate::eigensolver::{sort_spectrum, Factorization};
use crate::error::{Result, ZsError};
use crate::mapping::DomainMap;
use crate::potentials::PotentialSpec;

/// Smallest node count accepted by [`compute_spectrum`].
pub const MIN_NODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    /// Candidates need `|Im k|` above this.
    pub tau_im: f64,
    /// Maximum distance to a partner eigenvalue in the confirmation solve.
    pub delta_match: f64,
    /// Candidates closer than this are averaged into one.
    pub merge_radius: f64,
    /// Largest accepted `‖Aψ − ikψ‖ / ‖ψ‖`.
    pub max_residual: f64,
    /// Run the second-resolution confirmation solve.
    pub confirm: bool,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            tau_im: 1e-2,
            delta_match: 5e-5,
            merge_radius: 1e-8,
            max_residual: 1e-6,
            confirm: true,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if ok(self.tau_im) && ok(self.delta_match) && ok(self.merge_radius) && ok(self.max_residual) {
            Ok(())
        } else {
            Err(ZsError::invalid("classifier thresholds must be finite and non-negative"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Chebyshev,
    Fcm,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Chebyshev => "chebyshev",
            Method::Fcm => "fcm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumParams {
    pub method: Method,
    /// Node count (Chebyshev) or grid size (Fourier).
    pub n: usize,
    /// Map steepness; Chebyshev only.
    pub a: Option<f64>,
    /// Truncation half-width; Fourier only.
    pub half_width: Option<f64>,
    pub lambda_sign: LambdaSign,
    pub potential: String,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Every eigenvalue of the discrete operator as a spectral parameter `k`.
    pub all_k: Vec<Complex64>,
    pub discrete_k: Vec<Complex64>,
    /// Residual of each entry of `discrete_k`.
    pub residuals: Vec<f64>,
    pub params: SpectrumParams,
}

impl SpectrumResult {
    /// Discrete eigenvalues in the upper half plane.
    pub fn upper(&self) -> Vec<Complex64> {
        self.discrete_k.iter().copied().filter(|k| k.im > 0.0).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// Distance from `reference` to the closest discrete eigenvalue.
    pub fn discrete_error(&self, reference: Complex64) -> Option<f64> {
        nearest(&self.discrete_k, reference)
    }

    /// Error at `reference` measured on the computed eigenvalue closest to it,
    /// and whether that eigenvalue was classified as discrete.
    pub fn tracked_error(&self, reference: Complex64) -> Option<(f64, bool)> {
        let closest = self
            .all_k
            .iter()
            .copied()
            .min_by(|x, y| (x - reference).norm().total_cmp(&(y - reference).norm()))?;
        let classified = self
            .discrete_k
            .iter()
            .copied()
            .filter(|d| (d - closest).norm() <= TRACK_TOL)
            .min_by(|x, y| (x - reference).norm().total_cmp(&(y - reference).norm()));
        Some(match classified {
            Some(d) => ((d - reference).norm(), true),
            None => ((closest - reference).norm(), false),
        })
    }
}

/// A discrete eigenvalue within this of a computed one is the same eigenvalue
/// (covers the shift from averaging merged duplicates).
const TRACK_TOL: f64 = 1e-8;

fn nearest(set: &[Complex64], z: Complex64) -> Option<f64> {
    set.iter().map(|k| (k - z).norm()).min_by(f64::total_cmp)
}

/// A solved operator: its factorization and the sorted spectral parameters.
pub(crate) struct Prepared {
    pub factorization: Factorization,
    pub all_k: Vec<Complex64>,
}

impl Prepared {
    pub fn from_matrix(matrix: &ndarray::Array2<Complex64>) -> Result<Self> {
        let factorization = Factorization::new(matrix)?;
        let decomposition = factorization.decompose(false)?;
        let mut all_k: Vec<Complex64> = decomposition.eigenvalues.iter().map(|&mu| k_from_mu(mu)).collect();
        sort_spectrum(&mut all_k);
        Ok(Prepared { factorization, all_k })
    }

    /// Residual of the best eigenvector for `k`, or `None` if inverse iteration fails.
    fn residual_at(&self, k: Complex64) -> Option<(f64, Array1<Complex64>)> {
        let mu = Complex64::i() * k;
        let v = self.factorization.eigenvector(mu).ok()?;
        let r = self.factorization_residual(k, &v)?;
        Some((r, v))
    }

    fn factorization_residual(&self, k: Complex64, v: &Array1<Complex64>) -> Option<f64> {
        residual(self.factorization.original(), k, v.as_slice()?).ok()
    }
}

fn prepare_chebyshev(spec: &PotentialSpec, n: usize, a: f64, lambda_sign: LambdaSign) -> Result<Prepared> {
    let basis = ChebyshevBasis::new(n)?;
    let map = DomainMap::new(a)?;
    let pot = spec.sample(&basis, &map)?;
    let op = assemble(&basis, &map, &pot, lambda_sign)?;
    Prepared::from_matrix(&op.matrix)
}

/// Node count of the confirmation solve.
pub fn confirmation_nodes(n: usize) -> usize {
    n + n.div_ceil(4)
}

pub fn compute_spectrum(spec: &PotentialSpec, n: usize, a: f64, lambda_sign: LambdaSign) -> Result<SpectrumResult> {
    compute_spectrum_with(spec, n, a, lambda_sign, &ClassifierConfig::default())
}

pub fn compute_spectrum_with(
    spec: &PotentialSpec,
    n: usize,
    a: f64,
    lambda_sign: LambdaSign,
    config: &ClassifierConfig,
) -> Result<SpectrumResult> {
    if n < MIN_NODES {
        return Err(ZsError::invalid(format!("spectrum needs n >= {MIN_NODES}, got {n}")));
    }
    DomainMap::new(a)?;
    config.validate()?;
    let base = prepare_chebyshev(spec, n, a, lambda_sign)?;
    let confirm = if config.confirm {
        Some(prepare_chebyshev(spec, confirmation_nodes(n), a, lambda_sign)?)
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
            method: Method::Chebyshev,
            n,
            a: Some(a),
            half_width: None,
            lambda_sign,
            potential: spec.describe(),
        },
    })
}

/// Discrete eigenvalues among `all_k`, which came from a solve at `(n, a)`.
pub fn classify_discrete(
    all_k: &[Complex64],
    n: usize,
    spec: &PotentialSpec,
    a: f64,
    lambda_sign: LambdaSign,
    config: &ClassifierConfig,
) -> Result<Vec<Complex64>> {
    config.validate()?;
    let base = prepare_chebyshev(spec, n, a, lambda_sign)?;
    let confirm = if config.confirm {
        Some(prepare_chebyshev(spec, confirmation_nodes(n), a, lambda_sign)?)
    } else {
        None
    };
    Ok(classify_prepared(&base, all_k, config, confirm.as_ref())
        .into_iter()
        .map(|(k, _)| k)
        .collect())
}

/// Filters `candidates` against `base` (residuals) and `confirm` (second resolution).
pub(crate) fn classify_prepared(
    base: &Prepared,
    candidates: &[Complex64],
    config: &ClassifierConfig,
    confirm: Option<&Prepared>,
) -> Vec<(Complex64, f64)> {
    let mut kept: Vec<(Complex64, Option<Complex64>)> = Vec::new();
    for &k in candidates.iter().filter(|k| k.im.abs() > config.tau_im) {
        match confirm {
            None => kept.push((k, None)),
            Some(c) => {
                let partner = c
                    .all_k
                    .iter()
                    .copied()
                    .min_by(|x, y| (x - k).norm().total_cmp(&(y - k).norm()));
                if let Some(p) = partner.filter(|p| (p - k).norm() <= config.delta_match) {
                    kept.push((k, Some(p)));
                }
            }
        }
    }

    // average coincident duplicates
    let mut merged: Vec<(Complex64, Option<Complex64>, usize)> = Vec::new();
    for (k, p) in kept {
        match merged
            .iter_mut()
            .find(|(m, _, cnt)| (*m / *cnt as f64 - k).norm() <= config.merge_radius)
        {
            Some(entry) => {
                entry.0 += k;
                entry.2 += 1;
            }
            None => merged.push((k, p, 1)),
        }
    }

    let mut out = Vec::new();
    for (sum, partner, cnt) in merged {
        let k = sum / cnt as f64;
        let Some((res, _)) = base.residual_at(k) else {
            continue;
        };
        if res > config.max_residual {
            continue;
        }
        if let (Some(c), Some(p)) = (confirm, partner) {
            match c.residual_at(p) {
                Some((r2, _)) if r2 <= config.max_residual => {}
                _ => continue,
            }
        }
        out.push((k, res));
    }
    out.sort_by(|a, b| b.0.im.total_cmp(&a.0.im).then(a.0.re.total_cmp(&b.0.re)));
    out
}

/// Eigenfunction components sampled at the mapped nodes.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    /// The computed eigenvalue closest to the requested one.
    pub k: Complex64,
    /// `x_j = H⁻¹(χ_j)`, infinite at both ends.
    pub x: Vec<f64>,
    pub psi1: Vec<Complex64>,
    pub psi2: Vec<Complex64>,
    pub residual: f64,
}

/// Relative distance within which a requested `k` snaps to a computed eigenvalue.
const SNAP_TOL: f64 = 1e-3;

pub fn eigenfunction(
    spec: &PotentialSpec,
    n: usize,
    a: f64,
    lambda_sign: LambdaSign,
    k: Complex64,
) -> Result<Eigenfunction> {
    if n < MIN_NODES {
        return Err(ZsError::invalid(format!("eigenfunction needs n >= {MIN_NODES}, got {n}")));
    }
    let basis = ChebyshevBasis::new(n)?;
    let map = DomainMap::new(a)?;
    let pot = spec.sample(&basis, &map)?;
    let op = assemble(&basis, &map, &pot, lambda_sign)?;
    let prepared = Prepared::from_matrix(&op.matrix)?;
    let computed = prepared
        .all_k
        .iter()
        .copied()
        .min_by(|x, y| (x - k).norm().total_cmp(&(y - k).norm()))
        .expect("non-empty spectrum");
    if (computed - k).norm() > SNAP_TOL * k.norm().max(1.0) {
        return Err(ZsError::invalid(format!(
            "k = {k} is not near the computed spectrum (closest eigenvalue {computed})"
        )));
    }
    let (res, v) = prepared
        .residual_at(computed)
        .ok_or_else(|| ZsError::Numeric(format!("no eigenvector found at k = {computed}")))?;
    if res > ClassifierConfig::default().max_residual {
        return Err(ZsError::Numeric(format!("eigenfunction residual {res:.3e} too large at k = {computed}")));
    }
    Ok(Eigenfunction {
        k: computed,
        x: op.node_coords.to_vec(),
        psi1: v.slice(ndarray::s![..n]).to_vec(),
        psi2: v.slice(ndarray::s![n..]).to_vec(),
        residual: res,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointStatus {
    /// The closest eigenvalue is a classified discrete eigenvalue.
    Found,
    /// The closest eigenvalue was not classified as discrete.
    Nearest,
    /// The solve failed at this point.
    Failed,
}

impl PointStatus {
    pub fn tag(self) -> &'static str {
        match self {
            PointStatus::Found => "found",
            PointStatus::Nearest => "nearest",
            PointStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergencePoint {
    pub a: f64,
    pub n: usize,
    /// Absolute error; infinite when the point failed.
    pub error: f64,
    pub status: PointStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub reference_k: Complex64,
    pub points: Vec<ConvergencePoint>,
}

impl ConvergenceRecord {
    pub fn errors(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.error).collect()
    }
}

/// Error at `reference_k` for each `(a, n)` of `path`, evaluated in parallel on
/// the current rayon pool and reported in path order.
pub fn convergence_study(
    spec: &PotentialSpec,
    path: &[(f64, usize)],
    reference_k: Complex64,
    lambda_sign: LambdaSign,
    config: &ClassifierConfig,
) -> Result<ConvergenceRecord> {
    if path.is_empty() {
        return Err(ZsError::invalid("convergence path is empty"));
    }
    config.validate()?;
    let points = path
        .par_iter()
        .map(|&(a, n)| match compute_spectrum_with(spec, n, a, lambda_sign, config) {
            Ok(result) => {
                let (error, found) = result.tracked_error(reference_k).unwrap_or((f64::INFINITY, false));
                ConvergencePoint {
                    a,
                    n,
                    error,
                    status: if found { PointStatus::Found } else { PointStatus::Nearest },
                }
            }
            Err(e) => {
                log::warn!("convergence point (a={a}, n={n}) failed: {e}");
                ConvergencePoint {
                    a,
                    n,
                    error: f64::INFINITY,
                    status: PointStatus::Failed,
                }
            }
        })
        .collect();
    Ok(ConvergenceRecord { reference_k, points })
}

/// Three sample paths through the `(a, n)` rectangle `[0.1, 0.33] × [21, 251]`:
/// fixed `a = 0.15`, `a` rising with `n`, and `a` falling with `n`.
pub fn default_routes() -> [Vec<(f64, usize)>; 3] {
    let ns: Vec<usize> = (21..=251).step_by(10).collect();
    let last = (ns.len() - 1) as f64;
    let lerp = |i: usize, from: f64, to: f64| from + (to - from) * i as f64 / last;
    [
        ns.iter().map(|&n| (0.15, n)).collect(),
        ns.iter().enumerate().map(|(i, &n)| (lerp(i, 0.10, 0.33), n)).collect(),
        ns.iter().enumerate().map(|(i, &n)| (lerp(i, 0.33, 0.10), n)).collect(),
    ]
}
