//! Complex potentials `q(x)` and their samples on the mapped collocation grid.

use std::fmt;
use std::io::BufRead;
use std::sync::Arc;

use ndarray::Array1;
use num_complex::Complex64;

use crate::chebyshev::ChebyshevBasis;
use crate::error::{Result, ZsError};
use crate::mapping::DomainMap;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn sech(x: f64) -> f64 {
    // cosh overflows to inf for |x| > ~710, giving an exact 0 here.
    1.0 / x.cosh()
}

pub type PotentialFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum CustomPotential {
    Analytic { name: String, f: PotentialFn },
    Tabulated(PotentialTable),
}

impl fmt::Debug for CustomPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CustomPotential::Analytic { name, .. } => f.debug_struct("Analytic").field("name", name).finish(),
            CustomPotential::Tabulated(t) => f.debug_tuple("Tabulated").field(&t.len()).finish(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum PotentialKind {
    /// `A sech(x)`.
    SatsumaYajima { amplitude: f64 },
    /// `sech(2εx) exp(i sech(2εx) / ε)`.
    Semiclassical { epsilon: f64 },
    /// `exp(-ix) sech(x)`.
    Solitonic,
    Custom(CustomPotential),
}

#[derive(Debug, Clone)]
pub struct PotentialSpec {
    kind: PotentialKind,
    limit_neg: Option<Complex64>,
    limit_pos: Option<Complex64>,
}

impl PotentialSpec {
    pub fn satsuma_yajima(amplitude: f64) -> Result<Self> {
        if !(amplitude.is_finite() && amplitude > 0.0) {
            return Err(ZsError::invalid(format!("amplitude must be positive, got {amplitude}")));
        }
        Ok(Self::decaying(PotentialKind::SatsumaYajima { amplitude }))
    }

    pub fn semiclassical(epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(ZsError::invalid(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self::decaying(PotentialKind::Semiclassical { epsilon }))
    }

    pub fn solitonic() -> Self {
        Self::decaying(PotentialKind::Solitonic)
    }

    /// `sech(w x) exp(i c sech(v x))`, a chirped pulse that decays at both ends.
    pub fn sech_phase(width: f64, phase_amplitude: f64, phase_width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0 && phase_width.is_finite() && phase_width > 0.0) {
            return Err(ZsError::invalid(format!(
                "sech-phase widths must be positive, got {width} and {phase_width}"
            )));
        }
        if !phase_amplitude.is_finite() {
            return Err(ZsError::invalid("sech-phase amplitude must be finite"));
        }
        let name = format!("sech-phase(w={width},c={phase_amplitude},v={phase_width})");
        let f = move |x: f64| Complex64::from_polar(sech(width * x), phase_amplitude * sech(phase_width * x));
        Ok(Self::analytic(name, f, Some(ZERO), Some(ZERO)))
    }

    /// A closed-form potential. Limits left as `None` make sampling fail.
    pub fn analytic<F>(name: impl Into<String>, f: F, limit_neg: Option<Complex64>, limit_pos: Option<Complex64>) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        PotentialSpec {
            kind: PotentialKind::Custom(CustomPotential::Analytic {
                name: name.into(),
                f: Arc::new(f),
            }),
            limit_neg,
            limit_pos,
        }
    }

    pub fn tabulated(table: PotentialTable, limit_neg: Option<Complex64>, limit_pos: Option<Complex64>) -> Self {
        PotentialSpec {
            kind: PotentialKind::Custom(CustomPotential::Tabulated(table)),
            limit_neg,
            limit_pos,
        }
    }

    fn decaying(kind: PotentialKind) -> Self {
        PotentialSpec {
            kind,
            limit_neg: Some(ZERO),
            limit_pos: Some(ZERO),
        }
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn limit_neg(&self) -> Option<Complex64> {
        self.limit_neg
    }

    pub fn limit_pos(&self) -> Option<Complex64> {
        self.limit_pos
    }

    /// Map steepness used when the caller does not choose one.
    pub fn default_steepness(&self) -> Option<f64> {
        match self.kind {
            PotentialKind::SatsumaYajima { .. } => Some(0.15),
            PotentialKind::Semiclassical { .. } => Some(0.01),
            PotentialKind::Solitonic => Some(0.1),
            PotentialKind::Custom(_) => None,
        }
    }

    /// Closed-form upper-half-plane discrete eigenvalues, where known.
    ///
    /// For `A sech(x)` these are `i(A + 1/2 - j)` for every positive integer
    /// `j < A + 1/2`; `exp(-ix) sech(x)` has the single value `(1 + i)/2`.
    pub fn known_upper_eigenvalues(&self) -> Option<Vec<Complex64>> {
        match self.kind {
            PotentialKind::SatsumaYajima { amplitude } => Some(
                (1..)
                    .map(|j| amplitude + 0.5 - j as f64)
                    .take_while(|&eta| eta > 0.0)
                    .map(|eta| Complex64::new(0.0, eta))
                    .collect(),
            ),
            PotentialKind::Solitonic => Some(vec![Complex64::new(0.5, 0.5)]),
            _ => None,
        }
    }

    /// Short human-readable descriptor, stable across runs.
    pub fn describe(&self) -> String {
        match &self.kind {
            PotentialKind::SatsumaYajima { amplitude } => format!("satsuma-yajima(A={amplitude})"),
            PotentialKind::Semiclassical { epsilon } => format!("semiclassical(eps={epsilon})"),
            PotentialKind::Solitonic => "solitonic".to_string(),
            PotentialKind::Custom(CustomPotential::Analytic { name, .. }) => name.clone(),
            PotentialKind::Custom(CustomPotential::Tabulated(t)) => format!("table({} rows)", t.len()),
        }
    }

    /// `q(x)` at a finite point, or the declared limit at `±∞`.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if x == f64::INFINITY {
            return self.limit_pos.ok_or_else(|| ZsError::invalid("potential has no declared limit at +inf"));
        }
        if x == f64::NEG_INFINITY {
            return self.limit_neg.ok_or_else(|| ZsError::invalid("potential has no declared limit at -inf"));
        }
        Ok(match &self.kind {
            PotentialKind::SatsumaYajima { amplitude } => Complex64::new(amplitude * sech(x), 0.0),
            PotentialKind::Semiclassical { epsilon } => {
                let s = sech(2.0 * epsilon * x);
                Complex64::from_polar(s, s / epsilon)
            }
            PotentialKind::Solitonic => Complex64::from_polar(sech(x), -x),
            PotentialKind::Custom(CustomPotential::Analytic { f, .. }) => f(x),
            PotentialKind::Custom(CustomPotential::Tabulated(t)) => {
                match t.interpolate(x) {
                    Some(v) => v,
                    None if x < t.x_min() => self
                        .limit_neg
                        .ok_or_else(|| ZsError::invalid("table extrapolation needs a declared limit at -inf"))?,
                    None => self
                        .limit_pos
                        .ok_or_else(|| ZsError::invalid("table extrapolation needs a declared limit at +inf"))?,
                }
            }
        })
    }

    /// Samples the potential at `x_j = H⁻¹(chi_j)`, endpoints from the declared limits.
    pub fn sample(&self, basis: &ChebyshevBasis, map: &DomainMap) -> Result<SampledPotential> {
        let (limit_neg, limit_pos) = match (self.limit_neg, self.limit_pos) {
            (Some(l), Some(r)) => (l, r),
            _ => return Err(ZsError::invalid("potential must declare its limits at -inf and +inf")),
        };
        let n = basis.n();
        let mut values = Array1::from_elem(n, ZERO);
        for (j, &chi) in basis.nodes().iter().enumerate() {
            let v = if j == 0 {
                limit_neg
            } else if j == n - 1 {
                limit_pos
            } else {
                let x = map.inverse(chi)?;
                self.eval(x)?
            };
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(ZsError::NumericDomain {
                    index: j,
                    x: map.inverse(chi).unwrap_or(f64::NAN),
                });
            }
            values[j] = v;
        }
        let conjugate_values = values.mapv(|v| v.conj());
        Ok(SampledPotential {
            values,
            conjugate_values,
            n,
            a: map.a(),
        })
    }
}

/// Potential values at the mapped Chebyshev nodes.
#[derive(Debug, Clone)]
pub struct SampledPotential {
    pub values: Array1<Complex64>,
    pub conjugate_values: Array1<Complex64>,
    pub n: usize,
    pub a: f64,
}

/// Tabulated `x, Re q, Im q` samples with monotone cubic interpolation.
#[derive(Debug, Clone)]
pub struct PotentialTable {
    x: Vec<f64>,
    re: Pchip,
    im: Pchip,
}

impl PotentialTable {
    pub fn new(x: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if x.len() != values.len() {
            return Err(ZsError::invalid("table columns have different lengths"));
        }
        if x.len() < 2 {
            return Err(ZsError::invalid(format!("potential table needs at least 2 rows, got {}", x.len())));
        }
        if x.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater)) {
            return Err(ZsError::invalid("table x column must be strictly increasing"));
        }
        if x.iter().any(|v| !v.is_finite()) || values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(ZsError::invalid("table contains non-finite entries"));
        }
        let re = Pchip::new(&x, &values.iter().map(|v| v.re).collect::<Vec<_>>());
        let im = Pchip::new(&x, &values.iter().map(|v| v.im).collect::<Vec<_>>());
        Ok(PotentialTable { x, re, im })
    }

    /// Parses whitespace-separated `x Re[q] [Im[q]]` rows; `#` starts a comment.
    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut xs = Vec::new();
        let mut vals = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<f64> = content
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| ZsError::invalid(format!("table line {}: {e}", lineno + 1)))?;
            let (x, re, im) = match fields.as_slice() {
                [x, re] => (*x, *re, 0.0),
                [x, re, im] => (*x, *re, *im),
                _ => {
                    return Err(ZsError::invalid(format!(
                        "table line {}: expected 2 or 3 columns, got {}",
                        lineno + 1,
                        fields.len()
                    )))
                }
            };
            xs.push(x);
            vals.push(Complex64::new(re, im));
        }
        if xs.is_empty() {
            return Err(ZsError::invalid("potential table is empty"));
        }
        Self::new(xs, vals)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub fn first_value(&self) -> Complex64 {
        Complex64::new(self.re.y[0], self.im.y[0])
    }

    pub fn last_value(&self) -> Complex64 {
        let k = self.x.len() - 1;
        Complex64::new(self.re.y[k], self.im.y[k])
    }

    /// `None` outside the tabulated range.
    pub fn interpolate(&self, x: f64) -> Option<Complex64> {
        if x < self.x_min() || x > self.x_max() {
            return None;
        }
        Some(Complex64::new(self.re.eval(&self.x, x), self.im.eval(&self.x, x)))
    }
}

/// Fritsch-Carlson monotone piecewise cubic Hermite interpolant.
#[derive(Debug, Clone)]
struct Pchip {
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    fn new(x: &[f64], y: &[f64]) -> Self {
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes[0] = delta[0];
            slopes[1] = delta[0];
            return Pchip { y: y.to_vec(), slopes };
        }
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                slopes[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Pchip { y: y.to_vec(), slopes }
    }

    fn eval(&self, x: &[f64], t: f64) -> f64 {
        let i = match x.partition_point(|&v| v <= t) {
            0 => 0,
            p => (p - 1).min(x.len() - 2),
        };
        let h = x[i + 1] - x[i];
        let s = (t - x[i]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

// Three-point end condition, limited to preserve shape.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}
