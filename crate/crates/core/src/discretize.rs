//! Assembly of the collocated Zakharov-Shabat operator.
//!
//! With `ψ` sampled at the mapped nodes the system becomes `A ψ = i k ψ`,
//!
//! ```text
//!     A = [ -A1          diag(q) ]      A1 = diag(a (1 - χ²)) · V 𝒟 ℱ
//!         [ λ diag(q̄)    A1      ]
//! ```
//!
//! so an eigenvalue `μ` of `A` corresponds to the spectral parameter `k = -i μ`.

use std::io::Write;

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;

use crate::chebyshev::ChebyshevBasis;
use crate::error::{Result, ZsError};
use crate::linalg::{matvec, norm2};
use crate::mapping::DomainMap;
use crate::potentials::SampledPotential;

/// Sign of the nonlinearity: `+1` focusing, `-1` defocusing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LambdaSign {
    #[default]
    Focusing,
    Defocusing,
}

impl LambdaSign {
    pub fn value(self) -> f64 {
        match self {
            LambdaSign::Focusing => 1.0,
            LambdaSign::Defocusing => -1.0,
        }
    }

    pub fn from_value(v: i32) -> Result<Self> {
        match v {
            1 => Ok(LambdaSign::Focusing),
            -1 => Ok(LambdaSign::Defocusing),
            _ => Err(ZsError::invalid(format!("lambda sign must be +1 or -1, got {v}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZsOperator {
    pub matrix: Array2<Complex64>,
    pub n: usize,
    pub lambda_sign: LambdaSign,
    pub map: DomainMap,
    /// Collocation nodes `χ_j` in `[-1, 1]`.
    pub nodes: Array1<f64>,
    /// `x_j = H⁻¹(χ_j)`, infinite at both ends.
    pub node_coords: Array1<f64>,
}

/// Mapped first-derivative matrix `A1` on the real line.
pub fn mapped_derivative(basis: &ChebyshevBasis, map: &DomainMap) -> Result<Array2<f64>> {
    let mut a1 = basis.value_derivative();
    for (j, &chi) in basis.nodes().iter().enumerate() {
        let h = map.derivative_at_image(chi)?;
        a1.row_mut(j).mapv_inplace(|v| v * h);
    }
    Ok(a1)
}

/// Places `-deriv`, `diag(q)`, `λ diag(q̄)` and `deriv` into the 2×2 block layout.
pub fn block_operator(deriv: &Array2<f64>, q: &[Complex64], lambda_sign: LambdaSign) -> Array2<Complex64> {
    let n = deriv.nrows();
    let mut m = Array2::zeros((2 * n, 2 * n));
    m.slice_mut(s![..n, ..n]).assign(&deriv.mapv(|v| Complex64::new(-v, 0.0)));
    m.slice_mut(s![n.., n..]).assign(&deriv.mapv(|v| Complex64::new(v, 0.0)));
    let sign = lambda_sign.value();
    for (j, &qj) in q.iter().enumerate() {
        m[[j, n + j]] = qj;
        m[[n + j, j]] = qj.conj() * sign;
    }
    m
}

pub fn assemble(
    basis: &ChebyshevBasis,
    map: &DomainMap,
    pot: &SampledPotential,
    lambda_sign: LambdaSign,
) -> Result<ZsOperator> {
    let n = basis.n();
    if pot.n != n || pot.values.len() != n || pot.a != map.a() {
        return Err(ZsError::invalid(format!(
            "potential sampled on grid (n={}, a={}) but operator grid is (n={}, a={})",
            pot.n,
            pot.a,
            n,
            map.a()
        )));
    }
    let a1 = mapped_derivative(basis, map)?;
    let matrix = block_operator(&a1, pot.values.as_slice().expect("contiguous"), lambda_sign);
    let node_coords = basis
        .nodes()
        .iter()
        .map(|&chi| map.inverse(chi))
        .collect::<Result<Array1<f64>>>()?;
    Ok(ZsOperator {
        matrix,
        n,
        lambda_sign,
        map: *map,
        nodes: basis.nodes().clone(),
        node_coords,
    })
}

impl ZsOperator {
    /// `‖A ψ − i k ψ‖₂ / ‖ψ‖₂`.
    pub fn residual(&self, k: Complex64, psi: &[Complex64]) -> Result<f64> {
        residual(&self.matrix, k, psi)
    }

    /// Writes every entry as `row,col,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "row,col,re,im")?;
        for ((i, j), v) in self.matrix.indexed_iter() {
            writeln!(w, "{i},{j},{},{}", v.re, v.im)?;
        }
        Ok(())
    }
}

/// Residual of the pair `(k, ψ)` for a block operator with `A ψ = i k ψ`.
pub fn residual(matrix: &Array2<Complex64>, k: Complex64, psi: &[Complex64]) -> Result<f64> {
    if psi.len() != matrix.nrows() {
        return Err(ZsError::invalid(format!(
            "eigenfunction has length {}, operator has size {}",
            psi.len(),
            matrix.nrows()
        )));
    }
    let norm = norm2(psi);
    if norm == 0.0 {
        return Err(ZsError::invalid("residual of a zero vector is undefined"));
    }
    let mu = Complex64::i() * k;
    let r: Vec<Complex64> = matvec(matrix, psi).iter().zip(psi).map(|(a, p)| a - mu * p).collect();
    Ok(norm2(&r) / norm)
}

/// Spectral parameter from an eigenvalue of the block operator.
pub fn k_from_mu(mu: Complex64) -> Complex64 {
    -Complex64::i() * mu
}
