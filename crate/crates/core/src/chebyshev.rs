//! Chebyshev-Gauss-Lobatto collocation on `[-1, 1]`.
//!
//! A function is represented by its values at the `n` Lobatto nodes, listed
//! in ascending order `(-1, cos((n-2)π/(n-1)), ..., cos(π/(n-1)), 1)`. The
//! basis carries the three matrices needed to move between value space and
//! coefficient space:
//!
//! * `vandermonde[j, k] = T_k(x_j)` maps coefficients to node values,
//! * `transform` is its inverse (values to coefficients),
//! * `deriv` acts on coefficient vectors: if `f = Σ c_k T_k` then
//!   `f' = Σ (deriv · c)_k T_k`.

use std::f64::consts::PI;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Result, ZsError};
use crate::linalg::Lu;

/// Above this size the value/coefficient transform is noticeably ill-conditioned.
const CONDITIONING_WARN_N: usize = 600;

#[derive(Debug, Clone)]
pub struct ChebyshevBasis {
    n: usize,
    nodes: Array1<f64>,
    vandermonde: Array2<f64>,
    transform: Array2<f64>,
    deriv: Array2<f64>,
}

impl ChebyshevBasis {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(ZsError::invalid(format!("Chebyshev basis needs n >= 2, got {n}")));
        }
        if n > CONDITIONING_WARN_N {
            log::warn!("Chebyshev basis with n = {n}: value/coefficient transform conditioning degrades");
        }
        let nodes = lobatto_nodes(n);
        let mut vandermonde = Array2::zeros((n, n));
        for (j, &x) in nodes.iter().enumerate() {
            // Three-term recurrence along the row.
            let mut prev = 1.0;
            vandermonde[[j, 0]] = prev;
            if n > 1 {
                let mut cur = x;
                vandermonde[[j, 1]] = cur;
                for k in 2..n {
                    let next = 2.0 * x * cur - prev;
                    vandermonde[[j, k]] = next;
                    prev = cur;
                    cur = next;
                }
            }
        }
        let transform = Lu::factor(vandermonde.view())?.inverse();
        let deriv = derivative_matrix(n)?;
        Ok(ChebyshevBasis {
            n,
            nodes,
            vandermonde,
            transform,
            deriv,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &Array1<f64> {
        &self.nodes
    }

    pub fn vandermonde(&self) -> &Array2<f64> {
        &self.vandermonde
    }

    pub fn transform(&self) -> &Array2<f64> {
        &self.transform
    }

    pub fn deriv(&self) -> &Array2<f64> {
        &self.deriv
    }

    /// Chebyshev coefficients of the interpolant through `values`.
    pub fn to_coefficients(&self, values: &[Complex64]) -> Result<Array1<Complex64>> {
        if values.len() != self.n {
            return Err(ZsError::invalid(format!(
                "expected {} node values, got {}",
                self.n,
                values.len()
            )));
        }
        Ok(self
            .transform
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(values).map(|(f, v)| v * *f).sum())
            .collect())
    }

    /// Node values of a Chebyshev series.
    pub fn to_values(&self, coeffs: &[Complex64]) -> Result<Array1<Complex64>> {
        if coeffs.len() != self.n {
            return Err(ZsError::invalid(format!(
                "expected {} coefficients, got {}",
                self.n,
                coeffs.len()
            )));
        }
        Ok(self
            .vandermonde
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(coeffs).map(|(t, c)| c * *t).sum())
            .collect())
    }

    /// Value-space differentiation matrix `vandermonde · deriv · transform`.
    pub fn value_derivative(&self) -> Array2<f64> {
        self.vandermonde.dot(&self.deriv).dot(&self.transform)
    }
}

/// Lobatto nodes in ascending order.
pub fn lobatto_nodes(n: usize) -> Array1<f64> {
    let last = (n - 1) as f64;
    let mut nodes: Array1<f64> = (0..n)
        .map(|j| ((n - 1 - j) as f64 * PI / last).cos())
        .collect();
    // Pin the endpoints and the centre so symmetric grids stay exactly symmetric.
    nodes[0] = -1.0;
    nodes[n - 1] = 1.0;
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    for j in 0..n / 2 {
        let v = nodes[n - 1 - j];
        nodes[j] = -v;
    }
    nodes
}

/// `T_k(x)` by the three-term recurrence.
pub fn eval_poly(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 2..=k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Evaluates `Σ c_k T_k(x)` with Clenshaw's recurrence.
pub fn eval_series(coeffs: &[Complex64], x: f64) -> Complex64 {
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    match coeffs.first() {
        Some(&c0) => c0 + x * b1 - b2,
        None => Complex64::new(0.0, 0.0),
    }
}

/// Coefficient-space derivative matrix.
///
/// Column `k` holds the Chebyshev coefficients of `T_k'`, generated from
/// `c'_{j-1} = c'_{j+1} + 2j c_j` (the `j = 0` entry halved).
pub fn derivative_matrix(n: usize) -> Result<Array2<f64>> {
    if n < 2 {
        return Err(ZsError::invalid(format!("derivative matrix needs n >= 2, got {n}")));
    }
    let mut d = Array2::zeros((n, n));
    for k in 1..n {
        // c = e_k; run the recurrence downward from the top.
        let mut dc = vec![0.0; n + 1];
        for j in (1..n).rev() {
            let cj = if j == k { 1.0 } else { 0.0 };
            dc[j - 1] = dc[j + 1] + 2.0 * j as f64 * cj;
        }
        dc[0] *= 0.5;
        for j in 0..n {
            d[[j, k]] = dc[j];
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn three_nodes() {
        let b = ChebyshevBasis::new(3).unwrap();
        assert_eq!(b.nodes().to_vec(), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn five_nodes() {
        let b = ChebyshevBasis::new(5).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [-1.0, -h, 0.0, h, 1.0];
        for (x, w) in b.nodes().iter().zip(want) {
            assert!((x - w).abs() < 1e-15);
        }
    }

    #[test]
    fn two_node_matrices() {
        // Direct inversion of [[1,-1],[1,1]] by the 2x2 adjugate formula.
        let b = ChebyshevBasis::new(2).unwrap();
        let v = b.vandermonde();
        assert_eq!(v.as_slice().unwrap(), &[1.0, -1.0, 1.0, 1.0]);
        let det = v[[0, 0]] * v[[1, 1]] - v[[0, 1]] * v[[1, 0]];
        let adj = [v[[1, 1]] / det, -v[[0, 1]] / det, -v[[1, 0]] / det, v[[0, 0]] / det];
        assert_eq!(adj, [0.5, 0.5, -0.5, 0.5]);
        for (x, y) in b.transform().iter().zip(adj) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn too_small_basis_is_rejected() {
        assert!(ChebyshevBasis::new(1).is_err());
        assert!(derivative_matrix(0).is_err());
    }

    #[test]
    fn polynomial_values() {
        assert_eq!(eval_poly(0, 0.37), 1.0);
        assert_eq!(eval_poly(0, -0.9), 1.0);
        // T_2(x) = 2x^2 - 1
        assert!((eval_poly(2, 0.5) - (2.0 * 0.25 - 1.0)).abs() < 1e-15);
        // T_k(cos t) = cos(k t)
        assert!((eval_poly(7, 0.3f64.cos()) - 2.1f64.cos()).abs() < 1e-13);
    }

    #[test]
    fn derivative_columns() {
        let d = derivative_matrix(4).unwrap();
        for j in 0..4 {
            assert_eq!(d[[j, 0]], 0.0);
            assert_eq!(d[[j, 1]], if j == 0 { 1.0 } else { 0.0 });
            assert_eq!(d[[j, 2]], if j == 1 { 4.0 } else { 0.0 });
        }
    }

    #[test]
    fn derivative_matches_printed_patterns() {
        // Even n = 4: rows "0 1 0 3", "0 0 4 0", "0 0 0 6", "0 0 0 0".
        let d4 = derivative_matrix(4).unwrap();
        let want4 = [
            [0.0, 1.0, 0.0, 3.0],
            [0.0, 0.0, 4.0, 0.0],
            [0.0, 0.0, 0.0, 6.0],
            [0.0, 0.0, 0.0, 0.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(d4[[i, j]], want4[i][j], "n=4 entry ({i},{j})");
            }
        }
        // Odd n = 5: the last column is T_4' = 8 T_3 + 8 T_1, no T_0 term.
        let d5 = derivative_matrix(5).unwrap();
        let want5 = [
            [0.0, 1.0, 0.0, 3.0, 0.0],
            [0.0, 0.0, 4.0, 0.0, 8.0],
            [0.0, 0.0, 0.0, 6.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 8.0],
            [0.0, 0.0, 0.0, 0.0, 0.0],
        ];
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(d5[[i, j]], want5[i][j], "n=5 entry ({i},{j})");
            }
        }
    }

    #[test]
    fn coefficients_of_simple_functions() {
        let b = ChebyshevBasis::new(5).unwrap();
        let ones = vec![c(1.0); 5];
        let got = b.to_coefficients(&ones).unwrap();
        for (k, v) in got.iter().enumerate() {
            assert!((v - c(if k == 0 { 1.0 } else { 0.0 })).norm() < 1e-14);
        }
        let xs: Vec<_> = b.nodes().iter().map(|&x| c(x)).collect();
        let got = b.to_coefficients(&xs).unwrap();
        for (k, v) in got.iter().enumerate() {
            assert!((v - c(if k == 1 { 1.0 } else { 0.0 })).norm() < 1e-14);
        }
        // x^2 = (T_0 + T_2) / 2
        let sq: Vec<_> = b.nodes().iter().map(|&x| c(x * x)).collect();
        let got = b.to_coefficients(&sq).unwrap();
        for (v, w) in got.iter().zip([0.5, 0.0, 0.5, 0.0, 0.0]) {
            assert!((v - c(w)).norm() < 1e-14);
        }
        assert!(b.to_coefficients(&sq[..4]).is_err());
    }

    #[test]
    fn clenshaw_matches_direct_sum() {
        let coeffs = [c(0.3), c(-1.2), c(0.7), c(2.0)];
        let x = 0.41;
        let direct: Complex64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, ck)| ck * eval_poly(k, x))
            .sum();
        assert!((eval_series(&coeffs, x) - direct).norm() < 1e-14);
    }
}
