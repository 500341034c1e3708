//! Small dense helpers shared by the collocation and eigen modules.

use ndarray::{Array1, Array2, ArrayView2};
use num_complex::{Complex64, ComplexFloat};

use crate::error::{Result, ZsError};

/// LU factorization with partial pivoting, stored in place.
#[derive(Debug, Clone)]
pub(crate) struct Lu<T> {
    lu: Array2<T>,
    piv: Vec<usize>,
}

impl<T> Lu<T>
where
    T: ComplexFloat<Real = f64>,
{
    /// Factors `a`. A pivot of exactly zero is reported as an error.
    pub fn factor(a: ArrayView2<T>) -> Result<Self> {
        let n = a.nrows();
        if n != a.ncols() {
            return Err(ZsError::invalid("LU needs a square matrix"));
        }
        let mut lu = a.as_standard_layout().into_owned();
        let mut piv: Vec<usize> = (0..n).collect();
        let m = lu.as_slice_mut().expect("standard layout");
        for k in 0..n {
            let mut p = k;
            let mut best = m[k * n + k].abs();
            for i in k + 1..n {
                let v = m[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(ZsError::Numeric(format!("singular matrix (zero pivot in column {k})")));
            }
            if p != k {
                for j in 0..n {
                    m.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let (upper, lower) = m.split_at_mut((k + 1) * n);
            let row_k = &upper[k * n..];
            let pivot = row_k[k];
            for row_i in lower.chunks_exact_mut(n) {
                let l = row_i[k] / pivot;
                row_i[k] = l;
                if l == T::zero() {
                    continue;
                }
                for (x, &u) in row_i[k + 1..].iter_mut().zip(&row_k[k + 1..]) {
                    *x = *x - l * u;
                }
            }
        }
        Ok(Lu { lu, piv })
    }

    pub fn solve(&self, b: &[T]) -> Array1<T> {
        let n = self.piv.len();
        let m = self.lu.as_slice().expect("standard layout");
        let mut x: Vec<T> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &m[i * n..i * n + i];
            let s = row.iter().zip(&x[..i]).fold(x[i], |acc, (&l, &v)| acc - l * v);
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = &m[i * n + i + 1..(i + 1) * n];
            let s = row.iter().zip(&x[i + 1..]).fold(x[i], |acc, (&u, &v)| acc - u * v);
            x[i] = s / m[i * n + i];
        }
        Array1::from(x)
    }

    pub fn inverse(&self) -> Array2<T> {
        let n = self.piv.len();
        let mut inv = Array2::zeros((n, n));
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve(&e);
            inv.column_mut(j).assign(&col);
        }
        inv
    }
}

pub(crate) fn matvec(a: &Array2<Complex64>, x: &[Complex64]) -> Vec<Complex64> {
    a.rows()
        .into_iter()
        .map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum())
        .collect()
}

pub(crate) fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn frobenius(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}
