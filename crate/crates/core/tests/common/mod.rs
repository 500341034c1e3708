//! Independent eigenvalue oracle shared by the integration tests.
#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, n), |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn trace(m: &Array2<Complex64>) -> Complex64 {
    (0..m.nrows()).map(|i| m[[i, i]]).sum()
}

/// Coefficients `c[0..=n]` of `det(zI - A) = Σ c_k z^k` by Faddeev-LeVerrier.
pub fn char_poly(a: &Array2<Complex64>) -> Vec<Complex64> {
    let n = a.nrows();
    let mut c = vec![ZERO; n + 1];
    c[n] = ONE;
    let mut m = Array2::<Complex64>::zeros((n, n));
    for k in 1..=n {
        for i in 0..n {
            m[[i, i]] += c[n - k + 1];
        }
        let am = a.dot(&m);
        c[n - k] = -trace(&am) / k as f64;
        m = am;
    }
    c
}

pub fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

/// Simultaneous roots by Aberth iteration.
pub fn aberth(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let radius = 1.0 + c[..n].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(c, z[i]);
            if p == ZERO {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| ONE / (z[i] - z[j])).sum();
            let w = ratio / (ONE - ratio * sum);
            z[i] -= w;
            moved = moved.max(w.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Gaussian elimination with partial pivoting: `(det(M), M⁻¹ trace)`.
pub fn det_and_inverse_trace(m: &Array2<Complex64>) -> (Complex64, Complex64) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut inv = Array2::<Complex64>::eye(n);
    let mut det = ONE;
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[[x, col]].norm().total_cmp(&a[[y, col]].norm())).unwrap();
        if p != col {
            for j in 0..n {
                a.swap([p, j], [col, j]);
                inv.swap([p, j], [col, j]);
            }
            det = -det;
        }
        let piv = a[[col, col]];
        det *= piv;
        if piv == ZERO {
            return (ZERO, ZERO);
        }
        for j in 0..n {
            a[[col, j]] /= piv;
            inv[[col, j]] /= piv;
        }
        for r in 0..n {
            if r != col {
                let f = a[[r, col]];
                for j in 0..n {
                    let (ac, ic) = (a[[col, j]], inv[[col, j]]);
                    a[[r, j]] -= f * ac;
                    inv[[r, j]] -= f * ic;
                }
            }
        }
    }
    (det, trace(&inv))
}

/// Newton on `det(zI - A)` using `f'/f = tr((zI - A)⁻¹)`.
pub fn polish(a: &Array2<Complex64>, mut z: Complex64) -> Complex64 {
    let n = a.nrows();
    for _ in 0..8 {
        let shifted = Array2::from_shape_fn((n, n), |(i, j)| if i == j { z - a[[i, j]] } else { -a[[i, j]] });
        let (det, tr) = det_and_inverse_trace(&shifted);
        if det == ZERO || tr == ZERO {
            break;
        }
        let step = ONE / tr;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        z -= step;
        if step.norm() < 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

pub fn oracle_eigenvalues(a: &Array2<Complex64>) -> Vec<Complex64> {
    aberth(&char_poly(a)).into_iter().map(|z| polish(a, z)).collect()
}

/// Largest distance in a greedy nearest pairing of two equal-size multisets.
pub fn multiset_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mut used = vec![false; y.len()];
    let mut worst = 0.0f64;
    let mut order: Vec<usize> = (0..x.len()).collect();
    // pair the most isolated values first so clusters do not steal partners
    order.sort_by(|&i, &j| {
        let gap = |k: usize| y.iter().map(|v| (v - x[k]).norm()).fold(f64::INFINITY, f64::min);
        gap(j).total_cmp(&gap(i))
    });
    for i in order {
        let (j, d) = y
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, v)| (j, (v - x[i]).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
