use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;
use zs_core::chebyshev::{eval_poly, eval_series, lobatto_nodes, ChebyshevBasis};
use zs_core::discretize::mapped_derivative;
use zs_core::mapping::DomainMap;

fn c(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Monomial polynomial value and derivative by Horner.
fn monomial(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &a in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

fn rel_close(got: f64, want: f64, scale: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn interpolation_is_exact_for_low_degree(
        n in 2usize..40,
        raw in prop::collection::vec(-1.0f64..1.0, 40),
        pts in prop::collection::vec(-1.0f64..1.0, 100),
    ) {
        let basis = ChebyshevBasis::new(n).unwrap();
        let coeffs = &raw[..n];
        let values: Vec<Complex64> = basis.nodes().iter().map(|&x| c(monomial(coeffs, x).0)).collect();
        let cheb = basis.to_coefficients(&values).unwrap();
        let scale = coeffs.iter().map(|a| a.abs()).sum::<f64>();
        for &x in &pts {
            let got = eval_series(cheb.as_slice().unwrap(), x);
            prop_assert!(rel_close(got.re, monomial(coeffs, x).0, scale, 1e-10));
            prop_assert!(got.im == 0.0);
        }
    }

    #[test]
    fn differentiation_is_exact_for_low_degree(
        n in 2usize..=64,
        raw in prop::collection::vec(-1.0f64..1.0, 64),
    ) {
        let basis = ChebyshevBasis::new(n).unwrap();
        let coeffs = &raw[..n];
        let values: Vec<f64> = basis.nodes().iter().map(|&x| monomial(coeffs, x).0).collect();
        let d = basis.value_derivative().dot(&ndarray::Array1::from(values));
        let scale: f64 = coeffs.iter().enumerate().map(|(k, a)| k as f64 * a.abs()).sum();
        for (j, &x) in basis.nodes().iter().enumerate() {
            prop_assert!(rel_close(d[j], monomial(coeffs, x).1, scale, 1e-9), "n={} j={} got {} want {}", n, j, d[j], monomial(coeffs, x).1);
        }
    }

    #[test]
    fn transform_round_trip(n in 2usize..=64, raw in prop::collection::vec(-1.0f64..1.0, 128)) {
        let basis = ChebyshevBasis::new(n).unwrap();
        let v: Vec<Complex64> = (0..n).map(|j| Complex64::new(raw[2 * j], raw[2 * j + 1])).collect();
        let back = basis.to_values(basis.to_coefficients(&v).unwrap().as_slice().unwrap()).unwrap();
        for (a, b) in back.iter().zip(&v) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn map_derivative_matches_finite_difference(a in 0.05f64..3.0, chi in -0.95f64..0.95) {
        let map = DomainMap::new(a).unwrap();
        let x = map.inverse(chi).unwrap();
        let h = 1e-5;
        let fd = (map.forward(x + h) - map.forward(x - h)) / (2.0 * h);
        prop_assert!((map.derivative_at_image(chi).unwrap() - fd).abs() <= 1e-7);
        prop_assert!((map.forward(x) - chi).abs() <= 1e-12);
    }

    #[test]
    fn inverse_map_is_odd(a in 0.05f64..3.0, chi in 0.0f64..1.0) {
        let map = DomainMap::new(a).unwrap();
        prop_assert_eq!(map.inverse(-chi).unwrap(), -map.inverse(chi).unwrap());
    }
}

#[test]
fn vandermonde_times_transform_is_identity() {
    for n in [2, 3, 8, 17, 33, 64] {
        let basis = ChebyshevBasis::new(n).unwrap();
        let p = basis.vandermonde().dot(basis.transform());
        let err = p
            .indexed_iter()
            .map(|((i, j), v)| (v - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-12, "n={n}: {err:e}");
    }
}

#[test]
fn nodes_ascend_with_pinned_ends() {
    for n in [2, 3, 10, 101] {
        let x = lobatto_nodes(n);
        assert_eq!(x[0], -1.0);
        assert_eq!(x[n - 1], 1.0);
        for j in 0..n {
            assert!((x[j] - ((n - 1 - j) as f64 * PI / (n - 1) as f64).cos()).abs() < 1e-15);
            if j > 0 {
                assert!(x[j] > x[j - 1]);
            }
        }
    }
}

#[test]
fn coefficient_derivative_matrix_is_strictly_upper() {
    for n in [2, 5, 12, 40] {
        let basis = ChebyshevBasis::new(n).unwrap();
        let d = basis.deriv();
        for i in 0..n {
            for j in 0..=i {
                assert_eq!(d[[i, j]], 0.0);
            }
        }
    }
}

#[test]
fn squared_derivative_gives_second_derivative_coefficients() {
    // T_k'' = (k (k² - j²) / c_j) T_j summed over j < k with k - j even, c_0 = 2
    let n = 20;
    let basis = ChebyshevBasis::new(n).unwrap();
    let d2: Array2<f64> = basis.deriv().dot(basis.deriv());
    for k in 0..n {
        for j in 0..n {
            let want = if j + 2 <= k && (k - j) % 2 == 0 {
                let cj = if j == 0 { 2.0 } else { 1.0 };
                (k * (k * k - j * j)) as f64 / cj
            } else {
                0.0
            };
            assert!((d2[[j, k]] - want).abs() <= 1e-9 * want.abs().max(1.0), "k={k} j={j}");
        }
    }
}

#[test]
fn polynomial_values() {
    assert_eq!(eval_poly(0, 0.37), 1.0);
    assert!((eval_poly(2, 0.5) + 0.5).abs() < 1e-15);
    assert!((eval_poly(7, 0.3f64.cos()) - 2.1f64.cos()).abs() < 1e-13);
}

#[test]
fn mapped_chain_rule() {
    let n = 64;
    let a = 0.5;
    let basis = ChebyshevBasis::new(n).unwrap();
    let map = DomainMap::new(a).unwrap();
    let a1 = mapped_derivative(&basis, &map).unwrap();
    let xs: Vec<f64> = basis.nodes().iter().map(|&chi| map.inverse(chi).unwrap()).collect();
    let g: Vec<f64> = xs.iter().map(|&x| if x.is_finite() { (-x * x).exp() } else { 0.0 }).collect();
    let dg = a1.dot(&ndarray::Array1::from(g));
    let peak = xs
        .iter()
        .filter(|x| x.is_finite())
        .map(|&x| (2.0 * x * (-x * x).exp()).abs())
        .fold(0.0, f64::max);
    for j in 1..n - 1 {
        let want = -2.0 * xs[j] * (-xs[j] * xs[j]).exp();
        assert!((dg[j] - want).abs() <= 1e-6 * peak, "node {j}: {} vs {want}", dg[j]);
    }
    assert_eq!(dg[0], 0.0);
    assert_eq!(dg[n - 1], 0.0);
}
