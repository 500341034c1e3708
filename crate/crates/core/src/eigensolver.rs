//! Dense eigensolver for general complex matrices.
//!
//! The pipeline is the classical one: diagonal balancing, reduction to upper
//! Hessenberg form by Householder reflectors, then single-shift QR sweeps
//! (Wilkinson shift, unitary Givens rotations) with deflation of negligible
//! subdiagonal entries. Eigenvectors, when requested, come from inverse
//! iteration on the Hessenberg form, mapped back and checked against the
//! original matrix.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Result, ZsError};
use crate::linalg::{frobenius, matvec, norm2};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative residual bound met by every returned eigenvector.
pub const VECTOR_TOL: f64 = 1e-8;

/// QR steps allowed per matrix dimension.
const STEPS_PER_DIM: usize = 30;

#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Sorted by descending imaginary part, ties by ascending real part.
    pub eigenvalues: Vec<Complex64>,
    /// Column `j` pairs with `eigenvalues[j]`.
    pub eigenvectors: Option<Array2<Complex64>>,
    pub iterations_used: usize,
    pub converged: bool,
}

/// All eigenvalues of `m`, and optionally unit right eigenvectors.
pub fn eigenvalues(m: &Array2<Complex64>, want_vectors: bool) -> Result<EigenDecomposition> {
    Factorization::new(m)?.decompose(want_vectors)
}

/// Balanced Hessenberg form of a matrix, kept for eigenvalue and
/// eigenvector work on the same operator.
#[derive(Debug, Clone)]
pub struct Factorization {
    original: Array2<Complex64>,
    original_norm: f64,
    /// Diagonal balancing similarity `D`, so `B = D⁻¹ A D`.
    scale: Vec<f64>,
    hessenberg: Array2<Complex64>,
    /// Householder vectors `v_k` (acting on rows `k+1..`), `P_k = I - tau vvᴴ`.
    reflectors: Vec<(usize, Vec<Complex64>, f64)>,
}

impl Factorization {
    pub fn new(m: &Array2<Complex64>) -> Result<Self> {
        let dim = check_square(m)?;
        if m.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(ZsError::invalid("matrix has non-finite entries"));
        }
        let original = m.as_standard_layout().into_owned();
        let mut h = original.clone();
        let scale = balance_with_scale(&mut h);
        let reflectors = reduce_slice(h.as_slice_mut().expect("standard layout"), dim);
        Ok(Factorization {
            original_norm: frobenius(&original),
            original,
            scale,
            hessenberg: h,
            reflectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.original.nrows()
    }

    pub fn original(&self) -> &Array2<Complex64> {
        &self.original
    }

    pub fn hessenberg(&self) -> &Array2<Complex64> {
        &self.hessenberg
    }

    pub fn decompose(&self, want_vectors: bool) -> Result<EigenDecomposition> {
        let dim = self.dim();
        let mut h = self.hessenberg.clone();
        let outcome = hessenberg_qr(h.as_slice_mut().expect("standard layout"), dim);
        let mut values = outcome.eigenvalues;
        sort_spectrum(&mut values);
        if !outcome.converged {
            return Err(ZsError::NoConvergence {
                iterations: outcome.iterations,
                partial: Box::new(EigenDecomposition {
                    eigenvalues: values,
                    eigenvectors: None,
                    iterations_used: outcome.iterations,
                    converged: false,
                }),
            });
        }
        let eigenvectors = if want_vectors {
            let mut vecs = Array2::zeros((dim, dim));
            for (j, &mu) in values.iter().enumerate() {
                vecs.column_mut(j).assign(&self.eigenvector(mu)?);
            }
            Some(vecs)
        } else {
            None
        };
        Ok(EigenDecomposition {
            eigenvalues: values,
            eigenvectors,
            iterations_used: outcome.iterations,
            converged: true,
        })
    }

    /// Unit right eigenvector for an (approximate) eigenvalue `mu`.
    ///
    /// Inverse iteration runs on the Hessenberg form; each iterate is mapped
    /// back through the reflectors and the balancing and its residual is
    /// measured against the original matrix. The shift is nudged off `mu`
    /// so the factorization stays nonsingular, and the nudge grows if a
    /// pivot still vanishes. The largest component is made real positive.
    pub fn eigenvector(&self, mu: Complex64) -> Result<Array1<Complex64>> {
        let dim = self.dim();
        let scale = self.original_norm;
        if scale == 0.0 {
            let mut v = Array1::zeros(dim);
            v[0] = ONE;
            return Ok(v);
        }
        let tol = VECTOR_TOL * scale;
        let start: Vec<Complex64> = (0..dim)
            .map(|j| {
                let t = j as f64;
                Complex64::new(1.0 + (t * 0.754_877_666_2).fract(), (t * 0.569_840_291).fract() - 0.5)
            })
            .collect();

        let mut best = f64::INFINITY;
        let mut factored = false;
        for attempt in 0..6 {
            let nudge = scale * f64::EPSILON * 64.0 * 100f64.powi(attempt);
            let sigma = mu + Complex64::new(nudge, nudge * 0.5);
            let Some(lu) = HessenbergLu::factor(&self.hessenberg, sigma) else {
                continue;
            };
            factored = true;
            let mut y = start.clone();
            for _ in 0..4 {
                let w = lu.solve(&y);
                let nw = norm2(&w);
                if !(nw.is_finite() && nw > 0.0) {
                    break;
                }
                y = w.into_iter().map(|x| x / nw).collect();
                let mut x = self.back_transform(&y);
                let nx = norm2(&x);
                x.iter_mut().for_each(|v| *v /= nx);
                let ax = matvec(&self.original, &x);
                let res = norm2(&ax.iter().zip(&x).map(|(a, v)| a - mu * v).collect::<Vec<_>>());
                best = best.min(res);
                if res <= tol {
                    return Ok(normalize_phase(x));
                }
            }
        }
        if factored {
            Err(ZsError::Numeric(format!(
                "inverse iteration at mu = {mu} stalled with residual {best:.3e} (bound {tol:.3e})"
            )))
        } else {
            Err(ZsError::Numeric(format!(
                "shifted system at mu = {mu} is singular beyond the perturbation budget"
            )))
        }
    }

    /// `x = D Q y`.
    fn back_transform(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut x = y.to_vec();
        for (k, v, tau) in self.reflectors.iter().rev() {
            let tail = &mut x[k + 1..];
            let dot: Complex64 = v.iter().zip(tail.iter()).map(|(vi, xi)| vi.conj() * xi).sum();
            let f = dot * *tau;
            for (xi, vi) in tail.iter_mut().zip(v) {
                *xi -= f * vi;
            }
        }
        for (xi, d) in x.iter_mut().zip(&self.scale) {
            *xi *= *d;
        }
        x
    }
}

/// LU with adjacent-row pivoting for a shifted upper Hessenberg matrix.
struct HessenbergLu {
    n: usize,
    u: Vec<Complex64>,
    mult: Vec<Complex64>,
    swapped: Vec<bool>,
}

impl HessenbergLu {
    fn factor(h: &Array2<Complex64>, sigma: Complex64) -> Option<Self> {
        let n = h.nrows();
        let mut u = h.as_slice().expect("standard layout").to_vec();
        for i in 0..n {
            u[i * n + i] -= sigma;
        }
        let mut mult = vec![ZERO; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for k in 0..n.saturating_sub(1) {
            let (top, bottom) = u.split_at_mut((k + 1) * n);
            let row_k = &mut top[k * n..];
            let row_n = &mut bottom[..n];
            if row_n[k].norm() > row_k[k].norm() {
                for j in k..n {
                    std::mem::swap(&mut row_k[j], &mut row_n[j]);
                }
                swapped[k] = true;
            }
            if row_k[k] == ZERO {
                return None;
            }
            let l = row_n[k] / row_k[k];
            mult[k] = l;
            row_n[k] = ZERO;
            for j in k + 1..n {
                let t = row_k[j];
                row_n[j] -= l * t;
            }
        }
        if u[n * n - 1] == ZERO {
            return None;
        }
        Some(HessenbergLu { n, u, mult, swapped })
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                x.swap(k, k + 1);
            }
            let t = x[k];
            x[k + 1] -= self.mult[k] * t;
        }
        for i in (0..n).rev() {
            let row = &self.u[i * n..(i + 1) * n];
            let s = row[i + 1..].iter().zip(&x[i + 1..]).fold(x[i], |acc, (u, v)| acc - u * v);
            x[i] = s / row[i];
        }
        x
    }
}

/// Deterministic output order: descending imaginary part, then ascending real part.
pub fn sort_spectrum(values: &mut [Complex64]) {
    values.sort_by(|a, b| b.im.total_cmp(&a.im).then(a.re.total_cmp(&b.re)));
}

/// One explicitly shifted QR step `H - sI = QR`, `H' = RQ + sI` on a Hessenberg matrix.
pub fn qr_step(m: &Array2<Complex64>, shift: Complex64) -> Result<Array2<Complex64>> {
    let dim = check_square(m)?;
    let scale = frobenius(m);
    for i in 0..dim {
        for j in 0..i.saturating_sub(1) {
            if m[[i, j]].norm() > f64::EPSILON * scale {
                return Err(ZsError::invalid(format!("matrix is not upper Hessenberg (entry ({i},{j}))")));
            }
        }
    }
    let mut h = m.as_standard_layout().into_owned();
    if dim > 1 {
        qr_sweep(h.as_slice_mut().expect("standard layout"), dim, 0, dim - 1, shift);
    }
    Ok(h)
}

/// Unit right eigenvector of `m` for an approximate eigenvalue `mu`, by
/// inverse iteration. See [`Factorization::eigenvector`].
pub fn eigenvector_for(m: &Array2<Complex64>, mu: Complex64) -> Result<Array1<Complex64>> {
    Factorization::new(m)?.eigenvector(mu)
}

fn normalize_phase(v: Vec<Complex64>) -> Array1<Complex64> {
    let mut imax = 0;
    for (i, x) in v.iter().enumerate() {
        if x.norm() > v[imax].norm() {
            imax = i;
        }
    }
    let p = v[imax];
    let phase = if p.norm() > 0.0 { p.conj() / p.norm() } else { ONE };
    v.into_iter().map(|x| x * phase).collect()
}

fn check_square(m: &Array2<Complex64>) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c {
        return Err(ZsError::invalid(format!("matrix must be square, got {r}x{c}")));
    }
    if r == 0 {
        return Err(ZsError::invalid("matrix must be at least 1x1"));
    }
    Ok(r)
}

/// Diagonal similarity scaling by powers of two so that row and column
/// norms are comparable. Exact in floating point, so eigenvalues are unchanged.
pub fn balance(h: &mut Array2<Complex64>) {
    balance_with_scale(h);
}

fn balance_with_scale(h: &mut Array2<Complex64>) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    let n = h.nrows();
    let mut scale = vec![1.0; n];
    let mut noconv = true;
    while noconv {
        noconv = false;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += h[[j, i]].l1_norm();
                    r += h[[i, j]].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                noconv = true;
                let inv = 1.0 / f;
                scale[i] *= f;
                for j in 0..n {
                    h[[i, j]] *= inv;
                    h[[j, i]] *= f;
                }
            }
        }
    }
    scale
}

/// In-place unitary similarity reduction to upper Hessenberg form.
pub fn reduce_to_hessenberg(h: &mut Array2<Complex64>) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    if !h.is_standard_layout() {
        *h = h.as_standard_layout().into_owned();
    }
    reduce_slice(h.as_slice_mut().expect("standard layout"), n);
}

/// `(H, Q)` with `H` upper Hessenberg, `Q` unitary and `m = Q H Qᴴ`. No balancing.
pub fn hessenberg_decomposition(m: &Array2<Complex64>) -> Result<(Array2<Complex64>, Array2<Complex64>)> {
    let n = check_square(m)?;
    let mut h = m.as_standard_layout().into_owned();
    let reflectors = reduce_slice(h.as_slice_mut().expect("standard layout"), n);
    let mut q = Array2::<Complex64>::eye(n);
    for mut col in q.columns_mut() {
        for (k, v, tau) in reflectors.iter().rev() {
            let dot: Complex64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * col[k + 1 + i]).sum();
            let f = dot * *tau;
            for (i, vi) in v.iter().enumerate() {
                col[k + 1 + i] -= f * vi;
            }
        }
    }
    Ok((h, q))
}

type Reflector = (usize, Vec<Complex64>, f64);

fn reduce_slice(a: &mut [Complex64], n: usize) -> Vec<Reflector> {
    let mut reflectors = Vec::new();
    if n < 3 {
        return reflectors;
    }
    let mut v = vec![ZERO; n];
    let mut s = vec![ZERO; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let tail: f64 = (k + 2..n).map(|i| a[i * n + k].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let alpha = (x0.norm_sqr() + tail).sqrt();
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        // v = x + phase·alpha·e1, reflector P = I - tau v vᴴ
        for i in 0..len {
            v[i] = a[(k + 1 + i) * n + k];
        }
        v[0] += phase * alpha;
        let vnorm2: f64 = v[..len].iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // Left: rows k+1.., columns k..
        s[k..n].iter_mut().for_each(|z| *z = ZERO);
        for i in 0..len {
            let vi = v[i].conj();
            let row = &a[(k + 1 + i) * n..(k + 2 + i) * n];
            for j in k..n {
                s[j] += vi * row[j];
            }
        }
        for i in 0..len {
            let f = tau * v[i];
            let row = &mut a[(k + 1 + i) * n..(k + 2 + i) * n];
            for j in k..n {
                row[j] -= f * s[j];
            }
        }
        // Right: all rows, columns k+1..
        for i in 0..n {
            let row = &mut a[i * n..(i + 1) * n];
            let mut acc = ZERO;
            for l in 0..len {
                acc += row[k + 1 + l] * v[l];
            }
            let f = tau * acc;
            for l in 0..len {
                row[k + 1 + l] -= f * v[l].conj();
            }
        }
        a[(k + 1) * n + k] = -phase * alpha;
        for i in k + 2..n {
            a[i * n + k] = ZERO;
        }
        reflectors.push((k, v[..len].to_vec(), tau));
    }
    reflectors
}

struct QrOutcome {
    eigenvalues: Vec<Complex64>,
    iterations: usize,
    converged: bool,
}

/// Shifted QR on a Hessenberg matrix, eigenvalues only.
fn hessenberg_qr(h: &mut [Complex64], n: usize) -> QrOutcome {
    let at = |i: usize, j: usize| i * n + j;
    let eps = f64::EPSILON;
    let cap = STEPS_PER_DIM * n;
    let mut eig = vec![ZERO; n];
    let mut total = 0;
    let mut its = 0;
    // active window is rows/cols lo..=hi, with hi counting down
    let mut hi = n as isize - 1;
    while hi >= 0 {
        let hu = hi as usize;
        let mut l = hu;
        while l > 0 {
            let sub = h[at(l, l - 1)].norm();
            let mut tst = h[at(l - 1, l - 1)].norm() + h[at(l, l)].norm();
            if tst == 0.0 {
                if l >= 2 {
                    tst += h[at(l - 1, l - 2)].norm();
                }
                if l < hu {
                    tst += h[at(l + 1, l)].norm();
                }
            }
            if sub <= eps * tst {
                h[at(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hu {
            eig[hu] = h[at(hu, hu)];
            hi -= 1;
            its = 0;
            continue;
        }
        if l + 1 == hu {
            let (e1, e2) = eig2(h[at(l, l)], h[at(l, hu)], h[at(hu, l)], h[at(hu, hu)]);
            eig[l] = e1;
            eig[hu] = e2;
            hi -= 2;
            its = 0;
            continue;
        }
        if total >= cap {
            for i in 0..=hu {
                eig[i] = h[at(i, i)];
            }
            return QrOutcome {
                eigenvalues: eig,
                iterations: total,
                converged: false,
            };
        }
        let shift = if its == 10 || its == 20 {
            // exceptional shift to break cycles
            h[at(hu, hu)] + Complex64::new(0.75 * h[at(hu, hu - 1)].re.abs(), 0.75 * h[at(hu, hu - 1)].im.abs())
        } else {
            let (e1, e2) = eig2(
                h[at(hu - 1, hu - 1)],
                h[at(hu - 1, hu)],
                h[at(hu, hu - 1)],
                h[at(hu, hu)],
            );
            let d = h[at(hu, hu)];
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };
        qr_sweep(h, n, l, hu, shift);
        its += 1;
        total += 1;
    }
    QrOutcome {
        eigenvalues: eig,
        iterations: total,
        converged: true,
    }
}

/// Eigenvalues of `[[a, b], [c, d]]`, computed to avoid cancellation.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mean = 0.5 * (a + d);
    let p = 0.5 * (a - d);
    let disc = (p * p + b * c).sqrt();
    let (plus, minus) = (mean + disc, mean - disc);
    let det = a * d - b * c;
    if plus.norm() >= minus.norm() {
        if plus.norm() == 0.0 {
            (ZERO, ZERO)
        } else {
            (plus, det / plus)
        }
    } else {
        (det / minus, minus)
    }
}

/// Givens rotation `[c, s; -s̄, c]` mapping `(a, b)` to `(r, 0)`, `c` real.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    if b == ZERO {
        return (1.0, ZERO, a);
    }
    if a == ZERO {
        let nb = b.norm();
        return (0.0, b.conj() / nb, Complex64::new(nb, 0.0));
    }
    let na = a.norm();
    let norm = na.hypot(b.norm());
    let alpha = a / na;
    (na / norm, alpha * b.conj() / norm, alpha * norm)
}

/// One explicit shifted QR sweep on the window `lo..=hi`.
fn qr_sweep(h: &mut [Complex64], n: usize, lo: usize, hi: usize, shift: Complex64) {
    for i in lo..=hi {
        h[i * n + i] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for j in lo..hi {
        let (c, s, r) = givens(h[j * n + j], h[(j + 1) * n + j]);
        h[j * n + j] = r;
        h[(j + 1) * n + j] = ZERO;
        let (top, bottom) = h.split_at_mut((j + 1) * n);
        let row_j = &mut top[j * n..];
        let row_k = &mut bottom[..n];
        let sc = s.conj();
        for col in j + 1..=hi {
            let x = row_j[col];
            let y = row_k[col];
            row_j[col] = c * x + s * y;
            row_k[col] = c * y - sc * x;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let j = lo + idx;
        let sc = s.conj();
        for i in lo..=(j + 1).min(hi) {
            let row = &mut h[i * n..(i + 1) * n];
            let x = row[j];
            let y = row[j + 1];
            row[j] = c * x + sc * y;
            row[j + 1] = c * y - s * x;
        }
    }
    for i in lo..=hi {
        h[i * n + i] += shift;
    }
}
