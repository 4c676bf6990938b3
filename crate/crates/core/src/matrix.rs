//! Dense complex linear algebra.
//!
//! Everything here works on small row-major matrices (n in the low hundreds at
//! most). Hermitian eigenproblems use cyclic Jacobi, singular values use
//! one-sided (Hestenes) Jacobi, and the largest eigenvalue of a Hermitian
//! matrix is found by Householder tridiagonalisation followed by Sturm
//! bisection, which is much cheaper than a full decomposition at n = 256.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{ensure, Error, Result};

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Hermiticity tolerance used when validating inputs, relative to the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Default relative threshold for [`numerical_rank`].
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        ensure!(
            data.len() == rows * cols,
            "{} entries cannot fill a {rows}x{cols} matrix",
            data.len()
        );
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        ensure!(
            columns.iter().all(|c| c.len() == rows),
            "columns have differing lengths"
        );
        Ok(Self::from_fn(rows, cols, |i, j| columns[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(C64::conj).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mat_vec");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `<u|A|u>`, real part only; meant for Hermitian `A`.
    pub fn quadratic_form(&self, u: &[C64]) -> f64 {
        assert_eq!(u.len(), self.cols, "dimension mismatch in quadratic_form");
        let mut acc = ZERO;
        for (i, ui) in u.iter().enumerate() {
            let row: C64 = self.row(i).iter().zip(u).map(|(a, b)| a * b).sum();
            acc += ui.conj() * row;
        }
        acc.re
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A - A^dagger|` over entries; infinite for non-square matrices.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.max_abs().max(1.0)
    }

    /// `Tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert!(
            self.cols == other.rows && self.rows == other.cols,
            "dimension mismatch in trace_product"
        );
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// The submatrix of rows and columns listed in `rows`/`cols`.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "dimension mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "dimension mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in mul");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let src = rhs.row(k);
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `<u|v>`, antilinear in the first argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    assert_eq!(u.len(), v.len(), "dimension mismatch in inner product");
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    norm_sqr(v).sqrt()
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.values[k] * v[(j, k)].conj()).sum()
        })
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    ensure!(h.is_square(), "expected a square matrix, got {}x{}", h.rows, h.cols);
    ensure!(
        h.is_hermitian(HERMITIAN_TOL),
        "matrix is not Hermitian (defect {:e})",
        h.hermitian_defect()
    );
    Ok(())
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEig> {
    check_hermitian(h)?;
    let n = h.rows;
    let mut a = h.clone();
    // Symmetrise so that round-off in the input cannot stall convergence.
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = frobenius_norm(&a);

    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 || mag <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / mag;
                let zeta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // V = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
                let vpp = C64::new(c, 0.0);
                let vpq = C64::new(s, 0.0);
                let vqp = -phase.conj() * s;
                let vqq = phase.conj() * c;
                rotate_columns(&mut a, p, q, vpp, vpq, vqp, vqq);
                rotate_rows(&mut a, p, q, vpp, vpq, vqp, vqq);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                rotate_columns(&mut v, p, q, vpp, vpq, vqp, vqq);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig { values, vectors })
}

#[allow(clippy::too_many_arguments)]
fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, vpp: C64, vpq: C64, vqp: C64, vqq: C64) {
    for k in 0..m.rows {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp * vpp + mq * vqp;
        m[(k, q)] = mp * vpq + mq * vqq;
    }
}

#[allow(clippy::too_many_arguments)]
fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, vpp: C64, vpq: C64, vqp: C64, vqq: C64) {
    for k in 0..m.cols {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = vpp.conj() * mp + vqp.conj() * mq;
        m[(q, k)] = vpq.conj() * mp + vqq.conj() * mq;
    }
}

/// Eigenvalues only (descending).
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(h)?.values)
}

/// Largest eigenvalue of a Hermitian matrix.
///
/// Householder reduction to real tridiagonal form, then bisection on the
/// Sturm count. The returned value is the upper end of the final bracket, so
/// it never undershoots the true eigenvalue by more than rounding.
pub fn max_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    check_hermitian(h)?;
    let (diag, off) = tridiagonalize(h);
    Ok(tridiagonal_max_eigenvalue(&diag, &off))
}

fn tridiagonalize(h: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = h.rows;
    let mut a = h.clone();
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let x: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = norm(&x);
        if xnorm == 0.0 {
            off.push(0.0);
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = norm(&v);
        if vnorm == 0.0 {
            off.push(xnorm);
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // p = A v on the trailing block, w = p - (v^dagger p) v.
        let mut p = vec![ZERO; m];
        for (ii, pi) in p.iter_mut().enumerate() {
            let row = &a.row(k + 1 + ii)[k + 1..];
            *pi = row.iter().zip(&v).map(|(x, y)| x * y).sum();
        }
        let kappa = inner(&v, &p);
        let w: Vec<C64> = p.iter().zip(&v).map(|(pi, vi)| pi - kappa * vi).collect();
        for ii in 0..m {
            for jj in 0..m {
                let upd = v[ii] * w[jj].conj() + w[ii] * v[jj].conj();
                a[(k + 1 + ii, k + 1 + jj)] -= upd * 2.0;
            }
        }
        // Column k below the subdiagonal is now alpha * e1.
        off.push(alpha.norm());
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    (diag, off)
}

fn sturm_count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (i, &d) in diag.iter().enumerate() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = d - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn tridiagonal_max_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    if n == 0 {
        return 0.0;
    }
    let radius = |i: usize| {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let pad = f64::EPSILON * (lo.abs().max(hi.abs()) + 1.0);
    lo -= pad;
    hi += pad;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count_below(diag, off, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            break;
        }
    }
    hi
}

/// Singular values in descending order, by one-sided Jacobi.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    // Orthogonalise the columns of whichever of A, A^dagger has fewer of them.
    let work = if a.cols > a.rows { a.adjoint() } else { a.clone() };
    let mut cols: Vec<Vec<C64>> = (0..work.cols).map(|j| work.column(j)).collect();
    let ncols = cols.len();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..ncols {
            for q in p + 1..ncols {
                let alpha = norm_sqr(&cols[p]);
                let beta = norm_sqr(&cols[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = inner(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 { 1.0 } else { zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt()) };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let yq = *y * phase.conj();
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Sum of singular values, `Tr sqrt(A^dagger A)`.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    ensure!(a.is_square(), "trace norm needs a square matrix, got {}x{}", a.rows, a.cols);
    Ok(singular_values(a).iter().sum())
}

pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.data.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
}

/// Largest singular value, computed as the square root of the top eigenvalue
/// of the smaller Gram matrix.
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    if a.rows == 0 || a.cols == 0 {
        return 0.0;
    }
    let gram = if a.cols <= a.rows { &a.adjoint() * a } else { a * &a.adjoint() };
    let top = max_eigenvalue(&gram).expect("Gram matrices are Hermitian");
    top.max(0.0).sqrt()
}

/// Number of singular values above `tol` times the largest one.
pub fn numerical_rank(a: &ComplexMatrix, tol: f64) -> Result<usize> {
    ensure!(tol > 0.0, "rank tolerance must be positive, got {tol}");
    let sv = singular_values(a);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * top).count())
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity. Eigenvalues in
    /// `[-1e-9, 0)` are clamped to zero; anything more negative is rejected.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_hermitian(&matrix)?;
        let tr = matrix.trace();
        ensure!(
            (tr.re - 1.0).abs() <= 1e-10 && tr.im.abs() <= 1e-10,
            "density matrix trace is {tr}, expected 1"
        );
        let eig = hermitian_eig(&matrix)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        ensure!(min >= -1e-9, "density matrix has negative eigenvalue {min:e}");
        if min < 0.0 {
            let clamped = HermitianEig {
                values: eig.values.iter().map(|&l| l.max(0.0)).collect(),
                vectors: eig.vectors,
            };
            let m = clamped.reconstruct();
            let t = m.trace().re;
            return Ok(Self { matrix: m.scale_real(1.0 / t) });
        }
        Ok(Self { matrix })
    }

    /// `|psi><psi|` for a (not necessarily normalised) nonzero vector.
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        let n = norm(psi);
        ensure!(!psi.is_empty() && n > 1e-300, "pure state vector must be nonzero");
        let unit: Vec<C64> = psi.iter().map(|z| z / n).collect();
        Ok(Self { matrix: ComplexMatrix::outer(&unit, &unit) })
    }

    /// Uniform mixture of the given orthonormal vectors: the completely mixed
    /// state on their span.
    pub fn completely_mixed_on(vectors: &[Vec<C64>]) -> Result<Self> {
        ensure!(!vectors.is_empty(), "need at least one vector");
        let n = vectors[0].len();
        let mut m = ComplexMatrix::zeros(n, n);
        for v in vectors {
            ensure!(v.len() == n, "vectors have differing dimensions");
            m = &m + &ComplexMatrix::outer(v, v);
        }
        Self::new(m.scale_real(1.0 / vectors.len() as f64))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64) }
    }

    /// The completely mixed state on the coordinate subspace `indices`.
    pub fn coordinate_mixture(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let idx: Vec<usize> = indices.into_iter().collect();
        ensure!(!idx.is_empty(), "need at least one coordinate");
        ensure!(idx.iter().all(|&i| i < n), "coordinate out of range");
        let mut diag = vec![0.0; n];
        for &i in &idx {
            diag[i] += 1.0 / idx.len() as f64;
        }
        Ok(Self { matrix: ComplexMatrix::from_real_diag(&diag) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self { matrix: &(u * &self.matrix) * &u.adjoint() }
    }

    /// `rho (x) |0><0|` on `C^n (x) C^ancilla`.
    pub fn with_ancilla(&self, ancilla: usize) -> Self {
        let mut zero = ComplexMatrix::zeros(ancilla, ancilla);
        zero[(0, 0)] = ONE;
        Self { matrix: self.matrix.kron(&zero) }
    }
}

/// A probability vector over labelled outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
    labels: Arc<[String]>,
}

impl OutcomeDistribution {
    /// Clamps entries in `[-1e-12, 0)` to zero and renormalises when the sum
    /// is within 1e-9 of one.
    pub fn new(probs: Vec<f64>, labels: Arc<[String]>) -> Result<Self> {
        ensure!(
            probs.len() == labels.len(),
            "{} probabilities for {} labels",
            probs.len(),
            labels.len()
        );
        ensure!(!probs.is_empty(), "empty outcome distribution");
        let mut probs = probs;
        for p in probs.iter_mut() {
            ensure!(p.is_finite() && *p >= -1e-12, "negative outcome probability {p:e}");
            *p = p.max(0.0);
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Normalisation(total));
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        Ok(Self { probs, labels })
    }

    /// Outcomes labelled `0..len`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let labels = index_labels(probs.len());
        Self::new(probs, labels)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> &Arc<[String]> {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn same_outcomes(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

pub fn index_labels(n: usize) -> Arc<[String]> {
    (0..n).map(|i| i.to_string()).collect::<Vec<_>>().into()
}

/// Un-halved l1 distance, in `[0, 2]`.
pub fn total_variation(p: &OutcomeDistribution, q: &OutcomeDistribution) -> Result<f64> {
    ensure!(p.same_outcomes(q), "distributions are over different outcome sets");
    Ok(p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum())
}
