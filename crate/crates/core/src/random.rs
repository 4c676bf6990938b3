//! Seeded Gaussian sampling, Haar-random bases and the Gaussian random POVMs.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::matrix::{self, index_labels, inner, norm, ComplexMatrix, C64, ZERO};

/// Identifies one reproducible random stream.
///
/// The pair `(master_seed, stream_index)` fully determines the sample
/// sequence. Experiments derive one stream per trial with [`RngStream::substream`],
/// so results do not depend on how trials are scheduled across threads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self { master_seed, stream_index }
    }

    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }

    /// Child stream `k` of this stream. Children of distinct parents get
    /// distinct ChaCha keys; children of one parent differ in stream number.
    pub fn substream(&self, k: u64) -> Self {
        let key = splitmix64(self.master_seed ^ splitmix64(self.stream_index ^ 0xa076_1d64_78bd_642f));
        Self { master_seed: key, stream_index: k }
    }
}

/// Runs `f` once per trial on that trial's substream, in parallel, and returns
/// the results in trial order.
pub fn map_trials<T, F>(trials: usize, rng: RngStream, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..trials)
        .into_par_iter()
        .map(|i| f(i, &mut rng.substream(i as u64).generator()))
        .collect()
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `n` complex entries with independent standard normal real and imaginary parts.
pub fn sample_gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<C64>> {
    ensure!(n >= 1, "vector dimension must be at least 1");
    Ok((0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        })
        .collect())
}

/// Uniformly random unit vector in `C^n` (normalised Gaussian).
pub fn sample_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<C64>> {
    loop {
        let v = sample_gaussian_vector(n, rng)?;
        let len = norm(&v);
        if len >= 1e-300 {
            return Ok(v.into_iter().map(|z| z / len).collect());
        }
    }
}

/// Gram-Schmidt orthonormalisation.
///
/// Output vector `i` is the normalised component of input `i` orthogonal to
/// inputs `0..i`. The projection is applied twice (classical Gram-Schmidt with
/// reorthogonalisation), which computes the same vectors as the textbook
/// recurrence but stays orthogonal to machine precision.
pub fn gram_schmidt(vectors: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
    let dim = vectors.first().map_or(0, Vec::len);
    ensure!(
        vectors.iter().all(|v| v.len() == dim),
        "vectors have differing dimensions"
    );
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let len = norm(v);
        if len == 0.0 || !len.is_finite() {
            return Err(Error::Dependent { index, residual: 0.0 });
        }
        let mut w: Vec<C64> = v.iter().map(|z| z / len).collect();
        for pass in 0..2 {
            let coeffs: Vec<C64> = out.iter().map(|q| inner(q, &w)).collect();
            for (q, c) in out.iter().zip(&coeffs) {
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
            if pass == 0 {
                let residual = norm(&w);
                if residual <= 1e-12 {
                    return Err(Error::Dependent { index, residual });
                }
            }
        }
        let r = norm(&w);
        out.push(w.into_iter().map(|z| z / r).collect());
    }
    Ok(out)
}

/// `n` orthonormal vectors spanning `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    vectors: Vec<Vec<C64>>,
}

impl OrthonormalBasis {
    pub fn new(vectors: Vec<Vec<C64>>) -> Result<Self> {
        let n = vectors.len();
        ensure!(n >= 1, "empty basis");
        ensure!(vectors.iter().all(|v| v.len() == n), "basis needs n vectors of length n");
        for i in 0..n {
            ensure!(
                (norm(&vectors[i]) - 1.0).abs() <= 1e-10,
                "basis vector {i} is not normalised"
            );
            for j in 0..i {
                let ip = inner(&vectors[i], &vectors[j]).norm();
                ensure!(ip <= 1e-10, "basis vectors {j} and {i} overlap by {ip:e}");
            }
        }
        Ok(Self { vectors })
    }

    pub fn computational(n: usize) -> Self {
        let vectors = (0..n)
            .map(|i| {
                let mut e = vec![ZERO; n];
                e[i] = matrix::ONE;
                e
            })
            .collect();
        Self { vectors }
    }

    /// The columns of a unitary matrix.
    pub fn from_unitary(u: &ComplexMatrix) -> Result<Self> {
        ensure!(u.is_square(), "unitary must be square");
        Self::new((0..u.cols()).map(|j| u.column(j)).collect())
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    /// Unitary whose columns are the basis vectors.
    pub fn to_unitary(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| self.vectors[j][i])
    }

    /// `{U b_t}`.
    pub fn transformed(&self, u: &ComplexMatrix) -> Self {
        Self { vectors: self.vectors.iter().map(|v| u.mat_vec(v)).collect() }
    }
}

/// Haar-random orthonormal basis: Gram-Schmidt on the columns of an `n x n`
/// complex Gaussian matrix. The triangular factor this implies has a positive
/// real diagonal (each `<b'_i|b~_i>` is the residual norm), which is the
/// phase convention that makes the result exactly Haar distributed.
pub fn sample_haar_basis<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<OrthonormalBasis> {
    ensure!(n >= 1, "basis dimension must be at least 1");
    loop {
        let columns: Vec<Vec<C64>> = (0..n).map(|_| sample_gaussian_vector(n, rng)).collect::<Result<_>>()?;
        match gram_schmidt(&columns) {
            Ok(vectors) => return Ok(OrthonormalBasis { vectors }),
            // Probability zero; redraw.
            Err(Error::Dependent { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Positive operator-valued measure: PSD elements that sum to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
    labels: Arc<[String]>,
}

impl Povm {
    /// Checks every element is Hermitian PSD (minimum eigenvalue at least
    /// -1e-9) and that the elements sum to the identity within 1e-8.
    pub fn new(elements: Vec<ComplexMatrix>, labels: Arc<[String]>) -> Result<Self> {
        ensure!(!elements.is_empty(), "a POVM needs at least one element");
        ensure!(elements.len() == labels.len(), "one label per POVM element required");
        let dim = elements[0].rows();
        let mut total = ComplexMatrix::zeros(dim, dim);
        for (i, e) in elements.iter().enumerate() {
            ensure!(
                e.rows() == dim && e.cols() == dim,
                "POVM element {i} is not {dim}x{dim}"
            );
            let min_eig = -matrix::max_eigenvalue(&e.scale_real(-1.0))?;
            ensure!(min_eig >= -1e-9, "POVM element {i} has eigenvalue {min_eig:e}");
            total = &total + e;
        }
        let defect = total.max_abs_diff(&ComplexMatrix::identity(dim));
        ensure!(defect <= 1e-8, "POVM elements sum to identity only within {defect:e}");
        Ok(Self { dim, elements, labels })
    }

    /// Rank-one projectors onto the basis vectors.
    pub fn from_basis(basis: &OrthonormalBasis) -> Self {
        let elements = basis.vectors().iter().map(|b| ComplexMatrix::outer(b, b)).collect();
        Self { dim: basis.dim(), elements, labels: index_labels(basis.dim()) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn labels(&self) -> &Arc<[String]> {
        &self.labels
    }

    /// Replaces element `index` with its rank-one spectral pieces
    /// `lambda_k |u_k><u_k|` (zero eigenvalues dropped).
    pub fn refine_element(&self, index: usize) -> Result<Self> {
        ensure!(index < self.len(), "no POVM element {index}");
        let eig = matrix::hermitian_eig(&self.elements[index])?;
        let mut elements = Vec::with_capacity(self.len() + self.dim);
        let mut labels = Vec::with_capacity(self.len() + self.dim);
        for (i, e) in self.elements.iter().enumerate() {
            if i != index {
                elements.push(e.clone());
                labels.push(self.labels[i].clone());
                continue;
            }
            for (k, &lambda) in eig.values.iter().enumerate() {
                if lambda <= 1e-14 {
                    continue;
                }
                let u = eig.vectors.column(k);
                elements.push(ComplexMatrix::outer(&u, &u).scale_real(lambda));
                labels.push(format!("{}.{k}", self.labels[i]));
            }
        }
        Self::new(elements, labels.into())
    }
}

/// Gaussian POVM with a `K`-dimensional ancilla.
///
/// Draws `m = K n` Gaussian vectors `b_i` in `C^n (x) C^K`, sets
/// `ell = ||sum_i b_i b_i^dagger||`, and restricts the elements
/// `b_i b_i^dagger / ell` and `nu = I - sum_i b_i b_i^dagger / ell` to the
/// subspace `C^n (x) |0>`. The ancilla index runs fastest in the product basis.
pub fn build_random_povm_ancilla<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Povm> {
    ensure!(n >= 1 && k >= 1, "need n >= 1 and K >= 1, got n={n}, K={k}");
    let m = n * k;
    let vectors: Vec<Vec<C64>> = (0..m).map(|_| sample_gaussian_vector(m, rng)).collect::<Result<_>>()?;
    let mut gram = ComplexMatrix::zeros(m, m);
    for b in &vectors {
        for r in 0..m {
            let br = b[r];
            for c in 0..m {
                gram[(r, c)] += br * b[c].conj();
            }
        }
    }
    let ell = matrix::max_eigenvalue(&gram)?;
    let mut elements = Vec::with_capacity(m + 1);
    let mut nu = ComplexMatrix::identity(n);
    for b in &vectors {
        let restricted: Vec<C64> = (0..n).map(|j| b[j * k]).collect();
        let e = ComplexMatrix::outer(&restricted, &restricted).scale_real(1.0 / ell);
        nu = &nu - &e;
        elements.push(e);
    }
    elements.push(nu);
    let labels: Vec<String> = (0..m).map(|i| format!("b{i}")).chain(std::iter::once("nu".to_string())).collect();
    Povm::new(elements, labels.into())
}

/// Gaussian POVM without ancilla: `n` vectors in `C^n` plus `nu`.
pub fn build_random_povm_plain<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Povm> {
    build_random_povm_ancilla(n, 1, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::frobenius_norm;

    #[test]
    fn streams_replay() {
        let s = RngStream::new(7, 3);
        let a = sample_gaussian_vector(1, &mut s.generator()).unwrap();
        let b = sample_gaussian_vector(1, &mut s.generator()).unwrap();
        assert_eq!(a, b);
        let c = sample_gaussian_vector(1, &mut RngStream::new(7, 4).generator()).unwrap();
        assert_ne!(a, c);
        assert_ne!(s.substream(0), RngStream::new(7, 4).substream(0));
    }

    #[test]
    fn zero_dimension_rejected() {
        let mut rng = RngStream::new(0, 0).generator();
        assert!(sample_gaussian_vector(0, &mut rng).is_err());
        assert!(sample_haar_basis(0, &mut rng).is_err());
    }

    #[test]
    fn unit_vectors_are_normalised() {
        let mut rng = RngStream::new(1, 0).generator();
        for n in [1, 2, 17, 100] {
            let v = sample_unit_vector(n, &mut rng).unwrap();
            assert!((norm(&v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_schmidt_fixed_point_and_textbook_case() {
        let e = OrthonormalBasis::computational(3);
        let out = gram_schmidt(e.vectors()).unwrap();
        for (a, b) in out.iter().zip(e.vectors()) {
            assert!(a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12));
        }
        let one = C64::new(1.0, 0.0);
        let out = gram_schmidt(&[vec![one, ZERO], vec![one, one]]).unwrap();
        assert!((out[1][0]).norm() < 1e-15 && (out[1][1] - one).norm() < 1e-15);
    }

    #[test]
    fn gram_schmidt_reports_dependent_index() {
        let one = C64::new(1.0, 0.0);
        let vs = vec![vec![one, ZERO, ZERO], vec![ZERO, one, ZERO], vec![one, one * 2.0, ZERO], vec![ZERO, ZERO, one]];
        match gram_schmidt(&vs) {
            Err(Error::Dependent { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected dependency error, got {other:?}"),
        }
    }

    #[test]
    fn haar_basis_is_orthonormal() {
        let mut rng = RngStream::new(2, 0).generator();
        for n in [1, 2, 5, 32] {
            let b = sample_haar_basis(n, &mut rng).unwrap();
            assert!(OrthonormalBasis::new(b.vectors().to_vec()).is_ok());
            let u = b.to_unitary();
            assert!((&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn ancilla_povm_small_case() {
        let mut rng = RngStream::new(3, 0).generator();
        let povm = build_random_povm_ancilla(2, 1, &mut rng).unwrap();
        assert_eq!(povm.len(), 3);
        let total = povm.elements().iter().fold(ComplexMatrix::zeros(2, 2), |acc, e| &acc + e);
        assert!(total.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-8);
        let nu = povm.elements().last().unwrap();
        let min = matrix::hermitian_eig(nu).unwrap().values[1];
        assert!(min >= -1e-9);
    }

    #[test]
    fn plain_povm_scalar_case() {
        let mut rng = RngStream::new(4, 0).generator();
        let povm = build_random_povm_plain(1, &mut rng).unwrap();
        assert_eq!(povm.len(), 2);
        assert!((povm.elements()[0][(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(povm.elements()[1][(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn ancilla_povm_element_count() {
        let mut rng = RngStream::new(5, 0).generator();
        let povm = build_random_povm_ancilla(3, 4, &mut rng).unwrap();
        assert_eq!(povm.len(), 13);
        assert_eq!(povm.dim(), 3);
        assert_eq!(povm.labels().last().unwrap(), "nu");
    }

    #[test]
    fn povm_validation_rejects_incomplete_and_negative() {
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(Povm::new(vec![half.clone()], index_labels(1)).is_err());
        let neg = ComplexMatrix::from_real_diag(&[1.5, 1.0]);
        let fix = ComplexMatrix::from_real_diag(&[-0.5, 0.0]);
        assert!(Povm::new(vec![neg, fix], index_labels(2)).is_err());
        assert!(Povm::new(vec![half.clone(), half], index_labels(2)).is_ok());
    }

    #[test]
    fn refining_nu_keeps_completeness() {
        let mut rng = RngStream::new(6, 0).generator();
        let povm = build_random_povm_ancilla(4, 2, &mut rng).unwrap();
        let refined = povm.refine_element(povm.len() - 1).unwrap();
        assert!(refined.len() >= povm.len());
        let a = refined.elements().iter().fold(ComplexMatrix::zeros(4, 4), |acc, e| &acc + e);
        assert!(frobenius_norm(&(&a - &ComplexMatrix::identity(4))) < 1e-8);
    }
}
