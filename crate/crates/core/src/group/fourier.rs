//! Quantum Fourier transform, `rho(H)` projectors, and the irrep distances.

use serde::Serialize;

use super::{irreps, FiniteGroup, Irrep, Subgroup};
use crate::error::{ensure, Result};
use crate::matrix::{frobenius_norm, numerical_rank, ComplexMatrix, C64, DEFAULT_RANK_TOL};

/// `rho(H) = (1/|H|) sum_{h in H} rho(h)`, the projector onto `H`-invariant vectors.
pub fn rho_projector(rho: &Irrep, h: &Subgroup) -> ComplexMatrix {
    let d = rho.dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for &x in h.elements() {
        acc = &acc + rho.matrix(x);
    }
    acc.scale_real(1.0 / h.order() as f64)
}

/// Rank of an orthogonal projector. A nonzero projector has Frobenius norm
/// at least 1, so anything below 1e-6 is rounding noise around zero, which a
/// relative rank threshold alone would misread.
pub fn projector_rank(p: &ComplexMatrix) -> usize {
    if frobenius_norm(p) < 1e-6 {
        0
    } else {
        numerical_rank(p, DEFAULT_RANK_TOL).expect("tolerance is positive")
    }
}

/// Weak Fourier sampling law `P_H(rho) = d_rho |H| r_rho(H) / |G|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IrrepDistribution {
    pub labels: Vec<String>,
    pub probs: Vec<f64>,
}

/// A group together with its irreps and the Fourier basis layout.
///
/// Fourier basis vector `(rho, i, j)` sits at index `offset(rho) + i d_rho + j`,
/// irreps taken in the order [`irreps`] lists them.
#[derive(Clone, Debug)]
pub struct Representations {
    group: FiniteGroup,
    irreps: Vec<Irrep>,
    offsets: Vec<usize>,
}

impl Representations {
    pub fn new(group: FiniteGroup) -> Result<Self> {
        let irreps = irreps(&group)?;
        let mut offsets = Vec::with_capacity(irreps.len());
        let mut at = 0;
        for r in &irreps {
            offsets.push(at);
            at += r.dim() * r.dim();
        }
        Ok(Self { group, irreps, offsets })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn fourier_index(&self, rho: usize, i: usize, j: usize) -> usize {
        self.offsets[rho] + i * self.irreps[rho].dim() + j
    }

    /// `Q[(rho, i, j), g] = sqrt(d_rho / |G|) rho_ij(g)`.
    pub fn qft_matrix(&self) -> ComplexMatrix {
        let n = self.group.order();
        let mut q = ComplexMatrix::zeros(n, n);
        for (k, r) in self.irreps.iter().enumerate() {
            let d = r.dim();
            let w = (d as f64 / n as f64).sqrt();
            for g in 0..n {
                let m = r.matrix(g);
                for i in 0..d {
                    for j in 0..d {
                        q[(self.fourier_index(k, i, j), g)] = m[(i, j)] * w;
                    }
                }
            }
        }
        q
    }

    pub fn rho_projector(&self, rho: usize, h: &Subgroup) -> ComplexMatrix {
        rho_projector(&self.irreps[rho], h)
    }

    /// `r_rho(H)` for every irrep.
    pub fn projector_ranks(&self, h: &Subgroup) -> Vec<usize> {
        (0..self.irreps.len()).map(|k| projector_rank(&self.rho_projector(k, h))).collect()
    }

    pub fn irrep_distribution(&self, h: &Subgroup) -> Result<IrrepDistribution> {
        let n = self.group.order() as f64;
        let probs: Vec<f64> = self
            .projector_ranks(h)
            .iter()
            .zip(&self.irreps)
            .map(|(&r, rho)| (rho.dim() * h.order() * r) as f64 / n)
            .collect();
        let total: f64 = probs.iter().sum();
        ensure!((total - 1.0).abs() <= 1e-9, "irrep distribution sums to {total}");
        Ok(IrrepDistribution { labels: self.irreps.iter().map(|r| r.label().to_string()).collect(), probs })
    }

    /// `w(H1, H2) = sum_rho |P_H1(rho) - P_H2(rho)|`.
    pub fn w_distance(&self, h1: &Subgroup, h2: &Subgroup) -> Result<f64> {
        let (p, q) = (self.irrep_distribution(h1)?, self.irrep_distribution(h2)?);
        Ok(p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum())
    }

    /// `w(H1, H2) + (1 / (|G| log2 |G|)) sum_rho d_rho ||(|H1| rho(H1) - |H2| rho(H2))||_F`.
    pub fn r_distance(&self, h1: &Subgroup, h2: &Subgroup) -> Result<f64> {
        let n = self.group.order();
        ensure!(n >= 2, "r distance needs |G| >= 2");
        let w = self.w_distance(h1, h2)?;
        let mut s = 0.0;
        for (k, rho) in self.irreps.iter().enumerate() {
            let a = self.rho_projector(k, h1).scale_real(h1.order() as f64);
            let b = self.rho_projector(k, h2).scale_real(h2.order() as f64);
            s += rho.dim() as f64 * frobenius_norm(&(&a - &b));
        }
        Ok(w + s / (n as f64 * (n as f64).log2()))
    }

    /// Index of the trivial irrep.
    pub fn trivial_irrep(&self) -> usize {
        self.irreps.iter().position(Irrep::is_trivial).expect("every group has a trivial irrep")
    }

    /// Irrep whose matrices are the entrywise conjugates of `rho`'s.
    pub fn dual_index(&self, rho: usize) -> usize {
        let target: Vec<C64> = (0..self.group.order()).map(|g| self.irreps[rho].character(g).conj()).collect();
        self.irreps
            .iter()
            .position(|r| (0..self.group.order()).all(|g| (r.character(g) - target[g]).norm() < 1e-9))
            .expect("the dual of an irrep is an irrep")
    }
}

pub fn qft_matrix(group: &FiniteGroup) -> Result<ComplexMatrix> {
    Ok(Representations::new(group.clone())?.qft_matrix())
}

pub fn irrep_distribution(group: &FiniteGroup, h: &Subgroup) -> Result<IrrepDistribution> {
    Representations::new(group.clone())?.irrep_distribution(h)
}

pub fn w_distance(group: &FiniteGroup, h1: &Subgroup, h2: &Subgroup) -> Result<f64> {
    Representations::new(group.clone())?.w_distance(h1, h2)
}

pub fn r_distance(group: &FiniteGroup, h1: &Subgroup, h2: &Subgroup) -> Result<f64> {
    Representations::new(group.clone())?.r_distance(h1, h2)
}
