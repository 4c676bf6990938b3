//! Closed-form irreducible representations for the supported families.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;

use super::{mixed_radix, FamilyTag, FiniteGroup};
use crate::error::{ensure, Result};
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};

/// Unitary irreducible representation, one matrix per group element.
#[derive(Clone, Debug)]
pub struct Irrep {
    label: String,
    dim: usize,
    matrices: Vec<ComplexMatrix>,
}

impl Irrep {
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &ComplexMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn character(&self, g: usize) -> C64 {
        self.matrices[g].trace()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim == 1 && self.matrices.iter().all(|m| (m[(0, 0)] - ONE).norm() < 1e-12)
    }
}

fn root_of_unity(k: usize, n: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * (k % n) as f64 / n as f64)
}

fn scalar(z: C64) -> ComplexMatrix {
    ComplexMatrix::from_fn(1, 1, |_, _| z)
}

fn one_dim(label: String, values: impl Iterator<Item = C64>) -> Irrep {
    Irrep { label, dim: 1, matrices: values.map(scalar).collect() }
}

fn cyclic(n: usize) -> Vec<Irrep> {
    (0..n).map(|k| one_dim(format!("chi{k}"), (0..n).map(|g| root_of_unity(k * g, n)))).collect()
}

fn dihedral(n: usize) -> Vec<Irrep> {
    let elems = || (0..2 * n).map(move |g| (g % n, g / n));
    let sign = |neg: bool| if neg { -ONE } else { ONE };
    let mut out = vec![
        one_dim("triv".into(), elems().map(|_| ONE)),
        one_dim("sign".into(), elems().map(move |(_, b)| sign(b == 1))),
    ];
    if n.is_multiple_of(2) {
        out.push(one_dim("alt".into(), elems().map(move |(a, _)| sign(a % 2 == 1))));
        out.push(one_dim("alt_sign".into(), elems().map(move |(a, b)| sign((a + b) % 2 == 1))));
    }
    for k in 1..=(n - 1) / 2 {
        let matrices = elems()
            .map(|(a, b)| {
                let w = root_of_unity(k * a, n);
                let d = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
                    (0, 0) => w,
                    (1, 1) => w.conj(),
                    _ => ZERO,
                });
                if b == 0 {
                    d
                } else {
                    let x = ComplexMatrix::from_fn(2, 2, |i, j| if i != j { ONE } else { ZERO });
                    &d * &x
                }
            })
            .collect();
        out.push(Irrep { label: format!("rho{k}"), dim: 2, matrices });
    }
    out
}

fn primitive_root(p: usize) -> usize {
    (1..p)
        .find(|&g| {
            let mut x = 1;
            (1..p - 1).all(|_| {
                x = x * g % p;
                x != 1
            })
        })
        .expect("every prime has a primitive root")
}

fn pow_mod(b: usize, e: usize, p: usize) -> usize {
    (0..e).fold(1, |acc, _| acc * b % p)
}

fn affine(p: usize) -> Vec<Irrep> {
    let elems = || (0..p * (p - 1)).map(move |g| (g / p + 1, g % p));
    let gen = primitive_root(p);
    let mut log = vec![0usize; p];
    let mut x = 1;
    for e in 0..p - 1 {
        log[x] = e;
        x = x * gen % p;
    }
    let mut out: Vec<Irrep> = (0..p - 1)
        .map(|k| one_dim(format!("psi{k}"), elems().map(|(a, _)| root_of_unity(k * log[a], p - 1))))
        .collect();
    // Basis e_x, x in Z_p^*, index x - 1: (a, b) e_x = w^(b a^-1 x) e_(a^-1 x).
    let d = p - 1;
    let matrices = elems()
        .map(|(a, b)| {
            let a_inv = pow_mod(a, p - 2, p);
            let mut m = ComplexMatrix::zeros(d, d);
            for x in 1..p {
                let y = a_inv * x % p;
                m[(y - 1, x - 1)] = root_of_unity(b * y, p);
            }
            m
        })
        .collect();
    out.push(Irrep { label: "std".into(), dim: d, matrices });
    out
}

fn heisenberg(p: usize) -> Vec<Irrep> {
    let elems = || (0..p * p * p).map(move |g| (g % p, g / p % p, g / (p * p)));
    let mut out = Vec::with_capacity(p * p + p - 1);
    for a in 0..p {
        for b in 0..p {
            out.push(one_dim(format!("chi{a}_{b}"), elems().map(|(x, y, _)| root_of_unity(a * x + b * y, p))));
        }
    }
    // rho_c(x, y, z) e_j = w^(c (z + x j)) e_(j + y).
    for c in 1..p {
        let matrices = elems()
            .map(|(x, y, z)| {
                let mut m = ComplexMatrix::zeros(p, p);
                for j in 0..p {
                    m[((j + y) % p, j)] = root_of_unity(c * (z + x * j), p);
                }
                m
            })
            .collect();
        out.push(Irrep { label: format!("schr{c}"), dim: p, matrices });
    }
    out
}

fn product(factors: &[FamilyTag]) -> Result<Vec<Irrep>> {
    let orders: Vec<usize> = factors.iter().map(FamilyTag::order).collect::<Result<_>>()?;
    let order: usize = orders.iter().product();
    let mut acc: Vec<Irrep> = vec![Irrep { label: String::new(), dim: 1, matrices: Vec::new() }];
    let per_factor: Vec<Vec<Irrep>> = factors.iter().map(family_irreps).collect::<Result<_>>()?;
    // Build label and dimension lists first, then matrices element by element.
    for (fi, reps) in per_factor.iter().enumerate() {
        let mut next = Vec::with_capacity(acc.len() * reps.len());
        for a in &acc {
            for r in reps {
                let label = if fi == 0 { r.label.clone() } else { format!("{}|{}", a.label, r.label) };
                next.push(Irrep { label, dim: a.dim * r.dim, matrices: Vec::new() });
            }
        }
        acc = next;
    }
    let counts: Vec<usize> = per_factor.iter().map(Vec::len).collect();
    for (idx, irrep) in acc.iter_mut().enumerate() {
        let choice = mixed_radix(idx, &counts);
        irrep.matrices = (0..order)
            .map(|g| {
                let digits = mixed_radix(g, &orders);
                choice
                    .iter()
                    .zip(&digits)
                    .zip(&per_factor)
                    .fold(ComplexMatrix::identity(1), |m, ((&c, &d), reps)| m.kron(reps[c].matrix(d)))
            })
            .collect();
    }
    Ok(acc)
}

fn family_irreps(tag: &FamilyTag) -> Result<Vec<Irrep>> {
    tag.order()?;
    Ok(match *tag {
        FamilyTag::Cyclic(n) => cyclic(n),
        FamilyTag::Dihedral(n) => dihedral(n),
        FamilyTag::Affine(p) => affine(p),
        FamilyTag::Heisenberg(p) => heisenberg(p),
        FamilyTag::Product(ref fs) => product(fs)?,
    })
}

/// Homomorphism checks run on every pair up to this order, sampled above.
const FULL_HOMOMORPHISM_ORDER: usize = 200;

/// Complete set of inequivalent irreps for the group's family.
///
/// Checks on construction: every matrix unitary within 1e-10, the
/// homomorphism law within 1e-10, `sum d^2 = |G|`, and orthonormality of
/// characters (`<chi_a, chi_b> = delta_ab` within 1e-8), which gives both
/// irreducibility and pairwise inequivalence.
pub fn irreps(group: &FiniteGroup) -> Result<Vec<Irrep>> {
    let reps = family_irreps(group.family())?;
    let order = group.order();
    let dims: usize = reps.iter().map(|r| r.dim * r.dim).sum();
    ensure!(dims == order, "irrep dimensions give sum d^2 = {dims}, not {order}");
    for r in &reps {
        ensure!(r.matrices.len() == order, "irrep {} has the wrong number of matrices", r.label);
        let id = ComplexMatrix::identity(r.dim);
        for (g, m) in r.matrices.iter().enumerate() {
            let defect = (&m.adjoint() * m).max_abs_diff(&id);
            ensure!(defect <= 1e-10, "irrep {} is not unitary at {g} ({defect:e})", r.label);
        }
        let check = |a: usize, b: usize| -> Result<()> {
            let lhs = &r.matrices[a] * &r.matrices[b];
            let defect = lhs.max_abs_diff(&r.matrices[group.mul(a, b)]);
            ensure!(defect <= 1e-10, "irrep {} breaks the homomorphism law at ({a}, {b})", r.label);
            Ok(())
        };
        if order <= FULL_HOMOMORPHISM_ORDER {
            for a in 0..order {
                for b in 0..order {
                    check(a, b)?;
                }
            }
        } else {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
            for _ in 0..20_000 {
                check(rng.random_range(0..order), rng.random_range(0..order))?;
            }
        }
    }
    let chars: Vec<Vec<C64>> = reps.iter().map(|r| (0..order).map(|g| r.character(g)).collect()).collect();
    for (i, a) in chars.iter().enumerate() {
        for (j, b) in chars.iter().enumerate().take(i + 1) {
            let ip: C64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum::<C64>() / order as f64;
            let want = if i == j { 1.0 } else { 0.0 };
            ensure!(
                (ip - want).norm() <= 1e-8,
                "characters of {} and {} have inner product {ip}",
                reps[i].label,
                reps[j].label
            );
        }
    }
    Ok(reps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;

    fn dims(s: &str) -> Vec<usize> {
        irreps(&make_group(&s.parse().unwrap()).unwrap()).unwrap().iter().map(Irrep::dim).collect()
    }

    #[test]
    fn family_dimensions() {
        assert_eq!(dims("cyclic:2"), vec![1, 1]);
        assert_eq!(dims("dihedral:4"), vec![1, 1, 1, 1, 2]);
        assert_eq!(dims("dihedral:5"), vec![1, 1, 2, 2]);
        assert_eq!(dims("dihedral:1"), vec![1, 1]);
        assert_eq!(dims("affine:5"), vec![1, 1, 1, 1, 4]);
        assert_eq!(dims("affine:2"), vec![1, 1]);
        let h3 = dims("heisenberg:3");
        assert_eq!(h3.iter().filter(|&&d| d == 1).count(), 9);
        assert_eq!(h3.iter().filter(|&&d| d == 3).count(), 2);
        assert_eq!(dims("cyclic:2*dihedral:3"), vec![1, 1, 2, 1, 1, 2]);
    }

    #[test]
    fn z2_characters() {
        let reps = irreps(&make_group(&FamilyTag::Cyclic(2)).unwrap()).unwrap();
        let vals: Vec<Vec<f64>> = reps.iter().map(|r| (0..2).map(|g| r.character(g).re).collect()).collect();
        assert_eq!(vals, vec![vec![1.0, 1.0], vec![1.0, -1.0]]);
    }

    #[test]
    fn larger_families_validate() {
        for s in ["affine:7", "affine:13", "heisenberg:5", "dihedral:12", "cyclic:3*heisenberg:3"] {
            let g = make_group(&s.parse().unwrap()).unwrap();
            assert!(irreps(&g).is_ok(), "{s}");
        }
    }
}
