//! Finite groups as multiplication tables, their subgroups and irreps.

mod fourier;
mod irreps;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::Serialize;

use crate::error::{ensure, Error, Result};

pub use fourier::{
    irrep_distribution, projector_rank, qft_matrix, r_distance, rho_projector, w_distance, IrrepDistribution, Representations,
};
pub use irreps::{irreps, Irrep};

/// Largest prime accepted for the affine and Heisenberg families.
pub const MAX_PRIME: usize = 13;
/// Associativity is checked on every triple up to this order, sampled above.
pub const FULL_AXIOM_CHECK_ORDER: usize = 64;

/// A supported group family with its parameter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "String")]
pub enum FamilyTag {
    /// `Z_n`.
    Cyclic(usize),
    /// `D_n`, order `2n`. Element `r^a s^b` has index `a + n b`.
    Dihedral(usize),
    /// `Z_p x| Z_p^*`, order `p(p-1)`. Element `(a, b)`, acting as `x -> a x + b`,
    /// has index `(a - 1) p + b`.
    Affine(usize),
    /// Upper unitriangular 3x3 matrices over `Z_p`, order `p^3`. Element
    /// `(x, y, z)` has index `x + p y + p^2 z`.
    Heisenberg(usize),
    /// Direct product. Indices are mixed radix with the first factor most significant.
    Product(Vec<FamilyTag>),
}

impl From<FamilyTag> for String {
    fn from(t: FamilyTag) -> String {
        t.to_string()
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyTag::Cyclic(n) => write!(f, "cyclic:{n}"),
            FamilyTag::Dihedral(n) => write!(f, "dihedral:{n}"),
            FamilyTag::Affine(p) => write!(f, "affine:{p}"),
            FamilyTag::Heisenberg(p) => write!(f, "heisenberg:{p}"),
            FamilyTag::Product(fs) => {
                let parts: Vec<String> = fs.iter().map(|t| t.to_string()).collect();
                write!(f, "{}", parts.join("*"))
            }
        }
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    /// Parses `cyclic:12`, `dihedral:6`, `affine:5`, `heisenberg:3`, or a
    /// product such as `cyclic:2*dihedral:3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::GroupDescriptor(s.to_string());
        let parts: Vec<&str> = s.split('*').map(str::trim).collect();
        if parts.len() > 1 {
            let factors = parts.iter().map(|p| p.parse::<FamilyTag>()).collect::<Result<Vec<_>>>().map_err(|_| bad())?;
            return Ok(FamilyTag::Product(factors));
        }
        let (name, param) = s.trim().split_once(':').ok_or_else(bad)?;
        let n: usize = param.trim().parse().map_err(|_| bad())?;
        match name.trim().to_ascii_lowercase().as_str() {
            "cyclic" | "z" => Ok(FamilyTag::Cyclic(n)),
            "dihedral" | "d" => Ok(FamilyTag::Dihedral(n)),
            "affine" => Ok(FamilyTag::Affine(n)),
            "heisenberg" => Ok(FamilyTag::Heisenberg(n)),
            _ => Err(bad()),
        }
    }
}

impl FamilyTag {
    /// Group order, validating parameters.
    pub fn order(&self) -> Result<usize> {
        match *self {
            FamilyTag::Cyclic(n) => {
                ensure!(n >= 1, "cyclic group needs n >= 1");
                Ok(n)
            }
            FamilyTag::Dihedral(n) => {
                ensure!(n >= 1, "dihedral group needs n >= 1");
                Ok(2 * n)
            }
            FamilyTag::Affine(p) => {
                check_prime(p)?;
                Ok(p * (p - 1))
            }
            FamilyTag::Heisenberg(p) => {
                check_prime(p)?;
                Ok(p * p * p)
            }
            FamilyTag::Product(ref fs) => {
                ensure!(!fs.is_empty(), "empty product");
                fs.iter().try_fold(1usize, |acc, f| Ok(acc * f.order()?))
            }
        }
    }

    fn op(&self, a: usize, b: usize) -> usize {
        match *self {
            FamilyTag::Cyclic(n) => (a + b) % n,
            FamilyTag::Dihedral(n) => {
                let (ra, sa, rb, sb) = (a % n, a / n, b % n, b / n);
                let r = if sa == 0 { (ra + rb) % n } else { (ra + n - rb) % n };
                r + n * ((sa + sb) % 2)
            }
            FamilyTag::Affine(p) => {
                let (aa, ab) = (a / p + 1, a % p);
                let (ba, bb) = (b / p + 1, b % p);
                // (a, b)(c, d) = (ac, ad + b)
                let m = aa * ba % p;
                let t = (aa * bb + ab) % p;
                (m - 1) * p + t
            }
            FamilyTag::Heisenberg(p) => {
                let (x, y, z) = (a % p, a / p % p, a / (p * p));
                let (u, v, w) = (b % p, b / p % p, b / (p * p));
                let nx = (x + u) % p;
                let ny = (y + v) % p;
                let nz = (z + w + x * v) % p;
                nx + p * ny + p * p * nz
            }
            FamilyTag::Product(ref fs) => {
                let orders: Vec<usize> = fs.iter().map(|f| f.order().expect("validated")).collect();
                let (da, db) = (mixed_radix(a, &orders), mixed_radix(b, &orders));
                let digits: Vec<usize> = fs.iter().zip(da.iter().zip(&db)).map(|(f, (&x, &y))| f.op(x, y)).collect();
                from_mixed_radix(&digits, &orders)
            }
        }
    }

    fn element_label(&self, g: usize) -> String {
        match *self {
            FamilyTag::Cyclic(_) => g.to_string(),
            FamilyTag::Dihedral(n) => format!("r{}s{}", g % n, g / n),
            FamilyTag::Affine(p) => format!("({},{})", g / p + 1, g % p),
            FamilyTag::Heisenberg(p) => format!("({},{},{})", g % p, g / p % p, g / (p * p)),
            FamilyTag::Product(ref fs) => {
                let orders: Vec<usize> = fs.iter().map(|f| f.order().expect("validated")).collect();
                let parts: Vec<String> = fs.iter().zip(mixed_radix(g, &orders)).map(|(f, d)| f.element_label(d)).collect();
                format!("[{}]", parts.join(","))
            }
        }
    }
}

/// Digits of `x` in the mixed radix `orders`, most significant first.
pub(crate) fn mixed_radix(mut x: usize, orders: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; orders.len()];
    for (d, &o) in digits.iter_mut().zip(orders).rev() {
        *d = x % o;
        x /= o;
    }
    digits
}

pub(crate) fn from_mixed_radix(digits: &[usize], orders: &[usize]) -> usize {
    digits.iter().zip(orders).fold(0, |acc, (&d, &o)| acc * o + d)
}

pub(crate) fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn check_prime(p: usize) -> Result<()> {
    ensure!(is_prime(p), "{p} is not prime");
    ensure!(p <= MAX_PRIME, "prime {p} exceeds the supported maximum {MAX_PRIME}");
    Ok(())
}

/// Finite group given by its full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<usize>,
    identity: usize,
    inv: Vec<usize>,
    family: FamilyTag,
}

impl FiniteGroup {
    /// Validates a multiplication table (`mul[a * order + b] = a b`) against
    /// the group axioms. Associativity is checked exhaustively up to
    /// [`FULL_AXIOM_CHECK_ORDER`] and on 100000 seeded random triples above.
    pub fn from_table(order: usize, mul: Vec<usize>, family: FamilyTag) -> Result<Self> {
        ensure!(order >= 1, "group order must be positive");
        ensure!(mul.len() == order * order, "table must have order^2 entries");
        ensure!(mul.iter().all(|&x| x < order), "table entry out of range");
        let at = |a: usize, b: usize| mul[a * order + b];
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| Error::Contract("table has no identity".into()))?;
        let mut inv = vec![0; order];
        for a in 0..order {
            let b = (0..order)
                .find(|&b| at(a, b) == identity)
                .ok_or_else(|| Error::Contract(format!("element {a} has no inverse")))?;
            ensure!(at(b, a) == identity, "left and right inverses of {a} differ");
            inv[a] = b;
        }
        let assoc = |a: usize, b: usize, c: usize| at(at(a, b), c) == at(a, at(b, c));
        if order <= FULL_AXIOM_CHECK_ORDER {
            for a in 0..order {
                for b in 0..order {
                    for c in 0..order {
                        ensure!(assoc(a, b, c), "associativity fails on ({a}, {b}, {c})");
                    }
                }
            }
        } else {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
            for _ in 0..100_000 {
                let (a, b, c) = (rng.random_range(0..order), rng.random_range(0..order), rng.random_range(0..order));
                ensure!(assoc(a, b, c), "associativity fails on ({a}, {b}, {c})");
            }
        }
        Ok(Self { order, mul, identity, inv, family })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn family(&self) -> &FamilyTag {
        &self.family
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn element_label(&self, g: usize) -> String {
        self.family.element_label(g)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Order of element `g`.
    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        let mut elems = vec![self.identity];
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        elems
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup::from_sorted(self.order, vec![self.identity])
    }

    pub fn full_subgroup(&self) -> Subgroup {
        Subgroup::from_sorted(self.order, (0..self.order).collect())
    }
}

/// `make_group(tag)` builds and validates the multiplication table.
pub fn make_group(tag: &FamilyTag) -> Result<FiniteGroup> {
    let order = tag.order()?;
    let mut mul = Vec::with_capacity(order * order);
    for a in 0..order {
        for b in 0..order {
            mul.push(tag.op(a, b));
        }
    }
    FiniteGroup::from_table(order, mul, tag.clone())
}

/// Subgroup as a sorted element list with a membership mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    elements: Vec<usize>,
    member: Vec<bool>,
}

impl Subgroup {
    fn from_sorted(order: usize, elements: Vec<usize>) -> Self {
        let mut member = vec![false; order];
        for &e in &elements {
            member[e] = true;
        }
        Self { elements, member }
    }

    /// Checks identity, closure under products and inverses, and Lagrange.
    pub fn new(group: &FiniteGroup, mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        ensure!(elements.iter().all(|&e| e < group.order()), "element index out of range");
        let h = Self::from_sorted(group.order(), elements);
        ensure!(h.contains(group.identity()), "subgroup lacks the identity");
        for &a in &h.elements {
            ensure!(h.contains(group.inv(a)), "subgroup not closed under inverse");
            for &b in &h.elements {
                ensure!(h.contains(group.mul(a, b)), "subgroup not closed under multiplication");
            }
        }
        ensure!(group.order().is_multiple_of(h.order()), "subgroup order does not divide group order");
        Ok(h)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        self.member.get(g).copied().unwrap_or(false)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let elements = self.elements.iter().copied().filter(|&g| other.contains(g)).collect();
        Self::from_sorted(self.member.len(), elements)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.elements.iter().all(|&g| other.contains(g))
    }

    /// `g H g^-1`.
    pub fn conjugate(&self, group: &FiniteGroup, g: usize) -> Self {
        let gi = group.inv(g);
        let mut elements: Vec<usize> = self.elements.iter().map(|&h| group.mul(group.mul(g, h), gi)).collect();
        elements.sort_unstable();
        Self::from_sorted(group.order(), elements)
    }

    pub fn is_normal(&self, group: &FiniteGroup) -> bool {
        (0..group.order()).all(|g| self.elements.iter().all(|&h| self.contains(group.mul(group.mul(g, h), group.inv(g)))))
    }

    /// Left cosets `g H`, each sorted, listed in order of their least element.
    pub fn left_cosets(&self, group: &FiniteGroup) -> Vec<Vec<usize>> {
        let mut seen = vec![false; group.order()];
        let mut cosets = Vec::with_capacity(group.order() / self.order());
        for g in 0..group.order() {
            if seen[g] {
                continue;
            }
            let mut c: Vec<usize> = self.elements.iter().map(|&h| group.mul(g, h)).collect();
            c.sort_unstable();
            for &x in &c {
                seen[x] = true;
            }
            cosets.push(c);
        }
        cosets
    }

    pub fn label(&self, group: &FiniteGroup) -> String {
        let parts: Vec<String> = self.elements.iter().map(|&g| group.element_label(g)).collect();
        format!("{{{}}}", parts.join(" "))
    }
}

/// All subgroups, sorted by order then element list.
///
/// Grows the lattice from the trivial subgroup: every subgroup `K != {e}`
/// equals `<H, g>` for some proper subgroup `H < K` and `g in K \ H`, so
/// closing each discovered subgroup with each outside element reaches them all.
pub fn enumerate_subgroups(group: &FiniteGroup) -> Vec<Subgroup> {
    let order = group.order();
    let trivial = vec![group.identity()];
    let mut seen: HashSet<Vec<usize>> = HashSet::from([trivial.clone()]);
    // (elements, generators)
    let mut work: Vec<(Vec<usize>, Vec<usize>)> = vec![(trivial, Vec::new())];
    let mut found = Vec::new();
    while let Some((elems, gens)) = work.pop() {
        let h = Subgroup::from_sorted(order, elems.clone());
        for g in 0..order {
            if h.contains(g) {
                continue;
            }
            let mut next_gens = gens.clone();
            next_gens.push(g);
            let k = group.closure(&next_gens);
            if seen.insert(k.clone()) {
                work.push((k, next_gens));
            }
        }
        found.push(h);
    }
    found.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    found
}

/// Largest normal subgroup contained in `h`: the intersection of its conjugates.
pub fn normal_core(group: &FiniteGroup, h: &Subgroup) -> Subgroup {
    (0..group.order()).fold(h.clone(), |core, g| core.intersection(&h.conjugate(group, g)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FiniteGroup {
        make_group(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn descriptor_round_trip() {
        for s in ["cyclic:12", "dihedral:6", "affine:5", "heisenberg:3", "cyclic:2*dihedral:3"] {
            assert_eq!(s.parse::<FamilyTag>().unwrap().to_string(), s);
        }
        for s in ["cyclic", "cyclic:x", "klein:4", "", "cyclic:2*"] {
            assert!(matches!(s.parse::<FamilyTag>(), Err(Error::GroupDescriptor(_))), "{s}");
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(make_group(&FamilyTag::Affine(4)).is_err());
        assert!(make_group(&FamilyTag::Heisenberg(17)).is_err());
        assert!(make_group(&FamilyTag::Cyclic(0)).is_err());
    }

    #[test]
    fn orders_and_commutativity() {
        assert_eq!(g("cyclic:1").order(), 1);
        let d4 = g("dihedral:4");
        assert_eq!(d4.order(), 8);
        assert!(!d4.is_abelian());
        assert_eq!(g("affine:5").order(), 20);
        assert_eq!(g("heisenberg:3").order(), 27);
        assert!(g("cyclic:3*cyclic:4").is_abelian());
        assert_eq!(g("dihedral:2").order(), 4);
        assert!(g("dihedral:2").is_abelian());
    }

    #[test]
    fn dihedral_relations() {
        let n = 5;
        let d = g("dihedral:5");
        let (r, s) = (1, n);
        assert_eq!(d.element_order(r), n);
        assert_eq!(d.element_order(s), 2);
        // s r s = r^-1
        assert_eq!(d.mul(d.mul(s, r), s), d.inv(r));
    }

    #[test]
    fn subgroup_validation() {
        let z4 = g("cyclic:4");
        assert!(Subgroup::new(&z4, vec![0, 2]).is_ok());
        assert!(Subgroup::new(&z4, vec![0, 1]).is_err());
        assert!(Subgroup::new(&z4, vec![2]).is_err());
    }

    #[test]
    fn subgroup_counts() {
        assert_eq!(enumerate_subgroups(&g("cyclic:7")).len(), 2);
        assert_eq!(enumerate_subgroups(&g("cyclic:1")).len(), 1);
        let z12: Vec<usize> = enumerate_subgroups(&g("cyclic:12")).iter().map(Subgroup::order).collect();
        assert_eq!(z12, vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(enumerate_subgroups(&g("dihedral:4")).len(), 10);
    }

    #[test]
    fn normal_cores() {
        let d4 = g("dihedral:4");
        let refl = Subgroup::new(&d4, vec![0, 4]).unwrap();
        assert_eq!(normal_core(&d4, &refl), d4.trivial_subgroup());
        let rot = Subgroup::new(&d4, vec![0, 1, 2, 3]).unwrap();
        assert!(rot.is_normal(&d4));
        assert_eq!(normal_core(&d4, &rot), rot);
        assert_eq!(normal_core(&d4, &d4.full_subgroup()), d4.full_subgroup());
    }

    #[test]
    fn cosets_partition() {
        let d3 = g("dihedral:3");
        let h = Subgroup::new(&d3, vec![0, 3]).unwrap();
        let cosets = h.left_cosets(&d3);
        assert_eq!(cosets.len(), 3);
        let mut all: Vec<usize> = cosets.concat();
        all.sort_unstable();
        assert_eq!(all, (0..6).collect::<Vec<_>>());
    }
}
