use num_complex::Complex64 as C64;
use proptest::prelude::*;

use randpovm::group::*;
use randpovm::identify::{pairwise_ml, tournament_identify, ObservationRecord};
use randpovm::matrix::*;
use randpovm::measure::measure_povm;
use randpovm::random::*;

fn density(n: usize, rank: usize, seed: u64) -> DensityMatrix {
    let mut g = RngStream::new(seed, 0).generator();
    let b = sample_haar_basis(n, &mut g).unwrap();
    DensityMatrix::completely_mixed_on(&b.vectors()[..rank]).unwrap()
}

fn probs(v: &[f64]) -> OutcomeDistribution {
    let s: f64 = v.iter().sum();
    OutcomeDistribution::from_probs(v.iter().map(|x| x / s).collect()).unwrap()
}

fn small_group() -> impl Strategy<Value = String> {
    prop_oneof![
        (1usize..=12).prop_map(|n| format!("cyclic:{n}")),
        (1usize..=8).prop_map(|n| format!("dihedral:{n}")),
        prop::sample::select(vec![2usize, 3, 5]).prop_map(|p| format!("affine:{p}")),
        prop::sample::select(vec![2usize, 3]).prop_map(|p| format!("heisenberg:{p}")),
        ((2usize..=4), (1usize..=3)).prop_map(|(a, b)| format!("cyclic:{a}*dihedral:{b}")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn povms_are_complete_and_psd(n in 1usize..8, k in 1usize..5, seed: u64) {
        let mut g = RngStream::new(seed, 1).generator();
        let povm = build_random_povm_ancilla(n, k, &mut g).unwrap();
        prop_assert_eq!(povm.len(), n * k + 1);
        let mut sum = ComplexMatrix::zeros(n, n);
        for e in povm.elements() {
            prop_assert!(max_eigenvalue(&e.scale_real(-1.0)).unwrap() <= 1e-9);
            sum = &sum + e;
        }
        prop_assert!(sum.max_abs_diff(&ComplexMatrix::identity(n)) <= 1e-8);
    }

    #[test]
    fn measured_distributions_are_normalised(n in 1usize..8, r in 1usize..8, seed: u64) {
        let r = r.min(n);
        let rho = density(n, r, seed);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-10);
        prop_assert!(rho.matrix().hermitian_defect() <= 1e-10);
        let povm = build_random_povm_plain(n, &mut RngStream::new(seed, 2).generator()).unwrap();
        let p = measure_povm(&rho, &povm).unwrap();
        prop_assert!(p.probs().iter().all(|&x| x >= 0.0));
        prop_assert!((p.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn haar_bases_are_orthonormal(n in 1usize..12, seed: u64) {
        let b = sample_haar_basis(n, &mut RngStream::new(seed, 3).generator()).unwrap();
        for (i, u) in b.vectors().iter().enumerate() {
            prop_assert!((norm(u) - 1.0).abs() <= 1e-10);
            for v in &b.vectors()[..i] {
                prop_assert!(inner(u, v).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn trace_norm_and_frobenius_respect_rank(n in 2usize..8, seed: u64) {
        let (a, b) = (density(n, 1, seed), density(n, n.min(3), seed ^ 1));
        let d = a.matrix() - b.matrix();
        let (t, f) = (trace_norm(&d).unwrap(), frobenius_norm(&d));
        prop_assert!(t <= 2.0 + 1e-10);
        prop_assert!(f <= t + 1e-10);
        prop_assert!(t <= (n as f64).sqrt() * f + 1e-10);
        prop_assert!((trace_norm(a.matrix()).unwrap() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn total_variation_is_a_bounded_metric(
        p in prop::collection::vec(0.01f64..1.0, 5),
        q in prop::collection::vec(0.01f64..1.0, 5),
        r in prop::collection::vec(0.01f64..1.0, 5),
    ) {
        let (p, q, r) = (probs(&p), probs(&q), probs(&r));
        let pq = total_variation(&p, &q).unwrap();
        prop_assert!((0.0..=2.0).contains(&pq));
        prop_assert!((pq - total_variation(&q, &p).unwrap()).abs() <= 1e-15);
        prop_assert!(pq <= total_variation(&p, &r).unwrap() + total_variation(&r, &q).unwrap() + 1e-12);
    }

    #[test]
    fn streams_replay(seed: u64, idx: u64) {
        use rand::Rng;
        let s = RngStream::new(seed, idx);
        let a: Vec<u64> = (0..4).map({ let mut g = s.generator(); move |_| g.random() }).collect();
        let b: Vec<u64> = (0..4).map({ let mut g = s.generator(); move |_| g.random() }).collect();
        prop_assert_eq!(&a, &b);
        let c: Vec<u64> = (0..4).map({ let mut g = s.substream(1).generator(); move |_| g.random() }).collect();
        prop_assert_ne!(a, c);
    }

    #[test]
    fn groups_satisfy_axioms_and_subgroups_are_closed(d in small_group()) {
        let g = make_group(&d.parse().unwrap()).unwrap();
        let n = g.order();
        let e = g.identity();
        for a in 0..n {
            prop_assert_eq!(g.mul(a, e), a);
            prop_assert_eq!(g.mul(a, g.inv(a)), e);
        }
        for h in enumerate_subgroups(&g) {
            prop_assert_eq!(n % h.order(), 0);
            prop_assert!(h.contains(e));
            for &a in h.elements() {
                prop_assert!(h.contains(g.inv(a)));
                for &b in h.elements() {
                    prop_assert!(h.contains(g.mul(a, b)));
                }
            }
        }
    }

    #[test]
    fn irreps_are_unitary_homomorphisms(d in small_group()) {
        let r = Representations::new(make_group(&d.parse().unwrap()).unwrap()).unwrap();
        let g = r.group();
        let n = g.order();
        prop_assert_eq!(r.irreps().iter().map(|x| x.dim() * x.dim()).sum::<usize>(), n);
        for rho in r.irreps() {
            for a in 0..n {
                let m = rho.matrix(a);
                prop_assert!((m * &m.adjoint()).max_abs_diff(&ComplexMatrix::identity(rho.dim())) <= 1e-10);
                for b in 0..n {
                    prop_assert!((m * rho.matrix(b)).max_abs_diff(rho.matrix(g.mul(a, b))) <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn weak_sampling_distributions_and_distances(d in small_group()) {
        let g = make_group(&d.parse().unwrap()).unwrap();
        let r = Representations::new(g.clone()).unwrap();
        let subs = enumerate_subgroups(&g);
        for h in &subs {
            let p = r.irrep_distribution(h).unwrap();
            prop_assert!((p.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
        if g.order() >= 2 {
            for a in subs.iter().take(4) {
                for b in subs.iter().rev().take(4) {
                    let (w, rd) = (r.w_distance(a, b).unwrap(), r.r_distance(a, b).unwrap());
                    prop_assert!(rd >= w - 1e-12);
                    prop_assert!((w - r.w_distance(b, a).unwrap()).abs() <= 1e-12);
                    prop_assert_eq!(rd <= 1e-12, a == b);
                }
            }
        }
    }

    #[test]
    fn tournament_ignores_duplicate_champions(
        cands in prop::collection::vec(prop::collection::vec(0.05f64..1.0, 4), 2..6),
        outcomes in prop::collection::vec(0usize..4, 1..30),
    ) {
        let cands: Vec<_> = cands.iter().map(|c| probs(c)).collect();
        let obs = ObservationRecord::new(outcomes, index_labels(4)).unwrap();
        let champ = tournament_identify(&obs, &cands).unwrap();
        let mut more = cands.clone();
        more.push(cands[champ].clone());
        more.push(cands[champ].clone());
        prop_assert_eq!(tournament_identify(&obs, &more).unwrap(), champ);
    }

    #[test]
    fn pairwise_decision_is_relabelling_invariant(
        p in prop::collection::vec(0.05f64..1.0, 4),
        q in prop::collection::vec(0.05f64..1.0, 4),
        outcomes in prop::collection::vec(0usize..4, 1..30),
        perm in Just([0usize, 1, 2, 3]).prop_shuffle(),
    ) {
        let (pd, qd) = (probs(&p), probs(&q));
        let obs = ObservationRecord::new(outcomes.clone(), index_labels(4)).unwrap();
        let permute = |v: &[f64]| {
            let mut out = vec![0.0; 4];
            for i in 0..4 {
                out[perm[i]] = v[i];
            }
            probs(&out)
        };
        let obs_p = ObservationRecord::new(outcomes.iter().map(|&o| perm[o]).collect(), index_labels(4)).unwrap();
        prop_assert_eq!(pairwise_ml(&obs, &pd, &qd).unwrap(), pairwise_ml(&obs_p, &permute(&p), &permute(&q)).unwrap());
    }

    #[test]
    fn eigensolver_reconstructs(n in 1usize..7, seed: u64) {
        use rand::Rng;
        let mut g = RngStream::new(seed, 4).generator();
        let a = ComplexMatrix::from_fn(n, n, |_, _| C64::new(g.random::<f64>() - 0.5, g.random::<f64>() - 0.5));
        let h = &a + &a.adjoint();
        let eig = hermitian_eig(&h).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&h) <= 1e-10);
    }
}
