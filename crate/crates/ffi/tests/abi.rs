use std::ffi::CString;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use randpovm_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0u8; 512];
    let n = unsafe { rp_last_error(buf.as_mut_ptr().cast(), buf.len()) };
    buf.truncate(n.min(511));
    String::from_utf8(buf).unwrap()
}

fn pure(v: &[f64]) -> *mut RpDensity {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { rp_density_from_pure(v.len(), v.as_ptr(), ptr::null(), &mut d) }, RpStatus::Ok);
    d
}

fn group(desc: &str) -> *mut RpGroup {
    let s = CString::new(desc).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { rp_group_new(s.as_ptr(), &mut g) }, RpStatus::Ok, "{}", last_error());
    g
}

#[test]
fn orthogonal_pure_states_have_trace_distance_two() {
    let (a, b) = (pure(&[1.0, 0.0, 0.0]), pure(&[0.0, 0.0, 1.0]));
    let (mut t, mut f) = (0.0, 0.0);
    unsafe {
        assert_eq!(rp_density_distances(a, b, &mut t, &mut f), RpStatus::Ok);
        rp_density_free(a);
        rp_density_free(b);
    }
    assert!((t - 2.0).abs() < 1e-12);
    assert!((f - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn density_rejects_non_psd_input() {
    let re = [1.5, 0.0, 0.0, -0.5];
    let mut d = ptr::null_mut();
    let s = unsafe { rp_density_new(2, re.as_ptr(), ptr::null(), &mut d) };
    assert_eq!(s, RpStatus::InvalidArgument);
    assert!(d.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn null_pointers_are_reported_not_dereferenced() {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { rp_density_new(2, ptr::null(), ptr::null(), &mut d) }, RpStatus::NullPointer);
    assert_eq!(unsafe { rp_density_dim(ptr::null(), ptr::null_mut()) }, RpStatus::NullPointer);
    assert_eq!(unsafe { rp_group_new(ptr::null(), ptr::null_mut()) }, RpStatus::NullPointer);
    unsafe {
        rp_density_free(ptr::null_mut());
        rp_povm_free(ptr::null_mut());
        rp_group_free(ptr::null_mut());
    }
}

fn measure_fresh(rho: *const RpDensity, seed: u64) -> [f64; 9] {
    let mut probs = [0.0; 9];
    let mut povm = ptr::null_mut();
    unsafe {
        assert_eq!(rp_povm_random(2, 4, seed, 3, &mut povm), RpStatus::Ok);
        let (mut m, mut n) = (0, 0);
        assert_eq!(rp_povm_shape(povm, &mut m, &mut n), RpStatus::Ok);
        assert_eq!((m, n), (9, 2));
        assert_eq!(rp_measure(povm, rho, probs.as_mut_ptr(), 8), RpStatus::BufferTooSmall);
        assert_eq!(rp_measure(povm, rho, probs.as_mut_ptr(), 9), RpStatus::Ok);
        rp_povm_free(povm);
    }
    probs
}

#[test]
fn measurement_probabilities_sum_to_one_and_are_seeded() {
    let rho = pure(&[0.6, 0.8]);
    let (a, b, c) = (measure_fresh(rho, 11), measure_fresh(rho, 11), measure_fresh(rho, 12));
    unsafe { rp_density_free(rho) };
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(a.iter().all(|&p| p >= -1e-12));
}

#[test]
fn haar_basis_gives_n_outcomes() {
    let mut povm = ptr::null_mut();
    let (mut m, mut n) = (0, 0);
    unsafe {
        assert_eq!(rp_povm_haar_basis(5, 1, 0, &mut povm), RpStatus::Ok);
        assert_eq!(rp_povm_shape(povm, &mut m, &mut n), RpStatus::Ok);
        rp_povm_free(povm);
    }
    assert_eq!((m, n), (5, 5));
}

#[test]
fn total_variation_is_unhalved_l1() {
    let p = [0.5, 0.5, 0.0];
    let q = [0.0, 0.5, 0.5];
    let mut tv = 0.0;
    assert_eq!(unsafe { rp_total_variation(p.as_ptr(), q.as_ptr(), 3, &mut tv) }, RpStatus::Ok);
    assert!((tv - 1.0).abs() < 1e-15);
}

#[test]
fn dihedral_group_has_ten_subgroups() {
    let g = group("dihedral:4");
    let (mut order, mut subs) = (0, 0);
    unsafe {
        assert_eq!(rp_group_shape(g, &mut order, &mut subs), RpStatus::Ok);
        let mut o = 0;
        assert_eq!(rp_subgroup_order(g, subs - 1, &mut o), RpStatus::Ok);
        assert_eq!(o, 8);
        assert_eq!(rp_subgroup_order(g, subs, &mut o), RpStatus::InvalidArgument);
        rp_group_free(g);
    }
    assert_eq!((order, subs), (8, 10));
}

#[test]
fn coset_states_of_distinct_subgroups_are_far_apart() {
    let g = group("cyclic:6");
    let mut subs = 0;
    let mut order = 0;
    unsafe {
        rp_group_shape(g, &mut order, &mut subs);
        for i in 0..subs {
            for j in 0..subs {
                let mut d = 0.0;
                assert_eq!(rp_coset_trace_distance(g, i, j, &mut d), RpStatus::Ok);
                if i == j {
                    assert!(d < 1e-10);
                } else {
                    assert!(d >= 1.0 - 1e-8, "{i} {j} {d}");
                }
            }
        }
        let (mut w, mut r) = (0.0, 0.0);
        assert_eq!(rp_subgroup_distances(g, 0, subs - 1, &mut w, &mut r), RpStatus::Ok);
        assert!(w > 0.0 && r > 0.0);
        rp_group_free(g);
    }
}

#[test]
fn hsp_rate_matches_library_for_same_seed() {
    let g = group("cyclic:4");
    let mut rate = 0.0;
    unsafe {
        assert_eq!(rp_hsp_success_rate(g, 1, 20, 30, 1.0, 5, &mut rate), RpStatus::Ok);
        assert_eq!(rp_hsp_success_rate(g, 1, 20, 0, 1.0, 5, &mut rate), RpStatus::InvalidArgument);
        assert_eq!(rp_hsp_success_rate(g, 1, 20, 30, 1.0, 5, &mut rate), RpStatus::Ok);
        rp_group_free(g);
    }
    let tag = "cyclic:4".parse().unwrap();
    let ctx = randpovm::hsp::HspContext::new(randpovm::group::make_group(&tag).unwrap()).unwrap();
    let report = ctx.success_experiment(20, 30, 1.0, randpovm::random::RngStream::new(5, 0)).unwrap();
    assert_eq!(rate, report.per_subgroup[1].rate);
}

#[test]
fn copies_for_rounds_up() {
    let mut t = 0;
    assert_eq!(unsafe { rp_copies_for(10, 0.5, 16.0, &mut t) }, RpStatus::Ok);
    assert_eq!(t, (16.0 * 10f64.ln() / 0.25).ceil() as usize);
    assert_eq!(unsafe { rp_copies_for(10, 0.0, 16.0, &mut t) }, RpStatus::InvalidArgument);
}

/// Compiles the C smoke program against the generated header and the static
/// library, when a C compiler is available.
#[test]
fn c_smoke_program() {
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("cc not found; skipping");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("librandpovm_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok"));
}
