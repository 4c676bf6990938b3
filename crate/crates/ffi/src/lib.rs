//! C ABI over `randpovm`.
//!
//! Every function returns an [`RpStatus`]. On failure the message is kept per
//! thread and can be read with [`rp_last_error`]. Objects are opaque handles
//! created by `rp_*_new`-style functions and released with the matching
//! `rp_*_free`. Matrices are passed as separate row-major real and imaginary
//! arrays.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use randpovm::group::{make_group, FamilyTag};
use randpovm::hsp::HspContext;
use randpovm::identify::copies_for;
use randpovm::matrix::{self, ComplexMatrix, DensityMatrix, OutcomeDistribution, C64};
use randpovm::measure::measure_povm;
use randpovm::random::{build_random_povm_ancilla, sample_haar_basis, Povm, RngStream};
use randpovm::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dependent = 3,
    DegeneratePair = 4,
    Normalisation = 5,
    BadDescriptor = 6,
    BufferTooSmall = 7,
    Panic = 99,
}

/// Density matrix handle.
pub struct RpDensity(DensityMatrix);

/// POVM handle.
pub struct RpPovm(Povm);

/// Finite group with its subgroups, irreps and coset states.
pub struct RpGroup(HspContext);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn fail(status: RpStatus, msg: impl Into<String>) -> RpStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> RpStatus {
    let status = match e {
        Error::Contract(_) => RpStatus::InvalidArgument,
        Error::Dependent { .. } => RpStatus::Dependent,
        Error::DegeneratePair(_) => RpStatus::DegeneratePair,
        Error::Normalisation(_) => RpStatus::Normalisation,
        Error::GroupDescriptor(_) => RpStatus::BadDescriptor,
    };
    fail(status, e.to_string())
}

type FfiResult = Result<(), RpStatus>;

fn guard(f: impl FnOnce() -> FfiResult) -> RpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            RpStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(RpStatus::Panic, format!("panic: {msg}"))
        }
    }
}

trait Lift<T> {
    fn lift(self) -> Result<T, RpStatus>;
}

impl<T> Lift<T> for randpovm::Result<T> {
    fn lift(self) -> Result<T, RpStatus> {
        self.map_err(from_error)
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, RpStatus> {
    p.as_ref().ok_or_else(|| fail(RpStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, RpStatus> {
    p.as_mut().ok_or_else(|| fail(RpStatus::NullPointer, format!("{name} is null")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], RpStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(RpStatus::NullPointer, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn complex(re: *const f64, im: *const f64, len: usize) -> Result<Vec<C64>, RpStatus> {
    let re = slice(re, len, "re")?;
    // A null imaginary part means a real input.
    let im = if im.is_null() { None } else { Some(slice(im, len, "im")?) };
    Ok((0..len).map(|i| C64::new(re[i], im.map_or(0.0, |m| m[i]))).collect())
}

unsafe fn square(dim: usize, re: *const f64, im: *const f64) -> Result<ComplexMatrix, RpStatus> {
    let len = dim.checked_mul(dim).ok_or_else(|| fail(RpStatus::InvalidArgument, "dimension overflow"))?;
    ComplexMatrix::new(dim, dim, complex(re, im, len)?).lift()
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rp_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Density matrix from a `dim x dim` row-major matrix. `im` may be null.
///
/// # Safety
/// `re` (and `im` if non-null) must hold `dim * dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_density_new(dim: usize, re: *const f64, im: *const f64, out: *mut *mut RpDensity) -> RpStatus {
    guard(|| {
        let o = out_ref(out, "out")?;
        let rho = DensityMatrix::new(square(dim, re, im)?).lift()?;
        *o = boxed(RpDensity(rho));
        Ok(())
    })
}

/// Pure state `|psi><psi|` from a unit vector of length `dim`.
///
/// # Safety
/// `re` (and `im` if non-null) must hold `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_density_from_pure(dim: usize, re: *const f64, im: *const f64, out: *mut *mut RpDensity) -> RpStatus {
    guard(|| {
        let o = out_ref(out, "out")?;
        let rho = DensityMatrix::from_pure(&complex(re, im, dim)?).lift()?;
        *o = boxed(RpDensity(rho));
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn rp_density_free(d: *mut RpDensity) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live handle; `dim` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_density_dim(d: *const RpDensity, dim: *mut usize) -> RpStatus {
    guard(|| {
        *out_ref(dim, "dim")? = deref(d, "density")?.0.dim();
        Ok(())
    })
}

/// Trace norm and Frobenius norm of `a - b`.
///
/// # Safety
/// `a`, `b` must be live handles; `trace`, `frobenius` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_density_distances(
    a: *const RpDensity,
    b: *const RpDensity,
    trace: *mut f64,
    frobenius: *mut f64,
) -> RpStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        let (t, f) = (out_ref(trace, "trace")?, out_ref(frobenius, "frobenius")?);
        if a.0.dim() != b.0.dim() {
            return Err(fail(RpStatus::InvalidArgument, "states have different dimensions"));
        }
        let diff = a.0.matrix() - b.0.matrix();
        *t = matrix::trace_norm(&diff).lift()?;
        *f = matrix::frobenius_norm(&diff);
        Ok(())
    })
}

/// Random POVM from `n * k` Gaussian vectors, on stream `(seed, stream)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_povm_random(n: usize, k: usize, seed: u64, stream: u64, out: *mut *mut RpPovm) -> RpStatus {
    guard(|| {
        let o = out_ref(out, "out")?;
        let povm = build_random_povm_ancilla(n, k, &mut RngStream::new(seed, stream).generator()).lift()?;
        *o = boxed(RpPovm(povm));
        Ok(())
    })
}

/// Projective measurement in a Haar-random basis, on stream `(seed, stream)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_povm_haar_basis(n: usize, seed: u64, stream: u64, out: *mut *mut RpPovm) -> RpStatus {
    guard(|| {
        let o = out_ref(out, "out")?;
        let basis = sample_haar_basis(n, &mut RngStream::new(seed, stream).generator()).lift()?;
        *o = boxed(RpPovm(Povm::from_basis(&basis)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn rp_povm_free(p: *mut RpPovm) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of outcomes and Hilbert space dimension.
///
/// # Safety
/// `p` must be a live handle; `outcomes`, `dim` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_povm_shape(p: *const RpPovm, outcomes: *mut usize, dim: *mut usize) -> RpStatus {
    guard(|| {
        let p = deref(p, "povm")?;
        *out_ref(outcomes, "outcomes")? = p.0.len();
        *out_ref(dim, "dim")? = p.0.dim();
        Ok(())
    })
}

/// Outcome probabilities of measuring `d` with `p`, written to `probs`.
///
/// # Safety
/// Handles must be live; `probs` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rp_measure(p: *const RpPovm, d: *const RpDensity, probs: *mut f64, len: usize) -> RpStatus {
    guard(|| {
        let (p, d) = (deref(p, "povm")?, deref(d, "density")?);
        if probs.is_null() {
            return Err(fail(RpStatus::NullPointer, "probs is null"));
        }
        if len < p.0.len() {
            return Err(fail(RpStatus::BufferTooSmall, format!("need {} slots, got {len}", p.0.len())));
        }
        let dist = measure_povm(&d.0, &p.0).lift()?;
        std::slice::from_raw_parts_mut(probs, len)[..dist.len()].copy_from_slice(dist.probs());
        Ok(())
    })
}

/// `sum |p_i - q_i|`, in `[0, 2]`.
///
/// # Safety
/// `p`, `q` must hold `len` doubles; `tv` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_total_variation(p: *const f64, q: *const f64, len: usize, tv: *mut f64) -> RpStatus {
    guard(|| {
        let o = out_ref(tv, "tv")?;
        let p = OutcomeDistribution::from_probs(slice(p, len, "p")?.to_vec()).lift()?;
        let q = OutcomeDistribution::from_probs(slice(q, len, "q")?.to_vec()).lift()?;
        *o = matrix::total_variation(&p, &q).lift()?;
        Ok(())
    })
}

/// Group from a descriptor such as `"dihedral:4"` or `"cyclic:2*affine:3"`.
///
/// # Safety
/// `descriptor` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_group_new(descriptor: *const c_char, out: *mut *mut RpGroup) -> RpStatus {
    guard(|| {
        let o = out_ref(out, "out")?;
        if descriptor.is_null() {
            return Err(fail(RpStatus::NullPointer, "descriptor is null"));
        }
        let s = CStr::from_ptr(descriptor)
            .to_str()
            .map_err(|_| fail(RpStatus::BadDescriptor, "descriptor is not UTF-8"))?;
        let tag: FamilyTag = s.parse().lift()?;
        let ctx = HspContext::new(make_group(&tag).lift()?).lift()?;
        *o = boxed(RpGroup(ctx));
        Ok(())
    })
}

/// # Safety
/// `g` must be null or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn rp_group_free(g: *mut RpGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Group order and number of subgroups.
///
/// # Safety
/// `g` must be a live handle; `order`, `subgroups` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_group_shape(g: *const RpGroup, order: *mut usize, subgroups: *mut usize) -> RpStatus {
    guard(|| {
        let g = deref(g, "group")?;
        *out_ref(order, "order")? = g.0.group().order();
        *out_ref(subgroups, "subgroups")? = g.0.subgroups().len();
        Ok(())
    })
}

fn subgroup_pair(g: &RpGroup, i: usize, j: usize) -> FfiResult {
    let n = g.0.subgroups().len();
    if i >= n || j >= n {
        return Err(fail(RpStatus::InvalidArgument, format!("subgroup index out of range (have {n})")));
    }
    Ok(())
}

/// Order of subgroup `i` (subgroups are sorted by order, then elements).
///
/// # Safety
/// `g` must be a live handle; `order` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_subgroup_order(g: *const RpGroup, i: usize, order: *mut usize) -> RpStatus {
    guard(|| {
        let g = deref(g, "group")?;
        subgroup_pair(g, i, i)?;
        *out_ref(order, "order")? = g.0.subgroups()[i].order();
        Ok(())
    })
}

/// Trace norm of the difference of two coset states.
///
/// # Safety
/// `g` must be a live handle; `dist` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_coset_trace_distance(g: *const RpGroup, i: usize, j: usize, dist: *mut f64) -> RpStatus {
    guard(|| {
        let g = deref(g, "group")?;
        let o = out_ref(dist, "dist")?;
        subgroup_pair(g, i, j)?;
        let s = g.0.states();
        *o = matrix::trace_norm(&(s[i].density().matrix() - s[j].density().matrix())).lift()?;
        Ok(())
    })
}

/// Irrep-distribution distances `w` and `r` between subgroups `i` and `j`.
///
/// # Safety
/// `g` must be a live handle; `w`, `r` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_subgroup_distances(g: *const RpGroup, i: usize, j: usize, w: *mut f64, r: *mut f64) -> RpStatus {
    guard(|| {
        let g = deref(g, "group")?;
        let (w, r) = (out_ref(w, "w")?, out_ref(r, "r")?);
        subgroup_pair(g, i, j)?;
        let (a, b) = (&g.0.subgroups()[i], &g.0.subgroups()[j]);
        *w = g.0.reps().w_distance(a, b).lift()?;
        *r = g.0.reps().r_distance(a, b).lift()?;
        Ok(())
    })
}

/// Fraction of `runs` identification runs that recover subgroup `hidden`
/// from `copies` samples, with ancilla constant `c`. Same streams as the CLI
/// `hsp` command with the same seed.
///
/// # Safety
/// `g` must be a live handle; `rate` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_hsp_success_rate(
    g: *const RpGroup,
    hidden: usize,
    copies: usize,
    runs: usize,
    c: f64,
    seed: u64,
    rate: *mut f64,
) -> RpStatus {
    guard(|| {
        let g = deref(g, "group")?;
        let o = out_ref(rate, "rate")?;
        if runs == 0 {
            return Err(fail(RpStatus::InvalidArgument, "need at least one run"));
        }
        let hits = g.0.hidden_successes(hidden, copies, runs, c, RngStream::new(seed, 0)).lift()?;
        *o = hits as f64 / runs as f64;
        Ok(())
    })
}

/// Copy count `ceil(c ln m / delta^2)` for identifying among `m` states.
///
/// # Safety
/// `copies` must be valid.
#[no_mangle]
pub unsafe extern "C" fn rp_copies_for(m: usize, delta: f64, c: f64, copies: *mut usize) -> RpStatus {
    guard(|| {
        *out_ref(copies, "copies")? = copies_for(m, delta, c).lift()?;
        Ok(())
    })
}
