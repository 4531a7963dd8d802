//! C ABI for borel-core.
//!
//! Every entry point follows the same conventions:
//!
//! * scalar results go through `out` pointers, the return value is a status
//!   code (`BOREL_OK` on success);
//! * heap objects are opaque handles created by a `_new`-style constructor
//!   and released by the matching `_free`;
//! * strings returned through `char**` are NUL-terminated, UTF-8, and owned
//!   by the caller, who must release them with `borel_string_free`;
//! * on failure a human-readable message is stored per thread and can be
//!   fetched with `borel_last_error_message`.
//!
//! The status codes 1, 2 and 3 carry the same meaning as the CLI exit codes:
//! invalid input, refusal (failed certificate or equivariance check), and
//! numerical failure.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use borel_core::{
    bloch_wigner, borel_from_complete, empirical_borel_ratio, ideal_volume, is_maximal, nu3,
    parse_experiment, trivialize, CompleteFlag, Error, EstimatorParams, ProjPoint,
    TrivializeParams,
};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// The call succeeded.
pub const BOREL_OK: i32 = 0;
/// Invalid input: malformed document, degenerate or ill-conditioned data.
pub const BOREL_ERR_INVALID_INPUT: i32 = 1;
/// The computation refused to proceed (failed maximality certificate,
/// non-equivariant boundary map, unsupported cocycle kind).
pub const BOREL_ERR_REFUSED: i32 = 2;
/// Numerical failure: a tolerance could not be met.
pub const BOREL_ERR_NUMERICAL: i32 = 3;
/// A required pointer argument was NULL.
pub const BOREL_ERR_NULL_ARGUMENT: i32 = 4;
/// An internal panic was caught at the ABI boundary. This indicates a bug;
/// the stored error message contains the panic payload.
pub const BOREL_ERR_PANIC: i32 = 5;

/// Largest ambient dimension `n` accepted by the flag constructors. `B_n`
/// evaluation costs O(n^6) per tuple, so larger handles are refused rather
/// than allocated.
pub const BOREL_MAX_DIMENSION: usize = 64;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).expect("NUL bytes were stripped");
    });
}

fn clear_last_error() {
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::default();
    });
}

fn fail(err: &Error) -> i32 {
    set_last_error(&err.to_string());
    err.exit_code()
}

fn null_arg(what: &str) -> i32 {
    set_last_error(&format!("{what}: required pointer argument is NULL"));
    BOREL_ERR_NULL_ARGUMENT
}

/// Runs `f` with a panic guard. Panics become `BOREL_ERR_PANIC` instead of
/// unwinding across the ABI boundary, which would be undefined behavior.
fn guarded<F: FnOnce() -> i32>(f: F) -> i32 {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic payload".to_string());
            set_last_error(&format!("internal panic: {msg}"));
            BOREL_ERR_PANIC
        }
    }
}

fn into_owned_cstring(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .expect("NUL bytes were stripped")
        .into_raw()
}

/// Reads four boundary points from 16 doubles: for each point, the
/// homogeneous coordinates (x_re, x_im, y_re, y_im). The point at infinity
/// is (1, 0) i.e. x = 1, y = 0.
unsafe fn read_points(points: *const f64) -> Result<[ProjPoint; 4], Error> {
    let vals = slice::from_raw_parts(points, 16);
    let mut out = Vec::with_capacity(4);
    for i in 0..4 {
        let x = Complex64::new(vals[4 * i], vals[4 * i + 1]);
        let y = Complex64::new(vals[4 * i + 2], vals[4 * i + 3]);
        out.push(ProjPoint::new(x, y)?);
    }
    Ok(out.try_into().expect("exactly four points were read"))
}

/// Message of the most recent failing call on this thread, as a
/// NUL-terminated UTF-8 string. Empty if the most recent call succeeded.
/// The pointer stays valid until the next library call on the same thread;
/// do not free it.
#[no_mangle]
pub extern "C" fn borel_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be a pointer previously returned through a `char**` out
/// parameter of this library, or NULL. It must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn borel_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The volume of the regular ideal tetrahedron, `nu_3 = D(e^{i pi/3})`.
#[no_mangle]
pub extern "C" fn borel_nu3() -> f64 {
    nu3()
}

/// The sharp bound `C(n+1,3) * nu_3` on `|B_n|`. Returns 0 for n < 2.
#[no_mangle]
pub extern "C" fn borel_bound(n: usize) -> f64 {
    borel_core::borel_bound(n)
}

/// Bloch-Wigner dilogarithm `D(z)` of `z = re + i*im`, written to `out`.
///
/// # Safety
/// `out` must be NULL or a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn borel_bloch_wigner(re: f64, im: f64, out: *mut f64) -> i32 {
    guarded(|| {
        if out.is_null() {
            return null_arg("borel_bloch_wigner");
        }
        match bloch_wigner(Complex64::new(re, im)) {
            Ok(v) => {
                *out = v;
                BOREL_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// Signed volume of the ideal tetrahedron spanned by four boundary points.
///
/// `points` holds 16 doubles: for each of the four points, its homogeneous
/// coordinates (x_re, x_im, y_re, y_im). A tuple with a repeated point has
/// volume exactly 0.
///
/// # Safety
/// `points` must be NULL or point to at least 16 doubles; `out` must be
/// NULL or a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn borel_ideal_volume(points: *const f64, out: *mut f64) -> i32 {
    guarded(|| {
        if points.is_null() || out.is_null() {
            return null_arg("borel_ideal_volume");
        }
        match read_points(points) {
            Ok([p0, p1, p2, p3]) => {
                *out = ideal_volume(&p0, &p1, &p2, &p3);
                BOREL_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// An immutable 4-tuple of complete flags in `C^n`. Opaque; create with
/// `borel_flags_new` or `borel_flags_veronese` and release with
/// `borel_flags_free`.
pub struct BorelFlags {
    flags: [CompleteFlag; 4],
}

fn flags_out(flags: [CompleteFlag; 4], out: *mut *mut BorelFlags) -> i32 {
    unsafe {
        *out = Box::into_raw(Box::new(BorelFlags { flags }));
    }
    BOREL_OK
}

/// Builds a flag 4-tuple from explicit bases.
///
/// `data` holds `4*n*n*2` doubles: four n-by-n complex matrices in
/// row-major order with interleaved (re, im) entries. Column j of each
/// matrix spans the j-th flag level together with the columns before it,
/// so each matrix must be invertible (well-conditioned).
///
/// # Safety
/// `data` must be NULL or point to at least `4*n*n*2` doubles; `out` must
/// be NULL or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn borel_flags_new(
    n: usize,
    data: *const f64,
    out: *mut *mut BorelFlags,
) -> i32 {
    guarded(|| {
        if data.is_null() || out.is_null() {
            return null_arg("borel_flags_new");
        }
        if n == 0 || n > BOREL_MAX_DIMENSION {
            return fail(&Error::InvalidInput(format!(
                "flag dimension must be in 1..={BOREL_MAX_DIMENSION}, got {n}"
            )));
        }
        let vals = slice::from_raw_parts(data, 4 * n * n * 2);
        let mut built = Vec::with_capacity(4);
        for m in 0..4 {
            let basis = DMatrix::from_fn(n, n, |r, c| {
                let base = ((m * n + r) * n + c) * 2;
                Complex64::new(vals[base], vals[base + 1])
            });
            match CompleteFlag::new(basis) {
                Ok(f) => built.push(f),
                Err(e) => {
                    return fail(&Error::InvalidInput(format!("flag {m}: {e}")));
                }
            }
        }
        flags_out(built.try_into().expect("four flags were built"), out)
    })
}

/// Builds the Veronese flag 4-tuple `(V_n(p_0), ..., V_n(p_3))` of four
/// boundary points, using the same 16-double point layout as
/// `borel_ideal_volume`.
///
/// # Safety
/// `points` must be NULL or point to at least 16 doubles; `out` must be
/// NULL or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn borel_flags_veronese(
    n: usize,
    points: *const f64,
    out: *mut *mut BorelFlags,
) -> i32 {
    guarded(|| {
        if points.is_null() || out.is_null() {
            return null_arg("borel_flags_veronese");
        }
        if n == 0 || n > BOREL_MAX_DIMENSION {
            return fail(&Error::InvalidInput(format!(
                "flag dimension must be in 1..={BOREL_MAX_DIMENSION}, got {n}"
            )));
        }
        match read_points(points) {
            Ok(pts) => {
                let flags = [
                    borel_core::veronese(&pts[0], n),
                    borel_core::veronese(&pts[1], n),
                    borel_core::veronese(&pts[2], n),
                    borel_core::veronese(&pts[3], n),
                ];
                flags_out(flags, out)
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a flag handle. NULL is ignored.
///
/// # Safety
/// `flags` must be a handle from this library or NULL, and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn borel_flags_free(flags: *mut BorelFlags) {
    if !flags.is_null() {
        drop(Box::from_raw(flags));
    }
}

/// Ambient dimension `n` of a flag handle; 0 if the handle is NULL.
///
/// # Safety
/// `flags` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn borel_flags_dimension(flags: *const BorelFlags) -> usize {
    if flags.is_null() {
        return 0;
    }
    (*flags).flags[0].n()
}

/// Evaluates the Borel cocycle `B_n` on the tuple and writes it to `out`.
///
/// # Safety
/// `flags` must be a live handle from this library or NULL; `out` must be
/// NULL or a valid pointer to a double.
#[no_mangle]
pub unsafe extern "C" fn borel_flags_value(flags: *const BorelFlags, out: *mut f64) -> i32 {
    guarded(|| {
        if flags.is_null() || out.is_null() {
            return null_arg("borel_flags_value");
        }
        match borel_from_complete(&(*flags).flags) {
            Ok(v) => {
                *out = v;
                BOREL_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// Classifies the tuple: writes +1 to `out` when `B_n` is within `tol` of
/// `C(n+1,3)*nu_3`, -1 when within `tol` of the negated bound, 0 otherwise.
///
/// # Safety
/// `flags` must be a live handle from this library or NULL; `out` must be
/// NULL or a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn borel_flags_is_maximal(
    flags: *const BorelFlags,
    tol: f64,
    out: *mut i8,
) -> i32 {
    guarded(|| {
        if flags.is_null() || out.is_null() {
            return null_arg("borel_flags_is_maximal");
        }
        match is_maximal(&(*flags).flags, tol) {
            Ok(v) => {
                *out = v;
                BOREL_OK
            }
            Err(e) => fail(&e),
        }
    })
}

/// Optional overrides for the document runners. Zero-valued fields keep the
/// value from the document (or the library default); pass NULL instead of a
/// struct to keep everything.
#[repr(C)]
pub struct BorelRunParams {
    /// Sample count; 0 keeps the document's `estimator.samples` or the
    /// default. For `borel_run_trivialize` this is the per-slice count.
    pub samples: usize,
    /// Nonzero if `seed` should override the document seed.
    pub has_seed: u8,
    /// RNG seed, used when `has_seed` is nonzero.
    pub seed: u64,
    /// Worker threads; 0 keeps the default of 1.
    pub workers: usize,
    /// Tolerance; values <= 0 keep the default of 1e-6.
    pub tol: f64,
}

struct RunOverrides {
    samples: Option<usize>,
    seed: Option<u64>,
    workers: Option<usize>,
    tol: Option<f64>,
}

unsafe fn read_overrides(params: *const BorelRunParams) -> RunOverrides {
    if params.is_null() {
        return RunOverrides {
            samples: None,
            seed: None,
            workers: None,
            tol: None,
        };
    }
    let p = &*params;
    RunOverrides {
        samples: (p.samples > 0).then_some(p.samples),
        seed: (p.has_seed != 0).then_some(p.seed),
        workers: (p.workers > 0).then_some(p.workers),
        tol: (p.tol > 0.0).then_some(p.tol),
    }
}

unsafe fn parse_doc_with_boundary(
    doc_json: *const c_char,
) -> Result<(borel_core::LoadedExperiment, borel_core::BoundaryMap), Error> {
    let text = CStr::from_ptr(doc_json)
        .to_str()
        .map_err(|_| Error::InvalidInput("document JSON is not valid UTF-8".into()))?;
    let exp = parse_experiment(text)?;
    let boundary = exp.boundary.clone().ok_or_else(|| {
        Error::InvalidInput("document has no boundary_map; this entry point needs one".into())
    })?;
    Ok((exp, boundary))
}

unsafe fn run_invariant_impl(
    doc_json: *const c_char,
    params: *const BorelRunParams,
    out_json: *mut *mut c_char,
) -> Result<(), Error> {
    let (exp, boundary) = parse_doc_with_boundary(doc_json)?;
    let o = read_overrides(params);
    let mut est = EstimatorParams::default();
    est.samples = o.samples.or(exp.samples).unwrap_or(est.samples);
    est.seed = o.seed.or(exp.seed).unwrap_or(est.seed);
    est.workers = o.workers.unwrap_or(est.workers);
    est.tol = o.tol.unwrap_or(est.tol);
    let report = empirical_borel_ratio(&exp.cocycle, &boundary, &est)?;
    let json = borel_core::doc::estimator_report_json(&report, exp.vol_m);
    let text = serde_json::to_string_pretty(&json).expect("report serializes");
    *out_json = into_owned_cstring(text);
    Ok(())
}

/// Runs the empirical Borel-invariant estimator on an experiment document
/// and returns the report as a JSON string (same schema as the CLI's
/// `invariant --output`).
///
/// # Safety
/// `doc_json` must be NULL or a NUL-terminated string; `params` must be
/// NULL or a valid `BorelRunParams`; `out_json` must be NULL or a valid
/// pointer. On success `*out_json` must be released with
/// `borel_string_free`.
#[no_mangle]
pub unsafe extern "C" fn borel_run_invariant(
    doc_json: *const c_char,
    params: *const BorelRunParams,
    out_json: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if doc_json.is_null() || out_json.is_null() {
            return null_arg("borel_run_invariant");
        }
        match run_invariant_impl(doc_json, params, out_json) {
            Ok(()) => BOREL_OK,
            Err(e) => fail(&e),
        }
    })
}

unsafe fn run_trivialize_impl(
    doc_json: *const c_char,
    params: *const BorelRunParams,
    out_json: *mut *mut c_char,
) -> Result<(), Error> {
    let (exp, boundary) = parse_doc_with_boundary(doc_json)?;
    let o = read_overrides(params);
    let mut tp = TrivializeParams::default();
    tp.samples_per_slice = o
        .samples
        .unwrap_or(tp.samples_per_slice.max(2 * exp.n * exp.n));
    tp.seed = o.seed.or(exp.seed).unwrap_or(tp.seed);
    tp.workers = o.workers.unwrap_or(tp.workers);
    tp.tol = o.tol.unwrap_or(tp.tol);
    let t = trivialize(&exp.cocycle, &boundary, &tp)?;
    let gens = exp.presentation.generator_names().to_vec();
    let json = borel_core::doc::trivialization_json(&t, &exp.space, &gens);
    let text = serde_json::to_string_pretty(&json).expect("trivialization serializes");
    *out_json = into_owned_cstring(text);
    Ok(())
}

/// Certifies maximality of an experiment document's cocycle and recovers
/// the trivializing map `f`, returned as a JSON string (same schema as the
/// CLI's `trivialize --output`). Returns `BOREL_ERR_REFUSED` when the
/// maximality certificate fails.
///
/// # Safety
/// Same contract as `borel_run_invariant`.
#[no_mangle]
pub unsafe extern "C" fn borel_run_trivialize(
    doc_json: *const c_char,
    params: *const BorelRunParams,
    out_json: *mut *mut c_char,
) -> i32 {
    guarded(|| {
        if doc_json.is_null() || out_json.is_null() {
            return null_arg("borel_run_trivialize");
        }
        match run_trivialize_impl(doc_json, params, out_json) {
            Ok(()) => BOREL_OK,
            Err(e) => fail(&e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::ptr;

    const PI2_DOC: &str = include_str!("../../core/data/fig8_pi2.json");
    const PI3_DOC: &str = include_str!("../../core/data/fig8_pi3.json");
    const TWISTED_DOC: &str = include_str!("../../core/data/fig8_twisted_pi3.json");
    const BLOCK_DOC: &str = include_str!("../../core/data/fig8_block21.json");
    const CORRUPTED_DOC: &str = include_str!("../../core/data/fig8_corrupted_table.json");

    /// 0, 1, e^{i pi/3}, infinity in homogeneous coordinates.
    fn regular_tetrahedron_points() -> [f64; 16] {
        let (s, c) = (std::f64::consts::PI / 3.0).sin_cos();
        [
            0.0, 0.0, 1.0, 0.0, //
            1.0, 0.0, 1.0, 0.0, //
            c, s, 1.0, 0.0, //
            1.0, 0.0, 0.0, 0.0, //
        ]
    }

    fn last_error() -> String {
        unsafe {
            CStr::from_ptr(borel_last_error_message())
                .to_str()
                .unwrap()
                .to_string()
        }
    }

    #[test]
    fn scalar_functions_match_core() {
        assert_eq!(borel_nu3(), nu3());
        assert_eq!(borel_bound(3), borel_core::borel_bound(3));

        let z = Complex64::new(0.3, 0.7);
        let mut out = 0.0;
        let code = unsafe { borel_bloch_wigner(z.re, z.im, &mut out) };
        assert_eq!(code, BOREL_OK);
        assert_eq!(out, bloch_wigner(z).unwrap());
        assert!(last_error().is_empty());
    }

    #[test]
    fn bloch_wigner_rejects_nan_and_null() {
        let mut out = 0.0;
        let code = unsafe { borel_bloch_wigner(f64::NAN, 0.0, &mut out) };
        assert_eq!(code, BOREL_ERR_INVALID_INPUT);
        assert!(!last_error().is_empty());

        let code = unsafe { borel_bloch_wigner(0.5, 0.5, ptr::null_mut()) };
        assert_eq!(code, BOREL_ERR_NULL_ARGUMENT);
        assert!(last_error().contains("NULL"));
    }

    #[test]
    fn ideal_volume_of_regular_tetrahedron() {
        let pts = regular_tetrahedron_points();
        let mut out = 0.0;
        let code = unsafe { borel_ideal_volume(pts.as_ptr(), &mut out) };
        assert_eq!(code, BOREL_OK);
        assert!((out - nu3()).abs() < 1e-12, "volume {out}");

        // Repeated point: exactly zero by the coincidence guard.
        let mut degenerate = pts;
        degenerate[4..8].copy_from_slice(&[0.0, 0.0, 1.0, 0.0]);
        let code = unsafe { borel_ideal_volume(degenerate.as_ptr(), &mut out) };
        assert_eq!(code, BOREL_OK);
        assert_eq!(out, 0.0);
    }

    #[test]
    fn veronese_flags_value_and_maximality() {
        let pts = regular_tetrahedron_points();
        let mut handle: *mut BorelFlags = ptr::null_mut();
        let code = unsafe { borel_flags_veronese(3, pts.as_ptr(), &mut handle) };
        assert_eq!(code, BOREL_OK);
        assert_eq!(unsafe { borel_flags_dimension(handle) }, 3);

        let mut value = 0.0;
        assert_eq!(unsafe { borel_flags_value(handle, &mut value) }, BOREL_OK);
        assert!((value - 4.0 * nu3()).abs() < 1e-9, "B_3 = {value}");

        let mut verdict = 0i8;
        assert_eq!(
            unsafe { borel_flags_is_maximal(handle, 1e-6, &mut verdict) },
            BOREL_OK
        );
        assert_eq!(verdict, 1);
        unsafe { borel_flags_free(handle) };

        // Swapping two points reverses orientation.
        let mut swapped = pts;
        let (a, b) = swapped.split_at_mut(4);
        a[..4].swap_with_slice(&mut b[..4]);
        let code = unsafe { borel_flags_veronese(3, swapped.as_ptr(), &mut handle) };
        assert_eq!(code, BOREL_OK);
        assert_eq!(
            unsafe { borel_flags_is_maximal(handle, 1e-6, &mut verdict) },
            BOREL_OK
        );
        assert_eq!(verdict, -1);
        unsafe { borel_flags_free(handle) };
    }

    #[test]
    fn explicit_bases_agree_with_veronese_constructor() {
        let pts = regular_tetrahedron_points();
        let n = 3;
        let mut data = Vec::with_capacity(4 * n * n * 2);
        for i in 0..4 {
            let p = ProjPoint::new(
                Complex64::new(pts[4 * i], pts[4 * i + 1]),
                Complex64::new(pts[4 * i + 2], pts[4 * i + 3]),
            )
            .unwrap();
            let basis = borel_core::veronese(&p, n).basis().clone();
            for r in 0..n {
                for c in 0..n {
                    data.push(basis[(r, c)].re);
                    data.push(basis[(r, c)].im);
                }
            }
        }

        let mut from_data: *mut BorelFlags = ptr::null_mut();
        assert_eq!(
            unsafe { borel_flags_new(n, data.as_ptr(), &mut from_data) },
            BOREL_OK
        );
        let mut from_points: *mut BorelFlags = ptr::null_mut();
        assert_eq!(
            unsafe { borel_flags_veronese(n, pts.as_ptr(), &mut from_points) },
            BOREL_OK
        );

        let (mut v1, mut v2) = (0.0, 0.0);
        assert_eq!(unsafe { borel_flags_value(from_data, &mut v1) }, BOREL_OK);
        assert_eq!(unsafe { borel_flags_value(from_points, &mut v2) }, BOREL_OK);
        assert_eq!(v1, v2);

        unsafe {
            borel_flags_free(from_data);
            borel_flags_free(from_points);
        }
    }

    #[test]
    fn flag_constructor_validates_input() {
        let mut handle: *mut BorelFlags = ptr::null_mut();
        let pts = regular_tetrahedron_points();

        let code = unsafe { borel_flags_veronese(0, pts.as_ptr(), &mut handle) };
        assert_eq!(code, BOREL_ERR_INVALID_INPUT);
        assert!(last_error().contains("dimension"));

        let code = unsafe { borel_flags_new(2, ptr::null(), &mut handle) };
        assert_eq!(code, BOREL_ERR_NULL_ARGUMENT);

        // A singular basis is rejected with the offending flag named.
        let zeros = vec![0.0f64; 4 * 2 * 2 * 2];
        let code = unsafe { borel_flags_new(2, zeros.as_ptr(), &mut handle) };
        assert_eq!(code, BOREL_ERR_INVALID_INPUT);
        assert!(last_error().contains("flag 0"), "{}", last_error());
    }

    #[test]
    fn frees_tolerate_null() {
        unsafe {
            borel_flags_free(ptr::null_mut());
            borel_string_free(ptr::null_mut());
        }
        assert_eq!(unsafe { borel_flags_dimension(ptr::null()) }, 0);
    }

    fn run_invariant_text(doc: &str, params: Option<&BorelRunParams>) -> (i32, Option<String>) {
        let doc = CString::new(doc).unwrap();
        let mut out: *mut c_char = ptr::null_mut();
        let code = unsafe {
            borel_run_invariant(
                doc.as_ptr(),
                params.map_or(ptr::null(), |p| p as *const _),
                &mut out,
            )
        };
        if out.is_null() {
            return (code, None);
        }
        let text = unsafe { CStr::from_ptr(out).to_str().unwrap().to_string() };
        unsafe { borel_string_free(out) };
        (code, Some(text))
    }

    #[test]
    fn run_invariant_reports_the_symmetric_power_ratio() {
        let (code, text) = run_invariant_text(PI3_DOC, None);
        assert_eq!(code, BOREL_OK, "{}", last_error());
        let report: serde_json::Value = serde_json::from_str(&text.unwrap()).unwrap();
        assert_eq!(report["n"], 3);
        let lambda = report["lambda_hat"].as_f64().unwrap();
        assert!((lambda - 4.0).abs() < 1e-9, "lambda_hat = {lambda}");
    }

    #[test]
    fn run_invariant_honors_overrides() {
        let params = BorelRunParams {
            samples: 64,
            has_seed: 1,
            seed: 123,
            workers: 2,
            tol: 0.0,
        };
        let (code, text) = run_invariant_text(PI2_DOC, Some(&params));
        assert_eq!(code, BOREL_OK, "{}", last_error());
        let report: serde_json::Value = serde_json::from_str(&text.unwrap()).unwrap();
        assert_eq!(report["samples"], 64);
        assert_eq!(report["seed"], 123);
        assert_eq!(report["workers"], 2);
    }

    #[test]
    fn run_invariant_refuses_the_corrupted_table() {
        let (code, text) = run_invariant_text(CORRUPTED_DOC, None);
        assert_eq!(code, BOREL_ERR_REFUSED);
        assert!(text.is_none());
        assert!(last_error().contains("refused"), "{}", last_error());
    }

    #[test]
    fn run_invariant_rejects_malformed_json() {
        let (code, text) = run_invariant_text("{ not json", None);
        assert_eq!(code, BOREL_ERR_INVALID_INPUT);
        assert!(text.is_none());
        assert!(last_error().contains("parse"), "{}", last_error());
    }

    #[test]
    fn run_trivialize_recovers_f_on_the_twisted_document() {
        let doc = CString::new(TWISTED_DOC).unwrap();
        let mut out: *mut c_char = ptr::null_mut();
        let code = unsafe { borel_run_trivialize(doc.as_ptr(), ptr::null(), &mut out) };
        assert_eq!(code, BOREL_OK, "{}", last_error());
        let text = unsafe { CStr::from_ptr(out).to_str().unwrap().to_string() };
        unsafe { borel_string_free(out) };

        let result: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(result["branch"], "plain");
        assert_eq!(result["f"].as_array().unwrap().len(), 5);
        assert!(result["residual"].as_f64().unwrap() < 1e-6);
    }

    #[test]
    fn run_trivialize_refuses_block_cocycles() {
        let doc = CString::new(BLOCK_DOC).unwrap();
        let mut out: *mut c_char = ptr::null_mut();
        let code = unsafe { borel_run_trivialize(doc.as_ptr(), ptr::null(), &mut out) };
        assert_eq!(code, BOREL_ERR_REFUSED);
        assert!(out.is_null());
        assert!(last_error().contains("certificate"), "{}", last_error());
    }
}
