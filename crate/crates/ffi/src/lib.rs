//! C ABI for the truncal library: opaque handles, integer status codes,
//! and a generated C header (see `include/truncal.h`).
//!
//! Conventions:
//! - Every fallible function returns a [`TruncalStatus`]; outputs go
//!   through pointer parameters that are written only on `Ok`.
//! - Handles created by `*_new`/`*_read` functions are freed by the
//!   matching `*_free`; passing them to anything else after free is
//!   undefined behavior, as is passing handles across incompatible
//!   library versions.
//! - `truncal_last_error_message` returns a thread-local, NUL-terminated
//!   description of the most recent failure on the calling thread; the
//!   pointer stays valid until the next failing call on that thread.
//! - Labels and signs cross the boundary as `int32_t` +1 / -1.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use truncal_core::bounds::{sample_complexity, generalization_bound};
use truncal_core::coding::trunc_sign_via_code;
use truncal_core::data::{read_dataset, write_dataset, Dataset};
use truncal_core::error::Error;
use truncal_core::growth::{growth_bound_t, growth_bound_ttilde};
use truncal_core::model::Model;
use truncal_core::oracle::{
    brute_force_range, brute_force_robust, empirical_robust_loss, robust_misclassified,
    robust_range, worst_case_witness,
};
use truncal_core::train::{train, TrainConfig};
use truncal_core::truncation::{lower_sum, trunc_inner, tsum, Sign, WeightVector};
use truncal_core::truncation::upper_sum;
use truncal_core::TruncationConfig;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncalStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NanInput = 3,
    DimensionMismatch = 4,
    InvalidLabel = 5,
    EmptyDataset = 6,
    MalformedCode = 7,
    DimensionLimit = 8,
    Precondition = 9,
    /// A witness failed verification: a library bug, not a user error.
    Inconsistency = 10,
    DataFormat = 11,
    Io = 12,
    Panic = 13,
}

/// Bound-calculator output mirrored as a plain C struct.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct TruncalBoundReport {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub delta: f64,
    pub c: f64,
    pub complexity_term: f64,
    pub confidence_term: f64,
    pub total: f64,
}

/// Opaque truncation configuration (dimension and budget).
pub struct TruncalConfig(TruncationConfig);

/// Opaque labeled dataset.
pub struct TruncalDataset(Dataset);

/// Opaque trained model.
pub struct TruncalModel(Model);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_last_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> TruncalStatus {
    match err {
        Error::InvalidNumber(_) => TruncalStatus::NanInput,
        Error::DimensionMismatch { .. } => TruncalStatus::DimensionMismatch,
        Error::InvalidConfig(_) => TruncalStatus::InvalidArgument,
        Error::InvalidLabel(_) => TruncalStatus::InvalidLabel,
        Error::EmptyDataset => TruncalStatus::EmptyDataset,
        Error::MalformedCode(_) => TruncalStatus::MalformedCode,
        Error::DimensionLimit { .. } => TruncalStatus::DimensionLimit,
        Error::Precondition(_) => TruncalStatus::Precondition,
        Error::Inconsistency(_) => TruncalStatus::Inconsistency,
        Error::DataFormat { .. } => TruncalStatus::DataFormat,
        Error::Io(_) => TruncalStatus::Io,
        Error::Json(_) => TruncalStatus::DataFormat,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Error>) -> TruncalStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TruncalStatus::Ok,
        Ok(Err(e)) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("panic inside truncal");
            TruncalStatus::Panic
        }
    }
}

fn null_error() -> Error {
    Error::InvalidConfig("null pointer argument".into())
}

macro_rules! nonnull {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_last_error("null pointer argument");
            return TruncalStatus::NullPointer;
        }
    };
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Result<&'a [f64], Error> {
    if ptr.is_null() {
        return Err(null_error());
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn sign_arg(y: i32) -> Result<Sign, Error> {
    match y {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        other => Err(Error::InvalidLabel(other.to_string())),
    }
}

unsafe fn path_arg(ptr: *const c_char) -> Result<PathBuf, Error> {
    if ptr.is_null() {
        return Err(null_error());
    }
    let s = CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Error::InvalidConfig("path is not valid UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

/// Description of the most recent failure on this thread.
#[no_mangle]
pub extern "C" fn truncal_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

// ---------------------------------------------------------------------------
// configuration

/// Create a truncation configuration; requires 2k < d (k = 0 allowed).
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn truncal_config_new(
    d: usize,
    k: usize,
    out: *mut *mut TruncalConfig,
) -> TruncalStatus {
    nonnull!(out);
    guard(|| {
        let cfg = TruncationConfig::new(d, k)?;
        *out = Box::into_raw(Box::new(TruncalConfig(cfg)));
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from `truncal_config_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn truncal_config_free(cfg: *mut TruncalConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn truncal_config_d(cfg: *const TruncalConfig) -> usize {
    cfg.as_ref().map_or(0, |c| c.0.d())
}

/// # Safety
/// `cfg` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn truncal_config_k(cfg: *const TruncalConfig) -> usize {
    cfg.as_ref().map_or(0, |c| c.0.k())
}

// ---------------------------------------------------------------------------
// truncated arithmetic

/// Sign with the convention sgn(0) = +1; rejects NaN.
///
/// # Safety
/// `out` must point to writable storage for one `int32_t`.
#[no_mangle]
pub unsafe extern "C" fn truncal_sign(value: f64, out: *mut i32) -> TruncalStatus {
    nonnull!(out);
    guard(|| {
        *out = Sign::of(value)?.as_i8() as i32;
        Ok(())
    })
}

/// Truncated sum of `u` (middle d-2k order statistics).
///
/// # Safety
/// `u` must point to `len` readable doubles; `out` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn truncal_tsum(
    cfg: *const TruncalConfig,
    u: *const f64,
    len: usize,
    out: *mut f64,
) -> TruncalStatus {
    nonnull!(cfg);
    nonnull!(u);
    nonnull!(out);
    guard(|| {
        let u = slice_arg(u, len)?;
        *out = tsum(u, &(*cfg).0)?;
        Ok(())
    })
}

/// Truncated inner product of `w` and `x`.
///
/// # Safety
/// `w` and `x` must point to `len` readable doubles; `out` to one double.
#[no_mangle]
pub unsafe extern "C" fn truncal_trunc_inner(
    cfg: *const TruncalConfig,
    w: *const f64,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> TruncalStatus {
    nonnull!(cfg);
    nonnull!(w);
    nonnull!(x);
    nonnull!(out);
    guard(|| {
        let w = WeightVector::new(slice_arg(w, len)?.to_vec())?;
        *out = trunc_inner(&w, slice_arg(x, len)?, &(*cfg).0)?;
        Ok(())
    })
}

/// Sum of the d-2k smallest order statistics of `u`.
///
/// # Safety
/// As for [`truncal_tsum`].
#[no_mangle]
pub unsafe extern "C" fn truncal_lower_sum(
    cfg: *const TruncalConfig,
    u: *const f64,
    len: usize,
    out: *mut f64,
) -> TruncalStatus {
    nonnull!(cfg);
    nonnull!(u);
    nonnull!(out);
    guard(|| {
        *out = lower_sum(slice_arg(u, len)?, &(*cfg).0)?;
        Ok(())
    })
}

/// Sum of the d-2k largest order statistics of `u`.
///
/// # Safety
/// As for [`truncal_tsum`].
#[no_mangle]
pub unsafe extern "C" fn truncal_upper_sum(
    cfg: *const TruncalConfig,
    u: *const f64,
    len: usize,
    out: *mut f64,
) -> TruncalStatus {
    nonnull!(cfg);
    nonnull!(u);
    nonnull!(out);
    guard(|| {
        *out = upper_sum(slice_arg(u, len)?, &(*cfg).0)?;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// robust oracle

/// Range of the truncated inner product over the l0 ball, with
/// attainability flags for each end.
///
/// # Safety
/// Vector pointers must cover `len` doubles; out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn truncal_robust_range(
    cfg: *const TruncalConfig,
    w: *const f64,
    x: *const f64,
    len: usize,
    out_lo: *mut f64,
    out_hi: *mut f64,
    out_lo_attained: *mut bool,
    out_hi_attained: *mut bool,
) -> TruncalStatus {
    nonnull!(cfg);
    nonnull!(w);
    nonnull!(x);
    nonnull!(out_lo);
    nonnull!(out_hi);
    nonnull!(out_lo_attained);
    nonnull!(out_hi_attained);
    guard(|| {
        let w = WeightVector::new(slice_arg(w, len)?.to_vec())?;
        let r = robust_range(&w, slice_arg(x, len)?, &(*cfg).0)?;
        *out_lo = r.lo;
        *out_hi = r.hi;
        *out_lo_attained = r.lo_attained;
        *out_hi_attained = r.hi_attained;
        Ok(())
    })
}

/// Exact adversarial 0-1 loss indicator for one sample. `y` is +1 or -1.
///
/// # Safety
/// As for [`truncal_robust_range`].
#[no_mangle]
pub unsafe extern "C" fn truncal_robust_misclassified(
    cfg: *const TruncalConfig,
    w: *const f64,
    x: *const f64,
    len: usize,
    y: i32,
    out: *mut bool,
) -> TruncalStatus {
    nonnull!(cfg);
    nonnull!(w);
    nonnull!(x);
    nonnull!(out);
    guard(|| {
        let w = WeightVector::new(slice_arg(w, len)?.to_vec())?;
        *out = robust_misclassified(&w, slice_arg(x, len)?, sign_arg(y)?, &(*cfg).0)?;
        Ok(())
    })
}

/// Worst-case perturbation witness. When the sample can be fooled,
/// writes the witness into `out_witness` (length `len`) and sets
/// `*out_found = true`; otherwise sets `*out_found = false` and leaves
/// the buffer untouched.
///
/// # Safety
/// `out_witness` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn truncal_worst_case_witness(
    cfg: *const TruncalConfig,
    w: *const f64,
    x: *const f64,
    len: usize,
    y: i32,
    out_witness: *mut f64,
    out_found: *mut bool,
) -> TruncalStatus {
    nonnull!(cfg);
    nonnull!(w);
    nonnull!(x);
    nonnull!(out_witness);
    nonnull!(out_found);
    guard(|| {
        let w = WeightVector::new(slice_arg(w, len)?.to_vec())?;
        let witness = worst_case_witness(&w, slice_arg(x, len)?, sign_arg(y)?, &(*cfg).0)?;
        match witness {
            Some(xp) => {
                std::ptr::copy_nonoverlapping(xp.as_ptr(), out_witness, len);
                *out_found = true;
            }
            None => *out_found = false,
        }
        Ok(())
    })
}

/// Brute-force reference range (d at most 10).
///
/// # Safety
/// As for [`truncal_robust_range`].
#[no_mangle]
pub unsafe extern "C" fn truncal_brute_force_range(
    cfg: *const TruncalConfig,
    w: *const f64,
    x: *const f64,
    len: usize,
    out_lo: *mut f64,
    out_hi: *mut f64,
) -> TruncalStatus {
    nonnull!(cfg);
    nonnull!(w);
    nonnull!(x);
    nonnull!(out_lo);
    nonnull!(out_hi);
    guard(|| {
        let w = WeightVector::new(slice_arg(w, len)?.to_vec())?;
        let (lo, hi) = brute_force_range(&w, slice_arg(x, len)?, &(*cfg).0)?;
        *out_lo = lo;
        *out_hi = hi;
        Ok(())
    })
}

/// Brute-force reference misclassification check (d at most 10).
///
/// # Safety
/// As for [`truncal_robust_misclassified`].
#[no_mangle]
pub unsafe extern "C" fn truncal_brute_force_robust(
    cfg: *const TruncalConfig,
    w: *const f64,
    x: *const f64,
    len: usize,
    y: i32,
    out: *mut bool,
) -> TruncalStatus {
    nonnull!(cfg);
    nonnull!(w);
    nonnull!(x);
    nonnull!(out);
    guard(|| {
        let w = WeightVector::new(slice_arg(w, len)?.to_vec())?;
        *out = brute_force_robust(&w, slice_arg(x, len)?, sign_arg(y)?, &(*cfg).0)?;
        Ok(())
    })
}

/// Sign of the truncated inner product computed through the sign code
/// (encode + decode), exercising the coding path end to end.
///
/// # Safety
/// As for [`truncal_trunc_inner`].
#[no_mangle]
pub unsafe extern "C" fn truncal_trunc_sign_via_code(
    cfg: *const TruncalConfig,
    w: *const f64,
    x: *const f64,
    len: usize,
    out_sign: *mut i32,
) -> TruncalStatus {
    nonnull!(cfg);
    nonnull!(w);
    nonnull!(x);
    nonnull!(out_sign);
    guard(|| {
        let w = WeightVector::new(slice_arg(w, len)?.to_vec())?;
        *out_sign = trunc_sign_via_code(&w, slice_arg(x, len)?, &(*cfg).0)?.as_i8() as i32;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// bounds

/// Growth bound (e n m / d)^d in log space. Either out pointer may be
/// null to skip that output.
///
/// # Safety
/// Non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn truncal_growth_bound_t(
    n: usize,
    d: usize,
    k: usize,
    out_log: *mut f64,
    out_value: *mut f64,
) -> TruncalStatus {
    guard(|| {
        let b = growth_bound_t(n, d, k)?;
        if !out_log.is_null() {
            *out_log = b.log_value;
        }
        if !out_value.is_null() {
            *out_value = b.value;
        }
        Ok(())
    })
}

/// Growth bound 1 + (e n m / d)^d in log space.
///
/// # Safety
/// As for [`truncal_growth_bound_t`].
#[no_mangle]
pub unsafe extern "C" fn truncal_growth_bound_ttilde(
    n: usize,
    d: usize,
    k: usize,
    out_log: *mut f64,
    out_value: *mut f64,
) -> TruncalStatus {
    guard(|| {
        let b = growth_bound_ttilde(n, d, k)?;
        if !out_log.is_null() {
            *out_log = b.log_value;
        }
        if !out_value.is_null() {
            *out_value = b.value;
        }
        Ok(())
    })
}

/// Generalization bound at confidence 1 - delta; requires n > d+1 and
/// 0 < 2k < d.
///
/// # Safety
/// `out` must point to one writable `TruncalBoundReport`.
#[no_mangle]
pub unsafe extern "C" fn truncal_generalization_bound(
    n: usize,
    d: usize,
    k: usize,
    delta: f64,
    out: *mut TruncalBoundReport,
) -> TruncalStatus {
    nonnull!(out);
    guard(|| {
        let r = generalization_bound(n, d, k, delta)?;
        *out = TruncalBoundReport {
            n: r.n,
            d: r.d,
            k: r.k,
            delta: r.delta,
            c: r.c,
            complexity_term: r.complexity_term,
            confidence_term: r.confidence_term,
            total: r.total,
        };
        Ok(())
    })
}

/// Smallest n > d+1 whose bound total is at most epsilon.
///
/// # Safety
/// `out_n` must point to one writable `size_t`.
#[no_mangle]
pub unsafe extern "C" fn truncal_sample_complexity(
    epsilon: f64,
    delta: f64,
    d: usize,
    k: usize,
    out_n: *mut usize,
) -> TruncalStatus {
    nonnull!(out_n);
    guard(|| {
        *out_n = sample_complexity(epsilon, delta, d, k)?;
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// datasets and models

/// Read a dataset CSV (header x1,...,xd,y).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn truncal_dataset_read_csv(
    path: *const c_char,
    out: *mut *mut TruncalDataset,
) -> TruncalStatus {
    nonnull!(path);
    nonnull!(out);
    guard(|| {
        let ds = read_dataset(path_arg(path)?)?;
        *out = Box::into_raw(Box::new(TruncalDataset(ds)));
        Ok(())
    })
}

/// Write a dataset as CSV.
///
/// # Safety
/// `ds` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn truncal_dataset_write_csv(
    ds: *const TruncalDataset,
    path: *const c_char,
) -> TruncalStatus {
    nonnull!(ds);
    nonnull!(path);
    guard(|| {
        write_dataset(&(*ds).0, path_arg(path)?)?;
        Ok(())
    })
}

/// # Safety
/// `ds` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn truncal_dataset_len(ds: *const TruncalDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.len())
}

/// # Safety
/// `ds` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn truncal_dataset_dim(ds: *const TruncalDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.0.d())
}

/// # Safety
/// `ds` must come from a dataset constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn truncal_dataset_free(ds: *mut TruncalDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Adversarially train on a dataset handle. `l2_cap <= 0` disables the
/// projection. Returns a model handle.
///
/// # Safety
/// `ds` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn truncal_train(
    ds: *const TruncalDataset,
    k: usize,
    epochs: usize,
    step_size: f64,
    restarts: usize,
    seed: u64,
    l2_cap: f64,
    bias: bool,
    out: *mut *mut TruncalModel,
) -> TruncalStatus {
    nonnull!(ds);
    nonnull!(out);
    guard(|| {
        let dataset = &(*ds).0;
        let cfg = TruncationConfig::new(dataset.d(), k)?;
        let tc = TrainConfig {
            epochs,
            step_size,
            restarts,
            seed,
            l2_cap: (l2_cap > 0.0).then_some(l2_cap),
            bias,
        };
        let report = train(dataset, &cfg, &tc)?;
        let out_cfg = TruncationConfig::new(report.w_hat.dim(), k)?;
        let model = Model::new(&report.w_hat, &out_cfg, bias)?;
        *out = Box::into_raw(Box::new(TruncalModel(model)));
        Ok(())
    })
}

/// Read a model JSON file.
///
/// # Safety
/// `path` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn truncal_model_read(
    path: *const c_char,
    out: *mut *mut TruncalModel,
) -> TruncalStatus {
    nonnull!(path);
    nonnull!(out);
    guard(|| {
        let m = Model::read(path_arg(path)?)?;
        *out = Box::into_raw(Box::new(TruncalModel(m)));
        Ok(())
    })
}

/// Write a model JSON file.
///
/// # Safety
/// `model` must be a live handle; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn truncal_model_write(
    model: *const TruncalModel,
    path: *const c_char,
) -> TruncalStatus {
    nonnull!(model);
    nonnull!(path);
    guard(|| {
        (*model).0.write(path_arg(path)?)?;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn truncal_model_dim(model: *const TruncalModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.d)
}

/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn truncal_model_k(model: *const TruncalModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.k)
}

/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn truncal_model_bias(model: *const TruncalModel) -> bool {
    model.as_ref().is_some_and(|m| m.0.bias)
}

/// Copy the model weights into `buf` (length `len`, which must equal the
/// model dimension).
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn truncal_model_weights(
    model: *const TruncalModel,
    buf: *mut f64,
    len: usize,
) -> TruncalStatus {
    nonnull!(model);
    nonnull!(buf);
    guard(|| {
        let m = &(*model).0;
        if len != m.w.len() {
            return Err(Error::DimensionMismatch {
                expected: m.w.len(),
                actual: len,
            });
        }
        std::ptr::copy_nonoverlapping(m.w.as_ptr(), buf, len);
        Ok(())
    })
}

/// Exact robust error of a model on a dataset (the bias column is
/// appended automatically for bias models).
///
/// # Safety
/// `model` and `ds` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn truncal_model_robust_loss(
    model: *const TruncalModel,
    ds: *const TruncalDataset,
    out: *mut f64,
) -> TruncalStatus {
    nonnull!(model);
    nonnull!(ds);
    nonnull!(out);
    guard(|| {
        let m = &(*model).0;
        let prepared = m.prepare(&(*ds).0)?;
        let w = m.weights()?;
        *out = empirical_robust_loss(&w, &prepared, &m.config()?)?;
        Ok(())
    })
}

/// # Safety
/// `model` must come from a model constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn truncal_model_free(model: *mut TruncalModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}
