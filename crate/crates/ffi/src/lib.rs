//! C ABI over `qcs-core`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_sample`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`QcsStatus`]; the message of the last failure on the calling
//! thread is available from [`qcs_last_error`]. Output buffers are always
//! caller-allocated with an explicit length.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use qcs::harness::fit_slope;
use qcs::pgd::{pgd_recover, Init, PgdConfig};
use qcs::{DitherKind, MatrixKind, QcsError, QuantizerSpec, SensingInstance, SignalModel, Structure};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    DimensionMismatch = 3,
    NonFinite = 4,
    InvalidLevel = 5,
    UnsupportedModel = 6,
    SizeLimit = 7,
    Io = 8,
    Config = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcsMatrixKind {
    Gaussian = 0,
    Rademacher = 1,
}

/// Initialization for [`qcs_pgd_recover`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcsInit {
    Zero = 0,
    /// Use the `x0` buffer.
    Given = 1,
    /// Draw from the model's generator with `init_seed`.
    Random = 2,
}

/// Opaque quantizer handle.
pub struct QcsQuantizer(QuantizerSpec);
/// Opaque sensing instance handle.
pub struct QcsInstance(SensingInstance);
/// Opaque signal model handle.
pub struct QcsModel(SignalModel);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QcsSlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &QcsError) -> QcsStatus {
    match e {
        QcsError::InvalidParameter(_) => QcsStatus::InvalidParameter,
        QcsError::DimensionMismatch { .. } => QcsStatus::DimensionMismatch,
        QcsError::NonFinite => QcsStatus::NonFinite,
        QcsError::InvalidLevel(_) => QcsStatus::InvalidLevel,
        QcsError::UnsupportedModel(_) => QcsStatus::UnsupportedModel,
        QcsError::SizeLimit(_) => QcsStatus::SizeLimit,
        QcsError::Io(_) => QcsStatus::Io,
        QcsError::Config(_) => QcsStatus::Config,
    }
}

enum Failure {
    Null(&'static str),
    Lib(QcsError),
}

impl From<QcsError> for Failure {
    fn from(e: QcsError) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QcsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QcsStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            QcsStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("panic inside qcs".into());
            QcsStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn input<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a>(p: *mut f64, len: usize, what: &'static str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

fn copy_out(dst: &mut [f64], src: &[f64]) -> Result<(), Failure> {
    if dst.len() != src.len() {
        return Err(QcsError::DimensionMismatch { expected: src.len(), got: dst.len() }.into());
    }
    dst.copy_from_slice(src);
    Ok(())
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qcs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn qcs_status_string(status: QcsStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        QcsStatus::Ok => b"ok\0",
        QcsStatus::NullPointer => b"null pointer\0",
        QcsStatus::InvalidParameter => b"invalid parameter\0",
        QcsStatus::DimensionMismatch => b"dimension mismatch\0",
        QcsStatus::NonFinite => b"non-finite value\0",
        QcsStatus::InvalidLevel => b"invalid level value\0",
        QcsStatus::UnsupportedModel => b"unsupported model\0",
        QcsStatus::SizeLimit => b"size limit exceeded\0",
        QcsStatus::Io => b"i/o error\0",
        QcsStatus::Config => b"invalid config\0",
        QcsStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

// ---- quantizers ----

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_quantizer_sign(out: *mut *mut QcsQuantizer) -> QcsStatus {
    guard(|| store(out, QcsQuantizer(QuantizerSpec::sign())))
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_quantizer_uniform(delta: f64, out: *mut *mut QcsQuantizer) -> QcsStatus {
    guard(|| store(out, QcsQuantizer(QuantizerSpec::uniform(delta)?)))
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_quantizer_saturated(delta: f64, levels: usize, out: *mut *mut QcsQuantizer) -> QcsStatus {
    guard(|| store(out, QcsQuantizer(QuantizerSpec::saturated(delta, levels)?)))
}

/// # Safety
/// `q` must be NULL or a handle from a `qcs_quantizer_*` constructor that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn qcs_quantizer_free(q: *mut QcsQuantizer) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Resolution `Δ` of the quantizer, NaN for a NULL handle.
///
/// # Safety
/// `q` must be NULL or a live quantizer handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_quantizer_resolution(q: *const QcsQuantizer) -> f64 {
    q.as_ref().map_or(f64::NAN, |q| q.0.resolution())
}

/// Elementwise quantization of `len` values.
///
/// # Safety
/// `values` and `out` must each point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qcs_quantize(
    q: *const QcsQuantizer,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> QcsStatus {
    guard(|| {
        let q = as_ref(q, "quantizer")?;
        let v = q.0.quantize_vec(input(values, len, "values")?)?;
        copy_out(output(out, len, "out")?, &v)
    })
}

// ---- sensing ----

/// Samples an `m x n` ensemble; `dither_level = 0` disables dithering.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_instance_sample(
    kind: QcsMatrixKind,
    dither_level: f64,
    m: usize,
    n: usize,
    seed: u64,
    out: *mut *mut QcsInstance,
) -> QcsStatus {
    guard(|| {
        let mk = match kind {
            QcsMatrixKind::Gaussian => MatrixKind::Gaussian,
            QcsMatrixKind::Rademacher => MatrixKind::Rademacher,
        };
        let dk = if dither_level == 0.0 { DitherKind::Zero } else { DitherKind::UniformSymmetric(dither_level) };
        store(out, QcsInstance(SensingInstance::sample(mk, dk, m, n, seed)?))
    })
}

/// Wraps a caller-supplied row-major `m x n` matrix and `m` dithers.
///
/// # Safety
/// `matrix` must point to `m * n` doubles, `dither` to `m` doubles and `out`
/// to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_instance_from_parts(
    matrix: *const f64,
    dither: *const f64,
    m: usize,
    n: usize,
    out: *mut *mut QcsInstance,
) -> QcsStatus {
    guard(|| {
        let a = input(matrix, m * n, "matrix")?.to_vec();
        let tau = input(dither, m, "dither")?.to_vec();
        let inst = SensingInstance::from_parts(qcs::DenseMatrix::new(m, n, a)?, tau)?;
        store(out, QcsInstance(inst))
    })
}

/// # Safety
/// `inst` must be NULL or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_instance_free(inst: *mut QcsInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live instance handle; `m_out`/`n_out` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn qcs_instance_dims(
    inst: *const QcsInstance,
    m_out: *mut usize,
    n_out: *mut usize,
) -> QcsStatus {
    guard(|| {
        let inst = as_ref(inst, "instance")?;
        if let Some(m) = m_out.as_mut() {
            *m = inst.0.m();
        }
        if let Some(n) = n_out.as_mut() {
            *n = inst.0.n();
        }
        Ok(())
    })
}

/// Copies the row-major matrix into `out` (`m * n` doubles).
///
/// # Safety
/// `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qcs_instance_matrix(inst: *const QcsInstance, out: *mut f64, len: usize) -> QcsStatus {
    guard(|| {
        let inst = as_ref(inst, "instance")?;
        copy_out(output(out, len, "out")?, inst.0.matrix().as_slice())
    })
}

/// Copies the dither vector into `out` (`m` doubles).
///
/// # Safety
/// `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qcs_instance_dither(inst: *const QcsInstance, out: *mut f64, len: usize) -> QcsStatus {
    guard(|| {
        let inst = as_ref(inst, "instance")?;
        copy_out(output(out, len, "out")?, inst.0.dither())
    })
}

/// `y = Q(A x - τ)`.
///
/// # Safety
/// `x` must point to `n` doubles and `y_out` to `m` doubles.
#[no_mangle]
pub unsafe extern "C" fn qcs_measure(
    inst: *const QcsInstance,
    q: *const QcsQuantizer,
    x: *const f64,
    n: usize,
    y_out: *mut f64,
    m: usize,
) -> QcsStatus {
    guard(|| {
        let inst = as_ref(inst, "instance")?;
        let q = as_ref(q, "quantizer")?;
        let y = inst.0.measure(&q.0, input(x, n, "x")?)?;
        copy_out(output(y_out, m, "y_out")?, &y)
    })
}

/// Flips `floor(zeta * m)` measurements by one level.
///
/// # Safety
/// `y` and `out` must each point to `m` doubles.
#[no_mangle]
pub unsafe extern "C" fn qcs_corrupt(
    q: *const QcsQuantizer,
    y: *const f64,
    m: usize,
    zeta: f64,
    seed: u64,
    out: *mut f64,
) -> QcsStatus {
    guard(|| {
        let q = as_ref(q, "quantizer")?;
        let c = qcs::corrupt(input(y, m, "y")?, &q.0, zeta, seed)?;
        copy_out(output(out, m, "out")?, &c)
    })
}

// ---- signal models ----

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_model_sparse(
    k: usize,
    n: usize,
    alpha: f64,
    beta: f64,
    out: *mut *mut QcsModel,
) -> QcsStatus {
    guard(|| store(out, QcsModel(SignalModel::new(Structure::Sparse { k, n }, alpha, beta)?)))
}

/// Column-major `n1 x n2` matrices of rank at most `rank`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_model_low_rank(
    rank: usize,
    n1: usize,
    n2: usize,
    alpha: f64,
    beta: f64,
    out: *mut *mut QcsModel,
) -> QcsStatus {
    guard(|| store(out, QcsModel(SignalModel::new(Structure::LowRank { rank, n1, n2 }, alpha, beta)?)))
}

/// ℓ1 ball of radius `sqrt(k)`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_model_l1_ball(
    k: f64,
    n: usize,
    alpha: f64,
    beta: f64,
    out: *mut *mut QcsModel,
) -> QcsStatus {
    guard(|| store(out, QcsModel(SignalModel::new(Structure::L1Ball { k, n }, alpha, beta)?)))
}

/// # Safety
/// `model` must be NULL or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_model_free(model: *mut QcsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Ambient dimension, 0 for a NULL handle.
///
/// # Safety
/// `model` must be NULL or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn qcs_model_dim(model: *const QcsModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.dim())
}

/// # Safety
/// `out` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qcs_model_gen_signal(
    model: *const QcsModel,
    seed: u64,
    out: *mut f64,
    len: usize,
) -> QcsStatus {
    guard(|| {
        let model = as_ref(model, "model")?;
        copy_out(output(out, len, "out")?, &model.0.gen_signal(seed))
    })
}

/// Projection onto the structure set followed by the norm annulus.
///
/// # Safety
/// `u` and `out` must each point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qcs_model_project(
    model: *const QcsModel,
    u: *const f64,
    len: usize,
    out: *mut f64,
) -> QcsStatus {
    guard(|| {
        let model = as_ref(model, "model")?;
        let p = model.0.project(input(u, len, "u")?)?;
        copy_out(output(out, len, "out")?, &p)
    })
}

// ---- recovery ----

/// Runs projected gradient descent and writes the final iterate to
/// `estimate` (`n` doubles). `x0` is read only for [`QcsInit::Given`].
///
/// # Safety
/// `y` must point to `m` doubles, `estimate` to `n` doubles and `x0` (when
/// used) to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn qcs_pgd_recover(
    model: *const QcsModel,
    q: *const QcsQuantizer,
    inst: *const QcsInstance,
    y: *const f64,
    m: usize,
    eta: f64,
    iterations: usize,
    init: QcsInit,
    x0: *const f64,
    init_seed: u64,
    estimate: *mut f64,
    n: usize,
) -> QcsStatus {
    guard(|| {
        let model = as_ref(model, "model")?;
        let q = as_ref(q, "quantizer")?;
        let inst = as_ref(inst, "instance")?;
        let init = match init {
            QcsInit::Zero => Init::Zero,
            QcsInit::Given => Init::Given(input(x0, n, "x0")?.to_vec()),
            QcsInit::Random => Init::RandomInModel(init_seed),
        };
        let config = PgdConfig::new(eta).with_iterations(iterations).with_init(init);
        let rec = pgd_recover(&config, &model.0, &q.0, &inst.0, input(y, m, "y")?, None)?;
        copy_out(output(estimate, n, "estimate")?, &rec.estimate)
    })
}

/// Least-squares slope of `log10(err)` against `log10(m)`.
///
/// # Safety
/// `ms` and `errs` must each point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcs_fit_slope(
    ms: *const f64,
    errs: *const f64,
    len: usize,
    out: *mut QcsSlopeFit,
) -> QcsStatus {
    guard(|| {
        let ms = input(ms, len, "ms")?;
        let errs = input(errs, len, "errs")?;
        let pts: Vec<(f64, f64)> = ms.iter().copied().zip(errs.iter().copied()).collect();
        let fit = fit_slope(&pts)?;
        let out = out.as_mut().ok_or(Failure::Null("out"))?;
        *out = QcsSlopeFit { slope: fit.slope, intercept: fit.intercept, r2: fit.r2 };
        Ok(())
    })
}
