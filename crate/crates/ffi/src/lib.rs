//! C API over [`abpre::workflow`].
//!
//! Every object crosses the boundary in its canonical wire encoding. Inputs
//! are borrowed [`AbpreBytes`] views; outputs are [`AbpreBuffer`] handles
//! owned by the caller and released with [`abpre_buffer_free`]. Functions
//! return an [`AbpreStatus`]; on failure [`abpre_last_error`] describes the
//! error for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use abpre::cli::policy_explain;
use abpre::group::{DynSource, SuiteParams};
use abpre::policy::AttributeSet;
use abpre::scheme::SchemeError;
use abpre::workflow::{self, ErrorKind};

pub type AbpreStatus = i32;

pub const ABPRE_OK: AbpreStatus = 0;
/// The key's attributes do not satisfy the ciphertext policy.
pub const ABPRE_ERR_POLICY_NOT_SATISFIED: AbpreStatus = 1;
/// The ciphertext was encrypted with re-encryption disabled.
pub const ABPRE_ERR_REENCRYPTION_DISABLED: AbpreStatus = 2;
/// Malformed, mismatched or truncated encoding.
pub const ABPRE_ERR_FORMAT: AbpreStatus = 3;
/// The sealed payload failed authentication.
pub const ABPRE_ERR_AEAD: AbpreStatus = 4;
/// Bad argument: policy syntax, attribute names, suite parameters.
pub const ABPRE_ERR_INVALID_ARGUMENT: AbpreStatus = 5;
pub const ABPRE_ERR_NULL_POINTER: AbpreStatus = 6;
/// A Rust panic was caught at the boundary.
pub const ABPRE_ERR_INTERNAL: AbpreStatus = 7;

/// Borrowed input bytes. `data` may be null only when `len` is 0.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct AbpreBytes {
    pub data: *const u8,
    pub len: usize,
}

/// Opaque randomness source.
pub struct AbpreRng {
    inner: DynSource,
}

/// Opaque owned byte buffer.
pub struct AbpreBuffer {
    bytes: Vec<u8>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(AbpreStatus, String);

impl From<workflow::Error> for Failure {
    fn from(e: workflow::Error) -> Self {
        let code = match &e {
            workflow::Error::Scheme(SchemeError::PolicyNotSatisfied) => {
                ABPRE_ERR_POLICY_NOT_SATISFIED
            }
            workflow::Error::Scheme(SchemeError::ReencryptionDisabled) => {
                ABPRE_ERR_REENCRYPTION_DISABLED
            }
            workflow::Error::AeadAuthenticationFailure => ABPRE_ERR_AEAD,
            _ => match e.kind() {
                ErrorKind::Usage => ABPRE_ERR_INVALID_ARGUMENT,
                ErrorKind::Authorization | ErrorKind::Format => ABPRE_ERR_FORMAT,
            },
        };
        Failure(code, e.to_string())
    }
}

impl From<abpre::policy::PolicyError> for Failure {
    fn from(e: abpre::policy::PolicyError) -> Self {
        Failure(ABPRE_ERR_INVALID_ARGUMENT, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ABPRE_ERR_NULL_POINTER, format!("{what} is null"))
}

/// Runs `f` behind a panic guard and maps its outcome to a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AbpreStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            ABPRE_OK
        }
        Ok(Err(Failure(code, message))) => {
            set_last_error(message);
            code
        }
        Err(_) => {
            set_last_error("internal error".into());
            ABPRE_ERR_INTERNAL
        }
    }
}

unsafe fn bytes<'a>(b: AbpreBytes, what: &str) -> Result<&'a [u8], Failure> {
    if b.len == 0 {
        return Ok(&[]);
    }
    if b.data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(b.data, b.len))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(ABPRE_ERR_INVALID_ARGUMENT, format!("{what} is not UTF-8")))
}

unsafe fn rng<'a>(r: *mut AbpreRng) -> Result<&'a mut DynSource, Failure> {
    r.as_mut().map(|r| &mut r.inner).ok_or_else(|| null("rng"))
}

unsafe fn emit(out: *mut *mut AbpreBuffer, bytes: Vec<u8>, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = Box::into_raw(Box::new(AbpreBuffer { bytes }));
    Ok(())
}

unsafe fn check_out(out: *mut *mut AbpreBuffer, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    *out = ptr::null_mut();
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn abpre_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn abpre_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Operating-system randomness.
#[no_mangle]
pub extern "C" fn abpre_rng_new_os() -> *mut AbpreRng {
    Box::into_raw(Box::new(AbpreRng {
        inner: DynSource::os(),
    }))
}

/// Deterministic ChaCha20 stream. For tests only.
#[no_mangle]
pub extern "C" fn abpre_rng_new_seeded(seed: u64) -> *mut AbpreRng {
    Box::into_raw(Box::new(AbpreRng {
        inner: DynSource::seeded(seed),
    }))
}

/// Replays `values` as the exact scalars drawn, then fails. For tests only.
///
/// # Safety
/// `values` must point to `len` readable integers, or be null with `len` 0.
#[no_mangle]
pub unsafe extern "C" fn abpre_rng_new_tape(values: *const u64, len: usize) -> *mut AbpreRng {
    let tape = if len == 0 {
        Vec::new()
    } else if values.is_null() {
        return ptr::null_mut();
    } else {
        std::slice::from_raw_parts(values, len).to_vec()
    };
    Box::into_raw(Box::new(AbpreRng {
        inner: DynSource::tape(tape),
    }))
}

/// # Safety
/// `rng` must come from an `abpre_rng_new_*` function and not be used
/// afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn abpre_rng_free(rng: *mut AbpreRng) {
    if !rng.is_null() {
        drop(Box::from_raw(rng));
    }
}

/// # Safety
/// `buf` must be a live buffer returned by this library.
#[no_mangle]
pub unsafe extern "C" fn abpre_buffer_data(buf: *const AbpreBuffer) -> *const u8 {
    buf.as_ref().map_or(ptr::null(), |b| b.bytes.as_ptr())
}

/// # Safety
/// `buf` must be a live buffer returned by this library.
#[no_mangle]
pub unsafe extern "C" fn abpre_buffer_len(buf: *const AbpreBuffer) -> usize {
    buf.as_ref().map_or(0, |b| b.bytes.len())
}

/// # Safety
/// `buf` must be a buffer returned by this library and not be used
/// afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn abpre_buffer_free(buf: *mut AbpreBuffer) {
    if !buf.is_null() {
        drop(Box::from_raw(buf));
    }
}

unsafe fn setup_with(
    suite: SuiteParams,
    universe: *const c_char,
    r: *mut AbpreRng,
    out_pk: *mut *mut AbpreBuffer,
    out_msk: *mut *mut AbpreBuffer,
) -> Result<(), Failure> {
    check_out(out_pk, "out_pk")?;
    check_out(out_msk, "out_msk")?;
    let universe = workflow::parse_universe(text(universe, "universe")?);
    let (pk, msk) = workflow::setup(&suite, &universe, rng(r)?)?;
    emit(out_pk, pk, "out_pk")?;
    emit(out_msk, msk, "out_msk")
}

/// Setup on the discrete-log test backend. `universe` lists attributes
/// separated by commas or whitespace.
///
/// # Safety
/// Pointers must be valid; `universe` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn abpre_setup_mock(
    modulus: u64,
    g2_exponent: u64,
    universe: *const c_char,
    rng: *mut AbpreRng,
    out_pk: *mut *mut AbpreBuffer,
    out_msk: *mut *mut AbpreBuffer,
) -> AbpreStatus {
    guard(|| {
        let suite = SuiteParams::Mock {
            modulus,
            g2_exponent,
        };
        setup_with(suite, universe, rng, out_pk, out_msk)
    })
}

/// Setup on the pairing backend; `curve` may be null for BLS12-381.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn abpre_setup_pairing(
    curve: *const c_char,
    universe: *const c_char,
    rng: *mut AbpreRng,
    out_pk: *mut *mut AbpreBuffer,
    out_msk: *mut *mut AbpreBuffer,
) -> AbpreStatus {
    guard(|| {
        let curve = if curve.is_null() {
            abpre::group::DEFAULT_CURVE.to_string()
        } else {
            text(curve, "curve")?.to_string()
        };
        setup_with(SuiteParams::Pairing { curve }, universe, rng, out_pk, out_msk)
    })
}

/// # Safety
/// Pointers must be valid; `attrs` is a NUL-terminated comma-separated list.
#[no_mangle]
pub unsafe extern "C" fn abpre_keygen(
    pk: AbpreBytes,
    msk: AbpreBytes,
    attrs: *const c_char,
    rng: *mut AbpreRng,
    out_sk: *mut *mut AbpreBuffer,
) -> AbpreStatus {
    guard(|| {
        check_out(out_sk, "out_sk")?;
        let set = AttributeSet::parse_list(text(attrs, "attrs")?)?;
        let sk = workflow::keygen(bytes(pk, "pk")?, bytes(msk, "msk")?, &set, self::rng(rng)?)?;
        emit(out_sk, sk, "out_sk")
    })
}

/// Seals `payload` under `policy`.
///
/// # Safety
/// Pointers must be valid; `policy` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn abpre_encrypt(
    pk: AbpreBytes,
    policy: *const c_char,
    reencryptable: bool,
    payload: AbpreBytes,
    rng: *mut AbpreRng,
    out_ct: *mut *mut AbpreBuffer,
) -> AbpreStatus {
    guard(|| {
        check_out(out_ct, "out_ct")?;
        let ct = workflow::encrypt(
            bytes(pk, "pk")?,
            text(policy, "policy")?,
            reencryptable,
            bytes(payload, "payload")?,
            self::rng(rng)?,
        )?;
        emit(out_ct, ct, "out_ct")
    })
}

/// # Safety
/// Pointers must be valid; `delegatee_attrs` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn abpre_rkgen(
    pk: AbpreBytes,
    msk: AbpreBytes,
    sk: AbpreBytes,
    delegatee_attrs: *const c_char,
    rng: *mut AbpreRng,
    out_proxy: *mut *mut AbpreBuffer,
    out_delegatee: *mut *mut AbpreBuffer,
) -> AbpreStatus {
    guard(|| {
        check_out(out_proxy, "out_proxy")?;
        check_out(out_delegatee, "out_delegatee")?;
        let set = AttributeSet::parse_list(text(delegatee_attrs, "delegatee_attrs")?)?;
        let (rk, dk) = workflow::rkgen(
            bytes(pk, "pk")?,
            bytes(msk, "msk")?,
            bytes(sk, "sk")?,
            &set,
            self::rng(rng)?,
        )?;
        emit(out_proxy, rk, "out_proxy")?;
        emit(out_delegatee, dk, "out_delegatee")
    })
}

/// # Safety
/// Pointers must be valid; `policy2` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn abpre_reencrypt(
    pk: AbpreBytes,
    proxy_key: AbpreBytes,
    policy2: *const c_char,
    ct: AbpreBytes,
    rng: *mut AbpreRng,
    out_ct2: *mut *mut AbpreBuffer,
) -> AbpreStatus {
    guard(|| {
        check_out(out_ct2, "out_ct2")?;
        let ct2 = workflow::reencrypt(
            bytes(pk, "pk")?,
            bytes(proxy_key, "proxy_key")?,
            text(policy2, "policy2")?,
            bytes(ct, "ct")?,
            self::rng(rng)?,
        )?;
        emit(out_ct2, ct2, "out_ct2")
    })
}

/// Opens a sealed file with a secret key or a delegatee key.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn abpre_decrypt(
    pk: AbpreBytes,
    key: AbpreBytes,
    ct: AbpreBytes,
    out_payload: *mut *mut AbpreBuffer,
) -> AbpreStatus {
    guard(|| {
        check_out(out_payload, "out_payload")?;
        let payload = workflow::decrypt(bytes(pk, "pk")?, bytes(key, "key")?, bytes(ct, "ct")?)?;
        emit(out_payload, payload, "out_payload")
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn abpre_transform_keygen(
    delegatee_key: AbpreBytes,
    rng: *mut AbpreRng,
    out_tk: *mut *mut AbpreBuffer,
    out_z: *mut *mut AbpreBuffer,
) -> AbpreStatus {
    guard(|| {
        check_out(out_tk, "out_tk")?;
        check_out(out_z, "out_z")?;
        let (tk, z) =
            workflow::transform_keygen(bytes(delegatee_key, "delegatee_key")?, self::rng(rng)?)?;
        emit(out_tk, tk, "out_tk")?;
        emit(out_z, z, "out_z")
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn abpre_transform(
    pk: AbpreBytes,
    tk: AbpreBytes,
    ct2: AbpreBytes,
    out_partial: *mut *mut AbpreBuffer,
) -> AbpreStatus {
    guard(|| {
        check_out(out_partial, "out_partial")?;
        let pd = workflow::transform(bytes(pk, "pk")?, bytes(tk, "tk")?, bytes(ct2, "ct2")?)?;
        emit(out_partial, pd, "out_partial")
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn abpre_finish(
    z: AbpreBytes,
    partial: AbpreBytes,
    ct2: AbpreBytes,
    out_payload: *mut *mut AbpreBuffer,
) -> AbpreStatus {
    guard(|| {
        check_out(out_payload, "out_payload")?;
        let payload =
            workflow::finish(bytes(z, "z")?, bytes(partial, "partial")?, bytes(ct2, "ct2")?)?;
        emit(out_payload, payload, "out_payload")
    })
}

/// Compiles `policy` and optionally tests `attrs` (null to skip).
/// `*out_satisfied` is 1, 0, or -1 when no attributes were given;
/// `out_report` receives the text report.
///
/// # Safety
/// Pointers must be valid; strings NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn abpre_policy_check(
    policy: *const c_char,
    attrs: *const c_char,
    out_satisfied: *mut i32,
    out_report: *mut *mut AbpreBuffer,
) -> AbpreStatus {
    guard(|| {
        check_out(out_report, "out_report")?;
        if out_satisfied.is_null() {
            return Err(null("out_satisfied"));
        }
        let set = if attrs.is_null() {
            None
        } else {
            Some(AttributeSet::parse_list(text(attrs, "attrs")?)?)
        };
        let report = policy_explain(text(policy, "policy")?, set.as_ref())?;
        *out_satisfied = report.satisfied().map_or(-1, i32::from);
        emit(out_report, report.to_string().into_bytes(), "out_report")
    })
}
