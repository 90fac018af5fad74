//! C ABI for `mixoa`.
//!
//! Every fallible call returns a [`MixoaStatus`]; on failure the message is
//! available from [`mixoa_last_error`] on the same thread until the next
//! failing call. Arrays are opaque [`MixoaArray`] handles released with
//! [`mixoa_array_free`]; strings returned by the library are released with
//! [`mixoa_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mixoa::constructions::construct_recipe;
use mixoa::{bound_profile, select_recipe_with, Error, FactorSpec, LastRowRule, OrthogonalArray, RecipeOptions};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixoaStatus {
    Ok = 0,
    NullPointer = 1,
    Usage = 2,
    Overflow = 3,
    Capacity = 4,
    Unsupported = 5,
    Parse = 6,
    Mismatch = 7,
    InvalidGroup = 8,
    Catalog = 9,
    Internal = 10,
    Io = 11,
    InvalidUtf8 = 12,
    Panic = 13,
}

/// Which fill rule to use for the last row of a construction.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixoaLastRow {
    DigitSum = 0,
    Alternating = 1,
}

/// Opaque array handle.
pub struct MixoaArray {
    inner: OrthogonalArray,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    let c = CString::new(message).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> MixoaStatus {
    match err {
        Error::Usage(_) => MixoaStatus::Usage,
        Error::Overflow(_) => MixoaStatus::Overflow,
        Error::Capacity { .. } => MixoaStatus::Capacity,
        Error::UnsupportedCase(_) => MixoaStatus::Unsupported,
        Error::Parse { .. } => MixoaStatus::Parse,
        Error::Mismatch(_) => MixoaStatus::Mismatch,
        Error::InvalidGroup(_) => MixoaStatus::InvalidGroup,
        Error::Catalog { .. } => MixoaStatus::Catalog,
        Error::Internal(_) => MixoaStatus::Internal,
        Error::Io(_) => MixoaStatus::Io,
    }
}

fn fail(status: MixoaStatus, message: impl Into<String>) -> MixoaStatus {
    set_error(message);
    status
}

/// Runs `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (MixoaStatus, String)>) -> MixoaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MixoaStatus::Ok,
        Ok(Err((status, message))) => fail(status, message),
        Err(_) => fail(MixoaStatus::Panic, "internal panic"),
    }
}

fn lib_err(e: Error) -> (MixoaStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (MixoaStatus, String) {
    (MixoaStatus::NullPointer, format!("{what} is null"))
}

unsafe fn spec_from(orders: *const u64, k: usize) -> Result<FactorSpec, (MixoaStatus, String)> {
    if orders.is_null() {
        return Err(null("orders"));
    }
    let slice = std::slice::from_raw_parts(orders, k);
    FactorSpec::new(slice.to_vec()).map_err(lib_err)
}

unsafe fn array_ref<'a>(array: *const MixoaArray) -> Result<&'a OrthogonalArray, (MixoaStatus, String)> {
    array.as_ref().map(|a| &a.inner).ok_or_else(|| null("array"))
}

fn into_handle(array: OrthogonalArray) -> *mut MixoaArray {
    Box::into_raw(Box::new(MixoaArray { inner: array }))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mixoa_version() -> *const c_char {
    static VERSION: &str = concat!("mixoa ", env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Message of the last failure on this thread, or null if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mixoa_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Writes `L_1..L_k` into `levels_out` (room for `k` values) and the
/// threshold into `d_out`.
///
/// # Safety
/// `orders` must point to `k` values and `levels_out` to room for `k`.
#[no_mangle]
pub unsafe extern "C" fn mixoa_bounds(
    orders: *const u64,
    k: usize,
    levels_out: *mut u64,
    d_out: *mut usize,
) -> MixoaStatus {
    guard(|| {
        let spec = spec_from(orders, k)?;
        if levels_out.is_null() {
            return Err(null("levels_out"));
        }
        if d_out.is_null() {
            return Err(null("d_out"));
        }
        let profile = bound_profile(&spec).map_err(lib_err)?;
        let out = std::slice::from_raw_parts_mut(levels_out, k);
        for (slot, &l) in out.iter_mut().zip(&profile.levels) {
            *slot =
                u64::try_from(l).map_err(|_| (MixoaStatus::Overflow, format!("L = {l} does not fit in 64 bits")))?;
        }
        *d_out = profile.d;
        Ok(())
    })
}

/// Builds the strength `k - 1` array for `orders`.
///
/// # Safety
/// `orders` must point to `k` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mixoa_construct(
    orders: *const u64,
    k: usize,
    last_row: MixoaLastRow,
    out: *mut *mut MixoaArray,
) -> MixoaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let spec = spec_from(orders, k)?;
        let options = RecipeOptions {
            last_row: match last_row {
                MixoaLastRow::DigitSum => LastRowRule::DigitSum,
                MixoaLastRow::Alternating => LastRowRule::Alternating,
            },
            ..RecipeOptions::default()
        };
        let recipe = select_recipe_with(&spec, options).map_err(lib_err)?;
        let array = construct_recipe(&recipe).map_err(lib_err)?;
        *out = into_handle(array);
        Ok(())
    })
}

/// Parses the text array format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mixoa_array_parse(text: *const c_char, out: *mut *mut MixoaArray) -> MixoaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text).to_str().map_err(|e| (MixoaStatus::InvalidUtf8, e.to_string()))?;
        *out = into_handle(OrthogonalArray::parse_text(text).map_err(lib_err)?);
        Ok(())
    })
}

/// Renders the array in the text format. Free the result with
/// [`mixoa_string_free`].
///
/// # Safety
/// `array` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mixoa_array_to_text(array: *const MixoaArray, out: *mut *mut c_char) -> MixoaStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = array_ref(array)?.to_text();
        *out = CString::new(text).map_err(|e| (MixoaStatus::Internal, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn mixoa_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of factors, 0 for a null handle.
///
/// # Safety
/// `array` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mixoa_array_k(array: *const MixoaArray) -> usize {
    array.as_ref().map_or(0, |a| a.inner.k())
}

/// Number of runs, 0 for a null handle.
///
/// # Safety
/// `array` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mixoa_array_size(array: *const MixoaArray) -> usize {
    array.as_ref().map_or(0, |a| a.inner.size())
}

/// Symbol index of factor `factor` in run `run`.
///
/// # Safety
/// `array` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mixoa_array_entry(
    array: *const MixoaArray,
    factor: usize,
    run: usize,
    out: *mut usize,
) -> MixoaStatus {
    guard(|| {
        let a = array_ref(array)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if factor >= a.k() || run >= a.size() {
            return Err((
                MixoaStatus::Usage,
                format!("entry ({factor}, {run}) outside a {}x{} array", a.k(), a.size()),
            ));
        }
        *out = a.entry(factor, run);
        Ok(())
    })
}

/// Whether the array has strength `t`.
///
/// # Safety
/// `array` must be a live handle; `holds` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mixoa_verify_strength(array: *const MixoaArray, t: usize, holds: *mut bool) -> MixoaStatus {
    guard(|| {
        let a = array_ref(array)?;
        if holds.is_null() {
            return Err(null("holds"));
        }
        *holds = a.verify_strength(t).map_err(lib_err)?.holds;
        Ok(())
    })
}

/// Largest strength the array has, 0 for a null handle.
///
/// # Safety
/// `array` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn mixoa_max_strength(array: *const MixoaArray) -> usize {
    array.as_ref().map_or(0, |a| a.inner.max_strength())
}

/// Whether the counting function is constant on conjugacy classes of the
/// array's own factor groups.
///
/// # Safety
/// `array` must be a live handle; `holds` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mixoa_verify_conjugacy(array: *const MixoaArray, holds: *mut bool) -> MixoaStatus {
    guard(|| {
        let a = array_ref(array)?;
        if holds.is_null() {
            return Err(null("holds"));
        }
        *holds = a.verify_conjugacy_tags().map_err(lib_err)?.holds;
        Ok(())
    })
}

/// # Safety
/// `array` must come from this library, or be null. It must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn mixoa_array_free(array: *mut MixoaArray) {
    if !array.is_null() {
        drop(Box::from_raw(array));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_round_trip() {
        let orders = [6u64, 6, 6];
        let mut levels = [0u64; 3];
        let mut d = 0usize;
        let st = unsafe { mixoa_bounds(orders.as_ptr(), 3, levels.as_mut_ptr(), &mut d) };
        assert_eq!(st, MixoaStatus::Ok);
        assert_eq!(levels, [6, 36, 216]);
        assert_eq!(d, 3);
    }

    #[test]
    fn errors_set_message() {
        let orders = [1u64, 2];
        let mut levels = [0u64; 2];
        let mut d = 0usize;
        let st = unsafe { mixoa_bounds(orders.as_ptr(), 2, levels.as_mut_ptr(), &mut d) };
        assert_eq!(st, MixoaStatus::Usage);
        let msg = unsafe { CStr::from_ptr(mixoa_last_error()) }.to_str().unwrap();
        assert!(!msg.is_empty());
        assert_eq!(unsafe { mixoa_bounds(ptr::null(), 2, levels.as_mut_ptr(), &mut d) }, MixoaStatus::NullPointer);
    }
}
