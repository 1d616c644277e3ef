//! C ABI over `lax_density`.
//!
//! Every entry point returns an [`LdStatus`]; results come back through out
//! pointers. On failure `ld_last_error_message` describes the problem for
//! the calling thread. Objects are opaque handles released with their
//! matching `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lax_density::bethe::{sigma_bethe, solve_for_a, BetheSolution};
use lax_density::elliptic::NomeParameters;
use lax_density::exact::{domega_dphi, find_band_edge, omega_of_phi, sigma_exact};
use lax_density::lax::{lax_spectrum, Boundary, LaxMatrixSpec};
use lax_density::verify::{run_verification, VerifyConfig};
use lax_density::{modulus_from_a, Error};
use num_complex::Complex64;

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Pole = 3,
    Convergence = 4,
    Structure = 5,
    NotPositiveDefinite = 6,
    OnCut = 7,
    BufferTooSmall = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdBoundary {
    Open = 0,
    Periodic = 1,
}

/// Nome, modulus and complete elliptic integrals for one lattice constant.
pub struct LdParams(NomeParameters);

/// A solved integral equation.
pub struct LdBethe(BetheSolution);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LdModulus {
    pub a: f64,
    pub q: f64,
    pub k: f64,
    pub kprime: f64,
    pub big_k: f64,
    pub big_kprime: f64,
    pub big_e: f64,
    pub big_eprime: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LdBetheInfo {
    pub big_a: f64,
    pub a: f64,
    pub nodes: usize,
    pub min_pivot: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LdReport {
    pub a: f64,
    pub big_a: f64,
    pub omega0: f64,
    pub sup_sigma_diff: f64,
    pub sup_rho_diff: f64,
    pub cut_equation_residual: f64,
    pub derivative_representation_residual: f64,
    pub inverse_map_residual: f64,
    pub ks_distance_finite_n: f64,
    pub pass: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

struct Failure(LdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => LdStatus::Domain,
            Error::Pole(_) => LdStatus::Pole,
            Error::Convergence(_) => LdStatus::Convergence,
            Error::Structure(_) => LdStatus::Structure,
            Error::NotPositiveDefinite { .. } => LdStatus::NotPositiveDefinite,
            Error::OnCut(_) => LdStatus::OnCut,
        };
        Failure(status, e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(LdStatus::NullPointer, format!("{name} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> LdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            LdStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            LdStatus::Panic
        }
    }
}

unsafe fn write<T>(out: *mut T, name: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

unsafe fn borrow<'a, T>(handle: *const T, name: &str) -> Result<&'a T, Failure> {
    handle.as_ref().ok_or_else(|| null(name))
}

unsafe fn fill(out: *mut f64, capacity: usize, values: &[f64], name: &str) -> Result<(), Failure> {
    if values.len() > capacity {
        return Err(Failure(
            LdStatus::BufferTooSmall,
            format!("{name} needs {} slots, got {capacity}", values.len()),
        ));
    }
    if out.is_null() {
        return Err(null(name));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ld_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Builds the parameter set for lattice constant `a`. `series_epsilon <= 0`
/// selects the default truncation.
#[no_mangle]
pub unsafe extern "C" fn ld_params_new(
    a: f64,
    series_epsilon: f64,
    out: *mut *mut LdParams,
) -> LdStatus {
    guard(|| {
        let mut params = modulus_from_a(a)?;
        if series_epsilon > 0.0 {
            params = params.with_series_epsilon(series_epsilon)?;
        }
        write(out, "out", Box::into_raw(Box::new(LdParams(params))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ld_params_free(params: *mut LdParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ld_params_get(params: *const LdParams, out: *mut LdModulus) -> LdStatus {
    guard(|| {
        let p = &borrow(params, "params")?.0;
        let modulus = LdModulus {
            a: p.a,
            q: p.q,
            k: p.k,
            kprime: p.kprime,
            big_k: p.big_k,
            big_kprime: p.big_kprime,
            big_e: p.big_e,
            big_eprime: p.big_eprime,
        };
        write(out, "out", modulus)
    })
}

/// ω(φ) at complex φ = `phi_re + i·phi_im`.
#[no_mangle]
pub unsafe extern "C" fn ld_omega(
    params: *const LdParams,
    phi_re: f64,
    phi_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LdStatus {
    guard(|| {
        let w = omega_of_phi(Complex64::new(phi_re, phi_im), &borrow(params, "params")?.0)?;
        write(out_re, "out_re", w.re)?;
        write(out_im, "out_im", w.im)
    })
}

/// dω/dφ at complex φ.
#[no_mangle]
pub unsafe extern "C" fn ld_domega(
    params: *const LdParams,
    phi_re: f64,
    phi_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LdStatus {
    guard(|| {
        let d = domega_dphi(Complex64::new(phi_re, phi_im), &borrow(params, "params")?.0)?;
        write(out_re, "out_re", d.re)?;
        write(out_im, "out_im", d.im)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ld_band_edge(
    params: *const LdParams,
    phi_min: *mut f64,
    omega0: *mut f64,
) -> LdStatus {
    guard(|| {
        let edge = find_band_edge(&borrow(params, "params")?.0)?;
        write(phi_min, "phi_min", edge.phi_min)?;
        write(omega0, "omega0", edge.omega0)
    })
}

#[no_mangle]
pub unsafe extern "C" fn ld_sigma_exact(
    params: *const LdParams,
    omega: f64,
    out: *mut f64,
) -> LdStatus {
    guard(|| {
        let s = sigma_exact(omega, &borrow(params, "params")?.0)?;
        write(out, "out", s)
    })
}

/// Solves the integral equation on `nodes` Chebyshev nodes for lattice
/// constant `a`.
#[no_mangle]
pub unsafe extern "C" fn ld_bethe_solve(a: f64, nodes: usize, out: *mut *mut LdBethe) -> LdStatus {
    guard(|| {
        let solution = solve_for_a(a, nodes)?;
        write(out, "out", Box::into_raw(Box::new(LdBethe(solution))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ld_bethe_free(bethe: *mut LdBethe) {
    if !bethe.is_null() {
        drop(Box::from_raw(bethe));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ld_bethe_info(bethe: *const LdBethe, out: *mut LdBetheInfo) -> LdStatus {
    guard(|| {
        let s = &borrow(bethe, "bethe")?.0;
        let info = LdBetheInfo {
            big_a: s.big_a,
            a: s.a,
            nodes: s.nodes_n,
            min_pivot: s.min_pivot,
        };
        write(out, "out", info)
    })
}

/// Copies nodes and density values; both buffers need `info.nodes` slots.
#[no_mangle]
pub unsafe extern "C" fn ld_bethe_density(
    bethe: *const LdBethe,
    x: *mut f64,
    rho: *mut f64,
    capacity: usize,
) -> LdStatus {
    guard(|| {
        let s = &borrow(bethe, "bethe")?.0;
        fill(x, capacity, s.rho.nodes(), "x")?;
        fill(rho, capacity, s.rho.values(), "rho")
    })
}

#[no_mangle]
pub unsafe extern "C" fn ld_bethe_sigma(
    bethe: *const LdBethe,
    omega: f64,
    out: *mut f64,
) -> LdStatus {
    guard(|| {
        let s = &borrow(bethe, "bethe")?.0;
        write(out, "out", sigma_bethe(omega, s))
    })
}

/// Ascending eigenvalues of the `n × n` Lax matrix into `out[0..n]`.
#[no_mangle]
pub unsafe extern "C" fn ld_lax_eigenvalues(
    n: usize,
    a: f64,
    lambda: f64,
    boundary: LdBoundary,
    out: *mut f64,
    capacity: usize,
) -> LdStatus {
    guard(|| {
        if capacity < n {
            return Err(Failure(
                LdStatus::BufferTooSmall,
                format!("out needs {n} slots, got {capacity}"),
            ));
        }
        let boundary = match boundary {
            LdBoundary::Open => Boundary::Open,
            LdBoundary::Periodic => Boundary::Periodic,
        };
        let spectrum = lax_spectrum(&LaxMatrixSpec::new(n, a, lambda, boundary)?)?;
        fill(out, capacity, &spectrum.eigenvalues, "out")
    })
}

/// Runs the full comparison with default tolerances. `report` and `json`
/// may each be null; a non-null `json` receives a string to release with
/// `ld_string_free`.
#[no_mangle]
pub unsafe extern "C" fn ld_verify(
    a: f64,
    nodes: usize,
    matrix_n: usize,
    report: *mut LdReport,
    json: *mut *mut c_char,
) -> LdStatus {
    guard(|| {
        let config = VerifyConfig {
            nodes,
            matrix_n,
            ..VerifyConfig::default()
        };
        let r = run_verification(a, &config)?;
        if !report.is_null() {
            report.write(LdReport {
                a: r.a,
                big_a: r.big_a,
                omega0: r.omega0,
                sup_sigma_diff: r.sup_sigma_diff,
                sup_rho_diff: r.sup_rho_diff,
                cut_equation_residual: r.cut_equation_residual,
                derivative_representation_residual: r.derivative_representation_residual,
                inverse_map_residual: r.inverse_map_residual,
                ks_distance_finite_n: r.ks_distance_finite_n,
                pass: r.pass,
            });
        }
        if !json.is_null() {
            let text = CString::new(r.to_json()).map_err(|e| Failure(LdStatus::Structure, e.to_string()))?;
            json.write(text.into_raw());
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ld_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
