//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Everything here is a thin wrapper over plain functions so the numbers can
//! be tested natively.

use mismatch_qpt::circuit::{TauParams, TAU_COUNT};
use mismatch_qpt::fock::{BeamSplitter, ModeId, TwoPhotonState};
use mismatch_qpt::tomography::{ideal_cnot_chi, model_matrix, process_fidelity, reconstruct_chi, MATRIX_DIM};
use mismatch_qpt::wavepacket::Displacement;
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

fn tau_from(values: &[f64]) -> Result<TauParams, String> {
    TauParams::try_from(values.to_vec()).map_err(|e| e.to_string())
}

/// Coincidence probability behind a balanced beamsplitter when one of two
/// single photons is delayed by `delay`.
pub fn hom_coincidence(delay: f64) -> Result<f64, String> {
    let one = Complex64::new(1.0, 0.0);
    let (a, b) = (ModeId(0), ModeId(1));
    TwoPhotonState::product(2, &[(a, one)], &[(b, one)])
        .and_then(|s| s.apply_taubox(a, &Displacement::scalar(delay)))
        .and_then(|s| s.apply_beamsplitter(&BeamSplitter::new(a, b, 0.5)))
        .and_then(|s| s.outcome_probability(a, b))
        .map_err(|e| e.to_string())
}

/// Row-major 8×8 measurement matrix followed by the process fidelity.
pub fn gate_summary(tau: &[f64]) -> Result<Vec<f64>, String> {
    let tau = tau_from(tau)?;
    let m = model_matrix(&tau).map_err(|e| e.to_string())?;
    let chi = reconstruct_chi(&tau).map_err(|e| e.to_string())?;
    let f = process_fidelity(&chi, &ideal_cnot_chi()).map_err(|e| e.to_string())?;
    let mut out: Vec<f64> = m.entries().iter().flatten().copied().collect();
    out.push(f);
    Ok(out)
}

/// Process fidelity at `s·tau` for `points` evenly spaced s in [0, 1].
pub fn fidelity_curve(tau: &[f64], points: usize) -> Result<Vec<f64>, String> {
    let tau = tau_from(tau)?;
    let ideal = ideal_cnot_chi();
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let chi = reconstruct_chi(&tau.scaled(i as f64 / (n - 1) as f64)).map_err(|e| e.to_string())?;
            process_fidelity(&chi, &ideal).map_err(|e| e.to_string())
        })
        .collect()
}

#[wasm_bindgen(js_name = homCoincidence)]
pub fn hom_coincidence_js(delay: f64) -> Result<f64, JsError> {
    hom_coincidence(delay).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = gateSummary)]
pub fn gate_summary_js(tau: &[f64]) -> Result<Vec<f64>, JsError> {
    gate_summary(tau).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = fidelityCurve)]
pub fn fidelity_curve_js(tau: &[f64], points: usize) -> Result<Vec<f64>, JsError> {
    fidelity_curve(tau, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = tauCount)]
pub fn tau_count() -> usize {
    TAU_COUNT
}

#[wasm_bindgen(js_name = matrixDim)]
pub fn matrix_dim() -> usize {
    MATRIX_DIM
}
