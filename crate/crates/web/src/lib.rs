//! Browser bindings: two-comb spectrum, side-band suppression versus the ring-2
//! heater, and coupler isolation versus length. Inputs are device JSON documents
//! (m, Hz); outputs are flat `Float64Array`s of interleaved columns.

use std::f64::consts::PI;

use wasm_bindgen::prelude::*;

use nlring::config::DeviceDoc;
use nlring::design::{select_process, DesignGoal};
use nlring::enhancement::{intensity_spectrum, SpectrumOptions};
use nlring::linear_cmt::isolation_db;
use nlring::sfwm::{sideband_detuning_on, suppression_factor};
use nlring::Band;

const DEFAULT_DEVICE: &str = include_str!("../../../devices/designed.json");

fn parse(device_json: &str) -> Result<DeviceDoc, String> {
    DeviceDoc::from_json(device_json).map_err(|e| e.to_string())
}

fn grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, String> {
    if points < 2 || hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return Err("need at least 2 points and lo < hi".into());
    }
    Ok((0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect())
}

/// Rows of (frequency Hz, |f₁|², |f₂|²).
pub fn spectrum_rows(device_json: &str, lo_hz: f64, hi_hz: f64, points: usize) -> Result<Vec<f64>, String> {
    let spec = parse(device_json)?.to_spec().map_err(|e| e.to_string())?;
    let band = Band::new(2.0 * PI * lo_hz, 2.0 * PI * hi_hz).map_err(|e| e.to_string())?;
    let opts = SpectrumOptions { n_points: points, include_centers: true };
    let s = intensity_spectrum(&spec, band, opts).map_err(|e| e.to_string())?;
    Ok(s.rows.iter().flat_map(|r| [r.omega / (2.0 * PI), r.f1_sq, r.f2_sq]).collect())
}

/// Rows of (ring-2 heater shift Hz, suppression for pump 1, for pump 2).
pub fn heater_rows(
    device_json: &str,
    signal_nm: f64,
    pump_separation: u32,
    lo_hz: f64,
    hi_hz: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let doc = parse(device_json)?;
    let goal = DesignGoal::new(signal_nm * 1e-9, pump_separation, 0.5);
    let mut out = Vec::with_capacity(3 * points);
    for shift in grid(lo_hz, hi_hz, points)? {
        let spec = doc.with("ring2.heater_shift", shift).and_then(|d| d.to_spec()).map_err(|e| e.to_string())?;
        let cfg = select_process(&spec, &goal).map_err(|e| e.to_string())?;
        let sb = sideband_detuning_on(&spec, &cfg).map_err(|e| e.to_string())?;
        out.push(shift);
        for d in sb.delta {
            out.push(suppression_factor(d, cfg.res_s.linewidth).map_err(|e| e.to_string())?);
        }
    }
    Ok(out)
}

/// Rows of (coupler length m, isolation dB) from zero to `max_len`.
pub fn isolation_rows(device_json: &str, max_len: f64, points: usize) -> Result<Vec<f64>, String> {
    let spec = parse(device_json)?.to_spec().map_err(|e| e.to_string())?;
    let k = spec.kappa();
    Ok(grid(0.0, max_len, points)?.into_iter().flat_map(|l| [l, isolation_db(k, l)]).collect())
}

#[wasm_bindgen(js_name = defaultDevice)]
pub fn default_device() -> String {
    DEFAULT_DEVICE.to_string()
}

#[wasm_bindgen]
pub fn spectrum(device_json: &str, lo_hz: f64, hi_hz: f64, points: usize) -> Result<Vec<f64>, JsError> {
    spectrum_rows(device_json, lo_hz, hi_hz, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = heaterScan)]
pub fn heater_scan(
    device_json: &str,
    signal_nm: f64,
    pump_separation: u32,
    lo_hz: f64,
    hi_hz: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    heater_rows(device_json, signal_nm, pump_separation, lo_hz, hi_hz, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = dcIsolation)]
pub fn dc_isolation(device_json: &str, max_len: f64, points: usize) -> Result<Vec<f64>, JsError> {
    isolation_rows(device_json, max_len, points).map_err(|e| JsError::new(&e))
}
