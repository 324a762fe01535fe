#![allow(dead_code)]

use std::f64::consts::PI;

use nlring::consts::{C, TWO_PI};
use nlring::{CouplingModel, DeviceSpec, RacetrackSpec, WaveguideParams};

pub fn waveguide() -> WaveguideParams {
    WaveguideParams {
        n_eff_ref: 2.4,
        n_g: 4.2,
        omega_ref: TWO_PI * C / 1.55e-6,
        gvd: None,
        gamma_nl: 200.0,
        chi3_bar: 2.8e-19,
        n_bar: 3.48,
        area_eff: 0.1e-12,
    }
}

/// Waveguide with exactly uniform comb spacing.
pub fn flat_waveguide() -> WaveguideParams {
    let wg = waveguide();
    WaveguideParams {
        gvd: Some(-2.0 * (wg.n_g - wg.n_eff_ref) / (C * wg.omega_ref)),
        ..wg
    }
}

/// Racetrack with straight sections of πR and loaded Q `q` (critically coupled).
pub fn ring(r: f64, q: f64) -> RacetrackSpec {
    RacetrackSpec {
        straight_len: PI * r,
        bend_radius: r,
        q_intrinsic: 2.0 * q,
        q_coupling: 2.0 * q,
        heater_shift: 0.0,
    }
}

/// Two identical rings of radius `r`, coupler at the optimal length πR and
/// uncoupled at the reference gap.
pub fn device(r: f64, q: f64) -> DeviceSpec {
    let l = PI * r;
    DeviceSpec {
        waveguide: waveguide(),
        ring1: ring(r, q),
        ring2: ring(r, q),
        dc_length: l,
        dc_gap: 200e-9,
        kappa_model: CouplingModel {
            kappa0: PI / l,
            gap_ref: 200e-9,
            decay_len: 100e-9,
            phase: 0.0,
        },
    }
}
