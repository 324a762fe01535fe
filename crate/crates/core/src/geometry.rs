//! Device description, waveguide dispersion and the resonance comb of each racetrack.
//!
//! Each racetrack is two straight sections of length `straight_len` joined by two
//! half-circle bends of radius `bend_radius`, so its round-trip length is
//! `2 (straight_len + π R)`. One straight section of each ring forms an arm of the
//! directional coupler. The two combs are computed from their own ring alone; nothing
//! in ring 2 enters the comb of ring 1 and vice versa.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::consts::{C, TWO_PI};
use crate::error::{ensure, Error, Result};

/// Effective-index model and nonlinear material constants of the (shared) waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideParams {
    /// Effective index at `omega_ref`.
    pub n_eff_ref: f64,
    /// Group index at `omega_ref`.
    pub n_g: f64,
    /// Reference angular frequency, rad/s.
    pub omega_ref: f64,
    /// Group-velocity dispersion d²k/dω² at `omega_ref`, s²/m.
    pub gvd: Option<f64>,
    /// Nonlinear parameter γ, 1/(W·m).
    pub gamma_nl: f64,
    /// Typical third-order susceptibility, m²/V².
    pub chi3_bar: f64,
    /// Typical refractive index entering the χ³ normalisation.
    pub n_bar: f64,
    /// Effective area of the nonlinear interaction, m².
    pub area_eff: f64,
}

impl WaveguideParams {
    pub fn validate(&self) -> Result<()> {
        ensure(self.n_eff_ref > 1.0, || {
            format!("n_eff_ref must exceed 1, got {}", self.n_eff_ref)
        })?;
        ensure(self.n_g >= self.n_eff_ref, || {
            format!("n_g ({}) must be >= n_eff_ref ({})", self.n_g, self.n_eff_ref)
        })?;
        ensure(self.omega_ref > 0.0, || "omega_ref must be positive".into())?;
        ensure(self.area_eff > 0.0, || "area_eff must be positive".into())?;
        ensure(self.gamma_nl >= 0.0, || "gamma_nl must be non-negative".into())?;
        ensure(self.n_bar > 0.0, || "n_bar must be positive".into())?;
        ensure(self.gvd.is_none_or(f64::is_finite), || "gvd must be finite".into())?;
        Ok(())
    }

    /// Group velocity c/n_g used by the field-enhancement and rate models.
    pub fn group_velocity(&self) -> f64 {
        C / self.n_g
    }
}

/// Which of the two racetracks a quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingId {
    One,
    Two,
}

impl RingId {
    pub fn index(self) -> u8 {
        match self {
            RingId::One => 1,
            RingId::Two => 2,
        }
    }
}

impl Serialize for RingId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.index())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RacetrackSpec {
    /// Length of each straight section, m.
    pub straight_len: f64,
    pub bend_radius: f64,
    /// Intrinsic (scattering-limited) quality factor.
    pub q_intrinsic: f64,
    /// Bus-coupling quality factor.
    pub q_coupling: f64,
    /// Rigid shift of the whole comb, rad/s (heater trim).
    pub heater_shift: f64,
}

impl RacetrackSpec {
    pub fn validate(&self) -> Result<()> {
        ensure(self.straight_len >= 0.0, || "straight_len must be non-negative".into())?;
        ensure(self.bend_radius > 0.0, || "bend_radius must be positive".into())?;
        ensure(self.q_intrinsic > 0.0, || "q_intrinsic must be positive".into())?;
        ensure(self.q_coupling > 0.0, || "q_coupling must be positive".into())?;
        ensure(self.heater_shift.is_finite(), || "heater_shift must be finite".into())?;
        Ok(())
    }

    /// Round-trip length 2(straight_len + πR).
    pub fn total_length(&self) -> f64 {
        2.0 * (self.straight_len + PI * self.bend_radius)
    }

    /// Loaded quality factor (1/Q_i + 1/Q_c)⁻¹.
    pub fn loaded_q(&self) -> f64 {
        1.0 / (1.0 / self.q_intrinsic + 1.0 / self.q_coupling)
    }
}

/// Exponential evanescent model |κ|(d) = κ₀ exp(−(d − d_ref)/ℓ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingModel {
    pub kappa0: f64,
    pub gap_ref: f64,
    pub decay_len: f64,
    /// Phase of the complex coupling constant, rad.
    pub phase: f64,
}

impl CouplingModel {
    pub fn validate(&self) -> Result<()> {
        ensure(self.kappa0 >= 0.0, || "kappa0 must be non-negative".into())?;
        ensure(self.decay_len > 0.0, || "decay_len must be positive".into())?;
        ensure(self.phase.is_finite(), || "phase must be finite".into())?;
        Ok(())
    }

    pub fn kappa_abs(&self, gap: f64) -> f64 {
        self.kappa0 * (-(gap - self.gap_ref) / self.decay_len).exp()
    }

    pub fn kappa(&self, gap: f64) -> Complex64 {
        Complex64::from_polar(self.kappa_abs(gap), self.phase)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub waveguide: WaveguideParams,
    pub ring1: RacetrackSpec,
    pub ring2: RacetrackSpec,
    /// Directional-coupler length L, m.
    pub dc_length: f64,
    /// Directional-coupler gap d, m.
    pub dc_gap: f64,
    pub kappa_model: CouplingModel,
}

impl DeviceSpec {
    pub fn validate(&self) -> Result<()> {
        self.waveguide.validate()?;
        self.ring1.validate()?;
        self.ring2.validate()?;
        self.kappa_model.validate()?;
        ensure(self.dc_length > 0.0, || "dc_length must be positive".into())?;
        ensure(self.dc_gap > 0.0, || "dc_gap must be positive".into())?;
        let shortest = self.ring1.straight_len.min(self.ring2.straight_len);
        ensure(self.dc_length <= shortest, || {
            format!(
                "dc_length {:e} m exceeds the shortest straight section {:e} m",
                self.dc_length, shortest
            )
        })?;
        Ok(())
    }

    pub fn ring(&self, id: RingId) -> &RacetrackSpec {
        match id {
            RingId::One => &self.ring1,
            RingId::Two => &self.ring2,
        }
    }

    pub fn ring_mut(&mut self, id: RingId) -> &mut RacetrackSpec {
        match id {
            RingId::One => &mut self.ring1,
            RingId::Two => &mut self.ring2,
        }
    }

    /// Complex coupling constant at the device gap.
    pub fn kappa(&self) -> Complex64 {
        self.kappa_model.kappa(self.dc_gap)
    }

    pub fn comb(&self, id: RingId, band: Band) -> Result<Vec<Resonance>> {
        resonance_comb(self.ring(id), &self.waveguide, band, id)
    }
}

/// A closed angular-frequency window `[lo, hi]`, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        ensure(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo, || {
            format!("band must satisfy 0 < lo < hi, got [{lo:e}, {hi:e}]")
        })?;
        Ok(Band { lo, hi })
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.lo && omega <= self.hi
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
    pub owner: RingId,
    /// Longitudinal mode number m.
    pub order: i64,
    /// Center angular frequency including the heater shift, rad/s.
    pub omega0: f64,
    pub q_loaded: f64,
    pub q_coupling: f64,
    /// Full width at half maximum Δ = ω₀/Q, rad/s.
    pub linewidth: f64,
}

/// n_eff(ω) = n₀ + (n_g − n₀)(ω − ω₀)/ω₀ + c·β₂(ω − ω₀)²/(2ω).
///
/// The quadratic term leaves n_eff and the group index untouched at ω₀ and gives
/// d²k/dω² = β₂ there.
pub fn effective_index(wg: &WaveguideParams, omega: f64) -> f64 {
    let x = omega - wg.omega_ref;
    let mut n = wg.n_eff_ref + (wg.n_g - wg.n_eff_ref) * x / wg.omega_ref;
    if let Some(gvd) = wg.gvd {
        n += C * gvd * x * x / (2.0 * omega);
    }
    n
}

/// Group index d(ω n_eff)/dω of the model in [`effective_index`].
pub fn group_index(wg: &WaveguideParams, omega: f64) -> f64 {
    let x = omega - wg.omega_ref;
    let mut ng = wg.n_eff_ref + (wg.n_g - wg.n_eff_ref) * (2.0 * omega - wg.omega_ref) / wg.omega_ref;
    if let Some(gvd) = wg.gvd {
        ng += C * gvd * x;
    }
    ng
}

/// Propagation constant k(ω) = ω n_eff(ω)/c, 1/m.
pub fn propagation_constant(wg: &WaveguideParams, omega: f64) -> f64 {
    omega * effective_index(wg, omega) / C
}

/// Round-trip phase k(ω)·𝓛 of the unshifted ring.
pub fn round_trip_phase(ring: &RacetrackSpec, wg: &WaveguideParams, omega: f64) -> f64 {
    propagation_constant(wg, omega) * ring.total_length()
}

/// Local free spectral range 2πc/(n_g(ω) 𝓛), rad/s.
pub fn fsr(ring: &RacetrackSpec, wg: &WaveguideParams, omega: f64) -> f64 {
    TWO_PI * C / (group_index(wg, omega) * ring.total_length())
}

/// Finesse FSR/Δ at `omega` for the ring's loaded Q.
pub fn finesse(ring: &RacetrackSpec, wg: &WaveguideParams, omega: f64) -> f64 {
    fsr(ring, wg, omega) * ring.loaded_q() / omega
}

const MAX_NEWTON_ITERS: usize = 200;

/// Solves φ(ω) = 2πm inside `[a, b]` with a bracketed Newton iteration.
fn solve_order(ring: &RacetrackSpec, wg: &WaveguideParams, order: i64, mut a: f64, mut b: f64) -> Result<f64> {
    let target = TWO_PI * order as f64;
    let length = ring.total_length();
    let residual = |w: f64| round_trip_phase(ring, wg, w) - target;

    let (ra, rb) = (residual(a), residual(b));
    if ra > 0.0 || rb < 0.0 {
        return Err(Error::NoConvergence { order });
    }
    let mut w = a + (b - a) * (-ra) / (rb - ra);
    for _ in 0..MAX_NEWTON_ITERS {
        let r = residual(w);
        if r == 0.0 {
            return Ok(w);
        }
        if r < 0.0 {
            a = w;
        } else {
            b = w;
        }
        let slope = group_index(wg, w) * length / C;
        let mut next = w - r / slope;
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        let step = (next - w).abs();
        w = next;
        if step <= 1e-14 * w {
            // One polishing step; Newton is quadratically convergent here.
            let r = residual(w);
            let polished = w - r / (group_index(wg, w) * length / C);
            return Ok(if polished > a && polished < b { polished } else { w });
        }
    }
    Err(Error::NoConvergence { order })
}

/// All resonances of `ring` whose shifted center lies in `band`, sorted by frequency.
///
/// Each center solves n_eff(ω) ω 𝓛 / c = 2πm and is then moved by `heater_shift`.
pub fn resonance_comb(ring: &RacetrackSpec, wg: &WaveguideParams, band: Band, owner: RingId) -> Result<Vec<Resonance>> {
    ring.validate()?;
    wg.validate()?;
    let lo = band.lo - ring.heater_shift;
    let hi = band.hi - ring.heater_shift;
    ensure(lo > 0.0, || "heater shift moves the band below zero frequency".into())?;
    // The group index is affine in ω, so positivity at both ends keeps φ(ω) monotone.
    ensure(group_index(wg, lo) > 0.0 && group_index(wg, hi) > 0.0, || {
        format!("band [{lo:e}, {hi:e}] rad/s lies outside the dispersion model's validity")
    })?;

    let phase_lo = round_trip_phase(ring, wg, lo);
    let phase_hi = round_trip_phase(ring, wg, hi);
    let m_lo = (phase_lo / TWO_PI).ceil() as i64;
    let m_hi = (phase_hi / TWO_PI).floor() as i64;
    if m_lo > m_hi {
        return Err(Error::EmptyBand {
            ring: owner.index(),
            lo: band.lo,
            hi: band.hi,
        });
    }

    let q_loaded = ring.loaded_q();
    (m_lo..=m_hi)
        .map(|order| {
            let root = solve_order(ring, wg, order, lo, hi)?;
            let omega0 = root + ring.heater_shift;
            Ok(Resonance {
                owner,
                order,
                omega0,
                q_loaded,
                q_coupling: ring.q_coupling,
                linewidth: omega0 / q_loaded,
            })
        })
        .collect()
}

/// The single resonance of longitudinal order `order`.
pub fn resonance_at_order(ring: &RacetrackSpec, wg: &WaveguideParams, order: i64, owner: RingId) -> Result<Resonance> {
    ensure(order > 0, || format!("mode order must be positive, got {order}"))?;
    let target = TWO_PI * order as f64;
    // Start from the reference point and widen until the phase brackets the target.
    let guess = wg.omega_ref * target / round_trip_phase(ring, wg, wg.omega_ref);
    let (mut a, mut b) = (0.95 * guess, 1.05 * guess);
    for _ in 0..8 {
        let ok_a = round_trip_phase(ring, wg, a) <= target;
        let ok_b = round_trip_phase(ring, wg, b) >= target;
        if ok_a && ok_b {
            break;
        }
        if !ok_a {
            a *= 0.9;
        }
        if !ok_b {
            b *= 1.1;
        }
    }
    ensure(group_index(wg, a) > 0.0 && group_index(wg, b) > 0.0, || {
        format!("order {order} lies outside the dispersion model's validity")
    })?;
    let root = solve_order(ring, wg, order, a, b)?;
    let omega0 = root + ring.heater_shift;
    let q_loaded = ring.loaded_q();
    Ok(Resonance {
        owner,
        order,
        omega0,
        q_loaded,
        q_coupling: ring.q_coupling,
        linewidth: omega0 / q_loaded,
    })
}

/// Resonance of `comb` closest to `omega`.
pub fn nearest_resonance(comb: &[Resonance], omega: f64) -> Option<&Resonance> {
    comb.iter()
        .min_by(|a, b| (a.omega0 - omega).abs().total_cmp(&(b.omega0 - omega).abs()))
}
