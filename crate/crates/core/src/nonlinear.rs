//! Nonlinear coupling strength J of dual-pump four-wave mixing across the coupler.
//!
//! Only the coupler region is shared by pump modes (ring 1) and signal modes (ring 2),
//! so the overlap integral reduces to a one-dimensional integral over the coupler
//! length of the four slowly varying amplitudes, times the four resonant
//! enhancements and the scalar transverse factor χ̄₃/(n̄⁴𝒜).
//!
//! Two routes are provided: the closed form, valid at phase matching, and direct
//! adaptive quadrature of the z integral, valid for any Δk. The global phase of J is
//! convention-dependent and only |J| enters observable rates.

use num_complex::Complex64;
use serde::Serialize;

use crate::enhancement::{lorentzian, EnhancementProfile, DEFAULT_WINDOW_LINEWIDTHS};
use crate::error::{ensure, Error, Result};
use crate::geometry::{propagation_constant, DeviceSpec, Resonance, RingId, WaveguideParams};
use crate::linear_cmt::{solve_dc_fields, DcFields};
use crate::quadrature::{integrate, MAX_SUBINTERVALS};

/// Relative pump-Q mismatch tolerated by the closed form.
pub const PUMP_Q_TOLERANCE: f64 = 0.10;
/// Largest |Δk|·L for which the closed form is considered phase matched.
pub const PHASE_MATCH_LIMIT: f64 = std::f64::consts::PI / 10.0;
/// Relative ring-length mismatch tolerated by the single-ring comparison.
pub const RING_LENGTH_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AssumptionMode {
    /// Violations are reported as warnings.
    #[default]
    Lenient,
    /// Violations are errors.
    Strict,
}

/// Frequencies and resonances of one dual-pump process.
///
/// ω₁, ω₂ are the generated photons (ring 2), ω₃, ω₄ the pumps (ring 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProcessConfig {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub omega4: f64,
    pub res_p1: Resonance,
    pub res_p2: Resonance,
    pub res_s: Resonance,
    /// 2k(ω_S) − k(ω_P1) − k(ω_P2), 1/m.
    pub delta_k: f64,
}

impl ProcessConfig {
    pub fn on_resonance(res_p1: Resonance, res_p2: Resonance, res_s: Resonance, delta_k: f64) -> Self {
        ProcessConfig {
            omega1: res_s.omega0,
            omega2: res_s.omega0,
            omega3: res_p1.omega0,
            omega4: res_p2.omega0,
            res_p1,
            res_p2,
            res_s,
            delta_k,
        }
    }

    /// Checks resonance ownership; returns warnings for frequencies outside the
    /// single-Lorentzian window.
    pub fn validate(&self) -> Result<Vec<String>> {
        ensure(self.res_p1.owner == RingId::One && self.res_p2.owner == RingId::One, || {
            "pump resonances must belong to ring 1".into()
        })?;
        ensure(self.res_s.owner == RingId::Two, || "signal resonance must belong to ring 2".into())?;
        let mut warnings = Vec::new();
        let checks = [
            ("omega1", self.omega1, &self.res_s),
            ("omega2", self.omega2, &self.res_s),
            ("omega3", self.omega3, &self.res_p1),
            ("omega4", self.omega4, &self.res_p2),
        ];
        for (name, w, res) in checks {
            if (w - res.omega0).abs() > DEFAULT_WINDOW_LINEWIDTHS * res.linewidth {
                warnings.push(format!(
                    "{name} is more than {DEFAULT_WINDOW_LINEWIDTHS} linewidths from its resonance"
                ));
            }
        }
        Ok(warnings)
    }

    /// Same process with the two pumps exchanged.
    pub fn swap_pumps(&self) -> Self {
        ProcessConfig {
            omega3: self.omega4,
            omega4: self.omega3,
            res_p1: self.res_p2,
            res_p2: self.res_p1,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverlapResult {
    pub j_value: Complex64,
    /// Value of the coupler z integral, m.
    pub z_factor: Complex64,
    /// Product of the four normalised Lorentzians.
    pub enhancement_product: Complex64,
    pub method: Method,
    pub warnings: Vec<String>,
}

/// JSON form of an [`OverlapResult`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapReport {
    pub j_abs: f64,
    pub j_phase: f64,
    pub z_factor_abs: f64,
    pub enh_abs: f64,
    pub method: Method,
    pub warnings: Vec<String>,
}

impl OverlapResult {
    pub fn report(&self) -> OverlapReport {
        OverlapReport {
            j_abs: self.j_value.norm(),
            j_phase: self.j_value.arg(),
            z_factor_abs: self.z_factor.norm(),
            enh_abs: self.enhancement_product.norm(),
            method: self.method,
            warnings: self.warnings.clone(),
        }
    }
}

/// 2k(ω_S) − k(ω_P1) − k(ω_P2) from the waveguide dispersion model.
pub fn phase_mismatch(wg: &WaveguideParams, omega_s: f64, omega_p1: f64, omega_p2: f64) -> f64 {
    2.0 * propagation_constant(wg, omega_s) - propagation_constant(wg, omega_p1) - propagation_constant(wg, omega_p2)
}

/// Product of the four Lorentzian factors; modulus one only when every frequency
/// sits on its resonance.
pub fn enhancement_factor(cfg: &ProcessConfig) -> Complex64 {
    lorentzian(cfg.res_p1.omega0, cfg.res_p1.linewidth, cfg.omega3)
        * lorentzian(cfg.res_p2.omega0, cfg.res_p2.linewidth, cfg.omega4)
        * lorentzian(cfg.res_s.omega0, cfg.res_s.linewidth, cfg.omega1)
        * lorentzian(cfg.res_s.omega0, cfg.res_s.linewidth, cfg.omega2)
}

/// Σ_N A_N^IN(z)² A_N^OUT(z)² over the two coupler guides.
pub fn overlap_kernel(fields: &DcFields, z: f64) -> Complex64 {
    (1..=2u8)
        .map(|n| {
            let a_in = fields.input.amplitude(n, z);
            let a_out = fields.output.amplitude(n, z);
            a_in * a_in * a_out * a_out
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZOverlap {
    pub value: Complex64,
    pub error: f64,
    pub subintervals: usize,
}

/// ∫₀ᴸ Σ_N A_N^IN² A_N^OUT² e^{iΔk z} dz by adaptive Gauss–Kronrod.
///
/// At Δk = 0 and L = mπ/|κ| the modulus is L/4.
pub fn z_overlap_integral(kappa: Complex64, length: f64, delta_k: f64) -> Result<ZOverlap> {
    let fields = solve_dc_fields(kappa, length)?;
    let out = integrate(
        |z| overlap_kernel(&fields, z) * Complex64::from_polar(1.0, delta_k * z),
        0.0,
        length,
        1e-12 * length,
        MAX_SUBINTERVALS,
    )?;
    Ok(ZOverlap {
        value: out.value,
        error: out.error,
        subintervals: out.subintervals,
    })
}

/// χ̄₃/(n̄⁴𝒜), 1/V².
pub fn transverse_factor(wg: &WaveguideParams) -> f64 {
    wg.chi3_bar / (wg.n_bar.powi(4) * wg.area_eff)
}

/// 16 v_g² Q_P Q_S/(𝓛₁𝓛₂ ω_S √(ω_P1 ω_P2)) · Q_P Q_S/(Q_c,P Q_c,S).
///
/// Q_P and Q_c,P are the geometric means over the two pump resonances.
pub fn j_prefactor(device: &DeviceSpec, cfg: &ProcessConfig) -> f64 {
    let v_g = device.waveguide.group_velocity();
    let q_p = (cfg.res_p1.q_loaded * cfg.res_p2.q_loaded).sqrt();
    let qc_p = (cfg.res_p1.q_coupling * cfg.res_p2.q_coupling).sqrt();
    let q_s = cfg.res_s.q_loaded;
    let qc_s = cfg.res_s.q_coupling;
    let l1 = device.ring1.total_length();
    let l2 = device.ring2.total_length();
    let omega_s = cfg.res_s.omega0;
    16.0 * v_g * v_g * q_p * q_s / (l1 * l2 * omega_s * (cfg.res_p1.omega0 * cfg.res_p2.omega0).sqrt())
        * (q_p * q_s / (qc_p * qc_s))
}

fn flag(mode: AssumptionMode, warnings: &mut Vec<String>, msg: String) -> Result<()> {
    match mode {
        AssumptionMode::Strict => Err(Error::AssumptionViolated(msg)),
        AssumptionMode::Lenient => {
            warnings.push(msg);
            Ok(())
        }
    }
}

/// J from the phase-matched closed form.
pub fn j_closed_form(device: &DeviceSpec, cfg: &ProcessConfig, mode: AssumptionMode) -> Result<OverlapResult> {
    let mut warnings = cfg.validate()?;
    let q1 = cfg.res_p1.q_loaded;
    let q2 = cfg.res_p2.q_loaded;
    if (q1 - q2).abs() > PUMP_Q_TOLERANCE * q1.max(q2) {
        flag(mode, &mut warnings, format!("pump quality factors differ: {q1:e} vs {q2:e}"))?;
    }
    let dkl = cfg.delta_k.abs() * device.dc_length;
    if dkl >= PHASE_MATCH_LIMIT {
        flag(mode, &mut warnings, format!("|Δk|·L = {dkl:.3e} is not small against π/10"))?;
    }

    // Exact value of the coupler integral at Δk = 0, L = mπ/|κ|: modulus L/4 with
    // the phase −e^{−2i arg κ} carried by the kernel.
    let phase = -Complex64::from_polar(1.0, -2.0 * device.kappa_model.phase);
    let z_factor = phase * (0.25 * device.dc_length);
    let enhancement_product = enhancement_factor(cfg);
    let j_value = j_prefactor(device, cfg) * transverse_factor(&device.waveguide) * z_factor * enhancement_product;
    Ok(OverlapResult {
        j_value,
        z_factor,
        enhancement_product,
        method: Method::ClosedForm,
        warnings,
    })
}

/// J assembled from the four field enhancements and the numerically integrated
/// coupler overlap; no phase-matching restriction.
pub fn j_quadrature(device: &DeviceSpec, cfg: &ProcessConfig) -> Result<OverlapResult> {
    let warnings = cfg.validate()?;
    let wg = &device.waveguide;
    let p1 = EnhancementProfile::new(&cfg.res_p1, wg, &device.ring1);
    let p2 = EnhancementProfile::new(&cfg.res_p2, wg, &device.ring1);
    let s = EnhancementProfile::new(&cfg.res_s, wg, &device.ring2);
    let f = p1.at(cfg.omega3) * p2.at(cfg.omega4) * s.at(cfg.omega1) * s.at(cfg.omega2);

    let z = z_overlap_integral(device.kappa(), device.dc_length, cfg.delta_k)?;
    Ok(OverlapResult {
        j_value: f * z.value * transverse_factor(wg),
        z_factor: z.value,
        enhancement_product: enhancement_factor(cfg),
        method: Method::Quadrature,
        warnings,
    })
}

/// Reference J₀ of the same process in a single ring of length 𝓛₁ holding all four
/// modes, by quadrature of the unit-amplitude overlap over the full circumference.
pub fn j_single_ring(device: &DeviceSpec, cfg: &ProcessConfig) -> Result<OverlapResult> {
    let wg = &device.waveguide;
    let ring = &device.ring1;
    let length = ring.total_length();
    let f: Complex64 = [
        (&cfg.res_p1, cfg.omega3),
        (&cfg.res_p2, cfg.omega4),
        (&cfg.res_s, cfg.omega1),
        (&cfg.res_s, cfg.omega2),
    ]
    .iter()
    .map(|(res, w)| EnhancementProfile::new(res, wg, ring).at(*w))
    .product();
    let z = integrate(
        |x| Complex64::from_polar(1.0, cfg.delta_k * x),
        0.0,
        length,
        1e-12 * length,
        MAX_SUBINTERVALS,
    )?;
    Ok(OverlapResult {
        j_value: f * z.value * transverse_factor(wg),
        z_factor: z.value,
        enhancement_product: enhancement_factor(cfg),
        method: Method::Quadrature,
        warnings: Vec::new(),
    })
}

/// J/J₀ = L/(4𝓛) for rings of (nearly) equal length 𝓛.
pub fn j_single_ring_ratio(device: &DeviceSpec, _cfg: &ProcessConfig) -> Result<f64> {
    let l1 = device.ring1.total_length();
    let l2 = device.ring2.total_length();
    let mean = 0.5 * (l1 + l2);
    if (l1 - l2).abs() > RING_LENGTH_TOLERANCE * mean {
        return Err(Error::AssumptionViolated(format!(
            "ring lengths differ by more than 1%: {l1:e} m vs {l2:e} m"
        )));
    }
    Ok(device.dc_length / (4.0 * mean))
}
