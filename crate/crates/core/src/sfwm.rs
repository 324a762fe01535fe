//! Photon-pair rates for dual-pump generation and the single-pump side-band
//! processes that contaminate it.
//!
//! A pump at ω_P alone can create one photon at the signal line ω_S and a partner at
//! 2ω_P − ω_S. The partner is enhanced only if it lands on a ring-2 resonance: a
//! partner in a ring-1 mode gives a coupler overlap ∫ sin(2|κ|z) dz that vanishes
//! over a full uncoupling length. The mismatch δ = 2ω_P − ω_S − ω_S′ against the
//! nearest ring-2 line ω_S′ sets the suppression Δ²/(δ² + Δ²).

use std::f64::consts::PI;

use serde::Serialize;

use crate::consts::{C, EPS0, HBAR};
use crate::error::{ensure, Error, Result};
use crate::geometry::{fsr, Band, DeviceSpec, Resonance, RingId};
use crate::nonlinear::ProcessConfig;
use crate::quadrature::{integrate_real, MAX_SUBINTERVALS};
use crate::table::Table;

/// Half-width of the frequency window, in linewidths, kept around each Lorentzian.
pub const WINDOW_LINEWIDTHS: f64 = 50.0;

/// Pulse length used when converting a CW power to photons per pulse; rates per
/// second do not depend on it.
pub const REFERENCE_PULSE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PumpDrive {
    /// Mean photon number |α|² per pulse, per pump.
    pub photon_number: f64,
    /// Square-pulse duration ΔT, s.
    pub pulse_duration: f64,
    /// Ring–bus self-coupling σ; derived from the finesse when absent.
    pub self_coupling: Option<f64>,
}

impl PumpDrive {
    pub fn validate(&self) -> Result<()> {
        ensure(self.photon_number >= 0.0, || "photon number must be non-negative".into())?;
        ensure(self.pulse_duration > 0.0, || "pulse duration must be positive".into())?;
        if let Some(s) = self.self_coupling {
            ensure(s > 0.0 && s < 1.0, || format!("self coupling must lie in (0, 1), got {s}"))?;
        }
        Ok(())
    }

    /// Drive with the photon number carried by `power` during one pulse.
    pub fn from_power(power: f64, omega: f64, pulse_duration: f64) -> Self {
        PumpDrive {
            photon_number: power * pulse_duration / (HBAR * omega),
            pulse_duration,
            self_coupling: None,
        }
    }
}

/// Constants shared by every rate evaluation on one device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateModel {
    pub group_velocity: f64,
    pub sigma: f64,
    /// Lumped nonlinear strength 𝒦.
    pub kcal: f64,
}

impl RateModel {
    fn prefactor(&self, drive: &PumpDrive, pump_omega: f64) -> f64 {
        let alpha4 = drive.photon_number * drive.photon_number;
        let photon_energy = HBAR * pump_omega;
        alpha4 * photon_energy * photon_energy / drive.pulse_duration * 9.0 * PI.powi(3)
            / (2.0 * EPS0 * EPS0)
            * self.kcal
            / self.group_velocity.powi(4)
            * (2.0 / (1.0 - self.sigma)).powi(4)
    }
}

/// Δ²/(δ² + Δ²).
pub fn suppression_factor(delta: f64, linewidth: f64) -> Result<f64> {
    ensure(linewidth > 0.0, || "linewidth must be positive".into())?;
    Ok(linewidth * linewidth / (delta * delta + linewidth * linewidth))
}

fn check_narrow(res: &Resonance) -> Result<()> {
    if res.linewidth >= 1e-2 * res.omega0 {
        return Err(Error::AssumptionViolated(format!(
            "linewidth {:e} rad/s is not small against ω = {:e} rad/s",
            res.linewidth, res.omega0
        )));
    }
    Ok(())
}

/// Pairs per pulse from a pump at `pump_omega`, integrating the photon frequency
/// across the line `res` while its partner sits `delta` off its own resonance.
///
/// The slowly varying (2ω_P − ω)ω factor is kept inside the integral.
pub fn pair_rate_integral(drive: &PumpDrive, model: &RateModel, res: &Resonance, pump_omega: f64, delta: f64) -> Result<f64> {
    drive.validate()?;
    check_narrow(res)?;
    let gamma = 0.5 * res.linewidth;
    let center = res.omega0;
    let partner = 2.0 * pump_omega - center;
    ensure(partner > 0.0, || "partner frequency must be positive".into())?;

    // u = ω_c − ω; both Lorentzians normalised to 1 at their peaks.
    let kernel = |u: f64| {
        let l1 = gamma * gamma / (u * u + gamma * gamma);
        let v = u + delta;
        let l2 = gamma * gamma / (v * v + gamma * gamma);
        (1.0 + u / partner) * (1.0 - u / center) * l1 * l2
    };
    let window = WINDOW_LINEWIDTHS * res.linewidth;
    let lo = (-delta).min(0.0) - window;
    let hi = (-delta).max(0.0) + window;
    let estimate = PI / 4.0 * res.linewidth.powi(3) / (delta * delta + res.linewidth * res.linewidth);
    let (integral, _) = integrate_real(kernel, lo, hi, 1e-10 * estimate, MAX_SUBINTERVALS)?;

    Ok(model.prefactor(drive, pump_omega) * partner * center * integral)
}

/// Infinite-window closed form: prefactor · ω_c ω_partner · (π/4) Δ³/(δ² + Δ²), with
/// ω_partner the partner's resonance 2ω_P − ω_c − δ.
pub fn pair_rate_closed_form(drive: &PumpDrive, model: &RateModel, res: &Resonance, pump_omega: f64, delta: f64) -> f64 {
    let d = res.linewidth;
    let partner_line = 2.0 * pump_omega - res.omega0 - delta;
    model.prefactor(drive, pump_omega) * res.omega0 * partner_line * PI / 4.0 * d.powi(3) / (delta * delta + d * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SidebandDetuning {
    /// δ for the pump-1 and pump-2 single-pump processes, rad/s.
    pub delta: [f64; 2],
    pub partner: [Resonance; 2],
}

/// δ = 2ω_P − ω_S − ω_S′ for each pump, with ω_S′ the ring-2 line nearest the
/// energy-conserving partner frequency.
pub fn sideband_detuning(signal_comb: &[Resonance], cfg: &ProcessConfig) -> Result<SidebandDetuning> {
    ensure(signal_comb.iter().all(|r| r.owner == RingId::Two), || {
        "side-band partners are looked up on the ring-2 comb".into()
    })?;
    let s = cfg.res_s.omega0;
    let mut out = [cfg.res_s; 2];
    let mut delta = [0.0; 2];
    for (i, pump) in [cfg.res_p1.omega0, cfg.res_p2.omega0].into_iter().enumerate() {
        let target = 2.0 * pump - s;
        let below = signal_comb.iter().rev().find(|r| r.omega0 <= target);
        let above = signal_comb.iter().find(|r| r.omega0 >= target);
        let (below, above) = match (below, above) {
            (Some(b), Some(a)) => (b, a),
            _ => {
                return Err(Error::MissingResonance(format!(
                    "no ring-2 lines bracket the pump-{} partner at {target:e} rad/s",
                    i + 1
                )))
            }
        };
        let nearest = if target - below.omega0 <= above.omega0 - target { below } else { above };
        out[i] = *nearest;
        delta[i] = 2.0 * pump - s - nearest.omega0;
    }
    Ok(SidebandDetuning { delta, partner: out })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRateReport {
    /// Dual-pump pairs per pulse at ω_S.
    pub beta_sq_signal: f64,
    /// Single-pump pairs per pulse with one photon at ω_S, for pump 1 and pump 2.
    pub beta_sq_parasitic: [f64; 2],
    pub suppression: [f64; 2],
    /// 1 / (worst suppression).
    pub snr_improvement: f64,
    pub detuning_delta: [f64; 2],
    /// ω_P1 + ω_P2 − 2ω_S for the wanted process, rad/s.
    pub dual_pump_mismatch: f64,
    pub kcal: f64,
    pub sigma: f64,
    pub sigma_from_finesse: bool,
    pub warnings: Vec<String>,
}

/// σ from the high-finesse relation 1 − σ ≈ π/𝓕 at the signal line.
pub fn sigma_from_finesse(device: &DeviceSpec, res_s: &Resonance) -> Result<f64> {
    let finesse = fsr(&device.ring2, &device.waveguide, res_s.omega0) / res_s.linewidth;
    let sigma = 1.0 - PI / finesse;
    if sigma <= 0.0 {
        return Err(Error::NonPhysical(format!(
            "finesse {finesse:.3} is too low to define a self-coupling"
        )));
    }
    Ok(sigma)
}

fn resolve_sigma(device: &DeviceSpec, drive: &PumpDrive, res_s: &Resonance) -> Result<(f64, bool)> {
    match drive.self_coupling {
        Some(s) => Ok((s, false)),
        None => Ok((sigma_from_finesse(device, res_s)?, true)),
    }
}

/// Ring-2 comb wide enough to hold both side-band partners.
pub fn partner_comb(device: &DeviceSpec, cfg: &ProcessConfig) -> Result<Vec<Resonance>> {
    let s = cfg.res_s.omega0;
    let t1 = 2.0 * cfg.res_p1.omega0 - s;
    let t2 = 2.0 * cfg.res_p2.omega0 - s;
    let margin = 3.0 * fsr(&device.ring2, &device.waveguide, s);
    let band = Band::new(t1.min(t2).min(s) - margin, t1.max(t2).max(s) + margin)?;
    device.comb(RingId::Two, band)
}

/// [`sideband_detuning`] against the device's own ring-2 comb.
pub fn sideband_detuning_on(device: &DeviceSpec, cfg: &ProcessConfig) -> Result<SidebandDetuning> {
    sideband_detuning(&partner_comb(device, cfg)?, cfg)
}

pub fn noise_budget(device: &DeviceSpec, drive: &PumpDrive, cfg: &ProcessConfig, kcal: f64) -> Result<PairRateReport> {
    drive.validate()?;
    cfg.validate()?;
    let mut warnings = Vec::new();
    let (sigma, derived) = resolve_sigma(device, drive, &cfg.res_s)?;
    if derived {
        warnings.push("self coupling derived from finesse via 1 − σ = π/𝓕".to_string());
    }
    let model = RateModel {
        group_velocity: device.waveguide.group_velocity(),
        sigma,
        kcal,
    };

    let comb2 = partner_comb(device, cfg)?;
    let side = sideband_detuning(&comb2, cfg)?;
    let res_s = &cfg.res_s;
    let p1 = cfg.res_p1.omega0;
    let p2 = cfg.res_p2.omega0;
    let mismatch = p1 + p2 - 2.0 * res_s.omega0;

    let signal = pair_rate_integral(drive, &model, res_s, 0.5 * (p1 + p2), mismatch)?;
    let parasitic = [
        pair_rate_integral(drive, &model, res_s, p1, side.delta[0])?,
        pair_rate_integral(drive, &model, res_s, p2, side.delta[1])?,
    ];
    let suppression = [
        suppression_factor(side.delta[0], res_s.linewidth)?,
        suppression_factor(side.delta[1], res_s.linewidth)?,
    ];
    let worst = suppression[0].max(suppression[1]);

    Ok(PairRateReport {
        beta_sq_signal: signal,
        beta_sq_parasitic: parasitic,
        suppression,
        snr_improvement: 1.0 / worst,
        detuning_delta: side.delta,
        dual_pump_mismatch: mismatch,
        kcal,
        sigma,
        sigma_from_finesse: derived,
        warnings,
    })
}

/// Dual-pump pairs per second for a CW power `pump_power` in each pump.
pub fn pair_rate_per_second(device: &DeviceSpec, cfg: &ProcessConfig, pump_power: f64, kcal: f64, self_coupling: Option<f64>) -> Result<f64> {
    ensure(pump_power >= 0.0, || "pump power must be non-negative".into())?;
    let mean = 0.5 * (cfg.res_p1.omega0 + cfg.res_p2.omega0);
    let drive = PumpDrive {
        self_coupling,
        ..PumpDrive::from_power(pump_power, mean, REFERENCE_PULSE)
    };
    let (sigma, _) = resolve_sigma(device, &drive, &cfg.res_s)?;
    let model = RateModel {
        group_velocity: device.waveguide.group_velocity(),
        sigma,
        kcal,
    };
    let mismatch = cfg.res_p1.omega0 + cfg.res_p2.omega0 - 2.0 * cfg.res_s.omega0;
    Ok(pair_rate_integral(&drive, &model, &cfg.res_s, mean, mismatch)? / drive.pulse_duration)
}

/// 𝒦 that makes the device produce `target_rate` pairs/s at `pump_power` per pump.
pub fn calibrate_kcal(device: &DeviceSpec, cfg: &ProcessConfig, target_rate: f64, pump_power: f64) -> Result<f64> {
    ensure(target_rate > 0.0 && pump_power > 0.0, || "target rate and pump power must be positive".into())?;
    let unit = pair_rate_per_second(device, cfg, pump_power, 1.0, None)?;
    let kcal = target_rate / unit;
    if !(kcal.is_finite() && kcal > 0.0) {
        return Err(Error::NonPhysical(format!("calibration gave 𝒦 = {kcal:e}")));
    }
    Ok(kcal)
}

/// Table of suppression and rates against δ/Δ for the pump-1 side band.
pub fn suppression_sweep(device: &DeviceSpec, drive: &PumpDrive, cfg: &ProcessConfig, kcal: f64, max_ratio: f64, n: usize) -> Result<Table> {
    ensure(n >= 1, || "sweep needs at least one point".into())?;
    ensure(max_ratio >= 0.0, || "max ratio must be non-negative".into())?;
    let (sigma, _) = resolve_sigma(device, drive, &cfg.res_s)?;
    let model = RateModel {
        group_velocity: device.waveguide.group_velocity(),
        sigma,
        kcal,
    };
    let res_s = cfg.res_s;
    let p1 = cfg.res_p1.omega0;
    let mean = 0.5 * (p1 + cfg.res_p2.omega0);
    let signal = pair_rate_integral(drive, &model, &res_s, mean, 0.0)?;
    let ratios: Vec<f64> = (0..n)
        .map(|i| if n == 1 { 0.0 } else { max_ratio * i as f64 / (n - 1) as f64 })
        .collect();

    let row = |r: f64| -> Result<Vec<f64>> {
        let delta = r * res_s.linewidth;
        Ok(vec![
            r,
            suppression_factor(delta, res_s.linewidth)?,
            signal,
            pair_rate_integral(drive, &model, &res_s, p1, delta)?,
        ])
    };
    #[cfg(feature = "parallel")]
    let rows: Result<Vec<_>> = {
        use rayon::prelude::*;
        ratios.par_iter().map(|&r| row(r)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<_>> = ratios.iter().map(|&r| row(r)).collect();

    let mut table = Table::new(["delta_over_linewidth", "suppression", "signal_rate", "parasitic_rate"]);
    for r in rows? {
        table.push(r);
    }
    Ok(table)
}

/// Convenience: group velocity c/n_g of the device waveguide.
pub fn group_velocity(device: &DeviceSpec) -> f64 {
    C / device.waveguide.n_g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::fixtures::*;
    use crate::geometry::nearest_resonance;

    fn process(dev: &DeviceSpec, sep: i64) -> ProcessConfig {
        let band = band_around(&dev.waveguide, 0.02);
        let c1 = dev.comb(RingId::One, band).unwrap();
        let c2 = dev.comb(RingId::Two, band).unwrap();
        let centre = nearest_resonance(&c1, dev.waveguide.omega_ref).unwrap().order;
        let p1 = *c1.iter().find(|r| r.order == centre + sep / 2).unwrap();
        let p2 = *c1.iter().find(|r| r.order == centre - sep / 2).unwrap();
        let s = *nearest_resonance(&c2, 0.5 * (p1.omega0 + p2.omega0)).unwrap();
        ProcessConfig::on_resonance(p1, p2, s, 0.0)
    }

    fn dispersionless() -> DeviceSpec {
        let mut dev = device();
        dev.waveguide.n_g = dev.waveguide.n_eff_ref;
        dev
    }

    fn drive() -> PumpDrive {
        PumpDrive {
            photon_number: 1e6,
            pulse_duration: 1e-9,
            self_coupling: Some(0.99),
        }
    }

    fn model() -> RateModel {
        RateModel {
            group_velocity: C / 4.2,
            sigma: 0.99,
            kcal: 1.0,
        }
    }

    fn line() -> Resonance {
        let dev = device();
        process(&dev, 2).res_s
    }

    #[test]
    fn suppression_values() {
        assert_eq!(suppression_factor(0.0, 2.0).unwrap(), 1.0);
        assert_eq!(suppression_factor(2.0, 2.0).unwrap(), 0.5);
        let s = suppression_factor(150.0, 1.0).unwrap();
        assert!((s - 1.0 / (1.0 + 22500.0)).abs() < 1e-18);
        assert!(s < 1e-4);
        assert!(suppression_factor(1.0, 0.0).is_err());
        assert_eq!(suppression_factor(-3.0, 1.0).unwrap(), suppression_factor(3.0, 1.0).unwrap());
    }

    #[test]
    fn on_resonance_integral_matches_closed_form() {
        let res = line();
        let d = drive();
        let m = model();
        let q = pair_rate_integral(&d, &m, &res, res.omega0, 0.0).unwrap();
        let c = pair_rate_closed_form(&d, &m, &res, res.omega0, 0.0);
        assert!((q / c - 1.0).abs() < 5e-3);
    }

    #[test]
    fn detuned_integral_matches_closed_form() {
        let res = line();
        let q = pair_rate_integral(&drive(), &model(), &res, res.omega0, res.linewidth).unwrap();
        let c = pair_rate_closed_form(&drive(), &model(), &res, res.omega0, res.linewidth);
        assert!((q / c - 1.0).abs() < 5e-3);
    }

    #[test]
    fn trapezoid_oracle() {
        // brute-force trapezoid over the same window, independent of the adaptive rule
        let res = line();
        for delta_in_lw in [0.0, 3.0] {
            let delta = delta_in_lw * res.linewidth;
            let g = 0.5 * res.linewidth;
            let wp = res.omega0;
            let partner = 2.0 * wp - res.omega0;
            let lo = (-delta).min(0.0) - 50.0 * res.linewidth;
            let hi = (-delta).max(0.0) + 50.0 * res.linewidth;
            let n = 1_000_000;
            let h = (hi - lo) / n as f64;
            let f = |u: f64| {
                let w = res.omega0 - u;
                (2.0 * wp - w) * w / (partner * res.omega0) * g * g / (u * u + g * g) * g * g / ((u + delta).powi(2) + g * g)
            };
            let mut sum = 0.5 * (f(lo) + f(hi));
            for i in 1..n {
                sum += f(lo + h * i as f64);
            }
            let oracle = sum * h * model().prefactor(&drive(), wp) * partner * res.omega0;
            let q = pair_rate_integral(&drive(), &model(), &res, wp, delta).unwrap();
            assert!((q / oracle - 1.0).abs() < 1e-6, "{}", q / oracle);
        }
    }

    #[test]
    fn broad_line_rejected() {
        let mut res = line();
        res.linewidth = 0.05 * res.omega0;
        assert!(matches!(
            pair_rate_integral(&drive(), &model(), &res, res.omega0, 0.0),
            Err(Error::AssumptionViolated(_))
        ));
    }

    #[test]
    fn aligned_uniform_combs_have_zero_detuning() {
        let dev = dispersionless();
        let cfg = process(&dev, 2);
        let comb2 = partner_comb(&dev, &cfg).unwrap();
        let side = sideband_detuning(&comb2, &cfg).unwrap();
        for d in side.delta {
            assert!(d.abs() < 1e-6 * cfg.res_s.linewidth, "{d}");
        }
    }

    #[test]
    fn detuning_slope_under_partner_shift() {
        // Shift only the comb in which the partner is looked up: δ moves by −s.
        let dev = dispersionless();
        let cfg = process(&dev, 2);
        let base = sideband_detuning(&partner_comb(&dev, &cfg).unwrap(), &cfg).unwrap();
        let s = 7.0 * cfg.res_s.linewidth;
        let mut shifted = dev;
        shifted.ring2.heater_shift = s;
        let comb = partner_comb(&shifted, &cfg).unwrap();
        let moved = sideband_detuning(&comb, &cfg).unwrap();
        for i in 0..2 {
            assert!((moved.delta[i] - base.delta[i] + s).abs() < 1e-6 * s);
        }
    }

    #[test]
    fn detuning_needs_bracketing_lines() {
        let dev = dispersionless();
        let cfg = process(&dev, 2);
        let comb2 = partner_comb(&dev, &cfg).unwrap();
        let only_low: Vec<_> = comb2.iter().filter(|r| r.omega0 < cfg.res_s.omega0).copied().collect();
        assert!(matches!(sideband_detuning(&only_low, &cfg), Err(Error::MissingResonance(_))));
    }

    #[test]
    fn baseline_parasitic_equals_signal() {
        let dev = dispersionless();
        let cfg = process(&dev, 2);
        let rep = noise_budget(&dev, &drive(), &cfg, 1.0).unwrap();
        assert_eq!(rep.suppression, [1.0, 1.0]);
        assert_eq!(rep.snr_improvement, 1.0);
        for p in rep.beta_sq_parasitic {
            // frequency prefactors differ by O(FSR/ω)
            assert!((p / rep.beta_sq_signal - 1.0).abs() < 2e-2);
        }
        assert!(!rep.sigma_from_finesse);
    }

    #[test]
    fn offset_of_100_linewidths() {
        // finesse ≈ 690 so that 100 Δ stays below half an FSR
        let mut dev = dispersionless();
        for r in [&mut dev.ring1, &mut dev.ring2] {
            r.q_intrinsic *= 4.0;
            r.q_coupling *= 4.0;
        }
        let cfg = process(&dev, 2);
        let comb2 = partner_comb(&dev, &cfg).unwrap();
        let side = sideband_detuning(&comb2, &cfg).unwrap();
        // Move the pump-1 line so its partner misses by 100 Δ.
        let mut moved = cfg;
        moved.res_p1.omega0 += 50.0 * cfg.res_s.linewidth - 0.5 * side.delta[0];
        moved.omega3 = moved.res_p1.omega0;
        let side = sideband_detuning(&comb2, &moved).unwrap();
        let s = suppression_factor(side.delta[0], cfg.res_s.linewidth).unwrap();
        assert!((1.0 / s - 1e4).abs() / 1e4 < 1e-3);
    }

    #[test]
    fn zero_photons_zero_rates() {
        let dev = dispersionless();
        let cfg = process(&dev, 2);
        let d = PumpDrive {
            photon_number: 0.0,
            ..drive()
        };
        let rep = noise_budget(&dev, &d, &cfg, 1.0).unwrap();
        assert_eq!(rep.beta_sq_signal, 0.0);
        assert_eq!(rep.beta_sq_parasitic, [0.0, 0.0]);
    }

    #[test]
    fn sigma_default_is_flagged() {
        let dev = dispersionless();
        let cfg = process(&dev, 2);
        let d = PumpDrive {
            self_coupling: None,
            ..drive()
        };
        let rep = noise_budget(&dev, &d, &cfg, 1.0).unwrap();
        assert!(rep.sigma_from_finesse);
        assert_eq!(rep.warnings.len(), 1);
        assert!(rep.sigma > 0.9 && rep.sigma < 1.0);
    }

    #[test]
    fn calibration_round_trip() {
        let dev = device();
        let cfg = process(&dev, 2);
        let k = calibrate_kcal(&dev, &cfg, 1e6, 0.5e-3).unwrap();
        assert!(k > 0.0);
        let rate = pair_rate_per_second(&dev, &cfg, 0.5e-3, k, None).unwrap();
        assert!((rate / 1e6 - 1.0).abs() < 1e-9);
        let doubled = pair_rate_per_second(&dev, &cfg, 1e-3, k, None).unwrap();
        assert!((doubled / rate - 4.0).abs() < 1e-9);
        assert!(calibrate_kcal(&dev, &cfg, 0.0, 1e-3).is_err());
    }

    #[test]
    fn sweep_table_shape() {
        let dev = dispersionless();
        let cfg = process(&dev, 2);
        let t = suppression_sweep(&dev, &drive(), &cfg, 1.0, 10.0, 11).unwrap();
        assert_eq!(t.header, ["delta_over_linewidth", "suppression", "signal_rate", "parasitic_rate"]);
        assert_eq!(t.rows.len(), 11);
        for row in &t.rows {
            assert!((row[1] - 1.0 / (1.0 + row[0] * row[0])).abs() < 1e-15);
            assert!((row[3] / row[2] / row[1] - 1.0).abs() < 2e-2);
        }
        let single = suppression_sweep(&dev, &drive(), &cfg, 1.0, 10.0, 1).unwrap();
        assert_eq!(single.rows.len(), 1);
        assert_eq!(single.rows[0][0], 0.0);
    }
}
