//! Design rules and the small deterministic optimizer built on them.
//!
//! The flow is: pick the coupler gap so that L = mπ/|κ(d)|, pick the process
//! (pumps on ring 1 symmetric about a ring-2 signal line), then place ring 2 so
//! that 2ω_S = ω_P1 + ω_P2 while every single-pump side band misses the ring-2 comb.
//!
//! Once energy conservation is enforced, a rigid heater shift of either comb leaves
//! the side-band mismatch δ untouched: it is fixed by the difference of the two free
//! spectral ranges. Heater trim therefore only restores energy conservation;
//! reaching a suppression target that the as-drawn geometry misses requires the
//! fabrication mode, which also changes the ring-2 straight length.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::consts::{C, TWO_PI};
use crate::error::{ensure, Error, Result};
use crate::geometry::{
    finesse, fsr, group_index, nearest_resonance, resonance_at_order, Band, CouplingModel, DeviceSpec, RingId,
};
use crate::linear_cmt::{isolation_db, kerr_delta_beta, kerr_validity_metric, DEFAULT_KERR_THRESHOLD};
use crate::nonlinear::{j_closed_form, phase_mismatch, AssumptionMode, ProcessConfig, PHASE_MATCH_LIMIT};
use crate::sfwm::{noise_budget, sideband_detuning_on, suppression_factor, PairRateReport, PumpDrive};

/// Energy-conservation residual reached by the heater bisection, in signal linewidths.
pub const ENERGY_TOLERANCE: f64 = 1e-7;
/// Residual |ω_P1 + ω_P2 − 2ω_S| tolerated by the design rule, in signal linewidths.
pub const ENERGY_RULE_LINEWIDTHS: f64 = 1e-2;
pub const DEFAULT_MIN_ISOLATION_DB: f64 = 30.0;
/// Largest uncoupling order tried by [`optimize`].
pub const MAX_UNCOUPLING_ORDER: u32 = 8;
const SCAN_POINTS: usize = 400;
const GOLDEN_ITERS: usize = 100;
const BISECT_ITERS: usize = 200;

pub const XPM_MODEL_NOTE: &str = "XPM/SPM pull uses Δω = −v_g·γ·P·𝓕 on ring 1 and the pump's mean presence \
    L/(2𝓛₂) on ring 2; this conversion is a modelling choice, not a derived result";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapBudget {
    pub min_gap: f64,
    pub max_gap: f64,
}

impl GapBudget {
    pub fn validate(&self) -> Result<()> {
        ensure(self.min_gap > 0.0 && self.max_gap > self.min_gap, || {
            format!("gap budget must satisfy 0 < min < max, got [{:e}, {:e}]", self.min_gap, self.max_gap)
        })
    }
}

impl Default for GapBudget {
    fn default() -> Self {
        GapBudget { min_gap: 100e-9, max_gap: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TuningMode {
    /// Heater shift of ring 2 only.
    #[default]
    Trim,
    /// Ring-2 straight length, then heater shift.
    Fabrication,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignGoal {
    /// Vacuum wavelength near which the signal line is chosen, m.
    pub signal_wavelength: f64,
    /// Ring-1 FSRs between the two pumps; even.
    pub pump_separation: u32,
    pub min_parasitic_suppression: f64,
    pub max_kerr_metric: f64,
    pub gap_budget: GapBudget,
    /// CW power per pump, W.
    pub pump_power: f64,
    pub min_isolation_db: f64,
    pub mode: TuningMode,
    /// Lumped nonlinear strength used for the rate report.
    pub kcal: f64,
}

impl DesignGoal {
    pub fn new(signal_wavelength: f64, pump_separation: u32, min_parasitic_suppression: f64) -> Self {
        DesignGoal {
            signal_wavelength,
            pump_separation,
            min_parasitic_suppression,
            max_kerr_metric: DEFAULT_KERR_THRESHOLD,
            gap_budget: GapBudget::default(),
            pump_power: 1e-3,
            min_isolation_db: DEFAULT_MIN_ISOLATION_DB,
            mode: TuningMode::Trim,
            kcal: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.signal_wavelength > 0.0, || "signal wavelength must be positive".into())?;
        ensure(self.pump_separation >= 2 && self.pump_separation.is_multiple_of(2), || {
            format!("pump separation must be even and at least 2, got {}", self.pump_separation)
        })?;
        let s = self.min_parasitic_suppression;
        ensure(s > 0.0 && s < 1.0, || format!("suppression target must lie in (0, 1), got {s}"))?;
        ensure(self.max_kerr_metric > 0.0, || "Kerr limit must be positive".into())?;
        ensure(self.pump_power >= 0.0, || "pump power must be non-negative".into())?;
        ensure(self.kcal > 0.0, || "kcal must be positive".into())?;
        self.gap_budget.validate()
    }

    pub fn signal_omega(&self) -> f64 {
        TWO_PI * C / self.signal_wavelength
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalCoupler {
    pub dc_length: f64,
    /// Implied round-trip length 2(L + πR) = 4πR.
    pub ring_length: f64,
}

pub fn optimal_dc_length(bend_radius: f64) -> Result<OptimalCoupler> {
    ensure(bend_radius > 0.0, || "bend radius must be positive".into())?;
    let dc_length = PI * bend_radius;
    Ok(OptimalCoupler {
        dc_length,
        ring_length: 2.0 * (dc_length + PI * bend_radius),
    })
}

/// Gap d with |κ(d)|·L = mπ, bisected to machine precision inside the budget.
pub fn solve_gap_for_uncoupling(model: &CouplingModel, length: f64, m_order: u32, budget: &GapBudget) -> Result<f64> {
    model.validate()?;
    budget.validate()?;
    ensure(length > 0.0, || "coupler length must be positive".into())?;
    ensure(m_order >= 1, || "uncoupling order must be at least 1".into())?;
    let target = m_order as f64 * PI / length;
    let strongest = model.kappa_abs(budget.min_gap);
    let weakest = model.kappa_abs(budget.max_gap);
    if !(weakest <= target && target <= strongest) {
        return Err(Error::OutOfRange(format!(
            "order {m_order} needs |κ| = {target:e} 1/m, budget reaches [{weakest:e}, {strongest:e}]"
        )));
    }
    // |κ| falls with d: the lower end always has |κ| ≥ target.
    let (mut a, mut b) = (budget.min_gap, budget.max_gap);
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if model.kappa_abs(mid) >= target {
            a = mid;
        } else {
            b = mid;
        }
    }
    let err = |d: f64| (model.kappa_abs(d) - target).abs();
    Ok(if err(a) <= err(b) { a } else { b })
}

/// Pumps at ring-1 orders n_c ± p/2 around the signal wavelength; signal at the
/// ring-2 line nearest their midpoint.
pub fn select_process(device: &DeviceSpec, goal: &DesignGoal) -> Result<ProcessConfig> {
    let wg = &device.waveguide;
    let w = goal.signal_omega();
    let half = (goal.pump_separation / 2) as i64;
    let f1 = fsr(&device.ring1, wg, w);
    let reach = (half as f64 + 2.0) * f1 * 1.1;
    let comb1 = device.comb(RingId::One, Band::new(w - reach, w + reach)?)?;
    let center = nearest_resonance(&comb1, w)
        .ok_or_else(|| Error::MissingResonance("no ring-1 line near the signal wavelength".into()))?
        .order;
    let find = |order: i64| {
        comb1
            .iter()
            .find(|r| r.order == order)
            .copied()
            .ok_or_else(|| Error::MissingResonance(format!("ring-1 order {order} not found")))
    };
    let p1 = find(center + half)?;
    let p2 = find(center - half)?;
    let s = ring2_line_near(device, 0.5 * (p1.omega0 + p2.omega0))?;
    let dk = phase_mismatch(wg, s.omega0, p1.omega0, p2.omega0);
    Ok(ProcessConfig::on_resonance(p1, p2, s, dk))
}

fn ring2_line_near(device: &DeviceSpec, omega: f64) -> Result<crate::geometry::Resonance> {
    let f2 = fsr(&device.ring2, &device.waveguide, omega);
    let comb = device.comb(RingId::Two, Band::new(omega - 1.5 * f2, omega + 1.5 * f2)?)?;
    nearest_resonance(&comb, omega)
        .copied()
        .ok_or_else(|| Error::MissingResonance(format!("no ring-2 line near {omega:e} rad/s")))
}

/// 2ω_S − ω_P1 − ω_P2 of the wanted process, rad/s.
pub fn energy_residual(cfg: &ProcessConfig) -> f64 {
    2.0 * cfg.res_s.omega0 - cfg.res_p1.omega0 - cfg.res_p2.omega0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneOutcome {
    pub device: DeviceSpec,
    pub process: ProcessConfig,
    /// Side-band mismatch δ for pump 1 and pump 2, rad/s.
    pub detuning: [f64; 2],
    pub suppression: [f64; 2],
    pub worst_suppression: f64,
    /// 2ω_S − ω_P1 − ω_P2 after tuning, rad/s.
    pub residual: f64,
    pub mode: TuningMode,
}

/// Bisects the ring-2 heater so the signal line sits on the pump midpoint.
fn trim_heater(device: &DeviceSpec, goal: &DesignGoal) -> Result<DeviceSpec> {
    let cfg = select_process(device, goal)?;
    let wg = &device.waveguide;
    let order = cfg.res_s.order;
    let sum = cfg.res_p1.omega0 + cfg.res_p2.omega0;
    let tol = ENERGY_TOLERANCE * cfg.res_s.linewidth;
    let f2 = fsr(&device.ring2, wg, cfg.res_s.omega0);
    let residual = |h: f64| -> Result<f64> {
        let ring = crate::geometry::RacetrackSpec { heater_shift: h, ..device.ring2 };
        Ok(2.0 * resonance_at_order(&ring, wg, order, RingId::Two)?.omega0 - sum)
    };

    let h0 = device.ring2.heater_shift;
    let (mut a, mut b) = (h0 - f2, h0 + f2);
    if residual(a)? > 0.0 || residual(b)? < 0.0 {
        return Err(Error::NoConvergence { order });
    }
    let mut h = h0;
    let mut converged = false;
    for _ in 0..BISECT_ITERS {
        h = 0.5 * (a + b);
        let r = residual(h)?;
        if r.abs() <= tol {
            converged = true;
            break;
        }
        if r < 0.0 {
            a = h;
        } else {
            b = h;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { order });
    }
    let mut out = *device;
    out.ring2.heater_shift = h;
    Ok(out)
}

fn settle(device: &DeviceSpec, goal: &DesignGoal) -> Result<TuneOutcome> {
    let tuned = trim_heater(device, goal)?;
    let process = select_process(&tuned, goal)?;
    let side = sideband_detuning_on(&tuned, &process)?;
    let lw = process.res_s.linewidth;
    let suppression = [suppression_factor(side.delta[0], lw)?, suppression_factor(side.delta[1], lw)?];
    Ok(TuneOutcome {
        device: tuned,
        process,
        detuning: side.delta,
        worst_suppression: suppression[0].max(suppression[1]),
        suppression,
        residual: energy_residual(&process),
        mode: goal.mode,
    })
}

/// Restores 2ω_S = ω_P1 + ω_P2 on the actual combs and checks the side-band
/// suppression against the goal.
pub fn tune_for_energy_conservation(device: &DeviceSpec, goal: &DesignGoal) -> Result<TuneOutcome> {
    device.validate()?;
    goal.validate()?;
    let target = goal.min_parasitic_suppression;
    let base = settle(device, goal)?;
    if base.worst_suppression <= target {
        return Ok(base);
    }
    match goal.mode {
        TuningMode::Trim => Err(Error::Infeasible(format!(
            "heater trim leaves suppression {:.3e} above the target {target:.3e}; with energy conservation \
             enforced δ = {:.3e} rad/s is set by the FSR difference, so the ring-2 length must change \
             (fabrication mode)",
            base.worst_suppression, base.detuning[0]
        ))),
        TuningMode::Fabrication => fabricate(device, goal, base),
    }
}

/// Scans the ring-2 straight length over one period of the side-band mismatch and
/// returns the feasible length closest to the drawn one.
fn fabricate(device: &DeviceSpec, goal: &DesignGoal, base: TuneOutcome) -> Result<TuneOutcome> {
    let target = goal.min_parasitic_suppression;
    let wg = &device.waveguide;
    let cfg = &base.process;
    let x0 = device.ring2.straight_len;
    // One more ring-2 FSR between the pumps advances δ by a full FSR.
    let span = cfg.res_p1.omega0 - cfg.res_p2.omega0;
    let period = PI * C / (span * group_index(wg, cfg.res_s.omega0));
    let lo = (x0 - 0.5 * period).max(device.dc_length);
    let hi = x0 + 0.5 * period;

    let at = |x: f64| -> Result<TuneOutcome> {
        let mut d = base.device;
        d.ring2.straight_len = x;
        settle(&d, goal)
    };
    let xs: Vec<f64> = (0..=SCAN_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / SCAN_POINTS as f64)
        .collect();
    let scores = xs
        .iter()
        .map(|&x| at(x).map(|o| o.worst_suppression))
        .collect::<Result<Vec<f64>>>()?;

    let nearest_feasible = (0..xs.len())
        .filter(|&i| scores[i] <= target)
        .min_by(|&i, &j| (xs[i] - x0).abs().total_cmp(&(xs[j] - x0).abs()));
    let feasible_x = match nearest_feasible {
        Some(i) => i,
        None => {
            let best = (0..xs.len()).min_by(|&i, &j| scores[i].total_cmp(&scores[j])).unwrap_or(0);
            let (a, b) = (xs[best.saturating_sub(1)], xs[(best + 1).min(xs.len() - 1)]);
            let x = golden_min(|x| at(x).map(|o| o.worst_suppression), a, b)?;
            let outcome = at(x)?;
            if outcome.worst_suppression <= target {
                return Ok(outcome);
            }
            let lw = outcome.process.res_s.linewidth;
            return Err(Error::Infeasible(format!(
                "best suppression {:.3e} misses the target {target:.3e}: needs |δ| ≥ {:.3e} rad/s, \
                 reachable |δ| ≤ {:.3e} rad/s (≈ FSR/2)",
                outcome.worst_suppression,
                lw * (1.0 / target - 1.0).sqrt(),
                outcome.detuning[0].abs().min(outcome.detuning[1].abs()),
            )));
        }
    };

    // Walk the boundary towards the drawn length.
    let mut good = xs[feasible_x];
    let mut bad = if xs[feasible_x] > x0 {
        xs[feasible_x.saturating_sub(1)].max(x0)
    } else {
        xs[(feasible_x + 1).min(xs.len() - 1)].min(x0)
    };
    if bad == good {
        return at(good);
    }
    for _ in 0..60 {
        let mid = 0.5 * (good + bad);
        if at(mid)?.worst_suppression <= target {
            good = mid;
        } else {
            bad = mid;
        }
    }
    at(good)
}

fn golden_min(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..GOLDEN_ITERS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { c } else { d })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KerrCompensation {
    pub pump_power: f64,
    pub kerr_metric: f64,
    /// γ P 𝓕 in ring 1, 1/m.
    pub delta_beta: f64,
    /// Pump-induced resonance pull of ring 1 and ring 2, rad/s.
    pub pull: [f64; 2],
    /// Heater shifts that cancel the pull, rad/s.
    pub heater_correction: [f64; 2],
}

/// Pump-induced resonance pulls and the heater shifts that undo them.
///
/// Ring 1 carries the pumps everywhere and sees Δn_eff = Δβ/k with Δβ = γP𝓕₁, i.e.
/// Δω = −ω Δn_eff/n_g = −v_g Δβ. Ring 2 only meets the pump field in the coupler,
/// where the pump's mean power fraction in the ring-2 guide is ½, so its pull is
/// scaled by L/(2𝓛₂).
pub fn xpm_spm_compensation(device: &DeviceSpec, cfg: &ProcessConfig, pump_power: f64, max_kerr_metric: f64) -> Result<KerrCompensation> {
    ensure(pump_power >= 0.0, || "pump power must be non-negative".into())?;
    let wg = &device.waveguide;
    let omega_p = 0.5 * (cfg.res_p1.omega0 + cfg.res_p2.omega0);
    let q_p = (cfg.res_p1.q_loaded * cfg.res_p2.q_loaded).sqrt();
    let metric = kerr_validity_metric(wg, pump_power, q_p, TWO_PI * C / omega_p);
    if metric > max_kerr_metric {
        return Err(Error::ValidityExceeded { metric, limit: max_kerr_metric });
    }
    let delta_beta = kerr_delta_beta(wg, pump_power, finesse(&device.ring1, wg, omega_p))?;
    let pull1 = -wg.group_velocity() * delta_beta;
    let pull2 = pull1 * device.dc_length / (2.0 * device.ring2.total_length());
    Ok(KerrCompensation {
        pump_power,
        kerr_metric: metric,
        delta_beta,
        pull: [pull1, pull2],
        heater_correction: [-pull1, -pull2],
    })
}

/// Device with `shifts` added to the two heater shifts.
pub fn apply_heater_shifts(device: &DeviceSpec, shifts: [f64; 2]) -> DeviceSpec {
    let mut out = *device;
    out.ring1.heater_shift += shifts[0];
    out.ring2.heater_shift += shifts[1];
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleCheck {
    pub rule: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl RuleCheck {
    fn at_most(rule: &str, value: f64, limit: f64) -> Self {
        RuleCheck { rule: rule.into(), value, limit, pass: value <= limit }
    }

    fn at_least(rule: &str, value: f64, limit: f64) -> Self {
        RuleCheck { rule: rule.into(), value, limit, pass: value >= limit }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignReport {
    pub device: DeviceSpec,
    pub goal: DesignGoal,
    pub process: ProcessConfig,
    pub j_on_resonance: f64,
    /// Worse of the two single-pump suppressions.
    pub achieved_suppression: f64,
    pub suppression: [f64; 2],
    pub detuning: [f64; 2],
    pub energy_residual: f64,
    pub kerr_metric: f64,
    pub isolation_db: f64,
    pub uncoupling_order: u32,
    pub rates: PairRateReport,
    pub xpm_compensation: Option<KerrCompensation>,
    pub diagnostics: Vec<RuleCheck>,
    pub all_pass: bool,
    /// Reserved for fabrication-tolerance analysis; not computed.
    pub tolerance_analysis: Option<Vec<RuleCheck>>,
    pub warnings: Vec<String>,
    /// Modelling choices behind the report; informational, never escalated.
    pub notes: Vec<String>,
}

/// Evaluates every design rule on `device` as drawn (no tuning).
pub fn evaluate_design(device: &DeviceSpec, goal: &DesignGoal, drive: &PumpDrive) -> Result<DesignReport> {
    device.validate()?;
    goal.validate()?;
    let cfg = select_process(device, goal)?;
    let overlap = j_closed_form(device, &cfg, AssumptionMode::Lenient)?;
    let mut warnings = overlap.warnings.clone();

    let side = sideband_detuning_on(device, &cfg)?;
    let lw = cfg.res_s.linewidth;
    let suppression = [suppression_factor(side.delta[0], lw)?, suppression_factor(side.delta[1], lw)?];
    let worst = suppression[0].max(suppression[1]);

    let kappa = device.kappa();
    let isolation = isolation_db(kappa, device.dc_length);
    let order = ((kappa.norm() * device.dc_length / PI).round() as u32).max(1);
    let omega_p = 0.5 * (cfg.res_p1.omega0 + cfg.res_p2.omega0);
    let q_p = (cfg.res_p1.q_loaded * cfg.res_p2.q_loaded).sqrt();
    let kerr = kerr_validity_metric(&device.waveguide, goal.pump_power, q_p, TWO_PI * C / omega_p);
    let residual = energy_residual(&cfg);
    let rates = noise_budget(device, drive, &cfg, goal.kcal)?;
    warnings.extend(rates.warnings.iter().cloned());

    let diagnostics = vec![
        RuleCheck::at_least("linear_uncoupling_isolation_db", isolation, goal.min_isolation_db),
        RuleCheck::at_most("parasitic_suppression", worst, goal.min_parasitic_suppression),
        RuleCheck::at_most("energy_conservation_linewidths", residual.abs() / lw, ENERGY_RULE_LINEWIDTHS),
        RuleCheck::at_most("kerr_validity", kerr, goal.max_kerr_metric),
        RuleCheck::at_most("phase_matching", cfg.delta_k.abs() * device.dc_length, PHASE_MATCH_LIMIT),
    ];
    let all_pass = diagnostics.iter().all(|r| r.pass);
    Ok(DesignReport {
        device: *device,
        goal: *goal,
        process: cfg,
        j_on_resonance: overlap.j_value.norm(),
        achieved_suppression: worst,
        suppression,
        detuning: side.delta,
        energy_residual: residual,
        kerr_metric: kerr,
        isolation_db: isolation,
        uncoupling_order: order,
        rates,
        xpm_compensation: None,
        diagnostics,
        all_pass,
        tolerance_analysis: None,
        warnings,
        notes: vec![XPM_MODEL_NOTE.to_string()],
    })
}

/// Gap for the smallest feasible uncoupling order, comb placement, Kerr
/// compensation, then the full rule evaluation.
pub fn optimize(device: &DeviceSpec, goal: &DesignGoal) -> Result<DesignReport> {
    device.validate()?;
    goal.validate()?;
    let mut dev = *device;
    let mut last = None;
    for m in 1..=MAX_UNCOUPLING_ORDER {
        match solve_gap_for_uncoupling(&dev.kappa_model, dev.dc_length, m, &goal.gap_budget) {
            Ok(gap) => {
                dev.dc_gap = gap;
                last = None;
                break;
            }
            Err(e) => last = Some(e),
        }
    }
    if let Some(e) = last {
        return Err(e);
    }
    let tuned = tune_for_energy_conservation(&dev, goal)?;
    let comp = xpm_spm_compensation(&tuned.device, &tuned.process, goal.pump_power, goal.max_kerr_metric)?;
    let omega_p = 0.5 * (tuned.process.res_p1.omega0 + tuned.process.res_p2.omega0);
    let drive = PumpDrive::from_power(goal.pump_power, omega_p, crate::sfwm::REFERENCE_PULSE);
    let mut report = evaluate_design(&tuned.device, goal, &drive)?;
    report.xpm_compensation = Some(comp);
    Ok(report)
}
