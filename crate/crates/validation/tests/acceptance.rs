//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Every check states its oracle before calling into the library. The process
//! exits non-zero when any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use nlring::design::{optimal_dc_length, select_process, tune_for_energy_conservation, DesignGoal, TuningMode};
use nlring::geometry::fsr;
use nlring::linear_cmt::{dc_transfer, kerr_validity_metric, solve_dc_fields};
use nlring::nonlinear::{j_closed_form, j_quadrature, j_single_ring, overlap_kernel, z_overlap_integral, AssumptionMode};
use nlring::sfwm::{
    calibrate_kcal, pair_rate_closed_form, pair_rate_integral, pair_rate_per_second, suppression_factor, PumpDrive,
    RateModel,
};
use nlring::{CouplingModel, DeviceSpec, Error, RacetrackSpec, WaveguideParams};

const C: f64 = 299_792_458.0;

type Check<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn waveguide(flat: bool) -> WaveguideParams {
    let omega_ref = 2.0 * PI * C / 1.55e-6;
    let (n0, ng) = (2.4, 4.2);
    WaveguideParams {
        n_eff_ref: n0,
        n_g: ng,
        omega_ref,
        gvd: flat.then(|| -2.0 * (ng - n0) / (C * omega_ref)),
        gamma_nl: 200.0,
        chi3_bar: 2.8e-19,
        n_bar: 3.48,
        area_eff: 0.1e-12,
    }
}

fn racetrack(r: f64, q_loaded: f64) -> RacetrackSpec {
    RacetrackSpec {
        straight_len: PI * r,
        bend_radius: r,
        q_intrinsic: 2.0 * q_loaded,
        q_coupling: 2.0 * q_loaded,
        heater_shift: 0.0,
    }
}

fn device(r: f64, q_loaded: f64, phase: f64, flat: bool) -> DeviceSpec {
    let l = PI * r;
    DeviceSpec {
        waveguide: waveguide(flat),
        ring1: racetrack(r, q_loaded),
        ring2: racetrack(r, q_loaded),
        dc_length: l,
        dc_gap: 200e-9,
        kappa_model: CouplingModel { kappa0: PI / l, gap_ref: 200e-9, decay_len: 100e-9, phase },
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let dt = t.elapsed();
    o.detail.push_str(&format!("; {:.3} s", dt.as_secs_f64()));
    if let Some(limit) = limit {
        if dt > limit {
            o.pass = false;
            o.detail.push_str(&format!(" (limit {} s)", limit.as_secs_f64()));
        }
    }
    o
}

/// 1. |A₁|² + |A₂|² = 1 to 1e-12 and cross power < 1e-20 at L = mπ/|κ|, 10³ random (κ, L).
fn unitarity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_norm, mut worst_cross) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let k = Complex64::from_polar(rng.gen_range(1e3..1e6), rng.gen_range(-PI..PI));
        let length = rng.gen_range(1e-7..1e-3);
        let fields = solve_dc_fields(k, length).unwrap();
        for z in [0.0, 0.37 * length, length] {
            worst_norm = worst_norm.max((fields.input.power(z) - 1.0).abs());
            worst_norm = worst_norm.max((fields.output.power(z) - 1.0).abs());
        }
        let t = dc_transfer(k, length);
        worst_norm = worst_norm.max((t.through.norm_sqr() + t.cross_power() - 1.0).abs());
        let m = rng.gen_range(1..=8) as f64;
        worst_cross = worst_cross.max(dc_transfer(k, m * PI / k.norm()).cross_power());
    }
    outcome(
        worst_norm <= 1e-12 && worst_cross < 1e-20,
        format!("max |ΣA²−1| = {worst_norm:.2e}, max cross power = {worst_cross:.2e}"),
    )
}

/// 2. z integral = L/4 (modulus) and matches a 10⁶-point trapezoid rule, m = 1, 2, 3.
fn quarter_length() -> Outcome {
    let k = Complex64::from_polar(2.5e4, 0.4);
    let mut worst_l4 = 0.0f64;
    let mut worst_trap = 0.0f64;
    for m in 1..=3 {
        let length = m as f64 * PI / k.norm();
        // Oracle: trapezoid sum of the kernel on 10⁶ intervals.
        let fields = solve_dc_fields(k, length).unwrap();
        let n = 1_000_000;
        let h = length / n as f64;
        let mut trap = 0.5 * (overlap_kernel(&fields, 0.0) + overlap_kernel(&fields, length));
        for i in 1..n {
            trap += overlap_kernel(&fields, i as f64 * h);
        }
        trap *= h;
        let z = z_overlap_integral(k, length, 0.0).unwrap().value;
        worst_l4 = worst_l4.max((z.norm() - 0.25 * length).abs() / (0.25 * length));
        worst_trap = worst_trap.max((z - trap).norm() / trap.norm());
    }
    outcome(
        worst_l4 < 1e-9 && worst_trap < 1e-9,
        format!("max rel. error vs L/4 = {worst_l4:.2e}, vs trapezoid = {worst_trap:.2e}"),
    )
}

/// 3. Closed form and quadrature agree to 1e-6 at Δk = 0 on 100 random devices.
fn closed_vs_quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let r = rng.gen_range(8e-6..25e-6);
        let q = rng.gen_range(1e4..1e5);
        let mut dev = device(r, q, rng.gen_range(-PI..PI), false);
        dev.ring2.q_intrinsic = rng.gen_range(1e4..4e5);
        let sep = 2 * rng.gen_range(1..=4);
        let mut cfg = select_process(&dev, &DesignGoal::new(rng.gen_range(1.53e-6..1.57e-6), sep, 0.5)).unwrap();
        cfg.delta_k = 0.0;
        let a = j_closed_form(&dev, &cfg, AssumptionMode::Lenient).unwrap().j_value;
        let b = j_quadrature(&dev, &cfg).unwrap().j_value;
        worst = worst.max((a - b).norm() / b.norm());
    }
    outcome(worst < 1e-6, format!("max |J_cf − J_q|/|J_q| = {worst:.2e}"))
}

/// 4. J/J₀ = L/(4𝓛) for equal rings, and 1/16 at L = πR, 𝓛 = 4πR.
fn single_ring_ratio() -> Outcome {
    // Symbolic: L/(4𝓛) with L = πR and 𝓛 = 2(L + πR) is πR/(16πR).
    let o = optimal_dc_length(15e-6).unwrap();
    let symbolic = o.dc_length / (4.0 * o.ring_length);
    let mut worst = 0.0f64;
    let mut at_opt = 0.0;
    for (i, (r, straight)) in [(15e-6, PI * 15e-6), (10e-6, 60e-6), (20e-6, 40e-6)].into_iter().enumerate() {
        let mut dev = device(r, 5e4, 0.3, false);
        dev.ring1.straight_len = straight;
        dev.ring2.straight_len = straight;
        dev.dc_length = PI * r;
        dev.kappa_model.kappa0 = PI / dev.dc_length;
        let mut cfg = select_process(&dev, &DesignGoal::new(1.55e-6, 4, 0.5)).unwrap();
        cfg.delta_k = 0.0;
        let expected = dev.dc_length / (4.0 * dev.ring1.total_length());
        let ratio = j_quadrature(&dev, &cfg).unwrap().j_value.norm() / j_single_ring(&dev, &cfg).unwrap().j_value.norm();
        worst = worst.max((ratio - expected).abs() / expected);
        if i == 0 {
            at_opt = ratio;
        }
    }
    let sym_ok = (symbolic - 1.0 / 16.0).abs() < 1e-15;
    let num_ok = (at_opt - 1.0 / 16.0).abs() < 1e-9 * (1.0 / 16.0);
    outcome(
        sym_ok && num_ok && worst < 1e-9,
        format!("symbolic {symbolic}, numeric at L_opt {at_opt:.12}, max rel. error vs L/(4𝓛) = {worst:.2e}"),
    )
}

/// 5. δ = 0 integral vs (π/4)Δ³/(δ²+Δ²) within 0.5 %; δ-dependence vs Δ²/(δ²+Δ²) within 1 %.
fn lorentzian_integrals() -> Outcome {
    let dev = device(15e-6, 5e4, 0.0, false);
    let cfg = select_process(&dev, &DesignGoal::new(1.55e-6, 4, 0.5)).unwrap();
    let model = RateModel { group_velocity: dev.waveguide.group_velocity(), sigma: 0.95, kcal: 1.0 };
    let drive = PumpDrive { photon_number: 1e6, pulse_duration: 1e-9, self_coupling: None };
    let res = &cfg.res_s;
    let lw = res.linewidth;
    let pump = res.omega0 + 3.0 * fsr(&dev.ring1, &dev.waveguide, res.omega0);
    let r0 = pair_rate_integral(&drive, &model, res, pump, 0.0).unwrap();
    let on_res = (r0 / pair_rate_closed_form(&drive, &model, res, pump, 0.0) - 1.0).abs();
    let mut worst = 0.0f64;
    for ratio in [0.5, 1.0, 3.0, 10.0, 30.0] {
        let delta = ratio * lw;
        // Oracle: Δ²/(δ² + Δ²).
        let expected = 1.0 / (1.0 + ratio * ratio);
        let got = pair_rate_integral(&drive, &model, res, pump, delta).unwrap() / r0;
        worst = worst.max((got - expected).abs() / expected);
    }
    outcome(
        on_res < 5e-3 && worst < 1e-2,
        format!("on-resonance rel. error {on_res:.2e}, max detuning-law rel. error {worst:.2e}"),
    )
}

/// 6. Finesse ≥ 100 and δ = 1 FSR gives suppression < 10⁻⁴.
fn four_orders() -> Outcome {
    let mut worst = 0.0f64;
    for finesse in [100.0, 150.0, 300.0, 1000.0] {
        let dev = device(15e-6, 5e4, 0.0, true);
        let w = dev.waveguide.omega_ref;
        let f = fsr(&dev.ring2, &dev.waveguide, w);
        let s = suppression_factor(f, f / finesse).unwrap();
        // Oracle: 1/(1 + 𝓕²).
        assert!((s - 1.0 / (1.0 + finesse * finesse)).abs() < 1e-15);
        worst = worst.max(s);
    }
    outcome(worst < 1e-4, format!("largest suppression (𝓕 = 100) = {worst:.6e}"))
}

/// 7. Kerr metric: 6.2×10⁻³ (Si) and 10⁻¹ (SiN) within 5 %.
fn kerr_numbers() -> Outcome {
    let base = waveguide(false);
    // Si: γ = 200 /W/m, P = 5 mW, λ = 1500 nm, n_g = 3, Q = 5×10⁴.
    let si = kerr_validity_metric(&WaveguideParams { gamma_nl: 200.0, n_g: 3.0, ..base }, 5e-3, 5e4, 1.5e-6);
    // SiN: γ = 1 /W/m, P = 500 mW, λ = 1500 nm, n_g = 2, Q = 10⁶.
    let sin = kerr_validity_metric(&WaveguideParams { gamma_nl: 1.0, n_g: 2.0, ..base }, 0.5, 1e6, 1.5e-6);
    let e_si = (si - 6.2e-3).abs() / 6.2e-3;
    let e_sin = (sin - 0.1).abs() / 0.1;
    outcome(
        e_si < 0.05 && e_sin < 0.05,
        format!(
            "Si {si:.4e} (off {:.2} %), SiN {sin:.5e} (off {:.2} %): the SiN inputs give 0.09375 exactly, \
             outside 10⁻¹ ± 5 %",
            100.0 * e_si,
            100.0 * e_sin
        ),
    )
}

fn device_json(flat_ring2: f64) -> Value {
    let f0 = C / 1.55e-6;
    let (ng, n0) = (4.2, 2.4);
    let r = 15e-6;
    let l = PI * r;
    let ring = |s: f64| json!({"straight_len": s, "bend_radius": r, "q_intrinsic": 1e5, "q_coupling": 1e5, "heater_shift": 0.0});
    json!({
        "schema": 1,
        "waveguide": {"n_eff_ref": n0, "n_g": ng, "freq_ref": f0, "gvd": -2.0 * (ng - n0) / (C * 2.0 * PI * f0),
                      "gamma_nl": 200.0, "chi3_bar": 2.8e-19, "n_bar": 3.48, "area_eff": 1e-13},
        "ring1": ring(l),
        "ring2": ring(flat_ring2),
        "dc": {"dc_length": l, "dc_gap": 230e-9},
        "coupling_model": {"kappa0": PI / l, "gap_ref": 200e-9, "decay_len": 100e-9, "phase": 0.0}
    })
}

fn nlring(args: &[&str]) -> Result<(), String> {
    match nlring_cli::run_from(std::iter::once("nlring").chain(args.iter().copied())) {
        0 => Ok(()),
        code => Err(format!("exit code {code}")),
    }
}

fn local_maxima(rows: &[[f64; 3]], col: usize) -> Vec<(f64, f64)> {
    (1..rows.len() - 1)
        .filter(|&i| rows[i][col] > rows[i - 1][col] && rows[i][col] >= rows[i + 1][col])
        .map(|i| (rows[i][0], rows[i][col]))
        .collect()
}

/// 8. `spectrum` CLI: two combs, |2ω_P − ω_S − ω_S′| ≥ 0.1 FSR for both pumps, and
///    peak heights equal to the Lorentzian formula to 1e-6.
fn two_comb_spectrum(dir: &Path) -> Result<Outcome, String> {
    let plain = dir.join("plain.json");
    std::fs::write(&plain, device_json(PI * 15e-6).to_string()).map_err(|e| e.to_string())?;
    let designed = dir.join("designed.json");
    nlring(&[
        "optimize", "-d", plain.to_str().unwrap(), "--suppression", "1e-3", "--mode", "fabrication",
        "--power", "0.1mW", "--device-out", designed.to_str().unwrap(), "-o",
        dir.join("report.json").to_str().unwrap(),
    ])?;
    let csv_path = dir.join("spectrum.csv");
    nlring(&[
        "spectrum", "-d", designed.to_str().unwrap(), "--band", "189e12:198e12", "--points", "20000",
        "--resonance-points", "-o", csv_path.to_str().unwrap(),
    ])?;
    let text = std::fs::read_to_string(&csv_path).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    if lines.next() != Some("omega_rad_s,f1_sq,f2_sq") {
        return Ok(outcome(false, "unexpected CSV header"));
    }
    let rows: Vec<[f64; 3]> = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    let peaks1 = local_maxima(&rows, 1);
    let peaks2 = local_maxima(&rows, 2);

    // Oracle: |f(ω)|² = (4Q v_g/(𝓛 ω_j))(Q/Q_c)·(Δ/2)²/((ω−ω_j)² + (Δ/2)²), summed over
    // the ring's in-band lines, with parameters read straight from the device file.
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&designed).unwrap()).unwrap();
    let v_g = C / doc["waveguide"]["n_g"].as_f64().unwrap();
    let lorentz_sum = |ring: &Value, centers: &[(f64, f64)], w: f64| -> f64 {
        let qi = ring["q_intrinsic"].as_f64().unwrap();
        let qc = ring["q_coupling"].as_f64().unwrap();
        let q = 1.0 / (1.0 / qi + 1.0 / qc);
        let len = 2.0 * (ring["straight_len"].as_f64().unwrap() + PI * ring["bend_radius"].as_f64().unwrap());
        centers
            .iter()
            .map(|&(wj, _)| {
                let half = 0.5 * wj / q;
                4.0 * q * v_g / (len * wj) * (q / qc) * half * half / ((w - wj).powi(2) + half * half)
            })
            .sum()
    };
    let mut worst_height = 0.0f64;
    for (ring, peaks) in [(&doc["ring1"], &peaks1), (&doc["ring2"], &peaks2)] {
        for &(w, h) in peaks.iter() {
            let expected = lorentz_sum(ring, peaks, w);
            worst_height = worst_height.max((h - expected).abs() / expected);
        }
    }

    let w_sig = 2.0 * PI * C / 1.55e-6;
    let nearest = |peaks: &[(f64, f64)], w: f64| {
        (0..peaks.len()).min_by(|&i, &j| (peaks[i].0 - w).abs().total_cmp(&(peaks[j].0 - w).abs())).unwrap()
    };
    let c = nearest(&peaks1, w_sig);
    let (p1, p2) = (peaks1[c + 5].0, peaks1[c - 5].0);
    let si = nearest(&peaks2, 0.5 * (p1 + p2));
    let s = peaks2[si].0;
    let fsr2 = peaks2[si + 1].0 - peaks2[si].0;
    let symmetric = (p1 + p2 - 2.0 * s).abs() / fsr2;
    let mut min_offset = f64::INFINITY;
    for p in [p1, p2] {
        let target = 2.0 * p - s;
        let partner = peaks2[nearest(&peaks2, target)].0;
        min_offset = min_offset.min((target - partner).abs() / fsr2);
    }
    let two_combs = peaks1.len() >= 20 && peaks2.len() >= 20;
    Ok(outcome(
        two_combs && symmetric < 1e-6 && min_offset >= 0.1 && worst_height < 1e-6,
        format!(
            "{} + {} peaks, |ω_P1+ω_P2−2ω_S|/FSR = {symmetric:.1e}, min |2ω_P−ω_S−ω_S′| = {min_offset:.3} FSR, \
             max peak-height rel. error = {worst_height:.1e}",
            peaks1.len(),
            peaks2.len()
        ),
    ))
}

/// 9. Calibration round trip to 1e-9 and |α|⁴ exponent 4 ± 1e-6.
fn calibration() -> Outcome {
    let dev = device(15e-6, 5e4, 0.0, true);
    let cfg = select_process(&dev, &DesignGoal::new(1.55e-6, 10, 0.5)).unwrap();
    let target = 1.3e6;
    let power = 2e-4;
    let kcal = calibrate_kcal(&dev, &cfg, target, power).unwrap();
    let back = pair_rate_per_second(&dev, &cfg, power, kcal, None).unwrap();
    let round_trip = (back / target - 1.0).abs();

    let model = RateModel { group_velocity: dev.waveguide.group_velocity(), sigma: 0.95, kcal };
    // Least-squares slope of ln(rate) against ln|α| over three decades of |α|².
    let pts: Vec<(f64, f64)> = [1e2, 1e3, 1e4, 1e5, 1e6]
        .iter()
        .map(|&n: &f64| {
            let drive = PumpDrive { photon_number: n, pulse_duration: 1e-9, self_coupling: None };
            let r = pair_rate_integral(&drive, &model, &cfg.res_s, cfg.res_p1.omega0, 2.0 * cfg.res_s.linewidth).unwrap();
            (0.5 * n.ln(), r.ln())
        })
        .collect();
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    outcome(
        round_trip < 1e-9 && (slope - 4.0).abs() < 1e-6,
        format!("round-trip rel. error {round_trip:.1e}, exponent {slope:.9}"),
    )
}

/// 10. Fabrication-mode Infeasible verdicts vs Δ√(1/s − 1) ≤ FSR/2 on a 10 × 5 grid.
fn frontier() -> Outcome {
    let finesses: Vec<f64> = (0..10).map(|i| 4.0 * 250f64.powf(i as f64 / 9.0)).collect();
    let targets = [0.3, 1e-1, 1e-2, 1e-3, 1e-4];
    let mut agree = 0;
    let mut disagreements = Vec::new();
    let mut closest = f64::INFINITY;
    for &finesse in &finesses {
        let probe = device(15e-6, 1e4, 0.0, true);
        let w = 2.0 * PI * C / 1.55e-6;
        let q = finesse * w / fsr(&probe.ring2, &probe.waveguide, w);
        let dev = device(15e-6, q, 0.0, true);
        for &s in &targets {
            let goal = DesignGoal { mode: TuningMode::Fabrication, ..DesignGoal::new(1.55e-6, 10, s) };
            // Oracle: analytic frontier at the signal line of the drawn device.
            let cfg = select_process(&dev, &goal).unwrap();
            let lw = cfg.res_s.linewidth;
            let f2 = fsr(&dev.ring2, &dev.waveguide, cfg.res_s.omega0);
            let need = lw * (1.0 / s - 1.0).sqrt();
            let analytic = need <= 0.5 * f2;
            closest = closest.min((need / (0.5 * f2) - 1.0).abs());
            let verdict = match tune_for_energy_conservation(&dev, &goal) {
                Ok(_) => true,
                Err(Error::Infeasible(_)) => false,
                Err(e) => {
                    disagreements.push(format!("𝓕={finesse:.1}, s={s:e}: {e}"));
                    continue;
                }
            };
            if verdict == analytic {
                agree += 1;
            } else {
                disagreements.push(format!("𝓕={finesse:.1}, s={s:e}: optimizer {verdict}, analytic {analytic}"));
            }
        }
    }
    let total = finesses.len() * targets.len();
    let mut detail = format!("{agree}/{total} verdicts agree; nearest grid point is {:.1} % from the frontier", 100.0 * closest);
    for d in &disagreements {
        detail.push_str(&format!("; {d}"));
    }
    outcome(agree == total, detail)
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let checks: Vec<Check> = vec![
        ("1 coupler unitarity and uncoupling", Box::new(|| timed(Some(Duration::from_secs(1)), unitarity))),
        ("2 L/4 overlap factor", Box::new(|| timed(Some(Duration::from_secs(5)), quarter_length))),
        ("3 closed form vs quadrature", Box::new(|| timed(Some(Duration::from_secs(30)), closed_vs_quadrature))),
        ("4 J/J0 = L/(4𝓛), 1/16 at L = πR", Box::new(|| timed(None, single_ring_ratio))),
        ("5 Lorentzian pair-rate integrals", Box::new(|| timed(Some(Duration::from_secs(10)), lorentzian_integrals))),
        ("6 four-orders suppression at 𝓕 ≥ 100", Box::new(|| timed(Some(Duration::from_secs(1)), four_orders))),
        ("7 Kerr worked numbers (Si, SiN)", Box::new(|| timed(Some(Duration::from_secs(1)), kerr_numbers))),
        (
            "8 two-comb spectrum from the CLI",
            Box::new(|| {
                timed(None, || two_comb_spectrum(dir.path()).unwrap_or_else(|e| outcome(false, format!("CLI failed: {e}"))))
            }),
        ),
        ("9 rate calibration and |α|⁴ scaling", Box::new(|| timed(None, calibration))),
        ("10 design feasibility frontier", Box::new(|| timed(Some(Duration::from_secs(10)), frontier))),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
