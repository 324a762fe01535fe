//! Lorentzian field enhancement near each resonance and the two-comb intensity spectrum.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::geometry::{Band, DeviceSpec, RacetrackSpec, Resonance, RingId, WaveguideParams};
use crate::table::Table;

/// Half-width of the window, in linewidths, where the single-line form is trusted.
pub const DEFAULT_WINDOW_LINEWIDTHS: f64 = 20.0;

/// f(ω) = √(4 Q v_g/(𝓛 ω₀)) √(Q/Q_c) · (Δ/2)/((ω − ω₀) + iΔ/2) for one resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnhancementProfile {
    pub resonance: Resonance,
    /// |f(ω₀)|.
    pub peak_amplitude: f64,
}

impl EnhancementProfile {
    pub fn new(res: &Resonance, wg: &WaveguideParams, ring: &RacetrackSpec) -> Self {
        let q = res.q_loaded;
        let v_g = wg.group_velocity();
        let peak_amplitude = (4.0 * q * v_g / (ring.total_length() * res.omega0)).sqrt() * (q / res.q_coupling).sqrt();
        EnhancementProfile {
            resonance: *res,
            peak_amplitude,
        }
    }

    pub fn peak_intensity(&self) -> f64 {
        self.peak_amplitude * self.peak_amplitude
    }

    pub fn at(&self, omega: f64) -> Complex64 {
        self.peak_amplitude * lorentzian(self.resonance.omega0, self.resonance.linewidth, omega)
    }

    pub fn intensity(&self, omega: f64) -> f64 {
        let half = 0.5 * self.resonance.linewidth;
        let x = omega - self.resonance.omega0;
        self.peak_intensity() * half * half / (x * x + half * half)
    }

    /// Whether `omega` is within `linewidths` linewidths of the center.
    pub fn in_window(&self, omega: f64, linewidths: f64) -> bool {
        (omega - self.resonance.omega0).abs() <= linewidths * self.resonance.linewidth
    }
}

/// Normalised complex Lorentzian (Δ/2)/((ω − ω₀) + iΔ/2); equals −i on resonance.
pub fn lorentzian(omega0: f64, linewidth: f64, omega: f64) -> Complex64 {
    let half = 0.5 * linewidth;
    Complex64::new(half, 0.0) / Complex64::new(omega - omega0, half)
}

pub fn field_enhancement(res: &Resonance, wg: &WaveguideParams, ring: &RacetrackSpec, omega: f64) -> Complex64 {
    EnhancementProfile::new(res, wg, ring).at(omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub omega: f64,
    pub f1_sq: f64,
    pub f2_sq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub rows: Vec<SpectrumRow>,
    pub comb1: Vec<Resonance>,
    pub comb2: Vec<Resonance>,
}

impl Spectrum {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["omega_rad_s", "f1_sq", "f2_sq"]);
        for r in &self.rows {
            t.push(vec![r.omega, r.f1_sq, r.f2_sq]);
        }
        t
    }

    pub fn to_csv(&self) -> String {
        self.to_table().to_csv()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    pub n_points: usize,
    /// Add every in-band resonance center to the uniform grid.
    pub include_centers: bool,
}

impl SpectrumOptions {
    pub fn uniform(n_points: usize) -> Self {
        SpectrumOptions {
            n_points,
            include_centers: false,
        }
    }
}

fn comb_or_empty(device: &DeviceSpec, id: RingId, band: Band) -> Result<Vec<Resonance>> {
    match device.comb(id, band) {
        Err(Error::EmptyBand { .. }) => Ok(Vec::new()),
        other => other,
    }
}

/// Intensity enhancement of both rings over `band`.
///
/// Each ring's column is the sum of |f|² over that ring's own in-band resonances
/// only. Line tails are summed in intensity, which is accurate when the spacing is
/// many linewidths.
pub fn intensity_spectrum(device: &DeviceSpec, band: Band, opts: SpectrumOptions) -> Result<Spectrum> {
    ensure(opts.n_points >= 2, || "n_points must be at least 2".into())?;
    device.validate()?;
    let comb1 = comb_or_empty(device, RingId::One, band)?;
    let comb2 = comb_or_empty(device, RingId::Two, band)?;
    if comb1.is_empty() && comb2.is_empty() {
        return Err(Error::EmptyBand {
            ring: 0,
            lo: band.lo,
            hi: band.hi,
        });
    }

    let step = (band.hi - band.lo) / (opts.n_points - 1) as f64;
    let mut grid: Vec<f64> = (0..opts.n_points)
        .map(|i| if i + 1 == opts.n_points { band.hi } else { band.lo + step * i as f64 })
        .collect();
    if opts.include_centers {
        grid.extend(comb1.iter().chain(&comb2).map(|r| r.omega0));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
    }

    let prof1: Vec<_> = comb1
        .iter()
        .map(|r| EnhancementProfile::new(r, &device.waveguide, &device.ring1))
        .collect();
    let prof2: Vec<_> = comb2
        .iter()
        .map(|r| EnhancementProfile::new(r, &device.waveguide, &device.ring2))
        .collect();

    let row = |omega: f64| SpectrumRow {
        omega,
        f1_sq: prof1.iter().map(|p| p.intensity(omega)).sum(),
        f2_sq: prof2.iter().map(|p| p.intensity(omega)).sum(),
    };

    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        grid.par_iter().map(|&w| row(w)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows = grid.iter().map(|&w| row(w)).collect();

    Ok(Spectrum { rows, comb1, comb2 })
}
