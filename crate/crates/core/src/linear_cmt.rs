//! Coupled-mode solution of the directional coupler joining the two racetracks.
//!
//! Light entering the coupler in one guide returns to that guide after a length
//! `m π / |κ|`. At those lengths the two resonators share no linear transmission and
//! every normal mode lives in one ring or the other.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::geometry::WaveguideParams;

/// Isolation reported when the cross power is exactly zero, dB.
pub const DEFAULT_ISOLATION_CAP_DB: f64 = 200.0;

/// Kerr metric above which the coupler is flagged as perturbed.
pub const DEFAULT_KERR_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    In,
    Out,
}

/// Unit phase κ*/|κ|; 1 when κ vanishes (its sine partner is then zero).
fn conj_phase(kappa: Complex64) -> Complex64 {
    let mag = kappa.norm();
    if mag == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        kappa.conj() / mag
    }
}

/// Slowly varying amplitudes of one asymptotic field inside the coupler.
///
/// The OUT field starts in guide 1 (ring 1 arm), the IN field in guide 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmtField {
    pub port: Port,
    pub kappa: Complex64,
}

impl CmtField {
    pub fn a1(&self, z: f64) -> Complex64 {
        let x = self.kappa.norm() * z;
        match self.port {
            Port::Out => Complex64::new(x.cos(), 0.0),
            Port::In => -Complex64::i() * conj_phase(self.kappa) * x.sin(),
        }
    }

    pub fn a2(&self, z: f64) -> Complex64 {
        let x = self.kappa.norm() * z;
        match self.port {
            Port::Out => Complex64::i() * conj_phase(self.kappa) * x.sin(),
            Port::In => Complex64::new(x.cos(), 0.0),
        }
    }

    /// Amplitude in guide `n` (1 or 2).
    pub fn amplitude(&self, n: u8, z: f64) -> Complex64 {
        if n == 1 {
            self.a1(z)
        } else {
            self.a2(z)
        }
    }

    pub fn power(&self, z: f64) -> f64 {
        self.a1(z).norm_sqr() + self.a2(z).norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcFields {
    pub input: CmtField,
    pub output: CmtField,
    pub length: f64,
    /// Set when |κ| = 0: the fields are constant and the guides do not talk.
    pub degenerate: bool,
}

pub fn solve_dc_fields(kappa: Complex64, length: f64) -> Result<DcFields> {
    ensure(length > 0.0, || format!("coupler length must be positive, got {length:e}"))?;
    Ok(DcFields {
        input: CmtField { port: Port::In, kappa },
        output: CmtField { port: Port::Out, kappa },
        length,
        degenerate: kappa.norm() == 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DcTransfer {
    pub through: Complex64,
    pub cross: Complex64,
    pub length: f64,
}

impl DcTransfer {
    pub fn cross_power(&self) -> f64 {
        self.cross.norm_sqr()
    }
}

pub fn dc_transfer(kappa: Complex64, length: f64) -> DcTransfer {
    let x = kappa.norm() * length;
    DcTransfer {
        through: Complex64::new(x.cos(), 0.0),
        cross: Complex64::i() * conj_phase(kappa) * x.sin(),
        length,
    }
}

/// The first `m_max` coupler lengths with vanishing cross power, ascending.
pub fn uncoupling_lengths(kappa: Complex64, m_max: u32) -> Result<Vec<f64>> {
    let mag = kappa.norm();
    if mag == 0.0 {
        return Err(Error::DegenerateCoupling);
    }
    ensure(m_max >= 1, || "m_max must be at least 1".into())?;
    Ok((1..=m_max).map(|m| m as f64 * PI / mag).collect())
}

/// −10 log₁₀ of the cross power, capped at [`DEFAULT_ISOLATION_CAP_DB`].
pub fn isolation_db(kappa: Complex64, length: f64) -> f64 {
    isolation_db_capped(kappa, length, DEFAULT_ISOLATION_CAP_DB)
}

pub fn isolation_db_capped(kappa: Complex64, length: f64, cap_db: f64) -> f64 {
    let cross = dc_transfer(kappa, length).cross_power();
    if cross <= 0.0 {
        return cap_db;
    }
    (-10.0 * cross.log10()).min(cap_db)
}

/// Coupler transfer efficiency when the two guides are detuned by Δβ.
///
/// η = |κ|²/(|κ|² + Δβ²) · sin²(|κ| L √(1 + (Δβ/2|κ|)²)), taken exactly in this form
/// (the prefactor and the sine argument scale Δβ differently).
pub fn kerr_detuned_efficiency(kappa: Complex64, length: f64, delta_beta: f64) -> Result<f64> {
    ensure(length > 0.0, || "coupler length must be positive".into())?;
    let k2 = kappa.norm_sqr();
    if k2 == 0.0 && delta_beta == 0.0 {
        return Err(Error::DegenerateCoupling);
    }
    // |κ| L √(1 + (Δβ/2|κ|)²) written without dividing by |κ|.
    let arg = length * (k2 + 0.25 * delta_beta * delta_beta).sqrt();
    Ok(k2 / (k2 + delta_beta * delta_beta) * arg.sin().powi(2))
}

/// Kerr-induced propagation-constant mismatch Δβ ≈ γ P 𝓕, 1/m.
pub fn kerr_delta_beta(wg: &WaveguideParams, p_in: f64, finesse: f64) -> Result<f64> {
    ensure(p_in >= 0.0, || "input power must be non-negative".into())?;
    ensure(finesse > 0.0, || "finesse must be positive".into())?;
    Ok(wg.gamma_nl * p_in * finesse)
}

/// Δβ·L at the optimal coupler length, expressed through Q: γ P λ Q / (4 n_g).
pub fn kerr_validity_metric(wg: &WaveguideParams, p_in: f64, q_loaded: f64, wavelength: f64) -> f64 {
    wg.gamma_nl * p_in * wavelength * q_loaded / (4.0 * wg.n_g)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KerrVerdict {
    pub metric: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn kerr_check(wg: &WaveguideParams, p_in: f64, q_loaded: f64, wavelength: f64, threshold: f64) -> Result<KerrVerdict> {
    ensure(p_in >= 0.0 && q_loaded > 0.0 && wavelength > 0.0, || {
        "power must be non-negative, Q and wavelength positive".into()
    })?;
    let metric = kerr_validity_metric(wg, p_in, q_loaded, wavelength);
    Ok(KerrVerdict {
        metric,
        threshold,
        pass: metric <= threshold,
    })
}
