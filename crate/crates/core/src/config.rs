//! On-disk device document.
//!
//! Files use SI lengths (m) and ordinary frequencies (Hz); the in-memory model
//! works in angular frequency. The only conversions are `freq_ref` and
//! `heater_shift`, both multiplied by 2π on load.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::consts::TWO_PI;
use crate::error::{Error, Result};
use crate::geometry::{CouplingModel, DeviceSpec, RacetrackSpec, WaveguideParams};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideDoc {
    pub n_eff_ref: f64,
    pub n_g: f64,
    /// Reference frequency, Hz.
    pub freq_ref: f64,
    /// β₂, s²/m.
    #[serde(default)]
    pub gvd: Option<f64>,
    /// γ, 1/(W·m).
    pub gamma_nl: f64,
    /// χ̄₃, m²/V².
    pub chi3_bar: f64,
    pub n_bar: f64,
    /// Effective area, m².
    pub area_eff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDoc {
    pub straight_len: f64,
    pub bend_radius: f64,
    pub q_intrinsic: f64,
    pub q_coupling: f64,
    /// Hz.
    #[serde(default)]
    pub heater_shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DcDoc {
    pub dc_length: f64,
    pub dc_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceDoc {
    pub schema: u32,
    pub waveguide: WaveguideDoc,
    pub ring1: RingDoc,
    pub ring2: RingDoc,
    pub dc: DcDoc,
    /// κ₀ in 1/m, lengths in m, phase in rad.
    pub coupling_model: CouplingModel,
}

impl RingDoc {
    fn to_spec(self) -> RacetrackSpec {
        RacetrackSpec {
            straight_len: self.straight_len,
            bend_radius: self.bend_radius,
            q_intrinsic: self.q_intrinsic,
            q_coupling: self.q_coupling,
            heater_shift: TWO_PI * self.heater_shift,
        }
    }

    fn from_spec(r: &RacetrackSpec) -> Self {
        RingDoc {
            straight_len: r.straight_len,
            bend_radius: r.bend_radius,
            q_intrinsic: r.q_intrinsic,
            q_coupling: r.q_coupling,
            heater_shift: r.heater_shift / TWO_PI,
        }
    }
}

impl DeviceDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        match value.get("schema") {
            Some(v) if v.as_u64() == Some(SCHEMA_VERSION as u64) => {}
            Some(v) => return Err(Error::Schema(format!("unsupported schema {v}, expected {SCHEMA_VERSION}"))),
            None => return Err(Error::Schema("missing \"schema\" key".into())),
        }
        serde_json::from_value(value).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("device document serializes")
    }

    /// Validated in-memory device.
    pub fn to_spec(&self) -> Result<DeviceSpec> {
        let w = &self.waveguide;
        let spec = DeviceSpec {
            waveguide: WaveguideParams {
                n_eff_ref: w.n_eff_ref,
                n_g: w.n_g,
                omega_ref: TWO_PI * w.freq_ref,
                gvd: w.gvd,
                gamma_nl: w.gamma_nl,
                chi3_bar: w.chi3_bar,
                n_bar: w.n_bar,
                area_eff: w.area_eff,
            },
            ring1: self.ring1.to_spec(),
            ring2: self.ring2.to_spec(),
            dc_length: self.dc.dc_length,
            dc_gap: self.dc.dc_gap,
            kappa_model: self.coupling_model,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_spec(spec: &DeviceSpec) -> Self {
        let w = &spec.waveguide;
        DeviceDoc {
            schema: SCHEMA_VERSION,
            waveguide: WaveguideDoc {
                n_eff_ref: w.n_eff_ref,
                n_g: w.n_g,
                freq_ref: w.omega_ref / TWO_PI,
                gvd: w.gvd,
                gamma_nl: w.gamma_nl,
                chi3_bar: w.chi3_bar,
                n_bar: w.n_bar,
                area_eff: w.area_eff,
            },
            ring1: RingDoc::from_spec(&spec.ring1),
            ring2: RingDoc::from_spec(&spec.ring2),
            dc: DcDoc { dc_length: spec.dc_length, dc_gap: spec.dc_gap },
            coupling_model: spec.kappa_model,
        }
    }

    fn leaf<'a>(value: &'a mut Value, path: &str) -> Result<&'a mut Value> {
        let mut cur = value;
        for key in path.split('.') {
            cur = cur
                .get_mut(key)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown parameter path `{path}`")))?;
        }
        if !cur.is_number() {
            return Err(Error::InvalidParameter(format!("`{path}` is not a numeric field")));
        }
        Ok(cur)
    }

    /// Numeric field addressed by a dotted path such as `ring2.heater_shift`, in
    /// file units.
    pub fn get(&self, path: &str) -> Result<f64> {
        let mut v = serde_json::to_value(self).expect("device document serializes");
        Ok(Self::leaf(&mut v, path)?.as_f64().unwrap_or(f64::NAN))
    }

    /// Copy with the field at `path` set to `x` (file units).
    pub fn with(&self, path: &str, x: f64) -> Result<Self> {
        if path == "schema" {
            return Err(Error::InvalidParameter("`schema` cannot be swept".into()));
        }
        let num = serde_json::Number::from_f64(x)
            .ok_or_else(|| Error::InvalidParameter(format!("{x} is not a finite number")))?;
        let mut v = serde_json::to_value(self).expect("device document serializes");
        *Self::leaf(&mut v, path)? = Value::Number(num);
        Self::from_value(v)
    }
}
