//! Unit-suffixed command-line quantities.
//!
//! Frequencies: bare numbers are Hz; `Hz`, `kHz`, `MHz`, `GHz`, `THz` suffixes
//! are accepted, as are vacuum wavelengths with `nm`, `um` or `m`. Everything is
//! returned as angular frequency (rad/s).

use std::f64::consts::PI;

const C: f64 = 299_792_458.0;

fn split_suffix(s: &str) -> (&str, &str) {
    let s = s.trim();
    let idx = s
        .char_indices()
        .rev()
        .take_while(|(_, c)| c.is_ascii_alphabetic())
        .last()
        .map(|(i, _)| i)
        .unwrap_or(s.len());
    // A trailing exponent like `1e9` is numeric, not a unit.
    let (num, unit) = s.split_at(idx);
    if unit.eq_ignore_ascii_case("e") {
        return (s, "");
    }
    (num.trim(), unit)
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

/// Angular frequency from Hz or a vacuum wavelength.
pub fn angular_frequency(s: &str) -> Result<f64, String> {
    let (num, unit) = split_suffix(s);
    let v = number(num)?;
    let hz = match unit {
        "" | "Hz" => v,
        "kHz" => v * 1e3,
        "MHz" => v * 1e6,
        "GHz" => v * 1e9,
        "THz" => v * 1e12,
        "nm" | "um" | "m" => {
            let scale = match unit {
                "nm" => 1e-9,
                "um" => 1e-6,
                _ => 1.0,
            };
            let lambda = v * scale;
            if lambda <= 0.0 {
                return Err(format!("wavelength `{s}` must be positive"));
            }
            C / lambda
        }
        other => return Err(format!("unknown frequency unit `{other}` in `{s}`")),
    };
    Ok(2.0 * PI * hz)
}

/// Vacuum wavelength in m from a wavelength or a frequency.
pub fn wavelength(s: &str) -> Result<f64, String> {
    let (num, unit) = split_suffix(s);
    match unit {
        "" => number(num),
        "nm" => Ok(number(num)? * 1e-9),
        "um" => Ok(number(num)? * 1e-6),
        "m" => number(num),
        _ => Ok(2.0 * PI * C / angular_frequency(s)?),
    }
}

/// Power in W; `W`, `mW`, `uW` suffixes.
pub fn power(s: &str) -> Result<f64, String> {
    let (num, unit) = split_suffix(s);
    let v = number(num)?;
    match unit {
        "" | "W" => Ok(v),
        "mW" => Ok(v * 1e-3),
        "uW" => Ok(v * 1e-6),
        other => Err(format!("unknown power unit `{other}` in `{s}`")),
    }
}

/// `lo:hi` pair of angular frequencies, returned in ascending order.
pub fn band(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("band `{s}` must look like lo:hi"))?;
    let (a, b) = (angular_frequency(a)?, angular_frequency(b)?);
    Ok((a.min(b), a.max(b)))
}

/// `lo:hi` pair of plain numbers.
pub fn range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("range `{s}` must look like lo:hi"))?;
    Ok((number(a.trim())?, number(b.trim())?))
}
