//! Grid and number syntax accepted on the command line and in config files.

use num_complex::Complex64 as C64;

use crate::error::{CliError, Result};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Comma-separated integers and `start:stop:step` ranges (both ends inclusive).
pub fn parse_usize_grid(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| usage(format!("bad integer `{s}` in `{text}`")))
        };
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b] | [a, b, _] => {
                let (start, stop) = (num(a)?, num(b)?);
                let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
                if step == 0 {
                    return Err(usage(format!("zero step in `{item}`")));
                }
                if stop < start {
                    return Err(usage(format!("empty range `{item}`")));
                }
                out.extend((start..=stop).step_by(step));
            }
            _ => return Err(usage(format!("bad range `{item}`"))),
        }
    }
    if out.is_empty() {
        return Err(usage(format!("empty grid `{text}`")));
    }
    Ok(out)
}

/// Comma-separated reals and `start:stop:step` ranges (stop included within 1e-9 of a step).
pub fn parse_f64_grid(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| usage(format!("bad number `{s}` in `{text}`")))
        };
        match parts.as_slice() {
            [v] => out.push(num(v)?),
            [a, b, c] => {
                let (start, stop, step) = (num(a)?, num(b)?, num(c)?);
                if step.is_nan() || step <= 0.0 || stop < start {
                    return Err(usage(format!("bad range `{item}`")));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|i| start + step * i as f64));
            }
            _ => return Err(usage(format!("bad range `{item}`"))),
        }
    }
    if out.is_empty() {
        return Err(usage(format!("empty grid `{text}`")));
    }
    Ok(out)
}

/// A complex number written as `re`, `re+imi`, `re-imi`, `imi` or `r@phase` (radians).
pub fn parse_complex(text: &str) -> Result<C64> {
    let t = text.trim().replace(' ', "");
    let bad = || usage(format!("bad complex number `{text}`"));
    let real = |s: &str| {
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(bad)
    };
    if let Some((r, phi)) = t.split_once('@') {
        return Ok(C64::from_polar(real(r)?, real(phi)?));
    }
    if let Some(body) = t.strip_suffix('i') {
        // Split at the last sign that is not part of an exponent or the leading sign.
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&i| {
            (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E')
        });
        return match split {
            Some(i) => Ok(C64::new(
                real(&body[..i])?,
                imag_part(&body[i..]).ok_or_else(bad)?,
            )),
            None => Ok(C64::new(0.0, imag_part(body).ok_or_else(bad)?)),
        };
    }
    Ok(C64::new(real(&t)?, 0.0))
}

fn imag_part(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => s.parse::<f64>().ok().filter(|x| x.is_finite()),
    }
}

/// Comma-separated complex numbers.
pub fn parse_complex_list(text: &str) -> Result<Vec<C64>> {
    let out: Vec<C64> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_complex)
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(usage(format!("empty list `{text}`")));
    }
    Ok(out)
}

/// `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key=value", lineno + 1)))?;
        let key = k.trim().trim_start_matches("--").to_owned();
        if key.is_empty() {
            return Err(usage(format!("config line {}: empty key", lineno + 1)));
        }
        out.push((key, v.trim().to_owned()));
    }
    Ok(out)
}
