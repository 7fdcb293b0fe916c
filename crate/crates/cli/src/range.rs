//! Parameter list syntax shared by every grid flag.
//!
//! Integers: `5`, `3,4,7` or an inclusive range `3:10`.
//! Reals: `0.01`, `0,0.01,0.05`, a linspace `start:stop:count`, or a
//! geometric sweep `start:stop:count:log`. Comma lists may mix both forms.

use anyhow::{bail, Context, Result};

fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().with_context(|| format!("not a number: {s:?}"))?;
    if !v.is_finite() {
        bail!("not a finite number: {s:?}");
    }
    Ok(v)
}

fn sweep(parts: &[&str]) -> Result<Vec<f64>> {
    let (start, stop) = (parse_f64(parts[0])?, parse_f64(parts[1])?);
    let count: usize = parts[2].trim().parse().with_context(|| format!("bad count {:?}", parts[2]))?;
    if count == 0 {
        bail!("a sweep needs at least one point");
    }
    let log = match parts.get(3).map(|s| s.trim()) {
        None | Some("lin") => false,
        Some("log") => true,
        Some(other) => bail!("unknown sweep spacing {other:?}, expected lin or log"),
    };
    if log && !(start > 0.0 && stop > 0.0) {
        bail!("a log sweep needs positive endpoints");
    }
    let t = |i: usize| if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
    Ok((0..count)
        .map(|i| {
            if log {
                (start.ln() + (stop.ln() - start.ln()) * t(i)).exp()
            } else {
                start + (stop - start) * t(i)
            }
        })
        .collect())
}

pub fn parse_reals(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.len() {
            1 => out.push(parse_f64(parts[0])?),
            3 | 4 => out.extend(sweep(&parts)?),
            _ => bail!("expected a value or start:stop:count[:log], got {item:?}"),
        }
    }
    if out.is_empty() {
        bail!("empty parameter list");
    }
    Ok(out)
}

pub fn parse_ints(text: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let int = |s: &str| s.trim().parse::<u32>().with_context(|| format!("not a non-negative integer: {s:?}"));
        match item.split_once(':') {
            None => out.push(int(item)?),
            Some((a, b)) => {
                let (a, b) = (int(a)?, int(b)?);
                if a > b {
                    bail!("empty range {item:?}");
                }
                out.extend(a..=b);
            }
        }
    }
    if out.is_empty() {
        bail!("empty parameter list");
    }
    Ok(out)
}
