//! Sweep ranges written `start:stop:count`, endpoints included.

use crate::error::{CliError, Result};

/// Upper bound on grid points in one sweep.
pub const MAX_POINTS: usize = 1_000_000;

pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let bad = |msg: &str| CliError::Validation(format!("range `{text}`: {msg}"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("expected start:stop:count"));
    }
    let num = |s: &str, what: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().map_err(|_| bad(&format!("{what} `{s}` is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad(&format!("{what} must be finite")))
        }
    };
    let start = num(parts[0], "start")?;
    let stop = num(parts[1], "stop")?;
    let count: usize = parts[2].trim().parse().map_err(|_| bad("count must be a non-negative integer"))?;
    if count == 0 {
        return Err(bad("range is empty"));
    }
    if count > MAX_POINTS {
        return Err(bad(&format!("count exceeds {MAX_POINTS}")));
    }
    if count == 1 {
        if start != stop {
            return Err(bad("a single point needs start == stop"));
        }
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    if !step.is_finite() {
        return Err(bad("step overflows"));
    }
    Ok((0..count).map(|i| if i + 1 == count { stop } else { start + step * i as f64 }).collect())
}
