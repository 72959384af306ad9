//! Tabulated `rho_T(delta)` curve with linear interpolation.

use std::path::Path;

use crate::error::{Error, Result};

const BUNDLED: &str = include_str!("../../data/l1_weak_transition.csv");

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCurve {
    deltas: Vec<f64>,
    rhos: Vec<f64>,
}

impl ReferenceCurve {
    /// The l1 weak-transition table shipped with the crate.
    pub fn bundled() -> Self {
        parse_reference_curve(BUNDLED).expect("bundled reference curve is well formed")
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.deltas.iter().copied().zip(self.rhos.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn delta_range(&self) -> (f64, f64) {
        (self.deltas[0], self.deltas[self.deltas.len() - 1])
    }

    /// Linear interpolation; `delta` outside the table is clamped to its ends.
    pub fn rho_at(&self, delta: f64) -> f64 {
        let d = &self.deltas;
        if delta <= d[0] {
            return self.rhos[0];
        }
        if delta >= d[d.len() - 1] {
            return self.rhos[d.len() - 1];
        }
        let hi = d.partition_point(|&v| v <= delta);
        let lo = hi - 1;
        if d[lo] == delta {
            return self.rhos[lo];
        }
        let w = (delta - d[lo]) / (d[hi] - d[lo]);
        self.rhos[lo] + w * (self.rhos[hi] - self.rhos[lo])
    }
}

/// Parse a two-column `delta,rho` table. Lines starting with `#` and blank
/// lines are skipped; an optional non-numeric header row is allowed.
/// `delta` must be strictly increasing.
pub fn parse_reference_curve(text: &str) -> Result<ReferenceCurve> {
    let mut deltas = Vec::new();
    let mut rhos = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(Error::parse(line_no, format!("expected 2 columns, found {}", fields.len())));
        }
        let parsed = (fields[0].parse::<f64>(), fields[1].parse::<f64>());
        let (delta, rho) = match parsed {
            (Ok(a), Ok(b)) => (a, b),
            _ if !header_seen && deltas.is_empty() => {
                header_seen = true;
                continue;
            }
            _ => return Err(Error::parse(line_no, format!("non-numeric row {line:?}"))),
        };
        if !(delta.is_finite() && rho.is_finite()) {
            return Err(Error::parse(line_no, "non-finite value"));
        }
        if !(0.0..=1.0).contains(&delta) || !(0.0..=1.0).contains(&rho) {
            return Err(Error::parse(line_no, "values must lie in [0, 1]"));
        }
        if let Some(&prev) = deltas.last() {
            if delta <= prev {
                return Err(Error::parse(line_no, format!("delta not increasing ({delta} after {prev})")));
            }
        }
        deltas.push(delta);
        rhos.push(rho);
    }
    if deltas.is_empty() {
        return Err(Error::invalid("reference curve has no data rows"));
    }
    Ok(ReferenceCurve { deltas, rhos })
}

pub fn load_reference_curve(path: impl AsRef<Path>) -> Result<ReferenceCurve> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_reference_curve(&text)
}
