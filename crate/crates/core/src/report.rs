// Copyright 2026 The qudit-mintime Authors
// SPDX-License-Identifier: Apache-2.0

//! Run artifacts: spline pulses as JSON and CSV tables with lossless floats.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::controls::{unpack_coefficients, ControlSpline};
use crate::error::{Error, Result};

/// Formats `v` with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Spline coefficients of one qudit's drive, rad/ns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuditPulse {
    pub alpha_real: Vec<f64>,
    pub alpha_imag: Vec<f64>,
}

/// The `pulse.json` payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseFile {
    pub duration_ns: f64,
    pub n_splines: usize,
    pub units: String,
    pub qudits: Vec<QuditPulse>,
}

impl PulseFile {
    pub fn from_coefficients(coeffs: &[f64], n_qudits: usize, duration: f64) -> Result<Self> {
        if n_qudits == 0 || !coeffs.len().is_multiple_of(2 * n_qudits) {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients do not split over {n_qudits} qudits",
                coeffs.len()
            )));
        }
        let n_splines = coeffs.len() / (2 * n_qudits);
        let controls = unpack_coefficients(coeffs, n_qudits, n_splines, duration)?;
        Ok(Self::from_controls(&controls))
    }

    pub fn from_controls(controls: &[ControlSpline]) -> Self {
        Self {
            duration_ns: controls.first().map_or(0.0, ControlSpline::duration),
            n_splines: controls.first().map_or(0, ControlSpline::n_splines),
            units: "rad/ns".into(),
            qudits: controls
                .iter()
                .map(|c| QuditPulse { alpha_real: c.alpha_real().to_vec(), alpha_imag: c.alpha_imag().to_vec() })
                .collect(),
        }
    }

    pub fn to_controls(&self) -> Result<Vec<ControlSpline>> {
        self.qudits
            .iter()
            .map(|q| ControlSpline::new(q.alpha_real.clone(), q.alpha_imag.clone(), self.duration_ns))
            .collect()
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Writes a CSV table; every row must have one cell per header entry.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::InvalidArgument(format!("row has {} cells, header {}", row.len(), header.len())));
        }
        w.write_record(row).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn seventeen_digits_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn pulse_file_splits_qudits() {
        let coeffs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let p = PulseFile::from_coefficients(&coeffs, 2, 12.0).unwrap();
        assert_eq!(p.n_splines, 2);
        assert_eq!(p.qudits[1].alpha_real, vec![5.0, 6.0]);
        assert_eq!(p.qudits[1].alpha_imag, vec![7.0, 8.0]);
        assert!(PulseFile::from_coefficients(&coeffs[..6], 2, 12.0).is_err());
        let back = p.to_controls().unwrap();
        assert_eq!(back[0].alpha_imag(), &[3.0, 4.0]);
    }
}
