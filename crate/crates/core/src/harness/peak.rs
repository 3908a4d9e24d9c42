use std::fmt;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::spine::{ModelError, SpineConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakReport {
    pub schema_version: u32,
    pub config: String,
    pub ks: f64,
    /// `None` when the force is monotone over its domain.
    pub h_peak: Option<f64>,
    pub f_peak: Option<f64>,
    pub h_min: f64,
    pub h_max: f64,
    pub f_at_h_min: f64,
    pub f_at_h_max: f64,
    /// `h_max - h_peak`, m.
    pub h_max_minus_h_peak: Option<f64>,
    /// Whether the peak lies inside the travel `[h_min, h_max]`.
    pub peak_in_travel: Option<bool>,
}

pub fn peak_report(cfg: &SpineConfig) -> Result<PeakReport, HarnessError> {
    cfg.validate()?;
    let g = &cfg.geometry;
    let (h_peak, f_peak) = match cfg.peak_extension() {
        Ok((h, f)) => (Some(h), Some(f)),
        Err(ModelError::NoInteriorPeak { .. }) => (None, None),
        Err(e) => return Err(e.into()),
    };
    Ok(PeakReport {
        schema_version: super::SCHEMA_VERSION,
        config: cfg.name.clone(),
        ks: cfg.ks(),
        h_peak,
        f_peak,
        h_min: g.h_min,
        h_max: g.h_max,
        f_at_h_min: cfg.spine_force(g.h_min)?,
        f_at_h_max: cfg.spine_force(g.h_max)?,
        h_max_minus_h_peak: h_peak.map(|h| g.h_max - h),
        peak_in_travel: h_peak.map(|h| (g.h_min..=g.h_max).contains(&h)),
    })
}

impl fmt::Display for PeakReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "config        {}", self.config)?;
        writeln!(f, "Ks            {:.1} N/m", self.ks)?;
        match (self.h_peak, self.f_peak) {
            (Some(h), Some(fp)) => {
                writeln!(f, "H_peak        {h:.4} m")?;
                writeln!(f, "F_peak        {fp:.3} N")?;
            }
            _ => writeln!(f, "H_peak        no interior peak (force is monotone)")?,
        }
        writeln!(f, "F(H_min)      {:.3} N at {:.3} m", self.f_at_h_min, self.h_min)?;
        writeln!(f, "F(H_max)      {:.3} N at {:.3} m", self.f_at_h_max, self.h_max)?;
        if let (Some(d), Some(inside)) = (self.h_max_minus_h_peak, self.peak_in_travel) {
            let place = if inside { "inside" } else { "outside" };
            writeln!(f, "H_max-H_peak  {d:+.4} m (peak {place} travel)")?;
        }
        Ok(())
    }
}
