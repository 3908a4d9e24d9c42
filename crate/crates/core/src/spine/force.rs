use serde::{Deserialize, Serialize};

use super::numeric::{adaptive_simpson, brent_maximize};
use super::{ModelError, ScissorGeometry, DOMAIN_GUARD};

/// One group of identical springs mounted across the actuation span.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpringSpec {
    /// Spring constant of a single spring, N/m.
    pub k: f64,
    /// Rest length, m.
    pub d0: f64,
    pub count: u32,
}

impl SpringSpec {
    pub const SOFT: f64 = 224.0;
    pub const STIFF: f64 = 364.0;
    pub const REST_LENGTH: f64 = 0.096;

    pub fn new(k: f64, d0: f64, count: u32) -> Result<Self, ModelError> {
        let s = SpringSpec { k, d0, count };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<(), ModelError> {
        if !(self.k > 0.0 && self.k.is_finite()) || !(self.d0 > 0.0) || self.count < 1 {
            return Err(ModelError::Config(format!(
                "spring needs k > 0, d0 > 0, count >= 1 (got k={}, d0={}, count={})",
                self.k, self.d0, self.count
            )));
        }
        Ok(())
    }
}

/// Aggregate constant of springs acting in parallel across the same span.
pub fn effective_spring_constant(springs: &[SpringSpec]) -> Result<f64, ModelError> {
    if springs.is_empty() {
        return Err(ModelError::Config("spring list is empty".into()));
    }
    for s in springs {
        s.validate()?;
    }
    Ok(springs.iter().map(|s| s.k * s.count as f64).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleDirection {
    Compression,
    Extension,
    Model,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceSample {
    pub h: f64,
    pub f: f64,
    pub direction: SampleDirection,
}

/// A complete spine: linkage, spring set and zero-force extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpineConfig {
    pub name: String,
    pub geometry: ScissorGeometry,
    pub springs: Vec<SpringSpec>,
    /// Extension at which the spine force vanishes. May lie past `h_max`
    /// when the springs are pre-tensioned.
    pub h0: f64,
}

impl SpineConfig {
    pub const DEFAULT_H0: f64 = 0.24;

    pub fn new(
        name: impl Into<String>,
        geometry: ScissorGeometry,
        springs: Vec<SpringSpec>,
        h0: f64,
    ) -> Result<Self, ModelError> {
        let cfg = SpineConfig {
            name: name.into(),
            geometry,
            springs,
            h0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.geometry.validate()?;
        effective_spring_constant(&self.springs)?;
        let reach = self.geometry.max_extension();
        if !(self.h0 > 0.0) || self.h0 > reach + DOMAIN_GUARD {
            return Err(ModelError::Config(format!(
                "zero-force extension h0={} must lie in (0, {reach}]",
                self.h0
            )));
        }
        Ok(())
    }

    /// Four soft springs.
    pub fn weak() -> Self {
        Self::prototype("weak", vec![Self::soft(4)])
    }

    /// Four stiff springs.
    pub fn medium() -> Self {
        Self::prototype("medium", vec![Self::stiff(4)])
    }

    /// Four soft plus four stiff springs.
    pub fn strong() -> Self {
        Self::prototype("strong", vec![Self::soft(4), Self::stiff(4)])
    }

    pub fn named(name: &str) -> Option<Self> {
        match name {
            "weak" => Some(Self::weak()),
            "medium" => Some(Self::medium()),
            "strong" => Some(Self::strong()),
            _ => None,
        }
    }

    fn soft(count: u32) -> SpringSpec {
        SpringSpec { k: SpringSpec::SOFT, d0: SpringSpec::REST_LENGTH, count }
    }

    fn stiff(count: u32) -> SpringSpec {
        SpringSpec { k: SpringSpec::STIFF, d0: SpringSpec::REST_LENGTH, count }
    }

    fn prototype(name: &str, springs: Vec<SpringSpec>) -> Self {
        SpineConfig {
            name: name.into(),
            geometry: ScissorGeometry::PROTOTYPE,
            springs,
            h0: Self::DEFAULT_H0,
        }
    }

    /// Parallel sum of all spring constants.
    pub fn ks(&self) -> f64 {
        self.springs.iter().map(|s| s.k * s.count as f64).sum()
    }

    /// Same linkage with every spring constant multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for s in &mut out.springs {
            s.k *= c;
        }
        out
    }

    /// Upper end of the force-law domain, `min(h0, 2 l1 n')`.
    pub fn force_domain_upper(&self) -> f64 {
        self.h0.min(self.geometry.max_extension())
    }

    fn check_extension(&self, h: f64) -> Result<f64, ModelError> {
        let upper = self.force_domain_upper();
        if !(h > 0.0 && h <= upper + DOMAIN_GUARD) {
            return Err(ModelError::Domain {
                what: "extension H",
                value: h,
                lo: 0.0,
                hi: upper,
            });
        }
        Ok(h.min(upper))
    }

    /// `4 l1^2 n'^2 / h^2 - 1`, shared by numerator and denominator of the force law.
    fn reach_ratio(&self, h: f64) -> f64 {
        let g = &self.geometry;
        let np = g.transformed_segment_count();
        let b = 4.0 * g.l1 * g.l1 * np * np;
        b / (h * h) - 1.0
    }

    fn nonlinear_unscaled(&self, h: f64) -> f64 {
        let num = self.reach_ratio(self.h0);
        if num <= 0.0 {
            // h0 sits at the linkage reach: the spring term vanishes identically
            return 0.0;
        }
        let den = self.reach_ratio(h);
        let np = self.geometry.transformed_segment_count();
        -(2.0 / np) * self.h0 * (num / den).sqrt()
    }

    /// Expansive spine force at extension `h` (positive pushes the end plates apart).
    pub fn spine_force(&self, h: f64) -> Result<f64, ModelError> {
        let (lin, nonlin) = self.force_decomposition(h)?;
        Ok(lin + nonlin)
    }

    /// Splits the force into the part linear in `h` and the geometric remainder.
    pub fn force_decomposition(&self, h: f64) -> Result<(f64, f64), ModelError> {
        let h = self.check_extension(h)?;
        let np = self.geometry.transformed_segment_count();
        let ks = self.ks();
        let lin = (2.0 / np) * h * ks;
        let nonlin = self.nonlinear_unscaled(h) * ks;
        Ok((lin, nonlin))
    }

    /// Extension of maximum force and the force there.
    pub fn peak_extension(&self) -> Result<(f64, f64), ModelError> {
        const SCAN: usize = 400;
        let upper = self.force_domain_upper();
        let f = |h: f64| self.spine_force(h).unwrap_or(f64::NEG_INFINITY);
        let step = upper / SCAN as f64;
        let mut best = 1;
        let mut best_f = f64::NEG_INFINITY;
        for i in 1..SCAN {
            let v = f(i as f64 * step);
            if v > best_f {
                best_f = v;
                best = i;
            }
        }
        let lo = (best - 1) as f64 * step;
        let hi = ((best + 1) as f64 * step).min(upper);
        let (h, fh) = brent_maximize(f, lo.max(step * 1e-3), hi, 1e-9);
        if upper - h < 1e-6 {
            return Err(ModelError::NoInteriorPeak { upper });
        }
        Ok((h, fh))
    }

    /// Signed work of the spine force from `h_from` to `h_to`.
    pub fn stored_elastic_energy(&self, h_from: f64, h_to: f64) -> Result<f64, ModelError> {
        let a = self.check_extension(h_from)?;
        let b = self.check_extension(h_to)?;
        Ok(adaptive_simpson(
            |h| self.spine_force(h).expect("integrand inside checked interval"),
            a,
            b,
            1e-9,
        ))
    }
}
