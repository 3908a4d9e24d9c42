use serde::{Deserialize, Serialize};

use super::{ModelError, DOMAIN_GUARD};

/// Scissor-lift linkage dimensions and the allowed extension window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScissorGeometry {
    /// Number of scissor segments.
    pub n: u32,
    /// Short (end-plate) link half-length.
    pub l1: f64,
    /// Middle link half-length.
    pub l2: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Installment offset: physical spine length is `H + delta_h`.
    pub delta_h: f64,
}

impl ScissorGeometry {
    /// The prototype's linkage: three segments, 0.03/0.06 m links, 0.08-0.20 m travel.
    pub const PROTOTYPE: ScissorGeometry = ScissorGeometry {
        n: 3,
        l1: 0.03,
        l2: 0.06,
        h_min: 0.08,
        h_max: 0.20,
        delta_h: 0.04,
    };

    pub fn new(
        n: u32,
        l1: f64,
        l2: f64,
        h_min: f64,
        h_max: f64,
        delta_h: f64,
    ) -> Result<Self, ModelError> {
        let g = ScissorGeometry {
            n,
            l1,
            l2,
            h_min,
            h_max,
            delta_h,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: String| Err(ModelError::Config(msg));
        if self.n < 1 {
            return bad("scissor segment count must be at least 1".into());
        }
        if !(self.l1 > 0.0 && self.l1.is_finite()) || !(self.l2 > 0.0 && self.l2.is_finite()) {
            return bad(format!("link lengths must be positive (l1={}, l2={})", self.l1, self.l2));
        }
        let reach = self.max_extension();
        if !(0.0 < self.h_min && self.h_min < self.h_max && self.h_max < reach) {
            return bad(format!(
                "need 0 < h_min < h_max < {reach} (got h_min={}, h_max={})",
                self.h_min, self.h_max
            ));
        }
        if !(self.delta_h >= 0.0) {
            return bad(format!("installment offset must be non-negative (got {})", self.delta_h));
        }
        Ok(())
    }

    /// Transformed segment count `n' = 1 + (n - 1) l2 / l1`.
    pub fn transformed_segment_count(&self) -> f64 {
        1.0 + (self.n as f64 - 1.0) * self.l2 / self.l1
    }

    /// Extension reached with a fully closed actuation span (`d = 0`).
    pub fn max_extension(&self) -> f64 {
        2.0 * self.l1 * self.transformed_segment_count()
    }

    /// Spine extension produced by actuation span `d`.
    pub fn extension_from_span(&self, d: f64) -> Result<f64, ModelError> {
        let hi = 2.0 * self.l1;
        if !(d >= -DOMAIN_GUARD && d < hi) {
            return Err(ModelError::Domain {
                what: "actuation span d",
                value: d,
                lo: 0.0,
                hi,
            });
        }
        let d = d.max(0.0);
        let w = 2.0 * self.l1;
        Ok(self.transformed_segment_count() * ((w - d) * (w + d)).sqrt())
    }

    /// Actuation span needed to reach extension `h`.
    pub fn span_from_extension(&self, h: f64) -> Result<f64, ModelError> {
        let reach = self.max_extension();
        if !(h > 0.0 && h <= reach + DOMAIN_GUARD) {
            return Err(ModelError::Domain {
                what: "extension H",
                value: h,
                lo: 0.0,
                hi: reach,
            });
        }
        let r = (h.min(reach)) / self.transformed_segment_count();
        let w = 2.0 * self.l1;
        Ok(((w - r) * (w + r)).max(0.0).sqrt())
    }

    /// Physical spine length for a given extension.
    pub fn spine_length(&self, h: f64) -> f64 {
        h + self.delta_h
    }
}

impl Default for ScissorGeometry {
    fn default() -> Self {
        Self::PROTOTYPE
    }
}
