use serde::{Deserialize, Serialize};

use super::{from_nm, to_nm, LockError};

/// One-sided CUSUM detecting a drop of the spine length below its locked value.
///
/// `g' = max(0, g + (mu_ref - x) - kappa)`, alarm when `g' > h`, reset on alarm.
/// The statistic is accumulated in integer nanometers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CusumDetector {
    mu_ref: i64,
    kappa: i64,
    threshold: i64,
    g: i64,
}

impl CusumDetector {
    pub const DEFAULT_KAPPA: f64 = 0.002;
    pub const DEFAULT_THRESHOLD: f64 = 0.006;

    pub fn new(mu_ref: f64, kappa: f64, threshold: f64) -> Result<Self, LockError> {
        if !(kappa > 0.0) || !(threshold > 0.0) || !mu_ref.is_finite() {
            return Err(LockError::Config(format!(
                "cusum needs kappa > 0 and threshold > 0 (got {kappa}, {threshold})"
            )));
        }
        Ok(Self {
            mu_ref: to_nm(mu_ref),
            kappa: to_nm(kappa),
            threshold: to_nm(threshold),
            g: 0,
        })
    }

    pub fn with_defaults(mu_ref: f64) -> Self {
        Self::new(mu_ref, Self::DEFAULT_KAPPA, Self::DEFAULT_THRESHOLD).expect("defaults are valid")
    }

    /// Re-arms the detector at a new reference level with a cleared statistic.
    pub fn arm(&mut self, mu_ref: f64) {
        self.mu_ref = to_nm(mu_ref);
        self.g = 0;
    }

    pub fn update(&mut self, x: f64) -> bool {
        let innovation = self.mu_ref - to_nm(x);
        self.g = (self.g + innovation - self.kappa).max(0);
        if self.g > self.threshold {
            self.g = 0;
            true
        } else {
            false
        }
    }

    pub fn statistic(&self) -> f64 {
        from_nm(self.g)
    }

    pub fn mu_ref(&self) -> f64 {
        from_nm(self.mu_ref)
    }

    pub fn kappa(&self) -> f64 {
        from_nm(self.kappa)
    }

    pub fn threshold(&self) -> f64 {
        from_nm(self.threshold)
    }
}

/// Value-semantics form of [`CusumDetector::update`].
pub fn cusum_update(mut det: CusumDetector, x: f64) -> (CusumDetector, bool) {
    let alarm = det.update(x);
    (det, alarm)
}
