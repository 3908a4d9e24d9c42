use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::spine::{ForceSample, SampleDirection, SpineConfig};

/// One force-gauge reading. CSV columns: `trial,direction,h_m,f_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeSample {
    pub trial: u32,
    pub direction: SampleDirection,
    pub h_m: f64,
    pub f_n: f64,
}

impl GaugeSample {
    pub fn force_sample(&self) -> ForceSample {
        ForceSample { h: self.h_m, f: self.f_n, direction: self.direction }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CharacterizeOptions {
    pub trials: u32,
    /// Slider friction magnitude, N.
    pub friction_f0: f64,
    /// Gauge noise standard deviation, N.
    pub sigma: f64,
    /// Samples per one-way sweep.
    pub points: usize,
    /// Drop extension readings when friction exceeds the spine force
    /// anywhere on the sweep (the spine sticks instead of extending).
    pub clogging: bool,
    pub seed: u64,
}

impl Default for CharacterizeOptions {
    fn default() -> Self {
        Self { trials: 20, friction_f0: 3.0, sigma: 0.5, points: 121, clogging: false, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationRun {
    pub config: String,
    pub trials: u32,
    pub friction_f0: f64,
    pub sigma: f64,
    pub speed_profile: String,
    /// Set when clogging suppressed the extension sweeps.
    pub extension_clogged: bool,
    pub samples: Vec<GaugeSample>,
}

/// Simulated gauge campaign: each trial sweeps from `h_max` down to `h_min`
/// (compression) and back up (extension).
pub fn characterize(cfg: &SpineConfig, opts: &CharacterizeOptions) -> Result<CharacterizationRun, HarnessError> {
    if opts.trials < 1 {
        return Err(HarnessError::Config("trials must be at least 1".into()));
    }
    if !(opts.friction_f0 >= 0.0) || !(opts.sigma >= 0.0) {
        return Err(HarnessError::Config("friction_f0 and sigma must be non-negative".into()));
    }
    if opts.points < 2 {
        return Err(HarnessError::Config("a sweep needs at least 2 points".into()));
    }
    cfg.validate()?;
    let g = &cfg.geometry;
    let step = (g.h_max - g.h_min) / (opts.points - 1) as f64;
    let down: Vec<f64> = (0..opts.points).map(|i| g.h_max - step * i as f64).collect();
    let model: Vec<f64> = down.iter().map(|&h| cfg.spine_force(h)).collect::<Result<_, _>>()?;

    let clogged = opts.clogging && model.iter().any(|&f| opts.friction_f0 > f);
    let noise = Normal::new(0.0, opts.sigma).map_err(|e| HarnessError::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut samples = Vec::with_capacity(opts.trials as usize * opts.points * 2);
    for trial in 0..opts.trials {
        for (&h, &f) in down.iter().zip(&model) {
            let e = noise.sample(&mut rng);
            samples.push(GaugeSample { trial, direction: SampleDirection::Compression, h_m: h, f_n: f + opts.friction_f0 + e });
        }
        for (&h, &f) in down.iter().zip(&model).rev() {
            let e = noise.sample(&mut rng);
            if !clogged {
                samples.push(GaugeSample { trial, direction: SampleDirection::Extension, h_m: h, f_n: f - opts.friction_f0 + e });
            }
        }
    }
    Ok(CharacterizationRun {
        config: cfg.name.clone(),
        trials: opts.trials,
        friction_f0: opts.friction_f0,
        sigma: opts.sigma,
        speed_profile: format!("uniform {} points per sweep, down then up", opts.points),
        extension_clogged: clogged,
        samples,
    })
}

pub fn write_samples<W: Write>(w: W, samples: &[GaugeSample]) -> Result<(), HarnessError> {
    let mut wr = csv::Writer::from_writer(w);
    for s in samples {
        wr.serialize(s)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_samples<R: Read>(r: R) -> Result<Vec<GaugeSample>, HarnessError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    Ok(rdr.deserialize().collect::<Result<Vec<GaugeSample>, _>>()?)
}
