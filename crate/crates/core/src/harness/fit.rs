use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{GaugeSample, HarnessError};
use crate::spine::SampleDirection;

const WINDOW: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReport {
    pub input: usize,
    pub decimated: usize,
    /// Indices (into the decimated sequence) of the samples dropped as outliers.
    pub removed: Vec<usize>,
    pub kept: Vec<GaugeSample>,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Decimates, then drops samples whose force is more than `k` median absolute
/// deviations from the rolling median of their neighbours.
///
/// The rolling window never crosses a change of trial or sweep direction; at
/// run ends it is shifted inward to keep its full width.
pub fn preprocess(samples: &[GaugeSample], decimation: usize, k: f64) -> Result<FilterReport, HarnessError> {
    if samples.is_empty() {
        return Err(HarnessError::Data("no samples to preprocess".into()));
    }
    if decimation < 1 {
        return Err(HarnessError::Config("decimation must be at least 1".into()));
    }
    if !(k > 0.0) {
        return Err(HarnessError::Config("outlier k must be positive".into()));
    }
    let dec: Vec<GaugeSample> = samples.iter().step_by(decimation).copied().collect();

    let mut removed = Vec::new();
    let mut start = 0;
    while start < dec.len() {
        let mut end = start + 1;
        while end < dec.len() && dec[end].trial == dec[start].trial && dec[end].direction == dec[start].direction {
            end += 1;
        }
        let run = &dec[start..end];
        let w = WINDOW.min(run.len());
        for i in 0..run.len() {
            let lo = i.saturating_sub(w / 2).min(run.len() - w);
            let mut win: Vec<f64> = run[lo..lo + w].iter().map(|s| s.f_n).collect();
            let med = median(&mut win);
            let mut dev: Vec<f64> = win.iter().map(|f| (f - med).abs()).collect();
            let mad = median(&mut dev);
            if (run[i].f_n - med).abs() > k * mad {
                removed.push(start + i);
            }
        }
        start = end;
    }
    if removed.len() == dec.len() {
        return Err(HarnessError::Data(format!("outlier filter removed every sample; loosen k (was {k})")));
    }
    let kept = dec.iter().enumerate().filter(|(i, _)| removed.binary_search(i).is_err()).map(|(_, s)| *s).collect();
    Ok(FilterReport { input: samples.len(), decimated: dec.len(), removed, kept })
}

/// `F ~ a0 + a1 H + a2 H^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub residual_rms: f64,
    pub n: usize,
    pub direction: Option<SampleDirection>,
}

impl FitResult {
    pub fn eval(&self, h: f64) -> f64 {
        self.a0 + h * (self.a1 + h * self.a2)
    }
}

/// Least-squares quadratic through `(h, f)` pairs.
///
/// Solved by QR on a centered and scaled abscissa, then mapped back to raw
/// coefficients.
pub fn polyfit2(points: &[(f64, f64)], direction: Option<SampleDirection>) -> Result<FitResult, HarnessError> {
    if points.iter().any(|(h, f)| !h.is_finite() || !f.is_finite()) {
        return Err(HarnessError::Data("non-finite sample in fit input".into()));
    }
    let mut hs: Vec<f64> = points.iter().map(|p| p.0).collect();
    hs.sort_by(f64::total_cmp);
    hs.dedup();
    if hs.len() < 3 {
        return Err(HarnessError::Data(format!(
            "quadratic fit needs at least 3 distinct H values, got {}",
            hs.len()
        )));
    }
    let n = points.len();
    let c = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let s = points.iter().map(|p| (p.0 - c).abs()).fold(0.0, f64::max);
    let a = DMatrix::from_fn(n, 3, |r, col| ((points[r].0 - c) / s).powi(col as i32));
    let y = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let qr = a.clone().qr();
    let b = qr
        .r()
        .solve_upper_triangular(&(qr.q().transpose() * &y))
        .ok_or_else(|| HarnessError::Data("rank-deficient fit".into()))?;
    let (b0, b1, b2) = (b[0], b[1], b[2]);
    let resid = &y - &a * &b;
    let fit = FitResult {
        a0: b0 - b1 * c / s + b2 * c * c / (s * s),
        a1: b1 / s - 2.0 * b2 * c / (s * s),
        a2: b2 / (s * s),
        residual_rms: (resid.norm_squared() / n as f64).sqrt(),
        n,
        direction,
    };
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(trial: u32, dir: SampleDirection, fs: &[f64]) -> Vec<GaugeSample> {
        fs.iter()
            .enumerate()
            .map(|(i, &f)| GaugeSample { trial, direction: dir, h_m: 0.1 + 0.001 * i as f64, f_n: f })
            .collect()
    }

    #[test]
    fn decimation_keeps_every_nth() {
        let fs: Vec<f64> = (0..1000).map(|i| i as f64 * 0.01).collect();
        let r = preprocess(&run(0, SampleDirection::Compression, &fs), 10, 3.5).unwrap();
        assert_eq!(r.decimated, 100);
        assert_eq!(r.kept.len(), 100);
        assert_eq!(r.kept[1].f_n, fs[10]);
    }

    #[test]
    fn spike_in_constant_data() {
        let mut fs = vec![5.0; 30];
        fs[12] = 1005.0;
        let r = preprocess(&run(0, SampleDirection::Extension, &fs), 1, 3.5).unwrap();
        assert_eq!(r.removed, vec![12]);
    }

    #[test]
    fn all_removed_is_an_error() {
        let samples = run(0, SampleDirection::Compression, &[0.0, 10.0]);
        assert!(preprocess(&samples, 1, 3.5).unwrap().removed.is_empty());
        assert!(matches!(preprocess(&samples, 1, 0.5), Err(HarnessError::Data(_))));
        assert!(matches!(preprocess(&[], 1, 3.5), Err(HarnessError::Data(_))));
    }

    #[test]
    fn exact_quadratic() {
        let pts: Vec<(f64, f64)> = (0..50).map(|i| 0.08 + i as f64 * 0.0025).map(|h| (h, 1.0 + 2.0 * h + 3.0 * h * h)).collect();
        let f = polyfit2(&pts, None).unwrap();
        assert!((f.a0 - 1.0).abs() < 1e-9 && (f.a1 - 2.0).abs() < 1e-9 && (f.a2 - 3.0).abs() < 1e-9, "{f:?}");
        assert!(f.residual_rms < 1e-9);
    }

    #[test]
    fn constant_data() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 4.5)).collect();
        let f = polyfit2(&pts, None).unwrap();
        assert!((f.a0 - 4.5).abs() < 1e-9 && f.a1.abs() < 1e-9 && f.a2.abs() < 1e-9);
    }

    #[test]
    fn too_few_distinct() {
        let pts = [(0.1, 1.0), (0.1, 2.0), (0.2, 3.0), (0.2, 3.0)];
        assert!(matches!(polyfit2(&pts, None), Err(HarnessError::Data(_))));
    }
}
