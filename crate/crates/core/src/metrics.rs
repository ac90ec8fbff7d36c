//! RMSE / CC / TCR scoring of an interval track against ground truth.
//!
//! Estimates are compared per 1.0 s segment. MISSING segments are
//! excluded from RMSE and CC but still count toward the TCR
//! denominator, so accuracy and coverage are reported separately.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::IntervalTrack;

/// Ground-truth heartbeat timing, either as beat instants (ECG R-peak
/// equivalents) or as a sampled interval function.
#[derive(Debug, Clone, PartialEq)]
pub enum GroundTruth {
    /// Strictly increasing beat times in seconds.
    BeatTimes(Vec<f64>),
    /// (time, interval) samples of the true interval function.
    Intervals(Vec<(f64, f64)>),
}

impl GroundTruth {
    pub fn validate(&self) -> Result<()> {
        match self {
            GroundTruth::BeatTimes(b) => {
                if b.len() < 2 {
                    return Err(Error::InvalidConfig("need at least 2 beats".into()));
                }
                if b.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidConfig("beat times must be strictly increasing".into()));
                }
            }
            GroundTruth::Intervals(s) => {
                if s.is_empty() {
                    return Err(Error::InvalidConfig("empty interval truth".into()));
                }
                if s.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidConfig("truth times must be strictly increasing".into()));
                }
            }
        }
        Ok(())
    }
}

/// Aggregate agreement scores for one track.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct MetricsReport {
    /// Root-mean-square interval error over present segments, in ms.
    /// `None` when no segment is comparable.
    pub rmse_ms: Option<f64>,
    /// Pearson correlation between estimate and truth over present
    /// segments. `None` when undefined.
    pub cc: Option<f64>,
    /// 100·m/M where m counts segments with a present estimate within
    /// the TCR threshold of truth.
    pub tcr_pct: f64,
    pub n_segments: usize,
    pub n_valid: usize,
}

/// Linear interpolation of (x, y) samples at `x0`, clamped at the ends.
fn interp_clamped(xs: &[f64], ys: &[f64], x0: f64) -> f64 {
    if x0 <= xs[0] {
        return ys[0];
    }
    if x0 >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let i = xs.partition_point(|&x| x <= x0) - 1;
    let w = (x0 - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + w * (ys[i + 1] - ys[i])
}

/// True interval per segment center. Interval samples live at interbeat
/// midpoints and are linearly interpolated; centers outside the
/// ground-truth span come back as `None` (uncomparable).
pub fn resample_truth(gt: &GroundTruth, segment_centers: &[f64]) -> Result<Vec<Option<f64>>> {
    gt.validate()?;
    let (xs, ys, span) = match gt {
        GroundTruth::BeatTimes(beats) => {
            let xs: Vec<f64> = beats.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
            let ys: Vec<f64> = beats.windows(2).map(|w| w[1] - w[0]).collect();
            (xs, ys, (beats[0], beats[beats.len() - 1]))
        }
        GroundTruth::Intervals(samples) => {
            let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
            let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
            let span = (xs[0], xs[xs.len() - 1]);
            (xs, ys, span)
        }
    };
    Ok(segment_centers
        .iter()
        .map(|&c| (c >= span.0 && c <= span.1).then(|| interp_clamped(&xs, &ys, c)))
        .collect())
}

/// Buckets track entries into `n_segments` segments of `segment_len`
/// seconds starting at t = 0: each segment takes the estimate whose
/// window-center timestamp falls inside it. Uncovered segments are
/// MISSING.
pub fn align_to_segments(
    track: &IntervalTrack,
    n_segments: usize,
    segment_len: f64,
) -> Vec<Option<f64>> {
    let mut out = vec![None; n_segments];
    for e in &track.entries {
        let idx = (e.time / segment_len).floor();
        if idx >= 0.0 && (idx as usize) < n_segments {
            let idx = idx as usize;
            if out[idx].is_none() {
                out[idx] = e.interval;
            }
        }
    }
    out
}

/// Centers of the segments produced by [`align_to_segments`].
pub fn segment_centers(n_segments: usize, segment_len: f64) -> Vec<f64> {
    (0..n_segments)
        .map(|j| (j as f64 + 0.5) * segment_len)
        .collect()
}

/// RMSE, CC and TCR of segment-aligned estimates against truth.
///
/// TCR counts a segment only when the estimate is present and the
/// absolute error is strictly below `t_theta_tcr`.
pub fn score(
    estimates: &[Option<f64>],
    truth: &[Option<f64>],
    t_theta_tcr: f64,
) -> Result<MetricsReport> {
    if estimates.len() != truth.len() {
        return Err(Error::Malformed(format!(
            "segment count mismatch: {} estimates vs {} truth",
            estimates.len(),
            truth.len()
        )));
    }
    let m_total = estimates.len();
    let pairs: Vec<(f64, f64)> = estimates
        .iter()
        .zip(truth)
        .filter_map(|(e, t)| e.zip(*t))
        .collect();
    let n_valid = pairs.len();
    let hits = pairs
        .iter()
        .filter(|(e, t)| (e - t).abs() < t_theta_tcr)
        .count();
    let tcr_pct = if m_total == 0 {
        0.0
    } else {
        100.0 * hits as f64 / m_total as f64
    };

    let rmse_ms = (n_valid > 0).then(|| {
        let mse = pairs.iter().map(|(e, t)| (e - t) * (e - t)).sum::<f64>() / n_valid as f64;
        mse.sqrt() * 1e3
    });
    let cc = if n_valid >= 2 {
        let n = n_valid as f64;
        let me = pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let mt = pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let cov: f64 = pairs.iter().map(|(e, t)| (e - me) * (t - mt)).sum::<f64>() / n;
        let se = (pairs.iter().map(|(e, _)| (e - me) * (e - me)).sum::<f64>() / n).sqrt();
        let st = (pairs.iter().map(|(_, t)| (t - mt) * (t - mt)).sum::<f64>() / n).sqrt();
        (se > 0.0 && st > 0.0).then(|| cov / (se * st))
    } else {
        None
    };
    Ok(MetricsReport { rmse_ms, cc, tcr_pct, n_segments: m_total, n_valid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_beats_give_unit_intervals() {
        let beats: Vec<f64> = (0..=60).map(|i| i as f64).collect();
        let centers = segment_centers(60, 1.0);
        let truth = resample_truth(&GroundTruth::BeatTimes(beats), &centers).unwrap();
        for t in truth {
            assert!((t.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn alternating_gaps_alternate() {
        // gaps 0.9, 1.1, 0.9, 1.1, ...
        let mut beats = vec![0.0];
        for i in 0..40 {
            let gap = if i % 2 == 0 { 0.9 } else { 1.1 };
            beats.push(beats.last().unwrap() + gap);
        }
        let truth = resample_truth(
            &GroundTruth::BeatTimes(beats.clone()),
            &[0.45, beats[1] + 0.55],
        )
        .unwrap();
        assert!((truth[0].unwrap() - 0.9).abs() < 0.11);
        assert!((truth[1].unwrap() - 1.1).abs() < 0.11);
    }

    #[test]
    fn out_of_span_is_uncomparable() {
        let beats: Vec<f64> = (5..=10).map(|i| i as f64).collect();
        let truth = resample_truth(&GroundTruth::BeatTimes(beats), &[0.5, 7.5, 20.0]).unwrap();
        assert_eq!(truth[0], None);
        assert!(truth[1].is_some());
        assert_eq!(truth[2], None);
    }

    #[test]
    fn perfect_track_scores_perfectly() {
        let truth: Vec<Option<f64>> = (0..60).map(|i| Some(1.0 + 0.001 * i as f64)).collect();
        let r = score(&truth, &truth, 0.030).unwrap();
        assert_eq!(r.rmse_ms, Some(0.0));
        assert!((r.cc.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.tcr_pct, 100.0);
        assert_eq!(r.n_valid, 60);
    }

    #[test]
    fn constant_offset_scores() {
        let truth: Vec<Option<f64>> = (0..60).map(|i| Some(1.0 + 0.002 * i as f64)).collect();
        let est: Vec<Option<f64>> = truth.iter().map(|t| t.map(|v| v + 0.050)).collect();
        let r = score(&est, &truth, 0.030).unwrap();
        assert!((r.rmse_ms.unwrap() - 50.0).abs() < 1e-9);
        assert!((r.cc.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.tcr_pct, 0.0);
    }

    #[test]
    fn no_present_segments_is_reported() {
        let est = vec![None; 10];
        let truth: Vec<Option<f64>> = (0..10).map(|_| Some(1.0)).collect();
        let r = score(&est, &truth, 0.030).unwrap();
        assert_eq!(r.rmse_ms, None);
        assert_eq!(r.cc, None);
        assert_eq!(r.tcr_pct, 0.0);
    }

    #[test]
    fn tcr_boundary_is_strict() {
        let truth = vec![Some(1.0); 4];
        let est = vec![Some(1.0299999), Some(1.030), Some(1.0300001), Some(1.0)];
        let r = score(&est, &truth, 0.030).unwrap();
        // exactly 30 ms fails; strictly below passes
        assert_eq!(r.tcr_pct, 100.0 * 2.0 / 4.0);
    }

    #[test]
    fn matches_brute_force_reference() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let n = rng.gen_range(5..80);
            let est: Vec<Option<f64>> = (0..n)
                .map(|_| rng.gen_bool(0.8).then(|| rng.gen_range(0.6..1.3)))
                .collect();
            let truth: Vec<Option<f64>> = (0..n)
                .map(|_| rng.gen_bool(0.9).then(|| rng.gen_range(0.6..1.3)))
                .collect();
            let r = score(&est, &truth, 0.030).unwrap();
            // direct-formula reference
            let pairs: Vec<(f64, f64)> = est
                .iter()
                .zip(&truth)
                .filter_map(|(e, t)| e.zip(*t))
                .collect();
            if !pairs.is_empty() {
                let mse = pairs.iter().map(|(e, t)| (e - t) * (e - t)).sum::<f64>()
                    / pairs.len() as f64;
                assert!((r.rmse_ms.unwrap() - mse.sqrt() * 1e3).abs() < 1e-12);
            }
            let m = pairs.iter().filter(|(e, t)| (e - t).abs() < 0.030).count();
            assert!((r.tcr_pct - 100.0 * m as f64 / n as f64).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn tcr_monotone_in_threshold(seed in 0u64..100) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let est: Vec<Option<f64>> = (0..40)
                .map(|_| rng.gen_bool(0.8).then(|| rng.gen_range(0.8..1.2)))
                .collect();
            let truth: Vec<Option<f64>> = (0..40).map(|_| Some(rng.gen_range(0.8..1.2))).collect();
            let mut last = f64::INFINITY;
            for th in [0.100, 0.050, 0.030, 0.010, 0.001] {
                let r = score(&est, &truth, th).unwrap();
                prop_assert!(r.tcr_pct <= last);
                last = r.tcr_pct;
            }
        }

        #[test]
        fn cc_affine_invariant_rmse_not(seed in 0u64..100, a in 0.5f64..3.0, b in -0.5f64..0.5) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let truth: Vec<Option<f64>> = (0..30).map(|_| Some(rng.gen_range(0.8..1.2))).collect();
            let est: Vec<Option<f64>> = truth
                .iter()
                .map(|t| t.map(|v| v + rng.gen_range(-0.05..0.05)))
                .collect();
            let warped: Vec<Option<f64>> = est.iter().map(|e| e.map(|v| a * v + b)).collect();
            let r0 = score(&est, &truth, 0.030).unwrap();
            let r1 = score(&warped, &truth, 0.030).unwrap();
            if let (Some(c0), Some(c1)) = (r0.cc, r1.cc) {
                prop_assert!((c0 - c1).abs() < 1e-9);
            }
            // RMSE changes unless the affine map is the identity
            if (a - 1.0).abs() > 0.05 {
                prop_assert!((r0.rmse_ms.unwrap() - r1.rmse_ms.unwrap()).abs() > 1e-9);
            }
        }

        #[test]
        fn filling_missing_with_truth_never_decreases_tcr(seed in 0u64..100) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let truth: Vec<Option<f64>> = (0..30).map(|_| Some(rng.gen_range(0.8..1.2))).collect();
            let est: Vec<Option<f64>> = truth
                .iter()
                .map(|t| rng.gen_bool(0.6).then(|| t.unwrap() + rng.gen_range(-0.06..0.06)))
                .collect();
            let before = score(&est, &truth, 0.030).unwrap().tcr_pct;
            let filled: Vec<Option<f64>> = est
                .iter()
                .zip(&truth)
                .map(|(e, t)| e.or(*t))
                .collect();
            let after = score(&filled, &truth, 0.030).unwrap().tcr_pct;
            prop_assert!(after >= before);
        }
    }
}
