//! Default-box aspect-ratio design: 1-D k-means over ground-truth aspect
//! ratios and a check that the resulting centers are not too close together.
//!
//! Aspect ratio defaults to height / width. [`RatioConvention::WidthOverHeight`]
//! flips it.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::BBox;

pub const DEFAULT_K: usize = 2;
pub const DEFAULT_MIN_SEPARATION: f64 = 0.1;
pub const DEFAULT_MAX_ITERATIONS: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnchorError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("max_iterations must be at least 1")]
    ZeroIterations,
    #[error("need at least {k} distinct ratio values, found {distinct}")]
    Degenerate { k: usize, distinct: usize },
    #[error("aspect ratio {0} is not finite and positive")]
    InvalidSample(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RatioConvention {
    #[default]
    HeightOverWidth,
    WidthOverHeight,
}

impl FromStr for RatioConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "h-over-w" => Ok(Self::HeightOverWidth),
            "w-over-h" => Ok(Self::WidthOverHeight),
            other => Err(format!(
                "unknown ratio convention {other:?} (expected h-over-w or w-over-h)"
            )),
        }
    }
}

impl fmt::Display for RatioConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::HeightOverWidth => "h-over-w",
            Self::WidthOverHeight => "w-over-h",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RatioSample(f64);

impl RatioSample {
    pub fn new(value: f64) -> Result<Self, AnchorError> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(AnchorError::InvalidSample(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn extract_aspect_ratios(boxes: &[BBox], convention: RatioConvention) -> Vec<RatioSample> {
    boxes
        .iter()
        .map(|b| match convention {
            RatioConvention::HeightOverWidth => RatioSample(b.h() / b.w()),
            RatioConvention::WidthOverHeight => RatioSample(b.w() / b.h()),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    /// Strictly ascending.
    pub centers: Vec<f64>,
    /// Center index per input sample, in input order.
    pub assignments: Vec<usize>,
    pub wcss: f64,
    pub iterations: usize,
    /// WCSS after each center update, one entry per iteration.
    pub wcss_trace: Vec<f64>,
}

impl ClusterResult {
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.centers.len()];
        for &a in &self.assignments {
            counts[a] += 1;
        }
        counts
    }
}

fn nearest(centers: &[f64], v: f64) -> usize {
    let mut best = 0;
    let mut best_d = (v - centers[0]).abs();
    for (i, &c) in centers.iter().enumerate().skip(1) {
        let d = (v - c).abs();
        // strict: ties stay with the lower index
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

fn wcss(values: &[f64], centers: &[f64], assignments: &[usize]) -> f64 {
    values
        .iter()
        .zip(assignments)
        .map(|(&v, &a)| (v - centers[a]).powi(2))
        .sum()
}

fn quantile_init(sorted: &[f64], k: usize) -> Vec<f64> {
    let pick = |vals: &[f64]| -> Vec<f64> {
        let n = vals.len();
        (0..k)
            .map(|i| {
                let q = (i as f64 + 0.5) / k as f64;
                vals[((q * n as f64).floor() as usize).min(n - 1)]
            })
            .collect()
    };
    let centers = pick(sorted);
    if centers.windows(2).all(|w| w[0] < w[1]) {
        return centers;
    }
    // heavy duplicates collapse sample quantiles; quantiles of the distinct
    // values are strictly increasing whenever there are at least k of them
    let mut distinct = sorted.to_vec();
    distinct.dedup();
    pick(&distinct)
}

/// Lloyd's algorithm in one dimension with quantile initialization.
/// Stops when assignments stop changing or after `max_iterations` updates.
pub fn kmeans_1d(
    samples: &[RatioSample],
    k: usize,
    max_iterations: usize,
) -> Result<ClusterResult, AnchorError> {
    if k == 0 {
        return Err(AnchorError::ZeroK);
    }
    if max_iterations == 0 {
        return Err(AnchorError::ZeroIterations);
    }
    let values: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() < k {
        return Err(AnchorError::Degenerate {
            k,
            distinct: distinct.len(),
        });
    }

    let mut centers = quantile_init(&sorted, k);
    let mut assignments: Vec<usize> = values.iter().map(|&v| nearest(&centers, v)).collect();
    let mut trace = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        update_centers(&values, &mut centers, &mut assignments);
        trace.push(wcss(&values, &centers, &assignments));
        let next: Vec<usize> = values.iter().map(|&v| nearest(&centers, v)).collect();
        // on hitting the cap keep the assignment the centers were computed from
        if next == assignments || iterations >= max_iterations {
            break;
        }
        assignments = next;
    }

    // 1-D Lloyd keeps centers ordered; sort defensively and remap labels
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| centers[a].total_cmp(&centers[b]));
    let mut remap = vec![0; k];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }
    let centers: Vec<f64> = order.iter().map(|&i| centers[i]).collect();
    let assignments: Vec<usize> = assignments.iter().map(|&a| remap[a]).collect();
    let wcss = wcss(&values, &centers, &assignments);
    Ok(ClusterResult {
        centers,
        assignments,
        wcss,
        iterations,
        wcss_trace: trace,
    })
}

/// Recomputes each center as the mean of its members. An empty cluster is
/// reseeded at the sample farthest from its current center.
fn update_centers(values: &[f64], centers: &mut [f64], assignments: &mut [usize]) {
    let k = centers.len();
    loop {
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (&v, &a) in values.iter().zip(assignments.iter()) {
            sums[a] += v;
            counts[a] += 1;
        }
        match counts.iter().position(|&c| c == 0) {
            None => {
                for i in 0..k {
                    centers[i] = sums[i] / counts[i] as f64;
                }
                return;
            }
            Some(empty) => {
                let (far, _) = values
                    .iter()
                    .zip(assignments.iter())
                    .enumerate()
                    .filter(|(_, (_, &a))| counts[a] > 1)
                    .map(|(i, (&v, &a))| (i, (v - centers[a]).abs()))
                    .fold((usize::MAX, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
                centers[empty] = values[far];
                assignments[far] = empty;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationWarning {
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub min_separation: f64,
}

impl fmt::Display for SeparationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "centers {:.4} and {:.4} are {:.4} apart, below the minimum separation {}",
            self.lower, self.upper, self.gap, self.min_separation
        )
    }
}

/// One warning per adjacent center pair closer than `min_separation`.
pub fn validate_separation(result: &ClusterResult, min_separation: f64) -> Vec<SeparationWarning> {
    result
        .centers
        .windows(2)
        .filter_map(|w| {
            let gap = w[1] - w[0];
            (gap < min_separation).then_some(SeparationWarning {
                lower: w[0],
                upper: w[1],
                gap,
                min_separation,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(vals: &[f64]) -> Vec<RatioSample> {
        vals.iter().map(|&v| RatioSample::new(v).unwrap()).collect()
    }

    fn bx(w: f64, h: f64) -> BBox {
        BBox::new(0.0, 0.0, w, h).unwrap()
    }

    /// Minimum WCSS over all partitions of the sorted values into `k`
    /// non-empty contiguous runs.
    pub(crate) fn best_contiguous_wcss(vals: &[f64], k: usize) -> f64 {
        let mut sorted = vals.to_vec();
        sorted.sort_by(f64::total_cmp);
        fn cost(run: &[f64]) -> f64 {
            let m = run.iter().sum::<f64>() / run.len() as f64;
            run.iter().map(|v| (v - m).powi(2)).sum()
        }
        fn go(vals: &[f64], k: usize) -> f64 {
            if k == 1 {
                return cost(vals);
            }
            (1..=vals.len() - (k - 1))
                .map(|split| cost(&vals[..split]) + go(&vals[split..], k - 1))
                .fold(f64::INFINITY, f64::min)
        }
        go(&sorted, k)
    }

    #[test]
    fn aspect_ratio_examples() {
        let hw = RatioConvention::HeightOverWidth;
        assert_eq!(extract_aspect_ratios(&[bx(100., 50.)], hw)[0].value(), 0.5);
        assert_eq!(extract_aspect_ratios(&[bx(10., 7.)], hw)[0].value(), 0.7);
        let two: Vec<f64> = extract_aspect_ratios(&[bx(4., 4.), bx(2., 1.)], hw)
            .into_iter()
            .map(RatioSample::value)
            .collect();
        assert_eq!(two, vec![1.0, 0.5]);
        let flipped = extract_aspect_ratios(&[bx(100., 50.)], RatioConvention::WidthOverHeight);
        assert_eq!(flipped[0].value(), 2.0);
    }

    #[test]
    fn two_exact_clusters() {
        let r = kmeans_1d(&samples(&[0.5, 0.5, 0.7, 0.7]), 2, 100).unwrap();
        assert_eq!(r.centers, vec![0.5, 0.7]);
        assert_eq!(r.wcss, 0.0);
        assert_eq!(r.assignments, vec![0, 0, 1, 1]);
    }

    #[test]
    fn five_samples_match_contiguous_oracle() {
        let vals = [0.3, 0.4, 0.6, 0.7, 0.8];
        let oracle = best_contiguous_wcss(&vals, 2);
        assert!((oracle - 0.025).abs() < 1e-12);
        let r = kmeans_1d(&samples(&vals), 2, 100).unwrap();
        assert!((r.centers[0] - 0.35).abs() < 1e-12);
        assert!((r.centers[1] - 0.70).abs() < 1e-12);
        assert!((r.wcss - oracle).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_invalid_arguments() {
        assert_eq!(
            kmeans_1d(&samples(&[0.5, 0.5, 0.5]), 2, 100),
            Err(AnchorError::Degenerate { k: 2, distinct: 1 })
        );
        assert_eq!(kmeans_1d(&samples(&[0.5]), 0, 100), Err(AnchorError::ZeroK));
        assert_eq!(
            kmeans_1d(&samples(&[0.5]), 1, 0),
            Err(AnchorError::ZeroIterations)
        );
        assert!(RatioSample::new(0.0).is_err());
        assert!(RatioSample::new(f64::INFINITY).is_err());
    }

    #[test]
    fn duplicate_heavy_input_initializes_distinct_centers() {
        let r = kmeans_1d(&samples(&[0.5, 0.5, 0.5, 0.5, 0.7]), 2, 100).unwrap();
        assert_eq!(r.centers, vec![0.5, 0.7]);
        assert_eq!(r.counts(), vec![4, 1]);
    }

    #[test]
    fn separation_examples() {
        let mk = |c: Vec<f64>| ClusterResult {
            assignments: vec![],
            wcss: 0.0,
            iterations: 1,
            wcss_trace: vec![0.0],
            centers: c,
        };
        assert!(validate_separation(&mk(vec![0.5, 0.7]), 0.1).is_empty());
        let w = validate_separation(&mk(vec![0.50, 0.55]), 0.1);
        assert_eq!(w.len(), 1);
        assert_eq!((w[0].lower, w[0].upper), (0.50, 0.55));
        assert!(validate_separation(&mk(vec![0.6]), 5.0).is_empty());
    }

    #[test]
    fn fixed_point_properties() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(4..=12);
            let vals: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..1.5)).collect();
            let k = rng.random_range(1..=3);
            let r = kmeans_1d(&samples(&vals), k, 100).unwrap();
            assert!(r.centers.windows(2).all(|w| w[0] < w[1]));
            for (c, &center) in r.centers.iter().enumerate() {
                let members: Vec<f64> = vals
                    .iter()
                    .zip(&r.assignments)
                    .filter(|(_, &a)| a == c)
                    .map(|(&v, _)| v)
                    .collect();
                let mean = members.iter().sum::<f64>() / members.len() as f64;
                assert!((mean - center).abs() < 1e-12);
            }
            // contiguity: sorted by value, labels never decrease
            let mut pairs: Vec<(f64, usize)> =
                vals.iter().copied().zip(r.assignments.iter().copied()).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            assert!(pairs.windows(2).all(|w| w[0].1 <= w[1].1));
            assert!(r.wcss_trace.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(kmeans_1d(&samples(&vals), k, 100).unwrap(), r);
        }
    }
}
