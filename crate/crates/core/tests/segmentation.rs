//! Jerk segmentation on mixtures and on generated streams.

use accelerograph::segment::{cutoffs, gmm_cutoff, kmeans_cutoff, moving_variance, segment_trace, squared_resultant};
use accelerograph::synth::{gen_stream, Generator};
use accelerograph::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// `n` evenly spread values inside `(a, b)`.
fn spread(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * (i as f64 + 0.5) / n as f64).collect()
}

struct Mixture {
    low: Vec<f64>,
    high: Vec<f64>,
}

impl Mixture {
    fn new(low: &[(f64, f64, usize)], high: &[(f64, f64, usize)]) -> Self {
        let cat = |parts: &[(f64, f64, usize)]| parts.iter().flat_map(|&(a, b, n)| spread(a, b, n)).collect();
        Self { low: cat(low), high: cat(high) }
    }

    /// Low values followed by high values.
    fn values(&self) -> Vec<f64> {
        let mut out = self.low.clone();
        out.extend(&self.high);
        out
    }

    fn separates(&self, cut: f64) -> bool {
        self.low.iter().all(|&v| v <= cut) && self.high.iter().all(|&v| v > cut)
    }
}

#[test]
fn gmm_recovers_well_separated_components() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let low = Normal::new(0.01, 0.001).unwrap();
    let high = Normal::new(5.0, 1.0).unwrap();
    let mut values: Vec<f64> = (0..500).map(|_| low.sample(&mut rng)).collect();
    values.extend((0..500).map(|_| high.sample(&mut rng)));
    let fit = gmm_cutoff(&values).unwrap();
    let [(_, m_lo, _), (_, m_hi, _)] = fit.components;
    assert!((m_lo - 0.01).abs() < 0.05 * 0.01, "{m_lo}");
    assert!((m_hi - 5.0).abs() < 0.05 * 5.0, "{m_hi}");
    let max_lo = values[..500].iter().copied().fold(f64::MIN, f64::max);
    let min_hi = values[500..].iter().copied().fold(f64::MAX, f64::min);
    assert!(max_lo < fit.cutoff && fit.cutoff < min_hi);
    assert!(fit.upper[..500].iter().all(|u| !u) && fit.upper[500..].iter().all(|&u| u));
}

#[test]
fn kmeans_splits_a_wide_high_cluster_and_bagging_repairs_it() {
    let m = Mixture::new(&[(1.0, 1.85, 126)], &[(89.18, 118.04, 6), (29.16, 85.46, 17)]);
    let r = cutoffs(&m.values()).unwrap();
    assert!(!r.gmm_fallback);
    assert!(!m.separates(r.kmeans_cut), "k-means {}", r.kmeans_cut);
    assert!(m.separates(r.gmm_cut), "gmm {}", r.gmm_cut);
    assert!(m.separates(r.bagged_cut), "bagged {}", r.bagged_cut);
}

#[test]
fn gmm_splits_a_tight_low_cluster_and_bagging_repairs_it() {
    let m = Mixture::new(&[(1.0, 1.07, 180), (1.07, 4.52, 6)], &[(58.75, 111.93, 45)]);
    let r = cutoffs(&m.values()).unwrap();
    assert!(!r.gmm_fallback);
    assert!(m.separates(r.kmeans_cut), "k-means {}", r.kmeans_cut);
    assert!(!m.separates(r.gmm_cut), "gmm {}", r.gmm_cut);
    assert!(m.separates(r.bagged_cut), "bagged {}", r.bagged_cut);
}

#[test]
fn bagging_separates_when_both_fail() {
    let m = Mixture::new(
        &[(1.0, 1.75, 247), (1.75, 15.06, 3)],
        &[(67.14, 101.05, 10), (122.7, 133.9, 17), (40.28, 65.9, 31)],
    );
    let r = cutoffs(&m.values()).unwrap();
    assert!(!r.gmm_fallback);
    assert!(r.kmeans_cut > r.bagged_cut && r.bagged_cut > r.gmm_cut);
    assert!(!m.separates(r.kmeans_cut), "k-means {}", r.kmeans_cut);
    assert!(!m.separates(r.gmm_cut), "gmm {}", r.gmm_cut);
    assert!(m.separates(r.bagged_cut), "bagged {}", r.bagged_cut);
}

#[test]
fn kmeans_matches_exhaustive_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = Normal::new(2.0, 0.5).unwrap();
    let b = Normal::new(9.0, 1.5).unwrap();
    let mut values: Vec<f64> = (0..40).map(|_| a.sample(&mut rng)).collect();
    values.extend((0..25).map(|_| b.sample(&mut rng)));
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let sse = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>()
    };
    let best = (1..sorted.len())
        .min_by(|&i, &j| {
            let ci = sse(&sorted[..i]) + sse(&sorted[i..]);
            let cj = sse(&sorted[..j]) + sse(&sorted[j..]);
            ci.total_cmp(&cj)
        })
        .unwrap();
    let expected = 0.5 * (sorted[best - 1] + sorted[best]);
    assert!((kmeans_cutoff(&values).unwrap().cutoff - expected).abs() < 1e-12);
}

#[test]
fn strong_jerks_give_exact_counts() {
    let mut hits = 0;
    for seed in 0..500u64 {
        // jerk sd 15 against a letter amplitude of 3
        let cfg = SynthConfig { jerk_amplitude_sd: 15.0, ..SynthConfig::default() }.with_seed(seed);
        let mut g = Generator::new(cfg);
        let k = 1 + (seed % 10) as usize;
        let letters = g.random_letters(k);
        let (trace, _) = g.stream(&letters).unwrap();
        if segment_trace(&trace, 10).is_ok_and(|s| s.segments.len() == k) {
            hits += 1;
        }
    }
    assert!(hits >= 490, "{hits}/500");
}

#[test]
fn segments_align_with_generated_spans() {
    let window = 10;
    let trials = 200;
    let mut aligned = 0;
    for seed in 0..trials {
        let mut g = Generator::new(SynthConfig::default().with_seed(10_000 + seed));
        let letters = g.random_letters(1 + (seed % 6) as usize);
        let (trace, truth) = g.stream(&letters).unwrap();
        let Ok(seg) = segment_trace(&trace, window) else { continue };
        if seg.segments.len() != truth.spans.len() {
            continue;
        }
        let close = seg.segments.iter().zip(&truth.spans).all(|(s, &(a, b))| {
            s.start.abs_diff(a) <= window && s.end.abs_diff(b) <= window
        });
        if close {
            aligned += 1;
        }
    }
    assert!(aligned * 100 >= trials * 98, "{aligned}/{trials}");
}

#[test]
fn noiseless_streams_segment_exactly() {
    for seed in 0..50u64 {
        let cfg = SynthConfig::default().with_seed(seed).noiseless();
        let letters = Generator::new(cfg.clone()).random_letters(1 + (seed % 8) as usize);
        let (trace, truth) = gen_stream(&letters, &cfg).unwrap();
        let seg = segment_trace(&trace, 10).unwrap();
        assert_eq!(seg.segments.len(), letters.len(), "seed {seed}");
        for w in seg.segments.windows(2) {
            assert!(w[0].end < w[1].start);
        }
        for (s, &(a, b)) in seg.segments.iter().zip(&truth.spans) {
            assert!(s.len() >= 10);
            assert!(s.start.abs_diff(a) <= 10 && s.end.abs_diff(b) <= 10);
        }
    }
}

#[test]
fn jerks_dominate_letter_variance() {
    let mut g = Generator::new(SynthConfig::default().with_seed(5));
    let letters = g.random_letters(12);
    let (trace, truth) = g.stream(&letters).unwrap();
    let var = moving_variance(&squared_resultant(&trace), 10).unwrap();
    let inside = |i: usize| truth.spans.iter().any(|&(a, b)| i >= a && i + 9 <= b);
    let outside = |i: usize| truth.spans.iter().all(|&(a, b)| i + 9 < a || i > b);
    let mean = |f: &dyn Fn(usize) -> bool| {
        let xs: Vec<f64> = (0..var.values.len()).filter(|&i| f(i)).map(|i| var.values[i]).collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    };
    let (letter, jerk) = (mean(&inside), mean(&outside));
    assert!(jerk >= 10.0 * letter, "jerk {jerk} letter {letter}");
}

#[test]
fn flat_recording_has_no_jerks() {
    let samples = (0..100).map(|i| AccelSample::new(i as f64 * 10.0, 0.0, 0.0, 9.81)).collect();
    let trace = Trace::new(samples).unwrap();
    assert!(matches!(segment_trace(&trace, 10), Err(Error::NoJerksDetected)));
}

#[test]
fn short_recording_is_rejected() {
    let samples = (0..19).map(|i| AccelSample::new(i as f64, 0.0, i as f64, 9.81)).collect();
    let trace = Trace::new(samples).unwrap();
    assert!(matches!(segment_trace(&trace, 10), Err(Error::TooShort { .. })));
}
