//! Paired significance tests and effect sizes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

pub const EXACT_MAX_N: usize = 25;
pub const BOOTSTRAP_SEED: u64 = 42;
pub const BOOTSTRAP_RESAMPLES: usize = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("sample is empty")]
    Empty,
    #[error("all paired differences are zero")]
    AllZero,
    #[error("need at least {0} observations")]
    TooFew(usize),
    #[error("zero variance")]
    ZeroVariance,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Matched observations; differences are `b - a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSample {
    pairs: Vec<(f64, f64)>,
}

impl PairedSample {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self, StatsError> {
        if pairs.is_empty() {
            return Err(StatsError::Empty);
        }
        Ok(Self { pairs })
    }

    pub fn from_diffs(diffs: &[f64]) -> Result<Self, StatsError> {
        Self::new(diffs.iter().map(|&d| (0.0, d)).collect())
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn diffs(&self) -> Vec<f64> {
        self.pairs.iter().map(|(a, b)| b - a).collect()
    }

    pub fn mean_diff(&self) -> f64 {
        mean(&self.diffs())
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`.
    pub w: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Nonzero differences used.
    pub n: usize,
    pub p: f64,
    pub exact: bool,
}

/// Ranks of `|d|` with ties averaged, doubled so they are integers.
pub fn doubled_ranks(diffs: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&i, &j| diffs[i].abs().total_cmp(&diffs[j].abs()));
    let mut ranks = vec![0u64; diffs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && diffs[order[j + 1]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        // Positions i..=j share rank (i+1 + j+1)/2; doubled that is i+j+2.
        for &k in &order[i..=j] {
            ranks[k] = (i + j + 2) as u64;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided p from the exact null distribution of doubled `W+`.
fn exact_p(ranks: &[u64], w_plus2: u64) -> f64 {
    let total: u64 = ranks.iter().sum();
    let mut counts = vec![0f64; total as usize + 1];
    counts[0] = 1.0;
    let mut reach = 0usize;
    for &r in ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let all = 2f64.powi(ranks.len() as i32);
    let w = w_plus2 as usize;
    let lower: f64 = counts[..=w].iter().sum();
    let upper: f64 = counts[w..].iter().sum();
    (2.0 * lower.min(upper) / all).min(1.0)
}

fn tie_term(diffs: &[f64]) -> f64 {
    let mut abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    let mut i = 0;
    while i < abs.len() {
        let mut j = i;
        while j + 1 < abs.len() && abs[j + 1] == abs[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        sum += t * t * t - t;
        i = j + 1;
    }
    sum
}

pub fn wilcoxon_signed_rank(sample: &PairedSample) -> Result<WilcoxonResult, StatsError> {
    let diffs: Vec<f64> = sample.diffs().into_iter().filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return Err(StatsError::AllZero);
    }
    let ranks = doubled_ranks(&diffs);
    let plus2: u64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let total2: u64 = ranks.iter().sum();
    let w_plus = plus2 as f64 / 2.0;
    let w_minus = (total2 - plus2) as f64 / 2.0;
    let n = diffs.len();
    let (p, exact) = if n <= EXACT_MAX_N {
        (exact_p(&ranks, plus2), true)
    } else {
        let nf = n as f64;
        let mu = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term(&diffs) / 48.0;
        let dev = ((w_plus - mu).abs() - 0.5).max(0.0);
        let p = if var <= 0.0 {
            1.0
        } else {
            let z = dev / var.sqrt();
            let normal = Normal::new(0.0, 1.0).expect("standard normal");
            (2.0 * normal.sf(z)).min(1.0)
        };
        (p, false)
    };
    Ok(WilcoxonResult { w: w_plus.min(w_minus), w_plus, w_minus, n, p, exact })
}

pub fn cohens_d(sample: &PairedSample) -> Result<f64, StatsError> {
    let d = sample.diffs();
    if d.len() < 2 {
        return Err(StatsError::TooFew(2));
    }
    let m = mean(&d);
    let var = d.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (d.len() - 1) as f64;
    if var == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok(m / var.sqrt())
}

/// Conventional label for |d| at the 0.2 / 0.5 / 0.8 thresholds.
pub fn effect_label(d: f64) -> &'static str {
    match d.abs() {
        x if x >= 0.8 => "large",
        x if x >= 0.5 => "medium",
        x if x >= 0.2 => "small",
        _ => "negligible",
    }
}

/// Percentile bootstrap interval for the mean paired difference.
pub fn bootstrap_ci(sample: &PairedSample, resamples: usize, seed: u64, level: f64) -> (f64, f64) {
    assert!(resamples > 0 && level > 0.0 && level < 1.0, "invalid bootstrap settings");
    let d = sample.diffs();
    let n = d.len();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut means: Vec<f64> =
        (0..resamples).map(|_| (0..n).map(|_| d[rng.gen_range(0..n)]).sum::<f64>() / n as f64).collect();
    means.sort_by(f64::total_cmp);
    let alpha = 1.0 - level;
    let lo = ((alpha / 2.0) * resamples as f64).floor() as usize;
    let hi = (((1.0 - alpha / 2.0) * resamples as f64).ceil() as usize).saturating_sub(1);
    (means[lo.min(resamples - 1)], means[hi.min(resamples - 1)])
}

pub fn pearson_r(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFew(2));
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Significance stars: `***` p < 0.001, `**` p < 0.01, `*` p < 0.05.
pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_force_p(diffs: &[f64]) -> f64 {
        let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
        let ranks = doubled_ranks(&nz);
        let obs: u64 = nz.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
        let n = nz.len();
        let (mut le, mut ge) = (0u64, 0u64);
        for mask in 0u64..(1 << n) {
            let s: u64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            le += u64::from(s <= obs);
            ge += u64::from(s >= obs);
        }
        (2.0 * le.min(ge) as f64 / (1u64 << n) as f64).min(1.0)
    }

    #[test]
    fn wilcoxon_examples() {
        let r = wilcoxon_signed_rank(&PairedSample::from_diffs(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap()).unwrap();
        assert!((r.p - 0.0625).abs() < 1e-12);
        assert_eq!((r.w_plus, r.w_minus, r.w), (15.0, 0.0, 0.0));
        let r = wilcoxon_signed_rank(&PairedSample::from_diffs(&[-1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(r.p, 1.0);
        assert_eq!(wilcoxon_signed_rank(&PairedSample::from_diffs(&[0.0, 0.0]).unwrap()), Err(StatsError::AllZero));
    }

    #[test]
    fn ties_get_average_ranks() {
        assert_eq!(doubled_ranks(&[1.0, -1.0, 2.0]), vec![3, 3, 6]);
    }

    #[test]
    fn large_sample_uses_normal_approximation() {
        let diffs = vec![1.0; 100];
        let r = wilcoxon_signed_rank(&PairedSample::from_diffs(&diffs).unwrap()).unwrap();
        assert!(!r.exact);
        assert!(r.p < 1e-10);
    }

    #[test]
    fn cohens_d_examples() {
        let d = cohens_d(&PairedSample::from_diffs(&[0.0, 2.0]).unwrap()).unwrap();
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
        assert_eq!(cohens_d(&PairedSample::from_diffs(&[3.0, 3.0]).unwrap()), Err(StatsError::ZeroVariance));
        assert_eq!(effect_label(0.55), "medium");
    }

    #[test]
    fn bootstrap_constant_and_deterministic() {
        let s = PairedSample::from_diffs(&[2.0; 7]).unwrap();
        assert_eq!(bootstrap_ci(&s, 500, 42, 0.95), (2.0, 2.0));
        let s = PairedSample::from_diffs(&[0.0, 1.0, 0.0, 1.0, 1.0, 0.5]).unwrap();
        assert_eq!(bootstrap_ci(&s, 2000, 42, 0.95), bootstrap_ci(&s, 2000, 42, 0.95));
    }

    #[test]
    fn pearson_examples() {
        assert!((pearson_r(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!((pearson_r(&[1.0, 2.0, 4.0], &[1.0, 2.0, 4.0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(pearson_r(&[1.0, 1.0], &[1.0, 2.0]), Err(StatsError::ZeroVariance));
    }

    proptest! {
        #[test]
        fn exact_matches_enumeration(diffs in prop::collection::vec(-4i32..=4, 1..=12)) {
            let diffs: Vec<f64> = diffs.into_iter().map(f64::from).collect();
            prop_assume!(diffs.iter().any(|d| *d != 0.0));
            let r = wilcoxon_signed_rank(&PairedSample::from_diffs(&diffs).unwrap()).unwrap();
            prop_assert!((r.p - brute_force_p(&diffs)).abs() < 1e-9);
        }

        #[test]
        fn d_flips_sign(diffs in prop::collection::vec(-50.0f64..50.0, 2..30)) {
            let s = PairedSample::from_diffs(&diffs).unwrap();
            let neg: Vec<f64> = diffs.iter().map(|d| -d).collect();
            if let (Ok(a), Ok(b)) = (cohens_d(&s), cohens_d(&PairedSample::from_diffs(&neg).unwrap())) {
                prop_assert!((a + b).abs() < 1e-9);
            }
        }

        #[test]
        fn symmetric_interval_contains_mean(half in prop::collection::vec(0.1f64..10.0, 2..15), c in -5.0f64..5.0) {
            let mut diffs: Vec<f64> = half.iter().map(|h| c + h).collect();
            diffs.extend(half.iter().map(|h| c - h));
            let s = PairedSample::from_diffs(&diffs).unwrap();
            let (lo, hi) = bootstrap_ci(&s, 1000, 42, 0.95);
            let m = s.mean_diff();
            prop_assert!(lo <= m && m <= hi);
        }

        #[test]
        fn pearson_affine_invariant(
            pts in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..20),
            a in 0.5f64..4.0, b in -10.0f64..10.0, flip in any::<bool>(),
        ) {
            let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            if let Ok(r) = pearson_r(&xs, &ys) {
                let s = if flip { -a } else { a };
                let xs2: Vec<f64> = xs.iter().map(|x| s * x + b).collect();
                let r2 = pearson_r(&xs2, &ys).unwrap();
                prop_assert!((r.abs() - r2.abs()).abs() < 1e-9);
            }
        }
    }
}
