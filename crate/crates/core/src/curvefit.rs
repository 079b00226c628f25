//! Exponential saturation fit `C(k) = C_max (1 - exp(-lambda k)) + C0`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const C_MAX_BOX: (f64, f64) = (0.0, 2.0);
pub const LAMBDA_BOX: (f64, f64) = (0.005, 31.0);
pub const C0_BOX: (f64, f64) = (0.0, 0.5);
pub const COARSE_CELLS: usize = 200;
pub const REFINE_FACTOR: f64 = 10.0;
/// Nested refinement passes, each a tenth of the previous step.
pub const REFINE_PASSES: usize = 4;
const MAX_RECENTER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationFit {
    pub c_max: f64,
    pub lambda: f64,
    pub c0: f64,
    pub r_squared: f64,
    pub mse: f64,
    pub n_points: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("need at least 3 points at 2 or more distinct k")]
    InsufficientPoints,
    #[error("scores have zero variance, so R^2 is undefined")]
    ZeroVariance,
}

pub fn eval_ck(fit: &SaturationFit, k: f64) -> f64 {
    fit.c_max * (1.0 - (-fit.lambda * k).exp()) + fit.c0
}

pub fn marginal_gain(fit: &SaturationFit, k: usize) -> f64 {
    assert!(k >= 1, "marginal gain is defined for k >= 1");
    eval_ck(fit, k as f64) - eval_ck(fit, (k - 1) as f64)
}

/// Step sizes of the coarse grid per axis.
pub fn coarse_steps() -> (f64, f64, f64) {
    let w = |b: (f64, f64)| (b.1 - b.0) / COARSE_CELLS as f64;
    (w(C_MAX_BOX), w(LAMBDA_BOX), w(C0_BOX))
}

pub fn refined_steps() -> (f64, f64, f64) {
    let (a, l, c) = coarse_steps();
    (a / REFINE_FACTOR, l / REFINE_FACTOR, c / REFINE_FACTOR)
}

/// Sums that make the squared error for a fixed lambda a quadratic in
/// `(C_max, C0)`.
struct Moments {
    n: f64,
    sy: f64,
    syy: f64,
    sg: f64,
    sgg: f64,
    sgy: f64,
}

impl Moments {
    fn new(points: &[(f64, f64)], lambda: f64) -> Self {
        let mut m = Moments { n: points.len() as f64, sy: 0.0, syy: 0.0, sg: 0.0, sgg: 0.0, sgy: 0.0 };
        for &(k, y) in points {
            let g = 1.0 - (-lambda * k).exp();
            m.sy += y;
            m.syy += y * y;
            m.sg += g;
            m.sgg += g * g;
            m.sgy += g * y;
        }
        m
    }

    fn sse(&self, a: f64, c: f64) -> f64 {
        let v = self.syy - 2.0 * a * self.sgy - 2.0 * c * self.sy
            + a * a * self.sgg
            + 2.0 * a * c * self.sg
            + self.n * c * c;
        v.max(0.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Best {
    sse: f64,
    a: f64,
    l: f64,
    c: f64,
}

impl Best {
    const NONE: Best = Best { sse: f64::INFINITY, a: f64::NAN, l: f64::NAN, c: f64::NAN };

    /// Lower error wins; exact ties go to the lexicographically smallest
    /// `(C_max, lambda, C0)`.
    fn better(self, other: Best) -> Best {
        let key = |b: &Best| (b.a, b.l, b.c);
        if other.sse < self.sse || (other.sse == self.sse && key(&other) < key(&self)) {
            other
        } else {
            self
        }
    }
}

fn axis(lo: f64, hi: f64, step: f64, bounds: (f64, f64)) -> Vec<f64> {
    let lo = lo.max(bounds.0);
    let hi = hi.min(bounds.1);
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| (lo + i as f64 * step).min(bounds.1)).collect()
}

fn coarse_search(points: &[(f64, f64)], cmax: &[f64], lambdas: &[f64], c0: &[f64]) -> Best {
    let per_lambda: Vec<Best> = lambdas
        .par_iter()
        .map(|&l| {
            let m = Moments::new(points, l);
            let mut best = Best::NONE;
            for &a in cmax {
                for &c in c0 {
                    best = best.better(Best { sse: m.sse(a, c), a, l, c });
                }
            }
            best
        })
        .collect();
    per_lambda.into_iter().fold(Best::NONE, Best::better)
}

/// Points grouped by k as `(k, count, mean score)`. The squared error is then
/// `sum n (C(k) - mean)^2` plus a constant within-group term, which stays
/// accurate when the residual is tiny.
fn group_by_k(points: &[(f64, f64)]) -> Vec<(f64, f64, f64)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    for (k, y) in sorted {
        match out.last_mut() {
            Some(g) if g.0 == k => {
                g.1 += 1.0;
                g.2 += y;
            }
            _ => out.push((k, 1.0, y)),
        }
    }
    out.iter().map(|&(k, n, s)| (k, n, s / n)).collect()
}

fn fine_search(groups: &[(f64, f64, f64)], within: f64, cmax: &[f64], lambdas: &[f64], c0: &[f64]) -> Best {
    let per_lambda: Vec<Best> = lambdas
        .par_iter()
        .map(|&l| {
            let g: Vec<(f64, f64, f64)> = groups.iter().map(|&(k, n, m)| (1.0 - (-l * k).exp(), n, m)).collect();
            let mut best = Best::NONE;
            for &a in cmax {
                for &c in c0 {
                    let sse = within + g.iter().map(|&(gk, n, m)| n * (a * gk + c - m).powi(2)).sum::<f64>();
                    best = best.better(Best { sse, a, l, c });
                }
            }
            best
        })
        .collect();
    per_lambda.into_iter().fold(Best::NONE, Best::better)
}

/// Coarse grid over the parameter box, then nested local grids, each a tenth
/// of the previous step and spanning one previous step around the incumbent.
/// The returned parameters always lie in the box.
pub fn fit_ck(points: &[(f64, f64)]) -> Result<SaturationFit, FitError> {
    let distinct_k = {
        let mut ks: Vec<f64> = points.iter().map(|p| p.0).collect();
        ks.sort_by(f64::total_cmp);
        ks.dedup();
        ks.len()
    };
    if points.len() < 3 || distinct_k < 2 {
        return Err(FitError::InsufficientPoints);
    }
    let n = points.len() as f64;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sst: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sst == 0.0 {
        return Err(FitError::ZeroVariance);
    }

    let (mut sa, mut sl, mut sc) = coarse_steps();
    let mut best = coarse_search(
        points,
        &axis(C_MAX_BOX.0, C_MAX_BOX.1, sa, C_MAX_BOX),
        &axis(LAMBDA_BOX.0, LAMBDA_BOX.1, sl, LAMBDA_BOX),
        &axis(C0_BOX.0, C0_BOX.1, sc, C0_BOX),
    );
    let groups = group_by_k(points);
    let within: f64 = {
        let mut sum = 0.0;
        for &(k, y) in points {
            let m = groups.iter().find(|g| g.0 == k).expect("grouped").2;
            sum += (y - m).powi(2);
        }
        sum
    };
    best.sse = within
        + groups.iter().map(|&(k, n, m)| n * (best.a * (1.0 - (-best.l * k).exp()) + best.c - m).powi(2)).sum::<f64>();
    for _ in 0..REFINE_PASSES {
        let (ra, rl, rc) = (sa / REFINE_FACTOR, sl / REFINE_FACTOR, sc / REFINE_FACTOR);
        // Re-center until the incumbent stops moving, so the search can walk
        // along narrow valleys where the parameters trade off.
        for _ in 0..MAX_RECENTER {
            let local = fine_search(
                &groups,
                within,
                &axis(best.a - sa, best.a + sa, ra, C_MAX_BOX),
                &axis(best.l - sl, best.l + sl, rl, LAMBDA_BOX),
                &axis(best.c - sc, best.c + sc, rc, C0_BOX),
            );
            let next = best.better(local);
            let moved = (next.a, next.l, next.c) != (best.a, best.l, best.c);
            best = next;
            if !moved {
                break;
            }
        }
        (sa, sl, sc) = (ra, rl, rc);
    }
    Ok(SaturationFit {
        c_max: best.a,
        lambda: best.l,
        c0: best.c,
        r_squared: 1.0 - best.sse / sst,
        mse: best.sse / n,
        n_points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit_of(c_max: f64, lambda: f64, c0: f64) -> SaturationFit {
        SaturationFit { c_max, lambda, c0, r_squared: 1.0, mse: 0.0, n_points: 0 }
    }

    #[test]
    fn formula_values() {
        let f = fit_of(0.18, 25.9, 0.095);
        assert_eq!(eval_ck(&f, 0.0), 0.095);
        assert!((eval_ck(&f, 1e6) - 0.275).abs() < 1e-12);
        assert!((marginal_gain(&f, 1) - 0.18).abs() < 1e-9);
        let g = fit_of(0.5, 1.3, 0.1);
        assert!((marginal_gain(&g, 1) - 0.5 * (1.0 - (-1.3f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn gains_strictly_decrease() {
        let f = fit_of(0.7, 0.4, 0.2);
        let gains: Vec<f64> = (1..=10).map(|k| marginal_gain(&f, k)).collect();
        assert!(gains.windows(2).all(|w| w[0] > w[1] && w[1] > 0.0));
    }

    #[test]
    fn recovers_noiseless_curve() {
        let truth = fit_of(0.5, 1.0, 0.1);
        let pts: Vec<(f64, f64)> = (0..=10).map(|k| (k as f64, eval_ck(&truth, k as f64))).collect();
        let fit = fit_ck(&pts).unwrap();
        let (ra, rl, rc) = refined_steps();
        assert!((fit.c_max - 0.5).abs() <= ra + 1e-12, "{fit:?}");
        assert!((fit.lambda - 1.0).abs() <= rl + 1e-12, "{fit:?}");
        assert!((fit.c0 - 0.1).abs() <= rc + 1e-12, "{fit:?}");
        assert!(fit.r_squared >= 0.999);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert_eq!(fit_ck(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)]), Err(FitError::ZeroVariance));
        assert_eq!(fit_ck(&[(1.0, 0.0), (1.0, 1.0), (1.0, 0.5)]), Err(FitError::InsufficientPoints));
        assert_eq!(fit_ck(&[(0.0, 0.0), (1.0, 1.0)]), Err(FitError::InsufficientPoints));
    }
}
