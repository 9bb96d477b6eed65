//! Tail estimates, log-linear decay fits and empirical dominance checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub k: f64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub holds: bool,
    /// `max_k [S_a(k) − S_b(k) − 2·SE(k)]`; nonpositive iff `holds`.
    pub max_violation: f64,
    /// Threshold at which `max_violation` is attained.
    pub worst_k: f64,
}

/// Wilson score interval for `successes` out of `n`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// Fraction of samples strictly above `k`, with a 95% Wilson interval.
pub fn tail_estimate(samples: &[f64], k: f64) -> Result<TailEstimate> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("tail_estimate needs at least one sample".into()));
    }
    let above = samples.iter().filter(|&&x| x > k).count() as u64;
    let n = samples.len() as u64;
    let (ci_low, ci_high) = wilson_interval(above, n, Z95);
    Ok(TailEstimate {
        k,
        p_hat: above as f64 / n as f64,
        ci_low,
        ci_high,
        n,
    })
}

/// Least squares of `ln p` against `k`, skipping points with `p = 0`.
pub fn fit_decay_slope(points: &[(f64, f64)]) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(_, p)| *p > 0.0).map(|&(k, p)| (k, p.ln())).collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "decay fit needs 3 positive points, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("decay fit needs distinct k values".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(DecayFit {
        slope,
        intercept,
        r2: r2.clamp(0.0, 1.0),
        points: pts.len(),
    })
}

fn survival(sorted: &[f64], k: f64) -> f64 {
    let at_most = sorted.partition_point(|&x| x <= k);
    (sorted.len() - at_most) as f64 / sorted.len() as f64
}

/// Checks `S_a(k) ≤ S_b(k) + 2·SE(k)` at every integer `k` from 0 to the
/// largest observation, where `SE` is the standard error of the difference.
pub fn dominance_check(samples_a: &[f64], samples_b: &[f64]) -> Result<DominanceReport> {
    if samples_a.is_empty() || samples_b.is_empty() {
        return Err(Error::InsufficientData("dominance_check needs two nonempty samples".into()));
    }
    let mut a = samples_a.to_vec();
    let mut b = samples_b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let top = a.last().copied().unwrap_or(0.0).max(b.last().copied().unwrap_or(0.0)).ceil();
    let mut worst = f64::NEG_INFINITY;
    let mut worst_k = 0.0;
    let mut k = 0.0;
    while k <= top {
        let (sa, sb) = (survival(&a, k), survival(&b, k));
        let se = (sa * (1.0 - sa) / na + sb * (1.0 - sb) / nb).sqrt();
        let v = sa - sb - 2.0 * se;
        if v > worst {
            worst = v;
            worst_k = k;
        }
        k += 1.0;
    }
    Ok(DominanceReport {
        holds: worst <= 0.0,
        max_violation: worst,
        worst_k,
    })
}
