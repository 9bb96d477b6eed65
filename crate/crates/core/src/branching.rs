//! Galton-Watson process dominating the symptomatic lineage.
//!
//! A symptomatic site with `λ₁ = 0` can only create asymptomatic neighbours
//! during healthy windows of its `2d` neighbours. The number of windows is
//! `2d + N` with `N` shifted geometric of mean `2d`, and each created
//! asymptomatic site turns symptomatic before recovering with probability
//! `γ / (γ + 1)`. The offspring law is therefore
//! `Y = Y₁ + ⋯ + Y_{2d+N}`, `Y_j ~ Bernoulli(γ / (γ + 1))`.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{bernoulli, open01};

/// Default cap on simulated progeny.
pub const DEFAULT_PROGENY_CAP: u64 = 1_000_000;
/// Default iteration budget for the progeny fixed point.
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Iterates above this are treated as divergent.
pub const DIVERGENCE_CEILING: f64 = 1e10;

const SEARCH_CAP: f64 = 64.0;
const BACK_OFF: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GWParams {
    pub d: u32,
    pub gamma: f64,
}

impl GWParams {
    pub fn new(d: u32, gamma: f64) -> Result<Self> {
        if d == 0 {
            return Err(invalid("d", "lattice dimension must be at least 1"));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(invalid("gamma", format!("must be finite and >= 0, got {gamma}")));
        }
        Ok(Self { d, gamma })
    }

    fn two_d(&self) -> f64 {
        2.0 * f64::from(self.d)
    }

    /// `γ < 1 / (4d − 1)`, equivalently `E(Y) < 1`.
    pub fn subcritical(&self) -> bool {
        self.gamma < 1.0 / (4.0 * f64::from(self.d) - 1.0)
    }

    /// Probability that a created asymptomatic site turns symptomatic.
    pub fn onset_probability(&self) -> f64 {
        self.gamma / (self.gamma + 1.0)
    }

    /// `E(Y) = 4dγ / (γ + 1)`.
    pub fn offspring_mean(&self) -> f64 {
        2.0 * self.two_d() * self.onset_probability()
    }

    /// `E(π) = (γ + 1) / (γ + 1 − 4dγ)`; infinite when not subcritical.
    pub fn progeny_mean(&self) -> f64 {
        if self.subcritical() {
            (self.gamma + 1.0) / (self.gamma + 1.0 - 2.0 * self.two_d() * self.gamma)
        } else {
            f64::INFINITY
        }
    }

    /// Pole of `G_Y`, where `γ + 1 + 2dγ(1 − s)` vanishes.
    pub fn offspring_pole(&self) -> f64 {
        if self.gamma == 0.0 {
            f64::INFINITY
        } else {
            1.0 + (self.gamma + 1.0) / (self.two_d() * self.gamma)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgenyResult {
    pub progeny: u64,
    pub generations: u64,
    pub capped: bool,
}

/// Exponential tail certificate `P(X > K) ≤ c · s^{−K}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub c: f64,
    pub s: f64,
}

impl TailBound {
    pub fn bound(&self, k: f64) -> f64 {
        self.c * self.s.powf(-k)
    }

    /// Certificate for the number `π₁` of 0→1 flips, assembled from the
    /// progeny certificate and the window-count bound `φ(s₀)`:
    /// `P(π₁ > K) ≤ (C₁ + 1) · (s₁ ∧ b)^{−K/6d}` with `b = 1 + (1 − 1/4d)/4`.
    pub fn for_infections(progeny: &TailBound, d: u32) -> TailBound {
        let d = f64::from(d);
        let b = 1.0 + (1.0 - 1.0 / (4.0 * d)) / 4.0;
        TailBound {
            c: progeny.c + 1.0,
            s: progeny.s.min(b).powf(1.0 / (6.0 * d)),
        }
    }
}

/// Number of extra healthy windows `N`: `P(N = i) = (2d/(2d+1))^i / (2d+1)`.
pub fn sample_window_count<R: Rng + ?Sized>(params: &GWParams, rng: &mut R) -> u64 {
    let q = params.two_d() / (params.two_d() + 1.0);
    // Inverse transform: P(N >= i) = q^i.
    (open01(rng).ln() / q.ln()).floor() as u64
}

pub fn sample_offspring<R: Rng + ?Sized>(params: &GWParams, rng: &mut R) -> u64 {
    let trials = 2 * u64::from(params.d) + sample_window_count(params, rng);
    if params.gamma == 0.0 {
        return 0;
    }
    let p = params.onset_probability();
    (0..trials).filter(|_| bernoulli(rng, p)).count() as u64
}

/// Total progeny from a single ancestor, breadth first, truncated at `cap`.
pub fn simulate_progeny<R: Rng + ?Sized>(params: &GWParams, cap: u64, rng: &mut R) -> ProgenyResult {
    assert!(cap >= 1, "progeny cap must be positive");
    // Queue entries are generation indices of individuals still to reproduce.
    let mut queue = VecDeque::from([0u64]);
    let mut total = 1u64;
    let mut generations = 0u64;
    while let Some(gen) = queue.pop_front() {
        let children = sample_offspring(params, rng);
        if children == 0 {
            continue;
        }
        total += children;
        if total > cap {
            return ProgenyResult {
                progeny: cap,
                generations: generations.max(gen + 1),
                capped: true,
            };
        }
        generations = generations.max(gen + 1);
        queue.extend(std::iter::repeat_n(gen + 1, children as usize));
    }
    ProgenyResult {
        progeny: total,
        generations,
        capped: false,
    }
}

/// `G_N(s) = 1 / (1 + 2d(1 − s))`.
pub fn pgf_window_count(s: f64, params: &GWParams) -> Result<f64> {
    let denom = 1.0 + params.two_d() * (1.0 - s);
    if !(s >= 0.0) || denom <= 0.0 {
        return Err(Error::Domain {
            function: "G_N",
            value: s,
        });
    }
    Ok(1.0 / denom)
}

/// `G_{Y_j}(s) = (γs + 1) / (γ + 1)`.
pub fn pgf_onset_trial(s: f64, params: &GWParams) -> f64 {
    (params.gamma * s + 1.0) / (params.gamma + 1.0)
}

/// Offspring PGF `G_Y(s) = (γ+1)/(γ+1+2dγ(1−s)) · ((γs+1)/(γ+1))^{2d}`.
pub fn pgf_offspring(s: f64, params: &GWParams) -> Result<f64> {
    let g = params.gamma;
    let denom = g + 1.0 + params.two_d() * g * (1.0 - s);
    if !(s >= 0.0) || !s.is_finite() || denom <= 0.0 {
        return Err(Error::Domain {
            function: "G_Y",
            value: s,
        });
    }
    Ok((g + 1.0) / denom * pgf_onset_trial(s, params).powi(2 * params.d as i32))
}

/// Smallest fixed point of `x ↦ s · G_Y(x)`, i.e. the progeny PGF `G_π(s)`.
pub fn solve_progeny_pgf(s: f64, params: &GWParams, tol: f64) -> Result<f64> {
    solve_progeny_pgf_with(s, params, tol, DEFAULT_MAX_ITER)
}

pub fn solve_progeny_pgf_with(s: f64, params: &GWParams, tol: f64, max_iter: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain {
            function: "G_pi",
            value: s,
        });
    }
    let diverged = |iterations| Error::NoConvergence { s, iterations };
    let pole = params.offspring_pole();
    let mut x = 0.0;
    for it in 0..max_iter {
        if x >= pole {
            return Err(diverged(it));
        }
        let next = s * pgf_offspring(x, params).map_err(|_| diverged(it))?;
        if (next - x).abs() <= tol {
            return Ok(x);
        }
        if !next.is_finite() || next > DIVERGENCE_CEILING {
            return Err(diverged(it));
        }
        x = next;
    }
    Err(diverged(max_iter))
}

/// Finds `s₁ > 1` where `G_π(s₁)` is finite and returns `(G_π(s₁), s₁)`.
///
/// With `target = None` the boundary of convergence is located by bisection
/// and `s₁` is placed at 99% of the distance from 1 to that boundary.
pub fn tail_certificate(params: &GWParams, target: Option<f64>) -> Result<TailBound> {
    if !params.subcritical() {
        return Err(Error::NotSubcritical {
            gamma: params.gamma,
            d: params.d,
        });
    }
    const TOL: f64 = 1e-12;
    let s = match target {
        Some(s) if !(s > 1.0) => return Err(invalid("target_s", format!("must exceed 1, got {s}"))),
        Some(s) => s,
        None => {
            let converges = |s: f64| solve_progeny_pgf(s, params, TOL).is_ok();
            let (mut lo, mut hi) = (1.0, 2.0);
            while converges(hi) && hi < SEARCH_CAP {
                lo = hi;
                hi *= 2.0;
            }
            let boundary = if converges(hi) {
                hi
            } else {
                for _ in 0..200 {
                    if hi - lo <= 1e-12 {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if converges(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            };
            1.0 + BACK_OFF * (boundary - 1.0)
        }
    };
    let c = solve_progeny_pgf(s, params, TOL)?;
    Ok(TailBound { c, s })
}

/// PGF of `N̄ = 2dL + N₁ + ⋯ + N_L`: `(s^{2d} / (1 + 2d(1 − s)))^L`.
pub fn cumulative_infection_pgf(s: f64, params: &GWParams, l: u32) -> Result<f64> {
    let gn = pgf_window_count(s, params).map_err(|_| Error::Domain {
        function: "G_Nbar",
        value: s,
    })?;
    Ok((s.powi(2 * params.d as i32) * gn).powi(l as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiCheck {
    /// `φ(s₀)` with `φ(s) = (1 + 2d(1 − s)) s^{4d}` and `s₀ = 1 + 1/4d`.
    pub phi_at_s0: f64,
    /// Binomial lower bound `1 + (1 − 1/4d)/4`.
    pub binomial_lower: f64,
}

pub fn phi_check(d: u32) -> Result<PhiCheck> {
    if d == 0 {
        return Err(invalid("d", "lattice dimension must be at least 1"));
    }
    let df = f64::from(d);
    let s0 = 1.0 + 1.0 / (4.0 * df);
    let phi_at_s0 = (1.0 + 2.0 * df * (1.0 - s0)) * s0.powi(4 * d as i32);
    let binomial_lower = 1.0 + 0.25 * (1.0 - 1.0 / (4.0 * df));
    assert!(phi_at_s0 >= binomial_lower && binomial_lower > 1.0);
    Ok(PhiCheck {
        phi_at_s0,
        binomial_lower,
    })
}
