//! Space-time block experiments.
//!
//! The outer block is `ℬ = [−2K, 2K]^d × [0, 2K]` and the inner block is
//! `𝒜 = [−K, K]^d × [K, 2K]`. A run simulates the process inside `ℬ` with a
//! chosen exterior and records whether `𝒜` stays healthy, together with the
//! entry points through the bottom (`Λ₋`) and the periphery (`Λ₊`).

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Initial, Lattice, SimParams, Simulation, StepOutcome};
use crate::error::{invalid, Result};

/// Axis-aligned space-time box `[lo, hi]^d × [t0, t1]` (cubic in space).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeBox {
    pub lo: i64,
    pub hi: i64,
    pub t0: f64,
    pub t1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockGeometry {
    pub d: u32,
    pub k: u32,
    /// `M = 4dK (4K + 1)^{d−1}`.
    pub m_bound: u64,
    pub block_a: SpaceTimeBox,
    pub block_b: SpaceTimeBox,
}

impl BlockGeometry {
    pub fn new(d: u32, k: u32) -> Result<Self> {
        if k < 1 {
            return Err(invalid("k", "block scale must be at least 1"));
        }
        if d < 1 {
            return Err(invalid("d", "must be at least 1"));
        }
        let kk = i64::from(k);
        let kf = f64::from(k);
        Ok(Self {
            d,
            k,
            m_bound: 4 * u64::from(d) * u64::from(k) * (4 * u64::from(k) + 1).pow(d - 1),
            block_a: SpaceTimeBox {
                lo: -kk,
                hi: kk,
                t0: kf,
                t1: 2.0 * kf,
            },
            block_b: SpaceTimeBox {
                lo: -2 * kk,
                hi: 2 * kk,
                t0: 0.0,
                t1: 2.0 * kf,
            },
        })
    }

    /// `(4K + 1)^d`, the number of sites of the bottom face `ℬ₋`.
    pub fn bottom_sites(&self) -> u64 {
        (4 * u64::from(self.k) + 1).pow(self.d)
    }

    /// Lattice covering the spatial extent of `ℬ`.
    pub fn lattice(&self, params: &SimParams) -> Lattice {
        Lattice::cube(self.d, 2 * self.k, params.boundary)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockOutcome {
    /// No site of `𝒜` is infected at any time in `[K, 2K]`.
    pub healthy_block: bool,
    /// Infected sites of `ℬ₋` at time 0.
    pub card_lambda_minus: u64,
    /// Periphery sites infected at time 0, plus 0 → 1 flips on the periphery
    /// during `(0, 2K]`.
    pub card_lambda_plus: u64,
    /// `card(Λ₋ ∪ Λ₊)`; the two sets share the periphery points at time 0.
    pub card_union: u64,
}

/// Runs one block experiment on `lattice` (from [`BlockGeometry::lattice`]).
/// The exterior is `params.boundary`; `params.horizon` is ignored in favour
/// of the block height `2K`.
pub fn run_block_experiment<R: Rng + ?Sized>(
    geom: &BlockGeometry,
    lattice: &Lattice,
    params: &SimParams,
    initial: &Initial,
    rng: &mut R,
) -> Result<BlockOutcome> {
    if geom.k < 1 {
        return Err(invalid("k", "block scale must be at least 1"));
    }
    let k = u64::from(geom.k);
    let outer = 2 * k;
    let mut sim = Simulation::new(lattice, params.rates(), initial)?;

    let in_a = |site: usize| lattice.sup_norm(site) <= k;
    let on_periphery = |site: usize| lattice.sup_norm(site) == outer;

    let infected0: Vec<usize> = (0..lattice.len()).filter(|&i| sim.states()[i].is_infected()).collect();
    let card_lambda_minus = infected0.len() as u64;
    let periphery0 = infected0.iter().filter(|&&i| on_periphery(i)).count() as u64;
    let mut later_entries = 0u64;
    let mut healthy = true;

    let t_mid = geom.block_a.t0;
    let t_end = geom.block_a.t1;
    let mut checked_mid = false;
    loop {
        let stop = if checked_mid { t_end } else { t_mid };
        match sim.step_until(stop, rng) {
            StepOutcome::Event(e) => {
                let flips = e.closure.iter().copied().chain(
                    matches!(e.kind, super::EventKind::Infect1 | super::EventKind::Infect2).then_some(e.site),
                );
                for site in flips {
                    if on_periphery(site) {
                        later_entries += 1;
                    }
                    if checked_mid && in_a(site) {
                        healthy = false;
                    }
                }
            }
            StepOutcome::Horizon if !checked_mid => {
                checked_mid = true;
                if (0..lattice.len()).any(|i| in_a(i) && sim.states()[i].is_infected()) {
                    healthy = false;
                }
            }
            StepOutcome::Horizon => break,
            StepOutcome::Absorbed => {
                if !checked_mid && (0..lattice.len()).any(|i| in_a(i) && sim.states()[i].is_infected()) {
                    healthy = false;
                }
                break;
            }
        }
    }

    Ok(BlockOutcome {
        healthy_block: healthy,
        card_lambda_minus,
        card_lambda_plus: periphery0 + later_entries,
        card_union: card_lambda_minus + later_entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use crate::rng::stream;

    #[test]
    fn geometry() {
        let g = BlockGeometry::new(1, 6).unwrap();
        assert_eq!(g.m_bound, 24);
        assert_eq!(g.bottom_sites(), 25);
        let g = BlockGeometry::new(2, 3).unwrap();
        assert_eq!(g.m_bound, 4 * 2 * 3 * 13);
        assert!(g.bottom_sites() <= g.m_bound);
        assert_eq!((g.block_b.lo, g.block_b.hi), (-6, 6));
        assert_eq!((g.block_a.t0, g.block_a.t1), (3.0, 6.0));
        // 𝒜 sits inside ℬ with margin K in space and time.
        assert!(g.block_a.lo - g.block_b.lo >= 3 && g.block_a.t0 - g.block_b.t0 >= 3.0);
        assert!(BlockGeometry::new(1, 0).is_err());
    }

    #[test]
    fn healthy_start_without_infection_stays_healthy() {
        let params = SimParams {
            lambda1: 0.0,
            lambda2: 0.0,
            boundary: Boundary::HealthyFrozen,
            ..SimParams::default()
        };
        let g = BlockGeometry::new(1, 4).unwrap();
        let l = g.lattice(&params);
        let out = run_block_experiment(&g, &l, &params, &Initial::AllHealthy, &mut stream(0)).unwrap();
        assert!(out.healthy_block);
        assert_eq!(out.card_lambda_minus, 0);
        assert_eq!(out.card_lambda_plus, 0);
    }

    #[test]
    fn entry_counts_are_consistent() {
        let params = SimParams {
            lambda1: 0.0,
            lambda2: f64::INFINITY,
            gamma: 0.2,
            boundary: Boundary::SymptomaticFrozen,
            ..SimParams::default()
        };
        let mut rng = stream(1);
        for k in [1, 2, 4] {
            for d in [1, 2] {
                let g = BlockGeometry::new(d, k).unwrap();
                let l = g.lattice(&params);
                for init in [Initial::AllHealthy, Initial::AllSymptomatic] {
                    let out = run_block_experiment(&g, &l, &params, &init, &mut rng).unwrap();
                    assert!(out.card_lambda_minus <= g.bottom_sites());
                    assert!(out.card_union >= out.card_lambda_minus);
                    assert!(out.card_union <= out.card_lambda_minus + out.card_lambda_plus);
                }
            }
        }
    }

    #[test]
    fn infected_center_spoils_the_block() {
        // γ = 0 and no infection: an asymptomatic centre survives to time K
        // with probability e^{-K}; with K = 1 that is frequent enough to see.
        let params = SimParams {
            lambda1: 0.0,
            lambda2: 0.0,
            gamma: 0.0,
            boundary: Boundary::HealthyFrozen,
            ..SimParams::default()
        };
        let g = BlockGeometry::new(1, 1).unwrap();
        let l = g.lattice(&params);
        let init = Initial::Explicit(vec![(vec![0], crate::lattice::SiteState::Asymptomatic)]);
        let mut rng = stream(2);
        let spoiled = (0..2000)
            .filter(|_| !run_block_experiment(&g, &l, &params, &init, &mut rng).unwrap().healthy_block)
            .count() as f64
            / 2000.0;
        let p = (-1.0f64).exp();
        assert!((spoiled - p).abs() < 4.0 * (p * (1.0 - p) / 2000.0).sqrt(), "{spoiled}");
    }
}
