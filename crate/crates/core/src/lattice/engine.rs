//! Next-event (Gillespie) simulation of the lattice CTMC.
//!
//! Only sites with a positive rate are kept in the active list, so the cost of
//! a step is proportional to the size of the infected region rather than the
//! box.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{initial_states, Configuration, Initial, Lattice, Rates, SimParams, SiteState, EXTERIOR};
use crate::error::Result;
use crate::rng::exponential;

const NOT_ACTIVE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// 0 → 1 through an asymptomatic neighbour.
    Infect1,
    /// 0 → 1 through a symptomatic neighbour.
    Infect2,
    /// 1 → 2.
    Onset,
    /// 1 → 0 or 2 → 0.
    Recover,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time: f64,
    pub site: usize,
    pub kind: EventKind,
    /// Sites flipped 0 → 1 by the `λ₂ = ∞` closure right after the event.
    pub closure: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    Event(Event),
    /// Total rate is zero: nothing can ever happen again.
    Absorbed,
    /// The next event would fall after the requested stopping time.
    Horizon,
}

/// Observables of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    /// Number of 0 → 1 flips, closure flips included.
    pub pi1: u64,
    /// Initially symptomatic sites plus 1 → 2 flips.
    pub pi2: u64,
    /// Integral over time of the number of infected sites.
    pub t_cumulative: f64,
    pub extinction_time: Option<f64>,
    /// Largest sup-norm of a site that was ever infected.
    pub max_space: u64,
    /// Last time at which some site was infected.
    pub max_time: f64,
    pub extinct: bool,
    /// Some infected site touched a face of the box.
    pub hit_boundary: bool,
}

pub struct Simulation<'a> {
    lattice: &'a Lattice,
    rates: Rates,
    states: Vec<SiteState>,
    site_rate: Vec<f64>,
    active: Vec<usize>,
    slot: Vec<usize>,
    time: f64,
    infected: usize,
    pi1: u64,
    pi2: u64,
    t_cumulative: f64,
    max_space: u64,
    hit_boundary: bool,
    extinction_time: Option<f64>,
}

impl<'a> Simulation<'a> {
    pub fn new(lattice: &'a Lattice, rates: Rates, initial: &Initial) -> Result<Self> {
        let states = initial_states(lattice, initial)?;
        Ok(Self::from_states(lattice, rates, states))
    }

    /// Starts from explicit site states at time 0. With `λ₂ = ∞` the closure
    /// is applied first and its flips count towards `π₁`.
    pub fn from_states(lattice: &'a Lattice, rates: Rates, states: Vec<SiteState>) -> Self {
        assert_eq!(states.len(), lattice.len());
        let n = states.len();
        let mut sim = Self {
            lattice,
            rates,
            states,
            site_rate: vec![0.0; n],
            active: Vec::new(),
            slot: vec![NOT_ACTIVE; n],
            time: 0.0,
            infected: 0,
            pi1: 0,
            pi2: 0,
            t_cumulative: 0.0,
            max_space: 0,
            hit_boundary: false,
            extinction_time: None,
        };
        for idx in 0..n {
            match sim.states[idx] {
                SiteState::Healthy => {}
                SiteState::Asymptomatic => sim.mark_infected(idx),
                SiteState::Symptomatic => {
                    sim.mark_infected(idx);
                    sim.pi2 += 1;
                }
            }
        }
        if rates.closure() {
            let flips: Vec<usize> = (0..n).filter(|&i| sim.needs_closure(i)).collect();
            for &i in &flips {
                sim.states[i] = SiteState::Asymptomatic;
                sim.mark_infected(i);
                sim.pi1 += 1;
            }
        }
        for idx in 0..n {
            sim.refresh(idx);
        }
        if sim.infected == 0 {
            sim.extinction_time = Some(0.0);
        }
        sim
    }

    pub fn lattice(&self) -> &Lattice {
        self.lattice
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn states(&self) -> &[SiteState] {
        &self.states
    }

    pub fn infected(&self) -> usize {
        self.infected
    }

    pub fn pi1(&self) -> u64 {
        self.pi1
    }

    pub fn pi2(&self) -> u64 {
        self.pi2
    }

    pub fn configuration(&self) -> Configuration {
        Configuration {
            states: self.states.clone(),
            time: self.time,
        }
    }

    fn mark_infected(&mut self, idx: usize) {
        self.infected += 1;
        self.max_space = self.max_space.max(self.lattice.sup_norm(idx));
        self.hit_boundary |= self.lattice.on_face(idx);
    }

    fn neighbor_state(&self, n: usize) -> SiteState {
        if n == EXTERIOR {
            self.lattice.boundary().exterior_state()
        } else {
            self.states[n]
        }
    }

    /// Numbers of asymptomatic and symptomatic neighbours.
    fn neighbor_counts(&self, idx: usize) -> (u32, u32) {
        let mut counts = (0, 0);
        for &n in self.lattice.neighbors(idx) {
            match self.neighbor_state(n) {
                SiteState::Asymptomatic => counts.0 += 1,
                SiteState::Symptomatic => counts.1 += 1,
                SiteState::Healthy => {}
            }
        }
        counts
    }

    fn needs_closure(&self, idx: usize) -> bool {
        self.states[idx] == SiteState::Healthy
            && self
                .lattice
                .neighbors(idx)
                .iter()
                .any(|&n| self.neighbor_state(n) == SiteState::Symptomatic)
    }

    /// Per-site infection rates `(λ₁ n₁ / 2d, λ₂ n₂ / 2d)`; the second term is
    /// zero under closure.
    fn infection_rates(&self, idx: usize) -> (f64, f64) {
        let (n1, n2) = self.neighbor_counts(idx);
        let two_d = 2.0 * self.lattice.dim() as f64;
        let r1 = self.rates.lambda1 * f64::from(n1) / two_d;
        let r2 = if self.rates.closure() || n2 == 0 {
            0.0
        } else {
            self.rates.lambda2 * f64::from(n2) / two_d
        };
        (r1, r2)
    }

    fn compute_rate(&self, idx: usize) -> f64 {
        match self.states[idx] {
            SiteState::Healthy => {
                let (r1, r2) = self.infection_rates(idx);
                r1 + r2
            }
            SiteState::Asymptomatic => self.rates.gamma + 1.0,
            SiteState::Symptomatic => 1.0,
        }
    }

    fn refresh(&mut self, idx: usize) {
        let rate = self.compute_rate(idx);
        self.site_rate[idx] = rate;
        let slot = self.slot[idx];
        if rate > 0.0 && slot == NOT_ACTIVE {
            self.slot[idx] = self.active.len();
            self.active.push(idx);
        } else if rate <= 0.0 && slot != NOT_ACTIVE {
            self.active.swap_remove(slot);
            if let Some(&moved) = self.active.get(slot) {
                self.slot[moved] = slot;
            }
            self.slot[idx] = NOT_ACTIVE;
        }
    }

    fn refresh_around(&mut self, idx: usize) {
        self.refresh(idx);
        for k in 0..2 * self.lattice.dim() {
            let n = self.lattice.neighbors(idx)[k];
            if n != EXTERIOR {
                self.refresh(n);
            }
        }
    }

    pub fn total_rate(&self) -> f64 {
        self.active.iter().map(|&i| self.site_rate[i]).sum()
    }

    /// Advances to the next event, or stops at `t_stop` if it comes first.
    pub fn step_until<R: Rng + ?Sized>(&mut self, t_stop: f64, rng: &mut R) -> StepOutcome {
        let total = self.total_rate();
        if total <= 0.0 {
            return StepOutcome::Absorbed;
        }
        let dt = exponential(rng, total);
        if self.time + dt > t_stop {
            self.t_cumulative += self.infected as f64 * (t_stop - self.time);
            self.time = t_stop;
            return StepOutcome::Horizon;
        }
        self.t_cumulative += self.infected as f64 * dt;
        self.time += dt;

        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = *self.active.last().expect("positive total rate");
        let mut residual = 0.0;
        for &i in &self.active {
            let r = self.site_rate[i];
            if target < acc + r {
                chosen = i;
                residual = target - acc;
                break;
            }
            acc += r;
        }
        let site = chosen;

        let kind = match self.states[site] {
            SiteState::Healthy => {
                let (r1, _) = self.infection_rates(site);
                self.states[site] = SiteState::Asymptomatic;
                self.mark_infected(site);
                self.pi1 += 1;
                if residual < r1 {
                    EventKind::Infect1
                } else {
                    EventKind::Infect2
                }
            }
            SiteState::Asymptomatic if residual < self.rates.gamma => {
                self.states[site] = SiteState::Symptomatic;
                self.pi2 += 1;
                EventKind::Onset
            }
            SiteState::Asymptomatic | SiteState::Symptomatic => {
                self.states[site] = SiteState::Healthy;
                self.infected -= 1;
                EventKind::Recover
            }
        };
        self.refresh_around(site);

        let mut closure = Vec::new();
        if self.rates.closure() && kind != EventKind::Infect1 && kind != EventKind::Infect2 {
            if self.needs_closure(site) {
                closure.push(site);
            }
            for &n in self.lattice.neighbors(site) {
                if n != EXTERIOR && self.needs_closure(n) {
                    closure.push(n);
                }
            }
            // Periodic wrap on tiny boxes can list a site twice.
            closure.sort_unstable();
            closure.dedup();
            for &i in &closure {
                self.states[i] = SiteState::Asymptomatic;
                self.mark_infected(i);
                self.pi1 += 1;
            }
            for &i in &closure {
                self.refresh_around(i);
            }
        }

        if self.infected == 0 && self.extinction_time.is_none() {
            self.extinction_time = Some(self.time);
        }
        StepOutcome::Event(Event {
            time: self.time,
            site,
            kind,
            closure,
        })
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> StepOutcome {
        self.step_until(f64::INFINITY, rng)
    }

    /// Runs to absorption or `horizon`.
    pub fn run<R: Rng + ?Sized>(&mut self, horizon: f64, rng: &mut R) -> RunSummary {
        loop {
            if self.infected == 0 {
                break;
            }
            match self.step_until(horizon, rng) {
                StepOutcome::Event(_) => {}
                StepOutcome::Absorbed | StepOutcome::Horizon => break,
            }
        }
        self.summary()
    }

    pub fn summary(&self) -> RunSummary {
        RunSummary {
            pi1: self.pi1,
            pi2: self.pi2,
            t_cumulative: self.t_cumulative,
            extinction_time: self.extinction_time,
            max_space: self.max_space,
            max_time: self.extinction_time.unwrap_or(self.time),
            extinct: self.extinction_time.is_some(),
            hit_boundary: self.hit_boundary,
        }
    }
}

/// One Gillespie step of `sim`.
pub fn gillespie_step<R: Rng + ?Sized>(sim: &mut Simulation<'_>, rng: &mut R) -> StepOutcome {
    sim.step(rng)
}

pub fn run_from<R: Rng + ?Sized>(
    lattice: &Lattice,
    rates: Rates,
    initial: &Initial,
    horizon: f64,
    rng: &mut R,
) -> Result<RunSummary> {
    let mut sim = Simulation::new(lattice, rates, initial)?;
    Ok(sim.run(horizon, rng))
}

/// Single symptomatic site at the origin of the box described by `params`.
///
/// `lattice` must be the box of `params` (see [`SimParams::lattice`]); it is
/// passed in so that replicas can share the neighbour table.
pub fn run_single_source<R: Rng + ?Sized>(lattice: &Lattice, params: &SimParams, rng: &mut R) -> RunSummary {
    let mut sim = Simulation::new(lattice, params.rates(), &Initial::SingleSymptomaticAtOrigin)
        .expect("origin lies in every centred box");
    sim.run(params.horizon, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;
    use crate::rng::stream;

    fn rates(lambda1: f64, lambda2: f64, gamma: f64) -> Rates {
        Rates {
            lambda1,
            lambda2,
            gamma,
        }
    }

    fn mean_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    #[test]
    fn all_healthy_is_absorbed() {
        let l = Lattice::cube(1, 5, Boundary::HealthyFrozen);
        let mut sim = Simulation::new(&l, rates(1.0, 1.0, 1.0), &Initial::AllHealthy).unwrap();
        assert_eq!(sim.step(&mut stream(0)), StepOutcome::Absorbed);
        assert_eq!(sim.summary().extinction_time, Some(0.0));
    }

    #[test]
    fn lone_symptomatic_can_only_recover() {
        let l = Lattice::cube(1, 3, Boundary::HealthyFrozen);
        let mut rng = stream(1);
        for _ in 0..100 {
            let mut sim = Simulation::new(&l, rates(0.0, 0.0, 1.0), &Initial::SingleSymptomaticAtOrigin).unwrap();
            match sim.step(&mut rng) {
                StepOutcome::Event(e) => {
                    assert_eq!(e.kind, EventKind::Recover);
                    assert_eq!(e.site, l.index(&[0]).unwrap());
                }
                other => panic!("unexpected {other:?}"),
            }
            assert_eq!(sim.step(&mut rng), StepOutcome::Absorbed);
        }
    }

    #[test]
    fn onset_fraction_matches_competing_clocks() {
        let l = Lattice::cube(1, 1, Boundary::HealthyFrozen);
        let init = Initial::Explicit(vec![(vec![0], SiteState::Asymptomatic)]);
        let mut rng = stream(2);
        let n = 100_000;
        let onsets = (0..n)
            .filter(|_| {
                let mut sim = Simulation::new(&l, rates(0.0, 0.0, 2.0), &init).unwrap();
                matches!(sim.step(&mut rng), StepOutcome::Event(Event { kind: EventKind::Onset, .. }))
            })
            .count() as f64
            / n as f64;
        let p = 2.0 / 3.0;
        assert!((onsets - p).abs() <= 3.0 * (p * (1.0 - p) / n as f64).sqrt(), "{onsets}");
    }

    #[test]
    fn no_infection_mean_extinction_time_is_one() {
        let params = SimParams {
            half_width: 3,
            lambda1: 0.0,
            lambda2: 0.0,
            gamma: 0.7,
            ..SimParams::default()
        };
        let l = params.lattice().unwrap();
        let mut rng = stream(3);
        let runs: Vec<RunSummary> = (0..10_000).map(|_| run_single_source(&l, &params, &mut rng)).collect();
        assert!(runs.iter().all(|r| r.pi1 == 0 && r.pi2 == 1 && r.extinct));
        let times: Vec<f64> = runs.iter().map(|r| r.extinction_time.unwrap()).collect();
        let (m, se) = mean_se(&times);
        assert!((m - 1.0).abs() <= 3.0 * se, "{m}");
        for r in &runs {
            assert!((r.t_cumulative - r.extinction_time.unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn closure_window_count_gamma_zero() {
        // With γ = 0 the source stays the only symptomatic site and π₁ = 2d + N.
        let params = SimParams {
            half_width: 10,
            gamma: 0.0,
            ..SimParams::default()
        };
        let l = params.lattice().unwrap();
        let mut rng = stream(4);
        let runs: Vec<RunSummary> = (0..10_000).map(|_| run_single_source(&l, &params, &mut rng)).collect();
        assert!(runs.iter().all(|r| r.pi2 == 1 && r.max_space <= 1));
        let pi1: Vec<f64> = runs.iter().map(|r| r.pi1 as f64).collect();
        let (m, se) = mean_se(&pi1);
        assert!((m - 4.0).abs() <= 3.0 * se, "{m}");
    }

    #[test]
    fn closure_and_legality_hold_after_every_event() {
        for boundary in [Boundary::HealthyFrozen, Boundary::Periodic, Boundary::SymptomaticFrozen] {
            let l = Lattice::cube(2, 4, boundary);
            let mut rng = stream(5);
            let mut sim = Simulation::new(&l, rates(0.3, f64::INFINITY, 0.4), &Initial::SingleSymptomaticAtOrigin).unwrap();
            let mut pi1 = sim.pi1();
            let mut pi2 = sim.pi2();
            let mut flips = (pi1, pi2 - 1);
            for _ in 0..2000 {
                let before = sim.states().to_vec();
                match sim.step_until(50.0, &mut rng) {
                    StepOutcome::Event(e) => {
                        // A recovered site re-closed in the same event is 1 → 0 → 1.
                        if e.kind == EventKind::Recover && e.closure.contains(&e.site) {
                            flips.0 += 1;
                        }
                        for (i, (&a, &b)) in before.iter().zip(sim.states()).enumerate() {
                            if a == SiteState::Healthy && b == SiteState::Asymptomatic {
                                flips.0 += 1;
                                assert!(i == e.site || e.closure.contains(&i));
                            }
                            if a == SiteState::Asymptomatic && b == SiteState::Symptomatic {
                                flips.1 += 1;
                            }
                        }
                    }
                    _ => break,
                }
                for i in 0..l.len() {
                    assert!(!sim.needs_closure(i), "closure violated at {i}");
                }
                assert!(sim.pi1() >= pi1 && sim.pi2() >= pi2);
                pi1 = sim.pi1();
                pi2 = sim.pi2();
                assert_eq!(flips, (pi1, pi2 - 1));
            }
        }
    }

    #[test]
    fn all_healthy_stays_healthy() {
        for boundary in [Boundary::HealthyFrozen, Boundary::Periodic] {
            let l = Lattice::cube(2, 3, boundary);
            let mut sim = Simulation::new(&l, rates(2.0, f64::INFINITY, 1.0), &Initial::AllHealthy).unwrap();
            assert_eq!(sim.step_until(100.0, &mut stream(6)), StepOutcome::Absorbed);
            assert!(sim.states().iter().all(|&s| s == SiteState::Healthy));
        }
    }

    #[test]
    fn cumulative_time_dominates_extinction_time() {
        let params = SimParams {
            half_width: 30,
            lambda1: 0.5,
            lambda2: 2.0,
            gamma: 0.5,
            ..SimParams::default()
        };
        let l = params.lattice().unwrap();
        let mut rng = stream(7);
        for _ in 0..2000 {
            let r = run_single_source(&l, &params, &mut rng);
            if let Some(t) = r.extinction_time {
                assert!(r.t_cumulative >= t - 1e-9);
                assert_eq!(r.max_time, t);
            }
        }
    }

    #[test]
    fn horizon_stops_supercritical_runs() {
        let params = SimParams {
            half_width: 10,
            lambda1: 5.0,
            lambda2: 5.0,
            gamma: 1.0,
            horizon: 5.0,
            ..SimParams::default()
        };
        let l = params.lattice().unwrap();
        let mut rng = stream(8);
        let survivors = (0..200)
            .map(|_| run_single_source(&l, &params, &mut rng))
            .filter(|r| !r.extinct)
            .inspect(|r| assert_eq!(r.max_time, 5.0))
            .count();
        assert!(survivors > 0);
    }

    #[test]
    fn no_onset_probability_matches_closed_form() {
        // While the source is symptomatic its 2d neighbours stay asymptomatic,
        // each turning symptomatic at rate γ, so no onset happens before the
        // source recovers with probability 1/(1 + 2dγ). The 2d asymptomatic
        // sites left behind then recover first with probability (1 + γ)^{-2d}.
        for (d, gamma) in [(1u32, 0.2), (2, 0.1)] {
            let params = SimParams {
                d,
                half_width: 10,
                lambda1: 0.0,
                lambda2: f64::INFINITY,
                gamma,
                ..SimParams::default()
            };
            let l = params.lattice().unwrap();
            let mut rng = stream(8);
            let n = 100_000;
            let lone = (0..n).filter(|_| run_single_source(&l, &params, &mut rng).pi2 == 1).count() as f64 / n as f64;
            let two_d = 2.0 * f64::from(d);
            let want = (1.0 + gamma).powf(-two_d) / (1.0 + two_d * gamma);
            let se = (want * (1.0 - want) / n as f64).sqrt();
            assert!((lone - want).abs() <= 4.0 * se, "d={d}: {lone} vs {want}");
        }
    }
}
