//! Spatial contact process with an asymptomatic state on finite boxes of `Z^d`.
//!
//! Site states are healthy (0), asymptomatic (1) and symptomatic (2). A healthy
//! site becomes asymptomatic at rate `λ₁ f₁ + λ₂ f₂`, where `f_i` is the
//! fraction of its `2d` neighbours in state `i`; asymptomatic sites turn
//! symptomatic at rate `γ`; infected sites recover at rate one.
//!
//! `λ₂ = ∞` is represented by `f64::INFINITY` and handled as an instantaneous
//! closure: no healthy site is ever left next to a symptomatic one.

mod block;
mod engine;
mod oracle;

pub use block::{run_block_experiment, BlockGeometry, BlockOutcome, SpaceTimeBox};
pub use engine::{gillespie_step, run_from, run_single_source, Event, EventKind, RunSummary, Simulation, StepOutcome};
pub use oracle::{exact_small_lattice_oracle, OracleResult, MAX_ORACLE_SITES};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const DEFAULT_HORIZON: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum SiteState {
    Healthy = 0,
    Asymptomatic = 1,
    Symptomatic = 2,
}

impl SiteState {
    pub fn is_infected(self) -> bool {
        self != SiteState::Healthy
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Self::Healthy),
            1 => Some(Self::Asymptomatic),
            2 => Some(Self::Symptomatic),
            _ => None,
        }
    }
}

/// What lies outside the simulation box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Exterior sites are healthy forever.
    HealthyFrozen,
    /// The box wraps around.
    Periodic,
    /// Exterior sites are symptomatic forever (worst case for block events).
    SymptomaticFrozen,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "healthy_frozen" => Ok(Self::HealthyFrozen),
            "periodic" => Ok(Self::Periodic),
            "symptomatic_frozen" => Ok(Self::SymptomaticFrozen),
            other => Err(invalid("boundary", format!("unknown boundary `{other}`"))),
        }
    }
}

impl Boundary {
    /// State seen through a missing neighbour.
    pub(crate) fn exterior_state(self) -> SiteState {
        match self {
            Boundary::SymptomaticFrozen => SiteState::Symptomatic,
            _ => SiteState::Healthy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub d: u32,
    /// The box is `[−half_width, half_width]^d`.
    pub half_width: u32,
    pub lambda1: f64,
    /// `f64::INFINITY` selects the instantaneous-closure limit.
    pub lambda2: f64,
    pub gamma: f64,
    pub boundary: Boundary,
    pub horizon: f64,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            d: 1,
            half_width: 100,
            lambda1: 0.0,
            lambda2: f64::INFINITY,
            gamma: 0.2,
            boundary: Boundary::HealthyFrozen,
            horizon: DEFAULT_HORIZON,
            seed: 0,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("d", "must be at least 1"));
        }
        if self.half_width == 0 {
            return Err(invalid("half_width", "must be at least 1"));
        }
        if !(self.lambda1 >= 0.0 && self.lambda1.is_finite()) {
            return Err(invalid("lambda1", format!("must be finite and >= 0, got {}", self.lambda1)));
        }
        if !(self.lambda2 >= 0.0) {
            return Err(invalid("lambda2", format!("must be >= 0 or inf, got {}", self.lambda2)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(invalid("gamma", format!("must be finite and >= 0, got {}", self.gamma)));
        }
        if !(self.horizon > 0.0) {
            return Err(invalid("horizon", format!("must be positive, got {}", self.horizon)));
        }
        let sites = (2.0 * f64::from(self.half_width) + 1.0).powi(self.d as i32);
        if sites > 5e7 {
            return Err(invalid("half_width", format!("box has {sites} sites, limit is 5e7")));
        }
        Ok(())
    }

    pub fn rates(&self) -> Rates {
        Rates {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            gamma: self.gamma,
        }
    }

    pub fn lattice(&self) -> Result<Lattice> {
        self.validate()?;
        Ok(Lattice::cube(self.d, self.half_width, self.boundary))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gamma: f64,
}

impl Rates {
    pub fn closure(&self) -> bool {
        self.lambda2 == f64::INFINITY
    }
}

/// Sentinel neighbour index for a site outside the box.
pub const EXTERIOR: usize = usize::MAX;

/// A box `∏ [lo_i, hi_i]` of `Z^d` with precomputed nearest neighbours.
#[derive(Debug, Clone)]
pub struct Lattice {
    d: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
    boundary: Boundary,
    neighbors: Vec<usize>,
    sup: Vec<u64>,
    face: Vec<bool>,
}

impl Lattice {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>, boundary: Boundary) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(invalid("extent", "lo and hi must be nonempty and of equal length"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(invalid("extent", "lo must not exceed hi"));
        }
        let d = lo.len();
        let mut lattice = Self {
            d,
            lo,
            hi,
            boundary,
            neighbors: Vec::new(),
            sup: Vec::new(),
            face: Vec::new(),
        };
        let n = lattice.len();
        let mut neighbors = Vec::with_capacity(n * 2 * d);
        let mut sup = Vec::with_capacity(n);
        let mut face = Vec::with_capacity(n);
        let mut coords = vec![0i64; d];
        for idx in 0..n {
            lattice.fill_coords(idx, &mut coords);
            sup.push(coords.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0));
            face.push(
                boundary != Boundary::Periodic
                    && (0..d).any(|a| coords[a] == lattice.lo[a] || coords[a] == lattice.hi[a]),
            );
            for axis in 0..d {
                for step in [1i64, -1] {
                    let mut c = coords.clone();
                    c[axis] += step;
                    if boundary == Boundary::Periodic {
                        let side = lattice.side(axis);
                        c[axis] = lattice.lo[axis] + (c[axis] - lattice.lo[axis]).rem_euclid(side);
                    }
                    neighbors.push(lattice.index(&c).unwrap_or(EXTERIOR));
                }
            }
        }
        lattice.neighbors = neighbors;
        lattice.sup = sup;
        lattice.face = face;
        Ok(lattice)
    }

    /// `[−half_width, half_width]^d`.
    pub fn cube(d: u32, half_width: u32, boundary: Boundary) -> Self {
        let w = i64::from(half_width);
        Self::new(vec![-w; d as usize], vec![w; d as usize], boundary).expect("valid cube")
    }

    /// A one-dimensional path of `n` sites, `{0, …, n−1}`.
    pub fn path(n: usize, boundary: Boundary) -> Result<Self> {
        if n == 0 {
            return Err(invalid("sites", "path needs at least one site"));
        }
        Self::new(vec![0], vec![n as i64 - 1], boundary)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    fn side(&self, axis: usize) -> i64 {
        self.hi[axis] - self.lo[axis] + 1
    }

    pub fn len(&self) -> usize {
        (0..self.d).map(|a| self.side(a) as usize).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, coords: &[i64]) -> Option<usize> {
        if coords.len() != self.d {
            return None;
        }
        let mut idx = 0usize;
        for axis in (0..self.d).rev() {
            let c = coords[axis];
            if c < self.lo[axis] || c > self.hi[axis] {
                return None;
            }
            idx = idx * self.side(axis) as usize + (c - self.lo[axis]) as usize;
        }
        Some(idx)
    }

    fn fill_coords(&self, mut idx: usize, out: &mut [i64]) {
        for (axis, slot) in out.iter_mut().enumerate() {
            let side = self.side(axis) as usize;
            *slot = self.lo[axis] + (idx % side) as i64;
            idx /= side;
        }
    }

    pub fn coords(&self, idx: usize) -> Vec<i64> {
        let mut out = vec![0; self.d];
        self.fill_coords(idx, &mut out);
        out
    }

    /// Sup-norm of the site's coordinates.
    pub fn sup_norm(&self, idx: usize) -> u64 {
        self.sup[idx]
    }

    /// Whether the site lies on a face of a non-periodic box.
    pub fn on_face(&self, idx: usize) -> bool {
        self.face[idx]
    }

    /// The `2d` neighbours of `idx`; [`EXTERIOR`] marks a missing one.
    pub fn neighbors(&self, idx: usize) -> &[usize] {
        let k = 2 * self.d;
        &self.neighbors[idx * k..(idx + 1) * k]
    }
}

/// A snapshot of the process.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub states: Vec<SiteState>,
    pub time: f64,
}

impl Configuration {
    pub fn count(&self, state: SiteState) -> usize {
        self.states.iter().filter(|&&s| s == state).count()
    }
}

/// Initial condition for a run.
#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    SingleSymptomaticAtOrigin,
    AllHealthy,
    AllSymptomatic,
    /// Listed sites take the given state, all others are healthy.
    Explicit(Vec<(Vec<i64>, SiteState)>),
}

/// Configuration at time 0 before any closure is applied.
pub(crate) fn initial_states(lattice: &Lattice, initial: &Initial) -> Result<Vec<SiteState>> {
    let mut states = vec![SiteState::Healthy; lattice.len()];
    match initial {
        Initial::AllHealthy => {}
        Initial::AllSymptomatic => states.fill(SiteState::Symptomatic),
        Initial::SingleSymptomaticAtOrigin => {
            let origin = vec![0; lattice.dim()];
            let idx = lattice.index(&origin).ok_or(Error::OutsideBox(origin))?;
            states[idx] = SiteState::Symptomatic;
        }
        Initial::Explicit(sites) => {
            for (coords, state) in sites {
                let idx = lattice.index(coords).ok_or_else(|| Error::OutsideBox(coords.clone()))?;
                states[idx] = *state;
            }
        }
    }
    Ok(states)
}

/// Builds the time-0 configuration, applying the `λ₂ = ∞` closure if needed.
pub fn init_state(lattice: &Lattice, params: &SimParams, initial: &Initial) -> Result<Configuration> {
    let sim = Simulation::new(lattice, params.rates(), initial)?;
    Ok(sim.configuration())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_indexing_roundtrip() {
        let l = Lattice::cube(2, 3, Boundary::HealthyFrozen);
        assert_eq!(l.len(), 49);
        for idx in 0..l.len() {
            assert_eq!(l.index(&l.coords(idx)), Some(idx));
        }
        assert_eq!(l.index(&[4, 0]), None);
        assert_eq!(l.sup_norm(l.index(&[-2, 3]).unwrap()), 3);
    }

    #[test]
    fn neighbours_respect_boundary() {
        let l = Lattice::path(3, Boundary::HealthyFrozen).unwrap();
        assert_eq!(l.neighbors(0), &[1, EXTERIOR]);
        assert_eq!(l.neighbors(1), &[2, 0]);
        let p = Lattice::path(3, Boundary::Periodic).unwrap();
        assert_eq!(p.neighbors(0), &[1, 2]);
        assert_eq!(p.neighbors(2), &[0, 1]);
        let c = Lattice::cube(2, 1, Boundary::Periodic);
        for idx in 0..c.len() {
            assert!(c.neighbors(idx).iter().all(|&n| n != EXTERIOR));
        }
    }

    #[test]
    fn init_variants() {
        let params = SimParams {
            half_width: 5,
            lambda2: 1.0,
            ..SimParams::default()
        };
        let l = params.lattice().unwrap();
        let c = init_state(&l, &params, &Initial::AllHealthy).unwrap();
        assert_eq!(c.count(SiteState::Healthy), 11);
        let c = init_state(&l, &params, &Initial::SingleSymptomaticAtOrigin).unwrap();
        assert_eq!(c.count(SiteState::Symptomatic), 1);
        assert_eq!(c.count(SiteState::Asymptomatic), 0);

        let inf = SimParams {
            lambda2: f64::INFINITY,
            ..params.clone()
        };
        let sim = Simulation::new(&l, inf.rates(), &Initial::SingleSymptomaticAtOrigin).unwrap();
        let c = sim.configuration();
        assert_eq!(c.states[l.index(&[0]).unwrap()], SiteState::Symptomatic);
        assert_eq!(c.states[l.index(&[1]).unwrap()], SiteState::Asymptomatic);
        assert_eq!(c.states[l.index(&[-1]).unwrap()], SiteState::Asymptomatic);
        assert_eq!(c.count(SiteState::Asymptomatic), 2);
        assert_eq!(sim.pi1(), 2);

        let bad = Initial::Explicit(vec![(vec![6], SiteState::Symptomatic)]);
        assert!(matches!(init_state(&l, &params, &bad), Err(Error::OutsideBox(_))));
    }

    #[test]
    fn param_validation() {
        let ok = SimParams::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SimParams { lambda1: -1.0, ..ok.clone() },
            SimParams { gamma: f64::NAN, ..ok.clone() },
            SimParams { horizon: 0.0, ..ok.clone() },
            SimParams { half_width: 0, ..ok.clone() },
            SimParams { lambda2: -0.5, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
        assert_eq!("periodic".parse::<Boundary>().unwrap(), Boundary::Periodic);
        assert!("open".parse::<Boundary>().is_err());
    }
}
