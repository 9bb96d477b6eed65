//! Oriented site percolation on `Z^d × N`.
//!
//! Every site `(m, n)` has `2d + 1` out-arrows: one step in each spatial
//! direction at the same level and one step up in time.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest `n · (2d+1)^n` accepted by the exhaustive path enumeration.
pub const ENUMERATION_BUDGET: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteL {
    pub m: Vec<i64>,
    pub n: i64,
}

impl SiteL {
    pub fn new(m: Vec<i64>, n: i64) -> Self {
        Self { m, n }
    }

    pub fn origin(d: usize) -> Self {
        Self { m: vec![0; d], n: 0 }
    }

    /// Sup-norm distance over all space-time coordinates.
    pub fn sup_distance(&self, other: &SiteL) -> i64 {
        self.m
            .iter()
            .zip(&other.m)
            .map(|(a, b)| (a - b).abs())
            .chain(std::iter::once((self.n - other.n).abs()))
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    pub length: u32,
    pub count: u64,
    /// `(2d + 1)^length`.
    pub bound: f64,
}

/// The `2d` spatial neighbours at the same level, then the site above.
pub fn out_neighbors(site: &SiteL, d: usize) -> Vec<SiteL> {
    let mut out = Vec::with_capacity(2 * d + 1);
    for axis in 0..d {
        for step in [1, -1] {
            let mut m = site.m.clone();
            m[axis] += step;
            out.push(SiteL::new(m, site.n));
        }
    }
    out.push(SiteL::new(site.m.clone(), site.n + 1));
    out
}

fn check_budget(n: u32, d: usize) -> Result<()> {
    let work = f64::from(n.max(1)) * ((2 * d + 1) as f64).powi(n as i32);
    if work > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            work,
            budget: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

/// Calls `visit` on every self-avoiding directed path of `n` steps from the
/// origin (as the list of its `n + 1` sites).
pub fn for_each_directed_sa_path<F: FnMut(&[SiteL])>(n: u32, d: usize, mut visit: F) -> Result<()> {
    if d == 0 {
        return Err(invalid("d", "must be at least 1"));
    }
    check_budget(n, d)?;
    let origin = SiteL::origin(d);
    let mut path = vec![origin.clone()];
    let mut on_path: HashSet<SiteL> = HashSet::from([origin]);
    extend(&mut path, &mut on_path, n as usize, d, &mut visit);
    Ok(())
}

fn extend<F: FnMut(&[SiteL])>(path: &mut Vec<SiteL>, on_path: &mut HashSet<SiteL>, n: usize, d: usize, visit: &mut F) {
    if path.len() == n + 1 {
        visit(path);
        return;
    }
    let tip = path.last().expect("path starts at the origin").clone();
    for next in out_neighbors(&tip, d) {
        if on_path.insert(next.clone()) {
            path.push(next);
            extend(path, on_path, n, d, visit);
            let last = path.pop().expect("just pushed");
            on_path.remove(&last);
        }
    }
}

pub fn count_directed_sa_paths(n: u32, d: usize) -> Result<PathReport> {
    let mut count = 0u64;
    for_each_directed_sa_path(n, d, |_| count += 1)?;
    Ok(PathReport {
        length: n,
        count,
        bound: ((2 * d + 1) as f64).powi(n as i32),
    })
}

/// Greedy scan keeping each site whose sup-distance to every kept site
/// exceeds 2. Each kept site rules out at most `5^{d+1}` path sites, so at
/// least `⌈(len + 1) / 5^{d+1}⌉` are kept.
pub fn extract_two_separated(path: &[SiteL]) -> Vec<SiteL> {
    let mut kept: Vec<SiteL> = Vec::new();
    for site in path {
        if kept.iter().all(|k| k.sup_distance(site) > 2) {
            kept.push(site.clone());
        }
    }
    kept
}

/// `ln` of the closed-path union bound `(2d+1)^n · ε^{n/5^{d+1}}`, taking `ln ε`.
pub fn ln_closed_path_bound(n: u32, d: u32, ln_epsilon: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = f64::from(n);
    n * f64::from(2 * d + 1).ln() + n / 5f64.powi(d as i32 + 1) * ln_epsilon
}

pub fn closed_path_bound(n: u32, d: u32, epsilon: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(invalid("epsilon", format!("must lie in [0, 1], got {epsilon}")));
    }
    Ok(ln_closed_path_bound(n, d, epsilon.ln()).exp())
}

/// `ln ε` for `ε = (4d + 2)^{−5^{d+1}}`, the density at which the union bound
/// collapses to `2^{−n}`. The value itself underflows for `d ≥ 3`.
pub fn ln_critical_epsilon(d: u32) -> f64 {
    -5f64.powi(d as i32 + 1) * f64::from(4 * d + 2).ln()
}

/// Finite window `[−half_width, half_width]^d × {0, …, levels − 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldExtent {
    pub d: u32,
    pub half_width: u32,
    pub levels: u32,
}

impl FieldExtent {
    pub fn new(d: u32, half_width: u32, levels: u32) -> Result<Self> {
        if d == 0 {
            return Err(invalid("d", "must be at least 1"));
        }
        if levels == 0 {
            return Err(invalid("levels", "must be at least 1"));
        }
        let side = 2 * u64::from(half_width) + 1;
        if (side as f64).powi(d as i32) * f64::from(levels) > 1e8 {
            return Err(invalid("half_width", "field window exceeds 1e8 sites"));
        }
        Ok(Self { d, half_width, levels })
    }

    fn side(&self) -> usize {
        2 * self.half_width as usize + 1
    }

    fn layer(&self) -> usize {
        self.side().pow(self.d)
    }

    pub fn len(&self) -> usize {
        self.layer() * self.levels as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn site(&self, idx: usize) -> SiteL {
        let side = self.side();
        let n = (idx / self.layer()) as i64;
        let mut rest = idx % self.layer();
        let m = (0..self.d)
            .map(|_| {
                let c = (rest % side) as i64 - i64::from(self.half_width);
                rest /= side;
                c
            })
            .collect();
        SiteL::new(m, n)
    }

    fn arrows(&self, idx: usize, out: &mut Vec<usize>) {
        out.clear();
        let side = self.side();
        let layer = self.layer();
        let within = idx % layer;
        let mut stride = 1;
        for _ in 0..self.d {
            let c = (within / stride) % side;
            if c + 1 < side {
                out.push(idx + stride);
            }
            if c > 0 {
                out.push(idx - stride);
            }
            stride *= side;
        }
        if idx / layer + 1 < self.levels as usize {
            out.push(idx + layer);
        }
    }
}

/// Closed/open states on a finite window.
#[derive(Debug, Clone, PartialEq)]
pub struct PercField {
    pub epsilon: f64,
    pub extent: FieldExtent,
    pub closed: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    pub has_closed_path_from_level0: bool,
    /// Highest level reached by a closed path from level 0; any such path
    /// has at least this many arrows. 0 when nothing is reachable.
    pub longest_closed_path: u64,
}

impl PercField {
    /// Thresholds shared uniforms: site `i` is closed iff `uniforms[i] < ε`.
    /// Reusing the same uniforms couples fields at different `ε`.
    pub fn from_uniforms(epsilon: f64, extent: FieldExtent, uniforms: &[f64]) -> Self {
        assert_eq!(uniforms.len(), extent.len());
        Self {
            epsilon,
            extent,
            closed: uniforms.iter().map(|&u| u < epsilon).collect(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(epsilon: f64, extent: FieldExtent, rng: &mut R) -> Self {
        let uniforms: Vec<f64> = (0..extent.len()).map(|_| rng.random()).collect();
        Self::from_uniforms(epsilon, extent, &uniforms)
    }

    pub fn closed_sites(&self) -> impl Iterator<Item = SiteL> + '_ {
        (0..self.closed.len()).filter(|&i| self.closed[i]).map(|i| self.extent.site(i))
    }

    /// Breadth-first search along arrows through closed sites, from every
    /// closed site of level 0.
    pub fn search(&self) -> SearchResult {
        let layer = self.extent.layer();
        let mut reached = vec![false; self.closed.len()];
        let mut queue = VecDeque::new();
        for i in 0..layer {
            if self.closed[i] {
                reached[i] = true;
                queue.push_back(i);
            }
        }
        let has = !queue.is_empty();
        let mut longest = 0;
        let mut arrows = Vec::with_capacity(2 * self.extent.d as usize + 1);
        while let Some(i) = queue.pop_front() {
            longest = longest.max((i / layer) as u64);
            self.extent.arrows(i, &mut arrows);
            for &j in &arrows {
                if self.closed[j] && !reached[j] {
                    reached[j] = true;
                    queue.push_back(j);
                }
            }
        }
        SearchResult {
            has_closed_path_from_level0: has,
            longest_closed_path: longest,
        }
    }
}

pub fn sample_field_and_search<R: Rng + ?Sized>(epsilon: f64, extent: FieldExtent, rng: &mut R) -> Result<SearchResult> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(invalid("epsilon", format!("must lie in [0, 1], got {epsilon}")));
    }
    Ok(PercField::sample(epsilon, extent, rng).search())
}
