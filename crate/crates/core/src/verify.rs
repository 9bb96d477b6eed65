//! Numerical checks of the model's provable properties at desk scale.
//!
//! Each check draws from its own seed derived from the master seed, runs its
//! replicas in parallel and reduces them serially, so a report depends only
//! on the master seed and the scale.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::branching::{
    pgf_offspring, sample_offspring, simulate_progeny, solve_progeny_pgf, tail_certificate, GWParams, TailBound,
};
use crate::error::Result;
use crate::lattice::{
    exact_small_lattice_oracle, run_block_experiment, run_from, run_single_source, BlockGeometry, Boundary, Initial,
    Lattice, Rates, SimParams, SiteState,
};
use crate::meanfield::{integrate, interior_fixed_point, threshold_check, MFParams, MFState, ROOT_TOL};
use crate::percolation::{
    closed_path_bound, count_directed_sa_paths, extract_two_separated, for_each_directed_sa_path,
    ln_closed_path_bound, ln_critical_epsilon, SiteL,
};
use crate::rng::{mix_seed, par_replicas};
use crate::stats::{dominance_check, fit_decay_slope, tail_estimate};

/// Sample sizes: `Full` uses the acceptance sizes, `Quick` divides them by 100.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Quick,
    Full,
}

impl Scale {
    fn samples(self, full: u64) -> u64 {
        match self {
            Scale::Full => full,
            Scale::Quick => (full / 100).max(100),
        }
    }
}

impl std::str::FromStr for Scale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quick" => Ok(Scale::Quick),
            "full" => Ok(Scale::Full),
            other => Err(format!("unknown scale `{other}` (expected quick or full)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub criterion: u32,
    pub name: String,
    pub passed: bool,
    /// One line per sub-check, prefixed with `ok` or `FAIL`.
    pub lines: Vec<String>,
}

impl CheckResult {
    fn new(criterion: u32, name: &str) -> Self {
        Self {
            criterion,
            name: name.to_owned(),
            passed: true,
            lines: Vec::new(),
        }
    }

    fn sub(&mut self, ok: bool, text: impl Into<String>) {
        self.passed &= ok;
        self.lines.push(format!("{} {}", if ok { "ok  " } else { "FAIL" }, text.into()));
    }

    /// Plain-text block: a headline and the sub-check lines.
    pub fn render(&self) -> String {
        let mut out = format!(
            "criterion {} {}: {}\n",
            self.criterion,
            self.name,
            if self.passed { "pass" } else { "FAIL" }
        );
        for line in &self.lines {
            let _ = writeln!(out, "    {line}");
        }
        out
    }
}

pub type CheckFn = fn(u64, Scale) -> Result<CheckResult>;

/// All checks in criterion order.
pub const CHECKS: [(u32, CheckFn); 9] = [
    (1, check_offspring_law),
    (2, check_progeny_pgf),
    (3, check_exponential_tails),
    (4, check_domination),
    (5, check_oracle_equivalence),
    (6, check_meanfield_threshold),
    (7, check_extinction_phase),
    (8, check_block_events),
    (9, check_percolation_combinatorics),
];

pub fn run_all(seed: u64, scale: Scale) -> Result<Vec<CheckResult>> {
    CHECKS.iter().map(|&(_, check)| check(seed, scale)).collect()
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

/// Offspring mean and generating function against their closed forms.
pub fn check_offspring_law(seed: u64, scale: Scale) -> Result<CheckResult> {
    let mut res = CheckResult::new(1, "offspring law");
    let n = scale.samples(100_000);
    for (i, (d, gamma)) in [(1, 0.1), (1, 0.3), (1, 1.0), (2, 0.1)].into_iter().enumerate() {
        let p = GWParams::new(d, gamma)?;
        let ys: Vec<f64> = par_replicas(mix_seed(mix_seed(seed, 1), i as u64), n, |_, rng| {
            sample_offspring(&p, rng) as f64
        });
        let (mean, se) = mean_se(&ys);
        let want = p.offspring_mean();
        res.sub(
            (mean - want).abs() <= 3.0 * se,
            format!("d={d} gamma={gamma}: mean {mean:.5} vs {want:.5} (3 SE = {:.5})", 3.0 * se),
        );
        let mut worst: f64 = 0.0;
        for s in [0.0f64, 0.25, 0.5, 0.75] {
            let emp = ys.iter().map(|&y| s.powi(y as i32)).sum::<f64>() / n as f64;
            worst = worst.max((emp - pgf_offspring(s, &p)?).abs());
        }
        res.sub(worst <= 0.01, format!("d={d} gamma={gamma}: max |E s^Y - G_Y(s)| = {worst:.2e} (tol 0.01)"));
    }
    Ok(res)
}

/// Progeny fixed point: residuals, normalisation, derivative and Monte Carlo mean.
pub fn check_progeny_pgf(seed: u64, scale: Scale) -> Result<CheckResult> {
    let mut res = CheckResult::new(2, "progeny generating function");
    for (d, gamma) in [(1, 0.1), (1, 0.2), (1, 0.3), (2, 0.1)] {
        let p = GWParams::new(d, gamma)?;
        let mut worst: f64 = 0.0;
        for s in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let x = solve_progeny_pgf(s, &p, 1e-13)?;
            worst = worst.max((s * pgf_offspring(x, &p)? - x).abs());
        }
        res.sub(worst <= 1e-10, format!("d={d} gamma={gamma}: max residual {worst:.2e} (tol 1e-10)"));
        let at_one = solve_progeny_pgf(1.0, &p, 1e-13)?;
        res.sub(
            (at_one - 1.0).abs() <= 1e-8,
            format!("d={d} gamma={gamma}: G_pi(1) - 1 = {:.2e} (tol 1e-8)", at_one - 1.0),
        );
        let h = 1e-5;
        let slope = (solve_progeny_pgf(1.0 + h, &p, 1e-14)? - solve_progeny_pgf(1.0 - h, &p, 1e-14)?) / (2.0 * h);
        let want = p.progeny_mean();
        res.sub(
            (slope - want).abs() <= 1e-3,
            format!("d={d} gamma={gamma}: G_pi'(1) = {slope:.6} vs {want:.6} (tol 1e-3)"),
        );
    }
    let p = GWParams::new(1, 0.1)?;
    let n = scale.samples(1_000_000);
    let progeny: Vec<f64> = par_replicas(mix_seed(seed, 2), n, |_, rng| {
        simulate_progeny(&p, crate::branching::DEFAULT_PROGENY_CAP, rng).progeny as f64
    });
    let (mean, se) = mean_se(&progeny);
    let want = 11.0 / 7.0;
    res.sub(
        (mean - want).abs() <= 3.0 * se,
        format!("d=1 gamma=0.1: E(pi) = {mean:.5} vs 11/7 over {n} runs (3 SE = {:.5})", 3.0 * se),
    );
    Ok(res)
}

/// Tail fit over `K = 1..=15` plus a pointwise comparison with a certificate.
fn tail_block(res: &mut CheckResult, label: &str, samples: &[f64], cert: &TailBound, min_r2: f64) -> Result<()> {
    let mut points = Vec::new();
    let mut exceed = Vec::new();
    for k in 1..=15 {
        let t = tail_estimate(samples, f64::from(k))?;
        points.push((t.k, t.p_hat));
        if t.p_hat > cert.bound(t.k) {
            exceed.push(k);
        }
    }
    match fit_decay_slope(&points) {
        Ok(fit) => res.sub(
            fit.slope < 0.0 && fit.r2 >= min_r2,
            format!("{label}: slope {:.4}, r2 {:.4} (need < 0, >= {min_r2})", fit.slope, fit.r2),
        ),
        Err(e) => res.sub(false, format!("{label}: {e}")),
    }
    res.sub(
        exceed.is_empty(),
        format!(
            "{label}: tails below certificate {:.4} * {:.4}^-K at every K{}",
            cert.c,
            cert.s,
            if exceed.is_empty() { String::new() } else { format!(" except {exceed:?}") }
        ),
    );
    Ok(())
}

fn single_source_params(d: u32, half_width: u32, lambda1: f64, gamma: f64) -> SimParams {
    SimParams {
        d,
        half_width,
        lambda1,
        lambda2: f64::INFINITY,
        gamma,
        boundary: Boundary::HealthyFrozen,
        ..SimParams::default()
    }
}

/// Exponential decay of the progeny and of the number of infections.
pub fn check_exponential_tails(seed: u64, scale: Scale) -> Result<CheckResult> {
    let mut res = CheckResult::new(3, "exponential tails");
    let n = scale.samples(100_000);
    let gw = GWParams::new(1, 0.2)?;
    let cert = tail_certificate(&gw, None)?;
    let progeny: Vec<f64> = par_replicas(mix_seed(mix_seed(seed, 3), 0), n, |_, rng| {
        simulate_progeny(&gw, crate::branching::DEFAULT_PROGENY_CAP, rng).progeny as f64
    });
    tail_block(&mut res, "progeny (d=1, gamma=0.2)", &progeny, &cert, 0.95)?;

    let params = single_source_params(1, 100, 0.0, 0.2);
    params.validate()?;
    let lattice = params.lattice()?;
    let runs = par_replicas(mix_seed(mix_seed(seed, 3), 1), n, |_, rng| {
        run_single_source(&lattice, &params, rng)
    });
    let clean = runs.iter().all(|r| r.extinct && !r.hit_boundary);
    res.sub(clean, "spatial runs all extinct without touching the box face");
    let pi1: Vec<f64> = runs.iter().map(|r| r.pi1 as f64).collect();
    tail_block(
        &mut res,
        "infections pi1 (d=1, gamma=0.2)",
        &pi1,
        &TailBound::for_infections(&cert, 1),
        0.95,
    )?;
    Ok(res)
}

/// Spatial symptomatic count against the branching progeny.
pub fn check_domination(seed: u64, scale: Scale) -> Result<CheckResult> {
    let mut res = CheckResult::new(4, "stochastic domination");
    let n = scale.samples(10_000);
    // Capping the progeny leaves its survival function unchanged below the cap.
    const CAP: u64 = 100_000;
    for (i, (d, gamma)) in [(1, 0.1), (1, 0.2), (2, 0.1), (2, 0.2)].into_iter().enumerate() {
        let half_width = if d == 1 { 100 } else { 40 };
        let params = single_source_params(d, half_width, 0.0, gamma);
        params.validate()?;
        let lattice = params.lattice()?;
        let base = mix_seed(mix_seed(seed, 4), i as u64);
        let runs = par_replicas(mix_seed(base, 0), n, |_, rng| run_single_source(&lattice, &params, rng));
        let pi2: Vec<f64> = runs.iter().map(|r| r.pi2 as f64).collect();
        let gw = GWParams::new(d, gamma)?;
        let progeny: Vec<f64> = par_replicas(mix_seed(base, 1), n, |_, rng| {
            simulate_progeny(&gw, CAP, rng).progeny as f64
        });
        let max_pi2 = pi2.iter().copied().fold(0.0, f64::max);
        let clean = runs.iter().all(|r| r.extinct && !r.hit_boundary) && max_pi2 < CAP as f64;
        res.sub(
            clean,
            format!("d={d} gamma={gamma}: spatial runs extinct inside the box, max pi2 {max_pi2} < cap {CAP}"),
        );
        let report = dominance_check(&pi2, &progeny)?;
        res.sub(
            report.holds,
            format!(
                "d={d} gamma={gamma}: pi2 dominated by progeny (max violation {:.4} at k={})",
                report.max_violation, report.worst_k
            ),
        );
    }
    Ok(res)
}

/// Monte Carlo against the exact generator solve on paths of 1 to 4 sites.
pub fn check_oracle_equivalence(seed: u64, scale: Scale) -> Result<CheckResult> {
    let mut res = CheckResult::new(5, "exact oracle equivalence");
    let n = scale.samples(100_000);
    let grid = [0.0, 0.5, 1.0];
    let mut cases = 0;
    let mut prob_ok = 0;
    let mut time_ok = 0;
    let mut worst_z: f64 = 0.0;
    let mut failures = Vec::new();
    for sites in 1..=4usize {
        let lattice = Lattice::path(sites, Boundary::HealthyFrozen)?;
        let start = sites / 2;
        let mut initial_states = vec![SiteState::Healthy; sites];
        initial_states[start] = SiteState::Symptomatic;
        let initial = Initial::Explicit(vec![(vec![start as i64], SiteState::Symptomatic)]);
        for &lambda1 in &grid {
            for &lambda2 in &grid {
                for &gamma in &grid {
                    let rates = Rates {
                        lambda1,
                        lambda2,
                        gamma,
                    };
                    let exact = exact_small_lattice_oracle(&lattice, &rates, &initial_states)?;
                    let case_seed = mix_seed(mix_seed(seed, 5), cases as u64);
                    cases += 1;
                    let runs = par_replicas(case_seed, n, |_, rng| {
                        run_from(&lattice, rates, &initial, f64::INFINITY, rng).expect("explicit site lies in the path")
                    });
                    let extinct = runs.iter().filter(|r| r.extinct).count() as f64 / n as f64;
                    let p = exact.extinction_prob.clamp(0.0, 1.0);
                    // Rounding floor for the LU solve when the oracle probability is 0 or 1.
                    let tol_p = 3.0 * (p * (1.0 - p) / n as f64).sqrt() + 1e-9;
                    let times: Vec<f64> = runs.iter().filter_map(|r| r.extinction_time).collect();
                    let (mean, se) = if times.is_empty() { (f64::NAN, f64::NAN) } else { mean_se(&times) };
                    let z = (mean - exact.mean_extinction_time).abs() / se;
                    let label = format!("n={sites} l1={lambda1} l2={lambda2} g={gamma}");
                    if (extinct - exact.extinction_prob).abs() <= tol_p {
                        prob_ok += 1;
                    } else {
                        failures.push(format!("{label}: extinction {extinct} vs {p}"));
                    }
                    // Zero SE means every run took the same time; compare directly then.
                    if z <= 3.0 || (se == 0.0 && (mean - exact.mean_extinction_time).abs() <= 1e-9) {
                        time_ok += 1;
                    } else {
                        failures.push(format!(
                            "{label}: mean time {mean:.5} vs {:.5} (z = {z:.2})",
                            exact.mean_extinction_time
                        ));
                    }
                    if z.is_finite() {
                        worst_z = worst_z.max(z);
                    }
                }
            }
        }
    }
    res.sub(
        prob_ok == cases,
        format!("{prob_ok}/{cases} extinction probabilities within 3 SE (+1e-9)"),
    );
    res.sub(
        time_ok == cases,
        format!("{time_ok}/{cases} mean extinction times within 3 SE (largest z = {worst_z:.2})"),
    );
    for f in failures {
        res.sub(false, f);
    }
    Ok(res)
}

/// Threshold equivalence and convergence of trajectories over the grid.
pub fn check_meanfield_threshold(_seed: u64, _scale: Scale) -> Result<CheckResult> {
    let mut res = CheckResult::new(6, "mean-field threshold");
    let start = MFState::new(0.1, 0.1);
    let mut points = 0;
    let mut iff_ok = 0;
    let mut regular = (0, 0);
    let mut critical = Vec::new();
    for gamma in [0.25, 0.5, 1.0] {
        for i in 0..=6 {
            for j in 0..=6 {
                let (lambda1, lambda2) = (0.5 * f64::from(i), 0.5 * f64::from(j));
                let p = MFParams::new(lambda1, lambda2, gamma)?;
                points += 1;
                let fixed = interior_fixed_point(&p, ROOT_TOL)?;
                if fixed.point.is_some() == threshold_check(&p) {
                    iff_ok += 1;
                }
                let target = fixed.point.unwrap_or(MFState::ORIGIN);
                let end = integrate(start, &p, 200.0, 0.01)?.last().expect("trajectory has t = 0").1;
                let err = end.distance(&target);
                if lambda1 + gamma * lambda2 == 1.0 + gamma {
                    critical.push((lambda1, lambda2, gamma, err));
                } else {
                    regular.1 += 1;
                    if err <= 1e-6 {
                        regular.0 += 1;
                    }
                }
            }
        }
    }
    res.sub(
        iff_ok == points,
        format!("{iff_ok}/{points} grid points: interior fixed point exists iff l1 + g*l2 > 1 + g"),
    );
    res.sub(
        regular.0 == regular.1,
        format!(
            "{}/{} off-threshold points within 1e-6 of the attractor at t=200",
            regular.0, regular.1
        ),
    );
    for (lambda1, lambda2, gamma, err) in critical {
        res.sub(
            err <= 1e-6,
            format!("on threshold l1={lambda1} l2={lambda2} g={gamma}: distance to origin {err:.3e} at t=200 (tol 1e-6)"),
        );
    }
    let p = MFParams::new(0.0, 3.0, 1.0)?;
    let end = integrate(start, &p, 200.0, 0.01)?.last().expect("trajectory has t = 0").1;
    let err = end.distance(&MFState::new(1.0 / 6.0, 1.0 / 6.0));
    res.sub(err <= 1e-8, format!("(0, 3, 1) ends {err:.2e} from (1/6, 1/6) (tol 1e-8)"));
    Ok(res)
}

/// Single-source runs die out and their spatial extent has an exponential tail.
pub fn check_extinction_phase(seed: u64, scale: Scale) -> Result<CheckResult> {
    let mut res = CheckResult::new(7, "extinction phase");
    let n = scale.samples(10_000);
    for (i, lambda1) in [0.0, 0.02].into_iter().enumerate() {
        let params = single_source_params(1, 100, lambda1, 0.2);
        params.validate()?;
        let lattice = params.lattice()?;
        let runs = par_replicas(mix_seed(mix_seed(seed, 7), i as u64), n, |_, rng| {
            run_single_source(&lattice, &params, rng)
        });
        let extinct = runs.iter().filter(|r| r.extinct).count();
        res.sub(
            extinct == runs.len(),
            format!("lambda1={lambda1}: {extinct}/{} runs extinct before t=1000", runs.len()),
        );
        let extent: Vec<f64> = runs.iter().map(|r| r.max_space as f64).collect();
        let points: Vec<(f64, f64)> = (1..=15)
            .map(|k| tail_estimate(&extent, f64::from(k)).map(|t| (t.k, t.p_hat)))
            .collect::<Result<_>>()?;
        match fit_decay_slope(&points) {
            Ok(fit) => res.sub(
                fit.slope < 0.0 && fit.r2 >= 0.9,
                format!(
                    "lambda1={lambda1}: extent tail slope {:.4}, r2 {:.4} over {} points (need < 0, >= 0.9)",
                    fit.slope, fit.r2, fit.points
                ),
            ),
            Err(e) => res.sub(false, format!("lambda1={lambda1}: {e}")),
        }
    }
    Ok(res)
}

/// Healthy-block probability and entry-point counts under a symptomatic exterior.
pub fn check_block_events(seed: u64, scale: Scale) -> Result<CheckResult> {
    let mut res = CheckResult::new(8, "block events");
    let n = scale.samples(1_000);
    let params = SimParams {
        d: 1,
        lambda1: 0.0,
        lambda2: f64::INFINITY,
        gamma: 0.2,
        boundary: Boundary::SymptomaticFrozen,
        ..SimParams::default()
    };
    let mut estimates = Vec::new();
    for k in [2u32, 4, 6, 8] {
        let geom = BlockGeometry::new(1, k)?;
        let lattice = geom.lattice(&params);
        let outcomes = par_replicas(mix_seed(mix_seed(seed, 8), u64::from(k)), n, |_, rng| {
            run_block_experiment(&geom, &lattice, &params, &Initial::AllSymptomatic, rng)
                .expect("block scale is positive")
        });
        let healthy: Vec<f64> = outcomes.iter().map(|o| f64::from(u8::from(o.healthy_block))).collect();
        let est = tail_estimate(&healthy, 0.5)?;
        let bottom_ok = outcomes.iter().all(|o| o.card_lambda_minus <= geom.bottom_sites());
        let big = outcomes.iter().filter(|o| o.card_union > 3 * geom.m_bound).count() as f64 / n as f64;
        res.sub(
            bottom_ok,
            format!("K={k}: card(L-) <= (4K+1)^d = {} in every run", geom.bottom_sites()),
        );
        res.sub(big <= 0.01, format!("K={k}: P(card(L- u L+) > 3M = {}) = {big} (tol 0.01)", 3 * geom.m_bound));
        res.lines.push(format!(
            "info K={k}: P(H) = {} [{:.4}, {:.4}]",
            est.p_hat, est.ci_low, est.ci_high
        ));
        estimates.push((k, est));
    }
    for pair in estimates.windows(2) {
        let ((k0, a), (k1, b)) = (&pair[0], &pair[1]);
        res.sub(
            b.p_hat >= a.p_hat || b.ci_high >= a.ci_low,
            format!("P(H) at K={k1} not below K={k0} beyond overlapping 95% intervals"),
        );
    }
    let last = estimates.last().expect("four block scales").1;
    res.sub(last.p_hat >= 0.9, format!("P(H) at K=8 = {} (need >= 0.9)", last.p_hat));
    Ok(res)
}

/// Counts self-avoiding directed paths by trying every move sequence.
pub fn brute_force_path_count(n: u32, d: usize) -> u64 {
    let moves = 2 * d + 1;
    let total = (moves as u64).pow(n);
    let mut count = 0;
    for code in 0..total {
        let mut rest = code;
        let mut pos = (vec![0i64; d], 0i64);
        let mut visited = vec![pos.clone()];
        let mut ok = true;
        for _ in 0..n {
            let mv = (rest % moves as u64) as usize;
            rest /= moves as u64;
            if mv == 2 * d {
                pos.1 += 1;
            } else {
                pos.0[mv / 2] += if mv % 2 == 0 { 1 } else { -1 };
            }
            if visited.contains(&pos) {
                ok = false;
                break;
            }
            visited.push(pos.clone());
        }
        if ok {
            count += 1;
        }
    }
    count
}

/// Path counts, the extraction guarantee and the closed-path bound.
pub fn check_percolation_combinatorics(_seed: u64, _scale: Scale) -> Result<CheckResult> {
    let mut res = CheckResult::new(9, "percolation combinatorics");
    for d in 1..=2 {
        let mut mismatches = Vec::new();
        let mut counts = Vec::new();
        for n in 0..=6 {
            let fast = count_directed_sa_paths(n, d)?.count;
            let slow = brute_force_path_count(n, d);
            counts.push(fast);
            if fast != slow {
                mismatches.push((n, fast, slow));
            }
        }
        res.sub(
            mismatches.is_empty(),
            format!("d={d}: path counts for n=0..6 {counts:?} match brute force{}", if mismatches.is_empty() {
                String::new()
            } else {
                format!(" except {mismatches:?}")
            }),
        );
    }
    let mut paths = 0u64;
    let mut bad = 0u64;
    for n in 0..=6u32 {
        let need = (n as usize + 1).div_ceil(25);
        for_each_directed_sa_path(n, 1, |path| {
            paths += 1;
            let kept = extract_two_separated(path);
            let separated = kept
                .iter()
                .enumerate()
                .all(|(i, a)| kept[i + 1..].iter().all(|b| a.sup_distance(b) > 2));
            let covered = path.iter().all(|s| kept.iter().any(|k: &SiteL| k.sup_distance(s) <= 2));
            let subset = kept.iter().all(|k| path.contains(k));
            if !(separated && covered && subset && kept.len() >= need) {
                bad += 1;
            }
        })?;
    }
    res.sub(bad == 0, format!("extraction guarantee on all {paths} d=1 paths with n <= 6 ({bad} failures)"));
    let mut worst: f64 = 0.0;
    for d in 1..=3u32 {
        for n in 1..=100u32 {
            let got = ln_closed_path_bound(n, d, ln_critical_epsilon(d));
            let want = -f64::from(n) * std::f64::consts::LN_2;
            worst = worst.max(((got - want) / want).abs());
        }
    }
    res.sub(worst <= 1e-9, format!("log bound at critical epsilon equals -n ln 2 (max rel err {worst:.2e})"));
    let direct = closed_path_bound(10, 1, ln_critical_epsilon(1).exp())?;
    res.sub(
        ((direct - 2f64.powi(-10)) / 2f64.powi(-10)).abs() <= 1e-9,
        format!("d=1 n=10 bound evaluated directly: {direct:e}"),
    );
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_small_counts() {
        assert_eq!(brute_force_path_count(0, 1), 1);
        assert_eq!(brute_force_path_count(1, 1), 3);
        assert_eq!(brute_force_path_count(2, 1), 7);
        assert_eq!(brute_force_path_count(1, 2), 5);
    }

    #[test]
    fn deterministic_checks_pass() {
        assert!(check_percolation_combinatorics(0, Scale::Quick).unwrap().passed);
    }

    #[test]
    fn render_lists_every_line() {
        let mut r = CheckResult::new(3, "demo");
        r.sub(true, "first");
        r.sub(false, "second");
        assert!(!r.passed);
        let text = r.render();
        assert!(text.starts_with("criterion 3 demo: FAIL\n"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn quick_reports_are_reproducible() {
        let a = check_offspring_law(5, Scale::Quick).unwrap();
        let b = check_offspring_law(5, Scale::Quick).unwrap();
        assert_eq!(a, b);
    }
}
