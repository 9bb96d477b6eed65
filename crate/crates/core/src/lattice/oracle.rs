//! Exact absorption statistics for tiny lattices.
//!
//! The state space `{0,1,2}^n` (n ≤ 5) is enumerated, the generator restricted
//! to transient states is assembled, and the linear systems
//! `(−Q_TT) h = q_abs` and `(−Q_TT) τ = 1` are solved by LU decomposition for
//! the absorption probability `h` and the mean absorption time `τ`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Boundary, Lattice, Rates, SiteState, EXTERIOR};
use crate::error::{invalid, Error, Result};

pub const MAX_ORACLE_SITES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub extinction_prob: f64,
    pub mean_extinction_time: f64,
}

fn encode(states: &[u8]) -> usize {
    states.iter().rev().fold(0, |acc, &s| acc * 3 + s as usize)
}

fn decode(mut code: usize, n: usize) -> Vec<u8> {
    (0..n)
        .map(|_| {
            let s = (code % 3) as u8;
            code /= 3;
            s
        })
        .collect()
}

fn seen(lattice: &Lattice, states: &[u8], nb: usize) -> u8 {
    if nb == EXTERIOR {
        lattice.boundary().exterior_state() as u8
    } else {
        states[nb]
    }
}

/// Flips every healthy site with a symptomatic neighbour to 1, all at once.
fn close(lattice: &Lattice, states: &mut [u8]) {
    let flips: Vec<usize> = (0..states.len())
        .filter(|&x| states[x] == 0 && lattice.neighbors(x).iter().any(|&y| seen(lattice, states, y) == 2))
        .collect();
    for x in flips {
        states[x] = 1;
    }
}

fn is_closed(lattice: &Lattice, states: &[u8]) -> bool {
    (0..states.len()).all(|x| states[x] != 0 || lattice.neighbors(x).iter().all(|&y| seen(lattice, states, y) != 2))
}

/// Outgoing transitions `(target code, rate)` of a configuration.
fn transitions(lattice: &Lattice, rates: &Rates, states: &[u8]) -> Vec<(usize, f64)> {
    let two_d = 2.0 * lattice.dim() as f64;
    let mut out = Vec::new();
    let mut push = |x: usize, to: u8, rate: f64| {
        if rate > 0.0 {
            let mut next = states.to_vec();
            next[x] = to;
            if rates.closure() {
                close(lattice, &mut next);
            }
            out.push((encode(&next), rate));
        }
    };
    for x in 0..states.len() {
        match states[x] {
            0 => {
                let nbs = lattice.neighbors(x);
                let f1 = nbs.iter().filter(|&&y| seen(lattice, states, y) == 1).count() as f64;
                let f2 = nbs.iter().filter(|&&y| seen(lattice, states, y) == 2).count() as f64;
                let lambda2 = if rates.closure() { 0.0 } else { rates.lambda2 };
                push(x, 1, (rates.lambda1 * f1 + lambda2 * f2) / two_d);
            }
            1 => {
                push(x, 2, rates.gamma);
                push(x, 0, 1.0);
            }
            _ => push(x, 0, 1.0),
        }
    }
    out
}

/// Probability of reaching the all-healthy state and the expected time to
/// get there, starting from `initial` (closure applied first if `λ₂ = ∞`).
pub fn exact_small_lattice_oracle(lattice: &Lattice, rates: &Rates, initial: &[SiteState]) -> Result<OracleResult> {
    let n = lattice.len();
    if n > MAX_ORACLE_SITES {
        return Err(Error::LatticeTooLarge(n));
    }
    if initial.len() != n {
        return Err(invalid("initial", format!("expected {n} site states, got {}", initial.len())));
    }
    if lattice.boundary() == Boundary::SymptomaticFrozen {
        return Err(invalid("boundary", "symptomatic exterior has no absorbing state"));
    }
    let mut start: Vec<u8> = initial.iter().map(|&s| s as u8).collect();
    if rates.closure() {
        close(lattice, &mut start);
    }
    if start.iter().all(|&s| s == 0) {
        return Ok(OracleResult {
            extinction_prob: 1.0,
            mean_extinction_time: 0.0,
        });
    }

    let total = 3usize.pow(n as u32);
    // Transient states: some infected site, and closed when λ₂ = ∞.
    let transient: Vec<usize> = (1..total)
        .filter(|&c| !rates.closure() || is_closed(lattice, &decode(c, n)))
        .collect();
    let mut row_of = vec![usize::MAX; total];
    for (row, &code) in transient.iter().enumerate() {
        row_of[code] = row;
    }

    let m = transient.len();
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut to_healthy = DVector::<f64>::zeros(m);
    for (row, &code) in transient.iter().enumerate() {
        for (target, rate) in transitions(lattice, rates, &decode(code, n)) {
            a[(row, row)] += rate;
            if target == 0 {
                to_healthy[row] += rate;
            } else {
                a[(row, row_of[target])] -= rate;
            }
        }
    }
    let lu = a.lu();
    let h = lu
        .solve(&to_healthy)
        .ok_or_else(|| invalid("generator", "singular transient generator"))?;
    let tau = lu
        .solve(&DVector::from_element(m, 1.0))
        .ok_or_else(|| invalid("generator", "singular transient generator"))?;
    let row = row_of[encode(&start)];
    Ok(OracleResult {
        extinction_prob: h[row],
        mean_extinction_time: tau[row],
    })
}
