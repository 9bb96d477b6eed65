//! Mean-field ODE for the densities of asymptomatic (`u₁`) and symptomatic
//! (`u₂`) sites:
//!
//! ```text
//! u₁' = (λ₁u₁ + λ₂u₂)(1 − u₁ − u₂) − (γ + 1)u₁
//! u₂' = γu₁ − u₂
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub const DEFAULT_DT: f64 = 0.01;
/// Allowed excursion outside the simplex before a trajectory is rejected.
pub const SIMPLEX_TOL: f64 = 1e-9;
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MFParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gamma: f64,
}

impl MFParams {
    pub fn new(lambda1: f64, lambda2: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("lambda1", lambda1), ("lambda2", lambda2), ("gamma", gamma)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self {
            lambda1,
            lambda2,
            gamma,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MFState {
    pub u1: f64,
    pub u2: f64,
}

impl MFState {
    pub const ORIGIN: MFState = MFState { u1: 0.0, u2: 0.0 };

    pub fn new(u1: f64, u2: f64) -> Self {
        Self { u1, u2 }
    }

    pub fn in_simplex(&self, tol: f64) -> bool {
        self.u1 >= -tol && self.u2 >= -tol && self.u1 + self.u2 <= 1.0 + tol
    }

    pub fn distance(&self, other: &MFState) -> f64 {
        (self.u1 - other.u1).abs().max((self.u2 - other.u2).abs())
    }

    fn axpy(&self, h: f64, (a, b): (f64, f64)) -> MFState {
        MFState::new(self.u1 + h * a, self.u2 + h * b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub point: Option<MFState>,
    /// Real parts of the Jacobian eigenvalues at `point` (NaN when absent).
    pub eigen_real_parts: (f64, f64),
    pub stable: bool,
}

pub fn mf_derivative(state: &MFState, p: &MFParams) -> (f64, f64) {
    let MFState { u1, u2 } = *state;
    (
        (p.lambda1 * u1 + p.lambda2 * u2) * (1.0 - u1 - u2) - (p.gamma + 1.0) * u1,
        p.gamma * u1 - u2,
    )
}

/// Classical RK4 from `start` to `t_end`; emits every step including `t = 0`.
pub fn integrate(start: MFState, p: &MFParams, t_end: f64, dt: f64) -> Result<Vec<(f64, MFState)>> {
    if !(dt > 0.0) {
        return Err(invalid("dt", "step must be positive"));
    }
    if !(t_end >= 0.0) {
        return Err(invalid("t_end", "must be nonnegative"));
    }
    if !start.in_simplex(SIMPLEX_TOL) {
        return Err(invalid("start", format!("({}, {}) is outside the simplex", start.u1, start.u2)));
    }
    let steps = (t_end / dt).round() as usize;
    let mut out = Vec::with_capacity(steps + 1);
    let mut u = start;
    out.push((0.0, u));
    for i in 1..=steps {
        let k1 = mf_derivative(&u, p);
        let k2 = mf_derivative(&u.axpy(dt / 2.0, k1), p);
        let k3 = mf_derivative(&u.axpy(dt / 2.0, k2), p);
        let k4 = mf_derivative(&u.axpy(dt, k3), p);
        u = MFState::new(
            u.u1 + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            u.u2 + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        let t = i as f64 * dt;
        if !u.in_simplex(SIMPLEX_TOL) || !u.u1.is_finite() || !u.u2.is_finite() {
            return Err(Error::SimplexViolation {
                time: t,
                u1: u.u1,
                u2: u.u2,
            });
        }
        out.push((t, u));
    }
    Ok(out)
}

/// Epidemic criterion `λ₁ + γλ₂ > 1 + γ`.
pub fn threshold_check(p: &MFParams) -> bool {
    p.lambda1 + p.gamma * p.lambda2 > 1.0 + p.gamma
}

/// Jacobian of the vector field.
pub fn jacobian(s: &MFState, p: &MFParams) -> [[f64; 2]; 2] {
    let free = 1.0 - s.u1 - s.u2;
    let force = p.lambda1 * s.u1 + p.lambda2 * s.u2;
    [
        [p.lambda1 * free - force - (p.gamma + 1.0), p.lambda2 * free - force],
        [p.gamma, -1.0],
    ]
}

/// Real parts of the two eigenvalues of the Jacobian, larger first.
pub fn jacobian_stability(s: &MFState, p: &MFParams) -> (f64, f64) {
    let [[a, b], [c, d]] = jacobian(s, p);
    let half_trace = 0.5 * (a + d);
    let disc = half_trace * half_trace - (a * d - b * c);
    if disc >= 0.0 {
        let r = disc.sqrt();
        (half_trace + r, half_trace - r)
    } else {
        (half_trace, half_trace)
    }
}

/// Interior equilibrium via `u₂ = γu₁` and bisection of
/// `g(u) = (λ₁ + γλ₂)(1 − (1 + γ)u) − (1 + γ)` on `(0, 1/(1+γ))`.
pub fn interior_fixed_point(p: &MFParams, tol: f64) -> Result<FixedPointReport> {
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    let none = FixedPointReport {
        point: None,
        eigen_real_parts: (f64::NAN, f64::NAN),
        stable: false,
    };
    let g1 = p.gamma + 1.0;
    let g = |u: f64| (p.lambda1 + p.gamma * p.lambda2) * (1.0 - g1 * u) - g1;
    let (mut lo, mut hi) = (0.0, 1.0 / g1);
    // g is decreasing with g(hi) = −(1 + γ) < 0, so a root needs g(0) > 0.
    if !(g(lo) > 0.0) {
        return Ok(none);
    }
    let residual = |u: f64| {
        let (a, b) = mf_derivative(&MFState::new(u, p.gamma * u), p);
        a.abs().max(b.abs())
    };
    // Keep halving until both the bracket and the field residual are within tol.
    loop {
        let mid = 0.5 * (lo + hi);
        if (hi - lo <= tol && residual(mid) <= tol) || mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u1 = 0.5 * (lo + hi);
    let point = MFState::new(u1, p.gamma * u1);
    let eig = jacobian_stability(&point, p);
    Ok(FixedPointReport {
        point: Some(point),
        eigen_real_parts: eig,
        stable: eig.0 < 0.0 && eig.1 < 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mf(a: f64, b: f64, g: f64) -> MFParams {
        MFParams::new(a, b, g).unwrap()
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(mf_derivative(&MFState::ORIGIN, &mf(2.0, 3.0, 1.0)), (0.0, 0.0));
        let (a, b) = mf_derivative(&MFState::new(1.0 / 6.0, 1.0 / 6.0), &mf(0.0, 3.0, 1.0));
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15);
        assert_eq!(mf_derivative(&MFState::new(0.5, 0.0), &mf(1.0, 0.0, 0.0)), (-0.25, 0.0));
    }

    #[test]
    fn threshold_examples() {
        assert!(threshold_check(&mf(0.0, 3.0, 1.0)));
        assert!(!threshold_check(&mf(0.0, 0.0, 1.0)));
        assert!(threshold_check(&mf(2.0, 0.0, 0.0)));
        assert!(!threshold_check(&mf(0.0, 2.0, 1.0)));
    }

    #[test]
    fn trajectories_settle() {
        let traj = integrate(MFState::ORIGIN, &mf(1.0, 3.0, 1.0), 10.0, 0.01).unwrap();
        assert!(traj.iter().all(|(_, s)| *s == MFState::ORIGIN));
        assert_eq!(traj.len(), 1001);

        let traj = integrate(MFState::new(0.1, 0.1), &mf(0.0, 3.0, 1.0), 100.0, 0.01).unwrap();
        let last = traj.last().unwrap().1;
        assert!(last.distance(&MFState::new(1.0 / 6.0, 1.0 / 6.0)) < 1e-6);

        let traj = integrate(MFState::new(0.3, 0.3), &mf(0.5, 0.5, 1.0), 100.0, 0.01).unwrap();
        assert!(traj.last().unwrap().1.distance(&MFState::ORIGIN) < 1e-6);
    }

    #[test]
    fn integrate_rejects_bad_input() {
        assert!(integrate(MFState::new(0.8, 0.8), &mf(1.0, 1.0, 1.0), 1.0, 0.01).is_err());
        assert!(integrate(MFState::new(0.1, 0.1), &mf(1.0, 1.0, 1.0), 1.0, 0.0).is_err());
        // A huge step blows the trajectory out of the simplex.
        let err = integrate(MFState::new(0.5, 0.4), &mf(50.0, 50.0, 5.0), 10.0, 1.0).unwrap_err();
        assert!(matches!(err, Error::SimplexViolation { .. }));
    }

    #[test]
    fn fixed_points() {
        let r = interior_fixed_point(&mf(0.0, 3.0, 1.0), ROOT_TOL).unwrap();
        let p = r.point.unwrap();
        assert!(p.distance(&MFState::new(1.0 / 6.0, 1.0 / 6.0)) < 1e-11);
        assert!(r.stable);
        assert!(interior_fixed_point(&mf(0.5, 0.5, 1.0), ROOT_TOL).unwrap().point.is_none());
        // Exactly critical: no interior root.
        assert!(interior_fixed_point(&mf(0.0, 2.0, 1.0), ROOT_TOL).unwrap().point.is_none());
    }

    #[test]
    fn origin_eigenvalues() {
        let (a, b) = jacobian_stability(&MFState::ORIGIN, &mf(0.0, 0.0, 1.0));
        assert!((a + 1.0).abs() < 1e-15 && (b + 2.0).abs() < 1e-15);
        let (a, b) = jacobian_stability(&MFState::ORIGIN, &mf(0.5, 0.5, 1.0));
        assert!(a < 0.0 && b < 0.0);
        let (a, _) = jacobian_stability(&MFState::ORIGIN, &mf(0.0, 3.0, 1.0));
        assert!(a > 0.0);
    }

    proptest! {
        #[test]
        fn rk4_stays_in_simplex(
            l1 in 0.0..5.0f64, l2 in 0.0..5.0f64, g in 0.0..5.0f64,
            a in 0.0..1.0f64, b in 0.0..1.0f64,
        ) {
            let start = MFState::new(a * (1.0 - b), b * (1.0 - a) * 0.999);
            prop_assume!(start.in_simplex(0.0));
            let p = mf(l1, l2, g);
            let traj = integrate(start, &p, 20.0, 0.01).unwrap();
            prop_assert!(traj.iter().all(|(_, s)| s.in_simplex(SIMPLEX_TOL)));
        }

        #[test]
        fn fixed_point_is_stationary_iff_threshold(l1 in 0.0..5.0f64, l2 in 0.0..5.0f64, g in 0.0..5.0f64) {
            let p = mf(l1, l2, g);
            let r = interior_fixed_point(&p, ROOT_TOL).unwrap();
            prop_assert_eq!(r.point.is_some(), threshold_check(&p));
            if let Some(pt) = r.point {
                let (a, b) = mf_derivative(&pt, &p);
                prop_assert!(a.abs().max(b.abs()) <= ROOT_TOL);
                prop_assert!(pt.in_simplex(0.0));
            }
        }
    }
}
