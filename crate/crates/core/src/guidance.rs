//! Cooperative LOS-rate guidance for interceptors against a stationary target.
//!
//! The target sits at the origin. Missile `i` sees it along the line of
//! sight at angle `θ_i`, so the missile itself is at `−r_i·(cos θ_i, sin θ_i)`.
//! The LOS rate has relative degree two in the lateral acceleration and
//! the command below cancels the drift so that `θ̈_i = −w_i·sign(θ̇_i − θ̇_{i+1})`,
//! which is the cyclic-pursuit protocol on the LOS rates.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::agents::sign;
use crate::error::{usage, Result};

pub const DEFAULT_COS_GUARD: f64 = 0.01;
pub const DEFAULT_LETHAL_RADIUS: f64 = 5.0;

/// Range, LOS angle, flight-path angle and speed of one missile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarEngagementState {
    pub r: f64,
    pub theta: f64,
    pub gamma: f64,
    pub v: f64,
}

impl PolarEngagementState {
    /// Heading error `θ_M = γ − θ`.
    pub fn heading_error(&self) -> f64 {
        self.gamma - self.theta
    }

    pub fn range_rate(&self) -> f64 {
        -self.v * self.heading_error().cos()
    }

    pub fn closing_speed(&self) -> f64 {
        self.v * self.heading_error().cos()
    }

    /// Cartesian position with the target at the origin.
    pub fn position(&self) -> (f64, f64) {
        (-self.r * self.theta.cos(), -self.r * self.theta.sin())
    }

    pub fn from_position(x: f64, y: f64, gamma: f64, v: f64) -> Self {
        Self {
            r: x.hypot(y),
            theta: (-y).atan2(-x),
            gamma,
            v,
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.r > 0.0) {
            return Err(usage(format!("range must be positive, got {}", self.r)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidanceConfig {
    pub gains: Vec<f64>,
    /// Smallest `|cos θ_M|` used as a divisor in the command.
    pub cos_guard: f64,
    pub lethal_radius: f64,
    /// Missile `i` saturates its sign over `|σ| ≤ |w_i|·boundary_time`;
    /// 0 selects the exact sign.
    pub boundary_time: f64,
}

impl GuidanceConfig {
    pub fn new(gains: Vec<f64>) -> Self {
        Self {
            gains,
            cos_guard: DEFAULT_COS_GUARD,
            lethal_radius: DEFAULT_LETHAL_RADIUS,
            boundary_time: 0.0,
        }
    }

    pub fn validate(&self, missiles: usize) -> Result<()> {
        if self.gains.len() != missiles {
            return Err(usage(format!(
                "{} gains for {missiles} missiles",
                self.gains.len()
            )));
        }
        if !(self.cos_guard > 0.0 && self.cos_guard < 1.0) {
            return Err(usage("cos_guard must lie in (0, 1)"));
        }
        if !(self.lethal_radius > 0.0) {
            return Err(usage("lethal_radius must be positive"));
        }
        if !(self.boundary_time >= 0.0) {
            return Err(usage("boundary_time must be non-negative"));
        }
        Ok(())
    }
}

/// `θ̇ = −v·sin(γ − θ)/r`.
pub fn los_rate(state: &PolarEngagementState) -> Result<f64> {
    state.check()?;
    Ok(-state.v * state.heading_error().sin() / state.r)
}

/// `θ̈` for a constant-speed missile pulling lateral acceleration `a_m`.
pub fn los_accel(state: &PolarEngagementState, a_m: f64) -> Result<f64> {
    let theta_dot = los_rate(state)?;
    let cos_m = state.heading_error().cos();
    Ok(-2.0 * state.range_rate() * theta_dot / state.r - cos_m / state.r * a_m)
}

fn switching(sigma: f64, layer: f64) -> f64 {
    if layer > 0.0 {
        (sigma / layer).clamp(-1.0, 1.0)
    } else {
        sign(sigma)
    }
}

/// Lateral acceleration that drives `θ̈_i` to `−w·sign(θ̇_i − θ̇_leader)`.
pub fn accel_command(
    state: &PolarEngagementState,
    theta_dot_leader: f64,
    w: f64,
    config: &GuidanceConfig,
) -> Result<f64> {
    let theta_dot = los_rate(state)?;
    let s = switching(theta_dot - theta_dot_leader, w.abs() * config.boundary_time);
    let cos_m = state.heading_error().cos();
    let divisor = if cos_m.abs() < config.cos_guard {
        if cos_m < 0.0 {
            -config.cos_guard
        } else {
            config.cos_guard
        }
    } else {
        cos_m
    };
    Ok((2.0 * state.closing_speed() * theta_dot + state.r * w * s) / divisor)
}

/// Consensus at zero LOS rate is reachable only if the initial rates straddle zero.
pub fn zero_rate_reachable(theta_dots: &[f64]) -> bool {
    let lo = theta_dots.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = theta_dots.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lo < 0.0 && 0.0 < hi
}

/// LOS angle and rate of one missile on a shared time grid.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LosHistory {
    pub time: Vec<f64>,
    pub theta: Vec<f64>,
    pub theta_dot: Vec<f64>,
}

/// Collision check for the edge from `follower` to `leader`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeMargin {
    pub follower: usize,
    pub leader: usize,
    /// Largest `|∫₀ᵗ σ dτ|` over the history.
    pub max_abs_integral: f64,
    /// Initial LOS-angle gap `θ_leader(0) − θ_follower(0)`, taken in `[0, 2π)`.
    pub bound: f64,
    /// Smallest gap between the two LOS angles seen along the history.
    pub min_gap: f64,
    pub safe: bool,
}

fn unwrap(angles: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(angles.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &a in angles {
        if let Some(p) = prev {
            let jump = a - p;
            if jump > PI {
                offset -= TAU;
            } else if jump < -PI {
                offset += TAU;
            }
        }
        out.push(a + offset);
        prev = Some(a);
    }
    out
}

/// Per-edge margin `|∫σ| < |Δθ(0)|` plus the gap actually observed.
pub fn collision_margin(histories: &[LosHistory]) -> Result<Vec<EdgeMargin>> {
    let n = histories.len();
    if n < 2 {
        return Err(usage("collision margin needs at least two missiles"));
    }
    let grid = &histories[0].time;
    if grid.is_empty() {
        return Err(usage("empty LOS history"));
    }
    for (i, h) in histories.iter().enumerate() {
        if h.time != *grid || h.theta.len() != grid.len() || h.theta_dot.len() != grid.len() {
            return Err(usage(format!("LOS history {i} is not on the common grid")));
        }
    }
    let unwrapped: Vec<Vec<f64>> = histories.iter().map(|h| unwrap(&h.theta)).collect();

    let mut margins = Vec::with_capacity(n);
    for i in 0..n {
        let j = (i + 1) % n;
        let (a, b) = (&histories[i], &histories[j]);
        let bound = (b.theta[0] - a.theta[0]).rem_euclid(TAU);
        let mut integral = 0.0;
        let mut max_abs = 0.0f64;
        let mut min_gap = bound;
        for k in 1..grid.len() {
            let h = grid[k] - grid[k - 1];
            let s0 = a.theta_dot[k - 1] - b.theta_dot[k - 1];
            let s1 = a.theta_dot[k] - b.theta_dot[k];
            integral += 0.5 * h * (s0 + s1);
            max_abs = max_abs.max(integral.abs());
            let drift = (unwrapped[j][k] - unwrapped[j][0]) - (unwrapped[i][k] - unwrapped[i][0]);
            min_gap = min_gap.min(bound + drift);
        }
        margins.push(EdgeMargin {
            follower: i,
            leader: j,
            max_abs_integral: max_abs,
            bound,
            min_gap,
            safe: max_abs < bound,
        });
    }
    Ok(margins)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    fn state(theta: f64, gamma: f64) -> PolarEngagementState {
        PolarEngagementState {
            r: 15_000.0,
            theta: deg(theta),
            gamma: deg(gamma),
            v: 400.0,
        }
    }

    #[test]
    fn los_rates_of_scenario_one() {
        let expected = [-2.6262e-2, 2.5058e-2, 2.4168e-2, 1.8856e-2, 2.3094e-2];
        let thetas = [-170.0, -110.0, -25.0, 45.0, 105.0];
        let gammas = [-90.0, -180.0, -90.0, 0.0, 45.0];
        for k in 0..5 {
            let rate = los_rate(&state(thetas[k], gammas[k])).unwrap();
            assert!((rate - expected[k]).abs() < 5e-7, "agent {k}: {rate}");
        }
    }

    #[test]
    fn head_on_has_zero_rate() {
        assert_eq!(los_rate(&state(30.0, 30.0)).unwrap(), 0.0);
        let mut s = state(0.0, 0.0);
        s.r = 0.0;
        assert!(los_rate(&s).is_err());
    }

    #[test]
    fn los_accel_structure() {
        assert_eq!(los_accel(&state(10.0, 10.0), 0.0).unwrap(), 0.0);
        // at θ_M = 90° only the drift is left
        let s = PolarEngagementState {
            gamma: 0.5 * PI,
            theta: 0.0,
            ..state(0.0, 0.0)
        };
        let drift = los_accel(&s, 0.0).unwrap();
        assert!((los_accel(&s, 50.0).unwrap() - drift).abs() < 1e-15);

        let s = state(-170.0, -90.0);
        let rdot = -400.0 * deg(80.0).cos();
        let tdot = los_rate(&s).unwrap();
        let expected = -2.0 * rdot * tdot / 15_000.0 - deg(80.0).cos() / 15_000.0 * 10.0;
        assert!((los_accel(&s, 10.0).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn command_linearizes_los_dynamics() {
        let cfg = GuidanceConfig::new(vec![1.315e-3]);
        for (theta, gamma, leader) in [
            (-170.0, -90.0, 2.5058e-2),
            (45.0, 0.0, -1.0e-2),
            (105.0, 45.0, 0.5),
            (20.0, 60.0, 0.0),
        ] {
            let s = state(theta, gamma);
            let a = accel_command(&s, leader, 1.315e-3, &cfg).unwrap();
            let sigma = los_rate(&s).unwrap() - leader;
            let got = los_accel(&s, a).unwrap();
            assert!((got + 1.315e-3 * sign(sigma)).abs() < 1e-15, "{got}");
        }
    }

    #[test]
    fn command_on_scenario_one_agent_one() {
        let cfg = GuidanceConfig::new(vec![1.315e-3]);
        let s = state(-170.0, -90.0);
        let tdot = los_rate(&s).unwrap();
        let c = deg(80.0).cos();
        let expected = (2.0 * 400.0 * c * tdot - 15_000.0 * 1.315e-3) / c;
        let a = accel_command(&s, 2.5058e-2, 1.315e-3, &cfg).unwrap();
        assert!((a - expected).abs() < 1e-9 * expected.abs());
    }

    #[test]
    fn no_effort_on_collision_course() {
        let cfg = GuidanceConfig::new(vec![1.0]);
        assert_eq!(
            accel_command(&state(30.0, 30.0), 0.0, 1.0, &cfg).unwrap(),
            0.0
        );
    }

    #[test]
    fn cos_guard_bounds_the_divisor() {
        let cfg = GuidanceConfig::new(vec![1.0]);
        let s = PolarEngagementState {
            theta: 0.0,
            gamma: 0.5 * PI,
            ..state(0.0, 0.0)
        };
        let a = accel_command(&s, 0.0, 1.0, &cfg).unwrap();
        assert!(a.is_finite());
        let raw = (2.0 * s.closing_speed() * los_rate(&s).unwrap()
            + s.r * sign(los_rate(&s).unwrap()))
            / 0.01;
        assert!((a - raw).abs() < 1e-6 * raw.abs());
    }

    #[test]
    fn position_round_trip() {
        let s = state(-110.0, -180.0);
        let (x, y) = s.position();
        let back = PolarEngagementState::from_position(x, y, s.gamma, s.v);
        assert!((back.r - s.r).abs() < 1e-9);
        assert!((back.theta - s.theta).abs() < 1e-12);
    }

    #[test]
    fn zero_rate_gate() {
        assert!(zero_rate_reachable(&[-1.0, 2.0]));
        assert!(!zero_rate_reachable(&[0.0, 2.0]));
        assert!(!zero_rate_reachable(&[-1.0, -2.0]));
    }

    fn constant_history(theta: f64, steps: usize) -> LosHistory {
        LosHistory {
            time: (0..steps).map(|k| k as f64 * 0.1).collect(),
            theta: vec![theta; steps],
            theta_dot: vec![0.25; steps],
        }
    }

    #[test]
    fn identical_rates_are_safe() {
        let h: Vec<_> = [-170.0f64, -110.0, -25.0, 45.0, 105.0]
            .iter()
            .map(|t| constant_history(deg(*t), 20))
            .collect();
        let m = collision_margin(&h).unwrap();
        let gaps: Vec<f64> = m.iter().map(|e| e.bound.to_degrees()).collect();
        for (g, want) in gaps.iter().zip([60.0, 85.0, 70.0, 60.0, 85.0]) {
            assert!((g - want).abs() < 1e-9);
        }
        assert!(m.iter().all(|e| e.safe && e.max_abs_integral == 0.0));
    }

    #[test]
    fn equal_initial_angles_are_unsafe() {
        let h = vec![constant_history(0.3, 5), constant_history(0.3, 5)];
        let m = collision_margin(&h).unwrap();
        assert!(!m[0].safe);
    }

    #[test]
    fn mismatched_grids_rejected() {
        let mut b = constant_history(0.3, 5);
        b.time[2] += 1e-3;
        assert!(collision_margin(&[constant_history(0.0, 5), b]).is_err());
    }

    #[test]
    fn unwrap_removes_branch_jumps() {
        let u = unwrap(&[3.0, 3.1, -3.1, -3.0]);
        assert!((u[2] - (TAU - 3.1)).abs() < 1e-12);
        assert!(u.windows(2).all(|w| w[1] > w[0]));
    }
}
