//! Gain synthesis for a prescribed consensus value and time, the reachable
//! set, and robustness of a synthesized design.
//!
//! The extremal agents are given the gains that carry them straight to the
//! target value at the target time. Every other agent sits on one of the two
//! chains that end at an extremal agent, and gets a gain strictly larger than
//! its leader's, so that it catches its leader (and merges) strictly before
//! the leader itself merges. No switching variable then changes sign before
//! consensus, so the consensus point is set by the two extremal agents alone.

use serde::{Deserialize, Serialize};

use crate::agents::{sign, ConsensusInstance};
use crate::engine::{run_consensus, ConsensusOutcome};
use crate::error::{usage, Error, Result};

/// Default multiplicative slack between consecutive merge times.
pub const DEFAULT_MARGIN: f64 = 1.5;

/// Shifts at or below this relative size count as no shift.
pub const PERTURBATION_ZERO_REL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisRequest {
    pub states0: Vec<f64>,
    pub x_f: f64,
    pub t_f: f64,
    #[serde(default = "default_margin")]
    pub margin: f64,
}

fn default_margin() -> f64 {
    DEFAULT_MARGIN
}

impl SynthesisRequest {
    pub fn new(states0: Vec<f64>, x_f: f64, t_f: f64) -> Self {
        Self {
            states0,
            x_f,
            t_f,
            margin: DEFAULT_MARGIN,
        }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.states0.len() < 2 {
            return Err(usage("synthesis needs at least two agents"));
        }
        if !(self.t_f > 0.0 && self.t_f.is_finite()) {
            return Err(usage(format!(
                "consensus time must be positive, got {}",
                self.t_f
            )));
        }
        if !(self.margin > 1.0 && self.margin.is_finite()) {
            return Err(usage(format!("margin must exceed 1, got {}", self.margin)));
        }
        let interval = &reachable_set(std::slice::from_ref(&self.states0))[0];
        if !interval.contains(self.x_f) {
            return Err(Error::Infeasible {
                target: self.x_f,
                lower: interval.lower,
                upper: interval.upper,
            });
        }
        Ok(())
    }
}

/// The two chains of the cycle that end at the unique maximum and minimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPartition {
    pub i_max: usize,
    pub j_min: usize,
    /// `j+1, …, i` in cycle order.
    pub v_max: Vec<usize>,
    /// `i+1, …, j` in cycle order.
    pub v_min: Vec<usize>,
    pub r: usize,
}

fn unique_extremum(states: &[f64], better: impl Fn(f64, f64) -> bool, what: &str) -> Result<usize> {
    let mut best = 0;
    for (i, &x) in states.iter().enumerate().skip(1) {
        if better(x, states[best]) {
            best = i;
        }
    }
    let ties = states.iter().filter(|&&x| x == states[best]).count();
    if ties > 1 {
        return Err(Error::NotSupported(format!(
            "{ties} agents share the {what} initial state {}",
            states[best]
        )));
    }
    Ok(best)
}

pub fn partition(states0: &[f64]) -> Result<VertexPartition> {
    let n = states0.len();
    if n < 2 {
        return Err(usage("partition needs at least two agents"));
    }
    let i_max = unique_extremum(states0, |a, b| a > b, "maximal")?;
    let j_min = unique_extremum(states0, |a, b| a < b, "minimal")?;
    let walk = |from: usize, to: usize| -> Vec<usize> {
        let mut out = Vec::new();
        let mut k = (from + 1) % n;
        loop {
            out.push(k);
            if k == to {
                break;
            }
            k = (k + 1) % n;
        }
        out
    };
    let v_max = walk(j_min, i_max);
    let v_min = walk(i_max, j_min);
    Ok(VertexPartition {
        i_max,
        j_min,
        r: v_max.len(),
        v_max,
        v_min,
    })
}

/// Gains that bring the group to `x_f` exactly at `t_f`.
pub fn synthesize(request: &SynthesisRequest) -> Result<Vec<f64>> {
    request.validate()?;
    let x0 = &request.states0;
    let n = x0.len();
    let part = partition(x0)?;
    let mut gains = vec![0.0; n];
    gains[part.i_max] = (x0[part.i_max] - request.x_f) / request.t_f;
    gains[part.j_min] = (request.x_f - x0[part.j_min]) / request.t_f;

    let sigma0 = |a: usize| x0[a] - x0[(a + 1) % n];
    // each chain is walked backwards from its extremal agent
    for (anchor, len) in [
        (part.j_min, part.v_min.len()),
        (part.i_max, part.v_max.len()),
    ] {
        // speed, direction and merge deadline of the trajectory the next agent chases
        let mut lead_speed = gains[anchor];
        let mut lead_sign = sign(sigma0(anchor));
        let mut deadline = request.t_f;
        let mut prev_gain = gains[anchor];
        for k in 1..len {
            let a = (anchor + n - k) % n;
            let s = sigma0(a);
            let w = if s == 0.0 {
                // starts on its leader and rides it from t = 0
                request.margin * prev_gain
            } else {
                let head_on = sign(s) != lead_sign;
                let target = if head_on {
                    deadline.min(s.abs() / (2.0 * lead_speed)) / request.margin
                } else {
                    deadline / request.margin
                };
                let w = if head_on {
                    s.abs() / target - lead_speed
                } else {
                    s.abs() / target + lead_speed
                };
                if w > prev_gain {
                    w
                } else {
                    request.margin * prev_gain
                }
            };
            gains[a] = w;
            prev_gain = w;
            if s != 0.0 {
                let closing = if sign(s) != lead_sign {
                    w + lead_speed
                } else {
                    w - lead_speed
                };
                deadline = s.abs() / closing;
                lead_speed = w;
                lead_sign = sign(s);
            }
        }
    }
    if let Some(bad) = gains.iter().position(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::Internal(format!(
            "synthesized gain {} for agent {bad} is not positive",
            gains[bad]
        )));
    }
    Ok(gains)
}

/// Open interval `(lower, upper)`; empty when `lower >= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpenInterval {
    pub lower: f64,
    pub upper: f64,
}

impl OpenInterval {
    pub fn is_empty(&self) -> bool {
        !(self.lower < self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }
}

/// Consensus points reachable with positive gains, one open interval per
/// decoupled axis.
pub fn reachable_set(states0_per_axis: &[Vec<f64>]) -> Vec<OpenInterval> {
    states0_per_axis
        .iter()
        .map(|axis| OpenInterval {
            lower: axis.iter().copied().fold(f64::INFINITY, f64::min),
            upper: axis.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
        .collect()
}

/// `−min_{i≠k} w_i`: agent `k` keeps consensus iff its gain is strictly above this.
pub fn negative_gain_bound(gains: &[f64], k: usize) -> Result<f64> {
    if gains.len() < 2 {
        return Err(usage("need at least two gains"));
    }
    if k >= gains.len() {
        return Err(usage(format!("agent index {k} out of range")));
    }
    let others = gains.iter().enumerate().filter(|&(i, _)| i != k);
    if let Some((i, w)) = others.clone().find(|&(_, &w)| w <= 0.0) {
        return Err(Error::NotSupported(format!(
            "gain of agent {i} is {w}; only agent {k} may be non-positive"
        )));
    }
    let w_min = others.map(|(_, &w)| w).fold(f64::INFINITY, f64::min);
    Ok(-w_min)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    /// Agents whose gain can be nudged without moving `X_f` or `t_f`.
    pub perturbable: Vec<usize>,
    pub w_min_others: f64,
    pub negative_bound: f64,
}

pub fn robustness_report(instance: &ConsensusInstance, k: usize) -> Result<RobustnessReport> {
    let part = partition(instance.states0())?;
    let negative_bound = negative_gain_bound(instance.gains(), k)?;
    Ok(RobustnessReport {
        perturbable: (0..instance.n())
            .filter(|&i| i != part.i_max && i != part.j_min)
            .collect(),
        w_min_others: -negative_bound,
        negative_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub nominal_t_f: f64,
    pub nominal_x_f: f64,
    pub perturbed_t_f: f64,
    pub perturbed_x_f: f64,
    /// Zero when within [`PERTURBATION_ZERO_REL`] of the spread.
    pub x_f_shift: f64,
    /// Zero when within [`PERTURBATION_ZERO_REL`] of the nominal time.
    pub t_f_shift: f64,
}

/// Re-run the exact engine with gain `k` shifted by `delta`.
pub fn perturbation_check(
    instance: &ConsensusInstance,
    k: usize,
    delta: f64,
) -> Result<PerturbationReport> {
    perturbation_check_many(instance, &[(k, delta)])
}

/// Same as [`perturbation_check`] with several gains shifted at once.
pub fn perturbation_check_many(
    instance: &ConsensusInstance,
    shifts: &[(usize, f64)],
) -> Result<PerturbationReport> {
    let part = partition(instance.states0())?;
    let mut gains = instance.gains().to_vec();
    for &(k, delta) in shifts {
        if k >= instance.n() {
            return Err(usage(format!("agent index {k} out of range")));
        }
        if k == part.i_max || k == part.j_min {
            return Err(usage(format!(
                "agent {k} holds an extremal initial state; its gain fixes the consensus point"
            )));
        }
        gains[k] += delta;
    }
    let nominal = run_consensus(instance)?;
    let perturbed = run_consensus(&instance.with_gains(gains)?)?;
    Ok(shift_report(instance, &nominal, &perturbed))
}

fn shift_report(
    instance: &ConsensusInstance,
    nominal: &ConsensusOutcome,
    perturbed: &ConsensusOutcome,
) -> PerturbationReport {
    let spread = crate::agents::spread_of(instance.states0());
    let zeroed = |shift: f64, scale: f64| {
        if shift.abs() <= PERTURBATION_ZERO_REL * scale {
            0.0
        } else {
            shift
        }
    };
    PerturbationReport {
        nominal_t_f: nominal.t_f,
        nominal_x_f: nominal.x_f,
        perturbed_t_f: perturbed.t_f,
        perturbed_x_f: perturbed.x_f,
        x_f_shift: zeroed(perturbed.x_f - nominal.x_f, spread),
        t_f_shift: zeroed(perturbed.t_f - nominal.t_f, nominal.t_f.abs()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EventKind;

    const SCENARIO_ONE_RATES: [f64; 5] = [-2.6262e-2, 2.5058e-2, 2.4168e-2, 1.8856e-2, 2.3094e-2];
    const SCENARIO_ONE_GAINS: [f64; 5] = [1.315e-3, 1.255e-3, 4.900e-3, 2.700e-3, 2.000e-3];

    #[test]
    fn partition_of_scenario_one_rates() {
        let p = partition(&SCENARIO_ONE_RATES).unwrap();
        assert_eq!((p.i_max, p.j_min), (1, 0));
        assert_eq!(p.v_max, vec![1]);
        assert_eq!(p.v_min, vec![2, 3, 4, 0]);
        assert_eq!(p.r, 1);
    }

    #[test]
    fn partition_of_two_agents() {
        let p = partition(&[0.0, 1.0]).unwrap();
        assert_eq!(p.v_max, vec![1]);
        assert_eq!(p.v_min, vec![0]);
    }

    #[test]
    fn partition_of_sorted_states() {
        let p = partition(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(p.v_max, vec![1, 2, 3, 4]);
        assert_eq!(p.v_min, vec![0]);
        assert_eq!(p.r, 4);
    }

    #[test]
    fn partition_rejects_tied_extremes() {
        assert!(matches!(
            partition(&[3.0, 1.0, 3.0]),
            Err(Error::NotSupported(_))
        ));
        assert!(matches!(
            partition(&[0.0, 2.0, 0.0, 1.0]),
            Err(Error::NotSupported(_))
        ));
    }

    #[test]
    fn extremal_gains_for_scenario_one() {
        let req = SynthesisRequest::new(SCENARIO_ONE_RATES.to_vec(), 0.0, 20.0);
        let w = synthesize(&req).unwrap();
        assert!((w[1] - 1.2529e-3).abs() < 1e-12);
        assert!((w[0] - 1.3131e-3).abs() < 1e-12);
        // the v_min chain 2 <- 3 <- 4 <- 0 has strictly increasing gains away from the minimum
        assert!(w[2] > w[3] && w[3] > w[4] && w[4] > w[0]);
    }

    #[test]
    fn hand_picked_gains_respect_chain_order() {
        let w = SCENARIO_ONE_GAINS;
        assert!(w[2] > w[3] && w[3] > w[4] && w[4] > w[0]);
        let inst = ConsensusInstance::new(SCENARIO_ONE_RATES.to_vec(), SCENARIO_ONE_GAINS.to_vec())
            .unwrap();
        let out = run_consensus(&inst).unwrap();
        assert!((out.t_f - 20.0).abs() < 0.05, "t_f = {}", out.t_f);
        assert!(out.x_f.abs() < 1e-5);
        assert_eq!(out.sign_reversals(), 0);
    }

    #[test]
    fn symmetric_two_agent_design() {
        let req = SynthesisRequest::new(vec![0.0, 10.0], 5.0, 5.0);
        assert_eq!(synthesize(&req).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn synthesized_gains_round_trip() {
        let states = vec![0.3, -4.0, 2.5, 7.0, -1.2, 5.5];
        let req = SynthesisRequest::new(states.clone(), 1.0, 3.0);
        let gains = synthesize(&req).unwrap();
        let out = run_consensus(&ConsensusInstance::new(states, gains).unwrap()).unwrap();
        assert!((out.t_f - 3.0).abs() <= 1e-9 * 3.0);
        assert!((out.x_f - 1.0).abs() <= 1e-9 * 11.0);
        assert!(out.events.iter().all(|e| e.kind != EventKind::SignReversal));
    }

    #[test]
    fn adjacent_duplicate_rides_its_leader() {
        let states = vec![0.0, 2.0, 2.0, 9.0, 4.0];
        let req = SynthesisRequest::new(states.clone(), 5.0, 4.0);
        let gains = synthesize(&req).unwrap();
        let out = run_consensus(&ConsensusInstance::new(states, gains).unwrap()).unwrap();
        assert!((out.t_f - 4.0).abs() <= 1e-9 * 4.0);
        assert!((out.x_f - 5.0).abs() <= 1e-9 * 9.0);
    }

    #[test]
    fn infeasible_targets_rejected() {
        let req = SynthesisRequest::new(vec![0.0, 1.0, 3.0], 3.0, 1.0);
        assert!(matches!(synthesize(&req), Err(Error::Infeasible { .. })));
        let req = SynthesisRequest::new(vec![0.0, 1.0, 3.0], 1.5, 0.0);
        assert!(matches!(synthesize(&req), Err(Error::Usage(_))));
        let req = SynthesisRequest::new(vec![0.0, 1.0, 3.0], 1.5, 1.0).with_margin(1.0);
        assert!(matches!(synthesize(&req), Err(Error::Usage(_))));
    }

    #[test]
    fn reachable_set_cases() {
        let r = reachable_set(&[vec![1000.0, 2000.0, -5000.0, 4000.0, 6000.0]]);
        assert_eq!((r[0].lower, r[0].upper), (-5000.0, 6000.0));
        let r = reachable_set(&[vec![0.0, 1.0], vec![-1.0, 2.0]]);
        assert_eq!(
            r,
            vec![
                OpenInterval {
                    lower: 0.0,
                    upper: 1.0
                },
                OpenInterval {
                    lower: -1.0,
                    upper: 2.0
                }
            ]
        );
        let r = reachable_set(&[vec![4.0, 4.0, 4.0]]);
        assert!(r[0].is_empty());
        assert!(!r[0].contains(4.0));
    }

    #[test]
    fn negative_bound_examples() {
        let gains = [20.0, 40.0, 30.0, 15.0, 25.0];
        assert_eq!(negative_gain_bound(&gains, 4).unwrap(), -15.0);
        assert_eq!(negative_gain_bound(&[1.0, 1.0, 1.0], 0).unwrap(), -1.0);
        // k at the unique minimum: the second smallest sets the bound
        assert_eq!(negative_gain_bound(&gains, 3).unwrap(), -20.0);
    }

    #[test]
    fn negative_bound_rejects_two_non_positive() {
        assert!(matches!(
            negative_gain_bound(&[-1.0, 0.0, 2.0], 0),
            Err(Error::NotSupported(_))
        ));
        assert!(negative_gain_bound(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn robustness_excludes_extremal_agents() {
        let inst = ConsensusInstance::new(
            vec![1000.0, 2000.0, -5000.0, 4000.0, 6000.0],
            vec![20.0, 40.0, 30.0, 15.0, 25.0],
        )
        .unwrap();
        let rep = robustness_report(&inst, 4).unwrap();
        assert_eq!(rep.perturbable, vec![0, 1, 3]);
        assert_eq!(rep.w_min_others, 15.0);
    }

    #[test]
    fn scenario_two_perturbation_leaves_consensus_unchanged() {
        let inst = ConsensusInstance::new(SCENARIO_ONE_RATES.to_vec(), SCENARIO_ONE_GAINS.to_vec())
            .unwrap();
        let rep = perturbation_check_many(&inst, &[(2, 1.685e-3 - 4.9e-3), (3, 1.8e-3 - 2.7e-3)])
            .unwrap();
        assert_eq!(rep.x_f_shift, 0.0);
        assert_eq!(rep.t_f_shift, 0.0);
    }

    #[test]
    fn zero_delta_gives_zero_shift() {
        let inst = ConsensusInstance::new(SCENARIO_ONE_RATES.to_vec(), SCENARIO_ONE_GAINS.to_vec())
            .unwrap();
        let rep = perturbation_check(&inst, 3, 0.0).unwrap();
        assert_eq!((rep.x_f_shift, rep.t_f_shift), (0.0, 0.0));
    }

    #[test]
    fn perturbing_extremal_agent_is_rejected() {
        let inst = ConsensusInstance::new(SCENARIO_ONE_RATES.to_vec(), SCENARIO_ONE_GAINS.to_vec())
            .unwrap();
        assert!(matches!(
            perturbation_check(&inst, 0, 1e-4),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn small_mid_chain_perturbation_of_synthesized_design() {
        let states = vec![0.3, -4.0, 2.5, 7.0, -1.2, 5.5];
        let gains = synthesize(&SynthesisRequest::new(states.clone(), 1.0, 3.0)).unwrap();
        let inst = ConsensusInstance::new(states, gains.clone()).unwrap();
        let part = partition(inst.states0()).unwrap();
        for k in (0..6).filter(|&k| k != part.i_max && k != part.j_min) {
            let rep = perturbation_check(&inst, k, 1e-3 * gains[k]).unwrap();
            assert_eq!((rep.x_f_shift, rep.t_f_shift), (0.0, 0.0), "agent {k}");
        }
    }
}
