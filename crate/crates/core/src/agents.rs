//! Agents on a directed cycle: the instance definition, switching values and
//! the max/min envelope of a state vector.
//!
//! Agent `i` listens to agent `i + 1 (mod n)`; there is no other topology.

use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};

/// Initial states and per-agent gains of a cyclic-pursuit group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance", into = "RawInstance")]
pub struct ConsensusInstance {
    states0: Vec<f64>,
    gains: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawInstance {
    states: Vec<f64>,
    gains: Vec<f64>,
}

impl TryFrom<RawInstance> for ConsensusInstance {
    type Error = crate::Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        ConsensusInstance::new(raw.states, raw.gains)
    }
}

impl From<ConsensusInstance> for RawInstance {
    fn from(inst: ConsensusInstance) -> Self {
        RawInstance {
            states: inst.states0,
            gains: inst.gains,
        }
    }
}

impl ConsensusInstance {
    pub fn new(states0: Vec<f64>, gains: Vec<f64>) -> Result<Self> {
        if states0.len() != gains.len() {
            return Err(usage(format!(
                "{} initial states but {} gains",
                states0.len(),
                gains.len()
            )));
        }
        if states0.len() < 2 {
            return Err(usage("a cycle needs at least two agents"));
        }
        if states0.iter().chain(&gains).any(|v| !v.is_finite()) {
            return Err(usage("states and gains must be finite"));
        }
        Ok(Self { states0, gains })
    }

    pub fn n(&self) -> usize {
        self.states0.len()
    }

    pub fn states0(&self) -> &[f64] {
        &self.states0
    }

    pub fn gains(&self) -> &[f64] {
        &self.gains
    }

    /// Index of the agent that agent `i` pursues.
    pub fn leader(&self, i: usize) -> usize {
        (i + 1) % self.n()
    }

    /// Same states, gains replaced.
    pub fn with_gains(&self, gains: Vec<f64>) -> Result<Self> {
        Self::new(self.states0.clone(), gains)
    }

    pub fn all_gains_positive(&self) -> bool {
        self.gains.iter().all(|&w| w > 0.0)
    }
}

/// Value of `sign(σ)`, with `sign(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SwitchValue {
    Negative,
    Zero,
    Positive,
}

impl SwitchValue {
    pub fn of(x: f64) -> Self {
        if x > 0.0 {
            SwitchValue::Positive
        } else if x < 0.0 {
            SwitchValue::Negative
        } else {
            SwitchValue::Zero
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            SwitchValue::Negative => -1.0,
            SwitchValue::Zero => 0.0,
            SwitchValue::Positive => 1.0,
        }
    }
}

/// `sign` with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    SwitchValue::of(x).as_f64()
}

/// Switching variable `σ_i = x_i − x_{i+1}` of agent `i`.
pub fn sigma(instance: &ConsensusInstance, states: &[f64], i: usize) -> Result<f64> {
    let n = instance.n();
    if states.len() != n {
        return Err(usage(format!("expected {n} states, got {}", states.len())));
    }
    if i >= n {
        return Err(usage(format!("agent index {i} out of range for n = {n}")));
    }
    Ok(states[i] - states[(i + 1) % n])
}

/// Extremes of a state vector and the agents attaining them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub x_max: f64,
    pub x_min: f64,
    pub arg_max: Vec<usize>,
    pub arg_min: Vec<usize>,
    pub spread: f64,
}

pub fn envelope(states: &[f64]) -> Result<Envelope> {
    if states.is_empty() {
        return Err(usage("envelope of an empty state vector"));
    }
    let x_max = states.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let x_min = states.iter().copied().fold(f64::INFINITY, f64::min);
    let arg = |target: f64| -> Vec<usize> {
        states
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == target)
            .map(|(i, _)| i)
            .collect()
    };
    Ok(Envelope {
        x_max,
        x_min,
        arg_max: arg(x_max),
        arg_min: arg(x_min),
        spread: x_max - x_min,
    })
}

/// `max − min` of a nonempty slice; 0 for an empty one.
pub(crate) fn spread_of(states: &[f64]) -> f64 {
    if states.is_empty() {
        return 0.0;
    }
    let (lo, hi) = states
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example_one() -> ConsensusInstance {
        ConsensusInstance::new(
            vec![1000.0, 2000.0, -5000.0, 4000.0, 6000.0],
            vec![20.0, 40.0, 30.0, 15.0, 25.0],
        )
        .unwrap()
    }

    #[test]
    fn sigma_matches_neighbor_difference() {
        let inst = example_one();
        assert_eq!(sigma(&inst, inst.states0(), 2).unwrap(), -9000.0);
        // wraps around the cycle
        assert_eq!(sigma(&inst, inst.states0(), 4).unwrap(), 5000.0);
    }

    #[test]
    fn sigma_zero_at_consensus() {
        let inst = ConsensusInstance::new(vec![3.0; 4], vec![1.0; 4]).unwrap();
        for i in 0..4 {
            assert_eq!(sigma(&inst, inst.states0(), i).unwrap(), 0.0);
        }
    }

    #[test]
    fn sigma_two_agents_sum_to_zero() {
        let inst = ConsensusInstance::new(vec![10.0, 0.0], vec![1.0, 1.0]).unwrap();
        let s0 = sigma(&inst, inst.states0(), 0).unwrap();
        let s1 = sigma(&inst, inst.states0(), 1).unwrap();
        assert_eq!((s0, s1), (10.0, -10.0));
        assert_eq!(s0 + s1, 0.0);
    }

    #[test]
    fn sigma_rejects_bad_index() {
        let inst = example_one();
        assert!(matches!(
            sigma(&inst, inst.states0(), 5),
            Err(crate::Error::Usage(_))
        ));
    }

    #[test]
    fn envelope_of_example_one() {
        let env = envelope(example_one().states0()).unwrap();
        assert_eq!(env.x_max, 6000.0);
        assert_eq!(env.x_min, -5000.0);
        assert_eq!(env.spread, 11000.0);
        assert_eq!(env.arg_max, vec![4]);
        assert_eq!(env.arg_min, vec![2]);
    }

    #[test]
    fn envelope_of_constant_vector() {
        let env = envelope(&[2.5, 2.5, 2.5]).unwrap();
        assert_eq!(env.spread, 0.0);
        assert_eq!(env.arg_max, vec![0, 1, 2]);
        assert_eq!(env.arg_min, vec![0, 1, 2]);
    }

    #[test]
    fn envelope_of_pair() {
        let env = envelope(&[0.0, 1.0]).unwrap();
        assert_eq!((env.x_max, env.arg_max.as_slice()), (1.0, &[1][..]));
        assert_eq!((env.x_min, env.arg_min.as_slice()), (0.0, &[0][..]));
    }

    #[test]
    fn envelope_rejects_empty() {
        assert!(envelope(&[]).is_err());
    }

    #[test]
    fn instance_validation() {
        assert!(ConsensusInstance::new(vec![1.0], vec![1.0]).is_err());
        assert!(ConsensusInstance::new(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(ConsensusInstance::new(vec![1.0, f64::NAN], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn sign_of_zero_is_zero() {
        assert_eq!(sign(0.0), 0.0);
        assert_eq!(sign(-0.0), 0.0);
        assert_eq!(sign(-3.0), -1.0);
        assert_eq!(SwitchValue::of(2.0), SwitchValue::Positive);
    }

    proptest! {
        #[test]
        fn sigmas_telescope(states in prop::collection::vec(-1e3f64..1e3, 2..12)) {
            let n = states.len();
            let inst = ConsensusInstance::new(states.clone(), vec![1.0; n]).unwrap();
            let total: f64 = (0..n).map(|i| sigma(&inst, &states, i).unwrap()).sum();
            prop_assert!(total.abs() <= 1e-9 * states.iter().map(|x| x.abs()).sum::<f64>().max(1.0));
        }

        #[test]
        fn spread_zero_iff_all_equal(states in prop::collection::vec(-5i32..5, 1..8)) {
            let states: Vec<f64> = states.into_iter().map(f64::from).collect();
            let env = envelope(&states).unwrap();
            let all_equal = states.iter().all(|&x| x == states[0]);
            prop_assert_eq!(env.spread == 0.0, all_equal);
            prop_assert!(env.x_min <= env.x_max);
            if env.spread > 0.0 {
                prop_assert!(env.arg_max.iter().all(|i| !env.arg_min.contains(i)));
            }
        }
    }
}
