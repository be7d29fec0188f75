//! Brute-force forward-Euler integration of the sign dynamics.
//!
//! Used only to cross-check [`crate::engine`]; it shares none of the event
//! machinery. Merged agents sit on `σ = 0` where a raw sign chatters under
//! Euler, so by default the sign is replaced by a saturation of width
//! `boundary_layer`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{sign, spread_of, ConsensusInstance};
use crate::engine::consensus_time_upper_bound;
use crate::error::{usage, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub dt: f64,
    pub horizon: f64,
    /// Spread at or below which the group counts as in consensus.
    pub consensus_band: f64,
    /// Half-width of the saturated sign; 0 selects the exact sign.
    pub boundary_layer: f64,
    /// Keep every `record_every`-th step in the trajectory; 0 keeps none.
    pub record_every: usize,
}

impl OracleConfig {
    /// Defaults scaled to the instance: `dt = 1e-4·t_c`, band `1e-4·V(0)`,
    /// horizon `3·t_c`, layer wide enough that Euler does not chatter.
    pub fn for_instance(instance: &ConsensusInstance) -> Result<Self> {
        let spread = spread_of(instance.states0());
        let t_c = consensus_time_upper_bound(instance)?;
        if spread == 0.0 {
            return Ok(Self {
                dt: 1e-3,
                horizon: 1.0,
                consensus_band: 0.0,
                boundary_layer: 0.0,
                record_every: 0,
            });
        }
        let dt = 1e-4 * t_c;
        let w_max = instance.gains().iter().copied().fold(0.0, f64::max);
        Ok(Self {
            dt,
            horizon: 3.0 * t_c,
            consensus_band: 1e-4 * spread,
            boundary_layer: (1e-6 * spread).max(w_max * dt),
            record_every: 0,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.horizon > 0.0) {
            return Err(usage("oracle needs positive dt and horizon"));
        }
        if self.consensus_band < 0.0 || self.boundary_layer < 0.0 {
            return Err(usage("oracle band and boundary layer must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSample {
    pub time: f64,
    pub states: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OracleResult {
    Converged {
        t_f_est: f64,
        x_f_est: f64,
        steps: usize,
        trajectory: Vec<OracleSample>,
    },
    Diverged {
        final_spread: f64,
        horizon: f64,
        trajectory: Vec<OracleSample>,
    },
}

impl OracleResult {
    pub fn estimate(&self) -> Option<(f64, f64)> {
        match self {
            OracleResult::Converged {
                t_f_est, x_f_est, ..
            } => Some((*t_f_est, *x_f_est)),
            OracleResult::Diverged { .. } => None,
        }
    }
}

fn switching(sigma: f64, layer: f64) -> f64 {
    if layer > 0.0 {
        (sigma / layer).clamp(-1.0, 1.0)
    } else {
        sign(sigma)
    }
}

/// Integrate until the spread enters the consensus band or the horizon runs out.
pub fn integrate(instance: &ConsensusInstance, config: &OracleConfig) -> Result<OracleResult> {
    config.validate()?;
    let n = instance.n();
    let gains = instance.gains();
    let mut x = instance.states0().to_vec();
    let mut next = x.clone();
    let mut trajectory = Vec::new();
    let max_steps = (config.horizon / config.dt - 1e-9).ceil() as usize;

    for step in 0..=max_steps {
        let t = step as f64 * config.dt;
        if config.record_every > 0 && step % config.record_every == 0 {
            trajectory.push(OracleSample {
                time: t,
                states: x.clone(),
            });
        }
        if spread_of(&x) <= config.consensus_band {
            return Ok(OracleResult::Converged {
                t_f_est: t,
                x_f_est: x.iter().sum::<f64>() / n as f64,
                steps: step,
                trajectory,
            });
        }
        if step == max_steps {
            break;
        }
        for i in 0..n {
            let s = x[i] - x[(i + 1) % n];
            next[i] = x[i] - gains[i] * switching(s, config.boundary_layer) * config.dt;
        }
        std::mem::swap(&mut x, &mut next);
    }
    Ok(OracleResult::Diverged {
        final_spread: spread_of(&x),
        horizon: config.horizon,
        trajectory,
    })
}

/// Engine against oracle on one instance, with the agreement tolerances
/// `50·dt` on the time and `max(10·band, 1e-3·spread)` on the value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub engine_t_f: f64,
    pub engine_x_f: f64,
    pub oracle_t_f: Option<f64>,
    pub oracle_x_f: Option<f64>,
    pub dt: f64,
    pub t_tolerance: f64,
    pub x_tolerance: f64,
    pub agree: bool,
}

pub fn compare_with_engine(
    instance: &ConsensusInstance,
    config: &OracleConfig,
) -> Result<Comparison> {
    let exact = crate::engine::run_consensus(instance)?;
    let est = integrate(instance, config)?.estimate();
    let spread = spread_of(instance.states0());
    let t_tolerance = 50.0 * config.dt;
    let x_tolerance = (10.0 * config.consensus_band).max(1e-3 * spread);
    let agree = est.is_some_and(|(t, x)| {
        (t - exact.t_f).abs() <= t_tolerance && (x - exact.x_f).abs() <= x_tolerance
    });
    Ok(Comparison {
        engine_t_f: exact.t_f,
        engine_x_f: exact.x_f,
        oracle_t_f: est.map(|e| e.0),
        oracle_x_f: est.map(|e| e.1),
        dt: config.dt,
        t_tolerance,
        x_tolerance,
        agree,
    })
}

/// Random positive-gain instance: states uniform in `[−10, 10]`, gains in `[0.5, 5]`.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<ConsensusInstance> {
    let states = (0..n).map(|_| rng.gen_range(-10.0..=10.0)).collect();
    let gains = (0..n).map(|_| rng.gen_range(0.5..=5.0)).collect();
    ConsensusInstance::new(states, gains)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_agents_pure_sign() {
        let inst = ConsensusInstance::new(vec![10.0, 0.0], vec![1.0, 1.0]).unwrap();
        let cfg = OracleConfig {
            dt: 1e-3,
            horizon: 20.0,
            consensus_band: 1e-3,
            boundary_layer: 0.0,
            record_every: 0,
        };
        let (t, x) = integrate(&inst, &cfg).unwrap().estimate().unwrap();
        assert!((t - 5.0).abs() <= 2.0 * cfg.dt);
        assert!((x - 5.0).abs() <= cfg.consensus_band);
    }

    #[test]
    fn equal_states_converge_immediately() {
        let inst = ConsensusInstance::new(vec![-2.0; 3], vec![1.0, 2.0, 3.0]).unwrap();
        let cfg = OracleConfig::for_instance(&inst).unwrap();
        let (t, x) = integrate(&inst, &cfg).unwrap().estimate().unwrap();
        assert_eq!((t, x), (0.0, -2.0));
    }

    #[test]
    fn horizon_exhaustion_reports_divergence() {
        let inst = ConsensusInstance::new(vec![10.0, 0.0], vec![1.0, 1.0]).unwrap();
        let cfg = OracleConfig {
            dt: 1e-2,
            horizon: 1.0,
            consensus_band: 1e-3,
            boundary_layer: 0.0,
            record_every: 10,
        };
        match integrate(&inst, &cfg).unwrap() {
            OracleResult::Diverged {
                final_spread,
                trajectory,
                ..
            } => {
                assert!((final_spread - 8.0).abs() < 1e-9);
                assert_eq!(trajectory.len(), 11);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_config() {
        let inst = ConsensusInstance::new(vec![1.0, 0.0], vec![1.0, 1.0]).unwrap();
        let cfg = OracleConfig {
            dt: 0.0,
            horizon: 1.0,
            consensus_band: 1e-3,
            boundary_layer: 0.0,
            record_every: 0,
        };
        assert!(integrate(&inst, &cfg).is_err());
    }

    #[test]
    fn random_instances_agree_with_engine() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 3..=6 {
            let inst = random_instance(&mut rng, n).unwrap();
            let cfg = OracleConfig::for_instance(&inst).unwrap();
            let c = compare_with_engine(&inst, &cfg).unwrap();
            assert!(c.agree, "{c:?}");
        }
    }

    #[test]
    fn halving_dt_is_first_order() {
        let inst = ConsensusInstance::new(
            vec![1000.0, 2000.0, -5000.0, 4000.0, 6000.0],
            vec![20.0, 40.0, 30.0, 15.0, 25.0],
        )
        .unwrap();
        let mut cfg = OracleConfig::for_instance(&inst).unwrap();
        cfg.dt *= 10.0;
        cfg.boundary_layer *= 10.0;
        let (_, x1) = integrate(&inst, &cfg).unwrap().estimate().unwrap();
        cfg.dt /= 2.0;
        cfg.boundary_layer /= 2.0;
        let (_, x2) = integrate(&inst, &cfg).unwrap().estimate().unwrap();
        cfg.dt /= 2.0;
        cfg.boundary_layer /= 2.0;
        let (_, x3) = integrate(&inst, &cfg).unwrap().estimate().unwrap();
        // successive differences shrink roughly like dt
        let d12 = (x1 - x2).abs();
        let d23 = (x2 - x3).abs();
        assert!(d12 < 1e-3 * 11000.0, "d12 = {d12}");
        assert!(d23 <= 0.75 * d12 + 1e-9, "d12 = {d12}, d23 = {d23}");
    }
}
