use ftcp::agents::{envelope, ConsensusInstance};
use ftcp::engine::{consensus_time_upper_bound, run_consensus};
use ftcp::synth::{synthesize, SynthesisRequest};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = ConsensusInstance> {
    (3usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(-10.0f64..10.0, n),
            prop::collection::vec(0.5f64..5.0, n),
        )
            .prop_map(|(x, w)| ConsensusInstance::new(x, w).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn consensus_lands_inside_the_initial_envelope(inst in instance()) {
        let out = run_consensus(&inst).unwrap();
        let env = envelope(inst.states0()).unwrap();
        prop_assert!(out.x_f > env.x_min - 1e-12 && out.x_f < env.x_max + 1e-12);
        prop_assert!(out.t_f <= consensus_time_upper_bound(&inst).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn reconstructed_states_never_leave_the_envelope(inst in instance(), frac in 0.0f64..1.0) {
        let out = run_consensus(&inst).unwrap();
        let env = envelope(inst.states0()).unwrap();
        let tol = 1e-9 * env.spread.max(1.0);
        for x in out.state_at(frac * out.t_f) {
            prop_assert!(x >= env.x_min - tol && x <= env.x_max + tol);
        }
        for x in out.state_at(out.t_f) {
            prop_assert!((x - out.x_f).abs() <= tol);
        }
    }

    #[test]
    fn rotating_the_cycle_rotates_nothing_else(inst in instance(), shift in 0usize..8) {
        let n = inst.n();
        let s = shift % n;
        let rot = |v: &[f64]| (0..n).map(|i| v[(i + s) % n]).collect::<Vec<_>>();
        let rotated = ConsensusInstance::new(rot(inst.states0()), rot(inst.gains())).unwrap();
        let a = run_consensus(&inst).unwrap();
        let b = run_consensus(&rotated).unwrap();
        prop_assert!((a.t_f - b.t_f).abs() <= 1e-9 * a.t_f);
        prop_assert!((a.x_f - b.x_f).abs() <= 1e-9 * envelope(inst.states0()).unwrap().spread);
    }

    #[test]
    fn synthesized_gains_are_positive(inst in instance(), pos in 0.05f64..0.95, t_f in 0.5f64..50.0) {
        let env = envelope(inst.states0()).unwrap();
        let req = SynthesisRequest::new(inst.states0().to_vec(), env.x_min + pos * env.spread, t_f);
        let gains = synthesize(&req).unwrap();
        prop_assert!(gains.iter().all(|&w| w > 0.0 && w.is_finite()));
    }
}
