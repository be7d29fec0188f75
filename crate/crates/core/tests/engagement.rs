use ftcp::engagement::{run_engagement, scenario_one, EngagementResult};
use ftcp::scenario::override_dt;

fn run_at(dt: f64) -> EngagementResult {
    let mut s = scenario_one();
    override_dt(&mut s, dt, false);
    s.record_every = 1000;
    run_engagement(&s).unwrap()
}

#[test]
fn halving_the_step_moves_results_little() {
    let coarse = run_at(1e-3);
    let fine = run_at(5e-4);
    for (a, b) in coarse.missiles.iter().zip(&fine.missiles) {
        assert!(a.intercepted && b.intercepted);
        assert!((a.miss_distance - b.miss_distance).abs() < 0.1);
        let (ta, tb) = (a.intercept_time.unwrap(), b.intercept_time.unwrap());
        assert!((ta - tb).abs() < 0.01, "{ta} vs {tb}");
    }
    let (ca, cb) = (coarse.consensus_time.unwrap(), fine.consensus_time.unwrap());
    assert!((ca - cb).abs() < 0.05, "{ca} vs {cb}");
    assert!((coarse.consensus_value.unwrap() - fine.consensus_value.unwrap()).abs() < 1e-6);
}

#[test]
fn designed_gains_hit_the_requested_time() {
    let path =
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/scenario1_design.toml");
    let s = ftcp::scenario::ScenarioFile::load(&path)
        .unwrap()
        .engagement()
        .unwrap();
    let res = run_engagement(&s).unwrap();
    assert!((res.consensus_time.unwrap() - 20.0).abs() < 0.1);
    assert!(res.all_intercepted());
}
