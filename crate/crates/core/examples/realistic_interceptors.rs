//! Boosted interceptors with thrust, drag and gravity. Guidance starts at
//! burnout, using the LOS rates the boost left behind.
//!
//! $ cargo run --release --example realistic_interceptors

use ftcp::engagement::{propagate_unguided, realistic_scenario, run_engagement};
use ftcp::guidance::los_rate;

fn main() -> ftcp::error::Result<()> {
    let scenario = realistic_scenario();
    let t0 = scenario.model.guidance_start;
    let at_burnout = propagate_unguided(&scenario, t0)?;
    let rates: Vec<String> = at_burnout
        .iter()
        .map(|s| los_rate(s).map(|w| format!("{w:.4e}")))
        .collect::<Result<_, _>>()?;
    println!("LOS rates at {t0} s: [{}]", rates.join(", "));

    let res = run_engagement(&scenario)?;
    println!(
        "consensus at {:.3} s",
        res.consensus_time.unwrap_or(f64::NAN)
    );
    println!(
        "{:>6} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "t", "v1", "v2", "v3", "v4", "v5"
    );
    let h = &res.histories;
    // Histories keep every tenth step.
    for t in [0.0, 1.5, 4.0, 8.0, 12.0, 16.0] {
        let k = (t / (res.dt * scenario.record_every as f64)).round() as usize;
        let speeds: Vec<String> = h
            .iter()
            .map(|m| m.get(k).map_or("-".into(), |s| format!("{:.1}", s.v)))
            .collect();
        println!(
            "{t:>6.1} {}",
            speeds.iter().map(|s| format!("{s:>9}")).collect::<String>()
        );
    }
    for (i, m) in res.missiles.iter().enumerate() {
        println!(
            "missile {}: intercept {:.3} s, miss {:.2e} m, peak |a_M| {:.1} m/s^2",
            i + 1,
            m.intercept_time.unwrap_or(f64::NAN),
            m.miss_distance,
            m.peak_accel
        );
    }
    Ok(())
}
