//! One agent steering away from its leader. The cycle still meets as long
//! as the gain stays above minus the smallest remaining gain.
//!
//! $ cargo run --example negative_gain_threshold

use ftcp::agents::ConsensusInstance;
use ftcp::engine::run_consensus;
use ftcp::error::Error;
use ftcp::synth::negative_gain_bound;

fn main() -> ftcp::error::Result<()> {
    let base = ConsensusInstance::new(
        vec![1000.0, 2000.0, -5000.0, 4000.0, 6000.0],
        vec![20.0, 40.0, 30.0, 15.0, 25.0],
    )?;
    let k = 4;
    let bound = negative_gain_bound(base.gains(), k)?;
    println!("threshold for agent {}: w > {bound}", k + 1);

    for w in [-10.0, -14.0, -14.9, -15.1, -16.0, -20.0] {
        let mut gains = base.gains().to_vec();
        gains[k] = w;
        match run_consensus(&base.with_gains(gains)?) {
            Ok(out) => println!(
                "w5 = {w:>6}: consensus at t = {:.3}, X = {:.3}",
                out.t_f, out.x_f
            ),
            Err(Error::Diverged(d)) => println!(
                "w5 = {w:>6}: no consensus ({:?}, spread {:.1} at t = {:.1})",
                d.reason, d.final_spread, d.time
            ),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
