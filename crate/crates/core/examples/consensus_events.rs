//! Exact event-driven run of a five-agent cycle.
//!
//! $ cargo run --example consensus_events

use ftcp::agents::ConsensusInstance;
use ftcp::engine::{consensus_time_upper_bound, run_consensus};

fn main() -> ftcp::error::Result<()> {
    let instance = ConsensusInstance::new(
        vec![1000.0, 2000.0, -5000.0, 4000.0, 6000.0],
        vec![20.0, 40.0, 30.0, 15.0, 25.0],
    )?;
    let out = run_consensus(&instance)?;

    println!(
        "{:>10} {:>12} {:>9} {:>9}  kind",
        "t", "value", "follower", "leader"
    );
    for e in &out.events {
        println!(
            "{:>10.4} {:>12.4} {:>9} {:>9}  {:?}",
            e.time,
            e.value,
            e.follower + 1,
            e.leader + 1,
            e.kind
        );
    }
    println!();
    println!("t_f = {:.6}  X_f = {:.6}", out.t_f, out.x_f);
    println!("t_c bound = {:.6}", consensus_time_upper_bound(&instance)?);
    println!(
        "batches = {} (merge batches {})",
        out.iterations, out.merge_iterations
    );

    // States are piecewise linear between events.
    let mid = out.state_at(0.5 * out.t_f);
    println!("x(t_f/2) = {mid:.3?}");
    Ok(())
}
