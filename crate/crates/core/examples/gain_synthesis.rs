//! Pick gains that bring LOS rates to zero at exactly 20 s, then check the
//! choice with the event engine.
//!
//! $ cargo run --example gain_synthesis

use ftcp::agents::ConsensusInstance;
use ftcp::engine::run_consensus;
use ftcp::synth::{partition, reachable_set, synthesize, SynthesisRequest};

fn main() -> ftcp::error::Result<()> {
    let rates = vec![-2.6262e-2, 2.5058e-2, 2.4168e-2, 1.8856e-2, 2.3094e-2];
    let window = reachable_set(std::slice::from_ref(&rates))[0];
    println!(
        "reachable consensus values: ({:.4e}, {:.4e})",
        window.lower, window.upper
    );

    let part = partition(&rates)?;
    println!("max agent {}, min agent {}", part.i_max + 1, part.j_min + 1);

    for margin in [1.2, 1.5, 3.0] {
        let req = SynthesisRequest::new(rates.clone(), 0.0, 20.0).with_margin(margin);
        let gains = synthesize(&req)?;
        let out = run_consensus(&ConsensusInstance::new(rates.clone(), gains.clone())?)?;
        println!(
            "margin {margin}: w = [{}]  ->  t_f = {:.12}, X_f = {:.1e}, reversals {}",
            gains
                .iter()
                .map(|w| format!("{w:.4e}"))
                .collect::<Vec<_>>()
                .join(", "),
            out.t_f,
            out.x_f,
            out.sign_reversals()
        );
    }

    // A target on the edge of the window has no solution.
    let edge = SynthesisRequest::new(rates.clone(), window.upper, 20.0);
    println!("X_f = max: {}", synthesize(&edge).unwrap_err());
    Ok(())
}
