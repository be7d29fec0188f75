//! Cross-check the event engine against a smoothed Euler integration.
//!
//! $ cargo run --release --example oracle_comparison

use ftcp::agents::ConsensusInstance;
use ftcp::oracle::{compare_with_engine, integrate, random_instance, OracleConfig};
use rand::{Rng, SeedableRng};

fn main() -> ftcp::error::Result<()> {
    let instance = ConsensusInstance::new(
        vec![1000.0, 2000.0, -5000.0, 4000.0, 6000.0],
        vec![20.0, 40.0, 30.0, 15.0, 25.0],
    )?;
    let base = OracleConfig::for_instance(&instance)?;
    println!("{:>10} {:>12} {:>14}", "dt", "t_f", "X_f");
    for div in [1.0, 2.0, 4.0] {
        let cfg = OracleConfig {
            dt: base.dt / div,
            boundary_layer: base.boundary_layer / div,
            ..base
        };
        if let Some((t, x)) = integrate(&instance, &cfg)?.estimate() {
            println!("{:>10.4} {t:>12.4} {x:>14.6}", cfg.dt);
        }
    }
    let c = compare_with_engine(&instance, &base)?;
    println!(
        "engine: t_f = {:.4}, X_f = {:.6}  agree = {}",
        c.engine_t_f, c.engine_x_f, c.agree
    );

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut agreed = 0;
    let total = 200;
    for _ in 0..total {
        let n = rng.gen_range(3..=8);
        let inst = random_instance(&mut rng, n)?;
        if compare_with_engine(&inst, &OracleConfig::for_instance(&inst)?)?.agree {
            agreed += 1;
        }
    }
    println!("random instances: {agreed}/{total} agree");
    Ok(())
}
