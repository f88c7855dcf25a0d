//! Hausdorff dimension estimates for the bundled systems.
//!
//! `cargo run --release --example hausdorff -- [N_max]`

use std::time::Instant;

use sofic::hausdorff::{accelerated_dimension_estimate, dimension_estimate, FiberMode};
use sofic::systems;

fn main() -> sofic::Result<()> {
    let n_max: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(12);
    for (name, g) in systems::named() {
        for mode in [FiberMode::ExactFibers, FiberMode::NormSurrogate] {
            let t = Instant::now();
            let est = dimension_estimate(&g, n_max, mode)?;
            println!(
                "{name:7} {mode:?}: d = {:.9} +- {:.2e}  nodes {:?}  ({:.2?})",
                est.estimate,
                est.uncertainty,
                est.level_nodes,
                t.elapsed()
            );
        }
        if (2..=3).contains(&g.dim()) {
            let t = Instant::now();
            let est = accelerated_dimension_estimate(&g, 4 * n_max)?;
            println!(
                "{name:7} grouped at N = {}: d = {:.12}  ({:.2?})",
                4 * n_max,
                est.estimate,
                t.elapsed()
            );
        }
    }
    Ok(())
}
