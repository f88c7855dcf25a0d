//! Approximate-square counts `M(k)` against the Minkowski dimension.
//!
//! `cargo run --release --example boxcount -- [k_max]`

use sofic::render::{box_count_series, square_count_bounds};
use sofic::spectral::minkowski_dimension;
use sofic::systems;

fn main() -> sofic::Result<()> {
    let k_max: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(24);
    for (name, g) in systems::named() {
        let target = minkowski_dimension(&g)?.dimension;
        let series = box_count_series(&g, k_max)?;
        let last = series.last().expect("k_max >= 1");
        let bounds = square_count_bounds(&g, k_max)?;
        println!(
            "{name:7} minkowski {target:.6}  (1/k) log M(k) at k = {}: {:.6}  bounds hold: {}",
            last.k,
            last.estimate,
            bounds.holds()
        );
    }
    Ok(())
}
