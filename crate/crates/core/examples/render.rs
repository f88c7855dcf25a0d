//! Depth-k approximations: a PGM raster of a planar system and a voxel list
//! of a spatial one, written to the system temp directory.
//!
//! `cargo run --release --example render -- [depth]`

use sofic::render::{raster_2d, voxel_export};
use sofic::systems;

fn main() -> sofic::Result<()> {
    let k: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(5);
    let dir = std::env::temp_dir();

    let raster = raster_2d(&systems::fig4(), k, 800, 800)?;
    let pgm = dir.join("fig4.pgm");
    std::fs::write(&pgm, raster.to_pgm())?;
    println!(
        "{}: {} of {} pixels set",
        pgm.display(),
        raster.set_count(),
        raster.pixels.len()
    );

    let csv = voxel_export(&systems::ex2_12(), k.min(3))?;
    let path = dir.join("ex2_12.csv");
    std::fs::write(&path, &csv)?;
    println!("{}: {} boxes", path.display(), csv.lines().count() - 1);
    Ok(())
}
