//! Perron data, factor entropies, Minkowski dimensions and uniform-complexity
//! certificates for the bundled systems.
//!
//! `cargo run --release --example spectral`

use sofic::spectral::{
    conjecture_probe, entropy_level, minkowski_dimension, shared_eigenvector_dimension,
    uniform_complexity_check,
};
use sofic::systems;

fn main() -> sofic::Result<()> {
    for (name, g) in systems::named() {
        let m = minkowski_dimension(&g)?;
        println!(
            "{name}: minkowski {:.12}, rho(A) = {:.6}",
            m.dimension, m.radius
        );
        for level in 1..=g.dim() {
            let h = entropy_level(&g, level)?;
            println!(
                "  h_{level} = {:.12} (growth check {:.6}, consistent {})",
                h.entropy, h.growth_check, h.consistent
            );
        }
        if g.dim() != 2 {
            continue;
        }
        let cert = uniform_complexity_check(&g)?;
        println!(
            "  uniform complexity: {:?} on {:?}, lambda {:?}, vector {:?}",
            cert.verdict, cert.side, cert.eigenvalue, cert.vector
        );
        match shared_eigenvector_dimension(&g) {
            Ok(s) => println!("  shared-vector formula: {:.12}", s.dimension),
            Err(e) => println!("  shared-vector formula: {e}"),
        }
        let p = conjecture_probe(&g, 12)?;
        println!(
            "  probe: minkowski - hausdorff = {:.3e} (+- {:.1e})",
            p.gap, p.hausdorff_uncertainty
        );
    }
    Ok(())
}
