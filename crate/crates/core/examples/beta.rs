//! Both companion-matrix case studies, with truncation traces.
//!
//! `cargo run --release --example beta`

use sofic::beta::{case_study_2_11, case_study_2_12};
use sofic::systems;

fn main() -> sofic::Result<()> {
    let planar = case_study_2_11(&systems::ex2_11(), 12)?;
    println!(
        "ex2_11: beta = {:.12}, log2 beta = {:.12}",
        planar.beta, planar.dimension
    );
    println!("  truncation trace {:?}", planar.solution.trace);
    println!(
        "  oracle gap {:.2e}, monotone {}, companion radius {:.12}",
        planar.max_oracle_gap, planar.monotone, planar.companion_radius
    );
    println!(
        "  beta without the a_1 exponent: {:.9}",
        planar.beta_without_exponent
    );
    println!(
        "  hausdorff estimate {:.9} (gap {:.2e})",
        planar.hausdorff_estimate, planar.hausdorff_gap
    );

    let spatial = case_study_2_12(&systems::ex2_12(), 12)?;
    println!(
        "ex2_12: beta = {:.12}, log3(beta + 1) = {:.12}",
        spatial.beta, spatial.dimension
    );
    println!("  b_1.. = {:?}", spatial.leading_coefficients);
    println!(
        "  identities {}, recursion gap {:.2e}, truncated radius {:.9}",
        spatial.identities_hold, spatial.recursion_gap, spatial.truncated_radius
    );
    println!(
        "  without the fixed-ray term: beta = {:.9}, dimension {:.9}",
        spatial.beta_without_fixed_term, spatial.dimension_without_fixed_term
    );
    println!(
        "  hausdorff estimate {:.9} (gap {:.2e})",
        spatial.hausdorff_estimate, spatial.hausdorff_gap
    );
    Ok(())
}
