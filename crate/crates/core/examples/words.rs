//! Projected shifts: subset automata, word counts `N_i(k)` and fiber sizes.
//!
//! `cargo run --example words`

use sofic::symbolic::{count_words, determinize, fiber_count_with, legal_words};
use sofic::systems;

fn main() -> sofic::Result<()> {
    let g = systems::fig2();
    for level in 1..=g.dim() {
        let aut = determinize(&g, level)?;
        let counts: Vec<String> = (1..=8).map(|k| count_words(&aut, k).to_string()).collect();
        println!(
            "level {level}: {} subset states ({} essential), N(1..8) = {}",
            aut.state_count(),
            aut.essential_states().len(),
            counts.join(" ")
        );
    }
    let lower = determinize(&g, 1)?;
    let upper = determinize(&g, 2)?;
    for s in legal_words(&lower, 3, 1_000)? {
        println!(
            "fiber over {:?}: {}",
            s.symbols,
            fiber_count_with(&upper, &s)?
        );
    }
    Ok(())
}
