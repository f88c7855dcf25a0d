//! Load a system document, report its shape and what pruning removes.
//!
//! `cargo run --example validate -- [path.json]`

use sofic::{parse_spec, systems};

fn main() -> sofic::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => systems::FIG2.to_string(),
    };
    let g = parse_spec(&text)?;
    let pruned = g.forward_prune();
    println!("bases {:?}, r = {}", g.bases().as_slice(), g.dim());
    println!(
        "{} vertices, {} edges; {} vertices survive pruning",
        g.vertex_count(),
        g.edges().len(),
        pruned.vertex_count()
    );
    let a = pruned.total_adjacency();
    println!("total adjacency\n{a}");
    match a.primitivity_exponent() {
        Some(k) => println!("primitive: A^{k} > 0"),
        None => println!("not primitive"),
    }
    for (s, m) in pruned.restricted_family().iter().enumerate() {
        if !m.is_zero() {
            println!("A_{:?} =\n{m}", g.bases().decode(g.dim() - 1, s as u32));
        }
    }

    let duplicate = r#"{"bases": [2, 2], "vertices": 1, "edges": [
        {"from": 0, "to": 0, "label": [1, 0]},
        {"from": 0, "to": 0, "label": [1, 0]}]}"#;
    if let Err(e) = parse_spec(duplicate) {
        println!("rejected: {e}");
    }
    Ok(())
}
