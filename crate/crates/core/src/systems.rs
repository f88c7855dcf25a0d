//! The checked-in reference systems under `systems/`.

use crate::model::{parse_spec, LabeledDigraph};

pub const FIG2: &str = include_str!("../systems/fig2.json");
pub const FIG4: &str = include_str!("../systems/fig4.json");
pub const EX2_11: &str = include_str!("../systems/ex2_11.json");
pub const EX2_12: &str = include_str!("../systems/ex2_12.json");

/// Planar system with `A_0 = [[2,1],[0,0]]`, `A_1 = [[0,1],[4,0]]`, bases `[2, 5]`.
pub fn fig2() -> LabeledDigraph {
    parse_spec(FIG2).expect("fig2 is valid")
}

/// Planar system with `A_0 = [[2,2],[1,1]]`, `A_1 = [[0,2],[3,1]]`, bases `[2, 5]`.
pub fn fig4() -> LabeledDigraph {
    parse_spec(FIG4).expect("fig4 is valid")
}

/// Spatial system over bases `[2, 3, 4]` whose dimension is `log_2 beta` for
/// the infinite companion-matrix radius `beta`.
pub fn ex2_11() -> LabeledDigraph {
    parse_spec(EX2_11).expect("ex2_11 is valid")
}

/// Spatial system over bases `[3, 4, 5]` whose dimension is `log_3 (beta + 1)`.
pub fn ex2_12() -> LabeledDigraph {
    parse_spec(EX2_12).expect("ex2_12 is valid")
}

pub fn all() -> Vec<LabeledDigraph> {
    vec![fig2(), fig4(), ex2_11(), ex2_12()]
}

pub fn named() -> Vec<(&'static str, LabeledDigraph)> {
    vec![
        ("fig2", fig2()),
        ("fig4", fig4()),
        ("ex2_11", ex2_11()),
        ("ex2_12", ex2_12()),
    ]
}

/// Look a system up by its file stem.
pub fn by_name(name: &str) -> Option<LabeledDigraph> {
    named()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, g)| g)
}
