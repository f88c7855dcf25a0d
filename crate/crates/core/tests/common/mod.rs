#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigUint;
use sofic::hausdorff::{nested_sums, EnumerationConfig};
use sofic::symbolic::{count_words, determinize, fiber_count_with, legal_words};
use sofic::{Bases, Edge, FiberMode, LabeledDigraph, NonnegMatrix};

pub fn single_vertex(bases: &[u32], labels: &[&[u32]]) -> LabeledDigraph {
    let edges = labels
        .iter()
        .map(|l| Edge {
            from: 0,
            to: 0,
            label: l.to_vec(),
        })
        .collect();
    LabeledDigraph::new(Bases::new(bases.to_vec()).unwrap(), 1, edges).unwrap()
}

pub fn full_shift(bases: &[u32]) -> LabeledDigraph {
    let mut labels: Vec<Vec<u32>> = vec![vec![]];
    for &m in bases {
        labels = labels
            .into_iter()
            .flat_map(|l| {
                (0..m).map(move |d| {
                    let mut l = l.clone();
                    l.push(d);
                    l
                })
            })
            .collect();
    }
    let refs: Vec<&[u32]> = labels.iter().map(Vec::as_slice).collect();
    single_vertex(bases, &refs)
}

pub fn mcmullen() -> LabeledDigraph {
    single_vertex(&[2, 3], &[&[0, 0], &[1, 0], &[1, 1]])
}

/// Every label word of every length-`k` path, truncated to `level` digits.
pub fn path_words(g: &LabeledDigraph, level: usize, k: usize) -> BTreeSet<Vec<Vec<u32>>> {
    fn walk(
        g: &LabeledDigraph,
        v: usize,
        level: usize,
        k: usize,
        word: &mut Vec<Vec<u32>>,
        out: &mut BTreeSet<Vec<Vec<u32>>>,
    ) {
        if word.len() == k {
            out.insert(word.clone());
            return;
        }
        for e in g.edges().iter().filter(|e| e.from == v) {
            word.push(e.label[..level].to_vec());
            walk(g, e.to, level, k, word, out);
            word.pop();
        }
    }
    let mut out = BTreeSet::new();
    for v in 0..g.vertex_count() {
        walk(g, v, level, k, &mut Vec::new(), &mut out);
    }
    out
}

/// `ln g_N` straight from the definition, with words taken from explicit path
/// enumeration of the pruned graph.
pub fn brute_nested_log(g: &LabeledDigraph, n: usize, mode: FiberMode) -> f64 {
    let g = g.forward_prune();
    let r = g.dim();
    let exps = g.bases().exponents();
    let top = path_words(&g, r, n);
    let family = g.restricted_family();
    let bases = g.bases().clone();
    let inner = |s: &[Vec<u32>]| -> f64 {
        match mode {
            FiberMode::ExactFibers => top
                .iter()
                .filter(|w| w.iter().zip(s).all(|(a, b)| &a[..r - 1] == b.as_slice()))
                .count() as f64,
            FiberMode::NormSurrogate => {
                let mut m = NonnegMatrix::identity(g.vertex_count());
                for d in s {
                    m = m.product(&family[bases.encode(d) as usize]);
                }
                m.entry_sum()
            }
        }
    };
    // Value of a level-`i` word: inner fiber term for i = r-1, otherwise the
    // sum over its level-(i+1) extensions raised to a_{i}.
    fn value(
        words: &[BTreeSet<Vec<Vec<u32>>>],
        i: usize,
        s: &[Vec<u32>],
        exps: &[f64],
        inner: &dyn Fn(&[Vec<u32>]) -> f64,
    ) -> f64 {
        let r1 = words.len();
        if i == r1 {
            return inner(s);
        }
        words[i]
            .iter()
            .filter(|w| w.iter().zip(s).all(|(a, b)| &a[..i] == b.as_slice()))
            .map(|w| value(words, i + 1, w, exps, inner).powf(exps[i]))
            .sum()
    }
    let words: Vec<_> = (1..r).map(|i| path_words(&g, i, n)).collect();
    words[0]
        .iter()
        .map(|s| value(&words, 1, s, &exps, &inner).powf(exps[0]))
        .sum::<f64>()
        .ln()
}

pub fn counts(g: &LabeledDigraph, level: usize, k_max: usize) -> Vec<BigUint> {
    let aut = determinize(&g.forward_prune(), level).unwrap();
    (1..=k_max).map(|k| count_words(&aut, k)).collect()
}

fn big(x: f64) -> BigUint {
    BigUint::from(x as u128)
}

/// `sum_s |p^{-1}(s)| = N_i(k)` for every level `i >= 2`.
pub fn fiber_partition(g: &LabeledDigraph, k: usize) -> Result<(), String> {
    let g = g.forward_prune();
    for i in 2..=g.dim() {
        let lower = determinize(&g, i - 1).unwrap();
        let upper = determinize(&g, i).unwrap();
        let words = legal_words(&lower, k, 20_000_000).map_err(|e| e.to_string())?;
        let total: BigUint = words
            .iter()
            .map(|s| fiber_count_with(&upper, s).unwrap())
            .sum();
        if total != count_words(&upper, k) {
            return Err(format!("level {i}, k = {k}: fibers sum to {total}"));
        }
    }
    Ok(())
}

/// `||A_s|| / |V| <= |p^{-1}(s)| <= ||A_s||` for level-(r-1) words `s`.
pub fn surrogate_sandwich(g: &LabeledDigraph, k: usize) -> Result<(), String> {
    let g = g.forward_prune();
    let r = g.dim();
    if r < 2 {
        return Ok(());
    }
    let n = g.vertex_count() as f64;
    let lower = determinize(&g, r - 1).unwrap();
    let upper = determinize(&g, r).unwrap();
    let family = g.restricted_family();
    for s in legal_words(&lower, k, 20_000_000).map_err(|e| e.to_string())? {
        let mut m = NonnegMatrix::identity(g.vertex_count());
        for &c in &s.symbols {
            m = m.product(&family[c as usize]);
        }
        let norm = m.entry_sum();
        let f = fiber_count_with(&upper, &s).unwrap();
        if !(BigUint::from(norm as u128) >= f && f.clone() * BigUint::from(n as u64) >= big(norm)) {
            return Err(format!("word {:?}: norm {norm}, fiber {f}", s.symbols));
        }
    }
    Ok(())
}

/// `N_{i-1}(k) <= N_i(k)`.
pub fn projection_monotone(g: &LabeledDigraph, k_max: usize) -> Result<(), String> {
    let per_level: Vec<_> = (1..=g.dim()).map(|i| counts(g, i, k_max)).collect();
    for (i, pair) in per_level.windows(2).enumerate() {
        if let Some(k) = (0..k_max).find(|&k| pair[0][k] > pair[1][k]) {
            return Err(format!(
                "level {} exceeds level {} at k = {}",
                i + 1,
                i + 2,
                k + 1
            ));
        }
    }
    Ok(())
}

/// `||A^k|| / |V| <= N_r(k) <= ||A^k||`.
pub fn right_resolving_sandwich(g: &LabeledDigraph, k_max: usize) -> Result<(), String> {
    let p = g.forward_prune();
    let a = p.total_adjacency();
    let n = BigUint::from(p.vertex_count());
    let nr = counts(&p, p.dim(), k_max);
    let mut power = NonnegMatrix::identity(p.vertex_count());
    for k in 1..=k_max {
        power = power.product(&a);
        let paths = big(power.entry_sum());
        let words = &nr[k - 1];
        if !(words <= &paths && words * &n >= paths) {
            return Err(format!("k = {k}: {words} words, {paths} paths"));
        }
    }
    Ok(())
}

/// Vertex relabelings leave word counts unchanged and nested sums equal to 1e-12.
pub fn permutation_invariance(g: &LabeledDigraph, n_max: usize) -> Result<(), String> {
    let v = g.vertex_count();
    let reversed: Vec<usize> = (0..v).rev().collect();
    let rotated: Vec<usize> = (0..v).map(|i| (i + 1) % v).collect();
    let config = EnumerationConfig::default();
    for perm in [reversed, rotated] {
        let h = g.relabel(&perm).map_err(|e| e.to_string())?;
        for i in 1..=g.dim() {
            if counts(g, i, n_max) != counts(&h, i, n_max) {
                return Err(format!("level-{i} counts change under {perm:?}"));
            }
        }
        for mode in [FiberMode::ExactFibers, FiberMode::NormSurrogate] {
            let (a, _) = nested_sums(g, n_max, mode, config).map_err(|e| e.to_string())?;
            let (b, _) = nested_sums(&h, n_max, mode, config).map_err(|e| e.to_string())?;
            for (n, (x, y)) in a.iter().zip(&b).enumerate() {
                if (x - y).abs() > 1e-12 * x.abs().max(1.0) {
                    return Err(format!("{mode:?} ln g_{} moves from {x} to {y}", n + 1));
                }
            }
        }
    }
    Ok(())
}

/// All five property checks for `k, N <= k_max`.
pub fn all_properties(g: &LabeledDigraph, k_max: usize) -> Result<(), String> {
    for k in 1..=k_max {
        fiber_partition(g, k).map_err(|e| format!("fiber partition: {e}"))?;
        surrogate_sandwich(g, k).map_err(|e| format!("surrogate sandwich: {e}"))?;
    }
    projection_monotone(g, k_max).map_err(|e| format!("projection monotonicity: {e}"))?;
    right_resolving_sandwich(g, k_max).map_err(|e| format!("right-resolving sandwich: {e}"))?;
    permutation_invariance(g, k_max).map_err(|e| format!("permutation invariance: {e}"))?;
    Ok(())
}
