//! Nested weighted word sums and the Hausdorff-dimension estimates built on
//! them.
//!
//! For bases `m_1 <= ... <= m_r` with exponents `a_i = log m_i / log m_{i+1}`,
//!
//! ```text
//! g_N = sum_{s_1} ( sum_{s_2 over s_1} ( ... ( sum_{s_{r-1}} F(s_{r-1})^{a_{r-1}} )^{a_{r-2}} ... )^{a_2} )^{a_1}
//! ```
//!
//! where `s_i` ranges over legal level-`i` words of length `N` projecting onto
//! the enclosing `s_{i-1}` and `F` is either the exact fiber count or the
//! sum-of-entries norm of the restricted adjacency product. The dimension is
//! `lim (1/N) log_{m_1} g_N`.
//!
//! The enumeration walks level-1 prefixes depth first. Each level-1 prefix
//! carries the forest of all legal deeper-level prefixes lying over it, so a
//! single walk to depth `N_max` yields `g_1, ..., g_{N_max}`. The walk is
//! split into shards at a depth fixed by the system alone; shard results are
//! reduced in shard order, which keeps results identical for any thread count.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::logsum::{log_add, LogSum};
use crate::model::{LabeledDigraph, NonnegMatrix};
use crate::symbolic::{count_words, determinize, ScaledRow, SubsetAutomaton};

pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;
pub const DEFAULT_CLASS_BUDGET: usize = 1_000_000;

/// How the innermost fiber cardinality is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiberMode {
    /// Exact count of level-`r` words over the level-`(r-1)` word.
    ExactFibers,
    /// Sum of entries of the restricted adjacency product.
    NormSurrogate,
}

impl std::str::FromStr for FiberMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-fibers" => Ok(FiberMode::ExactFibers),
            "surrogate" | "norm-surrogate" => Ok(FiberMode::NormSurrogate),
            other => Err(Error::Unsupported(format!("unknown fiber mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerationConfig {
    /// Maximum number of prefix nodes created over the whole walk.
    pub node_budget: u64,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NestedSumResult {
    pub n: usize,
    /// Natural log of `g_N`.
    pub log_g: f64,
    pub mode: FiberMode,
    /// Prefix nodes created per level (index 0 is level 1) during the walk.
    pub level_nodes: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub mode: FiberMode,
    /// `ln g_N` for `N = 1..=N_max`.
    pub log_g: Vec<f64>,
    /// `e_N = ln g_N / (N ln m_1)` for `N = 1..=N_max`.
    pub ratio_sequence: Vec<f64>,
    /// `d_N = ln(g_{N+1} / g_N) / ln m_1` for `N = 1..N_max`.
    pub quotient_sequence: Vec<f64>,
    pub estimate: f64,
    /// `|e_{N_max} - d_{N_max - 1}|`.
    pub uncertainty: f64,
    pub level_nodes: Vec<u64>,
}

impl DimensionEstimate {
    fn from_log_g(log_g: Vec<f64>, log_m1: f64, mode: FiberMode, level_nodes: Vec<u64>) -> Self {
        let ratio_sequence: Vec<f64> = log_g
            .iter()
            .enumerate()
            .map(|(i, &l)| l / ((i + 1) as f64 * log_m1))
            .collect();
        let quotient_sequence: Vec<f64> =
            log_g.windows(2).map(|w| (w[1] - w[0]) / log_m1).collect();
        let estimate = *quotient_sequence.last().expect("N_max >= 2");
        let uncertainty = (ratio_sequence.last().unwrap() - estimate).abs();
        DimensionEstimate {
            mode,
            log_g,
            ratio_sequence,
            quotient_sequence,
            estimate,
            uncertainty,
            level_nodes,
        }
    }
}

/// Natural log of a big integer.
pub fn big_ln(x: &BigUint) -> f64 {
    use num_traits::ToPrimitive;
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Innermost fiber state for one level-`(r-1)` prefix.
#[derive(Clone, Debug)]
enum Leaf {
    /// Word counts per level-`r` automaton state.
    Exact(Vec<(u32, u128)>),
    Surrogate(ScaledRow),
}

/// A legal prefix at some level together with all legal deeper prefixes over it.
#[derive(Clone, Debug)]
enum Node {
    Branch(Vec<Node>),
    Leaf(Leaf),
}

struct Engine {
    r: usize,
    bases: Vec<u32>,
    exps: Vec<f64>,
    mode: FiberMode,
    automaton: Option<SubsetAutomaton>,
    family: Vec<NonnegMatrix>,
    n: usize,
    budget: u64,
    used: AtomicU64,
}

/// Per-walk counters, flushed into the shared budget in batches.
struct Tally {
    per_level: Vec<u64>,
    pending: u64,
}

const FLUSH: u64 = 1 << 14;

impl Engine {
    fn new(g: &LabeledDigraph, mode: FiberMode, config: EnumerationConfig) -> Result<Engine> {
        if g.is_empty() {
            return Err(Error::EmptySystem);
        }
        let r = g.dim();
        let automaton = match mode {
            FiberMode::ExactFibers => Some(determinize(g, r)?),
            FiberMode::NormSurrogate => None,
        };
        let family = match mode {
            FiberMode::NormSurrogate if r >= 2 => g.restricted_family(),
            _ => Vec::new(),
        };
        Ok(Engine {
            r,
            bases: g.bases().as_slice().to_vec(),
            exps: g.bases().exponents(),
            mode,
            automaton,
            family,
            n: g.vertex_count(),
            budget: config.node_budget,
            used: AtomicU64::new(0),
        })
    }

    fn tally(&self) -> Tally {
        Tally {
            per_level: vec![0; self.r.saturating_sub(1)],
            pending: 0,
        }
    }

    fn count(&self, tally: &mut Tally, level: usize) -> Result<()> {
        tally.per_level[level - 1] += 1;
        tally.pending += 1;
        if tally.pending >= FLUSH {
            self.flush(tally)?;
        }
        Ok(())
    }

    fn flush(&self, tally: &mut Tally) -> Result<()> {
        let total = self.used.fetch_add(tally.pending, Ordering::Relaxed) + tally.pending;
        tally.pending = 0;
        if total > self.budget {
            return Err(Error::Budget(format!(
                "nested-sum enumeration exceeded {} prefix nodes",
                self.budget
            )));
        }
        Ok(())
    }

    fn root(&self) -> Node {
        let leaf = match self.mode {
            FiberMode::ExactFibers => Leaf::Exact(vec![(0, 1)]),
            FiberMode::NormSurrogate => Leaf::Surrogate(ScaledRow::ones(self.n)),
        };
        let mut node = Node::Leaf(leaf);
        for _ in 1..self.r - 1 {
            node = Node::Branch(vec![node]);
        }
        node
    }

    fn extend_leaf(&self, leaf: &Leaf, symbol: u32) -> Result<Option<Leaf>> {
        match leaf {
            Leaf::Exact(counts) => {
                let aut = self
                    .automaton
                    .as_ref()
                    .expect("exact mode has an automaton");
                let mut moved: Vec<(u32, u128)> = Vec::new();
                for &(state, c) in counts {
                    moved.extend(
                        aut.moves_extending(state, symbol)
                            .iter()
                            .map(|&(_, t)| (t, c)),
                    );
                }
                if moved.is_empty() {
                    return Ok(None);
                }
                moved.sort_unstable_by_key(|&(t, _)| t);
                let mut next: Vec<(u32, u128)> = Vec::with_capacity(moved.len());
                for (t, c) in moved {
                    match next.last_mut() {
                        Some(last) if last.0 == t => {
                            last.1 = last
                                .1
                                .checked_add(c)
                                .ok_or(Error::Overflow("exact fiber count"))?;
                        }
                        _ => next.push((t, c)),
                    }
                }
                Ok(Some(Leaf::Exact(next)))
            }
            Leaf::Surrogate(row) => {
                if self.family[symbol as usize].is_zero() {
                    return Ok(None);
                }
                let next = row.apply(&self.family[symbol as usize]);
                Ok((!next.is_zero()).then_some(Leaf::Surrogate(next)))
            }
        }
    }

    /// Append `symbol` (a level-`level` code) to the prefix held by `node`.
    fn extend(
        &self,
        node: &Node,
        level: usize,
        symbol: u32,
        tally: &mut Tally,
    ) -> Result<Option<Node>> {
        let out = match node {
            Node::Leaf(leaf) => self.extend_leaf(leaf, symbol)?.map(Node::Leaf),
            Node::Branch(children) => {
                let m = self.bases[level];
                let mut next = Vec::new();
                for child in children {
                    for d in 0..m {
                        if let Some(c) = self.extend(child, level + 1, symbol * m + d, tally)? {
                            next.push(c);
                        }
                    }
                }
                (!next.is_empty()).then_some(Node::Branch(next))
            }
        };
        if out.is_some() {
            self.count(tally, level)?;
        }
        Ok(out)
    }

    /// `ln I(node)` for a node at `level`.
    fn value(&self, node: &Node, level: usize) -> f64 {
        match node {
            Node::Leaf(Leaf::Exact(counts)) => {
                let total: u128 = counts.iter().map(|&(_, c)| c).sum();
                (total as f64).ln()
            }
            Node::Leaf(Leaf::Surrogate(row)) => row.log_sum(),
            Node::Branch(children) => {
                let a = self.exps[level];
                if let [only] = children.as_slice() {
                    return a * self.value(only, level + 1);
                }
                let mut acc = LogSum::new();
                for c in children {
                    acc.push(a * self.value(c, level + 1));
                }
                acc.total()
            }
        }
    }

    /// Depth-first walk below `node` (a level-1 prefix of length `depth`),
    /// pushing `a_1 ln I` of every prefix of length `k` into `acc[k]`.
    fn walk(
        &self,
        node: &Node,
        depth: usize,
        n_max: usize,
        acc: &mut [LogSum],
        tally: &mut Tally,
    ) -> Result<()> {
        if depth == n_max {
            return Ok(());
        }
        for u in 0..self.bases[0] {
            if let Some(child) = self.extend(node, 1, u, tally)? {
                acc[depth + 1].push(self.exps[0] * self.value(&child, 1));
                self.walk(&child, depth + 1, n_max, acc, tally)?;
            }
        }
        Ok(())
    }

    /// Collect level-1 prefixes of length `depth` in walk order while pushing
    /// the values of all shorter prefixes.
    fn top(
        &self,
        node: Node,
        depth: usize,
        stop: usize,
        acc: &mut [LogSum],
        shards: &mut Vec<Node>,
        tally: &mut Tally,
    ) -> Result<()> {
        if depth == stop {
            shards.push(node);
            return Ok(());
        }
        for u in 0..self.bases[0] {
            if let Some(child) = self.extend(&node, 1, u, tally)? {
                acc[depth + 1].push(self.exps[0] * self.value(&child, 1));
                self.top(child, depth + 1, stop, acc, shards, tally)?;
            }
        }
        Ok(())
    }
}

/// Shard depth: the first length at which the level-1 shift has at least 64
/// words, capped at 10. Depends on the system only.
fn shard_depth(g: &LabeledDigraph) -> Result<usize> {
    let aut = determinize(g, 1)?;
    for k in 1..=10 {
        if count_words(&aut, k) >= BigUint::from(64u32) {
            return Ok(k);
        }
    }
    Ok(10)
}

/// `ln g_N` for `N = 1..=n_max` together with per-level node counts.
pub fn nested_sums(
    g: &LabeledDigraph,
    n_max: usize,
    mode: FiberMode,
    config: EnumerationConfig,
) -> Result<(Vec<f64>, Vec<u64>)> {
    let g = g.forward_prune();
    if g.is_empty() {
        return Err(Error::EmptySystem);
    }
    if n_max == 0 {
        return Err(Error::Unsupported("word length must be at least 1".into()));
    }
    if g.dim() == 1 {
        // No exponents: g_N is the bare word count N_1(N).
        let aut = determinize(&g, 1)?;
        let logs = (1..=n_max).map(|k| big_ln(&count_words(&aut, k))).collect();
        return Ok((logs, Vec::new()));
    }
    let engine = Engine::new(&g, mode, config)?;
    let depth = shard_depth(&g)?;
    let stop = depth.min(n_max);

    let mut acc: Vec<LogSum> = vec![LogSum::new(); n_max + 1];
    let mut shards = Vec::new();
    let mut tally = engine.tally();
    engine.top(engine.root(), 0, stop, &mut acc, &mut shards, &mut tally)?;
    engine.flush(&mut tally)?;
    let mut level_nodes = tally.per_level.clone();

    if n_max > stop {
        let results: Vec<Result<(Vec<LogSum>, Vec<u64>)>> = shards
            .par_iter()
            .map(|root| {
                let mut local = vec![LogSum::new(); n_max + 1];
                let mut tally = engine.tally();
                engine.walk(root, stop, n_max, &mut local, &mut tally)?;
                engine.flush(&mut tally)?;
                Ok((local, tally.per_level))
            })
            .collect();
        for res in results {
            let (local, per_level) = res?;
            for k in stop + 1..=n_max {
                acc[k].push_sum(&local[k]);
            }
            for (total, x) in level_nodes.iter_mut().zip(per_level) {
                *total += x;
            }
        }
    }
    let logs = acc[1..].iter().map(LogSum::total).collect();
    Ok((logs, level_nodes))
}

/// `g_N` for a single word length.
pub fn nested_sum(g: &LabeledDigraph, n: usize, mode: FiberMode) -> Result<NestedSumResult> {
    nested_sum_with(g, n, mode, EnumerationConfig::default())
}

pub fn nested_sum_with(
    g: &LabeledDigraph,
    n: usize,
    mode: FiberMode,
    config: EnumerationConfig,
) -> Result<NestedSumResult> {
    let (logs, level_nodes) = nested_sums(g, n, mode, config)?;
    Ok(NestedSumResult {
        n,
        log_g: *logs.last().expect("n >= 1"),
        mode,
        level_nodes,
    })
}

/// Ratio and difference-quotient sequences up to `n_max`; the point estimate
/// is `d_{N_max - 1}`.
pub fn dimension_estimate(
    g: &LabeledDigraph,
    n_max: usize,
    mode: FiberMode,
) -> Result<DimensionEstimate> {
    dimension_estimate_with(g, n_max, mode, EnumerationConfig::default())
}

pub fn dimension_estimate_with(
    g: &LabeledDigraph,
    n_max: usize,
    mode: FiberMode,
    config: EnumerationConfig,
) -> Result<DimensionEstimate> {
    if n_max < 2 {
        return Err(Error::Unsupported("N_max must be at least 2".into()));
    }
    let (logs, level_nodes) = nested_sums(g, n_max, mode, config)?;
    let log_m1 = (g.bases().base(0) as f64).ln();
    Ok(DimensionEstimate::from_log_g(
        logs,
        log_m1,
        mode,
        level_nodes,
    ))
}

// ---------------------------------------------------------------------------
// Projective class grouping

type Ray = Vec<u128>;

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `ray * A` reduced to a primitive integer vector and its scale, or `None`
/// when the product vanishes.
fn ray_step(ray: &[u128], a: &[Vec<u64>]) -> Result<Option<(Ray, u128)>> {
    let n = ray.len();
    let mut y = vec![0u128; n];
    for (i, &x) in ray.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for j in 0..n {
            let t = x
                .checked_mul(a[i][j] as u128)
                .and_then(|t| t.checked_add(y[j]))
                .ok_or(Error::Overflow("projective class key"))?;
            y[j] = t;
        }
    }
    let g = y.iter().fold(0u128, |acc, &v| gcd(acc, v));
    if g == 0 {
        return Ok(None);
    }
    y.iter_mut().for_each(|v| *v /= g);
    Ok(Some((y, g)))
}

fn ray_log_sum(ray: &[u128]) -> f64 {
    (ray.iter().map(|&x| x as f64).sum::<f64>()).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcceleratedResult {
    /// `ln g_N` for `N = 1..=n`.
    pub log_g: Vec<f64>,
    /// Number of outermost classes alive after each step.
    pub class_counts: Vec<usize>,
    /// Every innermost ray (primitive integer row vector) that occurred.
    pub rays: BTreeSet<Ray>,
    /// Whether the class budget forced plain enumeration.
    pub fell_back: bool,
}

impl AcceleratedResult {
    pub fn nested_sum(&self) -> NestedSumResult {
        NestedSumResult {
            n: self.log_g.len(),
            log_g: *self.log_g.last().expect("n >= 1"),
            mode: FiberMode::NormSurrogate,
            level_nodes: Vec::new(),
        }
    }
}

/// Surrogate-mode nested sums for `r = 2, 3`, grouping partial products by the
/// projective ray of `1^T A_{s(1)} ... A_{s(k)}`. Words sharing a ray share all
/// future growth up to a scalar, so work scales with the number of rays.
/// Falls back to plain enumeration when the class budget is exceeded.
pub fn accelerated_nested_sum(g: &LabeledDigraph, n: usize) -> Result<AcceleratedResult> {
    accelerated_nested_sum_with(g, n, DEFAULT_CLASS_BUDGET)
}

pub fn accelerated_nested_sum_with(
    g: &LabeledDigraph,
    n: usize,
    class_budget: usize,
) -> Result<AcceleratedResult> {
    let g = g.forward_prune();
    if g.is_empty() {
        return Err(Error::EmptySystem);
    }
    if n == 0 {
        return Err(Error::Unsupported("word length must be at least 1".into()));
    }
    let attempt = match g.dim() {
        2 => planar_classes(&g, n, class_budget),
        3 => spatial_classes(&g, n, class_budget),
        r => {
            return Err(Error::Unsupported(format!(
                "class grouping needs r = 2 or 3, got {r}"
            )))
        }
    };
    match attempt {
        Err(e) if e.is_budget() => {
            log::warn!("class grouping abandoned ({e}); using plain enumeration");
            let (log_g, _) = nested_sums(
                &g,
                n,
                FiberMode::NormSurrogate,
                EnumerationConfig::default(),
            )?;
            Ok(AcceleratedResult {
                log_g,
                class_counts: Vec::new(),
                rays: BTreeSet::new(),
                fell_back: true,
            })
        }
        other => other,
    }
}

fn integer_family(g: &LabeledDigraph) -> Vec<Vec<Vec<u64>>> {
    g.restricted_family()
        .iter()
        .map(|a| {
            a.rows()
                .iter()
                .map(|r| r.iter().map(|&x| x as u64).collect())
                .collect()
        })
        .collect()
}

fn planar_classes(g: &LabeledDigraph, n: usize, budget: usize) -> Result<AcceleratedResult> {
    let family = integer_family(g);
    let a1 = g.bases().exponents()[0];
    let m1 = g.bases().base(0);
    let mut classes: BTreeMap<Ray, f64> = BTreeMap::from([(vec![1; g.vertex_count()], 0.0)]);
    let mut rays = BTreeSet::new();
    let mut log_g = Vec::with_capacity(n);
    let mut class_counts = Vec::with_capacity(n);
    for _ in 0..n {
        let mut next: BTreeMap<Ray, LogSum> = BTreeMap::new();
        for (ray, &w) in &classes {
            for u in 0..m1 {
                if let Some((key, scale)) = ray_step(ray, &family[u as usize])? {
                    next.entry(key)
                        .or_default()
                        .push(w + a1 * (scale as f64).ln());
                }
            }
        }
        if next.len() > budget {
            return Err(Error::Budget(format!(
                "more than {budget} projective classes"
            )));
        }
        classes = next.into_iter().map(|(k, acc)| (k, acc.total())).collect();
        let mut total = LogSum::new();
        for (ray, &w) in &classes {
            total.push(w + a1 * ray_log_sum(ray));
            rays.insert(ray.clone());
        }
        log_g.push(total.total());
        class_counts.push(classes.len());
    }
    Ok(AcceleratedResult {
        log_g,
        class_counts,
        rays,
        fell_back: false,
    })
}

/// Normalized innermost weights, quantized for use as an outer class key.
type InnerKey = Vec<(Ray, i64)>;

const QUANTUM: f64 = 1e12;

fn spatial_classes(g: &LabeledDigraph, n: usize, budget: usize) -> Result<AcceleratedResult> {
    let family = integer_family(g);
    let exps = g.bases().exponents();
    let (a1, a2) = (exps[0], exps[1]);
    let (m1, m2) = (g.bases().base(0), g.bases().base(1));

    // outer key -> (representative normalized inner map, log outer weight)
    type Inner = BTreeMap<Ray, f64>;
    let start: Inner = BTreeMap::from([(vec![1; g.vertex_count()], 0.0)]);
    let mut outer: BTreeMap<InnerKey, (Inner, f64)> = BTreeMap::new();
    outer.insert(Vec::new(), (start, 0.0));
    let mut rays = BTreeSet::new();
    let mut log_g = Vec::with_capacity(n);
    let mut class_counts = Vec::with_capacity(n);

    for _ in 0..n {
        let mut next: BTreeMap<InnerKey, (Inner, LogSum)> = BTreeMap::new();
        for (inner, w_outer) in outer.values() {
            for u in 0..m1 {
                let mut grown: BTreeMap<Ray, LogSum> = BTreeMap::new();
                for (ray, &w) in inner {
                    for d in 0..m2 {
                        let v = (u * m2 + d) as usize;
                        if let Some((key, scale)) = ray_step(ray, &family[v])? {
                            grown
                                .entry(key)
                                .or_default()
                                .push(w + a2 * (scale as f64).ln());
                        }
                    }
                }
                if grown.is_empty() {
                    continue;
                }
                let grown: Inner = grown.into_iter().map(|(k, acc)| (k, acc.total())).collect();
                let z = grown
                    .values()
                    .fold(f64::NEG_INFINITY, |acc, &w| log_add(acc, w));
                let normalized: Inner = grown.into_iter().map(|(k, w)| (k, w - z)).collect();
                let key: InnerKey = normalized
                    .iter()
                    .map(|(k, &w)| (k.clone(), (w.exp() * QUANTUM).round() as i64))
                    .collect();
                let entry = next
                    .entry(key)
                    .or_insert_with(|| (normalized, LogSum::new()));
                entry.1.push(w_outer + a1 * z);
            }
        }
        if next.len() > budget {
            return Err(Error::Budget(format!(
                "more than {budget} projective classes"
            )));
        }
        outer = next
            .into_iter()
            .map(|(k, (inner, acc))| (k, (inner, acc.total())))
            .collect();
        let mut total = LogSum::new();
        for (inner, w_outer) in outer.values() {
            let mut inner_value = LogSum::new();
            for (ray, &w) in inner {
                inner_value.push(w + a2 * ray_log_sum(ray));
                rays.insert(ray.clone());
            }
            total.push(w_outer + a1 * inner_value.total());
        }
        log_g.push(total.total());
        class_counts.push(outer.len());
    }
    Ok(AcceleratedResult {
        log_g,
        class_counts,
        rays,
        fell_back: false,
    })
}

/// Estimate from class-grouped sums, with the same sequences as
/// [`dimension_estimate`].
pub fn accelerated_dimension_estimate(
    g: &LabeledDigraph,
    n_max: usize,
) -> Result<DimensionEstimate> {
    if n_max < 2 {
        return Err(Error::Unsupported("N_max must be at least 2".into()));
    }
    let res = accelerated_nested_sum(g, n_max)?;
    let log_m1 = (g.bases().base(0) as f64).ln();
    Ok(DimensionEstimate::from_log_g(
        res.log_g,
        log_m1,
        FiberMode::NormSurrogate,
        Vec::new(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Bases, Edge};
    use crate::systems;

    pub(crate) fn single_vertex(bases: Vec<u32>, labels: &[&[u32]]) -> LabeledDigraph {
        let edges = labels
            .iter()
            .map(|l| Edge {
                from: 0,
                to: 0,
                label: l.to_vec(),
            })
            .collect();
        LabeledDigraph::new(Bases::new(bases).unwrap(), 1, edges).unwrap()
    }

    fn full_shift(bases: Vec<u32>) -> LabeledDigraph {
        let b = Bases::new(bases).unwrap();
        let edges = (0..b.alphabet_size(b.dim()))
            .map(|c| Edge {
                from: 0,
                to: 0,
                label: b.decode(b.dim(), c),
            })
            .collect();
        LabeledDigraph::new(b, 1, edges).unwrap()
    }

    #[test]
    fn full_shift_torus_value() {
        let g = full_shift(vec![2, 3]);
        for mode in [FiberMode::ExactFibers, FiberMode::NormSurrogate] {
            let est = dimension_estimate(&g, 8, mode).unwrap();
            for (i, &e) in est.ratio_sequence.iter().enumerate() {
                assert!((e - 2.0).abs() < 1e-12, "N={} e={e}", i + 1);
                assert!((est.log_g[i] - (i + 1) as f64 * 4f64.ln()).abs() < 1e-9);
            }
            assert!((est.estimate - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mcmullen_pattern_factorizes() {
        let g = single_vertex(vec![2, 3], &[&[0, 0], &[1, 0], &[1, 1]]);
        let a = 2f64.ln() / 3f64.ln();
        let closed = (1.0 + 2f64.powf(a)).log2();
        let est = dimension_estimate(&g, 6, FiberMode::ExactFibers).unwrap();
        for &e in est.ratio_sequence.iter().chain(&est.quotient_sequence) {
            assert!((e - closed).abs() < 1e-9);
        }
    }

    #[test]
    fn bookkeeping_identity() {
        let g = systems::fig2();
        let est = dimension_estimate(&g, 6, FiberMode::ExactFibers).unwrap();
        for (i, (&e, &l)) in est.ratio_sequence.iter().zip(&est.log_g).enumerate() {
            assert!((e * (i + 1) as f64 * 2f64.ln() - l).abs() <= 1e-12 * l.abs());
        }
    }

    #[test]
    fn single_length_matches_sequence() {
        let g = systems::ex2_11();
        let est = dimension_estimate(&g, 7, FiberMode::ExactFibers).unwrap();
        for n in 1..=7 {
            let single = nested_sum(&g, n, FiberMode::ExactFibers).unwrap();
            assert_eq!(single.log_g, est.log_g[n - 1]);
        }
    }

    #[test]
    fn budget_is_reported() {
        let g = systems::fig4();
        let tiny = EnumerationConfig { node_budget: 1_000 };
        let err = nested_sum_with(&g, 14, FiberMode::ExactFibers, tiny).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn empty_graph_rejected() {
        let b = Bases::new(vec![2, 2]).unwrap();
        let g = LabeledDigraph::new(
            b,
            2,
            vec![Edge {
                from: 0,
                to: 1,
                label: vec![0, 0],
            }],
        )
        .unwrap();
        assert!(matches!(
            nested_sum(&g, 3, FiberMode::ExactFibers),
            Err(Error::EmptySystem)
        ));
    }

    #[test]
    fn one_dimensional_counts() {
        let g = single_vertex(vec![3], &[&[0], &[2]]);
        let est = dimension_estimate(&g, 5, FiberMode::ExactFibers).unwrap();
        let expect = 2f64.ln() / 3f64.ln();
        assert!((est.estimate - expect).abs() < 1e-12);
    }

    #[test]
    fn accelerated_single_vertex_has_one_class() {
        let g = single_vertex(vec![2, 3], &[&[0, 0], &[1, 0], &[1, 1]]);
        let acc = accelerated_nested_sum(&g, 10).unwrap();
        assert!(acc.class_counts.iter().all(|&c| c == 1));
        let a = 2f64.ln() / 3f64.ln();
        let closed = (1.0 + 2f64.powf(a)).ln();
        for (i, &l) in acc.log_g.iter().enumerate() {
            assert!((l - (i + 1) as f64 * closed).abs() < 1e-10);
        }
        let g = single_vertex(
            vec![2, 3, 4],
            &[&[0, 0, 1], &[1, 2, 0], &[1, 2, 3], &[1, 0, 0]],
        );
        let acc = accelerated_nested_sum(&g, 8).unwrap();
        assert!(acc.class_counts.iter().all(|&c| c == 1));
    }

    #[test]
    fn accelerated_falls_back_on_budget() {
        let g = systems::fig2();
        let acc = accelerated_nested_sum_with(&g, 6, 1).unwrap();
        assert!(acc.fell_back);
        let plain = nested_sum(&g, 6, FiberMode::NormSurrogate).unwrap();
        assert!((acc.log_g[5] - plain.log_g).abs() < 1e-12);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!(
            "exact".parse::<FiberMode>().unwrap(),
            FiberMode::ExactFibers
        );
        assert_eq!(
            "norm-surrogate".parse::<FiberMode>().unwrap(),
            FiberMode::NormSurrogate
        );
        assert!("both".parse::<FiberMode>().is_err());
    }
}
