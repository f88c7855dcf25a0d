//! Word-level machinery: projections, subset-construction determinization of
//! the projected shifts `S^(i)`, exact word counts `N_i(k)` and exact fiber
//! counts `|p_{i-1}^{-1}(s)|`.
//!
//! A level-`i` presentation is obtained by truncating every edge label to its
//! first `i` digits. Projection usually destroys right-resolvability, so
//! counting distinct words needs the determinized automaton: starting from the
//! full vertex set, a word is legal iff its subset run never becomes empty, and
//! distinct legal words correspond to distinct runs.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::model::{Bases, LabeledDigraph, NonnegMatrix};

/// A finite word over `D_level`, stored as symbol codes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub level: usize,
    pub symbols: Vec<u32>,
}

impl Word {
    pub fn new(level: usize, symbols: Vec<u32>) -> Self {
        Word { level, symbols }
    }

    /// Build from digit tuples, each of length `level`.
    pub fn from_digits(bases: &Bases, level: usize, digits: &[Vec<u32>]) -> Result<Self> {
        let mut symbols = Vec::with_capacity(digits.len());
        for d in digits {
            if d.len() != level || !bases.contains_prefix(d) {
                return Err(Error::PrefixOutOfRange {
                    prefix: d.clone(),
                    bases: bases.as_slice().to_vec(),
                });
            }
            symbols.push(bases.encode(d));
        }
        Ok(Word { level, symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn digits(&self, bases: &Bases) -> Vec<Vec<u32>> {
        self.symbols
            .iter()
            .map(|&c| bases.decode(self.level, c))
            .collect()
    }
}

/// Coordinatewise truncation of a level-`i` word to level `j <= i`.
pub fn project_word(bases: &Bases, word: &Word, level: usize) -> Result<Word> {
    if level == 0 || level > word.level {
        return Err(Error::Unsupported(format!(
            "cannot project a level-{} word to level {level}",
            word.level
        )));
    }
    Ok(Word {
        level,
        symbols: word
            .symbols
            .iter()
            .map(|&c| bases.project(c, word.level, level))
            .collect(),
    })
}

/// Deterministic presentation of the level-`i` projected shift.
#[derive(Clone, Debug)]
pub struct SubsetAutomaton {
    level: usize,
    bases: Bases,
    /// Vertex subsets as bitmasks; index 0 is the initial (full) set.
    states: Vec<u64>,
    /// Per state, `(symbol, successor)` sorted by symbol. Dead moves are absent.
    transitions: Vec<Vec<(u32, u32)>>,
    essential: Vec<usize>,
    /// Per state, offsets into its row where each level-`(level-1)` parent
    /// block starts (`parents + 1` entries). Empty when the table would be huge.
    blocks: Vec<u32>,
}

const BLOCK_TABLE_LIMIT: usize = 1 << 24;

pub(crate) fn check_capacity(g: &LabeledDigraph) -> Result<()> {
    if g.vertex_count() > 64 {
        Err(Error::TooManyVertices {
            vertices: g.vertex_count(),
        })
    } else {
        Ok(())
    }
}

/// Successor sets of `mask` under each level-`level` symbol of `g`.
pub(crate) fn subset_moves(g: &LabeledDigraph, level: usize, mask: u64) -> BTreeMap<u32, u64> {
    let mut moves = BTreeMap::new();
    for e in g.edges() {
        if mask >> e.from & 1 == 1 {
            *moves.entry(g.edge_code(e, level)).or_insert(0u64) |= 1u64 << e.to;
        }
    }
    moves
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Subset construction over the `level`-digit projected labels of `g`.
///
/// `g` should already be forward-pruned; an empty graph yields an automaton
/// without states.
pub fn determinize(g: &LabeledDigraph, level: usize) -> Result<SubsetAutomaton> {
    check_capacity(g)?;
    if level == 0 || level > g.dim() {
        return Err(Error::Unsupported(format!(
            "level {level} outside 1..={}",
            g.dim()
        )));
    }
    let mut aut = SubsetAutomaton {
        level,
        bases: g.bases().clone(),
        states: Vec::new(),
        transitions: Vec::new(),
        essential: Vec::new(),
        blocks: Vec::new(),
    };
    if g.is_empty() {
        return Ok(aut);
    }
    let mut index: HashMap<u64, u32> = HashMap::new();
    let initial = full_mask(g.vertex_count());
    index.insert(initial, 0);
    aut.states.push(initial);
    let mut queue = VecDeque::from([0u32]);
    while let Some(s) = queue.pop_front() {
        let mask = aut.states[s as usize];
        let mut row = Vec::new();
        for (sym, next) in subset_moves(g, level, mask) {
            let id = *index.entry(next).or_insert_with(|| {
                aut.states.push(next);
                queue.push_back(aut.states.len() as u32 - 1);
                aut.states.len() as u32 - 1
            });
            row.push((sym, id));
        }
        if aut.transitions.len() <= s as usize {
            aut.transitions.resize(s as usize + 1, Vec::new());
        }
        aut.transitions[s as usize] = row;
    }
    aut.transitions.resize(aut.states.len(), Vec::new());
    aut.essential = aut.cycle_states();
    aut.blocks = aut.block_table();
    Ok(aut)
}

impl SubsetAutomaton {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn bases(&self) -> &Bases {
        &self.bases
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initial(&self) -> Option<u32> {
        (!self.states.is_empty()).then_some(0)
    }

    pub fn state_mask(&self, state: u32) -> u64 {
        self.states[state as usize]
    }

    pub fn transitions(&self, state: u32) -> &[(u32, u32)] {
        &self.transitions[state as usize]
    }

    pub fn step(&self, state: u32, symbol: u32) -> Option<u32> {
        let row = &self.transitions[state as usize];
        row.binary_search_by_key(&symbol, |&(s, _)| s)
            .ok()
            .map(|i| row[i].1)
    }

    /// Moves on symbols whose level-`(level-1)` prefix is `parent`.
    pub fn moves_extending(&self, state: u32, parent: u32) -> &[(u32, u32)] {
        let row = &self.transitions[state as usize];
        if !self.blocks.is_empty() {
            let stride = self.parent_count() + 1;
            let at = state as usize * stride + parent as usize;
            return &row[self.blocks[at] as usize..self.blocks[at + 1] as usize];
        }
        let m = self.bases.base(self.level - 1);
        let lo = parent * m;
        let hi = lo + m;
        let a = row.partition_point(|&(s, _)| s < lo);
        let b = row.partition_point(|&(s, _)| s < hi);
        &row[a..b]
    }

    fn parent_count(&self) -> usize {
        if self.level == 1 {
            1
        } else {
            self.bases.alphabet_size(self.level - 1) as usize
        }
    }

    fn block_table(&self) -> Vec<u32> {
        let parents = self.parent_count();
        let m = self.bases.base(self.level - 1);
        if self.states.len().saturating_mul(parents + 1) > BLOCK_TABLE_LIMIT {
            return Vec::new();
        }
        let mut table = Vec::with_capacity(self.states.len() * (parents + 1));
        for row in &self.transitions {
            for p in 0..=parents as u32 {
                table.push(row.partition_point(|&(s, _)| s < p * m) as u32);
            }
        }
        table
    }

    /// States lying on a directed cycle of the reachable state graph.
    pub fn essential_states(&self) -> &[usize] {
        &self.essential
    }

    fn cycle_states(&self) -> Vec<usize> {
        let mut graph = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = (0..self.states.len()).map(|_| graph.add_node(())).collect();
        let mut self_loop = vec![false; self.states.len()];
        for (s, row) in self.transitions.iter().enumerate() {
            for &(_, t) in row {
                graph.add_edge(nodes[s], nodes[t as usize], ());
                if t as usize == s {
                    self_loop[s] = true;
                }
            }
        }
        let mut on_cycle = vec![false; self.states.len()];
        for comp in tarjan_scc(&graph) {
            if comp.len() > 1 || self_loop[comp[0].index()] {
                for v in comp {
                    on_cycle[v.index()] = true;
                }
            }
        }
        (0..self.states.len()).filter(|&s| on_cycle[s]).collect()
    }

    /// Symbol-count adjacency matrix of the essential part.
    pub fn essential_adjacency(&self) -> NonnegMatrix {
        let pos: HashMap<usize, usize> = self
            .essential
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i))
            .collect();
        let n = self.essential.len();
        let mut rows = vec![vec![0.0; n]; n];
        for (&s, &i) in &pos {
            for &(_, t) in &self.transitions[s] {
                if let Some(&j) = pos.get(&(t as usize)) {
                    rows[i][j] += 1.0;
                }
            }
        }
        NonnegMatrix::from_rows(&rows).expect("counts are nonnegative")
    }

    /// Whether the word is accepted from the initial state.
    pub fn accepts(&self, word: &Word) -> bool {
        let Some(mut s) = self.initial() else {
            return false;
        };
        for &sym in &word.symbols {
            match self.step(s, sym) {
                Some(t) => s = t,
                None => return false,
            }
        }
        true
    }

    /// Edge-list dump for debugging.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# level {} automaton: {} states, {} essential",
            self.level,
            self.states.len(),
            self.essential.len()
        );
        for (s, row) in self.transitions.iter().enumerate() {
            let verts: Vec<String> = (0..64)
                .filter(|v| self.states[s] >> v & 1 == 1)
                .map(|v| v.to_string())
                .collect();
            let _ = writeln!(out, "state {s} {{{}}}", verts.join(","));
            for &(sym, t) in row {
                let _ = writeln!(out, "  {s} -{:?}-> {t}", self.bases.decode(self.level, sym));
            }
        }
        out
    }
}

/// Count DP over automaton states in `u128`, `None` on overflow.
fn count_words_u128(aut: &SubsetAutomaton, k: usize) -> Option<u128> {
    let mut cur = vec![0u128; aut.state_count()];
    cur[0] = 1;
    for _ in 0..k {
        let mut next = vec![0u128; aut.state_count()];
        for (s, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &(_, t) in &aut.transitions[s] {
                next[t as usize] = next[t as usize].checked_add(c)?;
            }
        }
        cur = next;
    }
    cur.iter().try_fold(0u128, |a, &c| a.checked_add(c))
}

fn count_words_big(aut: &SubsetAutomaton, k: usize) -> BigUint {
    let mut cur = vec![BigUint::zero(); aut.state_count()];
    cur[0] = BigUint::from(1u8);
    for _ in 0..k {
        let mut next = vec![BigUint::zero(); aut.state_count()];
        for (s, c) in cur.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for &(_, t) in &aut.transitions[s] {
                next[t as usize] += c;
            }
        }
        cur = next;
    }
    cur.into_iter().sum()
}

/// `N_i(k)`: the number of length-`k` words accepted from the initial state.
pub fn count_words(aut: &SubsetAutomaton, k: usize) -> BigUint {
    if aut.is_empty() {
        return BigUint::zero();
    }
    match count_words_u128(aut, k) {
        Some(c) => BigUint::from(c),
        None => count_words_big(aut, k),
    }
}

/// Exact `|p_{i-1}^{-1}(s)|` using the level-`i` automaton `aut`, where `s` is
/// a level-`(i-1)` word. Illegal `s` gives 0.
pub fn fiber_count_with(aut: &SubsetAutomaton, s: &Word) -> Result<BigUint> {
    if s.level + 1 != aut.level() {
        return Err(Error::Unsupported(format!(
            "fiber of a level-{} word needs the level-{} automaton",
            s.level,
            s.level + 1
        )));
    }
    if aut.is_empty() {
        return Ok(BigUint::zero());
    }
    let mut cur: BTreeMap<u32, BigUint> = BTreeMap::from([(0, BigUint::from(1u8))]);
    for &parent in &s.symbols {
        let mut next: BTreeMap<u32, BigUint> = BTreeMap::new();
        for (&state, c) in &cur {
            for &(_, t) in aut.moves_extending(state, parent) {
                *next.entry(t).or_default() += c;
            }
        }
        if next.is_empty() {
            return Ok(BigUint::zero());
        }
        cur = next;
    }
    Ok(cur.into_values().sum())
}

/// Exact fiber count over a level-`(i-1)` word, building the level-`i`
/// automaton of the pruned graph.
pub fn fiber_count_exact(g: &LabeledDigraph, s: &Word) -> Result<BigUint> {
    let aut = determinize(&g.forward_prune(), s.level + 1)?;
    fiber_count_with(&aut, s)
}

/// Row vector `1^T A_{s(1)} ... A_{s(k)}` kept as a mantissa vector and a
/// power-of-two exponent so long products neither overflow nor lose the
/// exactness of small integer entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledRow {
    pub entries: Vec<f64>,
    pub exp2: i64,
}

impl ScaledRow {
    pub fn ones(n: usize) -> Self {
        ScaledRow {
            entries: vec![1.0; n],
            exp2: 0,
        }
    }

    pub fn apply(&self, a: &NonnegMatrix) -> ScaledRow {
        let mut entries = a.left_apply(&self.entries);
        let mut exp2 = self.exp2;
        let max = entries.iter().cloned().fold(0.0, f64::max);
        if max > 2f64.powi(600) {
            let shift = max.log2().floor() as i32;
            let scale = 2f64.powi(-shift);
            entries.iter_mut().for_each(|x| *x *= scale);
            exp2 += shift as i64;
        }
        ScaledRow { entries, exp2 }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0.0)
    }

    /// Natural log of the entry sum; `-inf` for the zero row.
    pub fn log_sum(&self) -> f64 {
        let s: f64 = self.entries.iter().sum();
        s.ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }
}

/// Sum-of-entries norm of `A_{s(1)} ... A_{s(N)}` for a level-`(r-1)` word.
pub fn fiber_surrogate_norm(g: &LabeledDigraph, s: &Word) -> Result<f64> {
    Ok(surrogate_row(g, s)?.map_or(0.0, |row| {
        let sum: f64 = row.entries.iter().sum();
        sum * 2f64.powi(row.exp2 as i32)
    }))
}

/// Natural log of [`fiber_surrogate_norm`], safe for long words.
pub fn fiber_surrogate_log_norm(g: &LabeledDigraph, s: &Word) -> Result<f64> {
    Ok(surrogate_row(g, s)?.map_or(f64::NEG_INFINITY, |row| row.log_sum()))
}

fn surrogate_row(g: &LabeledDigraph, s: &Word) -> Result<Option<ScaledRow>> {
    if s.level + 1 != g.dim() {
        return Err(Error::Unsupported(format!(
            "surrogate norm needs a level-{} word",
            g.dim() - 1
        )));
    }
    let family = g.restricted_family();
    let mut row = ScaledRow::ones(g.vertex_count());
    for &sym in &s.symbols {
        row = row.apply(&family[sym as usize]);
        if row.is_zero() {
            return Ok(None);
        }
    }
    Ok(Some(row))
}

/// All legal length-`k` words of `aut`, in increasing symbol order. Fails when
/// more than `budget` words would be produced.
pub fn legal_words(aut: &SubsetAutomaton, k: usize, budget: u64) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    let Some(init) = aut.initial() else {
        return Ok(out);
    };
    let mut prefix = Vec::with_capacity(k);
    fn walk(
        aut: &SubsetAutomaton,
        state: u32,
        k: usize,
        prefix: &mut Vec<u32>,
        out: &mut Vec<Word>,
        budget: u64,
    ) -> Result<()> {
        if prefix.len() == k {
            if out.len() as u64 >= budget {
                return Err(Error::Budget(format!(
                    "more than {budget} words of length {k}"
                )));
            }
            out.push(Word::new(aut.level(), prefix.clone()));
            return Ok(());
        }
        for &(sym, t) in aut.transitions(state) {
            prefix.push(sym);
            walk(aut, t, k, prefix, out, budget)?;
            prefix.pop();
        }
        Ok(())
    }
    walk(aut, init, k, &mut prefix, &mut out, budget)?;
    Ok(out)
}
