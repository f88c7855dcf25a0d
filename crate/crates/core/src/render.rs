//! Depth-`k` cell approximations: binary rasters for planar systems, voxel
//! lists for spatial ones, and the approximate-square count `M(k)`.
//!
//! A level-`i` word of length `k` names the half-open cuboid whose axis-`j`
//! side is `[x_j, x_j + m_j^{-k})` with `x_j = sum_t d_j(t) m_j^{-(t+1)}`.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Bases, LabeledDigraph};
use crate::symbolic::{
    check_capacity, count_words, determinize, full_mask, legal_words, subset_moves, Word,
};

pub const DEFAULT_CELL_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct CellSet {
    pub level: usize,
    pub depth: usize,
    pub bases: Bases,
    /// Legal level-`level` words of length `depth`, in symbol order.
    pub words: Vec<Word>,
}

impl CellSet {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Integer cell coordinates `m_j^k x_j` for the first `level` axes.
    pub fn coordinates(&self, word: &Word) -> Vec<u64> {
        let mut coords = vec![0u64; self.level];
        for digits in word.digits(&self.bases) {
            for (j, &d) in digits.iter().enumerate() {
                coords[j] = coords[j] * self.bases.base(j) as u64 + d as u64;
            }
        }
        coords
    }

    /// Cells per axis, `m_j^k`.
    pub fn grid(&self) -> Vec<u64> {
        (0..self.level)
            .map(|j| (self.bases.base(j) as u64).pow(self.depth as u32))
            .collect()
    }

    /// All coordinates, sorted.
    pub fn sorted_coordinates(&self) -> Vec<Vec<u64>> {
        let set: BTreeSet<Vec<u64>> = self.words.iter().map(|w| self.coordinates(w)).collect();
        set.into_iter().collect()
    }
}

/// All legal level-`level` words of length `k`, at most `budget` of them.
pub fn cells_at_depth(g: &LabeledDigraph, level: usize, k: usize) -> Result<CellSet> {
    cells_at_depth_with(g, level, k, DEFAULT_CELL_BUDGET)
}

pub fn cells_at_depth_with(
    g: &LabeledDigraph,
    level: usize,
    k: usize,
    budget: u64,
) -> Result<CellSet> {
    let g = g.forward_prune();
    if g.is_empty() {
        return Err(Error::EmptySystem);
    }
    if level == 0 || level > g.dim() {
        return Err(Error::Unsupported(format!(
            "no level {level} in a {}-level system",
            g.dim()
        )));
    }
    if k == 0 {
        return Err(Error::Unsupported("depth must be at least 1".into()));
    }
    let grid_ok = (0..level).all(|j| (g.bases().base(j) as u64).checked_pow(k as u32).is_some());
    if !grid_ok {
        return Err(Error::Overflow("cell coordinates"));
    }
    let aut = determinize(&g, level)?;
    let total = count_words(&aut, k);
    if total > BigUint::from(budget) {
        return Err(Error::Budget(format!(
            "{total} cells at depth {k} exceed {budget}"
        )));
    }
    Ok(CellSet {
        level,
        depth: k,
        bases: g.bases().clone(),
        words: legal_words(&aut, k, budget)?,
    })
}

/// Binary image, row-major with the top row first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    /// `true` where the pixel's cell is occupied.
    pub pixels: Vec<bool>,
}

impl Raster {
    pub fn set_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    /// Binary graymap (`P5`, maxval 255); occupied pixels are black.
    pub fn write_pgm(&self, out: &mut impl Write) -> std::io::Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.width, self.height)?;
        let bytes: Vec<u8> = self
            .pixels
            .iter()
            .map(|&p| if p { 0 } else { 255 })
            .collect();
        out.write_all(&bytes)
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_pgm(&mut buf).expect("writing to memory");
        buf
    }
}

/// Map pixel index to cell index by flooring `p * cells / pixels`.
fn pixel_cells(pixels: usize, cells: u64) -> Vec<u64> {
    (0..pixels as u128)
        .map(|p| (p * cells as u128 / pixels as u128) as u64)
        .collect()
}

/// Rasterize the depth-`k` cells of a planar system. Pixel `(px, py)`, counted
/// from the lower left, is set when cell `(px C_x / W, py C_y / H)` is occupied.
pub fn raster_2d(g: &LabeledDigraph, k: usize, width: usize, height: usize) -> Result<Raster> {
    if g.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "rasters need r = 2, got r = {}",
            g.dim()
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::Unsupported(
            "raster dimensions must be positive".into(),
        ));
    }
    let cells = cells_at_depth(g, 2, k)?;
    let grid = cells.grid();
    let occupied: BTreeSet<(u64, u64)> = cells
        .words
        .iter()
        .map(|w| {
            let c = cells.coordinates(w);
            (c[0], c[1])
        })
        .collect();
    let xs = pixel_cells(width, grid[0]);
    let ys = pixel_cells(height, grid[1]);
    let mut pixels = Vec::with_capacity(width * height);
    for row in 0..height {
        let cy = ys[height - 1 - row];
        pixels.extend(xs.iter().map(|&cx| occupied.contains(&(cx, cy))));
    }
    Ok(Raster {
        width,
        height,
        pixels,
    })
}

/// Occupied depth-`k` cuboids of a spatial system as CSV with header
/// `x,y,z,sx,sy,sz`, sorted by cell.
pub fn voxel_export(g: &LabeledDigraph, k: usize) -> Result<String> {
    if g.dim() != 3 {
        return Err(Error::Unsupported(format!(
            "voxels need r = 3, got r = {}",
            g.dim()
        )));
    }
    let cells = cells_at_depth(g, 3, k)?;
    let grid = cells.grid();
    let sizes: Vec<f64> = grid.iter().map(|&c| 1.0 / c as f64).collect();
    let mut out = String::from("x,y,z,sx,sy,sz\n");
    for c in cells.sorted_coordinates() {
        let anchor: Vec<f64> = c
            .iter()
            .zip(&grid)
            .map(|(&x, &n)| x as f64 / n as f64)
            .collect();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            anchor[0], anchor[1], anchor[2], sizes[0], sizes[1], sizes[2]
        ));
    }
    Ok(out)
}

/// `c_i = floor(k log m_1 / log m_i)`, the largest `j` with `m_i^j <= m_1^k`,
/// for `i = 1..=r`.
pub fn cut_points(bases: &Bases, k: usize) -> Vec<usize> {
    let target = BigUint::from(bases.base(0)).pow(k as u32);
    bases
        .as_slice()
        .iter()
        .map(|&m| {
            let m = BigUint::from(m);
            let mut j = 0;
            let mut p = m.clone();
            while p <= target {
                j += 1;
                p *= &m;
            }
            j
        })
        .collect()
}

/// Number of distinct mixed sequences: level-`r` symbols for the first `c_r`
/// places, level-`(r-1)` symbols up to `c_{r-1}`, and so on down to level-1
/// symbols up to `k`. Each equals the number of depth-`k` approximate cubes of
/// side `m_1^{-k}` meeting the set.
pub fn approximate_square_count(g: &LabeledDigraph, k: usize) -> Result<BigUint> {
    let g = g.forward_prune();
    if g.is_empty() {
        return Err(Error::EmptySystem);
    }
    check_capacity(&g)?;
    let cuts = cut_points(g.bases(), k);
    let r = g.dim();
    let mut states: BTreeMap<u64, BigUint> =
        BTreeMap::from([(full_mask(g.vertex_count()), BigUint::one())]);
    let mut pos = 0;
    for level in (1..=r).rev() {
        let end = cuts[level - 1];
        while pos < end {
            let mut next: BTreeMap<u64, BigUint> = BTreeMap::new();
            for (&mask, count) in &states {
                for (_, target) in subset_moves(&g, level, mask) {
                    *next.entry(target).or_insert_with(BigUint::zero) += count;
                }
            }
            states = next;
            pos += 1;
        }
    }
    Ok(states.values().sum())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SquareBounds {
    pub k: usize,
    pub cuts: Vec<usize>,
    pub lower: BigUint,
    pub count: BigUint,
    pub upper: BigUint,
}

impl SquareBounds {
    pub fn holds(&self) -> bool {
        self.lower <= self.count && self.count <= self.upper
    }
}

/// `N_r(c_r) prod_{i<r} N_i(gap_i - d) <= M(k) <= N_r(c_r) prod_{i<r} N_i(gap_i)`
/// with `gap_i = c_i - c_{i+1}` and `A^d > 0`.
pub fn square_count_bounds(g: &LabeledDigraph, k: usize) -> Result<SquareBounds> {
    let g = g.forward_prune();
    if g.is_empty() {
        return Err(Error::EmptySystem);
    }
    let d = g
        .total_adjacency()
        .primitivity_exponent()
        .ok_or(Error::NotPrimitive)?;
    let r = g.dim();
    let cuts = cut_points(g.bases(), k);
    let auts = (1..=r)
        .map(|i| determinize(&g, i))
        .collect::<Result<Vec<_>>>()?;
    let head = count_words(&auts[r - 1], cuts[r - 1]);
    let mut lower = head.clone();
    let mut upper = head;
    for i in 1..r {
        let gap = cuts[i - 1] - cuts[i];
        upper *= count_words(&auts[i - 1], gap);
        lower *= count_words(&auts[i - 1], gap.saturating_sub(d));
    }
    Ok(SquareBounds {
        k,
        cuts,
        lower,
        count: approximate_square_count(&g, k)?,
        upper,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoxCountPoint {
    pub k: usize,
    pub count: String,
    /// `(1/k) log_{m_1} M(k)`.
    pub estimate: f64,
}

/// `(1/k) log_{m_1} M(k)` for `k = 1..=k_max`.
pub fn box_count_series(g: &LabeledDigraph, k_max: usize) -> Result<Vec<BoxCountPoint>> {
    let log_m1 = (g.bases().base(0) as f64).ln();
    (1..=k_max)
        .map(|k| {
            let m = approximate_square_count(g, k)?;
            Ok(BoxCountPoint {
                k,
                estimate: crate::hausdorff::big_ln(&m) / (k as f64 * log_m1),
                count: m.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Edge;
    use crate::systems;

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
    fn cell_counts() {
        assert_eq!(
            cells_at_depth(&full_shift(vec![2, 3]), 2, 2).unwrap().len(),
            36
        );
        assert_eq!(cells_at_depth(&systems::fig2(), 2, 1).unwrap().len(), 7);
        let b = Bases::new(vec![2, 2]).unwrap();
        let dead = LabeledDigraph::new(
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
            cells_at_depth(&dead, 2, 1),
            Err(Error::EmptySystem)
        ));
        assert!(cells_at_depth_with(&systems::fig4(), 2, 6, 100)
            .unwrap_err()
            .is_budget());
    }

    #[test]
    fn coordinates_follow_digit_expansion() {
        let cells = cells_at_depth(&full_shift(vec![2, 3]), 2, 2).unwrap();
        let w = Word::from_digits(&cells.bases, 2, &[vec![1, 2], vec![0, 1]]).unwrap();
        assert_eq!(cells.coordinates(&w), vec![2, 7]);
        assert_eq!(cells.grid(), vec![4, 9]);
    }

    #[test]
    fn full_shift_raster_is_black() {
        let r = raster_2d(&full_shift(vec![2, 3]), 2, 17, 11).unwrap();
        assert_eq!(r.set_count(), 17 * 11);
    }

    #[test]
    fn raster_counts_pixel_areas() {
        let g = systems::fig2();
        let (w, h) = (625, 625);
        let r = raster_2d(&g, 3, w, h).unwrap();
        let cells = cells_at_depth(&g, 2, 3).unwrap();
        let grid = cells.grid();
        let xs = pixel_cells(w, grid[0]);
        let ys = pixel_cells(h, grid[1]);
        let expect: usize = cells
            .sorted_coordinates()
            .iter()
            .map(|c| {
                xs.iter().filter(|&&x| x == c[0]).count()
                    * ys.iter().filter(|&&y| y == c[1]).count()
            })
            .sum();
        assert_eq!(r.set_count(), expect);
    }

    #[test]
    fn raster_orientation_and_format() {
        // Only the lower-left cell of a 2 x 2 grid.
        let b = Bases::new(vec![2, 2]).unwrap();
        let g = LabeledDigraph::new(
            b,
            1,
            vec![Edge {
                from: 0,
                to: 0,
                label: vec![0, 0],
            }],
        )
        .unwrap();
        let r = raster_2d(&g, 1, 2, 2).unwrap();
        assert_eq!(r.pixels, vec![false, false, true, false]);
        assert_eq!(r.to_pgm(), b"P5\n2 2\n255\n\xff\xff\x00\xff".to_vec());
        assert!(raster_2d(&systems::ex2_11(), 1, 2, 2).is_err());
    }

    #[test]
    fn raster_shrinks_on_common_grid() {
        let g = systems::fig4();
        let counts: Vec<usize> = (1..=3)
            .map(|k| raster_2d(&g, k, 8, 125).unwrap().set_count())
            .collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn voxels() {
        let csv = voxel_export(&full_shift(vec![2, 3, 4]), 1).unwrap();
        assert_eq!(csv.lines().count(), 25);
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "0,0,0,0.5,0.3333333333333333,0.25"
        );
        let csv = voxel_export(&systems::ex2_11(), 1).unwrap();
        assert_eq!(csv.lines().count(), 6);
        assert!(voxel_export(&systems::fig2(), 1).is_err());
        assert_eq!(csv, voxel_export(&systems::ex2_11(), 1).unwrap());
    }

    #[test]
    fn cut_point_values() {
        let b = Bases::new(vec![2, 3]).unwrap();
        assert_eq!(cut_points(&b, 2), vec![2, 1]);
        // 3^12 = 531441 <= 2^20 = 1048576 < 3^13
        assert_eq!(cut_points(&b, 20), vec![20, 12]);
        let b = Bases::new(vec![2, 4]).unwrap();
        assert_eq!(cut_points(&b, 6), vec![6, 3]);
    }

    #[test]
    fn square_counts() {
        let g = full_shift(vec![2, 3]);
        assert_eq!(
            approximate_square_count(&g, 2).unwrap(),
            BigUint::from(12u32)
        );
        // equal bases: a single layer, M(k) = N_r(k)
        let g = full_shift(vec![3, 3]);
        assert_eq!(
            approximate_square_count(&g, 3).unwrap(),
            BigUint::from(729u32)
        );
    }

    #[test]
    fn bounds_hold_on_reference_systems() {
        for g in [
            systems::fig2(),
            systems::fig4(),
            systems::ex2_11(),
            systems::ex2_12(),
        ] {
            for k in 1..=20 {
                let b = square_count_bounds(&g, k).unwrap();
                assert!(b.holds(), "{:?}", b);
            }
        }
    }
}
