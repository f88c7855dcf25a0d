//! Spectral radii of infinite companion-type matrices, found as roots of the
//! scalar series equations their Perron vectors satisfy.
//!
//! Two shapes occur:
//!
//! * type A: `beta = sum_{q >= 0} c_q beta^{-q}` (first row `c`, shifted identity
//!   below);
//! * type B: `beta - 1/beta = c_1 + sum_{k >= 1} (c_{k+1} - c_k) beta^{-k}` (first
//!   row `c`, ones on the diagonal and subdiagonal below), whose matrix has
//!   radius `beta + 1`.
//!
//! Each truncation `m` gives a root `beta_m` by bisection; orders advance
//! `10, 15, 20, ...` until `beta_{m+5} - beta_m` drops below the tolerance.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hausdorff::{dimension_estimate, FiberMode};
use crate::model::{LabeledDigraph, NonnegMatrix};
use crate::spectral::spectral_radius;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EquationForm {
    TypeA,
    TypeB,
}

/// Coefficient sequence plus equation shape. Coefficients are requested in
/// increasing index order and cached, so stateful generators are fine.
pub struct BetaProblem {
    form: EquationForm,
    generator: Box<dyn FnMut(usize) -> Result<f64> + Send>,
    cache: Vec<f64>,
    pub tolerance: f64,
    pub start_order: usize,
    pub max_order: usize,
}

impl fmt::Debug for BetaProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BetaProblem")
            .field("form", &self.form)
            .field("cached", &self.cache)
            .field("tolerance", &self.tolerance)
            .finish()
    }
}

impl BetaProblem {
    pub fn new(
        form: EquationForm,
        generator: impl FnMut(usize) -> Result<f64> + Send + 'static,
    ) -> Self {
        BetaProblem {
            form,
            generator: Box::new(generator),
            cache: Vec::new(),
            tolerance: DEFAULT_TOLERANCE,
            start_order: 10,
            max_order: 400,
        }
    }

    pub fn type_a(generator: impl FnMut(usize) -> Result<f64> + Send + 'static) -> Self {
        Self::new(EquationForm::TypeA, generator)
    }

    pub fn type_b(generator: impl FnMut(usize) -> Result<f64> + Send + 'static) -> Self {
        Self::new(EquationForm::TypeB, generator)
    }

    /// A finite list, padded with zeros.
    pub fn from_coefficients(form: EquationForm, coeffs: Vec<f64>) -> Self {
        Self::new(form, move |q| Ok(coeffs.get(q).copied().unwrap_or(0.0)))
    }

    pub fn form(&self) -> EquationForm {
        self.form
    }

    pub fn coefficient(&mut self, q: usize) -> Result<f64> {
        while self.cache.len() <= q {
            let i = self.cache.len();
            let c = (self.generator)(i)?;
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::BadCoefficients(format!("c_{i} = {c}")));
            }
            if self.form == EquationForm::TypeB && i >= 2 && c < self.cache[i - 1] {
                return Err(Error::BadCoefficients(format!(
                    "type-B coefficients must be nondecreasing, but c_{i} = {c} < c_{} = {}",
                    i - 1,
                    self.cache[i - 1]
                )));
            }
            self.cache.push(c);
        }
        Ok(self.cache[q])
    }

    /// `c_0, ..., c_{n-1}`.
    pub fn coefficients(&mut self, n: usize) -> Result<Vec<f64>> {
        if n > 0 {
            self.coefficient(n - 1)?;
        }
        Ok(self.cache[..n].to_vec())
    }

    /// `lhs(beta) - rhs_m(beta)`, increasing in `beta > 0`.
    fn defect(&mut self, m: usize, beta: f64) -> Result<f64> {
        let x = 1.0 / beta;
        Ok(match self.form {
            EquationForm::TypeA => {
                let c = self.coefficients(m)?;
                beta - c.iter().rev().fold(0.0, |acc, &cq| acc * x + cq)
            }
            EquationForm::TypeB => {
                let c = self.coefficients(m + 1)?;
                let tail = (1..m)
                    .rev()
                    .fold(0.0, |acc, k| (acc + (c[k + 1] - c[k])) * x);
                beta - x - (c[1] + tail)
            }
        })
    }
}

/// Root of the order-`m` truncation, bisected to machine precision.
pub fn solve_truncated(problem: &mut BetaProblem, m: usize) -> Result<f64> {
    let mut lo = 1.0;
    let mut hi = 1.0;
    while problem.defect(m, lo)? > 0.0 {
        lo /= 2.0;
        if lo < 1e-9 {
            return Err(Error::BracketNotFound(format!(
                "no sign change above 1e-9 at m = {m}"
            )));
        }
    }
    while problem.defect(m, hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::BracketNotFound(format!(
                "series still dominates at beta = 1e12 for m = {m}"
            )));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if problem.defect(m, mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaSolution {
    pub beta: f64,
    /// Truncation order of the returned root.
    pub order: usize,
    /// `(m, beta_m)` along the schedule.
    pub trace: Vec<(usize, f64)>,
    /// `beta_{m+5} - beta_m` at the stop.
    pub tail_bound: f64,
    /// `|lhs - rhs_m| / beta` at the returned root.
    pub residual: f64,
}

/// Advance the truncation order until consecutive roots settle.
pub fn solve_beta(problem: &mut BetaProblem) -> Result<BetaSolution> {
    let mut m = problem.start_order;
    let mut prev = solve_truncated(problem, m)?;
    let mut trace = vec![(m, prev)];
    while m + 5 <= problem.max_order {
        let next = solve_truncated(problem, m + 5)?;
        trace.push((m + 5, next));
        let step = next - prev;
        m += 5;
        if step < problem.tolerance {
            let residual = problem.defect(m, next)?.abs() / next;
            return Ok(BetaSolution {
                beta: next,
                order: m,
                trace,
                tail_bound: step,
                residual,
            });
        }
        prev = next;
    }
    Err(Error::NotConverged(problem.max_order))
}

/// The `m x m` matrix with first row `c_0..c_{m-1}` and ones just below the
/// diagonal.
pub fn companion_matrix(coeffs: &[f64]) -> NonnegMatrix {
    let m = coeffs.len();
    let mut rows = vec![vec![0.0; m]; m];
    rows[0].copy_from_slice(coeffs);
    for i in 1..m {
        rows[i][i - 1] = 1.0;
    }
    NonnegMatrix::from_rows(&rows).expect("nonnegative square")
}

/// First row `c_1..c_m`, ones on the diagonal and subdiagonal below.
pub fn banded_matrix(coeffs: &[f64]) -> NonnegMatrix {
    let m = coeffs.len();
    let mut rows = vec![vec![0.0; m]; m];
    rows[0].copy_from_slice(coeffs);
    for i in 1..m {
        rows[i][i - 1] = 1.0;
        rows[i][i] = 1.0;
    }
    NonnegMatrix::from_rows(&rows).expect("nonnegative square")
}

// ---------------------------------------------------------------------------
// Planar direction classes over bases [2, 3, 4]

fn log_ratio(a: f64, b: f64) -> f64 {
    a.ln() / b.ln()
}

/// Iterates `x <- M_1 x` from `e_0`, where `M_1` has first row
/// `(0, 1, 2^{a_2}, 3^{a_2}, ...)` and a shifted identity below.
struct DirectionWalk {
    x: Vec<f64>,
    a2: f64,
}

impl DirectionWalk {
    fn new(a2: f64) -> Self {
        DirectionWalk { x: vec![1.0], a2 }
    }

    fn step(&mut self) {
        let head: f64 = self
            .x
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &v)| (j as f64).powf(self.a2) * v)
            .sum();
        self.x.insert(0, head);
    }

    fn norm(&self) -> f64 {
        self.x.iter().sum()
    }
}

/// `M_1^q e_0` as a vector indexed by direction class.
pub fn direction_vector(q: usize, a2: f64) -> Vec<f64> {
    let mut walk = DirectionWalk::new(a2);
    for _ in 0..q {
        walk.step();
    }
    walk.x
}

/// `b_q = ||M_1^q e_0||_1^{a_1}` by truncated matrix powers.
pub fn bq_matrix_power(q: usize, a1: f64, a2: f64) -> f64 {
    direction_vector(q, a2).iter().sum::<f64>().powf(a1)
}

/// `b_q` with `a_1 = log_3 2`, `a_2 = log_4 3`.
pub fn bq_example_2_11(q: usize) -> f64 {
    bq_matrix_power(q, log_ratio(2.0, 3.0), log_ratio(3.0, 4.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionEnumeration {
    pub q: usize,
    pub b_q: f64,
    /// Summed `c^{a_2}` per direction `(k, 1)`, indexed by `k`.
    pub classes: Vec<f64>,
    pub words: usize,
}

/// `b_q` by enumerating every level-2 word over the level-1 word `1^{q-1}`,
/// writing `(1, 1) A_{s(1)} ... A_{s(q-1)} = c (k, 1)` and summing `c^{a_2}` per `k`.
pub fn bq_word_enumeration(g: &LabeledDigraph, q: usize) -> Result<DirectionEnumeration> {
    check_direction_structure(g)?;
    let exps = g.bases().exponents();
    let (a1, a2) = (exps[0], exps[1]);
    if q == 0 {
        return Ok(DirectionEnumeration {
            q,
            b_q: 1.0,
            classes: vec![1.0],
            words: 0,
        });
    }
    let family = g.restricted_family();
    let m2 = g.bases().base(1);
    let children: Vec<[u128; 4]> = (0..m2)
        .map(|d| {
            let a = &family[(m2 + d) as usize];
            [a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1)].map(|x| x as u128)
        })
        .collect();
    let mut classes: Vec<f64> = vec![0.0; q + 1];
    let mut words = 0usize;
    let mut stack: Vec<([u128; 2], usize)> = vec![([1, 1], 0)];
    while let Some((x, depth)) = stack.pop() {
        if depth == q - 1 {
            words += 1;
            let c = x[1];
            if c == 0 || x[0] % c != 0 {
                return Err(Error::StructuralMismatch(format!(
                    "row vector {x:?} is not a multiple of some (k, 1)"
                )));
            }
            let k = (x[0] / c) as usize;
            if k >= classes.len() {
                classes.resize(k + 1, 0.0);
            }
            classes[k] += (c as f64).powf(a2);
            continue;
        }
        for a in children.iter().rev() {
            let y = [x[0] * a[0] + x[1] * a[2], x[0] * a[1] + x[1] * a[3]];
            if y != [0, 0] {
                stack.push((y, depth + 1));
            }
        }
    }
    let b_q = classes.iter().sum::<f64>().powf(a1);
    Ok(DirectionEnumeration {
        q,
        b_q,
        classes,
        words,
    })
}

fn expect_family(
    g: &LabeledDigraph,
    bases: &[u32],
    expected: &[(&[u32], [[f64; 2]; 2])],
) -> Result<()> {
    if g.bases().as_slice() != bases {
        return Err(Error::StructuralMismatch(format!(
            "expected bases {bases:?}, found {:?}",
            g.bases().as_slice()
        )));
    }
    if g.vertex_count() != 2 {
        return Err(Error::StructuralMismatch(format!(
            "expected 2 vertices, found {}",
            g.vertex_count()
        )));
    }
    let want: BTreeMap<u32, [[f64; 2]; 2]> = expected
        .iter()
        .map(|(digits, m)| (g.bases().encode(digits), *m))
        .collect();
    for (code, a) in g.restricted_family().iter().enumerate() {
        let target = want.get(&(code as u32)).copied().unwrap_or([[0.0; 2]; 2]);
        let found = [[a.get(0, 0), a.get(0, 1)], [a.get(1, 0), a.get(1, 1)]];
        if found != target {
            return Err(Error::StructuralMismatch(format!(
                "restricted matrix for {:?} is {found:?}, expected {target:?}",
                g.bases().decode(g.dim() - 1, code as u32)
            )));
        }
    }
    Ok(())
}

fn check_direction_structure(g: &LabeledDigraph) -> Result<()> {
    expect_family(
        g,
        &[2, 3, 4],
        &[
            (&[0, 1], [[0.0, 0.0], [0.0, 1.0]]),
            (&[1, 0], [[0.0, 1.0], [0.0, 0.0]]),
            (&[1, 1], [[1.0, 0.0], [1.0, 1.0]]),
        ],
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRow {
    pub q: usize,
    pub matrix_power: f64,
    pub enumeration: f64,
    pub relative_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionCaseStudy {
    pub beta: f64,
    /// `log_2 beta`.
    pub dimension: f64,
    pub solution: BetaSolution,
    pub oracles: Vec<OracleRow>,
    pub max_oracle_gap: f64,
    /// Whether `beta_m` is nondecreasing over `m = 1..=60`.
    pub monotone: bool,
    /// Perron root of the truncated companion matrix at the final order.
    pub companion_radius: f64,
    /// The root obtained when the norms `||M_1^q e_0||_1` are used without
    /// the exponent `a_1`.
    pub beta_without_exponent: f64,
    pub hausdorff_estimate: f64,
    pub hausdorff_gap: f64,
    pub hausdorff_agrees: bool,
}

const ORACLE_MAX_Q: usize = 12;
const MONOTONE_MAX_M: usize = 60;
const HAUSDORFF_TOL: f64 = 0.05;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Direction-class pipeline for the planar-classes example over `[2, 3, 4]`.
pub fn case_study_2_11(g: &LabeledDigraph, n_max: usize) -> Result<DirectionCaseStudy> {
    case_study_2_11_with(g, n_max, DEFAULT_TOLERANCE, None)
}

/// `estimate` reuses an exact-mode Hausdorff estimate at `n_max` instead of enumerating again.
pub fn case_study_2_11_with(
    g: &LabeledDigraph,
    n_max: usize,
    tolerance: f64,
    estimate: Option<f64>,
) -> Result<DirectionCaseStudy> {
    check_direction_structure(g)?;
    let exps = g.bases().exponents();
    let (a1, a2) = (exps[0], exps[1]);

    let mut oracles = Vec::new();
    for q in 0..=ORACLE_MAX_Q {
        let matrix_power = bq_matrix_power(q, a1, a2);
        let enumeration = bq_word_enumeration(g, q)?.b_q;
        let relative_gap = (matrix_power - enumeration).abs() / matrix_power;
        oracles.push(OracleRow {
            q,
            matrix_power,
            enumeration,
            relative_gap,
        });
    }
    let max_oracle_gap = oracles.iter().map(|o| o.relative_gap).fold(0.0, f64::max);

    let mut problem = direction_problem(a2, a1);
    problem.tolerance = tolerance;
    let solution = solve_beta(&mut problem)?;
    let mut monotone = true;
    let mut last = 0.0;
    for m in 1..=MONOTONE_MAX_M {
        let b = solve_truncated(&mut problem, m)?;
        monotone &= b >= last;
        last = b;
    }
    let coeffs = problem.coefficients(solution.order)?;
    let companion_radius = spectral_radius(&companion_matrix(&coeffs))?.radius;

    let mut bare = direction_problem(a2, 1.0);
    bare.tolerance = tolerance;
    let beta_without_exponent = solve_beta(&mut bare)?.beta;

    let dimension = solution.beta.log2();
    let hausdorff_estimate = match estimate {
        Some(e) => e,
        None => dimension_estimate(g, n_max, FiberMode::ExactFibers)?.estimate,
    };
    let hausdorff_gap = (hausdorff_estimate - dimension).abs();
    Ok(DirectionCaseStudy {
        beta: solution.beta,
        dimension,
        solution,
        oracles,
        max_oracle_gap,
        monotone,
        companion_radius,
        beta_without_exponent,
        hausdorff_estimate,
        hausdorff_gap,
        hausdorff_agrees: hausdorff_gap <= HAUSDORFF_TOL,
    })
}

/// Type-A problem with `c_q = ||M_1^q e_0||_1^{power}`, generated incrementally.
fn direction_problem(a2: f64, power: f64) -> BetaProblem {
    let mut walk = DirectionWalk::new(a2);
    BetaProblem::type_a(move |q| {
        if q > 0 {
            walk.step();
        }
        Ok(walk.norm().powf(power))
    })
}

// ---------------------------------------------------------------------------
// Spatial rays over bases [3, 4, 5]

/// `(1, (3^q - 1)/2)`.
fn ray(q: u32) -> Result<[u128; 2]> {
    let p = 3u128
        .checked_pow(q)
        .ok_or(Error::Overflow("ray coordinates"))?;
    Ok([1, (p - 1) / 2])
}

/// Index `q` with `v = c (1, (3^q - 1)/2)`, and the scalar `c`.
fn classify_ray(v: [u128; 2]) -> Option<(u32, u128)> {
    let c = v[0];
    if c == 0 || !v[1].is_multiple_of(c) {
        return None;
    }
    let t = 2 * (v[1] / c) + 1;
    let mut q = 0;
    let mut p = 1u128;
    while p < t {
        p = p.checked_mul(3)?;
        q += 1;
    }
    (p == t).then_some((q, c))
}

fn check_ray_structure(g: &LabeledDigraph) -> Result<()> {
    expect_family(
        g,
        &[3, 4, 5],
        &[
            (&[0, 1], [[1.0, 1.0], [1.0, 1.0]]),
            (&[1, 0], [[1.0, 0.0], [0.0, 1.0]]),
            (&[2, 3], [[1.0, 1.0], [0.0, 3.0]]),
        ],
    )
}

fn int_matrices(g: &LabeledDigraph) -> Vec<[u128; 4]> {
    [[0u32, 1], [1, 0], [2, 3]]
        .iter()
        .map(|digits| {
            let a = &g.restricted_family()[g.bases().encode(digits) as usize];
            [a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1)].map(|x| x as u128)
        })
        .collect()
}

fn row_times(x: [u128; 2], a: &[u128; 4]) -> Result<[u128; 2]> {
    let f = |p: u128, q: u128, r: u128, s: u128| {
        p.checked_mul(q)
            .and_then(|u| r.checked_mul(s).and_then(|v| u.checked_add(v)))
            .ok_or(Error::Overflow("ray product"))
    };
    Ok([f(x[0], a[0], x[1], a[2])?, f(x[0], a[1], x[1], a[3])?])
}

/// Column `q` of the class-transition matrix: `(target ray, scalar^alpha)`
/// for each of the three symbols applied to ray `q`.
fn ray_column(mats: &[[u128; 4]], q: u32, alpha: f64) -> Result<Vec<(u32, f64)>> {
    let start = ray(q)?;
    mats.iter()
        .map(|a| {
            let y = row_times(start, a)?;
            let (t, c) = classify_ray(y).ok_or_else(|| {
                Error::StructuralMismatch(format!("ray {q} maps to {y:?}, off every ray"))
            })?;
            Ok((t, (c as f64).powf(alpha)))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayIdentity {
    pub q: u32,
    /// `ray_q A_0 = ((3^q + 1)/2) (1, 1)`.
    pub collapse: bool,
    /// `ray_q A_1 = ray_q`.
    pub fixed: bool,
    /// `ray_q A_2 = ray_{q+1}`.
    pub advance: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayCaseStudy {
    pub beta: f64,
    /// `log_3 (beta + 1)`.
    pub dimension: f64,
    pub solution: BetaSolution,
    /// First-row entries `b_1, b_2, ...` read off the ray classification.
    pub leading_coefficients: Vec<f64>,
    pub identities: Vec<RayIdentity>,
    pub identities_hold: bool,
    /// Largest relative gap between `M^N e_1` and explicit enumeration of
    /// `{0,1,2}^N`, over `N <= 10`.
    pub recursion_gap: f64,
    /// Perron root of the truncated banded matrix; tends to `beta + 1`.
    pub truncated_radius: f64,
    /// Root and dimension when every first-row entry is `((3^n + 1)/2)^alpha`,
    /// dropping the fixed-ray contribution to `b_1`.
    pub beta_without_fixed_term: f64,
    pub dimension_without_fixed_term: f64,
    pub hausdorff_estimate: f64,
    pub hausdorff_gap: f64,
    pub hausdorff_agrees: bool,
    /// Logarithms are taken in base `m_1 = 3` throughout.
    pub log_base: u32,
}

const RAY_MAX_Q: u32 = 10;

/// Ray pipeline for the spatial example over `[3, 4, 5]`.
pub fn case_study_2_12(g: &LabeledDigraph, n_max: usize) -> Result<RayCaseStudy> {
    case_study_2_12_with(g, n_max, DEFAULT_TOLERANCE, None)
}

/// `estimate` reuses an exact-mode Hausdorff estimate at `n_max` instead of enumerating again.
pub fn case_study_2_12_with(
    g: &LabeledDigraph,
    n_max: usize,
    tolerance: f64,
    estimate: Option<f64>,
) -> Result<RayCaseStudy> {
    check_ray_structure(g)?;
    let exps = g.bases().exponents();
    let alpha = exps[0] * exps[1];
    let mats = int_matrices(g);

    let mut identities = Vec::new();
    for q in 0..=RAY_MAX_Q {
        let v = ray(q)?;
        let half = 3u128.pow(q).div_ceil(2);
        identities.push(RayIdentity {
            q,
            collapse: row_times(v, &mats[0])? == [half, half],
            fixed: row_times(v, &mats[1])? == v,
            advance: row_times(v, &mats[2])? == ray(q + 1)?,
        });
    }
    let identities_hold = identities
        .iter()
        .all(|i| i.collapse && i.fixed && i.advance);

    let recursion_gap = ray_recursion_gap(&mats, alpha, RAY_MAX_Q as usize)?;

    // First row of the class-transition matrix: mass landing on ray 1.
    let first_row = {
        let mats = mats.clone();
        move |q: usize| -> Result<f64> {
            if q == 0 {
                return Ok(0.0);
            }
            let col = ray_column(&mats, q as u32, alpha)?;
            Ok(col.iter().filter(|(t, _)| *t == 1).map(|(_, w)| w).sum())
        }
    };
    let mut problem = BetaProblem::type_b(first_row);
    problem.tolerance = tolerance;
    let solution = solve_beta(&mut problem)?;
    let coeffs = problem.coefficients(solution.order + 1)?;
    let leading_coefficients = coeffs[1..7.min(coeffs.len())].to_vec();
    let truncated_radius = spectral_radius(&banded_matrix(&coeffs[1..]))?.radius;

    let mut bare = BetaProblem::type_b(move |n| {
        Ok(if n == 0 {
            0.0
        } else {
            ((3f64.powi(n as i32) + 1.0) / 2.0).powf(alpha)
        })
    });
    bare.tolerance = tolerance;
    let beta_without_fixed_term = solve_beta(&mut bare)?.beta;

    let dimension = (solution.beta + 1.0).log(3.0);
    let hausdorff_estimate = match estimate {
        Some(e) => e,
        None => dimension_estimate(g, n_max, FiberMode::ExactFibers)?.estimate,
    };
    let hausdorff_gap = (hausdorff_estimate - dimension).abs();
    Ok(RayCaseStudy {
        beta: solution.beta,
        dimension,
        solution,
        leading_coefficients,
        identities,
        identities_hold,
        recursion_gap,
        truncated_radius,
        beta_without_fixed_term,
        dimension_without_fixed_term: (beta_without_fixed_term + 1.0).log(3.0),
        hausdorff_estimate,
        hausdorff_gap,
        hausdorff_agrees: hausdorff_gap <= HAUSDORFF_TOL,
        log_base: 3,
    })
}

/// Compare the class recursion `Phi_{N+1} = M Phi_N` from `e_1` with direct
/// enumeration of all symbol sequences of length `N`.
fn ray_recursion_gap(mats: &[[u128; 4]], alpha: f64, n_max: usize) -> Result<f64> {
    let mut phi: BTreeMap<u32, f64> = BTreeMap::from([(1, 1.0)]);
    let mut worst: f64 = 0.0;
    for n in 1..=n_max {
        let mut next: BTreeMap<u32, f64> = BTreeMap::new();
        for (&q, &w) in &phi {
            for (t, c) in ray_column(mats, q, alpha)? {
                *next.entry(t).or_default() += w * c;
            }
        }
        phi = next;

        let mut direct: BTreeMap<u32, f64> = BTreeMap::new();
        let mut stack = vec![([1u128, 1u128], 0usize)];
        while let Some((x, depth)) = stack.pop() {
            if depth == n {
                let (q, c) = classify_ray(x)
                    .ok_or_else(|| Error::StructuralMismatch(format!("{x:?} is off every ray")))?;
                *direct.entry(q).or_default() += (c as f64).powf(alpha);
                continue;
            }
            for a in mats {
                stack.push((row_times(x, a)?, depth + 1));
            }
        }
        if direct.keys().ne(phi.keys()) {
            return Ok(f64::INFINITY);
        }
        for (q, d) in &direct {
            worst = worst.max((d - phi[q]).abs() / d);
        }
    }
    Ok(worst)
}
