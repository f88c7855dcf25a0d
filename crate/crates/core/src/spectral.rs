//! Perron data, level entropies, the Minkowski dimension and
//! uniform-complexity certificates.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hausdorff::{dimension_estimate, FiberMode};
use crate::model::{LabeledDigraph, NonnegMatrix};
use crate::symbolic::{count_words, determinize};

/// Dominant eigenvalue of a nonnegative matrix with unit-sum eigenvectors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerronData {
    pub radius: f64,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    /// `||M v - rho v||_1` for the unit-sum right vector.
    pub right_residual: f64,
    pub left_residual: f64,
    /// Whether the dense eigen solver was needed.
    pub dense_fallback: bool,
}

const POWER_STEPS: usize = 20_000;
const POWER_TOL: f64 = 1e-13;

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    if s != 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

fn residual(apply: impl Fn(&[f64]) -> Vec<f64>, v: &[f64], rho: f64) -> f64 {
    apply(v)
        .iter()
        .zip(v)
        .map(|(a, b)| (a - rho * b).abs())
        .sum()
}

/// Power iteration on `M + I`, which shares the Perron vector of `M` but is
/// aperiodic whenever `M` is irreducible.
fn power(apply: impl Fn(&[f64]) -> Vec<f64>, n: usize) -> Option<(f64, Vec<f64>)> {
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..POWER_STEPS {
        let mv = apply(&v);
        let mut w: Vec<f64> = mv.iter().zip(&v).map(|(a, b)| a + b).collect();
        normalize(&mut w);
        let mw = apply(&w);
        let rho: f64 = mw.iter().sum();
        let res: f64 = mw.iter().zip(&w).map(|(a, b)| (a - rho * b).abs()).sum();
        v = w;
        if res <= POWER_TOL * rho.max(f64::MIN_POSITIVE) {
            return Some((rho, v));
        }
    }
    None
}

/// Null vector of `B` via the smallest singular value, made nonnegative.
fn null_vector(b: DMatrix<f64>) -> Vec<f64> {
    let n = b.ncols();
    let svd = b.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let (k, _) =
        svd.singular_values
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (i, &s)| if s < best.1 { (i, s) } else { best },
            );
    let mut v: Vec<f64> = (0..n).map(|j| vt[(k, j)]).collect();
    if v.iter().sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v.iter_mut().for_each(|x| *x = x.max(0.0));
    normalize(&mut v);
    v
}

/// Perron root and eigenvectors of `m`. Uses power iteration and falls back to
/// a dense eigensolver (up to 64 x 64) when that stalls.
pub fn spectral_radius(m: &NonnegMatrix) -> Result<PerronData> {
    let n = m.dim();
    if n == 0 || m.is_zero() {
        return Ok(PerronData {
            radius: 0.0,
            right: vec![0.0; n],
            left: vec![0.0; n],
            right_residual: 0.0,
            left_residual: 0.0,
            dense_fallback: false,
        });
    }
    let right_apply = |v: &[f64]| m.right_apply(v);
    let left_apply = |v: &[f64]| m.left_apply(v);
    let pr = power(right_apply, n);
    let pl = power(left_apply, n);
    if let (Some((rr, right)), Some((rl, left))) = (pr, pl) {
        let radius = 0.5 * (rr + rl);
        return Ok(PerronData {
            right_residual: residual(right_apply, &right, radius),
            left_residual: residual(left_apply, &left, radius),
            radius,
            right,
            left,
            dense_fallback: false,
        });
    }
    if n > 64 {
        return Err(Error::Unsupported(format!(
            "power iteration stalled on a {n} x {n} matrix"
        )));
    }
    let a = m.inner();
    let radius = a
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let shift = DMatrix::identity(n, n) * radius;
    let right = null_vector(a - &shift);
    let left = null_vector(a.transpose() - &shift);
    Ok(PerronData {
        right_residual: residual(right_apply, &right, radius),
        left_residual: residual(left_apply, &left, radius),
        radius,
        right,
        left,
        dense_fallback: true,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelEntropy {
    pub level: usize,
    /// `ln rho` of the essential subset-automaton adjacency.
    pub entropy: f64,
    /// `ln N(13) - ln N(12)`.
    pub growth_check: f64,
    pub consistent: bool,
}

const GROWTH_K: usize = 12;

/// Topological entropy of the level-`level` projected shift.
pub fn entropy_level(g: &LabeledDigraph, level: usize) -> Result<LevelEntropy> {
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
    let aut = determinize(&g, level)?;
    let entropy = spectral_radius(&aut.essential_adjacency())?.radius.ln();
    let growth_check = crate::hausdorff::big_ln(&count_words(&aut, GROWTH_K + 1))
        - crate::hausdorff::big_ln(&count_words(&aut, GROWTH_K));
    let consistent = (entropy - growth_check).abs() <= 0.02;
    if !consistent {
        log::warn!(
            "level {level}: entropy {entropy:.6} disagrees with word growth {growth_check:.6}"
        );
    }
    Ok(LevelEntropy {
        level,
        entropy,
        growth_check,
        consistent,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinkowskiResult {
    pub dimension: f64,
    /// `h_1, ..., h_r`; the last is `ln rho(A)` for the total adjacency.
    pub entropies: Vec<f64>,
    pub radius: f64,
}

/// `dim_M = ln rho(A) / ln m_r + sum_{i<r} (1/ln m_i - 1/ln m_{i+1}) h_i`.
/// The total adjacency matrix must be primitive.
pub fn minkowski_dimension(g: &LabeledDigraph) -> Result<MinkowskiResult> {
    let g = g.forward_prune();
    if g.is_empty() {
        return Err(Error::EmptySystem);
    }
    let a = g.total_adjacency();
    if !a.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let r = g.dim();
    let radius = spectral_radius(&a)?.radius;
    let logs: Vec<f64> = g
        .bases()
        .as_slice()
        .iter()
        .map(|&m| (m as f64).ln())
        .collect();
    let mut entropies = Vec::with_capacity(r);
    let mut dimension = radius.ln() / logs[r - 1];
    for i in 0..r - 1 {
        let h = entropy_level(&g, i + 1)?.entropy;
        dimension += (1.0 / logs[i] - 1.0 / logs[i + 1]) * h;
        entropies.push(h);
    }
    entropies.push(radius.ln());
    Ok(MinkowskiResult {
        dimension,
        entropies,
        radius,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideCheck {
    pub side: Side,
    pub verdict: Verdict,
    pub eigenvalue: f64,
    pub vector: Vec<f64>,
    /// `(symbol code, ||v A_s - lambda v||_1 / lambda)` per occurring symbol.
    pub residuals: Vec<(u32, f64)>,
    pub refined: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformComplexityCertificate {
    pub verdict: Verdict,
    /// The side that certified, when the verdict holds.
    pub side: Option<Side>,
    pub eigenvalue: Option<f64>,
    pub vector: Option<Vec<f64>>,
    pub checks: Vec<SideCheck>,
}

const CERTIFY_TOL: f64 = 1e-9;
const REJECT_TOL: f64 = 1e-6;

fn side_apply(a: &NonnegMatrix, v: &[f64], side: Side) -> Vec<f64> {
    match side {
        Side::Left => a.left_apply(v),
        Side::Right => a.right_apply(v),
    }
}

fn side_residuals(
    family: &[(u32, NonnegMatrix)],
    v: &[f64],
    lambda: f64,
    side: Side,
) -> Vec<(u32, f64)> {
    family
        .iter()
        .map(|(s, a)| {
            let w = side_apply(a, v, side);
            let r: f64 = w.iter().zip(v).map(|(x, y)| (x - lambda * y).abs()).sum();
            (*s, r / (lambda * l1(v)))
        })
        .collect()
}

/// Least-squares common eigenvector: smallest singular vector of the stacked
/// `A_s - lambda I`, alternated with the Rayleigh update of `lambda`.
fn refine(family: &[(u32, NonnegMatrix)], lambda: f64, side: Side) -> (f64, Vec<f64>) {
    let n = family[0].1.dim();
    let k = family.len();
    let mut lambda = lambda;
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..4 {
        let mut stacked = DMatrix::zeros(n * k, n);
        for (b, (_, a)) in family.iter().enumerate() {
            let mut block = match side {
                Side::Left => a.inner().transpose(),
                Side::Right => a.inner().clone(),
            };
            for i in 0..n {
                block[(i, i)] -= lambda;
            }
            stacked.view_mut((b * n, 0), (n, n)).copy_from(&block);
        }
        let svd = stacked.svd(false, true);
        let vt = svd.v_t.expect("requested");
        let (idx, _) =
            svd.singular_values
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |best, (i, &s)| if s < best.1 { (i, s) } else { best },
                );
        v = (0..n).map(|j| vt[(idx, j)]).collect();
        if v.iter().sum::<f64>() < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let vv: f64 = v.iter().map(|x| x * x).sum();
        lambda = family
            .iter()
            .map(|(_, a)| {
                side_apply(a, &v, side)
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| x * y)
                    .sum::<f64>()
            })
            .sum::<f64>()
            / (k as f64 * vv);
    }
    normalize(&mut v);
    (lambda, v)
}

fn positive(v: &[f64]) -> bool {
    let max = v.iter().cloned().fold(0.0, f64::max);
    max > 0.0 && v.iter().all(|&x| x > 1e-12 * max)
}

fn check_side(
    family: &[(u32, NonnegMatrix)],
    total: &NonnegMatrix,
    side: Side,
) -> Result<SideCheck> {
    let perron = spectral_radius(total)?;
    let v = match side {
        Side::Left => perron.left,
        Side::Right => perron.right,
    };
    let lambda = perron.radius / family.len() as f64;
    let residuals = side_residuals(family, &v, lambda, side);
    let worst = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
    let mut check = SideCheck {
        side,
        verdict: Verdict::Holds,
        eigenvalue: lambda,
        vector: v,
        residuals,
        refined: false,
    };
    if !positive(&check.vector) {
        check.verdict = Verdict::Inconclusive;
        return Ok(check);
    }
    if worst <= CERTIFY_TOL {
        return Ok(check);
    }
    let (lambda, v) = refine(family, lambda, side);
    let residuals = side_residuals(family, &v, lambda, side);
    let worst = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
    check.verdict = if positive(&v) && worst <= CERTIFY_TOL {
        Verdict::Holds
    } else if worst > REJECT_TOL {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    };
    check.eigenvalue = lambda;
    check.vector = v;
    check.residuals = residuals;
    check.refined = true;
    Ok(check)
}

/// Whether all occurring `A_s` share one positive left (or right) eigenvector
/// with a common eigenvalue. Planar systems only.
pub fn uniform_complexity_check(g: &LabeledDigraph) -> Result<UniformComplexityCertificate> {
    let g = g.forward_prune();
    if g.is_empty() {
        return Err(Error::EmptySystem);
    }
    if g.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "uniform complexity is checked for r = 2, got r = {}",
            g.dim()
        )));
    }
    let family: Vec<(u32, NonnegMatrix)> = g
        .restricted_family()
        .into_iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .map(|(s, a)| (s as u32, a))
        .collect();
    let total = g.total_adjacency();
    let mut checks = Vec::new();
    for side in [Side::Left, Side::Right] {
        let check = check_side(&family, &total, side)?;
        let holds = check.verdict == Verdict::Holds;
        checks.push(check);
        if holds {
            break;
        }
    }
    let certified = checks.iter().find(|c| c.verdict == Verdict::Holds);
    let verdict = if certified.is_some() {
        Verdict::Holds
    } else if checks.iter().all(|c| c.verdict == Verdict::Fails) {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    };
    Ok(UniformComplexityCertificate {
        verdict,
        side: certified.map(|c| c.side),
        eigenvalue: certified.map(|c| c.eigenvalue),
        vector: certified.map(|c| c.vector.clone()),
        checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharedEigenvectorResult {
    pub dimension: f64,
    pub vector: Vec<f64>,
    /// `lambda_s` per level-`(r-1)` code (zero for absent symbols).
    pub eigenvalues: Vec<f64>,
}

/// Closed-form dimension when one positive right vector satisfies
/// `A_s v = lambda_s v` for every level-`(r-1)` symbol:
/// `log_{m_1}` of the nested single-letter sum with `lambda_s` as fibers.
pub fn shared_eigenvector_dimension(g: &LabeledDigraph) -> Result<SharedEigenvectorResult> {
    let g = g.forward_prune();
    if g.is_empty() {
        return Err(Error::EmptySystem);
    }
    let r = g.dim();
    let bases = g.bases();
    let total = g.total_adjacency();
    let v = spectral_radius(&total)?.right;
    if !positive(&v) {
        return Err(Error::NoSharedVector(
            "Perron vector of the sum is not positive".into(),
        ));
    }
    if r == 1 {
        let rho = spectral_radius(&total)?.radius;
        return Ok(SharedEigenvectorResult {
            dimension: rho.ln() / (bases.base(0) as f64).ln(),
            vector: v,
            eigenvalues: vec![rho],
        });
    }
    let mut eigenvalues = Vec::new();
    for (s, a) in g.restricted_family().iter().enumerate() {
        let w = a.right_apply(&v);
        let lambda = w.iter().sum::<f64>() / v.iter().sum::<f64>();
        let res: f64 = w.iter().zip(&v).map(|(x, y)| (x - lambda * y).abs()).sum();
        if res > CERTIFY_TOL * lambda.max(1.0) {
            return Err(Error::NoSharedVector(format!(
                "symbol {:?} leaves the vector with residual {res:.3e}",
                bases.decode(r - 1, s as u32)
            )));
        }
        eigenvalues.push(lambda);
    }
    let exps = bases.exponents();
    // Fold from level r-1 upward: each node's value is the sum of its
    // children's values raised to the child-level exponent.
    let mut values: Vec<f64> = eigenvalues.iter().map(|&l| l.powf(exps[r - 2])).collect();
    for level in (1..r - 1).rev() {
        let m = bases.base(level) as usize;
        values = values
            .chunks(m)
            .map(|c| c.iter().sum::<f64>().powf(exps[level - 1]))
            .collect();
    }
    let total_sum: f64 = values.iter().sum();
    Ok(SharedEigenvectorResult {
        dimension: total_sum.ln() / (bases.base(0) as f64).ln(),
        vector: v,
        eigenvalues,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureProbe {
    pub verdict: Verdict,
    pub minkowski: f64,
    pub hausdorff: f64,
    pub hausdorff_uncertainty: f64,
    /// `minkowski - hausdorff`.
    pub gap: f64,
}

/// Set the uniform-complexity verdict beside the gap between the Minkowski
/// dimension and the surrogate Hausdorff estimate.
pub fn conjecture_probe(g: &LabeledDigraph, n_max: usize) -> Result<ConjectureProbe> {
    let cert = uniform_complexity_check(g)?;
    let minkowski = minkowski_dimension(g)?.dimension;
    let est = dimension_estimate(g, n_max, FiberMode::NormSurrogate)?;
    Ok(ConjectureProbe {
        verdict: cert.verdict,
        minkowski,
        hausdorff: est.estimate,
        hausdorff_uncertainty: est.uncertainty,
        gap: minkowski - est.estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Bases, Edge};
    use crate::systems;
    use proptest::prelude::*;

    fn mat(rows: &[&[f64]]) -> NonnegMatrix {
        NonnegMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn single_vertex(bases: Vec<u32>, labels: &[&[u32]]) -> LabeledDigraph {
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

    #[test]
    fn radius_of_small_matrices() {
        let p = spectral_radius(&mat(&[&[2.0, 2.0], &[4.0, 0.0]])).unwrap();
        assert!((p.radius - 4.0).abs() < 1e-12);
        assert!((p.right[0] - 0.5).abs() < 1e-12);
        assert!((p.left[0] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            spectral_radius(&NonnegMatrix::zeros(3)).unwrap().radius,
            0.0
        );
        let nil = spectral_radius(&mat(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap();
        assert!(nil.radius.abs() < 1e-6);
    }

    #[test]
    fn periodic_matrix_converges() {
        let p = spectral_radius(&mat(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
        assert!((p.radius - 1.0).abs() < 1e-12);
        assert!(!p.dense_fallback);
    }

    #[test]
    fn reducible_matrix_uses_fallback_or_power() {
        let p = spectral_radius(&mat(&[
            &[2.0, 1.0, 0.0],
            &[0.0, 2.0, 1.0],
            &[0.0, 0.0, 2.0],
        ]))
        .unwrap();
        assert!((p.radius - 2.0).abs() < 1e-3);
    }

    #[test]
    fn full_shift_entropies() {
        let b = Bases::new(vec![2, 3]).unwrap();
        let edges = (0..6)
            .map(|c| Edge {
                from: 0,
                to: 0,
                label: b.decode(2, c),
            })
            .collect();
        let g = LabeledDigraph::new(b, 1, edges).unwrap();
        assert!((entropy_level(&g, 1).unwrap().entropy - 2f64.ln()).abs() < 1e-12);
        assert!((entropy_level(&g, 2).unwrap().entropy - 6f64.ln()).abs() < 1e-12);
        assert!((minkowski_dimension(&g).unwrap().dimension - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reference_minkowski_values() {
        let fig2 = minkowski_dimension(&systems::fig2()).unwrap();
        assert!((fig2.dimension - (1.0 + 2f64.ln() / 5f64.ln())).abs() < 1e-9);
        let fig4 = minkowski_dimension(&systems::fig4()).unwrap();
        assert!((fig4.dimension - (1.0 + 3f64.ln() / 5f64.ln())).abs() < 1e-9);
    }

    #[test]
    fn non_primitive_rejected() {
        let b = Bases::new(vec![2, 2]).unwrap();
        let g = LabeledDigraph::new(
            b,
            2,
            vec![
                Edge {
                    from: 0,
                    to: 1,
                    label: vec![0, 0],
                },
                Edge {
                    from: 1,
                    to: 0,
                    label: vec![0, 0],
                },
            ],
        )
        .unwrap();
        assert!(matches!(minkowski_dimension(&g), Err(Error::NotPrimitive)));
    }

    #[test]
    fn reference_systems_are_uniform() {
        let c = uniform_complexity_check(&systems::fig2()).unwrap();
        assert_eq!(c.verdict, Verdict::Holds);
        assert_eq!(c.side, Some(Side::Left));
        assert!((c.eigenvalue.unwrap() - 2.0).abs() < 1e-9);
        let v = c.vector.unwrap();
        assert!((v[0] / v[1] - 2.0).abs() < 1e-9);

        let c = uniform_complexity_check(&systems::fig4()).unwrap();
        assert_eq!(c.verdict, Verdict::Holds);
        assert!((c.eigenvalue.unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn mcmullen_fails() {
        let g = single_vertex(vec![2, 3], &[&[0, 0], &[1, 0], &[1, 1]]);
        let c = uniform_complexity_check(&g).unwrap();
        assert_eq!(c.verdict, Verdict::Fails);
        let probe = conjecture_probe(&g, 8).unwrap();
        assert!(probe.gap > 0.01);
    }

    #[test]
    fn spatial_systems_rejected_by_check() {
        assert!(matches!(
            uniform_complexity_check(&systems::ex2_11()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn shared_vector_closed_form() {
        // A_0 = [[1,1],[2,0]], A_1 = [[1,2],[3,0]] share the right vector (1,1).
        let b = Bases::new(vec![2, 3]).unwrap();
        let edges = vec![
            Edge {
                from: 0,
                to: 0,
                label: vec![0, 0],
            },
            Edge {
                from: 0,
                to: 1,
                label: vec![0, 1],
            },
            Edge {
                from: 1,
                to: 0,
                label: vec![0, 0],
            },
            Edge {
                from: 1,
                to: 0,
                label: vec![0, 1],
            },
            Edge {
                from: 0,
                to: 0,
                label: vec![1, 0],
            },
            Edge {
                from: 0,
                to: 1,
                label: vec![1, 1],
            },
            Edge {
                from: 0,
                to: 1,
                label: vec![1, 2],
            },
            Edge {
                from: 1,
                to: 0,
                label: vec![1, 0],
            },
            Edge {
                from: 1,
                to: 0,
                label: vec![1, 1],
            },
            Edge {
                from: 1,
                to: 0,
                label: vec![1, 2],
            },
        ];
        let g = LabeledDigraph::new(b, 2, edges).unwrap();
        let res = shared_eigenvector_dimension(&g).unwrap();
        let a = 2f64.ln() / 3f64.ln();
        let expect = (2f64.powf(a) + 3f64.powf(a)).log2();
        assert!((res.dimension - expect).abs() < 1e-12);
        let est = dimension_estimate(&g, 14, FiberMode::NormSurrogate).unwrap();
        assert!((est.estimate - expect).abs() < 1e-3);
    }

    #[test]
    fn no_shared_vector_reported() {
        assert!(matches!(
            shared_eigenvector_dimension(&systems::fig2()),
            Err(Error::NoSharedVector(_))
        ));
    }

    proptest! {
        #[test]
        fn radius_within_row_sum_bounds(
            entries in prop::collection::vec(0u8..6, 1..=25),
        ) {
            let n = (entries.len() as f64).sqrt() as usize;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| entries[i * n + j] as f64).collect())
                .collect();
            let m = NonnegMatrix::from_rows(&rows).unwrap();
            let p = spectral_radius(&m).unwrap();
            let sums: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
            let lo = sums.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = sums.iter().cloned().fold(0.0, f64::max);
            prop_assert!(p.radius >= lo - 1e-6 && p.radius <= hi + 1e-6);
            if m.is_primitive() {
                prop_assert!(p.right_residual <= 1e-10 * p.radius);
                prop_assert!(p.left_residual <= 1e-10 * p.radius);
                prop_assert!(p.right.iter().all(|&x| x > 0.0));
            }
        }
    }
}
