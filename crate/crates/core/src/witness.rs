//! Searching for negatively curved planes of `Q_t`, and checking the outcome
//! against what structure theory predicts.
//!
//! The structured search draws a commuting pair `(u, v)` from a maximal torus,
//! conjugates it by a random adjoint flow, and pulls it back through the
//! deformation. Whenever the `h`-parts of `u` and `v` fail to commute, the
//! pulled-back plane has numerator `−¼t(t−1)³(1+3t)‖[x_h, y_h]‖²`, negative for
//! every `t > 1`. A blind random scan followed by local descent backs it up.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{LieAlgebra, Vector};
use crate::curvature::{DeformedMetric, PlaneCurvature};
use crate::error::{Error, Result};
use crate::linalg::{derive_seed, gaussian_vector, null_space, rng};
use crate::split::OrthogonalSplit;
use crate::structure::{rank, semisimple_part_is_ideal};
use crate::subspace::Subspace;
use rand::Rng;

/// Minimum `‖[u_h, v_h]‖_Q` (unit `u`, `v`) for a torus pair to be used.
pub const WITNESS_THRESHOLD: f64 = 1e-6;

/// A witness numerator must lie below `−CERTIFICATION_MARGIN · scale`, where
/// scale is `(‖x‖_Q ‖y‖_Q · max|c|)²`.
pub const CERTIFICATION_MARGIN: f64 = 1e-10;

/// Relative agreement required between closed-form and direct numerators.
pub const AGREEMENT_TOLERANCE: f64 = 1e-8;

/// Largest stretch at which ideal-type pairs are still expected to be
/// non-negatively curved.
pub const OPTIMAL_STRETCH: f64 = 4.0 / 3.0;

const SCAN_CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    RandomScan,
    TorusConjugation,
    DescentRefined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutingPair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub residual: f64,
}

/// A certified negatively curved plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneWitness {
    pub plane: PlaneCurvature,
    pub strategy: Strategy,
    pub commuting_pair: Option<CommutingPair>,
    /// Numerator re-evaluated from the general formula.
    pub direct_numerator: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub attempts: usize,
    pub samples: usize,
    pub descent_steps: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { attempts: 64, samples: 10_000, descent_steps: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub min_numerator: f64,
    pub argmin: PlaneCurvature,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Semisimple part not an ideal: negative curvature predicted.
    Contrapositive,
    /// Semisimple part an ideal and `t ≤ 4/3`: non-negativity expected.
    Optimality,
    /// Semisimple part an ideal and `t > 4/3`: no prediction.
    Descriptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StretchOutcome {
    pub t: f64,
    pub regime: Regime,
    pub witness: Option<PlaneWitness>,
    /// Smallest numerator seen by any strategy at this `t`.
    pub min_numerator: f64,
    /// Minimum of the blind scan plus descent, when it ran.
    pub scan_min: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    Inconsistent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pair: String,
    pub t_values: Vec<f64>,
    pub ss_part_is_ideal: bool,
    pub budget: SearchBudget,
    pub seed: u64,
    pub outcomes: Vec<StretchOutcome>,
    pub verdict: Verdict,
}

fn unit(g: &LieAlgebra, v: Vector) -> Vector {
    let n = g.q_norm(&v);
    v / n
}

/// Random element of `ker(ad_x)` for a generic `x`, as a `Q`-orthonormal
/// basis of the centralizer together with `x`.
fn generic_centralizer(g: &LieAlgebra, r: &mut rand_chacha::ChaCha8Rng) -> (Vector, Subspace) {
    let x = unit(g, gaussian_vector(r, g.dim()));
    let kernel = null_space(&g.ad(&x));
    (x, Subspace::span_unchecked(g, &kernel))
}

/// A `Q`-orthonormal commuting pair from a generic maximal torus.
pub fn torus_pair(g: &LieAlgebra, seed: u64) -> Result<(Vector, Vector)> {
    let mut r = rng(seed);
    let (x, centralizer) = generic_centralizer(g, &mut r);
    if centralizer.dim() < 2 {
        return Err(Error::RankDeficient { rank: centralizer.dim() });
    }
    let line = Subspace::span_unchecked(g, std::slice::from_ref(&x));
    let rest = line.complement_in(g, &centralizer);
    let y = rest.basis() * gaussian_vector(&mut r, rest.dim());
    Ok((x, unit(g, y)))
}

/// A commuting pair conjugated by a random adjoint flow. Unlike
/// [`torus_pair`] this also works in rank one, where the pair is parallel.
pub fn random_commuting_pair(g: &LieAlgebra, seed: u64) -> (Vector, Vector) {
    let mut r = rng(seed);
    let (x, centralizer) = generic_centralizer(g, &mut r);
    let y = unit(g, centralizer.basis() * gaussian_vector(&mut r, centralizer.dim()));
    let a = unit(g, gaussian_vector(&mut r, g.dim()));
    let tau = r.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    let flow = g.flow_matrix(&a, tau);
    (&flow * x, &flow * y)
}

fn certification_scale(g: &LieAlgebra, x: &Vector, y: &Vector) -> f64 {
    (g.q_norm(x) * g.q_norm(y) * g.scale()).powi(2)
}

/// Double-entry check for a closed-form numerator.
fn certify_closed_form(g: &LieAlgebra, x: &Vector, y: &Vector, closed: f64, direct: f64) -> bool {
    let margin = CERTIFICATION_MARGIN * certification_scale(g, x, y);
    let agree = (closed - direct).abs() <= AGREEMENT_TOLERANCE * closed.abs().max(direct.abs());
    agree && closed < -margin && direct < -margin
}

/// Check for a plane found by search: the numerator is negative beyond the
/// margin and re-evaluation in a second basis of the same plane agrees.
fn certify_searched(dm: &DeformedMetric<'_>, x: &Vector, y: &Vector) -> Option<f64> {
    let g = dm.split().algebra();
    let direct = dm.numerator(x, y);
    let margin = CERTIFICATION_MARGIN * certification_scale(g, x, y);
    if direct >= -margin {
        return None;
    }
    let k1 = dm.sectional_curvature(x, y).ok()?;
    let k2 = dm.sectional_curvature(&(x + y), y).ok()?;
    ((k1 - k2).abs() <= AGREEMENT_TOLERANCE * k1.abs() && k2 < 0.0).then_some(direct)
}

/// Look for a certified witness among conjugated torus pairs.
///
/// Attempt 0 uses an unconjugated torus pair; later attempts conjugate by
/// `exp(τ·ad_a)` for random `a` and `τ`.
pub fn conjugated_commuting_witness(
    s: &OrthogonalSplit,
    t: f64,
    budget: usize,
    seed: u64,
) -> Result<Option<PlaneWitness>> {
    if !(t > 1.0) {
        return Err(Error::InvalidArgument(format!("witness search needs t > 1, got {t}")));
    }
    let g = s.algebra();
    let dm = DeformedMetric::new(s, t)?;
    for attempt in 0..budget {
        let attempt_seed = derive_seed(seed, attempt as u64);
        let (u0, v0) = torus_pair(g, attempt_seed)?;
        let (u, v) = if attempt == 0 {
            (u0, v0)
        } else {
            let mut r = rng(derive_seed(attempt_seed, 1));
            let a = unit(g, gaussian_vector(&mut r, g.dim()));
            let tau = r.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let flow = g.flow_matrix(&a, tau);
            (&flow * u0, &flow * v0)
        };
        let hh = g.br(&s.ph(&u), &s.ph(&v));
        if g.q_norm(&hh) <= WITNESS_THRESHOLD {
            continue;
        }
        let residual = g.q_norm(&g.br(&u, &v));
        let plane = dm.commuting_plane_curvature(&u, &v)?;
        let (x, y) = (plane.x_vector(), plane.y_vector());
        let direct = dm.numerator(&x, &y);
        if certify_closed_form(g, &x, &y, plane.numerator, direct) {
            return Ok(Some(PlaneWitness {
                plane,
                strategy: Strategy::TorusConjugation,
                commuting_pair: Some(CommutingPair {
                    u: u.as_slice().to_vec(),
                    v: v.as_slice().to_vec(),
                    residual,
                }),
                direct_numerator: direct,
                seed: attempt_seed,
            }));
        }
    }
    Ok(None)
}

/// `Q_t`-orthonormalize `(x, y)`; `None` if the pair is degenerate.
fn qt_orthonormal(dm: &DeformedMetric<'_>, x: Vector, y: Vector) -> Option<(Vector, Vector)> {
    let nx = dm.qt(&x, &x).sqrt();
    if !(nx > 0.0) {
        return None;
    }
    let x = x / nx;
    let y = &y - &x * dm.qt(&x, &y);
    let ny = dm.qt(&y, &y).sqrt();
    if !(ny > 1e-10) {
        return None;
    }
    Some((x, y / ny))
}

/// Minimum numerator over `samples` random `Q_t`-orthonormal planes.
pub fn random_plane_scan(s: &OrthogonalSplit, t: f64, samples: usize, seed: u64) -> Result<ScanResult> {
    if samples == 0 {
        return Err(Error::InvalidArgument("scan needs at least one sample".into()));
    }
    let dm = DeformedMetric::new(s, t)?;
    let n = s.algebra().dim();
    let chunks = samples.div_ceil(SCAN_CHUNK);
    let best: Vec<Option<(f64, Vector, Vector)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng(derive_seed(seed, c as u64));
            let count = SCAN_CHUNK.min(samples - c * SCAN_CHUNK);
            let mut best: Option<(f64, Vector, Vector)> = None;
            for _ in 0..count {
                let x = gaussian_vector(&mut r, n);
                let y = gaussian_vector(&mut r, n);
                let Some((x, y)) = qt_orthonormal(&dm, x, y) else { continue };
                let val = dm.numerator(&x, &y);
                if best.as_ref().is_none_or(|b| val < b.0) {
                    best = Some((val, x, y));
                }
            }
            best
        })
        .collect();
    let (min, x, y) = best
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .ok_or_else(|| Error::InvalidArgument("every sampled plane was degenerate".into()))?;
    Ok(ScanResult { min_numerator: min, argmin: dm.assemble(&x, &y, min), samples, seed })
}

/// Local descent of the numerator over `Q_t`-orthonormal pairs, using central
/// finite-difference gradients and Armijo backtracking. Never returns a value
/// above the start value.
pub fn descent_refine(
    s: &OrthogonalSplit,
    t: f64,
    x0: &Vector,
    y0: &Vector,
    steps: usize,
) -> Result<PlaneCurvature> {
    let dm = DeformedMetric::new(s, t)?;
    let start = dm.plane(x0, y0)?;
    let Some((mut x, mut y)) = qt_orthonormal(&dm, x0.clone(), y0.clone()) else {
        return Ok(start);
    };
    let n = x.len();
    let h = 1e-5;
    let mut f = dm.numerator(&x, &y);
    let mut alpha = 1.0;
    for _ in 0..steps {
        let mut gx = Vector::zeros(n);
        let mut gy = Vector::zeros(n);
        for i in 0..n {
            let mut xp = x.clone();
            xp[i] += h;
            let mut xm = x.clone();
            xm[i] -= h;
            gx[i] = (dm.numerator(&xp, &y) - dm.numerator(&xm, &y)) / (2.0 * h);
            let mut yp = y.clone();
            yp[i] += h;
            let mut ym = y.clone();
            ym[i] -= h;
            gy[i] = (dm.numerator(&x, &yp) - dm.numerator(&x, &ym)) / (2.0 * h);
        }
        // tangent directions of the unit spheres
        let dx = -(&gx - &x * dm.qt(&x, &gx));
        let dy = -(&gy - &y * dm.qt(&y, &gy));
        let slope = dx.norm_squared() + dy.norm_squared();
        if slope < 1e-24 {
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let cand = qt_orthonormal(&dm, &x + &dx * alpha, &y + &dy * alpha);
            if let Some((cx, cy)) = cand {
                let fc = dm.numerator(&cx, &cy);
                if fc <= f - 1e-4 * alpha * slope {
                    x = cx;
                    y = cy;
                    f = fc;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
        alpha = (alpha * 2.0).min(4.0);
    }
    if f <= start.numerator {
        Ok(dm.assemble(&x, &y, f))
    } else {
        Ok(start)
    }
}

/// Run the full check for one split over a grid of stretch factors `t > 1`.
///
/// When `[h, h]` is not an ideal of `g`, every `t > 1` must admit a negatively
/// curved plane; a grid point without a certified witness makes the verdict
/// inconclusive, never a refutation. When `[h, h]` is an ideal, grid points
/// with `t ≤ 4/3` are scanned for non-negativity and a certified witness there
/// makes the verdict inconsistent. Points above `4/3` are descriptive only.
pub fn verify_theorem(
    pair: &str,
    s: &OrthogonalSplit,
    t_grid: &[f64],
    budget: &SearchBudget,
    seed: u64,
) -> Result<VerificationReport> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("empty t grid".into()));
    }
    if let Some(bad) = t_grid.iter().find(|t| !(**t > 1.0 && t.is_finite())) {
        return Err(Error::InvalidArgument(format!("t grid must be > 1, found {bad}")));
    }
    let g = s.algebra();
    let ss = semisimple_part_is_ideal(g, s.h())?;
    let torus_available = rank(g, derive_seed(seed, u64::MAX)) >= 2;

    let mut outcomes = Vec::with_capacity(t_grid.len());
    for (i, &t) in t_grid.iter().enumerate() {
        let regime = match (ss, t <= OPTIMAL_STRETCH) {
            (false, _) => Regime::Contrapositive,
            (true, true) => Regime::Optimality,
            (true, false) => Regime::Descriptive,
        };
        let stream = 4 * i as u64;
        let mut witness = None;
        let mut min_numerator = f64::INFINITY;
        if torus_available {
            witness = conjugated_commuting_witness(s, t, budget.attempts, derive_seed(seed, stream))?;
            if let Some(w) = &witness {
                min_numerator = w.plane.numerator;
            }
        }
        let mut scan_min = None;
        if witness.is_none() || regime != Regime::Contrapositive {
            let scan = random_plane_scan(s, t, budget.samples, derive_seed(seed, stream + 1))?;
            let refined = descent_refine(
                s,
                t,
                &scan.argmin.x_vector(),
                &scan.argmin.y_vector(),
                budget.descent_steps,
            )?;
            let best = refined.numerator.min(scan.min_numerator);
            scan_min = Some(best);
            min_numerator = min_numerator.min(best);
            if witness.is_none() {
                let dm = DeformedMetric::new(s, t)?;
                let (x, y) = (refined.x_vector(), refined.y_vector());
                if let Some(direct) = certify_searched(&dm, &x, &y) {
                    let strategy = if budget.descent_steps > 0 && refined.numerator < scan.min_numerator {
                        Strategy::DescentRefined
                    } else {
                        Strategy::RandomScan
                    };
                    witness = Some(PlaneWitness {
                        plane: refined,
                        strategy,
                        commuting_pair: None,
                        direct_numerator: direct,
                        seed: scan.seed,
                    });
                }
            }
        }
        outcomes.push(StretchOutcome { t, regime, witness, min_numerator, scan_min });
    }

    let verdict = if ss {
        if outcomes.iter().any(|o| o.regime == Regime::Optimality && o.witness.is_some()) {
            Verdict::Inconsistent
        } else {
            Verdict::Consistent
        }
    } else if outcomes.iter().all(|o| o.witness.is_some()) {
        Verdict::Consistent
    } else {
        Verdict::Inconclusive
    };

    Ok(VerificationReport {
        pair: pair.to_string(),
        t_values: t_grid.to_vec(),
        ss_part_is_ideal: ss,
        budget: *budget,
        seed,
        outcomes,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_so, build_su};
    use crate::split::diagonal_embedding;

    fn diag() -> OrthogonalSplit {
        diagonal_embedding(&build_su(2).unwrap()).unwrap().1
    }

    fn factor() -> OrthogonalSplit {
        let su2 = build_su(2).unwrap();
        let g = su2.direct_sum(&su2).unwrap();
        OrthogonalSplit::new(&g, &[g.basis_vector(0), g.basis_vector(1), g.basis_vector(2)]).unwrap()
    }

    fn so4_block() -> OrthogonalSplit {
        let g = build_so(4).unwrap();
        OrthogonalSplit::new(&g, &[g.basis_vector(0), g.basis_vector(1), g.basis_vector(3)]).unwrap()
    }

    #[test]
    fn torus_pair_in_so4() {
        let g = build_so(4).unwrap();
        let (x, y) = torus_pair(&g, 5).unwrap();
        assert!((g.q_norm(&x) - 1.0).abs() < 1e-12);
        assert!((g.q_norm(&y) - 1.0).abs() < 1e-12);
        assert!(g.q_inner(&x, &y).abs() < 1e-12);
        assert!(g.q_norm(&g.bracket(&x, &y).unwrap()) < 1e-9);
    }

    #[test]
    fn torus_pair_needs_rank_two() {
        let g = build_su(2).unwrap();
        assert!(matches!(torus_pair(&g, 1), Err(Error::RankDeficient { rank: 1 })));
    }

    #[test]
    fn conjugation_preserves_commutation() {
        let g = build_so(5).unwrap();
        for seed in 0..20 {
            let (u, v) = random_commuting_pair(&g, seed);
            assert!(g.q_norm(&g.bracket(&u, &v).unwrap()) < 1e-8);
        }
    }

    #[test]
    fn diagonal_split_witness_is_fast() {
        let s = diag();
        let w = conjugated_commuting_witness(&s, 1.1, 10, 0).unwrap().expect("witness");
        assert_eq!(w.strategy, Strategy::TorusConjugation);
        assert!(w.plane.numerator < 0.0);
        let g = s.algebra();
        let dm = DeformedMetric::new(&s, 1.1).unwrap();
        let recomputed = dm.curvature_numerator(&w.plane.x_vector(), &w.plane.y_vector()).unwrap();
        assert!((recomputed - w.direct_numerator).abs() <= 1e-10 * recomputed.abs());
        assert!(g.q_norm(&g.bracket(&w.plane.x_vector(), &w.plane.y_vector()).unwrap()) > 0.0);
    }

    #[test]
    fn so3_block_witness() {
        let s = so4_block();
        let w = conjugated_commuting_witness(&s, 1.25, 64, 7).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn ideal_factor_never_yields_a_witness() {
        let s = factor();
        for t in [1.1, 2.0, 5.0] {
            assert!(conjugated_commuting_witness(&s, t, 64, 3).unwrap().is_none());
        }
    }

    #[test]
    fn witness_search_requires_stretch() {
        assert!(conjugated_commuting_witness(&diag(), 1.0, 4, 0).is_err());
    }

    #[test]
    fn scan_on_abelian_and_biinvariant() {
        let ab = LieAlgebra::abelian(3).unwrap();
        let s = OrthogonalSplit::new(&ab, &[ab.basis_vector(0)]).unwrap();
        let r = random_plane_scan(&s, 1.7, 100, 1).unwrap();
        assert_eq!(r.min_numerator, 0.0);
        let refined = descent_refine(&s, 1.7, &r.argmin.x_vector(), &r.argmin.y_vector(), 20).unwrap();
        assert_eq!(refined.numerator, 0.0);

        let r = random_plane_scan(&diag(), 1.0, 10_000, 1).unwrap();
        assert!(r.min_numerator >= -1e-9);
    }

    #[test]
    fn scan_is_deterministic() {
        let s = so4_block();
        let a = random_plane_scan(&s, 1.5, 3000, 9).unwrap();
        let b = random_plane_scan(&s, 1.5, 3000, 9).unwrap();
        assert_eq!(a, b);
        assert!(random_plane_scan(&s, 1.5, 0, 9).is_err());
    }

    #[test]
    fn berger_sphere_goes_negative_past_four_thirds() {
        // observed behavior, outside what the theorem asserts
        let g = build_su(2).unwrap();
        let s = OrthogonalSplit::new(&g, &[g.basis_vector(2)]).unwrap();
        let r = random_plane_scan(&s, 1.5, 100_000, 2).unwrap();
        assert!(r.min_numerator < 0.0);
    }

    #[test]
    fn descent_improves_on_scan() {
        let s = diag();
        let scan = random_plane_scan(&s, 1.2, 2000, 4).unwrap();
        let refined =
            descent_refine(&s, 1.2, &scan.argmin.x_vector(), &scan.argmin.y_vector(), 200).unwrap();
        assert!(refined.numerator <= scan.min_numerator);
        assert!(refined.numerator < 0.0);

        // starting at a certified witness stays negative and does not increase
        let w = conjugated_commuting_witness(&s, 1.2, 4, 0).unwrap().unwrap();
        let r = descent_refine(&s, 1.2, &w.plane.x_vector(), &w.plane.y_vector(), 50).unwrap();
        assert!(r.numerator <= w.plane.numerator);
    }

    #[test]
    fn verify_diagonal_split() {
        let report = verify_theorem("su2su2-diag", &diag(), &[1.05, 1.25, 1.5], &SearchBudget::default(), 42).unwrap();
        assert!(!report.ss_part_is_ideal);
        assert_eq!(report.verdict, Verdict::Consistent);
        assert!(report.outcomes.iter().all(|o| o.witness.is_some()));
    }

    #[test]
    fn verify_ideal_cases() {
        let report = verify_theorem("su2su2-factor", &factor(), &[1.2], &SearchBudget::default(), 42).unwrap();
        assert!(report.ss_part_is_ideal);
        assert_eq!(report.verdict, Verdict::Consistent);
        assert!(report.outcomes[0].scan_min.unwrap() >= -1e-9);

        let g = build_su(2).unwrap();
        let s = OrthogonalSplit::new(&g, &[g.basis_vector(2)]).unwrap();
        let report = verify_theorem("su2-u1", &s, &[1.25], &SearchBudget::default(), 42).unwrap();
        assert_eq!(report.verdict, Verdict::Consistent);
        assert_eq!(report.outcomes[0].regime, Regime::Optimality);
        assert!(report.outcomes[0].min_numerator >= -1e-9);
    }

    #[test]
    fn verify_rejects_bad_grid() {
        let s = diag();
        assert!(verify_theorem("x", &s, &[1.2, 1.0], &SearchBudget::default(), 0).is_err());
        assert!(verify_theorem("x", &s, &[], &SearchBudget::default(), 0).is_err());
    }
}
