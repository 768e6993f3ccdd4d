//! Structure theory of compact-type subalgebras: derived algebra, center,
//! simple-ideal decomposition, ideal tests and closures, rank, and the joint
//! rotation-block normal form of two commuting skew operators.
//!
//! Subalgebras here carry a positive-definite ad-invariant form, hence are
//! reductive, so the semisimple part of `h` is its derived algebra `[h, h]`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::algebra::{LieAlgebra, Vector};
use crate::curvature::COMMUTATION_TOLERANCE;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{columns_to_matrix, derive_seed, gaussian_vector, kernel_dim, null_space, rng};
use crate::subspace::Subspace;

/// Number of generic draws used by [`rank`] and [`rank_of_subalgebra`].
pub const RANK_DRAWS: usize = 8;

const DECOMPOSITION_RETRIES: u64 = 5;

/// `h = z(h) ⊕ h_1 ⊕ … ⊕ h_r`.
#[derive(Debug, Clone)]
pub struct IdealDecomposition {
    pub center: Subspace,
    pub ideals: Vec<Subspace>,
    /// Per simple ideal: worst of its closure residual and its cross-bracket
    /// residual with the other parts.
    pub residuals: Vec<f64>,
}

/// Outcome of an ideal test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealCheck {
    pub is_ideal: bool,
    pub residual: f64,
}

/// A 2-plane on which two commuting skew operators both act by multiples of a
/// quarter turn: `ad_{x1} v = λ w`, `ad_{x1} w = −λ v`, likewise with `μ`.
#[derive(Debug, Clone)]
pub struct RotationBlock {
    pub v: Vector,
    pub w: Vector,
    pub lambda: f64,
    pub mu: f64,
    /// `μ x1 − λ x2`, which brackets the whole block to zero.
    pub annihilator: Vector,
}

#[derive(Debug, Clone)]
pub struct RotationBlocks {
    pub kernel: Subspace,
    pub blocks: Vec<RotationBlock>,
}

fn require_subalgebra(g: &LieAlgebra, s: &Subspace) -> Result<()> {
    check_dim(g.dim(), s.ambient_dim())?;
    let residual = s.closure_residual(g);
    if residual > g.tolerance() {
        return Err(Error::NotASubalgebra { residual });
    }
    Ok(())
}

/// `[s, s]`; for compact-type `s` this is its semisimple part.
pub fn derived_subalgebra(g: &LieAlgebra, s: &Subspace) -> Result<Subspace> {
    require_subalgebra(g, s)?;
    Ok(derived_unchecked(g, s))
}

fn derived_unchecked(g: &LieAlgebra, s: &Subspace) -> Subspace {
    let v = s.vectors();
    let mut brackets = Vec::new();
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            brackets.push(g.br(&v[i], &v[j]));
        }
    }
    Subspace::span_unchecked(g, &brackets)
}

/// Center `z(s)`: elements of `s` bracketing every basis vector of `s` to zero.
pub fn center(g: &LieAlgebra, s: &Subspace) -> Result<Subspace> {
    require_subalgebra(g, s)?;
    Ok(center_unchecked(g, s))
}

fn center_unchecked(g: &LieAlgebra, s: &Subspace) -> Subspace {
    let p = s.dim();
    if p == 0 {
        return Subspace::zero(g.dim());
    }
    let n = g.dim();
    let basis = s.basis();
    let mut stacked = DMatrix::zeros(p * n, p);
    for (i, b) in s.vectors().iter().enumerate() {
        let block = g.ad(b) * basis;
        stacked.view_mut((i * n, 0), (n, p)).copy_from(&block);
    }
    let kernel: Vec<Vector> = null_space(&stacked).into_iter().map(|c| basis * c).collect();
    // orthonormal coordinates map to Q-orthonormal vectors
    Subspace::from_orthonormal(columns_to_matrix(n, &kernel))
}

/// Matrices of `ad_{s_i}` restricted to `s`, in the orthonormal basis of `s`.
fn restricted_ad(g: &LieAlgebra, s: &Subspace) -> Vec<DMatrix<f64>> {
    let q = g.inner_product();
    let basis = s.basis();
    s.vectors().iter().map(|b| basis.transpose() * q * g.ad(b) * basis).collect()
}

/// Split `h` into its center and simple ideals.
///
/// The simple ideals are the eigenspaces of a generic symmetric element of the
/// centroid of `[h, h]` (the linear maps commuting with every `ad_x`). A draw
/// that fails verification is retried with a fresh element.
pub fn simple_ideal_decomposition(g: &LieAlgebra, h: &Subspace, seed: u64) -> Result<IdealDecomposition> {
    require_subalgebra(g, h)?;
    let center = center_unchecked(g, h);
    let s = derived_unchecked(g, h);
    if center.dim() + s.dim() != h.dim() {
        return Err(Error::DecompositionFailed(format!(
            "center ({}) and derived algebra ({}) do not fill h ({})",
            center.dim(),
            s.dim(),
            h.dim()
        )));
    }
    let p = s.dim();
    if p == 0 {
        return Ok(IdealDecomposition { center, ideals: Vec::new(), residuals: Vec::new() });
    }

    // centroid: T with T A_i − A_i T = 0, vec(T) column-major
    let ads = restricted_ad(g, &s);
    let pp = p * p;
    let mut system = DMatrix::zeros(p * pp, pp);
    for (i, a) in ads.iter().enumerate() {
        let at = a.transpose();
        for r in 0..p {
            for c in 0..p {
                let row = i * pp + c * p + r; // entry (r, c) of T A − A T
                for k in 0..p {
                    // (T A)[r,c] = Σ_k T[r,k] A[k,c]
                    system[(row, k * p + r)] += at[(c, k)];
                    // (A T)[r,c] = Σ_k A[r,k] T[k,c]
                    system[(row, c * p + k)] -= a[(r, k)];
                }
            }
        }
    }
    let centroid = null_space(&system);
    let expected = centroid.len();

    let mut last_error = String::new();
    for attempt in 0..DECOMPOSITION_RETRIES {
        let mut r = rng(derive_seed(seed, attempt));
        let coeffs = gaussian_vector(&mut r, expected);
        let mut t = DMatrix::zeros(p, p);
        for (c, vec_t) in coeffs.iter().zip(&centroid) {
            t += DMatrix::from_column_slice(p, p, vec_t.as_slice()) * *c;
        }
        let sym = (&t + t.transpose()) * 0.5;
        match split_by_eigenspaces(g, &s, sym, expected) {
            Ok((ideals, residuals)) => {
                return Ok(IdealDecomposition { center, ideals, residuals });
            }
            Err(e) => last_error = e,
        }
    }
    Err(Error::DecompositionFailed(last_error))
}

fn split_by_eigenspaces(
    g: &LieAlgebra,
    s: &Subspace,
    sym: DMatrix<f64>,
    expected: usize,
) -> std::result::Result<(Vec<Subspace>, Vec<f64>), String> {
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let spread = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let gap = 1e-6 * spread;

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match clusters.last_mut() {
            Some(cl) if eig.eigenvalues[i] - eig.eigenvalues[*cl.last().unwrap()] <= gap => cl.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    if clusters.len() != expected {
        return Err(format!("found {} eigenspaces for a {expected}-dimensional centroid", clusters.len()));
    }

    let basis = s.basis();
    let ideals: Vec<Subspace> = clusters
        .iter()
        .map(|cl| {
            let cols: Vec<Vector> = cl.iter().map(|&i| basis * eig.eigenvectors.column(i)).collect();
            Subspace::span_unchecked(g, &cols)
        })
        .collect();

    let tol = g.tolerance();
    let mut residuals = Vec::with_capacity(ideals.len());
    for (k, hk) in ideals.iter().enumerate() {
        let closure = hk.closure_residual(g);
        let mut cross = 0.0f64;
        for (j, hj) in ideals.iter().enumerate() {
            if j == k {
                continue;
            }
            for a in hk.vectors() {
                for b in hj.vectors() {
                    cross = cross.max(g.q_norm(&g.br(&a, &b)) / g.scale());
                }
            }
        }
        let residual = closure.max(cross);
        if residual > tol {
            return Err(format!("ideal {k} residual {residual:.3e}"));
        }
        if derived_unchecked(g, hk).dim() != hk.dim() {
            return Err(format!("ideal {k} is not perfect"));
        }
        if center_unchecked(g, hk).dim() != 0 {
            return Err(format!("ideal {k} has a center"));
        }
        residuals.push(residual);
    }
    Ok((ideals, residuals))
}

/// Whether `[e_i, s_j] ∈ s` for every ambient basis vector and every basis
/// vector of `s`.
pub fn is_ideal(g: &LieAlgebra, s: &Subspace) -> IdealCheck {
    let mut worst = 0.0f64;
    for i in 0..g.dim() {
        let e = g.basis_vector(i);
        let ne = g.q_norm(&e);
        for v in s.vectors() {
            worst = worst.max(s.distance(g, &g.br(&e, &v)) / ne);
        }
    }
    let residual = worst / g.scale();
    IdealCheck { is_ideal: residual <= g.tolerance(), residual }
}

/// One adjunction step: `span(current ∪ [g, current])`.
fn adjoin(g: &LieAlgebra, current: &Subspace) -> Subspace {
    let mut vectors = current.vectors();
    for i in 0..g.dim() {
        let e = g.basis_vector(i);
        for v in current.vectors() {
            vectors.push(g.br(&e, &v));
        }
    }
    Subspace::span_unchecked(g, &vectors)
}

/// `span(seed, [g, seed], …)` after `steps` adjunctions.
pub fn adjunction_span(g: &LieAlgebra, seed: &Subspace, steps: usize) -> Subspace {
    let mut current = seed.clone();
    for _ in 0..steps {
        current = adjoin(g, &current);
    }
    current
}

/// Smallest ideal containing `seed`, by adjoining `[g, ·]` until the dimension
/// stops growing.
pub fn ideal_generated_by(g: &LieAlgebra, seed: &Subspace) -> Subspace {
    let mut current = Subspace::span_unchecked(g, &seed.vectors());
    for _ in 0..=g.dim() {
        let next = adjoin(g, &current);
        if next.dim() == current.dim() {
            break;
        }
        current = next;
    }
    debug_assert!(is_ideal(g, &current).is_ideal);
    current
}

/// Generic centralizer dimension of `g`.
pub fn rank(g: &LieAlgebra, seed: u64) -> usize {
    rank_of_subalgebra(g, &Subspace::whole(g), seed)
}

/// Generic centralizer dimension of the subalgebra `s` (inside `s`).
pub fn rank_of_subalgebra(g: &LieAlgebra, s: &Subspace, seed: u64) -> usize {
    let p = s.dim();
    if p == 0 {
        return 0;
    }
    let q = g.inner_product();
    let basis = s.basis();
    let mut r = rng(seed);
    (0..RANK_DRAWS)
        .map(|_| {
            let x = basis * gaussian_vector(&mut r, p);
            let restricted = basis.transpose() * q * g.ad(&x) * basis;
            kernel_dim(&restricted)
        })
        .min()
        .unwrap_or(p)
}

/// Whether `[h, h]` is an ideal of `g` (the zero subspace counts as one).
pub fn semisimple_part_is_ideal(g: &LieAlgebra, h: &Subspace) -> Result<bool> {
    let derived = derived_subalgebra(g, h)?;
    Ok(is_ideal(g, &derived).is_ideal)
}

/// Decompose `w` into the joint kernel of `ad_{x1}`, `ad_{x2}` and 2-planes on
/// which both act by multiples of a quarter turn.
pub fn joint_rotation_blocks(g: &LieAlgebra, x1: &Vector, x2: &Vector, w: &Subspace) -> Result<RotationBlocks> {
    check_dim(g.dim(), w.ambient_dim())?;
    let comm = g.bracket(x1, x2)?;
    let residual = g.q_norm(&comm);
    if residual > COMMUTATION_TOLERANCE * g.q_norm(x1) * g.q_norm(x2) {
        return Err(Error::NotCommuting { residual });
    }
    let q = g.inner_product();
    let basis = w.basis();
    let mut invariance = 0.0f64;
    let mut restricted = Vec::with_capacity(2);
    for x in [x1, x2] {
        let ad = g.ad(x);
        let scale = g.scale() * g.q_norm(x).max(f64::MIN_POSITIVE);
        for v in w.vectors() {
            invariance = invariance.max(w.distance(g, &(&ad * v)) / scale);
        }
        let a = basis.transpose() * q * ad * basis;
        restricted.push((&a - a.transpose()) * 0.5);
    }
    if invariance > g.tolerance() {
        return Err(Error::NotInvariant { residual: invariance });
    }
    let (a1, a2) = (&restricted[0], &restricted[1]);

    // Generic combinations separate distinct joint weights; try a few.
    let mut last = String::new();
    for gamma in [0.754_877_666_246_692_7, 0.569_840_290_998_053_2, 1.324_717_957_244_746] {
        match rotation_blocks_for(a1, a2, gamma, g.tolerance()) {
            Ok((kernel, blocks)) => {
                let kernel_vecs: Vec<Vector> = kernel.iter().map(|c| basis * c).collect();
                let blocks = blocks
                    .into_iter()
                    .map(|(v, wv, lambda, mu)| RotationBlock {
                        v: basis * v,
                        w: basis * wv,
                        lambda,
                        mu,
                        annihilator: x1 * mu - x2 * lambda,
                    })
                    .collect();
                return Ok(RotationBlocks {
                    kernel: Subspace::from_orthonormal(columns_to_matrix(g.dim(), &kernel_vecs)),
                    blocks,
                });
            }
            Err(e) => last = e,
        }
    }
    Err(Error::DecompositionFailed(last))
}

type Block = (Vector, Vector, f64, f64);

fn rotation_blocks_for(
    a1: &DMatrix<f64>,
    a2: &DMatrix<f64>,
    gamma: f64,
    tol: f64,
) -> std::result::Result<(Vec<Vector>, Vec<Block>), String> {
    let p = a1.nrows();
    let a = a1 + a2 * gamma;
    let eig = SymmetricEigen::new(a.transpose() * &a);
    let op_scale = a1.norm().max(a2.norm()).max(f64::MIN_POSITIVE);
    let smax = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
    let kernel_cut = (crate::linalg::RANK_CUTOFF * smax.sqrt()).powi(2);

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut kernel = Vec::new();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        let lam = eig.eigenvalues[i];
        if lam <= kernel_cut {
            kernel.push(eig.eigenvectors.column(i).clone_owned());
            continue;
        }
        match clusters.last_mut() {
            Some(cl) if lam - eig.eigenvalues[*cl.last().unwrap()] <= 1e-8 * smax => cl.push(i),
            _ => clusters.push(vec![i]),
        }
    }

    let mut blocks = Vec::new();
    for cl in clusters {
        if cl.len() % 2 != 0 {
            return Err(format!("odd eigenspace of dimension {}", cl.len()));
        }
        let sigma = eig.eigenvalues[cl[0]].sqrt();
        let mut space: Vec<Vector> = cl.iter().map(|&i| eig.eigenvectors.column(i).clone_owned()).collect();
        while !space.is_empty() {
            let v = space.remove(0);
            let v = &v / v.norm();
            let wv = &a * &v / sigma;
            let wv = &wv / wv.norm();
            for u in space.iter_mut() {
                let cv = u.dot(&v);
                u.axpy(-cv, &v, 1.0);
                let cw = u.dot(&wv);
                u.axpy(-cw, &wv, 1.0);
            }
            space.retain(|u| u.norm() > 1e-6);
            space = orthonormal_euclidean(space);
            let lambda = wv.dot(&(a1 * &v));
            let mu = wv.dot(&(a2 * &v));
            blocks.push((v, wv, lambda, mu));
        }
    }

    // verification
    let check = tol.max(1e-12) * op_scale * 10.0;
    for k in &kernel {
        if (a1 * k).norm() > check || (a2 * k).norm() > check {
            return Err("kernel vector is not annihilated".into());
        }
    }
    for (v, wv, lambda, mu) in &blocks {
        let r1 = (a1 * v - wv * *lambda).norm() + (a1 * wv + v * *lambda).norm();
        let r2 = (a2 * v - wv * *mu).norm() + (a2 * wv + v * *mu).norm();
        if r1 > check || r2 > check {
            return Err(format!("block residual {:.3e}", r1.max(r2)));
        }
    }
    Ok((kernel, blocks))
}

fn orthonormal_euclidean(vs: Vec<Vector>) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for mut v in vs {
        for _ in 0..2 {
            for e in &out {
                let c = e.dot(&v);
                v.axpy(-c, e, 1.0);
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            out.push(v / n);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_so, build_su, build_u};
    use crate::split::diagonal_embedding;

    fn su2su2() -> LieAlgebra {
        let su2 = build_su(2).unwrap();
        su2.direct_sum(&su2).unwrap()
    }

    fn span_of(g: &LieAlgebra, idx: &[usize]) -> Subspace {
        let v: Vec<Vector> = idx.iter().map(|&i| g.basis_vector(i)).collect();
        Subspace::span(g, &v).unwrap()
    }

    #[test]
    fn derived_algebras() {
        let ab = LieAlgebra::abelian(3).unwrap();
        assert_eq!(derived_subalgebra(&ab, &Subspace::whole(&ab)).unwrap().dim(), 0);
        let su2 = build_su(2).unwrap();
        assert_eq!(derived_subalgebra(&su2, &Subspace::whole(&su2)).unwrap().dim(), 3);
        let u2 = build_u(2).unwrap();
        let d = derived_subalgebra(&u2, &Subspace::whole(&u2)).unwrap();
        assert_eq!(d.dim(), 3);
        // trace-zero: orthogonal to Z (last basis vector)
        for v in d.vectors() {
            assert!(u2.q_inner(&v, &u2.basis_vector(3)).abs() < 1e-14);
        }
    }

    #[test]
    fn centers() {
        let ab = LieAlgebra::abelian(2).unwrap();
        assert_eq!(center(&ab, &Subspace::whole(&ab)).unwrap().dim(), 2);
        let su2 = build_su(2).unwrap();
        assert_eq!(center(&su2, &Subspace::whole(&su2)).unwrap().dim(), 0);
        let u2 = build_u(2).unwrap();
        let z = center(&u2, &Subspace::whole(&u2)).unwrap();
        assert_eq!(z.dim(), 1);
        assert!(z.distance(&u2, &u2.basis_vector(3)) < 1e-12);
    }

    #[test]
    fn center_is_complement_of_derived() {
        for g in [build_u(2).unwrap(), build_u(3).unwrap(), su2su2()] {
            let whole = Subspace::whole(&g);
            let z = center(&g, &whole).unwrap();
            let d = derived_subalgebra(&g, &whole).unwrap();
            let comp = d.complement_in(&g, &whole);
            assert_eq!(z.dim(), comp.dim());
            assert!(comp.containment_residual(&g, &z) < 1e-10);
        }
    }

    #[test]
    fn not_a_subalgebra_is_reported() {
        let g = build_so(4).unwrap();
        let s = span_of(&g, &[0, 1]);
        assert!(matches!(derived_subalgebra(&g, &s), Err(Error::NotASubalgebra { .. })));
        assert!(matches!(center(&g, &s), Err(Error::NotASubalgebra { .. })));
    }

    #[test]
    fn decomposition_of_su2() {
        let g = build_su(2).unwrap();
        let d = simple_ideal_decomposition(&g, &Subspace::whole(&g), 1).unwrap();
        assert_eq!(d.ideals.len(), 1);
        assert_eq!(d.center.dim(), 0);
    }

    #[test]
    fn decomposition_of_su2_squared_recovers_blocks() {
        let g = su2su2();
        let d = simple_ideal_decomposition(&g, &Subspace::whole(&g), 3).unwrap();
        assert_eq!(d.ideals.len(), 2);
        let first = span_of(&g, &[0, 1, 2]);
        let second = span_of(&g, &[3, 4, 5]);
        let matches = |a: &Subspace, b: &Subspace| a.containment_residual(&g, b) < 1e-9 && a.dim() == b.dim();
        assert!(
            (matches(&d.ideals[0], &first) && matches(&d.ideals[1], &second))
                || (matches(&d.ideals[0], &second) && matches(&d.ideals[1], &first))
        );
    }

    #[test]
    fn decomposition_of_u1_and_u2() {
        let u1 = build_u(1).unwrap();
        let d = simple_ideal_decomposition(&u1, &Subspace::whole(&u1), 0).unwrap();
        assert!(d.ideals.is_empty());
        assert_eq!(d.center.dim(), 1);

        let u2 = build_u(2).unwrap();
        let d = simple_ideal_decomposition(&u2, &Subspace::whole(&u2), 0).unwrap();
        assert_eq!(d.center.dim(), 1);
        assert_eq!(d.ideals.len(), 1);
        assert_eq!(d.ideals[0].dim(), 3);
    }

    #[test]
    fn decomposition_of_so4_block_sum() {
        // so(4) ≅ su(2) ⊕ su(2): two 3-dimensional simple ideals
        let g = build_so(4).unwrap();
        let d = simple_ideal_decomposition(&g, &Subspace::whole(&g), 9).unwrap();
        assert_eq!(d.ideals.len(), 2);
        assert!(d.ideals.iter().all(|i| i.dim() == 3));
        assert!(d.residuals.iter().all(|r| *r < 1e-9));
    }

    #[test]
    fn ideal_tests() {
        let g = su2su2();
        assert!(is_ideal(&g, &span_of(&g, &[0, 1, 2])).is_ideal);
        let su2 = build_su(2).unwrap();
        let (g2, diag) = diagonal_embedding(&su2).unwrap();
        let check = is_ideal(&g2, diag.h());
        assert!(!check.is_ideal);
        assert!(check.residual > 0.1);
        let so4 = build_so(4).unwrap();
        assert!(!is_ideal(&so4, &span_of(&so4, &[0, 1, 3])).is_ideal);
        assert!(is_ideal(&so4, &Subspace::zero(6)).is_ideal);
    }

    #[test]
    fn generated_ideals() {
        let g = su2su2();
        let first = span_of(&g, &[0, 1, 2]);
        assert_eq!(ideal_generated_by(&g, &first).dim(), 3);

        let so5 = build_so(5).unwrap();
        let v = gaussian_vector(&mut rng(12), so5.dim());
        let seed = Subspace::span(&so5, &[v]).unwrap();
        assert_eq!(ideal_generated_by(&so5, &seed).dim(), 10);

        let su2 = build_su(2).unwrap();
        let (g2, diag) = diagonal_embedding(&su2).unwrap();
        assert_eq!(ideal_generated_by(&g2, diag.h()).dim(), 6);
        assert_eq!(adjunction_span(&g2, diag.h(), 2).dim(), 6);
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&build_su(2).unwrap(), 1), 1);
        assert_eq!(rank(&build_so(4).unwrap(), 1), 2);
        assert_eq!(rank(&build_su(3).unwrap(), 1), 2);
        assert_eq!(rank(&build_so(5).unwrap(), 1), 2);
        assert_eq!(rank(&LieAlgebra::abelian(4).unwrap(), 1), 4);
        let so4 = build_so(4).unwrap();
        assert_eq!(rank_of_subalgebra(&so4, &span_of(&so4, &[0, 1, 3]), 2), 1);
    }

    #[test]
    fn semisimple_part_predicate() {
        let su2 = build_su(2).unwrap();
        assert!(semisimple_part_is_ideal(&su2, &span_of(&su2, &[2])).unwrap());
        let (g2, diag) = diagonal_embedding(&su2).unwrap();
        assert!(!semisimple_part_is_ideal(&g2, diag.h()).unwrap());
        assert!(semisimple_part_is_ideal(&g2, &span_of(&g2, &[0, 1, 2])).unwrap());
    }

    #[test]
    fn rotation_blocks_single_operator() {
        let so4 = build_so(4).unwrap();
        // x1 = B_12, w = span(B_14, B_24, B_34) = indices 2, 4, 5
        let w = span_of(&so4, &[2, 4, 5]);
        let rb = joint_rotation_blocks(&so4, &so4.basis_vector(0), &so4.zero(), &w).unwrap();
        assert_eq!(rb.kernel.dim(), 1);
        assert!(rb.kernel.distance(&so4, &so4.basis_vector(5)) < 1e-12);
        assert_eq!(rb.blocks.len(), 1);
        let plane = span_of(&so4, &[2, 4]);
        let b = &rb.blocks[0];
        assert!(plane.distance(&so4, &b.v) < 1e-12 && plane.distance(&so4, &b.w) < 1e-12);
        assert!((b.lambda.abs() - 1.0).abs() < 1e-12);
        assert_eq!(b.mu, 0.0);
    }

    #[test]
    fn rotation_blocks_joint_torus() {
        let so5 = build_so(5).unwrap();
        // B_12 and B_34 commute; w = whole algebra
        let x1 = so5.basis_vector(0);
        let x2 = so5.basis_vector(7);
        assert_eq!(so5.labels()[7], "B_34");
        let w = Subspace::whole(&so5);
        let rb = joint_rotation_blocks(&so5, &x1, &x2, &w).unwrap();
        assert_eq!(rb.kernel.dim() + 2 * rb.blocks.len(), 10);
        assert_eq!(rb.kernel.dim(), 2);
        for b in &rb.blocks {
            for v in [&b.v, &b.w] {
                assert!(so5.q_norm(&so5.bracket(&b.annihilator, v).unwrap()) < 1e-9);
            }
            assert!(so5.q_norm(&b.annihilator) > 0.5);
        }
    }

    #[test]
    fn rotation_blocks_errors() {
        let so4 = build_so(4).unwrap();
        let w = Subspace::whole(&so4);
        let err = joint_rotation_blocks(&so4, &so4.basis_vector(0), &so4.basis_vector(1), &w).unwrap_err();
        assert!(matches!(err, Error::NotCommuting { .. }));
        let w = span_of(&so4, &[1]);
        let err = joint_rotation_blocks(&so4, &so4.basis_vector(0), &so4.zero(), &w).unwrap_err();
        assert!(matches!(err, Error::NotInvariant { .. }));
    }
}
