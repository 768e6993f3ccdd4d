//! Dense linear-algebra helpers shared by the algebraic modules.
//!
//! Everything here works on small matrices (dimension at most a few dozen),
//! so plain dense `nalgebra` storage is used throughout.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Relative singular-value cutoff used for every numerical rank decision.
pub const RANK_CUTOFF: f64 = 1e-7;

/// Matrix exponential by scaling and squaring with a Taylor series summed to
/// machine precision.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "expm requires a square matrix");
    let n = a.nrows();
    let norm = one_norm(a);
    if norm == 0.0 {
        return DMatrix::identity(n, n);
    }
    // Scale so that the scaled norm is at most 1/2.
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);

    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=40 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if one_norm(&term) <= f64::EPSILON * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[inline]
pub(crate) fn q_inner(q: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    // Q is symmetric, so xᵀQy is evaluated without allocating.
    let n = x.len();
    let mut acc = 0.0;
    for j in 0..n {
        let yj = y[j];
        if yj == 0.0 {
            continue;
        }
        let mut col = 0.0;
        for i in 0..n {
            col += x[i] * q[(i, j)];
        }
        acc += col * yj;
    }
    acc
}

/// Column-pivoted Gram-Schmidt in the inner product `q`, with a second
/// re-orthogonalization pass. Columns of `against` (already `q`-orthonormal)
/// are projected out first. Stops once the largest remaining column norm drops
/// below `RANK_CUTOFF` times the largest input norm.
pub(crate) fn q_orthonormalize(
    q: &DMatrix<f64>,
    columns: &[DVector<f64>],
    against: Option<&DMatrix<f64>>,
) -> Vec<DVector<f64>> {
    let reference = columns
        .iter()
        .map(|c| q_inner(q, c, c).max(0.0).sqrt())
        .fold(0.0, f64::max);
    let mut work: Vec<DVector<f64>> = columns.to_vec();
    if let Some(basis) = against {
        for w in work.iter_mut() {
            for _ in 0..2 {
                for b in basis.column_iter() {
                    let b = b.clone_owned();
                    let c = q_inner(q, &b, w);
                    w.axpy(-c, &b, 1.0);
                }
            }
        }
    }
    let mut out: Vec<DVector<f64>> = Vec::new();
    if reference == 0.0 {
        return out;
    }
    loop {
        let (best, best_norm) = work
            .iter()
            .enumerate()
            .map(|(i, w)| (i, q_inner(q, w, w).max(0.0).sqrt()))
            .fold((usize::MAX, 0.0), |acc, (i, n)| if n > acc.1 { (i, n) } else { acc });
        if best == usize::MAX || best_norm <= RANK_CUTOFF * reference {
            break;
        }
        let mut b = work.swap_remove(best);
        // re-orthogonalize against the accepted vectors
        for e in &out {
            let c = q_inner(q, e, &b);
            b.axpy(-c, e, 1.0);
        }
        let norm = q_inner(q, &b, &b).sqrt();
        b /= norm;
        for w in work.iter_mut() {
            let c = q_inner(q, &b, w);
            w.axpy(-c, &b, 1.0);
        }
        out.push(b);
    }
    out
}

pub(crate) fn columns_to_matrix(rows: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Singular values of `m` (unordered).
fn singular_values(m: &DMatrix<f64>) -> DVector<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DVector::zeros(0);
    }
    m.clone().svd(false, false).singular_values
}

/// Dimension of the kernel of `m` using the relative cutoff [`RANK_CUTOFF`].
pub(crate) fn kernel_dim(m: &DMatrix<f64>) -> usize {
    let sv = singular_values(m);
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return m.ncols();
    }
    let rank = sv.iter().filter(|&&s| s > RANK_CUTOFF * max).count();
    m.ncols() - rank
}

/// Euclidean-orthonormal basis of the right null space of `m`.
pub(crate) fn null_space(m: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let n = m.ncols();
    if n == 0 {
        return Vec::new();
    }
    // pad to a tall matrix so the SVD returns a full set of right vectors
    let padded = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| max == 0.0 || s <= RANK_CUTOFF * max)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect()
}

/// Deterministic stream derivation: mixes a base seed with a stream index
/// (splitmix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}
