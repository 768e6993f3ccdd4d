//! The orthogonal decomposition `g = h ⊕ m` with `m = h^⊥` (in `Q`), and the
//! projections `x ↦ x_h`, `x ↦ x_m` consumed by the curvature formulas.

use nalgebra::DMatrix;

use crate::algebra::{LieAlgebra, Vector};
use crate::error::{check_dim, Error, Result};
use crate::subspace::Subspace;

/// A subalgebra `h` of `g` together with its `Q`-orthogonal complement `m`.
#[derive(Debug, Clone)]
pub struct OrthogonalSplit {
    algebra: LieAlgebra,
    h: Subspace,
    m: Subspace,
    p_h: DMatrix<f64>,
    closure_residual: f64,
    reductivity_residual: f64,
}

impl OrthogonalSplit {
    /// Build the split for `h = span(h_span)`.
    ///
    /// Fails with [`Error::DependentGenerators`] if the generators lose rank
    /// under orthonormalization and with [`Error::NotASubalgebra`] if a bracket
    /// of two basis vectors leaves the span by more than the tolerance. Near
    /// misses are rejected, never repaired.
    pub fn new(g: &LieAlgebra, h_span: &[Vector]) -> Result<OrthogonalSplit> {
        let h = Subspace::span(g, h_span)?;
        if h.dim() < h_span.len() {
            return Err(Error::DependentGenerators { rank: h.dim(), requested: h_span.len() });
        }
        let closure_residual = h.closure_residual(g);
        if closure_residual > g.tolerance() {
            return Err(Error::NotASubalgebra { residual: closure_residual });
        }
        let m = h.complement_in(g, &Subspace::whole(g));
        check_dim(g.dim() - h.dim(), m.dim())?;
        let p_h = h.projector(g);

        let hv = h.vectors();
        let mv = m.vectors();
        let mut worst = 0.0f64;
        for x in &hv {
            for y in &mv {
                let z = g.br(x, y);
                worst = worst.max(g.q_norm(&(&p_h * z)));
            }
        }
        let reductivity_residual = worst / g.scale();
        if reductivity_residual > g.tolerance() {
            // [h, m] ⊆ m follows from ad-invariance, so this means Q is broken
            return Err(Error::Validation(format!(
                "[h, m] is not contained in m (residual {reductivity_residual:.3e})"
            )));
        }
        Ok(OrthogonalSplit { algebra: g.clone(), h, m, p_h, closure_residual, reductivity_residual })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn h(&self) -> &Subspace {
        &self.h
    }

    pub fn m(&self) -> &Subspace {
        &self.m
    }

    /// Dimension of `h`.
    pub fn d(&self) -> usize {
        self.h.dim()
    }

    pub fn closure_residual(&self) -> f64 {
        self.closure_residual
    }

    pub fn reductivity_residual(&self) -> f64 {
        self.reductivity_residual
    }

    pub fn project_h(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.algebra.dim(), x.len())?;
        Ok(self.ph(x))
    }

    pub fn project_m(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.algebra.dim(), x.len())?;
        Ok(x - self.ph(x))
    }

    #[inline]
    pub(crate) fn ph(&self, x: &Vector) -> Vector {
        &self.p_h * x
    }

    /// Matrix of the projection onto `h`.
    pub fn h_projector(&self) -> &DMatrix<f64> {
        &self.p_h
    }
}

/// Shorthand for [`OrthogonalSplit::new`].
pub fn make_split(g: &LieAlgebra, h_span: &[Vector]) -> Result<OrthogonalSplit> {
    OrthogonalSplit::new(g, h_span)
}

/// `g ⊕ g` with `h` the diagonal `{(w, w)}`.
pub fn diagonal_embedding(g: &LieAlgebra) -> Result<(LieAlgebra, OrthogonalSplit)> {
    let sum = g.direct_sum(g)?;
    let n = g.dim();
    let span: Vec<Vector> = (0..n)
        .map(|i| {
            let mut v = sum.zero();
            v[i] = 1.0;
            v[i + n] = 1.0;
            v
        })
        .collect();
    let split = OrthogonalSplit::new(&sum, &span)?;
    Ok((sum, split))
}
