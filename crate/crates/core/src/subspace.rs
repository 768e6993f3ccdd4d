use nalgebra::DMatrix;

use crate::algebra::{LieAlgebra, Vector};
use crate::error::{check_dim, Result};
use crate::linalg::{columns_to_matrix, q_orthonormalize};

/// A linear subspace of a Lie algebra, stored as a `Q`-orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Span of `vectors`; linearly dependent vectors are dropped.
    pub fn span(g: &LieAlgebra, vectors: &[Vector]) -> Result<Subspace> {
        for v in vectors {
            check_dim(g.dim(), v.len())?;
        }
        Ok(Self::span_unchecked(g, vectors))
    }

    pub(crate) fn span_unchecked(g: &LieAlgebra, vectors: &[Vector]) -> Subspace {
        let cols = q_orthonormalize(g.inner_product(), vectors, None);
        Subspace { basis: columns_to_matrix(g.dim(), &cols) }
    }

    /// Wrap columns that are already `Q`-orthonormal.
    pub(crate) fn from_orthonormal(basis: DMatrix<f64>) -> Subspace {
        Subspace { basis }
    }

    pub fn zero(ambient_dim: usize) -> Subspace {
        Subspace { basis: DMatrix::zeros(ambient_dim, 0) }
    }

    pub fn whole(g: &LieAlgebra) -> Subspace {
        let all: Vec<Vector> = (0..g.dim()).map(|i| g.basis_vector(i)).collect();
        Self::span_unchecked(g, &all)
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Columns form a `Q`-orthonormal basis.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vector> {
        self.basis.column_iter().map(|c| c.clone_owned()).collect()
    }

    pub fn vector(&self, i: usize) -> Vector {
        self.basis.column(i).clone_owned()
    }

    /// `Q`-orthogonal projection onto the subspace.
    pub fn project(&self, g: &LieAlgebra, x: &Vector) -> Vector {
        let coords = self.coordinates(g, x);
        &self.basis * coords
    }

    /// Coordinates of the projection of `x` in the orthonormal basis.
    pub fn coordinates(&self, g: &LieAlgebra, x: &Vector) -> Vector {
        self.basis.transpose() * (g.inner_product() * x)
    }

    /// `‖x − P x‖_Q`.
    pub fn distance(&self, g: &LieAlgebra, x: &Vector) -> f64 {
        g.q_norm(&(x - self.project(g, x)))
    }

    /// Projection matrix `P` with `P x` the orthogonal projection.
    pub fn projector(&self, g: &LieAlgebra) -> DMatrix<f64> {
        &self.basis * self.basis.transpose() * g.inner_product()
    }

    /// Largest distance of a basis vector of `other` from this subspace.
    pub fn containment_residual(&self, g: &LieAlgebra, other: &Subspace) -> f64 {
        other
            .basis
            .column_iter()
            .map(|c| self.distance(g, &c.clone_owned()))
            .fold(0.0, f64::max)
    }

    /// The `Q`-orthogonal complement of this subspace inside `within`.
    pub fn complement_in(&self, g: &LieAlgebra, within: &Subspace) -> Subspace {
        let cols = q_orthonormalize(g.inner_product(), &within.vectors(), Some(&self.basis));
        Subspace { basis: columns_to_matrix(g.dim(), &cols) }
    }

    /// Largest bracket residual `‖[s_i, s_j] − P[s_i, s_j]‖_Q / scale` over
    /// basis pairs; zero exactly when the span is a subalgebra.
    pub fn closure_residual(&self, g: &LieAlgebra) -> f64 {
        let v = self.vectors();
        let mut worst = 0.0f64;
        for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                worst = worst.max(self.distance(g, &g.br(&v[i], &v[j])));
            }
        }
        worst / g.scale()
    }
}
