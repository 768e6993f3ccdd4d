//! Finite-dimensional real Lie algebras given by structure constants together
//! with a biinvariant inner product `Q`.
//!
//! Elements are coordinate vectors in the algebra basis, and the bracket is
//! `[e_i, e_j] = Σ_k c[i][j][k] e_k`. All algebraic identity checks compare
//! residuals against a single relative tolerance carried by the algebra and
//! inherited by every downstream object built from it.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{expm, q_inner};

/// An element of a Lie algebra, in basis coordinates.
pub type Vector = DVector<f64>;

/// Default tolerance for algebraic-identity residuals (relative).
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Default cap on the dimension produced by the classical constructors.
pub const DEFAULT_DIM_CAP: usize = 45;

#[derive(Debug, Clone)]
pub struct LieAlgebra {
    dim: usize,
    /// Flattened `c[i][j][k]` at `(i * dim + j) * dim + k`.
    c: Vec<f64>,
    q: DMatrix<f64>,
    labels: Vec<String>,
    tol: f64,
    c_max: f64,
}

/// Residuals of the standing hypotheses on an algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub dim: usize,
    pub antisymmetry_residual: f64,
    pub jacobi_residual: f64,
    pub ad_invariance_residual: f64,
    pub q_symmetry_residual: f64,
    pub q_min_eigenvalue: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// JSON exchange format for hand-entered algebras.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub dim: usize,
    pub c: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl LieAlgebra {
    /// Assemble an algebra from a dense `c[i][j][k]` tensor and inner product.
    /// Only shapes are checked here; call [`LieAlgebra::validate`] (or use
    /// [`LieAlgebra::validated`]) before trusting it.
    pub fn new(c: Vec<Vec<Vec<f64>>>, q: DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        let dim = c.len();
        if dim == 0 {
            return Err(Error::InvalidArgument("algebra dimension must be positive".into()));
        }
        let mut flat = Vec::with_capacity(dim * dim * dim);
        for plane in &c {
            check_dim(dim, plane.len())?;
            for row in plane {
                check_dim(dim, row.len())?;
                flat.extend_from_slice(row);
            }
        }
        Self::from_flat(dim, flat, q, labels)
    }

    fn from_flat(dim: usize, c: Vec<f64>, q: DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        if q.nrows() != dim || q.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: q.nrows() });
        }
        let labels = if labels.is_empty() {
            (0..dim).map(|i| format!("e{i}")).collect()
        } else {
            check_dim(dim, labels.len())?;
            labels
        };
        let c_max = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(Self { dim, c, q, labels, tol: DEFAULT_TOLERANCE, c_max })
    }

    /// Abelian algebra of dimension `dim` with `Q` the identity.
    pub fn abelian(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("algebra dimension must be positive".into()));
        }
        Self::from_flat(dim, vec![0.0; dim * dim * dim], DMatrix::identity(dim, dim), Vec::new())
    }

    /// Run [`LieAlgebra::validate`] and fail unless it passes.
    pub fn validated(self) -> Result<Self> {
        let report = self.validate();
        if report.passed {
            Ok(self)
        } else {
            Err(Error::Validation(format!(
                "antisymmetry {:.3e}, jacobi {:.3e}, ad-invariance {:.3e}, min eig(Q) {:.3e}",
                report.antisymmetry_residual,
                report.jacobi_residual,
                report.ad_invariance_residual,
                report.q_min_eigenvalue
            )))
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn inner_product(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// Largest absolute structure constant, or 1 for an abelian algebra.
    /// Residuals of bracket identities are measured relative to this scale.
    pub fn scale(&self) -> f64 {
        if self.c_max > 0.0 {
            self.c_max
        } else {
            1.0
        }
    }

    #[inline]
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    /// Basis vector `e_i`.
    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    pub fn zero(&self) -> Vector {
        Vector::zeros(self.dim)
    }

    /// `[x, y]`.
    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, y.len())?;
        Ok(self.br(x, y))
    }

    /// Unchecked bracket for internal hot paths.
    pub(crate) fn br(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.dim;
        let mut out = Vector::zeros(n);
        for i in 0..n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = xi * y[j];
                if w == 0.0 {
                    continue;
                }
                let base = (i * n + j) * n;
                let row = &self.c[base..base + n];
                for (o, c) in out.iter_mut().zip(row) {
                    *o += w * c;
                }
            }
        }
        out
    }

    /// Matrix of `x ↦ [a, x]`.
    pub fn ad_matrix(&self, a: &Vector) -> Result<DMatrix<f64>> {
        check_dim(self.dim, a.len())?;
        Ok(self.ad(a))
    }

    pub(crate) fn ad(&self, a: &Vector) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let ai = a[i];
            if ai == 0.0 {
                continue;
            }
            for j in 0..n {
                let base = (i * n + j) * n;
                for k in 0..n {
                    m[(k, j)] += ai * self.c[base + k];
                }
            }
        }
        m
    }

    /// `exp(t·ad_a) x`, the adjoint action of `exp(t a)`.
    pub fn adjoint_flow(&self, a: &Vector, t: f64, x: &Vector) -> Result<Vector> {
        check_dim(self.dim, a.len())?;
        check_dim(self.dim, x.len())?;
        Ok(self.flow_matrix(a, t) * x)
    }

    /// The matrix `exp(t·ad_a)`.
    pub fn flow_matrix(&self, a: &Vector, t: f64) -> DMatrix<f64> {
        expm(&(self.ad(a) * t))
    }

    pub fn q_inner(&self, x: &Vector, y: &Vector) -> f64 {
        q_inner(&self.q, x, y)
    }

    pub fn q_norm(&self, x: &Vector) -> f64 {
        self.q_inner(x, x).max(0.0).sqrt()
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim;
        let scale = self.scale();
        let c = |i: usize, j: usize, k: usize| self.structure_constant(i, j, k);

        let mut anti = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    anti = anti.max((c(i, j, k) + c(j, i, k)).abs());
                }
            }
        }

        let mut jacobi = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            s += c(i, j, l) * c(l, k, m)
                                + c(j, k, l) * c(l, i, m)
                                + c(k, i, l) * c(l, j, m);
                        }
                        jacobi = jacobi.max(s.abs());
                    }
                }
            }
        }

        let q_max = self.q.abs().max().max(f64::MIN_POSITIVE);
        let mut adinv = 0.0f64;
        for z in 0..n {
            for x in 0..n {
                for y in 0..n {
                    let mut s = 0.0;
                    for k in 0..n {
                        s += c(z, x, k) * self.q[(k, y)] + c(z, y, k) * self.q[(x, k)];
                    }
                    adinv = adinv.max(s.abs());
                }
            }
        }

        let q_sym = (&self.q - self.q.transpose()).abs().max() / q_max;
        let sym = (&self.q + self.q.transpose()) * 0.5;
        let min_eig = sym.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);

        let antisymmetry_residual = anti / scale;
        let jacobi_residual = jacobi / (scale * scale);
        let ad_invariance_residual = adinv / (scale * q_max);
        let passed = antisymmetry_residual < self.tol
            && jacobi_residual < self.tol
            && ad_invariance_residual < self.tol
            && q_sym < self.tol
            && min_eig > 0.0;
        ValidationReport {
            dim: n,
            antisymmetry_residual,
            jacobi_residual,
            ad_invariance_residual,
            q_symmetry_residual: q_sym,
            q_min_eigenvalue: min_eig,
            tolerance: self.tol,
            passed,
        }
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &LieAlgebra) -> Result<LieAlgebra> {
        let (n1, n2) = (self.dim, other.dim);
        let n = n1 + n2;
        let mut c = vec![0.0; n * n * n];
        for i in 0..n1 {
            for j in 0..n1 {
                for k in 0..n1 {
                    c[(i * n + j) * n + k] = self.structure_constant(i, j, k);
                }
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                for k in 0..n2 {
                    c[((i + n1) * n + j + n1) * n + k + n1] = other.structure_constant(i, j, k);
                }
            }
        }
        let mut q = DMatrix::zeros(n, n);
        q.view_mut((0, 0), (n1, n1)).copy_from(&self.q);
        q.view_mut((n1, n1), (n2, n2)).copy_from(&other.q);
        let labels = self
            .labels
            .iter()
            .map(|l| format!("1:{l}"))
            .chain(other.labels.iter().map(|l| format!("2:{l}")))
            .collect();
        let mut sum = Self::from_flat(n, c, q, labels)?;
        sum.tol = self.tol.min(other.tol);
        sum.validated()
    }

    /// Parse the JSON exchange format. A missing `Q` defaults to the identity
    /// only when the identity is ad-invariant for the given constants.
    pub fn from_json_str(text: &str) -> Result<LieAlgebra> {
        let raw: AlgebraJson = serde_json::from_str(text)?;
        Self::from_json(raw)
    }

    pub fn from_json(raw: AlgebraJson) -> Result<LieAlgebra> {
        check_dim(raw.dim, raw.c.len())?;
        let q_given = raw.q.is_some();
        let q = match raw.q {
            Some(rows) => {
                check_dim(raw.dim, rows.len())?;
                let mut q = DMatrix::zeros(raw.dim, raw.dim);
                for (i, row) in rows.iter().enumerate() {
                    check_dim(raw.dim, row.len())?;
                    for (j, v) in row.iter().enumerate() {
                        q[(i, j)] = *v;
                    }
                }
                q
            }
            None => DMatrix::identity(raw.dim, raw.dim),
        };
        let g = Self::new(raw.c, q, raw.labels.unwrap_or_default())?;
        g.validated().map_err(|e| match (q_given, e) {
            (false, Error::Validation(msg)) => Error::Validation(format!(
                "no Q given and the identity is not a valid biinvariant form ({msg})"
            )),
            (_, e) => e,
        })
    }

    pub fn to_json(&self) -> AlgebraJson {
        let n = self.dim;
        let c = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| self.structure_constant(i, j, k)).collect())
                    .collect()
            })
            .collect();
        let q = (0..n).map(|i| (0..n).map(|j| self.q[(i, j)]).collect()).collect();
        AlgebraJson { dim: n, c, q: Some(q), labels: Some(self.labels.clone()) }
    }
}

type CMatrix = DMatrix<Complex<f64>>;

/// Build an algebra from a basis of (complex) matrices closed under the
/// commutator, with `Q(X, Y) = -kappa · Re tr(XY)`.
fn from_matrix_basis(basis: &[CMatrix], kappa: f64, labels: Vec<String>) -> Result<LieAlgebra> {
    let dim = basis.len();
    let form = |x: &CMatrix, y: &CMatrix| -kappa * (x * y).trace().re;
    let gram = DMatrix::from_fn(dim, dim, |a, b| form(&basis[a], &basis[b]));
    let gram_inv = gram
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidArgument("matrix basis is degenerate".into()))?;
    let mut c = vec![0.0; dim * dim * dim];
    for a in 0..dim {
        for b in (a + 1)..dim {
            let comm = &basis[a] * &basis[b] - &basis[b] * &basis[a];
            let rhs = DVector::from_fn(dim, |k, _| form(&basis[k], &comm));
            let coords = &gram_inv * rhs;
            for k in 0..dim {
                let v = coords[k];
                c[(a * dim + b) * dim + k] = v;
                c[(b * dim + a) * dim + k] = -v;
            }
        }
    }
    LieAlgebra::from_flat(dim, c, gram, labels)?.validated()
}

fn unit(n: usize, i: usize, j: usize, v: Complex<f64>) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = v;
    m
}

fn check_cap(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        Err(Error::InvalidArgument(format!("dimension {dim} exceeds the cap {cap}")))
    } else {
        Ok(())
    }
}

/// `so(n)` with basis `B_ij = E_ij − E_ji` (i < j) and `Q(X,Y) = −½ tr(XY)`.
pub fn build_so(n: usize) -> Result<LieAlgebra> {
    build_so_capped(n, DEFAULT_DIM_CAP)
}

pub fn build_so_capped(n: usize, cap: usize) -> Result<LieAlgebra> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("so(n) needs n >= 2, got {n}")));
    }
    check_cap(n * (n - 1) / 2, cap)?;
    let one = Complex::new(1.0, 0.0);
    let mut basis = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            basis.push(unit(n, i, j, one) - unit(n, j, i, one));
            labels.push(format!("B_{}{}", i + 1, j + 1));
        }
    }
    from_matrix_basis(&basis, 0.5, labels)
}

fn su_basis(n: usize) -> (Vec<CMatrix>, Vec<String>) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let re = Complex::new(r, 0.0);
            let im = Complex::new(0.0, r);
            basis.push(unit(n, i, j, re) - unit(n, j, i, re));
            labels.push(format!("A_{}{}", i + 1, j + 1));
            basis.push(unit(n, i, j, im) + unit(n, j, i, im));
            labels.push(format!("S_{}{}", i + 1, j + 1));
        }
    }
    for k in 1..n {
        let norm = ((k + k * k) as f64).sqrt();
        let mut m = CMatrix::zeros(n, n);
        for l in 0..k {
            m[(l, l)] = Complex::new(0.0, 1.0 / norm);
        }
        m[(k, k)] = Complex::new(0.0, -(k as f64) / norm);
        basis.push(m);
        labels.push(format!("H_{k}"));
    }
    (basis, labels)
}

/// `su(n)` with a `Q`-orthonormal anti-Hermitian basis, `Q(X,Y) = −Re tr(XY)`.
pub fn build_su(n: usize) -> Result<LieAlgebra> {
    build_su_capped(n, DEFAULT_DIM_CAP)
}

pub fn build_su_capped(n: usize, cap: usize) -> Result<LieAlgebra> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("su(n) needs n >= 2, got {n}")));
    }
    check_cap(n * n - 1, cap)?;
    let (basis, labels) = su_basis(n);
    from_matrix_basis(&basis, 1.0, labels)
}

/// `u(n) = su(n) ⊕ iℝ·I`, same form as `su(n)`.
pub fn build_u(n: usize) -> Result<LieAlgebra> {
    build_u_capped(n, DEFAULT_DIM_CAP)
}

pub fn build_u_capped(n: usize, cap: usize) -> Result<LieAlgebra> {
    if n < 1 {
        return Err(Error::InvalidArgument("u(n) needs n >= 1".into()));
    }
    check_cap(n * n, cap)?;
    let (mut basis, mut labels) = su_basis(n);
    basis.push(CMatrix::identity(n, n) * Complex::new(0.0, 1.0 / (n as f64).sqrt()));
    labels.push("Z".into());
    from_matrix_basis(&basis, 1.0, labels)
}
