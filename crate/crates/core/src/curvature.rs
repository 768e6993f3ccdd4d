//! Curvature of the stretched left-invariant metric
//! `Q_t = t·Q|_h + Q|_m`.
//!
//! The primary quantity is the curvature numerator `Q_t(R^t(x, y)y, x)`,
//! evaluated from brackets and the `h`/`m` projections:
//!
//! ```text
//! ¼‖[x_m,y_m]_m + t[x_h,y_m] + t[x_m,y_h]‖² + ¼t‖[x_h,y_h]‖²
//!   + ½t(3−2t)·Q([x_h,y_h], [x_m,y_m]_h) + (1−¾t)‖[x_m,y_m]_h‖²
//! ```
//!
//! All norms on the right are `Q`-norms. For a commuting pair `[u, v] = 0`,
//! the plane `(x, y)` with `t x_h + x_m = u` and `t y_h + y_m = v` has numerator
//! `−¼t(t−1)³(1+3t)‖[x_h,y_h]‖²`, which is negative for `t > 1` unless the
//! `h`-components commute. That identity drives the witness construction.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::Vector;
use crate::error::{check_dim, Error, Result};
use crate::linalg::q_inner;
use crate::split::OrthogonalSplit;

/// Planes whose `Q_t`-Gram determinant falls below this fraction of
/// `‖x‖²‖y‖²` are treated as degenerate.
pub const DEGENERATE_PLANE: f64 = 1e-12;

/// Pairs with `‖[u,v]‖_Q ≤ COMMUTATION_TOLERANCE·‖u‖_Q‖v‖_Q` count as commuting.
pub const COMMUTATION_TOLERANCE: f64 = 1e-8;

/// `Q_t` for a fixed split and stretch factor `t > 0`.
#[derive(Debug, Clone)]
pub struct DeformedMetric<'a> {
    split: &'a OrthogonalSplit,
    t: f64,
    qt: DMatrix<f64>,
}

/// A plane `(x, y)` with its curvature data at stretch `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneCurvature {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: f64,
    pub numerator: f64,
    pub area_sq: f64,
    /// `None` when the plane is degenerate.
    pub sectional: Option<f64>,
}

impl PlaneCurvature {
    pub fn x_vector(&self) -> Vector {
        Vector::from_column_slice(&self.x)
    }

    pub fn y_vector(&self) -> Vector {
        Vector::from_column_slice(&self.y)
    }
}

/// The commuting-pair coefficient `−¼t(t−1)³(1+3t)`.
pub fn commuting_coefficient(t: f64) -> f64 {
    -0.25 * t * (t - 1.0).powi(3) * (1.0 + 3.0 * t)
}

/// Evaluate the commuting-pair coefficient in expanded form
/// `¼t − ½t³(3−2t) + (1−¾t)t⁴` and in factored form; the two agree identically.
pub fn closed_form_polynomial_check(t: f64) -> (f64, f64) {
    let expanded = 0.25 * t - 0.5 * t.powi(3) * (3.0 - 2.0 * t) + (1.0 - 0.75 * t) * t.powi(4);
    (expanded, commuting_coefficient(t))
}

impl<'a> DeformedMetric<'a> {
    pub fn new(split: &'a OrthogonalSplit, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument(format!("stretch factor must be positive, got {t}")));
        }
        let q = split.algebra().inner_product();
        let ph = split.h_projector();
        let n = q.nrows();
        let pm = DMatrix::identity(n, n) - ph;
        let qt = ph.transpose() * q * ph * t + pm.transpose() * q * &pm;
        Ok(Self { split, t, qt })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn split(&self) -> &'a OrthogonalSplit {
        self.split
    }

    /// Gram matrix of `Q_t` in basis coordinates.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.qt
    }

    fn dim(&self) -> usize {
        self.split.algebra().dim()
    }

    pub fn qt_inner(&self, x: &Vector, y: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok(self.qt(x, y))
    }

    #[inline]
    pub(crate) fn qt(&self, x: &Vector, y: &Vector) -> f64 {
        q_inner(&self.qt, x, y)
    }

    pub fn curvature_numerator(&self, x: &Vector, y: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok(self.numerator(x, y))
    }

    pub(crate) fn numerator(&self, x: &Vector, y: &Vector) -> f64 {
        let g = self.split.algebra();
        let t = self.t;
        let xh = self.split.ph(x);
        let yh = self.split.ph(y);
        let xm = x - &xh;
        let ym = y - &yh;

        let mm = g.br(&xm, &ym);
        let mm_h = self.split.ph(&mm);
        let mm_m = &mm - &mm_h;
        let hh = g.br(&xh, &yh);
        let mixed = g.br(&xh, &ym) + g.br(&xm, &yh);
        let a = mm_m + mixed * t;

        0.25 * g.q_inner(&a, &a)
            + 0.25 * t * g.q_inner(&hh, &hh)
            + 0.5 * t * (3.0 - 2.0 * t) * g.q_inner(&hh, &mm_h)
            + (1.0 - 0.75 * t) * g.q_inner(&mm_h, &mm_h)
    }

    fn area_sq(&self, x: &Vector, y: &Vector) -> (f64, f64) {
        let xx = self.qt(x, x);
        let yy = self.qt(y, y);
        let xy = self.qt(x, y);
        (xx * yy - xy * xy, xx * yy)
    }

    /// Sectional curvature of the plane spanned by `x, y` in `Q_t`.
    pub fn sectional_curvature(&self, x: &Vector, y: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        let (area_sq, norms) = self.area_sq(x, y);
        if !(area_sq > DEGENERATE_PLANE * norms) {
            return Err(Error::DegeneratePlane { area_sq });
        }
        Ok(self.numerator(x, y) / area_sq)
    }

    /// Evaluate everything about the plane `(x, y)` using the direct formula.
    pub fn plane(&self, x: &Vector, y: &Vector) -> Result<PlaneCurvature> {
        let numerator = self.curvature_numerator(x, y)?;
        Ok(self.assemble(x, y, numerator))
    }

    pub(crate) fn assemble(&self, x: &Vector, y: &Vector, numerator: f64) -> PlaneCurvature {
        let (area_sq, norms) = self.area_sq(x, y);
        let area_sq = area_sq.max(0.0);
        let sectional = (area_sq > DEGENERATE_PLANE * norms).then(|| numerator / area_sq);
        PlaneCurvature {
            x: x.as_slice().to_vec(),
            y: y.as_slice().to_vec(),
            t: self.t,
            numerator,
            area_sq,
            sectional,
        }
    }

    /// Undo the deformation `w ↦ t·w_h + w_m`: returns `(x, y)` whose images
    /// are `(u, v)`.
    pub fn deform_plane(&self, u: &Vector, v: &Vector) -> Result<(Vector, Vector)> {
        check_dim(self.dim(), u.len())?;
        check_dim(self.dim(), v.len())?;
        Ok((self.undeform(u), self.undeform(v)))
    }

    fn undeform(&self, u: &Vector) -> Vector {
        let uh = self.split.ph(u);
        let um = u - &uh;
        uh / self.t + um
    }

    /// The forward deformation `w ↦ t·w_h + w_m`.
    pub fn deform(&self, w: &Vector) -> Vector {
        let wh = self.split.ph(w);
        let wm = w - &wh;
        wh * self.t + wm
    }

    /// Curvature of the plane pulled back from a commuting pair `(u, v)`,
    /// with the numerator taken from the closed form.
    pub fn commuting_plane_curvature(&self, u: &Vector, v: &Vector) -> Result<PlaneCurvature> {
        let g = self.split.algebra();
        let comm = g.bracket(u, v)?;
        let residual = g.q_norm(&comm);
        if residual > COMMUTATION_TOLERANCE * g.q_norm(u) * g.q_norm(v) {
            return Err(Error::NotCommuting { residual });
        }
        let (x, y) = self.deform_plane(u, v)?;
        let hh = g.br(&self.split.ph(&x), &self.split.ph(&y));
        let numerator = commuting_coefficient(self.t) * g.q_inner(&hh, &hh);
        Ok(self.assemble(&x, &y, numerator))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_so, build_su, LieAlgebra};
    use crate::linalg::{gaussian_vector, rng};
    use crate::split::diagonal_embedding;
    use proptest::prelude::*;

    fn so4_split() -> OrthogonalSplit {
        let g = build_so(4).unwrap();
        OrthogonalSplit::new(&g, &[g.basis_vector(0), g.basis_vector(1), g.basis_vector(3)]).unwrap()
    }

    /// Independent expansion of the numerator at t = 1, where every term
    /// recombines to ¼‖[x, y]‖².
    fn quarter_bracket_sq(s: &OrthogonalSplit, x: &Vector, y: &Vector) -> f64 {
        let g = s.algebra();
        let b = g.bracket(x, y).unwrap();
        0.25 * g.q_inner(&b, &b)
    }

    #[test]
    fn polynomial_identity_spot_values() {
        assert_eq!(closed_form_polynomial_check(1.0), (0.0, 0.0));
        let (a, b) = closed_form_polynomial_check(0.0);
        assert_eq!((a, b), (0.0, 0.0));
        let (a, b) = closed_form_polynomial_check(2.0);
        assert_eq!(a, -3.5);
        assert_eq!(b, -3.5);
        // −¼·2·1³·7
        assert_eq!(commuting_coefficient(2.0), -0.25 * 2.0 * 1.0 * 7.0);
    }

    #[test]
    fn qt_inner_basics() {
        let s = so4_split();
        let mut r = rng(4);
        let (x, y) = (gaussian_vector(&mut r, 6), gaussian_vector(&mut r, 6));
        let q1 = DeformedMetric::new(&s, 1.0).unwrap();
        assert!((q1.qt_inner(&x, &y).unwrap() - s.algebra().q_inner(&x, &y)).abs() < 1e-13);

        let q2 = DeformedMetric::new(&s, 2.0).unwrap();
        let xh = s.h().vector(0);
        assert!((q2.qt_inner(&xh, &xh).unwrap() - 2.0).abs() < 1e-14);
        let ym = s.m().vector(1);
        assert!(q2.qt_inner(&xh, &ym).unwrap().abs() < 1e-14);
    }

    #[test]
    fn rejects_non_positive_t() {
        let s = so4_split();
        assert!(DeformedMetric::new(&s, 0.0).is_err());
        assert!(DeformedMetric::new(&s, -1.0).is_err());
    }

    #[test]
    fn t_one_reduces_to_biinvariant() {
        let s = so4_split();
        let dm = DeformedMetric::new(&s, 1.0).unwrap();
        let mut r = rng(8);
        for _ in 0..50 {
            let (x, y) = (gaussian_vector(&mut r, 6), gaussian_vector(&mut r, 6));
            let direct = dm.curvature_numerator(&x, &y).unwrap();
            let oracle = quarter_bracket_sq(&s, &x, &y);
            assert!((direct - oracle).abs() <= 1e-10 * oracle.abs().max(1e-300), "{direct} {oracle}");
        }
    }

    #[test]
    fn numerator_vanishes_on_repeated_vector_and_abelian() {
        let s = so4_split();
        let dm = DeformedMetric::new(&s, 1.7).unwrap();
        let x = gaussian_vector(&mut rng(1), 6);
        assert!(dm.curvature_numerator(&x, &x).unwrap().abs() < 1e-14);

        let ab = LieAlgebra::abelian(4).unwrap();
        let sa = OrthogonalSplit::new(&ab, &[ab.basis_vector(0)]).unwrap();
        for t in [0.5, 1.0, 3.0] {
            let dm = DeformedMetric::new(&sa, t).unwrap();
            let mut r = rng(2);
            let (x, y) = (gaussian_vector(&mut r, 4), gaussian_vector(&mut r, 4));
            assert_eq!(dm.curvature_numerator(&x, &y).unwrap(), 0.0);
        }
    }

    #[test]
    fn sectional_rejects_degenerate_plane() {
        let s = so4_split();
        let dm = DeformedMetric::new(&s, 1.3).unwrap();
        let x = gaussian_vector(&mut rng(3), 6);
        let err = dm.sectional_curvature(&x, &(&x * 2.0)).unwrap_err();
        assert!(matches!(err, Error::DegeneratePlane { .. }));
    }

    #[test]
    fn sectional_is_a_plane_invariant() {
        let s = so4_split();
        let dm = DeformedMetric::new(&s, 1.4).unwrap();
        let mut r = rng(5);
        let (x, y) = (gaussian_vector(&mut r, 6), gaussian_vector(&mut r, 6));
        let k1 = dm.sectional_curvature(&x, &y).unwrap();
        let k2 = dm.sectional_curvature(&(&x + &y), &y).unwrap();
        assert!((k1 - k2).abs() <= 1e-8 * k1.abs().max(1e-12));
    }

    #[test]
    fn su2_biinvariant_is_positive() {
        let g = build_su(2).unwrap();
        let s = OrthogonalSplit::new(&g, &[g.basis_vector(2)]).unwrap();
        let dm = DeformedMetric::new(&s, 1.0).unwrap();
        let k = dm.sectional_curvature(&g.basis_vector(0), &g.basis_vector(1)).unwrap();
        let expected = quarter_bracket_sq(&s, &g.basis_vector(0), &g.basis_vector(1));
        assert!(k > 0.0);
        assert!((k - expected).abs() < 1e-14);
    }

    #[test]
    fn deform_plane_round_trip() {
        let s = so4_split();
        let mut r = rng(6);
        let (u, v) = (gaussian_vector(&mut r, 6), gaussian_vector(&mut r, 6));
        let id = DeformedMetric::new(&s, 1.0).unwrap();
        let (x, y) = id.deform_plane(&u, &v).unwrap();
        assert!((&x - &u).norm() < 1e-15 && (&y - &v).norm() < 1e-15);

        let dm = DeformedMetric::new(&s, 1.7).unwrap();
        let (x, y) = dm.deform_plane(&u, &v).unwrap();
        assert!((dm.deform(&x) - &u).norm() < 1e-12);
        assert!((dm.deform(&y) - &v).norm() < 1e-12);

        let um = s.m().vector(0);
        let (xm, _) = dm.deform_plane(&um, &v).unwrap();
        assert!((xm - um).norm() < 1e-15);
    }

    #[test]
    fn commuting_pair_in_diagonal_split() {
        let su2 = build_su(2).unwrap();
        let (g, s) = diagonal_embedding(&su2).unwrap();
        let mut u = g.zero();
        u[0] = 1.0; // (a, 0)
        let mut v = g.zero();
        v[4] = 1.0; // (0, b) with [a, b] ≠ 0
        assert_eq!(g.bracket(&u, &v).unwrap().norm(), 0.0);

        // [u_h, v_h] = ¼([a,b], [a,b])
        let uh = s.project_h(&u).unwrap();
        let vh = s.project_h(&v).unwrap();
        let ab = su2.bracket(&su2.basis_vector(0), &su2.basis_vector(1)).unwrap();
        let hh = g.bracket(&uh, &vh).unwrap();
        for k in 0..3 {
            assert!((hh[k] - 0.25 * ab[k]).abs() < 1e-15);
            assert!((hh[k + 3] - 0.25 * ab[k]).abs() < 1e-15);
        }

        for t in [1.05, 1.5, 2.0, 3.0] {
            let dm = DeformedMetric::new(&s, t).unwrap();
            let pc = dm.commuting_plane_curvature(&u, &v).unwrap();
            assert!(pc.numerator < 0.0);
            let direct = dm.curvature_numerator(&pc.x_vector(), &pc.y_vector()).unwrap();
            assert!((direct - pc.numerator).abs() <= 1e-8 * pc.numerator.abs());
        }
        let dm = DeformedMetric::new(&s, 1.0).unwrap();
        assert_eq!(dm.commuting_plane_curvature(&u, &v).unwrap().numerator, 0.0);
    }

    #[test]
    fn commuting_plane_rejects_non_commuting() {
        let s = so4_split();
        let g = s.algebra();
        let dm = DeformedMetric::new(&s, 1.5).unwrap();
        let err = dm.commuting_plane_curvature(&g.basis_vector(0), &g.basis_vector(1)).unwrap_err();
        assert!(matches!(err, Error::NotCommuting { .. }));
    }

    fn vec6() -> impl Strategy<Value = Vector> {
        prop::collection::vec(-2.0f64..2.0, 6).prop_map(Vector::from_vec)
    }

    proptest! {
        #[test]
        fn numerator_symmetry_and_scaling(x in vec6(), y in vec6(), t in 0.1f64..3.0, lam in -3.0f64..3.0) {
            let s = so4_split();
            let dm = DeformedMetric::new(&s, t).unwrap();
            let n = dm.curvature_numerator(&x, &y).unwrap();
            let scale = 1e-11 * (1.0 + x.norm_squared() * y.norm_squared()) * (1.0 + t * t);
            prop_assert!((n - dm.curvature_numerator(&y, &x).unwrap()).abs() <= scale);
            let scaled = dm.curvature_numerator(&(&x * lam), &y).unwrap();
            prop_assert!((scaled - lam * lam * n).abs() <= scale * (1.0 + lam * lam));
        }

        #[test]
        fn sectional_invariant_under_rescaling(x in vec6(), y in vec6(), lam in 0.2f64..3.0, mu in -3.0f64..-0.2) {
            let s = so4_split();
            let dm = DeformedMetric::new(&s, 1.6).unwrap();
            if let Ok(k) = dm.sectional_curvature(&x, &y) {
                let k2 = dm.sectional_curvature(&(&x * lam), &(&y * mu)).unwrap();
                prop_assert!((k - k2).abs() <= 1e-8 * k.abs().max(1.0));
            }
        }

        #[test]
        fn polynomial_forms_agree(t in 0.0f64..4.0) {
            let (a, b) = closed_form_polynomial_check(t);
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }
}
