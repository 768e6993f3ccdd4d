//! Sectional curvature of Cheeger-stretched left-invariant metrics on compact
//! Lie groups, explicit negative-curvature witnesses from commuting pairs, and
//! a harness that checks when stretching along a subalgebra can keep
//! curvature non-negative.

pub mod algebra;
pub mod catalog;
pub mod curvature;
pub mod error;
pub mod linalg;
pub mod report;
pub mod split;
pub mod structure;
pub mod subspace;
pub mod witness;

pub use algebra::{build_so, build_su, build_u, LieAlgebra, ValidationReport, Vector};
pub use curvature::{closed_form_polynomial_check, DeformedMetric, PlaneCurvature};
pub use catalog::{catalog, lookup, named_algebra, CatalogEntry, CatalogItem};
pub use error::{Error, Result};
pub use report::{to_report_json, Outcome, Payload, RunOptions, RunReport};
pub use split::{diagonal_embedding, make_split, OrthogonalSplit};
pub use structure::{
    adjunction_span, center, derived_subalgebra, ideal_generated_by, is_ideal, joint_rotation_blocks, rank,
    rank_of_subalgebra, semisimple_part_is_ideal, simple_ideal_decomposition,
};
pub use subspace::Subspace;
pub use witness::{
    conjugated_commuting_witness, descent_refine, random_commuting_pair, random_plane_scan, torus_pair,
    verify_theorem, CommutingPair, PlaneWitness, Regime, SearchBudget, Strategy, VerificationReport, Verdict,
};
