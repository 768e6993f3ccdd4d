//! Built-in `(g, h)` pairs.

use serde::{Deserialize, Serialize};

use crate::algebra::{build_so, build_su, build_u, LieAlgebra, Vector};
use crate::error::{Error, Result};
use crate::split::{diagonal_embedding, OrthogonalSplit};

pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    /// Documented expectation for labelling only; verdicts recompute it.
    pub expected_ss_ideal: bool,
    recipe: fn() -> Result<OrthogonalSplit>,
}

impl CatalogEntry {
    pub fn build(&self) -> Result<OrthogonalSplit> {
        (self.recipe)()
    }

    /// Rebuild with a different identity tolerance.
    pub fn build_with_tolerance(&self, tol: f64) -> Result<OrthogonalSplit> {
        let split = self.build()?;
        let g = split.algebra().clone().with_tolerance(tol)?;
        OrthogonalSplit::new(&g, &split.h().vectors())
    }
}

/// Summary line of a catalog entry, as reported by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogItem {
    pub id: String,
    pub description: String,
    pub expected_ss_ideal: bool,
    pub ambient_dim: usize,
    pub h_dim: usize,
}

fn basis_by_label(g: &LieAlgebra, keep: impl Fn(&str) -> bool) -> Vec<Vector> {
    g.labels()
        .iter()
        .enumerate()
        .filter(|(_, l)| keep(l))
        .map(|(i, _)| g.basis_vector(i))
        .collect()
}

/// `so(n)` basis vectors `B_ij` with `j ≤ k`.
fn so_block(g: &LieAlgebra, k: usize) -> Vec<Vector> {
    basis_by_label(g, |l| {
        let digits: Vec<usize> = l[2..].chars().filter_map(|c| c.to_digit(10)).map(|d| d as usize).collect();
        digits.iter().all(|&d| d <= k)
    })
}

fn su2su2_diag() -> Result<OrthogonalSplit> {
    Ok(diagonal_embedding(&build_su(2)?)?.1)
}

fn su2su2_factor() -> Result<OrthogonalSplit> {
    let su2 = build_su(2)?;
    let g = su2.direct_sum(&su2)?;
    let h = basis_by_label(&g, |l| l.starts_with("1:"));
    OrthogonalSplit::new(&g, &h)
}

fn so4_so3block() -> Result<OrthogonalSplit> {
    let g = build_so(4)?;
    let h = so_block(&g, 3);
    OrthogonalSplit::new(&g, &h)
}

fn su2_u1() -> Result<OrthogonalSplit> {
    let g = build_su(2)?;
    let h = basis_by_label(&g, |l| l.starts_with('H'));
    OrthogonalSplit::new(&g, &h)
}

fn so5_so4() -> Result<OrthogonalSplit> {
    let g = build_so(5)?;
    let h = so_block(&g, 4);
    OrthogonalSplit::new(&g, &h)
}

fn su3_torus() -> Result<OrthogonalSplit> {
    let g = build_su(3)?;
    let h = basis_by_label(&g, |l| l.starts_with('H'));
    OrthogonalSplit::new(&g, &h)
}

static CATALOG: [CatalogEntry; 6] = [
    CatalogEntry {
        id: "su2su2-diag",
        description: "diagonal su(2) inside su(2) + su(2)",
        expected_ss_ideal: false,
        recipe: su2su2_diag,
    },
    CatalogEntry {
        id: "su2su2-factor",
        description: "first factor su(2) inside su(2) + su(2)",
        expected_ss_ideal: true,
        recipe: su2su2_factor,
    },
    CatalogEntry {
        id: "so4-so3block",
        description: "upper-left so(3) block inside so(4)",
        expected_ss_ideal: false,
        recipe: so4_so3block,
    },
    CatalogEntry {
        id: "su2-u1",
        description: "diagonal u(1) inside su(2) (Berger stretch)",
        expected_ss_ideal: true,
        recipe: su2_u1,
    },
    CatalogEntry {
        id: "so5-so4",
        description: "upper-left so(4) block inside so(5)",
        expected_ss_ideal: false,
        recipe: so5_so4,
    },
    CatalogEntry {
        id: "sunk-torus",
        description: "maximal torus u(1)^2 inside su(3)",
        expected_ss_ideal: true,
        recipe: su3_torus,
    },
];

pub fn catalog() -> &'static [CatalogEntry] {
    &CATALOG
}

pub fn lookup(id: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.id == id)
}

pub fn listing() -> Result<Vec<CatalogItem>> {
    CATALOG
        .iter()
        .map(|e| {
            let s = e.build()?;
            Ok(CatalogItem {
                id: e.id.to_string(),
                description: e.description.to_string(),
                expected_ss_ideal: e.expected_ss_ideal,
                ambient_dim: s.algebra().dim(),
                h_dim: s.d(),
            })
        })
        .collect()
}

/// Resolve a built-in algebra name: `so<n>`, `su<n>`, `u<n>`, a `+`-joined
/// direct sum of those (`su2+su2`), or a catalog pair id (its ambient algebra).
pub fn named_algebra(name: &str) -> Result<LieAlgebra> {
    if let Some(entry) = lookup(name) {
        return Ok(entry.build()?.algebra().clone());
    }
    let mut parts = name.split('+').map(str::trim);
    let first = parts.next().unwrap_or_default();
    let mut g = classical(first)?;
    for p in parts {
        g = g.direct_sum(&classical(p)?)?;
    }
    Ok(g)
}

fn classical(name: &str) -> Result<LieAlgebra> {
    let unknown = || Error::InvalidArgument(format!("unknown algebra name {name:?}"));
    let (family, n) = if let Some(n) = name.strip_prefix("so") {
        ("so", n)
    } else if let Some(n) = name.strip_prefix("su") {
        ("su", n)
    } else if let Some(n) = name.strip_prefix('u') {
        ("u", n)
    } else {
        return Err(unknown());
    };
    let n: usize = n.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| unknown())?;
    match family {
        "so" => build_so(n),
        "su" => build_su(n),
        _ => build_u(n),
    }
}
