//! Run reports and the command implementations behind the CLI.
//!
//! Reports are JSON with keys in declaration order and every float written
//! with 17 significant digits, so a report re-parsed and re-serialized is
//! byte-identical and two runs with the same inputs can be diffed directly.

use std::io;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::algebra::{LieAlgebra, ValidationReport, Vector};
use crate::catalog::{self, CatalogItem};
use crate::curvature::{DeformedMetric, PlaneCurvature, COMMUTATION_TOLERANCE};
use crate::error::{Error, Result};
use crate::split::OrthogonalSplit;
use crate::witness::{random_plane_scan, verify_theorem, SearchBudget, VerificationReport, Verdict};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Numerators at or above this floor count as non-negative in scans.
pub const NONNEGATIVE_FLOOR: f64 = -1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub input: InputEcho,
    pub seed: u64,
    pub payload: Payload,
    pub wall_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<String>,
    /// SHA-256 of the input file, when the pair came from a file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plane_digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<SearchBudget>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Catalog { entries: Vec<CatalogItem> },
    Validation(ValidationReport),
    Curvature(CurvaturePayload),
    Scan(ScanSummary),
    Verify(VerificationReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePayload {
    pub t: f64,
    /// The plane `(u, v)` itself, general formula.
    pub direct: PlaneCurvature,
    /// When `[u, v] = 0`: the pulled-back plane with its closed-form numerator.
    pub commuting: Option<CommutingEvaluation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutingEvaluation {
    pub plane: PlaneCurvature,
    pub closed_form_numerator: f64,
    pub direct_numerator: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub t: f64,
    pub samples: usize,
    pub min_numerator: f64,
    pub nonnegative: bool,
    pub argmin: PlaneCurvature,
}

/// Pair exchange format: an algebra (inline JSON or a built-in name) and a
/// spanning set for `h`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairJson {
    pub algebra: serde_json::Value,
    pub h_span: Vec<Vec<f64>>,
}

/// Plane file for the `curvature` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlaneJson {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// How a command ended, mapped onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 2,
            Outcome::Inconclusive => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub seed: u64,
    pub tolerance: Option<f64>,
}

impl RunOptions {
    fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(crate::algebra::DEFAULT_TOLERANCE)
    }
}

struct ReportFormatter(PrettyFormatter<'static>);

impl Formatter for ReportFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serialize in the report format (pretty, 17 significant digits).
pub fn to_report_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ReportFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

pub fn parse_report(text: &str) -> Result<RunReport> {
    Ok(serde_json::from_str(text)?)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A resolved `(g, h)` pair plus how it was named.
pub struct ResolvedPair {
    pub label: String,
    pub digest: Option<String>,
    pub split: OrthogonalSplit,
}

fn algebra_from_value(value: serde_json::Value, tol: f64) -> Result<LieAlgebra> {
    let g = match value {
        serde_json::Value::String(name) => catalog::named_algebra(&name)?,
        other => LieAlgebra::from_json(serde_json::from_value(other)?)?,
    };
    g.with_tolerance(tol)?.validated()
}

/// Resolve `--pair`: a catalog id, or a path to a pair JSON file.
pub fn resolve_pair(source: &str, tol: f64) -> Result<ResolvedPair> {
    if let Some(entry) = catalog::lookup(source) {
        return Ok(ResolvedPair {
            label: source.to_string(),
            digest: None,
            split: entry.build_with_tolerance(tol)?,
        });
    }
    let bytes = std::fs::read(source)?;
    let raw: PairJson = serde_json::from_slice(&bytes)?;
    let g = algebra_from_value(raw.algebra, tol)?;
    let span: Vec<Vector> = raw.h_span.into_iter().map(Vector::from_vec).collect();
    for v in &span {
        crate::error::check_dim(g.dim(), v.len())?;
    }
    Ok(ResolvedPair {
        label: source.to_string(),
        digest: Some(sha256_hex(&bytes)),
        split: OrthogonalSplit::new(&g, &span)?,
    })
}

/// Resolve an algebra source: catalog id or algebra name, or a JSON file
/// holding either an algebra or a pair (whose ambient algebra is used).
pub fn resolve_algebra(source: &str, tol: f64) -> Result<(LieAlgebra, Option<String>, ValidationReport)> {
    if let Ok(g) = catalog::named_algebra(source) {
        let g = g.with_tolerance(tol)?;
        let report = g.validate();
        return Ok((g, None, report));
    }
    let bytes = std::fs::read(source)?;
    let digest = Some(sha256_hex(&bytes));
    let mut value: serde_json::Value = serde_json::from_slice(&bytes)?;
    if let Some(inner) = value.get_mut("algebra") {
        let g = algebra_from_value(inner.take(), tol)?;
        let report = g.validate();
        return Ok((g, digest, report));
    }
    // report validation failures instead of refusing to load
    let raw: crate::algebra::AlgebraJson = serde_json::from_value(value)?;
    let q_missing = raw.q.is_none();
    let n = raw.dim;
    let q = match &raw.q {
        Some(rows) => nalgebra::DMatrix::from_fn(n, n, |i, j| rows.get(i).and_then(|r| r.get(j)).copied().unwrap_or(f64::NAN)),
        None => nalgebra::DMatrix::identity(n, n),
    };
    crate::error::check_dim(n, raw.c.len())?;
    let g = LieAlgebra::new(raw.c, q, raw.labels.unwrap_or_default())?.with_tolerance(tol)?;
    let report = g.validate();
    if q_missing && !report.passed {
        return Err(Error::Validation(
            "no Q given and the identity is not a valid biinvariant form".into(),
        ));
    }
    Ok((g, digest, report))
}

fn finish(input: InputEcho, seed: u64, payload: Payload, start: Instant) -> RunReport {
    RunReport {
        version: VERSION.to_string(),
        input,
        seed,
        payload,
        wall_ms: start.elapsed().as_millis() as u64,
    }
}

pub fn cmd_catalog(opts: &RunOptions) -> Result<RunReport> {
    let start = Instant::now();
    let input = InputEcho { command: "catalog".into(), tolerance: opts.tolerance(), ..Default::default() };
    Ok(finish(input, opts.seed, Payload::Catalog { entries: catalog::listing()? }, start))
}

pub fn cmd_validate(source: &str, opts: &RunOptions) -> Result<(RunReport, Outcome)> {
    let start = Instant::now();
    let (_, digest, report) = resolve_algebra(source, opts.tolerance())?;
    let outcome = if report.passed { Outcome::Pass } else { Outcome::Fail };
    let input = InputEcho {
        command: "validate".into(),
        pair: Some(source.to_string()),
        digest,
        tolerance: opts.tolerance(),
        ..Default::default()
    };
    Ok((finish(input, opts.seed, Payload::Validation(report), start), outcome))
}

pub fn cmd_curvature(pair: &str, t: f64, plane: &Path, opts: &RunOptions) -> Result<(RunReport, Outcome)> {
    let start = Instant::now();
    let resolved = resolve_pair(pair, opts.tolerance())?;
    let bytes = std::fs::read(plane)?;
    let raw: PlaneJson = serde_json::from_slice(&bytes)?;
    let (u, v) = (Vector::from_vec(raw.u), Vector::from_vec(raw.v));
    let split = &resolved.split;
    let g = split.algebra();
    let dm = DeformedMetric::new(split, t)?;
    let direct = dm.plane(&u, &v)?;
    let commutes = g.q_norm(&g.bracket(&u, &v)?) <= COMMUTATION_TOLERANCE * g.q_norm(&u) * g.q_norm(&v);
    let commuting = if commutes {
        let plane = dm.commuting_plane_curvature(&u, &v)?;
        let direct_numerator = dm.curvature_numerator(&plane.x_vector(), &plane.y_vector())?;
        Some(CommutingEvaluation { closed_form_numerator: plane.numerator, plane, direct_numerator })
    } else {
        None
    };
    let input = InputEcho {
        command: "curvature".into(),
        pair: Some(resolved.label),
        digest: resolved.digest,
        plane_digest: Some(sha256_hex(&bytes)),
        t: Some(t),
        tolerance: opts.tolerance(),
        ..Default::default()
    };
    let payload = Payload::Curvature(CurvaturePayload { t, direct, commuting });
    Ok((finish(input, opts.seed, payload, start), Outcome::Pass))
}

pub fn cmd_scan(pair: &str, t: f64, samples: usize, opts: &RunOptions) -> Result<(RunReport, Outcome)> {
    let start = Instant::now();
    let resolved = resolve_pair(pair, opts.tolerance())?;
    let scan = random_plane_scan(&resolved.split, t, samples, opts.seed)?;
    let summary = ScanSummary {
        t,
        samples,
        min_numerator: scan.min_numerator,
        nonnegative: scan.min_numerator >= NONNEGATIVE_FLOOR,
        argmin: scan.argmin,
    };
    let input = InputEcho {
        command: "scan".into(),
        pair: Some(resolved.label),
        digest: resolved.digest,
        t: Some(t),
        samples: Some(samples),
        tolerance: opts.tolerance(),
        ..Default::default()
    };
    Ok((finish(input, opts.seed, Payload::Scan(summary), start), Outcome::Pass))
}

pub fn cmd_verify(
    pair: &str,
    t_grid: &[f64],
    budget: &SearchBudget,
    opts: &RunOptions,
) -> Result<(RunReport, Outcome)> {
    let start = Instant::now();
    let resolved = resolve_pair(pair, opts.tolerance())?;
    let report = verify_theorem(&resolved.label, &resolved.split, t_grid, budget, opts.seed)?;
    let outcome = match report.verdict {
        Verdict::Consistent => Outcome::Pass,
        Verdict::Inconsistent => Outcome::Fail,
        Verdict::Inconclusive => Outcome::Inconclusive,
    };
    let input = InputEcho {
        command: "verify".into(),
        pair: Some(resolved.label),
        digest: resolved.digest,
        t_grid: Some(t_grid.to_vec()),
        budget: Some(*budget),
        tolerance: opts.tolerance(),
        ..Default::default()
    };
    Ok((finish(input, opts.seed, Payload::Verify(report), start), outcome))
}
