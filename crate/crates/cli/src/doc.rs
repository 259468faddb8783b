//! JSON document schemas.
//!
//! All numeric payloads travel as strings — `"p/q"` (parts may be
//! decimals) or decimal literals with an optional exponent — and are
//! parsed against the document's effective backend.  Unknown fields are
//! rejected everywhere; parse failures carry the JSON path of the
//! offending value.

use std::collections::BTreeMap;

use fchordal::{
    Backend, ChordFunction, Coefficient, ConditionReport, Coordinate, FChordalProblem, GCReport,
    Gauge, JoinData, LocalSolution, Mode, OrderPivots, Point, TruncatedSeries,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_ORDER: usize = 16;
pub const DEFAULT_FLOAT_PRECISION: usize = 256;

// ---------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------

/// Deserializes a document, reporting the JSON path of any failure.
pub fn parse_document<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|err| {
        CliError::invalid(
            "invalid-document",
            err.inner().to_string(),
            format!("{what}: {}", err.path()),
        )
    })
}

/// Parses one coefficient string against the backend.
pub fn coeff(text: &str, backend: Backend, location: &str) -> Result<Coefficient, CliError> {
    Coefficient::parse(text, backend)
        .map_err(|err| CliError::invalid("coefficient", err.to_string(), location))
}

/// Parses a coefficient vector into a truncated series.
pub fn series(values: &[String], backend: Backend, location: &str) -> Result<TruncatedSeries, CliError> {
    if values.is_empty() {
        return Err(CliError::invalid("series", "series needs at least one coefficient", location));
    }
    let coeffs = values
        .iter()
        .enumerate()
        .map(|(i, v)| coeff(v, backend, &format!("{location}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    TruncatedSeries::from_coeffs(coeffs)
        .map_err(|err| CliError::invalid("series", err.to_string(), location))
}

pub fn series_strings(s: &TruncatedSeries) -> Vec<String> {
    s.coeffs().iter().map(Coefficient::to_string).collect()
}

// ---------------------------------------------------------------------
// Problem documents
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub points: PointsDocument,
    pub chord_function: ChordFunctionDocument,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub mode: Option<ModeChoice>,
    #[serde(default)]
    pub gauge: Option<GaugeDocument>,
    #[serde(default)]
    pub overrides: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub backend: Option<BackendChoice>,
    #[serde(default)]
    pub precision: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsDocument {
    #[serde(rename = "V1")]
    pub v1: [String; 2],
    #[serde(rename = "P")]
    pub p: [String; 2],
    #[serde(rename = "Q")]
    pub q: [String; 2],
    #[serde(rename = "V2")]
    pub v2: [String; 2],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChordFunctionDocument {
    pub kind: String,
    #[serde(default)]
    pub alpha: Option<String>,
    #[serde(default, rename = "phi_P")]
    pub phi_p: Option<BranchDocument>,
    #[serde(default, rename = "phi_Q")]
    pub phi_q: Option<BranchDocument>,
}

/// A branch series φ with its expansion anchor.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchDocument {
    pub anchor: String,
    pub coefficients: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BackendChoice {
    Rational,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModeChoice {
    Perpendicular,
    Parallel,
    Oblique,
}

/// Free data of the solution: `y1` scales the transversal coordinate,
/// `tail` feeds the free coefficients from order 2 on, and `x1` supplies
/// the tangent's axis component in oblique mode.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeDocument {
    #[serde(default)]
    pub y1: Option<String>,
    #[serde(default)]
    pub x1: Option<String>,
    #[serde(default)]
    pub tail: Option<Vec<String>>,
}

/// Command-line overlays applied on top of a problem document.
#[derive(Debug, Clone, Default)]
pub struct Overlay {
    pub order: Option<usize>,
    pub mode: Option<ModeChoice>,
    pub backend: Option<BackendChoice>,
    pub precision: Option<usize>,
    pub gauge: Option<GaugeDocument>,
    pub overrides: Vec<(usize, String)>,
}

fn point(pair: &[String; 2], backend: Backend, location: &str) -> Result<Point, CliError> {
    Ok(Point::new(
        coeff(&pair[0], backend, &format!("{location}[0]"))?,
        coeff(&pair[1], backend, &format!("{location}[1]"))?,
    ))
}

fn chord_function(
    doc: &ChordFunctionDocument,
    backend: Backend,
) -> Result<ChordFunction, CliError> {
    let loc = "chord_function";
    let expect_plain = |f: &ChordFunction| -> Result<ChordFunction, CliError> {
        if doc.alpha.is_some() {
            return Err(CliError::invalid(
                "chord-function",
                format!("alpha is only meaningful for power-sum, not {}", doc.kind),
                format!("{loc}.alpha"),
            ));
        }
        if doc.phi_p.is_some() || doc.phi_q.is_some() {
            return Err(CliError::invalid(
                "chord-function",
                format!("branch series are only meaningful for custom-phi, not {}", doc.kind),
                loc,
            ));
        }
        Ok(f.clone())
    };
    match doc.kind.as_str() {
        "equichordal" => expect_plain(&ChordFunction::Equichordal),
        "equiproduct" => expect_plain(&ChordFunction::Equiproduct),
        "equireciprocal" => expect_plain(&ChordFunction::Equireciprocal),
        "difference" => expect_plain(&ChordFunction::Difference),
        "power-sum" => {
            let alpha = doc.alpha.as_deref().ok_or_else(|| {
                CliError::invalid("chord-function", "power-sum needs alpha", format!("{loc}.alpha"))
            })?;
            Ok(ChordFunction::PowerSum { alpha: coeff(alpha, backend, &format!("{loc}.alpha"))? })
        }
        "custom-phi" => {
            let branch = |b: &Option<BranchDocument>, name: &str| {
                let b = b.as_ref().ok_or_else(|| {
                    CliError::invalid(
                        "chord-function",
                        format!("custom-phi needs {name}"),
                        format!("{loc}.{name}"),
                    )
                })?;
                Ok((
                    coeff(&b.anchor, backend, &format!("{loc}.{name}.anchor"))?,
                    series(&b.coefficients, backend, &format!("{loc}.{name}.coefficients"))?,
                ))
            };
            let (anchor_p, phi_p) = branch(&doc.phi_p, "phi_P")?;
            let (anchor_q, phi_q) = branch(&doc.phi_q, "phi_Q")?;
            Ok(ChordFunction::CustomPhi { phi_p, anchor_p, phi_q, anchor_q })
        }
        other => Err(CliError::invalid(
            "chord-function",
            format!(
                "unknown chord-function kind {other:?}; expected equichordal, equiproduct, \
                 equireciprocal, power-sum, difference, or custom-phi"
            ),
            format!("{loc}.kind"),
        )),
    }
}

/// Resolves a problem document plus command-line overlays into a problem.
pub fn build_problem(doc: &ProblemDocument, overlay: &Overlay) -> Result<FChordalProblem, CliError> {
    let precision = overlay.precision.or(doc.precision);
    let backend_choice = overlay
        .backend
        .or(doc.backend)
        .or(precision.map(|_| BackendChoice::Float))
        .unwrap_or(BackendChoice::Rational);
    let backend = match backend_choice {
        BackendChoice::Rational => {
            if let Some(bits) = precision {
                return Err(CliError::invalid(
                    "backend",
                    format!("precision ({bits} bits) is only meaningful with the float backend"),
                    "precision",
                ));
            }
            Backend::Rational
        }
        BackendChoice::Float => Backend::Float { bits: precision.unwrap_or(DEFAULT_FLOAT_PRECISION) },
    };

    let v1 = point(&doc.points.v1, backend, "points.V1")?;
    let p = point(&doc.points.p, backend, "points.P")?;
    let q = point(&doc.points.q, backend, "points.Q")?;
    let v2 = point(&doc.points.v2, backend, "points.V2")?;
    let chord = chord_function(&doc.chord_function, backend)?;
    let order = overlay.order.or(doc.order).unwrap_or(DEFAULT_ORDER);

    let gauge_doc = overlay.gauge.as_ref().or(doc.gauge.as_ref());
    let gauge = match gauge_doc {
        None => Gauge::canonical(backend),
        Some(g) => Gauge {
            y1: match &g.y1 {
                Some(v) => coeff(v, backend, "gauge.y1")?,
                None => Coefficient::one(backend),
            },
            tail: match &g.tail {
                Some(tail) => tail
                    .iter()
                    .enumerate()
                    .map(|(i, v)| coeff(v, backend, &format!("gauge.tail[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?,
                None => Vec::new(),
            },
        },
    };

    let mode = match overlay.mode.or(doc.mode).unwrap_or(ModeChoice::Perpendicular) {
        ModeChoice::Perpendicular => Mode::Perpendicular,
        ModeChoice::Parallel => Mode::Parallel,
        ModeChoice::Oblique => {
            let g = gauge_doc.ok_or_else(|| {
                CliError::invalid(
                    "invalid-gauge",
                    "oblique mode needs a gauge with x1 and y1",
                    "gauge",
                )
            })?;
            let x1 = g.x1.as_deref().ok_or_else(|| {
                CliError::invalid("invalid-gauge", "oblique mode needs gauge.x1", "gauge.x1")
            })?;
            let y1 = g.y1.as_deref().ok_or_else(|| {
                CliError::invalid("invalid-gauge", "oblique mode needs gauge.y1", "gauge.y1")
            })?;
            Mode::Oblique {
                x1: coeff(x1, backend, "gauge.x1")?,
                y1: coeff(y1, backend, "gauge.y1")?,
            }
        }
    };
    if !matches!(mode, Mode::Oblique { .. }) {
        if let Some(g) = gauge_doc {
            if g.x1.is_some() {
                return Err(CliError::invalid(
                    "invalid-gauge",
                    format!("gauge.x1 is only meaningful in oblique mode, not {}", mode.name()),
                    "gauge.x1",
                ));
            }
        }
    }

    let mut overrides = BTreeMap::new();
    if let Some(doc_overrides) = &doc.overrides {
        for (key, value) in doc_overrides {
            let order: usize = key.parse().map_err(|_| {
                CliError::invalid(
                    "override",
                    format!("override key {key:?} is not an order"),
                    format!("overrides.{key}"),
                )
            })?;
            overrides.insert(order, coeff(value, backend, &format!("overrides.{key}"))?);
        }
    }
    for (k, value) in &overlay.overrides {
        overrides.insert(*k, coeff(value, backend, &format!("--override {k}"))?);
    }

    Ok(FChordalProblem { v1, p, q, v2, chord, order, mode, gauge, backend, overrides })
}

// ---------------------------------------------------------------------
// Solution documents
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDocument {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub u: Vec<String>,
    pub pivots: Vec<PivotDocument>,
    pub paper_resonances: Vec<usize>,
    pub runtime_resonances: Vec<usize>,
    pub verified_order: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PivotDocument {
    pub order: usize,
    pub u_pivot: String,
    pub second_pivot: String,
}

impl SolutionDocument {
    pub fn from_solution(sol: &LocalSolution, report: Option<&ConditionReport>) -> Self {
        SolutionDocument {
            x: series_strings(&sol.x),
            y: series_strings(&sol.y),
            u: series_strings(&sol.u),
            pivots: sol
                .pivots
                .iter()
                .map(|p: &OrderPivots| PivotDocument {
                    order: p.order,
                    u_pivot: p.u_pivot.to_string(),
                    second_pivot: p.second_pivot.to_string(),
                })
                .collect(),
            paper_resonances: report.map(|r| r.paper_resonances.clone()).unwrap_or_default(),
            runtime_resonances: report.map(|r| r.runtime_resonances.clone()).unwrap_or_default(),
            verified_order: sol.verified_order,
        }
    }

    /// Rebuilds the series triple in the normalized frame, for `verify`.
    pub fn to_series(
        &self,
        backend: Backend,
    ) -> Result<(TruncatedSeries, TruncatedSeries, TruncatedSeries), CliError> {
        let x = series(&self.x, backend, "x")?;
        let y = series(&self.y, backend, "y")?;
        let u = series(&self.u, backend, "u")?;
        if y.order() != x.order() || u.order() != x.order() {
            return Err(CliError::invalid(
                "series",
                format!(
                    "x, y, u must share one length; got {}, {}, {}",
                    x.order() + 1,
                    y.order() + 1,
                    u.order() + 1
                ),
                "solution",
            ));
        }
        Ok((x, y, u))
    }
}

// ---------------------------------------------------------------------
// Condition diagnostics
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct ConditionDocument {
    pub condition_iii: bool,
    pub paper_resonances: Vec<usize>,
    pub runtime_resonances: Vec<usize>,
    #[serde(rename = "C")]
    pub c: String,
    pub ratio: String,
}

impl ConditionDocument {
    pub fn from_report(report: &ConditionReport) -> Self {
        ConditionDocument {
            condition_iii: report.condition_iii,
            paper_resonances: report.paper_resonances.clone(),
            runtime_resonances: report.runtime_resonances.clone(),
            c: report.c.to_string(),
            ratio: report.ratio.to_string(),
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("condition reports always serialize")
    }
}

// ---------------------------------------------------------------------
// Join documents (gc-check)
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JoinDocument {
    pub order: usize,
    pub left: ArcDocument,
    pub right: ArcDocument,
    #[serde(default)]
    pub backend: Option<BackendChoice>,
    #[serde(default)]
    pub precision: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcDocument {
    pub x: Vec<String>,
    pub y: Vec<String>,
}

impl JoinDocument {
    pub fn backend(&self) -> Backend {
        match self.backend.unwrap_or(BackendChoice::Rational) {
            BackendChoice::Rational => Backend::Rational,
            BackendChoice::Float => {
                Backend::Float { bits: self.precision.unwrap_or(DEFAULT_FLOAT_PRECISION) }
            }
        }
    }

    pub fn to_join(&self) -> Result<JoinData, CliError> {
        let backend = self.backend();
        let arc = |a: &ArcDocument, name: &str| -> Result<(TruncatedSeries, TruncatedSeries), CliError> {
            let x = series(&a.x, backend, &format!("{name}.x"))?;
            let y = series(&a.y, backend, &format!("{name}.y"))?;
            for (s, coord) in [(&x, "x"), (&y, "y")] {
                if s.order() != self.order {
                    return Err(CliError::invalid(
                        "series",
                        format!(
                            "{name}.{coord} has {} coefficients; order {} needs {}",
                            s.order() + 1,
                            self.order,
                            self.order + 1
                        ),
                        format!("{name}.{coord}"),
                    ));
                }
            }
            Ok((x, y))
        };
        let (lx, ly) = arc(&self.left, "left")?;
        let (rx, ry) = arc(&self.right, "right")?;
        JoinData::new(lx, ly, rx, ry).map_err(|err| CliError::from_gcheck(&err, "join"))
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum GcReportDocument {
    Success { u: Vec<String>, orientation_reversing: bool },
    Failure { order: usize, coordinate: String, residual: String, max_verified: usize },
}

impl GcReportDocument {
    pub fn from_report(report: &GCReport) -> Self {
        match report {
            GCReport::Success { u, orientation_reversing } => GcReportDocument::Success {
                u: series_strings(u),
                orientation_reversing: *orientation_reversing,
            },
            GCReport::Failure { order, coordinate, residual, max_verified } => {
                GcReportDocument::Failure {
                    order: *order,
                    coordinate: match coordinate {
                        Coordinate::X => "x".to_string(),
                        Coordinate::Y => "y".to_string(),
                    },
                    residual: residual.to_string(),
                    max_verified: *max_verified,
                }
            }
        }
    }
}

// ---------------------------------------------------------------------
// Riordan documents
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiordanDocument {
    pub d: Vec<String>,
    pub h: Vec<String>,
    pub order: usize,
    #[serde(default)]
    pub backend: Option<BackendChoice>,
    #[serde(default)]
    pub precision: Option<usize>,
}

impl RiordanDocument {
    pub fn backend(&self) -> Backend {
        match self.backend.unwrap_or(BackendChoice::Rational) {
            BackendChoice::Rational => Backend::Rational,
            BackendChoice::Float => {
                Backend::Float { bits: self.precision.unwrap_or(DEFAULT_FLOAT_PRECISION) }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RiordanOutputDocument {
    pub order: usize,
    pub rows: Vec<Vec<String>>,
}

// ---------------------------------------------------------------------
// Verification reports
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReportDocument {
    pub order: usize,
    pub verified_order: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReportDocument>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReportDocument {
    pub kind: String,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_x: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub semi_axis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch_order: Option<usize>,
}
