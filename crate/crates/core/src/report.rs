//! Evaluation report structure and its json / csv / text renderings.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{Method, MethodComparison, Ranking};
use crate::elicitation::ElicitationRule;
use crate::error::{Error, Result};
use crate::fuzzy::Tfn;
use crate::hierarchy::Cohort;

pub const SCHEMA_VERSION: &str = "1";

/// Criteria-matrix GCI reported for the published expert judgments.
pub const REFERENCE_CRITERIA_GCI: f64 = 0.1189;

/// Rounds to 12 significant digits so serialized output is stable.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub fn round_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().copied().map(round_sig).collect()
}

pub(crate) fn round_tfn(t: Tfn) -> Tfn {
    Tfn::new(round_sig(t.l()), round_sig(t.m()), round_sig(t.u())).expect("rounding keeps component order")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSelection {
    Ahp,
    Fahp,
    Both,
}

impl MethodSelection {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodSelection::Ahp => vec![Method::Ahp],
            MethodSelection::Fahp => vec![Method::Fahp],
            MethodSelection::Both => vec![Method::Ahp, Method::Fahp],
        }
    }

    pub fn includes(self, method: Method) -> bool {
        self.methods().contains(&method)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GciEntry {
    /// `criteria` or a sub-criterion id.
    pub matrix: String,
    pub n: usize,
    pub gci: f64,
    pub threshold: Option<f64>,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaWeights {
    pub sub_criteria: Vec<String>,
    pub crisp: Option<Vec<f64>>,
    pub fuzzy: Option<Vec<Tfn>>,
    pub fuzzy_defuzzified: Option<Vec<f64>>,
    pub fuzzy_normalized: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalWeights {
    pub sub_criterion: String,
    pub included: Vec<String>,
    /// One weight per alternative; excluded alternatives get 0.
    pub crisp: Option<Vec<f64>>,
    pub fuzzy_normalized: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeScore {
    pub alternative: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: Method,
    pub scores: Vec<AlternativeScore>,
    pub ranking: Ranking,
}

/// Agreement of a run with a published ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub method: Method,
    pub cohort: Cohort,
    pub expected: Vec<String>,
    pub obtained: Vec<String>,
    pub tau: f64,
    pub bottom_two_match: bool,
    pub top_three_match: bool,
    pub exact_match: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEntry {
    Clipped {
        matrix: String,
        row: String,
        col: String,
        raw: f64,
        clipped: f64,
    },
    Excluded {
        matrix: String,
        alternative: String,
    },
    MissingFloored {
        matrix: String,
        alternative: String,
        epsilon: f64,
    },
    ZeroFloored {
        matrix: String,
        alternative: String,
        epsilon: f64,
    },
    TieBreak {
        method: Method,
        first: String,
        second: String,
        score: f64,
    },
    ConsistencyWarning {
        matrix: String,
        gci: f64,
        threshold: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: String,
    pub goal: String,
    pub method: MethodSelection,
    pub cohort: Cohort,
    pub criteria_rule: ElicitationRule,
    pub indicator_rule: ElicitationRule,
    pub strict_consistency: bool,
    pub alternatives: Vec<String>,
    pub consistency: Vec<GciEntry>,
    pub reference_criteria_gci: f64,
    pub criteria_weights: CriteriaWeights,
    pub local_weights: Vec<LocalWeights>,
    pub results: Vec<MethodResult>,
    pub comparison: Option<MethodComparison>,
    pub reference_check: Vec<ReferenceCheck>,
    pub log: Vec<LogEntry>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl EvaluationReport {
    pub fn result(&self, method: Method) -> Option<&MethodResult> {
        self.results.iter().find(|r| r.method == method)
    }

    pub fn criteria_gci(&self) -> &GciEntry {
        &self.consistency[0]
    }

    /// Every weight vector the report carries, with a label.
    pub fn weight_vectors(&self) -> Vec<(String, &[f64])> {
        let mut out: Vec<(String, &[f64])> = Vec::new();
        let c = &self.criteria_weights;
        if let Some(w) = &c.crisp {
            out.push(("criteria crisp".into(), w));
        }
        if let Some(w) = &c.fuzzy_normalized {
            out.push(("criteria fuzzy".into(), w));
        }
        for local in &self.local_weights {
            if let Some(w) = &local.crisp {
                out.push((format!("{} crisp", local.sub_criterion), w));
            }
            if let Some(w) = &local.fuzzy_normalized {
                out.push((format!("{} fuzzy", local.sub_criterion), w));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Text,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "text" | "text-summary" => Ok(ReportFormat::Text),
            other => Err(Error::UnsupportedFormat(other.to_string())),
        }
    }
}

pub fn emit_report(report: &EvaluationReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(report).map_err(|e| Error::Invariant(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv => Ok(to_csv(report)?.into_bytes()),
        ReportFormat::Text => Ok(to_text(report).into_bytes()),
    }
}

fn to_csv(report: &EvaluationReport) -> Result<String> {
    let mut out = String::new();
    for (t, result) in report.results.iter().enumerate() {
        if t > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "# {} {}", result.method, report.cohort);
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Invariant(e.to_string());
        w.write_record(["method", "cohort", "rank", "alternative", "score"]).map_err(io)?;
        for e in &result.ranking.entries {
            w.write_record([
                result.method.as_str(),
                report.cohort.as_str(),
                &e.rank.to_string(),
                &e.alternative,
                &format!("{:.12}", e.score),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invariant(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
    }
    Ok(out)
}

fn method_title(method: Method) -> &'static str {
    match method {
        Method::Ahp => "AHP method",
        Method::Fahp => "Fuzzy AHP method",
    }
}

fn to_text(report: &EvaluationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Goal: {}", report.goal);
    let _ = writeln!(s, "Cohort: {}", report.cohort);
    let c = report.criteria_gci();
    let threshold = c.threshold.map_or("none".to_string(), |t| format!("{t}"));
    let _ = writeln!(
        s,
        "Criteria matrix: n = {}, GCI = {:.4} (threshold {}, {}); reference GCI {}",
        c.n,
        c.gci,
        threshold,
        if c.consistent { "consistent" } else { "INCONSISTENT" },
        report.reference_criteria_gci
    );
    let failing: Vec<&str> = report
        .consistency
        .iter()
        .filter(|g| !g.consistent)
        .map(|g| g.matrix.as_str())
        .collect();
    if !failing.is_empty() {
        let _ = writeln!(s, "Inconsistent matrices: {}", failing.join(", "));
    }

    for result in &report.results {
        let _ = writeln!(s, "\n{}", method_title(result.method));
        let width = result
            .ranking
            .entries
            .iter()
            .map(|e| e.alternative.len())
            .max()
            .unwrap_or(0)
            .max("alternative".len());
        let _ = writeln!(s, "  {:<4}  {:<width$}  score", "rank", "alternative");
        for e in &result.ranking.entries {
            let tie = if e.tied { " (tied)" } else { "" };
            let _ = writeln!(s, "  {:<4}  {:<width$}  {:.6}{}", e.rank, e.alternative, e.score, tie);
        }
        let mut lowest_first = result.ranking.order();
        lowest_first.reverse();
        let _ = writeln!(s, "  lowest to highest: {}", lowest_first.join(", "));
    }

    if let Some(cmp) = &report.comparison {
        let moved: Vec<String> = cmp
            .displaced
            .iter()
            .map(|d| format!("{} ({} -> {})", d.alternative, d.rank_a, d.rank_b))
            .collect();
        let _ = writeln!(
            s,
            "\nMethod agreement: tau = {:.4}, max displacement {}{}",
            cmp.tau,
            cmp.max_displacement,
            if moved.is_empty() {
                String::new()
            } else {
                format!(", moved: {}", moved.join(", "))
            }
        );
    }
    for check in &report.reference_check {
        let _ = writeln!(
            s,
            "Reference {} {}: tau = {:.4}, bottom two {}, top three {}",
            check.method,
            check.cohort,
            check.tau,
            if check.bottom_two_match { "match" } else { "DIFFER" },
            if check.top_three_match { "match" } else { "DIFFER" },
        );
    }
    for w in &report.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}
