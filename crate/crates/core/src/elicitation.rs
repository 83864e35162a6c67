//! Builds pairwise-comparison matrices from importance ranks and from raw
//! indicator values, and lifts crisp matrices onto the triangular fuzzy scale.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ahp::ComparisonMatrix;
use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyComparisonMatrix, Tfn};
use crate::hierarchy::Direction;

/// Bundled nine-grade triangular scale with its reciprocal rows.
pub const DEFAULT_SCALE_CSV: &str = include_str!("../data/fuzzy_scale.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    /// `a_ij = f_i / f_j`.
    DirectRatio,
    /// `a_ij = f_i - f_j + 1` when `f_i >= f_j`, reciprocal otherwise.
    SaatyDifference,
}

impl RuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::DirectRatio => "direct_ratio",
            RuleKind::SaatyDifference => "saaty_difference",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// Leave the alternative out of that sub-criterion's matrix; it gets local weight 0.
    ExcludeAlternative,
    /// Substitute a small positive value for the missing cell.
    EpsilonFloor(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElicitationRule {
    pub kind: RuleKind,
    pub clip_high: f64,
    pub missing_policy: MissingPolicy,
}

impl ElicitationRule {
    pub fn new(kind: RuleKind) -> Self {
        Self {
            kind,
            clip_high: 9.0,
            missing_policy: MissingPolicy::ExcludeAlternative,
        }
    }

    pub fn with_missing_policy(mut self, policy: MissingPolicy) -> Self {
        self.missing_policy = policy;
        self
    }

    pub fn clip_low(&self) -> f64 {
        1.0 / self.clip_high
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.clip_high.is_finite() && self.clip_high >= 1.0) {
            return Err(Error::InvalidRule(format!("clip bound {} must be >= 1", self.clip_high)));
        }
        if let MissingPolicy::EpsilonFloor(eps) = self.missing_policy {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::InvalidRule(format!("epsilon {eps} must be positive")));
            }
        }
        Ok(())
    }

    fn clip(&self, raw: f64) -> f64 {
        raw.clamp(self.clip_low(), self.clip_high)
    }
}

/// Non-silent changes made while building a matrix. Indices refer to the
/// caller's input positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Adjustment {
    Clipped { row: usize, col: usize, raw: f64, clipped: f64 },
    Excluded { index: usize },
    MissingFloored { index: usize, epsilon: f64 },
    ZeroFloored { index: usize, epsilon: f64 },
}

/// A built matrix over the `included` input positions.
#[derive(Debug, Clone, PartialEq)]
pub struct ElicitedMatrix {
    pub matrix: ComparisonMatrix,
    pub included: Vec<usize>,
    pub adjustments: Vec<Adjustment>,
}

fn build(
    scores: &[f64],
    included: Vec<usize>,
    rule: &ElicitationRule,
    mut adjustments: Vec<Adjustment>,
    pair: impl Fn(f64, f64) -> f64,
) -> Result<ElicitedMatrix> {
    let mut clipped = Vec::new();
    let matrix = ComparisonMatrix::from_upper(scores.len(), |i, j| {
        let raw = pair(scores[i], scores[j]);
        let value = rule.clip(raw);
        if value != raw {
            clipped.push(Adjustment::Clipped {
                row: included[i],
                col: included[j],
                raw,
                clipped: value,
            });
        }
        value
    })?;
    adjustments.extend(clipped);
    Ok(ElicitedMatrix {
        matrix,
        included,
        adjustments,
    })
}

fn saaty_pair(a: f64, b: f64) -> f64 {
    if a >= b {
        a - b + 1.0
    } else {
        1.0 / (b - a + 1.0)
    }
}

/// Criteria-level matrix from integer importance ranks.
pub fn importance_to_matrix(importances: &[u32], rule: &ElicitationRule) -> Result<ElicitedMatrix> {
    rule.validate()?;
    if importances.is_empty() {
        return Err(Error::EmptyList);
    }
    if let Some(pos) = importances.iter().position(|&f| f == 0) {
        return Err(Error::NonPositiveImportance(format!("position {pos}")));
    }
    let scores: Vec<f64> = importances.iter().map(|&f| f as f64).collect();
    let included = (0..scores.len()).collect();
    match rule.kind {
        RuleKind::DirectRatio => build(&scores, included, rule, Vec::new(), |a, b| a / b),
        RuleKind::SaatyDifference => build(&scores, included, rule, Vec::new(), saaty_pair),
    }
}

/// Alternative-level matrix for one sub-criterion from its indicator values.
pub fn indicators_to_matrix(
    values: &[Option<f64>],
    direction: Direction,
    rule: &ElicitationRule,
) -> Result<ElicitedMatrix> {
    rule.validate()?;
    let mut adjustments = Vec::new();
    let mut included = Vec::new();
    let mut present = Vec::new();
    for (index, value) in values.iter().enumerate() {
        match (value, rule.missing_policy) {
            (Some(v), _) => {
                if !(v.is_finite() && *v >= 0.0) {
                    return Err(Error::Invariant(format!("indicator value {v} is not non-negative")));
                }
                included.push(index);
                present.push(*v);
            }
            (None, MissingPolicy::ExcludeAlternative) => adjustments.push(Adjustment::Excluded { index }),
            (None, MissingPolicy::EpsilonFloor(epsilon)) => {
                adjustments.push(Adjustment::MissingFloored { index, epsilon });
                included.push(index);
                present.push(epsilon);
            }
        }
    }
    if included.len() < 2 {
        return Err(Error::TooFewAlternatives(included.len()));
    }
    if present.iter().all(|&v| v == 0.0) {
        return Err(Error::AllValuesZero);
    }

    match rule.kind {
        RuleKind::DirectRatio => {
            let min_positive = present
                .iter()
                .copied()
                .filter(|&v| v > 0.0)
                .fold(f64::INFINITY, f64::min);
            let epsilon = min_positive * 1e-3;
            for (slot, v) in present.iter_mut().enumerate() {
                if *v == 0.0 {
                    *v = epsilon;
                    adjustments.push(Adjustment::ZeroFloored {
                        index: included[slot],
                        epsilon,
                    });
                }
            }
            let scores: Vec<f64> = match direction {
                Direction::HigherIsBetter => present,
                Direction::LowerIsBetter => present.iter().map(|v| 1.0 / v).collect(),
            };
            build(&scores, included, rule, adjustments, |a, b| a / b)
        }
        RuleKind::SaatyDifference => {
            let grades = bin_to_grades(&present, direction);
            build(&grades, included, rule, adjustments, saaty_pair)
        }
    }
}

/// Linear binning of values onto grades 1..9 (best value gets 9).
pub fn bin_to_grades(values: &[f64], direction: Direction) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    values
        .iter()
        .map(|&v| {
            if span <= 0.0 {
                return 1.0;
            }
            let position = match direction {
                Direction::HigherIsBetter => (v - min) / span,
                Direction::LowerIsBetter => (max - v) / span,
            };
            1.0 + (8.0 * position).round()
        })
        .collect()
}

/// Triangular numbers for the nine judgment grades.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyScale {
    grades: [Tfn; 9],
    meanings: [String; 9],
}

fn parse_number(text: &str) -> Option<f64> {
    match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            (den != 0.0).then(|| num / den)
        }
        None => text.trim().parse().ok(),
    }
}

impl FuzzyScale {
    /// The bundled scale.
    pub fn standard() -> Self {
        Self::parse(DEFAULT_SCALE_CSV).expect("bundled fuzzy scale is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| e.context(path.display().to_string()))
    }

    /// Parses `grade,l,m,u,meaning` rows. Grades `1..9` are required; rows
    /// with grade `1/g` are optional and must equal the reciprocal of grade `g`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut grades: [Option<Tfn>; 9] = [None; 9];
        let mut meanings: [String; 9] = Default::default();
        let mut reciprocals = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::InvalidScale(e.to_string()))?;
            let field = |i: usize| record.get(i).unwrap_or_default();
            let grade = field(0);
            let numbers: Option<Vec<f64>> = (1..4).map(|i| parse_number(field(i))).collect();
            let Some(&[l, m, u]) = numbers.as_deref() else {
                return Err(Error::InvalidScale(format!("bad row for grade '{grade}'")));
            };
            let tfn = Tfn::new(l, m, u)?;
            if let Some(inv) = grade.strip_prefix("1/") {
                let g: usize = inv
                    .parse()
                    .ok()
                    .filter(|g| (1..=9).contains(g))
                    .ok_or_else(|| Error::InvalidScale(format!("bad grade '{grade}'")))?;
                reciprocals.push((g, tfn));
            } else {
                let g: usize = grade
                    .parse()
                    .ok()
                    .filter(|g| (1..=9).contains(g))
                    .ok_or_else(|| Error::InvalidScale(format!("bad grade '{grade}'")))?;
                if grades[g - 1].replace(tfn).is_some() {
                    return Err(Error::InvalidScale(format!("grade {g} listed twice")));
                }
                meanings[g - 1] = field(4).to_string();
            }
        }
        let mut out = [Tfn::ONE; 9];
        for (g, slot) in grades.iter().enumerate() {
            out[g] = slot.ok_or_else(|| Error::InvalidScale(format!("grade {} missing", g + 1)))?;
        }
        if out[0] != Tfn::ONE {
            return Err(Error::InvalidScale("grade 1 must be (1, 1, 1)".into()));
        }
        for (g, tfn) in reciprocals {
            if tfn != out[g - 1].recip() {
                return Err(Error::InvalidScale(format!(
                    "row 1/{g} is not the reciprocal of grade {g}"
                )));
            }
        }
        Ok(Self { grades: out, meanings })
    }

    /// Triangular number for grade `1..=9`.
    pub fn grade(&self, g: usize) -> Tfn {
        self.grades[g - 1]
    }

    pub fn meaning(&self, g: usize) -> &str {
        &self.meanings[g - 1]
    }

    /// Maps a crisp judgment to the nearest grade (or the reciprocal of the
    /// nearest grade of its inverse when below one).
    pub fn lift(&self, value: f64) -> Option<Tfn> {
        const SLACK: f64 = 1e-9;
        if !(value.is_finite() && ((1.0 / 9.0) * (1.0 - SLACK)..=9.0 * (1.0 + SLACK)).contains(&value)) {
            return None;
        }
        let nearest = |x: f64| (x.round() as usize).clamp(1, 9);
        Some(if value >= 1.0 {
            self.grade(nearest(value))
        } else {
            self.grade(nearest(1.0 / value)).recip()
        })
    }
}

impl Default for FuzzyScale {
    fn default() -> Self {
        Self::standard()
    }
}

/// Lifts every judgment of a crisp matrix onto the fuzzy scale.
pub fn fuzzify_matrix(m: &ComparisonMatrix, scale: &FuzzyScale) -> Result<FuzzyComparisonMatrix> {
    FuzzyComparisonMatrix::from_upper(m.n(), |i, j| {
        let value = m.get(i, j);
        scale
            .lift(value)
            .ok_or(Error::EntryOutOfScale { row: i, col: j, value })
    })
}
