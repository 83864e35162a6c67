//! Goal / criteria / sub-criteria / alternatives hierarchy and the indicator
//! table that feeds the alternative-level comparisons.
//!
//! The hierarchy is read from a TOML document:
//!
//! ```toml
//! goal = "Financial responsibility"
//! alternatives = ["A", "B"]
//!
//! [[criteria]]
//! id = "Digital"
//! importance = 2
//!
//!   [[criteria.sub_criteria]]
//!   id = "i1"
//!   description = "Access to a mobile phone"
//!   group_importance = 1
//!   final_importance = 2
//!   direction = "higher_is_better"
//! ```
//!
//! Indicator tables are CSV files whose first column is `alternative` and whose
//! remaining columns are sub-criterion ids. Lines starting with `#` are comments.
//! Empty cells, `NA` and `..` mark a missing value.

use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::Method;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    HigherIsBetter,
    LowerIsBetter,
}

/// Unit of an indicator column. Percent values are bounded to [0, 100].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    #[default]
    Percent,
    #[serde(rename = "per_100k_adults")]
    Per100kAdults,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cohort {
    #[serde(rename = "ages_15_34")]
    Ages15To34,
    #[serde(rename = "ages_35_59")]
    Ages35To59,
    None,
}

impl Cohort {
    pub fn as_str(self) -> &'static str {
        match self {
            Cohort::Ages15To34 => "ages_15_34",
            Cohort::Ages35To59 => "ages_35_59",
            Cohort::None => "none",
        }
    }
}

impl fmt::Display for Cohort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubCriterion {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub group_importance: u32,
    pub final_importance: u32,
    #[serde(default)]
    pub direction: Direction,
    #[serde(default)]
    pub unit: Unit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: String,
    pub importance: u32,
    pub sub_criteria: Vec<SubCriterion>,
}

/// A published ordering (best first) to compare a run against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRanking {
    pub method: Method,
    pub cohort: Cohort,
    pub order: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hierarchy {
    #[serde(rename = "goal")]
    pub goal_name: String,
    pub alternatives: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context_notes: Option<String>,
    pub criteria: Vec<Criterion>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reference_rankings: Vec<ReferenceRanking>,
}

impl Hierarchy {
    /// Checks every structural invariant, including the importance product rule.
    pub fn validate(&self) -> Result<()> {
        if self.criteria.is_empty() {
            return Err(Error::EmptyLevel("no criteria".into()));
        }
        if self.alternatives.len() < 2 {
            return Err(Error::EmptyLevel(format!(
                "need at least 2 alternatives, got {}",
                self.alternatives.len()
            )));
        }
        let mut seen = HashSet::new();
        for alt in &self.alternatives {
            if !seen.insert(alt.as_str()) {
                return Err(Error::DuplicateId(alt.clone()));
            }
        }

        let mut criterion_ids = HashSet::new();
        let mut sub_ids = HashSet::new();
        for criterion in &self.criteria {
            if !criterion_ids.insert(criterion.id.as_str()) {
                return Err(Error::DuplicateId(criterion.id.clone()));
            }
            if criterion.importance == 0 {
                return Err(Error::NonPositiveImportance(criterion.id.clone()));
            }
            if criterion.sub_criteria.is_empty() {
                return Err(Error::EmptyLevel(format!(
                    "criterion '{}' has no sub-criteria",
                    criterion.id
                )));
            }
            for sub in &criterion.sub_criteria {
                if !sub_ids.insert(sub.id.as_str()) {
                    return Err(Error::DuplicateId(sub.id.clone()));
                }
                if sub.group_importance == 0 || sub.final_importance == 0 {
                    return Err(Error::NonPositiveImportance(sub.id.clone()));
                }
                if criterion.importance * sub.group_importance != sub.final_importance {
                    return Err(Error::ImportanceProductMismatch {
                        id: sub.id.clone(),
                        stated: sub.final_importance,
                        criterion: criterion.importance,
                        group: sub.group_importance,
                    });
                }
            }
        }

        for reference in &self.reference_rankings {
            let mut seen = HashSet::new();
            for alt in &reference.order {
                if !self.alternatives.contains(alt) {
                    return Err(Error::UnknownAlternative(alt.clone()));
                }
                if !seen.insert(alt.as_str()) {
                    return Err(Error::DuplicateId(alt.clone()));
                }
            }
        }
        Ok(())
    }

    /// Sub-criteria flattened in declaration order.
    pub fn sub_criteria(&self) -> impl Iterator<Item = &SubCriterion> {
        self.criteria.iter().flat_map(|c| c.sub_criteria.iter())
    }

    pub fn sub_criterion_ids(&self) -> Vec<String> {
        self.sub_criteria().map(|s| s.id.clone()).collect()
    }

    pub fn final_importances(&self) -> Vec<u32> {
        self.sub_criteria().map(|s| s.final_importance).collect()
    }

    pub fn reference_for(&self, method: Method, cohort: Cohort) -> Option<&ReferenceRanking> {
        self.reference_rankings
            .iter()
            .find(|r| r.method == method && r.cohort == cohort)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("hierarchy serializes to TOML")
    }
}

/// Parses and validates a hierarchy document.
pub fn load_hierarchy(text: &str) -> Result<Hierarchy> {
    let hierarchy: Hierarchy = toml::from_str(text).map_err(|e| Error::Parse {
        path: "<hierarchy>".into(),
        message: e.to_string(),
    })?;
    hierarchy.validate()?;
    Ok(hierarchy)
}

pub fn load_hierarchy_file(path: &Path) -> Result<Hierarchy> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_hierarchy(&text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other.context(path.display().to_string()),
    })
}

/// Indicator values for every (alternative, sub-criterion) pair, in hierarchy order.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorTable {
    pub cohort: Cohort,
    pub alternatives: Vec<String>,
    pub sub_criteria: Vec<String>,
    pub units: Vec<Unit>,
    /// `values[a][k]`; `None` marks a missing cell.
    values: Vec<Vec<Option<f64>>>,
}

impl IndicatorTable {
    pub fn value(&self, alternative: usize, sub_criterion: usize) -> Option<f64> {
        self.values[alternative][sub_criterion]
    }

    /// All alternatives' values for one sub-criterion.
    pub fn column(&self, sub_criterion: usize) -> Vec<Option<f64>> {
        self.values.iter().map(|row| row[sub_criterion]).collect()
    }

    /// (alternative, sub-criterion) pairs with no value.
    pub fn missing_cells(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (a, row) in self.values.iter().enumerate() {
            for (k, cell) in row.iter().enumerate() {
                if cell.is_none() {
                    out.push((self.alternatives[a].clone(), self.sub_criteria[k].clone()));
                }
            }
        }
        out
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "na" | "N/A" | "..")
}

/// Reads an indicator CSV and checks it against the hierarchy.
pub fn load_indicators<R: Read>(
    reader: R,
    hierarchy: &Hierarchy,
    cohort: Cohort,
) -> Result<IndicatorTable> {
    let mut csv = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader);

    let parse_err = |e: csv::Error| Error::Parse {
        path: "<indicators>".into(),
        message: e.to_string(),
    };

    let headers = csv.headers().map_err(parse_err)?.clone();
    let mut header_iter = headers.iter();
    match header_iter.next() {
        Some("alternative") => {}
        Some(other) => return Err(Error::UnknownColumn(other.to_string())),
        None => return Err(Error::MissingColumn("alternative".into())),
    }

    let subs: Vec<&SubCriterion> = hierarchy.sub_criteria().collect();
    // column index in file -> sub-criterion index
    let mut column_map = Vec::new();
    let mut seen = HashSet::new();
    for name in header_iter {
        let Some(k) = subs.iter().position(|s| s.id == name) else {
            return Err(Error::UnknownColumn(name.to_string()));
        };
        if !seen.insert(k) {
            return Err(Error::DuplicateId(name.to_string()));
        }
        column_map.push(k);
    }
    if let Some(missing) = subs.iter().enumerate().find(|(k, _)| !seen.contains(k)) {
        return Err(Error::MissingColumn(missing.1.id.clone()));
    }

    let n_alt = hierarchy.alternatives.len();
    let mut rows: Vec<Option<Vec<Option<f64>>>> = vec![None; n_alt];
    for record in csv.records() {
        let record = record.map_err(parse_err)?;
        let alt_name = record.get(0).unwrap_or_default();
        let Some(a) = hierarchy.alternatives.iter().position(|x| x == alt_name) else {
            return Err(Error::UnknownAlternative(alt_name.to_string()));
        };
        if rows[a].is_some() {
            return Err(Error::DuplicateId(alt_name.to_string()));
        }
        let mut row = vec![None; subs.len()];
        for (cell, &k) in record.iter().skip(1).zip(&column_map) {
            if is_missing(cell) {
                continue;
            }
            let sub = subs[k];
            let value: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::BadNumber {
                    alternative: alt_name.to_string(),
                    sub_criterion: sub.id.clone(),
                    text: cell.to_string(),
                })?;
            if value < 0.0 {
                return Err(Error::NegativeValue {
                    alternative: alt_name.to_string(),
                    sub_criterion: sub.id.clone(),
                    value,
                });
            }
            if sub.unit == Unit::Percent && value > 100.0 {
                return Err(Error::PercentOutOfRange {
                    alternative: alt_name.to_string(),
                    sub_criterion: sub.id.clone(),
                    value,
                });
            }
            row[k] = Some(value);
        }
        rows[a] = Some(row);
    }

    let values = rows
        .into_iter()
        .enumerate()
        .map(|(a, row)| row.ok_or_else(|| Error::MissingAlternative(hierarchy.alternatives[a].clone())))
        .collect::<Result<Vec<_>>>()?;

    Ok(IndicatorTable {
        cohort,
        alternatives: hierarchy.alternatives.clone(),
        sub_criteria: subs.iter().map(|s| s.id.clone()).collect(),
        units: subs.iter().map(|s| s.unit).collect(),
        values,
    })
}

pub fn load_indicators_file(path: &Path, hierarchy: &Hierarchy, cohort: Cohort) -> Result<IndicatorTable> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_indicators(file, hierarchy, cohort).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other.context(path.display().to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BUNDLED: &str = include_str!("../data/hierarchy.toml");

    const MINIMAL: &str = r#"
goal = "g"
alternatives = ["A", "B"]

[[criteria]]
id = "c"
importance = 1

  [[criteria.sub_criteria]]
  id = "s"
  group_importance = 1
  final_importance = 1
"#;

    #[test]
    fn bundled_hierarchy_matches_table() {
        let h = load_hierarchy(BUNDLED).unwrap();
        assert_eq!(h.criteria.len(), 2);
        assert_eq!(h.sub_criteria().count(), 11);
        assert_eq!(h.final_importances(), vec![2, 2, 4, 4, 4, 1, 1, 2, 3, 4, 5]);
        assert_eq!(h.alternatives.len(), 5);
        assert_eq!(h.reference_rankings.len(), 4);
        assert!(h.sub_criteria().all(|s| s.direction == Direction::HigherIsBetter));
    }

    #[test]
    fn minimal_hierarchy_loads() {
        let h = load_hierarchy(MINIMAL).unwrap();
        assert_eq!(h.final_importances(), vec![1]);
        assert_eq!(h.sub_criteria().next().unwrap().direction, Direction::HigherIsBetter);
    }

    #[test]
    fn product_mismatch_is_rejected() {
        let bad = BUNDLED.replacen(
            "id = \"i3\"\n  description = \"Made or received digital payments in the past year\"\n  group_importance = 2\n  final_importance = 4",
            "id = \"i3\"\n  description = \"Made or received digital payments in the past year\"\n  group_importance = 2\n  final_importance = 5",
            1,
        );
        assert_ne!(bad, BUNDLED);
        match load_hierarchy(&bad) {
            Err(Error::ImportanceProductMismatch { id, stated, criterion, group }) => {
                assert_eq!((id.as_str(), stated, criterion, group), ("i3", 5, 2, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_and_empty_levels() {
        let dup = MINIMAL.replace(r#"["A", "B"]"#, r#"["A", "A"]"#);
        assert!(matches!(load_hierarchy(&dup), Err(Error::DuplicateId(_))));

        let one = MINIMAL.replace(r#"["A", "B"]"#, r#"["A"]"#);
        assert!(matches!(load_hierarchy(&one), Err(Error::EmptyLevel(_))));

        let no_subs = "goal = \"g\"\nalternatives = [\"A\", \"B\"]\n[[criteria]]\nid = \"c\"\nimportance = 1\nsub_criteria = []\n";
        assert!(matches!(load_hierarchy(no_subs), Err(Error::EmptyLevel(_))));

        let zero = MINIMAL.replace("importance = 1\n", "importance = 0\n");
        assert!(matches!(load_hierarchy(&zero), Err(Error::NonPositiveImportance(_))));
    }

    #[test]
    fn serialize_round_trip() {
        let h = load_hierarchy(BUNDLED).unwrap();
        let again = load_hierarchy(&h.to_toml()).unwrap();
        assert_eq!(h, again);
    }

    fn bundled() -> Hierarchy {
        load_hierarchy(BUNDLED).unwrap()
    }

    const HEADER: &str = "alternative,i1,i2,i3,i4,i5,i6,i7,i8,i9,i10,i11\n";

    fn rows(extra: &str) -> String {
        let mut s = String::from(HEADER);
        for alt in ["Bulgaria", "Croatia", "Czech Republic", "Poland", "Romania"] {
            s.push_str(&format!("{alt},90,80,60,30,20,95.4,56.2,70,25,10,15\n"));
        }
        s.replace("Romania,90", &format!("Romania,{extra}"))
    }

    #[test]
    fn indicators_load_bundled_fixture() {
        let h = bundled();
        let t = load_indicators(
            include_str!("../data/findex2017_ages_15_34.csv").as_bytes(),
            &h,
            Cohort::Ages15To34,
        )
        .unwrap();
        assert_eq!(t.alternatives.len(), 5);
        assert_eq!(t.sub_criteria.len(), 11);
        assert!(t.missing_cells().is_empty());
        assert_eq!(t.cohort, Cohort::Ages15To34);
        assert_eq!(t.units[5], Unit::Per100kAdults);
    }

    #[test]
    fn indicator_errors() {
        let h = bundled();
        let neg = rows("-3");
        assert!(matches!(
            load_indicators(neg.as_bytes(), &h, Cohort::None),
            Err(Error::NegativeValue { .. })
        ));

        let pct = rows("101");
        assert!(matches!(
            load_indicators(pct.as_bytes(), &h, Cohort::None),
            Err(Error::PercentOutOfRange { .. })
        ));

        // drop column i7 entirely
        let no_i7: String = rows("90")
            .lines()
            .map(|l| {
                let mut cells: Vec<&str> = l.split(',').collect();
                cells.remove(7);
                cells.join(",") + "\n"
            })
            .collect();
        match load_indicators(no_i7.as_bytes(), &h, Cohort::None) {
            Err(Error::MissingColumn(c)) => assert_eq!(c, "i7"),
            other => panic!("unexpected {other:?}"),
        }

        let extra: String = rows("90")
            .lines()
            .enumerate()
            .map(|(i, l)| format!("{l},{}\n", if i == 0 { "i12" } else { "1" }))
            .collect();
        assert!(matches!(
            load_indicators(extra.as_bytes(), &h, Cohort::None),
            Err(Error::UnknownColumn(c)) if c == "i12"
        ));

        let unknown = rows("90").replace("Romania", "Hungary");
        assert!(matches!(
            load_indicators(unknown.as_bytes(), &h, Cohort::None),
            Err(Error::UnknownAlternative(a)) if a == "Hungary"
        ));

        let short: String = rows("90").lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(matches!(
            load_indicators(short.as_bytes(), &h, Cohort::None),
            Err(Error::MissingAlternative(a)) if a == "Romania"
        ));
    }

    #[test]
    fn missing_cells_are_flagged_not_zeroed() {
        let h = bundled();
        let text = rows("NA");
        let t = load_indicators(text.as_bytes(), &h, Cohort::None).unwrap();
        assert_eq!(t.value(4, 0), None);
        assert_eq!(t.missing_cells(), vec![("Romania".to_string(), "i1".to_string())]);
    }
}
