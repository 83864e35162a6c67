//! End-to-end evaluation: hierarchy and indicators in, report out.

use std::path::PathBuf;

use crate::ahp::{
    check_consistency, priority_geometric_mean, score_alternatives, ComparisonMatrix, PriorityVector,
    RECIPROCITY_TOL,
};
use crate::analysis::{compare_methods, kendall_tau, rank, sensitivity_sweep, Method, Ranking, SweepReport};
use crate::elicitation::{
    fuzzify_matrix, importance_to_matrix, indicators_to_matrix, Adjustment, ElicitationRule, ElicitedMatrix,
    FuzzyScale, RuleKind,
};
use crate::error::{Error, Result};
use crate::fuzzy::{fuzzy_score_alternatives, fuzzy_weights, FuzzyWeightVector};
use crate::hierarchy::{
    load_hierarchy, load_hierarchy_file, load_indicators, load_indicators_file, Cohort, Hierarchy, IndicatorTable,
};
use crate::report::{
    round_all, round_sig, round_tfn, AlternativeScore, CriteriaWeights, EvaluationReport, GciEntry, LocalWeights,
    LogEntry, MethodResult, MethodSelection, ReferenceCheck, REFERENCE_CRITERIA_GCI, SCHEMA_VERSION,
};

pub const BUNDLED_HIERARCHY: &str = include_str!("../data/hierarchy.toml");
pub const BUNDLED_INDICATORS_15_34: &str = include_str!("../data/findex2017_ages_15_34.csv");
pub const BUNDLED_INDICATORS_35_59: &str = include_str!("../data/findex2017_ages_35_59.csv");

const WEIGHT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: MethodSelection,
    pub cohort: Cohort,
    pub criteria_rule: ElicitationRule,
    pub indicator_rule: ElicitationRule,
    pub strict_consistency: bool,
    /// `None` selects the bundled hierarchy.
    pub hierarchy_path: Option<PathBuf>,
    /// `None` selects the bundled indicator table for the cohort.
    pub indicators_path: Option<PathBuf>,
    /// `None` selects the bundled fuzzy scale.
    pub scale_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(cohort: Cohort) -> Self {
        Self {
            method: MethodSelection::Both,
            cohort,
            criteria_rule: ElicitationRule::new(RuleKind::SaatyDifference),
            indicator_rule: ElicitationRule::new(RuleKind::DirectRatio),
            strict_consistency: false,
            hierarchy_path: None,
            indicators_path: None,
            scale_path: None,
        }
    }

    pub fn load_inputs(&self) -> Result<(Hierarchy, IndicatorTable, FuzzyScale)> {
        let hierarchy = match &self.hierarchy_path {
            Some(path) => load_hierarchy_file(path)?,
            None => load_hierarchy(BUNDLED_HIERARCHY)?,
        };
        let table = match &self.indicators_path {
            Some(path) => load_indicators_file(path, &hierarchy, self.cohort)?,
            None => {
                let text = match self.cohort {
                    Cohort::Ages15To34 => BUNDLED_INDICATORS_15_34,
                    Cohort::Ages35To59 => BUNDLED_INDICATORS_35_59,
                    Cohort::None => {
                        return Err(Error::MissingColumn(
                            "no bundled indicator table for cohort 'none'; pass an indicator file".into(),
                        ))
                    }
                };
                load_indicators(text.as_bytes(), &hierarchy, self.cohort)?
            }
        };
        let scale = match &self.scale_path {
            Some(path) => FuzzyScale::from_path(path)?,
            None => FuzzyScale::standard(),
        };
        Ok((hierarchy, table, scale))
    }
}

/// Matrices and local weights for one run, reusable across criteria-matrix
/// perturbations.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub hierarchy: Hierarchy,
    pub table: IndicatorTable,
    pub method: MethodSelection,
    pub criteria_rule: ElicitationRule,
    pub indicator_rule: ElicitationRule,
    pub strict_consistency: bool,
    pub criteria: ElicitedMatrix,
    pub local: Vec<ElicitedMatrix>,
    /// Per sub-criterion, one weight per alternative.
    pub local_crisp: Vec<PriorityVector>,
    pub local_fuzzy: Vec<FuzzyWeightVector>,
    local_fuzzy_full: Vec<Vec<f64>>,
    scale: FuzzyScale,
}

fn check_reciprocal(m: &ComparisonMatrix, label: &str) -> Result<()> {
    let err = m.reciprocity_error();
    if err > RECIPROCITY_TOL {
        return Err(Error::Invariant(format!("{label}: reciprocity error {err}")));
    }
    Ok(())
}

fn check_sum(w: &[f64], label: &str) -> Result<()> {
    let sum: f64 = w.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL || w.iter().any(|x| *x < 0.0) {
        return Err(Error::Invariant(format!("{label}: weights sum to {sum}")));
    }
    Ok(())
}

impl Evaluation {
    pub fn prepare(config: &RunConfig) -> Result<Self> {
        let (hierarchy, table, scale) = config.load_inputs()?;
        Self::new(hierarchy, table, scale, config)
    }

    pub fn new(hierarchy: Hierarchy, table: IndicatorTable, scale: FuzzyScale, config: &RunConfig) -> Result<Self> {
        let criteria = importance_to_matrix(&hierarchy.final_importances(), &config.criteria_rule)
            .map_err(|e| e.context("criteria matrix"))?;
        check_reciprocal(&criteria.matrix, "criteria")?;

        let n_alt = table.alternatives.len();
        let mut local = Vec::new();
        let mut local_crisp = Vec::new();
        let mut local_fuzzy = Vec::new();
        let mut local_fuzzy_full = Vec::new();
        for (k, sub) in hierarchy.sub_criteria().enumerate() {
            let elicited = indicators_to_matrix(&table.column(k), sub.direction, &config.indicator_rule)
                .map_err(|e| e.context(format!("sub-criterion {}", sub.id)))?;
            check_reciprocal(&elicited.matrix, &sub.id)?;
            let crisp = priority_geometric_mean(&elicited.matrix).scatter(&elicited.included, n_alt);
            check_sum(crisp.weights(), &sub.id)?;
            let fuzzy = fuzzy_weights(&fuzzify_matrix(&elicited.matrix, &scale)?)
                .map_err(|e| e.context(format!("sub-criterion {}", sub.id)))?;
            let full = fuzzy.scattered_normalized(&elicited.included, n_alt);
            check_sum(&full, &sub.id)?;
            local.push(elicited);
            local_crisp.push(crisp);
            local_fuzzy.push(fuzzy);
            local_fuzzy_full.push(full);
        }

        let evaluation = Self {
            hierarchy,
            table,
            method: config.method,
            criteria_rule: config.criteria_rule,
            indicator_rule: config.indicator_rule,
            strict_consistency: config.strict_consistency,
            criteria,
            local,
            local_crisp,
            local_fuzzy,
            local_fuzzy_full,
            scale,
        };
        if evaluation.strict_consistency {
            evaluation.enforce_consistency()?;
        }
        Ok(evaluation)
    }

    fn gci_entries(&self) -> Vec<GciEntry> {
        let mut out = Vec::with_capacity(self.local.len() + 1);
        let entry = |name: &str, m: &ComparisonMatrix| {
            let w = priority_geometric_mean(m);
            let verdict = check_consistency(w.source_gci().unwrap_or(0.0), m.n());
            GciEntry {
                matrix: name.to_string(),
                n: verdict.n,
                gci: round_sig(verdict.gci),
                threshold: verdict.threshold,
                consistent: verdict.consistent,
            }
        };
        out.push(entry("criteria", &self.criteria.matrix));
        for (sub, elicited) in self.hierarchy.sub_criteria().zip(&self.local) {
            out.push(entry(&sub.id, &elicited.matrix));
        }
        out
    }

    fn enforce_consistency(&self) -> Result<()> {
        for g in self.gci_entries() {
            if !g.consistent {
                return Err(Error::ConsistencyGateFailure {
                    matrix: g.matrix,
                    gci: g.gci,
                    threshold: g.threshold.unwrap_or(f64::INFINITY),
                    n: g.n,
                });
            }
        }
        Ok(())
    }

    /// Crisp criteria weights for a criteria matrix.
    pub fn crisp_criteria(&self, criteria: &ComparisonMatrix) -> PriorityVector {
        priority_geometric_mean(criteria)
    }

    pub fn fuzzy_criteria(&self, criteria: &ComparisonMatrix) -> Result<FuzzyWeightVector> {
        fuzzy_weights(&fuzzify_matrix(criteria, &self.scale)?)
    }

    /// Alternative scores under `method` using `criteria` as the criteria matrix.
    pub fn scores_with(&self, criteria: &ComparisonMatrix, method: Method) -> Result<Vec<f64>> {
        let scores = match method {
            Method::Ahp => score_alternatives(&self.crisp_criteria(criteria), &self.local_crisp)?,
            Method::Fahp => {
                let w = self.fuzzy_criteria(criteria)?;
                fuzzy_score_alternatives(&w.normalized, &self.local_fuzzy_full)?
            }
        };
        check_sum(&scores, &format!("{method} scores"))?;
        Ok(scores)
    }

    pub fn rank_with(&self, criteria: &ComparisonMatrix, method: Method) -> Result<Ranking> {
        let scores = self.scores_with(criteria, method)?;
        Ok(rank(&self.table.alternatives, &scores, method, self.table.cohort))
    }

    pub fn ranking(&self, method: Method) -> Result<Ranking> {
        self.rank_with(&self.criteria.matrix, method)
    }

    /// One-judgment sweep over the criteria matrix for every selected method.
    pub fn sweep(&self, factors: &[f64]) -> Result<Vec<SweepReport>> {
        self.method
            .methods()
            .into_iter()
            .map(|method| sensitivity_sweep(&self.criteria.matrix, factors, |m| self.rank_with(m, method)))
            .collect()
    }

    pub fn report(&self) -> Result<EvaluationReport> {
        let alternatives = &self.table.alternatives;
        let sub_ids = self.hierarchy.sub_criterion_ids();
        let consistency = self.gci_entries();
        let mut log = Vec::new();
        let mut warnings = Vec::new();

        for (name, elicited, labels) in std::iter::once(("criteria", &self.criteria, &sub_ids))
            .chain(sub_ids.iter().map(String::as_str).zip(&self.local).map(|(s, e)| (s, e, alternatives)))
        {
            for adj in &elicited.adjustments {
                let matrix = name.to_string();
                log.push(match *adj {
                    Adjustment::Clipped { row, col, raw, clipped } => LogEntry::Clipped {
                        matrix,
                        row: labels[row].clone(),
                        col: labels[col].clone(),
                        raw: round_sig(raw),
                        clipped: round_sig(clipped),
                    },
                    Adjustment::Excluded { index } => {
                        warnings.push(format!(
                            "{} has no value for {name}; excluded with local weight 0",
                            labels[index]
                        ));
                        LogEntry::Excluded {
                            matrix,
                            alternative: labels[index].clone(),
                        }
                    }
                    Adjustment::MissingFloored { index, epsilon } => LogEntry::MissingFloored {
                        matrix,
                        alternative: labels[index].clone(),
                        epsilon: round_sig(epsilon),
                    },
                    Adjustment::ZeroFloored { index, epsilon } => LogEntry::ZeroFloored {
                        matrix,
                        alternative: labels[index].clone(),
                        epsilon: round_sig(epsilon),
                    },
                });
            }
        }
        for g in consistency.iter().filter(|g| !g.consistent) {
            let threshold = g.threshold.unwrap_or(f64::INFINITY);
            warnings.push(format!(
                "matrix {} is inconsistent: GCI {} > {} (n = {})",
                g.matrix, g.gci, threshold, g.n
            ));
            log.push(LogEntry::ConsistencyWarning {
                matrix: g.matrix.clone(),
                gci: g.gci,
                threshold,
            });
        }

        let run_ahp = self.method.includes(Method::Ahp);
        let run_fahp = self.method.includes(Method::Fahp);
        let crisp_criteria = run_ahp.then(|| self.crisp_criteria(&self.criteria.matrix));
        let fuzzy_criteria = if run_fahp {
            Some(self.fuzzy_criteria(&self.criteria.matrix)?)
        } else {
            None
        };
        if let Some(w) = &crisp_criteria {
            check_sum(w.weights(), "criteria crisp")?;
        }
        if let Some(w) = &fuzzy_criteria {
            check_sum(&w.normalized, "criteria fuzzy")?;
        }

        let criteria_weights = CriteriaWeights {
            sub_criteria: sub_ids.clone(),
            crisp: crisp_criteria.as_ref().map(|w| round_all(w.weights())),
            fuzzy: fuzzy_criteria
                .as_ref()
                .map(|w| w.fuzzy.iter().copied().map(round_tfn).collect()),
            fuzzy_defuzzified: fuzzy_criteria.as_ref().map(|w| round_all(&w.defuzzified)),
            fuzzy_normalized: fuzzy_criteria.as_ref().map(|w| round_all(&w.normalized)),
        };

        let local_weights = sub_ids
            .iter()
            .enumerate()
            .map(|(k, id)| LocalWeights {
                sub_criterion: id.clone(),
                included: self.local[k].included.iter().map(|&i| alternatives[i].clone()).collect(),
                crisp: run_ahp.then(|| round_all(self.local_crisp[k].weights())),
                fuzzy_normalized: run_fahp.then(|| round_all(&self.local_fuzzy_full[k])),
            })
            .collect();

        let mut results = Vec::new();
        for method in self.method.methods() {
            let scores = round_all(&self.scores_with(&self.criteria.matrix, method)?);
            let ranking = rank(alternatives, &scores, method, self.table.cohort);
            for tie in &ranking.tie_breaks {
                log.push(LogEntry::TieBreak {
                    method,
                    first: tie.first.clone(),
                    second: tie.second.clone(),
                    score: tie.score,
                });
            }
            results.push(MethodResult {
                method,
                scores: alternatives
                    .iter()
                    .zip(&scores)
                    .map(|(a, &score)| AlternativeScore {
                        alternative: a.clone(),
                        score,
                    })
                    .collect(),
                ranking,
            });
        }

        let comparison = match results.as_slice() {
            [a, b] => {
                let mut c = compare_methods(&a.ranking, &b.ranking)?;
                c.tau = round_sig(c.tau);
                Some(c)
            }
            _ => None,
        };

        let mut reference_check = Vec::new();
        for result in &results {
            let Some(reference) = self.hierarchy.reference_for(result.method, self.table.cohort) else {
                continue;
            };
            if reference.order.len() != alternatives.len() {
                continue;
            }
            let expected_scores: Vec<f64> = (0..alternatives.len())
                .map(|i| {
                    let pos = reference.order.iter().position(|a| *a == alternatives[i]).unwrap_or(0);
                    (alternatives.len() - pos) as f64
                })
                .collect();
            let expected = rank(alternatives, &expected_scores, result.method, self.table.cohort);
            let obtained: Vec<String> = result.ranking.order().into_iter().map(String::from).collect();
            let k = obtained.len();
            let check = ReferenceCheck {
                method: result.method,
                cohort: self.table.cohort,
                expected: reference.order.clone(),
                tau: round_sig(kendall_tau(&expected, &result.ranking)?),
                bottom_two_match: k >= 2 && obtained[k - 2..] == reference.order[k - 2..],
                top_three_match: obtained.iter().take(3).eq(reference.order.iter().take(3)),
                exact_match: obtained == reference.order,
                obtained,
            };
            if !check.exact_match {
                warnings.push(format!(
                    "{} {} ranking deviates from the reference ordering (tau = {:.4}): expected {}, obtained {}",
                    check.method,
                    check.cohort,
                    check.tau,
                    check.expected.join(" > "),
                    check.obtained.join(" > ")
                ));
            }
            reference_check.push(check);
        }

        let mut notes = vec![format!(
            "criteria matrix built with {} from final importances; alternative matrices built with {} from indicator values",
            self.criteria_rule.kind.as_str(),
            self.indicator_rule.kind.as_str()
        )];
        if run_fahp {
            notes.push(
                "fuzzy matrices lift each crisp judgment to the nearest scale grade; fuzzy multiplication, \
                 reciprocal and root are componentwise approximations"
                    .into(),
            );
        }

        Ok(EvaluationReport {
            schema_version: SCHEMA_VERSION.to_string(),
            goal: self.hierarchy.goal_name.clone(),
            method: self.method,
            cohort: self.table.cohort,
            criteria_rule: self.criteria_rule,
            indicator_rule: self.indicator_rule,
            strict_consistency: self.strict_consistency,
            alternatives: alternatives.clone(),
            consistency,
            reference_criteria_gci: REFERENCE_CRITERIA_GCI,
            criteria_weights,
            local_weights,
            results,
            comparison,
            reference_check,
            log,
            warnings,
            notes,
        })
    }
}

/// Loads the inputs named by `config`, runs the selected methods and builds the report.
pub fn run_evaluation(config: &RunConfig) -> Result<EvaluationReport> {
    Evaluation::prepare(config)?.report()
}
