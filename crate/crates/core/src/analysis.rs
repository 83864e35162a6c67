//! Rankings, rank agreement between methods, and one-judgment sensitivity sweeps.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ahp::{check_consistency, gci, geometric_mean_weights, ComparisonMatrix};
use crate::error::{Error, Result};
use crate::hierarchy::Cohort;

/// Scores closer than this are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ahp,
    Fahp,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ahp => "ahp",
            Method::Fahp => "fahp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankEntry {
    pub alternative: String,
    pub score: f64,
    pub rank: usize,
    pub tied: bool,
}

/// Two alternatives with equal scores, listed in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieBreak {
    pub first: String,
    pub second: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ranking {
    pub method: Method,
    pub cohort: Cohort,
    pub entries: Vec<RankEntry>,
    #[serde(default)]
    pub tie_breaks: Vec<TieBreak>,
}

impl Ranking {
    /// Alternatives best first.
    pub fn order(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.alternative.as_str()).collect()
    }

    pub fn rank_of(&self, alternative: &str) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.alternative == alternative)
            .map(|e| e.rank)
    }

    fn rank_map(&self) -> HashMap<&str, usize> {
        self.entries.iter().map(|e| (e.alternative.as_str(), e.rank)).collect()
    }
}

/// Orders alternatives by descending score. Tied scores share the better
/// rank and are listed by id.
pub fn rank(alternatives: &[String], scores: &[f64], method: Method, cohort: Cohort) -> Ranking {
    assert_eq!(alternatives.len(), scores.len(), "one score per alternative");
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then_with(|| alternatives[a].cmp(&alternatives[b]))
    });

    // group runs of near-equal scores, then list each group by id
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for idx in order {
        match groups.last_mut() {
            Some(group) if (scores[group[0]] - scores[idx]).abs() <= TIE_TOLERANCE => group.push(idx),
            _ => groups.push(vec![idx]),
        }
    }

    let mut entries = Vec::with_capacity(scores.len());
    let mut tie_breaks = Vec::new();
    for mut group in groups {
        group.sort_by(|&a, &b| alternatives[a].cmp(&alternatives[b]));
        let rank = entries.len() + 1;
        let tied = group.len() > 1;
        for pair in group.windows(2) {
            tie_breaks.push(TieBreak {
                first: alternatives[pair[0]].clone(),
                second: alternatives[pair[1]].clone(),
                score: scores[pair[0]],
            });
        }
        for idx in group {
            entries.push(RankEntry {
                alternative: alternatives[idx].clone(),
                score: scores[idx],
                rank,
                tied,
            });
        }
    }
    Ranking {
        method,
        cohort,
        entries,
        tie_breaks,
    }
}

/// Kendall's tau-a over all alternative pairs; tied pairs count as neither
/// concordant nor discordant. Returns 1 for fewer than two alternatives.
pub fn kendall_tau(r1: &Ranking, r2: &Ranking) -> Result<f64> {
    let a = r1.rank_map();
    let b = r2.rank_map();
    if a.len() != b.len() || a.keys().any(|k| !b.contains_key(k)) {
        return Err(Error::AlternativeSetMismatch);
    }
    let ids: Vec<&str> = r1.entries.iter().map(|e| e.alternative.as_str()).collect();
    let k = ids.len();
    if k < 2 {
        return Ok(1.0);
    }
    let (mut concordant, mut discordant) = (0i64, 0i64);
    for i in 0..k {
        for j in (i + 1)..k {
            let da = a[ids[i]].cmp(&a[ids[j]]);
            let db = b[ids[i]].cmp(&b[ids[j]]);
            match (da, db) {
                (Ordering::Equal, _) | (_, Ordering::Equal) => {}
                (x, y) if x == y => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let pairs = (k * (k - 1) / 2) as f64;
    Ok((concordant - discordant) as f64 / pairs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Displacement {
    pub alternative: String,
    pub rank_a: usize,
    pub rank_b: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodComparison {
    pub method_a: Method,
    pub method_b: Method,
    pub tau: f64,
    pub displaced: Vec<Displacement>,
    pub max_displacement: usize,
}

pub fn compare_methods(a: &Ranking, b: &Ranking) -> Result<MethodComparison> {
    let tau = kendall_tau(a, b)?;
    let other = b.rank_map();
    let displaced: Vec<Displacement> = a
        .entries
        .iter()
        .filter_map(|e| {
            let rank_b = other[e.alternative.as_str()];
            (rank_b != e.rank).then(|| Displacement {
                alternative: e.alternative.clone(),
                rank_a: e.rank,
                rank_b,
            })
        })
        .collect();
    let max_displacement = displaced
        .iter()
        .map(|d| d.rank_a.abs_diff(d.rank_b))
        .max()
        .unwrap_or(0);
    Ok(MethodComparison {
        method_a: a.method,
        method_b: b.method,
        tau,
        displaced,
        max_displacement,
    })
}

/// Multiplies `a_ij` by `factor` (clipped to the nine-point range) and resets
/// `a_ji` to its reciprocal.
pub fn perturb_one_judgment(m: &ComparisonMatrix, i: usize, j: usize, factor: f64) -> Result<ComparisonMatrix> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(Error::NonPositiveFactor(factor));
    }
    if i == j {
        return Err(Error::DiagonalPerturbation(i));
    }
    if i >= m.n() || j >= m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            got: i.max(j) + 1,
        });
    }
    let mut out = m.clone();
    out.set_pair(i, j, (m.get(i, j) * factor).clamp(1.0 / 9.0, 9.0));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub row: usize,
    pub col: usize,
    pub factor: f64,
    pub gci: f64,
    pub consistent: bool,
    pub order: Vec<String>,
    pub tau: f64,
    /// Pairs `(x, y)` with x above y at baseline and below y after perturbation.
    pub flips: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub method: Method,
    pub baseline: Vec<String>,
    pub factors: Vec<f64>,
    pub entries: Vec<SweepEntry>,
    pub perturbations_with_flips: usize,
    /// Alternatives whose rank never changed across the sweep.
    pub stable_positions: Vec<String>,
}

/// Perturbs every upper-triangle judgment of `base` by every factor and re-runs
/// `pipeline` on the result. Entries are ordered by (row, col, factor index).
pub fn sensitivity_sweep<F>(base: &ComparisonMatrix, factors: &[f64], pipeline: F) -> Result<SweepReport>
where
    F: Fn(&ComparisonMatrix) -> Result<Ranking>,
{
    if let Some(&bad) = factors.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
        return Err(Error::NonPositiveFactor(bad));
    }
    let baseline = pipeline(base)?;
    let base_ranks = baseline.rank_map();
    let mut stable: Vec<bool> = vec![true; baseline.entries.len()];
    let mut entries = Vec::new();
    for i in 0..base.n() {
        for j in (i + 1)..base.n() {
            for &factor in factors {
                let perturbed = perturb_one_judgment(base, i, j, factor)?;
                let w = geometric_mean_weights(&perturbed);
                let g = gci(&perturbed, &w);
                let ranking = pipeline(&perturbed)?;
                let new_ranks = ranking.rank_map();
                let mut flips = Vec::new();
                for (x, ex) in baseline.entries.iter().enumerate() {
                    if new_ranks[ex.alternative.as_str()] != ex.rank {
                        stable[x] = false;
                    }
                    for ey in &baseline.entries[x + 1..] {
                        let (bx, by) = (base_ranks[ex.alternative.as_str()], base_ranks[ey.alternative.as_str()]);
                        let (nx, ny) = (new_ranks[ex.alternative.as_str()], new_ranks[ey.alternative.as_str()]);
                        if bx < by && nx > ny {
                            flips.push((ex.alternative.clone(), ey.alternative.clone()));
                        }
                    }
                }
                entries.push(SweepEntry {
                    row: i,
                    col: j,
                    factor,
                    gci: g,
                    consistent: check_consistency(g, perturbed.n()).consistent,
                    order: ranking.order().into_iter().map(String::from).collect(),
                    tau: kendall_tau(&baseline, &ranking)?,
                    flips,
                });
            }
        }
    }
    Ok(SweepReport {
        method: baseline.method,
        baseline: baseline.order().into_iter().map(String::from).collect(),
        factors: factors.to_vec(),
        perturbations_with_flips: entries.iter().filter(|e| !e.flips.is_empty()).count(),
        stable_positions: baseline
            .entries
            .iter()
            .zip(&stable)
            .filter(|(_, s)| **s)
            .map(|(e, _)| e.alternative.clone())
            .collect(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ahp::priority_geometric_mean;

    fn ids(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn ranking_from_order(order: &[&str]) -> Ranking {
        let k = order.len();
        let scores: Vec<f64> = (0..k).map(|i| (k - i) as f64).collect();
        rank(&ids(order), &scores, Method::Ahp, Cohort::None)
    }

    #[test]
    fn simple_rank() {
        let r = rank(&ids(&["A", "B", "C"]), &[0.5, 0.3, 0.2], Method::Ahp, Cohort::None);
        assert_eq!(r.order(), vec!["A", "B", "C"]);
        assert_eq!(r.entries.iter().map(|e| e.rank).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(r.tie_breaks.is_empty());
    }

    #[test]
    fn ties_share_rank_and_sort_by_id() {
        let r = rank(&ids(&["B", "A"]), &[0.5, 0.5], Method::Ahp, Cohort::None);
        assert_eq!(r.order(), vec!["A", "B"]);
        assert!(r.entries.iter().all(|e| e.rank == 1 && e.tied));
        assert_eq!(r.tie_breaks.len(), 1);

        let r = rank(&ids(&["C", "B", "A"]), &[0.2, 0.4, 0.4], Method::Ahp, Cohort::None);
        assert_eq!(r.order(), vec!["A", "B", "C"]);
        assert_eq!(r.entries[2].rank, 3);
    }

    #[test]
    fn tau_examples() {
        let base = ranking_from_order(&["a", "b", "c", "d", "e"]);
        assert_eq!(kendall_tau(&base, &base).unwrap(), 1.0);
        let rev = ranking_from_order(&["e", "d", "c", "b", "a"]);
        assert_eq!(kendall_tau(&base, &rev).unwrap(), -1.0);
        // 9 concordant, 1 discordant out of 10 pairs
        let swap = ranking_from_order(&["a", "b", "d", "c", "e"]);
        assert!((kendall_tau(&base, &swap).unwrap() - 0.8).abs() < 1e-15);

        let other = ranking_from_order(&["a", "b", "c", "d", "x"]);
        assert!(matches!(kendall_tau(&base, &other), Err(Error::AlternativeSetMismatch)));
    }

    #[test]
    fn compare_swapped_top() {
        let ahp = ranking_from_order(&["Croatia", "Czech Republic", "Poland", "Bulgaria", "Romania"]);
        let fahp = ranking_from_order(&["Czech Republic", "Croatia", "Poland", "Bulgaria", "Romania"]);
        let c = compare_methods(&ahp, &fahp).unwrap();
        assert!((c.tau - 0.8).abs() < 1e-15);
        assert_eq!(c.displaced.len(), 2);
        assert_eq!(c.max_displacement, 1);

        let same = compare_methods(&ahp, &ahp).unwrap();
        assert_eq!(same.tau, 1.0);
        assert!(same.displaced.is_empty());
    }

    #[test]
    fn perturbation() {
        let m = ComparisonMatrix::from_weights(&[0.5, 0.3, 0.2]).unwrap();
        assert_eq!(perturb_one_judgment(&m, 0, 1, 1.0).unwrap(), m);
        let p = perturb_one_judgment(&m, 0, 1, 9.0).unwrap();
        assert!(p.reciprocity_error() < 1e-12);
        assert!(priority_geometric_mean(&p).source_gci().unwrap() > 0.0);
        assert!(priority_geometric_mean(&m).source_gci().unwrap() < 1e-12);
        assert_eq!(perturb_one_judgment(&m, 0, 1, 100.0).unwrap().get(0, 1), 9.0);
        assert!(matches!(perturb_one_judgment(&m, 1, 1, 2.0), Err(Error::DiagonalPerturbation(1))));
        assert!(matches!(perturb_one_judgment(&m, 0, 1, 0.0), Err(Error::NonPositiveFactor(_))));
        assert!(matches!(perturb_one_judgment(&m, 0, 1, -1.0), Err(Error::NonPositiveFactor(_))));
    }

    #[test]
    fn identity_sweep_has_no_flips() {
        let m = ComparisonMatrix::from_weights(&[0.5, 0.3, 0.2]).unwrap();
        let names = ids(&["x", "y", "z"]);
        let report = sensitivity_sweep(&m, &[1.0], |mat| {
            let w = priority_geometric_mean(mat);
            Ok(rank(&names, w.weights(), Method::Ahp, Cohort::None))
        })
        .unwrap();
        assert_eq!(report.entries.len(), 3);
        assert_eq!(report.perturbations_with_flips, 0);
        assert_eq!(report.stable_positions.len(), 3);
        assert!(report.entries.iter().all(|e| e.tau == 1.0));
    }

    #[test]
    fn strong_sweep_flips() {
        let m = ComparisonMatrix::from_weights(&[0.5, 0.3, 0.2]).unwrap();
        let names = ids(&["x", "y", "z"]);
        let report = sensitivity_sweep(&m, &[1.0 / 9.0], |mat| {
            let w = priority_geometric_mean(mat);
            Ok(rank(&names, w.weights(), Method::Ahp, Cohort::None))
        })
        .unwrap();
        let first = &report.entries[0];
        assert_eq!((first.row, first.col), (0, 1));
        assert_eq!(first.flips, vec![("x".to_string(), "y".to_string())]);
    }
}
