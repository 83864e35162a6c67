//! Crisp AHP: reciprocal comparison matrices, geometric-mean priorities,
//! the geometric consistency index and weighted scoring.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `a_ij * a_ji = 1` when validating externally supplied matrices.
pub const RECIPROCITY_TOL: f64 = 1e-9;

/// Positive reciprocal `n x n` judgment matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl ComparisonMatrix {
    /// Validates a raw square grid.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyLevel("matrix has no rows".into()));
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare {
                    row,
                    len: r.len(),
                    n,
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let value = rows[i][j];
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::NonPositiveEntry { row: i, col: j, value });
                }
            }
        }
        for i in 0..n {
            if rows[i][i] != 1.0 {
                return Err(Error::DiagonalNotOne {
                    index: i,
                    value: rows[i][i],
                });
            }
            for j in (i + 1)..n {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a * b - 1.0).abs() > RECIPROCITY_TOL {
                    return Err(Error::ReciprocityViolation { row: i, col: j, a, b });
                }
            }
        }
        Ok(Self {
            n,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    /// Builds a matrix from its strict upper triangle; the lower triangle is
    /// set to exact reciprocals.
    pub fn from_upper(n: usize, mut upper: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLevel("matrix has no rows".into()));
        }
        let mut entries = vec![1.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let value = upper(i, j);
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::NonPositiveEntry { row: i, col: j, value });
                }
                entries[i * n + j] = value;
                entries[j * n + i] = 1.0 / value;
            }
        }
        Ok(Self { n, entries })
    }

    /// `a_ij = w_i / w_j`, a perfectly consistent matrix.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        Self::from_upper(weights.len(), |i, j| weights[i] / weights[j])
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            entries: vec![1.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Sets `a_ij` and `a_ji = 1 / a_ij`.
    pub(crate) fn set_pair(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i != j && value > 0.0);
        self.entries[i * self.n + j] = value;
        self.entries[j * self.n + i] = 1.0 / value;
    }

    /// Largest `|a_ij * a_ji - 1|` over all pairs.
    pub fn reciprocity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            worst = worst.max((self.get(i, i) - 1.0).abs());
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) * self.get(j, i) - 1.0).abs());
            }
        }
        worst
    }

    /// Row/column permutation: entry `(p, q)` of the result is `a_{perm[p], perm[q]}`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for p in 0..n {
            for q in 0..n {
                entries[p * n + q] = self.get(perm[p], perm[q]);
            }
        }
        Self { n, entries }
    }

    /// Entrywise reciprocal of the transpose; equal to the matrix itself for
    /// an exactly reciprocal input up to rounding.
    pub fn reciprocal_transpose(&self) -> Self {
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = 1.0 / self.get(j, i);
            }
        }
        Self { n, entries }
    }
}

/// Thresholds on the GCI by matrix size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyVerdict {
    pub gci: f64,
    pub n: usize,
    /// `None` when every matrix of this size is acceptable (n <= 2).
    pub threshold: Option<f64>,
    pub consistent: bool,
}

pub fn gci_threshold(n: usize) -> Option<f64> {
    match n {
        0..=2 => None,
        3 => Some(0.31),
        4 => Some(0.35),
        _ => Some(0.37),
    }
}

pub fn check_consistency(gci: f64, n: usize) -> ConsistencyVerdict {
    let threshold = gci_threshold(n);
    ConsistencyVerdict {
        gci,
        n,
        threshold,
        consistent: threshold.is_none_or(|t| gci <= t),
    }
}

/// Normalized weights with the consistency of the matrix they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorityVector {
    weights: Vec<f64>,
    source_gci: Option<f64>,
    consistent: bool,
}

impl PriorityVector {
    /// Wraps weights that already sum to one; no source matrix.
    pub fn from_normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Invariant(format!(
                "weights {weights:?} are not a normalized non-negative vector"
            )));
        }
        Ok(Self {
            weights,
            source_gci: None,
            consistent: true,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn source_gci(&self) -> Option<f64> {
        self.source_gci
    }

    pub fn consistent(&self) -> bool {
        self.consistent
    }

    /// Spreads a vector over `len` slots, placing weight `self[t]` at
    /// `positions[t]` and zero elsewhere.
    pub fn scatter(&self, positions: &[usize], len: usize) -> Self {
        let mut weights = vec![0.0; len];
        for (&p, &w) in positions.iter().zip(&self.weights) {
            weights[p] = w;
        }
        Self {
            weights,
            source_gci: self.source_gci,
            consistent: self.consistent,
        }
    }
}

/// Geometric-mean (row) weights, normalized to sum to one.
///
/// Computed as `exp(mean_j ln a_ij)` with the maximum log-mean subtracted, so
/// large matrices with entries on the nine-point scale cannot overflow.
pub fn geometric_mean_weights(m: &ComparisonMatrix) -> Vec<f64> {
    let n = m.n() as f64;
    let log_means: Vec<f64> = (0..m.n())
        .map(|i| m.row(i).iter().map(|a| a.ln()).sum::<f64>() / n)
        .collect();
    let max = log_means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = log_means.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|r| r / total).collect()
}

pub fn priority_geometric_mean(m: &ComparisonMatrix) -> PriorityVector {
    let weights = geometric_mean_weights(m);
    let value = gci(m, &weights);
    PriorityVector {
        consistent: check_consistency(value, m.n()).consistent,
        source_gci: Some(value),
        weights,
    }
}

/// `e_ij = a_ij * w_j / w_i`.
pub fn local_inconsistency(m: &ComparisonMatrix, w: &[f64]) -> Result<Vec<Vec<f64>>> {
    if w.len() != m.n() {
        return Err(Error::DimensionMismatch {
            expected: m.n(),
            got: w.len(),
        });
    }
    if let Some(i) = w.iter().position(|&x| x <= 0.0) {
        return Err(Error::ZeroWeight(i));
    }
    Ok((0..m.n())
        .map(|i| (0..m.n()).map(|j| m.get(i, j) * w[j] / w[i]).collect())
        .collect())
}

/// Geometric consistency index of `m` against weights `w` (normally its
/// geometric-mean weights). Zero for n <= 2.
///
/// # Panics
/// If `w` does not have one positive entry per row of `m`.
pub fn gci(m: &ComparisonMatrix, w: &[f64]) -> f64 {
    let n = m.n();
    assert_eq!(w.len(), n, "weight vector length must match matrix size");
    if n <= 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let e = m.get(i, j) * w[j] / w[i];
            total += e.ln().powi(2);
        }
    }
    2.0 * total / ((n - 1) * (n - 2)) as f64
}

pub(crate) fn weighted_sum(criteria: &[f64], local: &[&[f64]]) -> Result<Vec<f64>> {
    if criteria.len() != local.len() {
        return Err(Error::DimensionMismatch {
            expected: criteria.len(),
            got: local.len(),
        });
    }
    let Some(first) = local.first() else {
        return Err(Error::EmptyList);
    };
    let k = first.len();
    if local.iter().any(|v| v.len() != k) {
        return Err(Error::AlternativeSetMismatch);
    }
    let mut scores = vec![0.0; k];
    for (w, alt) in criteria.iter().zip(local) {
        for (s, a) in scores.iter_mut().zip(alt.iter()) {
            *s += w * a;
        }
    }
    Ok(scores)
}

/// `S_a = sum_k w_k * w_a^(k)`, one score per alternative.
pub fn score_alternatives(criteria: &PriorityVector, local: &[PriorityVector]) -> Result<Vec<f64>> {
    let local: Vec<&[f64]> = local.iter().map(|v| v.weights()).collect();
    weighted_sum(criteria.weights(), &local)
}
