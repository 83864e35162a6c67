//! Triangular fuzzy numbers and the fuzzy geometric-mean AHP.
//!
//! Multiplication, reciprocal and n-th root act componentwise. These are the
//! usual approximations for positive triangular numbers; the exact
//! extension-principle results are not triangular.

use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::ahp::{weighted_sum, ComparisonMatrix};
use crate::error::{Error, Result};

/// `(l, m, u)` with `0 < l <= m <= u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Tfn {
    l: f64,
    m: f64,
    u: f64,
}

impl Tfn {
    pub const ONE: Tfn = Tfn { l: 1.0, m: 1.0, u: 1.0 };

    pub fn new(l: f64, m: f64, u: f64) -> Result<Self> {
        if l.is_finite() && u.is_finite() && 0.0 < l && l <= m && m <= u {
            Ok(Self { l, m, u })
        } else {
            Err(Error::NonPositiveComponent { l, m, u })
        }
    }

    /// `(x, x, x)`.
    pub fn crisp(x: f64) -> Result<Self> {
        Self::new(x, x, x)
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    /// `(1/u, 1/m, 1/l)`; the only place the outer components swap.
    pub fn recip(self) -> Self {
        Self {
            l: 1.0 / self.u,
            m: 1.0 / self.m,
            u: 1.0 / self.l,
        }
    }

    pub fn nth_root(self, n: u32) -> Self {
        assert!(n >= 1, "root degree must be at least 1");
        if n == 1 {
            return self;
        }
        let p = 1.0 / n as f64;
        Self {
            l: self.l.powf(p),
            m: self.m.powf(p),
            u: self.u.powf(p),
        }
    }

    /// Centroid `(l + m + u) / 3`.
    pub fn defuzzify(self) -> f64 {
        (self.l + self.m + self.u) / 3.0
    }

    pub fn is_ordered(&self) -> bool {
        0.0 < self.l && self.l <= self.m && self.m <= self.u
    }
}

impl TryFrom<[f64; 3]> for Tfn {
    type Error = Error;

    fn try_from([l, m, u]: [f64; 3]) -> Result<Self> {
        Tfn::new(l, m, u)
    }
}

impl From<Tfn> for [f64; 3] {
    fn from(t: Tfn) -> Self {
        [t.l, t.m, t.u]
    }
}

impl Add for Tfn {
    type Output = Tfn;

    fn add(self, rhs: Tfn) -> Tfn {
        Tfn {
            l: self.l + rhs.l,
            m: self.m + rhs.m,
            u: self.u + rhs.u,
        }
    }
}

impl Mul for Tfn {
    type Output = Tfn;

    fn mul(self, rhs: Tfn) -> Tfn {
        Tfn {
            l: self.l * rhs.l,
            m: self.m * rhs.m,
            u: self.u * rhs.u,
        }
    }
}

pub fn tfn_add(a: Tfn, b: Tfn) -> Tfn {
    a + b
}

pub fn tfn_mul(a: Tfn, b: Tfn) -> Tfn {
    a * b
}

pub fn tfn_reciprocal(a: Tfn) -> Tfn {
    a.recip()
}

pub fn tfn_nth_root(a: Tfn, n: u32) -> Tfn {
    a.nth_root(n)
}

/// Fuzzy reciprocal matrix: unit diagonal, `ã_ji = recip(ã_ij)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyComparisonMatrix {
    n: usize,
    entries: Vec<Tfn>,
}

impl FuzzyComparisonMatrix {
    /// Builds from the strict upper triangle; the lower triangle is filled
    /// with exact reciprocals.
    pub fn from_upper(n: usize, mut upper: impl FnMut(usize, usize) -> Result<Tfn>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLevel("matrix has no rows".into()));
        }
        let mut entries = vec![Tfn::ONE; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let t = upper(i, j)?;
                entries[i * n + j] = t;
                entries[j * n + i] = t.recip();
            }
        }
        Ok(Self { n, entries })
    }

    /// Validates a full grid against the reciprocity rule within `1e-9`.
    pub fn from_rows(rows: &[Vec<Tfn>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyLevel("matrix has no rows".into()));
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { row, len: r.len(), n });
            }
        }
        let near = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
        for i in 0..n {
            if rows[i][i] != Tfn::ONE {
                return Err(Error::DiagonalNotOne {
                    index: i,
                    value: rows[i][i].m,
                });
            }
            for j in (i + 1)..n {
                let (a, b) = (rows[i][j], rows[j][i].recip());
                if !(near(a.l, b.l) && near(a.m, b.m) && near(a.u, b.u)) {
                    return Err(Error::ReciprocityViolation {
                        row: i,
                        col: j,
                        a: a.m,
                        b: rows[j][i].m,
                    });
                }
            }
        }
        Ok(Self {
            n,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    /// Every entry `(a_ij, a_ij, a_ij)`.
    pub fn degenerate(m: &ComparisonMatrix) -> Self {
        let n = m.n();
        let entries = (0..n * n)
            .map(|idx| {
                let a = m.get(idx / n, idx % n);
                Tfn { l: a, m: a, u: a }
            })
            .collect();
        Self { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Tfn {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[Tfn] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[Tfn] {
        &self.entries
    }
}

/// Fuzzy weights with their centroids and the normalized crisp weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyWeightVector {
    pub fuzzy: Vec<Tfn>,
    pub defuzzified: Vec<f64>,
    pub normalized: Vec<f64>,
}

impl FuzzyWeightVector {
    /// Zero-pads the normalized weights to `len` slots at `positions`.
    pub fn scattered_normalized(&self, positions: &[usize], len: usize) -> Vec<f64> {
        let mut out = vec![0.0; len];
        for (&p, &w) in positions.iter().zip(&self.normalized) {
            out[p] = w;
        }
        out
    }
}

/// Fuzzy geometric-mean weights:
/// `w̃_i = r̃_i ⊗ (Σ_k r̃_k)^-1` with `r̃_i = (Π_j ã_ij)^(1/n)`,
/// then centroid defuzzification and normalization.
pub fn fuzzy_weights(m: &FuzzyComparisonMatrix) -> Result<FuzzyWeightVector> {
    let n = m.n();
    let roots: Vec<Tfn> = (0..n)
        .map(|i| {
            let product = m.row(i).iter().copied().fold(Tfn::ONE, tfn_mul);
            tfn_nth_root(product, n as u32)
        })
        .collect();
    let total = roots.iter().copied().reduce(tfn_add).expect("n >= 1");
    let inverse = tfn_reciprocal(total);
    let fuzzy: Vec<Tfn> = roots.into_iter().map(|r| tfn_mul(r, inverse)).collect();
    for w in &fuzzy {
        if !w.is_ordered() {
            return Err(Error::Invariant(format!("fuzzy weight {w:?} lost its ordering")));
        }
    }
    let defuzzified: Vec<f64> = fuzzy.iter().map(|w| w.defuzzify()).collect();
    let normalized = normalize(&defuzzified)?;
    Ok(FuzzyWeightVector {
        fuzzy,
        defuzzified,
        normalized,
    })
}

pub fn defuzzify(w: Tfn) -> f64 {
    w.defuzzify()
}

/// `W_i / Σ W_k`.
pub fn normalize(values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Invariant(format!("cannot normalize {values:?}")));
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(Error::AllZero);
    }
    Ok(values.iter().map(|v| v / total).collect())
}

/// `S_a = Σ_k W_norm,k * W_norm,k^(a)`.
pub fn fuzzy_score_alternatives(criteria: &[f64], local: &[Vec<f64>]) -> Result<Vec<f64>> {
    let local: Vec<&[f64]> = local.iter().map(|v| v.as_slice()).collect();
    weighted_sum(criteria, &local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ahp::priority_geometric_mean;

    fn t(l: f64, m: f64, u: f64) -> Tfn {
        Tfn::new(l, m, u).unwrap()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(tfn_mul(t(1.0, 2.0, 3.0), t(2.0, 3.0, 4.0)), t(2.0, 6.0, 12.0));
        assert_eq!(tfn_add(t(1.0, 2.0, 3.0), t(2.0, 3.0, 4.0)), t(3.0, 5.0, 7.0));
        assert_eq!(tfn_reciprocal(t(2.0, 3.0, 4.0)), t(1.0 / 4.0, 1.0 / 3.0, 1.0 / 2.0));
        for k in 1..10 {
            assert_eq!(tfn_nth_root(Tfn::ONE, k), Tfn::ONE);
        }
    }

    #[test]
    fn construction_rejects_bad_components() {
        assert!(matches!(Tfn::new(0.0, 1.0, 2.0), Err(Error::NonPositiveComponent { .. })));
        assert!(Tfn::new(2.0, 1.0, 3.0).is_err());
        assert!(Tfn::new(1.0, 3.0, 2.0).is_err());
        assert!(Tfn::new(1.0, 1.0, f64::INFINITY).is_err());
        assert!(serde_json::from_str::<Tfn>("[3, 2, 1]").is_err());
        assert_eq!(serde_json::from_str::<Tfn>("[1, 2, 3]").unwrap(), t(1.0, 2.0, 3.0));
    }

    #[test]
    fn defuzzify_examples() {
        assert_eq!(defuzzify(t(1.0, 2.0, 3.0)), 2.0);
        for x in [0.7, 3.0, 1.0 / 9.0] {
            assert!((defuzzify(t(x, x, x)) - x).abs() < 1e-15);
        }
        assert_eq!(defuzzify(t(2.0, 3.0, 7.0)), 4.0);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[2.0, 2.0]).unwrap(), vec![0.5, 0.5]);
        assert_eq!(normalize(&[1.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0, 0.0]);
        assert_eq!(normalize(&[4.0, 2.0, 2.0]).unwrap(), vec![0.5, 0.25, 0.25]);
        assert!(matches!(normalize(&[0.0, 0.0]), Err(Error::AllZero)));
    }

    #[test]
    fn uniform_weights() {
        let m = FuzzyComparisonMatrix::from_upper(3, |_, _| Ok(Tfn::ONE)).unwrap();
        let w = fuzzy_weights(&m).unwrap();
        for wi in &w.fuzzy {
            for c in <[f64; 3]>::from(*wi) {
                assert!((c - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    // r1 = (√2, √3, 2), r2 = (1/2, 1/√3, 1/√2); w_i = r_i ⊗ (r1 + r2)^-1,
    // evaluated by hand outside this crate.
    #[test]
    fn two_by_two_chain() {
        let m = FuzzyComparisonMatrix::from_upper(2, |_, _| Ok(t(2.0, 3.0, 4.0))).unwrap();
        let w = fuzzy_weights(&m).unwrap();
        let expected = [
            [0.522407749927483, 0.75, 1.0448154998549657],
            [0.18469903125906464, 0.25, 0.3693980625181293],
        ];
        for (got, want) in w.fuzzy.iter().zip(expected) {
            for (g, e) in <[f64; 3]>::from(*got).iter().zip(want) {
                assert!((g - e).abs() < 1e-14, "{g} vs {e}");
            }
        }
        assert!((w.normalized[0] - 0.7423855915858419).abs() < 1e-14);
        assert!((w.normalized[1] - 0.257614408414158).abs() < 1e-14);
    }

    #[test]
    fn degenerate_collapses_to_crisp() {
        let crisp = ComparisonMatrix::from_rows(&[
            vec![1.0, 2.0, 4.0],
            vec![0.5, 1.0, 1.0],
            vec![0.25, 1.0, 1.0],
        ])
        .unwrap();
        let fuzzy = fuzzy_weights(&FuzzyComparisonMatrix::degenerate(&crisp)).unwrap();
        let expected = priority_geometric_mean(&crisp);
        for (a, b) in fuzzy.normalized.iter().zip(expected.weights()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn from_rows_checks_reciprocity() {
        let a = t(2.0, 3.0, 4.0);
        let ok = vec![vec![Tfn::ONE, a], vec![a.recip(), Tfn::ONE]];
        FuzzyComparisonMatrix::from_rows(&ok).unwrap();
        let bad = vec![vec![Tfn::ONE, a], vec![a, Tfn::ONE]];
        assert!(matches!(
            FuzzyComparisonMatrix::from_rows(&bad),
            Err(Error::ReciprocityViolation { .. })
        ));
    }

    #[test]
    fn fuzzy_scoring_pass_through() {
        let s = fuzzy_score_alternatives(&[1.0], &[vec![0.5, 0.3, 0.2]]).unwrap();
        assert_eq!(s, vec![0.5, 0.3, 0.2]);
    }
}
