//! Finite-state Markov chains and exact oracles for them.

mod analysis;
mod builders;
mod conditions;
pub mod io;
mod subsets;

pub use analysis::{
    is_nonneg_definite, is_reversible, stationary_distribution, true_rate, tv_distance, RateReport, Stationary,
    RATE_AGREEMENT_TOL,
};
pub use builders::{
    adjacency, cycle_walk, max_degree, min_majority_cardinality, star_walk, witness_figure1, witness_rosenthal,
    witness_two_state, witness_two_state_drift, MAJORITY_TOL,
};
pub use conditions::{
    epsilon_c, verify_a, verify_b, verify_bivariate, BivariateDriftSpec, BivariateReport, Condition, DriftSpecA,
    DriftSpecB, Minorization, Verdict, Violation,
};
pub use subsets::{chain_floor_a, chain_floor_b, SubsetFloor, SUBSET_LIMIT, SUBSET_WARN};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for condition checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest state space accepted by [`FiniteChain::new`].
pub const MAX_STATES: usize = 2000;

/// Row sums must be within this of 1.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// A row-stochastic transition matrix with optional state labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteChain {
    p: DMatrix<f64>,
    labels: Option<Vec<String>>,
}

impl FiniteChain {
    pub fn new(p: DMatrix<f64>) -> Result<Self> {
        let n = p.nrows();
        if n == 0 {
            return Err(Error::InvalidChain("transition matrix is empty".into()));
        }
        if p.ncols() != n {
            return Err(Error::InvalidChain(format!("matrix is {}x{}, not square", n, p.ncols())));
        }
        if n > MAX_STATES {
            return Err(Error::TooLarge {
                states: n,
                limit: MAX_STATES,
            });
        }
        for i in 0..n {
            let row = p.row(i);
            if let Some(j) = row.iter().position(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidChain(format!("row {i}: entry {j} = {} is not a probability", p[(i, j)])));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidChain(format!("row {i} sums to {s}, not 1")));
            }
        }
        Ok(FiniteChain { p, labels: None })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidChain(format!("row {i} has {} entries, expected {n}", r.len())));
        }
        FiniteChain::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_states() {
            return Err(Error::DimensionMismatch {
                expected: self.n_states(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_states(&self) -> usize {
        self.p.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    #[inline]
    pub fn prob(&self, from: usize, to: usize) -> f64 {
        self.p[(from, to)]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_states()).map(|i| self.p.row(i).iter().copied().collect()).collect()
    }

    /// `(P f)(x) = sum_y P(x, y) f(y)`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_states(), f.len())?;
        Ok((0..self.n_states())
            .map(|i| self.p.row(i).iter().zip(f).map(|(p, v)| p * v).sum())
            .collect())
    }

    /// Validates a set of states and returns it as a membership mask.
    pub(crate) fn mask(&self, set: &[usize]) -> Result<Vec<bool>> {
        if set.is_empty() {
            return Err(Error::param("set", 0.0, "state set must be nonempty"));
        }
        let mut mask = vec![false; self.n_states()];
        for &s in set {
            if s >= self.n_states() {
                return Err(Error::param("set", s as f64, format!("state out of range 0..{}", self.n_states())));
            }
            mask[s] = true;
        }
        Ok(mask)
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// A probability vector on the states of a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("no states".into()));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(format!("weight {i} = {} is negative", weights[i])));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::InvalidDistribution(format!("weights sum to {s}, not 1")));
        }
        Ok(Distribution(weights))
    }

    pub fn point_mass(n: usize, at: usize) -> Result<Self> {
        if at >= n {
            return Err(Error::param("state", at as f64, format!("out of range 0..{n}")));
        }
        let mut w = vec![0.0; n];
        w[at] = 1.0;
        Ok(Distribution(w))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("no states".into()));
        }
        Ok(Distribution(vec![1.0 / n as f64; n]))
    }

    /// Clips round-off negatives and rescales; used on computed vectors.
    pub(crate) fn normalized(mut w: Vec<f64>) -> Result<Self> {
        for v in &mut w {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let s: f64 = w.iter().sum();
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidDistribution(format!("cannot normalise vector with mass {s}")));
        }
        w.iter_mut().for_each(|v| *v /= s);
        Ok(Distribution(w))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mass(&self, set: &[usize]) -> f64 {
        set.iter().filter_map(|&i| self.0.get(i)).sum()
    }

    pub(crate) fn mass_of_mask(&self, mask: &[bool]) -> f64 {
        self.0.iter().zip(mask).filter(|(_, m)| **m).map(|(w, _)| w).sum()
    }

    /// States with positive weight.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0.0).collect()
    }

    /// True when the law is a point mass, so that properties evaluated on its
    /// support hold vacuously.
    pub fn is_trivial_on_support(&self) -> bool {
        self.support().len() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_rows() {
        let err = FiniteChain::from_rows(&[vec![0.5, 0.5], vec![0.2, 0.7]]).unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
        assert!(FiniteChain::from_rows(&[vec![1.5, -0.5], vec![0.5, 0.5]]).is_err());
        assert!(FiniteChain::from_rows(&[vec![1.0, 0.0]]).is_err());
        assert!(FiniteChain::from_rows(&[]).is_err());
    }

    #[test]
    fn apply_and_mask() {
        let c = FiniteChain::from_rows(&[vec![0.5, 0.5], vec![0.0, 1.0]]).unwrap();
        assert_eq!(c.apply(&[2.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        assert!(c.apply(&[1.0]).is_err());
        assert_eq!(c.mask(&[1]).unwrap(), vec![false, true]);
        assert!(c.mask(&[2]).is_err());
        assert!(c.mask(&[]).is_err());
        assert!(c.clone().with_labels(vec!["a".into()]).is_err());
    }

    #[test]
    fn distribution_basics() {
        assert!(Distribution::new(vec![0.7, 0.2]).is_err());
        assert!(Distribution::new(vec![1.2, -0.2]).is_err());
        let d = Distribution::new(vec![0.25, 0.25, 0.5]).unwrap();
        assert_eq!(d.mass(&[0, 2]), 0.75);
        assert!(!d.is_trivial_on_support());
        assert!(Distribution::point_mass(3, 0).unwrap().is_trivial_on_support());
        assert!(Distribution::point_mass(3, 3).is_err());
        let n = Distribution::normalized(vec![2.0, -1e-18, 2.0]).unwrap();
        assert_eq!(n.weights(), &[0.5, 0.0, 0.5]);
    }
}
