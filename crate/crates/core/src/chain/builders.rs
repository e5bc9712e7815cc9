//! Witness chains, graph walks and graph statistics.

use nalgebra::DMatrix;

use super::{Distribution, DriftSpecA, FiniteChain, MAX_STATES};
use crate::bounds::{baxendale_alpha_star, DmParamsA};
use crate::error::{Error, Result};
use crate::numerics::{floor_guarded, FLOOR_TOL};

/// Slack used when asking whether a set carries strictly more than half the
/// mass, so that a computed `0.5 + 1e-16` is not taken as a majority.
pub const MAJORITY_TOL: f64 = 1e-9;

/// The slowest chain compatible with the A-parameters, together with the drift
/// function, small set and minorizing measure that certify it.
///
/// States are `0..=alpha` with `alpha = floor(alpha_*)`. State 0 absorbs; from 1
/// the chain jumps to 0 with probability `eps` and to `alpha` otherwise; from
/// `x >= 2` it steps down to `x - 1`. Its rate is `(1 - eps)^(1/alpha)`.
pub fn witness_figure1(p: &DmParamsA) -> Result<(FiniteChain, DriftSpecA)> {
    let eps = p.epsilon();
    let alpha_star = baxendale_alpha_star(p)?;
    let alpha = floor_guarded(alpha_star, FLOOR_TOL).max(1);
    if alpha >= MAX_STATES as u64 {
        return Err(Error::TooLarge {
            states: usize::try_from(alpha.saturating_add(1)).unwrap_or(usize::MAX),
            limit: MAX_STATES,
        });
    }
    let top = alpha as usize;
    let mut m = DMatrix::zeros(top + 1, top + 1);
    m[(0, 0)] = 1.0;
    m[(1, 0)] = eps;
    m[(1, top)] += 1.0 - eps;
    for x in 2..=top {
        m[(x, x - 1)] = 1.0;
    }
    let chain = FiniteChain::new(m)?;

    let mut v = vec![1.0; top + 1];
    for (x, vx) in v.iter_mut().enumerate().take(top).skip(1) {
        *vx = p.lambda().powi(1 - x as i32);
    }
    v[top] = (p.k() - eps) / (1.0 - eps);
    let spec = DriftSpecA::new(v, vec![0, 1], Some(Distribution::point_mass(top + 1, 0)?))?;
    Ok((chain, spec))
}

/// Two states, 0 absorbing, 1 stays put with probability `lambda - delta`.
/// Its rate is `lambda - delta`.
pub fn witness_two_state(lambda: f64, delta: f64) -> Result<FiniteChain> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::param("lambda", lambda, "must lie in (0, 1)"));
    }
    if !(delta > 0.0 && delta < lambda) {
        return Err(Error::param("delta", delta, "must lie in (0, lambda)"));
    }
    let stay = lambda - delta;
    FiniteChain::from_rows(&[vec![1.0, 0.0], vec![1.0 - stay, stay]])
}

/// Drift certificate for [`witness_two_state`]: `V(0) = 1`,
/// `V(1) = (1 - lambda + delta)/delta`, `C = {0}`, `nu = delta_0`. It satisfies
/// the A-conditions with `(lambda, K = 1, eps = 1, beta = 1)`.
pub fn witness_two_state_drift(lambda: f64, delta: f64) -> Result<DriftSpecA> {
    witness_two_state(lambda, delta)?;
    DriftSpecA::new(
        vec![1.0, (1.0 - lambda + delta) / delta],
        vec![0],
        Some(Distribution::point_mass(2, 0)?),
    )
}

/// Two states, 0 absorbing, 1 jumps to 0 with probability `eps`. Rate `1 - eps`.
pub fn witness_rosenthal(epsilon: f64) -> Result<FiniteChain> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::param("epsilon", epsilon, "must lie in (0, 1]"));
    }
    FiniteChain::from_rows(&[vec![1.0, 0.0], vec![epsilon, 1.0 - epsilon]])
}

/// Simple random walk on the cycle of odd length `n`.
pub fn cycle_walk(n: usize) -> Result<FiniteChain> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::param("n", n as f64, "cycle length must be odd and at least 3"));
    }
    if n > MAX_STATES {
        return Err(Error::TooLarge {
            states: n,
            limit: MAX_STATES,
        });
    }
    let m = DMatrix::from_fn(n, n, |i, j| if (i + 1) % n == j || (j + 1) % n == i { 0.5 } else { 0.0 });
    FiniteChain::new(m)
}

/// Lazy walk on a star with hub 0 and leaves `1..=n`. Every state holds with
/// probability `theta`; the hub moves to a uniform leaf, a leaf returns to the hub.
pub fn star_walk(n: usize, theta: f64) -> Result<FiniteChain> {
    if n == 0 {
        return Err(Error::param("n", 0.0, "star needs at least one leaf"));
    }
    if n + 1 > MAX_STATES {
        return Err(Error::TooLarge {
            states: n + 1,
            limit: MAX_STATES,
        });
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::param("theta", theta, "must lie in (0, 1)"));
    }
    let leaf = (1.0 - theta) / n as f64;
    let m = DMatrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
        _ if i == j => theta,
        (0, _) => leaf,
        (_, 0) => 1.0 - theta,
        _ => 0.0,
    });
    FiniteChain::new(m)
}

/// Fewest states whose mass strictly exceeds 1/2, by taking heaviest first.
pub fn min_majority_cardinality(pi: &Distribution) -> usize {
    let mut w = pi.weights().to_vec();
    w.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    for (i, x) in w.iter().enumerate() {
        acc += x;
        if acc > 0.5 + MAJORITY_TOL {
            return i + 1;
        }
    }
    w.len()
}

/// Undirected transition graph: `x ~ y` for `x != y` when either direction
/// has positive probability.
pub fn adjacency(chain: &FiniteChain) -> Vec<Vec<bool>> {
    let n = chain.n_states();
    (0..n)
        .map(|i| (0..n).map(|j| i != j && (chain.prob(i, j) > 0.0 || chain.prob(j, i) > 0.0)).collect())
        .collect()
}

/// Largest vertex degree of a simple undirected graph.
pub fn max_degree(adjacency: &[Vec<bool>]) -> Result<usize> {
    let n = adjacency.len();
    for (i, row) in adjacency.iter().enumerate() {
        if row.len() != n {
            return Err(Error::InvalidGraph(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        if row[i] {
            return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
        }
        if let Some(j) = (0..n).find(|&j| row[j] != adjacency[j][i]) {
            return Err(Error::InvalidGraph(format!("edge ({i}, {j}) is not symmetric")));
        }
    }
    Ok(adjacency.iter().map(|r| r.iter().filter(|b| **b).count()).max().unwrap_or(0))
}
