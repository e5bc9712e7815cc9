use nalgebra::{linalg::Schur, DMatrix, DVector, SymmetricEigen};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use super::{check_len, Distribution, FiniteChain};
use crate::error::{Error, Result};
use crate::numerics::Probability;

const STATIONARY_RESIDUAL_TOL: f64 = 1e-10;

/// Spectral and power estimates of the rate must agree to this tolerance.
pub const RATE_AGREEMENT_TOL: f64 = 1e-3;

const MAX_SQUARINGS: u32 = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stationary {
    pub distribution: Distribution,
    /// Number of closed communicating classes; the law is unique iff this is 1.
    pub closed_classes: usize,
    pub unique: bool,
}

/// Stationary law by a direct linear solve on the closed class containing the
/// lowest-numbered recurrent state. Transient states get zero mass.
///
/// When several closed classes exist the returned law is still stationary but
/// `unique` is false.
pub fn stationary_distribution(chain: &FiniteChain) -> Result<Stationary> {
    let n = chain.n_states();
    let mut g = DiGraph::<(), ()>::with_capacity(n, n);
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if chain.prob(i, j) > 0.0 {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut class_of = vec![0usize; n];
    let sccs = tarjan_scc(&g);
    for (c, comp) in sccs.iter().enumerate() {
        for v in comp {
            class_of[v.index()] = c;
        }
    }
    let mut closed: Vec<Vec<usize>> = sccs
        .iter()
        .enumerate()
        .filter(|(c, comp)| {
            comp.iter()
                .all(|v| (0..n).all(|j| chain.prob(v.index(), j) == 0.0 || class_of[j] == *c))
        })
        .map(|(_, comp)| {
            let mut s: Vec<usize> = comp.iter().map(|v| v.index()).collect();
            s.sort_unstable();
            s
        })
        .collect();
    closed.sort_by_key(|s| s[0]);
    let class = &closed[0];

    let m = class.len();
    let mut a = DMatrix::from_fn(m, m, |r, c| {
        chain.prob(class[c], class[r]) - if r == c { 1.0 } else { 0.0 }
    });
    a.row_mut(m - 1).fill(1.0);
    let mut b = DVector::zeros(m);
    b[m - 1] = 1.0;
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numerical("singular stationary system".into()))?;
    let mut w = vec![0.0; n];
    for (k, &s) in class.iter().enumerate() {
        w[s] = x[k];
    }
    let distribution = Distribution::normalized(w)?;

    let pi = distribution.weights();
    let residual: f64 = (0..n)
        .map(|j| ((0..n).map(|i| pi[i] * chain.prob(i, j)).sum::<f64>() - pi[j]).abs())
        .sum();
    if residual > STATIONARY_RESIDUAL_TOL {
        return Err(Error::Numerical(format!("stationary residual {residual:e} exceeds {STATIONARY_RESIDUAL_TOL:e}")));
    }
    Ok(Stationary {
        closed_classes: closed.len(),
        unique: closed.len() == 1,
        distribution,
    })
}

/// Detailed balance `pi(x)P(x,y) = pi(y)P(y,x)` on the support of `pi`.
pub fn is_reversible(chain: &FiniteChain, pi: &Distribution, tol: f64) -> Result<bool> {
    check_len(chain.n_states(), pi.len())?;
    let w = pi.weights();
    let support = pi.support();
    for &x in &support {
        for &y in &support {
            if (w[x] * chain.prob(x, y) - w[y] * chain.prob(y, x)).abs() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Whether the spectrum of the chain in `L^2(pi)` is non-negative, checked via
/// the symmetrised matrix `sqrt(pi_x) P(x,y) / sqrt(pi_y)` on the support.
pub fn is_nonneg_definite(chain: &FiniteChain, pi: &Distribution, tol: f64) -> Result<bool> {
    if !is_reversible(chain, pi, tol)? {
        return Err(Error::NotReversible);
    }
    let w = pi.weights();
    let support = pi.support();
    let m = support.len();
    let s = DMatrix::from_fn(m, m, |r, c| {
        let (x, y) = (support[r], support[c]);
        let fwd = w[x].sqrt() * chain.prob(x, y) / w[y].sqrt();
        let bwd = w[y].sqrt() * chain.prob(y, x) / w[x].sqrt();
        0.5 * (fwd + bwd)
    });
    let eig = SymmetricEigen::new(s);
    Ok(eig.eigenvalues.iter().all(|&l| l >= -tol))
}

/// Total variation distance, half the L1 distance.
pub fn tv_distance(mu: &Distribution, nu: &Distribution) -> Result<Probability> {
    check_len(mu.len(), nu.len())?;
    let l1: f64 = mu.weights().iter().zip(nu.weights()).map(|(a, b)| (a - b).abs()).sum();
    Ok(Probability::clamped(0.5 * l1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    /// The spectral rate, reported as the answer.
    pub rate: Probability,
    /// Largest eigenvalue modulus of `P - 1 pi`.
    pub spectral: f64,
    /// Growth rate of `||(P - 1 pi)^m||` read off dyadic matrix powers.
    pub power: f64,
    /// `|spectral - power| <= RATE_AGREEMENT_TOL`.
    pub agree: bool,
}

/// Geometric rate at which `max_x TV(delta_x P^m, pi)` decays.
///
/// With `Q = P - 1 pi`, `delta_x P^m - pi` is row `x` of `Q^m`, so the rate is
/// the spectral radius of `Q`. This covers transient states and periodic
/// closed classes without special cases. The eigenvalue answer is cross-checked
/// against the decay of `||Q^m||_inf` over `m = 2^j`, which is insensitive to
/// ill-conditioned eigenvectors.
pub fn true_rate(chain: &FiniteChain) -> Result<RateReport> {
    let st = stationary_distribution(chain)?;
    if !st.unique {
        return Err(Error::NonUniqueStationary {
            classes: st.closed_classes,
        });
    }
    let n = chain.n_states();
    let pi = st.distribution.weights();
    let q = DMatrix::from_fn(n, n, |i, j| chain.prob(i, j) - pi[j]);

    let spectral = spectral_radius(chain, &st.distribution, &q)?;
    let power = power_rate(q);
    Ok(RateReport {
        rate: Probability::clamped(spectral),
        spectral,
        power,
        agree: (spectral - power).abs() <= RATE_AGREEMENT_TOL,
    })
}

/// Largest eigenvalue modulus of `Q`. Reversible chains with full support use
/// the symmetrised matrix, whose eigensolver cannot stall on the repeated
/// eigenvalues common in graph walks; otherwise a real Schur form of `Q` or `Q^T`.
fn spectral_radius(chain: &FiniteChain, pi: &Distribution, q: &DMatrix<f64>) -> Result<f64> {
    let n = q.nrows();
    let w = pi.weights();
    if w.iter().all(|&x| x > 0.0) && is_reversible(chain, pi, 1e-13)? {
        let s = DMatrix::from_fn(n, n, |i, j| (w[i].sqrt() * q[(i, j)] / w[j].sqrt() + w[j].sqrt() * q[(j, i)] / w[i].sqrt()) / 2.0);
        return Ok(SymmetricEigen::new(s).eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    let max_iter = 100_000 + 100 * n;
    Schur::try_new(q.clone(), f64::EPSILON, max_iter)
        .or_else(|| Schur::try_new(q.transpose(), f64::EPSILON, max_iter))
        .map(|s| s.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max))
        .ok_or_else(|| Error::Numerical("Schur decomposition did not converge".into()))
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp((L_j - L_{j-1}) / 2^(j-1))` with `L_j = ln ||Q^(2^j)||`, tracked in
/// normalised form so neither tiny nor near-one rates under- or overflow.
fn power_rate(q: DMatrix<f64>) -> f64 {
    let n0 = inf_norm(&q);
    if n0 == 0.0 {
        return 0.0;
    }
    let mut a = q / n0;
    let mut log_norm = n0.ln();
    let mut estimate = f64::NAN;
    for j in 1..=MAX_SQUARINGS {
        a = &a * &a;
        let nj = inf_norm(&a);
        if nj == 0.0 || !nj.is_finite() {
            return 0.0;
        }
        a /= nj;
        let next = 2.0 * log_norm + nj.ln();
        let prev_estimate = estimate;
        estimate = ((next - log_norm) / f64::from(1u32 << (j - 1))).exp();
        log_norm = next;
        if j >= 8 && (estimate - prev_estimate).abs() < 1e-12 {
            break;
        }
    }
    estimate
}
