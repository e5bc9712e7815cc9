//! Drift and minorization checks on finite chains.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{check_len, stationary_distribution, Distribution, FiniteChain};
use crate::bounds::{DmParamsA, DmParamsB};
use crate::error::{Error, Result};
use crate::numerics::Probability;

/// Best minorization constant on a set and the measure attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Minorization {
    pub epsilon: Probability,
    /// Normalised column minima; absent when `epsilon = 0`.
    pub nu: Option<Distribution>,
}

/// `eps_C = sum_y min_{x in C} P(x, y)`, the largest `eps` with
/// `P(x, .) >= eps nu(.)` for all `x` in `C`.
pub fn epsilon_c(chain: &FiniteChain, set: &[usize]) -> Result<Minorization> {
    let mask = chain.mask(set)?;
    Ok(epsilon_c_mask(chain, &mask))
}

pub(crate) fn column_minima(chain: &FiniteChain, mask: &[bool]) -> Vec<f64> {
    let n = chain.n_states();
    (0..n)
        .map(|y| {
            (0..n)
                .filter(|&x| mask[x])
                .map(|x| chain.prob(x, y))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

pub(crate) fn epsilon_c_mask(chain: &FiniteChain, mask: &[bool]) -> Minorization {
    let mins = column_minima(chain, mask);
    let eps: f64 = mins.iter().sum();
    let nu = if eps > 0.0 {
        Distribution::normalized(mins).ok()
    } else {
        None
    };
    Minorization {
        epsilon: Probability::clamped(eps),
        nu,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// Geometric drift off the small set, bounded return on it.
    A1,
    /// Minorization on the small set.
    A2,
    /// Minorizing measure charges the small set.
    A3,
    /// Additive drift.
    B1,
    /// Minorization on the level set.
    B2,
    /// Level exceeds `2L/(1-eta)`.
    B3,
    /// Pairwise drift towards a product set.
    Bivariate,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::A1 => "A1",
            Condition::A2 => "A2",
            Condition::A3 => "A3",
            Condition::B1 => "B1",
            Condition::B2 => "B2",
            Condition::B3 => "B3",
            Condition::Bivariate => "bivariate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub condition: Condition,
    /// Offending state, or first state of the offending pair.
    pub state: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other_state: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails(Violation),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(v) => Some(v),
        }
    }

    fn fail(condition: Condition, state: Option<usize>, detail: String) -> Self {
        Verdict::Fails(Violation {
            condition,
            state,
            other_state: None,
            detail,
        })
    }
}

/// `a <= b` up to `tol`, relative once `b` exceeds 1.
fn le_tol(a: f64, b: f64, tol: f64) -> bool {
    a <= b + tol * b.abs().max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSpecA {
    pub v: Vec<f64>,
    pub small_set: Vec<usize>,
    pub nu: Option<Distribution>,
}

impl DriftSpecA {
    pub fn new(v: Vec<f64>, small_set: Vec<usize>, nu: Option<Distribution>) -> Result<Self> {
        if let Some(i) = v.iter().position(|x| !(*x >= 1.0) || !x.is_finite()) {
            return Err(Error::param("V", v[i], format!("drift function must be finite and >= 1 (state {i})")));
        }
        if small_set.is_empty() {
            return Err(Error::param("C", 0.0, "small set must be nonempty"));
        }
        if let Some(nu) = &nu {
            check_len(v.len(), nu.len())?;
        }
        Ok(DriftSpecA { v, small_set, nu })
    }
}

/// Checks the three A-conditions and reports the first failure.
///
/// Without an explicit `nu` the minorization is tested against the measure
/// attaining `eps_C`, which is the most permissive choice.
pub fn verify_a(chain: &FiniteChain, spec: &DriftSpecA, p: &DmParamsA, tol: f64) -> Result<Verdict> {
    check_len(chain.n_states(), spec.v.len())?;
    let in_c = chain.mask(&spec.small_set)?;
    let pv = chain.apply(&spec.v)?;
    for x in 0..chain.n_states() {
        let rhs = if in_c[x] { p.k() } else { p.lambda() * spec.v[x] };
        if !le_tol(pv[x], rhs, tol) {
            return Ok(Verdict::fail(
                Condition::A1,
                Some(x),
                format!("PV = {} exceeds {} = {rhs}", pv[x], if in_c[x] { "K" } else { "lambda V" }),
            ));
        }
    }

    let eps = p.epsilon();
    let nu = match &spec.nu {
        Some(nu) => nu.clone(),
        None => {
            let m = epsilon_c_mask(chain, &in_c);
            match m.nu {
                Some(nu) if m.epsilon.value() + tol >= eps => nu,
                _ => {
                    let x = spec.small_set[0];
                    return Ok(Verdict::fail(
                        Condition::A2,
                        Some(x),
                        format!("eps_C = {} is below eps = {eps}", m.epsilon.value()),
                    ));
                }
            }
        }
    };
    check_len(chain.n_states(), nu.len())?;
    for &x in &spec.small_set {
        for y in 0..chain.n_states() {
            if chain.prob(x, y) + tol < eps * nu.weights()[y] {
                return Ok(Verdict::fail(
                    Condition::A2,
                    Some(x),
                    format!("P({x},{y}) = {} below eps nu({y}) = {}", chain.prob(x, y), eps * nu.weights()[y]),
                ));
            }
        }
    }

    let nu_c = nu.mass_of_mask(&in_c);
    if nu_c + tol < p.beta() {
        return Ok(Verdict::fail(
            Condition::A3,
            None,
            format!("nu(C) = {nu_c} below beta = {}", p.beta()),
        ));
    }
    Ok(Verdict::Holds)
}

/// Drift function for the B-conditions; the small set is the level set
/// `{V <= d}` with `d` taken from [`DmParamsB`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSpecB {
    pub v: Vec<f64>,
}

impl DriftSpecB {
    pub fn new(v: Vec<f64>) -> Result<Self> {
        if let Some(i) = v.iter().position(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::param("V", v[i], format!("drift function must be finite and >= 0 (state {i})")));
        }
        Ok(DriftSpecB { v })
    }

    pub fn level_set(&self, d: f64) -> Vec<usize> {
        (0..self.v.len()).filter(|&i| self.v[i] <= d).collect()
    }
}

/// Checks the three B-conditions. The level condition is tested first since
/// it needs no chain data.
pub fn verify_b(chain: &FiniteChain, spec: &DriftSpecB, p: &DmParamsB, tol: f64) -> Result<Verdict> {
    check_len(chain.n_states(), spec.v.len())?;
    if !p.level_condition_holds() {
        return Ok(Verdict::fail(
            Condition::B3,
            None,
            format!("d = {} does not exceed 2L/(1-eta) = {}", p.d(), p.level_threshold()),
        ));
    }
    let pv = chain.apply(&spec.v)?;
    for x in 0..chain.n_states() {
        let rhs = p.eta() * spec.v[x] + p.l();
        if !le_tol(pv[x], rhs, tol) {
            return Ok(Verdict::fail(Condition::B1, Some(x), format!("PV = {} exceeds eta V + L = {rhs}", pv[x])));
        }
    }
    let level = spec.level_set(p.d());
    if level.is_empty() {
        return Ok(Verdict::fail(Condition::B2, None, format!("level set {{V <= {}}} is empty", p.d())));
    }
    let m = epsilon_c(chain, &level)?;
    if m.epsilon.value() + tol < p.epsilon() {
        return Ok(Verdict::fail(
            Condition::B2,
            Some(level[0]),
            format!("eps_C = {} on the level set is below eps = {}", m.epsilon.value(), p.epsilon()),
        ));
    }
    Ok(Verdict::Holds)
}

/// Pairwise drift `PV1(x) + PV2(y) <= lambda' [V1(x) + V2(y)]` off a set of
/// state pairs and `<= K'` on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateDriftSpec {
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
    pub lambda_prime: f64,
    pub k_prime: f64,
}

impl BivariateDriftSpec {
    pub fn new(v1: Vec<f64>, v2: Vec<f64>, pairs: Vec<(usize, usize)>, lambda_prime: f64, k_prime: f64) -> Result<Self> {
        check_len(v1.len(), v2.len())?;
        for v in v1.iter().chain(&v2) {
            if !(*v >= 0.0) || !v.is_finite() {
                return Err(Error::param("V", *v, "drift functions must be finite and >= 0"));
            }
        }
        let min1 = v1.iter().copied().fold(f64::INFINITY, f64::min);
        let min2 = v2.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min1 + min2 > 0.0) {
            return Err(Error::param("V", min1 + min2, "inf of V1(x) + V2(y) must be positive"));
        }
        if !(lambda_prime < 1.0) {
            return Err(Error::param("lambda'", lambda_prime, "must be below 1"));
        }
        if !(k_prime > 0.0) || !k_prime.is_finite() {
            return Err(Error::param("K'", k_prime, "must be finite and positive"));
        }
        if let Some(&(x, y)) = pairs.iter().find(|(x, y)| *x >= v1.len() || *y >= v1.len()) {
            return Err(Error::param("pair", x.max(y) as f64, "state out of range"));
        }
        Ok(BivariateDriftSpec {
            v1,
            v2,
            pairs,
            lambda_prime,
            k_prime,
        })
    }

    /// Specialisation with one drift function and a product set `C' x C'`.
    pub fn symmetric(v: Vec<f64>, set: &[usize], lambda_prime: f64, k_prime: f64) -> Result<Self> {
        let pairs = set.iter().flat_map(|&x| set.iter().map(move |&y| (x, y))).collect();
        BivariateDriftSpec::new(v.clone(), v, pairs, lambda_prime, k_prime)
    }

    /// First and second coordinate projections of the pair set.
    pub fn projections(&self) -> (Vec<usize>, Vec<usize>) {
        let mut a: Vec<usize> = self.pairs.iter().map(|p| p.0).collect();
        let mut b: Vec<usize> = self.pairs.iter().map(|p| p.1).collect();
        a.sort_unstable();
        a.dedup();
        b.sort_unstable();
        b.dedup();
        (a, b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BivariateReport {
    pub verdict: Verdict,
    /// Stationary mass of the two projections, summed.
    pub mass_sum: f64,
}

impl BivariateReport {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

pub fn verify_bivariate(chain: &FiniteChain, spec: &BivariateDriftSpec, tol: f64) -> Result<BivariateReport> {
    let n = chain.n_states();
    check_len(n, spec.v1.len())?;
    let pv1 = chain.apply(&spec.v1)?;
    let pv2 = chain.apply(&spec.v2)?;
    let mut in_set = vec![false; n * n];
    for &(x, y) in &spec.pairs {
        in_set[x * n + y] = true;
    }
    let mut verdict = Verdict::Holds;
    'outer: for x in 0..n {
        for y in 0..n {
            let lhs = pv1[x] + pv2[y];
            let rhs = if in_set[x * n + y] {
                spec.k_prime
            } else {
                spec.lambda_prime * (spec.v1[x] + spec.v2[y])
            };
            if !le_tol(lhs, rhs, tol) {
                verdict = Verdict::Fails(Violation {
                    condition: Condition::Bivariate,
                    state: Some(x),
                    other_state: Some(y),
                    detail: format!("PV1(x) + PV2(y) = {lhs} exceeds {rhs}"),
                });
                break 'outer;
            }
        }
    }
    let pi = stationary_distribution(chain)?.distribution;
    let (c1, c2) = spec.projections();
    let mass_sum = pi.mass(&c1) + pi.mass(&c2);
    debug_assert!(!verdict.holds() || mass_sum > 1.0, "pairwise drift holds but projections carry {mass_sum}");
    Ok(BivariateReport { verdict, mass_sum })
}
