//! Seeded random chains with drift specifications that pass their verifiers by
//! construction: parameters are read off the chain and the drift function.

use dm_limits::bounds::{DmParamsA, DmParamsB};
use dm_limits::chain::{
    epsilon_c, stationary_distribution, verify_a, verify_b, witness_figure1, witness_two_state,
    witness_two_state_drift, BivariateDriftSpec, DriftSpecA, DriftSpecB, FiniteChain, DEFAULT_TOL,
};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SIZE: usize = 100;
pub const MAX_CORPUS_STATES: usize = 6;

pub struct CaseA {
    pub chain: FiniteChain,
    pub spec: DriftSpecA,
    pub params: DmParamsA,
}

pub struct CaseB {
    pub chain: FiniteChain,
    pub spec: DriftSpecB,
    pub params: DmParamsB,
}

pub struct CaseBivariate {
    pub chain: FiniteChain,
    pub spec: BivariateDriftSpec,
}

/// Row-stochastic matrix where row `x` sends at least `pull[x]` of its mass to
/// the states in `target`. Entries are sparse so that minorization constants vary.
fn biased_chain(rng: &mut ChaCha8Rng, n: usize, target: &[usize], pull: &[f64]) -> FiniteChain {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|x| {
            let mut w: Vec<f64> = (0..n)
                .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random::<f64>().powi(2) })
                .collect();
            let mut bias = vec![0.0; n];
            for &t in target {
                bias[t] = rng.random::<f64>() + 1e-3;
            }
            let (sw, sb): (f64, f64) = (w.iter().sum(), bias.iter().sum());
            let keep = 1.0 - pull[x];
            for y in 0..n {
                let rest = if sw > 0.0 { w[y] / sw } else { 1.0 / n as f64 };
                w[y] = keep * rest + pull[x] * bias[y] / sb;
            }
            w
        })
        .collect();
    FiniteChain::from_rows(&rows).expect("rows are normalised")
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let k = rng.random_range(1..=n);
    let mut s = sample(rng, n, k).into_vec();
    s.sort_unstable();
    s
}

fn pv(chain: &FiniteChain, v: &[f64]) -> Vec<f64> {
    chain.apply(v).unwrap()
}

fn try_case_a(rng: &mut ChaCha8Rng) -> Option<CaseA> {
    let n = rng.random_range(2..=MAX_CORPUS_STATES);
    let set = random_subset(rng, n);
    let in_c: Vec<bool> = (0..n).map(|x| set.contains(&x)).collect();
    let pull: Vec<f64> = (0..n).map(|x| if in_c[x] { rng.random() } else { rng.random_range(0.5..1.0) }).collect();
    let chain = biased_chain(rng, n, &set, &pull);
    if !stationary_distribution(&chain).ok()?.unique {
        return None;
    }
    let v: Vec<f64> = (0..n)
        .map(|x| if in_c[x] { rng.random_range(1.0..2.0) } else { rng.random_range(2.0..30.0) })
        .collect();
    let pv = pv(&chain, &v);
    let lambda = (0..n).filter(|&x| !in_c[x]).map(|x| pv[x] / v[x]).fold(0.0, f64::max);
    if lambda >= 1.0 {
        return None;
    }
    let k = (0..n).filter(|&x| in_c[x]).map(|x| pv[x]).fold(1.0, f64::max);
    let m = epsilon_c(&chain, &set).ok()?;
    let nu = m.nu?;
    let eps = m.epsilon.value() * rng.random_range(0.5..=1.0);
    let beta = nu.mass(&set) * rng.random_range(0.5..=1.0);
    if !(eps > 0.0 && beta > 0.0) {
        return None;
    }
    let params = DmParamsA::new(lambda, k, eps.min(1.0), beta.min(1.0)).ok()?;
    let spec = DriftSpecA::new(v, set, Some(nu)).ok()?;
    Some(CaseA { chain, spec, params })
}

/// Witness chains with their certificates, then random cases until `size` random ones exist.
pub fn corpus_a(seed: u64, size: usize) -> Vec<CaseA> {
    let mut out = Vec::new();
    for (l, k, e) in [(0.5, 10.0, 0.19), (0.5, 10.0, 0.2), (0.3, 2.0, 0.5), (0.9, 50.0, 0.1), (0.0, 4.0, 0.3)] {
        let params = DmParamsA::new(l, k, e, 1.0).unwrap();
        let (chain, spec) = witness_figure1(&params).unwrap();
        out.push(CaseA { chain, spec, params });
    }
    for (l, d) in [(0.5, 0.1), (0.9, 0.5), (0.2, 0.19)] {
        out.push(CaseA {
            chain: witness_two_state(l, d).unwrap(),
            spec: witness_two_state_drift(l, d).unwrap(),
            params: DmParamsA::new(l, 1.0, 1.0, 1.0).unwrap(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random = 0;
    while random < size {
        if let Some(c) = try_case_a(&mut rng) {
            debug_assert!(verify_a(&c.chain, &c.spec, &c.params, DEFAULT_TOL).unwrap().holds());
            out.push(c);
            random += 1;
        }
    }
    out
}

fn try_case_b(rng: &mut ChaCha8Rng) -> Option<CaseB> {
    let n = rng.random_range(2..=MAX_CORPUS_STATES);
    let low = random_subset(rng, n);
    let is_low: Vec<bool> = (0..n).map(|x| low.contains(&x)).collect();
    let v: Vec<f64> = (0..n)
        .map(|x| if is_low[x] { rng.random_range(0.0..1.0) } else { rng.random_range(1.0..50.0) })
        .collect();
    let pull: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..1.0)).collect();
    let chain = biased_chain(rng, n, &low, &pull);
    if !stationary_distribution(&chain).ok()?.unique {
        return None;
    }
    let pv = pv(&chain, &v);
    let eta = rng.random_range(0.0..0.9);
    let l = (0..n).map(|x| pv[x] - eta * v[x]).fold(0.0, f64::max);
    let threshold = 2.0 * l / (1.0 - eta);
    let d = threshold * rng.random_range(1.0001..3.0) + 1e-6;
    let spec = DriftSpecB::new(v).ok()?;
    let level = spec.level_set(d);
    if level.is_empty() {
        return None;
    }
    let eps = epsilon_c(&chain, &level).ok()?.epsilon.value() * rng.random_range(0.5..=1.0);
    if !(eps > 0.0) {
        return None;
    }
    let params = DmParamsB::new(eta, l, eps.min(1.0), d).ok()?;
    Some(CaseB { chain, spec, params })
}

pub fn corpus_b(seed: u64, size: usize) -> Vec<CaseB> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < size {
        if let Some(c) = try_case_b(&mut rng) {
            debug_assert!(verify_b(&c.chain, &c.spec, &c.params, DEFAULT_TOL).unwrap().holds());
            out.push(c);
        }
    }
    out
}

fn try_case_bivariate(rng: &mut ChaCha8Rng) -> Option<CaseBivariate> {
    let n = rng.random_range(2..=MAX_CORPUS_STATES);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let w: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
            let s: f64 = w.iter().sum();
            w.iter().map(|x| x / s).collect()
        })
        .collect();
    let chain = FiniteChain::from_rows(&rows).ok()?;
    let v1: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
    let v2: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..10.0)).collect();
    let (p1, p2) = (pv(&chain, &v1), pv(&chain, &v2));
    let lambda_prime = rng.random_range(0.0..0.95);
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let forced = p1[x] + p2[y] > lambda_prime * (v1[x] + v2[y]);
            if forced || rng.random_bool(0.1) {
                pairs.push((x, y));
            }
        }
    }
    if pairs.is_empty() {
        pairs.push((0, 0));
    }
    let k_prime = pairs.iter().map(|&(x, y)| p1[x] + p2[y]).fold(0.0, f64::max) * rng.random_range(1.0..2.0);
    let spec = BivariateDriftSpec::new(v1, v2, pairs, lambda_prime, k_prime).ok()?;
    Some(CaseBivariate { chain, spec })
}

pub fn corpus_bivariate(seed: u64, size: usize) -> Vec<CaseBivariate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < size {
        if let Some(c) = try_case_bivariate(&mut rng) {
            out.push(c);
        }
    }
    out
}
