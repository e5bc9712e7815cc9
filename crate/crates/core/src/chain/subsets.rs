//! Chain-specific floors by exhaustive search over small sets.

use rayon::prelude::*;
use serde::Serialize;

use super::conditions::epsilon_c_mask;
use super::{stationary_distribution, FiniteChain, MAJORITY_TOL};
use crate::bounds::{chain_specific_lower_a, chain_specific_lower_b};
use crate::error::{Error, Result};
use crate::numerics::Probability;

/// Hard cap on the number of states for subset enumeration.
pub const SUBSET_LIMIT: usize = 20;
/// Callers should warn above this many states; enumeration gets slow.
pub const SUBSET_WARN: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetFloor {
    pub value: Probability,
    /// The minimising set, lowest bitmask among ties.
    pub set: Vec<usize>,
    pub epsilon_c: Probability,
    pub mass: f64,
    pub subsets_scanned: u64,
}

/// `min over C with pi(C) > 0` of `(1 - eps_C)^(1/floor(1/pi(C)))`.
pub fn chain_floor_a(chain: &FiniteChain) -> Result<SubsetFloor> {
    scan(chain, |eps, mass| {
        if mass > 0.0 {
            chain_specific_lower_a(eps, Probability::clamped(mass)).ok()
        } else {
            None
        }
    })
}

/// `min over C with pi(C) > 1/2` of `1 - eps_C`.
pub fn chain_floor_b(chain: &FiniteChain) -> Result<SubsetFloor> {
    scan(chain, |eps, mass| (mass > 0.5 + MAJORITY_TOL).then(|| chain_specific_lower_b(eps)))
}

fn scan<F>(chain: &FiniteChain, floor: F) -> Result<SubsetFloor>
where
    F: Fn(Probability, f64) -> Option<Probability> + Sync,
{
    let n = chain.n_states();
    if n > SUBSET_LIMIT {
        return Err(Error::TooLarge {
            states: n,
            limit: SUBSET_LIMIT,
        });
    }
    let pi = stationary_distribution(chain)?.distribution;
    let total: u64 = (1u64 << n) - 1;
    let best = (1..=total)
        .into_par_iter()
        .filter_map(|bits| {
            let mask: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            let mass = pi.mass_of_mask(&mask);
            let eps = epsilon_c_mask(chain, &mask).epsilon;
            floor(eps, mass).map(|v| (v.value(), bits, eps, mass))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .ok_or_else(|| Error::Numerical("no admissible set".into()))?;
    let (value, bits, eps, mass) = best;
    Ok(SubsetFloor {
        value: Probability::clamped(value),
        set: (0..n).filter(|i| bits >> i & 1 == 1).collect(),
        epsilon_c: eps,
        mass,
        subsets_scanned: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{cycle_walk, star_walk};

    #[test]
    fn star_majority_floor() {
        // hub plus one leaf: eps_C = min(theta, (1-theta)/n) + min(1-theta, theta)
        let f = chain_floor_b(&star_walk(4, 0.6).unwrap()).unwrap();
        assert!((f.value.value() - 0.5).abs() < 1e-12, "{f:?}");
        assert_eq!(f.set, vec![0, 1]);
    }

    #[test]
    fn cycle_majority_floor_is_one() {
        let f = chain_floor_b(&cycle_walk(7).unwrap()).unwrap();
        assert_eq!(f.value.value(), 1.0);
    }

    #[test]
    fn floor_a_never_exceeds_singletons() {
        let c = star_walk(3, 0.3).unwrap();
        let f = chain_floor_a(&c).unwrap();
        // any singleton has eps = 1 so its floor is 0
        assert_eq!(f.value.value(), 0.0);
        assert_eq!(f.subsets_scanned, 15);
    }
}
