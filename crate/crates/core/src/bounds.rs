//! Closed-form drift-and-minorization bounds.
//!
//! Two parameterisations are supported. [`DmParamsA`] carries `(lambda, K, eps,
//! beta)` for a geometric drift towards a small set with a bounded return value
//! on it; [`DmParamsB`] carries `(eta, L, eps, d)` for an additive drift whose
//! level set `{V <= d}` is the small set.
//!
//! Every formula returns a [`BoundReport`] so the intermediate exponents are
//! available to callers. `value` is computed alongside `complement = 1 - value`,
//! which keeps full precision when the bound is within rounding of 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{floor_guarded, Probability, FLOOR_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmParamsA {
    lambda: f64,
    #[serde(rename = "K")]
    k: f64,
    epsilon: Probability,
    beta: Probability,
}

impl DmParamsA {
    pub fn new(lambda: f64, k: f64, epsilon: f64, beta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::param("lambda", lambda, "must lie in [0, 1)"));
        }
        if !(k >= 1.0) || !k.is_finite() {
            return Err(Error::param("K", k, "must be finite and at least 1"));
        }
        Ok(DmParamsA {
            lambda,
            k,
            epsilon: positive_probability("epsilon", epsilon)?,
            beta: positive_probability("beta", beta)?,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.value()
    }

    pub fn beta(&self) -> f64 {
        self.beta.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DmParamsB {
    eta: f64,
    #[serde(rename = "L")]
    l: f64,
    epsilon: Probability,
    d: f64,
}

impl DmParamsB {
    /// Builds the tuple. The level condition `d > 2L/(1-eta)` is not enforced
    /// here; see [`DmParamsB::level_condition_holds`].
    pub fn new(eta: f64, l: f64, epsilon: f64, d: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::param("eta", eta, "must lie in [0, 1)"));
        }
        if !(l >= 0.0) || !l.is_finite() {
            return Err(Error::param("L", l, "must be finite and non-negative"));
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::param("d", d, "must be finite and positive"));
        }
        Ok(DmParamsB {
            eta,
            l,
            epsilon: positive_probability("epsilon", epsilon)?,
            d,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon.value()
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// `2L / (1 - eta)`, the level `d` has to exceed.
    pub fn level_threshold(&self) -> f64 {
        2.0 * self.l / (1.0 - self.eta)
    }

    pub fn level_condition_holds(&self) -> bool {
        self.d > self.level_threshold()
    }

    pub(crate) fn require_level_condition(&self) -> Result<()> {
        if self.level_condition_holds() {
            Ok(())
        } else {
            Err(Error::B3Violated {
                d: self.d,
                threshold: self.level_threshold(),
            })
        }
    }
}

fn positive_probability(name: &'static str, v: f64) -> Result<Probability> {
    if v > 0.0 && v <= 1.0 {
        Ok(Probability::clamped(v))
    } else {
        Err(Error::param(name, v, "must lie in (0, 1]"))
    }
}

/// Which convention of the formula produced the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    EpsLtOne,
    EpsEqOne,
    LambdaZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub value: Probability,
    /// `1 - value`, computed without cancellation.
    pub complement: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_floor: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_tilde: Option<f64>,
    #[serde(rename = "K_tilde", skip_serializing_if = "Option::is_none")]
    pub k_tilde: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_double_star: Option<f64>,
    pub branch: Branch,
}

impl BoundReport {
    fn plain(value: f64, complement: f64, branch: Branch) -> Self {
        BoundReport {
            value: Probability::clamped(value),
            complement,
            alpha_star: None,
            alpha_floor: None,
            lambda_tilde: None,
            k_tilde: None,
            alpha_double_star: None,
            branch,
        }
    }
}

/// `(1 - eps)^(1/alpha)` and its complement.
fn root_of_non_minorized(eps: f64, alpha: f64) -> (f64, f64) {
    let log = (-eps).ln_1p() / alpha;
    (log.exp(), -log.exp_m1())
}

/// `max{lambda, (1 - eps)^(1/alpha)}` together with its complement.
fn max_with_lambda(lambda: f64, eps: f64, alpha: f64) -> (f64, f64) {
    let (v, c) = root_of_non_minorized(eps, alpha);
    if lambda >= v {
        (lambda, 1.0 - lambda)
    } else {
        (v, c)
    }
}

/// `alpha_* = (ln[(K - eps)/(1 - eps)] + ln(1/lambda)) / ln(1/lambda)`, or 1 when
/// `lambda = 0`. Undefined at `eps = 1`.
pub fn baxendale_alpha_star(p: &DmParamsA) -> Result<f64> {
    let eps = p.epsilon();
    if eps >= 1.0 {
        return Err(Error::param("epsilon", eps, "alpha_* is undefined when epsilon = 1"));
    }
    if p.lambda == 0.0 {
        return Ok(1.0);
    }
    let log_inv_lambda = -p.lambda.ln();
    let log_ratio = (p.k - eps).ln() - (-eps).ln_1p();
    Ok((log_ratio + log_inv_lambda) / log_inv_lambda)
}

/// Upper bound on the convergence rate of a reversible, non-negative definite
/// chain satisfying the A-conditions: `max{lambda, (1-eps)^(1/alpha_*)}`, or
/// `lambda` when `eps = 1`.
///
/// The reversibility and non-negativity hypotheses are not checked here.
pub fn baxendale_bound(p: &DmParamsA) -> BoundReport {
    a_family_bound(p, false)
}

/// Lower limit on the best bound any method can derive from the A-parameters
/// alone: the same formula as [`baxendale_bound`] with `alpha_*` replaced by its
/// floor. Never exceeds [`baxendale_bound`].
pub fn paraoptima_lower(p: &DmParamsA) -> BoundReport {
    a_family_bound(p, true)
}

fn a_family_bound(p: &DmParamsA, floored: bool) -> BoundReport {
    let eps = p.epsilon();
    if eps >= 1.0 {
        return BoundReport::plain(p.lambda, 1.0 - p.lambda, Branch::EpsEqOne);
    }
    let alpha_star = baxendale_alpha_star(p).expect("eps < 1 checked above");
    let alpha_floor = floor_guarded(alpha_star, FLOOR_TOL).max(1);
    let alpha = if floored { alpha_floor as f64 } else { alpha_star };
    let (value, complement) = max_with_lambda(p.lambda, eps, alpha);
    let branch = if p.lambda == 0.0 {
        Branch::LambdaZero
    } else {
        Branch::EpsLtOne
    };
    BoundReport {
        alpha_star: Some(alpha_star),
        alpha_floor: Some(alpha_floor),
        ..BoundReport::plain(value, complement, branch)
    }
}

/// Coupling bound for the B-conditions:
/// `lambda~ = (1 + 2L + eta d)/(1 + d)`, `K~ = 1 + 2 eta d + 2L`,
/// `alpha_** = (ln[K~/(1-eps)] + ln(1/lambda~)) / ln(1/lambda~)` and value
/// `(1-eps)^(1/alpha_**)`, or `lambda~` when `eps = 1`.
pub fn rosenthal_bound(p: &DmParamsB) -> Result<BoundReport> {
    p.require_level_condition()?;
    let lambda_tilde = (1.0 + 2.0 * p.l + p.eta * p.d) / (1.0 + p.d);
    let k_tilde = 1.0 + 2.0 * p.eta * p.d + 2.0 * p.l;
    let eps = p.epsilon();
    if eps >= 1.0 {
        return Ok(BoundReport {
            lambda_tilde: Some(lambda_tilde),
            k_tilde: Some(k_tilde),
            ..BoundReport::plain(lambda_tilde, 1.0 - lambda_tilde, Branch::EpsEqOne)
        });
    }
    // ln(1/lambda~) = ln(1 + d) - ln(1 + 2L + eta d), kept apart to survive huge d
    let log_inv_lambda = (1.0 + p.d).ln() - (1.0 + 2.0 * p.l + p.eta * p.d).ln();
    let alpha = (k_tilde.ln() - (-eps).ln_1p() + log_inv_lambda) / log_inv_lambda;
    let (value, complement) = root_of_non_minorized(eps, alpha);
    Ok(BoundReport {
        lambda_tilde: Some(lambda_tilde),
        k_tilde: Some(k_tilde),
        alpha_double_star: Some(alpha),
        ..BoundReport::plain(value, complement, Branch::EpsLtOne)
    })
}

/// Lower limit `1 - eps` on the best bound derivable from the B-parameters.
pub fn rosenthal_paraoptima_lower(p: &DmParamsB) -> Result<Probability> {
    p.require_level_condition()?;
    Ok(Probability::clamped(1.0 - p.epsilon()))
}

/// Lower bound on the stationary mass of a small set under the A-drift:
/// `ln(1/lambda) / (ln K + ln(1/lambda))`, read as 1 when `lambda = 0`.
pub fn pic1_stationary_mass_lower(lambda: f64, k: f64) -> Result<Probability> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::param("lambda", lambda, "must lie in [0, 1)"));
    }
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::param("K", k, "must be finite and at least 1"));
    }
    if lambda == 0.0 {
        return Ok(Probability::ONE);
    }
    let li = -lambda.ln();
    Ok(Probability::clamped(li / (k.ln() + li)))
}

/// Chain-specific floor from a small set `C`: `(1 - eps_C)^(1/floor(1/pi_C))`.
pub fn chain_specific_lower_a(eps_c: Probability, pi_c: Probability) -> Result<Probability> {
    if pi_c.value() <= 0.0 {
        return Err(Error::param("pi_C", pi_c.value(), "the small set must carry stationary mass"));
    }
    let m = floor_guarded(1.0 / pi_c.value(), FLOOR_TOL).max(1);
    Ok(Probability::clamped(root_of_non_minorized(eps_c.value(), m as f64).0))
}

/// Chain-specific floor `1 - eps_C` for a set carrying more than half the
/// stationary mass. The mass condition is the caller's responsibility.
pub fn chain_specific_lower_b(eps_c: Probability) -> Probability {
    Probability::clamped(1.0 - eps_c.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(l: f64, k: f64, e: f64, b: f64) -> DmParamsA {
        DmParamsA::new(l, k, e, b).unwrap()
    }

    fn prob(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(DmParamsA::new(1.0, 2.0, 0.5, 0.5).is_err());
        assert!(DmParamsA::new(0.5, 0.9, 0.5, 0.5).is_err());
        assert!(DmParamsA::new(0.5, 2.0, 0.0, 0.5).is_err());
        assert!(DmParamsA::new(0.5, 2.0, 0.5, 0.0).is_err());
        assert!(DmParamsB::new(0.5, -1.0, 0.5, 1.0).is_err());
        assert!(DmParamsB::new(0.5, 1.0, 0.5, 0.0).is_err());
        let b = DmParamsB::new(0.5, 1.0, 0.5, 3.9).unwrap();
        assert!(!b.level_condition_holds());
        assert_eq!(b.level_threshold(), 4.0);
    }

    #[test]
    fn alpha_star_examples() {
        // ln(99) / ln(2) = 6.6294, so alpha_* = (ln(9.9/0.9) + ln 2)/ln 2
        let v = baxendale_alpha_star(&a(0.5, 10.0, 0.1, 1.0)).unwrap();
        assert!((v - 4.459_431_618_637_297).abs() < 1e-12, "{v}");
        assert_eq!(baxendale_alpha_star(&a(0.0, 5.0, 0.3, 1.0)).unwrap(), 1.0);
        let v = baxendale_alpha_star(&a(0.5, 1.0, 1e-8, 1.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!(baxendale_alpha_star(&a(0.5, 10.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn baxendale_examples() {
        let r = baxendale_bound(&a(0.5, 10.0, 0.1, 1.0));
        assert!((r.value.value() - 0.976_650_6).abs() < 1e-6, "{:?}", r);
        assert_eq!(r.alpha_floor, Some(4));
        assert_eq!(r.branch, Branch::EpsLtOne);
        let r = baxendale_bound(&a(0.3, 2.0, 1.0, 1.0));
        assert_eq!(r.value.value(), 0.3);
        assert_eq!(r.branch, Branch::EpsEqOne);
        assert!(r.alpha_star.is_none());
    }

    #[test]
    fn paraoptima_examples() {
        let r = paraoptima_lower(&a(0.5, 10.0, 0.1, 1.0));
        assert!((r.value.value() - 0.9_f64.powf(0.25)).abs() < 1e-14);
        assert_eq!(r.alpha_floor, Some(4));
        assert_eq!(paraoptima_lower(&a(0.6, 1.0, 1.0, 0.5)).value.value(), 0.6);
        let r = paraoptima_lower(&a(0.0, 3.0, 0.25, 1.0));
        assert!((r.value.value() - 0.75).abs() < 1e-15);
        assert_eq!(r.alpha_floor, Some(1));
        assert_eq!(r.branch, Branch::LambdaZero);
    }

    #[test]
    fn complement_tracks_value() {
        let r = baxendale_bound(&a(0.5, 10.0, 1e-14, 1.0));
        assert!(r.complement > 0.0 && r.complement < 1e-14);
        assert!((r.value.value() + r.complement - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rosenthal_examples() {
        let r = rosenthal_bound(&DmParamsB::new(0.5, 1.0, 0.5, 5.0).unwrap()).unwrap();
        assert!((r.lambda_tilde.unwrap() - 11.0 / 12.0).abs() < 1e-15);
        assert_eq!(r.k_tilde, Some(8.0));
        assert!((r.alpha_double_star.unwrap() - 32.866).abs() < 1e-2);
        assert!((r.value.value() - 0.979_13).abs() < 1e-4);

        let r = rosenthal_bound(&DmParamsB::new(0.0, 0.0, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(r.value.value(), 0.5);
        assert_eq!(r.branch, Branch::EpsEqOne);

        let err = rosenthal_bound(&DmParamsB::new(0.5, 1.0, 0.5, 3.9).unwrap()).unwrap_err();
        assert_eq!(err, Error::B3Violated { d: 3.9, threshold: 4.0 });
        assert!(err.to_string().contains('4'));
    }

    #[test]
    fn rosenthal_approaches_one_minus_eps_for_large_level() {
        let mut prev = 1.0;
        for d in [1.0, 10.0, 1e3, 1e6, 1e12, 1e300] {
            let v = rosenthal_bound(&DmParamsB::new(0.0, 0.0, 0.4, d).unwrap()).unwrap().value.value();
            assert!(v < prev && v >= 0.6);
            prev = v;
        }
        assert!((prev - 0.6).abs() < 1e-3);
    }

    #[test]
    fn rosenthal_floor() {
        for (e, want) in [(0.5, 0.5), (1.0, 0.0), (0.05, 0.95)] {
            let p = DmParamsB::new(0.5, 1.0, e, 5.0).unwrap();
            assert!((rosenthal_paraoptima_lower(&p).unwrap().value() - want).abs() < 1e-15);
        }
        assert!(rosenthal_paraoptima_lower(&DmParamsB::new(0.5, 1.0, 0.5, 4.0).unwrap()).is_err());
    }

    #[test]
    fn pic1_examples() {
        assert_eq!(pic1_stationary_mass_lower(0.0, 7.0).unwrap().value(), 1.0);
        assert!((pic1_stationary_mass_lower(0.25, 4.0).unwrap().value() - 0.5).abs() < 1e-15);
        let want = 2_f64.ln() / (10_f64.ln() + 2_f64.ln());
        assert!((pic1_stationary_mass_lower(0.5, 10.0).unwrap().value() - want).abs() < 1e-15);
        assert!((want - 0.2314).abs() < 1e-4);
        assert_eq!(pic1_stationary_mass_lower(0.5, 1.0).unwrap().value(), 1.0);
        assert!(pic1_stationary_mass_lower(1.0, 2.0).is_err());
    }

    #[test]
    fn chain_specific_examples() {
        let v = chain_specific_lower_a(prob(0.5), prob(0.4)).unwrap().value();
        assert!((v - 0.5_f64.sqrt()).abs() < 1e-15);
        assert_eq!(chain_specific_lower_a(prob(1.0), prob(0.3)).unwrap().value(), 0.0);
        assert_eq!(chain_specific_lower_a(prob(0.0), prob(0.9)).unwrap().value(), 1.0);
        assert!(chain_specific_lower_a(prob(0.5), prob(0.0)).is_err());
        // 1/0.2 lands just above 5 in floating point; the guard keeps floor = 5
        let v = chain_specific_lower_a(prob(0.5), prob(0.2)).unwrap().value();
        assert!((v - 0.5_f64.powf(0.2)).abs() < 1e-15);
        assert_eq!(chain_specific_lower_b(prob(0.5)).value(), 0.5);
    }
}
