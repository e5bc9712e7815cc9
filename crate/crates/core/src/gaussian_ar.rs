//! Gaussian autoregressive chain `X' = X/2 + N(0, (3/4) I_n)` on `R^n`.
//!
//! With drift function `V(x) = |x|^2/k + 1` and small set `C = {V <= d}` the
//! chain satisfies the A-conditions with
//!
//! * `lambda(d) = 1/4 + (3/4 + 3n/(4k))/d` and `K(d) = d/4 + 3/4 + 3n/(4k)`,
//!   valid for `d > 1 + n/k`;
//! * `eps(a, d) = (a+1)^(-n/2) exp(-k (a+1)(d-1) / (6a))` for any `a > 0`.
//!
//! Its true rate is 1/2 in every dimension, while the floors computed here
//! show that no drift-and-minorization argument can certify anything close.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{baxendale_bound, BoundReport, DmParamsA};
use crate::error::{Error, Result};
use crate::numerics::{
    chi_square_cdf, chi_square_median, floor_guarded_f64, minimize_scalar, minimize_scalar_grid,
    normal_two_sided_mass, Interval, Probability, FLOOR_TOL,
};

/// Default scale of the drift function.
pub const DEFAULT_K: f64 = 100.0;

const GRID: usize = 200;
const A_RANGE: (f64, f64) = (1e-3, 1e3);
const D_SPAN: f64 = 1e3;
const D_OFFSET_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianArConfig {
    n: u32,
    k: f64,
}

impl GaussianArConfig {
    pub fn new(n: u32, k: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", 0.0, "dimension must be positive"));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::param("k", k, "drift scale must be finite and positive"));
        }
        Ok(GaussianArConfig { n, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Smallest admissible level, `1 + n/k`.
    pub fn min_level(&self) -> f64 {
        1.0 + f64::from(self.n) / self.k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftParams {
    pub lambda: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

pub fn drift_params(cfg: &GaussianArConfig, d: f64) -> Result<DriftParams> {
    if !(d > cfg.min_level()) || !d.is_finite() {
        return Err(Error::param("d", d, format!("level must exceed 1 + n/k = {}", cfg.min_level())));
    }
    let c = 0.75 + 0.75 * f64::from(cfg.n) / cfg.k;
    Ok(DriftParams {
        lambda: 0.25 + c / d,
        k: d / 4.0 + c,
    })
}

fn ln_minorization_eps(cfg: &GaussianArConfig, d: f64, a: f64) -> f64 {
    -0.5 * f64::from(cfg.n) * a.ln_1p() - cfg.k * (a + 1.0) * (d - 1.0) / (6.0 * a)
}

pub fn minorization_eps(cfg: &GaussianArConfig, d: f64, a: f64) -> Result<Probability> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::param("a", a, "must be finite and positive"));
    }
    if !(d > 1.0) || !d.is_finite() {
        return Err(Error::param("d", d, "must exceed 1"));
    }
    Ok(Probability::clamped(ln_minorization_eps(cfg, d, a).exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaxendaleOptimum {
    pub bound: BoundReport,
    pub a: f64,
    pub d: f64,
    pub lambda: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub epsilon: f64,
}

/// `-ln(1 - bound)` at `(ln a, ln(d - d_min))`; smaller is better.
fn baxendale_objective(cfg: &GaussianArConfig, log_a: f64, log_offset: f64) -> f64 {
    let a = log_a.exp();
    let d = cfg.min_level() + log_offset.exp();
    let Ok(dp) = drift_params(cfg, d) else {
        return f64::INFINITY;
    };
    let eps = ln_minorization_eps(cfg, d, a).exp();
    match DmParamsA::new(dp.lambda, dp.k, eps, 1.0) {
        Ok(p) => -baxendale_bound(&p).complement.ln(),
        Err(_) => f64::INFINITY,
    }
}

fn log_grid(lo: f64, hi: f64, cells: usize) -> impl Iterator<Item = f64> + Clone {
    let (l, h) = (lo.ln(), hi.ln());
    (0..=cells).map(move |i| l + (h - l) * i as f64 / cells as f64)
}

/// Minimises the Baxendale bound over the minorization parameter `a` and the
/// level `d`: a log-spaced 200 x 200 grid followed by alternating
/// one-dimensional refinements.
pub fn optimize_baxendale(cfg: &GaussianArConfig) -> Result<BaxendaleOptimum> {
    let a_grid: Vec<f64> = log_grid(A_RANGE.0, A_RANGE.1, GRID).collect();
    let t_grid: Vec<f64> = log_grid(D_OFFSET_MIN, D_SPAN, GRID).collect();
    let (mut la, mut lt, mut best) = a_grid
        .par_iter()
        .map(|&la| {
            t_grid
                .iter()
                .map(|&lt| (la, lt, baxendale_objective(cfg, la, lt)))
                .fold((la, f64::NAN, f64::INFINITY), |acc, x| if x.2 < acc.2 { x } else { acc })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::NAN, f64::NAN, f64::INFINITY), |acc, x| if x.2 < acc.2 { x } else { acc });
    if !best.is_finite() {
        return Err(Error::Numerical("Baxendale bound is 1 everywhere on the search grid".into()));
    }

    let mut ha = a_grid[1] - a_grid[0];
    let mut ht = t_grid[1] - t_grid[0];
    for _ in 0..8 {
        let m = minimize_scalar_grid(
            |x| baxendale_objective(cfg, x, lt),
            Interval::new(la - 2.0 * ha, la + 2.0 * ha)?,
            1e-12,
            64,
        )?;
        if m.min <= best {
            (la, best) = (m.argmin, m.min);
        }
        let m = minimize_scalar_grid(
            |y| baxendale_objective(cfg, la, y),
            Interval::new(lt - 2.0 * ht, lt + 2.0 * ht)?,
            1e-12,
            64,
        )?;
        if m.min <= best {
            (lt, best) = (m.argmin, m.min);
        }
        ha *= 0.5;
        ht *= 0.5;
    }

    let a = la.exp();
    let d = cfg.min_level() + lt.exp();
    let dp = drift_params(cfg, d)?;
    let eps = minorization_eps(cfg, d, a)?.value();
    let p = DmParamsA::new(dp.lambda, dp.k, eps, 1.0)?;
    Ok(BaxendaleOptimum {
        bound: baxendale_bound(&p),
        a,
        d,
        lambda: dp.lambda,
        k: dp.k,
        epsilon: eps,
    })
}

/// Upper bound `2 Phi(-D/(2 sqrt 3))` on the minorization constant of a small
/// set of diameter `D`.
pub fn eps_upper_from_diameter(diameter: f64) -> Result<Probability> {
    check_diameter(diameter)?;
    Ok(Probability::clamped(normal_two_sided_mass(diameter / (2.0 * 3f64.sqrt())).1))
}

fn check_diameter(diameter: f64) -> Result<()> {
    if diameter > 0.0 && diameter.is_finite() {
        Ok(())
    } else {
        Err(Error::param("D", diameter, "diameter must be finite and positive"))
    }
}

/// `1 / F_n(D^2/4)`, the reciprocal of the smallest stationary mass a small set
/// of diameter `D` can have. `+inf` when the chi-square CDF underflows.
pub fn alpha_n(diameter: f64, n: u32) -> Result<f64> {
    check_diameter(diameter)?;
    let cdf = chi_square_cdf(diameter * diameter / 4.0, n)?.value();
    Ok(if cdf > 0.0 { 1.0 / cdf } else { f64::INFINITY })
}

/// A floor close to 1, carried with its complement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Floor {
    pub value: Probability,
    pub complement: f64,
}

impl Floor {
    /// From `ln(-ln value)`.
    pub(crate) fn from_log_log(ll: f64) -> Self {
        let neg_log = ll.exp();
        Floor {
            value: Probability::clamped((-neg_log).exp()),
            complement: -(-neg_log).exp_m1(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarFloor {
    pub value: Probability,
    pub complement: f64,
    /// Diameter at which the infimum is approached (from above).
    pub argmin_d: f64,
    /// Floor of `alpha_n` on the minimising piece.
    pub alpha_floor: f64,
}

/// `ln(-ln [1 - 2 Phi(-D/(2 sqrt 3))]^(1/floor(alpha_n(D))))`, which decreases
/// as the floor value grows and is `-inf` where the value is exactly 1.
fn star_objective(diameter: f64, n: u32) -> (f64, f64) {
    let Ok(alpha) = alpha_n(diameter, n) else {
        return (f64::NAN, f64::NAN);
    };
    let k = floor_guarded_f64(alpha, FLOOR_TOL);
    let (_, outer) = normal_two_sided_mass(diameter / (2.0 * 3f64.sqrt()));
    let neg_log_bracket = -(-outer).ln_1p();
    (neg_log_bracket.ln() - k.ln(), k)
}

/// Right end of the piece on which `floor(alpha_n) = k`: `F_n(D^2/4) = 1/k`.
fn piece_boundary(n: u32, k: f64, hi: f64) -> f64 {
    let target = 1.0 / k;
    let (mut lo, mut hi) = (0.0_f64, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let c = chi_square_cdf(mid * mid / 4.0, n).map(Probability::value).unwrap_or(0.0);
        if c < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `inf_{D > 0} [1 - 2 Phi(-D/(2 sqrt 3))]^(1/floor(alpha_n(D)))`, a floor on
/// every drift-and-minorization bound for the `n`-dimensional chain.
///
/// Within a piece of constant `floor(alpha_n) = k` the objective increases in
/// `D`, so the infimum is a right limit at a piece boundary. The grid search
/// locates a good piece; the answer then climbs to the best neighbouring piece,
/// evaluating each at its boundary. Pieces get dense as `n` grows (about 175
/// pieces lie below the minimiser at `n = 200`), so the climb matters.
pub fn rho_star_lower(n: u32) -> Result<StarFloor> {
    let median = chi_square_median(n)?;
    // beyond 2 sqrt(m_n) the exponent is 1 and the bracket only grows
    let hi = 1.05 * 2.0 * median.sqrt();
    let domain = Interval::new(hi * 1e-9, hi)?;
    let m = minimize_scalar(|x| -star_objective(x, n).0, domain, hi * 1e-12)?;
    let (_, k0) = star_objective(m.argmin, n);

    let search_hi = 1.5 * hi;
    let piece = |k: f64| {
        let boundary = piece_boundary(n, k + 1.0, search_hi);
        let (_, outer) = normal_two_sided_mass(boundary / (2.0 * 3f64.sqrt()));
        ((-(-outer).ln_1p()).ln() - k.ln(), boundary)
    };
    let mut k = if k0.is_finite() && k0 < 1e12 { k0.max(1.0) } else { 1.0 };
    let mut cur = piece(k);
    loop {
        let up = piece(k + 1.0);
        if up.0 <= cur.0 {
            break;
        }
        (k, cur) = (k + 1.0, up);
    }
    while k > 1.0 {
        let down = piece(k - 1.0);
        if down.0 <= cur.0 {
            break;
        }
        (k, cur) = (k - 1.0, down);
    }

    let (ll, argmin_d, alpha_floor) = if -m.min > cur.0 { (-m.min, m.argmin, k0) } else { (cur.0, cur.1, k) };
    let f = Floor::from_log_log(ll);
    Ok(StarFloor {
        value: f.value,
        complement: f.complement,
        argmin_d,
        alpha_floor,
    })
}

/// `1 - 2 Phi(-sqrt(m_n / 3))`, the floor for bounds built on the
/// B-conditions, with `m_n` the chi-square median.
pub fn rosenthal_side_lower(n: u32) -> Result<Floor> {
    let m = chi_square_median(n)?;
    let (inner, outer) = normal_two_sided_mass((m / 3.0).sqrt());
    Ok(Floor {
        value: Probability::clamped(inner),
        complement: outer,
    })
}

/// The chain's actual convergence rate, identical in every dimension.
pub fn true_rate_reference() -> Probability {
    Probability::clamped(0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ar1Summary {
    pub n_steps: u64,
    pub mean: f64,
    pub variance: f64,
    pub lag1_autocorrelation: f64,
}

/// Simulates the one-dimensional chain from a stationary start.
pub fn simulate_ar1(steps: u64, seed: u64) -> Result<Ar1Summary> {
    if steps < 2 {
        return Err(Error::param("steps", steps as f64, "need at least two steps"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.75f64.sqrt()).expect("valid normal");
    let mut x: f64 = Normal::new(0.0, 1.0).expect("valid normal").sample(&mut rng);
    let (mut s, mut ss, mut cross) = (0.0, 0.0, 0.0);
    let mut prev = x;
    for i in 0..steps {
        x = 0.5 * x + noise.sample(&mut rng);
        s += x;
        ss += x * x;
        if i > 0 {
            cross += prev * x;
        }
        prev = x;
    }
    let nf = steps as f64;
    let mean = s / nf;
    let variance = ss / nf - mean * mean;
    let lag1 = (cross / (nf - 1.0) - mean * mean) / variance;
    Ok(Ar1Summary {
        n_steps: steps,
        mean,
        variance,
        lag1_autocorrelation: lag1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub n: u32,
    pub rho_n_star: f64,
    pub rosenthal_side_lower: f64,
    pub baxendale_optimum: f64,
}

/// Floors and optimised bound for each dimension in `ns`.
pub fn curve(ns: &[u32], k: f64) -> Result<Vec<CurveRow>> {
    ns.par_iter()
        .map(|&n| {
            let cfg = GaussianArConfig::new(n, k)?;
            Ok(CurveRow {
                n,
                rho_n_star: rho_star_lower(n)?.value.value(),
                rosenthal_side_lower: rosenthal_side_lower(n)?.value.value(),
                baxendale_optimum: optimize_baxendale(&cfg)?.bound.value.value(),
            })
        })
        .collect()
}
