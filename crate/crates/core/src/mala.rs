//! Metropolis-adjusted Langevin sampler on product targets, and floors on the
//! convergence bounds that drift and minorization can certify for it.
//!
//! The target has density proportional to `exp(-f(x))` with
//! `f(x) = sum_i -ln g(x_i)`. The floors depend on the target only through
//! `G = sup g` and the gradient Lipschitz constant `M`, and on the step size
//! through `h = n^(-gamma)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal as StdNormalDist;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian_ar::Floor;
use crate::numerics::{
    floor_guarded_f64, ln_normal_two_sided_tail, minimize_scalar, normal_two_sided_mass, std_normal_cdf, Interval, Probability, FLOOR_TOL,
};

/// One coordinate of a product target.
pub trait UnivariateDensity: Sync {
    /// `-ln g(x)` up to an additive constant.
    fn neg_log(&self, x: f64) -> f64;
    fn grad_neg_log(&self, x: f64) -> f64;
    /// `sup_x g(x)` for the normalised density.
    fn sup_density(&self) -> f64;
    /// Lipschitz constant of `grad_neg_log`.
    fn smoothness(&self) -> f64;
    /// Distribution function, when known in closed form.
    fn cdf(&self, _x: f64) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StandardNormal;

impl UnivariateDensity for StandardNormal {
    fn neg_log(&self, x: f64) -> f64 {
        0.5 * x * x
    }

    fn grad_neg_log(&self, x: f64) -> f64 {
        x
    }

    fn sup_density(&self) -> f64 {
        1.0 / (2.0 * std::f64::consts::PI).sqrt()
    }

    fn smoothness(&self) -> f64 {
        1.0
    }

    fn cdf(&self, x: f64) -> Option<f64> {
        Some(std_normal_cdf(x).value())
    }
}

#[derive(Debug, Clone)]
pub struct MalaTarget<D> {
    density: D,
    dim: usize,
    h: f64,
}

impl<D: UnivariateDensity> MalaTarget<D> {
    pub fn new(density: D, dim: usize, h: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", 0.0, "dimension must be positive"));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::param("h", h, "step size must be finite and positive"));
        }
        Ok(MalaTarget { density, dim, h })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step_size(&self) -> f64 {
        self.h
    }

    pub fn density(&self) -> &D {
        &self.density
    }

    pub fn neg_log_density(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| self.density.neg_log(v)).sum()
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `|to - from + h grad f(from)|^2 / (4h)`, minus the log proposal density
    /// from `from` to `to` up to a constant.
    fn transport_cost(&self, from: &[f64], to: &[f64]) -> f64 {
        let s: f64 = from
            .iter()
            .zip(to)
            .map(|(&a, &b)| {
                let r = b - a + self.h * self.density.grad_neg_log(a);
                r * r
            })
            .sum();
        s / (4.0 * self.h)
    }

    /// `ln q(from, to)` for the Gaussian proposal `N(from - h grad f(from), 2h I)`.
    pub fn log_proposal_density(&self, from: &[f64], to: &[f64]) -> Result<f64> {
        self.check(from)?;
        self.check(to)?;
        let norm = -0.5 * self.dim as f64 * (4.0 * std::f64::consts::PI * self.h).ln();
        Ok(norm - self.transport_cost(from, to))
    }

    /// Log of the Metropolis ratio `pi(y) q(y, x) / (pi(x) q(x, y))`.
    pub fn log_ratio(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.neg_log_density(x) - self.neg_log_density(y) - self.transport_cost(y, x) + self.transport_cost(x, y))
    }

    pub fn accept_prob(&self, x: &[f64], y: &[f64]) -> Result<Probability> {
        Ok(Probability::clamped(self.log_ratio(x, y)?.min(0.0).exp()))
    }

    /// One transition; returns the new state and whether the proposal was accepted.
    pub fn step<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> Result<(Vec<f64>, bool)> {
        self.check(x)?;
        let scale = (2.0 * self.h).sqrt();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| {
                let z: f64 = rng.sample(StdNormalDist);
                v - self.h * self.density.grad_neg_log(v) + scale * z
            })
            .collect();
        let log_u = rng.random::<f64>().ln();
        if log_u < self.log_ratio(x, &y)?.min(0.0) {
            Ok((y, true))
        } else {
            Ok((x.to_vec(), false))
        }
    }

    /// One transition driven by a fresh generator seeded with `seed`.
    pub fn step_seeded(&self, x: &[f64], seed: u64) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(self.step(x, &mut rng)?.0)
    }

    /// Runs the chain from `x0` and summarises the first coordinate.
    ///
    /// Every `thin`-th state enters the Kolmogorov-Smirnov statistic against
    /// the target's marginal distribution function; the moments use all states.
    pub fn simulate(&self, x0: &[f64], steps: u64, thin: u64, seed: u64) -> Result<SimulationSummary> {
        self.check(x0)?;
        if steps == 0 {
            return Err(Error::param("steps", 0.0, "need at least one step"));
        }
        let thin = thin.max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = x0.to_vec();
        let (mut accepted, mut sum, mut sum_sq) = (0u64, 0.0, 0.0);
        let mut kept = Vec::with_capacity((steps / thin) as usize + 1);
        for i in 1..=steps {
            let (next, acc) = self.step(&x, &mut rng)?;
            x = next;
            accepted += u64::from(acc);
            sum += x[0];
            sum_sq += x[0] * x[0];
            if i % thin == 0 {
                kept.push(x[0]);
            }
        }
        let nf = steps as f64;
        let mean = sum / nf;
        let ks_stat = if kept.is_empty() {
            None
        } else {
            ks_statistic(&mut kept, |v| self.density.cdf(v))
        };
        Ok(SimulationSummary {
            n_steps: steps,
            accept_rate: accepted as f64 / nf,
            mean,
            variance: sum_sq / nf - mean * mean,
            ks_stat,
        })
    }
}

fn ks_statistic(sample: &mut [f64], cdf: impl Fn(f64) -> Option<f64>) -> Option<f64> {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in sample.iter().enumerate() {
        let f = cdf(v)?;
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Some(d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationSummary {
    pub n_steps: u64,
    pub accept_rate: f64,
    pub mean: f64,
    pub variance: f64,
    pub ks_stat: Option<f64>,
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, v, "must be finite and positive"))
    }
}

/// Upper bound `2 Phi(-(1 - hM) D / (2 sqrt(2h)))` on the minorization
/// constant of a small set of diameter `D`.
pub fn eps_upper(diameter: f64, h: f64, m: f64) -> Result<Probability> {
    check_positive("D", diameter)?;
    check_positive("h", h)?;
    check_positive("M", m)?;
    if h * m >= 1.0 {
        return Err(Error::StepSize {
            hm: h * m,
            requirement: "below 1",
        });
    }
    Ok(Probability::clamped(normal_two_sided_mass(contraction(h, m) * diameter).1))
}

/// `(1 - hM) / (2 sqrt(2h))`, the factor multiplying `D` inside `Phi`.
fn contraction(h: f64, m: f64) -> f64 {
    (1.0 - h * m) / (2.0 * (2.0 * h).sqrt())
}

fn check_floor_args(n: f64, gamma: f64, g: f64, m: f64) -> Result<f64> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::param("n", n, "dimension must be at least 1"));
    }
    check_positive("gamma", gamma)?;
    check_positive("G", g)?;
    check_positive("M", m)?;
    Ok(n.powf(-gamma))
}

/// `1 - 2 Phi(-n^(gamma/2) / (8G))`.
fn simplified_floor(n: f64, gamma: f64, g: f64) -> Floor {
    let (inner, outer) = normal_two_sided_mass(n.powf(gamma / 2.0) / (8.0 * g));
    Floor {
        value: Probability::clamped(inner),
        complement: outer,
    }
}

/// Largest `hM` for which the regional floor `1 - 2 Phi(-n^(gamma/2)/(8G))`
/// is implied on `D > 1/(2G)`.
pub const REGIONAL_HM_LIMIT: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloorA {
    pub value: Probability,
    pub complement: f64,
    /// `ln(1 - value)`, finite after `complement` underflows.
    pub ln_complement: f64,
    /// Diameter at which the infimum is approached.
    pub argmin_d: f64,
    /// `floor((G D)^(-n))` on the minimising piece, 0 on `D >= 1/G`.
    pub exponent_floor: f64,
    pub h: f64,
    /// `1 - 2 Phi(-n^(gamma/2)/(8G))`, present when `hM <= 1 - 1/sqrt 2`.
    pub regional_floor: Option<Floor>,
    /// Whether every scanned point with `D > 1/(2G)` stayed above the regional floor.
    pub regional_holds: Option<bool>,
    pub points_scanned: usize,
}

/// `inf_{D > 0} [1 - 2 Phi(-(1 - hM) D / (2 sqrt(2h)))]^(min(1, 1/floor((GD)^(-n))))`
/// with `h = n^(-gamma)`.
///
/// The search runs over `s = -n ln(GD)`, so that `(GD)^(-n) = e^s`, on a
/// log-spaced grid in `s` split at `s = n ln 2` (`D = 1/(2G)`). The objective
/// is piecewise with pieces `e^s in [k, k+1)`; within each the value falls as
/// `s` grows, so the grid answer is polished by evaluating whole pieces at
/// their right ends and climbing to the best neighbour.
pub fn rho_opt_lower_a(n: f64, gamma: f64, g: f64, m: f64) -> Result<FloorA> {
    let h = check_floor_args(n, gamma, g, m)?;
    if h * m >= 1.0 {
        return Err(Error::StepSize {
            hm: h * m,
            requirement: "below 1 (increase n)",
        });
    }
    let c = contraction(h, m);
    let diameter = |s: f64| (-s / n).exp() / g;
    // ln(-ln bracket) - ln k, larger means a smaller floor value
    let log_log = |s: f64, ln_k: f64| {
        let x = c * diameter(s);
        let (inner, outer) = normal_two_sided_mass(x);
        let ln_neg_ln = if outer < 1e-280 {
            ln_normal_two_sided_tail(x)
        } else if outer < 0.5 {
            (-(-outer).ln_1p()).ln()
        } else {
            (-inner.ln()).ln()
        };
        ln_neg_ln - ln_k
    };
    let ln_piece = |s: f64| {
        if s > 53.0 * std::f64::consts::LN_2 {
            s
        } else {
            floor_guarded_f64(s.exp(), FLOOR_TOL).max(1.0).ln()
        }
    };

    let regional = (h * m <= REGIONAL_HM_LIMIT).then(|| simplified_floor(n, gamma, g));
    let regional_ll = regional.map(|f| (-f.value.value().ln()).ln());
    let mut regional_holds = regional.map(|_| true);
    let mut scanned = 0usize;

    let split = n * std::f64::consts::LN_2;
    let s_max = split.max(1.0) * 64.0 + 64.0;
    let s_min = 1e-12_f64.min(split / 2.0);

    // D = 1/G: exponent 1
    let mut best_ll = log_log(0.0, 0.0);
    let mut best_s = 0.0;
    for (lo, hi, near) in [(s_min, split, true), (split, s_max, false)] {
        if !(hi > lo) {
            continue;
        }
        let mut obj = |u: f64| {
            let s = u.exp();
            let ll = log_log(s, ln_piece(s));
            scanned += 1;
            if near {
                if let (Some(r), Some(flag)) = (regional_ll, regional_holds.as_mut()) {
                    // value >= regional  <=>  ll <= ln(-ln regional)
                    if ll > r + 1e-12 * r.abs().max(1.0) {
                        *flag = false;
                    }
                }
            }
            -ll
        };
        let r = minimize_scalar(&mut obj, Interval::new(lo.ln(), hi.ln())?, 1e-13)?;
        if -r.min > best_ll {
            best_ll = -r.min;
            best_s = r.argmin.exp();
        }
    }

    let mut exponent_floor = if best_s == 0.0 { 0.0 } else { ln_piece(best_s).exp() };
    if best_s > 0.0 && best_s <= 53.0 * std::f64::consts::LN_2 {
        // piece k has s in [ln k, ln(k+1)); its infimum sits at s -> ln(k+1)
        let piece = |k: f64| log_log((k + 1.0).ln(), k.ln());
        let mut k = exponent_floor;
        let mut cur = piece(k);
        loop {
            let up = piece(k + 1.0);
            if up <= cur || (k + 1.0).ln() > split {
                break;
            }
            (k, cur) = (k + 1.0, up);
        }
        while k > 1.0 {
            let down = piece(k - 1.0);
            if down <= cur {
                break;
            }
            (k, cur) = (k - 1.0, down);
        }
        if cur > best_ll {
            best_ll = cur;
            best_s = (k + 1.0).ln();
            exponent_floor = k;
        }
    }

    let f = Floor::from_log_log(best_ll);
    if let (Some(r), Some(flag)) = (regional, regional_holds.as_mut()) {
        if best_s <= split && f.value.value() + 1e-15 < r.value.value() {
            *flag = false;
        }
    }
    Ok(FloorA {
        value: f.value,
        complement: f.complement,
        ln_complement: ln_complement_from_log_log(best_ll),
        argmin_d: diameter(best_s),
        exponent_floor,
        h,
        regional_floor: regional,
        regional_holds,
        points_scanned: scanned,
    })
}

/// `ln(1 - exp(-exp(ll)))`.
fn ln_complement_from_log_log(ll: f64) -> f64 {
    if ll < -30.0 {
        // 1 - e^(-t) = t (1 - t/2 + ...), t = e^ll
        ll + (-0.5 * ll.exp()).ln_1p()
    } else {
        (-(-ll.exp()).exp_m1()).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FloorB {
    pub value: Probability,
    pub complement: f64,
    pub ln_complement: f64,
    pub h: f64,
    /// `1 - 2 Phi(-n^(gamma/2)/(8G))`; below `value` whenever `hM <= 1 - 1/sqrt 2`.
    pub simplified: Floor,
}

/// `1 - 2 Phi(-(1 - hM)/(4 sqrt(2h) G))` with `h = n^(-gamma)`, the floor for
/// bounds built on the B-conditions. Requires `hM <= 1/sqrt 2`.
pub fn rho_opt_lower_b(n: f64, gamma: f64, g: f64, m: f64) -> Result<FloorB> {
    let h = check_floor_args(n, gamma, g, m)?;
    if h * m > std::f64::consts::FRAC_1_SQRT_2 * (1.0 + 1e-12) {
        return Err(Error::StepSize {
            hm: h * m,
            requirement: "at most 1/sqrt(2) (increase n)",
        });
    }
    let x = (1.0 - h * m) / (4.0 * (2.0 * h).sqrt() * g);
    let (inner, outer) = normal_two_sided_mass(x);
    Ok(FloorB {
        value: Probability::clamped(inner),
        complement: outer,
        ln_complement: ln_normal_two_sided_tail(x),
        h,
        simplified: simplified_floor(n, gamma, g),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub n: f64,
    pub floor_a: Option<f64>,
    pub floor_b: Option<f64>,
    /// `n^gamma' (1 - floor_a)`.
    pub scaled_gap_a: Option<f64>,
    /// `n^gamma' (1 - floor_b)`.
    pub scaled_gap_b: Option<f64>,
    /// `ln` of `scaled_gap_a`, finite where the gap itself underflows.
    pub ln_scaled_gap_a: Option<f64>,
    pub ln_scaled_gap_b: Option<f64>,
}

/// Both floors and their gaps to 1 scaled by `n^gamma'`. A floor whose
/// step-size precondition fails at some `n` is left empty in that row.
pub fn asymptotic_table(gamma: f64, gamma_prime: f64, g: f64, m: f64, ns: &[f64]) -> Result<Vec<TableRow>> {
    check_positive("gamma'", gamma_prime)?;
    ns.par_iter()
        .map(|&n| {
            let ln_scale = gamma_prime * n.ln();
            let a = match rho_opt_lower_a(n, gamma, g, m) {
                Ok(f) => Some((f.value.value(), ln_scale + f.ln_complement)),
                Err(Error::StepSize { .. }) => None,
                Err(e) => return Err(e),
            };
            let b = match rho_opt_lower_b(n, gamma, g, m) {
                Ok(f) => Some((f.value.value(), ln_scale + f.ln_complement)),
                Err(Error::StepSize { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(TableRow {
                n,
                floor_a: a.map(|x| x.0),
                floor_b: b.map(|x| x.0),
                scaled_gap_a: a.map(|x| x.1.exp()),
                scaled_gap_b: b.map(|x| x.1.exp()),
                ln_scaled_gap_a: a.map(|x| x.1),
                ln_scaled_gap_b: b.map(|x| x.1),
            })
        })
        .collect()
}

/// Whether the last `len` entries of a column are present and strictly decreasing.
pub fn tail_decreasing(column: impl IntoIterator<Item = Option<f64>>, len: usize) -> bool {
    let v: Vec<Option<f64>> = column.into_iter().collect();
    if v.len() < len || len < 2 {
        return false;
    }
    let tail = &v[v.len() - len..];
    tail.windows(2).all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b < a))
}
