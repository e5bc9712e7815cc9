use super::Interval;
use crate::error::{Error, Result};

/// Number of uniform grid cells scanned before golden-section refinement.
///
/// The objectives minimised in this crate are piecewise (a floor sits in an
/// exponent), so a pure unimodal search can lock onto the wrong piece.
pub const GRID_CELLS: usize = 2048;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub argmin: f64,
    pub min: f64,
}

/// Minimises `f` over `domain` with [`GRID_CELLS`] grid cells followed by
/// golden-section descent inside the best cell's neighbourhood.
pub fn minimize_scalar<F>(f: F, domain: Interval, tol: f64) -> Result<Minimum>
where
    F: FnMut(f64) -> f64,
{
    minimize_scalar_grid(f, domain, tol, GRID_CELLS)
}

/// As [`minimize_scalar`] with an explicit number of grid cells.
///
/// NaN values are treated as `+inf`. The returned point is the best of all
/// evaluated points, so the result is never worse than the grid optimum.
pub fn minimize_scalar_grid<F>(mut f: F, domain: Interval, tol: f64, cells: usize) -> Result<Minimum>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::param("tol", tol, "tolerance must be positive"));
    }
    let cells = cells.max(2);
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let step = domain.width() / cells as f64;
    let node = |i: usize| if i == cells { domain.hi() } else { domain.lo() + step * i as f64 };
    let mut best = Minimum {
        argmin: domain.lo(),
        min: f64::INFINITY,
    };
    let mut best_i = 0;
    for i in 0..=cells {
        let x = node(i);
        let v = eval(x);
        if v < best.min {
            best = Minimum { argmin: x, min: v };
            best_i = i;
        }
    }

    let mut a = node(best_i.saturating_sub(1));
    let mut b = node((best_i + 1).min(cells));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < best.min {
            best = Minimum { argmin: c, min: fc };
        }
        if fd < best.min {
            best = Minimum { argmin: d, min: fd };
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.min {
            best = Minimum { argmin: x, min: v };
        }
    }
    Ok(best)
}

/// `floor(x)`, except that values within `tol` of an integer round to it.
pub fn floor_guarded(x: f64, tol: f64) -> u64 {
    let v = floor_guarded_f64(x, tol);
    if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v as u64
    }
}

/// Floating-point form of [`floor_guarded`]; keeps huge and infinite arguments.
pub fn floor_guarded_f64(x: f64, tol: f64) -> f64 {
    debug_assert!(tol > 0.0 && tol < 0.5);
    if !x.is_finite() {
        return x;
    }
    let r = x.round();
    if (x - r).abs() <= tol {
        r
    } else {
        x.floor()
    }
}
