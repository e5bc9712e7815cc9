use dm_limits::gaussian_ar::{
    curve, optimize_baxendale, rho_star_lower, rosenthal_side_lower, true_rate_reference, GaussianArConfig,
};

use crate::error::{need, CliError};
use crate::report::{fmt_sig, Report};
use crate::{Format, GaussianAction, GaussianArgs};

pub const CURVE_HEADER: &str = "n,rho_n_star,rosenthal_side_lower,baxendale_optimum";

pub fn run(a: &GaussianArgs) -> Result<String, CliError> {
    let name = match a.action {
        GaussianAction::Optimize => "optimize",
        GaussianAction::Floor => "floor",
        GaussianAction::RosenthalFloor => "rosenthal-floor",
        GaussianAction::Curve => "curve",
    };
    let mut r = Report::new(format!("gaussian {name}"));
    match a.action {
        GaussianAction::Optimize => {
            let n = need(a.n, "--n")?;
            r.input("n", n).input("k", a.k);
            r.output("optimize_baxendale", optimize_baxendale(&GaussianArConfig::new(n, a.k)?)?);
        }
        GaussianAction::Floor => {
            let n = need(a.n, "--n")?;
            r.input("n", n);
            r.output("rho_star_lower", rho_star_lower(n)?);
            r.output("true_rate_reference", true_rate_reference());
        }
        GaussianAction::RosenthalFloor => {
            let n = need(a.n, "--n")?;
            r.input("n", n);
            r.output("rosenthal_side_lower", rosenthal_side_lower(n)?);
            r.output("true_rate_reference", true_rate_reference());
        }
        GaussianAction::Curve => {
            let ns = need(a.n_list.clone(), "--n-list")?;
            let rows = curve(&ns, a.k)?;
            if a.format == Format::Csv {
                let mut out = String::from(CURVE_HEADER);
                for row in &rows {
                    out.push_str(&format!(
                        "\n{},{},{},{}",
                        row.n,
                        fmt_sig(row.rho_n_star),
                        fmt_sig(row.rosenthal_side_lower),
                        fmt_sig(row.baxendale_optimum)
                    ));
                }
                return Ok(out);
            }
            r.input("n_list", &ns).input("k", a.k);
            r.output("curve", rows);
        }
    }
    r.to_json()
}
