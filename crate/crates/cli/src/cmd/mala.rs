use dm_limits::mala::{
    asymptotic_table, rho_opt_lower_a, rho_opt_lower_b, tail_decreasing, MalaTarget, StandardNormal,
};
use serde_json::json;

use crate::error::{need, CliError};
use crate::report::{fmt_sig, Report};
use crate::{Format, MalaAction, MalaArgs};

pub const TABLE_HEADER: &str = "n,floor_a,floor_b,scaled_gap_a,scaled_gap_b";
/// Rows at the end of the table whose scaled gaps must decrease.
pub const TAIL_ROWS: usize = 3;
const TARGET_THINNED: u64 = 100_000;

fn cell(v: Option<f64>) -> String {
    v.map(fmt_sig).unwrap_or_default()
}

pub fn run(a: &MalaArgs) -> Result<String, CliError> {
    let name = match a.action {
        MalaAction::FloorA => "floor-a",
        MalaAction::FloorB => "floor-b",
        MalaAction::Table => "table",
        MalaAction::Simulate => "simulate",
    };
    let mut r = Report::new(format!("mala {name}"));
    match a.action {
        MalaAction::FloorA | MalaAction::FloorB => {
            let (n, gamma, g) = (need(a.n, "--n")?, need(a.gamma, "--gamma")?, need(a.g, "--G")?);
            r.input("n", n).input("gamma", gamma).input("G", g).input("M", a.m);
            if a.action == MalaAction::FloorA {
                let f = rho_opt_lower_a(n, gamma, g, a.m)?;
                if f.regional_holds == Some(false) {
                    r.warn("regional floor violated on D > 1/(2G)");
                }
                r.output("rho_opt_lower_a", f);
            } else {
                r.output("rho_opt_lower_b", rho_opt_lower_b(n, gamma, g, a.m)?);
            }
        }
        MalaAction::Table => {
            let (gamma, gp, g) = (need(a.gamma, "--gamma")?, need(a.gamma_prime, "--gamma-prime")?, need(a.g, "--G")?);
            let ns = need(a.n_list.clone(), "--n-list")?;
            let rows = asymptotic_table(gamma, gp, g, a.m, &ns)?;
            if a.format == Format::Csv {
                let mut out = String::from(TABLE_HEADER);
                for row in &rows {
                    out.push_str(&format!(
                        "\n{},{},{},{},{}",
                        fmt_sig(row.n),
                        cell(row.floor_a),
                        cell(row.floor_b),
                        cell(row.scaled_gap_a),
                        cell(row.scaled_gap_b)
                    ));
                }
                return Ok(out);
            }
            r.input("gamma", gamma).input("gamma_prime", gp).input("G", g).input("M", a.m).input("n_list", &ns);
            r.output(
                "tail_decreasing",
                json!({
                    "rows": TAIL_ROWS,
                    "scaled_gap_a": tail_decreasing(rows.iter().map(|x| x.ln_scaled_gap_a), TAIL_ROWS),
                    "scaled_gap_b": tail_decreasing(rows.iter().map(|x| x.ln_scaled_gap_b), TAIL_ROWS),
                }),
            );
            r.output("asymptotic_table", rows);
        }
        MalaAction::Simulate => {
            let seed = need(a.seed, "--seed")?;
            let h = need(a.h, "--h")?;
            let thin = a.thin.unwrap_or((a.steps / TARGET_THINNED).max(1));
            r.input("dim", a.dim).input("h", h).input("steps", a.steps).input("seed", seed).input("thin", thin);
            let target = MalaTarget::new(StandardNormal, a.dim, h)?;
            let x0 = vec![0.0; a.dim];
            r.output("simulate", target.simulate(&x0, a.steps, thin, seed)?);
        }
    }
    r.to_json()
}
