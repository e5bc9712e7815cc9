use dm_limits::bounds::{
    baxendale_alpha_star, baxendale_bound, chain_specific_lower_a, chain_specific_lower_b, paraoptima_lower,
    pic1_stationary_mass_lower, rosenthal_bound, rosenthal_paraoptima_lower, DmParamsA, DmParamsB,
};
use dm_limits::Probability;

use crate::error::{need, CliError};
use crate::report::Report;
use crate::{BoundArgs, BoundKind};

fn params_a(a: &BoundArgs, r: &mut Report) -> Result<DmParamsA, CliError> {
    let (lambda, k, eps) = (need(a.lambda, "--lambda")?, need(a.k, "--K")?, need(a.eps, "--eps")?);
    r.input("lambda", lambda).input("K", k).input("eps", eps).input("beta", a.beta);
    Ok(DmParamsA::new(lambda, k, eps, a.beta)?)
}

fn params_b(a: &BoundArgs, r: &mut Report) -> Result<DmParamsB, CliError> {
    let (eta, l, eps, d) = (need(a.eta, "--eta")?, need(a.l, "--L")?, need(a.eps, "--eps")?, need(a.d, "--d")?);
    r.input("eta", eta).input("L", l).input("eps", eps).input("d", d);
    Ok(DmParamsB::new(eta, l, eps, d)?)
}

pub fn run(a: &BoundArgs) -> Result<String, CliError> {
    let name = match a.kind {
        BoundKind::Baxendale => "baxendale",
        BoundKind::Rosenthal => "rosenthal",
        BoundKind::Paraoptima => "paraoptima",
        BoundKind::Pic1 => "pic1",
        BoundKind::ChainLowerA => "chain-lower-a",
        BoundKind::ChainLowerB => "chain-lower-b",
    };
    let mut r = Report::new(format!("bound {name}"));
    match a.kind {
        BoundKind::Baxendale => {
            let p = params_a(a, &mut r)?;
            if p.epsilon() < 1.0 {
                r.output("baxendale_alpha_star", baxendale_alpha_star(&p)?);
            }
            r.output("baxendale_bound", baxendale_bound(&p));
            r.warn("valid only for reversible, non-negative definite chains; not checked here");
        }
        BoundKind::Paraoptima => {
            let p = params_a(a, &mut r)?;
            r.output("paraoptima_lower", paraoptima_lower(&p));
        }
        BoundKind::Rosenthal => {
            let p = params_b(a, &mut r)?;
            r.output("rosenthal_bound", rosenthal_bound(&p)?);
            r.output("rosenthal_paraoptima_lower", rosenthal_paraoptima_lower(&p)?);
        }
        BoundKind::Pic1 => {
            let (lambda, k) = (need(a.lambda, "--lambda")?, need(a.k, "--K")?);
            r.input("lambda", lambda).input("K", k);
            r.output("pic1_stationary_mass_lower", pic1_stationary_mass_lower(lambda, k)?);
        }
        BoundKind::ChainLowerA => {
            let (eps_c, pi_c) = (need(a.eps_c, "--eps-c")?, need(a.pi_c, "--pi-c")?);
            r.input("eps_c", eps_c).input("pi_c", pi_c);
            let v = chain_specific_lower_a(Probability::new(eps_c)?, Probability::new(pi_c)?)?;
            r.output("chain_specific_lower_a", v);
        }
        BoundKind::ChainLowerB => {
            let eps_c = need(a.eps_c, "--eps-c")?;
            r.input("eps_c", eps_c);
            r.output("chain_specific_lower_b", chain_specific_lower_b(Probability::new(eps_c)?));
            r.warn("assumes the set carries more than half the stationary mass");
        }
    }
    r.to_json()
}
