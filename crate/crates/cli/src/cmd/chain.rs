use dm_limits::bounds::{pic1_stationary_mass_lower, DmParamsA, DmParamsB};
use dm_limits::chain::{
    adjacency, chain_floor_a, chain_floor_b, cycle_walk, epsilon_c, io, is_nonneg_definite, is_reversible,
    max_degree, min_majority_cardinality, stationary_distribution, star_walk, true_rate, verify_a, verify_b,
    verify_bivariate, witness_figure1, witness_rosenthal, witness_two_state, witness_two_state_drift,
    BivariateDriftSpec, Distribution, DriftSpecA, DriftSpecB, FiniteChain, SUBSET_WARN,
};
use serde_json::json;

use crate::error::{need, CliError};
use crate::report::Report;
use crate::{Builtin, ChainAction, ChainArgs};

/// The chain, plus the drift certificate that comes with some builtins.
fn source(a: &ChainArgs, r: &mut Report) -> Result<(FiniteChain, Option<DriftSpecA>), CliError> {
    if let Some(path) = &a.file {
        r.input("file", path.display().to_string());
        return Ok((io::load(path)?, None));
    }
    let b = need(a.builtin, "--file or --builtin")?;
    Ok(match b {
        Builtin::Figure1 => {
            let p = params_a(a, r)?;
            r.input("builtin", "figure1");
            let (c, s) = witness_figure1(&p)?;
            (c, Some(s))
        }
        Builtin::TwoState => {
            let (l, d) = (need(a.lambda, "--lambda")?, need(a.delta, "--delta")?);
            r.input("builtin", "two-state").input("lambda", l).input("delta", d);
            (witness_two_state(l, d)?, Some(witness_two_state_drift(l, d)?))
        }
        Builtin::Rosenthal2 => {
            let e = need(a.eps, "--eps")?;
            r.input("builtin", "rosenthal-2").input("eps", e);
            (witness_rosenthal(e)?, None)
        }
        Builtin::Cycle => {
            let n = need(a.n, "--n")?;
            r.input("builtin", "cycle").input("n", n);
            (cycle_walk(n)?, None)
        }
        Builtin::Star => {
            let (n, t) = (need(a.n, "--n")?, need(a.theta, "--theta")?);
            r.input("builtin", "star").input("n", n).input("theta", t);
            (star_walk(n, t)?, None)
        }
    })
}

fn params_a(a: &ChainArgs, r: &mut Report) -> Result<DmParamsA, CliError> {
    let (lambda, k, eps) = (need(a.lambda, "--lambda")?, need(a.k, "--K")?, need(a.eps, "--eps")?);
    let beta = a.beta.unwrap_or(1.0);
    r.input("lambda", lambda).input("K", k).input("eps", eps).input("beta", beta);
    Ok(DmParamsA::new(lambda, k, eps, beta)?)
}

fn parse_pairs(raw: &[String]) -> Result<Vec<(usize, usize)>, CliError> {
    raw.iter()
        .map(|s| {
            let (x, y) = s
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("pair `{s}` is not of the form x:y")))?;
            let p = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("pair `{s}` has a non-integer state")))
            };
            Ok((p(x)?, p(y)?))
        })
        .collect()
}

pub fn run(a: &ChainArgs) -> Result<String, CliError> {
    let action = match a.action {
        ChainAction::Load => "load",
        ChainAction::Stationary => "stationary",
        ChainAction::Rate => "rate",
        ChainAction::Epsc => "epsc",
        ChainAction::VerifyA => "verify-a",
        ChainAction::VerifyB => "verify-b",
        ChainAction::VerifyBivariate => "verify-bivariate",
        ChainAction::M0 => "m0",
        ChainAction::M1 => "m1",
        ChainAction::FloorA => "floor-a",
        ChainAction::FloorB => "floor-b",
    };
    let mut r = Report::new(format!("chain {action}"));
    // figure1 reads its parameters while building, so skip them here
    let builds_params = a.builtin == Some(Builtin::Figure1);
    let (chain, builtin_spec) = source(a, &mut r)?;
    let tol = a.tol;
    match a.action {
        ChainAction::Load => {
            r.output(
                "load",
                json!({"n_states": chain.n_states(), "labels": chain.labels(), "P": chain.rows()}),
            );
            if let Some(out) = &a.out {
                let text = if out.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
                    io::to_csv_string(&chain)
                } else {
                    io::to_json_string(&chain)
                };
                std::fs::write(out, text)?;
                r.input("out", out.display().to_string());
            }
        }
        ChainAction::Stationary => {
            let st = stationary_distribution(&chain)?;
            let rev = is_reversible(&chain, &st.distribution, tol)?;
            if !st.unique {
                r.warn("several closed classes: the stationary law is not unique");
            }
            if st.distribution.is_trivial_on_support() {
                r.warn("stationary law is a point mass: reversibility and definiteness hold trivially on its support");
            }
            r.output("is_reversible", rev);
            if rev {
                r.output("is_nonneg_definite", is_nonneg_definite(&chain, &st.distribution, tol)?);
            }
            r.output("stationary_distribution", st);
        }
        ChainAction::Rate => {
            let rep = true_rate(&chain)?;
            if !rep.agree {
                r.warn(format!(
                    "spectral rate {} and power estimate {} disagree beyond tolerance",
                    rep.spectral, rep.power
                ));
            }
            r.output("true_rate", rep);
        }
        ChainAction::Epsc => {
            let set = need(a.set.clone(), "--set")?;
            r.input("set", &set);
            r.output("epsilon_c", epsilon_c(&chain, &set)?);
        }
        ChainAction::VerifyA => {
            let spec = match (&a.v, builtin_spec) {
                (Some(v), _) => {
                    let set = need(a.set.clone(), "--set")?;
                    let nu = a.nu.clone().map(Distribution::new).transpose()?;
                    r.input("V", v).input("set", &set).input("nu", &nu);
                    DriftSpecA::new(v.clone(), set, nu)?
                }
                (None, Some(s)) => s,
                (None, None) => return Err(CliError::Usage("missing required flag --v".into())),
            };
            let p = if builds_params {
                DmParamsA::new(need(a.lambda, "--lambda")?, need(a.k, "--K")?, need(a.eps, "--eps")?, a.beta.unwrap_or(1.0))?
            } else if a.builtin == Some(Builtin::TwoState) && a.k.is_none() {
                // the certificate's own parameters
                DmParamsA::new(need(a.lambda, "--lambda")?, 1.0, 1.0, 1.0)?
            } else {
                params_a(a, &mut r)?
            };
            let verdict = verify_a(&chain, &spec, &p, tol)?;
            if verdict.holds() {
                let pi = stationary_distribution(&chain)?.distribution;
                r.output("small_set_mass", pi.mass(&spec.small_set));
                r.output("pic1_stationary_mass_lower", pic1_stationary_mass_lower(p.lambda(), p.k())?);
            }
            r.output("verify_a", verdict);
        }
        ChainAction::VerifyB => {
            let v = a.v.clone().unwrap_or_else(|| vec![0.0; chain.n_states()]);
            let (eta, l, eps, d) = (need(a.eta, "--eta")?, need(a.l, "--L")?, need(a.eps, "--eps")?, need(a.d, "--d")?);
            r.input("V", &v).input("eta", eta).input("L", l).input("eps", eps).input("d", d);
            let spec = DriftSpecB::new(v)?;
            let p = DmParamsB::new(eta, l, eps, d)?;
            let verdict = verify_b(&chain, &spec, &p, tol)?;
            let level = spec.level_set(d);
            let pi = stationary_distribution(&chain)?.distribution;
            r.output("level_set", json!({"states": level, "mass": pi.mass(&level)}));
            r.output("verify_b", verdict);
        }
        ChainAction::VerifyBivariate => {
            let v1 = need(a.v.clone(), "--v")?;
            let v2 = a.v2.clone().unwrap_or_else(|| v1.clone());
            let (lp, kp) = (need(a.lambda_prime, "--lambda-prime")?, need(a.k_prime, "--K-prime")?);
            let pairs = match (&a.pairs, &a.set) {
                (Some(p), _) => parse_pairs(p)?,
                (None, Some(s)) => s.iter().flat_map(|&x| s.iter().map(move |&y| (x, y))).collect(),
                (None, None) => return Err(CliError::Usage("missing required flag --pairs or --set".into())),
            };
            r.input("V1", &v1).input("V2", &v2).input("pairs", &pairs);
            r.input("lambda_prime", lp).input("K_prime", kp);
            let spec = BivariateDriftSpec::new(v1, v2, pairs, lp, kp)?;
            r.output("verify_bivariate", verify_bivariate(&chain, &spec, tol)?);
        }
        ChainAction::M0 => {
            let pi = stationary_distribution(&chain)?.distribution;
            r.output("min_majority_cardinality", min_majority_cardinality(&pi));
        }
        ChainAction::M1 => {
            r.output("max_degree", max_degree(&adjacency(&chain))?);
        }
        ChainAction::FloorA | ChainAction::FloorB => {
            if chain.n_states() > SUBSET_WARN {
                r.warn(format!("enumerating 2^{} subsets", chain.n_states()));
            }
            if a.action == ChainAction::FloorA {
                r.output("chain_floor_a", chain_floor_a(&chain)?);
            } else {
                r.output("chain_floor_b", chain_floor_b(&chain)?);
            }
        }
    }
    r.input("n_states", chain.n_states());
    r.to_json()
}
