//! Large periods certificates for the horseshoe before and after changing its rates.

use lpmix_core::lpp::{lpp_certificate, LppOutcome};
use lpmix_core::maps::{Horseshoe, SmoothSystem, SystemSpec};
use lpmix_core::{Error, Result, TransitionMatrix};
use serde::{Deserialize, Serialize};

use super::{opt, Ctx};
use crate::config::ConfigFile;
use crate::output::Table;

pub const DEFAULT_EPSILON: f64 = 0.25;
pub const DEFAULT_N_MAX: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rates {
    pub contraction: f64,
    pub expansion: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Input {
    system: SystemSpec,
    perturbed: Option<Rates>,
    magnitude: Option<f64>,
    epsilon: Option<f64>,
    n_max: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct Config {
    pub system: SystemSpec,
    /// Present when the perturbation was derived from `perturbed` rates directly.
    pub magnitude: Option<f64>,
    /// `(c(1+t), e(1-t))` for magnitude `t`.
    pub perturbed: Rates,
    pub epsilon: f64,
    pub n_max: usize,
}

#[derive(Debug, Serialize)]
pub struct Side {
    pub rates: Rates,
    pub hyperbolicity_constant: f64,
    pub transition_matrix: TransitionMatrix,
    pub outcome: LppOutcome,
}

#[derive(Debug, Serialize)]
pub struct PerturbResult {
    pub before: Side,
    pub after: Side,
    pub both_certified: bool,
    pub same_n0: bool,
    pub identical: bool,
}

pub struct Overrides {
    pub magnitude: Option<f64>,
    pub epsilon: Option<f64>,
}

pub fn resolve(cfg: &ConfigFile, o: &Overrides) -> Result<Config> {
    let input: Input = cfg.parse(&["system"])?;
    let SystemSpec::Horseshoe { contraction, expansion } = input.system else {
        return Err(Error::InvalidInput("perturb-smoke runs on the horseshoe model".into()));
    };
    let magnitude = o.magnitude.or(input.magnitude);
    let (magnitude, perturbed) = match (magnitude, input.perturbed) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidInput(
                "give either magnitude or perturbed rates, not both".into(),
            ))
        }
        (None, Some(r)) => (None, r),
        (t, None) => {
            let t = t.unwrap_or(0.0);
            let r = Rates {
                contraction: contraction * (1.0 + t),
                expansion: expansion * (1.0 - t),
            };
            (Some(t), r)
        }
    };
    Ok(Config {
        system: input.system,
        magnitude,
        perturbed,
        epsilon: o.epsilon.or(input.epsilon).unwrap_or(DEFAULT_EPSILON),
        n_max: input.n_max.unwrap_or(DEFAULT_N_MAX),
    })
}

fn side(r: Rates, epsilon: f64, n_max: usize) -> Result<Side> {
    let h = Horseshoe::new(r.contraction, r.expansion)?;
    let a = h.transition_matrix();
    Ok(Side {
        rates: r,
        hyperbolicity_constant: h.hyperbolicity_constant(),
        outcome: lpp_certificate(&a, epsilon, n_max)?,
        transition_matrix: a,
    })
}

pub fn compare(c: &Config) -> Result<PerturbResult> {
    let SystemSpec::Horseshoe { contraction, expansion } = c.system else {
        return Err(Error::InvalidInput("perturb-smoke runs on the horseshoe model".into()));
    };
    let before = side(Rates { contraction, expansion }, c.epsilon, c.n_max)?;
    let after = side(c.perturbed, c.epsilon, c.n_max)?;
    let n0 = |s: &Side| s.outcome.certificate().map(|x| x.n0);
    Ok(PerturbResult {
        both_certified: before.outcome.is_certificate() && after.outcome.is_certificate(),
        same_n0: n0(&before).is_some() && n0(&before) == n0(&after),
        identical: before.outcome == after.outcome,
        before,
        after,
    })
}

pub fn run(ctx: &Ctx, cfg: &ConfigFile, o: &Overrides) -> Result<i32> {
    let config = resolve(cfg, o)?;
    let result = compare(&config)?;
    let mut table = Table::new(&["phase", "contraction", "expansion", "certified", "N0"]);
    for (phase, s) in [("before", &result.before), ("after", &result.after)] {
        table.push(vec![
            phase.into(),
            super::num(s.rates.contraction),
            super::num(s.rates.expansion),
            s.outcome.is_certificate().to_string(),
            opt(s.outcome.certificate().map(|c| c.n0)),
        ]);
    }
    ctx.emit("perturb-smoke", &config, &result, &table)?;
    Ok(0)
}
