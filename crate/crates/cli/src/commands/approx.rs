use lpmix_core::maps::{System, SystemSpec};
use lpmix_core::measure::{
    approximate_by_periodic_symbolic, approximate_by_periodic_torus, bernoulli_approximation, BernoulliApproximation,
    Measure, PeriodicApproximation, TestFamily,
};
use lpmix_core::{Error, Result, TransitionMatrix, Word};
use serde::{Deserialize, Serialize};

use super::{num, Ctx};
use crate::config::ConfigFile;
use crate::output::Table;

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_CYLINDER_DEPTH: usize = 3;
pub const DEFAULT_MODE_NORM: i64 = 3;
pub const DEFAULT_SYMBOLIC_HORIZON: usize = 24;
pub const DEFAULT_TORAL_HORIZON: usize = 30;
pub const DEFAULT_M_MAX: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Periodic,
    Bernoulli,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Input {
    system: SystemSpec,
    target: Measure,
    target_id: Option<String>,
    epsilon: Option<f64>,
    mode: Option<Mode>,
    family: Option<TestFamily>,
    horizon: Option<usize>,
    m_max: Option<usize>,
    p: Option<Word>,
}

#[derive(Debug, Serialize)]
pub struct Config {
    pub system: SystemSpec,
    pub target: Measure,
    pub target_id: String,
    pub epsilon: f64,
    pub mode: Mode,
    pub family: TestFamily,
    /// Largest period scanned.
    pub horizon: usize,
    /// Largest number of loops around `p` in the block presentation (bernoulli mode).
    pub m_max: usize,
    /// Periodic word to start from (bernoulli mode); searched for when absent.
    pub p: Option<Word>,
}

#[derive(Debug, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ApproxResult {
    Periodic(PeriodicApproximation),
    Bernoulli(BernoulliApproximation),
}

pub struct Overrides {
    pub epsilon: Option<f64>,
    pub mode: Option<Mode>,
}

/// Symbolic systems are handled through their transition matrix; the horseshoe through its coding.
fn symbolic_matrix(system: &System) -> Option<TransitionMatrix> {
    match system {
        System::Sft(s) => Some(s.matrix.clone()),
        System::Horseshoe(h) => Some(h.transition_matrix()),
        System::Toral(_) => None,
    }
}

pub fn resolve(cfg: &ConfigFile, o: &Overrides) -> Result<Config> {
    let input: Input = cfg.parse(&["system", "target"])?;
    let system = input.system.build()?;
    let matrix = symbolic_matrix(&system);
    let family = input.family.unwrap_or(match &matrix {
        Some(a) => TestFamily::Cylinders {
            alphabet: a.size(),
            depth: DEFAULT_CYLINDER_DEPTH,
        },
        None => TestFamily::Modes {
            max_norm: DEFAULT_MODE_NORM,
        },
    });
    let horizon = input.horizon.unwrap_or(if matrix.is_some() {
        DEFAULT_SYMBOLIC_HORIZON
    } else {
        DEFAULT_TORAL_HORIZON
    });
    Ok(Config {
        system: input.system,
        target: input.target,
        target_id: input.target_id.unwrap_or_else(|| "target".into()),
        epsilon: o.epsilon.or(input.epsilon).unwrap_or(DEFAULT_EPSILON),
        mode: o.mode.or(input.mode).unwrap_or(Mode::Periodic),
        family,
        horizon,
        m_max: input.m_max.unwrap_or(DEFAULT_M_MAX),
        p: input.p,
    })
}

pub fn approximate(c: &Config) -> Result<ApproxResult> {
    c.target.validate()?;
    if c.epsilon.is_nan() || c.epsilon <= 0.0 {
        return Err(Error::InvalidInput(format!("epsilon {} must be positive", c.epsilon)));
    }
    let system = c.system.build()?;
    let matrix = symbolic_matrix(&system);
    match (c.mode, matrix, &system) {
        (Mode::Periodic, Some(a), _) => Ok(ApproxResult::Periodic(approximate_by_periodic_symbolic(
            &c.target, &a, &c.family, c.epsilon, c.horizon,
        )?)),
        (Mode::Periodic, None, System::Toral(f)) => Ok(ApproxResult::Periodic(approximate_by_periodic_torus(
            &c.target, f, &c.family, c.epsilon, c.horizon,
        )?)),
        (Mode::Bernoulli, Some(a), _) => Ok(ApproxResult::Bernoulli(bernoulli_approximation(
            &c.target,
            &a,
            c.p.as_ref().map(|w| w.symbols()),
            &c.family,
            c.epsilon,
            c.m_max,
            c.horizon,
        )?)),
        _ => Err(Error::InvalidInput(
            "bernoulli mode needs a symbolic system (sft or horseshoe)".into(),
        )),
    }
}

pub fn table(c: &Config, r: &ApproxResult) -> Table {
    let mut t = Table::new(&["target_id", "method", "parameter", "distance"]);
    let id = c.target_id.clone();
    match r {
        ApproxResult::Periodic(p) => {
            t.push(vec![id, "periodic".into(), p.period.to_string(), num(p.distance)]);
        }
        ApproxResult::Bernoulli(b) => {
            t.push(vec![
                id.clone(),
                "periodic".into(),
                b.periodic_word.len().to_string(),
                num(b.periodic_distance),
            ]);
            for row in &b.scan {
                if let Some(d) = row.distance_to_target {
                    t.push(vec![id.clone(), "bernoulli_block".into(), row.m.to_string(), num(d)]);
                }
            }
            t.push(vec![
                id,
                "bernoulli".into(),
                b.chosen_m.to_string(),
                num(b.distance_to_target),
            ]);
        }
    }
    t
}

pub fn run(ctx: &Ctx, cfg: &ConfigFile, o: &Overrides) -> Result<i32> {
    let config = resolve(cfg, o)?;
    let result = approximate(&config)?;
    ctx.emit("approx-measure", &config, &result, &table(&config, &result))?;
    Ok(0)
}
