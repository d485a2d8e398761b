use lpmix_core::sft::CyclicDecomposition;
use lpmix_core::{Result, TransitionMatrix};
use serde::{Deserialize, Serialize};

use super::Ctx;
use crate::config::ConfigFile;
use crate::output::Table;

pub const DEFAULT_MAX_PERIOD: usize = 10;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Input {
    matrix: TransitionMatrix,
    #[serde(default)]
    max_period: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct Config {
    pub matrix: TransitionMatrix,
    pub max_period: usize,
}

#[derive(Debug, Serialize)]
pub struct CountRow {
    pub n: usize,
    pub count: u128,
}

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub size: usize,
    pub irreducible: bool,
    pub primitive: bool,
    pub class_period: Option<usize>,
    pub decomposition: Option<CyclicDecomposition>,
    pub entropy: f64,
    pub periodic_counts: Vec<CountRow>,
}

pub fn resolve(cfg: &ConfigFile, max_period: Option<usize>) -> Result<Config> {
    // a bare matrix file is accepted as well
    let input: Input = if cfg.value.get("rows").is_some() {
        Input {
            matrix: cfg.parse(&[])?,
            max_period: None,
        }
    } else {
        cfg.parse(&["matrix"])?
    };
    Ok(Config {
        matrix: input.matrix,
        max_period: max_period.or(input.max_period).unwrap_or(DEFAULT_MAX_PERIOD),
    })
}

/// Entropy of the largest irreducible piece; a reducible matrix has no single Perron root.
fn entropy(a: &TransitionMatrix) -> Result<f64> {
    if a.is_irreducible() {
        return a.topological_entropy();
    }
    let g = a.digraph();
    let mut seen = vec![false; a.size()];
    let mut best = 0.0f64;
    for v in 0..a.size() {
        if seen[v] {
            continue;
        }
        let comp = g.component_of(v);
        for &u in &comp {
            seen[u] = true;
        }
        // a single symbol without a loop carries no entropy and is not essential on its own
        if let Ok(sub) = a.restrict(&comp) {
            best = best.max(sub.topological_entropy()?);
        }
    }
    Ok(best)
}

pub fn analyze(c: &Config) -> Result<Analysis> {
    let a = &c.matrix;
    let irreducible = a.is_irreducible();
    let (class_period, decomposition) = if irreducible {
        (Some(a.class_period()?), Some(a.cyclic_decomposition()?))
    } else {
        (None, None)
    };
    let periodic_counts = (1..=c.max_period)
        .map(|n| {
            Ok(CountRow {
                n,
                count: a.count_periodic_points(n)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Analysis {
        size: a.size(),
        irreducible,
        primitive: a.is_primitive(),
        class_period,
        decomposition,
        entropy: entropy(a)?,
        periodic_counts,
    })
}

pub fn run(ctx: &Ctx, cfg: &ConfigFile, max_period: Option<usize>) -> Result<i32> {
    let config = resolve(cfg, max_period)?;
    let result = analyze(&config)?;
    let mut table = Table::new(&["n", "count"]);
    for row in &result.periodic_counts {
        table.push(vec![row.n.to_string(), row.count.to_string()]);
    }
    ctx.emit("analyze", &config, &result, &table)?;
    Ok(0)
}
