use lpmix_core::lpp::{check_certificate, lpp_certificate, verify_mixing_from_lpp, LppOutcome, MixingReport};
use lpmix_core::{Result, TransitionMatrix, Word};
use serde::{Deserialize, Serialize};

use super::Ctx;
use crate::config::ConfigFile;
use crate::output::Table;

pub const DEFAULT_EPSILON: f64 = 0.25;
pub const DEFAULT_N_MAX: usize = 60;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Input {
    matrix: TransitionMatrix,
    epsilon: Option<f64>,
    n_max: Option<usize>,
    #[serde(default)]
    pairs: Vec<(Word, Word)>,
}

#[derive(Debug, Serialize)]
pub struct Config {
    pub matrix: TransitionMatrix,
    pub epsilon: f64,
    pub n_max: usize,
    /// Cylinder pairs `(U, V)` whose mixing is derived from the certificate.
    pub pairs: Vec<(Word, Word)>,
}

#[derive(Debug, Serialize)]
pub struct LppResult {
    #[serde(flatten)]
    pub outcome: LppOutcome,
    /// Independent re-check of a certificate.
    pub verified: Option<bool>,
    pub mixing: Option<MixingReport>,
}

pub struct Overrides {
    pub epsilon: Option<f64>,
    pub n_max: Option<usize>,
}

pub fn resolve(cfg: &ConfigFile, o: &Overrides) -> Result<Config> {
    let input: Input = cfg.parse(&["matrix"])?;
    Ok(Config {
        matrix: input.matrix,
        epsilon: o.epsilon.or(input.epsilon).unwrap_or(DEFAULT_EPSILON),
        n_max: o.n_max.or(input.n_max).unwrap_or(DEFAULT_N_MAX),
        pairs: input.pairs,
    })
}

pub fn certify(c: &Config) -> Result<LppResult> {
    let outcome = lpp_certificate(&c.matrix, c.epsilon, c.n_max)?;
    let (verified, mixing) = match outcome.certificate() {
        Some(cert) => {
            let ok = check_certificate(&c.matrix, cert).is_ok();
            let mixing = if c.pairs.is_empty() {
                None
            } else {
                Some(verify_mixing_from_lpp(&c.matrix, cert, &c.pairs)?)
            };
            (Some(ok), mixing)
        }
        None => (None, None),
    };
    Ok(LppResult {
        outcome,
        verified,
        mixing,
    })
}

pub fn table(outcome: &LppOutcome) -> Table {
    let mut t = Table::new(&["outcome", "n", "witness"]);
    match outcome {
        LppOutcome::Certificate(c) => {
            for (n, w) in &c.witnesses {
                t.push(vec!["certificate".into(), n.to_string(), w.to_string()]);
            }
        }
        LppOutcome::Refutation(r) => t.push(vec!["refutation".into(), r.blocking_n.to_string(), String::new()]),
        LppOutcome::Inconclusive(r) => t.push(vec!["inconclusive".into(), r.blocking_n.to_string(), String::new()]),
    }
    t
}

pub fn run(ctx: &Ctx, cfg: &ConfigFile, o: &Overrides) -> Result<i32> {
    let config = resolve(cfg, o)?;
    let result = certify(&config)?;
    ctx.emit("lpp", &config, &result, &table(&result.outcome))?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(rows: &[&[u8]], epsilon: f64, n_max: usize) -> Config {
        Config {
            matrix: TransitionMatrix::from_rows(rows).unwrap(),
            epsilon,
            n_max,
            pairs: vec![(Word(vec![0]), Word(vec![1]))],
        }
    }

    #[test]
    fn full_shift_certificate_with_mixing() {
        let r = certify(&config(&[&[1, 1], &[1, 1]], 0.5, 20)).unwrap();
        assert_eq!(r.outcome.certificate().unwrap().n0, 2);
        assert_eq!(r.verified, Some(true));
        assert!(r.mixing.unwrap().all_hit);
    }

    #[test]
    fn parity_shift_is_refuted() {
        let r = certify(&config(&[&[0, 1], &[1, 0]], 0.5, 20)).unwrap();
        assert!(matches!(r.outcome, LppOutcome::Refutation(_)));
        assert!(r.mixing.is_none());
        assert_eq!(table(&r.outcome).rows.len(), 1);
    }
}
