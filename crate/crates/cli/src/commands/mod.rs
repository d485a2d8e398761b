pub mod analyze;
pub mod approx;
pub mod lpp;
pub mod perturb;
pub mod shadow;

use std::path::PathBuf;

use lpmix_core::Result;
use serde::Serialize;

use crate::output::{self, Format, Report, Table, Versions};

/// Where and how a command writes its report.
pub struct Ctx {
    pub out: PathBuf,
    pub format: Format,
    pub seed: u64,
}

impl Ctx {
    pub fn emit<C: Serialize, R: Serialize>(&self, command: &str, config: &C, result: &R, table: &Table) -> Result<()> {
        let report = Report {
            command,
            versions: Versions::current(),
            seed: self.seed,
            config,
            result,
        };
        for path in output::write(&self.out, self.format, &report, table)? {
            println!("{}", path.display());
        }
        Ok(())
    }
}

/// Shortest round-trip decimal form, as in the JSON report.
pub(crate) fn num(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}

pub(crate) fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
