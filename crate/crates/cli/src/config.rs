use std::path::Path;

use anyhow::{bail, Context, Result};
use classrank::Budgets;
use serde::Deserialize;

/// Contents of the optional TOML config file. Every field may be omitted.
///
/// ```toml
/// workers = 4
/// seed = 7
///
/// [budgets]
/// factor_iterations = 2000000
/// class_group_disc = 100000000
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    #[serde(default)]
    pub budgets: BudgetOverrides,
}

#[derive(Debug, Default, Clone, Copy, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct BudgetOverrides {
    /// Pollard rho iterations per composite cofactor.
    #[arg(long, global = true)]
    pub factor_iterations: Option<u64>,
    /// Largest |D| for which class groups are computed.
    #[arg(long, global = true)]
    pub class_group_disc: Option<u64>,
    /// Largest field size for point counting.
    #[arg(long, global = true)]
    pub point_count: Option<u64>,
    /// Largest number of Mumford pairs visited by Jacobian enumeration.
    #[arg(long, global = true)]
    pub enumeration: Option<u64>,
}

impl BudgetOverrides {
    fn apply(&self, b: &mut Budgets) {
        if let Some(v) = self.factor_iterations {
            b.factor_iterations = v;
        }
        if let Some(v) = self.class_group_disc {
            b.class_group_disc = v;
        }
        if let Some(v) = self.point_count {
            b.point_count = v;
        }
        if let Some(v) = self.enumeration {
            b.enumeration = v;
        }
    }
}

/// Resolved settings. Precedence: defaults, then the config file, then
/// `CLASSRANK_BUDGET`, then command-line flags.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub budgets: Budgets,
    pub workers: Option<usize>,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 1;

impl RunConfig {
    pub fn resolve(
        path: Option<&Path>,
        flags: &BudgetOverrides,
        workers: Option<usize>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                toml::from_str::<FileConfig>(&text).with_context(|| format!("parsing {}", p.display()))?
            }
            None => FileConfig::default(),
        };
        let mut budgets = Budgets::default();
        file.budgets.apply(&mut budgets);
        budgets = budgets.with_env_override();
        flags.apply(&mut budgets);
        let b = budgets;
        if [b.factor_iterations, b.class_group_disc, b.point_count, b.enumeration].contains(&0) {
            bail!("budgets must be positive");
        }
        let workers = workers.or(file.workers);
        if workers == Some(0) {
            bail!("workers must be positive");
        }
        Ok(RunConfig { budgets, workers, seed: seed.or(file.seed).unwrap_or(DEFAULT_SEED) })
    }
}
