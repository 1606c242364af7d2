//! Tagged sums and the integral engines.

mod func;
mod gould;
mod indefinite;
mod rl;
mod sigma;
mod verdict;

use std::str::FromStr;

pub use func::FuncSpec;
pub use gould::{gould_integrate, greedy_chain};
pub use indefinite::{indefinite, IndefiniteIntegral};
pub use rl::{birkhoff_simple, rl_integrate};
pub use sigma::{sigma_sum, SigmaSum};
pub(crate) use verdict::{norm_lower, norm_upper};
pub use verdict::{Certificate, ChainStep, IntegralVerdict, ProbeReport};

use crate::error::{Error, Result};
use crate::exact::Q;

/// Tolerance for singleton series summed numerically.
pub(crate) fn series_tol() -> Q {
    Q::new(1.into(), 1_000_000_000_000i64.into())
}

/// Limits for the Gould probes and divergence search.
#[derive(Clone, Debug, PartialEq)]
pub struct Budget {
    /// Refinement steps per chain.
    pub depth: usize,
    /// Random chains in the Cauchy probe.
    pub chains: usize,
    /// Largest split factor a random move may use.
    pub arity: usize,
    /// Blocks with a larger period are not split further.
    pub period_cap: usize,
    pub seed: u64,
    pub tol: f64,
    /// Tag blocks at random elements instead of their minimum.
    pub random_tags: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            depth: 12,
            chains: 64,
            arity: 8,
            period_cap: 1024,
            seed: 0,
            tol: 1e-9,
            random_tags: false,
        }
    }
}

impl Budget {
    /// Applies `key=value` overrides separated by commas, e.g. `depth=20,chains=8`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("budget item `{item}` is not key=value")))?;
            let bad = |e: &dyn std::fmt::Display| Error::Parse(format!("budget {k}: {e}"));
            match k.trim() {
                "depth" => self.depth = v.trim().parse().map_err(|e| bad(&e))?,
                "chains" => self.chains = v.trim().parse().map_err(|e| bad(&e))?,
                "arity" => self.arity = v.trim().parse().map_err(|e| bad(&e))?,
                "period_cap" => self.period_cap = v.trim().parse().map_err(|e| bad(&e))?,
                "seed" => self.seed = v.trim().parse().map_err(|e| bad(&e))?,
                "tol" => self.tol = v.trim().parse().map_err(|e| bad(&e))?,
                "random_tags" => self.random_tags = v.trim().parse().map_err(|e| bad(&e))?,
                other => return Err(Error::Parse(format!("unknown budget key `{other}`"))),
            }
        }
        if self.arity < 2 || !(self.tol > 0.0) {
            return Err(Error::Parse("budget needs arity >= 2 and tol > 0".into()));
        }
        Ok(self)
    }
}

impl FromStr for Budget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Budget::default().with_overrides(s)
    }
}
