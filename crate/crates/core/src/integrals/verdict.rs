use num::{Signed, Zero};
use serde_json::{json, Value as Json};

use super::sigma::sigma_finite;
use super::FuncSpec;
use crate::error::Result;
use crate::exact::{to_f64, RatJson, Real, Q};
use crate::measures::{singleton_series, DivergenceCert, MeasureSpec, SeriesSum};
use crate::setalg::{Partition, TaggedPartition};

/// One tagged finite partition of a refinement chain and its `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainStep {
    pub step: usize,
    pub partition: Partition,
    pub tags: Vec<usize>,
    pub sigma: Vec<Real>,
}

impl ChainStep {
    pub fn k_blocks(&self) -> usize {
        self.partition.blocks().len()
    }

    pub fn to_json(&self) -> Json {
        json!({
            "step": self.step,
            "k_blocks": self.k_blocks(),
            "partition": self.partition.to_json(),
            "tags": self.tags,
            "sigma": self.sigma.iter().map(|r| RatJson::from(r.mid())).collect::<Vec<_>>(),
            "radius": max_radius_f64(&self.sigma),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// A refinement chain along which `‖σ‖_∞` grows by at least `min_increment`
    /// at every step.
    Chain {
        steps: Vec<ChainStep>,
        min_increment: Q,
    },
    /// The singleton series of coordinate `component` is not absolutely convergent.
    Series {
        component: usize,
        cert: DivergenceCert,
    },
}

impl Certificate {
    /// Recomputes everything the certificate claims.
    pub fn replay(&self, f: &FuncSpec, m: &MeasureSpec) -> Result<bool> {
        match self {
            Certificate::Chain {
                steps,
                min_increment,
            } => {
                if steps.len() < 2 || !min_increment.is_positive() {
                    return Ok(false);
                }
                for (i, s) in steps.iter().enumerate() {
                    if s.step != i || !s.partition.is_finite() {
                        return Ok(false);
                    }
                    let Ok(tp) = TaggedPartition::new(s.partition.clone(), s.tags.clone()) else {
                        return Ok(false);
                    };
                    if sigma_finite(f, &tp, m)? != s.sigma {
                        return Ok(false);
                    }
                }
                for w in steps.windows(2) {
                    if !w[1].partition.is_refinement_of(&w[0].partition) {
                        return Ok(false);
                    }
                    let grow = &norm_lower(&w[1].sigma) - &norm_upper(&w[0].sigma);
                    if &grow < min_increment {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Certificate::Series { component, cert } => {
                let Some(c) = f.comps().get(*component) else {
                    return Ok(false);
                };
                let tol = Q::new(1.into(), 1_000_000_000_000i64.into());
                Ok(matches!(singleton_series(m, c, &tol)?, SeriesSum::Diverges(d) if &d == cert))
            }
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Certificate::Chain { steps, .. } => {
                Json::Array(steps.iter().map(ChainStep::to_json).collect())
            }
            Certificate::Series { component, cert } => json!([{
                "component": component,
                "start": cert.start,
                "period": cert.period,
                "increment": RatJson::from(&cert.increment),
                "checkpoints": cert.checkpoints.iter().map(|(n, s, a)| json!({
                    "n": n,
                    "partial": RatJson::from(s),
                    "abs_partial": RatJson::from(a),
                })).collect::<Vec<_>>(),
            }]),
        }
    }
}

/// Lower bound on `‖v‖_∞`.
pub(crate) fn norm_lower(v: &[Real]) -> Q {
    v.iter()
        .map(|r| {
            let (lo, hi) = (r.lower(), r.upper());
            if lo > Q::zero() {
                lo
            } else if hi < Q::zero() {
                -hi
            } else {
                Q::zero()
            }
        })
        .max()
        .unwrap_or_else(Q::zero)
}

/// Upper bound on `‖v‖_∞`.
pub(crate) fn norm_upper(v: &[Real]) -> Q {
    v.iter()
        .map(|r| {
            let (lo, hi) = (r.lower(), r.upper());
            if -&lo > hi {
                -lo
            } else {
                hi
            }
        })
        .max()
        .unwrap_or_else(Q::zero)
}

pub(crate) fn max_radius(v: &[Real]) -> Q {
    v.iter()
        .map(|r| r.rad().clone())
        .max()
        .unwrap_or_else(Q::zero)
}

fn max_radius_f64(v: &[Real]) -> f64 {
    to_f64(&max_radius(v))
}

/// Empirical check run alongside a value.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub kind: &'static str,
    pub trials: usize,
    pub depth: usize,
    /// Allowed deviation from the value.
    pub eps: f64,
    pub max_deviation: f64,
}

impl ProbeReport {
    fn to_json(&self) -> Json {
        json!({
            "kind": self.kind,
            "trials": self.trials,
            "depth": self.depth,
            "eps": self.eps,
            "max_deviation": self.max_deviation,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum IntegralVerdict {
    Value {
        value: Vec<Real>,
        abs_convergent: bool,
        route: String,
        probe: Option<ProbeReport>,
    },
    Divergent {
        certificate: Certificate,
        reason: String,
    },
    Unknown {
        sigma_min: Vec<f64>,
        sigma_max: Vec<f64>,
        steps: usize,
        reason: String,
    },
}

impl IntegralVerdict {
    pub fn status(&self) -> &'static str {
        match self {
            IntegralVerdict::Value { .. } => "value",
            IntegralVerdict::Divergent { .. } => "divergent",
            IntegralVerdict::Unknown { .. } => "unknown",
        }
    }

    pub fn value(&self) -> Option<&[Real]> {
        match self {
            IntegralVerdict::Value { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn radius(&self) -> Q {
        self.value().map(max_radius).unwrap_or_else(Q::zero)
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            IntegralVerdict::Divergent { certificate, .. } => Some(certificate),
            _ => None,
        }
    }

    /// 0 value, 2 divergent, 3 unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            IntegralVerdict::Value { .. } => 0,
            IntegralVerdict::Divergent { .. } => 2,
            IntegralVerdict::Unknown { .. } => 3,
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            IntegralVerdict::Value {
                value,
                abs_convergent,
                route,
                probe,
            } => {
                let mut out = json!({
                    "status": "value",
                    "value": value.iter().map(|r| RatJson::from(r.mid())).collect::<Vec<_>>(),
                    "radius": max_radius_f64(value),
                    "abs_convergent": abs_convergent,
                    "route": route,
                });
                if let Some(p) = probe {
                    out["probe"] = p.to_json();
                }
                out
            }
            IntegralVerdict::Divergent {
                certificate,
                reason,
            } => json!({
                "status": "divergent",
                "reason": reason,
                "certificate": certificate.to_json(),
            }),
            IntegralVerdict::Unknown {
                sigma_min,
                sigma_max,
                steps,
                reason,
            } => json!({
                "status": "unknown",
                "reason": reason,
                "sigma_min": sigma_min,
                "sigma_max": sigma_max,
                "steps": steps,
            }),
        }
    }
}
