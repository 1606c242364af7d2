//! Seeded theorem suite over generated scenarios.
//!
//! Each theorem check first decides its hypotheses with the measure and
//! function machinery (never from scenario labels) and skips with a reason
//! when they fail. Equalities are exact on finite grounds and enclosure
//! consistent on `ℕ`; inequalities fail only when certainly violated.

mod checks;
mod gen;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value as Json};

pub use checks::Outcome;
pub use gen::{gen_one, gen_scenarios, Profile, GENERATOR_VERSION, MAX_PROFILE_N};

use crate::error::{Error, Result};
use crate::exact::{q_from_json, q_to_json, qi, Q};
use crate::integrals::FuncSpec;
use crate::literal::{
    func_from_json, func_to_json, ground_from_json, ground_to_json, measure_from_json,
    measure_to_json, parse_set, LoadedScenario,
};
use crate::measures::MeasureSpec;
use crate::setalg::{GroundModel, UPSet};

/// Inputs shared by every theorem check.
///
/// `f`, `g`, `h` share ground and dimension. `a` and `b` are disjoint.
/// `m2` is the second measure for the sum and order theorems.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub index: usize,
    pub seed: u64,
    pub profile: String,
    pub m: MeasureSpec,
    pub m2: Option<MeasureSpec>,
    pub f: FuncSpec,
    pub g: FuncSpec,
    pub h: FuncSpec,
    pub alpha: Q,
    pub beta: Q,
    pub a: UPSet,
    pub b: UPSet,
}

impl Scenario {
    pub fn ground(&self) -> GroundModel {
        self.m.ground()
    }

    /// Exact rationals on finite grounds, enclosures on `ℕ`.
    pub fn arithmetic(&self) -> &'static str {
        if self.ground().is_finite() {
            "exact"
        } else {
            "enclosure"
        }
    }

    pub fn to_json(&self) -> Json {
        json!({
            "index": self.index,
            "seed": self.seed,
            "profile": self.profile,
            "generator": GENERATOR_VERSION,
            "arithmetic": self.arithmetic(),
            "ground": ground_to_json(self.ground()),
            "measure": measure_to_json(&self.m),
            "measure2": self.m2.as_ref().map(measure_to_json),
            "f": func_to_json(&self.f),
            "g": func_to_json(&self.g),
            "h": func_to_json(&self.h),
            "alpha": q_to_json(&self.alpha),
            "beta": q_to_json(&self.beta),
            "a": self.a.to_string(),
            "b": self.b.to_string(),
        })
    }

    pub fn from_json(v: &Json) -> Result<Scenario> {
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::Parse(format!("scenario needs {k}")))
        };
        let ground = ground_from_json(field("ground")?)?;
        let func = |k: &str| func_from_json(field(k)?, ground);
        let set = |k: &str| {
            let s = field(k)?
                .as_str()
                .ok_or_else(|| Error::Parse(format!("{k} must be a set literal")))?;
            parse_set(s, ground)
        };
        let m2 = match v.get("measure2") {
            None | Some(Json::Null) => None,
            Some(m) => Some(measure_from_json(m, ground)?),
        };
        let s = Scenario {
            index: field("index")?.as_u64().unwrap_or(0) as usize,
            seed: field("seed")?.as_u64().unwrap_or(0),
            profile: field("profile")?.as_str().unwrap_or("").to_string(),
            m: measure_from_json(field("measure")?, ground)?,
            m2,
            f: func("f")?,
            g: func("g")?,
            h: func("h")?,
            alpha: q_from_json(field("alpha")?)?,
            beta: q_from_json(field("beta")?)?,
            a: set("a")?,
            b: set("b")?,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        for x in [&self.g, &self.h] {
            self.f.sub(x)?;
        }
        self.ground().same_as(&self.f.ground())?;
        if let Some(m2) = &self.m2 {
            self.ground().same_as(&m2.ground())?;
        }
        if !self.a.is_disjoint(&self.b) {
            return Err(Error::InvalidSpec(
                "scenario sets a and b must be disjoint".into(),
            ));
        }
        Ok(())
    }

    /// A scenario built from a scenario file: `g` and `h` default to zero,
    /// `a` to the file's set option and `b` to its complement.
    pub fn from_loaded(s: &LoadedScenario, index: usize) -> Result<Scenario> {
        let f =
            s.f.clone()
                .ok_or_else(|| Error::InvalidSpec("scenario file has no function".into()))?;
        let zero = FuncSpec::zero(s.ground, f.dim());
        let g = s.g.clone().unwrap_or_else(|| zero.clone());
        let a = match &s.options.set {
            Some(lit) => parse_set(lit, s.ground)?,
            None => UPSet::empty(),
        };
        let sc = Scenario {
            index,
            seed: s.options.seed.unwrap_or(0),
            profile: format!("corpus:{}", s.name.as_deref().unwrap_or("unnamed")),
            m: s.m.clone(),
            m2: s.m2.clone(),
            f,
            h: g.clone(),
            g,
            alpha: qi(2),
            beta: qi(-1),
            b: s.ground.complement(&a),
            a,
        };
        sc.validate()?;
        Ok(sc)
    }
}

/// The theorem checks, in report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremId {
    Restriction,
    Bound,
    NullAe,
    Linearity,
    Additivity,
    AeEqual,
    MeasureSum,
    Lipschitz,
    MonotoneF,
    MonotoneM,
    AbsContFinVar,
    OContExhaustive,
    MonotoneIf,
    RlImpliesBs,
    GouldEqRl,
    Counterexample,
    SubmeasureEquiv,
    AtomFinite,
}

impl TheoremId {
    pub const ALL: [TheoremId; 18] = [
        TheoremId::Restriction,
        TheoremId::Bound,
        TheoremId::NullAe,
        TheoremId::Linearity,
        TheoremId::Additivity,
        TheoremId::AeEqual,
        TheoremId::MeasureSum,
        TheoremId::Lipschitz,
        TheoremId::MonotoneF,
        TheoremId::MonotoneM,
        TheoremId::AbsContFinVar,
        TheoremId::OContExhaustive,
        TheoremId::MonotoneIf,
        TheoremId::RlImpliesBs,
        TheoremId::GouldEqRl,
        TheoremId::Counterexample,
        TheoremId::SubmeasureEquiv,
        TheoremId::AtomFinite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Restriction => "restriction",
            TheoremId::Bound => "sup-bound",
            TheoremId::NullAe => "null-ae",
            TheoremId::Linearity => "linearity",
            TheoremId::Additivity => "additivity",
            TheoremId::AeEqual => "ae-equal",
            TheoremId::MeasureSum => "measure-sum",
            TheoremId::Lipschitz => "lipschitz",
            TheoremId::MonotoneF => "monotone-in-f",
            TheoremId::MonotoneM => "monotone-in-m",
            TheoremId::AbsContFinVar => "abscont-finvar",
            TheoremId::OContExhaustive => "ocont-exhaustive",
            TheoremId::MonotoneIf => "monotone-indefinite",
            TheoremId::RlImpliesBs => "rl-implies-bs",
            TheoremId::GouldEqRl => "gould-eq-rl",
            TheoremId::Counterexample => "counterexample",
            TheoremId::SubmeasureEquiv => "submeasure-equiv",
            TheoremId::AtomFinite => "atom-finite",
        }
    }

    /// What a pass actually establishes, where that is weaker than the statement.
    pub fn note(self) -> Option<&'static str> {
        match self {
            TheoremId::AbsContFinVar => Some("verified via dominating bound ‖I_f(A)‖ ≤ ‖f‖∞·m̄(A)"),
            TheoremId::OContExhaustive => Some(
                "necessary-condition probe: I_f along tails [2^k, ∞) and along the disjoint classes 2^k−1 mod 2^(k+1), k ≤ 8",
            ),
            TheoremId::AtomFinite => Some("finite grounds only, where both sides reduce to the singleton sum"),
            TheoremId::GouldEqRl | TheoremId::SubmeasureEquiv => {
                Some("Gould value from rule dispatch, cross-checked by random refinement chains")
            }
            _ => None,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown theorem id {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FailureRecord {
    pub index: usize,
    pub seed: u64,
    /// The scenario and the values that disagreed; see [`replay`].
    pub witness: Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkipRecord {
    pub index: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub run: usize,
    pub passes: usize,
    pub failures: Vec<FailureRecord>,
    pub skips: Vec<SkipRecord>,
}

impl TheoremReport {
    pub fn checked(&self) -> usize {
        self.passes + self.failures.len()
    }

    pub fn to_json(&self) -> Json {
        let mut out = json!({
            "theorem": self.theorem.name(),
            "run": self.run,
            "passes": self.passes,
            "failures": self.failures.iter().map(|f| json!({
                "index": f.index,
                "seed": f.seed,
                "witness": f.witness,
            })).collect::<Vec<_>>(),
            "skips": self.skips.iter().map(|s| json!({
                "index": s.index,
                "reason": s.reason,
            })).collect::<Vec<_>>(),
        });
        if let Some(n) = self.theorem.note() {
            out["note"] = json!(n);
        }
        out
    }
}

pub fn run_check(theorem: TheoremId, scenarios: &[Scenario]) -> TheoremReport {
    let outcomes: Vec<Outcome> = scenarios
        .par_iter()
        .map(|s| checks::check(theorem, s))
        .collect();
    let mut report = TheoremReport {
        theorem,
        run: scenarios.len(),
        passes: 0,
        failures: Vec::new(),
        skips: Vec::new(),
    };
    for (s, o) in scenarios.iter().zip(outcomes) {
        match o {
            Outcome::Pass => report.passes += 1,
            Outcome::Skip(reason) => report.skips.push(SkipRecord {
                index: s.index,
                reason,
            }),
            Outcome::Fail(detail) => report.failures.push(FailureRecord {
                index: s.index,
                seed: s.seed,
                witness: json!({
                    "theorem": theorem.name(),
                    "scenario": s.to_json(),
                    "detail": detail,
                }),
            }),
        }
    }
    report
}

/// Every theorem over the same scenarios.
pub fn run_all_on(scenarios: &[Scenario]) -> Vec<TheoremReport> {
    TheoremId::ALL
        .par_iter()
        .map(|&t| run_check(t, scenarios))
        .collect()
}

/// Every theorem over `count` scenarios from each profile.
pub fn run_all(profiles: &[Profile], count: usize, seed: u64) -> Vec<TheoremReport> {
    let scenarios: Vec<Scenario> = profiles
        .iter()
        .flat_map(|&p| gen_scenarios(p, count, seed))
        .collect();
    run_all_on(&scenarios)
}

pub fn total_failures(reports: &[TheoremReport]) -> usize {
    reports.iter().map(|r| r.failures.len()).sum()
}

pub fn reports_to_json(reports: &[TheoremReport], meta: Json) -> Json {
    json!({
        "meta": meta,
        "failures": total_failures(reports),
        "theorems": reports.iter().map(TheoremReport::to_json).collect::<Vec<_>>(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Replay {
    /// Re-running the check on the witness fails again.
    Reproduced,
    /// The witness does not fail the check: it was altered or is stale.
    Mismatch(String),
}

/// Re-runs the check recorded in a failure witness.
pub fn replay(witness: &Json) -> Result<Replay> {
    replay_with(witness, checks::check)
}

fn replay_with(witness: &Json, check: impl Fn(TheoremId, &Scenario) -> Outcome) -> Result<Replay> {
    let theorem: TheoremId = witness
        .get("theorem")
        .and_then(Json::as_str)
        .ok_or_else(|| Error::Parse("witness needs a theorem id".into()))?
        .parse()?;
    let scenario = Scenario::from_json(
        witness
            .get("scenario")
            .ok_or_else(|| Error::Parse("witness needs a scenario".into()))?,
    )?;
    Ok(match check(theorem, &scenario) {
        Outcome::Fail(detail) if Some(&detail) == witness.get("detail") => Replay::Reproduced,
        Outcome::Fail(detail) => Replay::Mismatch(format!("fails with different values: {detail}")),
        Outcome::Pass => Replay::Mismatch("the check passes on this scenario".into()),
        Outcome::Skip(r) => Replay::Mismatch(format!("the check skips this scenario: {r}")),
    })
}
