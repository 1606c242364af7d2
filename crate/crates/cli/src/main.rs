//! `nonadd`: integrals, variation, properties and the theorem suite from the
//! command line.
//!
//! Exit codes: 0 value (or success), 2 divergent, 3 unknown, 1 error or
//! theorem failures, 4 unsupported input.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use nonadd::exact::{to_f64, RatJson};
use nonadd::integrals::{birkhoff_simple, gould_integrate, greedy_chain, rl_integrate, Budget};
use nonadd::literal::{parse_set, LoadedScenario, ScenarioFile};
use nonadd::measures::{atoms, check_properties, variation};
use nonadd::verify::{self, Profile, Scenario, TheoremReport};
use nonadd::{Error, ExtValue, FuncSpec, IntegralVerdict, UPSet};

const BUDGET_ENV: &str = "NONADD_BUDGET";

#[derive(Parser)]
#[command(
    name = "nonadd",
    version,
    about = "Integrals of vector functions against non-additive set functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Engine {
    /// Riemann–Lebesgue
    Rl,
    /// Birkhoff simple
    Bs,
    Gould,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the scenario's function; exit 0 value, 2 divergent, 3 unknown.
    Integrate {
        file: PathBuf,
        #[arg(long, value_enum)]
        engine: Option<Engine>,
        /// Integrate over this set instead of the whole ground.
        #[arg(long)]
        set: Option<String>,
        /// Probe budget overrides, e.g. `depth=20,chains=8`.
        #[arg(long)]
        budget: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Print the full verdict as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Variation m̄(E) of the scenario's measure.
    Variation {
        file: PathBuf,
        #[arg(long)]
        set: Option<String>,
    },
    /// Decide or probe the measure properties.
    Properties { file: PathBuf },
    /// List the atoms of a measure on a finite ground.
    Atoms { file: PathBuf },
    /// Run the theorem suite over generated and file scenarios.
    Verify {
        /// Generator profile; repeatable. Defaults to the standard mix.
        #[arg(long = "profile")]
        profiles: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scenarios per profile.
        #[arg(long, default_value_t = 50)]
        count: usize,
        /// Scenario file to include; repeatable.
        #[arg(long = "scenario")]
        scenarios: Vec<PathBuf>,
        /// Include every `*.json` scenario in this directory.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Write the full JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Re-run the check recorded in a failure witness.
    Replay { witness: PathBuf },
    /// σ along the divergence-search refinement chain, as CSV.
    Trace {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "gould")]
        engine: Engine,
        #[arg(long)]
        budget: Option<String>,
        /// Output path; stdout when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

const DEFAULT_PROFILES: [&str; 7] = [
    "finite:6",
    "finite-monotone:6",
    "finite-subadditive:6",
    "finite-additive:6",
    "finite-ordered:6",
    "omega",
    "null-support",
];

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let unsupported = e.chain().any(|c| {
                matches!(
                    c.downcast_ref::<Error>(),
                    Some(
                        Error::UnsupportedFamily(_)
                            | Error::UnsupportedGround(_)
                            | Error::LimitExceeded { .. }
                    )
                )
            });
            ExitCode::from(if unsupported { 4 } else { 1 })
        }
    }
}

fn run(cmd: Command) -> anyhow::Result<u8> {
    match cmd {
        Command::Integrate {
            file,
            engine,
            set,
            budget,
            tol,
            seed,
            json,
        } => {
            let s = load(&file)?;
            let engine = match (engine, s.options.engine.as_deref()) {
                (Some(e), _) => e,
                (None, Some(name)) => Engine::from_str(name, true)
                    .map_err(|_| anyhow::anyhow!("unknown engine {name:?} in scenario options"))?,
                (None, None) => Engine::Rl,
            };
            let mut b = budget_for(&s, budget.as_deref())?;
            if let Some(t) = tol {
                if !(t > 0.0) {
                    bail!("--tol must be positive");
                }
                b.tol = t;
            }
            if let Some(x) = seed {
                b.seed = x;
            }
            let f = function(&s)?;
            let set = set.or_else(|| s.options.set.clone());
            let a = match &set {
                Some(lit) => parse_set(lit, s.ground)?,
                None => s.ground.full_set(),
            };
            // the integral over A is the integral of f·χ_A for bs and gould
            let restricted;
            let fa = if set.is_some() && engine != Engine::Rl {
                restricted = f.mul_indicator(&a)?;
                &restricted
            } else {
                f
            };
            let verdict = match engine {
                Engine::Rl => rl_integrate(f, &s.m, &a)?,
                Engine::Bs => birkhoff_simple(fa, &s.m)?,
                Engine::Gould => gould_integrate(fa, &s.m, &b)?,
            };
            if json {
                print_json(&verdict.to_json())?;
            } else {
                print_summary(&verdict)?;
            }
            Ok(verdict.exit_code() as u8)
        }
        Command::Variation { file, set } => {
            let s = load(&file)?;
            let set = set.or_else(|| s.options.set.clone());
            let e = match &set {
                Some(lit) => parse_set(lit, s.ground)?,
                None => s.ground.full_set(),
            };
            let v = variation(&s.m, &e)?;
            print_json(&json!({"set": e.to_string(), "variation": ext_json(&v)}))?;
            Ok(0)
        }
        Command::Properties { file } => {
            let s = load(&file)?;
            print_json(&check_properties(&s.m).to_json())?;
            Ok(0)
        }
        Command::Atoms { file } => {
            let s = load(&file)?;
            let list: Vec<String> = atoms(&s.m)?.iter().map(UPSet::to_string).collect();
            print_json(&json!({ "atoms": list }))?;
            Ok(0)
        }
        Command::Verify {
            profiles,
            seed,
            count,
            scenarios,
            corpus,
            report,
        } => cmd_verify(profiles, seed, count, scenarios, corpus, report),
        Command::Replay { witness } => {
            let text = fs::read_to_string(&witness)
                .with_context(|| format!("reading {}", witness.display()))?;
            let w: Json = serde_json::from_str(&text).context("witness is not JSON")?;
            match verify::replay(&w)? {
                verify::Replay::Reproduced => {
                    println!("reproduced");
                    Ok(0)
                }
                verify::Replay::Mismatch(why) => {
                    println!("mismatch: {why}");
                    Ok(1)
                }
            }
        }
        Command::Trace {
            file,
            engine,
            budget,
            csv,
        } => {
            if engine != Engine::Gould {
                bail!("trace follows finite refinement chains; only --engine gould is supported");
            }
            let s = load(&file)?;
            let b = budget_for(&s, budget.as_deref())?;
            let f = function(&s)?;
            let steps = greedy_chain(f, &s.m, &b)?;
            let out: Box<dyn Write> = match &csv {
                Some(p) => Box::new(
                    fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
                ),
                None => Box::new(io::stdout().lock()),
            };
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["step".to_string(), "k_blocks".to_string()];
            header.extend((0..f.dim()).map(|i| format!("sigma_{i}")));
            header.push("radius".into());
            w.write_record(&header)?;
            for st in &steps {
                let mut row = vec![st.step.to_string(), st.k_blocks().to_string()];
                row.extend(st.sigma.iter().map(|r| r.to_f64().to_string()));
                let rad = st.sigma.iter().map(|r| to_f64(r.rad())).fold(0.0, f64::max);
                row.push(rad.to_string());
                w.write_record(&row)?;
            }
            w.flush()?;
            Ok(0)
        }
    }
}

fn load(path: &Path) -> anyhow::Result<LoadedScenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = ScenarioFile::parse(&text).with_context(|| format!("in {}", path.display()))?;
    Ok(file
        .load()
        .with_context(|| format!("in {}", path.display()))?)
}

fn function(s: &LoadedScenario) -> anyhow::Result<&FuncSpec> {
    s.f.as_ref().context("scenario has no function")
}

/// Defaults, then `NONADD_BUDGET`, then the scenario's options, then the flag.
fn budget_for(s: &LoadedScenario, flag: Option<&str>) -> anyhow::Result<Budget> {
    let mut b = Budget::default();
    if let Some(seed) = s.options.seed {
        b.seed = seed;
    }
    if let Ok(env) = std::env::var(BUDGET_ENV) {
        b = b
            .with_overrides(&env)
            .with_context(|| format!("in ${BUDGET_ENV}"))?;
    }
    for spec in [s.options.budget.as_deref(), flag].into_iter().flatten() {
        b = b.with_overrides(spec)?;
    }
    Ok(b)
}

fn ext_json(v: &ExtValue) -> Json {
    match v {
        ExtValue::Infinite => json!("inf"),
        ExtValue::Finite(r) => {
            let mut out = serde_json::to_value(RatJson::from(r.mid())).expect("plain struct");
            if !r.is_exact() {
                out["radius"] = json!(to_f64(r.rad()));
            }
            out
        }
    }
}

fn print_json(v: &Json) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn print_summary(v: &IntegralVerdict) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    match v {
        IntegralVerdict::Value { value, route, .. } => {
            let parts: Vec<String> = value
                .iter()
                .map(|r| nonadd::exact::decimal(r.mid()))
                .collect();
            writeln!(
                out,
                "value [{}] radius {:e}",
                parts.join(", "),
                to_f64(&v.radius())
            )?;
            writeln!(out, "route: {route}")?;
        }
        IntegralVerdict::Divergent { reason, .. } => writeln!(out, "divergent: {reason}")?,
        IntegralVerdict::Unknown { reason, .. } => writeln!(out, "unknown: {reason}")?,
    }
    Ok(())
}

fn cmd_verify(
    profiles: Vec<String>,
    seed: u64,
    count: usize,
    files: Vec<PathBuf>,
    corpus: Option<PathBuf>,
    report: Option<PathBuf>,
) -> anyhow::Result<u8> {
    let names: Vec<String> = if profiles.is_empty() {
        DEFAULT_PROFILES.iter().map(|s| s.to_string()).collect()
    } else {
        profiles
    };
    let parsed: Vec<Profile> = names
        .iter()
        .map(|p| p.parse::<Profile>())
        .collect::<Result<_, _>>()?;
    let mut scenarios: Vec<Scenario> = parsed
        .iter()
        .flat_map(|&p| verify::gen_scenarios(p, count, seed))
        .collect();
    // generated indices restart per profile; renumber so reports are unambiguous
    for (i, s) in scenarios.iter_mut().enumerate() {
        s.index = i;
    }
    let mut paths = files;
    if let Some(dir) = &corpus {
        let mut found: Vec<PathBuf> = fs::read_dir(dir)
            .with_context(|| format!("reading {}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        found.sort();
        paths.extend(found);
    }
    for p in &paths {
        let loaded = load(p)?;
        if loaded.f.is_none() {
            continue;
        }
        let index = scenarios.len();
        scenarios.push(
            Scenario::from_loaded(&loaded, index).with_context(|| format!("in {}", p.display()))?,
        );
    }
    let reports = verify::run_all_on(&scenarios);
    print_table(&reports)?;
    let failures = verify::total_failures(&reports);
    if let Some(path) = report {
        let meta = json!({
            "seed": seed,
            "count": count,
            "profiles": names,
            "files": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            "generator": verify::GENERATOR_VERSION,
            "scenarios": scenarios.len(),
        });
        let text = serde_json::to_string_pretty(&verify::reports_to_json(&reports, meta))?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if failures == 0 { 0 } else { 1 })
}

fn print_table(reports: &[TheoremReport]) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{:<28} {:>5} {:>6} {:>6} {:>6}",
        "theorem", "run", "pass", "fail", "skip"
    )?;
    for r in reports {
        writeln!(
            out,
            "{:<28} {:>5} {:>6} {:>6} {:>6}",
            r.theorem.name(),
            r.run,
            r.passes,
            r.failures.len(),
            r.skips.len()
        )?;
    }
    writeln!(out, "failures: {}", verify::total_failures(reports))?;
    Ok(())
}
