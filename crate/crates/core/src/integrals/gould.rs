use num::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::sigma::sigma_finite;
use super::verdict::{
    norm_lower, norm_upper, Certificate, ChainStep, IntegralVerdict, ProbeReport,
};
use super::{rl_integrate, Budget, FuncSpec};
use crate::error::Result;
use crate::exact::{to_f64, ExtValue, Q};
use crate::measures::{check_properties, variation, MeasureSpec, Property};
use crate::setalg::{Partition, SplitStrategy, UPSet};

/// Largest singleton head the Cauchy probe will build.
const PROBE_HEAD_LIMIT: usize = 1 << 16;
const PROBE_SLACK: f64 = 1e-9;

/// Gould integral over the net of finite partitions.
///
/// Three stages: closed cases and the rules under which the Gould and
/// Riemann–Lebesgue integrals coincide (cross-checked by a Cauchy probe);
/// a greedy refinement chain looking for unbounded `σ`; otherwise `Unknown`
/// with the range of `σ` seen.
pub fn gould_integrate(f: &FuncSpec, m: &MeasureSpec, budget: &Budget) -> Result<IntegralVerdict> {
    f.ground().same_as(&m.ground())?;
    let all = m.ground().full_set();

    if f.is_zero() {
        return Ok(IntegralVerdict::Value {
            value: vec![crate::exact::Real::zero(); f.dim()],
            abs_convergent: true,
            route: "f is zero, so every σ(P) is zero".into(),
            probe: None,
        });
    }
    if m.ground().is_finite() {
        let mut v = rl_integrate(f, m, &all)?;
        if let IntegralVerdict::Value { route, .. } = &mut v {
            *route = "finite ground: the all-singletons partition is the finest".into();
        }
        return Ok(v);
    }

    if let Some(route) = dispatch_route(m) {
        if let IntegralVerdict::Value {
            value,
            abs_convergent,
            ..
        } = rl_integrate(f, m, &all)?
        {
            let a: Vec<f64> = value.iter().map(|r| r.to_f64()).collect();
            let rad = to_f64(&super::verdict::max_radius(&value));
            return Ok(match cauchy_probe(f, m, &a, budget)? {
                Some(probe) if probe.max_deviation <= budget.tol + rad + PROBE_SLACK => IntegralVerdict::Value {
                    value,
                    abs_convergent,
                    route: route.into(),
                    probe: Some(probe),
                },
                Some(probe) => IntegralVerdict::Unknown {
                    sigma_min: a.clone(),
                    sigma_max: a,
                    steps: probe.trials * probe.depth,
                    reason: format!(
                        "Cauchy probe deviates by {:e} from the dispatched value",
                        probe.max_deviation
                    ),
                },
                None => IntegralVerdict::Unknown {
                    sigma_min: a.clone(),
                    sigma_max: a,
                    steps: 0,
                    reason: format!(
                        "no singleton head of length <= {PROBE_HEAD_LIMIT} brings the tail below the tolerance"
                    ),
                },
            });
        }
    }

    let steps = greedy_chain(f, m, budget)?;
    let min_increment = steps
        .windows(2)
        .map(|w| &norm_lower(&w[1].sigma) - &norm_upper(&w[0].sigma))
        .min();
    match min_increment {
        Some(d) if d > Q::zero() && steps.len() >= 3 => Ok(IntegralVerdict::Divergent {
            reason: format!(
                "‖σ‖ grows by at least {} at each of {} refinements",
                crate::exact::decimal(&d),
                steps.len() - 1
            ),
            certificate: Certificate::Chain {
                steps,
                min_increment: d,
            },
        }),
        _ => {
            let d = f.dim();
            let mut lo = vec![f64::INFINITY; d];
            let mut hi = vec![f64::NEG_INFINITY; d];
            for s in &steps {
                for (i, r) in s.sigma.iter().enumerate() {
                    lo[i] = lo[i].min(to_f64(&r.lower()));
                    hi[i] = hi[i].max(to_f64(&r.upper()));
                }
            }
            Ok(IntegralVerdict::Unknown {
                sigma_min: lo,
                sigma_max: hi,
                steps: steps.len(),
                reason: "no rule applies and the refinement search found no unbounded growth"
                    .into(),
            })
        }
    }
}

/// Why the Gould integral equals the Riemann–Lebesgue one for `m`, if it does.
fn dispatch_route(m: &MeasureSpec) -> Option<&'static str> {
    let finite_var = matches!(
        variation(m, &m.ground().full_set()),
        Ok(ExtValue::Finite(_))
    );
    if !finite_var {
        return None;
    }
    let props = check_properties(m);
    if props.proved(Property::SigmaAdditive) {
        Some("σ-additive with finite variation: Gould equals Riemann–Lebesgue")
    } else if props.proved(Property::Monotone) && props.proved(Property::SigmaSubadditive) {
        Some("monotone, σ-subadditive, finite variation: Gould equals Riemann–Lebesgue")
    } else {
        None
    }
}

/// Random refinement chains starting from a partition `P_ε` fine enough that
/// every refinement has `‖σ(P) − a‖ ≤ tol`. Returns `None` if no such `P_ε`
/// of the form `{0}, .., {K−1}, [K, ∞)` was found.
fn cauchy_probe(
    f: &FuncSpec,
    m: &MeasureSpec,
    a: &[f64],
    budget: &Budget,
) -> Result<Option<ProbeReport>> {
    let two_sup = 2.0 * to_f64(&f.sup_norm());
    let mut k = 1usize;
    loop {
        let tail = match variation(m, &UPSet::tail(k))? {
            ExtValue::Finite(v) => to_f64(&v.upper()),
            ExtValue::Infinite => f64::INFINITY,
        };
        if two_sup * tail <= budget.tol {
            break;
        }
        if k >= PROBE_HEAD_LIMIT {
            return Ok(None);
        }
        k *= 2;
    }
    let mut base = vec![0.0; f.dim()];
    for n in 0..k {
        let w = m.eval_f64(&UPSet::singleton(n));
        for (b, v) in base.iter_mut().zip(f.at_f64(n)) {
            *b += v * w;
        }
    }
    let worst = (0..budget.chains)
        .into_par_iter()
        .map(|chain| {
            let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
            rng.set_stream(chain as u64);
            probe_chain(f, m, a, &base, k, budget, &mut rng)
        })
        .reduce(|| 0.0, f64::max);
    Ok(Some(ProbeReport {
        kind: "cauchy",
        trials: budget.chains,
        depth: budget.depth,
        eps: budget.tol,
        max_deviation: worst,
    }))
}

fn probe_chain(
    f: &FuncSpec,
    m: &MeasureSpec,
    a: &[f64],
    base: &[f64],
    k: usize,
    budget: &Budget,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let mut blocks: Vec<(UPSet, f64)> = vec![(UPSet::tail(k), m.eval_f64(&UPSet::tail(k)))];
    let mut worst: f64 = 0.0;
    for step in 0..=budget.depth {
        if step > 0 && !refine_once(&mut blocks, m, budget, rng) {
            break;
        }
        let mut sigma = base.to_vec();
        for (b, mb) in &blocks {
            let t = pick_tag(b, budget, rng);
            for (s, v) in sigma.iter_mut().zip(f.at_f64(t)) {
                *s += v * mb;
            }
        }
        let dev = sigma
            .iter()
            .zip(a)
            .map(|(s, x)| (s - x).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
    }
    worst
}

fn pick_tag(b: &UPSet, budget: &Budget, rng: &mut ChaCha8Rng) -> usize {
    if budget.random_tags {
        *b.first_k(budget.arity)
            .choose(rng)
            .expect("blocks are non-empty")
    } else {
        b.min_element().expect("blocks are non-empty")
    }
}

/// Splits one random block; false once every block is a singleton.
fn refine_once(
    blocks: &mut Vec<(UPSet, f64)>,
    m: &MeasureSpec,
    budget: &Budget,
    rng: &mut ChaCha8Rng,
) -> bool {
    let open: Vec<usize> = (0..blocks.len())
        .filter(|&i| blocks[i].0.cardinality() != Some(1))
        .collect();
    let Some(&i) = open.choose(rng) else {
        return false;
    };
    let block = &blocks[i].0;
    let strategy = match rng.gen_range(0..3) {
        0 => SplitStrategy::IntoKInfinite(rng.gen_range(2..=budget.arity)),
        1 => SplitStrategy::ByResidue(rng.gen_range(2..=budget.arity)),
        _ => SplitStrategy::SplitOffFinite(rng.gen_range(1..=budget.arity)),
    };
    let small = split_period(block, strategy) <= budget.period_cap
        && residue_pieces(block, strategy) <= budget.arity;
    let pieces = small
        .then(|| Partition::split_block_pieces(block, strategy))
        .flatten()
        .or_else(|| Partition::split_block_pieces(block, SplitStrategy::SplitOffFinite(1)))
        .expect("a block with two elements can shed its minimum");
    blocks.swap_remove(i);
    blocks.extend(pieces.into_iter().map(|p| {
        let v = m.eval_f64(&p);
        (p, v)
    }));
    true
}

/// Pieces of the periodic part a residue split produces; other moves make at
/// most `k` pieces.
fn residue_pieces(block: &UPSet, strategy: SplitStrategy) -> usize {
    match strategy {
        SplitStrategy::ByResidue(k) => k * block.pattern().iter().filter(|&&b| b).count(),
        _ => 0,
    }
}

/// Period of the pieces `strategy` would produce, without building them.
fn split_period(block: &UPSet, strategy: SplitStrategy) -> usize {
    let p = block.period();
    match strategy {
        SplitStrategy::ByResidue(k) => k * p,
        SplitStrategy::IntoKInfinite(k) => {
            let per_period = block.pattern().iter().filter(|&&b| b).count();
            p * (k / num::integer::gcd(per_period.max(1), k))
        }
        SplitStrategy::SplitOffFinite(_) => p,
    }
}

const GREEDY_MOVES: [SplitStrategy; 3] = [
    SplitStrategy::IntoKInfinite(2),
    SplitStrategy::ByResidue(2),
    SplitStrategy::SplitOffFinite(1),
];

/// Refinement chain from `{T}` that at each step takes the single-block split
/// with the largest `‖σ‖`, preferring smaller periods on ties. Blocks are
/// tagged at their minimum.
pub fn greedy_chain(f: &FuncSpec, m: &MeasureSpec, budget: &Budget) -> Result<Vec<ChainStep>> {
    f.ground().same_as(&m.ground())?;
    let start = Partition::trivial(m.ground(), m.ground().full_set())?;
    let tp = start.clone().with_min_tags();
    let mut steps = vec![ChainStep {
        step: 0,
        sigma: sigma_finite(f, &tp, m)?,
        tags: tp.tags().to_vec(),
        partition: start,
    }];
    for step in 1..=budget.depth {
        let current = &steps.last().expect("chain starts non-empty").partition;
        let mut best: Option<(Q, usize, ChainStep)> = None;
        for strategy in GREEDY_MOVES {
            for (i, b) in current.blocks().iter().enumerate() {
                let period = split_period(b, strategy);
                if period > budget.period_cap {
                    continue;
                }
                let Some(pieces) = Partition::split_block_pieces(b, strategy) else {
                    continue;
                };
                let tp = current.replace_block(i, pieces).with_min_tags();
                let sigma = sigma_finite(f, &tp, m)?;
                let score = norm_lower(&sigma);
                let better = match &best {
                    None => true,
                    Some((s, p, _)) => score > *s || (score == *s && period < *p),
                };
                if better {
                    best = Some((
                        score,
                        period,
                        ChainStep {
                            step,
                            tags: tp.tags().to_vec(),
                            partition: tp.partition().clone(),
                            sigma,
                        },
                    ));
                }
            }
        }
        match best {
            Some((_, _, s)) => steps.push(s),
            None => break,
        }
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi, Real};
    use crate::measures::{CardClass, Concave, Family, PointMass};
    use crate::setalg::GroundModel;
    use num::One;

    const OMEGA: GroundModel = GroundModel::Omega;

    fn one() -> FuncSpec {
        FuncSpec::constant(OMEGA, vec![Q::one()])
    }

    #[test]
    fn example_measure_diverges_with_sigma_one_to_k() {
        let m = MeasureSpec::finite_null_example();
        let v = gould_integrate(&one(), &m, &Budget::default()).unwrap();
        let Some(Certificate::Chain { steps, .. }) = v.certificate() else {
            panic!("expected a chain, got {v:?}");
        };
        let sig: Vec<Real> = steps.iter().map(|s| s.sigma[0].clone()).collect();
        let expect: Vec<Real> = (1..=13).map(|k| Real::exact(qi(k))).collect();
        assert_eq!(sig, expect);
        // σ(P) is the number of blocks, all infinite
        assert!(steps.iter().all(|s| s.k_blocks() == s.step + 1));
        assert!(v.certificate().unwrap().replay(&one(), &m).unwrap());
    }

    #[test]
    fn geometric_point_mass_gives_one() {
        let m = MeasureSpec::new(
            OMEGA,
            Family::PointMass(PointMass::geometric(q(1, 2), q(1, 2))),
        )
        .unwrap();
        let v = gould_integrate(&one(), &m, &Budget::default()).unwrap();
        assert_eq!(v.value(), Some(&[Real::exact(Q::one())][..]));
        let IntegralVerdict::Value { probe: Some(p), .. } = &v else {
            panic!("{v:?}")
        };
        assert!(p.max_deviation <= 1e-9);
    }

    #[test]
    fn sqrt_distortion_matches_truncated_series() {
        let m = MeasureSpec::new(
            OMEGA,
            Family::Distortion {
                g: Concave::Sqrt,
                base: PointMass::geometric(q(1, 4), q(1, 4)),
            },
        )
        .unwrap();
        let f = FuncSpec::periodic(vec![vec![qi(2)]], vec![vec![qi(1)], vec![q(-1, 3)]]).unwrap();
        let v = gould_integrate(&f, &m, &Budget::default()).unwrap();
        // oracle: √(4^-(n+1)) = 2^-(n+1); Σ_{n<60} f(n)·2^-(n+1)
        let direct: f64 = (0..60)
            .map(|n| to_f64(&f.at(n)[0]) * 0.5f64.powi(n as i32 + 1))
            .sum();
        let got = v.value().expect("value")[0].to_f64();
        assert!((got - direct).abs() <= 1e-9, "{got} vs {direct}");
    }

    #[test]
    fn zero_function_and_finite_ground() {
        let m = MeasureSpec::finite_null_example();
        let z = FuncSpec::zero(OMEGA, 2);
        assert_eq!(
            gould_integrate(&z, &m, &Budget::default())
                .unwrap()
                .value()
                .unwrap()
                .len(),
            2
        );
        let t = MeasureSpec::table_from(3, |s| {
            Q::from_integer((s.count_ones() as i64).pow(2).into())
        })
        .unwrap();
        let f = FuncSpec::table(vec![vec![qi(1)], vec![qi(2)], vec![qi(3)]]).unwrap();
        let v = gould_integrate(&f, &t, &Budget::default()).unwrap();
        assert_eq!(v.value(), Some(&[Real::exact(qi(6))][..]));
    }

    #[test]
    fn divergent_cardinality_class_certificate_replays() {
        let m = MeasureSpec::new(
            OMEGA,
            Family::CardinalityClass(CardClass {
                finite: vec![qi(0), qi(0), qi(1)],
                infinite: qi(1),
            }),
        )
        .unwrap();
        let v = gould_integrate(&one(), &m, &Budget::default()).unwrap();
        assert_eq!(v.status(), "divergent");
        assert!(v.certificate().unwrap().replay(&one(), &m).unwrap());
    }

    #[test]
    fn probe_is_deterministic() {
        let m = MeasureSpec::new(
            OMEGA,
            Family::PointMass(PointMass::geometric(q(1, 3), q(2, 3))),
        )
        .unwrap();
        let f = FuncSpec::periodic(vec![], vec![vec![qi(1)], vec![qi(-2)], vec![q(1, 2)]]).unwrap();
        let b = Budget::default();
        assert_eq!(
            gould_integrate(&f, &m, &b).unwrap(),
            gould_integrate(&f, &m, &b).unwrap()
        );
    }
}
