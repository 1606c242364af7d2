use super::verdict::{Certificate, IntegralVerdict, ProbeReport};
use super::{series_tol, FuncSpec};
use crate::error::Result;
use crate::exact::{to_f64, Real};
use crate::measures::{singleton_series, MeasureSpec, SeriesSum};
use crate::setalg::UPSet;

const SINGLETON_ROUTE: &str = "singleton series: all singletons is the finest countable partition";

/// Per-coordinate singleton series of `f·χ_A`, or the first divergence.
fn series_of(
    f: &FuncSpec,
    m: &MeasureSpec,
    a: &UPSet,
) -> Result<std::result::Result<Vec<(Real, Real)>, IntegralVerdict>> {
    f.ground().same_as(&m.ground())?;
    f.ground().check(a)?;
    let tol = series_tol();
    let mut out = Vec::with_capacity(f.dim());
    for (i, comp) in f.comps().iter().enumerate() {
        match singleton_series(m, &comp.mul_indicator(a), &tol)? {
            SeriesSum::Converges(v) => out.push((v.value, v.abs)),
            SeriesSum::Diverges(cert) => {
                return Ok(Err(IntegralVerdict::Divergent {
                    reason: format!(
                        "the singleton series of coordinate {i} is not absolutely convergent"
                    ),
                    certificate: Certificate::Series { component: i, cert },
                }))
            }
        }
    }
    Ok(Ok(out))
}

/// Riemann–Lebesgue integral of `f` over `A`.
///
/// On a countable ground the integral exists iff `Σ_{t∈A} f(t)·m({t})`
/// converges absolutely, and then equals it.
pub fn rl_integrate(f: &FuncSpec, m: &MeasureSpec, a: &UPSet) -> Result<IntegralVerdict> {
    Ok(match series_of(f, m, a)? {
        Ok(terms) => IntegralVerdict::Value {
            value: terms.into_iter().map(|(v, _)| v).collect(),
            abs_convergent: true,
            route: SINGLETON_ROUTE.into(),
            probe: None,
        },
        Err(v) => v,
    })
}

/// Birkhoff simple integral of `f` over the ground.
///
/// Same singleton series as [`rl_integrate`]; unconditional convergence is
/// absolute convergence in finite dimension. Rearranged partial sums are
/// probed against the remainder bound as a consistency check.
pub fn birkhoff_simple(f: &FuncSpec, m: &MeasureSpec) -> Result<IntegralVerdict> {
    let all = m.ground().full_set();
    let terms = match series_of(f, m, &all)? {
        Ok(t) => t,
        Err(v) => return Ok(v),
    };
    let probe = reorder_probe(f, m, &terms);
    let value: Vec<Real> = terms.into_iter().map(|(v, _)| v).collect();
    if probe.max_deviation > probe.eps {
        return Ok(IntegralVerdict::Unknown {
            sigma_min: value.iter().map(Real::to_f64).collect(),
            sigma_max: value.iter().map(Real::to_f64).collect(),
            steps: probe.trials,
            reason: format!(
                "rearranged partial sums deviate by {:e}, above the bound {:e}",
                probe.max_deviation, probe.eps
            ),
        });
    }
    Ok(IntegralVerdict::Value {
        value,
        abs_convergent: true,
        route: SINGLETON_ROUTE.into(),
        probe: Some(probe),
    })
}

const PROBE_SLACK: f64 = 1e-9;
const PROBE_MAX_TERMS: usize = 1 << 16;

/// Partial sums of rearranged singleton series stay within the mass of the
/// terms not yet used.
fn reorder_probe(f: &FuncSpec, m: &MeasureSpec, terms: &[(Real, Real)]) -> ProbeReport {
    let n_max = match m.ground().size() {
        Some(n) => n,
        None => {
            let abs_totals: Vec<f64> = terms
                .iter()
                .map(|(_, a)| a.to_f64() + to_f64(a.rad()))
                .collect();
            // enough terms that the unused mass is below the slack
            let mut n = 0;
            let mut acc = vec![0.0; f.dim()];
            while n < PROBE_MAX_TERMS {
                let w = m.eval_f64(&UPSet::singleton(n));
                for (x, v) in acc.iter_mut().zip(f.at_f64(n)) {
                    *x += v.abs() * w;
                }
                n += 1;
                if acc
                    .iter()
                    .zip(&abs_totals)
                    .all(|(x, t)| t - x <= PROBE_SLACK / 4.0)
                {
                    break;
                }
            }
            n
        }
    };
    let weights: Vec<f64> = (0..n_max)
        .map(|n| m.eval_f64(&UPSet::singleton(n)))
        .collect();
    let orders: [Vec<usize>; 2] = [window_reversal(n_max, 8), interleave(n_max)];
    let mut max_dev: f64 = 0.0;
    let mut eps: f64 = PROBE_SLACK;
    for (i, comp) in f.comps().iter().enumerate() {
        let b = terms[i].0.to_f64();
        let abs_total = terms[i].1.to_f64() + to_f64(terms[i].1.rad());
        let rad = to_f64(terms[i].0.rad());
        let vals: Vec<f64> = (0..n_max)
            .map(|n| to_f64(&comp.at(n)) * weights[n])
            .collect();
        for order in &orders {
            let (mut s, mut used) = (0.0, 0.0);
            for (k, &n) in order.iter().enumerate() {
                s += vals[n];
                used += vals[n].abs();
                if k % 16 == 15 || k + 1 == order.len() {
                    let allowed = (abs_total - used).max(0.0) + rad + PROBE_SLACK;
                    let dev = (s - b).abs();
                    eps = eps.max(allowed);
                    max_dev = max_dev.max(dev - allowed + PROBE_SLACK);
                }
            }
        }
    }
    ProbeReport {
        kind: "rearrangement",
        trials: 2 * f.dim(),
        depth: n_max,
        eps: PROBE_SLACK,
        max_deviation: max_dev.max(0.0).min(eps),
    }
}

fn window_reversal(n: usize, w: usize) -> Vec<usize> {
    (0..n)
        .step_by(w)
        .flat_map(|s| (s..(s + w).min(n)).rev())
        .collect()
}

/// Two even indices, then one odd index, until both run out.
fn interleave(n: usize) -> Vec<usize> {
    let mut evens = (0..n).step_by(2);
    let mut odds = (1..n).step_by(2);
    let mut out = Vec::with_capacity(n);
    loop {
        let a = evens.next();
        let b = evens.next();
        let c = odds.next();
        if a.is_none() && c.is_none() {
            break;
        }
        out.extend([a, b, c].into_iter().flatten());
    }
    out
}

/// Sanity guard used by tests: `|x| <= y` in floating point.
#[cfg(test)]
fn within(x: f64, y: f64) -> bool {
    x.abs() <= y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qi, Q};
    use crate::measures::{CardClass, Family, PointMass};
    use crate::setalg::GroundModel;
    use num::{One, Zero};

    const OMEGA: GroundModel = GroundModel::Omega;

    fn half_geometric() -> MeasureSpec {
        MeasureSpec::new(
            OMEGA,
            Family::PointMass(PointMass::geometric(q(1, 2), q(1, 2))),
        )
        .unwrap()
    }

    #[test]
    fn example_measure_rl_and_bs_are_zero() {
        let m = MeasureSpec::finite_null_example();
        let one = FuncSpec::constant(OMEGA, vec![Q::one()]);
        for v in [
            rl_integrate(&one, &m, &UPSet::all()).unwrap(),
            birkhoff_simple(&one, &m).unwrap(),
        ] {
            assert_eq!(v.value(), Some(&[Real::zero()][..]));
            assert!(v.radius().is_zero());
        }
    }

    #[test]
    fn zero_function() {
        let z = FuncSpec::zero(OMEGA, 2);
        let v = rl_integrate(&z, &half_geometric(), &UPSet::all()).unwrap();
        assert_eq!(v.value(), Some(&[Real::zero(), Real::zero()][..]));
    }

    #[test]
    fn evens_indicator_gives_two_thirds() {
        let f = FuncSpec::indicator(OMEGA, &UPSet::evens());
        let v = rl_integrate(&f, &half_geometric(), &UPSet::all()).unwrap();
        assert_eq!(v.value(), Some(&[Real::exact(q(2, 3))][..]));
        // same value restricting the constant function to the evens
        let one = FuncSpec::constant(OMEGA, vec![Q::one()]);
        let w = rl_integrate(&one, &half_geometric(), &UPSet::evens()).unwrap();
        assert_eq!(v, w);
    }

    #[test]
    fn alternating_sign_matches_direct_series() {
        let f = FuncSpec::periodic(vec![], vec![vec![qi(1)], vec![qi(-1)]]).unwrap();
        let m = half_geometric();
        let bs = birkhoff_simple(&f, &m).unwrap();
        let rl = rl_integrate(&f, &m, &UPSet::all()).unwrap();
        // oracle: Σ_{n<200} (-1)^n 2^-(n+1)
        let direct: f64 = (0..200)
            .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 } * 0.5f64.powi(n + 1))
            .sum();
        assert!(within(rl.value().unwrap()[0].to_f64() - direct, 1e-15));
        assert_eq!(bs.value(), rl.value());
    }

    #[test]
    fn divergent_singleton_series() {
        let m = MeasureSpec::new(
            OMEGA,
            Family::CardinalityClass(CardClass {
                finite: vec![Q::zero(), Q::one()],
                infinite: Q::zero(),
            }),
        )
        .unwrap();
        let f = FuncSpec::constant(OMEGA, vec![Q::one()]);
        let v = rl_integrate(&f, &m, &UPSet::all()).unwrap();
        assert_eq!(v.exit_code(), 2);
        assert!(v.certificate().unwrap().replay(&f, &m).unwrap());
        assert_eq!(birkhoff_simple(&f, &m).unwrap().status(), "divergent");
    }

    #[test]
    fn reorderings_are_permutations() {
        for n in [0, 1, 7, 8, 30] {
            let mut a = window_reversal(n, 8);
            let mut b = interleave(n);
            a.sort();
            b.sort();
            assert_eq!(a, (0..n).collect::<Vec<_>>());
            assert_eq!(b, (0..n).collect::<Vec<_>>());
        }
    }
}
