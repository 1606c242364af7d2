use nonadd::exact::{q, qi};
use nonadd::measures::{
    check_properties, variation, variation_dp, CardClass, Concave, Family, PointMass, Property,
};
use nonadd::{ExtValue, GroundModel, MeasureSpec, UPSet, Q};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Q> {
    (0i64..12, 1i64..5).prop_map(|(n, d)| q(n, d))
}

fn any_table(max_n: usize) -> impl Strategy<Value = (usize, Vec<Q>)> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(rat(), 1 << n).prop_map(move |mut v| {
            v[0] = Q::from_integer(0.into());
            (n, v)
        })
    })
}

/// `max(μ1, μ2)` for two additive measures: monotone and subadditive.
fn subadditive_table(max_n: usize) -> impl Strategy<Value = (usize, Vec<Q>)> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(rat(), n),
            prop::collection::vec(rat(), n),
        )
            .prop_map(move |(w1, w2)| {
                let mass = |w: &[Q], s: usize| -> Q {
                    (0..n)
                        .filter(|i| s >> i & 1 == 1)
                        .map(|i| w[i].clone())
                        .sum()
                };
                let v = (0..1usize << n)
                    .map(|s| mass(&w1, s).max(mass(&w2, s)))
                    .collect();
                (n, v)
            })
    })
}

fn additive_table(max_n: usize) -> impl Strategy<Value = (usize, Vec<Q>)> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(rat(), n).prop_map(move |w| {
            let v = (0..1usize << n)
                .map(|s| {
                    (0..n)
                        .filter(|i| s >> i & 1 == 1)
                        .map(|i| w[i].clone())
                        .sum()
                })
                .collect();
            (n, v)
        })
    })
}

/// Restricted-growth enumeration of the set partitions of `elems`.
fn partitions_of(elems: &[usize]) -> Vec<Vec<u64>> {
    fn go(elems: &[usize], i: usize, blocks: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == elems.len() {
            out.push(blocks.clone());
            return;
        }
        let bit = 1u64 << elems[i];
        for b in 0..blocks.len() {
            blocks[b] |= bit;
            go(elems, i + 1, blocks, out);
            blocks[b] &= !bit;
        }
        blocks.push(bit);
        go(elems, i + 1, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(elems, 0, &mut Vec::new(), &mut out);
    out
}

fn brute_variation(values: &[Q], mask: u64) -> Q {
    let elems: Vec<usize> = (0..64).filter(|i| mask >> i & 1 == 1).collect();
    partitions_of(&elems)
        .iter()
        .map(|p| p.iter().map(|&b| values[b as usize].clone()).sum::<Q>())
        .max()
        .unwrap_or_default()
}

fn var(m: &MeasureSpec, mask: u64) -> Q {
    match variation(m, &UPSet::from_mask(mask)).unwrap() {
        ExtValue::Finite(r) => {
            assert!(r.is_exact());
            r.mid().clone()
        }
        ExtValue::Infinite => panic!("finite table with infinite variation"),
    }
}

fn disjoint_pairs(n: usize) -> impl Iterator<Item = (u64, u64)> {
    let full = (1u64 << n) - 1;
    (0..=full).flat_map(move |a| {
        let rest = full ^ a;
        let mut subs = Vec::new();
        let mut b = rest;
        loop {
            subs.push((a, b));
            if b == 0 {
                break;
            }
            b = (b - 1) & rest;
        }
        subs
    })
}

fn omega_family() -> impl Strategy<Value = Family> {
    let geom = (0i64..4, 1i64..4, 2i64..6)
        .prop_map(|(c, rn, rd)| PointMass::geometric(qi(c), q(rn.min(rd - 1), rd)));
    let leaf = prop_oneof![
        geom.clone().prop_map(Family::PointMass),
        (prop::collection::vec(0i64..4, 1..4), 0i64..4).prop_map(|(fin, inf)| {
            let mut finite: Vec<Q> = fin.into_iter().map(qi).collect();
            finite[0] = qi(0);
            Family::CardinalityClass(CardClass {
                finite,
                infinite: qi(inf),
            })
        }),
        geom.prop_map(|base| Family::Distortion {
            g: Concave::Sqrt,
            base
        }),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Family::Sum(Box::new(a), Box::new(b))),
            (rat(), inner).prop_map(|(k, f)| Family::Scale(k, Box::new(f))),
        ]
    })
}

fn small_set() -> impl Strategy<Value = UPSet> {
    (
        prop::collection::vec(any::<bool>(), 0..5),
        prop::collection::vec(any::<bool>(), 1..4),
    )
        .prop_map(|(p, c)| UPSet::from_parts(p, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn empty_set_is_null_and_values_nonnegative(f in omega_family(), a in small_set()) {
        let m = MeasureSpec::new(GroundModel::Omega, f).unwrap();
        prop_assert!(m.eval(&UPSet::empty()).unwrap().is_zero());
        prop_assert!(m.eval(&a).unwrap().upper() >= Q::from_integer(0.into()));
        prop_assert!(m.eval_f64(&a) >= 0.0);
    }

    #[test]
    fn dp_matches_brute_force((n, v) in any_table(6)) {
        let m = MeasureSpec::table(n, v.clone()).unwrap();
        for mask in 0..1u64 << n {
            let brute = brute_variation(&v, mask);
            prop_assert_eq!(&var(&m, mask), &brute);
            let sub: Vec<u64> = (0..64).filter(|i| mask >> i & 1 == 1).collect();
            // the DP on the elements of `mask`, relabelled to 0..k
            let relabel = |s: usize| -> u64 {
                sub.iter().enumerate().filter(|(j, _)| s >> j & 1 == 1).map(|(_, &e)| 1u64 << e).sum()
            };
            let dp = variation_dp(|s| Some(v[relabel(s) as usize].clone()), sub.len()).unwrap();
            prop_assert_eq!(dp, brute);
        }
    }

    #[test]
    fn variation_monotone_and_superadditive((n, v) in any_table(5)) {
        let m = MeasureSpec::table(n, v).unwrap();
        let vs: Vec<Q> = (0..1u64 << n).map(|s| var(&m, s)).collect();
        for (a, b) in disjoint_pairs(n) {
            let u = (a | b) as usize;
            prop_assert!(vs[a as usize] <= vs[u]);
            prop_assert!(&vs[a as usize] + &vs[b as usize] <= vs[u]);
        }
    }

    #[test]
    fn additive_means_variation_is_m((n, v) in additive_table(6)) {
        let m = MeasureSpec::table(n, v.clone()).unwrap();
        let props = check_properties(&m);
        prop_assert!(props.proved(Property::FinitelyAdditive));
        for mask in 0..1u64 << n {
            prop_assert_eq!(&var(&m, mask), &v[mask as usize]);
        }
    }

    #[test]
    fn subadditive_means_variation_additive((n, v) in subadditive_table(6)) {
        let m = MeasureSpec::table(n, v).unwrap();
        let props = check_properties(&m);
        prop_assert!(props.proved(Property::Subadditive));
        let vs: Vec<Q> = (0..1u64 << n).map(|s| var(&m, s)).collect();
        for (a, b) in disjoint_pairs(n) {
            prop_assert_eq!(&vs[(a | b) as usize], &(&vs[a as usize] + &vs[b as usize]));
        }
    }

    #[test]
    fn refuted_properties_carry_valid_witnesses((n, v) in any_table(4)) {
        let m = MeasureSpec::table(n, v).unwrap();
        for (p, verdict) in check_properties(&m).iter() {
            if let Some(w) = verdict.witness() {
                prop_assert!(w.recheck(&m), "{} witness does not recheck", p.name());
            }
        }
    }
}

#[test]
fn worked_variations() {
    let pm = MeasureSpec::new(
        GroundModel::Finite(3),
        Family::PointMass(PointMass::explicit(vec![qi(1), qi(2), qi(3)])),
    )
    .unwrap();
    assert_eq!(var(&pm, 0b111), qi(6));
    assert_eq!(var(&pm, 0b101), qi(4));
    let sq =
        MeasureSpec::table_from(4, |s| qi(s.count_ones() as i64 * s.count_ones() as i64)).unwrap();
    assert_eq!(var(&sq, 0b1111), qi(16));
    // √|A| with √2 and √3 rounded to three decimals
    let roots = [qi(0), qi(1), q(1414, 1000), q(1732, 1000), qi(2)];
    let rt = MeasureSpec::table_from(4, |s| roots[s.count_ones() as usize].clone()).unwrap();
    assert_eq!(var(&rt, 0b1111), qi(4));
    let cc = MeasureSpec::new(
        GroundModel::Omega,
        Family::CardinalityClass(CardClass::finite_null()),
    )
    .unwrap();
    assert!(variation(&cc, &UPSet::all()).unwrap().is_infinite());
    // finite sets are null, so m̄ vanishes there
    assert_eq!(
        variation(&cc, &UPSet::range(0, 9)).unwrap(),
        ExtValue::finite(qi(0))
    );
}
