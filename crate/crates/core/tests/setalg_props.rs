use nonadd::exact::lcm;
use nonadd::setalg::enumerate_partitions;
use nonadd::{GroundModel, Partition, UPSet};
use proptest::prelude::*;

fn upset() -> impl Strategy<Value = UPSet> {
    (
        prop::collection::vec(any::<bool>(), 0..7),
        prop::collection::vec(any::<bool>(), 1..6),
    )
        .prop_map(|(prefix, pattern)| UPSet::from_parts(prefix, pattern))
}

fn horizon(sets: &[&UPSet]) -> usize {
    let n = sets.iter().map(|s| s.prefix_len()).max().unwrap_or(0);
    let l = sets.iter().fold(1, |acc, s| lcm(acc, s.period()));
    n + 10 * l
}

proptest! {
    #[test]
    fn boolean_ops_match_membership(a in upset(), b in upset()) {
        let u = a.union(&b);
        let i = a.intersection(&b);
        let d = a.difference(&b);
        let c = a.complement();
        for x in 0..horizon(&[&a, &b]) {
            let (ia, ib) = (a.contains(x), b.contains(x));
            prop_assert_eq!(u.contains(x), ia || ib);
            prop_assert_eq!(i.contains(x), ia && ib);
            prop_assert_eq!(d.contains(x), ia && !ib);
            prop_assert_eq!(c.contains(x), !ia);
        }
        let h = horizon(&[&a, &b]);
        prop_assert_eq!(a.is_subset(&b), (0..h).all(|x| !a.contains(x) || b.contains(x)));
        prop_assert_eq!(a.is_disjoint(&b), (0..h).all(|x| !(a.contains(x) && b.contains(x))));
    }

    #[test]
    fn canonical_form_is_unique(a in upset(), b in upset()) {
        let h = horizon(&[&a, &b]);
        let same = (0..h).all(|x| a.contains(x) == b.contains(x));
        prop_assert_eq!(same, a == b);
    }

    #[test]
    fn display_round_trips(a in upset()) {
        prop_assert_eq!(a.to_string().parse::<UPSet>().unwrap(), a);
    }

    #[test]
    fn cardinality_and_extremes(a in upset()) {
        let h = horizon(&[&a]);
        let members: Vec<usize> = (0..h).filter(|&x| a.contains(x)).collect();
        if a.is_finite() {
            prop_assert_eq!(a.cardinality(), Some(members.len()));
            prop_assert_eq!(a.max_element(), members.last().copied());
        } else {
            prop_assert_eq!(a.cardinality(), None);
        }
        prop_assert_eq!(a.min_element(), members.first().copied());
        prop_assert_eq!(a.first_k(members.len().min(12)), members[..members.len().min(12)].to_vec());
    }

    #[test]
    fn singletons_refine_omega_partitions(k in 1usize..6, cut in 0usize..5) {
        // residue classes mod k, with the first `cut` points split off
        let head = UPSet::range(0, cut);
        let mut blocks: Vec<UPSet> = (0..k)
            .map(|r| UPSet::residue_class(k, r).difference(&head))
            .filter(|b| !b.is_empty())
            .collect();
        blocks.extend((0..cut).map(UPSet::singleton));
        let p = Partition::new(GroundModel::Omega, blocks).unwrap();
        let s = Partition::singletons(GroundModel::Omega, UPSet::all()).unwrap();
        prop_assert!(s.is_refinement_of(&p));
        prop_assert_eq!(p.is_refinement_of(&s), false);
        prop_assert!(s.is_refinement_of(&s));
    }
}

fn all_partitions(n: usize) -> Vec<Partition> {
    enumerate_partitions(GroundModel::Finite(n), None, 8)
        .unwrap()
        .collect()
}

#[test]
fn refinement_is_a_partial_order() {
    for n in 1..=5 {
        let ps = all_partitions(n);
        for p in &ps {
            assert!(p.is_refinement_of(p));
            for q in &ps {
                let pq = p.is_refinement_of(q);
                if pq && q.is_refinement_of(p) {
                    assert_eq!(p, q);
                }
                if !pq {
                    continue;
                }
                for r in &ps {
                    if q.is_refinement_of(r) {
                        assert!(p.is_refinement_of(r));
                    }
                }
            }
        }
    }
    // antisymmetry alone at n = 6
    let ps = all_partitions(6);
    for (i, p) in ps.iter().enumerate() {
        for q in &ps[i + 1..] {
            assert!(!(p.is_refinement_of(q) && q.is_refinement_of(p)));
        }
    }
}

#[test]
fn common_refinement_is_least_upper_bound() {
    for n in 1..=5 {
        let ps = all_partitions(n);
        for p in &ps {
            for q in &ps {
                let r = p.common_refinement(q).unwrap();
                assert!(r.is_refinement_of(p) && r.is_refinement_of(q));
                for s in &ps {
                    if s.is_refinement_of(p) && s.is_refinement_of(q) {
                        assert!(s.is_refinement_of(&r));
                    }
                }
            }
        }
    }
}

#[test]
fn singletons_are_the_finest_finite_partition() {
    for n in 1..=6 {
        let g = GroundModel::Finite(n);
        let s = Partition::singletons(g, g.full_set()).unwrap();
        let ps = all_partitions(n);
        // Bell numbers: 1, 2, 5, 15, 52, 203
        assert_eq!(ps.len(), [1, 2, 5, 15, 52, 203][n - 1]);
        for p in &ps {
            assert!(s.is_refinement_of(p));
            if p.is_refinement_of(&s) {
                assert_eq!(p.block_count(), Some(n));
            }
        }
    }
}
