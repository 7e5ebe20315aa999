mod common;

use std::sync::OnceLock;

use common::{groups_up_to, grp, Brute};
use proptest::prelude::*;
use proptest::sample::{select, Index};
use zerosum::{
    automorphisms, canonicalize, classify, davenport, gen_type1, gen_type2, inductive_quotient, ml_mzss, projection,
    Axis, GroupElement, GroupSpec, SearchConfig, Sequence,
};

fn all_groups() -> Vec<GroupSpec> {
    static GROUPS: OnceLock<Vec<GroupSpec>> = OnceLock::new();
    GROUPS.get_or_init(|| groups_up_to(64)).clone()
}

fn small_rank_two() -> Vec<GroupSpec> {
    groups_up_to(36).into_iter().filter(|g| g.rank() <= 2).collect()
}

fn element(g: &GroupSpec) -> impl Strategy<Value = GroupElement> {
    let g = g.clone();
    let ranges: Vec<_> = g.invariant_factors().iter().map(|&f| 0..f as i64).collect();
    ranges.prop_map(move |r| g.element(&r).unwrap())
}

fn with_elements(groups: Vec<GroupSpec>, k: usize) -> impl Strategy<Value = (GroupSpec, Vec<GroupElement>)> {
    select(groups).prop_flat_map(move |g| (Just(g.clone()), proptest::collection::vec(element(&g), k)))
}

fn with_sequence(
    groups: Vec<GroupSpec>,
    len: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (GroupSpec, Sequence)> {
    select(groups).prop_flat_map(move |g| {
        let gg = g.clone();
        proptest::collection::vec(element(&g), len.clone())
            .prop_map(move |es| (gg.clone(), Sequence::from_elements(&gg, es).unwrap()))
    })
}

/// Appends `-σ(S)` so the result is zero-sum; useful for hitting mzss often.
fn closed(s: &Sequence) -> Sequence {
    let g = s.group();
    s.with(&g.neg(&s.sigma()).unwrap(), 1).unwrap()
}

proptest! {
    #[test]
    fn group_axioms((g, e) in with_elements(all_groups(), 3)) {
        let (a, b, c) = (&e[0], &e[1], &e[2]);
        let ab = g.add(a, b).unwrap();
        prop_assert_eq!(g.add(&ab, c).unwrap(), g.add(a, &g.add(b, c).unwrap()).unwrap());
        prop_assert_eq!(&ab, &g.add(b, a).unwrap());
        prop_assert_eq!(&g.add(a, &g.zero()).unwrap(), a);
        prop_assert!(g.add(a, &g.neg(a).unwrap()).unwrap().is_zero());
        prop_assert_eq!(&g.add(&g.sub(a, b).unwrap(), b).unwrap(), a);
        let ord = g.order_of(a).unwrap();
        prop_assert_eq!(g.exponent() as u64 % ord, 0);
        prop_assert!(g.scale(ord as i64, a).unwrap().is_zero());
        for k in 1..ord {
            prop_assert!(!g.scale(k as i64, a).unwrap().is_zero());
        }
    }

    #[test]
    fn text_round_trip((g, s) in with_sequence(all_groups(), 0..=12)) {
        prop_assert_eq!(&Sequence::parse(&g, &s.to_string()).unwrap(), &s);
        prop_assert_eq!(&g.to_string().parse::<GroupSpec>().unwrap(), &g);
        prop_assert_eq!(s.expanded().count(), s.len());
        prop_assert!(s.expanded().zip(s.expanded().skip(1)).all(|(x, y)| x <= y));
    }

    #[test]
    fn automorphisms_are_homomorphisms(
        (g, e) in with_elements(small_rank_two(), 6),
        pick in any::<Index>(),
    ) {
        let auts = automorphisms(&g).unwrap();
        let f = pick.get(auts.as_slice());
        let (a, b) = (&e[0], &e[1]);
        prop_assert_eq!(
            f.apply(&g.add(a, b).unwrap()).unwrap(),
            g.add(&f.apply(a).unwrap(), &f.apply(b).unwrap()).unwrap()
        );
        let s = Sequence::from_elements(&g, e.clone()).unwrap();
        let fs = s.apply_hom(f).unwrap();
        prop_assert_eq!(fs.sigma(), f.apply(&s.sigma()).unwrap());
        prop_assert_eq!(fs.len(), s.len());
        prop_assert_eq!(fs.is_zero_sum_free().unwrap(), s.is_zero_sum_free().unwrap());
    }

    #[test]
    fn quotient_and_projections_are_homomorphisms(
        (m, n) in (2u32..=4, 1u32..=4),
        ra in (0i64..64, 0i64..64),
        rb in (0i64..64, 0i64..64),
    ) {
        let phi = inductive_quotient(m, n).unwrap();
        let g = phi.source().clone();
        let a = g.element(&[ra.0, ra.1]).unwrap();
        let b = g.element(&[rb.0, rb.1]).unwrap();
        let sum = g.add(&a, &b).unwrap();
        let q = phi.target();
        prop_assert_eq!(phi.apply(&sum).unwrap(), q.add(&phi.apply(&a).unwrap(), &phi.apply(&b).unwrap()).unwrap());
        prop_assert!(phi.is_surjective());
        prop_assert_eq!(phi.kernel().len(), n as usize);

        let (e1, e2) = (g.element(&[1, 0]).unwrap(), g.element(&[0, 1]).unwrap());
        for axis in [Axis::First, Axis::Second] {
            let p = projection(&g, (&e1, &e2), axis).unwrap();
            let t = p.target();
            prop_assert_eq!(p.apply(&sum).unwrap(), t.add(&p.apply(&a).unwrap(), &p.apply(&b).unwrap()).unwrap());
        }
    }

    #[test]
    fn subsums_are_monotone(
        (g, s) in with_sequence(all_groups(), 0..=8),
        extra in proptest::collection::vec(any::<Index>(), 0..4),
    ) {
        let elems: Vec<GroupElement> = g.elements().collect();
        let t = extra.iter().fold(s.clone(), |acc, i| acc.with(i.get(&elems), 1).unwrap());
        prop_assert!(s.divides(&t));
        prop_assert!(s.reachable_subsums().unwrap().is_subset(&t.reachable_subsums().unwrap()));
    }

    #[test]
    fn predicates_agree_with_definition((g, s) in with_sequence(all_groups(), 0..=11), close in any::<bool>()) {
        let s = if close { closed(&s) } else { s };
        let b = Brute::new(&g);
        let idx = b.indices(&s);
        prop_assert_eq!(s.is_zero_sum_free().unwrap(), b.is_zero_sum_free(&idx));
        prop_assert_eq!(s.is_mzss().unwrap(), b.is_mzss(&idx));
        match b.max_factors(&idx) {
            Some(k) => prop_assert_eq!(s.zss_max_factors().unwrap(), k),
            None => prop_assert!(s.zss_max_factors().is_err()),
        }
    }

    #[test]
    fn zero_sum_free_is_shorter_than_davenport((g, s) in with_sequence(small_rank_two(), 0..=12)) {
        if s.is_zero_sum_free().unwrap() {
            prop_assert!(s.len() < davenport(&g, &SearchConfig::default()).unwrap().d);
        }
    }

    #[test]
    fn canonical_form_is_orbit_invariant(
        (g, s) in with_sequence(small_rank_two(), 1..=8),
        pick in any::<Index>(),
    ) {
        let cfg = SearchConfig::default();
        let auts = automorphisms(&g).unwrap();
        let c = canonicalize(&s, &cfg).unwrap();
        prop_assert!(c <= s);
        prop_assert_eq!(&canonicalize(&c, &cfg).unwrap(), &c);
        let image = s.apply_hom(pick.get(auts.as_slice())).unwrap();
        prop_assert_eq!(canonicalize(&image, &cfg).unwrap(), c);
    }

    #[test]
    fn extraction_finds_egz_witness(
        n in 2u32..=12,
        residues in proptest::collection::vec(0i64..12, 23),
    ) {
        let g = GroupSpec::cyclic(n).unwrap();
        let elems = residues.iter().take(2 * n as usize - 1).map(|&r| g.element(&[r]).unwrap());
        let s = Sequence::from_elements(&g, elems).unwrap();
        let t = s.extract_zero_sum_of_length(n as usize).unwrap().expect("EGZ guarantees a witness");
        prop_assert_eq!(t.len(), n as usize);
        prop_assert!(t.sigma().is_zero());
        prop_assert!(t.divides(&s));
    }
}

fn theorem_groups() -> Vec<(GroupSpec, Vec<Sequence>)> {
    static CACHE: OnceLock<Vec<(GroupSpec, Vec<Sequence>)>> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            [&[2i64, 4][..], &[2, 6], &[3, 3], &[3, 6], &[4, 4]]
                .iter()
                .map(|f| {
                    let g = grp(f);
                    let all = ml_mzss(&g, &SearchConfig::default()).unwrap();
                    (g, all)
                })
                .collect()
        })
        .clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classification_is_equivariant_and_witnesses_regenerate(
        which in any::<Index>(),
        seq_pick in any::<Index>(),
        aut_pick in any::<Index>(),
    ) {
        let groups = theorem_groups();
        let (g, all) = which.get(&groups);
        let s = seq_pick.get(all);
        let f = aut_pick.get(automorphisms(g).unwrap().as_slice()).clone();
        let c = classify(g, s).unwrap();
        let fc = classify(g, &s.apply_hom(&f).unwrap()).unwrap();
        prop_assert_eq!((c.is_type1, c.is_type2), (fc.is_type1, fc.is_type2));
        prop_assert!(c.is_type1 || c.is_type2);
        for w in &c.type1_witnesses {
            prop_assert_eq!(&gen_type1(g, w).unwrap(), s);
        }
        for w in &c.type2_witnesses {
            prop_assert_eq!(&gen_type2(g, w).unwrap(), s);
        }
    }
}

#[test]
fn searches_are_independent_of_worker_count() {
    for g in small_rank_two() {
        let one = SearchConfig::with_workers(1);
        let d1 = davenport(&g, &one).unwrap();
        let all1 = ml_mzss(&g, &one).unwrap();
        for w in [3, 4] {
            let cfg = SearchConfig::with_workers(w);
            let d = davenport(&g, &cfg).unwrap();
            assert_eq!((d.d, &d.witness, d.nodes_explored), (d1.d, &d1.witness, d1.nodes_explored), "{g}");
            assert_eq!(ml_mzss(&g, &cfg).unwrap(), all1, "{g}");
        }
    }
}

#[test]
fn order_divides_exponent_everywhere() {
    for g in groups_up_to(64) {
        for a in g.elements() {
            assert_eq!(g.exponent() as u64 % g.order_of(&a).unwrap(), 0, "{g}: {a}");
        }
    }
}

#[test]
fn bases_have_full_order() {
    for g in groups_up_to(36).into_iter().filter(|g| g.rank() == 2) {
        let elems: Vec<_> = g.elements().filter(|e| !e.is_zero()).collect();
        for a in &elems {
            for b in &elems {
                if g.is_basis(&[a.clone(), b.clone()]).unwrap() {
                    let prod = g.order_of(a).unwrap() * g.order_of(b).unwrap();
                    assert_eq!(prod, g.order() as u64, "{g}: {a} {b}");
                }
            }
        }
    }
}

#[test]
fn automorphisms_form_a_group() {
    for g in groups_up_to(36) {
        let auts = automorphisms(&g).unwrap();
        let b = Brute::new(&g);
        let as_perm = |f: &zerosum::Homomorphism| -> Vec<usize> {
            g.elements().map(|x| b.indices(&Sequence::from_elements(&g, [f.apply(&x).unwrap()]).unwrap())[0]).collect()
        };
        let perms: std::collections::BTreeSet<Vec<usize>> = auts.iter().map(as_perm).collect();
        assert_eq!(perms.len(), auts.len(), "{g}");
        let id: Vec<usize> = (0..g.order()).collect();
        assert!(perms.contains(&id));
        for f in auts.iter().take(12) {
            for h in auts.iter().take(12) {
                assert!(perms.contains(&as_perm(&f.compose(h).unwrap())), "{g}");
            }
        }
    }
}
