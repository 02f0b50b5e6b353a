use coset_duality::{
    available, basis_for, build_w, enumerate_full_filters, eta_g, eta_m, find_isomorphism, g_of_m,
    hat_lemma_violation, lookup, w_on_morphism, BasisPolicy, Caps, GroupHom, InverseSystem,
    LevelFilter, MeetGroupoid, Product, EMPTY,
};
use proptest::prelude::*;

fn group(name: &str) -> coset_duality::PermGroup {
    lookup(name, false)
        .unwrap()
        .group(&Caps::default())
        .unwrap()
}

#[test]
fn carrier_is_one_plus_index_sum() {
    let caps = Caps::default();
    for e in available(false) {
        let g = e.group(&caps).unwrap();
        let s = basis_for(&g, BasisPolicy::All, &caps).unwrap();
        let w = build_w(&g, &s).unwrap();
        let index_sum: usize = s.members().iter().map(|u| g.order() / u.order()).sum();
        assert_eq!(w.size(), 1 + index_sum, "{}", e.name);
    }
}

#[test]
fn reconstruction_recovers_the_group() {
    let caps = Caps::default();
    for name in ["Z4", "S3", "Q8"] {
        let g = group(name);
        let w = build_w(&g, &basis_for(&g, BasisPolicy::All, &caps).unwrap()).unwrap();
        let gm = g_of_m(w.groupoid()).unwrap();
        assert_eq!(gm.order(), g.order());
        let eta = eta_g(&w, &gm).unwrap();
        assert!(eta.is_bijective());
        let back = eta_m(w.groupoid(), &gm).unwrap();
        assert_eq!(back.map[EMPTY], EMPTY);
        assert_eq!(hat_lemma_violation(w.groupoid(), &gm).unwrap(), None);
    }
}

#[test]
fn isomorphic_bases_give_isomorphic_groupoids() {
    let caps = Caps::default();
    let g = group("D4");
    let chain = build_w(&g, &basis_for(&g, BasisPolicy::Chain, &caps).unwrap()).unwrap();
    let all = build_w(&g, &basis_for(&g, BasisPolicy::All, &caps).unwrap()).unwrap();
    assert!(find_isomorphism(chain.groupoid(), chain.groupoid(), &caps)
        .unwrap()
        .is_some());
    assert_eq!(
        find_isomorphism(chain.groupoid(), all.groupoid(), &caps).unwrap(),
        None
    );
    let id = w_on_morphism(&GroupHom::identity(&g), &all, &all).unwrap();
    assert_eq!(id, (0..all.size()).collect::<Vec<_>>());
}

#[test]
fn json_round_trip_preserves_tables() {
    let caps = Caps::default();
    let g = group("S3");
    let w = build_w(&g, &basis_for(&g, BasisPolicy::All, &caps).unwrap()).unwrap();
    let text = serde_json::to_string(&w.groupoid().to_json()).unwrap();
    let back = MeetGroupoid::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
    assert_eq!(&back, w.groupoid());
    assert_eq!(enumerate_full_filters(&back).unwrap().len(), 6);
}

#[test]
fn dihedral_tower_truncations() {
    let sys = InverseSystem::dihedral(3).unwrap();
    let orders: Vec<usize> = (0..=3).map(|d| sys.level(d).unwrap().order()).collect();
    assert_eq!(orders, vec![1, 2, 8, 16]);
    for d in 0..=3 {
        sys.lazy_eager_agree(d).unwrap();
        assert_eq!(sys.filter_count(d).unwrap(), orders[d]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_filter_has_lifts(depth in 0usize..4, x in 0usize..16, extra in 1usize..3) {
        let sys = InverseSystem::two_adic(6).unwrap();
        let x = x % (1 << depth);
        let f = LevelFilter::from_element(&sys, depth, x).unwrap();
        let lifts = sys.refine_filter(&f, depth + extra).unwrap();
        prop_assert_eq!(lifts.len(), 1 << extra);
        for l in &lifts {
            prop_assert_eq!(l.top() % (1 << depth), x);
        }
    }

    #[test]
    fn products_respect_frames(a in 0usize..19, b in 0usize..19) {
        let caps = Caps::default();
        let g = group("S3");
        let w = build_w(&g, &basis_for(&g, BasisPolicy::All, &caps).unwrap()).unwrap();
        let m = w.groupoid();
        prop_assume!(a != EMPTY && b != EMPTY);
        let (left_a, _) = m.coset_frame(a).unwrap();
        let (_, right_b) = m.coset_frame(b).unwrap();
        let defined = matches!(m.product(a, b).unwrap(), Product::Defined(_));
        prop_assert_eq!(defined, left_a == right_b);
    }
}
