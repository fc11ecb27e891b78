use std::cmp::Ordering;

use csb_shuffle::csb::{class_tag, scenario, CsbInstance, Sign};
use csb_shuffle::csb::branches::{deinterleave, interleave};
use csb_shuffle::order::{compare, embed_in_q, enumerate, parse_term, Dyadic, Element, OrderTerm};
use csb_shuffle::skolem::coloring::{make_seeded_coloring, Palette};
use csb_shuffle::skolem::points::{Ent, Periodic};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn leaf() -> impl Strategy<Value = OrderTerm> {
    prop_oneof![
        (0u64..4).prop_map(OrderTerm::fin),
        Just(OrderTerm::Omega),
        Just(OrderTerm::Rationals),
    ]
}

fn term() -> impl Strategy<Value = OrderTerm> {
    leaf().prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(OrderTerm::rev),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| OrderTerm::sum(a, b)),
            prop::collection::vec(inner, 1..3)
                .prop_filter_map("nonempty shuffle", |v| OrderTerm::shuffle(v).ok()),
        ]
    })
}

fn dyadic() -> impl Strategy<Value = Dyadic> {
    (0u64..4000).prop_map(Dyadic::from_index)
}

fn periodic() -> impl Strategy<Value = Periodic> {
    let ent = (0u64..64).prop_map(|k| Ent::Dy(Dyadic::from_index(k)));
    (prop::collection::vec(ent.clone(), 0..4), prop::collection::vec(ent, 1..4))
        .prop_map(|(p, c)| Periodic::new(p, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn display_parses_back(t in term()) {
        let n = t.normalized();
        prop_assert_eq!(parse_term(&t.to_string()).unwrap().normalized(), n.clone());
        prop_assert_eq!(n.normalized(), n);
    }

    #[test]
    fn compare_matches_rational_embedding(t in term(), i in 0usize..40, j in 0usize..40) {
        let xs: Vec<Element> = enumerate(&t).take(40).collect();
        prop_assume!(!xs.is_empty());
        let (a, b) = (&xs[i % xs.len()], &xs[j % xs.len()]);
        let c = compare(&t, a, b).unwrap();
        prop_assert_eq!(c, embed_in_q(&t, a).unwrap().cmp(&embed_in_q(&t, b).unwrap()));
        prop_assert_eq!(c == Ordering::Equal, a == b);
        prop_assert_eq!(Element::from_json(&a.to_json()).unwrap(), a.clone());
    }

    #[test]
    fn witnesses_are_dense(k in 1usize..6, seed in 0u64..50, a in dyadic(), b in dyadic(), c in 0usize..6) {
        prop_assume!(a != b);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let labels: Vec<String> = (0..k).map(|n| format!("c{n}")).collect();
        let col = make_seeded_coloring(Palette::labels(&labels), seed).unwrap();
        let w = col.witness(Some(lo), Some(hi), c % k).unwrap();
        prop_assert!(lo < w && w < hi);
        prop_assert_eq!(col.color_at(w), c % k);
    }

    #[test]
    fn interleaving_roundtrips(r in periodic(), q in 0u64..8) {
        let q = Dyadic::from_index(q);
        prop_assert_eq!(deinterleave(&interleave(&r, q), q), Some(r));
    }

    #[test]
    fn class_tags_ignore_heads(r in periodic(), head in prop::collection::vec((0u64..64).prop_map(|k| Ent::Dy(Dyadic::from_index(k))), 0..5)) {
        let s = r.with_head(&head);
        prop_assert_eq!(class_tag(&s), class_tag(&r));
        let rep = class_tag(&r).representative();
        prop_assert_eq!(class_tag(&rep), class_tag(&r));
        prop_assert!(rep.prefix().is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn leaves_roundtrip_through_g(seed in 0u64..1000, n in 0usize..4, plus in any::<bool>(), absorbed in any::<bool>()) {
        let name = if absorbed { "absorbed-palette" } else { "same-shuffle" };
        let inst = CsbInstance::build(&scenario(name).unwrap()).unwrap();
        let sign = if plus { Sign::Plus } else { Sign::Minus };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let leaf = inst.random_leaf(sign, n, &mut rng).unwrap();
        let x = inst.g_forward(sign, &leaf).unwrap();
        prop_assert_eq!(inst.g_inverse(sign, &x).unwrap(), leaf);
        let (p, v) = inst.h_map(sign, &x, inst.depth()).unwrap();
        prop_assert_eq!(inst.h_map_inverse(sign, p.as_node().unwrap(), &v).unwrap(), x);
    }
}
