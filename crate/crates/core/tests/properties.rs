use std::cmp::Ordering;

use proptest::prelude::*;

use twist_torsion::word::bt::{b, t};
use twist_torsion::word::{reduce, shortlex_cmp, Alphabet, Letter, Word};

fn word(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0u8..2, any::<bool>()), 0..max_len)
        .prop_map(|ls| reduce(ls.into_iter().map(|(g, inv)| Letter::new(g, inv))))
}

proptest! {
    #[test]
    fn concat_is_associative(u in word(12), v in word(12), w in word(12)) {
        prop_assert_eq!(u.concat(&v).concat(&w), u.concat(&v.concat(&w)));
    }

    #[test]
    fn inverse_cancels(u in word(20)) {
        prop_assert!(u.concat(&u.inverse()).is_empty());
        prop_assert_eq!(u.inverse().inverse(), u);
    }

    #[test]
    fn conjugation_law(x in word(10), g in word(10), h in word(10)) {
        prop_assert_eq!(x.conjugate(&g), g.inverse().concat(&x).concat(&g));
        prop_assert_eq!(x.conjugate(&g).conjugate(&h), x.conjugate(&g.concat(&h)));
    }

    #[test]
    fn commutator_power_identity(x in word(6), y in word(6), m in 2i64..6) {
        // [x, y^m] = [x, y] [x, y^(m-1)]^y
        let lhs = x.commutator(&y.pow(m));
        let rhs = x.commutator(&y).concat(&x.commutator(&y.pow(m - 1)).conjugate(&y));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exponent_sum_is_a_homomorphism(u in word(15), v in word(15)) {
        for g in 0..2 {
            prop_assert_eq!(u.concat(&v).exponent_sum(g), u.exponent_sum(g) + v.exponent_sum(g));
            prop_assert_eq!(u.inverse().exponent_sum(g), -u.exponent_sum(g));
        }
    }

    #[test]
    fn format_parse_round_trip(u in word(25)) {
        let bt = Alphabet::bt();
        prop_assert_eq!(bt.parse(&bt.format(&u)).unwrap(), u);
    }

    #[test]
    fn shortlex_is_a_strict_order(u in word(6), v in word(6), w in word(6)) {
        prop_assert_eq!(shortlex_cmp(&u, &u), Ordering::Equal);
        prop_assert_eq!(shortlex_cmp(&u, &v), shortlex_cmp(&v, &u).reverse());
        if shortlex_cmp(&u, &v) == Ordering::Less && shortlex_cmp(&v, &w) == Ordering::Less {
            prop_assert_eq!(shortlex_cmp(&u, &w), Ordering::Less);
        }
        if u != v {
            prop_assert_ne!(shortlex_cmp(&u, &v), Ordering::Equal);
        }
    }

    #[test]
    fn cyclic_reduction_is_a_conjugate(u in word(20)) {
        let (core, conj) = u.cyclic_reduce();
        prop_assert!(core.is_cyclically_reduced());
        prop_assert_eq!(core.conjugate(&conj), u);
    }

    #[test]
    fn powers_add(k in -6i64..6, l in -6i64..6) {
        prop_assert_eq!(b(k).concat(&b(l)), b(k + l));
        prop_assert_eq!(t(k).pow(2), t(2 * k));
    }
}
