//! Property-based checks of the expression kernel: field laws, derivation
//! rules, canonical-form uniqueness against evaluation, and the
//! printer/parser round trip.

mod common;

use maxsym_core::{parse, JetVar, RationalExpr};
use proptest::prelude::*;

/// Strategy: small random rational expressions built from polynomial
/// numerators and denominators in the four jet variables.
fn small_poly() -> impl Strategy<Value = RationalExpr> {
    let term = (
        -5i64..=5,
        0u32..=2,
        0u32..=2,
        0u32..=2,
        0u32..=2,
    )
        .prop_map(|(c, ex, eu, ep, eq)| {
            let mut t = RationalExpr::from_int(c);
            for (v, e) in [
                (JetVar::X, ex),
                (JetVar::U, eu),
                (JetVar::P, ep),
                (JetVar::Q, eq),
            ] {
                if e > 0 {
                    t = &t * &RationalExpr::var(v).powi(e as i64).unwrap();
                }
            }
            t
        });
    prop::collection::vec(term, 1..4).prop_map(|terms| {
        let mut acc = RationalExpr::zero();
        for t in terms {
            acc = &acc + &t;
        }
        acc
    })
}

fn rational_expr() -> impl Strategy<Value = RationalExpr> {
    (small_poly(), small_poly()).prop_filter_map("nonzero denominator", |(n, d)| {
        if d.is_zero() {
            None
        } else {
            Some(&n / &d)
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_commutes(a in rational_expr(), b in rational_expr()) {
        prop_assert_eq!(&a + &b, &b + &a);
    }

    #[test]
    fn multiplication_associates(
        a in rational_expr(),
        b in rational_expr(),
        c in rational_expr()
    ) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn distributivity(a in rational_expr(), b in rational_expr(), c in rational_expr()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    }

    #[test]
    fn subtraction_inverts_addition(a in rational_expr(), b in rational_expr()) {
        prop_assert_eq!(&(&a + &b) - &b, a);
    }

    #[test]
    fn division_inverts_multiplication(a in rational_expr(), b in rational_expr()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!(&(&a * &b) / &b, a);
    }

    #[test]
    fn leibniz_rule(a in rational_expr(), b in rational_expr()) {
        for v in JetVar::ALL {
            let lhs = (&a * &b).partial(v);
            let rhs = &(&a.partial(v) * &b) + &(&a * &b.partial(v));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn mixed_partials_commute(a in rational_expr()) {
        for v in JetVar::ALL {
            for w in JetVar::ALL {
                prop_assert_eq!(a.partial(v).partial(w), a.partial(w).partial(v));
            }
        }
    }

    #[test]
    fn printer_parser_round_trip(a in rational_expr()) {
        let printed = a.to_string();
        let reparsed = parse(&printed).unwrap();
        prop_assert_eq!(reparsed, a);
    }

    #[test]
    fn quotient_rule(a in rational_expr(), b in rational_expr()) {
        prop_assume!(!b.is_zero());
        let ratio = &a / &b;
        for v in JetVar::ALL {
            let lhs = ratio.partial(v);
            let rhs = &(&(&a.partial(v) * &b) - &(&a * &b.partial(v))) / &(&b * &b);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
