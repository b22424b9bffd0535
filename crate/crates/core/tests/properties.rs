use std::collections::{BTreeSet, HashSet};

use ndlr_core::enumerate::for_each_term;
use ndlr_core::step::{classify, find_all};
use ndlr_core::transform::lll_measure;
use ndlr_core::*;
use proptest::prelude::*;

fn sig() -> Signature {
    Signature::bool_list()
}

fn con(name: &str) -> Constructor {
    sig().constructor(&Name::new(name)).unwrap().clone()
}

const NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn name() -> impl Strategy<Value = Name> {
    prop::sample::select(NAMES.to_vec()).prop_map(Name::new)
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        name().prop_map(Expr::Var),
        prop::sample::select(vec!["True", "False", "Nil"]).prop_map(|c| Expr::con(&con(c), vec![])),
    ]
}

/// Possibly open terms with shadowing, over Bool and List.
fn term() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 40, 3, |inner| {
        prop_oneof![
            (name(), inner.clone()).prop_map(|(x, b)| Expr::lam(x, b)),
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Expr::app(f, a)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Expr::choice(l, r)),
            prop::collection::vec(inner.clone(), 0..=2).prop_map(|args| Expr::con(&con("Cons"), args)),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(s, t, f)| Expr::case(
                "Bool",
                s,
                vec![
                    Alt { con: Name::new("True"), vars: vec![], rhs: t },
                    Alt { con: Name::new("False"), vars: vec![], rhs: f },
                ]
            )),
            (inner.clone(), inner.clone(), prop::sample::subsequence(NAMES.to_vec(), 2), inner.clone()).prop_map(
                |(s, n, ht, c)| Expr::case(
                    "List",
                    s,
                    vec![
                        Alt { con: Name::new("Nil"), vars: vec![], rhs: n },
                        Alt { con: Name::new("Cons"), vars: ht.into_iter().map(Name::new).collect(), rhs: c },
                    ]
                )
            ),
            (prop::collection::vec((name(), inner.clone()), 1..=3), inner.clone()).prop_map(|(bs, body)| {
                let mut seen = HashSet::new();
                let bs = bs.into_iter().filter(|(x, _)| seen.insert(x.clone())).map(|(x, e)| Binding::new(x, e));
                Expr::letrec(bs.collect(), body)
            }),
        ]
    })
}

/// Closes a term by abstracting its free variables.
fn close(e: Expr) -> Expr {
    e.free_vars().into_iter().fold(e, |acc, x| Expr::lam(x, acc))
}

fn closed_term() -> impl Strategy<Value = Expr> {
    term().prop_map(|e| rename_apart(&close(e)))
}

fn small_terms() -> Vec<Expr> {
    enumerate_terms(&EnumParams::new(sig(), 5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn pretty_then_parse_round_trips(e in term()) {
        let back = parse(&pretty(&e), &sig()).unwrap();
        prop_assert!(alpha_eq(&back, &e), "{} vs {}", back, e);
        if e.satisfies_dvc() {
            prop_assert_eq!(back, e);
        }
    }

    #[test]
    fn alpha_eq_is_an_equivalence(e in term()) {
        prop_assert!(alpha_eq(&e, &e));
        let f = freshen(&e, &HashSet::new());
        prop_assert!(alpha_eq(&e, &f) && alpha_eq(&f, &e));
        let g = freshen(&f, &HashSet::new());
        prop_assert!(alpha_eq(&e, &g));
        prop_assert_eq!(canonical(&e), canonical(&g));
    }

    #[test]
    fn alpha_eq_agrees_with_canonical(a in term(), b in term()) {
        prop_assert_eq!(alpha_eq(&a, &b), canonical(&a) == canonical(&b));
    }

    #[test]
    fn freshen_avoids_and_keeps_free_names(e in term(), avoid in prop::collection::hash_set(name(), 0..4)) {
        let f = freshen(&e, &avoid);
        prop_assert!(f.satisfies_dvc());
        prop_assert_eq!(f.free_vars(), e.free_vars());
        let bound: BTreeSet<Name> = f.binders().into_iter().collect();
        prop_assert!(bound.iter().all(|b| !avoid.contains(b) && !e.all_names().contains(b)));
        prop_assert_eq!(f.size(), e.size());
    }

    #[test]
    fn rename_apart_restores_convention(e in term()) {
        let r = rename_apart(&e);
        prop_assert!(r.satisfies_dvc());
        prop_assert!(alpha_eq(&r, &e));
        if e.satisfies_dvc() {
            prop_assert_eq!(r, e);
        }
    }

    #[test]
    fn steps_preserve_closedness_and_convention(e in closed_term()) {
        prop_assert!(e.is_closed());
        for (r, t) in find_all(&e, &Label::ALL) {
            prop_assert!(t.is_closed(), "{} on {} gave {}", r, e, t);
            prop_assert!(t.satisfies_dvc(), "{} on {} gave {}", r, e, t);
            prop_assert!(classify(&e, &r, &t).is_ok());
        }
    }

    #[test]
    fn lll_steps_decrease_measure(e in closed_term()) {
        for (r, t) in find_all(&e, &Label::LLL) {
            prop_assert!(lll_measure(&t) < lll_measure(&e), "{} on {} gave {}", r, e, t);
        }
    }

    #[test]
    fn standard_step_is_an_instance(e in closed_term()) {
        let found = find_all(&e, &Label::BASE);
        match standard_redex(&e) {
            ndlr_core::standard::StandardRedex::None(_) => {}
            ndlr_core::standard::StandardRedex::Deterministic(s) => {
                prop_assert!(found.iter().any(|(r, t)| r.pos == s.pos && alpha_eq(t, &s.after)));
            }
            ndlr_core::standard::StandardRedex::NdChoice(l, r) => {
                for s in [l, r] {
                    prop_assert!(found.iter().any(|(q, t)| q.label == s.label && q.pos == s.pos && alpha_eq(t, &s.after)));
                }
            }
        }
    }

    #[test]
    fn enumerated_steps_stay_closed(i in 0usize..1 << 20) {
        let terms = small_terms();
        let e = &terms[i % terms.len()];
        for (r, t) in find_all(e, &Label::ALL) {
            prop_assert!(t.is_closed() && t.satisfies_dvc(), "{} on {} gave {}", r, e, t);
        }
    }

    #[test]
    fn enumeration_is_monotone(n in 1usize..=4, binders in 1usize..=2, bindings in 1usize..=2, partial: bool) {
        let p = EnumParams { max_binders: binders, max_letrec_bindings: bindings, partial_constructors: partial, ..EnumParams::new(sig(), n) };
        let here = count_terms(&p);
        let larger = [
            EnumParams { max_size: n + 1, ..p.clone() },
            EnumParams { max_binders: binders + 1, ..p.clone() },
            EnumParams { max_letrec_bindings: bindings + 1, ..p.clone() },
            EnumParams { partial_constructors: true, ..p.clone() },
        ];
        for q in &larger {
            prop_assert!(here <= count_terms(q), "{:?}", q);
        }
    }

    #[test]
    fn enumerated_terms_are_distinct_closed_and_bounded(n in 1usize..=5) {
        let p = EnumParams::new(sig(), n);
        let mut seen = HashSet::new();
        let mut count = 0;
        for_each_term(&p, |e| {
            assert!(e.is_closed() && e.size() <= n, "{e}");
            assert!(seen.insert(canonical(&e)), "duplicate {e}");
            count += 1;
        });
        prop_assert_eq!(count, count_terms(&p));
    }
}
