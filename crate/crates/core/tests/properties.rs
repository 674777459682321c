//! Property tests over randomly shaped terms: grammar round-trips, congruence
//! laws, and analysis invariants. The strategy builds source text directly, so
//! it also stresses the parser with spellings the pretty-printer never emits.

use bioamb::ast::alpha_equal;
use bioamb::cfa::{analyze, closed_under, generate_constraints};
use bioamb::parser::parse;
use bioamb::semantics::{normalize, step};
use bioamb::verify::measure_precision;
use proptest::prelude::*;
use std::collections::BTreeSet;

fn name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["a", "b", "c", "n", "m", "k"])
}

fn label() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["cell", "mol", "p", "q"])
}

fn dir() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["", "v", "^", "#"])
}

fn cap() -> impl Strategy<Value = String> {
    prop_oneof![
        (prop::sample::select(vec!["enter", "accept", "exit", "expel", "merge+", "merge-"]), name())
            .prop_map(|(verb, n)| format!("{verb} {n}")),
        (name(), dir(), name()).prop_map(|(ch, d, m)| format!("{ch}!{d}{{{m}}}")),
        (name(), dir(), name()).prop_map(|(ch, d, p)| format!("{ch}?{d}{{{p}}}")),
    ]
}

/// Closed process source text. `rec` bodies keep their variable guarded, and
/// choices join only guarded alternatives, so everything generated is
/// well-formed by construction.
fn proc_src() -> impl Strategy<Value = String> {
    let leaf = Just("0".to_string());
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            (cap(), inner.clone()).prop_map(|(c, p)| format!("{c}. ({p})")),
            (inner.clone(), label()).prop_map(|(p, l)| format!("[{p}]^{l}")),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| format!("({p}) | ({q})")),
            (cap(), inner.clone(), cap(), inner.clone())
                .prop_map(|(c1, p, c2, q)| format!("{c1}. ({p}) + {c2}. ({q})")),
            (name(), inner.clone()).prop_map(|(n, p)| format!("({n}) (({p}))")),
            (prop::sample::select(vec!["X", "Y"]), cap(), inner)
                .prop_map(|(x, c, p)| format!("rec {x}. {c}. (({p}) | {x})")),
        ]
    })
}

proptest! {
    #[test]
    fn print_parse_round_trips(src in proc_src()) {
        let p = parse(&src).unwrap();
        let reparsed = parse(&p.to_string()).unwrap();
        prop_assert!(alpha_equal(&p, &reparsed), "{src} changed under print+parse");
    }

    #[test]
    fn normalization_is_idempotent(src in proc_src()) {
        let p = parse(&src).unwrap();
        let once = normalize(&p);
        prop_assert_eq!(normalize(&once), once);
    }

    #[test]
    fn normal_forms_ignore_spelling(src in proc_src()) {
        // Re-parsing the printed form re-allocates every binder; the normal
        // form must not notice.
        let p = parse(&src).unwrap();
        let reparsed = parse(&p.to_string()).unwrap();
        prop_assert_eq!(normalize(&p), normalize(&reparsed));
    }

    #[test]
    fn congruent_terms_step_alike(src in proc_src()) {
        let p = parse(&src).unwrap();
        let reparsed = parse(&p.to_string()).unwrap();
        let succ = |p: &bioamb::ast::Process| -> BTreeSet<_> {
            step(p).into_iter().map(|(r, q)| (r.family(), normalize(&q))).collect()
        };
        prop_assert_eq!(succ(&p), succ(&reparsed));
    }

    #[test]
    fn analysis_is_a_deterministic_fixpoint(src in proc_src()) {
        let p = parse(&src).unwrap();
        let constraints =
            generate_constraints(&p, &bioamb::ast::AmbientId::Top).unwrap();
        let result = analyze(&p).unwrap();
        prop_assert!(closed_under(&result, &constraints));
        prop_assert_eq!(analyze(&p).unwrap(), result);
    }

    #[test]
    fn nothing_observed_goes_unpredicted(src in proc_src()) {
        let report = measure_precision(&parse(&src).unwrap(), 3, 200).unwrap();
        prop_assert!(
            report.missed.is_empty(),
            "missed pairs on {}: {:?}", src, report.missed
        );
    }
}
