mod common;

use std::collections::HashSet;

use boxstep::eval::{erase, reduce_simple, reduction_trace};
use boxstep::morph::Morph;
use boxstep::render::{render_static, BoxStyle};
use boxstep::syntax::{parse, parse_expr, structural_equal};
use proptest::prelude::*;

fn atom() -> impl Strategy<Value = String> {
    prop_oneof![
        (-20i64..100).prop_map(|n| n.to_string()),
        (1u8..9, 2u8..9).prop_map(|(a, b)| format!("{a}/{b}")),
        prop::sample::select(vec![
            "x", "foo", "<=", "#t", "#false", "\"s\"", "\"a b\"", "lambda", "...", "a.b"
        ])
        .prop_map(str::to_string),
    ]
}

fn gap() -> impl Strategy<Value = String> {
    prop::sample::select(vec![
        " ",
        " ",
        " ",
        "  ",
        "\n",
        "\n  ",
        "\t",
        " ; note\n",
        " #| c |# ",
        "\n\n   ",
        " #|a\nb|# ",
    ])
    .prop_map(str::to_string)
}

fn edge() -> impl Strategy<Value = String> {
    prop_oneof![3 => Just(String::new()), 1 => gap()]
}

/// Source text with arbitrary spacing, comments, dots and quote ticks.
fn source() -> impl Strategy<Value = String> {
    atom().prop_recursive(4, 40, 5, |inner| {
        prop_oneof![
            4 => (edge(), prop::collection::vec((inner.clone(), gap()), 0..5), edge()).prop_map(
                |(open, items, close)| {
                    let mut s = format!("({open}");
                    let n = items.len();
                    for (i, (item, g)) in items.into_iter().enumerate() {
                        s.push_str(&item);
                        if i + 1 < n {
                            s.push_str(&g);
                        }
                    }
                    s.push_str(&close);
                    s.push(')');
                    s
                }
            ),
            1 => (prop::collection::vec(inner.clone(), 1..3), gap(), inner.clone())
                .prop_map(|(items, g, tail)| format!("({}{g}.{g}{tail})", items.join(" "))),
            1 => (edge(), inner).prop_map(|(g, e)| format!("'{g}{e}")),
        ]
    })
}

/// Well-scoped terms over the test prelude.
fn term() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![(0i64..6).prop_map(|n| n.to_string()), Just("x".to_string())];
    leaf.prop_recursive(4, 24, 3, |inner| {
        let two = (inner.clone(), inner.clone());
        prop_oneof![
            two.clone().prop_map(|(a, b)| format!("(+ {a} {b})")),
            two.clone().prop_map(|(a, b)| format!("(- {a} {b})")),
            two.clone().prop_map(|(a, b)| format!("(*  {a}\n  {b})")),
            (inner.clone(), inner.clone(), inner.clone(), inner.clone())
                .prop_map(|(a, b, c, d)| format!("(if (< {a} {b}) {c} {d})")),
            two.clone()
                .prop_map(|(body, arg)| format!("((lambda (x) {body}) {arg})")),
            two.clone().prop_map(|(a, b)| format!("(k {a} {b})")),
            inner.clone().prop_map(|a| format!("(square {a})")),
            inner.clone().prop_map(|a| format!("(first {a} 1 2)")),
            Just("(! 3)".to_string()),
            Just("'(1 2)".to_string()),
        ]
    })
    // `x` is always in scope.
    .prop_map(|body| format!("((lambda (x) {body}) 2)"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_a_parse_reproduces_the_source(src in source()) {
        let doc = parse(&src).unwrap();
        prop_assert_eq!(doc.to_string(), src);
    }

    #[test]
    fn reading_is_insensitive_to_reprinting(src in source()) {
        let e = parse_expr(&src).unwrap();
        prop_assert!(structural_equal(&e, &parse_expr(&e.print()).unwrap()));
    }

    #[test]
    fn steps_agree_with_the_simple_reducer(src in term()) {
        let ctx = common::context();
        let mut t = reduction_trace(parse_expr(&src).unwrap(), &ctx, 300);
        t.run_to_end();
        for pair in t.snapshots().windows(2) {
            let expected = reduce_simple(&erase(&pair[0].expr), &ctx).unwrap();
            prop_assert_eq!(erase(&pair[1].expr), expected);
        }
        if let Some(e) = t.error() {
            prop_assert!(reduce_simple(&erase(&t.snapshots()[e.step].expr), &ctx).is_err());
        }
    }

    #[test]
    fn provenance_is_symmetric_and_ids_are_unique(src in term()) {
        let t = common::trace(&src, 300);
        for (i, snap) in t.snapshots().iter().enumerate() {
            let ids = snap.expr.node_ids();
            let unique: HashSet<_> = ids.iter().copied().collect();
            prop_assert_eq!(unique.len(), ids.len(), "duplicate node in snapshot {}", i);
            if let Some(store) = &snap.provenance {
                prop_assert!(store.check().is_ok(), "{:?}", store.check());
                let before: HashSet<_> = t.snapshots()[i - 1].expr.node_ids().into_iter().collect();
                for (child, origin) in store.origin_entries() {
                    if unique.contains(&child) {
                        prop_assert!(origin.iter().all(|p| before.contains(p) || *p == child));
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn morph_endpoints_are_the_static_pictures(src in term()) {
        let t = common::trace(&src, 40);
        for pair in t.snapshots().windows(2) {
            let store = pair[1].provenance.clone().unwrap();
            let mut m = Morph::new(pair[0].expr.clone(), pair[1].expr.clone(), store);
            m.set_progress(0.0);
            prop_assert!(m.frame(BoxStyle::Unicode).same_cells(&render_static(&pair[0].expr, BoxStyle::Unicode)));
            m.set_progress(1.0);
            prop_assert!(m.frame(BoxStyle::Unicode).same_cells(&render_static(&pair[1].expr, BoxStyle::Unicode)));
        }
    }
}
