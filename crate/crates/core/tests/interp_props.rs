use std::path::PathBuf;

use effint::interp::{
    decide_delta, enumerate_members, identity_scheme, pairs_scheme, Decision, DeltaBudget, DeltaScheme,
    InterpScheme, TupleBound,
};
use effint::scheme_io::{format_scheme, load_scheme, parse_scheme};
use effint::{Elem, Presentation, Signature, Tuple};
use proptest::prelude::*;

fn shipped(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemes").join(name)
}

fn cases() -> Vec<(InterpScheme, Presentation)> {
    vec![
        (identity_scheme(&Signature::empty()).unwrap(), Presentation::pure_set()),
        (identity_scheme(&Signature::finite(vec![2]).unwrap()).unwrap(), Presentation::order()),
        (pairs_scheme(), Presentation::pure_set()),
        (load_scheme(shipped("pairs.scheme")).unwrap(), Presentation::pure_set()),
    ]
}

fn decide(pres: &Presentation, d: &DeltaScheme, blocks: &[&[Elem]]) -> Decision {
    decide_delta(pres, d, blocks, DeltaBudget::default()).unwrap()
}

fn members(s: &InterpScheme, pres: &Presentation) -> Vec<Tuple> {
    let bound = TupleBound {
        max_len: 4,
        entries_below: 6,
    };
    let m = enumerate_members(pres, &s.dom, bound, DeltaBudget::default()).unwrap();
    assert!(m.unknown.is_empty(), "{}: undecided {:?}", s.name, m.unknown);
    m.members
}

#[test]
fn shipped_schemes_load_and_round_trip() {
    for (file, built) in [
        ("pairs.scheme", pairs_scheme()),
        ("identity.scheme", identity_scheme(&Signature::empty()).unwrap()),
    ] {
        let loaded = load_scheme(shipped(file)).unwrap();
        assert_eq!(loaded, built, "{file}");
        let again = parse_scheme(&format_scheme(&loaded).unwrap()).unwrap();
        assert_eq!(again, loaded, "{file}");
    }
}

#[test]
fn malformed_scheme_text_is_rejected() {
    for text in ["", "scheme x\nsignature\ntarget 2\nsection dom\n+ 3 0 : + eq 0 9\n", "scheme x\nbogus\n"] {
        assert!(parse_scheme(text).is_err(), "{text:?}");
    }
}

#[test]
fn equivalence_partitions_the_members() {
    for (s, pres) in cases() {
        let ms = members(&s, &pres);
        assert!(!ms.is_empty(), "{}", s.name);
        let n = ms.len();
        let mut rel = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                let d = decide(&pres, &s.equiv, &[&ms[i], &ms[j]]);
                assert_ne!(d, Decision::Unknown, "{}: {:?} {:?}", s.name, ms[i], ms[j]);
                rel[i][j] = d == Decision::In;
            }
        }
        let class: Vec<usize> = (0..n).map(|i| (0..n).find(|&j| rel[i][j]).unwrap()).collect();
        for i in 0..n {
            assert!(rel[i][i], "{}: not reflexive at {:?}", s.name, ms[i]);
            for j in 0..n {
                assert_eq!(rel[i][j], rel[j][i], "{}: not symmetric", s.name);
                assert_eq!(rel[i][j], class[i] == class[j], "{}: not transitive at {:?} {:?}", s.name, ms[i], ms[j]);
            }
        }
    }
}

#[test]
fn binary_relations_respect_equivalence() {
    for (s, pres) in cases() {
        let Some(r) = s.relation(0) else { continue };
        let ms = members(&s, &pres);
        let rep: Vec<&Tuple> = ms
            .iter()
            .map(|a| ms.iter().find(|b| decide(&pres, &s.equiv, &[a, b]) == Decision::In).unwrap())
            .collect();
        for (i, a) in ms.iter().enumerate() {
            for (j, b) in ms.iter().enumerate() {
                let here = decide(&pres, &r, &[a, b]);
                assert_ne!(here, Decision::Unknown, "{}", s.name);
                assert_eq!(here, decide(&pres, &r, &[rep[i], rep[j]]), "{}: {a:?} {b:?}", s.name);
            }
        }
    }
}

proptest! {
    #[test]
    fn more_stages_only_refine(t in prop::collection::vec(0u64..6, 0..5), u in prop::collection::vec(0u64..6, 0..5), stage in 1usize..4) {
        for (s, pres) in cases() {
            let short = DeltaBudget { max_stage: Some(stage), ..DeltaBudget::default() };
            let d = decide_delta(&pres, &s.dom, &[&t], short).unwrap();
            if d != Decision::Unknown {
                prop_assert_eq!(decide(&pres, &s.dom, &[&t]), d);
            }
            let e = decide_delta(&pres, &s.equiv, &[&t, &u], short).unwrap();
            if e != Decision::Unknown {
                prop_assert_eq!(decide(&pres, &s.equiv, &[&t, &u]), e);
            }
        }
    }

    #[test]
    fn decisions_do_not_depend_on_the_marker(b in prop::collection::btree_set(0u64..6, 1..3), f in 6u64..10, g in 6u64..10) {
        for (s, pres) in cases() {
            let code = |m: Elem| -> Tuple { std::iter::once(m).chain(b.iter().copied()).collect() };
            prop_assert_eq!(decide(&pres, &s.dom, &[&code(f)]), decide(&pres, &s.dom, &[&code(g)]));
        }
    }
}
