//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use effint::biinterp::{
    biinterp_to_bitransform, check_char_conditions, check_effective_iso_identity, check_pseudo_inverse, identity_biinterp,
    twisted, with_swapped_lambda_b,
};
use effint::functor::{apply_to_morphism, apply_to_presentation, check_functor_laws, constant_functor, CompFunctor};
use effint::gallery::{gallery_list, run_suite, Profile};
use effint::interp::{identity_scheme, pairs_scheme, Decision, InterpScheme};
use effint::transforms::{
    canonical_embed, certify, check_natural_square, equiv_decide, interp_to_functor, rel_decide, Budget, DomPoint,
    EquivResult, RoundTrip,
};
use effint::{pull_back, Elem, FinMap, MorphismOracle, Presentation, Signature, Tuple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FUEL: u64 = 10_000_000;

fn budget() -> Budget {
    Budget { fuel: FUEL, max_len: 32 }
}

/// What a point of an item's domain names in the image structure.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Named {
    Index(u64),
    Elem(Elem),
    Set(BTreeSet<Elem>),
}

/// 2-subsets by largest element, then smallest.
fn pair_order(count: usize) -> Vec<BTreeSet<Elem>> {
    (1..).flat_map(|b| (0..b).map(move |a| BTreeSet::from([a, b]))).take(count).collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Constant,
    Identity,
    Pairs,
}

struct Item {
    name: &'static str,
    kind: Kind,
    base: Presentation,
    f: CompFunctor,
}

fn items() -> Vec<Item> {
    let order = Presentation::order();
    vec![
        Item {
            name: "constant",
            kind: Kind::Constant,
            base: Presentation::pure_set(),
            f: constant_functor(Signature::empty(), order.clone()),
        },
        Item {
            name: "identity-pure-set",
            kind: Kind::Identity,
            base: Presentation::pure_set(),
            f: interp_to_functor(&identity_scheme(&Signature::empty()).unwrap()),
        },
        Item {
            name: "identity-order",
            kind: Kind::Identity,
            base: order.clone(),
            f: interp_to_functor(&identity_scheme(order.signature()).unwrap()),
        },
        Item {
            name: "pairs-intersect",
            kind: Kind::Pairs,
            base: Presentation::pure_set(),
            f: interp_to_functor(&pairs_scheme()),
        },
    ]
}

impl Item {
    /// Oracle for the domain and for what its points name: identity points
    /// name `b̄[i]` and need `i < |b̄|`; pairs points name the `i`-th set of
    /// positions and need both positions inside `b̄`; constant points name
    /// their index.
    fn oracle(&self, b: &[Elem], i: u64, pairs: &[BTreeSet<Elem>]) -> Option<Named> {
        if (1..b.len()).any(|k| b[..k].contains(&b[k])) {
            return None;
        }
        match self.kind {
            Kind::Constant => Some(Named::Index(i)),
            Kind::Identity => b.get(i as usize).map(|&x| Named::Elem(x)),
            Kind::Pairs => {
                let s = &pairs[i as usize];
                s.iter()
                    .map(|&p| b.get(p as usize).copied())
                    .collect::<Option<BTreeSet<Elem>>>()
                    .map(Named::Set)
            }
        }
    }

    /// What the `t`-th element of `F(base)` is.
    fn element(&self, t: u64, pairs: &[BTreeSet<Elem>]) -> Named {
        match self.kind {
            Kind::Constant => Named::Index(t),
            Kind::Identity => Named::Elem(t),
            Kind::Pairs => Named::Set(pairs[t as usize].clone()),
        }
    }

    /// The binary relation of the target, if any, on named elements.
    fn relation(&self, a: &Named, b: &Named) -> Option<bool> {
        match (self.kind, a, b) {
            (Kind::Constant, Named::Index(x), Named::Index(y)) => Some(x < y),
            (Kind::Identity, Named::Elem(x), Named::Elem(y)) => (self.base.signature().arity(0) == Some(2)).then_some(x < y),
            (Kind::Pairs, Named::Set(s), Named::Set(t)) => Some(!s.is_disjoint(t)),
            _ => None,
        }
    }
}

fn exhaustive_tuples() -> Vec<Tuple> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..3 {
        layer = layer
            .iter()
            .flat_map(|t: &Tuple| (0..4).map(move |x| [t.clone(), vec![x]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Certified points with what they name, or the first problem.
fn dom_points(it: &Item, pairs: &[BTreeSet<Elem>]) -> Result<Vec<(DomPoint, Named)>, String> {
    let mut pts = Vec::new();
    for b in exhaustive_tuples() {
        for i in 0..5 {
            let Some(found) = certify(&it.f, &it.base, &b, i, FUEL).map_err(|e| e.to_string())? else {
                return Err(format!("{}: ({b:?}, {i}) unknown", it.name));
            };
            let want = it.oracle(&b, i, pairs);
            if found.is_some() != want.is_some() {
                return Err(format!("{}: ({b:?}, {i}) in={} oracle={}", it.name, found.is_some(), want.is_some()));
            }
            if let (Some(p), Some(n)) = (found, want) {
                pts.push((p, n));
            }
        }
    }
    Ok(pts)
}

fn equiv(f: &CompFunctor, base: &Presentation, a: &DomPoint, b: &DomPoint) -> Result<bool, String> {
    match equiv_decide(f, base, (&a.tuple, a.index), (&b.tuple, b.index), budget()).map_err(|e| e.to_string())? {
        EquivResult::Equivalent(_) => Ok(true),
        EquivResult::Inequivalent(_) => Ok(false),
        EquivResult::Unknown => Err(format!("unknown: {:?} ~ {:?}", a, b)),
    }
}

fn rel(f: &CompFunctor, base: &Presentation, a: &DomPoint, b: &DomPoint) -> Result<bool, String> {
    match rel_decide(f, base, 0, &[(&a.tuple, a.index), (&b.tuple, b.index)], budget()).map_err(|e| e.to_string())? {
        Decision::In => Ok(true),
        Decision::Out => Ok(false),
        Decision::Unknown => Err(format!("R0 at {a:?}, {b:?} in neither R nor Q")),
    }
}

type Outcome = Result<String, String>;
type Criterion<'a> = (u32, &'static str, u64, Box<dyn Fn() -> Outcome + 'a>);

fn criterion_1(its: &[Item], pairs: &[BTreeSet<Elem>]) -> Outcome {
    let mut total = 0;
    for it in its.iter().filter(|i| matches!(i.name, "identity-pure-set" | "pairs-intersect")) {
        total += dom_points(it, pairs)?.len();
    }
    Ok(format!("2 functors x 425 points, {total} in, 0 unknown, oracle agrees"))
}

fn criterion_2(its: &[Item], pairs: &[BTreeSet<Elem>]) -> Outcome {
    let mut checked = 0;
    for it in its.iter().filter(|i| matches!(i.name, "identity-pure-set" | "pairs-intersect")) {
        let pts = dom_points(it, pairs)?;
        let n = pts.len();
        let mut eq = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                eq[a][b] = equiv(&it.f, &it.base, &pts[a].0, &pts[b].0)?;
                if eq[a][b] != (pts[a].1 == pts[b].1) {
                    return Err(format!("{}: {:?} ~ {:?} is {}", it.name, pts[a].0, pts[b].0, eq[a][b]));
                }
            }
        }
        for a in 0..n {
            if !eq[a][a] {
                return Err(format!("{}: not reflexive at {:?}", it.name, pts[a].0));
            }
            for b in 0..n {
                if eq[a][b] != eq[b][a] {
                    return Err(format!("{}: not symmetric", it.name));
                }
                for c in 0..n {
                    checked += 1;
                    if eq[a][b] && eq[b][c] && !eq[a][c] {
                        return Err(format!("{}: not transitive", it.name));
                    }
                }
            }
        }
    }
    Ok(format!("{checked} triples, 0 violations"))
}

fn criterion_3(its: &[Item], pairs: &[BTreeSet<Elem>]) -> Outcome {
    let it = its.iter().find(|i| i.name == "pairs-intersect").unwrap();
    let pts = dom_points(it, pairs)?;
    let (mut r, mut q) = (0, 0);
    let mut by_named = std::collections::BTreeMap::new();
    for (a, na) in &pts {
        for (b, nb) in &pts {
            let v = rel(&it.f, &it.base, a, b)?;
            if Some(v) != it.relation(na, nb) {
                return Err(format!("R0 at {a:?}, {b:?} is {v}"));
            }
            if *by_named.entry((na.clone(), nb.clone())).or_insert(v) != v {
                return Err(format!("equivalent substitution changes R0 at {a:?}, {b:?}"));
            }
            if v {
                r += 1
            } else {
                q += 1
            }
        }
    }
    Ok(format!("{} tuples: |R|={r} |Q|={q}, disjoint, covering, congruent", r + q))
}

fn criterion_4(its: &[Item], pairs: &[BTreeSet<Elem>]) -> Outcome {
    for it in its {
        let emb = (0..20)
            .map(|i| canonical_embed(&it.f, &it.base, i, budget()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        for a in 0..20 {
            for b in a + 1..20 {
                if equiv(&it.f, &it.base, &emb[a], &emb[b])? {
                    return Err(format!("{}: 𝔉({a}) ~ 𝔉({b})", it.name));
                }
            }
        }
        for (p, named) in dom_points(it, pairs)? {
            let mut hits = Vec::new();
            for (i, e) in emb.iter().enumerate() {
                if equiv(&it.f, &it.base, &p, e)? {
                    hits.push(i as u64);
                }
            }
            if hits.len() != 1 || it.element(hits[0], pairs) != named {
                return Err(format!("{}: class of {p:?} holds 𝔉-images {hits:?}", it.name));
            }
        }
        for a in 0..6 {
            for b in 0..6 {
                let Some(want) = it.relation(&it.element(a, pairs), &it.element(b, pairs)) else { continue };
                if rel(&it.f, &it.base, &emb[a as usize], &emb[b as usize])? != want {
                    return Err(format!("{}: transported R0({a},{b}) differs", it.name));
                }
            }
        }
    }
    Ok(format!("{} functors, injective on 20, one image per class, 6x6 tables match", its.len()))
}

/// Permutations of `0..4` moving at most three points.
fn small_perms() -> Vec<MorphismOracle> {
    let mut out = vec![MorphismOracle::identity()];
    for a in 0..4 {
        for b in a + 1..4 {
            out.push(MorphismOracle::transposition(a, b));
            for c in b + 1..4 {
                for m in [[(a, b), (b, c), (c, a)], [(a, c), (c, b), (b, a)]] {
                    out.push(MorphismOracle::finite_support(&FinMap::new(m).unwrap()).unwrap());
                }
            }
        }
    }
    out
}

fn criterion_5(its: &[Item]) -> Outcome {
    let perms = small_perms();
    let samples: Vec<_> = perms.iter().flat_map(|g| perms.iter().map(move |f| (g.clone(), f.clone()))).collect();
    let mut functors: Vec<(String, CompFunctor, Presentation)> =
        its.iter().map(|i| (i.name.to_string(), i.f.clone(), i.base.clone())).collect();
    let d = identity_biinterp(Presentation::pure_set()).map_err(|e| e.to_string())?;
    let t = biinterp_to_bitransform(&d);
    functors.push(("bi-transform F".into(), t.f, d.a.clone()));
    functors.push(("bi-transform G".into(), t.g, d.b.clone()));
    let mut checked = 0;
    for (name, f, base) in &functors {
        let r = check_functor_laws(f, base, &samples, 20, FUEL);
        if let Some(v) = r.violations.first() {
            return Err(format!("{name}: {v}"));
        }
        if !r.exhausted.is_empty() {
            return Err(format!("{name}: out of fuel at {:?}", r.exhausted[0]));
        }
        checked += r.checked;
    }
    Ok(format!("{} functors x {} samples, {checked} checks, 0 violations", functors.len(), samples.len()))
}

fn three_cycle(k: Elem) -> MorphismOracle {
    MorphismOracle::finite_support(&FinMap::new([(0, k), (k, k + 1), (k + 1, 0)]).unwrap()).unwrap()
}

fn criterion_6(its: &[Item]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for it in its {
        let maps = [MorphismOracle::identity(), three_cycle(1), three_cycle(2)];
        let copies: Vec<Presentation> = maps.iter().map(|m| pull_back(&it.base, &m.inverse())).collect();
        let rigid = it.base.signature().relation_count() != Some(0);
        let rt = RoundTrip::new(&it.f);
        for s in 0..10 {
            let (a, b) = (rng.gen_range(0..3), rng.gen_range(0..3));
            let rho = if rigid {
                MorphismOracle::identity()
            } else {
                let x = rng.gen_range(0..3);
                MorphismOracle::transposition(x, rng.gen_range(x + 1..4))
            };
            let h = maps[b].compose(&rho).compose(&maps[a].inverse());
            let r = check_natural_square(&rt, &copies[a], &copies[b], &h, 12, FUEL).map_err(|e| e.to_string())?;
            if let Some(m) = r.mismatches.first() {
                return Err(format!("{} sample {s}: {m}", it.name));
            }
            if let Some((p, e)) = r.exhausted.first() {
                return Err(format!("{} sample {s} point {p}: {e}", it.name));
            }
            checked += r.checked;
        }
    }
    Ok(format!("{} functors x 10 morphisms, {checked} points, 0 mismatches", its.len()))
}

fn criterion_7() -> Outcome {
    let d = identity_biinterp(Presentation::pure_set()).map_err(|e| e.to_string())?;
    let t = biinterp_to_bitransform(&d);
    let maps = [MorphismOracle::identity(), three_cycle(1), three_cycle(2)];
    let copies: Vec<Presentation> = maps.iter().map(|m| pull_back(&d.a, &m.inverse())).collect();
    let js = [MorphismOracle::transposition(0, 1), three_cycle(2)];
    let r = check_pseudo_inverse(&t, &copies, &copies, 10, FUEL).map_err(|e| e.to_string())?;
    if !r.passed() {
        return Err(format!("pseudo-inverse: {:?}", r.failures.first()));
    }
    for (name, first, second, lambda) in [("GF", &t.f, &t.g, &t.lambda_a), ("FG", &t.g, &t.f, &t.lambda_b)] {
        let r = check_effective_iso_identity(first, second, lambda, &copies, &js, 10, FUEL).map_err(|e| e.to_string())?;
        if !r.passed() {
            return Err(format!("{name} ≅ id: {:?}", r.failures.first()));
        }
    }
    let broken = check_pseudo_inverse(&with_swapped_lambda_b(&t), &copies, &copies, 10, FUEL).map_err(|e| e.to_string())?;
    match broken.failures.first() {
        Some(w) => Ok(format!("3 copies, prefix 10; swapped Λ_B fails at {w}")),
        None => Err("swapped Λ_B passed".into()),
    }
}

fn criterion_8() -> Outcome {
    let d = identity_biinterp(Presentation::pure_set()).map_err(|e| e.to_string())?;
    let sigmas = [
        MorphismOracle::identity(),
        MorphismOracle::transposition(0, 1),
        MorphismOracle::transposition(2, 5),
        three_cycle(1),
        three_cycle(3),
    ];
    let mut checked = 0;
    for s in &sigmas {
        let r = check_char_conditions(&d, &twisted(&d.alpha, s), &twisted(&d.beta, s), 10, FUEL).map_err(|e| e.to_string())?;
        if !r.passed() {
            return Err(format!("{:?}", r.failures.first().map(|f| f.to_string()).or(r.exhausted.first().map(|e| e.2.clone()))));
        }
        checked += r.checked;
    }
    Ok(format!("5 twisted alpha/beta pairs, {checked} equations"))
}

fn criterion_9(its: &[Item]) -> Outcome {
    let pi = three_cycle(2).compose(&MorphismOracle::transposition(1, 4));
    let mut functors: Vec<(String, CompFunctor, Presentation)> = Vec::new();
    for it in its {
        functors.push((format!("F[{}]", it.name), it.f.clone(), it.base.clone()));
        functors.push((format!("round trip of {}", it.name), RoundTrip::new(&it.f).image, it.base.clone()));
    }
    let d = identity_biinterp(Presentation::pure_set()).map_err(|e| e.to_string())?;
    let t = biinterp_to_bitransform(&d);
    functors.push(("bi-transform F".into(), t.f, d.a.clone()));
    functors.push(("bi-transform G".into(), t.g, d.b.clone()));
    let scheme: InterpScheme = pairs_scheme();
    functors.push(("reloaded pairs".into(), interp_to_functor(&scheme), Presentation::pure_set()));
    let mut facts = 0;
    for (name, f, x) in &functors {
        let y = pull_back(x, &pi.inverse());
        let fx = apply_to_presentation(f, x, FUEL);
        let fy = apply_to_presentation(f, &y, FUEL);
        let fpi = apply_to_morphism(f, x, &pi, &y, FUEL);
        let img: Vec<Elem> = (0..15).map(|a| fpi.forward(a)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        if img.iter().collect::<BTreeSet<_>>().len() != img.len() {
            return Err(format!("{name}: F(π) not injective on 15"));
        }
        for r in 0..f.target.relation_count().unwrap_or(0) {
            if f.target.arity(r) != Some(2) {
                continue;
            }
            for a in 0..15 {
                for b in 0..15 {
                    facts += 1;
                    let l = fx.holds(r, &[a, b]).map_err(|e| e.to_string())?;
                    let rr = fy.holds(r, &[img[a as usize], img[b as usize]]).map_err(|e| e.to_string())?;
                    if l != rr {
                        return Err(format!("{name}: R{r}({a},{b}) not preserved"));
                    }
                }
            }
        }
    }
    Ok(format!("{} transforms on two copies, {facts} facts preserved", functors.len()))
}

fn criterion_10() -> Outcome {
    let p = Profile::standard();
    for name in gallery_list() {
        let a = run_suite(name, &p).map_err(|e| e.to_string())?.text();
        let b = run_suite(name, &p).map_err(|e| e.to_string())?.text();
        if a != b {
            return Err(format!("{name}: reports differ"));
        }
    }
    Ok(format!("{} items, byte-identical reports", gallery_list().len()))
}

fn main() -> ExitCode {
    // accept and ignore libtest arguments
    let its = items();
    let pairs = pair_order(64);
    let criteria: Vec<Criterion> = vec![
        (1, "dom dichotomy", 30, Box::new(|| criterion_1(&its, &pairs))),
        (2, "equivalence laws", 60, Box::new(|| criterion_2(&its, &pairs))),
        (3, "R/Q partition and congruence", 60, Box::new(|| criterion_3(&its, &pairs))),
        (4, "canonical embedding", 30, Box::new(|| criterion_4(&its, &pairs))),
        (5, "functor laws", 60, Box::new(|| criterion_5(&its))),
        (6, "round-trip naturality", 120, Box::new(|| criterion_6(&its))),
        (7, "bi-transformability", 60, Box::new(criterion_7)),
        (8, "characterization invariance", 30, Box::new(criterion_8)),
        (9, "uniformity", 30, Box::new(|| criterion_9(&its))),
        (10, "determinism", 600, Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (n, what, limit, run) in &criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let out = match out {
            Ok(w) if took > Duration::from_secs(*limit) => Err(format!("{w}; took {took:.1?}, limit {limit}s")),
            o => o,
        };
        match out {
            Ok(w) => println!("PASS criterion {n} ({what}): {w} [{took:.1?}]"),
            Err(w) => {
                failed += 1;
                println!("FAIL criterion {n} ({what}): {w} [{took:.1?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
