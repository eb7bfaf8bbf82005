//! Worked structures, functors and interpretations, and the property suites
//! run against them.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::biinterp::{
    biinterp_to_bitransform, check_char_conditions, check_effective_iso_identity, check_pseudo_inverse,
    check_theta_equivariance, identity_biinterp, twisted, with_swapped_lambda_b, BiInterpData, CheckReport, Shifted,
};
use crate::error::{Error, Result};
use crate::functional::{run, OracleTriple, Outcome};
use crate::functor::{apply_to_morphism, apply_to_presentation, check_functor_laws, constant_functor, CompFunctor};
use crate::interp::{identity_scheme, pairs_scheme, tuples_in, InterpScheme, SideProbe, TupleBound};
use crate::model::{fragment_of, pull_back, Elem, FinMap, MorphismOracle, Presentation, Signature, Tuple};
use crate::transforms::{
    canonical_embed, certify, check_natural_square, collapse, equiv_decide, interp_to_functor, rel_decide, Budget,
    DomPoint, EquivResult, RoundTrip,
};
use crate::interp::Decision;

/// Bounds for one suite run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Profile {
    pub name: &'static str,
    pub fuel: u64,
    pub max_len: usize,
    /// Domain points `(b̄, i)`: `|b̄| ≤ dom_len`, entries below
    /// `dom_entries`, `i < dom_indices`.
    pub dom_len: usize,
    pub dom_entries: u64,
    pub dom_indices: u64,
    pub embed_prefix: u64,
    pub transport_prefix: u64,
    /// Functor laws use every permutation of `0..law_points` moving at most
    /// three points.
    pub law_points: u64,
    pub law_prefix: Elem,
    pub copies: usize,
    pub morphisms: usize,
    pub square_prefix: Elem,
    pub uniform_prefix: Elem,
    pub bi_copies: usize,
    pub bi_prefix: Elem,
    pub alphas: usize,
    pub char_prefix: Elem,
}

impl Profile {
    pub fn quick() -> Self {
        Profile {
            name: "quick",
            fuel: 2_000_000,
            max_len: 16,
            dom_len: 2,
            dom_entries: 3,
            dom_indices: 3,
            embed_prefix: 8,
            transport_prefix: 4,
            law_points: 3,
            law_prefix: 8,
            copies: 2,
            morphisms: 3,
            square_prefix: 6,
            uniform_prefix: 6,
            bi_copies: 2,
            bi_prefix: 5,
            alphas: 2,
            char_prefix: 5,
        }
    }

    pub fn standard() -> Self {
        Profile {
            name: "default",
            fuel: 10_000_000,
            max_len: 32,
            dom_len: 3,
            dom_entries: 4,
            dom_indices: 5,
            embed_prefix: 20,
            transport_prefix: 6,
            law_points: 4,
            law_prefix: 20,
            copies: 3,
            morphisms: 10,
            square_prefix: 12,
            uniform_prefix: 15,
            bi_copies: 3,
            bi_prefix: 10,
            alphas: 5,
            char_prefix: 10,
        }
    }

    pub fn deep() -> Self {
        Profile {
            name: "deep",
            fuel: 50_000_000,
            max_len: 48,
            dom_len: 3,
            dom_entries: 5,
            dom_indices: 6,
            embed_prefix: 30,
            transport_prefix: 8,
            law_points: 5,
            law_prefix: 30,
            copies: 4,
            morphisms: 20,
            square_prefix: 16,
            uniform_prefix: 20,
            bi_copies: 4,
            bi_prefix: 15,
            alphas: 8,
            char_prefix: 15,
        }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "quick" => Some(Self::quick()),
            "default" => Some(Self::standard()),
            "deep" => Some(Self::deep()),
            _ => None,
        }
    }

    fn budget(&self) -> Budget {
        Budget {
            fuel: self.fuel,
            max_len: self.max_len,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    DomDichotomy,
    EquivLaws,
    RelPartition,
    Canonicity,
    FunctorLaws,
    Naturality,
    Uniformity,
    PseudoInverse,
    EffectiveIso,
    CharConditions,
    ThetaEquivariance,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::DomDichotomy => "dom-dichotomy",
            Suite::EquivLaws => "equiv-laws",
            Suite::RelPartition => "rel-partition",
            Suite::Canonicity => "canonicity",
            Suite::FunctorLaws => "functor-laws",
            Suite::Naturality => "naturality",
            Suite::Uniformity => "uniformity",
            Suite::PseudoInverse => "pseudo-inverse",
            Suite::EffectiveIso => "effective-iso",
            Suite::CharConditions => "char-conditions",
            Suite::ThetaEquivariance => "theta-equivariance",
        }
    }
}

const FUNCTOR_SUITES: [Suite; 7] = [
    Suite::DomDichotomy,
    Suite::EquivLaws,
    Suite::RelPartition,
    Suite::Canonicity,
    Suite::FunctorLaws,
    Suite::Naturality,
    Suite::Uniformity,
];

const BIINTERP_SUITES: [Suite; 4] = [
    Suite::PseudoInverse,
    Suite::EffectiveIso,
    Suite::CharConditions,
    Suite::ThetaEquivariance,
];

#[derive(Clone)]
pub struct GalleryItem {
    pub name: String,
    pub summary: String,
    pub base: Presentation,
    pub scheme: Option<InterpScheme>,
    pub functor: Option<CompFunctor>,
    pub biinterp: Option<BiInterpData>,
    /// The base has no automorphisms besides the identity.
    pub rigid: bool,
    pub expected: Vec<Suite>,
}

impl fmt::Debug for GalleryItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GalleryItem({})", self.name)
    }
}

const NAMES: [(&str, &str); 5] = [
    ("constant", "every copy of a pure set goes to the standard order"),
    ("identity-pure-set", "identity interpretation of a pure set"),
    ("identity-order", "identity interpretation of (ω, <)"),
    ("pairs-intersect", "2-subsets of a pure set, related when they share an element"),
    ("identity-biinterp", "a pure set bi-interpreted with itself"),
];

pub fn gallery_list() -> Vec<&'static str> {
    NAMES.iter().map(|(n, _)| *n).collect()
}

fn scheme_item(name: &str, summary: &str, base: Presentation, scheme: InterpScheme, rigid: bool) -> GalleryItem {
    GalleryItem {
        name: name.into(),
        summary: summary.into(),
        base,
        functor: Some(interp_to_functor(&scheme)),
        scheme: Some(scheme),
        biinterp: None,
        rigid,
        expected: FUNCTOR_SUITES.to_vec(),
    }
}

pub fn gallery_item(name: &str) -> Result<GalleryItem> {
    let (name, summary) = *NAMES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Argument(format!("unknown item `{name}`")))?;
    Ok(match name {
        "constant" => GalleryItem {
            name: name.into(),
            summary: summary.into(),
            base: Presentation::pure_set(),
            scheme: None,
            functor: Some(constant_functor(Signature::empty(), Presentation::order())),
            biinterp: None,
            rigid: false,
            expected: FUNCTOR_SUITES.to_vec(),
        },
        "identity-pure-set" => scheme_item(name, summary, Presentation::pure_set(), identity_scheme(&Signature::empty())?, false),
        "identity-order" => {
            let base = Presentation::order();
            let scheme = identity_scheme(base.signature())?;
            scheme_item(name, summary, base, scheme, true)
        }
        "pairs-intersect" => scheme_item(name, summary, Presentation::pure_set(), pairs_scheme(), false),
        _ => {
            let d = identity_biinterp(Presentation::pure_set())?;
            GalleryItem {
                name: name.into(),
                summary: summary.into(),
                base: d.a.clone(),
                scheme: Some(d.b_in_a.clone()),
                functor: None,
                biinterp: Some(d),
                rigid: false,
                expected: BIINTERP_SUITES.to_vec(),
            }
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteLine {
    pub status: Status,
    pub suite: String,
    pub witness: String,
}

impl fmt::Display for SuiteLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.status, self.suite, self.witness)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub lines: Vec<SuiteLine>,
}

impl SuiteReport {
    /// 0 when everything passed, 1 on any failure, otherwise 2.
    pub fn exit_code(&self) -> i32 {
        if self.lines.iter().any(|l| l.status == Status::Fail) {
            1
        } else if self.lines.iter().any(|l| l.status == Status::Unknown) {
            2
        } else {
            0
        }
    }

    pub fn first_failure(&self) -> Option<&SuiteLine> {
        self.lines.iter().find(|l| l.status == Status::Fail)
    }

    pub fn text(&self) -> String {
        self.lines.iter().map(|l| format!("{l}\n")).collect()
    }
}

/// What a suite found: pass, or the first failure.
type Found = Result<std::result::Result<String, String>>;

fn line(item: &str, suite: Suite, found: Found) -> SuiteLine {
    let (status, witness) = match found {
        Ok(Ok(w)) => (Status::Pass, w),
        Ok(Err(w)) => (Status::Fail, w),
        Err(e) if e.is_budget() => (Status::Unknown, e.to_string()),
        Err(e) => (Status::Fail, e.to_string()),
    };
    SuiteLine {
        status,
        suite: format!("{item}/{}", suite.name()),
        witness: witness.replace('\n', " "),
    }
}

fn check_report(r: CheckReport, what: &str) -> Found {
    if let Some(f) = r.failures.first() {
        return Ok(Err(f.to_string()));
    }
    if let Some((s, p, e)) = r.exhausted.first() {
        return Err(Error::fuel(format!("{what} sample={s} point={p}: {e}")));
    }
    Ok(Ok(format!("checked={}", r.checked)))
}

/// Maps `π_k` onto copies of a base, with `π_0` the identity and the rest
/// 3-cycles on small points.
fn copy_maps(count: usize) -> Vec<MorphismOracle> {
    (0..count)
        .map(|k| match k {
            0 => MorphismOracle::identity(),
            k => {
                let k = k as Elem;
                MorphismOracle::finite_support(&FinMap::new([(0, k), (k, k + 1), (k + 1, 0)]).expect("3-cycle"))
                    .expect("permutation")
            }
        })
        .collect()
}

fn copies_of(base: &Presentation, maps: &[MorphismOracle]) -> Vec<Presentation> {
    maps.iter().map(|m| pull_back(base, &m.inverse())).collect()
}

/// Permutations of `0..n` moving at most three points.
fn small_permutations(n: Elem) -> Vec<MorphismOracle> {
    let mut out = vec![MorphismOracle::identity()];
    for a in 0..n {
        for b in a + 1..n {
            out.push(MorphismOracle::transposition(a, b));
            for c in b + 1..n {
                for m in [[(a, b), (b, c), (c, a)], [(a, c), (c, b), (b, a)]] {
                    out.push(MorphismOracle::finite_support(&FinMap::new(m).expect("cycle")).expect("permutation"));
                }
            }
        }
    }
    out
}

/// Shared state for the functor suites of one item.
struct FunctorRun<'a> {
    item: &'a GalleryItem,
    f: &'a CompFunctor,
    p: Profile,
    points: Option<Vec<DomPoint>>,
    /// Index of the first equivalent point, per point.
    classes: Option<Vec<usize>>,
}

impl FunctorRun<'_> {
    /// `Φ*` run directly on `D(b̄)`.
    fn fragment_oracle(&self, b: &[Elem], i: u64) -> Result<Option<bool>> {
        if (1..b.len()).any(|k| b[..k].contains(&b[k])) {
            return Ok(Some(false));
        }
        let d = fragment_of(&self.item.base, b)?;
        Ok(match run(&*self.f.phi_star, &OracleTriple::diagonal(std::sync::Arc::new(d)), i, self.p.fuel) {
            Outcome::Halt(v) => Some(v == i),
            Outcome::Demand => Some(false),
            Outcome::OutOfFuel => None,
            Outcome::Fault(e) => return Err(e),
        })
    }

    fn dom_dichotomy(&mut self) -> Found {
        let bound = TupleBound {
            max_len: self.p.dom_len,
            entries_below: self.p.dom_entries,
        };
        let mut points = Vec::new();
        let mut tested = 0;
        for b in tuples_in(bound) {
            for i in 0..self.p.dom_indices {
                tested += 1;
                let Some(found) = certify(self.f, &self.item.base, &b, i, self.p.fuel)? else {
                    return Err(Error::fuel(format!("dom ({b:?}, {i})")));
                };
                let oracle = self.fragment_oracle(&b, i)?;
                if oracle.is_some_and(|o| o != found.is_some()) {
                    return Ok(Err(format!("({b:?}, {i}) classified {} by the fragment search", !found.is_some())));
                }
                points.extend(found);
            }
        }
        let w = format!("tested={tested} in={} out={}", points.len(), tested - points.len());
        self.points = Some(points);
        Ok(Ok(w))
    }

    fn points(&mut self) -> Result<Vec<DomPoint>> {
        if self.points.is_none() {
            if let Err(w) = self.dom_dichotomy()? {
                return Err(Error::Argument(w));
            }
        }
        Ok(self.points.clone().unwrap_or_default())
    }

    fn equiv(&self, a: &DomPoint, b: &DomPoint) -> Result<bool> {
        match equiv_decide(self.f, &self.item.base, (&a.tuple, a.index), (&b.tuple, b.index), self.p.budget())? {
            EquivResult::Equivalent(_) => Ok(true),
            EquivResult::Inequivalent(_) => Ok(false),
            EquivResult::Unknown => Err(Error::fuel(format!("{:?} ~ {:?}", (&a.tuple, a.index), (&b.tuple, b.index)))),
        }
    }

    fn equiv_laws(&mut self) -> Found {
        let pts = self.points()?;
        let n = pts.len();
        let mut eq = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                eq[a][b] = self.equiv(&pts[a], &pts[b])?;
            }
        }
        let show = |k: usize| format!("({:?},{})", pts[k].tuple, pts[k].index);
        for a in 0..n {
            if !eq[a][a] {
                return Ok(Err(format!("not reflexive at {}", show(a))));
            }
            for b in 0..n {
                if eq[a][b] != eq[b][a] {
                    return Ok(Err(format!("not symmetric at {} {}", show(a), show(b))));
                }
                if !eq[a][b] {
                    continue;
                }
                for (c, &bc) in eq[b].iter().enumerate() {
                    if bc && !eq[a][c] {
                        return Ok(Err(format!("not transitive at {} {} {}", show(a), show(b), show(c))));
                    }
                }
            }
        }
        let classes: Vec<usize> = (0..n).map(|a| (0..n).find(|&b| eq[a][b]).unwrap_or(a)).collect();
        let count = (0..n).filter(|&a| classes[a] == a).count();
        self.classes = Some(classes);
        Ok(Ok(format!("points={n} classes={count}")))
    }

    fn classes(&mut self) -> Result<Vec<usize>> {
        if self.classes.is_none() {
            if let Err(w) = self.equiv_laws()? {
                return Err(Error::Argument(w));
            }
        }
        Ok(self.classes.clone().unwrap_or_default())
    }

    fn relations(&self) -> Vec<(usize, usize)> {
        let count = self.f.target.relation_count().unwrap_or(2);
        (0..count).filter_map(|r| Some((r, self.f.target.arity(r)?))).collect()
    }

    fn rel_partition(&mut self) -> Found {
        let pts = self.points()?;
        let classes = self.classes()?;
        let n = pts.len();
        let mut decided = 0;
        for (rel, arity) in self.relations() {
            let mut by_class: std::collections::HashMap<Vec<usize>, bool> = Default::default();
            let mut idx = vec![0usize; arity];
            if n == 0 {
                continue;
            }
            loop {
                let args: Vec<(&[Elem], u64)> = idx.iter().map(|&k| (pts[k].tuple.as_slice(), pts[k].index)).collect();
                let v = match rel_decide(self.f, &self.item.base, rel, &args, self.p.budget())? {
                    Decision::In => true,
                    Decision::Out => false,
                    Decision::Unknown => return Err(Error::fuel(format!("R{rel} at {args:?} is in neither R nor Q"))),
                };
                decided += 1;
                let key: Vec<usize> = idx.iter().map(|&k| classes[k]).collect();
                if let Some(&w) = by_class.get(&key) {
                    if w != v {
                        return Ok(Err(format!("R{rel} at {args:?} differs from an equivalent tuple")));
                    }
                } else {
                    by_class.insert(key, v);
                }
                let Some(p) = (0..arity).rev().find(|&p| idx[p] + 1 < n) else { break };
                idx[p] += 1;
                idx[p + 1..].iter_mut().for_each(|x| *x = 0);
            }
        }
        let listed = self.listed_sides()?;
        Ok(listed.map(|w| format!("decided={decided}{w}")))
    }

    /// Both listed sides of each relation of the scheme, on tuples of class
    /// representatives: exactly one side fires.
    fn listed_sides(&self) -> Result<std::result::Result<String, String>> {
        let Some(scheme) = &self.item.scheme else {
            return Ok(Ok(String::new()));
        };
        let reps = collapse(scheme, &self.item.base, self.p.transport_prefix as usize, self.p.fuel)?;
        let t = OracleTriple::identity_on(&self.item.base);
        let mut checked = 0;
        for (rel, arity) in self.relations() {
            let Some(d) = scheme.relation(rel) else { continue };
            if d.as_lists().is_none() {
                continue;
            }
            for args in tuples_in(TupleBound { max_len: arity, entries_below: reps.len() as u64 }) {
                if args.len() != arity {
                    continue;
                }
                let blocks: Vec<&[Elem]> = args.iter().map(|&a| reps[a as usize].as_slice()).collect();
                let mut q = crate::functional::Query::new(&t, self.p.fuel);
                let (pos, neg) = d
                    .sides_within(&mut SideProbe::left(&mut q), &blocks, 64)
                    .map_err(crate::interp::stop_to_error)?;
                checked += 1;
                if pos == neg {
                    return Ok(Err(format!("listed R{rel} at classes {args:?}: positive={pos} negative={neg}")));
                }
            }
        }
        Ok(Ok(format!(" listed={checked}")))
    }

    fn canonicity(&mut self) -> Found {
        let budget = self.p.budget();
        let emb = (0..self.p.embed_prefix)
            .map(|i| canonical_embed(self.f, &self.item.base, i, budget))
            .collect::<Result<Vec<_>>>()?;
        for a in 0..emb.len() {
            for b in a + 1..emb.len() {
                if self.equiv(&emb[a], &emb[b])? {
                    return Ok(Err(format!("embedding identifies {a} and {b}")));
                }
            }
        }
        let pts = self.points()?;
        let classes = self.classes()?;
        for (k, p) in pts.iter().enumerate().filter(|&(k, _)| classes[k] == k) {
            let mut hits = 0;
            for e in &emb {
                hits += self.equiv(p, e)? as usize;
            }
            if hits != 1 {
                return Ok(Err(format!("class of ({:?},{}) holds {hits} embedded points", pts[k].tuple, p.index)));
            }
        }
        let image = apply_to_presentation(self.f, &self.item.base, self.p.fuel);
        let k = self.p.transport_prefix.min(emb.len() as u64);
        let mut facts = 0;
        for (rel, arity) in self.relations() {
            for args in tuples_in(TupleBound { max_len: arity, entries_below: k }) {
                if args.len() != arity {
                    continue;
                }
                let pts: Vec<(&[Elem], u64)> = args.iter().map(|&a| (emb[a as usize].tuple.as_slice(), emb[a as usize].index)).collect();
                let got = rel_decide(self.f, &self.item.base, rel, &pts, budget)?;
                let want = image.holds(rel, &args)?;
                facts += 1;
                match got {
                    Decision::Unknown => return Err(Error::fuel(format!("R{rel}{args:?} on embedded points"))),
                    d if (d == Decision::In) != want => {
                        return Ok(Err(format!("R{rel}{args:?}: transported {d:?}, target says {want}")))
                    }
                    _ => {}
                }
            }
        }
        Ok(Ok(format!("embedded={} facts={facts}", emb.len())))
    }

    fn functor_laws(&self) -> Found {
        let perms = small_permutations(self.p.law_points);
        let samples: Vec<_> = perms
            .iter()
            .enumerate()
            .map(|(k, g)| (g.clone(), perms[(k * 7 + 3) % perms.len()].clone()))
            .collect();
        let r = check_functor_laws(self.f, &self.item.base, &samples, self.p.law_prefix, self.p.fuel);
        if let Some(v) = r.violations.first() {
            return Ok(Err(v.to_string()));
        }
        if let Some((s, p)) = r.exhausted.first() {
            return Err(Error::fuel(format!("functor laws sample={s} point={p}")));
        }
        Ok(Ok(format!("samples={} checked={}", samples.len(), r.checked)))
    }

    fn naturality(&self) -> Found {
        let maps = copy_maps(self.p.copies);
        let copies = copies_of(&self.item.base, &maps);
        let rt = RoundTrip::new(self.f);
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut checked = 0;
        for s in 0..self.p.morphisms {
            let (a, b) = (rng.gen_range(0..copies.len()), rng.gen_range(0..copies.len()));
            let rho = if self.item.rigid {
                MorphismOracle::identity()
            } else {
                let x = rng.gen_range(0..3);
                MorphismOracle::transposition(x, rng.gen_range(x + 1..4))
            };
            let h = maps[b].compose(&rho).compose(&maps[a].inverse());
            let r = check_natural_square(&rt, &copies[a], &copies[b], &h, self.p.square_prefix, self.p.fuel)?;
            if let Some(m) = r.mismatches.first() {
                return Ok(Err(format!("sample={s} {m}")));
            }
            if let Some((p, e)) = r.exhausted.first() {
                return Err(Error::fuel(format!("square sample={s} point={p}: {e}")));
            }
            checked += r.checked;
        }
        Ok(Ok(format!("morphisms={} checked={checked}", self.p.morphisms)))
    }

    fn uniformity(&self) -> Found {
        let pi = copy_maps(3).pop().expect("three maps");
        let x = self.item.base.clone();
        let y = pull_back(&x, &pi.inverse());
        let fx = apply_to_presentation(self.f, &x, self.p.fuel);
        let fy = apply_to_presentation(self.f, &y, self.p.fuel);
        let fpi = apply_to_morphism(self.f, &x, &pi, &y, self.p.fuel);
        let k = self.p.uniform_prefix;
        let mut images = Vec::new();
        for a in 0..k {
            let v = fpi.forward(a)?;
            if let Some(b) = images.iter().position(|&w| w == v) {
                return Ok(Err(format!("F(π) sends {b} and {a} to {v}")));
            }
            images.push(v);
        }
        let mut facts = 0;
        for (rel, arity) in self.relations() {
            for args in tuples_in(TupleBound { max_len: arity, entries_below: k }) {
                if args.len() != arity {
                    continue;
                }
                let moved: Tuple = args.iter().map(|&a| images[a as usize]).collect();
                facts += 1;
                if fx.holds(rel, &args)? != fy.holds(rel, &moved)? {
                    return Ok(Err(format!("R{rel}{args:?} not preserved by F(π) (image {moved:?})")));
                }
            }
        }
        Ok(Ok(format!("points={k} facts={facts}")))
    }
}

fn biinterp_suite(d: &BiInterpData, rigid: bool, suite: Suite, p: &Profile) -> Found {
    let t = biinterp_to_bitransform(d);
    let maps = copy_maps(p.bi_copies);
    let a_copies = copies_of(&d.a, &maps);
    let b_copies = copies_of(&d.b, &maps);
    let js = vec![MorphismOracle::transposition(0, 1), maps.last().cloned().unwrap_or_else(MorphismOracle::identity)];
    match suite {
        Suite::PseudoInverse => {
            let r = check_pseudo_inverse(&t, &a_copies, &b_copies, p.bi_prefix, p.fuel)?;
            let found = check_report(r, "pseudo-inverse")?;
            let Ok(w) = found else { return Ok(found) };
            let broken = check_pseudo_inverse(&with_swapped_lambda_b(&t), &a_copies, &b_copies, p.bi_prefix, p.fuel)?;
            Ok(match broken.failures.first() {
                Some(f) => Ok(format!("{w} swapped-lambda-caught-at {f}")),
                None => Err("swapped Λ_B passed".into()),
            })
        }
        Suite::EffectiveIso => {
            let mut r = check_effective_iso_identity(&t.f, &t.g, &t.lambda_a, &a_copies, &js, p.bi_prefix, p.fuel)?;
            let s = check_effective_iso_identity(&t.g, &t.f, &t.lambda_b, &b_copies, &js, p.bi_prefix, p.fuel)?;
            r.checked += s.checked;
            r.failures.extend(s.failures);
            r.exhausted.extend(s.exhausted);
            check_report(r, "effective-iso")
        }
        Suite::CharConditions => {
            let sigmas: Vec<MorphismOracle> = if rigid {
                vec![MorphismOracle::identity()]
            } else {
                (0..p.alphas as Elem)
                    .map(|k| match k {
                        0 => MorphismOracle::identity(),
                        k => MorphismOracle::transposition(0, k),
                    })
                    .collect()
            };
            let mut checked = 0;
            for (k, s) in sigmas.iter().enumerate() {
                let r = check_char_conditions(d, &twisted(&d.alpha, s), &d.beta, p.char_prefix, p.fuel)?;
                checked += r.checked;
                if let Err(w) = check_report(r, "char-conditions")? {
                    return Ok(Err(format!("alpha={k} {w}")));
                }
            }
            let mut bad = d.clone();
            bad.g = std::sync::Arc::new(Shifted(d.g.clone(), 1));
            let r = check_char_conditions(&bad, &bad.alpha, &bad.beta, p.char_prefix, p.fuel)?;
            Ok(match r.failures.first() {
                Some(f) => Ok(format!("alphas={} checked={checked} shifted-g-caught-at {f}", sigmas.len())),
                None => Err("shifted g passed".into()),
            })
        }
        Suite::ThetaEquivariance => check_report(check_theta_equivariance(d, &t, &a_copies, &js, p.bi_prefix, p.fuel)?, "theta"),
        other => Err(Error::Argument(format!("{} does not apply to a bi-interpretation", other.name()))),
    }
}

/// An item for a loaded scheme over a pure set (empty signature) or the
/// standard order (one binary relation).
pub fn scheme_gallery_item(name: &str, scheme: InterpScheme) -> Result<GalleryItem> {
    let (base, rigid) = match scheme.base.finite_arities() {
        Some([]) => (Presentation::pure_set(), false),
        Some([2]) => (Presentation::order(), true),
        _ => {
            return Err(Error::Argument(format!(
                "no gallery base for signature {:?}",
                scheme.base
            )))
        }
    };
    Ok(scheme_item(name, "loaded scheme", base, scheme, rigid))
}

/// Runs every expected suite of `item`.
pub fn run_item(item: &GalleryItem, p: &Profile) -> SuiteReport {
    let mut lines = Vec::new();
    if let Some(d) = &item.biinterp {
        for &s in &item.expected {
            lines.push(line(&item.name, s, biinterp_suite(d, item.rigid, s, p)));
        }
    }
    if let Some(f) = &item.functor {
        let mut fr = FunctorRun {
            item,
            f,
            p: *p,
            points: None,
            classes: None,
        };
        for &s in &item.expected {
            let found = match s {
                Suite::DomDichotomy => fr.dom_dichotomy(),
                Suite::EquivLaws => fr.equiv_laws(),
                Suite::RelPartition => fr.rel_partition(),
                Suite::Canonicity => fr.canonicity(),
                Suite::FunctorLaws => fr.functor_laws(),
                Suite::Naturality => fr.naturality(),
                Suite::Uniformity => fr.uniformity(),
                other => Err(Error::Argument(format!("{} needs a bi-interpretation", other.name()))),
            };
            lines.push(line(&item.name, s, found));
        }
    }
    SuiteReport { lines }
}

/// Runs the expected suites of the named item.
pub fn run_suite(name: &str, p: &Profile) -> Result<SuiteReport> {
    Ok(run_item(&gallery_item(name)?, p))
}
