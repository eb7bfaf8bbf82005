//! Bi-interpretations and the pseudo-inverse functors they induce.
//!
//! Codes nest: a code over `A` is a tuple of elements, a code over the
//! interpreted structure is a tuple of codes over `A`, and so on. Points of
//! an interpreted structure are named by the representative of their class.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functional::{functional, run, FunctionalRef, OracleTriple, Outcome, Query, Stop};
use crate::functor::{apply_to_morphism, apply_to_presentation, CompFunctor};
use crate::interp::{identity_scheme, stop_to_error, ImageProbe, InterpScheme, Probe, SideProbe};
use crate::model::{pull_back, Elem, MorphismOracle, Presentation, Tuple};
use crate::transforms::{collapse, interp_to_functor, CollapseView};

/// A code over codes over the base.
pub type Code2 = Vec<Tuple>;
/// One more level of nesting.
pub type Code3 = Vec<Code2>;

/// A map from twice-nested codes to base elements, computed from the base's
/// diagram.
pub trait UriMap: Send + Sync {
    fn eval(&self, probe: &mut dyn Probe, x: &[Tuple]) -> Result<Elem, Stop>;
}

/// The point named by the first entry of the first entry: the composite of
/// two identity interpretations.
pub struct DecodeTwice;

impl UriMap for DecodeTwice {
    fn eval(&self, probe: &mut dyn Probe, x: &[Tuple]) -> Result<Elem, Stop> {
        probe.tick()?;
        x.get(1)
            .and_then(|z| z.get(1))
            .copied()
            .ok_or_else(|| Stop::Fault(Error::Argument(format!("{x:?} is not a doubled identity code"))))
    }
}

/// `m` followed by `x ↦ x + by`.
pub struct Shifted(pub Arc<dyn UriMap>, pub Elem);

impl UriMap for Shifted {
    fn eval(&self, probe: &mut dyn Probe, x: &[Tuple]) -> Result<Elem, Stop> {
        Ok(self.0.eval(probe, x)? + self.1)
    }
}

/// A map from codes over one structure to elements of another.
pub type LevelMap = Arc<dyn Fn(&[Elem]) -> Result<Elem> + Send + Sync>;

/// Mutual interpretations of `A` and `B` with the maps `g` (over `A`) and
/// `h` (over `B`) from the doubly interpreted structures back to the
/// originals, and reference isomorphisms `alpha: Dom_A^B → A`,
/// `beta: Dom_B^A → B`.
#[derive(Clone)]
pub struct BiInterpData {
    pub name: String,
    pub a: Presentation,
    pub b: Presentation,
    /// Base `B`, target `A`.
    pub a_in_b: InterpScheme,
    /// Base `A`, target `B`.
    pub b_in_a: InterpScheme,
    pub g: Arc<dyn UriMap>,
    pub h: Arc<dyn UriMap>,
    pub alpha: LevelMap,
    pub beta: LevelMap,
}

impl fmt::Debug for BiInterpData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiInterpData({})", self.name)
    }
}

fn decode_identity_code() -> LevelMap {
    Arc::new(|z: &[Elem]| {
        z.get(1)
            .copied()
            .filter(|_| z.len() == 2)
            .ok_or_else(|| Error::Argument(format!("{z:?} is not an identity code")))
    })
}

/// A structure bi-interpreted with itself through the identity
/// interpretation both ways.
pub fn identity_biinterp(base: Presentation) -> Result<BiInterpData> {
    let sig = base.signature().clone();
    Ok(BiInterpData {
        name: "identity".into(),
        a: base.clone(),
        b: base,
        a_in_b: identity_scheme(&sig)?,
        b_in_a: identity_scheme(&sig)?,
        g: Arc::new(DecodeTwice),
        h: Arc::new(DecodeTwice),
        alpha: decode_identity_code(),
        beta: decode_identity_code(),
    })
}

/// `F: Iso(A) → Iso(B)`, `G: Iso(B) → Iso(A)` and the operators of
/// `Λ_A: Ã → G(F(Ã))` and `Λ_B: B̃ → F(G(B̃))`.
#[derive(Clone)]
pub struct BiTransformData {
    pub f: CompFunctor,
    pub g: CompFunctor,
    pub lambda_a: FunctionalRef,
    pub lambda_b: FunctionalRef,
}

impl fmt::Debug for BiTransformData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiTransformData({}, {})", self.f.name, self.g.name)
    }
}

/// `Λ = Γ^{F(X)} ∘ Ω̃^X ∘ Θ^X` on a copy `X` read from the left of the
/// oracle: the first class `t` of `back` on `F(X)` whose representative,
/// with each entry replaced by the representative of `forward` on `X` it
/// indexes, is sent to the input by `uri`.
fn lambda_functional(f: &CompFunctor, forward: &InterpScheme, back: &InterpScheme, uri: Arc<dyn UriMap>) -> FunctionalRef {
    let (f, forward, back) = (f.clone(), forward.clone(), back.clone());
    functional(move |q, x| {
        let mut outer = CollapseView::new(&back);
        let mut inner = CollapseView::new(&forward);
        for t in 0.. {
            let rep = outer.rep(&mut ImageProbe::new(q, false, f.phi.clone(), f.id()), t)?;
            let nested = rep
                .iter()
                .map(|&s| inner.rep(&mut SideProbe::left(q), s as usize))
                .collect::<Result<Code2, Stop>>()?;
            if uri.eval(&mut SideProbe::left(q), &nested)? == x {
                return Ok(t as u64);
            }
        }
        unreachable!()
    })
}

/// Functors from the interpretations and `Λ_A`, `Λ_B` assembled from them.
pub fn biinterp_to_bitransform(d: &BiInterpData) -> BiTransformData {
    let f = interp_to_functor(&d.b_in_a);
    let g = interp_to_functor(&d.a_in_b);
    BiTransformData {
        lambda_a: lambda_functional(&f, &d.b_in_a, &d.a_in_b, d.g.clone()),
        lambda_b: lambda_functional(&g, &d.a_in_b, &d.b_in_a, d.h.clone()),
        f,
        g,
    }
}

/// `Λ_B` followed by the transposition of points `0` and `1`.
pub fn with_swapped_lambda_b(t: &BiTransformData) -> BiTransformData {
    let inner = t.lambda_b.clone();
    let mut out = t.clone();
    out.lambda_b = functional(move |q, x| {
        let triple = q.triple().clone();
        match q.sub_run(&*inner, &triple, x)? {
            Outcome::Halt(v) => Ok(match v {
                0 => 1,
                1 => 0,
                v => v,
            }),
            _ => Err(Stop::Demand),
        }
    });
    out
}

/// The map `λ^{pres}` as an isomorphism oracle; inverses are found by
/// searching inputs below `search`.
pub fn lambda_morphism(lambda: &FunctionalRef, pres: &Presentation, fuel: u64, search: Elem) -> MorphismOracle {
    let t = OracleTriple::identity_on(pres);
    let lam = lambda.clone();
    let at = move |x: Elem| match run(&*lam, &t, x, fuel) {
        Outcome::Halt(v) => Ok(v),
        Outcome::OutOfFuel => Err(Error::fuel(format!("λ({x})"))),
        Outcome::Demand => Err(Error::Argument("full diagram demanded more".into())),
        Outcome::Fault(e) => Err(e),
    };
    let at = Arc::new(at);
    let at2 = at.clone();
    MorphismOracle::fallible(
        move |x| at(x),
        move |y| {
            for x in 0..search {
                if at2(x)? == y {
                    return Ok(x);
                }
            }
            Err(Error::fuel(format!("no preimage of {y} below {search}")))
        },
    )
}

/// One failed comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    pub suite: &'static str,
    pub sample: usize,
    pub point: Elem,
    pub expected: Elem,
    pub got: Elem,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} sample={} point={} expected={} got={}",
            self.suite, self.sample, self.point, self.expected, self.got
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckReport {
    pub checked: usize,
    pub failures: Vec<CheckFailure>,
    /// `(sample, point, error)` for comparisons that ran out of fuel.
    pub exhausted: Vec<(usize, Elem, String)>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.exhausted.is_empty()
    }

    fn compare(
        &mut self,
        suite: &'static str,
        sample: usize,
        point: Elem,
        sides: Result<(Elem, Elem)>,
    ) -> Result<()> {
        self.checked += 1;
        match sides {
            Ok((expected, got)) if expected != got => self.failures.push(CheckFailure {
                suite,
                sample,
                point,
                expected,
                got,
            }),
            Ok(_) => {}
            Err(e) if e.is_budget() => self.exhausted.push((sample, point, e.to_string())),
            Err(e) => return Err(e),
        }
        Ok(())
    }

    fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.failures.extend(other.failures);
        self.exhausted.extend(other.exhausted);
    }
}

/// One direction of the pseudo-inverse condition: `first(Λ^X) = Λ'^{first(X)}`
/// for each copy `X`, where `Λ: X → second(first(X))` and
/// `Λ': Y → first(second(Y))`.
#[allow(clippy::too_many_arguments)]
fn pseudo_inverse_side(
    suite: &'static str,
    first: &CompFunctor,
    second: &CompFunctor,
    lambda: &FunctionalRef,
    lambda_other: &FunctionalRef,
    copies: &[Presentation],
    prefix: Elem,
    fuel: u64,
) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    let search = 4 * prefix + 8;
    for (s, x) in copies.iter().enumerate() {
        let fx = apply_to_presentation(first, x, fuel);
        let sfx = apply_to_presentation(second, &fx, fuel);
        let lam = lambda_morphism(lambda, x, fuel, search);
        let lhs = apply_to_morphism(first, x, &lam, &sfx, fuel);
        let rhs = lambda_morphism(lambda_other, &fx, fuel, search);
        for p in 0..prefix {
            report.compare(suite, s, p, (|| Ok((rhs.forward(p)?, lhs.forward(p)?)))())?;
        }
    }
    Ok(report)
}

/// `F(Λ_A^Ã) = Λ_B^{F(Ã)}` and `G(Λ_B^B̃) = Λ_A^{G(B̃)}` on the first
/// `prefix` points of each sample.
pub fn check_pseudo_inverse(
    t: &BiTransformData,
    a_copies: &[Presentation],
    b_copies: &[Presentation],
    prefix: Elem,
    fuel: u64,
) -> Result<CheckReport> {
    let mut r = pseudo_inverse_side("F(Λ_A)=Λ_B∘F", &t.f, &t.g, &t.lambda_a, &t.lambda_b, a_copies, prefix, fuel)?;
    r.merge(pseudo_inverse_side("G(Λ_B)=Λ_A∘G", &t.g, &t.f, &t.lambda_b, &t.lambda_a, b_copies, prefix, fuel)?);
    Ok(r)
}

/// `λ` witnesses `second ∘ first ≅ id`: each `λ^X` is a bijection on the
/// first `prefix` points, and `second(first(j)) ∘ λ^X = λ^{X'} ∘ j` for each
/// sampled `j: X → X'` (with `X'` the copy pulled back along `j⁻¹`).
pub fn check_effective_iso_identity(
    first: &CompFunctor,
    second: &CompFunctor,
    lambda: &FunctionalRef,
    copies: &[Presentation],
    morphisms: &[MorphismOracle],
    prefix: Elem,
    fuel: u64,
) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    let search = 4 * prefix + 8;
    for (s, x) in copies.iter().enumerate() {
        let lam = lambda_morphism(lambda, x, fuel, search);
        let mut seen = Vec::new();
        for p in 0..prefix {
            match lam.forward(p) {
                Ok(v) => match seen.iter().position(|&w| w == v) {
                    Some(q) => report.failures.push(CheckFailure {
                        suite: "injective",
                        sample: s,
                        point: p,
                        expected: q as Elem,
                        got: v,
                    }),
                    None => seen.push(v),
                },
                Err(e) if e.is_budget() => report.exhausted.push((s, p, e.to_string())),
                Err(e) => return Err(e),
            }
            // every point below the prefix is hit
            report.compare("onto", s, p, lam.backward(p).and_then(|x| Ok((p, lam.forward(x)?))))?;
        }
        for (k, j) in morphisms.iter().enumerate() {
            let y = pull_back(x, &j.inverse());
            let fx = apply_to_presentation(first, x, fuel);
            let fy = apply_to_presentation(first, &y, fuel);
            let fj = apply_to_morphism(first, x, j, &y, fuel);
            let sfj = apply_to_morphism(second, &fx, &fj, &fy, fuel);
            let lam_y = lambda_morphism(lambda, &y, fuel, search);
            let sample = s * morphisms.len() + k;
            for p in 0..prefix {
                let sides = (|| Ok((lam_y.forward(j.forward(p)?)?, sfj.forward(lam.forward(p)?)?)))();
                report.compare("square", sample, p, sides)?;
            }
        }
    }
    Ok(report)
}

/// The first `count` points of the structure obtained by interpreting
/// along `s1`, then `s2`, then `s3` starting from `base`, as nested codes
/// over `base`.
pub fn nested_points(
    s1: &InterpScheme,
    s2: &InterpScheme,
    s3: &InterpScheme,
    base: &Presentation,
    count: usize,
    fuel: u64,
) -> Result<Vec<Code3>> {
    let p1 = apply_to_presentation(&interp_to_functor(s1), base, fuel);
    let p2 = apply_to_presentation(&interp_to_functor(s2), &p1, fuel);
    let above = |codes: &[Tuple]| codes.iter().flatten().map(|&x| x as usize + 1).max().unwrap_or(0);
    let r3 = collapse(s3, &p2, count, fuel)?;
    let r2 = collapse(s2, &p1, above(&r3), fuel)?;
    let r1 = collapse(s1, base, above(&r2), fuel)?;
    Ok(r3
        .iter()
        .map(|c| {
            c.iter()
                .map(|&s| r2[s as usize].iter().map(|&u| r1[u as usize].clone()).collect())
                .collect()
        })
        .collect())
}

fn probe_eval(pres: &Presentation, fuel: u64, uri: &dyn UriMap, x: &[Tuple]) -> Result<Elem> {
    let t = OracleTriple::identity_on(pres);
    let mut q = Query::new(&t, fuel);
    uri.eval(&mut SideProbe::left(&mut q), x).map_err(stop_to_error)
}

/// One equation of the characterization: `alpha(h̃(X)) = g(alphã̃(X))` for
/// the first `prefix` triply nested points `X` over `b`.
#[allow(clippy::too_many_arguments)]
fn char_side(
    suite: &'static str,
    s_ab: &InterpScheme,
    s_ba: &InterpScheme,
    a: &Presentation,
    b: &Presentation,
    g: &dyn UriMap,
    h: &dyn UriMap,
    alpha: &LevelMap,
    prefix: Elem,
    fuel: u64,
) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    for (p, x) in nested_points(s_ab, s_ba, s_ab, b, prefix as usize, fuel)?.iter().enumerate() {
        let sides = (|| {
            let hx: Tuple = x.iter().map(|y| probe_eval(b, fuel, h, y)).collect::<Result<_>>()?;
            let lhs = alpha(&hx)?;
            let ax: Code2 = x
                .iter()
                .map(|y| y.iter().map(|z| alpha(z)).collect::<Result<Tuple>>())
                .collect::<Result<_>>()?;
            Ok((lhs, probe_eval(a, fuel, g, &ax)?))
        })();
        report.compare(suite, 0, p as Elem, sides)?;
    }
    Ok(report)
}

/// `alpha ∘ h̃ ∘ alphã̃⁻¹ = g` and `beta ∘ g̃ ∘ betã̃⁻¹ = h`, checked as
/// `alpha(h̃(X)) = g(alphã̃(X))` over nested points of `B` and the mirror
/// equation over nested points of `A`.
pub fn check_char_conditions(
    d: &BiInterpData,
    alpha: &LevelMap,
    beta: &LevelMap,
    prefix: Elem,
    fuel: u64,
) -> Result<CheckReport> {
    let mut r = char_side("alpha", &d.a_in_b, &d.b_in_a, &d.a, &d.b, &*d.g, &*d.h, alpha, prefix, fuel)?;
    r.merge(char_side("beta", &d.b_in_a, &d.a_in_b, &d.b, &d.a, &*d.h, &*d.g, beta, prefix, fuel)?);
    Ok(r)
}

/// `alpha` after an automorphism `sigma` of `A`.
pub fn twisted(alpha: &LevelMap, sigma: &MorphismOracle) -> LevelMap {
    let (alpha, sigma) = (alpha.clone(), sigma.clone());
    Arc::new(move |z: &[Elem]| sigma.forward(alpha(z)?))
}

/// `Θ^Ã = (Ω̃)⁻¹ ∘ (Γ^{F(Ã)})⁻¹ ∘ Λ_A^Ã`, the nested point `Λ_A` picks for
/// each element.
fn theta(d: &BiInterpData, t: &BiTransformData, pres: &Presentation, x: Elem, fuel: u64) -> Result<Code2> {
    let lam = lambda_morphism(&t.lambda_a, pres, fuel, 0).forward(x)?;
    let triple = OracleTriple::identity_on(pres);
    let mut q = Query::new(&triple, fuel);
    let body = |q: &mut Query<'_>| -> Result<Code2, Stop> {
        let rep = CollapseView::new(&d.a_in_b).rep(&mut ImageProbe::new(q, false, t.f.phi.clone(), t.f.id()), lam as usize)?;
        let mut inner = CollapseView::new(&d.b_in_a);
        rep.iter().map(|&s| inner.rep(&mut SideProbe::left(q), s as usize)).collect()
    };
    body(&mut q).map_err(stop_to_error)
}

/// The class index of a nested point on `pres`: entries through `Ω`, then
/// the whole code through `Γ^{F(pres)}`.
fn nested_class(d: &BiInterpData, t: &BiTransformData, pres: &Presentation, x: &[Tuple], fuel: u64) -> Result<Elem> {
    let triple = OracleTriple::identity_on(pres);
    let mut q = Query::new(&triple, fuel);
    let body = |q: &mut Query<'_>| -> Result<Elem, Stop> {
        let mut inner = CollapseView::new(&d.b_in_a);
        let code = x
            .iter()
            .map(|z| inner.class_of(&mut SideProbe::left(q), z).map(|c| c as Elem))
            .collect::<Result<Tuple, Stop>>()?;
        let mut outer = CollapseView::new(&d.a_in_b);
        Ok(outer.class_of(&mut ImageProbe::new(q, false, t.f.phi.clone(), t.f.id()), &code)? as Elem)
    };
    body(&mut q).map_err(stop_to_error)
}

/// Equivariance of `Θ`: the nested point chosen for `j(x)` on the image
/// copy is, up to equivalence, the image of the one chosen for `x`.
pub fn check_theta_equivariance(
    d: &BiInterpData,
    t: &BiTransformData,
    copies: &[Presentation],
    morphisms: &[MorphismOracle],
    prefix: Elem,
    fuel: u64,
) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    for (s, x) in copies.iter().enumerate() {
        for (k, j) in morphisms.iter().enumerate() {
            let y = pull_back(x, &j.inverse());
            let lam_y = lambda_morphism(&t.lambda_a, &y, fuel, 0);
            for p in 0..prefix {
                let sides = (|| {
                    let th = theta(d, t, x, p, fuel)?;
                    let moved: Code2 = th
                        .iter()
                        .map(|z| j.image(z))
                        .collect::<Result<_>>()?;
                    Ok((lam_y.forward(j.forward(p)?)?, nested_class(d, t, &y, &moved, fuel)?))
                })();
                report.compare("theta", s * morphisms.len() + k, p, sides)?;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FinMap;

    fn swaps() -> Vec<MorphismOracle> {
        vec![
            MorphismOracle::transposition(0, 1),
            MorphismOracle::finite_support(&FinMap::new([(0, 2), (2, 3), (3, 0)]).unwrap()).unwrap(),
        ]
    }

    #[test]
    fn identity_lambdas_are_identities() {
        for base in [Presentation::pure_set(), Presentation::order()] {
            let d = identity_biinterp(base.clone()).unwrap();
            let t = biinterp_to_bitransform(&d);
            let la = lambda_morphism(&t.lambda_a, &base, 10_000_000, 40);
            for x in 0..10 {
                assert_eq!(la.forward(x).unwrap(), x);
            }
        }
    }

    #[test]
    fn identity_pseudo_inverse_passes_and_swap_fails() {
        let d = identity_biinterp(Presentation::pure_set()).unwrap();
        let t = biinterp_to_bitransform(&d);
        let copies = vec![d.a.clone(), pull_back(&d.a, &MorphismOracle::transposition(1, 4))];
        let r = check_pseudo_inverse(&t, &copies, &copies, 6, 10_000_000).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = check_pseudo_inverse(&with_swapped_lambda_b(&t), &copies, &copies, 6, 10_000_000).unwrap();
        assert!(r.failures.iter().any(|f| f.point <= 1), "{r:?}");
    }

    #[test]
    fn effective_iso_identity_suites_pass() {
        let d = identity_biinterp(Presentation::pure_set()).unwrap();
        let t = biinterp_to_bitransform(&d);
        let copies = vec![d.a.clone()];
        let r = check_effective_iso_identity(&t.f, &t.g, &t.lambda_a, &copies, &swaps(), 6, 10_000_000).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = check_effective_iso_identity(&t.g, &t.f, &t.lambda_b, &copies, &swaps(), 6, 10_000_000).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn broken_lambda_fails_the_square() {
        let d = identity_biinterp(Presentation::pure_set()).unwrap();
        let t = with_swapped_lambda_b(&biinterp_to_bitransform(&d));
        let r = check_effective_iso_identity(&t.g, &t.f, &t.lambda_b, std::slice::from_ref(&d.b), &[MorphismOracle::transposition(1, 2)], 4, 10_000_000).unwrap();
        assert!(!r.failures.is_empty());
    }

    #[test]
    fn char_conditions_hold_for_twisted_alpha_and_fail_for_shifted_g() {
        let d = identity_biinterp(Presentation::pure_set()).unwrap();
        let sigma = MorphismOracle::transposition(0, 3);
        let r = check_char_conditions(&d, &twisted(&d.alpha, &sigma), &d.beta, 6, 10_000_000).unwrap();
        assert!(r.passed(), "{r:?}");
        let mut bad = d.clone();
        bad.g = Arc::new(Shifted(d.g.clone(), 1));
        let r = check_char_conditions(&bad, &bad.alpha, &bad.beta, 6, 10_000_000).unwrap();
        assert!(!r.failures.is_empty());
    }

    #[test]
    fn nested_points_decode_to_distinct_elements() {
        let d = identity_biinterp(Presentation::pure_set()).unwrap();
        let pts = nested_points(&d.a_in_b, &d.b_in_a, &d.a_in_b, &d.b, 5, 10_000_000).unwrap();
        let named: Vec<Elem> = pts.iter().map(|x| x[1][1][1]).collect();
        assert_eq!(named, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn theta_is_equivariant() {
        let d = identity_biinterp(Presentation::pure_set()).unwrap();
        let t = biinterp_to_bitransform(&d);
        let r = check_theta_equivariance(&d, &t, std::slice::from_ref(&d.a), &swaps(), 5, 10_000_000).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
