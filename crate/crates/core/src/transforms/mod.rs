//! Passing between effective interpretations and computable functors.

mod collapse;
mod derived;
mod roundtrip;
mod semantic;

pub use collapse::{candidate_weight, candidates_of_weight, clear_collapse_cache, collapse, CollapseView};
pub use derived::{functor_to_interp, listed_domain};
pub use roundtrip::{check_natural_square, natural_iso_lambda, RoundTrip, SquareMismatch, SquareReport};
pub use semantic::EquivWitness;

use crate::error::{Error, Result};
use crate::functional::{functional, OracleTriple, Query, Stop};
use crate::functor::{checked_fact, CompFunctor};
use crate::interp::{stop_to_error, Decision, InterpScheme, Probe, SideProbe};
use crate::model::{canonical_code, decode_pair, Elem, Presentation, Tuple};
use collapse::decide_total;
use semantic::{dom_run, equiv_run, rel_run};

/// Limits for the semantic decisions: fuel per run, and the longest tuple
/// tried when searching for an initial segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub fuel: u64,
    pub max_len: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            fuel: 10_000_000,
            max_len: 32,
        }
    }
}

/// Runs `body` on a probe of `pres`; `None` when the fuel runs out.
fn probing<T>(
    pres: &Presentation,
    fuel: u64,
    body: impl FnOnce(&mut dyn Probe) -> Result<T, Stop>,
) -> Result<Option<(T, u64)>> {
    let t = OracleTriple::identity_on(pres);
    let mut q = Query::new(&t, fuel);
    let r = body(&mut SideProbe::left(&mut q));
    match r {
        Ok(v) => Ok(Some((v, q.used()))),
        Err(Stop::OutOfFuel) => Ok(None),
        Err(s) => Err(stop_to_error(s)),
    }
}

/// A certified point of the domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomPoint {
    pub tuple: Tuple,
    pub index: u64,
    pub fuel_used: u64,
}

/// Whether `(b̄, i)` lies in the domain of the interpretation read off `f`.
/// Tuples with repeated entries are never in it.
pub fn dom_contains(f: &CompFunctor, pres: &Presentation, b: &[Elem], i: u64, fuel: u64) -> Result<Decision> {
    Ok(match certify(f, pres, b, i, fuel)? {
        Some(Some(_)) => Decision::In,
        Some(None) => Decision::Out,
        None => Decision::Unknown,
    })
}

/// `Some(Some(point))` for members, `Some(None)` for non-members, `None` when
/// the fuel runs out.
pub fn certify(f: &CompFunctor, pres: &Presentation, b: &[Elem], i: u64, fuel: u64) -> Result<Option<Option<DomPoint>>> {
    Ok(probing(pres, fuel, |p| dom_run(f, p, b, i))?.map(|(inside, used)| {
        inside.then(|| DomPoint {
            tuple: b.to_vec(),
            index: i,
            fuel_used: used,
        })
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivResult {
    Equivalent(EquivWitness),
    Inequivalent(EquivWitness),
    Unknown,
}

/// Decides `(b̄, i) ∼ (c̄, j)` for two domain points. The test is repeated
/// with a disjoint choice of fresh elements; the two must agree.
pub fn equiv_decide(
    f: &CompFunctor,
    pres: &Presentation,
    p: (&[Elem], u64),
    q: (&[Elem], u64),
    budget: Budget,
) -> Result<EquivResult> {
    let first = probing(pres, budget.fuel, |pr| equiv_run(f, pr, p, q, 0))?;
    let Some(((eq, w), _)) = first else {
        return Ok(EquivResult::Unknown);
    };
    let skip = w.d.len().max(1);
    if let Some(((eq2, w2), _)) = probing(pres, budget.fuel, |pr| equiv_run(f, pr, p, q, skip))? {
        if eq2 != eq {
            return Err(Error::FunctorBroken(format!(
                "{}: {p:?} ~ {q:?} depends on the fresh elements ({:?} vs {:?})",
                f.name, w.d, w2.d
            )));
        }
    }
    Ok(if eq {
        EquivResult::Equivalent(w)
    } else {
        EquivResult::Inequivalent(w)
    })
}

/// Decides relation `rel` on domain points, cross-checked on a descending
/// initial segment.
pub fn rel_decide(
    f: &CompFunctor,
    pres: &Presentation,
    rel: usize,
    points: &[(&[Elem], u64)],
    budget: Budget,
) -> Result<Decision> {
    if f.target.arity(rel) != Some(points.len()) {
        return Err(Error::Argument(format!(
            "relation {rel} of {:?} does not take {} points",
            f.target,
            points.len()
        )));
    }
    let Some((v, _)) = probing(pres, budget.fuel, |p| rel_run(f, p, rel, points, false))? else {
        return Ok(Decision::Unknown);
    };
    if let Some((w, _)) = probing(pres, budget.fuel, |p| rel_run(f, p, rel, points, true))? {
        if w != v {
            return Err(Error::FunctorBroken(format!(
                "{}: R{rel} at {points:?} depends on the enumeration of the segment",
                f.name
            )));
        }
    }
    Ok(if v { Decision::In } else { Decision::Out })
}

/// The least `n` with `(0…n-1, i)` in the domain.
pub fn canonical_embed(f: &CompFunctor, pres: &Presentation, i: u64, budget: Budget) -> Result<DomPoint> {
    for n in 0..=budget.max_len {
        let b: Tuple = (0..n as Elem).collect();
        match certify(f, pres, &b, i, budget.fuel)? {
            Some(Some(p)) => return Ok(p),
            Some(None) => {}
            None => return Err(Error::fuel(format!("{}: domain test of ({b:?}, {i})", f.name))),
        }
    }
    Err(Error::fuel(format!(
        "{}: no initial segment of length ≤ {} carries point {i}",
        f.name, budget.max_len
    )))
}

/// The functor `F_I` of an interpretation: `Φ` decides relations on class
/// representatives, `Φ*` maps the tuple of a representative entrywise,
/// recodes it with a fresh marker and finds its class on the other side.
pub fn interp_to_functor(scheme: &InterpScheme) -> CompFunctor {
    let s = scheme.clone();
    let phi = functional(move |q, code| {
        let (rel, args) = checked_fact(&s.target, code)?;
        let mut probe = SideProbe::left(q);
        let mut view = CollapseView::new(&s);
        let reps = args
            .iter()
            .map(|&t| view.rep(&mut probe, t as usize))
            .collect::<Result<Vec<Tuple>, Stop>>()?;
        let blocks: Vec<&[u64]> = reps.iter().map(|r| r.as_slice()).collect();
        let d = s.relation(rel).expect("checked arity");
        Ok(decide_total(&d, &mut probe, &blocks, "relation")? as u64)
    });
    let s = scheme.clone();
    let phi_star = functional(move |q, i| {
        let rep = CollapseView::new(&s).rep(&mut SideProbe::left(q), i as usize)?;
        let (b, m) = decode_pair(&rep)?;
        let image = b.iter().map(|&x| q.map(x)).collect::<Result<Tuple, Stop>>()?;
        let code = canonical_code(&image, m);
        let t = CollapseView::new(&s).class_of(&mut SideProbe::right(q), &code)?;
        Ok(t as u64)
    });
    CompFunctor::new(
        format!("F[{}]", scheme.name),
        scheme.base.clone(),
        scheme.target.clone(),
        phi,
        phi_star,
    )
}
