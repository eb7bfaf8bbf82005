//! Domain, equivalence and relations of the interpretation read off a
//! functor, evaluated against a probe.

use std::sync::Arc;

use crate::error::Error;
use crate::functional::{Diagram, MapView, OracleTriple, Outcome, Stop};
use crate::functor::CompFunctor;
use crate::interp::Probe;
use crate::model::{fact_code, DiagramFragment, Elem, FinMap, Signature, Tuple};

pub(crate) fn fragment_via(probe: &mut dyn Probe, sig: &Signature, b: &[Elem]) -> Result<DiagramFragment, Stop> {
    let mut args = Vec::new();
    DiagramFragment::build(b.len(), sig.arities_below(b.len()), |rel, pos| {
        args.clear();
        args.extend(pos.iter().map(|&p| b[p]));
        probe.holds(rel, &args)
    })
}

pub(crate) fn injective(b: &[Elem]) -> bool {
    b.iter().enumerate().all(|(i, x)| !b[..i].contains(x))
}

fn triple(l: &DiagramFragment, sigma: &FinMap, r: &DiagramFragment) -> OracleTriple {
    OracleTriple::new(
        Diagram::Fragment(Arc::new(l.clone())),
        MapView::finite(sigma.clone()),
        Diagram::Fragment(Arc::new(r.clone())),
    )
}

/// `σ(p)` = position of `l[p]` in `r`, for tuples listing the same elements.
fn matching(l: &[Elem], r: &[Elem]) -> FinMap {
    let images: Vec<Elem> = l
        .iter()
        .map(|x| r.iter().position(|y| y == x).expect("same elements") as Elem)
        .collect();
    FinMap::from_images(&images).expect("injective tuples")
}

/// `(b̄, i) ∈ Dom`: `Φ*` halts on `(D(b̄), λ↾k, D(b̄))` at `i` with output `i`.
pub(crate) fn dom_run(f: &CompFunctor, probe: &mut dyn Probe, b: &[Elem], i: u64) -> Result<bool, Stop> {
    probe.tick()?;
    if !injective(b) {
        return Ok(false);
    }
    let d = fragment_via(probe, &f.source, b)?;
    let out = probe.sub_run(&*f.phi_star, &OracleTriple::diagonal(Arc::new(d)), i)?;
    Ok(out == Outcome::Halt(i))
}

/// What an equivalence test found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivWitness {
    /// Fresh elements appended to both sides.
    pub d: Tuple,
    pub sigma: FinMap,
    pub forward_value: Option<u64>,
    pub backward_value: Option<u64>,
}

/// Decides `(b̄, i) ∼ (c̄, j)` for Dom points. Tuples `L = b̄c̄′d̄` and
/// `R = c̄b̄′d̄` list the same elements; `d̄` takes fresh naturals, skipping the
/// first `skip`, and grows while either run demands more.
pub(crate) fn equiv_run(
    f: &CompFunctor,
    probe: &mut dyn Probe,
    (b, i): (&[Elem], u64),
    (c, j): (&[Elem], u64),
    skip: usize,
) -> Result<(bool, EquivWitness), Stop> {
    let cp: Tuple = c.iter().copied().filter(|x| !b.contains(x)).collect();
    let bp: Tuple = b.iter().copied().filter(|x| !c.contains(x)).collect();
    let fresh = |n: usize| -> Tuple {
        (0..)
            .filter(|x| !b.contains(x) && !c.contains(x))
            .skip(skip)
            .take(n)
            .collect()
    };
    let mut dlen = 0;
    loop {
        probe.tick()?;
        let d = fresh(dlen);
        let l: Tuple = b.iter().chain(&cp).chain(&d).copied().collect();
        let r: Tuple = c.iter().chain(&bp).chain(&d).copied().collect();
        let sigma = matching(&l, &r);
        let dl = fragment_via(probe, &f.source, &l)?;
        let dr = fragment_via(probe, &f.source, &r)?;
        let fwd = probe.sub_run(&*f.phi_star, &triple(&dl, &sigma, &dr), i)?.value();
        let bwd = probe.sub_run(&*f.phi_star, &triple(&dr, &sigma.inverse(), &dl), j)?.value();
        let verdict = match (fwd, bwd) {
            (Some(v), _) if v != j => Some(false),
            (_, Some(u)) if u != i => Some(false),
            (Some(_), Some(_)) => Some(true),
            _ => None,
        };
        if let Some(eq) = verdict {
            return Ok((
                eq,
                EquivWitness {
                    d,
                    sigma,
                    forward_value: fwd,
                    backward_value: bwd,
                },
            ));
        }
        dlen = (2 * dlen).max(1);
    }
}

/// Decides `R_rel` on Dom points by moving each onto a common tuple `c̄`
/// listing `0..n` (descending when `reversed`) and asking `Φ` on `D(c̄)`.
/// `n` grows while anything demands more.
pub(crate) fn rel_run(
    f: &CompFunctor,
    probe: &mut dyn Probe,
    rel: usize,
    points: &[(&[Elem], u64)],
    reversed: bool,
) -> Result<bool, Stop> {
    let mut n = points
        .iter()
        .flat_map(|(b, _)| b.iter())
        .map(|&x| x as usize + 1)
        .max()
        .unwrap_or(0);
    'grow: loop {
        probe.tick()?;
        let mut cbar: Tuple = (0..n as Elem).collect();
        if reversed {
            cbar.reverse();
        }
        let dc = fragment_via(probe, &f.source, &cbar)?;
        let mut js = Vec::with_capacity(points.len());
        for &(b, k) in points {
            let l: Tuple = b.iter().copied().chain(cbar.iter().copied().filter(|x| !b.contains(x))).collect();
            let sigma = matching(&l, &cbar);
            let dl = fragment_via(probe, &f.source, &l)?;
            let Outcome::Halt(j) = probe.sub_run(&*f.phi_star, &triple(&dl, &sigma, &dc), k)? else {
                n = (2 * n).max(1);
                continue 'grow;
            };
            match probe.sub_run(&*f.phi_star, &triple(&dc, &sigma.inverse(), &dl), j)? {
                Outcome::Halt(back) if back != k => {
                    return Err(Stop::Fault(Error::FunctorBroken(format!(
                        "{}: point ({b:?}, {k}) maps to {j} and back to {back}",
                        f.name
                    ))))
                }
                Outcome::Halt(_) => {}
                _ => {
                    n = (2 * n).max(1);
                    continue 'grow;
                }
            }
            if probe.sub_run(&*f.phi_star, &OracleTriple::diagonal(Arc::new(dc.clone())), j)? != Outcome::Halt(j) {
                n = (2 * n).max(1);
                continue 'grow;
            }
            js.push(j);
        }
        let code = fact_code(rel, &js)?;
        match probe.sub_run(&*f.phi, &OracleTriple::diagonal(Arc::new(dc)), code)? {
            Outcome::Halt(v) => return Ok(v != 0),
            _ => n = (2 * n).max(1),
        }
    }
}
