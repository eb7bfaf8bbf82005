//! The round trip `F ↦ I^F ↦ F_{I^F}` and the natural isomorphism `Λ`
//! between `F` and the functor of its own interpretation.

use std::fmt;

use crate::error::{Error, Result};
use crate::functional::{functional, run, FunctionalRef, OracleTriple, Outcome};
use crate::functor::{apply_to_morphism, CompFunctor};
use crate::interp::{InterpScheme, SideProbe};
use crate::model::{canonical_code, Elem, MorphismOracle, Presentation, Tuple};

use super::collapse::CollapseView;
use super::derived::functor_to_interp;
use super::interp_to_functor;
use super::semantic::dom_run;

/// `F` together with `I^F`, `F_{I^F}` and the operator of `Λ`.
#[derive(Clone)]
pub struct RoundTrip {
    pub functor: CompFunctor,
    pub scheme: InterpScheme,
    pub image: CompFunctor,
    /// `Λ(i)`: the class of `𝔉(i)` among the classes of `I^F` on the
    /// diagram read from the left side of the oracle.
    pub lambda: FunctionalRef,
}

impl RoundTrip {
    pub fn new(f: &CompFunctor) -> Self {
        let scheme = functor_to_interp(f);
        let image = interp_to_functor(&scheme);
        let (f2, s2) = (f.clone(), scheme.clone());
        let lambda = functional(move |q, i| {
            let mut probe = SideProbe::left(q);
            let mut n = 0;
            loop {
                let b: Tuple = (0..n as Elem).collect();
                if dom_run(&f2, &mut probe, &b, i)? {
                    let code = canonical_code(&b, i as usize);
                    return Ok(CollapseView::new(&s2).class_of(&mut probe, &code)? as u64);
                }
                n += 1;
            }
        });
        RoundTrip {
            functor: f.clone(),
            scheme,
            image,
            lambda,
        }
    }
}

impl fmt::Debug for RoundTrip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RoundTrip({})", self.functor.name)
    }
}

/// `Λ^{pres}(i)`.
pub fn natural_iso_lambda(rt: &RoundTrip, pres: &Presentation, i: u64, fuel: u64) -> Result<u64> {
    match run(&*rt.lambda, &OracleTriple::identity_on(pres), i, fuel) {
        Outcome::Halt(t) => Ok(t),
        Outcome::OutOfFuel => Err(Error::fuel(format!("Λ({i}) for {}", rt.functor.name))),
        Outcome::Demand => Err(Error::Argument("full diagram demanded more".into())),
        Outcome::Fault(e) => Err(e),
    }
}

/// A point where the square fails: `Λ(F(h)(i))` vs `I^F(h)(Λ(i))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareMismatch {
    pub point: Elem,
    pub lambda_after_f: Elem,
    pub image_after_lambda: Elem,
}

impl fmt::Display for SquareMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "point={} Λ∘F(h)={} I(h)∘Λ={}",
            self.point, self.lambda_after_f, self.image_after_lambda
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SquareReport {
    pub checked: usize,
    pub mismatches: Vec<SquareMismatch>,
    /// Points whose evaluation ran out of fuel, with the error text.
    pub exhausted: Vec<(Elem, String)>,
}

impl SquareReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.exhausted.is_empty()
    }
}

/// Checks `Λ^{b} ∘ F(h) = F_{I^F}(h) ∘ Λ^{a}` on the first `prefix` points
/// for an isomorphism `h: a → b`.
pub fn check_natural_square(
    rt: &RoundTrip,
    a: &Presentation,
    b: &Presentation,
    h: &MorphismOracle,
    prefix: Elem,
    fuel: u64,
) -> Result<SquareReport> {
    let fh = apply_to_morphism(&rt.functor, a, h, b, fuel);
    let ih = apply_to_morphism(&rt.image, a, h, b, fuel);
    let mut report = SquareReport::default();
    for i in 0..prefix {
        report.checked += 1;
        let sides = (|| -> Result<(Elem, Elem)> {
            let left = natural_iso_lambda(rt, b, fh.forward(i)?, fuel)?;
            let right = ih.forward(natural_iso_lambda(rt, a, i, fuel)?)?;
            Ok((left, right))
        })();
        match sides {
            Ok((l, r)) if l != r => report.mismatches.push(SquareMismatch {
                point: i,
                lambda_after_f: l,
                image_after_lambda: r,
            }),
            Ok(_) => {}
            Err(e) if e.is_budget() => report.exhausted.push((i, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}
