//! Computable functors as operator pairs `(Φ, Φ*)`.
//!
//! `Φ` reads the diagram of a copy (left side of its oracle) and answers the
//! fact with code `⟨i, seq_code(t̄)⟩` of the output copy with 1 or 0. `Φ*`
//! reads `D(Â) ⊕ f ⊕ D(Ã)` and maps points of `F(Â)` to points of `F(Ã)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::functional::{functional, run_total, FunctionalRef, OracleTriple, Outcome};
use crate::model::{fact_code, fact_decode, pull_back, Elem, MorphismOracle, Presentation, Signature, Tuple};

static NEXT_FUNCTOR: AtomicU64 = AtomicU64::new(1);

pub(crate) fn next_functor_id() -> u64 {
    NEXT_FUNCTOR.fetch_add(1, Ordering::Relaxed)
}

#[derive(Clone)]
pub struct CompFunctor {
    id: u64,
    pub name: String,
    pub phi: FunctionalRef,
    pub phi_star: FunctionalRef,
    pub source: Signature,
    pub target: Signature,
}

impl CompFunctor {
    pub fn new(
        name: impl Into<String>,
        source: Signature,
        target: Signature,
        phi: FunctionalRef,
        phi_star: FunctionalRef,
    ) -> Self {
        CompFunctor {
            id: next_functor_id(),
            name: name.into(),
            phi,
            phi_star,
            source,
            target,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }
}

impl fmt::Debug for CompFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CompFunctor({} #{})", self.name, self.id)
    }
}

/// Checks a decoded fact against a signature.
pub(crate) fn checked_fact(sig: &Signature, code: u64) -> Result<(usize, Tuple)> {
    let (rel, args) = fact_decode(code);
    match sig.arity(rel) {
        Some(a) if a == args.len() => Ok((rel, args)),
        _ => Err(Error::Argument(format!(
            "query {code} decodes to R{rel}{args:?}, not a fact of {sig:?}"
        ))),
    }
}

/// Always outputs `copy` and identity maps, reading nothing.
pub fn constant_functor(source: Signature, copy: Presentation) -> CompFunctor {
    let target = copy.signature().clone();
    let sig = target.clone();
    let phi = functional(move |q, code| {
        q.tick()?;
        let (rel, args) = checked_fact(&sig, code)?;
        Ok(copy.holds(rel, &args)? as u64)
    });
    let phi_star = functional(|q, i| {
        q.tick()?;
        Ok(i)
    });
    CompFunctor::new("constant", source, target, phi, phi_star)
}

/// `Φ` copies the diagram, `Φ*` copies the map.
pub fn identity_functor(sig: Signature) -> CompFunctor {
    let s = sig.clone();
    let phi = functional(move |q, code| {
        let (rel, args) = checked_fact(&s, code)?;
        Ok(q.left(rel, &args)? as u64)
    });
    let phi_star = functional(|q, i| q.map(i));
    CompFunctor::new("identity", sig.clone(), sig, phi, phi_star)
}

fn outcome_value(o: Outcome, what: impl FnOnce() -> String) -> Result<u64> {
    match o {
        Outcome::Halt(v) => Ok(v),
        Outcome::OutOfFuel => Err(Error::fuel(what())),
        Outcome::Demand => Err(Error::Argument(format!("{} demanded more than a full oracle", what()))),
        Outcome::Fault(e) => Err(e),
    }
}

/// `F(pres)` as a lazy presentation. Answers are memoized; running out of
/// fuel is an error carrying the query, never a default answer.
pub fn apply_to_presentation(f: &CompFunctor, pres: &Presentation, fuel: u64) -> Presentation {
    let phi = f.phi.clone();
    let triple = OracleTriple::identity_on(pres);
    let name = f.name.clone();
    let memo: Mutex<HashMap<(usize, Tuple), bool>> = Mutex::new(HashMap::new());
    Presentation::fallible(f.target.clone(), move |rel, args| {
        let key = (rel, args.to_vec());
        if let Some(&b) = memo.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(b);
        }
        let code = fact_code(rel, args)?;
        let v = outcome_value(run_total(&*phi, &triple, code, fuel), || {
            format!("{name}: R{rel}{args:?}")
        })?;
        memo.lock().unwrap_or_else(|e| e.into_inner()).insert(key, v != 0);
        Ok(v != 0)
    })
}

fn memo_map(
    phi_star: FunctionalRef,
    triple: OracleTriple,
    fuel: u64,
    label: String,
) -> impl Fn(Elem) -> Result<Elem> + Send + Sync {
    let memo: Mutex<HashMap<Elem, Elem>> = Mutex::new(HashMap::new());
    move |x| {
        if let Some(&y) = memo.lock().unwrap_or_else(|e| e.into_inner()).get(&x) {
            return Ok(y);
        }
        let y = outcome_value(run_total(&*phi_star, &triple, x, fuel), || format!("{label}({x})"))?;
        memo.lock().unwrap_or_else(|e| e.into_inner()).insert(x, y);
        Ok(y)
    }
}

/// `F(f): F(A) → F(B)` for an isomorphism `f: A → B`. The backward map runs
/// `Φ*` on the inverse triple.
pub fn apply_to_morphism(
    func: &CompFunctor,
    a: &Presentation,
    f: &MorphismOracle,
    b: &Presentation,
    fuel: u64,
) -> MorphismOracle {
    let fwd = memo_map(
        func.phi_star.clone(),
        OracleTriple::full(a, f, b),
        fuel,
        format!("{}(f)", func.name),
    );
    let bwd = memo_map(
        func.phi_star.clone(),
        OracleTriple::full(b, &f.inverse(), a),
        fuel,
        format!("{}(f⁻¹)", func.name),
    );
    MorphismOracle::fallible(fwd, bwd)
}

/// A failed law instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawViolation {
    pub sample: usize,
    pub law: &'static str,
    pub point: Elem,
    pub expected: Elem,
    pub got: Elem,
}

impl fmt::Display for LawViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} sample={} point={} expected={} got={}",
            self.law, self.sample, self.point, self.expected, self.got
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LawReport {
    pub checked: usize,
    pub violations: Vec<LawViolation>,
    /// `(sample, point)` pairs that ran out of fuel.
    pub exhausted: Vec<(usize, Elem)>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.exhausted.is_empty()
    }
}

/// Checks `F(id) = id` and `F(f∘g) = F(f)∘F(g)` on the first `prefix` points.
///
/// Each sample `(g, f)` builds copies `X = pres`, `Y`, `Z` with
/// `g: X → Y` and `f: Y → Z` isomorphisms (copies are pulled back along the
/// inverses).
pub fn check_functor_laws(
    func: &CompFunctor,
    pres: &Presentation,
    samples: &[(MorphismOracle, MorphismOracle)],
    prefix: Elem,
    fuel: u64,
) -> LawReport {
    let mut report = LawReport::default();
    let id = MorphismOracle::identity();
    for (s, (g, f)) in samples.iter().enumerate() {
        let x = pres.clone();
        let y = pull_back(&x, &g.inverse());
        let z = pull_back(&y, &f.inverse());
        let fid_x = apply_to_morphism(func, &x, &id, &x, fuel);
        let fid_y = apply_to_morphism(func, &y, &id, &y, fuel);
        let fg = apply_to_morphism(func, &x, g, &y, fuel);
        let ff = apply_to_morphism(func, &y, f, &z, fuel);
        let ffg = apply_to_morphism(func, &x, &f.compose(g), &z, fuel);
        for p in 0..prefix {
            report.checked += 1;
            let mut step = || -> Result<()> {
                for (law, m) in [("N1", &fid_x), ("N1", &fid_y)] {
                    let got = m.forward(p)?;
                    if got != p {
                        report.violations.push(LawViolation {
                            sample: s,
                            law,
                            point: p,
                            expected: p,
                            got,
                        });
                    }
                }
                let lhs = ffg.forward(p)?;
                let rhs = ff.forward(fg.forward(p)?)?;
                if lhs != rhs {
                    report.violations.push(LawViolation {
                        sample: s,
                        law: "N2",
                        point: p,
                        expected: rhs,
                        got: lhs,
                    });
                }
                Ok(())
            };
            if let Err(e) = step() {
                if e.is_budget() {
                    report.exhausted.push((s, p));
                } else {
                    report.violations.push(LawViolation {
                        sample: s,
                        law: "fault",
                        point: p,
                        expected: 0,
                        got: 0,
                    });
                }
            }
        }
    }
    report
}
