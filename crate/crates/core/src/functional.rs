//! Fueled oracle machines.
//!
//! A [`Functional`] is host code that reads its oracle only through a
//! [`Query`]. Every oracle access and every [`Query::tick`] costs one unit of
//! fuel. Asking about a position the finite oracle does not cover stops the
//! run with `Demand`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{DiagramFragment, Elem, FinMap, MorphismOracle, Presentation, Tuple};

/// Result of one evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Halt(u64),
    Demand,
    OutOfFuel,
    /// The oracle itself failed (malformed query, broken presentation).
    Fault(Error),
}

impl Outcome {
    pub fn value(&self) -> Option<u64> {
        match self {
            Outcome::Halt(v) => Some(*v),
            _ => None,
        }
    }
}

/// Early exit from a running functional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stop {
    Demand,
    OutOfFuel,
    Fault(Error),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Stop::OutOfFuel
        } else {
            Stop::Fault(e)
        }
    }
}

impl From<Stop> for Outcome {
    fn from(s: Stop) -> Self {
        match s {
            Stop::Demand => Outcome::Demand,
            Stop::OutOfFuel => Outcome::OutOfFuel,
            Stop::Fault(e) => Outcome::Fault(e),
        }
    }
}

/// Identifies a diagram oracle for memoization.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DiagramKey {
    Pres(u64, Option<usize>),
    Frag(Arc<DiagramFragment>),
    /// The diagram of a functor's output on another diagram.
    Image(u64, Box<DiagramKey>),
}

/// One side of an oracle triple: a structure's atomic diagram, either finite
/// or infinite.
#[derive(Clone, Debug)]
pub enum Diagram {
    Fragment(Arc<DiagramFragment>),
    /// D(pres↾n): facts about elements below `n` using relations below `n`.
    Prefix(Presentation, usize),
    Full(Presentation),
}

impl Diagram {
    pub fn fragment(f: DiagramFragment) -> Self {
        Diagram::Fragment(Arc::new(f))
    }

    /// `Ok(None)` when the fact lies outside a finite diagram.
    pub fn query(&self, rel: usize, args: &[Elem]) -> Result<Option<bool>> {
        match self {
            Diagram::Fragment(f) => {
                if rel >= f.arities().len() || args.iter().any(|&x| x >= f.len() as Elem) {
                    return Ok(None);
                }
                if f.arities()[rel] != args.len() {
                    return Err(Error::Argument(format!(
                        "relation {rel} has arity {}, got {}",
                        f.arities()[rel],
                        args.len()
                    )));
                }
                let pos: Vec<usize> = args.iter().map(|&x| x as usize).collect();
                Ok(f.get(rel, &pos))
            }
            Diagram::Prefix(p, n) => {
                let covered = rel < *n
                    && p.signature().relation_count().is_none_or(|c| rel < c)
                    && args.iter().all(|&x| x < *n as Elem);
                if covered {
                    p.holds(rel, args).map(Some)
                } else if p.signature().arity(rel).is_none() && rel < *n {
                    Err(Error::Argument(format!("relation {rel} not in signature")))
                } else {
                    Ok(None)
                }
            }
            Diagram::Full(p) => p.holds(rel, args).map(Some),
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Diagram::Full(_))
    }

    /// The finite restriction to elements and relations below `n`. A
    /// fragment is already finite and is returned unchanged.
    pub fn restrict(&self, n: usize) -> Diagram {
        match self {
            Diagram::Fragment(_) => self.clone(),
            Diagram::Prefix(p, m) => Diagram::Prefix(p.clone(), n.min(*m)),
            Diagram::Full(p) => Diagram::Prefix(p.clone(), n),
        }
    }

    pub fn key(&self) -> DiagramKey {
        match self {
            Diagram::Fragment(f) => DiagramKey::Frag(f.clone()),
            Diagram::Prefix(p, n) => DiagramKey::Pres(p.id(), Some(*n)),
            Diagram::Full(p) => DiagramKey::Pres(p.id(), None),
        }
    }

    /// The presentation behind an infinite or prefix diagram.
    pub fn presentation(&self) -> Option<&Presentation> {
        match self {
            Diagram::Fragment(_) => None,
            Diagram::Prefix(p, _) | Diagram::Full(p) => Some(p),
        }
    }

    /// The number of elements a finite diagram covers.
    pub fn bound(&self) -> Option<usize> {
        match self {
            Diagram::Fragment(f) => Some(f.len()),
            Diagram::Prefix(_, n) => Some(*n),
            Diagram::Full(_) => None,
        }
    }
}

/// The middle component of an oracle triple.
#[derive(Clone, Debug)]
pub enum MapView {
    Finite(Arc<FinMap>),
    Prefix(MorphismOracle, usize),
    Full(MorphismOracle),
}

impl MapView {
    pub fn finite(m: FinMap) -> Self {
        MapView::Finite(Arc::new(m))
    }

    pub fn query(&self, x: Elem) -> Result<Option<Elem>> {
        match self {
            MapView::Finite(m) => Ok(m.get(x)),
            MapView::Prefix(f, n) if x < *n as Elem => f.forward(x).map(Some),
            MapView::Prefix(..) => Ok(None),
            MapView::Full(f) => f.forward(x).map(Some),
        }
    }

    pub fn restrict(&self, n: usize) -> MapView {
        match self {
            MapView::Finite(_) => self.clone(),
            MapView::Prefix(f, m) => MapView::Prefix(f.clone(), n.min(*m)),
            MapView::Full(f) => MapView::Prefix(f.clone(), n),
        }
    }
}

/// `D(Â) ⊕ f ⊕ D(Ã)`.
#[derive(Clone, Debug)]
pub struct OracleTriple {
    pub left: Diagram,
    pub map: MapView,
    pub right: Diagram,
}

impl OracleTriple {
    pub fn new(left: Diagram, map: MapView, right: Diagram) -> Self {
        OracleTriple { left, map, right }
    }

    /// `(δ, λ↾k, δ)`.
    pub fn diagonal(frag: Arc<DiagramFragment>) -> Self {
        let k = frag.len();
        OracleTriple {
            left: Diagram::Fragment(frag.clone()),
            map: MapView::finite(FinMap::identity_prefix(k)),
            right: Diagram::Fragment(frag),
        }
    }

    /// `(D(P), f, D(Q))` for full presentations.
    pub fn full(left: &Presentation, f: &MorphismOracle, right: &Presentation) -> Self {
        OracleTriple {
            left: Diagram::Full(left.clone()),
            map: MapView::Full(f.clone()),
            right: Diagram::Full(right.clone()),
        }
    }

    /// `(D(P), λ, D(P))`.
    pub fn identity_on(p: &Presentation) -> Self {
        Self::full(p, &MorphismOracle::identity(), p)
    }

    pub fn restrict(&self, n: usize) -> Self {
        OracleTriple {
            left: self.left.restrict(n),
            map: self.map.restrict(n),
            right: self.right.restrict(n),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.left.is_finite() && !matches!(self.map, MapView::Full(_)) && self.right.is_finite()
    }
}

/// A recorded oracle access.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Access {
    Left(usize, Tuple),
    Map(Elem),
    Right(usize, Tuple),
}

/// The handle a functional uses to read its oracle and spend fuel.
pub struct Query<'a> {
    triple: &'a OracleTriple,
    fuel: u64,
    used: u64,
    need: usize,
    trace: Option<Vec<Access>>,
}

impl<'a> Query<'a> {
    pub fn new(triple: &'a OracleTriple, fuel: u64) -> Self {
        Query {
            triple,
            fuel,
            used: 0,
            need: 0,
            trace: None,
        }
    }

    pub fn traced(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn triple(&self) -> &'a OracleTriple {
        self.triple
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.fuel - self.used
    }

    /// Smallest prefix length that covers the query that caused a `Demand`.
    pub fn need(&self) -> usize {
        self.need
    }

    pub fn take_trace(&mut self) -> Vec<Access> {
        self.trace.take().unwrap_or_default()
    }

    pub fn tick(&mut self) -> Result<(), Stop> {
        self.charge(1)
    }

    /// Spends `n` units at once.
    pub fn charge(&mut self, n: u64) -> Result<(), Stop> {
        if n > self.fuel - self.used {
            self.used = self.fuel;
            return Err(Stop::OutOfFuel);
        }
        self.used += n;
        Ok(())
    }

    /// Records that a prefix of length `n` would be needed.
    pub fn demand(&mut self, n: usize) -> Stop {
        self.need = self.need.max(n);
        Stop::Demand
    }

    fn diagram_query(&mut self, right: bool, rel: usize, args: &[Elem]) -> Result<bool, Stop> {
        self.tick()?;
        if let Some(t) = self.trace.as_mut() {
            t.push(if right {
                Access::Right(rel, args.to_vec())
            } else {
                Access::Left(rel, args.to_vec())
            });
        }
        let d = if right {
            &self.triple.right
        } else {
            &self.triple.left
        };
        match d.query(rel, args)? {
            Some(b) => Ok(b),
            None => {
                let top = args.iter().map(|&x| x as usize + 1).max().unwrap_or(0);
                Err(self.demand(top.max(rel + 1)))
            }
        }
    }

    pub fn left(&mut self, rel: usize, args: &[Elem]) -> Result<bool, Stop> {
        self.diagram_query(false, rel, args)
    }

    pub fn right(&mut self, rel: usize, args: &[Elem]) -> Result<bool, Stop> {
        self.diagram_query(true, rel, args)
    }

    pub fn map(&mut self, x: Elem) -> Result<Elem, Stop> {
        self.tick()?;
        if let Some(t) = self.trace.as_mut() {
            t.push(Access::Map(x));
        }
        match self.triple.map.query(x)? {
            Some(y) => Ok(y),
            None => Err(self.demand(x as usize + 1)),
        }
    }

    /// Runs `f` on another oracle with this query's remaining fuel and charges
    /// what it used. Running out of fuel or faulting inside stops this run
    /// too; a `Demand` inside is returned as an ordinary outcome.
    pub fn sub_run(
        &mut self,
        f: &dyn Functional,
        triple: &OracleTriple,
        input: u64,
    ) -> Result<Outcome, Stop> {
        let mut inner = Query::new(triple, self.remaining());
        let r = f.eval(&mut inner, input);
        self.used += inner.used;
        match r {
            Ok(v) => Ok(Outcome::Halt(v)),
            Err(Stop::Demand) => Ok(Outcome::Demand),
            Err(s) => Err(s),
        }
    }

    /// Like [`Query::sub_run`] but an inner `Demand` stops this run as well,
    /// carrying the inner need. Used when the inner oracle is a view of this
    /// query's own oracle.
    pub fn sub_run_through(
        &mut self,
        f: &dyn Functional,
        triple: &OracleTriple,
        input: u64,
    ) -> Result<u64, Stop> {
        let mut inner = Query::new(triple, self.remaining());
        let r = f.eval(&mut inner, input);
        self.used += inner.used;
        if r == Err(Stop::Demand) {
            self.need = self.need.max(inner.need);
        }
        r
    }
}

/// A Turing functional realized as host code.
pub trait Functional: Send + Sync {
    fn eval(&self, q: &mut Query<'_>, input: u64) -> Result<u64, Stop>;
}

impl<F> Functional for F
where
    F: Fn(&mut Query<'_>, u64) -> Result<u64, Stop> + Send + Sync,
{
    fn eval(&self, q: &mut Query<'_>, input: u64) -> Result<u64, Stop> {
        self(q, input)
    }
}

pub type FunctionalRef = Arc<dyn Functional>;

/// Wraps a closure as a shareable functional.
pub fn functional(
    f: impl Fn(&mut Query<'_>, u64) -> Result<u64, Stop> + Send + Sync + 'static,
) -> FunctionalRef {
    Arc::new(f)
}

pub fn run(f: &dyn Functional, triple: &OracleTriple, input: u64, fuel: u64) -> Outcome {
    let mut q = Query::new(triple, fuel);
    run_query(f, &mut q, input)
}

fn run_query(f: &dyn Functional, q: &mut Query<'_>, input: u64) -> Outcome {
    if q.remaining() == 0 {
        return Outcome::OutOfFuel;
    }
    match f.eval(q, input) {
        Ok(v) => Outcome::Halt(v),
        Err(s) => s.into(),
    }
}

/// [`run`] that also returns the oracle accesses in order.
pub fn run_traced(
    f: &dyn Functional,
    triple: &OracleTriple,
    input: u64,
    fuel: u64,
) -> (Outcome, Vec<Access>) {
    let mut q = Query::new(triple, fuel).traced();
    let out = run_query(f, &mut q, input);
    (out, q.take_trace())
}

/// Outcome plus the fuel it consumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metered {
    pub outcome: Outcome,
    pub used: u64,
}

pub fn run_metered(f: &dyn Functional, triple: &OracleTriple, input: u64, fuel: u64) -> Metered {
    let mut q = Query::new(triple, fuel);
    let outcome = run_query(f, &mut q, input);
    Metered {
        outcome,
        used: q.used(),
    }
}

/// Runs on finite restrictions of lengths 1, 2, 4, … (jumping straight to the
/// length a demand asked for) until the run halts. `fuel` is the total budget
/// over all attempts. On a triple that is already finite a `Demand` is
/// returned as is.
pub fn run_total(f: &dyn Functional, triple: &OracleTriple, input: u64, fuel: u64) -> Outcome {
    if triple.is_finite() {
        return run(f, triple, input, fuel);
    }
    let mut left = fuel;
    let mut n = 1usize;
    loop {
        let restricted = triple.restrict(n);
        let mut q = Query::new(&restricted, left);
        let out = run_query(f, &mut q, input);
        left -= q.used();
        match out {
            Outcome::Demand => {
                if left == 0 {
                    return Outcome::OutOfFuel;
                }
                n = (2 * n).max(q.need());
            }
            other => return other,
        }
    }
}

/// One failure of halt persistence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneViolation {
    pub sample: usize,
    pub input: u64,
    pub before: Outcome,
    pub after: Outcome,
}

impl fmt::Display for MonotoneViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sample {} input {}: {:?} then {:?}",
            self.sample, self.input, self.before, self.after
        )
    }
}

/// Checks that every run that halts on a triple halts with the same value on
/// the paired extension.
pub fn check_monotone(
    f: &dyn Functional,
    samples: &[(OracleTriple, OracleTriple, u64)],
    fuel: u64,
) -> Vec<MonotoneViolation> {
    let mut out = Vec::new();
    for (i, (small, big, input)) in samples.iter().enumerate() {
        let before = run(f, small, *input, fuel);
        if let Outcome::Halt(_) = before {
            let after = run(f, big, *input, fuel);
            if after != before {
                out.push(MonotoneViolation {
                    sample: i,
                    input: *input,
                    before,
                    after,
                });
            }
        }
    }
    out
}

/// True if the finite triple `big` agrees with `small` everywhere `small` is
/// defined.
pub fn triple_extends(small: &OracleTriple, big: &OracleTriple) -> bool {
    fn frag(d: &Diagram) -> Option<&DiagramFragment> {
        match d {
            Diagram::Fragment(f) => Some(f),
            _ => None,
        }
    }
    let (Some(l1), Some(l2), Some(r1), Some(r2)) = (
        frag(&small.left),
        frag(&big.left),
        frag(&small.right),
        frag(&big.right),
    ) else {
        return false;
    };
    let (MapView::Finite(m1), MapView::Finite(m2)) = (&small.map, &big.map) else {
        return false;
    };
    l1.is_embedded_in(l2) && r1.is_embedded_in(r2) && m1.pairs().all(|(x, y)| m2.get(x) == Some(y))
}
