//! Σ and Δ schemes over a base structure and interpretation schemes built
//! from them.
//!
//! A condition constrains a list of argument tuples ("blocks"). Each block has
//! a fixed length or, when open, a minimum length with only the leading
//! entries constrained. Variables are numbered flat: the constrained entries
//! of block 0, then of block 1, and so on, then the witnesses.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functional::{DiagramKey, Functional, OracleTriple, Outcome, Query, Stop};
use crate::model::{fact_code, Elem, Presentation, Signature, Tuple};

/// Read access to a structure's atomic diagram during scheme evaluation.
pub trait Probe {
    fn holds(&mut self, rel: usize, args: &[Elem]) -> Result<bool, Stop>;
    fn tick(&mut self) -> Result<(), Stop>;
    fn charge(&mut self, n: u64) -> Result<(), Stop>;
    fn used(&self) -> u64;
    fn sub_run(
        &mut self,
        f: &dyn Functional,
        triple: &OracleTriple,
        input: u64,
    ) -> Result<Outcome, Stop>;
    /// Identifies the diagram being probed, for memoization.
    fn key(&self) -> DiagramKey;
    fn need(&self) -> usize;
    /// Stops with a demand for a prefix of length `n`.
    fn demand(&mut self, n: usize) -> Stop;
}

/// Probes one side of a query's oracle triple.
pub struct SideProbe<'q, 'a> {
    pub q: &'q mut Query<'a>,
    pub right: bool,
}

impl<'q, 'a> SideProbe<'q, 'a> {
    pub fn left(q: &'q mut Query<'a>) -> Self {
        SideProbe { q, right: false }
    }

    pub fn right(q: &'q mut Query<'a>) -> Self {
        SideProbe { q, right: true }
    }
}

impl Probe for SideProbe<'_, '_> {
    fn holds(&mut self, rel: usize, args: &[Elem]) -> Result<bool, Stop> {
        if self.right {
            self.q.right(rel, args)
        } else {
            self.q.left(rel, args)
        }
    }

    fn tick(&mut self) -> Result<(), Stop> {
        self.q.tick()
    }

    fn charge(&mut self, n: u64) -> Result<(), Stop> {
        self.q.charge(n)
    }

    fn used(&self) -> u64 {
        self.q.used()
    }

    fn sub_run(
        &mut self,
        f: &dyn Functional,
        triple: &OracleTriple,
        input: u64,
    ) -> Result<Outcome, Stop> {
        self.q.sub_run(f, triple, input)
    }

    fn need(&self) -> usize {
        self.q.need()
    }

    fn demand(&mut self, n: usize) -> Stop {
        self.q.demand(n)
    }

    fn key(&self) -> DiagramKey {
        let t = self.q.triple();
        if self.right {
            t.right.key()
        } else {
            t.left.key()
        }
    }
}

/// Probes the image of a side of the oracle under a diagram functional:
/// `holds(i, t̄)` asks `phi` about the fact with code `(i, t̄)`.
pub struct ImageProbe<'q, 'a> {
    pub q: &'q mut Query<'a>,
    pub right: bool,
    pub phi: Arc<dyn Functional>,
    pub phi_id: u64,
    side: OracleTriple,
}

impl<'q, 'a> ImageProbe<'q, 'a> {
    pub fn new(q: &'q mut Query<'a>, right: bool, phi: Arc<dyn Functional>, phi_id: u64) -> Self {
        let d = if right {
            q.triple().right.clone()
        } else {
            q.triple().left.clone()
        };
        let side = OracleTriple::new(
            d.clone(),
            crate::functional::MapView::Full(crate::model::MorphismOracle::identity()),
            d,
        );
        ImageProbe {
            q,
            right,
            phi,
            phi_id,
            side,
        }
    }
}

impl Probe for ImageProbe<'_, '_> {
    fn holds(&mut self, rel: usize, args: &[Elem]) -> Result<bool, Stop> {
        let code = fact_code(rel, args)?;
        let v = self.q.sub_run_through(&*self.phi, &self.side, code)?;
        Ok(v != 0)
    }

    fn tick(&mut self) -> Result<(), Stop> {
        self.q.tick()
    }

    fn charge(&mut self, n: u64) -> Result<(), Stop> {
        self.q.charge(n)
    }

    fn used(&self) -> u64 {
        self.q.used()
    }

    fn sub_run(
        &mut self,
        f: &dyn Functional,
        triple: &OracleTriple,
        input: u64,
    ) -> Result<Outcome, Stop> {
        self.q.sub_run(f, triple, input)
    }

    fn need(&self) -> usize {
        self.q.need()
    }

    fn demand(&mut self, n: usize) -> Stop {
        self.q.demand(n)
    }

    fn key(&self) -> DiagramKey {
        DiagramKey::Image(self.phi_id, Box::new(self.side.left.key()))
    }
}

/// Length constraint on one argument tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub len: usize,
    /// Longer tuples also match; only the first `len` entries are variables.
    pub open: bool,
}

impl Block {
    pub fn exact(len: usize) -> Self {
        Block { len, open: false }
    }

    pub fn at_least(len: usize) -> Self {
        Block { len, open: true }
    }

    pub fn matches(&self, t: &[Elem]) -> bool {
        t.len() == self.len || (self.open && t.len() > self.len)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Rel { rel: usize, args: Vec<usize> },
    Eq(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn rel(positive: bool, rel: usize, args: Vec<usize>) -> Self {
        Literal {
            positive,
            atom: Atom::Rel { rel, args },
        }
    }

    pub fn eq(a: usize, b: usize) -> Self {
        Literal {
            positive: true,
            atom: Atom::Eq(a, b),
        }
    }

    pub fn neq(a: usize, b: usize) -> Self {
        Literal {
            positive: false,
            atom: Atom::Eq(a, b),
        }
    }
}

/// One disjunct `∃s̄ φ(x̄, s̄)` with `φ` a finite conjunction of literals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExistentialCondition {
    pub shape: Vec<Block>,
    pub witnesses: usize,
    pub literals: Vec<Literal>,
}

impl ExistentialCondition {
    pub fn new(shape: Vec<Block>, witnesses: usize, literals: Vec<Literal>) -> Self {
        ExistentialCondition {
            shape,
            witnesses,
            literals,
        }
    }

    /// Number of free variables.
    pub fn free_arity(&self) -> usize {
        self.shape.iter().map(|b| b.len).sum()
    }

    pub fn variables(&self) -> usize {
        self.free_arity() + self.witnesses
    }

    pub fn matches(&self, blocks: &[&[Elem]]) -> bool {
        blocks.len() == self.shape.len() && self.shape.iter().zip(blocks).all(|(s, b)| s.matches(b))
    }

    /// The free variables' values for matching blocks.
    pub fn free_values(&self, blocks: &[&[Elem]]) -> Tuple {
        self.shape
            .iter()
            .zip(blocks)
            .flat_map(|(s, b)| b[..s.len].iter().copied())
            .collect()
    }

    /// Checks positions and relation arities against a signature.
    pub fn validate(&self, sig: &Signature) -> Result<()> {
        let n = self.variables();
        for lit in &self.literals {
            match &lit.atom {
                Atom::Eq(a, b) => {
                    if *a >= n || *b >= n {
                        return Err(Error::Argument(format!("position out of range in {self}")));
                    }
                }
                Atom::Rel { rel, args } => {
                    match sig.arity(*rel) {
                        Some(a) if a == args.len() => {}
                        _ => {
                            return Err(Error::Argument(format!(
                                "relation {rel} with {} arguments does not fit {sig:?}",
                                args.len()
                            )))
                        }
                    }
                    if args.iter().any(|&p| p >= n) {
                        return Err(Error::Argument(format!("position out of range in {self}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Evaluates the literals under a full assignment.
    pub fn holds_at(&self, probe: &mut dyn Probe, values: &[Elem]) -> Result<bool, Stop> {
        let mut args = Vec::new();
        for lit in &self.literals {
            let v = match &lit.atom {
                Atom::Eq(a, b) => values[*a] == values[*b],
                Atom::Rel { rel, args: pos } => {
                    args.clear();
                    args.extend(pos.iter().map(|&p| values[p]));
                    probe.holds(*rel, &args)?
                }
            };
            if v != lit.positive {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Tries the witness tuples whose largest entry is `w - 1` (all of them
    /// when `all` is set: entries below `w`). With no witnesses the empty
    /// tuple is tried for `w == 1` only, or always when `all` is set.
    fn try_witnesses(
        &self,
        probe: &mut dyn Probe,
        free: &[Elem],
        w: u64,
        all: bool,
    ) -> Result<bool, Stop> {
        let m = self.witnesses;
        if m == 0 {
            if !(all || w == 1) {
                return Ok(false);
            }
            probe.tick()?;
            return self.holds_at(probe, free);
        }
        if w == 0 {
            return Ok(false);
        }
        let mut vals = free.to_vec();
        vals.resize(free.len() + m, 0);
        let mut digits = vec![0u64; m];
        loop {
            if all || digits.contains(&(w - 1)) {
                vals[free.len()..].copy_from_slice(&digits);
                probe.tick()?;
                if self.holds_at(probe, &vals)? {
                    return Ok(true);
                }
            }
            let mut p = m;
            loop {
                if p == 0 {
                    return Ok(false);
                }
                p -= 1;
                digits[p] += 1;
                if digits[p] < w {
                    break;
                }
                digits[p] = 0;
            }
        }
    }
}

fn write_shape(f: &mut fmt::Formatter<'_>, shape: &[Block]) -> fmt::Result {
    for (i, b) in shape.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{}{}", b.len, if b.open { "+" } else { "" })?;
    }
    Ok(())
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.positive { '+' } else { '-' };
        match &self.atom {
            Atom::Eq(a, b) => write!(f, "{sign} eq {a} {b}"),
            Atom::Rel { rel, args } => {
                write!(f, "{sign} rel {rel}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for ExistentialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_shape(f, &self.shape)?;
        write!(f, " {} :", self.witnesses)?;
        for (i, l) in self.literals.iter().enumerate() {
            write!(f, "{} {l}", if i == 0 { "" } else { " ;" })?;
        }
        Ok(())
    }
}

fn parse_usize(s: &str, what: &str) -> Result<usize, String> {
    s.parse::<usize>().map_err(|_| format!("bad {what} `{s}`"))
}

impl FromStr for Literal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        let positive = match toks.first() {
            Some(&"+") => true,
            Some(&"-") => false,
            _ => return Err(format!("literal must start with + or -: `{s}`")),
        };
        match toks.get(1) {
            Some(&"eq") if toks.len() == 4 => Ok(Literal {
                positive,
                atom: Atom::Eq(parse_usize(toks[2], "position")?, parse_usize(toks[3], "position")?),
            }),
            Some(&"rel") if toks.len() >= 4 => Ok(Literal {
                positive,
                atom: Atom::Rel {
                    rel: parse_usize(toks[2], "relation index")?,
                    args: toks[3..]
                        .iter()
                        .map(|t| parse_usize(t, "position"))
                        .collect::<Result<_, _>>()?,
                },
            }),
            _ => Err(format!("malformed literal `{s}`")),
        }
    }
}

impl FromStr for ExistentialCondition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (head, body) = s.split_once(':').ok_or_else(|| format!("missing `:` in `{s}`"))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        if head.len() != 2 {
            return Err(format!("expected `<shape> <witnesses>` before `:` in `{s}`"));
        }
        let shape = head[0]
            .split(',')
            .map(|b| match b.strip_suffix('+') {
                Some(n) => parse_usize(n, "block length").map(Block::at_least),
                None => parse_usize(b, "block length").map(Block::exact),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let witnesses = parse_usize(head[1], "witness count")?;
        let literals = body
            .split(';')
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExistentialCondition::new(shape, witnesses, literals))
    }
}

/// A Σ-definable relation: a deterministic, possibly infinite, list of
/// existential conditions.
pub trait SigmaScheme: Send + Sync {
    /// The `idx`-th disjunct; `None` past the end of a finite list.
    fn disjunct(&self, idx: usize) -> Option<ExistentialCondition>;

    /// The whole list when it is finite.
    fn as_list(&self) -> Option<&[ExistentialCondition]> {
        None
    }

    /// Tests the work scheduled for `stage` (stages start at 1): disjunct `d`
    /// with witness tuples whose largest entry is `stage - d - 1`. Over all
    /// stages every disjunct meets every witness tuple exactly once.
    fn fires_at(
        &self,
        probe: &mut dyn Probe,
        blocks: &[&[Elem]],
        stage: usize,
    ) -> Result<Option<ExistentialCondition>, Stop> {
        for d in 0..stage {
            let Some(c) = self.disjunct(d) else { break };
            if !c.matches(blocks) {
                continue;
            }
            let free = c.free_values(blocks);
            if c.try_witnesses(probe, &free, (stage - d) as u64, false)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }

    /// True when `fires_at` can never fire after `stage`.
    fn exhausted_after(&self, stage: usize) -> bool {
        match self.as_list() {
            Some(l) => stage >= l.len() && l.iter().all(|c| c.witnesses == 0),
            None => false,
        }
    }
}

/// A finite disjunction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ListScheme(pub Vec<ExistentialCondition>);

impl SigmaScheme for ListScheme {
    fn disjunct(&self, idx: usize) -> Option<ExistentialCondition> {
        self.0.get(idx).cloned()
    }

    fn as_list(&self) -> Option<&[ExistentialCondition]> {
        Some(&self.0)
    }
}

/// A Σ scheme given by a disjunct generator.
pub struct GeneratedScheme<F>(pub F);

impl<F> SigmaScheme for GeneratedScheme<F>
where
    F: Fn(usize) -> Option<ExistentialCondition> + Send + Sync,
{
    fn disjunct(&self, idx: usize) -> Option<ExistentialCondition> {
        (self.0)(idx)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    In,
    Out,
    Unknown,
}

/// A decision with the disjunct that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub decision: Decision,
    pub condition: Option<ExistentialCondition>,
}

impl Verdict {
    pub fn unknown() -> Self {
        Verdict {
            decision: Decision::Unknown,
            condition: None,
        }
    }
}

/// Decides both sides at once, for schemes whose disjuncts are discovered by
/// a search rather than listed.
pub trait JointDecider: Send + Sync {
    fn decide(
        &self,
        probe: &mut dyn Probe,
        blocks: &[&[Elem]],
        max_stage: Option<usize>,
    ) -> Result<Verdict, Stop>;
}

/// A relation whose positive and negative sides are both Σ.
#[derive(Clone)]
pub struct DeltaScheme {
    pub positive: Arc<dyn SigmaScheme>,
    pub negative: Arc<dyn SigmaScheme>,
    pub joint: Option<Arc<dyn JointDecider>>,
}

impl DeltaScheme {
    pub fn lists(positive: Vec<ExistentialCondition>, negative: Vec<ExistentialCondition>) -> Self {
        DeltaScheme {
            positive: Arc::new(ListScheme(positive)),
            negative: Arc::new(ListScheme(negative)),
            joint: None,
        }
    }

    pub fn empty() -> Self {
        Self::lists(Vec::new(), Vec::new())
    }

    /// Both sides as finite lists, when they are.
    pub fn as_lists(&self) -> Option<(&[ExistentialCondition], &[ExistentialCondition])> {
        Some((self.positive.as_list()?, self.negative.as_list()?))
    }

    /// Dovetails both sides until one fires. Both firing at the same stage is
    /// reported as a fault; `max_stage` bounds the search (`None`: until the
    /// probe runs out of fuel).
    pub fn decide(
        &self,
        probe: &mut dyn Probe,
        blocks: &[&[Elem]],
        max_stage: Option<usize>,
    ) -> Result<Verdict, Stop> {
        if let Some(j) = &self.joint {
            return j.decide(probe, blocks, max_stage);
        }
        let mut stage = 1;
        loop {
            if max_stage.is_some_and(|m| stage > m) {
                return Ok(Verdict::unknown());
            }
            probe.tick()?;
            let pos = self.positive.fires_at(probe, blocks, stage)?;
            let neg = self.negative.fires_at(probe, blocks, stage)?;
            match (pos, neg) {
                (Some(_), Some(_)) => {
                    return Err(Stop::Fault(Error::SchemeUnsound {
                        tuple: format!("{blocks:?}"),
                    }))
                }
                (Some(c), None) => {
                    return Ok(Verdict {
                        decision: Decision::In,
                        condition: Some(c),
                    })
                }
                (None, Some(c)) => {
                    return Ok(Verdict {
                        decision: Decision::Out,
                        condition: Some(c),
                    })
                }
                (None, None) => {}
            }
            if self.positive.exhausted_after(stage) && self.negative.exhausted_after(stage) {
                return Ok(Verdict::unknown());
            }
            stage += 1;
        }
    }

    /// Runs both sides through every stage up to `max_stage` and reports
    /// which fired.
    pub fn sides_within(
        &self,
        probe: &mut dyn Probe,
        blocks: &[&[Elem]],
        max_stage: usize,
    ) -> Result<(bool, bool), Stop> {
        if let Some(j) = &self.joint {
            let v = j.decide(probe, blocks, Some(max_stage))?;
            return Ok((v.decision == Decision::In, v.decision == Decision::Out));
        }
        let (mut pos, mut neg) = (false, false);
        for stage in 1..=max_stage {
            pos = pos || self.positive.fires_at(probe, blocks, stage)?.is_some();
            neg = neg || self.negative.fires_at(probe, blocks, stage)?.is_some();
            if self.positive.exhausted_after(stage) && self.negative.exhausted_after(stage) {
                break;
            }
        }
        Ok((pos, neg))
    }
}

impl fmt::Debug for DeltaScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_lists() {
            Some((p, n)) => write!(f, "DeltaScheme(+{} -{})", p.len(), n.len()),
            None => write!(f, "DeltaScheme(generated)"),
        }
    }
}

impl PartialEq for DeltaScheme {
    fn eq(&self, other: &Self) -> bool {
        match (self.as_lists(), other.as_lists()) {
            (Some(a), Some(b)) => a == b,
            _ => {
                Arc::ptr_eq(&self.positive, &other.positive)
                    && Arc::ptr_eq(&self.negative, &other.negative)
            }
        }
    }
}

/// Budget for deciding a Δ scheme on a presentation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DeltaBudget {
    pub max_stage: Option<usize>,
    pub fuel: u64,
}

impl Default for DeltaBudget {
    fn default() -> Self {
        DeltaBudget {
            max_stage: Some(64),
            fuel: 1_000_000,
        }
    }
}

/// Bounded satisfaction: some witness tuple below `witness_bound` makes every
/// literal true. `free` lists the free variables' values.
pub fn sat_condition(
    pres: &Presentation,
    c: &ExistentialCondition,
    free: &[Elem],
    witness_bound: u64,
) -> Result<bool> {
    if free.len() != c.free_arity() {
        return Err(Error::Argument(format!(
            "condition has {} free variables, got {}",
            c.free_arity(),
            free.len()
        )));
    }
    let t = OracleTriple::identity_on(pres);
    let mut q = Query::new(&t, u64::MAX);
    let mut probe = SideProbe::left(&mut q);
    c.try_witnesses(&mut probe, free, witness_bound, true)
        .map_err(stop_to_error)
}

pub(crate) fn stop_to_error(s: Stop) -> Error {
    match s {
        Stop::Fault(e) => e,
        Stop::OutOfFuel => Error::fuel("scheme evaluation"),
        Stop::Demand => Error::Argument("full diagram demanded more".into()),
    }
}

/// Decides `d` on `pres` at the given argument tuples. Running out of fuel or
/// stages gives `Unknown`; both sides firing is an error.
pub fn decide_delta(
    pres: &Presentation,
    d: &DeltaScheme,
    blocks: &[&[Elem]],
    budget: DeltaBudget,
) -> Result<Decision> {
    let t = OracleTriple::identity_on(pres);
    let mut q = Query::new(&t, budget.fuel);
    let mut probe = SideProbe::left(&mut q);
    match d.decide(&mut probe, blocks, budget.max_stage) {
        Ok(v) => Ok(v.decision),
        Err(Stop::OutOfFuel) => Ok(Decision::Unknown),
        Err(s) => Err(stop_to_error(s)),
    }
}

/// Bounds for tuple enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TupleBound {
    pub max_len: usize,
    pub entries_below: u64,
}

/// All tuples within the bound, ordered by length, then lexicographically.
pub fn tuples_in(bound: TupleBound) -> Vec<Tuple> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..bound.max_len {
        let mut next = Vec::new();
        for t in &layer {
            for x in 0..bound.entries_below {
                let mut u: Tuple = t.clone();
                u.push(x);
                next.push(u);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Members and undecided tuples of a unary scheme within a bound.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Members {
    pub members: Vec<Tuple>,
    pub unknown: Vec<Tuple>,
}

pub fn enumerate_members(
    pres: &Presentation,
    d: &DeltaScheme,
    bound: TupleBound,
    budget: DeltaBudget,
) -> Result<Members> {
    let mut out = Members::default();
    for t in tuples_in(bound) {
        match decide_delta(pres, d, &[&t], budget)? {
            Decision::In => out.members.push(t),
            Decision::Out => {}
            Decision::Unknown => out.unknown.push(t),
        }
    }
    Ok(out)
}

static NEXT_SCHEME: AtomicU64 = AtomicU64::new(1);

pub(crate) fn next_scheme_id() -> u64 {
    NEXT_SCHEME.fetch_add(1, Ordering::Relaxed)
}

/// Relation schemes of an interpretation.
#[derive(Clone)]
pub enum Relations {
    List(Vec<DeltaScheme>),
    Generated(Arc<dyn Fn(usize) -> DeltaScheme + Send + Sync>),
}

/// An effective interpretation of a `target`-structure in a `base`-structure.
///
/// `dom` is a unary scheme over pair codes `(f, b̄, f, …, f)`; the element of
/// the interpreted structure it names is the class of the code under
/// `equiv`. Schemes must not depend on the choice of the marker `f`.
#[derive(Clone)]
pub struct InterpScheme {
    id: u64,
    pub name: String,
    pub base: Signature,
    pub target: Signature,
    pub dom: DeltaScheme,
    pub equiv: DeltaScheme,
    pub relations: Relations,
}

impl InterpScheme {
    pub fn new(
        name: impl Into<String>,
        base: Signature,
        target: Signature,
        dom: DeltaScheme,
        equiv: DeltaScheme,
        relations: Relations,
    ) -> Self {
        InterpScheme {
            id: next_scheme_id(),
            name: name.into(),
            base,
            target,
            dom,
            equiv,
            relations,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn relation(&self, i: usize) -> Option<DeltaScheme> {
        self.target.arity(i)?;
        match &self.relations {
            Relations::List(v) => v.get(i).cloned(),
            Relations::Generated(f) => Some(f(i)),
        }
    }

    /// Checks every listed condition against the base signature.
    pub fn validate(&self) -> Result<()> {
        let mut all: Vec<&DeltaScheme> = vec![&self.dom, &self.equiv];
        if let Relations::List(v) = &self.relations {
            if Some(v.len()) != self.target.relation_count() {
                return Err(Error::Argument(format!(
                    "{} relation schemes for target {:?}",
                    v.len(),
                    self.target
                )));
            }
            all.extend(v.iter());
        }
        for d in all {
            if let Some((p, n)) = d.as_lists() {
                for c in p.iter().chain(n) {
                    c.validate(&self.base)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for InterpScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InterpScheme({} #{})", self.name, self.id)
    }
}

impl PartialEq for InterpScheme {
    fn eq(&self, other: &Self) -> bool {
        let rels = match (&self.relations, &other.relations) {
            (Relations::List(a), Relations::List(b)) => a == b,
            (Relations::Generated(a), Relations::Generated(b)) => Arc::ptr_eq(a, b),
            _ => false,
        };
        self.name == other.name
            && self.base == other.base
            && self.target == other.target
            && self.dom == other.dom
            && self.equiv == other.equiv
            && rels
    }
}

/// Negative disjuncts covering every tuple not of exact length `len`.
pub fn other_lengths(len: usize) -> Vec<ExistentialCondition> {
    let mut v: Vec<ExistentialCondition> = (0..len)
        .map(|l| ExistentialCondition::new(vec![Block::exact(l)], 0, vec![]))
        .collect();
    v.push(ExistentialCondition::new(vec![Block::at_least(len + 1)], 0, vec![]));
    v
}

/// Negative disjuncts covering every pair of tuples whose lengths are not
/// `(a, b)`.
pub fn other_lengths2(a: usize, b: usize) -> Vec<ExistentialCondition> {
    let mut v = Vec::new();
    for l in 0..a {
        v.push(ExistentialCondition::new(vec![Block::exact(l), Block::at_least(0)], 0, vec![]));
    }
    v.push(ExistentialCondition::new(
        vec![Block::at_least(a + 1), Block::at_least(0)],
        0,
        vec![],
    ));
    for l in 0..b {
        v.push(ExistentialCondition::new(vec![Block::exact(a), Block::exact(l)], 0, vec![]));
    }
    v.push(ExistentialCondition::new(
        vec![Block::exact(a), Block::at_least(b + 1)],
        0,
        vec![],
    ));
    v
}

/// Disjuncts saying some two of the given positions are equal.
pub fn some_equal(positions: &[usize], shape: &[Block]) -> Vec<ExistentialCondition> {
    let mut v = Vec::new();
    for (i, &a) in positions.iter().enumerate() {
        for &b in &positions[i + 1..] {
            v.push(ExistentialCondition::new(shape.to_vec(), 0, vec![Literal::eq(a, b)]));
        }
    }
    v
}

/// Literals saying the given positions are pairwise distinct.
pub fn all_distinct(positions: &[usize]) -> Vec<Literal> {
    let mut v = Vec::new();
    for (i, &a) in positions.iter().enumerate() {
        for &b in &positions[i + 1..] {
            v.push(Literal::neq(a, b));
        }
    }
    v
}

/// Domain of codes `(f, b₀, …, b_{k-1})` of `(b̄, 0)` with `f, b̄` pairwise
/// distinct.
pub fn injective_code_domain(k: usize) -> DeltaScheme {
    let shape = vec![Block::exact(k + 1)];
    let pos: Vec<usize> = (0..=k).collect();
    let mut neg = other_lengths(k + 1);
    neg.extend(some_equal(&pos, &shape));
    DeltaScheme::lists(
        vec![ExistentialCondition::new(shape, 0, all_distinct(&pos))],
        neg,
    )
}

/// The identity interpretation of a structure in itself: elements are codes
/// `(f, x)`, two codes are equivalent when they name the same `x`, and each
/// relation is read off the named elements.
pub fn identity_scheme(sig: &Signature) -> Result<InterpScheme> {
    let arities = sig
        .finite_arities()
        .ok_or_else(|| Error::Argument("identity scheme needs a finite signature".into()))?
        .to_vec();
    let dom = injective_code_domain(1);
    let two = vec![Block::exact(2), Block::exact(2)];
    let mut eq_neg = other_lengths2(2, 2);
    eq_neg.push(ExistentialCondition::new(two.clone(), 0, vec![Literal::neq(1, 3)]));
    let equiv = DeltaScheme::lists(
        vec![ExistentialCondition::new(two, 0, vec![Literal::eq(1, 3)])],
        eq_neg,
    );
    let relations = arities
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let shape = vec![Block::exact(2); a];
            let args: Vec<usize> = (0..a).map(|s| 2 * s + 1).collect();
            let mut neg = vec![ExistentialCondition::new(
                shape.clone(),
                0,
                vec![Literal::rel(false, i, args.clone())],
            )];
            for s in 0..a {
                for l in [0usize, 1] {
                    let mut sh = vec![Block::at_least(0); a];
                    sh[s] = Block::exact(l);
                    neg.push(ExistentialCondition::new(sh, 0, vec![]));
                }
                let mut sh = vec![Block::at_least(0); a];
                sh[s] = Block::at_least(3);
                neg.push(ExistentialCondition::new(sh, 0, vec![]));
            }
            DeltaScheme::lists(
                vec![ExistentialCondition::new(shape, 0, vec![Literal::rel(true, i, args)])],
                neg,
            )
        })
        .collect();
    Ok(InterpScheme::new(
        "identity",
        sig.clone(),
        sig.clone(),
        dom,
        equiv,
        Relations::List(relations),
    ))
}

/// 2-element subsets of a pure set with the relation "the two sets share an
/// element" (reflexive on each set).
pub fn pairs_scheme() -> InterpScheme {
    let dom = injective_code_domain(2);
    let two = vec![Block::exact(3), Block::exact(3)];
    // positions: f=0 a=1 b=2 | g=3 c=4 d=5
    let same = |a: usize, b: usize, c: usize, d: usize| {
        ExistentialCondition::new(two.clone(), 0, vec![Literal::eq(a, b), Literal::eq(c, d)])
    };
    let apart = |a: usize, b: usize, c: usize, d: usize| {
        ExistentialCondition::new(two.clone(), 0, vec![Literal::neq(a, b), Literal::neq(c, d)])
    };
    let mut eq_neg = other_lengths2(3, 3);
    eq_neg.extend([apart(1, 4, 1, 5), apart(1, 4, 2, 4), apart(2, 5, 1, 5), apart(2, 5, 2, 4)]);
    let equiv = DeltaScheme::lists(vec![same(1, 4, 2, 5), same(1, 5, 2, 4)], eq_neg);
    let mut meet_neg = other_lengths2(3, 3);
    meet_neg.push(ExistentialCondition::new(
        two.clone(),
        0,
        vec![Literal::neq(1, 4), Literal::neq(1, 5), Literal::neq(2, 4), Literal::neq(2, 5)],
    ));
    let meet = DeltaScheme::lists(
        vec![
            ExistentialCondition::new(two.clone(), 0, vec![Literal::eq(1, 4)]),
            ExistentialCondition::new(two.clone(), 0, vec![Literal::eq(1, 5)]),
            ExistentialCondition::new(two.clone(), 0, vec![Literal::eq(2, 4)]),
            ExistentialCondition::new(two, 0, vec![Literal::eq(2, 5)]),
        ],
        meet_neg,
    );
    InterpScheme::new(
        "pairs",
        Signature::empty(),
        Signature::finite(vec![2]).unwrap(),
        dom,
        equiv,
        Relations::List(vec![meet]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::canonical_code;

    fn between() -> ExistentialCondition {
        "2 1 : + rel 0 0 2 ; + rel 0 2 1".parse().unwrap()
    }

    #[test]
    fn sat_condition_examples() {
        let order = Presentation::order();
        let empty = ExistentialCondition::new(vec![Block::exact(2)], 0, vec![]);
        assert!(sat_condition(&order, &empty, &[4, 4], 1).unwrap());
        assert!(sat_condition(&order, &between(), &[1, 3], 10).unwrap());
        for bound in 0..12 {
            assert!(!sat_condition(&order, &between(), &[1, 2], bound).unwrap());
        }
        assert!(sat_condition(&order, &between(), &[1, 2], 1).is_ok());
        assert!(sat_condition(&order, &between(), &[1], 1).is_err());
    }

    #[test]
    fn condition_text_round_trip() {
        let c = between();
        assert_eq!(c.to_string(), "2 1 : + rel 0 0 2 ; + rel 0 2 1");
        let d: ExistentialCondition = "3+,0 0 : - eq 0 1".parse().unwrap();
        assert_eq!(d.shape, vec![Block::at_least(3), Block::exact(0)]);
        assert_eq!(d.to_string().parse::<ExistentialCondition>().unwrap(), d);
        assert!("2 0 : * rel 0 1".parse::<ExistentialCondition>().is_err());
        assert!("2 0 + rel 0 1".parse::<ExistentialCondition>().is_err());
    }

    #[test]
    fn identity_dom_on_pure_set() {
        let s = identity_scheme(&Signature::empty()).unwrap();
        let p = Presentation::pure_set();
        let b = DeltaBudget::default();
        assert_eq!(decide_delta(&p, &s.dom, &[&canonical_code(&[5], 0)], b).unwrap(), Decision::In);
        assert_eq!(decide_delta(&p, &s.dom, &[&[3, 3]], b).unwrap(), Decision::Out);
        assert_eq!(decide_delta(&p, &s.dom, &[&[3, 1, 3]], b).unwrap(), Decision::Out);
        assert_eq!(decide_delta(&p, &s.dom, &[&[]], b).unwrap(), Decision::Out);
    }

    #[test]
    fn identity_members_small() {
        let s = identity_scheme(&Signature::empty()).unwrap();
        let m = enumerate_members(
            &Presentation::pure_set(),
            &s.dom,
            TupleBound {
                max_len: 2,
                entries_below: 3,
            },
            DeltaBudget::default(),
        )
        .unwrap();
        assert!(m.unknown.is_empty());
        let expected: Vec<Tuple> = vec![
            vec![0, 1],
            vec![0, 2],
            vec![1, 0],
            vec![1, 2],
            vec![2, 0],
            vec![2, 1],
        ];
        assert_eq!(m.members, expected);
        let named: Vec<Elem> = m.members.iter().map(|t| t[1]).collect();
        assert_eq!(named, vec![1, 2, 0, 2, 0, 1]);
    }

    #[test]
    fn empty_scheme_has_no_members() {
        let m = enumerate_members(
            &Presentation::pure_set(),
            &DeltaScheme::lists(vec![], vec![ExistentialCondition::new(vec![Block::at_least(0)], 0, vec![])]),
            TupleBound {
                max_len: 2,
                entries_below: 3,
            },
            DeltaBudget::default(),
        )
        .unwrap();
        assert!(m.members.is_empty() && m.unknown.is_empty());
    }

    #[test]
    fn pairs_equiv_swapped() {
        let s = pairs_scheme();
        let p = Presentation::pure_set();
        let b = DeltaBudget::default();
        let x = canonical_code(&[2, 5], 0);
        let y = canonical_code(&[5, 2], 0);
        let z = canonical_code(&[5, 3], 0);
        assert_eq!(decide_delta(&p, &s.equiv, &[&x, &y], b).unwrap(), Decision::In);
        assert_eq!(decide_delta(&p, &s.equiv, &[&x, &z], b).unwrap(), Decision::Out);
        let meet = s.relation(0).unwrap();
        assert_eq!(decide_delta(&p, &meet, &[&x, &z], b).unwrap(), Decision::In);
        let w = canonical_code(&[7, 3], 0);
        assert_eq!(decide_delta(&p, &meet, &[&x, &w], b).unwrap(), Decision::Out);
    }

    #[test]
    fn unsound_scheme_is_reported() {
        let always = ExistentialCondition::new(vec![Block::at_least(0)], 0, vec![]);
        let d = DeltaScheme::lists(vec![always.clone()], vec![always]);
        let r = decide_delta(&Presentation::pure_set(), &d, &[&[1]], DeltaBudget::default());
        assert!(matches!(r, Err(Error::SchemeUnsound { .. })));
    }

    #[test]
    fn witnessed_scheme_dovetails() {
        // x₀ < x₁ with a point strictly between, against "no point between"
        let pos = vec![between()];
        let neg = vec!["2 0 : - rel 0 0 1".parse().unwrap()];
        let d = DeltaScheme::lists(pos, neg);
        let p = Presentation::order();
        let b = DeltaBudget {
            max_stage: Some(40),
            fuel: 1_000_000,
        };
        assert_eq!(decide_delta(&p, &d, &[&[1, 9]], b).unwrap(), Decision::In);
        assert_eq!(decide_delta(&p, &d, &[&[9, 1]], b).unwrap(), Decision::Out);
    }

    #[test]
    fn schemes_validate() {
        identity_scheme(&Signature::finite(vec![2, 1]).unwrap())
            .unwrap()
            .validate()
            .unwrap();
        pairs_scheme().validate().unwrap();
    }
}
