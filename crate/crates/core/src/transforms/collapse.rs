//! The classes of an interpretation on one diagram, in a fixed order.
//!
//! Candidates are pairs `(b̄, m)` ordered by weight `m + 3|b̄| + max b̄`
//! (`max` of the empty tuple is 0), then by length, by `m` and
//! lexicographically, and are tested through their
//! canonical codes. A candidate starts a new class when it is in the domain
//! and inequivalent to every earlier representative.
//!
//! Tables are shared between runs, keyed by scheme and diagram. A run that
//! reads a table is charged the fuel a fresh build would have spent, so
//! outcomes and fuel use do not depend on what was built before.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::functional::{DiagramKey, OracleTriple, Query, Stop};
use crate::interp::{stop_to_error, Block, Decision, DeltaScheme, InterpScheme, Probe, SideProbe};
use crate::model::{canonical_code, Elem, Presentation, Tuple};

pub fn candidate_weight(b: &[Elem], m: usize) -> usize {
    m + 3 * b.len() + b.iter().max().map_or(0, |&x| x as usize)
}

/// Tuples of length `len` with largest entry `top`, in lexicographic order.
fn tuples_with_max(len: usize, top: Elem, cur: &mut Tuple, hit: bool, out: &mut Vec<Tuple>) {
    if cur.len() == len {
        if hit {
            out.push(cur.clone());
        }
        return;
    }
    for v in 0..=top {
        cur.push(v);
        tuples_with_max(len, top, cur, hit || v == top, out);
        cur.pop();
    }
}

/// All candidates of weight `w` whose code length `1 + |b̄| + m` passes
/// `allow`, in candidate order.
pub fn candidates_of_weight(w: usize, allow: &dyn Fn(usize) -> bool) -> Vec<(Tuple, usize)> {
    let mut out = Vec::new();
    if allow(1 + w) {
        out.push((Vec::new(), w));
    }
    for len in 1..=w / 3 {
        for m in 0..=w - 3 * len {
            if !allow(1 + len + m) {
                continue;
            }
            let mut ts = Vec::new();
            tuples_with_max(len, (w - 3 * len - m) as Elem, &mut Vec::new(), false, &mut ts);
            out.extend(ts.into_iter().map(|t| (t, m)));
        }
    }
    out
}

/// Code shapes the domain can contain, read off a listed positive side.
fn code_shapes(scheme: &InterpScheme) -> Option<Vec<Block>> {
    let list = scheme.dom.positive.as_list()?;
    list.iter()
        .map(|c| (c.shape.len() == 1).then(|| c.shape[0]))
        .collect()
}

fn incomplete(what: &str, blocks: &[&[Elem]]) -> Stop {
    Stop::Fault(Error::SchemeIncomplete {
        tuple: format!("{what} {blocks:?}"),
    })
}

/// Decides a Δ scheme that must be total on its arguments.
pub(crate) fn decide_total(
    d: &DeltaScheme,
    probe: &mut dyn Probe,
    blocks: &[&[Elem]],
    what: &str,
) -> Result<bool, Stop> {
    match d.decide(probe, blocks, None)?.decision {
        Decision::In => Ok(true),
        Decision::Out => Ok(false),
        Decision::Unknown => Err(incomplete(what, blocks)),
    }
}

struct Table {
    shapes: Option<Vec<Block>>,
    reps: Vec<Tuple>,
    /// Fuel a fresh build spends up to and including each representative.
    cost: Vec<u64>,
    /// Fuel spent through the last finished candidate.
    spent: u64,
    weight: usize,
    batch: Vec<(Tuple, usize)>,
    pos: usize,
    /// Fuel to the demand that stops the build, and its need.
    stuck: Option<(u64, usize)>,
}

impl Table {
    fn new(scheme: &InterpScheme) -> Self {
        Table {
            shapes: code_shapes(scheme),
            reps: Vec::new(),
            cost: Vec::new(),
            spent: 0,
            weight: 0,
            batch: Vec::new(),
            pos: 0,
            stuck: None,
        }
    }

    fn next_candidate(&mut self) -> Tuple {
        while self.pos >= self.batch.len() {
            let shapes = self.shapes.clone();
            let allow = move |l: usize| match &shapes {
                Some(s) => s.iter().any(|b| b.len == l || (b.open && l > b.len)),
                None => true,
            };
            self.batch = candidates_of_weight(self.weight, &allow);
            self.weight += 1;
            self.pos = 0;
        }
        let (b, m) = &self.batch[self.pos];
        canonical_code(b, *m)
    }

    /// Tests one candidate; true when it starts a new class.
    fn test(scheme: &InterpScheme, reps: &[Tuple], probe: &mut dyn Probe, code: &[Elem]) -> Result<bool, Stop> {
        probe.tick()?;
        if !decide_total(&scheme.dom, probe, &[code], "dom")? {
            return Ok(false);
        }
        for r in reps {
            if decide_total(&scheme.equiv, probe, &[code, r], "equiv")? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn extend(&mut self, scheme: &InterpScheme, probe: &mut dyn Probe, t: usize) -> Result<(), Stop> {
        while self.reps.len() <= t {
            let code = self.next_candidate();
            let before = probe.used();
            match Self::test(scheme, &self.reps, probe, &code) {
                Ok(new) => {
                    self.spent += probe.used() - before;
                    self.pos += 1;
                    if new {
                        self.reps.push(code);
                        self.cost.push(self.spent);
                    }
                }
                Err(Stop::Demand) => {
                    self.stuck = Some((self.spent + probe.used() - before, probe.need()));
                    return Err(Stop::Demand);
                }
                Err(s) => return Err(s),
            }
        }
        Ok(())
    }
}

type TableRef = Arc<Mutex<Table>>;

fn tables() -> &'static Mutex<HashMap<(u64, DiagramKey), TableRef>> {
    static T: OnceLock<Mutex<HashMap<(u64, DiagramKey), TableRef>>> = OnceLock::new();
    T.get_or_init(Default::default)
}

fn table_for(scheme: &InterpScheme, key: DiagramKey) -> TableRef {
    let mut all = tables().lock().unwrap_or_else(|e| e.into_inner());
    all.entry((scheme.id(), key))
        .or_insert_with(|| Arc::new(Mutex::new(Table::new(scheme))))
        .clone()
}

/// Drops every shared table.
pub fn clear_collapse_cache() {
    tables().lock().unwrap_or_else(|e| e.into_inner()).clear();
}

/// Incremental access to the classes of `scheme` on one probe. Reading
/// class `t` charges the build cost not yet charged through this view.
pub struct CollapseView<'s> {
    scheme: &'s InterpScheme,
    charged: u64,
}

impl<'s> CollapseView<'s> {
    pub fn new(scheme: &'s InterpScheme) -> Self {
        CollapseView { scheme, charged: 0 }
    }

    fn pay(&mut self, probe: &mut dyn Probe, upto: u64) -> Result<(), Stop> {
        if upto > self.charged {
            probe.charge(upto - self.charged)?;
            self.charged = upto;
        }
        Ok(())
    }

    /// Representative code of class `t`.
    pub fn rep(&mut self, probe: &mut dyn Probe, t: usize) -> Result<Tuple, Stop> {
        let table = table_for(self.scheme, probe.key());
        let mut tb = table.lock().unwrap_or_else(|e| e.into_inner());
        if t < tb.reps.len() {
            let (r, c) = (tb.reps[t].clone(), tb.cost[t]);
            drop(tb);
            self.pay(probe, c)?;
            return Ok(r);
        }
        if let Some((c, need)) = tb.stuck {
            drop(tb);
            self.pay(probe, c)?;
            return Err(probe.demand(need));
        }
        let spent = tb.spent;
        self.pay(probe, spent)?;
        let before = probe.used();
        let r = tb.extend(self.scheme, probe, t);
        self.charged += probe.used() - before;
        r.map(|()| tb.reps[t].clone())
    }

    /// Index of the class of `code`, scanning classes in order.
    pub fn class_of(&mut self, probe: &mut dyn Probe, code: &[Elem]) -> Result<usize, Stop> {
        let equiv = self.scheme.equiv.clone();
        for t in 0.. {
            let r = self.rep(probe, t)?;
            if decide_total(&equiv, probe, &[code, &r], "equiv")? {
                return Ok(t);
            }
        }
        unreachable!()
    }
}

/// The first `classes` representatives of `scheme` on `pres`.
pub fn collapse(scheme: &InterpScheme, pres: &Presentation, classes: usize, fuel: u64) -> Result<Vec<Tuple>> {
    let t = OracleTriple::identity_on(pres);
    let mut q = Query::new(&t, fuel);
    let mut probe = SideProbe::left(&mut q);
    let mut view = CollapseView::new(scheme);
    (0..classes)
        .map(|i| view.rep(&mut probe, i).map_err(stop_to_error))
        .collect()
}
