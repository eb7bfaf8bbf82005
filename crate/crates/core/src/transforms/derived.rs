//! The interpretation `I^F` read off a functor.
//!
//! Every part is decided by searching for the finite computations that make
//! up its definition: `Φ*` on `(D(b̄), λ↾k, D(b̄))` for the domain, the
//! permuted triples over `b̄c̄′d̄` for `∼`, and `Φ` on initial segments for the
//! relations. The domain is also available as an explicit listing of
//! conditions, one per fragment `δ` and index.

use std::sync::{Arc, Mutex};

use crate::functional::{run, OracleTriple, Outcome, Stop};
use crate::functor::CompFunctor;
use crate::interp::{
    Block, Decision, DeltaScheme, ExistentialCondition, InterpScheme, JointDecider, Literal, Probe,
    Relations, SigmaScheme, Verdict,
};
use crate::model::{decode_pair, layout_len, DiagramFragment, Elem, Tuple};

use super::semantic::{dom_run, equiv_run, fragment_via, injective, rel_run};

fn verdict(inside: bool, condition: Option<ExistentialCondition>) -> Verdict {
    Verdict {
        decision: if inside { Decision::In } else { Decision::Out },
        condition,
    }
}

/// Literals pinning a code `(f, b̄, f^m)` of length `1 + k + m` with `b̄`
/// injective and free of the marker.
fn code_literals(k: usize, m: usize) -> Vec<Literal> {
    let mut lits: Vec<Literal> = (0..m).map(|r| Literal::eq(0, k + 1 + r)).collect();
    for p in 1..=k {
        lits.push(Literal::neq(0, p));
        for q in p + 1..=k {
            lits.push(Literal::neq(p, q));
        }
    }
    lits
}

/// The literals of a fragment with position `p` read from variable `var[p]`.
fn diagram_literals(d: &DiagramFragment, var: &[usize]) -> Vec<Literal> {
    d.facts()
        .into_iter()
        .map(|(rel, args, truth)| Literal::rel(truth, rel, args.iter().map(|&p| var[p]).collect()))
        .collect()
}

fn dom_condition(k: usize, m: usize, d: &DiagramFragment) -> ExistentialCondition {
    let mut lits = code_literals(k, m);
    let var: Vec<usize> = (1..=k).collect();
    lits.extend(diagram_literals(d, &var));
    ExistentialCondition::new(vec![Block::exact(1 + k + m)], 0, lits)
}

fn decode_injective(code: &[Elem]) -> Option<(Tuple, u64)> {
    let (b, m) = decode_pair(code).ok()?;
    injective(&b).then_some((b, m as u64))
}

struct DomDecider(CompFunctor);

impl JointDecider for DomDecider {
    fn decide(&self, probe: &mut dyn Probe, blocks: &[&[Elem]], _: Option<usize>) -> Result<Verdict, Stop> {
        let [code] = blocks else {
            return Ok(verdict(false, None));
        };
        let Some((b, i)) = decode_injective(code) else {
            return Ok(verdict(false, None));
        };
        let inside = dom_run(&self.0, probe, &b, i)?;
        let d = fragment_via(probe, &self.0.source, &b)?;
        Ok(verdict(inside, Some(dom_condition(b.len(), i as usize, &d))))
    }
}

struct EquivDecider(CompFunctor);

impl JointDecider for EquivDecider {
    fn decide(&self, probe: &mut dyn Probe, blocks: &[&[Elem]], _: Option<usize>) -> Result<Verdict, Stop> {
        let [x, y] = blocks else {
            return Ok(verdict(false, None));
        };
        let (Some((b, i)), Some((c, j))) = (decode_injective(x), decode_injective(y)) else {
            return Ok(verdict(false, None));
        };
        if !dom_run(&self.0, probe, &b, i)? || !dom_run(&self.0, probe, &c, j)? {
            return Ok(verdict(false, None));
        }
        let (eq, w) = equiv_run(&self.0, probe, (&b, i), (&c, j), 0)?;
        // variables: code x, code y, then the fresh elements
        let (lx, ly) = (x.len(), y.len());
        let mut var: Vec<usize> = (1..=b.len()).collect();
        for (q, e) in c.iter().enumerate() {
            if !b.contains(e) {
                var.push(lx + 1 + q);
            }
        }
        var.extend((0..w.d.len()).map(|r| lx + ly + r));
        let mut lits = Vec::new();
        for (p, e) in b.iter().enumerate() {
            for (q, e2) in c.iter().enumerate() {
                lits.push(if e == e2 { Literal::eq(1 + p, lx + 1 + q) } else { Literal::neq(1 + p, lx + 1 + q) });
            }
        }
        let cp: Tuple = c.iter().copied().filter(|e| !b.contains(e)).collect();
        let full: Tuple = b.iter().chain(&cp).chain(&w.d).copied().collect();
        let dl = fragment_via(probe, &self.0.source, &full)?;
        lits.extend(diagram_literals(&dl, &var));
        let cond = ExistentialCondition::new(vec![Block::exact(lx), Block::exact(ly)], w.d.len(), lits);
        Ok(verdict(eq, Some(cond)))
    }
}

struct RelDecider(CompFunctor, usize);

impl JointDecider for RelDecider {
    fn decide(&self, probe: &mut dyn Probe, blocks: &[&[Elem]], _: Option<usize>) -> Result<Verdict, Stop> {
        let mut pts = Vec::with_capacity(blocks.len());
        for code in blocks {
            let Some((b, i)) = decode_injective(code) else {
                return Ok(verdict(false, None));
            };
            if !dom_run(&self.0, probe, &b, i)? {
                return Ok(verdict(false, None));
            }
            pts.push((b, i));
        }
        let refs: Vec<(&[Elem], u64)> = pts.iter().map(|(b, i)| (b.as_slice(), *i)).collect();
        Ok(verdict(rel_run(&self.0, probe, self.1, &refs, false)?, None))
    }
}

/// A side whose disjuncts are found by search, not listed.
struct Searched;

impl SigmaScheme for Searched {
    fn disjunct(&self, _: usize) -> Option<ExistentialCondition> {
        None
    }
}

/// Both sides of the domain as explicit condition lists, generated round by
/// round in code length up to `max_code_len`.
struct DomListing {
    f: CompFunctor,
    fuel: u64,
    max_code_len: usize,
    state: Mutex<ListingState>,
}

#[derive(Default)]
struct ListingState {
    pos: Vec<ExistentialCondition>,
    neg: Vec<ExistentialCondition>,
    next_len: usize,
}

impl DomListing {
    fn round(&self, st: &mut ListingState) {
        let len = st.next_len;
        st.next_len += 1;
        let shape = vec![Block::exact(len)];
        if len == 0 {
            st.neg.push(ExistentialCondition::new(shape, 0, vec![]));
            return;
        }
        // a marker occurrence followed by a non-marker
        for p in 1..len {
            for q in p + 1..len {
                st.neg.push(ExistentialCondition::new(shape.clone(), 0, vec![Literal::eq(0, p), Literal::neq(0, q)]));
            }
        }
        for k in 0..len {
            let m = len - 1 - k;
            let tail: Vec<Literal> = (0..m).map(|r| Literal::eq(0, k + 1 + r)).chain((k > 0).then(|| Literal::neq(0, k))).collect();
            for p in 1..=k {
                for q in p + 1..=k {
                    let mut lits = tail.clone();
                    lits.push(Literal::eq(p, q));
                    st.neg.push(ExistentialCondition::new(shape.clone(), 0, lits));
                }
            }
            let arities = self.f.source.arities_below(k);
            let bits = layout_len(&arities, k);
            if bits >= usize::BITS as usize {
                continue;
            }
            for mask in 0..1usize << bits {
                let v = (0..bits).map(|n| mask >> n & 1 == 1).collect();
                let d = DiagramFragment::from_bits(k, arities.clone(), v).expect("layout length");
                let out = run(&*self.f.phi_star, &OracleTriple::diagonal(Arc::new(d.clone())), m as u64, self.fuel);
                let c = dom_condition(k, m, &d);
                match out {
                    Outcome::Halt(x) if x == m as u64 => st.pos.push(c),
                    Outcome::Halt(_) | Outcome::Demand => st.neg.push(c),
                    Outcome::OutOfFuel | Outcome::Fault(_) => {}
                }
            }
        }
    }

    fn get(&self, positive: bool, idx: usize) -> Option<ExistentialCondition> {
        let mut st = self.state.lock().unwrap_or_else(|e| e.into_inner());
        loop {
            let side = if positive { &st.pos } else { &st.neg };
            if let Some(c) = side.get(idx) {
                return Some(c.clone());
            }
            if st.next_len > self.max_code_len {
                return None;
            }
            self.round(&mut st);
        }
    }
}

struct ListedSide(Arc<DomListing>, bool);

impl SigmaScheme for ListedSide {
    fn disjunct(&self, idx: usize) -> Option<ExistentialCondition> {
        self.0.get(self.1, idx)
    }
}

fn searched(joint: Arc<dyn JointDecider>) -> DeltaScheme {
    DeltaScheme {
        positive: Arc::new(Searched),
        negative: Arc::new(Searched),
        joint: Some(joint),
    }
}

/// The interpretation `I^F`. Its domain, equivalence and relations are
/// decided by search against the probe; [`listed_domain`] gives the domain
/// as condition lists instead.
pub fn functor_to_interp(f: &CompFunctor) -> InterpScheme {
    let rel_f = f.clone();
    InterpScheme::new(
        format!("I[{}]", f.name),
        f.source.clone(),
        f.target.clone(),
        searched(Arc::new(DomDecider(f.clone()))),
        searched(Arc::new(EquivDecider(f.clone()))),
        Relations::Generated(Arc::new(move |i| searched(Arc::new(RelDecider(rel_f.clone(), i))))),
    )
}

/// The domain of `I^F` as explicit conditions on codes of length at most
/// `max_code_len`: one per fragment `δ` and index, classified by running
/// `Φ*` with `fuel`, plus the malformed and non-injective codes.
pub fn listed_domain(f: &CompFunctor, max_code_len: usize, fuel: u64) -> DeltaScheme {
    let l = Arc::new(DomListing {
        f: f.clone(),
        fuel,
        max_code_len,
        state: Mutex::new(ListingState::default()),
    });
    DeltaScheme {
        positive: Arc::new(ListedSide(l.clone(), true)),
        negative: Arc::new(ListedSide(l, false)),
        joint: None,
    }
}
