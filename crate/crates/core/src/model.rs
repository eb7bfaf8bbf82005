//! Structures presented on the naturals and the finite objects used to talk
//! about them: diagram fragments, finite injections, morphism oracles and the
//! coding of (tuple, index) pairs as tuples.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

/// An element of a presentation. Every presentation has domain ω.
pub type Elem = u64;
pub type Tuple = Vec<Elem>;

type ArityFn = dyn Fn(usize) -> usize + Send + Sync;

/// A relational signature: relation `i` has arity `arity(i) >= 1`.
#[derive(Clone)]
pub struct Signature {
    arities: Arities,
}

#[derive(Clone)]
enum Arities {
    Finite(Vec<usize>),
    Generated(Arc<ArityFn>),
}

impl Signature {
    pub fn finite(arities: Vec<usize>) -> Result<Self> {
        if let Some(i) = arities.iter().position(|&a| a == 0) {
            return Err(Error::Argument(format!("relation {i} has arity 0")));
        }
        Ok(Signature {
            arities: Arities::Finite(arities),
        })
    }

    /// The empty signature of a pure set.
    pub fn empty() -> Self {
        Signature {
            arities: Arities::Finite(Vec::new()),
        }
    }

    /// Infinitely many relations; `arity` must be total and never return 0.
    pub fn generated(arity: impl Fn(usize) -> usize + Send + Sync + 'static) -> Self {
        Signature {
            arities: Arities::Generated(Arc::new(move |i| arity(i).max(1))),
        }
    }

    /// `None` for an unbounded signature.
    pub fn relation_count(&self) -> Option<usize> {
        match &self.arities {
            Arities::Finite(v) => Some(v.len()),
            Arities::Generated(_) => None,
        }
    }

    pub fn arity(&self, rel: usize) -> Option<usize> {
        match &self.arities {
            Arities::Finite(v) => v.get(rel).copied(),
            Arities::Generated(f) => Some(f(rel)),
        }
    }

    /// Arities of the relations a fragment of tuple length `k` mentions.
    pub fn arities_below(&self, k: usize) -> Vec<usize> {
        let n = self.relation_count().map_or(k, |c| c.min(k));
        (0..n).map(|j| self.arity(j).unwrap_or(1)).collect()
    }

    pub fn finite_arities(&self) -> Option<&[usize]> {
        match &self.arities {
            Arities::Finite(v) => Some(v),
            Arities::Generated(_) => None,
        }
    }
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        match (&self.arities, &other.arities) {
            (Arities::Finite(a), Arities::Finite(b)) => a == b,
            (Arities::Generated(a), Arities::Generated(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.arities {
            Arities::Finite(v) => write!(f, "Signature{v:?}"),
            Arities::Generated(_) => write!(f, "Signature(generated)"),
        }
    }
}

type TruthFn = dyn Fn(usize, &[Elem]) -> Result<bool> + Send + Sync;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, Ordering::Relaxed)
}

/// A countable structure on ω given by its atomic-truth oracle.
///
/// The oracle must be pure. It is allowed to fail, because presentations
/// produced by functors are computed lazily under a fuel budget.
#[derive(Clone)]
pub struct Presentation {
    id: u64,
    signature: Signature,
    truth: Arc<TruthFn>,
}

impl Presentation {
    pub fn new(
        signature: Signature,
        truth: impl Fn(usize, &[Elem]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self::fallible(signature, move |i, t| Ok(truth(i, t)))
    }

    pub fn fallible(
        signature: Signature,
        truth: impl Fn(usize, &[Elem]) -> Result<bool> + Send + Sync + 'static,
    ) -> Self {
        Presentation {
            id: fresh_id(),
            signature,
            truth: Arc::new(truth),
        }
    }

    /// Pure set: no relations at all.
    pub fn pure_set() -> Self {
        Self::new(Signature::empty(), |_, _| false)
    }

    /// (ω, <) with relation 0 the strict order.
    pub fn order() -> Self {
        Self::new(Signature::finite(vec![2]).unwrap(), |_, t| t[0] < t[1])
    }

    /// Identifies this presentation object (not its isomorphism type).
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn holds(&self, rel: usize, args: &[Elem]) -> Result<bool> {
        match self.signature.arity(rel) {
            Some(a) if a == args.len() => (self.truth)(rel, args),
            Some(a) => Err(Error::Argument(format!(
                "relation {rel} has arity {a}, got {} arguments",
                args.len()
            ))),
            None => Err(Error::Argument(format!("relation {rel} not in signature"))),
        }
    }
}

impl fmt::Debug for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Presentation#{}({:?})", self.id, self.signature)
    }
}

/// Number of bits in the fragment of a length-`k` tuple for the given arities.
pub fn layout_len(arities: &[usize], k: usize) -> usize {
    arities.iter().map(|&a| k.pow(a as u32)).sum()
}

/// Calls `visit(rel, args)` for every atomic fact of a length-`k` fragment in
/// layout order: relation index ascending, then argument tuples over
/// `0..k` in lexicographic order.
pub fn for_each_fact<E>(
    arities: &[usize],
    k: usize,
    mut visit: impl FnMut(usize, &[usize]) -> std::result::Result<(), E>,
) -> std::result::Result<(), E> {
    let mut args = Vec::new();
    for (rel, &a) in arities.iter().enumerate() {
        if k == 0 {
            continue;
        }
        args.clear();
        args.resize(a, 0usize);
        loop {
            visit(rel, &args)?;
            // odometer, last position fastest
            let mut p = a;
            loop {
                if p == 0 {
                    break;
                }
                p -= 1;
                args[p] += 1;
                if args[p] < k {
                    break;
                }
                args[p] = 0;
                if p == 0 {
                    p = usize::MAX;
                    break;
                }
            }
            if p == usize::MAX {
                break;
            }
        }
    }
    Ok(())
}

/// The finite atomic diagram D(b̄) of a tuple: truth of every fact about
/// positions `0..len` that uses only the first `len` relations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiagramFragment {
    len: usize,
    arities: Vec<usize>,
    bits: Vec<bool>,
}

impl DiagramFragment {
    pub fn from_bits(len: usize, arities: Vec<usize>, bits: Vec<bool>) -> Result<Self> {
        if arities.len() > len {
            return Err(Error::Argument(format!(
                "fragment of length {len} cannot mention {} relations",
                arities.len()
            )));
        }
        let want = layout_len(&arities, len);
        if bits.len() != want {
            return Err(Error::Argument(format!(
                "fragment of length {len} needs {want} bits, got {}",
                bits.len()
            )));
        }
        Ok(DiagramFragment { len, arities, bits })
    }

    /// Builds a fragment by asking `truth(rel, positions)` for each fact.
    pub fn build<E>(
        len: usize,
        arities: Vec<usize>,
        mut truth: impl FnMut(usize, &[usize]) -> std::result::Result<bool, E>,
    ) -> std::result::Result<Self, E> {
        let mut bits = Vec::with_capacity(layout_len(&arities, len));
        for_each_fact(&arities, len, |rel, args| {
            bits.push(truth(rel, args)?);
            Ok(())
        })?;
        Ok(DiagramFragment { len, arities, bits })
    }

    /// The empty fragment (tuple of length 0).
    pub fn empty() -> Self {
        DiagramFragment {
            len: 0,
            arities: Vec::new(),
            bits: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Bit index of a fact, if the fragment covers it.
    pub fn position(&self, rel: usize, args: &[usize]) -> Option<usize> {
        let a = *self.arities.get(rel)?;
        if args.len() != a || args.iter().any(|&x| x >= self.len) {
            return None;
        }
        let offset = layout_len(&self.arities[..rel], self.len);
        let idx = args.iter().fold(0usize, |acc, &x| acc * self.len + x);
        Some(offset + idx)
    }

    pub fn get(&self, rel: usize, args: &[usize]) -> Option<bool> {
        self.position(rel, args).map(|p| self.bits[p])
    }

    /// All facts as `(rel, positions, value)` in layout order.
    pub fn facts(&self) -> Vec<(usize, Vec<usize>, bool)> {
        let mut out = Vec::with_capacity(self.bits.len());
        let mut i = 0;
        let _ = for_each_fact::<()>(&self.arities, self.len, |rel, args| {
            out.push((rel, args.to_vec(), self.bits[i]));
            i += 1;
            Ok(())
        });
        out
    }

    /// Every fact of `self` is present in `other` with the same value.
    pub fn is_embedded_in(&self, other: &DiagramFragment) -> bool {
        self.facts()
            .into_iter()
            .all(|(rel, args, v)| other.get(rel, &args) == Some(v))
    }
}

/// D(b̄) computed from a presentation.
pub fn fragment_of(pres: &Presentation, tuple: &[Elem]) -> Result<DiagramFragment> {
    let arities = pres.signature().arities_below(tuple.len());
    let mut args = Vec::new();
    DiagramFragment::build(tuple.len(), arities, |rel, pos| {
        args.clear();
        args.extend(pos.iter().map(|&p| tuple[p]));
        pres.holds(rel, &args)
    })
}

/// A finite partial injection ω → ω.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FinMap {
    forward: BTreeMap<Elem, Elem>,
}

impl FinMap {
    pub fn new(pairs: impl IntoIterator<Item = (Elem, Elem)>) -> Result<Self> {
        let mut forward = BTreeMap::new();
        let mut seen = BTreeMap::new();
        for (x, y) in pairs {
            if let Some(&old) = forward.get(&x) {
                if old != y {
                    return Err(Error::Argument(format!("{x} mapped to both {old} and {y}")));
                }
                continue;
            }
            if let Some(&other) = seen.get(&y) {
                return Err(Error::Argument(format!("{other} and {x} both map to {y}")));
            }
            forward.insert(x, y);
            seen.insert(y, x);
        }
        Ok(FinMap { forward })
    }

    /// λ↾k: the identity on `0..k`.
    pub fn identity_prefix(k: usize) -> Self {
        FinMap {
            forward: (0..k as Elem).map(|x| (x, x)).collect(),
        }
    }

    /// The permutation `p ↦ perm[p]` of `0..perm.len()`.
    pub fn from_images(images: &[Elem]) -> Result<Self> {
        Self::new(images.iter().enumerate().map(|(p, &x)| (p as Elem, x)))
    }

    pub fn get(&self, x: Elem) -> Option<Elem> {
        self.forward.get(&x).copied()
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        self.forward.iter().map(|(&x, &y)| (x, y))
    }

    pub fn inverse(&self) -> FinMap {
        FinMap {
            forward: self.forward.iter().map(|(&x, &y)| (y, x)).collect(),
        }
    }

    /// `self ∘ inner`: defined where `inner` is and `self` is at its image.
    pub fn compose(&self, inner: &FinMap) -> FinMap {
        FinMap {
            forward: inner
                .forward
                .iter()
                .filter_map(|(&x, &y)| self.get(y).map(|z| (x, z)))
                .collect(),
        }
    }

    /// True if the map is a permutation of `0..n`.
    pub fn is_permutation_of(&self, n: usize) -> bool {
        self.forward.len() == n
            && self
                .forward
                .iter()
                .all(|(&x, &y)| (x as usize) < n && (y as usize) < n)
    }
}

/// `(x̄)_σ = (x_{σ(0)}, …, x_{σ(n)})` for a permutation σ of the index range.
pub fn apply_perm(tuple: &[Elem], sigma: &FinMap) -> Result<Tuple> {
    if !sigma.is_permutation_of(tuple.len()) {
        return Err(Error::Argument(format!(
            "not a permutation of 0..{}",
            tuple.len()
        )));
    }
    Ok((0..tuple.len() as Elem)
        .map(|p| tuple[sigma.get(p).unwrap() as usize])
        .collect())
}

/// Smallest natural not occurring in `tuple`; the marker used for canonical
/// pair codes.
pub fn fresh_for(tuple: &[Elem]) -> Elem {
    (0..).find(|x| !tuple.contains(x)).unwrap()
}

/// Codes `(b̄, m)` as `(f, b₀, …, b_k, f, …, f)` with `m` trailing copies of
/// the marker `f ∉ b̄`.
pub fn encode_pair(tuple: &[Elem], m: usize, fresh: Elem) -> Result<Tuple> {
    if tuple.contains(&fresh) {
        return Err(Error::Argument(format!("marker {fresh} occurs in the tuple")));
    }
    let mut out = Vec::with_capacity(tuple.len() + m + 1);
    out.push(fresh);
    out.extend_from_slice(tuple);
    out.extend(std::iter::repeat_n(fresh, m));
    Ok(out)
}

/// Canonical code of `(b̄, m)` using [`fresh_for`].
pub fn canonical_code(tuple: &[Elem], m: usize) -> Tuple {
    encode_pair(tuple, m, fresh_for(tuple)).expect("fresh marker is fresh")
}

pub fn decode_pair(code: &[Elem]) -> Result<(Tuple, usize)> {
    let (&marker, rest) = code
        .split_first()
        .ok_or_else(|| Error::Decode("empty tuple".into()))?;
    let m = rest.iter().rev().take_while(|&&x| x == marker).count();
    let middle = &rest[..rest.len() - m];
    if middle.contains(&marker) {
        return Err(Error::Decode(format!(
            "marker {marker} interleaved with entries in {code:?}"
        )));
    }
    Ok((middle.to_vec(), m))
}

/// True if `code` is a well-formed pair code.
pub fn is_pair_code(code: &[Elem]) -> bool {
    decode_pair(code).is_ok()
}

type MapFn = dyn Fn(Elem) -> Result<Elem> + Send + Sync;

/// A bijection ω → ω given by forward and backward oracles.
#[derive(Clone)]
pub struct MorphismOracle {
    forward: Arc<MapFn>,
    backward: Arc<MapFn>,
}

impl MorphismOracle {
    pub fn new(
        forward: impl Fn(Elem) -> Elem + Send + Sync + 'static,
        backward: impl Fn(Elem) -> Elem + Send + Sync + 'static,
    ) -> Self {
        Self::fallible(move |x| Ok(forward(x)), move |x| Ok(backward(x)))
    }

    pub fn fallible(
        forward: impl Fn(Elem) -> Result<Elem> + Send + Sync + 'static,
        backward: impl Fn(Elem) -> Result<Elem> + Send + Sync + 'static,
    ) -> Self {
        MorphismOracle {
            forward: Arc::new(forward),
            backward: Arc::new(backward),
        }
    }

    pub fn identity() -> Self {
        Self::new(|x| x, |x| x)
    }

    /// A finite-support permutation: `perm` on its domain, identity elsewhere.
    /// The domain and the image of `perm` must be the same set.
    pub fn finite_support(perm: &FinMap) -> Result<Self> {
        let dom: Vec<Elem> = perm.pairs().map(|(x, _)| x).collect();
        let mut img: Vec<Elem> = perm.pairs().map(|(_, y)| y).collect();
        img.sort_unstable();
        if dom != img {
            return Err(Error::Argument("support is not closed under the map".into()));
        }
        let fwd = perm.clone();
        let bwd = perm.inverse();
        Ok(Self::new(
            move |x| fwd.get(x).unwrap_or(x),
            move |x| bwd.get(x).unwrap_or(x),
        ))
    }

    pub fn transposition(a: Elem, b: Elem) -> Self {
        let swap = move |x| {
            if x == a {
                b
            } else if x == b {
                a
            } else {
                x
            }
        };
        Self::new(swap, swap)
    }

    pub fn forward(&self, x: Elem) -> Result<Elem> {
        (self.forward)(x)
    }

    pub fn backward(&self, x: Elem) -> Result<Elem> {
        (self.backward)(x)
    }

    pub fn inverse(&self) -> Self {
        MorphismOracle {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MorphismOracle) -> Self {
        let (f1, f2) = (self.forward.clone(), inner.forward.clone());
        let (b1, b2) = (self.backward.clone(), inner.backward.clone());
        Self::fallible(move |x| f1(f2(x)?), move |x| b2(b1(x)?))
    }

    /// Checks both round trips on `0..n`.
    pub fn check_inverse(&self, n: Elem) -> Result<bool> {
        for x in 0..n {
            if self.backward(self.forward(x)?)? != x || self.forward(self.backward(x)?)? != x {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The forward map applied to a tuple.
    pub fn image(&self, tuple: &[Elem]) -> Result<Tuple> {
        tuple.iter().map(|&x| self.forward(x)).collect()
    }

    /// Checks `P ⊨ R(t̄) ⇔ Q ⊨ R(f(t̄))` on every fact with entries below `n`
    /// over the first `max_rel` relations.
    pub fn check_iso(
        &self,
        from: &Presentation,
        to: &Presentation,
        n: usize,
        max_rel: usize,
    ) -> Result<bool> {
        let arities = from.signature().arities_below(max_rel);
        let mut ok = true;
        let mut t = Vec::new();
        for_each_fact(&arities, n, |rel, pos| {
            t.clear();
            t.extend(pos.iter().map(|&p| p as Elem));
            if from.holds(rel, &t)? != to.holds(rel, &self.image(&t)?)? {
                ok = false;
            }
            Ok::<(), Error>(())
        })?;
        Ok(ok)
    }
}

impl fmt::Debug for MorphismOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MorphismOracle")
    }
}

/// B_f: the structure on ω making `f: B_f → pres` an isomorphism.
pub fn pull_back(pres: &Presentation, f: &MorphismOracle) -> Presentation {
    let base = pres.clone();
    let f = f.clone();
    Presentation::fallible(pres.signature().clone(), move |rel, t| {
        base.holds(rel, &f.image(t)?)
    })
}

/// The entrywise extension of a map to tuples. Lifting twice gives the map on
/// tuples of tuples.
pub fn lift_to_tuples<T, U, F>(f: F) -> impl Fn(&[T]) -> Vec<U>
where
    T: Clone,
    F: Fn(T) -> U,
{
    move |xs: &[T]| xs.iter().cloned().map(&f).collect()
}

/// Cantor pairing `⟨x, y⟩ = (x+y)(x+y+1)/2 + y`, `None` on overflow.
pub fn pair(x: u64, y: u64) -> Option<u64> {
    let s = x.checked_add(y)?;
    let t = if s % 2 == 0 {
        (s / 2).checked_mul(s.checked_add(1)?)?
    } else {
        s.checked_mul(s.div_ceil(2))?
    };
    t.checked_add(y)
}

pub fn unpair(z: u64) -> (u64, u64) {
    // largest w with w(w+1)/2 <= z
    let mut w = ((((8 * z as u128) + 1) as f64).sqrt() as u128).saturating_sub(1) / 2;
    while (w + 1) * (w + 2) / 2 <= z as u128 {
        w += 1;
    }
    while w * (w + 1) / 2 > z as u128 {
        w -= 1;
    }
    let y = z as u128 - w * (w + 1) / 2;
    ((w - y) as u64, y as u64)
}

/// `[] ↦ 0`, `x :: rest ↦ 1 + ⟨x, code(rest)⟩`.
pub fn seq_code(xs: &[u64]) -> Option<u64> {
    xs.iter()
        .rev()
        .try_fold(0u64, |acc, &x| pair(x, acc)?.checked_add(1))
}

pub fn seq_decode(mut z: u64) -> Tuple {
    let mut out = Vec::new();
    while z > 0 {
        let (x, rest) = unpair(z - 1);
        out.push(x);
        z = rest;
    }
    out
}

/// Query code of the atomic fact `R_rel(args)`: `⟨rel, seq_code(args)⟩`.
pub fn fact_code(rel: usize, args: &[Elem]) -> Result<u64> {
    seq_code(args)
        .and_then(|s| pair(rel as u64, s))
        .ok_or_else(|| Error::Argument(format!("fact R{rel}{args:?} has no 64-bit code")))
}

pub fn fact_decode(code: u64) -> (usize, Tuple) {
    let (rel, s) = unpair(code);
    (rel as usize, seq_decode(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ordered_pair_bits(a: Elem, b: Elem) -> Vec<bool> {
        let t = [a, b];
        let mut v = Vec::new();
        for x in 0..2 {
            for y in 0..2 {
                v.push(t[x] < t[y]);
            }
        }
        v
    }

    #[test]
    fn fragment_of_pure_set_has_no_bits() {
        let d = fragment_of(&Presentation::pure_set(), &[5, 9]).unwrap();
        assert_eq!(d.len(), 2);
        assert!(d.bits().is_empty());
    }

    #[test]
    fn fragment_of_order() {
        let d = fragment_of(&Presentation::order(), &[3, 1]).unwrap();
        assert_eq!(d.bits(), &[false, false, true, false]);
        assert_eq!(d.bits(), ordered_pair_bits(3, 1).as_slice());
    }

    #[test]
    fn fragment_uses_only_first_len_relations() {
        let sig = Signature::finite(vec![1, 2, 1]).unwrap();
        let p = Presentation::new(sig, |_, _| true);
        assert_eq!(fragment_of(&p, &[4]).unwrap().bits().len(), 1);
        assert_eq!(fragment_of(&p, &[4, 5]).unwrap().bits().len(), 2 + 4);
        assert_eq!(fragment_of(&p, &[4, 5, 6]).unwrap().bits().len(), 3 + 9 + 3);
    }

    #[test]
    fn apply_perm_examples() {
        let id = FinMap::identity_prefix(3);
        assert_eq!(apply_perm(&[7, 8, 9], &id).unwrap(), vec![7, 8, 9]);
        let s = FinMap::new([(0, 2), (1, 0), (2, 1)]).unwrap();
        assert_eq!(apply_perm(&[7, 8, 9], &s).unwrap(), vec![9, 7, 8]);
        let bad = FinMap::new([(0, 1), (1, 2)]).unwrap();
        assert!(apply_perm(&[7, 8], &bad).is_err());
    }

    #[test]
    fn encode_decode_examples() {
        assert_eq!(encode_pair(&[2, 5], 0, 0).unwrap(), vec![0, 2, 5]);
        assert_eq!(encode_pair(&[2, 5], 3, 7).unwrap(), vec![7, 2, 5, 7, 7, 7]);
        assert!(encode_pair(&[2, 5], 1, 5).is_err());
        assert_eq!(decode_pair(&[0, 2, 5]).unwrap(), (vec![2, 5], 0));
        assert_eq!(decode_pair(&[7, 2, 5, 7, 7, 7]).unwrap(), (vec![2, 5], 3));
        assert!(decode_pair(&[7, 2, 7, 5]).is_err());
        assert!(decode_pair(&[]).is_err());
    }

    #[test]
    fn encode_decode_exhaustive() {
        fn tuples(len: usize, bound: Elem) -> Vec<Tuple> {
            if len == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for t in tuples(len - 1, bound) {
                for x in 0..bound {
                    let mut u = t.clone();
                    u.push(x);
                    out.push(u);
                }
            }
            out
        }
        for len in 0..=4 {
            for b in tuples(len, 10) {
                for m in 0..=5 {
                    let f1 = fresh_for(&b);
                    let f2 = b.iter().max().map_or(0, |x| x + 1);
                    let c1 = encode_pair(&b, m, f1).unwrap();
                    let c2 = encode_pair(&b, m, f2).unwrap();
                    assert_eq!(decode_pair(&c1).unwrap(), (b.clone(), m));
                    assert_eq!(decode_pair(&c2).unwrap(), (b.clone(), m));
                }
            }
        }
    }

    #[test]
    fn pull_back_along_swap() {
        let p = pull_back(&Presentation::order(), &MorphismOracle::transposition(0, 1));
        assert!(!p.holds(0, &[0, 1]).unwrap());
        assert!(p.holds(0, &[1, 0]).unwrap());
        let id = pull_back(&Presentation::order(), &MorphismOracle::identity());
        for a in 0..15 {
            for b in 0..15 {
                assert_eq!(id.holds(0, &[a, b]).unwrap(), a < b);
            }
        }
    }

    #[test]
    fn lift_examples() {
        let f = MorphismOracle::transposition(0, 5);
        let g = |x: Elem| f.forward(x).unwrap();
        let l = lift_to_tuples(g);
        assert_eq!(l(&[0, 0]), vec![5, 5]);
        let ll = lift_to_tuples(|t: Tuple| l(&t));
        assert_eq!(ll(&[vec![0, 1], vec![2]]), vec![vec![5, 1], vec![2]]);
        let idl = lift_to_tuples(|x: Elem| x);
        assert_eq!(idl(&[1, 2, 3]), vec![1, 2, 3]);
    }

    #[test]
    fn finmap_compose_and_inverse() {
        let s = FinMap::new([(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(s.compose(&s.inverse()), FinMap::identity_prefix(3));
        assert!(FinMap::new([(0, 1), (1, 1)]).is_err());
        assert!(FinMap::new([(0, 1), (0, 2)]).is_err());
    }

    #[test]
    fn morphism_invariants() {
        let f = MorphismOracle::finite_support(&FinMap::new([(0, 3), (3, 7), (7, 0)]).unwrap())
            .unwrap();
        assert!(f.check_inverse(20).unwrap());
        let base = Presentation::order();
        let pb = pull_back(&base, &f);
        assert!(f.check_iso(&pb, &base, 10, 1).unwrap());
        assert!(MorphismOracle::finite_support(&FinMap::new([(0, 1)]).unwrap()).is_err());
    }

    #[test]
    fn pairing_round_trips() {
        for x in 0..60 {
            for y in 0..60 {
                assert_eq!(unpair(pair(x, y).unwrap()), (x, y));
            }
        }
        assert_eq!(pair(0, 0), Some(0));
        assert_eq!(pair(1, 0), Some(1));
        assert_eq!(pair(0, 1), Some(2));
        assert!(pair(u64::MAX, 1).is_none());
        for z in 0..5000 {
            let (x, y) = unpair(z);
            assert_eq!(pair(x, y), Some(z));
        }
    }

    #[test]
    fn fact_codes_round_trip() {
        assert_eq!(seq_code(&[]), Some(0));
        for rel in 0..4 {
            for args in [vec![0], vec![3, 1], vec![2, 0, 5], vec![11, 11]] {
                let c = fact_code(rel, &args).unwrap();
                assert_eq!(fact_decode(c), (rel, args));
            }
        }
    }
}
