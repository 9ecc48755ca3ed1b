//! The q-exterior algebra of the vector representation of U_q(gl n) and of its dual.
//!
//! A slot with label `p > 0` holds `V(p)` (basis `v_I`, `|I| = p`), a slot with label
//! `-p` holds the dual `V(-p)` (basis `vb_I`), and label `0` is the trivial module.
//! Subsets of `{1..n}` are bitmasks: element `i` is bit `i - 1`.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use thiserror::Error;

use crate::qint::{qbinomial, qint, LaurentPoly};

pub type Subset = u32;

/// Largest rank supported by the bitmask representation and the pairing cache.
pub const MAX_RANK: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("rank {0} is outside 1..={MAX_RANK}")]
    Rank(usize),
    #[error("generator index {index} out of range for rank {n}")]
    GeneratorIndex { index: usize, n: usize },
    #[error("slot label {label} out of range for rank {n}")]
    Label { label: i32, n: usize },
    #[error("slot mismatch: expected {expected:?}, found {found:?}")]
    SlotMismatch { expected: Vec<i32>, found: Vec<i32> },
    #[error("slot position {0} out of range")]
    Position(usize),
    #[error("pairing solver failed: {0}")]
    Solver(String),
}

pub fn subset_from(members: &[usize]) -> Subset {
    members.iter().fold(0, |acc, &i| acc | (1 << (i - 1)))
}

/// Elements of a subset in increasing order, 1-based.
pub fn members(s: Subset) -> impl Iterator<Item = usize> {
    (0..32usize).filter(move |b| s >> b & 1 == 1).map(|b| b + 1)
}

pub fn size(s: Subset) -> i32 {
    s.count_ones() as i32
}

pub fn element_sum(s: Subset) -> i32 {
    members(s).map(|i| i as i32).sum()
}

/// `{1, .., p}`.
pub fn initial_segment(p: usize) -> Subset {
    if p == 0 {
        0
    } else {
        (1u32 << p) - 1
    }
}

/// `{n - p + 1, .., n}`.
pub fn final_segment(n: usize, p: usize) -> Subset {
    initial_segment(p) << (n - p)
}

/// All `p`-subsets of `{1..n}` in increasing numeric order.
pub fn subsets_of_size(n: usize, p: usize) -> Vec<Subset> {
    (0..(1u32 << n)).filter(|s| s.count_ones() as usize == p).collect()
}

/// Number of pairs `(i, j)` in `I x J` with `i > j`.
pub fn pi(i_set: Subset, j_set: Subset) -> i32 {
    members(j_set).map(|j| (i_set >> j).count_ones() as i32).sum()
}

pub fn format_subset(s: Subset) -> String {
    let m: Vec<String> = members(s).map(|i| i.to_string()).collect();
    format!("{{{}}}", m.join(","))
}

/// A basis vector `v_I` or `vb_I` of a single slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetIndex {
    pub n: usize,
    pub members: Subset,
    pub dual: bool,
}

impl SubsetIndex {
    pub fn new(n: usize, members: Subset, dual: bool) -> Result<Self, ExteriorError> {
        check_rank(n)?;
        if members >> n != 0 {
            return Err(ExteriorError::Label { label: size(members), n });
        }
        Ok(Self { n, members, dual })
    }

    /// Slot label carrying this vector.
    pub fn label(&self) -> i32 {
        if self.dual {
            -size(self.members)
        } else {
            size(self.members)
        }
    }
}

/// A gl(n) weight.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GlWeight {
    pub coords: Vec<i64>,
}

impl GlWeight {
    pub fn zero(n: usize) -> Self {
        Self { coords: vec![0; n] }
    }

    pub fn new(coords: Vec<i64>) -> Self {
        Self { coords }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn unit(n: usize, a: usize) -> Self {
        let mut w = Self::zero(n);
        w.coords[a - 1] = 1;
        w
    }

    /// Weight of the edge label `p`: `e_1 + .. + e_p` for `p > 0`,
    /// `-(e_{n-p+1} + .. + e_n)` for label `-p`.
    pub fn of_label(n: usize, label: i32) -> Self {
        let mut w = Self::zero(n);
        let p = label.unsigned_abs() as usize;
        if label > 0 {
            w.coords[..p].iter_mut().for_each(|c| *c += 1);
        } else if label < 0 {
            w.coords[n - p..].iter_mut().for_each(|c| *c -= 1);
        }
        w
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// True when the weight is a multiple of the determinant weight `(1, .., 1)`.
    pub fn is_determinant_multiple(&self) -> bool {
        self.coords.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_dominant(&self) -> bool {
        self.coords.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for GlWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl std::str::FromStr for GlWeight {
    type Err = String;
    /// `1,1,0` or `(1,1,0)`.
    fn from_str(s: &str) -> Result<Self, String> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        if body.is_empty() {
            return Err(format!("empty weight {s:?}"));
        }
        body.split(',')
            .map(|c| c.trim().parse::<i64>().map_err(|e| format!("bad weight {s:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(GlWeight::new)
    }
}

pub fn weight_of(v: &SubsetIndex) -> GlWeight {
    let sign = if v.dual { -1 } else { 1 };
    let mut w = GlWeight::zero(v.n);
    for i in members(v.members) {
        w.coords[i - 1] = sign;
    }
    w
}

/// `{1..p}`, the highest weight vector of `V(p)`.
pub fn highest_vector(n: usize, p: usize) -> Result<SubsetIndex, ExteriorError> {
    if p > n {
        return Err(ExteriorError::Label { label: p as i32, n });
    }
    SubsetIndex::new(n, initial_segment(p), false)
}

/// `{n-p+1..n}`, the lowest weight vector of `V(p)`.
pub fn lowest_vector(n: usize, p: usize) -> Result<SubsetIndex, ExteriorError> {
    if p > n {
        return Err(ExteriorError::Label { label: p as i32, n });
    }
    SubsetIndex::new(n, final_segment(n, p), false)
}

/// Lowest weight vector of the dual slot `V(-p)`: `vb_{1..p}`, of weight `-(e_1+..+e_p)`.
pub fn lowest_dual_vector(n: usize, p: usize) -> Result<SubsetIndex, ExteriorError> {
    if p > n {
        return Err(ExteriorError::Label { label: -(p as i32), n });
    }
    SubsetIndex::new(n, initial_segment(p), true)
}

/// Highest weight vector of the dual slot `V(-p)`: `vb_{n-p+1..n}`.
pub fn highest_dual_vector(n: usize, p: usize) -> Result<SubsetIndex, ExteriorError> {
    if p > n {
        return Err(ExteriorError::Label { label: -(p as i32), n });
    }
    SubsetIndex::new(n, final_segment(n, p), true)
}

fn check_rank(n: usize) -> Result<(), ExteriorError> {
    if n == 0 || n > MAX_RANK {
        Err(ExteriorError::Rank(n))
    } else {
        Ok(())
    }
}

fn check_label(n: usize, label: i32) -> Result<(), ExteriorError> {
    if label.unsigned_abs() as usize > n {
        Err(ExteriorError::Label { label, n })
    } else {
        Ok(())
    }
}

/// Element of `V(l_1) (x) .. (x) V(l_k)`, stored sparsely.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubsetBasisVector {
    n: usize,
    slots: Vec<i32>,
    terms: BTreeMap<Vec<Subset>, LaurentPoly>,
}

impl SubsetBasisVector {
    pub fn zero(n: usize, slots: Vec<i32>) -> Result<Self, ExteriorError> {
        check_rank(n)?;
        for &l in &slots {
            check_label(n, l)?;
        }
        Ok(Self { n, slots, terms: BTreeMap::new() })
    }

    /// A single basis tensor with coefficient 1.
    pub fn basis(n: usize, slots: Vec<i32>, key: Vec<Subset>) -> Result<Self, ExteriorError> {
        let mut v = Self::zero(n, slots)?;
        v.check_key(&key)?;
        v.terms.insert(key, LaurentPoly::one());
        Ok(v)
    }

    /// Tensor product of single-slot basis vectors.
    pub fn from_indices(n: usize, parts: &[SubsetIndex]) -> Result<Self, ExteriorError> {
        let slots = parts.iter().map(SubsetIndex::label).collect();
        let key = parts.iter().map(|p| p.members).collect();
        Self::basis(n, slots, key)
    }

    /// The empty tensor product, i.e. the scalar 1.
    pub fn unit(n: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), LaurentPoly::one());
        Self { n, slots: Vec::new(), terms }
    }

    fn check_key(&self, key: &[Subset]) -> Result<(), ExteriorError> {
        let ok = key.len() == self.slots.len() && key.iter().zip(&self.slots).all(|(s, &l)| size(*s) == l.abs() && s >> self.n == 0);
        if ok {
            Ok(())
        } else {
            Err(ExteriorError::SlotMismatch { expected: self.slots.clone(), found: key.iter().map(|s| size(*s)).collect() })
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn slots(&self) -> &[i32] {
        &self.slots
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Subset>, LaurentPoly> {
        &self.terms
    }

    pub fn coeff(&self, key: &[Subset]) -> LaurentPoly {
        self.terms.get(key).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: Vec<Subset>, c: &LaurentPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_vector(&mut self, other: &Self) -> Result<(), ExteriorError> {
        if self.slots != other.slots {
            return Err(ExteriorError::SlotMismatch { expected: self.slots.clone(), found: other.slots.clone() });
        }
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c);
        }
        Ok(())
    }

    pub fn scaled(&self, c: &LaurentPoly) -> Self {
        let mut out = Self { n: self.n, slots: self.slots.clone(), terms: BTreeMap::new() };
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &(v * c));
        }
        out
    }

    /// Drops trivial slots.
    pub fn normalized(&self) -> Self {
        let keep: Vec<usize> = (0..self.slots.len()).filter(|&i| self.slots[i] != 0).collect();
        let mut out = Self { n: self.n, slots: keep.iter().map(|&i| self.slots[i]).collect(), terms: BTreeMap::new() };
        for (k, c) in &self.terms {
            out.add_term(keep.iter().map(|&i| k[i]).collect(), c);
        }
        out
    }

    /// Weight of one basis tensor of this vector's slot signature.
    pub fn key_weight(&self, key: &[Subset]) -> GlWeight {
        let mut w = GlWeight::zero(self.n);
        for (s, &l) in key.iter().zip(&self.slots) {
            w = w.add(&weight_of(&SubsetIndex { n: self.n, members: *s, dual: l < 0 }));
        }
        w
    }

    /// Applies a map on the `width` slots starting at `pos`, sending each local basis
    /// tensor to a combination of local tensors with signature `out_slots`.
    pub fn apply_local<F>(&self, pos: usize, width: usize, out_slots: &[i32], f: F) -> Result<Self, ExteriorError>
    where
        F: Fn(&[Subset]) -> Vec<(Vec<Subset>, LaurentPoly)>,
    {
        if pos + width > self.slots.len() {
            return Err(ExteriorError::Position(pos));
        }
        for &l in out_slots {
            check_label(self.n, l)?;
        }
        let mut slots = self.slots[..pos].to_vec();
        slots.extend_from_slice(out_slots);
        slots.extend_from_slice(&self.slots[pos + width..]);
        let mut out = Self { n: self.n, slots, terms: BTreeMap::new() };
        for (key, c) in &self.terms {
            for (local, lc) in f(&key[pos..pos + width]) {
                debug_assert_eq!(local.len(), out_slots.len());
                let mut k = key[..pos].to_vec();
                k.extend(local);
                k.extend_from_slice(&key[pos + width..]);
                out.add_term(k, &(c * &lc));
            }
        }
        Ok(out)
    }

    fn expect_slots(&self, pos: usize, expected: &[i32]) -> Result<(), ExteriorError> {
        let found = self.slots.get(pos..pos + expected.len());
        if found != Some(expected) {
            return Err(ExteriorError::SlotMismatch { expected: expected.to_vec(), found: found.map(<[i32]>::to_vec).unwrap_or_default() });
        }
        Ok(())
    }

    pub fn insert_trivial_slot(&self, pos: usize) -> Result<Self, ExteriorError> {
        self.apply_local(pos, 0, &[0], |_| vec![(vec![0], LaurentPoly::one())])
    }

    pub fn remove_trivial_slot(&self, pos: usize) -> Result<Self, ExteriorError> {
        self.expect_slots(pos, &[0])?;
        self.apply_local(pos, 1, &[], |_| vec![(vec![], LaurentPoly::one())])
    }
}

impl fmt::Display for SubsetBasisVector {
    /// `(c)*v{1,3}(x)vb{2} + ..`; a coefficient of 1 is omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (key, c) in &self.terms {
            let tensor: Vec<String> =
                key.iter().zip(&self.slots).map(|(s, &l)| format!("{}{}", if l < 0 { "vb" } else { "v" }, format_subset(*s))).collect();
            let tensor = if tensor.is_empty() { "1".to_string() } else { tensor.join("(x)") };
            if c.is_one() {
                parts.push(tensor);
            } else {
                parts.push(format!("({c})*{tensor}"));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Generators of U_q(gl n).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    E(usize),
    F(usize),
    K(usize),
    KInv(usize),
}

impl Generator {
    fn check(self, n: usize) -> Result<(), ExteriorError> {
        let (i, top) = match self {
            Generator::E(i) | Generator::F(i) => (i, n - 1),
            Generator::K(i) | Generator::KInv(i) => (i, n),
        };
        if i == 0 || i > top {
            Err(ExteriorError::GeneratorIndex { index: i, n })
        } else {
            Ok(())
        }
    }

    /// All generators for rank `n`.
    pub fn all(n: usize) -> Vec<Generator> {
        let mut g = Vec::new();
        for i in 1..n {
            g.push(Generator::E(i));
            g.push(Generator::F(i));
        }
        for i in 1..=n {
            g.push(Generator::K(i));
            g.push(Generator::KInv(i));
        }
        g
    }
}

fn has(s: Subset, i: usize) -> bool {
    s >> (i - 1) & 1 == 1
}

fn moved(s: Subset, from: usize, to: usize) -> Subset {
    (s & !(1 << (from - 1))) | (1 << (to - 1))
}

/// Coordinate `i` of the weight of a basis vector in a slot with the given label.
fn slot_weight(label: i32, s: Subset, i: usize) -> i32 {
    let m = i32::from(has(s, i));
    if label < 0 {
        -m
    } else {
        m
    }
}

/// `E_i` or `F_i` on one slot. The dual slot carries the contragredient action
/// twisted by the Chevalley involution, so its basis is again permuted with unit signs.
fn raise_lower_slot(raise: bool, i: usize, label: i32, s: Subset) -> Option<Subset> {
    let (from, to) = match (raise, label < 0) {
        (true, false) | (false, true) => (i + 1, i),
        (false, false) | (true, true) => (i, i + 1),
    };
    if has(s, from) && !has(s, to) {
        Some(moved(s, from, to))
    } else {
        None
    }
}

/// Action of a generator, extended to tensor products by
/// `E -> E (x) K_i K_{i+1}^-1 + 1 (x) E` and `F -> F (x) 1 + K_i^-1 K_{i+1} (x) F`.
pub fn act(g: Generator, v: &SubsetBasisVector) -> Result<SubsetBasisVector, ExteriorError> {
    g.check(v.n)?;
    let mut out = SubsetBasisVector { n: v.n, slots: v.slots.clone(), terms: BTreeMap::new() };
    for (key, c) in &v.terms {
        match g {
            Generator::K(i) | Generator::KInv(i) => {
                let e: i32 = key.iter().zip(&v.slots).map(|(s, &l)| slot_weight(l, *s, i)).sum();
                let e = if matches!(g, Generator::K(_)) { e } else { -e };
                out.add_term(key.clone(), &c.shift(e));
            }
            Generator::E(i) | Generator::F(i) => {
                let raise = matches!(g, Generator::E(_));
                // Exponent contributed by each factor to K_i K_{i+1}^-1.
                let h: Vec<i32> = key.iter().zip(&v.slots).map(|(s, &l)| slot_weight(l, *s, i) - slot_weight(l, *s, i + 1)).collect();
                for p in 0..key.len() {
                    if let Some(t) = raise_lower_slot(raise, i, v.slots[p], key[p]) {
                        let e: i32 = if raise { h[p + 1..].iter().sum() } else { -h[..p].iter().sum::<i32>() };
                        let mut k = key.clone();
                        k[p] = t;
                        out.add_term(k, &c.shift(e));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Applies a word of generators, rightmost first.
pub fn act_word(word: &[Generator], v: &SubsetBasisVector) -> Result<SubsetBasisVector, ExteriorError> {
    word.iter().rev().try_fold(v.clone(), |acc, &g| act(g, &acc))
}

// ---------------------------------------------------------------------------
// Structure maps on basis tensors.

/// `v_I (x) v_J -> (-q)^{-pi(I,J)} v_{I u J}`, zero unless disjoint.
pub fn multiply_basis(i_set: Subset, j_set: Subset) -> Option<(Subset, LaurentPoly)> {
    (i_set & j_set == 0).then(|| (i_set | j_set, LaurentPoly::neg_q_pow(-pi(i_set, j_set))))
}

/// `vb_I (x) vb_J -> (-q)^{-pi(J,I)} vb_{I u J}`.
pub fn multiply_dual_basis(i_set: Subset, j_set: Subset) -> Option<(Subset, LaurentPoly)> {
    (i_set & j_set == 0).then(|| (i_set | j_set, LaurentPoly::neg_q_pow(-pi(j_set, i_set))))
}

/// Splittings `I = J u K` with `|J| = a`, in increasing order of `J`.
fn splittings(i_set: Subset, a: usize) -> impl Iterator<Item = (Subset, Subset)> {
    let mut out = Vec::new();
    let mut sub = i_set;
    loop {
        if sub.count_ones() as usize == a {
            out.push((sub, i_set & !sub));
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & i_set;
    }
    out.reverse();
    out.into_iter()
}

/// `(a, b)` component of the coproduct: `sum (-1)^{pi(J,K)} q^{pi(K,J)} v_J (x) v_K`.
///
/// The exponent `pi(K,J)` (rather than `|J||K|`) is what makes this a module map for the
/// coproduct used in [`act`]; with it `m o Delta` is the balanced q-binomial.
pub fn comultiply_basis(i_set: Subset, a: usize) -> Vec<(Subset, Subset, LaurentPoly)> {
    splittings(i_set, a).map(|(j, k)| (j, k, LaurentPoly::signed_q_pow(pi(j, k) % 2 == 1, pi(k, j)))).collect()
}

/// Dual coproduct, the transpose of the plain one: `sum (-1)^{pi(K,J)} q^{pi(J,K)} vb_J (x) vb_K`.
pub fn comultiply_dual_basis(i_set: Subset, a: usize) -> Vec<(Subset, Subset, LaurentPoly)> {
    splittings(i_set, a).map(|(j, k)| (j, k, LaurentPoly::signed_q_pow(pi(k, j) % 2 == 1, pi(j, k)))).collect()
}

/// Counit: 1 on `v_{}`, 0 elsewhere.
pub fn counit(s: Subset) -> LaurentPoly {
    if s == 0 {
        LaurentPoly::one()
    } else {
        LaurentPoly::zero()
    }
}

impl SubsetBasisVector {
    /// Multiplication of the plain slots at `pos`, `pos + 1`.
    pub fn multiply(&self, pos: usize) -> Result<Self, ExteriorError> {
        let (a, b) = self.pair_at(pos)?;
        if a < 0 || b < 0 {
            return Err(ExteriorError::SlotMismatch { expected: vec![a.abs(), b.abs()], found: vec![a, b] });
        }
        check_label(self.n, a + b)?;
        self.apply_local(pos, 2, &[a + b], |k| multiply_basis(k[0], k[1]).map(|(s, c)| (vec![s], c)).into_iter().collect())
    }

    /// Multiplication of the dual slots at `pos`, `pos + 1`.
    pub fn multiply_dual(&self, pos: usize) -> Result<Self, ExteriorError> {
        let (a, b) = self.pair_at(pos)?;
        if a > 0 || b > 0 {
            return Err(ExteriorError::SlotMismatch { expected: vec![-a.abs(), -b.abs()], found: vec![a, b] });
        }
        check_label(self.n, a + b)?;
        self.apply_local(pos, 2, &[a + b], |k| multiply_dual_basis(k[0], k[1]).map(|(s, c)| (vec![s], c)).into_iter().collect())
    }

    /// `(a, b)` component of the coproduct on the plain slot at `pos`.
    pub fn comultiply(&self, pos: usize, a: usize, b: usize) -> Result<Self, ExteriorError> {
        self.expect_slots(pos, &[(a + b) as i32])?;
        self.apply_local(pos, 1, &[a as i32, b as i32], |k| {
            comultiply_basis(k[0], a).into_iter().map(|(j, l, c)| (vec![j, l], c)).collect()
        })
    }

    /// `(a, b)` component of the coproduct on the dual slot at `pos`.
    pub fn comultiply_dual(&self, pos: usize, a: usize, b: usize) -> Result<Self, ExteriorError> {
        self.expect_slots(pos, &[-((a + b) as i32)])?;
        self.apply_local(pos, 1, &[-(a as i32), -(b as i32)], |k| {
            comultiply_dual_basis(k[0], a).into_iter().map(|(j, l, c)| (vec![j, l], c)).collect()
        })
    }

    fn pair_at(&self, pos: usize) -> Result<(i32, i32), ExteriorError> {
        match self.slots.get(pos..pos + 2) {
            Some(p) => Ok((p[0], p[1])),
            None => Err(ExteriorError::Position(pos)),
        }
    }

    /// Applies one of the four duality pairings. Evaluations replace the pair of slots at
    /// `pos` by a trivial slot; coevaluations replace the trivial slot at `pos` by a pair.
    pub fn pairing(&self, pos: usize, kind: PairingKind, p: usize) -> Result<Self, ExteriorError> {
        let table = pairings(self.n)?;
        let coeffs = table.coefficients(kind, p)?;
        let pi = p as i32;
        match kind {
            PairingKind::EvLeft | PairingKind::EvRight => {
                let expected = if kind == PairingKind::EvLeft { [-pi, pi] } else { [pi, -pi] };
                self.expect_slots(pos, &expected)?;
                self.apply_local(pos, 2, &[0], |k| if k[0] == k[1] { vec![(vec![0], coeffs[&k[0]].clone())] } else { vec![] })
            }
            PairingKind::CoevLeft | PairingKind::CoevRight => {
                self.expect_slots(pos, &[0])?;
                let out = if kind == PairingKind::CoevLeft { [pi, -pi] } else { [-pi, pi] };
                self.apply_local(pos, 1, &out, |_| coeffs.iter().map(|(s, c)| (vec![*s, *s], c.clone())).collect())
            }
        }
    }

    /// Removes trivial slots in `pos..pos+width` until `keep` slots remain.
    fn collapse(&self, pos: usize, width: usize, keep: usize) -> Result<Self, ExteriorError> {
        let zeros: Vec<usize> = (pos..pos + width).filter(|&i| self.slots[i] == 0).collect();
        if width < keep || zeros.len() < width - keep {
            return Err(ExteriorError::SlotMismatch { expected: vec![], found: self.slots[pos..pos + width].to_vec() });
        }
        let mut v = self.clone();
        for &i in zeros[..width - keep].iter().rev() {
            v = v.remove_trivial_slot(i)?;
        }
        Ok(v)
    }

    /// The merge `V(r) (x) V(s) -> V(r+s)` on the slots at `pos`, `pos + 1`, assembled from
    /// multiplication, comultiplication and the duality pairings.
    pub fn merge_at(&self, pos: usize) -> Result<Self, ExteriorError> {
        let (r, s) = self.pair_at(pos)?;
        check_label(self.n, r + s)?;
        let v = if r == 0 || s == 0 {
            self.clone()
        } else if r > 0 && s > 0 {
            return self.multiply(pos);
        } else if r < 0 && s < 0 {
            return self.multiply_dual(pos);
        } else if r < 0 {
            let (a, s) = ((-r) as usize, s as usize);
            if s >= a {
                self.comultiply(pos + 1, a, s - a)?.pairing(pos, PairingKind::EvLeft, a)?
            } else {
                self.comultiply_dual(pos, a - s, s)?.pairing(pos + 1, PairingKind::EvLeft, s)?
            }
        } else {
            let (r, b) = (r as usize, (-s) as usize);
            if r >= b {
                self.comultiply(pos, r - b, b)?.pairing(pos + 1, PairingKind::EvRight, b)?
            } else {
                self.comultiply_dual(pos + 1, r, b - r)?.pairing(pos, PairingKind::EvRight, r)?
            }
        };
        // Whatever happened, the two slots at pos.. are now one non-trivial slot plus trivial ones.
        let width = v.slots.len() + 2 - self.slots.len();
        v.collapse(pos, width, 1)
    }

    /// The split `V(r+s) -> V(r) (x) V(s)` of the slot at `pos`.
    pub fn split_at(&self, pos: usize, r: i32, s: i32) -> Result<Self, ExteriorError> {
        self.expect_slots(pos, &[r + s])?;
        check_label(self.n, r)?;
        check_label(self.n, s)?;
        if r == 0 {
            return self.insert_trivial_slot(pos);
        }
        if s == 0 {
            return self.insert_trivial_slot(pos + 1);
        }
        if r > 0 && s > 0 {
            return self.comultiply(pos, r as usize, s as usize);
        }
        if r < 0 && s < 0 {
            return self.comultiply_dual(pos, (-r) as usize, (-s) as usize);
        }
        if r > 0 {
            let (r, b) = (r as usize, (-s) as usize);
            if r >= b {
                // (m (x) id)(id (x) coev_L)
                self.insert_trivial_slot(pos + 1)?.pairing(pos + 1, PairingKind::CoevLeft, b)?.multiply(pos)
            } else {
                // (id (x) mb)(coev_L (x) id)
                self.insert_trivial_slot(pos)?.pairing(pos, PairingKind::CoevLeft, r)?.multiply_dual(pos + 1)
            }
        } else {
            let (a, s) = ((-r) as usize, s as usize);
            if s >= a {
                // (id (x) m)(coev_R (x) id)
                self.insert_trivial_slot(pos)?.pairing(pos, PairingKind::CoevRight, a)?.multiply(pos + 1)
            } else {
                // (mb (x) id)(id (x) coev_R)
                self.insert_trivial_slot(pos + 1)?.pairing(pos + 1, PairingKind::CoevRight, s)?.multiply_dual(pos)
            }
        }
    }
}

/// The merge `V(r) (x) V(s) -> V(r+s)` applied to a vector with exactly those two slots.
pub fn merge_map(r: i32, s: i32, x: &SubsetBasisVector) -> Result<SubsetBasisVector, ExteriorError> {
    x.expect_slots(0, &[r, s])?;
    if x.slots.len() != 2 {
        return Err(ExteriorError::SlotMismatch { expected: vec![r, s], found: x.slots.clone() });
    }
    x.merge_at(0)
}

/// The split `V(r+s) -> V(r) (x) V(s)` applied to a vector with exactly one slot.
pub fn split_map(r: i32, s: i32, x: &SubsetBasisVector) -> Result<SubsetBasisVector, ExteriorError> {
    if x.slots.len() != 1 {
        return Err(ExteriorError::SlotMismatch { expected: vec![r + s], found: x.slots.clone() });
    }
    x.split_at(0, r, s)
}

// ---------------------------------------------------------------------------
// Duality pairings, solved from equivariance.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairingKind {
    /// `V(-p) (x) V(p) -> C`.
    EvLeft,
    /// `V(p) (x) V(-p) -> C`.
    EvRight,
    /// `C -> V(p) (x) V(-p)`.
    CoevLeft,
    /// `C -> V(-p) (x) V(p)`.
    CoevRight,
}

impl PairingKind {
    pub const ALL: [PairingKind; 4] = [PairingKind::EvLeft, PairingKind::EvRight, PairingKind::CoevLeft, PairingKind::CoevRight];

    fn slots(self, p: i32) -> [i32; 2] {
        match self {
            PairingKind::EvLeft | PairingKind::CoevRight => [-p, p],
            PairingKind::EvRight | PairingKind::CoevLeft => [p, -p],
        }
    }

    fn is_evaluation(self) -> bool {
        matches!(self, PairingKind::EvLeft | PairingKind::EvRight)
    }
}

/// What the solver found for one label `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverReport {
    pub p: usize,
    /// Number of free unit parameters left by the equivariance constraints, per pairing.
    pub free_parameters: Vec<(PairingKind, usize)>,
    /// `ev_R o coev_L` after normalization.
    pub circle_right: LaurentPoly,
    /// `ev_L o coev_R` after normalization.
    pub circle_left: LaurentPoly,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
struct PairingLevel {
    coeffs: HashMap<PairingKind, BTreeMap<Subset, LaurentPoly>>,
    report: SolverReport,
}

/// Unit coefficients of the four pairings for every label `0..=n`.
#[derive(Clone, Debug)]
pub struct Pairings {
    n: usize,
    levels: Vec<PairingLevel>,
}

impl Pairings {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self, kind: PairingKind, p: usize) -> Result<&BTreeMap<Subset, LaurentPoly>, ExteriorError> {
        self.levels.get(p).map(|l| &l.coeffs[&kind]).ok_or(ExteriorError::Label { label: p as i32, n: self.n })
    }

    pub fn coefficient(&self, kind: PairingKind, s: Subset) -> LaurentPoly {
        let p = s.count_ones() as usize;
        self.levels[p].coeffs[&kind].get(&s).cloned().unwrap_or_default()
    }

    pub fn reports(&self) -> impl Iterator<Item = &SolverReport> {
        self.levels.iter().map(|l| &l.report)
    }

    /// Exponent `phi(I) = sum(I) - p(p+1)/2`; the left evaluation is `(-q)^phi(I)`.
    pub fn phi(s: Subset) -> i32 {
        let p = size(s);
        element_sum(s) - p * (p + 1) / 2
    }
}

type Equation = Vec<(Subset, LaurentPoly)>;

/// Equivariance constraints on the unknown diagonal coefficients `c_I` of a pairing.
fn pairing_equations(n: usize, kind: PairingKind, p: usize) -> Result<Vec<Equation>, ExteriorError> {
    let slots = kind.slots(p as i32).to_vec();
    let subs = subsets_of_size(n, p);
    let mut eqs = Vec::new();
    let gens: Vec<Generator> = (1..n).flat_map(|i| [Generator::E(i), Generator::F(i)]).collect();
    if kind.is_evaluation() {
        // ev(g x) = 0 for every basis tensor x and every E_i, F_i.
        for &g in &gens {
            for &a in &subs {
                for &b in &subs {
                    let x = SubsetBasisVector::basis(n, slots.clone(), vec![a, b])?;
                    let gx = act(g, &x)?;
                    let eq: Equation = gx.terms.iter().filter(|(k, _)| k[0] == k[1]).map(|(k, c)| (k[0], c.clone())).collect();
                    if !eq.is_empty() {
                        eqs.push(eq);
                    }
                }
            }
        }
    } else {
        // g (sum_I d_I x_I) = 0: collect, per output tensor, the contributions of each d_I.
        for &g in &gens {
            let mut by_key: BTreeMap<Vec<Subset>, Equation> = BTreeMap::new();
            for &a in &subs {
                let x = SubsetBasisVector::basis(n, slots.clone(), vec![a, a])?;
                for (k, c) in act(g, &x)?.terms {
                    by_key.entry(k).or_default().push((a, c));
                }
            }
            eqs.extend(by_key.into_values());
        }
    }
    Ok(eqs)
}

/// Propagates ratios through the constraint graph. Returns the solution with one
/// coefficient fixed to 1 per connected component, and the component count.
fn solve_equations(subs: &[Subset], eqs: &[Equation]) -> Result<(BTreeMap<Subset, LaurentPoly>, usize), String> {
    let mut adj: HashMap<Subset, Vec<usize>> = HashMap::new();
    for (ei, eq) in eqs.iter().enumerate() {
        if eq.len() > 2 {
            return Err(format!("constraint with {} unknowns", eq.len()));
        }
        for (s, _) in eq {
            adj.entry(*s).or_default().push(ei);
        }
    }
    let mut sol: BTreeMap<Subset, LaurentPoly> = BTreeMap::new();
    let mut components = 0;
    for &start in subs {
        if sol.contains_key(&start) {
            continue;
        }
        components += 1;
        sol.insert(start, LaurentPoly::one());
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            for &ei in adj.get(&s).map(Vec::as_slice).unwrap_or(&[]) {
                let eq = &eqs[ei];
                if eq.len() == 1 {
                    return Err(format!("constraint forces coefficient of {} to vanish", format_subset(s)));
                }
                let (known, other) = if eq[0].0 == s { (&eq[0], &eq[1]) } else { (&eq[1], &eq[0]) };
                if sol.contains_key(&other.0) {
                    continue;
                }
                let inv = other.1.unit_inverse().ok_or_else(|| format!("non-unit constraint coefficient {}", other.1))?;
                let v = -&(&(&known.1 * &sol[&s]) * &inv);
                sol.insert(other.0, v);
                queue.push_back(other.0);
            }
        }
    }
    for eq in eqs {
        let total = eq.iter().fold(LaurentPoly::zero(), |acc, (s, c)| &acc + &(c * &sol[s]));
        if !total.is_zero() {
            return Err("inconsistent equivariance constraints".to_string());
        }
    }
    Ok((sol, components))
}

fn solve_level(n: usize, p: usize) -> Result<PairingLevel, ExteriorError> {
    let subs = subsets_of_size(n, p);
    let mut raw = HashMap::new();
    let mut free = Vec::new();
    for kind in PairingKind::ALL {
        let eqs = pairing_equations(n, kind, p)?;
        let (sol, comps) = solve_equations(&subs, &eqs).map_err(|e| ExteriorError::Solver(format!("p={p} {kind:?}: {e}")))?;
        raw.insert(kind, sol);
        free.push((kind, comps));
    }
    let mut notes = Vec::new();
    let scale = |m: &BTreeMap<Subset, LaurentPoly>, c: &LaurentPoly| -> BTreeMap<Subset, LaurentPoly> {
        m.iter().map(|(k, v)| (*k, v * c)).collect()
    };
    // ev_L is 1 on the highest subset; the solver already fixed that coefficient.
    let ev_left = raw.remove(&PairingKind::EvLeft).unwrap();
    notes.push("left evaluation normalized to 1 on the highest weight subset".into());
    // coev_L from the zig-zag (id (x) ev_L)(coev_L (x) id) = id.
    let coev_left = {
        let d = raw.remove(&PairingKind::CoevLeft).unwrap();
        let z = &d[&subs[0]] * &ev_left[&subs[0]];
        let zi = z.unit_inverse().ok_or_else(|| ExteriorError::Solver("zig-zag factor is not a unit".into()))?;
        scale(&d, &zi)
    };
    notes.push("left coevaluation fixed by the zig-zag identity".into());
    // ev_R fixed by requiring the circle ev_R o coev_L to be the q-binomial.
    let ev_right = {
        let c = raw.remove(&PairingKind::EvRight).unwrap();
        let circle = subs.iter().fold(LaurentPoly::zero(), |acc, s| &acc + &(&c[s] * &coev_left[s]));
        let target = qbinomial(n as i64, p as i64).expect("p <= n");
        let u = target
            .div_exact(&circle)
            .filter(LaurentPoly::is_unit)
            .ok_or_else(|| ExteriorError::Solver(format!("circle {circle} is not a unit multiple of {target}")))?;
        notes.push(format!("right evaluation scaled by {u} so the circle equals the q-binomial"));
        scale(&c, &u)
    };
    let coev_right = {
        let d = raw.remove(&PairingKind::CoevRight).unwrap();
        let z = &d[&subs[0]] * &ev_right[&subs[0]];
        let zi = z.unit_inverse().ok_or_else(|| ExteriorError::Solver("zig-zag factor is not a unit".into()))?;
        scale(&d, &zi)
    };
    notes.push("right coevaluation fixed by the zig-zag identity".into());
    let circle = |a: &BTreeMap<Subset, LaurentPoly>, b: &BTreeMap<Subset, LaurentPoly>| {
        subs.iter().fold(LaurentPoly::zero(), |acc, s| &acc + &(&a[s] * &b[s]))
    };
    let report = SolverReport {
        p,
        free_parameters: free,
        circle_right: circle(&ev_right, &coev_left),
        circle_left: circle(&ev_left, &coev_right),
        notes,
    };
    let mut coeffs = HashMap::new();
    coeffs.insert(PairingKind::EvLeft, ev_left);
    coeffs.insert(PairingKind::CoevLeft, coev_left);
    coeffs.insert(PairingKind::EvRight, ev_right);
    coeffs.insert(PairingKind::CoevRight, coev_right);
    Ok(PairingLevel { coeffs, report })
}

fn solve_pairings(n: usize) -> Result<Pairings, ExteriorError> {
    check_rank(n)?;
    let levels = (0..=n).map(|p| solve_level(n, p)).collect::<Result<Vec<_>, _>>()?;
    Ok(Pairings { n, levels })
}

static PAIRING_CACHE: OnceLock<RwLock<HashMap<usize, Arc<Pairings>>>> = OnceLock::new();

/// Solved pairings for rank `n`, computed once and shared.
pub fn pairings(n: usize) -> Result<Arc<Pairings>, ExteriorError> {
    let cache = PAIRING_CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().unwrap_or_else(|e| e.into_inner()).get(&n) {
        return Ok(p.clone());
    }
    let solved = Arc::new(solve_pairings(n)?);
    let mut w = cache.write().unwrap_or_else(|e| e.into_inner());
    Ok(w.entry(n).or_insert(solved).clone())
}

// ---------------------------------------------------------------------------
// Relation and equivariance checks.

/// Outcome of an exhaustive operator identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub n: usize,
    pub checked: usize,
    pub failure: Option<String>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

type Relation = (String, Vec<(LaurentPoly, Vec<Generator>)>);

fn relations(n: usize, sabotage: bool) -> Vec<Relation> {
    use Generator::*;
    let one = LaurentPoly::one;
    let neg = || -LaurentPoly::one();
    let mut rels: Vec<Relation> = Vec::new();
    for i in 1..=n {
        rels.push((format!("K{i} K{i}^-1 = 1"), vec![(one(), vec![K(i), KInv(i)]), (neg(), vec![])]));
        rels.push((format!("K{i}^-1 K{i} = 1"), vec![(one(), vec![KInv(i), K(i)]), (neg(), vec![])]));
        for j in 1..=n {
            rels.push((format!("K{i} K{j} = K{j} K{i}"), vec![(one(), vec![K(i), K(j)]), (neg(), vec![K(j), K(i)])]));
        }
        for j in 1..n {
            let e = i32::from(i == j) - i32::from(i == j + 1);
            rels.push((
                format!("K{i} E{j} = q^{e} E{j} K{i}"),
                vec![(one(), vec![K(i), E(j)]), (-LaurentPoly::q_pow(e), vec![E(j), K(i)])],
            ));
            rels.push((
                format!("K{i} F{j} = q^{} F{j} K{i}", -e),
                vec![(one(), vec![K(i), F(j)]), (-LaurentPoly::q_pow(-e), vec![F(j), K(i)])],
            ));
        }
    }
    let q_minus = &LaurentPoly::q() - &LaurentPoly::q_pow(-1);
    for i in 1..n {
        for j in 1..n {
            let mut terms = vec![(q_minus.clone(), vec![E(i), F(j)]), (-&q_minus, vec![F(j), E(i)])];
            if i == j {
                let s = if sabotage { -LaurentPoly::one() } else { LaurentPoly::one() };
                terms.push((-&s, vec![K(i), KInv(i + 1)]));
                terms.push((s, vec![KInv(i), K(i + 1)]));
            }
            rels.push((format!("(q - q^-1)[E{i}, F{j}] = d(K{i}K{}^-1 - K{i}^-1K{})", i + 1, i + 1), terms));
            if i.abs_diff(j) >= 2 {
                rels.push((format!("E{i} E{j} = E{j} E{i}"), vec![(one(), vec![E(i), E(j)]), (neg(), vec![E(j), E(i)])]));
                rels.push((format!("F{i} F{j} = F{j} F{i}"), vec![(one(), vec![F(i), F(j)]), (neg(), vec![F(j), F(i)])]));
            }
            if i.abs_diff(j) == 1 {
                let two = qint(2);
                for (x, y, name) in [(E(i), E(j), "E"), (F(i), F(j), "F")] {
                    rels.push((
                        format!("{name}{i}^2 {name}{j} - [2] {name}{i} {name}{j} {name}{i} + {name}{j} {name}{i}^2 = 0"),
                        vec![(one(), vec![x, x, y]), (-&two, vec![x, y, x]), (one(), vec![y, x, x])],
                    ));
                }
            }
        }
    }
    rels
}

fn check_relations_on(n: usize, vectors: &[SubsetBasisVector], sabotage: bool) -> Result<RelationReport, ExteriorError> {
    let mut checked = 0;
    for (name, terms) in relations(n, sabotage) {
        for v in vectors {
            let mut total = SubsetBasisVector { n, slots: v.slots.clone(), terms: BTreeMap::new() };
            for (c, word) in &terms {
                total.add_vector(&act_word(word, v)?.scaled(c))?;
            }
            checked += 1;
            if !total.is_zero() {
                return Ok(RelationReport { n, checked, failure: Some(format!("{name} fails on {v}: residue {total}")) });
            }
        }
    }
    Ok(RelationReport { n, checked, failure: None })
}

/// All basis tensors with the given slot signature.
pub fn basis_tensors(n: usize, slots: &[i32]) -> Vec<SubsetBasisVector> {
    let mut keys: Vec<Vec<Subset>> = vec![vec![]];
    for &l in slots {
        let subs = subsets_of_size(n, l.unsigned_abs() as usize);
        keys = keys.into_iter().flat_map(|k| subs.iter().map(move |s| [k.clone(), vec![*s]].concat())).collect();
    }
    keys.into_iter().map(|k| SubsetBasisVector::basis(n, slots.to_vec(), k).expect("valid key")).collect()
}

/// Checks every defining relation of U_q(gl n) as an operator identity on all basis
/// vectors of the exterior algebra, of its dual, and of their two-fold tensor products.
/// With `sabotage` the right side of the E/F commutator is negated, so the check must fail.
pub fn verify_hopf_relations(n: usize, sabotage: bool) -> Result<RelationReport, ExteriorError> {
    check_rank(n)?;
    if n > 5 {
        return Err(ExteriorError::Rank(n));
    }
    let labels: Vec<i32> = (-(n as i32)..=n as i32).collect();
    let mut vectors = Vec::new();
    for &l in &labels {
        vectors.extend(basis_tensors(n, &[l]));
    }
    if n <= 4 {
        for &a in &labels {
            for &b in &labels {
                vectors.extend(basis_tensors(n, &[a, b]));
            }
        }
    }
    check_relations_on(n, &vectors, sabotage)
}

/// Checks `g . f(x) = f(g . x)` for every generator and every basis tensor `x` of `slots`.
pub fn check_equivariance<F>(n: usize, slots: &[i32], f: F) -> Result<Option<String>, ExteriorError>
where
    F: Fn(&SubsetBasisVector) -> Result<SubsetBasisVector, ExteriorError>,
{
    for x in basis_tensors(n, slots) {
        let fx = f(&x)?;
        for g in Generator::all(n) {
            let lhs = act(g, &fx)?;
            let rhs = f(&act(g, &x)?)?;
            if lhs != rhs {
                return Ok(Some(format!("{g:?} on {x}: {lhs} vs {rhs}")));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: usize, parts: &[(&[usize], bool)]) -> SubsetBasisVector {
        let idx: Vec<SubsetIndex> = parts.iter().map(|(m, d)| SubsetIndex::new(n, subset_from(m), *d).unwrap()).collect();
        SubsetBasisVector::from_indices(n, &idx).unwrap()
    }

    fn p(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn inversion_counts() {
        assert_eq!(pi(subset_from(&[2]), subset_from(&[1])), 1);
        assert_eq!(pi(subset_from(&[1]), subset_from(&[2])), 0);
        assert_eq!(pi(subset_from(&[3]), subset_from(&[1, 2])), 2);
    }

    #[test]
    fn generator_examples() {
        let e = act(Generator::E(1), &v(2, &[(&[2], false)])).unwrap();
        assert_eq!(e, v(2, &[(&[1], false)]));
        assert!(act(Generator::E(1), &v(2, &[(&[1, 2], false)])).unwrap().is_zero());
        let k = act(Generator::K(1), &v(2, &[(&[1], false), (&[1], false)])).unwrap();
        assert_eq!(k, v(2, &[(&[1], false), (&[1], false)]).scaled(&p("q^2")));
        assert!(act(Generator::E(2), &v(2, &[(&[1], false)])).is_err());
        assert!(act(Generator::K(3), &v(2, &[(&[1], false)])).is_err());
    }

    #[test]
    fn nilpotent_generators() {
        for n in 2..=4 {
            for l in -(n as i32)..=n as i32 {
                for x in basis_tensors(n, &[l]) {
                    for i in 1..n {
                        assert!(act_word(&[Generator::E(i), Generator::E(i)], &x).unwrap().is_zero());
                        assert!(act_word(&[Generator::F(i), Generator::F(i)], &x).unwrap().is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn multiply_examples() {
        let x = v(3, &[(&[2], false), (&[1], false)]).multiply(0).unwrap();
        assert_eq!(x, v(3, &[(&[1, 2], false)]).scaled(&p("-q^-1")));
        assert!(v(3, &[(&[1], false), (&[1], false)]).multiply(0).unwrap().is_zero());
        let y = v(3, &[(&[1, 3], false), (&[2], false)]).multiply(0).unwrap();
        assert_eq!(y, v(3, &[(&[1, 2, 3], false)]).scaled(&p("-q^-1")));
        assert!(v(3, &[(&[1], true), (&[2], false)]).multiply(0).is_err());
    }

    #[test]
    fn comultiply_examples() {
        let d = v(2, &[(&[1, 2], false)]).comultiply(0, 1, 1).unwrap();
        let mut expected = v(2, &[(&[1], false), (&[2], false)]).scaled(&p("q"));
        expected.add_vector(&v(2, &[(&[2], false), (&[1], false)]).scaled(&p("-1"))).unwrap();
        assert_eq!(d, expected);
        let d = v(2, &[(&[1], false)]).comultiply(0, 1, 0).unwrap();
        assert_eq!(d, v(2, &[(&[1], false), (&[], false)]));
        let d = v(2, &[(&[1, 2], false)]).comultiply(0, 0, 2).unwrap();
        assert_eq!(d, v(2, &[(&[], false), (&[1, 2], false)]));
        assert!(v(2, &[(&[1, 2], false)]).comultiply(0, 1, 0).is_err());
    }

    #[test]
    fn merge_examples() {
        let x = merge_map(1, 1, &v(2, &[(&[2], false), (&[1], false)])).unwrap();
        assert_eq!(x, v(2, &[(&[1, 2], false)]).scaled(&p("-q^-1")));
        // The invariant of V (x) V(-1) maps to a nonzero multiple of the empty vector.
        let coev = SubsetBasisVector::unit(2).insert_trivial_slot(0).unwrap().pairing(0, PairingKind::CoevLeft, 1).unwrap();
        let m = merge_map(1, -1, &coev).unwrap();
        assert_eq!(m.slots(), &[0]);
        assert_eq!(m.len(), 1);
        assert_eq!(m.coeff(&[0]), qbinomial(2, 1).unwrap());
        let id = merge_map(2, 0, &v(2, &[(&[1, 2], false), (&[], false)])).unwrap();
        assert_eq!(id, v(2, &[(&[1, 2], false)]));
        assert!(merge_map(2, 1, &v(2, &[(&[1, 2], false), (&[1], false)])).is_err());
    }

    #[test]
    fn weights() {
        assert_eq!(weight_of(&SubsetIndex::new(3, subset_from(&[1, 3]), false).unwrap()).coords, vec![1, 0, 1]);
        assert_eq!(weight_of(&SubsetIndex::new(2, subset_from(&[2]), true).unwrap()).coords, vec![0, -1]);
        assert_eq!(weight_of(&SubsetIndex::new(4, 0, false).unwrap()).coords, vec![0; 4]);
    }

    #[test]
    fn extremal_vectors() {
        assert_eq!(highest_vector(4, 2).unwrap().members, subset_from(&[1, 2]));
        assert_eq!(highest_vector(4, 0).unwrap().members, 0);
        assert_eq!(lowest_vector(4, 2).unwrap().members, subset_from(&[3, 4]));
        assert!(highest_vector(2, 3).is_err());
    }

    #[test]
    fn hopf_relations_hold() {
        for n in 2..=3 {
            let r = verify_hopf_relations(n, false).unwrap();
            assert!(r.passed(), "{:?}", r.failure);
        }
    }

    #[test]
    fn sabotaged_relation_is_caught() {
        let r = verify_hopf_relations(2, true).unwrap();
        assert!(r.failure.unwrap().contains("[E1, F1]"));
    }

    #[test]
    fn left_evaluation_has_closed_form() {
        for n in 1..=4 {
            let t = pairings(n).unwrap();
            for p in 0..=n {
                for s in subsets_of_size(n, p) {
                    assert_eq!(t.coefficient(PairingKind::EvLeft, s), LaurentPoly::neg_q_pow(Pairings::phi(s)));
                    let right = t.coefficient(PairingKind::EvRight, s);
                    let expected = LaurentPoly::neg_q_pow(-Pairings::phi(s)).shift((p * (n - p)) as i32);
                    assert_eq!(right, expected);
                }
            }
        }
    }

    #[test]
    fn circles_are_binomials() {
        for n in 1..=4 {
            for r in pairings(n).unwrap().reports() {
                let b = qbinomial(n as i64, r.p as i64).unwrap();
                assert_eq!(r.circle_left, b);
                assert_eq!(r.circle_right, b);
                assert!(r.free_parameters.iter().all(|(_, k)| *k == 1));
            }
        }
    }

    #[test]
    fn multiply_after_comultiply_is_binomial() {
        for n in 1..=4usize {
            for s in 0..(1u32 << n) {
                let p = s.count_ones() as usize;
                let x = SubsetBasisVector::basis(n, vec![p as i32], vec![s]).unwrap();
                for a in 0..=p {
                    let y = x.comultiply(0, a, p - a).unwrap().multiply(0).unwrap();
                    assert_eq!(y, x.scaled(&qbinomial(p as i64, a as i64).unwrap()));
                }
            }
        }
    }

    #[test]
    fn counit_law() {
        for n in 1..=3 {
            for s in 0..(1u32 << n) {
                let p = s.count_ones() as usize;
                let mut total = LaurentPoly::zero();
                let mut out = LaurentPoly::zero();
                for (j, k, c) in comultiply_basis(s, 0) {
                    total += &(&counit(j) * &c);
                    assert_eq!(k, s);
                    out += &c;
                }
                assert!(total.is_one());
                assert!(out.is_one());
                for (j, k, c) in comultiply_basis(s, p) {
                    assert_eq!((j, k), (s, 0));
                    assert!(c.is_one());
                }
            }
        }
    }

    #[test]
    fn display_format() {
        let mut x = v(3, &[(&[1, 3], false), (&[2], true)]).scaled(&p("q^2"));
        x.add_vector(&v(3, &[(&[1, 2], false), (&[3], true)])).unwrap();
        assert_eq!(x.to_string(), "v{1,2}(x)vb{3} + (1*q^2)*v{1,3}(x)vb{2}");
    }

    #[test]
    fn merges_and_splits_are_equivariant() {
        for n in 1..=3i32 {
            let nu = n as usize;
            for r in -n..=n {
                for s in -n..=n {
                    if (r + s).abs() > n {
                        continue;
                    }
                    let m = check_equivariance(nu, &[r, s], |x| x.merge_at(0)).unwrap();
                    assert!(m.is_none(), "merge {r},{s}: {m:?}");
                    let d = check_equivariance(nu, &[r + s], |x| x.split_at(0, r, s)).unwrap();
                    assert!(d.is_none(), "split {r},{s}: {d:?}");
                }
            }
        }
    }

    #[test]
    fn pairings_are_equivariant() {
        for n in 1..=3usize {
            for p in 0..=n {
                let pi = p as i32;
                for (kind, slots) in [(PairingKind::EvLeft, vec![-pi, pi]), (PairingKind::EvRight, vec![pi, -pi])] {
                    assert!(check_equivariance(n, &slots, |x| x.pairing(0, kind, p)).unwrap().is_none());
                }
                for kind in [PairingKind::CoevLeft, PairingKind::CoevRight] {
                    assert!(check_equivariance(n, &[0], |x| x.pairing(0, kind, p)).unwrap().is_none());
                }
            }
        }
    }

    #[test]
    fn multiplication_is_associative() {
        let n = 4;
        for a in 0..(1u32 << n) {
            for b in 0..(1u32 << n) {
                for c in 0..(1u32 << n) {
                    let x = SubsetBasisVector::basis(n, vec![size(a), size(b), size(c)], vec![a, b, c]).unwrap();
                    if size(a) + size(b) + size(c) > n as i32 {
                        continue;
                    }
                    let left = x.multiply(0).unwrap().multiply(0).unwrap();
                    let right = x.multiply(1).unwrap().multiply(0).unwrap();
                    assert_eq!(left, right);
                    if a & b == 0 && a & c == 0 && b & c == 0 {
                        let e = pi(a, b) + pi(a, c) + pi(b, c);
                        assert_eq!(left.coeff(&[a | b | c]), LaurentPoly::neg_q_pow(-e));
                    } else {
                        assert!(left.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn comultiplication_is_coassociative() {
        for n in 1..=4usize {
            for s in 0..(1u32 << n) {
                let p = s.count_ones() as usize;
                let x = SubsetBasisVector::basis(n, vec![p as i32], vec![s]).unwrap();
                let xd = SubsetBasisVector::basis(n, vec![-(p as i32)], vec![s]).unwrap();
                for a in 0..=p {
                    for b in 0..=p - a {
                        let c = p - a - b;
                        let l = x.comultiply(0, a + b, c).unwrap().comultiply(0, a, b).unwrap();
                        let r = x.comultiply(0, a, b + c).unwrap().comultiply(1, b, c).unwrap();
                        assert_eq!(l, r);
                        let l = xd.comultiply_dual(0, a + b, c).unwrap().comultiply_dual(0, a, b).unwrap();
                        let r = xd.comultiply_dual(0, a, b + c).unwrap().comultiply_dual(1, b, c).unwrap();
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn multiplication_preserves_weight() {
        let n = 3;
        for a in 0..(1u32 << n) {
            for b in 0..(1u32 << n) {
                let x = SubsetBasisVector::basis(n, vec![size(a), size(b)], vec![a, b]).unwrap();
                let w = x.key_weight(&[a, b]);
                if size(a) + size(b) <= n as i32 {
                    for k in x.multiply(0).unwrap().terms().keys() {
                        assert_eq!(x.multiply(0).unwrap().key_weight(k), w);
                    }
                }
            }
        }
    }

    #[test]
    fn dual_structure_maps_are_equivariant() {
        for n in 2..=3usize {
            for a in 0..=n as i32 {
                for b in 0..=n as i32 - a {
                    let m = check_equivariance(n, &[-a, -b], |x| x.multiply_dual(0)).unwrap();
                    assert!(m.is_none(), "mult dual {a},{b}: {m:?}");
                    let d = check_equivariance(n, &[-(a + b)], |x| x.comultiply_dual(0, a as usize, b as usize)).unwrap();
                    assert!(d.is_none(), "comult dual {a},{b}: {d:?}");
                    let m = check_equivariance(n, &[a, b], |x| x.multiply(0)).unwrap();
                    assert!(m.is_none(), "mult {a},{b}: {m:?}");
                    let d = check_equivariance(n, &[a + b], |x| x.comultiply(0, a as usize, b as usize)).unwrap();
                    assert!(d.is_none(), "comult {a},{b}: {d:?}");
                }
            }
        }
    }
}
