//! Evaluation of flow diagrams: the state sum over subset labellings of the edges, and an
//! independent evaluator that composes the exterior maps slice by slice.
//!
//! The diagram is read as a map from its lower boundary (the OB and OA sides, carrying fixed
//! extremal vectors) up to the strands of the word. A state assigns a subset to every edge;
//! its heft is the product of local hefts at merges, splits, caps and cups.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::exterior::{
    final_segment, initial_segment, pairings, pi, subsets_of_size, weight_of, ExteriorError, GlWeight, PairingKind, Pairings, Subset,
    SubsetBasisVector, SubsetIndex,
};
use crate::growth::{grow, Cell, Fill, FlowDiagram, GrowthError};
use crate::qint::LaurentPoly;
use crate::words::{type_of, weight_of_word, Letter, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("word {x} does not have the type of the diagram word {w}")]
    TypeMismatch { w: Word, x: Word },
    #[error("term {term} has weight {found}, expected {expected}")]
    WeightViolation { term: Word, expected: String, found: String },
    #[error("no state of this piece matches the given subsets")]
    InvalidState,
}

/// Heft of a merge of plain subsets `i`, `j`: `(-q)^{-pi(I,J)}`.
pub fn merge_heft(i: Subset, j: Subset) -> LaurentPoly {
    LaurentPoly::neg_q_pow(-pi(i, j))
}

/// Heft of a split of a plain subset into `j`, `k`: `(-1)^{pi(J,K)} q^{pi(K,J)}`.
pub fn split_heft(j: Subset, k: Subset) -> LaurentPoly {
    LaurentPoly::signed_q_pow(pi(j, k) % 2 == 1, pi(k, j))
}

/// Merge of edges labelled `r` (left) and `s` (right) carrying `a` and `b`: the middle subset
/// and the heft, or `None` when no state exists. Mixed signs include the cap heft.
pub fn merge_local(p: &Pairings, r: i32, s: i32, a: Subset, b: Subset) -> Option<(Subset, LaurentPoly)> {
    if r == 0 {
        return Some((b, LaurentPoly::one()));
    }
    if s == 0 {
        return Some((a, LaurentPoly::one()));
    }
    if a & b != 0 && (r > 0) == (s > 0) {
        return None;
    }
    let (ra, sa) = (r.abs(), s.abs());
    if r > 0 && s > 0 {
        Some((a | b, merge_heft(a, b)))
    } else if r < 0 && s < 0 {
        Some((a | b, merge_heft(b, a)))
    } else if r < 0 {
        if sa >= ra {
            let m = b & !a;
            (a & !b == 0).then(|| (m, split_heft(a, m) * p.coefficient(PairingKind::EvLeft, a)))
        } else {
            let m = a & !b;
            (b & !a == 0).then(|| (m, split_heft(b, m) * p.coefficient(PairingKind::EvLeft, b)))
        }
    } else if ra >= sa {
        let m = a & !b;
        (b & !a == 0).then(|| (m, split_heft(m, b) * p.coefficient(PairingKind::EvRight, b)))
    } else {
        let m = b & !a;
        (a & !b == 0).then(|| (m, split_heft(m, a) * p.coefficient(PairingKind::EvRight, a)))
    }
}

/// Split of a middle subset `m` into edges labelled `r` (left) and `s` (right): all states
/// with their hefts. Mixed signs include the cup heft.
pub fn split_local(p: &Pairings, r: i32, s: i32, m: Subset) -> Vec<(Subset, Subset, LaurentPoly)> {
    if r == 0 {
        return vec![(0, m, LaurentPoly::one())];
    }
    if s == 0 {
        return vec![(m, 0, LaurentPoly::one())];
    }
    let n = p.n();
    let (ra, sa) = (r.unsigned_abs() as usize, s.unsigned_abs() as usize);
    if (r > 0) == (s > 0) {
        return subsets_of_size(n, ra)
            .into_iter()
            .filter(|&j| j & !m == 0)
            .map(|j| {
                let k = m & !j;
                let h = if r > 0 { split_heft(j, k) } else { split_heft(k, j) };
                (j, k, h)
            })
            .collect();
    }
    let free = |p_size: usize| subsets_of_size(n, p_size).into_iter().filter(move |&i| i & m == 0);
    if r > 0 {
        if ra >= sa {
            free(sa).map(|i| (m | i, i, p.coefficient(PairingKind::CoevLeft, i) * merge_heft(m, i))).collect()
        } else {
            free(ra).map(|i| (i, i | m, p.coefficient(PairingKind::CoevLeft, i) * merge_heft(m, i))).collect()
        }
    } else if sa >= ra {
        free(ra).map(|i| (i, i | m, p.coefficient(PairingKind::CoevRight, i) * merge_heft(i, m))).collect()
    } else {
        free(sa).map(|i| (m | i, i, p.coefficient(PairingKind::CoevRight, i) * merge_heft(i, m))).collect()
    }
}

/// A vertex with the subsets on its edges, for computing a single local heft.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalPiece {
    /// Lower edges labelled `r`, `s` carrying `left`, `right`, merging into `middle`.
    Merge { r: i32, s: i32, left: Subset, right: Subset, middle: Subset },
    /// `middle` splits into upper edges labelled `r`, `s` carrying `left`, `right`.
    Split { r: i32, s: i32, middle: Subset, left: Subset, right: Subset },
}

pub fn local_heft(n: usize, piece: &LocalPiece) -> Result<LaurentPoly, EvalError> {
    let p = pairings(n)?;
    match *piece {
        LocalPiece::Merge { r, s, left, right, middle } => match merge_local(&p, r, s, left, right) {
            Some((m, h)) if m == middle => Ok(h),
            _ => Err(EvalError::InvalidState),
        },
        LocalPiece::Split { r, s, middle, left, right } => split_local(&p, r, s, middle)
            .into_iter()
            .find(|(j, k, _)| (*j, *k) == (left, right))
            .map(|(_, _, h)| h)
            .ok_or(EvalError::InvalidState),
    }
}

/// Fixed subsets on the lower boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryState {
    /// OA edges, A to O.
    pub oa: Vec<Subset>,
    /// OB edges, B to O.
    pub ob: Vec<Subset>,
    /// Top strands, if a word was given.
    pub top: Vec<Subset>,
}

/// Subset on an OA edge with upward label `l`: `v_{1..l}`, or `vb_{n-|l|+1..n}` if `l < 0`.
fn oa_subset(n: usize, l: i32) -> Subset {
    if l >= 0 {
        initial_segment(l as usize)
    } else {
        final_segment(n, l.unsigned_abs() as usize)
    }
}

/// Subset on an OB edge with upward label `l`: `vb_{1..|l|}`, or `v_{n-l+1..n}` if `l > 0`.
fn ob_subset(n: usize, l: i32) -> Subset {
    if l <= 0 {
        initial_segment(l.unsigned_abs() as usize)
    } else {
        final_segment(n, l as usize)
    }
}

pub fn boundary_conditions(d: &FlowDiagram, x: Option<&Word>) -> Result<BoundaryState, EvalError> {
    let w = d.word();
    let top = match x {
        Some(x) => {
            if type_of(x) != type_of(&w) {
                return Err(EvalError::TypeMismatch { w, x: x.clone() });
            }
            x.check_rank(d.n)?;
            x.letters.iter().map(|l| 1 << (l.value - 1)).collect()
        }
        None => Vec::new(),
    };
    Ok(BoundaryState {
        oa: d.oa_edges().iter().map(|&l| oa_subset(d.n, l)).collect(),
        ob: d.ob_edges().iter().map(|&l| ob_subset(d.n, -l)).collect(),
        top,
    })
}

/// Total weight of the boundary vectors. For a grown diagram this is the weight of its word.
pub fn boundary_weight(d: &FlowDiagram, bc: &BoundaryState) -> GlWeight {
    let oa = d.oa_edges().into_iter().zip(&bc.oa);
    let ob = d.ob_edges().into_iter().map(|l| -l).zip(&bc.ob);
    oa.chain(ob).fold(GlWeight::zero(d.n), |acc, (l, &s)| acc.add(&weight_of(&SubsetIndex { n: d.n, members: s, dual: l < 0 })))
}

/// Coefficient of one top word with the number of states contributing to it.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Coefficient {
    pub value: LaurentPoly,
    pub states: u64,
}

type Options = Vec<(Vec<Subset>, LaurentPoly)>;

fn cell_options(p: &Pairings, c: &Cell, a: Subset, b: Subset) -> Options {
    let (sw, se) = c.outputs();
    match c.fill {
        Fill::Letter(_) => merge_local(p, sw, se, a, b).map(|(m, h)| (vec![m], h)).into_iter().collect(),
        Fill::Through { .. } => match merge_local(p, sw, se, a, b) {
            Some((m, h)) => split_local(p, c.x, c.y, m).into_iter().map(|(j, k, h2)| (vec![j, k], &h * &h2)).collect(),
            None => Vec::new(),
        },
        Fill::Parallel => vec![(vec![a, b], LaurentPoly::one())],
        Fill::Empty => vec![(vec![0, 0], LaurentPoly::one())],
    }
}

fn word_of_key(top: &[i32], key: &[Subset]) -> Word {
    Word::new(
        key.iter()
            .zip(top)
            .map(|(s, &l)| {
                let v = s.trailing_zeros() + 1;
                if l < 0 {
                    Letter::bar(v)
                } else {
                    Letter::plain(v)
                }
            })
            .collect(),
    )
}

/// All coefficients of the diagram with state counts, by frontier dynamic programming from
/// the bottom row up. Every term is checked to carry the weight of the boundary.
pub fn coefficients(d: &FlowDiagram) -> Result<BTreeMap<Word, Coefficient>, EvalError> {
    d.validate()?;
    let p = pairings(d.n)?;
    let bc = boundary_conditions(d, None)?;
    let mut states: HashMap<Vec<Subset>, Coefficient> = HashMap::new();
    states.insert(Vec::new(), Coefficient { value: LaurentPoly::one(), states: 1 });
    for i in (0..d.r).rev() {
        let mut next: HashMap<Vec<Subset>, Coefficient> = HashMap::new();
        for (frontier, coeff) in states {
            let mut bottom = Vec::with_capacity(frontier.len() + 2);
            bottom.push(bc.ob[i]);
            bottom.extend(frontier);
            bottom.push(bc.oa[i]);
            let mut partial: Vec<(Vec<Subset>, LaurentPoly)> = vec![(Vec::new(), coeff.value.clone())];
            for (j, c) in d.cells[i].iter().enumerate() {
                let opts = cell_options(&p, c, bottom[2 * j], bottom[2 * j + 1]);
                let mut grown = Vec::with_capacity(partial.len() * opts.len());
                for (key, h) in &partial {
                    for (out, h2) in &opts {
                        let mut k = key.clone();
                        k.extend_from_slice(out);
                        grown.push((k, h * h2));
                    }
                }
                partial = grown;
                if partial.is_empty() {
                    break;
                }
            }
            for (key, h) in partial {
                let e = next.entry(key).or_default();
                e.value += &h;
                e.states += coeff.states;
            }
        }
        states = next;
    }
    let top = d.top();
    let lambda = boundary_weight(d, &bc);
    let mut out = BTreeMap::new();
    for (key, c) in states {
        if d.r == 0 {
            out.insert(Word::default(), c);
            continue;
        }
        let x = word_of_key(&top, &key);
        let found = weight_of_word(&x, d.n)?;
        if found != lambda {
            return Err(EvalError::WeightViolation { term: x, expected: lambda.to_string(), found: found.to_string() });
        }
        out.insert(x, c);
    }
    Ok(out)
}

/// Non-zero coefficients of the diagram's vector, indexed by word.
pub fn evaluate_diagram(d: &FlowDiagram) -> Result<BTreeMap<Word, LaurentPoly>, EvalError> {
    Ok(coefficients(d)?.into_iter().filter(|(_, c)| !c.value.is_zero()).map(|(x, c)| (x, c.value)).collect())
}

/// The coefficient of `x` in the vector of `d`.
pub fn state_sum(d: &FlowDiagram, x: &Word) -> Result<Coefficient, EvalError> {
    boundary_conditions(d, Some(x))?;
    Ok(coefficients(d)?.remove(x).unwrap_or_default())
}

fn to_vector(n: usize, top: &[i32], coeffs: &BTreeMap<Word, LaurentPoly>) -> Result<SubsetBasisVector, EvalError> {
    let mut v = SubsetBasisVector::zero(n, top.to_vec())?;
    for (x, c) in coeffs {
        v.add_term(x.letters.iter().map(|l| 1 << (l.value - 1)).collect(), c);
    }
    Ok(v)
}

/// The unit `u` with `a = u * b` coefficient-wise, if there is one.
pub fn unit_ratio(a: &BTreeMap<Word, LaurentPoly>, b: &BTreeMap<Word, LaurentPoly>) -> Option<LaurentPoly> {
    if a.len() != b.len() || a.keys().ne(b.keys()) {
        return None;
    }
    let Some((k, first)) = b.iter().next() else { return Some(LaurentPoly::one()) };
    let u = a[k].div_exact(first).filter(LaurentPoly::is_unit)?;
    b.iter().all(|(k, c)| a[k] == &u * c).then_some(u)
}

/// The vector of the grown diagram of `w`, by state sum.
pub fn evaluate_vector(w: &Word, n: usize) -> Result<SubsetBasisVector, EvalError> {
    let d = grow(w, n)?;
    to_vector(n, &d.top(), &evaluate_diagram(&d)?)
}

/// The vector of a diagram by composing exterior maps, one row at a time from the bottom.
pub fn slice_evaluate_diagram(d: &FlowDiagram) -> Result<SubsetBasisVector, EvalError> {
    d.validate()?;
    let bc = boundary_conditions(d, None)?;
    let (oa, ob) = (d.oa_edges(), d.ob_edges());
    let mut v = SubsetBasisVector::unit(d.n);
    for i in (0..d.r).rev() {
        v = v.apply_local(0, 0, &[-ob[i]], |_| vec![(vec![bc.ob[i]], LaurentPoly::one())])?;
        let end = v.slots().len();
        v = v.apply_local(end, 0, &[oa[i]], |_| vec![(vec![bc.oa[i]], LaurentPoly::one())])?;
        let mut pos = 0;
        for c in &d.cells[i] {
            match c.fill {
                Fill::Letter(_) => {
                    v = v.merge_at(pos)?;
                    pos += 1;
                }
                Fill::Through { .. } => {
                    v = v.merge_at(pos)?.split_at(pos, c.x, c.y)?;
                    pos += 2;
                }
                Fill::Parallel | Fill::Empty => pos += 2,
            }
        }
    }
    Ok(v)
}

pub fn slice_evaluate(w: &Word, n: usize) -> Result<SubsetBasisVector, EvalError> {
    slice_evaluate_diagram(&grow(w, n)?)
}

/// Number of states of the grown diagram of `w` whose top word is `w` itself.
pub fn diagonal_states(w: &Word, n: usize) -> Result<u64, EvalError> {
    Ok(state_sum(&grow(w, n)?, w)?.states)
}
