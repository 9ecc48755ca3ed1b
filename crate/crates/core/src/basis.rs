//! The coefficient matrix of grown diagrams over all words of a length, its triangularity,
//! the invariant and highest weight subsets, and counting oracles at q = 1.

use std::collections::BTreeMap;
use std::io;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::eval::{coefficients, EvalError};
use crate::exterior::GlWeight;
use crate::growth::grow;
use crate::qint::LaurentPoly;
use crate::words::{enumerate_words, Letter, TypeString, Word};

/// Default ceiling on the number of words in one matrix.
pub const DEFAULT_MAX_WORDS: usize = 50_000;

#[derive(Debug, Error)]
pub enum BasisError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("more than {limit} words")]
    TooLarge { count: usize, limit: usize },
    #[error("export failed: {0}")]
    Export(String),
}

/// Rows are the vectors of grown diagrams, columns the tensor basis, both indexed by `words`
/// in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisMatrix {
    pub n: usize,
    pub words: Vec<Word>,
    /// `(row, column)` to non-zero coefficient.
    pub entries: BTreeMap<(usize, usize), LaurentPoly>,
    /// Number of states with top word equal to the row word.
    pub diagonal_states: Vec<u64>,
}

impl BasisMatrix {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn entry(&self, row: usize, col: usize) -> LaurentPoly {
        self.entries.get(&(row, col)).cloned().unwrap_or_default()
    }

    /// Records `(row word, column word, coefficient)` in row-major order.
    pub fn records(&self) -> impl Iterator<Item = (&Word, &Word, &LaurentPoly)> {
        self.entries.iter().map(|((i, j), c)| (&self.words[*i], &self.words[*j], c))
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<(), BasisError> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| BasisError::Export(e.to_string());
        w.write_record(["row_word", "col_word", "poly"]).map_err(err)?;
        for (a, b, c) in self.records() {
            w.write_record([a.to_string(), b.to_string(), c.to_string()]).map_err(err)?;
        }
        w.flush().map_err(|e| BasisError::Export(e.to_string()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.records()
                .map(|(a, b, c)| serde_json::json!({"row_word": a.to_string(), "col_word": b.to_string(), "poly": c.to_string()}))
                .collect(),
        )
    }
}

/// Words of length `r`, optionally of one type and weight, checked against the limit.
pub fn index_words(
    r: usize,
    n: usize,
    u: Option<&TypeString>,
    lambda: Option<&GlWeight>,
    max_words: usize,
) -> Result<Vec<Word>, BasisError> {
    let mut words = Vec::new();
    for w in enumerate_words(r, n, u, lambda) {
        words.push(w);
        if words.len() > max_words {
            return Err(BasisError::TooLarge { count: words.len(), limit: max_words });
        }
    }
    Ok(words)
}

/// Evaluates every word of the index set in parallel and assembles the matrix.
pub fn assemble(
    r: usize,
    n: usize,
    u: Option<&TypeString>,
    lambda: Option<&GlWeight>,
    max_words: usize,
) -> Result<BasisMatrix, BasisError> {
    let words = index_words(r, n, u, lambda, max_words)?;
    let index: BTreeMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let rows = words.par_iter().map(|w| -> Result<_, EvalError> { coefficients(&grow(w, n)?) }).collect::<Result<Vec<_>, _>>()?;
    let mut entries = BTreeMap::new();
    let mut diagonal_states = Vec::with_capacity(words.len());
    for (i, row) in rows.into_iter().enumerate() {
        diagonal_states.push(row.get(&words[i]).map_or(0, |c| c.states));
        for (x, c) in row {
            if let (Some(&j), false) = (index.get(&x), c.value.is_zero()) {
                entries.insert((i, j), c.value);
            }
        }
    }
    Ok(BasisMatrix { n, words, entries, diagonal_states })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A non-zero coefficient at a column word greater than the row word.
    AboveDiagonal {
        row: Word,
        col: Word,
        value: LaurentPoly,
    },
    NonUnitDiagonal {
        row: Word,
        value: LaurentPoly,
    },
    /// The diagonal coefficient comes from a number of states other than one.
    DiagonalStates {
        row: Word,
        states: u64,
    },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::AboveDiagonal { row, col, value } => write!(f, "coefficient {value} of {col} in {row} lies above the diagonal"),
            Violation::NonUnitDiagonal { row, value } => write!(f, "diagonal coefficient {value} of {row} is not a unit"),
            Violation::DiagonalStates { row, states } => write!(f, "diagonal of {row} has {states} states"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TriangularityReport {
    pub rows: usize,
    pub violations: Vec<Violation>,
}

impl TriangularityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every row is supported at or below its own word, with a unit on the diagonal
/// coming from a single state.
pub fn verify_triangular(m: &BasisMatrix) -> TriangularityReport {
    let mut violations = Vec::new();
    for ((i, j), c) in &m.entries {
        if m.words[*j] > m.words[*i] {
            violations.push(Violation::AboveDiagonal { row: m.words[*i].clone(), col: m.words[*j].clone(), value: c.clone() });
        }
    }
    for (i, w) in m.words.iter().enumerate() {
        let d = m.entry(i, i);
        if !d.is_unit() {
            violations.push(Violation::NonUnitDiagonal { row: w.clone(), value: d });
        }
        if m.diagonal_states.get(i).copied() != Some(1) {
            violations.push(Violation::DiagonalStates { row: w.clone(), states: m.diagonal_states.get(i).copied().unwrap_or(0) });
        }
    }
    TriangularityReport { rows: m.words.len(), violations }
}

/// Words of type `u` whose grown diagram evaluates to an invariant tensor.
pub fn invariant_basis(u: &TypeString, n: usize) -> Result<Vec<Word>, BasisError> {
    let zero = GlWeight::zero(n);
    let mut out = Vec::new();
    for w in enumerate_words(u.len(), n, Some(u), Some(&zero)) {
        if grow(&w, n).map_err(EvalError::from)?.is_invariant() {
            out.push(w);
        }
    }
    Ok(out)
}

/// Words of type `u` and weight `lambda` whose grown diagram evaluates to a highest weight
/// vector.
pub fn highest_weight_subset(u: &TypeString, lambda: &GlWeight, n: usize) -> Result<Vec<Word>, BasisError> {
    let mut out = Vec::new();
    for w in enumerate_words(u.len(), n, Some(u), Some(lambda)) {
        if grow(&w, n).map_err(EvalError::from)?.is_highest_weight() {
            out.push(w);
        }
    }
    Ok(out)
}

/// Image of a word under the raising operator `E_i` at q = 1: one word per letter it moves.
fn raise(w: &Word, i: u32) -> Vec<Word> {
    let mut out = Vec::new();
    for (p, l) in w.letters.iter().enumerate() {
        let moved = match (l.barred, l.value) {
            (false, v) if v == i + 1 => Some(Letter::plain(i)),
            (true, v) if v == i => Some(Letter::bar(i + 1)),
            _ => None,
        };
        if let Some(m) = moved {
            let mut letters = w.letters.clone();
            letters[p] = m;
            out.push(Word::new(letters));
        }
    }
    out
}

fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot;
                for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dimension of the space of highest weight vectors of weight `lambda` in the tensor product
/// of type `u`, at q = 1: the joint kernel of the raising operators on the weight space.
pub fn oracle_dimensions(u: &TypeString, lambda: &GlWeight, n: usize) -> usize {
    let cols: Vec<Word> = enumerate_words(u.len(), n, Some(u), Some(lambda)).collect();
    let col_index: BTreeMap<&Word, usize> = cols.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut row_index: BTreeMap<(u32, Word), usize> = BTreeMap::new();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for (j, w) in cols.iter().enumerate() {
        for i in 1..n as u32 {
            for image in raise(w, i) {
                let next = row_index.len();
                let r = *row_index.entry((i, image)).or_insert(next);
                if r == rows.len() {
                    rows.push(vec![BigRational::zero(); cols.len()]);
                }
                rows[r][j] += BigRational::one();
            }
        }
    }
    debug_assert_eq!(col_index.len(), cols.len());
    cols.len() - rank(rows)
}

/// Dimension of the invariant tensors of type `u` at q = 1.
pub fn oracle_invariants(u: &TypeString, n: usize) -> usize {
    oracle_dimensions(u, &GlWeight::zero(n), n)
}

/// Standard Young tableaux of a shape, by the hook length formula.
pub fn hook_length_count(shape: &[usize]) -> BigUint {
    let cells: usize = shape.iter().sum();
    let mut num = BigUint::one();
    for k in 2..=cells {
        num *= k;
    }
    let mut den = BigUint::one();
    for (i, &len) in shape.iter().enumerate() {
        for j in 0..len {
            let arm = len - j - 1;
            let leg = shape[i + 1..].iter().filter(|&&l| l > j).count();
            den *= arm + leg + 1;
        }
    }
    num / den
}

/// Partitions of `r` with at most `rows` parts, largest part first.
pub fn partitions(r: usize, rows: usize) -> Vec<Vec<usize>> {
    fn go(left: usize, max: usize, rows: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if rows == 0 {
            return;
        }
        for p in (1..=max.min(left)).rev() {
            cur.push(p);
            go(left - p, p, rows - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(r, r, rows, &mut Vec::new(), &mut out);
    out
}

/// `dim End(V^{(x) r})` for gl(n): the sum of squared tableau counts over partitions of `r`
/// with at most `n` rows.
pub fn endomorphism_dimension(r: usize, n: usize) -> BigInt {
    partitions(r, n).iter().map(|s| BigInt::from(hook_length_count(s).pow(2))).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::weight_of_word;
    use std::collections::BTreeSet;

    fn t(s: &str) -> TypeString {
        s.parse().unwrap()
    }

    #[test]
    fn small_matrices() {
        let m = assemble(1, 2, Some(&t("+")), None, 100).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.entries.len(), 2);
        assert!(m.entries.iter().all(|((i, j), c)| i == j && c.is_unit()));
        let m = assemble(2, 2, Some(&t("++")), None, 100).unwrap();
        assert_eq!(m.len(), 4);
        assert!(verify_triangular(&m).passed());
        let m = assemble(0, 2, None, None, 100).unwrap();
        assert_eq!(m.len(), 1);
        assert!(verify_triangular(&m).passed());
        assert!(matches!(assemble(4, 2, None, None, 10), Err(BasisError::TooLarge { .. })));
    }

    #[test]
    fn triangular_small_ranges() {
        for (n, r) in [(2, 4), (3, 3)] {
            for len in 0..=r {
                let m = assemble(len, n, None, None, DEFAULT_MAX_WORDS).unwrap();
                let rep = verify_triangular(&m);
                assert!(rep.passed(), "n={n} r={len}: {:?}", rep.violations.first());
            }
        }
    }

    #[test]
    fn moved_entry_is_caught() {
        let mut m = assemble(2, 2, None, None, 100).unwrap();
        let ((i, j), c) = m.entries.iter().find(|((i, j), _)| i != j).map(|(k, c)| (*k, c.clone())).unwrap();
        m.entries.remove(&(i, j));
        m.entries.insert((j, i), c);
        let rep = verify_triangular(&m);
        assert!(rep.violations.iter().any(|v| matches!(v, Violation::AboveDiagonal { .. })));
    }

    #[test]
    fn invariant_counts() {
        assert_eq!(invariant_basis(&t("+-"), 2).unwrap().len(), 1);
        assert_eq!(oracle_invariants(&t("+-"), 2), 1);
        assert_eq!(invariant_basis(&t("++++++"), 2).unwrap().len(), 0);
        assert_eq!(oracle_invariants(&t("++++++"), 2), 0);
        assert_eq!(invariant_basis(&t("+-+-+-"), 2).unwrap().len(), 5);
        assert_eq!(endomorphism_dimension(3, 2), BigInt::from(5));
        for r in 0..=4 {
            for u in TypeString::all(r) {
                assert_eq!(invariant_basis(&u, 2).unwrap().len(), oracle_invariants(&u, 2), "{u}");
            }
        }
    }

    #[test]
    fn highest_weight_counts() {
        let w = |s: &str| s.parse::<GlWeight>().unwrap();
        let hw = highest_weight_subset(&t("++++++"), &w("3,3"), 2).unwrap();
        // The ballot sequences of length 6.
        let mut expect: Vec<Word> = ["111222", "112122", "112212", "121122", "121212"].iter().map(|s| s.parse().unwrap()).collect();
        expect.sort();
        assert_eq!(hw, expect);
        assert_eq!(oracle_dimensions(&t("++++++"), &w("3,3"), 2), 5);
        assert_eq!(highest_weight_subset(&t("++"), &w("1,1"), 2).unwrap().len(), 1);
        assert_eq!(highest_weight_subset(&t("+"), &w("1,0"), 2).unwrap(), vec!["1".parse::<Word>().unwrap()]);
    }

    #[test]
    fn highest_weight_counts_match_oracle() {
        for n in 1..=3 {
            for r in 0..=4 {
                for u in TypeString::all(r) {
                    let weights: BTreeSet<GlWeight> = enumerate_words(r, n, Some(&u), None)
                        .map(|x| weight_of_word(&x, n).unwrap())
                        .filter(GlWeight::is_dominant)
                        .collect();
                    for lam in &weights {
                        let words = highest_weight_subset(&u, lam, n).unwrap();
                        assert_eq!(words.len(), oracle_dimensions(&u, lam, n), "n={n} {u} {lam}");
                    }
                }
            }
        }
    }

    #[test]
    fn hook_lengths() {
        assert_eq!(hook_length_count(&[2, 2, 2]), BigUint::from(5u32));
        assert_eq!(hook_length_count(&[1]), BigUint::from(1u32));
        assert_eq!(hook_length_count(&[3, 3, 3]), BigUint::from(42u32));
        assert_eq!(partitions(4, 2), vec![vec![4], vec![3, 1], vec![2, 2]]);
    }

    #[test]
    fn exports() {
        let m = assemble(2, 2, Some(&t("+-")), None, 100).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("row_word,col_word,poly\n"));
        assert_eq!(text.lines().count(), m.entries.len() + 1);
        assert_eq!(m.to_json().as_array().unwrap().len(), m.entries.len());
    }
}
