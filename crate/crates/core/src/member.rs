//! Deciding whether a flow diagram is one of the grown basis diagrams: read off a word,
//! regrow it, and compare normal forms.

use thiserror::Error;

use crate::eval::{evaluate_diagram, unit_ratio, EvalError};
use crate::growth::{canonicalize, grow, Fill, FlowDiagram, WebError};
use crate::words::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MemberError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Web(#[from] WebError),
    #[error("the diagram evaluates to zero")]
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipReport {
    pub is_basis: bool,
    pub extracted_word: Word,
    /// First cell, in row-major order, where the diagram differs from the regrown one.
    pub mismatch_cell: Option<(usize, usize)>,
}

/// The greatest word with a non-zero coefficient in the diagram's vector. On a grown diagram
/// this is the word it was grown from.
pub fn extract_word(d: &FlowDiagram) -> Result<Word, MemberError> {
    evaluate_diagram(d)?.into_keys().next_back().ok_or(MemberError::Zero)
}

pub fn is_basis_diagram(d: &FlowDiagram) -> Result<MembershipReport, MemberError> {
    let x = extract_word(d)?;
    let g = grow(&x, d.n).map_err(EvalError::from)?;
    let is_basis = canonicalize(d)? == canonicalize(&g)?;
    let mismatch_cell = if is_basis {
        None
    } else {
        // Prefer the diagram grown from the diagram's own top word: a single altered cell
        // shows up there, while the extracted word may differ already in the top row.
        let own = grow(&d.word(), d.n).map_err(EvalError::from)?;
        first_difference(d, &own).or_else(|| first_difference(d, &g))
    };
    Ok(MembershipReport { is_basis, extracted_word: x, mismatch_cell })
}

fn first_difference(a: &FlowDiagram, b: &FlowDiagram) -> Option<(usize, usize)> {
    a.iter_cells().zip(b.iter_cells()).find(|(x, y)| x != y).map(|(x, _)| (x.row, x.col))
}

/// An accepted mutation with the word it was identified with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Accepted {
    pub row: usize,
    pub col: usize,
    pub fill: Fill,
    pub word: Word,
    /// The mutant and the regrown diagram have equal normal forms and vectors that agree up
    /// to a unit.
    pub verified: bool,
}

/// Outcome of trying every single-cell mutation of one diagram.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub total: usize,
    pub rejected: usize,
    pub accepted: Vec<Accepted>,
}

impl SweepReport {
    pub fn merge(&mut self, other: SweepReport) {
        self.total += other.total;
        self.rejected += other.rejected;
        self.accepted.extend(other.accepted);
    }

    pub fn rejection_rate(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.rejected as f64 / self.total as f64
        }
    }
}

/// Runs the membership test on every single-cell mutation of `d`. A mutant that evaluates to
/// zero has no word and counts as rejected.
pub fn sweep_mutations(d: &FlowDiagram) -> Result<SweepReport, MemberError> {
    let mut rep = SweepReport::default();
    for (row, col, fill) in d.mutations() {
        let m = d.with_fill(row, col, fill).map_err(EvalError::from)?;
        rep.total += 1;
        match is_basis_diagram(&m) {
            Ok(r) if r.is_basis => {
                let g = grow(&r.extracted_word, d.n).map_err(EvalError::from)?;
                let verified =
                    canonicalize(&m)? == canonicalize(&g)? && unit_ratio(&evaluate_diagram(&m)?, &evaluate_diagram(&g)?).is_some();
                rep.accepted.push(Accepted { row, col, fill, word: r.extracted_word, verified });
            }
            Ok(_) | Err(MemberError::Zero) => rep.rejected += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::enumerate_words;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn grown_diagrams_round_trip() {
        assert_eq!(extract_word(&grow(&w("21"), 2).unwrap()).unwrap(), w("21"));
        assert_eq!(extract_word(&grow(&w("1"), 2).unwrap()).unwrap(), w("1"));
        for n in 1..=3 {
            for r in 0..=3 {
                for x in enumerate_words(r, n, None, None) {
                    let rep = is_basis_diagram(&grow(&x, n).unwrap()).unwrap();
                    assert!(rep.is_basis && rep.mismatch_cell.is_none(), "{x}");
                    assert_eq!(rep.extracted_word, x);
                }
            }
        }
    }

    #[test]
    fn mutated_diamond_is_rejected() {
        let d = grow(&w("12"), 2).unwrap();
        let m = d.with_fill(1, 0, Fill::Parallel).unwrap();
        let rep = is_basis_diagram(&m);
        match rep {
            Ok(r) => {
                assert!(!r.is_basis);
                assert_eq!(r.mismatch_cell, Some((1, 0)));
            }
            Err(e) => assert_eq!(e, MemberError::Zero),
        }
    }

    #[test]
    fn sweep_rejects_almost_everything() {
        let mut total = SweepReport::default();
        for n in 2..=3 {
            for x in enumerate_words(3, n, None, None) {
                total.merge(sweep_mutations(&grow(&x, n).unwrap()).unwrap());
            }
        }
        assert!(total.rejection_rate() >= 0.95, "{} of {}", total.rejected, total.total);
        assert!(total.accepted.iter().all(|a| a.verified));
    }
}
