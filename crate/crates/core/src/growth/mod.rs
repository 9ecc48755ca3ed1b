//! Growth diagrams: a word is drawn as a row of letter triangles and the triangle below is
//! filled row by row with diamonds.
//!
//! Geometry. Row 0 is the top. Cell `(i, j)` exists for `j < r - i`; its upper-left
//! neighbour is `(i-1, j)` and its upper-right neighbour is `(i-1, j+1)`. Every cell has two
//! bottom edges, `sw` and `se`. A diamond receives `x`, the `se` edge of its upper-left
//! neighbour, and `y`, the `sw` edge of its upper-right neighbour. The corner A is top right
//! and B is top left, so OA is the right side (the `se` edges of the cells `(i, r-1-i)`) and
//! OB is the left side (the `sw` edges of the cells `(i, 0)`).
//!
//! Labels are signed upward flows: label `p > 0` carries `V(p)` upward, label `-p` carries
//! `V(p)` downward (equivalently `V(-p)` upward), and 0 means the edge is absent.

pub mod canonical;
mod text;

use std::fmt;

use thiserror::Error;

use crate::exterior::GlWeight;
use crate::words::{weight_of_word, Letter, Word, WordError};

pub use canonical::{canonicalize, web_of, BoundarySlot, CanonicalWeb, End, Port, SegmentId, Side, Target, Web, WebError};
pub use text::ParseError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrowthError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("cell ({row},{col}) is not a diamond")]
    NotDiamond { row: usize, col: usize },
    #[error("cell ({row},{col}) is malformed: {reason}")]
    Malformed { row: usize, col: usize, reason: String },
    #[error("no cell ({row},{col}) in a diagram of size {r}")]
    NoCell { row: usize, col: usize, r: usize },
}

/// How a cell is filled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fill {
    /// Top-row triangle for one letter.
    Letter(Letter),
    /// Both bottom edges merge into the middle label `x + y`, which splits into the two top
    /// edges. A middle label of 0 is a cap below a cup; a zero edge makes the vertex a bend.
    Through {
        sw: i32,
        se: i32,
    },
    /// The top-left edge leaves bottom-left and the top-right edge leaves bottom-right.
    Parallel,
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    Letter,
    Diamond,
    Empty,
}

/// A trivalent vertex or extremum inside a cell, written with upward-flow labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Vertex {
    Merge { left: i32, right: i32, out: i32 },
    Split { inp: i32, left: i32, right: i32 },
    Cap { left: i32, right: i32 },
    Cup { left: i32, right: i32 },
}

impl Vertex {
    /// Label conservation.
    pub fn is_balanced(&self) -> bool {
        match *self {
            Vertex::Merge { left, right, out } => left + right == out,
            Vertex::Split { inp, left, right } => inp == left + right,
            Vertex::Cap { left, right } | Vertex::Cup { left, right } => left + right == 0,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Merge { left, right, out } => write!(f, "merge({left},{right}->{out})"),
            Vertex::Split { inp, left, right } => write!(f, "split({inp}->{left},{right})"),
            Vertex::Cap { left, right } => write!(f, "cap({left},{right})"),
            Vertex::Cup { left, right } => write!(f, "cup({left},{right})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
    /// Input from the upper-left neighbour (0 for letters).
    pub x: i32,
    /// Input from the upper-right neighbour (0 for letters).
    pub y: i32,
    pub fill: Fill,
}

impl Cell {
    pub fn kind(&self) -> CellKind {
        match self.fill {
            Fill::Letter(_) => CellKind::Letter,
            Fill::Empty => CellKind::Empty,
            _ => CellKind::Diamond,
        }
    }

    /// Bottom edges `(sw, se)`.
    pub fn outputs(&self) -> (i32, i32) {
        match self.fill {
            Fill::Letter(l) => letter_edges(l),
            Fill::Through { sw, se } => (sw, se),
            Fill::Parallel => (self.x, self.y),
            Fill::Empty => (0, 0),
        }
    }

    pub fn sw(&self) -> i32 {
        self.outputs().0
    }

    pub fn se(&self) -> i32 {
        self.outputs().1
    }

    /// Label of the internal edge of a `Through` fill, if present.
    pub fn middle(&self) -> Option<i32> {
        match self.fill {
            Fill::Through { .. } if self.x + self.y != 0 => Some(self.x + self.y),
            _ => None,
        }
    }

    /// Internal vertices, bottom to top.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v = Vec::new();
        match self.fill {
            Fill::Letter(l) => {
                let (sw, se) = letter_edges(l);
                if sw != 0 && se != 0 {
                    v.push(Vertex::Merge { left: sw, right: se, out: l.z_label().signum() });
                }
            }
            Fill::Through { sw, se } => {
                let m = self.x + self.y;
                if m == 0 {
                    if sw != 0 || se != 0 {
                        v.push(Vertex::Cap { left: sw, right: se });
                    }
                    if self.x != 0 || self.y != 0 {
                        v.push(Vertex::Cup { left: self.x, right: self.y });
                    }
                } else {
                    if sw != 0 && se != 0 {
                        v.push(Vertex::Merge { left: sw, right: se, out: m });
                    }
                    if self.x != 0 && self.y != 0 {
                        v.push(Vertex::Split { inp: m, left: self.x, right: self.y });
                    }
                }
            }
            Fill::Parallel | Fill::Empty => {}
        }
        v
    }

    /// True when the cell is a diamond whose two inputs interact (a vertex or a cup).
    pub fn interacts(&self) -> bool {
        self.kind() == CellKind::Diamond && self.x != 0 && self.y != 0 && matches!(self.fill, Fill::Through { .. })
    }

    /// True for a cup with no cap below it.
    pub fn is_cup(&self) -> bool {
        matches!(self.fill, Fill::Through { sw: 0, se: 0 }) && self.x != 0 && self.x + self.y == 0
    }

    fn check(&self, n: usize) -> Result<(), String> {
        let n = n as i32;
        let (sw, se) = self.outputs();
        for l in [self.x, self.y, sw, se] {
            if l.abs() > n {
                return Err(format!("label {l} out of range"));
            }
        }
        match self.fill {
            Fill::Letter(l) => {
                if self.row != 0 || self.x != 0 || self.y != 0 {
                    return Err("letter outside the top row".into());
                }
                if l.value == 0 || l.value as i32 > n {
                    return Err(format!("letter {l} out of range"));
                }
            }
            Fill::Through { sw, se } => {
                if sw + se != self.x + self.y {
                    return Err("labels not conserved".into());
                }
                if (self.x + self.y).abs() > n {
                    return Err("middle label out of range".into());
                }
            }
            Fill::Parallel => {}
            Fill::Empty => {
                if self.x != 0 || self.y != 0 {
                    return Err("empty cell with inputs".into());
                }
            }
        }
        if self.row == 0 && !matches!(self.fill, Fill::Letter(_)) {
            return Err("top row must hold letters".into());
        }
        if self.vertices().iter().any(|v| !v.is_balanced()) {
            return Err("unbalanced vertex".into());
        }
        Ok(())
    }
}

/// Bottom edges `(sw, se)` of a letter triangle: `(-(a-1), a)` for `a` and `(-a, a-1)` for `ab`.
pub fn letter_edges(l: Letter) -> (i32, i32) {
    let a = l.value as i32;
    if l.barred {
        (-a, a - 1)
    } else {
        (-(a - 1), a)
    }
}

pub fn letter_triangle(l: Letter) -> Cell {
    Cell { row: 0, col: 0, x: 0, y: 0, fill: Fill::Letter(l) }
}

/// The standard diamond for inputs `x` (from the upper left) and `y` (from the upper right).
pub fn fill_diamond(x: i32, y: i32, n: usize) -> Fill {
    if x == 0 && y == 0 {
        Fill::Empty
    } else if x == -y {
        Fill::Through { sw: 0, se: 0 }
    } else if (x + y).unsigned_abs() as usize <= n {
        Fill::Through { sw: y, se: x }
    } else {
        Fill::Parallel
    }
}

/// A filled triangular grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlowDiagram {
    pub n: usize,
    pub r: usize,
    /// `cells[i][j]`, row `i` has `r - i` cells.
    pub cells: Vec<Vec<Cell>>,
}

/// Grows the diagram of a word.
pub fn grow(w: &Word, n: usize) -> Result<FlowDiagram, GrowthError> {
    w.check_rank(n)?;
    let r = w.len();
    let mut cells: Vec<Vec<Cell>> = Vec::with_capacity(r);
    if r == 0 {
        return Ok(FlowDiagram { n, r, cells });
    }
    cells.push(w.letters.iter().enumerate().map(|(j, &l)| Cell { col: j, ..letter_triangle(l) }).collect());
    for i in 1..r {
        let row = (0..r - i)
            .map(|j| {
                let x = cells[i - 1][j].se();
                let y = cells[i - 1][j + 1].sw();
                Cell { row: i, col: j, x, y, fill: fill_diamond(x, y, n) }
            })
            .collect();
        cells.push(row);
    }
    Ok(FlowDiagram { n, r, cells })
}

impl FlowDiagram {
    pub fn cell(&self, row: usize, col: usize) -> Result<&Cell, GrowthError> {
        self.cells.get(row).and_then(|c| c.get(col)).ok_or(GrowthError::NoCell { row, col, r: self.r })
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().flatten()
    }

    /// The letters of the top row.
    pub fn word(&self) -> Word {
        Word::new(
            self.cells
                .first()
                .map(|row| {
                    row.iter()
                        .filter_map(|c| match c.fill {
                            Fill::Letter(l) => Some(l),
                            _ => None,
                        })
                        .collect()
                })
                .unwrap_or_default(),
        )
    }

    /// Upward labels of the strands crossing the top edge AB.
    pub fn top(&self) -> Vec<i32> {
        self.word().letters.iter().map(|l| l.z_label().signum()).collect()
    }

    /// Upward labels of the OA edges, read from A down to O.
    pub fn oa_edges(&self) -> Vec<i32> {
        (0..self.r).map(|i| self.cells[i][self.r - 1 - i].se()).collect()
    }

    /// Labels of the OB edges read from B down to O, oriented so that a label `p` carries
    /// `V(p)` downward (the negated upward label).
    pub fn ob_edges(&self) -> Vec<i32> {
        (0..self.r).map(|i| -self.cells[i][0].sw()).collect()
    }

    /// Weight of the OA side.
    pub fn h_weight(&self) -> GlWeight {
        self.oa_edges().iter().fold(GlWeight::zero(self.n), |acc, &l| acc.add(&GlWeight::of_label(self.n, l)))
    }

    /// Weight of the OB side.
    pub fn d_weight(&self) -> GlWeight {
        self.ob_edges().iter().fold(GlWeight::zero(self.n), |acc, &l| acc.add(&GlWeight::of_label(self.n, l)))
    }

    /// Checks adjacency, ranges and label conservation.
    pub fn validate(&self) -> Result<(), GrowthError> {
        if self.cells.len() != self.r {
            return Err(GrowthError::Malformed { row: self.cells.len(), col: 0, reason: "wrong number of rows".into() });
        }
        for (i, row) in self.cells.iter().enumerate() {
            if row.len() != self.r - i {
                return Err(GrowthError::Malformed { row: i, col: row.len(), reason: "wrong row length".into() });
            }
            for (j, c) in row.iter().enumerate() {
                let bad = |reason: String| GrowthError::Malformed { row: i, col: j, reason };
                if c.row != i || c.col != j {
                    return Err(bad("misplaced cell".into()));
                }
                c.check(self.n).map_err(bad)?;
                if i > 0 && (c.x != self.cells[i - 1][j].se() || c.y != self.cells[i - 1][j + 1].sw()) {
                    return Err(bad("inputs disagree with neighbours".into()));
                }
            }
        }
        Ok(())
    }

    /// Replaces the fill of one diamond and regrows the cells below whose inputs change.
    pub fn with_fill(&self, row: usize, col: usize, fill: Fill) -> Result<FlowDiagram, GrowthError> {
        let c = *self.cell(row, col)?;
        if row == 0 || matches!(fill, Fill::Letter(_)) {
            return Err(GrowthError::NotDiamond { row, col });
        }
        let mut d = self.clone();
        d.cells[row][col].fill = fill;
        d.cells[row][col].check(self.n).map_err(|reason| GrowthError::Malformed { row, col, reason })?;
        debug_assert_eq!(c.x, d.cells[row][col].x);
        for i in row + 1..self.r {
            for j in 0..self.r - i {
                let x = d.cells[i - 1][j].se();
                let y = d.cells[i - 1][j + 1].sw();
                let cell = &mut d.cells[i][j];
                if (x, y) != (cell.x, cell.y) {
                    *cell = Cell { row: i, col: j, x, y, fill: fill_diamond(x, y, self.n) };
                }
            }
        }
        Ok(d)
    }

    /// Alternative fills of each diamond that keep the diagram well formed and change what is
    /// drawn: every merge-split with the same middle label and in-range outputs, and the
    /// parallel fill.
    pub fn mutations(&self) -> Vec<(usize, usize, Fill)> {
        let n = self.n as i32;
        let mut out = Vec::new();
        for c in self.iter_cells().filter(|c| c.row > 0) {
            let m = c.x + c.y;
            let mut options = Vec::new();
            if m.abs() <= n {
                for sw in -n..=n {
                    let se = m - sw;
                    if se.abs() <= n {
                        options.push(Fill::Through { sw, se });
                    }
                }
            }
            options.push(Fill::Parallel);
            if c.x == 0 && c.y == 0 {
                options.push(Fill::Empty);
            }
            for f in options {
                // Fills drawing the same picture (e.g. parallel on an empty cell) are not mutations.
                let changed = Cell { fill: f, ..*c };
                if changed.outputs() == c.outputs() && changed.vertices() == c.vertices() {
                    continue;
                }
                if self.with_fill(c.row, c.col, f).is_ok() {
                    out.push((c.row, c.col, f));
                }
            }
        }
        out
    }

    /// Diamonds with a cup and no cap, as pairs of letter positions `(left, right)`. The
    /// `se` line entering cell `(i, j)` starts at letter `j` and the `sw` line starts at
    /// letter `i + j`.
    pub fn cup_positions(&self) -> Vec<(usize, usize)> {
        self.iter_cells().filter(|c| c.is_cup()).map(|c| (c.col, c.row + c.col)).collect()
    }

    /// Checks `H - D = lambda(w)`.
    pub fn weight_identity_holds(&self) -> Result<bool, GrowthError> {
        Ok(self.h_weight().sub(&self.d_weight()) == weight_of_word(&self.word(), self.n)?)
    }

    /// True when `D` is a multiple of the determinant weight, i.e. the evaluated vector is a
    /// highest weight vector.
    pub fn is_highest_weight(&self) -> bool {
        self.d_weight().is_determinant_multiple()
    }

    /// True when the evaluated vector is an invariant tensor.
    pub fn is_invariant(&self) -> bool {
        self.is_highest_weight() && self.h_weight() == self.d_weight()
    }

    pub fn to_text(&self) -> String {
        text::write(self)
    }

    pub fn from_text(s: &str) -> Result<FlowDiagram, ParseError> {
        text::parse(s)
    }

    pub fn canonical(&self) -> Result<CanonicalWeb, WebError> {
        canonicalize(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::enumerate_words;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn nonzero(v: Vec<i32>) -> Vec<i32> {
        v.into_iter().filter(|&l| l != 0).collect()
    }

    #[test]
    fn letter_triangles() {
        assert_eq!(letter_triangle(Letter::plain(2)).outputs(), (-1, 2));
        assert_eq!(letter_triangle(Letter::plain(1)).outputs(), (0, 1));
        assert_eq!(letter_triangle(Letter::bar(1)).outputs(), (-1, 0));
    }

    #[test]
    fn diamond_table() {
        assert_eq!(fill_diamond(0, 2, 3), Fill::Through { sw: 2, se: 0 });
        assert_eq!(fill_diamond(0, 0, 3), Fill::Empty);
        assert_eq!(fill_diamond(2, -2, 3), Fill::Through { sw: 0, se: 0 });
        assert_eq!(fill_diamond(2, -1, 3), Fill::Through { sw: -1, se: 2 });
        assert_eq!(fill_diamond(3, 2, 3), Fill::Parallel);
    }

    #[test]
    fn single_letters() {
        let d = grow(&w("2"), 2).unwrap();
        assert_eq!(d.oa_edges(), vec![2]);
        assert_eq!(d.ob_edges(), vec![1]);
        assert_eq!(d.h_weight().coords, vec![1, 1]);
        assert_eq!(d.d_weight().coords, vec![1, 0]);
        let d = grow(&w("1"), 4).unwrap();
        assert_eq!(nonzero(d.oa_edges()), vec![1]);
        assert!(nonzero(d.ob_edges()).is_empty());
        assert!(d.d_weight().is_zero());
        assert!(grow(&w("3"), 2).is_err());
    }

    #[test]
    fn lattice_word_weight() {
        let d = grow(&w("112233"), 3).unwrap();
        assert_eq!(d.h_weight().sub(&d.d_weight()).coords, vec![2, 2, 2]);
        d.validate().unwrap();
    }

    #[test]
    fn weight_identity_everywhere() {
        for n in 1..=3 {
            for r in 0..=5 {
                for x in enumerate_words(r, n, None, None) {
                    let d = grow(&x, n).unwrap();
                    assert!(d.weight_identity_holds().unwrap(), "{x}");
                    d.validate().unwrap();
                    assert!(d.iter_cells().all(|c| c.vertices().iter().all(Vertex::is_balanced)));
                    assert!(d.iter_cells().all(|c| c.fill != Fill::Parallel));
                }
            }
        }
    }

    /// Independent stack matcher: 1 opens, 2 closes.
    fn bracket_pairs(x: &Word) -> Vec<(usize, usize)> {
        let mut stack = Vec::new();
        let mut pairs = Vec::new();
        for (i, l) in x.letters.iter().enumerate() {
            if l.value == 1 {
                stack.push(i);
            } else if let Some(o) = stack.pop() {
                pairs.push((o, i));
            }
        }
        pairs.sort();
        pairs
    }

    #[test]
    fn bracket_law() {
        for k in 1..=4 {
            let u = crate::words::TypeString::new(vec![crate::words::Sign::Plus; 2 * k]);
            let lam = GlWeight::new(vec![k as i64, k as i64]);
            for x in enumerate_words(2 * k, 2, Some(&u), Some(&lam)) {
                let d = grow(&x, 2).unwrap();
                let mut cups = d.cup_positions();
                cups.sort();
                assert_eq!(cups, bracket_pairs(&x), "{x}");
            }
        }
    }

    #[test]
    fn grow_is_deterministic() {
        for x in enumerate_words(4, 3, None, None) {
            assert_eq!(grow(&x, 3).unwrap(), grow(&x, 3).unwrap());
        }
    }

    /// At n = 3 with labels read mod 3 (a label-2 edge is a reversed label-1 edge, a label-3
    /// edge is absent), the diamonds met while growing words in V fall into nine classes, one
    /// for each pair of inputs.
    #[test]
    fn sl3_diamond_census() {
        let reduce = |l: i32| (l + 4).rem_euclid(3) - 1;
        let mut classes = std::collections::BTreeSet::new();
        for r in 0..=6 {
            let u = crate::words::TypeString::new(vec![crate::words::Sign::Plus; r]);
            for x in enumerate_words(r, 3, Some(&u), None) {
                for c in grow(&x, 3).unwrap().iter_cells() {
                    if !matches!(c.fill, Fill::Letter(_) | Fill::Empty) {
                        let (sw, se) = c.outputs();
                        classes.insert([c.x, c.y, sw, se].map(reduce));
                    }
                }
            }
        }
        assert_eq!(classes.len(), 9);
        let inputs: std::collections::BTreeSet<_> = classes.iter().map(|k| (k[0], k[1])).collect();
        assert_eq!(inputs.len(), 9);
    }

    #[test]
    fn mutation_regrows_below() {
        let d = grow(&w("12"), 2).unwrap();
        let m = d.mutations();
        assert!(!m.is_empty());
        for (i, j, f) in m {
            let e = d.with_fill(i, j, f).unwrap();
            e.validate().unwrap();
            assert_ne!(e, d);
        }
        assert!(d.with_fill(0, 0, Fill::Parallel).is_err());
    }

    #[test]
    fn invariant_and_highest_weight_flags() {
        let d = grow(&w("2'2"), 2).unwrap();
        assert!(d.is_invariant());
        let d = grow(&w("1'1"), 2).unwrap();
        assert!(!d.is_invariant());
        let d = grow(&w("12"), 2).unwrap();
        assert!(d.is_highest_weight());
        assert!(!d.is_invariant());
    }
}
