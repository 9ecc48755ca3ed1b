//! Wave graphs: a word over `{1..n}` read as `n - 1` bracket words (pages), bound into a book
//! along a common spine, and the closed wave graphs that biject with rectangular standard
//! tableaux.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::words::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WaveError {
    #[error("letter {0} is barred or exceeds the rank")]
    Letter(Letter),
    #[error("pages have different lengths")]
    LengthMismatch,
    #[error("{0} points exceed the enumeration limit of 12")]
    TooLarge(usize),
}

/// Page `index` of a word: `j` becomes 1 if `j = index`, 2 if `j = index + 1`, 0 otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Page {
    pub index: usize,
    pub word: Vec<u8>,
}

impl std::fmt::Display for Page {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.word {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

pub fn pages_of(w: &Word, n: usize) -> Result<Vec<Page>, WaveError> {
    if let Some(l) = w.letters.iter().find(|l| l.barred || l.value as usize > n || l.value == 0) {
        return Err(WaveError::Letter(*l));
    }
    Ok((1..n)
        .map(|i| Page {
            index: i,
            word: w
                .letters
                .iter()
                .map(|l| match l.value as usize {
                    v if v == i => 1,
                    v if v == i + 1 => 2,
                    _ => 0,
                })
                .collect(),
        })
        .collect())
}

/// Recovers the word of length `len` over `{1..n}` from its pages.
pub fn reconstruct(pages: &[Page], n: usize, len: usize) -> Result<Word, WaveError> {
    if pages.iter().any(|p| p.word.len() != len) {
        return Err(WaveError::LengthMismatch);
    }
    let letters = (0..len)
        .map(|pos| {
            pages
                .iter()
                .find_map(|p| match p.word[pos] {
                    1 => Some(p.index as u32),
                    2 => Some(p.index as u32 + 1),
                    _ => None,
                })
                .unwrap_or(if n == 1 { 1 } else { 0 })
        })
        .map(Letter::plain)
        .collect();
    Ok(Word::new(letters))
}

/// An arc on a page between two spine points (0-based positions).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub page: usize,
    pub left: usize,
    pub right: usize,
}

/// An arc with only one end on the spine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfArc {
    pub page: usize,
    pub pos: usize,
    /// True for an unmatched 1, false for an unmatched 2.
    pub opening: bool,
}

/// Superimposed pages sharing the spine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Book {
    pub len: usize,
    pub arcs: Vec<Arc>,
    pub open: Vec<HalfArc>,
}

/// Bracket matching on one page: 1 opens, 2 closes, 0 is skipped.
fn page_arcs(p: &Page) -> (Vec<Arc>, Vec<HalfArc>) {
    let mut stack = Vec::new();
    let mut arcs = Vec::new();
    let mut open = Vec::new();
    for (pos, &c) in p.word.iter().enumerate() {
        match c {
            1 => stack.push(pos),
            2 => match stack.pop() {
                Some(left) => arcs.push(Arc { page: p.index, left, right: pos }),
                None => open.push(HalfArc { page: p.index, pos, opening: false }),
            },
            _ => {}
        }
    }
    open.extend(stack.into_iter().map(|pos| HalfArc { page: p.index, pos, opening: true }));
    (arcs, open)
}

pub fn bind_book(pages: &[Page]) -> Result<Book, WaveError> {
    let len = pages.first().map_or(0, |p| p.word.len());
    if pages.iter().any(|p| p.word.len() != len) {
        return Err(WaveError::LengthMismatch);
    }
    let mut arcs = Vec::new();
    let mut open = Vec::new();
    for p in pages {
        let (a, o) = page_arcs(p);
        arcs.extend(a);
        open.extend(o);
    }
    arcs.sort();
    open.sort();
    Ok(Book { len, arcs, open })
}

impl Book {
    /// Pages of the arcs and half arcs ending at each spine point.
    pub fn endpoints(&self) -> Vec<Vec<usize>> {
        let mut at = vec![Vec::new(); self.len];
        for a in &self.arcs {
            at[a.left].push(a.page);
            at[a.right].push(a.page);
        }
        for h in &self.open {
            at[h.pos].push(h.page);
        }
        at.iter_mut().for_each(|v| v.sort_unstable());
        at
    }

    /// Every spine point ends one arc, or two arcs on adjacent pages.
    pub fn degree_rule_holds(&self) -> bool {
        self.endpoints().iter().all(|p| match p.as_slice() {
            [_] => true,
            [a, b] => b == &(a + 1),
            _ => false,
        })
    }

    /// Arcs as pairs of spine points, across all pages.
    pub fn arc_positions(&self) -> BTreeSet<(usize, usize)> {
        self.arcs.iter().map(|a| (a.left, a.right)).collect()
    }
}

/// A partition of `{1..total}` into blocks of equal size, each sorted; blocks ordered by
/// their least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClosedWaveGraph {
    pub total: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl ClosedWaveGraph {
    /// The word whose letter at a point is the point's rank inside its block.
    pub fn word(&self) -> Word {
        let mut letters = vec![Letter::plain(1); self.total];
        for b in &self.blocks {
            for (a, &p) in b.iter().enumerate() {
                letters[p - 1] = Letter::plain(a as u32 + 1);
            }
        }
        Word::new(letters)
    }
}

impl std::fmt::Display for ClosedWaveGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let blocks: Vec<String> =
            self.blocks.iter().map(|b| format!("{{{}}}", b.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","))).collect();
        write!(f, "{}", blocks.join(" "))
    }
}

/// The closed wave graph of `w`, if every arc on every page joins two spine points.
pub fn closed_wave_of(w: &Word, n: usize) -> Result<Option<ClosedWaveGraph>, WaveError> {
    let pages = pages_of(w, n)?;
    let book = bind_book(&pages)?;
    if !book.open.is_empty() {
        return Ok(None);
    }
    if n == 1 {
        let blocks = (1..=w.len()).map(|p| vec![p]).collect();
        return Ok(Some(ClosedWaveGraph { total: w.len(), blocks }));
    }
    let mut partner = vec![vec![None; w.len()]; n];
    for a in &book.arcs {
        partner[a.page][a.left] = Some(a.right);
    }
    let mut blocks = Vec::new();
    for (start, l) in w.letters.iter().enumerate() {
        if l.value != 1 {
            continue;
        }
        let mut block = vec![start + 1];
        let mut pos = start;
        for links in &partner[1..n] {
            match links[pos] {
                Some(next) => {
                    pos = next;
                    block.push(pos + 1);
                }
                None => return Ok(None),
            }
        }
        blocks.push(block);
    }
    Ok(Some(ClosedWaveGraph { total: w.len(), blocks }))
}

/// True when some two blocks `r != s` and some level `a` have
/// `r[a] < s[a] < r[a+1] < s[a+1]`.
pub fn interleaves(blocks: &[Vec<usize>]) -> bool {
    for r in blocks {
        for s in blocks {
            if r == s {
                continue;
            }
            for a in 0..r.len().min(s.len()).saturating_sub(1) {
                if r[a] < s[a] && s[a] < r[a + 1] && r[a + 1] < s[a + 1] {
                    return true;
                }
            }
        }
    }
    false
}

/// All closed wave graphs with `k` blocks of size `n`, by brute force over set partitions.
pub fn enumerate_closed(n: usize, k: usize) -> Result<Vec<ClosedWaveGraph>, WaveError> {
    let total = n * k;
    if total > 12 {
        return Err(WaveError::TooLarge(total));
    }
    fn go(free: &mut Vec<usize>, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if free.is_empty() {
            out.push(blocks.clone());
            return;
        }
        // The least free point opens the next block.
        let first = free.remove(0);
        let rest = free.clone();
        for pick in combinations(&rest, n - 1) {
            let mut block = vec![first];
            block.extend(&pick);
            let mut remaining: Vec<usize> = rest.iter().copied().filter(|p| !pick.contains(p)).collect();
            blocks.push(block);
            go(&mut remaining, n, blocks, out);
            blocks.pop();
        }
        free.insert(0, first);
    }
    let mut all = Vec::new();
    if n > 0 {
        go(&mut (1..=total).collect(), n, &mut Vec::new(), &mut all);
    } else {
        all.push(Vec::new());
    }
    Ok(all.into_iter().filter(|b| !interleaves(b)).map(|blocks| ClosedWaveGraph { total, blocks }).collect())
}

fn combinations(items: &[usize], m: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return vec![Vec::new()];
    }
    if items.len() < m {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 0..=items.len() - m {
        for mut tail in combinations(&items[i + 1..], m - 1) {
            tail.insert(0, items[i]);
            out.push(tail);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::hook_length_count;
    use crate::growth::grow;
    use crate::words::{enumerate_words, TypeString};
    use num_bigint::BigUint;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn pages(s: &str, n: usize) -> Vec<String> {
        pages_of(&w(s), n).unwrap().iter().map(Page::to_string).collect()
    }

    #[test]
    fn page_examples() {
        assert_eq!(pages("112233", 3), vec!["112200", "001122"]);
        assert_eq!(pages("123123", 3), vec!["120120", "012012"]);
        assert!(pages_of(&w("1'"), 3).is_err());
        assert!(pages_of(&w("4"), 3).is_err());
    }

    #[test]
    fn pages_recover_the_word() {
        for n in 1..=4 {
            for len in 0..=(if n > 2 { 6 } else { 8 }) {
                let plus = TypeString::new(vec![crate::words::Sign::Plus; len]);
                for x in enumerate_words(len, n, Some(&plus), None) {
                    assert_eq!(reconstruct(&pages_of(&x, n).unwrap(), n, len).unwrap(), x);
                }
            }
        }
    }

    fn set(b: &[&[usize]]) -> Vec<Vec<usize>> {
        b.iter().map(|v| v.to_vec()).collect()
    }

    #[test]
    fn worked_table() {
        let table: [(&str, Vec<Vec<usize>>); 5] = [
            ("112233", set(&[&[1, 4, 5], &[2, 3, 6]])),
            ("112323", set(&[&[1, 5, 6], &[2, 3, 4]])),
            ("121233", set(&[&[1, 2, 6], &[3, 4, 5]])),
            ("121323", set(&[&[1, 2, 4], &[3, 5, 6]])),
            ("123123", set(&[&[1, 2, 3], &[4, 5, 6]])),
        ];
        for (word, blocks) in &table {
            let g = closed_wave_of(&w(word), 3).unwrap().unwrap();
            assert_eq!(&g.blocks, blocks, "{word}");
            assert_eq!(g.word(), w(word));
        }
        let all = enumerate_closed(3, 2).unwrap();
        assert_eq!(all.len(), 5);
        let mut from_table: Vec<_> = table.iter().map(|(_, b)| b.clone()).collect();
        from_table.sort();
        let mut enumerated: Vec<_> = all.into_iter().map(|g| g.blocks).collect();
        enumerated.sort();
        assert_eq!(enumerated, from_table);
    }

    #[test]
    fn counts_match_hook_lengths() {
        for (n, k) in [(3, 2), (3, 3), (2, 4), (4, 2), (1, 5), (2, 1), (3, 1)] {
            let all = enumerate_closed(n, k).unwrap();
            assert_eq!(BigUint::from(all.len()), hook_length_count(&vec![k; n]), "n={n} k={k}");
            assert!(all.iter().all(|g| !interleaves(&g.blocks)));
            for g in &all {
                assert_eq!(closed_wave_of(&g.word(), n).unwrap().as_ref(), Some(g));
            }
        }
        assert!(enumerate_closed(4, 4).is_err());
    }

    #[test]
    fn open_arcs_give_nothing() {
        assert_eq!(closed_wave_of(&w("11223"), 3).unwrap(), None);
        assert_eq!(closed_wave_of(&w("1122"), 3).unwrap(), None);
        assert!(closed_wave_of(&w("1122"), 2).unwrap().is_some());
    }

    #[test]
    fn book_structure() {
        for word in ["112233", "121323", "123123", "1122", "1213"] {
            let book = bind_book(&pages_of(&w(word), 3).unwrap()).unwrap();
            assert!(book.degree_rule_holds(), "{word}");
        }
        // A single page is the bracket matching itself.
        let book = bind_book(&pages_of(&w("112212"), 2).unwrap()).unwrap();
        assert_eq!(book.arc_positions(), [(0, 3), (1, 2), (4, 5)].into_iter().collect());
        assert!(bind_book(&[Page { index: 1, word: vec![1] }, Page { index: 2, word: vec![] }]).is_err());
    }

    #[test]
    fn arcs_match_growth_cups() {
        for x in enumerate_words(6, 3, None, Some(&"2,2,2".parse().unwrap())) {
            let book = bind_book(&pages_of(&x, 3).unwrap()).unwrap();
            let cups: BTreeSet<(usize, usize)> = grow(&x, 3).unwrap().cup_positions().into_iter().collect();
            if closed_wave_of(&x, 3).unwrap().is_some() {
                assert_eq!(cups, book.arc_positions(), "{x}");
            }
        }
    }
}
