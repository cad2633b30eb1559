use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use super::{Point, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix has no rows")]
    Empty,
    #[error("row {row} has {found} entries, expected {expected}")]
    NonSquare { row: usize, found: usize, expected: usize },
    #[error("entry ({row},{col}) is {value}, expected 0 or 1")]
    NotBinary { row: usize, col: usize, value: u8 },
    #[error("symbol {symbol} has an empty {kind}; it cannot occur in any bi-infinite sequence")]
    EmptyRowOrColumn { symbol: Symbol, kind: &'static str },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A square 0/1 matrix defining a two-sided topological Markov shift.
///
/// Symbols are `1..=size`. Construction rejects stranded symbols, so every
/// path in the transition graph extends to a bi-infinite admissible sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionMatrix {
    size: usize,
    entries: Vec<bool>,
    irreducible: bool,
    non_permutation: bool,
}

impl TransitionMatrix {
    pub fn new(rows: &[Vec<u8>]) -> Result<Self, MatrixError> {
        let size = rows.len();
        if size == 0 {
            return Err(MatrixError::Empty);
        }
        let mut entries = Vec::with_capacity(size * size);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(MatrixError::NonSquare {
                    row: r + 1,
                    found: row.len(),
                    expected: size,
                });
            }
            for (c, &value) in row.iter().enumerate() {
                match value {
                    0 => entries.push(false),
                    1 => entries.push(true),
                    _ => {
                        return Err(MatrixError::NotBinary {
                            row: r + 1,
                            col: c + 1,
                            value,
                        })
                    }
                }
            }
        }
        for s in 0..size {
            if !(0..size).any(|c| entries[s * size + c]) {
                return Err(MatrixError::EmptyRowOrColumn {
                    symbol: s as Symbol + 1,
                    kind: "row",
                });
            }
            if !(0..size).any(|r| entries[r * size + s]) {
                return Err(MatrixError::EmptyRowOrColumn {
                    symbol: s as Symbol + 1,
                    kind: "column",
                });
            }
        }
        let irreducible = strongly_connected(size, &entries);
        let non_permutation = (0..size).any(|r| (0..size).filter(|&c| entries[r * size + c]).count() >= 2)
            || (0..size).any(|c| (0..size).filter(|&r| entries[r * size + c]).count() >= 2);
        Ok(TransitionMatrix {
            size,
            entries,
            irreducible,
            non_permutation,
        })
    }

    /// The full shift on `n` symbols.
    pub fn full_shift(n: usize) -> Self {
        Self::new(&vec![vec![1; n]; n]).expect("full shift is a valid matrix")
    }

    /// Parses the text format: a line with `N`, then `N` rows of `N`
    /// whitespace-separated bits. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, MatrixError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (first_line, header) = lines.next().ok_or(MatrixError::Empty)?;
        let size: usize = header.parse().map_err(|_| MatrixError::Parse {
            line: first_line,
            message: format!("expected matrix size, found `{header}`"),
        })?;
        if size == 0 {
            return Err(MatrixError::Empty);
        }
        let mut rows = Vec::with_capacity(size);
        for row in 0..size {
            let (line, content) = lines.next().ok_or(MatrixError::Parse {
                line: first_line + row + 1,
                message: format!("missing row {} of {size}", row + 1),
            })?;
            let bits = content
                .split_whitespace()
                .map(|t| t.parse::<u8>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| MatrixError::Parse {
                    line,
                    message: format!("row {} is not a list of bits: `{content}`", row + 1),
                })?;
            if bits.len() != size {
                return Err(MatrixError::Parse {
                    line,
                    message: format!("row {} has {} entries, expected {size}", row + 1, bits.len()),
                });
            }
            rows.push(bits);
        }
        if let Some((line, extra)) = lines.next() {
            return Err(MatrixError::Parse {
                line,
                message: format!("unexpected content after the last row: `{extra}`"),
            });
        }
        Self::new(&rows).map_err(|e| match e {
            MatrixError::NotBinary { row, .. } => MatrixError::Parse {
                line: first_line + row,
                message: e.to_string(),
            },
            other => other,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    pub fn is_non_permutation(&self) -> bool {
        self.non_permutation
    }

    pub fn contains_symbol(&self, s: Symbol) -> bool {
        s >= 1 && (s as usize) <= self.size
    }

    /// `A(a, b) = 1`. Out-of-range symbols are never allowed.
    pub fn allows(&self, a: Symbol, b: Symbol) -> bool {
        self.contains_symbol(a)
            && self.contains_symbol(b)
            && self.entries[(a as usize - 1) * self.size + (b as usize - 1)]
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        1..=self.size as Symbol
    }

    pub fn successors(&self, a: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols().filter(move |&b| self.allows(a, b))
    }

    pub fn predecessors(&self, b: Symbol) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols().filter(move |&a| self.allows(a, b))
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.size)
            .map(|r| (0..self.size).map(|c| self.entries[r * self.size + c] as u8).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let rows = self.rows();
        let t: Vec<Vec<u8>> = (0..self.size).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
        Self::new(&t).expect("transpose of a valid matrix is valid")
    }

    pub fn is_admissible_word(&self, word: &[Symbol]) -> bool {
        word.iter().all(|&s| self.contains_symbol(s)) && word.windows(2).all(|w| self.allows(w[0], w[1]))
    }

    /// All admissible words of the given length in lexicographic order.
    pub fn admissible_words(&self, len: usize) -> Vec<Vec<Symbol>> {
        if len == 0 {
            return vec![Vec::new()];
        }
        let mut words: Vec<Vec<Symbol>> = self.symbols().map(|s| vec![s]).collect();
        for _ in 1..len {
            words = words
                .into_iter()
                .flat_map(|w| {
                    let last = *w.last().unwrap();
                    self.successors(last)
                        .map(|s| {
                            let mut next = w.clone();
                            next.push(s);
                            next
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        words
    }

    /// Number of admissible words of length `len`, without materialising them.
    pub fn count_words(&self, len: usize) -> u128 {
        if len == 0 {
            return 1;
        }
        let mut counts = vec![1u128; self.size];
        for _ in 1..len {
            let mut next = vec![0u128; self.size];
            for (a, &count) in counts.iter().enumerate() {
                for (b, slot) in next.iter_mut().enumerate() {
                    if self.entries[a * self.size + b] {
                        *slot = slot.saturating_add(count);
                    }
                }
            }
            counts = next;
        }
        counts.iter().fold(0u128, |acc, c| acc.saturating_add(*c))
    }

    /// `trace(A^p)` for `p = 1..=max_power` by integer matrix multiplication.
    pub fn power_traces(&self, max_power: usize) -> Vec<u128> {
        let n = self.size;
        let base: Vec<u128> = self.entries.iter().map(|&b| b as u128).collect();
        let mut power = base.clone();
        let mut traces = Vec::with_capacity(max_power);
        for p in 1..=max_power {
            if p > 1 {
                let mut next = vec![0u128; n * n];
                for i in 0..n {
                    for k in 0..n {
                        let a = power[i * n + k];
                        if a == 0 {
                            continue;
                        }
                        for j in 0..n {
                            next[i * n + j] += a * base[k * n + j];
                        }
                    }
                }
                power = next;
            }
            traces.push((0..n).map(|i| power[i * n + i]).sum());
        }
        traces
    }

    /// Intermediate symbols of a shortest path `from -> ... -> to`.
    /// Returns `Some(vec![])` when `A(from, to) = 1`.
    pub fn shortest_path(&self, from: Symbol, to: Symbol) -> Option<Vec<Symbol>> {
        if self.allows(from, to) {
            return Some(Vec::new());
        }
        let mut parent: Vec<Option<Symbol>> = vec![None; self.size + 1];
        let mut queue = VecDeque::new();
        for s in self.successors(from) {
            parent[s as usize] = Some(0);
            queue.push_back(s);
        }
        while let Some(s) = queue.pop_front() {
            if self.allows(s, to) {
                let mut path = vec![s];
                let mut cur = s;
                while let Some(p) = parent[cur as usize] {
                    if p == 0 {
                        break;
                    }
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for t in self.successors(s) {
                if parent[t as usize].is_none() {
                    parent[t as usize] = Some(s);
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Membership of `x` in the shift space: every adjacent pair is allowed.
    pub fn admits(&self, x: &Point) -> bool {
        self.first_forbidden_seam(x).is_none()
    }

    /// Index `i` of the first forbidden transition `x_i -> x_{i+1}` found
    /// while walking the seams of the canonical representation.
    pub fn first_forbidden_seam(&self, x: &Point) -> Option<i64> {
        let (left, right) = (x.left_tail(), x.right_tail());
        let lo = x.offset() - left.len() as i64;
        let hi = x.right_start() + right.len() as i64;
        (lo..hi).find(|&i| !self.allows(x.coord(i), x.coord(i + 1)))
    }

    /// The `k`-block presentation: symbols are the admissible `k`-words in
    /// lexicographic order, with `a -> b` allowed when they overlap in `k-1`
    /// symbols. Returns the matrix together with the word labelling each symbol.
    pub fn higher_block(&self, k: usize) -> (TransitionMatrix, Vec<Vec<Symbol>>) {
        assert!(k >= 1, "block length must be positive");
        let labels = self.admissible_words(k);
        let rows: Vec<Vec<u8>> = labels
            .iter()
            .map(|a| labels.iter().map(|b| (a[1..] == b[..k - 1]) as u8).collect())
            .collect();
        (
            TransitionMatrix::new(&rows).expect("block presentation is valid"),
            labels,
        )
    }
}

fn strongly_connected(n: usize, entries: &[bool]) -> bool {
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                let edge = if forward {
                    entries[v * n + w]
                } else {
                    entries[w * n + v]
                };
                if edge && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.size)?;
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|b| b.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u8]]) -> Result<TransitionMatrix, MatrixError> {
        TransitionMatrix::new(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn flags_on_small_matrices() {
        let full = m(&[&[1, 1], &[1, 1]]).unwrap();
        assert!(full.is_irreducible() && full.is_non_permutation());

        let golden = m(&[&[1, 1], &[1, 0]]).unwrap();
        assert!(golden.is_irreducible() && golden.is_non_permutation());

        let id = m(&[&[1, 0], &[0, 1]]).unwrap();
        assert!(!id.is_irreducible());
        assert!(!id.is_non_permutation());

        let cycle = m(&[&[0, 1], &[1, 0]]).unwrap();
        assert!(cycle.is_irreducible());
        assert!(!cycle.is_non_permutation());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            m(&[&[1, 1], &[1]]),
            Err(MatrixError::NonSquare { row: 2, .. })
        ));
        assert!(matches!(
            m(&[&[1, 1], &[0, 0]]),
            Err(MatrixError::EmptyRowOrColumn { symbol: 2, kind: "row" })
        ));
        assert!(matches!(
            m(&[&[1, 0], &[1, 0]]),
            Err(MatrixError::EmptyRowOrColumn {
                symbol: 2,
                kind: "column"
            })
        ));
        assert!(matches!(m(&[&[1, 2], &[1, 1]]), Err(MatrixError::NotBinary { .. })));
    }

    #[test]
    fn parse_reports_the_offending_row() {
        let err = TransitionMatrix::parse("2\n1 1\n1 x\n").unwrap_err();
        match err {
            MatrixError::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("row 2"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = TransitionMatrix::parse("2\n1 1\n1\n").unwrap_err();
        assert!(err.to_string().contains("row 2"));
        let parsed = TransitionMatrix::parse("# golden mean\n2\n1 1\n1 0\n").unwrap();
        assert_eq!(parsed, m(&[&[1, 1], &[1, 0]]).unwrap());
        assert_eq!(TransitionMatrix::parse(&parsed.to_string()).unwrap(), parsed);
    }

    #[test]
    fn golden_mean_traces_are_lucas_numbers() {
        let golden = m(&[&[1, 1], &[1, 0]]).unwrap();
        assert_eq!(golden.power_traces(6), vec![1, 3, 4, 7, 11, 18]);
        assert_eq!(TransitionMatrix::full_shift(2).power_traces(4), vec![2, 4, 8, 16]);
    }

    #[test]
    fn word_counts_match_enumeration() {
        let golden = m(&[&[1, 1], &[1, 0]]).unwrap();
        for len in 0..8 {
            assert_eq!(golden.admissible_words(len).len() as u128, golden.count_words(len));
        }
    }

    #[test]
    fn two_block_presentation_of_golden_mean() {
        let golden = m(&[&[1, 1], &[1, 0]]).unwrap();
        let (block, labels) = golden.higher_block(2);
        assert_eq!(labels, vec![vec![1, 1], vec![1, 2], vec![2, 1]]);
        assert_eq!(block.rows(), vec![vec![1, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]);
        assert_eq!(block.power_traces(6), golden.power_traces(6));
    }

    #[test]
    fn shortest_paths() {
        let a = m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]).unwrap();
        assert_eq!(a.shortest_path(1, 2), Some(vec![]));
        assert_eq!(a.shortest_path(1, 3), Some(vec![2]));
        assert_eq!(a.shortest_path(1, 1), Some(vec![2, 3]));
    }
}
