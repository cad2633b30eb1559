use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::{Symbol, TransitionMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointError {
    #[error("{0} tail must be non-empty")]
    EmptyTail(&'static str),
    #[error("symbol 0 is not allowed; symbols start at 1")]
    ZeroSymbol,
    #[error("malformed point literal: {0}")]
    Parse(String),
    #[error("point {point} leaves the shift space at the transition {index} -> {}", index + 1)]
    Inadmissible { point: String, index: i64 },
}

/// An eventually periodic bi-infinite sequence.
///
/// Stored as a left tail `u`, a center word `w` starting at `offset`, and a
/// right tail `v`:
///
/// ```text
/// x_i = u[(i - l) mod |u|]          for i < l
/// x_i = w[i - l]                    for l <= i < l + |w|
/// x_i = v[(i - l - |w|) mod |v|]    for i >= l + |w|
/// ```
///
/// The representation is canonical, so structural equality is sequence
/// equality. Tails are primitive, the center is as short as possible with
/// the right tail absorbing first, and a periodic sequence has an empty
/// center, `offset == 0` and `u == v` with `x_0 = v[0]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    left: Vec<Symbol>,
    center: Vec<Symbol>,
    offset: i64,
    right: Vec<Symbol>,
}

impl Point {
    pub fn new(left: Vec<Symbol>, center: Vec<Symbol>, offset: i64, right: Vec<Symbol>) -> Result<Self, PointError> {
        if left.is_empty() {
            return Err(PointError::EmptyTail("left"));
        }
        if right.is_empty() {
            return Err(PointError::EmptyTail("right"));
        }
        if left.iter().chain(&center).chain(&right).any(|&s| s == 0) {
            return Err(PointError::ZeroSymbol);
        }
        Ok(Self::assemble(left, center, offset, right))
    }

    /// The periodic point with `x_0 x_1 ... x_{p-1} = word`.
    pub fn periodic(word: &[Symbol]) -> Result<Self, PointError> {
        Self::new(word.to_vec(), Vec::new(), 0, word.to_vec())
    }

    pub fn constant(symbol: Symbol) -> Result<Self, PointError> {
        Self::periodic(&[symbol])
    }

    /// Like [`Point::new`], checking membership in `X_A` as well.
    pub fn new_in(
        matrix: &TransitionMatrix,
        left: Vec<Symbol>,
        center: Vec<Symbol>,
        offset: i64,
        right: Vec<Symbol>,
    ) -> Result<Self, PointError> {
        let x = Self::new(left, center, offset, right)?;
        x.check_in(matrix)?;
        Ok(x)
    }

    pub fn check_in(&self, matrix: &TransitionMatrix) -> Result<(), PointError> {
        if let Some(&s) = self
            .left
            .iter()
            .chain(&self.center)
            .chain(&self.right)
            .find(|&&s| !matrix.contains_symbol(s))
        {
            return Err(PointError::Parse(format!(
                "symbol {s} is outside the alphabet 1..={}",
                matrix.size()
            )));
        }
        match matrix.first_forbidden_seam(self) {
            None => Ok(()),
            Some(index) => Err(PointError::Inadmissible {
                point: self.to_string(),
                index,
            }),
        }
    }

    /// Places `word` at positions `at..at+|word|` and extends it to both sides
    /// by always stepping to the smallest allowed neighbour. `word` must be a
    /// non-empty admissible word.
    pub fn embed(matrix: &TransitionMatrix, word: &[Symbol], at: i64) -> Self {
        assert!(!word.is_empty() && matrix.is_admissible_word(word));
        let first = word[0];
        let last = *word.last().unwrap();
        let (pre, left_cycle) = min_walk(first, |s| matrix.predecessors(s).next().unwrap());
        let (post, right_cycle) = min_walk(last, |s| matrix.successors(s).next().unwrap());
        // `pre` lists x_{at-1}, x_{at-2}, ... down to the start of the cycle.
        let mut center: Vec<Symbol> = pre.iter().rev().copied().collect();
        let offset = at - pre.len() as i64;
        center.extend_from_slice(word);
        center.extend_from_slice(&post);
        let left: Vec<Symbol> = left_cycle.into_iter().rev().collect();
        Self::assemble(left, center, offset, right_cycle)
    }

    pub(crate) fn assemble(left: Vec<Symbol>, center: Vec<Symbol>, offset: i64, right: Vec<Symbol>) -> Self {
        let mut x = Point {
            left: primitive_root(left),
            center,
            offset,
            right: primitive_root(right),
        };
        x.canonicalize();
        x
    }

    fn canonicalize(&mut self) {
        let mut absorbed_right = 0;
        while absorbed_right < self.center.len()
            && self.center[self.center.len() - 1 - absorbed_right] == *self.right.last().unwrap()
        {
            self.right.rotate_right(1);
            absorbed_right += 1;
        }
        self.center.truncate(self.center.len() - absorbed_right);

        let mut absorbed_left = 0;
        while absorbed_left < self.center.len() && self.center[absorbed_left] == self.left[0] {
            self.left.rotate_left(1);
            absorbed_left += 1;
        }
        self.center.drain(..absorbed_left);
        self.offset += absorbed_left as i64;

        if self.center.is_empty() {
            if self.left == self.right {
                let p = self.right.len() as i64;
                self.right.rotate_left((-self.offset).rem_euclid(p) as usize);
                self.left.clone_from(&self.right);
                self.offset = 0;
            } else {
                while self.left.last() == self.right.last() {
                    self.left.rotate_right(1);
                    self.right.rotate_right(1);
                    self.offset -= 1;
                }
            }
        }
    }

    pub fn left_tail(&self) -> &[Symbol] {
        &self.left
    }

    pub fn center(&self) -> &[Symbol] {
        &self.center
    }

    pub fn right_tail(&self) -> &[Symbol] {
        &self.right
    }

    /// First index of the center, or of the right tail when the center is empty.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// First index covered by the right tail.
    pub fn right_start(&self) -> i64 {
        self.offset + self.center.len() as i64
    }

    pub fn coord(&self, i: i64) -> Symbol {
        if i < self.offset {
            let q = self.left.len() as i64;
            self.left[(i - self.offset).rem_euclid(q) as usize]
        } else if i < self.right_start() {
            self.center[(i - self.offset) as usize]
        } else {
            let p = self.right.len() as i64;
            self.right[(i - self.right_start()).rem_euclid(p) as usize]
        }
    }

    /// Symbols at indices `lo..hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<Symbol> {
        (lo..hi).map(|i| self.coord(i)).collect()
    }

    pub fn is_periodic(&self) -> bool {
        self.center.is_empty() && self.offset == 0 && self.left == self.right
    }

    /// Least period of a periodic point.
    pub fn period(&self) -> Option<usize> {
        self.is_periodic().then_some(self.right.len())
    }

    /// `y_i = x_{i+n}`.
    pub fn shift(&self, n: i64) -> Self {
        if self.is_periodic() {
            let p = self.right.len() as i64;
            let mut right = self.right.clone();
            right.rotate_left(n.rem_euclid(p) as usize);
            Point {
                left: right.clone(),
                center: Vec::new(),
                offset: 0,
                right,
            }
        } else {
            Point {
                offset: self.offset - n,
                ..self.clone()
            }
        }
    }

    /// `y_i = x_{-i}`.
    pub fn reverse(&self) -> Self {
        let rev = |w: &[Symbol]| w.iter().rev().copied().collect::<Vec<_>>();
        Self::assemble(
            rev(&self.right),
            rev(&self.center),
            1 - self.right_start(),
            rev(&self.left),
        )
    }

    /// Sequence equal to `self` on indices `< cut` and to `other` on `>= cut`.
    pub fn splice(&self, other: &Point, cut: i64) -> Self {
        let lo = self.offset.min(cut);
        let hi = other.right_start().max(cut);
        let q = self.left.len() as i64;
        let p = other.right.len() as i64;
        let left = self.window(lo - q, lo);
        let right = other.window(hi, hi + p);
        let center = (lo..hi)
            .map(|i| if i < cut { self.coord(i) } else { other.coord(i) })
            .collect();
        Self::assemble(left, center, lo, right)
    }

    /// Index of the first disagreement at or after `start`.
    pub fn first_difference_from(&self, other: &Point, start: i64) -> Option<i64> {
        let settled = start.max(self.right_start()).max(other.right_start());
        let end = settled + (self.right.len() + other.right.len()) as i64;
        (start..end).find(|&i| self.coord(i) != other.coord(i))
    }

    /// Index of the last disagreement strictly before `end`.
    pub fn last_difference_before(&self, other: &Point, end: i64) -> Option<i64> {
        let settled = end.min(self.offset).min(other.offset);
        let start = settled - (self.left.len() + other.left.len()) as i64;
        (start..end).rev().find(|&i| self.coord(i) != other.coord(i))
    }

    /// Least `|i|` with `x_i != z_i`, or `None` when the points coincide.
    pub fn agreement_radius(&self, other: &Point) -> Option<u64> {
        let forward = self.first_difference_from(other, 0).map(|i| i as u64);
        let backward = self.last_difference_before(other, 0).map(|i| (-i) as u64);
        match (forward, backward) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

fn primitive_root(word: Vec<Symbol>) -> Vec<Symbol> {
    let n = word.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (d..n).all(|i| word[i] == word[i - d]) {
            return word[..d].to_vec();
        }
    }
    word
}

/// Follows `step` from `start` until a symbol repeats. Returns the symbols
/// visited before entering the cycle and the cycle itself, both in walk order.
fn min_walk(start: Symbol, step: impl Fn(Symbol) -> Symbol) -> (Vec<Symbol>, Vec<Symbol>) {
    let mut seq = Vec::new();
    let mut s = step(start);
    loop {
        if let Some(pos) = seq.iter().position(|&t| t == s) {
            let cycle = seq.split_off(pos);
            return (seq, cycle);
        }
        seq.push(s);
        s = step(s);
    }
}

fn fmt_word(f: &mut fmt::Formatter<'_>, w: &[Symbol]) -> fmt::Result {
    write!(f, "(")?;
    for (i, s) in w.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{s}")?;
    }
    write!(f, ")")
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "left=")?;
        fmt_word(f, &self.left)?;
        write!(f, " center=")?;
        fmt_word(f, &self.center)?;
        write!(f, "@{} right=", self.offset)?;
        fmt_word(f, &self.right)
    }
}

fn parse_word(text: &str) -> Result<Vec<Symbol>, PointError> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| PointError::Parse(format!("expected a parenthesised word, found `{text}`")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<Symbol>()
                .map_err(|_| PointError::Parse(format!("`{}` is not a symbol", t.trim())))
        })
        .collect()
}

impl FromStr for Point {
    type Err = PointError;

    /// Accepts `left=(u) center=(w)@l right=(v)` or `periodic=(w)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("periodic=") {
            return Point::periodic(&parse_word(rest)?);
        }
        let field = |name: &str| -> Result<&str, PointError> {
            s.split_whitespace()
                .find_map(|tok| tok.strip_prefix(name))
                .ok_or_else(|| PointError::Parse(format!("missing `{name}`")))
        };
        let left = parse_word(field("left=")?)?;
        let right = parse_word(field("right=")?)?;
        let (center, offset) = match field("center=") {
            Ok(c) => {
                let (word, at) = c
                    .split_once('@')
                    .ok_or_else(|| PointError::Parse("center needs an `@offset`".into()))?;
                let at = at
                    .parse::<i64>()
                    .map_err(|_| PointError::Parse(format!("bad offset `{at}`")))?;
                (parse_word(word)?, at)
            }
            Err(_) => (Vec::new(), 0),
        };
        let known = s
            .split_whitespace()
            .all(|tok| ["left=", "center=", "right="].iter().any(|p| tok.starts_with(p)));
        if !known {
            return Err(PointError::Parse(format!("unrecognised field in `{s}`")));
        }
        Point::new(left, center, offset, right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(s: &str) -> Point {
        s.parse().unwrap()
    }

    #[test]
    fn periodic_points_are_normalised() {
        let a = Point::new(vec![1, 2], vec![], 1, vec![1, 2]).unwrap();
        assert!(a.is_periodic());
        assert_eq!(a.coord(0), 2);
        assert_eq!(a, Point::periodic(&[2, 1]).unwrap());
        let b = Point::new(vec![2, 1], vec![2], 0, vec![1, 2]).unwrap();
        assert_eq!(b, Point::periodic(&[2, 1]).unwrap());
        assert_eq!(Point::periodic(&[1, 2, 1, 2]).unwrap().period(), Some(2));
    }

    #[test]
    fn equal_sequences_share_a_representation() {
        let a = Point::new(vec![1], vec![1, 1, 2, 2], -3, vec![2]).unwrap();
        let b = Point::new(vec![1, 1], vec![2], -1, vec![2, 2]).unwrap();
        assert_eq!(a, b);
        for i in -10..10 {
            assert_eq!(a.coord(i), if i < -1 { 1 } else { 2 });
        }
        assert_eq!(a.center(), &[] as &[Symbol]);
        assert_eq!(a.offset(), -1);
    }

    #[test]
    fn shift_and_reverse() {
        let x = pt("left=(1) center=(2,3)@0 right=(1,2)");
        let y = x.shift(3);
        for i in -10..10 {
            assert_eq!(y.coord(i), x.coord(i + 3));
            assert_eq!(x.reverse().coord(i), x.coord(-i));
        }
        assert_eq!(x.reverse().reverse(), x);
        assert_eq!(x.shift(3).shift(-3), x);
    }

    #[test]
    fn splice_takes_past_and_future() {
        let x = pt("periodic=(1)");
        let z = pt("periodic=(2)");
        let y = x.splice(&z, 1);
        for i in -5..6 {
            assert_eq!(y.coord(i), if i < 1 { 1 } else { 2 });
        }
    }

    #[test]
    fn agreement_radius_examples() {
        let x = pt("periodic=(1)");
        let z = Point::new(vec![1], vec![2], 3, vec![1]).unwrap();
        assert_eq!(x.agreement_radius(&z), Some(3));
        assert_eq!(x.agreement_radius(&z.shift(5)), Some(2));
        assert_eq!(x.agreement_radius(&x), None);
    }

    #[test]
    fn embedding_places_the_word() {
        let golden = TransitionMatrix::new(&[vec![1, 1], vec![1, 0]]).unwrap();
        let x = Point::embed(&golden, &[2, 1, 2], -1);
        assert_eq!(x.window(-1, 2), vec![2, 1, 2]);
        assert!(golden.admits(&x));
        let c3 = TransitionMatrix::new(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
        let y = Point::embed(&c3, &[2], 0);
        assert!(y.is_periodic());
        assert_eq!(y, Point::periodic(&[2, 3, 1]).unwrap());
    }

    #[test]
    fn literal_round_trip_and_errors() {
        let x = pt("left=(2,1) center=(1,1,2)@-4 right=(1)");
        assert_eq!(x.to_string().parse::<Point>().unwrap(), x);
        assert!("left=() center=()@0 right=(1)".parse::<Point>().is_err());
        assert!("left=(1) right=(0)".parse::<Point>().is_err());
        assert!("left=(1) center=(2) right=(1)".parse::<Point>().is_err());
        assert!("left=(1) right=(1) bogus=(1)".parse::<Point>().is_err());
    }

    #[test]
    fn membership_check_finds_the_bad_seam() {
        let golden = TransitionMatrix::new(&[vec![1, 1], vec![1, 0]]).unwrap();
        let bad = pt("left=(1) center=(2,2)@4 right=(1)");
        match bad.check_in(&golden) {
            Err(PointError::Inadmissible { index, .. }) => assert_eq!(index, 4),
            other => panic!("unexpected {other:?}"),
        }
    }
}
