//! Integer-valued locally constant functions, their one-cocycles along an
//! orbit, and two-cocycles on the asymptotic relation given by a potential.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::relations::AsymptoticPair;
use crate::report::CheckReport;
use crate::sft::{Direction, Point, Symbol, TransitionMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CocycleError {
    #[error("table has no entry for the word {}", fmt_word(.word))]
    MissingWord { word: Vec<Symbol> },
    #[error("table entry {} is not an admissible word of length {expected}", fmt_word(.word))]
    UnexpectedWord { word: Vec<Symbol>, expected: usize },
    #[error("({x}, {z}) is not an asymptotic pair")]
    NotAsymptotic { x: String, z: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn fmt_word(word: &[Symbol]) -> String {
    word.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Values {
    Constant(i64),
    Table(Table),
}

const DENSE_LIMIT: u64 = 1 << 16;

/// Word table with a positional index over the alphabet when it is small.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Table {
    words: BTreeMap<Vec<Symbol>, i64>,
    base: u64,
    dense: Vec<Option<i64>>,
}

impl Table {
    fn new(words: BTreeMap<Vec<Symbol>, i64>, alphabet: usize, len: usize) -> Self {
        let base = alphabet as u64;
        let fits = base.checked_pow(len as u32).is_some_and(|n| n <= DENSE_LIMIT);
        let mut dense = Vec::new();
        if fits {
            dense = vec![None; base.pow(len as u32) as usize];
            for (w, &v) in &words {
                dense[Self::index(base, w.iter().copied()).expect("admissible words use the alphabet")] = Some(v);
            }
        }
        Table { words, base, dense }
    }

    fn index(base: u64, word: impl Iterator<Item = Symbol>) -> Option<usize> {
        let mut idx = 0u64;
        for s in word {
            let digit = u64::from(s).checked_sub(1).filter(|&d| d < base)?;
            idx = idx * base + digit;
        }
        Some(idx as usize)
    }

    fn lookup(&self, x: &Point, lo: i64, hi: i64) -> Result<i64, CocycleError> {
        if !self.dense.is_empty() {
            if let Some(v) = Self::index(self.base, (lo..hi).map(|i| x.coord(i))).and_then(|i| self.dense[i]) {
                return Ok(v);
            }
        }
        let word = x.window(lo, hi);
        self.words.get(&word).copied().ok_or(CocycleError::MissingWord { word })
    }
}

/// `f(x) = table[x_{-k} ... x_k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocallyConstantFn {
    radius: usize,
    values: Values,
}

impl LocallyConstantFn {
    pub fn constant(value: i64) -> Self {
        LocallyConstantFn {
            radius: 0,
            values: Values::Constant(value),
        }
    }

    /// Requires an entry for every admissible word of length `2 * radius + 1`
    /// and nothing else.
    pub fn new(
        matrix: &TransitionMatrix,
        radius: usize,
        table: BTreeMap<Vec<Symbol>, i64>,
    ) -> Result<Self, CocycleError> {
        let len = 2 * radius + 1;
        if let Some(word) = table.keys().find(|w| w.len() != len || !matrix.is_admissible_word(w)) {
            return Err(CocycleError::UnexpectedWord {
                word: word.clone(),
                expected: len,
            });
        }
        if let Some(word) = matrix
            .admissible_words(len)
            .into_iter()
            .find(|w| !table.contains_key(w))
        {
            return Err(CocycleError::MissingWord { word });
        }
        Ok(LocallyConstantFn {
            radius,
            values: Values::Table(Table::new(table, matrix.size(), len)),
        })
    }

    /// Tabulates `rule` on all admissible words of length `2 * radius + 1`.
    pub fn from_rule(matrix: &TransitionMatrix, radius: usize, rule: impl Fn(&[Symbol]) -> i64) -> Self {
        let table = matrix
            .admissible_words(2 * radius + 1)
            .into_iter()
            .map(|w| {
                let v = rule(&w);
                (w, v)
            })
            .collect();
        LocallyConstantFn {
            radius,
            values: Values::Table(Table::new(table, matrix.size(), 2 * radius + 1)),
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// The common value when every entry agrees.
    pub fn as_constant(&self) -> Option<i64> {
        match &self.values {
            Values::Constant(v) => Some(*v),
            Values::Table(t) => {
                let mut it = t.words.values();
                let first = *it.next()?;
                it.all(|&v| v == first).then_some(first)
            }
        }
    }

    pub fn max_abs(&self) -> u64 {
        match &self.values {
            Values::Constant(v) => v.unsigned_abs(),
            Values::Table(t) => t.words.values().map(|v| v.unsigned_abs()).max().unwrap_or(0),
        }
    }

    pub fn eval(&self, x: &Point) -> Result<i64, CocycleError> {
        self.eval_at(x, 0)
    }

    /// `f(sigma^i x)`.
    pub fn eval_at(&self, x: &Point, i: i64) -> Result<i64, CocycleError> {
        match &self.values {
            Values::Constant(v) => Ok(*v),
            Values::Table(t) => {
                let r = self.radius as i64;
                t.lookup(x, i - r, i + r + 1)
            }
        }
    }

    /// Table file: the radius on the first line, then `a,b,c -> value` lines.
    pub fn parse(text: &str, matrix: &TransitionMatrix) -> Result<Self, CocycleError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (first, header) = lines.next().ok_or(CocycleError::Parse {
            line: 1,
            message: "empty table".into(),
        })?;
        let radius: usize = header.parse().map_err(|_| CocycleError::Parse {
            line: first,
            message: format!("expected a window radius, found `{header}`"),
        })?;
        let mut table = BTreeMap::new();
        for (line, content) in lines {
            let (word, value) = content.split_once("->").ok_or(CocycleError::Parse {
                line,
                message: format!("expected `word -> value`, found `{content}`"),
            })?;
            let word = word
                .split(',')
                .map(|t| t.trim().parse::<Symbol>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CocycleError::Parse {
                    line,
                    message: format!("bad word `{}`", word.trim()),
                })?;
            let value = value.trim().parse::<i64>().map_err(|_| CocycleError::Parse {
                line,
                message: format!("bad value `{}`", value.trim()),
            })?;
            if table.insert(word, value).is_some() {
                return Err(CocycleError::Parse {
                    line,
                    message: "duplicate word".into(),
                });
            }
        }
        Self::new(matrix, radius, table)
    }

    pub fn to_table_text(&self, matrix: &TransitionMatrix) -> String {
        let mut out = format!("{}\n", self.radius);
        for w in matrix.admissible_words(2 * self.radius + 1) {
            let v = self.eval_word(&w);
            let _ = writeln!(out, "{} -> {v}", fmt_word(&w));
        }
        out
    }

    fn eval_word(&self, word: &[Symbol]) -> i64 {
        match &self.values {
            Values::Constant(v) => *v,
            Values::Table(t) => t.words[word],
        }
    }
}

/// `f^n(x)`: the sum of `f` over `x, phi x, ..., phi^{n-1} x` for `n > 0`,
/// zero for `n = 0` and minus the sum over `phi^n x, ..., phi^{-1} x` for `n < 0`.
pub fn power_sum(f: &LocallyConstantFn, x: &Point, n: i64, direction: Direction) -> Result<i64, CocycleError> {
    if let Values::Constant(v) = f.values {
        return Ok(v * n);
    }
    let s = direction.sign();
    if n >= 0 {
        (0..n).map(|i| f.eval_at(x, s * i)).sum()
    } else {
        (n..0).map(|i| f.eval_at(x, s * i)).sum::<Result<i64, _>>().map(|t| -t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SumKind {
    /// `sum over i >= 0` of `g(phi^i x) - g(phi^i z)`.
    #[default]
    Forward,
    /// `sum over all i in Z` of `g(phi^i x) - g(phi^i z)`.
    Bilateral,
}

/// A two-cocycle on the asymptotic relation obtained by summing the
/// difference of a potential along both orbits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialCocycle {
    potential: LocallyConstantFn,
    sum: SumKind,
}

impl PotentialCocycle {
    pub fn new(potential: LocallyConstantFn, sum: SumKind) -> Self {
        PotentialCocycle { potential, sum }
    }

    pub fn zero() -> Self {
        Self::new(LocallyConstantFn::constant(0), SumKind::Forward)
    }

    pub fn potential(&self) -> &LocallyConstantFn {
        &self.potential
    }

    pub fn sum_kind(&self) -> SumKind {
        self.sum
    }

    /// True when every value is zero, which holds for constant potentials.
    pub fn is_zero(&self) -> bool {
        self.potential.as_constant().is_some()
    }

    pub fn eval(&self, pair: &AsymptoticPair, direction: Direction) -> Result<i64, CocycleError> {
        if self.is_zero() {
            return Ok(0);
        }
        let reach = (pair.level() + self.potential.radius() as u64) as i64;
        let s = direction.sign();
        let indices: Vec<i64> = match self.sum {
            SumKind::Forward => (0..reach).map(|i| s * i).collect(),
            SumKind::Bilateral => (-reach..=reach).collect(),
        };
        let mut total = 0;
        for j in indices {
            total += self.potential.eval_at(pair.x(), j)? - self.potential.eval_at(pair.z(), j)?;
        }
        Ok(total)
    }

    /// Evaluates on `(x, z)`, which must be asymptotic. Zero cocycles accept
    /// any pair.
    pub fn eval_points(&self, x: &Point, z: &Point, direction: Direction) -> Result<i64, CocycleError> {
        if self.is_zero() {
            return Ok(0);
        }
        let pair = AsymptoticPair::new(x.clone(), z.clone()).map_err(|_| CocycleError::NotAsymptotic {
            x: x.to_string(),
            z: z.to_string(),
        })?;
        self.eval(&pair, direction)
    }
}

/// Checks `f_n(x) + f_m(phi^n x) = f_{n+m}(x)` for `|n|, |m| <= bound`.
pub fn check_one_cocycle(
    f_seq: impl Fn(&Point, i64) -> Result<i64, CocycleError>,
    family: &[Point],
    bound: i64,
    direction: Direction,
) -> Result<CheckReport, CocycleError> {
    let mut report = CheckReport::default();
    for x in family {
        for n in -bound..=bound {
            let moved = direction.step(x, n);
            let fn_x = f_seq(x, n)?;
            for m in -bound..=bound {
                let lhs = fn_x + f_seq(&moved, m)?;
                let rhs = f_seq(x, n + m)?;
                report.record(lhs == rhs, || format!("x = {x}, n = {n}, m = {m}: {lhs} != {rhs}"));
            }
        }
    }
    Ok(report)
}

/// Checks `d(x,z) + d(z,w) = d(x,w)` on triples of mutually asymptotic points.
pub fn check_two_cocycle(
    d: &PotentialCocycle,
    triples: &[(Point, Point, Point)],
    direction: Direction,
) -> Result<CheckReport, CocycleError> {
    let mut report = CheckReport::default();
    for (x, z, w) in triples {
        let lhs = d.eval_points(x, z, direction)? + d.eval_points(z, w, direction)?;
        let rhs = d.eval_points(x, w, direction)?;
        report.record(lhs == rhs, || format!("x = {x}, z = {z}, w = {w}: {lhs} != {rhs}"));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormulationCheck {
    pub label: &'static str,
    pub report: CheckReport,
}

/// Outcome of each equivalent form of the compatibility condition between
/// a function `c` and a two-cocycle `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionOneReport {
    pub formulations: Vec<FormulationCheck>,
}

impl ConditionOneReport {
    pub fn passed(&self) -> bool {
        self.formulations.iter().all(|f| f.report.passed())
    }

    /// Some formulations pass while others fail.
    pub fn divergent(&self) -> bool {
        let passes = self.formulations.iter().filter(|f| f.report.passed()).count();
        passes != 0 && passes != self.formulations.len()
    }

    pub fn get(&self, label: &str) -> Option<&CheckReport> {
        self.formulations.iter().find(|f| f.label == label).map(|f| &f.report)
    }
}

pub const SHIFT_RANGE: i64 = 5;

/// Evaluates five equivalent forms of `c(x) + d(phi x, phi z) = c(z) + d(x, z)`.
///
/// * `(i)`: the integer part of the induced groupoid map is multiplicative
///   on `(phi^-n a, n, b)(b, m, phi^m b)` for `|n|, |m| <= 2`.
/// * `(ii)`: the element form with `|n| <= 2`, `|m| <= SHIFT_RANGE`.
/// * `(iii)`: the `m`-step form for `|m| <= SHIFT_RANGE` on the given pairs.
/// * `(iv)`: the one-step form on the pairs and their shifts by `|j| <= SHIFT_RANGE + 1`.
/// * `(v)`: the inverse-step form on the pairs and their shifts by `|j| <= SHIFT_RANGE`.
pub fn check_condition_1(
    c: &LocallyConstantFn,
    d: &PotentialCocycle,
    pairs: &[AsymptoticPair],
    direction: Direction,
) -> Result<ConditionOneReport, CocycleError> {
    let step = |x: &Point, n: i64| direction.step(x, n);
    let cm = |x: &Point, m: i64| power_sum(c, x, m, direction);
    let dv = |x: &Point, z: &Point| d.eval_points(x, z, direction);

    let m_form = |x: &Point, z: &Point, m: i64| -> Result<(i64, i64), CocycleError> {
        Ok((cm(x, m)? + dv(&step(x, m), &step(z, m))?, cm(z, m)? + dv(x, z)?))
    };

    let mut element = CheckReport::default();
    let mut element_form = CheckReport::default();
    let mut m_step = CheckReport::default();
    let mut one_step = CheckReport::default();
    let mut inverse_step = CheckReport::default();

    for pair in pairs {
        let (a, b) = (pair.x(), pair.z());
        for n in -2i64..=2 {
            let x = step(a, -n);
            let first = cm(&x, n)? + dv(a, b)?;
            for m in -2i64..=2 {
                let second = cm(b, m)?;
                let composite = cm(&x, n + m)? + dv(&step(a, m), &step(b, m))?;
                element.record(composite == first + second, || {
                    format!("pair {pair}, n = {n}, m = {m}: {composite} != {}", first + second)
                });
            }
            for m in -SHIFT_RANGE..=SHIFT_RANGE {
                let lhs = cm(a, m)? + dv(&step(&x, m + n), &step(b, m))?;
                let rhs = cm(b, m)? + dv(a, b)?;
                element_form.record(lhs == rhs, || format!("pair {pair}, n = {n}, m = {m}: {lhs} != {rhs}"));
            }
        }
        for m in -SHIFT_RANGE..=SHIFT_RANGE {
            let (lhs, rhs) = m_form(a, b, m)?;
            m_step.record(lhs == rhs, || format!("pair {pair}, m = {m}: {lhs} != {rhs}"));
        }
        for j in -(SHIFT_RANGE + 1)..=(SHIFT_RANGE + 1) {
            let (x, z) = (step(a, j), step(b, j));
            let (lhs, rhs) = m_form(&x, &z, 1)?;
            one_step.record(lhs == rhs, || format!("pair shifted by {j} of {pair}: {lhs} != {rhs}"));
            if j.abs() <= SHIFT_RANGE {
                let (lhs, rhs) = m_form(&x, &z, -1)?;
                inverse_step.record(lhs == rhs, || format!("pair shifted by {j} of {pair}: {lhs} != {rhs}"));
            }
        }
    }

    Ok(ConditionOneReport {
        formulations: vec![
            FormulationCheck {
                label: "(i)",
                report: element,
            },
            FormulationCheck {
                label: "(ii)",
                report: element_form,
            },
            FormulationCheck {
                label: "(iii)",
                report: m_step,
            },
            FormulationCheck {
                label: "(iv)",
                report: one_step,
            },
            FormulationCheck {
                label: "(v)",
                report: inverse_step,
            },
        ],
    })
}
