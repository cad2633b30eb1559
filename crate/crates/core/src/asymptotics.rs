//! Periodic points, limit periodic points of tails and the limit sets of
//! eventually periodic points under the shift.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::sft::{Point, Symbol, TransitionMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsymptoticsError {
    #[error("horizon {horizon} is too small; it must exceed {required}")]
    HorizonTooSmall { horizon: u64, required: u64 },
}

/// All points fixed by `sigma^p`, one per admissible cycle of length `p`
/// read from index 0.
pub fn enumerate_periodic(matrix: &TransitionMatrix, p: usize) -> BTreeSet<Point> {
    assert!(p >= 1, "period must be positive");
    let mut out = BTreeSet::new();
    let mut word: Vec<Symbol> = Vec::with_capacity(p);
    for s in matrix.symbols() {
        word.push(s);
        extend_cycles(matrix, p, &mut word, &mut out);
        word.pop();
    }
    out
}

fn extend_cycles(matrix: &TransitionMatrix, p: usize, word: &mut Vec<Symbol>, out: &mut BTreeSet<Point>) {
    let last = *word.last().unwrap();
    if word.len() == p {
        if matrix.allows(last, word[0]) {
            out.insert(Point::periodic(word).expect("symbols are positive"));
        }
        return;
    }
    for s in matrix.successors(last) {
        word.push(s);
        extend_cycles(matrix, p, word, out);
        word.pop();
    }
}

/// All periodic points with least period at most `max_period`.
pub fn periodic_points_up_to(matrix: &TransitionMatrix, max_period: usize) -> BTreeSet<Point> {
    (1..=max_period).flat_map(|p| enumerate_periodic(matrix, p)).collect()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// The periodic point that `x` converges to in forward time.
pub fn eta_s(x: &Point) -> Point {
    let v = x.right_tail().to_vec();
    Point::new(v.clone(), Vec::new(), x.right_start(), v).expect("tails are valid words")
}

/// The periodic point that `x` converges to in backward time.
pub fn eta_u(x: &Point) -> Point {
    let u = x.left_tail().to_vec();
    Point::new(u.clone(), Vec::new(), x.offset(), u).expect("tails are valid words")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitData {
    #[serde(serialize_with = "crate::serialize_display")]
    pub eta_s: Point,
    pub p_s: u64,
    #[serde(serialize_with = "crate::serialize_display")]
    pub eta_u: Point,
    pub p_u: u64,
    pub least_asymptotic_period: u64,
}

pub fn limit_data(x: &Point) -> LimitData {
    let p_s = x.right_tail().len() as u64;
    let p_u = x.left_tail().len() as u64;
    LimitData {
        eta_s: eta_s(x),
        p_s,
        eta_u: eta_u(x),
        p_u,
        least_asymptotic_period: lcm(p_s, p_u),
    }
}

/// Least `p > 0` with `(sigma^p x, x)` asymptotic.
pub fn least_asymptotic_period(x: &Point) -> u64 {
    lcm(x.right_tail().len() as u64, x.left_tail().len() as u64)
}

fn orbit(x: &Point, len: u64) -> BTreeSet<Point> {
    (0..len as i64).map(|j| x.shift(j)).collect()
}

pub fn omega_limit(x: &Point) -> BTreeSet<Point> {
    orbit(&eta_s(x), x.right_tail().len() as u64)
}

pub fn alpha_limit(x: &Point) -> BTreeSet<Point> {
    orbit(&eta_u(x), x.left_tail().len() as u64)
}

fn required_horizon(x: &Point) -> u64 {
    let span = x.offset().unsigned_abs().max(x.right_start().unsigned_abs());
    2 * span + 4 * least_asymptotic_period(x)
}

/// Nearest periodic point, among those of period at most the longer tail
/// length, to each of `sigma^n x` for `n` in `[horizon/2, horizon]`.
pub fn brute_force_omega(
    matrix: &TransitionMatrix,
    x: &Point,
    horizon: u64,
) -> Result<BTreeSet<Point>, AsymptoticsError> {
    brute_force_limit(matrix, x, horizon, 1)
}

/// Backward-time counterpart of [`brute_force_omega`].
pub fn brute_force_alpha(
    matrix: &TransitionMatrix,
    x: &Point,
    horizon: u64,
) -> Result<BTreeSet<Point>, AsymptoticsError> {
    brute_force_limit(matrix, x, horizon, -1)
}

fn brute_force_limit(
    matrix: &TransitionMatrix,
    x: &Point,
    horizon: u64,
    sign: i64,
) -> Result<BTreeSet<Point>, AsymptoticsError> {
    let required = required_horizon(x);
    if horizon <= required {
        return Err(AsymptoticsError::HorizonTooSmall { horizon, required });
    }
    let max_period = x.left_tail().len().max(x.right_tail().len());
    let candidates = periodic_points_up_to(matrix, max_period);
    let mut limit = BTreeSet::new();
    for n in horizon / 2..=horizon {
        let y = x.shift(sign * n as i64);
        let nearest = candidates
            .iter()
            .max_by_key(|c| c.agreement_radius(&y).unwrap_or(u64::MAX))
            .expect("every matrix has periodic points");
        limit.insert(nearest.clone());
    }
    Ok(limit)
}

/// The four characterisations of recurrence for an eventually periodic point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RecurrenceReport {
    pub in_limit_union: bool,
    pub periodic: bool,
    pub limits_are_orbit: bool,
    pub recurrent: bool,
}

impl RecurrenceReport {
    pub fn consistent(&self) -> bool {
        let v = [self.in_limit_union, self.periodic, self.limits_are_orbit];
        v.iter().all(|&b| b == self.recurrent)
    }
}

pub fn classify_recurrent(x: &Point) -> RecurrenceReport {
    let omega = omega_limit(x);
    let alpha = alpha_limit(x);
    let own_orbit = orbit(x, x.right_tail().len() as u64);
    RecurrenceReport {
        in_limit_union: omega.contains(x) || alpha.contains(x),
        periodic: (1..=x.right_tail().len() as i64).any(|p| x.shift(p) == *x),
        limits_are_orbit: omega == alpha && omega == own_orbit,
        recurrent: omega.contains(x) && alpha.contains(x),
    }
}
