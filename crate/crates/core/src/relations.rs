//! Stable, unstable and asymptotic equivalence with exact levels, and the
//! groupoid of triples `(x, n, z)` with `(phi^n x, z)` asymptotic.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::sft::{Direction, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("({x}, {z}) is not an asymptotic pair")]
    NotAsymptotic { x: String, z: String },
    #[error("source {source_point} differs from range {range}")]
    NotComposable { source_point: String, range: String },
    #[error("elements live over different dynamics")]
    DirectionMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Stable,
    Unstable,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LevelWitness {
    pub kind: RelationKind,
    pub level: u64,
}

/// Least `n >= 0` with `x_i = z_i` for all `i >= n`.
pub fn stable_level(x: &Point, z: &Point) -> Option<u64> {
    let settled = x.right_start().max(z.right_start());
    if x.first_difference_from(z, settled).is_some() {
        return None;
    }
    Some(match x.last_difference_before(z, settled) {
        Some(d) => (d + 1).max(0) as u64,
        None => 0,
    })
}

/// Least `n >= 0` with `x_i = z_i` for all `i <= -n`.
pub fn unstable_level(x: &Point, z: &Point) -> Option<u64> {
    let settled = x.offset().min(z.offset());
    if x.last_difference_before(z, settled).is_some() {
        return None;
    }
    Some(match x.first_difference_from(z, settled) {
        Some(e) => (1 - e).max(0) as u64,
        None => 0,
    })
}

pub fn asymptotic_level(x: &Point, z: &Point) -> Option<u64> {
    Some(stable_level(x, z)?.max(unstable_level(x, z)?))
}

pub fn witness(kind: RelationKind, x: &Point, z: &Point) -> Option<LevelWitness> {
    let level = match kind {
        RelationKind::Stable => stable_level(x, z),
        RelationKind::Unstable => unstable_level(x, z),
        RelationKind::Asymptotic => asymptotic_level(x, z),
    }?;
    Some(LevelWitness { kind, level })
}

/// A pair in `G^a` with its minimal level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AsymptoticPair {
    x: Point,
    z: Point,
    level: u64,
}

impl AsymptoticPair {
    pub fn new(x: Point, z: Point) -> Result<Self, RelationError> {
        match asymptotic_level(&x, &z) {
            Some(level) => Ok(AsymptoticPair { x, z, level }),
            None => Err(RelationError::NotAsymptotic {
                x: x.to_string(),
                z: z.to_string(),
            }),
        }
    }

    pub fn diagonal(x: Point) -> Self {
        AsymptoticPair {
            z: x.clone(),
            x,
            level: 0,
        }
    }

    pub fn x(&self) -> &Point {
        &self.x
    }

    pub fn z(&self) -> &Point {
        &self.z
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn swap(&self) -> Self {
        AsymptoticPair {
            x: self.z.clone(),
            z: self.x.clone(),
            level: self.level,
        }
    }

    /// `(sigma^n x, sigma^n z)`.
    pub fn shift(&self, n: i64) -> Self {
        let (x, z) = (self.x.shift(n), self.z.shift(n));
        let level = asymptotic_level(&x, &z).expect("shifts of asymptotic pairs stay asymptotic");
        AsymptoticPair { x, z, level }
    }
}

impl fmt::Display for AsymptoticPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {})", self.x, self.z)
    }
}

/// An element `(x, n, z)` of `G^a x| Z` for the dynamics `phi = sigma^sign`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupoidElement {
    range: Point,
    n: i64,
    source: Point,
    direction: Direction,
    level: u64,
}

impl GroupoidElement {
    pub fn new(x: Point, n: i64, z: Point) -> Result<Self, RelationError> {
        Self::with_direction(Direction::Forward, x, n, z)
    }

    pub fn with_direction(direction: Direction, x: Point, n: i64, z: Point) -> Result<Self, RelationError> {
        let moved = direction.step(&x, n);
        match asymptotic_level(&moved, &z) {
            Some(level) => Ok(GroupoidElement {
                range: x,
                n,
                source: z,
                direction,
                level,
            }),
            None => Err(RelationError::NotAsymptotic {
                x: moved.to_string(),
                z: z.to_string(),
            }),
        }
    }

    pub fn unit(direction: Direction, x: Point) -> Self {
        GroupoidElement {
            source: x.clone(),
            range: x,
            n: 0,
            direction,
            level: 0,
        }
    }

    pub fn range(&self) -> &Point {
        &self.range
    }

    pub fn source(&self) -> &Point {
        &self.source
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Minimal level of the pair `(phi^n x, z)`.
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn is_unit(&self) -> bool {
        self.n == 0 && self.range == self.source
    }

    /// `(x, n, y)(y, m, w) = (x, n + m, w)`.
    pub fn compose(&self, other: &GroupoidElement) -> Result<Self, RelationError> {
        if self.direction != other.direction {
            return Err(RelationError::DirectionMismatch);
        }
        if self.source != other.range {
            return Err(RelationError::NotComposable {
                source_point: self.source.to_string(),
                range: other.range.to_string(),
            });
        }
        Self::with_direction(
            self.direction,
            self.range.clone(),
            self.n + other.n,
            other.source.clone(),
        )
    }

    pub fn inverse(&self) -> Self {
        Self::with_direction(self.direction, self.source.clone(), -self.n, self.range.clone())
            .expect("inverse of a groupoid element is an element")
    }

    /// `gamma(x, n, y) = ((x, phi^-n y), n)`.
    pub fn gamma(&self) -> (AsymptoticPair, i64) {
        let back = self.direction.step(&self.source, -self.n);
        let pair = AsymptoticPair::new(self.range.clone(), back).expect("gamma lands in G^a");
        (pair, self.n)
    }

    pub fn from_gamma(direction: Direction, pair: &AsymptoticPair, n: i64) -> Result<Self, RelationError> {
        Self::with_direction(direction, pair.x.clone(), n, direction.step(&pair.z, n))
    }

    /// The canonical homomorphism to `Z`.
    pub fn d_hom(&self) -> i64 {
        self.n
    }
}

impl fmt::Display for GroupoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.range, self.n, self.source)
    }
}
