//! Two-sided topological Markov shifts and their eventually periodic points.

mod matrix;
mod point;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::Serialize;
use thiserror::Error;

pub use matrix::{MatrixError, TransitionMatrix};
pub use point::{Point, PointError};

pub type Symbol = u16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SftError {
    #[error("bracket undefined: x_0 = {left} but z_0 = {right}")]
    BracketUndefined { left: Symbol, right: Symbol },
    #[error("lambda0 must lie strictly between 0 and 1, got {0}")]
    LambdaOutOfRange(String),
}

/// Metric constants of the shift viewed as a Smale space.
///
/// The bracket radius is fixed so that `[x, z]` is defined exactly when
/// `x_0 = z_0`, which for `d(x, z) = lambda0^k` means `d(x, z) < 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmaleConstants {
    lambda0: BigRational,
}

impl SmaleConstants {
    pub fn new(lambda0: BigRational) -> Result<Self, SftError> {
        if lambda0 <= BigRational::zero() || lambda0 >= BigRational::one() {
            return Err(SftError::LambdaOutOfRange(lambda0.to_string()));
        }
        Ok(SmaleConstants { lambda0 })
    }

    pub fn lambda0(&self) -> &BigRational {
        &self.lambda0
    }

    /// Distances strictly below this value have a defined bracket.
    pub fn bracket_radius(&self) -> BigRational {
        BigRational::one()
    }
}

impl Default for SmaleConstants {
    fn default() -> Self {
        SmaleConstants {
            lambda0: BigRational::new(BigInt::from(1), BigInt::from(2)),
        }
    }
}

/// `lambda0^k` where `k` is the least `|i|` with `x_i != z_i`.
pub fn metric(x: &Point, z: &Point, constants: &SmaleConstants) -> BigRational {
    match x.agreement_radius(z) {
        None => BigRational::zero(),
        Some(k) => Pow::pow(constants.lambda0.clone(), k as u32),
    }
}

/// The point with the past of `x` (indices `<= 0`) and the future of `z`
/// (indices `>= 0`).
pub fn bracket(x: &Point, z: &Point) -> Result<Point, SftError> {
    let (a, b) = (x.coord(0), z.coord(0));
    if a != b {
        return Err(SftError::BracketUndefined { left: a, right: b });
    }
    Ok(x.splice(z, 1))
}

/// Whether the dynamics on a shift space is `sigma` or `sigma^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    pub fn sign(self) -> i64 {
        match self {
            Direction::Forward => 1,
            Direction::Inverse => -1,
        }
    }

    /// `phi^n(x)` for `phi = sigma^sign`.
    pub fn step(self, x: &Point, n: i64) -> Point {
        x.shift(self.sign() * n)
    }
}

/// A shift space together with the homeomorphism generating its dynamics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftSystem {
    pub matrix: TransitionMatrix,
    pub direction: Direction,
}

impl ShiftSystem {
    pub fn new(matrix: TransitionMatrix, direction: Direction) -> Self {
        ShiftSystem { matrix, direction }
    }

    pub fn forward(matrix: TransitionMatrix) -> Self {
        Self::new(matrix, Direction::Forward)
    }

    pub fn step(&self, x: &Point, n: i64) -> Point {
        self.direction.step(x, n)
    }
}
