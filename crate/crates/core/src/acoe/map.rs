use std::collections::BTreeMap;

use super::AcoeError;
use crate::sft::{Point, Symbol, TransitionMatrix};

/// `y_i = rule(x_{i-m} ... x_{i+a})` from `X_A` into `X_B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlidingBlockCode {
    source: TransitionMatrix,
    target: TransitionMatrix,
    memory: usize,
    anticipation: usize,
    rule: BTreeMap<Vec<Symbol>, Symbol>,
}

impl SlidingBlockCode {
    pub fn new(
        source: TransitionMatrix,
        target: TransitionMatrix,
        memory: usize,
        anticipation: usize,
        rule: BTreeMap<Vec<Symbol>, Symbol>,
    ) -> Result<Self, AcoeError> {
        let len = memory + anticipation + 1;
        for word in source.admissible_words(len) {
            match rule.get(&word) {
                None => return Err(AcoeError::MissingRuleWord { word }),
                Some(&s) if !target.contains_symbol(s) => {
                    return Err(AcoeError::InadmissibleImage(format!(
                        "rule sends {word:?} to {s}, outside the target alphabet"
                    )))
                }
                Some(_) => {}
            }
        }
        for word in source.admissible_words(len + 1) {
            let (a, b) = (rule[&word[..len]], rule[&word[1..]]);
            if !target.allows(a, b) {
                return Err(AcoeError::InadmissibleImage(format!(
                    "rule sends the admissible word {word:?} to the forbidden transition {a} -> {b}"
                )));
            }
        }
        Ok(SlidingBlockCode {
            source,
            target,
            memory,
            anticipation,
            rule,
        })
    }

    /// The `k`-block recoding and its one-symbol inverse.
    pub fn higher_block(matrix: &TransitionMatrix, k: usize) -> (Self, Self) {
        let (block, labels) = matrix.higher_block(k);
        let forward = labels
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as Symbol + 1))
            .collect();
        let backward = labels
            .iter()
            .enumerate()
            .map(|(i, w)| (vec![i as Symbol + 1], w[0]))
            .collect();
        (
            Self::new(matrix.clone(), block.clone(), 0, k - 1, forward).expect("block recoding is valid"),
            Self::new(block, matrix.clone(), 0, 0, backward).expect("block decoding is valid"),
        )
    }

    pub fn source(&self) -> &TransitionMatrix {
        &self.source
    }

    pub fn target(&self) -> &TransitionMatrix {
        &self.target
    }

    pub fn window(&self) -> u64 {
        (self.memory + self.anticipation) as u64
    }

    pub fn apply(&self, x: &Point) -> Result<Point, AcoeError> {
        let (m, a) = (self.memory as i64, self.anticipation as i64);
        let image = |i: i64| -> Result<Symbol, AcoeError> {
            let word = x.window(i - m, i + a + 1);
            self.rule.get(&word).copied().ok_or(AcoeError::MissingRuleWord { word })
        };
        let lo = x.offset() - a;
        let hi = x.right_start() + m;
        let q = x.left_tail().len() as i64;
        let p = x.right_tail().len() as i64;
        let left = (lo - q..lo).map(image).collect::<Result<Vec<_>, _>>()?;
        let center = (lo..hi).map(image).collect::<Result<Vec<_>, _>>()?;
        let right = (hi..hi + p).map(image).collect::<Result<Vec<_>, _>>()?;
        Ok(Point::assemble(left, center, lo, right))
    }
}

/// A homeomorphism between shift spaces with a finite description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointMap {
    Identity,
    Block(SlidingBlockCode),
    /// `y_i = x_{-i}`, from `X_A` onto `X_{A^t}`.
    Reversal,
    /// `y = sigma^k x`.
    Shift(i64),
    /// Exchanges the symbols `a` and `b` at one index. Only built for symbols
    /// with identical neighbourhoods, so it is an involution of `X_A` that
    /// does not commute with the shift.
    SiteSwap {
        site: i64,
        a: Symbol,
        b: Symbol,
    },
    /// `maps[0] o maps[1] o ... o maps[last]`.
    Compose(Vec<PointMap>),
}

impl PointMap {
    pub fn site_swap(matrix: &TransitionMatrix, site: i64, a: Symbol, b: Symbol) -> Result<Self, AcoeError> {
        let twins = matrix.contains_symbol(a)
            && matrix.contains_symbol(b)
            && matrix
                .symbols()
                .all(|s| matrix.allows(s, a) == matrix.allows(s, b) && matrix.allows(a, s) == matrix.allows(b, s));
        if !twins {
            return Err(AcoeError::InadmissibleImage(format!(
                "symbols {a} and {b} do not have the same neighbours"
            )));
        }
        Ok(PointMap::SiteSwap { site, a, b })
    }

    pub fn apply(&self, x: &Point) -> Result<Point, AcoeError> {
        match self {
            PointMap::Identity => Ok(x.clone()),
            PointMap::Block(code) => code.apply(x),
            PointMap::Reversal => Ok(x.reverse()),
            PointMap::Shift(k) => Ok(x.shift(*k)),
            PointMap::SiteSwap { site, a, b } => {
                let s = x.coord(*site);
                let t = if s == *a {
                    *b
                } else if s == *b {
                    *a
                } else {
                    return Ok(x.clone());
                };
                let replacement = Point::new(vec![t], Vec::new(), 0, vec![t]).expect("positive symbol");
                Ok(x.splice(&replacement, *site).splice(x, site + 1))
            }
            PointMap::Compose(maps) => maps.iter().rev().try_fold(x.clone(), |y, f| f.apply(&y)),
        }
    }

    /// Total coding window, or `None` for maps that do not commute with the shift.
    pub fn window(&self) -> Option<u64> {
        match self {
            PointMap::Identity | PointMap::Reversal => Some(0),
            PointMap::Block(code) => Some(code.window()),
            PointMap::Shift(k) => Some(k.unsigned_abs()),
            PointMap::SiteSwap { .. } => None,
            PointMap::Compose(maps) => maps.iter().map(PointMap::window).sum(),
        }
    }

    /// The matrix of the image space given the matrix of the domain.
    pub fn codomain(&self, domain: &TransitionMatrix) -> Result<TransitionMatrix, AcoeError> {
        match self {
            PointMap::Identity | PointMap::Shift(_) | PointMap::SiteSwap { .. } => Ok(domain.clone()),
            PointMap::Reversal => Ok(domain.transpose()),
            PointMap::Block(code) => {
                if code.source() != domain {
                    return Err(AcoeError::MatrixMismatch(
                        "block code source matrix differs from the space it is applied to".into(),
                    ));
                }
                Ok(code.target().clone())
            }
            PointMap::Compose(maps) => maps.iter().rev().try_fold(domain.clone(), |m, f| f.codomain(&m)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> TransitionMatrix {
        TransitionMatrix::new(&[vec![1, 1], vec![1, 0]]).unwrap()
    }

    fn pt(s: &str) -> Point {
        s.parse().unwrap()
    }

    #[test]
    fn higher_block_recodes_coordinatewise() {
        let g = golden();
        let (up, down) = SlidingBlockCode::higher_block(&g, 2);
        let x = pt("left=(1,2) center=(1,1,2)@-2 right=(1)");
        let y = up.apply(&x).unwrap();
        let labels = g.higher_block(2).1;
        for i in -8..8 {
            assert_eq!(labels[y.coord(i) as usize - 1], x.window(i, i + 2));
        }
        assert!(up.target().admits(&y));
        assert_eq!(down.apply(&y).unwrap(), x);
    }

    #[test]
    fn reversal_of_a_period_two_point() {
        let x = pt("periodic=(1,2)");
        let y = PointMap::Reversal.apply(&x).unwrap();
        assert_eq!(y, pt("periodic=(1,2)"));
        assert_eq!(y.coord(1), 2);
        assert_eq!(y.coord(-1), x.coord(1));
    }

    #[test]
    fn rule_validation() {
        let g = golden();
        let flip = BTreeMap::from([(vec![1], 2), (vec![2], 1)]);
        assert!(matches!(
            SlidingBlockCode::new(g.clone(), g.clone(), 0, 0, flip),
            Err(AcoeError::InadmissibleImage(_))
        ));
        let partial = BTreeMap::from([(vec![1], 1)]);
        assert!(matches!(
            SlidingBlockCode::new(g.clone(), g.clone(), 0, 0, partial),
            Err(AcoeError::MissingRuleWord { .. })
        ));
    }

    #[test]
    fn site_swap_is_an_involution() {
        let full = TransitionMatrix::full_shift(2);
        let swap = PointMap::site_swap(&full, 2, 1, 2).unwrap();
        let x = pt("periodic=(1)");
        let y = swap.apply(&x).unwrap();
        assert_eq!(y, pt("left=(1) center=(2)@2 right=(1)"));
        assert_eq!(swap.apply(&y).unwrap(), x);
        assert!(PointMap::site_swap(&golden(), 0, 1, 2).is_err());
        assert_eq!(swap.window(), None);
    }

    #[test]
    fn composition_applies_right_to_left() {
        let f = PointMap::Compose(vec![PointMap::Shift(1), PointMap::Reversal]);
        let x = pt("left=(1) center=(2,2)@3 right=(2,1)");
        assert_eq!(f.apply(&x).unwrap(), x.reverse().shift(1));
        assert_eq!(f.window(), Some(1));
    }
}
