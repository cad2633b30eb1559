use std::collections::BTreeSet;

use serde::Serialize;

use crate::asymptotics::periodic_points_up_to;
use crate::relations::AsymptoticPair;
use crate::sft::{Point, TransitionMatrix};

/// Bounds for the finite family a verification runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilyDescriptor {
    /// Disagreement radius `R`: pairs differ only inside `[-R, R]`.
    pub radius: u32,
    /// Tail period bound `Q`.
    pub tails: u32,
    /// Periodic point period bound `P`.
    pub periods: u32,
}

impl Default for FamilyDescriptor {
    fn default() -> Self {
        FamilyDescriptor {
            radius: 6,
            tails: 4,
            periods: 6,
        }
    }
}

/// Upper bound on the number of centred window words embedded as points.
pub const WINDOW_WORD_CAP: u128 = 1024;

/// Longest block of consecutive coordinates changed to form a pair.
pub const SUBSTITUTION_LEN: usize = 2;

#[derive(Debug, Clone)]
pub struct Family {
    pub descriptor: FamilyDescriptor,
    /// All periodic points of period at most `P`.
    pub periodic: Vec<Point>,
    pub points: Vec<Point>,
    pub pairs: Vec<AsymptoticPair>,
    /// Radius of the centred words embedded as points.
    pub window_radius: u32,
}

impl Family {
    /// Points: every periodic point of period `<= P`; for each ordered pair of
    /// periodic points of period `<= Q`, the point with the past of one and
    /// the future of the other joined by a shortest path; and every admissible
    /// centred word of the largest radius `<= R` whose word count stays under
    /// [`WINDOW_WORD_CAP`], extended by minimal walks.
    ///
    /// Pairs: the diagonal, plus every admissible change of a block of at
    /// most [`SUBSTITUTION_LEN`] consecutive coordinates inside `[-R, R]` of a
    /// family point, with both end coordinates of the block changed.
    pub fn build(matrix: &TransitionMatrix, descriptor: FamilyDescriptor) -> Self {
        let periodic = periodic_points_up_to(matrix, descriptor.periods as usize);
        let mut points: BTreeSet<Point> = periodic.clone();

        let tails: Vec<Point> = periodic_points_up_to(matrix, descriptor.tails as usize)
            .into_iter()
            .collect();
        for past in &tails {
            for future in &tails {
                let u = past.right_tail();
                let v = future.right_tail();
                if let Some(path) = matrix.shortest_path(*u.last().unwrap(), v[0]) {
                    let x = Point::new(u.to_vec(), path, 0, v.to_vec()).expect("tails are non-empty");
                    points.insert(x);
                }
            }
        }

        let window_radius = (0..=descriptor.radius)
            .rev()
            .find(|&r| matrix.count_words(2 * r as usize + 1) <= WINDOW_WORD_CAP)
            .unwrap_or(0);
        for word in matrix.admissible_words(2 * window_radius as usize + 1) {
            points.insert(Point::embed(matrix, &word, -(window_radius as i64)));
        }

        let r = descriptor.radius as i64;
        let mut pairs = Vec::new();
        for x in &points {
            pairs.push(AsymptoticPair::diagonal(x.clone()));
            for len in 1..=SUBSTITUTION_LEN {
                let words = matrix.admissible_words(len);
                for i in -r..=r + 1 - len as i64 {
                    let end = i + len as i64;
                    let (before, after) = (x.coord(i - 1), x.coord(end));
                    for w in &words {
                        if w[0] == x.coord(i)
                            || w[len - 1] == x.coord(end - 1)
                            || !matrix.allows(before, w[0])
                            || !matrix.allows(w[len - 1], after)
                        {
                            continue;
                        }
                        let patch = Point::new(vec![w[0]], w.clone(), i, vec![w[len - 1]]).expect("positive symbols");
                        let z = x.splice(&patch, i).splice(x, end);
                        pairs.push(AsymptoticPair::new(x.clone(), z).expect("finite change"));
                    }
                }
            }
        }

        Family {
            descriptor,
            periodic: periodic.into_iter().collect(),
            points: points.into_iter().collect(),
            pairs,
            window_radius,
        }
    }
}
