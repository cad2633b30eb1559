#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smale_sft::asymptotics::periodic_points_up_to;
use smale_sft::relations::{AsymptoticPair, GroupoidElement};
use smale_sft::sft::{Direction, Point, Symbol, TransitionMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn golden() -> TransitionMatrix {
    TransitionMatrix::new(&[vec![1, 1], vec![1, 0]]).unwrap()
}

pub fn triangle() -> TransitionMatrix {
    TransitionMatrix::new(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 0]]).unwrap()
}

pub fn lopsided() -> TransitionMatrix {
    TransitionMatrix::new(&[vec![1, 1, 1], vec![1, 0, 0], vec![0, 1, 1]]).unwrap()
}

/// Irreducible matrices the randomized checks run over.
pub fn matrices() -> Vec<(&'static str, TransitionMatrix)> {
    vec![
        ("golden", golden()),
        ("full2", TransitionMatrix::full_shift(2)),
        ("triangle", triangle()),
        ("lopsided", lopsided()),
    ]
}

pub fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
        .join(name)
}

fn random_cycle(rng: &mut ChaCha8Rng, matrix: &TransitionMatrix, max_period: usize) -> Vec<Symbol> {
    let cycles: Vec<Point> = periodic_points_up_to(matrix, max_period).into_iter().collect();
    cycles.choose(rng).unwrap().right_tail().to_vec()
}

fn random_walk(rng: &mut ChaCha8Rng, matrix: &TransitionMatrix, from: Symbol, len: usize) -> Vec<Symbol> {
    let mut walk = Vec::with_capacity(len);
    let mut at = from;
    for _ in 0..len {
        let next: Vec<Symbol> = matrix.successors(at).collect();
        at = *next.choose(rng).unwrap();
        walk.push(at);
    }
    walk
}

/// An admissible eventually periodic point. One in four is periodic.
pub fn random_point(rng: &mut ChaCha8Rng, matrix: &TransitionMatrix) -> Point {
    if rng.gen_ratio(1, 4) {
        let word = random_cycle(rng, matrix, 5);
        return Point::periodic(&word)
            .unwrap()
            .shift(rng.gen_range(0..word.len() as i64));
    }
    let left = random_cycle(rng, matrix, 4);
    let right = random_cycle(rng, matrix, 4);
    let len = rng.gen_range(0..6);
    let mut center = random_walk(rng, matrix, *left.last().unwrap(), len);
    let last = center.last().copied().unwrap_or(*left.last().unwrap());
    let bridge = if matrix.allows(last, right[0]) {
        Vec::new()
    } else {
        matrix.shortest_path(last, right[0]).unwrap()
    };
    center.extend(bridge);
    let x = Point::new(left, center, rng.gen_range(-6..=6), right).unwrap();
    assert!(matrix.admits(&x), "generator produced {x}");
    x
}

/// A point that differs from `x` on a block of at most three coordinates
/// near the origin, or `x` itself when no admissible change is found.
pub fn perturb(rng: &mut ChaCha8Rng, matrix: &TransitionMatrix, x: &Point) -> Point {
    for _ in 0..8 {
        let len = rng.gen_range(1..=3usize);
        let at = rng.gen_range(-5..=5i64);
        let end = at + len as i64;
        let start = x.coord(at - 1);
        let word = random_walk(rng, matrix, start, len);
        if matrix.allows(*word.last().unwrap(), x.coord(end)) {
            let patch = Point::new(vec![word[0]], word.clone(), at, vec![word[len - 1]]).unwrap();
            return x.splice(&patch, at).splice(x, end);
        }
    }
    x.clone()
}

pub fn random_pair(rng: &mut ChaCha8Rng, matrix: &TransitionMatrix) -> AsymptoticPair {
    let x = random_point(rng, matrix);
    let z = perturb(rng, matrix, &x);
    AsymptoticPair::new(x, z).unwrap()
}

/// An element with the given range.
pub fn element_from(
    rng: &mut ChaCha8Rng,
    matrix: &TransitionMatrix,
    direction: Direction,
    x: Point,
) -> GroupoidElement {
    let n = rng.gen_range(-6..=6);
    let z = perturb(rng, matrix, &direction.step(&x, n));
    GroupoidElement::with_direction(direction, x, n, z).unwrap()
}

/// Three composable elements `g`, `h`, `k` with `s(g) = r(h)` and `s(h) = r(k)`.
pub fn composable_triple(
    rng: &mut ChaCha8Rng,
    matrix: &TransitionMatrix,
    direction: Direction,
) -> (GroupoidElement, GroupoidElement, GroupoidElement) {
    let x = random_point(rng, matrix);
    let g = element_from(rng, matrix, direction, x);
    let h = element_from(rng, matrix, direction, g.source().clone());
    let k = element_from(rng, matrix, direction, h.source().clone());
    (g, h, k)
}

/// Number of closed walks of length `p`, counted by enumerating words.
pub fn closed_walks(matrix: &TransitionMatrix, p: usize) -> usize {
    matrix
        .admissible_words(p)
        .into_iter()
        .filter(|w| matrix.allows(w[p - 1], w[0]))
        .count()
}
