use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::family::Family;
use super::map::PointMap;
use super::verify::{image_pair, AcoeBundle, VerificationReport, Verifier};
use super::AcoeError;
use crate::asymptotics::{eta_s, eta_u, least_asymptotic_period, periodic_points_up_to};
use crate::cocycles::power_sum;
use crate::relations::{asymptotic_level, GroupoidElement};
use crate::report::CheckReport;
use crate::sft::{bracket, Direction, Point, ShiftSystem, TransitionMatrix};

/// The groupoid map `(x, n, z) -> (h x, c1^n(x) + d1(phi^n x, z), h z)`.
pub struct Varphi<'a> {
    bundle: &'a AcoeBundle,
}

pub fn build_varphi(bundle: &AcoeBundle) -> Varphi<'_> {
    Varphi { bundle }
}

impl Varphi<'_> {
    /// An element of the source groupoid.
    pub fn element(&self, x: Point, n: i64, z: Point) -> Result<GroupoidElement, AcoeError> {
        GroupoidElement::with_direction(self.bundle.source.direction, x, n, z)
            .map_err(|e| AcoeError::InvalidElement(e.to_string()))
    }

    pub fn apply(&self, g: &GroupoidElement) -> Result<GroupoidElement, AcoeError> {
        let b = self.bundle;
        transport(g, &b.source, &b.target, &b.h, &b.c1, &b.d1)
    }

    /// The map built from `h_inv`, `c2` and `d2`.
    pub fn apply_inverse(&self, g: &GroupoidElement) -> Result<GroupoidElement, AcoeError> {
        let b = self.bundle;
        transport(g, &b.target, &b.source, &b.h_inv, &b.c2, &b.d2)
    }

    /// The integer `c1^n(x) + d1(phi^n x, z)`.
    pub fn cocycle_value(&self, g: &GroupoidElement) -> Result<i64, AcoeError> {
        let b = self.bundle;
        cocycle_value(g, &b.source, &b.c1, &b.d1)
    }
}

fn cocycle_value(
    g: &GroupoidElement,
    from: &ShiftSystem,
    c: &crate::cocycles::LocallyConstantFn,
    d: &crate::cocycles::PotentialCocycle,
) -> Result<i64, AcoeError> {
    if g.direction() != from.direction {
        return Err(AcoeError::InvalidElement(
            "element belongs to different dynamics".into(),
        ));
    }
    let moved = from.step(g.range(), g.n());
    Ok(power_sum(c, g.range(), g.n(), from.direction)? + d.eval_points(&moved, g.source(), from.direction)?)
}

fn transport(
    g: &GroupoidElement,
    from: &ShiftSystem,
    to: &ShiftSystem,
    h: &PointMap,
    c: &crate::cocycles::LocallyConstantFn,
    d: &crate::cocycles::PotentialCocycle,
) -> Result<GroupoidElement, AcoeError> {
    let k = cocycle_value(g, from, c, d)?;
    GroupoidElement::with_direction(to.direction, h.apply(g.range())?, k, h.apply(g.source())?)
        .map_err(|e| AcoeError::InvalidElement(e.to_string()))
}

/// Whether `h(sigma x) = sigma^sign(h x)` on every point given.
pub fn is_conjugacy(h: &PointMap, sign: i64, points: &[Point]) -> Result<bool, AcoeError> {
    for x in points {
        if h.apply(&x.shift(1))? != h.apply(x)?.shift(sign) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The first periodic point of period at most `max_period` whose image is not periodic.
pub fn first_non_periodic_image(
    h: &PointMap,
    matrix: &TransitionMatrix,
    max_period: usize,
) -> Result<Option<Point>, AcoeError> {
    for x in periodic_points_up_to(matrix, max_period) {
        if !h.apply(&x)?.is_periodic() {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

pub fn check_periodic_preserving(
    h: &PointMap,
    matrix: &TransitionMatrix,
    max_period: usize,
) -> Result<bool, AcoeError> {
    Ok(first_non_periodic_image(h, matrix, max_period)?.is_none())
}

/// Forward limit point under `phi`, which for `sigma^-1` is the backward one under `sigma`.
fn forward_limit(direction: Direction, x: &Point) -> Point {
    match direction {
        Direction::Forward => eta_s(x),
        Direction::Inverse => eta_u(x),
    }
}

fn backward_limit(direction: Direction, x: &Point) -> Point {
    match direction {
        Direction::Forward => eta_u(x),
        Direction::Inverse => eta_s(x),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Conjugacy,
    Flip,
    /// The cocycle `d1` is non-trivial, so the data alone does not single out a sign.
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlipReport {
    pub classification: Classification,
    pub epsilon: Option<i64>,
    /// `h(phi x) = psi^{c1(x)}(h x)` on periodic points.
    pub orbit_cocycle: CheckReport,
    /// Limit points of `h(phi x)` versus those of `h x` moved by `c1(x)`.
    pub limit_transport: CheckReport,
    /// `h x` is asymptotically `c_h^p(x)`-periodic.
    pub period_transport: CheckReport,
}

/// Recovers the flip sign from periodic-point-preserving orbit-equivalence data.
pub fn flip_from_ppacoe(verifier: &Verifier<'_>, report: &VerificationReport) -> Result<FlipReport, AcoeError> {
    if !report.passed() {
        return Err(AcoeError::VerificationFailed(report.failed_conditions().join(" ")));
    }
    let b = verifier.bundle();
    let sf = verifier.source_family();
    if let Some(x) = first_non_periodic_image(&b.h, &b.source.matrix, sf.descriptor.periods as usize)? {
        return Err(AcoeError::NotPeriodicPreserving(x.to_string()));
    }
    let (phi, psi) = (&b.source, &b.target);

    let mut orbit_cocycle = CheckReport::default();
    for x in &sf.periodic {
        let lhs = b.h.apply(&phi.step(x, 1))?;
        let rhs = psi.step(&b.h.apply(x)?, b.c1.eval(x)?);
        orbit_cocycle.record(lhs == rhs, || {
            format!("x = {x}: h(phi x) = {lhs}, psi^c1(x)(h x) = {rhs}")
        });
    }

    let mut limit_transport = CheckReport::default();
    let mut period_transport = CheckReport::default();
    for x in &sf.points {
        let hx = b.h.apply(x)?;
        let hphix = b.h.apply(&phi.step(x, 1))?;
        let k = b.c1.eval(x)?;
        for limit in [forward_limit, backward_limit] {
            let lhs = limit(psi.direction, &hphix);
            let rhs = psi.step(&limit(psi.direction, &hx), k);
            limit_transport.record(lhs == rhs, || format!("x = {x}: {lhs} != {rhs}"));
        }
        let p = least_asymptotic_period(x) as i64;
        let cp = power_sum(&b.c1, x, p, phi.direction)? + b.d1.eval_points(&phi.step(x, p), x, phi.direction)?;
        let moved = psi.step(&hx, cp);
        period_transport.record(cp != 0 && asymptotic_level(&moved, &hx).is_some(), || {
            format!("x = {x}: h x is not asymptotically {cp}-periodic")
        });
        if x.is_periodic() {
            let cp = power_sum(&b.c1, x, p, phi.direction)?;
            for limit in [forward_limit, backward_limit] {
                let eta = limit(psi.direction, &hx);
                limit_transport.record(psi.step(&eta, cp) == eta, || {
                    format!("x = {x}: limit of h x is not {cp}-periodic")
                });
            }
        }
    }

    for (name, check) in [
        ("orbit cocycle", &orbit_cocycle),
        ("limit transport", &limit_transport),
        ("period transport", &period_transport),
    ] {
        if let Some(w) = &check.counterexample {
            return Err(AcoeError::ConditionViolated(format!("{name}: {w}")));
        }
    }

    let (classification, epsilon) = if b.d1.is_zero() {
        let values: BTreeSet<i64> = sf.points.iter().map(|x| b.c1.eval(x)).collect::<Result<_, _>>()?;
        match values.iter().copied().collect::<Vec<_>>().as_slice() {
            [1] => (Classification::Conjugacy, Some(1)),
            [-1] => (Classification::Flip, Some(-1)),
            other => {
                return Err(AcoeError::ConditionViolated(format!(
                    "d1 vanishes but c1 takes the values {other:?} instead of a constant sign"
                )))
            }
        }
    } else {
        (Classification::Unresolved, None)
    };

    Ok(FlipReport {
        classification,
        epsilon,
        orbit_cocycle,
        limit_transport,
        period_transport,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelCheck {
    pub report: CheckReport,
    pub max_level: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AsymptoticFlipReport {
    pub epsilon: i64,
    pub xi1: LevelCheck,
    pub xi2: LevelCheck,
    pub eta1: LevelCheck,
    pub eta2: LevelCheck,
    /// For each source pair level `N`, the largest level of its image under `h`.
    pub level_map: BTreeMap<u64, u64>,
}

impl AsymptoticFlipReport {
    pub fn passed(&self) -> bool {
        [&self.xi1, &self.xi2, &self.eta1, &self.eta2]
            .iter()
            .all(|c| c.report.passed())
    }
}

fn levels<T: std::fmt::Display>(items: &[T], f: impl Fn(&T) -> Result<(Point, Point), AcoeError>) -> LevelCheck {
    let mut report = CheckReport::default();
    let mut max_level = Some(0u64);
    for item in items {
        let level = f(item).map(|(a, z)| asymptotic_level(&a, &z));
        match level {
            Ok(Some(l)) => {
                report.record(true, String::new);
                max_level = max_level.map(|m| m.max(l));
            }
            Ok(None) => {
                report.record(false, || format!("at {item}: not asymptotic"));
                max_level = None;
            }
            Err(e) => {
                report.record(false, || format!("at {item}: {e}"));
                max_level = None;
            }
        }
    }
    LevelCheck { report, max_level }
}

/// Checks that `h` with the constant cocycle `epsilon` and vanishing `d`
/// moves orbits and asymptotic pairs as an asymptotic flip would.
pub fn asymptotic_flip_check(
    h: &PointMap,
    h_inv: &PointMap,
    epsilon: i64,
    source: &ShiftSystem,
    target: &ShiftSystem,
    source_family: &Family,
    target_family: &Family,
) -> AsymptoticFlipReport {
    let xi1 = levels(&source_family.points, |x| {
        Ok((target.step(&h.apply(x)?, epsilon), h.apply(&source.step(x, 1))?))
    });
    let xi2 = levels(&target_family.points, |y| {
        Ok((source.step(&h_inv.apply(y)?, epsilon), h_inv.apply(&target.step(y, 1))?))
    });
    let eta1 = levels(&source_family.pairs, |p| image_pair(h, p));
    let eta2 = levels(&target_family.pairs, |p| image_pair(h_inv, p));
    let mut level_map = BTreeMap::new();
    for p in &source_family.pairs {
        if let Ok((a, z)) = image_pair(h, p) {
            if let Some(l) = asymptotic_level(&a, &z) {
                let entry = level_map.entry(p.level()).or_insert(0);
                *entry = (*entry).max(l);
            }
        }
    }
    AsymptoticFlipReport {
        epsilon,
        xi1,
        xi2,
        eta1,
        eta2,
        level_map,
    }
}

/// Checks `h([x, z]) = [h x, h z]` (`sign = 1`) or `[h z, h x]` (`sign = -1`)
/// over pairs of points that agree on `[-window, window]`.
pub fn bracket_transport_check(
    h: &PointMap,
    sign: i64,
    points: &[Point],
    window: u64,
) -> Result<CheckReport, AcoeError> {
    const PER_GROUP: usize = 6;
    let w = window as i64;
    let mut groups: BTreeMap<Vec<crate::sft::Symbol>, Vec<&Point>> = BTreeMap::new();
    for x in points {
        let group = groups.entry(x.window(-w, w + 1)).or_default();
        if group.len() < PER_GROUP {
            group.push(x);
        }
    }
    let mut report = CheckReport::default();
    for group in groups.values() {
        for x in group {
            for z in group {
                let lhs = h.apply(&bracket(x, z).expect("points share the centre"))?;
                let (hx, hz) = (h.apply(x)?, h.apply(z)?);
                let rhs = if sign > 0 { bracket(&hx, &hz) } else { bracket(&hz, &hx) };
                match rhs {
                    Ok(rhs) => report.record(lhs == rhs, || format!("x = {x}, z = {z}: {lhs} != {rhs}")),
                    Err(e) => report.record(false, || format!("x = {x}, z = {z}: {e}")),
                }
            }
        }
    }
    Ok(report)
}
