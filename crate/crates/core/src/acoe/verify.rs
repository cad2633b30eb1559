use serde::Serialize;

use super::family::{Family, FamilyDescriptor};
use super::map::PointMap;
use super::AcoeError;
use crate::cocycles::{power_sum, LocallyConstantFn, PotentialCocycle};
use crate::relations::{asymptotic_level, AsymptoticPair};
use crate::report::CheckReport;
use crate::sft::{Point, ShiftSystem};

/// Candidate orbit-equivalence data between `(X, phi)` and `(Y, psi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcoeBundle {
    pub source: ShiftSystem,
    pub target: ShiftSystem,
    pub h: PointMap,
    pub h_inv: PointMap,
    pub c1: LocallyConstantFn,
    pub c2: LocallyConstantFn,
    pub d1: PotentialCocycle,
    pub d2: PotentialCocycle,
}

impl AcoeBundle {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        source: ShiftSystem,
        target: ShiftSystem,
        h: PointMap,
        h_inv: PointMap,
        c1: LocallyConstantFn,
        c2: LocallyConstantFn,
        d1: PotentialCocycle,
        d2: PotentialCocycle,
    ) -> Result<Self, AcoeError> {
        if h.codomain(&source.matrix)? != target.matrix {
            return Err(AcoeError::MatrixMismatch(
                "h does not land in the target shift space".into(),
            ));
        }
        if h_inv.codomain(&target.matrix)? != source.matrix {
            return Err(AcoeError::MatrixMismatch(
                "h_inv does not land in the source shift space".into(),
            ));
        }
        Ok(AcoeBundle {
            source,
            target,
            h,
            h_inv,
            c1,
            c2,
            d1,
            d2,
        })
    }

    /// The data of an asymptotic conjugacy (`epsilon = 1`) or flip (`epsilon = -1`).
    pub fn with_constant_cocycles(
        source: ShiftSystem,
        target: ShiftSystem,
        h: PointMap,
        h_inv: PointMap,
        epsilon: i64,
    ) -> Result<Self, AcoeError> {
        Self::new(
            source,
            target,
            h,
            h_inv,
            LocallyConstantFn::constant(epsilon),
            LocallyConstantFn::constant(epsilon),
            PotentialCocycle::zero(),
            PotentialCocycle::zero(),
        )
    }

    fn windows(&self) -> Option<u64> {
        let radii = [&self.c1, &self.c2, self.d1.potential(), self.d2.potential()]
            .iter()
            .map(|f| f.radius() as u64)
            .sum::<u64>();
        Some(self.h.window()? + self.h_inv.window()? + radii)
    }
}

pub const CONDITIONS: [&str; 10] = [
    "(1)", "(2)", "(i)", "(ii)", "(iii)", "(iv)", "(v)", "(vi)", "(vii)", "(viii)",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionOutcome {
    pub condition: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_level: Option<u64>,
}

impl ConditionOutcome {
    fn new(condition: &'static str, report: CheckReport, max_level: Option<u64>) -> Self {
        ConditionOutcome {
            condition,
            passed: report.passed(),
            checked: report.checked,
            failures: report.failures,
            counterexample: report.counterexample,
            max_level,
        }
    }
}

/// Measured level `K_n` of `(psi^{c1^n(x)}(h x), h(phi^n x))` against the
/// recursive bound `K_{n-1} + max|c1| + K_1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelStep {
    pub n: u64,
    pub measured: Option<u64>,
    pub bound: Option<u64>,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Certificate {
    ExactlyVerified,
    VerifiedOnFamily,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilySummary {
    pub radius: u32,
    pub tails: u32,
    pub periods: u32,
    pub window_radius: u32,
    pub source_points: usize,
    pub source_pairs: usize,
    pub target_points: usize,
    pub target_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub family: FamilySummary,
    /// `h` lands in `Y`, `h_inv` lands in `X`, and they invert each other on the families.
    pub maps: CheckReport,
    pub conditions: Vec<ConditionOutcome>,
    pub k1: Option<u64>,
    pub k2: Option<u64>,
    pub level_propagation: Vec<LevelStep>,
    pub sufficiency_radius: Option<u64>,
    pub certificate: Option<Certificate>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.maps.passed() && self.conditions.iter().all(|c| c.passed)
    }

    pub fn failed_conditions(&self) -> Vec<&'static str> {
        self.conditions
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.condition)
            .collect()
    }

    pub fn condition(&self, label: &str) -> Option<&ConditionOutcome> {
        self.conditions.iter().find(|c| c.condition == label)
    }

    pub fn level_propagation_holds(&self) -> bool {
        self.level_propagation.iter().all(|s| s.holds)
    }
}

/// A bundle together with the source and target families it is checked on.
pub struct Verifier<'a> {
    bundle: &'a AcoeBundle,
    source_family: Family,
    target_family: Family,
}

const PROPAGATION_STEPS: u64 = 6;

impl<'a> Verifier<'a> {
    pub fn new(bundle: &'a AcoeBundle, descriptor: FamilyDescriptor) -> Self {
        Verifier {
            bundle,
            source_family: Family::build(&bundle.source.matrix, descriptor),
            target_family: Family::build(&bundle.target.matrix, descriptor),
        }
    }

    pub fn bundle(&self) -> &AcoeBundle {
        self.bundle
    }

    pub fn source_family(&self) -> &Family {
        &self.source_family
    }

    pub fn target_family(&self) -> &Family {
        &self.target_family
    }

    pub fn verify(&self) -> VerificationReport {
        let b = self.bundle;
        let (sf, tf) = (&self.source_family, &self.target_family);
        let (phi, psi) = (&b.source, &b.target);
        let h = |x: &Point| b.h.apply(x);
        let hi = |y: &Point| b.h_inv.apply(y);

        let mut maps = CheckReport::default();
        for x in &sf.points {
            let outcome = h(x).and_then(|y| Ok((b.target.matrix.admits(&y), hi(&y)? == *x)));
            record_map(&mut maps, x, outcome, "h");
        }
        for y in &tf.points {
            let outcome = hi(y).and_then(|x| Ok((b.source.matrix.admits(&x), h(&x)? == *y)));
            record_map(&mut maps, y, outcome, "h_inv");
        }

        let one = value_check(&sf.pairs, |p| {
            let (x, z) = (p.x(), p.z());
            Ok((
                b.c1.eval(x)? + b.d1.eval_points(&phi.step(x, 1), &phi.step(z, 1), phi.direction)?,
                b.c1.eval(z)? + b.d1.eval(p, phi.direction)?,
            ))
        });
        let two = value_check(&tf.pairs, |p| {
            let (y, w) = (p.x(), p.z());
            Ok((
                b.c2.eval(y)? + b.d2.eval_points(&psi.step(y, 1), &psi.step(w, 1), psi.direction)?,
                b.c2.eval(w)? + b.d2.eval(p, psi.direction)?,
            ))
        });

        let (xi1, k1) = level_check(&sf.points, |x| {
            Ok((psi.step(&h(x)?, b.c1.eval(x)?), h(&phi.step(x, 1))?))
        });
        let (xi2, k2) = level_check(&tf.points, |y| {
            Ok((phi.step(&hi(y)?, b.c2.eval(y)?), hi(&psi.step(y, 1))?))
        });
        let (eta1, n1) = level_check(&sf.pairs, |p| {
            Ok((psi.step(&h(p.x())?, b.d1.eval(p, phi.direction)?), h(p.z())?))
        });
        let (eta2, n2) = level_check(&tf.pairs, |p| {
            Ok((phi.step(&hi(p.x())?, b.d2.eval(p, psi.direction)?), hi(p.z())?))
        });

        let v = value_check(&sf.points, |x| {
            let hx = h(x)?;
            let k = b.c1.eval(x)?;
            let lhs = power_sum(&b.c2, &hx, k, psi.direction)?
                + b.d2
                    .eval_points(&psi.step(&hx, k), &h(&phi.step(x, 1))?, psi.direction)?;
            Ok((lhs, 1))
        });
        let vi = value_check(&tf.points, |y| {
            let gy = hi(y)?;
            let k = b.c2.eval(y)?;
            let lhs = power_sum(&b.c1, &gy, k, phi.direction)?
                + b.d1
                    .eval_points(&phi.step(&gy, k), &hi(&psi.step(y, 1))?, phi.direction)?;
            Ok((lhs, 1))
        });
        let vii = value_check(&sf.pairs, |p| {
            let hx = h(p.x())?;
            let k = b.d1.eval(p, phi.direction)?;
            let lhs = power_sum(&b.c2, &hx, k, psi.direction)?
                + b.d2.eval_points(&psi.step(&hx, k), &h(p.z())?, psi.direction)?;
            Ok((lhs, 0))
        });
        let viii = value_check(&tf.pairs, |p| {
            let gy = hi(p.x())?;
            let k = b.d2.eval(p, psi.direction)?;
            let lhs = power_sum(&b.c1, &gy, k, phi.direction)?
                + b.d1.eval_points(&phi.step(&gy, k), &hi(p.z())?, phi.direction)?;
            Ok((lhs, 0))
        });

        let conditions = vec![
            ConditionOutcome::new(CONDITIONS[0], one, None),
            ConditionOutcome::new(CONDITIONS[1], two, None),
            ConditionOutcome::new(CONDITIONS[2], xi1, k1),
            ConditionOutcome::new(CONDITIONS[3], xi2, k2),
            ConditionOutcome::new(CONDITIONS[4], eta1, n1),
            ConditionOutcome::new(CONDITIONS[5], eta2, n2),
            ConditionOutcome::new(CONDITIONS[6], v, None),
            ConditionOutcome::new(CONDITIONS[7], vi, None),
            ConditionOutcome::new(CONDITIONS[8], vii, None),
            ConditionOutcome::new(CONDITIONS[9], viii, None),
        ];

        let level_propagation = self.level_propagation();
        let sufficiency_radius = match (b.windows(), k1, k2) {
            (Some(w), Some(a), Some(c)) => Some(w + a.max(c)),
            _ => None,
        };
        let mut report = VerificationReport {
            family: FamilySummary {
                radius: sf.descriptor.radius,
                tails: sf.descriptor.tails,
                periods: sf.descriptor.periods,
                window_radius: sf.window_radius.min(tf.window_radius),
                source_points: sf.points.len(),
                source_pairs: sf.pairs.len(),
                target_points: tf.points.len(),
                target_pairs: tf.pairs.len(),
            },
            maps,
            conditions,
            k1,
            k2,
            level_propagation,
            sufficiency_radius,
            certificate: None,
        };
        if report.passed() {
            let exact = sufficiency_radius.is_some_and(|r| r <= report.family.window_radius as u64);
            report.certificate = Some(if exact {
                Certificate::ExactlyVerified
            } else {
                Certificate::VerifiedOnFamily
            });
        }
        report
    }

    /// `K_n` for `n = 1..=6` and the bound check for `n = 2..=6`.
    pub fn level_propagation(&self) -> Vec<LevelStep> {
        let b = self.bundle;
        let c_max = b.c1.max_abs();
        let measured: Vec<Option<u64>> = (1..=PROPAGATION_STEPS)
            .map(|n| {
                let mut worst = Some(0u64);
                for x in &self.source_family.points {
                    let level = (|| -> Result<Option<u64>, AcoeError> {
                        let hx = b.h.apply(x)?;
                        let k = power_sum(&b.c1, x, n as i64, b.source.direction)?;
                        let a = b.target.step(&hx, k);
                        let z = b.h.apply(&b.source.step(x, n as i64))?;
                        Ok(asymptotic_level(&a, &z))
                    })();
                    match (worst, level) {
                        (Some(w), Ok(Some(l))) => worst = Some(w.max(l)),
                        _ => {
                            worst = None;
                            break;
                        }
                    }
                }
                worst
            })
            .collect();
        let k1 = measured[0];
        (1..=PROPAGATION_STEPS)
            .map(|n| {
                let idx = n as usize - 1;
                let bound = if n == 1 {
                    None
                } else {
                    match (measured[idx - 1], k1) {
                        (Some(prev), Some(first)) => Some(prev + c_max + first),
                        _ => None,
                    }
                };
                let holds = match (measured[idx], bound) {
                    (Some(m), Some(bd)) => m <= bd,
                    (Some(_), None) => n == 1,
                    (None, _) => false,
                };
                LevelStep {
                    n,
                    measured: measured[idx],
                    bound,
                    holds,
                }
            })
            .collect()
    }
}

pub fn verify_acoe(bundle: &AcoeBundle, descriptor: FamilyDescriptor) -> VerificationReport {
    Verifier::new(bundle, descriptor).verify()
}

fn record_map(report: &mut CheckReport, x: &Point, outcome: Result<(bool, bool), AcoeError>, name: &str) {
    match outcome {
        Ok((admissible, inverse)) => report.record(admissible && inverse, || {
            if !admissible {
                format!("{name}({x}) leaves the shift space")
            } else {
                format!("{name} is not inverted at {x}")
            }
        }),
        Err(e) => report.record(false, || format!("{name}({x}): {e}")),
    }
}

fn value_check<T: std::fmt::Display>(items: &[T], f: impl Fn(&T) -> Result<(i64, i64), AcoeError>) -> CheckReport {
    let mut report = CheckReport::default();
    for item in items {
        match f(item) {
            Ok((lhs, rhs)) => report.record(lhs == rhs, || format!("at {item}: left side {lhs}, expected {rhs}")),
            Err(e) => report.record(false, || format!("at {item}: {e}")),
        }
    }
    report
}

fn level_check<T: std::fmt::Display>(
    items: &[T],
    f: impl Fn(&T) -> Result<(Point, Point), AcoeError>,
) -> (CheckReport, Option<u64>) {
    let mut report = CheckReport::default();
    let mut max_level: Option<u64> = Some(0);
    for item in items {
        match f(item) {
            Ok((a, z)) => match asymptotic_level(&a, &z) {
                Some(l) => {
                    report.record(true, String::new);
                    max_level = max_level.map(|m| m.max(l));
                }
                None => {
                    report.record(false, || format!("at {item}: ({a}; {z}) is not asymptotic"));
                    max_level = None;
                }
            },
            Err(e) => {
                report.record(false, || format!("at {item}: {e}"));
                max_level = None;
            }
        }
    }
    (report, max_level)
}

/// Pairs of the source family as `(x, z)` after applying `h`, used by transport checks.
pub(crate) fn image_pair(h: &PointMap, p: &AsymptoticPair) -> Result<(Point, Point), AcoeError> {
    Ok((h.apply(p.x())?, h.apply(p.z())?))
}
