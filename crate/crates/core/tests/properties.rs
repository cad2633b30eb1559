mod common;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use common::*;
use smale_sft::acoe::{
    asymptotic_flip_check, bracket_transport_check, build_varphi, load_bundle, Family, FamilyDescriptor, PointMap,
    SlidingBlockCode,
};
use smale_sft::asymptotics::{alpha_limit, eta_s, eta_u, least_asymptotic_period, omega_limit};
use smale_sft::cocycles::{check_condition_1, power_sum, LocallyConstantFn, PotentialCocycle, SumKind};
use smale_sft::relations::{asymptotic_level, stable_level, unstable_level, AsymptoticPair, GroupoidElement};
use smale_sft::sft::{bracket, metric, Direction, Point, SmaleConstants, TransitionMatrix};

fn matrix_strategy() -> impl Strategy<Value = TransitionMatrix> {
    (0..matrices().len()).prop_map(|i| matrices().swap_remove(i).1)
}

fn direction_strategy() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::Forward), Just(Direction::Inverse)]
}

/// Scans a wide window instead of using the tail structure.
fn scan_levels(x: &Point, z: &Point) -> (Option<u64>, Option<u64>) {
    const WIDE: i64 = 200;
    let diffs: Vec<i64> = (-WIDE..WIDE).filter(|&i| x.coord(i) != z.coord(i)).collect();
    let bounded = |near: &dyn Fn(i64) -> bool| diffs.iter().all(|&i| near(i));
    let stable = bounded(&|i| i < WIDE - 60).then(|| diffs.iter().map(|&i| (i + 1).max(0) as u64).max().unwrap_or(0));
    let unstable =
        bounded(&|i| i > -WIDE + 60).then(|| diffs.iter().map(|&i| (1 - i).max(0) as u64).max().unwrap_or(0));
    (stable, unstable)
}

fn naive_power_sum(f: &LocallyConstantFn, x: &Point, n: i64, direction: Direction) -> i64 {
    let at = |i: i64| f.eval(&direction.step(x, i)).unwrap();
    if n >= 0 {
        (0..n).map(at).sum()
    } else {
        -(n..0).map(at).sum::<i64>()
    }
}

fn table_fn(m: &TransitionMatrix, seed: u64) -> LocallyConstantFn {
    LocallyConstantFn::from_rule(m, 1, |w| {
        let h = w
            .iter()
            .fold(seed, |acc, &s| acc.wrapping_mul(31).wrapping_add(u64::from(s)));
        (h % 7) as i64 - 3
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_form_round_trips(m in matrix_strategy(), seed in any::<u64>()) {
        let x = random_point(&mut rng(seed), &m);
        let text = x.to_string();
        prop_assert_eq!(text.parse::<Point>().unwrap(), x.clone());
        let unrolled = Point::new(
            x.left_tail().to_vec(),
            x.left_tail().iter().chain(x.center()).chain(x.right_tail()).copied().collect(),
            x.offset() - x.left_tail().len() as i64,
            x.right_tail().to_vec(),
        ).unwrap();
        prop_assert_eq!(unrolled, x.clone());
        let doubled = Point::new(
            [x.left_tail(), x.left_tail()].concat(),
            x.center().to_vec(),
            x.offset(),
            [x.right_tail(), x.right_tail()].concat(),
        ).unwrap();
        prop_assert_eq!(doubled, x);
    }

    #[test]
    fn shift_and_reverse_laws(m in matrix_strategy(), seed in any::<u64>(), n in -20i64..20, k in -20i64..20) {
        let x = random_point(&mut rng(seed), &m);
        prop_assert_eq!(x.shift(n).shift(k), x.shift(n + k));
        for i in -15..15 {
            prop_assert_eq!(x.shift(n).coord(i), x.coord(i + n));
            prop_assert_eq!(x.reverse().coord(i), x.coord(-i));
        }
        prop_assert_eq!(x.reverse().reverse(), x.clone());
        prop_assert_eq!(x.shift(n).reverse(), x.reverse().shift(-n));
        prop_assert!(m.transpose().admits(&x.reverse()));
        prop_assert!(m.admits(&x.shift(n)));
    }

    #[test]
    fn bracket_laws(m in matrix_strategy(), seeds in any::<[u64; 3]>()) {
        let [x, y, z] = seeds.map(|s| random_point(&mut rng(s), &m));
        prop_assert_eq!(bracket(&x, &x).unwrap(), x.clone());
        let zero = x.coord(0);
        let y = if y.coord(0) == zero { y } else { x.clone() };
        let z = if z.coord(0) == zero { z } else { x.clone() };
        let xy = bracket(&x, &y).unwrap();
        prop_assert!(m.admits(&xy));
        prop_assert_eq!(bracket(&xy, &z).unwrap(), bracket(&x, &z).unwrap());
        prop_assert_eq!(bracket(&x, &bracket(&y, &z).unwrap()).unwrap(), bracket(&x, &z).unwrap());
        for i in -10..=0 {
            prop_assert_eq!(xy.coord(i), x.coord(i));
        }
        for i in 0..10 {
            prop_assert_eq!(xy.coord(i), y.coord(i));
        }
    }

    #[test]
    fn metric_contracts_local_stable_sets(m in matrix_strategy(), seed in any::<u64>(), p in 1u32..5) {
        let constants = SmaleConstants::new(BigRational::new(p.into(), (p + 1).into())).unwrap();
        let mut r = rng(seed);
        let x = random_point(&mut r, &m);
        let w = random_point(&mut r, &m);
        prop_assert_eq!(metric(&x, &x, &constants), BigRational::zero());
        prop_assert_eq!(metric(&x, &w, &constants), metric(&w, &x, &constants));
        prop_assert!(metric(&x, &w, &constants) <= BigRational::one());
        let lambda = constants.lambda0().clone();
        // Agrees with x on [0, inf) and with w before.
        let stable = w.splice(&x, 0);
        let d = metric(&x, &stable, &constants);
        prop_assert!(metric(&x.shift(1), &stable.shift(1), &constants) <= &lambda * &d);
        let unstable = x.splice(&w, 1);
        let d = metric(&x, &unstable, &constants);
        prop_assert!(metric(&x.shift(-1), &unstable.shift(-1), &constants) <= &lambda * &d);
    }

    #[test]
    fn levels_match_a_window_scan(m in matrix_strategy(), seeds in any::<[u64; 2]>()) {
        let mut r = rng(seeds[0]);
        let x = random_point(&mut r, &m);
        let z = if seeds[1] % 2 == 0 { perturb(&mut r, &m, &x) } else { random_point(&mut rng(seeds[1]), &m) };
        let (stable, unstable) = scan_levels(&x, &z);
        prop_assert_eq!(stable_level(&x, &z), stable);
        prop_assert_eq!(unstable_level(&x, &z), unstable);
        let both = stable.zip(unstable).map(|(s, u)| s.max(u));
        prop_assert_eq!(asymptotic_level(&x, &z), both);
    }

    #[test]
    fn groupoid_laws(m in matrix_strategy(), seed in any::<u64>(), direction in direction_strategy()) {
        let (g, h, k) = composable_triple(&mut rng(seed), &m, direction);
        let lhs = g.compose(&h).unwrap().compose(&k).unwrap();
        let rhs = g.compose(&h.compose(&k).unwrap()).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(g.inverse().inverse(), g.clone());
        prop_assert!(g.compose(&g.inverse()).unwrap().is_unit());
        let (pair, n) = g.gamma();
        prop_assert_eq!(GroupoidElement::from_gamma(direction, &pair, n).unwrap(), g.clone());
        prop_assert_eq!(lhs.d_hom(), g.d_hom() + h.d_hom() + k.d_hom());
        prop_assert!(g.compose(&k).is_err() || g.source() == k.range());
    }

    #[test]
    fn power_sums_are_one_cocycles(
        m in matrix_strategy(),
        seed in any::<u64>(),
        direction in direction_strategy(),
        n in -8i64..8,
        k in -8i64..8,
    ) {
        let x = random_point(&mut rng(seed), &m);
        let f = table_fn(&m, seed);
        let sum = |y: &Point, j: i64| power_sum(&f, y, j, direction).unwrap();
        prop_assert_eq!(sum(&x, n), naive_power_sum(&f, &x, n, direction));
        prop_assert_eq!(sum(&x, n) + sum(&direction.step(&x, n), k), sum(&x, n + k));
        let c = LocallyConstantFn::constant(seed as i64 % 5);
        prop_assert_eq!(power_sum(&c, &x, n, direction).unwrap(), n * (seed as i64 % 5));
    }

    #[test]
    fn potential_cocycles_are_two_cocycles(
        m in matrix_strategy(),
        seed in any::<u64>(),
        direction in direction_strategy(),
        bilateral in any::<bool>(),
    ) {
        let mut r = rng(seed);
        let x = random_point(&mut r, &m);
        let z = perturb(&mut r, &m, &x);
        let w = perturb(&mut r, &m, &z);
        let sum = if bilateral { SumKind::Bilateral } else { SumKind::Forward };
        let d = PotentialCocycle::new(table_fn(&m, seed), sum);
        let dv = |a: &Point, b: &Point| d.eval_points(a, b, direction).unwrap();
        prop_assert_eq!(dv(&x, &z) + dv(&z, &w), dv(&x, &w));
        prop_assert_eq!(dv(&x, &z), -dv(&z, &x));
        prop_assert_eq!(dv(&x, &x), 0);
        let flat = PotentialCocycle::new(LocallyConstantFn::constant(4), sum);
        prop_assert_eq!(flat.eval_points(&x, &w, direction).unwrap(), 0);
        // Forward sums telescope against one step of the dynamics.
        if !bilateral {
            let g = d.potential();
            let moved = (direction.step(&x, 1), direction.step(&z, 1));
            prop_assert_eq!(dv(&x, &z) - dv(&moved.0, &moved.1), g.eval(&x).unwrap() - g.eval(&z).unwrap());
        }
    }

    #[test]
    fn limits_come_from_tails(m in matrix_strategy(), seed in any::<u64>()) {
        let x = random_point(&mut rng(seed), &m);
        let far = 4 * (x.offset().abs() + x.right_start().abs()) as usize + 40;
        let omega = omega_limit(&x);
        let alpha = alpha_limit(&x);
        prop_assert_eq!(omega.len(), x.right_tail().len());
        prop_assert_eq!(alpha.len(), x.left_tail().len());
        prop_assert!(omega.iter().chain(&alpha).all(|p| p.is_periodic() && m.admits(p)));
        for q in 0..x.right_tail().len() {
            let n = (far + q) as i64;
            prop_assert!(omega.iter().any(|p| p.window(-20, 20) == x.shift(n).window(-20, 20)));
        }
        for q in 0..x.left_tail().len() {
            let n = (far + q) as i64;
            prop_assert!(alpha.iter().any(|p| p.window(-20, 20) == x.shift(-n).window(-20, 20)));
        }
        let lap = least_asymptotic_period(&x) as i64;
        prop_assert_eq!(stable_level(&x.shift(lap), &x).is_some(), true);
        prop_assert!(stable_level(&eta_s(&x), &x).is_some());
        prop_assert!(unstable_level(&eta_u(&x), &x).is_some());
    }
}

fn bundle_family(name: &str) -> (smale_sft::acoe::LoadedBundle, FamilyDescriptor) {
    let loaded = load_bundle(&instance(name)).unwrap();
    (
        loaded,
        FamilyDescriptor {
            radius: 4,
            tails: 3,
            periods: 4,
        },
    )
}

#[test]
fn asymptotic_flips_move_pairs_and_orbits() {
    for (name, epsilon) in [("inverse.toml", -1), ("higher-block.toml", 1), ("reversal.toml", -1)] {
        let (loaded, desc) = bundle_family(name);
        let b = &loaded.bundle;
        let sf = Family::build(&b.source.matrix, desc);
        let tf = Family::build(&b.target.matrix, desc);
        let report = asymptotic_flip_check(&b.h, &b.h_inv, epsilon, &b.source, &b.target, &sf, &tf);
        assert!(report.passed(), "{name}: {report:?}");
        assert_eq!(report.xi1.max_level, Some(0), "{name}");
        let window = b.h.window().unwrap();
        for (&n, &image) in &report.level_map {
            assert!(image <= n + window, "{name}: level {n} maps to {image}");
        }
    }
}

#[test]
fn doubled_cocycle_is_not_an_asymptotic_flip() {
    let (loaded, desc) = bundle_family("c1-two.toml");
    let b = &loaded.bundle;
    let sf = Family::build(&b.source.matrix, desc);
    let report = asymptotic_flip_check(&b.h, &b.h_inv, 2, &b.source, &b.target, &sf, &sf);
    assert!(!report.xi1.report.passed());
}

#[test]
fn conjugacies_transport_brackets() {
    let golden = golden();
    let (code, _) = SlidingBlockCode::higher_block(&golden, 2);
    let family = Family::build(
        &golden,
        FamilyDescriptor {
            radius: 4,
            tails: 3,
            periods: 4,
        },
    );
    let block = PointMap::Block(code);
    let report = bracket_transport_check(&block, 1, &family.points, 1).unwrap();
    assert!(report.passed() && report.checked > 100, "{report:?}");
    let report = bracket_transport_check(&PointMap::Reversal, -1, &family.points, 1).unwrap();
    assert!(report.passed(), "{report:?}");
    let report = bracket_transport_check(&PointMap::Reversal, 1, &family.points, 1).unwrap();
    assert!(!report.passed());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn varphi_is_a_homomorphism(
        which in 0usize..3,
        seed in any::<u64>(),
    ) {
        let name = ["inverse.toml", "higher-block.toml", "reversal.toml"][which];
        let loaded = load_bundle(&instance(name)).unwrap();
        let b = &loaded.bundle;
        let (g, h, _) = composable_triple(&mut rng(seed), &b.source.matrix, b.source.direction);
        let varphi = build_varphi(b);
        let image = |e: &GroupoidElement| varphi.apply(e).map_err(|e| TestCaseError::fail(e.to_string()));
        let gh = g.compose(&h).unwrap();
        prop_assert_eq!(image(&gh)?, image(&g)?.compose(&image(&h)?).unwrap());
        prop_assert_eq!(image(&g.inverse())?, image(&g)?.inverse());
        prop_assert_eq!(varphi.apply_inverse(&image(&g)?).unwrap(), g.clone());
        let pair = AsymptoticPair::new(g.range().clone(), b.source.step(g.source(), -g.n())).unwrap();
        prop_assert_eq!(pair.level(), g.gamma().0.level());
    }
}

#[test]
fn compatibility_with_zero_cocycle_forces_constants() {
    for (name, m) in matrices() {
        let family = Family::build(
            &m,
            FamilyDescriptor {
                radius: 3,
                tails: 2,
                periods: 3,
            },
        );
        let mut candidates: Vec<LocallyConstantFn> = (0..6).map(|seed| table_fn(&m, seed)).collect();
        candidates.push(LocallyConstantFn::constant(5));
        for c in &candidates {
            let r = check_condition_1(c, &PotentialCocycle::zero(), &family.pairs, Direction::Forward).unwrap();
            let values: Vec<i64> = family.points.iter().map(|x| c.eval(x).unwrap()).collect();
            let spread = values.iter().max().unwrap() - values.iter().min().unwrap();
            assert_eq!(r.passed(), spread == 0, "{name}: spread {spread}");
            assert!(!r.divergent(), "{name}: {r:?}");
        }
    }
}
