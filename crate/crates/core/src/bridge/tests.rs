use super::*;
use crate::energy::{is_stable, EnergyFunctional, MaxAbs2D, TvSteps, WeightedL1};
use crate::error::Error;
use crate::eris::{check_energetic, ErisPath};
use crate::gsflow::{check_constant_speed_affine, check_edb, solve_exact, solve_prox, sup_distance, SpeedProfile};
use crate::oracle::{self, EigenPair};
use crate::space::{Space, SpaceVec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn e2(x: f64, y: f64) -> SpaceVec {
    Space::euclidean(2).unwrap().vec(vec![x, y]).unwrap()
}

fn t_star() -> f64 {
    5f64.sqrt() / 2.0
}

fn corner_profile() -> SpeedProfile {
    SpeedProfile::new(vec![0.0, 0.5, 1.125], vec![1.0, 2.0 / 5f64.sqrt(), 0.0], f64::INFINITY)
}

fn two_jump() -> ErisPath {
    ErisPath::staircase(&[0.0, 1.0, t_star()], &[e2(1.0, 0.25), e2(0.5, 0.25), e2(0.0, 0.0)]).unwrap()
}

#[test]
fn build_s_corner() {
    let s = build_s(&corner_profile());
    for (t, expect) in [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (1.0 + 1e-12, 0.5), (1.1, 0.5), (t_star(), 0.5), (1.2, 1.125), (50.0, 1.125)] {
        assert_eq!(s.eval(t), expect, "t = {t}");
    }
    assert_eq!(s.eval_right(1.0), 0.5);
    assert_eq!(s.domain_end(), f64::INFINITY);
    let jumps = s.jumps();
    assert_eq!(jumps.len(), 2);
    assert_eq!((jumps[0].x, jumps[0].left, jumps[0].right), (1.0, 0.0, 0.5));
    assert_eq!((jumps[1].left, jumps[1].right), (0.5, 1.125));
    assert!((jumps[1].x - t_star()).abs() < 1e-15);
}

#[test]
fn build_s_trivial_and_eigen_profiles() {
    let zero = build_s(&SpeedProfile::new(vec![0.0], vec![0.0], f64::INFINITY));
    assert!(zero.jumps().is_empty());
    assert_eq!(zero.eval(7.0), 0.0);

    let rho = 0.8;
    let eigen = build_s(&SpeedProfile::new(vec![0.0, 2.5 * rho], vec![2.0 / 5f64.sqrt(), 0.0], f64::INFINITY));
    assert_eq!(eigen.eval(1.0), 0.0);
    assert_eq!(eigen.eval(t_star()), 0.0);
    assert_eq!(eigen.eval(1.2), 2.5 * rho);
}

#[test]
fn build_s_truncated_profile() {
    let s = build_s(&SpeedProfile::new(vec![0.0, 1.0], vec![2.0, 0.5], 3.0));
    assert_eq!(s.domain_end(), 2.0);
    assert_eq!(s.jumps().len(), 1);
    assert_eq!(s.eval(2.0), 1.0);
}

#[test]
fn plateaus_and_jumps_are_dual() {
    let profile = corner_profile();
    let s = build_s(&profile);
    let jump_times: Vec<f64> = s.jumps().iter().map(|k| k.x).collect();
    let speeds: Vec<f64> = profile.speeds.iter().filter(|g| **g > 0.0).map(|g| 1.0 / g).collect();
    assert_eq!(jump_times, speeds);
    let plateau_values: Vec<f64> = s.plateaus().iter().map(|p| p.2).collect();
    assert_eq!(plateau_values, profile.breakpoints);
}

#[test]
fn gs_to_eris_corner() {
    let flow = solve_exact(&MaxAbs2D::new(), &e2(1.0, 0.25), f64::INFINITY).unwrap();
    let path = gs_to_eris(&flow).unwrap();
    let reference = two_jump();
    assert_eq!(path.knots().len(), reference.knots().len());
    for (a, b) in path.knots().iter().zip(reference.knots()) {
        assert!((a.t - b.t).abs() < 1e-15);
        assert!(a.left.dist(&b.left) < 1e-15 && a.right.dist(&b.right) < 1e-15);
    }
    assert!(check_energetic(&path, &MaxAbs2D::new()).pass());
}

#[test]
fn gs_to_eris_zero_and_eigen() {
    let j = MaxAbs2D::new();
    let zero = gs_to_eris(&solve_exact(&j, &e2(0.0, 0.0), f64::INFINITY).unwrap()).unwrap();
    assert!(zero.jumps().is_empty() && zero.terminal().is_zero());

    let pair = EigenPair::new(&j, e2(2.0, 1.0), 1.0).unwrap();
    let path = gs_to_eris(&pair.trajectory()).unwrap();
    for k in 0..400 {
        let t = k as f64 * 0.01;
        if (t - pair.t_star()).abs() < 1e-9 {
            continue;
        }
        assert!(path.eval(t).dist(&oracle::eigen_eris(&pair, t)) < 1e-14, "t = {t}");
    }
    assert_eq!(path.jumps().len(), 1);
}

#[test]
fn s_hat_two_jump_path() {
    let m = build_s_hat(&two_jump());
    let jumps = m.jumps();
    assert_eq!(jumps.len(), 2);
    assert!((jumps[0].right - jumps[0].left - 0.5).abs() < 1e-15);
    assert!((jumps[1].right - jumps[1].left - 0.625).abs() < 1e-15);
    assert!((m.eval(100.0) - 1.125).abs() < 1e-15);
    assert_eq!(m.eval(1.0), 0.0);
    assert_eq!(build_s_hat(&ErisPath::constant(e2(1.0, 1.0))).eval(5.0), 0.0);
}

#[test]
fn s_hat_on_moving_piece() {
    let knots = vec![
        crate::eris::Knot::continuous(0.0, e2(0.0, 0.0)),
        crate::eris::Knot::continuous(2.0, e2(6.0, 8.0)),
    ];
    let path = ErisPath::new(knots, crate::eris::Interpolation::PiecewiseLinear).unwrap();
    let m = build_s_hat(&path);
    // Speed 5: s_hat(t) = 5 t^2 / 2.
    for t in [0.0, 0.5, 1.3, 2.0, 3.0] {
        assert!((m.eval(t) - 2.5 * t.min(2.0).powi(2)).abs() < 1e-13);
    }
    assert!((m.inverse(2.5) - 1.0).abs() < 1e-15);
}

#[test]
fn eris_to_gs_two_jump_path() {
    let j = MaxAbs2D::new();
    let flow = eris_to_gs(&two_jump(), &j).unwrap();
    let reference = oracle::exact_maxabs_trajectory(&e2(1.0, 0.25));
    assert!(sup_distance(&flow, &reference) <= 1e-10);
    assert!(flow.at_rest());
    assert!(check_edb(&flow, &j, 0.0, 2.0).abs() <= 1e-12);
    assert!(check_constant_speed_affine(&flow, 1e-12).pass);
}

#[test]
fn eris_to_gs_eigen_and_constant() {
    let j = MaxAbs2D::new();
    let pair = EigenPair::new(&j, e2(2.0, 1.0), 0.6).unwrap();
    let path = gs_to_eris(&pair.trajectory()).unwrap();
    let flow = eris_to_gs(&path, &j).unwrap();
    for k in 0..300 {
        let s = k as f64 * 0.01;
        assert!(flow.eval(s).dist(&oracle::eigen_gs(&pair, s)) < 1e-14);
    }
    let zero = eris_to_gs(&ErisPath::constant(e2(0.0, 0.0)), &j).unwrap();
    assert!(zero.eval(3.0).is_zero());
    let stable = ErisPath::constant(e2(3.0, 1.0)).with_horizon(0.5).unwrap();
    let flow = eris_to_gs(&stable, &j).unwrap();
    assert_eq!(flow.eval(1.0), e2(3.0, 1.0));
}

#[test]
fn eris_to_gs_rejects_non_energetic_paths() {
    let shifted =
        ErisPath::staircase(&[0.0, 1.1, t_star()], &[e2(1.0, 0.25), e2(0.5, 0.25), e2(0.0, 0.0)]).unwrap();
    assert!(matches!(eris_to_gs(&shifted, &MaxAbs2D::new()), Err(Error::NotEnergetic { .. })));
}

#[test]
fn roundtrip_maxabs_and_zero() {
    let j = MaxAbs2D::new();
    for d in [Direction::GsFirst, Direction::ErisFirst] {
        assert!(roundtrip_residual(&j, &e2(1.0, 0.25), d).unwrap() <= 1e-10);
        assert_eq!(roundtrip_residual(&j, &e2(0.0, 0.0), d).unwrap(), 0.0);
    }
}

#[test]
fn roundtrip_weighted_l1_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.gen_range(1..6);
        let space = Space::new((0..n).map(|_| rng.gen_range(0.2..2.0)).collect()).unwrap();
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let j = WeightedL1::new(space.clone(), a).unwrap();
        let u0 = space.vec((0..n).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap();
        for d in [Direction::GsFirst, Direction::ErisFirst] {
            let r = roundtrip_residual(&j, &u0, d).unwrap();
            assert!(r <= 1e-10, "{d:?}: {r}");
        }
    }
}

#[test]
fn roundtrip_tv_steps_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let mut b = vec![0.0];
        for _ in 0..4 {
            b.push(b.last().unwrap() + rng.gen_range(0.3..1.5));
        }
        let j = TvSteps::new(b).unwrap();
        let u0 = j.space().vec((0..4).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
        for d in [Direction::GsFirst, Direction::ErisFirst] {
            let r = roundtrip_residual(&j, &u0, d).unwrap();
            assert!(r <= 1e-10, "{d:?}: {r}");
        }
    }
}

#[test]
fn reparametrizations_are_monotone_and_left_continuous() {
    let space = Space::new(vec![0.5, 1.0, 1.5]).unwrap();
    let j = WeightedL1::new(space.clone(), vec![1.0, 0.7, 0.3]).unwrap();
    let u0 = space.vec(vec![1.0, -2.0, 0.4]).unwrap();
    let flow = solve_exact(&j, &u0, f64::INFINITY).unwrap();
    let s = build_s(&flow.speed_profile());
    let path = gs_to_eris(&flow).unwrap();
    let s_hat = build_s_hat(&path);
    for m in [&s, &s_hat] {
        assert_eq!(m.monotonicity_violation(), 0.0);
        for k in m.jumps() {
            assert_eq!(m.eval(k.x), k.left);
            assert!(m.eval(k.x + 1e-12) >= k.right);
        }
        let mut prev = 0.0;
        for k in 0..2000 {
            let v = m.eval(k as f64 * 0.005);
            assert!(v >= prev);
            prev = v;
        }
    }
    // S(t) <= t sqrt(2) |w(0)|.
    for k in 1..500 {
        let t = k as f64 * 0.02;
        assert!(s.eval(t) <= t * 2f64.sqrt() * u0.norm());
    }
}

#[test]
fn sigma_hat_below_identity() {
    let m = build_s_hat(&two_jump());
    for k in 0..=112 {
        let s = k as f64 * 0.01;
        let sig = sigma_hat(&m, s);
        assert!(sig <= s + 1e-15);
        let inside_fill = s > 0.0 && s < 1.125;
        assert_eq!(sig < s, inside_fill, "s = {s}");
    }
}

#[test]
fn stability_transport_and_step_estimate() {
    let j = MaxAbs2D::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..30 {
        let u0 = e2(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let flow = solve_exact(&j, &u0, f64::INFINITY).unwrap();
        let times = flow.times();
        for k in 0..flow.segments() {
            let mid = 0.5 * (times[k] + times[k + 1]);
            let speed = flow.segment_velocity(k).norm();
            assert!(is_stable(&j, &flow.eval(mid), 1.0 / speed));
        }
        let path = gs_to_eris(&flow).unwrap();
        let filled = eris_to_gs(&path, &j).unwrap();
        let s_hat = build_s_hat(&path);
        for _ in 0..50 {
            let s1 = rng.gen_range(0.0..3.0);
            let s2 = s1 + rng.gen_range(0.0..1.0);
            let t1 = s_hat.inverse(s1);
            if t1 > 0.0 {
                assert!(filled.eval(s2).dist(&filled.eval(s1)) <= (s2 - s1) / t1 + 1e-12);
            }
        }
        for k in 0..filled.segments() {
            let t = s_hat.inverse(0.5 * (filled.times()[k] + filled.times()[k + 1]));
            assert!((filled.segment_velocity(k).norm() - 1.0 / t).abs() < 1e-12);
        }
    }
}

#[test]
fn sampled_trajectory_uses_monotone_profile() {
    let j = MaxAbs2D::new();
    let flow = solve_prox(&j, &e2(1.0, 0.2371), 1e-3, 2.0).unwrap();
    let (profile, adjust) = monotone_speed_profile(&flow);
    assert!(profile.is_nonincreasing(0.0));
    assert!(adjust < 1e-6);
    let path = gs_to_eris(&flow).unwrap();
    let jumps: Vec<f64> = path.jumps().iter().filter(|k| k.size() > 1e-3).map(|k| k.t).collect();
    assert_eq!(jumps.len(), 2);
    assert!((jumps[0] - 1.0).abs() < 1e-2 && (jumps[1] - t_star()).abs() < 1e-2, "{jumps:?}");
}

/// Nonincreasing least-squares fit by the min-max formula.
fn isotonic_oracle(v: &[f64], w: &[f64]) -> Vec<f64> {
    let n = v.len();
    let avg = |a: usize, b: usize| {
        let (s, m) = (a..=b).fold((0.0, 0.0), |(s, m), i| (s + v[i] * w[i], m + w[i]));
        s / m
    };
    (0..n)
        .map(|i| (0..=i).map(|k| (i..n).map(|l| avg(k, l)).fold(f64::NEG_INFINITY, f64::max)).fold(f64::INFINITY, f64::min))
        .collect()
}

#[test]
fn isotonic_examples() {
    let (fit, adjust) = isotonic_nonincreasing(&[3.0, 1.0, 2.0, 0.0], &[1.0; 4]);
    assert_eq!(fit, vec![3.0, 1.5, 1.5, 0.0]);
    assert_eq!(adjust, 0.5);
    let (fit, adjust) = isotonic_nonincreasing(&[2.0, 1.0], &[1.0, 1.0]);
    assert_eq!((fit, adjust), (vec![2.0, 1.0], 0.0));
}

proptest! {
    #[test]
    fn isotonic_matches_min_max_formula(
        v in prop::collection::vec(-5.0f64..5.0, 1..9),
        w in prop::collection::vec(0.1f64..3.0, 9),
    ) {
        let w = &w[..v.len()];
        let (fit, _) = isotonic_nonincreasing(&v, w);
        let oracle = isotonic_oracle(&v, w);
        for (a, b) in fit.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!(fit.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn roundtrip_random_maxabs(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let j = MaxAbs2D::new();
        prop_assert!(roundtrip_residual(&j, &e2(x, y), Direction::GsFirst).unwrap() <= 1e-10);
        prop_assert!(roundtrip_residual(&j, &e2(x, y), Direction::ErisFirst).unwrap() <= 1e-10);
    }

    #[test]
    fn gs_to_eris_is_energetic(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let j = MaxAbs2D::new();
        let path = gs_to_eris(&solve_exact(&j, &e2(x, y), f64::INFINITY).unwrap()).unwrap();
        let report = check_energetic(&path, &j);
        prop_assert!(report.pass(), "{:?}", report);
        prop_assert!(crate::eris::check_jump_relations(&path, &j).pass());
    }
}
