//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line.

use std::io::Write;
use std::path::Path;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rateflow::bridge::{gs_to_eris, roundtrip_residual, Direction};
use rateflow::energy::{
    is_stable, Degenerate2D, EnergyFunctional, MaxAbs2D, SingularAlpha, TvSteps, WeightedL1,
};
use rateflow::eris::{
    check_decay_lemma, check_jump_relations, solve_incremental, ErisPath, RadialExample, RadialGrid,
    RadialProfile, Interpolation,
};
use rateflow::gsflow::{
    check_decay_bounds, check_edb, check_evi, fit_decay_exponent, solve_exact, solve_ode, solve_ode_on_mesh,
    solve_prox, sup_distance, sup_distance_piecewise_constant, GsTrajectory,
};
use rateflow::oracle::{
    exact_maxabs, exact_maxabs_trajectory, limit_degenerate, limit_singular, m_invariant, phi_alpha, EigenPair,
};
use rateflow::{Space, SpaceVec};
use serde_json::json;

fn verdict(id: u32, title: &str, pass: bool, detail: String) {
    let line = format!("\ncriterion {id:02} {}: {title} ({detail})\n", if pass { "PASS" } else { "FAIL" });
    // Written past the test harness so the line survives output capture.
    match std::fs::OpenOptions::new().append(true).open("/dev/stderr") {
        Ok(mut f) => {
            let _ = f.write_all(line.as_bytes());
        }
        Err(_) => eprint!("{line}"),
    }
    assert!(pass, "{line}");
}

fn e2(x: f64, y: f64) -> SpaceVec {
    Space::euclidean(2).unwrap().vec(vec![x, y]).unwrap()
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Hand-derived flow from `(1, 1/4)`: the first coordinate shrinks at unit
/// rate until it meets the diagonal at `s = 1/2`, then both shrink along it
/// with `|u1| + |u2|/2 = 9/8 - s`.
fn hand_flow(s: f64) -> (f64, f64) {
    if s <= 0.5 {
        (1.0 - s, 0.25)
    } else {
        let c = ((2.25 - 2.0 * s) / 5.0).max(0.0);
        (2.0 * c, c)
    }
}

fn random_tv(rng: &mut ChaCha8Rng, n: usize) -> (TvSteps, SpaceVec) {
    let mut y = vec![0.0];
    for _ in 0..n {
        y.push(y.last().unwrap() + rng.gen_range(0.2..1.5));
    }
    let tv = TvSteps::new(y).unwrap();
    let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let u0 = tv.space().vec(alpha).unwrap();
    (tv, u0)
}

fn random_l1(rng: &mut ChaCha8Rng) -> (WeightedL1, SpaceVec) {
    let n = rng.gen_range(2..=4);
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
    let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
    let j = WeightedL1::new(Space::new(weights).unwrap(), a).unwrap();
    let u0 = j.space().vec((0..n).map(|_| rng.gen_range(-3.0..3.0)).collect()).unwrap();
    (j, u0)
}

#[test]
fn c01_closed_form_flow() {
    let j = MaxAbs2D::new();
    let traj = solve_exact(&j, &e2(1.0, 0.25), f64::INFINITY).unwrap();
    let mut err: f64 = 0.0;
    for k in 0..=15_000 {
        let s = k as f64 * 1e-4;
        let (x, y) = hand_flow(s);
        err = err.max(traj.eval(s).dist(&e2(x, y))).max(traj.eval(s).dist(&exact_maxabs(&e2(1.0, 0.25), s)));
    }
    let extinct = traj.at_rest() && traj.last().is_zero();
    let pass = err <= 1e-12 && extinct && traj.end() == 9.0 / 8.0;
    verdict(1, "exact max-abs flow and extinction time", pass, format!("sup error {err:e}, extinction at {}", traj.end()));
}

#[test]
fn c02_minimizing_movement_convergence() {
    let j = MaxAbs2D::new();
    let u0 = e2(1.0, 0.25);
    let reference = exact_maxabs_trajectory(&u0);
    let hs = [4e-3, 2e-3, 1e-3];
    let errs: Vec<f64> = hs
        .iter()
        .map(|&h| sup_distance_piecewise_constant(&solve_prox(&j, &u0, h, 1.5).unwrap(), &reference))
        .collect();
    let order = ls_slope(&hs.map(f64::ln), &errs.iter().map(|e| e.ln()).collect::<Vec<_>>());
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let pass = monotone && order >= 0.9 && errs[2] <= 5e-3;
    verdict(2, "prox scheme converges at first order", pass, format!("errors {:?}, order {order:.3}", errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>()));
}

#[test]
fn c03_energy_dissipation_balance() {
    let exact_cases: Vec<(Box<dyn EnergyFunctional>, SpaceVec)> = {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (l1, l1u) = random_l1(&mut rng);
        let (tv, tvu) = random_tv(&mut rng, 4);
        vec![
            (Box::new(MaxAbs2D::new()), e2(1.0, 0.25)),
            (Box::new(MaxAbs2D::new()), e2(-0.3, 1.7)),
            (Box::new(l1), l1u),
            (Box::new(tv), tvu),
        ]
    };
    let mut exact_worst: f64 = 0.0;
    for (j, u0) in &exact_cases {
        let traj = solve_exact(j.as_ref(), u0, f64::INFINITY).unwrap();
        for w in traj.times().windows(2) {
            exact_worst = exact_worst.max(check_edb(&traj, j.as_ref(), w[0], w[1]));
        }
        exact_worst = exact_worst.max(check_edb(&traj, j.as_ref(), 0.0, traj.end()));
    }

    // C_h = residual / h on [0, end] for unaligned data; C must not grow
    // under halving.
    let prox_cases: Vec<(Box<dyn EnergyFunctional>, SpaceVec)> = vec![
        (Box::new(MaxAbs2D::new()), e2(1.0, 0.2371)),
        (Box::new(WeightedL1::unit(vec![1.0, 0.7, 1.9]).unwrap()), Space::euclidean(3).unwrap().vec(vec![0.913, -0.4417, 1.3]).unwrap()),
    ];
    let hs = [4e-3, 2e-3, 1e-3, 5e-4];
    let mut constants = Vec::new();
    let mut stable = true;
    for (j, u0) in &prox_cases {
        let cs: Vec<f64> = hs
            .iter()
            .map(|&h| {
                let traj = solve_prox(j.as_ref(), u0, h, 2.0).unwrap();
                check_edb(&traj, j.as_ref(), 0.0, traj.end()) / h
            })
            .collect();
        stable &= cs.iter().all(|&c| c <= 2.0 * cs[0]);
        constants.push(cs);
    }
    let pass = exact_worst <= 1e-12 && stable;
    verdict(3, "energy-dissipation balance", pass, format!("exact {exact_worst:e}, prox C_h {constants:.3?}"));
}

#[test]
fn c04_evi_and_a_priori_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (l1, l1u) = random_l1(&mut rng);
    let (tv, tvu) = random_tv(&mut rng, 4);
    let mut cases: Vec<(&str, GsTrajectory, Box<dyn EnergyFunctional>)> = Vec::new();
    let maxabs = MaxAbs2D::new();
    cases.push(("maxabs2d", solve_exact(&maxabs, &e2(1.0, 0.25), f64::INFINITY).unwrap(), Box::new(maxabs)));
    cases.push(("weighted_l1", solve_exact(&l1, &l1u, f64::INFINITY).unwrap(), Box::new(l1)));
    cases.push(("tv_steps", solve_exact(&tv, &tvu, f64::INFINITY).unwrap(), Box::new(tv)));
    let deg = Degenerate2D::new();
    cases.push(("degenerate2d", solve_ode(&deg, &e2(0.5, 1.0), 1e-3, 5.0).unwrap(), Box::new(deg)));
    let sing = SingularAlpha::new(2.0).unwrap();
    cases.push(("singular_alpha", solve_ode(&sing, &e2(1.0, 1.0), 1e-3, 5.0).unwrap(), Box::new(sing)));

    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for (_, traj, j) in &cases {
        let j = j.as_ref();
        let exact = traj.velocities().is_some();
        let n0 = traj.initial().norm();
        let radius = 2.0 * n0 + 1.0;
        let horizon = if exact { traj.end() + 1.0 } else { traj.end() };
        for _ in 0..1000 {
            let v = traj.space().zeros().map(|_| rng.gen_range(-radius..=radius));
            // Sampled trajectories are probed at their nodes only.
            let pick = |rng: &mut ChaCha8Rng| {
                if exact {
                    rng.gen_range(0.0..=horizon)
                } else {
                    traj.times()[rng.gen_range(0..traj.times().len())]
                }
            };
            let (a, b) = (pick(&mut rng), pick(&mut rng));
            let (r, s) = (a.min(b), a.max(b));
            let evi = check_evi(traj, j, &v, r, s);
            let speed = if exact {
                traj.right_derivative(s).norm()
            } else {
                j.smooth_grad(&traj.eval(s)).unwrap().norm()
            };
            let apriori = if s > 0.0 { speed - 2f64.sqrt() * n0 / s } else { 0.0 };
            let residual = evi.max(apriori);
            worst = worst.max(residual);
            if residual > 1e-9 {
                violations += 1;
            }
        }
        let decay = check_decay_bounds(traj, j, 1e-9);
        if !decay.energy_integrable.pass {
            violations += 1;
        }
    }
    verdict(4, "EVI and a-priori bounds on random probes", violations == 0, format!("{violations} violations, worst {worst:e}"));
}

#[test]
fn c05_conserved_quantities_and_limits() {
    let sing = SingularAlpha::new(2.0).unwrap();
    let u0 = e2(1.0, 1.0);
    let traj = solve_ode(&sing, &u0, 1e-4, 10.0).unwrap();
    let phi0 = phi_alpha(&u0, 2.0);
    let phi_drift = traj.values().iter().map(|w| (phi_alpha(w, 2.0) - phi0).abs()).fold(0.0, f64::max);

    let deg = Degenerate2D::new();
    let d0 = e2(0.5, 1.0);
    let dtraj = solve_ode(&deg, &d0, 1e-4, 10.0).unwrap();
    let m0 = m_invariant(&d0);
    let m_drift = dtraj.values().iter().map(|w| (m_invariant(w) - m0).abs()).fold(0.0, f64::max);

    let far = solve_ode(&sing, &u0, 1e-3, 200.0).unwrap();
    let sing_gap = far.last().dist(&limit_singular(&u0, 2.0));
    let far = solve_ode(&deg, &d0, 1e-3, 200.0).unwrap();
    let deg_gap = far.last().dist(&limit_degenerate(&d0));
    let target = (5f64 / 3.0).sqrt();
    let pass = phi_drift <= 1e-6 && m_drift <= 1e-6 && sing_gap <= 1e-4 && deg_gap <= 1e-4;
    verdict(
        5,
        "first integrals and limit points",
        pass,
        format!(
            "Phi drift {phi_drift:e}, M drift {m_drift:e}, |w(200) - (0, {target:.6})| = {sing_gap:e}, |w(200) - (M/2, 0)| = {deg_gap:e}"
        ),
    );
}

#[test]
fn c06_decay_exponents() {
    let sing = SingularAlpha::new(2.0).unwrap();
    let u0 = e2(1.0, 1.0);
    let limit = limit_singular(&u0, 2.0);
    let traj = solve_ode(&sing, &u0, 1e-3, 200.0).unwrap();
    let tail: Vec<(f64, f64)> = traj.times().iter().zip(traj.values()).map(|(&s, w)| (s, w.dist(&limit))).collect();
    let tail_slope = fit_decay_exponent(&tail, (50.0, 200.0)).unwrap();

    let start = e2(1.0, 1e-6);
    let mut mesh = vec![0.0];
    let mut s = 1e-28;
    while s < 0.1 {
        mesh.push(s);
        s *= 1.01;
    }
    let early = solve_ode_on_mesh(&sing, &start, &mesh).unwrap();
    let speeds: Vec<(f64, f64)> = early
        .times()
        .iter()
        .zip(early.values())
        .skip(1)
        .map(|(&s, w)| (s, sing.smooth_grad(w).unwrap().norm()))
        .collect();
    let startup_slope = fit_decay_exponent(&speeds, (1e-16, 1e-8)).unwrap();
    let pass = (tail_slope + 1.0).abs() <= 0.1 && (startup_slope + 0.75).abs() <= 0.1;
    verdict(6, "decay and startup exponents", pass, format!("tail {tail_slope:.4}, startup {startup_slope:.4}"));
}

/// Stability of `u` at time `t` for the max-abs functional, read off the
/// piecewise description with `diag` as the end of the diagonal phase.
fn table_verdict(u: (f64, f64), t: f64, diag: f64) -> bool {
    let (a, b) = (u.0.abs(), 2.0 * u.1.abs());
    if (a == 0.0 && b == 0.0) || t <= 0.5 {
        true
    } else if t <= 1.0 {
        a >= b
    } else if t <= diag {
        a == b
    } else {
        false
    }
}

/// Eight compass directions plus the diagonal `|u1| = 2|u2|` and its mirror.
fn fan() -> Vec<(f64, f64)> {
    let mut dirs: Vec<(f64, f64)> =
        (0..8).map(|k| k as f64 * std::f64::consts::FRAC_PI_4).map(|a| (a.cos(), a.sin())).collect();
    for (x, y) in [(2.0, 1.0), (-2.0, 1.0), (2.0, -1.0), (-2.0, -1.0), (1.0, 2.0), (-1.0, 2.0), (1.0, -2.0), (-1.0, -2.0)] {
        dirs.push((x, y));
    }
    dirs
}

#[test]
fn c07_stability_table() {
    let j = MaxAbs2D::new();
    let times = [0.3, 0.8, 1.05, 1.3];
    let mismatches = |diag: f64| {
        fan()
            .into_iter()
            .flat_map(|u| times.map(move |t| (u, t)))
            .filter(|&((x, y), t)| is_stable(&j, &e2(x, y), t) != table_verdict((x, y), t, diag))
            .count()
    };
    let corrected = mismatches(5f64.sqrt() / 2.0);
    let printed = mismatches(2.0 / 5f64.sqrt());
    let pass = corrected == 0 && printed > 0;
    verdict(
        7,
        "stability table with threshold sqrt(5)/2",
        pass,
        format!("{} cases, {corrected} mismatches; threshold 2/sqrt(5) gives {printed}", fan().len() * times.len()),
    );
}

#[test]
fn c08_incremental_solver() {
    let j = MaxAbs2D::new();
    let u0 = e2(1.0, 0.25);
    let reference = gs_to_eris(&solve_exact(&j, &u0, f64::INFINITY).unwrap()).unwrap();
    let targets = [1.0, 5f64.sqrt() / 2.0];
    let mut localized = true;
    let mut value_err: f64 = 0.0;
    let mut details = Vec::new();
    for h in [1e-2, 1e-3] {
        let path = solve_incremental(&j, &u0, h, 1.5).unwrap();
        let times: Vec<f64> = path.jumps().iter().map(|k| k.t).collect();
        let ok = times.len() == 2 && times.iter().zip(targets).all(|(t, r)| (t - r).abs() <= h);
        localized &= ok;
        // Between and after the jumps, outside an h-band around them.
        let mut err: f64 = 0.0;
        for k in 0..=1500 {
            let t = k as f64 * 1e-3;
            if targets.iter().chain(&times).all(|&x| (t - x).abs() > h) {
                err = err.max(path.eval(t).dist(&reference.eval(t)));
            }
        }
        value_err = value_err.max(err);
        details.push(format!("h={h}: jumps {times:.5?}, value error {err:.3e}"));
    }
    let pass = localized && value_err <= 1e-12;
    verdict(8, "incremental jumps and values", pass, details.join("; "));
}

#[test]
fn c09_eigen_solutions_and_jump_relations() {
    let j = MaxAbs2D::new();
    let pair = EigenPair::new(&j, e2(2.0, 1.0), 1.0).unwrap();
    let t_star = pair.t_star();
    let path = gs_to_eris(&pair.trajectory()).unwrap();
    let mut eigen_err: f64 = 0.0;
    let mut ts: Vec<f64> = (0..=3000).map(|k| k as f64 * 1e-3).collect();
    ts.extend([t_star - 2e-9, t_star + 2e-9]);
    for t in ts.into_iter().filter(|t| (t - t_star).abs() >= 1e-9) {
        eigen_err = eigen_err.max(path.eval(t).dist(&pair.eris(t)));
    }
    let star_ok = (t_star - 5f64.sqrt() / 2.0).abs() < 1e-15;

    let section = gs_to_eris(&solve_exact(&j, &e2(1.0, 0.25), f64::INFINITY).unwrap()).unwrap();
    let report = check_jump_relations(&section, &j);
    let worst = report.checks().iter().map(|c| c.worst).fold(0.0, f64::max);
    let pass = eigen_err <= 1e-12 && star_ok && report.jumps.len() == 2 && worst <= 1e-10;
    verdict(
        9,
        "eigen-solution path and jump relations",
        pass,
        format!("eigen error {eigen_err:e}, t* = {t_star}, {} jumps, worst jump residual {worst:e}", report.jumps.len()),
    );
}

#[test]
fn c10_round_trip() {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut push = |j: &dyn EnergyFunctional, u0: &SpaceVec| {
        for d in [Direction::GsFirst, Direction::ErisFirst] {
            worst = worst.max(roundtrip_residual(j, u0, d).unwrap());
        }
        count += 1;
    };
    let maxabs = MaxAbs2D::new();
    push(&maxabs, &e2(1.0, 0.25));
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..10 {
        push(&maxabs, &e2(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)));
    }
    for seed in 0..50 {
        let (j, u0) = random_l1(&mut ChaCha8Rng::seed_from_u64(seed));
        push(&j, &u0);
    }
    for seed in 0..10 {
        let (tv, u0) = random_tv(&mut ChaCha8Rng::seed_from_u64(100 + seed), 4);
        push(&tv, &u0);
    }
    verdict(10, "bridge round trip", worst <= 1e-10, format!("{count} instances, worst residual {worst:e}"));
}

/// Independent bookkeeping for piecewise-constant paths: the variation is the
/// sum of jumps and the energy integral a sum of rectangles.
fn staircase_gap(path: &ErisPath, j: &dyn EnergyFunctional, t: f64) -> f64 {
    let knots = path.knots();
    let mut var = 0.0;
    let mut integral = 0.0;
    for (k, knot) in knots.iter().enumerate() {
        if knot.t > t {
            break;
        }
        var += knot.left.dist(&knot.right);
        let next = knots.get(k + 1).map_or(t, |n| n.t.min(t));
        integral += j.value(&knot.right) * (next - knot.t);
    }
    var - integral
}

#[test]
fn c11_variation_bound_and_monotonicity() {
    let mut paths: Vec<(ErisPath, Box<dyn EnergyFunctional>)> = Vec::new();
    let maxabs = MaxAbs2D::new();
    for u0 in [e2(1.0, 0.25), e2(-0.3, 1.7), e2(2.0, 1.0)] {
        paths.push((gs_to_eris(&solve_exact(&maxabs, &u0, f64::INFINITY).unwrap()).unwrap(), Box::new(MaxAbs2D::new())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let (j, u0) = random_l1(&mut rng);
        paths.push((gs_to_eris(&solve_exact(&j, &u0, f64::INFINITY).unwrap()).unwrap(), Box::new(j)));
        let (tv, u0) = random_tv(&mut rng, 4);
        paths.push((gs_to_eris(&solve_exact(&tv, &u0, f64::INFINITY).unwrap()).unwrap(), Box::new(tv)));
    }
    let sing = SingularAlpha::new(2.0).unwrap();
    paths.push((gs_to_eris(&solve_ode(&sing, &e2(1.0, 1.0), 1e-2, 20.0).unwrap()).unwrap(), Box::new(sing)));
    let ex = RadialExample::new(RadialProfile::Power { beta: 0.75 }, RadialGrid::Uniform { dx: 0.25, extent: 20.0 }).unwrap();
    paths.push((ex.to_path().unwrap(), Box::new(ex.functional().unwrap())));

    let mut failures = Vec::new();
    let mut worst_gap: f64 = f64::NEG_INFINITY;
    for (i, (path, j)) in paths.iter().enumerate() {
        for c in check_decay_lemma(path, j.as_ref()) {
            if !c.pass {
                failures.push(format!("path {i}: {} {:e}", c.name, c.worst));
            }
            if c.name == "variation_bound" {
                worst_gap = worst_gap.max(c.worst);
            }
        }
        if path.interpolation() == Interpolation::PiecewiseConstant {
            let end = path.last_knot_time() + 1.0;
            for k in 0..=200 {
                let g = staircase_gap(path, j.as_ref(), end * k as f64 / 200.0);
                worst_gap = worst_gap.max(g);
                if g > 1e-10 {
                    failures.push(format!("path {i}: staircase gap {g:e}"));
                }
            }
        }
    }
    verdict(
        11,
        "variation bounded by the energy integral; monotone energy and norm",
        failures.is_empty(),
        format!("{} paths, largest Var - int J {worst_gap:e}, failures {failures:?}", paths.len()),
    );
}

#[test]
fn c12_example_with_infinite_variation() {
    let profile = RadialProfile::Power { beta: 0.75 };
    let times: Vec<f64> = (0..200).map(|k| 0.1 + 0.003 * k as f64).collect();
    let err = |dx: f64| {
        let ex = RadialExample::new(profile, RadialGrid::Uniform { dx, extent: 60.0 }).unwrap();
        let j = ex.functional().unwrap();
        times
            .iter()
            .map(|&t| {
                let s = ex.s_analytic(t).unwrap();
                let u = j.space().vec(ex.initial().iter().map(|&v| (v - s).max(0.0)).collect()).unwrap();
                (j.min_norm_grad(&u).unwrap().norm() - 1.0 / t).abs()
            })
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(0.01), err(0.005));
    let ratio = fine / coarse;
    let halved = (0.3..=0.7).contains(&ratio);

    let log = RadialProfile::Log { beta: 0.75, x_star: 1000.0 };
    let mut rows = Vec::new();
    let mut grows = true;
    for ratio in [1.001, 1.0005, 1.00025] {
        let ex = RadialExample::new(log, RadialGrid::Geometric { ratio, extent: 1e12 }).unwrap();
        let v: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|&r| ex.variation(r, 1.0).unwrap()).collect();
        grows &= v[0] < v[1] && v[1] < v[2] && v[2] > 3.0 * v[0];
        rows.push(v);
    }
    let pass = halved && grows;
    verdict(
        12,
        "discrete stability norm and growing variation",
        pass,
        format!("stability error {coarse:.3e} -> {fine:.3e} (ratio {ratio:.3}); Var[r, 1] {rows:.4?}"),
    );
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).to_string_lossy().into_owned()
}

#[test]
fn c13_negative_controls() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("shifted_jump.csv", vec!["energetic", "jump_relations", "decay_lemma"], 1),
        ("broken_energy.csv", vec!["energetic", "jump_relations"], 1),
        ("unstable_value.csv", vec!["energetic"], 1),
        ("broken_edb.csv", vec!["edb"], 1),
    ];
    let mut outcomes = Vec::new();
    let mut pass = true;
    for (i, (file, checks, expected)) in cases.iter().enumerate() {
        let cfg = json!({"functional": {"kind": "maxabs2d"}, "input": fixture(file), "checks": checks});
        let p = dir.path().join(format!("neg{i}.json"));
        std::fs::write(&p, cfg.to_string()).unwrap();
        let code = Command::new(env!("CARGO_BIN_EXE_rateflow")).arg("run").arg(&p).output().unwrap().status.code();
        pass &= code == Some(*expected);
        outcomes.push(format!("{file}: {code:?}"));
    }
    // The uncorrupted path passes the same checks.
    let j = MaxAbs2D::new();
    let good = gs_to_eris(&solve_exact(&j, &e2(1.0, 0.25), f64::INFINITY).unwrap()).unwrap();
    let csv = dir.path().join("good.csv");
    let mut text = String::from("t,x1,x2,J,stable\n");
    for k in good.knots() {
        for u in if k.is_jump() { vec![&k.left, &k.right] } else { vec![&k.right] } {
            text.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e},1\n", k.t, u.coords()[0], u.coords()[1], j.value(u)));
        }
    }
    std::fs::write(&csv, text).unwrap();
    let cfg = json!({"functional": {"kind": "maxabs2d"}, "input": csv, "checks": ["energetic", "jump_relations", "decay_lemma"]});
    let p = dir.path().join("good.json");
    std::fs::write(&p, cfg.to_string()).unwrap();
    let code = Command::new(env!("CARGO_BIN_EXE_rateflow")).arg("run").arg(&p).output().unwrap().status.code();
    pass &= code == Some(0);
    outcomes.push(format!("uncorrupted: {code:?}"));
    verdict(13, "validators reject corrupted fixtures", pass, outcomes.join(", "));
}

/// Exhaustive active-set minimization of `1/2 p'Hp - b'p` over a box.
fn box_qp(h: &[Vec<f64>], b: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    'outer: for code in 0..3usize.pow(n as u32) {
        let mut p = vec![0.0; n];
        let mut free = Vec::new();
        let mut c = code;
        for i in 0..n {
            match (c % 3, lo[i] == hi[i]) {
                (0, _) => p[i] = lo[i],
                (_, true) => continue 'outer,
                (1, _) => p[i] = hi[i],
                _ => free.push(i),
            }
            c /= 3;
        }
        let m = free.len();
        let mut a = vec![vec![0.0; m + 1]; m];
        for (r, &i) in free.iter().enumerate() {
            for (q, &k) in free.iter().enumerate() {
                a[r][q] = h[i][k];
            }
            a[r][m] = b[i] - (0..n).filter(|k| !free.contains(k)).map(|k| h[i][k] * p[k]).sum::<f64>();
        }
        for col in 0..m {
            let piv = (col..m).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
            if a[piv][col].abs() < 1e-12 {
                continue 'outer;
            }
            a.swap(col, piv);
            for r in 0..m {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for q in col..=m {
                        a[r][q] -= f * a[col][q];
                    }
                }
            }
        }
        for (r, &i) in free.iter().enumerate() {
            p[i] = a[r][m] / a[r][r];
            if p[i] < lo[i] - 1e-12 || p[i] > hi[i] + 1e-12 {
                continue 'outer;
            }
        }
        let obj = 0.5 * (0..n).map(|i| (0..n).map(|k| p[i] * h[i][k] * p[k]).sum::<f64>()).sum::<f64>()
            - (0..n).map(|i| b[i] * p[i]).sum::<f64>();
        if best.as_ref().map_or(true, |(o, _)| obj < *o) {
            best = Some((obj, p));
        }
    }
    best.unwrap().1
}

/// Minimal-norm subgradient of the step-function total variation. The
/// multipliers `sigma_j` sit on the `N + 1` edges (both boundaries included),
/// equal `sign(jump)` where the function jumps, range over `[-1, 1]`
/// elsewhere, and minimize `sum_i (sigma_i - sigma_{i+1})^2 / d_i`.
fn tv_mng_brute_force(breakpoints: &[f64], alpha: &[f64]) -> Vec<f64> {
    let d: Vec<f64> = breakpoints.windows(2).map(|w| w[1] - w[0]).collect();
    let n = d.len();
    let mut padded = vec![0.0];
    padded.extend_from_slice(alpha);
    padded.push(0.0);
    let jumps: Vec<f64> = padded.windows(2).map(|w| w[1] - w[0]).collect();
    // dJ/d(alpha_i) = sigma_i - sigma_{i+1}, divided by d_i in the weighted metric.
    let lo: Vec<f64> = jumps.iter().map(|&x| if x == 0.0 { -1.0 } else { x.signum() }).collect();
    let hi: Vec<f64> = jumps.iter().map(|&x| if x == 0.0 { 1.0 } else { x.signum() }).collect();
    let mut h = vec![vec![0.0; n + 1]; n + 1];
    for (i, di) in d.iter().enumerate() {
        let w = 2.0 / di;
        h[i][i] += w;
        h[i + 1][i + 1] += w;
        h[i][i + 1] -= w;
        h[i + 1][i] -= w;
    }
    let p = box_qp(&h, &vec![0.0; n + 1], &lo, &hi);
    (0..n).map(|i| (p[i] - p[i + 1]) / d[i]).collect()
}

#[test]
fn c14_tv_facets_against_prox_and_box_qp() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut dist: f64 = 0.0;
    for _ in 0..4 {
        let (tv, u0) = random_tv(&mut rng, 4);
        let exact = solve_exact(&tv, &u0, f64::INFINITY).unwrap();
        let prox = solve_prox(&tv, &u0, 1e-4, exact.end() + 0.5).unwrap();
        dist = dist.max(sup_distance(&exact, &prox));
    }
    let mut qp_err: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let (tv, _) = random_tv(&mut rng, n);
        let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(-2i32..=2) as f64 * 0.5).collect();
        let g = tv.min_norm_grad(&tv.space().vec(alpha.clone()).unwrap()).unwrap();
        let oracle = tv_mng_brute_force(tv.breakpoints(), &alpha);
        qp_err = qp_err.max(g.coords().iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    let pass = dist <= 1e-3 && qp_err <= 1e-8;
    verdict(14, "step-function TV: facets vs prox, subgradient vs box QP", pass, format!("sup distance {dist:e}, QP error {qp_err:e}"));
}
