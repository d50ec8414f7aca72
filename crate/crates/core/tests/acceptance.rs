//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Samplers are fully deterministic (fixed base seeds, derived streams) and
//! draw instances proportioned like the experiment defaults. Where a
//! criterion verifies a structural relationship, the sampler conditions on
//! that relationship's premises: interior static demand for the welfare
//! comparison, a concave schedule functional for the greedy comparison,
//! symmetric instances for the fairness comparison.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use std::time::Instant;

use socialmarket::experiments::{Experiment, ExperimentConfig, SweepParameter};
use socialmarket::market_model::{
    build_matrices, demand_margins, is_contracting, MarketParams, ModelMatrices,
};
use socialmarket::numerics::{dot, inf_norm_vec, is_positive_definite, spectral_radius};
use socialmarket::rng::{derive_seed, SplitMix64};
use socialmarket::sequential_pricing::{
    infinite_horizon_revenue, infinite_horizon_welfare, limit_demand, run_sequential,
    step4_prices, symmetric_closed_forms, OrderPolicy, PriceConvention, VisitOrder,
};
use socialmarket::simultaneous_pricing::{
    is_schedule_concave, price_slope, run_greedy, schedule_revenue, solve_simultaneous,
    solve_simultaneous_lenient,
};
use socialmarket::social_graph::{generate_er, SocialGraph};
use socialmarket::static_pricing::solve_static;

fn criterion(name: &str, body: impl FnOnce()) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("ACCEPTANCE {name}: PASS"),
        Err(cause) => {
            println!("ACCEPTANCE {name}: FAIL");
            resume_unwind(cause);
        }
    }
}

fn assert_close(actual: f64, expected: f64, tol: f64, what: &str) {
    assert!(
        (actual - expected).abs() <= tol * expected.abs().max(1.0),
        "{what}: expected {expected}, got {actual}"
    );
}

const BASE: u64 = 0x5EED_CAFE;

/// One draw of a paper-proportioned instance: n in [2, 20], edge probability
/// in [0.2, 0.9], tie mean in [2, 8], congestion in [6, 14], coefficients
/// around means 1 and 20, floored at 0.01. `sigma_a` controls the linear
/// coefficient spread: 1.0 matches the experiment defaults, 0.25 keeps the
/// draws clear of the floor so interior instances are common.
fn draw_instance(idx: u64, attempt: u64, sigma_a: f64) -> (MarketParams, SocialGraph) {
    let mut shape = SplitMix64::new(derive_seed(BASE, &[idx]));
    let n = 2 + shape.next_below(19) as usize;
    let p_e = 0.2 + 0.7 * shape.next_f64();
    let mu_g = 2.0 + 6.0 * shape.next_f64();
    let c = 6.0 + 8.0 * shape.next_f64();
    let graph = generate_er(n, p_e, mu_g, derive_seed(BASE, &[idx, attempt, 1])).unwrap();
    let mut prng = SplitMix64::new(derive_seed(BASE, &[idx, attempt, 2]));
    let a: Vec<f64> = (0..n)
        .map(|_| prng.next_normal(1.0, sigma_a).max(0.01))
        .collect();
    let b: Vec<f64> = (0..n).map(|_| prng.next_normal(20.0, 1.0).max(0.01)).collect();
    (MarketParams::new(a, b, c).unwrap(), graph)
}

/// Rejection sampler over [`draw_instance`]: demand-boundedness margins and
/// contraction always hold; `require_interior` additionally conditions on a
/// nonnegative static solution. Returns `None` when the attempt budget runs
/// out for a structurally hostile parameter combination.
fn sample_bounded(
    idx: u64,
    require_interior: bool,
    sigma_a: f64,
    max_attempts: u64,
) -> Option<ModelMatrices> {
    for attempt in 0..max_attempts {
        let (params, graph) = draw_instance(idx, attempt, sigma_a);
        if demand_margins(&params, &graph).iter().any(|m| *m <= 0.0) {
            continue;
        }
        if !is_contracting(&params, &graph) {
            continue;
        }
        if require_interior {
            // Cheap interior gate before the full operator assembly.
            let (m_op, _) = socialmarket::market_model::operator_pair(&params, &graph);
            let x_hat = match socialmarket::numerics::solve_linear(&m_op, params.a()) {
                Ok(x) => x,
                Err(_) => continue,
            };
            if x_hat.iter().any(|x| *x < -1e-12) {
                continue;
            }
        }
        let matrices = match build_matrices(&params, &graph) {
            Ok(m) => m,
            Err(_) => continue,
        };
        return Some(matrices);
    }
    None
}

fn instances(count: usize, require_interior: bool, tag: u64) -> Vec<ModelMatrices> {
    instances_with(count, require_interior, 1.0, tag)
}

fn instances_with(count: usize, require_interior: bool, sigma_a: f64, tag: u64) -> Vec<ModelMatrices> {
    // Deterministic despite the parallel map: instances are keyed by idx and
    // collected in idx order.
    let base_idx = tag.wrapping_mul(1_000_003);
    let mut out = Vec::with_capacity(count);
    let mut next = 0u64;
    while out.len() < count {
        let batch: Vec<Option<ModelMatrices>> = (next..next + 64)
            .into_par_iter()
            .map(|i| sample_bounded(base_idx + i, require_interior, sigma_a, 300))
            .collect();
        for m in batch.into_iter().flatten() {
            if out.len() < count {
                out.push(m);
            }
        }
        next += 64;
    }
    out
}

/// Spearman rank correlation for short series without ties.
fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut order: Vec<usize> = (0..v.len()).collect();
        order.sort_by(|&i, &j| v[i].partial_cmp(&v[j]).unwrap());
        let mut r = vec![0.0; v.len()];
        for (rank, &i) in order.iter().enumerate() {
            r[i] = rank as f64;
        }
        r
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = xs.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for i in 0..xs.len() {
        cov += (rx[i] - mean) * (ry[i] - mean);
        vx += (rx[i] - mean) * (rx[i] - mean);
        vy += (ry[i] - mean) * (ry[i] - mean);
    }
    cov / (vx * vy).sqrt()
}

#[test]
fn c01_dynamic_dominates_static() {
    criterion("c01 revenue and welfare dominance over the static baseline", || {
        let start = Instant::now();
        // Interior-conditioned: the welfare comparison presumes the interior
        // regime (its premises fail with negative demand components), so the
        // linear coefficients are drawn clear of the positivity floor.
        for m in instances_with(200, true, 0.25, 1) {
            let stat = solve_static(&m).unwrap();
            let pi_d = infinite_horizon_revenue(&m).unwrap();
            let u_d = infinite_horizon_welfare(&m).unwrap();
            assert!(
                pi_d >= stat.revenue * (1.0 - 1e-9),
                "revenue: {pi_d} < {}",
                stat.revenue
            );
            assert!(
                u_d >= stat.welfare * (1.0 - 1e-9),
                "welfare: {u_d} < {}",
                stat.welfare
            );
        }
        let elapsed = start.elapsed();
        assert!(
            elapsed.as_secs_f64() < 10.0,
            "took {elapsed:?}, budget 10 s"
        );
    });
}

#[test]
fn c02_period_revenue_is_visit_order_invariant() {
    criterion("c02 sequential-visit revenue invariant across visit orders", || {
        let mut rng = SplitMix64::new(derive_seed(BASE, &[2, 2]));
        for m in instances(20, false, 2) {
            let n = m.n();
            let traj = run_sequential(
                &m,
                5,
                PriceConvention::Anticipatory,
                &OrderPolicy::Fixed(VisitOrder::identity(n)),
            )
            .unwrap();
            for k in 1..=5 {
                let y_prev = if k == 1 {
                    vec![0.0; n]
                } else {
                    traj.cumulative(k - 1).to_vec()
                };
                let x = traj.demand(k);
                let mut reference = None;
                for _ in 0..10 {
                    let mut perm: Vec<usize> = (0..n).collect();
                    for i in 0..n {
                        let j = i + rng.next_below((n - i) as u64) as usize;
                        perm.swap(i, j);
                    }
                    let order = VisitOrder::new(perm).unwrap();
                    let p = step4_prices(&m, &order, &y_prev, x).unwrap();
                    let revenue = dot(&p, x);
                    match reference {
                        None => reference = Some(revenue),
                        Some(r) => assert!(
                            (revenue - r).abs() <= 1e-10 * r.abs().max(1.0),
                            "period {k}: {revenue} vs {r}"
                        ),
                    }
                }
            }
        }
    });
}

#[test]
fn c03_convergence_and_truncation_bounds() {
    criterion("c03 cumulative demand converges; closed form matches partial sums", || {
        for m in instances(10, false, 3) {
            let y_inf = limit_demand(&m).unwrap();
            let rho = spectral_radius(m.transition(), 1e-13, 50_000);
            assert!(rho.converged && rho.value < 1.0);

            // K with rho^K < 1e-8 (two extra decades absorb the similarity
            // constants between the transition and its symmetrized form).
            let k_star = ((1e-10f64).ln() / rho.value.ln()).ceil().max(1.0) as usize;
            let periods = k_star.max(200);
            let traj = run_sequential(
                &m,
                periods,
                PriceConvention::Anticipatory,
                &OrderPolicy::Fixed(VisitOrder::identity(m.n())),
            )
            .unwrap();
            let deviation: Vec<f64> = traj
                .cumulative(k_star)
                .iter()
                .zip(&y_inf)
                .map(|(a, b)| a - b)
                .collect();
            let rel = inf_norm_vec(&deviation) / inf_norm_vec(&y_inf);
            assert!(rel < 1e-8, "relative deviation {rel} at K={k_star}");

            // Truncation consistency at every K <= 200 under the geometric
            // tail bound (plus a machine-precision floor for the summation).
            let pi_d = infinite_horizon_revenue(&m).unwrap();
            let pi_1 = traj.per_period_revenue()[0];
            let mut partial = 0.0;
            for k in 1..=200 {
                partial += traj.per_period_revenue()[k - 1];
                let tail_bound = rho.value.powi(2 * k as i32) / (1.0 - rho.value * rho.value)
                    * pi_1
                    * (1.0 + 1e-9)
                    + 1e-12 * pi_d.abs().max(1.0);
                let gap = (pi_d - partial).abs();
                assert!(
                    gap <= tail_bound,
                    "K={k}: |closed form - partial| = {gap} > bound {tail_bound}"
                );
            }
        }
    });
}

#[test]
fn c04_symmetric_closed_forms_match_matrix_pipeline() {
    criterion("c04 symmetric-instance closed forms match the matrix pipeline", || {
        // The two-user anchor first: x(1) = 1/4.1.
        let anchor = symmetric_closed_forms(1.0, 1.0, 0.5, 0.2, 2, 1, 1).unwrap();
        assert!((anchor.x_k - 1.0 / 4.1).abs() <= 1e-15);
        assert!((anchor.x_k - 0.24390243902439024).abs() <= 1e-12);

        let mut shape = SplitMix64::new(derive_seed(BASE, &[4]));
        let mut checked = 0;
        while checked < 50 {
            let n = 2 + shape.next_below(9) as usize;
            let a = 0.5 + shape.next_f64() * 2.0;
            let b = 0.5 + shape.next_f64() * 2.0;
            let c = shape.next_f64() * 0.6;
            // Stay inside the boundedness margin: 2b + nc > (n-1) g.
            let g_cap = (2.0 * b + n as f64 * c) / (n as f64 - 1.0);
            let g = shape.next_f64() * 0.9 * g_cap;
            if symmetric_closed_forms(a, b, g, c, n, 1, 1).is_err() {
                continue;
            }
            checked += 1;

            let params = MarketParams::uniform(n, a, b, c).unwrap();
            let m = build_matrices(&params, &SocialGraph::complete(n, g)).unwrap();
            let traj = run_sequential(
                &m,
                6,
                PriceConvention::Step4,
                &OrderPolicy::Fixed(VisitOrder::identity(n)),
            )
            .unwrap();
            for k in 1..=6 {
                for pos in 1..=n {
                    let forms = symmetric_closed_forms(a, b, g, c, n, k, pos).unwrap();
                    let x = traj.demand(k)[pos - 1];
                    let p = traj.prices(k)[pos - 1];
                    assert!(
                        (forms.x_k - x).abs() <= 1e-12 * x.abs().max(1.0),
                        "demand mismatch at n={n} k={k}"
                    );
                    assert!(
                        (forms.p_km - p).abs() <= 1e-12 * p.abs().max(1.0),
                        "price mismatch at n={n} k={k} pos={pos}"
                    );
                }
            }
        }
    });
}

#[test]
fn c05_simultaneous_plan_structure() {
    criterion("c05 constant demand, affine prices, slope identity, exact scalar plan", || {
        // Exact scalar oracle: two periods, unit coefficients, no congestion.
        let params = MarketParams::uniform(1, 1.0, 1.0, 0.0).unwrap();
        let scalar = build_matrices(&params, &SocialGraph::empty(1)).unwrap();
        let plan = solve_simultaneous(&scalar, 2).unwrap();
        assert!((plan.x_star[0] - 1.0 / 6.0).abs() <= 1e-12);
        assert!((plan.prices[0][0] - 2.0 / 3.0).abs() <= 1e-12);
        assert!((plan.prices[1][0] - 1.0 / 3.0).abs() <= 1e-12);
        assert!((plan.revenue - 1.0 / 6.0).abs() <= 1e-12);

        // Random instances: affine prices and the slope identity. These are
        // sign-independent identities, so the lenient solver is used and no
        // interior conditioning applies.
        for (i, m) in instances(25, false, 5).into_iter().enumerate() {
            let horizon = 3 + (i % 5);
            let (plan, _) = solve_simultaneous_lenient(&m, horizon).unwrap();
            let slope = price_slope(&m, horizon).unwrap();
            for u in 0..m.n() {
                for k in 0..horizon.saturating_sub(2) {
                    let second = plan.prices[k + 2][u] - 2.0 * plan.prices[k + 1][u]
                        + plan.prices[k][u];
                    assert!(second.abs() <= 1e-10, "second difference {second}");
                }
                if horizon >= 2 {
                    let delta = (plan.prices[1][u] - plan.prices[0][u]) * (horizon as f64 + 1.0);
                    assert!(
                        (delta - slope.phi[u]).abs() <= 1e-10 * slope.phi[u].abs().max(1.0),
                        "slope identity: {delta} vs {}",
                        slope.phi[u]
                    );
                }
            }
        }

        // Negative slopes on 100 homogeneous bounded instances.
        let mut shape = SplitMix64::new(derive_seed(BASE, &[55]));
        let mut checked = 0;
        while checked < 100 {
            let n = 2 + shape.next_below(11) as usize;
            let p_e = 0.3 + 0.6 * shape.next_f64();
            let mu_g = 0.2 + 1.3 * shape.next_f64();
            let c = shape.next_f64() * 0.5;
            let graph = generate_er(n, p_e, mu_g, shape.next_u64()).unwrap();
            let params = MarketParams::uniform(n, 1.0, 1.0, c).unwrap();
            if demand_margins(&params, &graph).iter().any(|m| *m <= 0.0) {
                continue;
            }
            let m = match build_matrices(&params, &graph) {
                Ok(m) => m,
                Err(_) => continue,
            };
            if !(is_positive_definite(m.m()) && is_positive_definite(m.cumulative_op())) {
                continue;
            }
            checked += 1;
            let slope = price_slope(&m, 5).unwrap();
            assert!(
                slope.phi.iter().all(|p| *p < 0.0),
                "nonnegative slope on homogeneous instance"
            );
        }

        // First-order optimality of the revenue functional at the plan.
        for m in instances(5, false, 56) {
            let horizon = 4;
            let (plan, _) = solve_simultaneous_lenient(&m, horizon).unwrap();
            let schedule: Vec<Vec<f64>> = (0..horizon).map(|_| plan.x_star.clone()).collect();
            for k in 0..horizon {
                for u in 0..m.n() {
                    let h = 1e-6 * plan.x_star[u].abs().max(1.0);
                    let mut up = schedule.clone();
                    up[k][u] += h;
                    let mut down = schedule.clone();
                    down[k][u] -= h;
                    let gradient =
                        (schedule_revenue(&m, &up) - schedule_revenue(&m, &down)) / (2.0 * h);
                    assert!(gradient.abs() <= 1e-8, "gradient {gradient}");
                }
            }
        }
    });
}

#[test]
fn c06_greedy_never_beats_rational() {
    criterion("c06 myopic revenue bounded by the rational plan", || {
        // Exact scalar anchor.
        let params = MarketParams::uniform(1, 1.0, 1.0, 0.0).unwrap();
        let scalar = build_matrices(&params, &SocialGraph::empty(1)).unwrap();
        let greedy = run_greedy(&scalar, 2).total_revenue();
        assert!((greedy - 0.15625).abs() <= 1e-15);
        assert!(greedy < solve_simultaneous(&scalar, 2).unwrap().revenue);

        // 50 instances where the schedule functional is concave (the regime
        // in which the stationary plan is the maximum).
        let mut collected = 0;
        let mut idx = 6_000_000u64;
        while collected < 50 {
            idx += 1;
            let Some(m) = sample_bounded(idx, false, 1.0, 300) else {
                continue;
            };
            let horizon = 2 + (idx % 7) as usize;
            if !is_schedule_concave(&m, horizon) {
                continue;
            }
            collected += 1;
            // Concavity plus stationarity makes the plan the global maximum
            // of the schedule functional, whatever the demand signs.
            let (rational_plan, _) = solve_simultaneous_lenient(&m, horizon).unwrap();
            let rational = rational_plan.revenue;
            let myopic = run_greedy(&m, horizon).total_revenue();
            assert!(
                myopic <= rational * (1.0 + 1e-9) + 1e-12,
                "greedy {myopic} > rational {rational}"
            );
        }
    });
}

#[test]
fn c07_fair_reordering_shrinks_spread() {
    criterion("c07 fair reordering never widens the utility spread", || {
        let mut shape = SplitMix64::new(derive_seed(BASE, &[7]));
        let mut checked = 0;
        while checked < 20 {
            let n = 2 + shape.next_below(7) as usize;
            let b = 0.5 + shape.next_f64() * 2.0;
            let c = shape.next_f64() * 0.4;
            let g_cap = (2.0 * b + n as f64 * c) / (n as f64 - 1.0);
            let g = shape.next_f64() * 0.9 * g_cap;
            let params = MarketParams::uniform(n, 1.0, b, c).unwrap();
            let graph = SocialGraph::complete(n, g);
            if demand_margins(&params, &graph).iter().any(|m| *m <= 0.0) {
                continue;
            }
            let m = match build_matrices(&params, &graph) {
                Ok(m) => m,
                Err(_) => continue,
            };
            if !(is_positive_definite(m.m()) && is_positive_definite(m.cumulative_op())) {
                continue;
            }
            checked += 1;
            let fixed = run_sequential(
                &m,
                50,
                PriceConvention::Step4,
                &OrderPolicy::Fixed(VisitOrder::identity(n)),
            )
            .unwrap();
            let fair =
                run_sequential(&m, 50, PriceConvention::Step4, &OrderPolicy::RoundRobinFair)
                    .unwrap();
            let spread_fixed = fixed.utility_spread(50, &m).unwrap();
            let spread_fair = fair.utility_spread(50, &m).unwrap();
            assert!(
                spread_fair <= spread_fixed + 1e-12,
                "fair {spread_fair} > fixed {spread_fixed} (n={n}, g={g}, c={c})"
            );
        }
    });
}

#[test]
fn c08_desk_scale_trends() {
    criterion("c08 comparison trends across parameter grids at desk scale", || {
        let start = Instant::now();
        let config = ExperimentConfig::default(); // 50 users, 50 runs, 50 periods
        let experiment = Experiment::new(config).unwrap();

        let extract = |sweep: &socialmarket::experiments::SweepResult| -> Vec<f64> {
            sweep
                .metric_means("pi_d")
                .into_iter()
                .map(|m| m.expect("mean over retained runs"))
                .collect()
        };

        // Grids stay within the region where the demand recursion
        // contracts at the default scale (mid-range edge probabilities, low
        // congestion and strong mean ties all push the cumulative operator
        // indefinite at n = 50, where the infinite-horizon metrics stop
        // existing).
        let pe_grid = [0.8, 0.85, 0.9, 0.95, 1.0];
        let pe_means = extract(&experiment.sweep(SweepParameter::EdgeProbability, &pe_grid).unwrap());
        let rho_pe = spearman(&pe_grid, &pe_means);
        assert!(rho_pe >= 0.9, "revenue not increasing in edge probability: {rho_pe}");

        let c_grid = [8.0, 10.0, 12.0, 14.0, 16.0];
        let c_means = extract(&experiment.sweep(SweepParameter::Congestion, &c_grid).unwrap());
        let rho_c = spearman(&c_grid, &c_means);
        assert!(rho_c <= -0.9, "revenue not decreasing in congestion: {rho_c}");

        let n_grid = [10.0, 20.0, 30.0, 40.0, 50.0];
        let n_means = extract(&experiment.sweep(SweepParameter::Users, &n_grid).unwrap());
        let rho_n = spearman(&n_grid, &n_means);
        assert!(rho_n >= 0.9, "revenue not increasing in users: {rho_n}");

        let g_grid = [2.0, 3.5, 5.0, 6.5, 8.0];
        let g_means = extract(&experiment.sweep(SweepParameter::TieMean, &g_grid).unwrap());
        let rho_g = spearman(&g_grid, &g_means);
        assert!(rho_g >= 0.9, "revenue not increasing in tie mean: {rho_g}");

        // Zero-tie control: records are bitwise constant along the grid.
        let sweeps: Vec<String> = [0.2, 0.6, 1.0]
            .iter()
            .map(|pe| {
                let cfg = ExperimentConfig {
                    zero_ties: true,
                    runs: 5,
                    p_e: *pe,
                    ..ExperimentConfig::default()
                };
                let exp = Experiment::new(cfg).unwrap();
                (0..5)
                    .map(|r| serde_json::to_string(&exp.run_instance(r).unwrap()).unwrap())
                    .collect::<Vec<_>>()
                    .join("\n")
            })
            .collect();
        assert_eq!(sweeps[0], sweeps[1]);
        assert_eq!(sweeps[1], sweeps[2]);

        let elapsed = start.elapsed();
        assert!(
            elapsed.as_secs_f64() < 120.0,
            "took {elapsed:?}, budget 120 s"
        );
    });
}

#[test]
fn c09_operator_conditions_hold_numerically() {
    criterion("c09 invertibility residuals and contraction radius", || {
        for m in instances(100, false, 9) {
            let a = m.params().a();
            let x = m.solve_m(a);
            let back = m.m().mul_vec(&x);
            let residual: f64 = back
                .iter()
                .zip(a)
                .map(|(b, a)| (b - a).abs())
                .fold(0.0, f64::max);
            assert!(
                residual <= 1e-10 * inf_norm_vec(a).max(1.0),
                "solve residual {residual}"
            );

            let t_sq = m.transition().mul_mat(m.transition());
            let radius = spectral_radius(&t_sq, 1e-12, 50_000);
            assert!(radius.converged, "radius estimate did not settle");
            assert!(radius.value < 1.0, "squared radius {} >= 1", radius.value);
        }
    });
}

#[test]
fn c10_convergence_window_at_defaults() {
    criterion("c10 cumulative revenue near its limit within 40 periods", || {
        let experiment = Experiment::new(ExperimentConfig::default()).unwrap();
        let trace = experiment.convergence_trace().unwrap();
        let at_40 = trace.points[39].cumulative_revenue;
        let limit = trace.revenue_asymptote;
        let gap = (at_40 - limit).abs() / limit.abs();
        assert!(gap <= 0.01, "relative gap {gap} after 40 periods");
    });
}

#[test]
fn c11_cli_byte_determinism() {
    criterion("c11 identical seeds give identical bytes, any thread count", || {
        let bin = env!("CARGO_BIN_EXE_socialmarket");
        let args = [
            "sweep", "--n", "12", "--runs", "6", "--periods", "10", "--horizon", "10",
            "--param", "pe", "--grid", "0.2,0.5,0.8", "--seed", "31415", "--format", "csv",
        ];
        let run = |threads: &str| -> (Vec<u8>, std::process::ExitStatus) {
            let out = std::process::Command::new(bin)
                .args(args)
                .env("RAYON_NUM_THREADS", threads)
                .output()
                .expect("binary runs");
            (out.stdout, out.status)
        };
        let (first, status) = run("4");
        assert!(status.success());
        let (second, _) = run("4");
        assert_eq!(first, second, "same thread count, different bytes");
        let (serial, _) = run("1");
        assert_eq!(first, serial, "thread count changed the bytes");
        let (wide, _) = run("8");
        assert_eq!(first, wide, "thread count changed the bytes");

        // A JSON solve is byte-stable too.
        let solve_args = ["seqdp", "--n", "8", "--seed", "7", "--periods", "12"];
        let a = std::process::Command::new(bin)
            .args(solve_args)
            .output()
            .unwrap();
        let b = std::process::Command::new(bin)
            .args(solve_args)
            .output()
            .unwrap();
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    });
}
