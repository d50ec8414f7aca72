//! Finite-horizon simultaneous pricing.
//!
//! Prices are posted at the start of each period and all users respond at
//! once; influence only travels through *prior*-period demand. With the
//! inverse demand `p_i(k) = a_i + sum_j g_ij y_j(k-1) - c sum_j y_j(k-1)
//! - 2 b_i y_i(k)`, the revenue-optimal demand is constant across the
//! horizon, `x* = ((T+1) Lambda - (T-1)(G - C))^-1 a`, and the price
//! schedule is affine in the period index with per-user slope
//! `Phi_i / (T+1)`.
//!
//! The greedy runner is the one-period-lookahead version of the same
//! machinery: in each period it maximizes current revenue only.

use crate::error::{Error, Result};
use crate::market_model::ModelMatrices;
use crate::numerics::{dot, is_positive_definite, DenseMatrix, LuFactors};
use crate::sequential_pricing::{DemandTrajectory, PriceConvention, VisitOrder};
use crate::static_pricing::NEGATIVE_DEMAND_TOL;

/// Prices beyond this magnitude below zero are recorded as warnings.
const NEGATIVE_PRICE_TOL: f64 = -1e-12;

/// Horizon-`T` pricing plan.
#[derive(Debug, Clone)]
pub struct SimuPlan {
    pub horizon: usize,
    /// Constant per-period demand.
    pub x_star: Vec<f64>,
    /// Price vector for each period `1..=T`.
    pub prices: Vec<Vec<f64>>,
    /// `Xi(T)`, the normalized demand load.
    pub xi: Vec<f64>,
    /// Per-user price slope; period-to-period change is `phi / (T+1)`.
    pub phi: Vec<f64>,
    pub revenue: f64,
    /// `(period, user)` pairs with a negative posted price (a subsidy).
    pub negative_price_periods: Vec<(usize, usize)>,
}

impl SimuPlan {
    pub fn total_demand(&self) -> Vec<f64> {
        self.x_star
            .iter()
            .map(|x| x * self.horizon as f64)
            .collect()
    }
}

fn horizon_operator(matrices: &ModelMatrices, horizon: usize) -> DenseMatrix {
    let n = matrices.n();
    let t = horizon as f64;
    let c = matrices.params().c();
    DenseMatrix::from_fn(n, n, |i, j| {
        let g_minus_c = if i == j { -c } else { matrices.ties()[(i, j)] - c };
        let diag = if i == j { (t + 1.0) * matrices.lambda()[i] } else { 0.0 };
        diag - (t - 1.0) * g_minus_c
    })
}

/// Solves the horizon-`T` problem.
///
/// Demand must come out nonnegative (hard error otherwise); negative prices
/// are legitimate subsidies and are only recorded.
pub fn solve_simultaneous(matrices: &ModelMatrices, horizon: usize) -> Result<SimuPlan> {
    let (plan, negative) = solve_inner(matrices, horizon)?;
    if let Some(&index) = negative.first() {
        return Err(Error::NegativeDemand {
            index,
            value: plan.x_star[index],
        });
    }
    Ok(plan)
}

/// Harness variant: never fails on demand sign, returns the count of
/// negative components instead. The plan's closed forms are finite either
/// way; the sign only marks the instance as outside the interior regime.
pub fn solve_simultaneous_lenient(
    matrices: &ModelMatrices,
    horizon: usize,
) -> Result<(SimuPlan, usize)> {
    let (plan, negative) = solve_inner(matrices, horizon)?;
    Ok((plan, negative.len()))
}

fn solve_inner(matrices: &ModelMatrices, horizon: usize) -> Result<(SimuPlan, Vec<usize>)> {
    assert!(horizon >= 1, "horizon must be at least one period");
    let n = matrices.n();
    let params = matrices.params();
    let t = horizon as f64;

    let s = horizon_operator(matrices, horizon);
    let x_star = LuFactors::new(&s)?.solve(params.a());
    let negative: Vec<usize> = x_star
        .iter()
        .enumerate()
        .filter(|(_, x)| **x < NEGATIVE_DEMAND_TOL)
        .map(|(i, _)| i)
        .collect();

    // p(k) = [(T-k+1) Lambda - (T-k)(G - C)] x*: precompute the two parts.
    let lambda_x: Vec<f64> = matrices
        .lambda()
        .iter()
        .zip(&x_star)
        .map(|(l, x)| l * x)
        .collect();
    let c = params.c();
    let total_x: f64 = x_star.iter().sum();
    let gc_x: Vec<f64> = (0..n)
        .map(|i| dot(matrices.ties().row(i), &x_star) - c * total_x)
        .collect();

    let mut prices = Vec::with_capacity(horizon);
    let mut negative_price_periods = Vec::new();
    let mut revenue = 0.0;
    for k in 1..=horizon {
        let back = t - k as f64;
        let p: Vec<f64> = (0..n)
            .map(|i| (back + 1.0) * lambda_x[i] - back * gc_x[i])
            .collect();
        for (i, &pi) in p.iter().enumerate() {
            if pi < NEGATIVE_PRICE_TOL {
                negative_price_periods.push((k, i));
            }
        }
        revenue += dot(&p, &x_star);
        prices.push(p);
    }

    let slope = price_slope(matrices, horizon)?;
    Ok((
        SimuPlan {
            horizon,
            x_star,
            prices,
            xi: slope.xi,
            phi: slope.phi,
            revenue,
            negative_price_periods,
        },
        negative,
    ))
}

/// `Xi(T)` and the price slope `Phi(T)`.
#[derive(Debug, Clone)]
pub struct PriceSlope {
    pub xi: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Computes `Xi = (I - ((T-1)/(T+1)) (G - C) Lambda^-1)^-1 a` and
/// `Phi_i = sum_j (g_ij - c) Xi_j / (2 b_j) - Xi_i`.
pub fn price_slope(matrices: &ModelMatrices, horizon: usize) -> Result<PriceSlope> {
    assert!(horizon >= 1, "horizon must be at least one period");
    let n = matrices.n();
    let t = horizon as f64;
    let c = matrices.params().c();
    let ratio = (t - 1.0) / (t + 1.0);

    let b_op = DenseMatrix::from_fn(n, n, |i, j| {
        let g_minus_c = if i == j { -c } else { matrices.ties()[(i, j)] - c };
        let id = if i == j { 1.0 } else { 0.0 };
        id - ratio * g_minus_c / matrices.lambda()[j]
    });
    let xi = LuFactors::new(&b_op)?.solve(matrices.params().a());

    let scaled: Vec<f64> = xi
        .iter()
        .zip(matrices.lambda())
        .map(|(x, l)| x / l)
        .collect();
    let total_scaled: f64 = scaled.iter().sum();
    let phi: Vec<f64> = (0..n)
        .map(|i| dot(matrices.ties().row(i), &scaled) - c * total_scaled - xi[i])
        .collect();
    Ok(PriceSlope { xi, phi })
}

/// For homogeneous users (`a_i = a`, `b_i = b` within 1e-12 relative),
/// reports whether every price slope is negative, i.e. whether the posted
/// prices fall over time.
pub fn check_homogeneous_slope(matrices: &ModelMatrices, horizon: usize) -> Result<bool> {
    let params = matrices.params();
    let spread = |v: &[f64]| -> f64 {
        let first = v[0];
        v.iter()
            .map(|x| (x - first).abs())
            .fold(0.0f64, f64::max)
            / first.abs().max(1.0)
    };
    let worst = spread(params.a()).max(spread(params.b()));
    if worst > 1e-12 {
        return Err(Error::NotHomogeneous(worst));
    }
    let slope = price_slope(matrices, horizon)?;
    Ok(slope.phi.iter().all(|p| *p < 0.0))
}

/// Whether the schedule-revenue functional is concave at horizon `T`, i.e.
/// whether the stationary plan of [`solve_simultaneous`] is its global
/// maximum.
///
/// The Hessian block-diagonalizes over the period index into `-S` on
/// constant schedules and `-(Lambda + G - C)` on period-alternating ones;
/// concavity needs both `S` and `Lambda + G - C` positive semidefinite. A
/// large congestion coefficient can push `Lambda + G - C` indefinite, in
/// which case the plan is a saddle and a myopic schedule may out-earn it.
pub fn is_schedule_concave(matrices: &ModelMatrices, horizon: usize) -> bool {
    let n = matrices.n();
    let c = matrices.params().c();
    let s = horizon_operator(matrices, horizon);
    let alternating = DenseMatrix::from_fn(n, n, |i, j| {
        let lam = if i == j { matrices.lambda()[i] } else { 0.0 };
        lam + matrices.ties()[(i, j)] - c
    });
    is_positive_definite(&s) && is_positive_definite(&alternating)
}

/// Revenue of an arbitrary demand schedule under the simultaneous inverse
/// demand; the solver's plan is the stationary point of this functional.
pub fn schedule_revenue(matrices: &ModelMatrices, schedule: &[Vec<f64>]) -> f64 {
    let n = matrices.n();
    let params = matrices.params();
    let c = params.c();
    let mut y = vec![0.0; n];
    let mut revenue = 0.0;
    for x in schedule {
        assert_eq!(x.len(), n, "schedule row length mismatch");
        let total_prev: f64 = y.iter().sum();
        for i in 0..n {
            let network = dot(matrices.ties().row(i), &y);
            let p_i = params.a()[i] + network
                - c * total_prev
                - params.b()[i] * 2.0 * (y[i] + x[i]);
            revenue += p_i * x[i];
        }
        for i in 0..n {
            y[i] += x[i];
        }
    }
    revenue
}

/// One-period-lookahead pricing: each period the operator maximizes current
/// revenue only. With residual value `r_i = a_i + sum_j g_ij y_j
/// - c sum_j y_j - 2 b_i y_i` the myopic optimum is `x_i = max(0, r_i/(4 b_i))`
/// at price `r_i - 2 b_i x_i`.
pub fn run_greedy(matrices: &ModelMatrices, periods: usize) -> DemandTrajectory {
    assert!(periods >= 1, "need at least one period");
    let n = matrices.n();
    let params = matrices.params();
    let c = params.c();

    let mut y = vec![0.0; n];
    let mut xs = Vec::with_capacity(periods);
    let mut ys = Vec::with_capacity(periods);
    let mut ps = Vec::with_capacity(periods);
    let mut revenues = Vec::with_capacity(periods);
    let mut orders = Vec::with_capacity(periods);

    for _ in 0..periods {
        let total_y: f64 = y.iter().sum();
        let mut x = vec![0.0; n];
        let mut p = vec![0.0; n];
        for i in 0..n {
            let residual = params.a()[i] + dot(matrices.ties().row(i), &y)
                - c * total_y
                - 2.0 * params.b()[i] * y[i];
            x[i] = (residual / (4.0 * params.b()[i])).max(0.0);
            p[i] = residual - 2.0 * params.b()[i] * x[i];
        }
        revenues.push(dot(&p, &x));
        for i in 0..n {
            y[i] += x[i];
        }
        xs.push(x);
        ys.push(y.clone());
        ps.push(p);
        orders.push(VisitOrder::identity(n));
    }
    DemandTrajectory::from_parts(PriceConvention::Greedy, xs, ys, ps, revenues, orders)
}
