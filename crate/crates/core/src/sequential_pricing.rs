//! Multi-period sequential pricing.
//!
//! Each period the operator extracts a per-user price and the resulting
//! per-period demand follows the transition recursion
//! `x(k) = M^-1 T^(k-1) a`; cumulative demand converges to `L^-1 a`.
//!
//! Two price conventions are implemented side by side:
//!
//! * [`PriceConvention::Anticipatory`] — `p(k) = a(k) - L x(k)`: every
//!   user's price already reflects all current-period purchases. Order-free;
//!   this is the convention behind the closed-form revenue and welfare.
//! * [`PriceConvention::Step4`] — each user's price reflects prior-period
//!   cumulative demand plus only the current-period purchases of users
//!   visited *earlier* in the period. Individual prices depend on the visit
//!   position, but with symmetric ties the period total does not.
//!
//! The `RoundRobinFair` policy re-sorts the visit order every period so the
//! users with the lowest cumulative utility are visited first, which under
//! `Step4` equalizes utilities over time.

use crate::error::{Error, Result};
use crate::market_model::ModelMatrices;
use crate::numerics::{dot, DenseMatrix, LuFactors};

pub use crate::static_pricing::NEGATIVE_DEMAND_TOL;

/// How per-user prices are formed within a period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PriceConvention {
    Anticipatory,
    Step4,
    /// One-period-lookahead myopic pricing; produced only by the greedy
    /// runner in the simultaneous module.
    Greedy,
}

/// Permutation giving the order users are visited within a period.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct VisitOrder(Vec<usize>);

impl VisitOrder {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &u in &order {
            if u >= n || seen[u] {
                return Err(Error::InvalidConfig(format!(
                    "visit order {order:?} is not a permutation of 0..{n}"
                )));
            }
            seen[u] = true;
        }
        Ok(VisitOrder(order))
    }

    pub fn identity(n: usize) -> Self {
        VisitOrder((0..n).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Visit-order policy across periods.
#[derive(Debug, Clone)]
pub enum OrderPolicy {
    Fixed(VisitOrder),
    /// Sort users ascending by cumulative utility at the previous period,
    /// ties broken by user index. With no history this is the identity.
    RoundRobinFair,
}

/// Realized demand, prices and revenue over `K` periods.
#[derive(Debug, Clone)]
pub struct DemandTrajectory {
    convention: PriceConvention,
    /// Per-period demand, index `k-1`.
    x: Vec<Vec<f64>>,
    /// Cumulative demand through each period.
    y: Vec<Vec<f64>>,
    /// Per-period prices.
    p: Vec<Vec<f64>>,
    per_period_revenue: Vec<f64>,
    orders: Vec<VisitOrder>,
    /// `(period, user)` pairs where demand fell below the tolerance.
    negative_demand: Vec<(usize, usize)>,
}

impl DemandTrajectory {
    /// Assembles a trajectory from per-period series; used by the other
    /// runners in the crate. Negative-demand flags are derived from `x`.
    pub(crate) fn from_parts(
        convention: PriceConvention,
        x: Vec<Vec<f64>>,
        y: Vec<Vec<f64>>,
        p: Vec<Vec<f64>>,
        per_period_revenue: Vec<f64>,
        orders: Vec<VisitOrder>,
    ) -> Self {
        let mut negative_demand = Vec::new();
        for (t, xs) in x.iter().enumerate() {
            for (i, &xi) in xs.iter().enumerate() {
                if xi < NEGATIVE_DEMAND_TOL {
                    negative_demand.push((t + 1, i));
                }
            }
        }
        DemandTrajectory {
            convention,
            x,
            y,
            p,
            per_period_revenue,
            orders,
            negative_demand,
        }
    }

    pub fn periods(&self) -> usize {
        self.x.len()
    }

    pub fn n(&self) -> usize {
        self.x.first().map_or(0, Vec::len)
    }

    pub fn convention(&self) -> PriceConvention {
        self.convention
    }

    /// Demand in period `k` (1-based).
    pub fn demand(&self, k: usize) -> &[f64] {
        &self.x[k - 1]
    }

    /// Cumulative demand through period `k` (1-based).
    pub fn cumulative(&self, k: usize) -> &[f64] {
        &self.y[k - 1]
    }

    pub fn prices(&self, k: usize) -> &[f64] {
        &self.p[k - 1]
    }

    pub fn order(&self, k: usize) -> &VisitOrder {
        &self.orders[k - 1]
    }

    pub fn per_period_revenue(&self) -> &[f64] {
        &self.per_period_revenue
    }

    pub fn total_revenue(&self) -> f64 {
        self.per_period_revenue.iter().sum()
    }

    pub fn negative_demand(&self) -> &[(usize, usize)] {
        &self.negative_demand
    }

    /// Cumulative utility of user `i` through period `k`; `k = 0` is the
    /// empty history.
    pub fn cumulative_user_utility(
        &self,
        i: usize,
        k: usize,
        matrices: &ModelMatrices,
    ) -> Result<f64> {
        if k > self.periods() {
            return Err(Error::IndexOutOfRange {
                k,
                len: self.periods(),
            });
        }
        if k == 0 {
            return Ok(0.0);
        }
        let y = self.cumulative(k);
        let payments: f64 = (0..k).map(|t| self.p[t][i] * self.x[t][i]).sum();
        Ok(user_cumulative_value(i, y, matrices) - payments)
    }

    /// Max minus min cumulative utility at period `k`.
    pub fn utility_spread(&self, k: usize, matrices: &ModelMatrices) -> Result<f64> {
        let utilities: Result<Vec<f64>> = (0..self.n())
            .map(|i| self.cumulative_user_utility(i, k, matrices))
            .collect();
        let utilities = utilities?;
        let max = utilities.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = utilities.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(max - min)
    }
}

/// Gross-side value of user `i` at cumulative demand `y` (payments excluded).
fn user_cumulative_value(i: usize, y: &[f64], matrices: &ModelMatrices) -> f64 {
    let params = matrices.params();
    let yi = y[i];
    let network = dot(matrices.ties().row(i), y);
    let total: f64 = y.iter().sum();
    params.a()[i] * yi - params.b()[i] * yi * yi + yi * network
        - 0.5 * params.c() * total * total
}

/// Demand in period `k`: `M^-1 T^(k-1) a`, computed by iterating the
/// transition operator on a running coefficient vector.
pub fn demand_step(matrices: &ModelMatrices, k: usize) -> Vec<f64> {
    assert!(k >= 1, "periods are 1-based");
    let mut a_k = matrices.params().a().to_vec();
    for _ in 1..k {
        a_k = matrices.transition().mul_vec(&a_k);
    }
    matrices.solve_m(&a_k)
}

/// Infinite-horizon cumulative demand `L^-1 a`.
pub fn limit_demand(matrices: &ModelMatrices) -> Result<Vec<f64>> {
    let lu = LuFactors::new(matrices.cumulative_op())?;
    Ok(lu.solve(matrices.params().a()))
}

/// Order-free prices `p(k) = a(k) - L x(k)`.
pub fn anticipatory_prices(matrices: &ModelMatrices, k: usize) -> Vec<f64> {
    assert!(k >= 1, "periods are 1-based");
    let mut a_k = matrices.params().a().to_vec();
    for _ in 1..k {
        a_k = matrices.transition().mul_vec(&a_k);
    }
    let x = matrices.solve_m(&a_k);
    let lx = matrices.cumulative_op().mul_vec(&x);
    a_k.iter().zip(&lx).map(|(a, l)| a - l).collect()
}

/// Position-dependent prices for one period of the sequential visit scheme.
///
/// For the user at visit position `m` (0-based position in `order`):
/// `p_i = a_i - 2 b_i (y_i + x_i) + sum_j g_ij y_j
///        + sum_{j visited earlier} g_ji x_j - c y_i
///        - c sum_{j visited earlier} x_j`
/// where `y` is cumulative demand through the previous period and `x` the
/// current-period demand. Requires symmetric ties; the period total
/// `sum p_i x_i` is then identical for every visit order.
pub fn step4_prices(
    matrices: &ModelMatrices,
    order: &VisitOrder,
    y_prev: &[f64],
    x: &[f64],
) -> Result<Vec<f64>> {
    let n = matrices.n();
    assert_eq!(order.as_slice().len(), n, "order size mismatch");
    for i in 0..n {
        for j in (i + 1)..n {
            if matrices.ties()[(i, j)] != matrices.ties()[(j, i)] {
                return Err(Error::AsymmetricTies { i, j });
            }
        }
    }

    let params = matrices.params();
    let c = params.c();
    let mut prices = vec![0.0; n];
    let mut visited: Vec<usize> = Vec::with_capacity(n);
    let mut visited_demand = 0.0;
    for &user in order.as_slice() {
        let network_history = dot(matrices.ties().row(user), y_prev);
        let network_current: f64 = visited
            .iter()
            .map(|&j| matrices.ties()[(j, user)] * x[j])
            .sum();
        prices[user] = params.a()[user]
            - 2.0 * params.b()[user] * (y_prev[user] + x[user])
            + network_history
            + network_current
            - c * y_prev[user]
            - c * visited_demand;
        visited.push(user);
        visited_demand += x[user];
    }
    Ok(prices)
}

/// Runs the sequential scheme for `periods` periods.
pub fn run_sequential(
    matrices: &ModelMatrices,
    periods: usize,
    convention: PriceConvention,
    policy: &OrderPolicy,
) -> Result<DemandTrajectory> {
    assert!(periods >= 1, "need at least one period");
    if convention == PriceConvention::Greedy {
        return Err(Error::InvalidConfig(
            "greedy pricing has its own runner; use run_greedy".into(),
        ));
    }
    let n = matrices.n();
    let params = matrices.params();

    let mut a_k = params.a().to_vec();
    let mut y = vec![0.0; n];
    let mut payments = vec![0.0; n];

    let mut traj = DemandTrajectory {
        convention,
        x: Vec::with_capacity(periods),
        y: Vec::with_capacity(periods),
        p: Vec::with_capacity(periods),
        per_period_revenue: Vec::with_capacity(periods),
        orders: Vec::with_capacity(periods),
        negative_demand: Vec::new(),
    };

    for k in 1..=periods {
        let x = matrices.solve_m(&a_k);
        for (i, &xi) in x.iter().enumerate() {
            if xi < NEGATIVE_DEMAND_TOL {
                traj.negative_demand.push((k, i));
            }
        }

        let order = match policy {
            OrderPolicy::Fixed(o) => {
                assert_eq!(o.as_slice().len(), n, "fixed order size mismatch");
                o.clone()
            }
            OrderPolicy::RoundRobinFair => {
                let mut scored: Vec<(f64, usize)> = (0..n)
                    .map(|i| (user_cumulative_value(i, &y, matrices) - payments[i], i))
                    .collect();
                scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                VisitOrder(scored.into_iter().map(|(_, i)| i).collect())
            }
        };

        let p = match convention {
            PriceConvention::Anticipatory => {
                let lx = matrices.cumulative_op().mul_vec(&x);
                a_k.iter().zip(&lx).map(|(a, l)| a - l).collect()
            }
            PriceConvention::Step4 => step4_prices(matrices, &order, &y, &x)?,
            PriceConvention::Greedy => unreachable!(),
        };

        let revenue = dot(&p, &x);
        for i in 0..n {
            payments[i] += p[i] * x[i];
            y[i] += x[i];
        }
        traj.x.push(x);
        traj.y.push(y.clone());
        traj.p.push(p);
        traj.per_period_revenue.push(revenue);
        traj.orders.push(order);
        a_k = matrices.transition().mul_vec(&a_k);
    }
    Ok(traj)
}

/// Closed-form infinite-horizon revenue under the anticipatory convention.
///
/// Each period contributes `x_k' D x_k` with `D = diag(2 b_i + c)` and
/// `x_{k+1} = M^-1 D x_k`, so in the symmetrized basis `u = D^(1/2) x` the
/// series is a plain geometric sum: with `S = D^(1/2) M^-1 D^(1/2)`
/// (symmetric), the total is `u_1' (I - S^2)^-1 u_1`. This matches the
/// truncated period sums exactly even for heterogeneous `b_i`, where the
/// diagonal gap and `M^-1` do not commute.
pub fn infinite_horizon_revenue(matrices: &ModelMatrices) -> Result<f64> {
    let n = matrices.n();
    let a = matrices.params().a();
    let gap_sqrt: Vec<f64> = matrices.price_gap_diag().iter().map(|g| g.sqrt()).collect();

    let s_mat = DenseMatrix::from_fn(n, n, |i, j| {
        gap_sqrt[i] * matrices.m_inverse()[(i, j)] * gap_sqrt[j]
    });
    let mut i_minus_s2 = s_mat.mul_mat(&s_mat).scale(-1.0);
    for i in 0..n {
        i_minus_s2[(i, i)] += 1.0;
    }
    let x1 = matrices.solve_m(a);
    let u1: Vec<f64> = x1.iter().zip(&gap_sqrt).map(|(x, g)| x * g).collect();
    let v = LuFactors::new(&i_minus_s2)?.solve(&u1);
    Ok(dot(&u1, &v))
}

/// Closed-form infinite-horizon total user welfare:
/// `y' (Lambda + C)/2 y - revenue` at the limit demand `y = L^-1 a`.
pub fn infinite_horizon_welfare(matrices: &ModelMatrices) -> Result<f64> {
    let y = limit_demand(matrices)?;
    let params = matrices.params();
    let total: f64 = y.iter().sum();
    let gross: f64 = y
        .iter()
        .enumerate()
        .map(|(i, &yi)| yi * (params.b()[i] * yi + 0.5 * params.c() * total))
        .sum();
    Ok(gross - infinite_horizon_revenue(matrices)?)
}

/// Closed forms for the fully symmetric instance (`a_i = a`, `b_i = b`,
/// complete graph with uniform weight `g`).
#[derive(Debug, Clone, Copy)]
pub struct SymmetricClosedForms {
    /// Per-user demand in period `k`.
    pub x_k: f64,
    /// Price charged in period `k` to the user visited at position `m`
    /// (1-based) under the sequential visit convention.
    pub p_km: f64,
    /// Infinite-horizon cumulative utility of the user always visited at
    /// position `m`, by geometric summation of the per-period payments.
    pub u_m_limit: f64,
}

/// Scalar recursion for the symmetric instance.
///
/// Uses the row-sum denominator `d = 4b + c + n*c - (n-1)g` and ratio
/// `rho = (2b + c) / d`, which is what the matrix pipeline produces.
pub fn symmetric_closed_forms(
    a: f64,
    b: f64,
    g: f64,
    c: f64,
    n: usize,
    k: usize,
    m: usize,
) -> Result<SymmetricClosedForms> {
    if m < 1 || m > n {
        return Err(Error::InvalidPosition { position: m, n });
    }
    assert!(k >= 1, "periods are 1-based");
    let nf = n as f64;
    let d = 4.0 * b + c + nf * c - (nf - 1.0) * g;
    let rho = (2.0 * b + c) / d;
    if !(rho.abs() < 1.0) || d <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "symmetric instance has non-contracting ratio {rho}"
        )));
    }

    let x1 = a / d;
    let x_k = x1 * rho.powi(k as i32 - 1);

    // Price of the position-m user: p = a - e*y - f*x with
    // e = 2b + c - (n-1)g (prior-period cumulative terms) and
    // f = 2b - (m-1)(g - c) (current-period terms).
    let e = 2.0 * b + c - (nf - 1.0) * g;
    let f = 2.0 * b - (m as f64 - 1.0) * (g - c);
    let y_prev = x1 * (1.0 - rho.powi(k as i32 - 1)) / (1.0 - rho);
    let p_km = a - e * y_prev - f * x_k;

    // Geometric sums: sum x_t, sum x_t^2, sum x_t y_{t-1}.
    let sum_x = x1 / (1.0 - rho);
    let sum_x_sq = x1 * x1 / (1.0 - rho * rho);
    let sum_x_y = x1 * x1 / (1.0 - rho) * (1.0 / (1.0 - rho) - 1.0 / (1.0 - rho * rho));
    let payments = a * sum_x - e * sum_x_y - f * sum_x_sq;

    let y_inf = a / (2.0 * b + nf * c - (nf - 1.0) * g);
    let gross = a * y_inf - b * y_inf * y_inf + (nf - 1.0) * g * y_inf * y_inf
        - 0.5 * c * (nf * y_inf) * (nf * y_inf);
    Ok(SymmetricClosedForms {
        x_k,
        p_km,
        u_m_limit: gross - payments,
    })
}
