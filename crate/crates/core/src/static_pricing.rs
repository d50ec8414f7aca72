//! One-shot optimal static pricing — the comparison baseline.
//!
//! The closed forms: equilibrium demand `x = M^-1 a`, prices
//! `p = (2 Lambda_c - Lambda) x` (equivalently `a - L x`), revenue `p'x`,
//! and welfare `x' (2 Lambda_c - Lambda/2 + C/2) x - revenue`.

use crate::error::{Error, Result};
use crate::market_model::ModelMatrices;
use crate::numerics::dot;

/// Demand entries below this are treated as a genuine interior-solution
/// violation rather than rounding noise.
pub const NEGATIVE_DEMAND_TOL: f64 = -1e-12;

#[derive(Debug, Clone, serde::Serialize)]
pub struct StaticOutcome {
    pub x_hat: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub revenue: f64,
    pub welfare: f64,
}

/// Solves the one-shot pricing problem.
///
/// Errors with [`Error::NegativeDemand`] when the equilibrium demand leaves
/// the interior regime; the baseline must be interior for the dynamic-vs-
/// static comparisons to mean anything.
pub fn solve_static(matrices: &ModelMatrices) -> Result<StaticOutcome> {
    let params = matrices.params();
    let x_hat = matrices.solve_m(params.a());
    if let Some((index, &value)) = x_hat
        .iter()
        .enumerate()
        .find(|(_, x)| **x < NEGATIVE_DEMAND_TOL)
    {
        return Err(Error::NegativeDemand { index, value });
    }

    let gap = matrices.price_gap_diag();
    let p_hat: Vec<f64> = gap.iter().zip(&x_hat).map(|(g, x)| g * x).collect();
    debug_assert!({
        // The two algebraically equivalent price forms must agree.
        let lx = matrices.cumulative_op().mul_vec(&x_hat);
        p_hat
            .iter()
            .zip(params.a().iter().zip(&lx))
            .all(|(p, (a, l))| (p - (a - l)).abs() <= 1e-10 * p.abs().max(1.0))
    });

    let revenue = dot(&p_hat, &x_hat);

    // x' (2 Lambda_c - Lambda/2 + C/2) x, expanded per row as
    // (3 b_i + c) x_i + (c/2) * sum_j x_j.
    let total: f64 = x_hat.iter().sum();
    let welfare_gross: f64 = x_hat
        .iter()
        .enumerate()
        .map(|(i, &x)| x * ((3.0 * params.b()[i] + params.c()) * x + 0.5 * params.c() * total))
        .sum();

    Ok(StaticOutcome {
        x_hat,
        p_hat,
        revenue,
        welfare: welfare_gross - revenue,
    })
}
