//! Market operators and utility functionals.
//!
//! From per-user intrinsic coefficients `a_i`, `b_i`, a congestion
//! coefficient `c` and a tie matrix `G`, this module assembles the operator
//! matrices every pricing scheme works with and evaluates the demand-side
//! utility functionals. Notation used throughout the crate:
//!
//! * `Lambda   = diag(2 b_i)`
//! * `Lambda_c = diag(2 b_i + c/2)`
//! * `C`       — the all-`c` matrix (congestion coupling)
//! * `M        = 2 Lambda_c - G + C` — the per-period first-order operator
//! * `L        = Lambda - G + C` — the cumulative-demand operator
//! * `T        = I - L M^-1` — the period-transition operator
//!
//! Demand stays bounded when every user satisfies
//! `2 b_i > sum_{j != i} (g_ij - c)`; [`validate_model`] checks that margin
//! together with the invertibility of `M` and the contraction of `T`.

use crate::error::{Error, Result};
use crate::numerics::{
    dot, spectral_radius, DenseMatrix, LuFactors, SpectralRadius,
};
use crate::social_graph::SocialGraph;

/// Per-user intrinsic coefficients and the shared congestion coefficient.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MarketParams {
    a: Vec<f64>,
    b: Vec<f64>,
    c: f64,
}

impl MarketParams {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: f64) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vectors have lengths {} and {}",
                a.len(),
                b.len()
            )));
        }
        if let Some(bad) = a.iter().find(|x| !x.is_finite() || **x <= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "linear coefficients must be positive and finite, got {bad}"
            )));
        }
        if let Some(bad) = b.iter().find(|x| !x.is_finite() || **x <= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "quadratic coefficients must be positive and finite, got {bad}"
            )));
        }
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "congestion coefficient must be nonnegative, got {c}"
            )));
        }
        Ok(MarketParams { a, b, c })
    }

    /// Homogeneous instance with `a_i = a`, `b_i = b` for all users.
    pub fn uniform(n: usize, a: f64, b: f64, c: f64) -> Result<Self> {
        MarketParams::new(vec![a; n], vec![b; n], c)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Demand-boundedness margins `2 b_i - sum_{j != i} (g_ij - c)`.
///
/// The sum excludes the user itself: ties have a zero diagonal, so only the
/// congestion relief of the `n - 1` other users enters.
pub fn demand_margins(params: &MarketParams, graph: &SocialGraph) -> Vec<f64> {
    let n = params.n();
    assert_eq!(n, graph.n(), "params/graph size mismatch");
    (0..n)
        .map(|i| {
            let tie_sum: f64 = (0..n).filter(|&j| j != i).map(|j| graph.tie(i, j)).sum();
            2.0 * params.b[i] - tie_sum + (n as f64 - 1.0) * params.c
        })
        .collect()
}

/// Derived operators with cached factorizations.
#[derive(Debug, Clone)]
pub struct ModelMatrices {
    n: usize,
    params: MarketParams,
    ties: DenseMatrix,
    /// Diagonal of `Lambda`.
    lambda: Vec<f64>,
    /// Diagonal of `Lambda_c`.
    lambda_c: Vec<f64>,
    m: DenseMatrix,
    m_factor: LuFactors,
    m_inverse: DenseMatrix,
    /// `L = Lambda - G + C`.
    cumulative_op: DenseMatrix,
    /// `T = I - L M^-1`.
    transition: DenseMatrix,
}

impl ModelMatrices {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &MarketParams {
        &self.params
    }

    pub fn ties(&self) -> &DenseMatrix {
        &self.ties
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn lambda_c(&self) -> &[f64] {
        &self.lambda_c
    }

    pub fn m(&self) -> &DenseMatrix {
        &self.m
    }

    pub fn m_inverse(&self) -> &DenseMatrix {
        &self.m_inverse
    }

    pub fn cumulative_op(&self) -> &DenseMatrix {
        &self.cumulative_op
    }

    pub fn transition(&self) -> &DenseMatrix {
        &self.transition
    }

    /// Solves `M x = rhs` from the cached factorization.
    pub fn solve_m(&self, rhs: &[f64]) -> Vec<f64> {
        self.m_factor.solve(rhs)
    }

    /// Diagonal of `2 Lambda_c - Lambda`, i.e. `2 b_i + c`.
    pub fn price_gap_diag(&self) -> Vec<f64> {
        self.lambda.iter().map(|l| l + self.params.c).collect()
    }
}

/// Builds `(M, L)` directly from the definitions, without factorizations.
pub fn operator_pair(params: &MarketParams, graph: &SocialGraph) -> (DenseMatrix, DenseMatrix) {
    let n = params.n();
    assert_eq!(n, graph.n(), "params/graph size mismatch");
    let c = params.c;
    let m = DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            4.0 * params.b[i] + 2.0 * c
        } else {
            -graph.tie(i, j) + c
        }
    });
    let cumulative_op = DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * params.b[i] + c
        } else {
            -graph.tie(i, j) + c
        }
    });
    (m, cumulative_op)
}

/// Whether the transition operator contracts: both `M` and `L` positive
/// definite. Cheap enough to gate rejection sampling before the full
/// operator assembly.
pub fn is_contracting(params: &MarketParams, graph: &SocialGraph) -> bool {
    let (m, l) = operator_pair(params, graph);
    crate::numerics::is_positive_definite(&m) && crate::numerics::is_positive_definite(&l)
}

/// Populates the derived operators; fails only if `M` is numerically
/// singular.
pub fn build_matrices(params: &MarketParams, graph: &SocialGraph) -> Result<ModelMatrices> {
    let n = params.n();
    if n != graph.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} users in params but graph has {} vertices",
            n,
            graph.n()
        )));
    }
    let c = params.c;
    let lambda: Vec<f64> = params.b.iter().map(|b| 2.0 * b).collect();
    let lambda_c: Vec<f64> = lambda.iter().map(|l| l + c / 2.0).collect();
    let (m, cumulative_op) = operator_pair(params, graph);

    let m_factor = LuFactors::new(&m)?;
    let m_inverse = m_factor.inverse();
    let mut transition = cumulative_op.mul_mat(&m_inverse).scale(-1.0);
    for i in 0..n {
        transition[(i, i)] += 1.0;
    }

    Ok(ModelMatrices {
        n,
        params: params.clone(),
        ties: graph.ties().clone(),
        lambda,
        lambda_c,
        m,
        m_factor,
        m_inverse,
        cumulative_op,
        transition,
    })
}

/// Standing-condition report for a model instance.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationReport {
    pub demand_bounded: bool,
    pub margins: Vec<f64>,
    pub invertible: bool,
    /// Spectral radius of `T^2`; `None` when `M` could not be inverted.
    pub transition_radius_sq: Option<f64>,
    /// Filled by callers that also solve for demand; `None` here.
    pub demand_nonnegative: Option<bool>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.demand_bounded && self.invertible
    }
}

/// Checks the margins, invertibility of `M`, and contraction of `T`.
///
/// A negative entry in `M^-1` is reported as a warning, not an error: the
/// nonnegativity argument needs every tie to exceed `c`, which realistic
/// instances routinely violate while remaining perfectly solvable.
pub fn validate_model(params: &MarketParams, graph: &SocialGraph) -> ValidationReport {
    let margins = demand_margins(params, graph);
    let demand_bounded = margins.iter().all(|m| *m > 0.0);
    let mut warnings = Vec::new();
    if !demand_bounded {
        warnings.push("demand-boundedness margin is nonpositive for at least one user".into());
    }

    let matrices = match build_matrices(params, graph) {
        Ok(m) => m,
        Err(e) => {
            warnings.push(format!("operator assembly failed: {e}"));
            return ValidationReport {
                demand_bounded,
                margins,
                invertible: false,
                transition_radius_sq: None,
                demand_nonnegative: None,
                warnings,
            };
        }
    };

    // Near-singular factorizations slip past the pivot threshold; the
    // reconstruction residual catches them.
    let n = matrices.n;
    let mut residual = matrices.m.mul_mat(&matrices.m_inverse);
    for i in 0..n {
        residual[(i, i)] -= 1.0;
    }
    let invertible = residual.inf_norm() <= 1e-9;
    if !invertible {
        warnings.push(format!(
            "inverse reconstruction residual {:.3e} exceeds 1e-9; treating M as numerically singular",
            residual.inf_norm()
        ));
    }

    let t_squared = matrices.transition.mul_mat(&matrices.transition);
    let radius: SpectralRadius = spectral_radius(&t_squared, 1e-12, 20_000);
    if !radius.converged {
        warnings.push("spectral-radius estimate did not converge".into());
    }
    if radius.value >= 1.0 {
        warnings.push(format!(
            "squared transition radius {:.6} is not a contraction",
            radius.value
        ));
    }
    let negative_entries = matrices
        .m_inverse
        .data()
        .iter()
        .filter(|x| **x < 0.0)
        .count();
    if negative_entries > 0 {
        warnings.push(format!(
            "M^-1 has {negative_entries} negative entries; demand positivity is not guaranteed structurally"
        ));
    }

    ValidationReport {
        demand_bounded,
        margins,
        invertible,
        transition_radius_sq: Some(radius.value),
        demand_nonnegative: None,
        warnings,
    }
}

/// Total gross benefit of cumulative demand `y`:
/// `a'y - sum_i b_i y_i^2 + y'Gy - (c/2) (sum_j y_j)^2`.
pub fn gross_utility(y: &[f64], matrices: &ModelMatrices) -> f64 {
    let params = &matrices.params;
    assert_eq!(y.len(), matrices.n, "demand vector length mismatch");
    let linear = dot(params.a(), y);
    let quad: f64 = params.b.iter().zip(y).map(|(b, yi)| b * yi * yi).sum();
    let network = dot(y, &matrices.ties.mul_vec(y));
    let total: f64 = y.iter().sum();
    linear - quad + network - 0.5 * params.c * total * total
}

/// Net utility of user `i` facing price `p_i` while the market demands `x`.
pub fn user_net_utility(i: usize, x: &[f64], p_i: f64, matrices: &ModelMatrices) -> f64 {
    let params = &matrices.params;
    let xi = x[i];
    let network: f64 = dot(matrices.ties.row(i), x);
    let total: f64 = x.iter().sum();
    params.a[i] * xi - params.b[i] * xi * xi + xi * network
        - 0.5 * params.c * total * total
        - p_i * xi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::social_graph::generate_er;

    fn assert_close(actual: f64, expected: f64, tol: f64) {
        assert!(
            (actual - expected).abs() <= tol * expected.abs().max(1.0),
            "expected {expected}, got {actual}"
        );
    }

    /// The symmetric two-user instance used as an anchor across the crate:
    /// a=1, b=1, g=0.5, c=0.2.
    pub(crate) fn two_user_anchor() -> ModelMatrices {
        let params = MarketParams::uniform(2, 1.0, 1.0, 0.2).unwrap();
        let graph = SocialGraph::complete(2, 0.5);
        build_matrices(&params, &graph).unwrap()
    }

    #[test]
    fn single_user_operators() {
        let params = MarketParams::uniform(1, 1.0, 1.0, 0.0).unwrap();
        let graph = SocialGraph::empty(1);
        let m = build_matrices(&params, &graph).unwrap();
        assert_eq!(m.lambda(), &[2.0]);
        assert_eq!(m.lambda_c(), &[2.0]);
        assert_eq!(m.m()[(0, 0)], 4.0);
        assert_close(m.transition()[(0, 0)], 0.5, 1e-15);
    }

    #[test]
    fn two_user_operator_entries() {
        let m = two_user_anchor();
        assert_close(m.m()[(0, 0)], 4.4, 1e-15);
        assert_close(m.m()[(0, 1)], -0.3, 1e-15);
        assert_close(m.m()[(1, 0)], -0.3, 1e-15);
        assert_close(m.m()[(1, 1)], 4.4, 1e-15);
        assert_close(m.cumulative_op()[(0, 0)], 2.2, 1e-15);
        assert_close(m.cumulative_op()[(0, 1)], -0.3, 1e-15);
    }

    #[test]
    fn decoupled_users_have_diagonal_operators() {
        let params = MarketParams::new(vec![1.0, 2.0], vec![1.0, 3.0], 0.0).unwrap();
        let graph = SocialGraph::empty(2);
        let m = build_matrices(&params, &graph).unwrap();
        assert_eq!(m.m()[(0, 1)], 0.0);
        assert_close(m.m()[(0, 0)], 4.0, 1e-15);
        assert_close(m.m()[(1, 1)], 12.0, 1e-15);
        assert_close(m.transition()[(0, 0)], 0.5, 1e-14);
        assert_close(m.transition()[(1, 1)], 0.5, 1e-14);
        assert_eq!(m.transition()[(1, 0)], 0.0);
    }

    #[test]
    fn transition_equals_price_gap_times_m_inverse() {
        // T = I - L M^-1 and diag(2b_i + c) M^-1 are the same operator.
        let m = two_user_anchor();
        let alt = DenseMatrix::diagonal(&m.price_gap_diag()).mul_mat(m.m_inverse());
        let dev = m.transition().add_scaled(&alt, -1.0);
        assert!(dev.inf_norm() <= 1e-13);
    }

    #[test]
    fn margins_two_user_anchor() {
        let params = MarketParams::uniform(2, 1.0, 1.0, 0.2).unwrap();
        let graph = SocialGraph::complete(2, 0.5);
        let margins = demand_margins(&params, &graph);
        assert_close(margins[0], 1.7, 1e-15);
        assert_close(margins[1], 1.7, 1e-15);
        assert!(validate_model(&params, &graph).demand_bounded);
    }

    #[test]
    fn margins_detect_violation() {
        let params = MarketParams::uniform(2, 1.0, 0.1, 0.0).unwrap();
        let graph = SocialGraph::complete(2, 1.0);
        let margins = demand_margins(&params, &graph);
        assert_close(margins[0], -0.8, 1e-15);
        let report = validate_model(&params, &graph);
        assert!(!report.demand_bounded);
    }

    #[test]
    fn margins_without_ties_are_twice_b() {
        let params = MarketParams::new(vec![1.0, 1.0, 1.0], vec![1.0, 2.0, 3.0], 0.0).unwrap();
        let graph = SocialGraph::empty(3);
        let margins = demand_margins(&params, &graph);
        assert_eq!(margins, vec![2.0, 4.0, 6.0]);
    }

    #[test]
    fn margins_invariant_under_permutation() {
        let params = MarketParams::new(vec![1.0, 2.0, 0.5], vec![1.5, 2.0, 1.0], 0.3).unwrap();
        let graph = generate_er(3, 0.9, 1.0, 5).unwrap();
        let margins = demand_margins(&params, &graph);

        // Apply the reversal permutation consistently to (a, b, G).
        let perm = [2usize, 1, 0];
        let pa: Vec<f64> = perm.iter().map(|&i| params.a()[i]).collect();
        let pb: Vec<f64> = perm.iter().map(|&i| params.b()[i]).collect();
        let pt = DenseMatrix::from_fn(3, 3, |i, j| graph.tie(perm[i], perm[j]));
        let pparams = MarketParams::new(pa, pb, 0.3).unwrap();
        let pgraph = SocialGraph::from_weight_matrix(pt).unwrap();
        let pmargins = demand_margins(&pparams, &pgraph);
        for i in 0..3 {
            assert_close(pmargins[i], margins[perm[i]], 1e-14);
        }
    }

    #[test]
    fn validation_anchor_instance() {
        let params = MarketParams::uniform(2, 1.0, 1.0, 0.2).unwrap();
        let graph = SocialGraph::complete(2, 0.5);
        let report = validate_model(&params, &graph);
        assert!(report.ok());
        let rho = (2.2f64 / 4.1).powi(2);
        assert_close(report.transition_radius_sq.unwrap(), rho, 1e-9);
    }

    #[test]
    fn validation_single_user_quarter_radius() {
        let params = MarketParams::uniform(1, 1.0, 1.0, 0.0).unwrap();
        let graph = SocialGraph::empty(1);
        let report = validate_model(&params, &graph);
        assert_close(report.transition_radius_sq.unwrap(), 0.25, 1e-10);
    }

    #[test]
    fn validation_flags_near_singular_ties() {
        // Push the off-diagonal tie so the operator is singular to working
        // precision: M = [[4b+2c, c-g], [c-g, 4b+2c]] is singular when
        // g - c = 4b + 2c.
        let b = 0.1;
        let c = 0.0;
        let g = 4.0 * b + 2.0 * c;
        let params = MarketParams::uniform(2, 1.0, b, c).unwrap();
        let graph = SocialGraph::complete(2, g);
        let report = validate_model(&params, &graph);
        assert!(!report.invertible);
        assert!(!report.warnings.is_empty());
    }

    #[test]
    fn gross_utility_zero_demand() {
        let m = two_user_anchor();
        assert_eq!(gross_utility(&[0.0, 0.0], &m), 0.0);
    }

    #[test]
    fn gross_utility_anchor_value() {
        // Hand expansion at y = (1/1.9, 1/1.9):
        // 2y - 2y^2 + y^2 - 0.4 y^2 with y = 1/1.9 gives 2.4/3.61.
        let m = two_user_anchor();
        let y = 1.0 / 1.9;
        assert_close(gross_utility(&[y, y], &m), 2.4 / 3.61, 1e-12);
    }

    #[test]
    fn gross_utility_single_user() {
        let params = MarketParams::uniform(1, 1.0, 1.0, 0.0).unwrap();
        let m = build_matrices(&params, &SocialGraph::empty(1)).unwrap();
        assert_close(gross_utility(&[0.5], &m), 0.25, 1e-15);
    }

    #[test]
    fn gross_utility_decoupled_reduces_to_private_terms() {
        let params = MarketParams::new(vec![1.0, 2.0], vec![0.5, 1.5], 0.0).unwrap();
        let m = build_matrices(&params, &SocialGraph::empty(2)).unwrap();
        let y = [0.3, 0.7];
        let expected = 1.0 * 0.3 - 0.5 * 0.09 + 2.0 * 0.7 - 1.5 * 0.49;
        assert_close(gross_utility(&y, &m), expected, 1e-14);
    }

    #[test]
    fn gross_utility_is_concave_for_moderate_ties() {
        // Finite-difference curvature along random directions must be
        // nonpositive. Concavity needs Lambda - 2G + C >= 0, which on a
        // complete graph means w <= b/(n-1) + nc/(2(n-1)); that is a
        // strictly smaller region than the demand-boundedness margin, so
        // the draw stays below 0.9 b/(n-1).
        let mut rng = SplitMix64::new(41);
        for trial in 0..25 {
            let n = 2 + (trial % 5);
            let params = MarketParams::uniform(n, 1.0, 1.0, 0.2).unwrap();
            let graph = SocialGraph::complete(n, 0.9 / (n as f64 - 1.0) * rng.next_f64());
            let report = validate_model(&params, &graph);
            assert!(report.demand_bounded);
            let m = build_matrices(&params, &graph).unwrap();
            let y: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
            let dir: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
            let h = 1e-4;
            let at = |t: f64| {
                let shifted: Vec<f64> = y.iter().zip(&dir).map(|(yi, d)| yi + t * d).collect();
                gross_utility(&shifted, &m)
            };
            let curvature = (at(h) + at(-h) - 2.0 * at(0.0)) / (h * h);
            assert!(curvature <= 1e-8, "curvature {curvature}");
        }
    }

    #[test]
    fn net_utility_zero_demand() {
        let m = two_user_anchor();
        assert_eq!(user_net_utility(0, &[0.0, 0.0], 1.0, &m), 0.0);
    }

    #[test]
    fn net_utility_single_user_example() {
        let params = MarketParams::uniform(1, 1.0, 1.0, 0.0).unwrap();
        let m = build_matrices(&params, &SocialGraph::empty(1)).unwrap();
        assert_close(user_net_utility(0, &[0.25], 0.5, &m), 0.0625, 1e-15);
    }

    #[test]
    fn net_utility_anchor_static_point() {
        // At the static solution of the anchor instance the per-user value
        // works out to exactly b * x^2.
        let m = two_user_anchor();
        let x = 1.0 / 4.1;
        let p = 2.2 / 4.1;
        assert_close(user_net_utility(0, &[x, x], p, &m), x * x, 1e-12);
    }

    #[test]
    fn contraction_holds_on_proportioned_instances() {
        // The boundedness margin alone does not force the transition to
        // contract (a graph with strong community structure can push an
        // eigenvalue of Lambda - G + C below zero while every margin stays
        // positive). On instances proportioned like the experiment defaults
        // (quadratic coefficients dominating tie weights, n <= 20) the
        // contraction holds throughout.
        let mut rng = SplitMix64::new(4242);
        let mut checked = 0;
        while checked < 100 {
            let n = 2 + (rng.next_below(19) as usize);
            let p_e = 0.2 + 0.7 * rng.next_f64();
            let mu_g = 2.0 + 6.0 * rng.next_f64();
            let c = 6.0 + 8.0 * rng.next_f64();
            let g = generate_er(n, p_e, mu_g, rng.next_u64()).unwrap();
            let a: Vec<f64> = (0..n).map(|_| rng.next_normal(1.0, 1.0).max(0.01)).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.next_normal(20.0, 1.0).max(0.01)).collect();
            let params = MarketParams::new(a, b, c).unwrap();
            let report = validate_model(&params, &g);
            if !report.demand_bounded {
                continue;
            }
            checked += 1;
            assert!(report.invertible);
            let rho = report.transition_radius_sq.unwrap();
            assert!(rho < 1.0, "radius {rho} not a contraction");
        }
    }

    #[test]
    fn contraction_holds_in_strong_tie_regime() {
        // Complete graphs with every tie above c: the regime where the
        // nonnegativity argument for M^-1 actually applies.
        let mut rng = SplitMix64::new(616);
        let mut checked = 0;
        while checked < 50 {
            let n = 2 + rng.next_below(6) as usize;
            let c = rng.next_f64() * 0.5;
            let w = c + rng.next_f64();
            let b = 1.0 + rng.next_f64() * 3.0;
            let params = MarketParams::uniform(n, 1.0, b, c).unwrap();
            let graph = SocialGraph::complete(n, w);
            let report = validate_model(&params, &graph);
            if !report.demand_bounded {
                continue;
            }
            checked += 1;
            let rho = report.transition_radius_sq.unwrap();
            assert!(rho < 1.0, "radius {rho} not a contraction");
            // In this regime M^-1 is entrywise nonnegative, so no warning
            // about negative entries should appear.
            assert!(report
                .warnings
                .iter()
                .all(|w| !w.contains("negative entries")));
        }
    }
}
