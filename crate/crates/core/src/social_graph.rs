//! Construction of the social-tie matrix.
//!
//! Ties are symmetric nonnegative weights with a zero diagonal. Graphs come
//! from three places: Erdős–Rényi generation, plain-text edge lists
//! (one `u v` pair per line, `#` comments — the format used by public
//! social-network snapshot dumps), or an explicit weight matrix. Tie weights
//! are drawn from a unit-variance normal around a configurable mean and
//! clamped at zero; the clamp count is kept as metadata.

use std::collections::HashMap;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GraphSource {
    ErdosRenyi,
    EdgeList,
    Manual,
}

/// Symmetric nonnegative tie-weight matrix with provenance metadata.
#[derive(Debug, Clone)]
pub struct SocialGraph {
    n: usize,
    ties: DenseMatrix,
    pub source: GraphSource,
    pub p_e: Option<f64>,
    pub seed: Option<u64>,
    /// Number of normal draws clamped up to zero.
    pub clamped_weights: usize,
}

impl SocialGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ties(&self) -> &DenseMatrix {
        &self.ties
    }

    pub fn tie(&self, i: usize, j: usize) -> f64 {
        self.ties[(i, j)]
    }

    /// Graph with no ties at all.
    pub fn empty(n: usize) -> Self {
        SocialGraph {
            n,
            ties: DenseMatrix::zeros(n, n),
            source: GraphSource::Manual,
            p_e: None,
            seed: None,
            clamped_weights: 0,
        }
    }

    /// Complete graph with a uniform tie weight; handy for the closed-form
    /// symmetric instances.
    pub fn complete(n: usize, weight: f64) -> Self {
        assert!(weight >= 0.0);
        let ties = DenseMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { weight });
        SocialGraph {
            n,
            ties,
            source: GraphSource::Manual,
            p_e: None,
            seed: None,
            clamped_weights: 0,
        }
    }

    /// Wraps an explicit weight matrix, enforcing the type invariants.
    pub fn from_weight_matrix(ties: DenseMatrix) -> Result<Self> {
        if !ties.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "tie matrix must be square, got {}x{}",
                ties.rows(),
                ties.cols()
            )));
        }
        let n = ties.rows();
        for i in 0..n {
            if ties[(i, i)] != 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "tie matrix diagonal must be zero (row {i})"
                )));
            }
            for j in 0..n {
                let w = ties[(i, j)];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "tie weight at ({i}, {j}) is {w}; weights must be finite and nonnegative"
                    )));
                }
                if ties[(i, j)] != ties[(j, i)] {
                    return Err(Error::AsymmetricTies { i, j });
                }
            }
        }
        Ok(SocialGraph {
            n,
            ties,
            source: GraphSource::Manual,
            p_e: None,
            seed: None,
            clamped_weights: 0,
        })
    }

    /// Drops every tie weight to exactly zero, keeping the metadata. Used by
    /// the no-network-effect control runs.
    pub fn zeroed(mut self) -> Self {
        self.ties = DenseMatrix::zeros(self.n, self.n);
        self
    }

    pub fn stats(&self) -> GraphStats {
        let mut count = 0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.ties[(i, j)] > 0.0 {
                    count += 1;
                }
            }
        }
        GraphStats::new(self.n, count)
    }

    /// Checks symmetry, zero diagonal and nonnegativity; used in tests and
    /// after deserialization paths.
    pub fn check_invariants(&self) -> Result<()> {
        Self::from_weight_matrix(self.ties.clone()).map(|_| ())
    }
}

/// Unweighted undirected graph plus the original vertex labels.
#[derive(Debug, Clone)]
pub struct GraphSkeleton {
    n: usize,
    /// Normalized `(low, high)` pairs, sorted, no duplicates or self-loops.
    edges: Vec<(usize, usize)>,
    pub vertex_labels: Vec<u64>,
}

impl GraphSkeleton {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats::new(self.n, self.edges.len())
    }
}

/// Tie-count summary.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GraphStats {
    pub tie_count: usize,
    /// `tie_count / (n choose 2)`; zero for a single vertex.
    pub edge_probability: f64,
}

impl GraphStats {
    fn new(n: usize, tie_count: usize) -> Self {
        let pairs = n * n.saturating_sub(1) / 2;
        let edge_probability = if pairs == 0 {
            0.0
        } else {
            tie_count as f64 / pairs as f64
        };
        GraphStats {
            tie_count,
            edge_probability,
        }
    }
}

/// Result of ingesting an edge-list stream.
#[derive(Debug, Clone)]
pub struct EdgeListLoad {
    pub skeleton: GraphSkeleton,
    /// Count of `u u` lines that were dropped.
    pub self_loops_ignored: usize,
}

/// Erdős–Rényi graph: each unordered pair is present independently with
/// probability `p_e`, and present pairs get a weight drawn from a normal with
/// mean `mu_g` and unit variance, clamped below at zero.
///
/// Pair visitation order is `(0,1), (0,2), ..., (n-2,n-1)`, with one presence
/// draw per pair and two uniforms per weight draw, so output is bitwise
/// deterministic in `(n, p_e, mu_g, seed)`.
pub fn generate_er(n: usize, p_e: f64, mu_g: f64, seed: u64) -> Result<SocialGraph> {
    if !(0.0..=1.0).contains(&p_e) || p_e.is_nan() {
        return Err(Error::InvalidProbability(p_e));
    }
    assert!(n >= 1, "graph needs at least one vertex");
    let mut rng = SplitMix64::new(seed);
    let mut ties = DenseMatrix::zeros(n, n);
    let mut clamped = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.next_f64() < p_e {
                let raw = rng.next_normal(mu_g, 1.0);
                if raw < 0.0 {
                    clamped += 1;
                }
                let w = raw.max(0.0);
                ties[(i, j)] = w;
                ties[(j, i)] = w;
            }
        }
    }
    Ok(SocialGraph {
        n,
        ties,
        source: GraphSource::ErdosRenyi,
        p_e: Some(p_e),
        seed: Some(seed),
        clamped_weights: clamped,
    })
}

/// Parses a whitespace-separated edge list.
///
/// Lines starting with `#` are comments; blank lines are skipped. Vertices
/// are relabeled densely in first-appearance order, both directions of an
/// edge collapse to one, and self-loops are counted but dropped.
pub fn load_edge_list(reader: impl BufRead) -> Result<EdgeListLoad> {
    let mut label_to_index: HashMap<u64, usize> = HashMap::new();
    let mut vertex_labels: Vec<u64> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut self_loops_ignored = 0;

    for (line_no, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = line_no + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let parse_one = |tokens: &mut std::str::SplitWhitespace| -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two vertex ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("'{tok}' is not a nonnegative integer"),
            })
        };
        let u = parse_one(&mut tokens)?;
        let v = parse_one(&mut tokens)?;
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unexpected trailing token '{extra}'"),
            });
        }
        let mut index_of = |label: u64| -> usize {
            *label_to_index.entry(label).or_insert_with(|| {
                vertex_labels.push(label);
                vertex_labels.len() - 1
            })
        };
        let ui = index_of(u);
        let vi = index_of(v);
        if ui == vi {
            self_loops_ignored += 1;
            continue;
        }
        edges.push((ui.min(vi), ui.max(vi)));
    }

    edges.sort_unstable();
    edges.dedup();
    Ok(EdgeListLoad {
        skeleton: GraphSkeleton {
            n: vertex_labels.len(),
            edges,
            vertex_labels,
        },
        self_loops_ignored,
    })
}

/// Uniformly samples `n` distinct vertices and returns the induced subgraph.
///
/// Selection is a partial Fisher–Yates shuffle; the chosen vertices are
/// relabeled `0..n` in ascending order of their old indices, so sampling all
/// vertices is the identity.
pub fn sample_subgraph(skeleton: &GraphSkeleton, n: usize, seed: u64) -> Result<GraphSkeleton> {
    if n > skeleton.n {
        return Err(Error::TooFewVertices {
            requested: n,
            available: skeleton.n,
        });
    }
    assert!(n >= 1, "subgraph needs at least one vertex");
    let mut rng = SplitMix64::new(seed);
    let mut pool: Vec<usize> = (0..skeleton.n).collect();
    for i in 0..n {
        let j = i + rng.next_below((skeleton.n - i) as u64) as usize;
        pool.swap(i, j);
    }
    let mut chosen: Vec<usize> = pool[..n].to_vec();
    chosen.sort_unstable();

    let mut new_index = vec![usize::MAX; skeleton.n];
    for (new, &old) in chosen.iter().enumerate() {
        new_index[old] = new;
    }
    let mut edges: Vec<(usize, usize)> = skeleton
        .edges
        .iter()
        .filter(|(u, v)| new_index[*u] != usize::MAX && new_index[*v] != usize::MAX)
        .map(|&(u, v)| {
            let (a, b) = (new_index[u], new_index[v]);
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    let vertex_labels = chosen.iter().map(|&old| skeleton.vertex_labels[old]).collect();
    Ok(GraphSkeleton {
        n,
        edges,
        vertex_labels,
    })
}

/// Draws a weight from a unit-variance normal around `mu_g` for every edge,
/// clamped below at zero and mirrored to both triangle halves.
pub fn assign_ties(skeleton: &GraphSkeleton, mu_g: f64, seed: u64) -> SocialGraph {
    let mut rng = SplitMix64::new(seed);
    let mut ties = DenseMatrix::zeros(skeleton.n, skeleton.n);
    let mut clamped = 0;
    for &(u, v) in &skeleton.edges {
        let raw = rng.next_normal(mu_g, 1.0);
        if raw < 0.0 {
            clamped += 1;
        }
        let w = raw.max(0.0);
        ties[(u, v)] = w;
        ties[(v, u)] = w;
    }
    SocialGraph {
        n: skeleton.n,
        ties,
        source: GraphSource::EdgeList,
        p_e: None,
        seed: Some(seed),
        clamped_weights: clamped,
    }
}
