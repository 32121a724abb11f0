//! Crossing relation between edge-space cosets inside an abelian vertex
//! space, the connectivity of the crossing graph, and a lattice oracle.

use crate::error::{Error, Result};
use crate::gog::{EndRef, GraphOfGroups, InjectionSpec, Regime};
use crate::linalg::{annihilator, canonical_span, int_cols_to_q, primitive, rank_of_columns, IntMatrix};
use crate::unionfind::UnionFind;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::fmt;

/// True iff the subspace spanned by the columns of `s` is not contained in
/// the hyperplane spanned by the columns of `e`.
pub fn crosses(s: &IntMatrix, e: &IntMatrix) -> Result<bool> {
    let n = e.rows();
    if s.rows() != n {
        return Err(Error::Invalid(format!("ambient ranks differ: {} vs {n}", s.rows())));
    }
    if n == 0 || e.rank() != n - 1 {
        return Err(Error::Invalid("E is not a hyperplane".into()));
    }
    let mut cols = e.columns();
    cols.extend(s.columns());
    Ok(rank_of_columns(n, &int_cols_to_q(&cols)) > n - 1)
}

/// Images of the incident edge groups inside one abelian vertex group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionPattern {
    pub n: usize,
    pub images: Vec<(EndRef, IntMatrix)>,
}

impl DirectionPattern {
    pub fn of_vertex(g: &GraphOfGroups, v: &str) -> Result<Self> {
        if g.regime != Regime::Abelian {
            return Err(Error::AbstractRegime);
        }
        let n = g.vertex(v)?.dim() as usize;
        let mut images = Vec::new();
        for end in g.ends_at(v) {
            let e = g.edge(&end.edge)?;
            match &e.end(end.end).injection {
                InjectionSpec::Matrix(m) => images.push((end, m.clone())),
                InjectionSpec::DeclaredIndex(_) => return Err(Error::AbstractRegime),
            }
        }
        Ok(DirectionPattern { n, images })
    }

    fn with_rank(&self, lo: usize, hi: usize) -> impl Iterator<Item = &(EndRef, IntMatrix)> {
        self.images.iter().filter(move |(_, m)| (lo..=hi).contains(&m.rank()))
    }

    /// Images of rank `n - 1`.
    pub fn hyperplanes(&self) -> Vec<&(EndRef, IntMatrix)> {
        if self.n == 0 {
            return Vec::new();
        }
        self.with_rank(self.n - 1, self.n - 1).collect()
    }

    /// Images of rank in `1..=n-2`.
    pub fn connectors(&self) -> Vec<&(EndRef, IntMatrix)> {
        if self.n < 3 {
            return Vec::new();
        }
        self.with_rank(1, self.n - 2).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrossingSummary {
    Empty,
    Connected(String),
    Disconnected(String),
}

impl CrossingSummary {
    pub fn label(&self) -> &'static str {
        match self {
            CrossingSummary::Empty => "EMPTY",
            CrossingSummary::Connected(_) => "CONNECTED",
            CrossingSummary::Disconnected(_) => "DISCONNECTED",
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            CrossingSummary::Empty => "",
            CrossingSummary::Connected(s) | CrossingSummary::Disconnected(s) => s,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EMPTY" => Some(CrossingSummary::Empty),
            "CONNECTED" => Some(CrossingSummary::Connected("declared".into())),
            "DISCONNECTED" => Some(CrossingSummary::Disconnected("declared".into())),
            _ => None,
        }
    }
}

impl fmt::Display for CrossingSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn direction(n: usize, m: &IntMatrix) -> Vec<Vec<BigInt>> {
    canonical_span(n, &int_cols_to_q(&m.columns()))
}

/// Decides connectivity of the coset crossing graph from direction data.
pub fn summarize(p: &DirectionPattern) -> CrossingSummary {
    let hyper = p.hyperplanes();
    let Some((first_end, first)) = hyper.first() else {
        return CrossingSummary::Empty;
    };
    let w = direction(p.n, first);
    if let Some((other, _)) = hyper.iter().find(|(_, m)| direction(p.n, m) != w) {
        return CrossingSummary::Connected(format!("distinct hyperplane directions at {first_end} and {other}"));
    }
    for (end, u) in p.connectors() {
        if crosses(u, first).unwrap_or(false) {
            return CrossingSummary::Connected(format!("{end} crosses every coset of the hyperplane at {first_end}"));
        }
    }
    CrossingSummary::Disconnected(format!(
        "parallel cosets W and W+w of the hyperplane at {first_end}; no incident image crosses W"
    ))
}

pub fn crossing_graph_summary(g: &GraphOfGroups, v: &str) -> Result<CrossingSummary> {
    Ok(summarize(&DirectionPattern::of_vertex(g, v)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleParams {
    pub radius: i64,
    pub cosets: usize,
    /// Distance between consecutive coset offsets; default `max(1, r/10)`.
    pub spacing: Option<i64>,
    /// Depth on each side of a hyperplane coset; default `max(1, r/4)`.
    pub threshold: Option<i64>,
    /// Cap on point-membership tests.
    pub budget: u64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams { radius: 30, cosets: 3, spacing: None, threshold: None, budget: 50_000_000 }
    }
}

/// One coset `image + j * spacing * w` of an incident image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetNode {
    pub end: EndRef,
    pub offset: i64,
}

impl fmt::Display for CosetNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.end, self.offset)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleGraph {
    /// Hyperplane cosets.
    pub nodes: Vec<CosetNode>,
    /// `(a, b, via)`: `via` is `None` for a direct crossing, otherwise the
    /// connector coset crossing both.
    pub edges: Vec<(usize, usize, Option<CosetNode>)>,
    /// `None` when there are no hyperplane cosets.
    pub connected: Option<bool>,
}

struct Coset {
    node: CosetNode,
    /// Integer rows cutting out the direction.
    cut: Vec<Vec<i64>>,
    level: Vec<i64>,
}

fn to_i64_rows(rows: Vec<Vec<BigInt>>) -> Result<Vec<Vec<i64>>> {
    rows.into_iter()
        .map(|r| r.iter().map(|x| x.to_i64().ok_or_else(|| Error::Degenerate("normal too large".into()))).collect())
        .collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Samples cosets of every hyperplane and connector image in
/// `Z^n ∩ [-r, r]^n` and builds the finite crossing graph.
pub fn lattice_oracle_crossing_graph(g: &GraphOfGroups, v: &str, params: &OracleParams) -> Result<OracleGraph> {
    let p = DirectionPattern::of_vertex(g, v)?;
    let n = p.n;
    let r = params.radius;
    let spacing = params.spacing.unwrap_or((r / 10).max(1));
    let threshold = params.threshold.unwrap_or((r / 4).max(1));
    let offsets: Vec<i64> = (0..params.cosets as i64).map(|k| if k % 2 == 1 { (k + 1) / 2 } else { -(k / 2) }).collect();

    let build = |list: Vec<&(EndRef, IntMatrix)>| -> Result<Vec<Coset>> {
        let mut out = Vec::new();
        for (end, m) in list {
            let qcols = int_cols_to_q(&m.columns());
            let cut = to_i64_rows(annihilator(n, &qcols).iter().map(|row| primitive(row)).collect())?;
            let w: Vec<i64> = (0..n)
                .map(|i| (0..n).map(|j| i64::from(i == j)).collect::<Vec<i64>>())
                .find(|e| cut.iter().any(|row| dot(row, e) != 0))
                .expect("proper subspace misses a basis vector");
            for &j in &offsets {
                let o: Vec<i64> = w.iter().map(|x| x * j * spacing).collect();
                let level = cut.iter().map(|row| dot(row, &o)).collect();
                out.push(Coset { node: CosetNode { end: end.clone(), offset: j }, cut: cut.clone(), level });
            }
        }
        Ok(out)
    };
    let hyper = build(p.hyperplanes())?;
    let conn = build(p.connectors())?;
    if hyper.is_empty() {
        return Ok(OracleGraph { nodes: Vec::new(), edges: Vec::new(), connected: None });
    }

    let side = (2 * r + 1) as u64;
    let total = side.pow(n as u32);
    let tests = total * (hyper.len() + conn.len()) as u64;
    if tests > params.budget {
        return Err(Error::Budget(format!("{tests} membership tests exceed budget {}", params.budget)));
    }
    let points: Vec<Vec<i64>> = (0..total)
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let c = (k % side) as i64 - r;
                    k /= side;
                    c
                })
                .collect()
        })
        .collect();
    let members = |c: &Coset| -> Vec<usize> {
        (0..points.len())
            .filter(|&i| c.cut.iter().zip(&c.level).all(|(row, &l)| dot(row, &points[i]) == l))
            .collect()
    };
    let hyper_pts: Vec<Vec<usize>> = hyper.iter().map(&members).collect();
    let conn_pts: Vec<Vec<usize>> = conn.iter().map(&members).collect();

    // S crosses E when it reaches both open sides at Euclidean depth >= threshold.
    let crosses_coset = |pts: &[usize], e: &Coset| -> bool {
        let nu = &e.cut[0];
        let c = e.level[0];
        let norm2: i128 = nu.iter().map(|&x| i128::from(x) * i128::from(x)).sum();
        let need = i128::from(threshold) * i128::from(threshold) * norm2;
        let (mut pos, mut neg) = (false, false);
        for &i in pts {
            let s = i128::from(dot(nu, &points[i]) - c);
            if s * s >= need {
                if s > 0 {
                    pos = true;
                } else {
                    neg = true;
                }
            }
            if pos && neg {
                return true;
            }
        }
        false
    };

    let nodes: Vec<CosetNode> = hyper.iter().map(|c| c.node.clone()).collect();
    let mut edges = Vec::new();
    let mut uf = UnionFind::new(nodes.len());
    let crossed_by: Vec<Vec<bool>> =
        conn_pts.iter().map(|pts| hyper.iter().map(|e| crosses_coset(pts, e)).collect()).collect();
    for a in 0..hyper.len() {
        for b in a + 1..hyper.len() {
            if crosses_coset(&hyper_pts[a], &hyper[b]) || crosses_coset(&hyper_pts[b], &hyper[a]) {
                edges.push((a, b, None));
                uf.union(a, b);
            } else if let Some(k) = (0..conn.len()).find(|&k| crossed_by[k][a] && crossed_by[k][b]) {
                edges.push((a, b, Some(conn[k].node.clone())));
                uf.union(a, b);
            }
        }
    }
    let (_, classes) = uf.labels();
    Ok(OracleGraph { nodes, edges, connected: Some(classes == 1) })
}
