//! Finite balls in Bass-Serre trees and the bounded / line-like / bushy
//! trichotomy.
//!
//! A ball is grown breadth-first from a vertex lying over a chosen vertex
//! of the quotient graph. A tree vertex over `v` entered through end `η`
//! has `index(ζ)` incident tree edges over each end `ζ` at `v`, except
//! `index(η) - 1` new ones over `η` itself.

use crate::error::{Error, Result};
use crate::gog::{EndRef, GraphOfGroups, Index};
use crate::tree::Tree;
use std::collections::VecDeque;
use std::fmt;

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallVertex {
    pub over: Option<String>,
    pub depth: Option<usize>,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallEdge {
    pub a: usize,
    pub b: usize,
    /// Quotient edge and the end number at `b` (the entered vertex).
    pub over: Option<EndRef>,
}

/// A finite radius-`R` portion of a Bass-Serre tree, or any labelled
/// finite tree read from a `.tree` file. Vertex and edge ids are their
/// positions in the vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeBall {
    pub root: Option<usize>,
    pub radius: usize,
    pub vertices: Vec<BallVertex>,
    pub edges: Vec<BallEdge>,
}

impl TreeBall {
    pub fn tree(&self) -> Tree {
        let pairs: Vec<(usize, usize)> = self.edges.iter().map(|e| (e.a, e.b)).collect();
        Tree::from_edges(self.vertices.len(), &pairs)
    }

    pub fn truncated(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.vertices[v].truncated).collect()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Number of vertices at each depth `0..=radius`.
    pub fn depth_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.radius + 1];
        for v in &self.vertices {
            if let Some(d) = v.depth {
                if d <= self.radius {
                    c[d] += 1;
                }
            }
        }
        c
    }

    /// Plain tree wrapper without labels.
    pub fn from_tree(t: &Tree) -> TreeBall {
        TreeBall {
            root: None,
            radius: 0,
            vertices: vec![BallVertex { over: None, depth: None, truncated: false }; t.len()],
            edges: t.edges().iter().map(|&(a, b)| BallEdge { a, b, over: None }).collect(),
        }
    }
}

/// Children of a tree vertex over `v` entered through `entered`, in
/// deterministic order: quotient edge id, end number, copy number.
fn child_slots(g: &GraphOfGroups, v: &str, entered: Option<&EndRef>) -> Result<Vec<EndRef>> {
    let mut out = Vec::new();
    for end in g.ends_at(v) {
        let idx = match g.end_index(&end)? {
            Index::Finite(n) => n,
            Index::Inf => return Err(Error::InfiniteIndex { edge: end.edge.clone(), end: end.end }),
        };
        let copies = if entered == Some(&end) { idx - 1 } else { idx };
        for _ in 0..copies {
            out.push(end.clone());
        }
    }
    Ok(out)
}

pub fn expand_ball(g: &GraphOfGroups, base: &str, radius: usize) -> Result<TreeBall> {
    expand_ball_with_budget(g, base, radius, DEFAULT_BUDGET)
}

pub fn expand_ball_with_budget(
    g: &GraphOfGroups,
    base: &str,
    radius: usize,
    budget: usize,
) -> Result<TreeBall> {
    g.ensure_valid()?;
    g.vertex(base)?;
    let mut ball = TreeBall {
        root: Some(0),
        radius,
        vertices: vec![BallVertex { over: Some(base.to_string()), depth: Some(0), truncated: false }],
        edges: Vec::new(),
    };
    let mut entered: Vec<Option<EndRef>> = vec![None];
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        let v = ball.vertices[x].over.clone().expect("expanded vertices are labelled");
        let depth = ball.vertices[x].depth.unwrap_or(0);
        let slots = child_slots(g, &v, entered[x].as_ref())?;
        if depth == radius {
            ball.vertices[x].truncated = !slots.is_empty();
            continue;
        }
        for end in slots {
            let child_end = end.other();
            let child_over = g.edge(&end.edge)?.end(child_end.end).vertex.clone();
            if ball.vertices.len() >= budget {
                return Err(Error::Budget(format!("ball exceeds {budget} vertices")));
            }
            let y = ball.vertices.len();
            ball.vertices.push(BallVertex { over: Some(child_over), depth: Some(depth + 1), truncated: false });
            ball.edges.push(BallEdge { a: x, b: y, over: Some(child_end.clone()) });
            entered.push(Some(child_end));
            queue.push_back(y);
        }
    }
    Ok(ball)
}

/// Violations of the local-count invariant at non-truncated vertices.
pub fn local_count_violations(g: &GraphOfGroups, ball: &TreeBall) -> Result<Vec<String>> {
    let mut out = Vec::new();
    // tree edges incident to x, keyed by the end at x
    let mut at: Vec<Vec<EndRef>> = vec![Vec::new(); ball.len()];
    for e in &ball.edges {
        let Some(over) = &e.over else { continue };
        at[e.b].push(over.clone());
        at[e.a].push(over.other());
    }
    for (x, vx) in ball.vertices.iter().enumerate() {
        if vx.truncated || vx.depth == Some(ball.radius) {
            continue;
        }
        let Some(v) = &vx.over else { continue };
        for end in g.ends_at(v) {
            let want = g.end_index(&end)?.finite().unwrap_or(u64::MAX);
            let have = at[x].iter().filter(|e| **e == end).count() as u64;
            if have != want {
                out.push(format!("vertex {x} over {v}: end {end} has {have} tree edges, expected {want}"));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Trichotomy {
    Bounded,
    LineLike,
    Bushy,
}

impl fmt::Display for Trichotomy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trichotomy::Bounded => "BOUNDED",
            Trichotomy::LineLike => "LINELIKE",
            Trichotomy::Bushy => "BUSHY",
        })
    }
}

/// Classifies via the reduced graph: a point is bounded, all valences 2
/// is line-like, any valence at least 3 is bushy.
pub fn classify_trichotomy(g: &GraphOfGroups) -> Result<Trichotomy> {
    let (r, _trace) = g.reduce()?;
    if r.vertices.is_empty() {
        return Err(Error::Unclassifiable("empty graph".into()));
    }
    if !r.is_connected() {
        return Err(Error::Unclassifiable("graph is disconnected".into()));
    }
    if r.vertices.len() == 1 && r.edges.is_empty() {
        return Ok(Trichotomy::Bounded);
    }
    let mut valences = Vec::new();
    for v in r.vertices.keys() {
        valences.push((v.clone(), r.tree_valence(v)?));
    }
    if valences.iter().any(|(_, d)| *d >= Index::Finite(3)) {
        return Ok(Trichotomy::Bushy);
    }
    if valences.iter().all(|(_, d)| *d == Index::Finite(2)) {
        return Ok(Trichotomy::LineLike);
    }
    let diag = valences.iter().map(|(v, d)| format!("{v}:{d}")).collect::<Vec<_>>().join(",");
    Err(Error::Unclassifiable(format!("reduced valences {diag}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OracleVerdict {
    Classified(Trichotomy),
    Inconclusive,
}

impl fmt::Display for OracleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleVerdict::Classified(t) => t.fmt(f),
            OracleVerdict::Inconclusive => f.write_str("INCONCLUSIVE"),
        }
    }
}

/// For each depth `r` in `1..=R`, the number of depth-`r` vertices that
/// would be cut off by the ball of radius `r` (vertices with children).
pub fn boundary_profile(ball: &TreeBall) -> Vec<usize> {
    let mut has_child = vec![false; ball.len()];
    for e in &ball.edges {
        has_child[e.a] = true;
    }
    let mut prof = vec![0; ball.radius + 1];
    for (x, v) in ball.vertices.iter().enumerate() {
        let d = v.depth.unwrap_or(0);
        if has_child[x] || v.truncated {
            prof[d] += 1;
        }
    }
    prof.remove(0);
    prof
}

/// Independent classification by expanding a ball around the smallest
/// vertex id and looking at how its boundary grows.
pub fn oracle_classify_by_expansion(g: &GraphOfGroups, radius: usize) -> Result<OracleVerdict> {
    let base = g.vertices.keys().next().ok_or_else(|| Error::Invalid("empty graph".into()))?.clone();
    let ball = expand_ball(g, &base, radius)?;
    if ball.truncated().is_empty() {
        return Ok(OracleVerdict::Classified(Trichotomy::Bounded));
    }
    let prof = boundary_profile(&ball);
    if radius >= 2 && prof.iter().skip(1).all(|&b| b == 2) {
        return Ok(OracleVerdict::Classified(Trichotomy::LineLike));
    }
    let t = ball.tree();
    let branching = (0..ball.len()).any(|x| !ball.vertices[x].truncated && t.degree(x) >= 3);
    let monotone = prof.windows(2).all(|w| w[0] <= w[1]);
    if branching && monotone && prof.last().copied().unwrap_or(0) >= 3 {
        return Ok(OracleVerdict::Classified(Trichotomy::Bushy));
    }
    Ok(OracleVerdict::Inconclusive)
}
