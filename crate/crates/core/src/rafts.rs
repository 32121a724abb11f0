//! Dimension filtration, rafts and the hypothesis checks built on them.

use crate::bassserre::{classify_trichotomy, Trichotomy};
use crate::crossing::{crossing_graph_summary, CrossingSummary, DirectionPattern};
use crate::error::{Error, Result};
use crate::gog::{GraphOfGroups, Regime};
use crate::linalg::{int_cols_to_q, lattice_index, rank_of_columns, IntMatrix};
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationLevel {
    pub dim: u32,
    pub vertices: BTreeSet<String>,
    pub edges: BTreeSet<String>,
}

/// `levels[k]` holds all cells of dimension `>= top - k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Filtration {
    pub top: u32,
    pub levels: Vec<FiltrationLevel>,
}

impl Filtration {
    pub fn level(&self, dim: u32) -> Option<&FiltrationLevel> {
        self.levels.iter().find(|l| l.dim == dim)
    }
}

pub fn dimension_filtration(g: &GraphOfGroups) -> Filtration {
    let top = g.vertices.values().map(|s| s.dim()).max().unwrap_or(0);
    let levels = (0..=top)
        .rev()
        .map(|i| FiltrationLevel {
            dim: i,
            vertices: g.vertices.iter().filter(|(_, s)| s.dim() >= i).map(|(k, _)| k.clone()).collect(),
            edges: g.edges.iter().filter(|(_, e)| e.group.dim() >= i).map(|(k, _)| k.clone()).collect(),
        })
        .collect();
    Filtration { top, levels }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RaftKind {
    Point,
    Bounded,
    Line,
    Bushy,
}

impl fmt::Display for RaftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RaftKind::Point => "POINT",
            RaftKind::Bounded => "BOUNDED",
            RaftKind::Line => "LINE",
            RaftKind::Bushy => "BUSHY",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raft {
    pub dim: u32,
    pub vertices: BTreeSet<String>,
    pub edges: BTreeSet<String>,
    pub kind: RaftKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaftReport {
    pub rafts: Vec<Raft>,
    /// Vertices lying on no raft.
    pub off_raft: Vec<String>,
}

/// True when `(verts, edges)` is connected, all of dimension `n`, and every
/// edge touching it from outside has dimension `< n`.
pub fn is_raft(g: &GraphOfGroups, n: u32, verts: &BTreeSet<String>, edges: &BTreeSet<String>) -> bool {
    if verts.is_empty() || verts.iter().any(|v| g.vertices.get(v).map(|s| s.dim()) != Some(n)) {
        return false;
    }
    for (id, e) in &g.edges {
        let touches = e.ends.iter().any(|end| verts.contains(&end.vertex));
        if edges.contains(id) {
            if e.group.dim() != n || !e.ends.iter().all(|end| verts.contains(&end.vertex)) {
                return false;
            }
        } else if touches && e.group.dim() >= n {
            return false;
        }
    }
    g.restrict(verts, edges).is_connected()
}

fn components(g: &GraphOfGroups, n: u32) -> Vec<(BTreeSet<String>, BTreeSet<String>)> {
    let verts: BTreeSet<&String> = g.vertices.iter().filter(|(_, s)| s.dim() == n).map(|(k, _)| k).collect();
    let edges: Vec<(&String, &String, &String)> = g
        .edges
        .iter()
        .filter(|(_, e)| e.group.dim() == n && e.ends.iter().all(|x| verts.contains(&x.vertex)))
        .map(|(k, e)| (k, &e.ends[0].vertex, &e.ends[1].vertex))
        .collect();
    let mut seen: BTreeSet<&String> = BTreeSet::new();
    let mut out = Vec::new();
    for &start in &verts {
        if !seen.insert(start) {
            continue;
        }
        let mut cv = BTreeSet::from([start.clone()]);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &(_, a, b) in &edges {
                for (p, q) in [(a, b), (b, a)] {
                    if p == x && seen.insert(q) {
                        cv.insert(q.clone());
                        stack.push(q);
                    }
                }
            }
        }
        let ce = edges.iter().filter(|(_, a, _)| cv.contains(*a)).map(|(k, _, _)| (*k).clone()).collect();
        out.push((cv, ce));
    }
    out
}

pub fn classify_raft(g: &GraphOfGroups, verts: &BTreeSet<String>, edges: &BTreeSet<String>) -> Result<RaftKind> {
    if verts.len() == 1 && edges.is_empty() {
        return Ok(RaftKind::Point);
    }
    Ok(match classify_trichotomy(&g.restrict(verts, edges))? {
        Trichotomy::Bounded => RaftKind::Bounded,
        Trichotomy::LineLike => RaftKind::Line,
        Trichotomy::Bushy => RaftKind::Bushy,
    })
}

pub fn find_rafts(g: &GraphOfGroups) -> Result<RaftReport> {
    let dims: BTreeSet<u32> = g.vertices.values().map(|s| s.dim()).collect();
    let mut rafts = Vec::new();
    for &n in dims.iter().rev() {
        for (verts, edges) in components(g, n) {
            if is_raft(g, n, &verts, &edges) {
                let kind = classify_raft(g, &verts, &edges)?;
                rafts.push(Raft { dim: n, vertices: verts, edges, kind });
            }
        }
    }
    let on: BTreeSet<&String> = rafts.iter().flat_map(|r| r.vertices.iter()).collect();
    let off_raft = g.vertices.keys().filter(|v| !on.contains(v)).cloned().collect();
    Ok(RaftReport { rafts, off_raft })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SpanMode {
    #[default]
    Rational,
    Integral,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarDiagnostic {
    pub vertex: String,
    pub rank: usize,
    pub image_ranks: Vec<usize>,
    /// Every incident image has rank `< n`.
    pub low_rank: bool,
    /// `None` when no image has rank `n - 1`.
    pub spans: Option<bool>,
}

impl StarDiagnostic {
    pub fn passes(&self) -> bool {
        self.low_rank && self.spans != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarReport {
    pub passes: bool,
    pub vertices: Vec<StarDiagnostic>,
}

pub fn check_star_condition(g: &GraphOfGroups, mode: SpanMode) -> Result<StarReport> {
    if g.regime != Regime::Abelian {
        return Err(Error::AbstractRegime);
    }
    let mut vertices = Vec::new();
    for v in g.vertices.keys() {
        let p = DirectionPattern::of_vertex(g, v)?;
        let n = p.n;
        let image_ranks: Vec<usize> = p.images.iter().map(|(_, m)| m.rank()).collect();
        let low_rank = image_ranks.iter().all(|&r| r < n);
        let spans = (n > 0 && image_ranks.contains(&(n - 1))).then(|| {
            let all: Vec<Vec<i64>> = p.images.iter().flat_map(|(_, m)| m.columns()).collect();
            match mode {
                SpanMode::Rational => rank_of_columns(n, &int_cols_to_q(&all)) == n,
                SpanMode::Integral => {
                    lattice_index(&IntMatrix::from_columns(n, &all)).is_some_and(|i| i.is_one())
                }
            }
        });
        vertices.push(StarDiagnostic { vertex: v.clone(), rank: n, image_ranks, low_rank, spans });
    }
    let passes = vertices.iter().all(StarDiagnostic::passes);
    Ok(StarReport { passes, vertices })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HypothesisFailure {
    NotReduced(Vec<String>),
    LineRaft(BTreeSet<String>),
    CrossingDisconnected { vertex: String, detail: String },
}

impl HypothesisFailure {
    pub fn code(&self) -> &'static str {
        match self {
            HypothesisFailure::NotReduced(_) => "NOT-REDUCED",
            HypothesisFailure::LineRaft(_) => "NO-LINE-RAFTS",
            HypothesisFailure::CrossingDisconnected { .. } => "CROSSING-DISCONNECTED",
        }
    }
}

impl fmt::Display for HypothesisFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypothesisFailure::NotReduced(vs) => write!(f, "NOT-REDUCED vertices={}", vs.join(",")),
            HypothesisFailure::LineRaft(vs) => {
                write!(f, "NO-LINE-RAFTS raft={}", vs.iter().cloned().collect::<Vec<_>>().join(","))
            }
            HypothesisFailure::CrossingDisconnected { vertex, detail } => {
                write!(f, "CROSSING-DISCONNECTED vertex={vertex} ({detail})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisReport {
    pub failures: Vec<HypothesisFailure>,
    pub rafts: Vec<Raft>,
    /// Crossing summary per point-raft vertex.
    pub crossing: BTreeMap<String, CrossingSummary>,
}

impl HypothesisReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Reducedness first, then no line rafts, then a connected-or-empty
/// crossing graph at every point raft. In the abstract regime crossing
/// summaries must be supplied per point-raft vertex.
pub fn check_raft_hypotheses(
    g: &GraphOfGroups,
    supplied: Option<&BTreeMap<String, CrossingSummary>>,
) -> Result<HypothesisReport> {
    g.ensure_valid()?;
    let red = g.is_reduced()?;
    if !red.reduced {
        let bad = red.surjective_counts.iter().filter(|(_, &c)| c == 1).map(|(v, _)| v.clone()).collect();
        return Ok(HypothesisReport {
            failures: vec![HypothesisFailure::NotReduced(bad)],
            rafts: Vec::new(),
            crossing: BTreeMap::new(),
        });
    }
    let report = find_rafts(g)?;
    let mut failures = Vec::new();
    let mut crossing = BTreeMap::new();
    for raft in &report.rafts {
        match raft.kind {
            RaftKind::Line => failures.push(HypothesisFailure::LineRaft(raft.vertices.clone())),
            RaftKind::Point => {
                let v = raft.vertices.iter().next().expect("point raft has a vertex");
                let summary = match (g.regime, supplied.and_then(|m| m.get(v))) {
                    (_, Some(s)) => s.clone(),
                    (Regime::Abelian, None) => crossing_graph_summary(g, v)?,
                    (Regime::Abstract, None) => {
                        return Err(Error::Invalid(format!("no crossing summary supplied for point raft {v}")))
                    }
                };
                if let CrossingSummary::Disconnected(detail) = &summary {
                    failures.push(HypothesisFailure::CrossingDisconnected { vertex: v.clone(), detail: detail.clone() });
                }
                crossing.insert(v.clone(), summary);
            }
            RaftKind::Bounded | RaftKind::Bushy => {}
        }
    }
    Ok(HypothesisReport { failures, rafts: report.rafts, crossing })
}
