//! Finite graphs of groups in two regimes: abstract groups known only by
//! a dimension label and declared indices, and free abelian groups with
//! explicit integer injection matrices.

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use num_traits::{Signed, ToPrimitive};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Abstract,
    Abelian,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Abstract => "abstract",
            Regime::Abelian => "abelian",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    AbstractIndexed { dim: u32 },
    /// `Z^rank`
    FreeAbelian { rank: u32 },
}

impl GroupSpec {
    pub fn dim(&self) -> u32 {
        match *self {
            GroupSpec::AbstractIndexed { dim } => dim,
            GroupSpec::FreeAbelian { rank } => rank,
        }
    }

    pub fn regime(&self) -> Regime {
        match self {
            GroupSpec::AbstractIndexed { .. } => Regime::Abstract,
            GroupSpec::FreeAbelian { .. } => Regime::Abelian,
        }
    }
}

/// A subgroup index: a positive integer or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Index {
    Finite(u64),
    Inf,
}

impl Index {
    pub fn is_finite(&self) -> bool {
        matches!(self, Index::Finite(_))
    }

    pub fn finite(&self) -> Option<u64> {
        match *self {
            Index::Finite(n) => Some(n),
            Index::Inf => None,
        }
    }
}

impl Add for Index {
    type Output = Index;
    fn add(self, rhs: Index) -> Index {
        match (self, rhs) {
            (Index::Finite(a), Index::Finite(b)) => Index::Finite(a.saturating_add(b)),
            _ => Index::Inf,
        }
    }
}

impl Mul for Index {
    type Output = Index;
    fn mul(self, rhs: Index) -> Index {
        match (self, rhs) {
            (Index::Finite(a), Index::Finite(b)) => Index::Finite(a.saturating_mul(b)),
            _ => Index::Inf,
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Inf => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum InjectionSpec {
    DeclaredIndex(Index),
    /// `n_v x n_e` matrix whose columns are images of the edge-group basis.
    Matrix(IntMatrix),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EdgeEnd {
    pub vertex: String,
    pub injection: InjectionSpec,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub group: GroupSpec,
    /// End #1 and end #2.
    pub ends: [EdgeEnd; 2],
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.ends[0].vertex == self.ends[1].vertex
    }

    /// End number (1 or 2) to array slot.
    pub fn end(&self, end: u8) -> &EdgeEnd {
        &self.ends[usize::from(end - 1)]
    }
}

/// Reference to one end of an edge; `end` is 1 or 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndRef {
    pub edge: String,
    pub end: u8,
}

impl EndRef {
    pub fn other(&self) -> EndRef {
        EndRef { edge: self.edge.clone(), end: 3 - self.end }
    }
}

impl fmt::Display for EndRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.edge, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphOfGroups {
    pub regime: Regime,
    pub vertices: BTreeMap<String, GroupSpec>,
    pub edges: BTreeMap<String, Edge>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownVertex { edge: String, end: u8, vertex: String },
    RegimeMismatch { item: String },
    EdgeDimExceedsVertexDim { edge: String, end: u8 },
    MatrixShape { edge: String, end: u8, expected: (usize, usize), found: (usize, usize) },
    RankDeficient { edge: String, end: u8 },
    ZeroIndex { edge: String, end: u8 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownVertex { edge, end, vertex } => {
                write!(f, "end {edge}:{end} references unknown vertex {vertex}")
            }
            Violation::RegimeMismatch { item } => write!(f, "{item} does not match the graph regime"),
            Violation::EdgeDimExceedsVertexDim { edge, end } => {
                write!(f, "edge dim exceeds vertex dim at {edge}:{end}")
            }
            Violation::MatrixShape { edge, end, expected, found } => write!(
                f,
                "matrix at {edge}:{end} is {}x{}, expected {}x{}",
                found.0, found.1, expected.0, expected.1
            ),
            Violation::RankDeficient { edge, end } => {
                write!(f, "matrix at {edge}:{end} is not of full column rank")
            }
            Violation::ZeroIndex { edge, end } => write!(f, "declared index 0 at {edge}:{end}"),
        }
    }
}

/// Index of an injection `Z^n_e -> Z^n_v` or of a declared index.
pub fn injection_index(inj: &InjectionSpec, n_v: usize, n_e: usize) -> Result<Index> {
    match inj {
        InjectionSpec::DeclaredIndex(Index::Finite(0)) => {
            Err(Error::InvalidInjection("declared index 0".into()))
        }
        InjectionSpec::DeclaredIndex(i) => Ok(*i),
        InjectionSpec::Matrix(m) => {
            if m.rows() != n_v || m.cols() != n_e {
                return Err(Error::InvalidInjection(format!(
                    "matrix is {}x{}, expected {n_v}x{n_e}",
                    m.rows(),
                    m.cols()
                )));
            }
            if m.rank() != n_e {
                return Err(Error::InvalidInjection("rank-deficient matrix".into()));
            }
            if n_e < n_v {
                return Ok(Index::Inf);
            }
            let d = m.det().abs();
            d.to_u64()
                .map(Index::Finite)
                .ok_or_else(|| Error::InvalidInjection("index does not fit in 64 bits".into()))
        }
    }
}

/// Per-vertex counts of incident ends with index 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedReport {
    pub reduced: bool,
    pub surjective_counts: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEntry {
    Collapsed { edge: String, removed: String, into: String },
    /// A vertex whose only surjective end lies on a loop.
    NonCollapsible { vertex: String, edge: String },
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEntry::Collapsed { edge, removed, into } => {
                write!(f, "collapse edge={edge} removed={removed} into={into}")
            }
            TraceEntry::NonCollapsible { vertex, edge } => {
                write!(f, "NON-COLLAPSIBLE loop={edge} vertex={vertex}")
            }
        }
    }
}

impl GraphOfGroups {
    pub fn new(regime: Regime) -> Self {
        GraphOfGroups { regime, vertices: BTreeMap::new(), edges: BTreeMap::new() }
    }

    pub fn add_vertex(&mut self, id: impl Into<String>, group: GroupSpec) -> &mut Self {
        self.vertices.insert(id.into(), group);
        self
    }

    /// Adds an abstract-regime edge with declared indices at its two ends.
    pub fn add_abstract_edge(
        &mut self,
        id: impl Into<String>,
        dim: u32,
        v1: &str,
        i1: Index,
        v2: &str,
        i2: Index,
    ) -> &mut Self {
        let edge = Edge {
            group: GroupSpec::AbstractIndexed { dim },
            ends: [
                EdgeEnd { vertex: v1.into(), injection: InjectionSpec::DeclaredIndex(i1) },
                EdgeEnd { vertex: v2.into(), injection: InjectionSpec::DeclaredIndex(i2) },
            ],
        };
        self.edges.insert(id.into(), edge);
        self
    }

    pub fn add_abelian_edge(
        &mut self,
        id: impl Into<String>,
        rank: u32,
        v1: &str,
        m1: IntMatrix,
        v2: &str,
        m2: IntMatrix,
    ) -> &mut Self {
        let edge = Edge {
            group: GroupSpec::FreeAbelian { rank },
            ends: [
                EdgeEnd { vertex: v1.into(), injection: InjectionSpec::Matrix(m1) },
                EdgeEnd { vertex: v2.into(), injection: InjectionSpec::Matrix(m2) },
            ],
        };
        self.edges.insert(id.into(), edge);
        self
    }

    pub fn edge(&self, id: &str) -> Result<&Edge> {
        self.edges.get(id).ok_or_else(|| Error::UnknownEdge(id.into()))
    }

    pub fn vertex(&self, id: &str) -> Result<&GroupSpec> {
        self.vertices.get(id).ok_or_else(|| Error::UnknownVertex(id.into()))
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (id, g) in &self.vertices {
            if g.regime() != self.regime {
                out.push(Violation::RegimeMismatch { item: format!("vertex {id}") });
            }
        }
        for (id, e) in &self.edges {
            if e.group.regime() != self.regime {
                out.push(Violation::RegimeMismatch { item: format!("edge {id}") });
            }
            for (k, end) in e.ends.iter().enumerate() {
                let end_no = k as u8 + 1;
                let Some(vg) = self.vertices.get(&end.vertex) else {
                    out.push(Violation::UnknownVertex {
                        edge: id.clone(),
                        end: end_no,
                        vertex: end.vertex.clone(),
                    });
                    continue;
                };
                if e.group.dim() > vg.dim() {
                    out.push(Violation::EdgeDimExceedsVertexDim { edge: id.clone(), end: end_no });
                    continue;
                }
                match (&end.injection, self.regime) {
                    (InjectionSpec::DeclaredIndex(Index::Finite(0)), _) => {
                        out.push(Violation::ZeroIndex { edge: id.clone(), end: end_no })
                    }
                    (InjectionSpec::DeclaredIndex(_), Regime::Abstract) => {}
                    (InjectionSpec::Matrix(m), Regime::Abelian) => {
                        let expected = (vg.dim() as usize, e.group.dim() as usize);
                        if (m.rows(), m.cols()) != expected {
                            out.push(Violation::MatrixShape {
                                edge: id.clone(),
                                end: end_no,
                                expected,
                                found: (m.rows(), m.cols()),
                            });
                        } else if m.rank() != m.cols() {
                            out.push(Violation::RankDeficient { edge: id.clone(), end: end_no });
                        }
                    }
                    _ => out.push(Violation::RegimeMismatch { item: format!("injection {id}:{end_no}") }),
                }
            }
        }
        out
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(Error::Invalid(v.to_string())),
        }
    }

    pub fn end_index(&self, end: &EndRef) -> Result<Index> {
        let e = self.edge(&end.edge)?;
        let ee = e.end(end.end);
        let vg = self.vertex(&ee.vertex)?;
        injection_index(&ee.injection, vg.dim() as usize, e.group.dim() as usize)
    }

    /// All ends attached to `v`, ordered by edge id then end number.
    pub fn ends_at(&self, v: &str) -> Vec<EndRef> {
        let mut out = Vec::new();
        for (id, e) in &self.edges {
            for end in 1..=2u8 {
                if e.end(end).vertex == v {
                    out.push(EndRef { edge: id.clone(), end });
                }
            }
        }
        out
    }

    pub fn surjective_count(&self, v: &str) -> Result<usize> {
        let mut n = 0;
        for end in self.ends_at(v) {
            if self.end_index(&end)? == Index::Finite(1) {
                n += 1;
            }
        }
        Ok(n)
    }

    pub fn is_reduced(&self) -> Result<ReducedReport> {
        let mut counts = BTreeMap::new();
        for v in self.vertices.keys() {
            counts.insert(v.clone(), self.surjective_count(v)?);
        }
        let reduced = counts.values().all(|&c| c != 1);
        Ok(ReducedReport { reduced, surjective_counts: counts })
    }

    pub fn is_geometrically_homogeneous(&self) -> Result<bool> {
        for id in self.edges.keys() {
            for end in 1..=2u8 {
                if !self.end_index(&EndRef { edge: id.clone(), end })?.is_finite() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Valence of any Bass-Serre tree vertex lying over `v`.
    pub fn tree_valence(&self, v: &str) -> Result<Index> {
        self.vertex(v)?;
        let mut total = Index::Finite(0);
        for end in self.ends_at(v) {
            total = total + self.end_index(&end)?;
        }
        Ok(total)
    }

    /// The unique index-1 end at `v` when `v` has exactly one.
    fn sole_surjective_end(&self, v: &str) -> Result<Option<EndRef>> {
        let mut found = None;
        for end in self.ends_at(v) {
            if self.end_index(&end)? == Index::Finite(1) {
                if found.is_some() {
                    return Ok(None);
                }
                found = Some(end);
            }
        }
        Ok(found)
    }

    /// Vertices that can be collapsed right now, sorted by id, together
    /// with vertices blocked because their only surjective end is on a loop.
    pub fn collapsible_vertices(&self) -> Result<(Vec<String>, Vec<(String, String)>)> {
        let mut ok = Vec::new();
        let mut blocked = Vec::new();
        for v in self.vertices.keys() {
            if let Some(end) = self.sole_surjective_end(v)? {
                if self.edge(&end.edge)?.is_loop() {
                    blocked.push((v.clone(), end.edge.clone()));
                } else {
                    ok.push(v.clone());
                }
            }
        }
        Ok((ok, blocked))
    }

    /// Collapses the edge carrying the sole surjective end at `v`, merging
    /// `v` into the opposite vertex.
    pub fn collapse(&self, v: &str) -> Result<(GraphOfGroups, TraceEntry)> {
        let end = self
            .sole_surjective_end(v)?
            .ok_or_else(|| Error::Invalid(format!("vertex {v} has no sole surjective end")))?;
        let edge = self.edge(&end.edge)?;
        if edge.is_loop() {
            return Err(Error::Invalid(format!("edge {} is a loop", end.edge)));
        }
        let far = end.other();
        let far_end = edge.end(far.end);
        let into = far_end.vertex.clone();
        let far_index = self.end_index(&far)?;

        // Abelian regime: Z^n_v = image of Z^n_e, so Z^n_v -> Z^n_w is
        // M_far * M_near^{-1}.
        let transfer = match (&edge.end(end.end).injection, &far_end.injection) {
            (InjectionSpec::Matrix(near), InjectionSpec::Matrix(farm)) => {
                let inv = near
                    .to_q()
                    .inverse()
                    .and_then(|m| m.to_int())
                    .ok_or_else(|| Error::InvalidInjection("surjective matrix is not unimodular".into()))?;
                Some(farm.mul(&inv).ok_or_else(|| Error::Invalid("matrix overflow".into()))?)
            }
            _ => None,
        };

        let mut out = self.clone();
        out.edges.remove(&end.edge);
        out.vertices.remove(v);
        for e in out.edges.values_mut() {
            for ee in e.ends.iter_mut() {
                if ee.vertex != v {
                    continue;
                }
                ee.vertex = into.clone();
                ee.injection = match (&ee.injection, &transfer) {
                    (InjectionSpec::DeclaredIndex(i), _) => InjectionSpec::DeclaredIndex(*i * far_index),
                    (InjectionSpec::Matrix(m), Some(t)) => InjectionSpec::Matrix(
                        t.mul(m).ok_or_else(|| Error::Invalid("matrix overflow".into()))?,
                    ),
                    (InjectionSpec::Matrix(_), None) => {
                        return Err(Error::Invalid("mixed injection regimes".into()))
                    }
                };
            }
        }
        Ok((out, TraceEntry::Collapsed { edge: end.edge, removed: v.to_string(), into }))
    }

    /// Collapses until no vertex has exactly one surjective end off a loop.
    pub fn reduce(&self) -> Result<(GraphOfGroups, Vec<TraceEntry>)> {
        self.ensure_valid()?;
        let mut g = self.clone();
        let mut trace = Vec::new();
        let mut flagged = BTreeSet::new();
        loop {
            let (ok, blocked) = g.collapsible_vertices()?;
            for (v, e) in blocked {
                if flagged.insert((v.clone(), e.clone())) {
                    trace.push(TraceEntry::NonCollapsible { vertex: v, edge: e });
                }
            }
            let Some(v) = ok.first() else { break };
            let (next, entry) = g.collapse(v)?;
            trace.push(entry);
            g = next;
        }
        // drop flags whose vertex got merged away later on
        trace.retain(|t| match t {
            TraceEntry::NonCollapsible { vertex, edge } => {
                g.vertices.contains_key(vertex) && g.edges.contains_key(edge)
            }
            _ => true,
        });
        Ok((g, trace))
    }

    pub fn is_connected(&self) -> bool {
        let Some(start) = self.vertices.keys().next() else { return true };
        let mut seen = BTreeSet::from([start.clone()]);
        let mut stack = vec![start.clone()];
        while let Some(v) = stack.pop() {
            for e in self.edges.values() {
                for k in 0..2 {
                    if e.ends[k].vertex == v && seen.insert(e.ends[1 - k].vertex.clone()) {
                        stack.push(e.ends[1 - k].vertex.clone());
                    }
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Sub-graph of groups on the given vertices and edges; every edge end
    /// must land in `verts`.
    pub fn restrict(&self, verts: &BTreeSet<String>, edges: &BTreeSet<String>) -> GraphOfGroups {
        GraphOfGroups {
            regime: self.regime,
            vertices: self
                .vertices
                .iter()
                .filter(|(k, _)| verts.contains(*k))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
            edges: self
                .edges
                .iter()
                .filter(|(k, _)| edges.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abstract_point(dim: u32) -> GraphOfGroups {
        let mut g = GraphOfGroups::new(Regime::Abstract);
        g.add_vertex("v", GroupSpec::AbstractIndexed { dim });
        g
    }

    fn circle(n: usize) -> GraphOfGroups {
        let mut g = GraphOfGroups::new(Regime::Abstract);
        for i in 0..n {
            g.add_vertex(format!("v{i}"), GroupSpec::AbstractIndexed { dim: 1 });
        }
        for i in 0..n {
            let a = format!("v{i}");
            let b = format!("v{}", (i + 1) % n);
            g.add_abstract_edge(format!("e{i}"), 1, &a, Index::Finite(1), &b, Index::Finite(1));
        }
        g
    }

    #[test]
    fn validate_examples() {
        let mut g = GraphOfGroups::new(Regime::Abelian);
        g.add_vertex("v", GroupSpec::FreeAbelian { rank: 2 });
        assert!(g.validate().is_empty());

        let mut g = GraphOfGroups::new(Regime::Abstract);
        g.add_vertex("v", GroupSpec::AbstractIndexed { dim: 2 });
        g.add_vertex("w", GroupSpec::AbstractIndexed { dim: 3 });
        g.add_abstract_edge("e", 3, "v", Index::Finite(1), "w", Index::Finite(1));
        let vs = g.validate();
        assert_eq!(vs.len(), 1);
        assert!(vs[0].to_string().contains("edge dim exceeds vertex dim"));

        let mut g = GraphOfGroups::new(Regime::Abelian);
        g.add_vertex("v", GroupSpec::FreeAbelian { rank: 2 });
        g.add_vertex("w", GroupSpec::FreeAbelian { rank: 1 });
        let m = IntMatrix::from_rows(&[vec![2], vec![4]]).unwrap();
        g.add_abelian_edge("e", 1, "v", m, "w", IntMatrix::identity(1));
        assert!(g.validate().is_empty());
    }

    #[test]
    fn validate_catches_shape_and_rank() {
        let mut g = GraphOfGroups::new(Regime::Abelian);
        g.add_vertex("v", GroupSpec::FreeAbelian { rank: 2 });
        let bad = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]).unwrap();
        let shape = IntMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        g.add_abelian_edge("e", 2, "v", bad, "v", IntMatrix::identity(2));
        g.add_abelian_edge("f", 2, "v", shape, "x", IntMatrix::identity(2));
        let vs = g.validate();
        assert!(vs.contains(&Violation::RankDeficient { edge: "e".into(), end: 1 }));
        assert!(vs.iter().any(|v| matches!(v, Violation::MatrixShape { edge, .. } if edge == "f")));
        assert!(vs.iter().any(|v| matches!(v, Violation::UnknownVertex { vertex, .. } if vertex == "x")));
    }

    #[test]
    fn injection_index_examples() {
        let m = InjectionSpec::Matrix(IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]).unwrap());
        assert_eq!(injection_index(&m, 2, 2).unwrap(), Index::Finite(6));
        let m = InjectionSpec::Matrix(IntMatrix::identity(1));
        assert_eq!(injection_index(&m, 1, 1).unwrap(), Index::Finite(1));
        let m = InjectionSpec::Matrix(IntMatrix::from_rows(&[vec![1], vec![0]]).unwrap());
        assert_eq!(injection_index(&m, 2, 1).unwrap(), Index::Inf);
        let m = InjectionSpec::Matrix(IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]).unwrap());
        assert!(matches!(injection_index(&m, 2, 2), Err(Error::InvalidInjection(_))));
    }

    #[test]
    fn reduced_examples() {
        let r = circle(4).is_reduced().unwrap();
        assert!(r.reduced);
        assert!(r.surjective_counts.values().all(|&c| c == 2));

        let mut g = GraphOfGroups::new(Regime::Abstract);
        g.add_vertex("v", GroupSpec::AbstractIndexed { dim: 0 });
        g.add_vertex("w", GroupSpec::AbstractIndexed { dim: 0 });
        g.add_abstract_edge("e", 0, "v", Index::Finite(1), "w", Index::Finite(3));
        let r = g.is_reduced().unwrap();
        assert!(!r.reduced);
        assert_eq!(r.surjective_counts["v"], 1);

        assert!(abstract_point(0).is_reduced().unwrap().reduced);
    }

    #[test]
    fn reduce_rebases_with_multiplied_index() {
        let mut g = GraphOfGroups::new(Regime::Abstract);
        for v in ["v", "w", "u"] {
            g.add_vertex(v, GroupSpec::AbstractIndexed { dim: 0 });
        }
        g.add_abstract_edge("e", 0, "v", Index::Finite(1), "w", Index::Finite(3));
        g.add_abstract_edge("f", 0, "v", Index::Finite(5), "u", Index::Finite(2));
        let (r, trace) = g.reduce().unwrap();
        assert!(!r.vertices.contains_key("v"));
        let f = &r.edges["f"];
        assert_eq!(f.ends[0].vertex, "w");
        assert_eq!(f.ends[0].injection, InjectionSpec::DeclaredIndex(Index::Finite(15)));
        assert_eq!(trace.len(), 1);
    }

    #[test]
    fn reduce_fixed_point_and_loop_flag() {
        let c = circle(3);
        let (r, trace) = c.reduce().unwrap();
        assert_eq!(r, c);
        assert!(trace.is_empty());

        let mut g = abstract_point(1);
        g.add_abstract_edge("l", 1, "v", Index::Finite(1), "v", Index::Finite(2));
        let (r, trace) = g.reduce().unwrap();
        assert_eq!(r, g);
        assert_eq!(trace, vec![TraceEntry::NonCollapsible { vertex: "v".into(), edge: "l".into() }]);
        assert!(!r.is_reduced().unwrap().reduced);
    }

    #[test]
    fn abelian_collapse_composes_matrices() {
        // v = Z^2 glued to w = Z^2 by identity at v and diag(1,3) at w;
        // a rank-1 edge f at v with column (1,1) becomes diag(1,3)(1,1) = (1,3) at w.
        let mut g = GraphOfGroups::new(Regime::Abelian);
        g.add_vertex("v", GroupSpec::FreeAbelian { rank: 2 });
        g.add_vertex("w", GroupSpec::FreeAbelian { rank: 2 });
        g.add_vertex("u", GroupSpec::FreeAbelian { rank: 1 });
        let unimod = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let d = IntMatrix::from_rows(&[vec![1, 0], vec![0, 3]]).unwrap();
        g.add_abelian_edge("e", 2, "v", unimod.clone(), "w", d.mul(&unimod).unwrap());
        let col = IntMatrix::from_rows(&[vec![1], vec![1]]).unwrap();
        g.add_abelian_edge("f", 1, "v", col, "u", IntMatrix::from_rows(&[vec![2]]).unwrap());
        let (r, _) = g.reduce().unwrap();
        match &r.edges["f"].ends[0].injection {
            InjectionSpec::Matrix(m) => assert_eq!(m.column(0), vec![1, 3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn homogeneity_and_valence() {
        let mut g = GraphOfGroups::new(Regime::Abstract);
        g.add_vertex("v", GroupSpec::AbstractIndexed { dim: 1 });
        g.add_vertex("w", GroupSpec::AbstractIndexed { dim: 1 });
        g.add_abstract_edge("a", 1, "v", Index::Finite(1), "w", Index::Finite(1));
        g.add_abstract_edge("b", 1, "v", Index::Finite(1), "w", Index::Finite(1));
        assert!(g.is_geometrically_homogeneous().unwrap());
        assert_eq!(g.tree_valence("v").unwrap(), Index::Finite(2));

        let mut g = abstract_point(1);
        g.add_vertex("w", GroupSpec::AbstractIndexed { dim: 1 });
        g.add_abstract_edge("a", 0, "v", Index::Finite(2), "w", Index::Finite(1));
        g.add_abstract_edge("b", 0, "v", Index::Inf, "w", Index::Inf);
        assert!(!g.is_geometrically_homogeneous().unwrap());
        assert_eq!(g.tree_valence("v").unwrap(), Index::Inf);

        let mut g = abstract_point(0);
        g.add_vertex("w", GroupSpec::AbstractIndexed { dim: 0 });
        g.add_abstract_edge("a", 0, "v", Index::Finite(5), "w", Index::Finite(1));
        assert_eq!(g.tree_valence("v").unwrap(), Index::Finite(5));
        assert!(abstract_point(3).is_geometrically_homogeneous().unwrap());
    }

    #[test]
    fn loop_contributes_both_ends() {
        let mut g = abstract_point(1);
        g.add_abstract_edge("l", 1, "v", Index::Finite(1), "v", Index::Finite(1));
        assert_eq!(g.tree_valence("v").unwrap(), Index::Finite(2));
    }
}
