//! Tracks in triangulated 2-complexes, encoded by normal coordinates.
//!
//! A pattern assigns to each triangle corner a number of normal arcs and to
//! each triangle-free edge a number of points. Edge `{u, v}` (with `u`
//! before `v` in vertex order) carries its points in order from the
//! `u`-end; in a triangle, the `j`-th arc around corner `t` joins the
//! `j`-th points from the `t`-end of the two edges at `t`.

use crate::error::{Error, Result};
use crate::linalg::{QMatrix, Q};
use crate::unionfind::UnionFind;
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub const DEFAULT_ENUM_BUDGET: u64 = 20_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TriComplex {
    pub vertices: Vec<String>,
    /// Triangles with their corner vertices.
    pub triangles: Vec<(String, [usize; 3])>,
    /// Triangle-free edges declared explicitly.
    pub bare: Vec<(String, usize)>,
    edges: Vec<(usize, usize)>,
    /// `tri_edges[t][i]` is the edge opposite corner `i`.
    tri_edges: Vec<[usize; 3]>,
    edge_index: HashMap<(usize, usize), usize>,
    vertex_index: HashMap<String, usize>,
}

impl TriComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: impl Into<String>) -> Result<usize> {
        let id = id.into();
        if self.vertex_index.contains_key(&id) {
            return Err(Error::Invalid(format!("duplicate vertex {id}")));
        }
        self.vertex_index.insert(id.clone(), self.vertices.len());
        self.vertices.push(id);
        Ok(self.vertices.len() - 1)
    }

    pub fn vertex_id(&self, id: &str) -> Result<usize> {
        self.vertex_index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.into()))
    }

    fn edge_between(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&e) = self.edge_index.get(&key) {
            return e;
        }
        self.edges.push(key);
        self.edge_index.insert(key, self.edges.len() - 1);
        self.edges.len() - 1
    }

    pub fn add_triangle(&mut self, id: impl Into<String>, a: &str, b: &str, c: &str) -> Result<usize> {
        let id = id.into();
        let vs = [self.vertex_id(a)?, self.vertex_id(b)?, self.vertex_id(c)?];
        if vs[0] == vs[1] || vs[1] == vs[2] || vs[0] == vs[2] {
            return Err(Error::Invalid(format!("triangle {id} repeats a vertex")));
        }
        if self.bare.iter().any(|(_, e)| {
            let (p, q) = self.edges[*e];
            vs.contains(&p) && vs.contains(&q)
        }) {
            return Err(Error::Invalid(format!("triangle {id} uses a declared bare edge")));
        }
        let te = [self.edge_between(vs[1], vs[2]), self.edge_between(vs[2], vs[0]), self.edge_between(vs[0], vs[1])];
        self.triangles.push((id, vs));
        self.tri_edges.push(te);
        Ok(self.triangles.len() - 1)
    }

    pub fn add_bare_edge(&mut self, id: impl Into<String>, a: &str, b: &str) -> Result<usize> {
        let id = id.into();
        let (a, b) = (self.vertex_id(a)?, self.vertex_id(b)?);
        if a == b {
            return Err(Error::Invalid(format!("edge {id} is a loop")));
        }
        if self.edge_index.contains_key(&(a.min(b), a.max(b))) {
            return Err(Error::Invalid(format!("edge {id} duplicates an existing edge")));
        }
        let e = self.edge_between(a, b);
        self.bare.push((id, e));
        Ok(self.bare.len() - 1)
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.tri_edges[t]
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut uf = UnionFind::new(self.vertices.len());
        for &(a, b) in &self.edges {
            uf.union(a, b);
        }
        uf.labels().1 == 1
    }

    pub fn validate(&self) -> Result<()> {
        if !self.is_connected() {
            return Err(Error::Invalid("complex is not connected".into()));
        }
        Ok(())
    }

}

/// Corner coordinates per triangle and point counts per bare edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalPattern {
    pub corners: Vec<[i64; 3]>,
    pub bare: Vec<i64>,
}

impl NormalPattern {
    pub fn zero(c: &TriComplex) -> Self {
        NormalPattern { corners: vec![[0; 3]; c.triangles.len()], bare: vec![0; c.bare.len()] }
    }

    pub fn is_zero(&self) -> bool {
        self.corners.iter().flatten().all(|&x| x == 0) && self.bare.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &NormalPattern) -> NormalPattern {
        NormalPattern {
            corners: self.corners.iter().zip(&other.corners).map(|(a, b)| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]).collect(),
            bare: self.bare.iter().zip(&other.bare).map(|(a, b)| a + b).collect(),
        }
    }

    /// Recovers corner coordinates from edge weights, if they are normal.
    pub fn from_edge_weights(c: &TriComplex, w: &[i64]) -> Option<NormalPattern> {
        let mut corners = Vec::with_capacity(c.triangles.len());
        for te in &c.tri_edges {
            let mut x = [0i64; 3];
            for i in 0..3 {
                let s = w[te[(i + 1) % 3]] + w[te[(i + 2) % 3]] - w[te[i]];
                if s < 0 || s % 2 != 0 {
                    return None;
                }
                x[i] = s / 2;
            }
            corners.push(x);
        }
        let bare = c.bare.iter().map(|(_, e)| w[*e]).collect();
        Some(NormalPattern { corners, bare })
    }

    /// Edge weights; `None` when triangles disagree on a shared edge.
    pub fn edge_weights(&self, c: &TriComplex) -> Option<Vec<i64>> {
        let mut w: Vec<Option<i64>> = vec![None; c.edges.len()];
        for (t, te) in c.tri_edges.iter().enumerate() {
            let x = self.corners[t];
            for i in 0..3 {
                let v = x[(i + 1) % 3] + x[(i + 2) % 3];
                match w[te[i]] {
                    Some(old) if old != v => return None,
                    _ => w[te[i]] = Some(v),
                }
            }
        }
        for (b, (_, e)) in c.bare.iter().enumerate() {
            w[*e] = Some(self.bare[b]);
        }
        w.into_iter().map(|x| x.or(Some(0))).collect()
    }

    pub fn total_weight(&self, c: &TriComplex) -> i64 {
        self.edge_weights(c).map_or(0, |w| w.iter().sum())
    }

    /// Canonical coordinate vector: corners then bare weights.
    pub fn coords(&self) -> Vec<i64> {
        self.corners.iter().flatten().copied().chain(self.bare.iter().copied()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatternViolation {
    Shape(String),
    Negative { at: String, value: i64 },
    Mismatch { edge: (String, String), weights: (i64, i64) },
}

impl fmt::Display for PatternViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternViolation::Shape(s) => write!(f, "shape: {s}"),
            PatternViolation::Negative { at, value } => write!(f, "negative coordinate {value} at {at}"),
            PatternViolation::Mismatch { edge, weights } => {
                write!(f, "edge {}-{} gets weights {} and {}", edge.0, edge.1, weights.0, weights.1)
            }
        }
    }
}

pub fn validate_pattern(c: &TriComplex, p: &NormalPattern) -> Vec<PatternViolation> {
    let mut out = Vec::new();
    if p.corners.len() != c.triangles.len() || p.bare.len() != c.bare.len() {
        out.push(PatternViolation::Shape(format!(
            "expected {} triangles and {} bare edges",
            c.triangles.len(),
            c.bare.len()
        )));
        return out;
    }
    for (t, x) in p.corners.iter().enumerate() {
        for (i, &v) in x.iter().enumerate() {
            if v < 0 {
                let at = format!("{}:{}", c.triangles[t].0, c.vertices[c.triangles[t].1[i]]);
                out.push(PatternViolation::Negative { at, value: v });
            }
        }
    }
    for (b, &v) in p.bare.iter().enumerate() {
        if v < 0 {
            out.push(PatternViolation::Negative { at: c.bare[b].0.clone(), value: v });
        }
    }
    let mut w: Vec<Option<i64>> = vec![None; c.edges.len()];
    for (t, te) in c.tri_edges.iter().enumerate() {
        let x = p.corners[t];
        for i in 0..3 {
            let v = x[(i + 1) % 3] + x[(i + 2) % 3];
            match w[te[i]] {
                Some(old) if old != v => {
                    let (a, b) = c.edges[te[i]];
                    out.push(PatternViolation::Mismatch {
                        edge: (c.vertices[a].clone(), c.vertices[b].clone()),
                        weights: (old, v),
                    });
                }
                _ => w[te[i]] = Some(v),
            }
        }
    }
    out
}

fn ensure_valid(c: &TriComplex, p: &NormalPattern) -> Result<Vec<i64>> {
    if let Some(v) = validate_pattern(c, p).first() {
        return Err(Error::Invalid(v.to_string()));
    }
    Ok(p.edge_weights(c).expect("validated"))
}

/// Offsets of per-edge blocks of `w[e] + extra` slots.
fn offsets(w: &[i64], extra: i64) -> (Vec<usize>, usize) {
    let mut off = Vec::with_capacity(w.len());
    let mut total = 0usize;
    for &x in w {
        off.push(total);
        total += (x + extra) as usize;
    }
    (off, total)
}

/// Index, from the `u`-end, of the `j`-th point from the `t`-end of edge `e`.
fn point_from(c: &TriComplex, e: usize, t: usize, j: i64, w: i64) -> usize {
    if c.edges[e].0 == t {
        j as usize
    } else {
        (w - 1 - j) as usize
    }
}

/// Connected components of the embedded 1-complex, as sub-patterns
/// ordered by their first point.
pub fn pattern_components(c: &TriComplex, p: &NormalPattern) -> Result<Vec<NormalPattern>> {
    let w = ensure_valid(c, p)?;
    let (off, total) = offsets(&w, 0);
    let mut uf = UnionFind::new(total);
    for (t, (_, vs)) in c.triangles.iter().enumerate() {
        let te = c.tri_edges[t];
        for i in 0..3 {
            let (e1, e2) = (te[(i + 1) % 3], te[(i + 2) % 3]);
            for j in 0..p.corners[t][i] {
                let a = off[e1] + point_from(c, e1, vs[i], j, w[e1]);
                let b = off[e2] + point_from(c, e2, vs[i], j, w[e2]);
                uf.union(a, b);
            }
        }
    }
    let (labels, k) = uf.labels();
    let mut comps: Vec<NormalPattern> = vec![NormalPattern::zero(c); k];
    for (t, (_, vs)) in c.triangles.iter().enumerate() {
        let te = c.tri_edges[t];
        for i in 0..3 {
            let e1 = te[(i + 1) % 3];
            for j in 0..p.corners[t][i] {
                let l = labels[off[e1] + point_from(c, e1, vs[i], j, w[e1])];
                comps[l].corners[t][i] += 1;
            }
        }
    }
    for (b, (_, e)) in c.bare.iter().enumerate() {
        for k in 0..w[*e] as usize {
            comps[labels[off[*e] + k]].bare[b] += 1;
        }
    }
    Ok(comps)
}

/// Partition of the complement of a pattern into regions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complement {
    pub count: usize,
    /// Original vertices in each component, sorted.
    pub vertex_sets: Vec<Vec<usize>>,
    /// Component of each segment, per edge, indexed from the `u`-end.
    pub segment_labels: Vec<Vec<usize>>,
}

impl Complement {
    pub fn component_of_vertex(&self, v: usize) -> usize {
        self.vertex_sets.iter().position(|s| s.contains(&v)).expect("every vertex lies in the complement")
    }
}

pub fn complement_components(c: &TriComplex, p: &NormalPattern) -> Result<Complement> {
    let w = ensure_valid(c, p)?;
    let nv = c.vertices.len();
    let (seg_off, seg_total) = offsets(&w, 1);
    let mut reg_off = Vec::with_capacity(c.triangles.len());
    let mut total = nv + seg_total;
    for x in &p.corners {
        reg_off.push(total);
        total += (x[0] + x[1] + x[2] + 1) as usize;
    }
    let mut uf = UnionFind::new(total);
    for (e, &(u, v)) in c.edges.iter().enumerate() {
        uf.union(u, nv + seg_off[e]);
        uf.union(v, nv + seg_off[e] + w[e] as usize);
    }
    for (t, (_, vs)) in c.triangles.iter().enumerate() {
        let x = p.corners[t];
        let central = (x[0] + x[1] + x[2]) as usize;
        let region = |i: usize, j: i64| -> usize {
            if j == x[i] {
                reg_off[t] + central
            } else {
                let base: i64 = x[..i].iter().sum();
                reg_off[t] + (base + j) as usize
            }
        };
        let te = c.tri_edges[t];
        for i in 0..3 {
            let e = te[i];
            let (ca, cb) = ((i + 1) % 3, (i + 2) % 3);
            let (iu, iv) = if c.edges[e].0 == vs[ca] { (ca, cb) } else { (cb, ca) };
            for k in 0..=w[e] {
                let r = if k <= x[iu] { region(iu, k) } else { region(iv, w[e] - k) };
                uf.union(nv + seg_off[e] + k as usize, r);
            }
        }
    }
    let (labels, count) = uf.labels();
    let mut vertex_sets = vec![Vec::new(); count];
    for v in 0..nv {
        vertex_sets[labels[v]].push(v);
    }
    let segment_labels =
        (0..c.edges.len()).map(|e| (0..=w[e] as usize).map(|k| labels[nv + seg_off[e] + k]).collect()).collect();
    Ok(Complement { count, vertex_sets, segment_labels })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Essentiality {
    Essential,
    Inessential,
    NonSeparating { count: usize },
}

impl fmt::Display for Essentiality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Essentiality::Essential => f.write_str("ESSENTIAL"),
            Essentiality::Inessential => f.write_str("INESSENTIAL"),
            Essentiality::NonSeparating { count } => write!(f, "NON-SEPARATING components={count}"),
        }
    }
}

/// Two complementary components, each holding at least `m` vertices.
pub fn is_essential(c: &TriComplex, track: &NormalPattern, m: usize) -> Result<Essentiality> {
    let comp = complement_components(c, track)?;
    if comp.count != 2 {
        return Ok(Essentiality::NonSeparating { count: comp.count });
    }
    Ok(if comp.vertex_sets.iter().all(|s| s.len() >= m) { Essentiality::Essential } else { Essentiality::Inessential })
}

/// Edge order in which triangles close early: breadth-first through shared
/// triangles, starting from edge 0.
fn search_order(c: &TriComplex) -> Vec<usize> {
    let ne = c.edges.len();
    let mut edge_tris: Vec<Vec<usize>> = vec![Vec::new(); ne];
    for (t, te) in c.tri_edges.iter().enumerate() {
        for &e in te {
            edge_tris[e].push(t);
        }
    }
    let mut seen = vec![false; ne];
    let mut order = Vec::with_capacity(ne);
    for start in 0..ne {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut q = std::collections::VecDeque::from([start]);
        while let Some(e) = q.pop_front() {
            order.push(e);
            for &t in &edge_tris[e] {
                for &f in &c.tri_edges[t] {
                    if !seen[f] {
                        seen[f] = true;
                        q.push_back(f);
                    }
                }
            }
        }
    }
    order
}

/// All connected nonzero patterns with total edge weight at most `cap`,
/// sorted by weight then coordinates.
pub fn enumerate_tracks(c: &TriComplex, cap: i64, budget: u64) -> Result<Vec<NormalPattern>> {
    let ne = c.edges.len();
    let order = search_order(c);
    let mut pos = vec![0; ne];
    for (i, &e) in order.iter().enumerate() {
        pos[e] = i;
    }
    // for each edge, the triangles that become fully assigned with it
    let mut closing: Vec<Vec<[usize; 2]>> = vec![Vec::new(); ne];
    for te in &c.tri_edges {
        let last = *te.iter().max_by_key(|&&e| pos[e]).expect("three edges");
        let others: Vec<usize> = te.iter().copied().filter(|&e| e != last).collect();
        closing[last].push([others[0], others[1]]);
    }
    let mut w = vec![0i64; ne];
    let mut found = Vec::new();
    let mut nodes = 0u64;

    struct Ctx<'a> {
        c: &'a TriComplex,
        order: &'a [usize],
        closing: &'a [Vec<[usize; 2]>],
        cap: i64,
        budget: u64,
    }

    fn dfs(
        ctx: &Ctx,
        depth: usize,
        sum: i64,
        w: &mut Vec<i64>,
        nodes: &mut u64,
        found: &mut Vec<NormalPattern>,
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > ctx.budget {
            return Err(Error::Budget(format!("track enumeration exceeded {} nodes", ctx.budget)));
        }
        if depth == ctx.order.len() {
            if sum > 0 {
                let p = NormalPattern::from_edge_weights(ctx.c, w).expect("constraints checked");
                if pattern_components(ctx.c, &p)?.len() == 1 {
                    found.push(p);
                }
            }
            return Ok(());
        }
        let e = ctx.order[depth];
        let (mut lo, mut hi, mut parity) = (0, ctx.cap - sum, None::<i64>);
        for [a, b] in &ctx.closing[e] {
            let (wa, wb) = (w[*a], w[*b]);
            lo = lo.max((wa - wb).abs());
            hi = hi.min(wa + wb);
            parity = Some((wa + wb) % 2);
        }
        let mut x = lo;
        while x <= hi {
            if parity.is_none_or(|p| x % 2 == p) {
                w[e] = x;
                dfs(ctx, depth + 1, sum + x, w, nodes, found)?;
            }
            x += 1;
        }
        w[e] = 0;
        Ok(())
    }

    let ctx = Ctx { c, order: &order, closing: &closing, cap, budget };
    dfs(&ctx, 0, 0, &mut w, &mut nodes, &mut found)?;
    let mut keyed: Vec<(i64, Vec<i64>, NormalPattern)> =
        found.into_iter().map(|p| (p.total_weight(c), p.coords(), p)).collect();
    keyed.sort();
    keyed.dedup_by(|a, b| a.1 == b.1);
    Ok(keyed.into_iter().map(|k| k.2).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub candidates: usize,
    pub tracks: Vec<NormalPattern>,
    /// Vertex count of each final complement component.
    pub region_sizes: Vec<usize>,
    /// Every final complement component holds fewer than `m` vertices.
    pub all_below_m: bool,
    /// Candidates rejected as non-separating on their own.
    pub non_separating: usize,
}

/// Why a candidate cannot join the current family; `None` if it can.
pub fn addability(
    c: &TriComplex,
    family: &NormalPattern,
    members: &[NormalPattern],
    cand: &NormalPattern,
    m: usize,
) -> Result<Option<String>> {
    match is_essential(c, cand, m)? {
        Essentiality::Essential => {}
        other => return Ok(Some(other.to_string())),
    }
    if members.contains(cand) {
        return Ok(Some("already present".into()));
    }
    let union = family.add(cand);
    let mut got = pattern_components(c, &union)?;
    let mut want: Vec<NormalPattern> = members.to_vec();
    want.push(cand.clone());
    got.sort();
    want.sort();
    if got != want {
        return Ok(Some("merges with the family".into()));
    }
    let comp = complement_components(c, &union)?;
    let sides = track_sides(c, &union, &comp)?;
    for s in &sides {
        if s.len() != 2 || s.iter().any(|&r| comp.vertex_sets[r].is_empty()) {
            return Ok(Some("a track loses a side".into()));
        }
    }
    Ok(None)
}

/// Complement components touching each track component of `p`, in
/// component order.
fn track_sides(c: &TriComplex, p: &NormalPattern, comp: &Complement) -> Result<Vec<BTreeSet<usize>>> {
    let w = ensure_valid(c, p)?;
    let (off, total) = offsets(&w, 0);
    let comps = pattern_components(c, p)?;
    // label every point with its component by rebuilding the point graph
    let mut uf = UnionFind::new(total);
    for (t, (_, vs)) in c.triangles.iter().enumerate() {
        let te = c.tri_edges[t];
        for i in 0..3 {
            let (e1, e2) = (te[(i + 1) % 3], te[(i + 2) % 3]);
            for j in 0..p.corners[t][i] {
                uf.union(off[e1] + point_from(c, e1, vs[i], j, w[e1]), off[e2] + point_from(c, e2, vs[i], j, w[e2]));
            }
        }
    }
    let (labels, k) = uf.labels();
    debug_assert_eq!(k, comps.len());
    let mut sides = vec![BTreeSet::new(); k];
    for e in 0..c.edges.len() {
        for i in 0..w[e] as usize {
            let l = labels[off[e] + i];
            sides[l].insert(comp.segment_labels[e][i]);
            sides[l].insert(comp.segment_labels[e][i + 1]);
        }
    }
    Ok(sides)
}

/// Greedy maximal family of disjoint, pairwise distinct essential tracks.
pub fn maximal_essential_family(c: &TriComplex, m: usize, cap: i64, budget: u64) -> Result<FamilyReport> {
    c.validate()?;
    let candidates = enumerate_tracks(c, cap, budget)?;
    let mut family = NormalPattern::zero(c);
    let mut members: Vec<NormalPattern> = Vec::new();
    let mut non_separating = 0;
    for cand in &candidates {
        if matches!(is_essential(c, cand, m)?, Essentiality::NonSeparating { .. }) {
            non_separating += 1;
        }
    }
    loop {
        let mut added = false;
        for cand in &candidates {
            if addability(c, &family, &members, cand, m)?.is_none() {
                family = family.add(cand);
                members.push(cand.clone());
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    let comp = complement_components(c, &family)?;
    let region_sizes: Vec<usize> = comp.vertex_sets.iter().map(Vec::len).collect();
    let all_below_m = region_sizes.iter().all(|&s| s < m);
    Ok(FamilyReport { candidates: candidates.len(), tracks: members, region_sizes, all_below_m, non_separating })
}

impl FamilyReport {
    pub fn pattern(&self, c: &TriComplex) -> NormalPattern {
        self.tracks.iter().fold(NormalPattern::zero(c), |acc, t| acc.add(t))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualGraph {
    /// Original vertices in each node's complement component.
    pub nodes: Vec<Vec<usize>>,
    /// `(a, b, track)` for each track bordering exactly two components.
    pub edges: Vec<(usize, usize, usize)>,
    /// Tracks bordering a number of components other than two.
    pub flagged: Vec<(usize, usize)>,
}

impl DualGraph {
    pub fn is_tree(&self) -> bool {
        if self.nodes.is_empty() || self.edges.len() + 1 != self.nodes.len() {
            return false;
        }
        let mut uf = UnionFind::new(self.nodes.len());
        self.edges.iter().all(|&(a, b, _)| uf.union(a, b))
    }

    pub fn to_tree(&self) -> Option<crate::tree::Tree> {
        self.is_tree().then(|| {
            crate::tree::Tree::from_edges(
                self.nodes.len(),
                &self.edges.iter().map(|&(a, b, _)| (a, b)).collect::<Vec<_>>(),
            )
        })
    }
}

pub fn dual_graph(c: &TriComplex, p: &NormalPattern) -> Result<DualGraph> {
    let comp = complement_components(c, p)?;
    let sides = track_sides(c, p, &comp)?;
    let mut edges = Vec::new();
    let mut flagged = Vec::new();
    for (t, s) in sides.iter().enumerate() {
        let v: Vec<usize> = s.iter().copied().collect();
        if v.len() == 2 {
            edges.push((v[0], v[1], t));
        } else {
            flagged.push((t, v.len()));
        }
    }
    Ok(DualGraph { nodes: comp.vertex_sets, edges, flagged })
}

/// First Betti number over the rationals.
pub fn h1_rank(c: &TriComplex) -> usize {
    let (nv, ne) = (c.vertices.len(), c.edges.len());
    let mut uf = UnionFind::new(nv);
    for &(a, b) in &c.edges {
        uf.union(a, b);
    }
    let rank1 = nv - uf.labels().1;
    let rank2 = if c.triangles.is_empty() {
        0
    } else {
        let mut d2 = QMatrix::zeros(ne, c.triangles.len());
        for (t, (_, vs)) in c.triangles.iter().enumerate() {
            // boundary of [v0 v1 v2] = [v1 v2] + [v2 v0] + [v0 v1]
            for (i, &e) in c.tri_edges[t].iter().enumerate() {
                let (a, b) = (vs[(i + 1) % 3], vs[(i + 2) % 3]);
                let sign = if c.edges[e] == (a, b) { Q::one() } else { -Q::one() };
                d2.set(e, t, sign);
            }
        }
        d2.rank()
    };
    ne - rank1 - rank2
}

/// Simple cycles of length at most `max_len` in an undirected simple graph,
/// each reported once starting at its smallest vertex.
pub fn simple_cycles(adj: &[Vec<usize>], max_len: usize, budget: u64) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut steps = 0u64;
    let n = adj.len();
    for s in 0..n {
        let mut path = vec![s];
        let mut on = vec![false; n];
        on[s] = true;
        let mut stack: Vec<usize> = vec![0];
        while let Some(top) = stack.last_mut() {
            steps += 1;
            if steps > budget {
                return Err(Error::Budget(format!("cycle enumeration exceeded {budget} steps")));
            }
            let v = *path.last().expect("path tracks stack");
            if *top >= adj[v].len() {
                stack.pop();
                on[v] = false;
                path.pop();
                continue;
            }
            let w = adj[v][*top];
            *top += 1;
            if w == s && path.len() >= 3 && path[1] < v {
                out.push(path.clone());
            } else if w > s && !on[w] && path.len() < max_len {
                on[w] = true;
                path.push(w);
                stack.push(0);
            }
        }
    }
    Ok(out)
}

/// Multiset of coordinate vectors of the components.
pub fn component_signature(c: &TriComplex, p: &NormalPattern) -> Result<BTreeMap<Vec<i64>, usize>> {
    let mut m = BTreeMap::new();
    for comp in pattern_components(c, p)? {
        *m.entry(comp.coords()).or_insert(0) += 1;
    }
    Ok(m)
}
