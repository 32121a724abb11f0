//! Quasi-edges: two-part partitions of the boundary of a finite tree, their
//! hulls and constants, pushforwards under self-maps, the orbit nerve graph
//! and the re-tree-ing pipeline through tracks.

use crate::bassserre::TreeBall;
use crate::coarse::{fit_from_pairs, QiFit, Radius};
use crate::error::{Error, Result};
use crate::tracks::{self, TriComplex};
use crate::tree::{Distances, Tree};
use crate::unionfind::UnionFind;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

pub const DEFAULT_FILL: usize = 12;
pub const DEFAULT_ESSENTIAL_MIN: usize = 1;
pub const DEFAULT_WEIGHT_CAP: i64 = 6;

/// `{1, 3/2, 2, 5/2, 3}`.
pub fn default_k_grid() -> Vec<Radius> {
    (2..=6).map(|h| Radius::new(h, 2)).collect()
}

/// A finite tree with a designated boundary standing in for its ends.
#[derive(Clone, Debug)]
pub struct BoundedTree {
    pub tree: Tree,
    pub boundary: Vec<usize>,
    dist: Distances,
}

impl BoundedTree {
    pub fn new(tree: Tree, boundary: Vec<usize>) -> Result<Self> {
        if !tree.is_tree() {
            return Err(Error::Invalid("not a tree".into()));
        }
        let boundary: Vec<usize> = boundary.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if boundary.is_empty() {
            return Err(Error::EmptySet("boundary"));
        }
        if boundary.iter().any(|&b| b >= tree.len()) {
            return Err(Error::Invalid("boundary vertex outside the tree".into()));
        }
        let dist = tree.distances();
        Ok(BoundedTree { tree, boundary, dist })
    }

    /// Boundary = leaves.
    pub fn with_leaves(tree: Tree) -> Result<Self> {
        let leaves = tree.leaves();
        Self::new(tree, leaves)
    }

    /// Boundary = truncated vertices, or leaves if there are none.
    pub fn from_ball(ball: &TreeBall) -> Result<Self> {
        let tree = ball.tree();
        let truncated = ball.truncated();
        if truncated.is_empty() {
            Self::with_leaves(tree)
        } else {
            Self::new(tree, truncated)
        }
    }

    pub fn dist(&self, a: usize, b: usize) -> u32 {
        self.dist.get(a, b)
    }

    pub fn distances(&self) -> &Distances {
        &self.dist
    }

    /// Quasi-edge induced by deleting tree edge `e`.
    pub fn edge_partition(&self, e: usize) -> Option<QuasiEdge> {
        let side = self.tree.side_of_edge(e);
        let o: Vec<usize> = self.boundary.iter().copied().filter(|&b| side[b]).collect();
        QuasiEdge::new(self, o).ok()
    }
}

/// Partition `{O, O'}` of the boundary with both parts nonempty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuasiEdge {
    pub o: Vec<usize>,
    pub o_prime: Vec<usize>,
}

impl QuasiEdge {
    pub fn new(t: &BoundedTree, o: Vec<usize>) -> Result<Self> {
        let o: BTreeSet<usize> = o.into_iter().collect();
        if o.iter().any(|x| t.boundary.binary_search(x).is_err()) {
            return Err(Error::Invalid("clopen contains a non-boundary vertex".into()));
        }
        let o_prime: Vec<usize> = t.boundary.iter().copied().filter(|x| !o.contains(x)).collect();
        if o.is_empty() || o_prime.is_empty() {
            return Err(Error::Degenerate("both parts of a quasi-edge must be nonempty".into()));
        }
        Ok(QuasiEdge { o: o.into_iter().collect(), o_prime })
    }

    /// The part containing the smallest boundary vertex; equal keys mean
    /// equal unordered partitions.
    pub fn key(&self) -> &[usize] {
        if self.o[0] < self.o_prime[0] {
            &self.o
        } else {
            &self.o_prime
        }
    }

    pub fn same_partition(&self, other: &QuasiEdge) -> bool {
        self.key() == other.key()
    }
}

/// Steiner subtree spanned by `o`, sorted.
pub fn hull(t: &BoundedTree, o: &[usize]) -> Result<Vec<usize>> {
    if o.is_empty() {
        return Err(Error::EmptySet("hull input"));
    }
    let n = t.tree.len();
    let keep: BTreeSet<usize> = o.iter().copied().collect();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| t.tree.degree(v)).collect();
    let mut q: VecDeque<usize> = (0..n).filter(|&v| deg[v] <= 1 && !keep.contains(&v)).collect();
    let mut remaining = n;
    while let Some(v) = q.pop_front() {
        if !alive[v] || remaining == 1 {
            continue;
        }
        alive[v] = false;
        remaining -= 1;
        for &w in t.tree.neighbors(v) {
            if alive[w] {
                deg[w] -= 1;
                if deg[w] <= 1 && !keep.contains(&w) {
                    q.push_back(w);
                }
            }
        }
    }
    Ok((0..n).filter(|&v| alive[v]).collect())
}

fn n1(t: &BoundedTree, set: &[usize]) -> BTreeSet<usize> {
    let mut out: BTreeSet<usize> = set.iter().copied().collect();
    for &v in set {
        out.extend(t.tree.neighbors(v).iter().copied());
    }
    out
}

/// `N_1(Hull O) ∩ N_1(Hull O')`, sorted.
pub fn hull_meet(t: &BoundedTree, qe: &QuasiEdge) -> Result<Vec<usize>> {
    let a = n1(t, &hull(t, &qe.o)?);
    let b = n1(t, &hull(t, &qe.o_prime)?);
    Ok(a.intersection(&b).copied().collect())
}

/// Diameter of the hull meet; 0 when it is empty.
pub fn qe_constant(t: &BoundedTree, qe: &QuasiEdge) -> Result<u32> {
    let meet = hull_meet(t, qe)?;
    let mut d = 0;
    for (i, &a) in meet.iter().enumerate() {
        for &b in &meet[i + 1..] {
            d = d.max(t.dist(a, b));
        }
    }
    Ok(d)
}

/// Core set: the hull meet, or the middle vertex (or two) of the bridging
/// path when the meet is empty.
pub fn core_set(t: &BoundedTree, qe: &QuasiEdge) -> Result<Vec<usize>> {
    let meet = hull_meet(t, qe)?;
    if !meet.is_empty() {
        return Ok(meet);
    }
    let ha = hull(t, &qe.o)?;
    let hb = hull(t, &qe.o_prime)?;
    let (mut best, mut pair) = (u32::MAX, (0, 0));
    for &a in &ha {
        for &b in &hb {
            let d = t.dist(a, b);
            if d < best {
                best = d;
                pair = (a, b);
            }
        }
    }
    let path = t.tree.path(pair.0, pair.1);
    let len = path.len() - 1;
    let mut mids = vec![path[len / 2]];
    if len % 2 == 1 {
        mids.push(path[len / 2 + 1]);
    }
    mids.sort_unstable();
    Ok(mids)
}

pub fn core_point(t: &BoundedTree, qe: &QuasiEdge) -> Result<usize> {
    Ok(core_set(t, qe)?[0])
}

/// The first tree edge whose deletion induces the partition.
pub fn true_edge_partition(t: &BoundedTree, qe: &QuasiEdge) -> Option<usize> {
    (0..t.tree.edges().len()).find(|&e| t.edge_partition(e).is_some_and(|p| p.same_partition(qe)))
}

/// Nearest boundary vertex to `f(x)` for each `x` in the boundary, ties to
/// the smallest id.
fn boundary_map(t: &BoundedTree, f: &[usize]) -> BTreeMap<usize, usize> {
    t.boundary
        .iter()
        .map(|&x| {
            let y = f[x];
            let b = *t.boundary.iter().min_by_key(|&&b| (t.dist(y, b), b)).expect("boundary nonempty");
            (x, b)
        })
        .collect()
}

/// Image quasi-edge under a vertex self-map.
pub fn pushforward(t: &BoundedTree, f: &[usize], qe: &QuasiEdge) -> Result<QuasiEdge> {
    if f.len() != t.tree.len() || f.iter().any(|&y| y >= t.tree.len()) {
        return Err(Error::Invalid("self-map must be total on the tree".into()));
    }
    let beta = boundary_map(t, f);
    let mut votes: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for &x in &qe.o {
        votes.entry(beta[&x]).or_default().0 += 1;
    }
    for &x in &qe.o_prime {
        votes.entry(beta[&x]).or_default().1 += 1;
    }
    let b: Vec<usize> = votes.iter().filter(|(_, &(po, pp))| po > 0 && po >= pp).map(|(&y, _)| y).collect();
    if b.is_empty() || b.len() == t.boundary.len() {
        return Err(Error::Degenerate("degenerate pushforward: one side is empty".into()));
    }
    QuasiEdge::new(t, b)
}

/// The nerve graph `Y¹` on an orbit of quasi-edges.
#[derive(Clone, Debug)]
pub struct NerveGraph {
    pub nodes: Vec<QuasiEdge>,
    pub cores: Vec<Vec<usize>>,
    pub adj: Vec<Vec<usize>>,
    pub degenerate: usize,
    pub connected: bool,
    /// Fit of node -> core point against the tree; `None` if disconnected
    /// or a single node.
    pub fit: Option<QiFit>,
}

impl NerveGraph {
    pub fn core_point(&self, i: usize) -> usize {
        self.cores[i][0]
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn distances(&self) -> Vec<Vec<u32>> {
        (0..self.nodes.len())
            .map(|s| {
                let mut d = vec![u32::MAX; self.nodes.len()];
                d[s] = 0;
                let mut q = VecDeque::from([s]);
                while let Some(v) = q.pop_front() {
                    for &w in &self.adj[v] {
                        if d[w] == u32::MAX {
                            d[w] = d[v] + 1;
                            q.push_back(w);
                        }
                    }
                }
                d
            })
            .collect()
    }
}

fn hausdorff(t: &BoundedTree, a: &[usize], b: &[usize]) -> u32 {
    let one = |x: &[usize], y: &[usize]| x.iter().map(|&p| y.iter().map(|&q| t.dist(p, q)).min().unwrap_or(0)).max().unwrap_or(0);
    one(a, b).max(one(b, a))
}

/// Orbit of the seed quasi-edges under words of length `<= word_len` in
/// the generators; nodes joined when their core sets are within Hausdorff
/// distance `threshold`.
pub fn orbit_nerve_graph(
    t: &BoundedTree,
    seeds: &[QuasiEdge],
    gens: &[Vec<usize>],
    word_len: usize,
    threshold: u32,
    k_grid: &[Radius],
) -> Result<NerveGraph> {
    let mut nodes: Vec<QuasiEdge> = Vec::new();
    let mut keys: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut frontier = Vec::new();
    for s in seeds {
        if keys.insert(s.key().to_vec()) {
            nodes.push(s.clone());
            frontier.push(s.clone());
        }
    }
    let mut degenerate = 0;
    for _ in 0..word_len {
        let mut next = Vec::new();
        for qe in &frontier {
            for g in gens {
                match pushforward(t, g, qe) {
                    Ok(img) => {
                        if keys.insert(img.key().to_vec()) {
                            nodes.push(img.clone());
                            next.push(img);
                        }
                    }
                    Err(Error::Degenerate(_)) => degenerate += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        frontier = next;
    }
    let cores: Vec<Vec<usize>> = nodes.iter().map(|q| core_set(t, q)).collect::<Result<_>>()?;
    let n = nodes.len();
    let mut adj = vec![Vec::new(); n];
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if hausdorff(t, &cores[i], &cores[j]) <= threshold {
                adj[i].push(j);
                adj[j].push(i);
                uf.union(i, j);
            }
        }
    }
    let connected = n > 0 && uf.labels().1 == 1;
    let mut g = NerveGraph { nodes, cores, adj, degenerate, connected, fit: None };
    if connected && n >= 2 {
        let d = g.distances();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let dt = t.dist(g.core_point(i), g.core_point(j));
                pairs.push((Radius::from_integer(i64::from(d[i][j])), Radius::from_integer(i64::from(dt))));
            }
        }
        g.fit = Some(fit_from_pairs(&pairs, k_grid)?);
    }
    Ok(g)
}

/// Every tree-edge partition, in edge order, deduplicated.
pub fn edge_partitions(t: &BoundedTree) -> Vec<QuasiEdge> {
    let mut seen = BTreeSet::new();
    (0..t.tree.edges().len())
        .filter_map(|e| t.edge_partition(e))
        .filter(|q| seen.insert(q.key().to_vec()))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetreeParams {
    pub fill: usize,
    pub essential_min: usize,
    pub weight_cap: i64,
    pub cycle_budget: u64,
    pub enum_budget: u64,
    pub k_grid: Vec<Radius>,
}

impl Default for RetreeParams {
    fn default() -> Self {
        RetreeParams {
            fill: DEFAULT_FILL,
            essential_min: DEFAULT_ESSENTIAL_MIN,
            weight_cap: DEFAULT_WEIGHT_CAP,
            cycle_budget: 10_000_000,
            enum_budget: tracks::DEFAULT_ENUM_BUDGET,
            k_grid: default_k_grid(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RetreeReport {
    pub complex: TriComplex,
    pub cycles_filled: usize,
    pub h1: usize,
    pub family_size: usize,
    pub tree: Tree,
    /// Point of the input tree assigned to each node of the new tree.
    pub node_points: Vec<usize>,
    pub fit: Option<QiFit>,
}

/// Fills short cycles of `Y¹` with cones, cuts along a maximal family of
/// essential tracks, and returns the dual tree with its fit to `t`.
pub fn retree(t: &BoundedTree, y1: &NerveGraph, params: &RetreeParams) -> Result<RetreeReport> {
    if !y1.connected {
        return Err(Error::Degenerate("nerve graph is not connected".into()));
    }
    let n = y1.nodes.len();
    let cycles = tracks::simple_cycles(&y1.adj, params.fill, params.cycle_budget)?;
    let mut cx = TriComplex::new();
    for i in 0..n {
        cx.add_vertex(format!("n{i}"))?;
    }
    let mut covered = BTreeSet::new();
    for (j, cyc) in cycles.iter().enumerate() {
        let cone = format!("k{j}");
        cx.add_vertex(cone.as_str())?;
        for (i, &a) in cyc.iter().enumerate() {
            let b = cyc[(i + 1) % cyc.len()];
            cx.add_triangle(format!("c{j}_{i}"), &cone, &format!("n{a}"), &format!("n{b}"))?;
            covered.insert((a.min(b), a.max(b)));
        }
    }
    for a in 0..n {
        for &b in &y1.adj[a] {
            if a < b && !covered.contains(&(a, b)) {
                cx.add_bare_edge(format!("b{a}_{b}"), &format!("n{a}"), &format!("n{b}"))?;
            }
        }
    }
    let h1 = tracks::h1_rank(&cx);
    if h1 != 0 {
        return Err(Error::Degenerate(format!("h1 = {h1} after filling cycles of length <= {}", params.fill)));
    }
    let family = tracks::maximal_essential_family(&cx, params.essential_min, params.weight_cap, params.enum_budget)?;
    let dual = tracks::dual_graph(&cx, &family.pattern(&cx))?;
    if let Some(&(track, sides)) = dual.flagged.first() {
        return Err(Error::Degenerate(format!("track {track} borders {sides} regions")));
    }
    let tree = dual.to_tree().ok_or_else(|| Error::Degenerate("dual graph is not a tree".into()))?;
    let mut node_points = Vec::with_capacity(dual.nodes.len());
    for verts in &dual.nodes {
        let p = if let Some(&v) = verts.iter().find(|&&v| v < n) {
            y1.core_point(v)
        } else if let Some(&v) = verts.first() {
            y1.core_point(cycles[v - n][0])
        } else {
            return Err(Error::Degenerate("complement region without vertices".into()));
        };
        node_points.push(p);
    }
    let fit = if tree.len() >= 2 {
        let d = tree.distances();
        let mut pairs = Vec::new();
        for i in 0..tree.len() {
            for j in i + 1..tree.len() {
                let dt = t.dist(node_points[i], node_points[j]);
                pairs.push((Radius::from_integer(i64::from(d.get(i, j))), Radius::from_integer(i64::from(dt))));
            }
        }
        Some(fit_from_pairs(&pairs, &params.k_grid)?)
    } else {
        None
    };
    Ok(RetreeReport {
        complex: cx,
        cycles_filled: cycles.len(),
        h1,
        family_size: family.tracks.len(),
        tree,
        node_points,
        fit,
    })
}

/// Self-map exchanging the branches at `p` through neighbours `a` and `b`,
/// matching vertices in breadth-first order with children sorted by id.
/// Fails unless the result is a tree automorphism.
pub fn swap_subtrees(t: &Tree, p: usize, a: usize, b: usize) -> Result<Vec<usize>> {
    if [p, a, b].iter().any(|&x| x >= t.len()) || a == b || !t.neighbors(p).contains(&a) || !t.neighbors(p).contains(&b) {
        return Err(Error::Invalid("swap needs two distinct neighbours of the pivot".into()));
    }
    let branch = |root: usize| -> Vec<usize> {
        let mut order = vec![root];
        let mut parent = vec![p];
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            let mut kids: Vec<usize> = t.neighbors(v).iter().copied().filter(|&w| w != parent[i]).collect();
            kids.sort_unstable();
            for k in kids {
                order.push(k);
                parent.push(v);
            }
            i += 1;
        }
        order
    };
    let (sa, sb) = (branch(a), branch(b));
    if sa.len() != sb.len() {
        return Err(Error::Invalid("branches differ in size".into()));
    }
    let mut f: Vec<usize> = (0..t.len()).collect();
    for (&x, &y) in sa.iter().zip(&sb) {
        f[x] = y;
        f[y] = x;
    }
    let edges: BTreeSet<(usize, usize)> = t.edges().iter().map(|&(x, y)| (x.min(y), x.max(y))).collect();
    if t.edges().iter().any(|&(x, y)| !edges.contains(&(f[x].min(f[y]), f[x].max(f[y])))) {
        return Err(Error::Invalid("branches are not isomorphic in breadth-first order".into()));
    }
    Ok(f)
}

/// Complete rooted tree: root of degree `k`, every other internal vertex
/// with `k - 1` children, leaves at `depth`.
pub fn regular_ball(k: usize, depth: usize) -> Tree {
    let mut t = Tree::with_vertices(1);
    let mut layer = vec![0];
    for d in 0..depth {
        let mut next = Vec::new();
        for &v in &layer {
            let kids = if d == 0 { k } else { k - 1 };
            for _ in 0..kids {
                let c = t.add_vertex();
                t.add_edge(v, c);
                next.push(c);
            }
        }
        layer = next;
    }
    t
}
