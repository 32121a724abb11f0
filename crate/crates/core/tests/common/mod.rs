//! Test-side oracles and generators shared by the integration tests and
//! the acceptance runner. Nothing here calls the library routine it is
//! used to check.

#![allow(dead_code)]

use quasitree::gog::{EndRef, GraphOfGroups, GroupSpec, Index, Regime};
use quasitree::tracks::TriComplex;
use quasitree::tree::Tree;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet, HashSet};

/// Determinant by cofactor expansion, `n <= 4`.
pub fn det_cofactor(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    match n {
        0 => 1,
        1 => m[0][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det_cofactor(&minor)
            })
            .sum(),
    }
}

pub fn adjugate(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    let mut adj = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = m
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, row)| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[j][i] = sign * if n == 1 { 1 } else { det_cofactor(&minor) };
        }
    }
    adj
}

/// Number of cosets of the column lattice of a nonsingular `m` met by the
/// box of radius `2 max|entry|`: `x ~ y` iff `adj(m)(x - y) = 0 mod det`.
pub fn coset_count(m: &[Vec<i64>]) -> usize {
    let n = m.len();
    let d = det_cofactor(m).abs();
    assert!(d != 0);
    let adj = adjugate(m);
    let r = 2 * m.iter().flatten().map(|x| x.abs()).max().unwrap_or(1).max(1);
    let side = (2 * r + 1) as usize;
    let mut seen = HashSet::new();
    let mut x = vec![-r; n];
    for _ in 0..side.pow(n as u32) {
        let key: Vec<i64> =
            adj.iter().map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum::<i64>().rem_euclid(d)).collect();
        seen.insert(key);
        for c in x.iter_mut() {
            *c += 1;
            if *c <= r {
                break;
            }
            *c = -r;
        }
    }
    seen.len()
}

/// Edge-indexed isomorphism: vertex bijection preserving dimensions and
/// the multiset of edges `(dim, {(v1, i1), (v2, i2)})`.
pub fn edge_indexed_iso(a: &GraphOfGroups, b: &GraphOfGroups) -> bool {
    if a.vertices.len() != b.vertices.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    let av: Vec<&String> = a.vertices.keys().collect();
    let bv: Vec<&String> = b.vertices.keys().collect();
    let edges = |g: &GraphOfGroups, name: &dyn Fn(&str) -> usize| -> Vec<(u32, Vec<(usize, Index)>)> {
        let mut out: Vec<_> = g
            .edges
            .iter()
            .map(|(id, e)| {
                let mut ends: Vec<(usize, Index)> = (1..=2u8)
                    .map(|k| {
                        let idx = g.end_index(&EndRef { edge: id.clone(), end: k }).unwrap();
                        (name(&e.end(k).vertex), idx)
                    })
                    .collect();
                ends.sort();
                (e.group.dim(), ends)
            })
            .collect();
        out.sort();
        out
    };
    let target = edges(b, &|v: &str| bv.iter().position(|x| x.as_str() == v).unwrap());
    let mut perm: Vec<usize> = (0..av.len()).collect();
    loop {
        let dims_ok = av.iter().enumerate().all(|(i, v)| a.vertices[*v].dim() == b.vertices[bv[perm[i]]].dim());
        if dims_ok && edges(a, &|v: &str| perm[av.iter().position(|x| x.as_str() == v).unwrap()]) == target {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else { return false };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Final graphs of every collapse order.
pub fn all_reductions(g: &GraphOfGroups, out: &mut Vec<GraphOfGroups>) {
    let (ok, _) = g.collapsible_vertices().unwrap();
    if ok.is_empty() {
        out.push(g.clone());
        return;
    }
    for v in ok {
        let (next, _) = g.collapse(&v).unwrap();
        all_reductions(&next, out);
    }
}

/// Random connected abstract graph with finite indices.
pub fn random_abstract_gog(rng: &mut impl Rng, nv: usize, extra: usize, max_index: u64) -> GraphOfGroups {
    let mut g = GraphOfGroups::new(Regime::Abstract);
    for i in 0..nv {
        g.add_vertex(format!("v{i}"), GroupSpec::AbstractIndexed { dim: 1 });
    }
    let mut k = 0;
    let mut add = |g: &mut GraphOfGroups, a: usize, b: usize, rng: &mut dyn rand::RngCore| {
        let i1 = Index::Finite(rng.gen_range(1..=max_index));
        let i2 = Index::Finite(rng.gen_range(1..=max_index));
        g.add_abstract_edge(format!("e{k}"), 1, &format!("v{a}"), i1, &format!("v{b}"), i2);
        k += 1;
    };
    for i in 1..nv {
        let j = rng.gen_range(0..i);
        add(&mut g, j, i, rng);
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..nv);
        let b = rng.gen_range(0..nv);
        add(&mut g, a, b, rng);
    }
    g
}

/// Random tree whose internal vertices have degree 3 or 4.
pub fn random_branching_tree(rng: &mut impl Rng, max_vertices: usize) -> Tree {
    let mut t = Tree::with_vertices(1);
    let root_kids = rng.gen_range(3..=4);
    let mut leaves = Vec::new();
    for _ in 0..root_kids {
        let c = t.add_vertex();
        t.add_edge(0, c);
        leaves.push(c);
    }
    loop {
        let kids = rng.gen_range(2..=3);
        if t.len() + kids > max_vertices || rng.gen_bool(0.03) {
            break;
        }
        let i = rng.gen_range(0..leaves.len());
        let v = leaves.swap_remove(i);
        for _ in 0..kids {
            let c = t.add_vertex();
            t.add_edge(v, c);
            leaves.push(c);
        }
    }
    t
}

fn ahu(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != parent).map(|&w| ahu(adj, w, v)).collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// Canonical string of an unrooted tree, rooted at its centre(s).
pub fn canonical_tree(adj: &[Vec<usize>]) -> String {
    let n = adj.len();
    if n == 1 {
        return "()".into();
    }
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer.iter().map(|&c| ahu(adj, c, usize::MAX)).min().unwrap()
}

/// All trees with no vertex of degree 2 and `2..=max_leaves` leaves, up to
/// isomorphism, as adjacency lists.
pub fn series_reduced_trees(max_leaves: usize) -> Vec<Vec<Vec<usize>>> {
    let mut all = vec![vec![vec![1], vec![0]]];
    let mut frontier = all.clone();
    for _ in 3..=max_leaves {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        let mut keep = |adj: Vec<Vec<usize>>| {
            if seen.insert(canonical_tree(&adj)) {
                next.push(adj);
            }
        };
        for adj in &frontier {
            let n = adj.len();
            for v in 0..n {
                if adj[v].len() >= 2 {
                    let mut a = adj.clone();
                    a.push(vec![v]);
                    a[v].push(n);
                    keep(a);
                }
            }
            for u in 0..n {
                for &w in &adj[u] {
                    if u < w {
                        let mut a = adj.clone();
                        let (m, leaf) = (n, n + 1);
                        a[u].retain(|&x| x != w);
                        a[w].retain(|&x| x != u);
                        a[u].push(m);
                        a[w].push(m);
                        a.push(vec![u, w, leaf]);
                        a.push(vec![m]);
                        keep(a);
                    }
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
    }
    all
}

pub fn tree_from_adj(adj: &[Vec<usize>]) -> Tree {
    let mut edges = Vec::new();
    for (u, ns) in adj.iter().enumerate() {
        for &w in ns {
            if u < w {
                edges.push((u, w));
            }
        }
    }
    Tree::from_edges(adj.len(), &edges)
}

/// Cone over a cycle of length `k`.
pub fn wheel(k: usize) -> TriComplex {
    let mut c = TriComplex::new();
    c.add_vertex("c").unwrap();
    for i in 0..k {
        c.add_vertex(format!("r{i}")).unwrap();
    }
    for i in 0..k {
        c.add_triangle(format!("t{i}"), "c", &format!("r{i}"), &format!("r{}", (i + 1) % k)).unwrap();
    }
    c
}

/// Cone over a path with `k` edges.
pub fn fan(k: usize) -> TriComplex {
    let mut c = TriComplex::new();
    c.add_vertex("c").unwrap();
    for i in 0..=k {
        c.add_vertex(format!("p{i}")).unwrap();
    }
    for i in 0..k {
        c.add_triangle(format!("t{i}"), "c", &format!("p{i}"), &format!("p{}", i + 1)).unwrap();
    }
    c
}

/// `a x b` grid of squares, each cut along a diagonal.
pub fn grid(a: usize, b: usize) -> TriComplex {
    let mut c = TriComplex::new();
    let name = |i: usize, j: usize| format!("g{i}_{j}");
    for i in 0..=a {
        for j in 0..=b {
            c.add_vertex(name(i, j)).unwrap();
        }
    }
    for i in 0..a {
        for j in 0..b {
            let (p, q, r, s) = (name(i, j), name(i + 1, j), name(i + 1, j + 1), name(i, j + 1));
            c.add_triangle(format!("l{i}_{j}"), &p, &q, &r).unwrap();
            c.add_triangle(format!("u{i}_{j}"), &p, &r, &s).unwrap();
        }
    }
    c
}

/// Triangulated disks with at most 60 triangles.
pub fn disk_suite() -> Vec<(String, TriComplex)> {
    let mut out = Vec::new();
    for k in 3..=9 {
        out.push((format!("wheel{k}"), wheel(k)));
    }
    for k in 1..=6 {
        out.push((format!("fan{k}"), fan(k)));
    }
    for (a, b) in [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3), (1, 8), (3, 5), (5, 6)] {
        out.push((format!("grid{a}x{b}"), grid(a, b)));
    }
    out
}

pub fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

pub fn count_by<T: Ord + Clone>(xs: &[T]) -> BTreeMap<T, usize> {
    let mut m = BTreeMap::new();
    for x in xs {
        *m.entry(x.clone()).or_default() += 1;
    }
    m
}
