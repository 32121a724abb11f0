mod common;

use common::*;
use proptest::prelude::*;
use quasitree::quasiedges::*;
use quasitree::tree::Tree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

/// Vertices on some geodesic between two members of `o`.
fn hull_by_paths(t: &BoundedTree, o: &[usize]) -> BTreeSet<usize> {
    (0..t.tree.len())
        .filter(|&v| o.iter().any(|&a| o.iter().any(|&b| t.dist(a, v) + t.dist(v, b) == t.dist(a, b))))
        .collect()
}

fn nbhd(t: &BoundedTree, s: &BTreeSet<usize>) -> BTreeSet<usize> {
    (0..t.tree.len()).filter(|&v| s.iter().any(|&x| t.dist(v, x) <= 1)).collect()
}

fn meet_by_paths(t: &BoundedTree, qe: &QuasiEdge) -> BTreeSet<usize> {
    let a = nbhd(t, &hull_by_paths(t, &qe.o));
    let b = nbhd(t, &hull_by_paths(t, &qe.o_prime));
    a.intersection(&b).copied().collect()
}

fn diameter(t: &BoundedTree, s: &BTreeSet<usize>) -> u32 {
    s.iter().flat_map(|&a| s.iter().map(move |&b| (a, b))).map(|(a, b)| t.dist(a, b)).max().unwrap_or(0)
}

/// Boundary vertices below `v` when the tree hangs from `root`.
fn shadow(t: &BoundedTree, root: usize, v: usize) -> Vec<usize> {
    t.boundary.iter().copied().filter(|&b| t.dist(root, b) == t.dist(root, v) + t.dist(v, b)).collect()
}

fn all_partitions(t: &BoundedTree) -> impl Iterator<Item = QuasiEdge> + '_ {
    let n = t.boundary.len();
    // the last boundary vertex always sits in O'
    (1u64..(1 << (n - 1))).map(move |mask| {
        let o = (0..n - 1).filter(|i| mask >> i & 1 == 1).map(|i| t.boundary[i]).collect();
        QuasiEdge::new(t, o).unwrap()
    })
}

fn compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&x| f[x]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hull_and_constant_match_path_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = BoundedTree::with_leaves(random_branching_tree(&mut rng, 30)).unwrap();
        for _ in 0..10 {
            let o: Vec<usize> = t.boundary.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            let Ok(qe) = QuasiEdge::new(&t, o) else { continue };
            let h: BTreeSet<usize> = hull(&t, &qe.o).unwrap().into_iter().collect();
            prop_assert_eq!(&h, &hull_by_paths(&t, &qe.o));
            let meet = meet_by_paths(&t, &qe);
            prop_assert_eq!(hull_meet(&t, &qe).unwrap().into_iter().collect::<BTreeSet<_>>(), meet.clone());
            prop_assert_eq!(qe_constant(&t, &qe).unwrap(), diameter(&t, &meet));
            let truth = (0..t.tree.edges().len()).find(|&e| {
                let side = t.tree.side_of_edge(e);
                let s: BTreeSet<bool> = qe.o.iter().map(|&b| side[b]).collect();
                let s2: BTreeSet<bool> = qe.o_prime.iter().map(|&b| side[b]).collect();
                s.len() == 1 && s2.len() == 1 && s != s2
            });
            prop_assert_eq!(true_edge_partition(&t, &qe), truth);
        }
    }

    #[test]
    fn edge_partitions_have_constant_one(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = BoundedTree::with_leaves(random_branching_tree(&mut rng, 60)).unwrap();
        for e in 0..t.tree.edges().len() {
            let qe = t.edge_partition(e).unwrap();
            prop_assert_eq!(qe_constant(&t, &qe).unwrap(), 1);
            prop_assert_eq!(true_edge_partition(&t, &qe), Some(e));
        }
    }

    #[test]
    fn automorphisms_preserve_constants_and_compose(seed in any::<u64>(), k in 3usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = regular_ball(k, 3);
        let t = BoundedTree::with_leaves(tree.clone()).unwrap();
        let random_swap = |rng: &mut ChaCha8Rng| loop {
            let p = rng.gen_range(0..tree.len());
            let ns = tree.neighbors(p);
            if ns.len() < 3 {
                continue;
            }
            let (a, b) = (ns[rng.gen_range(0..ns.len())], ns[rng.gen_range(0..ns.len())]);
            if let Ok(f) = swap_subtrees(&tree, p, a, b) {
                return f;
            }
        };
        let (f, g) = (random_swap(&mut rng), random_swap(&mut rng));
        for _ in 0..8 {
            let o: Vec<usize> = t.boundary.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
            let Ok(qe) = QuasiEdge::new(&t, o) else { continue };
            let pf = pushforward(&t, &f, &qe).unwrap();
            prop_assert_eq!(qe_constant(&t, &pf).unwrap(), qe_constant(&t, &qe).unwrap());
            // automorphisms fix the boundary setwise, so the image is O's image
            let img: BTreeSet<usize> = qe.o.iter().map(|&x| f[x]).collect();
            prop_assert_eq!(pf.o.iter().copied().collect::<BTreeSet<_>>(), img);
            let two = pushforward(&t, &f, &pushforward(&t, &g, &qe).unwrap()).unwrap();
            prop_assert_eq!(two, pushforward(&t, &compose(&f, &g), &qe).unwrap());
        }
    }
}

#[test]
fn constant_examples() {
    let t = BoundedTree::with_leaves(regular_ball(3, 4)).unwrap();
    for &c in t.tree.neighbors(0) {
        let qe = QuasiEdge::new(&t, shadow(&t, 0, c)).unwrap();
        assert_eq!(qe_constant(&t, &qe).unwrap(), 1);
    }
    let kids = t.tree.neighbors(0).to_vec();
    let grand = *t.tree.neighbors(kids[2]).iter().filter(|&&x| x != 0).min().unwrap();
    let mut o = shadow(&t, 0, kids[0]);
    o.extend(shadow(&t, 0, grand));
    let qe = QuasiEdge::new(&t, o).unwrap();
    assert_eq!(qe_constant(&t, &qe).unwrap(), diameter(&t, &meet_by_paths(&t, &qe)));
    assert_eq!(qe_constant(&t, &qe).unwrap(), 3);
    assert_eq!(true_edge_partition(&t, &qe), None);

    for len in 1..=5 {
        let path = Tree::from_edges(len + 1, &(0..len).map(|i| (i, i + 1)).collect::<Vec<_>>());
        let t = BoundedTree::with_leaves(path).unwrap();
        let qe = QuasiEdge::new(&t, vec![0]).unwrap();
        assert_eq!(qe_constant(&t, &qe).unwrap(), if len == 1 { 1 } else { 0 }, "length {len}");
    }
    let single = BoundedTree::with_leaves(Tree::from_edges(2, &[(0, 1)])).unwrap();
    assert_eq!(true_edge_partition(&single, &QuasiEdge::new(&single, vec![0]).unwrap()), Some(0));
}

#[test]
fn converse_on_small_series_reduced_trees() {
    let mut checked = 0;
    for adj in series_reduced_trees(8) {
        let t = BoundedTree::with_leaves(tree_from_adj(&adj)).unwrap();
        for qe in all_partitions(&t) {
            if qe_constant(&t, &qe).unwrap() <= 1 && !hull_meet(&t, &qe).unwrap().is_empty() {
                assert!(true_edge_partition(&t, &qe).is_some(), "{adj:?} {qe:?}");
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn pushforward_examples() {
    let t = BoundedTree::with_leaves(regular_ball(3, 3)).unwrap();
    let id: Vec<usize> = (0..t.tree.len()).collect();
    let e = t.edge_partition(4).unwrap();
    let qe = QuasiEdge::new(&t, if e.o.len() < e.o_prime.len() { e.o } else { e.o_prime }).unwrap();
    assert_eq!(pushforward(&t, &id, &qe).unwrap(), qe);
    // every boundary point lands on one vertex, where O' outvotes O
    let collapse = vec![t.boundary[0]; t.tree.len()];
    assert!(pushforward(&t, &collapse, &qe).is_err());
    assert!(pushforward(&t, &id[1..], &qe).is_err());
}

/// A line with a hair at every vertex; the map shifts the spine by one and
/// clamps at the far end.
#[test]
fn clamped_shift_grows_constant_within_fitted_bound() {
    use quasitree::coarse::{additive_constant, Host, Radius, SampledMap};
    let n = 8;
    let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    edges.extend((0..n).map(|i| (i, n + i)));
    let tree = Tree::from_edges(2 * n, &edges);
    let t = BoundedTree::with_leaves(tree.clone()).unwrap();
    let f: Vec<usize> = (0..2 * n).map(|v| if v < n { (v + 1).min(n - 1) } else { n + (v - n + 1).min(n - 1) }).collect();
    let host = Host::tree(tree);
    let one = Radius::from_integer(1);
    let c = additive_constant(&host, &host, &SampledMap::total(f.clone()), one);
    assert_eq!(c, Radius::from_integer(3));
    for e in 0..t.tree.edges().len() {
        let qe = t.edge_partition(e).unwrap();
        if let Ok(pf) = pushforward(&t, &f, &qe) {
            let (before, after) = (qe_constant(&t, &qe).unwrap(), qe_constant(&t, &pf).unwrap());
            let bound = one * Radius::from_integer(i64::from(before)) + c * 2;
            assert!(Radius::from_integer(i64::from(after)) <= bound, "edge {e}: {before} -> {after}");
        }
    }
}

#[test]
fn nerve_of_edge_partitions_is_the_line_graph() {
    let t = BoundedTree::with_leaves(regular_ball(3, 3)).unwrap();
    let seeds = edge_partitions(&t);
    let id: Vec<usize> = (0..t.tree.len()).collect();
    let y = orbit_nerve_graph(&t, &seeds, &[id.clone()], 1, 1, &default_k_grid()).unwrap();
    assert_eq!(y.nodes.len(), t.tree.edges().len());
    assert!(y.connected);
    let edge_of: Vec<usize> = y.nodes.iter().map(|q| true_edge_partition(&t, q).unwrap()).collect();
    let edges = t.tree.edges();
    for i in 0..y.nodes.len() {
        for j in 0..y.nodes.len() {
            if i == j {
                continue;
            }
            let (a, b) = (edges[edge_of[i]], edges[edge_of[j]]);
            let share = a.0 == b.0 || a.0 == b.1 || a.1 == b.0 || a.1 == b.1;
            assert_eq!(y.adj[i].contains(&j), share);
        }
    }
    let one = orbit_nerve_graph(&t, &seeds[..1], &[id], 3, 1, &default_k_grid()).unwrap();
    assert_eq!(one.nodes.len(), 1);
}

#[test]
fn swap_orbit_on_depth_five_ball_is_connected() {
    let tree = regular_ball(3, 5);
    let t = BoundedTree::with_leaves(tree.clone()).unwrap();
    let kids = tree.neighbors(0).to_vec();
    let gens = vec![swap_subtrees(&tree, 0, kids[0], kids[1]).unwrap(), swap_subtrees(&tree, 0, kids[1], kids[2]).unwrap()];
    let seed = t.edge_partition(0).unwrap();
    let y = orbit_nerve_graph(&t, &[seed], &gens, 4, 2, &default_k_grid()).unwrap();
    assert!(y.connected);
    assert_eq!(y.degenerate, 0);
    assert_eq!(y.nodes.len(), 3);
}

#[test]
fn retree_outputs_trees() {
    let t = BoundedTree::with_leaves(regular_ball(3, 2)).unwrap();
    let id: Vec<usize> = (0..t.tree.len()).collect();
    let y = orbit_nerve_graph(&t, &edge_partitions(&t), &[id], 1, 1, &default_k_grid()).unwrap();
    let rep = retree(&t, &y, &RetreeParams::default()).unwrap();
    assert_eq!(rep.h1, 0);
    assert!(rep.tree.is_tree());
    assert!(rep.tree.len() >= 2);
    assert_eq!(rep.tree.len(), rep.node_points.len());
    assert!(rep.fit.is_some());
    // filling only short cycles leaves the trivalent star's triangles, which are enough here
    let short = RetreeParams { fill: 3, ..RetreeParams::default() };
    assert!(retree(&t, &y, &short).unwrap().tree.is_tree());
}
