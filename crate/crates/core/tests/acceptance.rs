//! Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on
//! any failure.

mod common;

use common::*;
use num_bigint::BigInt;
use num_traits::Zero;
use quasitree::bassserre::{classify_trichotomy, expand_ball, oracle_classify_by_expansion, OracleVerdict, Trichotomy};
use quasitree::coarse::{deep_component_count, Host, LatticeMetric, Radius};
use quasitree::crossing::{crossing_graph_summary, lattice_oracle_crossing_graph, CrossingSummary, OracleParams};
use quasitree::fixtures;
use quasitree::formats::{parse_cx2, parse_gog};
use quasitree::gog::{injection_index, GraphOfGroups, Index, InjectionSpec};
use quasitree::linalg::{q, IntMatrix, QMatrix, Q};
use quasitree::patterns::*;
use quasitree::quasiedges::*;
use quasitree::rafts::{check_raft_hypotheses, check_star_condition, HypothesisFailure, SpanMode};
use quasitree::tracks::*;
use quasitree::tree::Tree;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture_gog(name: &str) -> GraphOfGroups {
    parse_gog(fixtures::get(name).unwrap().text).unwrap()
}

fn abstract_gog(vertices: &[(&str, u32)], edges: &[(&str, &str, u64, u64)]) -> GraphOfGroups {
    let mut text = String::from("gog v1 abstract\n");
    for (v, d) in vertices {
        text += &format!("vertex {v} dim={d}\n");
    }
    for (k, (a, b, i, j)) in edges.iter().enumerate() {
        text += &format!("edge e{k} ends={a},{b} dim=0 idx={i},{j}\n");
    }
    parse_gog(&text).unwrap()
}

fn trichotomy_suite() -> Vec<(String, GraphOfGroups, Trichotomy)> {
    use Trichotomy::*;
    let mut out: Vec<(String, GraphOfGroups, Trichotomy)> = [
        ("point", Bounded),
        ("collapsible_chain", Bushy),
        ("dihedral_arc", LineLike),
        ("mapping_torus_circle", LineLike),
        ("z2_line_raft", LineLike),
        ("baumslag_solitar_12", Bushy),
        ("theta_bushy", Bushy),
        ("z3_z3", Bushy),
        ("zp_zp", Bushy),
    ]
    .into_iter()
    .map(|(n, t)| (n.to_string(), fixture_gog(n), t))
    .collect();
    fn v(n: &str) -> (&str, u32) {
        (n, 0)
    }
    let built = [
        ("z5_z5", abstract_gog(&[v("a"), v("b")], &[("a", "b", 5, 5)]), Bushy),
        ("z2_z3", abstract_gog(&[v("a"), v("b")], &[("a", "b", 2, 3)]), Bushy),
        ("bounded_chain", abstract_gog(&[v("a"), v("b"), v("c")], &[("a", "b", 1, 2), ("b", "c", 3, 1)]), Bounded),
        ("collapsed_pair", abstract_gog(&[v("a"), v("b")], &[("a", "b", 1, 4)]), Bounded),
        ("arc_with_tail", abstract_gog(&[v("a"), v("b"), v("c")], &[("a", "b", 2, 1), ("b", "c", 1, 2)]), LineLike),
        ("circle_of_two", abstract_gog(&[v("a"), v("b")], &[("a", "b", 1, 1), ("b", "a", 1, 1)]), LineLike),
        ("circle_of_three", abstract_gog(&[v("a"), v("b"), v("c")], &[("a", "b", 1, 1), ("b", "c", 1, 1), ("c", "a", 1, 1)]), LineLike),
        ("loop_index_two", abstract_gog(&[v("a")], &[("a", "a", 1, 2)]), Bushy),
        ("loop_pair", abstract_gog(&[v("a")], &[("a", "a", 1, 1), ("a", "a", 1, 1)]), Bushy),
        ("tripod_arc", abstract_gog(&[v("a"), v("b"), v("c")], &[("a", "b", 2, 1), ("b", "c", 1, 3)]), Bushy),
    ];
    out.extend(built.into_iter().map(|(n, g, t)| (n.to_string(), g, t)));
    out
}

fn c1_trichotomy() -> Outcome {
    let suite = trichotomy_suite();
    ensure(suite.len() >= 15, || format!("suite has {} graphs", suite.len()))?;
    let mut seen = BTreeSet::new();
    for (name, g, want) in &suite {
        let got = classify_trichotomy(g).map_err(|e| format!("{name}: {e}"))?;
        let oracle = oracle_classify_by_expansion(g, 8).map_err(|e| format!("{name}: {e}"))?;
        ensure(oracle == OracleVerdict::Classified(got) && got == *want, || {
            format!("{name}: classify={got} oracle={oracle} label={want}")
        })?;
        seen.insert(got.to_string());
    }
    ensure(seen.len() == 3, || format!("classes covered: {seen:?}"))?;
    Ok(format!("{} graphs", suite.len()))
}

fn c2_index() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut done = 0;
    while done < 50 {
        let n = rng.gen_range(1..=3);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-10..=10)).collect()).collect();
        if det_cofactor(&rows) == 0 {
            continue;
        }
        let m = IntMatrix::from_rows(&rows).unwrap();
        let idx = injection_index(&InjectionSpec::Matrix(m), n, n).map_err(|e| e.to_string())?;
        let want = coset_count(&rows) as u64;
        ensure(idx == Index::Finite(want), || format!("{rows:?}: index {idx}, cosets {want}"))?;
        done += 1;
    }
    Ok("50 matrices".into())
}

fn c3_valence() -> Outcome {
    for p in [3u64, 5] {
        let g = abstract_gog(&[("a", 0), ("b", 0)], &[("a", "b", p, p)]);
        for d in 0..=5u32 {
            let want = 1 + p * ((p - 1).pow(d) - 1) / (p - 2);
            let got = expand_ball(&g, "a", d as usize).map_err(|e| e.to_string())?.len() as u64;
            ensure(got == want, || format!("p={p} d={d}: {got} vs {want}"))?;
        }
    }
    Ok("p in {3,5}, d <= 5".into())
}

fn c4_deep_components() -> Outcome {
    let r = 40;
    for metric in [LatticeMetric::Sup, LatticeMetric::EuclideanRounded] {
        let h2 = Host::lattice(2, r, metric);
        let axis: Vec<usize> = (-r..=r).map(|x| h2.index_of(&[x, 0]).unwrap()).collect();
        let h3 = Host::lattice(3, r, metric);
        let mut plane = Vec::new();
        let mut line = Vec::new();
        for x in -r..=r {
            line.push(h3.index_of(&[x, 0, 0]).unwrap());
            for y in -r..=r {
                plane.push(h3.index_of(&[x, y, 0]).unwrap());
            }
        }
        for a in 0..=5 {
            let (a, depth) = (Radius::from_integer(a), Radius::from_integer(10));
            for (what, host, s, want) in [("axis", &h2, &axis, 2), ("plane", &h3, &plane, 2), ("line", &h3, &line, 1)] {
                let got = deep_component_count(host, s, a, depth).deep;
                ensure(got == want, || format!("{what} {metric:?} A={a}: {got} deep components"))?;
            }
        }
    }
    Ok("r=40, A<=5, depth 10, both metrics".into())
}

fn c5_quasi_edges() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..50 {
        let tree = random_branching_tree(&mut rng, 200);
        ensure(tree.len() <= 200 && (0..tree.len()).all(|v| tree.degree(v) <= 4), || format!("tree {i} out of range"))?;
        let t = BoundedTree::with_leaves(tree).map_err(|e| e.to_string())?;
        for e in 0..t.tree.edges().len() {
            let qe = t.edge_partition(e).ok_or("no edge partition")?;
            let c = qe_constant(&t, &qe).map_err(|e| e.to_string())?;
            ensure(c == 1, || format!("tree {i} edge {e}: constant {c}"))?;
        }
    }
    let trees = series_reduced_trees(12);
    let mut checked = 0u64;
    for adj in &trees {
        let t = BoundedTree::with_leaves(tree_from_adj(adj)).map_err(|e| e.to_string())?;
        let n = t.boundary.len();
        for mask in 1u64..(1 << (n - 1)) {
            let o = (0..n - 1).filter(|i| mask >> i & 1 == 1).map(|i| t.boundary[i]).collect();
            let qe = QuasiEdge::new(&t, o).map_err(|e| e.to_string())?;
            if qe_constant(&t, &qe).map_err(|e| e.to_string())? == 1 {
                ensure(true_edge_partition(&t, &qe).is_some(), || format!("{adj:?}: {qe:?}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("50 random trees; converse on {} trees, {checked} constant-1 partitions", trees.len()))
}

fn is_automorphism(t: &Tree, f: &[usize]) -> bool {
    let edges: BTreeSet<(usize, usize)> = t.edges().iter().copied().collect();
    f.iter().collect::<BTreeSet<_>>().len() == t.len()
        && t.edges().iter().all(|&(a, b)| edges.contains(&(f[a].min(f[b]), f[a].max(f[b]))))
}

fn c6_pushforward() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut fixtures = Vec::new();
    for (k, depth) in [(3, 2), (3, 3), (3, 4), (4, 2), (4, 3)] {
        let tree = regular_ball(k, depth);
        let mut pivots: Vec<usize> = (0..tree.len()).filter(|&p| tree.degree(p) >= 3).collect();
        pivots.truncate(4);
        for p in pivots {
            let ns = tree.neighbors(p).to_vec();
            let f = swap_subtrees(&tree, p, ns[ns.len() - 2], ns[ns.len() - 1]).map_err(|e| e.to_string())?;
            fixtures.push((tree.clone(), f));
        }
    }
    ensure(fixtures.len() == 20, || format!("{} fixtures", fixtures.len()))?;
    let mut compared = 0;
    for (i, (tree, f)) in fixtures.iter().enumerate() {
        ensure(is_automorphism(tree, f), || format!("fixture {i} is not an automorphism"))?;
        let t = BoundedTree::with_leaves(tree.clone()).map_err(|e| e.to_string())?;
        let mut qes = edge_partitions(&t);
        while qes.len() < t.tree.edges().len() + 40 {
            let o: Vec<usize> = t.boundary.iter().copied().filter(|_| rng.gen_bool(0.4)).collect();
            if let Ok(qe) = QuasiEdge::new(&t, o) {
                qes.push(qe);
            }
        }
        for qe in &qes {
            let pf = pushforward(&t, f, qe).map_err(|e| e.to_string())?;
            let (a, b) = (qe_constant(&t, qe).map_err(|e| e.to_string())?, qe_constant(&t, &pf).map_err(|e| e.to_string())?);
            ensure(a == b, || format!("fixture {i}: {a} -> {b}"))?;
            compared += 1;
        }
    }
    Ok(format!("20 fixtures, {compared} quasi-edges"))
}

fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

fn random_invertible(rng: &mut impl Rng, n: usize) -> QMatrix {
    loop {
        let rows = (0..n).map(|_| (0..n).map(|_| frac(rng.gen_range(-6..=6), rng.gen_range(1..=5))).collect()).collect();
        let f = QMatrix::from_rows(rows, n);
        if !f.det().is_zero() {
            return f;
        }
    }
}

fn image(f: &QMatrix, p: &SubspacePattern) -> SubspacePattern {
    let mut out = SubspacePattern::new(p.n);
    for (id, b) in &p.subs {
        let cols = b
            .iter()
            .map(|c| (0..p.n).map(|i| (0..p.n).fold(Q::zero(), |s, j| s + f.get(i, j) * &c[j])).collect())
            .collect();
        out.push(id.clone(), cols);
    }
    out
}

fn maps_onto(f: &QMatrix, p: &SubspacePattern, target: &SubspacePattern) -> bool {
    let img = image(f, p);
    !f.det().is_zero()
        && img.subs.len() == target.subs.len()
        && img.subs.iter().zip(&target.subs).all(|((_, a), (_, b))| {
            let both: Vec<Vec<Q>> = a.iter().chain(b.iter()).cloned().collect();
            let r = QMatrix::from_columns(p.n, &both).rank();
            r == a.len() && r == b.len()
        })
}

fn four_lines(ls: &[[Q; 2]; 4]) -> SubspacePattern {
    let mut p = SubspacePattern::new(2);
    for (i, l) in ls.iter().enumerate() {
        p.push(format!("L{i}"), vec![l.to_vec()]);
    }
    p
}

fn c7_cross_ratio() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut maps = 0;
    while maps < 100 {
        let ls: [[Q; 2]; 4] = std::array::from_fn(|_| [q(rng.gen_range(-5..=5)), q(rng.gen_range(-5..=5))]);
        let Ok(c) = cross_ratio(&ls) else { continue };
        let f = random_invertible(&mut rng, 2);
        let moved = lines_of(&image(&f, &four_lines(&ls))).ok_or("image is not four lines")?;
        let d = cross_ratio(&moved).map_err(|e| e.to_string())?;
        ensure(c == d, || format!("{c} -> {d}"))?;
        maps += 1;
    }
    let slopes = [[q(1), q(0)], [q(0), q(1)], [q(1), q(1)], [q(1), q(2)], [q(1), q(3)], [q(1), q(-1)]];
    let mut quads = Vec::new();
    for a in 0..6 {
        for b in 0..6 {
            for c in 0..6 {
                for d in 0..6 {
                    if [a, b, c, d].iter().collect::<BTreeSet<_>>().len() == 4 {
                        let ls = [slopes[a].clone(), slopes[b].clone(), slopes[c].clone(), slopes[d].clone()];
                        let cr = cross_ratio(&ls).map_err(|e| e.to_string())?;
                        quads.push((four_lines(&ls), cr));
                    }
                }
            }
        }
    }
    let mut pairs = 0;
    for (p, cp) in &quads {
        for (t, ct) in &quads {
            let rep = decide_projective_equivalence(p, t, 0, DEFAULT_TRIALS).map_err(|e| e.to_string())?;
            let yes = match &rep.verdict {
                Equivalence::Yes(w) => {
                    ensure(maps_onto(w, p, t), || "witness fails".into())?;
                    true
                }
                _ => false,
            };
            ensure(yes == (cp == ct) && rep.label() != "PROBABLY-NO", || {
                format!("{:?} vs {:?}: {}", p.subs, t.subs, rep.label())
            })?;
            pairs += 1;
        }
    }
    Ok(format!("100 maps; {} quadruples, {pairs} ordered pairs", quads.len()))
}

fn random_pattern(rng: &mut impl Rng, n: usize, k: usize) -> SubspacePattern {
    let mut p = SubspacePattern::new(n);
    while p.len() < k {
        let d = rng.gen_range(1..n);
        let cols: Vec<Vec<Q>> = (0..d).map(|_| (0..n).map(|_| q(rng.gen_range(-4..=4))).collect()).collect();
        if QMatrix::from_columns(n, &cols).rank() == d {
            p.push(format!("W{}", p.len()), cols);
        }
    }
    p
}

fn c8_witnesses() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..30 {
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(1..=5);
        let p = random_pattern(&mut rng, n, k);
        let f = random_invertible(&mut rng, n);
        let target = image(&f, &p);
        let rep = decide_projective_equivalence(&p, &target, i, DEFAULT_TRIALS).map_err(|e| e.to_string())?;
        match &rep.verdict {
            Equivalence::Yes(w) => ensure(maps_onto(w, &p, &target), || format!("pattern {i}: witness fails"))?,
            other => return Err(format!("pattern {i} (n={n}, K={k}): {other:?}")),
        }
        if n >= 3 {
            // same pattern with one subspace swapped for one of another dimension
            let mut other = SubspacePattern::new(n);
            for (j, (id, b)) in target.subs.iter().enumerate() {
                if j == 0 {
                    let d = if b.len() == 1 { 2 } else { 1 };
                    let cols: Vec<Vec<Q>> = (0..d).map(|c| (0..n).map(|r| q(i64::from(r == c))).collect()).collect();
                    other.push(id.clone(), cols);
                } else {
                    other.push(id.clone(), b.clone());
                }
            }
            let rep = decide_projective_equivalence(&p, &other, i, DEFAULT_TRIALS).map_err(|e| e.to_string())?;
            ensure(rep.label() == "NO", || format!("pattern {i}: dimension mismatch gave {}", rep.label()))?;
        }
    }
    Ok("30 patterns".into())
}

fn c9_tracks() -> Outcome {
    let disks = disk_suite();
    ensure(disks.len() >= 20, || format!("{} disks", disks.len()))?;
    let mut tracks_seen = 0;
    for (name, c) in &disks {
        ensure(h1_rank(c) == 0 && c.triangles.len() <= 60, || format!("{name} is not a small disk"))?;
        for t in enumerate_tracks(c, 6, DEFAULT_ENUM_BUDGET).map_err(|e| format!("{name}: {e}"))? {
            let k = complement_components(c, &t).map_err(|e| e.to_string())?.count;
            ensure(k == 2, || format!("{name}: track with {k} complement components"))?;
            tracks_seen += 1;
        }
        let fam = maximal_essential_family(c, 1, 6, DEFAULT_ENUM_BUDGET).map_err(|e| format!("{name}: {e}"))?;
        let d = dual_graph(c, &fam.pattern(c)).map_err(|e| e.to_string())?;
        ensure(d.is_tree() && d.flagged.is_empty(), || format!("{name}: dual graph is not a tree"))?;
    }
    let annulus = parse_cx2(fixtures::get("annulus").unwrap().text).unwrap();
    let flagged = enumerate_tracks(&annulus, 6, DEFAULT_ENUM_BUDGET)
        .map_err(|e| e.to_string())?
        .iter()
        .filter(|t| matches!(is_essential(&annulus, t, 1), Ok(Essentiality::NonSeparating { .. })))
        .count();
    ensure(flagged > 0, || "no annulus track flagged NonSeparating".into())?;
    Ok(format!("{} disks, {tracks_seen} tracks; {flagged} annulus tracks NonSeparating", disks.len()))
}

fn c10_retree() -> Outcome {
    let t = BoundedTree::with_leaves(regular_ball(3, 4)).map_err(|e| e.to_string())?;
    let id: Vec<usize> = (0..t.tree.len()).collect();
    let y = orbit_nerve_graph(&t, &edge_partitions(&t), &[id], 1, 1, &default_k_grid()).map_err(|e| e.to_string())?;
    ensure(y.nodes.len() == t.tree.edges().len() && y.connected, || "nerve is not the edge-adjacency graph".into())?;
    let rep = retree(&t, &y, &RetreeParams::default()).map_err(|e| e.to_string())?;
    ensure(rep.tree.is_tree(), || "output is not a tree".into())?;
    let fit = rep.fit.ok_or("no fit")?;
    ensure(fit.k <= Radius::from_integer(3) && fit.c <= Radius::from_integer(4), || format!("K={} C={}", fit.k, fit.c))?;
    Ok(format!("{} nodes, K={} C={}", rep.tree.len(), fit.k, fit.c))
}

fn c11_hypotheses() -> Outcome {
    // (fixture, star verdict or None when not abelian, failure codes)
    let labels: [(&str, Option<bool>, &[&str]); 12] = [
        ("baumslag_solitar_12", Some(false), &["NOT-REDUCED"]),
        ("collapsible_chain", None, &["NOT-REDUCED"]),
        ("dihedral_arc", None, &["NO-LINE-RAFTS"]),
        ("mapping_torus_circle", Some(false), &["NO-LINE-RAFTS"]),
        ("theta_bushy", None, &[]),
        ("z2_line_raft", Some(false), &["NO-LINE-RAFTS"]),
        ("z2_x_axis", Some(false), &["CROSSING-DISCONNECTED"]),
        ("z3_lines_only", Some(true), &[]),
        ("z3_plane_and_crosser", Some(true), &[]),
        ("z3_single_plane", Some(false), &["CROSSING-DISCONNECTED"]),
        ("z3_three_planes", Some(true), &[]),
        ("z3_two_planes", Some(true), &[]),
    ];
    for (name, star, codes) in labels {
        let g = fixture_gog(name);
        let got = check_star_condition(&g, SpanMode::Rational).ok().map(|r| r.passes);
        ensure(got == star, || format!("{name}: star {got:?}, labeled {star:?}"))?;
        let rep = check_raft_hypotheses(&g, None).map_err(|e| format!("{name}: {e}"))?;
        let got: Vec<&str> = rep.failures.iter().map(HypothesisFailure::code).collect();
        ensure(got == codes, || format!("{name}: hypotheses {got:?}, labeled {codes:?}"))?;
    }
    Ok(format!("{} fixtures", labels.len()))
}

fn c12_crossing() -> Outcome {
    let suite = [
        "z2_line_raft",
        "z2_two_axes",
        "z2_x_axis",
        "z3_lines_only",
        "z3_plane_and_crosser",
        "z3_plane_and_inner_line",
        "z3_single_plane",
        "z3_skew_planes",
        "z3_three_planes",
        "z3_two_planes",
    ];
    let params = OracleParams { radius: 30, ..OracleParams::default() };
    let mut conclusive = 0;
    for name in suite {
        let g = fixture_gog(name);
        let Ok(s) = crossing_graph_summary(&g, "v") else { continue };
        let Ok(o) = lattice_oracle_crossing_graph(&g, "v", &params) else { continue };
        let want = match s {
            CrossingSummary::Empty => None,
            CrossingSummary::Connected(_) => Some(true),
            CrossingSummary::Disconnected(_) => Some(false),
        };
        ensure(o.connected == want, || format!("{name}: summary {} oracle {:?}", s.label(), o.connected))?;
        conclusive += 1;
    }
    ensure(conclusive == suite.len(), || format!("only {conclusive} of {} runs conclusive", suite.len()))?;
    Ok(format!("{conclusive} fixtures at r=30"))
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 12] = [
        ("trichotomy agrees with expansion oracle", c1_trichotomy, Some(secs(10))),
        ("injection index equals coset count", c2_index, Some(secs(30))),
        ("amalgam ball valence law", c3_valence, None),
        ("deep components of coordinate subspaces", c4_deep_components, Some(secs(60))),
        ("edge partitions are exactly the constant-1 quasi-edges", c5_quasi_edges, None),
        ("automorphisms preserve quasi-edge constants", c6_pushforward, None),
        ("cross-ratio invariance and four-line equivalence", c7_cross_ratio, Some(secs(30))),
        ("equivalence witnesses verify", c8_witnesses, None),
        ("tracks on disks and the annulus", c9_tracks, Some(secs(120))),
        ("retree of the trivalent depth-4 ball", c10_retree, Some(secs(120))),
        ("star condition and raft hypotheses", c11_hypotheses, None),
        ("crossing summary agrees with lattice oracle", c12_crossing, None),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("took {took:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({took:.2?})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
