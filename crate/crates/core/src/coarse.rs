//! Coarse geometry on finite hosts.
//!
//! Hosts are either a labelled tree with its path metric or a lattice box
//! `Z^n ∩ [-r, r]^n`. Every quantity is computed exactly on the host;
//! asymptotic statements become reports and profiles.
//!
//! Distances are compared through [`Host::raw`], an order-preserving
//! integer key (the squared distance for the Euclidean metric, the
//! distance itself otherwise). Reported values are rationals; Euclidean
//! values are rounded down to a multiple of 1/1000 unless exact.

use crate::error::{Error, Result};
use crate::tree::{Distances, Tree};
use num_integer::Roots;
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

pub type Radius = Rational64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LatticeMetric {
    EuclideanRounded,
    Sup,
}

impl fmt::Display for LatticeMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeMetric::EuclideanRounded => "euclidean",
            LatticeMetric::Sup => "sup",
        })
    }
}

#[derive(Clone, Debug)]
pub enum Host {
    Tree { tree: Tree, dist: Distances },
    Lattice { n: usize, r: i64, metric: LatticeMetric },
}

impl Host {
    pub fn tree(tree: Tree) -> Host {
        let dist = tree.distances();
        Host::Tree { tree, dist }
    }

    pub fn ball(ball: &crate::bassserre::TreeBall) -> Host {
        Host::tree(ball.tree())
    }

    pub fn lattice(n: usize, r: i64, metric: LatticeMetric) -> Host {
        Host::Lattice { n, r, metric }
    }

    pub fn len(&self) -> usize {
        match self {
            Host::Tree { tree, .. } => tree.len(),
            Host::Lattice { n, r, .. } => ((2 * r + 1) as usize).pow(*n as u32),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }

    /// Coordinates of a lattice point.
    pub fn coords(&self, p: usize) -> Vec<i64> {
        match self {
            Host::Tree { .. } => vec![p as i64],
            Host::Lattice { n, r, .. } => {
                let side = (2 * r + 1) as usize;
                let mut p = p;
                let mut c = vec![0; *n];
                for x in c.iter_mut() {
                    *x = (p % side) as i64 - r;
                    p /= side;
                }
                c
            }
        }
    }

    /// Index of a lattice point, if inside the box.
    pub fn index_of(&self, c: &[i64]) -> Option<usize> {
        match self {
            Host::Tree { tree, .. } => {
                let p = usize::try_from(*c.first()?).ok()?;
                (c.len() == 1 && p < tree.len()).then_some(p)
            }
            Host::Lattice { n, r, .. } => {
                if c.len() != *n || c.iter().any(|x| x.abs() > *r) {
                    return None;
                }
                let side = (2 * r + 1) as usize;
                let mut p = 0usize;
                for x in c.iter().rev() {
                    p = p * side + (x + r) as usize;
                }
                Some(p)
            }
        }
    }

    /// Order-preserving integer key of `d(a, b)`.
    pub fn raw(&self, a: usize, b: usize) -> u64 {
        match self {
            Host::Tree { dist, .. } => u64::from(dist.get(a, b)),
            Host::Lattice { metric, .. } => {
                let (ca, cb) = (self.coords(a), self.coords(b));
                match metric {
                    LatticeMetric::Sup => ca.iter().zip(&cb).map(|(x, y)| (x - y).unsigned_abs()).max().unwrap_or(0),
                    LatticeMetric::EuclideanRounded => {
                        ca.iter().zip(&cb).map(|(x, y)| ((x - y) * (x - y)) as u64).sum()
                    }
                }
            }
        }
    }

    fn is_squared(&self) -> bool {
        matches!(self, Host::Lattice { metric: LatticeMetric::EuclideanRounded, .. })
    }

    /// Converts a raw key to a reported distance.
    pub fn raw_to_radius(&self, raw: u64) -> Radius {
        if !self.is_squared() {
            return Radius::from_integer(raw as i64);
        }
        let s = raw.sqrt();
        if s * s == raw {
            return Radius::from_integer(s as i64);
        }
        let scaled = (u128::from(raw) * 1_000_000).sqrt();
        Radius::new(scaled as i64, 1000)
    }

    /// Largest raw key `k` with `dist <= radius`.
    pub fn radius_to_raw(&self, radius: Radius) -> Option<u64> {
        if radius < Radius::zero() {
            return None;
        }
        let fl = radius.floor().to_integer() as u64;
        if !self.is_squared() {
            return Some(fl);
        }
        // d^2 <= (p/q)^2  <=>  d^2 * q^2 <= p^2
        let (p, q) = (*radius.numer() as u128, *radius.denom() as u128);
        Some(((p * p) / (q * q)) as u64)
    }

    pub fn dist(&self, a: usize, b: usize) -> Radius {
        self.raw_to_radius(self.raw(a, b))
    }

    pub fn within(&self, a: usize, b: usize, radius: Radius) -> bool {
        self.radius_to_raw(radius).is_some_and(|k| self.raw(a, b) <= k)
    }

    /// Unit-step neighbours (tree edges or axis moves).
    pub fn unit_neighbors(&self, p: usize) -> Vec<usize> {
        match self {
            Host::Tree { tree, .. } => tree.neighbors(p).to_vec(),
            Host::Lattice { n, .. } => {
                let c = self.coords(p);
                let mut out = Vec::with_capacity(2 * n);
                for i in 0..*n {
                    for s in [-1, 1] {
                        let mut d = c.clone();
                        d[i] += s;
                        if let Some(q) = self.index_of(&d) {
                            out.push(q);
                        }
                    }
                }
                out
            }
        }
    }
}

fn sorted(v: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let s: BTreeSet<usize> = v.into_iter().collect();
    s.into_iter().collect()
}

/// Minimal `R` with `A ⊆ N_R(B)`.
pub fn containment_radius(host: &Host, a: &[usize], b: &[usize]) -> Result<Radius> {
    Ok(host.raw_to_radius(containment_raw(host, a, b)?))
}

fn containment_raw(host: &Host, a: &[usize], b: &[usize]) -> Result<u64> {
    if b.is_empty() {
        return Err(Error::EmptySet("containment target"));
    }
    Ok(a.iter()
        .map(|&x| b.iter().map(|&y| host.raw(x, y)).min().unwrap_or(0))
        .max()
        .unwrap_or(0))
}

/// Hausdorff distance: the larger of the two containment radii.
pub fn equiv_radius(host: &Host, a: &[usize], b: &[usize]) -> Result<Radius> {
    if a.is_empty() {
        return Err(Error::EmptySet("equivalence source"));
    }
    let r = containment_raw(host, a, b)?.max(containment_raw(host, b, a)?);
    Ok(host.raw_to_radius(r))
}

/// `N_R(A)` as a sorted point list.
pub fn neighborhood(host: &Host, a: &[usize], radius: Radius) -> Vec<usize> {
    let Some(k) = host.radius_to_raw(radius) else { return Vec::new() };
    (0..host.len()).filter(|&x| a.iter().any(|&y| host.raw(x, y) <= k)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionRow {
    pub radius: Radius,
    pub size: usize,
    /// Hausdorff distance from `N_R(A) ∩ N_R(B)` to the candidate; `None`
    /// when the intersection is empty.
    pub to_candidate: Option<Radius>,
    /// Worst value over this and all larger listed radii.
    pub tail_max: Option<Radius>,
}

pub fn coarse_intersection_profile(
    host: &Host,
    a: &[usize],
    b: &[usize],
    radii: &[Radius],
    candidate: &[usize],
) -> Result<Vec<IntersectionRow>> {
    let mut rs = radii.to_vec();
    rs.sort();
    let mut rows = Vec::new();
    for r in rs {
        let na = neighborhood(host, a, r);
        let nb: BTreeSet<usize> = neighborhood(host, b, r).into_iter().collect();
        let inter: Vec<usize> = na.into_iter().filter(|x| nb.contains(x)).collect();
        let to_candidate =
            if inter.is_empty() || candidate.is_empty() { None } else { Some(equiv_radius(host, &inter, candidate)?) };
        rows.push(IntersectionRow { radius: r, size: inter.len(), to_candidate, tail_max: None });
    }
    let mut acc: Option<Option<Radius>> = None;
    for row in rows.iter_mut().rev() {
        let next = match (acc, row.to_candidate) {
            (None, v) => v,
            (Some(None), _) | (Some(_), None) => None,
            (Some(Some(m)), Some(v)) => Some(m.max(v)),
        };
        row.tail_max = next;
        acc = Some(next);
    }
    Ok(rows)
}

/// A map sampled on finitely many points: `image[i]` is the image of `domain[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledMap {
    pub domain: Vec<usize>,
    pub image: Vec<usize>,
}

impl SampledMap {
    pub fn new(domain: Vec<usize>, image: Vec<usize>) -> Self {
        assert_eq!(domain.len(), image.len());
        SampledMap { domain, image }
    }

    pub fn total(images: Vec<usize>) -> Self {
        SampledMap { domain: (0..images.len()).collect(), image: images }
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.domain.iter().position(|&d| d == x).map(|i| self.image[i])
    }
}

/// Quasi-isometry constants with sampled distortion envelopes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QiFit {
    pub k: Radius,
    pub c: Radius,
    /// `(d, g(d))`: least image distance among pairs at distance `>= d`.
    pub lower: Vec<(Radius, Radius)>,
    /// `(d, h(d))`: greatest image distance among pairs at distance `<= d`.
    pub upper: Vec<(Radius, Radius)>,
}

/// Distance pairs `(d(x, y), d(fx, fy))` over unordered sample pairs.
pub fn distance_pairs(src: &Host, dst: &Host, f: &SampledMap) -> Vec<(Radius, Radius)> {
    let n = f.domain.len();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((src.dist(f.domain[i], f.domain[j]), dst.dist(f.image[i], f.image[j])));
        }
    }
    pairs
}

fn constant_for(pairs: &[(Radius, Radius)], k: Radius) -> Radius {
    pairs.iter().fold(Radius::zero(), |c, &(d, fd)| c.max(fd - k * d).max(d / k - fd))
}

/// `C(K)` for one multiplicative constant.
pub fn additive_constant(src: &Host, dst: &Host, f: &SampledMap, k: Radius) -> Radius {
    constant_for(&distance_pairs(src, dst, f), k)
}

/// Picks `K` from the grid minimising `C(K)`, then `K`.
pub fn fit_qi_constants(src: &Host, dst: &Host, f: &SampledMap, k_grid: &[Radius]) -> Result<QiFit> {
    if f.domain.len() < 2 {
        return Err(Error::Invalid("quasi-isometry fit needs at least two sample points".into()));
    }
    fit_from_pairs(&distance_pairs(src, dst, f), k_grid)
}

/// Fit from precomputed distance pairs; the sample must have two points.
pub fn fit_from_pairs(pairs: &[(Radius, Radius)], k_grid: &[Radius]) -> Result<QiFit> {
    if pairs.is_empty() {
        return Err(Error::Invalid("quasi-isometry fit needs at least two sample points".into()));
    }
    if k_grid.is_empty() || k_grid.iter().any(|k| *k < Radius::from_integer(1)) {
        return Err(Error::Invalid("K grid must be nonempty with K >= 1".into()));
    }
    let mut best: Option<(Radius, Radius)> = None;
    for &k in k_grid {
        let c = constant_for(pairs, k);
        best = match best {
            Some((bk, bc)) if (bc, bk) <= (c, k) => Some((bk, bc)),
            _ => Some((k, c)),
        };
    }
    let (k, c) = best.expect("nonempty grid");
    let ds: BTreeSet<Radius> = pairs.iter().map(|p| p.0).collect();
    let lower = ds
        .iter()
        .map(|&d| (d, pairs.iter().filter(|p| p.0 >= d).map(|p| p.1).min().unwrap_or(d)))
        .collect();
    let upper = ds
        .iter()
        .map(|&d| (d, pairs.iter().filter(|p| p.0 <= d).map(|p| p.1).max().unwrap_or(d)))
        .collect();
    Ok(QiFit { k, c, lower, upper })
}

/// Nearest-point coarse inverse of `f` on `target`, ties to the smallest
/// domain point. Returns the inverse and the achieved constant `C'`.
pub fn coarse_inverse(
    src: &Host,
    dst: &Host,
    f: &SampledMap,
    target: &[usize],
    c: Radius,
) -> Result<(SampledMap, Radius)> {
    if f.domain.is_empty() {
        return Err(Error::EmptySet("map domain"));
    }
    let mut order: Vec<usize> = (0..f.domain.len()).collect();
    order.sort_by_key(|&i| f.domain[i]);
    let mut g_img = Vec::with_capacity(target.len());
    for &y in target {
        let &i = order.iter().min_by_key(|&&i| dst.raw(f.image[i], y)).expect("nonempty");
        if !dst.within(f.image[i], y, c) {
            return Err(Error::Degenerate(format!(
                "image not {c}-dense: target point {y} is {} away",
                dst.dist(f.image[i], y)
            )));
        }
        g_img.push(f.domain[i]);
    }
    let g = SampledMap::new(target.to_vec(), g_img);
    let mut cp = Radius::zero();
    for (i, &x) in f.domain.iter().enumerate() {
        if let Some(gx) = g.apply(f.image[i]) {
            cp = cp.max(src.dist(x, gx));
        }
    }
    for (j, &y) in target.iter().enumerate() {
        let fx = f.apply(g.image[j]).expect("inverse lands in the domain");
        cp = cp.max(dst.dist(y, fx));
    }
    Ok((g, cp))
}

/// Finitely many group elements acting by total maps on a host, a partial
/// multiplication table, and the sample points where checks are run.
#[derive(Clone, Debug)]
pub struct QuasiActionSample {
    pub host: Host,
    pub elements: Vec<String>,
    pub maps: Vec<Vec<usize>>,
    /// `(g, h) -> gh` for composable pairs.
    pub compose: BTreeMap<(usize, usize), usize>,
    pub sample: Vec<usize>,
}

impl QuasiActionSample {
    pub fn act(&self, g: usize, x: usize) -> usize {
        self.maps[g][x]
    }

    /// Triples where both bracketings are defined and disagree.
    pub fn associativity_violations(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (&(a, b), &ab) in &self.compose {
            for c in 0..self.elements.len() {
                let (Some(&bc), Some(&abc1)) = (self.compose.get(&(b, c)), self.compose.get(&(ab, c))) else {
                    continue;
                };
                if let Some(&abc2) = self.compose.get(&(a, bc)) {
                    if abc1 != abc2 {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasiActionReport {
    pub passes: bool,
    /// Least `C` each element's map needs at the given `K`.
    pub element_constants: Vec<Radius>,
    pub worst_element: Option<usize>,
    /// `max d(g(h x), (gh) x)` and a witness `(g, h, x)`.
    pub composition_defect: Radius,
    pub composition_witness: Option<(usize, usize, usize)>,
    pub coboundedness_radius: Radius,
    /// `(R, M)`: largest number of elements moving some `N(x,R)` onto some `N(y,R)`.
    pub properness: Vec<(Radius, usize)>,
    pub associativity_violations: usize,
}

/// Checks quasi-action axioms at `(K, C)` over the sample.
pub fn check_quasi_action(qa: &QuasiActionSample, k: Radius, c: Radius, radii: &[Radius]) -> QuasiActionReport {
    let host = &qa.host;
    let sample = &qa.sample;
    let mut element_constants = Vec::new();
    for g in 0..qa.elements.len() {
        let f = SampledMap::new(sample.clone(), sample.iter().map(|&x| qa.act(g, x)).collect());
        let mut need = if sample.len() >= 2 { additive_constant(host, host, &f, k) } else { Radius::zero() };
        // coarse surjectivity onto the sample
        let all: Vec<usize> = (0..host.len()).map(|x| qa.act(g, x)).collect();
        for &y in sample {
            let m = all.iter().map(|&z| host.raw(z, y)).min().unwrap_or(0);
            need = need.max(host.raw_to_radius(m));
        }
        element_constants.push(need);
    }
    let worst_element = (0..element_constants.len()).max_by_key(|&i| (element_constants[i], std::cmp::Reverse(i)));

    let mut composition_defect = Radius::zero();
    let mut composition_witness = None;
    for (&(g, h), &gh) in &qa.compose {
        for &x in sample {
            let d = host.dist(qa.act(g, qa.act(h, x)), qa.act(gh, x));
            if d > composition_defect {
                composition_defect = d;
                composition_witness = Some((g, h, x));
            }
        }
    }

    let coboundedness_radius = match sample.first() {
        None => Radius::zero(),
        Some(&x0) => {
            let orbit: Vec<usize> = (0..qa.elements.len()).map(|g| qa.act(g, x0)).collect();
            sample
                .iter()
                .map(|&x| orbit.iter().map(|&o| host.dist(o, x)).min().unwrap_or_else(Radius::zero))
                .max()
                .unwrap_or_else(Radius::zero)
        }
    };

    let mut properness = Vec::new();
    for &r in radii {
        let balls: Vec<BTreeSet<usize>> =
            sample.iter().map(|&x| neighborhood(host, &[x], r).into_iter().collect()).collect();
        let mut worst = 0;
        for bx in &balls {
            let moved: Vec<BTreeSet<usize>> =
                (0..qa.elements.len()).map(|g| bx.iter().map(|&p| qa.act(g, p)).collect()).collect();
            for by in &balls {
                let m = moved.iter().filter(|im| !im.is_disjoint(by)).count();
                worst = worst.max(m);
            }
        }
        properness.push((r, worst));
    }

    let passes = element_constants.iter().all(|&e| e <= c) && composition_defect <= c;
    QuasiActionReport {
        passes,
        element_constants,
        worst_element,
        composition_defect,
        composition_witness,
        coboundedness_radius,
        properness,
        associativity_violations: qa.associativity_violations().len(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerReport {
    pub elements: Vec<usize>,
    /// Per element, its coarse distance from `H` inside the sample window.
    pub radii: Vec<Radius>,
    pub coboundedness_radius: Radius,
}

/// Elements moving `H` within `A` of itself. Comparisons are made inside
/// the sample window: `H ∩ W` against `g·H`, and `g·H ∩ W` against `H`.
pub fn stabilizer_sample(qa: &QuasiActionSample, h: &[usize], a: Radius) -> Result<StabilizerReport> {
    let host = &qa.host;
    let window: BTreeSet<usize> = qa.sample.iter().copied().collect();
    let h_in: Vec<usize> = h.iter().copied().filter(|x| window.contains(x)).collect();
    if h_in.is_empty() {
        return Err(Error::EmptySet("H inside the sample window"));
    }
    let mut elements = Vec::new();
    let mut radii = Vec::new();
    for g in 0..qa.elements.len() {
        let gh = sorted(h.iter().map(|&x| qa.act(g, x)));
        let gh_in: Vec<usize> = gh.iter().copied().filter(|x| window.contains(x)).collect();
        let mut r = containment_radius(host, &h_in, &gh)?;
        if !gh_in.is_empty() {
            r = r.max(containment_radius(host, &gh_in, h)?);
        }
        radii.push(r);
        if r <= a {
            elements.push(g);
        }
    }
    let h0 = h_in[0];
    let orbit: Vec<usize> = elements.iter().map(|&g| qa.act(g, h0)).collect();
    let coboundedness_radius = h_in
        .iter()
        .map(|&x| orbit.iter().map(|&o| host.dist(o, x)).min().unwrap_or_else(Radius::zero))
        .max()
        .unwrap_or_else(Radius::zero);
    Ok(StabilizerReport { elements, radii, coboundedness_radius })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeepReport {
    pub deep: usize,
    /// Sizes of all components of the complement, largest first.
    pub sizes: Vec<usize>,
    pub deep_sizes: Vec<usize>,
}

const INF: u64 = u64::MAX / 4;

/// Exact distance transform (raw keys) to `sources` on a lattice box, by
/// one pass per axis.
fn lattice_transform(n: usize, r: i64, metric: LatticeMetric, sources: &[bool]) -> Vec<u64> {
    let side = (2 * r + 1) as usize;
    let mut f: Vec<u64> = sources.iter().map(|&s| if s { 0 } else { INF }).collect();
    let mut line_in = vec![0u64; side];
    let mut line_out = vec![0u64; side];
    let mut stride = 1usize;
    for _axis in 0..n {
        let total = f.len();
        for base in 0..total {
            if (base / stride) % side != 0 {
                continue;
            }
            for (t, v) in line_in.iter_mut().enumerate() {
                *v = f[base + t * stride];
            }
            for (x, out) in line_out.iter_mut().enumerate() {
                let mut best = INF;
                for (y, &fy) in line_in.iter().enumerate() {
                    if fy >= INF {
                        continue;
                    }
                    let dx = x.abs_diff(y) as u64;
                    let v = match metric {
                        LatticeMetric::Sup => dx.max(fy),
                        LatticeMetric::EuclideanRounded => dx * dx + fy,
                    };
                    best = best.min(v);
                }
                *out = best;
            }
            for (t, &v) in line_out.iter().enumerate() {
                f[base + t * stride] = v;
            }
        }
        stride *= side;
    }
    f
}

fn tree_transform(tree: &Tree, sources: &[bool]) -> Vec<u64> {
    let mut d = vec![INF; tree.len()];
    let mut q = VecDeque::new();
    for (v, &s) in sources.iter().enumerate() {
        if s {
            d[v] = 0;
            q.push_back(v);
        }
    }
    while let Some(v) = q.pop_front() {
        for &w in tree.neighbors(v) {
            if d[w] == INF {
                d[w] = d[v] + 1;
                q.push_back(w);
            }
        }
    }
    d
}

fn transform(host: &Host, sources: &[bool]) -> Vec<u64> {
    match host {
        Host::Tree { tree, .. } => tree_transform(tree, sources),
        Host::Lattice { n, r, metric } => lattice_transform(*n, *r, *metric, sources),
    }
}

/// Counts the deep components of `host ∖ N_A(S)`: components holding a
/// point whose `depth`-ball avoids `N_A(S)`.
pub fn deep_component_count(host: &Host, s: &[usize], a: Radius, depth: Radius) -> DeepReport {
    let mut src = vec![false; host.len()];
    for &p in s {
        src[p] = true;
    }
    let a_raw = host.radius_to_raw(a).unwrap_or(0);
    let d_s = transform(host, &src);
    let removed: Vec<bool> = d_s.iter().map(|&d| d <= a_raw).collect();
    let d_removed = if removed.iter().any(|&x| x) { transform(host, &removed) } else { vec![INF; host.len()] };
    let depth_raw = host.radius_to_raw(depth).unwrap_or(0);

    let mut comp = vec![usize::MAX; host.len()];
    let mut sizes = Vec::new();
    let mut deep_flags = Vec::new();
    for start in 0..host.len() {
        if removed[start] || comp[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        comp[start] = id;
        let mut stack = vec![start];
        let mut size = 0;
        let mut deep = false;
        while let Some(p) = stack.pop() {
            size += 1;
            deep |= d_removed[p] > depth_raw;
            for q in host.unit_neighbors(p) {
                if !removed[q] && comp[q] == usize::MAX {
                    comp[q] = id;
                    stack.push(q);
                }
            }
        }
        sizes.push(size);
        deep_flags.push(deep);
    }
    let mut deep_sizes: Vec<usize> = sizes.iter().zip(&deep_flags).filter(|(_, &d)| d).map(|(&s, _)| s).collect();
    deep_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let mut sizes_sorted = sizes.clone();
    sizes_sorted.sort_unstable_by(|a, b| b.cmp(a));
    DeepReport { deep: deep_sizes.len(), sizes: sizes_sorted, deep_sizes }
}

/// Which vertex or edge space of a tree of spaces a host point belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpaceTag {
    Vertex(String),
    Edge(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RigidityMode {
    Weak,
    Full,
    Unique,
    StrongEdge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityRow {
    pub map: usize,
    pub vertex: String,
    pub best: String,
    pub radius: Radius,
    /// Second-best radius minus best radius (Unique mode only).
    pub gap: Option<Radius>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidityReport {
    pub rows: Vec<RigidityRow>,
    /// Least Hausdorff distance between distinct edge spaces (StrongEdge mode).
    pub min_edge_separation: Option<Radius>,
}

pub fn vertex_rigidity_check(
    host: &Host,
    tags: &[SpaceTag],
    maps: &[Vec<usize>],
    mode: RigidityMode,
) -> Result<RigidityReport> {
    let mut spaces: BTreeMap<&SpaceTag, Vec<usize>> = BTreeMap::new();
    for (p, t) in tags.iter().enumerate() {
        spaces.entry(t).or_default().push(p);
    }
    let vertex_spaces: Vec<(&String, &Vec<usize>)> = spaces
        .iter()
        .filter_map(|(t, pts)| match t {
            SpaceTag::Vertex(v) => Some((v, pts)),
            SpaceTag::Edge(_) => None,
        })
        .collect();
    if mode == RigidityMode::StrongEdge {
        let edges: Vec<&Vec<usize>> =
            spaces.iter().filter(|(t, _)| matches!(t, SpaceTag::Edge(_))).map(|(_, p)| p).collect();
        let mut best: Option<Radius> = None;
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                let r = equiv_radius(host, edges[i], edges[j])?;
                best = Some(best.map_or(r, |b| b.min(r)));
            }
        }
        return Ok(RigidityReport { rows: Vec::new(), min_edge_separation: best });
    }
    let mut rows = Vec::new();
    for (mi, f) in maps.iter().enumerate() {
        for (v, pts) in &vertex_spaces {
            let img = sorted(pts.iter().map(|&p| f[p]));
            let mut scored = Vec::new();
            for (w, wpts) in &vertex_spaces {
                let r = match mode {
                    RigidityMode::Weak => containment_radius(host, &img, wpts)?,
                    _ => equiv_radius(host, &img, wpts)?,
                };
                scored.push((r, (*w).clone()));
            }
            scored.sort();
            let gap = (mode == RigidityMode::Unique).then(|| {
                scored.get(1).map_or(Radius::zero(), |s| s.0 - scored[0].0)
            });
            rows.push(RigidityRow {
                map: mi,
                vertex: (*v).clone(),
                best: scored[0].1.clone(),
                radius: scored[0].0,
                gap,
            });
        }
    }
    Ok(RigidityReport { rows, min_edge_separation: None })
}

pub fn radius_to_string(r: Radius) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn radius_to_f64(r: Radius) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
