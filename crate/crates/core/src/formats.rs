//! Line-oriented text formats: `.gog`, `.tree`, `.cx2`, `.npat`, `.pat`,
//! `.pts`. Every parser reports the 1-based line of the first problem, and
//! every serializer writes the canonical form its parser reads back
//! unchanged.

use crate::bassserre::{BallEdge, BallVertex, TreeBall};
use crate::coarse::LatticeMetric;
use crate::error::{Error, Result};
use crate::gog::{EndRef, GraphOfGroups, GroupSpec, Index, InjectionSpec, Regime, Violation};
use crate::linalg::{IntMatrix, Q};
use crate::patterns::SubspacePattern;
use crate::tracks::{NormalPattern, TriComplex};
use num_bigint::BigInt;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Gog,
    Tree,
    Cx2,
    Npat,
    Pat,
    Pts,
}

impl Format {
    pub const ALL: [Format; 6] = [Format::Gog, Format::Tree, Format::Cx2, Format::Npat, Format::Pat, Format::Pts];

    pub fn extension(self) -> &'static str {
        match self {
            Format::Gog => "gog",
            Format::Tree => "tree",
            Format::Cx2 => "cx2",
            Format::Npat => "npat",
            Format::Pat => "pat",
            Format::Pts => "pts",
        }
    }

    pub fn from_path(path: &str) -> Option<Format> {
        let ext = path.rsplit_once('.')?.1;
        Format::ALL.into_iter().find(|f| f.extension() == ext)
    }
}

/// Non-blank, non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split_once('#').map_or(raw, |(head, _)| head);
        let toks: Vec<&str> = line.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    magic: &str,
) -> Result<(usize, Vec<&'a str>)> {
    let (ln, toks) = lines.next().ok_or_else(|| Error::parse(1, format!("empty file, expected `{magic} v1`")))?;
    if toks.len() < 2 || toks[0] != magic || toks[1] != "v1" {
        return Err(Error::parse(ln, format!("expected header `{magic} v1`")));
    }
    Ok((ln, toks))
}

/// `key=value` tokens after the positional ones.
fn keyed<'a>(ln: usize, toks: &[&'a str]) -> Result<BTreeMap<&'a str, &'a str>> {
    let mut out = BTreeMap::new();
    for t in toks {
        let (k, v) = t.split_once('=').ok_or_else(|| Error::parse(ln, format!("expected key=value, found `{t}`")))?;
        if out.insert(k, v).is_some() {
            return Err(Error::parse(ln, format!("repeated key `{k}`")));
        }
    }
    Ok(out)
}

fn need<'a>(ln: usize, kv: &BTreeMap<&str, &'a str>, key: &str) -> Result<&'a str> {
    kv.get(key).copied().ok_or_else(|| Error::parse(ln, format!("missing `{key}=`")))
}

fn num<T: FromStr>(ln: usize, s: &str, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| Error::parse(ln, format!("{what} `{s}`: {e}")))
}

fn pair<'a>(ln: usize, s: &'a str, what: &str) -> Result<(&'a str, &'a str)> {
    s.split_once(',').ok_or_else(|| Error::parse(ln, format!("{what} must be two comma-separated values")))
}

fn parse_index(ln: usize, s: &str) -> Result<Index> {
    if s == "inf" {
        Ok(Index::Inf)
    } else {
        Ok(Index::Finite(num(ln, s, "index")?))
    }
}

/// Rows `a,b;c,d` of a `rows x cols` integer matrix; an empty string is a
/// matrix with no rows or no columns.
fn parse_matrix(ln: usize, s: &str, rows: usize, cols: usize) -> Result<IntMatrix> {
    if s.is_empty() {
        if rows == 0 || cols == 0 {
            return Ok(IntMatrix::zeros(rows, cols));
        }
        return Err(Error::parse(ln, "empty matrix"));
    }
    IntMatrix::parse_layout(s).map_err(|m| Error::parse(ln, m))
}

fn violation_item(v: &Violation) -> &str {
    match v {
        Violation::UnknownVertex { edge, .. }
        | Violation::EdgeDimExceedsVertexDim { edge, .. }
        | Violation::MatrixShape { edge, .. }
        | Violation::RankDeficient { edge, .. }
        | Violation::ZeroIndex { edge, .. } => edge,
        Violation::RegimeMismatch { item } => item,
    }
}

pub fn parse_gog(text: &str) -> Result<GraphOfGroups> {
    let mut lines = content_lines(text);
    let (ln, toks) = header(&mut lines, "gog")?;
    let regime = match toks.get(2).copied() {
        Some("abstract") => Regime::Abstract,
        Some("abelian") => Regime::Abelian,
        _ => return Err(Error::parse(ln, "expected regime `abstract` or `abelian`")),
    };
    if toks.len() > 3 {
        return Err(Error::parse(ln, "trailing tokens in header"));
    }
    let mut g = GraphOfGroups::new(regime);
    let mut line_of: HashMap<String, usize> = HashMap::new();
    let mut pending = Vec::new();
    let mut edge_ids = BTreeSet::new();
    for (ln, toks) in lines {
        if toks.len() < 2 {
            return Err(Error::parse(ln, "missing id"));
        }
        let id = toks[1];
        let kv = keyed(ln, &toks[2..])?;
        match toks[0] {
            "vertex" => {
                if g.vertices.contains_key(id) {
                    return Err(Error::parse(ln, format!("duplicate vertex `{id}`")));
                }
                let spec = match regime {
                    Regime::Abstract => GroupSpec::AbstractIndexed { dim: num(ln, need(ln, &kv, "dim")?, "dim")? },
                    Regime::Abelian => GroupSpec::FreeAbelian { rank: num(ln, need(ln, &kv, "rank")?, "rank")? },
                };
                if kv.len() != 1 {
                    return Err(Error::parse(ln, "unexpected keys on vertex line"));
                }
                g.add_vertex(id, spec);
                line_of.insert(id.to_string(), ln);
            }
            "edge" => {
                if !edge_ids.insert(id) {
                    return Err(Error::parse(ln, format!("duplicate edge `{id}`")));
                }
                pending.push((ln, id, kv));
                line_of.insert(id.to_string(), ln);
            }
            other => return Err(Error::parse(ln, format!("unknown record `{other}`"))),
        }
    }
    for (ln, id, kv) in pending {
        let (v1, v2) = pair(ln, need(ln, &kv, "ends")?, "ends")?;
        match regime {
            Regime::Abstract => {
                let dim = num(ln, need(ln, &kv, "dim")?, "dim")?;
                let (i1, i2) = pair(ln, need(ln, &kv, "idx")?, "idx")?;
                if kv.len() != 3 {
                    return Err(Error::parse(ln, "expected keys ends, dim, idx"));
                }
                g.add_abstract_edge(id, dim, v1, parse_index(ln, i1)?, v2, parse_index(ln, i2)?);
            }
            Regime::Abelian => {
                let rank: u32 = num(ln, need(ln, &kv, "rank")?, "rank")?;
                if kv.len() != 4 {
                    return Err(Error::parse(ln, "expected keys ends, rank, m1, m2"));
                }
                let rows = |v: &str| g.vertices.get(v).map_or(0, |s| s.dim() as usize);
                let m1 = parse_matrix(ln, need(ln, &kv, "m1")?, rows(v1), rank as usize)?;
                let m2 = parse_matrix(ln, need(ln, &kv, "m2")?, rows(v2), rank as usize)?;
                g.add_abelian_edge(id, rank, v1, m1, v2, m2);
            }
        }
    }
    if let Some(v) = g.validate().first() {
        let ln = line_of.get(violation_item(v)).copied().unwrap_or(1);
        return Err(Error::parse(ln, v.to_string()));
    }
    Ok(g)
}

pub fn serialize_gog(g: &GraphOfGroups) -> String {
    let mut out = format!("gog v1 {}\n", g.regime);
    for (id, spec) in &g.vertices {
        match spec {
            GroupSpec::AbstractIndexed { dim } => writeln!(out, "vertex {id} dim={dim}"),
            GroupSpec::FreeAbelian { rank } => writeln!(out, "vertex {id} rank={rank}"),
        }
        .expect("write to string");
    }
    for (id, e) in &g.edges {
        let [a, b] = &e.ends;
        write!(out, "edge {id} ends={},{}", a.vertex, b.vertex).expect("write to string");
        match (&e.group, &a.injection, &b.injection) {
            (GroupSpec::AbstractIndexed { dim }, InjectionSpec::DeclaredIndex(i1), InjectionSpec::DeclaredIndex(i2)) => {
                writeln!(out, " dim={dim} idx={i1},{i2}")
            }
            (GroupSpec::FreeAbelian { rank }, InjectionSpec::Matrix(m1), InjectionSpec::Matrix(m2)) => {
                writeln!(out, " rank={rank} m1={m1} m2={m2}")
            }
            (group, _, _) => writeln!(out, " dim={} idx=?,?", group.dim()),
        }
        .expect("write to string");
    }
    out
}

pub fn parse_tree(text: &str) -> Result<TreeBall> {
    let mut lines = content_lines(text);
    let (ln, toks) = header(&mut lines, "tree")?;
    if toks.len() > 2 {
        return Err(Error::parse(ln, "trailing tokens in header"));
    }
    let mut root = None;
    let mut verts: BTreeMap<usize, (usize, BallVertex)> = BTreeMap::new();
    let mut edges: BTreeMap<usize, (usize, BallEdge)> = BTreeMap::new();
    for (ln, toks) in lines {
        match toks[0] {
            "root" => {
                if toks.len() != 2 || root.is_some() {
                    return Err(Error::parse(ln, "expected a single `root <id>`"));
                }
                root = Some((ln, num::<usize>(ln, toks[1], "root")?));
            }
            "v" => {
                let id: usize = num(ln, toks.get(1).ok_or_else(|| Error::parse(ln, "missing id"))?, "vertex id")?;
                let mut rest = toks[2..].to_vec();
                let truncated = rest.last() == Some(&"truncated");
                if truncated {
                    rest.pop();
                }
                let kv = keyed(ln, &rest)?;
                if kv.keys().any(|k| *k != "depth" && *k != "over") {
                    return Err(Error::parse(ln, "vertex keys are depth and over"));
                }
                let depth = kv.get("depth").map(|d| num(ln, d, "depth")).transpose()?;
                let over = kv.get("over").map(|s| s.to_string());
                if verts.insert(id, (ln, BallVertex { over, depth, truncated })).is_some() {
                    return Err(Error::parse(ln, format!("duplicate vertex {id}")));
                }
            }
            "e" => {
                if toks.len() < 4 {
                    return Err(Error::parse(ln, "expected `e <id> <vid> <vid>`"));
                }
                let id: usize = num(ln, toks[1], "edge id")?;
                let a = num(ln, toks[2], "vertex id")?;
                let b = num(ln, toks[3], "vertex id")?;
                let kv = keyed(ln, &toks[4..])?;
                if kv.keys().any(|k| *k != "over") {
                    return Err(Error::parse(ln, "the only edge key is over"));
                }
                let over = match kv.get("over") {
                    Some(s) => {
                        let (edge, end) =
                            s.rsplit_once(':').ok_or_else(|| Error::parse(ln, "over must be <edge>:<end>"))?;
                        let end: u8 = num(ln, end, "end number")?;
                        if end != 1 && end != 2 {
                            return Err(Error::parse(ln, "end number must be 1 or 2"));
                        }
                        Some(EndRef { edge: edge.to_string(), end })
                    }
                    None => None,
                };
                if edges.insert(id, (ln, BallEdge { a, b, over })).is_some() {
                    return Err(Error::parse(ln, format!("duplicate edge {id}")));
                }
            }
            other => return Err(Error::parse(ln, format!("unknown record `{other}`"))),
        }
    }
    for (k, (&id, (ln, _))) in verts.iter().enumerate() {
        if id != k {
            return Err(Error::parse(*ln, format!("vertex ids must be 0..{}", verts.len())));
        }
    }
    for (k, (&id, (ln, e))) in edges.iter().enumerate() {
        if id != k {
            return Err(Error::parse(*ln, format!("edge ids must be 0..{}", edges.len())));
        }
        if e.a >= verts.len() || e.b >= verts.len() || e.a == e.b {
            return Err(Error::parse(*ln, "edge endpoints must be distinct existing vertices"));
        }
    }
    if let Some((ln, r)) = root {
        if r >= verts.len() {
            return Err(Error::parse(ln, "root is not a vertex"));
        }
    }
    let ball = TreeBall {
        root: root.map(|(_, r)| r),
        radius: verts.values().filter_map(|(_, v)| v.depth).max().unwrap_or(0),
        vertices: verts.into_values().map(|(_, v)| v).collect(),
        edges: edges.into_values().map(|(_, e)| e).collect(),
    };
    if ball.vertices.is_empty() || !ball.tree().is_tree() {
        return Err(Error::parse(1, "vertices and edges do not form a tree"));
    }
    Ok(ball)
}

pub fn serialize_tree(t: &TreeBall) -> String {
    let mut out = String::from("tree v1\n");
    if let Some(r) = t.root {
        writeln!(out, "root {r}").expect("write to string");
    }
    for (i, v) in t.vertices.iter().enumerate() {
        write!(out, "v {i}").expect("write to string");
        if let Some(d) = v.depth {
            write!(out, " depth={d}").expect("write to string");
        }
        if let Some(o) = &v.over {
            write!(out, " over={o}").expect("write to string");
        }
        out.push_str(if v.truncated { " truncated\n" } else { "\n" });
    }
    for (i, e) in t.edges.iter().enumerate() {
        write!(out, "e {i} {} {}", e.a, e.b).expect("write to string");
        if let Some(o) = &e.over {
            write!(out, " over={o}").expect("write to string");
        }
        out.push('\n');
    }
    out
}

pub fn parse_cx2(text: &str) -> Result<TriComplex> {
    let mut lines = content_lines(text);
    let (ln, toks) = header(&mut lines, "cx2")?;
    if toks.len() > 2 {
        return Err(Error::parse(ln, "trailing tokens in header"));
    }
    let mut c = TriComplex::new();
    for (ln, toks) in lines {
        let arity = match toks[0] {
            "v" => 2,
            "t" => 5,
            "e" => 4,
            other => return Err(Error::parse(ln, format!("unknown record `{other}`"))),
        };
        if toks.len() != arity {
            return Err(Error::parse(ln, format!("`{}` takes {} fields", toks[0], arity - 1)));
        }
        let res = match toks[0] {
            "v" => c.add_vertex(toks[1]),
            "t" => c.add_triangle(toks[1], toks[2], toks[3], toks[4]),
            _ => c.add_bare_edge(toks[1], toks[2], toks[3]),
        };
        res.map_err(|e| Error::parse(ln, e.to_string()))?;
    }
    c.validate().map_err(|e| Error::parse(1, e.to_string()))?;
    Ok(c)
}

pub fn serialize_cx2(c: &TriComplex) -> String {
    let mut out = String::from("cx2 v1\n");
    for v in &c.vertices {
        writeln!(out, "v {v}").expect("write to string");
    }
    for (id, [a, b, d]) in &c.triangles {
        writeln!(out, "t {id} {} {} {}", c.vertices[*a], c.vertices[*b], c.vertices[*d]).expect("write to string");
    }
    for (id, e) in &c.bare {
        let (a, b) = c.edges()[*e];
        writeln!(out, "e {id} {} {}", c.vertices[a], c.vertices[b]).expect("write to string");
    }
    out
}

/// A normal pattern with the name of the complex it lives on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NpatFile {
    pub over: String,
    pub pattern: NormalPattern,
}

/// Triangles and bare edges not listed carry zero.
pub fn parse_npat(text: &str, c: &TriComplex) -> Result<NpatFile> {
    let mut lines = content_lines(text);
    let (ln, toks) = header(&mut lines, "npat")?;
    let kv = keyed(ln, &toks[2..])?;
    let over = need(ln, &kv, "over")?.to_string();
    let tri: HashMap<&str, usize> = c.triangles.iter().enumerate().map(|(i, (id, _))| (id.as_str(), i)).collect();
    let bare: HashMap<&str, usize> = c.bare.iter().enumerate().map(|(i, (id, _))| (id.as_str(), i)).collect();
    let mut p = NormalPattern::zero(c);
    let mut seen = BTreeSet::new();
    for (ln, toks) in lines {
        if toks.len() != 3 {
            return Err(Error::parse(ln, "expected `corner <t> a,b,c` or `bare <e> w`"));
        }
        if !seen.insert((toks[0], toks[1])) {
            return Err(Error::parse(ln, format!("duplicate entry for `{}`", toks[1])));
        }
        match toks[0] {
            "corner" => {
                let t = *tri.get(toks[1]).ok_or_else(|| Error::parse(ln, format!("unknown triangle `{}`", toks[1])))?;
                let xs: Vec<i64> =
                    toks[2].split(',').map(|x| num(ln, x, "corner coordinate")).collect::<Result<_>>()?;
                if xs.len() != 3 || xs.iter().any(|&x| x < 0) {
                    return Err(Error::parse(ln, "corner coordinates are three nonnegative integers"));
                }
                p.corners[t] = [xs[0], xs[1], xs[2]];
            }
            "bare" => {
                let e = *bare.get(toks[1]).ok_or_else(|| Error::parse(ln, format!("unknown bare edge `{}`", toks[1])))?;
                let w: i64 = num(ln, toks[2], "weight")?;
                if w < 0 {
                    return Err(Error::parse(ln, "negative weight"));
                }
                p.bare[e] = w;
            }
            other => return Err(Error::parse(ln, format!("unknown record `{other}`"))),
        }
    }
    Ok(NpatFile { over, pattern: p })
}

pub fn serialize_npat(f: &NpatFile, c: &TriComplex) -> String {
    let mut out = format!("npat v1 over={}\n", f.over);
    for ((id, _), [a, b, d]) in c.triangles.iter().zip(&f.pattern.corners) {
        writeln!(out, "corner {id} {a},{b},{d}").expect("write to string");
    }
    for ((id, _), w) in c.bare.iter().zip(&f.pattern.bare) {
        writeln!(out, "bare {id} {w}").expect("write to string");
    }
    out
}

fn parse_q(ln: usize, s: &str) -> Result<Q> {
    let bad = |e: String| Error::parse(ln, format!("rational `{s}`: {e}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|e: num_bigint::ParseBigIntError| bad(e.to_string()))?;
    let d: BigInt = d.parse().map_err(|e: num_bigint::ParseBigIntError| bad(e.to_string()))?;
    if d == BigInt::from(0) {
        return Err(bad("zero denominator".into()));
    }
    Ok(Q::new(n, d))
}

/// Basis vectors are the rows of `rows=`; entries may be `p/q`.
pub fn parse_pat(text: &str) -> Result<SubspacePattern> {
    let mut lines = content_lines(text);
    let (ln, toks) = header(&mut lines, "pat")?;
    let kv = keyed(ln, &toks[2..])?;
    let n: usize = num(ln, need(ln, &kv, "n")?, "n")?;
    let mut p = SubspacePattern::new(n);
    let mut ids = BTreeSet::new();
    for (ln, toks) in lines {
        if toks[0] != "sub" || toks.len() != 3 {
            return Err(Error::parse(ln, "expected `sub <id> rows=<rows>`"));
        }
        if !ids.insert(toks[1]) {
            return Err(Error::parse(ln, format!("duplicate subspace `{}`", toks[1])));
        }
        let kv = keyed(ln, &toks[2..])?;
        let rows: Vec<Vec<Q>> = need(ln, &kv, "rows")?
            .split(';')
            .map(|r| r.split(',').map(|x| parse_q(ln, x)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::parse(ln, format!("every row must have {n} entries")));
        }
        let mut single = SubspacePattern::new(n);
        single.push(toks[1], rows.clone());
        single.validate().map_err(|e| Error::parse(ln, e.to_string()))?;
        p.push(toks[1], rows);
    }
    p.validate().map_err(|e| Error::parse(1, e.to_string()))?;
    Ok(p)
}

pub fn serialize_pat(p: &SubspacePattern) -> String {
    let mut out = format!("pat v1 n={}\n", p.n);
    for (id, rows) in &p.subs {
        let layout = rows
            .iter()
            .map(|r| r.iter().map(Q::to_string).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";");
        writeln!(out, "sub {id} rows={layout}").expect("write to string");
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PtsHost {
    /// Path of a `.tree` file; points are vertex ids.
    TreeFile(String),
    Lattice { n: usize, r: i64, metric: LatticeMetric },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    pub host: PtsHost,
    pub points: Vec<Vec<i64>>,
}

pub fn parse_metric(s: &str) -> Option<LatticeMetric> {
    match s {
        "euclidean" => Some(LatticeMetric::EuclideanRounded),
        "sup" => Some(LatticeMetric::Sup),
        _ => None,
    }
}

pub fn parse_pts(text: &str) -> Result<PointSet> {
    let mut lines = content_lines(text);
    let (ln, toks) = header(&mut lines, "pts")?;
    let host_toks = match toks.get(2).and_then(|t| t.strip_prefix("host=")) {
        Some(first) => std::iter::once(first).chain(toks[3..].iter().copied()).collect::<Vec<_>>(),
        None => return Err(Error::parse(ln, "missing `host=`")),
    };
    let host = match host_toks.as_slice() {
        ["lattice", n, r, m] => {
            let metric = parse_metric(m).ok_or_else(|| Error::parse(ln, format!("unknown metric `{m}`")))?;
            let r: i64 = num(ln, r, "lattice radius")?;
            if r < 0 {
                return Err(Error::parse(ln, "negative lattice radius"));
            }
            PtsHost::Lattice { n: num(ln, n, "lattice dimension")?, r, metric }
        }
        [path] if !path.is_empty() => PtsHost::TreeFile(path.to_string()),
        _ => return Err(Error::parse(ln, "host is `<tree file>` or `lattice <n> <r> <metric>`")),
    };
    let mut points = Vec::new();
    for (ln, toks) in lines {
        if toks[0] != "p" || toks.len() != 2 {
            return Err(Error::parse(ln, "expected `p <coords>`"));
        }
        let c: Vec<i64> = toks[1].split(',').map(|x| num(ln, x, "coordinate")).collect::<Result<_>>()?;
        match &host {
            PtsHost::TreeFile(_) if c.len() != 1 || c[0] < 0 => {
                return Err(Error::parse(ln, "tree points are single vertex ids"));
            }
            PtsHost::Lattice { n, r, .. } if c.len() != *n || c.iter().any(|x| x.abs() > *r) => {
                return Err(Error::parse(ln, format!("lattice points need {n} coordinates in [-{r}, {r}]")));
            }
            _ => {}
        }
        points.push(c);
    }
    Ok(PointSet { host, points })
}

pub fn serialize_pts(p: &PointSet) -> String {
    let mut out = match &p.host {
        PtsHost::TreeFile(path) => format!("pts v1 host={path}\n"),
        PtsHost::Lattice { n, r, metric } => format!("pts v1 host=lattice {n} {r} {metric}\n"),
    };
    for c in &p.points {
        let s = c.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        writeln!(out, "p {s}").expect("write to string");
    }
    out
}
