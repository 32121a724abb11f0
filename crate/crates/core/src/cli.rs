//! Command-line front end. `run` parses arguments, dispatches, and returns
//! the exit code with a deterministic report: 0 computed, 1 a checked
//! property failed, 2 bad input.

use crate::bassserre::{self, expand_ball_with_budget};
use crate::coarse::{self, Host, Radius};
use crate::crossing::{self, CrossingSummary, OracleParams};
use crate::error::Error;
use crate::fixtures;
use crate::formats::{self, PtsHost};
use crate::gog::{GraphOfGroups, TraceEntry};
use crate::linalg::QMatrix;
use crate::patterns::{self, Equivalence, SearchMode, SubspacePattern};
use crate::quasiedges::{self as qe, BoundedTree, QuasiEdge, RetreeParams};
use crate::rafts::{self, SpanMode};
use crate::tracks::{self, TriComplex};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Parser, Debug)]
#[command(name = "quasitree", version, about = "Graphs of groups, Bass-Serre trees, rafts, crossing, tracks and quasi-edges")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for randomized searches; recorded in the report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Work budget for enumerations; each command has its own default.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bounded, line-like or bushy.
    Classify {
        input: String,
        /// Also run the expansion oracle at this radius.
        #[arg(long)]
        oracle_radius: Option<usize>,
    },
    /// Collapse index-1 ends; writes the reduced `.gog`.
    Reduce {
        input: String,
        #[arg(short, long)]
        out: Option<String>,
    },
    /// Ball of the Bass-Serre tree as a `.tree`.
    Expand {
        input: String,
        #[arg(long)]
        base: Option<String>,
        #[arg(long)]
        radius: usize,
        #[arg(short, long)]
        out: Option<String>,
    },
    /// Whether every edge-to-vertex index is finite.
    Homogeneous { input: String },
    /// Dimension filtration and rafts.
    Rafts { input: String },
    /// Star condition at every vertex of an abelian graph.
    CheckStar {
        input: String,
        /// Require index-1 span instead of rational span.
        #[arg(long)]
        integral: bool,
    },
    /// Reducedness, line rafts and crossing connectivity.
    CheckRaftHypotheses {
        input: String,
        /// Crossing summary for a vertex, `v=CONNECTED`; needed in the
        /// abstract regime.
        #[arg(long = "summary")]
        summaries: Vec<String>,
    },
    /// Crossing graph summary at a vertex.
    Crossing {
        input: String,
        #[arg(long)]
        vertex: String,
        /// Also build the lattice oracle graph.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 30)]
        radius: i64,
        #[arg(long, default_value_t = 3)]
        cosets: usize,
    },
    /// Projective patterns of subspaces.
    #[command(subcommand)]
    Patterns(PatternsCmd),
    /// Normal tracks in triangulated 2-complexes.
    #[command(subcommand)]
    Tracks(TracksCmd),
    /// Quasi-edges of bounded trees.
    #[command(subcommand)]
    Qe(QeCmd),
    /// Containment and equivalence radii of two point sets, or deep
    /// complementary components of one.
    Coarse {
        a: String,
        b: Option<String>,
        /// Neighbourhood radius A; reports complementary components reaching depth.
        #[arg(long)]
        deep: Option<String>,
        #[arg(long, default_value = "10")]
        depth: String,
    },
    /// List the embedded fixtures, or print one.
    Fixtures { name: Option<String> },
}

#[derive(Subcommand, Debug)]
pub enum PatternsCmd {
    /// Whether a linear map carries one pattern onto another.
    Decide {
        a: String,
        b: String,
        #[arg(long, default_value_t = patterns::DEFAULT_TRIALS)]
        trials: usize,
    },
    /// Primitive integer bases in reduced echelon form.
    Canonical { input: String },
    CrossRatio { input: String },
}

#[derive(Args, Debug, Clone)]
pub struct TrackOpts {
    /// Essentiality threshold: both sides need at least this many vertices.
    #[arg(long, visible_alias = "essential-min", default_value_t = 1)]
    pub m: usize,
    #[arg(long, visible_alias = "weight-cap", default_value_t = qe::DEFAULT_WEIGHT_CAP)]
    pub cap: i64,
}

#[derive(Subcommand, Debug)]
pub enum TracksCmd {
    /// Maximal family of essential tracks.
    Find {
        input: String,
        #[command(flatten)]
        opts: TrackOpts,
    },
    /// Dual graph of the complement of a pattern.
    Dual {
        input: String,
        /// Pattern to cut along; defaults to a maximal essential family.
        #[arg(long)]
        npat: Option<String>,
        #[command(flatten)]
        opts: TrackOpts,
    },
    /// Rank of first homology over Q.
    H1 { input: String },
}

#[derive(Args, Debug, Clone)]
pub struct QeOpts {
    pub input: String,
    /// Boundary ids of one side, comma separated; `edges` seeds every
    /// edge partition (orbit and retree only).
    #[arg(long)]
    pub clopen: String,
    /// Self-maps: `id`, `swap:P:A:B`, or comma-separated images; several
    /// separated by `;`, or a file with one per line.
    #[arg(long, default_value = "id")]
    pub gens: String,
    #[arg(long, default_value_t = 1)]
    pub wordlen: usize,
    #[arg(long, default_value_t = 1)]
    pub threshold: u32,
    #[arg(long, default_value_t = qe::DEFAULT_FILL)]
    pub fill: usize,
}

#[derive(Subcommand, Debug)]
pub enum QeCmd {
    Constant(QeOpts),
    /// The edge whose partition equals the clopen, if any.
    TrueEdge(QeOpts),
    /// Images under self-maps.
    Push(QeOpts),
    /// Orbit nerve graph of the seeds.
    Orbit(QeOpts),
    /// Rebuild a tree from the orbit nerve via tracks.
    Retree(QeOpts),
}

#[derive(Default)]
struct Report(String);

impl Report {
    fn kv(&mut self, k: impl std::fmt::Display, v: impl std::fmt::Display) -> &mut Self {
        writeln!(self.0, "{k}={v}").expect("write to string");
        self
    }

    fn raw(&mut self, text: &str) -> &mut Self {
        self.0.push_str(text);
        self
    }
}

enum Outcome {
    Done(Report),
    Failed(Report),
}

type CmdResult = Result<Outcome, String>;

fn input_error(e: Error) -> String {
    e.to_string()
}

/// A file on disk, or an embedded fixture with the same file name.
fn load(path: &str) -> Result<String, String> {
    match std::fs::read_to_string(path) {
        Ok(t) => Ok(t),
        Err(e) => {
            let name = Path::new(path).file_name().and_then(|n| n.to_str()).unwrap_or(path);
            fixtures::get(name).map(|f| f.text.to_string()).ok_or_else(|| format!("{path}: {e}"))
        }
    }
}

fn load_gog(path: &str) -> Result<GraphOfGroups, String> {
    formats::parse_gog(&load(path)?).map_err(|e| format!("{path}: {e}"))
}

fn load_pat(path: &str) -> Result<SubspacePattern, String> {
    formats::parse_pat(&load(path)?).map_err(|e| format!("{path}: {e}"))
}

fn load_cx2(path: &str) -> Result<TriComplex, String> {
    formats::parse_cx2(&load(path)?).map_err(|e| format!("{path}: {e}"))
}

fn write_out(path: &str, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{path}: {e}"))
}

fn join<T: std::fmt::Display>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn qmatrix_layout(m: &QMatrix) -> String {
    (0..m.rows()).map(|i| join(m.row(i))).collect::<Vec<_>>().join(";")
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.to_string());
        }
    };
    match dispatch(&cli) {
        Ok(Outcome::Done(r)) => (0, r.0),
        Ok(Outcome::Failed(r)) => (1, r.0),
        Err(msg) => (2, format!("error: {msg}\n")),
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::Classify { input, oracle_radius } => classify(input, *oracle_radius),
        Command::Reduce { input, out } => reduce(input, out.as_deref()),
        Command::Expand { input, base, radius, out } => expand(g, input, base.as_deref(), *radius, out.as_deref()),
        Command::Homogeneous { input } => homogeneous(input),
        Command::Rafts { input } => rafts_cmd(input),
        Command::CheckStar { input, integral } => check_star(input, *integral),
        Command::CheckRaftHypotheses { input, summaries } => check_hypotheses(input, summaries),
        Command::Crossing { input, vertex, oracle, radius, cosets } => {
            crossing_cmd(g, input, vertex, *oracle, *radius, *cosets)
        }
        Command::Patterns(p) => patterns_cmd(g, p),
        Command::Tracks(t) => tracks_cmd(g, t),
        Command::Qe(q) => qe_cmd(g, q),
        Command::Coarse { a, b, deep, depth } => coarse_cmd(a, b.as_deref(), deep.as_deref(), depth),
        Command::Fixtures { name } => fixtures_cmd(name.as_deref()),
    }
}

fn classify(input: &str, oracle_radius: Option<usize>) -> CmdResult {
    let g = load_gog(input)?;
    let mut r = Report::default();
    let red = g.is_reduced().map_err(input_error)?;
    r.kv("regime", g.regime).kv("vertices", g.vertices.len()).kv("edges", g.edges.len()).kv("reduced", red.reduced);
    let verdict = bassserre::classify_trichotomy(&g);
    match &verdict {
        Ok(t) => r.kv("trichotomy", t),
        Err(Error::Unclassifiable(why)) => r.kv("trichotomy", "UNCLASSIFIABLE").kv("reason", why),
        Err(e) => return Err(e.to_string()),
    };
    if let Some(radius) = oracle_radius {
        let o = bassserre::oracle_classify_by_expansion(&g, radius).map_err(input_error)?;
        r.kv("oracle_radius", radius).kv("oracle", o);
    }
    Ok(if verdict.is_ok() { Outcome::Done(r) } else { Outcome::Failed(r) })
}

fn reduce(input: &str, out: Option<&str>) -> CmdResult {
    let g = load_gog(input)?;
    let (red, trace) = g.reduce().map_err(input_error)?;
    let mut text = String::new();
    for t in &trace {
        writeln!(text, "# {t}").expect("write to string");
    }
    text.push_str(&formats::serialize_gog(&red));
    let flagged = trace.iter().any(|t| matches!(t, TraceEntry::NonCollapsible { .. }));
    let mut r = Report::default();
    match out {
        Some(path) => {
            write_out(path, &text)?;
            r.kv("vertices", red.vertices.len()).kv("edges", red.edges.len()).kv("steps", trace.len());
            r.kv("non_collapsible", flagged).kv("out", path);
        }
        None => {
            r.raw(&text);
        }
    }
    Ok(Outcome::Done(r))
}

fn expand(g: &Global, input: &str, base: Option<&str>, radius: usize, out: Option<&str>) -> CmdResult {
    let gog = load_gog(input)?;
    let base = match base {
        Some(b) => b.to_string(),
        None => gog.vertices.keys().next().ok_or("graph has no vertices")?.clone(),
    };
    let budget = g.budget.map_or(bassserre::DEFAULT_BUDGET, |b| b as usize);
    let ball = expand_ball_with_budget(&gog, &base, radius, budget).map_err(input_error)?;
    let summary = format!(
        "# base={base} radius={radius} vertices={} edges={} truncated={}\n",
        ball.len(),
        ball.edges.len(),
        ball.truncated().len()
    );
    let text = summary.clone() + &formats::serialize_tree(&ball);
    let mut r = Report::default();
    match out {
        Some(path) => {
            write_out(path, &text)?;
            r.kv("base", &base).kv("radius", radius).kv("vertices", ball.len()).kv("edges", ball.edges.len());
            r.kv("truncated", ball.truncated().len()).kv("out", path);
        }
        None => {
            r.raw(&text);
        }
    }
    Ok(Outcome::Done(r))
}

fn homogeneous(input: &str) -> CmdResult {
    let g = load_gog(input)?;
    let mut r = Report::default();
    r.kv("homogeneous", g.is_geometrically_homogeneous().map_err(input_error)?);
    for v in g.vertices.keys() {
        r.kv(format!("valence.{v}"), g.tree_valence(v).map_err(input_error)?);
    }
    Ok(Outcome::Done(r))
}

fn rafts_cmd(input: &str) -> CmdResult {
    let g = load_gog(input)?;
    let f = rafts::dimension_filtration(&g);
    let mut r = Report::default();
    r.kv("top", f.top);
    for lvl in &f.levels {
        r.kv(format!("level.{}.vertices", lvl.dim), join(&lvl.vertices));
        r.kv(format!("level.{}.edges", lvl.dim), join(&lvl.edges));
    }
    let rep = rafts::find_rafts(&g).map_err(input_error)?;
    r.kv("rafts", rep.rafts.len());
    for (i, raft) in rep.rafts.iter().enumerate() {
        r.kv(
            format!("raft.{i}"),
            format!("dim={} kind={} vertices={} edges={}", raft.dim, raft.kind, join(&raft.vertices), join(&raft.edges)),
        );
    }
    r.kv("off_raft", join(&rep.off_raft));
    Ok(Outcome::Done(r))
}

fn check_star(input: &str, integral: bool) -> CmdResult {
    let g = load_gog(input)?;
    let mode = if integral { SpanMode::Integral } else { SpanMode::Rational };
    let rep = rafts::check_star_condition(&g, mode).map_err(input_error)?;
    let mut r = Report::default();
    r.kv("star", if rep.passes { "PASS" } else { "FAIL" });
    r.kv("span", if integral { "integral" } else { "rational" });
    for d in &rep.vertices {
        let spans = d.spans.map_or("n/a".to_string(), |b| b.to_string());
        r.kv(
            format!("vertex.{}", d.vertex),
            format!("rank={} images={} low_rank={} spans={spans}", d.rank, join(&d.image_ranks), d.low_rank),
        );
    }
    let failing: Vec<&str> = rep.vertices.iter().filter(|d| !d.passes()).map(|d| d.vertex.as_str()).collect();
    r.kv("failing", failing.join(","));
    Ok(if rep.passes { Outcome::Done(r) } else { Outcome::Failed(r) })
}

fn check_hypotheses(input: &str, summaries: &[String]) -> CmdResult {
    let g = load_gog(input)?;
    let mut supplied = BTreeMap::new();
    for s in summaries {
        let (v, label) = s.split_once('=').ok_or_else(|| format!("--summary `{s}`: expected v=LABEL"))?;
        let summary = CrossingSummary::parse(label).ok_or_else(|| format!("--summary `{s}`: unknown label"))?;
        supplied.insert(v.to_string(), summary);
    }
    let supplied = (!summaries.is_empty()).then_some(&supplied);
    let rep = rafts::check_raft_hypotheses(&g, supplied).map_err(input_error)?;
    let mut r = Report::default();
    r.kv("hypotheses", if rep.passes() { "PASS" } else { "FAIL" });
    for (i, f) in rep.failures.iter().enumerate() {
        r.kv(format!("failure.{i}"), f);
    }
    for (i, raft) in rep.rafts.iter().enumerate() {
        r.kv(format!("raft.{i}"), format!("dim={} kind={} vertices={}", raft.dim, raft.kind, join(&raft.vertices)));
    }
    for (v, s) in &rep.crossing {
        r.kv(format!("crossing.{v}"), s);
    }
    Ok(if rep.passes() { Outcome::Done(r) } else { Outcome::Failed(r) })
}

fn crossing_cmd(g: &Global, input: &str, vertex: &str, oracle: bool, radius: i64, cosets: usize) -> CmdResult {
    let gog = load_gog(input)?;
    let s = crossing::crossing_graph_summary(&gog, vertex).map_err(input_error)?;
    let mut r = Report::default();
    r.kv("vertex", vertex).kv("summary", s.label()).kv("detail", s.detail());
    if oracle {
        let mut params = OracleParams { radius, cosets, ..OracleParams::default() };
        if let Some(b) = g.budget {
            params.budget = b;
        }
        let og = crossing::lattice_oracle_crossing_graph(&gog, vertex, &params).map_err(input_error)?;
        r.kv("oracle.radius", radius).kv("oracle.nodes", join(&og.nodes));
        for (a, b, via) in &og.edges {
            let via = via.as_ref().map_or("direct".to_string(), |c| format!("via {c}"));
            r.kv(format!("oracle.edge.{}.{}", og.nodes[*a], og.nodes[*b]), via);
        }
        let label = match og.connected {
            None => "EMPTY",
            Some(true) => "CONNECTED",
            Some(false) => "DISCONNECTED",
        };
        r.kv("oracle.summary", label).kv("agree", label == s.label());
    }
    Ok(Outcome::Done(r))
}

fn patterns_cmd(g: &Global, cmd: &PatternsCmd) -> CmdResult {
    let mut r = Report::default();
    match cmd {
        PatternsCmd::Decide { a, b, trials } => {
            let (p, t) = (load_pat(a)?, load_pat(b)?);
            let rep = patterns::decide_projective_equivalence(&p, &t, g.seed, *trials).map_err(input_error)?;
            r.kv("verdict", rep.label()).kv("seed", g.seed).kv("solution_dim", rep.solution_dim);
            r.kv(
                "mode",
                match rep.mode {
                    SearchMode::Grid => "grid".to_string(),
                    SearchMode::Random { trials } => format!("random trials={trials}"),
                    SearchMode::Direct => "direct".to_string(),
                },
            );
            match &rep.verdict {
                Equivalence::Yes(f) => {
                    r.kv("F", qmatrix_layout(f));
                    for ((id, w), (_, v)) in p.subs.iter().zip(&t.subs) {
                        let mut one = SubspacePattern::new(p.n);
                        one.push(id.clone(), w.clone());
                        let mut other = SubspacePattern::new(p.n);
                        other.push(id.clone(), v.clone());
                        let ok = patterns::verify_witness(f, &one, &other);
                        r.kv(format!("check.{id}"), if ok { "ok" } else { "FAIL" });
                    }
                    r.kv("verified", patterns::verify_witness(f, &p, &t));
                }
                Equivalence::No(why) => {
                    r.kv("reason", why);
                }
                Equivalence::ProbablyNo { trials } => {
                    r.kv("trials", trials);
                }
            }
        }
        PatternsCmd::Canonical { input } => {
            let p = load_pat(input)?;
            let c = patterns::canonical_projective_pattern(&p).map_err(input_error)?;
            for (id, rows) in &c.subs {
                r.kv(format!("sub.{id}"), rows.iter().map(join).collect::<Vec<_>>().join(";"));
            }
        }
        PatternsCmd::CrossRatio { input } => {
            let p = load_pat(input)?;
            let lines = patterns::lines_of(&p).ok_or("cross-ratio needs four lines in Q^2")?;
            r.kv("cross_ratio", patterns::cross_ratio(&lines).map_err(input_error)?);
        }
    }
    Ok(Outcome::Done(r))
}

fn tracks_cmd(g: &Global, cmd: &TracksCmd) -> CmdResult {
    let budget = g.budget.unwrap_or(tracks::DEFAULT_ENUM_BUDGET);
    let mut r = Report::default();
    match cmd {
        TracksCmd::H1 { input } => {
            let c = load_cx2(input)?;
            r.kv("h1", tracks::h1_rank(&c));
        }
        TracksCmd::Find { input, opts } => {
            let c = load_cx2(input)?;
            let found = tracks::enumerate_tracks(&c, opts.cap, budget).map_err(input_error)?;
            r.kv("h1", tracks::h1_rank(&c)).kv("cap", opts.cap).kv("tracks", found.len());
            for (i, t) in found.iter().enumerate() {
                let ess = tracks::is_essential(&c, t, opts.m).map_err(input_error)?;
                r.kv(format!("track.{i}"), format!("coords={} weight={} {ess}", join(t.coords()), t.total_weight(&c)));
            }
            let fam = tracks::maximal_essential_family(&c, opts.m, opts.cap, budget).map_err(input_error)?;
            r.kv("family", fam.tracks.len()).kv("regions", join(&fam.region_sizes));
        }
        TracksCmd::Dual { input, npat, opts } => {
            let c = load_cx2(input)?;
            let p = match npat {
                Some(path) => formats::parse_npat(&load(path)?, &c).map_err(|e| format!("{path}: {e}"))?.pattern,
                None => tracks::maximal_essential_family(&c, opts.m, opts.cap, budget).map_err(input_error)?.pattern(&c),
            };
            let violations = tracks::validate_pattern(&c, &p);
            if let Some(v) = violations.first() {
                return Err(format!("invalid pattern: {v}"));
            }
            let d = tracks::dual_graph(&c, &p).map_err(input_error)?;
            r.kv("nodes", d.nodes.len()).kv("edges", d.edges.len()).kv("is_tree", d.is_tree());
            for (i, vs) in d.nodes.iter().enumerate() {
                r.kv(format!("node.{i}"), join(vs.iter().map(|&v| &c.vertices[v])));
            }
            for (a, b, t) in &d.edges {
                r.kv(format!("edge.{t}"), format!("{a},{b}"));
            }
            for (t, sides) in &d.flagged {
                r.kv(format!("flagged.{t}"), format!("sides={sides}"));
            }
            if !d.is_tree() {
                return Ok(Outcome::Failed(r));
            }
        }
    }
    Ok(Outcome::Done(r))
}

fn parse_ids(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|x| x.trim().parse().map_err(|e| format!("`{x}`: {e}"))).collect()
}

fn parse_gens(t: &BoundedTree, spec: &str) -> Result<Vec<Vec<usize>>, String> {
    let text = if Path::new(spec).is_file() { load(spec)? } else { spec.replace(';', "\n") };
    let mut out = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let map = if line == "id" {
            (0..t.tree.len()).collect()
        } else if let Some(rest) = line.strip_prefix("swap:") {
            let ids = parse_ids(&rest.replace(':', ","))?;
            let [p, a, b] = ids[..] else { return Err(format!("`{line}`: expected swap:P:A:B")) };
            qe::swap_subtrees(&t.tree, p, a, b).map_err(|e| format!("`{line}`: {e}"))?
        } else {
            parse_ids(line)?
        };
        if map.len() != t.tree.len() || map.iter().any(|&y| y >= t.tree.len()) {
            return Err(format!("generator `{line}` is not a self-map of the {}-vertex tree", t.tree.len()));
        }
        out.push(map);
    }
    if out.is_empty() {
        return Err("no generators".into());
    }
    Ok(out)
}

fn qe_cmd(g: &Global, cmd: &QeCmd) -> CmdResult {
    let opts = match cmd {
        QeCmd::Constant(o) | QeCmd::TrueEdge(o) | QeCmd::Push(o) | QeCmd::Orbit(o) | QeCmd::Retree(o) => o,
    };
    let ball = formats::parse_tree(&load(&opts.input)?).map_err(|e| format!("{}: {e}", opts.input))?;
    let t = BoundedTree::from_ball(&ball).map_err(input_error)?;
    let seeds = if opts.clopen == "edges" {
        if !matches!(cmd, QeCmd::Orbit(_) | QeCmd::Retree(_)) {
            return Err("--clopen edges applies to orbit and retree".into());
        }
        qe::edge_partitions(&t)
    } else {
        vec![QuasiEdge::new(&t, parse_ids(&opts.clopen)?).map_err(input_error)?]
    };
    let mut r = Report::default();
    r.kv("boundary", t.boundary.len());
    match cmd {
        QeCmd::Constant(_) => {
            let q = &seeds[0];
            r.kv("constant", qe::qe_constant(&t, q).map_err(input_error)?);
            r.kv("core", join(qe::core_set(&t, q).map_err(input_error)?));
        }
        QeCmd::TrueEdge(_) => {
            let e = qe::true_edge_partition(&t, &seeds[0]);
            r.kv("edge", e.map_or("none".to_string(), |e| e.to_string()));
        }
        QeCmd::Push(_) => {
            let q = &seeds[0];
            r.kv("constant", qe::qe_constant(&t, q).map_err(input_error)?);
            for (i, f) in parse_gens(&t, &opts.gens)?.iter().enumerate() {
                match qe::pushforward(&t, f, q) {
                    Ok(img) => {
                        let c = qe::qe_constant(&t, &img).map_err(input_error)?;
                        r.kv(format!("image.{i}"), format!("clopen={} constant={c}", join(img.key())));
                    }
                    Err(Error::Degenerate(why)) => {
                        r.kv(format!("image.{i}"), format!("DEGENERATE {why}"));
                    }
                    Err(e) => return Err(e.to_string()),
                }
            }
        }
        QeCmd::Orbit(_) | QeCmd::Retree(_) => {
            let gens = parse_gens(&t, &opts.gens)?;
            let y = qe::orbit_nerve_graph(&t, &seeds, &gens, opts.wordlen, opts.threshold, &qe::default_k_grid())
                .map_err(input_error)?;
            r.kv("nodes", y.nodes.len()).kv("edges", y.edge_count()).kv("degenerate", y.degenerate);
            r.kv("connected", y.connected);
            if let Some(fit) = &y.fit {
                r.kv("fit.K", fit.k).kv("fit.C", fit.c);
            }
            if let QeCmd::Retree(_) = cmd {
                let mut params = RetreeParams { fill: opts.fill, ..RetreeParams::default() };
                if let Some(b) = g.budget {
                    params.enum_budget = b;
                }
                match qe::retree(&t, &y, &params) {
                    Ok(rt) => {
                        r.kv("retree.cycles", rt.cycles_filled).kv("retree.family", rt.family_size);
                        r.kv("retree.nodes", rt.tree.len()).kv("retree.is_tree", rt.tree.is_tree());
                        if let Some(fit) = &rt.fit {
                            r.kv("retree.K", fit.k).kv("retree.C", fit.c);
                        }
                    }
                    Err(e @ Error::Degenerate(_)) => {
                        r.kv("retree", e);
                        return Ok(Outcome::Failed(r));
                    }
                    Err(e) => return Err(e.to_string()),
                }
            } else {
                for (i, q) in y.nodes.iter().enumerate() {
                    r.kv(format!("node.{i}"), format!("clopen={} core={}", join(q.key()), y.core_point(i)));
                }
            }
        }
    }
    Ok(Outcome::Done(r))
}

fn load_points(path: &str) -> Result<(Host, Vec<usize>, PtsHost), String> {
    let ps = formats::parse_pts(&load(path)?).map_err(|e| format!("{path}: {e}"))?;
    let host = match &ps.host {
        PtsHost::Lattice { n, r, metric } => Host::lattice(*n, *r, *metric),
        PtsHost::TreeFile(tree) => {
            let base = Path::new(path).parent().unwrap_or(Path::new("."));
            let full = base.join(tree);
            let ball = formats::parse_tree(&load(full.to_str().unwrap_or(tree))?).map_err(|e| format!("{tree}: {e}"))?;
            Host::ball(&ball)
        }
    };
    let ids = ps
        .points
        .iter()
        .map(|c| host.index_of(c).ok_or_else(|| format!("{path}: point {} outside the host", join(c))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((host, ids, ps.host))
}

fn parse_radius(s: &str) -> Result<Radius, String> {
    s.parse::<Radius>().map_err(|e| format!("radius `{s}`: {e}"))
}

fn coarse_cmd(a: &str, b: Option<&str>, deep: Option<&str>, depth: &str) -> CmdResult {
    let (host, pa, ha) = load_points(a)?;
    let mut r = Report::default();
    r.kv("points", pa.len());
    if let Some(b) = b {
        let (_, pb, hb) = load_points(b)?;
        if ha != hb {
            return Err("point sets live in different hosts".into());
        }
        let ab = coarse::containment_radius(&host, &pa, &pb).map_err(input_error)?;
        let ba = coarse::containment_radius(&host, &pb, &pa).map_err(input_error)?;
        let eq = coarse::equiv_radius(&host, &pa, &pb).map_err(input_error)?;
        r.kv("contain_a_in_b", coarse::radius_to_string(ab));
        r.kv("contain_b_in_a", coarse::radius_to_string(ba));
        r.kv("equiv", coarse::radius_to_string(eq));
    }
    if let Some(a_rad) = deep {
        let rep = coarse::deep_component_count(&host, &pa, parse_radius(a_rad)?, parse_radius(depth)?);
        r.kv("deep", rep.deep).kv("components", rep.sizes.len()).kv("deep_sizes", join(&rep.deep_sizes));
    }
    Ok(Outcome::Done(r))
}

fn fixtures_cmd(name: Option<&str>) -> CmdResult {
    let mut r = Report::default();
    match name {
        Some(n) => {
            let f = fixtures::get(n).ok_or_else(|| format!("no fixture named `{n}`"))?;
            r.raw(f.text);
        }
        None => {
            for f in fixtures::FIXTURES {
                r.kv(f.name, f.provenance());
            }
        }
    }
    Ok(Outcome::Done(r))
}
