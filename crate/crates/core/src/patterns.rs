//! Indexed patterns of rational subspaces, projective equivalence with a
//! verified witness, and the cross-ratio of four lines in the plane.

use crate::error::{Error, Result};
use crate::linalg::{canonical_span, det_i128, primitive, q, QMatrix, Q};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Grid evaluation is used when `(n + 1)^m` is at most this.
pub const GRID_LIMIT: u64 = 1_000_000;
pub const DEFAULT_TRIALS: usize = 2000;

/// Ordered family of subspaces of `Q^n`, each given by basis columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspacePattern {
    pub n: usize,
    pub subs: Vec<(String, Vec<Vec<Q>>)>,
}

impl SubspacePattern {
    pub fn new(n: usize) -> Self {
        SubspacePattern { n, subs: Vec::new() }
    }

    pub fn push(&mut self, id: impl Into<String>, basis: Vec<Vec<Q>>) -> &mut Self {
        self.subs.push((id.into(), basis));
        self
    }

    pub fn push_int(&mut self, id: impl Into<String>, basis: &[Vec<i64>]) -> &mut Self {
        let b = basis.iter().map(|v| v.iter().map(|&x| q(x)).collect()).collect();
        self.push(id, b)
    }

    pub fn len(&self) -> usize {
        self.subs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subs.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.subs.is_empty() {
            return Err(Error::Invalid("pattern has no subspaces".into()));
        }
        for (id, b) in &self.subs {
            if b.iter().any(|v| v.len() != self.n) {
                return Err(Error::Invalid(format!("subspace {id}: vectors must have length {}", self.n)));
            }
            let rank = if b.is_empty() { 0 } else { QMatrix::from_columns(self.n, b).rank() };
            if rank == 0 {
                return Err(Error::Invalid(format!("subspace {id} is zero")));
            }
            if rank < b.len() {
                return Err(Error::Invalid(format!("subspace {id}: basis is not independent")));
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subs.iter().map(|(_, b)| b.len()).collect()
    }
}

/// Each subspace in reduced echelon form with primitive integer rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectivePattern {
    pub n: usize,
    pub subs: Vec<(String, Vec<Vec<BigInt>>)>,
}

impl ProjectivePattern {
    /// Equality of the underlying subspaces, ignoring ids.
    pub fn same_subspaces(&self, other: &ProjectivePattern) -> bool {
        self.n == other.n
            && self.subs.len() == other.subs.len()
            && self.subs.iter().zip(&other.subs).all(|(a, b)| a.1 == b.1)
    }
}

pub fn canonical_projective_pattern(p: &SubspacePattern) -> Result<ProjectivePattern> {
    p.validate()?;
    Ok(ProjectivePattern {
        n: p.n,
        subs: p.subs.iter().map(|(id, b)| (id.clone(), canonical_span(p.n, b))).collect(),
    })
}

pub fn apply_linear(f: &QMatrix, p: &SubspacePattern) -> Result<SubspacePattern> {
    if f.rows() != p.n || f.cols() != p.n {
        return Err(Error::Invalid(format!("map must be {0}x{0}", p.n)));
    }
    if f.det().is_zero() {
        return Err(Error::Degenerate("singular linear map".into()));
    }
    p.validate()?;
    let subs = p
        .subs
        .iter()
        .map(|(id, b)| {
            let img: Vec<Vec<Q>> = b.iter().map(|v| f.mul_vec(v)).collect();
            let canon = canonical_span(p.n, &img);
            (id.clone(), canon.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect())
        })
        .collect();
    Ok(SubspacePattern { n: p.n, subs })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Exhaustive over `{0..n}^m`; negative answers are exact.
    Grid,
    Random { trials: usize },
    /// Decided without a determinant search.
    Direct,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Equivalence {
    No(String),
    ProbablyNo { trials: usize },
    Yes(QMatrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub verdict: Equivalence,
    pub mode: SearchMode,
    /// Dimension of the space of linear maps carrying each `W_k` into `V_k`.
    pub solution_dim: usize,
}

impl EquivalenceReport {
    pub fn label(&self) -> &'static str {
        match self.verdict {
            Equivalence::No(_) => "NO",
            Equivalence::ProbablyNo { .. } => "PROBABLY-NO",
            Equivalence::Yes(_) => "YES",
        }
    }
}

/// True when `f` is invertible and maps each subspace of `p` onto the
/// matching subspace of `target`.
pub fn verify_witness(f: &QMatrix, p: &SubspacePattern, target: &SubspacePattern) -> bool {
    if f.det().is_zero() || p.len() != target.len() || p.n != target.n {
        return false;
    }
    p.subs.iter().zip(&target.subs).all(|((_, w), (_, v))| {
        let img: Vec<Vec<Q>> = w.iter().map(|x| f.mul_vec(x)).collect();
        canonical_span(p.n, &img) == canonical_span(p.n, v)
    })
}

/// Basis of `{F : F W_k ⊆ V_k for all k}` as integer matrices.
fn solution_basis(p: &SubspacePattern, target: &SubspacePattern) -> Vec<Vec<Vec<BigInt>>> {
    let n = p.n;
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for ((_, w), (_, v)) in p.subs.iter().zip(&target.subs) {
        let ann = crate::linalg::annihilator(n, v);
        for a in &ann {
            for b in w {
                // sum_{i,j} a_i F_ij b_j = 0, unknown F_ij at index i*n + j
                let mut row = vec![Q::zero(); n * n];
                for i in 0..n {
                    for j in 0..n {
                        row[i * n + j] = &a[i] * &b[j];
                    }
                }
                rows.push(row);
            }
        }
    }
    let null = if rows.is_empty() {
        (0..n * n).map(|k| (0..n * n).map(|t| if t == k { Q::one() } else { Q::zero() }).collect()).collect()
    } else {
        QMatrix::from_rows(rows, n * n).nullspace()
    };
    null.iter()
        .map(|v| {
            let p = primitive(v);
            (0..n).map(|i| p[i * n..(i + 1) * n].to_vec()).collect()
        })
        .collect()
}

fn combine(basis: &[Vec<Vec<BigInt>>], t: &[i64], n: usize) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (fi, &ti) in basis.iter().zip(t) {
        if ti == 0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                m[i][j] += &fi[i][j] * ti;
            }
        }
    }
    m
}

fn nonsingular(m: &[Vec<BigInt>]) -> bool {
    let n = m.len();
    let small: Option<Vec<i128>> = m.iter().flatten().map(|x| x.to_i128().filter(|v| v.abs() < (1 << 20))).collect();
    if let Some(flat) = small {
        if let Some(d) = det_i128(&flat, n) {
            return d != 0;
        }
    }
    !crate::linalg::det_bareiss(m.to_vec()).is_zero()
}

fn to_qmatrix(m: &[Vec<BigInt>]) -> QMatrix {
    let n = m.len();
    QMatrix::from_rows(m.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect(), n)
}

/// Decides whether some invertible `F` satisfies `F W_k = V_k` for all `k`.
pub fn decide_projective_equivalence(
    p: &SubspacePattern,
    target: &SubspacePattern,
    seed: u64,
    trials: usize,
) -> Result<EquivalenceReport> {
    p.validate()?;
    target.validate()?;
    if p.n != target.n || p.len() != target.len() {
        return Err(Error::Invalid("patterns differ in ambient rank or length".into()));
    }
    let n = p.n;
    let direct_no = |why: String, dim: usize| EquivalenceReport {
        verdict: Equivalence::No(why),
        mode: SearchMode::Direct,
        solution_dim: dim,
    };
    for (k, (a, b)) in p.dims().iter().zip(target.dims()).enumerate() {
        if *a != b {
            return Ok(direct_no(format!("dimension mismatch at position {k}: {a} vs {b}"), 0));
        }
    }
    let id = QMatrix::identity(n);
    let basis = solution_basis(p, target);
    let m = basis.len();
    if verify_witness(&id, p, target) {
        return Ok(EquivalenceReport { verdict: Equivalence::Yes(id), mode: SearchMode::Direct, solution_dim: m });
    }
    if m == 0 {
        return Ok(direct_no("only the zero map respects the pattern".into(), 0));
    }
    let found = |t: &[i64]| {
        let f = combine(&basis, t, n);
        nonsingular(&f).then(|| to_qmatrix(&f))
    };
    let side = (n + 1) as u64;
    let grid = side.checked_pow(m as u32).filter(|&g| g <= GRID_LIMIT);
    let (hit, mode) = if let Some(total) = grid {
        let mut t = vec![0i64; m];
        let mut hit = None;
        for mut k in 0..total {
            for x in t.iter_mut() {
                *x = (k % side) as i64;
                k /= side;
            }
            if let Some(f) = found(&t) {
                hit = Some(f);
                break;
            }
        }
        (hit, SearchMode::Grid)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hit = None;
        for _ in 0..trials {
            let t: Vec<i64> = (0..m).map(|_| rng.gen_range(-1000..=1000)).collect();
            if let Some(f) = found(&t) {
                hit = Some(f);
                break;
            }
        }
        (hit, SearchMode::Random { trials })
    };
    let verdict = match (hit, mode) {
        (Some(f), _) => {
            if !verify_witness(&f, p, target) {
                return Err(Error::Degenerate("witness failed exact verification".into()));
            }
            Equivalence::Yes(f)
        }
        (None, SearchMode::Random { trials }) => Equivalence::ProbablyNo { trials },
        (None, _) => Equivalence::No("every map respecting the pattern is singular".into()),
    };
    Ok(EquivalenceReport { verdict, mode, solution_dim: m })
}

/// Evaluates `det(sum t_i F_i)` over the solution space at `t`; exposed
/// for independent re-checking of negative answers.
pub fn solution_determinant(p: &SubspacePattern, target: &SubspacePattern, t: &[i64]) -> BigInt {
    let basis = solution_basis(p, target);
    let f = combine(&basis, t, p.n);
    crate::linalg::det_bareiss(f)
}

pub fn solution_dimension(p: &SubspacePattern, target: &SubspacePattern) -> usize {
    solution_basis(p, target).len()
}

/// `(d13 d24) / (d14 d23)` with `d_ij = x_i y_j - x_j y_i`.
pub fn cross_ratio(lines: &[[Q; 2]; 4]) -> Result<Q> {
    if lines.iter().any(|l| l[0].is_zero() && l[1].is_zero()) {
        return Err(Error::Degenerate("zero vector does not span a line".into()));
    }
    let d = |i: usize, j: usize| &lines[i][0] * &lines[j][1] - &lines[j][0] * &lines[i][1];
    for i in 0..4 {
        for j in i + 1..4 {
            if d(i, j).is_zero() {
                return Err(Error::Degenerate(format!("lines {} and {} coincide", i + 1, j + 1)));
            }
        }
    }
    Ok((d(0, 2) * d(1, 3)) / (d(0, 3) * d(1, 2)))
}

pub fn cross_ratio_int(lines: [[i64; 2]; 4]) -> Result<Q> {
    cross_ratio(&lines.map(|l| [q(l[0]), q(l[1])]))
}

/// Four lines of a pattern in `Q^2`, if that is its shape.
pub fn lines_of(p: &SubspacePattern) -> Option<[[Q; 2]; 4]> {
    if p.n != 2 || p.len() != 4 || p.subs.iter().any(|(_, b)| b.len() != 1) {
        return None;
    }
    let v: Vec<[Q; 2]> = p.subs.iter().map(|(_, b)| [b[0][0].clone(), b[0][1].clone()]).collect();
    v.try_into().ok()
}

pub fn is_integral_witness(f: &QMatrix) -> bool {
    f.is_integral() && f.det().abs() == Q::one()
}
