//! Coxeter diagrams and exact Gram matrices of the quotient polyhedra.
//!
//! Faces are indexed `0..s` internally and printed as `F1..Fs`. The
//! hyperbolic family has six faces: `F1` meets `F2` at angle `pi/m` and `F3`
//! at `pi/n`, `F2-F4` and `F3-F5` are parallel (ideal vertices), and the
//! truncation face `F6` is ultraparallel to `F4` and `F5`.

use std::cmp::Ordering;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::exact::matrix::{self, Matrix};
use crate::exact::{adjoin_sqrt, embed_cos, format_decimal, make_context, AlgebraicNumber, FieldContext};
use crate::{Error, Result};

const EIGEN_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Geometry {
    Spherical,
    Euclidean,
    Hyperbolic,
}

impl Geometry {
    pub fn name(self) -> &'static str {
        match self {
            Geometry::Spherical => "spherical",
            Geometry::Euclidean => "euclidean",
            Geometry::Hyperbolic => "hyperbolic",
        }
    }
}

/// Compare `1/m + 1/n` with `1/2`.
pub fn geometry_of(m: u64, n: u64) -> Geometry {
    match (2 * (m + n)).cmp(&(m * n)) {
        Ordering::Greater => Geometry::Spherical,
        Ordering::Equal => Geometry::Euclidean,
        Ordering::Less => Geometry::Hyperbolic,
    }
}

/// A vertex pattern `[m,n,m,n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TilingType {
    pub m: u64,
    pub n: u64,
    pub geometry: Geometry,
}

impl TilingType {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        if m < 3 || n < 3 {
            return Err(Error::Domain(format!("invalid tiling type ({m},{n}): need m,n >= 3")));
        }
        Ok(TilingType { m, n, geometry: geometry_of(m, n) })
    }

    /// The same type with `m >= n`.
    pub fn normalized(self) -> Self {
        if self.m >= self.n {
            self
        } else {
            TilingType { m: self.n, n: self.m, geometry: self.geometry }
        }
    }
}

/// The field `Q(2cos(pi/L))` with `L = lcm(m,n)`.
pub fn field_for(m: u64, n: u64) -> Result<Arc<FieldContext>> {
    Ok(make_context(m.lcm(&n))?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Hyperbolic,
    Spherical,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Hyperbolic => "hyperbolic",
            Family::Spherical => "spherical",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EdgeLabel {
    /// Dihedral angle `pi/k`.
    Angle(u64),
    /// Faces meeting at an ideal vertex.
    Parallel,
    /// Faces at distance `l` with the given `cosh l`.
    Ultraparallel(AlgebraicNumber),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub label: EdgeLabel,
}

#[derive(Clone, Debug)]
pub struct CoxeterPresentation {
    pub m: u64,
    pub n: u64,
    pub family: Family,
    pub faces: Vec<String>,
    pub edges: Vec<Edge>,
    pub gram: Matrix,
}

impl CoxeterPresentation {
    pub fn size(&self) -> usize {
        self.faces.len()
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        self.gram[0][0].context()
    }

    pub fn entry(&self, i: usize, j: usize) -> &AlgebraicNumber {
        &self.gram[i][j]
    }

    /// Neighbours of each face in the diagram (nonzero off-diagonal entries).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let s = self.size();
        (0..s).map(|i| (0..s).filter(|&j| j != i && !self.gram[i][j].is_zero()).collect()).collect()
    }

    /// Gram matrix under the real embedding.
    pub fn gram_f64(&self) -> DMatrix<f64> {
        let s = self.size();
        DMatrix::from_fn(s, s, |i, j| self.gram[i][j].to_f64())
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .edges
            .iter()
            .map(|e| {
                let label = match &e.label {
                    EdgeLabel::Angle(k) => json!({ "angle_pi_over": k }),
                    EdgeLabel::Parallel => json!("parallel"),
                    EdgeLabel::Ultraparallel(c) => json!({ "cosh": c.to_json() }),
                };
                json!({ "i": e.i + 1, "j": e.j + 1, "label": label })
            })
            .collect();
        let gram: Vec<Value> =
            self.gram.iter().map(|row| Value::Array(row.iter().map(|x| x.to_json()).collect())).collect();
        let decimal: Vec<Value> = self
            .gram
            .iter()
            .map(|row| Value::Array(row.iter().map(|x| json!(format_decimal(x.to_f64()))).collect()))
            .collect();
        json!({
            "m": self.m,
            "n": self.n,
            "family": self.family.name(),
            "L": self.context().level(),
            "modulus": self.context().modulus().iter().map(crate::exact::bigint_json).collect::<Vec<_>>(),
            "faces": self.faces,
            "edges": edges,
            "gram": gram,
            "gram_decimal": decimal,
        })
    }
}

fn gram_from_edges(ctx: &Arc<FieldContext>, size: usize, edges: &[Edge]) -> Result<Matrix> {
    let mut g = vec![vec![AlgebraicNumber::zero(ctx); size]; size];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = AlgebraicNumber::from_int(ctx, 2);
    }
    for e in edges {
        let v = match &e.label {
            EdgeLabel::Angle(k) => embed_cos(ctx, *k)?.neg(),
            EdgeLabel::Parallel => AlgebraicNumber::from_int(ctx, -2),
            EdgeLabel::Ultraparallel(c) => c.scale_int(-2),
        };
        g[e.i][e.j] = v.clone();
        g[e.j][e.i] = v;
    }
    Ok(g)
}

fn face_names(s: usize) -> Vec<String> {
    (1..=s).map(|i| format!("F{i}")).collect()
}

fn diagram_edges(m: u64, n: u64) -> Vec<Edge> {
    vec![
        Edge { i: 0, j: 1, label: EdgeLabel::Angle(m) },
        Edge { i: 0, j: 2, label: EdgeLabel::Angle(n) },
        Edge { i: 1, j: 3, label: EdgeLabel::Parallel },
        Edge { i: 2, j: 4, label: EdgeLabel::Parallel },
    ]
}

/// `(C_{m,n}, C_{n,m}) = (cos(pi/m), cos(pi/n)) / sqrt(D)` with
/// `D = cos^2(pi/m) + cos^2(pi/n) - 1`, computed as `cos(pi/m) sqrt(1/D)`.
pub fn closed_form_c(ctx: &Arc<FieldContext>, m: u64, n: u64) -> Result<(AlgebraicNumber, AlgebraicNumber)> {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let cm = embed_cos(ctx, m)?.scale(&half);
    let cn = embed_cos(ctx, n)?.scale(&half);
    let d = &(&(&cm * &cm) + &(&cn * &cn)) - &AlgebraicNumber::one(ctx);
    if d.sign() != Ordering::Greater {
        return Err(Error::Geometry(format!("({m},{n}) is not hyperbolic: D <= 0")));
    }
    let root = adjoin_sqrt(&d.inverse()?)?;
    Ok((&cm * &root, &cn * &root))
}

/// The six-face polyhedron for hyperbolic `(m,n)`.
pub fn build_hyperbolic_presentation(m: u64, n: u64) -> Result<CoxeterPresentation> {
    let t = TilingType::new(m, n)?;
    if t.geometry != Geometry::Hyperbolic {
        return Err(Error::Geometry(format!("({m},{n}) is {}, not hyperbolic", t.geometry.name())));
    }
    let ctx = field_for(m, n)?;
    let (c_mn, c_nm) = closed_form_c(&ctx, m, n)?;
    let mut edges = diagram_edges(m, n);
    edges.push(Edge { i: 3, j: 5, label: EdgeLabel::Ultraparallel(c_mn) });
    edges.push(Edge { i: 4, j: 5, label: EdgeLabel::Ultraparallel(c_nm) });
    let gram = gram_from_edges(&ctx, 6, &edges)?;
    Ok(CoxeterPresentation { m, n, family: Family::Hyperbolic, faces: face_names(6), edges, gram })
}

/// The five-face polyhedron for spherical `(m,n)`; `F4` and `F5` meet at a
/// right angle.
pub fn build_spherical_presentation(m: u64, n: u64) -> Result<CoxeterPresentation> {
    let t = TilingType::new(m, n)?;
    if t.geometry != Geometry::Spherical {
        return Err(Error::Geometry(format!("({m},{n}) is {}, not spherical", t.geometry.name())));
    }
    let ctx = field_for(m, n)?;
    let edges = diagram_edges(m, n);
    let gram = gram_from_edges(&ctx, 5, &edges)?;
    Ok(CoxeterPresentation { m, n, family: Family::Spherical, faces: face_names(5), edges, gram })
}

/// The presentation for any type that has one.
pub fn build_presentation(m: u64, n: u64) -> Result<CoxeterPresentation> {
    match TilingType::new(m, n)?.geometry {
        Geometry::Hyperbolic => build_hyperbolic_presentation(m, n),
        Geometry::Spherical => build_spherical_presentation(m, n),
        Geometry::Euclidean => {
            Err(Error::Geometry(format!("({m},{n}) is euclidean: no Coxeter polyhedron is constructed")))
        }
    }
}

/// `det(H)` as a quadratic in the unknown entry, from exact values at 0, 1, 2.
#[derive(Clone, Debug)]
pub struct MinorQuadratic {
    pub c0: AlgebraicNumber,
    pub c1: AlgebraicNumber,
    pub c2: AlgebraicNumber,
}

fn minor_quadratic(base: &Matrix, unknown: (usize, usize), keep: &[usize]) -> MinorQuadratic {
    let ctx = Arc::clone(base[0][0].context());
    let eval = |x: i64| {
        let mut h = base.clone();
        h[unknown.0][unknown.1] = AlgebraicNumber::from_int(&ctx, x);
        h[unknown.1][unknown.0] = AlgebraicNumber::from_int(&ctx, x);
        matrix::minor(&h, keep, keep)
    };
    let (p0, p1, p2) = (eval(0), eval(1), eval(2));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let c2 = (&(&p2 - &p1.scale_int(2)) + &p0).scale(&half);
    let c1 = &(&p1 - &p0) - &c2;
    MinorQuadratic { c0: p0, c1, c2 }
}

/// Solve `det(H) = 0` for the ultraparallel entries.
///
/// `H` is the Gram matrix without `F5` (for `a46`) or without `F4` (for
/// `a56`); the unknown enters only squared, so `a^2 = -c0/c2` and
/// `C = sqrt(a^2)/2`.
pub fn solve_ultraparallel_by_minor(m: u64, n: u64) -> Result<(AlgebraicNumber, AlgebraicNumber)> {
    let t = TilingType::new(m, n)?;
    if t.geometry != Geometry::Hyperbolic {
        return Err(Error::Geometry(format!("({m},{n}) is not hyperbolic")));
    }
    let ctx = field_for(m, n)?;
    let base = gram_from_edges(&ctx, 6, &diagram_edges(m, n))?;
    let solve = |unknown: (usize, usize), keep: &[usize]| -> Result<AlgebraicNumber> {
        let q = minor_quadratic(&base, unknown, keep);
        if !q.c1.is_zero() {
            return Err(Error::Verification("det(H) has a linear term".into()));
        }
        if q.c2.is_zero() {
            return Err(Error::Verification("det(H) does not depend on the unknown".into()));
        }
        let a_sq = q.c0.checked_div(&q.c2)?.neg();
        if a_sq.sign() != Ordering::Greater {
            return Err(Error::Geometry(format!("({m},{n}): no real ultraparallel solution")));
        }
        let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
        Ok(adjoin_sqrt(&a_sq.scale(&quarter))?)
    };
    let c_mn = solve((3, 5), &[0, 1, 2, 3, 5])?;
    let c_nm = solve((4, 5), &[0, 1, 2, 4, 5])?;
    Ok((c_mn, c_nm))
}

/// Exact comparison of the minor solutions with the closed form.
pub fn c_values_agree(m: u64, n: u64) -> Result<bool> {
    let ctx = field_for(m, n)?;
    let (a, b) = solve_ultraparallel_by_minor(m, n)?;
    let (c, d) = closed_form_c(&ctx, m, n)?;
    Ok(a.same_value(&c)? && b.same_value(&d)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Signature {
    pub rank: usize,
    pub positive: usize,
    pub negative: usize,
}

fn sign_changes(signs: impl Iterator<Item = Ordering>) -> usize {
    let nonzero: Vec<Ordering> = signs.filter(|s| *s != Ordering::Equal).collect();
    nonzero.windows(2).filter(|w| w[0] != w[1]).count()
}

fn reverse(o: Ordering) -> Ordering {
    o.reverse()
}

/// Exact rank and signature, cross-checked numerically.
///
/// The characteristic polynomial of a symmetric matrix is real-rooted, so
/// Descartes' rule counts positive and negative eigenvalues exactly.
pub fn rank_and_signature(gram: &Matrix) -> Result<Signature> {
    let s = gram.len();
    let rank = matrix::rank(gram);
    let coeffs = matrix::characteristic_polynomial(gram);
    let signs: Vec<Ordering> = coeffs.iter().map(|c| c.sign()).collect();
    let zeros = signs.iter().position(|x| *x != Ordering::Equal).unwrap_or(s);
    if s - zeros != rank {
        return Err(Error::Verification(format!("rank {rank} but nullity {zeros} from the characteristic polynomial")));
    }
    let positive = sign_changes(signs.iter().copied());
    let negative =
        sign_changes(signs.iter().enumerate().map(|(k, &x)| if k % 2 == 1 { reverse(x) } else { x }));
    if positive + negative != rank {
        return Err(Error::Verification("characteristic polynomial is not real-rooted".into()));
    }
    let numeric = DMatrix::from_fn(s, s, |i, j| gram[i][j].to_f64());
    let eig = numeric.symmetric_eigen().eigenvalues;
    let np = eig.iter().filter(|&&x| x > EIGEN_TOLERANCE).count();
    let nn = eig.iter().filter(|&&x| x < -EIGEN_TOLERANCE).count();
    if np != positive || nn != negative {
        return Err(Error::Verification(format!(
            "exact signature ({positive},{negative}) disagrees with numeric ({np},{nn})"
        )));
    }
    Ok(Signature { rank, positive, negative })
}

/// `b_I` for a simple cycle `I` of the diagram (2-cycles included).
#[derive(Clone, Debug)]
pub struct CyclicProduct {
    pub faces: Vec<usize>,
    pub value: AlgebraicNumber,
}

/// All simple cycles, 2-cycles first, then by length and lexicographically.
/// Each cycle starts at its smallest face and runs towards the smaller of the
/// two neighbours.
pub fn simple_cycles(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let s = adj.len();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..s {
        for &j in &adj[i] {
            if j > i {
                out.push(vec![i, j]);
            }
        }
    }
    fn dfs(start: usize, adj: &[Vec<usize>], path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        for &next in &adj[last] {
            if next == start && path.len() >= 3 && path[1] < *path.last().unwrap() {
                out.push(path.clone());
            }
            if next > start && !on[next] {
                on[next] = true;
                path.push(next);
                dfs(start, adj, path, on, out);
                path.pop();
                on[next] = false;
            }
        }
    }
    let mut long = Vec::new();
    for start in 0..s {
        let mut on = vec![false; s];
        on[start] = true;
        dfs(start, adj, &mut vec![start], &mut on, &mut long);
    }
    long.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out.extend(long);
    out
}

pub fn enumerate_cyclic_products(p: &CoxeterPresentation) -> Vec<CyclicProduct> {
    simple_cycles(&p.adjacency())
        .into_iter()
        .map(|faces| {
            let k = faces.len();
            let mut value = AlgebraicNumber::one(p.context());
            for t in 0..k {
                value = &value * p.entry(faces[t], faces[(t + 1) % k]);
            }
            CyclicProduct { faces, value }
        })
        .collect()
}

/// Face relabeling `F2<->F3, F4<->F5` relating `(m,n)` and `(n,m)`.
pub fn swap_permutation(family: Family) -> Vec<usize> {
    match family {
        Family::Hyperbolic => vec![0, 2, 1, 4, 3, 5],
        Family::Spherical => vec![0, 2, 1, 4, 3],
    }
}

/// True when `a[perm[i]][perm[j]] = b[i][j]` exactly.
pub fn gram_equal_under(a: &Matrix, b: &Matrix, perm: &[usize]) -> bool {
    let s = a.len();
    b.len() == s && (0..s).all(|i| (0..s).all(|j| a[perm[i]][perm[j]] == b[i][j]))
}

/// The product recorded for the given cycle.
pub fn cycle_value<'a>(cycles: &'a [CyclicProduct], faces: &[usize]) -> Option<&'a AlgebraicNumber> {
    cycles.iter().find(|c| c.faces == faces).map(|c| &c.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn int(ctx: &Arc<FieldContext>, k: i64) -> AlgebraicNumber {
        AlgebraicNumber::from_int(ctx, k)
    }

    #[test]
    fn geometry_classes() {
        assert_eq!(geometry_of(5, 3), Geometry::Spherical);
        assert_eq!(geometry_of(4, 4), Geometry::Euclidean);
        assert_eq!(geometry_of(3, 6), Geometry::Euclidean);
        assert_eq!(geometry_of(7, 3), Geometry::Hyperbolic);
        assert!(TilingType::new(2, 7).is_err());
    }

    #[test]
    fn gram_64_entries() {
        let p = build_hyperbolic_presentation(6, 4).unwrap();
        let ctx = p.context().clone();
        let s3 = embed_cos(&ctx, 6).unwrap();
        let s2 = embed_cos(&ctx, 4).unwrap();
        assert_eq!(p.gram[0][1], s3.neg());
        assert_eq!(p.gram[0][2], s2.neg());
        assert_eq!(p.gram[1][3], int(&ctx, -2));
        assert_eq!(p.gram[3][5], s3.scale_int(-2));
        assert_eq!(p.gram[4][5], s2.scale_int(-2));
        assert!(p.gram[3][4].is_zero());
    }

    #[test]
    fn gram_66_entries_square_to_six() {
        let p = build_hyperbolic_presentation(6, 6).unwrap();
        let a = &p.gram[3][5];
        assert!(a.has_extension());
        assert_eq!(a.sign(), Ordering::Less);
        assert_eq!((a * a).is_rational(), Some(rational(6, 1)));
        assert_eq!(p.gram[3][5], p.gram[4][5]);
    }

    #[test]
    fn minor_solutions_match_closed_form() {
        for (m, n) in [(6, 4), (6, 6), (5, 4), (7, 3), (4, 5), (12, 5)] {
            assert!(c_values_agree(m, n).unwrap(), "({m},{n})");
        }
    }

    #[test]
    fn minor_solution_64() {
        let (a, b) = solve_ultraparallel_by_minor(6, 4).unwrap();
        let ctx = field_for(6, 4).unwrap();
        assert_eq!(a, embed_cos(&ctx, 6).unwrap());
        assert_eq!(b, embed_cos(&ctx, 4).unwrap());
    }

    #[test]
    fn signatures() {
        for (m, n) in [(6, 4), (6, 6), (7, 3)] {
            let p = build_hyperbolic_presentation(m, n).unwrap();
            assert_eq!(rank_and_signature(&p.gram).unwrap(), Signature { rank: 4, positive: 3, negative: 1 });
        }
        let p = build_spherical_presentation(5, 3).unwrap();
        assert_eq!(rank_and_signature(&p.gram).unwrap(), Signature { rank: 4, positive: 3, negative: 1 });
        let ctx = make_context(1).unwrap();
        let two_id: Matrix = (0..3)
            .map(|i| (0..3).map(|j| int(&ctx, if i == j { 2 } else { 0 })).collect())
            .collect();
        assert_eq!(rank_and_signature(&two_id).unwrap(), Signature { rank: 3, positive: 3, negative: 0 });
    }

    #[test]
    fn six_cycle_products() {
        for ((m, n), expect) in [((6, 4), 96), ((6, 6), 72)] {
            let p = build_hyperbolic_presentation(m, n).unwrap();
            let cycles = enumerate_cyclic_products(&p);
            let six: Vec<_> = cycles.iter().filter(|c| c.faces.len() == 6).collect();
            assert_eq!(six.len(), 1);
            assert_eq!(six[0].faces, vec![0, 1, 3, 5, 4, 2]);
            assert_eq!(six[0].value.is_rational(), Some(rational(expect, 1)));
            assert_eq!(cycles.iter().filter(|c| c.faces.len() == 2).count(), 6);
        }
    }

    #[test]
    fn cycles_of_a_square_with_diagonal() {
        let adj = vec![vec![1, 2, 3], vec![0, 2], vec![0, 1, 3], vec![0, 2]];
        let cycles = simple_cycles(&adj);
        let long: Vec<_> = cycles.iter().filter(|c| c.len() > 2).cloned().collect();
        assert_eq!(long, vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 1, 2, 3]]);
    }

    #[test]
    fn swap_symmetry() {
        let a = build_hyperbolic_presentation(7, 3).unwrap();
        let b = build_hyperbolic_presentation(3, 7).unwrap();
        assert!(gram_equal_under(&a.gram, &b.gram, &swap_permutation(Family::Hyperbolic)));
    }

    #[test]
    fn rejects_wrong_geometry() {
        assert!(matches!(build_hyperbolic_presentation(4, 4), Err(Error::Geometry(_))));
        assert!(matches!(build_spherical_presentation(6, 4), Err(Error::Geometry(_))));
        assert!(matches!(build_presentation(6, 3), Err(Error::Geometry(_))));
    }
}
