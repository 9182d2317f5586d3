//! Invariant trace fields `k(P)(sqrt(det G'(P)))` from path vectors.
//!
//! For a spanning tree of the diagram rooted at `F1`, face `F_r` gets the
//! coefficient `c_r`, the product of the Gram entries along the tree path
//! (`c_1 = a_11 = 2`). On four faces whose Gram submatrix is nonsingular,
//! `G'[i][j] = c_i c_j a_ij`.

use std::cmp::Ordering;
use std::collections::VecDeque;

use num_bigint::BigInt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::coxeter::{enumerate_cyclic_products, CoxeterPresentation};
use crate::exact::matrix::{self, Matrix};
use crate::exact::{bigint_json, format_decimal, rational_string, AlgebraicNumber};
use crate::{Error, Result};

const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// How the tree of paths from `F1` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathStrategy {
    /// Breadth-first, lowest index first.
    Bfs,
    RandomBfs(u64),
    RandomDfs(u64),
    RandomSpanningTree(u64),
}

/// How the four spanning faces are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisChoice {
    /// `{F1,F2,F3,F4}` when nonsingular, else the first nonsingular 4-set.
    Preferred,
    /// A uniformly shuffled search order over 4-sets.
    Random(u64),
}

#[derive(Clone, Debug)]
pub struct TraceFieldWorksheet {
    pub paths: Vec<Vec<usize>>,
    pub coefficients: Vec<AlgebraicNumber>,
    pub basis: Vec<usize>,
    pub gprime: Matrix,
}

impl TraceFieldWorksheet {
    pub fn to_json(&self) -> Value {
        json!({
            "paths": self.paths.iter().map(|p| p.iter().map(|f| f + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "coefficients": self.coefficients.iter().map(AlgebraicNumber::to_json).collect::<Vec<_>>(),
            "basis": self.basis.iter().map(|f| f + 1).collect::<Vec<_>>(),
            "gprime": self.gprime.iter().map(|r| r.iter().map(AlgebraicNumber::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

fn parents_to_paths(parent: &[Option<usize>]) -> Result<Vec<Vec<usize>>> {
    (0..parent.len())
        .map(|r| {
            let mut path = vec![r];
            let mut cur = r;
            while cur != 0 {
                cur = parent[cur].ok_or_else(|| Error::Structure(format!("diagram is disconnected at F{}", r + 1)))?;
                path.push(cur);
            }
            path.reverse();
            Ok(path)
        })
        .collect()
}

fn bfs_tree(adj: &[Vec<usize>], rng: Option<&mut ChaCha8Rng>) -> Vec<Option<usize>> {
    let s = adj.len();
    let mut parent = vec![None; s];
    let mut seen = vec![false; s];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    let mut rng = rng;
    while let Some(v) = queue.pop_front() {
        let mut nbrs = adj[v].clone();
        if let Some(r) = rng.as_deref_mut() {
            nbrs.shuffle(r);
        }
        for w in nbrs {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                queue.push_back(w);
            }
        }
    }
    parent
}

fn dfs_tree(adj: &[Vec<usize>], rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    let s = adj.len();
    let mut parent = vec![None; s];
    let mut seen = vec![false; s];
    fn visit(v: usize, adj: &[Vec<usize>], seen: &mut [bool], parent: &mut [Option<usize>], rng: &mut ChaCha8Rng) {
        seen[v] = true;
        let mut nbrs = adj[v].clone();
        nbrs.shuffle(rng);
        for w in nbrs {
            if !seen[w] {
                parent[w] = Some(v);
                visit(w, adj, seen, parent, rng);
            }
        }
    }
    visit(0, adj, &mut seen, &mut parent, rng);
    parent
}

fn random_spanning_tree(adj: &[Vec<usize>], rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    let s = adj.len();
    let mut edges: Vec<(usize, usize)> =
        (0..s).flat_map(|i| adj[i].iter().filter(move |&&j| j > i).map(move |&j| (i, j))).collect();
    edges.shuffle(rng);
    let mut root: Vec<usize> = (0..s).collect();
    fn find(root: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while root[x] != x {
            root[x] = root[root[x]];
            x = root[x];
        }
        x
    }
    let mut tree = vec![Vec::new(); s];
    for (a, b) in edges {
        let (ra, rb) = (find(&mut root, a), find(&mut root, b));
        if ra != rb {
            root[ra] = rb;
            tree[a].push(b);
            tree[b].push(a);
        }
    }
    bfs_tree(&tree, None)
}

fn choose_basis(gram: &Matrix, choice: BasisChoice) -> Result<Vec<usize>> {
    let s = gram.len();
    let nonsingular = |set: &[usize]| !matrix::minor(gram, set, set).is_zero();
    let mut candidates = matrix::subsets(s, 4);
    match choice {
        BasisChoice::Preferred => {}
        BasisChoice::Random(seed) => candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
    }
    candidates
        .into_iter()
        .find(|set| nonsingular(set))
        .ok_or_else(|| Error::Structure("no nonsingular set of four faces".into()))
}

pub fn build_worksheet(p: &CoxeterPresentation) -> Result<TraceFieldWorksheet> {
    build_worksheet_with(p, PathStrategy::Bfs, BasisChoice::Preferred)
}

pub fn build_worksheet_with(
    p: &CoxeterPresentation,
    strategy: PathStrategy,
    basis: BasisChoice,
) -> Result<TraceFieldWorksheet> {
    let adj = p.adjacency();
    let parent = match strategy {
        PathStrategy::Bfs => bfs_tree(&adj, None),
        PathStrategy::RandomBfs(seed) => bfs_tree(&adj, Some(&mut ChaCha8Rng::seed_from_u64(seed))),
        PathStrategy::RandomDfs(seed) => dfs_tree(&adj, &mut ChaCha8Rng::seed_from_u64(seed)),
        PathStrategy::RandomSpanningTree(seed) => random_spanning_tree(&adj, &mut ChaCha8Rng::seed_from_u64(seed)),
    };
    let paths = parents_to_paths(&parent)?;
    let coefficients: Vec<AlgebraicNumber> = paths
        .iter()
        .map(|path| {
            if path.len() == 1 {
                p.entry(0, 0).clone()
            } else {
                path.windows(2).fold(AlgebraicNumber::one(p.context()), |acc, w| &acc * p.entry(w[0], w[1]))
            }
        })
        .collect();
    let basis = choose_basis(&p.gram, basis)?;
    let gprime: Matrix = basis
        .iter()
        .map(|&i| basis.iter().map(|&j| &(&coefficients[i] * &coefficients[j]) * p.entry(i, j)).collect())
        .collect();
    Ok(TraceFieldWorksheet { paths, coefficients, basis, gprime })
}

/// `det G'`, which must be nonzero and negative.
pub fn gprime_determinant(w: &TraceFieldWorksheet) -> Result<AlgebraicNumber> {
    let det = matrix::determinant(&w.gprime);
    match det.sign() {
        Ordering::Less => Ok(det),
        Ordering::Equal => Err(Error::Verification("G' is singular".into())),
        Ordering::Greater => Err(Error::Verification("det G' is positive".into())),
    }
}

/// Squarefree part of a nonzero integer, sign kept.
///
/// Trial division to `10^6`. A cofactor with no prime factor below `10^6` is
/// dropped when it is a perfect square and kept otherwise; this is exact
/// below `10^18`, where such a cofactor has at most two prime factors.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    assert!(!n.is_zero(), "squarefree part of zero");
    let sign = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut rest = n.abs();
    let mut out = BigInt::one();
    let mut q: u64 = 2;
    while q <= TRIAL_DIVISION_LIMIT && BigInt::from(q) * BigInt::from(q) <= rest {
        let bq = BigInt::from(q);
        let mut e = 0;
        while (&rest % &bq).is_zero() {
            rest /= &bq;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &bq;
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        let r = rest.sqrt();
        if &r * &r != rest {
            out *= rest;
        }
    }
    sign * out
}

/// Squarefree `d` with `q = c^2 d` for rational `c`.
pub fn squarefree_of_rational(q: &BigRational) -> BigInt {
    squarefree_part(&(q.numer() * q.denom()))
}

/// `Q(sqrt(d))` or, when `k(P)` is not `Q`, the symbolic `k(P)(sqrt(det))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantField {
    Quadratic(BigInt),
    Symbolic,
}

/// Name of `Q(sqrt(d))`, written with `i` for negative `d`.
pub fn quadratic_field_name(d: &BigInt) -> String {
    if d.is_one() {
        "Q".into()
    } else if *d == BigInt::from(-1) {
        "Q(i)".into()
    } else if d.is_negative() {
        format!("Q(i*sqrt({}))", -d)
    } else {
        format!("Q(sqrt({d}))")
    }
}

#[derive(Clone, Debug)]
pub struct TraceFieldResult {
    pub kp_rational: bool,
    pub kp_generators: Vec<(Vec<usize>, AlgebraicNumber)>,
    pub worksheet: TraceFieldWorksheet,
    pub det: AlgebraicNumber,
    pub field: InvariantField,
}

impl TraceFieldResult {
    pub fn field_name(&self) -> String {
        match &self.field {
            InvariantField::Quadratic(d) => quadratic_field_name(d),
            InvariantField::Symbolic => format!("k(P)(sqrt({}))", format_decimal(self.det.to_f64())),
        }
    }

    pub fn to_json(&self) -> Value {
        let gens: Vec<Value> = self
            .kp_generators
            .iter()
            .map(|(faces, v)| {
                json!({
                    "faces": faces.iter().map(|f| f + 1).collect::<Vec<_>>(),
                    "value": v.to_json(),
                    "rational": v.is_rational().map(|q| json!(rational_string(&q))).unwrap_or(Value::Null),
                })
            })
            .collect();
        json!({
            "kP_rational": self.kp_rational,
            "kP_generators": gens,
            "worksheet": self.worksheet.to_json(),
            "det": self.det.to_json(),
            "squarefree": match &self.field {
                InvariantField::Quadratic(d) => bigint_json(d),
                InvariantField::Symbolic => Value::Null,
            },
            "field": self.field_name(),
        })
    }
}

pub fn invariant_trace_field(p: &CoxeterPresentation) -> Result<TraceFieldResult> {
    invariant_trace_field_with(p, PathStrategy::Bfs, BasisChoice::Preferred)
}

pub fn invariant_trace_field_with(
    p: &CoxeterPresentation,
    strategy: PathStrategy,
    basis: BasisChoice,
) -> Result<TraceFieldResult> {
    let worksheet = build_worksheet_with(p, strategy, basis)?;
    let det = gprime_determinant(&worksheet)?;
    let kp_generators: Vec<(Vec<usize>, AlgebraicNumber)> =
        enumerate_cyclic_products(p).into_iter().map(|c| (c.faces, c.value)).collect();
    let kp_rational = kp_generators.iter().all(|(_, v)| v.is_rational().is_some());
    let field = if kp_rational {
        let q = det
            .is_rational()
            .ok_or_else(|| Error::Verification("k(P) = Q but det G' is irrational".into()))?;
        InvariantField::Quadratic(squarefree_of_rational(&q))
    } else {
        InvariantField::Symbolic
    };
    Ok(TraceFieldResult { kp_rational, kp_generators, worksheet, det, field })
}

/// Small helper for tables: `d` as `i64` when it fits.
pub fn squarefree_i64(field: &InvariantField) -> Option<i64> {
    match field {
        InvariantField::Quadratic(d) => d.to_i64(),
        InvariantField::Symbolic => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{build_hyperbolic_presentation, build_spherical_presentation};
    use crate::exact::embed_cos;

    fn int(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn worksheet_64() {
        let p = build_hyperbolic_presentation(6, 4).unwrap();
        let w = build_worksheet(&p).unwrap();
        let ctx = p.context();
        let s3 = embed_cos(ctx, 6).unwrap();
        let s2 = embed_cos(ctx, 4).unwrap();
        assert_eq!(w.coefficients[0].is_rational(), Some(BigRational::from_integer(int(2))));
        assert_eq!(w.coefficients[1], s3.neg());
        assert_eq!(w.coefficients[2], s2.neg());
        assert_eq!(w.coefficients[3], s3.scale_int(2));
        assert_eq!(w.basis, vec![0, 1, 2, 3]);
        let expect = [[8, 6, 4, 0], [6, 6, 0, 12], [4, 0, 4, 0], [0, 12, 0, 24]];
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(w.gprime[i][j].is_rational(), Some(BigRational::from_integer(int(expect[i][j]))));
            }
        }
        let det = gprime_determinant(&w).unwrap();
        assert_eq!(det.is_rational(), Some(BigRational::from_integer(int(-3456))));
    }

    #[test]
    fn fields_64_66() {
        let r = invariant_trace_field(&build_hyperbolic_presentation(6, 4).unwrap()).unwrap();
        assert_eq!(r.field, InvariantField::Quadratic(int(-6)));
        assert_eq!(r.field_name(), "Q(i*sqrt(6))");
        let r = invariant_trace_field(&build_hyperbolic_presentation(6, 6).unwrap()).unwrap();
        assert_eq!(r.det.is_rational(), Some(BigRational::from_integer(int(-5184))));
        assert_eq!(r.field, InvariantField::Quadratic(int(-1)));
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&int(-4)), int(-1));
        assert_eq!(squarefree_part(&int(-3456)), int(-6));
        assert_eq!(squarefree_part(&int(-5184)), int(-1));
        assert_eq!(squarefree_part(&int(1)), int(1));
        let big_prime = int(1_000_003);
        assert_eq!(squarefree_part(&(&big_prime * &big_prime * 12)), int(3));
        let pq = int(1_000_003) * int(1_000_033);
        assert_eq!(squarefree_part(&pq), pq);
        assert_eq!(squarefree_of_rational(&BigRational::new(int(-3), int(8))), int(-6));
    }

    #[test]
    fn non_arithmetic_is_symbolic() {
        let r = invariant_trace_field(&build_hyperbolic_presentation(7, 3).unwrap()).unwrap();
        assert!(!r.kp_rational);
        assert_eq!(r.field, InvariantField::Symbolic);
        let r = invariant_trace_field(&build_spherical_presentation(5, 3).unwrap()).unwrap();
        assert_eq!(r.field, InvariantField::Symbolic);
    }

    #[test]
    fn path_strategies_agree() {
        for (m, n) in [(6, 4), (6, 6), (4, 6)] {
            let p = build_hyperbolic_presentation(m, n).unwrap();
            let base = invariant_trace_field(&p).unwrap().field;
            for seed in 0..8 {
                for s in [PathStrategy::RandomBfs(seed), PathStrategy::RandomDfs(seed), PathStrategy::RandomSpanningTree(seed)] {
                    let r = invariant_trace_field_with(&p, s, BasisChoice::Random(seed)).unwrap();
                    assert_eq!(r.field, base, "({m},{n}) {s:?}");
                }
            }
        }
    }
}
