//! Floating-point geometry in the hyperboloid model `<x,y> = x1y1 + x2y2 + x3y3 - x4y4`.
//!
//! Realizes Coxeter polyhedra from their Gram matrices, builds regular ideal
//! drums and Platonic cells in the Klein model, and checks horoball and basin
//! claims by sampling.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::coxeter::{geometry_of, CoxeterPresentation, EdgeLabel, Geometry};
use crate::exec::{self, Execution};
use crate::{Error, Result};

pub type Vec4 = Vector4<f64>;
pub type Vec3 = Vector3<f64>;

/// Default tolerance for angles, distances and inner products.
pub const TOLERANCE: f64 = 1e-9;
/// Samples this close to a symmetry plane are skipped.
pub const WALL_TOLERANCE: f64 = 1e-8;
const INCIDENCE_TOLERANCE: f64 = 1e-8;

pub fn inner(a: &Vec4, b: &Vec4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]
}

pub fn quadratic_form(a: &Vec4) -> f64 {
    inner(a, a)
}

/// `J = diag(1, 1, 1, -1)`.
pub fn form_matrix() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vec4::new(1.0, 1.0, 1.0, -1.0))
}

/// Hyperbolic distance between unit points, stable for nearby points:
/// `cosh d = 1 + q(x - y)/2`.
pub fn point_distance(x: &Vec4, y: &Vec4) -> f64 {
    let s = quadratic_form(&(x - y)).max(0.0);
    2.0 * (s.sqrt() / 2.0).asinh()
}

/// Signed distance from a unit point to the horoball `{<x,w> >= -1}`.
pub fn horoball_distance(x: &Vec4, w: &Vec4) -> f64 {
    (-inner(x, w)).ln()
}

/// Unit point of the hyperboloid over a Klein-model point.
pub fn klein_to_hyperboloid(y: &Vec3) -> Vec4 {
    let s = (1.0 - y.norm_squared()).sqrt();
    Vec4::new(y[0] / s, y[1] / s, y[2] / s, 1.0 / s)
}

/// Upper half-space coordinates `(u1, u2, h)` of a unit point.
pub fn hyperboloid_to_upper_half_space(x: &Vec4) -> Vec3 {
    let h = 1.0 / (x[3] - x[2]);
    Vec3::new(x[0] * h, x[1] * h, h)
}

/// A vector `v` with `<v,a> = <v,b> = <v,c> = 0`.
pub fn lorentz_orthogonal(a: &Vec4, b: &Vec4, c: &Vec4) -> Vec4 {
    let j = |v: &Vec4| Vec4::new(v[0], v[1], v[2], -v[3]);
    let rows = [j(a), j(b), j(c)];
    let mut out = Vec4::zeros();
    for k in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&c| c != k).collect();
        let m = Matrix3::from_fn(|r, c| rows[r][cols[c]]);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out[k] = sign * m.determinant();
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorKind {
    Point,
    Ideal,
    Normal,
}

/// A vector with its kind checked against `q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzVector {
    pub coords: Vec4,
    pub kind: VectorKind,
}

impl LorentzVector {
    pub fn new(coords: Vec4, kind: VectorKind) -> Result<Self> {
        let q = quadratic_form(&coords);
        let ok = match kind {
            VectorKind::Point => (q + 1.0).abs() < TOLERANCE && coords[3] > 0.0,
            VectorKind::Ideal => q.abs() < TOLERANCE && coords[3] > 0.0,
            VectorKind::Normal => (q - 1.0).abs() < TOLERANCE,
        };
        if !ok {
            return Err(Error::Geometry(format!("vector with q = {q} is not of kind {kind:?}")));
        }
        Ok(LorentzVector { coords, kind })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexClass {
    Finite,
    Ideal,
    UltraIdeal,
}

impl VertexClass {
    pub fn name(self) -> &'static str {
        match self {
            VertexClass::Finite => "finite",
            VertexClass::Ideal => "ideal",
            VertexClass::UltraIdeal => "ultra_ideal",
        }
    }
}

/// A vertex: unit point (finite), `x4 = 1` (ideal) or unit spacelike with
/// `x4 > 0` (ultra-ideal); `faces` lists every face through it.
#[derive(Clone, Debug)]
pub struct Vertex {
    pub point: Vec4,
    pub class: VertexClass,
    pub faces: Vec<usize>,
    /// `|p|^2 - 1` for the Klein point `p`.
    pub klein_q: f64,
}

#[derive(Clone, Debug)]
pub struct PolyhedronRealization {
    pub normals: Vec<Vec4>,
    pub vertices: Vec<Vertex>,
}

fn classify_ray(r: &Vec4) -> (VertexClass, Vec4, f64) {
    let kq = if r[3].abs() > 1e-12 {
        let k = r / r[3];
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2] - 1.0
    } else {
        f64::INFINITY
    };
    if kq.abs() < TOLERANCE {
        (VertexClass::Ideal, r / r[3], kq)
    } else if kq < 0.0 {
        let p = r / (-quadratic_form(r)).sqrt();
        (VertexClass::Finite, if p[3] < 0.0 { -p } else { p }, kq)
    } else {
        let p = r / quadratic_form(r).sqrt();
        (VertexClass::UltraIdeal, if p[3] < 0.0 { -p } else { p }, kq)
    }
}

/// Normals from `Gram/2 = N J N^T` and vertices from triples of faces.
///
/// A triple gives a vertex when one sign of its ray satisfies
/// `<v, e_l> <= 0` for every other face, ignoring the face polar to an
/// ultra-ideal ray (its truncation face).
pub fn realize_gram(gram: &DMatrix<f64>) -> Result<PolyhedronRealization> {
    let s = gram.nrows();
    let half = gram / 2.0;
    let eig = half.clone().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    let cut = TOLERANCE * scale.max(1.0);
    let pos: Vec<usize> = (0..s).filter(|&k| eig.eigenvalues[k] > cut).collect();
    let neg: Vec<usize> = (0..s).filter(|&k| eig.eigenvalues[k] < -cut).collect();
    if pos.len() != 3 || neg.len() != 1 {
        return Err(Error::Geometry(format!(
            "Gram matrix has signature ({},{}), not (3,1)",
            pos.len(),
            neg.len()
        )));
    }
    let cols = [pos[0], pos[1], pos[2], neg[0]];
    let mut normals: Vec<Vec4> = (0..s)
        .map(|i| Vec4::from_fn(|c, _| eig.eigenvectors[(i, cols[c])] * eig.eigenvalues[cols[c]].abs().sqrt()))
        .collect();

    let mut rays: Vec<(Vec4, VertexClass)> = Vec::new();
    for a in 0..s {
        for b in a + 1..s {
            for c in b + 1..s {
                let r = lorentz_orthogonal(&normals[a], &normals[b], &normals[c]);
                if r.norm() < 1e-9 {
                    continue;
                }
                let r = r / r.norm();
                let incident: Vec<bool> = normals.iter().map(|e| inner(&r, e).abs() < INCIDENCE_TOLERANCE).collect();
                let spacelike = quadratic_form(&r) > 0.0;
                let polar = |e: &Vec4| {
                    if !spacelike {
                        return false;
                    }
                    let rh = r / quadratic_form(&r).sqrt();
                    (e - rh).norm() < 1e-6 || (e + rh).norm() < 1e-6
                };
                let feasible = |sign: f64| {
                    (0..s).all(|l| incident[l] || polar(&normals[l]) || sign * inner(&r, &normals[l]) <= INCIDENCE_TOLERANCE)
                };
                let sign = match (feasible(1.0), feasible(-1.0)) {
                    (true, true) => r[3].signum(),
                    (true, false) => 1.0,
                    (false, true) => -1.0,
                    (false, false) => continue,
                };
                let ray = r * sign;
                if !rays.iter().any(|(v, _)| (v - ray).norm() < 1e-7) {
                    let (class, _, _) = classify_ray(&ray);
                    rays.push((ray, class));
                }
            }
        }
    }
    let timelike_down = rays
        .iter()
        .filter(|(_, c)| *c != VertexClass::UltraIdeal)
        .filter(|(v, _)| v[3] < 0.0)
        .count();
    let timelike_total = rays.iter().filter(|(_, c)| *c != VertexClass::UltraIdeal).count();
    if timelike_total > 0 && 2 * timelike_down > timelike_total {
        for e in normals.iter_mut() {
            e[3] = -e[3];
        }
        for (v, _) in rays.iter_mut() {
            v[3] = -v[3];
        }
    }
    // An ultra-ideal ray is a truncated vertex when its polar face only
    // meets the faces through it.
    let incident_faces = |r: &Vec4| -> Vec<usize> {
        (0..s).filter(|&l| inner(r, &normals[l]).abs() < INCIDENCE_TOLERANCE).collect()
    };
    let inside: Vec<Vec<usize>> = rays
        .iter()
        .filter(|(_, c)| *c != VertexClass::UltraIdeal)
        .map(|(r, _)| incident_faces(r))
        .collect();
    rays.retain(|(r, c)| {
        if *c != VertexClass::UltraIdeal {
            return true;
        }
        let rh = r / quadratic_form(r).sqrt();
        let Some(polar) = (0..s).find(|&l| (normals[l] - rh).norm() < 1e-6 || (normals[l] + rh).norm() < 1e-6) else {
            return false;
        };
        let own = incident_faces(r);
        let on_polar: Vec<&Vec<usize>> = inside.iter().filter(|f| f.contains(&polar)).collect();
        !on_polar.is_empty() && on_polar.iter().all(|f| f.iter().all(|l| *l == polar || own.contains(l)))
    });
    let vertices = rays
        .iter()
        .map(|(r, _)| {
            let (class, point, klein_q) = classify_ray(r);
            let faces = (0..s).filter(|&l| inner(r, &normals[l]).abs() < INCIDENCE_TOLERANCE).collect();
            Vertex { point, class, faces, klein_q }
        })
        .collect();
    Ok(PolyhedronRealization { normals, vertices })
}

pub fn realize(p: &CoxeterPresentation) -> Result<PolyhedronRealization> {
    realize_gram(&p.gram_f64())
}

/// One realized angle or distance against its label.
#[derive(Clone, Debug)]
pub struct AngleCheck {
    pub i: usize,
    pub j: usize,
    pub label: String,
    pub expected: f64,
    pub measured: f64,
}

impl AngleCheck {
    pub fn error(&self) -> f64 {
        (self.expected - self.measured).abs()
    }
}

impl PolyhedronRealization {
    /// `max |2<e_i,e_j> - G_ij|`.
    pub fn gram_error(&self, gram: &DMatrix<f64>) -> f64 {
        let s = self.normals.len();
        let mut err = 0.0f64;
        for i in 0..s {
            for j in 0..s {
                err = err.max((2.0 * inner(&self.normals[i], &self.normals[j]) - gram[(i, j)]).abs());
            }
        }
        err
    }

    pub fn count(&self, class: VertexClass) -> usize {
        self.vertices.iter().filter(|v| v.class == class).count()
    }

    /// Image under a linear isometry of the form.
    pub fn transformed(&self, t: &Matrix4<f64>) -> PolyhedronRealization {
        PolyhedronRealization {
            normals: self.normals.iter().map(|e| t * e).collect(),
            vertices: self
                .vertices
                .iter()
                .map(|v| Vertex { point: t * v.point, class: v.class, faces: v.faces.clone(), klein_q: v.klein_q })
                .collect(),
        }
    }

    /// Dihedral angles `acos(-<e_i,e_j>)` for angle labels and right angles,
    /// `-<e_i,e_j>` for parallel (1) and ultraparallel (`cosh l`) pairs.
    pub fn angle_checks(&self, p: &CoxeterPresentation) -> Vec<AngleCheck> {
        let s = p.size();
        let mut out = Vec::new();
        for i in 0..s {
            for j in i + 1..s {
                let ip = -inner(&self.normals[i], &self.normals[j]);
                let edge = p.edges.iter().find(|e| (e.i, e.j) == (i, j) || (e.i, e.j) == (j, i));
                let (label, expected, measured) = match edge.map(|e| &e.label) {
                    None => ("pi/2".to_string(), PI / 2.0, ip.clamp(-1.0, 1.0).acos()),
                    Some(EdgeLabel::Angle(k)) => (format!("pi/{k}"), PI / *k as f64, ip.clamp(-1.0, 1.0).acos()),
                    Some(EdgeLabel::Parallel) => ("parallel".to_string(), 1.0, ip),
                    Some(EdgeLabel::Ultraparallel(c)) => ("cosh".to_string(), c.to_f64(), ip),
                };
                out.push(AngleCheck { i, j, label, expected, measured });
            }
        }
        out
    }

    /// `max | |q(v)| |` over ideal vertices, and the smallest `q` over
    /// ultra-ideal ones.
    pub fn ideal_residual(&self) -> f64 {
        self.vertices
            .iter()
            .filter(|v| v.class == VertexClass::Ideal)
            .map(|v| quadratic_form(&v.point).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "normals": self.normals.iter().map(|e| e.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>(),
            "vertices": self.vertices.iter().map(|v| json!({
                "point": v.point.iter().copied().collect::<Vec<f64>>(),
                "class": v.class.name(),
                "faces": v.faces.iter().map(|f| f + 1).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// A random element of `O(3,1)` preserving the upper sheet, from
/// Gram-Schmidt in the indefinite form.
pub fn random_lorentz<R: Rng>(rng: &mut R) -> Matrix4<f64> {
    let x = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let t = Vec4::new(x[0], x[1], x[2], (1.0 + x.norm_squared()).sqrt());
    let mut basis: Vec<Vec4> = Vec::new();
    while basis.len() < 3 {
        let mut v = Vec4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        v += t * inner(&v, &t);
        for s in &basis {
            v -= s * inner(&v, s);
        }
        let q = quadratic_form(&v);
        if q > 1e-3 {
            basis.push(v / q.sqrt());
        }
    }
    Matrix4::from_columns(&[basis[0], basis[1], basis[2], t])
}

/// `(alpha_m, alpha_n)`, the interior angles of the two regular polygons of
/// a hyperbolic `[m,n,m,n]` tiling: `tan(alpha_m/2) = cos(pi/m)/cos(pi/n)`.
pub fn tiling_angles(m: u64, n: u64) -> Result<(f64, f64)> {
    if m < 3 || n < 3 || geometry_of(m, n) != Geometry::Hyperbolic {
        return Err(Error::Geometry(format!("({m},{n}) is not a hyperbolic tiling type")));
    }
    let am = 2.0 * ((PI / m as f64).cos() / (PI / n as f64).cos()).atan();
    Ok((am, PI - am))
}

/// Regular polygon data built directly in the hyperboloid.
#[derive(Clone, Copy, Debug)]
pub struct PolygonOracle {
    pub edge_length: f64,
    pub alpha_m: f64,
    pub alpha_n: f64,
}

fn polygon_vertex(k: u64, sides: u64, radius: f64) -> Vec4 {
    let th = 2.0 * PI * k as f64 / sides as f64;
    Vec4::new(radius.sinh() * th.cos(), radius.sinh() * th.sin(), 0.0, radius.cosh())
}

fn polygon_edge(sides: u64, radius: f64) -> f64 {
    point_distance(&polygon_vertex(0, sides, radius), &polygon_vertex(1, sides, radius))
}

/// Interior angle at `v1` of the regular polygon with circumradius `radius`.
fn polygon_angle(sides: u64, radius: f64) -> f64 {
    let v0 = polygon_vertex(0, sides, radius);
    let v1 = polygon_vertex(1, sides, radius);
    let v2 = polygon_vertex(2, sides, radius);
    let u = v0 + v1 * inner(&v0, &v1);
    let w = v2 + v1 * inner(&v2, &v1);
    (inner(&u, &w) / (quadratic_form(&u) * quadratic_form(&w)).sqrt()).clamp(-1.0, 1.0).acos()
}

fn bisect<F: Fn(f64) -> bool>(mut lo: f64, mut hi: f64, below: F) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn radius_for_edge(sides: u64, edge: f64) -> f64 {
    bisect(0.0, 40.0, |r| polygon_edge(sides, r) < edge)
}

/// Find the common edge length at which the angles of the regular `m`-gon
/// and `n`-gon sum to `pi`, by nested bisection on circumradii.
pub fn polygon_oracle(m: u64, n: u64) -> Result<PolygonOracle> {
    tiling_angles(m, n)?;
    let sum = |s: f64| polygon_angle(m, radius_for_edge(m, s)) + polygon_angle(n, radius_for_edge(n, s));
    let edge = bisect(1e-9, 30.0, |s| sum(s) > PI);
    Ok(PolygonOracle {
        edge_length: edge,
        alpha_m: polygon_angle(m, radius_for_edge(m, edge)),
        alpha_n: polygon_angle(n, radius_for_edge(n, edge)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellKind {
    Tetrahedron,
    Octahedron,
    /// The regular ideal `n`-drum of the `[m,n,m,n]` tiling.
    Drum { m: u64, n: u64 },
}

impl CellKind {
    pub fn name(&self) -> String {
        match self {
            CellKind::Tetrahedron => "tetrahedron".into(),
            CellKind::Octahedron => "octahedron".into(),
            CellKind::Drum { m, n } => format!("drum({n}) of [{m},{n},{m},{n}]"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CellFace {
    /// Outward unit normal: the cell is `<x, normal> <= 0`.
    pub normal: Vec4,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CellEdge {
    pub a: usize,
    pub b: usize,
    pub faces: (usize, usize),
    pub dihedral: f64,
}

/// An ideal polyhedron in the Klein model with one horoball per vertex.
#[derive(Clone, Debug)]
pub struct IdealCell {
    pub kind: CellKind,
    pub points: Vec<Vec3>,
    pub faces: Vec<CellFace>,
    pub edges: Vec<CellEdge>,
    /// Common scale `t` of the horoball vectors `t (p_i, 1)`.
    pub horoball_scale: f64,
    pub horoballs: Vec<Vec4>,
}

fn ideal_vector(p: &Vec3) -> Vec4 {
    Vec4::new(p[0], p[1], p[2], 1.0)
}

impl IdealCell {
    /// Build from ideal points and faces given as vertex cycles. Horoballs
    /// share one scale, chosen so the closest pair is tangent.
    pub fn new(kind: CellKind, points: Vec<Vec3>, face_cycles: Vec<Vec<usize>>) -> Result<IdealCell> {
        for p in &points {
            if (p.norm() - 1.0).abs() > TOLERANCE {
                return Err(Error::Geometry("cell vertex is not on the sphere at infinity".into()));
            }
        }
        let mut faces = Vec::new();
        for cyc in face_cycles {
            let [a, b, c] = [cyc[0], cyc[1], cyc[2]].map(|i| ideal_vector(&points[i]));
            let mut nrm = lorentz_orthogonal(&a, &b, &c);
            nrm /= quadratic_form(&nrm).sqrt();
            if nrm[3] < 0.0 {
                nrm = -nrm;
            }
            for &v in &cyc {
                if inner(&ideal_vector(&points[v]), &nrm).abs() > TOLERANCE {
                    return Err(Error::Geometry("face vertices are not coplanar".into()));
                }
            }
            faces.push(CellFace { normal: nrm, vertices: cyc });
        }
        let mut edges: Vec<CellEdge> = Vec::new();
        for (fi, f) in faces.iter().enumerate() {
            let k = f.vertices.len();
            for t in 0..k {
                let (a, b) = (f.vertices[t], f.vertices[(t + 1) % k]);
                let (a, b) = (a.min(b), a.max(b));
                if edges.iter().any(|e| (e.a, e.b) == (a, b)) {
                    continue;
                }
                let other = faces.iter().enumerate().find(|(gi, g)| {
                    *gi != fi && {
                        let kk = g.vertices.len();
                        (0..kk).any(|s| {
                            let (x, y) = (g.vertices[s], g.vertices[(s + 1) % kk]);
                            (x, y) == (b, a) || (x, y) == (a, b)
                        })
                    }
                });
                let Some((gi, g)) = other else {
                    return Err(Error::Geometry("edge with a single face".into()));
                };
                let dihedral = (-inner(&f.normal, &g.normal)).clamp(-1.0, 1.0).acos();
                edges.push(CellEdge { a, b, faces: (fi, gi), dihedral });
            }
        }
        let closest = (0..points.len())
            .flat_map(|i| (i + 1..points.len()).map(move |j| (i, j)))
            .map(|(i, j)| points[i].dot(&points[j]))
            .fold(f64::NEG_INFINITY, f64::max);
        let horoball_scale = (2.0 / (1.0 - closest)).sqrt();
        let horoballs = points.iter().map(|p| ideal_vector(p) * horoball_scale).collect();
        Ok(IdealCell { kind, points, faces, edges, horoball_scale, horoballs })
    }

    pub fn contains(&self, y: &Vec3) -> bool {
        let x = Vec4::new(y[0], y[1], y[2], 1.0);
        self.faces.iter().all(|f| inner(&x, &f.normal) < 0.0)
    }

    /// Largest deviation from `pi` of the dihedral angles at a vertex.
    pub fn link_angle_error(&self) -> f64 {
        (0..self.points.len())
            .map(|v| {
                let s: f64 = self.edges.iter().filter(|e| e.a == v || e.b == v).map(|e| e.dihedral).sum();
                (s - PI).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Unit normals of the Euclidean mirror planes through the origin that
    /// permute the vertices, one per plane.
    pub fn mirrors(&self) -> Vec<Vec3> {
        let mut out: Vec<Vec3> = Vec::new();
        let n = self.points.len();
        for i in 0..n {
            for j in i + 1..n {
                let d = self.points[i] - self.points[j];
                let u = d / d.norm();
                let refl = |p: &Vec3| p - u * (2.0 * p.dot(&u));
                if self.permutes(&refl) && !out.iter().any(|v| (v - u).norm() < 1e-9 || (v + u).norm() < 1e-9) {
                    out.push(u);
                }
            }
        }
        out
    }

    /// Largest matching error when `map` permutes the vertex set, or
    /// infinity when it does not.
    pub fn permutation_error<F: Fn(&Vec3) -> Vec3>(&self, map: &F) -> f64 {
        let n = self.points.len();
        let mut used = vec![false; n];
        let mut worst = 0.0f64;
        for p in &self.points {
            let q = map(p);
            let best = (0..n)
                .filter(|&k| !used[k])
                .map(|k| (k, (self.points[k] - q).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((k, d)) if d < 1e-6 => {
                    used[k] = true;
                    worst = worst.max(d);
                }
                _ => return f64::INFINITY,
            }
        }
        worst
    }

    fn permutes<F: Fn(&Vec3) -> Vec3>(&self, map: &F) -> bool {
        self.permutation_error(map) < TOLERANCE
    }

    /// Distances `log(-<x,w_i>)` from the unit point over `y`.
    pub fn horoball_distances(&self, y: &Vec3) -> Vec<f64> {
        let x = klein_to_hyperboloid(y);
        self.horoballs.iter().map(|w| horoball_distance(&x, w)).collect()
    }

    pub fn nearest_horoball(&self, y: &Vec3) -> usize {
        let d = self.horoball_distances(y);
        (0..d.len()).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap()
    }

    /// `log(-<w_i,w_j>/2)`: zero for tangent horoballs.
    pub fn horoball_gap(&self, i: usize, j: usize) -> f64 {
        (-inner(&self.horoballs[i], &self.horoballs[j]) / 2.0).ln()
    }
}

/// Foot of the perpendicular from the ideal point `k` to the geodesic
/// `ij`: `e^{2s} = <w_j,w_k>/<w_i,w_k>` along `(e^s w_i + e^-s w_j)/sqrt(-2<w_i,w_j>)`.
pub fn perpendicular_foot(wi: &Vec4, wj: &Vec4, wk: &Vec4) -> Vec4 {
    let e2s = inner(wj, wk) / inner(wi, wk);
    let es = e2s.sqrt();
    (wi * es + wj / es) / (-2.0 * inner(wi, wj)).sqrt()
}

/// Horoball tangency data for one edge.
#[derive(Clone, Debug)]
pub struct TangencyCheck {
    pub edge: (usize, usize),
    /// `log(-<w_i,w_j>/2)`.
    pub gap: f64,
    /// Distance from the tangency point `(w_i+w_j)/2` to the feet of the
    /// perpendiculars from the opposite vertices of both adjacent faces.
    pub midpoint_offset: f64,
    /// `|log(-<x,w>)|` at the tangency point for both horoballs.
    pub boundary_offset: f64,
}

pub fn tangency_checks(cell: &IdealCell) -> Vec<TangencyCheck> {
    cell.edges
        .iter()
        .map(|e| {
            let (wi, wj) = (cell.horoballs[e.a], cell.horoballs[e.b]);
            let x = (wi + wj) / 2.0;
            let mut offset = 0.0f64;
            for f in [e.faces.0, e.faces.1] {
                for &k in &cell.faces[f].vertices {
                    if k != e.a && k != e.b {
                        let foot = perpendicular_foot(&wi, &wj, &cell.horoballs[k]);
                        offset = offset.max(point_distance(&x, &foot));
                    }
                }
            }
            let boundary = horoball_distance(&x, &wi).abs().max(horoball_distance(&x, &wj).abs());
            TangencyCheck { edge: (e.a, e.b), gap: cell.horoball_gap(e.a, e.b), midpoint_offset: offset, boundary_offset: boundary }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlatonicKind {
    Tetrahedron,
    Octahedron,
}

/// Regular ideal tetrahedron or octahedron centred at the origin.
pub fn build_platonic_cell(kind: PlatonicKind) -> Result<IdealCell> {
    match kind {
        PlatonicKind::Tetrahedron => {
            let s = 1.0 / 3f64.sqrt();
            let points = vec![
                Vec3::new(s, s, s),
                Vec3::new(s, -s, -s),
                Vec3::new(-s, s, -s),
                Vec3::new(-s, -s, s),
            ];
            let faces = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
            IdealCell::new(CellKind::Tetrahedron, points, faces)
        }
        PlatonicKind::Octahedron => {
            let points = vec![
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(-1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(0.0, -1.0, 0.0),
                Vec3::new(0.0, 0.0, 1.0),
                Vec3::new(0.0, 0.0, -1.0),
            ];
            let mut faces = Vec::new();
            for sx in [0, 1] {
                for sy in [2, 3] {
                    for sz in [4, 5] {
                        faces.push(vec![sx, sy, sz]);
                    }
                }
            }
            IdealCell::new(CellKind::Octahedron, points, faces)
        }
    }
}

#[derive(Clone, Debug)]
pub struct DrumGeometry {
    pub m: u64,
    pub n: u64,
    /// `(alpha_m, alpha_n)` of the tiling.
    pub tiling_angles: (f64, f64),
    /// Height `z` of the bases in the Klein model; base circle radius is
    /// `sqrt(1 - z^2)`.
    pub height: f64,
    pub base_lateral: f64,
    pub lateral_lateral: f64,
    pub cell: IdealCell,
}

/// Base-lateral dihedral angle of the regular ideal `n`-prism with base
/// height `z`: `cos t = z cos(pi/n) / sqrt(1 - (1 - z^2) cos^2(pi/n))`.
pub fn prism_base_lateral(n: u64, z: f64) -> f64 {
    let c = (PI / n as f64).cos();
    (z * c / (1.0 - (1.0 - z * z) * c * c).sqrt()).acos()
}

/// Base height giving base-lateral angle `theta`, or `None` when no regular
/// ideal `n`-prism has that angle (it must lie in `(pi/n, pi/2)`).
pub fn prism_height_for(n: u64, theta: f64) -> Option<f64> {
    let z = (PI / n as f64).tan() / theta.tan();
    (theta > 0.0 && theta < PI / 2.0 && z > 0.0 && z < 1.0).then_some(z)
}

/// The regular ideal `n`-drum of the `[m,n,m,n]` tiling: lateral faces meet
/// at the polygon angle `alpha_n`, bases meet lateral faces at
/// `(pi - alpha_n)/2 = alpha_m/2`.
pub fn build_drum(m: u64, n: u64) -> Result<DrumGeometry> {
    let (am, an) = tiling_angles(m, n)?;
    let theta = am / 2.0;
    let z = prism_height_for(n, theta)
        .ok_or_else(|| Error::Geometry(format!("no regular ideal {n}-drum with base angle {theta}")))?;
    let r = (1.0 - z * z).sqrt();
    let nn = n as usize;
    let mut points = Vec::with_capacity(2 * nn);
    for sign in [1.0, -1.0] {
        for k in 0..nn {
            let th = 2.0 * PI * k as f64 / n as f64;
            points.push(Vec3::new(r * th.cos(), r * th.sin(), sign * z));
        }
    }
    let mut faces = vec![(0..nn).collect::<Vec<_>>(), (nn..2 * nn).collect::<Vec<_>>()];
    for k in 0..nn {
        let k1 = (k + 1) % nn;
        faces.push(vec![k, k1, nn + k1, nn + k]);
    }
    let cell = IdealCell::new(CellKind::Drum { m, n }, points, faces)?;
    let dihedral = |f: usize, g: usize| (-inner(&cell.faces[f].normal, &cell.faces[g].normal)).clamp(-1.0, 1.0).acos();
    let base_lateral = dihedral(0, 2);
    let lateral_lateral = dihedral(2, 3);
    Ok(DrumGeometry { m, n, tiling_angles: (am, an), height: z, base_lateral, lateral_lateral, cell })
}

impl DrumGeometry {
    /// The `4n` base-preserving symmetries: rotations, vertical reflections
    /// and their compositions with the base swap.
    pub fn symmetries(&self) -> Vec<Matrix3<f64>> {
        let n = self.n as usize;
        let swap = Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        let flip = Matrix3::from_diagonal(&Vec3::new(1.0, -1.0, 1.0));
        let mut out = Vec::with_capacity(4 * n);
        for k in 0..n {
            let th = 2.0 * PI * k as f64 / n as f64;
            let rot = Matrix3::new(th.cos(), -th.sin(), 0.0, th.sin(), th.cos(), 0.0, 0.0, 0.0, 1.0);
            for g in [rot, rot * flip] {
                out.push(g);
                out.push(swap * g);
            }
        }
        out
    }

    /// Largest vertex-matching error over the `4n` symmetries, each also
    /// checked to preserve the form.
    pub fn symmetry_error(&self) -> f64 {
        let j = form_matrix();
        self.symmetries()
            .iter()
            .map(|g| {
                let mut l = Matrix4::identity();
                l.fixed_view_mut::<3, 3>(0, 0).copy_from(g);
                let form_err = (l.transpose() * j * l - j).abs().max();
                self.cell.permutation_error(&|p: &Vec3| g * p).max(form_err)
            })
            .fold(0.0, f64::max)
    }
}

/// Sampling report for one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalCheckReport {
    pub cell: String,
    pub samples: usize,
    pub drawn: usize,
    pub violations: usize,
    pub skipped: usize,
    pub wall_crossings: usize,
    /// Largest distance from a located basin wall point to the nearest
    /// symmetry plane.
    pub max_margin_at_walls: f64,
    /// Spread of horoball distances at the centre of the cell.
    pub center_spread: f64,
    pub tolerance: f64,
    pub seed: u64,
}

impl CanonicalCheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0 && self.max_margin_at_walls < WALL_TOLERANCE && self.center_spread < TOLERANCE
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cell": self.cell,
            "samples": self.samples,
            "drawn": self.drawn,
            "violations": self.violations,
            "skipped": self.skipped,
            "wall_crossings": self.wall_crossings,
            "max_margin_at_walls": self.max_margin_at_walls,
            "center_spread": self.center_spread,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "passed": self.passed(),
        })
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

/// Halton points in `[-1,1]^3` with a seeded Cranley-Patterson shift,
/// kept when inside the cell, until `samples` are accepted.
pub fn sample_cell(cell: &IdealCell, samples: usize, seed: u64) -> (Vec<Vec3>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
    let mut out = Vec::with_capacity(samples);
    let mut i = 0u64;
    while out.len() < samples {
        i += 1;
        let c = [2u64, 3, 5].map(|b| radical_inverse(i, b));
        let y = Vec3::from_fn(|k, _| 2.0 * (c[k] + shift[k]).fract() - 1.0);
        if cell.contains(&y) {
            out.push(y);
        }
    }
    (out, i as usize)
}

struct BasinModel {
    mirrors: Vec<Vec3>,
    /// For each vertex, the mirrors moving it and the side it lies on.
    sides: Vec<Vec<(usize, bool)>>,
}

impl BasinModel {
    fn new(cell: &IdealCell) -> BasinModel {
        let mirrors = cell.mirrors();
        let sides = cell
            .points
            .iter()
            .map(|p| {
                mirrors
                    .iter()
                    .enumerate()
                    .filter(|(_, u)| u.dot(p).abs() > 1e-9)
                    .map(|(k, u)| (k, u.dot(p) > 0.0))
                    .collect()
            })
            .collect();
        BasinModel { mirrors, sides }
    }

    fn wall_distance(&self, y: &Vec3) -> f64 {
        self.mirrors.iter().map(|u| u.dot(y).abs()).fold(f64::INFINITY, f64::min)
    }

    /// The vertex whose chamber of mirrors contains `y`.
    fn predicted(&self, y: &Vec3) -> Option<usize> {
        let hits: Vec<usize> = (0..self.sides.len())
            .filter(|&v| self.sides[v].iter().all(|&(k, pos)| (self.mirrors[k].dot(y) > 0.0) == pos))
            .collect();
        (hits.len() == 1).then(|| hits[0])
    }
}

/// Check that the nearest horoball of every sample is the vertex whose
/// mirror chamber contains it, and that basin walls lie on mirrors.
pub fn verify_basins(cell: &IdealCell, samples: usize, seed: u64, exec: Execution) -> CanonicalCheckReport {
    let model = BasinModel::new(cell);
    let (points, drawn) = sample_cell(cell, samples, seed);
    let classified: Vec<(usize, bool, bool)> = exec::map(exec, &points, |y| {
        let nearest = cell.nearest_horoball(y);
        let skipped = model.wall_distance(y) < WALL_TOLERANCE;
        let violation = !skipped && model.predicted(y) != Some(nearest);
        (nearest, skipped, violation)
    });
    let skipped = classified.iter().filter(|c| c.1).count();
    let violations = classified.iter().filter(|c| c.2).count();
    let kept: Vec<usize> = (0..points.len()).filter(|&k| !classified[k].1).collect();
    let pairs: Vec<(usize, usize)> = kept
        .windows(2)
        .filter(|w| classified[w[0]].0 != classified[w[1]].0)
        .map(|w| (w[0], w[1]))
        .collect();
    let margins = exec::map(exec, &pairs, |&(a, b)| {
        let (pa, pb) = (points[a], points[b]);
        let start = classified[a].0;
        let t = bisect(0.0, 1.0, |t| cell.nearest_horoball(&(pa + (pb - pa) * t)) == start);
        model.wall_distance(&(pa + (pb - pa) * t))
    });
    let max_margin_at_walls = margins.iter().copied().fold(0.0, f64::max);
    let center = cell.horoball_distances(&Vec3::zeros());
    let center_spread = center.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - center.iter().copied().fold(f64::INFINITY, f64::min);
    CanonicalCheckReport {
        cell: cell.kind.name(),
        samples: points.len(),
        drawn,
        violations,
        skipped,
        wall_crossings: pairs.len(),
        max_margin_at_walls,
        center_spread,
        tolerance: TOLERANCE,
        seed,
    }
}

/// Angle sums around the two edge classes of the drum decomposition:
/// base edges carry four base-lateral angles of each drum, lateral edges
/// two lateral-lateral angles of each.
#[derive(Clone, Copy, Debug)]
pub struct GluingCheck {
    pub m: u64,
    pub n: u64,
    pub base_edge_sum: f64,
    pub lateral_edge_sum: f64,
}

impl GluingCheck {
    pub fn error(&self) -> f64 {
        (self.base_edge_sum - 2.0 * PI).abs().max((self.lateral_edge_sum - 2.0 * PI).abs())
    }

    pub fn passed(&self) -> bool {
        self.error() < TOLERANCE
    }
}

pub fn verify_gluing_angles(m: u64, n: u64) -> Result<GluingCheck> {
    let dn = build_drum(m, n)?;
    let dm = build_drum(n, m)?;
    Ok(GluingCheck {
        m,
        n,
        base_edge_sum: 4.0 * dn.base_lateral + 4.0 * dm.base_lateral,
        lateral_edge_sum: 2.0 * dn.lateral_lateral + 2.0 * dm.lateral_lateral,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{build_hyperbolic_presentation, build_spherical_presentation};

    #[test]
    fn lorentz_orthogonal_is_orthogonal() {
        let a = Vec4::new(1.0, 0.2, 0.3, 0.5);
        let b = Vec4::new(0.1, 1.0, -0.4, 0.2);
        let c = Vec4::new(-0.3, 0.2, 1.0, 0.7);
        let v = lorentz_orthogonal(&a, &b, &c);
        for w in [a, b, c] {
            assert!(inner(&v, &w).abs() < 1e-14);
        }
    }

    #[test]
    fn realize_64() {
        let p = build_hyperbolic_presentation(6, 4).unwrap();
        let r = realize(&p).unwrap();
        assert!(r.gram_error(&p.gram_f64()) < 1e-12);
        assert_eq!(r.count(VertexClass::Ideal), 1);
        assert_eq!(r.count(VertexClass::UltraIdeal), 1);
        assert_eq!(r.count(VertexClass::Finite), 6);
        let ideal = r.vertices.iter().find(|v| v.class == VertexClass::Ideal).unwrap();
        assert_eq!(ideal.faces, vec![1, 2, 3, 4]);
        let ultra = r.vertices.iter().find(|v| v.class == VertexClass::UltraIdeal).unwrap();
        assert_eq!(ultra.faces, vec![0, 1, 2]);
        assert!(quadratic_form(&ultra.point) > 0.0);
        for c in r.angle_checks(&p) {
            assert!(c.error() < 1e-9, "{c:?}");
        }
    }

    #[test]
    fn realize_53() {
        let p = build_spherical_presentation(5, 3).unwrap();
        let r = realize(&p).unwrap();
        assert_eq!(r.count(VertexClass::Ideal), 1);
        assert_eq!(r.count(VertexClass::Finite), 4);
        assert_eq!(r.count(VertexClass::UltraIdeal), 0);
    }

    #[test]
    fn lorentz_transforms_preserve_the_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let j = form_matrix();
        for _ in 0..20 {
            let l = random_lorentz(&mut rng);
            assert!((l.transpose() * j * l - j).abs().max() < 1e-10);
            assert!(l[(3, 3)] > 0.0);
        }
    }

    #[test]
    fn tiling_angles_66_and_swap() {
        let (a, b) = tiling_angles(6, 6).unwrap();
        assert_eq!(a, PI / 2.0);
        assert_eq!(b, PI / 2.0);
        let (a, b) = tiling_angles(6, 4).unwrap();
        let (c, d) = tiling_angles(4, 6).unwrap();
        assert!((a - d).abs() < 1e-15 && (b - c).abs() < 1e-15);
        assert!((a - 1.7721542475852274).abs() < 1e-12);
        assert!(tiling_angles(4, 4).is_err());
    }

    #[test]
    fn polygon_oracle_agrees() {
        for (m, n) in [(6, 4), (7, 3), (5, 5)] {
            let o = polygon_oracle(m, n).unwrap();
            let (am, an) = tiling_angles(m, n).unwrap();
            assert!((o.alpha_m - am).abs() < 1e-10, "({m},{n})");
            assert!((o.alpha_n - an).abs() < 1e-10);
        }
    }

    #[test]
    fn literal_half_angle_reading_has_no_44_drum() {
        let (_, a4) = tiling_angles(6, 4).unwrap();
        assert!(prism_height_for(4, a4 / 2.0).is_none());
        assert!(prism_height_for(4, (PI - a4) / 2.0).is_some());
    }

    #[test]
    fn drums() {
        let d = build_drum(6, 6).unwrap();
        assert!((d.base_lateral - PI / 4.0).abs() < 1e-12);
        assert!((d.lateral_lateral - PI / 2.0).abs() < 1e-12);
        let d = build_drum(6, 4).unwrap();
        let (a6, a4) = d.tiling_angles;
        assert!((d.base_lateral - a6 / 2.0).abs() < 1e-12);
        assert!((d.lateral_lateral - a4).abs() < 1e-12);
        assert!(d.cell.link_angle_error() < 1e-12);
        assert_eq!(d.symmetries().len(), 16);
        assert!(d.symmetry_error() < 1e-12);
        assert!((prism_base_lateral(4, d.height) - d.base_lateral).abs() < 1e-12);
    }

    #[test]
    fn platonic_cells() {
        let t = build_platonic_cell(PlatonicKind::Tetrahedron).unwrap();
        assert_eq!(t.edges.len(), 6);
        assert!(t.edges.iter().all(|e| (e.dihedral - PI / 3.0).abs() < 1e-12));
        let o = build_platonic_cell(PlatonicKind::Octahedron).unwrap();
        assert_eq!(o.edges.len(), 12);
        assert!(o.edges.iter().all(|e| (e.dihedral - PI / 2.0).abs() < 1e-12));
        for cell in [t, o] {
            for c in tangency_checks(&cell) {
                assert!(c.gap.abs() < 1e-12 && c.midpoint_offset < 1e-9 && c.boundary_offset < 1e-12, "{c:?}");
            }
        }
    }

    #[test]
    fn horoball_formula_matches_half_space() {
        // Horoball at xi with Euclidean diameter D; the nearest point of its
        // boundary lies in the vertical plane through xi and the sample.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let xi = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0);
            let dia: f64 = rng.gen_range(0.2..1.5);
            let w = Vec4::new(2.0 * xi[0], 2.0 * xi[1], xi.norm_squared() - 1.0, xi.norm_squared() + 1.0) / dia;
            let u = Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(0.05..0.3));
            let x = {
                let a = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
                Vec4::new(u[0] / u[2], u[1] / u[2], (a - 1.0) / (2.0 * u[2]), (a + 1.0) / (2.0 * u[2]))
            };
            assert!((quadratic_form(&x) + 1.0).abs() < 1e-9);
            let back = hyperboloid_to_upper_half_space(&x);
            assert!((back - u).norm() < 1e-9);
            let dir = {
                let d = Vec3::new(u[0] - xi[0], u[1] - xi[1], 0.0);
                if d.norm() > 0.0 { d / d.norm() } else { Vec3::new(1.0, 0.0, 0.0) }
            };
            let dist_to = |phi: f64| {
                let c = Vec3::new(xi[0], xi[1], dia / 2.0);
                let q = c + dir * (dia / 2.0 * phi.sin()) - Vec3::new(0.0, 0.0, dia / 2.0 * phi.cos());
                let cosh = 1.0 + (q - u).norm_squared() / (2.0 * q[2] * u[2]);
                cosh.acosh()
            };
            let mut best = (0.0, f64::INFINITY);
            for k in 1..2000 {
                let phi = -PI + 2.0 * PI * k as f64 / 2000.0;
                let d = dist_to(phi);
                if d < best.1 {
                    best = (phi, d);
                }
            }
            let (mut lo, mut hi) = (best.0 - 0.01, best.0 + 0.01);
            for _ in 0..200 {
                let a = lo + (hi - lo) / 3.0;
                let b = hi - (hi - lo) / 3.0;
                if dist_to(a) < dist_to(b) {
                    hi = b;
                } else {
                    lo = a;
                }
            }
            let direct = dist_to(0.5 * (lo + hi));
            assert!((horoball_distance(&x, &w).abs() - direct).abs() < 1e-7);
        }
    }

    #[test]
    fn basins_small_run() {
        let o = build_platonic_cell(PlatonicKind::Octahedron).unwrap();
        let r = verify_basins(&o, 500, 7, Execution::Sequential);
        assert_eq!(r.violations, 0);
        assert!(r.passed(), "{r:?}");
        let p = verify_basins(&o, 500, 7, Execution::Parallel);
        assert_eq!(r, p);
    }

    #[test]
    fn gluing() {
        for (m, n) in [(6, 6), (6, 4), (7, 3)] {
            assert!(verify_gluing_angles(m, n).unwrap().passed());
        }
    }
}
