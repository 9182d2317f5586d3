//! Geometry verification summary and the full classification document.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::classify::{classification_table, ClassificationRow, ARITHMETIC_TYPES};
use crate::coxeter::{build_hyperbolic_presentation, build_spherical_presentation};
use crate::exec::{self, Execution};
use crate::lorentz::{
    build_drum, build_platonic_cell, polygon_oracle, random_lorentz, realize, tangency_checks, tiling_angles,
    verify_basins, verify_gluing_angles, CanonicalCheckReport, PlatonicKind, VertexClass, TOLERANCE,
};
use crate::vinberg::hyperbolic_pairs;
use crate::{Error, Result};

/// Largest bound accepted by `classification_report`.
pub const MAX_REPORT_BOUND: u64 = 50;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_SEED: u64 = 20_240_601;
/// Tolerance for the tiling-angle identity.
pub const ANGLE_IDENTITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct GeometryConfig {
    pub bound: u64,
    pub samples: usize,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig { bound: 12, samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED, exec: Execution::default() }
    }
}

#[derive(Clone, Debug)]
pub struct GeometrySummary {
    pub bound: u64,
    pub polyhedra: usize,
    /// Largest error of realized angles and distances against the labels.
    pub angle_error: f64,
    pub gram_error: f64,
    /// Largest change of any checked quantity under a random isometry.
    pub isometry_error: f64,
    /// Polyhedra whose vertex counts differ from one ideal and one
    /// truncated vertex (hyperbolic) or one ideal vertex (spherical).
    pub vertex_count_failures: Vec<(u64, u64)>,
    pub tangency_error: f64,
    pub basins: Vec<CanonicalCheckReport>,
    pub gluing_error: f64,
    pub tiling_identity_error: f64,
    pub tiling_oracle_error: f64,
    pub right_angle_66_exact: bool,
}

impl GeometrySummary {
    pub fn angles_ok(&self) -> bool {
        self.angle_error < TOLERANCE
            && self.gram_error < TOLERANCE
            && self.isometry_error < TOLERANCE
            && self.vertex_count_failures.is_empty()
    }

    pub fn tangency_ok(&self) -> bool {
        self.tangency_error < TOLERANCE
    }

    pub fn basins_ok(&self) -> bool {
        self.basins.iter().all(CanonicalCheckReport::passed)
    }

    pub fn gluing_ok(&self) -> bool {
        self.gluing_error < TOLERANCE
    }

    pub fn tiling_ok(&self) -> bool {
        self.tiling_identity_error < ANGLE_IDENTITY_TOLERANCE && self.right_angle_66_exact
    }

    pub fn passed(&self) -> bool {
        self.angles_ok() && self.tangency_ok() && self.basins_ok() && self.gluing_ok() && self.tiling_ok()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "bound": self.bound,
            "polyhedra": self.polyhedra,
            "angle_error": self.angle_error,
            "gram_error": self.gram_error,
            "isometry_error": self.isometry_error,
            "vertex_count_failures": self.vertex_count_failures.iter().map(|(m, n)| json!([m, n])).collect::<Vec<_>>(),
            "tangency_error": self.tangency_error,
            "basins": self.basins.iter().map(CanonicalCheckReport::to_json).collect::<Vec<_>>(),
            "gluing_error": self.gluing_error,
            "tiling_identity_error": self.tiling_identity_error,
            "tiling_oracle_error": self.tiling_oracle_error,
            "right_angle_66_exact": self.right_angle_66_exact,
            "passed": self.passed(),
        })
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let flag = |ok: bool| if ok { "ok" } else { "FAILED" };
        let _ = writeln!(s, "geometry verification (m,n <= {})", self.bound);
        let _ = writeln!(
            s,
            "  dihedral angles: {} polyhedra, max error {:.3e}, gram error {:.3e}, isometry error {:.3e} [{}]",
            self.polyhedra,
            self.angle_error,
            self.gram_error,
            self.isometry_error,
            flag(self.angles_ok())
        );
        let _ = writeln!(s, "  horoball tangency: max error {:.3e} [{}]", self.tangency_error, flag(self.tangency_ok()));
        for b in &self.basins {
            let _ = writeln!(
                s,
                "  basins {}: {} samples, {} violations, {} skipped, wall margin {:.3e} [{}]",
                b.cell,
                b.samples,
                b.violations,
                b.skipped,
                b.max_margin_at_walls,
                flag(b.passed())
            );
        }
        let _ = writeln!(s, "  gluing angle sums: max error {:.3e} [{}]", self.gluing_error, flag(self.gluing_ok()));
        let _ = writeln!(
            s,
            "  tiling angles: identity error {:.3e}, oracle error {:.3e}, alpha_6 = pi/2 exact: {} [{}]",
            self.tiling_identity_error,
            self.tiling_oracle_error,
            self.right_angle_66_exact,
            flag(self.tiling_ok())
        );
        s
    }
}

struct PolyhedronCheck {
    angle_error: f64,
    gram_error: f64,
    isometry_error: f64,
    counts_ok: bool,
}

fn check_polyhedron(m: u64, n: u64, spherical: bool, seed: u64) -> Result<PolyhedronCheck> {
    let p = if spherical { build_spherical_presentation(m, n)? } else { build_hyperbolic_presentation(m, n)? };
    let r = realize(&p)?;
    let checks = r.angle_checks(&p);
    let angle_error = checks.iter().map(|c| c.error()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (m << 32) ^ n);
    let moved = r.transformed(&random_lorentz(&mut rng));
    let isometry_error = moved
        .angle_checks(&p)
        .iter()
        .zip(&checks)
        .map(|(a, b)| (a.measured - b.measured).abs())
        .fold(0.0, f64::max);
    let counts_ok = if spherical {
        r.count(VertexClass::Ideal) == 1 && r.count(VertexClass::UltraIdeal) == 0
    } else {
        r.count(VertexClass::Ideal) == 1 && r.count(VertexClass::UltraIdeal) == 1
    };
    Ok(PolyhedronCheck { angle_error, gram_error: r.gram_error(&p.gram_f64()), isometry_error, counts_ok })
}

/// The cells whose horoball basins are sampled.
pub fn basin_cells() -> Result<Vec<crate::lorentz::IdealCell>> {
    Ok(vec![
        build_platonic_cell(PlatonicKind::Tetrahedron)?,
        build_platonic_cell(PlatonicKind::Octahedron)?,
        build_drum(6, 6)?.cell,
        build_drum(6, 4)?.cell,
        build_drum(4, 6)?.cell,
    ])
}

pub fn geometry_verify(cfg: &GeometryConfig) -> Result<GeometrySummary> {
    let mut targets: Vec<(u64, u64, bool)> =
        hyperbolic_pairs(cfg.bound, cfg.bound).into_iter().map(|(m, n)| (m, n, false)).collect();
    if cfg.bound >= 5 {
        targets.push((5, 3, true));
    }
    let checks: Vec<PolyhedronCheck> = exec::map(cfg.exec, &targets, |&(m, n, s)| check_polyhedron(m, n, s, cfg.seed))
        .into_iter()
        .collect::<Result<_>>()?;
    let fold = |f: &dyn Fn(&PolyhedronCheck) -> f64| checks.iter().map(f).fold(0.0, f64::max);
    let vertex_count_failures =
        targets.iter().zip(&checks).filter(|(_, c)| !c.counts_ok).map(|((m, n, _), _)| (*m, *n)).collect();

    let mut tangency_error = 0.0f64;
    for kind in [PlatonicKind::Tetrahedron, PlatonicKind::Octahedron] {
        for c in tangency_checks(&build_platonic_cell(kind)?) {
            tangency_error = tangency_error.max(c.gap.abs()).max(c.midpoint_offset).max(c.boundary_offset);
        }
    }

    let basins = basin_cells()?.iter().map(|c| verify_basins(c, cfg.samples, cfg.seed, cfg.exec)).collect();

    let pairs = hyperbolic_pairs(cfg.bound, cfg.bound);
    let per_pair: Vec<(f64, f64, f64)> = exec::map(cfg.exec, &pairs, |&(m, n)| {
        let glue = verify_gluing_angles(m, n)?.error();
        let oracle = polygon_oracle(m, n)?;
        let (am, _) = tiling_angles(m, n)?;
        let (pm, pn) = (std::f64::consts::PI / m as f64, std::f64::consts::PI / n as f64);
        let identity = ((oracle.alpha_m / 2.0).tan() * pn.cos() - pm.cos()).abs();
        Ok((glue, identity, (oracle.alpha_m - am).abs()))
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let right_angle_66_exact = cfg.bound < 6 || {
        let (a, b) = tiling_angles(6, 6)?;
        a == std::f64::consts::FRAC_PI_2 && b == std::f64::consts::FRAC_PI_2
    };

    Ok(GeometrySummary {
        bound: cfg.bound,
        polyhedra: targets.len(),
        angle_error: fold(&|c| c.angle_error),
        gram_error: fold(&|c| c.gram_error),
        isometry_error: fold(&|c| c.isometry_error),
        vertex_count_failures,
        tangency_error,
        basins,
        gluing_error: per_pair.iter().map(|p| p.0).fold(0.0, f64::max),
        tiling_identity_error: per_pair.iter().map(|p| p.1).fold(0.0, f64::max),
        tiling_oracle_error: per_pair.iter().map(|p| p.2).fold(0.0, f64::max),
        right_angle_66_exact,
    })
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub bound: u64,
    pub rows: Vec<ClassificationRow>,
    pub geometry: Option<GeometrySummary>,
}

/// Classification of all types with `m,n <= bound`, with an optional
/// geometry summary.
pub fn classification_report(bound: u64, geometry: Option<GeometryConfig>, exec: Execution) -> Result<ClassificationReport> {
    if !(3..=MAX_REPORT_BOUND).contains(&bound) {
        return Err(Error::Domain(format!("report bound must be in 3..={MAX_REPORT_BOUND}, got {bound}")));
    }
    let rows = classification_table(bound, exec)?;
    let arithmetic: Vec<(u64, u64)> =
        rows.iter().filter(|r| r.class.arithmetic).map(|r| (r.class.tiling.m, r.class.tiling.n)).collect();
    let expected: Vec<(u64, u64)> = ARITHMETIC_TYPES.iter().copied().filter(|&(m, _)| m <= bound).collect();
    if arithmetic != expected {
        return Err(Error::Verification(format!("arithmetic rows {arithmetic:?} differ from {expected:?}")));
    }
    let geometry = geometry.map(|g| geometry_verify(&g)).transpose()?;
    Ok(ClassificationReport { bound, rows, geometry })
}

impl ClassificationReport {
    pub fn arithmetic_rows(&self) -> Vec<&ClassificationRow> {
        self.rows.iter().filter(|r| r.class.arithmetic).collect()
    }

    /// Members of each commensurability class, by id.
    pub fn classes(&self) -> BTreeMap<usize, Vec<&ClassificationRow>> {
        let mut out: BTreeMap<usize, Vec<&ClassificationRow>> = BTreeMap::new();
        for r in &self.rows {
            out.entry(r.commensurability_class_id).or_default().push(r);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let arithmetic: Vec<Value> = self.arithmetic_rows().iter().map(|r| r.class.to_json()).collect();
        let trace_fields: Vec<Value> = self
            .arithmetic_rows()
            .iter()
            .map(|r| json!({ "m": r.class.tiling.m, "n": r.class.tiling.n, "trace_field": r.class.trace_field }))
            .collect();
        let classes: Vec<Value> = self
            .classes()
            .into_iter()
            .filter(|(_, members)| members.len() > 1 || members[0].class.arithmetic)
            .map(|(id, members)| {
                json!({
                    "id": id,
                    "members": members.iter().map(|r| json!([r.class.tiling.m, r.class.tiling.n])).collect::<Vec<_>>(),
                    "arithmetic": members[0].class.arithmetic,
                    "trace_field": members[0].class.trace_field,
                })
            })
            .collect();
        json!({
            "bound": self.bound,
            "arithmetic": arithmetic,
            "trace_fields": trace_fields,
            "arithmetic_classes": classes,
            "class_count": self.classes().len(),
            "table": crate::classify::table_json(&self.rows),
            "geometry": self.geometry.as_ref().map(GeometrySummary::to_json),
        })
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "classification of right-angled tiling links, m,n <= {}", self.bound);
        let _ = writeln!(s, "\narithmetic types");
        for r in self.arithmetic_rows() {
            let c = &r.class;
            let _ = writeln!(
                s,
                "  ({},{}) {:<10} {:<14} {}",
                c.tiling.m,
                c.tiling.n,
                c.tiling.geometry.name(),
                c.trace_field.as_deref().unwrap_or("-"),
                c.source.name()
            );
        }
        let _ = writeln!(s, "  all other types are non-arithmetic ({} types)", self.rows.len() - self.arithmetic_rows().len());
        let _ = writeln!(s, "\ncommensurability classes: {}", self.classes().len());
        for (id, members) in self.classes() {
            if members.len() > 1 || members[0].class.arithmetic {
                let names: Vec<String> =
                    members.iter().map(|r| format!("({},{})", r.class.tiling.m, r.class.tiling.n)).collect();
                let _ = writeln!(s, "  class {id}: {}", names.join(" "));
            }
        }
        let _ = writeln!(s, "  every other type is alone in its class");
        let mut degrees = [0usize; 2];
        for r in &self.rows {
            match r.min_orbifold_degree {
                crate::classify::OrbifoldDegree::One => degrees[0] += 1,
                crate::classify::OrbifoldDegree::Two => degrees[1] += 1,
                crate::classify::OrbifoldDegree::NotApplicable => {}
            }
        }
        let _ = writeln!(s, "\nminimal orbifold degree: 1 for {} types (m != n), 2 for {} types (m = n)", degrees[0], degrees[1]);
        if let Some(g) = &self.geometry {
            let _ = writeln!(s);
            s.push_str(&g.render_text());
        }
        s
    }
}
