//! Classification of right-angled tiling links: geometry, arithmeticity,
//! invariant trace fields, commensurability and minimal orbifold degree.

use serde_json::{json, Value};

use crate::coxeter::{build_hyperbolic_presentation, build_spherical_presentation, Geometry, TilingType};
use crate::exec::{self, Execution};
use crate::trace_field::invariant_trace_field;
use crate::vinberg::check_arithmetic;
use crate::{Error, Result};

/// Vertex count forced by the Euler characteristic of the surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexCount {
    /// `V` with `2V/m` and `2V/n` faces of each kind.
    Forced(u64),
    /// Euclidean type on the torus: every `V` is admissible.
    Any,
    NoSuchTiling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeometryClass {
    pub tiling: TilingType,
    pub vertices: Option<VertexCount>,
}

/// `V (2/m + 2/n - 1) = 2 - 2g`; a tiling also needs whole numbers of
/// `m`-gons and `n`-gons.
pub fn classify_geometry(m: u64, n: u64, genus: Option<u64>) -> Result<GeometryClass> {
    let tiling = TilingType::new(m, n)?.normalized();
    let vertices = genus.map(|g| {
        let (m, n) = (m as i128, n as i128);
        let chi = 2 - 2 * g as i128;
        let denom = 2 * n + 2 * m - m * n;
        if denom == 0 {
            return if chi == 0 { VertexCount::Any } else { VertexCount::NoSuchTiling };
        }
        let num = chi * m * n;
        if num % denom != 0 || num / denom <= 0 {
            return VertexCount::NoSuchTiling;
        }
        let v = num / denom;
        if (2 * v) % m != 0 || (2 * v) % n != 0 {
            return VertexCount::NoSuchTiling;
        }
        VertexCount::Forced(v as u64)
    });
    Ok(GeometryClass { tiling, vertices })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Source {
    Computed,
    Lookup,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Computed => "computed",
            Source::Lookup => "lookup",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkClass {
    pub tiling: TilingType,
    pub arithmetic: bool,
    pub trace_field: Option<String>,
    pub source: Source,
    pub reference: Option<&'static str>,
}

impl LinkClass {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.tiling.m,
            "n": self.tiling.n,
            "geometry": self.tiling.geometry.name(),
            "arithmetic": self.arithmetic,
            "trace_field": self.trace_field,
            "source": self.source.name(),
            "reference": self.reference,
        })
    }
}

/// Known invariant trace fields of the arithmetic types, `m >= n`.
pub fn arithmetic_trace_field(m: u64, n: u64) -> Option<&'static str> {
    match (m.max(n), m.min(n)) {
        (3, 3) | (4, 4) | (6, 6) => Some("Q(i)"),
        (4, 3) => Some("Q(i*sqrt(2))"),
        (6, 3) => Some("Q(i*sqrt(3))"),
        (6, 4) => Some("Q(i*sqrt(6))"),
        _ => None,
    }
}

fn lookup_reference(m: u64, n: u64) -> Option<&'static str> {
    match (m, n) {
        (3, 3) => Some("Thurston: The geometry and topology of three-manifolds, chapter 3"),
        (4, 3) => Some("Hatcher: Hyperbolic structures of arithmetic type on some link complements"),
        (4, 4) | (6, 3) => Some("Champanerkar, Kofman, Purcell: right-angled polyhedra and alternating links"),
        _ => None,
    }
}

/// Trace field of a hyperbolic type: the table value for arithmetic types,
/// checked against the determinant computation, and the symbolic
/// `k(P)(sqrt(det G'))` otherwise.
pub fn trace_field_table(m: u64, n: u64) -> Result<String> {
    let t = TilingType::new(m, n)?.normalized();
    if t.geometry != Geometry::Hyperbolic {
        return arithmetic_trace_field(t.m, t.n)
            .map(str::to_string)
            .ok_or_else(|| Error::Domain(format!("({},{}) is not arithmetic", t.m, t.n)));
    }
    let computed = invariant_trace_field(&build_hyperbolic_presentation(t.m, t.n)?)?.field_name();
    if let Some(table) = arithmetic_trace_field(t.m, t.n) {
        if table != computed {
            return Err(Error::Verification(format!(
                "trace field of ({},{}) computed as {computed}, expected {table}",
                t.m, t.n
            )));
        }
    }
    Ok(computed)
}

/// Arithmeticity of a type. Hyperbolic types and `(5,3)` are decided by
/// Vinberg's criterion; the remaining spherical and Euclidean types are
/// known arithmetic.
pub fn arithmetic_status(m: u64, n: u64) -> Result<LinkClass> {
    let tiling = TilingType::new(m, n)?.normalized();
    let (m, n) = (tiling.m, tiling.n);
    let computed = |arithmetic: bool, trace_field: Option<String>| LinkClass {
        tiling,
        arithmetic,
        trace_field,
        source: Source::Computed,
        reference: None,
    };
    match (tiling.geometry, m, n) {
        (Geometry::Hyperbolic, _, _) => {
            let arithmetic = check_arithmetic(&build_hyperbolic_presentation(m, n)?)?.arithmetic;
            let field = if arithmetic { Some(trace_field_table(m, n)?) } else { None };
            Ok(computed(arithmetic, field))
        }
        (Geometry::Spherical, 5, 3) => {
            let arithmetic = check_arithmetic(&build_spherical_presentation(5, 3)?)?.arithmetic;
            Ok(computed(arithmetic, None))
        }
        _ => Ok(LinkClass {
            tiling,
            arithmetic: true,
            trace_field: arithmetic_trace_field(m, n).map(str::to_string),
            source: Source::Lookup,
            reference: lookup_reference(m, n),
        }),
    }
}

/// Cells of the canonical decomposition, by type.
pub fn canonical_cells(t: TilingType) -> String {
    let t = t.normalized();
    match (t.geometry, t.m, t.n) {
        (Geometry::Hyperbolic, m, n) if m == n => format!("regular ideal {m}-drums"),
        (Geometry::Hyperbolic, m, n) => format!("regular ideal {m}-drums and {n}-drums"),
        (Geometry::Spherical, 5, 3) => "checkerboard icosidodecahedra".into(),
        (Geometry::Spherical, 4, 3) => "right-angled ideal cuboctahedra".into(),
        (Geometry::Euclidean, 6, 3) => "regular ideal tetrahedra".into(),
        _ => "regular ideal octahedra".into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    SameTiling,
    GaussianFamily,
    TraceFieldMismatch { a: String, b: String },
    ArithmeticityMismatch,
    CellMismatch { a: String, b: String },
}

impl Reason {
    pub fn clause(&self) -> &'static str {
        match self {
            Reason::SameTiling => "same tiling",
            Reason::GaussianFamily => "Q(i) family",
            Reason::TraceFieldMismatch { .. } => "trace field mismatch",
            Reason::ArithmeticityMismatch => "arithmetic and non-arithmetic",
            Reason::CellMismatch { .. } => "canonical cell mismatch",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Reason::TraceFieldMismatch { a, b } => format!("trace field mismatch: {a} != {b}"),
            Reason::CellMismatch { a, b } => format!("canonical cell mismatch: {a} vs {b}"),
            other => other.clause().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Commensurability {
    pub a: TilingType,
    pub b: TilingType,
    pub commensurable: bool,
    pub reason: Reason,
}

impl Commensurability {
    pub fn to_json(&self) -> Value {
        json!({
            "a": [self.a.m, self.a.n],
            "b": [self.b.m, self.b.n],
            "commensurable": self.commensurable,
            "clause": self.reason.clause(),
            "reason": self.reason.describe(),
        })
    }
}

fn gaussian(t: TilingType) -> bool {
    matches!((t.m, t.n), (3, 3) | (4, 4) | (6, 6))
}

/// Known arithmetic types, `m >= n`.
pub const ARITHMETIC_TYPES: [(u64, u64); 6] = [(3, 3), (4, 3), (4, 4), (6, 3), (6, 4), (6, 6)];

pub fn is_arithmetic_type(t: TilingType) -> bool {
    let t = t.normalized();
    ARITHMETIC_TYPES.contains(&(t.m, t.n))
}

/// Commensurable iff the same unordered type or both in the `Q(i)` family
/// `(3,3), (4,4), (6,6)`.
pub fn commensurable(a: TilingType, b: TilingType) -> Commensurability {
    let (a, b) = (a.normalized(), b.normalized());
    let (arith_a, arith_b) = (is_arithmetic_type(a), is_arithmetic_type(b));
    let (commensurable, reason) = if (a.m, a.n) == (b.m, b.n) {
        (true, Reason::SameTiling)
    } else if gaussian(a) && gaussian(b) {
        (true, Reason::GaussianFamily)
    } else if arith_a && arith_b {
        let field = |t: TilingType| arithmetic_trace_field(t.m, t.n).unwrap_or_default().to_string();
        (false, Reason::TraceFieldMismatch { a: field(a), b: field(b) })
    } else if arith_a != arith_b {
        (false, Reason::ArithmeticityMismatch)
    } else {
        (false, Reason::CellMismatch { a: canonical_cells(a), b: canonical_cells(b) })
    };
    Commensurability { a, b, commensurable, reason }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbifoldDegree {
    One,
    Two,
    NotApplicable,
}

impl OrbifoldDegree {
    pub fn to_json(self) -> Value {
        match self {
            OrbifoldDegree::One => json!(1),
            OrbifoldDegree::Two => json!(2),
            OrbifoldDegree::NotApplicable => json!("not_applicable"),
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            OrbifoldDegree::One => "1",
            OrbifoldDegree::Two => "2",
            OrbifoldDegree::NotApplicable => "not_applicable",
        }
    }
}

/// Degree of the Coxeter orbifold `P(m,n)` over the minimal orbifold of a
/// non-arithmetic hyperbolic type: 1 if `m != n`, 2 if `m = n`.
pub fn minimal_orbifold_degree(m: u64, n: u64) -> Result<OrbifoldDegree> {
    let t = TilingType::new(m, n)?.normalized();
    if t.geometry != Geometry::Hyperbolic {
        return Err(Error::Domain(format!("({},{}) is not hyperbolic", t.m, t.n)));
    }
    Ok(if is_arithmetic_type(t) {
        OrbifoldDegree::NotApplicable
    } else if t.m != t.n {
        OrbifoldDegree::One
    } else {
        OrbifoldDegree::Two
    })
}

/// Unordered types `m >= n >= 3` with `m <= bound`, ordered by `(m, n)`.
pub fn valid_types(bound: u64) -> Vec<TilingType> {
    let mut out = Vec::new();
    for m in 3..=bound {
        for n in 3..=m {
            out.push(TilingType::new(m, n).expect("m,n >= 3"));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationRow {
    pub class: LinkClass,
    pub min_orbifold_degree: OrbifoldDegree,
    pub commensurability_class_id: usize,
}

pub const TABLE_COLUMNS: [&str; 7] =
    ["m", "n", "geometry", "arithmetic", "trace_field", "min_orbifold_degree", "commensurability_class_id"];

impl ClassificationRow {
    pub fn to_json(&self) -> Value {
        json!({
            "m": self.class.tiling.m,
            "n": self.class.tiling.n,
            "geometry": self.class.tiling.geometry.name(),
            "arithmetic": self.class.arithmetic,
            "trace_field": self.class.trace_field,
            "min_orbifold_degree": self.min_orbifold_degree.to_json(),
            "commensurability_class_id": self.commensurability_class_id,
        })
    }

    pub fn csv_record(&self) -> [String; 7] {
        [
            self.class.tiling.m.to_string(),
            self.class.tiling.n.to_string(),
            self.class.tiling.geometry.name().to_string(),
            self.class.arithmetic.to_string(),
            self.class.trace_field.clone().unwrap_or_default(),
            self.min_orbifold_degree.text().to_string(),
            self.commensurability_class_id.to_string(),
        ]
    }
}

/// Full classification of every type with `m,n <= bound`. Class ids
/// number the commensurability classes from 1 in order of first member.
pub fn classification_table(bound: u64, exec: Execution) -> Result<Vec<ClassificationRow>> {
    let types = valid_types(bound);
    let classes: Vec<LinkClass> =
        exec::map(exec, &types, |t| arithmetic_status(t.m, t.n)).into_iter().collect::<Result<_>>()?;
    let mut reps: Vec<TilingType> = Vec::new();
    let mut rows = Vec::with_capacity(types.len());
    for (t, class) in types.iter().zip(classes) {
        let id = match reps.iter().position(|r| commensurable(*r, *t).commensurable) {
            Some(k) => k + 1,
            None => {
                reps.push(*t);
                reps.len()
            }
        };
        let min_orbifold_degree = match t.geometry {
            Geometry::Hyperbolic => minimal_orbifold_degree(t.m, t.n)?,
            _ => OrbifoldDegree::NotApplicable,
        };
        if class.arithmetic != is_arithmetic_type(*t) {
            return Err(Error::Verification(format!(
                "arithmeticity of ({},{}) disagrees with the known list",
                t.m, t.n
            )));
        }
        rows.push(ClassificationRow { class, min_orbifold_degree, commensurability_class_id: id });
    }
    Ok(rows)
}

pub fn table_json(rows: &[ClassificationRow]) -> Value {
    Value::Array(rows.iter().map(ClassificationRow::to_json).collect())
}

pub fn table_csv(rows: &[ClassificationRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Structure(format!("csv: {e}"));
    w.write_record(TABLE_COLUMNS).map_err(io)?;
    for r in rows {
        w.write_record(r.csv_record()).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Structure(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Structure(format!("csv: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(m: u64, n: u64) -> TilingType {
        TilingType::new(m, n).unwrap()
    }

    #[test]
    fn euler_counts() {
        assert_eq!(classify_geometry(6, 6, Some(2)).unwrap().vertices, Some(VertexCount::Forced(6)));
        assert_eq!(classify_geometry(6, 4, Some(2)).unwrap().vertices, Some(VertexCount::Forced(12)));
        assert_eq!(classify_geometry(4, 4, Some(1)).unwrap().vertices, Some(VertexCount::Any));
        assert_eq!(classify_geometry(3, 3, Some(0)).unwrap().vertices, Some(VertexCount::Forced(6)));
        assert_eq!(classify_geometry(5, 3, Some(0)).unwrap().vertices, Some(VertexCount::Forced(30)));
        assert_eq!(classify_geometry(7, 3, Some(2)).unwrap().vertices, Some(VertexCount::Forced(42)));
        assert_eq!(classify_geometry(5, 5, Some(2)).unwrap().vertices, Some(VertexCount::Forced(10)));
        assert_eq!(classify_geometry(7, 4, Some(2)).unwrap().vertices, Some(VertexCount::NoSuchTiling));
        assert_eq!(classify_geometry(6, 6, Some(0)).unwrap().vertices, Some(VertexCount::NoSuchTiling));
        assert!(classify_geometry(2, 6, None).is_err());
    }

    #[test]
    fn statuses() {
        assert!(!arithmetic_status(5, 3).unwrap().arithmetic);
        assert_eq!(arithmetic_status(5, 3).unwrap().source, Source::Computed);
        let c = arithmetic_status(3, 6).unwrap();
        assert!(c.arithmetic && c.source == Source::Lookup);
        assert_eq!(c.tiling.m, 6);
        assert!(!arithmetic_status(8, 8).unwrap().arithmetic);
        let c = arithmetic_status(4, 6).unwrap();
        assert_eq!(c.trace_field.as_deref(), Some("Q(i*sqrt(6))"));
    }

    #[test]
    fn fields() {
        assert_eq!(trace_field_table(6, 4).unwrap(), "Q(i*sqrt(6))");
        assert_eq!(trace_field_table(6, 6).unwrap(), "Q(i)");
        assert_eq!(trace_field_table(4, 3).unwrap(), "Q(i*sqrt(2))");
        assert_eq!(trace_field_table(3, 3).unwrap(), "Q(i)");
        assert!(trace_field_table(7, 3).unwrap().starts_with("k(P)(sqrt("));
    }

    #[test]
    fn commensurability_examples() {
        assert!(commensurable(t(6, 4), t(4, 6)).commensurable);
        let c = commensurable(t(3, 3), t(6, 6));
        assert!(c.commensurable && c.reason.clause() == "Q(i) family");
        let c = commensurable(t(6, 4), t(6, 6));
        assert_eq!(c.reason, Reason::TraceFieldMismatch { a: "Q(i*sqrt(6))".into(), b: "Q(i)".into() });
        let c = commensurable(t(7, 3), t(8, 3));
        assert!(matches!(c.reason, Reason::CellMismatch { .. }));
        assert_eq!(commensurable(t(7, 3), t(6, 6)).reason, Reason::ArithmeticityMismatch);
    }

    #[test]
    fn orbifold_degrees() {
        assert_eq!(minimal_orbifold_degree(7, 3).unwrap(), OrbifoldDegree::One);
        assert_eq!(minimal_orbifold_degree(5, 5).unwrap(), OrbifoldDegree::Two);
        assert_eq!(minimal_orbifold_degree(6, 6).unwrap(), OrbifoldDegree::NotApplicable);
        assert!(minimal_orbifold_degree(4, 4).is_err());
    }

    #[test]
    fn small_table() {
        let rows = classification_table(6, Execution::Sequential).unwrap();
        let arith: Vec<(u64, u64)> =
            rows.iter().filter(|r| r.class.arithmetic).map(|r| (r.class.tiling.m, r.class.tiling.n)).collect();
        assert_eq!(arith, ARITHMETIC_TYPES.to_vec());
        let id = |m, n| rows.iter().find(|r| (r.class.tiling.m, r.class.tiling.n) == (m, n)).unwrap().commensurability_class_id;
        assert_eq!(id(3, 3), id(4, 4));
        assert_eq!(id(3, 3), id(6, 6));
        assert_ne!(id(6, 4), id(6, 6));
        let csv = table_csv(&rows).unwrap();
        assert!(csv.starts_with("m,n,geometry,arithmetic,trace_field,min_orbifold_degree,commensurability_class_id\n"));
        let only = classification_table(3, Execution::Sequential).unwrap();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].class.tiling.geometry, Geometry::Spherical);
    }
}
