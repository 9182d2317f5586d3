//! Vinberg's criterion for non-compact Coxeter polyhedra: the group is
//! arithmetic iff every Gram entry is an algebraic integer and every cyclic
//! product is rational.

use num_rational::BigRational;
use serde_json::{json, Value};

use crate::coxeter::{
    build_hyperbolic_presentation, enumerate_cyclic_products, geometry_of, CoxeterPresentation, Family, Geometry,
};
use crate::exact::{embed_cos, make_context, rational_string, AlgebraicNumber};
use crate::exec::{self, Execution};
use crate::{Error, Result};

/// Minimal polynomials are written out only up to this dimension over `Q`;
/// above it the integrality verdict comes from the ring of integers alone.
pub const MINPOLY_DIMENSION_LIMIT: usize = 64;

#[derive(Clone, Debug)]
pub struct EntryWitness {
    pub i: usize,
    pub j: usize,
    pub value: AlgebraicNumber,
    pub minpoly: Option<Vec<BigRational>>,
    pub integral: bool,
}

#[derive(Clone, Debug)]
pub struct CycleWitness {
    pub faces: Vec<usize>,
    pub value: AlgebraicNumber,
    pub rational: Option<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailingItem {
    Entry { i: usize, j: usize },
    Cycle { faces: Vec<usize> },
}

impl FailingItem {
    pub fn to_json(&self) -> Value {
        match self {
            FailingItem::Entry { i, j } => json!({ "entry": [i + 1, j + 1] }),
            FailingItem::Cycle { faces } => json!({ "cycle": faces.iter().map(|f| f + 1).collect::<Vec<_>>() }),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            FailingItem::Entry { i, j } => format!("entry a{}{} is not an algebraic integer", i + 1, j + 1),
            FailingItem::Cycle { faces } => {
                let f: Vec<String> = faces.iter().map(|f| (f + 1).to_string()).collect();
                format!("cycle ({}) has an irrational product", f.join(","))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ArithmeticityCertificate {
    pub m: u64,
    pub n: u64,
    pub family: Family,
    pub arithmetic: bool,
    pub entries: Vec<EntryWitness>,
    pub cycles: Vec<CycleWitness>,
    pub failing_item: Option<FailingItem>,
}

fn rational_list(p: &[BigRational]) -> Value {
    Value::Array(p.iter().map(|c| json!(rational_string(c))).collect())
}

impl ArithmeticityCertificate {
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "i": e.i + 1,
                    "j": e.j + 1,
                    "value": e.value.to_json(),
                    "minpoly": e.minpoly.as_deref().map(rational_list).unwrap_or(Value::Null),
                    "integral": e.integral,
                })
            })
            .collect();
        let cycles: Vec<Value> = self
            .cycles
            .iter()
            .map(|c| {
                json!({
                    "faces": c.faces.iter().map(|f| f + 1).collect::<Vec<_>>(),
                    "value": c.value.to_json(),
                    "rational": c.rational.as_ref().map(|q| json!(rational_string(q))).unwrap_or(Value::Null),
                })
            })
            .collect();
        json!({
            "m": self.m,
            "n": self.n,
            "family": self.family.name(),
            "arithmetic": self.arithmetic,
            "entries": entries,
            "cycles": cycles,
            "failing_item": self.failing_item.as_ref().map(FailingItem::to_json).unwrap_or(Value::Null),
        })
    }
}

fn entry_witness(i: usize, j: usize, value: &AlgebraicNumber) -> Result<EntryWitness> {
    let integral = value.is_algebraic_integer();
    let minpoly = if value.ambient_dimension() <= MINPOLY_DIMENSION_LIMIT {
        let mp = value.minimal_polynomial();
        let by_minpoly = mp.iter().all(|c| c.is_integer());
        if by_minpoly != integral {
            return Err(Error::Verification(format!(
                "integrality of a{}{} disagrees between minimal polynomial and ring of integers",
                i + 1,
                j + 1
            )));
        }
        Some(mp)
    } else {
        None
    };
    Ok(EntryWitness { i, j, value: value.clone(), minpoly, integral })
}

/// Build the certificate: entries in face order (`i <= j`, nonzero only),
/// then cycles in the order of `enumerate_cyclic_products`.
pub fn check_arithmetic(p: &CoxeterPresentation) -> Result<ArithmeticityCertificate> {
    let s = p.size();
    let mut entries = Vec::new();
    for i in 0..s {
        for j in i..s {
            let v = p.entry(i, j);
            if !v.is_zero() {
                entries.push(entry_witness(i, j, v)?);
            }
        }
    }
    let cycles: Vec<CycleWitness> = enumerate_cyclic_products(p)
        .into_iter()
        .map(|c| {
            let rational = c.value.is_rational();
            CycleWitness { faces: c.faces, value: c.value, rational }
        })
        .collect();
    let failing_item = entries
        .iter()
        .find(|e| !e.integral)
        .map(|e| FailingItem::Entry { i: e.i, j: e.j })
        .or_else(|| cycles.iter().find(|c| c.rational.is_none()).map(|c| FailingItem::Cycle { faces: c.faces.clone() }));
    Ok(ArithmeticityCertificate {
        m: p.m,
        n: p.n,
        family: p.family,
        arithmetic: failing_item.is_none(),
        entries,
        cycles,
        failing_item,
    })
}

/// Recompute the failing item from the presentation; true when it still fails.
pub fn failure_reproduces(p: &CoxeterPresentation, item: &FailingItem) -> bool {
    match item {
        FailingItem::Entry { i, j } => !p.entry(*i, *j).is_algebraic_integer(),
        FailingItem::Cycle { faces } => {
            let k = faces.len();
            let mut v = AlgebraicNumber::one(p.context());
            for t in 0..k {
                v = &v * p.entry(faces[t], faces[(t + 1) % k]);
            }
            v.is_rational().is_none()
        }
    }
}

/// `cos(2 pi / p)` is rational iff `p` is 3, 4 or 6; checked against the
/// exact rationality of `2cos(2pi/p) = g^2 - 2` in the field of level `p`.
pub fn niven_filter(p: u64) -> Result<bool> {
    if p < 3 {
        return Err(Error::Domain(format!("niven filter needs p >= 3, got {p}")));
    }
    let lookup = matches!(p, 3 | 4 | 6);
    let ctx = make_context(p)?;
    let g = embed_cos(&ctx, p)?;
    let exact = (&(&g * &g) - &AlgebraicNumber::from_int(&ctx, 2)).is_rational().is_some();
    if lookup != exact {
        return Err(Error::Verification(format!("Niven lookup and exact test disagree at p = {p}")));
    }
    Ok(exact)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepRow {
    pub m: u64,
    pub n: u64,
    pub arithmetic: bool,
    pub failing_item: Option<FailingItem>,
}

/// All hyperbolic `(m,n)` with `3 <= m <= m_max`, `3 <= n <= n_max`.
pub fn hyperbolic_pairs(m_max: u64, n_max: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for m in 3..=m_max {
        for n in 3..=n_max {
            if geometry_of(m, n) == Geometry::Hyperbolic {
                out.push((m, n));
            }
        }
    }
    out
}

/// Verdicts for every hyperbolic pair in the box, ordered by `(m, n)`.
pub fn arithmetic_sweep(m_max: u64, n_max: u64, exec: Execution) -> Result<Vec<SweepRow>> {
    let pairs = hyperbolic_pairs(m_max, n_max);
    exec::map(exec, &pairs, |&(m, n)| {
        let p = build_hyperbolic_presentation(m, n)?;
        let cert = check_arithmetic(&p)?;
        Ok(SweepRow { m, n, arithmetic: cert.arithmetic, failing_item: cert.failing_item })
    })
    .into_iter()
    .collect()
}
