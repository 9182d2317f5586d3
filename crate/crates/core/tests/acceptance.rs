//! Acceptance criteria 1-10: one PASS/FAIL line each, nonzero exit on failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;

use tilelink::classify::{
    arithmetic_status, commensurable, is_arithmetic_type, minimal_orbifold_degree, valid_types, OrbifoldDegree, Reason,
};
use tilelink::coxeter::{
    build_hyperbolic_presentation, build_spherical_presentation, c_values_agree, enumerate_cyclic_products,
    rank_and_signature, CoxeterPresentation, Geometry, Signature,
};
use tilelink::exact::{adjoin_sqrt, embed_cos, AlgebraicNumber};
use tilelink::exec::Execution;
use tilelink::report::{geometry_verify, GeometryConfig};
use tilelink::trace_field::{gprime_determinant, invariant_trace_field_with, build_worksheet, BasisChoice, PathStrategy};
use tilelink::vinberg::{arithmetic_sweep, check_arithmetic, failure_reproduces, hyperbolic_pairs, FailingItem};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Expected matrix from entries `c * sqrt(r)` given as `(c, r)`, `r = 1` for
/// integers.
fn expected_matches(p: &CoxeterPresentation, entries: [[(i64, i64); 6]; 6]) -> bool {
    let ctx = p.context();
    (0..6).all(|i| {
        (0..6).all(|j| {
            let (c, r) = entries[i][j];
            let root = adjoin_sqrt(&AlgebraicNumber::from_int(ctx, r)).expect("positive radicand");
            let want = root.scale_int(c);
            p.gram[i][j].same_value(&want).unwrap_or(false)
        })
    })
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let g64 = [
        [(2, 1), (-1, 3), (-1, 2), (0, 1), (0, 1), (0, 1)],
        [(-1, 3), (2, 1), (0, 1), (-2, 1), (0, 1), (0, 1)],
        [(-1, 2), (0, 1), (2, 1), (0, 1), (-2, 1), (0, 1)],
        [(0, 1), (-2, 1), (0, 1), (2, 1), (0, 1), (-2, 3)],
        [(0, 1), (0, 1), (-2, 1), (0, 1), (2, 1), (-2, 2)],
        [(0, 1), (0, 1), (0, 1), (-2, 3), (-2, 2), (2, 1)],
    ];
    let g66 = [
        [(2, 1), (-1, 3), (-1, 3), (0, 1), (0, 1), (0, 1)],
        [(-1, 3), (2, 1), (0, 1), (-2, 1), (0, 1), (0, 1)],
        [(-1, 3), (0, 1), (2, 1), (0, 1), (-2, 1), (0, 1)],
        [(0, 1), (-2, 1), (0, 1), (2, 1), (0, 1), (-1, 6)],
        [(0, 1), (0, 1), (-2, 1), (0, 1), (2, 1), (-1, 6)],
        [(0, 1), (0, 1), (0, 1), (-1, 6), (-1, 6), (2, 1)],
    ];
    let a = expected_matches(&build_hyperbolic_presentation(6, 4).unwrap(), g64);
    let b = expected_matches(&build_hyperbolic_presentation(6, 6).unwrap(), g66);
    let t = start.elapsed();
    outcome(
        a && b && within(t, Duration::from_secs(1)),
        format!("gram (6,4) exact: {a}, gram (6,6) exact: {b}, {:.3} s (limit 1 s)", t.as_secs_f64()),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let pairs = hyperbolic_pairs(12, 12);
    let bad: Vec<(u64, u64)> = pairs.iter().copied().filter(|&(m, n)| !c_values_agree(m, n).unwrap_or(false)).collect();
    let t = start.elapsed();
    outcome(
        bad.is_empty() && within(t, Duration::from_secs(30)),
        format!("{} pairs, mismatches {:?}, {:.2} s (limit 30 s)", pairs.len(), bad, t.as_secs_f64()),
    )
}

fn six_cycle(m: u64, n: u64) -> Option<BigRational> {
    let p = build_hyperbolic_presentation(m, n).ok()?;
    enumerate_cyclic_products(&p).into_iter().find(|c| c.faces.len() == 6)?.value.is_rational()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let c64 = six_cycle(6, 4);
    let c66 = six_cycle(6, 6);
    let rows = arithmetic_sweep(50, 50, Execution::default());
    let t = start.elapsed();
    let Ok(rows) = rows else {
        return outcome(false, format!("sweep failed: {:?}", rows.err()));
    };
    let arith: BTreeSet<(u64, u64)> =
        rows.iter().filter(|r| r.arithmetic).map(|r| (r.m.max(r.n), r.m.min(r.n))).collect();
    let expected: BTreeSet<(u64, u64)> = [(6, 4), (6, 6)].into_iter().collect();
    let pass = c64 == Some(q(96)) && c66 == Some(q(72)) && arith == expected && within(t, Duration::from_secs(300));
    outcome(
        pass,
        format!(
            "six-cycles {:?} and {:?}, {} hyperbolic pairs, arithmetic {:?}, {:.1} s (limit 300 s)",
            c64.map(|x| x.to_string()),
            c66.map(|x| x.to_string()),
            rows.len(),
            arith,
            t.as_secs_f64()
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    for ((m, n), det, field) in [((6, 4), -3456, "Q(i*sqrt(6))"), ((6, 6), -5184, "Q(i)")] {
        let p = build_hyperbolic_presentation(m, n).unwrap();
        let d = gprime_determinant(&build_worksheet(&p).unwrap()).unwrap().is_rational();
        let mut names = BTreeSet::new();
        for seed in [1u64, 2, 3, 4] {
            for s in [PathStrategy::RandomBfs(seed), PathStrategy::RandomDfs(seed), PathStrategy::RandomSpanningTree(seed)] {
                match invariant_trace_field_with(&p, s, BasisChoice::Random(seed)) {
                    Ok(r) => names.insert(r.field_name()),
                    Err(e) => names.insert(format!("error {e}")),
                };
            }
        }
        let ok = d == Some(q(det)) && names.len() == 1 && names.contains(field);
        pass &= ok;
        notes.push(format!("({m},{n}) det {:?} fields {:?}", d.map(|x| x.to_string()), names));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_5() -> Outcome {
    let p = build_spherical_presentation(5, 3).unwrap();
    let cert = check_arithmetic(&p).unwrap();
    let witness = embed_cos(p.context(), 5).unwrap();
    let witness = &witness * &witness;
    let Some(FailingItem::Cycle { faces }) = cert.failing_item.clone() else {
        return outcome(false, format!("unexpected failing item {:?}", cert.failing_item));
    };
    let value = cert.cycles.iter().find(|c| c.faces == faces).map(|c| c.value.clone()).unwrap();
    let same = value.same_value(&witness).unwrap_or(false);
    let irrational = value.is_rational().is_none();
    let approx = (value.to_f64() - 4.0 * (std::f64::consts::PI / 5.0).cos().powi(2)).abs() < 1e-12;
    let again = failure_reproduces(&p, cert.failing_item.as_ref().unwrap());
    outcome(
        !cert.arithmetic && same && irrational && approx && again,
        format!(
            "non-arithmetic: {}, failing cycle {:?} = 4cos^2(pi/5): {same}, irrational: {irrational}",
            !cert.arithmetic,
            faces.iter().map(|f| f + 1).collect::<Vec<_>>()
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut presentations = Vec::new();
    for (m, n) in hyperbolic_pairs(12, 12) {
        presentations.push(((m, n, "hyperbolic"), build_hyperbolic_presentation(m, n)));
    }
    for m in 3..=12 {
        for n in 3..=12 {
            if let Ok(p) = build_spherical_presentation(m, n) {
                presentations.push(((m, n, "spherical"), Ok(p)));
            }
        }
    }
    let want = Signature { rank: 4, positive: 3, negative: 1 };
    let mut bad = Vec::new();
    let mut families = BTreeSet::new();
    for (key, p) in &presentations {
        families.insert(key.2);
        match p.as_ref().map_err(|e| e.clone()).and_then(|p| rank_and_signature(&p.gram)) {
            Ok(s) if s == want => {}
            other => bad.push((*key, format!("{other:?}"))),
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} Gram matrices over families {:?}, failures {:?}", presentations.len(), families, bad),
    )
}

fn gaussian(t: (u64, u64)) -> bool {
    matches!(t, (3, 3) | (4, 4) | (6, 6))
}

fn criterion_7() -> Outcome {
    let types = valid_types(12);
    let key = |t: &tilelink::coxeter::TilingType| (t.m, t.n);
    let mut errors = Vec::new();
    let mut relation = vec![vec![false; types.len()]; types.len()];
    let fields: Vec<Option<String>> = types.iter().map(|t| arithmetic_status(t.m, t.n).unwrap().trace_field).collect();
    for (i, a) in types.iter().enumerate() {
        for (j, b) in types.iter().enumerate() {
            let c = commensurable(*a, *b);
            relation[i][j] = c.commensurable;
            let expected = key(a) == key(b) || (gaussian(key(a)) && gaussian(key(b)));
            if c.commensurable != expected {
                errors.push(format!("{:?} {:?}", key(a), key(b)));
            }
            if c.commensurable && is_arithmetic_type(*a) && fields[i] != fields[j] {
                errors.push(format!("field mismatch in class {:?} {:?}", key(a), key(b)));
            }
            if !c.commensurable {
                let justified = match (is_arithmetic_type(*a), is_arithmetic_type(*b)) {
                    (true, true) => matches!(&c.reason, Reason::TraceFieldMismatch { a, b } if a != b),
                    (false, false) => matches!(c.reason, Reason::CellMismatch { .. }),
                    _ => c.reason == Reason::ArithmeticityMismatch,
                };
                if !justified {
                    errors.push(format!("unjustified negative {:?} {:?}: {:?}", key(a), key(b), c.reason));
                }
            }
        }
    }
    let k = types.len();
    let reflexive = (0..k).all(|i| relation[i][i]);
    let symmetric = (0..k).all(|i| (0..k).all(|j| relation[i][j] == relation[j][i]));
    let transitive =
        (0..k).all(|i| (0..k).all(|j| !relation[i][j] || (0..k).all(|l| !relation[j][l] || relation[i][l])));
    let sweep = arithmetic_sweep(12, 12, Execution::default()).unwrap();
    let consistent = sweep.iter().all(|r| arithmetic_status(r.m, r.n).unwrap().arithmetic == r.arithmetic);
    outcome(
        errors.is_empty() && reflexive && symmetric && transitive && consistent,
        format!(
            "{} types, {} ordered pairs, equivalence: {}, vinberg consistent: {consistent}, errors {:?}",
            k,
            k * k,
            reflexive && symmetric && transitive,
            errors
        ),
    )
}

fn criterion_8_and_10() -> (Outcome, Outcome) {
    let start = Instant::now();
    let cfg = GeometryConfig { bound: 12, samples: 10_000, seed: 20_240_601, exec: Execution::default() };
    let g = match geometry_verify(&cfg) {
        Ok(g) => g,
        Err(e) => {
            let o = outcome(false, format!("geometry failed: {e}"));
            return (o, outcome(false, "geometry failed".into()));
        }
    };
    let t = start.elapsed();
    let basins: Vec<String> = g.basins.iter().map(|b| format!("{}: {}", b.cell, b.violations)).collect();
    let eight = outcome(
        g.angles_ok() && g.tangency_ok() && g.basins_ok() && g.gluing_ok() && within(t, Duration::from_secs(120)),
        format!(
            "(a) angle error {:.2e} over {} polyhedra; (b) tangency {:.2e}; (c) violations [{}]; (d) gluing {:.2e}; {:.1} s (limit 120 s)",
            g.angle_error,
            g.polyhedra,
            g.tangency_error,
            basins.join(", "),
            g.gluing_error,
            t.as_secs_f64()
        ),
    );
    let ten = outcome(
        g.tiling_ok() && g.tiling_oracle_error < 1e-12,
        format!(
            "identity error {:.2e} (limit 1e-12), oracle error {:.2e}, alpha_6 = pi/2 exact: {}",
            g.tiling_identity_error, g.tiling_oracle_error, g.right_angle_66_exact
        ),
    );
    (eight, ten)
}

fn criterion_9() -> Outcome {
    let mut bad = Vec::new();
    let mut counted = (0, 0);
    for t in valid_types(12).into_iter().filter(|t| t.geometry == Geometry::Hyperbolic) {
        let arith = arithmetic_status(t.m, t.n).unwrap().arithmetic;
        let d = minimal_orbifold_degree(t.m, t.n).unwrap();
        let want = match (arith, t.m == t.n) {
            (true, _) => OrbifoldDegree::NotApplicable,
            (false, false) => OrbifoldDegree::One,
            (false, true) => OrbifoldDegree::Two,
        };
        match d {
            OrbifoldDegree::One => counted.0 += 1,
            OrbifoldDegree::Two => counted.1 += 1,
            OrbifoldDegree::NotApplicable => {}
        }
        if d != want {
            bad.push((t.m, t.n));
        }
    }
    outcome(bad.is_empty(), format!("degree 1 for {} types, degree 2 for {} types, mismatches {:?}", counted.0, counted.1, bad))
}

fn main() -> ExitCode {
    let (eight, ten) = criterion_8_and_10();
    let results = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        eight,
        criterion_9(),
        ten,
    ];
    let mut all = true;
    for (k, r) in results.iter().enumerate() {
        println!("criterion {:>2} {} {}", k + 1, if r.pass { "PASS" } else { "FAIL" }, r.detail);
        all &= r.pass;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
