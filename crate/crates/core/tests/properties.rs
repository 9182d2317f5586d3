use std::sync::Arc;

use nalgebra::Matrix4;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tilelink::classify::{commensurable, valid_types};
use tilelink::coxeter::build_hyperbolic_presentation;
use tilelink::exact::{adjoin_sqrt, make_context, AlgebraicNumber, FieldContext};
use tilelink::lorentz::{form_matrix, inner, random_lorentz, realize, Vec4};

const LEVELS: [u64; 5] = [5, 7, 8, 12, 15];

fn element(ctx: &Arc<FieldContext>, coeffs: &[i64]) -> AlgebraicNumber {
    let q: Vec<BigRational> = coeffs
        .iter()
        .take(ctx.degree())
        .map(|&c| BigRational::from_integer(BigInt::from(c)))
        .collect();
    AlgebraicNumber::from_base_coeffs(ctx, &q)
}

fn triple() -> impl Strategy<Value = (usize, Vec<i64>, Vec<i64>, Vec<i64>)> {
    let c = || prop::collection::vec(-5i64..=5, 8);
    (0..LEVELS.len(), c(), c(), c())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms((k, a, b, c) in triple()) {
        let ctx = make_context(LEVELS[k]).unwrap();
        let (x, y, z) = (element(&ctx, &a), element(&ctx, &b), element(&ctx, &c));
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x - &x, AlgebraicNumber::zero(&ctx));
        prop_assert_eq!(&x * &AlgebraicNumber::one(&ctx), x.clone());
    }

    #[test]
    fn division_inverts_multiplication((k, a, b, _c) in triple()) {
        let ctx = make_context(LEVELS[k]).unwrap();
        let (x, y) = (element(&ctx, &a), element(&ctx, &b));
        prop_assume!(!x.is_zero());
        let back = (&x * &y).checked_div(&x).unwrap();
        prop_assert_eq!(back, y);
        prop_assert_eq!(&x * &x.inverse().unwrap(), AlgebraicNumber::one(&ctx));
    }

    #[test]
    fn minimal_polynomial_annihilates((k, a, _b, _c) in triple()) {
        let ctx = make_context(LEVELS[k]).unwrap();
        let x = element(&ctx, &a);
        let mp = x.minimal_polynomial();
        let mut acc = AlgebraicNumber::zero(&ctx);
        for (e, c) in mp.iter().enumerate() {
            acc = &acc + &x.pow(e as u32).scale(c);
        }
        prop_assert!(acc.is_zero());
        prop_assert!(mp.last().map(|c| c == &BigRational::from_integer(BigInt::from(1))).unwrap_or(false));
    }

    #[test]
    fn square_roots_square_back((k, a, _b, _c) in triple()) {
        let ctx = make_context(LEVELS[k]).unwrap();
        let x = element(&ctx, &a);
        let d = &(&x * &x) + &AlgebraicNumber::from_int(&ctx, 1);
        let r = adjoin_sqrt(&d).unwrap();
        prop_assert!(r.to_f64() > 0.0);
        prop_assert_eq!((&r * &r).base_part(), d);
        prop_assert!(!(&r * &r).has_extension());
    }

    #[test]
    fn integers_are_closed((k, a, b, _c) in triple()) {
        let ctx = make_context(LEVELS[k]).unwrap();
        let (x, y) = (element(&ctx, &a), element(&ctx, &b));
        prop_assert!(x.is_algebraic_integer() && y.is_algebraic_integer());
        prop_assert!((&x + &y).is_algebraic_integer());
        prop_assert!((&x * &y).is_algebraic_integer());
        let half = AlgebraicNumber::from_rational(&ctx, &BigRational::new(BigInt::from(1), BigInt::from(2)));
        prop_assert!(!half.is_algebraic_integer());
    }

    #[test]
    fn commensurability_is_an_equivalence(i in 0usize..55, j in 0usize..55, l in 0usize..55) {
        let t = valid_types(12);
        let r = |a: usize, b: usize| commensurable(t[a], t[b]).commensurable;
        prop_assert!(r(i, i));
        prop_assert_eq!(r(i, j), r(j, i));
        prop_assert!(!(r(i, j) && r(j, l)) || r(i, l));
    }

    #[test]
    fn lorentz_transforms_preserve_angles(seed in any::<u64>(), pick in 0usize..4) {
        let (m, n) = [(6, 4), (6, 6), (7, 3), (5, 5)][pick];
        let p = build_hyperbolic_presentation(m, n).unwrap();
        let r = realize(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l: Matrix4<f64> = random_lorentz(&mut rng);
        let j = form_matrix();
        prop_assert!((l.transpose() * j * l - j).abs().max() < 1e-9);
        let moved = r.transformed(&l);
        for (a, b) in r.angle_checks(&p).iter().zip(moved.angle_checks(&p)) {
            prop_assert!((a.measured - b.measured).abs() < 1e-9);
        }
        let e: Vec<Vec4> = moved.normals.clone();
        prop_assert!((inner(&e[0], &e[0]) - 1.0).abs() < 1e-9);
    }
}
