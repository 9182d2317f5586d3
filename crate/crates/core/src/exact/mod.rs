//! Exact arithmetic in `K0 = Q(2cos(pi/L))` and in quadratic extensions
//! `K0(sqrt(R))`.
//!
//! Elements are stored as rational coordinates on the power basis of the
//! generator `g = 2cos(pi/L)`. The ring of integers of `K0` is `Z[g]`, so an
//! element of `K0` is an algebraic integer exactly when its coordinates are
//! integers.

mod ball;
pub mod matrix;
mod modular;
mod poly;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use ball::Ball;
use modular::SquareTest;
use poly::Coords;

pub use modular_api::is_probable_prime;

/// Errors raised by exact arithmetic.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("field level must be positive")]
    InvalidLevel,
    #[error("operands live in different fields (L={left} and L={right})")]
    FieldMismatch { left: u64, right: u64 },
    #[error("operands carry different square roots")]
    RadicandMismatch,
    #[error("{k} does not divide L={l}")]
    NotDivisor { k: u64, l: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("radicand is not positive")]
    NonPositiveRadicand,
    #[error("radicand must lie in the base field")]
    RadicandNotInBase,
    #[error("square test undecided for a radicand in L={l}")]
    UnresolvedSquare { l: u64 },
}

const BASE_PREC: u32 = 256;

/// The real cyclotomic field `Q(2cos(pi/L))`.
#[derive(Debug)]
pub struct FieldContext {
    level: u64,
    modulus: Vec<BigInt>,
    generator: Ball,
}

impl FieldContext {
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Monic minimal polynomial of the generator, coefficients low to high.
    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    /// The generator `2cos(pi/L)` as a double.
    pub fn real_embedding(&self) -> f64 {
        self.generator.to_f64()
    }

    fn generator_ball(&self, prec: u32) -> Ball {
        if prec <= BASE_PREC {
            self.generator.reprec(prec)
        } else {
            ball::two_cos_pi_over(self.level, prec)
        }
    }
}

/// Build the field `Q(2cos(pi/L))`.
pub fn make_context(level: u64) -> Result<Arc<FieldContext>, AlgebraError> {
    if level == 0 {
        return Err(AlgebraError::InvalidLevel);
    }
    Ok(Arc::new(FieldContext {
        level,
        modulus: poly::folded_modulus(level),
        generator: ball::two_cos_pi_over(level, BASE_PREC),
    }))
}

/// Euler's totient, exposed for degree bookkeeping.
pub fn totient(n: u64) -> u64 {
    poly::totient(n)
}

/// An element `u + v sqrt(R)` with `u, v, R` in `K0`.
#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    ctx: Arc<FieldContext>,
    base: Coords,
    ext: Option<(Coords, Arc<Coords>)>,
}

impl AlgebraicNumber {
    fn from_parts(ctx: &Arc<FieldContext>, base: Coords, ext: Option<(Coords, Arc<Coords>)>) -> Self {
        let ext = ext.filter(|(v, _)| !v.is_zero());
        AlgebraicNumber { ctx: Arc::clone(ctx), base, ext }
    }

    pub fn zero(ctx: &Arc<FieldContext>) -> Self {
        Self::from_parts(ctx, Coords::zero(), None)
    }

    pub fn one(ctx: &Arc<FieldContext>) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &Arc<FieldContext>, n: i64) -> Self {
        Self::from_parts(ctx, Coords::from_int(BigInt::from(n)), None)
    }

    pub fn from_rational(ctx: &Arc<FieldContext>, q: &BigRational) -> Self {
        Self::from_parts(ctx, Coords::from_ratio(q), None)
    }

    /// Element of `K0` from coordinates on `1, g, g^2, ...`; longer inputs are
    /// reduced modulo the field's modulus.
    pub fn from_base_coeffs(ctx: &Arc<FieldContext>, coeffs: &[BigRational]) -> Self {
        let mut c = Coords::from_rationals(coeffs);
        poly::reduce_in_place(&mut c.num, &ctx.modulus);
        c.normalize();
        Self::from_parts(ctx, c, None)
    }

    /// The generator `2cos(pi/L)`.
    pub fn generator(ctx: &Arc<FieldContext>) -> Self {
        let g = Coords::from_int(BigInt::one()).shift(&ctx.modulus);
        Self::from_parts(ctx, g, None)
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    pub fn level(&self) -> u64 {
        self.ctx.level
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.ext.is_none()
    }

    pub fn has_extension(&self) -> bool {
        self.ext.is_some()
    }

    /// Coordinates of the `K0` part, padded to the field degree.
    pub fn base_coeffs(&self) -> Vec<BigRational> {
        self.base.to_rationals(self.ctx.degree())
    }

    /// Coordinates of the coefficient of `sqrt(R)`, if any.
    pub fn ext_coeffs(&self) -> Option<Vec<BigRational>> {
        self.ext.as_ref().map(|(v, _)| v.to_rationals(self.ctx.degree()))
    }

    /// The radicand `R`, if the element has an extension part.
    pub fn radicand(&self) -> Option<AlgebraicNumber> {
        self.ext
            .as_ref()
            .map(|(_, r)| Self::from_parts(&self.ctx, (**r).clone(), None))
    }

    /// The `K0` part `u` of `u + v sqrt(R)`.
    pub fn base_part(&self) -> AlgebraicNumber {
        Self::from_parts(&self.ctx, self.base.clone(), None)
    }

    /// The coefficient `v` of `sqrt(R)`.
    pub fn ext_part(&self) -> AlgebraicNumber {
        let v = self.ext.as_ref().map(|(v, _)| v.clone()).unwrap_or_else(Coords::zero);
        Self::from_parts(&self.ctx, v, None)
    }

    fn check_field(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.ctx.level != other.ctx.level {
            return Err(AlgebraError::FieldMismatch { left: self.ctx.level, right: other.ctx.level });
        }
        Ok(())
    }

    fn common_radicand(&self, other: &Self) -> Result<Option<Arc<Coords>>, AlgebraError> {
        self.check_field(other)?;
        match (&self.ext, &other.ext) {
            (Some((_, a)), Some((_, b))) => {
                if Arc::ptr_eq(a, b) || a == b {
                    Ok(Some(Arc::clone(a)))
                } else {
                    Err(AlgebraError::RadicandMismatch)
                }
            }
            (Some((_, a)), None) => Ok(Some(Arc::clone(a))),
            (None, Some((_, b))) => Ok(Some(Arc::clone(b))),
            (None, None) => Ok(None),
        }
    }

    fn ext_or_zero(&self) -> Coords {
        self.ext.as_ref().map(|(v, _)| v.clone()).unwrap_or_else(Coords::zero)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        let r = self.common_radicand(other)?;
        let base = self.base.add(&other.base);
        let ext = r.map(|r| (self.ext_or_zero().add(&other.ext_or_zero()), r));
        Ok(Self::from_parts(&self.ctx, base, ext))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let ext = self.ext.as_ref().map(|(v, r)| (v.neg(), Arc::clone(r)));
        Self::from_parts(&self.ctx, self.base.neg(), ext)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        let r = self.common_radicand(other)?;
        let m = &self.ctx.modulus;
        let Some(r) = r else {
            return Ok(Self::from_parts(&self.ctx, self.base.mul(&other.base, m), None));
        };
        let (u1, v1) = (&self.base, self.ext_or_zero());
        let (u2, v2) = (&other.base, other.ext_or_zero());
        // Multiply the two ext parts first: they are usually sparse, R dense.
        let vv = v1.mul(&v2, m);
        let base = u1.mul(u2, m).add(&vv.mul(&r, m));
        let ext = u1.mul(&v2, m).add(&u2.mul(&v1, m));
        Ok(Self::from_parts(&self.ctx, base, Some((ext, r))))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let ext = self.ext.as_ref().map(|(v, r)| (v.scale(q), Arc::clone(r)));
        Self::from_parts(&self.ctx, self.base.scale(q), ext)
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact inverse: `(u + v sqrt R)^-1 = (u - v sqrt R) / (u^2 - v^2 R)`.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let m = &self.ctx.modulus;
        match &self.ext {
            None => {
                let inv = self.base.inverse(m).ok_or(AlgebraError::DivisionByZero)?;
                Ok(Self::from_parts(&self.ctx, inv, None))
            }
            Some((v, r)) => {
                let norm = self.base.mul(&self.base, m).sub(&v.mul(v, m).mul(r, m));
                let ninv = norm.inverse(m).ok_or(AlgebraError::DivisionByZero)?;
                let base = self.base.mul(&ninv, m);
                let ext = v.neg().mul(&ninv, m);
                Ok(Self::from_parts(&self.ctx, base, Some((ext, Arc::clone(r)))))
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.checked_mul(&other.inverse()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// The rational value, when the element lies in `Q`.
    pub fn is_rational(&self) -> Option<BigRational> {
        if self.ext.is_some() {
            return None;
        }
        self.base.constant()
    }

    /// Integrality over `Z`.
    ///
    /// In `K0` this is integrality of the coordinates. For `u + v sqrt(R)` the
    /// relative characteristic polynomial `t^2 - 2u t + (u^2 - v^2 R)` must
    /// have coefficients in `Z[g]`.
    pub fn is_algebraic_integer(&self) -> bool {
        match &self.ext {
            None => self.base.is_integral(),
            Some(_) => {
                let (trace, norm) = self.relative_trace_norm();
                trace.base.is_integral() && norm.base.is_integral()
            }
        }
    }

    /// `(2u, u^2 - v^2 R)` for `u + v sqrt(R)`, both in `K0`.
    pub fn relative_trace_norm(&self) -> (AlgebraicNumber, AlgebraicNumber) {
        let m = &self.ctx.modulus;
        let trace = self.base.scale(&BigRational::from_integer(BigInt::from(2)));
        let norm = match &self.ext {
            None => self.base.mul(&self.base, m),
            Some((v, r)) => self.base.mul(&self.base, m).sub(&v.mul(v, m).mul(r, m)),
        };
        (Self::from_parts(&self.ctx, trace, None), Self::from_parts(&self.ctx, norm, None))
    }

    /// Dimension over `Q` of the ambient algebra (`d` or `2d`).
    pub fn ambient_dimension(&self) -> usize {
        let d = self.ctx.degree();
        if self.ext.is_some() {
            2 * d
        } else {
            d
        }
    }

    fn coordinate_vector(&self, dim: usize) -> Vec<BigRational> {
        let d = self.ctx.degree();
        let mut v = self.base.to_rationals(d);
        if dim > d {
            v.extend(self.ext_or_zero().to_rationals(d));
        }
        v
    }

    /// Minimal polynomial over `Q`, monic, coefficients low to high.
    ///
    /// Found as the first linear dependency among `1, x, x^2, ...` (a Krylov
    /// sequence for the multiplication-by-x map).
    pub fn minimal_polynomial(&self) -> Vec<BigRational> {
        let dim = self.ambient_dimension();
        struct Row {
            pivot: usize,
            vec: Vec<BigRational>,
            combo: Vec<BigRational>,
        }
        let mut rows: Vec<Row> = Vec::new();
        let mut power = Self::one(&self.ctx);
        for k in 0..=dim {
            let mut v = power.coordinate_vector(dim);
            let mut combo = vec![BigRational::zero(); k + 1];
            combo[k] = BigRational::one();
            for row in &rows {
                let f = v[row.pivot].clone();
                if f.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(&row.vec) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
                for (x, y) in combo.iter_mut().zip(&row.combo) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
            match v.iter().position(|x| !x.is_zero()) {
                None => {
                    let lead = combo[k].clone();
                    return combo.into_iter().map(|c| c / &lead).collect();
                }
                Some(pivot) => {
                    let p = v[pivot].clone();
                    let vec = v.into_iter().map(|x| x / &p).collect();
                    let combo = combo.into_iter().map(|x| x / &p).collect();
                    rows.push(Row { pivot, vec, combo });
                }
            }
            power = &power * self;
        }
        unreachable!("a dependency exists within the ambient dimension")
    }

    /// Matrix of multiplication by `self` on the basis
    /// `1, g, .., g^{d-1}` (and the same times `sqrt(R)` when extended).
    /// Column `j` holds the coordinates of `self * b_j`.
    pub fn multiplication_matrix(&self) -> Vec<Vec<BigRational>> {
        let dim = self.ambient_dimension();
        let d = self.ctx.degree();
        let mut columns = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut coeffs = vec![BigRational::zero(); d];
            coeffs[j % d] = BigRational::one();
            let c = Coords::from_rationals(&coeffs);
            let b = if j < d {
                Self::from_parts(&self.ctx, c, None)
            } else {
                let r = self.ext.as_ref().map(|(_, r)| Arc::clone(r)).unwrap();
                Self::from_parts(&self.ctx, Coords::zero(), Some((c, r)))
            };
            let prod = &b * self;
            columns.push(prod.coordinate_vector(dim));
        }
        (0..dim).map(|i| (0..dim).map(|j| columns[j][i].clone()).collect()).collect()
    }

    fn precision_hint(&self) -> u32 {
        let mut bits = self.base.num.iter().map(|c| c.bits()).max().unwrap_or(0) + self.base.den.bits();
        if let Some((v, r)) = &self.ext {
            let vb = v.num.iter().map(|c| c.bits()).max().unwrap_or(0) + v.den.bits();
            let rb = r.num.iter().map(|c| c.bits()).max().unwrap_or(0) + r.den.bits();
            bits = bits.max(vb + rb);
        }
        (bits + 2 * self.ctx.degree() as u64 + 96).min(u64::from(u32::MAX / 4)) as u32
    }

    fn eval_coords(&self, c: &Coords, g: &Ball) -> Ball {
        let prec = g.prec;
        let mut acc = Ball::from_int(&BigInt::zero(), prec);
        for a in c.num.iter().rev() {
            acc = acc.mul(g).add_int(a);
        }
        acc.div_int(&c.den)
    }

    fn ball(&self, prec: u32) -> Option<Ball> {
        let g = self.ctx.generator_ball(prec);
        let u = self.eval_coords(&self.base, &g);
        match &self.ext {
            None => Some(u),
            Some((v, r)) => {
                let root = self.eval_coords(r, &g).sqrt()?;
                Some(u.add(&self.eval_coords(v, &g).mul(&root)))
            }
        }
    }

    /// Certified sign under the real embedding `g -> 2cos(pi/L)`.
    pub fn sign(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let mut prec = self.precision_hint();
        loop {
            if let Some(s) = self.ball(prec).and_then(|b| b.sign()) {
                if s != Ordering::Equal {
                    return s;
                }
            }
            prec = prec.saturating_mul(2);
        }
    }

    /// Value under the real embedding, correct to about 53 bits.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut prec = self.precision_hint();
        loop {
            if let Some(b) = self.ball(prec) {
                if b.relatively_tight(56) {
                    return b.to_f64();
                }
            }
            prec = prec.saturating_mul(2);
        }
    }

    /// Exact equality of real values, also across different radicands when
    /// both squares lie in `K0` (pure radicals or base elements).
    pub fn same_value(&self, other: &Self) -> Result<bool, AlgebraError> {
        self.check_field(other)?;
        if let Ok(diff) = self.checked_sub(other) {
            return Ok(diff.is_zero());
        }
        if !self.base.is_zero() || !other.base.is_zero() {
            return Err(AlgebraError::RadicandMismatch);
        }
        if self.sign() != other.sign() {
            return Ok(false);
        }
        let a = self * self;
        let b = other * other;
        Ok(a.checked_sub(&b)?.is_zero())
    }

    /// JSON encoding with exact coordinates and an advisory approximation.
    pub fn to_json(&self) -> Value {
        let d = self.ctx.degree();
        let coords = |c: &Coords| -> Value {
            Value::Array(c.to_rationals(d).iter().map(rational_pair_json).collect())
        };
        let (ext, radicand) = match &self.ext {
            None => (Value::Null, Value::Null),
            Some((v, r)) => (coords(v), Self::from_parts(&self.ctx, (**r).clone(), None).to_json()),
        };
        json!({
            "L": self.ctx.level,
            "base": coords(&self.base),
            "ext": ext,
            "radicand": radicand,
            "approx": self.to_f64(),
        })
    }
}

/// `[num, den]` in lowest terms as JSON integers of any size.
pub fn rational_pair_json(q: &BigRational) -> Value {
    Value::Array(vec![bigint_json(q.numer()), bigint_json(q.denom())])
}

/// A JSON integer of arbitrary size.
pub fn bigint_json(n: &BigInt) -> Value {
    Value::Number(n.to_string().parse().expect("integer literal"))
}

/// `p/q` or `p` in lowest terms.
pub fn rational_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `2cos(pi/k)` for `k | L`, via `t_0 = 2, t_1 = g, t_{j+1} = g t_j - t_{j-1}`
/// at `j = L/k`.
pub fn embed_cos(ctx: &Arc<FieldContext>, k: u64) -> Result<AlgebraicNumber, AlgebraError> {
    if k == 0 || ctx.level % k != 0 {
        return Err(AlgebraError::NotDivisor { k, l: ctx.level });
    }
    let j = ctx.level / k;
    let m = &ctx.modulus;
    let mut prev = Coords::from_int(BigInt::from(2));
    let mut cur = Coords::from_int(BigInt::one()).shift(m);
    for _ in 1..j {
        let next = cur.shift(m).sub(&prev);
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(AlgebraicNumber::from_parts(ctx, cur, None))
}

/// `sqrt(D)` for `D > 0` in `K0`: a base element when `D` is a square in `K0`,
/// otherwise the extension element `1 * sqrt(D)`.
///
/// Non-squares are certified by a quadratic non-residue at a split prime;
/// squares are certified by exact verification of `r^2 = D`.
pub fn adjoin_sqrt(d: &AlgebraicNumber) -> Result<AlgebraicNumber, AlgebraError> {
    if d.ext.is_some() {
        return Err(AlgebraError::RadicandNotInBase);
    }
    if d.sign() != Ordering::Greater {
        return Err(AlgebraError::NonPositiveRadicand);
    }
    let ctx = &d.ctx;
    // D = N / den, so sqrt(D) = sqrt(N den) / den with N den integral.
    let den = d.base.den.clone();
    let e = Coords::new(d.base.num.iter().map(|c| c * &den).collect(), BigInt::one());
    match modular::integral_square_root(&e, ctx.level, &ctx.modulus) {
        SquareTest::Square(r) => {
            let root = AlgebraicNumber::from_parts(ctx, r, None)
                .scale(&BigRational::new(BigInt::one(), den));
            Ok(if root.sign() == Ordering::Less { root.neg() } else { root })
        }
        SquareTest::NonSquare => Ok(AlgebraicNumber::from_parts(
            ctx,
            Coords::zero(),
            Some((Coords::from_int(BigInt::one()), Arc::new(d.base.clone()))),
        )),
        SquareTest::Undecided => Err(AlgebraError::UnresolvedSquare { l: ctx.level }),
    }
}

mod modular_api {
    use num_bigint::BigInt;
    use num_traits::{One, ToPrimitive, Zero};

    /// Miller-Rabin with fixed bases; deterministic below `3.3e24`.
    pub fn is_probable_prime(n: &BigInt) -> bool {
        if let Some(small) = n.to_u64() {
            return super::modular::is_prime_u64(small);
        }
        if n <= &BigInt::one() {
            return false;
        }
        let two = BigInt::from(2);
        if (n % &two).is_zero() {
            return false;
        }
        let n1 = n - 1u32;
        let mut d = n1.clone();
        let mut s = 0u32;
        while (&d % &two).is_zero() {
            d /= &two;
            s += 1;
        }
        'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
            let mut x = BigInt::from(a).modpow(&d, n);
            if x.is_one() || x == n1 {
                continue;
            }
            for _ in 1..s {
                x = x.modpow(&two, n);
                if x == n1 {
                    continue 'witness;
                }
            }
            return false;
        }
        true
    }
}

impl PartialEq for AlgebraicNumber {
    /// Structural equality; elements with different radicands compare unequal
    /// unless both lie in `K0`.
    fn eq(&self, other: &Self) -> bool {
        self.ctx.level == other.ctx.level
            && self.base == other.base
            && match (&self.ext, &other.ext) {
                (None, None) => true,
                (Some((v1, r1)), Some((v2, r2))) => v1 == v2 && (Arc::ptr_eq(r1, r2) || r1 == r2),
                _ => false,
            }
    }
}

impl Eq for AlgebraicNumber {}

macro_rules! forward_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait<&AlgebraicNumber> for &AlgebraicNumber {
            type Output = AlgebraicNumber;
            /// Panics when the operands live in incompatible fields; use the
            /// `checked_*` form to handle that case.
            fn $method(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$trait<AlgebraicNumber> for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $method(self, rhs: AlgebraicNumber) -> AlgebraicNumber {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);

impl std::ops::Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber::neg(self)
    }
}

impl std::ops::Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber::neg(&self)
    }
}

fn fmt_coords(c: &Coords, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.is_zero() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, n) in c.num.iter().enumerate().rev() {
        if n.is_zero() {
            continue;
        }
        let q = BigRational::new(n.clone(), c.den.clone());
        let neg = q.is_negative();
        let a = q.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        first = false;
        let mag = rational_string(&a);
        match (i, a.is_one()) {
            (0, _) => write!(f, "{mag}")?,
            (1, true) => write!(f, "g")?,
            (1, false) => write!(f, "{mag}*g")?,
            (_, true) => write!(f, "g^{i}")?,
            (_, false) => write!(f, "{mag}*g^{i}")?,
        }
    }
    Ok(())
}

impl fmt::Display for AlgebraicNumber {
    /// Polynomial in `g = 2cos(pi/L)`, with `sqrt(...)` for the extension.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.ext {
            None => fmt_coords(&self.base, f),
            Some((v, r)) => {
                if !self.base.is_zero() {
                    fmt_coords(&self.base, f)?;
                    write!(f, " + ")?;
                }
                write!(f, "(")?;
                fmt_coords(v, f)?;
                write!(f, ")*sqrt(")?;
                fmt_coords(r, f)?;
                write!(f, ")")
            }
        }
    }
}

/// Twelve significant digits.
pub fn format_decimal(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.*e}", 11, x);
    let (mant, exp) = s.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let t = format!("{:.*}", decimals, x);
        if t.contains('.') {
            t.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            t
        }
    } else {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{exp}")
    }
}
