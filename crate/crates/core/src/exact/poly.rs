//! Integer polynomials with a shared denominator, reduced modulo a monic
//! integer modulus.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coordinates `num / den` on the power basis `1, g, g^2, ...`.
///
/// Normal form: `den > 0`, no trailing zero numerators, and the content of
/// `num` is coprime to `den`. Zero is the empty vector over 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Coords {
    pub num: Vec<BigInt>,
    pub den: BigInt,
}

impl Coords {
    pub fn zero() -> Self {
        Coords { num: Vec::new(), den: BigInt::one() }
    }

    pub fn from_int(n: BigInt) -> Self {
        Coords::new(vec![n], BigInt::one())
    }

    pub fn from_ratio(q: &BigRational) -> Self {
        Coords::new(vec![q.numer().clone()], q.denom().clone())
    }

    pub fn new(num: Vec<BigInt>, den: BigInt) -> Self {
        let mut c = Coords { num, den };
        c.normalize();
        c
    }

    pub fn from_rationals(coeffs: &[BigRational]) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num = coeffs.iter().map(|q| q.numer() * (&den / q.denom())).collect();
        Coords::new(num, den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    #[cfg(test)]
    pub fn is_one(&self) -> bool {
        self.num.len() == 1 && self.num[0].is_one() && self.den.is_one()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant(&self) -> Option<BigRational> {
        match self.num.len() {
            0 => Some(BigRational::zero()),
            1 => Some(BigRational::new(self.num[0].clone(), self.den.clone())),
            _ => None,
        }
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        match self.num.get(i) {
            Some(c) => BigRational::new(c.clone(), self.den.clone()),
            None => BigRational::zero(),
        }
    }

    pub fn to_rationals(&self, degree: usize) -> Vec<BigRational> {
        (0..degree).map(|i| self.coeff(i)).collect()
    }

    pub fn normalize(&mut self) {
        while self.num.last().is_some_and(Zero::is_zero) {
            self.num.pop();
        }
        if self.num.is_empty() {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in &mut self.num {
                *c = -&*c;
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                return;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            for c in &mut self.num {
                *c /= &g;
            }
            self.den /= &g;
        }
    }

    pub fn neg(&self) -> Self {
        Coords { num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let g = self.den.gcd(&other.den);
        let fa = &other.den / &g;
        let fb = &self.den / &g;
        let n = self.num.len().max(other.num.len());
        let mut num = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.num.get(i);
            let b = other.num.get(i);
            let v = match (a, b) {
                (Some(a), Some(b)) => a * &fa + b * &fb,
                (Some(a), None) => a * &fa,
                (None, Some(b)) => b * &fb,
                (None, None) => unreachable!(),
            };
            num.push(v);
        }
        Coords::new(num, &self.den * fa)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() || self.is_zero() {
            return Coords::zero();
        }
        Coords::new(
            self.num.iter().map(|c| c * q.numer()).collect(),
            &self.den * q.denom(),
        )
    }

    /// Product reduced modulo the monic `modulus` (coefficients low to high).
    pub fn mul(&self, other: &Self, modulus: &[BigInt]) -> Self {
        if self.is_zero() || other.is_zero() {
            return Coords::zero();
        }
        if self.num.len() == 1 {
            return other.scale(&BigRational::new(self.num[0].clone(), self.den.clone()));
        }
        if other.num.len() == 1 {
            return self.scale(&BigRational::new(other.num[0].clone(), other.den.clone()));
        }
        let mut prod = vec![BigInt::zero(); self.num.len() + other.num.len() - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        reduce_in_place(&mut prod, modulus);
        Coords::new(prod, &self.den * &other.den)
    }

    /// Multiplication by the generator.
    pub fn shift(&self, modulus: &[BigInt]) -> Self {
        if self.is_zero() {
            return Coords::zero();
        }
        let mut num = Vec::with_capacity(self.num.len() + 1);
        num.push(BigInt::zero());
        num.extend(self.num.iter().cloned());
        reduce_in_place(&mut num, modulus);
        Coords::new(num, self.den.clone())
    }

    /// Inverse modulo the irreducible `modulus`; `None` for zero.
    pub fn inverse(&self, modulus: &[BigInt]) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.num.len() == 1 {
            return Some(Coords::new(vec![self.den.clone()], self.num[0].clone()));
        }
        let (s, _) = extended_inverse(&self.num, modulus)?;
        // self = N / den, and s * N == 1, so self^{-1} = den * s.
        Some(Coords::new(
            s.num.iter().map(|c| c * &self.den).collect(),
            s.den,
        ))
    }
}

/// Reduce `poly` in place modulo the monic `modulus`.
pub(crate) fn reduce_in_place(poly: &mut Vec<BigInt>, modulus: &[BigInt]) {
    let d = modulus.len() - 1;
    while poly.len() > d {
        let lead = poly.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let base = poly.len() - d;
        for (k, m) in modulus[..d].iter().enumerate() {
            if !m.is_zero() {
                poly[base + k] -= &lead * m;
            }
        }
    }
    while poly.last().is_some_and(Zero::is_zero) {
        poly.pop();
    }
}

fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn content(p: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        if !c.is_zero() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
    }
    g
}

/// Extended Euclid over Q via a primitive remainder sequence.
///
/// Returns `s` with `s * a == 1 (mod modulus)` and the final constant.
fn extended_inverse(a: &[BigInt], modulus: &[BigInt]) -> Option<(Coords, BigInt)> {
    // Invariant: s_i * a == r_i (mod modulus), r_i primitive integer polys.
    let mut r0: Vec<BigInt> = modulus.to_vec();
    let mut s0 = Coords::zero();
    let mut r1: Vec<BigInt> = a.to_vec();
    trim(&mut r1);
    let mut s1 = Coords::from_int(BigInt::one());
    let c = content(&r1);
    if c.is_zero() {
        return None;
    }
    if !c.is_one() {
        r1.iter_mut().for_each(|x| *x /= &c);
        s1 = s1.scale(&BigRational::new(BigInt::one(), c));
    }
    while r1.len() > 1 {
        // lc^k * r0 = q * r1 + rem
        let lc = r1.last().unwrap().clone();
        let dr = r1.len() - 1;
        let mut rem = r0.clone();
        let mut q: Vec<BigInt> = vec![BigInt::zero(); rem.len().saturating_sub(dr)];
        let mut lc_pow = BigInt::one();
        while rem.len() > dr && !rem.is_empty() {
            let shift = rem.len() - 1 - dr;
            let t = rem.last().unwrap().clone();
            for x in rem.iter_mut() {
                *x *= &lc;
            }
            for x in q.iter_mut() {
                *x *= &lc;
            }
            lc_pow *= &lc;
            q[shift] += &t;
            for (k, b) in r1.iter().enumerate() {
                if !b.is_zero() {
                    rem[shift + k] -= &t * b;
                }
            }
            trim(&mut rem);
        }
        // s_new = lc_pow * s0 - q * s1 (polynomial product, reduced)
        let qc = Coords::new(q, BigInt::one());
        let mut s_new = s0
            .scale(&BigRational::from_integer(lc_pow))
            .sub(&qc.mul(&s1, modulus));
        if rem.is_empty() {
            return None;
        }
        let c = content(&rem);
        let c = if rem.last().unwrap().is_negative() { -c } else { c };
        rem.iter_mut().for_each(|x| *x /= &c);
        s_new = s_new.scale(&BigRational::new(BigInt::one(), c));
        r0 = std::mem::replace(&mut r1, rem);
        s0 = std::mem::replace(&mut s1, s_new);
    }
    // r1 is a primitive constant, i.e. +-1.
    let unit = r1[0].clone();
    let s = if unit.is_negative() { s1.neg() } else { s1 };
    Some((s, unit))
}

/// Moebius function for small arguments.
fn moebius(mut n: u64) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

pub(crate) fn totient(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Coefficients of the cyclotomic polynomial Phi_n, low to high.
pub(crate) fn cyclotomic(n: u64) -> Vec<BigInt> {
    let divisors: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
    let mut poly = vec![BigInt::one()];
    for &d in &divisors {
        if moebius(n / d) == 1 {
            // multiply by x^d - 1
            let mut next = vec![BigInt::zero(); poly.len() + d as usize];
            for (i, c) in poly.iter().enumerate() {
                next[i + d as usize] += c;
                next[i] -= c;
            }
            poly = next;
        }
    }
    for &d in &divisors {
        if moebius(n / d) == -1 {
            // exact division by x^d - 1
            let d = d as usize;
            let deg = poly.len() - 1;
            let mut q = vec![BigInt::zero(); deg + 1 - d];
            for i in (0..q.len()).rev() {
                let upper = if i + d < q.len() { q[i + d].clone() } else { BigInt::zero() };
                q[i] = &poly[i + d] + upper;
            }
            poly = q;
        }
    }
    poly
}

/// Minimal polynomial of 2cos(pi/l), monic, low to high.
pub(crate) fn folded_modulus(l: u64) -> Vec<BigInt> {
    if l == 1 {
        return vec![BigInt::from(2), BigInt::one()];
    }
    let phi = cyclotomic(2 * l);
    let d = (phi.len() - 1) / 2;
    // z^{-d} Phi(z) = phi[d] + sum_k phi[d+k] (z^k + z^{-k}) and
    // z^k + z^{-k} = t_k(y) with t_0 = 2, t_1 = y, t_{k+1} = y t_k - t_{k-1}.
    let mut result = vec![BigInt::zero(); d + 1];
    result[0] += &phi[d];
    let mut t_prev = vec![BigInt::from(2)];
    let mut t_cur = vec![BigInt::zero(), BigInt::one()];
    for k in 1..=d {
        let c = &phi[d + k];
        if !c.is_zero() {
            for (i, t) in t_cur.iter().enumerate() {
                if !t.is_zero() {
                    result[i] += c * t;
                }
            }
        }
        if k < d {
            let mut next = vec![BigInt::zero(); t_cur.len() + 1];
            for (i, t) in t_cur.iter().enumerate() {
                next[i + 1] += t;
            }
            for (i, t) in t_prev.iter().enumerate() {
                next[i] -= t;
            }
            t_prev = std::mem::replace(&mut t_cur, next);
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic(10), ints(&[1, -1, 1, -1, 1]));
        assert_eq!(cyclotomic(12), ints(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic(105).len() - 1, 48);
        assert!(cyclotomic(105).contains(&BigInt::from(-2)));
    }

    #[test]
    fn folding_matches_known_minimal_polynomials() {
        assert_eq!(folded_modulus(1), ints(&[2, 1]));
        assert_eq!(folded_modulus(2), ints(&[0, 1]));
        assert_eq!(folded_modulus(3), ints(&[-1, 1]));
        assert_eq!(folded_modulus(4), ints(&[-2, 0, 1]));
        assert_eq!(folded_modulus(5), ints(&[-1, -1, 1]));
        assert_eq!(folded_modulus(6), ints(&[-3, 0, 1]));
        assert_eq!(folded_modulus(12), ints(&[1, 0, -4, 0, 1]));
    }

    #[test]
    fn folded_modulus_vanishes_at_generator() {
        for l in 3..40u64 {
            let p = folded_modulus(l);
            assert_eq!((p.len() - 1) as u64, totient(2 * l) / 2);
            let g = 2.0 * (std::f64::consts::PI / l as f64).cos();
            let v = p.iter().rev().fold(0.0, |acc, c| acc * g + c.to_string().parse::<f64>().unwrap());
            let scale: f64 = p.iter().map(|c| c.to_string().parse::<f64>().unwrap().abs()).sum();
            assert!(v.abs() < 1e-9 * scale, "L={l}");
        }
    }

    #[test]
    fn inverse_round_trip() {
        let m = folded_modulus(12);
        let x = Coords::new(ints(&[3, -1, 2]), BigInt::from(5));
        let inv = x.inverse(&m).unwrap();
        assert!(x.mul(&inv, &m).is_one());
    }

    #[test]
    fn normal_form_reduces_content() {
        let c = Coords::new(ints(&[4, 6, 0]), BigInt::from(-8));
        assert_eq!(c.num, ints(&[-2, -3]));
        assert_eq!(c.den, BigInt::from(4));
    }
}
