//! Fixed-point ball arithmetic: `[(mid - rad) / 2^prec, (mid + rad) / 2^prec]`.
//!
//! Every operation widens the radius enough to contain the exact result, so a
//! sign read off a ball with `|mid| > rad` is certified.

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug)]
pub(crate) struct Ball {
    pub mid: BigInt,
    pub rad: BigInt,
    pub prec: u32,
}

impl Ball {
    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        Ball { mid: n << prec, rad: BigInt::zero(), prec }
    }

    #[cfg(test)]
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        let (q, r) = (num << prec).div_mod_floor(den);
        let rad = if r.is_zero() { BigInt::zero() } else { BigInt::one() };
        Ball { mid: q, rad, prec }
    }

    pub fn add(&self, other: &Ball) -> Ball {
        debug_assert_eq!(self.prec, other.prec);
        Ball { mid: &self.mid + &other.mid, rad: &self.rad + &other.rad, prec: self.prec }
    }

    pub fn sub(&self, other: &Ball) -> Ball {
        Ball { mid: &self.mid - &other.mid, rad: &self.rad + &other.rad, prec: self.prec }
    }

    pub fn add_int(&self, n: &BigInt) -> Ball {
        Ball { mid: &self.mid + (n << self.prec), rad: self.rad.clone(), prec: self.prec }
    }

    pub fn mul(&self, other: &Ball) -> Ball {
        let p = self.prec;
        let prod = &self.mid * &other.mid;
        let err = self.mid.abs() * &other.rad + other.mid.abs() * &self.rad + &self.rad * &other.rad;
        let mid = prod >> p;
        let rad = ceil_shift(&err, p) + 1u32;
        Ball { mid, rad, prec: p }
    }

    pub fn mul_int(&self, n: &BigInt) -> Ball {
        Ball { mid: &self.mid * n, rad: &self.rad * n.abs(), prec: self.prec }
    }

    pub fn div_int(&self, n: &BigInt) -> Ball {
        let mut n = n.clone();
        let mut mid = self.mid.clone();
        if n.is_negative() {
            n = -n;
            mid = -mid;
        }
        let q = mid.div_floor(&n);
        let rad = self.rad.div_ceil(&n) + 1u32;
        Ball { mid: q, rad, prec: self.prec }
    }

    /// Square root of a ball that lies in `[0, inf)`; `None` if it straddles 0.
    pub fn sqrt(&self) -> Option<Ball> {
        let lo = &self.mid - &self.rad;
        if lo.is_negative() {
            return None;
        }
        let hi = &self.mid + &self.rad;
        let s_lo = (lo << self.prec).sqrt();
        let hi_scaled = hi << self.prec;
        let mut s_hi = hi_scaled.sqrt();
        if &s_hi * &s_hi < hi_scaled {
            s_hi += 1u32;
        }
        let mid = (&s_lo + &s_hi) >> 1;
        let rad = (&s_hi - &s_lo + 1u32) / 2u32 + 1u32;
        Some(Ball { mid, rad, prec: self.prec })
    }

    pub fn sign(&self) -> Option<Ordering> {
        if self.mid > self.rad {
            Some(Ordering::Greater)
        } else if -&self.mid > self.rad {
            Some(Ordering::Less)
        } else if self.mid.is_zero() && self.rad.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// True when the radius is below `2^-bits` relative to the midpoint.
    pub fn relatively_tight(&self, bits: u32) -> bool {
        (&self.rad << bits) <= self.mid.abs()
    }

    pub fn to_f64(&self) -> f64 {
        shifted_to_f64(&self.mid, self.prec)
    }
}

fn ceil_shift(x: &BigInt, p: u32) -> BigInt {
    let q = x >> p;
    if (&q << p) == *x {
        q
    } else {
        q + 1u32
    }
}

/// `x / 2^p` as the nearest-ish double.
pub(crate) fn shifted_to_f64(x: &BigInt, p: u32) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return 0.0;
    }
    let keep = 62u64;
    let (mant, exp) = if bits > keep {
        let drop = bits - keep;
        (x >> drop, drop as i64 - i64::from(p))
    } else {
        (x.clone(), -i64::from(p))
    };
    let m = mant.to_i64().unwrap() as f64;
    let sign = if x.sign() == Sign::Minus { -1.0 } else { 1.0 };
    let mut v = m.abs();
    let mut e = exp;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    sign * v * 2f64.powi(e as i32)
}

/// `atan(1/n)` by its alternating series.
fn atan_inv(n: u32, prec: u32) -> Ball {
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let mut power = Ball::from_int(&BigInt::one(), prec).div_int(&n);
    let mut sum = Ball { mid: BigInt::zero(), rad: BigInt::zero(), prec };
    let mut k: u64 = 0;
    loop {
        let term = power.div_int(&BigInt::from(2 * k + 1));
        sum = if k % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };
        power = power.div_int(&n2);
        k += 1;
        if power.mid.abs() <= power.rad {
            break;
        }
    }
    // The alternating tail is bounded by the next term.
    sum.rad += power.mid.abs() + &power.rad;
    sum
}

pub(crate) fn pi(prec: u32) -> Ball {
    let a = atan_inv(5, prec).mul_int(&BigInt::from(16));
    let b = atan_inv(239, prec).mul_int(&BigInt::from(4));
    a.sub(&b)
}

/// `cos(x)` for a ball with `|x| <= 2`.
pub(crate) fn cos(x: &Ball) -> Ball {
    let prec = x.prec;
    let x2 = x.mul(x);
    let mut term = Ball::from_int(&BigInt::one(), prec);
    let mut sum = term.clone();
    let mut k: u64 = 0;
    loop {
        term = term.mul(&x2).div_int(&BigInt::from((2 * k + 1) * (2 * k + 2)));
        k += 1;
        sum = if k % 2 == 1 { sum.sub(&term) } else { sum.add(&term) };
        if term.mid.abs() <= term.rad && k > 2 {
            break;
        }
    }
    sum.rad += term.mid.abs() + &term.rad;
    sum
}

/// `2 cos(pi / l)` at the requested precision.
pub(crate) fn two_cos_pi_over(l: u64, prec: u32) -> Ball {
    match l {
        1 => Ball::from_int(&BigInt::from(-2), prec),
        2 => Ball::from_int(&BigInt::zero(), prec),
        3 => Ball::from_int(&BigInt::one(), prec),
        _ => {
            let work = prec + 32;
            let x = pi(work).div_int(&BigInt::from(l));
            let c = cos(&x).mul_int(&BigInt::from(2));
            c.reprec(prec)
        }
    }
}

impl Ball {
    /// Drop to a lower precision, widening the radius.
    pub fn reprec(&self, prec: u32) -> Ball {
        if prec >= self.prec {
            let s = prec - self.prec;
            return Ball { mid: &self.mid << s, rad: &self.rad << s, prec };
        }
        let s = self.prec - prec;
        Ball { mid: &self.mid >> s, rad: ceil_shift(&self.rad, s) + 1u32, prec }
    }
}
