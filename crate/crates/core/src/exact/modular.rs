//! Arithmetic modulo primes `p = 1 (mod 2L)`, where the modulus of the field
//! splits into linear factors `x - (w^k + w^-k)`.
//!
//! Used to certify non-squares (a quadratic non-residue at any root) and to
//! recover integral square roots by sign search over the roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use super::poly::Coords;

const PRIME_FLOOR: u64 = 1 << 61;
const SIGN_SEARCH_MAX_DEGREE: usize = 24;
const COORD_BOUND_BITS: u32 = 40;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A prime splitting the field completely, with the images of the generator.
#[derive(Clone, Debug)]
pub(crate) struct SplitPrime {
    pub p: u64,
    pub roots: Vec<u64>,
}

impl SplitPrime {
    /// The `index`-th split prime above `2^61` for the field of level `l >= 3`.
    pub fn nth(l: u64, index: usize) -> SplitPrime {
        let step = 2 * l;
        let mut p = (PRIME_FLOOR / step + 1) * step + 1;
        let mut found = 0;
        loop {
            if is_prime_u64(p) {
                if found == index {
                    break;
                }
                found += 1;
            }
            p += step;
        }
        let factors = prime_factors(step);
        let omega = (2u64..)
            .map(|h| pow_mod(h, (p - 1) / step, p))
            .find(|&w| factors.iter().all(|&q| pow_mod(w, step / q, p) != 1))
            .expect("a primitive root of unity exists");
        let roots = (1..l)
            .filter(|k| k.gcd(&step) == 1)
            .map(|k| {
                let wk = pow_mod(omega, k, p);
                add_mod(wk, inv_mod(wk, p), p)
            })
            .collect();
        SplitPrime { p, roots }
    }

    fn reduce(&self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.p)).to_u64().unwrap()
    }

    /// Values of an integral element at every root.
    pub fn values(&self, c: &Coords) -> Vec<u64> {
        let coeffs: Vec<u64> = c.num.iter().map(|x| self.reduce(x)).collect();
        self.roots
            .iter()
            .map(|&r| coeffs.iter().rev().fold(0, |acc, &a| add_mod(mul_mod(acc, r, self.p), a, self.p)))
            .collect()
    }

    pub fn is_residue(&self, v: u64) -> bool {
        v == 0 || pow_mod(v, (self.p - 1) / 2, self.p) == 1
    }

    /// Tonelli-Shanks square root of a residue.
    pub fn sqrt(&self, a: u64) -> u64 {
        let p = self.p;
        if a == 0 {
            return 0;
        }
        let mut q = p - 1;
        let mut s = 0;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let z = (2u64..).find(|&z| !self.is_residue(z)).unwrap();
        let mut m = s;
        let mut c = pow_mod(z, q, p);
        let mut t = pow_mod(a, q, p);
        let mut r = pow_mod(a, q.div_ceil(2), p);
        while t != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt != 1 {
                tt = mul_mod(tt, tt, p);
                i += 1;
            }
            let b = pow_mod(c, 1 << (m - i - 1), p);
            m = i;
            c = mul_mod(b, b, p);
            t = mul_mod(t, c, p);
            r = mul_mod(r, b, p);
        }
        r
    }

    /// Inverse of the Vandermonde matrix `V[k][i] = roots[k]^i`, column major
    /// by root: `cols[k]` is the k-th column.
    fn vandermonde_inverse_columns(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let d = self.roots.len();
        let mut a: Vec<Vec<u64>> = self
            .roots
            .iter()
            .map(|&r| {
                let mut row = Vec::with_capacity(2 * d);
                let mut x = 1;
                for _ in 0..d {
                    row.push(x);
                    x = mul_mod(x, r, p);
                }
                row
            })
            .collect();
        for (k, row) in a.iter_mut().enumerate() {
            row.extend((0..d).map(|j| u64::from(j == k)));
        }
        for col in 0..d {
            let piv = (col..d).find(|&r| a[r][col] != 0).expect("distinct roots");
            a.swap(col, piv);
            let inv = inv_mod(a[col][col], p);
            for x in a[col].iter_mut() {
                *x = mul_mod(*x, inv, p);
            }
            let pivot_row = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != col && row[col] != 0 {
                    let f = row[col];
                    for (x, &y) in row.iter_mut().zip(&pivot_row) {
                        *x = sub_mod(*x, mul_mod(f, y, p), p);
                    }
                }
            }
        }
        // W = inverse, W[i][k] = a[i][d + k]; column k of W.
        (0..d).map(|k| (0..d).map(|i| a[i][d + k]).collect()).collect()
    }
}

/// Outcome of a square test on an integral element.
pub(crate) enum SquareTest {
    Square(Coords),
    NonSquare,
    Undecided,
}

/// Decide whether the integral element `e` of the field of level `l` is a
/// square, returning the root when it is.
pub(crate) fn integral_square_root(e: &Coords, l: u64, modulus: &[BigInt]) -> SquareTest {
    debug_assert!(e.is_integral());
    if let Some(q) = e.constant() {
        let n = q.numer();
        if n.is_negative() {
            return SquareTest::NonSquare;
        }
        let r = n.sqrt();
        if &r * &r == *n {
            return SquareTest::Square(Coords::from_int(r));
        }
    }
    let first = SplitPrime::nth(l, 0);
    for i in 0..6 {
        let other;
        let sp = if i == 0 {
            &first
        } else {
            other = SplitPrime::nth(l, i);
            &other
        };
        if sp.values(e).iter().any(|&v| !sp.is_residue(v)) {
            return SquareTest::NonSquare;
        }
    }
    let sp = &first;
    let d = sp.roots.len();
    if d > SIGN_SEARCH_MAX_DEGREE {
        return SquareTest::Undecided;
    }
    match sign_search(sp, e, modulus) {
        Some(r) => SquareTest::Square(r),
        None => SquareTest::Undecided,
    }
}

fn sign_search(sp: &SplitPrime, e: &Coords, modulus: &[BigInt]) -> Option<Coords> {
    let p = sp.p;
    let d = sp.roots.len();
    let roots_of_values: Vec<u64> = sp.values(e).into_iter().map(|v| sp.sqrt(v)).collect();
    let cols = sp.vandermonde_inverse_columns();
    let scaled: Vec<Vec<u64>> = cols
        .iter()
        .zip(&roots_of_values)
        .map(|(col, &s)| col.iter().map(|&w| mul_mod(w, s, p)).collect())
        .collect();
    let mut c = vec![0u64; d];
    for col in &scaled {
        for (x, &y) in c.iter_mut().zip(col) {
            *x = add_mod(*x, y, p);
        }
    }
    let mut positive = vec![true; d];
    let bound = 1u64 << COORD_BOUND_BITS;
    let small = |c: &[u64]| c.iter().all(|&x| x < bound || p - x < bound);
    let total: u64 = 1 << (d - 1);
    for step in 0..total {
        if step > 0 {
            let k = step.trailing_zeros() as usize + 1;
            for (x, &y) in c.iter_mut().zip(&scaled[k]) {
                let twice = add_mod(y, y, p);
                *x = if positive[k] { sub_mod(*x, twice, p) } else { add_mod(*x, twice, p) };
            }
            positive[k] = !positive[k];
        }
        if small(&c) {
            let num: Vec<BigInt> = c
                .iter()
                .map(|&x| if x < bound { BigInt::from(x) } else { -BigInt::from(p - x) })
                .collect();
            let r = Coords::new(num, BigInt::from(1));
            if r.mul(&r, modulus) == *e {
                return Some(r);
            }
        }
    }
    None
}
