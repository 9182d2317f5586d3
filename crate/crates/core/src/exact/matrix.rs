//! Small exact matrices over `K0(sqrt(R))`: determinants by cofactor
//! expansion (no division), ranks from minors, characteristic polynomials
//! from principal minors.

use std::sync::Arc;

use super::{AlgebraicNumber, FieldContext};

pub type Matrix = Vec<Vec<AlgebraicNumber>>;

/// Determinant of the submatrix on `rows x cols` by Laplace expansion along
/// the first row, skipping zero entries.
pub fn minor(m: &Matrix, rows: &[usize], cols: &[usize]) -> AlgebraicNumber {
    let ctx = Arc::clone(m[0][0].context());
    laplace(&ctx, m, rows, cols)
}

fn laplace(ctx: &Arc<FieldContext>, m: &Matrix, rows: &[usize], cols: &[usize]) -> AlgebraicNumber {
    match rows.len() {
        0 => AlgebraicNumber::one(ctx),
        1 => m[rows[0]][cols[0]].clone(),
        2 => {
            let a = &m[rows[0]][cols[0]] * &m[rows[1]][cols[1]];
            let b = &m[rows[0]][cols[1]] * &m[rows[1]][cols[0]];
            &a - &b
        }
        _ => {
            let r = rows[0];
            let rest = &rows[1..];
            let mut acc = AlgebraicNumber::zero(ctx);
            for (k, &c) in cols.iter().enumerate() {
                let entry = &m[r][c];
                if entry.is_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let sub = laplace(ctx, m, rest, &sub_cols);
                if sub.is_zero() {
                    continue;
                }
                let term = entry * &sub;
                acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

pub fn determinant(m: &Matrix) -> AlgebraicNumber {
    let idx: Vec<usize> = (0..m.len()).collect();
    minor(m, &idx, &idx)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exact rank: the largest `k` with a nonzero `k x k` minor.
pub fn rank(m: &Matrix) -> usize {
    let n = m.len();
    for k in (1..=n).rev() {
        let sets = subsets(n, k);
        for rows in &sets {
            for cols in &sets {
                if !minor(m, rows, cols).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

/// Coefficients of `det(t I - m)`, low to high. The coefficient of
/// `t^{n-k}` is `(-1)^k` times the sum of principal `k x k` minors.
pub fn characteristic_polynomial(m: &Matrix) -> Vec<AlgebraicNumber> {
    let n = m.len();
    let ctx = Arc::clone(m[0][0].context());
    let mut coeffs = vec![AlgebraicNumber::zero(&ctx); n + 1];
    coeffs[n] = AlgebraicNumber::one(&ctx);
    for k in 1..=n {
        let mut e = AlgebraicNumber::zero(&ctx);
        for s in subsets(n, k) {
            e = &e + &minor(m, &s, &s);
        }
        coeffs[n - k] = if k % 2 == 0 { e } else { e.neg() };
    }
    coeffs
}
