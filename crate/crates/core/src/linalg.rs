//! Exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::decorated::Q;

/// Scales a rational row to integers by the lcm of its denominators.
pub fn clear_denominators(row: &[Q]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

/// Rank of a rational matrix given by rows, by fraction-free (Bareiss)
/// elimination after clearing row denominators.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            for j in c + 1..ncols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    if !m[r][j].is_zero() {
                        let d = &f * &m[r][j];
                        m[i][j] -= d;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Divides an integer vector by the gcd of its entries and makes its first
/// nonzero entry positive.
pub fn primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return v;
    }
    let sign = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    v.into_iter()
        .map(|x| {
            let y = x / &g;
            if sign {
                -y
            } else {
                y
            }
        })
        .collect()
}

/// Basis of `{x : M x = 0}` for `M` given by rows with `ncols` columns, as
/// primitive integer vectors.
pub fn kernel(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![Q::zero(); ncols];
        x[free] = Q::one();
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = -m[r][free].clone();
        }
        out.push(primitive(clear_denominators(&x)));
    }
    out
}

/// Basis of `{x : xᵀ M = 0}`, the relations among the rows of `M`.
pub fn row_kernel(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<BigInt>> {
    let t: Vec<Vec<Q>> = (0..ncols)
        .map(|j| rows.iter().map(|r| r[j].clone()).collect())
        .collect();
    kernel(&t, rows.len())
}
