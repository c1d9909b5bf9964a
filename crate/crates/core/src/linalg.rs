//! Exact linear algebra over the rationals.
//!
//! Everything downstream (fixed fields, centers, commutants, twisted
//! recurrences, rank checks) reduces to row reduction over `Q`, so this module
//! stays small and dense-matrix based. Matrices are row-major `Vec<Vec<Q>>`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero_vec(n: usize) -> Vec<Q> {
    vec![Q::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Q> {
    let mut v = zero_vec(n);
    v[i] = Q::one();
    v
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn vec_add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[Q], s: &Q) -> Vec<Q> {
    a.iter().map(|x| x * s).collect()
}

/// Least common multiple of the denominators, used to clear a vector to integers.
pub fn common_denominator(v: &[Q]) -> BigInt {
    let mut l = BigInt::one();
    for x in v {
        l = num_integer::Integer::lcm(&l, x.denom());
    }
    l
}

/// Height of a rational: max(|num|, |den|).
pub fn height(x: &Q) -> BigInt {
    let n = x.numer().abs();
    let d = x.denom().abs();
    if n > d {
        n
    } else {
        d
    }
}

/// Reduced row echelon form. Returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = &*x - &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    let mut w = m.to_vec();
    rref(&mut w).len()
}

/// Rank of a family of vectors (the rows).
pub fn rank_of_vectors(vs: &[Vec<Q>]) -> usize {
    rank(vs)
}

/// Basis of the right kernel `{x : m x = 0}`; `cols` is needed when `m` has no rows.
pub fn kernel(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut w = m.to_vec();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zero_vec(cols);
            v[f] = Q::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -w[r][f].clone();
            }
            v
        })
        .collect()
}

/// Solves `m x = rhs`, returning one particular solution.
pub fn solve(m: &[Vec<Q>], rhs: &[Q]) -> Option<Vec<Q>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Q>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = zero_vec(cols);
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][cols].clone();
    }
    Some(x)
}

/// Coordinates of `v` in the span of `basis` (rows), if it lies there.
pub fn coordinates_in(basis: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
    if basis.is_empty() {
        return if is_zero_vec(v) { Some(Vec::new()) } else { None };
    }
    let n = v.len();
    let m: Vec<Vec<Q>> = (0..n)
        .map(|i| basis.iter().map(|b| b[i].clone()).collect())
        .collect();
    solve(&m, v)
}

/// Row-space basis (reduced).
pub fn row_space(vs: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut w = vs.to_vec();
    let k = rref(&mut w).len();
    w.truncate(k);
    w
}

pub fn same_span(a: &[Vec<Q>], b: &[Vec<Q>]) -> bool {
    let ra = rank(a);
    let rb = rank(b);
    if ra != rb {
        return false;
    }
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    rank(&both) == ra
}

pub fn span_contains(a: &[Vec<Q>], v: &[Q]) -> bool {
    let ra = rank(a);
    let mut both = a.to_vec();
    both.push(v.to_vec());
    rank(&both) == ra
}

/// `m * v` for a row-major matrix.
pub fn mat_vec(m: &[Vec<Q>], v: &[Q]) -> Vec<Q> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                .fold(Q::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

pub fn transpose(m: &[Vec<Q>]) -> Vec<Vec<Q>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Determinant by fraction-carrying elimination.
pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut w = m.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !w[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            w.swap(p, c);
            d = -d;
        }
        d = &d * &w[c][c];
        let inv = w[c][c].recip();
        for i in c + 1..n {
            if w[i][c].is_zero() {
                continue;
            }
            let f = &w[i][c] * &inv;
            for j in c..n {
                let t = &f * &w[c][j];
                w[i][j] = &w[i][j] - t;
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_of_rank_one() {
        let m = vec![vec![q(1), q(2), q(3)]];
        let k = kernel(&m, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(is_zero_vec(&mat_vec(&m, v)));
        }
    }

    #[test]
    fn solve_and_inconsistent() {
        let m = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        let x = solve(&m, &[q(3), q(1)]).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
        let m2 = vec![vec![q(1), q(1)], vec![q(2), q(2)]];
        assert!(solve(&m2, &[q(1), q(3)]).is_none());
    }

    #[test]
    fn determinant_matches_cofactor() {
        let m = vec![
            vec![q(2), q(0), q(1)],
            vec![q(1), q(3), q(2)],
            vec![q(1), q(1), q(1)],
        ];
        // 2*(3-2) - 0 + 1*(1-3) = 0
        assert_eq!(det(&m), q(0));
        let m = vec![vec![qf(1, 2), q(1)], vec![q(3), q(4)]];
        assert_eq!(det(&m), q(-1));
    }

    #[test]
    fn spans() {
        let a = vec![vec![q(1), q(0)], vec![q(1), q(1)]];
        let b = vec![vec![q(0), q(1)], vec![q(2), q(0)]];
        assert!(same_span(&a, &b));
        assert!(!same_span(&a[..1], &b[..1]));
        assert_eq!(coordinates_in(&a, &[q(3), q(2)]).unwrap(), vec![q(1), q(2)]);
    }
}
