//! Dense univariate polynomials over `Q`, lowest degree first.
//!
//! Besides ring arithmetic this carries the two certificate-grade tools the
//! number-field layer relies on: Sturm sequences for exact real-root counting
//! and isolation, and a Kronecker-style trial factorization for irreducibility
//! of small integer polynomials.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::{q, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<Q>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| q(x)).collect())
    }

    pub fn from_bigints(c: &[BigInt]) -> Self {
        Self::new(c.iter().map(|x| Q::from_integer(x.clone())).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c x^k`.
    pub fn monomial(c: Q, k: usize) -> Self {
        let mut v = vec![Q::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn x() -> Self {
        Self::monomial(Q::one(), 1)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Euclidean division `self = q * d + r`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.lead().recip();
        let mut r = self.coeffs.clone();
        let Some(n) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if n < dd {
            return (Self::zero(), self.clone());
        }
        let mut quo = vec![Q::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = &r[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= &c * dc;
            }
            quo[k] = c;
        }
        r.truncate(dd);
        (Self::new(quo), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().recip())
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (qq, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&qq.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&qq.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        let l = r0.lead().recip();
        (r0.scale(&l), s0.scale(&l), t0.scale(&l))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_c(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * x + Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
        })
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Sturm sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm_sequence(&self) -> Vec<QPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_real_roots_in(&self, a: &Q, b: &Q) -> usize {
        let seq = self.sturm_sequence();
        sign_changes_at(&seq, a) - sign_changes_at(&seq, b)
    }

    /// Cauchy bound: every complex root has modulus < bound.
    pub fn root_bound(&self) -> Q {
        let lead = self.lead().abs();
        let m = self
            .coeffs
            .iter()
            .take(self.coeffs.len().saturating_sub(1))
            .map(|c| c.abs() / &lead)
            .fold(Q::zero(), |a, b| if b > a { b } else { a });
        m + Q::one()
    }

    pub fn count_real_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let b = self.root_bound();
        self.count_real_roots_in(&(-b.clone()), &b)
    }

    /// Isolating intervals `(a, b]` for each distinct real root, in increasing order.
    pub fn isolate_real_roots(&self) -> Vec<(Q, Q)> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let seq = self.sturm_sequence();
        let b = self.root_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-b.clone(), b)];
        while let Some((lo, hi)) = stack.pop() {
            let n = sign_changes_at(&seq, &lo) - sign_changes_at(&seq, &hi);
            if n == 0 {
                continue;
            }
            if n == 1 {
                out.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / q(2);
            stack.push((mid.clone(), hi));
            stack.push((lo, mid));
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        out
    }

    /// Integer content-free copy when all coefficients are integral.
    pub fn to_bigints(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// Numerical complex roots (with multiplicity), Aberth iteration plus Newton polish.
    pub fn complex_roots(&self) -> Vec<Complex64> {
        let Some(n) = self.degree() else {
            return Vec::new();
        };
        if n == 0 {
            return Vec::new();
        }
        let p = self.monic();
        let dp = p.derivative();
        let bound = p.root_bound().to_f64().unwrap_or(2.0).max(1.0);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let ang = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
                Complex64::from_polar(0.5 * bound, ang)
            })
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let pv = p.eval_c(z[i]);
                let dv = dp.eval_c(z[i]);
                if pv.norm() == 0.0 {
                    continue;
                }
                let ratio = pv / dv;
                let s: Complex64 = (0..n)
                    .filter(|&j| j != i)
                    .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                    .sum();
                let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
                if w.is_finite() {
                    z[i] -= w;
                    moved = moved.max(w.norm());
                }
            }
            if moved < 1e-15 {
                break;
            }
        }
        for zi in z.iter_mut() {
            for _ in 0..4 {
                let dv = dp.eval_c(*zi);
                if dv.norm() == 0.0 {
                    break;
                }
                let step = p.eval_c(*zi) / dv;
                if step.is_finite() {
                    *zi -= step;
                }
            }
        }
        z
    }
}

fn sign_changes_at(seq: &[QPoly], x: &Q) -> usize {
    let signs: Vec<i8> = seq
        .iter()
        .map(|p| {
            let v = p.eval(x);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Sign of `p` at the unique root of `m` inside the isolating interval `(lo, hi]`.
///
/// `p` must not vanish at that root. The interval is bisected until `p` has no
/// root in its closure, then `p` is evaluated at an endpoint.
pub fn sign_at_isolated_root(p: &QPoly, m: &QPoly, lo: &Q, hi: &Q) -> i8 {
    let sgn = |v: Q| if v.is_positive() { 1 } else { -1 };
    if p.degree().unwrap_or(0) == 0 {
        return sgn(p.coeff(0));
    }
    let ms = m.sturm_sequence();
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    loop {
        if m.eval(&hi).is_zero() {
            return sgn(p.eval(&hi));
        }
        let p_lo = p.eval(&lo);
        if !p_lo.is_zero() && p.count_real_roots_in(&lo, &hi) == 0 {
            return sgn(p_lo);
        }
        let mid = (&lo + &hi) / q(2);
        if sign_changes_at(&ms, &lo) - sign_changes_at(&ms, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// Rational roots of an integer polynomial (rational root theorem).
pub fn rational_roots(p: &QPoly) -> Vec<Q> {
    let Some(n) = p.degree() else {
        return Vec::new();
    };
    if n == 0 {
        return Vec::new();
    }
    let den = crate::linalg::common_denominator(p.coeffs());
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Q::from_integer(den.clone())).to_integer())
        .collect();
    let mut roots = BTreeSet::new();
    let low = ints.iter().position(|c| !c.is_zero()).unwrap();
    if low > 0 {
        roots.insert(Q::zero());
    }
    let c0 = ints[low].abs();
    let cn = ints[n].abs();
    for a in divisors(&c0) {
        for b in divisors(&cn) {
            for s in [1i64, -1] {
                let r = Q::new(a.clone() * s, b.clone());
                if p.eval(&r).is_zero() {
                    roots.insert(r);
                }
            }
        }
    }
    roots.into_iter().collect()
}

/// Positive divisors of a nonzero integer (trial division).
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let e = &n / &d;
            if e != d {
                large.push(e);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Why a candidate minimal polynomial was rejected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reducibility {
    NotMonic,
    NotSquarefree,
    HasFactor(QPoly),
}

/// Exact irreducibility test for a monic integer polynomial by Kronecker's
/// trial factorization: a monic integer factor of degree `d` is pinned down by
/// its values at `d + 1` integer points, each of which divides the value of `p`.
pub fn check_irreducible(p: &QPoly) -> Result<(), Reducibility> {
    let n = p.degree().unwrap_or(0);
    if !p.lead().is_one() || p.to_bigints().is_none() {
        return Err(Reducibility::NotMonic);
    }
    if n <= 1 {
        return Ok(());
    }
    if !p.is_squarefree() {
        return Err(Reducibility::NotSquarefree);
    }
    if let Some(r) = rational_roots(p).first() {
        return Err(Reducibility::HasFactor(QPoly::new(vec![-r.clone(), Q::one()])));
    }
    for d in 2..=n / 2 {
        if let Some(f) = kronecker_factor(p, d) {
            return Err(Reducibility::HasFactor(f));
        }
    }
    Ok(())
}

fn kronecker_factor(p: &QPoly, d: usize) -> Option<QPoly> {
    // pick d+1 integer points with smallest nonzero |p(x)|
    let mut pts: Vec<(BigInt, i64)> = (-12i64..=12)
        .map(|x| (p.eval(&q(x)).to_integer().abs(), x))
        .filter(|(v, _)| !v.is_zero())
        .collect();
    pts.sort();
    pts.truncate(d + 1);
    let xs: Vec<i64> = pts.iter().map(|(_, x)| *x).collect();
    let choices: Vec<Vec<BigInt>> = pts
        .iter()
        .map(|(v, _)| {
            let ds = divisors(v);
            ds.iter().cloned().chain(ds.iter().map(|x| -x)).collect()
        })
        .collect();
    let mut idx = vec![0usize; d + 1];
    loop {
        let vals: Vec<Q> = idx
            .iter()
            .zip(&choices)
            .map(|(&i, c)| Q::from_integer(c[i].clone()))
            .collect();
        let g = lagrange(&xs, &vals);
        if g.degree() == Some(d) && g.lead().abs().is_one() && g.to_bigints().is_some() {
            let g = g.monic();
            if p.rem(&g).is_zero() {
                return Some(g);
            }
        }
        // odometer
        let mut k = 0;
        loop {
            if k == idx.len() {
                return None;
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn lagrange(xs: &[i64], ys: &[Q]) -> QPoly {
    let mut acc = QPoly::zero();
    for (i, (&xi, yi)) in xs.iter().zip(ys).enumerate() {
        let mut basis = QPoly::one();
        let mut den = Q::one();
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            basis = basis.mul(&QPoly::from_ints(&[-xj, 1]));
            den *= q(xi - xj);
        }
        acc = acc.add(&basis.scale(&(yi / den)));
    }
    acc
}

/// Best rational approximation of `x` with denominator at most `max_den`, if it
/// is within `tol`.
pub fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= tol * x.abs().max(1.0) {
            return Some(Q::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 != 0 {
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= tol * x.abs().max(1.0) {
            return Some(Q::new(BigInt::from(h1), BigInt::from(k1)));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qf;

    #[test]
    fn sturm_counts() {
        let p = QPoly::from_ints(&[-2, 0, 1]);
        assert_eq!(p.count_real_roots(), 2);
        let p = QPoly::from_ints(&[1, 0, 1]);
        assert_eq!(p.count_real_roots(), 0);
        let p = QPoly::from_ints(&[-2, 0, 0, 1]);
        assert_eq!(p.count_real_roots(), 1);
        // x^4 - 4x^2 + 2 is totally real
        let p = QPoly::from_ints(&[2, 0, -4, 0, 1]);
        assert_eq!(p.count_real_roots(), 4);
        assert_eq!(p.isolate_real_roots().len(), 4);
    }

    #[test]
    fn isolation_brackets_sqrt2() {
        let p = QPoly::from_ints(&[-2, 0, 1]);
        let iv = p.isolate_real_roots();
        assert_eq!(iv.len(), 2);
        let (lo, hi) = &iv[1];
        assert!(lo < &qf(142, 100) && hi > &qf(141, 100));
    }

    #[test]
    fn sign_at_root() {
        let m = QPoly::from_ints(&[-2, 0, 1]);
        let iv = m.isolate_real_roots();
        // x - 1 at -sqrt2 is negative, at +sqrt2 positive
        let p = QPoly::from_ints(&[-1, 1]);
        assert_eq!(sign_at_isolated_root(&p, &m, &iv[0].0, &iv[0].1), -1);
        assert_eq!(sign_at_isolated_root(&p, &m, &iv[1].0, &iv[1].1), 1);
        // x^2 - 2 + 1/1000 -> positive near both roots; x - 7/5 at sqrt2 ~ 1.414 positive
        let p = QPoly::new(vec![qf(-7, 5), q(1)]);
        assert_eq!(sign_at_isolated_root(&p, &m, &iv[1].0, &iv[1].1), 1);
    }

    #[test]
    fn irreducibility() {
        assert!(check_irreducible(&QPoly::from_ints(&[-2, 0, 1])).is_ok());
        assert!(check_irreducible(&QPoly::from_ints(&[2, 0, -4, 0, 1])).is_ok());
        assert!(check_irreducible(&QPoly::from_ints(&[1, 0, -10, 0, 1])).is_ok());
        // (x^2+1)(x^2-2)
        assert!(matches!(
            check_irreducible(&QPoly::from_ints(&[-2, 0, -1, 0, 1])),
            Err(Reducibility::HasFactor(_))
        ));
        // x^4 + 4 = (x^2+2x+2)(x^2-2x+2)
        assert!(matches!(
            check_irreducible(&QPoly::from_ints(&[4, 0, 0, 0, 1])),
            Err(Reducibility::HasFactor(_))
        ));
        assert_eq!(
            check_irreducible(&QPoly::from_ints(&[1, 2, 1])),
            Err(Reducibility::NotSquarefree)
        );
    }

    #[test]
    fn xgcd_identity() {
        let a = QPoly::from_ints(&[-2, 0, 1]);
        let b = QPoly::from_ints(&[1, 1]);
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(g, QPoly::one());
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn numeric_roots() {
        let p = QPoly::from_ints(&[2, 0, -4, 0, 1]);
        let mut r: Vec<f64> = p.complex_roots().iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = (2.0f64 + 2f64.sqrt()).sqrt();
        assert!((r[3] - expect).abs() < 1e-12);
        assert_eq!(rationalize(0.75, 100, 1e-12), Some(qf(3, 4)));
        assert_eq!(rationalize(-2.5, 100, 1e-12), Some(qf(-5, 2)));
    }
}
