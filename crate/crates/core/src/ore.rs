//! Skew polynomials `H[t, σ]` with `t·a = σ(a)·t`, their right fractions, and
//! truncated twisted Laurent series.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::linalg::{self, Q};
use crate::numfield::{self, same_field, FieldElement, FieldMorphism};
use crate::qalg::{inner_order, q_basis, same_algebra, Algebra, AlgebraAutomorphism, QuatElement};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OreError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("twist has no finite order within the search bound")]
    InfiniteOrder,
    #[error("precision {have} is below the required {need}")]
    InsufficientPrecision { need: usize, have: usize },
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("twist does not extend: {0}")]
    NotAnExtension(String),
}

/// The ring `H[t, σ]`: coefficient algebra and twist, with cached powers of σ.
pub struct SkewRing {
    alg: Algebra,
    twist: AlgebraAutomorphism,
    powers: Vec<AlgebraAutomorphism>,
}

pub type Ring = Arc<SkewRing>;

impl fmt::Debug for SkewRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[t, order {}]", self.alg.label(), self.powers.len())
    }
}

impl SkewRing {
    pub fn new(twist: AlgebraAutomorphism) -> Result<Ring, OreError> {
        let n = twist.order().ok_or(OreError::InfiniteOrder)?;
        let mut powers = vec![AlgebraAutomorphism::identity(twist.algebra())];
        for k in 1..n {
            powers.push(twist.compose(&powers[k - 1]));
        }
        Ok(Arc::new(SkewRing {
            alg: twist.algebra().clone(),
            twist,
            powers,
        }))
    }

    pub fn untwisted(alg: &Algebra) -> Ring {
        Self::new(AlgebraAutomorphism::identity(alg)).unwrap()
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn twist(&self) -> &AlgebraAutomorphism {
        &self.twist
    }

    pub fn twist_order(&self) -> usize {
        self.powers.len()
    }

    /// `σ^k` for any integer `k`.
    pub fn sigma(&self, k: i64) -> &AlgebraAutomorphism {
        let n = self.powers.len() as i64;
        &self.powers[k.rem_euclid(n) as usize]
    }
}

#[derive(Clone)]
pub struct SkewPoly {
    ring: Ring,
    c: Vec<QuatElement>,
}

impl fmt::Debug for SkewPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for SkewPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(j, x)| format!("{x}*t^{j}"))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl PartialEq for SkewPoly {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}

impl Eq for SkewPoly {}

impl SkewPoly {
    pub fn new(ring: &Ring, mut c: Vec<QuatElement>) -> Self {
        while c.last().is_some_and(QuatElement::is_zero) {
            c.pop();
        }
        SkewPoly {
            ring: ring.clone(),
            c,
        }
    }

    pub fn zero(ring: &Ring) -> Self {
        Self::new(ring, Vec::new())
    }

    pub fn constant(ring: &Ring, x: QuatElement) -> Self {
        Self::new(ring, vec![x])
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, QuatElement::one(&ring.alg))
    }

    /// `x · t^k`.
    pub fn monomial(ring: &Ring, x: QuatElement, k: usize) -> Self {
        let mut c = vec![QuatElement::zero(&ring.alg); k + 1];
        c[k] = x;
        Self::new(ring, c)
    }

    pub fn t(ring: &Ring) -> Self {
        Self::monomial(ring, QuatElement::one(&ring.alg), 1)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn coeffs(&self) -> &[QuatElement] {
        &self.c
    }

    pub fn coeff(&self, j: usize) -> QuatElement {
        self.c.get(j).cloned().unwrap_or_else(|| QuatElement::zero(&self.ring.alg))
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn lead(&self) -> QuatElement {
        self.c.last().cloned().unwrap_or_else(|| QuatElement::zero(&self.ring.alg))
    }

    /// `x · self` for a constant `x` on the left.
    pub fn left_scale(&self, x: &QuatElement) -> Self {
        Self::new(&self.ring, self.c.iter().map(|c| x * c).collect())
    }

    /// `t^k · self`.
    pub fn shift_left(&self, k: usize) -> Self {
        let s = self.ring.sigma(k as i64);
        let mut c = vec![QuatElement::zero(&self.ring.alg); k];
        c.extend(self.c.iter().map(|x| s.apply(x)));
        Self::new(&self.ring, c)
    }

    /// Coordinates over `Q` of the coefficients of degree `≤ d`.
    pub fn to_q_vec(&self, d: usize) -> Vec<Q> {
        (0..=d).flat_map(|j| self.coeff(j).to_q_vec()).collect()
    }

    pub fn from_q_vec(ring: &Ring, v: &[Q]) -> Self {
        let m = ring.alg.q_dim();
        Self::new(
            ring,
            v.chunks(m).map(|ch| QuatElement::from_q_vec(&ring.alg, ch)).collect(),
        )
    }
}

fn check_ring(a: &SkewPoly, b: &SkewPoly) {
    assert!(
        Arc::ptr_eq(&a.ring, &b.ring) || same_algebra(&a.ring.alg, &b.ring.alg),
        "skew polynomials from different rings"
    );
}

impl Add for &SkewPoly {
    type Output = SkewPoly;
    fn add(self, o: &SkewPoly) -> SkewPoly {
        check_ring(self, o);
        let n = self.c.len().max(o.c.len());
        SkewPoly::new(&self.ring, (0..n).map(|j| &self.coeff(j) + &o.coeff(j)).collect())
    }
}

impl Sub for &SkewPoly {
    type Output = SkewPoly;
    fn sub(self, o: &SkewPoly) -> SkewPoly {
        check_ring(self, o);
        let n = self.c.len().max(o.c.len());
        SkewPoly::new(&self.ring, (0..n).map(|j| &self.coeff(j) - &o.coeff(j)).collect())
    }
}

impl Neg for &SkewPoly {
    type Output = SkewPoly;
    fn neg(self) -> SkewPoly {
        SkewPoly::new(&self.ring, self.c.iter().map(|x| -x).collect())
    }
}

impl Mul for &SkewPoly {
    type Output = SkewPoly;
    fn mul(self, o: &SkewPoly) -> SkewPoly {
        check_ring(self, o);
        if self.is_zero() || o.is_zero() {
            return SkewPoly::zero(&self.ring);
        }
        let alg = &self.ring.alg;
        let mut out = vec![QuatElement::zero(alg); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let s = self.ring.sigma(i as i64);
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * &s.apply(b));
                }
            }
        }
        SkewPoly::new(&self.ring, out)
    }
}

macro_rules! owned_ops {
    ($t:ident, $tr:ident, $m:ident) => {
        impl $tr for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t {
                (&self).$m(&o)
            }
        }
    };
}
owned_ops!(SkewPoly, Add, add);
owned_ops!(SkewPoly, Sub, sub);
owned_ops!(SkewPoly, Mul, mul);

/// `a = q·b + r` with `deg r < deg b`.
pub fn right_divide(a: &SkewPoly, b: &SkewPoly) -> Result<(SkewPoly, SkewPoly), OreError> {
    let m = b.degree().ok_or(OreError::DivisionByZero)?;
    let ring = &a.ring;
    let bm = b.lead();
    let mut r = a.clone();
    let mut q = SkewPoly::zero(ring);
    while let Some(n) = r.degree() {
        if n < m {
            break;
        }
        let k = n - m;
        let s = ring.sigma(k as i64).apply(&bm);
        let qk = &r.lead() * &s.inv().map_err(|_| OreError::DivisionByZero)?;
        let term = SkewPoly::monomial(ring, qk, k);
        r = &r - &(&term * b);
        q = &q + &term;
        debug_assert!(r.degree().is_none_or(|d| d < n));
    }
    Ok((q, r))
}

/// `a = b·q + r` with `deg r < deg b`.
pub fn left_divide(a: &SkewPoly, b: &SkewPoly) -> Result<(SkewPoly, SkewPoly), OreError> {
    let m = b.degree().ok_or(OreError::DivisionByZero)?;
    let ring = &a.ring;
    let bm_inv = b.lead().inv().map_err(|_| OreError::DivisionByZero)?;
    let back = ring.sigma(-(m as i64));
    let mut r = a.clone();
    let mut q = SkewPoly::zero(ring);
    while let Some(n) = r.degree() {
        if n < m {
            break;
        }
        let k = n - m;
        let qk = back.apply(&(&bm_inv * &r.lead()));
        let term = SkewPoly::monomial(ring, qk, k);
        r = &r - &(b * &term);
        q = &q + &term;
    }
    Ok((q, r))
}

/// Least common right multiple: `(m, u, v)` with `a·u = b·v = m ≠ 0`.
pub fn ore_right_lcm(a: &SkewPoly, b: &SkewPoly) -> Result<(SkewPoly, SkewPoly, SkewPoly), OreError> {
    if a.is_zero() || b.is_zero() {
        return Err(OreError::DivisionByZero);
    }
    let ring = &a.ring;
    // r_i = a·s_i + b·t_i
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (SkewPoly::one(ring), SkewPoly::zero(ring));
    let (mut t0, mut t1) = (SkewPoly::zero(ring), SkewPoly::one(ring));
    while !r1.is_zero() {
        let (q, r) = left_divide(&r0, &r1)?;
        let s = &s0 - &(&s1 * &q);
        let t = &t0 - &(&t1 * &q);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    let u = s1;
    let v = -&t1;
    let m = a * &u;
    debug_assert!(m == b * &v && !m.is_zero());
    Ok((m, u, v))
}

/// Right fraction `num · den⁻¹`.
#[derive(Clone, Debug)]
pub struct SkewFraction {
    pub num: SkewPoly,
    pub den: SkewPoly,
}

impl SkewFraction {
    pub fn new(num: SkewPoly, den: SkewPoly) -> Result<Self, OreError> {
        if den.is_zero() {
            return Err(OreError::DivisionByZero);
        }
        Ok(SkewFraction { num, den })
    }

    pub fn from_poly(p: SkewPoly) -> Self {
        let one = SkewPoly::one(&p.ring);
        SkewFraction { num: p, den: one }
    }

    /// `b⁻¹ · a`, rewritten as a right fraction.
    pub fn from_left(b: &SkewPoly, a: &SkewPoly) -> Result<Self, OreError> {
        if b.is_zero() {
            return Err(OreError::DivisionByZero);
        }
        if a.is_zero() {
            return Ok(Self::from_poly(SkewPoly::zero(&a.ring)));
        }
        // a·u = b·v gives b⁻¹a = v·u⁻¹
        let (_, u, v) = ore_right_lcm(a, b)?;
        Self::new(v, u)
    }

    pub fn ring(&self) -> &Ring {
        &self.num.ring
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        let (m, u, v) = ore_right_lcm(&self.den, &o.den).expect("nonzero denominators");
        SkewFraction {
            num: &(&self.num * &u) + &(&o.num * &v),
            den: m,
        }
    }

    pub fn neg(&self) -> Self {
        SkewFraction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.num.is_zero() || o.num.is_zero() {
            return Self::from_poly(SkewPoly::zero(self.ring()));
        }
        // c·u = b·v gives b⁻¹c = v·u⁻¹
        let (_, u, v) = ore_right_lcm(&o.num, &self.den).expect("nonzero");
        SkewFraction {
            num: &self.num * &v,
            den: &o.den * &u,
        }
    }

    pub fn inv(&self) -> Result<Self, OreError> {
        if self.num.is_zero() {
            return Err(OreError::DivisionByZero);
        }
        Ok(SkewFraction {
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    /// Equality in the fraction field: `a·b⁻¹ = c·d⁻¹` iff `a·u = c·v` where `b·u = d·v`.
    pub fn equals(&self, o: &Self) -> bool {
        let (_, u, v) = ore_right_lcm(&self.den, &o.den).expect("nonzero denominators");
        &self.num * &u == &o.num * &v
    }
}

/// Truncated series `Σ_{n ≥ ord} c_n t^n + O(t^{ord + N})`, with `N = coeffs.len()`.
#[derive(Clone, Debug)]
pub struct SkewLaurent {
    ring: Ring,
    ord: i64,
    coeffs: Vec<QuatElement>,
}

impl SkewLaurent {
    pub fn new(ring: &Ring, ord: i64, coeffs: Vec<QuatElement>) -> Self {
        let mut s = SkewLaurent {
            ring: ring.clone(),
            ord,
            coeffs,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        let k = self.coeffs.iter().position(|x| !x.is_zero()).unwrap_or(0);
        if k > 0 {
            self.coeffs.drain(..k);
            self.ord += k as i64;
        }
    }

    pub fn from_poly(p: &SkewPoly, precision: usize) -> Self {
        let c = (0..precision).map(|j| p.coeff(j)).collect();
        Self::new(&p.ring, 0, c)
    }

    pub fn ord(&self) -> i64 {
        self.ord
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    /// Exclusive bound on the known exponents.
    pub fn known_until(&self) -> i64 {
        self.ord + self.coeffs.len() as i64
    }

    pub fn coeff(&self, n: i64) -> QuatElement {
        assert!(n < self.known_until(), "coefficient beyond precision");
        if n < self.ord {
            return QuatElement::zero(&self.ring.alg);
        }
        self.coeffs[(n - self.ord) as usize].clone()
    }

    pub fn coeffs(&self) -> &[QuatElement] {
        &self.coeffs
    }

    pub fn mul(&self, o: &SkewLaurent) -> SkewLaurent {
        let ord = self.ord + o.ord;
        let until = (self.known_until() + o.ord).min(self.ord + o.known_until());
        let len = (until - ord).max(0) as usize;
        let alg = &self.ring.alg;
        let mut c = vec![QuatElement::zero(alg); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let e = self.ord + i as i64;
            let s = self.ring.sigma(e);
            for (j, b) in o.coeffs.iter().enumerate() {
                let idx = i + j;
                if idx >= len {
                    break;
                }
                if !b.is_zero() {
                    c[idx] = &c[idx] + &(a * &s.apply(b));
                }
            }
        }
        SkewLaurent::new(&self.ring, ord, c)
    }

    /// Agreement on every exponent known to both series.
    pub fn agrees_with(&self, o: &SkewLaurent) -> bool {
        let until = self.known_until().min(o.known_until());
        let from = self.ord.min(o.ord);
        (from..until).all(|n| self.coeff(n) == o.coeff(n))
    }
}

/// Image of `num · den⁻¹` in the twisted Laurent series, with `precision` terms.
pub fn series_expand(f: &SkewFraction, precision: usize) -> SkewLaurent {
    let ring = f.ring().clone();
    let alg = ring.alg.clone();
    let v = f.den.valuation().expect("nonzero denominator");
    let back = ring.sigma(-(v as i64));
    let e = f.num.valuation().unwrap_or(0);
    let u: Vec<QuatElement> = (0..precision + 1)
        .map(|j| back.apply(&f.den.coeff(j + v)))
        .collect();
    let u0_inv = u[0].inv().expect("leading coefficient invertible in a division ring");
    let mut w: Vec<QuatElement> = vec![u0_inv.clone()];
    for n in 1..precision {
        let mut acc = QuatElement::zero(&alg);
        for k in 1..=n.min(u.len() - 1) {
            if u[k].is_zero() {
                continue;
            }
            acc = &acc + &(&u[k] * &ring.sigma(k as i64).apply(&w[n - k]));
        }
        w.push(-&(&u0_inv * &acc));
    }
    // num · w, terms from exponent e to e + precision - 1
    let mut c = vec![QuatElement::zero(&alg); precision];
    for (i, a) in f.num.coeffs().iter().enumerate().skip(e) {
        if a.is_zero() {
            continue;
        }
        let s = ring.sigma(i as i64);
        for (j, b) in w.iter().enumerate() {
            let idx = i - e + j;
            if idx >= precision {
                break;
            }
            c[idx] = &c[idx] + &(a * &s.apply(b));
        }
    }
    SkewLaurent::new(&ring, e as i64 - v as i64, c)
}

/// `a_n = Σ_{i=1..s} a_{n−i} · σ^{n−i}(y_i)` for every stored `n ≥ start`.
#[derive(Clone, Debug)]
pub struct RecurrenceCertificate {
    pub order: usize,
    pub y: Vec<QuatElement>,
    pub start: i64,
}

impl RecurrenceCertificate {
    pub fn verify(&self, s: &SkewLaurent) -> bool {
        let ring = &s.ring;
        (self.start..s.known_until()).all(|n| {
            let mut acc = QuatElement::zero(&ring.alg);
            for (i, y) in self.y.iter().enumerate() {
                let m = n - 1 - i as i64;
                acc = &acc + &(&s.coeff(m) * &ring.sigma(m).apply(y));
            }
            acc == s.coeff(n)
        })
    }
}

/// Searches for the shortest twisted linear recurrence among the stored coefficients.
pub fn detect_recurrence(
    s: &SkewLaurent,
    max_order: usize,
) -> Result<Option<RecurrenceCertificate>, OreError> {
    let need = 2 * max_order + 4;
    if s.precision() < need {
        return Err(OreError::InsufficientPrecision {
            need,
            have: s.precision(),
        });
    }
    let ring = &s.ring;
    let alg = &ring.alg;
    let dim = alg.q_dim();
    let basis = q_basis(alg);
    let first = s.ord;
    let last = s.known_until() - 1;
    for order in 1..=max_order {
        for start in first + order as i64..=first + (order + max_order) as i64 {
            if last - start + 1 < order as i64 + 2 {
                break;
            }
            let mut rows: Vec<Vec<Q>> = Vec::new();
            let mut rhs: Vec<Q> = Vec::new();
            for n in start..=last {
                // block row: for each i, matrix of y ↦ a_{n-i} σ^{n-i}(y)
                let mut block = vec![Vec::with_capacity(order * dim); dim];
                for i in 1..=order {
                    let m = n - i as i64;
                    let a = s.coeff(m);
                    let sg = ring.sigma(m);
                    let cols: Vec<Vec<Q>> = basis.iter().map(|e| (&a * &sg.apply(e)).to_q_vec()).collect();
                    for (r, row) in block.iter_mut().enumerate() {
                        row.extend(cols.iter().map(|c| c[r].clone()));
                    }
                }
                rows.extend(block);
                rhs.extend(s.coeff(n).to_q_vec());
            }
            if let Some(sol) = linalg::solve(&rows, &rhs) {
                let y = sol.chunks(dim).map(|ch| QuatElement::from_q_vec(alg, ch)).collect();
                let cert = RecurrenceCertificate { order, y, start };
                if cert.verify(s) {
                    return Ok(Some(cert));
                }
            }
        }
    }
    Ok(None)
}

/// Generators of `H(t, σ)` as a division ring over `Q`: `t` and a `Q`-basis of `H`.
fn generators(ring: &Ring) -> Vec<SkewPoly> {
    let mut g: Vec<SkewPoly> = q_basis(&ring.alg)
        .into_iter()
        .map(|e| SkewPoly::constant(ring, e))
        .collect();
    g.push(SkewPoly::t(ring));
    g
}

pub fn is_central(x: &SkewPoly) -> bool {
    generators(&x.ring).iter().all(|g| &(x * g) == &(g * x))
}

pub fn is_central_fraction(x: &SkewFraction) -> bool {
    generators(x.ring()).into_iter().all(|g| {
        let g = SkewFraction::from_poly(g);
        x.mul(&g).equals(&g.mul(x))
    })
}

#[derive(Clone, Debug)]
pub struct CenterReport {
    /// `Q`-basis of the central polynomials of degree `≤ d`.
    pub basis: Vec<SkewPoly>,
    pub degree_bound: usize,
    pub twist_order: usize,
    pub inner_order: usize,
    /// Inner order equals order, so the closed form applies.
    pub hypothesis: bool,
    /// Agreement with `span{c · t^{mp} : c fixed by σ̃ in h}` when the hypothesis holds.
    pub matches_closed_form: Option<bool>,
}

/// Central elements of `H[t, σ]` of degree `≤ d`, by exact linear algebra.
pub fn center_bounded(ring: &Ring, d: usize) -> CenterReport {
    let alg = &ring.alg;
    let dim = alg.q_dim();
    let basis = q_basis(alg);
    let mut out = Vec::new();
    // the conditions decouple by degree: σ(c_j) = c_j and c_j σ^j(e) = e c_j
    for j in 0..=d {
        let sj = ring.sigma(j as i64);
        let mut rows: Vec<Vec<Q>> = Vec::new();
        let mut fix = ring.twist.q_matrix();
        for (r, row) in fix.iter_mut().enumerate() {
            row[r] -= Q::from_integer(1.into());
        }
        rows.extend(fix);
        for e in &basis {
            let se = sj.apply(e);
            let cols: Vec<Vec<Q>> = basis
                .iter()
                .map(|c| (&(c * &se) - &(e * c)).to_q_vec())
                .collect();
            rows.extend(linalg::transpose(&cols));
        }
        for v in linalg::kernel(&rows, dim) {
            out.push(SkewPoly::monomial(ring, QuatElement::from_q_vec(alg, &v), j));
        }
    }
    let m = ring.twist_order();
    let io = inner_order(&ring.twist);
    let hypothesis = io == m;
    let matches_closed_form = hypothesis.then(|| {
        let h = alg.base();
        let fixed = numfield::fixed_subspace(h, &[ring.twist.center_action().clone()]);
        let mut closed = Vec::new();
        for p in (0..=d).step_by(m) {
            for c in &fixed {
                let x = QuatElement::scalar(alg, FieldElement::new(h, c.clone()));
                closed.push(SkewPoly::monomial(ring, x, p).to_q_vec(d));
            }
        }
        let raw: Vec<Vec<Q>> = out.iter().map(|x| x.to_q_vec(d)).collect();
        linalg::same_span(&raw, &closed)
    });
    CenterReport {
        basis: out,
        degree_bound: d,
        twist_order: m,
        inner_order: io,
        hypothesis,
        matches_closed_form,
    }
}

#[derive(Clone, Debug)]
pub struct TensorReport {
    pub degree_bound: usize,
    /// `[ℓ^⟨τ̃⟩ : h^⟨σ̃⟩]`.
    pub r: usize,
    pub multiplicative: bool,
    pub rank: usize,
    pub injective: bool,
    pub surjective: bool,
}

impl TensorReport {
    pub fn passed(&self) -> bool {
        self.multiplicative && self.injective && self.surjective
    }
}

/// Checks at degree `≤ d` that `y ⊗ z ↦ y·z` identifies
/// `H[t,σ] ⊗ ℓ^⟨τ̃⟩[t^m]` (over `h^⟨σ̃⟩[t^m]`) with `L[t,τ]`.
///
/// `emb` is the embedding `h → ℓ` underlying `L = H ⊗_h ℓ`.
pub fn tensor_decomposition_check(
    h_ring: &Ring,
    l_ring: &Ring,
    emb: &FieldMorphism,
    d: usize,
) -> Result<TensorReport, OreError> {
    let h_alg = &h_ring.alg;
    let l_alg = &l_ring.alg;
    let (h, l) = (h_alg.base(), l_alg.base());
    assert!(same_field(emb.source(), h) && same_field(emb.target(), l));
    let include = |x: &QuatElement| x.map_coeffs(l_alg, emb);
    for e in q_basis(h_alg) {
        if l_ring.twist.apply(&include(&e)) != include(&h_ring.twist.apply(&e)) {
            return Err(OreError::NotAnExtension(format!("τ and σ differ on {e}")));
        }
    }
    let s_tilde = h_ring.twist.center_action();
    let t_tilde = l_ring.twist.center_action();
    let (os, ot) = (s_tilde.order(), t_tilde.order());
    if os != ot {
        return Err(OreError::HypothesisFailed(format!(
            "order of the restriction of τ to the center is {ot}, of σ is {os}"
        )));
    }
    let m = os;
    // Q-bases of k0 = h^⟨σ̃⟩ (pushed into ℓ) and ℓ0 = ℓ^⟨τ̃⟩
    let k0: Vec<FieldElement> = numfield::fixed_subspace(h, &[s_tilde.clone()])
        .into_iter()
        .map(|v| emb.apply(&FieldElement::new(h, v)))
        .collect();
    let l0: Vec<FieldElement> = numfield::fixed_subspace(l, &[t_tilde.clone()])
        .into_iter()
        .map(|v| FieldElement::new(l, v))
        .collect();
    // a k0-basis of ℓ0
    let mut f_basis: Vec<FieldElement> = Vec::new();
    let mut span: Vec<Vec<Q>> = Vec::new();
    for z in &l0 {
        let block: Vec<Vec<Q>> = k0.iter().map(|c| (c * z).coords().to_vec()).collect();
        let mut trial = span.clone();
        trial.extend(block.iter().cloned());
        if linalg::rank(&trial) > linalg::rank(&span) {
            span = linalg::row_space(&trial);
            f_basis.push(z.clone());
        }
    }
    let r = f_basis.len();
    let hq = h_alg.q_dim();
    let mut vecs: Vec<Vec<Q>> = Vec::new();
    let mut images: Vec<(SkewPoly, SkewPoly)> = Vec::new();
    for e in q_basis(h_alg) {
        for j in 0..=d {
            let y = SkewPoly::monomial(l_ring, include(&e), j);
            for f in &f_basis {
                let z = SkewPoly::constant(l_ring, QuatElement::scalar(l_alg, f.clone()));
                vecs.push((&y * &z).to_q_vec(d));
                if j <= 1 {
                    images.push((y.clone(), z));
                }
            }
        }
    }
    let rank = linalg::rank(&vecs);
    let injective = rank == (d + 1) * hq * r;
    let surjective = rank == (d + 1) * l_alg.q_dim();
    // ψ(y⊗z)ψ(y'⊗z') = ψ(yy'⊗zz') on spanning pairs, with z also ranging over t^m
    let tm = SkewPoly::monomial(l_ring, QuatElement::one(l_alg), m);
    let mut multiplicative = true;
    'outer: for (y, z) in images.iter().step_by(3) {
        for (y2, z2) in images.iter().step_by(5) {
            for z2 in [z2.clone(), z2 * &tm] {
                let lhs = &(&(y * z) * y2) * &z2;
                let rhs = &(&(y * y2) * z) * &z2;
                if lhs != rhs {
                    multiplicative = false;
                    break 'outer;
                }
            }
        }
    }
    Ok(TensorReport {
        degree_bound: d,
        r,
        multiplicative,
        rank,
        injective,
        surjective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{automorphisms, NumberField};
    use crate::qalg::{inner_automorphism, QuaternionAlgebra};

    fn conj_ring() -> Ring {
        let f = NumberField::quadratic(2).unwrap();
        let h = QuaternionAlgebra::from_ints(&f, -1, -1).unwrap();
        let s = automorphisms(&f).into_iter().find(|m| !m.is_identity()).unwrap();
        SkewRing::new(AlgebraAutomorphism::from_center(&h, &s).unwrap()).unwrap()
    }

    fn c(ring: &Ring, v: [i64; 4]) -> QuatElement {
        QuatElement::from_ints(&ring.alg, v)
    }

    #[test]
    fn twisted_commutation() {
        let r = conj_ring();
        let t = SkewPoly::t(&r);
        let i = SkewPoly::constant(&r, QuatElement::i(&r.alg));
        assert_eq!(&t * &i, &i * &t);
        let f = r.alg.base().clone();
        let s2 = SkewPoly::constant(&r, QuatElement::scalar(&r.alg, FieldElement::gen(&f)));
        assert_eq!(&t * &s2, &(-&s2) * &t);
    }

    #[test]
    fn divisions_and_lcm() {
        let r = conj_ring();
        let a = SkewPoly::new(&r, vec![c(&r, [1, 2, 0, 1]), c(&r, [0, 1, 1, 0]), c(&r, [3, 0, 0, 1])]);
        let b = SkewPoly::new(&r, vec![c(&r, [1, 0, 1, 0]), c(&r, [2, 1, 0, 0])]);
        let (q, rem) = right_divide(&a, &b).unwrap();
        assert_eq!(&(&q * &b) + &rem, a);
        let (q, rem) = left_divide(&a, &b).unwrap();
        assert_eq!(&(&b * &q) + &rem, a);
        let (m, u, v) = ore_right_lcm(&a, &b).unwrap();
        assert_eq!(&a * &u, m);
        assert_eq!(&b * &v, m);
        let (m, _, _) = ore_right_lcm(&a, &a).unwrap();
        assert_eq!(m.degree(), a.degree());
    }

    #[test]
    fn fractions() {
        let r = conj_ring();
        let a = SkewPoly::new(&r, vec![c(&r, [1, 1, 0, 0]), c(&r, [0, 0, 1, 0])]);
        let b = SkewPoly::new(&r, vec![c(&r, [2, 0, 0, 1]), c(&r, [1, 0, 0, 0])]);
        let f = SkewFraction::new(a.clone(), b.clone()).unwrap();
        let one = SkewFraction::from_poly(SkewPoly::one(&r));
        assert!(f.mul(&f.inv().unwrap()).equals(&one));
        let g = SkewFraction::new(&a * &b, &b * &b).unwrap();
        assert!(f.equals(&g));
        let zero = SkewFraction::from_poly(SkewPoly::zero(&r));
        assert!(f.add(&zero).equals(&f));
        assert!(f.sub(&f).is_zero() || f.sub(&f).equals(&zero));
    }

    #[test]
    fn series_and_recurrence() {
        let h = QuaternionAlgebra::hamilton();
        let r = SkewRing::untwisted(&h);
        let one_minus_t = SkewPoly::new(&r, vec![c(&r, [1, 0, 0, 0]), c(&r, [-1, 0, 0, 0])]);
        let f = SkewFraction::new(SkewPoly::one(&r), one_minus_t).unwrap();
        let s = series_expand(&f, 30);
        assert!(s.coeffs().iter().all(|x| x.is_one()));
        let cert = detect_recurrence(&s, 3).unwrap().unwrap();
        assert_eq!(cert.order, 1);
        assert!(cert.y[0].is_one());

        let r = conj_ring();
        let den = SkewPoly::new(&r, vec![c(&r, [1, 0, 0, 0]), c(&r, [0, -1, 0, 0])]);
        let f = SkewFraction::new(SkewPoly::one(&r), den.clone()).unwrap();
        let s = series_expand(&f, 30);
        let back = SkewLaurent::from_poly(&den, 30).mul(&s);
        assert!(back.agrees_with(&SkewLaurent::from_poly(&SkewPoly::one(&r), 30)));
        let cert = detect_recurrence(&s, 3).unwrap().unwrap();
        assert_eq!(cert.y[0], QuatElement::i(&r.alg));

        let t3 = SkewPoly::monomial(&r, QuatElement::one(&r.alg), 3);
        let f = SkewFraction::new(SkewPoly::t(&r), t3).unwrap();
        assert_eq!(series_expand(&f, 5).ord(), -2);
    }

    #[test]
    fn no_recurrence_for_squares() {
        let h = QuaternionAlgebra::hamilton();
        let r = SkewRing::untwisted(&h);
        let c: Vec<QuatElement> = (0..20)
            .map(|n: i64| {
                let s = (n as f64).sqrt() as i64;
                QuatElement::from_ints(&h, [(s * s == n) as i64, 0, 0, 0])
            })
            .collect();
        let s = SkewLaurent::new(&r, 0, c);
        assert!(detect_recurrence(&s, 3).unwrap().is_none());
        assert!(matches!(
            detect_recurrence(&s, 10),
            Err(OreError::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn center_of_conj_twist() {
        let r = conj_ring();
        let rep = center_bounded(&r, 6);
        assert_eq!(rep.basis.len(), 4);
        assert!(rep.hypothesis);
        assert_eq!(rep.matches_closed_form, Some(true));
        let t2 = SkewPoly::monomial(&r, QuatElement::one(&r.alg), 2);
        assert!(is_central(&t2));
        let it = SkewPoly::monomial(&r, QuatElement::i(&r.alg), 1);
        assert!(!is_central(&it));
    }

    #[test]
    fn center_with_inner_twist() {
        let h = QuaternionAlgebra::hamilton();
        let s = inner_automorphism(&QuatElement::i(&h)).unwrap();
        let r = SkewRing::new(s).unwrap();
        let rep = center_bounded(&r, 2);
        assert!(!rep.hypothesis);
        assert_eq!(rep.matches_closed_form, None);
        // 1, i·t, t²
        assert_eq!(rep.basis.len(), 3);
        assert!(rep.basis.iter().all(is_central));
    }
}
