//! Number fields `Q[x]/(m)` with a monic integer minimal polynomial.
//!
//! Fields are absolute: a tower `h ⊆ ℓ` is two fields and a [`FieldMorphism`]
//! between them. Elements carry their coordinates in the power basis.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::{self, q, Q};
use crate::poly::{self, QPoly, Reducibility};

pub const MAX_DEGREE: usize = 8;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("minimal polynomial must be monic with integer coefficients")]
    NotMonic,
    #[error("minimal polynomial is not squarefree")]
    NotSquarefree,
    #[error("minimal polynomial has the factor {0}")]
    Reducible(String),
    #[error("degree {0} exceeds the supported bound")]
    DegreeTooLarge(usize),
    #[error("generator image is not a root of the minimal polynomial")]
    NotAMorphism,
    #[error("element is a square in its field")]
    IsSquare,
    #[error("could not certify that the element is a non-square")]
    SquareUndecided,
    #[error("elements belong to different fields")]
    FieldMismatch,
}

pub struct NumberField {
    min_poly: Vec<BigInt>,
    poly: QPoly,
    degree: usize,
    label: String,
    // coordinates of x^k for k in 0..2n-1
    powers: Vec<Vec<Q>>,
    embeddings: OnceLock<Vec<Complex64>>,
    automorphisms: OnceLock<Vec<FieldElement>>,
    places: OnceLock<Vec<RealPlace>>,
}

pub type Field = Arc<NumberField>;

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({}, {:?})", self.label, self.min_poly)
    }
}

impl PartialEq for NumberField {
    fn eq(&self, o: &Self) -> bool {
        self.min_poly == o.min_poly
    }
}

impl Eq for NumberField {}

impl NumberField {
    /// Checked constructor: the polynomial must be monic, squarefree and irreducible.
    pub fn new(min_poly: Vec<BigInt>, label: &str) -> Result<Field, FieldError> {
        let p = QPoly::from_bigints(&min_poly);
        let n = p.degree().unwrap_or(0);
        if n == 0 || min_poly.len() != n + 1 {
            return Err(FieldError::NotMonic);
        }
        if n > MAX_DEGREE {
            return Err(FieldError::DegreeTooLarge(n));
        }
        match poly::check_irreducible(&p) {
            Ok(()) => Ok(Self::new_unchecked(min_poly, label)),
            Err(Reducibility::NotMonic) => Err(FieldError::NotMonic),
            Err(Reducibility::NotSquarefree) => Err(FieldError::NotSquarefree),
            Err(Reducibility::HasFactor(f)) => Err(FieldError::Reducible(format!(
                "{:?}",
                f.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>()
            ))),
        }
    }

    pub fn from_ints(min_poly: &[i64], label: &str) -> Result<Field, FieldError> {
        Self::new(min_poly.iter().map(|&c| BigInt::from(c)).collect(), label)
    }

    /// Constructor for polynomials already known to be irreducible.
    pub(crate) fn new_unchecked(min_poly: Vec<BigInt>, label: &str) -> Field {
        let poly = QPoly::from_bigints(&min_poly);
        let n = poly.degree().unwrap();
        let mut powers: Vec<Vec<Q>> = (0..n).map(|i| linalg::unit_vec(n, i)).collect();
        for _ in n..2 * n {
            let prev = powers.last().unwrap().clone();
            // multiply by x: shift, then replace x^n by -(m_0 + ... + m_{n-1} x^{n-1})
            let mut next = vec![Q::zero(); n];
            for i in 1..n {
                next[i] = prev[i - 1].clone();
            }
            let top = &prev[n - 1];
            if !top.is_zero() {
                for (i, v) in next.iter_mut().enumerate() {
                    *v -= top * poly.coeff(i);
                }
            }
            powers.push(next);
        }
        Arc::new(NumberField {
            min_poly,
            poly,
            degree: n,
            label: label.to_string(),
            powers,
            embeddings: OnceLock::new(),
            automorphisms: OnceLock::new(),
            places: OnceLock::new(),
        })
    }

    pub fn rationals() -> Field {
        Self::new_unchecked(vec![BigInt::zero(), BigInt::one()], "Q")
    }

    /// `Q(√d)` for a non-square integer `d`.
    pub fn quadratic(d: i64) -> Result<Field, FieldError> {
        Self::from_ints(&[-d, 0, 1], &format!("Q(sqrt({d}))"))
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }

    /// Complex roots of the minimal polynomial: real ones first in increasing
    /// order, then the complex ones.
    pub fn embeddings(&self) -> &[Complex64] {
        self.embeddings.get_or_init(|| {
            if self.degree == 1 {
                let r = -self.poly.coeff(0);
                return vec![Complex64::new(r.to_f64().unwrap(), 0.0)];
            }
            let mut roots = self.poly.complex_roots();
            let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for z in roots.iter_mut() {
                if z.im.abs() < 1e-9 * scale {
                    z.im = 0.0;
                }
            }
            roots.sort_by(|a, b| {
                (a.im != 0.0)
                    .cmp(&(b.im != 0.0))
                    .then(a.re.partial_cmp(&b.re).unwrap())
                    .then(a.im.partial_cmp(&b.im).unwrap())
            });
            roots
        })
    }

    /// Real places, one per real root of the minimal polynomial, with isolating intervals.
    pub fn real_places(&self) -> &[RealPlace] {
        self.places.get_or_init(|| {
            if self.degree == 1 {
                let r = -self.poly.coeff(0);
                return vec![RealPlace {
                    index: 0,
                    lo: &r - q(1),
                    hi: r,
                }];
            }
            self.poly
                .isolate_real_roots()
                .into_iter()
                .enumerate()
                .map(|(index, (lo, hi))| RealPlace { index, lo, hi })
                .collect()
        })
    }

    /// Discriminant of the minimal polynomial, as the resultant of `m` and `m'`
    /// up to sign.
    pub fn discriminant(&self) -> BigInt {
        let r = resultant(&self.poly, &self.poly.derivative());
        r.to_integer()
    }
}

pub fn same_field(a: &Field, b: &Field) -> bool {
    Arc::ptr_eq(a, b) || a.min_poly == b.min_poly
}

/// Resultant via the Sylvester determinant.
pub fn resultant(a: &QPoly, b: &QPoly) -> Q {
    let (m, n) = (a.degree().unwrap_or(0), b.degree().unwrap_or(0));
    let size = m + n;
    if size == 0 {
        return Q::one();
    }
    let mut s = vec![vec![Q::zero(); size]; size];
    for i in 0..n {
        for j in 0..=m {
            s[i][i + j] = a.coeff(m - j);
        }
    }
    for i in 0..m {
        for j in 0..=n {
            s[n + i][i + j] = b.coeff(n - j);
        }
    }
    linalg::det(&s)
}

/// A real embedding, given by an isolating interval `(lo, hi]` of a real root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealPlace {
    pub index: usize,
    pub lo: Q,
    pub hi: Q,
}

#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    c: Vec<Q>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree == 1 {
            return write!(f, "{}", self.c[0]);
        }
        let parts: Vec<String> = self.c.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, o: &Self) -> bool {
        same_field(&self.field, &o.field) && self.c == o.c
    }
}

impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

impl FieldElement {
    pub fn new(field: &Field, mut c: Vec<Q>) -> Self {
        assert!(c.len() <= field.degree, "too many coordinates");
        c.resize(field.degree, Q::zero());
        FieldElement {
            field: field.clone(),
            c,
        }
    }

    pub fn from_ints(field: &Field, c: &[i64]) -> Self {
        Self::new(field, c.iter().map(|&x| q(x)).collect())
    }

    pub fn from_q(field: &Field, x: Q) -> Self {
        Self::new(field, vec![x])
    }

    pub fn from_int(field: &Field, x: i64) -> Self {
        Self::from_q(field, q(x))
    }

    pub fn zero(field: &Field) -> Self {
        Self::new(field, Vec::new())
    }

    pub fn one(field: &Field) -> Self {
        Self::from_int(field, 1)
    }

    /// The power-basis generator.
    pub fn gen(field: &Field) -> Self {
        if field.degree == 1 {
            return Self::from_q(field, -field.poly.coeff(0));
        }
        Self::new(field, linalg::unit_vec(field.degree, 1))
    }

    /// Value of a rational polynomial at the generator.
    pub fn from_poly(field: &Field, p: &QPoly) -> Self {
        let g = Self::gen(field);
        p.coeffs()
            .iter()
            .rev()
            .fold(Self::zero(field), |acc, c| &(&acc * &g) + &Self::from_q(field, c.clone()))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coords(&self) -> &[Q] {
        &self.c
    }

    pub fn as_poly(&self) -> QPoly {
        QPoly::new(self.c.clone())
    }

    pub fn is_zero(&self) -> bool {
        linalg::is_zero_vec(&self.c)
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(Zero::is_zero)
    }

    /// The rational value, when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Q> {
        self.c[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| self.c[0].clone())
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::new(&self.field, linalg::vec_scale(&self.c, s))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.field.degree == 1 {
            return Some(Self::from_q(&self.field, self.c[0].recip()));
        }
        let (g, s, _) = self.as_poly().xgcd(&self.field.poly);
        debug_assert!(g.degree() == Some(0));
        Some(Self::new(&self.field, s.coeffs().to_vec()))
    }

    pub fn pow(&self, e: i64) -> Option<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(&self.field);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Some(acc)
    }

    /// Minimal polynomial over `Q`, monic.
    pub fn minimal_polynomial(&self) -> QPoly {
        let n = self.field.degree;
        let mut pows = vec![Self::one(&self.field)];
        for d in 1..=n {
            let next = &pows[d - 1] * self;
            let basis: Vec<Vec<Q>> = pows.iter().map(|p| p.c.clone()).collect();
            if let Some(coef) = linalg::coordinates_in(&basis, &next.c) {
                let mut m: Vec<Q> = coef.iter().map(|c| -c).collect();
                m.push(Q::one());
                return QPoly::new(m);
            }
            pows.push(next);
        }
        unreachable!("powers beyond the degree are always dependent")
    }

    /// Image under a real place, as a sign (`0` for zero).
    pub fn sign_at(&self, place: &RealPlace) -> i8 {
        if self.is_zero() {
            return 0;
        }
        poly::sign_at_isolated_root(&self.as_poly(), &self.field.poly, &place.lo, &place.hi)
    }

    /// Complex value under the `k`-th embedding.
    pub fn embed(&self, k: usize) -> Complex64 {
        let z = self.field.embeddings()[k];
        self.as_poly().eval_c(z)
    }

    /// A square root in the same field, if one exists (search verified exactly).
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        roots_of_quadratic_sqrt(self).into_iter().next()
    }

    /// Certificate that this element is not a square: a prime `p` and a root `r`
    /// of the minimal polynomial mod `p` at which the element reduces to a
    /// quadratic non-residue.
    pub fn nonsquare_certificate(&self) -> Option<NonSquareCertificate> {
        if self.is_zero() {
            return None;
        }
        let disc = self.field.discriminant();
        let den = linalg::common_denominator(&self.c);
        let f = &self.field;
        if f.degree == 1 {
            let c = &self.c[0];
            if c.is_negative() {
                return Some(NonSquareCertificate {
                    prime: 0,
                    root: 0,
                });
            }
        }
        for p in small_primes(20_000).into_iter().skip(1) {
            let pb = BigInt::from(p);
            if (&disc % &pb).is_zero() || (&den % &pb).is_zero() {
                continue;
            }
            let m: Vec<u64> = f.min_poly.iter().map(|c| mod_big(c, p)).collect();
            let Some(r) = (0..p).find(|&x| eval_mod(&m, x, p) == 0) else {
                continue;
            };
            let mut v = 0u64;
            let mut xp = 1u64;
            for c in &self.c {
                let num = mod_big(c.numer(), p);
                let dinv = inv_mod(mod_big(c.denom(), p), p);
                v = (v + num * dinv % p * xp) % p;
                xp = xp * r % p;
            }
            if v == 0 {
                continue;
            }
            if pow_mod(v, (p - 1) / 2, p) == p - 1 {
                return Some(NonSquareCertificate { prime: p, root: r });
            }
        }
        None
    }
}

/// A prime `p` (coprime to the discriminant and denominators) and a root of the
/// minimal polynomial mod `p` where the element is a non-residue. `prime = 0`
/// encodes a negative rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonSquareCertificate {
    pub prime: u64,
    pub root: u64,
}

fn roots_of_quadratic_sqrt(c: &FieldElement) -> Vec<FieldElement> {
    let f = c.field.clone();
    let mp = c.minimal_polynomial();
    // y = sqrt(c) has minimal polynomial dividing mp(y^2)
    let mut g = vec![Q::zero(); 2 * mp.coeffs().len() - 1];
    for (i, x) in mp.coeffs().iter().enumerate() {
        g[2 * i] = x.clone();
    }
    let gpoly = QPoly::new(g);
    roots_in_field(&gpoly, &f)
        .into_iter()
        .filter(|y| &(y * y) == c)
        .collect()
}

fn mod_big(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().unwrap()
}

fn eval_mod(m: &[u64], x: u64, p: u64) -> u64 {
    m.iter().rev().fold(0, |acc, &c| (acc * x + c) % p)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn small_primes(limit: u64) -> Vec<u64> {
    let mut sieve = vec![true; limit as usize + 1];
    let mut out = Vec::new();
    for i in 2..=limit as usize {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= limit as usize {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

fn check_same(a: &FieldElement, b: &FieldElement) {
    assert!(
        same_field(&a.field, &b.field),
        "field mismatch: {} vs {}",
        a.field.label,
        b.field.label
    );
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        check_same(self, o);
        FieldElement {
            field: self.field.clone(),
            c: linalg::vec_add(&self.c, &o.c),
        }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        check_same(self, o);
        FieldElement {
            field: self.field.clone(),
            c: linalg::vec_sub(&self.c, &o.c),
        }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            c: self.c.iter().map(|x| -x).collect(),
        }
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, o: &FieldElement) -> FieldElement {
        check_same(self, o);
        let n = self.field.degree;
        let mut prod = vec![Q::zero(); 2 * n - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let mut out = prod[..n].to_vec();
        for (k, coef) in prod.iter().enumerate().skip(n) {
            if coef.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&self.field.powers[k]) {
                if !p.is_zero() {
                    *o += coef * p;
                }
            }
        }
        FieldElement {
            field: self.field.clone(),
            c: out,
        }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Ring morphism between number fields, determined by the image of the generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMorphism {
    source: Field,
    target: Field,
    gen_image: FieldElement,
}

impl FieldMorphism {
    pub fn new(source: &Field, target: &Field, gen_image: FieldElement) -> Result<Self, FieldError> {
        if !same_field(gen_image.field(), target) {
            return Err(FieldError::FieldMismatch);
        }
        let v = eval_at(source.poly(), &gen_image);
        if !v.is_zero() {
            return Err(FieldError::NotAMorphism);
        }
        Ok(FieldMorphism {
            source: source.clone(),
            target: target.clone(),
            gen_image,
        })
    }

    pub fn identity(f: &Field) -> Self {
        FieldMorphism {
            source: f.clone(),
            target: f.clone(),
            gen_image: FieldElement::gen(f),
        }
    }

    /// The unique embedding of `Q` into `f`.
    pub fn from_rationals(f: &Field) -> Self {
        FieldMorphism {
            source: NumberField::rationals(),
            target: f.clone(),
            gen_image: FieldElement::zero(f),
        }
    }

    pub fn source(&self) -> &Field {
        &self.source
    }

    pub fn target(&self) -> &Field {
        &self.target
    }

    pub fn gen_image(&self) -> &FieldElement {
        &self.gen_image
    }

    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        check_same(x, &FieldElement::zero(&self.source));
        eval_at(&x.as_poly(), &self.gen_image)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &FieldMorphism) -> FieldMorphism {
        assert!(same_field(&other.target, &self.source), "morphisms do not compose");
        FieldMorphism {
            source: other.source.clone(),
            target: self.target.clone(),
            gen_image: self.apply(&other.gen_image),
        }
    }

    pub fn is_endomorphism(&self) -> bool {
        same_field(&self.source, &self.target)
    }

    pub fn is_identity(&self) -> bool {
        self.is_endomorphism() && self.gen_image == FieldElement::gen(&self.target)
    }

    /// Order of an automorphism.
    pub fn order(&self) -> usize {
        assert!(self.is_endomorphism());
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = self.compose(&p);
            k += 1;
            assert!(k <= 2 * MAX_DEGREE + 1, "automorphism of unbounded order");
        }
        k
    }

    pub fn pow(&self, e: usize) -> FieldMorphism {
        let mut p = FieldMorphism::identity(&self.source);
        for _ in 0..e {
            p = self.compose(&p);
        }
        p
    }

    pub fn inverse(&self) -> FieldMorphism {
        self.pow(self.order() - 1)
    }

    /// Matrix of the Q-linear map in the power bases (target rows, source columns).
    pub fn matrix(&self) -> Vec<Vec<Q>> {
        let n = self.source.degree;
        let mut cols = Vec::with_capacity(n);
        let mut p = FieldElement::one(&self.target);
        for _ in 0..n {
            cols.push(p.c.clone());
            p = &p * &self.gen_image;
        }
        linalg::transpose(&cols)
    }

    /// Whether `self` fixes the image of `emb` pointwise.
    pub fn fixes(&self, emb: &FieldMorphism) -> bool {
        self.apply(&emb.gen_image) == emb.gen_image
    }
}

fn eval_at(p: &QPoly, x: &FieldElement) -> FieldElement {
    let f = x.field.clone();
    p.coeffs()
        .iter()
        .rev()
        .fold(FieldElement::zero(&f), |acc, c| {
            let mut r = &acc * x;
            r.c[0] += c;
            r
        })
}

const DENOMINATOR_CAP: u64 = 1 << 24;

/// Roots of a rational polynomial inside a number field.
///
/// Candidates come from a floating-point solve (one complex root of `g` per
/// embedding, then a Vandermonde system for the coordinates and continued
/// fractions to recover rationals); every returned root is verified exactly.
pub fn roots_in_field(g: &QPoly, f: &Field) -> Vec<FieldElement> {
    let Some(k) = g.degree() else {
        return Vec::new();
    };
    if k == 0 {
        return Vec::new();
    }
    if f.degree == 1 {
        return poly::rational_roots(g)
            .into_iter()
            .map(|r| FieldElement::from_q(f, r))
            .collect();
    }
    let sq = g.monic().gcd(&g.derivative());
    let g = if sq.degree().unwrap_or(0) > 0 {
        g.div_rem(&sq).0.monic()
    } else {
        g.monic()
    };
    let k = g.degree().unwrap();
    let n = f.degree;
    let emb = f.embeddings().to_vec();
    let groots = g.complex_roots();
    let scale_g = groots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let greal: Vec<bool> = groots.iter().map(|z| z.im.abs() < 1e-8 * scale_g).collect();
    let gconj: Vec<usize> = groots
        .iter()
        .map(|z| {
            (0..k)
                .min_by(|&a, &b| {
                    (groots[a] - z.conj())
                        .norm()
                        .partial_cmp(&(groots[b] - z.conj()).norm())
                        .unwrap()
                })
                .unwrap()
        })
        .collect();
    // embedding partners under complex conjugation
    let partner: Vec<usize> = emb
        .iter()
        .enumerate()
        .map(|(i, z)| {
            if z.im == 0.0 {
                i
            } else {
                (0..n)
                    .filter(|&j| j != i)
                    .min_by(|&a, &b| {
                        (emb[a] - z.conj())
                            .norm()
                            .partial_cmp(&(emb[b] - z.conj()).norm())
                            .unwrap()
                    })
                    .unwrap()
            }
        })
        .collect();
    let slots: Vec<usize> = (0..n).filter(|&i| partner[i] >= i).collect();
    let vander: Vec<Vec<Complex64>> = emb
        .iter()
        .map(|z| (0..n).map(|i| z.powi(i as i32)).collect())
        .collect();
    let Some(vinv) = complex_inverse(&vander) else {
        return Vec::new();
    };
    // images are pairwise distinct when g is the minimal polynomial of a generator
    let injective = k == n && g.coeffs() == f.poly.coeffs();
    let mut found: Vec<FieldElement> = Vec::new();
    let mut seen = HashSet::new();
    let mut assign = vec![usize::MAX; n];
    let mut used = vec![false; k];
    let mut budget: u64 = 4_000_000;
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        s: usize,
        slots: &[usize],
        partner: &[usize],
        emb: &[Complex64],
        groots: &[Complex64],
        greal: &[bool],
        gconj: &[usize],
        injective: bool,
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
        budget: &mut u64,
        out: &mut dyn FnMut(&[usize]),
    ) {
        if *budget == 0 {
            return;
        }
        if s == slots.len() {
            *budget -= 1;
            out(assign);
            return;
        }
        let e = slots[s];
        let real = emb[e].im == 0.0;
        for j in 0..groots.len() {
            if real != greal[j] && real {
                continue;
            }
            let pj = gconj[j];
            if injective && (used[j] || (!real && used[pj])) {
                continue;
            }
            if injective && !real && pj == j {
                continue;
            }
            assign[e] = j;
            used[j] = true;
            if !real {
                assign[partner[e]] = pj;
                used[pj] = true;
            }
            dfs(
                s + 1, slots, partner, emb, groots, greal, gconj, injective, assign, used, budget, out,
            );
            used[j] = false;
            if !real {
                used[pj] = false;
            }
        }
    }
    let mut handle = |a: &[usize]| {
        let r: Vec<Complex64> = a.iter().map(|&j| groots[j]).collect();
        let mut coords = Vec::with_capacity(n);
        let mut den = BigInt::one();
        for row in &vinv {
            let v: Complex64 = row.iter().zip(&r).map(|(x, y)| x * y).sum();
            if v.im.abs() > 1e-6 * v.re.abs().max(1.0) {
                return;
            }
            match poly::rationalize(v.re, 1_000_000, 1e-9) {
                Some(x) => {
                    den = den.lcm(x.denom());
                    // spurious roundings have unrelated denominators
                    if den > BigInt::from(DENOMINATOR_CAP) {
                        return;
                    }
                    coords.push(x)
                }
                None => return,
            }
        }
        let x = FieldElement::new(f, coords);
        if seen.contains(&x) {
            return;
        }
        if eval_at(&g, &x).is_zero() {
            seen.insert(x.clone());
            found.push(x);
        }
    };
    dfs(
        0,
        &slots,
        &partner,
        &emb,
        &groots,
        &greal,
        &gconj,
        injective,
        &mut assign,
        &mut used,
        &mut budget,
        &mut handle,
    );
    found.sort_by(|a, b| a.c.cmp(&b.c));
    found
}

fn complex_inverse(m: &[Vec<Complex64>]) -> Option<Vec<Vec<Complex64>>> {
    let n = m.len();
    let mut a: Vec<Vec<Complex64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].norm().partial_cmp(&a[y][c].norm()).unwrap())?;
        if a[p][c].norm() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        let inv = Complex64::new(1.0, 0.0) / a[c][c];
        for x in a[c].iter_mut() {
            *x *= inv;
        }
        let prow = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != c {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// All automorphisms of `f` over `Q` (cached on the field).
pub fn automorphisms(f: &Field) -> Vec<FieldMorphism> {
    let imgs = f
        .automorphisms
        .get_or_init(|| roots_in_field(&f.poly, f));
    let mut out: Vec<FieldMorphism> = imgs
        .iter()
        .map(|g| FieldMorphism {
            source: f.clone(),
            target: f.clone(),
            gen_image: g.clone(),
        })
        .collect();
    // identity first
    out.sort_by_key(|m| !m.is_identity());
    out
}

/// Automorphisms of `l` fixing the image of `h_emb` pointwise, identity first.
pub fn automorphism_group(l: &Field, h_emb: &FieldMorphism) -> Vec<FieldMorphism> {
    automorphisms(l)
        .into_iter()
        .filter(|s| s.fixes(h_emb))
        .collect()
}

pub fn is_galois(l: &Field, h_emb: &FieldMorphism) -> bool {
    let deg = l.degree / h_emb.source.degree;
    automorphism_group(l, h_emb).len() == deg
}

/// All embeddings of `source` into `target`.
pub fn embeddings_into(source: &Field, target: &Field) -> Vec<FieldMorphism> {
    if source.degree == 1 {
        return vec![FieldMorphism::from_rationals(target)];
    }
    if target.degree % source.degree != 0 {
        return Vec::new();
    }
    roots_in_field(&source.poly, target)
        .into_iter()
        .map(|g| FieldMorphism {
            source: source.clone(),
            target: target.clone(),
            gen_image: g,
        })
        .collect()
}

/// Q-basis (as coordinate rows) of the subfield fixed by every map in `s`.
pub fn fixed_subspace(l: &Field, s: &[FieldMorphism]) -> Vec<Vec<Q>> {
    let n = l.degree;
    let mut rows = Vec::new();
    for m in s {
        let mut a = m.matrix();
        for (i, row) in a.iter_mut().enumerate() {
            row[i] -= q(1);
        }
        rows.extend(a);
    }
    linalg::kernel(&rows, n)
}

/// The subfield of `l` fixed by `s`, with its embedding into `l`.
pub fn fixed_field(l: &Field, s: &[FieldMorphism]) -> (Field, FieldMorphism) {
    let basis = fixed_subspace(l, s);
    let d = basis.len();
    if d == l.degree {
        return (l.clone(), FieldMorphism::identity(l));
    }
    if d == 1 {
        return (NumberField::rationals(), FieldMorphism::from_rationals(l));
    }
    let label = format!("{}^fix", l.label);
    subfield_from_basis(l, &basis, &label)
}

/// Builds an absolute field for the subfield of `l` spanned by `basis`
/// (which must be closed under multiplication).
pub fn subfield_from_basis(l: &Field, basis: &[Vec<Q>], label: &str) -> (Field, FieldMorphism) {
    let d = basis.len();
    let elems: Vec<FieldElement> = basis.iter().map(|b| FieldElement::new(l, b.clone())).collect();
    let mut candidates: Vec<FieldElement> = Vec::new();
    for e in &elems {
        candidates.push(e.clone());
    }
    for i in 0..d {
        for j in 0..d {
            if i != j {
                for k in 1..=3 {
                    candidates.push(&elems[i] + &elems[j].scale(&q(k)));
                }
            }
        }
    }
    let all: FieldElement = elems
        .iter()
        .enumerate()
        .fold(FieldElement::zero(l), |acc, (i, e)| &acc + &e.scale(&q(i as i64 + 1)));
    candidates.push(all);
    let mut best: Option<(BigInt, FieldElement, QPoly)> = None;
    for c in candidates {
        let mp = c.minimal_polynomial();
        if mp.degree() != Some(d) {
            continue;
        }
        let (beta, mp) = polish_generator(&c, &mp);
        let h = mp
            .coeffs()
            .iter()
            .map(|x| x.numer().abs())
            .max()
            .unwrap_or_default();
        if best.as_ref().is_none_or(|(bh, _, _)| &h < bh) {
            best = Some((h, beta, mp));
        }
    }
    let (_, beta, mp) = best.expect("no primitive element among candidates");
    let f = NumberField::new_unchecked(mp.to_bigints().unwrap(), label);
    let emb = FieldMorphism {
        source: f.clone(),
        target: l.clone(),
        gen_image: beta,
    };
    (f, emb)
}

/// Shifts away the trace term, clears denominators and strips integer factors
/// so the minimal polynomial is monic integral with small coefficients.
fn polish_generator(x: &FieldElement, mp: &QPoly) -> (FieldElement, QPoly) {
    let d = mp.degree().unwrap() as i64;
    let shift = mp.coeff(d as usize - 1) / q(d);
    let mut beta = x.clone();
    beta.c[0] += &shift;
    let mut p = beta.minimal_polynomial();
    // scale so every coefficient is integral
    let den = linalg::common_denominator(p.coeffs());
    if !den.is_one() {
        let s = Q::from_integer(den);
        beta = beta.scale(&s);
        p = beta.minimal_polynomial();
    }
    for pr in small_primes(60) {
        loop {
            let s = q(pr as i64);
            let trial = beta.scale(&s.recip());
            let tp = trial.minimal_polynomial();
            if tp.to_bigints().is_some() {
                beta = trial;
                p = tp;
            } else {
                break;
            }
        }
    }
    (beta, p)
}

/// `base(√c)` for a certified non-square `c`: the new field, the embedding of
/// `base`, and the square root of `c` in it.
pub fn adjoin_sqrt(
    base: &Field,
    c: &FieldElement,
    label: &str,
) -> Result<(Field, FieldMorphism, FieldElement), FieldError> {
    if c.nonsquare_certificate().is_none() {
        return Err(if c.sqrt().is_some() {
            FieldError::IsSquare
        } else {
            FieldError::SquareUndecided
        });
    }
    let n = base.degree;
    if 2 * n > MAX_DEGREE {
        return Err(FieldError::DegreeTooLarge(2 * n));
    }
    // tower elements u + v y with y^2 = c, as pairs over base
    let tmul = |a: &(FieldElement, FieldElement), b: &(FieldElement, FieldElement)| {
        (
            &(&a.0 * &b.0) + &(&(&a.1 * &b.1) * c),
            &(&a.0 * &b.1) + &(&a.1 * &b.0),
        )
    };
    let flat = |a: &(FieldElement, FieldElement)| {
        let mut v = a.0.c.clone();
        v.extend(a.1.c.iter().cloned());
        v
    };
    let theta = FieldElement::gen(base);
    let zero = FieldElement::zero(base);
    let one = FieldElement::one(base);
    for k in 1..=12i64 {
        let z = (if n == 1 { zero.clone() } else { theta.clone() }, FieldElement::from_int(base, k));
        let mut pows = vec![(one.clone(), zero.clone())];
        for _ in 0..2 * n {
            let next = tmul(pows.last().unwrap(), &z);
            pows.push(next);
        }
        let rows: Vec<Vec<Q>> = pows[..2 * n].iter().map(flat).collect();
        if linalg::rank(&rows) < 2 * n {
            continue;
        }
        let coef = linalg::coordinates_in(&rows, &flat(&pows[2 * n])).unwrap();
        let mut mp: Vec<Q> = coef.iter().map(|x| -x).collect();
        mp.push(Q::one());
        let mp = QPoly::new(mp);
        // make the generator integral by scaling z by L
        let l = linalg::common_denominator(mp.coeffs());
        let lq = Q::from_integer(l.clone());
        let scaled: Vec<Q> = mp
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let e = (2 * n - i) as u32;
                x * Q::from_integer(num_traits::pow(l.clone(), e as usize))
            })
            .collect();
        let ip = QPoly::new(scaled);
        let field = NumberField::new_unchecked(ip.to_bigints().unwrap(), label);
        // coordinates: Lz has power basis; base generator and y in terms of it
        let zrows: Vec<Vec<Q>> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| linalg::vec_scale(r, &num_traits::pow(lq.clone(), i)))
            .collect();
        let express = |v: &[Q]| -> FieldElement {
            FieldElement::new(&field, linalg::coordinates_in(&zrows, v).unwrap())
        };
        let theta_img = if n == 1 {
            FieldElement::from_q(&field, -base.poly.coeff(0))
        } else {
            express(&flat(&(theta.clone(), zero.clone())))
        };
        let y = express(&flat(&(zero.clone(), one.clone())));
        let emb = FieldMorphism::new(base, &field, theta_img).expect("tower embedding");
        debug_assert!(&y * &y == emb.apply(c));
        return Ok((field, emb, y));
    }
    Err(FieldError::SquareUndecided)
}

/// Level of a field: least `s` with `-1` a sum of `s` squares.
#[derive(Clone, Debug)]
pub enum LevelVerdict {
    /// `witness` squares sum to `-1`. `minimal` is set when every smaller power
    /// of two was excluded by proof rather than by bounded search.
    Finite {
        s: usize,
        witness: Vec<FieldElement>,
        minimal: bool,
    },
    InfiniteCertified { place: RealPlace },
    Unknown { bound: u64 },
}

impl LevelVerdict {
    pub fn level(&self) -> Option<usize> {
        match self {
            LevelVerdict::Finite { s, .. } => Some(*s),
            _ => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, LevelVerdict::InfiniteCertified { .. })
    }

    /// Re-checks the attached witness or certificate.
    pub fn verify(&self, f: &Field) -> bool {
        match self {
            LevelVerdict::Finite { witness, .. } => {
                let sum = witness
                    .iter()
                    .fold(FieldElement::zero(f), |acc, x| &acc + &(x * x));
                sum == FieldElement::from_int(f, -1)
            }
            LevelVerdict::InfiniteCertified { place } => {
                f.poly().count_real_roots_in(&place.lo, &place.hi) == 1
            }
            LevelVerdict::Unknown { .. } => true,
        }
    }
}

/// Integer-coordinate elements with every coordinate in `[-r, r]`.
pub fn integer_box(f: &Field, r: i64) -> Vec<FieldElement> {
    let n = f.degree;
    let mut out = Vec::new();
    let mut idx = vec![-r; n];
    loop {
        out.push(FieldElement::from_ints(f, &idx));
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            idx[k] += 1;
            if idx[k] <= r {
                break;
            }
            idx[k] = -r;
            k += 1;
        }
    }
}

/// Largest radius `r ≤ bound` with `(2r+1)^n ≤ budget`.
pub fn box_radius(n: usize, bound: u64, budget: u64) -> u64 {
    let mut r = 0u64;
    while r < bound {
        let size = (2 * (r + 1) + 1).checked_pow(n as u32);
        match size {
            Some(s) if s <= budget => r += 1,
            _ => break,
        }
    }
    r
}

pub fn field_level(f: &Field, height_bound: u64) -> LevelVerdict {
    if let Some(p) = f.real_places().first() {
        return LevelVerdict::InfiniteCertified { place: p.clone() };
    }
    let minus_one = FieldElement::from_int(f, -1);
    if let Some(x) = minus_one.sqrt() {
        return LevelVerdict::Finite {
            s: 1,
            witness: vec![x],
            minimal: true,
        };
    }
    let level_one_excluded = minus_one.nonsquare_certificate().is_some();
    let n = f.degree;
    let r2 = box_radius(n, height_bound, 60_000) as i64;
    let elems = integer_box(f, r2);
    let squares: HashMap<FieldElement, usize> = elems
        .iter()
        .enumerate()
        .map(|(i, x)| (x * x, i))
        .collect();
    for x in &elems {
        let rest = &minus_one - &(x * x);
        if let Some(&j) = squares.get(&rest) {
            return LevelVerdict::Finite {
                s: 2,
                witness: vec![x.clone(), elems[j].clone()],
                minimal: level_one_excluded,
            };
        }
    }
    let r4 = box_radius(n, height_bound, 500) as i64;
    let small = integer_box(f, r4);
    let mut pair_sums: HashMap<FieldElement, (usize, usize)> = HashMap::new();
    for i in 0..small.len() {
        for j in i..small.len() {
            let s = &(&small[i] * &small[i]) + &(&small[j] * &small[j]);
            pair_sums.entry(s).or_insert((i, j));
        }
    }
    for (s, &(i, j)) in &pair_sums {
        let rest = &minus_one - s;
        if let Some(&(k, l)) = pair_sums.get(&rest) {
            return LevelVerdict::Finite {
                s: 4,
                witness: vec![
                    small[i].clone(),
                    small[j].clone(),
                    small[k].clone(),
                    small[l].clone(),
                ],
                minimal: false,
            };
        }
    }
    LevelVerdict::Unknown { bound: r4 as u64 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt2() -> Field {
        NumberField::quadratic(2).unwrap()
    }

    #[test]
    fn arithmetic_in_sqrt2() {
        let f = sqrt2();
        let a = FieldElement::gen(&f);
        assert_eq!(&a * &a, FieldElement::from_int(&f, 2));
        let x = FieldElement::from_ints(&f, &[1, 1]);
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        assert_eq!(y, FieldElement::from_ints(&f, &[-1, 1]));
    }

    #[test]
    fn reducible_rejected() {
        assert!(matches!(
            NumberField::from_ints(&[-4, 0, 1], "bad"),
            Err(FieldError::Reducible(_))
        ));
        assert!(NumberField::from_ints(&[-2, 0, 2], "bad").is_err());
    }

    #[test]
    fn automorphism_groups() {
        let f = sqrt2();
        let q_emb = FieldMorphism::from_rationals(&f);
        let g = automorphism_group(&f, &q_emb);
        assert_eq!(g.len(), 2);
        assert!(g[0].is_identity());
        let c = NumberField::from_ints(&[-2, 0, 0, 1], "cbrt2").unwrap();
        assert_eq!(automorphism_group(&c, &FieldMorphism::from_rationals(&c)).len(), 1);
        assert!(!is_galois(&c, &FieldMorphism::from_rationals(&c)));
        let l = NumberField::from_ints(&[2, 0, -4, 0, 1], "l").unwrap();
        let g = automorphisms(&l);
        assert_eq!(g.len(), 4);
        assert!(g.iter().any(|s| s.order() == 4));
    }

    #[test]
    fn fixed_field_of_square_is_sqrt2() {
        let l = NumberField::from_ints(&[2, 0, -4, 0, 1], "l").unwrap();
        let gen = automorphisms(&l).into_iter().find(|s| s.order() == 4).unwrap();
        let (k, emb) = fixed_field(&l, &[gen.compose(&gen)]);
        assert_eq!(k.degree(), 2);
        assert_eq!(k.min_poly(), &[BigInt::from(-2), BigInt::zero(), BigInt::one()]);
        let r = emb.gen_image();
        assert_eq!(r * r, FieldElement::from_int(&l, 2));
    }

    #[test]
    fn adjoin_sqrt3_to_sqrt2() {
        let f = sqrt2();
        let three = FieldElement::from_int(&f, 3);
        let (l, emb, y) = adjoin_sqrt(&f, &three, "Q(sqrt2,sqrt3)").unwrap();
        assert_eq!(l.degree(), 4);
        assert_eq!(&y * &y, FieldElement::from_int(&l, 3));
        let s2 = emb.apply(&FieldElement::gen(&f));
        assert_eq!(&s2 * &s2, FieldElement::from_int(&l, 2));
        assert!(adjoin_sqrt(&f, &FieldElement::from_int(&f, 8), "x").is_err());
    }

    #[test]
    fn levels() {
        let qi = NumberField::quadratic(-1).unwrap();
        assert_eq!(field_level(&qi, 20).level(), Some(1));
        let qm2 = NumberField::quadratic(-2).unwrap();
        let v = field_level(&qm2, 20);
        assert_eq!(v.level(), Some(2));
        assert!(v.verify(&qm2));
        let qm7 = NumberField::quadratic(-7).unwrap();
        let v = field_level(&qm7, 20);
        assert_eq!(v.level(), Some(4));
        assert!(v.verify(&qm7));
        assert!(field_level(&sqrt2(), 20).is_infinite());
    }

    #[test]
    fn nonsquare_certificates() {
        let f = sqrt2();
        assert!(FieldElement::from_int(&f, 3).nonsquare_certificate().is_some());
        assert!(FieldElement::from_int(&f, 2).nonsquare_certificate().is_none());
        assert!(FieldElement::from_int(&f, 2).sqrt().is_some());
    }

    #[test]
    fn real_place_signs() {
        let f = sqrt2();
        let a = FieldElement::gen(&f);
        let places = f.real_places();
        assert_eq!(places.len(), 2);
        assert_eq!(a.sign_at(&places[0]), -1);
        assert_eq!(a.sign_at(&places[1]), 1);
    }
}
