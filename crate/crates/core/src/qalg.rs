//! Quaternion algebras `(a, b / h)` over number fields.
//!
//! Basis `1, i, j, k` with `i² = a`, `j² = b`, `ij = k = −ji`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::algebra::StructureAlgebra;
use crate::linalg::{self, Q};
use crate::numfield::{
    self, adjoin_sqrt, box_radius, integer_box, same_field, Field, FieldElement, FieldError,
    FieldMorphism, RealPlace,
};

pub const DEFAULT_HEIGHT_BOUND: u64 = 20;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum QuatError {
    #[error("element has zero reduced norm")]
    ZeroNorm,
    #[error("quaternion parameters must be nonzero")]
    ZeroParameter,
    #[error("parameters do not lie in the base field")]
    FieldMismatch,
    #[error("images violate the defining relations: {0}")]
    RelationsViolated(&'static str),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub struct QuaternionAlgebra {
    base: Field,
    a: FieldElement,
    b: FieldElement,
    label: String,
}

pub type Algebra = Arc<QuaternionAlgebra>;

impl fmt::Debug for QuaternionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {} / {})", self.a, self.b, self.base.label())
    }
}

impl PartialEq for QuaternionAlgebra {
    fn eq(&self, o: &Self) -> bool {
        same_field(&self.base, &o.base) && self.a == o.a && self.b == o.b
    }
}

impl Eq for QuaternionAlgebra {}

impl QuaternionAlgebra {
    pub fn new(base: &Field, a: FieldElement, b: FieldElement) -> Result<Algebra, QuatError> {
        if !same_field(a.field(), base) || !same_field(b.field(), base) {
            return Err(QuatError::FieldMismatch);
        }
        if a.is_zero() || b.is_zero() {
            return Err(QuatError::ZeroParameter);
        }
        let label = format!("({}, {} / {})", a, b, base.label());
        let alg = Arc::new(QuaternionAlgebra {
            base: base.clone(),
            a,
            b,
            label,
        });
        let (i, j) = (QuatElement::i(&alg), QuatElement::j(&alg));
        let k = QuatElement::k(&alg);
        if &i * &i != QuatElement::scalar(&alg, alg.a.clone())
            || &j * &j != QuatElement::scalar(&alg, alg.b.clone())
            || &i * &j != k
            || &j * &i != -&k
        {
            return Err(QuatError::RelationsViolated("multiplication table"));
        }
        Ok(alg)
    }

    pub fn from_ints(base: &Field, a: i64, b: i64) -> Result<Algebra, QuatError> {
        Self::new(
            base,
            FieldElement::from_int(base, a),
            FieldElement::from_int(base, b),
        )
    }

    /// Hamilton's quaternions over `Q`.
    pub fn hamilton() -> Algebra {
        Self::from_ints(&numfield::NumberField::rationals(), -1, -1).unwrap()
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }

    pub fn b(&self) -> &FieldElement {
        &self.b
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Dimension over `Q`.
    pub fn q_dim(&self) -> usize {
        4 * self.base.degree()
    }

    /// Structure constants over `Q` in the basis `e_l · θ^m`.
    pub fn structure_algebra(self: &Arc<Self>) -> StructureAlgebra {
        let basis = q_basis(self);
        let table = basis
            .iter()
            .map(|x| basis.iter().map(|y| (x * y).to_q_vec()).collect())
            .collect();
        StructureAlgebra::new(table)
    }
}

pub fn same_algebra(x: &Algebra, y: &Algebra) -> bool {
    Arc::ptr_eq(x, y) || (same_field(&x.base, &y.base) && x.a == y.a && x.b == y.b)
}

/// The `Q`-basis `e_l · θ^m`, index `l·n + m`.
pub fn q_basis(alg: &Algebra) -> Vec<QuatElement> {
    let n = alg.base.degree();
    (0..4 * n)
        .map(|idx| QuatElement::from_q_vec(alg, &linalg::unit_vec(4 * n, idx)))
        .collect()
}

#[derive(Clone)]
pub struct QuatElement {
    alg: Algebra,
    c: [FieldElement; 4],
}

impl fmt::Debug for QuatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for QuatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.c[0], self.c[1], self.c[2], self.c[3])
    }
}

impl PartialEq for QuatElement {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}

impl Eq for QuatElement {}

impl std::hash::Hash for QuatElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.c.hash(state);
    }
}

impl QuatElement {
    pub fn new(alg: &Algebra, c: [FieldElement; 4]) -> Self {
        for x in &c {
            assert!(same_field(x.field(), &alg.base), "coordinate outside the base field");
        }
        QuatElement {
            alg: alg.clone(),
            c,
        }
    }

    pub fn from_ints(alg: &Algebra, c: [i64; 4]) -> Self {
        let f = &alg.base;
        Self::new(alg, c.map(|x| FieldElement::from_int(f, x)))
    }

    pub fn scalar(alg: &Algebra, x: FieldElement) -> Self {
        let z = FieldElement::zero(&alg.base);
        Self::new(alg, [x, z.clone(), z.clone(), z])
    }

    pub fn zero(alg: &Algebra) -> Self {
        Self::scalar(alg, FieldElement::zero(&alg.base))
    }

    pub fn one(alg: &Algebra) -> Self {
        Self::scalar(alg, FieldElement::one(&alg.base))
    }

    fn unit(alg: &Algebra, l: usize) -> Self {
        let mut c = [0i64; 4];
        c[l] = 1;
        Self::from_ints(alg, c)
    }

    pub fn i(alg: &Algebra) -> Self {
        Self::unit(alg, 1)
    }

    pub fn j(alg: &Algebra) -> Self {
        Self::unit(alg, 2)
    }

    pub fn k(alg: &Algebra) -> Self {
        Self::unit(alg, 3)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn coords(&self) -> &[FieldElement; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(FieldElement::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(FieldElement::is_zero)
    }

    /// The base-field value when the element is a scalar.
    pub fn as_scalar(&self) -> Option<&FieldElement> {
        self.c[1..].iter().all(FieldElement::is_zero).then_some(&self.c[0])
    }

    pub fn scale(&self, s: &FieldElement) -> Self {
        QuatElement {
            alg: self.alg.clone(),
            c: [&self.c[0] * s, &self.c[1] * s, &self.c[2] * s, &self.c[3] * s],
        }
    }

    pub fn scale_q(&self, s: &Q) -> Self {
        QuatElement {
            alg: self.alg.clone(),
            c: [self.c[0].scale(s), self.c[1].scale(s), self.c[2].scale(s), self.c[3].scale(s)],
        }
    }

    pub fn conj(&self) -> Self {
        QuatElement {
            alg: self.alg.clone(),
            c: [self.c[0].clone(), -&self.c[1], -&self.c[2], -&self.c[3]],
        }
    }

    /// `x0² − a·x1² − b·x2² + ab·x3²`.
    pub fn reduced_norm(&self) -> FieldElement {
        let [x0, x1, x2, x3] = &self.c;
        let (a, b) = (&self.alg.a, &self.alg.b);
        let ab = a * b;
        &(&(&(x0 * x0) - &(a * &(x1 * x1))) - &(b * &(x2 * x2))) + &(&ab * &(x3 * x3))
    }

    pub fn reduced_trace(&self) -> FieldElement {
        &self.c[0] + &self.c[0]
    }

    pub fn inv(&self) -> Result<Self, QuatError> {
        let n = self.reduced_norm();
        let ninv = n.inv().ok_or(QuatError::ZeroNorm)?;
        Ok(self.conj().scale(&ninv))
    }

    /// Coordinates over `Q`, index `l·n + m`.
    pub fn to_q_vec(&self) -> Vec<Q> {
        self.c.iter().flat_map(|x| x.coords().iter().cloned()).collect()
    }

    pub fn from_q_vec(alg: &Algebra, v: &[Q]) -> Self {
        let n = alg.base.degree();
        let c: [FieldElement; 4] =
            std::array::from_fn(|l| FieldElement::new(&alg.base, v[l * n..(l + 1) * n].to_vec()));
        QuatElement {
            alg: alg.clone(),
            c,
        }
    }

    /// Coefficientwise image under a field morphism into the base of `target`.
    pub fn map_coeffs(&self, target: &Algebra, f: &FieldMorphism) -> Self {
        QuatElement::new(target, std::array::from_fn(|l| f.apply(&self.c[l])))
    }
}

fn check_alg(x: &QuatElement, y: &QuatElement) {
    assert!(same_algebra(&x.alg, &y.alg), "algebra mismatch");
}

impl Add for &QuatElement {
    type Output = QuatElement;
    fn add(self, o: &QuatElement) -> QuatElement {
        check_alg(self, o);
        QuatElement {
            alg: self.alg.clone(),
            c: std::array::from_fn(|l| &self.c[l] + &o.c[l]),
        }
    }
}

impl Sub for &QuatElement {
    type Output = QuatElement;
    fn sub(self, o: &QuatElement) -> QuatElement {
        check_alg(self, o);
        QuatElement {
            alg: self.alg.clone(),
            c: std::array::from_fn(|l| &self.c[l] - &o.c[l]),
        }
    }
}

impl Neg for &QuatElement {
    type Output = QuatElement;
    fn neg(self) -> QuatElement {
        QuatElement {
            alg: self.alg.clone(),
            c: std::array::from_fn(|l| -&self.c[l]),
        }
    }
}

impl Mul for &QuatElement {
    type Output = QuatElement;
    fn mul(self, o: &QuatElement) -> QuatElement {
        check_alg(self, o);
        let [x0, x1, x2, x3] = &self.c;
        let [y0, y1, y2, y3] = &o.c;
        let (a, b) = (&self.alg.a, &self.alg.b);
        let p = |u: &FieldElement, v: &FieldElement| u * v;
        let x1y1 = p(x1, y1);
        let x2y2 = p(x2, y2);
        let x3y3 = p(x3, y3);
        let z0 = &(&(&p(x0, y0) + &(a * &x1y1)) + &(b * &x2y2)) - &(&(a * b) * &x3y3);
        let z1 = &(&(&p(x0, y1) + &p(x1, y0)) - &(b * &p(x2, y3))) + &(b * &p(x3, y2));
        let z2 = &(&(&p(x0, y2) + &p(x2, y0)) + &(a * &p(x1, y3))) - &(a * &p(x3, y1));
        let z3 = &(&(&p(x0, y3) + &p(x3, y0)) + &p(x1, y2)) - &p(x2, y1);
        QuatElement {
            alg: self.alg.clone(),
            c: [z0, z1, z2, z3],
        }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for QuatElement {
            type Output = QuatElement;
            fn $m(self, o: QuatElement) -> QuatElement {
                (&self).$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

/// The reduced norm recomputed as a determinant: `x` is sent to the 2×2
/// matrix `[[x0 + x1√a, b(x2 + x3√a)], [x2 − x3√a, x0 − x1√a]]` over `h(√a)`.
/// Returns the determinant together with the embedding of `h` it lives over.
pub fn reduced_norm_via_matrix(x: &QuatElement) -> Result<(FieldElement, FieldMorphism), QuatError> {
    let alg = &x.alg;
    let (emb, r) = match alg.a.sqrt() {
        Some(r) => (FieldMorphism::identity(&alg.base), r),
        None => {
            let (_, emb, r) = adjoin_sqrt(&alg.base, &alg.a, "split")?;
            (emb, r)
        }
    };
    let e = |y: &FieldElement| emb.apply(y);
    let [x0, x1, x2, x3] = &x.c;
    let b = e(&alg.b);
    let m00 = &e(x0) + &(&e(x1) * &r);
    let m11 = &e(x0) - &(&e(x1) * &r);
    let m01 = &b * &(&e(x2) + &(&e(x3) * &r));
    let m10 = &e(x2) - &(&e(x3) * &r);
    Ok((&(&m00 * &m11) - &(&m01 * &m10), emb))
}

/// Diagonal form `⟨1, −a, −b, ab⟩` with coefficients pushed into a target field.
#[derive(Clone, Debug)]
pub struct NormForm {
    pub algebra: Algebra,
    pub embedding: FieldMorphism,
    pub coeffs: [FieldElement; 4],
}

impl NormForm {
    pub fn target(&self) -> &Field {
        self.embedding.target()
    }

    pub fn eval(&self, v: &[FieldElement; 4]) -> FieldElement {
        let t = self.target();
        (0..4).fold(FieldElement::zero(t), |acc, l| &acc + &(&self.coeffs[l] * &(&v[l] * &v[l])))
    }
}

pub fn norm_form(alg: &Algebra, embedding: &FieldMorphism) -> NormForm {
    assert!(same_field(embedding.source(), &alg.base));
    let e = |y: &FieldElement| embedding.apply(y);
    let (a, b) = (e(&alg.a), e(&alg.b));
    let one = FieldElement::one(embedding.target());
    NormForm {
        algebra: alg.clone(),
        embedding: embedding.clone(),
        coeffs: [one, -&a, -&b, &a * &b],
    }
}

#[derive(Clone, Debug)]
pub enum AnisotropyVerdict {
    /// The form is definite at this real place (`sign` is the common sign).
    AnisotropicCertified { place: RealPlace, sign: i8 },
    IsotropicWitness { vector: [FieldElement; 4] },
    Unknown { bound: u64 },
}

impl AnisotropyVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, AnisotropyVerdict::AnisotropicCertified { .. })
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(self, AnisotropyVerdict::IsotropicWitness { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AnisotropyVerdict::AnisotropicCertified { .. } => "anisotropic-certified",
            AnisotropyVerdict::IsotropicWitness { .. } => "isotropic",
            AnisotropyVerdict::Unknown { .. } => "unknown",
        }
    }

    /// Re-checks the witness or certificate against the form.
    pub fn verify(&self, f: &NormForm) -> bool {
        match self {
            AnisotropyVerdict::AnisotropicCertified { place, sign } => {
                f.coeffs.iter().all(|c| c.sign_at(place) == *sign)
            }
            AnisotropyVerdict::IsotropicWitness { vector } => {
                vector.iter().any(|x| !x.is_zero()) && f.eval(vector).is_zero()
            }
            AnisotropyVerdict::Unknown { .. } => true,
        }
    }
}

pub fn anisotropy(f: &NormForm, height_bound: u64) -> AnisotropyVerdict {
    let t = f.target().clone();
    for place in t.real_places() {
        let signs: Vec<i8> = f.coeffs.iter().map(|c| c.sign_at(place)).collect();
        if signs.iter().all(|&s| s == signs[0]) {
            return AnisotropyVerdict::AnisotropicCertified {
                place: place.clone(),
                sign: signs[0],
            };
        }
    }
    let r = box_radius(t.degree(), height_bound, 500) as i64;
    let elems = integer_box(&t, r);
    let sq: Vec<FieldElement> = elems.iter().map(|x| x * x).collect();
    // c0 x² + c1 y² keyed by value, keeping one nonzero pair per value
    let mut left: HashMap<FieldElement, (usize, usize)> = HashMap::new();
    for i in 0..elems.len() {
        let u = &f.coeffs[0] * &sq[i];
        for j in 0..elems.len() {
            let v = &u + &(&f.coeffs[1] * &sq[j]);
            let nonzero = !elems[i].is_zero() || !elems[j].is_zero();
            match left.get(&v) {
                Some(&(a, b)) if nonzero && elems[a].is_zero() && elems[b].is_zero() => {
                    left.insert(v, (i, j));
                }
                None => {
                    left.insert(v, (i, j));
                }
                _ => {}
            }
        }
    }
    for k in 0..elems.len() {
        let u = &f.coeffs[2] * &sq[k];
        for l in 0..elems.len() {
            let v = -&(&u + &(&f.coeffs[3] * &sq[l]));
            if let Some(&(i, j)) = left.get(&v) {
                let vector = [
                    elems[i].clone(),
                    elems[j].clone(),
                    elems[k].clone(),
                    elems[l].clone(),
                ];
                if vector.iter().any(|x| !x.is_zero()) {
                    let verdict = AnisotropyVerdict::IsotropicWitness { vector };
                    debug_assert!(verdict.verify(f));
                    return verdict;
                }
            }
        }
    }
    AnisotropyVerdict::Unknown { bound: r as u64 }
}

/// `H ⊗_h ℓ` with the embedding of `h` and the anisotropy verdict deciding division-ness.
#[derive(Clone, Debug)]
pub struct ScalarExtension {
    pub algebra: Algebra,
    pub embedding: FieldMorphism,
    pub verdict: AnisotropyVerdict,
}

impl ScalarExtension {
    pub fn is_division(&self) -> bool {
        self.verdict.is_certified()
    }

    /// Image of `x ∈ H` as `x ⊗ 1`.
    pub fn include(&self, x: &QuatElement) -> QuatElement {
        x.map_coeffs(&self.algebra, &self.embedding)
    }

    /// An explicit nonzero element of reduced norm zero, built from an isotropic witness.
    pub fn zero_divisor(&self) -> Option<QuatElement> {
        match &self.verdict {
            AnisotropyVerdict::IsotropicWitness { vector } => {
                let x = QuatElement::new(&self.algebra, vector.clone());
                (!x.is_zero() && x.reduced_norm().is_zero()).then_some(x)
            }
            _ => None,
        }
    }
}

pub fn scalar_extension(alg: &Algebra, l: &Field, emb: &FieldMorphism, height_bound: u64) -> ScalarExtension {
    assert!(same_field(emb.source(), &alg.base) && same_field(emb.target(), l));
    let ext = if emb.is_identity() {
        alg.clone()
    } else {
        QuaternionAlgebra::new(l, emb.apply(&alg.a), emb.apply(&alg.b)).expect("images of nonzero parameters")
    };
    let verdict = anisotropy(&norm_form(alg, emb), height_bound);
    ScalarExtension {
        algebra: ext,
        embedding: emb.clone(),
        verdict,
    }
}

/// Ring automorphism of a quaternion algebra, determined by the images of `i`,
/// `j` and the action on the center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraAutomorphism {
    alg: Algebra,
    image_i: QuatElement,
    image_j: QuatElement,
    center: FieldMorphism,
}

impl AlgebraAutomorphism {
    pub fn new(
        alg: &Algebra,
        image_i: QuatElement,
        image_j: QuatElement,
        center: FieldMorphism,
    ) -> Result<Self, QuatError> {
        if !center.is_endomorphism() || !same_field(center.source(), &alg.base) {
            return Err(QuatError::RelationsViolated("center action is not an automorphism of the base"));
        }
        let sa = QuatElement::scalar(alg, center.apply(&alg.a));
        let sb = QuatElement::scalar(alg, center.apply(&alg.b));
        if &image_i * &image_i != sa {
            return Err(QuatError::RelationsViolated("image of i does not square to a"));
        }
        if &image_j * &image_j != sb {
            return Err(QuatError::RelationsViolated("image of j does not square to b"));
        }
        if &image_i * &image_j != -&(&image_j * &image_i) {
            return Err(QuatError::RelationsViolated("images of i and j do not anticommute"));
        }
        Ok(AlgebraAutomorphism {
            alg: alg.clone(),
            image_i,
            image_j,
            center,
        })
    }

    pub fn identity(alg: &Algebra) -> Self {
        AlgebraAutomorphism {
            alg: alg.clone(),
            image_i: QuatElement::i(alg),
            image_j: QuatElement::j(alg),
            center: FieldMorphism::identity(&alg.base),
        }
    }

    /// `id ⊗ s`: acts on coordinates only. Requires `s(a) = a`, `s(b) = b`.
    pub fn from_center(alg: &Algebra, s: &FieldMorphism) -> Result<Self, QuatError> {
        Self::new(alg, QuatElement::i(alg), QuatElement::j(alg), s.clone())
    }

    pub fn algebra(&self) -> &Algebra {
        &self.alg
    }

    pub fn image_i(&self) -> &QuatElement {
        &self.image_i
    }

    pub fn image_j(&self) -> &QuatElement {
        &self.image_j
    }

    pub fn center_action(&self) -> &FieldMorphism {
        &self.center
    }

    pub fn apply(&self, x: &QuatElement) -> QuatElement {
        let s = |y: &FieldElement| QuatElement::scalar(&self.alg, self.center.apply(y));
        let k = &self.image_i * &self.image_j;
        let [x0, x1, x2, x3] = &x.c;
        &(&(&s(x0) + &(&s(x1) * &self.image_i)) + &(&s(x2) * &self.image_j)) + &(&s(x3) * &k)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        AlgebraAutomorphism {
            alg: self.alg.clone(),
            image_i: self.apply(&other.image_i),
            image_j: self.apply(&other.image_j),
            center: self.center.compose(&other.center),
        }
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut p = Self::identity(&self.alg);
        for _ in 0..e {
            p = self.compose(&p);
        }
        p
    }

    pub fn is_identity(&self) -> bool {
        self.image_i == QuatElement::i(&self.alg)
            && self.image_j == QuatElement::j(&self.alg)
            && self.center.is_identity()
    }

    /// Order, if at most `cap`.
    pub fn order_bounded(&self, cap: usize) -> Option<usize> {
        let mut p = self.clone();
        for k in 1..=cap {
            if p.is_identity() {
                return Some(k);
            }
            p = self.compose(&p);
        }
        None
    }

    pub fn order(&self) -> Option<usize> {
        self.order_bounded(64)
    }

    pub fn inverse(&self) -> Option<Self> {
        self.order().map(|n| self.pow(n - 1))
    }

    /// Fixes the center pointwise, hence inner (Skolem–Noether).
    pub fn is_inner(&self) -> bool {
        self.center.is_identity()
    }

    /// The `Q`-linear matrix on coordinates `e_l θ^m` (rows = output).
    pub fn q_matrix(&self) -> Vec<Vec<Q>> {
        let cols: Vec<Vec<Q>> = q_basis(&self.alg).iter().map(|x| self.apply(x).to_q_vec()).collect();
        linalg::transpose(&cols)
    }
}

/// Conjugation `x ↦ y x y⁻¹`.
pub fn inner_automorphism(y: &QuatElement) -> Result<AlgebraAutomorphism, QuatError> {
    let yi = y.inv()?;
    let alg = &y.alg;
    let conj = |x: &QuatElement| &(y * x) * &yi;
    Ok(AlgebraAutomorphism {
        alg: alg.clone(),
        image_i: conj(&QuatElement::i(alg)),
        image_j: conj(&QuatElement::j(alg)),
        center: FieldMorphism::identity(&alg.base),
    })
}

/// Smallest `n` with `σⁿ` inner: the order of the action on the center.
pub fn inner_order(s: &AlgebraAutomorphism) -> usize {
    s.center.order()
}

/// Basis (over `Q`) of the center of `H`, computed from structure constants.
pub fn center_of_quaternions(alg: &Algebra) -> Vec<QuatElement> {
    alg.structure_algebra()
        .center()
        .iter()
        .map(|v| QuatElement::from_q_vec(alg, v))
        .collect()
}

pub fn zero_vec4(f: &Field) -> [FieldElement; 4] {
    std::array::from_fn(|_| FieldElement::zero(f))
}

/// Whether a `Q`-span of elements equals the scalars of the base field.
pub fn spans_scalars(alg: &Algebra, elems: &[QuatElement]) -> bool {
    let scalars: Vec<Vec<Q>> = (0..alg.base.degree())
        .map(|m| {
            let mut c = vec![Q::zero(); alg.base.degree()];
            c[m] = Q::from_integer(1.into());
            QuatElement::scalar(alg, FieldElement::new(&alg.base, c)).to_q_vec()
        })
        .collect();
    let got: Vec<Vec<Q>> = elems.iter().map(|e| e.to_q_vec()).collect();
    linalg::same_span(&scalars, &got)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{q, qf};
    use crate::numfield::NumberField;

    #[test]
    fn hamilton_relations() {
        let h = QuaternionAlgebra::hamilton();
        let (i, j, k) = (QuatElement::i(&h), QuatElement::j(&h), QuatElement::k(&h));
        assert_eq!(&i * &j, k);
        assert_eq!(&j * &i, -&k);
        assert_eq!(&k * &k, QuatElement::from_ints(&h, [-1, 0, 0, 0]));
    }

    #[test]
    fn inverse_and_zero_norm() {
        let h = QuaternionAlgebra::hamilton();
        let x = QuatElement::from_ints(&h, [1, 1, 0, 0]);
        let xi = x.inv().unwrap();
        assert_eq!(xi, QuatElement::from_ints(&h, [1, -1, 0, 0]).scale_q(&qf(1, 2)));
        let m = QuaternionAlgebra::from_ints(&NumberField::rationals(), 1, 1).unwrap();
        assert_eq!(QuatElement::from_ints(&m, [1, 1, 0, 0]).inv(), Err(QuatError::ZeroNorm));
    }

    #[test]
    fn norm_matches_matrix_determinant() {
        let h = QuaternionAlgebra::hamilton();
        let x = QuatElement::from_ints(&h, [1, 2, -3, 5]);
        let (d, emb) = reduced_norm_via_matrix(&x).unwrap();
        assert_eq!(d, emb.apply(&x.reduced_norm()));
        assert_eq!(x.reduced_norm().as_rational(), Some(q(39)));
    }

    #[test]
    fn anisotropy_instances() {
        let h = QuaternionAlgebra::hamilton();
        let qi = NumberField::quadratic(-1).unwrap();
        let v = anisotropy(&norm_form(&h, &FieldMorphism::from_rationals(&qi)), 20);
        assert!(v.is_isotropic());
        let q2 = NumberField::quadratic(2).unwrap();
        let f = norm_form(&h, &FieldMorphism::from_rationals(&q2));
        let v = anisotropy(&f, 20);
        assert!(v.is_certified() && v.verify(&f));
        let qm2 = NumberField::quadratic(-2).unwrap();
        let f = norm_form(&h, &FieldMorphism::from_rationals(&qm2));
        let v = anisotropy(&f, 20);
        assert!(v.is_isotropic() && v.verify(&f));
    }

    #[test]
    fn scalar_extension_zero_divisor() {
        let h = QuaternionAlgebra::hamilton();
        let qi = NumberField::quadratic(-1).unwrap();
        let ext = scalar_extension(&h, &qi, &FieldMorphism::from_rationals(&qi), 20);
        assert!(!ext.is_division());
        let z = ext.zero_divisor().unwrap();
        assert!(z.inv().is_err());
    }

    #[test]
    fn inner_automorphisms() {
        let h = QuaternionAlgebra::hamilton();
        let i = QuatElement::i(&h);
        let s = inner_automorphism(&i).unwrap();
        assert_eq!(s.apply(&QuatElement::j(&h)), -&QuatElement::j(&h));
        assert_eq!(s.order(), Some(2));
        assert_eq!(inner_order(&s), 1);
        let t = inner_automorphism(&QuatElement::from_ints(&h, [1, 1, 0, 0])).unwrap();
        assert_eq!(t.order(), Some(4));
        assert_eq!(t.compose(&t), s);
        assert!(inner_automorphism(&QuatElement::one(&h)).unwrap().is_identity());
    }

    #[test]
    fn center_is_base_field() {
        let q2 = NumberField::quadratic(2).unwrap();
        let h = QuaternionAlgebra::from_ints(&q2, -1, -1).unwrap();
        let c = center_of_quaternions(&h);
        assert_eq!(c.len(), 2);
        assert!(spans_scalars(&h, &c));
        let s = AlgebraAutomorphism::from_center(
            &h,
            &numfield::automorphisms(&q2).into_iter().find(|m| !m.is_identity()).unwrap(),
        )
        .unwrap();
        assert_eq!(inner_order(&s), 2);
    }
}
