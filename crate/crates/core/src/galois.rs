//! Galois extensions `L = H ⊗_h ℓ` of quaternion division algebras, restriction
//! maps between their groups, and twisted automorphisms `τ` extending `σ`.

use std::sync::Arc;

use thiserror::Error;

use crate::algebra::StructureAlgebra;
use crate::group::{FiniteGroup, Group, GroupError, GroupHom};
use crate::linalg::{self, Q};
use crate::numfield::{
    self, automorphism_group, embeddings_into, fixed_field, is_galois, same_field, Field,
    FieldElement, FieldError, FieldMorphism, NumberField,
};
use crate::ore::{self, OreError, SkewPoly, SkewRing, TensorReport};
use crate::qalg::{
    self, inner_order, q_basis, same_algebra, scalar_extension, Algebra, AlgebraAutomorphism, AnisotropyVerdict,
    QuatElement, QuatError, QuaternionAlgebra, ScalarExtension,
};

#[derive(Debug, Error)]
pub enum GaloisError {
    #[error("extension is not Galois: {0}")]
    NotGalois(String),
    #[error("norm form is not certified anisotropic: {}", .0.kind())]
    NotAnisotropic(AnisotropyVerdict),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("restriction witness invalid: {0}")]
    WitnessInvalid(String),
    #[error("product condition fails: {0}")]
    ProductConditionFailed(String),
    #[error("hypothesis fails: {0}")]
    HypothesisFailed(String),
    #[error("not an extension: {0}")]
    NotAnExtension(String),
    #[error("precondition fails: {0}")]
    Precondition(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ore(#[from] OreError),
}

pub fn morphism_label(m: &FieldMorphism) -> String {
    if m.is_identity() {
        "id".into()
    } else {
        format!("θ↦{}", m.gen_image())
    }
}

/// `Gal(l/h)` (identity first) together with its multiplication table.
pub fn galois_group(l: &Field, emb: &FieldMorphism) -> Result<(Vec<FieldMorphism>, Group), GaloisError> {
    if !is_galois(l, emb) {
        return Err(GaloisError::NotGalois(format!("{} over {}", l.label(), emb.source().label())));
    }
    let g = automorphism_group(l, emb);
    let labels = g.iter().map(morphism_label).collect();
    let name = format!("Gal({}/{})", l.label(), emb.source().label());
    let table = FiniteGroup::from_elements(&g, |a, b| a.compose(b), labels, &name)?;
    Ok((g, table))
}

/// Closure of `gens` under `mul`, or `None` once it exceeds `cap` elements.
pub fn closure_of<T: Clone + PartialEq>(gens: &[T], id: T, mul: impl Fn(&T, &T) -> T, cap: usize) -> Option<Vec<T>> {
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let y = mul(&out[i], g);
            if !out.contains(&y) {
                if out.len() == cap {
                    return None;
                }
                out.push(y);
            }
        }
        i += 1;
    }
    Some(out)
}

#[derive(Clone, Debug)]
enum Top {
    Commutative,
    Quaternion {
        base: Algebra,
        ext: ScalarExtension,
        group: Vec<AlgebraAutomorphism>,
    },
}

/// A finite Galois extension `L/H` with `L = H ⊗_h ℓ` (or `ℓ/h` itself in the
/// commutative case), its group acting on the `Q`-coordinates of `L`, and the
/// restriction isomorphism onto `Gal(ℓ/h)`.
#[derive(Clone, Debug)]
pub struct GaloisExtension {
    h: Field,
    l: Field,
    emb: FieldMorphism,
    center_group: Vec<FieldMorphism>,
    center_table: Group,
    top: Top,
    table: Group,
    res_tilde: GroupHom,
    matrices: Vec<Vec<Vec<Q>>>,
    base_span: Vec<Vec<Q>>,
}

impl GaloisExtension {
    /// `ℓ/h` as an extension of commutative fields.
    pub fn commutative(l: &Field, emb: &FieldMorphism) -> Result<Self, GaloisError> {
        assert!(same_field(emb.target(), l));
        let (center_group, center_table) = galois_group(l, emb)?;
        let matrices = center_group.iter().map(|s| s.matrix()).collect();
        let base_span = linalg::transpose(&emb.matrix());
        let ext = GaloisExtension {
            h: emb.source().clone(),
            l: l.clone(),
            emb: emb.clone(),
            res_tilde: GroupHom::identity(&center_table),
            table: center_table.clone(),
            center_group,
            center_table,
            top: Top::Commutative,
            matrices,
            base_span,
        };
        ext.verify()?;
        Ok(ext)
    }

    pub fn is_commutative(&self) -> bool {
        matches!(self.top, Top::Commutative)
    }

    pub fn h(&self) -> &Field {
        &self.h
    }

    pub fn l(&self) -> &Field {
        &self.l
    }

    /// The embedding of `h` into `ℓ`.
    pub fn embedding(&self) -> &FieldMorphism {
        &self.emb
    }

    pub fn degree(&self) -> usize {
        self.l.degree() / self.h.degree()
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    /// `Gal(L/H)`.
    pub fn table(&self) -> &Group {
        &self.table
    }

    /// `Gal(ℓ/h)`.
    pub fn center_table(&self) -> &Group {
        &self.center_table
    }

    pub fn center_group(&self) -> &[FieldMorphism] {
        &self.center_group
    }

    /// Restriction `Gal(L/H) → Gal(ℓ/h)`.
    pub fn res_tilde(&self) -> &GroupHom {
        &self.res_tilde
    }

    pub fn h_algebra(&self) -> Option<&Algebra> {
        match &self.top {
            Top::Quaternion { base, .. } => Some(base),
            Top::Commutative => None,
        }
    }

    pub fn l_algebra(&self) -> Option<&Algebra> {
        match &self.top {
            Top::Quaternion { ext, .. } => Some(&ext.algebra),
            Top::Commutative => None,
        }
    }

    pub fn scalar_extension(&self) -> Option<&ScalarExtension> {
        match &self.top {
            Top::Quaternion { ext, .. } => Some(ext),
            Top::Commutative => None,
        }
    }

    pub fn automorphism(&self, g: usize) -> Option<&AlgebraAutomorphism> {
        match &self.top {
            Top::Quaternion { group, .. } => Some(&group[g]),
            Top::Commutative => None,
        }
    }

    /// Image of `x ∈ H` in `L`.
    pub fn include(&self, x: &QuatElement) -> QuatElement {
        self.scalar_extension().expect("quaternion extension").include(x)
    }

    /// `dim_Q L`.
    pub fn dim(&self) -> usize {
        match self.top {
            Top::Commutative => self.l.degree(),
            Top::Quaternion { .. } => 4 * self.l.degree(),
        }
    }

    pub fn q_matrix(&self, g: usize) -> &[Vec<Q>] {
        &self.matrices[g]
    }

    pub fn act(&self, g: usize, v: &[Q]) -> Vec<Q> {
        linalg::mat_vec(&self.matrices[g], v)
    }

    /// `Q`-basis of `H` inside `L`, as coordinate rows.
    pub fn base_span(&self) -> &[Vec<Q>] {
        &self.base_span
    }

    /// Coordinates in `L` of an element of the center `ℓ`.
    pub fn center_vec(&self, x: &FieldElement) -> Vec<Q> {
        match &self.top {
            Top::Commutative => x.coords().to_vec(),
            Top::Quaternion { ext, .. } => QuatElement::scalar(&ext.algebra, x.clone()).to_q_vec(),
        }
    }

    pub fn structure(&self) -> StructureAlgebra {
        match &self.top {
            Top::Quaternion { ext, .. } => ext.algebra.structure_algebra(),
            Top::Commutative => {
                let n = self.l.degree();
                let e = |i: usize| FieldElement::new(&self.l, linalg::unit_vec(n, i));
                let table = (0..n)
                    .map(|i| (0..n).map(|j| (&e(i) * &e(j)).coords().to_vec()).collect())
                    .collect();
                StructureAlgebra::new(table)
            }
        }
    }

    /// `Q`-basis of the elements of `L` fixed by the listed group elements.
    pub fn fixed_set(&self, elems: &[usize]) -> Vec<Vec<Q>> {
        let mut rows = Vec::new();
        for &g in elems {
            for (i, row) in self.matrices[g].iter().enumerate() {
                let mut r = row.clone();
                r[i] -= Q::from_integer(1.into());
                rows.push(r);
            }
        }
        linalg::kernel(&rows, self.dim())
    }

    /// The fixed set of the whole group is exactly `H`.
    pub fn artin_check(&self) -> bool {
        let all: Vec<usize> = (0..self.order()).collect();
        linalg::same_span(&self.fixed_set(&all), &self.base_span)
    }

    /// Centralizer of `H` in `L` equals the center of `L`.
    pub fn is_outer(&self) -> bool {
        self.is_outer_over(&self.base_span)
    }

    /// Centralizer of the span `sub` equals the center of `L`.
    pub fn is_outer_over(&self, sub: &[Vec<Q>]) -> bool {
        let s = self.structure();
        linalg::same_span(&s.centralizer(sub), &s.center())
    }

    /// `σ(1⊗x) = 1⊗σ̃(x)` on the power basis of `ℓ`, for every group element.
    pub fn res_tilde_check(&self) -> bool {
        let n = self.l.degree();
        (0..self.order()).all(|g| {
            let s = &self.center_group[self.res_tilde.apply(g)];
            (0..n).all(|m| {
                let x = FieldElement::new(&self.l, linalg::unit_vec(n, m));
                self.act(g, &self.center_vec(&x)) == self.center_vec(&s.apply(&x))
            })
        })
    }

    fn verify(&self) -> Result<(), GaloisError> {
        let fail = |m: &str| Err(GaloisError::VerificationFailed(m.to_string()));
        if self.order() != self.degree() {
            return fail("group order differs from the degree of the centers");
        }
        for g in 0..self.order() {
            if self.base_span.iter().any(|v| &self.act(g, v) != v) {
                return fail("a group element moves H");
            }
        }
        if !self.artin_check() {
            return fail("fixed set of the group is not H");
        }
        if !self.res_tilde.is_bijective() || !self.res_tilde_check() {
            return fail("restriction to the center is not the expected isomorphism");
        }
        if !self.is_outer() {
            return fail("L/H is not outer");
        }
        Ok(())
    }

    /// `ℓ/h` with the same element order as `Gal(ℓ/h)` here.
    pub fn center_extension(&self) -> GaloisExtension {
        GaloisExtension {
            h: self.h.clone(),
            l: self.l.clone(),
            emb: self.emb.clone(),
            center_group: self.center_group.clone(),
            center_table: self.center_table.clone(),
            top: Top::Commutative,
            table: self.center_table.clone(),
            res_tilde: GroupHom::identity(&self.center_table),
            matrices: self.center_group.iter().map(|s| s.matrix()).collect(),
            base_span: linalg::transpose(&self.emb.matrix()),
        }
    }
}

/// `L = H ⊗_h ℓ` for `ℓ/h` Galois, refused unless the reduced-norm form of `H`
/// is certified anisotropic over `ℓ`.
pub fn build_galois_extension(
    h_alg: &Algebra,
    l: &Field,
    emb: &FieldMorphism,
    height_bound: u64,
) -> Result<GaloisExtension, GaloisError> {
    if !same_field(emb.source(), h_alg.base()) || !same_field(emb.target(), l) {
        return Err(FieldError::FieldMismatch.into());
    }
    let (center_group, center_table) = galois_group(l, emb)?;
    let ext = scalar_extension(h_alg, l, emb, height_bound);
    if !ext.is_division() {
        return Err(GaloisError::NotAnisotropic(ext.verdict));
    }
    let group = center_group
        .iter()
        .map(|s| AlgebraAutomorphism::from_center(&ext.algebra, s))
        .collect::<Result<Vec<_>, _>>()?;
    let labels = center_group.iter().map(|s| format!("id⊗{}", morphism_label(s))).collect();
    let name = format!("Gal({}/{})", ext.algebra.label(), h_alg.label());
    let table = FiniteGroup::from_elements(&group, |a, b| a.compose(b), labels, &name)?;
    let images = group
        .iter()
        .map(|a| center_group.iter().position(|s| s == a.center_action()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| GaloisError::VerificationFailed("restriction leaves Gal(ℓ/h)".into()))?;
    let res_tilde = GroupHom::new(&table, &center_table, images)?;
    let matrices = group.iter().map(|a| a.q_matrix()).collect();
    let base_span = q_basis(h_alg).iter().map(|x| ext.include(x).to_q_vec()).collect();
    let out = GaloisExtension {
        h: h_alg.base().clone(),
        l: l.clone(),
        emb: emb.clone(),
        center_group,
        center_table,
        top: Top::Quaternion {
            base: h_alg.clone(),
            ext,
            group,
        },
        table,
        res_tilde,
        matrices,
        base_span,
    };
    out.verify()?;
    Ok(out)
}

/// The auxiliary tower `k₀ ⊆ ℓ₀` sitting inside both centers, plus the
/// inclusion `L → F` on `Q`-coordinates (rows = coordinates of `F`).
#[derive(Clone, Debug)]
pub struct RestrictionWitness {
    pub l0: Field,
    pub k0: Field,
    pub k0_to_l0: FieldMorphism,
    pub l0_to_lm: FieldMorphism,
    pub l0_to_lh: FieldMorphism,
    pub k0_to_km: FieldMorphism,
    pub k0_to_kh: FieldMorphism,
    pub inclusion: Vec<Vec<Q>>,
}

impl RestrictionWitness {
    /// Checks the witness conditions in order; the error names the first failure.
    pub fn check(&self, f: &GaloisExtension, l: &GaloisExtension) -> Result<(), GaloisError> {
        let bad = |c: &str| Err(GaloisError::WitnessInvalid(c.to_string()));
        let typed = same_field(self.k0_to_l0.source(), &self.k0)
            && same_field(self.k0_to_l0.target(), &self.l0)
            && same_field(self.l0_to_lm.source(), &self.l0)
            && same_field(self.l0_to_lm.target(), f.l())
            && same_field(self.l0_to_lh.source(), &self.l0)
            && same_field(self.l0_to_lh.target(), l.l())
            && same_field(self.k0_to_km.source(), &self.k0)
            && same_field(self.k0_to_km.target(), f.h())
            && same_field(self.k0_to_kh.source(), &self.k0)
            && same_field(self.k0_to_kh.target(), l.h());
        if !typed {
            return bad("placement: maps do not connect the stated fields");
        }
        if self.l0_to_lm.compose(&self.k0_to_l0) != f.embedding().compose(&self.k0_to_km)
            || self.l0_to_lh.compose(&self.k0_to_l0) != l.embedding().compose(&self.k0_to_kh)
        {
            return bad("placement: k0 is not placed compatibly inside the centers");
        }
        if self.inclusion.len() != f.dim() || self.inclusion.iter().any(|r| r.len() != l.dim()) {
            return bad("placement: inclusion has the wrong shape");
        }
        if linalg::rank(&self.inclusion) != l.dim() {
            return bad("placement: inclusion is not injective");
        }
        let n0 = self.l0.degree();
        for m in 0..n0 {
            let z = FieldElement::new(&self.l0, linalg::unit_vec(n0, m));
            let lhs = linalg::mat_vec(&self.inclusion, &l.center_vec(&self.l0_to_lh.apply(&z)));
            if lhs != f.center_vec(&self.l0_to_lm.apply(&z)) {
                return bad("placement: l0 is not placed compatibly under the inclusion");
            }
        }
        let f_base = f.base_span();
        if l
            .base_span()
            .iter()
            .any(|v| !linalg::span_contains(f_base, &linalg::mat_vec(&self.inclusion, v)))
        {
            return bad("placement: inclusion does not send H into M");
        }
        let k0_in_lh = l.embedding().compose(&self.k0_to_kh);
        if !is_galois(l.l(), &k0_in_lh) {
            return bad("degrees: lH/k0 is not Galois");
        }
        if n0 / self.k0.degree() != l.degree() || n0 % self.k0.degree() != 0 {
            return bad("degrees: [l0:k0] differs from [lH:kH]");
        }
        let both = numfield::automorphisms(l.l())
            .into_iter()
            .filter(|s| s.fixes(&self.l0_to_lh) && s.fixes(l.embedding()))
            .count();
        if both != 1 {
            return bad("intersection: Gal(lH/l0) and Gal(lH/kH) intersect nontrivially");
        }
        Ok(())
    }
}

fn restrict_index(gal0: &[FieldMorphism], s: &FieldMorphism, e: &FieldMorphism) -> Option<usize> {
    let target = s.compose(e);
    gal0.iter().position(|r| e.compose(r) == target)
}

/// Commutative: commutative `f/M ⊇ ℓ/H` with `ℓ → f` given.
pub fn witness_commutative(
    f: &GaloisExtension,
    l: &GaloisExtension,
    l_to_f: &FieldMorphism,
) -> Result<RestrictionWitness, GaloisError> {
    let target = l_to_f.compose(l.embedding());
    let h_to_m = embeddings_into(l.h(), f.h())
        .into_iter()
        .find(|e| f.embedding().compose(e) == target)
        .ok_or_else(|| GaloisError::WitnessInvalid("placement: H does not sit in M".into()))?;
    Ok(RestrictionWitness {
        l0: l.l().clone(),
        k0: l.h().clone(),
        k0_to_l0: l.embedding().clone(),
        l0_to_lm: l_to_f.clone(),
        l0_to_lh: FieldMorphism::identity(l.l()),
        k0_to_km: h_to_m,
        k0_to_kh: FieldMorphism::identity(l.h()),
        inclusion: l_to_f.matrix(),
    })
}

/// Center: `F = M ⊗ ℓ` over `M`, and `ℓ/k` with `k` the center of `M`.
pub fn witness_center(f: &GaloisExtension, l: &GaloisExtension) -> Result<RestrictionWitness, GaloisError> {
    if !same_field(f.l(), l.l()) || !same_field(f.h(), l.h()) || f.embedding() != l.embedding() {
        return Err(GaloisError::WitnessInvalid("placement: centers differ".into()));
    }
    let n = l.l().degree();
    let cols: Vec<Vec<Q>> = (0..n)
        .map(|m| f.center_vec(&FieldElement::new(l.l(), linalg::unit_vec(n, m))))
        .collect();
    Ok(RestrictionWitness {
        l0: l.l().clone(),
        k0: l.h().clone(),
        k0_to_l0: l.embedding().clone(),
        l0_to_lm: FieldMorphism::identity(l.l()),
        l0_to_lh: FieldMorphism::identity(l.l()),
        k0_to_km: FieldMorphism::identity(l.h()),
        k0_to_kh: FieldMorphism::identity(l.h()),
        inclusion: linalg::transpose(&cols),
    })
}

/// Same base: `H ⊗ ℓ ⊆ H ⊗ f` over the same `H`, through `ℓ → f`.
pub fn witness_same_base(
    f: &GaloisExtension,
    l: &GaloisExtension,
    l_to_f: &FieldMorphism,
) -> Result<RestrictionWitness, GaloisError> {
    let (Some(fh), Some(lh), Some(fa)) = (f.h_algebra(), l.h_algebra(), f.l_algebra()) else {
        return Err(GaloisError::WitnessInvalid("placement: both extensions must be quaternionic".into()));
    };
    if !same_algebra(fh, lh) {
        return Err(GaloisError::WitnessInvalid("placement: base algebras differ".into()));
    }
    let la = l.l_algebra().unwrap();
    let cols: Vec<Vec<Q>> = q_basis(la).iter().map(|x| x.map_coeffs(fa, l_to_f).to_q_vec()).collect();
    Ok(RestrictionWitness {
        l0: l.l().clone(),
        k0: l.h().clone(),
        k0_to_l0: l.embedding().clone(),
        l0_to_lm: l_to_f.clone(),
        l0_to_lh: FieldMorphism::identity(l.l()),
        k0_to_km: FieldMorphism::identity(l.h()),
        k0_to_kh: FieldMorphism::identity(l.h()),
        inclusion: linalg::transpose(&cols),
    })
}

/// The restriction `Gal(F/M) → Gal(L/H)` computed through the centers and the
/// witness tower, then checked pointwise on a basis of `L`.
pub fn restriction_map(
    f: &GaloisExtension,
    l: &GaloisExtension,
    w: &RestrictionWitness,
) -> Result<GroupHom, GaloisError> {
    w.check(f, l)?;
    let gal0 = automorphism_group(&w.l0, &w.k0_to_l0);
    let down_h: Vec<usize> = l
        .center_group()
        .iter()
        .map(|s| restrict_index(&gal0, s, &w.l0_to_lh))
        .collect::<Option<_>>()
        .ok_or_else(|| GaloisError::WitnessInvalid("Gal(lH/kH) does not preserve l0".into()))?;
    let mut seen = down_h.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != gal0.len() || down_h.len() != gal0.len() {
        return Err(GaloisError::WitnessInvalid("Gal(lH/kH) → Gal(l0/k0) is not bijective".into()));
    }
    let lift = l.res_tilde().inverse().expect("res_tilde is bijective");
    let mut images = Vec::with_capacity(f.order());
    for g in 0..f.order() {
        let s = &f.center_group()[f.res_tilde().apply(g)];
        let r = restrict_index(&gal0, s, &w.l0_to_lm)
            .ok_or_else(|| GaloisError::WitnessInvalid("Gal(lM/kM) does not preserve l0".into()))?;
        let c = down_h.iter().position(|&x| x == r).unwrap();
        images.push(lift.apply(c));
    }
    let hom = GroupHom::new(f.table(), l.table(), images)?;
    for g in 0..f.order() {
        for i in 0..l.dim() {
            let x = linalg::unit_vec(l.dim(), i);
            let lhs = linalg::mat_vec(&w.inclusion, &l.act(hom.apply(g), &x));
            let rhs = f.act(g, &linalg::mat_vec(&w.inclusion, &x));
            if lhs != rhs {
                return Err(GaloisError::VerificationFailed(format!(
                    "restriction of {} disagrees on basis element {i}",
                    f.table().label(g)
                )));
            }
        }
    }
    Ok(hom)
}

/// `ℓ₀ = ℓ^⟨τ̃⟩` over `k₀ = h^⟨σ̃⟩`, with the embeddings into `ℓ` and `h`.
#[derive(Clone, Debug)]
pub struct FixedTower {
    pub l0: Field,
    pub l0_to_l: FieldMorphism,
    pub k0: Field,
    pub k0_to_h: FieldMorphism,
    pub k0_to_l0: FieldMorphism,
}

pub fn fixed_tower(emb: &FieldMorphism, s: &FieldMorphism, t: &FieldMorphism) -> Result<FixedTower, GaloisError> {
    let (h, l) = (emb.source(), emb.target());
    let (l0, l0_to_l) = fixed_field(l, std::slice::from_ref(t));
    let (k0, k0_to_h) = fixed_field(h, std::slice::from_ref(s));
    let target = emb.compose(&k0_to_h);
    let k0_to_l0 = embeddings_into(&k0, &l0)
        .into_iter()
        .find(|d| l0_to_l.compose(d) == target)
        .ok_or_else(|| GaloisError::NotAnExtension("fixed field of σ̃ is not inside that of τ̃".into()))?;
    Ok(FixedTower {
        l0,
        l0_to_l,
        k0,
        k0_to_h,
        k0_to_l0,
    })
}

/// `L/H` with `σ ∈ Aut(H)` and `τ ∈ Aut(L)` extending it.
#[derive(Clone, Debug)]
pub struct TwistedExtension {
    base: Arc<GaloisExtension>,
    sigma: AlgebraAutomorphism,
    tau: AlgebraAutomorphism,
    ord_sigma: usize,
    ord_tau: usize,
}

impl TwistedExtension {
    pub fn new(
        base: Arc<GaloisExtension>,
        sigma: AlgebraAutomorphism,
        tau: AlgebraAutomorphism,
    ) -> Result<Self, GaloisError> {
        let (Some(ha), Some(la)) = (base.h_algebra(), base.l_algebra()) else {
            return Err(GaloisError::Precondition("twisted extensions need a quaternion extension".into()));
        };
        if !same_algebra(sigma.algebra(), ha) || !same_algebra(tau.algebra(), la) {
            return Err(GaloisError::NotAnExtension("σ or τ acts on the wrong algebra".into()));
        }
        for e in q_basis(ha) {
            if tau.apply(&base.include(&e)) != base.include(&sigma.apply(&e)) {
                return Err(GaloisError::NotAnExtension(format!("τ and σ differ on {e}")));
            }
        }
        let too_big = || GaloisError::VerificationFailed("automorphism order exceeds 64".into());
        let ord_sigma = sigma.order().ok_or_else(too_big)?;
        let ord_tau = tau.order().ok_or_else(too_big)?;
        Ok(TwistedExtension {
            base,
            sigma,
            tau,
            ord_sigma,
            ord_tau,
        })
    }

    /// `σ = id`, `τ = id`.
    pub fn untwisted(base: Arc<GaloisExtension>) -> Result<Self, GaloisError> {
        let ha = base
            .h_algebra()
            .ok_or_else(|| GaloisError::Precondition("twisted extensions need a quaternion extension".into()))?
            .clone();
        let la = base.l_algebra().unwrap().clone();
        Self::new(base, AlgebraAutomorphism::identity(&ha), AlgebraAutomorphism::identity(&la))
    }

    pub fn base(&self) -> &Arc<GaloisExtension> {
        &self.base
    }

    pub fn sigma(&self) -> &AlgebraAutomorphism {
        &self.sigma
    }

    pub fn tau(&self) -> &AlgebraAutomorphism {
        &self.tau
    }

    pub fn ord_sigma(&self) -> usize {
        self.ord_sigma
    }

    pub fn ord_tau(&self) -> usize {
        self.ord_tau
    }

    /// `σ̃`, the restriction of `σ` to `h`.
    pub fn sigma_tilde(&self) -> &FieldMorphism {
        self.sigma.center_action()
    }

    /// `τ̃`, the restriction of `τ` to `ℓ`.
    pub fn tau_tilde(&self) -> &FieldMorphism {
        self.tau.center_action()
    }

    pub fn fixed_tower(&self) -> Result<FixedTower, GaloisError> {
        fixed_tower(self.base.embedding(), self.sigma_tilde(), self.tau_tilde())
    }

    /// Whether `τ^k` fixes `H` pointwise.
    fn power_fixes_h(&self, k: usize) -> bool {
        let p = self.tau.pow(k);
        let ha = self.base.h_algebra().unwrap();
        q_basis(ha).iter().all(|e| {
            let x = self.base.include(e);
            p.apply(&x) == x
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductReport {
    pub ord_sigma: usize,
    pub ord_tau: usize,
    pub ord_sigma_tilde: usize,
    pub ord_tau_tilde: usize,
    pub inner_order_sigma: usize,
    pub inner_order_tau: usize,
    /// `⟨τ, Gal(L/H)⟩ = Gal(L/H) ⋊ ⟨τ⟩`.
    pub semidirect: bool,
    /// `Gal(L/H) ∩ ⟨τ⟩ = {id}`.
    pub trivial_intersection: bool,
    /// `ord τ = ord σ`.
    pub equal_orders: bool,
    /// `ord τ̃ = ord σ̃`.
    pub star: bool,
    /// `⟨τ̃, Gal(ℓ/h)⟩ = Gal(ℓ/h) × ⟨τ̃⟩`.
    pub direct_product: bool,
    /// `ord τ̃ = ord σ̃` and `ℓ^⟨τ̃⟩ / h^⟨σ̃⟩` Galois.
    pub fixed_fields_galois: bool,
    pub eq_produit: bool,
    /// On the centers, when `ord τ̃ = ord σ̃`: `[ℓ^⟨τ̃⟩ : h^⟨σ̃⟩] = [ℓ:h]` and `ℓ^⟨τ̃⟩·h = ℓ`.
    pub degree_identity: Option<bool>,
}

impl ProductReport {
    pub fn lifted_conditions_agree(&self) -> bool {
        self.semidirect == self.trivial_intersection && self.trivial_intersection == self.equal_orders
    }

    pub fn center_conditions_agree(&self) -> bool {
        self.direct_product == self.fixed_fields_galois
    }

    pub fn consistent(&self) -> bool {
        self.lifted_conditions_agree() && self.center_conditions_agree() && self.degree_identity != Some(false)
    }
}

pub fn check_product_conditions(x: &TwistedExtension) -> Result<ProductReport, GaloisError> {
    let base = &x.base;
    let gal: Vec<AlgebraAutomorphism> = (0..base.order()).map(|g| base.automorphism(g).unwrap().clone()).collect();
    let mut gens = gal.clone();
    gens.push(x.tau.clone());
    let la = base.l_algebra().unwrap();
    let want = gal.len() * x.ord_tau;
    let semidirect = match closure_of(&gens, AlgebraAutomorphism::identity(la), |a, b| a.compose(b), want) {
        Some(all) => all.len() == want,
        None => false,
    };
    let trivial_intersection = (1..x.ord_tau).all(|k| !x.power_fixes_h(k));
    let equal_orders = x.ord_tau == x.ord_sigma;

    let (st, tt) = (x.sigma_tilde(), x.tau_tilde());
    let (os, ot) = (st.order(), tt.order());
    let star = os == ot;
    let cg = base.center_group();
    let want2 = cg.len() * ot;
    let mut gens2 = cg.to_vec();
    gens2.push(tt.clone());
    let commute = cg.iter().all(|s| s.compose(tt) == tt.compose(s));
    let direct_product = commute
        && closure_of(&gens2, FieldMorphism::identity(base.l()), |a, b| a.compose(b), want2)
            .is_some_and(|all| all.len() == want2);
    let tower = x.fixed_tower()?;
    let fixed_fields_galois = star && is_galois(&tower.l0, &tower.k0_to_l0);

    let degree_identity = star.then(|| {
        let (l0, k0) = (tower.l0.degree(), tower.k0.degree());
        let l0_basis: Vec<FieldElement> = (0..l0)
            .map(|m| tower.l0_to_l.apply(&FieldElement::new(&tower.l0, linalg::unit_vec(l0, m))))
            .collect();
        let h_basis: Vec<FieldElement> = (0..base.h().degree())
            .map(|m| base.embedding().apply(&FieldElement::new(base.h(), linalg::unit_vec(base.h().degree(), m))))
            .collect();
        let products: Vec<Vec<Q>> = l0_basis
            .iter()
            .flat_map(|a| h_basis.iter().map(move |b| (a * b).coords().to_vec()))
            .collect();
        l0 == k0 * base.degree() && linalg::rank(&products) == base.l().degree()
    });

    Ok(ProductReport {
        ord_sigma: x.ord_sigma,
        ord_tau: x.ord_tau,
        ord_sigma_tilde: os,
        ord_tau_tilde: ot,
        inner_order_sigma: inner_order(&x.sigma),
        inner_order_tau: inner_order(&x.tau),
        semidirect,
        trivial_intersection,
        equal_orders,
        star,
        direct_product,
        fixed_fields_galois,
        eq_produit: direct_product,
        degree_identity,
    })
}

/// Splittings `Gal(ℓ/k) = ⟨τ̃⟩ × G` with `ord τ̃ = n` and `G` nontrivial.
pub fn cyclic_splittings(
    l: &Field,
    emb: &FieldMorphism,
    n: usize,
) -> Result<Vec<(FieldMorphism, Vec<FieldMorphism>)>, GaloisError> {
    let (gal, table) = galois_group(l, emb)?;
    let mut out = Vec::new();
    if n < 2 || table.order() % n != 0 || table.order() == n {
        return Ok(out);
    }
    let m = table.order() / n;
    for c in 0..table.order() {
        if table.element_order(c) != n {
            continue;
        }
        let cyc = table.closure(&[c]);
        for s in table.subgroups() {
            let commutes = crate::group::members(s).all(|g| table.mul(g, c) == table.mul(c, g));
            if s.count_ones() as usize == m && s & cyc == 1 && commutes {
                let g: Vec<FieldMorphism> = crate::group::members(s).map(|i| gal[i].clone()).collect();
                out.push((gal[c].clone(), g));
            }
        }
    }
    Ok(out)
}

/// From `K` over `k` and `ℓ/k` with `Gal(ℓ/k) = ⟨τ̃⟩ × G`: `H = K ⊗ ℓ^G`,
/// `L = K ⊗ ℓ`, `σ = id ⊗ τ̃|ℓ^G`, `τ = id ⊗ τ̃`.
pub fn build_cyclic_factor_twist(
    k_alg: &Algebra,
    l: &Field,
    emb: &FieldMorphism,
    tau_tilde: &FieldMorphism,
    g: &[FieldMorphism],
    height_bound: u64,
) -> Result<TwistedExtension, GaloisError> {
    let (gal, table) = galois_group(l, emb)?;
    let pos = |m: &FieldMorphism| gal.iter().position(|x| x == m);
    let c = pos(tau_tilde).ok_or_else(|| GaloisError::Precondition("τ̃ is not in Gal(ℓ/k)".into()))?;
    let gi: Vec<usize> = g
        .iter()
        .map(pos)
        .collect::<Option<_>>()
        .ok_or_else(|| GaloisError::Precondition("G is not inside Gal(ℓ/k)".into()))?;
    let s = gi.iter().fold(0u64, |m, &i| m | (1 << i));
    let n = table.element_order(c);
    if n < 2 {
        return Err(GaloisError::Precondition("τ̃ must have order at least 2".into()));
    }
    if !table.is_subgroup(s) || s.count_ones() < 2 {
        return Err(GaloisError::Precondition("G must be a nontrivial subgroup".into()));
    }
    let direct = s & table.closure(&[c]) == 1
        && s.count_ones() as usize * n == table.order()
        && gi.iter().all(|&x| table.mul(x, c) == table.mul(c, x));
    if !direct {
        return Err(GaloisError::Precondition("Gal(ℓ/k) is not ⟨τ̃⟩ × G".into()));
    }
    let (lg, lg_to_l) = fixed_field(l, g);
    let target = emb.clone();
    let k_to_lg = embeddings_into(emb.source(), &lg)
        .into_iter()
        .find(|d| lg_to_l.compose(d) == target)
        .ok_or_else(|| GaloisError::VerificationFailed("k does not sit in the fixed field of G".into()))?;
    let h_ext = scalar_extension(k_alg, &lg, &k_to_lg, height_bound);
    if !h_ext.is_division() {
        return Err(GaloisError::NotAnisotropic(h_ext.verdict));
    }
    let h_alg = h_ext.algebra.clone();
    let s_tilde = numfield::automorphisms(&lg)
        .into_iter()
        .find(|r| lg_to_l.compose(r) == tau_tilde.compose(&lg_to_l))
        .ok_or_else(|| GaloisError::VerificationFailed("τ̃ does not preserve the fixed field of G".into()))?;
    let base = Arc::new(build_galois_extension(&h_alg, l, &lg_to_l, height_bound)?);
    let sigma = AlgebraAutomorphism::from_center(&h_alg, &s_tilde)?;
    let tau = AlgebraAutomorphism::from_center(base.l_algebra().unwrap(), tau_tilde)?;
    TwistedExtension::new(base, sigma, tau)
}

#[derive(Clone, Debug)]
pub struct ConverseReport {
    pub ord_sigma: usize,
    pub inner_order_sigma: usize,
    pub ord_tau: usize,
    pub inner_order_tau: usize,
    /// Bounded-degree check that `L(t,τ)` decomposes over `H(t,σ)`, hence is Galois.
    pub tensor: Option<TensorReport>,
    pub eq_produit: bool,
}

impl ConverseReport {
    pub fn galois_verified(&self) -> bool {
        self.tensor.as_ref().is_some_and(|t| t.passed())
    }

    /// The conclusion holds whenever the hypotheses were verified.
    pub fn consistent(&self) -> bool {
        !self.galois_verified() || self.eq_produit
    }
}

/// Requires inner order = order for `σ` and for `τ`, then compares the
/// decomposition check against the product condition.
pub fn converse_check(x: &TwistedExtension, degree_bound: usize) -> Result<ConverseReport, GaloisError> {
    let (ios, iot) = (inner_order(&x.sigma), inner_order(&x.tau));
    if ios != x.ord_sigma {
        return Err(GaloisError::HypothesisFailed(format!(
            "inner order of σ is {ios} but its order is {}",
            x.ord_sigma
        )));
    }
    if iot != x.ord_tau {
        return Err(GaloisError::HypothesisFailed(format!(
            "inner order of τ is {iot} but its order is {}",
            x.ord_tau
        )));
    }
    let h_ring = SkewRing::new(x.sigma.clone())?;
    let l_ring = SkewRing::new(x.tau.clone())?;
    let tensor = match ore::tensor_decomposition_check(&h_ring, &l_ring, x.base.embedding(), degree_bound) {
        Ok(r) => Some(r),
        Err(OreError::HypothesisFailed(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let eq_produit = check_product_conditions(x)?.eq_produit;
    Ok(ConverseReport {
        ord_sigma: x.ord_sigma,
        inner_order_sigma: ios,
        ord_tau: x.ord_tau,
        inner_order_tau: iot,
        tensor,
        eq_produit,
    })
}

/// `Gal(L(t,τ)/H(t,σ))` as coefficientwise lifts of `Gal(L/H)`, verified up to
/// a degree bound, with restrictions to `L/H` and to `ℓ^⟨τ̃⟩ / h^⟨σ̃⟩`.
#[derive(Clone, Debug)]
pub struct TwistedGroup {
    pub degree_bound: usize,
    pub lifts: Vec<AlgebraAutomorphism>,
    pub table: Group,
    /// Lifts → `Gal(L/H)`.
    pub restriction: GroupHom,
    pub tower: FixedTower,
    pub gal0: Vec<FieldMorphism>,
    pub gal0_table: Group,
    /// Lifts → `Gal(ℓ₀/k₀)`.
    pub to_fixed: GroupHom,
    /// `Gal(ℓ/h)` → `Gal(ℓ₀/k₀)`.
    pub center_to_fixed: GroupHom,
}

/// Applies `ρ` to each coefficient.
pub fn lift_apply(rho: &AlgebraAutomorphism, p: &SkewPoly) -> SkewPoly {
    SkewPoly::new(p.ring(), p.coeffs().iter().map(|c| rho.apply(c)).collect())
}

pub fn build_twisted_extension(x: &TwistedExtension, degree_bound: usize) -> Result<TwistedGroup, GaloisError> {
    let report = check_product_conditions(x)?;
    if !report.eq_produit {
        return Err(GaloisError::ProductConditionFailed(format!(
            "⟨τ̃, Gal(ℓ/h)⟩ has the wrong shape (ord τ̃ = {}, ord σ̃ = {})",
            report.ord_tau_tilde, report.ord_sigma_tilde
        )));
    }
    let base = &x.base;
    let ha = base.h_algebra().unwrap();
    let la = base.l_algebra().unwrap();
    let l_ring = SkewRing::new(x.tau.clone())?;
    let basis_l = q_basis(la);
    let fail = |m: String| Err(GaloisError::VerificationFailed(m));
    let mut lifts = Vec::new();
    for g in 0..base.order() {
        let rho = base.automorphism(g).unwrap();
        if rho.compose(&x.tau) != x.tau.compose(rho) {
            return fail(format!("{} does not commute with τ", base.table().label(g)));
        }
        for e in q_basis(ha) {
            for j in 0..=degree_bound {
                let p = SkewPoly::monomial(&l_ring, base.include(&e), j);
                if lift_apply(rho, &p) != p {
                    return fail(format!("lift of {} moves H[t,σ]", base.table().label(g)));
                }
            }
        }
        for a in &basis_l {
            if lift_apply(rho, &SkewPoly::constant(&l_ring, a.clone())) != SkewPoly::constant(&l_ring, rho.apply(a)) {
                return fail("lift does not restrict to ρ".into());
            }
            for i in 0..=degree_bound {
                let pa = SkewPoly::monomial(&l_ring, a.clone(), i);
                for b in &basis_l {
                    for j in [0, degree_bound] {
                        let pb = SkewPoly::monomial(&l_ring, b.clone(), j);
                        let lhs = lift_apply(rho, &(&pa * &pb));
                        let rhs = &lift_apply(rho, &pa) * &lift_apply(rho, &pb);
                        if lhs != rhs {
                            return fail(format!("lift of {} is not multiplicative", base.table().label(g)));
                        }
                    }
                }
            }
        }
        lifts.push(rho.clone());
    }
    let labels = (0..base.order()).map(|g| format!("^{}", base.table().label(g))).collect();
    let table = FiniteGroup::from_elements(&lifts, |a, b| a.compose(b), labels, "Gal(L(t,τ)/H(t,σ))")?;
    let images = lifts
        .iter()
        .map(|r| (0..base.order()).find(|&g| base.automorphism(g).unwrap() == r))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| GaloisError::VerificationFailed("lift restricts outside Gal(L/H)".into()))?;
    let restriction = GroupHom::new(&table, base.table(), images)?;
    if !restriction.is_bijective() {
        return fail("restriction to L/H is not bijective".into());
    }
    let tower = x.fixed_tower()?;
    let (gal0, gal0_table) = galois_group(&tower.l0, &tower.k0_to_l0)?;
    let to_fixed_images = lifts
        .iter()
        .map(|r| restrict_index(&gal0, r.center_action(), &tower.l0_to_l))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| GaloisError::VerificationFailed("lift does not preserve ℓ^⟨τ̃⟩".into()))?;
    let to_fixed = GroupHom::new(&table, &gal0_table, to_fixed_images)?;
    let center_images = base
        .center_group()
        .iter()
        .map(|s| restrict_index(&gal0, s, &tower.l0_to_l))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| GaloisError::VerificationFailed("Gal(ℓ/h) does not preserve ℓ^⟨τ̃⟩".into()))?;
    let center_to_fixed = GroupHom::new(base.center_table(), &gal0_table, center_images)?;
    if !to_fixed.is_bijective() || !center_to_fixed.is_bijective() {
        return fail("restriction to ℓ^⟨τ̃⟩ / h^⟨σ̃⟩ is not bijective".into());
    }
    Ok(TwistedGroup {
        degree_bound,
        lifts,
        table,
        restriction,
        tower,
        gal0,
        gal0_table,
        to_fixed,
        center_to_fixed,
    })
}

/// The decomposition check of `L(t,τ)` over `H(t,σ)` for a twisted extension.
pub fn tensor_check(x: &TwistedExtension, degree_bound: usize) -> Result<TensorReport, GaloisError> {
    let h_ring = SkewRing::new(x.sigma.clone())?;
    let l_ring = SkewRing::new(x.tau.clone())?;
    Ok(ore::tensor_decomposition_check(&h_ring, &l_ring, x.base.embedding(), degree_bound)?)
}

/// `H = (−1,−1/Q)`, `L = H ⊗ Q(√2)`, `σ = I_H(i)`, `τ = I_L(i) ∘ (id ⊗ conj)`.
pub fn inner_twist_counterexample() -> Result<TwistedExtension, GaloisError> {
    let q = numfield::NumberField::rationals();
    let h = qalg::QuaternionAlgebra::from_ints(&q, -1, -1)?;
    let l = numfield::NumberField::quadratic(2)?;
    let base = Arc::new(build_galois_extension(&h, &l, &FieldMorphism::from_rationals(&l), qalg::DEFAULT_HEIGHT_BOUND)?);
    let la = base.l_algebra().unwrap().clone();
    let sigma = qalg::inner_automorphism(&QuatElement::i(&h))?;
    let conj = numfield::automorphisms(&l).into_iter().find(|s| !s.is_identity()).unwrap();
    let tau = qalg::inner_automorphism(&QuatElement::i(&la))?.compose(&AlgebraAutomorphism::from_center(&la, &conj)?);
    TwistedExtension::new(base, sigma, tau)
}

/// Named instances used by the regression suites: the untwisted case, the
/// inner-twist counterexample, cyclic factor twist on `Q(√2,√3)`, and two twists
/// moving only the center of `L`.
pub fn twisted_corpus(height_bound: u64) -> Result<Vec<(&'static str, TwistedExtension)>, GaloisError> {
    let h = QuaternionAlgebra::hamilton();
    let q2 = NumberField::quadratic(2)?;
    let over_q = |f: &Field| FieldMorphism::from_rationals(f);
    let l2 = Arc::new(build_galois_extension(&h, &q2, &over_q(&q2), height_bound)?);
    let mut out = vec![
        ("untwisted Q(sqrt2)", TwistedExtension::untwisted(l2.clone())?),
        ("inner twist counterexample", inner_twist_counterexample()?),
    ];
    let three = FieldElement::from_int(&q2, 3);
    let (l, q2_to_l, _) = numfield::adjoin_sqrt(&q2, &three, "Q(sqrt2,sqrt3)")?;
    let sqrt2 = q2_to_l.apply(&FieldElement::gen(&q2));
    let tau_t = automorphism_group(&l, &over_q(&l))
        .into_iter()
        .find(|s| !s.is_identity() && s.apply(&sqrt2) == sqrt2)
        .expect("√3 ↦ −√3");
    let (_, g) = cyclic_splittings(&l, &over_q(&l), 2)?
        .into_iter()
        .find(|(t, _)| *t == tau_t)
        .expect("direct complement");
    out.push(("cyclic factor twist Q(sqrt2,sqrt3)", build_cyclic_factor_twist(&h, &l, &over_q(&l), &tau_t, &g, height_bound)?));
    let conj = l2.automorphism(1).expect("quaternion extension").clone();
    out.push((
        "center twist Q(sqrt2)",
        TwistedExtension::new(l2.clone(), AlgebraAutomorphism::identity(&h), conj)?,
    ));
    let c4 = NumberField::from_ints(&[2, 0, -4, 0, 1], "Q(sqrt(2+sqrt2))")?;
    let l4 = Arc::new(build_galois_extension(&h, &c4, &over_q(&c4), height_bound)?);
    let gen = (0..4).find(|&g| l4.table().element_order(g) == 4).expect("cyclic");
    let rho = l4.automorphism(gen).expect("quaternion extension").clone();
    out.push(("center twist Q(sqrt(2+sqrt2))", TwistedExtension::new(l4, AlgebraAutomorphism::identity(&h), rho)?));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{adjoin_sqrt, NumberField};
    use crate::qalg::QuaternionAlgebra;

    fn hamilton() -> Algebra {
        QuaternionAlgebra::hamilton()
    }

    fn over_q(l: &Field) -> FieldMorphism {
        FieldMorphism::from_rationals(l)
    }

    fn c4() -> Field {
        NumberField::from_ints(&[2, 0, -4, 0, 1], "Q(sqrt(2+sqrt2))").unwrap()
    }

    #[test]
    fn instance_matrix() {
        let h = hamilton();
        for d in [-1, -2] {
            let l = NumberField::quadratic(d).unwrap();
            match build_galois_extension(&h, &l, &over_q(&l), 20) {
                Err(GaloisError::NotAnisotropic(v)) => assert!(v.is_isotropic()),
                other => panic!("expected isotropic refusal, got {other:?}"),
            }
        }
        for (l, n) in [
            (NumberField::quadratic(2).unwrap(), 2),
            (NumberField::quadratic(3).unwrap(), 2),
            (c4(), 4),
        ] {
            let e = build_galois_extension(&h, &l, &over_q(&l), 20).unwrap();
            assert_eq!(e.order(), n);
            assert!(e.artin_check() && e.is_outer());
        }
    }

    #[test]
    fn cyclic_quartic_group() {
        let l = c4();
        let e = build_galois_extension(&hamilton(), &l, &over_q(&l), 20).unwrap();
        assert!(e.table().is_cyclic());
        // intermediate H ⊗ Q(√2) is fixed by the square of a generator
        let gen = (0..4).find(|&g| e.table().element_order(g) == 4).unwrap();
        let sq = e.table().mul(gen, gen);
        let mid = e.fixed_set(&[0, sq]);
        assert_eq!(mid.len(), 8);
        assert!(e.is_outer_over(&mid));
    }

    #[test]
    fn commutative_path() {
        let l = NumberField::quadratic(5).unwrap();
        let e = GaloisExtension::commutative(&l, &over_q(&l)).unwrap();
        assert_eq!(e.order(), 2);
        assert!(e.is_outer());
        let cbrt = NumberField::from_ints(&[-2, 0, 0, 1], "Q(cbrt2)").unwrap();
        assert!(matches!(GaloisExtension::commutative(&cbrt, &over_q(&cbrt)), Err(GaloisError::NotGalois(_))));
    }

    #[test]
    fn restriction_applications() {
        let h = hamilton();
        let q2 = NumberField::quadratic(2).unwrap();
        let f = c4();
        let l_to_f = embeddings_into(&q2, &f).into_iter().next().unwrap();
        // same base
        let big = build_galois_extension(&h, &f, &over_q(&f), 20).unwrap();
        let small = build_galois_extension(&h, &q2, &over_q(&q2), 20).unwrap();
        let w = witness_same_base(&big, &small, &l_to_f).unwrap();
        let r = restriction_map(&big, &small, &w).unwrap();
        assert!(r.is_surjective());
        assert_eq!(r.kernel().count_ones(), 2);
        // center
        let center = small.center_extension();
        let w2 = witness_center(&small, &center).unwrap();
        assert_eq!(&restriction_map(&small, &center, &w2).unwrap(), small.res_tilde());
        // commutative
        let cf = GaloisExtension::commutative(&f, &over_q(&f)).unwrap();
        let w1 = witness_commutative(&cf, &center, &l_to_f).unwrap();
        assert!(restriction_map(&cf, &center, &w1).unwrap().is_surjective());
    }

    #[test]
    fn bad_witness_is_rejected() {
        let h = hamilton();
        let q2 = NumberField::quadratic(2).unwrap();
        let e = build_galois_extension(&h, &q2, &over_q(&q2), 20).unwrap();
        let mut w = witness_same_base(&e, &e, &FieldMorphism::identity(&q2)).unwrap();
        // collapse l0 to Q: now [l0:k0] = 1 ≠ 2
        w.l0 = NumberField::rationals();
        w.k0_to_l0 = FieldMorphism::identity(&w.l0);
        w.l0_to_lm = over_q(&q2);
        w.l0_to_lh = over_q(&q2);
        assert!(matches!(restriction_map(&e, &e, &w), Err(GaloisError::WitnessInvalid(m)) if m.starts_with("degrees")));
    }

    #[test]
    fn counterexample_conditions() {
        let x = inner_twist_counterexample().unwrap();
        let r = check_product_conditions(&x).unwrap();
        assert_eq!((r.ord_sigma, r.ord_tau), (2, 2));
        assert!(x.sigma_tilde().is_identity() && !x.tau_tilde().is_identity());
        assert_eq!(r.inner_order_sigma, 1);
        assert!(!r.star && !r.eq_produit);
        assert!(r.semidirect && r.trivial_intersection && r.equal_orders);
        assert!(r.consistent());
        assert!(matches!(converse_check(&x, 2), Err(GaloisError::HypothesisFailed(_))));
        assert!(matches!(build_twisted_extension(&x, 2), Err(GaloisError::ProductConditionFailed(_))));
        assert!(matches!(tensor_check(&x, 2), Err(GaloisError::Ore(OreError::HypothesisFailed(_)))));
    }

    fn biquadratic() -> (Field, FieldMorphism) {
        let q2 = NumberField::quadratic(2).unwrap();
        let three = FieldElement::from_int(&q2, 3);
        let (l, e, _) = adjoin_sqrt(&q2, &three, "Q(sqrt2,sqrt3)").unwrap();
        (l, e)
    }

    #[test]
    fn cyclic_factor_twist() {
        let (l, q2_to_l) = biquadratic();
        let sqrt2 = q2_to_l.apply(&FieldElement::gen(q2_to_l.source()));
        // τ̃ fixes √2 and moves √3; G fixes √3
        let gal = automorphism_group(&l, &over_q(&l));
        let tau_t = gal.iter().find(|s| !s.is_identity() && s.apply(&sqrt2) == sqrt2).unwrap().clone();
        let splits = cyclic_splittings(&l, &over_q(&l), 2).unwrap();
        let (_, g) = splits.iter().find(|(t, _)| *t == tau_t).unwrap().clone();
        let x = build_cyclic_factor_twist(&hamilton(), &l, &over_q(&l), &tau_t, &g, 20).unwrap();
        assert_eq!(x.base().h().degree(), 2);
        let r = check_product_conditions(&x).unwrap();
        assert!(r.eq_produit && r.consistent());
        assert_eq!(r.degree_identity, Some(true));
        let tg = build_twisted_extension(&x, 2).unwrap();
        assert_eq!(tg.table.order(), 2);
        assert!(tensor_check(&x, 2).unwrap().passed());
        // trivial G rejected
        let trivial = vec![FieldMorphism::identity(&l)];
        assert!(matches!(
            build_cyclic_factor_twist(&hamilton(), &l, &over_q(&l), &tau_t, &trivial, 20),
            Err(GaloisError::Precondition(_))
        ));
    }

    #[test]
    fn untwisted_is_product() {
        let q2 = NumberField::quadratic(2).unwrap();
        let e = Arc::new(build_galois_extension(&hamilton(), &q2, &over_q(&q2), 20).unwrap());
        let x = TwistedExtension::untwisted(e).unwrap();
        let r = check_product_conditions(&x).unwrap();
        assert!(r.semidirect && r.trivial_intersection && r.equal_orders && r.eq_produit && r.consistent());
        let tg = build_twisted_extension(&x, 3).unwrap();
        assert!(tg.restriction.is_bijective());
        let c = converse_check(&x, 2).unwrap();
        assert!(c.galois_verified() && c.consistent());
    }
}
