//! Finite groups given by multiplication tables, and homomorphisms between them.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub const MAX_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group order {0} exceeds {MAX_ORDER}")]
    TooLarge(usize),
    #[error("table is not a group: {0}")]
    NotAGroup(String),
    #[error("map is not a homomorphism at ({0}, {1})")]
    NotAHomomorphism(usize, usize),
    #[error("image table has wrong length")]
    BadImage,
    #[error("presentation not in the catalog: {0}")]
    Unsupported(String),
}

/// A finite group on `0..n`, identity at index 0.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    labels: Vec<String>,
    name: String,
}

pub type Group = Arc<FiniteGroup>;

/// Elements of a group of order at most 64 as a bit mask.
pub type Subset = u64;

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.name, self.order())
    }
}

impl FiniteGroup {
    /// Checks identity at 0, Latin-square rows, inverses and associativity.
    pub fn new(table: Vec<Vec<usize>>, labels: Vec<String>, name: &str) -> Result<Group, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::NotAGroup("empty".into()));
        }
        if n > MAX_ORDER {
            return Err(GroupError::TooLarge(n));
        }
        if labels.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(GroupError::NotAGroup("malformed table".into()));
        }
        for a in 0..n {
            if table[0][a] != a || table[a][0] != a {
                return Err(GroupError::NotAGroup("index 0 is not the identity".into()));
            }
        }
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == 0) {
                Some(b) if table[b][a] == 0 => inverse[a] = b,
                _ => return Err(GroupError::NotAGroup(format!("{} has no inverse", labels[a]))),
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(GroupError::NotAGroup("not associative".into()));
                    }
                }
            }
        }
        Ok(Arc::new(FiniteGroup {
            table,
            inverse,
            labels,
            name: name.to_string(),
        }))
    }

    /// Builds the table of a closed list of elements under `mul`; the first
    /// element must be the identity.
    pub fn from_elements<T: PartialEq>(
        elems: &[T],
        mul: impl Fn(&T, &T) -> T,
        labels: Vec<String>,
        name: &str,
    ) -> Result<Group, GroupError> {
        let n = elems.len();
        if n > MAX_ORDER {
            return Err(GroupError::TooLarge(n));
        }
        let mut table = vec![vec![0; n]; n];
        for (a, x) in elems.iter().enumerate() {
            for (b, y) in elems.iter().enumerate() {
                let p = mul(x, y);
                table[a][b] = elems
                    .iter()
                    .position(|z| *z == p)
                    .ok_or_else(|| GroupError::NotAGroup("element list not closed".into()))?;
            }
        }
        Self::new(table, labels, name)
    }

    pub fn cyclic(n: usize) -> Group {
        assert!(n >= 1 && n <= MAX_ORDER);
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let labels = (0..n).map(|a| power_label("g", a)).collect();
        Self::new(table, labels, &format!("Z/{n}")).unwrap()
    }

    /// Dihedral group of order `2n`: elements `r^a s^e` at index `a + n e`.
    pub fn dihedral(n: usize) -> Result<Group, GroupError> {
        if n < 2 || 2 * n > 16 {
            return Err(GroupError::Unsupported(format!("dihedral of order {}", 2 * n)));
        }
        let idx = |a: usize, e: usize| a % n + n * e;
        let mut table = vec![vec![0; 2 * n]; 2 * n];
        for x in 0..2 * n {
            let (a, e) = (x % n, x / n);
            for y in 0..2 * n {
                let (b, f) = (y % n, y / n);
                // r^a s^e r^b s^f = r^(a ± b) s^(e+f)
                let c = if e == 0 { a + b } else { a + n - b };
                table[x][y] = idx(c, (e + f) % 2);
            }
        }
        let labels = (0..2 * n)
            .map(|x| {
                let (a, e) = (x % n, x / n);
                match (a, e) {
                    (0, 0) => "1".to_string(),
                    (_, 0) => power_label("r", a),
                    (0, _) => "s".to_string(),
                    _ => format!("{}s", power_label("r", a)),
                }
            })
            .collect();
        Self::new(table, labels, &format!("D{}", 2 * n))
    }

    /// Quaternion group from `⟨i, j | i⁴ = 1, i² = j², j i j⁻¹ = i⁻¹⟩`:
    /// elements `i^a j^e` (a < 4, e < 2) at index `a + 4e`.
    pub fn quaternion() -> Group {
        let mut table = vec![vec![0; 8]; 8];
        for x in 0..8 {
            let (a, e) = (x % 4, x / 4);
            for y in 0..8 {
                let (b, f) = (y % 4, y / 4);
                // j i^b = i^(-b) j and j² = i²
                let c = if e == 0 { a + b } else { a + 4 - b };
                let (c, g) = if e + f == 2 { (c + 2, 0) } else { (c, e + f) };
                table[x][y] = c % 4 + 4 * g;
            }
        }
        let names = ["1", "i", "-1", "-i", "j", "k", "-j", "-k"];
        let labels = names.iter().map(|s| s.to_string()).collect();
        let g = Self::new(table, labels, "Q8").unwrap();
        debug_assert!(g.satisfies_q8_relations(1, 4));
        g
    }

    fn satisfies_q8_relations(&self, i: usize, j: usize) -> bool {
        self.pow(i, 4) == 0 && self.pow(i, 2) == self.pow(j, 2) && self.conjugate(j, i) == self.inv(i)
    }

    pub fn direct_product(a: &Group, b: &Group) -> Group {
        let (n, m) = (a.order(), b.order());
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..m).map(move |y| (x, y))).collect();
        let labels = pairs.iter().map(|&(x, y)| format!("({},{})", a.labels[x], b.labels[y])).collect();
        Self::from_elements(
            &pairs,
            |&(x1, y1), &(x2, y2)| (a.mul(x1, x2), b.mul(y1, y2)),
            labels,
            &format!("{}x{}", a.name, b.name),
        )
        .expect("direct product of groups")
    }

    /// `{(x, y) : f(x) = g(y)}` together with the list of pairs (index order).
    pub fn fiber_product(f: &GroupHom, g: &GroupHom) -> Result<(Group, Vec<(usize, usize)>), GroupError> {
        assert!(f.target() == g.target(), "fiber product over different groups");
        let (a, b) = (f.source(), g.source());
        let mut pairs = Vec::new();
        for x in 0..a.order() {
            for y in 0..b.order() {
                if f.apply(x) == g.apply(y) {
                    pairs.push((x, y));
                }
            }
        }
        let labels = pairs.iter().map(|&(x, y)| format!("({},{})", a.labels[x], b.labels[y])).collect();
        let grp = Self::from_elements(
            &pairs,
            |&(x1, y1), &(x2, y2)| (a.mul(x1, x2), b.mul(y1, y2)),
            labels,
            &format!("{}x_{}", a.name, b.name),
        )?;
        Ok((grp, pairs))
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn pow(&self, a: usize, e: usize) -> usize {
        (0..e).fold(0, |acc, _| self.mul(acc, a))
    }

    /// `g x g⁻¹`.
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_cyclic(&self) -> bool {
        (0..self.order()).any(|a| self.element_order(a) == self.order())
    }

    pub fn full(&self) -> Subset {
        mask_below(self.order())
    }

    /// Subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Subset {
        let mut set: Subset = 1;
        let mut queue: VecDeque<usize> = VecDeque::from(vec![0]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if set & (1 << y) == 0 {
                    set |= 1 << y;
                    queue.push_back(y);
                }
            }
        }
        set
    }

    pub fn is_subgroup(&self, s: Subset) -> bool {
        s & 1 == 1 && members(s).all(|a| members(s).all(|b| s & (1 << self.mul(a, self.inv(b))) != 0))
    }

    pub fn is_normal(&self, s: Subset) -> bool {
        (0..self.order()).all(|g| members(s).all(|x| s & (1 << self.conjugate(g, x)) != 0))
    }

    /// Every subgroup, ordered by size then mask.
    pub fn subgroups(&self) -> Vec<Subset> {
        let n = self.order();
        let mut found: Vec<Subset> = vec![1];
        let mut seen: std::collections::HashSet<Subset> = found.iter().copied().collect();
        let mut i = 0;
        while i < found.len() {
            let s = found[i];
            for g in 0..n {
                if s & (1 << g) == 0 {
                    let mut gens: Vec<usize> = members(s).collect();
                    gens.push(g);
                    let t = self.closure(&gens);
                    if seen.insert(t) {
                        found.push(t);
                    }
                }
            }
            i += 1;
        }
        found.sort_by_key(|&s| (s.count_ones(), s));
        found
    }

    pub fn center(&self) -> Subset {
        let n = self.order();
        (0..n)
            .filter(|&a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
            .fold(0, |m, a| m | (1 << a))
    }

    /// A subgroup as a group in its own right, with the inclusion.
    pub fn subgroup(self: &Group, s: Subset, name: &str) -> Result<(Group, GroupHom), GroupError> {
        if !self.is_subgroup(s) {
            return Err(GroupError::NotAGroup("subset is not a subgroup".into()));
        }
        let elems: Vec<usize> = members(s).collect();
        let labels = elems.iter().map(|&x| self.labels[x].clone()).collect();
        let sub = Self::from_elements(&elems, |&a, &b| self.mul(a, b), labels, name)?;
        let inc = GroupHom::new(&sub, self, elems)?;
        Ok((sub, inc))
    }

    /// A small generating set, greedily chosen.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span: Subset = 1;
        let mut cand: Vec<usize> = (1..self.order()).collect();
        cand.sort_by_key(|&a| std::cmp::Reverse(self.element_order(a)));
        for a in cand {
            if span == self.full() {
                break;
            }
            if span & (1 << a) == 0 {
                gens.push(a);
                span = self.closure(&gens);
            }
        }
        gens
    }

    /// Shortest words in `gens` for every element, as a parent table.
    fn words(&self, gens: &[usize]) -> Vec<Option<(usize, usize)>> {
        // parent[x] = (prefix element, generator position) with x = prefix * gens[pos]
        let mut parent = vec![None; self.order()];
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut queue = VecDeque::from(vec![0]);
        while let Some(x) = queue.pop_front() {
            for (p, &g) in gens.iter().enumerate() {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, p));
                    queue.push_back(y);
                }
            }
        }
        parent
    }
}

fn power_label(g: &str, a: usize) -> String {
    match a {
        0 => "1".into(),
        1 => g.into(),
        _ => format!("{g}^{a}"),
    }
}

fn mask_below(n: usize) -> Subset {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Indices in a subset, increasing.
pub fn members(s: Subset) -> impl Iterator<Item = usize> + Clone {
    (0..64).filter(move |&i| s & (1u64 << i) != 0)
}

/// A homomorphism, verified on the full multiplication table.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupHom {
    source: Group,
    target: Group,
    images: Vec<usize>,
}

impl fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} -> {:?}: [", self.source, self.target)?;
        for (x, y) in self.images.iter().enumerate() {
            if x > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}->{}", self.source.label(x), self.target.label(*y))?;
        }
        write!(f, "]")
    }
}

impl GroupHom {
    pub fn new(source: &Group, target: &Group, images: Vec<usize>) -> Result<Self, GroupError> {
        if images.len() != source.order() || images.iter().any(|&y| y >= target.order()) {
            return Err(GroupError::BadImage);
        }
        for a in 0..source.order() {
            for b in 0..source.order() {
                if images[source.mul(a, b)] != target.mul(images[a], images[b]) {
                    return Err(GroupError::NotAHomomorphism(a, b));
                }
            }
        }
        Ok(GroupHom {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    /// Extends generator images to a homomorphism, if one exists.
    pub fn from_generators(source: &Group, target: &Group, gens: &[usize], imgs: &[usize]) -> Option<Self> {
        assert_eq!(gens.len(), imgs.len());
        if source.closure(gens) != source.full() {
            return None;
        }
        let parent = source.words(gens);
        let mut images = vec![usize::MAX; source.order()];
        images[0] = 0;
        let mut order: Vec<usize> = (1..source.order()).collect();
        // BFS order guarantees the prefix is already known
        order.sort_by_key(|&x| word_length(&parent, x));
        for x in order {
            let (pre, p) = parent[x].expect("generated");
            images[x] = target.mul(images[pre], imgs[p]);
        }
        Self::new(source, target, images).ok()
    }

    pub fn identity(g: &Group) -> Self {
        GroupHom {
            source: g.clone(),
            target: g.clone(),
            images: (0..g.order()).collect(),
        }
    }

    pub fn source(&self) -> &Group {
        &self.source
    }

    pub fn target(&self) -> &Group {
        &self.target
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_injective(&self) -> bool {
        self.kernel() == 1
    }

    pub fn is_surjective(&self) -> bool {
        self.image() == self.target.full()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    pub fn kernel(&self) -> Subset {
        self.images
            .iter()
            .enumerate()
            .filter(|(_, &y)| y == 0)
            .fold(0, |m, (x, _)| m | (1 << x))
    }

    pub fn image(&self) -> Subset {
        self.images.iter().fold(0, |m, &y| m | (1 << y))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupHom) -> Result<GroupHom, GroupError> {
        if other.target != self.source {
            return Err(GroupError::BadImage);
        }
        let images = other.images.iter().map(|&y| self.images[y]).collect();
        GroupHom::new(&other.source, &self.target, images)
    }

    pub fn inverse(&self) -> Option<GroupHom> {
        if !self.is_bijective() {
            return None;
        }
        let mut images = vec![0; self.target.order()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y] = x;
        }
        GroupHom::new(&self.target, &self.source, images).ok()
    }

    /// Restriction to a subgroup, as a map out of that subgroup.
    pub fn restrict(&self, inclusion: &GroupHom) -> Result<GroupHom, GroupError> {
        self.compose(inclusion)
    }
}

fn word_length(parent: &[Option<(usize, usize)>], mut x: usize) -> usize {
    let mut k = 0;
    while let Some((p, _)) = parent[x] {
        x = p;
        k += 1;
    }
    k
}

/// An isomorphism `a → b`, if the groups are isomorphic.
pub fn find_isomorphism(a: &Group, b: &Group) -> Option<GroupHom> {
    if a.order() != b.order() {
        return None;
    }
    let gens = a.generators();
    let orders: Vec<usize> = gens.iter().map(|&g| a.element_order(g)).collect();
    let mut by_order: HashMap<usize, Vec<usize>> = HashMap::new();
    for y in 0..b.order() {
        by_order.entry(b.element_order(y)).or_default().push(y);
    }
    let choices: Vec<Vec<usize>> = orders.iter().map(|o| by_order.get(o).cloned().unwrap_or_default()).collect();
    let mut pick = vec![0; gens.len()];
    search_assignments(&choices, &mut pick, 0, &mut |imgs| {
        GroupHom::from_generators(a, b, &gens, imgs).filter(|h| h.is_bijective())
    })
}

/// Every homomorphism `a → b` sending each generator of `a` into the
/// corresponding candidate list.
pub fn homomorphisms_with(a: &Group, b: &Group, gens: &[usize], choices: &[Vec<usize>]) -> Vec<GroupHom> {
    let mut out = Vec::new();
    let mut pick = vec![0; gens.len()];
    search_assignments(choices, &mut pick, 0, &mut |imgs| {
        if let Some(h) = GroupHom::from_generators(a, b, gens, imgs) {
            out.push(h);
        }
        None::<()>
    });
    out
}

fn search_assignments<T>(
    choices: &[Vec<usize>],
    pick: &mut Vec<usize>,
    depth: usize,
    f: &mut impl FnMut(&[usize]) -> Option<T>,
) -> Option<T> {
    if depth == choices.len() {
        return f(pick);
    }
    for &c in &choices[depth] {
        pick[depth] = c;
        if let Some(r) = search_assignments(choices, pick, depth + 1, f) {
            return Some(r);
        }
    }
    None
}

pub fn is_isomorphic(a: &Group, b: &Group) -> bool {
    find_isomorphism(a, b).is_some()
}

/// Catalog presentations: `Z/n`, `C<n>`, `D<2n>`, `Q8`, and `A x B`.
pub fn from_catalog(spec: &str) -> Result<Group, GroupError> {
    let s = spec.trim();
    if let Some((l, r)) = s.split_once(" x ") {
        return Ok(FiniteGroup::direct_product(&from_catalog(l)?, &from_catalog(r)?));
    }
    let bad = || GroupError::Unsupported(s.to_string());
    if s == "Q8" {
        return Ok(FiniteGroup::quaternion());
    }
    if let Some(n) = s.strip_prefix("Z/").or_else(|| s.strip_prefix('C')) {
        let n: usize = n.parse().map_err(|_| bad())?;
        if n == 0 || n > MAX_ORDER {
            return Err(bad());
        }
        return Ok(FiniteGroup::cyclic(n));
    }
    if let Some(n) = s.strip_prefix('D') {
        let n: usize = n.parse().map_err(|_| bad())?;
        if n % 2 != 0 {
            return Err(bad());
        }
        return FiniteGroup::dihedral(n / 2);
    }
    Err(bad())
}
