//! Finite-dimensional algebras over `Q` given by structure constants.

use num_traits::Zero;

use crate::linalg::{self, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureAlgebra {
    dim: usize,
    // table[i][j] = coordinates of e_i * e_j
    table: Vec<Vec<Vec<Q>>>,
}

impl StructureAlgebra {
    pub fn new(table: Vec<Vec<Vec<Q>>>) -> Self {
        let dim = table.len();
        assert!(table.iter().all(|r| r.len() == dim && r.iter().all(|v| v.len() == dim)));
        StructureAlgebra { dim, table }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mul(&self, x: &[Q], y: &[Q]) -> Vec<Q> {
        let mut out = linalg::zero_vec(self.dim);
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let ab = a * b;
                for (o, t) in out.iter_mut().zip(&self.table[i][j]) {
                    if !t.is_zero() {
                        *o += &ab * t;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `x ↦ x·g − g·x` (rows = output coordinates).
    fn commutator_matrix(&self, g: &[Q]) -> Vec<Vec<Q>> {
        let cols: Vec<Vec<Q>> = (0..self.dim)
            .map(|i| {
                let e = linalg::unit_vec(self.dim, i);
                linalg::vec_sub(&self.mul(&e, g), &self.mul(g, &e))
            })
            .collect();
        linalg::transpose(&cols)
    }

    /// Basis of `{x : xg = gx for all g in gens}`.
    pub fn centralizer(&self, gens: &[Vec<Q>]) -> Vec<Vec<Q>> {
        let mut rows = Vec::new();
        for g in gens {
            rows.extend(self.commutator_matrix(g));
        }
        linalg::kernel(&rows, self.dim)
    }

    /// Basis of the center.
    pub fn center(&self) -> Vec<Vec<Q>> {
        let gens: Vec<Vec<Q>> = (0..self.dim).map(|i| linalg::unit_vec(self.dim, i)).collect();
        self.centralizer(&gens)
    }

    pub fn is_associative(&self) -> bool {
        let e = |i| linalg::unit_vec(self.dim, i);
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                (0..self.dim).all(|k| {
                    let l = self.mul(&self.mul(&e(i), &e(j)), &e(k));
                    let r = self.mul(&e(i), &self.mul(&e(j), &e(k)));
                    l == r
                })
            })
        })
    }
}

/// Basis of the center of an algebra given by structure constants.
pub fn center_of_algebra(a: &StructureAlgebra) -> Vec<Vec<Q>> {
    a.center()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn dual_numbers() -> StructureAlgebra {
        let z = || vec![q(0), q(0)];
        StructureAlgebra::new(vec![
            vec![vec![q(1), q(0)], vec![q(0), q(1)]],
            vec![vec![q(0), q(1)], z()],
        ])
    }

    #[test]
    fn commutative_center_is_everything() {
        let a = dual_numbers();
        assert!(a.is_associative());
        assert_eq!(center_of_algebra(&a).len(), 2);
    }

    #[test]
    fn matrix_algebra_center_is_scalars() {
        // basis e11, e12, e21, e22 with eij ekl = δjk eil
        let idx = |i: usize, j: usize| 2 * i + j;
        let mut t = vec![vec![vec![q(0); 4]; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    t[idx(i, j)][idx(j, l)][idx(i, l)] = q(1);
                }
            }
        }
        let a = StructureAlgebra::new(t);
        let c = center_of_algebra(&a);
        assert_eq!(c.len(), 1);
        assert!(linalg::same_span(&c, &[vec![q(1), q(0), q(0), q(1)]]));
    }
}
