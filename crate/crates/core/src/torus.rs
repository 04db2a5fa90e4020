//! Maximal tori of the twisted group: the diagonal matrices fixed by the
//! twisted Frobenius, their Weyl group, and the norm images of root
//! subgroups used by the regularity criterion.
//!
//! A fixed diagonal matrix is determined by one unit per cycle of w, living
//! in the subring fixed by Frobenius^len; the entry at the k-th position of
//! a cycle is the k-th Frobenius power of that unit. The relative Weyl group
//! is the centralizer of w in S_n, acting by permutation matrices, which are
//! themselves fixed points. Root norms are computed over extension towers so
//! that images for different extension degrees can be compared in one
//! coordinate system.

use crate::error::Result;
use crate::fieldtower::FieldSpec;
use crate::perm::{centralizer, centralizer_order, Perm};
use crate::truncring::{RingSpec, Rt, RT_ZERO};
use crate::twistgroup::{GroupSpec, Mat};
use std::collections::BTreeSet;
use std::sync::Arc;

pub struct TorusTable {
    group: Arc<GroupSpec>,
    cycles: Vec<Vec<usize>>,
    /// Units of the fixed subring for each cycle, ascending by code.
    factor_units: Vec<Vec<Rt>>,
    factor_codes: Vec<Vec<u128>>,
    /// (cycle id, step) for each matrix position.
    pos_info: Vec<(usize, u32)>,
    strides: Vec<u64>,
    /// Group key of each torus point, in odometer order.
    keys: Vec<u64>,
    by_key: Vec<(u64, u32)>,
}

impl TorusTable {
    pub fn build(group: Arc<GroupSpec>) -> TorusTable {
        let ring = group.ring().clone();
        let n = group.n();
        let cycles = group.w().cycles();
        let mut pos_info = vec![(0usize, 0u32); n];
        for (c, cyc) in cycles.iter().enumerate() {
            for (k, &i) in cyc.iter().enumerate() {
                pos_info[i] = (c, k as u32);
            }
        }
        let factor_units: Vec<Vec<Rt>> =
            cycles.iter().map(|c| ring.subring_units(c.len() as u32)).collect();
        let factor_codes: Vec<Vec<u128>> = factor_units
            .iter()
            .map(|us| us.iter().map(|&u| ring.code(u)).collect())
            .collect();
        let counts: Vec<u64> = factor_units.iter().map(|u| u.len() as u64).collect();
        let total: u64 = counts.iter().product();
        let mut strides = vec![1u64; cycles.len()];
        for c in (0..cycles.len().saturating_sub(1)).rev() {
            strides[c] = strides[c + 1] * counts[c + 1];
        }
        let mut table = TorusTable {
            group,
            cycles,
            factor_units,
            factor_codes,
            pos_info,
            strides,
            keys: Vec::new(),
            by_key: Vec::new(),
        };
        let keys: Vec<u64> = (0..total).map(|idx| table.group.encode(&table.diag_mat(idx as u32))).collect();
        let mut by_key: Vec<(u64, u32)> = keys.iter().enumerate().map(|(i, &k)| (k, i as u32)).collect();
        by_key.sort_unstable();
        table.keys = keys;
        table.by_key = by_key;
        table
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }
    pub fn ring(&self) -> &Arc<RingSpec> {
        self.group.ring()
    }
    pub fn order(&self) -> u64 {
        self.keys.len() as u64
    }
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }
    pub fn factor_units(&self, cycle: usize) -> &[Rt] {
        &self.factor_units[cycle]
    }

    /// Factors (one unit per cycle) of a point.
    pub fn factors(&self, idx: u32) -> Vec<Rt> {
        let mut k = idx as u64;
        let mut out = vec![RT_ZERO; self.cycles.len()];
        for c in (0..self.cycles.len()).rev() {
            let count = self.factor_units[c].len() as u64;
            out[c] = self.factor_units[c][(k % count) as usize];
            k /= count;
        }
        out
    }

    pub fn index_from_factors(&self, factors: &[Rt]) -> u32 {
        let ring = self.ring();
        let mut idx = 0u64;
        for (c, &f) in factors.iter().enumerate() {
            let code = ring.code(f);
            let pos = self.factor_codes[c].binary_search(&code).expect("factor is a unit of the subring");
            idx += pos as u64 * self.strides[c];
        }
        idx as u32
    }

    /// The diagonal entries of a point, position by position.
    pub fn diag_entries(&self, idx: u32) -> Vec<Rt> {
        let ring = self.ring();
        let factors = self.factors(idx);
        (0..self.group.n())
            .map(|i| {
                let (c, step) = self.pos_info[i];
                ring.frobenius(factors[c], step)
            })
            .collect()
    }

    pub fn diag_mat(&self, idx: u32) -> Mat {
        let n = self.group.n();
        let entries = self.diag_entries(idx);
        let mut m = vec![RT_ZERO; n * n];
        for (i, e) in entries.into_iter().enumerate() {
            m[i * n + i] = e;
        }
        m
    }

    pub fn key_of(&self, idx: u32) -> u64 {
        self.keys[idx as usize]
    }

    pub fn index_of_key(&self, key: u64) -> Option<u32> {
        self.by_key
            .binary_search_by_key(&key, |&(k, _)| k)
            .ok()
            .map(|p| self.by_key[p].1)
    }

    fn index_from_entries(&self, entries: &[Rt]) -> u32 {
        let factors: Vec<Rt> = self.cycles.iter().map(|c| entries[c[0]]).collect();
        let idx = self.index_from_factors(&factors);
        debug_assert_eq!(self.diag_entries(idx), entries);
        idx
    }

    // ---- abelian group structure on point indices ----

    pub fn identity_index(&self) -> u32 {
        let one = self.ring().one();
        self.index_from_factors(&vec![one; self.cycles.len()])
    }

    pub fn mul_indices(&self, a: u32, b: u32) -> u32 {
        let ring = self.ring();
        let fa = self.factors(a);
        let fb = self.factors(b);
        let prod: Vec<Rt> = fa.iter().zip(&fb).map(|(&x, &y)| ring.mul(x, y)).collect();
        self.index_from_factors(&prod)
    }

    pub fn inv_index(&self, a: u32) -> u32 {
        let ring = self.ring();
        let inv: Vec<Rt> = self
            .factors(a)
            .iter()
            .map(|&x| ring.inv(x).expect("torus factors are units"))
            .collect();
        self.index_from_factors(&inv)
    }

    pub fn pow_index(&self, a: u32, e: u64) -> u32 {
        let ring = self.ring();
        let pows: Vec<Rt> = self.factors(a).iter().map(|&x| ring.pow(x, e)).collect();
        self.index_from_factors(&pows)
    }

    // ---- Weyl group ----

    /// The relative Weyl group: the centralizer of w in S_n.
    pub fn weyl_elements(&self) -> Vec<Perm> {
        centralizer(self.group.w())
    }

    pub fn weyl_order(&self) -> u64 {
        centralizer_order(self.group.w())
    }

    /// Permutation matrix of v over the ring: entry (i, j) = [i == v(j)].
    pub fn weyl_matrix(&self, v: &Perm) -> Mat {
        let n = self.group.n();
        let mut m = vec![RT_ZERO; n * n];
        for j in 0..n {
            m[v.apply(j) * n + j] = self.ring().one();
        }
        m
    }

    /// The point whose diagonal is the v-permutation of this point's
    /// diagonal: entry i of the result is entry v(i) of the input. This is
    /// conjugation by the permutation matrix of v.
    pub fn permuted_index(&self, v: &Perm, idx: u32) -> u32 {
        let entries = self.diag_entries(idx);
        let permuted: Vec<Rt> = (0..self.group.n()).map(|i| entries[v.apply(i)]).collect();
        self.index_from_entries(&permuted)
    }

    // ---- root norms ----

    /// Norm images of all root subgroups at congruence level r-1, for
    /// extension parameter k, as sets of torus point indices.
    ///
    /// For the root (i, j) the domain is the set of diagonals with
    /// 1 + pi^(r-1) x at slot i and its inverse at slot j, x over the field
    /// with q^(k d) elements; the norm multiplies the twisted-Frobenius
    /// translates over k*d steps and lands in the fixed torus.
    pub fn root_norm_indices(&self, k: u32) -> Result<Vec<((usize, usize), BTreeSet<u32>)>> {
        let sets = self.root_norm_sets_ext(k, k)?;
        let mut out = Vec::with_capacity(sets.len());
        for (root, entry_set) in sets {
            let mut indices = BTreeSet::new();
            for entries in entry_set {
                indices.insert(self.index_from_entries(&entries));
            }
            out.push((root, indices));
        }
        Ok(out)
    }

    /// Norm images computed inside the degree-(k_ext * d) extension tower,
    /// with domain parameter k <= k_ext: x ranges over the subfield fixed by
    /// Frobenius^(k d) and the norm runs over k*d steps. Results are diagonal
    /// entry vectors in extension coordinates, so images for different k are
    /// directly comparable. For k == k_ext the extension is only rebuilt with
    /// the same parameters when k == 1.
    pub fn root_norm_sets_ext(
        &self,
        k_ext: u32,
        k: u32,
    ) -> Result<Vec<((usize, usize), BTreeSet<Vec<Rt>>)>> {
        assert!(k >= 1 && k <= k_ext);
        let field = self.group.field();
        let d = field.d();
        let r = self.ring().r();
        let ext_field = FieldSpec::build(field.p(), field.m(), k_ext * d)?;
        let ext_ring = RingSpec::new(ext_field.clone(), r)?;
        let w = self.group.w();
        let n = self.group.n();
        let steps = (k * d) as usize;
        // w^(-j)(i) for j = 0..steps.
        let w_inv = w.inverse();
        let mut w_inv_pows: Vec<Vec<usize>> = Vec::with_capacity(steps);
        let mut cur: Vec<usize> = (0..n).collect();
        for _ in 0..steps {
            w_inv_pows.push(cur.clone());
            cur = cur.iter().map(|&i| w_inv.apply(i)).collect();
        }

        let domain = ext_field.fixed_subfield_elems(k * d);
        debug_assert_eq!(domain.len() as u64, field.q().pow(k * d) as u64);
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mut set: BTreeSet<Vec<Rt>> = BTreeSet::new();
                for &x in &domain {
                    let u = ext_ring.add(ext_ring.one(), ext_ring.monomial(x, r - 1));
                    let u_inv = ext_ring.inv(u)?;
                    let mut tau = vec![ext_ring.one(); n];
                    tau[i] = u;
                    tau[j] = u_inv;
                    // Norm over `steps` twisted-Frobenius translates.
                    let mut norm = vec![ext_ring.one(); n];
                    for (jstep, wj) in w_inv_pows.iter().enumerate() {
                        for (slot, nval) in norm.iter_mut().enumerate() {
                            let t = ext_ring.frobenius(tau[wj[slot]], jstep as u32);
                            *nval = ext_ring.mul(*nval, t);
                        }
                    }
                    // The norm is a fixed point: entries at w(i) are the
                    // Frobenius of entries at i.
                    debug_assert!((0..n).all(|s| norm[w.apply(s)] == ext_ring.frobenius(norm[s], 1)));
                    set.insert(norm);
                }
                out.push(((i, j), set));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twistgroup::GroupSpec;

    fn coxeter_torus(p: u32, n: usize, r: u32) -> TorusTable {
        TorusTable::build(GroupSpec::coxeter(p, 1, n, r).unwrap())
    }

    #[test]
    fn torus_orders() {
        assert_eq!(coxeter_torus(2, 2, 2).order(), 12);
        assert_eq!(coxeter_torus(2, 3, 2).order(), 56);
        assert_eq!(coxeter_torus(2, 2, 4).order(), 192);
        let split = TorusTable::build(GroupSpec::from_cycle_type(2, 1, 2, 2, &[1, 1]).unwrap());
        assert_eq!(split.order(), 4);
        let mixed = TorusTable::build(GroupSpec::from_cycle_type(2, 1, 3, 2, &[2, 1]).unwrap());
        assert_eq!(mixed.order(), 24);
    }

    #[test]
    fn torus_keys_are_exactly_the_diagonal_elements() {
        let t = coxeter_torus(2, 2, 2);
        let mut keys = t.keys.clone();
        keys.sort_unstable();
        assert_eq!(keys, t.group().diagonal_keys());
        for idx in 0..t.order() as u32 {
            assert_eq!(t.index_of_key(t.key_of(idx)), Some(idx));
        }
    }

    #[test]
    fn index_arithmetic_matches_matrix_arithmetic() {
        let t = coxeter_torus(2, 2, 2);
        let g = t.group().clone();
        for a in 0..t.order() as u32 {
            for b in 0..t.order() as u32 {
                let prod = t.mul_indices(a, b);
                let matprod = g.mat_mul(&t.diag_mat(a), &t.diag_mat(b));
                assert_eq!(g.encode(&matprod), t.key_of(prod));
            }
            assert_eq!(t.mul_indices(a, t.inv_index(a)), t.identity_index());
            assert_eq!(t.pow_index(a, 3), {
                let aa = t.mul_indices(a, a);
                t.mul_indices(aa, a)
            });
        }
    }

    #[test]
    fn weyl_group_matches_monomial_quotient() {
        // Monomial fixed matrices modulo the torus realize the relative Weyl
        // group; compare orders by brute scan.
        for (p, n, r, lens) in [(2u32, 2usize, 2u32, vec![2usize]), (2, 2, 2, vec![1, 1]), (2, 3, 1, vec![3]), (2, 3, 1, vec![2, 1])] {
            let g = GroupSpec::from_cycle_type(p, 1, n, r, &lens).unwrap();
            let t = TorusTable::build(g.clone());
            let ring = g.ring();
            let monomial = g
                .elements()
                .iter()
                .filter(|&&k| {
                    let m = g.decode(k);
                    (0..n).all(|i| (0..n).filter(|&j| m[i * n + j] != RT_ZERO).count() == 1)
                        && (0..n).all(|j| (0..n).filter(|&i| m[i * n + j] != RT_ZERO).count() == 1)
                        && m.iter().all(|&e| e == RT_ZERO || ring.is_unit(e))
                })
                .count() as u64;
            assert_eq!(monomial / t.order(), t.weyl_order(), "cycle type {lens:?}");
            assert_eq!(t.weyl_elements().len() as u64, t.weyl_order());
        }
    }

    #[test]
    fn weyl_matrices_are_fixed_and_act_by_permuting_entries() {
        let t = coxeter_torus(2, 2, 2);
        let g = t.group().clone();
        for v in t.weyl_elements() {
            let vm = t.weyl_matrix(&v);
            assert!(g.is_fixed(&vm));
            let vm_inv = g.mat_inv(&vm).unwrap();
            for idx in (0..t.order() as u32).step_by(3) {
                let conj = g.mat_mul(&vm_inv, &g.mat_mul(&t.diag_mat(idx), &vm));
                assert_eq!(g.encode(&conj), t.key_of(t.permuted_index(&v, idx)));
            }
        }
        // A transposition not centralizing a 3-cycle is not fixed.
        let g3 = GroupSpec::coxeter(2, 1, 3, 1).unwrap();
        let t3 = TorusTable::build(g3.clone());
        let bad = Perm::from_images(vec![1, 0, 2]);
        assert!(!g3.is_fixed(&t3.weyl_matrix(&bad)));
    }

    #[test]
    fn norm_images_are_small_subgroups() {
        // Coxeter n=2, q=2, r=2: each root norm image has 2 points.
        let t = coxeter_torus(2, 2, 2);
        let sets = t.root_norm_indices(1).unwrap();
        assert_eq!(sets.len(), 2);
        for (_, s) in &sets {
            assert_eq!(s.len(), 2);
            assert!(s.contains(&t.identity_index()));
            // Closed under multiplication: a subgroup.
            for &a in s {
                for &b in s {
                    assert!(s.contains(&t.mul_indices(a, b)));
                }
            }
        }
    }

    #[test]
    fn norm_images_independent_of_extension_degree() {
        // Images over the d- and 2d-extensions agree in one coordinate
        // system.
        for (p, n) in [(2u32, 2usize), (3, 2)] {
            let t = coxeter_torus(p, n, 2);
            let s1 = t.root_norm_sets_ext(2, 1).unwrap();
            let s2 = t.root_norm_sets_ext(2, 2).unwrap();
            for ((r1, a), (r2, b)) in s1.iter().zip(&s2) {
                assert_eq!(r1, r2);
                assert_eq!(a, b, "root {r1:?} at p={p}, n={n}");
            }
        }
    }
}
