//! Class functions on the fixed group: induction from subgroups, exact and
//! floating inner products, double cosets, and the Mackey pairing.
//!
//! Induction uses the class-bucket form of the formula: the induced value on
//! a class c is [G : H] / |c| times the sum of the character over H meeting
//! c. The textbook average over the whole group is kept as a reference
//! implementation for cross-checking. Inner products run in the cyclotomic
//! field; a parallel floating route exists so the two can be compared.

use crate::cyclo::CycloValue;
use crate::error::{LabError, Result};
use crate::twistgroup::{GroupSpec, Mat};
use num::complex::Complex64;
use std::sync::Arc;

/// Exact values must match their own floating evaluation this tightly.
pub const EXACT_EVAL_TOL: f64 = 1e-9;
/// Floating pairings must match the exact pairing this tightly.
pub const NUMERIC_RESIDUAL_TOL: f64 = 1e-6;

/// A subgroup as its sorted element keys.
pub struct Subgroup {
    keys: Vec<u64>,
}

impl Subgroup {
    pub fn from_keys(mut keys: Vec<u64>) -> Subgroup {
        keys.sort_unstable();
        keys.dedup();
        assert!(!keys.is_empty());
        Subgroup { keys }
    }

    pub fn order(&self) -> u64 {
        self.keys.len() as u64
    }
    pub fn keys(&self) -> &[u64] {
        &self.keys
    }
    pub fn contains(&self, key: u64) -> bool {
        self.keys.binary_search(&key).is_ok()
    }
    pub fn position(&self, key: u64) -> Option<usize> {
        self.keys.binary_search(&key).ok()
    }

    /// A small generating set, greedy over ascending keys.
    pub fn generators(&self, group: &GroupSpec) -> Vec<u64> {
        let mut gens: Vec<u64> = Vec::new();
        let mut gen_mats: Vec<Mat> = Vec::new();
        let mut closed = vec![false; self.keys.len()];
        let id = group.id_key();
        closed[self.position(id).expect("subgroup contains the identity")] = true;
        let mut count = 1usize;
        for start in 0..self.keys.len() {
            if closed[start] {
                continue;
            }
            let new_gen = group.decode(self.keys[start]);
            let mut frontier: Vec<Mat> = Vec::new();
            let seeds: Vec<usize> = (0..self.keys.len()).filter(|&i| closed[i]).collect();
            gens.push(self.keys[start]);
            gen_mats.push(new_gen.clone());
            for i in seeds {
                let prod = group.mat_mul(&group.decode(self.keys[i]), &new_gen);
                let pos = self.position(group.encode(&prod)).expect("subgroup is closed");
                if !closed[pos] {
                    closed[pos] = true;
                    count += 1;
                    frontier.push(prod);
                }
            }
            while let Some(x) = frontier.pop() {
                for g in &gen_mats {
                    let y = group.mat_mul(&x, g);
                    let pos = self.position(group.encode(&y)).expect("subgroup is closed");
                    if !closed[pos] {
                        closed[pos] = true;
                        count += 1;
                        frontier.push(y);
                    }
                }
            }
            if count == self.keys.len() {
                break;
            }
        }
        assert_eq!(count, self.keys.len(), "generators close the subgroup");
        gens
    }
}

/// A class function, stored as one exact value per conjugacy class.
pub struct ClassFunction {
    group: Arc<GroupSpec>,
    values: Vec<CycloValue>,
}

impl ClassFunction {
    pub fn from_class_values(group: Arc<GroupSpec>, values: Vec<CycloValue>) -> ClassFunction {
        assert_eq!(values.len(), group.conjugacy_classes().reps.len());
        ClassFunction { group, values }
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }
    pub fn class_values(&self) -> &[CycloValue] {
        &self.values
    }

    pub fn value_on_class(&self, class: usize) -> &CycloValue {
        &self.values[class]
    }

    pub fn value_at_key(&self, key: u64) -> &CycloValue {
        let idx = self.group.index_of(key).expect("key names a group element");
        &self.values[self.group.conjugacy_classes().class_of[idx] as usize]
    }

    /// Value at the identity.
    pub fn degree(&self) -> CycloValue {
        self.value_at_key(self.group.id_key()).clone()
    }
}

/// Induction by class buckets.
pub fn induce(group: &Arc<GroupSpec>, sub: &Subgroup, chi: &dyn Fn(u64) -> CycloValue) -> ClassFunction {
    let classes = group.conjugacy_classes();
    let mut sums = vec![CycloValue::zero(); classes.reps.len()];
    for &h in sub.keys() {
        let idx = group.index_of(h).expect("subgroup key is a group element");
        let cid = classes.class_of[idx] as usize;
        sums[cid] = sums[cid].add(&chi(h));
    }
    let g_order = group.order() as i128;
    let h_order = sub.order() as i128;
    let values: Vec<CycloValue> = sums
        .into_iter()
        .enumerate()
        .map(|(cid, s)| s.scale(g_order, h_order * classes.sizes[cid] as i128))
        .collect();
    ClassFunction::from_class_values(group.clone(), values)
}

/// Reference induction: the average of chi over conjugators, per class
/// representative. Quadratic; for cross-checking only.
pub fn induce_naive(group: &Arc<GroupSpec>, sub: &Subgroup, chi: &dyn Fn(u64) -> CycloValue) -> ClassFunction {
    let classes = group.conjugacy_classes();
    let values: Vec<CycloValue> = classes
        .reps
        .iter()
        .map(|&rep| {
            let g = group.decode(rep);
            let mut acc = CycloValue::zero();
            for &xk in group.elements() {
                let x = group.decode(xk);
                let xi = group.mat_inv(&x).expect("group element");
                let conj = group.mat_mul(&x, &group.mat_mul(&g, &xi));
                let ck = group.encode(&conj);
                if sub.contains(ck) {
                    acc = acc.add(&chi(ck));
                }
            }
            acc.scale(1, sub.order() as i128)
        })
        .collect();
    ClassFunction::from_class_values(group.clone(), values)
}

/// Exact inner product (1/|G|) sum over classes of size * f * conj(g).
pub fn inner_product(f: &ClassFunction, g: &ClassFunction) -> CycloValue {
    let classes = f.group.conjugacy_classes();
    let mut acc = CycloValue::zero();
    for (cid, size) in classes.sizes.iter().enumerate() {
        let term = f.values[cid].mul(&g.values[cid].conj()).scale(*size as i128, 1);
        acc = acc.add(&term);
    }
    acc.scale(1, f.group.order() as i128)
}

/// Floating route for the same pairing, with pairwise summation.
pub fn inner_product_numeric(f: &ClassFunction, g: &ClassFunction) -> Complex64 {
    let classes = f.group.conjugacy_classes();
    let terms: Vec<Complex64> = (0..classes.sizes.len())
        .map(|cid| {
            f.values[cid].eval_complex() * g.values[cid].eval_complex().conj() * classes.sizes[cid] as f64
        })
        .collect();
    pairwise(&terms) / f.group.order() as f64
}

fn pairwise(terms: &[Complex64]) -> Complex64 {
    match terms.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => terms[0],
        n => {
            let (a, b) = terms.split_at(n / 2);
            pairwise(a) + pairwise(b)
        }
    }
}

/// Both routes of one pairing, with the agreement residual.
pub struct DualPairing {
    pub exact: CycloValue,
    pub numeric: Complex64,
    pub residual: f64,
}

pub fn dual_inner_product(f: &ClassFunction, g: &ClassFunction) -> DualPairing {
    let exact = inner_product(f, g);
    let numeric = inner_product_numeric(f, g);
    let residual = (numeric - exact.eval_complex()).norm();
    DualPairing { exact, numeric, residual }
}

/// Right side of Frobenius reciprocity: the inner product over the subgroup
/// of chi against the restriction of rho.
pub fn restricted_inner_product(
    sub: &Subgroup,
    chi: &dyn Fn(u64) -> CycloValue,
    rho: &ClassFunction,
) -> CycloValue {
    let mut acc = CycloValue::zero();
    for &h in sub.keys() {
        acc = acc.add(&chi(h).mul(&rho.value_at_key(h).conj()));
    }
    acc.scale(1, sub.order() as i128)
}

/// Floating route for the restricted pairing.
pub fn restricted_inner_product_numeric(
    sub: &Subgroup,
    chi: &dyn Fn(u64) -> Complex64,
    rho: &ClassFunction,
) -> Complex64 {
    let terms: Vec<Complex64> = sub
        .keys()
        .iter()
        .map(|&h| chi(h) * rho.value_at_key(h).eval_complex().conj())
        .collect();
    pairwise(&terms) / sub.order() as f64
}

/// Double cosets H\G/K: representatives (smallest key) and sizes, by orbit
/// closure under left multiplication by H-generators and right by K's.
pub struct DoubleCosets {
    pub reps: Vec<u64>,
    pub sizes: Vec<u64>,
}

pub fn double_cosets(group: &Arc<GroupSpec>, h: &Subgroup, k: &Subgroup) -> DoubleCosets {
    let h_gens: Vec<Mat> = h.generators(group).iter().map(|&g| group.decode(g)).collect();
    let k_gens: Vec<Mat> = k.generators(group).iter().map(|&g| group.decode(g)).collect();
    let order = group.order() as usize;
    let mut visited = vec![false; order];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    for start in 0..order {
        if visited[start] {
            continue;
        }
        let key = group.elements()[start];
        reps.push(key);
        visited[start] = true;
        let mut size = 1u64;
        let mut frontier = vec![group.decode(key)];
        while let Some(x) = frontier.pop() {
            for g in h_gens.iter() {
                let y = group.mat_mul(g, &x);
                let idx = group.index_of(group.encode(&y)).unwrap();
                if !visited[idx] {
                    visited[idx] = true;
                    size += 1;
                    frontier.push(y);
                }
            }
            for g in k_gens.iter() {
                let y = group.mat_mul(&x, g);
                let idx = group.index_of(group.encode(&y)).unwrap();
                if !visited[idx] {
                    visited[idx] = true;
                    size += 1;
                    frontier.push(y);
                }
            }
        }
        sizes.push(size);
    }
    assert_eq!(sizes.iter().sum::<u64>(), group.order(), "double cosets partition");
    DoubleCosets { reps, sizes }
}

/// Per double coset s: the pairs (s x s^-1, x) over x in K with s x s^-1 in
/// H. Precomputed once, reused for every character pair.
pub struct MackeyData {
    cosets: Vec<Vec<(u64, u64)>>,
}

impl MackeyData {
    pub fn coset_intersections(&self) -> &[Vec<(u64, u64)>] {
        &self.cosets
    }
}

pub fn mackey_data(group: &Arc<GroupSpec>, dc: &DoubleCosets, h: &Subgroup, k: &Subgroup) -> MackeyData {
    let cosets = dc
        .reps
        .iter()
        .map(|&s| {
            let sm = group.decode(s);
            let si = group.mat_inv(&sm).expect("group element");
            let mut pairs = Vec::new();
            for &x in k.keys() {
                let y = group.mat_mul(&sm, &group.mat_mul(&group.decode(x), &si));
                let yk = group.encode(&y);
                if h.contains(yk) {
                    pairs.push((yk, x));
                }
            }
            assert!(!pairs.is_empty(), "intersection contains the identity");
            pairs
        })
        .collect();
    MackeyData { cosets }
}

/// The intertwining number by the double-coset decomposition: the sum over
/// cosets of the inner products of the conjugated character against psi on
/// the intersection.
pub fn mackey_inner_product(
    md: &MackeyData,
    chi: &dyn Fn(u64) -> CycloValue,
    psi: &dyn Fn(u64) -> CycloValue,
) -> CycloValue {
    let mut total = CycloValue::zero();
    for pairs in &md.cosets {
        let mut acc = CycloValue::zero();
        for &(y, x) in pairs {
            acc = acc.add(&chi(y).mul(&psi(x).conj()));
        }
        total = total.add(&acc.scale(1, pairs.len() as i128));
    }
    total
}

/// Floating route for the intertwining number.
pub fn mackey_inner_product_numeric(
    md: &MackeyData,
    chi: &dyn Fn(u64) -> Complex64,
    psi: &dyn Fn(u64) -> Complex64,
) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for pairs in &md.cosets {
        let terms: Vec<Complex64> = pairs.iter().map(|&(y, x)| chi(y) * psi(x).conj()).collect();
        total += pairwise(&terms) / pairs.len() as f64;
    }
    total
}

/// Assert helper: an exact pairing that should be a rational integer.
pub fn as_integer(v: &CycloValue) -> Result<i128> {
    let r = v
        .as_rational()
        .ok_or_else(|| LabError::Unsupported("pairing is not rational".into()))?;
    if *r.denom() != 1 {
        return Err(LabError::Unsupported(format!("pairing is not integral: {r}")));
    }
    Ok(*r.numer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::{genericity_report, LevelData, TorusChars};
    use crate::torus::TorusTable;
    use num::rational::Ratio;

    struct Lab {
        group: Arc<GroupSpec>,
        tc: TorusChars,
        tu: Subgroup,
        generic: Vec<u32>,
        nongeneric: Vec<u32>,
    }

    fn lab_222() -> Lab {
        let group = GroupSpec::coxeter(2, 1, 2, 2).unwrap();
        let torus = Arc::new(TorusTable::build(group.clone()));
        let tc = TorusChars::build(torus.clone());
        let tu = Subgroup::from_keys(group.tu_keys(1));
        let level = LevelData::new(group.clone()).unwrap();
        let g1 = GroupSpec::coxeter(2, 1, 2, 1).unwrap();
        let norm = torus.root_norm_indices(1).unwrap();
        let weyl = torus.weyl_elements();
        let mut generic = Vec::new();
        let mut nongeneric = Vec::new();
        for theta in 0..tc.count() as u32 {
            let rep = genericity_report(&tc, &level, &g1, &norm, &weyl, theta).unwrap();
            if rep.is_generic() {
                generic.push(theta);
            } else {
                nongeneric.push(theta);
            }
        }
        Lab { group, tc, tu, generic, nongeneric }
    }

    fn theta_tilde<'a>(tc: &'a TorusChars, theta: u32) -> impl Fn(u64) -> CycloValue + 'a {
        move |key| tc.extended_value(theta, key).expect("congruence diagonal element")
    }

    #[test]
    fn induced_generic_characters_are_irreducible_of_the_right_degree() {
        let lab = lab_222();
        assert_eq!(lab.generic.len(), 6);
        for &theta in &lab.generic {
            let chi = theta_tilde(&lab.tc, theta);
            let ind = induce(&lab.group, &lab.tu, &chi);
            assert_eq!(ind.degree().as_rational(), Some(Ratio::new(2, 1)));
            let norm = inner_product(&ind, &ind);
            assert_eq!(as_integer(&norm).unwrap(), 1, "theta {theta}");
        }
    }

    #[test]
    fn bucket_induction_matches_reference() {
        let lab = lab_222();
        for &theta in lab.generic.iter().take(2).chain(lab.nongeneric.iter().take(2)) {
            let chi = theta_tilde(&lab.tc, theta);
            let fast = induce(&lab.group, &lab.tu, &chi);
            let slow = induce_naive(&lab.group, &lab.tu, &chi);
            for (a, b) in fast.class_values().iter().zip(slow.class_values()) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn frobenius_reciprocity() {
        let lab = lab_222();
        let theta = lab.generic[0];
        let eta = lab.generic[1];
        let chi = theta_tilde(&lab.tc, theta);
        let ind_eta = induce(&lab.group, &lab.tu, &theta_tilde(&lab.tc, eta));
        let lhs = inner_product(&induce(&lab.group, &lab.tu, &chi), &ind_eta);
        let rhs = restricted_inner_product(&lab.tu, &chi, &ind_eta);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn mackey_agrees_with_direct_pairing() {
        let lab = lab_222();
        let dc = double_cosets(&lab.group, &lab.tu, &lab.tu);
        let md = mackey_data(&lab.group, &dc, &lab.tu, &lab.tu);
        for &theta in lab.generic.iter().chain(lab.nongeneric.iter()) {
            let chi = theta_tilde(&lab.tc, theta);
            let ind = induce(&lab.group, &lab.tu, &chi);
            let direct = inner_product(&ind, &ind);
            let mackey = mackey_inner_product(&md, &chi, &chi);
            assert_eq!(direct, mackey, "theta {theta}");
        }
    }

    #[test]
    fn weyl_conjugate_characters_induce_the_same_representation() {
        let lab = lab_222();
        let weyl = lab.tc.torus().weyl_elements();
        let v = weyl.iter().find(|v| !v.is_identity()).unwrap();
        let theta = lab.generic[0];
        let theta_v = lab.tc.weyl_image(theta, v);
        let ind_a = induce(&lab.group, &lab.tu, &theta_tilde(&lab.tc, theta));
        let ind_b = induce(&lab.group, &lab.tu, &theta_tilde(&lab.tc, theta_v));
        assert_eq!(as_integer(&inner_product(&ind_a, &ind_b)).unwrap(), 1);
        // A generic character from a different orbit is orthogonal.
        let other = lab
            .generic
            .iter()
            .copied()
            .find(|&t| t != theta && t != theta_v)
            .unwrap();
        let ind_c = induce(&lab.group, &lab.tu, &theta_tilde(&lab.tc, other));
        let ip = inner_product(&ind_a, &ind_c);
        assert!(as_integer(&ip).unwrap() <= 1);
    }

    #[test]
    fn double_cosets_partition_the_group() {
        let lab = lab_222();
        let dc = double_cosets(&lab.group, &lab.tu, &lab.tu);
        assert_eq!(dc.sizes.iter().sum::<u64>(), lab.group.order());
        assert_eq!(dc.reps.len(), dc.sizes.len());
        // |TU \ G / TU| here: index is 2, so exactly 2 cosets.
        assert_eq!(dc.reps.len(), 2);
    }

    #[test]
    fn numeric_route_agrees_with_exact_route() {
        let lab = lab_222();
        for &theta in &lab.generic {
            let ind = induce(&lab.group, &lab.tu, &theta_tilde(&lab.tc, theta));
            let dual = dual_inner_product(&ind, &ind);
            assert!(dual.residual < NUMERIC_RESIDUAL_TOL, "residual {}", dual.residual);
            assert!((dual.exact.eval_complex().re - 1.0).abs() < EXACT_EVAL_TOL);
        }
    }

    #[test]
    fn irreducibility_tracks_general_position_here() {
        // Genericity is sufficient for norm 1, not necessary: at this
        // configuration the non-regular characters in general position are
        // still irreducible, and the two characters fixed by the Weyl
        // involution have norm 2.
        let lab = lab_222();
        assert_eq!(lab.nongeneric.len(), 6);
        let g1 = GroupSpec::coxeter(2, 1, 2, 1).unwrap();
        let level = LevelData::new(lab.group.clone()).unwrap();
        let norm_sets = lab.tc.torus().root_norm_indices(1).unwrap();
        let weyl = lab.tc.torus().weyl_elements();
        let mut norms = Vec::new();
        for &theta in &lab.nongeneric {
            let rep = genericity_report(&lab.tc, &level, &g1, &norm_sets, &weyl, theta).unwrap();
            let ind = induce(&lab.group, &lab.tu, &theta_tilde(&lab.tc, theta));
            let norm = as_integer(&inner_product(&ind, &ind)).unwrap();
            assert_eq!(norm == 1, rep.general_position, "theta {theta}");
            norms.push(norm);
        }
        norms.sort_unstable();
        assert_eq!(norms, vec![1, 1, 1, 1, 2, 2]);
    }

    #[test]
    fn subgroup_generators_close() {
        let lab = lab_222();
        let gens = lab.tu.generators(&lab.group);
        assert!(gens.len() <= 8);
        // Closure check is internal to generators(); just assert nonempty.
        assert!(!gens.is_empty());
    }

    #[test]
    fn induction_from_the_whole_group_is_identity() {
        let lab = lab_222();
        let whole = Subgroup::from_keys(lab.group.elements().to_vec());
        let ind = induce(&lab.group, &whole, &|_| CycloValue::one());
        for v in ind.class_values() {
            assert_eq!(v.as_rational(), Some(Ratio::new(1, 1)));
        }
    }
}
