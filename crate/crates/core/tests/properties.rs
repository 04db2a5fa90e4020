//! Randomized law checks for the arithmetic and group layers.
//!
//! The cheap layers (field, truncated ring, cyclotomic values) get proptest
//! coverage over small parameter pools; the enumerated structures are built
//! once and sampled with a seeded generator so failures replay exactly.

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use glor::{
    closed_form_order, CycloValue, Fe, FieldSpec, GroupSpec, RingSpec, TorusChars, TorusTable,
};

/// (p, m, d) pools small enough that rebuilding the tower per case is free.
fn field_pool() -> impl Strategy<Value = (u32, u32, u32)> {
    prop_oneof![
        Just((2, 1, 1)),
        Just((3, 1, 1)),
        Just((2, 2, 1)),
        Just((2, 1, 2)),
        Just((5, 1, 1)),
        Just((3, 1, 2)),
    ]
}

fn ring_pool() -> impl Strategy<Value = (u32, u32, u32)> {
    prop_oneof![Just((2, 1, 2)), Just((3, 1, 2)), Just((2, 2, 2)), Just((2, 1, 4))]
}

proptest! {
    #[test]
    fn field_operations_satisfy_the_field_axioms(
        cfg in field_pool(),
        raw in prop::array::uniform3(any::<u32>()),
    ) {
        let (p, m, d) = cfg;
        let f = FieldSpec::build(p, m, d).unwrap();
        let [a, b, c] = raw.map(|x| Fe(x % f.size()));

        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Fe(0));
        prop_assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
        if a != Fe(0) {
            let ai = f.inv(a).unwrap();
            prop_assert_eq!(f.mul(a, ai), Fe(1));
        }
    }

    #[test]
    fn frobenius_is_a_field_automorphism(
        cfg in field_pool(),
        raw in prop::array::uniform2(any::<u32>()),
        k in 0u32..4,
    ) {
        let (p, m, d) = cfg;
        let f = FieldSpec::build(p, m, d).unwrap();
        let [a, b] = raw.map(|x| Fe(x % f.size()));

        prop_assert_eq!(f.frobenius(f.add(a, b), k), f.add(f.frobenius(a, k), f.frobenius(b, k)));
        prop_assert_eq!(f.frobenius(f.mul(a, b), k), f.mul(f.frobenius(a, k), f.frobenius(b, k)));
        // The q-power map generates Gal(F_{q^d} / F_q), so d steps close the loop.
        prop_assert_eq!(f.frobenius(a, d), a);
        prop_assert_eq!(f.frobenius_p(a, m), f.frobenius(a, 1));
    }

    #[test]
    fn truncated_ring_operations_satisfy_the_ring_axioms(
        cfg in ring_pool(),
        raw in prop::array::uniform3(prop::collection::vec(any::<u32>(), 4)),
    ) {
        let (p, m, r) = cfg;
        let ring = RingSpec::new(FieldSpec::build(p, m, 1).unwrap(), r).unwrap();
        let size = ring.field().size();
        let elem = |codes: &[u32]| {
            (0..r).fold(ring.zero(), |acc, k| {
                ring.add(acc, ring.monomial(Fe(codes[k as usize] % size), k))
            })
        };
        let (a, b, c) = (elem(&raw[0]), elem(&raw[1]), elem(&raw[2]));

        prop_assert_eq!(ring.add(a, b), ring.add(b, a));
        prop_assert_eq!(ring.mul(a, b), ring.mul(b, a));
        prop_assert_eq!(ring.add(ring.add(a, b), c), ring.add(a, ring.add(b, c)));
        prop_assert_eq!(ring.mul(ring.mul(a, b), c), ring.mul(a, ring.mul(b, c)));
        prop_assert_eq!(ring.mul(a, ring.add(b, c)), ring.add(ring.mul(a, b), ring.mul(a, c)));
        prop_assert_eq!(ring.add(a, ring.neg(a)), ring.zero());
        prop_assert_eq!(ring.mul(a, ring.one()), a);

        // pi is nilpotent of index exactly r.
        prop_assert_eq!(ring.mul(ring.pi_pow(r - 1), ring.pi_pow(1)), ring.zero());
        prop_assert_eq!(ring.is_unit(a), ring.residue(a) != Fe(0));
        if ring.is_unit(a) {
            let ai = ring.inv(a).unwrap();
            prop_assert_eq!(ring.mul(a, ai), ring.one());
        }
    }

    #[test]
    fn cyclotomic_values_obey_commutative_ring_laws(
        ms in prop::array::uniform3(1u32..12),
        es in prop::array::uniform3(any::<u32>()),
        k in -3i128..4,
    ) {
        let vals: Vec<CycloValue> = ms
            .iter()
            .zip(es.iter())
            .map(|(&m, &e)| CycloValue::root(m, e % m))
            .collect();
        let (x, y, z) = (&vals[0], &vals[1], &vals[2]);
        let kv = CycloValue::from_int(k);

        prop_assert!(x.add(y).sub(&y.add(x)).is_zero());
        prop_assert!(x.mul(y).sub(&y.mul(x)).is_zero());
        prop_assert!(x.add(&y.add(z)).sub(&x.add(y).add(z)).is_zero());
        prop_assert!(x.mul(&y.mul(z)).sub(&x.mul(y).mul(z)).is_zero());
        prop_assert!(x.mul(&y.add(z)).sub(&x.mul(y).add(&x.mul(z))).is_zero());
        prop_assert!(x.mul(&kv).sub(&x.scale(k, 1)).is_zero());
        prop_assert!(x.conj().mul(&y.conj()).sub(&x.mul(y).conj()).is_zero());
        // Roots of unity lie on the unit circle: conj is the inverse.
        prop_assert!(x.mul(&x.conj()).sub(&CycloValue::one()).is_zero());
    }

    #[test]
    fn numeric_evaluation_is_a_ring_homomorphism(
        ms in prop::array::uniform2(1u32..12),
        es in prop::array::uniform2(any::<u32>()),
    ) {
        let x = CycloValue::root(ms[0], es[0] % ms[0]);
        let y = CycloValue::root(ms[1], es[1] % ms[1]);

        let sum = (x.eval_complex() + y.eval_complex() - x.add(&y).eval_complex()).norm();
        let prod = (x.eval_complex() * y.eval_complex() - x.mul(&y).eval_complex()).norm();
        prop_assert!(sum < 1e-9, "additive defect {}", sum);
        prop_assert!(prod < 1e-9, "multiplicative defect {}", prod);
    }

    #[test]
    fn roots_of_unity_have_the_stated_order(m in 1u32..10, e in any::<u32>()) {
        let x = CycloValue::root(m, e % m);
        let mut acc = CycloValue::one();
        for _ in 0..m {
            acc = acc.mul(&x);
        }
        prop_assert!(acc.sub(&CycloValue::one()).is_zero());
    }
}

fn coxeter_222() -> &'static Arc<GroupSpec> {
    static G: OnceLock<Arc<GroupSpec>> = OnceLock::new();
    G.get_or_init(|| GroupSpec::coxeter(2, 1, 2, 2).unwrap())
}

#[test]
fn sampled_group_elements_satisfy_the_group_axioms() {
    let g = coxeter_222();
    assert_eq!(g.order() as u128, closed_form_order(2, 2, 2));
    let keys = g.elements();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..300 {
        let a = keys[rng.gen_range(0..keys.len())];
        let b = keys[rng.gen_range(0..keys.len())];
        let c = keys[rng.gen_range(0..keys.len())];
        let ab = g.mul_keys(a, b);
        assert!(g.index_of(ab).is_some(), "product left the fixed set");
        assert!(g.is_fixed(&g.decode(ab)));
        assert_eq!(g.mul_keys(ab, c), g.mul_keys(a, g.mul_keys(b, c)));
        assert_eq!(g.mul_keys(a, g.inv_key(a)), g.id_key());
        assert_eq!(g.mul_keys(g.id_key(), a), a);
    }
}

#[test]
fn sampled_torus_characters_are_homomorphisms() {
    for (p, expected_order) in [(2u32, 12u64), (3, 72)] {
        let group = GroupSpec::coxeter(p, 1, 2, 2).unwrap();
        let torus = Arc::new(TorusTable::build(group));
        assert_eq!(torus.order(), expected_order);
        let tc = TorusChars::build(Arc::clone(&torus));
        assert_eq!(tc.count(), torus.order());

        let mut rng = ChaCha8Rng::seed_from_u64(7 + p as u64);
        let order = torus.order() as u32;
        for _ in 0..150 {
            let theta = rng.gen_range(0..order);
            let x = rng.gen_range(0..order);
            let y = rng.gen_range(0..order);
            let lhs = tc.value(theta, torus.mul_indices(x, y));
            let rhs = tc.value(theta, x).mul(&tc.value(theta, y));
            assert!(lhs.sub(&rhs).is_zero(), "theta {} fails at ({}, {})", theta, x, y);
            let at_inv = tc.value(theta, torus.inv_index(x));
            assert!(at_inv.sub(&tc.value(theta, x).conj()).is_zero());
        }
        for theta in 0..order {
            assert!(tc
                .value(theta, torus.identity_index())
                .sub(&CycloValue::one())
                .is_zero());
        }
    }
}

#[test]
fn weyl_action_permutes_torus_indices() {
    let torus = Arc::new(TorusTable::build(Arc::clone(coxeter_222())));
    let order = torus.order() as u32;
    for v in torus.weyl_elements() {
        let mut seen = vec![false; order as usize];
        for idx in 0..order {
            let image = torus.permuted_index(&v, idx);
            assert!(!seen[image as usize], "weyl image collides");
            seen[image as usize] = true;
        }
        // The action respects multiplication, so it is a group automorphism.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let x = rng.gen_range(0..order);
            let y = rng.gen_range(0..order);
            assert_eq!(
                torus.permuted_index(&v, torus.mul_indices(x, y)),
                torus.mul_indices(torus.permuted_index(&v, x), torus.permuted_index(&v, y))
            );
        }
    }
}

#[test]
fn congruence_kernel_is_a_normal_abelian_subgroup_here() {
    let g = coxeter_222();
    let kernel = g.level_kernel_keys(1);
    assert_eq!(kernel.len(), 16);
    let inside = |k: u64| kernel.binary_search(&k).is_ok();

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let a = kernel[rng.gen_range(0..kernel.len())];
        let b = kernel[rng.gen_range(0..kernel.len())];
        assert!(inside(g.mul_keys(a, b)));
        assert_eq!(g.mul_keys(a, b), g.mul_keys(b, a), "kernel not abelian");
        let h = g.elements()[rng.gen_range(0..g.elements().len())];
        let conj = g.mul_keys(g.mul_keys(h, a), g.inv_key(h));
        assert!(inside(conj), "kernel not normal");
    }
}
