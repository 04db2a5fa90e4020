//! Characters of the fixed torus and their genericity.
//!
//! The torus is a finite abelian group; its dual is computed by extracting
//! an invariant-factor generator chain (largest-order element, quotient,
//! lift), after which every character is a label and values are exact roots
//! of unity. On top of this sit the three genericity ingredients: regularity
//! against root norm images, general position under the relative Weyl group,
//! and the centralizer condition for the half-level parameter beta carved
//! out of the character by the trace pairing.

use crate::cyclo::CycloValue;
use crate::error::{LabError, Result};
use crate::fieldtower::Fe;
use crate::perm::Perm;
use crate::torus::TorusTable;
use crate::truncring::RT_ZERO;
use crate::twistgroup::{GroupSpec, Mat};
use std::collections::BTreeSet;
use std::collections::HashMap;
use std::sync::Arc;

/// Invariant-factor presentation of a finite abelian group on indices
/// 0..order, with coordinates for every element.
pub struct AbelianDual {
    /// Generator element indices; orders descend along divisibility.
    pub gens: Vec<u32>,
    pub orders: Vec<u64>,
    /// coords[x][i] is the exponent of gens[i] in x.
    pub coords: Vec<Vec<u32>>,
}

impl AbelianDual {
    /// `mul` must be a commutative group operation on 0..order with the
    /// given identity.
    pub fn build(order: u32, id: u32, mul: &dyn Fn(u32, u32) -> u32) -> AbelianDual {
        let elems: Vec<u32> = (0..order).collect();
        let gens_orders = gens_rec(&elems, id, mul);
        let gens: Vec<u32> = gens_orders.iter().map(|&(g, _)| g).collect();
        let orders: Vec<u64> = gens_orders.iter().map(|&(_, o)| o).collect();
        for w in orders.windows(2) {
            assert_eq!(w[0] % w[1], 0, "invariant factors divide");
        }
        let total: u64 = orders.iter().product();
        assert_eq!(total, order as u64, "generators span");

        // Fill coordinates by walking the exponent odometer.
        let mut coords: Vec<Option<Vec<u32>>> = vec![None; order as usize];
        let mut tuple = vec![0u32; gens.len()];
        let mut elem = id;
        // Partial products to roll back on carries: recompute directly.
        loop {
            assert!(coords[elem as usize].is_none(), "duplicate element in span");
            coords[elem as usize] = Some(tuple.clone());
            // Increment odometer, last coordinate fastest.
            let mut k = gens.len();
            loop {
                if k == 0 {
                    let coords: Vec<Vec<u32>> =
                        coords.into_iter().map(|c| c.expect("span covers group")).collect();
                    return AbelianDual { gens, orders, coords };
                }
                k -= 1;
                tuple[k] += 1;
                if (tuple[k] as u64) < orders[k] {
                    break;
                }
                tuple[k] = 0;
            }
            elem = id;
            for (i, &g) in gens.iter().enumerate() {
                for _ in 0..tuple[i] {
                    elem = mul(elem, g);
                }
            }
        }
    }
}

fn order_of(x: u32, id: u32, mul: &dyn Fn(u32, u32) -> u32) -> u64 {
    let mut o = 1u64;
    let mut cur = x;
    while cur != id {
        cur = mul(cur, x);
        o += 1;
    }
    o
}

/// Generator chain: largest-order element first, then generators of the
/// quotient by it, lifted to representatives of the same order.
fn gens_rec(elems: &[u32], id: u32, mul: &dyn Fn(u32, u32) -> u32) -> Vec<(u32, u64)> {
    if elems.len() <= 1 {
        return Vec::new();
    }
    let mut g1 = id;
    let mut o1 = 1u64;
    for &x in elems {
        let o = order_of(x, id, mul);
        if o > o1 {
            g1 = x;
            o1 = o;
        }
    }
    // Cosets of <g1>, labeled by their smallest member.
    let mut label: HashMap<u32, u32> = HashMap::new();
    for &x in elems {
        if label.contains_key(&x) {
            continue;
        }
        let mut members = Vec::new();
        let mut cur = x;
        loop {
            members.push(cur);
            cur = mul(cur, g1);
            if cur == x {
                break;
            }
        }
        let lab = *members.iter().min().unwrap();
        for m in members {
            label.insert(m, lab);
        }
    }
    let q_elems: Vec<u32> = label.values().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let q_id = label[&id];
    let q_mul = |a: u32, b: u32| label[&mul(a, b)];
    let sub = gens_rec(&q_elems, q_id, &q_mul);

    let mut out = vec![(g1, o1)];
    for (y_bar, t) in sub {
        // y_bar^t lands in <g1>, say g1^e with t | e; shift by g1^(-e/t).
        let mut yt = id;
        for _ in 0..t {
            yt = mul(yt, y_bar);
        }
        let mut e = 0u64;
        let mut cur = id;
        while cur != yt {
            cur = mul(cur, g1);
            e += 1;
            assert!(e <= o1, "power of quotient generator lies in the cyclic part");
        }
        assert_eq!(e % t, 0, "lift divisibility");
        let shift = (o1 - e / t) % o1;
        let mut y = y_bar;
        let mut gpow = id;
        for _ in 0..shift {
            gpow = mul(gpow, g1);
        }
        y = mul(y, gpow);
        debug_assert_eq!(order_of(y, id, mul), t);
        out.push((y, t));
    }
    out
}

/// The character table of the fixed torus, by labels.
pub struct TorusChars {
    torus: Arc<TorusTable>,
    dual: AbelianDual,
    exponent: u64,
    strides: Vec<u64>,
}

impl TorusChars {
    pub fn build(torus: Arc<TorusTable>) -> TorusChars {
        let order = torus.order() as u32;
        let id = torus.identity_index();
        let t = torus.clone();
        let dual = AbelianDual::build(order, id, &move |a, b| t.mul_indices(a, b));
        let exponent = dual.orders.first().copied().unwrap_or(1);
        let mut strides = vec![1u64; dual.orders.len()];
        for i in (0..dual.orders.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dual.orders[i + 1];
        }
        TorusChars { torus, dual, exponent, strides }
    }

    pub fn torus(&self) -> &Arc<TorusTable> {
        &self.torus
    }
    /// Number of characters; equals the torus order.
    pub fn count(&self) -> u64 {
        self.torus.order()
    }
    /// Exponent of the torus: the order of values as roots of unity.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }
    pub fn invariant_factors(&self) -> &[u64] {
        &self.dual.orders
    }

    fn theta_coord(&self, theta: u32, i: usize) -> u64 {
        (theta as u64 / self.strides[i]) % self.dual.orders[i]
    }

    /// Exponent e with value zeta_exponent^e at the point.
    pub fn value_exponent(&self, theta: u32, point: u32) -> u64 {
        let o1 = self.exponent;
        let mut e = 0u64;
        for i in 0..self.dual.orders.len() {
            let ti = self.theta_coord(theta, i);
            let xi = self.dual.coords[point as usize][i] as u64;
            e = (e + ti * xi % self.dual.orders[i] * (o1 / self.dual.orders[i])) % o1;
        }
        e
    }

    pub fn value(&self, theta: u32, point: u32) -> CycloValue {
        CycloValue::root(self.exponent as u32, self.value_exponent(theta, point) as u32)
    }

    /// Label of theta composed with the permutation action of v on points.
    pub fn weyl_image(&self, theta: u32, v: &Perm) -> u32 {
        let o1 = self.exponent;
        let mut out = 0u64;
        for i in 0..self.dual.gens.len() {
            let moved = self.torus.permuted_index(v, self.dual.gens[i]);
            let e = self.value_exponent(theta, moved);
            let step = o1 / self.dual.orders[i];
            assert_eq!(e % step, 0, "image of a generator stays a character");
            out += (e / step) % self.dual.orders[i] * self.strides[i];
        }
        debug_assert!({
            let t = (out as usize * 7919 + 1) % self.count() as usize;
            self.value_exponent(out as u32, t as u32)
                == self.value_exponent(theta, self.torus.permuted_index(v, t as u32))
        });
        out as u32
    }

    /// No nontrivial relative Weyl element fixes the character.
    pub fn is_general_position(&self, theta: u32, weyl: &[Perm]) -> bool {
        weyl.iter().filter(|v| !v.is_identity()).all(|v| self.weyl_image(theta, v) != theta)
    }

    /// Nontrivial on the norm image of every root subgroup.
    pub fn is_regular(&self, theta: u32, norm_sets: &[((usize, usize), BTreeSet<u32>)]) -> bool {
        norm_sets
            .iter()
            .all(|(_, set)| set.iter().any(|&pt| self.value_exponent(theta, pt) != 0))
    }

    /// Value of the extension of theta to the congruence-diagonal subgroup:
    /// theta read off the matrix diagonal. The key must name an element
    /// whose diagonal is a torus point (true on that subgroup).
    pub fn extended_value(&self, theta: u32, key: u64) -> Result<CycloValue> {
        let group = self.torus.group();
        let g = group.decode(key);
        let n = group.n();
        let mut diag = vec![RT_ZERO; n * n];
        for i in 0..n {
            let e = g[i * n + i];
            if !group.ring().is_unit(e) {
                return Err(LabError::NotInSubgroup("matrix diagonal is not invertible"));
            }
            diag[i * n + i] = e;
        }
        let idx = self
            .torus
            .index_of_key(group.encode(&diag))
            .ok_or(LabError::NotInSubgroup("diagonal is not a fixed torus point"))?;
        Ok(self.value(theta, idx))
    }
}

/// Half-level data of an even-level group: the shift to the Lie model and
/// the trace pairing behind the additive characters.
pub struct LevelData {
    group: Arc<GroupSpec>,
    l: u32,
}

impl LevelData {
    pub fn new(group: Arc<GroupSpec>) -> Result<LevelData> {
        let r = group.r();
        if r % 2 != 0 {
            return Err(LabError::OddLevel { r });
        }
        // The middle-field trace is onto F_p, so the additive character
        // separates the top filtration layer.
        let field = group.field();
        assert!(
            field
                .fixed_subfield_elems(1)
                .iter()
                .any(|&c| field.trace_middle_to_fp(c) != 0),
            "trace form is nontrivial"
        );
        Ok(LevelData { group, l: r / 2 })
    }

    pub fn l(&self) -> u32 {
        self.l
    }
    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }

    /// X with g = 1 + pi^l X; coordinates of X sit below level l.
    pub fn shift_down(&self, g: &Mat) -> Mat {
        let ring = self.group.ring();
        let n = self.group.n();
        let l = self.l as usize;
        let r = ring.r() as usize;
        let mut out = vec![RT_ZERO; n * n];
        for (pos, &e) in g.iter().enumerate() {
            let mut x = e;
            if pos / n == pos % n {
                x = ring.sub(x, ring.one());
            }
            debug_assert!(ring.val(x) >= self.l, "element is congruent to 1 at level l");
            let mut shifted = RT_ZERO;
            for k in l..r {
                shifted[k - l] = x[k];
            }
            out[pos] = shifted;
        }
        out
    }

    /// Exponent in Z/p of the pairing: the prime-field trace of the top
    /// coefficient of the matrix trace of a*b.
    pub fn pairing_exponent(&self, a: &Mat, b: &Mat) -> u32 {
        let ring = self.group.ring();
        let field = self.group.field();
        let n = self.group.n();
        let mut tr = ring.zero();
        for i in 0..n {
            for k in 0..n {
                tr = ring.add(tr, ring.mul(a[i * n + k], b[k * n + i]));
            }
        }
        let c = ring.coeff(tr, self.l - 1);
        debug_assert_eq!(field.frobenius(c, 1), c, "matrix trace lands in the middle field");
        field.trace_middle_to_fp(c)
    }

    /// The additive character attached to beta, on a key of the level-l
    /// congruence kernel.
    pub fn psi_value(&self, beta: &Mat, key: u64) -> CycloValue {
        let x = self.shift_down(&self.group.decode(key));
        let e = self.pairing_exponent(beta, &x);
        CycloValue::root(self.group.field().p(), e)
    }

    /// The diagonal parameter beta with theta(1 + pi^l s) = psi(<beta, s>)
    /// for every half-level diagonal s: solve the trace pairing against a
    /// basis of the fixed diagonal Lie algebra.
    pub fn extract_beta(&self, tc: &TorusChars, theta: u32) -> Result<Mat> {
        let torus = tc.torus();
        let ring = self.group.ring();
        let field = self.group.field();
        let p = field.p();
        let n = self.group.n();
        let l = self.l;
        let o1 = tc.exponent();

        // Basis: per cycle, per pi-power below l, per prime-field basis
        // element of the cycle subfield.
        let mut deltas: Vec<Mat> = Vec::new();
        let mut points: Vec<u32> = Vec::new();
        let cycles = torus.cycles().to_vec();
        for (c, cyc) in cycles.iter().enumerate() {
            let fp_basis = field.subfield_fp_basis(cyc.len() as u32);
            for k in 0..l {
                for &b in &fp_basis {
                    let mut delta = vec![RT_ZERO; n * n];
                    for (step, &i) in cyc.iter().enumerate() {
                        delta[i * n + i] = ring.frobenius(ring.monomial(b, k), step as u32);
                    }
                    deltas.push(delta);
                    let mut factors = vec![ring.one(); cycles.len()];
                    factors[c] = ring.add(ring.one(), ring.monomial(b, l + k));
                    points.push(torus.index_from_factors(&factors));
                }
            }
        }

        // Right-hand side: theta's values on the basis points are p-th
        // roots; read their Z/p exponents.
        let mut rhs = Vec::with_capacity(points.len());
        for &pt in &points {
            let e = tc.value_exponent(theta, pt);
            let num = e * p as u64;
            assert_eq!(num % o1, 0, "restriction to the congruence kernel has exponent p");
            rhs.push(((num / o1) % p as u64) as u32);
        }

        // Gram matrix of the pairing on the basis.
        let dim = deltas.len();
        let mut gram = vec![vec![0u32; dim]; dim];
        for v in 0..dim {
            for u in 0..dim {
                gram[v][u] = self.pairing_exponent(&deltas[u], &deltas[v]);
            }
        }
        let x = solve_mod_p(gram, rhs, p)?;

        let mut beta = vec![RT_ZERO; n * n];
        for (u, delta) in deltas.iter().enumerate() {
            if x[u] == 0 {
                continue;
            }
            for (pos, &e) in delta.iter().enumerate() {
                beta[pos] = ring.add(beta[pos], ring.scale(Fe(x[u]), e));
            }
        }
        debug_assert!(self.group.is_fixed(&beta));
        // The defining identity on every basis point.
        debug_assert!((0..dim).all(|u| {
            let e = tc.value_exponent(theta, points[u]);
            let rhs_u = ((e * p as u64 / o1) % p as u64) as u32;
            self.pairing_exponent(&beta, &deltas[u]) == rhs_u
        }));
        Ok(beta)
    }
}

/// Unique solution of a linear system over F_p; the matrix must be
/// invertible, which is asserted (the pairing is perfect).
fn solve_mod_p(mut a: Vec<Vec<u32>>, mut b: Vec<u32>, p: u32) -> Result<Vec<u32>> {
    let dim = b.len();
    let inv = |x: u32| -> u32 {
        // Fermat inverse, p prime.
        let mut r = 1u64;
        let mut base = x as u64 % p as u64;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p as u64;
            }
            base = base * base % p as u64;
            e >>= 1;
        }
        r as u32
    };
    for col in 0..dim {
        let piv = (col..dim)
            .find(|&row| a[row][col] % p != 0)
            .ok_or(LabError::Singular)?;
        a.swap(col, piv);
        b.swap(col, piv);
        let f = inv(a[col][col]);
        for x in a[col].iter_mut() {
            *x = *x * f % p;
        }
        b[col] = b[col] * f % p;
        for row in 0..dim {
            if row == col || a[row][col] == 0 {
                continue;
            }
            let c = a[row][col];
            for j in 0..dim {
                a[row][j] = (a[row][j] + (p - c) * a[col][j]) % p;
            }
            b[row] = (b[row] + (p - c) * b[col]) % p;
        }
    }
    Ok(b)
}

/// The three genericity ingredients of a torus character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct GenericityReport {
    pub theta: u32,
    pub regular: bool,
    pub general_position: bool,
    pub stabilizer: bool,
}

impl GenericityReport {
    pub fn is_generic(&self) -> bool {
        self.regular && self.general_position && self.stabilizer
    }
}

/// Order of the fixed torus at truncation level l, from the cycle type.
pub fn torus_order_at_level(q: u64, cycle_lens: &[usize], l: u32) -> u64 {
    cycle_lens
        .iter()
        .map(|&len| (q.pow(len as u32) - 1) * q.pow(len as u32 * (l - 1)))
        .product()
}

/// Evaluate all three genericity conditions for one character.
pub fn genericity_report(
    tc: &TorusChars,
    level: &LevelData,
    group_l: &Arc<GroupSpec>,
    norm_sets: &[((usize, usize), BTreeSet<u32>)],
    weyl: &[Perm],
    theta: u32,
) -> Result<GenericityReport> {
    let regular = tc.is_regular(theta, norm_sets);
    let general_position = tc.is_general_position(theta, weyl);
    let beta = level.extract_beta(tc, theta)?;
    // beta has coordinates below l, so it is a level-l matrix as is.
    let centralizer = group_l
        .elements()
        .iter()
        .filter(|&&k| {
            let m = group_l.decode(k);
            group_l.mat_mul(&m, &beta) == group_l.mat_mul(&beta, &m)
        })
        .count() as u64;
    let lens: Vec<usize> = tc.torus().cycles().iter().map(|c| c.len()).collect();
    let t_l = torus_order_at_level(group_l.q(), &lens, level.l());
    assert!(centralizer >= t_l, "torus centralizes its own parameter");
    Ok(GenericityReport { theta, regular, general_position, stabilizer: centralizer == t_l })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::TorusTable;

    fn chars_for(p: u32, n: usize, r: u32) -> (TorusChars, Arc<GroupSpec>) {
        let g = GroupSpec::coxeter(p, 1, n, r).unwrap();
        (TorusChars::build(Arc::new(TorusTable::build(g.clone()))), g)
    }

    #[test]
    fn abelian_dual_of_cyclic_and_product_groups() {
        // Z/6 additively.
        let d = AbelianDual::build(6, 0, &|a, b| (a + b) % 6);
        assert_eq!(d.orders, vec![6]);
        // Z/2 x Z/4 as pairs (a, b) coded a*4 + b.
        let mul = |x: u32, y: u32| {
            let (xa, xb) = (x / 4, x % 4);
            let (ya, yb) = (y / 4, y % 4);
            ((xa + ya) % 2) * 4 + (xb + yb) % 4
        };
        let d = AbelianDual::build(8, 0, &mul);
        assert_eq!(d.orders, vec![4, 2]);
        // Klein four group.
        let d = AbelianDual::build(4, 0, &|a, b| a ^ b);
        assert_eq!(d.orders, vec![2, 2]);
    }

    #[test]
    fn torus_invariant_factors_and_exponent() {
        let (tc, _) = chars_for(2, 2, 2);
        assert_eq!(tc.count(), 12);
        assert_eq!(tc.invariant_factors(), &[6, 2]);
        assert_eq!(tc.exponent(), 6);
    }

    #[test]
    fn characters_are_homomorphisms() {
        let (tc, _) = chars_for(2, 2, 2);
        let t = tc.torus().clone();
        for theta in 0..tc.count() as u32 {
            for a in 0..t.order() as u32 {
                for b in 0..t.order() as u32 {
                    let lhs = tc.value(theta, t.mul_indices(a, b));
                    let rhs = tc.value(theta, a).mul(&tc.value(theta, b));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn character_orthogonality() {
        let (tc, _) = chars_for(2, 2, 2);
        let t = tc.torus().clone();
        for theta in [0u32, 1, 5, 11] {
            for eta in [0u32, 1, 5, 11] {
                let mut s = CycloValue::zero();
                for x in 0..t.order() as u32 {
                    s = s.add(&tc.value(theta, x).mul(&tc.value(eta, x).conj()));
                }
                if theta == eta {
                    assert_eq!(s.as_rational(), Some(num::rational::Ratio::new(12, 1)));
                } else {
                    assert!(s.is_zero(), "distinct characters are orthogonal");
                }
            }
        }
    }

    #[test]
    fn weyl_action_permutes_characters() {
        let (tc, _) = chars_for(2, 2, 2);
        let weyl = tc.torus().weyl_elements();
        assert_eq!(weyl.len(), 2);
        let v = weyl.iter().find(|v| !v.is_identity()).unwrap();
        let mut image: Vec<u32> = (0..tc.count() as u32).map(|t| tc.weyl_image(t, v)).collect();
        // An involution acting on labels: applying twice is the identity.
        for theta in 0..tc.count() as u32 {
            assert_eq!(tc.weyl_image(image[theta as usize], v), theta);
        }
        image.sort_unstable();
        assert_eq!(image, (0..tc.count() as u32).collect::<Vec<_>>());
    }

    #[test]
    fn genericity_counts_for_rank_two() {
        let (tc, g) = chars_for(2, 2, 2);
        let level = LevelData::new(g.clone()).unwrap();
        let g1 = GroupSpec::coxeter(2, 1, 2, 1).unwrap();
        let norm = tc.torus().root_norm_indices(1).unwrap();
        let weyl = tc.torus().weyl_elements();
        let mut reports = Vec::new();
        for theta in 0..tc.count() as u32 {
            reports.push(genericity_report(&tc, &level, &g1, &norm, &weyl, theta).unwrap());
        }
        let regular: Vec<u32> = reports.iter().filter(|r| r.regular).map(|r| r.theta).collect();
        let stab: Vec<u32> = reports.iter().filter(|r| r.stabilizer).map(|r| r.theta).collect();
        let gp: Vec<u32> = reports.iter().filter(|r| r.general_position).map(|r| r.theta).collect();
        assert_eq!(regular.len(), 6);
        assert_eq!(regular, stab, "regularity matches the centralizer condition");
        for t in &regular {
            assert!(gp.contains(t), "regular implies general position here");
        }
        assert_eq!(reports.iter().filter(|r| r.is_generic()).count(), 6);
    }

    #[test]
    fn beta_identity_on_the_congruence_kernel() {
        for (p, n) in [(2u32, 2usize), (3, 2)] {
            let (tc, g) = chars_for(p, n, 2);
            let level = LevelData::new(g.clone()).unwrap();
            let kernel = g.level_kernel_keys(1);
            for theta in 0..tc.count() as u32 {
                let beta = level.extract_beta(&tc, theta).unwrap();
                for &k in &kernel {
                    let lhs = tc.extended_value(theta, k).unwrap();
                    let rhs = level.psi_value(&beta, k);
                    assert_eq!(lhs, rhs, "theta extension equals psi_beta at p={p}");
                }
            }
        }
    }

    #[test]
    fn extended_value_is_multiplicative_on_the_congruence_diagonal() {
        let (tc, g) = chars_for(2, 2, 2);
        let tu = g.tu_keys(1);
        assert_eq!(tu.len(), 48);
        for (i, &a) in tu.iter().enumerate().step_by(3) {
            let b = tu[(i * 7 + 11) % tu.len()];
            let prod = g.mul_keys(a, b);
            for theta in [1u32, 5, 7] {
                let lhs = tc.extended_value(theta, prod).unwrap();
                let rhs = tc.extended_value(theta, a).unwrap().mul(&tc.extended_value(theta, b).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn psi_separates_the_kernel() {
        // The pairing is perfect: distinct betas give distinct additive
        // characters, and psi_0 alone is trivial.
        let (tc, g) = chars_for(2, 2, 2);
        let level = LevelData::new(g.clone()).unwrap();
        let kernel = g.level_kernel_keys(1);
        let mut betas = Vec::new();
        for theta in 0..tc.count() as u32 {
            betas.push(level.extract_beta(&tc, theta).unwrap());
        }
        // The diagonal restriction of theta determines beta: count distinct.
        let mut value_vectors: Vec<Vec<u32>> = betas
            .iter()
            .map(|b| {
                kernel
                    .iter()
                    .map(|&k| {
                        let x = level.shift_down(&g.decode(k));
                        level.pairing_exponent(b, &x)
                    })
                    .collect()
            })
            .collect();
        value_vectors.sort();
        value_vectors.dedup();
        // theta restricted to T cap G^1 has q^n fibers of size |T|/q^n = 3.
        assert_eq!(value_vectors.len(), 4);
    }

    #[test]
    fn odd_level_is_rejected() {
        let g = GroupSpec::coxeter(2, 1, 2, 3).unwrap();
        assert!(matches!(LevelData::new(g), Err(LabError::OddLevel { r: 3 })));
    }
}
