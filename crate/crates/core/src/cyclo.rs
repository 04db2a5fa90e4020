//! Exact arithmetic in cyclotomic fields, with a parallel floating route.
//!
//! Character values live in Q(zeta_M). A value is either a bare root of
//! unity or a rational combination of the powers of one root; operations
//! lift operands to the least common order. Equality and rationality tests
//! go through the canonical representative modulo the cyclotomic polynomial,
//! so no floating point is involved on the exact route. The numeric route
//! evaluates the same expressions in complex doubles for cross-checking.

use num::complex::Complex64;
use num::integer::{gcd, lcm};
use num::rational::Ratio;
use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

/// An element of a cyclotomic field.
#[derive(Clone, Debug)]
pub enum CycloValue {
    /// zeta_m^exp.
    Root { m: u32, exp: u32 },
    /// (1/den) * sum_k num[k] * zeta_m^k, with num.len() == m.
    Sum { m: u32, num: Vec<i128>, den: i128 },
}

impl CycloValue {
    pub fn zero() -> Self {
        CycloValue::Sum { m: 1, num: vec![0], den: 1 }
    }

    pub fn one() -> Self {
        CycloValue::Root { m: 1, exp: 0 }
    }

    pub fn from_int(k: i128) -> Self {
        CycloValue::Sum { m: 1, num: vec![k], den: 1 }
    }

    pub fn from_ratio(num: i128, den: i128) -> Self {
        assert!(den != 0);
        CycloValue::Sum { m: 1, num: vec![num], den }.normalized()
    }

    /// zeta_m^exp.
    pub fn root(m: u32, exp: u32) -> Self {
        assert!(m >= 1);
        CycloValue::Root { m, exp: exp % m }
    }

    fn order(&self) -> u32 {
        match self {
            CycloValue::Root { m, .. } | CycloValue::Sum { m, .. } => *m,
        }
    }

    /// Coefficient vector of length `target` (m | target), uncanonicalized.
    fn lift(&self, target: u32) -> (Vec<i128>, i128) {
        let m = self.order();
        debug_assert_eq!(target % m, 0);
        let stride = (target / m) as usize;
        match self {
            CycloValue::Root { exp, .. } => {
                let mut num = vec![0i128; target as usize];
                num[*exp as usize * stride] = 1;
                (num, 1)
            }
            CycloValue::Sum { num, den, .. } => {
                let mut out = vec![0i128; target as usize];
                for (k, &c) in num.iter().enumerate() {
                    out[k * stride] = c;
                }
                (out, *den)
            }
        }
    }

    fn normalized(self) -> Self {
        match self {
            CycloValue::Root { .. } => self,
            CycloValue::Sum { m, mut num, mut den } => {
                if den < 0 {
                    den = -den;
                    num.iter_mut().for_each(|c| *c = -*c);
                }
                let mut g = den;
                for &c in &num {
                    g = gcd(g, c.abs());
                    if g == 1 {
                        break;
                    }
                }
                if g > 1 {
                    den /= g;
                    num.iter_mut().for_each(|c| *c /= g);
                }
                CycloValue::Sum { m, num, den }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let l = lcm(self.order(), other.order());
        let (mut a, da) = self.lift(l);
        let (b, db) = other.lift(l);
        let d = lcm(da, db);
        let (fa, fb) = (d / da, d / db);
        for (x, y) in a.iter_mut().zip(&b) {
            *x = *x * fa + *y * fb;
        }
        CycloValue::Sum { m: l, num: a, den: d }.normalized()
    }

    pub fn neg(&self) -> Self {
        match self {
            CycloValue::Root { m, exp } => {
                let mut num = vec![0i128; *m as usize];
                num[*exp as usize] = -1;
                CycloValue::Sum { m: *m, num, den: 1 }
            }
            CycloValue::Sum { m, num, den } => {
                CycloValue::Sum { m: *m, num: num.iter().map(|&c| -c).collect(), den: *den }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        // Roots multiply without leaving the basis.
        if let (CycloValue::Root { m: m1, exp: e1 }, CycloValue::Root { m: m2, exp: e2 }) = (self, other) {
            let l = lcm(*m1, *m2);
            let e = (*e1 as u64 * (l / m1) as u64 + *e2 as u64 * (l / m2) as u64) % l as u64;
            return CycloValue::Root { m: l, exp: e as u32 };
        }
        let l = lcm(self.order(), other.order());
        let (a, da) = self.lift(l);
        let (b, db) = other.lift(l);
        let mut num = vec![0i128; l as usize];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj == 0 {
                    continue;
                }
                let k = (i + j) % l as usize;
                num[k] += ai * bj;
            }
        }
        CycloValue::Sum { m: l, num, den: da * db }.normalized()
    }

    /// Complex conjugate: zeta -> zeta^(-1).
    pub fn conj(&self) -> Self {
        match self {
            CycloValue::Root { m, exp } => CycloValue::Root { m: *m, exp: (m - exp) % m },
            CycloValue::Sum { m, num, den } => {
                let mm = *m as usize;
                let mut out = vec![0i128; mm];
                for (k, &c) in num.iter().enumerate() {
                    out[(mm - k) % mm] += c;
                }
                CycloValue::Sum { m: *m, num: out, den: *den }
            }
        }
    }

    pub fn scale(&self, num: i128, den: i128) -> Self {
        self.mul(&CycloValue::from_ratio(num, den))
    }

    /// Canonical coefficients modulo the cyclotomic polynomial: a vector of
    /// length phi(m) over Q, unique for the value.
    fn canonical(&self) -> (u32, Vec<i128>, i128) {
        let m = self.order();
        let (mut num, den) = self.lift(m);
        let phi = cyclotomic_poly(m);
        let deg = phi.len() - 1;
        // Reduce mod the monic integer polynomial phi.
        for k in (deg..num.len()).rev() {
            let c = num[k];
            if c == 0 {
                continue;
            }
            num[k] = 0;
            for (j, &pj) in phi.iter().enumerate().take(deg) {
                num[k - deg + j] -= c * pj;
            }
        }
        num.truncate(deg);
        (m, num, den)
    }

    pub fn is_zero(&self) -> bool {
        let (_, num, _) = self.canonical();
        num.iter().all(|&c| c == 0)
    }

    /// The value as a rational number, when it is one.
    pub fn as_rational(&self) -> Option<Ratio<i128>> {
        let (_, num, den) = self.canonical();
        if num[1..].iter().all(|&c| c == 0) {
            Some(Ratio::new(num[0], den))
        } else {
            None
        }
    }

    pub fn eval_complex(&self) -> Complex64 {
        match self {
            CycloValue::Root { m, exp } => root_c64(*m, *exp),
            CycloValue::Sum { m, num, den } => {
                let terms: Vec<Complex64> = num
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(k, &c)| root_c64(*m, k as u32) * (c as f64))
                    .collect();
                pairwise_sum(&terms) / (*den as f64)
            }
        }
    }
}

impl PartialEq for CycloValue {
    fn eq(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }
}

fn root_c64(m: u32, exp: u32) -> Complex64 {
    let theta = 2.0 * std::f64::consts::PI * (exp as f64) / (m as f64);
    Complex64::new(theta.cos(), theta.sin())
}

fn pairwise_sum(terms: &[Complex64]) -> Complex64 {
    match terms.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => terms[0],
        n => {
            let (a, b) = terms.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// The m-th cyclotomic polynomial as integer coefficients, low first, monic.
/// Computed from x^m - 1 by dividing out the polynomials of proper divisors.
pub fn cyclotomic_poly(m: u32) -> Vec<i128> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<i128>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    let mut poly = vec![0i128; m as usize + 1];
    poly[0] = -1;
    poly[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            let phi_d = cyclotomic_poly(d);
            poly = exact_div(&poly, &phi_d);
        }
    }
    cache.lock().unwrap().insert(m, poly.clone());
    poly
}

/// Exact division of integer polynomials, divisor monic.
fn exact_div(a: &[i128], b: &[i128]) -> Vec<i128> {
    assert_eq!(*b.last().unwrap(), 1);
    let mut rem: Vec<i128> = a.to_vec();
    let qdeg = a.len() - b.len();
    let mut q = vec![0i128; qdeg + 1];
    for k in (0..=qdeg).rev() {
        let c = rem[k + b.len() - 1];
        q[k] = c;
        for (j, &bj) in b.iter().enumerate() {
            rem[k + j] -= c * bj;
        }
    }
    assert!(rem.iter().all(|&c| c == 0), "division not exact");
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys_match_tables() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        // First index with a coefficient outside {-1,0,1}.
        let c105 = cyclotomic_poly(105);
        assert!(c105.iter().any(|&c| c.abs() == 2));
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for m in 2..=12u32 {
            let mut s = CycloValue::zero();
            for e in 0..m {
                s = s.add(&CycloValue::root(m, e));
            }
            assert!(s.is_zero(), "sum of all {m}-th roots");
        }
    }

    #[test]
    fn root_products_wrap() {
        let z = CycloValue::root(5, 3);
        let w = CycloValue::root(5, 4);
        assert_eq!(z.mul(&w), CycloValue::root(5, 2));
        // Different orders lift to the lcm.
        let a = CycloValue::root(4, 1);
        let b = CycloValue::root(6, 1);
        assert_eq!(a.mul(&b), CycloValue::root(12, 5));
    }

    #[test]
    fn conjugate_inverts_roots() {
        let z = CycloValue::root(7, 2);
        assert_eq!(z.conj(), CycloValue::root(7, 5));
        assert_eq!(z.mul(&z.conj()), CycloValue::one());
        // Real combinations are conjugation-fixed: zeta + zeta^-1.
        let c = z.add(&z.conj());
        assert_eq!(c.conj(), c);
    }

    #[test]
    fn rationality_detection() {
        // zeta_3 + zeta_3^2 = -1.
        let s = CycloValue::root(3, 1).add(&CycloValue::root(3, 2));
        assert_eq!(s.as_rational(), Some(Ratio::new(-1, 1)));
        // zeta_4 = i is not rational.
        assert_eq!(CycloValue::root(4, 1).as_rational(), None);
        // (2/6) normalizes.
        assert_eq!(CycloValue::from_ratio(2, 6).as_rational(), Some(Ratio::new(1, 3)));
        assert_eq!(CycloValue::from_ratio(1, -2).as_rational(), Some(Ratio::new(-1, 2)));
    }

    #[test]
    fn equality_across_representations() {
        // zeta_6 = 1 + zeta_3 (both are primitive 6th root expressions):
        // zeta_6 satisfies x^2 - x + 1, and 1 + zeta_3 does too.
        let lhs = CycloValue::root(6, 1);
        let rhs = CycloValue::one().add(&CycloValue::root(3, 1));
        assert_eq!(lhs, rhs);
        assert!(lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn numeric_route_agrees_with_exact() {
        let vals = [
            CycloValue::root(12, 5),
            CycloValue::root(7, 3).add(&CycloValue::from_ratio(3, 4)),
            CycloValue::root(5, 1).mul(&CycloValue::root(3, 2)).sub(&CycloValue::root(8, 7)),
        ];
        for v in &vals {
            let direct = v.eval_complex();
            let via_canon = {
                let (m, num, den) = v.canonical();
                let terms: Vec<Complex64> = num
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| root_c64(m, k as u32) * (c as f64))
                    .collect();
                pairwise_sum(&terms) / (den as f64)
            };
            assert!((direct - via_canon).norm() < 1e-9);
        }
    }

    #[test]
    fn arithmetic_identities() {
        let a = CycloValue::root(8, 1).add(&CycloValue::from_int(2));
        let b = CycloValue::root(8, 3).sub(&CycloValue::from_ratio(1, 2));
        let c = CycloValue::root(8, 6);
        // distributivity
        assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        // a - a = 0
        assert!(a.sub(&a).is_zero());
        // (a*b) numeric == a numeric * b numeric
        let lhs = a.mul(&b).eval_complex();
        let rhs = a.eval_complex() * b.eval_complex();
        assert!((lhs - rhs).norm() < 1e-9);
    }
}
