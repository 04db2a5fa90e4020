//! The field tower F_p <= F_q <= F_{q^d} with q = p^m.
//!
//! A field element is an index below p^(m*d): the polynomial
//! c_0 + c_1 x + ... over F_p is stored as sum c_i p^i, so index arithmetic on
//! digits base p is coefficient arithmetic. The top field is F_p[x] modulo the
//! smallest irreducible monic polynomial of degree m*d (ordered by the integer
//! code of its coefficient vector), multiplication goes through exp/log tables
//! for the smallest generator, and the intermediate field F_q sits inside as
//! the fixed points of x -> x^q.

use crate::error::{LabError, Result};
use std::sync::Arc;

/// Desk-scale cap on the top field size.
pub const FIELD_SIZE_CAP: u128 = 1 << 20;

const ADD_TABLE_MAX: u32 = 1024;

/// A field element: an index below `FieldSpec::size()`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Fe(pub u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);
}

/// Where a trace lands.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TraceTarget {
    /// F_p, the prime field.
    PrimeField,
    /// F_q, the coefficient field of the untwisted theory.
    MiddleField,
}

pub struct FieldSpec {
    p: u32,
    m: u32,
    d: u32,
    size: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    frob_p: Vec<u32>,
    frob_q: Vec<u32>,
    add_tab: Option<Vec<u32>>,
}

impl std::fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldSpec(p={}, m={}, d={}, modulus={:?})", self.p, self.m, self.d, self.modulus)
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.d == other.d
    }
}
impl Eq for FieldSpec {}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= p as u64 {
        if p as u64 % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Polynomials over F_p as low-to-high coefficient vectors.
mod poly {
    pub fn trim(c: &mut Vec<u32>) {
        while c.last() == Some(&0) {
            c.pop();
        }
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                out[i + j] += ai as u64 * bj as u64;
            }
        }
        let mut out: Vec<u32> = out.into_iter().map(|c| (c % p as u64) as u32).collect();
        trim(&mut out);
        out
    }

    /// Remainder of `a` by monic `b`.
    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        assert_eq!(*b.last().unwrap(), 1, "divisor must be monic");
        let mut r: Vec<u32> = a.to_vec();
        trim(&mut r);
        while r.len() >= b.len() {
            let lead = *r.last().unwrap();
            let shift = r.len() - b.len();
            for (k, &bk) in b.iter().enumerate() {
                let sub = (lead as u64 * bk as u64) % p as u64;
                let idx = shift + k;
                r[idx] = ((r[idx] as u64 + p as u64 - sub) % p as u64) as u32;
            }
            trim(&mut r);
        }
        r
    }

    /// Irreducibility over F_p by trial division by all monic polynomials of
    /// degree up to deg/2.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let deg = f.len() - 1;
        if deg == 0 {
            return false;
        }
        if deg == 1 {
            return true;
        }
        for ddeg in 1..=deg / 2 {
            let count = (p as u64).pow(ddeg as u32);
            for code in 0..count {
                let mut g = vec![0u32; ddeg + 1];
                let mut c = code;
                for gk in g.iter_mut().take(ddeg) {
                    *gk = (c % p as u64) as u32;
                    c /= p as u64;
                }
                g[ddeg] = 1;
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// The smallest irreducible monic polynomial of the given degree over F_p,
/// ordering candidates by the integer code of their non-leading coefficients.
pub fn smallest_irreducible(p: u32, deg: usize) -> Vec<u32> {
    let count = (p as u64).pow(deg as u32);
    for code in 0..count {
        let mut f = vec![0u32; deg + 1];
        let mut c = code;
        for fk in f.iter_mut().take(deg) {
            *fk = (c % p as u64) as u32;
            c /= p as u64;
        }
        f[deg] = 1;
        if poly::is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree");
}

impl FieldSpec {
    /// Build the tower F_p <= F_{p^m} <= F_{p^(m*d)}.
    pub fn build(p: u32, m: u32, d: u32) -> Result<Arc<FieldSpec>> {
        if !is_prime(p) {
            return Err(LabError::NonPrime(p));
        }
        assert!(m >= 1 && d >= 1);
        let md = (m * d) as usize;
        let size128 = (p as u128).checked_pow(md as u32).unwrap_or(u128::MAX);
        if size128 > FIELD_SIZE_CAP {
            return Err(LabError::SizeCap { what: "field size", size: size128, cap: FIELD_SIZE_CAP });
        }
        let size = size128 as u32;
        let modulus = smallest_irreducible(p, md);

        // Index <-> polynomial digit helpers.
        let decode = |idx: u32| -> Vec<u32> {
            let mut c = idx;
            let mut out = vec![0u32; md];
            for o in out.iter_mut() {
                *o = c % p;
                c /= p;
            }
            out
        };
        let encode = |poly: &[u32]| -> u32 {
            let mut idx = 0u32;
            for &c in poly.iter().rev() {
                idx = idx * p + c;
            }
            idx
        };
        let mul_raw = |a: u32, b: u32| -> u32 {
            let prod = poly::mul(&decode(a), &decode(b), p);
            let mut r = poly::rem(&prod, &modulus, p);
            r.resize(md, 0);
            encode(&r)
        };

        // exp/log from the smallest generator, checked by exhausting powers.
        let order = size - 1;
        let mut exp = Vec::new();
        let mut log = vec![u32::MAX; size as usize];
        'cand: for g in 1..size {
            exp.clear();
            log.iter_mut().for_each(|v| *v = u32::MAX);
            let mut cur = 1u32;
            for i in 0..order {
                if log[cur as usize] != u32::MAX {
                    continue 'cand; // order of g is < size-1
                }
                log[cur as usize] = i;
                exp.push(cur);
                cur = mul_raw(cur, g);
            }
            if cur == 1 {
                break 'cand;
            }
        }
        assert_eq!(exp.len(), order as usize, "no generator found");

        let pow_by_log = |a: u32, e: u64| -> u32 {
            if a == 0 {
                return 0;
            }
            let l = log[a as usize] as u64;
            exp[((l * (e % order as u64)) % order as u64) as usize]
        };
        let frob_p: Vec<u32> = (0..size).map(|a| pow_by_log(a, p as u64)).collect();
        let mut frob_q: Vec<u32> = (0..size).collect();
        for _ in 0..m {
            frob_q = frob_q.iter().map(|&a| frob_p[a as usize]).collect();
        }

        let add_tab = if size <= ADD_TABLE_MAX {
            let mut t = vec![0u32; (size as usize) * (size as usize)];
            for a in 0..size {
                let da = decode(a);
                for b in 0..=a {
                    let db = decode(b);
                    let s: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                    let v = encode(&s);
                    t[(a * size + b) as usize] = v;
                    t[(b * size + a) as usize] = v;
                }
            }
            Some(t)
        } else {
            None
        };

        Ok(Arc::new(FieldSpec { p, m, d, size, modulus, exp, log, frob_p, frob_q, add_tab }))
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn d(&self) -> u32 {
        self.d
    }
    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.m)
    }
    pub fn size(&self) -> u32 {
        self.size
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    pub fn generator(&self) -> Fe {
        Fe(self.exp[usize::from(self.size > 2)])
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if let Some(t) = &self.add_tab {
            return Fe(t[(a.0 * self.size + b.0) as usize]);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m * self.d {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        Fe(out)
    }

    pub fn neg(&self, a: Fe) -> Fe {
        let mut x = a.0;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.m * self.d {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        Fe(out)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let order = (self.size - 1) as u64;
        let l = self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64;
        Fe(self.exp[(l % order) as usize])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.0 == 0 {
            return Err(LabError::NonUnit);
        }
        let order = self.size - 1;
        let l = self.log[a.0 as usize];
        Ok(Fe(self.exp[((order - l) % order) as usize]))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if a.0 == 0 {
            return if e == 0 { Fe::ONE } else { Fe::ZERO };
        }
        let order = (self.size - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        Fe(self.exp[((l * (e % order)) % order) as usize])
    }

    /// x -> x^(q^k).
    pub fn frobenius(&self, a: Fe, k: u32) -> Fe {
        let mut x = a;
        for _ in 0..k % self.d.max(1) {
            x = Fe(self.frob_q[x.0 as usize]);
        }
        x
    }

    /// x -> x^(p^k).
    pub fn frobenius_p(&self, a: Fe, k: u32) -> Fe {
        let mut x = a;
        for _ in 0..k % (self.m * self.d) {
            x = Fe(self.frob_p[x.0 as usize]);
        }
        x
    }

    /// Trace down the tower. The output lies in the target subfield; for
    /// `PrimeField` its index is below p.
    pub fn trace_to(&self, a: Fe, target: TraceTarget) -> Fe {
        match target {
            TraceTarget::MiddleField => {
                let mut acc = Fe::ZERO;
                let mut cur = a;
                for _ in 0..self.d {
                    acc = self.add(acc, cur);
                    cur = Fe(self.frob_q[cur.0 as usize]);
                }
                debug_assert_eq!(Fe(self.frob_q[acc.0 as usize]), acc);
                acc
            }
            TraceTarget::PrimeField => {
                let mut acc = Fe::ZERO;
                let mut cur = a;
                for _ in 0..self.m * self.d {
                    acc = self.add(acc, cur);
                    cur = Fe(self.frob_p[cur.0 as usize]);
                }
                debug_assert!(acc.0 < self.p);
                acc
            }
        }
    }

    /// Trace to F_p as an exponent in Z/p.
    pub fn trace_to_fp(&self, a: Fe) -> u32 {
        self.trace_to(a, TraceTarget::PrimeField).0
    }

    /// Trace from the middle field F_q down to F_p, for inputs already in
    /// the middle field: the sum of the first m p-power Frobenius translates.
    pub fn trace_middle_to_fp(&self, a: Fe) -> u32 {
        debug_assert_eq!(self.frobenius(a, 1), a, "input must lie in the middle field");
        let mut acc = Fe::ZERO;
        let mut cur = a;
        for _ in 0..self.m {
            acc = self.add(acc, cur);
            cur = Fe(self.frob_p[cur.0 as usize]);
        }
        debug_assert!(acc.0 < self.p);
        acc.0
    }

    /// Discrete log base the canonical generator: 0 <= e < size-1.
    pub fn dlog(&self, x: Fe) -> Result<u32> {
        if x.0 == 0 {
            return Err(LabError::DlogOfZero);
        }
        Ok(self.log[x.0 as usize])
    }

    /// Elements fixed by x -> x^(q^s), ascending by index. For s | d this is
    /// the subfield with q^s elements.
    pub fn fixed_subfield_elems(&self, s: u32) -> Vec<Fe> {
        (0..self.size)
            .map(Fe)
            .filter(|&a| self.frobenius(a, s) == a)
            .collect()
    }

    /// An F_p-basis of the fixed subfield of x -> x^(q^s), by greedy
    /// elimination over the digit vectors.
    pub fn subfield_fp_basis(&self, s: u32) -> Vec<Fe> {
        let md = (self.m * self.d) as usize;
        let mut basis: Vec<Fe> = Vec::new();
        let mut rows: Vec<Vec<u32>> = Vec::new(); // reduced echelon rows
        let mut pivots: Vec<usize> = Vec::new();
        for a in self.fixed_subfield_elems(s) {
            if a == Fe::ZERO {
                continue;
            }
            let mut v = self.digits(a);
            for (row, &pc) in rows.iter().zip(&pivots) {
                if v[pc] != 0 {
                    let c = v[pc];
                    for k in 0..md {
                        v[k] = (v[k] + (self.p - c) * row[k]) % self.p;
                    }
                }
            }
            if let Some(pc) = (0..md).find(|&k| v[k] != 0) {
                let inv = mod_inverse(v[pc], self.p);
                for vk in v.iter_mut() {
                    *vk = (*vk * inv) % self.p;
                }
                rows.push(v);
                pivots.push(pc);
                basis.push(a);
            }
        }
        assert_eq!(basis.len() as u32, self.m * s, "subfield dimension");
        basis
    }

    /// Digits base p, low first: the coefficient vector of length m*d.
    pub fn digits(&self, a: Fe) -> Vec<u32> {
        let mut c = a.0;
        let mut out = vec![0u32; (self.m * self.d) as usize];
        for o in out.iter_mut() {
            *o = c % self.p;
            c /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u32]) -> Fe {
        let mut idx = 0u32;
        for &c in digits.iter().rev() {
            idx = idx * self.p + c % self.p;
        }
        Fe(idx)
    }

    /// Scalar multiplication by c in F_p.
    pub fn scale(&self, c: u32, a: Fe) -> Fe {
        self.mul(Fe(c % self.p), a)
    }
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    // p is prime and a != 0 mod p
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// The embedding of `small` into `big` (same p, degree dividing): the image
/// index of every small element, computed by evaluating its polynomial
/// representation at the smallest root of `small`'s modulus inside `big`.
pub fn embedding(small: &FieldSpec, big: &FieldSpec) -> Result<Vec<u32>> {
    if small.p != big.p {
        return Err(LabError::IncompatibleSpecs("different characteristic"));
    }
    let sdeg = small.m * small.d;
    let bdeg = big.m * big.d;
    if bdeg % sdeg != 0 {
        return Err(LabError::IncompatibleSpecs("degree does not divide"));
    }
    let eval = |x: Fe| -> Fe {
        let mut acc = Fe::ZERO;
        // Horner, high to low.
        for &c in small.modulus.iter().rev() {
            acc = big.add(big.mul(acc, x), Fe(c));
        }
        acc
    };
    let root = (0..big.size)
        .map(Fe)
        .find(|&x| eval(x) == Fe::ZERO)
        .expect("splitting field contains a root");
    let mut map = vec![0u32; small.size as usize];
    for idx in 0..small.size {
        let digits = small.digits(Fe(idx));
        let mut acc = Fe::ZERO;
        for &c in digits.iter().rev() {
            acc = big.add(big.mul(acc, root), Fe(c));
        }
        map[idx as usize] = acc.0;
    }
    debug_assert!({
        let g = small.generator();
        let mut ok = true;
        for a in 0..small.size.min(64) {
            for b in 0..small.size.min(64) {
                let (fa, fb) = (Fe(a), Fe(b));
                ok &= map[small.mul(fa, fb).0 as usize] == big.mul(Fe(map[a as usize]), Fe(map[b as usize])).0;
                ok &= map[small.add(fa, fb).0 as usize] == big.add(Fe(map[a as usize]), Fe(map[b as usize])).0;
            }
        }
        ok && map[g.0 as usize] != 0
    });
    Ok(map)
}
