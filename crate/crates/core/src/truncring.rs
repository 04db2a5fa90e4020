//! Truncated polynomial rings F[pi]/pi^r over a top field from the tower.
//!
//! An element is a fixed-size coefficient array indexed by pi-power; every
//! coordinate at or above the truncation level r is zero, which makes
//! equality plain array equality. The Frobenius acts coefficientwise, so the
//! subring with coefficients in a Frobenius-fixed subfield is itself a
//! truncated valuation ring over that subfield.

use crate::error::{LabError, Result};
use crate::fieldtower::{Fe, FieldSpec};
use std::sync::Arc;

/// Largest supported truncation level.
pub const MAX_LEVEL: usize = 12;

/// A ring element: coefficient of pi^k at index k, zero at k >= r.
pub type Rt = [u32; MAX_LEVEL];

/// The zero element.
pub const RT_ZERO: Rt = [0; MAX_LEVEL];

#[derive(Debug)]
pub struct RingSpec {
    field: Arc<FieldSpec>,
    r: u32,
}

impl RingSpec {
    pub fn new(field: Arc<FieldSpec>, r: u32) -> Result<Arc<RingSpec>> {
        if r == 0 || r as usize > MAX_LEVEL {
            return Err(LabError::Unsupported(format!(
                "truncation level {r} outside 1..={MAX_LEVEL}"
            )));
        }
        Ok(Arc::new(RingSpec { field, r }))
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }
    pub fn r(&self) -> u32 {
        self.r
    }

    /// Number of elements of the full ring, as u128 to stay exact.
    pub fn size(&self) -> u128 {
        (self.field.size() as u128).pow(self.r)
    }

    pub fn zero(&self) -> Rt {
        RT_ZERO
    }

    pub fn one(&self) -> Rt {
        let mut a = RT_ZERO;
        a[0] = 1;
        a
    }

    /// The residue field element c as a constant.
    pub fn from_residue(&self, c: Fe) -> Rt {
        let mut a = RT_ZERO;
        a[0] = c.0;
        a
    }

    /// pi^k, zero when k >= r.
    pub fn pi_pow(&self, k: u32) -> Rt {
        let mut a = RT_ZERO;
        if k < self.r {
            a[k as usize] = 1;
        }
        a
    }

    /// c * pi^k, zero when k >= r.
    pub fn monomial(&self, c: Fe, k: u32) -> Rt {
        let mut a = RT_ZERO;
        if k < self.r {
            a[k as usize] = c.0;
        }
        a
    }

    pub fn coeff(&self, a: Rt, k: u32) -> Fe {
        Fe(a[k as usize])
    }

    /// The residue a mod pi.
    pub fn residue(&self, a: Rt) -> Fe {
        Fe(a[0])
    }

    pub fn add(&self, a: Rt, b: Rt) -> Rt {
        let mut out = RT_ZERO;
        for k in 0..self.r as usize {
            out[k] = self.field.add(Fe(a[k]), Fe(b[k])).0;
        }
        out
    }

    pub fn neg(&self, a: Rt) -> Rt {
        let mut out = RT_ZERO;
        for k in 0..self.r as usize {
            out[k] = self.field.neg(Fe(a[k])).0;
        }
        out
    }

    pub fn sub(&self, a: Rt, b: Rt) -> Rt {
        self.add(a, self.neg(b))
    }

    /// Truncated convolution.
    pub fn mul(&self, a: Rt, b: Rt) -> Rt {
        let r = self.r as usize;
        let mut out = RT_ZERO;
        for i in 0..r {
            if a[i] == 0 {
                continue;
            }
            let ai = Fe(a[i]);
            for j in 0..r - i {
                if b[j] == 0 {
                    continue;
                }
                let k = i + j;
                out[k] = self.field.add(Fe(out[k]), self.field.mul(ai, Fe(b[j]))).0;
            }
        }
        out
    }

    /// Scalar multiplication by a residue field element.
    pub fn scale(&self, c: Fe, a: Rt) -> Rt {
        let mut out = RT_ZERO;
        for k in 0..self.r as usize {
            out[k] = self.field.mul(c, Fe(a[k])).0;
        }
        out
    }

    pub fn is_unit(&self, a: Rt) -> bool {
        a[0] != 0
    }

    /// Inverse of a unit by Newton lifting from the residue inverse.
    pub fn inv(&self, a: Rt) -> Result<Rt> {
        if a[0] == 0 {
            return Err(LabError::NonUnit);
        }
        let mut x = self.from_residue(self.field.inv(Fe(a[0]))?);
        // Precision doubles each step: ceil(log2 r) iterations suffice.
        let mut prec = 1u32;
        while prec < self.r {
            let two_minus = self.sub(self.add(self.one(), self.one()), self.mul(a, x));
            x = self.mul(x, two_minus);
            prec *= 2;
        }
        debug_assert_eq!(self.mul(a, x), self.one());
        Ok(x)
    }

    pub fn pow(&self, a: Rt, e: u64) -> Rt {
        let mut base = a;
        let mut e = e;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Coefficientwise x -> x^(q^k).
    pub fn frobenius(&self, a: Rt, k: u32) -> Rt {
        let mut out = RT_ZERO;
        for j in 0..self.r as usize {
            out[j] = self.field.frobenius(Fe(a[j]), k).0;
        }
        out
    }

    /// Reduce mod pi^l: zero all coordinates at or above l.
    pub fn reduce(&self, a: Rt, l: u32) -> Rt {
        let mut out = a;
        for k in (l as usize).min(MAX_LEVEL)..MAX_LEVEL {
            out[k] = 0;
        }
        out
    }

    /// pi-adic valuation; r for zero.
    pub fn val(&self, a: Rt) -> u32 {
        for k in 0..self.r {
            if a[k as usize] != 0 {
                return k;
            }
        }
        self.r
    }

    /// Multiply by pi^k (shift coefficients up, truncating).
    pub fn pi_shift(&self, a: Rt, k: u32) -> Rt {
        let mut out = RT_ZERO;
        for j in 0..(self.r.saturating_sub(k)) as usize {
            out[j + k as usize] = a[j];
        }
        out
    }

    /// Coefficient-lex integer code: the pi^0 coefficient is most
    /// significant. Subring enumeration yields ascending codes.
    pub fn code(&self, a: Rt) -> u128 {
        let s = self.field.size() as u128;
        let mut c = 0u128;
        for k in 0..self.r as usize {
            c = c * s + a[k] as u128;
        }
        c
    }

    /// All elements with every coefficient fixed by x -> x^(q^s), ascending
    /// by coefficient-lex code. For s | d this is the truncated ring over the
    /// subfield with q^s elements.
    pub fn subring_elems(&self, s: u32) -> Vec<Rt> {
        let fixed = self.field.fixed_subfield_elems(s);
        self.odometer(&vec![fixed; self.r as usize])
    }

    /// Units of the same subring, ascending by coefficient-lex code.
    pub fn subring_units(&self, s: u32) -> Vec<Rt> {
        let fixed = self.field.fixed_subfield_elems(s);
        let units: Vec<Fe> = fixed.iter().copied().filter(|&c| c != Fe::ZERO).collect();
        let mut slots = vec![units];
        slots.extend(std::iter::repeat(fixed).take(self.r as usize - 1));
        self.odometer(&slots)
    }

    fn odometer(&self, slots: &[Vec<Fe>]) -> Vec<Rt> {
        let total: usize = slots.iter().map(|s| s.len()).product();
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; slots.len()];
        loop {
            let mut a = RT_ZERO;
            for (k, &i) in idx.iter().enumerate() {
                a[k] = slots[k][i].0;
            }
            out.push(a);
            // Increment, last coordinate fastest.
            let mut k = slots.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < slots[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}
