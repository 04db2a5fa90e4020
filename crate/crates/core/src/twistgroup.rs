//! The finite group G^F: invertible n x n matrices over the truncated ring,
//! fixed by a Frobenius twisted by a permutation matrix.
//!
//! For a permutation w, the twisted Frobenius sends g to the entrywise
//! q-power Frobenius conjugated by the permutation matrix of w. A fixed
//! matrix is determined by one free entry per orbit of (i,j) -> (w(i), w(j)):
//! the entry at the k-th position of an orbit is the k-th Frobenius power of
//! the free value, and the free value ranges over the subring fixed by
//! Frobenius^s, s the orbit length. Enumerating free values through a mixed
//! radix odometer gives every fixed matrix a key; the group is the ascending
//! key list of the invertible ones, and all later machinery works on keys.
//!
//! Over the fixed subring this group is GL_n of a truncated valuation ring
//! with residue field F_q, for every choice of w.

use crate::error::{LabError, Result};
use crate::fieldtower::{Fe, FieldSpec};
use crate::perm::Perm;
use crate::truncring::{RingSpec, Rt, RT_ZERO};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

/// Desk-scale cap on the candidate matrix space q^(r n^2).
pub const MATRIX_SPACE_CAP: u128 = 1 << 20;

/// A matrix: n*n ring elements, row major.
pub type Mat = Vec<Rt>;

/// One orbit of matrix positions under (i,j) -> (w(i), w(j)).
#[derive(Debug, Clone)]
pub struct EntryOrbit {
    /// Positions in orbit order; the first is the representative.
    pub positions: Vec<(usize, usize)>,
    /// Index into the subring tables, keyed by orbit length.
    table: usize,
}

struct SubringTable {
    s: u32,
    elems: Vec<Rt>,
    codes: Vec<u128>,
}

pub struct GroupSpec {
    ring: Arc<RingSpec>,
    n: usize,
    w: Perm,
    orbits: Vec<EntryOrbit>,
    tables: Vec<SubringTable>,
    strides: Vec<u64>,
    counts: Vec<u64>,
    total: u64,
    elements: Vec<u64>,
    gens: OnceLock<Vec<u64>>,
    classes: OnceLock<Classes>,
}

/// Conjugacy class data: one entry per group element, in element order.
pub struct Classes {
    /// Class id of each element, indexed by element position.
    pub class_of: Vec<u32>,
    /// Key of the smallest element of each class.
    pub reps: Vec<u64>,
    pub sizes: Vec<u64>,
}

/// |GL_n(O_r)| for residue field size q.
pub fn closed_form_order(q: u128, n: u32, r: u32) -> u128 {
    let mut ord = q.pow((r - 1) * n * n);
    let qn = q.pow(n);
    for i in 0..n {
        ord *= qn - q.pow(i);
    }
    ord
}

impl GroupSpec {
    /// Build the group for residue field F_(p^m), rank n, level r, twist w.
    pub fn build(p: u32, m: u32, n: usize, r: u32, w: Perm, cache_dir: Option<&Path>) -> Result<Arc<GroupSpec>> {
        assert_eq!(w.n(), n, "twist must permute 1..=n");
        let lens = w.cycle_lens();
        let d = lens.iter().fold(1u32, |acc, &l| num::integer::lcm(acc, l as u32));
        let field = FieldSpec::build(p, m, d)?;
        let ring = RingSpec::new(field, r)?;

        // Entry orbits in row-major representative order.
        let mut seen = vec![false; n * n];
        let mut orbits: Vec<EntryOrbit> = Vec::new();
        for i0 in 0..n {
            for j0 in 0..n {
                if seen[i0 * n + j0] {
                    continue;
                }
                let mut positions = Vec::new();
                let (mut i, mut j) = (i0, j0);
                loop {
                    seen[i * n + j] = true;
                    positions.push((i, j));
                    i = w.apply(i);
                    j = w.apply(j);
                    if (i, j) == (i0, j0) {
                        break;
                    }
                }
                orbits.push(EntryOrbit { positions, table: usize::MAX });
            }
        }

        // One value table per distinct orbit length.
        let mut tables: Vec<SubringTable> = Vec::new();
        for orbit in &mut orbits {
            let s = orbit.positions.len() as u32;
            let idx = match tables.iter().position(|t| t.s == s) {
                Some(i) => i,
                None => {
                    let elems = ring.subring_elems(s);
                    let codes: Vec<u128> = elems.iter().map(|&e| ring.code(e)).collect();
                    debug_assert!(codes.windows(2).all(|w| w[0] < w[1]));
                    tables.push(SubringTable { s, elems, codes });
                    tables.len() - 1
                }
            };
            orbit.table = idx;
        }

        let counts: Vec<u64> = orbits.iter().map(|o| tables[o.table].elems.len() as u64).collect();
        let total128: u128 = counts.iter().map(|&c| c as u128).product();
        if total128 > MATRIX_SPACE_CAP {
            return Err(LabError::SizeCap { what: "candidate matrix space", size: total128, cap: MATRIX_SPACE_CAP });
        }
        let total = total128 as u64;
        let mut strides = vec![1u64; orbits.len()];
        for o in (0..orbits.len().saturating_sub(1)).rev() {
            strides[o] = strides[o + 1] * counts[o + 1];
        }

        let mut spec = GroupSpec {
            ring,
            n,
            w,
            orbits,
            tables,
            strides,
            counts,
            total,
            elements: Vec::new(),
            gens: OnceLock::new(),
            classes: OnceLock::new(),
        };

        let expected = closed_form_order(spec.q() as u128, n as u32, r);
        if let Some(dir) = cache_dir {
            match spec.load_cache(dir, expected) {
                Ok(keys) => {
                    spec.elements = keys;
                    return Ok(Arc::new(spec));
                }
                Err(LabError::Io(e)) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(_) => {} // invalid cache: re-enumerate and overwrite
            }
        }

        spec.elements = (0..total)
            .into_par_iter()
            .filter(|&key| spec.residue_invertible(key))
            .collect();
        assert_eq!(spec.elements.len() as u128, expected, "group order closed form");

        if let Some(dir) = cache_dir {
            spec.write_cache(dir)?;
        }
        Ok(Arc::new(spec))
    }

    /// The group with w one n-cycle.
    pub fn coxeter(p: u32, m: u32, n: usize, r: u32) -> Result<Arc<GroupSpec>> {
        Self::build(p, m, n, r, Perm::block_cycles(&[n]), None)
    }

    /// The group twisted by consecutive cycles of the given lengths.
    pub fn from_cycle_type(p: u32, m: u32, n: usize, r: u32, lens: &[usize]) -> Result<Arc<GroupSpec>> {
        assert_eq!(lens.iter().sum::<usize>(), n);
        Self::build(p, m, n, r, Perm::block_cycles(lens), None)
    }

    pub fn ring(&self) -> &Arc<RingSpec> {
        &self.ring
    }
    pub fn field(&self) -> &Arc<FieldSpec> {
        self.ring.field()
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn r(&self) -> u32 {
        self.ring.r()
    }
    pub fn q(&self) -> u64 {
        self.field().q()
    }
    pub fn w(&self) -> &Perm {
        &self.w
    }
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }
    pub fn entry_orbits(&self) -> &[EntryOrbit] {
        &self.orbits
    }

    /// Position of a group element key in the ascending element list.
    pub fn index_of(&self, key: u64) -> Option<usize> {
        self.elements.binary_search(&key).ok()
    }

    pub fn at(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    // ---- matrix arithmetic ----

    pub fn mat_id(&self) -> Mat {
        let mut m = vec![RT_ZERO; self.n * self.n];
        for i in 0..self.n {
            m[i * self.n + i] = self.ring.one();
        }
        m
    }

    pub fn mat_mul(&self, a: &Mat, b: &Mat) -> Mat {
        let n = self.n;
        let mut out = vec![RT_ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i * n + k];
                if aik == RT_ZERO {
                    continue;
                }
                for j in 0..n {
                    let prod = self.ring.mul(aik, b[k * n + j]);
                    out[i * n + j] = self.ring.add(out[i * n + j], prod);
                }
            }
        }
        out
    }

    /// Inverse over the local ring by Gauss-Jordan; a pivot with unit entry
    /// always exists for invertible input.
    pub fn mat_inv(&self, a: &Mat) -> Result<Mat> {
        let n = self.n;
        let mut left: Mat = a.clone();
        let mut right = self.mat_id();
        for col in 0..n {
            let piv = (col..n)
                .find(|&row| self.ring.is_unit(left[row * n + col]))
                .ok_or(LabError::Singular)?;
            if piv != col {
                for j in 0..n {
                    left.swap(col * n + j, piv * n + j);
                    right.swap(col * n + j, piv * n + j);
                }
            }
            let inv_p = self.ring.inv(left[col * n + col])?;
            for j in 0..n {
                left[col * n + j] = self.ring.mul(inv_p, left[col * n + j]);
                right[col * n + j] = self.ring.mul(inv_p, right[col * n + j]);
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let f = left[row * n + col];
                if f == RT_ZERO {
                    continue;
                }
                for j in 0..n {
                    let l = self.ring.mul(f, left[col * n + j]);
                    left[row * n + j] = self.ring.sub(left[row * n + j], l);
                    let r = self.ring.mul(f, right[col * n + j]);
                    right[row * n + j] = self.ring.sub(right[row * n + j], r);
                }
            }
        }
        Ok(right)
    }

    /// Fixedness under the twisted Frobenius.
    pub fn is_fixed(&self, a: &Mat) -> bool {
        self.orbits.iter().all(|orbit| {
            let s = orbit.positions.len() as u32;
            let (i0, j0) = orbit.positions[0];
            let v = a[i0 * self.n + j0];
            if self.ring.frobenius(v, s) != v {
                return false;
            }
            orbit.positions.iter().enumerate().skip(1).all(|(k, &(i, j))| {
                a[i * self.n + j] == self.ring.frobenius(v, k as u32)
            })
        })
    }

    /// Invertibility over the local ring: the residue matrix has full rank.
    pub fn is_invertible(&self, a: &Mat) -> bool {
        let res: Vec<u32> = a.iter().map(|e| e[0]).collect();
        self.residue_rank_full(res)
    }

    fn residue_rank_full(&self, mut res: Vec<u32>) -> bool {
        let n = self.n;
        let f = self.field();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&row| res[row * n + col] != 0) else {
                return false;
            };
            if piv != col {
                for j in 0..n {
                    res.swap(col * n + j, piv * n + j);
                }
            }
            let inv_p = f.inv(Fe(res[col * n + col])).expect("nonzero pivot");
            for j in col..n {
                res[col * n + j] = f.mul(inv_p, Fe(res[col * n + j])).0;
            }
            for row in col + 1..n {
                let c = Fe(res[row * n + col]);
                if c.0 == 0 {
                    continue;
                }
                for j in col..n {
                    let sub = f.mul(c, Fe(res[col * n + j]));
                    res[row * n + j] = f.sub(Fe(res[row * n + j]), sub).0;
                }
            }
        }
        true
    }

    fn residue_invertible(&self, key: u64) -> bool {
        let n = self.n;
        let f = self.field();
        let mut res = vec![0u32; n * n];
        let mut k = key;
        for o in (0..self.orbits.len()).rev() {
            let pos = (k % self.counts[o]) as usize;
            k /= self.counts[o];
            let orbit = &self.orbits[o];
            let v0 = Fe(self.tables[orbit.table].elems[pos][0]);
            for (step, &(i, j)) in orbit.positions.iter().enumerate() {
                res[i * n + j] = f.frobenius(v0, step as u32).0;
            }
        }
        self.residue_rank_full(res)
    }

    // ---- key codec ----

    /// Key of a fixed matrix.
    pub fn encode(&self, a: &Mat) -> u64 {
        debug_assert!(self.is_fixed(a));
        let mut key = 0u64;
        for (o, orbit) in self.orbits.iter().enumerate() {
            let (i, j) = orbit.positions[0];
            let v = a[i * self.n + j];
            let t = &self.tables[orbit.table];
            let code = self.ring.code(v);
            let pos = t.codes.binary_search(&code).expect("free value in subring");
            key += pos as u64 * self.strides[o];
        }
        key
    }

    pub fn decode(&self, key: u64) -> Mat {
        debug_assert!(key < self.total);
        let mut a = vec![RT_ZERO; self.n * self.n];
        let mut k = key;
        for o in (0..self.orbits.len()).rev() {
            let pos = (k % self.counts[o]) as usize;
            k /= self.counts[o];
            let orbit = &self.orbits[o];
            let v = self.tables[orbit.table].elems[pos];
            for (step, &(i, j)) in orbit.positions.iter().enumerate() {
                a[i * self.n + j] = self.ring.frobenius(v, step as u32);
            }
        }
        a
    }

    /// Group multiplication on keys.
    pub fn mul_keys(&self, a: u64, b: u64) -> u64 {
        self.encode(&self.mat_mul(&self.decode(a), &self.decode(b)))
    }

    pub fn inv_key(&self, a: u64) -> u64 {
        self.encode(&self.mat_inv(&self.decode(a)).expect("group element"))
    }

    pub fn id_key(&self) -> u64 {
        self.encode(&self.mat_id())
    }

    // ---- distinguished subsets ----

    /// Keys of elements congruent to the identity mod pi^level.
    pub fn level_kernel_keys(&self, level: u32) -> Vec<u64> {
        let id = self.mat_id();
        self.elements
            .iter()
            .copied()
            .filter(|&k| {
                let m = self.decode(k);
                m.iter()
                    .zip(&id)
                    .all(|(a, b)| self.ring.val(self.ring.sub(*a, *b)) >= level)
            })
            .collect()
    }

    /// Keys of elements whose off-diagonal entries all have valuation >= l.
    /// These factor as a diagonal times a level-l congruence unipotent, and
    /// taking the matrix diagonal is multiplicative on this subgroup.
    pub fn tu_keys(&self, l: u32) -> Vec<u64> {
        self.elements
            .iter()
            .copied()
            .filter(|&k| {
                let m = self.decode(k);
                (0..self.n).all(|i| {
                    (0..self.n).all(|j| i == j || self.ring.val(m[i * self.n + j]) >= l)
                })
            })
            .collect()
    }

    /// Keys of diagonal elements: the maximal torus this twist realizes.
    pub fn diagonal_keys(&self) -> Vec<u64> {
        self.elements
            .iter()
            .copied()
            .filter(|&k| {
                let m = self.decode(k);
                (0..self.n).all(|i| {
                    (0..self.n).all(|j| i == j || m[i * self.n + j] == RT_ZERO)
                })
            })
            .collect()
    }

    /// Keys of scalar matrices; this is the center.
    pub fn scalar_keys(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for c in self.ring.subring_units(1) {
            let mut m = vec![RT_ZERO; self.n * self.n];
            for i in 0..self.n {
                m[i * self.n + i] = c;
            }
            out.push(self.encode(&m));
        }
        out.sort_unstable();
        out
    }

    /// Diagonal of g as a matrix, and the unipotent complement diag^-1 g.
    pub fn tu_decompose(&self, g: &Mat) -> Result<(Mat, Mat)> {
        let mut t = vec![RT_ZERO; self.n * self.n];
        for i in 0..self.n {
            let e = g[i * self.n + i];
            if !self.ring.is_unit(e) {
                return Err(LabError::NotInSubgroup("diagonal entry not a unit"));
            }
            t[i * self.n + i] = e;
        }
        let u = self.mat_mul(&self.mat_inv(&t)?, g);
        Ok((t, u))
    }

    /// Image of every element under reduction mod pi^l, as sorted unique keys
    /// of the level-l group. The target must share p, m, n, w.
    pub fn reduction_image(&self, target: &GroupSpec) -> Vec<u64> {
        assert_eq!(self.w, target.w);
        assert_eq!(self.field().p(), target.field().p());
        assert_eq!(self.field().m(), target.field().m());
        let l = target.r();
        assert!(l <= self.r());
        let mut keys: Vec<u64> = self
            .elements
            .par_iter()
            .map(|&k| {
                let m = self.decode(k);
                let red: Mat = m.iter().map(|&e| self.ring.reduce(e, l)).collect();
                target.encode(&red)
            })
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys
    }

    // ---- generators and conjugacy classes ----

    /// A small generating set, extracted by scanning elements in key order
    /// and keeping any element outside the closure so far.
    pub fn generators(&self) -> &[u64] {
        self.gens.get_or_init(|| {
            let mut gens: Vec<u64> = Vec::new();
            let mut gen_mats: Vec<Mat> = Vec::new();
            let mut closed = IndexBits::new(self.elements.len());
            closed.insert(self.index_of(self.id_key()).unwrap());
            let mut count = 1usize;
            for pos in 0..self.elements.len() {
                if closed.contains(pos) {
                    continue;
                }
                let key = self.elements[pos];
                let new_gen = self.decode(key);
                // Extend the closure: seed with closure * new_gen, then close
                // under right multiplication by all generators.
                let mut frontier: Vec<Mat> = Vec::new();
                let seeds: Vec<usize> = (0..self.elements.len()).filter(|&i| closed.contains(i)).collect();
                for i in seeds {
                    let prod = self.mat_mul(&self.decode(self.elements[i]), &new_gen);
                    let idx = self.index_of(self.encode(&prod)).unwrap();
                    if closed.insert(idx) {
                        count += 1;
                        frontier.push(prod);
                    }
                }
                gen_mats.push(new_gen);
                gens.push(key);
                while let Some(x) = frontier.pop() {
                    for g in &gen_mats {
                        let y = self.mat_mul(&x, g);
                        let idx = self.index_of(self.encode(&y)).unwrap();
                        if closed.insert(idx) {
                            count += 1;
                            frontier.push(y);
                        }
                    }
                }
                if count == self.elements.len() {
                    break;
                }
            }
            assert_eq!(count, self.elements.len(), "generators close the group");
            gens
        })
    }

    /// Conjugacy classes by breadth-first closure under conjugation by the
    /// generating set.
    pub fn conjugacy_classes(&self) -> &Classes {
        self.classes.get_or_init(|| {
            let gens: Vec<(Mat, Mat)> = self
                .generators()
                .iter()
                .map(|&k| {
                    let g = self.decode(k);
                    let gi = self.mat_inv(&g).expect("group element");
                    (g, gi)
                })
                .collect();
            let order = self.elements.len();
            let mut class_of = vec![u32::MAX; order];
            let mut reps = Vec::new();
            let mut sizes = Vec::new();
            for start in 0..order {
                if class_of[start] != u32::MAX {
                    continue;
                }
                let id = reps.len() as u32;
                reps.push(self.elements[start]);
                let mut size = 0u64;
                let mut frontier: Vec<Mat> = vec![self.decode(self.elements[start])];
                class_of[start] = id;
                size += 1;
                while let Some(x) = frontier.pop() {
                    for (g, gi) in &gens {
                        let y = self.mat_mul(gi, &self.mat_mul(&x, g));
                        let idx = self.index_of(self.encode(&y)).unwrap();
                        if class_of[idx] == u32::MAX {
                            class_of[idx] = id;
                            size += 1;
                            frontier.push(y);
                        }
                    }
                }
                sizes.push(size);
            }
            let total: u64 = sizes.iter().sum();
            assert_eq!(total, order as u64, "classes partition the group");
            for &s in &sizes {
                assert_eq!(order as u64 % s, 0, "class size divides group order");
            }
            Classes { class_of, reps, sizes }
        })
    }

    // ---- cache ----

    fn cache_path(&self, dir: &Path) -> PathBuf {
        let w_str: Vec<String> = (0..self.n).map(|i| self.w.apply(i).to_string()).collect();
        dir.join(format!(
            "glor-p{}m{}n{}r{}w{}.grp",
            self.field().p(),
            self.field().m(),
            self.n,
            self.r(),
            w_str.join("-")
        ))
    }

    fn write_cache(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = self.cache_path(dir);
        let header = CacheHeader {
            schema: CACHE_MAGIC.to_string(),
            p: self.field().p(),
            m: self.field().m(),
            n: self.n as u32,
            r: self.r(),
            w_images: (0..self.n).map(|i| self.w.apply(i) as u32).collect(),
            modulus: self.field().modulus().to_vec(),
            order: self.elements.len() as u64,
        };
        let hjson = serde_json::to_vec(&header)?;
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
        f.write_all(CACHE_MAGIC.as_bytes())?;
        f.write_all(&(hjson.len() as u32).to_le_bytes())?;
        f.write_all(&hjson)?;
        for &k in &self.elements {
            f.write_all(&k.to_le_bytes())?;
        }
        f.flush()?;
        Ok(path)
    }

    fn load_cache(&self, dir: &Path, expected_order: u128) -> Result<Vec<u64>> {
        let path = self.cache_path(dir);
        let mut f = std::io::BufReader::new(std::fs::File::open(&path)?);
        let mut magic = [0u8; 8];
        f.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC.as_bytes() {
            return Err(LabError::CacheInvalid("bad magic".into()));
        }
        let mut lenb = [0u8; 4];
        f.read_exact(&mut lenb)?;
        let hlen = u32::from_le_bytes(lenb) as usize;
        if hlen > 1 << 16 {
            return Err(LabError::CacheInvalid("oversized header".into()));
        }
        let mut hjson = vec![0u8; hlen];
        f.read_exact(&mut hjson)?;
        let header: CacheHeader = serde_json::from_slice(&hjson)?;
        let w_images: Vec<u32> = (0..self.n).map(|i| self.w.apply(i) as u32).collect();
        if header.schema != CACHE_MAGIC
            || header.p != self.field().p()
            || header.m != self.field().m()
            || header.n != self.n as u32
            || header.r != self.r()
            || header.w_images != w_images
            || header.modulus != self.field().modulus()
        {
            return Err(LabError::CacheInvalid("parameter mismatch".into()));
        }
        if header.order as u128 != expected_order {
            return Err(LabError::CacheInvalid("order mismatch".into()));
        }
        let mut keys = Vec::with_capacity(header.order as usize);
        let mut buf = [0u8; 8];
        for _ in 0..header.order {
            f.read_exact(&mut buf)?;
            keys.push(u64::from_le_bytes(buf));
        }
        if f.read(&mut buf)? != 0 {
            return Err(LabError::CacheInvalid("trailing bytes".into()));
        }
        if !keys.windows(2).all(|w| w[0] < w[1]) {
            return Err(LabError::CacheInvalid("keys not ascending".into()));
        }
        // Spot-check: decoded entries must be fixed and invertible.
        let step = (keys.len() / 64).max(1);
        for &k in keys.iter().step_by(step) {
            if k >= self.total {
                return Err(LabError::CacheInvalid("key out of range".into()));
            }
            let m = self.decode(k);
            if !self.is_fixed(&m) || !self.is_invertible(&m) {
                return Err(LabError::CacheInvalid("spot check failed".into()));
            }
        }
        Ok(keys)
    }

    /// SHA-256-free checksum of the element list for reporting: FNV-1a.
    pub fn element_checksum(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        for &k in &self.elements {
            for b in k.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }
}

const CACHE_MAGIC: &str = "GLORGRP1";

#[derive(Serialize, Deserialize)]
struct CacheHeader {
    schema: String,
    p: u32,
    m: u32,
    n: u32,
    r: u32,
    w_images: Vec<u32>,
    modulus: Vec<u32>,
    order: u64,
}

/// Dense bitset over element indices.
struct IndexBits {
    bits: Vec<u64>,
}

impl IndexBits {
    fn new(n: usize) -> Self {
        IndexBits { bits: vec![0; n.div_ceil(64)] }
    }
    fn contains(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }
    /// Returns true when the bit was newly set.
    fn insert(&mut self, i: usize) -> bool {
        let was = self.contains(i);
        self.bits[i / 64] |= 1 << (i % 64);
        !was
    }
}
