//! The matrix algebra attached to the congruence kernel at r = 2, its
//! adjoint orbits and invariant characters, and the pairing of those
//! characters against induced representations.
//!
//! At r = 2 the congruence kernel is abelian: 1 + pi X maps to X, an
//! additive isomorphism onto the fixed matrices over the residue field. The
//! adjoint action is conjugation, orbits are labelled by characteristic and
//! minimal polynomial (enough to separate classes for n <= 3), and each
//! orbit carries one irreducible invariant character, the sum of the
//! additive characters psi_beta over the orbit. `verify_letellier` pairs
//! every such character against a witness induced representation chosen by
//! the class type of beta and reports whether each pairing is nonzero.

use crate::chars::{genericity_report, GenericityReport, LevelData, TorusChars};
use crate::clfun::{induce, ClassFunction, Subgroup};
use crate::cyclo::CycloValue;
use crate::error::{LabError, Result};
use crate::fieldtower::{embedding, Fe, FieldSpec};
use crate::perm::Perm;
use crate::torus::TorusTable;
use crate::truncring::RT_ZERO;
use crate::twistgroup::{GroupSpec, Mat};
use num::complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

// ---------------------------------------------------------------------------
// Matrices over a field element type, for class labels.

fn fmat_id(n: usize) -> Vec<Fe> {
    let mut m = vec![Fe::ZERO; n * n];
    for i in 0..n {
        m[i * n + i] = Fe::ONE;
    }
    m
}

fn fmat_mul(f: &FieldSpec, n: usize, a: &[Fe], b: &[Fe]) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == Fe::ZERO {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = f.add(out[i * n + j], f.mul(aik, b[k * n + j]));
            }
        }
    }
    out
}

fn fmat_inv(f: &FieldSpec, n: usize, a: &[Fe]) -> Option<Vec<Fe>> {
    let mut m = a.to_vec();
    let mut inv = fmat_id(n);
    for col in 0..n {
        let pivot = (col..n).find(|&row| m[row * n + col] != Fe::ZERO)?;
        for j in 0..n {
            m.swap(col * n + j, pivot * n + j);
            inv.swap(col * n + j, pivot * n + j);
        }
        let scale = f.inv(m[col * n + col]).ok()?;
        for j in 0..n {
            m[col * n + j] = f.mul(scale, m[col * n + j]);
            inv[col * n + j] = f.mul(scale, inv[col * n + j]);
        }
        for row in 0..n {
            if row == col || m[row * n + col] == Fe::ZERO {
                continue;
            }
            let c = m[row * n + col];
            for j in 0..n {
                m[row * n + j] = f.sub(m[row * n + j], f.mul(c, m[col * n + j]));
                inv[row * n + j] = f.sub(inv[row * n + j], f.mul(c, inv[col * n + j]));
            }
        }
    }
    Some(inv)
}

fn det2(f: &FieldSpec, a: &[Fe]) -> Fe {
    f.sub(f.mul(a[0], a[3]), f.mul(a[1], a[2]))
}

fn det3(f: &FieldSpec, a: &[Fe]) -> Fe {
    let m = |i: usize, j: usize| a[i * 3 + j];
    let t1 = f.mul(m(0, 0), f.sub(f.mul(m(1, 1), m(2, 2)), f.mul(m(1, 2), m(2, 1))));
    let t2 = f.mul(m(0, 1), f.sub(f.mul(m(1, 0), m(2, 2)), f.mul(m(1, 2), m(2, 0))));
    let t3 = f.mul(m(0, 2), f.sub(f.mul(m(1, 0), m(2, 1)), f.mul(m(1, 1), m(2, 0))));
    f.add(f.sub(t1, t2), t3)
}

/// Characteristic polynomial, coefficients low to high, monic of degree n.
fn charpoly(f: &FieldSpec, n: usize, a: &[Fe]) -> Vec<Fe> {
    match n {
        2 => {
            let tr = f.add(a[0], a[3]);
            vec![det2(f, a), f.neg(tr), Fe::ONE]
        }
        3 => {
            let m = |i: usize, j: usize| a[i * 3 + j];
            let tr = f.add(f.add(m(0, 0), m(1, 1)), m(2, 2));
            let mut c2 = Fe::ZERO;
            for i in 0..3 {
                for j in (i + 1)..3 {
                    let minor = f.sub(f.mul(m(i, i), m(j, j)), f.mul(m(i, j), m(j, i)));
                    c2 = f.add(c2, minor);
                }
            }
            vec![f.neg(det3(f, a)), c2, f.neg(tr), Fe::ONE]
        }
        _ => unreachable!("class labels are computed for n in {{2, 3}}"),
    }
}

/// Horner evaluation of a monic polynomial at a matrix.
fn poly_eval_mat(f: &FieldSpec, n: usize, coeffs: &[Fe], a: &[Fe]) -> Vec<Fe> {
    let deg = coeffs.len() - 1;
    assert_eq!(coeffs[deg], Fe::ONE);
    let mut b = fmat_id(n);
    for k in (0..deg).rev() {
        b = fmat_mul(f, n, &b, a);
        for i in 0..n {
            b[i * n + i] = f.add(b[i * n + i], coeffs[k]);
        }
    }
    b
}

/// Minimal polynomial with coefficients restricted to `pool`, by ascending
/// degree then ascending coefficient codes. The pool is the subfield fixed
/// by the q-power map, where the minimal polynomial always lives.
fn minpoly(f: &FieldSpec, n: usize, a: &[Fe], pool: &[Fe]) -> Vec<Fe> {
    for deg in 1..=n {
        let mut idx = vec![0usize; deg];
        loop {
            let mut coeffs: Vec<Fe> = idx.iter().map(|&i| pool[i]).collect();
            coeffs.push(Fe::ONE);
            if poly_eval_mat(f, n, &coeffs, a).iter().all(|&c| c == Fe::ZERO) {
                return coeffs;
            }
            let mut k = 0;
            loop {
                if k == deg {
                    break;
                }
                idx[k] += 1;
                if idx[k] < pool.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == deg {
                break;
            }
        }
    }
    unreachable!("the characteristic polynomial annihilates the matrix")
}

fn poly_eval(f: &FieldSpec, coeffs: &[Fe], x: Fe) -> Fe {
    let mut acc = Fe::ZERO;
    for &c in coeffs.iter().rev() {
        acc = f.add(f.mul(acc, x), c);
    }
    acc
}

/// Divide a monic polynomial by (x - root); the remainder must vanish.
fn deflate(f: &FieldSpec, poly: &[Fe], root: Fe) -> Vec<Fe> {
    let deg = poly.len() - 1;
    let mut q = vec![Fe::ZERO; deg];
    q[deg - 1] = poly[deg];
    for k in (0..deg - 1).rev() {
        q[k] = f.add(poly[k + 1], f.mul(root, q[k + 1]));
    }
    let rem = f.add(poly[0], f.mul(root, q[0]));
    assert_eq!(rem, Fe::ZERO, "root divides the polynomial");
    q
}

/// Roots in `domain` with multiplicity (ascending, repeated scans keep the
/// list sorted), plus the rootless remaining factor.
fn linear_factorization(f: &FieldSpec, poly: &[Fe], domain: &[Fe]) -> (Vec<Fe>, Vec<Fe>) {
    let mut rem = poly.to_vec();
    let mut roots = Vec::new();
    while rem.len() > 1 {
        match domain.iter().find(|&&x| poly_eval(f, &rem, x) == Fe::ZERO) {
            Some(&root) => {
                roots.push(root);
                rem = deflate(f, &rem, root);
            }
            None => break,
        }
    }
    (roots, rem)
}

/// Conjugation-class label: characteristic and minimal polynomial
/// coefficient codes. For n <= 3 the pair separates classes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ClassLabel {
    pub charpoly: Vec<u32>,
    pub minpoly: Vec<u32>,
}

fn class_label(f: &FieldSpec, n: usize, a: &[Fe], pool: &[Fe]) -> ClassLabel {
    let cp = charpoly(f, n, a);
    for &c in &cp {
        debug_assert_eq!(f.frobenius(c, 1), c, "characteristic coefficients are fixed");
    }
    let mp = minpoly(f, n, a, pool);
    ClassLabel {
        charpoly: cp.iter().map(|c| c.0).collect(),
        minpoly: mp.iter().map(|c| c.0).collect(),
    }
}

fn map_label(label: &ClassLabel, table: &[u32]) -> ClassLabel {
    ClassLabel {
        charpoly: label.charpoly.iter().map(|&c| table[c as usize]).collect(),
        minpoly: label.minpoly.iter().map(|&c| table[c as usize]).collect(),
    }
}

// ---------------------------------------------------------------------------
// Class types of beta.

/// Shape of a conjugation class of an n x n matrix over F_q, n in {2, 3}:
/// eigenvalue data when the characteristic polynomial splits, otherwise the
/// irreducible factor data. Stars mark nontrivial Jordan links.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "tag")]
pub enum BetaClassType {
    Type1 { a: u32, b: u32, star: u8 },
    Type2 { s: u32, delta: u32 },
    Type1Split3 { a: u32, b: u32, c: u32, star1: u8, star2: u8 },
    Type2Mixed { s: u32, delta: u32, a: u32 },
    Type2Cubic { charpoly: Vec<u32> },
}

impl BetaClassType {
    /// Cycle type of the witness torus for this class shape.
    pub fn witness_cycles(&self) -> Vec<usize> {
        match self {
            BetaClassType::Type1 { .. } => vec![1, 1],
            BetaClassType::Type2 { .. } => vec![2],
            BetaClassType::Type1Split3 { .. } => vec![1, 1, 1],
            BetaClassType::Type2Mixed { .. } => vec![2, 1],
            BetaClassType::Type2Cubic { .. } => vec![3],
        }
    }

    /// Split types take the Borel witness; the others a twisted torus.
    pub fn is_split(&self) -> bool {
        matches!(self, BetaClassType::Type1 { .. } | BetaClassType::Type1Split3 { .. })
    }
}

/// Multiplicity of (x - root) in a monic polynomial.
fn root_multiplicity(f: &FieldSpec, poly: &[Fe], root: Fe) -> usize {
    let mut rem = poly.to_vec();
    let mut mult = 0;
    while rem.len() > 1 && poly_eval(f, &rem, root) == Fe::ZERO {
        rem = deflate(f, &rem, root);
        mult += 1;
    }
    mult
}

fn classify_from_label(f: &FieldSpec, n: usize, label: &ClassLabel) -> Result<BetaClassType> {
    let cp: Vec<Fe> = label.charpoly.iter().map(|&c| Fe(c)).collect();
    let mp: Vec<Fe> = label.minpoly.iter().map(|&c| Fe(c)).collect();
    let domain: Vec<Fe> = (0..f.size()).map(Fe).collect();
    let (roots, rem) = linear_factorization(f, &cp, &domain);
    match n {
        2 => {
            if roots.len() == 2 {
                let (a, b) = (roots[0], roots[1]);
                let star = u8::from(a == b && mp.len() == 3);
                Ok(BetaClassType::Type1 { a: a.0, b: b.0, star })
            } else {
                assert!(roots.is_empty() && rem.len() == 3, "quadratic with no roots");
                Ok(BetaClassType::Type2 { s: f.neg(rem[1]).0, delta: rem[0].0 })
            }
        }
        3 => match roots.len() {
            3 => {
                let (a, b, c) = (roots[0], roots[1], roots[2]);
                // Jordan links between adjacent equal eigenvalues, read off
                // the minimal polynomial's root multiplicities.
                let mut star1 = 0u8;
                let mut star2 = 0u8;
                if a == b && b == c {
                    match mp.len() - 1 {
                        1 => {}
                        2 => star1 = 1,
                        3 => {
                            star1 = 1;
                            star2 = 1;
                        }
                        _ => unreachable!(),
                    }
                } else if a == b {
                    star1 = u8::from(root_multiplicity(f, &mp, a) == 2);
                } else if b == c {
                    star2 = u8::from(root_multiplicity(f, &mp, b) == 2);
                }
                Ok(BetaClassType::Type1Split3 { a: a.0, b: b.0, c: c.0, star1, star2 })
            }
            1 => {
                assert_eq!(rem.len(), 3, "remaining factor is an irreducible quadratic");
                Ok(BetaClassType::Type2Mixed {
                    s: f.neg(rem[1]).0,
                    delta: rem[0].0,
                    a: roots[0].0,
                })
            }
            0 => Ok(BetaClassType::Type2Cubic { charpoly: label.charpoly.clone() }),
            _ => unreachable!("cubic root counts are 0, 1, or 3"),
        },
        _ => Err(LabError::Unsupported(format!("class types are defined for n in {{2, 3}}, got {n}"))),
    }
}

/// Classify a matrix over F_q (entries as field codes, row major).
pub fn classify_beta(f: &FieldSpec, n: usize, mat: &[Fe]) -> Result<BetaClassType> {
    if n != 2 && n != 3 {
        return Err(LabError::Unsupported(format!("class types are defined for n in {{2, 3}}, got {n}")));
    }
    let pool: Vec<Fe> = (0..f.size()).map(Fe).collect();
    let label = class_label(f, n, mat, &pool);
    classify_from_label(f, n, &label)
}

// ---------------------------------------------------------------------------
// Brute-force split-side orbit oracle: plain matrices over F_q under
// conjugation by invertible ones. Independent of the group machinery.

pub struct SplitOrbit {
    pub rep_code: u64,
    pub codes: Vec<u64>,
    pub label: ClassLabel,
    pub class_type: BetaClassType,
}

pub struct SplitAlgebra {
    pub field: Arc<FieldSpec>,
    pub n: usize,
    pub orbits: Vec<SplitOrbit>,
}

fn split_decode(size: u64, n: usize, code: u64) -> Vec<Fe> {
    let mut c = code;
    (0..n * n)
        .map(|_| {
            let e = Fe((c % size) as u32);
            c /= size;
            e
        })
        .collect()
}

fn split_encode(size: u64, mat: &[Fe]) -> u64 {
    mat.iter().rev().fold(0u64, |acc, e| acc * size + e.0 as u64)
}

pub fn split_algebra(p: u32, m: u32, n: usize) -> Result<SplitAlgebra> {
    let field = FieldSpec::build(p, m, 1)?;
    let size = field.size() as u64;
    let total = size.checked_pow((n * n) as u32).expect("matrix space fits in u64");
    if total > 1 << 20 {
        return Err(LabError::SizeCap { what: "matrix space", size: total as u128, cap: 1 << 20 });
    }
    let f = field.as_ref();
    let units: Vec<(Vec<Fe>, Vec<Fe>)> = (0..total)
        .filter_map(|code| {
            let g = split_decode(size, n, code);
            fmat_inv(f, n, &g).map(|gi| (g, gi))
        })
        .collect();
    let pool: Vec<Fe> = (0..f.size()).map(Fe).collect();
    let mut orbit_of = vec![u32::MAX; total as usize];
    let mut orbits = Vec::new();
    for code in 0..total {
        if orbit_of[code as usize] != u32::MAX {
            continue;
        }
        let a = split_decode(size, n, code);
        let mut codes = BTreeSet::new();
        for (g, gi) in &units {
            let c = fmat_mul(f, n, g, &fmat_mul(f, n, &a, gi));
            codes.insert(split_encode(size, &c));
        }
        let id = orbits.len() as u32;
        for &c in &codes {
            assert_eq!(orbit_of[c as usize], u32::MAX, "orbits are disjoint");
            orbit_of[c as usize] = id;
        }
        let label = class_label(f, n, &a, &pool);
        let class_type = classify_from_label(f, n, &label)?;
        orbits.push(SplitOrbit { rep_code: code, codes: codes.into_iter().collect(), label, class_type });
    }
    assert_eq!(orbits.iter().map(|o| o.codes.len() as u64).sum::<u64>(), total);
    Ok(SplitAlgebra { field, n, orbits })
}

// ---------------------------------------------------------------------------
// The kernel-side model for one torus shape.

pub struct LieOrbit {
    pub rep_pos: u32,
    pub positions: Vec<u32>,
    pub label: ClassLabel,
}

/// The congruence kernel of an r = 2 group viewed additively, with its
/// adjoint orbits, plus the torus and character data of the same group.
pub struct LieModel {
    group: Arc<GroupSpec>,
    torus: Arc<TorusTable>,
    tc: TorusChars,
    level: LevelData,
    g1: Arc<GroupSpec>,
    norm_sets: Vec<((usize, usize), BTreeSet<u32>)>,
    weyl: Vec<Perm>,
    kernel: Vec<u64>,
    xmats: Vec<Mat>,
    neg_pos: Vec<u32>,
    orbits: Vec<LieOrbit>,
    orbit_of: Vec<u32>,
}

impl LieModel {
    pub fn build(p: u32, m: u32, n: usize, lens: &[usize]) -> Result<Arc<LieModel>> {
        let group = GroupSpec::from_cycle_type(p, m, n, 2, lens)?;
        let torus = Arc::new(TorusTable::build(group.clone()));
        let tc = TorusChars::build(torus.clone());
        let level = LevelData::new(group.clone())?;
        let g1 = GroupSpec::from_cycle_type(p, m, n, 1, lens)?;
        let norm_sets = torus.root_norm_indices(1)?;
        let weyl = torus.weyl_elements();
        let kernel = group.level_kernel_keys(1);
        let xmats: Vec<Mat> = kernel.iter().map(|&k| level.shift_down(&group.decode(k))).collect();
        let ring = group.ring();
        let neg_pos: Vec<u32> = xmats
            .iter()
            .enumerate()
            .map(|(pos, x)| {
                let mut neg = group.mat_id();
                for (e, &c) in neg.iter_mut().zip(x.iter()) {
                    *e = ring.add(*e, ring.pi_shift(ring.neg(c), 1));
                }
                let key = group.encode(&neg);
                let found = kernel.binary_search(&key).expect("kernel is closed under negation") as u32;
                debug_assert_eq!(group.inv_key(kernel[pos]), key, "group inverse is the additive inverse");
                found
            })
            .collect();
        let mut model = LieModel {
            group,
            torus,
            tc,
            level,
            g1,
            norm_sets,
            weyl,
            kernel,
            xmats,
            neg_pos,
            orbits: Vec::new(),
            orbit_of: Vec::new(),
        };
        model.check_additive_model();
        model.build_orbits();
        Ok(Arc::new(model))
    }

    /// 1 + pi X is multiplicative exactly when X is additive; checked over
    /// every pair.
    fn check_additive_model(&self) {
        let ring = self.group.ring();
        let count = self.kernel.len();
        for a in 0..count {
            for b in 0..count {
                let prod = self.group.mul_keys(self.kernel[a], self.kernel[b]);
                let mut sum = self.group.mat_id();
                for (e, (&xa, &xb)) in sum.iter_mut().zip(self.xmats[a].iter().zip(&self.xmats[b])) {
                    *e = ring.add(*e, ring.pi_shift(ring.add(xa, xb), 1));
                }
                assert_eq!(prod, self.group.encode(&sum), "kernel is the additive matrix group");
            }
        }
    }

    fn build_orbits(&mut self) {
        let group = &self.group;
        let gens: Vec<(Mat, Mat)> = group
            .generators()
            .iter()
            .map(|&g| {
                let gm = group.decode(g);
                let gi = group.mat_inv(&gm).expect("group element");
                (gm, gi)
            })
            .collect();
        let field = group.field();
        let pool = field.fixed_subfield_elems(1);
        let mut orbit_of = vec![u32::MAX; self.kernel.len()];
        let mut orbits: Vec<LieOrbit> = Vec::new();
        let mut seen_labels: BTreeMap<ClassLabel, u32> = BTreeMap::new();
        for start in 0..self.kernel.len() {
            if orbit_of[start] != u32::MAX {
                continue;
            }
            let id = orbits.len() as u32;
            orbit_of[start] = id;
            let mut positions = vec![start as u32];
            let mut frontier = vec![start];
            while let Some(pos) = frontier.pop() {
                let k = self.kernel[pos];
                for (gm, gi) in &gens {
                    let conj = group.mat_mul(gm, &group.mat_mul(&group.decode(k), gi));
                    let ck = group.encode(&conj);
                    let cpos = self.kernel.binary_search(&ck).expect("kernel is normal");
                    if orbit_of[cpos] == u32::MAX {
                        orbit_of[cpos] = id;
                        positions.push(cpos as u32);
                        frontier.push(cpos);
                    }
                }
            }
            positions.sort_unstable();
            let label = class_label(field, group.n(), &self.x_entries(start), &pool);
            let prev = seen_labels.insert(label.clone(), id);
            assert!(prev.is_none(), "labels separate adjoint orbits for n <= 3");
            orbits.push(LieOrbit { rep_pos: start as u32, positions, label });
        }
        assert_eq!(orbits.iter().map(|o| o.positions.len()).sum::<usize>(), self.kernel.len());
        self.orbits = orbits;
        self.orbit_of = orbit_of;
    }

    /// Field entries of the kernel matrix at a position.
    fn x_entries(&self, pos: usize) -> Vec<Fe> {
        self.xmats[pos].iter().map(|e| Fe(e[0])).collect()
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }
    pub fn torus(&self) -> &Arc<TorusTable> {
        &self.torus
    }
    pub fn chars(&self) -> &TorusChars {
        &self.tc
    }
    pub fn level(&self) -> &LevelData {
        &self.level
    }
    pub fn kernel(&self) -> &[u64] {
        &self.kernel
    }
    pub fn orbits(&self) -> &[LieOrbit] {
        &self.orbits
    }
    pub fn orbit_of(&self, pos: usize) -> usize {
        self.orbit_of[pos] as usize
    }

    /// Kernel key of the additive inverse.
    pub fn neg_key(&self, pos: usize) -> u64 {
        self.kernel[self.neg_pos[pos] as usize]
    }

    pub fn genericity(&self, theta: u32) -> Result<GenericityReport> {
        genericity_report(&self.tc, &self.level, &self.g1, &self.norm_sets, &self.weyl, theta)
    }

    /// Upper-triangular subgroup; the witness for split class types.
    pub fn borel_keys(&self) -> Vec<u64> {
        let n = self.group.n();
        self.group
            .elements()
            .iter()
            .copied()
            .filter(|&k| {
                let g = self.group.decode(k);
                (0..n).all(|i| (0..i).all(|j| g[i * n + j] == RT_ZERO))
            })
            .collect()
    }

    /// Character value of theta on the diagonal part of an upper-triangular
    /// element.
    pub fn borel_value(&self, theta: u32, key: u64) -> CycloValue {
        let g = self.group.decode(key);
        let n = self.group.n();
        let mut diag = vec![RT_ZERO; n * n];
        for i in 0..n {
            diag[i * n + i] = g[i * n + i];
        }
        let idx = self
            .torus
            .index_of_key(self.group.encode(&diag))
            .expect("diagonal part of a triangular element lies in the torus");
        self.tc.value(theta, idx)
    }
}

/// One irreducible invariant character: the sum of psi_beta over one
/// adjoint orbit. Values are constant on orbits of the argument; stored per
/// argument orbit. Orbit sums are exactly the invariant characters that are
/// not sums of two invariant ones, the kernel being abelian.
pub struct InvariantCharacter {
    pub orbit: usize,
    values: Vec<CycloValue>,
}

impl InvariantCharacter {
    pub fn value_at_pos(&self, model: &LieModel, pos: usize) -> &CycloValue {
        &self.values[model.orbit_of(pos)]
    }
    pub fn orbit_size(&self, model: &LieModel) -> usize {
        model.orbits[self.orbit].positions.len()
    }
}

/// All irreducible invariant characters, one per adjoint orbit, each checked
/// for invariance on sampled orbit members.
pub fn invariant_characters(model: &LieModel) -> Vec<InvariantCharacter> {
    let level = &model.level;
    let orbit_value = |orbit: &LieOrbit, arg_pos: usize| {
        let mut acc = CycloValue::zero();
        for &bpos in &orbit.positions {
            acc = acc.add(&level.psi_value(&model.xmats[bpos as usize], model.kernel[arg_pos]));
        }
        acc
    };
    model
        .orbits
        .iter()
        .enumerate()
        .map(|(o, orbit)| {
            let values: Vec<CycloValue> = model
                .orbits
                .iter()
                .map(|arg| {
                    let v = orbit_value(orbit, arg.rep_pos as usize);
                    for &p in arg.positions.iter().filter(|&&p| p != arg.rep_pos).take(3) {
                        assert_eq!(orbit_value(orbit, p as usize), v, "orbit sum is invariant");
                    }
                    v
                })
                .collect();
            InvariantCharacter { orbit: o, values }
        })
        .collect()
}

/// Both brackets of one pairing: num/den is the displayed bracket
/// (1/|G_1|) sum over X of Psi(X) R(-X); `inner` is the ordinary inner
/// product of Psi with the restriction of R to the kernel. The two are
/// computed independently and tied by num = |g| * inner.
#[derive(Debug, Clone, Serialize)]
pub struct PairingOutcome {
    pub num: i128,
    pub den: u64,
    pub inner: i128,
}

impl PairingOutcome {
    pub fn value(&self) -> CycloValue {
        CycloValue::from_ratio(self.num, self.den as i128)
    }
    pub fn nonzero(&self) -> bool {
        self.num != 0
    }
}

pub fn letellier_pairing(model: &LieModel, psi: &InvariantCharacter, r: &ClassFunction) -> Result<PairingOutcome> {
    let mut bracket = CycloValue::zero();
    let mut inner = CycloValue::zero();
    for pos in 0..model.kernel.len() {
        let pv = psi.value_at_pos(model, pos);
        bracket = bracket.add(&pv.mul(r.value_at_key(model.neg_key(pos))));
        inner = inner.add(&pv.mul(&r.value_at_key(model.kernel[pos]).conj()));
    }
    let g_size = model.kernel.len() as i128;
    let num = crate::clfun::as_integer(&bracket)?;
    let inner = crate::clfun::as_integer(&inner.scale(1, g_size))?;
    assert_eq!(num, g_size * inner, "the two brackets agree up to the kernel size");
    assert!(inner >= 0, "restriction multiplicity is nonnegative");
    Ok(PairingOutcome { num, den: model.group.order(), inner })
}

/// Floating route for the displayed bracket, for dual-mode comparison.
pub fn letellier_pairing_numeric(model: &LieModel, psi: &InvariantCharacter, r: &ClassFunction) -> Complex64 {
    let psi_num: Vec<Complex64> = model.orbits.iter().enumerate().map(|(o, _)| psi.values[o].eval_complex()).collect();
    let terms: Vec<Complex64> = (0..model.kernel.len())
        .map(|pos| psi_num[model.orbit_of(pos)] * r.value_at_key(model.neg_key(pos)).eval_complex())
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for t in terms {
        total += t;
    }
    total / model.group.order() as f64
}

// ---------------------------------------------------------------------------
// The full verification run.

#[derive(Debug, Clone, Serialize)]
pub struct FallbackNote {
    pub torus_cycles: Vec<usize>,
    pub theta_id: u32,
    pub pairing_num: i128,
}

#[derive(Serialize)]
pub struct LetellierRow {
    pub beta_type: BetaClassType,
    pub beta_rep: Vec<u32>,
    pub torus_cycles: Vec<usize>,
    pub theta_id: u32,
    pub pairing_num: i128,
    pub pairing_den: u64,
    pub nonzero: bool,
    pub all_theta_choices_nonzero: bool,
    pub dual_residual: f64,
    pub genericity: Option<GenericityReport>,
    pub fallback: Option<FallbackNote>,
}

#[derive(Serialize)]
pub struct LetellierReport {
    pub n: usize,
    pub q: u64,
    pub invariant_count: usize,
    pub split_class_count: usize,
    pub rows: Vec<LetellierRow>,
    pub all_nonzero: bool,
    pub fallback_used: bool,
}

struct ModelBundle {
    model: Arc<LieModel>,
    invchars: Vec<InvariantCharacter>,
    embed: Vec<u32>,
    witness_sub: Subgroup,
    betas: Vec<Mat>,
}

impl ModelBundle {
    fn build(p: u32, m: u32, n: usize, lens: &[usize], split_field: &FieldSpec) -> Result<ModelBundle> {
        let model = LieModel::build(p, m, n, lens)?;
        let invchars = invariant_characters(&model);
        let embed = embedding(split_field, model.group.field())?;
        let split_witness = lens.iter().all(|&l| l == 1);
        let witness_sub = if split_witness {
            Subgroup::from_keys(model.borel_keys())
        } else {
            Subgroup::from_keys(model.group.tu_keys(1))
        };
        let betas: Vec<Mat> = (0..model.tc.count() as u32)
            .map(|theta| model.level.extract_beta(&model.tc, theta))
            .collect::<Result<_>>()?;
        // Warm the class partition before rows fan out in parallel.
        model.group.conjugacy_classes();
        Ok(ModelBundle { model, invchars, embed, witness_sub, betas })
    }

    fn induce_theta(&self, theta: u32, split_witness: bool) -> ClassFunction {
        let model = &self.model;
        if split_witness {
            induce(model.group(), &self.witness_sub, &|key| model.borel_value(theta, key))
        } else {
            induce(model.group(), &self.witness_sub, &|key| {
                model.tc.extended_value(theta, key).expect("congruence diagonal element")
            })
        }
    }
}

/// The diagonal beta the witness theta must restrict to: eigenvalues of the
/// split representative arranged along the torus cycles, each cycle holding
/// the q-power translates of the smallest root of its factor.
fn required_beta_diag(bundle: &ModelBundle, split: &SplitAlgebra, orbit: &SplitOrbit) -> Mat {
    let model = &bundle.model;
    let field = model.group.field();
    let ring = model.group.ring();
    let n = model.group.n();
    let sf = split.field.as_ref();
    let cp: Vec<Fe> = orbit.label.charpoly.iter().map(|&c| Fe(c)).collect();
    let domain: Vec<Fe> = (0..sf.size()).map(Fe).collect();
    let (roots, rem) = linear_factorization(sf, &cp, &domain);
    let mut factors: Vec<Vec<Fe>> = roots.iter().map(|&a| vec![sf.neg(a), Fe::ONE]).collect();
    if rem.len() > 1 {
        factors.push(rem);
    }
    let mut entries = vec![Fe::ZERO; n];
    let mut used = vec![false; factors.len()];
    for cycle in model.torus.cycles() {
        let s = cycle.len();
        let fi = (0..factors.len())
            .find(|&i| !used[i] && factors[i].len() - 1 == s)
            .expect("factor degrees match the torus cycle type");
        used[fi] = true;
        let mapped: Vec<Fe> = factors[fi].iter().map(|c| Fe(bundle.embed[c.0 as usize])).collect();
        let root = field
            .fixed_subfield_elems(s as u32)
            .into_iter()
            .find(|&x| poly_eval(field, &mapped, x) == Fe::ZERO)
            .expect("the factor splits over its degree subfield");
        for (j, &i) in cycle.iter().enumerate() {
            entries[i] = field.frobenius(root, j as u32);
        }
    }
    let mut beta = vec![RT_ZERO; n * n];
    for (i, e) in entries.into_iter().enumerate() {
        beta[i * n + i] = ring.from_residue(e);
    }
    debug_assert!(model.group.is_fixed(&beta), "beta respects the twisting");
    beta
}

fn compute_row(bundle: &ModelBundle, split: &SplitAlgebra, orbit: &SplitOrbit) -> Result<LetellierRow> {
    let model = &bundle.model;
    let split_witness = orbit.class_type.is_split();
    let mapped = map_label(&orbit.label, &bundle.embed);
    let matches: Vec<usize> = model
        .orbits()
        .iter()
        .enumerate()
        .filter(|(_, o)| o.label == mapped)
        .map(|(i, _)| i)
        .collect();
    assert_eq!(matches.len(), 1, "exactly one adjoint orbit matches the label");
    let psi = &bundle.invchars[matches[0]];
    assert_eq!(psi.orbit_size(model), orbit.codes.len(), "matched orbits have equal size");

    let required = required_beta_diag(bundle, split, orbit);
    let thetas: Vec<u32> = (0..bundle.betas.len() as u32)
        .filter(|&t| bundle.betas[t as usize] == required)
        .collect();
    assert!(!thetas.is_empty(), "the restriction map onto kernel characters is onto");
    let theta_id = thetas[0];

    let r_chosen = bundle.induce_theta(theta_id, split_witness);
    let outcome = letellier_pairing(model, psi, &r_chosen)?;
    let numeric = letellier_pairing_numeric(model, psi, &r_chosen);
    let dual_residual = (numeric - Complex64::new(outcome.num as f64 / outcome.den as f64, 0.0)).norm();
    let mut all_nonzero = outcome.nonzero();
    for &t in thetas.iter().filter(|&&t| t != theta_id) {
        let r = bundle.induce_theta(t, split_witness);
        all_nonzero &= letellier_pairing(model, psi, &r)?.nonzero();
    }

    let genericity = if split_witness { None } else { Some(model.genericity(theta_id)?) };

    Ok(LetellierRow {
        beta_type: orbit.class_type.clone(),
        beta_rep: split_decode(split.field.size() as u64, split.n, orbit.rep_code)
            .iter()
            .map(|e| e.0)
            .collect(),
        torus_cycles: model.torus.cycles().iter().map(|c| c.len()).collect(),
        theta_id,
        pairing_num: outcome.num,
        pairing_den: outcome.den,
        nonzero: outcome.nonzero(),
        all_theta_choices_nonzero: all_nonzero,
        dual_residual,
        genericity,
        fallback: None,
    })
}

/// When the prescribed witness pairs to zero (never expected), scan every
/// torus shape and every theta for a nonzero pairing, so a failure of the
/// strategy is reported distinctly from a failure of the statement.
fn fallback_scan(
    p: u32,
    m: u32,
    n: usize,
    split: &SplitAlgebra,
    orbit: &SplitOrbit,
) -> Result<Option<FallbackNote>> {
    let shapes: &[&[usize]] = if n == 2 { &[&[1, 1], &[2]] } else { &[&[1, 1, 1], &[2, 1], &[3]] };
    for lens in shapes {
        let bundle = ModelBundle::build(p, m, n, lens, &split.field)?;
        let mapped = map_label(&orbit.label, &bundle.embed);
        let Some(oi) = bundle.model.orbits().iter().position(|o| o.label == mapped) else {
            continue;
        };
        let psi = &bundle.invchars[oi];
        let split_witness = lens.iter().all(|&l| l == 1);
        for theta in 0..bundle.model.tc.count() as u32 {
            let r = bundle.induce_theta(theta, split_witness);
            let outcome = letellier_pairing(&bundle.model, psi, &r)?;
            if outcome.nonzero() {
                return Ok(Some(FallbackNote {
                    torus_cycles: lens.to_vec(),
                    theta_id: theta,
                    pairing_num: outcome.num,
                }));
            }
        }
    }
    Ok(None)
}

/// Pair every irreducible invariant character against its prescribed
/// witness and report the outcomes. Rows are ordered by the canonical split
/// representative.
pub fn verify_letellier(p: u32, m: u32, n: usize) -> Result<LetellierReport> {
    if n != 2 && n != 3 {
        return Err(LabError::Unsupported(format!("the verification covers n in {{2, 3}}, got {n}")));
    }
    let split = split_algebra(p, m, n)?;
    let mut needed: BTreeSet<Vec<usize>> = BTreeSet::new();
    for orbit in &split.orbits {
        needed.insert(orbit.class_type.witness_cycles());
    }
    let mut bundles: BTreeMap<Vec<usize>, ModelBundle> = BTreeMap::new();
    for lens in &needed {
        let bundle = ModelBundle::build(p, m, n, lens, &split.field)?;
        assert_eq!(
            bundle.model.orbits().len(),
            split.orbits.len(),
            "adjoint orbit count matches the split class count"
        );
        bundles.insert(lens.clone(), bundle);
    }

    let mut rows: Vec<LetellierRow> = split
        .orbits
        .par_iter()
        .map(|orbit| compute_row(&bundles[&orbit.class_type.witness_cycles()], &split, orbit))
        .collect::<Result<_>>()?;

    let mut fallback_used = false;
    for (row, orbit) in rows.iter_mut().zip(&split.orbits) {
        if !row.nonzero {
            row.fallback = fallback_scan(p, m, n, &split, orbit)?;
            fallback_used = true;
        }
    }

    let all_nonzero = rows.iter().all(|r| r.nonzero);
    Ok(LetellierReport {
        n,
        q: split.field.q(),
        invariant_count: bundles.values().next().expect("at least one witness shape").model.orbits().len(),
        split_class_count: split.orbits.len(),
        rows,
        all_nonzero,
        fallback_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_matches_known_shapes() {
        let f = FieldSpec::build(2, 1, 1).unwrap();
        let zero = vec![Fe::ZERO; 4];
        assert_eq!(classify_beta(&f, 2, &zero).unwrap(), BetaClassType::Type1 { a: 0, b: 0, star: 0 });
        // Companion matrix of the irreducible x^2 + x + 1.
        let comp = vec![Fe::ZERO, Fe::ONE, Fe::ONE, Fe::ONE];
        assert_eq!(classify_beta(&f, 2, &comp).unwrap(), BetaClassType::Type2 { s: 1, delta: 1 });
        // Jordan block at 0.
        let jordan = vec![Fe::ZERO, Fe::ONE, Fe::ZERO, Fe::ZERO];
        assert_eq!(classify_beta(&f, 2, &jordan).unwrap(), BetaClassType::Type1 { a: 0, b: 0, star: 1 });
        assert!(classify_beta(&f, 4, &vec![Fe::ZERO; 16]).is_err());
    }

    #[test]
    fn split_orbit_counts() {
        assert_eq!(split_algebra(2, 1, 2).unwrap().orbits.len(), 6);
        assert_eq!(split_algebra(3, 1, 2).unwrap().orbits.len(), 12);
        assert_eq!(split_algebra(2, 1, 3).unwrap().orbits.len(), 14);
    }

    #[test]
    fn split_orbits_have_distinct_labels() {
        let alg = split_algebra(3, 1, 2).unwrap();
        let labels: BTreeSet<_> = alg.orbits.iter().map(|o| o.label.clone()).collect();
        assert_eq!(labels.len(), alg.orbits.len());
    }

    #[test]
    fn kernel_model_orbits_match_split_count() {
        let model = LieModel::build(2, 1, 2, &[2]).unwrap();
        assert_eq!(model.kernel().len(), 16);
        assert_eq!(model.orbits().len(), 6);
        let chars = invariant_characters(&model);
        assert_eq!(chars.len(), 6);
        // The zero orbit is a fixed point of the action.
        assert_eq!(model.orbits()[0].positions.len(), 1);
        assert!(chars[0].values.iter().all(|v| v.as_rational().is_some()));
    }

    #[test]
    fn minimal_polynomials_divide_characteristic() {
        let f = FieldSpec::build(3, 1, 1).unwrap();
        let pool: Vec<Fe> = (0..3).map(Fe).collect();
        for code in 0..81u64 {
            let a = split_decode(3, 2, code);
            let cp = charpoly(&f, 2, &a);
            let mp = minpoly(&f, 2, &a, &pool);
            assert!(poly_eval_mat(&f, 2, &mp, &a).iter().all(|&c| c == Fe::ZERO));
            assert!(mp.len() <= cp.len());
        }
    }

    #[test]
    fn full_run_at_n2_q2() {
        let report = verify_letellier(2, 1, 2).unwrap();
        assert_eq!(report.invariant_count, 6);
        assert_eq!(report.split_class_count, 6);
        assert_eq!(report.rows.len(), 6);
        assert!(report.all_nonzero);
        assert!(!report.fallback_used);
        for row in &report.rows {
            assert!(row.all_theta_choices_nonzero);
            assert_eq!(row.pairing_den, 96);
            assert!(row.dual_residual < 1e-6);
            if let Some(g) = &row.genericity {
                assert!(g.is_generic(), "twisted witnesses are generic");
            }
            match row.beta_type {
                BetaClassType::Type2 { .. } => {
                    assert_eq!(row.torus_cycles, vec![2]);
                    assert!(row.genericity.is_some());
                }
                BetaClassType::Type1 { .. } => {
                    assert_eq!(row.torus_cycles, vec![1, 1]);
                    assert!(row.genericity.is_none());
                }
                _ => panic!("n = 2 shapes only"),
            }
        }
        // One irreducible quadratic shape at q = 2.
        let twisted = report.rows.iter().filter(|r| !r.beta_type.is_split()).count();
        assert_eq!(twisted, 1);
    }

    #[test]
    fn borel_subgroup_size() {
        let model = LieModel::build(2, 1, 2, &[1, 1]).unwrap();
        // Upper-triangular invertibles over the length-2 ring: 4 * 4 * 4.
        assert_eq!(model.borel_keys().len(), 16);
    }
}
