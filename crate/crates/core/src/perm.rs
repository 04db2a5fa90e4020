//! Permutations of {0, .., n-1} and centralizers in the symmetric group.

use serde::{Deserialize, Serialize};

/// A permutation stored as its image vector: `apply(i) = images[i]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Self {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            assert!(i < n && !seen[i], "not a permutation");
            seen[i] = true;
        }
        Perm { images }
    }

    /// Permutation with the given cycles on consecutive blocks:
    /// `[3, 2]` gives (0 1 2)(3 4).
    pub fn block_cycles(lens: &[usize]) -> Self {
        let n: usize = lens.iter().sum();
        let mut images: Vec<usize> = (0..n).collect();
        let mut start = 0;
        for &len in lens {
            for k in 0..len {
                images[start + k] = start + (k + 1) % len;
            }
            start += len;
        }
        Perm { images }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.n()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Perm { images }
    }

    /// Composition acting left-to-right as functions: `(a.compose(b)).apply(i) = a.apply(b.apply(i))`.
    pub fn compose(&self, other: &Perm) -> Self {
        assert_eq!(self.n(), other.n());
        Perm { images: (0..self.n()).map(|i| self.apply(other.apply(i))).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.compose(self);
            k += 1;
        }
        k
    }

    /// Cycles sorted by their smallest element, each starting at its smallest element.
    /// Fixed points are included as singleton cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cyc = vec![start];
            seen[start] = true;
            let mut cur = self.apply(start);
            while cur != start {
                seen[cur] = true;
                cyc.push(cur);
                cur = self.apply(cur);
            }
            out.push(cyc);
        }
        out
    }

    /// Cycle lengths in the order produced by `cycles()`.
    pub fn cycle_lens(&self) -> Vec<usize> {
        self.cycles().iter().map(|c| c.len()).collect()
    }
}

/// All permutations of {0,..,n-1} in lexicographic order of image vectors. For oracles only.
pub fn all_perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut cur = (0..n).collect::<Vec<_>>();
    loop {
        out.push(Perm { images: cur.clone() });
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Structural generators of the centralizer of `w` in the symmetric group:
/// each cycle of `w` itself, plus position-wise swaps of equal-length cycles.
pub fn centralizer_generators(w: &Perm) -> Vec<Perm> {
    let n = w.n();
    let cycles = w.cycles();
    let mut gens = Vec::new();
    for c in &cycles {
        if c.len() > 1 {
            let mut images: Vec<usize> = (0..n).collect();
            for k in 0..c.len() {
                images[c[k]] = c[(k + 1) % c.len()];
            }
            gens.push(Perm { images });
        }
    }
    for (a, ca) in cycles.iter().enumerate() {
        for cb in cycles.iter().skip(a + 1) {
            if ca.len() == cb.len() {
                let mut images: Vec<usize> = (0..n).collect();
                for k in 0..ca.len() {
                    images[ca[k]] = cb[k];
                    images[cb[k]] = ca[k];
                }
                gens.push(Perm { images });
            }
        }
    }
    gens
}

/// The centralizer of `w`, generated by `centralizer_generators` and closed off,
/// sorted with the identity first. Its order is `prod_s mult_s! * s^mult_s` over
/// cycle lengths `s` with multiplicity `mult_s`.
pub fn centralizer(w: &Perm) -> Vec<Perm> {
    let mut set = std::collections::BTreeSet::new();
    set.insert(Perm::identity(w.n()));
    let gens = centralizer_generators(w);
    loop {
        let mut grew = false;
        let snapshot: Vec<Perm> = set.iter().cloned().collect();
        for x in &snapshot {
            for g in &gens {
                let y = x.compose(g);
                if set.insert(y) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    set.into_iter().collect()
}

pub fn centralizer_order(w: &Perm) -> u64 {
    let mut mult = std::collections::BTreeMap::new();
    for c in w.cycles() {
        *mult.entry(c.len()).or_insert(0u64) += 1;
    }
    let mut ord = 1u64;
    for (s, k) in mult {
        let mut f = 1u64;
        for i in 1..=k {
            f *= i;
        }
        ord *= f * (s as u64).pow(k as u32);
    }
    ord
}
