//! Brute-force reference implementations. Nothing here calls the library's
//! arithmetic or search code; elements are plain residue vectors indexed in
//! lexicographic order.
#![allow(dead_code)]

use std::collections::BTreeSet;

use zerosum::{GroupSpec, Sequence};

pub fn grp(factors: &[i64]) -> GroupSpec {
    GroupSpec::new(factors).unwrap()
}

/// Every invariant-factor chain with order at most `max_order` and rank at most 3.
pub fn groups_up_to(max_order: usize) -> Vec<GroupSpec> {
    let mut out = Vec::new();
    for a in 2..=max_order {
        out.push(vec![a]);
        for b in (a..=max_order / a).filter(|b| b % a == 0) {
            out.push(vec![a, b]);
            for c in (b..=max_order / (a * b)).filter(|c| c % b == 0) {
                out.push(vec![a, b, c]);
            }
        }
    }
    out.iter().map(|f| GroupSpec::new(&f.iter().map(|&x| x as i64).collect::<Vec<_>>()).unwrap()).collect()
}

pub struct Brute {
    pub group: GroupSpec,
    pub factors: Vec<usize>,
    pub elems: Vec<Vec<usize>>,
    table: Vec<usize>,
}

impl Brute {
    pub fn new(group: &GroupSpec) -> Self {
        let factors: Vec<usize> = group.invariant_factors().iter().map(|&f| f as usize).collect();
        let mut elems = vec![vec![]];
        for &f in &factors {
            elems = elems.into_iter().flat_map(|e| (0..f).map(move |r| [e.clone(), vec![r]].concat())).collect();
        }
        let mut b = Brute { group: group.clone(), factors, elems, table: Vec::new() };
        let n = b.n();
        b.table = (0..n * n)
            .map(|ij| {
                let r: Vec<usize> = b.elems[ij / n].iter().zip(&b.elems[ij % n]).map(|(x, y)| x + y).collect();
                b.index(&r)
            })
            .collect();
        b
    }

    pub fn n(&self) -> usize {
        self.elems.len()
    }

    pub fn index(&self, r: &[usize]) -> usize {
        r.iter().zip(&self.factors).fold(0, |acc, (&x, &f)| acc * f + x % f)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n() + b]
    }

    pub fn neg(&self, a: usize) -> usize {
        let r: Vec<usize> = self.elems[a].iter().zip(&self.factors).map(|(x, f)| f - x).collect();
        self.index(&r)
    }

    pub fn sum(&self, s: &[usize]) -> usize {
        s.iter().fold(0, |acc, &g| self.add(acc, g))
    }

    /// Sums of all `2^|s|` position subsets, indexed by bitmask.
    pub fn mask_sums(&self, s: &[usize]) -> Vec<usize> {
        let mut sums = vec![0; 1 << s.len()];
        for mask in 1usize..sums.len() {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = self.add(sums[mask & (mask - 1)], s[low]);
        }
        sums
    }

    pub fn is_zero_sum_free(&self, s: &[usize]) -> bool {
        self.mask_sums(s)[1..].iter().all(|&x| x != 0)
    }

    pub fn is_mzss(&self, s: &[usize]) -> bool {
        if s.is_empty() {
            return false;
        }
        let sums = self.mask_sums(s);
        let full = sums.len() - 1;
        sums[full] == 0 && sums[1..full].iter().all(|&x| x != 0)
    }

    /// Largest number of disjoint nonempty zero-sum blocks covering `s`.
    pub fn max_factors(&self, s: &[usize]) -> Option<usize> {
        let sums = self.mask_sums(s);
        let full = sums.len() - 1;
        if sums[full] != 0 {
            return None;
        }
        let mut best = vec![0usize; full + 1];
        for mask in 1..=full {
            if sums[mask] != 0 {
                continue;
            }
            let low = mask & mask.wrapping_neg();
            let mut sub = mask;
            let mut b = 0;
            while sub > 0 {
                if sub & low != 0 && sums[sub] == 0 && (sub == mask || best[mask ^ sub] > 0) {
                    b = b.max(1 + best[mask ^ sub]);
                }
                sub = (sub - 1) & mask;
            }
            best[mask] = b;
        }
        Some(best[full])
    }

    /// Lexicographically least zero-sum sub-multiset of `s` of size `k`.
    pub fn least_zero_sum_of_size(&self, s: &[usize], k: usize) -> Option<Vec<usize>> {
        let sums = self.mask_sums(s);
        (0..sums.len())
            .filter(|&m| m.count_ones() as usize == k && sums[m] == 0)
            .map(|m| {
                let mut t: Vec<usize> = (0..s.len()).filter(|i| m >> i & 1 == 1).map(|i| s[i]).collect();
                t.sort();
                t
            })
            .min()
    }

    pub fn seq(&self, s: &[usize]) -> Sequence {
        let elems = s.iter().map(|&i| {
            let r: Vec<i64> = self.elems[i].iter().map(|&x| x as i64).collect();
            self.group.element(&r).unwrap()
        });
        Sequence::from_elements(&self.group, elems).unwrap()
    }

    pub fn indices(&self, s: &Sequence) -> Vec<usize> {
        let mut out: Vec<usize> =
            s.expanded().map(|g| self.index(&g.residues().iter().map(|&x| x as usize).collect::<Vec<_>>())).collect();
        out.sort();
        out
    }

    /// Automorphisms as permutations of element indices, found by trying every
    /// image tuple for the standard generators.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let rank = self.factors.len();
        let mut out = Vec::new();
        let mut images = vec![0usize; rank];
        'tuples: loop {
            if self.well_defined(&images) {
                let perm: Vec<usize> = self
                    .elems
                    .iter()
                    .map(|r| r.iter().zip(&images).fold(0, |acc, (&k, &img)| self.add(acc, self.scale(k, img))))
                    .collect();
                let distinct: BTreeSet<usize> = perm.iter().copied().collect();
                if distinct.len() == perm.len() {
                    out.push(perm);
                }
            }
            for slot in images.iter_mut().rev() {
                *slot += 1;
                if *slot < self.n() {
                    continue 'tuples;
                }
                *slot = 0;
            }
            break;
        }
        out
    }

    fn scale(&self, k: usize, g: usize) -> usize {
        (0..k).fold(0, |acc, _| self.add(acc, g))
    }

    fn well_defined(&self, images: &[usize]) -> bool {
        images.iter().zip(&self.factors).all(|(&img, &f)| self.scale(f, img) == 0)
    }

    /// Number of orbits of `set` (sorted index vectors) under `perms`.
    pub fn orbit_count(&self, set: &BTreeSet<Vec<usize>>, perms: &[Vec<usize>]) -> usize {
        let canon: BTreeSet<Vec<usize>> = set
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|p| {
                        let mut t: Vec<usize> = s.iter().map(|&i| p[i]).collect();
                        t.sort();
                        t
                    })
                    .min()
                    .unwrap()
            })
            .collect();
        canon.len()
    }

    /// `D(G)` as the least length at which every sequence has a zero-sum subsequence.
    pub fn davenport(&self) -> usize {
        (1..).find(|&len| !multisets(self.n(), len).iter().any(|s| self.is_zero_sum_free(s))).unwrap()
    }

    /// All minimal zero-sum sequences of length `len`.
    pub fn mzss_of_length(&self, len: usize) -> BTreeSet<Vec<usize>> {
        multisets(self.n(), len).into_iter().filter(|s| self.is_mzss(s)).collect()
    }
}

/// Nondecreasing index vectors of length `len` over `[0, n)`.
pub fn multisets(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(len);
    fn rec(n: usize, len: usize, lo: usize, buf: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if buf.len() == len {
            out.push(buf.clone());
            return;
        }
        for g in lo..n {
            buf.push(g);
            rec(n, len, g, buf, out);
            buf.pop();
        }
    }
    rec(n, len, 0, &mut buf, &mut out);
    out
}
