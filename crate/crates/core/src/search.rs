//! Exhaustive search: Davenport's constant, enumeration of minimal zero-sum
//! sequences of maximal length (ml-mzss), and orbit reduction under `Aut(G)`.
//!
//! Both searches walk nondecreasing zero-sum-free sequences of dense element
//! indices, keeping the set of nonempty subsums as a bitset per depth. A term
//! `g` may extend `U` iff `g ≠ 0` and `-g` is not a subsum of `U`.
//!
//! The DFS forest is split by first term. Each subtree is searched with no
//! shared mutable state, so results and node counts do not depend on the
//! number of workers, and subtree outputs concatenate in lexicographic order.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::Result;
use crate::group::{
    automorphisms_with_cap, cayley, Cayley, GroupSpec, DEFAULT_ARITHMETIC_CAP, DEFAULT_AUTOMORPHISM_CAP,
};
use crate::sequence::Sequence;

/// Order caps for the various searches. Exceeding one is an explicit error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub arithmetic_max_order: usize,
    pub automorphism_max_order: usize,
    pub enumeration_max_order: usize,
    pub davenport_max_order: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            arithmetic_max_order: DEFAULT_ARITHMETIC_CAP,
            automorphism_max_order: DEFAULT_AUTOMORPHISM_CAP,
            enumeration_max_order: 36,
            davenport_max_order: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub caps: Caps,
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { caps: Caps::default(), workers: 1 }
    }
}

impl SearchConfig {
    pub fn with_workers(workers: usize) -> Self {
        SearchConfig { workers: workers.max(1), ..Self::default() }
    }

    /// Runs `f` on a pool of `workers` threads, or inline for a single worker.
    pub(crate) fn run<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        if self.workers <= 1 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.workers).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DavenportResult {
    pub group: GroupSpec,
    pub d: usize,
    /// Lexicographically least zero-sum-free `U` of length `D - 1`, extended by `-σ(U)`.
    pub witness: Sequence,
    pub elapsed: Duration,
    pub nodes_explored: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationReport {
    pub group: GroupSpec,
    pub length: usize,
    pub total_count: u64,
    pub orbit_count: u64,
    /// Canonical form of each orbit, sorted.
    pub orbit_representatives: Vec<Sequence>,
    pub elapsed: Duration,
    pub nodes: u64,
}

/// Summary of a streamed enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationStats {
    pub length: usize,
    pub total_count: u64,
    pub nodes: u64,
}

struct Dfs<'a> {
    table: &'a Cayley,
    words: usize,
    reach: Vec<u64>,
    sums: Vec<usize>,
    terms: Vec<usize>,
    nodes: u64,
}

impl<'a> Dfs<'a> {
    fn new(table: &'a Cayley, max_depth: usize) -> Self {
        let words = table.n.div_ceil(64);
        Dfs {
            table,
            words,
            reach: vec![0; words * (max_depth + 2)],
            sums: vec![0; max_depth + 2],
            terms: Vec::with_capacity(max_depth + 1),
            nodes: 0,
        }
    }

    #[inline]
    fn reachable(&self, depth: usize, g: usize) -> bool {
        self.reach[depth * self.words + g / 64] >> (g % 64) & 1 == 1
    }

    fn count(&self, depth: usize) -> usize {
        self.reach[depth * self.words..(depth + 1) * self.words].iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Whether `g` keeps the sequence at `depth` zero-sum free.
    #[inline]
    fn admissible(&self, depth: usize, g: usize) -> bool {
        g != 0 && !self.reachable(depth, self.table.neg[g] as usize)
    }

    /// Writes the subsums at `depth + 1` after appending `g`.
    fn push(&mut self, depth: usize, g: usize) {
        let w = self.words;
        let (lo, hi) = self.reach.split_at_mut((depth + 1) * w);
        let old = &lo[depth * w..];
        let new = &mut hi[..w];
        new.copy_from_slice(old);
        for (wi, &word) in old.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let s = self.table.add(b, g);
                new[s / 64] |= 1 << (s % 64);
            }
        }
        new[g / 64] |= 1 << (g % 64);
        self.sums[depth + 1] = self.table.add(self.sums[depth], g);
        self.terms.truncate(depth);
        self.terms.push(g);
    }

    /// Upper bound on the length reachable below `depth`: every admissible
    /// term adds at least one new subsum, and `0` is never a subsum.
    #[inline]
    fn bound(&self, depth: usize) -> usize {
        depth + (self.table.n - 1 - self.count(depth))
    }

    /// Longest zero-sum-free extension; keeps the first (least) one found
    /// that strictly beats `best`.
    fn longest(&mut self, depth: usize, start: usize, best: &mut usize, witness: &mut Option<Vec<usize>>) {
        self.nodes += 1;
        if depth > *best {
            *best = depth;
            *witness = Some(self.terms[..depth].to_vec());
        }
        for g in start..self.table.n {
            if self.bound(depth) <= *best {
                return;
            }
            if self.admissible(depth, g) {
                self.push(depth, g);
                self.longest(depth + 1, g, best, witness);
            }
        }
    }

    /// Visits every zero-sum-free `U` of length `target` below `depth`
    /// whose completion `-σ(U)` is at least `max(U)`; returns false if the
    /// sink asked to stop.
    fn complete(
        &mut self,
        depth: usize,
        start: usize,
        target: usize,
        sink: &mut dyn FnMut(&[usize], usize) -> bool,
    ) -> bool {
        self.nodes += 1;
        if depth == target {
            let last = self.table.neg[self.sums[depth]] as usize;
            if depth == 0 || last >= self.terms[depth - 1] {
                return sink(&self.terms[..depth], last);
            }
            return true;
        }
        if self.bound(depth) < target {
            return true;
        }
        for g in start..self.table.n {
            if self.admissible(depth, g) {
                self.push(depth, g);
                if !self.complete(depth + 1, g, target, sink) {
                    return false;
                }
            }
        }
        true
    }
}

fn roots(table: &Cayley) -> Vec<usize> {
    (1..table.n).collect()
}

/// Exact `D(G)` as one more than the longest zero-sum-free sequence.
pub fn davenport(group: &GroupSpec, cfg: &SearchConfig) -> Result<DavenportResult> {
    group.check_cap(cfg.caps.davenport_max_order)?;
    let started = Instant::now();
    let table = cayley(group);
    let n = table.n;
    let mut nodes = 1u64;
    let mut best = 0usize;
    let mut witness: Option<Vec<usize>> = Some(Vec::new());
    let roots = roots(&table);
    if let Some((&first, rest)) = roots.split_first() {
        // the first subtree runs alone to seed every other subtree's bound
        let mut dfs = Dfs::new(&table, n);
        dfs.push(0, first);
        dfs.longest(1, first, &mut best, &mut witness);
        nodes += dfs.nodes;
        let seed = best;
        let results: Vec<(usize, Option<Vec<usize>>, u64)> = cfg.run(|| {
            rest.par_iter()
                .map(|&a| {
                    let mut dfs = Dfs::new(&table, n);
                    let mut local = seed;
                    let mut found = None;
                    dfs.push(0, a);
                    dfs.longest(1, a, &mut local, &mut found);
                    (local, found, dfs.nodes)
                })
                .collect()
        });
        for (local, found, count) in results {
            nodes += count;
            if local > best {
                best = local;
                witness = found;
            }
        }
    }
    let mut terms = witness.expect("longest sequence recorded");
    let sum = terms.iter().fold(0usize, |acc, &g| table.add(acc, g));
    terms.push(table.neg[sum] as usize);
    Ok(DavenportResult {
        group: group.clone(),
        d: best + 1,
        witness: Sequence::from_indices(group, &terms),
        elapsed: started.elapsed(),
        nodes_explored: nodes,
    })
}

/// Streams every ml-mzss over `group`, each exactly once, in increasing order.
///
/// Each ml-mzss `S` is produced from `U = S` minus one copy of its largest
/// term: `U` is zero-sum free (a zero-sum `T | S` through that copy has a
/// zero-sum complement avoiding it), nondecreasing, of length `D - 1`, and
/// `-σ(U)` is the removed term, so it is at least `max(U)`. Conversely every
/// such `U` yields an mzss by the same complement argument. The accept rule
/// `-σ(U) ≥ max(U)` therefore matches ml-mzss with zero-sum-free prefixes
/// one-to-one.
pub fn enumerate_ml_mzss(
    group: &GroupSpec,
    cfg: &SearchConfig,
    sink: &mut dyn FnMut(Sequence),
) -> Result<EnumerationStats> {
    group.check_cap(cfg.caps.enumeration_max_order)?;
    let dav = davenport(group, &relaxed_davenport_cap(cfg))?;
    let stats = enumerate_indices(group, dav.d, cfg, &mut |terms| sink(Sequence::from_indices(group, terms)))?;
    Ok(EnumerationStats { nodes: stats.nodes + dav.nodes_explored, ..stats })
}

fn relaxed_davenport_cap(cfg: &SearchConfig) -> SearchConfig {
    let mut c = *cfg;
    c.caps.davenport_max_order = c.caps.davenport_max_order.max(c.caps.enumeration_max_order);
    c
}

/// Collects the enumeration into a vector.
pub fn ml_mzss(group: &GroupSpec, cfg: &SearchConfig) -> Result<Vec<Sequence>> {
    let mut out = Vec::new();
    enumerate_ml_mzss(group, cfg, &mut |s| out.push(s))?;
    Ok(out)
}

/// Calls `sink` with the full term list (indices, nondecreasing) of every
/// mzss of length `d`, in lexicographic order.
fn enumerate_indices(
    group: &GroupSpec,
    d: usize,
    cfg: &SearchConfig,
    sink: &mut dyn FnMut(&[usize]),
) -> Result<EnumerationStats> {
    let table = cayley(group);
    let target = d - 1;
    let mut total = 0u64;
    let mut nodes = 1u64;
    let mut buf = Vec::with_capacity(d);
    let mut emit = |prefix: &[usize], last: usize| {
        buf.clear();
        buf.extend_from_slice(prefix);
        buf.push(last);
        total += 1;
        sink(&buf);
        true
    };
    if target == 0 {
        let mut dfs = Dfs::new(&table, 1);
        dfs.complete(0, 0, 0, &mut emit);
        return Ok(EnumerationStats { length: d, total_count: total, nodes });
    }
    let roots = roots(&table);
    if cfg.workers <= 1 {
        for &a in &roots {
            let mut dfs = Dfs::new(&table, d);
            dfs.push(0, a);
            dfs.complete(1, a, target, &mut emit);
            nodes += dfs.nodes;
        }
    } else {
        let parts: Vec<(Vec<Vec<usize>>, u64)> = cfg.run(|| {
            roots
                .par_iter()
                .map(|&a| {
                    let mut found = Vec::new();
                    let mut dfs = Dfs::new(&table, d);
                    dfs.push(0, a);
                    dfs.complete(1, a, target, &mut |prefix, last| {
                        let mut s = prefix.to_vec();
                        s.push(last);
                        found.push(s);
                        true
                    });
                    (found, dfs.nodes)
                })
                .collect()
        });
        for (found, count) in parts {
            nodes += count;
            for s in found {
                emit(&s[..s.len() - 1], s[s.len() - 1]);
            }
        }
    }
    Ok(EnumerationStats { length: d, total_count: total, nodes })
}

/// Automorphisms as permutations of dense element indices.
pub(crate) fn automorphism_tables(group: &GroupSpec, cfg: &SearchConfig) -> Result<Vec<Vec<u32>>> {
    let auts = automorphisms_with_cap(group, cfg.caps.automorphism_max_order)?;
    Ok(auts.iter().map(|a| a.index_table()).collect())
}

/// Least image of a nondecreasing index list under the given permutations.
pub(crate) fn canonical_indices(perms: &[Vec<u32>], terms: &[usize]) -> Vec<usize> {
    let mut best: Option<Vec<usize>> = None;
    let mut image = Vec::with_capacity(terms.len());
    for p in perms {
        image.clear();
        image.extend(terms.iter().map(|&t| p[t] as usize));
        image.sort_unstable();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image.clone());
        }
    }
    best.unwrap_or_else(|| terms.to_vec())
}

/// The least sequence in the `Aut(G)`-orbit of `seq`.
pub fn canonicalize(seq: &Sequence, cfg: &SearchConfig) -> Result<Sequence> {
    let group = seq.group();
    let perms = automorphism_tables(group, cfg)?;
    Ok(Sequence::from_indices(group, &canonical_indices(&perms, &seq.indices())))
}

/// Total and orbit counts of the ml-mzss over `group`.
pub fn count_ml_mzss(group: &GroupSpec, cfg: &SearchConfig) -> Result<EnumerationReport> {
    count_ml_mzss_streaming(group, cfg, &mut |_| {})
}

/// As [`count_ml_mzss`], also streaming every ml-mzss to `sink`.
pub fn count_ml_mzss_streaming(
    group: &GroupSpec,
    cfg: &SearchConfig,
    sink: &mut dyn FnMut(Sequence),
) -> Result<EnumerationReport> {
    group.check_cap(cfg.caps.enumeration_max_order)?;
    let started = Instant::now();
    let perms = automorphism_tables(group, cfg)?;
    let dav = davenport(group, &relaxed_davenport_cap(cfg))?;
    let mut orbits: BTreeSet<Vec<usize>> = BTreeSet::new();
    let stats = enumerate_indices(group, dav.d, cfg, &mut |terms| {
        orbits.insert(canonical_indices(&perms, terms));
        sink(Sequence::from_indices(group, terms));
    })?;
    Ok(EnumerationReport {
        group: group.clone(),
        length: dav.d,
        total_count: stats.total_count,
        orbit_count: orbits.len() as u64,
        orbit_representatives: orbits.iter().map(|t| Sequence::from_indices(group, t)).collect(),
        elapsed: started.elapsed(),
        nodes: stats.nodes + dav.nodes_explored,
    })
}
